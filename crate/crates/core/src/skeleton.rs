//! Joint naming and the roles individual joints play in the pipeline.
//!
//! A [`Skeleton`] is an ordered list of joint names plus designations: the
//! root (pelvis, always the midpoint of the two hips), the head used for
//! scale normalization, and the set of feet used by ground-plane scaling.
//! Every per-joint array in this crate is indexed in skeleton order.

use std::collections::HashSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const SKELETON_SCHEMA_VERSION: u32 = 1;

/// Index of a joint within a [`Skeleton`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct KeypointId(pub usize);

/// On-disk form of a skeleton definition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SkeletonFile {
    pub version: u32,
    pub joints: Vec<String>,
    pub root: String,
    pub head: String,
    pub left_hip: String,
    pub right_hip: String,
    pub feet: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Skeleton {
    names: Vec<String>,
    root: KeypointId,
    head: KeypointId,
    left_hip: KeypointId,
    right_hip: KeypointId,
    feet: Vec<KeypointId>,
}

/// Joint order of the default 18-joint skeleton: a 16-joint body plus both hands.
pub const DEFAULT_JOINTS: [&str; 18] = [
    "pelvis",
    "r_hip",
    "r_knee",
    "r_foot",
    "l_hip",
    "l_knee",
    "l_foot",
    "thorax",
    "neck",
    "head",
    "l_shoulder",
    "l_elbow",
    "l_wrist",
    "r_shoulder",
    "r_elbow",
    "r_wrist",
    "l_hand",
    "r_hand",
];

impl Skeleton {
    pub fn new(
        names: Vec<String>,
        root: &str,
        head: &str,
        left_hip: &str,
        right_hip: &str,
        feet: &[&str],
    ) -> Result<Self> {
        let mut seen = HashSet::new();
        for name in &names {
            if name.is_empty() {
                return Err(Error::InvalidSkeleton("empty joint name".into()));
            }
            if !seen.insert(name.as_str()) {
                return Err(Error::InvalidSkeleton(format!("duplicate joint `{name}`")));
            }
        }
        let find = |n: &str| -> Result<KeypointId> {
            names
                .iter()
                .position(|x| x == n)
                .map(KeypointId)
                .ok_or_else(|| Error::InvalidSkeleton(format!("unknown joint `{n}`")))
        };
        let root = find(root)?;
        let head = find(head)?;
        let left_hip = find(left_hip)?;
        let right_hip = find(right_hip)?;
        if feet.is_empty() {
            return Err(Error::InvalidSkeleton("at least one foot joint is required".into()));
        }
        let feet = feet.iter().map(|f| find(f)).collect::<Result<Vec<_>>>()?;
        let distinct: HashSet<_> = [root, head, left_hip, right_hip].into_iter().collect();
        if distinct.len() != 4 {
            return Err(Error::InvalidSkeleton(
                "root, head and both hips must be distinct joints".into(),
            ));
        }
        if feet.contains(&root) {
            return Err(Error::InvalidSkeleton("the root cannot be a foot".into()));
        }
        Ok(Self {
            names,
            root,
            head,
            left_hip,
            right_hip,
            feet,
        })
    }

    /// 18 joints: H36M-style 16-joint body with `l_hand` / `r_hand` appended.
    pub fn default_body() -> Self {
        Self::new(
            DEFAULT_JOINTS.iter().map(|s| s.to_string()).collect(),
            "pelvis",
            "head",
            "l_hip",
            "r_hip",
            &["l_foot", "r_foot"],
        )
        .expect("default skeleton is valid")
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, id: KeypointId) -> &str {
        &self.names[id.0]
    }

    pub fn index_of(&self, name: &str) -> Option<KeypointId> {
        self.names.iter().position(|x| x == name).map(KeypointId)
    }

    pub fn root(&self) -> KeypointId {
        self.root
    }

    pub fn head(&self) -> KeypointId {
        self.head
    }

    pub fn left_hip(&self) -> KeypointId {
        self.left_hip
    }

    pub fn right_hip(&self) -> KeypointId {
        self.right_hip
    }

    pub fn feet(&self) -> &[KeypointId] {
        &self.feet
    }

    pub fn to_file(&self) -> SkeletonFile {
        SkeletonFile {
            version: SKELETON_SCHEMA_VERSION,
            joints: self.names.clone(),
            root: self.name(self.root).to_string(),
            head: self.name(self.head).to_string(),
            left_hip: self.name(self.left_hip).to_string(),
            right_hip: self.name(self.right_hip).to_string(),
            feet: self.feet.iter().map(|f| self.name(*f).to_string()).collect(),
        }
    }

    pub fn from_file(file: &SkeletonFile) -> Result<Self> {
        if file.version != SKELETON_SCHEMA_VERSION {
            return Err(Error::schema(
                "skeleton.version",
                format!("unsupported version {}", file.version),
            ));
        }
        let feet: Vec<&str> = file.feet.iter().map(String::as_str).collect();
        Self::new(
            file.joints.clone(),
            &file.root,
            &file.head,
            &file.left_hip,
            &file.right_hip,
            &feet,
        )
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let file: SkeletonFile = serde_json::from_str(&text)
            .map_err(|e| Error::schema(path.display().to_string(), e.to_string()))?;
        Self::from_file(&file)
    }
}

impl Default for Skeleton {
    fn default() -> Self {
        Self::default_body()
    }
}

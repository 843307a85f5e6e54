use serde::{Deserialize, Serialize};

use crate::geometry::{GsdMetadata, OrientedBox};

/// One labeled, confidence-weighted box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Detection {
    pub index: usize,
    pub obb: OrientedBox,
    pub label: String,
    pub confidence: f64,
    /// 1 when the object is hard to detect.
    #[serde(default)]
    pub difficulty: u8,
}

impl Detection {
    pub fn new(index: usize, label: &str, confidence: f64, obb: OrientedBox) -> Self {
        Detection { index, obb, label: label.to_string(), confidence, difficulty: 0 }
    }

    pub fn with_difficulty(mut self, difficulty: u8) -> Self {
        self.difficulty = difficulty;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scene {
    pub image_id: String,
    pub detections: Vec<Detection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gsd: Option<GsdMetadata>,
}

impl Scene {
    pub fn new(image_id: impl Into<String>) -> Self {
        Scene { image_id: image_id.into(), detections: Vec::new(), gsd: None }
    }

    /// Appends a detection, assigning the next index.
    pub fn push(&mut self, label: &str, confidence: f64, obb: OrientedBox) -> usize {
        let index = self.detections.len();
        self.detections.push(Detection::new(index, label, confidence, obb));
        index
    }

    pub fn with_gsd(mut self, gsd: GsdMetadata) -> Self {
        self.gsd = Some(gsd);
        self
    }

    pub fn len(&self) -> usize {
        self.detections.len()
    }

    pub fn is_empty(&self) -> bool {
        self.detections.is_empty()
    }
}

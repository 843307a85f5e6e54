use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::RetrievalError;
use crate::geometry::{compute_gsd, GsdMetadata, OrientedBox};
use crate::inference::{Detection, Scene};
use crate::vocab::Vocabulary;

#[derive(Debug, Serialize, Deserialize)]
struct FileDetection {
    label: String,
    confidence: f64,
    cx: f64,
    cy: f64,
    w: f64,
    h: f64,
    theta: f64,
    #[serde(default)]
    difficulty: u8,
}

#[derive(Debug, Serialize, Deserialize)]
struct FileImage {
    image_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    gsd: Option<GsdMetadata>,
    detections: Vec<FileDetection>,
}

#[derive(Debug, Serialize, Deserialize)]
struct SceneFile {
    images: Vec<FileImage>,
}

/// An immutable, validated set of scenes addressable by image id.
#[derive(Debug, Clone, PartialEq)]
pub struct Corpus {
    scenes: Vec<Scene>,
    index: HashMap<String, usize>,
}

impl Corpus {
    pub fn from_scenes(scenes: Vec<Scene>) -> Result<Self, RetrievalError> {
        let mut index = HashMap::with_capacity(scenes.len());
        for (i, s) in scenes.iter().enumerate() {
            if index.insert(s.image_id.clone(), i).is_some() {
                return Err(RetrievalError::DuplicateImageId(s.image_id.clone()));
            }
        }
        Ok(Corpus { scenes, index })
    }

    pub fn from_json_str(text: &str, v: &Vocabulary) -> Result<Self, RetrievalError> {
        let file: SceneFile = serde_json::from_str(text)
            .map_err(|e| RetrievalError::Schema { locus: format!("line {} column {}", e.line(), e.column()), message: e.to_string() })?;
        let mut scenes = Vec::with_capacity(file.images.len());
        for (i, img) in file.images.into_iter().enumerate() {
            scenes.push(validate_image(i, img, v)?);
        }
        Self::from_scenes(scenes)
    }

    pub fn scenes(&self) -> &[Scene] {
        &self.scenes
    }

    pub fn get(&self, image_id: &str) -> Option<&Scene> {
        self.index.get(image_id).map(|&i| &self.scenes[i])
    }

    pub fn position(&self, image_id: &str) -> Option<usize> {
        self.index.get(image_id).copied()
    }

    pub fn len(&self) -> usize {
        self.scenes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scenes.is_empty()
    }

    /// Serializes to the scene-file format read by [`load_corpus`].
    pub fn to_json(&self) -> String {
        let file = SceneFile {
            images: self
                .scenes
                .iter()
                .map(|s| FileImage {
                    image_id: s.image_id.clone(),
                    gsd: s.gsd,
                    detections: s
                        .detections
                        .iter()
                        .map(|d| FileDetection {
                            label: d.label.clone(),
                            confidence: d.confidence,
                            cx: d.obb.cx,
                            cy: d.obb.cy,
                            w: d.obb.w,
                            h: d.obb.h,
                            theta: d.obb.theta,
                            difficulty: d.difficulty,
                        })
                        .collect(),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&file).expect("corpus serializes")
    }
}

fn validate_image(i: usize, img: FileImage, v: &Vocabulary) -> Result<Scene, RetrievalError> {
    let schema = |locus: String, message: String| RetrievalError::Schema { locus, message };
    if img.image_id.trim().is_empty() {
        return Err(schema(format!("images[{i}].image_id"), "image_id must be non-empty".into()));
    }
    if let Some(g) = &img.gsd {
        compute_gsd(g).map_err(|e| schema(format!("images[{i}] ({}).gsd", img.image_id), e.to_string()))?;
    }
    let mut scene = Scene::new(img.image_id.clone());
    scene.gsd = img.gsd;
    for (j, d) in img.detections.into_iter().enumerate() {
        let locus = |field: &str| format!("images[{i}] ({}).detections[{j}].{field}", img.image_id);
        if !v.is_class(&d.label) {
            return Err(schema(locus("label"), format!("`{}` is not in the vocabulary", d.label)));
        }
        if !(0.0..=1.0).contains(&d.confidence) {
            return Err(schema(locus("confidence"), format!("{} is outside [0, 1]", d.confidence)));
        }
        if d.difficulty > 1 {
            return Err(schema(locus("difficulty"), format!("{} is not 0 or 1", d.difficulty)));
        }
        let obb = OrientedBox::new(d.cx, d.cy, d.w, d.h, d.theta).map_err(|e| schema(locus("box"), e.to_string()))?;
        scene.detections.push(Detection::new(j, &d.label, d.confidence, obb).with_difficulty(d.difficulty));
    }
    Ok(scene)
}

pub fn load_corpus(path: impl AsRef<Path>, v: &Vocabulary) -> Result<Corpus, RetrievalError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| RetrievalError::Io { path: path.display().to_string(), message: e.to_string() })?;
    Corpus::from_json_str(&text, v)
}

use super::RetrievalError;
use crate::geometry::{area_m2, compute_gsd};
use crate::inference::Scene;

/// Total ground area, in square meters, of the boxes labeled `flooded_label`.
/// Overlapping boxes are counted twice.
pub fn flooded_area_m2(scene: &Scene, flooded_label: &str) -> Result<f64, RetrievalError> {
    let meta = scene.gsd.as_ref().ok_or_else(|| RetrievalError::MissingGsd(scene.image_id.clone()))?;
    let gsd = compute_gsd(meta).map_err(|_| RetrievalError::MissingGsd(scene.image_id.clone()))?;
    Ok(scene
        .detections
        .iter()
        .filter(|d| d.label == flooded_label)
        .map(|d| area_m2(&d.obb, &gsd))
        .sum())
}

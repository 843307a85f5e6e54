use serde::{Deserialize, Serialize};

use super::GeometryError;

/// Acquisition metadata for converting pixels to meters. Either camera
/// parameters or precomputed ground sample distances.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GsdMetadata {
    Camera {
        flight_altitude_m: f64,
        sensor_width_mm: f64,
        sensor_height_mm: f64,
        focal_length_mm: f64,
        image_width_px: f64,
        image_height_px: f64,
    },
    Direct {
        gsd_w_m_per_px: f64,
        gsd_h_m_per_px: f64,
    },
}

/// Meters per pixel along the image width and height.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Gsd {
    pub w: f64,
    pub h: f64,
}

impl Gsd {
    pub fn mean(&self) -> f64 {
        (self.w + self.h) / 2.0
    }
}

fn positive(name: &'static str, v: f64) -> Result<f64, GeometryError> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(GeometryError::NonPositiveInput { field: name, value: v })
    }
}

/// `gsd = altitude * sensor_extent / (focal_length * image_extent)` per axis.
/// Altitude in meters, sensor and focal length in millimeters, image in pixels.
pub fn compute_gsd(meta: &GsdMetadata) -> Result<Gsd, GeometryError> {
    match *meta {
        GsdMetadata::Camera {
            flight_altitude_m,
            sensor_width_mm,
            sensor_height_mm,
            focal_length_mm,
            image_width_px,
            image_height_px,
        } => {
            let alt = positive("flight_altitude_m", flight_altitude_m)?;
            let sw = positive("sensor_width_mm", sensor_width_mm)?;
            let sh = positive("sensor_height_mm", sensor_height_mm)?;
            let f = positive("focal_length_mm", focal_length_mm)?;
            let iw = positive("image_width_px", image_width_px)?;
            let ih = positive("image_height_px", image_height_px)?;
            Ok(Gsd { w: alt * sw / (f * iw), h: alt * sh / (f * ih) })
        }
        GsdMetadata::Direct { gsd_w_m_per_px, gsd_h_m_per_px } => Ok(Gsd {
            w: positive("gsd_w_m_per_px", gsd_w_m_per_px)?,
            h: positive("gsd_h_m_per_px", gsd_h_m_per_px)?,
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn camera(alt: f64, focal: f64) -> GsdMetadata {
        GsdMetadata::Camera {
            flight_altitude_m: alt,
            sensor_width_mm: 6.16,
            sensor_height_mm: 4.55,
            focal_length_mm: focal,
            image_width_px: 4000.0,
            image_height_px: 3000.0,
        }
    }

    #[test]
    fn quadcopter_values() {
        let g = compute_gsd(&camera(60.96, 5.0)).unwrap();
        assert!((g.w - 0.0188).abs() < 1e-3);
        assert!((g.h - 0.0185).abs() < 1e-3);
    }

    #[test]
    fn linear_in_altitude_inverse_in_focal() {
        let g = compute_gsd(&camera(60.96, 5.0)).unwrap();
        let g2 = compute_gsd(&camera(121.92, 5.0)).unwrap();
        assert!((g2.w - 2.0 * g.w).abs() < 1e-15 && (g2.h - 2.0 * g.h).abs() < 1e-15);
        let g3 = compute_gsd(&camera(60.96, 10.0)).unwrap();
        assert!((g3.w - g.w / 2.0).abs() < 1e-15);
    }

    #[test]
    fn square_sensor_square_image() {
        let m = GsdMetadata::Camera {
            flight_altitude_m: 100.0,
            sensor_width_mm: 5.0,
            sensor_height_mm: 5.0,
            focal_length_mm: 8.0,
            image_width_px: 1000.0,
            image_height_px: 1000.0,
        };
        let g = compute_gsd(&m).unwrap();
        assert_eq!(g.w, g.h);
    }

    #[test]
    fn non_positive_rejected() {
        assert!(matches!(
            compute_gsd(&camera(0.0, 5.0)),
            Err(GeometryError::NonPositiveInput { field: "flight_altitude_m", .. })
        ));
    }

    #[test]
    fn deserializes_either_form() {
        let d: GsdMetadata = serde_json::from_str(r#"{"gsd_w_m_per_px":0.1,"gsd_h_m_per_px":0.2}"#).unwrap();
        assert!(matches!(d, GsdMetadata::Direct { .. }));
        let c: GsdMetadata = serde_json::from_str(
            r#"{"flight_altitude_m":60.96,"sensor_width_mm":6.16,"sensor_height_mm":4.55,
                "focal_length_mm":5,"image_width_px":4000,"image_height_px":3000}"#,
        )
        .unwrap();
        assert!(matches!(c, GsdMetadata::Camera { .. }));
    }
}

//! Corner keypoints and oriented 256-bit binary descriptors.
//!
//! Extraction is single-scale: FAST-9 detection with 3x3 non-maximum
//! suppression, intensity-centroid orientation, then 256 rotated pixel-pair
//! comparisons from [`SamplingPattern::orb`]. The pattern geometry is public
//! so that [`crate::dynfilter`] can reason about each descriptor's extent.

mod descriptor;
pub mod dump;
mod fast;
mod orb;
mod pattern;
mod pattern_table;

use thiserror::Error;

use crate::image::GrayImage;

pub use descriptor::{hamming, BinaryDescriptor, ParseDescriptorError};
pub use fast::{detect_keypoints, min_image_side};
pub use orb::{compute_orientation, describe};
pub use pattern::{SamplingPattern, ORIENTATION_RADIUS};

/// Default FAST intensity threshold.
pub const DEFAULT_FAST_THRESHOLD: u8 = 20;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FeatureError {
    #[error("image {width}x{height} is smaller than the minimum {min}x{min}")]
    ImageTooSmall {
        width: usize,
        height: usize,
        min: usize,
    },
    #[error("descriptor footprint at ({x}, {y}) leaves the image")]
    FootprintOutside { x: f32, y: f32 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Keypoint {
    pub x: f32,
    pub y: f32,
    /// Corner response.
    pub score: f32,
    /// Orientation in radians, `[0, 2π)`.
    pub angle: f32,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Feature {
    pub keypoint: Keypoint,
    pub descriptor: BinaryDescriptor,
}

/// Detect, orient and describe up to `target_count` features with the
/// default FAST threshold and built-in pattern.
pub fn extract(image: &GrayImage, target_count: usize) -> Result<Vec<Feature>, FeatureError> {
    extract_with(image, target_count, DEFAULT_FAST_THRESHOLD, &SamplingPattern::orb())
}

pub fn extract_with(
    image: &GrayImage,
    target_count: usize,
    fast_threshold: u8,
    pattern: &SamplingPattern,
) -> Result<Vec<Feature>, FeatureError> {
    let keypoints = detect_keypoints(image, target_count, fast_threshold, pattern.border_margin())?;
    keypoints
        .into_iter()
        .map(|mut keypoint| {
            keypoint.angle = compute_orientation(image, &keypoint)?;
            let descriptor = describe(image, &keypoint, pattern)?;
            Ok(Feature {
                keypoint,
                descriptor,
            })
        })
        .collect()
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub(crate) fn textured(w: usize, h: usize, seed: u64) -> GrayImage {
        let mut s = seed;
        let cells: Vec<u8> = (0..(w / 5 + 1) * (h / 5 + 1))
            .map(|_| {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                (s >> 56) as u8
            })
            .collect();
        GrayImage::from_fn(w, h, |x, y| cells[(y / 5) * (w / 5 + 1) + x / 5])
    }

    #[test]
    fn uniform_image_extracts_nothing() {
        assert!(extract(&GrayImage::filled(100, 100, 128), 500).unwrap().is_empty());
    }

    #[test]
    fn extraction_truncates_and_is_deterministic() {
        let img = textured(320, 240, 3);
        let a = extract(&img, 500).unwrap();
        let b = extract(&img, 500).unwrap();
        assert_eq!(a.len(), 500);
        assert_eq!(a, b);
        let all = extract(&img, usize::MAX).unwrap();
        assert_eq!(extract(&img, 300).unwrap().len(), 300.min(all.len()));
    }

    #[test]
    fn footprints_stay_inside_image() {
        let img = textured(120, 90, 11);
        let pattern = SamplingPattern::orb();
        for f in extract(&img, usize::MAX).unwrap() {
            let (x, y) = (f.keypoint.x as i32, f.keypoint.y as i32);
            for (dx, dy) in pattern.rotated_points(f.keypoint.angle) {
                assert!(img.get_signed((x + dx) as i64, (y + dy) as i64).is_some());
            }
            assert!((0.0..std::f32::consts::TAU).contains(&f.keypoint.angle));
        }
    }
}

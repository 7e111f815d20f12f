//! Intensity-centroid orientation and rotated pair-comparison descriptors.

use std::f64::consts::TAU;

use super::pattern::{SamplingPattern, ORIENTATION_RADIUS};
use super::{BinaryDescriptor, FeatureError, Keypoint};
use crate::image::GrayImage;

#[inline]
fn pixel_center(kp: &Keypoint) -> (i64, i64) {
    (kp.x.round() as i64, kp.y.round() as i64)
}

/// Orientation `atan2(m01, m10)` of the first-order intensity moments over
/// the radius-15 disc around the keypoint, in `[0, 2π)`. Zero moments give 0.
pub fn compute_orientation(image: &GrayImage, keypoint: &Keypoint) -> Result<f32, FeatureError> {
    let (cx, cy) = pixel_center(keypoint);
    let r = ORIENTATION_RADIUS as i64;
    if cx < r || cy < r || cx + r >= image.width() as i64 || cy + r >= image.height() as i64 {
        return Err(FeatureError::FootprintOutside {
            x: keypoint.x,
            y: keypoint.y,
        });
    }
    let (mut m10, mut m01) = (0i64, 0i64);
    for dy in -r..=r {
        let span = ((r * r - dy * dy) as f64).sqrt().floor() as i64;
        let row = (cy + dy) as usize * image.width();
        for dx in -span..=span {
            let v = image.data()[row + (cx + dx) as usize] as i64;
            m10 += dx * v;
            m01 += dy * v;
        }
    }
    if m10 == 0 && m01 == 0 {
        return Ok(0.0);
    }
    let mut angle = (m01 as f64).atan2(m10 as f64);
    if angle < 0.0 {
        angle += TAU;
    }
    // f32 rounding can land exactly on 2π
    let angle = angle as f32;
    Ok(if angle >= std::f32::consts::TAU { 0.0 } else { angle })
}

/// Bit `b` is set iff the first point of rotated pair `b` is strictly
/// darker than the second.
pub fn describe(
    image: &GrayImage,
    keypoint: &Keypoint,
    pattern: &SamplingPattern,
) -> Result<BinaryDescriptor, FeatureError> {
    let (cx, cy) = pixel_center(keypoint);
    let mut desc = BinaryDescriptor::ZERO;
    for (b, [p, q]) in pattern.rotated_pairs(keypoint.angle).enumerate().take(BinaryDescriptor::BITS) {
        let outside = || FeatureError::FootprintOutside {
            x: keypoint.x,
            y: keypoint.y,
        };
        let a = image.get_signed(cx + p.0 as i64, cy + p.1 as i64).ok_or_else(outside)?;
        let c = image.get_signed(cx + q.0 as i64, cy + q.1 as i64).ok_or_else(outside)?;
        if a < c {
            desc.set_bit(b, true);
        }
    }
    Ok(desc)
}

use super::pattern_table::PATTERN_PAIRS;

/// Radius of the circular patch used for intensity-centroid orientation.
pub const ORIENTATION_RADIUS: i32 = 15;

/// Point-pair sampling pattern of a binary descriptor.
///
/// The extent of a descriptor is the set of pixels its pairs touch once the
/// pattern is rotated by the keypoint angle and placed on the keypoint.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplingPattern {
    pairs: Vec<[(i32, i32); 2]>,
    radius: f64,
}

impl SamplingPattern {
    /// The built-in 256-pair pattern (isotropic Gaussian, sigma 31/5,
    /// clipped to a radius-15 disc, seed 20190611).
    pub fn orb() -> Self {
        Self::new(
            PATTERN_PAIRS
                .iter()
                .map(|p| [(p[0] as i32, p[1] as i32), (p[2] as i32, p[3] as i32)])
                .collect(),
        )
    }

    /// Custom pattern. Must contain exactly 256 pairs to drive a descriptor.
    pub fn new(pairs: Vec<[(i32, i32); 2]>) -> Self {
        let radius = pairs
            .iter()
            .flatten()
            .map(|&(x, y)| ((x * x + y * y) as f64).sqrt())
            .fold(0.0, f64::max);
        Self { pairs, radius }
    }

    pub fn pairs(&self) -> &[[(i32, i32); 2]] {
        &self.pairs
    }

    /// Distance from the keypoint to the furthest sampled point.
    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn sample_count(&self) -> usize {
        self.pairs.len() * 2
    }

    /// Detection border that keeps every rotated sample, and the
    /// orientation patch, inside the image.
    pub fn border_margin(&self) -> usize {
        self.radius.max(ORIENTATION_RADIUS as f64).ceil() as usize + 1
    }

    /// Pairs rotated by `angle` (radians), rounded to the nearest pixel
    /// offset (ties away from zero).
    pub fn rotated_pairs(&self, angle: f32) -> impl Iterator<Item = [(i32, i32); 2]> + '_ {
        let (s, c) = (angle as f64).sin_cos();
        let rot = move |(x, y): (i32, i32)| {
            let (x, y) = (x as f64, y as f64);
            ((c * x - s * y).round() as i32, (s * x + c * y).round() as i32)
        };
        self.pairs.iter().map(move |&[a, b]| [rot(a), rot(b)])
    }

    /// All sample points (both ends of every pair) after rotation.
    pub fn rotated_points(&self, angle: f32) -> impl Iterator<Item = (i32, i32)> + '_ {
        self.rotated_pairs(angle).flatten()
    }
}

impl Default for SamplingPattern {
    fn default() -> Self {
        Self::orb()
    }
}

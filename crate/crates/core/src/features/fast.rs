//! FAST-9 segment-test corner detection.

use super::{FeatureError, Keypoint};
use crate::image::GrayImage;

/// Bresenham circle of radius 3, clockwise from twelve o'clock.
pub(crate) const CIRCLE: [(i32, i32); 16] = [
    (0, -3),
    (1, -3),
    (2, -2),
    (3, -1),
    (3, 0),
    (3, 1),
    (2, 2),
    (1, 3),
    (0, 3),
    (-1, 3),
    (-2, 2),
    (-3, 1),
    (-3, 0),
    (-3, -1),
    (-2, -2),
    (-1, -3),
];

const ARC: usize = 9;

/// Segment-test response at `(x, y)`: `None` when no arc of 9 contiguous
/// circle pixels is uniformly brighter than `center + t` or darker than
/// `center - t`. The score is the larger of the summed excesses
/// `|I(p) - I(c)| - t` over the brighter and darker pixel sets.
fn corner_score(image: &GrayImage, x: usize, y: usize, threshold: u8) -> Option<f32> {
    let center = image.get(x, y) as i32;
    let t = threshold as i32;
    let mut state = [0i8; 16];
    let (mut bright_sum, mut dark_sum) = (0i32, 0i32);
    for (s, &(dx, dy)) in state.iter_mut().zip(CIRCLE.iter()) {
        let v = image.get((x as i32 + dx) as usize, (y as i32 + dy) as usize) as i32;
        if v > center + t {
            *s = 1;
            bright_sum += v - center - t;
        } else if v < center - t {
            *s = -1;
            dark_sum += center - v - t;
        }
    }
    let has_arc = |sign: i8| {
        let mut run = 0;
        // two laps cover arcs that wrap around index 0
        for i in 0..32 {
            if state[i % 16] == sign {
                run += 1;
                if run >= ARC {
                    return true;
                }
            } else {
                run = 0;
            }
        }
        false
    };
    let bright = has_arc(1);
    let dark = has_arc(-1);
    if !bright && !dark {
        return None;
    }
    let score = match (bright, dark) {
        (true, false) => bright_sum,
        (false, true) => dark_sum,
        _ => bright_sum.max(dark_sum),
    };
    Some(score as f32)
}

/// Minimum image side accepted by detection for a given border margin.
pub fn min_image_side(margin: usize) -> usize {
    2 * (margin - 1) + 7
}

/// FAST-9 corners inside `margin`, suppressed to 3x3 local maxima, sorted
/// by descending score with `(y, x)` ascending as tie-break, truncated to
/// `target_count`.
pub fn detect_keypoints(
    image: &GrayImage,
    target_count: usize,
    fast_threshold: u8,
    margin: usize,
) -> Result<Vec<Keypoint>, FeatureError> {
    let min_side = min_image_side(margin);
    if image.width() < min_side || image.height() < min_side {
        return Err(FeatureError::ImageTooSmall {
            width: image.width(),
            height: image.height(),
            min: min_side,
        });
    }
    let (w, h) = (image.width(), image.height());
    let margin = margin.max(3);
    let mut scores = vec![0f32; w * h];
    let mut corners = Vec::new();
    for y in margin..h - margin {
        for x in margin..w - margin {
            if let Some(s) = corner_score(image, x, y, fast_threshold) {
                scores[y * w + x] = s;
                corners.push((x, y));
            }
        }
    }

    // A neighbour wins on higher score, or equal score and earlier (y, x).
    let beats = |nx: usize, ny: usize, x: usize, y: usize, s: f32| {
        let ns = scores[ny * w + nx];
        ns > s || (ns == s && ns > 0.0 && (ny, nx) < (y, x))
    };
    let mut keypoints: Vec<Keypoint> = corners
        .into_iter()
        .filter(|&(x, y)| {
            let s = scores[y * w + x];
            for ny in y - 1..=y + 1 {
                for nx in x - 1..=x + 1 {
                    if (nx, ny) != (x, y) && beats(nx, ny, x, y, s) {
                        return false;
                    }
                }
            }
            true
        })
        .map(|(x, y)| Keypoint {
            x: x as f32,
            y: y as f32,
            score: scores[y * w + x],
            angle: 0.0,
        })
        .collect();
    keypoints.sort_by(|a, b| {
        b.score
            .total_cmp(&a.score)
            .then(a.y.total_cmp(&b.y))
            .then(a.x.total_cmp(&b.x))
    });
    keypoints.truncate(target_count);
    Ok(keypoints)
}

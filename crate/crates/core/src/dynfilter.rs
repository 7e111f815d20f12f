//! Dynamic/static classification of descriptors from detector boxes.
//!
//! Pixel `(i, j)` covers `[i, i+1) x [j, j+1)`; a keypoint or pattern sample
//! located at pixel `(i, j)` is tested at its centre `(i + 0.5, j + 0.5)`.
//! Boxes are closed, so a centre on a box edge is inside.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::{self, BufRead, Write};
use std::str::FromStr;

use thiserror::Error;

use crate::features::{Feature, SamplingPattern};

#[derive(Debug, Error)]
pub enum FilterError {
    #[error("sensitivity {0} must lie in (0, 1]")]
    BadSensitivity(f64),
    #[error("heuristic mode supports sensitivity up to 0.5, got {0}")]
    HeuristicRange(f64),
    #[error("detector confidence threshold {0} must lie in [0, 1]")]
    BadConfidence(f64),
    #[error("detections line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundingBox {
    pub cx: f64,
    pub cy: f64,
    pub w: f64,
    pub h: f64,
    pub class_name: String,
    pub confidence: f64,
}

impl BoundingBox {
    pub fn new(cx: f64, cy: f64, w: f64, h: f64, class_name: impl Into<String>, confidence: f64) -> Self {
        Self {
            cx,
            cy,
            w,
            h,
            class_name: class_name.into(),
            confidence,
        }
    }

    /// Box from its top-left corner and size.
    pub fn from_corner(x0: f64, y0: f64, w: f64, h: f64, class_name: impl Into<String>, confidence: f64) -> Self {
        Self::new(x0 + w / 2.0, y0 + h / 2.0, w, h, class_name, confidence)
    }

    pub fn x0(&self) -> f64 {
        self.cx - self.w / 2.0
    }
    pub fn x1(&self) -> f64 {
        self.cx + self.w / 2.0
    }
    pub fn y0(&self) -> f64 {
        self.cy - self.h / 2.0
    }
    pub fn y1(&self) -> f64 {
        self.cy + self.h / 2.0
    }

    #[inline]
    pub fn contains_point(&self, x: f64, y: f64) -> bool {
        x >= self.x0() && x <= self.x1() && y >= self.y0() && y <= self.y1()
    }

    /// Whether the centre of pixel `(px, py)` lies in the box.
    #[inline]
    pub fn contains_pixel(&self, px: f64, py: f64) -> bool {
        self.contains_point(px + 0.5, py + 0.5)
    }

    pub fn corners(&self) -> [(f64, f64); 4] {
        [
            (self.x0(), self.y0()),
            (self.x1(), self.y0()),
            (self.x0(), self.y1()),
            (self.x1(), self.y1()),
        ]
    }

    /// `(x0, y0, x1, y1)` clamped to a `width x height` image.
    pub fn clamped(&self, width: f64, height: f64) -> (f64, f64, f64, f64) {
        (
            self.x0().clamp(0.0, width),
            self.y0().clamp(0.0, height),
            self.x1().clamp(0.0, width),
            self.y1().clamp(0.0, height),
        )
    }
}

/// Boxes reported by the external detector for one frame.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DetectionSet {
    pub frame_id: String,
    pub boxes: Vec<BoundingBox>,
}

impl DetectionSet {
    pub fn new(frame_id: impl Into<String>, boxes: Vec<BoundingBox>) -> Self {
        Self {
            frame_id: frame_id.into(),
            boxes,
        }
    }

    pub fn empty(frame_id: impl Into<String>) -> Self {
        Self::new(frame_id, Vec::new())
    }

    /// Boxes of a dynamic class with confidence at or above the threshold.
    pub fn relevant(&self, config: &FilterConfig) -> Vec<BoundingBox> {
        self.boxes
            .iter()
            .filter(|b| b.confidence >= config.detector_confidence_min && config.dynamic_classes.contains(&b.class_name))
            .cloned()
            .collect()
    }
}

/// All detections of a sequence, keyed by frame id. Frames without records
/// have no boxes.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Detections {
    frames: BTreeMap<String, Vec<BoundingBox>>,
}

impl Detections {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, frame_id: &str, bbox: BoundingBox) {
        self.frames.entry(frame_id.to_owned()).or_default().push(bbox);
    }

    pub fn frame(&self, frame_id: &str) -> DetectionSet {
        DetectionSet::new(frame_id, self.frames.get(frame_id).cloned().unwrap_or_default())
    }

    pub fn frame_count(&self) -> usize {
        self.frames.len()
    }

    /// Parses `frame_id class_name confidence cx cy w h` records.
    pub fn read<R: BufRead>(input: R) -> Result<Self, FilterError> {
        let mut out = Self::new();
        for (i, line) in input.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |msg: &str| FilterError::Parse {
                line: i + 1,
                msg: msg.to_owned(),
            };
            let f: Vec<&str> = line.split_whitespace().collect();
            if f.len() != 7 {
                return Err(err("expected `frame_id class_name confidence cx cy w h`"));
            }
            let num = |s: &str| {
                s.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| err(&format!("bad number {s:?}")))
            };
            let b = BoundingBox::new(num(f[3])?, num(f[4])?, num(f[5])?, num(f[6])?, f[1], num(f[2])?);
            if b.w <= 0.0 || b.h <= 0.0 {
                return Err(err("box width and height must be positive"));
            }
            if !(0.0..=1.0).contains(&b.confidence) {
                return Err(err("confidence must lie in [0, 1]"));
            }
            out.insert(f[0], b);
        }
        Ok(out)
    }

    pub fn write<W: Write>(&self, mut out: W) -> io::Result<()> {
        for (frame, boxes) in &self.frames {
            for b in boxes {
                writeln!(out, "{frame} {} {} {} {} {} {}", b.class_name, b.confidence, b.cx, b.cy, b.w, b.h)?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FilterMode {
    /// Keypoint-in-box (sensitivity <= 0.25) and corner-distance
    /// (sensitivity <= 0.5) rules.
    #[default]
    Heuristic,
    /// Counts rotated pattern samples inside boxes.
    Exact,
}

impl FromStr for FilterMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "heuristic" => Ok(Self::Heuristic),
            "exact" => Ok(Self::Exact),
            _ => Err(format!("unknown filter mode {s:?} (heuristic|exact)")),
        }
    }
}

impl fmt::Display for FilterMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Heuristic => "heuristic",
            Self::Exact => "exact",
        })
    }
}

pub const DEFAULT_DYNAMIC_CLASSES: [&str; 6] = ["bicycle", "bus", "car", "motorcycle", "person", "truck"];

#[derive(Debug, Clone, PartialEq)]
pub struct FilterConfig {
    /// Fraction of the extent that must be dynamic for a DC label.
    pub sensitivity: f64,
    pub mode: FilterMode,
    pub dynamic_classes: BTreeSet<String>,
    pub detector_confidence_min: f64,
}

impl Default for FilterConfig {
    fn default() -> Self {
        Self {
            sensitivity: 0.25,
            mode: FilterMode::Heuristic,
            dynamic_classes: DEFAULT_DYNAMIC_CLASSES.iter().map(|s| s.to_string()).collect(),
            detector_confidence_min: 0.2,
        }
    }
}

impl FilterConfig {
    pub fn validate(&self) -> Result<(), FilterError> {
        if !(self.sensitivity > 0.0 && self.sensitivity <= 1.0) {
            return Err(FilterError::BadSensitivity(self.sensitivity));
        }
        if self.mode == FilterMode::Heuristic && self.sensitivity > 0.5 {
            return Err(FilterError::HeuristicRange(self.sensitivity));
        }
        if !(0.0..=1.0).contains(&self.detector_confidence_min) {
            return Err(FilterError::BadConfidence(self.detector_confidence_min));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeatureClass {
    /// Extent affected by dynamic objects beyond the sensitivity threshold.
    Dynamic,
    Static,
}

/// Labels one feature against boxes already filtered by class and
/// confidence.
pub fn classify_feature(
    feature: &Feature,
    pattern: &SamplingPattern,
    boxes: &[BoundingBox],
    config: &FilterConfig,
) -> Result<FeatureClass, FilterError> {
    config.validate()?;
    let kp = &feature.keypoint;
    let dynamic = match config.mode {
        FilterMode::Heuristic => {
            let (x, y) = (kp.x as f64 + 0.5, kp.y as f64 + 0.5);
            if config.sensitivity <= 0.25 {
                boxes.iter().any(|b| b.contains_point(x, y))
            } else {
                let r = pattern.radius();
                boxes.iter().any(|b| {
                    b.contains_point(x, y)
                        && b.corners().iter().all(|&(cx, cy)| (cx - x).hypot(cy - y) > r)
                })
            }
        }
        FilterMode::Exact => extent_fraction(feature, pattern, boxes) > config.sensitivity,
    };
    Ok(if dynamic {
        FeatureClass::Dynamic
    } else {
        FeatureClass::Static
    })
}

/// Fraction of the rotated pattern samples whose pixel lies in any box.
pub fn extent_fraction(feature: &Feature, pattern: &SamplingPattern, boxes: &[BoundingBox]) -> f64 {
    let total = pattern.sample_count();
    if total == 0 || boxes.is_empty() {
        return 0.0;
    }
    let kx = feature.keypoint.x.round() as f64;
    let ky = feature.keypoint.y.round() as f64;
    let inside = pattern
        .rotated_points(feature.keypoint.angle)
        .filter(|&(dx, dy)| {
            let (px, py) = (kx + dx as f64, ky + dy as f64);
            boxes.iter().any(|b| b.contains_pixel(px, py))
        })
        .count();
    inside as f64 / total as f64
}

/// A place representation split into static (SC) and dynamic (DC) features.
/// Both lists keep input order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ClassifiedRepresentation {
    pub static_features: Vec<Feature>,
    pub dynamic_features: Vec<Feature>,
}

impl ClassifiedRepresentation {
    /// Every feature static: the unfiltered baseline representation.
    pub fn unfiltered(features: Vec<Feature>) -> Self {
        Self {
            static_features: features,
            dynamic_features: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.static_features.len() + self.dynamic_features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

pub fn partition(
    features: &[Feature],
    detections: &DetectionSet,
    config: &FilterConfig,
    pattern: &SamplingPattern,
) -> Result<ClassifiedRepresentation, FilterError> {
    config.validate()?;
    let boxes = detections.relevant(config);
    let mut out = ClassifiedRepresentation::default();
    for f in features {
        match classify_feature(f, pattern, &boxes, config)? {
            FeatureClass::Static => out.static_features.push(*f),
            FeatureClass::Dynamic => out.dynamic_features.push(*f),
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ValidityConfig {
    pub place_threshold: usize,
}

impl Default for ValidityConfig {
    fn default() -> Self {
        Self { place_threshold: 20 }
    }
}

/// A representation is valid when it keeps strictly more than
/// `place_threshold` static features.
pub fn is_valid(classified: &ClassifiedRepresentation, config: &ValidityConfig) -> bool {
    classified.static_features.len() > config.place_threshold
}

/// Area of the union of the boxes, clamped to the image, over the image
/// area. Exact, by coordinate-compression sweep.
pub fn dynamic_coverage(boxes: &[BoundingBox], image_width: usize, image_height: usize) -> f64 {
    let (w, h) = (image_width as f64, image_height as f64);
    if w <= 0.0 || h <= 0.0 {
        return 0.0;
    }
    let rects: Vec<(f64, f64, f64, f64)> = boxes
        .iter()
        .map(|b| b.clamped(w, h))
        .filter(|r| r.2 > r.0 && r.3 > r.1)
        .collect();
    let mut xs: Vec<f64> = rects.iter().flat_map(|r| [r.0, r.2]).collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    let mut area = 0.0;
    let mut spans = Vec::new();
    for slab in xs.windows(2) {
        let (xa, xb) = (slab[0], slab[1]);
        spans.clear();
        spans.extend(rects.iter().filter(|r| r.0 <= xa && r.2 >= xb).map(|r| (r.1, r.3)));
        spans.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut covered = 0.0;
        let mut current: Option<(f64, f64)> = None;
        for &(y0, y1) in &spans {
            current = match current {
                Some((a, b)) if y0 <= b => Some((a, b.max(y1))),
                Some((a, b)) => {
                    covered += b - a;
                    Some((y0, y1))
                }
                None => Some((y0, y1)),
            };
        }
        if let Some((a, b)) = current {
            covered += b - a;
        }
        area += covered * (xb - xa);
    }
    (area / (w * h)).clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::{BinaryDescriptor, Keypoint};
    use proptest::prelude::*;

    fn feature_at(x: f32, y: f32, angle: f32) -> Feature {
        Feature {
            keypoint: Keypoint {
                x,
                y,
                score: 1.0,
                angle,
            },
            descriptor: BinaryDescriptor::ZERO,
        }
    }

    fn car(cx: f64, cy: f64, w: f64, h: f64) -> BoundingBox {
        BoundingBox::new(cx, cy, w, h, "car", 0.9)
    }

    fn heuristic(s: f64) -> FilterConfig {
        FilterConfig {
            sensitivity: s,
            ..FilterConfig::default()
        }
    }

    fn exact(s: f64) -> FilterConfig {
        FilterConfig {
            sensitivity: s,
            mode: FilterMode::Exact,
            ..FilterConfig::default()
        }
    }

    /// Per-pixel raster of the boxes (pixel centres), built independently
    /// of `contains_pixel`.
    fn raster(boxes: &[BoundingBox], w: usize, h: usize) -> Vec<bool> {
        let mut mask = vec![false; w * h];
        for b in boxes {
            let xa = (b.x0() - 0.5).ceil().max(0.0) as usize;
            let xb = (b.x1() - 0.5).floor().min(w as f64 - 1.0);
            let ya = (b.y0() - 0.5).ceil().max(0.0) as usize;
            let yb = (b.y1() - 0.5).floor().min(h as f64 - 1.0);
            if xb < 0.0 || yb < 0.0 {
                continue;
            }
            for y in ya..=yb as usize {
                for x in xa..=xb as usize {
                    mask[y * w + x] = true;
                }
            }
        }
        mask
    }

    #[test]
    fn keypoint_inside_box_is_dynamic_at_quarter_sensitivity() {
        let p = SamplingPattern::orb();
        let f = feature_at(50.0, 50.0, 0.0);
        let c = classify_feature(&f, &p, &[car(60.0, 60.0, 40.0, 40.0)], &heuristic(0.25)).unwrap();
        assert_eq!(c, FeatureClass::Dynamic);
    }

    #[test]
    fn far_box_is_static() {
        let p = SamplingPattern::orb();
        let f = feature_at(5.0, 5.0, 0.0);
        let b = BoundingBox::from_corner(100.0, 0.0, 40.0, 200.0, "car", 1.0);
        for cfg in [heuristic(0.25), heuristic(0.5), exact(0.1)] {
            assert_eq!(classify_feature(&f, &p, std::slice::from_ref(&b), &cfg).unwrap(), FeatureClass::Static);
        }
    }

    #[test]
    fn corner_distance_rule_at_half_sensitivity() {
        let p = SamplingPattern::orb();
        assert_eq!(p.radius(), 15.0);
        let f = feature_at(100.0, 100.0, 0.3);
        let big = car(100.5, 100.5, 200.0, 200.0);
        assert_eq!(classify_feature(&f, &p, &[big], &heuristic(0.5)).unwrap(), FeatureClass::Dynamic);
        // inside, but a corner within r
        let corner = BoundingBox::from_corner(90.0, 90.0, 100.0, 100.0, "car", 1.0);
        assert_eq!(classify_feature(&f, &p, std::slice::from_ref(&corner), &heuristic(0.5)).unwrap(), FeatureClass::Static);
        assert_eq!(classify_feature(&f, &p, &[corner], &heuristic(0.25)).unwrap(), FeatureClass::Dynamic);
    }

    #[test]
    fn heuristic_above_half_is_a_config_error() {
        let p = SamplingPattern::orb();
        let f = feature_at(50.0, 50.0, 0.0);
        assert!(matches!(
            classify_feature(&f, &p, &[], &heuristic(0.6)),
            Err(FilterError::HeuristicRange(_))
        ));
        assert!(classify_feature(&f, &p, &[], &exact(0.6)).is_ok());
        assert!(matches!(
            classify_feature(&f, &p, &[], &exact(0.0)),
            Err(FilterError::BadSensitivity(_))
        ));
    }

    #[test]
    fn exact_half_coverage_is_static_with_strict_threshold() {
        // 256 pairs straddling x = 0: first points left, second points right
        let pairs = (0..256).map(|i| [(-3, (i % 21) - 10), (3, (i % 21) - 10)]).collect();
        let p = SamplingPattern::new(pairs);
        let f = feature_at(50.0, 50.0, 0.0);
        // right half-plane from x = 50 (pixel 50 centre is 50.5)
        let b = BoundingBox::from_corner(50.0, 0.0, 100.0, 100.0, "car", 1.0);
        assert_eq!(extent_fraction(&f, &p, std::slice::from_ref(&b)), 0.5);
        assert_eq!(classify_feature(&f, &p, std::slice::from_ref(&b), &exact(0.5)).unwrap(), FeatureClass::Static);
        assert_eq!(classify_feature(&f, &p, &[b], &exact(0.49)).unwrap(), FeatureClass::Dynamic);
    }

    #[test]
    fn exact_half_on_builtin_pattern() {
        // brute-force search for a box holding exactly 256 of the 512 samples
        let p = SamplingPattern::orb();
        let f = feature_at(50.0, 50.0, 0.0);
        let raster_count = |b: &BoundingBox| {
            let mask = raster(std::slice::from_ref(b), 120, 120);
            p.rotated_points(0.0)
                .filter(|&(dx, dy)| mask[((50 + dy) * 120 + 50 + dx) as usize])
                .count()
        };
        let mut found = None;
        'search: for w in 1..=40 {
            for x0 in 30..=70 {
                let b = BoundingBox::from_corner(x0 as f64, 0.0, w as f64 + 100.0, 120.0, "car", 1.0);
                if raster_count(&b) == 256 {
                    found = Some(b);
                    break 'search;
                }
                let b = BoundingBox::from_corner(0.0, x0 as f64, 120.0, w as f64 + 100.0, "car", 1.0);
                if raster_count(&b) == 256 {
                    found = Some(b);
                    break 'search;
                }
            }
        }
        if let Some(b) = found {
            assert_eq!(extent_fraction(&f, &p, std::slice::from_ref(&b)), 0.5);
            assert_eq!(classify_feature(&f, &p, &[b], &exact(0.5)).unwrap(), FeatureClass::Static);
        }
    }

    #[test]
    fn partition_edge_cases() {
        let p = SamplingPattern::orb();
        let features: Vec<Feature> = (0..20).map(|i| feature_at(20.0 + 5.0 * i as f32, 40.0, 0.1 * i as f32)).collect();
        let none = partition(&features, &DetectionSet::empty("f"), &heuristic(0.25), &p).unwrap();
        assert_eq!(none.static_features, features);
        assert!(none.dynamic_features.is_empty());

        let all = DetectionSet::new("f", vec![BoundingBox::from_corner(0.0, 0.0, 200.0, 100.0, "person", 0.5)]);
        let cls = partition(&features, &all, &heuristic(0.25), &p).unwrap();
        assert_eq!(cls.dynamic_features, features);

        // non-dynamic classes and low-confidence boxes are ignored
        let ignored = DetectionSet::new(
            "f",
            vec![
                BoundingBox::from_corner(0.0, 0.0, 200.0, 100.0, "tree", 1.0),
                BoundingBox::from_corner(0.0, 0.0, 200.0, 100.0, "car", 0.1),
            ],
        );
        let cls = partition(&features, &ignored, &heuristic(0.25), &p).unwrap();
        assert_eq!(cls.static_features.len(), 20);
    }

    #[test]
    fn validity_is_strict() {
        let f = feature_at(0.0, 0.0, 0.0);
        let rep = |n: usize| ClassifiedRepresentation {
            static_features: vec![f; n],
            dynamic_features: vec![f; 5],
        };
        let cfg = ValidityConfig { place_threshold: 10 };
        assert!(!is_valid(&rep(0), &cfg));
        assert!(!is_valid(&rep(10), &cfg));
        assert!(is_valid(&rep(11), &cfg));
    }

    #[test]
    fn coverage_examples() {
        assert_eq!(dynamic_coverage(&[], 100, 100), 0.0);
        assert_eq!(dynamic_coverage(&[BoundingBox::from_corner(0.0, 0.0, 100.0, 80.0, "car", 1.0)], 100, 80), 1.0);
        // two 50x50 boxes (25% each) overlapping in half their area
        let boxes = [
            BoundingBox::from_corner(0.0, 0.0, 50.0, 50.0, "car", 1.0),
            BoundingBox::from_corner(25.0, 0.0, 50.0, 50.0, "car", 1.0),
        ];
        let raster_frac = raster(&boxes, 100, 100).iter().filter(|&&m| m).count() as f64 / 1e4;
        assert_eq!(raster_frac, 0.375);
        assert_eq!(dynamic_coverage(&boxes, 100, 100), 0.375);
        // clamped to the image
        let outside = [BoundingBox::from_corner(-50.0, -50.0, 100.0, 100.0, "car", 1.0)];
        assert_eq!(dynamic_coverage(&outside, 100, 100), 0.25);
    }

    #[test]
    fn detection_file_round_trip_and_errors() {
        let text = "# comment\nf1 car 0.9 10 20 30 40\nf1 person 0.5 1.5 2.5 3 4\nf2 bus 1 5 5 2 2\n";
        let d = Detections::read(text.as_bytes()).unwrap();
        assert_eq!(d.frame("f1").boxes.len(), 2);
        assert_eq!(d.frame("f1").boxes[0], BoundingBox::new(10.0, 20.0, 30.0, 40.0, "car", 0.9));
        assert!(d.frame("missing").boxes.is_empty());
        let mut buf = Vec::new();
        d.write(&mut buf).unwrap();
        assert_eq!(Detections::read(&buf[..]).unwrap(), d);

        assert!(matches!(Detections::read("f1 car 0.9 1 2 3\n".as_bytes()), Err(FilterError::Parse { line: 1, .. })));
        assert!(Detections::read("f1 car 0.9 1 2 0 3\n".as_bytes()).is_err());
        assert!(Detections::read("f1 car x 1 2 3 3\n".as_bytes()).is_err());
    }

    fn arb_box() -> impl Strategy<Value = BoundingBox> {
        (0.0..200.0f64, 0.0..200.0f64, 1.0..120.0f64, 1.0..120.0f64)
            .prop_map(|(x, y, w, h)| BoundingBox::from_corner(x, y, w, h, "car", 1.0))
    }

    proptest! {
        #[test]
        fn partition_law(
            kps in prop::collection::vec((16.0..184.0f32, 16.0..184.0f32, 0.0..std::f32::consts::TAU), 0..40),
            boxes in prop::collection::vec(arb_box(), 0..4),
            s in 0.01..1.0f64,
        ) {
            let p = SamplingPattern::orb();
            let features: Vec<Feature> = kps.iter().map(|&(x, y, a)| feature_at(x.round(), y.round(), a)).collect();
            let det = DetectionSet::new("f", boxes);
            let cls = partition(&features, &det, &exact(s), &p).unwrap();
            prop_assert_eq!(cls.len(), features.len());
            // order-preserving merge reconstructs the input
            let (mut i, mut j) = (0, 0);
            for f in &features {
                if i < cls.static_features.len() && cls.static_features[i] == *f {
                    i += 1;
                } else {
                    prop_assert_eq!(cls.dynamic_features[j], *f);
                    j += 1;
                }
            }
        }

        #[test]
        fn exact_mode_monotone_in_sensitivity(
            x in 16.0..184.0f32, y in 16.0..184.0f32, a in 0.0..std::f32::consts::TAU,
            boxes in prop::collection::vec(arb_box(), 1..4),
            s1 in 0.01..1.0f64, s2 in 0.01..1.0f64,
        ) {
            let p = SamplingPattern::orb();
            let f = feature_at(x.round(), y.round(), a);
            let (lo, hi) = if s1 <= s2 { (s1, s2) } else { (s2, s1) };
            let c_lo = classify_feature(&f, &p, &boxes, &exact(lo)).unwrap();
            let c_hi = classify_feature(&f, &p, &boxes, &exact(hi)).unwrap();
            if c_lo == FeatureClass::Static {
                prop_assert_eq!(c_hi, FeatureClass::Static);
            }
        }

        #[test]
        fn adding_a_box_never_unsets_dynamic(
            x in 16.0..184.0f32, y in 16.0..184.0f32, a in 0.0..std::f32::consts::TAU,
            boxes in prop::collection::vec(arb_box(), 0..4),
            extra in arb_box(),
            s in 0.01..0.5f64,
            exact_mode in any::<bool>(),
        ) {
            let p = SamplingPattern::orb();
            let f = feature_at(x.round(), y.round(), a);
            let cfg = if exact_mode { exact(s) } else { heuristic(s) };
            let before = classify_feature(&f, &p, &boxes, &cfg).unwrap();
            let mut more = boxes.clone();
            more.push(extra);
            let after = classify_feature(&f, &p, &more, &cfg).unwrap();
            if before == FeatureClass::Dynamic {
                prop_assert_eq!(after, FeatureClass::Dynamic);
            }
        }

        #[test]
        fn coverage_matches_raster_on_integer_boxes(
            rects in prop::collection::vec((0u32..90, 0u32..70, 1u32..60, 1u32..60), 0..6),
        ) {
            let boxes: Vec<BoundingBox> = rects
                .iter()
                .map(|&(x, y, w, h)| BoundingBox::from_corner(x as f64, y as f64, w as f64, h as f64, "car", 1.0))
                .collect();
            let mask = raster(&boxes, 100, 80);
            let expected = mask.iter().filter(|&&m| m).count() as f64 / 8000.0;
            prop_assert!((dynamic_coverage(&boxes, 100, 80) - expected).abs() < 1e-12);
        }

        #[test]
        fn exact_fraction_matches_raster(
            x in 16.0..184.0f32, y in 16.0..184.0f32, a in 0.0..std::f32::consts::TAU,
            boxes in prop::collection::vec(arb_box(), 1..3),
        ) {
            let p = SamplingPattern::orb();
            let f = feature_at(x.round(), y.round(), a);
            let mask = raster(&boxes, 200, 200);
            let (kx, ky) = (x.round() as i32, y.round() as i32);
            let count = p.rotated_points(a).filter(|&(dx, dy)| mask[((ky + dy) * 200 + kx + dx) as usize]).count();
            prop_assert_eq!(extent_fraction(&f, &p, &boxes), count as f64 / 512.0);
        }
    }
}

//! Seeded synthetic place sequences.
//!
//! Each place has a fixed static texture; each visit adds textured
//! rectangles standing in for dynamic objects and a global illumination
//! offset. Object textures come from a small shared pool of corner-rich
//! tiles, so the same "car" looks alike wherever it is parked.

use std::collections::BTreeMap;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::EvalError;
use crate::dynfilter::{dynamic_coverage, BoundingBox, Detections};
use crate::image::{save_pgm, GrayImage};
use crate::seed::derive_seed;

pub const OBJECT_CLASSES: [&str; 6] = ["car", "person", "bicycle", "truck", "bus", "motorcycle"];

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorConfig {
    pub num_places: usize,
    pub visits_per_place: usize,
    /// Range the per-frame union coverage target is drawn from.
    pub coverage: (f64, f64),
    pub width: usize,
    pub height: usize,
    /// Largest absolute per-visit intensity offset.
    pub illumination: i32,
    /// Reuse the first visit's objects on every visit of a place.
    pub static_dynamics: bool,
    /// Smallest object side in pixels.
    pub min_box: usize,
    pub seed: u64,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        Self {
            num_places: 50,
            visits_per_place: 3,
            coverage: (0.1, 0.4),
            width: 320,
            height: 240,
            illumination: 25,
            static_dynamics: false,
            min_box: 24,
            seed: 1,
        }
    }
}

impl GeneratorConfig {
    pub fn validate(&self) -> Result<(), EvalError> {
        let (lo, hi) = self.coverage;
        if self.num_places < 2 || self.visits_per_place < 2 {
            return Err(EvalError::Config("need at least 2 places and 2 visits per place".into()));
        }
        if !(0.0..1.0).contains(&lo) || !(0.0..1.0).contains(&hi) || lo > hi {
            return Err(EvalError::Config(format!(
                "coverage range [{lo}, {hi}] must satisfy 0 <= lo <= hi < 1"
            )));
        }
        let side = self.min_box as f64;
        if hi > 0.0 && side * side > hi * (self.width * self.height) as f64 + 0.02 * (self.width * self.height) as f64 {
            return Err(EvalError::Config(format!(
                "coverage {hi} is below the area of one minimum-size box"
            )));
        }
        if self.width < 64 || self.height < 64 || self.min_box < 4 {
            return Err(EvalError::Config("frames must be at least 64x64 with boxes of 4 px or more".into()));
        }
        Ok(())
    }
}

/// A rendered dynamic object: integer rectangle plus texture.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Placement {
    pub x0: usize,
    pub y0: usize,
    pub w: usize,
    pub h: usize,
    pub class: usize,
}

impl Placement {
    pub fn bounding_box(&self) -> BoundingBox {
        BoundingBox::from_corner(
            self.x0 as f64,
            self.y0 as f64,
            self.w as f64,
            self.h as f64,
            OBJECT_CLASSES[self.class],
            1.0,
        )
    }

    /// Whether pixel `(x, y)` is painted by this object.
    pub fn covers(&self, x: usize, y: usize) -> bool {
        x >= self.x0 && x < self.x0 + self.w && y >= self.y0 && y < self.y0 + self.h
    }
}

#[derive(Debug, Clone)]
pub struct SyntheticFrame {
    pub frame_id: String,
    pub place_id: u32,
    pub visit: u32,
    pub image: GrayImage,
    pub objects: Vec<Placement>,
    pub illumination: i32,
    pub coverage: f64,
}

impl SyntheticFrame {
    pub fn boxes(&self) -> Vec<BoundingBox> {
        self.objects.iter().map(Placement::bounding_box).collect()
    }

    /// Ground truth: whether the keypoint pixel is painted by an object.
    pub fn point_on_object(&self, x: f32, y: f32) -> bool {
        let (x, y) = (x as usize, y as usize);
        self.objects.iter().any(|o| o.covers(x, y))
    }
}

#[derive(Debug, Clone)]
pub struct SyntheticSequence {
    pub config: GeneratorConfig,
    /// Place-major, visit-minor order.
    pub frames: Vec<SyntheticFrame>,
}

impl SyntheticSequence {
    pub fn detections(&self) -> Detections {
        let mut d = Detections::new();
        for f in &self.frames {
            for b in f.boxes() {
                d.insert(&f.frame_id, b);
            }
        }
        d
    }

    pub fn ground_truth(&self) -> BTreeMap<String, u32> {
        self.frames.iter().map(|f| (f.frame_id.clone(), f.place_id)).collect()
    }

    /// Writes `frames/<id>.pgm`, `detections.txt` and `ground_truth.txt`.
    pub fn write(&self, dir: &Path) -> Result<(), EvalError> {
        let frames = dir.join("frames");
        fs::create_dir_all(&frames)?;
        for f in &self.frames {
            save_pgm(&f.image, frames.join(format!("{}.pgm", f.frame_id)))?;
        }
        self.detections()
            .write(BufWriter::new(fs::File::create(dir.join("detections.txt"))?))?;
        write_ground_truth(&self.ground_truth(), &dir.join("ground_truth.txt"))?;
        Ok(())
    }
}

pub fn write_ground_truth(gt: &BTreeMap<String, u32>, path: &Path) -> Result<(), EvalError> {
    let mut out = BufWriter::new(fs::File::create(path)?);
    for (frame, place) in gt {
        writeln!(out, "{frame} {place}")?;
    }
    out.flush()?;
    Ok(())
}

/// Parses `frame_id place_id` lines.
pub fn read_ground_truth(path: &Path) -> Result<BTreeMap<String, u32>, EvalError> {
    let text = fs::read_to_string(path)?;
    let mut gt = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut it = line.split_whitespace();
        let (Some(frame), Some(place), None) = (it.next(), it.next(), it.next()) else {
            return Err(EvalError::Parse(format!("ground truth line {}: expected `frame_id place_id`", i + 1)));
        };
        let place = place
            .parse()
            .map_err(|_| EvalError::Parse(format!("ground truth line {}: bad place id", i + 1)))?;
        gt.insert(frame.to_owned(), place);
    }
    Ok(gt)
}

/// Smooth random field in [0, 1] from bilinear interpolation of a coarse grid.
fn value_noise(w: usize, h: usize, cell: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let gw = w / cell + 2;
    let gh = h / cell + 2;
    let grid: Vec<f64> = (0..gw * gh).map(|_| rng.random()).collect();
    let mut out = vec![0.0; w * h];
    for y in 0..h {
        let fy = y as f64 / cell as f64;
        let (gy, ty) = (fy as usize, fy.fract());
        for x in 0..w {
            let fx = x as f64 / cell as f64;
            let (gx, tx) = (fx as usize, fx.fract());
            let g = |i: usize, j: usize| grid[j * gw + i];
            let top = g(gx, gy) * (1.0 - tx) + g(gx + 1, gy) * tx;
            let bot = g(gx, gy + 1) * (1.0 - tx) + g(gx + 1, gy + 1) * tx;
            out[y * w + x] = top * (1.0 - ty) + bot * ty;
        }
    }
    out
}

/// Static background of a place: layered value noise with random
/// rectangles and discs, intensities within [30, 225].
pub fn place_texture(width: usize, height: usize, seed: u64) -> GrayImage {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coarse = value_noise(width, height, 32, &mut rng);
    let fine = value_noise(width, height, 8, &mut rng);
    let mut px: Vec<f64> = coarse.iter().zip(&fine).map(|(c, f)| 30.0 + 195.0 * (0.6 * c + 0.4 * f)).collect();
    let shapes = width * height / 250;
    for _ in 0..shapes {
        let v = rng.random_range(30.0..225.0);
        let cx = rng.random_range(0..width) as f64;
        let cy = rng.random_range(0..height) as f64;
        if rng.random_bool(0.5) {
            let hw = rng.random_range(3.0..12.0);
            let hh = rng.random_range(3.0..12.0);
            for y in (cy - hh).max(0.0) as usize..((cy + hh) as usize).min(height) {
                for x in (cx - hw).max(0.0) as usize..((cx + hw) as usize).min(width) {
                    px[y * width + x] = v;
                }
            }
        } else {
            let r = rng.random_range(3.0..10.0);
            for y in (cy - r).max(0.0) as usize..((cy + r) as usize + 1).min(height) {
                for x in (cx - r).max(0.0) as usize..((cx + r) as usize + 1).min(width) {
                    if (x as f64 - cx).powi(2) + (y as f64 - cy).powi(2) <= r * r {
                        px[y * width + x] = v;
                    }
                }
            }
        }
    }
    GrayImage::new(width, height, px.into_iter().map(|v| v.round().clamp(30.0, 225.0) as u8).collect())
        .expect("dimensions are positive")
}

/// Shared pool of object textures, one periodic tile per class.
#[derive(Debug, Clone)]
pub struct ObjectPool {
    tiles: Vec<(usize, Vec<u8>)>,
}

impl ObjectPool {
    pub fn new(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let tiles = OBJECT_CLASSES
            .iter()
            .map(|_| {
                let side = rng.random_range(10..=16usize);
                let cell = 3 + rng.random_range(0..4usize);
                let cells = side.div_ceil(cell);
                let bits: Vec<bool> = (0..cells * cells).map(|_| rng.random_bool(0.5)).collect();
                let tile = (0..side * side)
                    .map(|i| {
                        let (x, y) = (i % side, i / side);
                        if bits[(y / cell) * cells + x / cell] {
                            rng.random_range(140..=170)
                        } else {
                            rng.random_range(85..=115)
                        }
                    })
                    .collect();
                (side, tile)
            })
            .collect();
        Self { tiles }
    }

    /// Texture value at object-local pixel `(u, v)`.
    fn sample(&self, class: usize, u: usize, v: usize) -> u8 {
        let (side, tile) = &self.tiles[class];
        tile[(v % side) * side + u % side]
    }
}

fn union_coverage(objects: &[Placement], w: usize, h: usize) -> f64 {
    let boxes: Vec<BoundingBox> = objects.iter().map(Placement::bounding_box).collect();
    dynamic_coverage(&boxes, w, h)
}

/// Random objects whose union covers `target` of the frame to within 0.01.
pub fn place_objects(target: f64, w: usize, h: usize, min_box: usize, rng: &mut ChaCha8Rng) -> Vec<Placement> {
    let mut objects: Vec<Placement> = Vec::new();
    if target <= 0.0 {
        return objects;
    }
    let tol = 0.01;
    let max_w = (w / 2).max(min_box);
    let max_h = (h * 3 / 5).max(min_box);
    for _ in 0..1000 {
        let current = union_coverage(&objects, w, h);
        if current >= target - tol {
            break;
        }
        let bw = rng.random_range(min_box..=max_w);
        let bh = rng.random_range(min_box..=max_h);
        let obj = Placement {
            x0: rng.random_range(0..=w - bw),
            y0: rng.random_range(0..=h - bh),
            w: bw,
            h: bh,
            class: rng.random_range(0..OBJECT_CLASSES.len()),
        };
        objects.push(obj);
        if union_coverage(&objects, w, h) > target + tol {
            // shrink the new object until the union lands in range
            let (mut lo, mut hi) = (0.0f64, 1.0f64);
            let mut best = None;
            for _ in 0..30 {
                let s = 0.5 * (lo + hi);
                let shrunk = Placement {
                    w: ((bw as f64 * s).round() as usize).max(1),
                    h: ((bh as f64 * s).round() as usize).max(1),
                    ..obj
                };
                *objects.last_mut().unwrap() = shrunk;
                let c = union_coverage(&objects, w, h);
                if (c - target).abs() <= tol {
                    best = Some(shrunk);
                    if shrunk.w >= min_box.min(bw) && shrunk.h >= min_box.min(bh) {
                        break;
                    }
                }
                if c > target {
                    hi = s;
                } else {
                    lo = s;
                }
            }
            match best {
                Some(b) => *objects.last_mut().unwrap() = b,
                None => {
                    objects.pop();
                }
            }
        }
    }
    objects
}

/// Renders objects over `background` and shifts intensities by `offset`.
pub fn render(background: &GrayImage, objects: &[Placement], pool: &ObjectPool, offset: i32) -> GrayImage {
    let mut img = background.clone();
    for o in objects {
        for y in o.y0..o.y0 + o.h {
            for x in o.x0..o.x0 + o.w {
                img.set(x, y, pool.sample(o.class, x - o.x0, y - o.y0));
            }
        }
    }
    GrayImage::from_fn(img.width(), img.height(), |x, y| (img.get(x, y) as i32 + offset).clamp(0, 255) as u8)
}

pub fn generate_sequence(config: &GeneratorConfig) -> Result<SyntheticSequence, EvalError> {
    config.validate()?;
    let pool = ObjectPool::new(derive_seed(config.seed, "object-pool"));
    let (w, h) = (config.width, config.height);
    let mut frames = Vec::with_capacity(config.num_places * config.visits_per_place);
    for place in 0..config.num_places {
        let background = place_texture(w, h, derive_seed(config.seed, &format!("place/{place}")));
        let mut frozen = None;
        for visit in 0..config.visits_per_place {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(config.seed, &format!("visit/{place}/{visit}")));
            let illumination = rng.random_range(-config.illumination..=config.illumination);
            let objects = match (&frozen, config.static_dynamics) {
                (Some(o), true) => Vec::clone(o),
                _ => {
                    let mut orng = if config.static_dynamics {
                        ChaCha8Rng::seed_from_u64(derive_seed(config.seed, &format!("frozen/{place}")))
                    } else {
                        rng.clone()
                    };
                    let target = if config.coverage.1 > config.coverage.0 {
                        orng.random_range(config.coverage.0..config.coverage.1)
                    } else {
                        config.coverage.0
                    };
                    place_objects(target, w, h, config.min_box, &mut orng)
                }
            };
            if config.static_dynamics {
                frozen = Some(objects.clone());
            }
            let image = render(&background, &objects, &pool, illumination);
            let coverage = union_coverage(&objects, w, h);
            frames.push(SyntheticFrame {
                frame_id: format!("p{place:04}_v{visit:02}"),
                place_id: place as u32,
                visit: visit as u32,
                image,
                objects,
                illumination,
                coverage,
            });
        }
    }
    Ok(SyntheticSequence {
        config: config.clone(),
        frames,
    })
}

/// Independent images for vocabulary training: unseen places drawn from the
/// same scene distribution (objects included).
pub fn training_images(config: &GeneratorConfig, count: usize) -> Vec<GrayImage> {
    let seed = derive_seed(config.seed, "training");
    let pool = ObjectPool::new(derive_seed(config.seed, "object-pool"));
    (0..count)
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, &format!("image/{i}")));
            let background = place_texture(config.width, config.height, rng.random());
            let target = if config.coverage.1 > config.coverage.0 {
                rng.random_range(config.coverage.0..config.coverage.1)
            } else {
                config.coverage.0
            };
            let objects = place_objects(target, config.width, config.height, config.min_box, &mut rng);
            let offset = rng.random_range(-config.illumination..=config.illumination);
            render(&background, &objects, &pool, offset)
        })
        .collect()
}

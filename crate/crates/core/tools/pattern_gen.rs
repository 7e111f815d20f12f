// Sampler for the compiled-in descriptor pattern. Shared by
// `examples/gen_pattern.rs` and the pinning test in `features::pattern`.

/// Seed used to draw the built-in pattern.
pub const PATTERN_SEED: u64 = 20_190_611;

/// 256 point pairs drawn i.i.d. from an isotropic Gaussian with
/// sigma = 31 / 5, rounded to integers and rejected outside a radius-15 disc.
pub fn generate_pattern() -> Vec<[i8; 4]> {
    use rand::SeedableRng;
    use rand_distr::{Distribution, Normal};

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(PATTERN_SEED);
    let normal = Normal::new(0.0f64, 31.0 / 5.0).unwrap();
    let point = |rng: &mut rand_chacha::ChaCha8Rng| loop {
        let x = normal.sample(rng).round();
        let y = normal.sample(rng).round();
        if x * x + y * y <= 15.0 * 15.0 {
            return (x as i8, y as i8);
        }
    };
    let mut pairs = Vec::with_capacity(256);
    while pairs.len() < 256 {
        let a = point(&mut rng);
        let b = point(&mut rng);
        if a != b {
            pairs.push([a.0, a.1, b.0, b.1]);
        }
    }
    pairs
}

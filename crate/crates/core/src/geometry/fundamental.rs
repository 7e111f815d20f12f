use nalgebra::{DMatrix, Matrix3, Vector3};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::Correspondence;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RansacParams {
    pub max_iterations: usize,
    /// Symmetric epipolar distance bound in pixels.
    pub inlier_threshold: f64,
    pub min_inliers: usize,
    pub seed: u64,
}

impl Default for RansacParams {
    fn default() -> Self {
        Self {
            max_iterations: 500,
            inlier_threshold: 3.0,
            min_inliers: 12,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FundamentalModel {
    /// Maps query points to epipolar lines in the candidate image:
    /// `x_candidate^T F x_query = 0`. Unit Frobenius norm, rank 2.
    pub f: Matrix3<f64>,
    /// Indexes into the correspondence list, ascending.
    pub inliers: Vec<usize>,
}

/// Similarity transform taking points to zero mean and mean distance sqrt(2).
fn normalization(points: impl Iterator<Item = (f64, f64)> + Clone) -> Option<Matrix3<f64>> {
    let n = points.clone().count() as f64;
    let (sx, sy) = points.clone().fold((0.0, 0.0), |a, p| (a.0 + p.0, a.1 + p.1));
    let (mx, my) = (sx / n, sy / n);
    let mean_dist = points.map(|p| ((p.0 - mx).powi(2) + (p.1 - my).powi(2)).sqrt()).sum::<f64>() / n;
    if mean_dist <= 1e-12 {
        return None;
    }
    let s = std::f64::consts::SQRT_2 / mean_dist;
    Some(Matrix3::new(s, 0.0, -s * mx, 0.0, s, -s * my, 0.0, 0.0, 1.0))
}

fn apply(t: &Matrix3<f64>, p: (f64, f64)) -> (f64, f64) {
    (t[(0, 0)] * p.0 + t[(0, 2)], t[(1, 1)] * p.1 + t[(1, 2)])
}

/// Normalized eight-point estimate from at least 8 correspondences.
/// Returns `None` for degenerate configurations.
pub fn eight_point(matches: &[Correspondence], subset: &[usize]) -> Option<Matrix3<f64>> {
    weighted_eight_point(matches, subset, None)
}

/// Eight-point solve with per-row weights on the design matrix.
fn weighted_eight_point(matches: &[Correspondence], subset: &[usize], weights: Option<&[f64]>) -> Option<Matrix3<f64>> {
    if subset.len() < 8 {
        return None;
    }
    let tq = normalization(subset.iter().map(|&i| matches[i].query))?;
    let tc = normalization(subset.iter().map(|&i| matches[i].candidate))?;
    let rows = subset.len().max(9);
    let mut a = DMatrix::<f64>::zeros(rows, 9);
    for (r, &i) in subset.iter().enumerate() {
        let (x, y) = apply(&tq, matches[i].query);
        let (u, v) = apply(&tc, matches[i].candidate);
        let w = weights.map_or(1.0, |w| w[r]);
        let row = [u * x, u * y, u, v * x, v * y, v, x, y, 1.0];
        for (c, val) in row.into_iter().enumerate() {
            a[(r, c)] = w * val;
        }
    }
    let svd = a.svd(false, true);
    let v_t = svd.v_t?;
    let sv = &svd.singular_values;
    let mut order: Vec<usize> = (0..sv.len()).collect();
    order.sort_by(|&i, &j| sv[i].total_cmp(&sv[j]));
    if !sv[order[sv.len() - 1]].is_finite() {
        return None;
    }
    // a multi-dimensional nullspace (e.g. identical views, where every
    // skew-symmetric matrix fits) still yields a valid model
    let h = v_t.row(order[0]);
    let f_norm = Matrix3::new(h[0], h[1], h[2], h[3], h[4], h[5], h[6], h[7], h[8]);

    let fsvd = f_norm.svd(true, true);
    let (u, v_t3) = (fsvd.u?, fsvd.v_t?);
    let mut s = fsvd.singular_values;
    let min = (0..3).min_by(|&i, &j| s[i].total_cmp(&s[j])).unwrap();
    s[min] = 0.0;
    let f_rank2 = u * Matrix3::from_diagonal(&s) * v_t3;

    let f = tc.transpose() * f_rank2 * tq;
    let norm = f.norm();
    (norm > 0.0 && norm.is_finite()).then(|| f / norm)
}

/// `sqrt(d1^2 + d2^2)` with `d1`, `d2` the point-to-epipolar-line distances
/// in the candidate and query images.
pub fn symmetric_epipolar_distance(f: &Matrix3<f64>, c: &Correspondence) -> f64 {
    let xq = Vector3::new(c.query.0, c.query.1, 1.0);
    let xc = Vector3::new(c.candidate.0, c.candidate.1, 1.0);
    let lc = f * xq;
    let lq = f.transpose() * xc;
    let e = xc.dot(&lc);
    let nc = lc[0].powi(2) + lc[1].powi(2);
    let nq = lq[0].powi(2) + lq[1].powi(2);
    if nc == 0.0 || nq == 0.0 {
        return f64::INFINITY;
    }
    (e * e / nc + e * e / nq).sqrt()
}

fn inliers_of(f: &Matrix3<f64>, matches: &[Correspondence], threshold: f64) -> Vec<usize> {
    (0..matches.len())
        .filter(|&i| symmetric_epipolar_distance(f, &matches[i]) < threshold)
        .collect()
}

/// Gradient norm of the epipolar constraint, which turns algebraic error
/// into (first-order) geometric error when divided out.
fn sampson_scale(f: &Matrix3<f64>, c: &Correspondence) -> f64 {
    let xq = Vector3::new(c.query.0, c.query.1, 1.0);
    let xc = Vector3::new(c.candidate.0, c.candidate.1, 1.0);
    let lc = f * xq;
    let lq = f.transpose() * xc;
    (lc[0].powi(2) + lc[1].powi(2) + lq[0].powi(2) + lq[1].powi(2)).sqrt()
}

/// Sampson-weighted refit of `f` on `support`, a few reweighting passes.
fn refit(f: &Matrix3<f64>, matches: &[Correspondence], support: &[usize]) -> Option<Matrix3<f64>> {
    let mut f = *f;
    for _ in 0..3 {
        let weights: Vec<f64> = support
            .iter()
            .map(|&i| {
                let s = sampson_scale(&f, &matches[i]);
                if s > 0.0 { 1.0 / s } else { 1.0 }
            })
            .collect();
        f = weighted_eight_point(matches, support, Some(&weights))?;
    }
    Some(f)
}

/// Refit on inliers gathered under a loosened threshold that is tightened
/// step by step. Keeps the refit only when it scores more inliers.
fn local_optimize(mut best: FundamentalModel, matches: &[Correspondence], threshold: f64) -> FundamentalModel {
    for _ in 0..4 {
        let mut improved = false;
        for scale in [2.0, 1.5, 1.0] {
            let support = inliers_of(&best.f, matches, scale * threshold);
            let Some(f) = refit(&best.f, matches, &support) else {
                continue;
            };
            let inliers = inliers_of(&f, matches, threshold);
            if inliers.len() > best.inliers.len() {
                best = FundamentalModel { f, inliers };
                improved = true;
            }
        }
        if !improved {
            break;
        }
    }
    best
}

/// Seeded RANSAC over 8-point samples. Every new best model is refit on
/// its inliers (with a loosened-then-tightened threshold) as long as that
/// gains inliers. `None` when fewer than `max(min_inliers, 8)` inliers
/// support the best model.
pub fn estimate_fundamental_ransac(matches: &[Correspondence], params: &RansacParams) -> Option<FundamentalModel> {
    let needed = params.min_inliers.max(8);
    if matches.len() < needed || params.max_iterations == 0 {
        return None;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut best: Option<FundamentalModel> = None;
    for _ in 0..params.max_iterations {
        let sample = rand::seq::index::sample(&mut rng, matches.len(), 8).into_vec();
        let Some(f) = eight_point(matches, &sample) else {
            continue;
        };
        let inliers = inliers_of(&f, matches, params.inlier_threshold);
        if best.as_ref().is_none_or(|b| inliers.len() > b.inliers.len()) {
            best = Some(local_optimize(FundamentalModel { f, inliers }, matches, params.inlier_threshold));
        }
    }
    let best = best?;
    (best.inliers.len() >= needed).then_some(best)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use nalgebra::{Rotation3, Vector3};
    use rand::Rng;

    /// Two pinhole cameras looking at a cloud of points.
    pub(crate) struct CameraPair {
        pub k: Matrix3<f64>,
        pub r: Rotation3<f64>,
        pub t: Vector3<f64>,
    }

    impl CameraPair {
        pub(crate) fn random(rng: &mut impl Rng) -> Self {
            let k = Matrix3::new(400.0, 0.0, 320.0, 0.0, 400.0, 240.0, 0.0, 0.0, 1.0);
            let r = Rotation3::from_euler_angles(
                rng.random_range(-0.1..0.1),
                rng.random_range(-0.1..0.1),
                rng.random_range(-0.1..0.1),
            );
            let t = Vector3::new(rng.random_range(0.5..1.0), rng.random_range(-0.2..0.2), rng.random_range(-0.2..0.2));
            Self { k, r, t }
        }

        /// Ground-truth F from `K^-T [t]x R K^-1`.
        pub(crate) fn fundamental(&self) -> Matrix3<f64> {
            let kinv = self.k.try_inverse().unwrap();
            let tx = self.t.cross_matrix();
            let f = kinv.transpose() * tx * self.r.matrix() * kinv;
            f / f.norm()
        }

        pub(crate) fn project(&self, rng: &mut impl Rng) -> ((f64, f64), (f64, f64)) {
            let p = Vector3::new(rng.random_range(-4.0..4.0), rng.random_range(-3.0..3.0), rng.random_range(4.0..12.0));
            let a = self.k * p;
            let b = self.k * (self.r * p + self.t);
            ((a[0] / a[2], a[1] / a[2]), (b[0] / b[2], b[1] / b[2]))
        }
    }

    pub(crate) fn corr(q: (f64, f64), c: (f64, f64), i: usize) -> Correspondence {
        Correspondence {
            query_index: i as u32,
            candidate_index: i as u32,
            query: q,
            candidate: c,
            distance: 0,
        }
    }

    fn exact_matches(n: usize, seed: u64) -> (CameraPair, Vec<Correspondence>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cams = CameraPair::random(&mut rng);
        let m = (0..n)
            .map(|i| {
                let (q, c) = cams.project(&mut rng);
                corr(q, c, i)
            })
            .collect();
        (cams, m)
    }

    #[test]
    fn exact_data_gives_all_inliers_and_tiny_residual() {
        let (cams, m) = exact_matches(30, 5);
        let model = estimate_fundamental_ransac(&m, &RansacParams::default()).unwrap();
        assert_eq!(model.inliers.len(), 30);
        let max = m.iter().map(|c| symmetric_epipolar_distance(&model.f, c)).fold(0.0, f64::max);
        assert!(max < 1e-6, "max residual {max}");
        // agrees with the analytic F up to sign
        let truth = cams.fundamental();
        let diff = (model.f - truth).norm().min((model.f + truth).norm());
        assert!(diff < 1e-6, "{diff}");
    }

    #[test]
    fn model_is_rank_two() {
        let (_, m) = exact_matches(40, 6);
        let model = estimate_fundamental_ransac(&m, &RansacParams::default()).unwrap();
        let sv = model.f.singular_values();
        let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(min < 1e-12, "{sv}");
        assert!(model.f.determinant().abs() < 1e-12);
    }

    #[test]
    fn below_minimal_sample_gives_no_model() {
        let (_, m) = exact_matches(7, 1);
        let p = RansacParams {
            min_inliers: 0,
            ..RansacParams::default()
        };
        assert!(estimate_fundamental_ransac(&m, &p).is_none());
        assert!(eight_point(&m, &[0, 1, 2, 3, 4, 5, 6]).is_none());
    }

    #[test]
    fn degenerate_sample_is_skipped() {
        // all points identical: normalization fails
        let m: Vec<_> = (0..10).map(|i| corr((5.0, 5.0), (7.0, 7.0), i)).collect();
        assert!(eight_point(&m, &(0..10).collect::<Vec<_>>()).is_none());
        assert!(estimate_fundamental_ransac(&m, &RansacParams { min_inliers: 8, ..Default::default() }).is_none());
    }

    #[test]
    fn seeded_runs_are_identical_and_residuals_bounded() {
        let (_, mut m) = exact_matches(60, 9);
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for c in m.iter_mut().take(20) {
            c.candidate = (rng.random_range(0.0..640.0), rng.random_range(0.0..480.0));
        }
        let p = RansacParams { seed: 77, ..Default::default() };
        let a = estimate_fundamental_ransac(&m, &p).unwrap();
        let b = estimate_fundamental_ransac(&m, &p).unwrap();
        assert_eq!(a, b);
        for &i in &a.inliers {
            assert!(symmetric_epipolar_distance(&a.f, &m[i]) < p.inlier_threshold);
        }
    }

    #[test]
    fn swapping_roles_transposes_the_model() {
        let (_, m) = exact_matches(20, 3);
        let f = estimate_fundamental_ransac(&m, &RansacParams::default()).unwrap().f;
        for (i, c) in m.iter().enumerate() {
            let swapped = corr(c.candidate, c.query, i);
            let a = symmetric_epipolar_distance(&f, c);
            let b = symmetric_epipolar_distance(&f.transpose(), &swapped);
            assert!((a - b).abs() < 1e-9);
        }
    }
}

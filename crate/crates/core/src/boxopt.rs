//! Expected IoU of a reconstructed `S x S` box under center jitter, and the
//! side `S*` that maximizes it.
//!
//! For a jitter magnitude pair `(dx, dy)` the IoU against the `G x G` ground
//! truth is [`jittered_iou`]. This module averages it over a [`JitterModel`]:
//!
//! - deterministic offsets are evaluated once;
//! - empirical sample sets are averaged exactly;
//! - parametric models use fixed-node midpoint quadrature
//!   ([`QUADRATURE_NODES`] nodes per dimension), so repeated calls are
//!   bit-identical.
//!
//! [`monte_carlo_expected_iou`] is an independent sampling estimate used to
//! check the quadrature.
//!
//! The objective is piecewise smooth and not guaranteed unimodal for
//! arbitrary empirical jitter, so [`optimize_size`] scans a grid first and
//! only then refines around the best grid point with golden-section search.
//! No assumption is made that `S* > G`: when a large share of samples has
//! zero offset on an axis the optimum can sit at `G` itself.

use std::f64::consts::FRAC_PI_2;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{iou_from_overlap, jittered_intersection, jittered_iou, FixedSizeSpec, JitterOffset};
use crate::matching::EmpiricalJitter;

/// Midpoint nodes per integration dimension for parametric models.
pub const QUADRATURE_NODES: usize = 512;

/// Gaussian quadrature support is truncated at this many standard deviations.
pub const GAUSSIAN_TAIL_SIGMAS: f64 = 8.0;

/// Draws per independently seeded Monte-Carlo substream.
const MC_CHUNK: usize = 1 << 16;

/// Distribution of the center error between a prediction and its GT.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum JitterModel {
    /// Fixed offset magnitudes.
    Deterministic { dx: f64, dy: f64 },
    /// Radius uniform on `[lo, hi]`, direction uniform on the circle.
    UniformRadial { lo: f64, hi: f64 },
    /// Independent `N(0, sigma^2)` offsets on each axis.
    GaussianIsotropic { sigma: f64 },
    /// Observed signed offsets; only magnitudes enter the IoU.
    Empirical { samples: Vec<JitterOffset> },
}

impl From<EmpiricalJitter> for JitterModel {
    fn from(e: EmpiricalJitter) -> Self {
        JitterModel::Empirical { samples: e.samples }
    }
}

impl JitterModel {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            JitterModel::Deterministic { dx, dy } => dx >= 0.0 && dy >= 0.0 && dx.is_finite() && dy.is_finite(),
            JitterModel::UniformRadial { lo, hi } => lo >= 0.0 && lo <= hi && hi.is_finite(),
            JitterModel::GaussianIsotropic { sigma } => sigma >= 0.0 && sigma.is_finite(),
            JitterModel::Empirical { ref samples } => {
                if samples.is_empty() {
                    return Err(Error::invalid("empirical jitter model has no samples"));
                }
                samples.iter().all(|o| o.dx.is_finite() && o.dy.is_finite())
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::invalid(format!("invalid jitter model parameters: {}", self.describe())))
        }
    }

    /// Short human-readable form; empirical samples are summarized by count.
    pub fn describe(&self) -> String {
        match self {
            JitterModel::Deterministic { dx, dy } => format!("deterministic(dx={dx}, dy={dy})"),
            JitterModel::UniformRadial { lo, hi } => format!("uniform-radial(lo={lo}, hi={hi})"),
            JitterModel::GaussianIsotropic { sigma } => format!("gaussian-isotropic(sigma={sigma})"),
            JitterModel::Empirical { samples } => format!("empirical(n={})", samples.len()),
        }
    }

    fn draw(&self, rng: &mut ChaCha8Rng) -> (f64, f64) {
        match self {
            JitterModel::Deterministic { dx, dy } => (*dx, *dy),
            JitterModel::UniformRadial { lo, hi } => {
                let r = if lo < hi { rng.gen_range(*lo..*hi) } else { *lo };
                let theta = rng.gen_range(0.0..std::f64::consts::TAU);
                ((r * theta.cos()).abs(), (r * theta.sin()).abs())
            }
            JitterModel::GaussianIsotropic { sigma } => {
                if *sigma == 0.0 {
                    return (0.0, 0.0);
                }
                let normal = Normal::new(0.0, *sigma).expect("validated sigma");
                (normal.sample(rng).abs(), normal.sample(rng).abs())
            }
            JitterModel::Empirical { samples } => samples[rng.gen_range(0..samples.len())].magnitudes(),
        }
    }
}

/// Pre-tabulated integration nodes for one `(G, model)` pair.
enum Nodes {
    /// Weighted `(|dx|, |dy|)` points.
    Points(Vec<(f64, f64, f64)>),
    /// Independent axes sharing one weighted 1-D rule.
    Product(Vec<(f64, f64)>),
}

/// The function `S -> E[IoU]` for a fixed ground-truth side and jitter model.
pub struct ExpectedIou {
    gt_side: f64,
    nodes: Nodes,
}

impl ExpectedIou {
    pub fn new(gt_side: f64, model: &JitterModel) -> Result<Self> {
        FixedSizeSpec::new(gt_side, gt_side)?;
        model.validate()?;
        let nodes = match model {
            JitterModel::Deterministic { dx, dy } => Nodes::Points(vec![(*dx, *dy, 1.0)]),
            JitterModel::Empirical { samples } => {
                let w = 1.0 / samples.len() as f64;
                Nodes::Points(
                    samples
                        .iter()
                        .map(|o| {
                            let (x, y) = o.magnitudes();
                            (x, y, w)
                        })
                        .collect(),
                )
            }
            JitterModel::GaussianIsotropic { sigma } if *sigma == 0.0 => Nodes::Points(vec![(0.0, 0.0, 1.0)]),
            JitterModel::GaussianIsotropic { sigma } => {
                // half-normal density on [0, 8 sigma], midpoint rule, normalized weights
                let h = GAUSSIAN_TAIL_SIGMAS * sigma / QUADRATURE_NODES as f64;
                let mut rule: Vec<(f64, f64)> = (0..QUADRATURE_NODES)
                    .map(|i| {
                        let d = (i as f64 + 0.5) * h;
                        (d, (-0.5 * (d / sigma).powi(2)).exp())
                    })
                    .collect();
                let total: f64 = rule.iter().map(|r| r.1).sum();
                rule.iter_mut().for_each(|r| r.1 /= total);
                Nodes::Product(rule)
            }
            JitterModel::UniformRadial { lo, hi } => {
                let radii: Vec<f64> = if lo == hi {
                    vec![*lo]
                } else {
                    let h = (hi - lo) / QUADRATURE_NODES as f64;
                    (0..QUADRATURE_NODES).map(|i| lo + (i as f64 + 0.5) * h).collect()
                };
                // direction folded into the first quadrant by symmetry
                let dtheta = FRAC_PI_2 / QUADRATURE_NODES as f64;
                let w = 1.0 / (radii.len() * QUADRATURE_NODES) as f64;
                let mut pts = Vec::with_capacity(radii.len() * QUADRATURE_NODES);
                for &r in &radii {
                    for j in 0..QUADRATURE_NODES {
                        let theta = (j as f64 + 0.5) * dtheta;
                        pts.push((r * theta.cos(), r * theta.sin(), w));
                    }
                }
                Nodes::Points(pts)
            }
        };
        Ok(Self { gt_side, nodes })
    }

    pub fn gt_side(&self) -> f64 {
        self.gt_side
    }

    pub fn eval(&self, pred_side: f64) -> Result<f64> {
        let spec = FixedSizeSpec::new(self.gt_side, pred_side)?;
        Ok(match &self.nodes {
            Nodes::Points(pts) => pts.iter().map(|&(x, y, w)| w * jittered_iou(&spec, x, y)).sum(),
            Nodes::Product(rule) => {
                let overlaps: Vec<(f64, f64)> =
                    rule.iter().map(|&(d, w)| (jittered_intersection(&spec, d, d).0, w)).collect();
                overlaps
                    .iter()
                    .map(|&(wx, px)| {
                        px * overlaps.iter().map(|&(wy, py)| py * iou_from_overlap(&spec, wx * wy)).sum::<f64>()
                    })
                    .sum()
            }
        })
    }
}

/// `E[IoU]` of an `S x S` prediction against a `G x G` ground truth.
pub fn expected_iou(gt_side: f64, pred_side: f64, model: &JitterModel) -> Result<f64> {
    ExpectedIou::new(gt_side, model)?.eval(pred_side)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EmpiricalSampling {
    /// Draw sample indices uniformly with replacement.
    #[default]
    Resample,
    /// Draw `k` takes sample `k mod n`.
    Sweep,
}

/// Seeded sample mean of the jittered IoU over `n_samples` draws.
pub fn monte_carlo_expected_iou(
    gt_side: f64,
    pred_side: f64,
    model: &JitterModel,
    n_samples: usize,
    seed: u64,
) -> Result<f64> {
    monte_carlo_expected_iou_with(gt_side, pred_side, model, n_samples, seed, EmpiricalSampling::Resample)
}

/// As [`monte_carlo_expected_iou`], choosing how empirical models are sampled.
///
/// Draws are split into fixed substreams of `2^16` draws, each seeded from
/// `(seed, substream index)`, and partial sums are reduced in substream
/// order. The result does not depend on the number of worker threads.
pub fn monte_carlo_expected_iou_with(
    gt_side: f64,
    pred_side: f64,
    model: &JitterModel,
    n_samples: usize,
    seed: u64,
    sampling: EmpiricalSampling,
) -> Result<f64> {
    if n_samples == 0 {
        return Err(Error::invalid("n_samples must be at least 1"));
    }
    model.validate()?;
    let spec = FixedSizeSpec::new(gt_side, pred_side)?;
    if let JitterModel::Deterministic { dx, dy } = *model {
        return Ok(jittered_iou(&spec, dx, dy));
    }
    let sweep = match (model, sampling) {
        (JitterModel::Empirical { samples }, EmpiricalSampling::Sweep) => Some(samples),
        _ => None,
    };
    let chunks = n_samples.div_ceil(MC_CHUNK);
    let partial: Vec<f64> = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let start = chunk * MC_CHUNK;
            let end = (start + MC_CHUNK).min(n_samples);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(chunk as u64);
            (start..end)
                .map(|k| {
                    let (x, y) = match sweep {
                        Some(samples) => samples[k % samples.len()].magnitudes(),
                        None => model.draw(&mut rng),
                    };
                    jittered_iou(&spec, x, y)
                })
                .sum::<f64>()
        })
        .collect();
    Ok(partial.iter().sum::<f64>() / n_samples as f64)
}

/// Search settings for [`optimize_size`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizeConfig {
    pub s_min: f64,
    pub s_max: f64,
    pub grid_step: f64,
    pub refine_tol: f64,
}

impl OptimizeConfig {
    /// Range `(G - 5, G + 15)`, step 0.25, tolerance 0.01.
    pub fn for_gt_side(gt_side: f64) -> Self {
        Self { s_min: gt_side - 5.0, s_max: gt_side + 15.0, grid_step: 0.25, refine_tol: 0.01 }
    }

    fn validate(&self) -> Result<()> {
        let finite = [self.s_min, self.s_max, self.grid_step, self.refine_tol].iter().all(|v| v.is_finite());
        if !finite || self.s_min <= 0.0 || self.s_min >= self.s_max {
            return Err(Error::invalid(format!(
                "search range ({}, {}) must satisfy 0 < s_min < s_max",
                self.s_min, self.s_max
            )));
        }
        if self.grid_step <= 0.0 || self.refine_tol <= 0.0 {
            return Err(Error::invalid("grid_step and refine_tol must be positive"));
        }
        Ok(())
    }

    fn grid(&self) -> Vec<f64> {
        let n = ((self.s_max - self.s_min) / self.grid_step + 1e-9).floor() as usize;
        let mut pts: Vec<f64> = (0..=n).map(|i| self.s_min + i as f64 * self.grid_step).collect();
        if self.s_max - pts[n] > 1e-9 * self.grid_step {
            pts.push(self.s_max);
        }
        pts
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub size: f64,
    pub expected_iou: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SizeOptimizationResult {
    pub gt_side: f64,
    pub s_star: f64,
    pub expected_iou_at_star: f64,
    pub search_range: (f64, f64),
    /// Coarse grid samples, ascending in size.
    pub curve: Vec<CurvePoint>,
}

impl SizeOptimizationResult {
    /// Two-column `size expected_iou` text, one grid point per line.
    pub fn curve_text(&self) -> String {
        self.curve.iter().map(|p| format!("{} {}\n", p.size, p.expected_iou)).collect()
    }
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Maximizes `f` on `[lo, hi]` by golden-section search until the bracket is
/// narrower than `tol`. Returns the best evaluated point.
fn golden_section_max(f: impl Fn(f64) -> Result<f64>, mut lo: f64, mut hi: f64, tol: f64) -> Result<(f64, f64)> {
    let mut a = hi - INV_PHI * (hi - lo);
    let mut b = lo + INV_PHI * (hi - lo);
    let mut fa = f(a)?;
    let mut fb = f(b)?;
    let mut best = if fb > fa { (b, fb) } else { (a, fa) };
    while hi - lo > tol {
        if fa >= fb {
            hi = b;
            b = a;
            fb = fa;
            a = hi - INV_PHI * (hi - lo);
            fa = f(a)?;
            if fa > best.1 {
                best = (a, fa);
            }
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + INV_PHI * (hi - lo);
            fb = f(b)?;
            if fb > best.1 {
                best = (b, fb);
            }
        }
    }
    let mid = 0.5 * (lo + hi);
    let fm = f(mid)?;
    Ok(if fm > best.1 { (mid, fm) } else { best })
}

/// `S* = argmax_S E[IoU]` over `[s_min, s_max]`.
pub fn optimize_size(gt_side: f64, model: &JitterModel, cfg: &OptimizeConfig) -> Result<SizeOptimizationResult> {
    cfg.validate()?;
    let objective = ExpectedIou::new(gt_side, model)?;
    let grid = cfg.grid();
    let values = grid.par_iter().map(|&s| objective.eval(s)).collect::<Result<Vec<f64>>>()?;
    let curve: Vec<CurvePoint> =
        grid.iter().zip(&values).map(|(&size, &expected_iou)| CurvePoint { size, expected_iou }).collect();

    // first maximum wins ties
    let best = (1..values.len()).fold(0, |b, i| if values[i] > values[b] { i } else { b });
    let lo = grid[best.saturating_sub(1)];
    let hi = grid[(best + 1).min(grid.len() - 1)];
    let (mut s_star, mut value) = (grid[best], values[best]);
    if hi - lo > cfg.refine_tol {
        let (s, v) = golden_section_max(|s| objective.eval(s), lo, hi, cfg.refine_tol)?;
        if v > value {
            (s_star, value) = (s, v);
        }
    }
    Ok(SizeOptimizationResult {
        gt_side,
        s_star,
        expected_iou_at_star: value,
        search_range: (cfg.s_min, cfg.s_max),
        curve,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn det(d: f64) -> JitterModel {
        JitterModel::Deterministic { dx: d, dy: d }
    }

    fn cfg(s_min: f64, s_max: f64, step: f64, tol: f64) -> OptimizeConfig {
        OptimizeConfig { s_min, s_max, grid_step: step, refine_tol: tol }
    }

    /// Independent brute-force argmax on a fine grid.
    fn fine_argmax(g: f64, model: &JitterModel, lo: f64, hi: f64, step: f64) -> f64 {
        let n = ((hi - lo) / step).round() as usize;
        let obj = ExpectedIou::new(g, model).unwrap();
        (0..=n)
            .map(|i| lo + i as f64 * step)
            .map(|s| (s, obj.eval(s).unwrap()))
            .fold((lo, f64::NEG_INFINITY), |b, p| if p.1 > b.1 { p } else { b })
            .0
    }

    #[test]
    fn expected_iou_examples() {
        assert_eq!(expected_iou(100.0, 100.0, &det(0.0)).unwrap(), 1.0);
        let v = expected_iou(100.0, 101.5, &det(0.0)).unwrap();
        assert!((v - 0.970662).abs() < 1e-6);
        let emp = JitterModel::Empirical { samples: vec![JitterOffset::new(1.0, 1.0), JitterOffset::new(-1.0, -1.0)] };
        let v = expected_iou(100.0, 100.0, &emp).unwrap();
        assert!((v - 9801.0 / 10199.0).abs() < 1e-15);
    }

    #[test]
    fn invalid_models_rejected() {
        let empty = JitterModel::Empirical { samples: vec![] };
        assert!(expected_iou(100.0, 100.0, &empty).is_err());
        assert!(optimize_size(100.0, &empty, &OptimizeConfig::for_gt_side(100.0)).is_err());
        assert!(expected_iou(100.0, 100.0, &JitterModel::GaussianIsotropic { sigma: -1.0 }).is_err());
        assert!(expected_iou(100.0, 100.0, &JitterModel::UniformRadial { lo: 2.0, hi: 1.0 }).is_err());
        assert!(expected_iou(100.0, 100.0, &JitterModel::Deterministic { dx: -1.0, dy: 0.0 }).is_err());
        assert!(expected_iou(100.0, 0.0, &det(0.0)).is_err());
    }

    #[test]
    fn degenerate_ranges_rejected() {
        let m = det(1.0);
        assert!(optimize_size(100.0, &m, &cfg(0.0, 110.0, 0.25, 0.01)).is_err());
        assert!(optimize_size(100.0, &m, &cfg(110.0, 110.0, 0.25, 0.01)).is_err());
        assert!(optimize_size(100.0, &m, &cfg(95.0, 110.0, 0.0, 0.01)).is_err());
        assert!(optimize_size(100.0, &m, &cfg(95.0, 110.0, 0.25, 0.0)).is_err());
    }

    #[test]
    fn deterministic_optimum_examples() {
        let r = optimize_size(100.0, &det(0.75), &cfg(95.0, 110.0, 0.25, 0.01)).unwrap();
        assert!((r.s_star - 101.5).abs() <= 0.01, "{}", r.s_star);
        let oracle = fine_argmax(100.0, &det(0.75), 95.0, 110.0, 0.001);
        assert!((oracle - 101.5).abs() <= 0.001, "{oracle}");

        let r = optimize_size(100.0, &det(1.0), &cfg(95.0, 110.0, 0.25, 0.01)).unwrap();
        assert!((r.s_star - 102.0).abs() <= 0.01);

        let r = optimize_size(100.0, &det(0.0), &cfg(95.0, 110.0, 0.25, 0.01)).unwrap();
        assert_eq!(r.s_star, 100.0);
        assert_eq!(r.expected_iou_at_star, 1.0);
    }

    #[test]
    fn zero_jitter_on_one_axis_can_pin_optimum_at_gt_side() {
        // half the mass has no offset at all; expanding only pays the union cost
        let m = JitterModel::Empirical {
            samples: vec![JitterOffset::new(0.0, 0.0), JitterOffset::new(0.0, 0.0), JitterOffset::new(0.2, 0.0)],
        };
        let r = optimize_size(100.0, &m, &OptimizeConfig::for_gt_side(100.0)).unwrap();
        assert!((r.s_star - 100.0).abs() <= 0.01, "{}", r.s_star);
    }

    #[test]
    fn curve_covers_range_and_star_dominates() {
        let m = JitterModel::GaussianIsotropic { sigma: 1.0 };
        let r = optimize_size(100.0, &m, &OptimizeConfig::for_gt_side(100.0)).unwrap();
        assert_eq!(r.curve.len(), 81);
        assert_eq!(r.curve.first().unwrap().size, 95.0);
        assert_eq!(r.curve.last().unwrap().size, 115.0);
        assert!(r.curve.iter().all(|p| p.expected_iou <= r.expected_iou_at_star));
        let oracle = fine_argmax(100.0, &m, r.s_star - 1.0, r.s_star + 1.0, 0.002);
        assert!((oracle - r.s_star).abs() <= 0.01 + 0.002, "{oracle} vs {}", r.s_star);
        assert_eq!(r.curve_text().lines().count(), 81);
    }

    #[test]
    fn grid_includes_range_end() {
        let g = cfg(1.0, 2.1, 0.25, 0.01).grid();
        assert_eq!(g, vec![1.0, 1.25, 1.5, 1.75, 2.0, 2.1]);
    }

    #[test]
    fn quadrature_is_repeatable() {
        let m = JitterModel::UniformRadial { lo: 1.0, hi: 1.5 };
        let a = expected_iou(100.0, 101.5, &m).unwrap();
        let b = expected_iou(100.0, 101.5, &m).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn monte_carlo_trivial_cases() {
        let m = det(0.6);
        assert_eq!(monte_carlo_expected_iou(100.0, 101.0, &m, 17, 3).unwrap(), expected_iou(100.0, 101.0, &m).unwrap());
        let emp = JitterModel::Empirical {
            samples: (0..50).map(|i| JitterOffset::new(i as f64 * 0.1 - 2.0, 1.0 - i as f64 * 0.03)).collect(),
        };
        let swept = monte_carlo_expected_iou_with(100.0, 101.0, &emp, 50, 9, EmpiricalSampling::Sweep).unwrap();
        assert!((swept - expected_iou(100.0, 101.0, &emp).unwrap()).abs() < 1e-14);
        assert!(monte_carlo_expected_iou(100.0, 101.0, &m, 0, 3).is_err());
    }

    #[test]
    fn monte_carlo_is_seeded() {
        let m = JitterModel::GaussianIsotropic { sigma: 1.0 };
        let a = monte_carlo_expected_iou(100.0, 101.0, &m, 200_000, 11).unwrap();
        let b = monte_carlo_expected_iou(100.0, 101.0, &m, 200_000, 11).unwrap();
        let c = monte_carlo_expected_iou(100.0, 101.0, &m, 200_000, 12).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
        assert_ne!(a.to_bits(), c.to_bits());
    }

    #[test]
    fn monte_carlo_agrees_with_quadrature() {
        for m in [JitterModel::GaussianIsotropic { sigma: 1.0 }, JitterModel::UniformRadial { lo: 1.0, hi: 1.5 }] {
            let q = expected_iou(100.0, 101.5, &m).unwrap();
            let mc = monte_carlo_expected_iou(100.0, 101.5, &m, 300_000, 5).unwrap();
            assert!((q - mc).abs() < 1e-3, "{m:?}: {q} vs {mc}");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn equal_axis_deterministic_optimum(delta in 0.01f64..=10.0) {
            let r = optimize_size(100.0, &det(delta), &cfg(95.0, 125.0, 0.25, 0.01)).unwrap();
            prop_assert!((r.s_star - (100.0 + 2.0 * delta)).abs() <= 0.01, "delta {} -> {}", delta, r.s_star);
        }

        #[test]
        fn scale_equivariance(k in 0.25f64..4.0, sigma in 0.3f64..2.0) {
            let base = optimize_size(100.0, &JitterModel::GaussianIsotropic { sigma }, &cfg(95.0, 115.0, 0.25, 0.01)).unwrap();
            let scaled = optimize_size(
                100.0 * k,
                &JitterModel::GaussianIsotropic { sigma: sigma * k },
                &cfg(95.0 * k, 115.0 * k, 0.25 * k, 0.01 * k),
            )
            .unwrap();
            prop_assert!((scaled.s_star - k * base.s_star).abs() <= 0.02 * k);
            prop_assert!((scaled.expected_iou_at_star - base.expected_iou_at_star).abs() < 1e-9);
            for (a, b) in base.curve.iter().zip(&scaled.curve) {
                prop_assert!((a.expected_iou - b.expected_iou).abs() < 1e-9);
            }
        }
    }
}

//! Center-distance matching of detections to ground truth, and the
//! empirical jitter distribution built from matched pairs.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::annotation::{Detection, GroundTruth, ImageId};
use crate::assignment::min_cost_assignment;
use crate::error::{Error, Result};
use crate::geometry::{CenterPoint, JitterOffset, DEFAULT_GT_SIDE};
use crate::postprocess::center_of;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MatchStrategy {
    /// Detections in descending score order each take the nearest free GT.
    #[default]
    Greedy,
    /// Maximum number of pairs, then minimum total center distance.
    Optimal,
}

impl std::str::FromStr for MatchStrategy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "greedy" => Ok(Self::Greedy),
            "optimal" => Ok(Self::Optimal),
            other => Err(Error::invalid(format!("strategy: expected greedy or optimal, got {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatchConfig {
    pub max_center_distance: f64,
    pub strategy: MatchStrategy,
}

impl MatchConfig {
    /// Radius `G / 2`, greedy strategy.
    pub fn for_gt_side(gt_side: f64) -> Self {
        Self { max_center_distance: gt_side / 2.0, strategy: MatchStrategy::Greedy }
    }

    fn validate(&self) -> Result<()> {
        if !(self.max_center_distance.is_finite() && self.max_center_distance > 0.0) {
            return Err(Error::invalid(format!(
                "max_center_distance must be positive, got {}",
                self.max_center_distance
            )));
        }
        Ok(())
    }
}

impl Default for MatchConfig {
    fn default() -> Self {
        Self::for_gt_side(DEFAULT_GT_SIDE)
    }
}

/// A matched (GT, detection) pair. `offset` is detection center minus GT center.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatchPair {
    pub image_id: ImageId,
    pub gt_index: usize,
    pub det_index: usize,
    pub offset: JitterOffset,
    pub score: f64,
}

impl MatchPair {
    pub fn distance(&self) -> f64 {
        self.offset.dx.hypot(self.offset.dy)
    }
}

/// One-to-one matching within a single image. Indices in the returned pairs
/// refer to positions in `gts` and `dets`; pairs are ordered by `det_index`.
pub fn match_image(gts: &[GroundTruth], dets: &[Detection], cfg: &MatchConfig) -> Result<Vec<MatchPair>> {
    cfg.validate()?;
    let image_id = match (gts.first(), dets.first()) {
        (Some(g), _) => g.image_id,
        (None, Some(d)) => d.image_id,
        (None, None) => return Ok(Vec::new()),
    };
    if let Some(g) = gts.iter().find(|g| g.image_id != image_id) {
        return Err(Error::invalid(format!(
            "match_image: mixed image ids {image_id} and {} in ground truth",
            g.image_id
        )));
    }
    if let Some(d) = dets.iter().find(|d| d.image_id != image_id) {
        return Err(Error::invalid(format!(
            "match_image: mixed image ids {image_id} and {} in detections",
            d.image_id
        )));
    }
    let det_centers = dets.iter().map(center_of).collect::<Result<Vec<_>>>()?;
    let gt_centers: Vec<CenterPoint> = gts.iter().map(|g| g.center).collect();

    let links = match cfg.strategy {
        MatchStrategy::Greedy => greedy_links(&gt_centers, &det_centers, dets, cfg.max_center_distance),
        MatchStrategy::Optimal => optimal_links(&gt_centers, &det_centers, cfg.max_center_distance),
    };
    let mut pairs: Vec<MatchPair> = links
        .into_iter()
        .map(|(gi, di)| MatchPair {
            image_id,
            gt_index: gi,
            det_index: di,
            offset: gt_centers[gi].offset_to(&det_centers[di]),
            score: dets[di].score,
        })
        .collect();
    pairs.sort_by_key(|p| p.det_index);
    Ok(pairs)
}

fn greedy_links(gts: &[CenterPoint], dets: &[CenterPoint], raw: &[Detection], radius: f64) -> Vec<(usize, usize)> {
    let mut order: Vec<usize> = (0..dets.len()).collect();
    // stable: equal scores keep input order
    order.sort_by(|&a, &b| raw[b].score.total_cmp(&raw[a].score));
    let mut taken = vec![false; gts.len()];
    let mut links = Vec::new();
    for di in order {
        let mut best: Option<(usize, f64)> = None;
        for (gi, g) in gts.iter().enumerate() {
            if taken[gi] {
                continue;
            }
            let d = g.distance(&dets[di]);
            if d <= radius && best.is_none_or(|(_, bd)| d < bd) {
                best = Some((gi, d));
            }
        }
        if let Some((gi, _)) = best {
            taken[gi] = true;
            links.push((gi, di));
        }
    }
    links
}

fn optimal_links(gts: &[CenterPoint], dets: &[CenterPoint], radius: f64) -> Vec<(usize, usize)> {
    let transpose = gts.len() > dets.len();
    let (rows, cols) = if transpose { (dets.len(), gts.len()) } else { (gts.len(), dets.len()) };
    // Any forbidden link costs more than a full matching of allowed links, so
    // the optimum first maximizes the number of allowed links.
    let forbidden = radius * (rows as f64 + 1.0) * 2.0;
    let mut costs = vec![0.0; rows * cols];
    for r in 0..rows {
        for c in 0..cols {
            let (gi, di) = if transpose { (c, r) } else { (r, c) };
            let d = gts[gi].distance(&dets[di]);
            costs[r * cols + c] = if d <= radius { d } else { forbidden };
        }
    }
    min_cost_assignment(&costs, rows, cols)
        .into_iter()
        .enumerate()
        .filter(|&(r, c)| costs[r * cols + c] < forbidden)
        .map(|(r, c)| if transpose { (c, r) } else { (r, c) })
        .collect()
}

/// Matches every image independently. Pair indices refer to positions in the
/// full `gts` / `dets` slices; output is ordered by image id, then detection.
pub fn match_dataset(gts: &[GroundTruth], dets: &[Detection], cfg: &MatchConfig) -> Result<Vec<MatchPair>> {
    let mut by_image: BTreeMap<ImageId, (Vec<usize>, Vec<usize>)> = BTreeMap::new();
    for (i, g) in gts.iter().enumerate() {
        by_image.entry(g.image_id).or_default().0.push(i);
    }
    for (i, d) in dets.iter().enumerate() {
        by_image.entry(d.image_id).or_default().1.push(i);
    }
    let per_image: Vec<Vec<MatchPair>> = by_image
        .into_par_iter()
        .map(|(_, (gi, di))| {
            let local_gts: Vec<GroundTruth> = gi.iter().map(|&i| gts[i].clone()).collect();
            let local_dets: Vec<Detection> = di.iter().map(|&i| dets[i].clone()).collect();
            let pairs = match_image(&local_gts, &local_dets, cfg)?;
            Ok(pairs
                .into_iter()
                .map(|p| MatchPair { gt_index: gi[p.gt_index], det_index: di[p.det_index], ..p })
                .collect())
        })
        .collect::<Result<_>>()?;
    Ok(per_image.into_iter().flatten().collect())
}

/// Sample set of signed center offsets.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct EmpiricalJitter {
    pub samples: Vec<JitterOffset>,
}

/// Reporting statistics over an [`EmpiricalJitter`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JitterSummary {
    pub count: usize,
    pub mean_abs_dx: f64,
    pub mean_abs_dy: f64,
    pub mean_dx: f64,
    pub mean_dy: f64,
    pub std_dx: f64,
    pub std_dy: f64,
    pub mean_radial: f64,
    pub rms_radial: f64,
    /// `(q, |dx| quantile, |dy| quantile, radial quantile)` rows.
    pub quantiles: Vec<[f64; 4]>,
}

const REPORTED_QUANTILES: [f64; 5] = [0.25, 0.5, 0.75, 0.9, 0.95];

impl EmpiricalJitter {
    pub fn new(samples: Vec<JitterOffset>) -> Self {
        Self { samples }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// `None` for an empty sample set.
    pub fn summary(&self) -> Option<JitterSummary> {
        let n = self.samples.len();
        if n == 0 {
            return None;
        }
        let nf = n as f64;
        let mean = |f: &dyn Fn(&JitterOffset) -> f64| self.samples.iter().map(f).sum::<f64>() / nf;
        let mean_dx = mean(&|o| o.dx);
        let mean_dy = mean(&|o| o.dy);
        let std = |f: &dyn Fn(&JitterOffset) -> f64, m: f64| {
            if n < 2 {
                0.0
            } else {
                (self.samples.iter().map(|o| (f(o) - m).powi(2)).sum::<f64>() / (nf - 1.0)).sqrt()
            }
        };
        let mut abs_x: Vec<f64> = self.samples.iter().map(|o| o.dx.abs()).collect();
        let mut abs_y: Vec<f64> = self.samples.iter().map(|o| o.dy.abs()).collect();
        let mut radial: Vec<f64> = self.samples.iter().map(|o| o.dx.hypot(o.dy)).collect();
        abs_x.sort_by(f64::total_cmp);
        abs_y.sort_by(f64::total_cmp);
        radial.sort_by(f64::total_cmp);
        Some(JitterSummary {
            count: n,
            mean_abs_dx: abs_x.iter().sum::<f64>() / nf,
            mean_abs_dy: abs_y.iter().sum::<f64>() / nf,
            mean_dx,
            mean_dy,
            std_dx: std(&|o| o.dx, mean_dx),
            std_dy: std(&|o| o.dy, mean_dy),
            mean_radial: radial.iter().sum::<f64>() / nf,
            rms_radial: (radial.iter().map(|r| r * r).sum::<f64>() / nf).sqrt(),
            quantiles: REPORTED_QUANTILES
                .iter()
                .map(|&q| [q, quantile(&abs_x, q), quantile(&abs_y, q), quantile(&radial, q)])
                .collect(),
        })
    }
}

/// Linear-interpolation quantile of sorted data.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

pub fn collect_jitter(pairs: &[MatchPair]) -> EmpiricalJitter {
    EmpiricalJitter::new(pairs.iter().map(|p| p.offset).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::BBox;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_distr::{Distribution, Normal};

    fn gt(image: ImageId, x: f64, y: f64) -> GroundTruth {
        GroundTruth::fixed(0, image, 1, CenterPoint::new(x, y).unwrap(), 100.0).unwrap()
    }

    fn det(image: ImageId, x: f64, y: f64, score: f64) -> Detection {
        Detection::with_center(image, 1, CenterPoint::new(x, y).unwrap(), score)
    }

    fn cfg(radius: f64, strategy: MatchStrategy) -> MatchConfig {
        MatchConfig { max_center_distance: radius, strategy }
    }

    #[test]
    fn single_candidate() {
        let pairs = match_image(&[gt(1, 50.0, 50.0)], &[det(1, 51.0, 50.0, 0.5)], &MatchConfig::default()).unwrap();
        assert_eq!(pairs.len(), 1);
        assert_eq!(pairs[0].offset, JitterOffset::new(1.0, 0.0));
    }

    #[test]
    fn no_detections() {
        assert!(match_image(&[gt(1, 50.0, 50.0)], &[], &MatchConfig::default()).unwrap().is_empty());
    }

    #[test]
    fn greedy_follows_score_order() {
        let gts = [gt(1, 0.0, 0.0), gt(1, 10.0, 0.0)];
        let dets = [det(1, 9.0, 0.0, 0.9), det(1, 1.0, 0.0, 0.8)];
        let pairs = match_image(&gts, &dets, &cfg(50.0, MatchStrategy::Greedy)).unwrap();
        assert_eq!(pairs.len(), 2);
        assert_eq!((pairs[0].det_index, pairs[0].gt_index), (0, 1));
        assert_eq!(pairs[0].offset, JitterOffset::new(-1.0, 0.0));
        assert_eq!((pairs[1].det_index, pairs[1].gt_index), (1, 0));
        assert_eq!(pairs[1].offset, JitterOffset::new(1.0, 0.0));
    }

    #[test]
    fn greedy_ties_break_by_input_index() {
        // equal scores: det 0 goes first; equidistant GTs: GT 0 wins
        let gts = [gt(1, 0.0, 0.0), gt(1, 10.0, 0.0)];
        let dets = [det(1, 5.0, 0.0, 0.5), det(1, 5.0, 1.0, 0.5)];
        let pairs = match_image(&gts, &dets, &cfg(50.0, MatchStrategy::Greedy)).unwrap();
        assert_eq!((pairs[0].det_index, pairs[0].gt_index), (0, 0));
        assert_eq!((pairs[1].det_index, pairs[1].gt_index), (1, 1));
    }

    #[test]
    fn optimal_prefers_more_pairs() {
        // greedy matches det 0 to GT 1 and strands det 1; optimal pairs both
        let gts = [gt(1, 0.0, 0.0), gt(1, 60.0, 0.0)];
        let dets = [det(1, 40.0, 0.0, 0.9), det(1, 90.0, 0.0, 0.8)];
        let greedy = match_image(&gts, &dets, &cfg(50.0, MatchStrategy::Greedy)).unwrap();
        let optimal = match_image(&gts, &dets, &cfg(50.0, MatchStrategy::Optimal)).unwrap();
        assert_eq!(greedy.len(), 1);
        assert_eq!(optimal.len(), 2);
    }

    #[test]
    fn mixed_images_rejected() {
        let r = match_image(&[gt(1, 0.0, 0.0)], &[det(2, 0.0, 0.0, 0.5)], &MatchConfig::default());
        assert!(matches!(r, Err(Error::InvalidInput(_))));
        let r = match_image(&[gt(1, 0.0, 0.0), gt(3, 0.0, 0.0)], &[], &MatchConfig::default());
        assert!(r.is_err());
    }

    #[test]
    fn radius_must_be_positive() {
        assert!(match_image(&[], &[], &cfg(0.0, MatchStrategy::Greedy)).is_err());
    }

    #[test]
    fn dataset_indices_are_global() {
        let gts = [gt(2, 0.0, 0.0), gt(1, 100.0, 100.0)];
        let dets = [det(1, 101.0, 100.0, 0.9), det(2, 0.0, 2.0, 0.7)];
        let pairs = match_dataset(&gts, &dets, &MatchConfig::default()).unwrap();
        assert_eq!(pairs.len(), 2);
        assert_eq!((pairs[0].image_id, pairs[0].gt_index, pairs[0].det_index), (1, 1, 0));
        assert_eq!((pairs[1].image_id, pairs[1].gt_index, pairs[1].det_index), (2, 0, 1));
    }

    #[test]
    fn boxed_detections_use_midpoint() {
        let d = Detection::with_box(1, 1, BBox::new(1.0, 0.0, 100.0, 100.0).unwrap(), 0.4);
        let pairs = match_image(&[gt(1, 50.0, 50.0)], &[d], &MatchConfig::default()).unwrap();
        assert_eq!(pairs[0].offset, JitterOffset::new(1.0, 0.0));
    }

    #[test]
    fn jitter_aggregation() {
        let pairs = [
            MatchPair { image_id: 1, gt_index: 0, det_index: 0, offset: JitterOffset::new(1.0, 0.0), score: 1.0 },
            MatchPair { image_id: 1, gt_index: 1, det_index: 1, offset: JitterOffset::new(-1.0, 0.0), score: 1.0 },
        ];
        let s = collect_jitter(&pairs).summary().unwrap();
        assert_eq!((s.mean_abs_dx, s.mean_abs_dy), (1.0, 0.0));
        assert_eq!(s.mean_dx, 0.0);
        assert!(collect_jitter(&[]).is_empty());
        assert!(collect_jitter(&[]).summary().is_none());
    }

    #[test]
    fn gaussian_std_recovered() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let normal = Normal::new(0.0, 1.0).unwrap();
        let pairs: Vec<MatchPair> = (0..1000)
            .map(|i| MatchPair {
                image_id: 0,
                gt_index: i,
                det_index: i,
                offset: JitterOffset::new(normal.sample(&mut rng), normal.sample(&mut rng)),
                score: 1.0,
            })
            .collect();
        let s = collect_jitter(&pairs).summary().unwrap();
        assert!((0.9..=1.1).contains(&s.std_dx), "std_dx = {}", s.std_dx);
    }

    #[test]
    fn quantile_interpolates() {
        assert_eq!(quantile(&[0.0, 1.0, 2.0, 3.0], 0.5), 1.5);
        assert_eq!(quantile(&[4.0], 0.9), 4.0);
    }

    fn brute_force_best(gts: &[CenterPoint], dets: &[CenterPoint], radius: f64) -> (usize, f64) {
        // enumerate every partial injection GT -> det (or unmatched)
        fn go(g: usize, gts: &[CenterPoint], dets: &[CenterPoint], radius: f64, used: &mut Vec<bool>) -> (usize, f64) {
            if g == gts.len() {
                return (0, 0.0);
            }
            let mut best = go(g + 1, gts, dets, radius, used);
            for d in 0..dets.len() {
                let dist = gts[g].distance(&dets[d]);
                if used[d] || dist > radius {
                    continue;
                }
                used[d] = true;
                let (n, t) = go(g + 1, gts, dets, radius, used);
                used[d] = false;
                let cand = (n + 1, t + dist);
                if cand.0 > best.0 || (cand.0 == best.0 && cand.1 < best.1) {
                    best = cand;
                }
            }
            best
        }
        go(0, gts, dets, radius, &mut vec![false; dets.len()])
    }

    proptest! {
        #[test]
        fn one_to_one_within_radius_and_optimal_beats_greedy(
            gpts in prop::collection::vec((0.0f64..200.0, 0.0f64..200.0), 0..=6),
            dpts in prop::collection::vec((0.0f64..200.0, 0.0f64..200.0, 0.0f64..1.0), 0..=6),
            radius in 10.0f64..80.0,
        ) {
            let gts: Vec<GroundTruth> = gpts.iter().map(|&(x, y)| gt(1, x, y)).collect();
            let dets: Vec<Detection> = dpts.iter().map(|&(x, y, s)| det(1, x, y, s)).collect();
            let greedy = match_image(&gts, &dets, &cfg(radius, MatchStrategy::Greedy)).unwrap();
            let optimal = match_image(&gts, &dets, &cfg(radius, MatchStrategy::Optimal)).unwrap();
            for pairs in [&greedy, &optimal] {
                let mut gs = std::collections::HashSet::new();
                let mut ds = std::collections::HashSet::new();
                for p in pairs.iter() {
                    prop_assert!(gs.insert(p.gt_index) && ds.insert(p.det_index));
                    prop_assert!(p.distance() <= radius + 1e-9);
                }
            }
            let total = |ps: &[MatchPair]| ps.iter().map(MatchPair::distance).sum::<f64>();
            let gc: Vec<CenterPoint> = gts.iter().map(|g| g.center).collect();
            let dc: Vec<CenterPoint> = dets.iter().map(|d| d.center.unwrap()).collect();
            let (best_n, best_total) = brute_force_best(&gc, &dc, radius);
            prop_assert_eq!(optimal.len(), best_n);
            prop_assert!((total(&optimal) - best_total).abs() < 1e-9);
            prop_assert!(optimal.len() >= greedy.len());
            if optimal.len() == greedy.len() {
                prop_assert!(total(&optimal) <= total(&greedy) + 1e-9);
            }
        }
    }
}

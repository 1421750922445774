//! The full post-processing loop on a labelled dataset: match detections to
//! ground truth, estimate jitter, choose `S*`, resize, and score.

use serde::{Deserialize, Serialize};

use crate::annotation::{Detection, GtDataset};
use crate::boxopt::{optimize_size, JitterModel, OptimizeConfig, SizeOptimizationResult};
use crate::error::{Error, Result};
use crate::eval::{evaluate, sweep_size_vs_map, EvalConfig, SweepPoint};
use crate::matching::{collect_jitter, match_dataset, JitterSummary, MatchConfig};
use crate::postprocess::apply_fixed_size;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineSettings {
    pub gt_side: f64,
    pub matching: MatchConfig,
    pub optimize: OptimizeConfig,
    pub eval: EvalConfig,
    /// Size the optimized result is compared against.
    pub baseline_size: f64,
    /// Extra sizes to score; `S*` and the baseline are always included.
    pub sweep_sizes: Vec<f64>,
}

impl PipelineSettings {
    /// Defaults derived from `G`: baseline `G`, sweep `G - 1 ..= G + 6` in
    /// quarter-pixel steps.
    pub fn new(gt_side: f64) -> Self {
        Self {
            gt_side,
            matching: MatchConfig::for_gt_side(gt_side),
            optimize: OptimizeConfig::for_gt_side(gt_side),
            eval: EvalConfig::default(),
            baseline_size: gt_side,
            sweep_sizes: (0..=28).map(|i| gt_side - 1.0 + 0.25 * i as f64).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineRun {
    pub jitter: JitterSummary,
    pub optimum: SizeOptimizationResult,
    pub baseline_size: f64,
    pub baseline_map: f64,
    pub optimized_map: f64,
    /// Ascending in size.
    pub sweep: Vec<SweepPoint>,
}

impl PipelineRun {
    /// Sweep point with the highest mAP (smallest size on ties).
    pub fn best_swept(&self) -> SweepPoint {
        self.sweep.iter().copied().fold(self.sweep[0], |b, p| if p.map > b.map { p } else { b })
    }
}

pub fn run_size_pipeline(gt: &GtDataset, dets: &[Detection], settings: &PipelineSettings) -> Result<PipelineRun> {
    let pairs = match_dataset(&gt.annotations, dets, &settings.matching)?;
    let jitter = collect_jitter(&pairs);
    let summary = jitter
        .summary()
        .ok_or_else(|| Error::invalid("no detection matched any ground truth; jitter cannot be estimated"))?;
    let optimum = optimize_size(settings.gt_side, &JitterModel::from(jitter), &settings.optimize)?;

    let baseline_map = evaluate(gt, &apply_fixed_size(dets, settings.baseline_size, None)?, &settings.eval)?.map;
    let optimized_map = evaluate(gt, &apply_fixed_size(dets, optimum.s_star, None)?, &settings.eval)?.map;

    let mut sizes = settings.sweep_sizes.clone();
    sizes.push(optimum.s_star);
    sizes.push(settings.baseline_size);
    sizes.sort_by(f64::total_cmp);
    sizes.dedup();
    let sweep = sweep_size_vs_map(gt, dets, &sizes, &settings.eval)?;
    Ok(PipelineRun {
        jitter: summary,
        optimum,
        baseline_size: settings.baseline_size,
        baseline_map,
        optimized_map,
        sweep,
    })
}

//! COCO-style mean average precision.
//!
//! Per image and class (or per image when class-agnostic), detections are
//! ranked by score, cut to `max_dets_per_image`, and each takes the unmatched
//! ground truth with the highest IoU at or above the threshold. Precision and
//! recall are then accumulated over the class-wide score ranking, precision
//! is made monotone, and AP is the mean precision at `recall_points` evenly
//! spaced recall levels (`0` selects all-point interpolation).
//!
//! Classes with no ground truth are left out of the mean. Ties in score are
//! broken by detection input order.

use std::collections::{BTreeMap, HashSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::annotation::{CategoryId, Detection, GtDataset, ImageId};
use crate::error::{Error, Result};
use crate::geometry::{iou, BBox};
use crate::postprocess::{apply_fixed_size, resolve_label};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalConfig {
    pub iou_thresholds: Vec<f64>,
    /// Pool all classes into one (detection-only scoring).
    pub class_agnostic: bool,
    pub max_dets_per_image: usize,
    /// Interpolated recall levels; `0` means all-point interpolation.
    pub recall_points: usize,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self { iou_thresholds: coco_thresholds(), class_agnostic: false, max_dets_per_image: 100, recall_points: 101 }
    }
}

/// `0.50, 0.55, ..., 0.95`.
pub fn coco_thresholds() -> Vec<f64> {
    (0..10).map(|i| (50 + 5 * i) as f64 / 100.0).collect()
}

impl EvalConfig {
    pub fn class_agnostic() -> Self {
        Self { class_agnostic: true, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.iou_thresholds.is_empty() {
            return Err(Error::invalid("iou_thresholds must not be empty"));
        }
        if self.iou_thresholds.iter().any(|&t| !(t > 0.0 && t <= 1.0)) {
            return Err(Error::invalid("iou_thresholds must lie in (0, 1]"));
        }
        if self.iou_thresholds.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("iou_thresholds must be strictly increasing"));
        }
        if self.max_dets_per_image == 0 {
            return Err(Error::invalid("max_dets_per_image must be at least 1"));
        }
        if self.recall_points == 1 {
            return Err(Error::invalid("recall_points must be 0 (all-point) or at least 2"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdAp {
    pub iou_threshold: f64,
    pub ap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalCounts {
    pub n_gt: usize,
    pub n_det: usize,
    /// True positives at IoU 0.5, when 0.5 is one of the thresholds.
    pub n_tp_at_50: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub map: f64,
    pub ap50: Option<f64>,
    pub ap75: Option<f64>,
    /// Mean over thresholds per class; empty in class-agnostic mode.
    pub per_class_ap: BTreeMap<CategoryId, f64>,
    pub per_threshold_ap: Vec<ThresholdAp>,
    pub counts: EvalCounts,
}

impl EvalReport {
    /// Plain-text summary table.
    pub fn table(&self) -> String {
        let mut out = String::new();
        let pct = |v: Option<f64>| v.map_or("-".to_string(), |v| format!("{v:.4}"));
        out.push_str(&format!("mAP        {:.4}\n", self.map));
        out.push_str(&format!("AP50       {}\n", pct(self.ap50)));
        out.push_str(&format!("AP75       {}\n", pct(self.ap75)));
        out.push_str(&format!(
            "GT {}  DET {}  TP@0.5 {}\n",
            self.counts.n_gt,
            self.counts.n_det,
            self.counts.n_tp_at_50.map_or("-".to_string(), |n| n.to_string())
        ));
        out.push_str("IoU    AP\n");
        for t in &self.per_threshold_ap {
            out.push_str(&format!("{:.2}   {:.4}\n", t.iou_threshold, t.ap));
        }
        if !self.per_class_ap.is_empty() {
            out.push_str("class  AP\n");
            for (c, ap) in &self.per_class_ap {
                out.push_str(&format!("{c:<6} {ap:.4}\n"));
            }
        }
        out
    }
}

/// A detection ready for scoring.
struct Scored {
    index: usize,
    score: f64,
    bbox: BBox,
}

/// Matching outcome for one detection: `tp[t]` per threshold.
struct Ranked {
    index: usize,
    score: f64,
    tp: Vec<bool>,
}

/// Greedy highest-IoU matching of `dets` (already ranked) against `gts`.
fn match_unit(gts: &[BBox], dets: &[Scored], thresholds: &[f64]) -> Vec<Ranked> {
    let ious: Vec<Vec<f64>> = dets.iter().map(|d| gts.iter().map(|g| iou(&d.bbox, g)).collect()).collect();
    let mut tp = vec![vec![false; thresholds.len()]; dets.len()];
    for (t, &thr) in thresholds.iter().enumerate() {
        let mut taken = vec![false; gts.len()];
        for (d, row) in ious.iter().enumerate() {
            let mut best: Option<(usize, f64)> = None;
            for (g, &v) in row.iter().enumerate() {
                if !taken[g] && v >= thr && best.is_none_or(|(_, b)| v > b) {
                    best = Some((g, v));
                }
            }
            if let Some((g, _)) = best {
                taken[g] = true;
                tp[d][t] = true;
            }
        }
    }
    dets.iter().zip(tp).map(|(d, tp)| Ranked { index: d.index, score: d.score, tp }).collect()
}

/// Average precision of a ranked TP/FP sequence against `n_gt` objects.
pub fn average_precision(tp: &[bool], n_gt: usize, recall_points: usize) -> f64 {
    if n_gt == 0 {
        return 0.0;
    }
    let mut recall = Vec::with_capacity(tp.len());
    let mut precision = Vec::with_capacity(tp.len());
    let (mut ntp, mut nfp) = (0usize, 0usize);
    for &hit in tp {
        if hit {
            ntp += 1;
        } else {
            nfp += 1;
        }
        recall.push(ntp as f64 / n_gt as f64);
        precision.push(ntp as f64 / (ntp + nfp) as f64);
    }
    for i in (1..precision.len()).rev() {
        if precision[i] > precision[i - 1] {
            precision[i - 1] = precision[i];
        }
    }
    if recall_points == 0 {
        let mut prev = 0.0;
        let mut ap = 0.0;
        for (r, p) in recall.iter().zip(&precision) {
            ap += (r - prev) * p;
            prev = *r;
        }
        return ap;
    }
    let denom = (recall_points - 1) as f64;
    let total: f64 = (0..recall_points)
        .map(|k| {
            let level = k as f64 / denom;
            let idx = recall.partition_point(|&r| r < level);
            precision.get(idx).copied().unwrap_or(0.0)
        })
        .sum();
    total / recall_points as f64
}

pub fn evaluate(gt: &GtDataset, dets: &[Detection], cfg: &EvalConfig) -> Result<EvalReport> {
    cfg.validate()?;
    gt.validate()?;
    if gt.annotations.is_empty() {
        return Err(Error::invalid("annotations: ground truth has no objects to evaluate against"));
    }
    let images: HashSet<ImageId> = gt.images.iter().map(|i| i.id).collect();
    let categories: HashSet<CategoryId> = gt.categories.iter().map(|c| c.id).collect();

    // (class, image) -> (gt boxes, scored detections)
    type Unit = (Vec<BBox>, Vec<Scored>);
    let mut units: BTreeMap<(CategoryId, ImageId), Unit> = BTreeMap::new();
    let mut n_gt_per_class: BTreeMap<CategoryId, usize> = BTreeMap::new();
    for a in &gt.annotations {
        let class = if cfg.class_agnostic { 0 } else { a.category_id };
        units.entry((class, a.image_id)).or_default().0.push(a.bbox);
        *n_gt_per_class.entry(class).or_default() += 1;
    }

    let mut n_det = 0;
    for (index, raw) in dets.iter().enumerate() {
        let class = if cfg.class_agnostic {
            0
        } else {
            let Some(det) = resolve_label(raw)? else { continue };
            let c = det.category_id.expect("resolved label");
            if !categories.contains(&c) {
                return Err(Error::invalid(format!(
                    "detections[{index}]: category_id {c} is not a ground-truth category"
                )));
            }
            c
        };
        if !images.contains(&raw.image_id) {
            return Err(Error::invalid(format!("detections[{index}]: unknown image_id {}", raw.image_id)));
        }
        let bbox = raw.bbox.ok_or_else(|| {
            Error::invalid(format!("detections[{index}]: bbox missing; apply a box size before evaluating"))
        })?;
        if !raw.score.is_finite() {
            return Err(Error::invalid(format!("detections[{index}]: score is not finite")));
        }
        n_det += 1;
        units.entry((class, raw.image_id)).or_default().1.push(Scored { index, score: raw.score, bbox });
    }

    let thresholds = &cfg.iou_thresholds;
    let matched: Vec<(CategoryId, Vec<Ranked>)> = units
        .into_par_iter()
        .map(|((class, _), (gts, mut ds))| {
            ds.sort_by(|a, b| b.score.total_cmp(&a.score).then(a.index.cmp(&b.index)));
            ds.truncate(cfg.max_dets_per_image);
            (class, match_unit(&gts, &ds, thresholds))
        })
        .collect();

    let mut by_class: BTreeMap<CategoryId, Vec<Ranked>> = BTreeMap::new();
    for (class, ranked) in matched {
        by_class.entry(class).or_default().extend(ranked);
    }

    let mut class_ap: BTreeMap<CategoryId, Vec<f64>> = BTreeMap::new();
    let mut n_tp_at_50 = 0;
    let t50 = thresholds.iter().position(|&t| t == 0.5);
    for (&class, &n_gt) in &n_gt_per_class {
        let mut ranked = by_class.remove(&class).unwrap_or_default();
        ranked.sort_by(|a, b| b.score.total_cmp(&a.score).then(a.index.cmp(&b.index)));
        if let Some(t) = t50 {
            n_tp_at_50 += ranked.iter().filter(|r| r.tp[t]).count();
        }
        let aps = (0..thresholds.len())
            .map(|t| {
                let seq: Vec<bool> = ranked.iter().map(|r| r.tp[t]).collect();
                average_precision(&seq, n_gt, cfg.recall_points)
            })
            .collect();
        class_ap.insert(class, aps);
    }

    let n_classes = class_ap.len() as f64;
    let per_threshold_ap: Vec<ThresholdAp> = thresholds
        .iter()
        .enumerate()
        .map(|(t, &iou_threshold)| ThresholdAp {
            iou_threshold,
            ap: class_ap.values().map(|v| v[t]).sum::<f64>() / n_classes,
        })
        .collect();
    let map = per_threshold_ap.iter().map(|t| t.ap).sum::<f64>() / per_threshold_ap.len() as f64;
    let at = |x: f64| per_threshold_ap.iter().find(|t| t.iou_threshold == x).map(|t| t.ap);
    let per_class_ap = if cfg.class_agnostic {
        BTreeMap::new()
    } else {
        class_ap.iter().map(|(&c, v)| (c, v.iter().sum::<f64>() / v.len() as f64)).collect()
    };
    Ok(EvalReport {
        map,
        ap50: at(0.5),
        ap75: at(0.75),
        per_class_ap,
        counts: EvalCounts { n_gt: gt.annotations.len(), n_det, n_tp_at_50: t50.map(|_| n_tp_at_50) },
        per_threshold_ap,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub size: f64,
    pub map: f64,
}

/// mAP after rewriting every detection as an `S x S` square, for each `S`.
pub fn sweep_size_vs_map(
    gt: &GtDataset,
    dets: &[Detection],
    sizes: &[f64],
    cfg: &EvalConfig,
) -> Result<Vec<SweepPoint>> {
    if sizes.is_empty() {
        return Err(Error::invalid("sizes must not be empty"));
    }
    sizes
        .par_iter()
        .map(|&size| {
            let sized = apply_fixed_size(dets, size, None)?;
            Ok(SweepPoint { size, map: evaluate(gt, &sized, cfg)?.map })
        })
        .collect()
}

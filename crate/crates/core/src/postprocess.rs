//! Rewrites detections as fixed-size squares around their predicted centers.

use rayon::prelude::*;

use crate::annotation::{CategoryId, Detection};
use crate::error::{Error, Result};
use crate::geometry::{BBox, CenterPoint};

/// Canonical center of a detection: the explicit center when present,
/// otherwise the box midpoint.
pub fn center_of(det: &Detection) -> Result<CenterPoint> {
    match (det.center, det.bbox) {
        (Some(c), _) => Ok(c),
        (None, Some(b)) => Ok(b.center()),
        (None, None) => Err(Error::invalid(format!("detection on image {} has neither bbox nor center", det.image_id))),
    }
}

/// Reduces a probability-vector detection to `(label, score)`.
///
/// The last entry of `class_probs` is background; foreground index `i` maps
/// to category id `i + 1`. Returns `Ok(None)` when background wins, in which
/// case the detection should be dropped. Labeled detections pass through.
pub fn resolve_label(det: &Detection) -> Result<Option<Detection>> {
    if det.category_id.is_some() {
        return Ok(Some(det.clone()));
    }
    let Some(probs) = det.class_probs.as_deref() else {
        return Err(Error::invalid(format!(
            "detection on image {} has neither category_id nor class_probs",
            det.image_id
        )));
    };
    if probs.len() < 2 || probs.iter().any(|p| !p.is_finite()) {
        return Err(Error::invalid(format!(
            "class_probs on image {} must hold at least one foreground and one background finite value",
            det.image_id
        )));
    }
    let (foreground, background) = probs.split_at(probs.len() - 1);
    // first index wins ties
    let (best, best_p) =
        foreground.iter().enumerate().fold((0, f64::NEG_INFINITY), |acc, (i, &p)| if p > acc.1 { (i, p) } else { acc });
    if background[0] > best_p {
        return Ok(None);
    }
    let mut out = det.clone();
    out.category_id = Some(best as CategoryId + 1);
    out.score = best_p;
    out.class_probs = None;
    Ok(Some(out))
}

/// Replaces every box by an `side x side` square centered on the detection's
/// center. Scores, labels and order are kept; probability-vector detections
/// are first reduced to a label (background winners are dropped).
///
/// With `clip_to = Some((w, h))` boxes are intersected with `[0, w] x [0, h]`
/// and the pre-clip center is stored in `center`.
pub fn apply_fixed_size(dets: &[Detection], side: f64, clip_to: Option<(f64, f64)>) -> Result<Vec<Detection>> {
    if !(side.is_finite() && side > 0.0) {
        return Err(Error::invalid(format!("box size must be positive, got {side}")));
    }
    let image_rect = match clip_to {
        Some((w, h)) => Some(BBox::new(0.0, 0.0, w, h)?),
        None => None,
    };
    let rewritten: Vec<Option<Detection>> = dets
        .par_iter()
        .map(|det| -> Result<Option<Detection>> {
            let Some(mut det) = resolve_label(det)? else {
                return Ok(None);
            };
            let center = center_of(&det)?;
            let already_sized = det.bbox.filter(|b| {
                b.width == side && b.height == side && det.center.is_none_or(|c| same_point(c, b.center()))
            });
            let square = match already_sized {
                Some(b) => b,
                None => BBox::centered_square(center, side)?,
            };
            det.bbox = Some(match image_rect {
                None => square,
                Some(rect) => {
                    det.center = Some(center);
                    square.intersection(&rect).ok_or_else(|| {
                        Error::invalid(format!(
                            "detection at ({}, {}) on image {} lies outside the clip extent",
                            center.x, center.y, det.image_id
                        ))
                    })?
                }
            });
            Ok(Some(det))
        })
        .collect::<Result<_>>()?;
    Ok(rewritten.into_iter().flatten().collect())
}

/// Equal up to round-off from recomputing a midpoint.
fn same_point(a: CenterPoint, b: CenterPoint) -> bool {
    let close = |u: f64, v: f64| (u - v).abs() <= 1e-9 * u.abs().max(v.abs()).max(1.0);
    close(a.x, b.x) && close(a.y, b.y)
}

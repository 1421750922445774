//! Axis-aligned box geometry and the closed-form IoU between a fixed-size
//! ground-truth square and a square prediction displaced by a center offset.
//!
//! All coordinates are real-valued pixels. Nothing here rounds.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default ground-truth side length in pixels.
pub const DEFAULT_GT_SIDE: f64 = 100.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 2]", into = "[f64; 2]")]
pub struct CenterPoint {
    pub x: f64,
    pub y: f64,
}

impl CenterPoint {
    pub fn new(x: f64, y: f64) -> Result<Self> {
        if !(x.is_finite() && y.is_finite()) {
            return Err(Error::invalid(format!("center ({x}, {y}) is not finite")));
        }
        Ok(Self { x, y })
    }

    pub fn offset_to(&self, other: &CenterPoint) -> JitterOffset {
        JitterOffset { dx: other.x - self.x, dy: other.y - self.y }
    }

    pub fn distance(&self, other: &CenterPoint) -> f64 {
        (other.x - self.x).hypot(other.y - self.y)
    }
}

impl TryFrom<[f64; 2]> for CenterPoint {
    type Error = Error;
    fn try_from(v: [f64; 2]) -> Result<Self> {
        CenterPoint::new(v[0], v[1])
    }
}

impl From<CenterPoint> for [f64; 2] {
    fn from(c: CenterPoint) -> Self {
        [c.x, c.y]
    }
}

/// Box as `[x_min, y_min, width, height]`, the COCO layout.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 4]", into = "[f64; 4]")]
pub struct BBox {
    pub x_min: f64,
    pub y_min: f64,
    pub width: f64,
    pub height: f64,
}

impl BBox {
    pub fn new(x_min: f64, y_min: f64, width: f64, height: f64) -> Result<Self> {
        let all_finite = [x_min, y_min, width, height].iter().all(|v| v.is_finite());
        if !all_finite || width <= 0.0 || height <= 0.0 {
            return Err(Error::invalid(format!(
                "bbox [{x_min}, {y_min}, {width}, {height}] must be finite with positive width and height"
            )));
        }
        Ok(Self { x_min, y_min, width, height })
    }

    /// Square of side `side` centered at `center`.
    pub fn centered_square(center: CenterPoint, side: f64) -> Result<Self> {
        let half = side / 2.0;
        BBox::new(center.x - half, center.y - half, side, side)
    }

    pub fn x_max(&self) -> f64 {
        self.x_min + self.width
    }

    pub fn y_max(&self) -> f64 {
        self.y_min + self.height
    }

    pub fn area(&self) -> f64 {
        self.width * self.height
    }

    pub fn center(&self) -> CenterPoint {
        CenterPoint { x: self.x_min + self.width / 2.0, y: self.y_min + self.height / 2.0 }
    }

    /// Overlap with `other`, or `None` when the boxes only touch or are disjoint.
    pub fn intersection(&self, other: &BBox) -> Option<BBox> {
        let x0 = self.x_min.max(other.x_min);
        let y0 = self.y_min.max(other.y_min);
        let x1 = self.x_max().min(other.x_max());
        let y1 = self.y_max().min(other.y_max());
        if x1 > x0 && y1 > y0 {
            Some(BBox { x_min: x0, y_min: y0, width: x1 - x0, height: y1 - y0 })
        } else {
            None
        }
    }
}

impl TryFrom<[f64; 4]> for BBox {
    type Error = Error;
    fn try_from(v: [f64; 4]) -> Result<Self> {
        BBox::new(v[0], v[1], v[2], v[3])
    }
}

impl From<BBox> for [f64; 4] {
    fn from(b: BBox) -> Self {
        [b.x_min, b.y_min, b.width, b.height]
    }
}

/// Signed center error, prediction minus ground truth.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct JitterOffset {
    pub dx: f64,
    pub dy: f64,
}

impl JitterOffset {
    pub fn new(dx: f64, dy: f64) -> Self {
        Self { dx, dy }
    }

    /// Per-axis magnitudes `(|dx|, |dy|)`.
    pub fn magnitudes(&self) -> (f64, f64) {
        (self.dx.abs(), self.dy.abs())
    }
}

/// Ground-truth side `G` and reconstructed prediction side `S`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FixedSizeSpec {
    pub gt_side: f64,
    pub pred_side: f64,
}

impl FixedSizeSpec {
    pub fn new(gt_side: f64, pred_side: f64) -> Result<Self> {
        if !(gt_side.is_finite() && gt_side > 0.0) {
            return Err(Error::invalid(format!("gt_side must be positive, got {gt_side}")));
        }
        if !(pred_side.is_finite() && pred_side > 0.0) {
            return Err(Error::invalid(format!("pred_side must be positive, got {pred_side}")));
        }
        Ok(Self { gt_side, pred_side })
    }

    /// Half-margin `(S - G) / 2`; negative when the prediction is smaller.
    pub fn buffer(&self) -> f64 {
        (self.pred_side - self.gt_side) / 2.0
    }
}

pub fn iou(a: &BBox, b: &BBox) -> f64 {
    let inter = a.intersection(b).map_or(0.0, |i| i.area());
    let union = a.area() + b.area() - inter;
    (inter / union).clamp(0.0, 1.0)
}

fn overlap_1d(spec: &FixedSizeSpec, delta: f64) -> f64 {
    let reach = (spec.gt_side + spec.pred_side) / 2.0 - delta;
    reach.max(0.0).min(spec.gt_side.min(spec.pred_side))
}

/// Intersection width and height of a `G x G` box and an `S x S` box whose
/// centers differ by `(delta_x, delta_y)` in magnitude.
///
/// Each side is `min(min(G, S), max(0, (G + S)/2 - delta))`. For `S >= G` the
/// outer cap is `G`; the `min(G, S)` cap keeps the value geometric when the
/// prediction is the smaller box.
pub fn jittered_intersection(spec: &FixedSizeSpec, delta_x: f64, delta_y: f64) -> (f64, f64) {
    debug_assert!(delta_x >= 0.0 && delta_y >= 0.0, "deltas are magnitudes");
    (overlap_1d(spec, delta_x), overlap_1d(spec, delta_y))
}

/// IoU of the displaced square pair, `W*H / (G^2 + S^2 - W*H)`.
pub fn jittered_iou(spec: &FixedSizeSpec, delta_x: f64, delta_y: f64) -> f64 {
    let (w, h) = jittered_intersection(spec, delta_x, delta_y);
    iou_from_overlap(spec, w * h)
}

#[inline]
pub(crate) fn iou_from_overlap(spec: &FixedSizeSpec, inter: f64) -> f64 {
    let g = spec.gt_side;
    let s = spec.pred_side;
    inter / (g * g + s * s - inter)
}

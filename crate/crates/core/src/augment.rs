//! Center-preserving crops of annotation sets and tile planning for large
//! images. Only geometry is handled here; cutting pixels is up to the caller.

use serde::{Deserialize, Serialize};

use crate::annotation::{GroundTruth, ImageId};
use crate::error::{Error, Result};
use crate::geometry::{BBox, CenterPoint};

/// Closed rectangle `[x_min, x_max] x [y_min, y_max]` in image pixels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CropWindow {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl CropWindow {
    pub fn new(x_min: f64, x_max: f64, y_min: f64, y_max: f64) -> Result<Self> {
        let finite = [x_min, x_max, y_min, y_max].iter().all(|v| v.is_finite());
        if !finite || x_min >= x_max || y_min >= y_max {
            return Err(Error::invalid(format!(
                "window [{x_min}, {x_max}] x [{y_min}, {y_max}] must have x_min < x_max and y_min < y_max"
            )));
        }
        Ok(Self { x_min, x_max, y_min, y_max })
    }

    pub fn width(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn height(&self) -> f64 {
        self.y_max - self.y_min
    }

    /// Closed-interval membership on both axes.
    pub fn contains(&self, p: &CenterPoint) -> bool {
        self.x_min <= p.x && p.x <= self.x_max && self.y_min <= p.y && p.y <= self.y_max
    }
}

/// Keeps the annotations whose center lies in `window` and moves them into
/// the window frame. With `clip_boxes`, boxes are cut to the window; the
/// center is kept as-is either way.
pub fn crop_annotations(gts: &[GroundTruth], window: &CropWindow, clip_boxes: bool) -> Vec<GroundTruth> {
    let frame = BBox { x_min: 0.0, y_min: 0.0, width: window.width(), height: window.height() };
    gts.iter()
        .filter(|g| window.contains(&g.center))
        .map(|g| {
            let center = CenterPoint { x: g.center.x - window.x_min, y: g.center.y - window.y_min };
            let moved = BBox { x_min: g.bbox.x_min - window.x_min, y_min: g.bbox.y_min - window.y_min, ..g.bbox };
            let bbox = if clip_boxes {
                // a box around a point of the closed window always overlaps it
                moved.intersection(&frame).unwrap_or(moved)
            } else {
                moved
            };
            GroundTruth { center, bbox, ..g.clone() }
        })
        .collect()
}

fn tile_starts(extent: f64, tile: f64, stride: f64) -> Vec<f64> {
    let mut starts = Vec::new();
    let mut x = 0.0;
    loop {
        if x + tile >= extent {
            starts.push(extent - tile);
            return starts;
        }
        starts.push(x);
        x += stride;
    }
}

/// Windows of size `tile` covering an image of size `image`, stepping by
/// `tile - overlap`. The last row and column are shifted inward so every
/// window lies inside the image. Row-major order.
pub fn plan_tiles(image: (f64, f64), tile: (f64, f64), overlap: f64) -> Result<Vec<CropWindow>> {
    let (iw, ih) = image;
    let (tw, th) = tile;
    if !(tw > 0.0 && th > 0.0 && tw <= iw && th <= ih && iw.is_finite() && ih.is_finite()) {
        return Err(Error::invalid(format!("tile {tw}x{th} must be positive and fit inside image {iw}x{ih}")));
    }
    if !(overlap >= 0.0 && overlap < tw.min(th)) {
        return Err(Error::invalid(format!("overlap {overlap} must lie in [0, {})", tw.min(th))));
    }
    let xs = tile_starts(iw, tw, tw - overlap);
    let ys = tile_starts(ih, th, th - overlap);
    Ok(ys
        .iter()
        .flat_map(|&y| xs.iter().map(move |&x| CropWindow { x_min: x, x_max: x + tw, y_min: y, y_max: y + th }))
        .collect())
}

/// One window of a crop manifest with its translated annotations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CropRecord {
    pub image_id: ImageId,
    pub window: CropWindow,
    pub annotations: Vec<GroundTruth>,
}

//! Ground-truth and detection records, serialized in COCO layout.
//!
//! Ground truth is a COCO annotation file (`images`, `annotations`,
//! `categories`). Detections are a flat array of
//! `{image_id, category_id, bbox, score}` records. Both accept an optional
//! `center` field; detections may also carry `class_probs` in place of a
//! label, with the background probability as the last entry.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{BBox, CenterPoint, DEFAULT_GT_SIDE};

pub type ImageId = u64;
pub type CategoryId = u32;

/// Default foreground classes (Bethesda reporting categories).
pub const DEFAULT_CATEGORY_NAMES: [&str; 8] = ["NILM", "ENDO", "INFL", "ASCUS", "LSIL", "HSIL", "ASCH", "SCC"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImageInfo {
    pub id: ImageId,
    pub width: f64,
    pub height: f64,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub file_name: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Category {
    pub id: CategoryId,
    pub name: String,
}

pub fn default_categories() -> Vec<Category> {
    DEFAULT_CATEGORY_NAMES
        .iter()
        .enumerate()
        .map(|(i, name)| Category { id: i as CategoryId + 1, name: (*name).to_string() })
        .collect()
}

/// One annotated object.
///
/// `center` is authoritative; `bbox` is normally the `G x G` square around
/// it but may be clipped (for instance after cropping), in which case the
/// center is no longer the box midpoint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawAnnotation", into = "RawAnnotation")]
pub struct GroundTruth {
    pub id: u64,
    pub image_id: ImageId,
    pub category_id: CategoryId,
    pub center: CenterPoint,
    pub bbox: BBox,
}

impl GroundTruth {
    /// Square annotation of side `gt_side` around `center`.
    pub fn fixed(
        id: u64,
        image_id: ImageId,
        category_id: CategoryId,
        center: CenterPoint,
        gt_side: f64,
    ) -> Result<Self> {
        Ok(Self { id, image_id, category_id, center, bbox: BBox::centered_square(center, gt_side)? })
    }
}

#[derive(Serialize, Deserialize)]
struct RawAnnotation {
    id: u64,
    image_id: ImageId,
    category_id: CategoryId,
    bbox: BBox,
    #[serde(default)]
    area: Option<f64>,
    #[serde(default)]
    iscrowd: u8,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    center: Option<CenterPoint>,
}

impl TryFrom<RawAnnotation> for GroundTruth {
    type Error = Error;
    fn try_from(raw: RawAnnotation) -> Result<Self> {
        if raw.iscrowd != 0 {
            return Err(Error::invalid(format!("annotation {}: iscrowd regions are not supported", raw.id)));
        }
        Ok(Self {
            id: raw.id,
            image_id: raw.image_id,
            category_id: raw.category_id,
            center: raw.center.unwrap_or_else(|| raw.bbox.center()),
            bbox: raw.bbox,
        })
    }
}

impl From<GroundTruth> for RawAnnotation {
    fn from(gt: GroundTruth) -> Self {
        let center = (gt.center != gt.bbox.center()).then_some(gt.center);
        Self {
            id: gt.id,
            image_id: gt.image_id,
            category_id: gt.category_id,
            bbox: gt.bbox,
            area: Some(gt.bbox.area()),
            iscrowd: 0,
            center,
        }
    }
}

/// One predicted object.
///
/// A detection carries a box, an explicit center, or both; and either a
/// label or a class probability vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Detection {
    pub image_id: ImageId,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub category_id: Option<CategoryId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bbox: Option<BBox>,
    pub score: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center: Option<CenterPoint>,
    /// Foreground class probabilities followed by background.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub class_probs: Option<Vec<f64>>,
}

impl Detection {
    pub fn with_box(image_id: ImageId, category_id: CategoryId, bbox: BBox, score: f64) -> Self {
        Self { image_id, category_id: Some(category_id), bbox: Some(bbox), score, center: None, class_probs: None }
    }

    pub fn with_center(image_id: ImageId, category_id: CategoryId, center: CenterPoint, score: f64) -> Self {
        Self { image_id, category_id: Some(category_id), bbox: None, score, center: Some(center), class_probs: None }
    }
}

/// A COCO ground-truth file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GtDataset {
    pub images: Vec<ImageInfo>,
    pub annotations: Vec<GroundTruth>,
    #[serde(default = "default_categories")]
    pub categories: Vec<Category>,
    /// Free-form provenance (COCO `info`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub info: Option<serde_json::Value>,
}

impl GtDataset {
    /// Checks id uniqueness and that every annotation refers to a known
    /// image and category.
    pub fn validate(&self) -> Result<()> {
        let mut image_ids = HashSet::new();
        for img in &self.images {
            if !image_ids.insert(img.id) {
                return Err(Error::invalid(format!("images: duplicate image id {}", img.id)));
            }
            if !(img.width > 0.0 && img.height > 0.0) {
                return Err(Error::invalid(format!("images: image {} has non-positive extent", img.id)));
            }
        }
        let mut cat_ids = HashSet::new();
        for cat in &self.categories {
            if !cat_ids.insert(cat.id) {
                return Err(Error::invalid(format!("categories: duplicate category id {}", cat.id)));
            }
        }
        let mut ann_ids = HashSet::new();
        for ann in &self.annotations {
            if !ann_ids.insert(ann.id) {
                return Err(Error::invalid(format!("annotations: duplicate annotation id {}", ann.id)));
            }
            if !image_ids.contains(&ann.image_id) {
                return Err(Error::invalid(format!(
                    "annotations: annotation {} refers to unknown image_id {}",
                    ann.id, ann.image_id
                )));
            }
            if !cat_ids.contains(&ann.category_id) {
                return Err(Error::invalid(format!(
                    "annotations: annotation {} refers to unknown category_id {}",
                    ann.id, ann.category_id
                )));
            }
        }
        Ok(())
    }

    pub fn image(&self, id: ImageId) -> Option<&ImageInfo> {
        self.images.iter().find(|i| i.id == id)
    }

    /// Common side length of the annotation boxes, or the default when
    /// there are none.
    pub fn gt_side(&self) -> f64 {
        self.annotations.first().map_or(DEFAULT_GT_SIDE, |a| a.bbox.width)
    }
}

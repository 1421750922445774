//! Fixed-size box reconstruction for center-point object detection.
//!
//! When every ground-truth box has the same side `G`, a detector only needs
//! to predict centers. This crate turns those centers back into boxes of the
//! side `S` that maximizes expected IoU under the detector's center jitter,
//! and supplies the surrounding tooling:
//!
//! - [`geometry`]: box IoU and the closed-form IoU of a displaced square pair.
//! - [`matching`]: detection-to-GT center matching and jitter collection.
//! - [`boxopt`]: expected IoU under a jitter model and the optimal side `S*`.
//! - [`postprocess`]: rewriting detections as `S x S` squares.
//! - [`augment`]: center-preserving crops and tile planning.
//! - [`eval`]: COCO-style mAP, class-aware or class-agnostic.
//! - [`simdet`]: synthetic scenes and noisy detectors.
//! - [`cli`]: the `centerbox` command-line front end and its file formats.

pub mod annotation;
pub mod assignment;
pub mod augment;
pub mod boxopt;
pub mod cli;
pub mod error;
pub mod eval;
pub mod geometry;
pub mod io;
pub mod matching;
pub mod postprocess;
pub mod simdet;

pub mod pipeline;

pub use annotation::{Category, CategoryId, Detection, GroundTruth, GtDataset, ImageId, ImageInfo};
pub use error::{Error, Result};
pub use geometry::{iou, jittered_intersection, jittered_iou, BBox, CenterPoint, FixedSizeSpec, JitterOffset};

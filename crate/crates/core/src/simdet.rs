//! Synthetic scenes of fixed-size objects and a noisy center-point detector.
//!
//! Every random draw comes from a ChaCha stream keyed by `(seed, image id)`,
//! so a dataset is reproducible bit for bit no matter how many threads
//! generate it.

use rand::distributions::WeightedIndex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::annotation::{
    default_categories, Category, CategoryId, Detection, GroundTruth, GtDataset, ImageId, ImageInfo,
};
use crate::boxopt::JitterModel;
use crate::error::{Error, Result};
use crate::geometry::{BBox, CenterPoint, DEFAULT_GT_SIDE};

/// Rejection-sampling attempts per object before placement fails.
pub const MAX_PLACEMENT_ATTEMPTS: usize = 10_000;

const PROB_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ObjectCount {
    Count(usize),
    /// Objects per million square pixels, rounded to the nearest integer.
    Density(f64),
}

impl ObjectCount {
    fn resolve(&self, extent: (f64, f64)) -> usize {
        match *self {
            ObjectCount::Count(n) => n,
            ObjectCount::Density(d) => (d * extent.0 * extent.1 / 1e6).round().max(0.0) as usize,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SceneConfig {
    pub image_extent: (f64, f64),
    pub n_objects: ObjectCount,
    pub min_center_separation: f64,
    /// Probability of each foreground class; index `i` is category `i + 1`.
    pub class_distribution: Vec<f64>,
    pub gt_side: f64,
    pub seed: u64,
}

impl Default for SceneConfig {
    fn default() -> Self {
        Self {
            image_extent: (1024.0, 1024.0),
            n_objects: ObjectCount::Count(50),
            min_center_separation: 60.0,
            class_distribution: vec![1.0 / 8.0; 8],
            gt_side: DEFAULT_GT_SIDE,
            seed: 0,
        }
    }
}

fn check_distribution(name: &str, p: &[f64]) -> Result<()> {
    if p.is_empty() || p.iter().any(|&v| !(v >= 0.0 && v.is_finite())) {
        return Err(Error::invalid(format!("{name}: probabilities must be non-negative and finite")));
    }
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > PROB_TOLERANCE {
        return Err(Error::invalid(format!("{name}: probabilities sum to {total}, expected 1")));
    }
    Ok(())
}

impl SceneConfig {
    pub fn validate(&self) -> Result<()> {
        check_distribution("class_distribution", &self.class_distribution)?;
        if !(self.min_center_separation >= 0.0 && self.min_center_separation.is_finite()) {
            return Err(Error::invalid("min_center_separation must be non-negative"));
        }
        let (w, h) = self.image_extent;
        if !(self.gt_side > 0.0 && w >= self.gt_side && h >= self.gt_side && w.is_finite() && h.is_finite()) {
            return Err(Error::invalid(format!(
                "image_extent {w}x{h} must hold at least one {0}x{0} object",
                self.gt_side
            )));
        }
        if let ObjectCount::Density(d) = self.n_objects {
            if !(d >= 0.0 && d.is_finite()) {
                return Err(Error::invalid("n_objects density must be non-negative"));
            }
        }
        Ok(())
    }

    pub fn n_classes(&self) -> usize {
        self.class_distribution.len()
    }
}

/// Score distributions, clipped to `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoreModel {
    pub tp_mean: f64,
    pub tp_std: f64,
    pub fp_mean: f64,
    pub fp_std: f64,
}

impl Default for ScoreModel {
    fn default() -> Self {
        Self { tp_mean: 0.8, tp_std: 0.1, fp_mean: 0.3, fp_std: 0.1 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DetectorNoise {
    pub jitter: JitterModel,
    pub miss_rate: f64,
    /// Expected false positives per image (Poisson).
    pub false_positive_rate: f64,
    pub score_model: ScoreModel,
    /// Row-stochastic confusion matrix; identity when empty.
    pub confusion: Vec<Vec<f64>>,
    /// Side of the emitted boxes; the scene's GT side when unset.
    pub box_side: Option<f64>,
    pub seed: u64,
}

impl Default for DetectorNoise {
    fn default() -> Self {
        Self {
            jitter: JitterModel::Deterministic { dx: 0.0, dy: 0.0 },
            miss_rate: 0.0,
            false_positive_rate: 0.0,
            score_model: ScoreModel::default(),
            confusion: Vec::new(),
            box_side: None,
            seed: 0,
        }
    }
}

impl DetectorNoise {
    pub fn validate(&self, n_classes: usize) -> Result<()> {
        self.jitter.validate()?;
        if !(0.0..=1.0).contains(&self.miss_rate) {
            return Err(Error::invalid(format!("miss_rate must lie in [0, 1], got {}", self.miss_rate)));
        }
        if !(self.false_positive_rate >= 0.0 && self.false_positive_rate.is_finite()) {
            return Err(Error::invalid("false_positive_rate must be a non-negative expected count"));
        }
        let s = &self.score_model;
        if [s.tp_mean, s.fp_mean].iter().any(|v| !v.is_finite()) || !(s.tp_std >= 0.0 && s.fp_std >= 0.0) {
            return Err(Error::invalid("score_model: means must be finite and stds non-negative"));
        }
        if !self.confusion.is_empty() {
            if self.confusion.len() != n_classes {
                return Err(Error::invalid(format!(
                    "confusion: expected {n_classes} rows, got {}",
                    self.confusion.len()
                )));
            }
            for (i, row) in self.confusion.iter().enumerate() {
                if row.len() != n_classes {
                    return Err(Error::invalid(format!("confusion[{i}]: expected {n_classes} columns")));
                }
                check_distribution(&format!("confusion[{i}]"), row)?;
            }
        }
        if let Some(side) = self.box_side {
            if !(side > 0.0 && side.is_finite()) {
                return Err(Error::invalid("box_side must be positive"));
            }
        }
        Ok(())
    }
}

fn stream(seed: u64, image_id: ImageId) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(image_id);
    rng
}

fn clipped_normal(rng: &mut ChaCha8Rng, mean: f64, std: f64) -> f64 {
    let v = if std > 0.0 { Normal::new(mean, std).expect("validated std").sample(rng) } else { mean };
    v.clamp(0.0, 1.0)
}

/// Places objects uniformly so every box lies inside the image and centers
/// keep at least `min_center_separation` apart. Annotation ids run from 1.
pub fn generate_scene(cfg: &SceneConfig, image_id: ImageId) -> Result<Vec<GroundTruth>> {
    cfg.validate()?;
    let n = cfg.n_objects.resolve(cfg.image_extent);
    let mut rng = stream(cfg.seed, image_id);
    let classes =
        WeightedIndex::new(&cfg.class_distribution).map_err(|e| Error::invalid(format!("class_distribution: {e}")))?;
    let half = cfg.gt_side / 2.0;
    let (w, h) = cfg.image_extent;
    let draw = |rng: &mut ChaCha8Rng, lo: f64, hi: f64| if lo < hi { rng.gen_range(lo..=hi) } else { lo };
    let mut centers: Vec<CenterPoint> = Vec::with_capacity(n);
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let mut placed = None;
        for _ in 0..MAX_PLACEMENT_ATTEMPTS {
            let c = CenterPoint { x: draw(&mut rng, half, w - half), y: draw(&mut rng, half, h - half) };
            if centers.iter().all(|o| o.distance(&c) >= cfg.min_center_separation) {
                placed = Some(c);
                break;
            }
        }
        let Some(center) = placed else {
            return Err(Error::Infeasible(format!(
                "placed {k} of {n} objects at separation {} in {w}x{h} after {MAX_PLACEMENT_ATTEMPTS} attempts",
                cfg.min_center_separation
            )));
        };
        centers.push(center);
        let category = classes.sample(&mut rng) as CategoryId + 1;
        out.push(GroundTruth::fixed(k as u64 + 1, image_id, category, center, cfg.gt_side)?);
    }
    Ok(out)
}

/// Draws a signed offset from `model`. Deterministic magnitudes get a random
/// sign per axis.
fn draw_offset(model: &JitterModel, rng: &mut ChaCha8Rng) -> (f64, f64) {
    let sign = |rng: &mut ChaCha8Rng| if rng.gen::<bool>() { 1.0 } else { -1.0 };
    match model {
        JitterModel::Deterministic { dx, dy } => (sign(rng) * dx, sign(rng) * dy),
        JitterModel::UniformRadial { lo, hi } => {
            let r = if lo < hi { rng.gen_range(*lo..*hi) } else { *lo };
            let theta = rng.gen_range(0.0..std::f64::consts::TAU);
            (r * theta.cos(), r * theta.sin())
        }
        JitterModel::GaussianIsotropic { sigma } => {
            if *sigma == 0.0 {
                return (0.0, 0.0);
            }
            let normal = Normal::new(0.0, *sigma).expect("validated sigma");
            (normal.sample(rng), normal.sample(rng))
        }
        JitterModel::Empirical { samples } => {
            let o = samples[rng.gen_range(0..samples.len())];
            (o.dx, o.dy)
        }
    }
}

/// Detections for one image: each GT is missed with `miss_rate`, otherwise
/// reported at its jittered center with a class drawn from its confusion row;
/// then a Poisson number of false positives lands uniformly in the image.
pub fn simulate_detector(
    image: &ImageInfo,
    gts: &[GroundTruth],
    noise: &DetectorNoise,
    n_classes: usize,
) -> Result<Vec<Detection>> {
    noise.validate(n_classes)?;
    if let Some(g) = gts.iter().find(|g| g.image_id != image.id) {
        return Err(Error::invalid(format!("annotation {} is not on image {}", g.id, image.id)));
    }
    let rows = noise
        .confusion
        .iter()
        .map(|row| WeightedIndex::new(row).map_err(|e| Error::invalid(format!("confusion: {e}"))))
        .collect::<Result<Vec<_>>>()?;
    let mut rng = stream(noise.seed, image.id);
    let sm = noise.score_model;
    let mut dets = Vec::with_capacity(gts.len());
    for g in gts {
        let side = noise.box_side.unwrap_or(g.bbox.width);
        if rng.gen::<f64>() < noise.miss_rate {
            continue;
        }
        let (dx, dy) = draw_offset(&noise.jitter, &mut rng);
        let center = CenterPoint::new(g.center.x + dx, g.center.y + dy)?;
        let class = (g.category_id as usize).wrapping_sub(1);
        let category = match rows.get(class) {
            Some(row) => row.sample(&mut rng) as CategoryId + 1,
            None if rows.is_empty() => g.category_id,
            None => return Err(Error::invalid(format!("annotation {}: category outside confusion matrix", g.id))),
        };
        let score = clipped_normal(&mut rng, sm.tp_mean, sm.tp_std);
        dets.push(Detection {
            bbox: Some(BBox::centered_square(center, side)?),
            center: Some(center),
            ..Detection::with_center(image.id, category, center, score)
        });
    }
    if noise.false_positive_rate > 0.0 {
        let n_fp = Poisson::new(noise.false_positive_rate)
            .map_err(|e| Error::invalid(format!("false_positive_rate: {e}")))?
            .sample(&mut rng) as usize;
        let side = noise.box_side.unwrap_or_else(|| gts.first().map_or(DEFAULT_GT_SIDE, |g| g.bbox.width));
        for _ in 0..n_fp {
            let center = CenterPoint { x: rng.gen_range(0.0..image.width), y: rng.gen_range(0.0..image.height) };
            let category = rng.gen_range(0..n_classes) as CategoryId + 1;
            let score = clipped_normal(&mut rng, sm.fp_mean, sm.fp_std);
            dets.push(Detection {
                bbox: Some(BBox::centered_square(center, side)?),
                ..Detection::with_center(image.id, category, center, score)
            });
        }
    }
    Ok(dets)
}

/// Multi-image simulation settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimulationConfig {
    pub n_images: usize,
    pub scene: SceneConfig,
    pub noise: DetectorNoise,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        Self { n_images: 10, scene: SceneConfig::default(), noise: DetectorNoise::default() }
    }
}

fn categories_for(n: usize) -> Vec<Category> {
    if n == 8 {
        default_categories()
    } else {
        (1..=n).map(|i| Category { id: i as CategoryId, name: format!("class{i}") }).collect()
    }
}

/// Images `1..=n_images` with their ground truth and simulated detections.
/// Annotation ids are unique across the dataset.
pub fn simulate_dataset(cfg: &SimulationConfig) -> Result<(GtDataset, Vec<Detection>)> {
    let scene = &cfg.scene;
    scene.validate()?;
    cfg.noise.validate(scene.n_classes())?;
    let (w, h) = scene.image_extent;
    let per_image: Vec<(ImageInfo, Vec<GroundTruth>, Vec<Detection>)> = (1..=cfg.n_images as ImageId)
        .into_par_iter()
        .map(|id| {
            let image = ImageInfo { id, width: w, height: h, file_name: format!("sim_{id:05}.png") };
            let gts = generate_scene(scene, id)?;
            let dets = simulate_detector(&image, &gts, &cfg.noise, scene.n_classes())?;
            Ok((image, gts, dets))
        })
        .collect::<Result<_>>()?;
    let mut images = Vec::with_capacity(per_image.len());
    let mut annotations = Vec::new();
    let mut detections = Vec::new();
    for (image, gts, dets) in per_image {
        images.push(image);
        for g in gts {
            annotations.push(GroundTruth { id: annotations.len() as u64 + 1, ..g });
        }
        detections.extend(dets);
    }
    Ok((GtDataset { images, annotations, categories: categories_for(scene.n_classes()), info: None }, detections))
}

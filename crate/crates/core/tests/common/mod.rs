//! Helpers shared by the integration test targets.
#![allow(dead_code)]

use centerbox::annotation::{default_categories, Detection, GroundTruth, GtDataset, ImageInfo};
use centerbox::geometry::{BBox, CenterPoint};
use rand::Rng;

/// IoU from explicit corner coordinates.
pub fn corner_iou(a: &BBox, b: &BBox) -> f64 {
    let (ax1, ay1, ax2, ay2) = (a.x_min, a.y_min, a.x_min + a.width, a.y_min + a.height);
    let (bx1, by1, bx2, by2) = (b.x_min, b.y_min, b.x_min + b.width, b.y_min + b.height);
    let iw = (ax2.min(bx2) - ax1.max(bx1)).max(0.0);
    let ih = (ay2.min(by2) - ay1.max(by1)).max(0.0);
    let inter = iw * ih;
    inter / (a.width * a.height + b.width * b.height - inter)
}

/// Straight-line COCO mAP: every class, threshold and recall level is
/// scored from scratch with no shared state.
pub fn reference_map(
    gt: &GtDataset,
    dets: &[Detection],
    class_agnostic: bool,
    thresholds: &[f64],
    max_dets: usize,
) -> f64 {
    let class_of = |c: u32| if class_agnostic { 0 } else { c };
    let mut classes: Vec<u32> = gt.annotations.iter().map(|a| class_of(a.category_id)).collect();
    classes.sort_unstable();
    classes.dedup();

    let mut total = 0.0;
    for &t in thresholds {
        let mut class_sum = 0.0;
        for &c in &classes {
            let n_gt = gt.annotations.iter().filter(|a| class_of(a.category_id) == c).count();
            // (score, input index, is true positive)
            let mut ranked: Vec<(f64, usize, bool)> = Vec::new();
            for img in &gt.images {
                let gts: Vec<BBox> = gt
                    .annotations
                    .iter()
                    .filter(|a| a.image_id == img.id && class_of(a.category_id) == c)
                    .map(|a| a.bbox)
                    .collect();
                let mut ds: Vec<(usize, &Detection)> = dets
                    .iter()
                    .enumerate()
                    .filter(|(_, d)| d.image_id == img.id && class_of(d.category_id.unwrap()) == c)
                    .collect();
                ds.sort_by(|a, b| b.1.score.partial_cmp(&a.1.score).unwrap().then(a.0.cmp(&b.0)));
                ds.truncate(max_dets);
                let mut used = vec![false; gts.len()];
                for (i, d) in ds {
                    let bbox = d.bbox.unwrap();
                    let mut best = None;
                    let mut best_iou = f64::NEG_INFINITY;
                    for (g, gb) in gts.iter().enumerate() {
                        let v = corner_iou(&bbox, gb);
                        if !used[g] && v >= t && v > best_iou {
                            best = Some(g);
                            best_iou = v;
                        }
                    }
                    if let Some(g) = best {
                        used[g] = true;
                    }
                    ranked.push((d.score, i, best.is_some()));
                }
            }
            ranked.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then(a.1.cmp(&b.1)));

            let mut recall = Vec::new();
            let mut precision = Vec::new();
            let mut hits = 0;
            for (k, r) in ranked.iter().enumerate() {
                if r.2 {
                    hits += 1;
                }
                recall.push(hits as f64 / n_gt as f64);
                precision.push(hits as f64 / (k + 1) as f64);
            }
            let mut ap = 0.0;
            for k in 0..=100 {
                let level = k as f64 / 100.0;
                let mut p: f64 = 0.0;
                for j in 0..recall.len() {
                    if recall[j] >= level {
                        p = p.max(precision[j]);
                    }
                }
                ap += p;
            }
            class_sum += ap / 101.0;
        }
        total += class_sum / classes.len() as f64;
    }
    total / thresholds.len() as f64
}

/// A small random labelled instance: 1..=3 images, up to 8 objects and 8
/// detections per image, 3 classes, boxes of varying size.
pub fn random_instance(rng: &mut impl Rng) -> (GtDataset, Vec<Detection>) {
    let n_images = rng.gen_range(1..=3);
    let mut images = Vec::new();
    let mut annotations = Vec::new();
    let mut dets = Vec::new();
    let mut next_id = 1;
    for image_id in 1..=n_images {
        images.push(ImageInfo { id: image_id, width: 300.0, height: 300.0, file_name: String::new() });
        let n_gt = rng.gen_range(0..=8);
        let mut boxes = Vec::new();
        for _ in 0..n_gt {
            let w = rng.gen_range(20.0..80.0);
            let h = rng.gen_range(20.0..80.0);
            let b = BBox::new(rng.gen_range(0.0..220.0), rng.gen_range(0.0..220.0), w, h).unwrap();
            let category_id = rng.gen_range(1..=3);
            annotations.push(GroundTruth { id: next_id, image_id, category_id, center: b.center(), bbox: b });
            boxes.push((b, category_id));
            next_id += 1;
        }
        for _ in 0..rng.gen_range(0..=8) {
            let (bbox, category_id) = match boxes.get(rng.gen_range(0..boxes.len() + 2)) {
                Some(&(b, c)) => {
                    let j = rng.gen_range(0.0..15.0);
                    let bb = BBox::new(
                        b.x_min + rng.gen_range(-j..=j),
                        b.y_min + rng.gen_range(-j..=j),
                        (b.width + rng.gen_range(-j..=j)).max(5.0),
                        (b.height + rng.gen_range(-j..=j)).max(5.0),
                    )
                    .unwrap();
                    let c = if rng.gen_bool(0.8) { c } else { rng.gen_range(1..=3) };
                    (bb, c)
                }
                None => (
                    BBox::new(rng.gen_range(0.0..250.0), rng.gen_range(0.0..250.0), 40.0, 40.0).unwrap(),
                    rng.gen_range(1..=3),
                ),
            };
            // coarse scores so ties occur
            let score = rng.gen_range(1..=10) as f64 / 10.0;
            dets.push(Detection::with_box(image_id, category_id, bbox, score));
        }
    }
    if annotations.is_empty() {
        let c = CenterPoint::new(150.0, 150.0).unwrap();
        annotations.push(GroundTruth::fixed(next_id, 1, 1, c, 50.0).unwrap());
    }
    (GtDataset { images, annotations, categories: default_categories(), info: None }, dets)
}

/// Runs the CLI in-process and returns (exit code, stdout, stderr).
pub fn cli(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("centerbox").chain(args.iter().copied());
    let code = centerbox::cli::run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

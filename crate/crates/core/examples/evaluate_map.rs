//! COCO-style mAP of a detection file against a ground-truth file, class-aware
//! and class-agnostic. Without arguments a small simulated set is scored.
//!
//! cargo run --release --example evaluate_map -- [gt.json dets.json]

use std::path::Path;

use centerbox::annotation::{Detection, GtDataset};
use centerbox::eval::{evaluate, EvalConfig};
use centerbox::io::read_json;
use centerbox::postprocess::apply_fixed_size;
use centerbox::simdet::{simulate_dataset, DetectorNoise, SimulationConfig};

fn main() -> centerbox::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let (gt, dets): (GtDataset, Vec<Detection>) = match args.as_slice() {
        [g, d] => (read_json(Path::new(g))?, read_json(Path::new(d))?),
        _ => {
            let noise = DetectorNoise { false_positive_rate: 4.0, miss_rate: 0.1, ..DetectorNoise::default() };
            simulate_dataset(&SimulationConfig { n_images: 10, noise, ..SimulationConfig::default() })?
        }
    };
    let dets = apply_fixed_size(&dets, gt.gt_side(), None)?;

    println!("class-aware, 101-point:");
    print!("{}", evaluate(&gt, &dets, &EvalConfig::default())?.table());
    println!("\nclass-agnostic, 101-point:");
    print!("{}", evaluate(&gt, &dets, &EvalConfig::class_agnostic())?.table());
    let all_point = EvalConfig { recall_points: 0, ..EvalConfig::class_agnostic() };
    println!("\nclass-agnostic, all-point mAP: {:.6}", evaluate(&gt, &dets, &all_point)?.map);
    Ok(())
}

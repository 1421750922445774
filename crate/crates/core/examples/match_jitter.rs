//! Match simulated detections to ground truth by center distance and
//! summarize the offsets. Optionally writes the samples as NDJSON.
//!
//! cargo run --release --example match_jitter -- [sigma] [out.ndjson]

use std::path::Path;

use centerbox::boxopt::JitterModel;
use centerbox::io::{jitter_records_text, write_text, JitterRecord};
use centerbox::matching::{collect_jitter, match_dataset, MatchConfig, MatchStrategy};
use centerbox::simdet::{simulate_dataset, DetectorNoise, SimulationConfig};

fn main() -> centerbox::Result<()> {
    let mut args = std::env::args().skip(1);
    let sigma: f64 = args.next().map_or(1.2, |s| s.parse().expect("sigma"));
    let out = args.next();

    let sim = SimulationConfig {
        n_images: 20,
        noise: DetectorNoise {
            jitter: JitterModel::GaussianIsotropic { sigma },
            miss_rate: 0.05,
            false_positive_rate: 3.0,
            ..DetectorNoise::default()
        },
        ..SimulationConfig::default()
    };
    let (gt, dets) = simulate_dataset(&sim)?;

    for strategy in [MatchStrategy::Greedy, MatchStrategy::Optimal] {
        let cfg = MatchConfig { strategy, ..MatchConfig::for_gt_side(100.0) };
        let pairs = match_dataset(&gt.annotations, &dets, &cfg)?;
        let total: f64 = pairs.iter().map(|p| p.distance()).sum();
        println!("{strategy:?}: {} pairs, total center distance {total:.3}", pairs.len());
    }

    let pairs = match_dataset(&gt.annotations, &dets, &MatchConfig::default())?;
    let s = collect_jitter(&pairs).summary().expect("pairs");
    println!("mean |dx| {:.4}  mean |dy| {:.4}", s.mean_abs_dx, s.mean_abs_dy);
    println!("mean dx {:+.4}  mean dy {:+.4}", s.mean_dx, s.mean_dy);
    println!("std dx {:.4}  std dy {:.4}  (simulated sigma {sigma})", s.std_dx, s.std_dy);
    println!("mean radial {:.4}  rms radial {:.4}", s.mean_radial, s.rms_radial);
    println!("{:>5} {:>8} {:>8} {:>8}", "q", "|dx|", "|dy|", "radial");
    for [q, ax, ay, r] in &s.quantiles {
        println!("{q:>5} {ax:>8.4} {ay:>8.4} {r:>8.4}");
    }

    if let Some(path) = out {
        let records: Vec<JitterRecord> = pairs.iter().map(JitterRecord::from).collect();
        write_text(Path::new(&path), &jitter_records_text(&records))?;
        println!("wrote {} samples to {path}", records.len());
    }
    Ok(())
}

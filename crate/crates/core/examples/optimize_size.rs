//! Optimal reconstructed box side for a few jitter models.
//!
//! cargo run --release --example optimize_size

use centerbox::boxopt::{optimize_size, JitterModel, OptimizeConfig};

fn main() -> centerbox::Result<()> {
    let g = 100.0;
    let cfg = OptimizeConfig::for_gt_side(g);
    let models = [
        JitterModel::Deterministic { dx: 0.75, dy: 0.75 },
        JitterModel::Deterministic { dx: 1.0, dy: 1.0 },
        JitterModel::Deterministic { dx: 1.5, dy: 1.5 },
        JitterModel::UniformRadial { lo: 1.0, hi: 1.5 },
        JitterModel::GaussianIsotropic { sigma: 0.5 },
        JitterModel::GaussianIsotropic { sigma: 1.0 },
        JitterModel::GaussianIsotropic { sigma: 1.5 },
    ];
    println!("{:<36} {:>9} {:>10} {:>10}", "jitter model", "S*", "E[IoU]*", "E[IoU]@G");
    for m in &models {
        let r = optimize_size(g, m, &cfg)?;
        let at_g = centerbox::boxopt::expected_iou(g, g, m)?;
        println!("{:<36} {:>9.3} {:>10.6} {:>10.6}", m.describe(), r.s_star, r.expected_iou_at_star, at_g);
    }
    Ok(())
}

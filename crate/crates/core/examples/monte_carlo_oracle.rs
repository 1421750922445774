//! Deterministic quadrature of E[IoU] next to the seeded Monte-Carlo
//! estimate, for the parametric jitter models.
//!
//! cargo run --release --example monte_carlo_oracle -- [n_samples] [seed]

use centerbox::boxopt::{expected_iou, monte_carlo_expected_iou, JitterModel};

fn main() -> centerbox::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().map_or(1_000_000, |s| s.parse().expect("n_samples"));
    let seed: u64 = args.next().map_or(1, |s| s.parse().expect("seed"));
    let models = [
        JitterModel::GaussianIsotropic { sigma: 0.5 },
        JitterModel::GaussianIsotropic { sigma: 1.0 },
        JitterModel::GaussianIsotropic { sigma: 1.5 },
        JitterModel::UniformRadial { lo: 1.0, hi: 1.5 },
    ];
    println!("{:<30} {:>7} {:>12} {:>12} {:>10}", "model", "S", "quadrature", "monte carlo", "gap");
    for m in &models {
        for s in [100.0, 101.5, 103.0] {
            let q = expected_iou(100.0, s, m)?;
            let mc = monte_carlo_expected_iou(100.0, s, m, n, seed)?;
            println!("{:<30} {:>7} {:>12.8} {:>12.8} {:>10.2e}", m.describe(), s, q, mc, (q - mc).abs());
        }
    }
    Ok(())
}

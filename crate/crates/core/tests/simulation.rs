use centerbox::boxopt::{optimize_size, JitterModel, OptimizeConfig};
use centerbox::eval::{sweep_size_vs_map, EvalConfig};
use centerbox::matching::{collect_jitter, match_dataset, MatchConfig};
use centerbox::simdet::{simulate_dataset, DetectorNoise, ObjectCount, SceneConfig, SimulationConfig};

fn config(n_images: usize, jitter: JitterModel, seed: u64) -> SimulationConfig {
    SimulationConfig {
        n_images,
        scene: SceneConfig { n_objects: ObjectCount::Count(50), seed, ..SceneConfig::default() },
        noise: DetectorNoise {
            jitter,
            miss_rate: 0.0,
            false_positive_rate: 0.0,
            seed: seed + 1,
            ..DetectorNoise::default()
        },
    }
}

#[test]
fn gaussian_jitter_std_recovered_within_five_percent() {
    for sigma in [0.5, 1.0, 1.5] {
        let (gt, dets) = simulate_dataset(&config(220, JitterModel::GaussianIsotropic { sigma }, 31)).unwrap();
        let pairs = match_dataset(&gt.annotations, &dets, &MatchConfig::default()).unwrap();
        assert!(pairs.len() >= 10_000);
        let s = collect_jitter(&pairs).summary().unwrap();
        for std in [s.std_dx, s.std_dy] {
            assert!((std / sigma - 1.0).abs() < 0.05, "sigma {sigma}: recovered {std}");
        }
    }
}

#[test]
fn deterministic_jitter_recovered_exactly() {
    let (gt, dets) = simulate_dataset(&config(5, JitterModel::Deterministic { dx: 1.0, dy: 1.0 }, 3)).unwrap();
    let pairs = match_dataset(&gt.annotations, &dets, &MatchConfig::default()).unwrap();
    assert_eq!(pairs.len(), gt.annotations.len());
    let s = collect_jitter(&pairs).summary().unwrap();
    assert!((s.mean_abs_dx - 1.0).abs() < 1e-9 && (s.mean_abs_dy - 1.0).abs() < 1e-9);
}

#[test]
fn optimized_size_not_worse_than_gt_size() {
    for sigma in [0.5, 1.0, 1.5] {
        let (gt, dets) = simulate_dataset(&config(40, JitterModel::GaussianIsotropic { sigma }, 77)).unwrap();
        let pairs = match_dataset(&gt.annotations, &dets, &MatchConfig::default()).unwrap();
        let model = JitterModel::from(collect_jitter(&pairs));
        let opt = optimize_size(100.0, &model, &OptimizeConfig::for_gt_side(100.0)).unwrap();
        let sweep = sweep_size_vs_map(&gt, &dets, &[100.0, opt.s_star], &EvalConfig::default()).unwrap();
        let (at_gt, at_star) = (sweep[0].map, sweep[1].map);
        assert!(at_star >= at_gt - 1e-6, "sigma {sigma}: S* {} gives {at_star} < {at_gt}", opt.s_star);
    }
}

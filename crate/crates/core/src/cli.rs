//! `centerbox` command-line front end.
//!
//! Every subcommand reads files and flags, writes files, and prints a short
//! human-readable summary. Settings resolve as flag, then config file
//! (`--config`, TOML or JSON), then built-in defaults; the effective settings
//! are echoed into each output record under `config`.
//!
//! Exit codes: 0 success, 1 usage error, 2 input contract violation,
//! 3 internal failure (for example an unwritable output path).

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::annotation::{Detection, GtDataset};
use crate::augment::{crop_annotations, plan_tiles, CropRecord, CropWindow};
use crate::boxopt::{optimize_size, JitterModel, OptimizeConfig, SizeOptimizationResult};
use crate::error::{Error, Result};
use crate::eval::{evaluate, sweep_size_vs_map, EvalConfig};
use crate::geometry::DEFAULT_GT_SIDE;
use crate::io::{
    jitter_records_text, read_jitter_records, read_json, read_text, to_json_string, write_json, write_text,
    JitterRecord,
};
use crate::matching::{collect_jitter, match_dataset, EmpiricalJitter, MatchConfig, MatchStrategy};
use crate::postprocess::apply_fixed_size;
use crate::simdet::{simulate_dataset, ObjectCount, SimulationConfig};

#[derive(Debug, Parser)]
#[command(name = "centerbox", version, about = "Fixed-size box optimization for center-point detectors")]
pub struct Cli {
    /// Ground-truth box side G in pixels [default: 100]
    #[arg(long, global = true)]
    pub gt_side: Option<f64>,

    /// Settings file (TOML, or JSON when the name ends in .json)
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Match detections to ground truth and export center offsets
    Match(MatchArgs),
    /// Find the box side maximizing expected IoU under a jitter model
    OptimizeSize(OptimizeArgs),
    /// Rewrite detections as fixed-size squares around their centers
    ApplySize(ApplyArgs),
    /// COCO-style mAP of detections against ground truth
    Evaluate(EvaluateArgs),
    /// mAP as a function of the reconstructed box side
    Sweep(SweepArgs),
    /// Center-preserving crop of annotations into windows or tiles
    Crop(CropArgs),
    /// Simulate a scene set and a noisy detector
    Simulate(SimulateArgs),
}

#[derive(Debug, Args)]
pub struct MatchArgs {
    #[arg(long)]
    pub gt: PathBuf,
    #[arg(long)]
    pub dets: PathBuf,
    /// Largest center distance that still counts as a match [default: G/2]
    #[arg(long)]
    pub max_distance: Option<f64>,
    /// greedy or optimal
    #[arg(long)]
    pub strategy: Option<MatchStrategy>,
    /// Match record (JSON)
    #[arg(long)]
    pub out: PathBuf,
    /// Jitter samples, one JSON record per line
    #[arg(long)]
    pub jitter_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct JitterSource {
    /// Jitter samples file written by `match`
    #[arg(long)]
    pub jitter: Option<PathBuf>,
    /// Fixed offset magnitudes
    #[arg(long, num_args = 2, value_names = ["DX", "DY"], allow_negative_numbers = true)]
    pub deterministic: Option<Vec<f64>>,
    /// Isotropic Gaussian jitter with this per-axis sigma
    #[arg(long, value_name = "SIGMA", allow_negative_numbers = true)]
    pub gaussian: Option<f64>,
    /// Radius uniform on [LO, HI], uniform direction
    #[arg(long, num_args = 2, value_names = ["LO", "HI"], allow_negative_numbers = true)]
    pub uniform: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
pub struct OptimizeArgs {
    #[command(flatten)]
    pub source: JitterSource,
    #[arg(long)]
    pub s_min: Option<f64>,
    #[arg(long)]
    pub s_max: Option<f64>,
    #[arg(long)]
    pub step: Option<f64>,
    #[arg(long)]
    pub tol: Option<f64>,
    /// Result record (JSON); printed to stdout when omitted
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Two-column `S E[IoU]` curve
    #[arg(long)]
    pub curve: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct SizeSource {
    #[arg(long, allow_negative_numbers = true)]
    pub size: Option<f64>,
    /// Result record written by `optimize-size`
    #[arg(long)]
    pub result: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ApplyArgs {
    #[arg(long)]
    pub dets: PathBuf,
    #[command(flatten)]
    pub size: SizeSource,
    /// Clip boxes to a W x H image
    #[arg(long, num_args = 2, value_names = ["W", "H"])]
    pub clip: Option<Vec<f64>>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Pool all classes (detection-only scoring)
    #[arg(long)]
    pub class_agnostic: bool,
    /// Comma-separated IoU thresholds [default: 0.50:0.05:0.95]
    #[arg(long, value_delimiter = ',')]
    pub iou_thresholds: Option<Vec<f64>>,
    #[arg(long)]
    pub max_dets: Option<usize>,
    /// Interpolated recall points; 0 selects all-point AP [default: 101]
    #[arg(long)]
    pub recall_points: Option<usize>,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub gt: PathBuf,
    #[arg(long)]
    pub dets: PathBuf,
    #[command(flatten)]
    pub eval: EvalArgs,
    /// Report record (JSON)
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub gt: PathBuf,
    #[arg(long)]
    pub dets: PathBuf,
    /// Comma-separated box sides
    #[arg(long, value_delimiter = ',', required = true)]
    pub sizes: Vec<f64>,
    #[command(flatten)]
    pub eval: EvalArgs,
    /// Two-column `S mAP` table
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[group(id = "crop_mode", required = true, multiple = false)]
pub struct CropMode {
    /// Explicit window applied to every image
    #[arg(long, num_args = 4, value_names = ["X_MIN", "X_MAX", "Y_MIN", "Y_MAX"], allow_negative_numbers = true)]
    pub window: Option<Vec<f64>>,
    /// Tile each image with W x H windows
    #[arg(long, num_args = 2, value_names = ["W", "H"])]
    pub tile: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
pub struct CropArgs {
    #[arg(long)]
    pub gt: PathBuf,
    #[command(flatten)]
    pub mode: CropMode,
    /// Tile overlap in pixels [default: G]
    #[arg(long)]
    pub overlap: Option<f64>,
    /// Keep boxes that protrude past the window
    #[arg(long)]
    pub no_clip: bool,
    /// Only this image
    #[arg(long)]
    pub image: Option<u64>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub images: Option<usize>,
    /// Scene seed; the detector uses seed + 1
    #[arg(long)]
    pub seed: Option<u64>,
    /// Objects per image
    #[arg(long)]
    pub objects: Option<usize>,
    /// Isotropic Gaussian jitter sigma
    #[arg(long)]
    pub sigma: Option<f64>,
    #[arg(long)]
    pub miss_rate: Option<f64>,
    /// Expected false positives per image
    #[arg(long)]
    pub fp_rate: Option<f64>,
    #[arg(long)]
    pub out_gt: PathBuf,
    #[arg(long)]
    pub out_dets: PathBuf,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct MatchingSection {
    max_center_distance: Option<f64>,
    strategy: Option<MatchStrategy>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct OptimizeSection {
    s_min: Option<f64>,
    s_max: Option<f64>,
    grid_step: Option<f64>,
    refine_tol: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct EvaluateSection {
    iou_thresholds: Option<Vec<f64>>,
    class_agnostic: Option<bool>,
    max_dets_per_image: Option<usize>,
    recall_points: Option<usize>,
}

/// Contents of a `--config` file. Every field is optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    gt_side: Option<f64>,
    #[serde(default)]
    matching: MatchingSection,
    #[serde(default)]
    optimize: OptimizeSection,
    #[serde(default)]
    evaluate: EvaluateSection,
    simulation: Option<SimulationConfig>,
}

fn load_config(path: &Path) -> Result<FileConfig> {
    let text = read_text(path)?;
    let malformed = |message: String| Error::Malformed { path: path.to_path_buf(), message };
    if path.extension().is_some_and(|e| e == "json") {
        serde_json::from_str(&text).map_err(|e| malformed(e.to_string()))
    } else {
        toml::from_str(&text).map_err(|e| malformed(e.message().to_string()))
    }
}

/// Resolved settings shared by the subcommands.
struct Settings {
    gt_side: f64,
    file: FileConfig,
}

impl Settings {
    fn resolve(cli: &Cli) -> Result<Self> {
        let file = match &cli.config {
            Some(p) => load_config(p)?,
            None => FileConfig::default(),
        };
        let gt_side = cli.gt_side.or(file.gt_side).unwrap_or(DEFAULT_GT_SIDE);
        if !(gt_side.is_finite() && gt_side > 0.0) {
            return Err(Error::invalid(format!("--gt-side must be positive, got {gt_side}")));
        }
        Ok(Self { gt_side, file })
    }

    fn matching(&self, args: &MatchArgs) -> MatchConfig {
        let mut cfg = MatchConfig::for_gt_side(self.gt_side);
        let f = &self.file.matching;
        cfg.max_center_distance = args.max_distance.or(f.max_center_distance).unwrap_or(cfg.max_center_distance);
        cfg.strategy = args.strategy.or(f.strategy).unwrap_or(cfg.strategy);
        cfg
    }

    fn optimize(&self, args: &OptimizeArgs) -> OptimizeConfig {
        let d = OptimizeConfig::for_gt_side(self.gt_side);
        let f = &self.file.optimize;
        OptimizeConfig {
            s_min: args.s_min.or(f.s_min).unwrap_or(d.s_min),
            s_max: args.s_max.or(f.s_max).unwrap_or(d.s_max),
            grid_step: args.step.or(f.grid_step).unwrap_or(d.grid_step),
            refine_tol: args.tol.or(f.refine_tol).unwrap_or(d.refine_tol),
        }
    }

    fn eval(&self, args: &EvalArgs) -> EvalConfig {
        let d = EvalConfig::default();
        let f = &self.file.evaluate;
        EvalConfig {
            iou_thresholds: args
                .iou_thresholds
                .clone()
                .or_else(|| f.iou_thresholds.clone())
                .unwrap_or(d.iou_thresholds),
            class_agnostic: args.class_agnostic || f.class_agnostic.unwrap_or(d.class_agnostic),
            max_dets_per_image: args.max_dets.or(f.max_dets_per_image).unwrap_or(d.max_dets_per_image),
            recall_points: args.recall_points.or(f.recall_points).unwrap_or(d.recall_points),
        }
    }

    fn simulation(&self, args: &SimulateArgs) -> SimulationConfig {
        let mut cfg = self.file.simulation.clone().unwrap_or_default();
        cfg.scene.gt_side = self.gt_side;
        if let Some(n) = args.images {
            cfg.n_images = n;
        }
        if let Some(seed) = args.seed {
            cfg.scene.seed = seed;
            cfg.noise.seed = seed.wrapping_add(1);
        }
        if let Some(n) = args.objects {
            cfg.scene.n_objects = ObjectCount::Count(n);
        }
        if let Some(sigma) = args.sigma {
            cfg.noise.jitter = JitterModel::GaussianIsotropic { sigma };
        }
        if let Some(m) = args.miss_rate {
            cfg.noise.miss_rate = m;
        }
        if let Some(r) = args.fp_rate {
            cfg.noise.false_positive_rate = r;
        }
        cfg
    }
}

/// Record written by `optimize-size`.
#[derive(Debug, Serialize, Deserialize)]
pub struct OptimizeRecord {
    pub config: serde_json::Value,
    pub result: SizeOptimizationResult,
}

fn read_gt(path: &Path) -> Result<GtDataset> {
    let gt: GtDataset = read_json(path)?;
    gt.validate().map_err(|e| Error::Malformed { path: path.to_path_buf(), message: e.to_string() })?;
    Ok(gt)
}

fn read_dets(path: &Path) -> Result<Vec<Detection>> {
    read_json(path)
}

fn run_match(s: &Settings, args: &MatchArgs, out: &mut dyn Write) -> Result<()> {
    let cfg = s.matching(args);
    let gt = read_gt(&args.gt)?;
    let dets = read_dets(&args.dets)?;
    let pairs = match_dataset(&gt.annotations, &dets, &cfg)?;
    let summary = collect_jitter(&pairs).summary();
    let record = json!({
        "config": { "gt_side": s.gt_side, "matching": cfg },
        "summary": summary,
        "pairs": pairs,
    });
    write_json(&args.out, &record)?;
    if let Some(path) = &args.jitter_out {
        let recs: Vec<JitterRecord> = pairs.iter().map(JitterRecord::from).collect();
        write_text(path, &jitter_records_text(&recs))?;
    }
    report(out, format!("matched {} of {} ground-truth objects", pairs.len(), gt.annotations.len()));
    if let Some(sm) = summary {
        report(
            out,
            format!(
                "mean |dx| {:.4}  mean |dy| {:.4}  std dx {:.4}  std dy {:.4}  mean radial {:.4}",
                sm.mean_abs_dx, sm.mean_abs_dy, sm.std_dx, sm.std_dy, sm.mean_radial
            ),
        );
    }
    Ok(())
}

fn jitter_model(src: &JitterSource) -> Result<(JitterModel, serde_json::Value)> {
    if let Some(path) = &src.jitter {
        let recs = read_jitter_records(path)?;
        let emp = EmpiricalJitter::new(recs.iter().map(JitterRecord::offset).collect());
        let summary = emp.summary();
        return Ok((JitterModel::from(emp), json!(summary)));
    }
    let model = if let Some(d) = &src.deterministic {
        JitterModel::Deterministic { dx: d[0], dy: d[1] }
    } else if let Some(sigma) = src.gaussian {
        JitterModel::GaussianIsotropic { sigma }
    } else if let Some(u) = &src.uniform {
        JitterModel::UniformRadial { lo: u[0], hi: u[1] }
    } else {
        return Err(Error::invalid("one jitter source is required"));
    };
    Ok((model, serde_json::Value::Null))
}

fn run_optimize(s: &Settings, args: &OptimizeArgs, out: &mut dyn Write) -> Result<()> {
    let cfg = s.optimize(args);
    let (model, summary) = jitter_model(&args.source)?;
    let result = optimize_size(s.gt_side, &model, &cfg)?;
    let mut config = json!({ "gt_side": s.gt_side, "optimize": cfg, "jitter_model": model.describe() });
    if !summary.is_null() {
        config["jitter_summary"] = summary;
    }
    if let Some(path) = &args.curve {
        write_text(path, &result.curve_text())?;
    }
    let record = OptimizeRecord { config, result };
    match &args.out {
        Some(path) => {
            write_json(path, &record)?;
            report(
                out,
                format!(
                    "S* = {}  E[IoU] = {:.6}  ({})",
                    record.result.s_star,
                    record.result.expected_iou_at_star,
                    model.describe()
                ),
            );
        }
        None => report(out, to_json_string(&record).trim_end().to_string()),
    }
    Ok(())
}

fn run_apply(args: &ApplyArgs, out: &mut dyn Write) -> Result<()> {
    let side = match (&args.size.size, &args.size.result) {
        (Some(s), _) => *s,
        (None, Some(path)) => read_json::<OptimizeRecord>(path)?.result.s_star,
        (None, None) => return Err(Error::invalid("--size or --result is required")),
    };
    let clip = args.clip.as_ref().map(|c| (c[0], c[1]));
    let dets = read_dets(&args.dets)?;
    let sized = apply_fixed_size(&dets, side, clip)?;
    write_json(&args.out, &sized)?;
    report(out, format!("wrote {} detections with {side} x {side} boxes", sized.len()));
    Ok(())
}

fn run_evaluate(s: &Settings, args: &EvaluateArgs, out: &mut dyn Write) -> Result<()> {
    let cfg = s.eval(&args.eval);
    let gt = read_gt(&args.gt)?;
    let dets = read_dets(&args.dets)?;
    let report_ = evaluate(&gt, &dets, &cfg)?;
    if let Some(path) = &args.out {
        write_json(path, &json!({ "config": { "evaluate": cfg }, "report": report_ }))?;
    }
    report(out, report_.table().trim_end().to_string());
    Ok(())
}

fn run_sweep(s: &Settings, args: &SweepArgs, out: &mut dyn Write) -> Result<()> {
    let cfg = s.eval(&args.eval);
    let gt = read_gt(&args.gt)?;
    let dets = read_dets(&args.dets)?;
    let points = sweep_size_vs_map(&gt, &dets, &args.sizes, &cfg)?;
    let table: String = points.iter().map(|p| format!("{} {}\n", p.size, p.map)).collect();
    if let Some(path) = &args.out {
        write_text(path, &table)?;
    }
    report(out, "size mAP".to_string());
    for p in &points {
        report(out, format!("{:<8} {:.6}", p.size, p.map));
    }
    Ok(())
}

fn run_crop(s: &Settings, args: &CropArgs, out: &mut dyn Write) -> Result<()> {
    let gt = read_gt(&args.gt)?;
    let clip = !args.no_clip;
    let overlap = args.overlap.unwrap_or(s.gt_side);
    let images: Vec<_> = gt.images.iter().filter(|i| args.image.is_none_or(|id| id == i.id)).collect();
    if let Some(id) = args.image.filter(|_| images.is_empty()) {
        return Err(Error::invalid(format!("--image {id} is not in the ground truth")));
    }
    let mut tiles = Vec::new();
    for img in images {
        let anns: Vec<_> = gt.annotations.iter().filter(|a| a.image_id == img.id).cloned().collect();
        let windows = match (&args.mode.window, &args.mode.tile) {
            (Some(w), _) => vec![CropWindow::new(w[0], w[1], w[2], w[3])?],
            (None, Some(t)) => plan_tiles((img.width, img.height), (t[0], t[1]), overlap)?,
            (None, None) => return Err(Error::invalid("--window or --tile is required")),
        };
        for window in windows {
            let annotations = crop_annotations(&anns, &window, clip);
            tiles.push(CropRecord { image_id: img.id, window, annotations });
        }
    }
    let mode = if args.mode.window.is_some() {
        json!({ "window": args.mode.window })
    } else {
        json!({ "tile": args.mode.tile, "overlap": overlap })
    };
    let kept: usize = tiles.iter().map(|t| t.annotations.len()).sum();
    write_json(
        &args.out,
        &json!({ "config": { "gt_side": s.gt_side, "clip_boxes": clip, "mode": mode }, "tiles": tiles }),
    )?;
    report(out, format!("{} windows, {kept} retained annotations", tiles.len()));
    Ok(())
}

fn run_simulate(s: &Settings, args: &SimulateArgs, out: &mut dyn Write) -> Result<()> {
    let cfg = s.simulation(args);
    let (mut gt, dets) = simulate_dataset(&cfg)?;
    gt.info = Some(json!({ "generator": "centerbox simulate", "config": cfg }));
    write_json(&args.out_gt, &gt)?;
    write_json(&args.out_dets, &dets)?;
    report(out, format!("{} images, {} objects, {} detections", gt.images.len(), gt.annotations.len(), dets.len()));
    Ok(())
}

fn report(out: &mut dyn Write, line: String) {
    // stdout is informational; a closed pipe must not fail the command
    let _ = writeln!(out, "{line}");
}

/// Runs a parsed command line.
pub fn execute(cli: &Cli, out: &mut dyn Write) -> Result<()> {
    let settings = Settings::resolve(cli)?;
    match &cli.command {
        Command::Match(a) => run_match(&settings, a, out),
        Command::OptimizeSize(a) => run_optimize(&settings, a, out),
        Command::ApplySize(a) => run_apply(a, out),
        Command::Evaluate(a) => run_evaluate(&settings, a, out),
        Command::Sweep(a) => run_sweep(&settings, a, out),
        Command::Crop(a) => run_crop(&settings, a, out),
        Command::Simulate(a) => run_simulate(&settings, a, out),
    }
}

/// Parses `args` (program name first), runs the command, and returns the
/// process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{e}");
                0
            } else {
                let _ = write!(err, "{e}");
                1
            };
        }
    };
    match execute(&cli, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if e.is_input_contract() {
                2
            } else {
                3
            }
        }
    }
}

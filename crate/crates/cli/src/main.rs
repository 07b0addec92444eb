//! `depth`: stereo disparity maps from rectified image pairs.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use meshstereo_core::metric::kitti_error;
use meshstereo_core::stream::{cycle_model, run_streaming, StreamStats};
use meshstereo_core::{
    run_pipeline, DisparityMap, ExecutorKind, NoopObserver, PipelineArtifacts, PipelineConfig,
};
use rayon::prelude::*;

use meshstereo_cli::config::{downsample_from_denominator, load_config};
use meshstereo_cli::dataset::{discover_pairs, DatasetPair};
use meshstereo_cli::error::{CliError, Result};
use meshstereo_cli::formats::pfm::{save_disparity_pfm, save_prior_pfm};
use meshstereo_cli::formats::pgm::{load_pgm, save_disparity_pgm8};
use meshstereo_cli::formats::png16::{load_gt_png16, save_disparity_png16};
use meshstereo_cli::report::{bench_json, eval_csv, sweep_csv, EvalRow, SweepRow};
use meshstereo_cli::timing::StageTimer;

#[derive(Parser)]
#[command(
    name = "depth",
    version,
    about = "Stereo disparity engine with mesh-based priors",
    after_help = "With no subcommand, -l, -r and -o compute one disparity map.\n\
                  The output format follows the extension: .png writes 16-bit\n\
                  fixed point (value = disparity * 256), .pgm an 8-bit scaled\n\
                  map, .pfm 32-bit floats."
)]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,

    /// Left image (8-bit PGM)
    #[arg(short = 'l', long, value_name = "FILE")]
    left: Option<PathBuf>,

    /// Right image (8-bit PGM)
    #[arg(short = 'r', long, value_name = "FILE")]
    right: Option<PathBuf>,

    /// Output disparity map (.png, .pgm, or .pfm)
    #[arg(short = 'o', long, value_name = "FILE")]
    output: Option<PathBuf>,

    /// Pipeline configuration file (key=value lines)
    #[arg(short = 'c', long, value_name = "FILE", global = true)]
    config: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate over a dataset with ground truth; writes per-image CSV
    Eval {
        /// Directory with image_2/image_3 (KITTI) or left/right subdirs
        #[arg(long, value_name = "DIR")]
        dataset: PathBuf,
        /// Ground-truth directory of 16-bit PNGs (overrides autodetection)
        #[arg(long, value_name = "DIR")]
        gt: Option<PathBuf>,
        /// Write the CSV here instead of stdout
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Sweep window and downsample settings over a dataset
    Sweep {
        #[arg(long, value_name = "DIR")]
        dataset: PathBuf,
        #[arg(long, value_name = "DIR")]
        gt: Option<PathBuf>,
        /// Support census windows to try
        #[arg(long, value_delimiter = ',', default_value = "7,9,11,13")]
        windows: Vec<usize>,
        /// Dense census windows to try
        #[arg(long, value_delimiter = ',', default_value = "3,5,7")]
        dense: Vec<usize>,
        /// Support downsample denominators to try
        #[arg(long, value_delimiter = ',', default_value = "1,8,32")]
        downsample: Vec<u32>,
        /// Write the CSV here instead of stdout
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Time the pipeline on one pair; writes a JSON report
    Bench {
        #[arg(short = 'l', long, value_name = "FILE")]
        left: PathBuf,
        #[arg(short = 'r', long, value_name = "FILE")]
        right: PathBuf,
        /// Executor to time
        #[arg(long, value_enum, default_value_t = ExecutorArg::Batch)]
        executor: ExecutorArg,
        /// Frames in flight for the streaming executor (1 or 2)
        #[arg(long, default_value_t = 1)]
        frames_in_flight: u8,
        /// Timed iterations
        #[arg(long, default_value_t = 5)]
        iterations: usize,
        /// Untimed warm-up iterations
        #[arg(long, default_value_t = 1)]
        warmup: usize,
        /// Write the JSON here instead of stdout
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Dump one pipeline intermediate to a file
    Inspect {
        #[arg(short = 'l', long, value_name = "FILE")]
        left: PathBuf,
        #[arg(short = 'r', long, value_name = "FILE")]
        right: PathBuf,
        /// Which intermediate to dump
        #[arg(long, value_enum)]
        stage: InspectStage,
        /// Output file (CSV for support/filtered/grid, OBJ-like text for
        /// mesh, PFM for prior)
        #[arg(short = 'o', long, value_name = "FILE")]
        output: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ExecutorArg {
    Batch,
    Stream,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum InspectStage {
    /// Support points after matching and redundancy filtering
    Support,
    /// Support points after consistency filtering and downsampling
    Filtered,
    /// Per-cell candidate masks as cx,cy,hex rows
    Grid,
    /// Triangulated support mesh
    Mesh,
    /// Rasterized plane prior
    Prior,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("depth: {e}");
            match e {
                CliError::Usage(_) => ExitCode::from(2),
                _ => ExitCode::FAILURE,
            }
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let cfg = match &cli.config {
        Some(path) => load_config(path)?,
        None => PipelineConfig::default(),
    };
    match cli.command {
        None => {
            let (left, right, output) = match (cli.left, cli.right, cli.output) {
                (Some(l), Some(r), Some(o)) => (l, r, o),
                _ => {
                    return Err(CliError::Usage(
                        "expected -l LEFT -r RIGHT -o OUT (or a subcommand; see --help)".into(),
                    ))
                }
            };
            run_default(&left, &right, &output, cfg)
        }
        Some(Command::Eval { dataset, gt, out }) => run_eval(&dataset, gt.as_deref(), out, cfg),
        Some(Command::Sweep {
            dataset,
            gt,
            windows,
            dense,
            downsample,
            out,
        }) => run_sweep(&dataset, gt.as_deref(), &windows, &dense, &downsample, out, cfg),
        Some(Command::Bench {
            left,
            right,
            executor,
            frames_in_flight,
            iterations,
            warmup,
            out,
        }) => run_bench(
            &left,
            &right,
            executor,
            frames_in_flight,
            iterations,
            warmup,
            out,
            cfg,
        ),
        Some(Command::Inspect {
            left,
            right,
            stage,
            output,
        }) => run_inspect(&left, &right, stage, &output, cfg),
    }
}

/// Runs the pipeline once and reports the artifacts plus a mesh-fallback
/// warning on degenerate support sets.
fn compute(left: &Path, right: &Path, cfg: &PipelineConfig) -> Result<PipelineArtifacts> {
    let l = load_pgm(left)?;
    let r = load_pgm(right)?;
    let art = run_pipeline(&l, &r, cfg, &mut NoopObserver)?;
    if art.mesh.is_none() {
        eprintln!(
            "depth: warning: support set of {} cannot be triangulated; \
             dense matching fell back to grid vectors alone",
            left.display()
        );
    }
    Ok(art)
}

fn save_map(path: &Path, map: &DisparityMap, cfg: &PipelineConfig) -> Result<()> {
    match path.extension().and_then(|e| e.to_str()) {
        Some("png") => save_disparity_png16(path, map),
        Some("pgm") => save_disparity_pgm8(path, map, cfg.dense.disparity_range),
        Some("pfm") => save_disparity_pfm(path, map),
        _ => Err(CliError::Usage(format!(
            "cannot infer output format of {} (use .png, .pgm, or .pfm)",
            path.display()
        ))),
    }
}

fn run_default(left: &Path, right: &Path, output: &Path, cfg: PipelineConfig) -> Result<()> {
    let art = compute(left, right, &cfg)?;
    save_map(output, &art.map, &cfg)?;
    let total = art.map.width() * art.map.height();
    println!(
        "wrote {} ({} of {} pixels valid)",
        output.display(),
        art.map.valid_count(),
        total
    );
    Ok(())
}

fn write_text_or_stdout(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => {
            std::fs::write(path, text).map_err(|e| CliError::Io(path.to_path_buf(), e))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Runs one dataset pair and measures it against its ground truth.
fn eval_pair(pair: &DatasetPair, cfg: &PipelineConfig) -> Result<(EvalRow, f64)> {
    let gt_path = pair.gt.as_deref().ok_or_else(|| {
        CliError::Usage(format!("no ground truth for image {}", pair.name))
    })?;
    let gt = load_gt_png16(gt_path)?;
    let start = std::time::Instant::now();
    let art = compute(&pair.left, &pair.right, cfg)?;
    let ms = start.elapsed().as_secs_f64() * 1e3;
    let stats = kitti_error(&art.map, &gt)?;
    Ok((
        EvalRow {
            name: pair.name.clone(),
            bad_pct: stats.error_rate() * 100.0,
            bad_pct_all: stats.error_rate_all() * 100.0,
            density_pct: stats.density() * 100.0,
            compared: stats.compared,
        },
        ms,
    ))
}

fn run_eval(
    dataset: &Path,
    gt: Option<&Path>,
    out: Option<PathBuf>,
    cfg: PipelineConfig,
) -> Result<()> {
    let pairs = discover_pairs(dataset, gt)?;
    let mut rows = Vec::new();
    for pair in &pairs {
        match eval_pair(pair, &cfg) {
            Ok((row, _)) => rows.push(row),
            Err(e) => eprintln!("depth: {}: {e} (skipped)", pair.name),
        }
    }
    if rows.is_empty() {
        return Err(CliError::Usage(
            "no image evaluated successfully (is ground truth present?)".into(),
        ));
    }
    let mean = rows.iter().map(|r| r.bad_pct).sum::<f64>() / rows.len() as f64;
    write_text_or_stdout(out.as_deref(), &eval_csv(&rows))?;
    eprintln!("mean bad-pixel rate {:.2}% over {} images", mean, rows.len());
    Ok(())
}

fn run_sweep(
    dataset: &Path,
    gt: Option<&Path>,
    windows: &[usize],
    dense: &[usize],
    downsample: &[u32],
    out: Option<PathBuf>,
    base: PipelineConfig,
) -> Result<()> {
    let pairs = discover_pairs(dataset, gt)?;
    let mut rows = Vec::new();
    for &w in windows {
        for &wd in dense {
            for &ds in downsample {
                let mut cfg = base;
                cfg.sparse.window = w;
                cfg.dense.window = wd;
                cfg.sparse.downsample = downsample_from_denominator(ds).ok_or_else(|| {
                    CliError::Usage(format!(
                        "bad downsample {ds} (want 1, 2, 4, 8, 16, or 32)"
                    ))
                })?;
                // Images are independent; per-image failures only cost
                // that image. Collecting in pair order keeps the report
                // independent of the worker count.
                let results: Vec<_> = pairs
                    .par_iter()
                    .map(|pair| (pair, eval_pair(pair, &cfg)))
                    .collect();
                let mut oks = Vec::new();
                for (pair, res) in results {
                    match res {
                        Ok(v) => oks.push(v),
                        Err(e) => eprintln!(
                            "depth: {w}x{wd} 1/{ds}: {}: {e} (skipped)",
                            pair.name
                        ),
                    }
                }
                if oks.is_empty() {
                    eprintln!("depth: {w}x{wd} 1/{ds}: no image succeeded, row skipped");
                    continue;
                }
                let n = oks.len() as f64;
                rows.push(SweepRow {
                    sparse_window: w,
                    dense_window: wd,
                    downsample: ds,
                    error_pct: oks.iter().map(|(r, _)| r.bad_pct).sum::<f64>() / n,
                    density_pct: oks.iter().map(|(r, _)| r.density_pct).sum::<f64>() / n,
                    ms_per_frame: oks.iter().map(|(_, ms)| ms).sum::<f64>() / n,
                });
            }
        }
    }
    if rows.is_empty() {
        return Err(CliError::Usage("sweep produced no rows".into()));
    }
    write_text_or_stdout(out.as_deref(), &sweep_csv(&rows))
}

#[allow(clippy::too_many_arguments)]
fn run_bench(
    left: &Path,
    right: &Path,
    executor: ExecutorArg,
    frames_in_flight: u8,
    iterations: usize,
    warmup: usize,
    out: Option<PathBuf>,
    mut cfg: PipelineConfig,
) -> Result<()> {
    cfg.executor = match executor {
        ExecutorArg::Batch => ExecutorKind::Batch,
        ExecutorArg::Stream => ExecutorKind::Streaming,
    };
    cfg.frames_in_flight = frames_in_flight;
    let l = load_pgm(left)?;
    let r = load_pgm(right)?;
    for _ in 0..warmup {
        run_pipeline(&l, &r, &cfg, &mut NoopObserver)?;
    }
    let mut timer = StageTimer::new();
    let mut stream_stats: Option<StreamStats> = None;
    for _ in 0..iterations.max(1) {
        if cfg.executor == ExecutorKind::Streaming {
            let (_, stats) = run_streaming(&l, &r, &cfg, &mut timer)?;
            stream_stats = Some(stats);
        } else {
            run_pipeline(&l, &r, &cfg, &mut timer)?;
        }
    }
    let schedule = cycle_model(l.width(), l.height(), &cfg);
    let stream = stream_stats.as_ref().map(|s| (s, &schedule));
    let report = bench_json(
        l.width(),
        l.height(),
        match executor {
            ExecutorArg::Batch => "batch",
            ExecutorArg::Stream => "stream",
        },
        frames_in_flight,
        iterations.max(1),
        warmup,
        &timer,
        stream,
    );
    let mut text = serde_json::to_string_pretty(&report).expect("report serializes");
    text.push('\n');
    write_text_or_stdout(out.as_deref(), &text)
}

fn support_csv(points: &[meshstereo_core::SupportPoint]) -> String {
    let mut out = String::from("u,v,d\n");
    for p in points {
        out.push_str(&format!("{},{},{}\n", p.u, p.v, p.d));
    }
    out
}

fn run_inspect(
    left: &Path,
    right: &Path,
    stage: InspectStage,
    output: &Path,
    cfg: PipelineConfig,
) -> Result<()> {
    let art = compute(left, right, &cfg)?;
    match stage {
        InspectStage::Support => {
            write_text_or_stdout(Some(output), &support_csv(&art.support_matched))
        }
        InspectStage::Filtered => write_text_or_stdout(Some(output), &support_csv(&art.support)),
        InspectStage::Grid => {
            let mut text = String::from("cx,cy,mask\n");
            for cy in 0..art.grid.cells_y() {
                for cx in 0..art.grid.cells_x() {
                    let words = art.grid.cell(cx, cy).words();
                    let hex: String =
                        words.iter().rev().map(|w| format!("{w:016x}")).collect();
                    text.push_str(&format!("{cx},{cy},{hex}\n"));
                }
            }
            write_text_or_stdout(Some(output), &text)
        }
        InspectStage::Mesh => {
            let mesh = art.mesh.as_ref().ok_or_else(|| {
                CliError::Usage(
                    "support set cannot be triangulated; no mesh to dump".into(),
                )
            })?;
            let mut text = String::new();
            for p in mesh.vertices() {
                text.push_str(&format!("v {} {} {}\n", p.u, p.v, p.d));
            }
            for t in mesh.triangles() {
                text.push_str(&format!("f {} {} {}\n", t[0] + 1, t[1] + 1, t[2] + 1));
            }
            write_text_or_stdout(Some(output), &text)
        }
        InspectStage::Prior => {
            let prior = art.prior.as_ref().ok_or_else(|| {
                CliError::Usage(
                    "support set cannot be triangulated; no prior to dump".into(),
                )
            })?;
            save_prior_pfm(output, prior)
        }
    }
}

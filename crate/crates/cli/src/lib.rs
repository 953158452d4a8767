//! Subcommand implementations behind the `gridbox` binary. Kept in a library
//! so integration tests can drive the exact code paths the binary runs.

use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};

use gridbox::cloud_io::{decimate_planes, read_sequence, write_sequence, FrameRecord};
use gridbox::config::{
    decimation_rule_from, eval_max_match_distance, lidar_model_from, pipeline_config_from,
    scenario_params_from, ConfigError, ConfigFile,
};
use gridbox::detect::{
    read_detections, run_detector, write_detections, DetectionFrame, Mode, PipelineConfig,
};
use gridbox::eval::{compute_error_series, write_error_csv, write_gnuplot_dat, ErrorSeries};
use gridbox::simulate::{
    generate_scenario, ground_truth_at, simulate_sequence, GroundTruthRecord, LidarModel,
    Scenario, GROUND_TRUTH_FILE,
};

/// Errors split by exit code: usage problems exit 1, data problems exit 2.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data(anyhow::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
        }
    }

    pub fn message(&self) -> String {
        match self {
            CliError::Usage(m) => m.clone(),
            CliError::Data(e) => format!("{e:#}"),
        }
    }
}

impl<E: Into<anyhow::Error>> From<E> for CliError {
    fn from(e: E) -> Self {
        CliError::Data(e.into())
    }
}

#[derive(Parser, Debug)]
#[command(name = "gridbox", about = "Oriented obstacle boxes from sparse lidar pointclouds")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate a synthetic scenario: frames plus ground_truth.csv.
    Simulate(SimulateArgs),
    /// Run the 16-plane detector over a frame directory.
    Detect16(DetectArgs),
    /// Run the 8-plane detector over a frame directory.
    Detect8(DetectArgs),
    /// Score detections against ground truth.
    Eval(EvalArgs),
    /// Simulate, detect and evaluate in one go; prints the aggregate table.
    Pipeline(PipelineArgs),
    /// Single-frame latency benchmark on a dense (~30k point) frame.
    Bench(BenchArgs),
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    /// Scenario name: approach, chicane, lap or multi_obstacle.
    #[arg(long)]
    pub scenario: String,
    /// Output directory for frame_*.csv and ground_truth.csv.
    #[arg(long)]
    pub output: PathBuf,
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Ring count override for the simulated lidar.
    #[arg(long)]
    pub rings: Option<usize>,
}

#[derive(Args, Debug)]
pub struct DetectArgs {
    /// Directory of frame_*.csv files.
    #[arg(long)]
    pub input: PathBuf,
    /// Output directory for detections.csv.
    #[arg(long)]
    pub output: PathBuf,
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Override the consensus-sampling seed from the config file.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads; any value produces byte-identical output.
    #[arg(long, default_value_t = 1)]
    pub parallel: usize,
    /// Halve the cloud's planes first (per the configured decimation rule).
    #[arg(long, default_value_t = false)]
    pub decimate: bool,
}

#[derive(Args, Debug)]
pub struct EvalArgs {
    /// Directory holding ground_truth.csv (a simulate output directory).
    #[arg(long)]
    pub input: PathBuf,
    /// Detections file produced by detect16/detect8.
    #[arg(long)]
    pub detections: PathBuf,
    /// Output directory for errors.csv and errors.dat.
    #[arg(long)]
    pub output: PathBuf,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct PipelineArgs {
    #[arg(long)]
    pub scenario: String,
    /// sixteen_plane or eight_plane.
    #[arg(long)]
    pub mode: String,
    #[arg(long)]
    pub output: PathBuf,
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub parallel: usize,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    /// sixteen_plane or eight_plane.
    #[arg(long)]
    pub mode: String,
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Timed repetitions after one warmup run.
    #[arg(long, default_value_t = 20)]
    pub repetitions: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Simulate(args) => run_simulate(&args),
        Command::Detect16(args) => run_detect(&args, Mode::SixteenPlane),
        Command::Detect8(args) => run_detect(&args, Mode::EightPlane),
        Command::Eval(args) => run_eval(&args),
        Command::Pipeline(args) => run_pipeline(&args),
        Command::Bench(args) => run_bench(&args),
    }
}

fn load_config(path: Option<&Path>) -> Result<ConfigFile, CliError> {
    match path {
        None => Ok(ConfigFile::empty()),
        Some(p) => ConfigFile::read(p).map_err(|e| match e {
            ConfigError::Io { .. } => CliError::Usage(format!("cannot read config: {e}")),
            other => CliError::Data(anyhow!(other)),
        }),
    }
}

fn parse_scenario(name: &str) -> Result<Scenario, CliError> {
    Scenario::parse(name).ok_or_else(|| {
        CliError::Usage(format!(
            "unknown scenario `{name}` (expected approach, chicane, lap or multi_obstacle)"
        ))
    })
}

fn parse_mode(name: &str) -> Result<Mode, CliError> {
    Mode::parse(name).ok_or_else(|| {
        CliError::Usage(format!("unknown mode `{name}` (expected sixteen_plane or eight_plane)"))
    })
}

fn lidar_from(cfg: &ConfigFile, rings: Option<usize>) -> Result<LidarModel, CliError> {
    let base = lidar_model_from(cfg)?;
    match rings {
        None => Ok(base),
        Some(n) => {
            let lo = *base.elevation_angles.first().unwrap();
            let hi = *base.elevation_angles.last().unwrap();
            LidarModel::uniform(
                n,
                lo,
                hi,
                base.azimuth_step,
                base.max_range,
                base.range_noise_sigma,
                base.mount_height,
            )
            .map_err(|e| CliError::Usage(e.to_string()))
        }
    }
}

/// Writes frames and ground truth for a scenario into `output`.
pub fn run_simulate(args: &SimulateArgs) -> Result<(), CliError> {
    let cfg = load_config(args.config.as_deref())?;
    let scenario = parse_scenario(&args.scenario)?;
    let params = scenario_params_from(&cfg)?;
    let lidar = lidar_from(&cfg, args.rings)?;

    let scene = generate_scenario(scenario, &params)?;
    let times = params.frame_times();
    let frames = simulate_sequence(&scene, &lidar, &times, args.seed)?;
    let truths: Vec<GroundTruthRecord> = times
        .iter()
        .map(|&t| ground_truth_at(&scene, t))
        .collect::<Result<_, _>>()?;

    write_sequence(&args.output, &frames)?;
    gridbox::simulate::write_ground_truth(&args.output.join(GROUND_TRUTH_FILE), &truths)?;
    let points: usize = frames.iter().map(|f| f.cloud.len()).sum();
    println!(
        "simulated {} frames ({} points) of `{}` into {}",
        frames.len(),
        points,
        scenario.as_str(),
        args.output.display()
    );
    Ok(())
}

/// Detects every frame, optionally in parallel. Chunked by worker with the
/// results joined in frame order, so thread count never changes the output.
pub fn detect_frames(
    frames: &[FrameRecord],
    config: &PipelineConfig,
    parallel: usize,
) -> Vec<DetectionFrame> {
    if parallel <= 1 || frames.len() <= 1 {
        return frames.iter().map(|f| run_detector(&f.cloud, config)).collect();
    }
    let chunk_size = frames.len().div_ceil(parallel);
    let mut results: Vec<Vec<DetectionFrame>> = Vec::new();
    std::thread::scope(|scope| {
        let handles: Vec<_> = frames
            .chunks(chunk_size)
            .map(|chunk| {
                scope.spawn(move || {
                    chunk.iter().map(|f| run_detector(&f.cloud, config)).collect::<Vec<_>>()
                })
            })
            .collect();
        for h in handles {
            results.push(h.join().expect("detector worker panicked"));
        }
    });
    results.into_iter().flatten().collect()
}

pub fn run_detect(args: &DetectArgs, mode: Mode) -> Result<(), CliError> {
    let cfg = load_config(args.config.as_deref())?;
    let mut pipeline = pipeline_config_from(&cfg, mode)?;
    if let Some(seed) = args.seed {
        pipeline.ransac.rng_seed = seed;
    }

    let mut frames = read_sequence(&args.input)?;
    if args.decimate {
        let rule = decimation_rule_from(&cfg)?;
        for frame in &mut frames {
            frame.cloud = decimate_planes(&frame.cloud, |r| rule.keeps(r))?;
        }
    }
    let started = Instant::now();
    let detections = detect_frames(&frames, &pipeline, args.parallel.max(1));
    let elapsed = started.elapsed();

    std::fs::create_dir_all(&args.output)
        .with_context(|| format!("creating {}", args.output.display()))?;
    let out = args.output.join("detections.csv");
    write_detections(&out, &detections)?;
    let boxes: usize = detections.iter().map(|d| d.detections.len()).sum();
    println!(
        "{} on {} frames: {} boxes in {:.2} s ({:.1} ms/frame) -> {}",
        mode.as_str(),
        detections.len(),
        boxes,
        elapsed.as_secs_f64(),
        1e3 * elapsed.as_secs_f64() / detections.len().max(1) as f64,
        out.display()
    );
    Ok(())
}

/// Pairs truth records with detection frames by timestamp; a truth frame
/// with no detections at its timestamp counts all its obstacles as misses.
pub fn pair_truth_detections(
    truths: &[GroundTruthRecord],
    detections: &[DetectionFrame],
) -> Vec<(GroundTruthRecord, DetectionFrame)> {
    let mut sorted: Vec<&DetectionFrame> = detections.iter().collect();
    sorted.sort_by(|a, b| a.timestamp.total_cmp(&b.timestamp));
    let mut truths_sorted: Vec<GroundTruthRecord> = truths.to_vec();
    truths_sorted.sort_by(|a, b| a.timestamp.total_cmp(&b.timestamp));

    truths_sorted
        .into_iter()
        .map(|truth| {
            let frame = sorted
                .iter()
                .find(|f| (f.timestamp - truth.timestamp).abs() <= 1e-6)
                .map(|f| (*f).clone())
                .unwrap_or(DetectionFrame { timestamp: truth.timestamp, detections: Vec::new() });
            (truth, frame)
        })
        .collect()
}

fn print_series_summary(series: &ErrorSeries) {
    println!("rows (truth obstacles x frames)  {}", series.rows.len());
    println!("matched                          {}", series.matched_count);
    println!("misses                           {}", series.miss_count);
    println!("mean |distance error|            {:.3} m", series.mean_abs_distance_error);
    println!("mean |heading error|             {:.3} deg", series.mean_abs_heading_error_deg);
    println!("mean signed heading error        {:.3} deg", series.mean_signed_heading_error_deg);
}

fn eval_series(
    cfg: &ConfigFile,
    truth_path: &Path,
    detections_path: &Path,
    output: &Path,
) -> Result<ErrorSeries, CliError> {
    let truths = gridbox::simulate::read_ground_truth(truth_path)?;
    let detections = read_detections(detections_path)?;
    let pairs = pair_truth_detections(&truths, &detections);
    let series = compute_error_series(&pairs, eval_max_match_distance(cfg)?)?;
    std::fs::create_dir_all(output).with_context(|| format!("creating {}", output.display()))?;
    write_error_csv(&output.join("errors.csv"), &series)?;
    write_gnuplot_dat(&output.join("errors.dat"), &series)?;
    Ok(series)
}

pub fn run_eval(args: &EvalArgs) -> Result<(), CliError> {
    let cfg = load_config(args.config.as_deref())?;
    let truth_path = args.input.join(GROUND_TRUTH_FILE);
    let series = eval_series(&cfg, &truth_path, &args.detections, &args.output)?;
    print_series_summary(&series);
    Ok(())
}

/// simulate -> detect -> eval, everything under `output`.
pub fn run_pipeline(args: &PipelineArgs) -> Result<(), CliError> {
    let mode = parse_mode(&args.mode)?;
    let frames_dir = args.output.join("frames");
    run_simulate(&SimulateArgs {
        scenario: args.scenario.clone(),
        output: frames_dir.clone(),
        config: args.config.clone(),
        seed: args.seed,
        rings: None,
    })?;
    run_detect(
        &DetectArgs {
            input: frames_dir.clone(),
            output: args.output.clone(),
            config: args.config.clone(),
            seed: None,
            parallel: args.parallel,
            decimate: mode == Mode::EightPlane,
        },
        mode,
    )?;
    let cfg = load_config(args.config.as_deref())?;
    let series = eval_series(
        &cfg,
        &frames_dir.join(GROUND_TRUTH_FILE),
        &args.output.join("detections.csv"),
        &args.output,
    )?;
    println!("--- {} on `{}` ---", mode.as_str(), args.scenario);
    print_series_summary(&series);
    Ok(())
}

/// The benchmark workload: a deliberately heavy frame of roughly 30k points
/// (multi-obstacle scene, halved azimuth step, enough range for the
/// shallowest ground ring).
pub fn build_bench_frame(cfg: &ConfigFile, seed: u64) -> Result<FrameRecord, CliError> {
    let params = scenario_params_from(cfg)?;
    let scene = generate_scenario(Scenario::MultiObstacle, &params)?;
    let base = lidar_model_from(cfg)?;
    let lidar = LidarModel::new(
        base.elevation_angles.clone(),
        base.azimuth_step / 2.0,
        base.max_range.max(120.0),
        base.range_noise_sigma,
        base.mount_height,
    )?;
    Ok(gridbox::simulate::raycast_frame(&scene, &lidar, 1.0, seed)?)
}

/// Times single-threaded detection on the benchmark frame.
pub fn run_bench(args: &BenchArgs) -> Result<(), CliError> {
    let mode = parse_mode(&args.mode)?;
    let cfg = load_config(args.config.as_deref())?;
    let pipeline = pipeline_config_from(&cfg, mode)?;
    let frame = build_bench_frame(&cfg, args.seed)?;
    println!("benchmark frame: {} points, mode {}", frame.cloud.len(), mode.as_str());

    let reps = args.repetitions.max(1);
    run_detector(&frame.cloud, &pipeline); // warmup
    let mut total = 0.0;
    let mut best = f64::INFINITY;
    for _ in 0..reps {
        let started = Instant::now();
        let out = run_detector(&frame.cloud, &pipeline);
        let dt = started.elapsed().as_secs_f64();
        total += dt;
        best = best.min(dt);
        std::hint::black_box(out);
    }
    println!(
        "latency over {} runs: mean {:.2} ms, best {:.2} ms (single thread)",
        reps,
        1e3 * total / reps as f64,
        1e3 * best
    );
    Ok(())
}

//! `mcbe`: segment video, extract complexity features, train VMAF
//! predictors, prune redundant ladder rungs and account the saved energy.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error (malformed or
//! inconsistent inputs), 3 I/O error.

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use mcbe_core::eliminate::{
    estimate_ladder, write_rd_csv, EliminationConfig, JndReference, OptimizedLadder,
};
use mcbe_core::energy::{report, report_json, write_report_csv, EnergyParams};
use mcbe_core::features::{
    read_features_csv, segment_features, write_features_csv, SegmentFeatures,
};
use mcbe_core::forest::{load_bank, read_training_csv, save_bank, train_bank};
use mcbe_core::ladder::{validate_ladder, LadderDoc, Rung};
use mcbe_core::playlist::master_playlist;
use mcbe_core::y4m::{segment_stream, Y4mReader};

#[derive(Parser)]
#[command(
    name = "mcbe",
    version,
    about = "Multi-codec bitrate ladder estimation and energy accounting",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Extract per-segment complexity features (E_Y, h, L_Y) from Y4M video.
    Features {
        /// Input .y4m file, or `-` for stdin. 8-bit 4:2:0 only.
        input: PathBuf,
        /// Frame rate override; required when the stream has no F tag.
        #[arg(long)]
        fps: Option<f64>,
        /// Segment duration in seconds.
        #[arg(long, default_value_t = 4.0)]
        seg_seconds: f64,
        /// Output features CSV (segment_id,E_Y,h,L_Y).
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Train per-(codec, resolution) VMAF forests from a labeled CSV.
    Train {
        /// Training CSV: segment_id,codec,width,height,bitrate_bps,E_Y,h,L_Y,vmaf.
        training: PathBuf,
        /// Training seed; same CSV and seed reproduce the bank byte for byte.
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Output model bank JSON.
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Predict VMAF for every ladder rung and prune redundant ones.
    Optimize {
        /// Ladder JSON (codecs with priorities, rungs).
        ladder: PathBuf,
        /// Features CSV from `mcbe features`.
        features: PathBuf,
        /// Model bank JSON from `mcbe train`.
        bank: PathBuf,
        /// Segment id to optimize for; required when the CSV has several.
        #[arg(long)]
        segment: Option<String>,
        /// Just-noticeable VMAF difference; rungs improving by less are dropped.
        #[arg(long, default_value_t = 6.0)]
        jnd: f64,
        /// VMAF ceiling; rungs predicted above it are dropped.
        #[arg(long, default_value_t = 94.0)]
        vmax: f64,
        /// Reference rung for the JND comparison.
        #[arg(long, value_enum, default_value_t = JndReferenceArg::LastRetained)]
        jnd_reference: JndReferenceArg,
        /// Output JSON (retained and eliminated rungs, encode plan).
        #[arg(short, long)]
        output: PathBuf,
        /// Also write an HLS master playlist of the retained rungs.
        #[arg(long)]
        playlist: Option<PathBuf>,
        /// Also write an RD CSV (codec,bitrate_bps,vmaf,retained).
        #[arg(long)]
        rd_csv: Option<PathBuf>,
    },
    /// Compare two rung sets (baseline vs optimized) in energy and storage.
    Report {
        /// Baseline: ladder JSON or an optimize output JSON.
        baseline: PathBuf,
        /// Optimized: ladder JSON or an optimize output JSON.
        optimized: PathBuf,
        /// Energy parameters JSON.
        params: PathBuf,
        /// Frame rate used for the encoding-energy term.
        #[arg(long, default_value_t = 30.0)]
        fps: f64,
        /// Output report CSV.
        #[arg(short, long)]
        output: PathBuf,
        /// Also write the report as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum JndReferenceArg {
    /// Compare against the last retained rung (closes no perceptible gaps).
    LastRetained,
    /// Compare against the previous listed rung, retained or not.
    PreviousListed,
}

impl From<JndReferenceArg> for JndReference {
    fn from(arg: JndReferenceArg) -> Self {
        match arg {
            JndReferenceArg::LastRetained => JndReference::LastRetained,
            JndReferenceArg::PreviousListed => JndReference::PreviousListed,
        }
    }
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Data(String),
    Io(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Data(m) | CliError::Io(m) => f.write_str(m),
        }
    }
}

impl From<mcbe_core::Error> for CliError {
    fn from(err: mcbe_core::Error) -> Self {
        use mcbe_core::Error;
        match &err {
            Error::Io(_) => CliError::Io(err.to_string()),
            Error::Json(e) if e.is_io() => CliError::Io(err.to_string()),
            Error::BadConfig(_) => CliError::Usage(err.to_string()),
            _ => CliError::Data(err.to_string()),
        }
    }
}

type CliResult<T> = Result<T, CliError>;

fn main() {
    std::process::exit(real_main());
}

fn real_main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };

    let result = init_thread_pool().and_then(|()| dispatch(cli));
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.code()
        }
    }
}

/// MCBE_THREADS caps worker threads for feature extraction and training.
fn init_thread_pool() -> CliResult<()> {
    let Ok(raw) = std::env::var("MCBE_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n >= 1)
        .ok_or_else(|| {
            CliError::Usage(format!(
                "MCBE_THREADS must be a positive integer, got `{raw}`"
            ))
        })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Usage(format!("cannot configure {threads} threads: {e}")))
}

fn dispatch(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Features {
            input,
            fps,
            seg_seconds,
            output,
        } => cmd_features(&input, fps, seg_seconds, &output),
        Command::Train {
            training,
            seed,
            output,
        } => cmd_train(&training, seed, &output),
        Command::Optimize {
            ladder,
            features,
            bank,
            segment,
            jnd,
            vmax,
            jnd_reference,
            output,
            playlist,
            rd_csv,
        } => cmd_optimize(
            &ladder,
            &features,
            &bank,
            segment.as_deref(),
            jnd,
            vmax,
            jnd_reference.into(),
            &output,
            playlist.as_deref(),
            rd_csv.as_deref(),
        ),
        Command::Report {
            baseline,
            optimized,
            params,
            fps,
            output,
            json,
        } => cmd_report(&baseline, &optimized, &params, fps, &output, json.as_deref()),
    }
}

fn open_input(path: &Path) -> CliResult<Box<dyn BufRead>> {
    if path.as_os_str() == "-" {
        return Ok(Box::new(BufReader::new(std::io::stdin())));
    }
    let file = File::open(path)
        .map_err(|e| CliError::Io(format!("cannot open `{}`: {e}", path.display())))?;
    Ok(Box::new(BufReader::new(file)))
}

fn create_output(path: &Path) -> CliResult<BufWriter<File>> {
    let file = File::create(path)
        .map_err(|e| CliError::Io(format!("cannot create `{}`: {e}", path.display())))?;
    Ok(BufWriter::new(file))
}

fn finish(mut writer: BufWriter<File>, path: &Path) -> CliResult<()> {
    writer
        .flush()
        .map_err(|e| CliError::Io(format!("cannot write `{}`: {e}", path.display())))
}

fn read_to_string(path: &Path) -> CliResult<String> {
    let mut text = String::new();
    open_input(path)?
        .read_to_string(&mut text)
        .map_err(|e| CliError::Io(format!("cannot read `{}`: {e}", path.display())))?;
    Ok(text)
}

fn parse_json<T: serde::de::DeserializeOwned>(path: &Path, what: &str) -> CliResult<T> {
    let text = read_to_string(path)?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Data(format!("{}: not a valid {what}: {e}", path.display())))
}

fn cmd_features(
    input: &Path,
    fps_flag: Option<f64>,
    seg_seconds: f64,
    output: &Path,
) -> CliResult<()> {
    if !(seg_seconds.is_finite() && seg_seconds > 0.0) {
        return Err(CliError::Usage(format!(
            "--seg-seconds must be positive, got {seg_seconds}"
        )));
    }
    if let Some(fps) = fps_flag {
        if !(fps.is_finite() && fps > 0.0) {
            return Err(CliError::Usage(format!("--fps must be positive, got {fps}")));
        }
    }

    let reader = Y4mReader::new(open_input(input)?).map_err(CliError::from)?;
    // An explicit flag wins over the stream header.
    let fps = fps_flag
        .or_else(|| reader.header().fps_f64())
        .ok_or_else(|| {
            CliError::Data(format!(
                "`{}` has no F tag; pass --fps",
                input.display()
            ))
        })?;

    let prefix = if input.as_os_str() == "-" {
        "stdin".to_string()
    } else {
        input
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "clip".to_string())
    };

    let mut features: Vec<SegmentFeatures> = Vec::new();
    for segment in segment_stream(reader, fps, seg_seconds, &prefix) {
        let segment = segment.map_err(CliError::from)?;
        features.push(segment_features(&segment).map_err(CliError::from)?);
    }

    let mut out = create_output(output)?;
    write_features_csv(&mut out, &features).map_err(CliError::from)?;
    finish(out, output)
}

fn cmd_train(training: &Path, seed: u64, output: &Path) -> CliResult<()> {
    let samples = read_training_csv(
        open_input(training)?,
        &training.display().to_string(),
    )
    .map_err(CliError::from)?;
    if samples.is_empty() {
        return Err(CliError::Data(format!(
            "`{}` contains no training rows",
            training.display()
        )));
    }

    let (bank, summaries) = train_bank(&samples, seed).map_err(CliError::from)?;
    let mut out = create_output(output)?;
    save_bank(&mut out, &bank).map_err(CliError::from)?;
    finish(out, output)?;

    for s in &summaries {
        println!(
            "trained {}: {} samples, training MAE {:.3}",
            s.key, s.samples, s.training_mae
        );
    }
    Ok(())
}

/// Optimize output document: the pruning outcome plus the per-codec encode
/// plan distilled from the retained set.
#[derive(Serialize)]
struct OptimizeDoc<'a> {
    segment_id: &'a str,
    config: &'a EliminationConfig,
    #[serde(flatten)]
    outcome: &'a OptimizedLadder,
    encode_plan: Vec<PlanEntry>,
}

#[derive(Serialize)]
struct PlanEntry {
    codec: String,
    representations: Vec<PlanRung>,
}

#[derive(Serialize)]
struct PlanRung {
    width: u32,
    height: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    label: Option<String>,
    bitrate_bps: u64,
}

fn encode_plan(retained: &[Rung], codec_order: &[String]) -> Vec<PlanEntry> {
    codec_order
        .iter()
        .map(|codec| PlanEntry {
            codec: codec.clone(),
            representations: retained
                .iter()
                .filter(|r| &r.codec == codec)
                .map(|r| PlanRung {
                    width: r.resolution.width,
                    height: r.resolution.height,
                    label: r.resolution.label.clone(),
                    bitrate_bps: r.bitrate_bps,
                })
                .collect(),
        })
        .collect()
}

fn select_segment<'a>(
    features: &'a [SegmentFeatures],
    wanted: Option<&str>,
    path: &Path,
) -> CliResult<&'a SegmentFeatures> {
    match wanted {
        Some(id) => features.iter().find(|f| f.segment_id == id).ok_or_else(|| {
            CliError::Data(format!(
                "segment `{id}` not found in `{}`",
                path.display()
            ))
        }),
        None if features.len() == 1 => Ok(&features[0]),
        None if features.is_empty() => Err(CliError::Data(format!(
            "`{}` contains no segments",
            path.display()
        ))),
        None => Err(CliError::Data(format!(
            "`{}` contains {} segments; pass --segment <id>",
            path.display(),
            features.len()
        ))),
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_optimize(
    ladder_path: &Path,
    features_path: &Path,
    bank_path: &Path,
    segment: Option<&str>,
    jnd: f64,
    vmax: f64,
    reference: JndReference,
    output: &Path,
    playlist: Option<&Path>,
    rd_csv: Option<&Path>,
) -> CliResult<()> {
    let config = EliminationConfig::new(jnd, vmax)
        .map_err(CliError::from)?
        .with_reference(reference);

    let doc: LadderDoc = parse_json(ladder_path, "ladder JSON")?;
    let ladder = validate_ladder(&doc).map_err(CliError::from)?;

    let features = read_features_csv(
        open_input(features_path)?,
        &features_path.display().to_string(),
    )
    .map_err(CliError::from)?;
    let features = select_segment(&features, segment, features_path)?;

    let bank = load_bank(open_input(bank_path)?).map_err(CliError::from)?;

    let optimized = estimate_ladder(&ladder, features, &bank, &config).map_err(CliError::from)?;
    let codec_order: Vec<String> = ladder.codecs().iter().map(|c| c.id.clone()).collect();

    let doc = OptimizeDoc {
        segment_id: &features.segment_id,
        config: &config,
        outcome: &optimized,
        encode_plan: encode_plan(&optimized.retained, &codec_order),
    };
    let mut out = create_output(output)?;
    serde_json::to_writer_pretty(&mut out, &doc)
        .map_err(|e| CliError::Data(format!("cannot serialize result: {e}")))?;
    out.write_all(b"\n")
        .map_err(|e| CliError::Io(format!("cannot write `{}`: {e}", output.display())))?;
    finish(out, output)?;

    if let Some(path) = playlist {
        let mut out = create_output(path)?;
        out.write_all(master_playlist(&optimized.retained, &codec_order).as_bytes())
            .map_err(|e| CliError::Io(format!("cannot write `{}`: {e}", path.display())))?;
        finish(out, path)?;
    }
    if let Some(path) = rd_csv {
        let mut out = create_output(path)?;
        write_rd_csv(&mut out, &optimized, &codec_order).map_err(CliError::from)?;
        finish(out, path)?;
    }
    Ok(())
}

/// A rung set for the report: either a full ladder document or an optimize
/// output (its `retained` array).
fn read_rung_set(path: &Path) -> CliResult<Vec<Rung>> {
    let value: serde_json::Value = parse_json(path, "JSON document")?;
    let object = value.as_object().ok_or_else(|| {
        CliError::Data(format!("{}: expected a JSON object", path.display()))
    })?;

    if object.contains_key("codecs") {
        let doc: LadderDoc = serde_json::from_value(value.clone())
            .map_err(|e| CliError::Data(format!("{}: not a valid ladder: {e}", path.display())))?;
        let ladder = validate_ladder(&doc).map_err(CliError::from)?;
        return Ok(ladder.all_rungs().cloned().collect());
    }
    if let Some(retained) = object.get("retained") {
        let rungs: Vec<Rung> = serde_json::from_value(retained.clone()).map_err(|e| {
            CliError::Data(format!("{}: bad `retained` array: {e}", path.display()))
        })?;
        return Ok(rungs);
    }
    Err(CliError::Data(format!(
        "{}: expected a ladder (with `codecs`) or an optimize output (with `retained`)",
        path.display()
    )))
}

fn cmd_report(
    baseline_path: &Path,
    optimized_path: &Path,
    params_path: &Path,
    fps: f64,
    output: &Path,
    json: Option<&Path>,
) -> CliResult<()> {
    if !(fps.is_finite() && fps > 0.0) {
        return Err(CliError::Usage(format!("--fps must be positive, got {fps}")));
    }
    let baseline = read_rung_set(baseline_path)?;
    let optimized = read_rung_set(optimized_path)?;
    let params: EnergyParams = parse_json(params_path, "energy parameters JSON")?;

    let result = report(&baseline, &optimized, &params, fps).map_err(CliError::from)?;

    let mut out = create_output(output)?;
    write_report_csv(&mut out, &result).map_err(CliError::from)?;
    finish(out, output)?;

    if let Some(path) = json {
        let mut out = create_output(path)?;
        serde_json::to_writer_pretty(&mut out, &report_json(&result))
            .map_err(|e| CliError::Data(format!("cannot serialize report: {e}")))?;
        out.write_all(b"\n")
            .map_err(|e| CliError::Io(format!("cannot write `{}`: {e}", path.display())))?;
        finish(out, path)?;
    }
    Ok(())
}

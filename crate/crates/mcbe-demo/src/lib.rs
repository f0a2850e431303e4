//! Browser bindings for the ladder-estimation pipeline.
//!
//! Three operations, each a JSON-string-in / JSON-string-out function so the
//! page needs no glue types:
//!
//! * [`analyze_segment`]: synthesize a short test clip from pattern
//!   parameters and extract its complexity features.
//! * [`optimize_ladder`]: annotate the built-in three-codec ladder with
//!   VMAF from a closed-form rate-quality surface, run both elimination
//!   steps, and account the energy deltas.
//! * [`train_and_predict`]: train a small forest on noisy samples of the
//!   same surface and sweep its predictions across bitrates.
//!
//! The rate-quality surface is a stand-in: a saturating curve whose capacity
//! grows with texture complexity and resolution, scaled per codec. It keeps
//! the demo self-contained; real deployments train on measured VMAF.
//!
//! Everything is deterministic: the same request string always produces the
//! same response string.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use wasm_bindgen::prelude::wasm_bindgen;

use mcbe_core::eliminate::{eliminate, EliminationConfig, JndReference};
use mcbe_core::energy::{report, EnergyParams};
use mcbe_core::features::segment_features;
use mcbe_core::forest::{train_forest_with, Hyperparameters, TrainingSample};
use mcbe_core::ladder::{validate_ladder, LadderDoc, MultiCodecLadder};
use mcbe_core::playlist::master_playlist;
use mcbe_core::y4m::{Frame, Segment};

/// The example ladder and energy parameters shipped with the CLI, embedded
/// so the wasm module has no file system to read from.
const LADDER_JSON: &str = include_str!("../../../configs/ladder_hls.json");
const ENERGY_JSON: &str = include_str!("../../../configs/energy_params.json");

/// Stand-in codec efficiency relative to the baseline.
fn codec_efficiency(codec: &str) -> f64 {
    match codec {
        "hevc" => 1.35,
        "av1" => 1.6,
        _ => 1.0,
    }
}

/// Stand-in rate-quality surface; see the module docs.
fn surface_vmaf(codec: &str, height: u32, bitrate_bps: u64, e_y: f64, h: f64, l_y: f64) -> f64 {
    let capacity =
        220_000.0 * (1.0 + e_y / 4.0) * (1.0 + h / 10.0) * (f64::from(height) / 720.0);
    let saturation = 1.0 - (-codec_efficiency(codec) * bitrate_bps as f64 / capacity).exp();
    let brightness = 0.92 + 0.16 * l_y / 255.0;
    (100.0 * saturation * brightness).clamp(0.0, 100.0)
}

fn builtin_ladder() -> Result<MultiCodecLadder, String> {
    let doc: LadderDoc =
        serde_json::from_str(LADDER_JSON).map_err(|e| format!("embedded ladder: {e}"))?;
    validate_ladder(&doc).map_err(|e| e.to_string())
}

// ---------------------------------------------------------------------------
// analyze_segment
// ---------------------------------------------------------------------------

#[derive(Deserialize)]
#[serde(rename_all = "snake_case")]
enum Pattern {
    Flat,
    Gradient,
    Checker,
    Noise,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct AnalyzeParams {
    #[serde(default = "default_pattern")]
    pattern: Pattern,
    #[serde(default = "default_width")]
    width: u32,
    #[serde(default = "default_height")]
    height: u32,
    #[serde(default = "default_frames")]
    frames: u32,
    /// 0 = flat gray, 1 = full amplitude.
    #[serde(default = "default_contrast")]
    contrast: f64,
    /// 0 = static (duplicated frames), 1 = fast scroll.
    #[serde(default = "default_motion")]
    motion: f64,
    #[serde(default = "default_seed")]
    seed: u64,
}

fn default_pattern() -> Pattern {
    Pattern::Gradient
}
fn default_width() -> u32 {
    320
}
fn default_height() -> u32 {
    180
}
fn default_frames() -> u32 {
    12
}
fn default_contrast() -> f64 {
    0.8
}
fn default_motion() -> f64 {
    0.5
}
fn default_seed() -> u64 {
    7
}

#[derive(Serialize)]
struct AnalyzeOut {
    e_y: f64,
    h: f64,
    l_y: f64,
    /// Per-frame texture energy, for the sparkline.
    frame_energies: Vec<f64>,
}

fn base_plane(pattern: &Pattern, width: usize, height: usize, seed: u64) -> Vec<u8> {
    let mut plane = vec![128u8; width * height];
    match pattern {
        Pattern::Flat => {}
        Pattern::Gradient => {
            for y in 0..height {
                for x in 0..width {
                    plane[y * width + x] = ((x * 3 + y * 5) % 256) as u8;
                }
            }
        }
        Pattern::Checker => {
            for y in 0..height {
                for x in 0..width {
                    plane[y * width + x] = if (x / 16 + y / 16) % 2 == 0 { 0 } else { 255 };
                }
            }
        }
        Pattern::Noise => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for sample in &mut plane {
                *sample = rng.random_range(0..=255);
            }
        }
    }
    plane
}

fn synthesize(p: &AnalyzeParams) -> Vec<Frame> {
    let (width, height) = (p.width as usize, p.height as usize);
    let base = base_plane(&p.pattern, width, height, p.seed);
    // Motion scrolls the base plane by a fixed byte offset per frame, so
    // motion 0 duplicates frames exactly and the gradient feature is 0.
    let stride = (p.motion * 97.0).round() as usize;

    (0..p.frames as u64)
        .map(|index| {
            let shift = (index as usize * stride) % base.len().max(1);
            let mut luma = Vec::with_capacity(base.len());
            luma.extend_from_slice(&base[shift..]);
            luma.extend_from_slice(&base[..shift]);
            for sample in &mut luma {
                let v = 128.0 + (f64::from(*sample) - 128.0) * p.contrast;
                *sample = v.round().clamp(0.0, 255.0) as u8;
            }
            Frame {
                width: p.width,
                height: p.height,
                index,
                luma,
            }
        })
        .collect()
}

/// Synthesize a short clip and extract its complexity features.
#[wasm_bindgen]
pub fn analyze_segment(params: &str) -> Result<String, String> {
    let p: AnalyzeParams =
        serde_json::from_str(params).map_err(|e| format!("bad parameters: {e}"))?;
    if !(16..=640).contains(&p.width) || !(16..=480).contains(&p.height) {
        return Err("width must be 16..=640 and height 16..=480".to_string());
    }
    if !(1..=30).contains(&p.frames) {
        return Err("frames must be 1..=30".to_string());
    }
    if !(0.0..=1.0).contains(&p.contrast) || !(0.0..=1.0).contains(&p.motion) {
        return Err("contrast and motion must be within 0..=1".to_string());
    }

    let frames = synthesize(&p);
    let frame_energies = frames
        .iter()
        .map(|f| {
            let single = Segment {
                id: "frame".to_string(),
                fps: 30.0,
                frames: vec![f.clone()],
            };
            Ok(segment_features(&single)?.texture_energy)
        })
        .collect::<Result<Vec<f64>, mcbe_core::Error>>()
        .map_err(|e| e.to_string())?;

    let segment = Segment {
        id: "demo".to_string(),
        fps: 30.0,
        frames,
    };
    let features = segment_features(&segment).map_err(|e| e.to_string())?;

    serde_json::to_string(&AnalyzeOut {
        e_y: features.texture_energy,
        h: features.texture_gradient,
        l_y: features.mean_luma,
        frame_energies,
    })
    .map_err(|e| e.to_string())
}

// ---------------------------------------------------------------------------
// optimize_ladder
// ---------------------------------------------------------------------------

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct OptimizeParams {
    e_y: f64,
    h: f64,
    l_y: f64,
    #[serde(default = "default_jnd")]
    jnd: f64,
    #[serde(default = "default_vmax")]
    vmax: f64,
    #[serde(default)]
    reference: ReferenceParam,
}

fn default_jnd() -> f64 {
    6.0
}
fn default_vmax() -> f64 {
    94.0
}

#[derive(Deserialize, Default, Clone, Copy)]
#[serde(rename_all = "snake_case")]
enum ReferenceParam {
    #[default]
    LastRetained,
    PreviousListed,
}

impl From<ReferenceParam> for JndReference {
    fn from(p: ReferenceParam) -> Self {
        match p {
            ReferenceParam::LastRetained => JndReference::LastRetained,
            ReferenceParam::PreviousListed => JndReference::PreviousListed,
        }
    }
}

#[derive(Serialize)]
struct RungRow {
    codec: String,
    width: u32,
    height: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    label: Option<String>,
    bitrate_bps: u64,
    vmaf: f64,
    /// `retained`, `above_vmax`, `below_jnd`, or `below_baseline_rd`.
    status: String,
}

#[derive(Serialize)]
struct OptimizeOut {
    jnd: f64,
    vmax: f64,
    rungs: Vec<RungRow>,
    retained_count: usize,
    eliminated_count: usize,
    energy: serde_json::Value,
    playlist: String,
}

/// Annotate the built-in ladder from the stand-in surface, prune it, and
/// compare the energy of the pruned set against encoding everything.
#[wasm_bindgen]
pub fn optimize_ladder(params: &str) -> Result<String, String> {
    let p: OptimizeParams =
        serde_json::from_str(params).map_err(|e| format!("bad parameters: {e}"))?;
    let config = EliminationConfig::new(p.jnd, p.vmax)
        .map_err(|e| e.to_string())?
        .with_reference(p.reference.into());

    let ladder = builtin_ladder()?;
    let annotated = ladder
        .map_rungs(|rung| {
            let mut rung = rung.clone();
            rung.vmaf = Some(surface_vmaf(
                &rung.codec,
                rung.resolution.height,
                rung.bitrate_bps,
                p.e_y,
                p.h,
                p.l_y,
            ));
            Ok(rung)
        })
        .map_err(|e| e.to_string())?;

    let optimized = eliminate(&annotated, &config).map_err(|e| e.to_string())?;

    // One row per input rung, in codec-priority then bitrate order.
    let status_of = |codec: &str, bitrate: u64| -> String {
        for r in &optimized.retained {
            if r.codec == codec && r.bitrate_bps == bitrate {
                return "retained".to_string();
            }
        }
        for e in &optimized.eliminated {
            if e.rung.codec == codec && e.rung.bitrate_bps == bitrate {
                return serde_json::to_value(e.reason)
                    .ok()
                    .and_then(|v| v.as_str().map(str::to_string))
                    .unwrap_or_default();
            }
        }
        unreachable!("every rung is retained or eliminated")
    };
    let rungs: Vec<RungRow> = annotated
        .all_rungs()
        .map(|r| RungRow {
            codec: r.codec.clone(),
            width: r.resolution.width,
            height: r.resolution.height,
            label: r.resolution.label.clone(),
            bitrate_bps: r.bitrate_bps,
            vmaf: r.vmaf.unwrap_or_default(),
            status: status_of(&r.codec, r.bitrate_bps),
        })
        .collect();

    let energy_params: EnergyParams =
        serde_json::from_str(ENERGY_JSON).map_err(|e| format!("embedded energy params: {e}"))?;
    let baseline: Vec<_> = annotated.all_rungs().cloned().collect();
    let energy = report(&baseline, &optimized.retained, &energy_params, 30.0)
        .map_err(|e| e.to_string())?;

    let codec_order: Vec<String> = annotated.codecs().iter().map(|c| c.id.clone()).collect();
    serde_json::to_string(&OptimizeOut {
        jnd: config.jnd,
        vmax: config.vmax,
        retained_count: optimized.retained.len(),
        eliminated_count: optimized.eliminated.len(),
        rungs,
        energy: mcbe_core::energy::report_json(&energy),
        playlist: master_playlist(&optimized.retained, &codec_order),
    })
    .map_err(|e| e.to_string())
}

// ---------------------------------------------------------------------------
// train_and_predict
// ---------------------------------------------------------------------------

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TrainParams {
    #[serde(default = "default_codec")]
    codec: String,
    #[serde(default = "default_samples")]
    samples: usize,
    #[serde(default = "default_trees")]
    trees: usize,
    #[serde(default = "default_noise")]
    noise: f64,
    #[serde(default = "default_seed")]
    seed: u64,
    e_y: f64,
    h: f64,
    l_y: f64,
}

fn default_codec() -> String {
    "avc".to_string()
}
fn default_samples() -> usize {
    400
}
fn default_trees() -> usize {
    40
}
fn default_noise() -> f64 {
    1.0
}

#[derive(Serialize)]
struct SweepPoint {
    bitrate_bps: u64,
    predicted_vmaf: f64,
    surface_vmaf: f64,
}

#[derive(Serialize)]
struct TrainOut {
    key: String,
    samples: usize,
    trees: usize,
    training_mae: f64,
    sweep: Vec<SweepPoint>,
}

fn gauss(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = rng.random_range(1e-12..1.0);
    let u2: f64 = rng.random_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

const TRAIN_HEIGHT: u32 = 1080;
const TRAIN_WIDTH: u32 = 1920;

/// Train a forest on noisy surface samples for one codec at 1080p, then
/// sweep its predictions across bitrates at the requested features.
#[wasm_bindgen]
pub fn train_and_predict(params: &str) -> Result<String, String> {
    let p: TrainParams =
        serde_json::from_str(params).map_err(|e| format!("bad parameters: {e}"))?;
    if !(10..=2000).contains(&p.samples) {
        return Err("samples must be 10..=2000".to_string());
    }
    if !(1..=100).contains(&p.trees) {
        return Err("trees must be 1..=100".to_string());
    }
    if !(0.0..=5.0).contains(&p.noise) {
        return Err("noise must be 0..=5".to_string());
    }

    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let train: Vec<TrainingSample> = (0..p.samples)
        .map(|_| {
            let e_y = rng.random_range(1.0..60.0f64);
            let h = rng.random_range(0.0..15.0f64);
            let l_y = rng.random_range(16.0..235.0f64);
            let bitrate = rng.random_range(250_000f64.ln()..16_000_000f64.ln()).exp();
            let truth = surface_vmaf(&p.codec, TRAIN_HEIGHT, bitrate as u64, e_y, h, l_y);
            TrainingSample {
                codec: p.codec.clone(),
                width: TRAIN_WIDTH,
                height: TRAIN_HEIGHT,
                features: [e_y, h, l_y, bitrate],
                vmaf: (truth + gauss(&mut rng) * p.noise).clamp(0.0, 100.0),
            }
        })
        .collect();

    let hyper = Hyperparameters {
        n_estimators: p.trees,
        max_depth: 12,
        ..Hyperparameters::default()
    };
    let model = train_forest_with(&train, p.seed, &hyper).map_err(|e| e.to_string())?;
    let training_mae = mcbe_core::forest::mean_absolute_error(&model, &train);

    let sweep: Vec<SweepPoint> = (0..16)
        .map(|i| {
            let t = i as f64 / 15.0;
            let bitrate =
                (250_000f64.ln() + t * (16_000_000f64.ln() - 250_000f64.ln())).exp() as u64;
            SweepPoint {
                bitrate_bps: bitrate,
                predicted_vmaf: model.predict(&[p.e_y, p.h, p.l_y, bitrate as f64]),
                surface_vmaf: surface_vmaf(&p.codec, TRAIN_HEIGHT, bitrate, p.e_y, p.h, p.l_y),
            }
        })
        .collect();

    serde_json::to_string(&TrainOut {
        key: format!("{}@{}x{}", p.codec, TRAIN_WIDTH, TRAIN_HEIGHT),
        samples: p.samples,
        trees: p.trees,
        training_mae,
        sweep,
    })
    .map_err(|e| e.to_string())
}

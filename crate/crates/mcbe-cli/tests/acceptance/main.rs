//! Acceptance suite: ten numbered checks that gate a release.
//!
//! Each check prints one `[PASS]` (or, for the informational latency check,
//! possibly `[WARN]`) line; run with `--nocapture` to see them:
//!
//! ```text
//! cargo test -p mcbe-cli --test acceptance -- --nocapture --test-threads=1
//! ```
//!
//!  1. Two-step elimination exactly matches an independent oracle over
//!     1000 randomized ladders, in under 10 s.
//!  2. Retained-rung count is non-increasing across the standard
//!     (JND, vmax) operating points (2, 98) -> (4, 96) -> (6, 94).
//!  3. Every baseline rung that survives step 1 appears in the final set.
//!  4. No retained non-baseline rung sits at or below the baseline curve
//!     (re-interpolated independently).
//!  5. The separable DCT matches the direct O(N^4) definition to 1e-9.
//!  6. Feature invariants hold exactly: constant segments give (0, 0, gray),
//!     duplicated frames give h = 0, contrast scaling is linear to 1e-9.
//!  7. Forest training is byte-deterministic, constant targets predict
//!     exactly, and held-out MAE <= 3.0 on a synthetic surface, in under 60 s.
//!  8. Energy identities: transmission delta equals size delta, the
//!     storage unit check is exact, and identical scenarios give zero deltas.
//!  9. The bundled smoke pipeline reproduces the golden files byte for byte
//!     in under 5 s.
//! 10. One 1080p 4 s segment runs features + predict + eliminate in under
//!     2 s (informational: over budget warns instead of failing).


use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use mcbe_core::eliminate::{
    eliminate, step1_ladder, EliminationConfig, EliminationReason, OptimizedLadder,
    STANDARD_CONFIGS,
};
use mcbe_core::energy::{report, storage_energy_wh, EnergyParams};
use mcbe_core::features::{dct2d, features_from_planes, segment_features, BLOCK_SIZE};
use mcbe_core::forest::{
    load_bank, predict_ladder, save_bank, train_bank, train_forest, TrainingSample,
};
use mcbe_core::ladder::{validate_ladder, Codec, LadderDoc, MultiCodecLadder, Resolution, Rung};
use mcbe_core::y4m::{Frame, Segment};

use naive::{oracle_eliminate, OracleOutcome, OracleRung};

// ---------------------------------------------------------------------------
// Shared generators
// ---------------------------------------------------------------------------

fn rng_for(tag: u64, case: u64) -> ChaCha8Rng {
    let mut seed = [0u8; 32];
    seed[..8].copy_from_slice(&tag.to_le_bytes());
    seed[8..16].copy_from_slice(&case.to_le_bytes());
    ChaCha8Rng::from_seed(seed)
}

struct Case {
    ladder: MultiCodecLadder,
    oracle: Vec<OracleRung>,
    jnd: f64,
    vmax: f64,
}

const RESOLUTIONS: [(u32, u32); 4] = [(640, 360), (1280, 720), (1920, 1080), (3840, 2160)];
const CODEC_IDS: [&str; 3] = ["base", "mid", "new"];

/// A randomized ladder for the oracle-equivalence checks: 2-3 codecs, 3-8
/// rungs each, VMAFs that mostly rise but may dip, plateau, or clamp at 100,
/// and a random (JND, vmax) operating point.
fn elimination_case(index: u64) -> Case {
    let mut rng = rng_for(0xACCE_0001, index);
    let n_codecs = rng.random_range(2..=3usize);

    let mut codecs = Vec::new();
    let mut rungs = Vec::new();
    let mut oracle = Vec::new();
    for rank in 0..n_codecs {
        codecs.push(Codec {
            id: CODEC_IDS[rank].to_string(),
            priority: rank as u32,
        });
        let n_rungs = rng.random_range(3..=8usize);
        let mut bitrate = rng.random_range(150_000..900_000u64);
        let mut vmaf: f64 = rng.random_range(15.0..75.0);
        for r in 0..n_rungs {
            let (width, height) = RESOLUTIONS[r % RESOLUTIONS.len()];
            rungs.push(Rung {
                codec: CODEC_IDS[rank].to_string(),
                resolution: Resolution::new(width, height),
                bitrate_bps: bitrate,
                vmaf: Some(vmaf),
            });
            oracle.push(OracleRung {
                codec_rank: rank,
                codec: CODEC_IDS[rank].to_string(),
                bitrate,
                vmaf,
            });
            bitrate = (bitrate as f64 * rng.random_range(1.08..2.2)) as u64;
            // Plateaus exercise the tie rules; dips exercise the anchor rule.
            let step = if rng.random_range(0..100) < 15 {
                0.0
            } else {
                rng.random_range(-3.0..14.0)
            };
            vmaf = (vmaf + step).clamp(0.0, 100.0);
        }
    }

    let ladder = validate_ladder(&LadderDoc { codecs, rungs }).expect("generated ladder is valid");
    Case {
        ladder,
        oracle,
        jnd: rng.random_range(1.5..8.0),
        vmax: rng.random_range(85.0..99.0),
    }
}

/// A ladder with strictly non-decreasing VMAF per codec and conventional
/// bitrate spacing, for the JND-monotonicity check.
fn monotone_case(index: u64) -> Case {
    let mut rng = rng_for(0xACCE_0002, index);
    let n_codecs = rng.random_range(2..=3usize);

    let mut codecs = Vec::new();
    let mut rungs = Vec::new();
    let mut oracle = Vec::new();
    for rank in 0..n_codecs {
        codecs.push(Codec {
            id: CODEC_IDS[rank].to_string(),
            priority: rank as u32,
        });
        let n_rungs = rng.random_range(3..=8usize);
        let mut bitrate = rng.random_range(200_000..700_000u64);
        let mut vmaf: f64 = rng.random_range(20.0..60.0);
        for r in 0..n_rungs {
            let (width, height) = RESOLUTIONS[r % RESOLUTIONS.len()];
            rungs.push(Rung {
                codec: CODEC_IDS[rank].to_string(),
                resolution: Resolution::new(width, height),
                bitrate_bps: bitrate,
                vmaf: Some(vmaf),
            });
            oracle.push(OracleRung {
                codec_rank: rank,
                codec: CODEC_IDS[rank].to_string(),
                bitrate,
                vmaf,
            });
            bitrate = (bitrate as f64 * rng.random_range(1.35..1.9)) as u64;
            vmaf = (vmaf + rng.random_range(0.0..10.0)).min(100.0);
        }
    }

    let ladder = validate_ladder(&LadderDoc { codecs, rungs }).expect("generated ladder is valid");
    Case {
        ladder,
        oracle,
        jnd: 6.0,
        vmax: 94.0,
    }
}

/// Flatten a library outcome into sorted `(codec, bitrate, outcome)` rows so
/// it can be compared with the oracle's rows wholesale.
fn library_rows(out: &OptimizedLadder) -> Vec<(String, u64, OracleOutcome)> {
    let mut rows = Vec::new();
    for rung in &out.retained {
        rows.push((rung.codec.clone(), rung.bitrate_bps, OracleOutcome::Retained));
    }
    for e in &out.eliminated {
        let outcome = match e.reason {
            EliminationReason::AboveVmax => OracleOutcome::AboveVmax,
            EliminationReason::BelowJnd => OracleOutcome::BelowJnd,
            EliminationReason::BelowBaselineRd => OracleOutcome::BelowBaselineRd,
        };
        rows.push((e.rung.codec.clone(), e.rung.bitrate_bps, outcome));
    }
    rows.sort_by(|a, b| (&a.0, a.1).cmp(&(&b.0, b.1)));
    rows
}

fn workspace_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .ancestors()
        .nth(2)
        .expect("workspace root")
        .to_path_buf()
}

// ---------------------------------------------------------------------------
// 1. Oracle equivalence
// ---------------------------------------------------------------------------

#[test]
fn c01_elimination_matches_independent_oracle() {
    const CASES: u64 = 1000;
    let start = Instant::now();
    let mut total_rungs = 0usize;

    for i in 0..CASES {
        let case = elimination_case(i);
        let config = EliminationConfig::new(case.jnd, case.vmax).unwrap();
        let ours = library_rows(&eliminate(&case.ladder, &config).unwrap());

        let mut oracle = oracle_eliminate(&case.oracle, case.jnd, case.vmax);
        oracle.sort_by(|a, b| (&a.0, a.1).cmp(&(&b.0, b.1)));

        assert_eq!(ours, oracle, "case {i} diverged from the oracle");
        total_rungs += ours.len();
    }

    let elapsed = start.elapsed().as_secs_f64();
    assert!(elapsed < 10.0, "oracle sweep took {elapsed:.2}s, budget is 10s");
    println!(
        "[PASS] 01 elimination-oracle-equivalence: {CASES} ladders / {total_rungs} rungs, \
         0 mismatches, {elapsed:.2}s"
    );
}

// ---------------------------------------------------------------------------
// 2. JND monotonicity
// ---------------------------------------------------------------------------

#[test]
fn c02_retained_count_monotone_in_jnd() {
    assert_eq!(
        STANDARD_CONFIGS,
        [(2.0, 98.0), (4.0, 96.0), (6.0, 94.0)],
        "standard operating points drifted"
    );

    for i in 0..100 {
        let case = monotone_case(i);
        let mut counts = Vec::new();
        for (jnd, vmax) in STANDARD_CONFIGS {
            let config = EliminationConfig::new(jnd, vmax).unwrap();
            counts.push(eliminate(&case.ladder, &config).unwrap().retained.len());
        }
        assert!(
            counts[0] >= counts[1] && counts[1] >= counts[2],
            "case {i}: retained counts {counts:?} are not non-increasing"
        );
    }
    println!(
        "[PASS] 02 jnd-monotonicity: 100 ladders, retained counts non-increasing over \
         (2,98)->(4,96)->(6,94), 0 violations"
    );
}

// ---------------------------------------------------------------------------
// 3. Baseline preservation
// ---------------------------------------------------------------------------

#[test]
fn c03_baseline_rungs_always_survive() {
    let mut checked = 0usize;
    for i in 0..1000 {
        let case = elimination_case(i);
        let config = EliminationConfig::new(case.jnd, case.vmax).unwrap();

        let step1 = step1_ladder(&case.ladder, &config).unwrap();
        let final_set = eliminate(&case.ladder, &config).unwrap();
        let retained_ids: Vec<_> = final_set.retained.iter().map(Rung::identity).collect();

        let (_, baseline) = &step1.per_codec[0];
        for rung in &baseline.retained {
            assert!(
                retained_ids.contains(&rung.identity()),
                "case {i}: baseline rung {}bps was lost",
                rung.bitrate_bps
            );
            checked += 1;
        }
    }
    println!("[PASS] 03 baseline-preservation: {checked} baseline rungs over 1000 ladders, 0 lost");
}

// ---------------------------------------------------------------------------
// 4. Geometric recheck of step 2
// ---------------------------------------------------------------------------

#[test]
fn c04_retained_rungs_beat_baseline_curve() {
    let mut checked = 0usize;
    for i in 0..1000 {
        let case = elimination_case(i);
        let config = EliminationConfig::new(case.jnd, case.vmax).unwrap();

        let step1 = step1_ladder(&case.ladder, &config).unwrap();
        let (baseline_codec, baseline) = &step1.per_codec[0];
        let knots: Vec<(u64, f64)> = baseline
            .retained
            .iter()
            .map(|r| (r.bitrate_bps, r.vmaf.unwrap()))
            .collect();

        for rung in &eliminate(&case.ladder, &config).unwrap().retained {
            if rung.codec == baseline_codec.id {
                continue;
            }
            // Below the curve's range there is no baseline to beat.
            if let Some(curve_vmaf) = naive::curve_value(&knots, rung.bitrate_bps) {
                let vmaf = rung.vmaf.unwrap();
                assert!(
                    vmaf > curve_vmaf,
                    "case {i}: retained {} {}bps has VMAF {vmaf} <= baseline curve {curve_vmaf}",
                    rung.codec,
                    rung.bitrate_bps
                );
                checked += 1;
            }
        }
    }
    println!(
        "[PASS] 04 baseline-curve-recheck: {checked} retained non-baseline rungs over \
         1000 ladders, all strictly above the re-interpolated curve"
    );
}

// ---------------------------------------------------------------------------
// 5. DCT against the direct definition
// ---------------------------------------------------------------------------

type Block = [[f64; BLOCK_SIZE]; BLOCK_SIZE];

/// Direct O(N^4) orthonormal DCT-II straight from the definition. The cosine
/// and scale tables are precomputed, the quadruple loop is not.
fn dct_direct(x: &Block) -> Block {
    let n = BLOCK_SIZE;
    let mut cos_t = [[0.0f64; BLOCK_SIZE]; BLOCK_SIZE];
    let mut scale = [0.0f64; BLOCK_SIZE];
    for k in 0..n {
        scale[k] = if k == 0 {
            (1.0 / n as f64).sqrt()
        } else {
            (2.0 / n as f64).sqrt()
        };
        for i in 0..n {
            cos_t[k][i] =
                (std::f64::consts::PI * (2.0 * i as f64 + 1.0) * k as f64 / (2.0 * n as f64)).cos();
        }
    }

    let mut out = [[0.0f64; BLOCK_SIZE]; BLOCK_SIZE];
    for (u, row) in out.iter_mut().enumerate() {
        for (v, cell) in row.iter_mut().enumerate() {
            let mut acc = 0.0;
            for i in 0..n {
                for j in 0..n {
                    acc += x[i][j] * cos_t[u][i] * cos_t[v][j];
                }
            }
            *cell = scale[u] * scale[v] * acc;
        }
    }
    out
}

#[test]
fn c05_dct_matches_direct_definition() {
    let mut rng = rng_for(0xACCE_0005, 0);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let mut block = [[0.0f64; BLOCK_SIZE]; BLOCK_SIZE];
        for row in &mut block {
            for cell in row.iter_mut() {
                *cell = rng.random_range(-128.0..128.0);
            }
        }
        let fast = dct2d(&block);
        let direct = dct_direct(&block);
        for u in 0..BLOCK_SIZE {
            for v in 0..BLOCK_SIZE {
                worst = worst.max((fast[u][v] - direct[u][v]).abs());
            }
        }
    }
    assert!(worst <= 1e-9, "max |fast - direct| = {worst:e} exceeds 1e-9");
    println!("[PASS] 05 dct-direct-oracle: 100 random 32x32 blocks, max abs error {worst:.3e} <= 1e-9");
}

// ---------------------------------------------------------------------------
// 6. Feature invariants
// ---------------------------------------------------------------------------

fn frame(width: u32, height: u32, index: u64, luma: Vec<u8>) -> Frame {
    Frame {
        width,
        height,
        index,
        luma,
    }
}

#[test]
fn c06_feature_invariants_hold_exactly() {
    // Constant gray: zero texture, zero gradient, mean equal to the gray
    // value, all exactly.
    let gray = 77u8;
    let segment = Segment {
        id: "gray".to_string(),
        fps: 30.0,
        frames: (0..4)
            .map(|i| frame(64, 64, i, vec![gray; 64 * 64]))
            .collect(),
    };
    let f = segment_features(&segment).unwrap();
    assert_eq!(f.texture_energy, 0.0, "constant segment must have E_Y = 0");
    assert_eq!(f.texture_gradient, 0.0, "constant segment must have h = 0");
    assert_eq!(f.mean_luma, f64::from(gray), "constant segment mean luma");

    // A frame duplicated five times: per-frame energies are identical, so
    // the gradient must be exactly zero.
    let mut rng = rng_for(0xACCE_0006, 0);
    let noise: Vec<u8> = (0..96 * 64).map(|_| rng.random_range(0..=255)).collect();
    let segment = Segment {
        id: "dup".to_string(),
        fps: 30.0,
        frames: (0..5).map(|i| frame(96, 64, i, noise.clone())).collect(),
    };
    let f = segment_features(&segment).unwrap();
    assert!(f.texture_energy > 0.0, "noise frame should have texture");
    assert_eq!(f.texture_gradient, 0.0, "duplicated frames must have h = 0");

    // Contrast scaling on real-valued planes: doubling the samples doubles
    // E_Y, h, and L_Y to within 1e-9 relative.
    let width = 80usize;
    let height = 48usize;
    let planes: Vec<Vec<f64>> = (0..3)
        .map(|_| (0..width * height).map(|_| rng.random_range(0.0..1.0)).collect())
        .collect();
    let doubled: Vec<Vec<f64>> = planes
        .iter()
        .map(|p| p.iter().map(|&s| 2.0 * s).collect())
        .collect();
    let f1 = features_from_planes("x1", &planes, width, height).unwrap();
    let f2 = features_from_planes("x2", &doubled, width, height).unwrap();
    for (name, a, b) in [
        ("E_Y", f2.texture_energy, 2.0 * f1.texture_energy),
        ("h", f2.texture_gradient, 2.0 * f1.texture_gradient),
        ("L_Y", f2.mean_luma, 2.0 * f1.mean_luma),
    ] {
        let rel = (a - b).abs() / b.abs();
        assert!(rel <= 1e-9, "{name}: relative error {rel:e} exceeds 1e-9");
    }

    println!(
        "[PASS] 06 feature-invariants: constant -> (0, 0, {gray}) exact, duplicated -> h = 0 \
         exact, contrast linearity within 1e-9 relative"
    );
}

// ---------------------------------------------------------------------------
// 7. Forest determinism and fidelity
// ---------------------------------------------------------------------------

fn gauss(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = rng.random_range(1e-12..1.0);
    let u2: f64 = rng.random_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// Synthetic rate-quality surface: a saturating curve whose capacity grows
/// with texture complexity, with a mild brightness term.
fn surface_sample(rng: &mut ChaCha8Rng) -> TrainingSample {
    let e_y = rng.random_range(1.0..60.0f64);
    let h = rng.random_range(0.0..15.0f64);
    let l_y = rng.random_range(16.0..235.0f64);
    let bitrate = (rng.random_range(300_000f64.ln()..12_000_000f64.ln())).exp();

    let capacity = 80_000.0 * (1.0 + e_y / 10.0) * (1.0 + h / 30.0);
    let quality = 100.0 * (1.0 - (-bitrate / capacity).exp()) * (0.9 + 0.2 * l_y / 255.0);
    let vmaf = (quality + gauss(rng)).clamp(0.0, 100.0);

    TrainingSample {
        codec: "avc".to_string(),
        width: 1920,
        height: 1080,
        features: [e_y, h, l_y, bitrate],
        vmaf,
    }
}

#[test]
fn c07_forest_deterministic_and_accurate() {
    let start = Instant::now();
    let mut rng = rng_for(0xACCE_0007, 0);
    let train: Vec<TrainingSample> = (0..2000).map(|_| surface_sample(&mut rng)).collect();
    let held_out: Vec<TrainingSample> = (0..500).map(|_| surface_sample(&mut rng)).collect();

    // Byte determinism: two trainings from the same seed serialize to the
    // same bank file, bit for bit.
    let mut bank_a = Vec::new();
    let mut bank_b = Vec::new();
    save_bank(&mut bank_a, &train_bank(&train, 7).unwrap().0).unwrap();
    save_bank(&mut bank_b, &train_bank(&train, 7).unwrap().0).unwrap();
    assert_eq!(bank_a, bank_b, "same seed must give byte-identical banks");

    // Constant targets predict that constant exactly.
    let constant: Vec<TrainingSample> = train
        .iter()
        .take(40)
        .cloned()
        .map(|mut s| {
            s.vmaf = 55.5;
            s
        })
        .collect();
    let constant_model = train_forest(&constant, 7).unwrap();
    for s in held_out.iter().take(20) {
        assert_eq!(
            constant_model.predict(&s.features),
            55.5,
            "constant-target forest must predict the constant exactly"
        );
    }

    // Held-out accuracy on the noisy surface.
    let model = train_forest(&train, 7).unwrap();
    let mae = held_out
        .iter()
        .map(|s| (model.predict(&s.features) - s.vmaf).abs())
        .sum::<f64>()
        / held_out.len() as f64;
    assert!(mae <= 3.0, "held-out MAE {mae:.3} exceeds 3.0");

    let elapsed = start.elapsed().as_secs_f64();
    assert!(elapsed < 60.0, "training + evaluation took {elapsed:.1}s, budget is 60s");
    println!(
        "[PASS] 07 forest-determinism-and-fidelity: byte-identical banks, exact constant \
         prediction, held-out MAE {mae:.3} <= 3.0 on 2000/500 split, {elapsed:.1}s"
    );
}

// ---------------------------------------------------------------------------
// 8. Energy identities
// ---------------------------------------------------------------------------

fn random_params(rng: &mut ChaCha8Rng) -> EnergyParams {
    let mut encode = std::collections::BTreeMap::new();
    for id in CODEC_IDS {
        encode.insert(id.to_string(), rng.random_range(1e-8..1e-6));
    }
    EnergyParams {
        storage_power_w_per_bit: rng.random_range(1e-13..1e-11),
        storage_hours: rng.random_range(1.0..10_000.0),
        encode_j_per_pixel: encode,
        transmit_j_per_bit: rng.random_range(1e-8..1e-6),
        deliveries: rng.random_range(1.0..100_000.0),
        seg_seconds: rng.random_range(1.0..10.0),
    }
}

#[test]
fn c08_energy_identities_hold() {
    // Unit check, exact: 1e9 bits at 1e-9 W/bit for 10 hours is 10 Wh.
    assert_eq!(storage_energy_wh(1e9, 1e-9, 10.0), 10.0);

    let mut pairs = 0usize;
    for i in 0..50 {
        let case = elimination_case(i);
        let mut rng = rng_for(0xACCE_0008, i);
        let params = random_params(&mut rng);
        let fps = rng.random_range(23.0..61.0);

        let baseline: Vec<Rung> = case.ladder.all_rungs().cloned().collect();

        // Identical scenarios: every delta is exactly zero.
        let same = report(&baseline, &baseline, &params, fps).unwrap();
        assert_eq!(same.deltas.encode_pct, 0.0);
        assert_eq!(same.deltas.size_pct, 0.0);
        assert_eq!(same.deltas.storage_pct, 0.0);
        assert_eq!(same.deltas.transmit_pct, 0.0);

        // A random optimized subset: the transmission delta always equals
        // the size delta, because both are linear in the stored bits.
        let optimized: Vec<Rung> = baseline
            .iter()
            .filter(|_| rng.random_range(0..100) < 60)
            .cloned()
            .collect();
        let r = report(&baseline, &optimized, &params, fps).unwrap();
        assert_eq!(
            r.deltas.transmit_pct, r.deltas.size_pct,
            "transmission and size deltas must match"
        );
        assert!(r.deltas.size_pct <= 0.0, "a subset cannot grow the size");
        pairs += 1;
    }
    println!(
        "[PASS] 08 energy-identities: storage unit check exact, zero deltas on identical \
         scenarios, transmit delta == size delta over {pairs} random scenario pairs"
    );
}

// ---------------------------------------------------------------------------
// 9. End-to-end smoke against the golden files
// ---------------------------------------------------------------------------

fn run_ok(cmd: &mut Command) {
    let out = cmd.output().expect("spawn mcbe");
    assert!(
        out.status.success(),
        "command failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
}

fn assert_matches_golden(actual: &Path, golden: &Path) {
    let a = fs::read(actual).unwrap_or_else(|e| panic!("read {}: {e}", actual.display()));
    let g = fs::read(golden).unwrap_or_else(|e| panic!("read {}: {e}", golden.display()));
    assert_eq!(
        a,
        g,
        "{} differs from golden {}",
        actual.display(),
        golden.display()
    );
}

#[test]
fn c09_end_to_end_smoke_matches_goldens() {
    let root = workspace_root();
    let dir = tempfile::tempdir().unwrap();
    let p = |name: &str| dir.path().join(name);

    let start = Instant::now();
    run_ok(Command::new(env!("CARGO_BIN_EXE_mcbe"))
        .env_remove("MCBE_THREADS")
        .arg("features")
        .arg(root.join("testdata/smoke_64x64_8f.y4m"))
        .arg("-o")
        .arg(p("features.csv")));
    run_ok(Command::new(env!("CARGO_BIN_EXE_mcbe"))
        .env_remove("MCBE_THREADS")
        .arg("optimize")
        .arg(root.join("configs/ladder_hls.json"))
        .arg(p("features.csv"))
        .arg(root.join("testdata/golden/bank.json"))
        .arg("-o")
        .arg(p("optimized.json"))
        .arg("--playlist")
        .arg(p("playlist.m3u8"))
        .arg("--rd-csv")
        .arg(p("rd.csv")));
    run_ok(Command::new(env!("CARGO_BIN_EXE_mcbe"))
        .env_remove("MCBE_THREADS")
        .arg("report")
        .arg(root.join("configs/ladder_hls.json"))
        .arg(p("optimized.json"))
        .arg(root.join("configs/energy_params.json"))
        .arg("-o")
        .arg(p("report.csv"))
        .arg("--json")
        .arg(p("report.json")));
    let elapsed = start.elapsed().as_secs_f64();

    for name in [
        "features.csv",
        "optimized.json",
        "playlist.m3u8",
        "rd.csv",
        "report.csv",
        "report.json",
    ] {
        assert_matches_golden(&p(name), &root.join("testdata/golden").join(name));
    }
    assert!(elapsed < 5.0, "smoke pipeline took {elapsed:.2}s, budget is 5s");
    println!(
        "[PASS] 09 end-to-end-smoke: features -> optimize -> report reproduced 6 golden files \
         byte for byte in {elapsed:.2}s"
    );
}

// ---------------------------------------------------------------------------
// 10. Single-segment latency (informational)
// ---------------------------------------------------------------------------

#[test]
fn c10_single_segment_latency() {
    // A 4 s, 30 fps, 1080p segment: a base gradient plane scrolled by a
    // few samples per frame, so block energies vary frame to frame.
    let (width, height) = (1920usize, 1080usize);
    let mut base = vec![0u8; width * height];
    for y in 0..height {
        for x in 0..width {
            base[y * width + x] = ((x * 3 + y * 5) % 256) as u8;
        }
    }
    let frames: Vec<Frame> = (0..120)
        .map(|i| {
            let shift = (i as usize * 11) % base.len();
            let mut luma = Vec::with_capacity(base.len());
            luma.extend_from_slice(&base[shift..]);
            luma.extend_from_slice(&base[..shift]);
            Frame {
                width: width as u32,
                height: height as u32,
                index: i,
                luma,
            }
        })
        .collect();
    let segment = Segment {
        id: "lat".to_string(),
        fps: 30.0,
        frames,
    };

    let root = workspace_root();
    let bank = load_bank(fs::File::open(root.join("testdata/golden/bank.json")).unwrap()).unwrap();
    let doc: LadderDoc =
        serde_json::from_str(&fs::read_to_string(root.join("configs/ladder_hls.json")).unwrap())
            .unwrap();
    let ladder = validate_ladder(&doc).unwrap();
    let config = EliminationConfig::default();

    let start = Instant::now();
    let features = segment_features(&segment).unwrap();
    let annotated = predict_ladder(&bank, &ladder, &features).unwrap();
    let optimized = eliminate(&annotated, &config).unwrap();
    let elapsed = start.elapsed().as_secs_f64();

    assert!(!optimized.retained.is_empty());
    let verdict = if elapsed < 2.0 { "[PASS]" } else { "[WARN]" };
    println!(
        "{verdict} 10 single-segment-latency: features + predict + eliminate on one 1080p 4s \
         segment took {elapsed:.2}s (budget 2s, informational)"
    );
}

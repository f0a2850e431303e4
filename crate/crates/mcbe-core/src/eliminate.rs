//! Two-step elimination of redundant ladder representations.
//!
//! Step 1 walks each codec's ladder bottom-up. The lowest rung is always
//! retained as the quality floor. Every later rung is dropped when its VMAF
//! exceeds `vmax` (quality nobody needs) or when it improves on the JND
//! reference by less than `jnd` (quality nobody notices). By default the JND
//! reference is the last *retained* rung, which guarantees the pruned ladder
//! never opens a perceptible gap: a rung at least `jnd` above the last
//! survivor is always kept. Comparing against the previous listed rung
//! instead (available via [`JndReference::PreviousListed`]) can eliminate a
//! clearly better rung when the improvement arrives as several
//! sub-threshold steps.
//!
//! Step 2 plays the surviving codecs against the baseline (priority 0): a
//! non-baseline rung is kept only when it is strictly above the baseline's
//! piecewise-linear retained RD curve at its bitrate, i.e. it must deliver
//! quality the universally decodable codec cannot reach at that rate. Ties
//! go to the baseline. Below the baseline's bitrate range a rung is retained
//! unconditionally (it serves clients the baseline cannot); above the range
//! the baseline curve extends flat at its last VMAF.

use serde::{Deserialize, Serialize};
use std::io::Write;

use crate::error::{Error, Result};
use crate::ladder::{Codec, MultiCodecLadder, Rung};

/// The standard (jnd, vmax) operating points.
pub const STANDARD_CONFIGS: [(f64, f64); 3] = [(2.0, 98.0), (4.0, 96.0), (6.0, 94.0)];

/// Which rung step 1 measures a candidate's JND gain against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JndReference {
    /// Compare with the last rung that survived (default).
    #[default]
    LastRetained,
    /// Compare with the immediately preceding listed rung, retained or not.
    PreviousListed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EliminationConfig {
    /// Just-noticeable difference in VMAF points; must be positive.
    pub jnd: f64,
    /// VMAF ceiling above which extra quality is wasted; in (0, 100].
    pub vmax: f64,
    #[serde(default)]
    pub reference: JndReference,
}

impl EliminationConfig {
    pub fn new(jnd: f64, vmax: f64) -> Result<Self> {
        if !jnd.is_finite() || jnd <= 0.0 {
            return Err(Error::BadConfig(format!("jnd must be > 0, got {jnd}")));
        }
        if !vmax.is_finite() || vmax <= 0.0 || vmax > 100.0 {
            return Err(Error::BadConfig(format!(
                "vmax must be in (0, 100], got {vmax}"
            )));
        }
        if jnd >= vmax {
            return Err(Error::BadConfig(format!(
                "jnd {jnd} must be below vmax {vmax}"
            )));
        }
        Ok(EliminationConfig {
            jnd,
            vmax,
            reference: JndReference::LastRetained,
        })
    }

    pub fn with_reference(mut self, reference: JndReference) -> Self {
        self.reference = reference;
        self
    }
}

impl Default for EliminationConfig {
    fn default() -> Self {
        EliminationConfig {
            jnd: 6.0,
            vmax: 94.0,
            reference: JndReference::LastRetained,
        }
    }
}

/// Why a rung was dropped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EliminationReason {
    /// VMAF above the `vmax` ceiling.
    AboveVmax,
    /// Less than `jnd` VMAF points above the step-1 reference rung.
    BelowJnd,
    /// At or below the baseline codec's RD curve at this bitrate.
    BelowBaselineRd,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EliminatedRung {
    #[serde(flatten)]
    pub rung: Rung,
    pub reason: EliminationReason,
}

/// Outcome of pruning: the surviving encode set plus an audit trail of every
/// eliminated rung. `retained` keeps (codec priority, bitrate) order.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct OptimizedLadder {
    pub retained: Vec<Rung>,
    pub eliminated: Vec<EliminatedRung>,
}

impl OptimizedLadder {
    /// Retained rungs of one codec, in ascending bitrate order.
    pub fn retained_for<'a>(&'a self, codec: &str) -> Vec<&'a Rung> {
        self.retained.iter().filter(|r| r.codec == codec).collect()
    }
}

/// Step-1 result for a single codec's rung list.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Step1Outcome {
    pub retained: Vec<Rung>,
    pub eliminated: Vec<EliminatedRung>,
}

/// Ladder state between the two steps.
#[derive(Debug, Clone, PartialEq)]
pub struct Step1Ladder {
    pub per_codec: Vec<(Codec, Step1Outcome)>,
}

fn rung_vmaf(rung: &Rung) -> Result<f64> {
    rung.vmaf.ok_or_else(|| Error::MissingVmaf {
        codec: rung.codec.clone(),
        bitrate_bps: rung.bitrate_bps,
    })
}

/// Step 1 for one codec: JND/vmax pruning over rungs sorted by ascending
/// bitrate. The first rung is always retained and is never tested against
/// `vmax`; it is the ladder's reachability floor.
pub fn step1_jnd_prune(rungs: &[Rung], config: &EliminationConfig) -> Result<Step1Outcome> {
    let mut out = Step1Outcome::default();
    let Some(first) = rungs.first() else {
        return Ok(out);
    };
    rung_vmaf(first)?;
    out.retained.push(first.clone());
    let mut anchor_vmaf = rung_vmaf(first)?;
    let mut previous_vmaf = anchor_vmaf;

    for rung in &rungs[1..] {
        let vmaf = rung_vmaf(rung)?;
        let reference = match config.reference {
            JndReference::LastRetained => anchor_vmaf,
            JndReference::PreviousListed => previous_vmaf,
        };
        if vmaf > config.vmax {
            out.eliminated.push(EliminatedRung {
                rung: rung.clone(),
                reason: EliminationReason::AboveVmax,
            });
        } else if vmaf - reference < config.jnd {
            out.eliminated.push(EliminatedRung {
                rung: rung.clone(),
                reason: EliminationReason::BelowJnd,
            });
        } else {
            anchor_vmaf = vmaf;
            out.retained.push(rung.clone());
        }
        previous_vmaf = vmaf;
    }
    Ok(out)
}

/// Run step 1 over every codec of a validated, VMAF-annotated ladder.
pub fn step1_ladder(ladder: &MultiCodecLadder, config: &EliminationConfig) -> Result<Step1Ladder> {
    let mut per_codec = Vec::with_capacity(ladder.codecs().len());
    for (i, codec) in ladder.codecs().iter().enumerate() {
        let outcome = step1_jnd_prune(ladder.codec_rungs(i), config)?;
        per_codec.push((codec.clone(), outcome));
    }
    Ok(Step1Ladder { per_codec })
}

/// Piecewise-linear interpolation over an RD curve given as (bitrate, VMAF)
/// points sorted by ascending bitrate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RdEval {
    /// The query bitrate is below the curve's lowest point.
    BelowRange,
    /// Interpolated (or flat-extended above the range) VMAF.
    Vmaf(f64),
}

/// Evaluate the curve at `bitrate_bps`. Exactly at a point returns that
/// point's VMAF; above the top bitrate the curve extends flat.
pub fn interpolate_rd(curve: &[(u64, f64)], bitrate_bps: u64) -> Result<RdEval> {
    let (first, last) = match (curve.first(), curve.last()) {
        (Some(f), Some(l)) => (f, l),
        _ => return Err(Error::EmptyCurve),
    };
    debug_assert!(curve.windows(2).all(|w| w[0].0 < w[1].0));

    if bitrate_bps < first.0 {
        return Ok(RdEval::BelowRange);
    }
    if bitrate_bps >= last.0 {
        return Ok(RdEval::Vmaf(last.1));
    }
    // partition_point: first index whose bitrate exceeds the query; the
    // bracket is then [hi - 1, hi].
    let hi = curve.partition_point(|&(b, _)| b <= bitrate_bps);
    let (b0, v0) = curve[hi - 1];
    let (b1, v1) = curve[hi];
    if bitrate_bps == b0 {
        return Ok(RdEval::Vmaf(v0));
    }
    let t = (bitrate_bps - b0) as f64 / (b1 - b0) as f64;
    Ok(RdEval::Vmaf(v0 + t * (v1 - v0)))
}

/// Step 2: eliminate non-baseline rungs that do not beat the baseline
/// codec's retained RD curve. Baseline rungs pass through untouched.
pub fn step2_cross_codec_prune(step1: &Step1Ladder) -> Result<OptimizedLadder> {
    let mut out = OptimizedLadder::default();
    let Some((_, baseline)) = step1.per_codec.first() else {
        return Ok(out);
    };

    let baseline_curve: Vec<(u64, f64)> = baseline
        .retained
        .iter()
        .map(|r| Ok((r.bitrate_bps, rung_vmaf(r)?)))
        .collect::<Result<_>>()?;

    for (codec_index, (_, outcome)) in step1.per_codec.iter().enumerate() {
        out.eliminated.extend(outcome.eliminated.iter().cloned());
        if codec_index == 0 {
            out.retained.extend(outcome.retained.iter().cloned());
            continue;
        }
        for rung in &outcome.retained {
            let vmaf = rung_vmaf(rung)?;
            let keep = match interpolate_rd(&baseline_curve, rung.bitrate_bps)? {
                RdEval::BelowRange => true,
                RdEval::Vmaf(baseline_vmaf) => vmaf > baseline_vmaf,
            };
            if keep {
                out.retained.push(rung.clone());
            } else {
                out.eliminated.push(EliminatedRung {
                    rung: rung.clone(),
                    reason: EliminationReason::BelowBaselineRd,
                });
            }
        }
    }
    Ok(out)
}

/// Full two-step elimination of a validated, VMAF-annotated ladder.
pub fn eliminate(ladder: &MultiCodecLadder, config: &EliminationConfig) -> Result<OptimizedLadder> {
    step2_cross_codec_prune(&step1_ladder(ladder, config)?)
}

/// Predict VMAF for every rung, then eliminate: the end-to-end estimator.
pub fn estimate_ladder(
    ladder: &MultiCodecLadder,
    features: &crate::features::SegmentFeatures,
    bank: &crate::forest::ModelBank,
    config: &EliminationConfig,
) -> Result<OptimizedLadder> {
    let predicted = crate::forest::predict_ladder(bank, ladder, features)?;
    eliminate(&predicted, config)
}

/// Write the RD export: `codec,bitrate_bps,vmaf,retained`, one row per input
/// rung, codecs in the given priority order, bitrates ascending.
pub fn write_rd_csv<W: Write>(
    mut w: W,
    optimized: &OptimizedLadder,
    codec_order: &[String],
) -> Result<()> {
    writeln!(w, "codec,bitrate_bps,vmaf,retained")?;
    for codec in codec_order {
        let mut rows: Vec<(u64, f64, bool)> = Vec::new();
        for r in optimized.retained.iter().filter(|r| &r.codec == codec) {
            rows.push((r.bitrate_bps, r.vmaf.unwrap_or(f64::NAN), true));
        }
        for e in optimized.eliminated.iter().filter(|e| &e.rung.codec == codec) {
            rows.push((e.rung.bitrate_bps, e.rung.vmaf.unwrap_or(f64::NAN), false));
        }
        rows.sort_by_key(|&(b, _, _)| b);
        for (bitrate, vmaf, retained) in rows {
            writeln!(w, "{codec},{bitrate},{vmaf:.6},{retained}")?;
        }
    }
    Ok(())
}

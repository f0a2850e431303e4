//! Energy and storage accounting for a ladder scenario.
//!
//! For a set of rungs covering one segment of `seg_seconds` seconds:
//!
//! * storage size `S = sum(bitrate_bps) * seg_seconds` (bits),
//! * storage energy `E_sto = S * P_b * T_s` (Wh: bits times W/bit times hours),
//! * encoding energy `E_enc = sum(e_enc[codec] * width * height * fps * seg_seconds)`
//!   (J: a per-codec cost per encoded pixel),
//! * transmission energy `E_tra = S * e_tx * deliveries` (J).
//!
//! The encode and transmission coefficients are first-order stand-ins: they
//! scale with the work actually done (pixels pushed through the encoder,
//! bits pushed through the network) and are meant to be calibrated per
//! deployment. Relative deltas between a baseline and an optimized scenario
//! are the meaningful output; because transmission is linear in bits, its
//! relative delta is the storage-size delta by construction.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::io::Write;

use crate::error::{Error, Result};
use crate::ladder::Rung;

/// Deployment-specific energy coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyParams {
    /// Storage power draw per stored bit, in W/bit.
    pub storage_power_w_per_bit: f64,
    /// Storage retention window, in hours.
    pub storage_hours: f64,
    /// Encoder cost per output pixel, per codec id, in J/pixel.
    pub encode_j_per_pixel: BTreeMap<String, f64>,
    /// Network cost per transmitted bit, in J/bit.
    pub transmit_j_per_bit: f64,
    /// Expected number of deliveries of each stored representation.
    pub deliveries: f64,
    /// Segment duration the rung bitrates apply to, in seconds.
    pub seg_seconds: f64,
}

impl EnergyParams {
    pub fn validate(&self) -> Result<()> {
        let check = |name: &str, v: f64| -> Result<()> {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::BadEnergyParams(format!(
                    "{name} must be finite and non-negative, got {v}"
                )));
            }
            Ok(())
        };
        check("storage_power_w_per_bit", self.storage_power_w_per_bit)?;
        check("storage_hours", self.storage_hours)?;
        check("transmit_j_per_bit", self.transmit_j_per_bit)?;
        check("deliveries", self.deliveries)?;
        for (codec, &v) in &self.encode_j_per_pixel {
            check(&format!("encode_j_per_pixel[{codec}]"), v)?;
        }
        if !self.seg_seconds.is_finite() || self.seg_seconds <= 0.0 {
            return Err(Error::BadEnergyParams(format!(
                "seg_seconds must be positive, got {}",
                self.seg_seconds
            )));
        }
        Ok(())
    }
}

/// Storage energy in Wh: bits, times W/bit, times hours.
pub fn storage_energy_wh(size_bits: f64, power_w_per_bit: f64, hours: f64) -> f64 {
    size_bits * power_w_per_bit * hours
}

/// Total stored bits for a rung set over one segment.
pub fn ladder_size_bits(rungs: &[Rung], seg_seconds: f64) -> f64 {
    rungs
        .iter()
        .map(|r| r.bitrate_bps as f64 * seg_seconds)
        .sum()
}

/// Encoding energy in J for a rung set at the given frame rate.
pub fn encoding_energy_j(rungs: &[Rung], params: &EnergyParams, fps: f64) -> Result<f64> {
    let mut total = 0.0;
    for rung in rungs {
        let coeff = params
            .encode_j_per_pixel
            .get(&rung.codec)
            .ok_or_else(|| Error::MissingEnergyCoefficient(rung.codec.clone()))?;
        let pixels_per_second =
            f64::from(rung.resolution.width) * f64::from(rung.resolution.height) * fps;
        total += coeff * pixels_per_second * params.seg_seconds;
    }
    Ok(total)
}

/// The four accounted quantities for one scenario.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScenarioEnergy {
    pub encode_j: f64,
    pub size_bits: f64,
    pub storage_wh: f64,
    pub transmit_j: f64,
}

/// Account one rung set.
pub fn scenario_energy(rungs: &[Rung], params: &EnergyParams, fps: f64) -> Result<ScenarioEnergy> {
    params.validate()?;
    let size_bits = ladder_size_bits(rungs, params.seg_seconds);
    Ok(ScenarioEnergy {
        encode_j: encoding_energy_j(rungs, params, fps)?,
        size_bits,
        storage_wh: storage_energy_wh(size_bits, params.storage_power_w_per_bit, params.storage_hours),
        transmit_j: size_bits * params.transmit_j_per_bit * params.deliveries,
    })
}

/// Relative changes, optimized vs baseline, in percent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyDeltas {
    pub encode_pct: f64,
    pub size_pct: f64,
    pub storage_pct: f64,
    pub transmit_pct: f64,
}

/// Baseline and optimized scenarios side by side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    pub baseline: ScenarioEnergy,
    pub optimized: ScenarioEnergy,
    pub deltas: EnergyDeltas,
}

fn delta_pct(baseline: f64, optimized: f64) -> f64 {
    (optimized - baseline) / baseline * 100.0
}

/// Compare an optimized rung set against its baseline. Every baseline
/// component must be positive, otherwise relative deltas are undefined and
/// the comparison fails. The transmission delta is the size delta by
/// construction (the transmission model is linear in transmitted bits), so
/// the two are equal down to the last bit of the float.
pub fn report(
    baseline: &[Rung],
    optimized: &[Rung],
    params: &EnergyParams,
    fps: f64,
) -> Result<EnergyReport> {
    let base = scenario_energy(baseline, params, fps)?;
    let opt = scenario_energy(optimized, params, fps)?;
    if base.encode_j <= 0.0 || base.size_bits <= 0.0 || base.storage_wh <= 0.0 || base.transmit_j <= 0.0
    {
        return Err(Error::ZeroBaseline);
    }
    let size_pct = delta_pct(base.size_bits, opt.size_bits);
    Ok(EnergyReport {
        baseline: base,
        optimized: opt,
        deltas: EnergyDeltas {
            encode_pct: delta_pct(base.encode_j, opt.encode_j),
            size_pct,
            storage_pct: delta_pct(base.storage_wh, opt.storage_wh),
            transmit_pct: size_pct,
        },
    })
}

/// Write the report CSV: one row per scenario with six-decimal quantities,
/// then a `deltas` row in percent with two decimals.
pub fn write_report_csv<W: Write>(mut w: W, report: &EnergyReport) -> Result<()> {
    writeln!(w, "scenario,E_enc_J,S_bits,E_sto_Wh,E_tra_J")?;
    for (name, s) in [("baseline", &report.baseline), ("optimized", &report.optimized)] {
        writeln!(
            w,
            "{name},{:.6},{:.6},{:.6},{:.6}",
            s.encode_j, s.size_bits, s.storage_wh, s.transmit_j
        )?;
    }
    let d = &report.deltas;
    writeln!(
        w,
        "deltas_pct,{:.2},{:.2},{:.2},{:.2}",
        d.encode_pct, d.size_pct, d.storage_pct, d.transmit_pct
    )?;
    Ok(())
}

/// JSON mirror of the CSV, carrying the same rounded values.
pub fn report_json(report: &EnergyReport) -> serde_json::Value {
    let round6 = |v: f64| (v * 1e6).round() / 1e6;
    let round2 = |v: f64| (v * 1e2).round() / 1e2;
    let scenario = |s: &ScenarioEnergy| {
        serde_json::json!({
            "E_enc_J": round6(s.encode_j),
            "S_bits": round6(s.size_bits),
            "E_sto_Wh": round6(s.storage_wh),
            "E_tra_J": round6(s.transmit_j),
        })
    };
    serde_json::json!({
        "baseline": scenario(&report.baseline),
        "optimized": scenario(&report.optimized),
        "deltas_pct": {
            "E_enc_J": round2(report.deltas.encode_pct),
            "S_bits": round2(report.deltas.size_pct),
            "E_sto_Wh": round2(report.deltas.storage_pct),
            "E_tra_J": round2(report.deltas.transmit_pct),
        },
    })
}

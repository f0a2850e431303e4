//! DCT-energy complexity features.
//!
//! Each frame is tiled into 32x32 luma blocks (edges replicated outside the
//! frame). Every block goes through an orthonormal type-II 2-D DCT, and its
//! AC coefficients are folded into a scalar texture energy
//!
//! ```text
//! H = sum over (i,j) != (0,0) of e^|i*j/1024 - 1| * |coeff(i, j)|
//! ```
//!
//! Per segment this yields three features:
//! * `texture_energy` (E_Y): block energies averaged over all frames and
//!   blocks, normalized by the block area.
//! * `texture_gradient` (h): mean absolute frame-to-frame change of the
//!   per-block energies, same normalization; 0 for single-frame segments.
//! * `mean_luma` (L_Y): plain average of the luma samples.
//!
//! Blocks are mean-removed before the transform. That leaves every AC
//! coefficient untouched (the DC basis is constant, so subtracting a constant
//! only moves the DC term) while making flat blocks come out exactly zero
//! instead of accumulating rounding dust.

use serde::{Deserialize, Serialize};
use std::io::{Read, Write};
use std::sync::OnceLock;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::y4m::Segment;

/// Block side length in samples.
pub const BLOCK_SIZE: usize = 32;

const AREA: f64 = (BLOCK_SIZE * BLOCK_SIZE) as f64;

type Block = [[f64; BLOCK_SIZE]; BLOCK_SIZE];

/// Orthonormal DCT-II basis: `basis[k][n] = s_k * cos(pi * (2n + 1) * k / 2N)`
/// with `s_0 = sqrt(1/N)` and `s_k = sqrt(2/N)` otherwise.
fn dct_basis() -> &'static Block {
    static BASIS: OnceLock<Block> = OnceLock::new();
    BASIS.get_or_init(|| {
        let n = BLOCK_SIZE as f64;
        let mut basis = [[0.0; BLOCK_SIZE]; BLOCK_SIZE];
        for (k, row) in basis.iter_mut().enumerate() {
            let scale = if k == 0 { (1.0 / n).sqrt() } else { (2.0 / n).sqrt() };
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = scale
                    * (std::f64::consts::PI * (2.0 * j as f64 + 1.0) * k as f64 / (2.0 * n)).cos();
            }
        }
        basis
    })
}

/// Transposed basis, kept separately so both matrix passes stream rows.
fn dct_basis_t() -> &'static Block {
    static BASIS_T: OnceLock<Block> = OnceLock::new();
    BASIS_T.get_or_init(|| {
        let basis = dct_basis();
        let mut t = [[0.0; BLOCK_SIZE]; BLOCK_SIZE];
        for (k, row) in basis.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                t[j][k] = v;
            }
        }
        t
    })
}

/// Frequency weights for the texture energy; the DC slot is zeroed so the
/// weighted sum can run over the whole block.
fn ac_weights() -> &'static Block {
    static WEIGHTS: OnceLock<Block> = OnceLock::new();
    WEIGHTS.get_or_init(|| {
        let mut w = [[0.0; BLOCK_SIZE]; BLOCK_SIZE];
        for (i, row) in w.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = ((i * j) as f64 / AREA - 1.0).abs().exp();
            }
        }
        w[0][0] = 0.0;
        w
    })
}

/// Orthonormal 2-D DCT-II of one block, computed as two separable passes.
/// A constant block of value `c` transforms to DC = `BLOCK_SIZE * c` with all
/// other coefficients (mathematically) zero.
pub fn dct2d(block: &Block) -> Block {
    let basis = dct_basis();
    let basis_t = dct_basis_t();

    // tmp = block * basis^T, then out = basis * tmp. Loops are ordered so the
    // innermost index walks contiguous memory.
    let mut tmp = [[0.0; BLOCK_SIZE]; BLOCK_SIZE];
    for r in 0..BLOCK_SIZE {
        for c in 0..BLOCK_SIZE {
            let x = block[r][c];
            let brow = &basis_t[c];
            for v in 0..BLOCK_SIZE {
                tmp[r][v] += x * brow[v];
            }
        }
    }
    let mut out = [[0.0; BLOCK_SIZE]; BLOCK_SIZE];
    for u in 0..BLOCK_SIZE {
        for r in 0..BLOCK_SIZE {
            let b = basis[u][r];
            let trow = &tmp[r];
            for v in 0..BLOCK_SIZE {
                out[u][v] += b * trow[v];
            }
        }
    }
    out
}

/// Weighted AC magnitude sum of a coefficient block.
pub fn block_texture_energy(coeffs: &Block) -> f64 {
    let weights = ac_weights();
    let mut sum = 0.0;
    for (crow, wrow) in coeffs.iter().zip(weights.iter()) {
        for (&c, &w) in crow.iter().zip(wrow.iter()) {
            sum += w * c.abs();
        }
    }
    sum
}

trait LumaSample: Copy + Send + Sync {
    fn to_f64(self) -> f64;
}

impl LumaSample for u8 {
    fn to_f64(self) -> f64 {
        f64::from(self)
    }
}

impl LumaSample for f64 {
    fn to_f64(self) -> f64 {
        self
    }
}

/// Copy the 32x32 block at block coordinates (bx, by) out of the plane,
/// replicating the last row/column beyond the frame edge.
fn load_block<T: LumaSample>(
    plane: &[T],
    width: usize,
    height: usize,
    bx: usize,
    by: usize,
    out: &mut Block,
) {
    for (r, out_row) in out.iter_mut().enumerate() {
        let sy = (by * BLOCK_SIZE + r).min(height - 1);
        let src = &plane[sy * width..sy * width + width];
        for (c, cell) in out_row.iter_mut().enumerate() {
            let sx = (bx * BLOCK_SIZE + c).min(width - 1);
            *cell = src[sx].to_f64();
        }
    }
}

/// Texture energies of every block in one frame, in row-major block order.
fn frame_block_energies<T: LumaSample>(plane: &[T], width: usize, height: usize) -> Vec<f64> {
    let blocks_x = width.div_ceil(BLOCK_SIZE);
    let blocks_y = height.div_ceil(BLOCK_SIZE);
    let mut energies = Vec::with_capacity(blocks_x * blocks_y);
    let mut block = [[0.0; BLOCK_SIZE]; BLOCK_SIZE];
    for by in 0..blocks_y {
        for bx in 0..blocks_x {
            load_block(plane, width, height, bx, by, &mut block);
            let mean = block.iter().flatten().sum::<f64>() / AREA;
            for row in block.iter_mut() {
                for cell in row.iter_mut() {
                    *cell -= mean;
                }
            }
            energies.push(block_texture_energy(&dct2d(&block)));
        }
    }
    energies
}

/// The complexity triple for one segment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentFeatures {
    pub segment_id: String,
    pub texture_energy: f64,
    pub texture_gradient: f64,
    pub mean_luma: f64,
}

fn features_impl<T: LumaSample>(
    id: &str,
    planes: &[&[T]],
    width: usize,
    height: usize,
) -> Result<SegmentFeatures> {
    if planes.is_empty() {
        return Err(Error::EmptySegment(id.to_string()));
    }
    let expected = width * height;
    for plane in planes {
        if plane.len() != expected {
            return Err(Error::PlaneSizeMismatch {
                expected,
                got: plane.len(),
            });
        }
    }

    #[cfg(feature = "parallel")]
    let per_frame: Vec<(Vec<f64>, f64)> = planes
        .par_iter()
        .map(|p| {
            (
                frame_block_energies(p, width, height),
                p.iter().map(|s| s.to_f64()).sum::<f64>(),
            )
        })
        .collect();
    #[cfg(not(feature = "parallel"))]
    let per_frame: Vec<(Vec<f64>, f64)> = planes
        .iter()
        .map(|p| {
            (
                frame_block_energies(p, width, height),
                p.iter().map(|s| s.to_f64()).sum::<f64>(),
            )
        })
        .collect();

    let n_frames = per_frame.len();
    let n_blocks = per_frame[0].0.len();

    let mut energy_sum = 0.0;
    let mut luma_sum = 0.0;
    for (energies, frame_luma) in &per_frame {
        energy_sum += energies.iter().sum::<f64>();
        luma_sum += frame_luma;
    }

    let mut gradient_sum = 0.0;
    for pair in per_frame.windows(2) {
        for (curr, prev) in pair[1].0.iter().zip(pair[0].0.iter()) {
            gradient_sum += (curr - prev).abs();
        }
    }

    let texture_energy = energy_sum / (n_frames as f64 * n_blocks as f64 * AREA);
    let texture_gradient = if n_frames > 1 {
        gradient_sum / ((n_frames - 1) as f64 * n_blocks as f64 * AREA)
    } else {
        0.0
    };
    let mean_luma = luma_sum / (n_frames as f64 * expected as f64);

    Ok(SegmentFeatures {
        segment_id: id.to_string(),
        texture_energy,
        texture_gradient,
        mean_luma,
    })
}

/// Features of a decoded segment.
pub fn segment_features(segment: &Segment) -> Result<SegmentFeatures> {
    let planes: Vec<&[u8]> = segment.frames.iter().map(|f| f.luma.as_slice()).collect();
    let (width, height) = match segment.frames.first() {
        Some(f) => (f.width as usize, f.height as usize),
        None => return Err(Error::EmptySegment(segment.id.clone())),
    };
    features_impl(&segment.id, &planes, width, height)
}

/// Features of real-valued luma planes; mainly for tests and synthetic
/// content that should not be quantized to 8 bits first.
pub fn features_from_planes(
    id: &str,
    planes: &[Vec<f64>],
    width: usize,
    height: usize,
) -> Result<SegmentFeatures> {
    let refs: Vec<&[f64]> = planes.iter().map(Vec::as_slice).collect();
    features_impl(id, &refs, width, height)
}

/// Write the features CSV: `segment_id,E_Y,h,L_Y`, six decimals.
pub fn write_features_csv<W: Write>(mut w: W, features: &[SegmentFeatures]) -> Result<()> {
    writeln!(w, "segment_id,E_Y,h,L_Y")?;
    for f in features {
        writeln!(
            w,
            "{},{:.6},{:.6},{:.6}",
            f.segment_id, f.texture_energy, f.texture_gradient, f.mean_luma
        )?;
    }
    Ok(())
}

/// Read a features CSV produced by [`write_features_csv`] (or anything with
/// the same `segment_id,E_Y,h,L_Y` header).
pub fn read_features_csv<R: Read>(reader: R, source_name: &str) -> Result<Vec<SegmentFeatures>> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr.headers().map_err(|e| csv_error(source_name, 1, &e))?.clone();
    let expected = ["segment_id", "E_Y", "h", "L_Y"];
    if headers.iter().collect::<Vec<_>>() != expected {
        return Err(Error::CsvData {
            source_name: source_name.to_string(),
            line: 1,
            msg: format!("expected header `{}`", expected.join(",")),
        });
    }

    let mut out = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let line = i as u64 + 2;
        let record = record.map_err(|e| csv_error(source_name, line, &e))?;
        let field = |idx: usize| -> Result<f64> {
            record[idx].parse::<f64>().map_err(|_| Error::CsvData {
                source_name: source_name.to_string(),
                line,
                msg: format!("`{}` is not a number", &record[idx]),
            })
        };
        out.push(SegmentFeatures {
            segment_id: record[0].to_string(),
            texture_energy: field(1)?,
            texture_gradient: field(2)?,
            mean_luma: field(3)?,
        });
    }
    Ok(out)
}

fn csv_error(source_name: &str, line: u64, err: &dyn std::fmt::Display) -> Error {
    Error::CsvData {
        source_name: source_name.to_string(),
        line,
        msg: err.to_string(),
    }
}

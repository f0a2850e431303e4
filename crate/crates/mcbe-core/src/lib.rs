//! Energy-aware multi-codec bitrate-ladder estimation.
//!
//! Streaming services encode every title into a ladder of representations
//! per codec. Many of those representations are redundant: their quality
//! difference is below what a viewer can notice, or an older codec already
//! delivers the same quality at the same bitrate. This crate predicts the
//! perceptual quality (VMAF) of every ladder rung from cheap video
//! complexity features, prunes the redundant rungs, and accounts for the
//! encoding, storage and transmission energy the pruning saves.
//!
//! The pipeline, module by module:
//!
//! 1. [`y4m`] parses raw YUV4MPEG2 video and slices it into fixed-duration
//!    segments.
//! 2. [`features`] reduces each segment to a DCT-energy complexity triple:
//!    spatial texture `E_Y`, temporal texture change `h`, mean luma `L_Y`.
//! 3. [`forest`] trains and queries deterministic per-(codec, resolution)
//!    random-forest VMAF predictors over `(E_Y, h, L_Y, bitrate)`.
//! 4. [`eliminate`] runs the two-step pruning: a JND/ceiling pass within
//!    each codec, then a cross-codec pass against the baseline codec's RD
//!    curve.
//! 5. [`energy`] compares the optimized rung set against the full ladder in
//!    joules, bits and watt-hours; [`playlist`] renders the survivors as an
//!    HLS master playlist.
//!
//! Everything is deterministic by construction: same inputs, same seed,
//! same bytes out.

pub mod eliminate;
pub mod energy;
mod error;
pub mod features;
pub mod forest;
pub mod ladder;
pub mod playlist;
pub mod y4m;

pub use error::{Error, Result};

//! Domain types for multi-codec bitrate ladders and their validation.
//!
//! A ladder file lists the codecs in play (with a priority order; priority 0
//! is the baseline codec every client can decode) and a flat list of rungs.
//! [`validate_ladder`] turns that wire form into a [`MultiCodecLadder`] whose
//! invariants the rest of the pipeline relies on: codecs sorted by priority,
//! rungs grouped per codec and sorted by strictly ascending bitrate.

use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};

/// One codec in the ladder. Priority 0 is the baseline codec: the universally
/// decodable one whose RD curve gates every higher-priority codec.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Codec {
    pub id: String,
    pub priority: u32,
}

/// Frame dimensions plus an optional display label such as `1080p`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Resolution {
    pub width: u32,
    pub height: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

impl Resolution {
    pub fn new(width: u32, height: u32) -> Self {
        Resolution {
            width,
            height,
            label: None,
        }
    }

    pub fn labeled(width: u32, height: u32, label: &str) -> Self {
        Resolution {
            width,
            height,
            label: Some(label.to_string()),
        }
    }

    /// Dimensions must be positive and even (4:2:0 chroma subsampling).
    pub fn validate(&self) -> Result<()> {
        if self.width == 0 || self.height == 0 || self.width % 2 != 0 || self.height % 2 != 0 {
            return Err(Error::BadResolution {
                width: self.width,
                height: self.height,
            });
        }
        Ok(())
    }
}

impl std::fmt::Display for Resolution {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}x{}", self.width, self.height)
    }
}

/// The seven 16:9 rung heights used by default: 360p through 2160p.
pub fn default_resolutions() -> Vec<Resolution> {
    [
        (640, 360, "360p"),
        (768, 432, "432p"),
        (960, 540, "540p"),
        (1280, 720, "720p"),
        (1920, 1080, "1080p"),
        (2560, 1440, "1440p"),
        (3840, 2160, "2160p"),
    ]
    .iter()
    .map(|&(w, h, l)| Resolution::labeled(w, h, l))
    .collect()
}

/// One representation: a (codec, resolution, bitrate) encode target,
/// optionally annotated with a measured or predicted VMAF score.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rung {
    pub codec: String,
    #[serde(flatten)]
    pub resolution: Resolution,
    pub bitrate_bps: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vmaf: Option<f64>,
}

impl Rung {
    /// The identity of a rung for set comparisons: VMAF annotations and
    /// labels do not participate.
    pub fn identity(&self) -> (&str, u32, u32, u64) {
        (
            &self.codec,
            self.resolution.width,
            self.resolution.height,
            self.bitrate_bps,
        )
    }
}

/// Wire format of a ladder file: flat codec and rung lists, any order.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct LadderDoc {
    pub codecs: Vec<Codec>,
    pub rungs: Vec<Rung>,
}

/// A validated ladder. Codecs are ordered by ascending priority and each
/// codec's rungs by strictly ascending bitrate.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiCodecLadder {
    codecs: Vec<Codec>,
    rungs: Vec<Vec<Rung>>,
}

impl MultiCodecLadder {
    /// Codecs in priority order; index 0 is the baseline.
    pub fn codecs(&self) -> &[Codec] {
        &self.codecs
    }

    /// Rungs of the codec at `index` (same indexing as [`codecs`](Self::codecs)).
    pub fn codec_rungs(&self, index: usize) -> &[Rung] {
        &self.rungs[index]
    }

    /// The baseline codec and its rungs.
    pub fn baseline(&self) -> (&Codec, &[Rung]) {
        (&self.codecs[0], &self.rungs[0])
    }

    /// All rungs in (priority, bitrate) order.
    pub fn all_rungs(&self) -> impl Iterator<Item = &Rung> {
        self.rungs.iter().flatten()
    }

    pub fn rung_count(&self) -> usize {
        self.rungs.iter().map(Vec::len).sum()
    }

    /// Back to the wire form, preserving the validated ordering.
    pub fn to_doc(&self) -> LadderDoc {
        LadderDoc {
            codecs: self.codecs.clone(),
            rungs: self.all_rungs().cloned().collect(),
        }
    }

    /// Rebuild the ladder with each rung replaced by `f(rung)`. The mapping
    /// must keep codec and bitrate intact (it is meant for attaching VMAF
    /// annotations), so the validated structure carries over.
    pub fn map_rungs<F>(&self, mut f: F) -> Result<MultiCodecLadder>
    where
        F: FnMut(&Rung) -> Result<Rung>,
    {
        let mut rungs = Vec::with_capacity(self.rungs.len());
        for per_codec in &self.rungs {
            let mut mapped = Vec::with_capacity(per_codec.len());
            for rung in per_codec {
                let out = f(rung)?;
                debug_assert_eq!(out.identity(), rung.identity());
                mapped.push(out);
            }
            rungs.push(mapped);
        }
        Ok(MultiCodecLadder {
            codecs: self.codecs.clone(),
            rungs,
        })
    }
}

/// Validate a ladder document and normalize its ordering.
///
/// Checks: at least one codec, unique non-empty codec ids, priorities unique
/// and contiguous from 0, every rung referencing a known codec, positive even
/// dimensions, positive bitrates, VMAF (when present) within [0, 100], at
/// least one rung per codec, and no duplicate bitrate within a codec.
/// Rungs may arrive in any order; they come out sorted by ascending bitrate.
pub fn validate_ladder(doc: &LadderDoc) -> Result<MultiCodecLadder> {
    if doc.codecs.is_empty() {
        return Err(Error::EmptyCodecList);
    }
    let mut ids = BTreeSet::new();
    for codec in &doc.codecs {
        if codec.id.is_empty() {
            return Err(Error::EmptyCodecId);
        }
        if !ids.insert(codec.id.as_str()) {
            return Err(Error::DuplicateCodec(codec.id.clone()));
        }
    }

    let mut codecs = doc.codecs.clone();
    codecs.sort_by_key(|c| c.priority);
    let priorities: Vec<u32> = codecs.iter().map(|c| c.priority).collect();
    if priorities
        .iter()
        .enumerate()
        .any(|(i, &p)| p != i as u32)
    {
        return Err(Error::BadPriorities(priorities));
    }

    let index_of: BTreeMap<&str, usize> = codecs
        .iter()
        .enumerate()
        .map(|(i, c)| (c.id.as_str(), i))
        .collect();

    let mut rungs: Vec<Vec<Rung>> = vec![Vec::new(); codecs.len()];
    for rung in &doc.rungs {
        let &slot = index_of
            .get(rung.codec.as_str())
            .ok_or_else(|| Error::UnknownCodec(rung.codec.clone()))?;
        rung.resolution.validate()?;
        if rung.bitrate_bps == 0 {
            return Err(Error::ZeroBitrate(rung.codec.clone()));
        }
        if let Some(v) = rung.vmaf {
            if !(0.0..=100.0).contains(&v) || v.is_nan() {
                return Err(Error::VmafOutOfRange(v));
            }
        }
        rungs[slot].push(rung.clone());
    }

    for (codec, per_codec) in codecs.iter().zip(rungs.iter_mut()) {
        if per_codec.is_empty() {
            return Err(Error::EmptyCodecLadder(codec.id.clone()));
        }
        per_codec.sort_by_key(|r| r.bitrate_bps);
        for pair in per_codec.windows(2) {
            if pair[0].bitrate_bps == pair[1].bitrate_bps {
                return Err(Error::DuplicateBitrate {
                    codec: codec.id.clone(),
                    bitrate_bps: pair[0].bitrate_bps,
                });
            }
        }
    }

    Ok(MultiCodecLadder { codecs, rungs })
}

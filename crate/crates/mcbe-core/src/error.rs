use thiserror::Error;

/// Convenience alias used across the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong between reading inputs and writing reports.
///
/// Variants are grouped by pipeline stage. I/O and JSON errors pass through
/// so callers can distinguish environment failures from bad data.
#[derive(Debug, Error)]
pub enum Error {
    // Ladder validation.
    #[error("ladder has no codecs")]
    EmptyCodecList,
    #[error("codec id must be non-empty")]
    EmptyCodecId,
    #[error("duplicate codec id `{0}`")]
    DuplicateCodec(String),
    #[error("codec priorities must be unique and contiguous from 0, got {0:?}")]
    BadPriorities(Vec<u32>),
    #[error("codec `{0}` has no rungs")]
    EmptyCodecLadder(String),
    #[error("rung references unknown codec `{0}`")]
    UnknownCodec(String),
    #[error("duplicate bitrate {bitrate_bps} bps within codec `{codec}`")]
    DuplicateBitrate { codec: String, bitrate_bps: u64 },
    #[error("bitrate must be positive in codec `{0}`")]
    ZeroBitrate(String),
    #[error("resolution {width}x{height} must have positive even dimensions")]
    BadResolution { width: u32, height: u32 },
    #[error("vmaf {0} is outside [0, 100]")]
    VmafOutOfRange(f64),

    // Y4M ingest.
    #[error("not a YUV4MPEG2 stream (bad magic)")]
    BadMagic,
    #[error("malformed Y4M header: {0}")]
    BadHeader(String),
    #[error("unsupported Y4M colorspace `{0}` (only 8-bit 4:2:0 variants)")]
    UnsupportedColorspace(String),
    #[error("malformed frame marker before frame {0}")]
    BadFrameMarker(u64),
    #[error("truncated Y4M payload in frame {0}")]
    TruncatedFrame(u64),
    #[error("frame rate unknown: header has no F tag and no override was given")]
    UnknownFrameRate,

    // Feature extraction.
    #[error("segment `{0}` has no frames")]
    EmptySegment(String),
    #[error("frame plane size mismatch: expected {expected} luma samples, got {got}")]
    PlaneSizeMismatch { expected: usize, got: usize },

    // Model training and the model bank.
    #[error("need at least 2 training samples per model, got {0}")]
    TooFewSamples(usize),
    #[error("training samples mix model keys `{0}` and `{1}`")]
    MixedTrainingKeys(String, String),
    #[error("no model for `{0}` in the bank")]
    MissingModel(String),
    #[error("model bank version mismatch: expected `{expected}`, found `{found}`")]
    BankVersion { expected: String, found: String },
    #[error("model bank checksum mismatch (file corrupt or hand-edited)")]
    BankChecksum,
    #[error("corrupt model for `{key}`: {detail}")]
    CorruptModel { key: String, detail: String },

    // Elimination.
    #[error("rung (codec `{codec}`, {bitrate_bps} bps) has no VMAF; predict before eliminating")]
    MissingVmaf { codec: String, bitrate_bps: u64 },
    #[error("cannot interpolate over an empty RD curve")]
    EmptyCurve,
    #[error("invalid elimination config: {0}")]
    BadConfig(String),

    // Energy accounting.
    #[error("no encode energy coefficient for codec `{0}`")]
    MissingEnergyCoefficient(String),
    #[error("baseline scenario has a zero-valued component; relative deltas are undefined")]
    ZeroBaseline,
    #[error("invalid energy parameters: {0}")]
    BadEnergyParams(String),

    // Tabular inputs.
    #[error("{source_name}:{line}: {msg}")]
    CsvData {
        source_name: String,
        line: u64,
        msg: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

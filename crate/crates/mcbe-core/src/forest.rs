//! Per-(codec, resolution) VMAF predictors: random forests of CART
//! regression trees, built for reproducibility rather than raw speed.
//!
//! Determinism contract: training the same samples with the same seed yields
//! bit-identical models (and therefore byte-identical bank files). Bootstrap
//! resampling is driven by a ChaCha8 stream keyed by `(seed, tree_index)`,
//! split search iterates features and thresholds in a fixed order, and ties
//! keep the first candidate (lowest feature index, then lowest threshold).
//!
//! Feature layout everywhere: `[E_Y, h, L_Y, bitrate_bps]`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::str::FromStr;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::features::SegmentFeatures;
use crate::ladder::{MultiCodecLadder, Rung};

/// Number of predictor inputs.
pub const FEATURE_COUNT: usize = 4;

/// Input names in model order.
pub const FEATURE_NAMES: [&str; FEATURE_COUNT] = ["E_Y", "h", "L_Y", "bitrate_bps"];

/// Bank file format version; bump on breaking layout changes.
pub const BANK_VERSION: &str = "mcbe-bank-v1";

/// Forest shape. The defaults are the tuned operating point: deep enough to
/// memorize rate-quality curves, cheap enough to train in seconds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hyperparameters {
    pub n_estimators: usize,
    pub max_depth: usize,
    pub min_samples_split: usize,
    pub min_samples_leaf: usize,
}

impl Default for Hyperparameters {
    fn default() -> Self {
        Hyperparameters {
            n_estimators: 100,
            max_depth: 14,
            min_samples_split: 2,
            min_samples_leaf: 1,
        }
    }
}

/// One labeled observation: a segment's features at one encode target.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingSample {
    pub codec: String,
    pub width: u32,
    pub height: u32,
    /// `[E_Y, h, L_Y, bitrate_bps]`.
    pub features: [f64; FEATURE_COUNT],
    pub vmaf: f64,
}

impl TrainingSample {
    pub fn key(&self) -> ModelKey {
        ModelKey {
            codec: self.codec.clone(),
            width: self.width,
            height: self.height,
        }
    }
}

/// Bank lookup key; renders as `codec@WxH`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct ModelKey {
    pub codec: String,
    pub width: u32,
    pub height: u32,
}

impl std::fmt::Display for ModelKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}@{}x{}", self.codec, self.width, self.height)
    }
}

impl FromStr for ModelKey {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let bad = || format!("bad model key `{s}`, expected codec@WxH");
        let (codec, dims) = s.rsplit_once('@').ok_or_else(bad)?;
        let (w, h) = dims.split_once('x').ok_or_else(bad)?;
        if codec.is_empty() {
            return Err(bad());
        }
        Ok(ModelKey {
            codec: codec.to_string(),
            width: w.parse().map_err(|_| bad())?,
            height: h.parse().map_err(|_| bad())?,
        })
    }
}

impl Serialize for ModelKey {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for ModelKey {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Tree node. An explicit array with indices keeps the serialized form
/// readable and the traversal allocation-free.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TreeNode {
    Split {
        feature: u8,
        threshold: f64,
        left: u32,
        right: u32,
    },
    Leaf {
        value: f64,
    },
}

/// A CART regression tree; the root is `nodes[0]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    pub nodes: Vec<TreeNode>,
}

impl DecisionTree {
    pub fn predict(&self, x: &[f64; FEATURE_COUNT]) -> f64 {
        let mut at = 0usize;
        loop {
            match &self.nodes[at] {
                TreeNode::Leaf { value } => return *value,
                TreeNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    at = if x[*feature as usize] <= *threshold {
                        *left as usize
                    } else {
                        *right as usize
                    };
                }
            }
        }
    }

    /// Longest root-to-leaf path, counted in splits.
    pub fn depth(&self) -> usize {
        fn walk(nodes: &[TreeNode], at: usize) -> usize {
            match &nodes[at] {
                TreeNode::Leaf { .. } => 0,
                TreeNode::Split { left, right, .. } => {
                    1 + walk(nodes, *left as usize).max(walk(nodes, *right as usize))
                }
            }
        }
        walk(&self.nodes, 0)
    }

    fn validate(&self) -> std::result::Result<(), String> {
        if self.nodes.is_empty() {
            return Err("tree has no nodes".into());
        }
        let n = self.nodes.len() as u32;
        for (i, node) in self.nodes.iter().enumerate() {
            if let TreeNode::Split {
                feature,
                left,
                right,
                threshold,
            } = node
            {
                if *feature as usize >= FEATURE_COUNT {
                    return Err(format!("node {i}: feature {feature} out of range"));
                }
                if *left >= n || *right >= n || *left as usize <= i || *right as usize <= i {
                    return Err(format!("node {i}: child index out of order"));
                }
                if !threshold.is_finite() {
                    return Err(format!("node {i}: non-finite threshold"));
                }
            }
        }
        Ok(())
    }
}

/// A trained forest for one (codec, resolution).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestModel {
    pub hyperparameters: Hyperparameters,
    pub training_seed: u64,
    pub n_training_samples: usize,
    pub feature_names: Vec<String>,
    pub trees: Vec<DecisionTree>,
}

impl ForestModel {
    /// Mean of the per-tree predictions, clamped to the VMAF range.
    pub fn predict(&self, x: &[f64; FEATURE_COUNT]) -> f64 {
        let sum: f64 = self.trees.iter().map(|t| t.predict(x)).sum();
        (sum / self.trees.len() as f64).clamp(0.0, 100.0)
    }

    fn validate(&self) -> std::result::Result<(), String> {
        if self.trees.is_empty() {
            return Err("model has no trees".into());
        }
        if self.trees.len() != self.hyperparameters.n_estimators {
            return Err(format!(
                "tree count {} does not match n_estimators {}",
                self.trees.len(),
                self.hyperparameters.n_estimators
            ));
        }
        for (i, tree) in self.trees.iter().enumerate() {
            tree.validate().map_err(|e| format!("tree {i}: {e}"))?;
            if tree.depth() > self.hyperparameters.max_depth {
                return Err(format!(
                    "tree {i} depth {} exceeds max_depth {}",
                    tree.depth(),
                    self.hyperparameters.max_depth
                ));
            }
        }
        Ok(())
    }
}

fn tree_rng(seed: u64, tree_index: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&tree_index.to_le_bytes());
    ChaCha8Rng::from_seed(key)
}

/// Train one forest. All samples must share a (codec, resolution) key and
/// carry targets within [0, 100]; at least two samples are required.
pub fn train_forest(samples: &[TrainingSample], seed: u64) -> Result<ForestModel> {
    train_forest_with(samples, seed, &Hyperparameters::default())
}

pub fn train_forest_with(
    samples: &[TrainingSample],
    seed: u64,
    params: &Hyperparameters,
) -> Result<ForestModel> {
    if samples.len() < 2 {
        return Err(Error::TooFewSamples(samples.len()));
    }
    let key = samples[0].key();
    for s in samples {
        if s.key() != key {
            return Err(Error::MixedTrainingKeys(
                key.to_string(),
                s.key().to_string(),
            ));
        }
        if !(0.0..=100.0).contains(&s.vmaf) || s.vmaf.is_nan() {
            return Err(Error::VmafOutOfRange(s.vmaf));
        }
    }

    let xs: Vec<[f64; FEATURE_COUNT]> = samples.iter().map(|s| s.features).collect();
    let ys: Vec<f64> = samples.iter().map(|s| s.vmaf).collect();
    let n = xs.len();

    let build = |tree_index: usize| -> DecisionTree {
        let mut rng = tree_rng(seed, tree_index as u64);
        let indices: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
        grow_tree(&xs, &ys, indices, params)
    };

    #[cfg(feature = "parallel")]
    let trees: Vec<DecisionTree> = (0..params.n_estimators)
        .into_par_iter()
        .map(build)
        .collect();
    #[cfg(not(feature = "parallel"))]
    let trees: Vec<DecisionTree> = (0..params.n_estimators).map(build).collect();

    Ok(ForestModel {
        hyperparameters: params.clone(),
        training_seed: seed,
        n_training_samples: n,
        feature_names: FEATURE_NAMES.iter().map(|s| s.to_string()).collect(),
        trees,
    })
}

struct CandidateSplit {
    feature: usize,
    threshold: f64,
    sse: f64,
}

fn grow_tree(
    xs: &[[f64; FEATURE_COUNT]],
    ys: &[f64],
    indices: Vec<usize>,
    params: &Hyperparameters,
) -> DecisionTree {
    let mut nodes = Vec::new();
    grow_node(xs, ys, indices, 0, params, &mut nodes);
    DecisionTree { nodes }
}

fn grow_node(
    xs: &[[f64; FEATURE_COUNT]],
    ys: &[f64],
    indices: Vec<usize>,
    depth: usize,
    params: &Hyperparameters,
    nodes: &mut Vec<TreeNode>,
) -> u32 {
    let slot = nodes.len() as u32;
    let mean = indices.iter().map(|&i| ys[i]).sum::<f64>() / indices.len() as f64;

    let splittable = depth < params.max_depth
        && indices.len() >= params.min_samples_split
        && !targets_constant(ys, &indices);
    let best = if splittable {
        best_split(xs, ys, &indices, params.min_samples_leaf)
    } else {
        None
    };

    match best {
        None => {
            nodes.push(TreeNode::Leaf { value: mean });
            slot
        }
        Some(split) => {
            // Stable partition keeps the bootstrap order inside each side, so
            // downstream float accumulation is order-deterministic.
            let (left, right): (Vec<usize>, Vec<usize>) = indices
                .into_iter()
                .partition(|&i| xs[i][split.feature] <= split.threshold);
            nodes.push(TreeNode::Split {
                feature: split.feature as u8,
                threshold: split.threshold,
                left: 0,
                right: 0,
            });
            let left_slot = grow_node(xs, ys, left, depth + 1, params, nodes);
            let right_slot = grow_node(xs, ys, right, depth + 1, params, nodes);
            if let TreeNode::Split { left, right, .. } = &mut nodes[slot as usize] {
                *left = left_slot;
                *right = right_slot;
            }
            slot
        }
    }
}

fn targets_constant(ys: &[f64], indices: &[usize]) -> bool {
    let first = ys[indices[0]];
    indices.iter().all(|&i| ys[i] == first)
}

/// Exhaustive split search: every feature, every midpoint between
/// consecutive distinct sorted values. Minimizes the summed SSE of the two
/// children; strict `<` while scanning (feature asc, threshold asc) keeps
/// the first of any tied candidates.
fn best_split(
    xs: &[[f64; FEATURE_COUNT]],
    ys: &[f64],
    indices: &[usize],
    min_samples_leaf: usize,
) -> Option<CandidateSplit> {
    let n = indices.len();
    let mut best: Option<CandidateSplit> = None;
    let mut pairs: Vec<(f64, f64)> = Vec::with_capacity(n);

    for feature in 0..FEATURE_COUNT {
        pairs.clear();
        pairs.extend(indices.iter().map(|&i| (xs[i][feature], ys[i])));
        // Stable sort: ties keep bootstrap order, fixing the accumulation
        // order below.
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));

        let mut total_sum = 0.0;
        let mut total_sq = 0.0;
        for &(_, y) in &pairs {
            total_sum += y;
            total_sq += y * y;
        }

        let mut left_sum = 0.0;
        let mut left_sq = 0.0;
        for k in 0..n - 1 {
            let y = pairs[k].1;
            left_sum += y;
            left_sq += y * y;
            let (a, b) = (pairs[k].0, pairs[k + 1].0);
            if a >= b {
                continue;
            }
            let n_left = k + 1;
            let n_right = n - n_left;
            if n_left < min_samples_leaf || n_right < min_samples_leaf {
                continue;
            }
            // Midpoint; if rounding lands on the right value, fall back to
            // the left so `x <= threshold` still realizes this partition.
            let mut threshold = (a + b) / 2.0;
            if threshold >= b {
                threshold = a;
            }
            let right_sum = total_sum - left_sum;
            let right_sq = total_sq - left_sq;
            let sse = (left_sq - left_sum * left_sum / n_left as f64)
                + (right_sq - right_sum * right_sum / n_right as f64);
            if best.as_ref().map_or(true, |b| sse < b.sse) {
                best = Some(CandidateSplit {
                    feature,
                    threshold,
                    sse,
                });
            }
        }
    }
    best
}

/// Mean absolute error of a model over a labeled set.
pub fn mean_absolute_error(model: &ForestModel, samples: &[TrainingSample]) -> f64 {
    let total: f64 = samples
        .iter()
        .map(|s| (model.predict(&s.features) - s.vmaf).abs())
        .sum();
    total / samples.len() as f64
}

/// Per-key training outcome, for operator-facing summaries.
#[derive(Debug, Clone, Serialize)]
pub struct TrainingSummary {
    pub key: ModelKey,
    pub samples: usize,
    pub training_mae: f64,
}

/// A versioned collection of forests keyed by (codec, resolution).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ModelBank {
    pub models: BTreeMap<ModelKey, ForestModel>,
}

/// Group samples by key and train one forest per key, all with the same
/// seed. Keys train in sorted order; the result is fully deterministic.
pub fn train_bank(samples: &[TrainingSample], seed: u64) -> Result<(ModelBank, Vec<TrainingSummary>)> {
    let mut grouped: BTreeMap<ModelKey, Vec<TrainingSample>> = BTreeMap::new();
    for s in samples {
        grouped.entry(s.key()).or_default().push(s.clone());
    }

    let mut bank = ModelBank::default();
    let mut summaries = Vec::with_capacity(grouped.len());
    for (key, group) in grouped {
        let model = train_forest(&group, seed)?;
        summaries.push(TrainingSummary {
            key: key.clone(),
            samples: group.len(),
            training_mae: mean_absolute_error(&model, &group),
        });
        bank.models.insert(key, model);
    }
    Ok((bank, summaries))
}

#[derive(Serialize, Deserialize)]
struct BankFile {
    version: String,
    checksum: String,
    models: serde_json::Value,
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// Checksum of the canonical (sorted-key, compact) JSON form of the models.
fn models_checksum(models: &serde_json::Value) -> Result<String> {
    let canonical = serde_json::to_string(models)?;
    Ok(hex(&Sha256::digest(canonical.as_bytes())))
}

/// Persist a bank: versioned JSON with a SHA-256 integrity checksum over the
/// model payload. Serialization is canonical, so equal banks produce
/// byte-identical files.
pub fn save_bank<W: Write>(mut writer: W, bank: &ModelBank) -> Result<()> {
    // Round-tripping through Value sorts object keys, making the checksum
    // independent of struct field order.
    let models = serde_json::to_value(&bank.models)?;
    let file = BankFile {
        version: BANK_VERSION.to_string(),
        checksum: models_checksum(&models)?,
        models,
    };
    serde_json::to_writer_pretty(&mut writer, &file)?;
    writer.write_all(b"\n")?;
    Ok(())
}

/// Load a bank, verifying version, checksum and structural sanity of every
/// model (node indices, tree counts, depth bounds).
pub fn load_bank<R: Read>(reader: R) -> Result<ModelBank> {
    let file: BankFile = serde_json::from_reader(reader)?;
    if file.version != BANK_VERSION {
        return Err(Error::BankVersion {
            expected: BANK_VERSION.to_string(),
            found: file.version,
        });
    }
    if models_checksum(&file.models)? != file.checksum {
        return Err(Error::BankChecksum);
    }
    let models: BTreeMap<ModelKey, ForestModel> = serde_json::from_value(file.models)?;
    for (key, model) in &models {
        model.validate().map_err(|detail| Error::CorruptModel {
            key: key.to_string(),
            detail,
        })?;
    }
    Ok(ModelBank { models })
}

/// Annotate every rung of a validated ladder with its predicted VMAF.
/// Fails if any (codec, resolution) in the ladder has no model.
pub fn predict_ladder(
    bank: &ModelBank,
    ladder: &MultiCodecLadder,
    features: &SegmentFeatures,
) -> Result<MultiCodecLadder> {
    ladder.map_rungs(|rung| {
        let key = ModelKey {
            codec: rung.codec.clone(),
            width: rung.resolution.width,
            height: rung.resolution.height,
        };
        let model = bank
            .models
            .get(&key)
            .ok_or_else(|| Error::MissingModel(key.to_string()))?;
        let x = [
            features.texture_energy,
            features.texture_gradient,
            features.mean_luma,
            rung.bitrate_bps as f64,
        ];
        Ok(Rung {
            vmaf: Some(model.predict(&x)),
            ..rung.clone()
        })
    })
}

/// Read training CSV rows:
/// `segment_id,codec,width,height,bitrate_bps,E_Y,h,L_Y,vmaf`.
/// Rejects targets outside [0, 100] and non-positive bitrates, naming the
/// offending line.
pub fn read_training_csv<R: Read>(reader: R, source_name: &str) -> Result<Vec<TrainingSample>> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    let data_err = |line: u64, msg: String| Error::CsvData {
        source_name: source_name.to_string(),
        line,
        msg,
    };

    let headers = rdr
        .headers()
        .map_err(|e| data_err(1, e.to_string()))?
        .clone();
    let expected = [
        "segment_id",
        "codec",
        "width",
        "height",
        "bitrate_bps",
        "E_Y",
        "h",
        "L_Y",
        "vmaf",
    ];
    if headers.iter().collect::<Vec<_>>() != expected {
        return Err(data_err(1, format!("expected header `{}`", expected.join(","))));
    }

    let mut samples = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let line = i as u64 + 2;
        let record = record.map_err(|e| data_err(line, e.to_string()))?;
        let num = |idx: usize| -> Result<f64> {
            record[idx]
                .parse::<f64>()
                .map_err(|_| data_err(line, format!("`{}` is not a number", &record[idx])))
        };
        let dim = |idx: usize| -> Result<u32> {
            record[idx]
                .parse::<u32>()
                .map_err(|_| data_err(line, format!("`{}` is not a valid dimension", &record[idx])))
        };

        let width = dim(2)?;
        let height = dim(3)?;
        let bitrate: u64 = record[4]
            .parse()
            .map_err(|_| data_err(line, format!("`{}` is not a valid bitrate", &record[4])))?;
        if bitrate == 0 {
            return Err(data_err(line, "bitrate_bps must be positive".into()));
        }
        let vmaf = num(8)?;
        if !(0.0..=100.0).contains(&vmaf) || vmaf.is_nan() {
            return Err(data_err(line, format!("vmaf {vmaf} is outside [0, 100]")));
        }
        samples.push(TrainingSample {
            codec: record[1].to_string(),
            width,
            height,
            features: [num(5)?, num(6)?, num(7)?, bitrate as f64],
            vmaf,
        });
    }
    Ok(samples)
}

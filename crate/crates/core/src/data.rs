//! Sparse feature/label containers, LIBSVM-format I/O, bias augmentation,
//! stratified splitting and the per-rank triple decomposition.
//!
//! File format: one instance per line, `label index:value index:value ...`,
//! whitespace separated, indices 1-based and strictly ascending. Internally
//! indices are 0-based. Labels may be any strictly increasing integer set;
//! they are remapped to consecutive ranks `1..=p` preserving numeric order,
//! and the original labels are kept so predictions can report them.

use std::fmt::Write as _;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::rng::SplitMix64;

#[derive(Debug, thiserror::Error)]
pub enum DataError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("fewer than 2 distinct labels in dataset ({distinct})")]
    TooFewLabels { distinct: usize },
    #[error("rank {rank} out of range 1..={p}")]
    RankOutOfRange { rank: usize, p: usize },
    #[error("rank {rank} has {count} instances, need at least {need}")]
    RankTooSmall {
        rank: usize,
        count: usize,
        need: usize,
    },
    #[error("label {label} at row {row} outside 1..={p}")]
    LabelOutOfRange { label: usize, row: usize, p: usize },
    #[error("rank {rank} absent from dataset")]
    RankMissing { rank: usize },
    #[error("feature indices not strictly increasing")]
    NonIncreasingIndex,
    #[error("non-finite feature value")]
    NonFiniteValue,
    #[error("{0}")]
    Invalid(String),
}

/// Sparse feature row: ordered `(index, value)` pairs with a cached squared
/// norm. Indices are 0-based and strictly increasing; zeros are not stored.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseVector {
    entries: Vec<(usize, f64)>,
    squared_norm: f64,
}

impl SparseVector {
    /// Builds a row from ordered pairs. Zero values are dropped; indices must
    /// be strictly increasing and values finite.
    pub fn new(entries: Vec<(usize, f64)>) -> Result<Self, DataError> {
        let mut prev: Option<usize> = None;
        for &(idx, val) in &entries {
            if let Some(p) = prev {
                if idx <= p {
                    return Err(DataError::NonIncreasingIndex);
                }
            }
            if !val.is_finite() {
                return Err(DataError::NonFiniteValue);
            }
            prev = Some(idx);
        }
        let entries: Vec<(usize, f64)> = entries.into_iter().filter(|&(_, v)| v != 0.0).collect();
        let squared_norm = entries.iter().map(|&(_, v)| v * v).sum();
        Ok(SparseVector {
            entries,
            squared_norm,
        })
    }

    pub fn empty() -> Self {
        SparseVector {
            entries: Vec::new(),
            squared_norm: 0.0,
        }
    }

    /// Dense slice to sparse row (test and demo convenience).
    pub fn from_dense(values: &[f64]) -> Self {
        let entries: Vec<(usize, f64)> = values
            .iter()
            .enumerate()
            .filter(|&(_, &v)| v != 0.0)
            .map(|(i, &v)| (i, v))
            .collect();
        let squared_norm = entries.iter().map(|&(_, v)| v * v).sum();
        SparseVector {
            entries,
            squared_norm,
        }
    }

    pub fn entries(&self) -> &[(usize, f64)] {
        &self.entries
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Cached `xᵀx`.
    pub fn squared_norm(&self) -> f64 {
        self.squared_norm
    }

    pub fn recompute_squared_norm(&self) -> f64 {
        self.entries.iter().map(|&(_, v)| v * v).sum()
    }

    pub fn max_index(&self) -> Option<usize> {
        self.entries.last().map(|&(i, _)| i)
    }

    /// `wᵀx`. Entries beyond `w.len()` are ignored, so a model can score
    /// rows that mention features unseen at training time.
    pub fn dot(&self, w: &[f64]) -> f64 {
        let mut acc = 0.0;
        for &(i, v) in &self.entries {
            if i < w.len() {
                acc += w[i] * v;
            }
        }
        acc
    }

    /// `w += coef * x`.
    pub fn axpy(&self, coef: f64, w: &mut [f64]) {
        for &(i, v) in &self.entries {
            w[i] += coef * v;
        }
    }

    /// Returns a copy with `(index, value)` appended; `index` must exceed the
    /// current maximum.
    pub fn with_appended(&self, index: usize, value: f64) -> Result<Self, DataError> {
        if let Some(last) = self.max_index() {
            if index <= last {
                return Err(DataError::NonIncreasingIndex);
            }
        }
        let mut entries = self.entries.clone();
        if value != 0.0 {
            entries.push((index, value));
        }
        let squared_norm = entries.iter().map(|&(_, v)| v * v).sum();
        Ok(SparseVector {
            entries,
            squared_norm,
        })
    }
}

/// Immutable dataset: sparse rows plus integer ranks `1..=p`.
#[derive(Clone, Debug)]
pub struct SparseDataset {
    rows: Vec<SparseVector>,
    labels: Vec<usize>,
    m: usize,
    p: usize,
    /// Rank `r` corresponds to original file label `label_map[r-1]`.
    label_map: Vec<i64>,
    /// `Some(value)` once every row carries the bias feature at index `m-1`.
    bias: Option<f64>,
}

impl SparseDataset {
    /// Assembles a dataset from parts, validating every invariant: labels in
    /// `1..=p` with every rank present, `m` past the largest feature index.
    pub fn from_parts(
        rows: Vec<SparseVector>,
        labels: Vec<usize>,
        p: usize,
        m: usize,
    ) -> Result<Self, DataError> {
        if rows.len() != labels.len() {
            return Err(DataError::Invalid(format!(
                "{} rows but {} labels",
                rows.len(),
                labels.len()
            )));
        }
        if p < 2 {
            return Err(DataError::TooFewLabels { distinct: p });
        }
        let mut seen = vec![false; p];
        for (row_idx, &y) in labels.iter().enumerate() {
            if y < 1 || y > p {
                return Err(DataError::LabelOutOfRange {
                    label: y,
                    row: row_idx,
                    p,
                });
            }
            seen[y - 1] = true;
        }
        if let Some(r) = seen.iter().position(|&s| !s) {
            return Err(DataError::RankMissing { rank: r + 1 });
        }
        for row in &rows {
            if let Some(mi) = row.max_index() {
                if mi >= m {
                    return Err(DataError::Invalid(format!(
                        "feature index {mi} exceeds feature count {m}"
                    )));
                }
            }
        }
        let label_map = (1..=p as i64).collect();
        Ok(SparseDataset {
            rows,
            labels,
            m,
            p,
            label_map,
            bias: None,
        })
    }

    pub fn n(&self) -> usize {
        self.rows.len()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn rows(&self) -> &[SparseVector] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &SparseVector {
        &self.rows[i]
    }

    /// Ranks in `1..=p`.
    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn label_map(&self) -> &[i64] {
        &self.label_map
    }

    /// Original file label for a rank.
    pub fn original_label(&self, rank: usize) -> i64 {
        self.label_map[rank - 1]
    }

    pub fn bias(&self) -> Option<f64> {
        self.bias
    }

    pub fn set_label_map(&mut self, map: Vec<i64>) -> Result<(), DataError> {
        if map.len() != self.p {
            return Err(DataError::Invalid(format!(
                "label map has {} entries for p={}",
                map.len(),
                self.p
            )));
        }
        self.label_map = map;
        Ok(())
    }

    /// Per-rank instance counts, index 0 holding rank 1.
    pub fn rank_counts(&self) -> Vec<usize> {
        let mut counts = vec![0usize; self.p];
        for &y in &self.labels {
            counts[y - 1] += 1;
        }
        counts
    }

    /// Loads a LIBSVM-format file. With `bias = Some(b)` every row gains the
    /// extra feature `(m, b)` and the feature count becomes `m + 1`.
    pub fn load_libsvm<P: AsRef<Path>>(path: P, bias: Option<f64>) -> Result<Self, DataError> {
        let file = std::fs::File::open(path)?;
        Self::read_libsvm(BufReader::new(file), bias)
    }

    pub fn read_libsvm<R: BufRead>(reader: R, bias: Option<f64>) -> Result<Self, DataError> {
        let (rows, raw_labels, m) = read_libsvm_rows(reader)?;
        let mut data = Self::from_raw_labeled(rows, &raw_labels, m)?;
        if let Some(b) = bias {
            data = data.augment_bias(b)?;
        }
        Ok(data)
    }

    /// Builds a dataset from rows and raw integer labels: any strictly
    /// increasing label set is remapped onto consecutive ranks `1..=p`
    /// preserving numeric order, and the original labels are retained.
    pub fn from_raw_labeled(
        rows: Vec<SparseVector>,
        raw_labels: &[i64],
        m: usize,
    ) -> Result<Self, DataError> {
        if rows.len() != raw_labels.len() {
            return Err(DataError::Invalid(format!(
                "{} rows but {} labels",
                rows.len(),
                raw_labels.len()
            )));
        }
        let mut distinct: Vec<i64> = raw_labels.to_vec();
        distinct.sort_unstable();
        distinct.dedup();
        if distinct.len() < 2 {
            return Err(DataError::TooFewLabels {
                distinct: distinct.len(),
            });
        }
        let p = distinct.len();
        let labels: Vec<usize> = raw_labels
            .iter()
            .map(|l| distinct.binary_search(l).expect("label in distinct set") + 1)
            .collect();
        for row in &rows {
            if let Some(mi) = row.max_index() {
                if mi >= m {
                    return Err(DataError::Invalid(format!(
                        "feature index {mi} exceeds feature count {m}"
                    )));
                }
            }
        }
        Ok(SparseDataset {
            rows,
            labels,
            m,
            p,
            label_map: distinct,
            bias: None,
        })
    }

    /// Appends the bias feature `(m, value)` to every row.
    pub fn augment_bias(self, value: f64) -> Result<Self, DataError> {
        if self.bias.is_some() {
            return Err(DataError::Invalid("dataset already bias-augmented".into()));
        }
        if !value.is_finite() || value == 0.0 {
            return Err(DataError::Invalid(format!("invalid bias value {value}")));
        }
        let m = self.m;
        let rows = self
            .rows
            .into_iter()
            .map(|r| r.with_appended(m, value))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(SparseDataset {
            rows,
            labels: self.labels,
            m: m + 1,
            p: self.p,
            label_map: self.label_map,
            bias: Some(value),
        })
    }

    /// Writes the dataset in LIBSVM format (1-based indices, original
    /// labels). An augmented dataset is written with the bias feature as an
    /// ordinary column.
    pub fn write_libsvm<P: AsRef<Path>>(&self, path: P) -> Result<(), DataError> {
        let file = std::fs::File::create(path)?;
        let mut out = BufWriter::new(file);
        let mut buf = String::new();
        for (row, &y) in self.rows.iter().zip(&self.labels) {
            buf.clear();
            write!(buf, "{}", self.original_label(y)).expect("write to string");
            for &(i, v) in row.entries() {
                write!(buf, " {}:{}", i + 1, fmt_f64(v)).expect("write to string");
            }
            buf.push('\n');
            out.write_all(buf.as_bytes())?;
        }
        out.flush()?;
        Ok(())
    }

    /// Dataset restricted to `indices` (order preserved). All ranks must
    /// remain present.
    pub fn subset(&self, indices: &[usize]) -> Result<Self, DataError> {
        let rows: Vec<SparseVector> = indices.iter().map(|&i| self.rows[i].clone()).collect();
        let labels: Vec<usize> = indices.iter().map(|&i| self.labels[i]).collect();
        let mut out = SparseDataset::from_parts(rows, labels, self.p, self.m)?;
        out.label_map = self.label_map.clone();
        out.bias = self.bias;
        Ok(out)
    }

    /// Deterministic stratified split: per rank, `round(count · fraction)`
    /// instances (at least 1, at most `count − 1`) go to the second part.
    pub fn stratified_split(
        &self,
        test_fraction: f64,
        seed: u64,
    ) -> Result<(Self, Self), DataError> {
        if !(test_fraction > 0.0 && test_fraction < 1.0) {
            return Err(DataError::Invalid(format!(
                "test fraction {test_fraction} outside (0, 1)"
            )));
        }
        let mut rng = SplitMix64::new(seed);
        let mut train_idx = Vec::new();
        let mut test_idx = Vec::new();
        for rank in 1..=self.p {
            let mut members: Vec<usize> =
                (0..self.n()).filter(|&i| self.labels[i] == rank).collect();
            if members.len() < 2 {
                return Err(DataError::RankTooSmall {
                    rank,
                    count: members.len(),
                    need: 2,
                });
            }
            rng.shuffle(&mut members);
            let want = (members.len() as f64 * test_fraction).round() as usize;
            let take = want.clamp(1, members.len() - 1);
            test_idx.extend_from_slice(&members[..take]);
            train_idx.extend_from_slice(&members[take..]);
        }
        train_idx.sort_unstable();
        test_idx.sort_unstable();
        Ok((self.subset(&train_idx)?, self.subset(&test_idx)?))
    }

    /// Triple decomposition for rank `k`: indices below / at / above the
    /// rank, plus the signed label `ỹ_i = +1` iff `y_i > k`, else `−1`.
    pub fn decompose(&self, k: usize) -> Result<RankDecomposition, DataError> {
        if k < 1 || k > self.p {
            return Err(DataError::RankOutOfRange { rank: k, p: self.p });
        }
        let mut left = Vec::new();
        let mut middle = Vec::new();
        let mut right = Vec::new();
        let mut signed = Vec::with_capacity(self.n());
        let mut middle_mask = vec![false; self.n()];
        for (i, &y) in self.labels.iter().enumerate() {
            if y < k {
                left.push(i);
            } else if y == k {
                middle.push(i);
                middle_mask[i] = true;
            } else {
                right.push(i);
            }
            signed.push(if y > k { 1.0 } else { -1.0 });
        }
        Ok(RankDecomposition {
            k,
            left,
            middle,
            right,
            signed,
            middle_mask,
        })
    }

    /// Total nonzero count, useful for sizing reports.
    pub fn nnz(&self) -> usize {
        self.rows.iter().map(|r| r.nnz()).sum()
    }
}

/// Index sets `L_k` (below), `I_k` (equal), `R_k` (above) for one rank, and
/// the per-instance signed labels used by the solvers.
#[derive(Clone, Debug)]
pub struct RankDecomposition {
    pub k: usize,
    pub left: Vec<usize>,
    pub middle: Vec<usize>,
    pub right: Vec<usize>,
    /// `+1.0` iff `y_i > k`, `−1.0` otherwise (middle instances get `−1`).
    pub signed: Vec<f64>,
    middle_mask: Vec<bool>,
}

impl RankDecomposition {
    /// True iff `y_i = k`, i.e. instance `i` belongs to `I_k`.
    pub fn is_middle(&self, i: usize) -> bool {
        self.middle_mask[i]
    }
}

/// Parses LIBSVM lines without touching the labels: returns sparse rows,
/// raw integer labels and the observed feature count. Prediction paths use
/// this so an unlabeled or single-label test file still loads.
pub fn read_libsvm_rows<R: BufRead>(
    reader: R,
) -> Result<(Vec<SparseVector>, Vec<i64>, usize), DataError> {
    let mut rows = Vec::new();
    let mut raw_labels: Vec<i64> = Vec::new();
    let mut m = 0usize;

    for (line_no, line) in reader.lines().enumerate() {
        let line_no = line_no + 1;
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let label_tok = tokens.next().expect("non-empty line has a first token");
        let label = parse_label(label_tok).ok_or_else(|| DataError::Parse {
            line: line_no,
            msg: format!("invalid label '{label_tok}'"),
        })?;

        let mut entries: Vec<(usize, f64)> = Vec::new();
        let mut prev_idx: Option<usize> = None;
        for tok in tokens {
            let (idx_s, val_s) = tok.split_once(':').ok_or_else(|| DataError::Parse {
                line: line_no,
                msg: format!("malformed feature token '{tok}'"),
            })?;
            let idx: usize = idx_s.parse().map_err(|_| DataError::Parse {
                line: line_no,
                msg: format!("invalid feature index '{idx_s}'"),
            })?;
            if idx == 0 {
                return Err(DataError::Parse {
                    line: line_no,
                    msg: "feature indices are 1-based".into(),
                });
            }
            let val: f64 = val_s.parse().map_err(|_| DataError::Parse {
                line: line_no,
                msg: format!("invalid feature value '{val_s}'"),
            })?;
            if !val.is_finite() {
                return Err(DataError::Parse {
                    line: line_no,
                    msg: format!("non-finite feature value '{val_s}'"),
                });
            }
            let internal = idx - 1;
            if let Some(p) = prev_idx {
                if internal <= p {
                    return Err(DataError::Parse {
                        line: line_no,
                        msg: format!("feature indices not strictly increasing at '{tok}'"),
                    });
                }
            }
            prev_idx = Some(internal);
            if val != 0.0 {
                entries.push((internal, val));
            }
            m = m.max(internal + 1);
        }
        let squared_norm = entries.iter().map(|&(_, v)| v * v).sum();
        rows.push(SparseVector {
            entries,
            squared_norm,
        });
        raw_labels.push(label);
    }
    Ok((rows, raw_labels, m))
}

fn parse_label(tok: &str) -> Option<i64> {
    if let Ok(v) = tok.parse::<i64>() {
        return Some(v);
    }
    // Accept float spellings of integers ("3.0"), common in the wild.
    let f: f64 = tok.parse().ok()?;
    if f.is_finite() && f.fract() == 0.0 && f.abs() < 9.0e15 {
        Some(f as i64)
    } else {
        None
    }
}

/// Shortest decimal round-trip formatting for data files.
fn fmt_f64(v: f64) -> String {
    let s = format!("{v}");
    debug_assert_eq!(s.parse::<f64>().ok(), Some(v));
    s
}

//! Text-to-sparse-features pipeline: lowercasing tokenizer, optional
//! stopword removal and stemming, unigram+bigram extraction, frequency
//! pruning and TF-IDF weighting with row-wise L2 normalization.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt::Write as _;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::sync::OnceLock;

use crate::data::{DataError, SparseDataset, SparseVector};

/// Bundled English stopword list (versioned with the crate).
pub const STOPWORDS_EN: &str = include_str!("../data/stopwords_en.txt");

#[derive(Debug, thiserror::Error)]
pub enum TextError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("vocabulary empty after pruning")]
    EmptyVocabulary,
    #[error("vocabulary file line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Data(#[from] DataError),
}

/// Pipeline switches. Defaults follow the common text-classification recipe:
/// unigrams and bigrams, stopword removal on, stemming off, terms kept when
/// they occur at least 3 times, appear in at most half the documents and
/// every component token has at least 2 characters.
#[derive(Clone, Debug, PartialEq)]
pub struct TextOptions {
    pub stem: bool,
    pub remove_stopwords: bool,
    pub min_count: usize,
    pub max_df_ratio: f64,
    pub min_token_len: usize,
    /// 1 = unigrams only, 2 = unigrams + bigrams.
    pub ngram_max: usize,
}

impl Default for TextOptions {
    fn default() -> Self {
        TextOptions {
            stem: false,
            remove_stopwords: true,
            min_count: 3,
            max_df_ratio: 0.5,
            min_token_len: 2,
            ngram_max: 2,
        }
    }
}

fn stopword_set() -> &'static HashSet<&'static str> {
    static SET: OnceLock<HashSet<&'static str>> = OnceLock::new();
    SET.get_or_init(|| {
        STOPWORDS_EN
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .collect()
    })
}

/// Lowercases and splits on any non-alphanumeric run, drops tokens shorter
/// than `min_token_len`, then applies stopword removal and stemming in that
/// order.
pub fn tokenize(text: &str, opts: &TextOptions) -> Vec<String> {
    let stopwords = if opts.remove_stopwords {
        Some(stopword_set())
    } else {
        None
    };
    let stemmer = opts
        .stem
        .then(|| rust_stemmers::Stemmer::create(rust_stemmers::Algorithm::English));
    let lower = text.to_lowercase();
    let mut tokens = Vec::new();
    for raw in lower.split(|c: char| !c.is_alphanumeric()) {
        if raw.chars().count() < opts.min_token_len {
            continue;
        }
        if let Some(sw) = &stopwords {
            if sw.contains(raw) {
                continue;
            }
        }
        let token = match &stemmer {
            Some(st) => st.stem(raw).into_owned(),
            None => raw.to_string(),
        };
        tokens.push(token);
    }
    tokens
}

/// Bigrams join adjacent tokens with a single space, which cannot occur
/// inside a token.
pub const NGRAM_SEP: char = ' ';

fn ngrams(tokens: &[String], ngram_max: usize) -> Vec<String> {
    let mut terms: Vec<String> = tokens.to_vec();
    if ngram_max >= 2 {
        for pair in tokens.windows(2) {
            let mut t = String::with_capacity(pair[0].len() + pair[1].len() + 1);
            t.push_str(&pair[0]);
            t.push(NGRAM_SEP);
            t.push_str(&pair[1]);
            terms.push(t);
        }
    }
    terms
}

/// Full document-to-terms pipeline.
pub fn extract_terms(text: &str, opts: &TextOptions) -> Vec<String> {
    ngrams(&tokenize(text, opts), opts.ngram_max)
}

/// Term table: contiguous feature indices assigned in lexicographic order,
/// per-term document frequency, and the corpus size for IDF.
#[derive(Clone, Debug, PartialEq)]
pub struct Vocabulary {
    terms: Vec<String>,
    dfs: Vec<usize>,
    index: HashMap<String, usize>,
    docs: usize,
    options: TextOptions,
}

impl Vocabulary {
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn docs(&self) -> usize {
        self.docs
    }

    pub fn options(&self) -> &TextOptions {
        &self.options
    }

    pub fn term(&self, index: usize) -> &str {
        &self.terms[index]
    }

    pub fn df(&self, index: usize) -> usize {
        self.dfs[index]
    }

    pub fn index_of(&self, term: &str) -> Option<usize> {
        self.index.get(term).copied()
    }

    /// Smoothed inverse document frequency `ln((1+N)/(1+df)) + 1`.
    pub fn idf(&self, index: usize) -> f64 {
        ((1.0 + self.docs as f64) / (1.0 + self.dfs[index] as f64)).ln() + 1.0
    }
}

/// Builds the vocabulary: term and document frequencies over unigrams and
/// bigrams, then pruning by minimum corpus count and maximum document
/// frequency. Token-length pruning already happened in the tokenizer.
pub fn build_vocab<S: AsRef<str>>(docs: &[S], opts: &TextOptions) -> Result<Vocabulary, TextError> {
    let mut counts: BTreeMap<String, (usize, usize)> = BTreeMap::new(); // term -> (count, df)
    for doc in docs {
        let terms = extract_terms(doc.as_ref(), opts);
        let mut seen: HashSet<&str> = HashSet::new();
        for term in &terms {
            let entry = counts.entry(term.clone()).or_insert((0, 0));
            entry.0 += 1;
        }
        for term in &terms {
            if seen.insert(term) {
                counts.get_mut(term.as_str()).expect("term counted").1 += 1;
            }
        }
    }
    let n_docs = docs.len();
    let max_df = opts.max_df_ratio * n_docs as f64;
    let mut terms = Vec::new();
    let mut dfs = Vec::new();
    for (term, (count, df)) in counts {
        if count < opts.min_count {
            continue;
        }
        if df as f64 > max_df {
            continue;
        }
        terms.push(term);
        dfs.push(df);
    }
    if terms.is_empty() {
        return Err(TextError::EmptyVocabulary);
    }
    let index = terms
        .iter()
        .enumerate()
        .map(|(i, t)| (t.clone(), i))
        .collect();
    Ok(Vocabulary {
        terms,
        dfs,
        index,
        docs: n_docs,
        options: opts.clone(),
    })
}

/// TF-IDF row for one document: raw term counts weighted by smoothed IDF,
/// L2-normalized. Out-of-vocabulary terms are dropped; a document with no
/// known terms becomes the empty row.
pub fn vectorize(doc: &str, vocab: &Vocabulary) -> SparseVector {
    let mut counts: BTreeMap<usize, f64> = BTreeMap::new();
    for term in extract_terms(doc, &vocab.options) {
        if let Some(idx) = vocab.index_of(&term) {
            *counts.entry(idx).or_insert(0.0) += 1.0;
        }
    }
    let mut entries: Vec<(usize, f64)> = counts
        .into_iter()
        .map(|(idx, tf)| (idx, tf * vocab.idf(idx)))
        .collect();
    let norm = entries.iter().map(|&(_, v)| v * v).sum::<f64>().sqrt();
    if norm > 0.0 {
        for e in &mut entries {
            e.1 /= norm;
        }
    }
    SparseVector::new(entries).expect("sorted map yields increasing indices")
}

/// Featurizes a labeled corpus into a dataset: TF-IDF rows over `vocab`,
/// integer labels remapped onto consecutive ranks preserving order.
pub fn corpus_to_dataset(
    labels: &[i64],
    docs: &[String],
    vocab: &Vocabulary,
) -> Result<SparseDataset, TextError> {
    assert_eq!(labels.len(), docs.len());
    let rows: Vec<SparseVector> = docs.iter().map(|d| vectorize(d, vocab)).collect();
    Ok(SparseDataset::from_raw_labeled(rows, labels, vocab.len())?)
}

impl Vocabulary {
    /// Text serialization: header with corpus size and the pipeline options,
    /// then one `index<TAB>df<TAB>term` line per term (terms may contain the
    /// bigram separator, so they come last).
    pub fn save<P: AsRef<Path>>(&self, path: P) -> Result<(), TextError> {
        let file = std::fs::File::create(path)?;
        let mut out = BufWriter::new(file);
        let mut buf = String::new();
        writeln!(out, "npsvor-vocab 1")?;
        writeln!(out, "docs {}", self.docs)?;
        writeln!(out, "terms {}", self.terms.len())?;
        writeln!(
            out,
            "options stem={} stopwords={} min_count={} max_df={} min_len={} ngram_max={}",
            u8::from(self.options.stem),
            u8::from(self.options.remove_stopwords),
            self.options.min_count,
            self.options.max_df_ratio,
            self.options.min_token_len,
            self.options.ngram_max
        )?;
        for (i, (term, df)) in self.terms.iter().zip(&self.dfs).enumerate() {
            buf.clear();
            write!(buf, "{i}\t{df}\t{term}").expect("write to string");
            buf.push('\n');
            out.write_all(buf.as_bytes())?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn load<P: AsRef<Path>>(path: P) -> Result<Self, TextError> {
        let file = std::fs::File::open(path)?;
        let mut lines = BufReader::new(file).lines().enumerate();
        let mut next = |expect: &str| -> Result<(usize, String), TextError> {
            match lines.next() {
                Some((n, Ok(l))) => Ok((n + 1, l)),
                Some((_, Err(e))) => Err(TextError::Io(e)),
                None => Err(TextError::Parse {
                    line: 0,
                    msg: format!("missing {expect} line"),
                }),
            }
        };

        let (n, magic) = next("header")?;
        if magic.trim() != "npsvor-vocab 1" {
            return Err(TextError::Parse {
                line: n,
                msg: "not a vocabulary file".into(),
            });
        }
        let (n, docs_line) = next("docs")?;
        let docs: usize = docs_line
            .strip_prefix("docs ")
            .and_then(|s| s.trim().parse().ok())
            .ok_or_else(|| TextError::Parse {
                line: n,
                msg: "bad docs line".into(),
            })?;
        let (n, terms_line) = next("terms")?;
        let term_count: usize = terms_line
            .strip_prefix("terms ")
            .and_then(|s| s.trim().parse().ok())
            .ok_or_else(|| TextError::Parse {
                line: n,
                msg: "bad terms line".into(),
            })?;
        let (n, options_line) = next("options")?;
        let options = parse_options(&options_line).ok_or_else(|| TextError::Parse {
            line: n,
            msg: "bad options line".into(),
        })?;

        let mut terms = Vec::with_capacity(term_count);
        let mut dfs = Vec::with_capacity(term_count);
        for _ in 0..term_count {
            let (line_no, line) = next("term")?;
            let mut parts = line.splitn(3, '\t');
            let idx: usize =
                parts
                    .next()
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| TextError::Parse {
                        line: line_no,
                        msg: "bad term index".into(),
                    })?;
            let df: usize =
                parts
                    .next()
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| TextError::Parse {
                        line: line_no,
                        msg: "bad document frequency".into(),
                    })?;
            let term = parts.next().ok_or_else(|| TextError::Parse {
                line: line_no,
                msg: "missing term".into(),
            })?;
            if idx != terms.len() {
                return Err(TextError::Parse {
                    line: line_no,
                    msg: format!("term index {idx} out of order"),
                });
            }
            terms.push(term.to_string());
            dfs.push(df);
        }
        let index = terms
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i))
            .collect();
        Ok(Vocabulary {
            terms,
            dfs,
            index,
            docs,
            options,
        })
    }
}

fn parse_options(line: &str) -> Option<TextOptions> {
    let rest = line.strip_prefix("options ")?;
    let mut opts = TextOptions::default();
    for kv in rest.split_whitespace() {
        let (key, value) = kv.split_once('=')?;
        match key {
            "stem" => opts.stem = value == "1",
            "stopwords" => opts.remove_stopwords = value == "1",
            "min_count" => opts.min_count = value.parse().ok()?,
            "max_df" => opts.max_df_ratio = value.parse().ok()?,
            "min_len" => opts.min_token_len = value.parse().ok()?,
            "ngram_max" => opts.ngram_max = value.parse().ok()?,
            _ => return None,
        }
    }
    Some(opts)
}

//! Command-line interface: featurize / train / predict / cv / bench.
//!
//! Exit codes: 0 ok, 1 usage, 2 I/O, 3 numeric or validation failure.

mod commands;
mod settings;
mod table;

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;

#[derive(Parser, Debug)]
#[command(
    name = "npsvor",
    about = "Sparse linear ordinal regression: nonparallel-hyperplane models, \
             SVC/SVR/RedSVM baselines, text featurization, cross-validation and benchmarks",
    version,
    disable_help_subcommand = true
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

/// Solver knobs shared by train/cv/bench. Every field is optional here;
/// effective values resolve as command line > config file > defaults, and
/// the result is echoed to stderr for reproducibility.
#[derive(Args, Debug, Clone, Default)]
pub struct SolverOpts {
    /// Solver: npsvor-dcd2 (default), npsvor-dcd1, svc, svr, redsvm
    #[arg(short = 's', long = "solver")]
    pub solver: Option<String>,
    /// Cost C (sets C1 = C2)
    #[arg(short = 'c', long = "cost")]
    pub cost: Option<f64>,
    /// Override C2 separately from -c
    #[arg(long = "c2")]
    pub c2: Option<f64>,
    /// Insensitive-zone width epsilon
    #[arg(short = 'p', long = "epsilon")]
    pub epsilon: Option<f64>,
    /// Relative stopping tolerance
    #[arg(short = 't', long = "tolerance")]
    pub tolerance: Option<f64>,
    /// Bias feature value appended to every instance; <= 0 disables
    #[arg(short = 'B', long = "bias")]
    pub bias: Option<f64>,
    /// Disable the shrinking heuristic
    #[arg(long = "no-shrink")]
    pub no_shrink: bool,
    /// Hard cap on solver sweeps
    #[arg(long = "max-sweeps")]
    pub max_sweeps: Option<usize>,
    /// PRNG seed (permutations, splits, folds)
    #[arg(long = "seed")]
    pub seed: Option<u64>,
    /// Rank predictor for npsvor models: new (default) or old
    #[arg(short = 'r', long = "predictor")]
    pub predictor: Option<String>,
    /// Worker threads for per-rank training, CV folds and grid cells
    #[arg(short = 'j', long = "jobs")]
    pub jobs: Option<usize>,
    /// key = value config file; flags take precedence over it
    #[arg(long = "config")]
    pub config: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct FeaturizeOpts {
    /// Input corpus: one `label<TAB>text` document per line
    pub input: PathBuf,
    /// Output dataset in LIBSVM format
    pub output: PathBuf,
    /// Where to write the vocabulary
    #[arg(long = "vocab-out")]
    pub vocab_out: Option<PathBuf>,
    /// Reuse an existing vocabulary instead of building one
    #[arg(long = "vocab-in")]
    pub vocab_in: Option<PathBuf>,
    /// Apply English stemming
    #[arg(long = "stem")]
    pub stem: bool,
    /// Keep stopwords
    #[arg(long = "no-stopwords")]
    pub no_stopwords: bool,
    /// Minimum corpus occurrences for a term
    #[arg(long = "min-count", default_value_t = 3)]
    pub min_count: usize,
    /// Maximum document-frequency ratio for a term
    #[arg(long = "max-df", default_value_t = 0.5)]
    pub max_df: f64,
    /// Minimum token length
    #[arg(long = "min-token-len", default_value_t = 2)]
    pub min_token_len: usize,
    /// 1 = unigrams, 2 = unigrams + bigrams
    #[arg(long = "ngram-max", default_value_t = 2)]
    pub ngram_max: usize,
}

#[derive(Args, Debug, Clone)]
pub struct TrainOpts {
    #[command(flatten)]
    pub solver: SolverOpts,
    /// Training data (LIBSVM format)
    pub data: PathBuf,
    /// Output model file
    pub model: PathBuf,
}

#[derive(Args, Debug, Clone)]
pub struct PredictOpts {
    /// Override the predictor stored in the model (npsvor models)
    #[arg(short = 'r', long = "predictor")]
    pub predictor: Option<String>,
    /// Model file
    pub model: PathBuf,
    /// Test data (LIBSVM format)
    pub data: PathBuf,
    /// Output predictions, one original label per line
    pub output: PathBuf,
}

#[derive(Args, Debug, Clone)]
pub struct CvOpts {
    #[command(flatten)]
    pub solver: SolverOpts,
    /// Number of folds
    #[arg(short = 'v', long = "folds", default_value_t = 5)]
    pub folds: usize,
    /// log2 grid LO:STEP:HI for C (tied C1 = C2), e.g. -5:1:5
    #[arg(short = 'g', long = "grid", allow_hyphen_values = true)]
    pub grid: Option<String>,
    /// Separate log2 grid for C2: evaluates the full 2-D product
    #[arg(long = "grid-c2", allow_hyphen_values = true)]
    pub grid_c2: Option<String>,
    /// Machine-readable records written here (one line per fold/cell)
    #[arg(long = "records")]
    pub records: Option<PathBuf>,
    /// Training data (LIBSVM format)
    pub data: PathBuf,
}

#[derive(Subcommand, Debug)]
pub enum BenchCommand {
    /// Generate the synthetic sparse benchmark dataset
    Synth {
        /// Output path (LIBSVM format)
        output: PathBuf,
        /// Generator config file (key = value); bundled defaults otherwise
        #[arg(long = "spec")]
        spec: Option<PathBuf>,
        /// Override instance count
        #[arg(long)]
        n: Option<usize>,
        /// Override feature count
        #[arg(long)]
        m: Option<usize>,
        /// Override rank count
        #[arg(long)]
        p: Option<usize>,
        /// Override average nonzeros per row
        #[arg(long = "avg-nnz")]
        avg_nnz: Option<usize>,
        /// Override label noise
        #[arg(long)]
        noise: Option<f64>,
        /// Override generator seed
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Trace both dual solvers against a long-run reference optimum
    Convergence {
        #[command(flatten)]
        solver: SolverOpts,
        /// Rank whose subproblem is traced
        #[arg(short = 'k', long = "rank", default_value_t = 3)]
        rank: usize,
        /// Stop tracing once the relative difference falls below this
        #[arg(long = "floor", default_value_t = 1e-4)]
        floor: f64,
        /// Prefix for the two-column (seconds, rel-diff) trace files
        #[arg(long = "out")]
        out: Option<PathBuf>,
        /// Dataset (LIBSVM format)
        data: PathBuf,
    },
    /// MAE/MSE/time/support-vector ratios over an epsilon grid
    Epsilon {
        #[command(flatten)]
        solver: SolverOpts,
        /// Comma-separated epsilon grid (must include 0)
        #[arg(long = "grid", default_value = "0,0.1,0.2,0.3,0.4,0.5")]
        grid: String,
        /// Held-out fraction for the evaluation split
        #[arg(long = "test-fraction", default_value_t = 0.3)]
        test_fraction: f64,
        /// Dataset (LIBSVM format)
        data: PathBuf,
    },
    /// Compare the minimal-distance and ordered-decomposition predictors
    Predictors {
        #[command(flatten)]
        solver: SolverOpts,
        /// Held-out fraction for the evaluation split
        #[arg(long = "test-fraction", default_value_t = 0.3)]
        test_fraction: f64,
        /// Dataset (LIBSVM format)
        data: PathBuf,
    },
    /// Grid-search, retrain and test every requested method
    Methods {
        #[command(flatten)]
        solver: SolverOpts,
        /// Comma-separated method list
        #[arg(long = "methods", default_value = "svc,svr,redsvm,npsvor-dcd2")]
        methods: String,
        /// log2 grid LO:STEP:HI for C
        #[arg(
            short = 'g',
            long = "grid",
            default_value = "-5:1:5",
            allow_hyphen_values = true
        )]
        grid: String,
        #[arg(short = 'v', long = "folds", default_value_t = 5)]
        folds: usize,
        /// Held-out fraction for the final evaluation
        #[arg(long = "test-fraction", default_value_t = 0.3)]
        test_fraction: f64,
        /// Machine-readable records written here
        #[arg(long = "records")]
        records: Option<PathBuf>,
        /// Dataset (LIBSVM format)
        data: PathBuf,
    },
    /// 2-D arc geometry: ambiguity probes and predictor error comparison
    Arc {
        #[command(flatten)]
        solver: SolverOpts,
        #[arg(long = "per-rank", default_value_t = 60)]
        per_rank: usize,
        #[arg(long = "spread", default_value_t = 0.35)]
        spread: f64,
        #[arg(long = "arch", default_value_t = 1.5)]
        arch: f64,
        /// Seeded draws for the median-MAE comparison
        #[arg(long = "draws", default_value_t = 20)]
        draws: usize,
    },
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Turn a labeled text corpus into TF-IDF features (LIBSVM format)
    Featurize(FeaturizeOpts),
    /// Train a model and write it to disk
    Train(TrainOpts),
    /// Predict ranks for a dataset with a trained model
    Predict(PredictOpts),
    /// Cross-validate, optionally over a C grid
    Cv(CvOpts),
    /// Benchmarks and experiment reproductions
    Bench {
        #[command(subcommand)]
        command: BenchCommand,
    },
}

/// Error kinds mapped to process exit codes.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(String),
    Invalid(String),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Io(_) => 2,
            CliError::Invalid(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Io(m) | CliError::Invalid(m) => f.write_str(m),
        }
    }
}

impl From<npsvor::DataError> for CliError {
    fn from(e: npsvor::DataError) -> Self {
        match e {
            npsvor::DataError::Io(_) => CliError::Io(e.to_string()),
            _ => CliError::Invalid(e.to_string()),
        }
    }
}

impl From<npsvor::SolverError> for CliError {
    fn from(e: npsvor::SolverError) -> Self {
        CliError::Invalid(e.to_string())
    }
}

impl From<npsvor::eval::EvalError> for CliError {
    fn from(e: npsvor::eval::EvalError) -> Self {
        match e {
            npsvor::eval::EvalError::Data(npsvor::DataError::Io(io)) => {
                CliError::Io(io.to_string())
            }
            _ => CliError::Invalid(e.to_string()),
        }
    }
}

impl From<npsvor::text::TextError> for CliError {
    fn from(e: npsvor::text::TextError) -> Self {
        match e {
            npsvor::text::TextError::Io(_) => CliError::Io(e.to_string()),
            _ => CliError::Invalid(e.to_string()),
        }
    }
}

impl From<npsvor::model_io::ModelIoError> for CliError {
    fn from(e: npsvor::model_io::ModelIoError) -> Self {
        match e {
            npsvor::model_io::ModelIoError::Io(_) => CliError::Io(e.to_string()),
            _ => CliError::Invalid(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

fn main() {
    std::process::exit(run(std::env::args_os()));
}

fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let kind = e.kind();
            let _ = e.print();
            return if matches!(kind, ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                0
            } else {
                1
            };
        }
    };
    match commands::dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("npsvor: error: {e}");
            e.code()
        }
    }
}

//! Effective solver settings: command line > config file > defaults.

use crate::{CliError, SolverOpts};
use npsvor::{Method, Predictor, SolverConfig};
use std::collections::HashMap;
use std::path::Path;

#[derive(Clone, Debug)]
pub struct Settings {
    pub method: Method,
    pub predictor: Predictor,
    pub cfg: SolverConfig,
    pub bias: Option<f64>,
    pub jobs: usize,
}

fn load_config_file(path: &Path) -> Result<HashMap<String, String>, CliError> {
    let text = std::fs::read_to_string(path)?;
    let mut map = HashMap::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            CliError::Invalid(format!(
                "{}:{}: expected key = value",
                path.display(),
                no + 1
            ))
        })?;
        map.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(map)
}

fn parsed<T: std::str::FromStr>(
    map: &HashMap<String, String>,
    key: &str,
) -> Result<Option<T>, CliError> {
    match map.get(key) {
        None => Ok(None),
        Some(raw) => raw
            .parse::<T>()
            .map(Some)
            .map_err(|_| CliError::Invalid(format!("config: bad value for {key}: '{raw}'"))),
    }
}

pub fn resolve(opts: &SolverOpts) -> Result<Settings, CliError> {
    let file = match &opts.config {
        Some(path) => load_config_file(path)?,
        None => HashMap::new(),
    };

    let solver_name = opts
        .solver
        .clone()
        .or_else(|| file.get("solver").cloned())
        .unwrap_or_else(|| "npsvor-dcd2".to_string());
    let method = Method::parse(&solver_name)
        .ok_or_else(|| CliError::Usage(format!("unknown solver '{solver_name}'")))?;

    let predictor_name = opts
        .predictor
        .clone()
        .or_else(|| file.get("predictor").cloned())
        .unwrap_or_else(|| "new".to_string());
    let predictor = match predictor_name.as_str() {
        "old" => Predictor::Old,
        "new" => Predictor::New,
        other => return Err(CliError::Usage(format!("unknown predictor '{other}'"))),
    };

    let defaults = SolverConfig::default();
    let cost = match opts.cost {
        Some(c) => c,
        None => parsed::<f64>(&file, "cost")?.unwrap_or(defaults.c1),
    };
    let c2 = match opts.c2 {
        Some(c) => c,
        None => parsed::<f64>(&file, "c2")?.unwrap_or(cost),
    };
    let eps = match opts.epsilon {
        Some(e) => e,
        None => parsed::<f64>(&file, "epsilon")?.unwrap_or(defaults.eps),
    };
    let eps_stop = match opts.tolerance {
        Some(t) => t,
        None => parsed::<f64>(&file, "tolerance")?.unwrap_or(defaults.eps_stop),
    };
    let shrinking = if opts.no_shrink {
        false
    } else {
        !parsed::<u8>(&file, "no_shrink")?
            .map(|v| v != 0)
            .unwrap_or(false)
    };
    let max_sweeps = match opts.max_sweeps {
        Some(v) => v,
        None => parsed::<usize>(&file, "max_sweeps")?.unwrap_or(defaults.max_sweeps),
    };
    let seed = match opts.seed {
        Some(v) => v,
        None => parsed::<u64>(&file, "seed")?.unwrap_or(defaults.seed),
    };
    let bias_raw = match opts.bias {
        Some(v) => Some(v),
        None => parsed::<f64>(&file, "bias")?,
    };
    let bias = bias_raw.filter(|&b| b > 0.0);
    let jobs = match opts.jobs {
        Some(v) => v,
        None => parsed::<usize>(&file, "jobs")?.unwrap_or(1),
    };
    if jobs == 0 {
        return Err(CliError::Usage("--jobs must be at least 1".into()));
    }

    let cfg = SolverConfig {
        c1: cost,
        c2,
        eps,
        eps_stop,
        shrinking,
        max_sweeps,
        seed,
        ..defaults
    };
    cfg.validate()
        .map_err(|e| CliError::Invalid(e.to_string()))?;

    Ok(Settings {
        method,
        predictor,
        cfg,
        bias,
        jobs,
    })
}

/// Echo the effective configuration to stderr so runs are reproducible from
/// logs alone.
pub fn echo(settings: &Settings) {
    let c = &settings.cfg;
    eprintln!(
        "npsvor: config solver={} predictor={} c1={} c2={} epsilon={} tolerance={} \
         shrinking={} max_sweeps={} seed={} bias={} jobs={}",
        settings.method,
        match settings.predictor {
            Predictor::Old => "old",
            Predictor::New => "new",
        },
        c.c1,
        c.c2,
        c.eps,
        c.eps_stop,
        c.shrinking,
        c.max_sweeps,
        c.seed,
        settings
            .bias
            .map(|b| b.to_string())
            .unwrap_or_else(|| "none".to_string()),
        settings.jobs
    );
}

/// Builds the global rayon pool once, sized by --jobs. Later calls with a
/// different size are ignored (the pool is process-global), which only
/// matters for in-process tests.
pub fn init_jobs(jobs: usize) {
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build_global();
}

/// Parses `LO:STEP:HI` (log2 exponents) into cost values.
pub fn parse_log2_grid(s: &str) -> Result<Vec<f64>, CliError> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(CliError::Usage(format!(
            "grid '{s}' must look like LO:STEP:HI (log2 exponents)"
        )));
    }
    let lo: i32 = parts[0]
        .parse()
        .map_err(|_| CliError::Usage(format!("bad grid bound '{}'", parts[0])))?;
    let step: u32 = parts[1]
        .parse()
        .map_err(|_| CliError::Usage(format!("bad grid step '{}'", parts[1])))?;
    let hi: i32 = parts[2]
        .parse()
        .map_err(|_| CliError::Usage(format!("bad grid bound '{}'", parts[2])))?;
    if step == 0 || hi < lo {
        return Err(CliError::Usage(format!("empty grid '{s}'")));
    }
    Ok(npsvor::eval::log2_range(lo, step, hi))
}

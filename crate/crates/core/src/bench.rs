//! Benchmark harness: reproducible synthetic data, solver convergence
//! traces against a long-run reference, ε-sensitivity sweeps, predictor
//! comparisons and the full grid-search/retrain/test protocol.

use std::ops::ControlFlow;

use crate::clock::Stopwatch;
use crate::data::{SparseDataset, SparseVector};
use crate::eval::{evaluate, grid_search, EvalError, EvalReport, GridResult};
use crate::method::{fit, FitStats, Method};
use crate::model::{
    train, train_rank_dcd1, train_rank_dcd1_observed, train_rank_dcd2, train_rank_dcd2_observed,
    Algorithm, OrdinalModel, Predictor, SolverConfig, SolverError, SUPPORT_VECTOR_TOL,
};
use crate::rng::SplitMix64;

/// Parameters of the sparse synthetic generator. The defaults live in a
/// versioned config file so benchmark claims are checked on reproducible
/// data.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SyntheticSpec {
    pub n: usize,
    pub m: usize,
    pub p: usize,
    pub avg_nnz: usize,
    /// Standard deviation of the noise added to the latent linear score.
    pub noise: f64,
    pub seed: u64,
}

pub const DEFAULT_SYNTHETIC_CFG: &str = include_str!("../data/synthetic_default.cfg");

impl Default for SyntheticSpec {
    fn default() -> Self {
        SyntheticSpec::parse(DEFAULT_SYNTHETIC_CFG).expect("bundled config parses")
    }
}

impl SyntheticSpec {
    /// Parses the `key = value` config format (# comments, blank lines ok).
    pub fn parse(text: &str) -> Result<Self, String> {
        let mut spec = SyntheticSpec {
            n: 1000,
            m: 100,
            p: 5,
            avg_nnz: 10,
            noise: 0.3,
            seed: 1,
        };
        for (no, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| format!("line {}: expected key = value", no + 1))?;
            let (key, value) = (key.trim(), value.trim());
            let bad = || format!("line {}: bad value for {key}", no + 1);
            match key {
                "n" => spec.n = value.parse().map_err(|_| bad())?,
                "m" => spec.m = value.parse().map_err(|_| bad())?,
                "p" => spec.p = value.parse().map_err(|_| bad())?,
                "avg_nnz" => spec.avg_nnz = value.parse().map_err(|_| bad())?,
                "noise" => spec.noise = value.parse::<f64>().map_err(|_| bad())?,
                "seed" => spec.seed = value.parse().map_err(|_| bad())?,
                other => return Err(format!("line {}: unknown key {other}", no + 1)),
            }
        }
        if spec.p < 2 || spec.n < 2 * spec.p || spec.m == 0 || spec.avg_nnz == 0 {
            return Err("degenerate synthetic spec".into());
        }
        Ok(spec)
    }
}

/// Sparse rows with a geometric nonzero-count distribution and uniform
/// positive values, L2-normalized; the rank is the quantile bucket of a
/// noisy linear score, so classes are balanced and linearly structured.
pub fn generate_synthetic(spec: &SyntheticSpec) -> SparseDataset {
    let mut rng = SplitMix64::new(spec.seed);
    let direction: Vec<f64> = (0..spec.m).map(|_| rng.normal()).collect();
    let q = 1.0 / spec.avg_nnz as f64;
    let nnz_cap = spec.m.min(spec.avg_nnz * 10).max(1);

    let mut rows = Vec::with_capacity(spec.n);
    let mut scores = Vec::with_capacity(spec.n);
    let mut picked: Vec<usize> = Vec::new();
    for _ in 0..spec.n {
        // Geometric(q) with support starting at 1.
        let u = rng.next_f64().max(f64::MIN_POSITIVE);
        let nnz = (1.0 + (1.0 - u).ln() / (1.0 - q).ln()).floor() as usize;
        let nnz = nnz.clamp(1, nnz_cap);
        picked.clear();
        while picked.len() < nnz {
            let idx = rng.below(spec.m as u64) as usize;
            if !picked.contains(&idx) {
                picked.push(idx);
            }
        }
        picked.sort_unstable();
        let mut entries: Vec<(usize, f64)> = picked
            .iter()
            .map(|&i| (i, 0.1 + 0.9 * rng.next_f64()))
            .collect();
        let norm = entries.iter().map(|&(_, v)| v * v).sum::<f64>().sqrt();
        for e in &mut entries {
            e.1 /= norm;
        }
        let row = SparseVector::new(entries).expect("sorted distinct indices");
        scores.push(row.dot(&direction) + spec.noise * rng.normal());
        rows.push(row);
    }

    // Quantile bucketing into p balanced ranks.
    let mut order: Vec<usize> = (0..spec.n).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    let mut labels = vec![0usize; spec.n];
    for (pos, &i) in order.iter().enumerate() {
        labels[i] = (pos * spec.p / spec.n) + 1;
    }
    SparseDataset::from_parts(rows, labels, spec.p, spec.m).expect("generator invariants")
}

#[derive(Clone, Copy, Debug)]
pub struct TraceSample {
    pub sweep: usize,
    pub seconds: f64,
    pub rel_diff: f64,
}

/// Per-solver trace of the relative difference to the reference dual
/// optimum, sampled once per sweep.
#[derive(Clone, Debug)]
pub struct ConvergenceTrace {
    pub solver: Algorithm,
    pub samples: Vec<TraceSample>,
}

impl ConvergenceTrace {
    /// CPU seconds of the first sample at or below `rel`, if reached.
    pub fn time_to_reach(&self, rel: f64) -> Option<f64> {
        self.samples
            .iter()
            .find(|s| s.rel_diff <= rel)
            .map(|s| s.seconds)
    }
}

#[derive(Clone, Debug)]
pub struct ConvergencePair {
    pub dcd1: ConvergenceTrace,
    pub dcd2: ConvergenceTrace,
    pub reference_objective: f64,
    pub reference_converged: bool,
}

/// Traces both solvers on rank `k` from cold start against a long-run
/// reference (`eps_stop = 1e-10` on the merged solver). Each traced solve
/// stops once its relative difference falls below `floor` (or its own
/// stopping rule / sweep cap fires first).
pub fn bench_convergence(
    data: &SparseDataset,
    k: usize,
    cfg: &SolverConfig,
    floor: f64,
) -> Result<ConvergencePair, SolverError> {
    let ref_cfg = SolverConfig {
        eps_stop: 1e-10,
        max_sweeps: cfg.max_sweeps.max(20_000),
        algorithm: Algorithm::Dcd2,
        ..*cfg
    };
    let mut reference_objective = f64::INFINITY;
    let mut last = f64::INFINITY;
    let reference = train_rank_dcd2_observed(data, k, &ref_cfg, |e| {
        last = e.objective;
        ControlFlow::Continue(())
    })?;
    if last.is_finite() {
        reference_objective = last;
    }
    let reference_converged = reference.converged;
    let denom = reference_objective.abs().max(f64::MIN_POSITIVE);

    let trace_of = |algorithm: Algorithm| -> Result<ConvergenceTrace, SolverError> {
        let run_cfg = SolverConfig {
            algorithm,
            eps_stop: 1e-12,
            max_sweeps: cfg.max_sweeps.max(20_000),
            ..*cfg
        };
        let mut samples = Vec::new();
        let mut observe = |e: &crate::model::SweepEvent| {
            let rel = ((e.objective - reference_objective) / denom).max(0.0);
            samples.push(TraceSample {
                sweep: e.sweep,
                seconds: e.seconds,
                rel_diff: rel,
            });
            if rel <= floor {
                ControlFlow::Break(())
            } else {
                ControlFlow::Continue(())
            }
        };
        match algorithm {
            Algorithm::Dcd1 => {
                train_rank_dcd1_observed(data, k, &run_cfg, &mut observe)?;
            }
            Algorithm::Dcd2 => {
                train_rank_dcd2_observed(data, k, &run_cfg, &mut observe)?;
            }
        }
        Ok(ConvergenceTrace {
            solver: algorithm,
            samples,
        })
    };

    Ok(ConvergencePair {
        dcd1: trace_of(Algorithm::Dcd1)?,
        dcd2: trace_of(Algorithm::Dcd2)?,
        reference_objective,
        reference_converged,
    })
}

/// One row of the ε-sensitivity table: absolute measurements plus ratios
/// against the `ε = 0` row.
#[derive(Clone, Copy, Debug)]
pub struct EpsilonRow {
    pub eps: f64,
    pub mae: f64,
    pub mse: f64,
    pub seconds: f64,
    pub support_vectors: usize,
    pub mae_ratio: f64,
    pub mse_ratio: f64,
    pub time_ratio: f64,
    pub nsv_ratio: f64,
}

/// Trains the full model once per ε, measuring test MAE/MSE, training CPU
/// time and the total support vector count. The grid must contain `ε = 0`,
/// which anchors the ratios.
pub fn bench_epsilon(
    train_data: &SparseDataset,
    test_data: &SparseDataset,
    eps_grid: &[f64],
    cfg: &SolverConfig,
) -> Result<Vec<EpsilonRow>, EvalError> {
    if !eps_grid.contains(&0.0) {
        return Err(EvalError::MissingZeroAnchor);
    }
    let mut raw = Vec::with_capacity(eps_grid.len());
    for &eps in eps_grid {
        let run_cfg = SolverConfig { eps, ..*cfg };
        // Rank solves run sequentially and only the solve calls are timed,
        // so the CPU measurement is free of pool scheduling noise.
        let mut seconds = 0.0;
        let mut support_vectors = 0usize;
        let mut weights = Vec::with_capacity(train_data.p());
        for k in 1..=train_data.p() {
            match run_cfg.algorithm {
                Algorithm::Dcd2 => {
                    let sw = Stopwatch::start();
                    let solve = train_rank_dcd2(train_data, k, &run_cfg)?;
                    seconds += sw.elapsed_seconds();
                    support_vectors += solve
                        .state
                        .alpha
                        .iter()
                        .filter(|a| a.abs() > SUPPORT_VECTOR_TOL)
                        .count();
                    weights.push(solve.state.w);
                }
                Algorithm::Dcd1 => {
                    let sw = Stopwatch::start();
                    let solve = train_rank_dcd1(train_data, k, &run_cfg)?;
                    seconds += sw.elapsed_seconds();
                    for j in 0..solve.state.alpha_plus.len() {
                        let merged = solve.state.alpha_plus[j] - solve.state.alpha_minus[j];
                        if merged.abs() > SUPPORT_VECTOR_TOL {
                            support_vectors += 1;
                        }
                    }
                    support_vectors += solve
                        .state
                        .beta
                        .iter()
                        .filter(|a| a.abs() > SUPPORT_VECTOR_TOL)
                        .count();
                    weights.push(solve.state.w);
                }
            }
        }
        let model = OrdinalModel::from_weights(
            weights,
            train_data.m(),
            train_data.bias(),
            train_data.label_map().to_vec(),
            Predictor::New,
        )?;
        let predicted: Vec<usize> = test_data.rows().iter().map(|x| model.predict(x)).collect();
        let ev = evaluate(test_data.labels(), &predicted, test_data.p())?;
        raw.push((eps, ev.mae, ev.mse, seconds, support_vectors));
    }
    let base = raw
        .iter()
        .find(|r| r.0 == 0.0)
        .copied()
        .expect("grid contains 0");
    let safe = |x: f64| if x == 0.0 { 1.0 } else { x };
    Ok(raw
        .into_iter()
        .map(|(eps, mae, mse, seconds, nsv)| EpsilonRow {
            eps,
            mae,
            mse,
            seconds,
            support_vectors: nsv,
            mae_ratio: if eps == 0.0 { 1.0 } else { mae / safe(base.1) },
            mse_ratio: if eps == 0.0 { 1.0 } else { mse / safe(base.2) },
            time_ratio: if eps == 0.0 {
                1.0
            } else {
                seconds / safe(base.3)
            },
            nsv_ratio: if eps == 0.0 {
                1.0
            } else {
                nsv as f64 / safe(base.4 as f64)
            },
        })
        .collect())
}

/// MAE/MSE of both rank predictors on an identical trained model and test
/// split.
#[derive(Clone, Debug)]
pub struct PredictorComparison {
    pub old: EvalReport,
    pub new: EvalReport,
}

pub fn bench_predictors(
    train_data: &SparseDataset,
    test_data: &SparseDataset,
    cfg: &SolverConfig,
) -> Result<PredictorComparison, EvalError> {
    let (model, _) = train(train_data, cfg)?;
    let compare = compare_predictors(&model, test_data)?;
    Ok(compare)
}

pub fn compare_predictors(
    model: &OrdinalModel,
    test_data: &SparseDataset,
) -> Result<PredictorComparison, EvalError> {
    let old: Vec<usize> = test_data
        .rows()
        .iter()
        .map(|x| model.predict_with(Predictor::Old, x))
        .collect();
    let new: Vec<usize> = test_data
        .rows()
        .iter()
        .map(|x| model.predict_with(Predictor::New, x))
        .collect();
    Ok(PredictorComparison {
        old: evaluate(test_data.labels(), &old, test_data.p())?,
        new: evaluate(test_data.labels(), &new, test_data.p())?,
    })
}

/// Geometry for the 3-rank two-dimensional demonstration: cluster centers on
/// a shallow arc so the learned proximal hyperplanes are distinctly
/// nonparallel and the minimal-distance rule owns an ambiguity region.
#[derive(Clone, Copy, Debug)]
pub struct ArcSpec {
    pub per_rank: usize,
    pub spread: f64,
    /// Vertical lift of the middle cluster relative to the outer two.
    pub arch: f64,
    pub seed: u64,
}

impl Default for ArcSpec {
    fn default() -> Self {
        ArcSpec {
            per_rank: 60,
            spread: 0.35,
            arch: 1.5,
            seed: 1,
        }
    }
}

pub fn arc_centers(spec: &ArcSpec) -> [(f64, f64); 3] {
    [(-2.0, 0.0), (0.0, spec.arch), (2.0, 0.0)]
}

/// Gaussian clusters at the arc centers, bias-augmented (third coordinate 1).
pub fn generate_arc3(spec: &ArcSpec) -> SparseDataset {
    let mut rng = SplitMix64::new(spec.seed);
    let centers = arc_centers(spec);
    let mut rows = Vec::with_capacity(3 * spec.per_rank);
    let mut labels = Vec::with_capacity(3 * spec.per_rank);
    for (rank, &(cx, cy)) in centers.iter().enumerate() {
        for _ in 0..spec.per_rank {
            let x = cx + spec.spread * rng.normal();
            let y = cy + spec.spread * rng.normal();
            rows.push(SparseVector::from_dense(&[x, y, 1.0]));
            labels.push(rank + 1);
        }
    }
    let mut data = SparseDataset::from_parts(rows, labels, 3, 3).expect("arc invariants");
    data = force_bias(data);
    data
}

// The arc rows already carry the bias column; mark the dataset accordingly.
fn force_bias(data: SparseDataset) -> SparseDataset {
    // Rebuild through the raw constructor to keep the bias flag truthful.
    let rows: Vec<SparseVector> = data
        .rows()
        .iter()
        .map(|r| {
            let trimmed: Vec<(usize, f64)> = r
                .entries()
                .iter()
                .copied()
                .filter(|&(i, _)| i < 2)
                .collect();
            SparseVector::new(trimmed).expect("ordered entries")
        })
        .collect();
    let base = SparseDataset::from_parts(rows, data.labels().to_vec(), data.p(), 2)
        .expect("arc invariants");
    base.augment_bias(1.0).expect("fresh dataset")
}

/// Probe points in the minimal-distance ambiguity region of a trained arc
/// model: each sits on the zero line of the *far* rank's hyperplane, deep in
/// the territory of the near rank. Returns `(probe_for_rank1, probe_for_rank3)`
/// or `None` when a hyperplane is too close to vertical to extend there.
pub fn ambiguity_probes(model: &OrdinalModel, x_far: f64) -> Option<((f64, f64), (f64, f64))> {
    let w = model.weights();
    // Zero line of f_3 at x = -x_far: w[2] = (a, b, c), a·x + b·y + c = 0.
    let solve_y = |wk: &[f64], x: f64| -> Option<f64> {
        if wk[1].abs() < 1e-9 {
            None
        } else {
            Some(-(wk[0] * x + wk[2]) / wk[1])
        }
    };
    let p1 = (-x_far.abs(), solve_y(&w[2], -x_far.abs())?);
    let p2 = (x_far.abs(), solve_y(&w[0], x_far.abs())?);
    Some((p1, p2))
}

pub fn arc_point(x: f64, y: f64) -> SparseVector {
    SparseVector::from_dense(&[x, y, 1.0])
}

/// True rank of an off-manifold arc point: nearest cluster center.
pub fn arc_true_rank(spec: &ArcSpec, x: f64, y: f64) -> usize {
    let centers = arc_centers(spec);
    let mut best = 1;
    let mut best_d = f64::INFINITY;
    for (rank, &(cx, cy)) in centers.iter().enumerate() {
        let d = (x - cx) * (x - cx) + (y - cy) * (y - cy);
        if d < best_d {
            best_d = d;
            best = rank + 1;
        }
    }
    best
}

/// Full comparison protocol for one method on one train/test split:
/// grid-search by cross-validated MAE, retrain at the best cell (timed),
/// evaluate on the held-out part.
#[derive(Clone, Debug)]
pub struct MethodRun {
    pub method: Method,
    pub best_c1: f64,
    pub best_c2: f64,
    pub cv_mae: f64,
    pub cv_mse: f64,
    pub test: EvalReport,
    pub train_seconds: f64,
    pub stats: FitStats,
    pub grid: GridResult,
}

#[allow(clippy::too_many_arguments)]
pub fn run_protocol(
    train_data: &SparseDataset,
    test_data: &SparseDataset,
    method: Method,
    predictor: Predictor,
    cells: &[(f64, f64)],
    cfg: &SolverConfig,
    folds: usize,
    seed: u64,
) -> Result<MethodRun, EvalError> {
    let grid = grid_search(train_data, method, predictor, cells, cfg, folds, seed)?;
    let best = grid.best_cell();
    let final_cfg = SolverConfig {
        c1: best.c1,
        c2: best.c2,
        ..*cfg
    };
    let sw = Stopwatch::start();
    let (model, stats) = fit(method, predictor, train_data, &final_cfg)?;
    let train_seconds = sw.elapsed_seconds();
    let predicted: Vec<usize> = test_data.rows().iter().map(|x| model.predict(x)).collect();
    let test = evaluate(test_data.labels(), &predicted, test_data.p())?;
    Ok(MethodRun {
        method,
        best_c1: best.c1,
        best_c2: best.c2,
        cv_mae: best.cv.mae_mean,
        cv_mse: best.cv.mse_mean,
        test,
        train_seconds,
        stats,
        grid,
    })
}

/// Median of a sample (averages the middle pair on even lengths).
pub fn median(values: &[f64]) -> f64 {
    assert!(!values.is_empty());
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    if v.len() % 2 == 1 {
        v[mid]
    } else {
        0.5 * (v[mid - 1] + v[mid])
    }
}

/// One `kind key=value ...` record per measurement, for machine-readable
/// output.
pub fn record_line(kind: &str, fields: &[(&str, String)]) -> String {
    let mut s = String::from(kind);
    for (key, value) in fields {
        s.push(' ');
        s.push_str(key);
        s.push('=');
        s.push_str(value);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn synthetic_spec_parses_and_rejects() {
        let spec = SyntheticSpec::default();
        assert_eq!(spec.n, 50_000);
        assert_eq!(spec.m, 10_000);
        assert_eq!(spec.avg_nnz, 30);
        assert!(SyntheticSpec::parse("n = banana").is_err());
        assert!(SyntheticSpec::parse("unknown = 3").is_err());
        assert!(SyntheticSpec::parse("p = 1").is_err());
    }

    #[test]
    fn synthetic_generator_shape() {
        let spec = SyntheticSpec {
            n: 500,
            m: 200,
            p: 5,
            avg_nnz: 8,
            noise: 0.2,
            seed: 9,
        };
        let d = generate_synthetic(&spec);
        assert_eq!(d.n(), 500);
        assert_eq!(d.m(), 200);
        assert_eq!(d.p(), 5);
        assert_eq!(d.rank_counts(), vec![100; 5]);
        let avg = d.nnz() as f64 / d.n() as f64;
        assert!(avg > 4.0 && avg < 16.0, "avg nnz {avg}");
        for row in d.rows() {
            assert!((row.squared_norm() - 1.0).abs() < 1e-9);
        }
        // Deterministic.
        let d2 = generate_synthetic(&spec);
        assert_eq!(d.labels(), d2.labels());
        assert_eq!(d.row(7), d2.row(7));
    }

    #[test]
    fn convergence_traces_monotone_and_ordered() {
        let spec = SyntheticSpec {
            n: 400,
            m: 80,
            p: 3,
            avg_nnz: 10,
            noise: 0.2,
            seed: 5,
        };
        let d = generate_synthetic(&spec);
        let cfg = SolverConfig::default();
        let pair = bench_convergence(&d, 2, &cfg, 1e-4).unwrap();
        assert!(pair.reference_converged);
        for trace in [&pair.dcd1, &pair.dcd2] {
            assert!(trace.samples.last().unwrap().rel_diff <= 1e-3);
            for w in trace.samples.windows(2) {
                assert!(w[1].rel_diff <= w[0].rel_diff + 1e-12);
            }
        }
        assert!(pair.dcd2.time_to_reach(1e-3).is_some());
        assert!(pair.dcd1.time_to_reach(1e-3).is_some());
    }

    #[test]
    fn identical_seeds_identical_traces() {
        let spec = SyntheticSpec {
            n: 300,
            m: 60,
            p: 3,
            avg_nnz: 8,
            noise: 0.2,
            seed: 6,
        };
        let d = generate_synthetic(&spec);
        let cfg = SolverConfig::default();
        let a = bench_convergence(&d, 2, &cfg, 1e-4).unwrap();
        let b = bench_convergence(&d, 2, &cfg, 1e-4).unwrap();
        assert_eq!(a.dcd2.samples.len(), b.dcd2.samples.len());
        for (x, y) in a.dcd2.samples.iter().zip(&b.dcd2.samples) {
            assert_eq!(x.rel_diff.to_bits(), y.rel_diff.to_bits());
        }
    }

    #[test]
    fn epsilon_zero_row_is_unit_ratios() {
        let spec = SyntheticSpec {
            n: 300,
            m: 60,
            p: 3,
            avg_nnz: 8,
            noise: 0.3,
            seed: 7,
        };
        let d = generate_synthetic(&spec);
        let (train_d, test_d) = d.stratified_split(0.3, 3).unwrap();
        let rows = bench_epsilon(&train_d, &test_d, &[0.0, 0.2], &SolverConfig::default()).unwrap();
        assert_eq!(rows[0].eps, 0.0);
        assert_eq!(rows[0].mae_ratio, 1.0);
        assert_eq!(rows[0].time_ratio, 1.0);
        assert_eq!(rows[0].nsv_ratio, 1.0);
        assert!(rows[1].nsv_ratio <= 1.0 + 1e-12, "{}", rows[1].nsv_ratio);
        // Missing zero anchor is an error.
        assert!(bench_epsilon(&train_d, &test_d, &[0.1], &SolverConfig::default()).is_err());
    }

    #[test]
    fn arc_geometry_probes_behave() {
        let spec = ArcSpec::default();
        let d = generate_arc3(&spec);
        assert_eq!(d.p(), 3);
        assert_eq!(d.m(), 3);
        assert_eq!(d.bias(), Some(1.0));
        let cfg = SolverConfig {
            eps_stop: 1e-6,
            max_sweeps: 20_000,
            ..SolverConfig::default()
        };
        let (model, report) = train(&d, &cfg).unwrap();
        assert!(report.all_converged());
        let (p1, p2) = ambiguity_probes(&model, 5.0).expect("nonvertical outer hyperplanes");
        assert_eq!(arc_true_rank(&spec, p1.0, p1.1), 1);
        assert_eq!(arc_true_rank(&spec, p2.0, p2.1), 3);
        let x1 = arc_point(p1.0, p1.1);
        let x2 = arc_point(p2.0, p2.1);
        // Minimal distance misranks both probes; the ordered decomposition
        // recovers them.
        assert_eq!(model.predict_with(Predictor::Old, &x1), 3);
        assert_eq!(model.predict_with(Predictor::Old, &x2), 1);
        assert_eq!(model.predict_with(Predictor::New, &x1), 1);
        assert_eq!(model.predict_with(Predictor::New, &x2), 3);
    }

    #[test]
    fn protocol_runs_end_to_end() {
        let spec = SyntheticSpec {
            n: 240,
            m: 40,
            p: 3,
            avg_nnz: 6,
            noise: 0.2,
            seed: 8,
        };
        let d = generate_synthetic(&spec);
        let (train_d, test_d) = d.stratified_split(0.3, 4).unwrap();
        let cells = [(0.5, 0.5), (1.0, 1.0)];
        let run = run_protocol(
            &train_d,
            &test_d,
            Method::NpsvorDcd2,
            Predictor::New,
            &cells,
            &SolverConfig::default(),
            3,
            11,
        )
        .unwrap();
        assert!(run.test.mae <= 2.0);
        assert_eq!(run.grid.cells.len(), 2);
        assert!(run.train_seconds >= 0.0);
    }

    #[test]
    fn median_of_samples() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
    }

    #[test]
    fn record_line_format() {
        let line = record_line("epsilon", &[("eps", "0.1".into()), ("nsv", "42".into())]);
        assert_eq!(line, "epsilon eps=0.1 nsv=42");
    }
}

//! Browser demo: train the nonparallel-hyperplane ordinal model on small
//! synthetic problems directly in the page and explore three things
//! interactively — the decision regions of the two rank predictors on 2-D
//! arc data, the convergence race between the two dual coordinate descent
//! trainers, and how the insensitive zone trades accuracy for sparsity.
//!
//! The exported functions return flat numeric buffers; `www/index.html`
//! renders them onto canvases with no framework.

use wasm_bindgen::prelude::*;

use npsvor::bench::{
    ambiguity_probes, arc_point, arc_true_rank, generate_arc3, generate_synthetic, ArcSpec,
    SyntheticSpec,
};
use npsvor::model::{train, train_rank_dcd1_observed, train_rank_dcd2_observed, SolverConfig};
use npsvor::{OrdinalModel, Predictor};

fn solver_config(c: f64, eps: f64, seed: u32) -> SolverConfig {
    SolverConfig {
        c1: c,
        c2: c,
        eps,
        eps_stop: 1e-6,
        max_sweeps: 20_000,
        seed: seed as u64,
        ..SolverConfig::default()
    }
}

/// Rank maps for both predictors over a fixed viewport, plus the training
/// points, the three hyperplane coefficient triples and the two ambiguity
/// probes.
#[wasm_bindgen]
pub struct RegionMap {
    width: u32,
    height: u32,
    old_ranks: Vec<u8>,
    new_ranks: Vec<u8>,
    points: Vec<f64>,
    lines: Vec<f64>,
    probes: Vec<f64>,
    bounds: Vec<f64>,
}

#[wasm_bindgen]
impl RegionMap {
    #[wasm_bindgen(getter)]
    pub fn width(&self) -> u32 {
        self.width
    }

    #[wasm_bindgen(getter)]
    pub fn height(&self) -> u32 {
        self.height
    }

    /// Row-major rank (1..=3) per pixel under the minimal-distance rule.
    pub fn old_ranks(&self) -> Vec<u8> {
        self.old_ranks.clone()
    }

    /// Row-major rank per pixel under the ordered-decomposition rule.
    pub fn new_ranks(&self) -> Vec<u8> {
        self.new_ranks.clone()
    }

    /// Training points as (x, y, rank) triples.
    pub fn points(&self) -> Vec<f64> {
        self.points.clone()
    }

    /// Hyperplane coefficients as three (a, b, c) triples: a·x + b·y + c = 0.
    pub fn lines(&self) -> Vec<f64> {
        self.lines.clone()
    }

    /// Probe rows of five values: x, y, true rank, old prediction, new
    /// prediction. Empty when the outer hyperplanes are nearly vertical.
    pub fn probes(&self) -> Vec<f64> {
        self.probes.clone()
    }

    /// Viewport as (x_min, x_max, y_min, y_max).
    pub fn bounds(&self) -> Vec<f64> {
        self.bounds.clone()
    }
}

pub const VIEW: (f64, f64, f64, f64) = (-6.5, 6.5, -4.5, 5.5);

fn rasterize(model: &OrdinalModel, width: u32, height: u32) -> (Vec<u8>, Vec<u8>) {
    let (x0, x1, y0, y1) = VIEW;
    let mut old_ranks = Vec::with_capacity((width * height) as usize);
    let mut new_ranks = Vec::with_capacity((width * height) as usize);
    for row in 0..height {
        // Canvas rows go top-down; keep y increasing upward.
        let y = y1 - (row as f64 + 0.5) * (y1 - y0) / height as f64;
        for col in 0..width {
            let x = x0 + (col as f64 + 0.5) * (x1 - x0) / width as f64;
            let point = arc_point(x, y);
            old_ranks.push(model.predict_with(Predictor::Old, &point) as u8);
            new_ranks.push(model.predict_with(Predictor::New, &point) as u8);
        }
    }
    (old_ranks, new_ranks)
}

/// Core of the decision-region demo, shared with the host-side tests.
#[allow(clippy::too_many_arguments)]
pub fn region_map(
    per_rank: u32,
    spread: f64,
    arch: f64,
    seed: u32,
    c: f64,
    eps: f64,
    width: u32,
    height: u32,
) -> Result<RegionMap, String> {
    if !(1..=2000).contains(&per_rank)
        || !(8..=2048).contains(&width)
        || !(8..=2048).contains(&height)
    {
        return Err("parameters out of range".into());
    }
    let spec = ArcSpec {
        per_rank: per_rank as usize,
        spread,
        arch,
        seed: seed as u64,
    };
    let data = generate_arc3(&spec);
    let cfg = solver_config(c, eps, seed);
    let (model, _) = train(&data, &cfg).map_err(|e| e.to_string())?;
    let (old_ranks, new_ranks) = rasterize(&model, width, height);

    let mut points = Vec::with_capacity(data.n() * 3);
    for (row, &rank) in data.rows().iter().zip(data.labels()) {
        let mut x = 0.0;
        let mut y = 0.0;
        for &(i, v) in row.entries() {
            if i == 0 {
                x = v;
            } else if i == 1 {
                y = v;
            }
        }
        points.extend_from_slice(&[x, y, rank as f64]);
    }

    let mut lines = Vec::with_capacity(9);
    for w in model.weights() {
        lines.extend_from_slice(&[w[0], w[1], w[2]]);
    }

    let mut probes = Vec::new();
    if let Some((p1, p2)) = ambiguity_probes(&model, 5.0) {
        for (x, y) in [p1, p2] {
            let point = arc_point(x, y);
            probes.extend_from_slice(&[
                x,
                y,
                arc_true_rank(&spec, x, y) as f64,
                model.predict_with(Predictor::Old, &point) as f64,
                model.predict_with(Predictor::New, &point) as f64,
            ]);
        }
    }

    Ok(RegionMap {
        width,
        height,
        old_ranks,
        new_ranks,
        points,
        lines,
        probes,
        bounds: vec![VIEW.0, VIEW.1, VIEW.2, VIEW.3],
    })
}

/// Decision regions of both predictors on freshly trained arc data.
#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn decision_regions(
    per_rank: u32,
    spread: f64,
    arch: f64,
    seed: u32,
    c: f64,
    eps: f64,
    width: u32,
    height: u32,
) -> Result<RegionMap, JsError> {
    region_map(per_rank, spread, arch, seed, c, eps, width, height).map_err(|e| JsError::new(&e))
}

/// Per-sweep relative differences to the reference dual optimum for both
/// trainers on one rank subproblem.
#[wasm_bindgen]
pub struct ConvergenceRace {
    dcd1: Vec<f64>,
    dcd2: Vec<f64>,
}

#[wasm_bindgen]
impl ConvergenceRace {
    pub fn dcd1(&self) -> Vec<f64> {
        self.dcd1.clone()
    }

    pub fn dcd2(&self) -> Vec<f64> {
        self.dcd2.clone()
    }
}

pub fn convergence_race_impl(
    n: u32,
    m: u32,
    avg_nnz: u32,
    c: f64,
    eps: f64,
    seed: u32,
) -> Result<ConvergenceRace, String> {
    if !(50..=20_000).contains(&n) || !(10..=5_000).contains(&m) || avg_nnz == 0 {
        return Err("parameters out of range".into());
    }
    let spec = SyntheticSpec {
        n: n as usize,
        m: m as usize,
        p: 3,
        avg_nnz: avg_nnz as usize,
        noise: 0.3,
        seed: seed as u64,
    };
    let data = generate_synthetic(&spec);
    let cfg = solver_config(c, eps, seed);
    let rank = 2;

    let reference_cfg = SolverConfig {
        eps_stop: 1e-10,
        ..cfg
    };
    let mut reference = f64::INFINITY;
    train_rank_dcd2_observed(&data, rank, &reference_cfg, |e| {
        reference = e.objective;
        std::ops::ControlFlow::Continue(())
    })
    .map_err(|e| e.to_string())?;
    let denom = reference.abs().max(f64::MIN_POSITIVE);

    let trace_cfg = SolverConfig {
        eps_stop: 1e-12,
        max_sweeps: 400,
        ..cfg
    };
    let run = |dcd2: bool| -> Result<Vec<f64>, String> {
        let mut rels = Vec::new();
        let mut observe = |e: &npsvor::model::SweepEvent| {
            let rel = ((e.objective - reference) / denom).max(1e-16);
            rels.push(rel);
            if rel <= 1e-6 {
                std::ops::ControlFlow::Break(())
            } else {
                std::ops::ControlFlow::Continue(())
            }
        };
        if dcd2 {
            train_rank_dcd2_observed(&data, rank, &trace_cfg, &mut observe)
                .map_err(|e| e.to_string())?;
        } else {
            train_rank_dcd1_observed(&data, rank, &trace_cfg, &mut observe)
                .map_err(|e| e.to_string())?;
        }
        Ok(rels)
    };

    Ok(ConvergenceRace {
        dcd1: run(false)?,
        dcd2: run(true)?,
    })
}

#[wasm_bindgen]
pub fn convergence_race(
    n: u32,
    m: u32,
    avg_nnz: u32,
    c: f64,
    eps: f64,
    seed: u32,
) -> Result<ConvergenceRace, JsError> {
    convergence_race_impl(n, m, avg_nnz, c, eps, seed).map_err(|e| JsError::new(&e))
}

/// MAE / support-vector / sweep-count ratios relative to `ε = 0`.
#[wasm_bindgen]
pub struct EpsilonSweep {
    eps: Vec<f64>,
    mae_ratio: Vec<f64>,
    nsv_ratio: Vec<f64>,
    sweep_ratio: Vec<f64>,
}

#[wasm_bindgen]
impl EpsilonSweep {
    pub fn eps(&self) -> Vec<f64> {
        self.eps.clone()
    }

    pub fn mae_ratio(&self) -> Vec<f64> {
        self.mae_ratio.clone()
    }

    pub fn nsv_ratio(&self) -> Vec<f64> {
        self.nsv_ratio.clone()
    }

    pub fn sweep_ratio(&self) -> Vec<f64> {
        self.sweep_ratio.clone()
    }
}

pub fn epsilon_sweep_impl(
    n: u32,
    m: u32,
    avg_nnz: u32,
    c: f64,
    seed: u32,
) -> Result<EpsilonSweep, String> {
    if !(50..=20_000).contains(&n) || !(10..=5_000).contains(&m) || avg_nnz == 0 {
        return Err("parameters out of range".into());
    }
    let spec = SyntheticSpec {
        n: n as usize,
        m: m as usize,
        p: 3,
        avg_nnz: avg_nnz as usize,
        noise: 0.3,
        seed: seed as u64,
    };
    let data = generate_synthetic(&spec);
    let (train_d, test_d) = data
        .stratified_split(0.3, seed as u64 + 1)
        .map_err(|e| e.to_string())?;

    let grid = [0.0, 0.1, 0.2, 0.3, 0.4, 0.5];
    let mut maes = Vec::new();
    let mut nsvs = Vec::new();
    let mut sweeps = Vec::new();
    for &eps in &grid {
        let cfg = SolverConfig {
            eps,
            ..solver_config(c, eps, seed)
        };
        let (model, report) = train(&train_d, &cfg).map_err(|e| e.to_string())?;
        let mut err_sum = 0.0;
        for (row, &y) in test_d.rows().iter().zip(test_d.labels()) {
            err_sum += (model.predict(row) as f64 - y as f64).abs();
        }
        maes.push(err_sum / test_d.n() as f64);
        nsvs.push(report.total_support_vectors() as f64);
        sweeps.push(report.per_rank.iter().map(|r| r.sweeps).sum::<usize>() as f64);
    }
    let ratio = |series: &[f64]| -> Vec<f64> {
        let base = if series[0] == 0.0 { 1.0 } else { series[0] };
        series.iter().map(|v| v / base).collect()
    };
    Ok(EpsilonSweep {
        eps: grid.to_vec(),
        mae_ratio: ratio(&maes),
        nsv_ratio: ratio(&nsvs),
        sweep_ratio: ratio(&sweeps),
    })
}

#[wasm_bindgen]
pub fn epsilon_sweep(
    n: u32,
    m: u32,
    avg_nnz: u32,
    c: f64,
    seed: u32,
) -> Result<EpsilonSweep, JsError> {
    epsilon_sweep_impl(n, m, avg_nnz, c, seed).map_err(|e| JsError::new(&e))
}

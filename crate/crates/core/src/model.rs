//! Nonparallel support vector ordinal regression: one proximal hyperplane per
//! rank, each trained independently on the triple decomposition of the
//! labels. Two dual coordinate descent trainers are provided — a direct
//! extension of the linear-SVC solver over all `n + l` dual variables, and
//! the merged-variable reformulation that exploits the complementarity of
//! the paired duals to optimize only `n` variables with shrinking — plus the
//! minimal-distance and ordered-binary-decomposition rank predictors.

use crate::clock::Stopwatch;
use crate::data::{DataError, RankDecomposition, SparseDataset, SparseVector};
use crate::dcd::{
    box_step, project_gradient_box, shrink_test_box, shrink_test_soft, soft_thresh_step,
    BoxStepInput, SoftThreshStepInput, SweepOutcome, SweepState, Visit,
};
use crate::rng::{derive_seed, SplitMix64};
use crate::util::{kahan_sum, par_map};
use std::ops::ControlFlow;

#[derive(Debug, thiserror::Error)]
pub enum SolverError {
    #[error("invalid solver configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Data(#[from] DataError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Algorithm {
    Dcd1,
    Dcd2,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Predictor {
    /// Minimal distance to the nonparallel hyperplanes.
    Old,
    /// Ordered binary decomposition over pairwise-summed hyperplanes.
    New,
}

/// Costs, insensitive zone, stopping tolerance and reproducibility knobs
/// shared by all solvers in the crate.
#[derive(Clone, Copy, Debug)]
pub struct SolverConfig {
    pub c1: f64,
    pub c2: f64,
    /// Insensitive-zone width around the rank-k hyperplane.
    pub eps: f64,
    /// Relative stopping tolerance on the sweep violation norm.
    pub eps_stop: f64,
    pub shrinking: bool,
    pub max_sweeps: usize,
    pub seed: u64,
    pub algorithm: Algorithm,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            c1: 1.0,
            c2: 1.0,
            eps: 0.1,
            eps_stop: 0.1,
            shrinking: true,
            max_sweeps: 1000,
            seed: 1,
            algorithm: Algorithm::Dcd2,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<(), SolverError> {
        if !self.c1.is_finite() || self.c1 <= 0.0 {
            return Err(SolverError::Config(format!(
                "C1 must be > 0, got {}",
                self.c1
            )));
        }
        if !self.c2.is_finite() || self.c2 <= 0.0 {
            return Err(SolverError::Config(format!(
                "C2 must be > 0, got {}",
                self.c2
            )));
        }
        if !self.eps.is_finite() || self.eps < 0.0 {
            return Err(SolverError::Config(format!(
                "eps must be >= 0, got {}",
                self.eps
            )));
        }
        if !self.eps_stop.is_finite() || self.eps_stop <= 0.0 {
            return Err(SolverError::Config(format!(
                "stopping tolerance must be > 0, got {}",
                self.eps_stop
            )));
        }
        if self.max_sweeps == 0 {
            return Err(SolverError::Config("max_sweeps must be >= 1".into()));
        }
        Ok(())
    }
}

/// Merged dual state of the reformulated problem: one variable per instance,
/// boxed in `[-C1, C1]` for rank-k instances and `[0, C2]` otherwise, with
/// `w = Σ ỹ_i α_i x_i` maintained incrementally.
#[derive(Clone, Debug)]
pub struct DualStateDcd2 {
    pub alpha: Vec<f64>,
    pub w: Vec<f64>,
}

/// Dual state of the direct extension: split positive/negative duals over
/// the rank-k instances plus one box variable per remaining instance.
/// `alpha_minus[j]`/`alpha_plus[j]` belong to instance `middle[j]` of the
/// decomposition, `beta[j]` to the j-th non-middle instance in index order.
#[derive(Clone, Debug)]
pub struct DualStateDcd1 {
    pub alpha_minus: Vec<f64>,
    pub alpha_plus: Vec<f64>,
    pub beta: Vec<f64>,
    pub w: Vec<f64>,
}

/// Per-sweep sample reported to observers: process-CPU seconds since solve
/// start, dual objective through the maintained weights, `‖vᵗ‖₁` and the
/// active-set size after the sweep.
#[derive(Clone, Copy, Debug)]
pub struct SweepEvent {
    pub sweep: usize,
    pub seconds: f64,
    pub objective: f64,
    pub violation_norm: f64,
    pub active_len: usize,
}

#[derive(Clone, Debug)]
pub struct RankSolveDcd2 {
    pub state: DualStateDcd2,
    pub sweeps: usize,
    pub converged: bool,
}

#[derive(Clone, Debug)]
pub struct RankSolveDcd1 {
    pub state: DualStateDcd1,
    pub sweeps: usize,
    pub converged: bool,
}

/// `w = Σ ỹ_i α_i x_i` recomputed from scratch (merged-dual convention).
pub fn weight_from_duals(data: &SparseDataset, dec: &RankDecomposition, alpha: &[f64]) -> Vec<f64> {
    let mut w = vec![0.0; data.m()];
    for (i, &a) in alpha.iter().enumerate().take(data.n()) {
        if a != 0.0 {
            data.row(i).axpy(dec.signed[i] * a, &mut w);
        }
    }
    w
}

/// Dual objective of the merged formulation:
/// `½‖w‖² + ε Σ_{i∈I} |α_i| − Σ_{i∉I} α_i`, compensated summation throughout.
pub fn dual_objective_dcd2(state: &DualStateDcd2, dec: &RankDecomposition, eps: f64) -> f64 {
    let quad = 0.5 * kahan_sum(state.w.iter().map(|&v| v * v));
    let reg = kahan_sum(dec.middle.iter().map(|&i| eps * state.alpha[i].abs()));
    let lin = kahan_sum(
        dec.left
            .iter()
            .chain(dec.right.iter())
            .map(|&i| state.alpha[i]),
    );
    quad + reg - lin
}

/// Dual objective of the split formulation:
/// `½‖w‖² + ε Σ_{i∈I} (α⁺_i + α⁻_i) − Σ_{i∉I} β_i`.
pub fn dual_objective_dcd1(state: &DualStateDcd1, eps: f64) -> f64 {
    let quad = 0.5 * kahan_sum(state.w.iter().map(|&v| v * v));
    let reg = kahan_sum(
        state
            .alpha_plus
            .iter()
            .zip(&state.alpha_minus)
            .map(|(&p, &m)| eps * (p + m)),
    );
    let lin = kahan_sum(state.beta.iter().copied());
    quad + reg - lin
}

/// Primal objective
/// `½‖w‖² + C1 Σ_{i∈I} max(|wᵀx_i| − ε, 0) + C2 Σ_{i∉I} max(0, 1 − ỹ_i wᵀx_i)`.
/// At the optimum this equals minus the dual objective; the gap is a solver
/// quality certificate used by the test suites.
pub fn primal_objective(
    w: &[f64],
    data: &SparseDataset,
    dec: &RankDecomposition,
    cfg: &SolverConfig,
) -> f64 {
    let quad = 0.5 * kahan_sum(w.iter().map(|&v| v * v));
    let losses = kahan_sum((0..data.n()).map(|i| {
        let score = data.row(i).dot(w);
        if dec.is_middle(i) {
            cfg.c1 * (score.abs() - cfg.eps).max(0.0)
        } else {
            cfg.c2 * (1.0 - dec.signed[i] * score).max(0.0)
        }
    }));
    quad + losses
}

/// Trains rank `k` with the merged-variable coordinate descent.
pub fn train_rank_dcd2(
    data: &SparseDataset,
    k: usize,
    cfg: &SolverConfig,
) -> Result<RankSolveDcd2, SolverError> {
    train_rank_dcd2_inner(data, k, cfg, None)
}

/// Same as [`train_rank_dcd2`] but reports a [`SweepEvent`] after every
/// sweep; the benchmark harness builds convergence traces from these and may
/// abort the solve early by returning `ControlFlow::Break`. The per-sweep
/// objective evaluation only happens on this observed path.
pub fn train_rank_dcd2_observed<F>(
    data: &SparseDataset,
    k: usize,
    cfg: &SolverConfig,
    mut observer: F,
) -> Result<RankSolveDcd2, SolverError>
where
    F: FnMut(&SweepEvent) -> ControlFlow<()>,
{
    train_rank_dcd2_inner(data, k, cfg, Some(&mut observer))
}

type Observer<'a> = &'a mut dyn FnMut(&SweepEvent) -> ControlFlow<()>;

fn train_rank_dcd2_inner(
    data: &SparseDataset,
    k: usize,
    cfg: &SolverConfig,
    mut observer: Option<Observer<'_>>,
) -> Result<RankSolveDcd2, SolverError> {
    cfg.validate()?;
    let dec = data.decompose(k)?;
    let n = data.n();
    let mut alpha = vec![0.0f64; n];
    let mut w = vec![0.0f64; data.m()];
    let sq_norms: Vec<f64> = data.rows().iter().map(|r| r.squared_norm()).collect();
    let full: Vec<usize> = (0..n).filter(|&i| sq_norms[i] > 0.0).collect();
    let mut sweep_state = SweepState::new(full);
    let mut rng = SplitMix64::new(derive_seed(cfg.seed, k as u64));
    let stopwatch = Stopwatch::start();
    let mut converged = false;

    while sweep_state.sweeps() < cfg.max_sweeps {
        let outcome = sweep_state.sweep(&mut rng, cfg.eps_stop, |i, m_prev| {
            let b = dec.signed[i] * data.row(i).dot(&w);
            if dec.is_middle(i) {
                let (g_p, g_n) = (b + cfg.eps, b - cfg.eps);
                if cfg.shrinking && shrink_test_soft(alpha[i], g_p, g_n, cfg.c1, m_prev) {
                    return Visit::Shrink;
                }
                let step = soft_thresh_step(SoftThreshStepInput {
                    a: sq_norms[i],
                    b,
                    alpha: alpha[i],
                    eps: cfg.eps,
                    bound: cfg.c1,
                });
                debug_assert!(step.new_alpha.abs() <= cfg.c1);
                if step.new_alpha != alpha[i] {
                    data.row(i)
                        .axpy((step.new_alpha - alpha[i]) * dec.signed[i], &mut w);
                    alpha[i] = step.new_alpha;
                }
                Visit::Keep {
                    violation: step.violation,
                }
            } else {
                let g = b - 1.0;
                if cfg.shrinking && shrink_test_box(alpha[i], g, cfg.c2, m_prev) {
                    return Visit::Shrink;
                }
                let step = box_step(BoxStepInput {
                    a: sq_norms[i],
                    b,
                    alpha: alpha[i],
                    upper: cfg.c2,
                });
                debug_assert!((0.0..=cfg.c2).contains(&step.new_alpha));
                if step.new_alpha != alpha[i] {
                    data.row(i)
                        .axpy((step.new_alpha - alpha[i]) * dec.signed[i], &mut w);
                    alpha[i] = step.new_alpha;
                }
                Visit::Keep {
                    violation: step.violation,
                }
            }
        });
        if let Some(obs) = observer.as_mut() {
            let control = obs(&SweepEvent {
                sweep: sweep_state.sweeps(),
                seconds: stopwatch.elapsed_seconds(),
                objective: dual_objective_dcd2(
                    &DualStateDcd2 {
                        alpha: alpha.clone(),
                        w: w.clone(),
                    },
                    &dec,
                    cfg.eps,
                ),
                violation_norm: sweep_state.violation_norm(),
                active_len: sweep_state.active_len(),
            });
            if control.is_break() {
                break;
            }
        }
        match outcome {
            SweepOutcome::Converged => {
                converged = true;
                break;
            }
            SweepOutcome::ShrunkConverged => sweep_state.reset_active(),
            SweepOutcome::Continue => {}
        }
    }

    Ok(RankSolveDcd2 {
        state: DualStateDcd2 { alpha, w },
        sweeps: sweep_state.sweeps(),
        converged,
    })
}

/// Trains rank `k` with the direct extension over all `n + l` duals:
/// deterministic sequential order, no shrinking, stopping on the same
/// relative violation-norm rule for comparability.
pub fn train_rank_dcd1(
    data: &SparseDataset,
    k: usize,
    cfg: &SolverConfig,
) -> Result<RankSolveDcd1, SolverError> {
    train_rank_dcd1_inner(data, k, cfg, None)
}

pub fn train_rank_dcd1_observed<F>(
    data: &SparseDataset,
    k: usize,
    cfg: &SolverConfig,
    mut observer: F,
) -> Result<RankSolveDcd1, SolverError>
where
    F: FnMut(&SweepEvent) -> ControlFlow<()>,
{
    train_rank_dcd1_inner(data, k, cfg, Some(&mut observer))
}

fn train_rank_dcd1_inner(
    data: &SparseDataset,
    k: usize,
    cfg: &SolverConfig,
    mut observer: Option<Observer<'_>>,
) -> Result<RankSolveDcd1, SolverError> {
    cfg.validate()?;
    let dec = data.decompose(k)?;
    let l = dec.middle.len();
    let rest: Vec<usize> = (0..data.n()).filter(|&i| !dec.is_middle(i)).collect();
    let mut alpha_minus = vec![0.0f64; l];
    let mut alpha_plus = vec![0.0f64; l];
    let mut beta = vec![0.0f64; rest.len()];
    let mut w = vec![0.0f64; data.m()];
    let sq_norms: Vec<f64> = data.rows().iter().map(|r| r.squared_norm()).collect();
    let stopwatch = Stopwatch::start();

    let mut v0_norm: Option<f64> = None;
    let mut sweeps = 0usize;
    let mut converged = false;

    while sweeps < cfg.max_sweeps {
        let mut vt = 0.0f64;

        // alpha_minus block: gradient wᵀx + ε, weight contribution +x.
        for (j, &i) in dec.middle.iter().enumerate() {
            let a = sq_norms[i];
            if a <= 0.0 {
                continue;
            }
            let g = data.row(i).dot(&w) + cfg.eps;
            let v = project_gradient_box(g, alpha_minus[j], cfg.c1);
            vt += v.abs();
            if v != 0.0 {
                let new = (alpha_minus[j] - g / a).clamp(0.0, cfg.c1);
                if new != alpha_minus[j] {
                    data.row(i).axpy(new - alpha_minus[j], &mut w);
                    alpha_minus[j] = new;
                }
            }
        }
        // alpha_plus block: gradient −wᵀx + ε, weight contribution −x.
        for (j, &i) in dec.middle.iter().enumerate() {
            let a = sq_norms[i];
            if a <= 0.0 {
                continue;
            }
            let g = -data.row(i).dot(&w) + cfg.eps;
            let v = project_gradient_box(g, alpha_plus[j], cfg.c1);
            vt += v.abs();
            if v != 0.0 {
                let new = (alpha_plus[j] - g / a).clamp(0.0, cfg.c1);
                if new != alpha_plus[j] {
                    data.row(i).axpy(alpha_plus[j] - new, &mut w);
                    alpha_plus[j] = new;
                }
            }
        }
        // beta block: gradient ỹ wᵀx − 1, weight contribution ỹ x.
        for (j, &i) in rest.iter().enumerate() {
            let a = sq_norms[i];
            if a <= 0.0 {
                continue;
            }
            let g = dec.signed[i] * data.row(i).dot(&w) - 1.0;
            let v = project_gradient_box(g, beta[j], cfg.c2);
            vt += v.abs();
            if v != 0.0 {
                let new = (beta[j] - g / a).clamp(0.0, cfg.c2);
                if new != beta[j] {
                    data.row(i).axpy((new - beta[j]) * dec.signed[i], &mut w);
                    beta[j] = new;
                }
            }
        }

        sweeps += 1;
        let v0 = *v0_norm.get_or_insert(vt);
        if let Some(obs) = observer.as_mut() {
            let control = obs(&SweepEvent {
                sweep: sweeps,
                seconds: stopwatch.elapsed_seconds(),
                objective: dual_objective_dcd1(
                    &DualStateDcd1 {
                        alpha_minus: alpha_minus.clone(),
                        alpha_plus: alpha_plus.clone(),
                        beta: beta.clone(),
                        w: w.clone(),
                    },
                    cfg.eps,
                ),
                violation_norm: vt,
                active_len: data.n() + l,
            });
            if control.is_break() {
                break;
            }
        }
        if vt < cfg.eps_stop * v0 || vt == 0.0 {
            converged = true;
            break;
        }
    }

    Ok(RankSolveDcd1 {
        state: DualStateDcd1 {
            alpha_minus,
            alpha_plus,
            beta,
            w,
        },
        sweeps,
        converged,
    })
}

/// Per-rank training outcome carried alongside the model.
#[derive(Clone, Debug)]
pub struct RankStats {
    pub rank: usize,
    pub sweeps: usize,
    pub converged: bool,
    /// Instances whose dual variable is nonzero (|α| > 1e−9) at termination.
    pub support_vectors: usize,
}

#[derive(Clone, Debug)]
pub struct TrainReport {
    pub per_rank: Vec<RankStats>,
}

impl TrainReport {
    pub fn all_converged(&self) -> bool {
        self.per_rank.iter().all(|r| r.converged)
    }

    pub fn total_support_vectors(&self) -> usize {
        self.per_rank.iter().map(|r| r.support_vectors).sum()
    }
}

pub const SUPPORT_VECTOR_TOL: f64 = 1e-9;

/// The trained ordinal model: `p` weight vectors over `m` features, the
/// original-label table and the default rank predictor.
#[derive(Clone, Debug, PartialEq)]
pub struct OrdinalModel {
    weights: Vec<Vec<f64>>,
    m: usize,
    bias: Option<f64>,
    label_map: Vec<i64>,
    predictor: Predictor,
}

impl OrdinalModel {
    pub fn from_weights(
        weights: Vec<Vec<f64>>,
        m: usize,
        bias: Option<f64>,
        label_map: Vec<i64>,
        predictor: Predictor,
    ) -> Result<Self, SolverError> {
        if weights.len() < 2 {
            return Err(SolverError::Config(format!(
                "ordinal model needs at least 2 hyperplanes, got {}",
                weights.len()
            )));
        }
        if weights.len() != label_map.len() {
            return Err(SolverError::Config(
                "label map length must equal the number of ranks".into(),
            ));
        }
        for w in &weights {
            if w.len() != m {
                return Err(SolverError::Config(format!(
                    "weight vector length {} does not match feature count {m}",
                    w.len()
                )));
            }
            if !w.iter().all(|v| v.is_finite()) {
                return Err(SolverError::Config("non-finite weight".into()));
            }
        }
        Ok(OrdinalModel {
            weights,
            m,
            bias,
            label_map,
            predictor,
        })
    }

    pub fn p(&self) -> usize {
        self.weights.len()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn bias(&self) -> Option<f64> {
        self.bias
    }

    pub fn label_map(&self) -> &[i64] {
        &self.label_map
    }

    pub fn predictor(&self) -> Predictor {
        self.predictor
    }

    pub fn set_predictor(&mut self, predictor: Predictor) {
        self.predictor = predictor;
    }

    pub fn weights(&self) -> &[Vec<f64>] {
        &self.weights
    }

    /// `f_k(x) = w_kᵀ x` for rank `k` in `1..=p`.
    pub fn decision(&self, k: usize, x: &SparseVector) -> f64 {
        x.dot(&self.weights[k - 1])
    }

    /// Minimal-distance rank: `argmin_k |w_kᵀx|`, ties to the smallest rank.
    pub fn predict_old(&self, x: &SparseVector) -> usize {
        let mut best_k = 1;
        let mut best = f64::INFINITY;
        for k in 1..=self.p() {
            let d = self.decision(k, x).abs();
            if d < best {
                best = d;
                best_k = k;
            }
        }
        best_k
    }

    /// Ordered-binary-decomposition rank:
    /// `1 + Σ_k 1[(w_k + w_{k+1})ᵀx > 0]`; a zero score does not count.
    pub fn predict_new(&self, x: &SparseVector) -> usize {
        let mut rank = 1;
        for k in 1..self.p() {
            if self.decision(k, x) + self.decision(k + 1, x) > 0.0 {
                rank += 1;
            }
        }
        rank
    }

    pub fn predict_with(&self, predictor: Predictor, x: &SparseVector) -> usize {
        match predictor {
            Predictor::Old => self.predict_old(x),
            Predictor::New => self.predict_new(x),
        }
    }

    /// Rank by the model's default predictor.
    pub fn predict(&self, x: &SparseVector) -> usize {
        self.predict_with(self.predictor, x)
    }

    /// Original-label prediction for reporting.
    pub fn predict_original(&self, x: &SparseVector) -> i64 {
        self.label_map[self.predict(x) - 1]
    }
}

fn count_support_vectors(alpha: &[f64]) -> usize {
    alpha
        .iter()
        .filter(|a| a.abs() > SUPPORT_VECTOR_TOL)
        .count()
}

/// Trains the full model: every rank's subproblem is solved independently
/// with the configured algorithm (concurrently under the `parallel`
/// feature — the subproblems share nothing mutable).
pub fn train(
    data: &SparseDataset,
    cfg: &SolverConfig,
) -> Result<(OrdinalModel, TrainReport), SolverError> {
    cfg.validate()?;
    let solves = par_map((1..=data.p()).collect::<Vec<usize>>(), |k| {
        match cfg.algorithm {
            Algorithm::Dcd2 => train_rank_dcd2(data, k, cfg).map(|s| {
                let nsv = count_support_vectors(&s.state.alpha);
                (s.state.w, s.sweeps, s.converged, nsv)
            }),
            Algorithm::Dcd1 => train_rank_dcd1(data, k, cfg).map(|s| {
                let dec = data.decompose(k).expect("rank in range");
                let mut nsv = 0;
                for j in 0..s.state.alpha_plus.len() {
                    if (s.state.alpha_plus[j] - s.state.alpha_minus[j]).abs() > SUPPORT_VECTOR_TOL {
                        nsv += 1;
                    }
                }
                nsv += count_support_vectors(&s.state.beta);
                debug_assert_eq!(dec.middle.len(), s.state.alpha_plus.len());
                (s.state.w, s.sweeps, s.converged, nsv)
            }),
        }
    });

    let mut weights = Vec::with_capacity(data.p());
    let mut per_rank = Vec::with_capacity(data.p());
    for (idx, solve) in solves.into_iter().enumerate() {
        let (w, sweeps, converged, support_vectors) = solve?;
        weights.push(w);
        per_rank.push(RankStats {
            rank: idx + 1,
            sweeps,
            converged,
            support_vectors,
        });
    }
    let model = OrdinalModel::from_weights(
        weights,
        data.m(),
        data.bias(),
        data.label_map().to_vec(),
        Predictor::New,
    )?;
    Ok((model, TrainReport { per_rank }))
}

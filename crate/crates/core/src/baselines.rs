//! The three linear comparison methods, all running on the shared coordinate
//! descent engine: one-vs-all SVC, ε-insensitive support vector regression
//! with ordinal rounding, and the threshold reduction of ordinal regression
//! to one binary SVC over extended samples.

use crate::data::{SparseDataset, SparseVector};
use crate::dcd::{
    shrink_test_soft, soft_thresh_step, solve_binary_hinge, SoftThreshStepInput, SweepOutcome,
    SweepState, Visit,
};
use crate::model::{RankStats, SolverConfig, SolverError, TrainReport, SUPPORT_VECTOR_TOL};
use crate::rng::{derive_seed, SplitMix64};

/// Outcome of a single dual solve.
#[derive(Clone, Copy, Debug)]
pub struct SolveStats {
    pub sweeps: usize,
    pub converged: bool,
    pub support_vectors: usize,
}

/// One-vs-all linear SVC: one binary L1-hinge problem per rank, prediction
/// by maximal score.
#[derive(Clone, Debug, PartialEq)]
pub struct OvaModel {
    weights: Vec<Vec<f64>>,
    m: usize,
    bias: Option<f64>,
    label_map: Vec<i64>,
}

impl OvaModel {
    pub fn from_weights(
        weights: Vec<Vec<f64>>,
        m: usize,
        bias: Option<f64>,
        label_map: Vec<i64>,
    ) -> Result<Self, SolverError> {
        if weights.len() != label_map.len() || weights.len() < 2 {
            return Err(SolverError::Config(
                "need one weight vector per rank".into(),
            ));
        }
        if weights.iter().any(|w| w.len() != m) {
            return Err(SolverError::Config("weight length mismatch".into()));
        }
        Ok(OvaModel {
            weights,
            m,
            bias,
            label_map,
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

    pub fn weights(&self) -> &[Vec<f64>] {
        &self.weights
    }

    pub fn decision(&self, k: usize, x: &SparseVector) -> f64 {
        x.dot(&self.weights[k - 1])
    }

    /// `argmax_k w_kᵀx`, ties to the smallest rank.
    pub fn predict(&self, x: &SparseVector) -> usize {
        let mut best_k = 1;
        let mut best = f64::NEG_INFINITY;
        for k in 1..=self.p() {
            let s = self.decision(k, x);
            if s > best {
                best = s;
                best_k = k;
            }
        }
        best_k
    }
}

/// Trains the one-vs-all model: rank `k` against the rest with cost
/// `cfg.c1`, shrinking and stopping as configured.
pub fn train_svc_ova(
    data: &SparseDataset,
    cfg: &SolverConfig,
) -> Result<(OvaModel, TrainReport), SolverError> {
    cfg.validate()?;
    let solves = crate::util::par_map((1..=data.p()).collect::<Vec<usize>>(), |k| {
        let signs: Vec<f64> = data
            .labels()
            .iter()
            .map(|&y| if y == k { 1.0 } else { -1.0 })
            .collect();
        solve_binary_hinge(
            data.rows(),
            &signs,
            data.m(),
            cfg.c1,
            cfg.eps_stop,
            cfg.shrinking,
            cfg.max_sweeps,
            derive_seed(cfg.seed, k as u64),
        )
    });
    let mut weights = Vec::with_capacity(data.p());
    let mut per_rank = Vec::with_capacity(data.p());
    for (idx, solve) in solves.into_iter().enumerate() {
        per_rank.push(RankStats {
            rank: idx + 1,
            sweeps: solve.sweeps,
            converged: solve.converged,
            support_vectors: solve
                .alpha
                .iter()
                .filter(|a| a.abs() > SUPPORT_VECTOR_TOL)
                .count(),
        });
        weights.push(solve.w);
    }
    let model = OvaModel::from_weights(weights, data.m(), data.bias(), data.label_map().to_vec())?;
    Ok((model, TrainReport { per_rank }))
}

/// Linear ε-insensitive SVR over real-valued rank targets, decoded back to
/// a rank by rounding.
#[derive(Clone, Debug, PartialEq)]
pub struct SvrModel {
    w: Vec<f64>,
    m: usize,
    p: usize,
    bias: Option<f64>,
    label_map: Vec<i64>,
}

impl SvrModel {
    pub fn from_weights(
        w: Vec<f64>,
        m: usize,
        p: usize,
        bias: Option<f64>,
        label_map: Vec<i64>,
    ) -> Result<Self, SolverError> {
        if w.len() != m {
            return Err(SolverError::Config("weight length mismatch".into()));
        }
        if p < 2 || label_map.len() != p {
            return Err(SolverError::Config("invalid rank count".into()));
        }
        Ok(SvrModel {
            w,
            m,
            p,
            bias,
            label_map,
        })
    }

    pub fn p(&self) -> usize {
        self.p
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

    pub fn weights(&self) -> &[f64] {
        &self.w
    }

    /// Raw regression value `wᵀx`.
    pub fn regress(&self, x: &SparseVector) -> f64 {
        x.dot(&self.w)
    }

    /// Nearest rank: round half away from zero, then clamp to `[1, p]`.
    pub fn predict(&self, x: &SparseVector) -> usize {
        round_to_rank(self.regress(x), self.p)
    }
}

/// Rounds a real-valued prediction onto the ordinal scale.
pub fn round_to_rank(value: f64, p: usize) -> usize {
    let r = value.round(); // half away from zero
    (r.max(1.0).min(p as f64)) as usize
}

/// Dual solve of `min ½‖w‖² + C Σ max(0, |wᵀx_i − y_i| − ε)` on arbitrary
/// real targets: one merged variable per instance in `[−C, C]`, sharing the
/// soft-threshold subproblem with `B = wᵀx_i − y_i`.
pub fn solve_svr(
    rows: &[SparseVector],
    targets: &[f64],
    m: usize,
    cfg: &SolverConfig,
) -> (Vec<f64>, Vec<f64>, SolveStats) {
    assert_eq!(rows.len(), targets.len());
    let n = rows.len();
    let c = cfg.c1;
    let mut alpha = vec![0.0f64; n];
    let mut w = vec![0.0f64; m];
    let sq_norms: Vec<f64> = rows.iter().map(|r| r.squared_norm()).collect();
    let full: Vec<usize> = (0..n).filter(|&i| sq_norms[i] > 0.0).collect();
    let mut state = SweepState::new(full);
    let mut rng = SplitMix64::new(derive_seed(cfg.seed, 0));
    let mut converged = false;

    while state.sweeps() < cfg.max_sweeps {
        let outcome = state.sweep(&mut rng, cfg.eps_stop, |i, m_prev| {
            let b = rows[i].dot(&w) - targets[i];
            let (g_p, g_n) = (b + cfg.eps, b - cfg.eps);
            if cfg.shrinking && shrink_test_soft(alpha[i], g_p, g_n, c, m_prev) {
                return Visit::Shrink;
            }
            let step = soft_thresh_step(SoftThreshStepInput {
                a: sq_norms[i],
                b,
                alpha: alpha[i],
                eps: cfg.eps,
                bound: c,
            });
            if step.new_alpha != alpha[i] {
                rows[i].axpy(step.new_alpha - alpha[i], &mut w);
                alpha[i] = step.new_alpha;
            }
            Visit::Keep {
                violation: step.violation,
            }
        });
        match outcome {
            SweepOutcome::Converged => {
                converged = true;
                break;
            }
            SweepOutcome::ShrunkConverged => state.reset_active(),
            SweepOutcome::Continue => {}
        }
    }

    let support_vectors = alpha
        .iter()
        .filter(|a| a.abs() > SUPPORT_VECTOR_TOL)
        .count();
    let stats = SolveStats {
        sweeps: state.sweeps(),
        converged,
        support_vectors,
    };
    (w, alpha, stats)
}

/// Trains SVR with ranks `1..=p` as the regression targets.
pub fn train_svr(
    data: &SparseDataset,
    cfg: &SolverConfig,
) -> Result<(SvrModel, SolveStats), SolverError> {
    cfg.validate()?;
    let targets: Vec<f64> = data.labels().iter().map(|&y| y as f64).collect();
    let (w, _alpha, stats) = solve_svr(data.rows(), &targets, data.m(), cfg);
    let model = SvrModel::from_weights(
        w,
        data.m(),
        data.p(),
        data.bias(),
        data.label_map().to_vec(),
    )?;
    Ok((model, stats))
}

/// Threshold model from the sample-extension reduction: all `p − 1` binary
/// decisions share one base weight vector (parallel hyperplanes) plus one
/// learned threshold per boundary.
#[derive(Clone, Debug, PartialEq)]
pub struct RedSvmModel {
    w: Vec<f64>,
    thresholds: Vec<f64>,
    m: usize,
    bias: Option<f64>,
    label_map: Vec<i64>,
}

impl RedSvmModel {
    pub fn from_parts(
        w: Vec<f64>,
        thresholds: Vec<f64>,
        m: usize,
        bias: Option<f64>,
        label_map: Vec<i64>,
    ) -> Result<Self, SolverError> {
        if w.len() != m {
            return Err(SolverError::Config("weight length mismatch".into()));
        }
        if thresholds.len() + 1 != label_map.len() || label_map.len() < 2 {
            return Err(SolverError::Config(
                "need p-1 thresholds for p ranks".into(),
            ));
        }
        Ok(RedSvmModel {
            w,
            thresholds,
            m,
            bias,
            label_map,
        })
    }

    pub fn p(&self) -> usize {
        self.thresholds.len() + 1
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

    pub fn weights(&self) -> &[f64] {
        &self.w
    }

    pub fn thresholds(&self) -> &[f64] {
        &self.thresholds
    }

    pub fn score(&self, x: &SparseVector) -> f64 {
        x.dot(&self.w)
    }

    /// Whether the learned thresholds are ordered. The reduction does not
    /// enforce this, so it is reported rather than asserted.
    pub fn thresholds_monotone(&self) -> bool {
        self.thresholds.windows(2).all(|t| t[0] <= t[1])
    }

    /// `1 + Σ_k 1[wᵀx − θ_k > 0]`.
    pub fn predict(&self, x: &SparseVector) -> usize {
        let s = self.score(x);
        1 + self.thresholds.iter().filter(|&&t| s - t > 0.0).count()
    }
}

/// Binary problem produced by the sample extension.
#[derive(Clone, Debug)]
pub struct ExtendedBinary {
    pub rows: Vec<SparseVector>,
    pub signs: Vec<f64>,
    /// `m + p − 1`: base features plus one indicator column per boundary.
    pub m: usize,
}

/// Extends every instance into `p − 1` boundary problems: `x_i` concatenated
/// with `−1` at extended coordinate `k`, labeled `+1` iff `y_i > k`. Each
/// extended row stores just one extra nonzero.
pub fn extend_redsvm(data: &SparseDataset) -> ExtendedBinary {
    let p = data.p();
    let m = data.m();
    let count = data.n() * (p - 1);
    let mut rows = Vec::with_capacity(count);
    let mut signs = Vec::with_capacity(count);
    for (row, &y) in data.rows().iter().zip(data.labels()) {
        for k in 1..p {
            let extended = row
                .with_appended(m + k - 1, -1.0)
                .expect("extended index past all base features");
            rows.push(extended);
            signs.push(if y > k { 1.0 } else { -1.0 });
        }
    }
    ExtendedBinary {
        rows,
        signs,
        m: m + p - 1,
    }
}

/// Trains the reduction: one binary L1-hinge SVC on the extended dataset,
/// uniform cost `cfg.c1`, then splits the learned vector into the shared
/// direction and the thresholds.
pub fn train_redsvm(
    data: &SparseDataset,
    cfg: &SolverConfig,
) -> Result<(RedSvmModel, SolveStats), SolverError> {
    cfg.validate()?;
    let ext = extend_redsvm(data);
    let solve = solve_binary_hinge(
        &ext.rows,
        &ext.signs,
        ext.m,
        cfg.c1,
        cfg.eps_stop,
        cfg.shrinking,
        cfg.max_sweeps,
        derive_seed(cfg.seed, 0),
    );
    let m = data.m();
    let w = solve.w[..m].to_vec();
    let thresholds = solve.w[m..].to_vec();
    let stats = SolveStats {
        sweeps: solve.sweeps,
        converged: solve.converged,
        support_vectors: solve
            .alpha
            .iter()
            .filter(|a| a.abs() > SUPPORT_VECTOR_TOL)
            .count(),
    };
    let model = RedSvmModel::from_parts(w, thresholds, m, data.bias(), data.label_map().to_vec())?;
    Ok((model, stats))
}

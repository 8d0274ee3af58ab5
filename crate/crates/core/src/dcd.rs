//! Dual coordinate descent building blocks shared by every solver in the
//! crate: closed-form one-variable steps resulting from fixing all but one dual
//! variable, their optimality violations, shrinking tests against the
//! previous sweep's maximal violation, and the randomized sweep loop with
//! the relative-violation stopping rule.

use crate::data::SparseVector;
use crate::rng::SplitMix64;

/// One-variable box subproblem `min_{s in [0, upper]} ½A(s−alpha)² + (B−1)s`.
///
/// `a` is `xᵀx`, `b` is `ỹ wᵀx` from the previous iterate, `alpha` the
/// current dual value.
#[derive(Clone, Copy, Debug)]
pub struct BoxStepInput {
    pub a: f64,
    pub b: f64,
    pub alpha: f64,
    pub upper: f64,
}

/// One-variable soft-threshold subproblem
/// `min_{s in [−bound, bound]} ½A(s−alpha)² + B·s + eps·|s|`.
#[derive(Clone, Copy, Debug)]
pub struct SoftThreshStepInput {
    pub a: f64,
    pub b: f64,
    pub alpha: f64,
    pub eps: f64,
    pub bound: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepResult {
    pub new_alpha: f64,
    /// Optimality violation at the *old* alpha; zero iff the coordinate was
    /// already optimal.
    pub violation: f64,
}

/// Projected gradient for a variable boxed in `[0, upper]`.
pub fn project_gradient_box(g: f64, alpha: f64, upper: f64) -> f64 {
    if alpha <= 0.0 {
        g.min(0.0)
    } else if alpha >= upper {
        g.max(0.0)
    } else {
        g
    }
}

/// Optimality violation of the soft-threshold subproblem at `alpha`,
/// with `g_p = B + eps` and `g_n = B − eps` evaluated there. Five cases:
/// interior positive, interior negative, at `−bound`, at `bound`, at zero.
pub fn violation_soft(alpha: f64, g_p: f64, g_n: f64, bound: f64) -> f64 {
    if alpha >= bound {
        g_p.max(0.0)
    } else if alpha <= -bound {
        g_n.min(0.0)
    } else if alpha == 0.0 {
        g_n.max(0.0) - g_p.min(0.0)
    } else if alpha > 0.0 {
        g_p
    } else {
        g_n
    }
}

/// Exact minimizer of the box subproblem, plus the violation at the old
/// value. `a` must be positive; zero rows are the caller's job to skip.
pub fn box_step(input: BoxStepInput) -> StepResult {
    assert!(input.a > 0.0, "box_step requires A > 0");
    let g = input.b - 1.0;
    let violation = project_gradient_box(g, input.alpha, input.upper);
    let new_alpha = (input.alpha - g / input.a).clamp(0.0, input.upper);
    StepResult {
        new_alpha,
        violation,
    }
}

/// Exact minimizer of the soft-threshold subproblem, plus the violation at
/// the old value. `a` must be positive.
pub fn soft_thresh_step(input: SoftThreshStepInput) -> StepResult {
    assert!(input.a > 0.0, "soft_thresh_step requires A > 0");
    let g_p = input.b + input.eps;
    let g_n = input.b - input.eps;
    let scaled = input.a * input.alpha;
    let d = if g_p < scaled {
        -g_p / input.a
    } else if g_n > scaled {
        -g_n / input.a
    } else {
        -input.alpha
    };
    let violation = violation_soft(input.alpha, g_p, g_n, input.bound);
    let new_alpha = (input.alpha + d).clamp(-input.bound, input.bound);
    StepResult {
        new_alpha,
        violation,
    }
}

/// Shrink test for a `[0, upper]` variable: pinned at a bound with the *raw*
/// gradient pushing further out by more than `m`. `m = +inf` (first sweep
/// and right after an active-set reset) never shrinks.
pub fn shrink_test_box(alpha: f64, g: f64, upper: f64, m: f64) -> bool {
    (alpha == 0.0 && g > m) || (alpha == upper && g < -m)
}

/// Shrink test for a `[−bound, bound]` soft-threshold variable.
pub fn shrink_test_soft(alpha: f64, g_p: f64, g_n: f64, bound: f64, m: f64) -> bool {
    (alpha == 0.0 && g_n < -m && g_p > m)
        || (alpha == bound && g_p < -m)
        || (alpha == -bound && g_n > m)
}

/// What the per-index callback tells the sweep loop.
#[derive(Clone, Copy, Debug)]
pub enum Visit {
    /// Index stays active; its violation enters `‖vᵗ‖₁` and the max.
    Keep { violation: f64 },
    /// Index leaves the active set; nothing enters the violation norm.
    Shrink,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepOutcome {
    /// Stopping rule met on the full index set.
    Converged,
    /// Stopping rule met on a shrunk set; caller restores the full set and
    /// `M = +inf`, then keeps sweeping.
    ShrunkConverged,
    Continue,
}

/// Active-set state for the randomized sweep loop. `‖v⁰‖₁` is captured at
/// the end of the first sweep and stays fixed; `M` is the maximal violation
/// of the previous sweep (`+inf` until one completes, and again after each
/// reset).
#[derive(Clone, Debug)]
pub struct SweepState {
    full: Vec<usize>,
    active: Vec<usize>,
    m: f64,
    v0_norm: Option<f64>,
    vt_norm: f64,
    sweeps: usize,
}

impl SweepState {
    /// `full` is the permanent index set: callers exclude zero rows up front,
    /// those never re-enter on reset.
    pub fn new(full: Vec<usize>) -> Self {
        let active = full.clone();
        SweepState {
            full,
            active,
            m: f64::INFINITY,
            v0_norm: None,
            vt_norm: 0.0,
            sweeps: 0,
        }
    }

    pub fn sweeps(&self) -> usize {
        self.sweeps
    }

    pub fn active_len(&self) -> usize {
        self.active.len()
    }

    pub fn max_violation_prev(&self) -> f64 {
        self.m
    }

    /// `‖vᵗ‖₁` accumulated over the most recent sweep.
    pub fn violation_norm(&self) -> f64 {
        self.vt_norm
    }

    pub fn v0_norm(&self) -> Option<f64> {
        self.v0_norm
    }

    /// Restores the full index set after a `ShrunkConverged` outcome.
    pub fn reset_active(&mut self) {
        self.active = self.full.clone();
        self.m = f64::INFINITY;
    }

    /// Runs one sweep: reshuffles the active set, visits each index in that
    /// order, drops the ones the callback shrinks, then evaluates the
    /// stopping rule `‖vᵗ‖₁ < eps_stop·‖v⁰‖₁`.
    pub fn sweep<F>(&mut self, rng: &mut SplitMix64, eps_stop: f64, mut visit: F) -> SweepOutcome
    where
        F: FnMut(usize, f64) -> Visit,
    {
        rng.shuffle(&mut self.active);
        let m_prev = self.m;
        let mut vt = 0.0f64;
        let mut vmax = 0.0f64;
        let mut len = self.active.len();
        let mut j = 0;
        while j < len {
            let i = self.active[j];
            match visit(i, m_prev) {
                Visit::Shrink => {
                    len -= 1;
                    self.active.swap(j, len);
                }
                Visit::Keep { violation } => {
                    let v = violation.abs();
                    vt += v;
                    if v > vmax {
                        vmax = v;
                    }
                    j += 1;
                }
            }
        }
        self.active.truncate(len);
        self.sweeps += 1;
        self.vt_norm = vt;
        let v0 = *self.v0_norm.get_or_insert(vt);
        if vt < eps_stop * v0 || vt == 0.0 {
            if self.active.len() == self.full.len() {
                SweepOutcome::Converged
            } else {
                SweepOutcome::ShrunkConverged
            }
        } else {
            self.m = vmax;
            SweepOutcome::Continue
        }
    }
}

/// Result of a binary L1-hinge SVC solve on the shared engine (the one-vs-all
/// and threshold-reduction trainers both run on this).
#[derive(Clone, Debug)]
pub struct BinaryHingeSolve {
    pub w: Vec<f64>,
    pub alpha: Vec<f64>,
    pub sweeps: usize,
    pub converged: bool,
}

/// Solves `min ½‖w‖² + C Σ max(0, 1 − z_i wᵀx_i)` through its dual
/// (`min ½‖w‖² − Σα`, `0 ≤ α ≤ C`, `w = Σ z_i α_i x_i`) by randomized dual
/// coordinate descent with optional shrinking.
#[allow(clippy::too_many_arguments)]
pub fn solve_binary_hinge(
    rows: &[SparseVector],
    signs: &[f64],
    m: usize,
    c: f64,
    eps_stop: f64,
    shrinking: bool,
    max_sweeps: usize,
    seed: u64,
) -> BinaryHingeSolve {
    assert_eq!(rows.len(), signs.len());
    assert!(c > 0.0 && eps_stop > 0.0);
    let n = rows.len();
    let mut alpha = vec![0.0f64; n];
    let mut w = vec![0.0f64; m];
    let sq_norms: Vec<f64> = rows.iter().map(|r| r.squared_norm()).collect();
    let full: Vec<usize> = (0..n).filter(|&i| sq_norms[i] > 0.0).collect();
    let mut state = SweepState::new(full);
    let mut rng = SplitMix64::new(seed);
    let mut converged = false;

    while state.sweeps() < max_sweeps {
        let outcome = state.sweep(&mut rng, eps_stop, |i, m_prev| {
            let b = signs[i] * rows[i].dot(&w);
            let g = b - 1.0;
            if shrinking && shrink_test_box(alpha[i], g, c, m_prev) {
                return Visit::Shrink;
            }
            let step = box_step(BoxStepInput {
                a: sq_norms[i],
                b,
                alpha: alpha[i],
                upper: c,
            });
            if step.new_alpha != alpha[i] {
                rows[i].axpy((step.new_alpha - alpha[i]) * signs[i], &mut w);
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

    BinaryHingeSolve {
        w,
        alpha,
        sweeps: state.sweeps(),
        converged,
    }
}

//! Independent oracles for the verification suites (behind the `test-util`
//! feature). Nothing here shares code with the coordinate descent path it
//! checks: the one-variable oracle is a brute-force grid scan and the dual
//! oracle is an accelerated projected proximal-gradient method working on
//! the explicit Gram matrix.

use crate::data::{RankDecomposition, SparseDataset, SparseVector};
use crate::model::SolverConfig;
use crate::rng::SplitMix64;

/// Brute-force minimizer of `f` over `[lo, hi]` with a fixed step.
pub fn grid_min(f: impl Fn(f64) -> f64, lo: f64, hi: f64, step: f64) -> (f64, f64) {
    let mut best_x = lo;
    let mut best = f(lo);
    let mut x = lo;
    while x < hi {
        x = (x + step).min(hi);
        let v = f(x);
        if v < best {
            best = v;
            best_x = x;
        }
    }
    (best_x, best)
}

/// Dense random ordinal instance: `n` rows over `m` features with every rank
/// in `1..=p` present. Dense rows keep the zero-row convention out of the
/// oracle comparison.
pub fn random_dense_instance(rng: &mut SplitMix64, n: usize, m: usize, p: usize) -> SparseDataset {
    assert!(n >= p && p >= 2);
    let mut rows = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let values: Vec<f64> = (0..m)
            .map(|_| {
                let v = rng.normal();
                if v == 0.0 {
                    0.1
                } else {
                    v
                }
            })
            .collect();
        rows.push(SparseVector::from_dense(&values));
        // First p rows pin one instance per rank, the rest are uniform.
        let y = if i < p {
            i + 1
        } else {
            rng.below(p as u64) as usize + 1
        };
        labels.push(y);
    }
    SparseDataset::from_parts(rows, labels, p, m).expect("valid instance")
}

/// Result of the proximal-gradient oracle.
#[derive(Clone, Debug)]
pub struct OracleSolve {
    pub alpha: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
}

/// Solves the merged dual
/// `min ½‖Σ ỹ_i α_i x_i‖² + ε Σ_{i∈I}|α_i| − Σ_{i∉I} α_i` over the feasible
/// box by monotone FISTA on the explicit Gram matrix, far from the
/// coordinate descent code path. Runs up to `max_iters` iterations
/// (default budget 1e6) with an early exit once the objective stalls at
/// machine precision.
#[allow(clippy::needless_range_loop)]
pub fn dual_oracle(
    data: &SparseDataset,
    dec: &RankDecomposition,
    cfg: &SolverConfig,
    max_iters: usize,
) -> OracleSolve {
    let n = data.n();
    // Gram matrix of the signed rows; zero rows stay pinned at alpha = 0 to
    // match the solver convention of skipping them.
    let mut gram = vec![vec![0.0f64; n]; n];
    for i in 0..n {
        for j in i..n {
            let mut dot = 0.0;
            let (a, b) = (data.row(i).entries(), data.row(j).entries());
            let (mut ia, mut ib) = (0usize, 0usize);
            while ia < a.len() && ib < b.len() {
                match a[ia].0.cmp(&b[ib].0) {
                    std::cmp::Ordering::Less => ia += 1,
                    std::cmp::Ordering::Greater => ib += 1,
                    std::cmp::Ordering::Equal => {
                        dot += a[ia].1 * b[ib].1;
                        ia += 1;
                        ib += 1;
                    }
                }
            }
            let v = dec.signed[i] * dec.signed[j] * dot;
            gram[i][j] = v;
            gram[j][i] = v;
        }
    }
    let active: Vec<bool> = (0..n).map(|i| data.row(i).squared_norm() > 0.0).collect();

    // Lipschitz bound for the smooth part: max absolute row sum of the Gram.
    let lipschitz = gram
        .iter()
        .map(|row| row.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0f64, f64::max)
        .max(1e-12);
    let step = 1.0 / lipschitz;

    let objective = |alpha: &[f64]| -> f64 {
        let mut quad = 0.0;
        for i in 0..n {
            if alpha[i] == 0.0 {
                continue;
            }
            let mut acc = 0.0;
            for j in 0..n {
                acc += gram[i][j] * alpha[j];
            }
            quad += alpha[i] * acc;
        }
        let mut rest = 0.0;
        for (i, &a) in alpha.iter().enumerate() {
            if dec.is_middle(i) {
                rest += cfg.eps * a.abs();
            } else {
                rest -= a;
            }
        }
        0.5 * quad + rest
    };

    let prox = |z: f64, i: usize| -> f64 {
        if dec.is_middle(i) {
            // soft threshold by step*eps, then box [-C1, C1]
            let t = step * cfg.eps;
            let s = if z > t {
                z - t
            } else if z < -t {
                z + t
            } else {
                0.0
            };
            s.clamp(-cfg.c1, cfg.c1)
        } else {
            z.clamp(0.0, cfg.c2)
        }
    };

    let mut alpha = vec![0.0f64; n];
    let mut momentum = alpha.clone();
    let mut t_prev = 1.0f64;
    let mut f_prev = objective(&alpha);
    let mut stall = 0usize;
    let mut iterations = 0usize;

    for iter in 0..max_iters {
        iterations = iter + 1;
        // Gradient of the smooth part at the momentum point.
        let mut next = vec![0.0f64; n];
        for i in 0..n {
            if !active[i] {
                continue;
            }
            let mut grad = 0.0;
            for j in 0..n {
                grad += gram[i][j] * momentum[j];
            }
            if !dec.is_middle(i) {
                grad -= 1.0;
            }
            next[i] = prox(momentum[i] - step * grad, i);
        }
        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t_prev * t_prev).sqrt());
        let f_next = objective(&next);
        if f_next > f_prev {
            // Monotone restart: fall back to a plain proximal step from the
            // current iterate.
            momentum = alpha.clone();
            t_prev = 1.0;
            continue;
        }
        let beta = (t_prev - 1.0) / t_next;
        for i in 0..n {
            momentum[i] = next[i] + beta * (next[i] - alpha[i]);
        }
        let improvement = f_prev - f_next;
        alpha = next;
        t_prev = t_next;
        f_prev = f_next;
        if improvement <= 1e-16 * f_prev.abs().max(1e-3) {
            stall += 1;
            if stall > 200 {
                break;
            }
        } else {
            stall = 0;
        }
    }

    OracleSolve {
        alpha,
        objective: f_prev,
        iterations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{dual_objective_dcd2, train_rank_dcd2};

    #[test]
    fn oracle_matches_tight_dcd_on_one_instance() {
        let mut rng = SplitMix64::new(77);
        let data = random_dense_instance(&mut rng, 12, 3, 3);
        let cfg = SolverConfig {
            eps_stop: 1e-10,
            max_sweeps: 200_000,
            ..SolverConfig::default()
        };
        let dec = data.decompose(2).unwrap();
        let solve = train_rank_dcd2(&data, 2, &cfg).unwrap();
        let f_dcd = dual_objective_dcd2(&solve.state, &dec, cfg.eps);
        let oracle = dual_oracle(&data, &dec, &cfg, 300_000);
        let rel = (f_dcd - oracle.objective).abs() / oracle.objective.abs().max(1e-9);
        assert!(
            rel < 1e-6,
            "dcd {f_dcd} vs oracle {} (rel {rel})",
            oracle.objective
        );
    }
}

//! Acceptance suite: every criterion runs at its stated tolerance and
//! prints one pass/fail line. Run with `--nocapture` to watch the lines as
//! they appear; the test fails at the end if any criterion failed.
//!
//! Criterion 9 needs the movie-review corpus at `data/moviereview.tsv`
//! (repo root, see `scripts/fetch_moviereview.sh`) or `$NPSVOR_MOVIEREVIEW`;
//! without it that criterion reports SKIP.

use std::ops::ControlFlow;
use std::path::PathBuf;
use std::time::Instant;

use npsvor::baselines::{extend_redsvm, solve_svr, train_redsvm, train_svc_ova};
use npsvor::bench::{
    ambiguity_probes, arc_point, arc_true_rank, bench_convergence, bench_epsilon,
    compare_predictors, generate_arc3, generate_synthetic, median, run_protocol, ArcSpec,
    SyntheticSpec,
};
use npsvor::data::SparseDataset;
use npsvor::dcd::{box_step, soft_thresh_step, BoxStepInput, SoftThreshStepInput};
use npsvor::eval::{evaluate, log2_range, tied_cells};
use npsvor::model::{
    dual_objective_dcd1, dual_objective_dcd2, train_rank_dcd1, train_rank_dcd2,
    train_rank_dcd2_observed, weight_from_duals, SolverConfig,
};
use npsvor::rng::SplitMix64;
use npsvor::testsupport::{dual_oracle, grid_min, random_dense_instance};
use npsvor::text::{build_vocab, corpus_to_dataset, TextOptions};
use npsvor::{Method, Predictor};

struct Suite {
    failures: Vec<String>,
}

impl Suite {
    fn report(&mut self, id: u32, ok: bool, detail: String) {
        let status = if ok { "PASS" } else { "FAIL" };
        println!("criterion {id:2}: {status} — {detail}");
        if !ok {
            self.failures.push(format!("criterion {id}: {detail}"));
        }
    }

    fn skip(&mut self, id: u32, detail: String) {
        println!("criterion {id:2}: SKIP — {detail}");
    }
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0f64, f64::max)
}

/// Criterion 1: closed-form one-variable steps match brute-force grid
/// search on 10,000 random inputs each, within 1e-3, in under 10 s.
fn criterion_1(suite: &mut Suite) {
    let start = Instant::now();
    let mut rng = SplitMix64::new(0xACCE_0001);
    let mut worst = 0.0f64;
    for _ in 0..10_000 {
        let a = 0.05 + 3.95 * rng.next_f64();
        let b = -4.0 + 8.0 * rng.next_f64();
        let upper = 0.05 + 2.95 * rng.next_f64();
        let alpha = match rng.below(4) {
            0 => 0.0,
            1 => upper,
            _ => rng.next_f64() * upper,
        };
        let input = BoxStepInput { a, b, alpha, upper };
        let step = box_step(input);
        let (oracle, _) = grid_min(
            |s| 0.5 * a * (s - alpha) * (s - alpha) + (b - 1.0) * s,
            0.0,
            upper,
            1e-4,
        );
        worst = worst.max((step.new_alpha - oracle).abs());

        let eps = 0.5 * rng.next_f64();
        let bound = 0.05 + 2.95 * rng.next_f64();
        let alpha = match rng.below(5) {
            0 => 0.0,
            1 => bound,
            2 => -bound,
            _ => bound * (2.0 * rng.next_f64() - 1.0),
        };
        let input = SoftThreshStepInput {
            a,
            b,
            alpha,
            eps,
            bound,
        };
        let step = soft_thresh_step(input);
        let (oracle, _) = grid_min(
            |s| 0.5 * a * (s - alpha) * (s - alpha) + b * s + eps * s.abs(),
            -bound,
            bound,
            1e-4,
        );
        worst = worst.max((step.new_alpha - oracle).abs());
    }
    let elapsed = start.elapsed().as_secs_f64();
    suite.report(
        1,
        worst < 1e-3 && elapsed < 10.0,
        format!("subproblem grid oracle: worst |Δα| {worst:.2e}, {elapsed:.1}s"),
    );
}

struct TinySolve {
    data: SparseDataset,
    rank: usize,
    cfg: SolverConfig,
    dcd1: npsvor::model::RankSolveDcd1,
    dcd2: npsvor::model::RankSolveDcd2,
}

/// Criteria 2-5 share the 50 tiny random instances.
fn criteria_2_to_5(suite: &mut Suite) {
    let start = Instant::now();
    let mut rng = SplitMix64::new(0xACCE_0002);
    let mut solves: Vec<TinySolve> = Vec::new();
    let mut worst_rel = 0.0f64;
    let mut oracle_worst = 0.0f64;

    for trial in 0..50 {
        let p = 2 + (trial % 3);
        let n = p.max(6 + (rng.below(25) as usize));
        let m = 2 + rng.below(4) as usize;
        let data = random_dense_instance(&mut rng, n, m, p);
        let rank = 1 + rng.below(p as u64) as usize;
        let cfg = SolverConfig {
            c1: 0.25 + 3.75 * rng.next_f64(),
            c2: 0.25 + 3.75 * rng.next_f64(),
            eps: 0.02 + 0.28 * rng.next_f64(),
            eps_stop: 1e-8,
            max_sweeps: 500_000,
            seed: rng.next_u64(),
            ..SolverConfig::default()
        };
        let dec = data.decompose(rank).unwrap();

        let s2_shrink = train_rank_dcd2(&data, rank, &cfg).unwrap();
        let s2_plain = train_rank_dcd2(
            &data,
            rank,
            &SolverConfig {
                shrinking: false,
                ..cfg
            },
        )
        .unwrap();
        let s1 = train_rank_dcd1(&data, rank, &cfg).unwrap();
        let oracle = dual_oracle(&data, &dec, &cfg, 1_000_000);

        let f_shrink = dual_objective_dcd2(&s2_shrink.state, &dec, cfg.eps);
        let f_plain = dual_objective_dcd2(&s2_plain.state, &dec, cfg.eps);
        let f_dcd1 = dual_objective_dcd1(&s1.state, cfg.eps);
        let denom = oracle.objective.abs().max(1e-9);
        for f in [f_shrink, f_plain, f_dcd1] {
            worst_rel = worst_rel.max(((f - oracle.objective) / denom).abs());
        }
        oracle_worst = oracle_worst.max(((f_shrink - f_plain) / denom).abs());

        solves.push(TinySolve {
            data,
            rank,
            cfg,
            dcd1: s1,
            dcd2: s2_shrink,
        });
    }
    let elapsed = start.elapsed().as_secs_f64();
    suite.report(
        2,
        worst_rel < 1e-5 && elapsed < 60.0,
        format!(
            "dual solver oracle equivalence over 50 instances: worst rel {worst_rel:.2e} \
             (shrink-vs-plain {oracle_worst:.2e}), {elapsed:.1}s"
        ),
    );

    // Criterion 3: complementarity of the split duals at convergence.
    let mut worst_product = 0.0f64;
    for s in &solves {
        for (ap, am) in s
            .dcd1
            .state
            .alpha_plus
            .iter()
            .zip(&s.dcd1.state.alpha_minus)
        {
            worst_product = worst_product.max(ap * am);
        }
    }
    suite.report(
        3,
        worst_product <= 1e-9,
        format!("complementarity: worst α⁺·α⁻ = {worst_product:.2e}"),
    );

    // Criterion 4: monotone dual descent per sweep, tiny suite plus a
    // 10^4-instance synthetic.
    let mut monotone = true;
    let mut worst_increase = 0.0f64;
    for s in solves.iter().take(10) {
        let mut objectives = Vec::new();
        train_rank_dcd2_observed(&s.data, s.rank, &s.cfg, |e| {
            objectives.push(e.objective);
            ControlFlow::Continue(())
        })
        .unwrap();
        for w in objectives.windows(2) {
            let inc = w[1] - w[0];
            if inc > 1e-12 {
                monotone = false;
                worst_increase = worst_increase.max(inc);
            }
        }
    }
    let synth = generate_synthetic(&SyntheticSpec {
        n: 10_000,
        m: 2_000,
        p: 4,
        avg_nnz: 20,
        noise: 0.3,
        seed: 0xACCE_0004,
    });
    let synth_cfg = SolverConfig {
        eps_stop: 1e-4,
        max_sweeps: 5_000,
        ..SolverConfig::default()
    };
    let mut synth_objectives = Vec::new();
    let synth_solve = train_rank_dcd2_observed(&synth, 2, &synth_cfg, |e| {
        synth_objectives.push(e.objective);
        ControlFlow::Continue(())
    })
    .unwrap();
    for w in synth_objectives.windows(2) {
        let inc = w[1] - w[0];
        if inc > 1e-12 {
            monotone = false;
            worst_increase = worst_increase.max(inc);
        }
    }
    suite.report(
        4,
        monotone,
        format!(
            "monotone dual descent over {} sweeps (worst increase {worst_increase:.2e})",
            synth_objectives.len()
        ),
    );

    // Criterion 5: maintained weights equal the dual expansion.
    let mut worst_drift = 0.0f64;
    for s in &solves {
        let dec = s.data.decompose(s.rank).unwrap();
        let recomputed = weight_from_duals(&s.data, &dec, &s.dcd2.state.alpha);
        worst_drift = worst_drift.max(max_abs_diff(&s.dcd2.state.w, &recomputed));
    }
    let dec = synth.decompose(2).unwrap();
    let recomputed = weight_from_duals(&synth, &dec, &synth_solve.state.alpha);
    worst_drift = worst_drift.max(max_abs_diff(&synth_solve.state.w, &recomputed));
    suite.report(
        5,
        worst_drift < 1e-6,
        format!("weight maintenance drift {worst_drift:.2e} (∞-norm)"),
    );
}

/// Criterion 6: merged-variable solver reaches relative difference 1e-3 at
/// least as fast as the direct extension on the large sparse synthetic,
/// median over 5 seeded runs, all under 5 minutes.
fn criterion_6(suite: &mut Suite) {
    let start = Instant::now();
    let cfg = SolverConfig {
        c1: 1.0,
        c2: 1.0,
        eps: 0.1,
        max_sweeps: 20_000,
        ..SolverConfig::default()
    };
    let mut t1 = Vec::new();
    let mut t2 = Vec::new();
    let mut all_reached = true;
    for run in 0..5 {
        let data = generate_synthetic(&SyntheticSpec {
            n: 50_000,
            m: 10_000,
            p: 5,
            avg_nnz: 30,
            noise: 0.3,
            seed: 0xACCE_0006 + run,
        });
        let pair = bench_convergence(&data, 3, &cfg, 1e-3).unwrap();
        match (pair.dcd1.time_to_reach(1e-3), pair.dcd2.time_to_reach(1e-3)) {
            (Some(a), Some(b)) => {
                t1.push(a);
                t2.push(b);
            }
            _ => all_reached = false,
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    let (m1, m2) = if all_reached {
        (median(&t1), median(&t2))
    } else {
        (f64::NAN, f64::NAN)
    };
    suite.report(
        6,
        all_reached && m2 <= m1 && elapsed < 300.0,
        format!(
            "time to rel-diff 1e-3 (median of 5): merged {m2:.3}s vs direct {m1:.3}s, \
             total {elapsed:.0}s"
        ),
    );
}

/// Criterion 7: support vectors shrink monotonically with ε and ε = 0.5
/// trains no slower than 1.05× the ε = 0 run, on the large synthetic.
fn criterion_7(suite: &mut Suite) {
    let data = generate_synthetic(&SyntheticSpec {
        n: 50_000,
        m: 10_000,
        p: 5,
        avg_nnz: 30,
        noise: 0.3,
        seed: 0xACCE_0007,
    });
    let (train_d, test_d) = data.stratified_split(0.3, 1).unwrap();
    // Tighter tolerance lengthens each timed solve past the kernel's CPU
    // accounting granularity; best-of-3 suppresses contention noise.
    let cfg = SolverConfig {
        eps_stop: 0.02,
        ..SolverConfig::default()
    };
    let grid = [0.0, 0.1, 0.2, 0.3, 0.4, 0.5];
    let mut rows = bench_epsilon(&train_d, &test_d, &grid, &cfg).unwrap();
    let mut best: Vec<f64> = rows.iter().map(|r| r.seconds).collect();
    for _ in 0..2 {
        rows = bench_epsilon(&train_d, &test_d, &grid, &cfg).unwrap();
        for (b, r) in best.iter_mut().zip(&rows) {
            *b = b.min(r.seconds);
        }
    }
    let nsv_monotone = rows
        .windows(2)
        .all(|w| w[1].support_vectors <= w[0].support_vectors);
    let last = rows.last().unwrap();
    let time_ratio = best[grid.len() - 1] / best[0].max(f64::MIN_POSITIVE);
    suite.report(
        7,
        nsv_monotone && time_ratio <= 1.05,
        format!(
            "ε-sparsity: nSV {} -> {} (monotone: {nsv_monotone}), best-of-3 time ratio \
             at ε=0.5: {time_ratio:.3}",
            rows[0].support_vectors, last.support_vectors
        ),
    );
}

/// Criterion 8: on the arc geometry the minimal-distance rule misranks both
/// ambiguity probes while the ordered decomposition ranks them correctly,
/// and over 20 seeded draws the new predictor's median MAE is no worse.
fn criterion_8(suite: &mut Suite) {
    let spec = ArcSpec::default();
    let data = generate_arc3(&spec);
    let cfg = SolverConfig {
        eps_stop: 1e-6,
        max_sweeps: 20_000,
        ..SolverConfig::default()
    };
    let (model, _) = npsvor::model::train(&data, &cfg).unwrap();
    let probes_ok = match ambiguity_probes(&model, 5.0) {
        Some((p1, p2)) => {
            let x1 = arc_point(p1.0, p1.1);
            let x2 = arc_point(p2.0, p2.1);
            arc_true_rank(&spec, p1.0, p1.1) == 1
                && arc_true_rank(&spec, p2.0, p2.1) == 3
                && model.predict_old(&x1) != 1
                && model.predict_old(&x2) != 3
                && model.predict_new(&x1) == 1
                && model.predict_new(&x2) == 3
        }
        None => false,
    };

    // Harder draws (wider clusters) so test errors exist to compare.
    let mut old_maes = Vec::new();
    let mut new_maes = Vec::new();
    for i in 0..20u64 {
        let train_spec = ArcSpec {
            spread: 0.6,
            seed: 100 + 2 * i,
            ..spec
        };
        let test_spec = ArcSpec {
            spread: 0.6,
            seed: 101 + 2 * i,
            ..spec
        };
        let (m, _) = npsvor::model::train(&generate_arc3(&train_spec), &cfg).unwrap();
        let cmp = compare_predictors(&m, &generate_arc3(&test_spec)).unwrap();
        old_maes.push(cmp.old.mae);
        new_maes.push(cmp.new.mae);
    }
    let med_old = median(&old_maes);
    let med_new = median(&new_maes);
    suite.report(
        8,
        probes_ok && med_new <= med_old,
        format!(
            "predictor geometry: probes fixed by ordered decomposition: {probes_ok}; \
             median MAE new {med_new:.4} vs old {med_old:.4} over 20 draws"
        ),
    );
}

fn moviereview_path() -> Option<PathBuf> {
    if let Ok(p) = std::env::var("NPSVOR_MOVIEREVIEW") {
        let p = PathBuf::from(p);
        if p.exists() {
            return Some(p);
        }
    }
    // Repo root relative to this crate.
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/moviereview.tsv");
    if p.exists() {
        Some(p)
    } else {
        None
    }
}

/// Criterion 9: the full text pipeline on the movie-review corpus lands on
/// the published error levels: MAE 0.424 ± 0.05, MSE 0.452 ± 0.07.
fn criterion_9(suite: &mut Suite) {
    let Some(path) = moviereview_path() else {
        suite.skip(
            9,
            "movie-review corpus not present (run scripts/fetch_moviereview.sh, \
             or point NPSVOR_MOVIEREVIEW at the tsv); pipeline exercised by the \
             other criteria and the CLI tests"
                .to_string(),
        );
        return;
    };
    let start = Instant::now();
    let text = std::fs::read_to_string(&path).unwrap();
    let mut labels = Vec::new();
    let mut docs = Vec::new();
    for line in text.lines() {
        if let Some((l, d)) = line.split_once('\t') {
            labels.push(l.trim().parse::<i64>().unwrap());
            docs.push(d.to_string());
        }
    }
    let vocab = build_vocab(&docs, &TextOptions::default()).unwrap();
    let data = corpus_to_dataset(&labels, &docs, &vocab)
        .unwrap()
        .augment_bias(1.0)
        .unwrap();
    let (train_d, test_d) = data.stratified_split(0.3, 1).unwrap();
    let cells = tied_cells(&log2_range(-5, 1, 5));
    let cfg = SolverConfig::default();
    let run = run_protocol(
        &train_d,
        &test_d,
        Method::NpsvorDcd2,
        Predictor::New,
        &cells,
        &cfg,
        5,
        1,
    )
    .unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    let mae_ok = (run.test.mae - 0.424).abs() <= 0.05;
    let mse_ok = (run.test.mse - 0.452).abs() <= 0.07;
    suite.report(
        9,
        mae_ok && mse_ok && elapsed < 900.0,
        format!(
            "movie-review pipeline: n={}, best C={}, test MAE {:.3} (target 0.424±0.05), \
             MSE {:.3} (target 0.452±0.07), {elapsed:.0}s",
            data.n(),
            run.best_c1,
            run.test.mae,
            run.test.mse
        ),
    );
}

/// Criterion 10: metric sanity on 1,000 random label pairs.
fn criterion_10(suite: &mut Suite) {
    let mut rng = SplitMix64::new(0xACCE_000A);
    let mut ok = true;
    for _ in 0..1_000 {
        let p = 2 + rng.below(6) as usize;
        let n = 1 + rng.below(40) as usize;
        let truth: Vec<usize> = (0..n).map(|_| 1 + rng.below(p as u64) as usize).collect();
        let pred: Vec<usize> = (0..n).map(|_| 1 + rng.below(p as u64) as usize).collect();
        let r = evaluate(&truth, &pred, p).unwrap();
        ok &= r.mse + 1e-12 >= r.mae * r.mae;
        let mut idx: Vec<usize> = (0..n).collect();
        rng.shuffle(&mut idx);
        let truth_p: Vec<usize> = idx.iter().map(|&i| truth[i]).collect();
        let pred_p: Vec<usize> = idx.iter().map(|&i| pred[i]).collect();
        ok &= evaluate(&truth_p, &pred_p, p).unwrap() == r;
        // Range extremes.
        let worst = evaluate(&vec![1; n], &vec![p; n], p).unwrap();
        ok &= worst.mae == (p - 1) as f64 && worst.mse == ((p - 1) * (p - 1)) as f64;
        let perfect = evaluate(&truth, &truth, p).unwrap();
        ok &= perfect.mae == 0.0 && perfect.mse == 0.0 && perfect.accuracy == 1.0;
    }
    suite.report(10, ok, "metric sanity on 1,000 random label pairs".into());
}

/// Criterion 11: baseline sanity fixtures.
fn criterion_11(suite: &mut Suite) {
    // SVR: interior duals sit on the tube boundary.
    let rows: Vec<npsvor::SparseVector> = (0..20)
        .map(|i| {
            let x = i as f64 * 0.1;
            npsvor::SparseVector::from_dense(&[x, 1.0])
        })
        .collect();
    let targets: Vec<f64> = (0..20).map(|i| 1.0 + 0.13 * i as f64).collect();
    let cfg = SolverConfig {
        c1: 10.0,
        eps: 0.1,
        eps_stop: 1e-10,
        max_sweeps: 500_000,
        ..SolverConfig::default()
    };
    let (w, alpha, stats) = solve_svr(&rows, &targets, 2, &cfg);
    let mut svr_ok = stats.converged;
    let mut interior = 0;
    for (i, &a) in alpha.iter().enumerate() {
        if a.abs() > 1e-9 && a.abs() < cfg.c1 - 1e-9 {
            interior += 1;
            let residual = (rows[i].dot(&w) - targets[i]).abs();
            svr_ok &= residual <= cfg.eps + 1e-6;
        }
    }
    svr_ok &= interior > 0;

    // RedSVM: one shared direction; the split weights reproduce the
    // extended binary decisions exactly.
    let mut text = String::new();
    for i in 0..6 {
        let t = 0.05 * i as f64;
        text.push_str(&format!("1 1:{}\n", -2.0 - t));
        text.push_str(&format!("2 1:{}\n", t - 0.125));
        text.push_str(&format!("3 1:{}\n", 2.0 + t));
    }
    let tri = SparseDataset::read_libsvm(std::io::Cursor::new(text.as_bytes()), Some(1.0)).unwrap();
    let (red, red_stats) = train_redsvm(
        &tri,
        &SolverConfig {
            eps_stop: 1e-8,
            max_sweeps: 200_000,
            ..SolverConfig::default()
        },
    )
    .unwrap();
    let mut red_ok = red_stats.converged && red.thresholds().len() == tri.p() - 1;
    let ext = extend_redsvm(&tri);
    // Decision on each extended row equals w·x − θ_k by construction.
    let full = {
        let solve = npsvor::dcd::solve_binary_hinge(
            &ext.rows,
            &ext.signs,
            ext.m,
            1.0,
            1e-8,
            true,
            200_000,
            npsvor::rng::derive_seed(1, 0),
        );
        solve.w
    };
    for (j, row) in ext.rows.iter().enumerate() {
        let k = j % (tri.p() - 1);
        let direct = row.dot(&full);
        let base: f64 = row
            .entries()
            .iter()
            .filter(|&&(i, _)| i < tri.m())
            .map(|&(i, v)| full[i] * v)
            .sum();
        let split = base - full[tri.m() + k];
        red_ok &= (direct - split).abs() < 1e-12;
    }
    // Threshold ordering is observable on this fixture.
    red_ok &= red.thresholds_monotone();

    // One-vs-all on separable two-class data reaches training accuracy 1.
    let mut text = String::new();
    for i in 0..10 {
        text.push_str(&format!("1 1:{}\n", -1.0 - 0.1 * i as f64));
        text.push_str(&format!("2 1:{}\n", 1.0 + 0.1 * i as f64));
    }
    let bin = SparseDataset::read_libsvm(std::io::Cursor::new(text.as_bytes()), Some(1.0)).unwrap();
    let (ova, _) = train_svc_ova(&bin, &SolverConfig::default()).unwrap();
    let ova_ok = bin
        .rows()
        .iter()
        .zip(bin.labels())
        .all(|(x, &y)| ova.predict(x) == y);

    suite.report(
        11,
        svr_ok && red_ok && ova_ok,
        format!(
            "baseline sanity: svr tube residuals ({interior} interior duals): {svr_ok}, \
             redsvm parallel split: {red_ok}, ova separable accuracy 1.0: {ova_ok}"
        ),
    );
}

/// Criterion 12: identical flags and seed give byte-identical model and
/// prediction files through the real binary.
fn criterion_12(suite: &mut Suite) {
    let bin = env!("CARGO_BIN_EXE_npsvor");
    let dir = tempfile::tempdir().unwrap();
    let spec = SyntheticSpec {
        n: 400,
        m: 80,
        p: 4,
        avg_nnz: 10,
        noise: 0.3,
        seed: 0xACCE_000C,
    };
    generate_synthetic(&spec)
        .write_libsvm(dir.path().join("d.svm"))
        .unwrap();
    let run = |args: &[&str]| {
        let out = std::process::Command::new(bin)
            .args(args)
            .current_dir(dir.path())
            .output()
            .expect("binary runs");
        assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
    };
    for model in ["m1.txt", "m2.txt"] {
        run(&[
            "train",
            "-s",
            "npsvor-dcd2",
            "-c",
            "1",
            "-p",
            "0.1",
            "-t",
            "0.05",
            "-B",
            "1",
            "--seed",
            "33",
            "d.svm",
            model,
        ]);
    }
    let models_equal = std::fs::read(dir.path().join("m1.txt")).unwrap()
        == std::fs::read(dir.path().join("m2.txt")).unwrap();
    for preds in ["p1.txt", "p2.txt"] {
        run(&["predict", "m1.txt", "d.svm", preds]);
    }
    let preds_equal = std::fs::read(dir.path().join("p1.txt")).unwrap()
        == std::fs::read(dir.path().join("p2.txt")).unwrap();
    suite.report(
        12,
        models_equal && preds_equal,
        format!("byte-identical reruns: model {models_equal}, predictions {preds_equal}"),
    );
}

#[test]
fn acceptance() {
    let mut suite = Suite {
        failures: Vec::new(),
    };
    criterion_1(&mut suite);
    criteria_2_to_5(&mut suite);
    criterion_6(&mut suite);
    criterion_7(&mut suite);
    criterion_8(&mut suite);
    criterion_9(&mut suite);
    criterion_10(&mut suite);
    criterion_11(&mut suite);
    criterion_12(&mut suite);
    assert!(
        suite.failures.is_empty(),
        "acceptance failures:\n{}",
        suite.failures.join("\n")
    );
}

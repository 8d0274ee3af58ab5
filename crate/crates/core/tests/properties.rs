//! Property tests for the solver kernels, data handling and predictors.

use proptest::prelude::*;

use npsvor::data::SparseDataset;
use npsvor::dcd::{box_step, soft_thresh_step, BoxStepInput, SoftThreshStepInput};
use npsvor::eval::evaluate;
use npsvor::model::{OrdinalModel, Predictor};
use npsvor::SparseVector;

/// Grid minimizer kept independent of the closed forms it checks.
fn grid_min(f: impl Fn(f64) -> f64, lo: f64, hi: f64, step: f64) -> f64 {
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
    best_x
}

fn box_inputs() -> impl Strategy<Value = BoxStepInput> {
    (
        0.05f64..4.0,
        -4.0f64..4.0,
        0.05f64..3.0,
        0.0f64..1.0,
        0u8..4,
    )
        .prop_map(|(a, b, upper, frac, pin)| {
            let alpha = match pin {
                0 => 0.0,
                1 => upper,
                _ => frac * upper,
            };
            BoxStepInput { a, b, alpha, upper }
        })
}

fn soft_inputs() -> impl Strategy<Value = SoftThreshStepInput> {
    (
        0.05f64..4.0,
        -4.0f64..4.0,
        0.0f64..0.5,
        0.05f64..3.0,
        -1.0f64..1.0,
        0u8..5,
    )
        .prop_map(|(a, b, eps, bound, frac, pin)| {
            let alpha = match pin {
                0 => 0.0,
                1 => bound,
                2 => -bound,
                _ => frac * bound,
            };
            SoftThreshStepInput {
                a,
                b,
                alpha,
                eps,
                bound,
            }
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn box_step_matches_grid_oracle(input in box_inputs()) {
        let r = box_step(input);
        let h = |s: f64| 0.5 * input.a * (s - input.alpha).powi(2) + (input.b - 1.0) * s;
        let oracle = grid_min(h, 0.0, input.upper, 1e-4);
        prop_assert!((r.new_alpha - oracle).abs() < 1e-3,
            "closed {} vs grid {oracle} for {input:?}", r.new_alpha);
        // Exact minimization never increases the one-variable objective.
        prop_assert!(h(r.new_alpha) <= h(input.alpha) + 1e-12);
        // Zero violation exactly when the coordinate does not move.
        prop_assert_eq!(r.violation == 0.0, (r.new_alpha - input.alpha).abs() <= 1e-12);
    }

    #[test]
    fn soft_step_matches_grid_oracle(input in soft_inputs()) {
        let r = soft_thresh_step(input);
        let g = |s: f64| {
            0.5 * input.a * (s - input.alpha).powi(2) + input.b * s + input.eps * s.abs()
        };
        let oracle = grid_min(g, -input.bound, input.bound, 1e-4);
        prop_assert!((r.new_alpha - oracle).abs() < 1e-3,
            "closed {} vs grid {oracle} for {input:?}", r.new_alpha);
        prop_assert!(g(r.new_alpha) <= g(input.alpha) + 1e-12);
        prop_assert_eq!(r.violation == 0.0, (r.new_alpha - input.alpha).abs() <= 1e-12);
    }
}

fn tiny_dataset() -> impl Strategy<Value = SparseDataset> {
    // 2..=4 ranks, 2..=6 instances per rank, up to 4 features.
    (2usize..=4, 2usize..=6, 1usize..=4, any::<u64>()).prop_map(|(p, per_rank, m, seed)| {
        let mut rng = npsvor::rng::SplitMix64::new(seed);
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        for rank in 1..=p {
            for _ in 0..per_rank {
                let vals: Vec<f64> = (0..m)
                    .map(|_| (rng.next_f64() * 4.0 - 2.0) * f64::from(rng.below(3) != 0))
                    .collect();
                rows.push(SparseVector::from_dense(&vals));
                labels.push(rank);
            }
        }
        SparseDataset::from_parts(rows, labels, p, m).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn libsvm_roundtrip_identity(data in tiny_dataset()) {
        let tmp = tempfile::NamedTempFile::new().unwrap();
        data.write_libsvm(tmp.path()).unwrap();
        let back = SparseDataset::load_libsvm(tmp.path(), None).unwrap();
        prop_assert_eq!(data.n(), back.n());
        prop_assert_eq!(data.labels(), back.labels());
        prop_assert_eq!(data.label_map(), back.label_map());
        // The reloaded feature count shrinks to the observed maximum when
        // trailing features are all zero; rows must agree exactly.
        for (a, b) in data.rows().iter().zip(back.rows()) {
            prop_assert_eq!(a.entries(), b.entries());
        }
        // A loaded dataset written back and reloaded is fully identical,
        // feature count included.
        let tmp2 = tempfile::NamedTempFile::new().unwrap();
        back.write_libsvm(tmp2.path()).unwrap();
        let back2 = SparseDataset::load_libsvm(tmp2.path(), None).unwrap();
        prop_assert_eq!(back.m(), back2.m());
        prop_assert_eq!(back.n(), back2.n());
        prop_assert_eq!(back.labels(), back2.labels());
        for (a, b) in back.rows().iter().zip(back2.rows()) {
            prop_assert_eq!(a.entries(), b.entries());
        }
    }

    #[test]
    fn decompose_recovers_labels(data in tiny_dataset()) {
        for k in 1..=data.p() {
            let dec = data.decompose(k).unwrap();
            prop_assert_eq!(dec.left.len() + dec.middle.len() + dec.right.len(), data.n());
            for i in 0..data.n() {
                let expected = if data.labels()[i] > k { 1.0 } else { -1.0 };
                prop_assert_eq!(dec.signed[i], expected);
            }
        }
        for i in 0..data.n() {
            let above = (1..=data.p())
                .filter(|&k| data.decompose(k).unwrap().right.contains(&i))
                .count();
            prop_assert_eq!(data.labels()[i], above + 1);
        }
    }

    #[test]
    fn stratified_split_counts_and_partition(
        data in tiny_dataset(),
        fraction in 0.2f64..0.8,
        seed in any::<u64>(),
    ) {
        let (train, test) = data.stratified_split(fraction, seed).unwrap();
        prop_assert_eq!(train.n() + test.n(), data.n());
        let counts = data.rank_counts();
        let test_counts = test.rank_counts();
        for rank in 1..=data.p() {
            let want = (counts[rank - 1] as f64 * fraction).round();
            prop_assert!((test_counts[rank - 1] as f64 - want).abs() <= 1.0,
                "rank {rank}: {} vs round {want}", test_counts[rank - 1]);
        }
    }

    #[test]
    fn squared_norm_cache_consistent(data in tiny_dataset()) {
        let aug = data.augment_bias(1.0).unwrap();
        for row in aug.rows() {
            let err = (row.squared_norm() - row.recompute_squared_norm()).abs();
            prop_assert!(err <= 1e-12 * row.squared_norm().max(1.0));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    /// Parallel hyperplanes with strictly decreasing bias offsets: the
    /// ordered-decomposition rank is monotone in the shared direction.
    #[test]
    fn predict_new_monotone_for_parallel_hyperplanes(
        scales in proptest::collection::vec(0.1f64..3.0, 3..=5),
        offsets_raw in proptest::collection::vec(0.1f64..2.0, 3..=5),
        x1 in -5.0f64..5.0,
        x2 in -5.0f64..5.0,
    ) {
        let p = scales.len().min(offsets_raw.len());
        let scales = &scales[..p];
        // Strictly decreasing offsets.
        let mut offset = 5.0;
        let mut weights = Vec::with_capacity(p);
        for k in 0..p {
            offset -= offsets_raw[k];
            weights.push(vec![scales[k], offset]);
        }
        let model = OrdinalModel::from_weights(
            weights,
            2,
            Some(1.0),
            (1..=p as i64).collect(),
            Predictor::New,
        )
        .unwrap();
        let (lo, hi) = if x1 <= x2 { (x1, x2) } else { (x2, x1) };
        let r_lo = model.predict_new(&SparseVector::from_dense(&[lo, 1.0]));
        let r_hi = model.predict_new(&SparseVector::from_dense(&[hi, 1.0]));
        prop_assert!(r_lo <= r_hi, "rank decreased: {r_lo} -> {r_hi} for x {lo} -> {hi}");
    }

    #[test]
    fn evaluate_sanity(
        pairs in proptest::collection::vec((1usize..=5, 1usize..=5), 1..60),
        seed in any::<u64>(),
    ) {
        let truth: Vec<usize> = pairs.iter().map(|&(a, _)| a).collect();
        let pred: Vec<usize> = pairs.iter().map(|&(_, b)| b).collect();
        let r = evaluate(&truth, &pred, 5).unwrap();
        // Jensen: mean of squares dominates square of mean.
        prop_assert!(r.mse + 1e-12 >= r.mae * r.mae);
        // Permutation invariance.
        let mut idx: Vec<usize> = (0..truth.len()).collect();
        npsvor::rng::SplitMix64::new(seed).shuffle(&mut idx);
        let truth_p: Vec<usize> = idx.iter().map(|&i| truth[i]).collect();
        let pred_p: Vec<usize> = idx.iter().map(|&i| pred[i]).collect();
        let rp = evaluate(&truth_p, &pred_p, 5).unwrap();
        prop_assert_eq!(r, rp);
    }
}

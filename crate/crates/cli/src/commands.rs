//! Subcommand implementations.

use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use npsvor::bench::{
    ambiguity_probes, arc_point, arc_true_rank, bench_convergence, bench_epsilon, bench_predictors,
    compare_predictors, generate_arc3, generate_synthetic, median, record_line, run_protocol,
    ArcSpec, ConvergenceTrace, SyntheticSpec,
};
use npsvor::data::read_libsvm_rows;
use npsvor::eval::{cross_validate, evaluate, grid_cells_2d, grid_search, tied_cells};
use npsvor::method::fit;
use npsvor::model_io::{load_model, save_model};
use npsvor::text::{build_vocab, corpus_to_dataset, TextOptions, Vocabulary};
use npsvor::{AnyModel, Method, Predictor, SolverConfig, SparseDataset, SparseVector};

use crate::settings::{echo, init_jobs, parse_log2_grid, resolve, Settings};
use crate::table;
use crate::{BenchCommand, CliError, Command, CvOpts, FeaturizeOpts, PredictOpts, TrainOpts};

pub fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::Featurize(opts) => featurize(opts),
        Command::Train(opts) => train_cmd(opts),
        Command::Predict(opts) => predict_cmd(opts),
        Command::Cv(opts) => cv_cmd(opts),
        Command::Bench { command } => bench_cmd(command),
    }
}

fn read_corpus(path: &Path) -> Result<(Vec<i64>, Vec<String>), CliError> {
    let text = std::fs::read_to_string(path)?;
    let mut labels = Vec::new();
    let mut docs = Vec::new();
    for (no, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let (label_s, doc) = line.split_once('\t').ok_or_else(|| {
            CliError::Invalid(format!(
                "{}:{}: expected 'label<TAB>text'",
                path.display(),
                no + 1
            ))
        })?;
        let label: i64 = label_s.trim().parse().map_err(|_| {
            CliError::Invalid(format!(
                "{}:{}: bad label '{label_s}'",
                path.display(),
                no + 1
            ))
        })?;
        labels.push(label);
        docs.push(doc.to_string());
    }
    if labels.is_empty() {
        return Err(CliError::Invalid(format!(
            "{}: empty corpus",
            path.display()
        )));
    }
    Ok((labels, docs))
}

fn featurize(opts: FeaturizeOpts) -> Result<(), CliError> {
    let (labels, docs) = read_corpus(&opts.input)?;
    let text_opts = TextOptions {
        stem: opts.stem,
        remove_stopwords: !opts.no_stopwords,
        min_count: opts.min_count,
        max_df_ratio: opts.max_df,
        min_token_len: opts.min_token_len,
        ngram_max: opts.ngram_max,
    };
    let (vocab, built) = match &opts.vocab_in {
        Some(path) => (Vocabulary::load(path)?, false),
        None => (build_vocab(&docs, &text_opts)?, true),
    };
    eprintln!(
        "npsvor: {} documents, vocabulary of {} terms over {} docs",
        docs.len(),
        vocab.len(),
        vocab.docs()
    );
    let data = corpus_to_dataset(&labels, &docs, &vocab)?;
    data.write_libsvm(&opts.output)?;
    if built {
        let vocab_path = opts
            .vocab_out
            .clone()
            .unwrap_or_else(|| append_ext(&opts.output, "vocab"));
        vocab.save(&vocab_path)?;
        eprintln!("npsvor: vocabulary written to {}", vocab_path.display());
    } else if opts.vocab_out.is_some() {
        eprintln!("npsvor: --vocab-out ignored with --vocab-in");
    }
    eprintln!(
        "npsvor: dataset written to {} (n={}, m={}, p={})",
        opts.output.display(),
        data.n(),
        data.m(),
        data.p()
    );
    Ok(())
}

fn append_ext(path: &Path, ext: &str) -> PathBuf {
    let mut s = path.as_os_str().to_os_string();
    s.push(".");
    s.push(ext);
    PathBuf::from(s)
}

fn load_dataset(path: &Path, settings: &Settings) -> Result<SparseDataset, CliError> {
    Ok(SparseDataset::load_libsvm(path, settings.bias)?)
}

fn train_cmd(opts: TrainOpts) -> Result<(), CliError> {
    let settings = resolve(&opts.solver)?;
    echo(&settings);
    init_jobs(settings.jobs);
    let data = load_dataset(&opts.data, &settings)?;
    eprintln!(
        "npsvor: training on {} instances, {} features, {} ranks",
        data.n(),
        data.m(),
        data.p()
    );
    let (model, stats) = fit(settings.method, settings.predictor, &data, &settings.cfg)?;
    if !stats.converged {
        eprintln!(
            "npsvor: warning: stopping tolerance not reached within {} sweeps",
            settings.cfg.max_sweeps
        );
    }
    save_model(&model, &opts.model)?;
    eprintln!(
        "npsvor: model written to {} (sweeps={}, support vectors={})",
        opts.model.display(),
        stats.sweeps,
        stats.support_vectors
    );
    Ok(())
}

/// Drops features the model never saw and re-appends its bias column, so a
/// prediction row matches the training layout.
fn prepare_row(row: &SparseVector, model: &AnyModel) -> SparseVector {
    match model.bias() {
        None => row.clone(),
        Some(b) => {
            let bias_idx = model.m() - 1;
            let entries: Vec<(usize, f64)> = row
                .entries()
                .iter()
                .copied()
                .filter(|&(i, _)| i < bias_idx)
                .chain(std::iter::once((bias_idx, b)))
                .collect();
            SparseVector::new(entries).expect("ordered entries")
        }
    }
}

fn predict_cmd(opts: PredictOpts) -> Result<(), CliError> {
    let mut model = load_model(&opts.model)?;
    if let Some(name) = &opts.predictor {
        let predictor = match name.as_str() {
            "old" => Predictor::Old,
            "new" => Predictor::New,
            other => return Err(CliError::Usage(format!("unknown predictor '{other}'"))),
        };
        if let AnyModel::Ordinal { model: m, .. } = &mut model {
            m.set_predictor(predictor);
        } else {
            eprintln!("npsvor: note: -r only affects npsvor models");
        }
    }
    let (rows, raw_labels, _m) =
        read_libsvm_rows(std::io::BufReader::new(std::fs::File::open(&opts.data)?))?;

    let out = std::fs::File::create(&opts.output)?;
    let mut out = BufWriter::new(out);
    let mut ranks = Vec::with_capacity(rows.len());
    for row in &rows {
        let x = prepare_row(row, &model);
        let rank = model.predict(&x);
        ranks.push(rank);
        writeln!(out, "{}", model.label_map()[rank - 1])?;
    }
    out.flush()?;
    eprintln!(
        "npsvor: {} predictions written to {}",
        ranks.len(),
        opts.output.display()
    );

    // Metrics only when every test label exists in the model's label set.
    let truth: Option<Vec<usize>> = raw_labels
        .iter()
        .map(|l| model.label_map().iter().position(|x| x == l).map(|i| i + 1))
        .collect();
    match truth {
        Some(truth) if !truth.is_empty() => {
            let report = evaluate(&truth, &ranks, model.p())
                .map_err(|e| CliError::Invalid(e.to_string()))?;
            println!(
                "MAE {:.6}  MSE {:.6}  accuracy {:.4}  ({} instances)",
                report.mae,
                report.mse,
                report.accuracy,
                truth.len()
            );
            println!("{}", table::render_confusion(&report.confusion));
        }
        _ => eprintln!("npsvor: test labels not all in the model's label set; metrics skipped"),
    }
    Ok(())
}

fn cv_cmd(opts: CvOpts) -> Result<(), CliError> {
    let settings = resolve(&opts.solver)?;
    echo(&settings);
    init_jobs(settings.jobs);
    if opts.folds < 2 {
        return Err(CliError::Usage("need at least 2 folds".into()));
    }
    if opts.grid_c2.is_some() && opts.grid.is_none() {
        return Err(CliError::Usage(
            "--grid-c2 needs a C1 grid too (pass -g/--grid)".into(),
        ));
    }
    let data = load_dataset(&opts.data, &settings)?;
    let mut records: Vec<String> = Vec::new();

    match &opts.grid {
        None => {
            let summary = cross_validate(
                &data,
                settings.method,
                settings.predictor,
                &settings.cfg,
                opts.folds,
                settings.cfg.seed,
            )?;
            println!(
                "cv {}-fold: MAE {:.6} ± {:.6}, MSE {:.6} ± {:.6}",
                opts.folds, summary.mae_mean, summary.mae_std, summary.mse_mean, summary.mse_std
            );
            for (i, r) in summary.fold_reports.iter().enumerate() {
                records.push(record_line(
                    "fold",
                    &[
                        ("c1", settings.cfg.c1.to_string()),
                        ("c2", settings.cfg.c2.to_string()),
                        ("fold", i.to_string()),
                        ("mae", r.mae.to_string()),
                        ("mse", r.mse.to_string()),
                    ],
                ));
            }
        }
        Some(grid_spec) => {
            let c1_values = parse_log2_grid(grid_spec)?;
            let cells = match &opts.grid_c2 {
                None => tied_cells(&c1_values),
                Some(c2_spec) => grid_cells_2d(&c1_values, &parse_log2_grid(c2_spec)?),
            };
            let result = grid_search(
                &data,
                settings.method,
                settings.predictor,
                &cells,
                &settings.cfg,
                opts.folds,
                settings.cfg.seed,
            )?;
            let rows: Vec<Vec<String>> = result
                .cells
                .iter()
                .enumerate()
                .map(|(i, cell)| {
                    vec![
                        format!("{:.5}", cell.c1),
                        format!("{:.5}", cell.c2),
                        format!("{:.6} ± {:.6}", cell.cv.mae_mean, cell.cv.mae_std),
                        format!("{:.6} ± {:.6}", cell.cv.mse_mean, cell.cv.mse_std),
                        if i == result.best {
                            "*".into()
                        } else {
                            "".into()
                        },
                    ]
                })
                .collect();
            println!(
                "{}",
                table::render(&["C1", "C2", "MAE", "MSE", "best"], &rows)
            );
            let best = result.best_cell();
            println!(
                "best: C1={} C2={} MAE {:.6}",
                best.c1, best.c2, best.cv.mae_mean
            );
            for cell in &result.cells {
                records.push(record_line(
                    "cell",
                    &[
                        ("c1", cell.c1.to_string()),
                        ("c2", cell.c2.to_string()),
                        ("mae_mean", cell.cv.mae_mean.to_string()),
                        ("mae_std", cell.cv.mae_std.to_string()),
                        ("mse_mean", cell.cv.mse_mean.to_string()),
                        ("mse_std", cell.cv.mse_std.to_string()),
                    ],
                ));
                for (i, r) in cell.cv.fold_reports.iter().enumerate() {
                    records.push(record_line(
                        "fold",
                        &[
                            ("c1", cell.c1.to_string()),
                            ("c2", cell.c2.to_string()),
                            ("fold", i.to_string()),
                            ("mae", r.mae.to_string()),
                            ("mse", r.mse.to_string()),
                        ],
                    ));
                }
            }
        }
    }

    if let Some(path) = &opts.records {
        let mut out = BufWriter::new(std::fs::File::create(path)?);
        for line in &records {
            writeln!(out, "{line}")?;
        }
        out.flush()?;
        eprintln!("npsvor: records written to {}", path.display());
    }
    Ok(())
}

fn write_trace(path: &Path, trace: &ConvergenceTrace) -> Result<(), CliError> {
    let mut out = BufWriter::new(std::fs::File::create(path)?);
    for s in &trace.samples {
        writeln!(out, "{}\t{}", s.seconds, s.rel_diff)?;
    }
    out.flush()?;
    Ok(())
}

fn bench_cmd(command: BenchCommand) -> Result<(), CliError> {
    match command {
        BenchCommand::Synth {
            output,
            spec,
            n,
            m,
            p,
            avg_nnz,
            noise,
            seed,
        } => {
            let mut s = match spec {
                Some(path) => SyntheticSpec::parse(&std::fs::read_to_string(&path)?)
                    .map_err(CliError::Invalid)?,
                None => SyntheticSpec::default(),
            };
            if let Some(v) = n {
                s.n = v;
            }
            if let Some(v) = m {
                s.m = v;
            }
            if let Some(v) = p {
                s.p = v;
            }
            if let Some(v) = avg_nnz {
                s.avg_nnz = v;
            }
            if let Some(v) = noise {
                s.noise = v;
            }
            if let Some(v) = seed {
                s.seed = v;
            }
            let data = generate_synthetic(&s);
            data.write_libsvm(&output)?;
            eprintln!(
                "npsvor: synthetic dataset written to {} (n={}, m={}, p={}, nnz={})",
                output.display(),
                data.n(),
                data.m(),
                data.p(),
                data.nnz()
            );
            Ok(())
        }
        BenchCommand::Convergence {
            solver,
            rank,
            floor,
            out,
            data,
        } => {
            let settings = resolve(&solver)?;
            echo(&settings);
            let dataset = load_dataset(&data, &settings)?;
            let pair = bench_convergence(&dataset, rank, &settings.cfg, floor)?;
            if !pair.reference_converged {
                eprintln!("npsvor: warning: reference run hit the sweep cap; relative differences use the best value found");
            }
            println!(
                "{}",
                record_line(
                    "reference",
                    &[
                        ("rank", rank.to_string()),
                        ("objective", format!("{:.12e}", pair.reference_objective)),
                        ("converged", pair.reference_converged.to_string()),
                    ],
                )
            );
            for (name, trace) in [("dcd1", &pair.dcd1), ("dcd2", &pair.dcd2)] {
                for target in [1e-1, 1e-2, 1e-3] {
                    let reached = trace
                        .time_to_reach(target)
                        .map(|t| format!("{t:.4}"))
                        .unwrap_or_else(|| "-".into());
                    println!(
                        "{}",
                        record_line(
                            "convergence",
                            &[
                                ("solver", name.to_string()),
                                ("target", target.to_string()),
                                ("seconds", reached),
                            ],
                        )
                    );
                }
            }
            if let Some(prefix) = out {
                let p1 = append_suffix(&prefix, "-dcd1.tsv");
                let p2 = append_suffix(&prefix, "-dcd2.tsv");
                write_trace(&p1, &pair.dcd1)?;
                write_trace(&p2, &pair.dcd2)?;
                eprintln!(
                    "npsvor: traces written to {} and {}",
                    p1.display(),
                    p2.display()
                );
            }
            Ok(())
        }
        BenchCommand::Epsilon {
            solver,
            grid,
            test_fraction,
            data,
        } => {
            let settings = resolve(&solver)?;
            echo(&settings);
            init_jobs(settings.jobs);
            let dataset = load_dataset(&data, &settings)?;
            let eps_grid: Vec<f64> = grid
                .split(',')
                .map(|t| {
                    t.trim()
                        .parse::<f64>()
                        .map_err(|_| CliError::Usage(format!("bad epsilon '{t}'")))
                })
                .collect::<Result<_, _>>()?;
            let (train_d, test_d) = dataset.stratified_split(test_fraction, settings.cfg.seed)?;
            let rows = bench_epsilon(&train_d, &test_d, &eps_grid, &settings.cfg)?;
            let table_rows: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    vec![
                        format!("{:.2}", r.eps),
                        format!("{:.6}", r.mae),
                        format!("{:.6}", r.mse),
                        format!("{:.3}", r.seconds),
                        r.support_vectors.to_string(),
                        format!("{:.4}", r.mae_ratio),
                        format!("{:.4}", r.mse_ratio),
                        format!("{:.4}", r.time_ratio),
                        format!("{:.4}", r.nsv_ratio),
                    ]
                })
                .collect();
            println!(
                "{}",
                table::render(
                    &["eps", "MAE", "MSE", "sec", "nSV", "MAE/0", "MSE/0", "time/0", "nSV/0"],
                    &table_rows
                )
            );
            for r in &rows {
                println!(
                    "{}",
                    record_line(
                        "epsilon",
                        &[
                            ("eps", r.eps.to_string()),
                            ("mae", r.mae.to_string()),
                            ("mse", r.mse.to_string()),
                            ("seconds", r.seconds.to_string()),
                            ("nsv", r.support_vectors.to_string()),
                            ("mae_ratio", r.mae_ratio.to_string()),
                            ("mse_ratio", r.mse_ratio.to_string()),
                            ("time_ratio", r.time_ratio.to_string()),
                            ("nsv_ratio", r.nsv_ratio.to_string()),
                        ],
                    )
                );
            }
            Ok(())
        }
        BenchCommand::Predictors {
            solver,
            test_fraction,
            data,
        } => {
            let settings = resolve(&solver)?;
            echo(&settings);
            init_jobs(settings.jobs);
            let dataset = load_dataset(&data, &settings)?;
            let (train_d, test_d) = dataset.stratified_split(test_fraction, settings.cfg.seed)?;
            let cmp = bench_predictors(&train_d, &test_d, &settings.cfg)?;
            println!(
                "{}",
                table::render(
                    &["predictor", "MAE", "MSE", "accuracy"],
                    &[
                        vec![
                            "old".into(),
                            format!("{:.6}", cmp.old.mae),
                            format!("{:.6}", cmp.old.mse),
                            format!("{:.4}", cmp.old.accuracy),
                        ],
                        vec![
                            "new".into(),
                            format!("{:.6}", cmp.new.mae),
                            format!("{:.6}", cmp.new.mse),
                            format!("{:.4}", cmp.new.accuracy),
                        ],
                    ]
                )
            );
            Ok(())
        }
        BenchCommand::Methods {
            solver,
            methods,
            grid,
            folds,
            test_fraction,
            records,
            data,
        } => {
            let settings = resolve(&solver)?;
            echo(&settings);
            init_jobs(settings.jobs);
            let dataset = load_dataset(&data, &settings)?;
            let (train_d, test_d) = dataset.stratified_split(test_fraction, settings.cfg.seed)?;
            eprintln!("npsvor: split {} train / {} test", train_d.n(), test_d.n());
            let method_list: Vec<Method> = methods
                .split(',')
                .map(|t| {
                    Method::parse(t.trim())
                        .ok_or_else(|| CliError::Usage(format!("unknown method '{t}'")))
                })
                .collect::<Result<_, _>>()?;
            let cells = tied_cells(&parse_log2_grid(&grid)?);
            let mut record_lines = Vec::new();
            let mut rows = Vec::new();
            let mut runs = Vec::new();
            for method in method_list {
                let run = run_protocol(
                    &train_d,
                    &test_d,
                    method,
                    settings.predictor,
                    &cells,
                    &settings.cfg,
                    folds,
                    settings.cfg.seed,
                )?;
                rows.push(vec![
                    method.name().to_string(),
                    format!("{:.5}", run.best_c1),
                    format!("{:.6}", run.cv_mae),
                    format!("{:.6}", run.test.mae),
                    format!("{:.6}", run.test.mse),
                    format!("{:.4}", run.test.accuracy),
                    format!("{:.3}", run.train_seconds),
                ]);
                println!("confusion ({}):", method.name());
                println!("{}", table::render_confusion(&run.test.confusion));
                record_lines.push(record_line(
                    "method",
                    &[
                        ("method", method.name().to_string()),
                        ("best_c1", run.best_c1.to_string()),
                        ("best_c2", run.best_c2.to_string()),
                        ("cv_mae", run.cv_mae.to_string()),
                        ("test_mae", run.test.mae.to_string()),
                        ("test_mse", run.test.mse.to_string()),
                        ("accuracy", run.test.accuracy.to_string()),
                        ("train_seconds", run.train_seconds.to_string()),
                        ("support_vectors", run.stats.support_vectors.to_string()),
                    ],
                ));
                runs.push(run);
            }
            println!(
                "{}",
                table::render(
                    &["method", "best C", "cv MAE", "test MAE", "test MSE", "acc", "sec"],
                    &rows
                )
            );
            for (metric, values) in [
                ("mae", runs.iter().map(|r| r.test.mae).collect::<Vec<_>>()),
                ("mse", runs.iter().map(|r| r.test.mse).collect::<Vec<_>>()),
            ] {
                let ranks = competition_ranks(&values);
                let fields: Vec<(&str, String)> = runs
                    .iter()
                    .zip(&ranks)
                    .map(|(r, rank)| (r.method.name(), format!("{rank:.1}")))
                    .collect();
                println!("{}", record_line(&format!("ranking_{metric}"), &fields));
            }
            for line in &record_lines {
                println!("{line}");
            }
            if let Some(path) = &records {
                let mut out = BufWriter::new(std::fs::File::create(path)?);
                for line in &record_lines {
                    writeln!(out, "{line}")?;
                }
                out.flush()?;
                eprintln!("npsvor: records written to {}", path.display());
            }
            Ok(())
        }
        BenchCommand::Arc {
            solver,
            per_rank,
            spread,
            arch,
            draws,
        } => {
            let settings = resolve(&solver)?;
            echo(&settings);
            if draws == 0 {
                return Err(CliError::Usage("--draws must be at least 1".into()));
            }
            let base = ArcSpec {
                per_rank,
                spread,
                arch,
                seed: settings.cfg.seed,
            };
            // Probe demonstration on the first draw.
            let d = generate_arc3(&base);
            let cfg = SolverConfig {
                eps_stop: settings.cfg.eps_stop.min(1e-6),
                max_sweeps: settings.cfg.max_sweeps.max(20_000),
                ..settings.cfg
            };
            let (model, _) = npsvor::model::train(&d, &cfg)?;
            match ambiguity_probes(&model, 5.0) {
                Some((p1, p2)) => {
                    for (tag, (x, y)) in [("P1", p1), ("P2", p2)] {
                        let point = arc_point(x, y);
                        println!(
                            "{}",
                            record_line(
                                "probe",
                                &[
                                    ("point", tag.to_string()),
                                    ("x", format!("{x:.4}")),
                                    ("y", format!("{y:.4}")),
                                    ("true_rank", arc_true_rank(&base, x, y).to_string()),
                                    (
                                        "old",
                                        model.predict_with(Predictor::Old, &point).to_string()
                                    ),
                                    (
                                        "new",
                                        model.predict_with(Predictor::New, &point).to_string()
                                    ),
                                ],
                            )
                        );
                    }
                }
                None => eprintln!("npsvor: outer hyperplanes nearly vertical; no probes emitted"),
            }
            // Median MAE comparison over seeded draws.
            let mut old_maes = Vec::with_capacity(draws);
            let mut new_maes = Vec::with_capacity(draws);
            for i in 0..draws {
                let train_spec = ArcSpec {
                    seed: base.seed.wrapping_add(2 * i as u64 + 1),
                    ..base
                };
                let test_spec = ArcSpec {
                    seed: base.seed.wrapping_add(2 * i as u64 + 2),
                    ..base
                };
                let train_d = generate_arc3(&train_spec);
                let test_d = generate_arc3(&test_spec);
                let (m, _) = npsvor::model::train(&train_d, &cfg)?;
                let cmp = compare_predictors(&m, &test_d)?;
                old_maes.push(cmp.old.mae);
                new_maes.push(cmp.new.mae);
            }
            println!(
                "{}",
                record_line(
                    "arc_median_mae",
                    &[
                        ("draws", draws.to_string()),
                        ("old", format!("{:.6}", median(&old_maes))),
                        ("new", format!("{:.6}", median(&new_maes))),
                    ],
                )
            );
            Ok(())
        }
    }
}

fn append_suffix(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_os_string();
    s.push(suffix);
    PathBuf::from(s)
}

/// Mean rank per entry (1 = best); ties share the average of their span.
fn competition_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut pos = 0;
    while pos < order.len() {
        let mut end = pos + 1;
        while end < order.len() && values[order[end]] == values[order[pos]] {
            end += 1;
        }
        let mean_rank = (pos + 1 + end) as f64 / 2.0;
        for &idx in &order[pos..end] {
            ranks[idx] = mean_rank;
        }
        pos = end;
    }
    ranks
}

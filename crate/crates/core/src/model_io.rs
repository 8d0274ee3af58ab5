//! Text serialization of trained models.
//!
//! Grammar (UTF-8, one item per line):
//!
//! ```text
//! npsvor-model 1
//! solver <npsvor-dcd1|npsvor-dcd2|svc|svr|redsvm>
//! ranks <p>
//! features <m>
//! bias <value|none>
//! labels <l_1> ... <l_p>
//! predictor <old|new>
//! weights <rows>
//! <row of m space-separated values>        // p rows for npsvor/svc, 1 for svr/redsvm
//! thresholds <p-1 space-separated values>  // redsvm only
//! ```
//!
//! Weight values are printed with 17 significant digits, so a decimal
//! round-trip reproduces every f64 bit-for-bit.

use std::fmt::Write as _;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::baselines::{OvaModel, RedSvmModel, SvrModel};
use crate::method::AnyModel;
use crate::model::{Algorithm, OrdinalModel, Predictor};

#[derive(Debug, thiserror::Error)]
pub enum ModelIoError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("model file line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("model invalid: {0}")]
    Invalid(String),
}

/// 17 significant digits: enough for exact f64 round-trips.
fn fmt_weight(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn save_model<P: AsRef<Path>>(model: &AnyModel, path: P) -> Result<(), ModelIoError> {
    let file = std::fs::File::create(path)?;
    let mut out = BufWriter::new(file);
    write_model(model, &mut out)?;
    out.flush()?;
    Ok(())
}

pub fn write_model<W: Write>(model: &AnyModel, out: &mut W) -> Result<(), ModelIoError> {
    let (weights, thresholds): (Vec<&[f64]>, Option<&[f64]>) = match model {
        AnyModel::Ordinal { model, .. } => {
            (model.weights().iter().map(|w| w.as_slice()).collect(), None)
        }
        AnyModel::Ova(m) => (m.weights().iter().map(|w| w.as_slice()).collect(), None),
        AnyModel::Svr(m) => (vec![m.weights()], None),
        AnyModel::RedSvm(m) => (vec![m.weights()], Some(m.thresholds())),
    };
    for w in &weights {
        if !w.iter().all(|v| v.is_finite()) {
            return Err(ModelIoError::Invalid("non-finite weight".into()));
        }
    }
    let predictor = match model {
        AnyModel::Ordinal { model, .. } => model.predictor(),
        _ => Predictor::New,
    };

    writeln!(out, "npsvor-model 1")?;
    writeln!(out, "solver {}", model.method().name())?;
    writeln!(out, "ranks {}", model.p())?;
    writeln!(out, "features {}", model.m())?;
    match model.bias() {
        Some(b) => writeln!(out, "bias {}", fmt_weight(b))?,
        None => writeln!(out, "bias none")?,
    }
    let labels: Vec<String> = model.label_map().iter().map(|l| l.to_string()).collect();
    writeln!(out, "labels {}", labels.join(" "))?;
    writeln!(
        out,
        "predictor {}",
        match predictor {
            Predictor::Old => "old",
            Predictor::New => "new",
        }
    )?;
    writeln!(out, "weights {}", weights.len())?;
    let mut buf = String::new();
    for w in weights {
        buf.clear();
        for (i, v) in w.iter().enumerate() {
            if i > 0 {
                buf.push(' ');
            }
            write!(buf, "{}", fmt_weight(*v)).expect("write to string");
        }
        buf.push('\n');
        out.write_all(buf.as_bytes())?;
    }
    if let Some(thresholds) = thresholds {
        let vals: Vec<String> = thresholds.iter().map(|v| fmt_weight(*v)).collect();
        writeln!(out, "thresholds {}", vals.join(" "))?;
    }
    Ok(())
}

pub fn load_model<P: AsRef<Path>>(path: P) -> Result<AnyModel, ModelIoError> {
    let file = std::fs::File::open(path)?;
    read_model(BufReader::new(file))
}

struct LineReader<R> {
    inner: R,
    line_no: usize,
}

impl<R: BufRead> LineReader<R> {
    fn next(&mut self, expect: &str) -> Result<(usize, String), ModelIoError> {
        let mut buf = String::new();
        let n = self.inner.read_line(&mut buf)?;
        if n == 0 {
            return Err(ModelIoError::Parse {
                line: self.line_no + 1,
                msg: format!("missing {expect} line"),
            });
        }
        self.line_no += 1;
        Ok((self.line_no, buf.trim_end_matches(['\n', '\r']).to_string()))
    }

    fn field(&mut self, key: &str) -> Result<(usize, String), ModelIoError> {
        let (n, line) = self.next(key)?;
        let value = line
            .strip_prefix(key)
            .and_then(|rest| rest.strip_prefix(' '));
        match value {
            Some(v) => Ok((n, v.to_string())),
            None => Err(ModelIoError::Parse {
                line: n,
                msg: format!("expected '{key} ...', found '{line}'"),
            }),
        }
    }
}

fn parse_weight_row(line: &str, line_no: usize, m: usize) -> Result<Vec<f64>, ModelIoError> {
    let values: Result<Vec<f64>, _> = line.split_whitespace().map(str::parse::<f64>).collect();
    let values = values.map_err(|e| ModelIoError::Parse {
        line: line_no,
        msg: format!("bad weight value: {e}"),
    })?;
    if values.len() != m {
        return Err(ModelIoError::Parse {
            line: line_no,
            msg: format!("expected {m} weights, found {}", values.len()),
        });
    }
    Ok(values)
}

pub fn read_model<R: BufRead>(reader: R) -> Result<AnyModel, ModelIoError> {
    let mut lr = LineReader {
        inner: reader,
        line_no: 0,
    };
    let (n, magic) = lr.next("header")?;
    if magic != "npsvor-model 1" {
        return Err(ModelIoError::Parse {
            line: n,
            msg: "not a model file (expected 'npsvor-model 1')".into(),
        });
    }
    let (n, solver) = lr.field("solver")?;
    let method = crate::method::Method::parse(&solver).ok_or_else(|| ModelIoError::Parse {
        line: n,
        msg: format!("unknown solver '{solver}'"),
    })?;
    let (n, ranks) = lr.field("ranks")?;
    let p: usize = ranks.parse().map_err(|_| ModelIoError::Parse {
        line: n,
        msg: "bad rank count".into(),
    })?;
    let (n, features) = lr.field("features")?;
    let m: usize = features.parse().map_err(|_| ModelIoError::Parse {
        line: n,
        msg: "bad feature count".into(),
    })?;
    let (n, bias_s) = lr.field("bias")?;
    let bias: Option<f64> = if bias_s == "none" {
        None
    } else {
        Some(bias_s.parse().map_err(|_| ModelIoError::Parse {
            line: n,
            msg: "bad bias value".into(),
        })?)
    };
    let (n, labels_s) = lr.field("labels")?;
    let label_map: Vec<i64> = labels_s
        .split_whitespace()
        .map(|t| t.parse::<i64>())
        .collect::<Result<_, _>>()
        .map_err(|_| ModelIoError::Parse {
            line: n,
            msg: "bad label map".into(),
        })?;
    if label_map.len() != p {
        return Err(ModelIoError::Parse {
            line: n,
            msg: format!("label map has {} entries for p={p}", label_map.len()),
        });
    }
    let (n, predictor_s) = lr.field("predictor")?;
    let predictor = match predictor_s.as_str() {
        "old" => Predictor::Old,
        "new" => Predictor::New,
        other => {
            return Err(ModelIoError::Parse {
                line: n,
                msg: format!("unknown predictor '{other}'"),
            })
        }
    };
    let (n, weights_s) = lr.field("weights")?;
    let rows: usize = weights_s.parse().map_err(|_| ModelIoError::Parse {
        line: n,
        msg: "bad weight row count".into(),
    })?;
    let mut weights = Vec::with_capacity(rows);
    for _ in 0..rows {
        let (line_no, line) = lr.next("weight row")?;
        weights.push(parse_weight_row(&line, line_no, m)?);
    }

    use crate::method::Method;
    let invalid = |e: crate::model::SolverError| ModelIoError::Invalid(e.to_string());
    match method {
        Method::NpsvorDcd1 | Method::NpsvorDcd2 => {
            if weights.len() != p {
                return Err(ModelIoError::Invalid(format!(
                    "expected {p} weight rows, found {}",
                    weights.len()
                )));
            }
            let model = OrdinalModel::from_weights(weights, m, bias, label_map, predictor)
                .map_err(invalid)?;
            let algorithm = if method == Method::NpsvorDcd1 {
                Algorithm::Dcd1
            } else {
                Algorithm::Dcd2
            };
            Ok(AnyModel::Ordinal { model, algorithm })
        }
        Method::Svc => {
            if weights.len() != p {
                return Err(ModelIoError::Invalid(format!(
                    "expected {p} weight rows, found {}",
                    weights.len()
                )));
            }
            let model = OvaModel::from_weights(weights, m, bias, label_map).map_err(invalid)?;
            Ok(AnyModel::Ova(model))
        }
        Method::Svr => {
            if weights.len() != 1 {
                return Err(ModelIoError::Invalid("svr stores one weight row".into()));
            }
            let model = SvrModel::from_weights(weights.pop_single(), m, p, bias, label_map)
                .map_err(invalid)?;
            Ok(AnyModel::Svr(model))
        }
        Method::RedSvm => {
            if weights.len() != 1 {
                return Err(ModelIoError::Invalid("redsvm stores one weight row".into()));
            }
            let (n, thr_s) = lr.field("thresholds")?;
            let thresholds: Vec<f64> = thr_s
                .split_whitespace()
                .map(|t| t.parse::<f64>())
                .collect::<Result<_, _>>()
                .map_err(|_| ModelIoError::Parse {
                    line: n,
                    msg: "bad threshold value".into(),
                })?;
            let model =
                RedSvmModel::from_parts(weights.pop_single(), thresholds, m, bias, label_map)
                    .map_err(invalid)?;
            Ok(AnyModel::RedSvm(model))
        }
    }
}

trait PopSingle {
    fn pop_single(self) -> Vec<f64>;
}

impl PopSingle for Vec<Vec<f64>> {
    fn pop_single(mut self) -> Vec<f64> {
        debug_assert_eq!(self.len(), 1);
        self.pop().expect("length checked")
    }
}

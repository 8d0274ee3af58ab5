//! Uniform handle over the trainable methods so the cross-validation,
//! benchmark and CLI layers can treat them interchangeably.

use crate::baselines::{train_redsvm, train_svc_ova, train_svr, OvaModel, RedSvmModel, SvrModel};
use crate::data::{SparseDataset, SparseVector};
use crate::model::{train, Algorithm, OrdinalModel, Predictor, SolverConfig, SolverError};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    NpsvorDcd1,
    NpsvorDcd2,
    Svc,
    Svr,
    RedSvm,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::NpsvorDcd1,
        Method::NpsvorDcd2,
        Method::Svc,
        Method::Svr,
        Method::RedSvm,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Method::NpsvorDcd1 => "npsvor-dcd1",
            Method::NpsvorDcd2 => "npsvor-dcd2",
            Method::Svc => "svc",
            Method::Svr => "svr",
            Method::RedSvm => "redsvm",
        }
    }

    pub fn parse(s: &str) -> Option<Method> {
        match s {
            "npsvor-dcd1" => Some(Method::NpsvorDcd1),
            "npsvor-dcd2" | "npsvor" => Some(Method::NpsvorDcd2),
            "svc" | "svc-ova" => Some(Method::Svc),
            "svr" => Some(Method::Svr),
            "redsvm" => Some(Method::RedSvm),
            _ => None,
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// A trained model of any method.
#[derive(Clone, Debug, PartialEq)]
pub enum AnyModel {
    Ordinal {
        model: OrdinalModel,
        algorithm: Algorithm,
    },
    Ova(OvaModel),
    Svr(SvrModel),
    RedSvm(RedSvmModel),
}

impl AnyModel {
    pub fn method(&self) -> Method {
        match self {
            AnyModel::Ordinal { algorithm, .. } => match algorithm {
                Algorithm::Dcd1 => Method::NpsvorDcd1,
                Algorithm::Dcd2 => Method::NpsvorDcd2,
            },
            AnyModel::Ova(_) => Method::Svc,
            AnyModel::Svr(_) => Method::Svr,
            AnyModel::RedSvm(_) => Method::RedSvm,
        }
    }

    pub fn p(&self) -> usize {
        match self {
            AnyModel::Ordinal { model, .. } => model.p(),
            AnyModel::Ova(m) => m.p(),
            AnyModel::Svr(m) => m.p(),
            AnyModel::RedSvm(m) => m.p(),
        }
    }

    pub fn m(&self) -> usize {
        match self {
            AnyModel::Ordinal { model, .. } => model.m(),
            AnyModel::Ova(m) => m.m(),
            AnyModel::Svr(m) => m.m(),
            AnyModel::RedSvm(m) => m.m(),
        }
    }

    pub fn bias(&self) -> Option<f64> {
        match self {
            AnyModel::Ordinal { model, .. } => model.bias(),
            AnyModel::Ova(m) => m.bias(),
            AnyModel::Svr(m) => m.bias(),
            AnyModel::RedSvm(m) => m.bias(),
        }
    }

    pub fn label_map(&self) -> &[i64] {
        match self {
            AnyModel::Ordinal { model, .. } => model.label_map(),
            AnyModel::Ova(m) => m.label_map(),
            AnyModel::Svr(m) => m.label_map(),
            AnyModel::RedSvm(m) => m.label_map(),
        }
    }

    /// Rank in `1..=p` (ordinal models use their stored default predictor).
    pub fn predict(&self, x: &SparseVector) -> usize {
        match self {
            AnyModel::Ordinal { model, .. } => model.predict(x),
            AnyModel::Ova(m) => m.predict(x),
            AnyModel::Svr(m) => m.predict(x),
            AnyModel::RedSvm(m) => m.predict(x),
        }
    }

    pub fn predict_original(&self, x: &SparseVector) -> i64 {
        self.label_map()[self.predict(x) - 1]
    }
}

/// Aggregate statistics of a fit, comparable across methods.
#[derive(Clone, Copy, Debug)]
pub struct FitStats {
    pub sweeps: usize,
    pub converged: bool,
    pub support_vectors: usize,
}

/// Trains `method` on `data`. `predictor` selects the rank rule stored in
/// ordinal models and is ignored by the baselines.
pub fn fit(
    method: Method,
    predictor: Predictor,
    data: &SparseDataset,
    cfg: &SolverConfig,
) -> Result<(AnyModel, FitStats), SolverError> {
    match method {
        Method::NpsvorDcd1 | Method::NpsvorDcd2 => {
            let algorithm = if method == Method::NpsvorDcd1 {
                Algorithm::Dcd1
            } else {
                Algorithm::Dcd2
            };
            let cfg = SolverConfig { algorithm, ..*cfg };
            let (mut model, report) = train(data, &cfg)?;
            model.set_predictor(predictor);
            let stats = FitStats {
                sweeps: report.per_rank.iter().map(|r| r.sweeps).sum(),
                converged: report.all_converged(),
                support_vectors: report.total_support_vectors(),
            };
            Ok((AnyModel::Ordinal { model, algorithm }, stats))
        }
        Method::Svc => {
            let (model, report) = train_svc_ova(data, cfg)?;
            let stats = FitStats {
                sweeps: report.per_rank.iter().map(|r| r.sweeps).sum(),
                converged: report.all_converged(),
                support_vectors: report.total_support_vectors(),
            };
            Ok((AnyModel::Ova(model), stats))
        }
        Method::Svr => {
            let (model, s) = train_svr(data, cfg)?;
            Ok((
                AnyModel::Svr(model),
                FitStats {
                    sweeps: s.sweeps,
                    converged: s.converged,
                    support_vectors: s.support_vectors,
                },
            ))
        }
        Method::RedSvm => {
            let (model, s) = train_redsvm(data, cfg)?;
            Ok((
                AnyModel::RedSvm(model),
                FitStats {
                    sweeps: s.sweeps,
                    converged: s.converged,
                    support_vectors: s.support_vectors,
                },
            ))
        }
    }
}

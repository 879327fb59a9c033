use std::fmt;
use std::str::FromStr;

use crate::model::Model;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ModelKind {
    Lstm,
    ApBilstm,
    Qrnn,
    Ctrn,
}

impl ModelKind {
    pub const ALL: [ModelKind; 4] = [ModelKind::Lstm, ModelKind::ApBilstm, ModelKind::Qrnn, ModelKind::Ctrn];

    /// Display name as used in comparison tables.
    pub fn label(self) -> &'static str {
        match self {
            ModelKind::Lstm => "LSTM",
            ModelKind::ApBilstm => "AP-BiLSTM",
            ModelKind::Qrnn => "QRNN",
            ModelKind::Ctrn => "CTRN",
        }
    }

    /// Symbolic parameter count. The trailing terms compose `q` and `a`.
    pub fn formula(self) -> &'static str {
        match self {
            ModelKind::Lstm => "4(md + d^2) + 2dh + h",
            ModelKind::ApBilstm => "4(md + d^2) + 4d^2",
            ModelKind::Qrnn | ModelKind::Ctrn => "3kdm + 2dh + h",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelKind::Lstm => "lstm",
            ModelKind::ApBilstm => "ap-bilstm",
            ModelKind::Qrnn => "qrnn",
            ModelKind::Ctrn => "ctrn",
        })
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "lstm" => Ok(ModelKind::Lstm),
            "ap-bilstm" | "apbilstm" | "ap_bilstm" => Ok(ModelKind::ApBilstm),
            "qrnn" => Ok(ModelKind::Qrnn),
            "ctrn" => Ok(ModelKind::Ctrn),
            other => Err(Error::config("kind", format!("unknown model kind `{other}`"))),
        }
    }
}

/// Input width `m`, filters/hidden state `d`, dense width `h`, filter width `k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Dims {
    pub m: u64,
    pub d: u64,
    pub h: u64,
    pub k: u64,
}

impl Default for Dims {
    /// The dimensions of the published comparison.
    fn default() -> Self {
        Dims {
            m: 300,
            d: 512,
            h: 128,
            k: 2,
        }
    }
}

/// Exact parameter count of one model kind; embeddings and biases outside
/// the composing layer are not counted.
pub fn param_count(kind: ModelKind, dims: Dims) -> Result<u64> {
    let Dims { m, d, h, k } = dims;
    for (key, v) in [("m", m), ("d", d), ("h", h), ("k", k)] {
        if v == 0 {
            return Err(Error::config(key, "must be positive"));
        }
    }
    Ok(match kind {
        ModelKind::Lstm => 4 * (m * d + d * d) + 2 * d * h + h,
        ModelKind::ApBilstm => 4 * (m * d + d * d) + 4 * d * d,
        ModelKind::Qrnn | ModelKind::Ctrn => 3 * k * d * m + 2 * d * h + h,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParamBudget {
    pub kind: ModelKind,
    pub formula: &'static str,
    pub count: u64,
}

pub fn budget(kind: ModelKind, dims: Dims) -> Result<ParamBudget> {
    Ok(ParamBudget {
        kind,
        formula: kind.formula(),
        count: param_count(kind, dims)?,
    })
}

/// Plain-text comparison table, one row per kind.
pub fn budget_table(kinds: &[ModelKind], dims: Dims) -> Result<String> {
    let mut out = format!(
        "{:<10} {:<24} {:>10} {:>8}\n",
        "Model", "Mem complexity", "Params", "Approx"
    );
    for &kind in kinds {
        let b = budget(kind, dims)?;
        out.push_str(&format!(
            "{:<10} {:<24} {:>10} {:>7.2}M\n",
            kind.label(),
            b.formula,
            b.count,
            b.count as f64 / 1e6
        ));
    }
    out.push_str(&format!(
        "(m={}, d={}, h={}, k={}; embeddings excluded)\n",
        dims.m, dims.d, dims.h, dims.k
    ));
    Ok(out)
}

/// Live count from a model's parameter registry: gate banks plus composing
/// dense layers.
pub fn registry_count(model: &Model) -> u64 {
    model.registry_count() as u64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn published_dims() {
        let dims = Dims::default();
        assert_eq!(param_count(ModelKind::Qrnn, dims).unwrap(), 1_052_800);
        assert_eq!(param_count(ModelKind::Ctrn, dims).unwrap(), 1_052_800);
        assert_eq!(param_count(ModelKind::Lstm, dims).unwrap(), 1_794_176);
    }

    #[test]
    fn unit_dims() {
        let one = Dims { m: 1, d: 1, h: 1, k: 1 };
        assert_eq!(param_count(ModelKind::Qrnn, one).unwrap(), 6);
    }

    #[test]
    fn unknown_kind() {
        assert!(matches!("gru".parse::<ModelKind>(), Err(Error::Config { .. })));
        for k in ModelKind::ALL {
            assert_eq!(k.to_string().parse::<ModelKind>().unwrap(), k);
        }
    }

    #[test]
    fn table_lists_every_kind() {
        let t = budget_table(&ModelKind::ALL, Dims::default()).unwrap();
        assert!(t.contains("1052800") && t.contains("1794176") && t.contains("AP-BiLSTM"));
    }
}

//! Input documents: field specifications in JSON, vector/signature flags.

use anyhow::{anyhow, bail, Context};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use ein_core::liealg::MobiusField;
use ein_core::parabolic::{field_to_affine, AffineConformalField};
use ein_core::Signature;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SigSpec {
    pub p: usize,
    pub q: usize,
}

impl SigSpec {
    pub fn signature(&self) -> anyhow::Result<Signature> {
        Ok(Signature::new(self.p, self.q)?)
    }
}

/// Affine data `(a, M, T)`: infinitesimal scale, skew part (row-major
/// `n x n`), translation part.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AffineData {
    pub a: f64,
    #[serde(rename = "M")]
    pub m: Vec<f64>,
    #[serde(rename = "T")]
    pub t: Vec<f64>,
}

/// Exactly one encoding of the field: a full ambient matrix (row-major
/// `(n+2) x (n+2)`) or affine data.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum FieldData {
    #[serde(rename = "matrix")]
    Matrix(Vec<f64>),
    #[serde(rename = "affine")]
    Affine(AffineData),
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecOptions {
    #[serde(default)]
    pub tol: Option<f64>,
    #[serde(default)]
    pub seed: Option<u64>,
}

/// A conformal field to classify or integrate, with its signature.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSpec {
    pub signature: SigSpec,
    pub field: FieldData,
    #[serde(default)]
    pub options: Option<SpecOptions>,
}

impl FieldSpec {
    pub fn signature(&self) -> anyhow::Result<Signature> {
        self.signature.signature()
    }

    pub fn tol(&self) -> Option<f64> {
        self.options.as_ref().and_then(|o| o.tol)
    }

    pub fn seed(&self) -> Option<u64> {
        self.options.as_ref().and_then(|o| o.seed)
    }

    /// The affine conformal field this document encodes.
    pub fn to_affine_field(&self) -> anyhow::Result<AffineConformalField> {
        let sig = self.signature()?;
        let n = sig.n();
        match &self.field {
            FieldData::Matrix(values) => {
                let m = n + 2;
                if values.len() != m * m {
                    bail!(
                        "field.matrix has {} entries, expected {} for signature ({}, {})",
                        values.len(),
                        m * m,
                        sig.p(),
                        sig.q()
                    );
                }
                let mat = DMatrix::from_row_slice(m, m, values);
                let x = MobiusField::new(sig, mat).context("field.matrix")?;
                Ok(field_to_affine(&x).context("field.matrix")?)
            }
            FieldData::Affine(data) => {
                if data.m.len() != n * n {
                    bail!("field.affine.M has {} entries, expected {}", data.m.len(), n * n);
                }
                if data.t.len() != n {
                    bail!("field.affine.T has {} entries, expected {}", data.t.len(), n);
                }
                let m = DMatrix::from_row_slice(n, n, &data.m);
                let t = DVector::from_row_slice(&data.t);
                Ok(AffineConformalField::new(sig, data.a, m, t).context("field.affine")?)
            }
        }
    }
}

/// Input for the `jordan` command: a row-major `n x n` matrix.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixSpec {
    pub matrix: Vec<f64>,
}

impl MatrixSpec {
    pub fn to_matrix(&self, sig: Signature) -> anyhow::Result<DMatrix<f64>> {
        let n = sig.n();
        if self.matrix.len() != n * n {
            bail!("matrix has {} entries, expected {}", self.matrix.len(), n * n);
        }
        Ok(DMatrix::from_row_slice(n, n, &self.matrix))
    }
}

/// One document or a batch of them.
pub fn parse_field_specs(text: &str) -> anyhow::Result<Vec<FieldSpec>> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| anyhow!("malformed JSON at {e}"))?;
    let specs = if value.is_array() {
        serde_json::from_value::<Vec<FieldSpec>>(value)
    } else {
        serde_json::from_value::<FieldSpec>(value).map(|s| vec![s])
    }
    .map_err(|e| anyhow!("invalid field specification: {e}"))?;
    if specs.is_empty() {
        bail!("empty batch");
    }
    Ok(specs)
}

/// Comma-separated reals, e.g. `--start 1,0,-2.5`.
pub fn parse_vector(text: &str, expected: usize) -> anyhow::Result<DVector<f64>> {
    let parts: Vec<f64> = text
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| anyhow!("bad real {p:?}: {e}")))
        .collect::<anyhow::Result<_>>()?;
    if parts.len() != expected {
        bail!("expected {expected} comma-separated reals, got {}", parts.len());
    }
    Ok(DVector::from_row_slice(&parts))
}

/// Signature flag `p,q`.
pub fn parse_signature(text: &str) -> anyhow::Result<Signature> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    if parts.len() != 2 {
        bail!("expected --sig p,q");
    }
    let p: usize = parts[0].parse().context("p")?;
    let q: usize = parts[1].parse().context("q")?;
    Ok(Signature::new(p, q)?)
}

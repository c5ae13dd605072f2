//! The stabilizer `P` of the basepoint as the affine conformal group of
//! `R^{p,q}`, plus the stability notions for diagonal sequences.
//!
//! An element of `P` acts in the affine chart as `x -> scale * A x + T`
//! with `scale > 0`, `A` in `O(p,q)` and `T` a translation; its matrix is
//! upper block triangular for the grading of [`crate::liealg`]. On the
//! algebra side, fields tangent to `P` are the affine conformal vector
//! fields `x -> (a I + M) x + T`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::forms::Signature;
use crate::liealg::{
    gen_diag, gen_nplus, grade_decompose, GradedParts, MobiusElement, MobiusField,
};
use crate::linalg::rel_scale;
use crate::model::EinPoint;

/// Relative tolerance for the `O(p,q)` membership of the orthogonal part.
pub const ORTHOGONAL_TOL: f64 = 1e-8;

/// Default threshold for "tends to infinity" verdicts on finite diagonal
/// sequences: the last entry must exceed `1 / epsilon`.
pub const STRONG_STABILITY_EPSILON: f64 = 1e-3;

/// Affine conformal transformation `x -> scale * A x + T` of `R^{p,q}`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineConformalMap {
    sig: Signature,
    scale: f64,
    orthogonal: DMatrix<f64>,
    translation: DVector<f64>,
}

impl AffineConformalMap {
    pub fn new(
        sig: Signature,
        scale: f64,
        orthogonal: DMatrix<f64>,
        translation: DVector<f64>,
    ) -> Result<Self> {
        let n = sig.n();
        if orthogonal.nrows() != n || orthogonal.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: orthogonal.nrows().max(orthogonal.ncols()),
            });
        }
        if translation.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: translation.len() });
        }
        if !(scale > 0.0) {
            return Err(Error::InvalidInput("affine conformal scale must be positive".into()));
        }
        let j = sig.j_mink();
        let residual = (orthogonal.transpose() * &j * &orthogonal - &j).norm();
        if residual > ORTHOGONAL_TOL * (1.0 + orthogonal.norm_squared()) {
            return Err(Error::NotInGroup { residual });
        }
        Ok(Self { sig, scale, orthogonal, translation })
    }

    pub fn signature(&self) -> Signature {
        self.sig
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn orthogonal(&self) -> &DMatrix<f64> {
        &self.orthogonal
    }

    pub fn translation(&self) -> &DVector<f64> {
        &self.translation
    }

    /// Full linear part `scale * A`.
    pub fn linear(&self) -> DMatrix<f64> {
        &self.orthogonal * self.scale
    }

    pub fn apply(&self, x: &DVector<f64>) -> DVector<f64> {
        self.linear() * x + &self.translation
    }

    /// Composition `self . other` as affine maps.
    pub fn compose(&self, other: &AffineConformalMap) -> Result<AffineConformalMap> {
        let translation = self.apply(&other.translation);
        AffineConformalMap::new(
            self.sig,
            self.scale * other.scale,
            &self.orthogonal * &other.orthogonal,
            translation,
        )
    }
}

/// Affine conformal vector field `x -> (a I + M) x + T` of `R^{p,q}`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineConformalField {
    sig: Signature,
    a: f64,
    m: DMatrix<f64>,
    translation: DVector<f64>,
}

impl AffineConformalField {
    pub fn new(sig: Signature, a: f64, m: DMatrix<f64>, translation: DVector<f64>) -> Result<Self> {
        let n = sig.n();
        if m.nrows() != n || m.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n, got: m.nrows().max(m.ncols()) });
        }
        if translation.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: translation.len() });
        }
        let j = sig.j_mink();
        let residual = (m.transpose() * &j + &j * &m).norm();
        if residual > ORTHOGONAL_TOL * rel_scale(&m) {
            return Err(Error::NotInAlgebra { residual });
        }
        Ok(Self { sig, a, m, translation })
    }

    pub fn signature(&self) -> Signature {
        self.sig
    }

    /// Infinitesimal scale part.
    pub fn a(&self) -> f64 {
        self.a
    }

    /// Skew part in `o(p,q)`.
    pub fn m(&self) -> &DMatrix<f64> {
        &self.m
    }

    pub fn translation(&self) -> &DVector<f64> {
        &self.translation
    }

    /// Full linear part `a I + M` of the field.
    pub fn linear(&self) -> DMatrix<f64> {
        let n = self.sig.n();
        DMatrix::identity(n, n) * self.a + &self.m
    }

    /// Value of the field at `x`.
    pub fn at(&self, x: &DVector<f64>) -> DVector<f64> {
        self.linear() * x + &self.translation
    }
}

/// Reads an affine conformal map off a group element fixing the basepoint
/// ray. Fails with `NotInP` when the first column is not proportional to
/// the basepoint representative.
pub fn to_affine(g: &MobiusElement) -> Result<AffineConformalMap> {
    let sig = g.signature();
    let n = sig.n();
    let mat = g.mat();
    let col0 = mat.column(0);
    let below = col0.rows(1, n + 1).norm();
    let residual = below / col0.norm().max(f64::MIN_POSITIVE);
    if residual > 1e-9 {
        return Err(Error::NotInP { residual });
    }
    // Projective representatives are defined up to sign.
    let flip = if mat[(0, 0)] < 0.0 { -1.0 } else { 1.0 };
    let scale = flip * mat[(0, 0)];
    if !(scale > 0.0) {
        return Err(Error::NotInP { residual: 1.0 });
    }
    let orthogonal = mat.view((1, 1), (n, n)).clone_owned() * flip;
    let translation = mat.view((1, n + 1), (n, 1)).column(0).into_owned() * (flip * scale);
    AffineConformalMap::new(sig, scale, orthogonal, translation)
}

/// Builds the group element `translation(T) . diag(scale, A, 1/scale)`
/// realizing the affine action; inverse of [`to_affine`].
pub fn from_affine(map: &AffineConformalMap) -> Result<MobiusElement> {
    let diag = gen_diag(map.sig, map.scale, &map.orthogonal)?;
    gen_nplus(map.sig, &map.translation)?.compose(&diag)
}

/// Reads an affine conformal field off an algebra element tangent to `P`
/// (no lowest-grade part).
pub fn field_to_affine(x: &MobiusField) -> Result<AffineConformalField> {
    let parts = grade_decompose(x)?;
    let residual = parts.xi_minus.norm();
    if residual > 1e-10 * rel_scale(x.mat()) {
        return Err(Error::NotInLittleP { residual });
    }
    AffineConformalField::new(x.signature(), parts.a, parts.m, parts.xi_plus)
}

/// Ambient algebra element realizing an affine conformal field.
pub fn from_affine_field(f: &AffineConformalField) -> Result<MobiusField> {
    let parts = GradedParts {
        xi_minus: DVector::zeros(f.sig.n()),
        a: f.a,
        m: f.m.clone(),
        xi_plus: f.translation.clone(),
    };
    MobiusField::new(f.sig, parts.reassemble(f.sig))
}

/// Time-`t` map of the affine flow generated by `f`, computed from the
/// affine data alone (matrix exponential of the augmented `(n+1)` system),
/// independently of the ambient exponential.
pub fn affine_flow(f: &AffineConformalField, t: f64) -> Result<AffineConformalMap> {
    let n = f.sig.n();
    let mut aug = DMatrix::zeros(n + 1, n + 1);
    aug.view_mut((0, 0), (n, n)).copy_from(&f.linear());
    aug.view_mut((0, n), (n, 1)).copy_from(&f.translation);
    let e = (aug * t).exp();
    let scale = (f.a * t).exp();
    let orthogonal = e.view((0, 0), (n, n)).clone_owned() / scale;
    let translation = e.view((0, n), (n, 1)).column(0).into_owned();
    AffineConformalMap::new(f.sig, scale, orthogonal, translation)
}

/// Natural action on `Ein^{p,q}`: the ray of `g . rep`, renormalized.
pub fn act_on_ein(g: &MobiusElement, z: &EinPoint) -> Result<EinPoint> {
    if g.signature() != z.signature() {
        return Err(Error::InvalidInput("act_on_ein: signature mismatch".into()));
    }
    EinPoint::new(z.signature(), g.mat() * z.rep())
}

/// A sequence of ordered positive diagonals `lambda_1(k) >= ... >= lambda_n(k)`,
/// the affine diagonal entries of elements of the cone `A^+`.
#[derive(Debug, Clone)]
pub struct DiagonalSequence {
    entries: Vec<DVector<f64>>,
}

impl DiagonalSequence {
    /// Requires a nonempty list of positive, descending rows of equal length.
    pub fn new(entries: Vec<DVector<f64>>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidInput("diagonal sequence must be nonempty".into()));
        }
        let n = entries[0].len();
        for (k, row) in entries.iter().enumerate() {
            if row.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: row.len() });
            }
            for i in 0..row.len() {
                if !(row[i] > 0.0) {
                    return Err(Error::InvalidInput(format!(
                        "entry {i} of step {k} is not positive"
                    )));
                }
                if i > 0 && row[i] > row[i - 1] * (1.0 + 1e-12) {
                    return Err(Error::InvalidInput(format!(
                        "step {k} is not ordered descending at entry {i}"
                    )));
                }
            }
        }
        Ok(Self { entries })
    }

    pub fn steps(&self) -> &[DVector<f64>] {
        &self.entries
    }
}

/// Stable: every step is an ordered dilation with all entries `>= 1`.
pub fn is_stable(seq: &DiagonalSequence) -> bool {
    seq.entries.iter().all(|row| row[row.len() - 1] >= 1.0 - 1e-12)
}

/// Strongly stable: stable, and by the end of the (finite) sequence every
/// diagonal entry exceeds `1 / epsilon` — the finite surrogate for all
/// inverses tending to zero.
pub fn is_strongly_stable(seq: &DiagonalSequence, epsilon: f64) -> bool {
    debug_assert!(epsilon > 0.0);
    if !is_stable(seq) {
        return false;
    }
    let last = &seq.entries[seq.entries.len() - 1];
    last[last.len() - 1] >= 1.0 / epsilon
}

//! Matrix realizations of `o(p+1,q+1)` and `O(p+1,q+1)`.
//!
//! The algebra splits into graded pieces `n^- ⊕ r ⊕ n^+` with respect to
//! the first/last ambient coordinates:
//!
//! ```text
//!       | a      -x+^t J    0   |        r:  corner scalar a, central M in o(p,q)
//!   X = | x-        M       x+  |        n^+: x+ block (translations of the affine chart)
//!       | 0      -x-^t J   -a   |        n^-: x- block (translations of the chart at infinity)
//! ```
//!
//! Both `n^±` generators are 3-step nilpotent, so their exponentials are
//! the quadratic closed forms [`gen_nplus`] / [`gen_nminus`]. The diagonal
//! cone `A^+` drives the stability notions in [`crate::parabolic`].
//!
//! Membership thresholds are relative: a matrix of norm `s` is accepted
//! when the defining identity holds to `tol * (1 + s)` (algebra) or
//! `tol * (1 + s^2)` (group, whose identity is quadratic in the entries).

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::forms::Signature;
use crate::linalg::rel_scale;

/// Relative tolerance for `X^t J + J X = 0`.
pub const ALGEBRA_TOL: f64 = 1e-10;

/// Relative tolerance for `g^t J g = J`.
pub const GROUP_TOL: f64 = 1e-8;

/// An element of `o(p+1,q+1)`: an infinitesimal conformal transformation
/// of `Ein^{p,q}`.
#[derive(Debug, Clone, PartialEq)]
pub struct MobiusField {
    sig: Signature,
    mat: DMatrix<f64>,
}

/// An element of `O(p+1,q+1)` acting conformally on `Ein^{p,q}`.
#[derive(Debug, Clone, PartialEq)]
pub struct MobiusElement {
    sig: Signature,
    mat: DMatrix<f64>,
}

/// Frobenius residual of the algebra identity `X^t J + J X`.
pub fn is_in_algebra(sig: Signature, x: &DMatrix<f64>) -> Result<f64> {
    let m = sig.ambient_dim();
    if x.nrows() != m || x.ncols() != m {
        return Err(Error::DimensionMismatch { expected: m, got: x.nrows().max(x.ncols()) });
    }
    let j = sig.j_ambient();
    Ok((x.transpose() * &j + &j * x).norm())
}

/// Frobenius residual of the group identity `g^t J g - J`.
pub fn is_in_group(sig: Signature, g: &DMatrix<f64>) -> Result<f64> {
    let m = sig.ambient_dim();
    if g.nrows() != m || g.ncols() != m {
        return Err(Error::DimensionMismatch { expected: m, got: g.nrows().max(g.ncols()) });
    }
    let j = sig.j_ambient();
    Ok((g.transpose() * &j * g - &j).norm())
}

fn check_finite(mat: &DMatrix<f64>) -> Result<()> {
    if mat.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::InvalidInput("matrix has non-finite entries".into()))
    }
}

impl MobiusField {
    pub fn new(sig: Signature, mat: DMatrix<f64>) -> Result<Self> {
        check_finite(&mat)?;
        let residual = is_in_algebra(sig, &mat)?;
        if residual > ALGEBRA_TOL * rel_scale(&mat) {
            return Err(Error::NotInAlgebra { residual });
        }
        Ok(Self { sig, mat })
    }

    pub fn signature(&self) -> Signature {
        self.sig
    }

    pub fn mat(&self) -> &DMatrix<f64> {
        &self.mat
    }

    pub fn scaled(&self, t: f64) -> MobiusField {
        MobiusField { sig: self.sig, mat: &self.mat * t }
    }

    /// Lie bracket `[X, Y] = XY - YX`.
    pub fn bracket(&self, other: &MobiusField) -> Result<MobiusField> {
        MobiusField::new(self.sig, &self.mat * &other.mat - &other.mat * &self.mat)
    }
}

impl MobiusElement {
    pub fn new(sig: Signature, mat: DMatrix<f64>) -> Result<Self> {
        check_finite(&mat)?;
        let residual = is_in_group(sig, &mat)?;
        let scale = 1.0 + mat.norm_squared();
        if residual > GROUP_TOL * scale {
            return Err(Error::NotInGroup { residual });
        }
        let det = mat.determinant();
        if (det.abs() - 1.0).abs() > 1e-6 * scale {
            return Err(Error::NotInGroup { residual: (det.abs() - 1.0).abs() });
        }
        Ok(Self { sig, mat })
    }

    pub fn identity(sig: Signature) -> Self {
        Self { sig, mat: DMatrix::identity(sig.ambient_dim(), sig.ambient_dim()) }
    }

    pub fn signature(&self) -> Signature {
        self.sig
    }

    pub fn mat(&self) -> &DMatrix<f64> {
        &self.mat
    }

    pub fn compose(&self, other: &MobiusElement) -> Result<MobiusElement> {
        MobiusElement::new(self.sig, &self.mat * &other.mat)
    }

    /// Inverse through the form: `g^{-1} = J g^t J`, exact up to the
    /// membership residual and cheaper than an LU solve.
    pub fn inverse(&self) -> MobiusElement {
        let j = self.sig.j_ambient();
        MobiusElement { sig: self.sig, mat: &j * self.mat.transpose() * &j }
    }

    /// Integer power by repeated squaring.
    pub fn powi(&self, k: i64) -> Result<MobiusElement> {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut acc = MobiusElement::identity(self.sig);
        let mut sq = base;
        let mut e = k.unsigned_abs();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.compose(&sq)?;
            }
            e >>= 1;
            if e > 0 {
                sq = sq.compose(&sq)?;
            }
        }
        Ok(acc)
    }
}

/// Graded parts of an algebra element; `reassemble` rebuilds the matrix.
#[derive(Debug, Clone)]
pub struct GradedParts {
    pub xi_minus: DVector<f64>,
    pub a: f64,
    pub m: DMatrix<f64>,
    pub xi_plus: DVector<f64>,
}

impl GradedParts {
    pub fn reassemble(&self, sig: Signature) -> DMatrix<f64> {
        let n = sig.n();
        let j = sig.j_mink();
        let mut x = DMatrix::zeros(n + 2, n + 2);
        x[(0, 0)] = self.a;
        x[(n + 1, n + 1)] = -self.a;
        x.view_mut((1, 1), (n, n)).copy_from(&self.m);
        x.view_mut((1, 0), (n, 1)).copy_from(&self.xi_minus);
        x.view_mut((1, n + 1), (n, 1)).copy_from(&self.xi_plus);
        let top = -(&j * &self.xi_plus).transpose();
        x.view_mut((0, 1), (1, n)).copy_from(&top);
        let bottom = -(&j * &self.xi_minus).transpose();
        x.view_mut((n + 1, 1), (1, n)).copy_from(&bottom);
        x
    }
}

/// Splits an algebra element into its `n^- ⊕ r ⊕ n^+` parts. The corner
/// scalar and the first column/row carry everything; the reassembled
/// matrix must reproduce the input to the algebra tolerance.
pub fn grade_decompose(x: &MobiusField) -> Result<GradedParts> {
    let sig = x.sig;
    let n = sig.n();
    let mat = &x.mat;
    let j = sig.j_mink();

    let a = mat[(0, 0)];
    let xi_minus = mat.view((1, 0), (n, 1)).clone_owned().column(0).into_owned();
    let m = mat.view((1, 1), (n, n)).clone_owned();
    // First row middle block is -xi_plus^t J; J is involutive.
    let top = mat.view((0, 1), (1, n)).transpose();
    let xi_plus = -(&j * top).column(0).into_owned();

    let parts = GradedParts { xi_minus, a, m, xi_plus };
    let residual = (parts.reassemble(sig) - mat).norm();
    if residual > ALGEBRA_TOL * rel_scale(mat) {
        return Err(Error::NotInAlgebra { residual });
    }
    Ok(parts)
}

/// Algebra generator in `n^+` with vector `v`.
pub fn alg_nplus(sig: Signature, v: &DVector<f64>) -> Result<MobiusField> {
    let parts = GradedParts {
        xi_minus: DVector::zeros(sig.n()),
        a: 0.0,
        m: DMatrix::zeros(sig.n(), sig.n()),
        xi_plus: check_mink(sig, v)?.clone(),
    };
    MobiusField::new(sig, parts.reassemble(sig))
}

/// Algebra generator in `n^-` with vector `v`.
pub fn alg_nminus(sig: Signature, v: &DVector<f64>) -> Result<MobiusField> {
    let parts = GradedParts {
        xi_minus: check_mink(sig, v)?.clone(),
        a: 0.0,
        m: DMatrix::zeros(sig.n(), sig.n()),
        xi_plus: DVector::zeros(sig.n()),
    };
    MobiusField::new(sig, parts.reassemble(sig))
}

/// Algebra element of the reductive part: corner scalar `a` and a central
/// block `m` in `o(p,q)`.
pub fn alg_r(sig: Signature, a: f64, m: &DMatrix<f64>) -> Result<MobiusField> {
    if m.nrows() != sig.n() || m.ncols() != sig.n() {
        return Err(Error::DimensionMismatch { expected: sig.n(), got: m.nrows().max(m.ncols()) });
    }
    let parts = GradedParts {
        xi_minus: DVector::zeros(sig.n()),
        a,
        m: m.clone(),
        xi_plus: DVector::zeros(sig.n()),
    };
    MobiusField::new(sig, parts.reassemble(sig))
}

fn check_mink(sig: Signature, v: &DVector<f64>) -> Result<&DVector<f64>> {
    if v.len() != sig.n() {
        return Err(Error::DimensionMismatch { expected: sig.n(), got: v.len() });
    }
    Ok(v)
}

/// Translation of the affine chart by `v`, as a group element:
///
/// ```text
/// | 1   -v^t J   -Q(v)/2 |
/// | 0     I        v     |
/// | 0     0        1     |
/// ```
pub fn gen_nplus(sig: Signature, v: &DVector<f64>) -> Result<MobiusElement> {
    check_mink(sig, v)?;
    let n = sig.n();
    let j = sig.j_mink();
    let qv = sig.eval_q(v)?;
    let mut g = DMatrix::identity(n + 2, n + 2);
    let top = -(&j * v).transpose();
    g.view_mut((0, 1), (1, n)).copy_from(&top);
    g[(0, n + 1)] = -qv / 2.0;
    g.view_mut((1, n + 1), (n, 1)).copy_from(v);
    MobiusElement::new(sig, g)
}

/// Translation of the chart at infinity by `v` (the transpose picture of
/// [`gen_nplus`]): satisfies `gen_nminus(v) . jo(w) = jo(v + w)`.
pub fn gen_nminus(sig: Signature, v: &DVector<f64>) -> Result<MobiusElement> {
    check_mink(sig, v)?;
    let n = sig.n();
    let j = sig.j_mink();
    let qv = sig.eval_q(v)?;
    let mut g = DMatrix::identity(n + 2, n + 2);
    g.view_mut((1, 0), (n, 1)).copy_from(v);
    g[(n + 1, 0)] = -qv / 2.0;
    let bottom = -(&j * v).transpose();
    g.view_mut((n + 1, 1), (1, n)).copy_from(&bottom);
    MobiusElement::new(sig, g)
}

/// Block-diagonal element `diag(lambda, A, 1/lambda)` of the reductive
/// part, `A` in `O(p,q)`, `lambda > 0`.
pub fn gen_diag(sig: Signature, lambda: f64, a: &DMatrix<f64>) -> Result<MobiusElement> {
    if lambda <= 0.0 {
        return Err(Error::InvalidInput("diagonal factor must be positive".into()));
    }
    let n = sig.n();
    if a.nrows() != n || a.ncols() != n {
        return Err(Error::DimensionMismatch { expected: n, got: a.nrows().max(a.ncols()) });
    }
    let mut g = DMatrix::zeros(n + 2, n + 2);
    g[(0, 0)] = lambda;
    g[(n + 1, n + 1)] = 1.0 / lambda;
    g.view_mut((1, 1), (n, n)).copy_from(a);
    MobiusElement::new(sig, g)
}

/// Exponential `exp(t X)`.
///
/// Nilpotent inputs (some power of `X` vanishing at working precision) are
/// detected and summed by the exact terminating series, so the `n^±`
/// generators exponentiate to their closed forms; everything else goes
/// through scaling-and-squaring with a fixed-order rational approximant.
pub fn exp_field(x: &MobiusField, t: f64) -> Result<MobiusElement> {
    let tx = &x.mat * t;
    let dim = tx.nrows();
    let norm = x.mat.norm();

    if norm == 0.0 || t == 0.0 {
        return Ok(MobiusElement::identity(x.sig));
    }

    // Nilpotency scan: ||X^k|| against ||X||^k at working precision.
    let mut power = x.mat.clone();
    let mut degree = None;
    for k in 2..=(dim + 1) {
        power = &power * &x.mat;
        if power.norm() <= 1e-13 * norm.powi(k as i32) {
            degree = Some(k);
            break;
        }
    }

    let mat = match degree {
        Some(k) => {
            let mut term = DMatrix::identity(dim, dim);
            let mut acc = DMatrix::identity(dim, dim);
            for j in 1..k {
                term = &term * &tx / (j as f64);
                acc += &term;
            }
            acc
        }
        None => tx.exp(),
    };
    MobiusElement::new(x.sig, mat)
}

/// Adjoint action `g X g^{-1}`.
pub fn adjoint(g: &MobiusElement, x: &MobiusField) -> Result<MobiusField> {
    if g.sig != x.sig {
        return Err(Error::InvalidInput("adjoint: signature mismatch".into()));
    }
    let ginv = g.inverse();
    MobiusField::new(x.sig, &g.mat * &x.mat * &ginv.mat)
}

/// Exponentiated diagonal cone element for exponents
/// `alpha_1, ..., alpha_{p+1}`:
/// `diag(e^{a1}, ..., e^{a_{p+1}}, I_{q-p}, e^{-a_{p+1}}, ..., e^{-a1})`.
pub fn a_plus_element(sig: Signature, alphas: &[f64]) -> Result<MobiusElement> {
    if alphas.len() != sig.p() + 1 {
        return Err(Error::DimensionMismatch { expected: sig.p() + 1, got: alphas.len() });
    }
    let m = sig.ambient_dim();
    let mut g = DMatrix::identity(m, m);
    for (i, &alpha) in alphas.iter().enumerate() {
        g[(i, i)] = alpha.exp();
        g[(m - 1 - i, m - 1 - i)] = (-alpha).exp();
    }
    MobiusElement::new(sig, g)
}

/// Whether a diagonal group element is a stable dilation: its affine
/// diagonal `lambda_i = g_00 * g_ii` must be ordered
/// `lambda_1 >= ... >= lambda_n >= 1`.
pub fn is_in_a_plus(g: &MobiusElement) -> bool {
    let sig = g.sig;
    let n = sig.n();
    let mat = &g.mat;
    let mut off = 0.0;
    for i in 0..mat.nrows() {
        for j in 0..mat.ncols() {
            if i != j {
                off += mat[(i, j)] * mat[(i, j)];
            }
        }
    }
    if off.sqrt() > 1e-9 * rel_scale(mat) {
        return false;
    }
    let lambda = mat[(0, 0)];
    if lambda <= 0.0 {
        return false;
    }
    let tol = 1e-9;
    let mut prev = f64::INFINITY;
    for i in 1..=n {
        let li = lambda * mat[(i, i)];
        if li <= 0.0 || li > prev * (1.0 + tol) || li < 1.0 - tol {
            return false;
        }
        prev = li;
    }
    true
}

/// Projection to `Ein^{p,q}`: the ray of the image of the basepoint
/// representative, i.e. the first column of `g`.
pub fn project_to_ein(g: &MobiusElement) -> Result<crate::model::EinPoint> {
    crate::model::EinPoint::new(g.sig, g.mat.column(0).into_owned())
}

//! Split quadratic and bilinear forms of type `(p, q)` and `(p+1, q+1)`.
//!
//! Both forms are written in the split convention
//!
//! ```text
//! Q^{p+1,q+1}(x) = 2 x_0 x_{n+1} + ... + 2 x_p x_{q+1} + x_{p+1}^2 + ... + x_q^2
//! ```
//!
//! (indices 0-based on `n+2` ambient coordinates), and the analogous
//! `Q^{p,q}` on `n = p + q` coordinates. The hyperbolic pairs come first
//! and last, mirrored around a Euclidean middle block, so the block
//! matrices of the graded algebra in [`crate::liealg`] hold literally.
//! For `p = 0` the `n`-dimensional form is the plain Euclidean square norm.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Causal class of a vector of `R^{p,q}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CausalType {
    Zero,
    Lightlike,
    Timelike,
    Spacelike,
}

/// Metric signature `(p, q)` with `p <= q`; fixes every matrix size used
/// by the crate (`n = p + q` for the flat space, `n + 2` ambient).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Signature {
    p: usize,
    q: usize,
}

impl Signature {
    /// Requires `p <= q` and `n >= 1`. Classification procedures
    /// additionally assume `n >= 3`; see [`Signature::require_dim3`].
    pub fn new(p: usize, q: usize) -> Result<Self> {
        if p > q {
            return Err(Error::InvalidSignature(format!(
                "p = {p} exceeds q = {q}; swap time and space directions first"
            )));
        }
        if p + q == 0 {
            return Err(Error::InvalidSignature("n = p + q must be at least 1".into()));
        }
        Ok(Signature { p, q })
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn q(&self) -> usize {
        self.q
    }

    /// Dimension `n = p + q` of the flat space.
    pub fn n(&self) -> usize {
        self.p + self.q
    }

    /// Ambient dimension `n + 2`.
    pub fn ambient_dim(&self) -> usize {
        self.n() + 2
    }

    pub fn is_riemannian(&self) -> bool {
        self.p == 0
    }

    /// Guard for the decision procedures, which are stated for `n >= 3`.
    pub fn require_dim3(&self) -> Result<()> {
        if self.n() < 3 {
            return Err(Error::InvalidSignature(format!(
                "dimension n = {} is below 3",
                self.n()
            )));
        }
        Ok(())
    }

    fn check_len(&self, len: usize, expected: usize) -> Result<()> {
        if len != expected {
            return Err(Error::DimensionMismatch { expected, got: len });
        }
        Ok(())
    }

    /// Matrix `J_{p,q}` of the split form on `R^{p,q}`:
    /// antidiagonal ones on the `p` mirrored hyperbolic pairs, identity on
    /// the middle `q - p` block. Symmetric, involutive (`J^2 = I`).
    pub fn j_mink(&self) -> DMatrix<f64> {
        let n = self.n();
        let mut j = DMatrix::zeros(n, n);
        for i in 0..self.p {
            j[(i, n - 1 - i)] = 1.0;
            j[(n - 1 - i, i)] = 1.0;
        }
        for i in self.p..self.q {
            j[(i, i)] = 1.0;
        }
        j
    }

    /// Matrix `J_{p+1,q+1}` of the ambient form on `R^{p+1,q+1}`.
    pub fn j_ambient(&self) -> DMatrix<f64> {
        let m = self.ambient_dim();
        let mut j = DMatrix::zeros(m, m);
        for i in 0..=self.p {
            j[(i, m - 1 - i)] = 1.0;
            j[(m - 1 - i, i)] = 1.0;
        }
        for i in (self.p + 1)..=self.q {
            j[(i, i)] = 1.0;
        }
        j
    }

    /// `Q^{p+1,q+1}(x)` on an ambient vector (`n + 2` coordinates).
    pub fn eval_q_ambient(&self, x: &DVector<f64>) -> Result<f64> {
        let m = self.ambient_dim();
        self.check_len(x.len(), m)?;
        let mut acc = 0.0;
        for i in 0..=self.p {
            acc += 2.0 * x[i] * x[m - 1 - i];
        }
        for i in (self.p + 1)..=self.q {
            acc += x[i] * x[i];
        }
        Ok(acc)
    }

    /// `Q^{p,q}(x)` on a vector of `R^{p,q}` (`n` coordinates).
    /// For `p = 0` this is the Euclidean square norm.
    pub fn eval_q(&self, x: &DVector<f64>) -> Result<f64> {
        let n = self.n();
        self.check_len(x.len(), n)?;
        let mut acc = 0.0;
        for i in 0..self.p {
            acc += 2.0 * x[i] * x[n - 1 - i];
        }
        for i in self.p..self.q {
            acc += x[i] * x[i];
        }
        Ok(acc)
    }

    /// Symmetric bilinear form `<x, y>_{p,q}` polarizing [`Signature::eval_q`].
    pub fn bilinear(&self, x: &DVector<f64>, y: &DVector<f64>) -> Result<f64> {
        let n = self.n();
        self.check_len(x.len(), n)?;
        self.check_len(y.len(), n)?;
        let mut acc = 0.0;
        for i in 0..self.p {
            acc += x[i] * y[n - 1 - i] + x[n - 1 - i] * y[i];
        }
        for i in self.p..self.q {
            acc += x[i] * y[i];
        }
        Ok(acc)
    }

    /// Ambient bilinear form on `n + 2` coordinates.
    pub fn bilinear_ambient(&self, x: &DVector<f64>, y: &DVector<f64>) -> Result<f64> {
        let m = self.ambient_dim();
        self.check_len(x.len(), m)?;
        self.check_len(y.len(), m)?;
        let mut acc = 0.0;
        for i in 0..=self.p {
            acc += x[i] * y[m - 1 - i] + x[m - 1 - i] * y[i];
        }
        for i in (self.p + 1)..=self.q {
            acc += x[i] * y[i];
        }
        Ok(acc)
    }

    /// Causal class of `x`, decided against a relative tolerance so that
    /// rescaling a vector never changes its verdict.
    ///
    /// `Zero` when every coordinate is below `tol` in absolute value;
    /// `Lightlike` when `|Q(x)| <= tol * sum x_i^2` on a nonzero vector.
    pub fn causal_type(&self, x: &DVector<f64>, tol: f64) -> CausalType {
        debug_assert!(tol > 0.0);
        let sup = x.amax();
        if sup <= tol {
            return CausalType::Zero;
        }
        let qx = self.eval_q(x).expect("causal_type: wrong vector length");
        let scale = x.norm_squared();
        if qx.abs() <= tol * scale {
            CausalType::Lightlike
        } else if qx < 0.0 {
            CausalType::Timelike
        } else {
            CausalType::Spacelike
        }
    }
}

/// Standard basis vector `e_i` of dimension `dim`.
pub fn basis_vector(dim: usize, i: usize) -> DVector<f64> {
    let mut v = DVector::zeros(dim);
    v[i] = 1.0;
    v
}

//! Eigenstructure and the real multiplicative Jordan decomposition inside
//! `O(p,q)`.
//!
//! `jordan_chevalley` factors `A = A_s A_e A_u` into pairwise-commuting
//! elements of `O(p,q)`: `A_s` diagonalizable over `R` with positive
//! eigenvalues, `A_e` elliptic (semisimple with unit-modulus spectrum) and
//! `A_u` unipotent. The factors are assembled spectrally: eigenvalues are
//! clustered, real generalized eigenspaces come from kernel powers, and on
//! each subspace the semisimple part splits into modulus and phase.

use nalgebra::{Complex, DMatrix};

use crate::error::{Error, Result};
use crate::forms::Signature;
use crate::linalg::{kernel_basis, orthonormalize};

/// Default relative radius for eigenvalue clustering.
pub const EIGEN_CLUSTER_TOL: f64 = 1e-8;

/// Largest matrix size accepted by the eigensolver-based routines.
pub const MAX_EIGEN_DIM: usize = 12;

/// Eigenvalues through a Schur iteration with a bounded step count.
///
/// The unbounded iteration can stall on defective inputs with a single
/// extremely tight eigenvalue cluster (unipotent factors are exactly
/// that), so non-convergence is retried under a tiny alternating diagonal
/// shift — far below the clustering radius, so verdicts are unaffected.
pub fn complex_spectrum(a: &DMatrix<f64>) -> Result<Vec<Complex<f64>>> {
    let n = a.nrows();
    if n != a.ncols() {
        return Err(Error::DimensionMismatch { expected: n, got: a.ncols() });
    }
    let scale = a.norm().max(1.0);
    for attempt in 0..5 {
        let mut m = a.clone();
        if attempt > 0 {
            let shift = scale * 1e-13 * 10f64.powi(attempt - 1);
            for i in 0..n {
                m[(i, i)] += shift * if i % 2 == 0 { 1.0 } else { -1.0 };
            }
        }
        // Deflation threshold well above the rounding floor (the default
        // machine-eps threshold cycles on defective inputs) yet orders of
        // magnitude below the clustering radius used downstream.
        if let Some(schur) = nalgebra::linalg::Schur::try_new(m, 1e-13, 200 * (n + 4)) {
            return Ok(schur.complex_eigenvalues().iter().cloned().collect());
        }
    }
    Err(Error::IllConditioned("eigenvalue iteration did not converge".into()))
}

/// One eigenvalue cluster with its real invariant subspace.
#[derive(Debug, Clone)]
pub struct EigenCluster {
    /// Representative eigenvalue; complex pairs are stored once, with
    /// nonnegative imaginary part.
    pub value: Complex<f64>,
    /// Algebraic multiplicity, counting both members of a conjugate pair.
    pub multiplicity: usize,
    pub is_complex_pair: bool,
    /// Orthonormal basis (as columns) of the real generalized eigenspace.
    pub basis: DMatrix<f64>,
}

/// Clustered spectrum of a real matrix with generalized eigenspace bases.
#[derive(Debug, Clone)]
pub struct EigenStructure {
    pub clusters: Vec<EigenCluster>,
    dim: usize,
}

impl EigenStructure {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Basis of all subspaces concatenated, an invertible `n x n` matrix.
    pub fn full_basis(&self) -> DMatrix<f64> {
        let cols: Vec<_> = self.clusters.iter().map(|c| c.basis.clone()).collect();
        let mut m = DMatrix::zeros(self.dim, self.dim);
        let mut at = 0;
        for b in cols {
            m.view_mut((0, at), (self.dim, b.ncols())).copy_from(&b);
            at += b.ncols();
        }
        m
    }
}

/// Clusters the eigenvalues of `a` (cluster radius `tol * max(1, ||a||)`)
/// and computes a real generalized eigenspace basis per cluster via kernel
/// powers. Conjugate pairs are merged into a single cluster acting on a
/// real subspace of twice the dimension.
pub fn eigen_structure(a: &DMatrix<f64>, tol: f64) -> Result<EigenStructure> {
    let n = a.nrows();
    if n != a.ncols() {
        return Err(Error::DimensionMismatch { expected: n, got: a.ncols() });
    }
    if n > MAX_EIGEN_DIM {
        return Err(Error::InvalidInput(format!(
            "matrix size {n} exceeds the supported maximum {MAX_EIGEN_DIM}"
        )));
    }
    let radius = tol * a.norm().max(1.0);
    let eigs = complex_spectrum(a)?;

    // Work in the closed upper half plane: each strictly complex eigenvalue
    // represents itself and its conjugate.
    let mut reps: Vec<Complex<f64>> = Vec::new();
    for e in eigs.iter() {
        if e.im > 0.0 {
            reps.push(*e);
        } else if e.im == 0.0 || e.im.abs() <= f64::EPSILON * a.norm() {
            reps.push(Complex::new(e.re, 0.0));
        }
        // strictly negative imaginary parts are the conjugates of the kept ones
    }

    // Greedy clustering by proximity.
    let mut clusters: Vec<(Complex<f64>, usize, bool)> = Vec::new(); // (centroid, count, has_pair)
    'outer: for e in reps {
        let weight = if e.im > radius { 2 } else { 1 };
        for (c, count, has_pair) in clusters.iter_mut() {
            if (e - *c).norm() <= radius {
                *c = (*c * (*count as f64) + e * (weight as f64)) / ((*count + weight) as f64);
                *count += weight;
                *has_pair |= e.im > radius;
                continue 'outer;
            }
        }
        clusters.push((e, weight, e.im > radius));
    }

    // Separation guard: distinct clusters must sit at least 10 radii apart.
    for i in 0..clusters.len() {
        for j in 0..i {
            let d = (clusters[i].0 - clusters[j].0).norm();
            let d_conj = (clusters[i].0 - clusters[j].0.conj()).norm();
            if d < 10.0 * radius || (clusters[j].2 && d_conj < 10.0 * radius) {
                return Err(Error::IllConditioned(format!(
                    "clusters at {} and {} closer than 10x the cluster radius {radius:.3e}",
                    clusters[i].0, clusters[j].0
                )));
            }
        }
    }

    let mut out = Vec::new();
    let mut total = 0;
    for (value, multiplicity, is_complex_pair) in clusters {
        let value = if is_complex_pair { value } else { Complex::new(value.re, 0.0) };
        let factor = if is_complex_pair {
            // real quadratic with roots value, conj(value)
            a * a - a * (2.0 * value.re) + DMatrix::identity(n, n) * value.norm_sqr()
        } else {
            a - DMatrix::identity(n, n) * value.re
        };
        let power = if is_complex_pair { multiplicity.div_ceil(2) } else { multiplicity };
        let mut b = DMatrix::identity(n, n);
        for _ in 0..power {
            b = &b * &factor;
        }
        // Rounding noise floor for the repeated products.
        let floor =
            10.0 * (n * power) as f64 * f64::EPSILON * factor.norm().max(1.0).powi(power as i32);
        let basis = kernel_basis(&b, 1e-8, floor);
        if basis.ncols() != multiplicity {
            return Err(Error::IllConditioned(format!(
                "generalized eigenspace at {value} has dimension {} but multiplicity {multiplicity}",
                basis.ncols()
            )));
        }
        total += multiplicity;
        out.push(EigenCluster { value, multiplicity, is_complex_pair, basis });
    }
    if total != n {
        return Err(Error::IllConditioned(format!(
            "eigenspace dimensions sum to {total}, expected {n}"
        )));
    }
    Ok(EigenStructure { clusters: out, dim: n })
}

/// The three commuting Jordan factors of an element of `O(p,q)`.
#[derive(Debug, Clone)]
pub struct JordanFactors {
    /// `A_s`: diagonalizable over `R`, positive real spectrum.
    pub semisimple: DMatrix<f64>,
    /// `A_e`: semisimple with every eigenvalue on the unit circle.
    pub elliptic: DMatrix<f64>,
    /// `A_u`: unipotent, `(A_u - I)^n = 0`.
    pub unipotent: DMatrix<f64>,
}

/// Residuals of the defining contracts, all Frobenius norms.
#[derive(Debug, Clone)]
pub struct JordanResiduals {
    pub product: f64,
    pub commutation: f64,
    pub membership: f64,
    pub unipotent_nilpotency: f64,
}

impl JordanFactors {
    pub fn residuals(&self, sig: Signature, a: &DMatrix<f64>) -> JordanResiduals {
        let j = sig.j_mink();
        let membership = [&self.semisimple, &self.elliptic, &self.unipotent]
            .iter()
            .map(|f| (f.transpose() * &j * *f - &j).norm())
            .fold(0.0f64, f64::max);
        let product = (&self.semisimple * &self.elliptic * &self.unipotent - a).norm();
        let pairs = [
            (&self.semisimple, &self.elliptic),
            (&self.semisimple, &self.unipotent),
            (&self.elliptic, &self.unipotent),
        ];
        let commutation = pairs
            .iter()
            .map(|(x, y)| (*x * *y - *y * *x).norm())
            .fold(0.0f64, f64::max);
        let n = a.nrows();
        let mut nil = &self.unipotent - DMatrix::identity(n, n);
        let base = nil.clone();
        for _ in 1..n {
            nil = &nil * &base;
        }
        JordanResiduals {
            product,
            commutation,
            membership,
            unipotent_nilpotency: nil.norm(),
        }
    }
}

/// Multiplicative Jordan decomposition `A = A_s A_e A_u` of `A` in
/// `O(p,q)`, computed from the clustered eigenstructure: on each
/// generalized eigenspace the semisimple part acts with the cluster
/// eigenvalue, whose modulus goes to `A_s` and phase to `A_e`; the
/// unipotent factor is what remains.
pub fn jordan_chevalley(sig: Signature, a: &DMatrix<f64>) -> Result<JordanFactors> {
    let n = sig.n();
    if a.nrows() != n || a.ncols() != n {
        return Err(Error::DimensionMismatch { expected: n, got: a.nrows().max(a.ncols()) });
    }
    let j = sig.j_mink();
    let membership = (a.transpose() * &j * a - &j).norm();
    if membership > 1e-8 * (1.0 + a.norm_squared()) {
        return Err(Error::NotInGroup { residual: membership });
    }

    let structure = eigen_structure(a, EIGEN_CLUSTER_TOL)?;
    let v = structure.full_basis();
    let Some(v_inv) = v.clone().try_inverse() else {
        return Err(Error::IllConditioned("eigenspace basis is numerically singular".into()));
    };

    // Per-cluster blocks of A_s and of the full semisimple part A_s A_e.
    let mut s_diag = DMatrix::<f64>::zeros(n, n);
    let mut ss_diag = DMatrix::<f64>::zeros(n, n);
    let mut at = 0;
    for cluster in &structure.clusters {
        let d = cluster.multiplicity;
        let modulus = cluster.value.norm();
        if modulus <= 0.0 {
            return Err(Error::IllConditioned("zero eigenvalue on a form-preserving map".into()));
        }
        for k in 0..d {
            s_diag[(at + k, at + k)] = modulus;
        }
        if !cluster.is_complex_pair {
            let lam = cluster.value.re;
            for k in 0..d {
                ss_diag[(at + k, at + k)] = lam;
            }
        } else {
            // Restriction of A to the invariant subspace, in its basis.
            let vb = &cluster.basis;
            let b_small = vb.transpose() * a * vb;
            let re = cluster.value.re;
            let im = cluster.value.im;
            // Complex structure: semisimple part of (B - re I)/im, via the
            // terminating binomial series of (I - X)^{-1/2} on the
            // nilpotent X = I + C^2.
            let c = (&b_small - DMatrix::identity(d, d) * re) / im;
            let x = DMatrix::identity(d, d) + &c * &c;
            let mut series = DMatrix::identity(d, d);
            let mut term = DMatrix::identity(d, d);
            let mut coeff = 1.0;
            for k in 1..=d {
                coeff *= (2 * k - 1) as f64 / (2 * k) as f64;
                term = &term * &x;
                series += &term * coeff;
            }
            let jcx = &c * series;
            let s_small = DMatrix::identity(d, d) * re + &jcx * im;
            ss_diag.view_mut((at, at), (d, d)).copy_from(&s_small);
        }
        at += d;
    }

    let semisimple = &v * &s_diag * &v_inv;
    let full_ss = &v * &ss_diag * &v_inv;
    // A_e = A_s^{-1} (A_s A_e); diagonal of A_s is positive.
    let mut s_inv = s_diag.clone();
    for i in 0..n {
        s_inv[(i, i)] = 1.0 / s_diag[(i, i)];
    }
    let elliptic = &v * &s_inv * &ss_diag * &v_inv;
    let Some(full_ss_inv) = full_ss.clone().try_inverse() else {
        return Err(Error::IllConditioned("semisimple factor is numerically singular".into()));
    };
    let unipotent = full_ss_inv * a;

    let factors = JordanFactors { semisimple, elliptic, unipotent };
    let res = factors.residuals(sig, a);
    let scale = 1.0 + a.norm_squared();
    let worst = res
        .product
        .max(res.commutation)
        .max(res.membership)
        .max(res.unipotent_nilpotency);
    if worst > 1e-7 * scale {
        return Err(Error::IllConditioned(format!(
            "jordan factors fail their contracts (worst residual {worst:.3e})"
        )));
    }
    Ok(factors)
}

/// Verdict for a one-parameter subgroup generator of `o(p,q)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OneParamClass {
    /// Purely imaginary spectrum and semisimple: the closure of the
    /// subgroup it generates is compact.
    EllipticType,
    /// Some eigenvalue has a nonzero real part.
    NonImaginarySpectrum,
    /// Spectrum is imaginary but the generator is not semisimple.
    NotSemisimple,
}

/// Classifies a generator `m` of `o(p,q)`: elliptic type exactly when all
/// eigenvalues are purely imaginary and `m` is semisimple (strict kernels
/// of the cluster factors fill the space). For `p = 0` skew matrices this
/// is automatic.
pub fn classify_one_param(sig: Signature, m: &DMatrix<f64>) -> Result<OneParamClass> {
    let n = sig.n();
    if m.nrows() != n || m.ncols() != n {
        return Err(Error::DimensionMismatch { expected: n, got: m.nrows().max(m.ncols()) });
    }
    let j = sig.j_mink();
    let residual = (m.transpose() * &j + &j * m).norm();
    if residual > 1e-8 * (1.0 + m.norm()) {
        return Err(Error::NotInAlgebra { residual });
    }

    let scale = m.norm().max(1.0);
    let eigs = complex_spectrum(m)?;
    for e in eigs.iter() {
        if e.re.abs() > 1e-8 * scale {
            return Ok(OneParamClass::NonImaginarySpectrum);
        }
    }

    // Semisimplicity: strict kernels of the clustered linear/quadratic
    // factors must fill the whole space.
    let structure = eigen_structure(m, EIGEN_CLUSTER_TOL)?;
    let mut strict = 0;
    for cluster in &structure.clusters {
        let factor = if cluster.is_complex_pair {
            m * m - m * (2.0 * cluster.value.re) + DMatrix::identity(n, n) * cluster.value.norm_sqr()
        } else {
            m - DMatrix::identity(n, n) * cluster.value.re
        };
        let floor = 1e-8 * (1.0 + m.norm()).powi(2);
        strict += kernel_basis(&factor, 1e-8, floor).ncols();
    }
    if strict == n {
        Ok(OneParamClass::EllipticType)
    } else {
        Ok(OneParamClass::NotSemisimple)
    }
}

/// Orthonormal basis of the strict kernel of `A - lambda I` intersected
/// with the column span of `within` (`within` orthonormal).
pub(crate) fn restricted_eigenspace(
    a: &DMatrix<f64>,
    lambda: f64,
    within: &DMatrix<f64>,
    rel_tol: f64,
) -> DMatrix<f64> {
    if within.ncols() == 0 {
        return within.clone();
    }
    let d = within.ncols();
    let small = within.transpose() * a * within;
    let factor = small.clone() - DMatrix::identity(d, d) * lambda;
    let floor = rel_tol * (1.0 + lambda.abs() + small.norm());
    let k = kernel_basis(&factor, rel_tol, floor);
    orthonormalize(&(within * k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DVector;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn sig(p: usize, q: usize) -> Signature {
        Signature::new(p, q).unwrap()
    }

    fn rotation_block(theta: f64, n: usize, i: usize, j: usize) -> DMatrix<f64> {
        let mut m = DMatrix::identity(n, n);
        m[(i, i)] = theta.cos();
        m[(j, j)] = theta.cos();
        m[(i, j)] = -theta.sin();
        m[(j, i)] = theta.sin();
        m
    }

    #[test]
    fn identity_spectrum() {
        let a = DMatrix::<f64>::identity(4, 4);
        let s = eigen_structure(&a, EIGEN_CLUSTER_TOL).unwrap();
        assert_eq!(s.clusters.len(), 1);
        assert_eq!(s.clusters[0].multiplicity, 4);
        assert!(!s.clusters[0].is_complex_pair);
        assert!((s.clusters[0].value.re - 1.0).abs() < 1e-10);
    }

    #[test]
    fn rotation_spectrum() {
        let theta = std::f64::consts::FRAC_PI_3;
        let a = rotation_block(theta, 3, 0, 1);
        let s = eigen_structure(&a, EIGEN_CLUSTER_TOL).unwrap();
        let mut pair = None;
        let mut unit = None;
        for c in &s.clusters {
            if c.is_complex_pair {
                pair = Some(c.value);
            } else {
                unit = Some(c.value.re);
            }
        }
        let pair = pair.unwrap();
        assert!((pair.re - theta.cos()).abs() < 1e-10);
        assert!((pair.im - theta.sin()).abs() < 1e-10);
        assert!((unit.unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn boost_spectrum() {
        let a = DMatrix::from_diagonal(&DVector::from_row_slice(&[2.0, 1.0, 0.5]));
        let s = eigen_structure(&a, EIGEN_CLUSTER_TOL).unwrap();
        let mut values: Vec<f64> = s.clusters.iter().map(|c| c.value.re).collect();
        values.sort_by(f64::total_cmp);
        assert!((values[0] - 0.5).abs() < 1e-10);
        assert!((values[1] - 1.0).abs() < 1e-10);
        assert!((values[2] - 2.0).abs() < 1e-10);
    }

    #[test]
    fn eigenspaces_are_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let n = 4;
            let a = DMatrix::from_fn(n, n, |_, _| rng.random::<f64>() * 2.0 - 1.0);
            let Ok(s) = eigen_structure(&a, EIGEN_CLUSTER_TOL) else { continue };
            for c in &s.clusters {
                // A maps each generalized eigenspace into itself.
                let av = &a * &c.basis;
                let proj = &c.basis * (c.basis.transpose() * &av);
                assert!((av - proj).norm() < 1e-6 * (1.0 + a.norm()));
            }
        }
    }

    fn elliptic_example() -> (Signature, DMatrix<f64>) {
        (sig(0, 3), rotation_block(0.8, 3, 0, 1))
    }

    fn split_boost(mu: f64) -> (Signature, DMatrix<f64>) {
        (
            sig(1, 2),
            DMatrix::from_diagonal(&DVector::from_row_slice(&[mu.exp(), 1.0, (-mu).exp()])),
        )
    }

    fn null_rotation() -> (Signature, DMatrix<f64>) {
        // exp of a nilpotent generator of o(1,2) in the split basis.
        let s = sig(1, 2);
        let nil = DMatrix::from_row_slice(3, 3, &[0.0, -1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0]);
        let j = s.j_mink();
        assert!((nil.transpose() * &j + &j * &nil).norm() < 1e-14);
        (s, nil.exp())
    }

    #[test]
    fn jordan_of_elliptic_element() {
        let (s, a) = elliptic_example();
        let f = jordan_chevalley(s, &a).unwrap();
        assert!((&f.semisimple - DMatrix::identity(3, 3)).norm() < 1e-8);
        assert!((&f.elliptic - &a).norm() < 1e-8);
        assert!((&f.unipotent - DMatrix::identity(3, 3)).norm() < 1e-8);
    }

    #[test]
    fn jordan_of_boost() {
        let (s, a) = split_boost(0.7);
        let f = jordan_chevalley(s, &a).unwrap();
        assert!((&f.semisimple - &a).norm() < 1e-8);
        assert!((&f.elliptic - DMatrix::identity(3, 3)).norm() < 1e-8);
        assert!((&f.unipotent - DMatrix::identity(3, 3)).norm() < 1e-8);
    }

    #[test]
    fn jordan_of_null_rotation() {
        let (s, a) = null_rotation();
        let f = jordan_chevalley(s, &a).unwrap();
        assert!((&f.unipotent - &a).norm() < 1e-8);
        assert!((&f.semisimple - DMatrix::identity(3, 3)).norm() < 1e-8);
        assert!((&f.elliptic - DMatrix::identity(3, 3)).norm() < 1e-8);
        // 3-step nilpotency of A - I.
        let d = &a - DMatrix::identity(3, 3);
        assert!((&d * &d * &d).norm() < 1e-12);
    }

    #[test]
    fn jordan_contracts_on_structured_products() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for trial in 0..60 {
            let (s, a) = random_structured_element(&mut rng, trial);
            let f = match jordan_chevalley(s, &a) {
                Ok(f) => f,
                Err(Error::IllConditioned(_)) => continue,
                Err(e) => panic!("unexpected error: {e}"),
            };
            let res = f.residuals(s, &a);
            let scale = 1.0 + a.norm_squared();
            assert!(res.product < 1e-8 * scale, "product {:.3e}", res.product);
            assert!(res.commutation < 1e-8 * scale, "commutation {:.3e}", res.commutation);
            assert!(res.membership < 1e-8 * scale, "membership {:.3e}", res.membership);
            assert!(res.unipotent_nilpotency < 1e-8 * scale);
            check_spectrum_split(&f);
        }
    }

    fn check_spectrum_split(f: &JordanFactors) {
        for e in complex_spectrum(&f.semisimple).unwrap() {
            assert!(e.im.abs() < 1e-7);
            assert!(e.re > 0.0);
        }
        for e in complex_spectrum(&f.elliptic).unwrap() {
            assert!((e.norm() - 1.0).abs() < 1e-7);
        }
        for e in complex_spectrum(&f.unipotent).unwrap() {
            assert!((e - Complex::new(1.0, 0.0)).norm() < 1e-5);
        }
    }

    fn random_structured_element(rng: &mut ChaCha8Rng, trial: usize) -> (Signature, DMatrix<f64>) {
        // Commuting elementary factors in a split O(1,2) + a rotation padding,
        // alternated with pure types.
        match trial % 4 {
            0 => {
                let (s, b) = split_boost(rng.random::<f64>() * 2.0 - 1.0);
                (s, b)
            }
            1 => {
                let (s, mut a) = null_rotation();
                if rng.random::<f64>() > 0.5 {
                    a = a.transpose();
                }
                (s, a)
            }
            2 => {
                let s = sig(0, 4);
                let a = rotation_block(rng.random::<f64>() * 3.0, 4, 0, 1)
                    * rotation_block(rng.random::<f64>() * 3.0, 4, 2, 3);
                (s, a)
            }
            _ => {
                // Boost and a commuting rotation in the Euclidean middle of O(1,3).
                let s = sig(1, 3);
                let mu: f64 = rng.random::<f64>() * 2.0 - 1.0;
                let mut a = DMatrix::identity(4, 4);
                a[(0, 0)] = mu.exp();
                a[(3, 3)] = (-mu).exp();
                let r = rotation_block(rng.random::<f64>() * 3.0, 4, 1, 2);
                (s, a * r)
            }
        }
    }

    #[test]
    fn jordan_is_idempotent_on_factors() {
        let (s, a) = split_boost(0.4);
        let f = jordan_chevalley(s, &a).unwrap();
        let again = jordan_chevalley(s, &f.semisimple).unwrap();
        assert!((&again.semisimple - &f.semisimple).norm() < 1e-8);
        assert!((&again.elliptic - DMatrix::identity(3, 3)).norm() < 1e-8);
        assert!((&again.unipotent - DMatrix::identity(3, 3)).norm() < 1e-8);

        let (s, a) = elliptic_example();
        let f = jordan_chevalley(s, &a).unwrap();
        let again = jordan_chevalley(s, &f.elliptic).unwrap();
        assert!((&again.elliptic - &f.elliptic).norm() < 1e-8);
        assert!((&again.semisimple - DMatrix::identity(3, 3)).norm() < 1e-8);

        let (s, a) = null_rotation();
        let f = jordan_chevalley(s, &a).unwrap();
        let again = jordan_chevalley(s, &f.unipotent).unwrap();
        assert!((&again.unipotent - &f.unipotent).norm() < 1e-8);
        assert!((&again.semisimple - DMatrix::identity(3, 3)).norm() < 1e-8);
    }

    #[test]
    fn one_param_classification() {
        // Skew generator in the Riemannian algebra: compact type.
        let s = sig(0, 3);
        let mut skew = DMatrix::zeros(3, 3);
        skew[(0, 1)] = -1.3;
        skew[(1, 0)] = 1.3;
        assert_eq!(classify_one_param(s, &skew).unwrap(), OneParamClass::EllipticType);

        // Split boost generator: real eigenvalue.
        let s = sig(1, 2);
        let boost = DMatrix::from_diagonal(&DVector::from_row_slice(&[0.9, 0.0, -0.9]));
        assert_eq!(
            classify_one_param(s, &boost).unwrap(),
            OneParamClass::NonImaginarySpectrum
        );

        // Nilpotent generator: imaginary (zero) spectrum, not semisimple.
        let nil = DMatrix::from_row_slice(3, 3, &[0.0, -1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0]);
        assert_eq!(classify_one_param(s, &nil).unwrap(), OneParamClass::NotSemisimple);
    }

    #[test]
    fn restricted_eigenspace_on_full_space() {
        let a = DMatrix::from_diagonal(&DVector::from_row_slice(&[2.0, 1.0, 1.0]));
        let within = DMatrix::identity(3, 3);
        let e1 = restricted_eigenspace(&a, 2.0, &within, 1e-9);
        assert_eq!(e1.ncols(), 1);
        assert!((&a * e1.column(0).clone_owned() - e1.column(0) * 2.0).norm() < 1e-12);
        let e2 = restricted_eigenspace(&a, 1.0, &within, 1e-9);
        assert_eq!(e2.ncols(), 2);
    }
}

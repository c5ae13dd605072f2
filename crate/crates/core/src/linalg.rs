//! Small dense linear-algebra helpers shared across modules.

use nalgebra::{DMatrix, DVector};

/// Outcome of a rank-revealing minimum-norm least-squares solve.
pub(crate) struct LstsqSolution {
    pub x: DVector<f64>,
    /// Euclidean norm of `A x - b`.
    pub residual: f64,
    /// Smallest ratio `sigma_i / (rel_tol * sigma_max)` over all singular
    /// values, i.e. how far the rank decision sits from the cutoff.
    /// `f64::INFINITY` when every singular value is on one side.
    pub rank_margin: f64,
}

/// Minimum-norm least-squares solution of `A x = b`. Singular values at or
/// below `rel_tol * sigma_max` are treated as exact kernel directions.
pub(crate) fn min_norm_lstsq(a: &DMatrix<f64>, b: &DVector<f64>, rel_tol: f64) -> LstsqSolution {
    assert_eq!(a.nrows(), b.len(), "lstsq shape mismatch");
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.iter().cloned().fold(0.0f64, f64::max);
    let cutoff = rel_tol * smax;

    let mut rank_margin = f64::INFINITY;
    for &s in svd.singular_values.iter() {
        if cutoff > 0.0 {
            let ratio = s / cutoff;
            let margin = if ratio >= 1.0 { ratio } else { 1.0 / ratio.max(1e-300) };
            rank_margin = rank_margin.min(margin);
        }
    }

    let x = if smax == 0.0 {
        DVector::zeros(a.ncols())
    } else {
        svd.solve(b, cutoff).expect("svd solve with nonnegative eps")
    };
    let residual = (a * &x - b).norm();
    LstsqSolution { x, residual, rank_margin }
}

/// Orthonormal basis of the kernel of `A`, as matrix columns. Directions
/// with singular value at or below `max(rel_tol * sigma_max, floor)`
/// count as kernel. The absolute `floor` keeps the decision meaningful
/// when `A` itself is numerical noise (e.g. `A_e - I` for a trivial
/// elliptic part), where a purely relative cutoff would see full rank.
pub(crate) fn kernel_basis(a: &DMatrix<f64>, rel_tol: f64, floor: f64) -> DMatrix<f64> {
    let ncols = a.ncols();
    let svd = a.clone().svd(false, true);
    let v_t = svd.v_t.expect("svd with compute_v");
    let smax = svd.singular_values.iter().cloned().fold(0.0f64, f64::max);
    let cutoff = (rel_tol * smax).max(floor);

    let mut cols: Vec<DVector<f64>> = Vec::new();
    for (i, &s) in svd.singular_values.iter().enumerate() {
        if s <= cutoff {
            cols.push(v_t.row(i).transpose());
        }
    }
    // Rows of V^t beyond the singular-value count span the rest of the
    // null space when A has more columns than rows.
    for i in svd.singular_values.len()..ncols {
        cols.push(v_t.row(i).transpose());
    }
    if cols.is_empty() {
        DMatrix::zeros(ncols, 0)
    } else {
        DMatrix::from_columns(&cols)
    }
}

/// Orthonormalizes the columns of `m` (thin QR), dropping nothing; callers
/// are responsible for passing a full-column-rank matrix.
pub(crate) fn orthonormalize(m: &DMatrix<f64>) -> DMatrix<f64> {
    if m.ncols() == 0 {
        return m.clone();
    }
    let qr = m.clone().qr();
    let q = qr.q();
    q.columns(0, m.ncols()).into_owned()
}

/// Relative residual scale `1 + ||m||_F`, used by the membership checks.
pub(crate) fn rel_scale(m: &DMatrix<f64>) -> f64 {
    1.0 + m.norm()
}

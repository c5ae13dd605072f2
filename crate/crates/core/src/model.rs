//! The projective model of Einstein's universe `Ein^{p,q}`.
//!
//! Points are null rays of the ambient form. Two stereographic charts
//! cover everything we need: `Chart::J` identifies `R^{p,q}` with the
//! complement of the lightcone of the basepoint `o = [e_0]`, and
//! `Chart::JInfinity` (the chart at infinity) is centered at `o` itself.
//! The inversion `s(x) = -2x / Q^{p,q}(x)` exchanges the two charts on
//! non-null vectors. Pulling the Euclidean metric back through the chart
//! at infinity gives the flat reference metric whose balls `B(o, R)`
//! drive all the dynamical estimates.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::forms::Signature;

/// Relative tolerance for the null-ray membership of a representative.
pub const NULL_RAY_TOL: f64 = 1e-9;

/// Coordinates smaller than this (on a unit-norm representative) are not
/// trusted to carry a sign when picking the canonical representative.
pub const SIGN_STABILITY_TOL: f64 = 1e-12;

/// Relative size under which a chart pivot coordinate counts as zero,
/// i.e. the point lies on the lightcone missed by that chart.
pub const PIVOT_TOL: f64 = 1e-12;

/// One of the two stereographic charts of `Ein^{p,q}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Chart {
    /// Chart missing the lightcone of `o`; the parabolic subgroup acts
    /// affinely in these coordinates.
    J,
    /// Chart at infinity, centered at `o`.
    JInfinity,
}

/// A point of `Ein^{p,q}`: a null projective ray, stored through its
/// canonical representative (Euclidean unit norm, first coordinate above
/// the sign-stability threshold positive). Equality of points is plain
/// coordinate comparison of representatives.
#[derive(Debug, Clone, PartialEq)]
pub struct EinPoint {
    sig: Signature,
    rep: DVector<f64>,
}

impl EinPoint {
    /// Builds a point from any nonzero representative on the null cone.
    pub fn new(sig: Signature, rep: DVector<f64>) -> Result<Self> {
        if rep.len() != sig.ambient_dim() {
            return Err(Error::DimensionMismatch { expected: sig.ambient_dim(), got: rep.len() });
        }
        let norm_sq = rep.norm_squared();
        if norm_sq == 0.0 {
            return Err(Error::ZeroVector);
        }
        let q = sig.eval_q_ambient(&rep)?;
        let residual = q.abs() / norm_sq;
        if residual > NULL_RAY_TOL {
            return Err(Error::NotNullRay { residual });
        }
        Ok(Self { sig, rep: canonicalize(rep) })
    }

    pub fn signature(&self) -> Signature {
        self.sig
    }

    /// Canonical unit-norm representative.
    pub fn rep(&self) -> &DVector<f64> {
        &self.rep
    }

    /// `|Q(rep)|` on the unit-norm representative.
    pub fn null_residual(&self) -> f64 {
        self.sig.eval_q_ambient(&self.rep).expect("stored rep has ambient length").abs()
    }

    /// Chordal distance between projective rays: `min(|a - b|, |a + b|)`
    /// on canonical representatives. Zero exactly on equal points.
    pub fn distance(&self, other: &EinPoint) -> f64 {
        let d = (&self.rep - &other.rep).norm();
        let s = (&self.rep + &other.rep).norm();
        d.min(s)
    }

    pub fn approx_eq(&self, other: &EinPoint, tol: f64) -> bool {
        self.distance(other) <= tol
    }
}

fn canonicalize(mut rep: DVector<f64>) -> DVector<f64> {
    rep /= rep.norm();
    for i in 0..rep.len() {
        if rep[i].abs() > SIGN_STABILITY_TOL {
            if rep[i] < 0.0 {
                rep = -rep;
            }
            break;
        }
    }
    rep
}

/// The basepoint `o = [e_0]`.
pub fn basepoint_o(sig: Signature) -> EinPoint {
    let mut rep = DVector::zeros(sig.ambient_dim());
    rep[0] = 1.0;
    EinPoint { sig, rep }
}

/// Stereographic embedding of `R^{p,q}` missing the lightcone of `o`:
/// `x` maps to the ray of `(-Q(x)/2, x_1, ..., x_n, 1)`.
pub fn chart_j(sig: Signature, x: &DVector<f64>) -> Result<EinPoint> {
    let n = sig.n();
    if x.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: x.len() });
    }
    let qx = sig.eval_q(x)?;
    let mut rep = DVector::zeros(n + 2);
    rep[0] = -qx / 2.0;
    rep.rows_mut(1, n).copy_from(x);
    rep[n + 1] = 1.0;
    EinPoint::new(sig, rep)
}

/// Chart at infinity: `x` maps to the ray of `(1, x_1, ..., x_n, -Q(x)/2)`.
/// Sends `0` to `o`.
pub fn chart_jo(sig: Signature, x: &DVector<f64>) -> Result<EinPoint> {
    let n = sig.n();
    if x.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: x.len() });
    }
    let qx = sig.eval_q(x)?;
    let mut rep = DVector::zeros(n + 2);
    rep[0] = 1.0;
    rep.rows_mut(1, n).copy_from(x);
    rep[n + 1] = -qx / 2.0;
    EinPoint::new(sig, rep)
}

/// Reads a point back through a chart. `None` when the point lies on the
/// lightcone the chart misses (pivot coordinate vanishing relative to the
/// unit representative) — a legitimate locus, not a failure.
pub fn inverse_chart(z: &EinPoint, chart: Chart) -> Option<DVector<f64>> {
    let n = z.sig.n();
    let pivot_index = match chart {
        Chart::J => n + 1,
        Chart::JInfinity => 0,
    };
    let pivot = z.rep[pivot_index];
    if pivot.abs() <= PIVOT_TOL {
        return None;
    }
    Some(z.rep.rows(1, n).map(|c| c / pivot))
}

/// The inversion `s(x) = -2x / Q^{p,q}(x)`, defined away from the null
/// cone of `R^{p,q}`; satisfies `chart_jo(s(x)) = chart_j(x)` as rays and
/// is an involution.
pub fn inversion_s(sig: Signature, x: &DVector<f64>) -> Result<DVector<f64>> {
    let qx = sig.eval_q(x)?;
    if qx.abs() <= 1e-12 * x.norm_squared().max(f64::MIN_POSITIVE) {
        return Err(Error::NullVector);
    }
    Ok(x * (-2.0 / qx))
}

/// Distance of the chart-at-infinity images for the flat reference metric;
/// `None` when either point is outside that chart.
pub fn rho_o_distance(z1: &EinPoint, z2: &EinPoint) -> Option<f64> {
    let x1 = inverse_chart(z1, Chart::JInfinity)?;
    let x2 = inverse_chart(z2, Chart::JInfinity)?;
    Some((x1 - x2).norm())
}

/// Distance to the basepoint for the flat reference metric.
pub fn rho_o_to_basepoint(z: &EinPoint) -> Option<f64> {
    inverse_chart(z, Chart::JInfinity).map(|x| x.norm())
}

/// Whether `z` lies in the open ball `B(o, R)` of the flat reference
/// metric. Points outside the chart at infinity are outside every ball.
pub fn ball_contains(z: &EinPoint, radius: f64) -> bool {
    debug_assert!(radius > 0.0);
    match rho_o_to_basepoint(z) {
        Some(d) => d < radius,
        None => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::basis_vector;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn sig(p: usize, q: usize) -> Signature {
        Signature::new(p, q).unwrap()
    }

    fn random_vec(rng: &mut ChaCha8Rng, n: usize) -> DVector<f64> {
        DVector::from_fn(n, |_, _| rng.random::<f64>() * 4.0 - 2.0)
    }

    #[test]
    fn basepoint_is_e0() {
        for s in [sig(0, 3), sig(1, 2)] {
            let o = basepoint_o(s);
            let mut expected = DVector::zeros(s.ambient_dim());
            expected[0] = 1.0;
            assert_eq!(o.rep(), &expected);
        }
    }

    #[test]
    fn basepoint_is_chart_jo_at_zero() {
        let s = sig(1, 2);
        let z = chart_jo(s, &DVector::zeros(3)).unwrap();
        assert!(z.approx_eq(&basepoint_o(s), 1e-15));
    }

    #[test]
    fn chart_j_at_zero_is_last_basis_ray() {
        let s = sig(0, 3);
        let z = chart_j(s, &DVector::zeros(3)).unwrap();
        assert!((z.rep() - basis_vector(5, 4)).norm() < 1e-15);
    }

    #[test]
    fn chart_j_displayed_column() {
        let s = sig(0, 3);
        let z = chart_j(s, &basis_vector(3, 0)).unwrap();
        let raw = DVector::from_row_slice(&[-0.5, 1.0, 0.0, 0.0, 1.0]);
        let expected = EinPoint::new(s, raw).unwrap();
        assert!(z.approx_eq(&expected, 1e-15));
    }

    #[test]
    fn chart_jo_displayed_column() {
        let s = sig(0, 3);
        let z = chart_jo(s, &basis_vector(3, 0)).unwrap();
        let raw = DVector::from_row_slice(&[1.0, 1.0, 0.0, 0.0, -0.5]);
        let expected = EinPoint::new(s, raw).unwrap();
        assert!(z.approx_eq(&expected, 1e-15));
    }

    #[test]
    fn charts_land_on_null_cone() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for s in [sig(0, 3), sig(1, 2), sig(2, 2)] {
            for _ in 0..100 {
                let x = random_vec(&mut rng, s.n());
                assert!(chart_j(s, &x).unwrap().null_residual() < 1e-12);
                assert!(chart_jo(s, &x).unwrap().null_residual() < 1e-12);
            }
        }
    }

    #[test]
    fn chart_round_trips() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for s in [sig(0, 3), sig(1, 2)] {
            for _ in 0..100 {
                let x = random_vec(&mut rng, s.n());
                let back = inverse_chart(&chart_j(s, &x).unwrap(), Chart::J).unwrap();
                assert!((&back - &x).norm() < 1e-10 * (1.0 + x.norm()));
                let back = inverse_chart(&chart_jo(s, &x).unwrap(), Chart::JInfinity).unwrap();
                assert!((&back - &x).norm() < 1e-10 * (1.0 + x.norm()));
            }
        }
    }

    #[test]
    fn basepoint_outside_chart_j() {
        let s = sig(0, 3);
        assert!(inverse_chart(&basepoint_o(s), Chart::J).is_none());
        let zero = inverse_chart(&basepoint_o(s), Chart::JInfinity).unwrap();
        assert!(zero.norm() == 0.0);
    }

    #[test]
    fn inversion_examples() {
        let s = sig(0, 3);
        let e1 = basis_vector(3, 0);
        let sx = inversion_s(s, &e1).unwrap();
        assert!((&sx - DVector::from_row_slice(&[-2.0, 0.0, 0.0])).norm() < 1e-15);
        // Cross-check the defining chart identity on this input.
        let lhs = chart_jo(s, &sx).unwrap();
        let rhs = chart_j(s, &e1).unwrap();
        assert!(lhs.approx_eq(&rhs, 1e-12));

        let l = sig(1, 2);
        assert!(matches!(inversion_s(l, &basis_vector(3, 0)), Err(Error::NullVector)));
    }

    #[test]
    fn inversion_is_involutive() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for s in [sig(0, 3), sig(1, 2)] {
            let mut done = 0;
            while done < 100 {
                let x = random_vec(&mut rng, s.n());
                if s.eval_q(&x).unwrap().abs() < 1e-3 * x.norm_squared() {
                    continue;
                }
                let ssx = inversion_s(s, &inversion_s(s, &x).unwrap()).unwrap();
                assert!((&ssx - &x).norm() < 1e-9 * (1.0 + x.norm()));
                done += 1;
            }
        }
    }

    #[test]
    fn chart_compatibility_via_inversion() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for s in [sig(0, 3), sig(1, 2), sig(1, 3)] {
            let mut done = 0;
            while done < 100 {
                let x = random_vec(&mut rng, s.n());
                if s.eval_q(&x).unwrap().abs() < 1e-3 * x.norm_squared() {
                    continue;
                }
                let lhs = chart_jo(s, &inversion_s(s, &x).unwrap()).unwrap();
                let rhs = chart_j(s, &x).unwrap();
                assert!(lhs.distance(&rhs) <= 1e-10);
                done += 1;
            }
        }
    }

    #[test]
    fn charts_injective_on_samples() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        let s = sig(1, 2);
        let mut points: Vec<(DVector<f64>, EinPoint)> = Vec::new();
        for _ in 0..1000 {
            let x = random_vec(&mut rng, 3);
            let z = chart_jo(s, &x).unwrap();
            for (y, w) in &points {
                if (y - &x).norm() > 1e-6 {
                    assert!(z.distance(w) > 0.0);
                }
            }
            if points.len() < 40 {
                points.push((x, z));
            }
        }
    }

    #[test]
    fn rho_distance_examples() {
        let s = sig(0, 3);
        let o = basepoint_o(s);
        assert_eq!(rho_o_distance(&o, &o).unwrap(), 0.0);
        let z = chart_jo(s, &basis_vector(3, 0)).unwrap();
        assert!((rho_o_distance(&o, &z).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rho_triangle_inequality() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let s = sig(1, 2);
        for _ in 0..100 {
            let a = chart_jo(s, &random_vec(&mut rng, 3)).unwrap();
            let b = chart_jo(s, &random_vec(&mut rng, 3)).unwrap();
            let c = chart_jo(s, &random_vec(&mut rng, 3)).unwrap();
            let ab = rho_o_distance(&a, &b).unwrap();
            let bc = rho_o_distance(&b, &c).unwrap();
            let ac = rho_o_distance(&a, &c).unwrap();
            assert!(ac <= ab + bc + 1e-12);
        }
    }

    #[test]
    fn ball_membership() {
        let s = sig(0, 3);
        let o = basepoint_o(s);
        assert!(ball_contains(&o, 1e-6));
        let z = chart_jo(s, &basis_vector(3, 0)).unwrap();
        assert!(!ball_contains(&z, 1.0));
        assert!(ball_contains(&z, 1.01));
        // A point on the lightcone of the antipode is outside every ball:
        // chart_j(0) has vanishing first coordinate.
        let antipode = chart_j(s, &DVector::zeros(3)).unwrap();
        assert!(!ball_contains(&antipode, 1e9));
    }
}

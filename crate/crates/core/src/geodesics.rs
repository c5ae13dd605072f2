//! Conformal geodesics of the flat model, their segments and lengths, and
//! developments of group-valued curves.
//!
//! Every geodesic through the basepoint is evaluated projectively through
//! a homogeneous column that is quadratic in the parameter,
//! `rep(s) = c0 + s c1 + s^2 c2`, so poles of the affine chart formulas
//! are harmless. Two constructions are supported:
//!
//! * from a lowest-grade algebra generator with vector `w` (timelike,
//!   spacelike or lightlike by the causal type of `w`): the column is
//!   `(1, s w, -s^2 Q(w)/2)`, a straight line through the origin of the
//!   chart at infinity;
//! * from chart data `(v, v0)` with `v` non-null: the curve whose
//!   chart-at-infinity coordinates are `2s (v + s v0) / Q(v + s v0)`,
//!   with homogeneous column `(Q(v + s v0)/2, s (v + s v0), -s^2)`.
//!
//! Both are orbits `s -> [exp(s xi) e_0]` for a generator `xi` conjugate
//! into the lowest graded piece by an element of the stabilizer; the
//! conjugating element is exposed by [`ConformalGeodesic::generator`].

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::forms::{CausalType, Signature};
use crate::liealg::{adjoint, alg_nminus, exp_field, gen_nplus, MobiusElement, MobiusField};
use crate::model::{EinPoint, PIVOT_TOL};
use crate::parabolic::{act_on_ein, to_affine};

/// Default number of samples used to certify segment containment.
pub const CONTAINMENT_SAMPLES: usize = 512;

/// Adaptive quadrature settings for segment lengths.
#[derive(Debug, Clone, Copy)]
pub struct QuadratureConfig {
    pub abs_tol: f64,
    pub max_depth: u32,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig { abs_tol: 1e-9, max_depth: 30 }
    }
}

/// Length of a segment together with the quadrature error estimate.
#[derive(Debug, Clone, Copy)]
pub struct LengthEstimate {
    pub length: f64,
    pub error_estimate: f64,
}

/// How a geodesic was specified.
#[derive(Debug, Clone)]
pub enum GeodesicForm {
    /// Chart data `(v, v0)`, `v` timelike or spacelike.
    Chart { v: DVector<f64>, v0: DVector<f64> },
    /// A generator conjugated into the lowest graded piece, together with
    /// the conjugating stabilizer element.
    Nminus { xi: MobiusField, conjugator: MobiusElement },
}

/// A parametrized conformal geodesic through the basepoint `o`.
#[derive(Debug, Clone)]
pub struct ConformalGeodesic {
    sig: Signature,
    kind: CausalType,
    form: GeodesicForm,
    c0: DVector<f64>,
    c1: DVector<f64>,
    c2: DVector<f64>,
}

impl ConformalGeodesic {
    pub fn signature(&self) -> Signature {
        self.sig
    }

    /// Causal type shared by every tangent vector of the curve.
    pub fn kind(&self) -> CausalType {
        self.kind
    }

    pub fn form(&self) -> &GeodesicForm {
        &self.form
    }

    /// Homogeneous representative at parameter `s` (never the zero vector).
    pub fn column(&self, s: f64) -> DVector<f64> {
        &self.c0 + &self.c1 * s + &self.c2 * (s * s)
    }

    /// The point at parameter `s`; every geodesic built here starts at `o`.
    pub fn eval(&self, s: f64) -> Result<EinPoint> {
        EinPoint::new(self.sig, self.column(s))
    }

    /// Chart-at-infinity coordinates at `s`, when the point is in chart.
    pub fn chart_infinity_coords(&self, s: f64) -> Option<DVector<f64>> {
        let col = self.column(s);
        let pivot = col[0];
        if pivot.abs() <= PIVOT_TOL * col.norm() {
            return None;
        }
        Some(col.rows(1, self.sig.n()).map(|c| c / pivot))
    }

    /// Euclidean speed of the chart-at-infinity coordinate curve at `s`.
    pub fn chart_speed(&self, s: f64) -> Option<f64> {
        let col = self.column(s);
        let pivot = col[0];
        if pivot.abs() <= PIVOT_TOL * col.norm() {
            return None;
        }
        let dcol = &self.c1 + &self.c2 * (2.0 * s);
        let n = self.sig.n();
        let mid = col.rows(1, n);
        let dmid = dcol.rows(1, n);
        // d/ds (mid / pivot) = (mid' pivot - mid pivot') / pivot^2
        let v = (dmid * pivot - mid * dcol[0]) / (pivot * pivot);
        Some(v.norm())
    }

    /// A generator `xi` with `[exp(s xi) e_0] = eval(s)` and the stabilizer
    /// element conjugating it into the lowest graded piece.
    pub fn generator(&self) -> Result<(MobiusField, MobiusElement)> {
        match &self.form {
            GeodesicForm::Nminus { xi, conjugator } => Ok((xi.clone(), conjugator.clone())),
            GeodesicForm::Chart { v, v0 } => {
                let qv = self.sig.eval_q(v)?;
                let w = v * (2.0 / qv);
                let base = alg_nminus(self.sig, &w)?;
                let conjugator = gen_nplus(self.sig, &(-v0))?;
                let xi = adjoint(&conjugator, &base)?;
                Ok((xi, conjugator))
            }
        }
    }
}

/// Geodesic through `o` generated by a lowest-grade algebra element; its
/// chart-at-infinity trace is the straight line `s -> s w`.
pub fn geodesic_from_o(sig: Signature, xi: &MobiusField) -> Result<ConformalGeodesic> {
    let parts = crate::liealg::grade_decompose(xi)?;
    let off = (parts.a.powi(2) + parts.m.norm_squared() + parts.xi_plus.norm_squared()).sqrt();
    if off > 1e-10 * (1.0 + xi.mat().norm()) {
        return Err(Error::NotNminus { residual: off });
    }
    let w = parts.xi_minus;
    let kind = sig.causal_type(&w, 1e-12);
    let n = sig.n();
    let mut c1 = DVector::zeros(n + 2);
    c1.rows_mut(1, n).copy_from(&w);
    let mut c2 = DVector::zeros(n + 2);
    c2[n + 1] = -sig.eval_q(&w)? / 2.0;
    let mut c0 = DVector::zeros(n + 2);
    c0[0] = 1.0;
    Ok(ConformalGeodesic {
        sig,
        kind,
        form: GeodesicForm::Nminus { xi: xi.clone(), conjugator: MobiusElement::identity(sig) },
        c0,
        c1,
        c2,
    })
}

/// Shorthand: the lightlike geodesic `s -> jo(s u)` for a lightlike `u`.
pub fn lightlike_geodesic(sig: Signature, u: &DVector<f64>) -> Result<ConformalGeodesic> {
    if sig.causal_type(u, 1e-9) != CausalType::Lightlike {
        return Err(Error::InvalidInput("direction is not lightlike".into()));
    }
    geodesic_from_o(sig, &alg_nminus(sig, u)?)
}

/// Timelike or spacelike geodesic from chart data: the curve whose
/// chart-at-infinity coordinates are `2s (v + s v0) / Q(v + s v0)`.
pub fn geodesic_chart(
    sig: Signature,
    v: &DVector<f64>,
    v0: &DVector<f64>,
) -> Result<ConformalGeodesic> {
    let kind = sig.causal_type(v, 1e-12);
    if !matches!(kind, CausalType::Timelike | CausalType::Spacelike) {
        return Err(Error::InvalidInput(
            "chart data needs a timelike or spacelike direction vector".into(),
        ));
    }
    let n = sig.n();
    if v0.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: v0.len() });
    }
    let mut c0 = DVector::zeros(n + 2);
    c0[0] = sig.eval_q(v)? / 2.0;
    let mut c1 = DVector::zeros(n + 2);
    c1[0] = sig.bilinear(v, v0)?;
    c1.rows_mut(1, n).copy_from(v);
    let mut c2 = DVector::zeros(n + 2);
    c2[0] = sig.eval_q(v0)? / 2.0;
    c2.rows_mut(1, n).copy_from(v0);
    c2[n + 1] = -1.0;
    Ok(ConformalGeodesic { sig, kind, form: GeodesicForm::Chart { v: v.clone(), v0: v0.clone() }, c0, c1, c2 })
}

/// Geodesic through `o` with generator conjugated by a stabilizer element:
/// the curve `s -> [c exp(s xi_0) e_0]`.
pub fn geodesic_conjugated(
    sig: Signature,
    xi0: &MobiusField,
    conjugator: &MobiusElement,
) -> Result<ConformalGeodesic> {
    to_affine(conjugator)?; // fails with NotInP unless it fixes the basepoint ray
    let base = geodesic_from_o(sig, xi0)?;
    let xi = adjoint(conjugator, xi0)?;
    let m = conjugator.mat();
    Ok(ConformalGeodesic {
        sig,
        kind: base.kind,
        form: GeodesicForm::Nminus { xi, conjugator: conjugator.clone() },
        c0: m * base.c0,
        c1: m * base.c1,
        c2: m * base.c2,
    })
}

/// A geodesic segment, the image of `[0, s_end]`.
#[derive(Debug, Clone)]
pub struct GeodesicSegment {
    pub geo: ConformalGeodesic,
    pub s_end: f64,
}

impl GeodesicSegment {
    pub fn new(geo: ConformalGeodesic, s_end: f64) -> Result<Self> {
        if !(s_end > 0.0) {
            return Err(Error::InvalidInput("segment parameter range must have s_end > 0".into()));
        }
        Ok(Self { geo, s_end })
    }
}

/// Length of the segment for the flat reference metric at `o`, by adaptive
/// Simpson quadrature of the chart-coordinate speed. Fails with
/// `OutsideChart` when a sample of the segment leaves the chart at
/// infinity.
pub fn segment_length_l0(seg: &GeodesicSegment, quad: &QuadratureConfig) -> Result<LengthEstimate> {
    let speed = |s: f64| seg.geo.chart_speed(s).ok_or(Error::OutsideChart);
    // Domain pre-check at dense samples; the quadrature then refines.
    for i in 0..=CONTAINMENT_SAMPLES {
        let s = seg.s_end * (i as f64) / (CONTAINMENT_SAMPLES as f64);
        speed(s)?;
    }
    adaptive_simpson(&speed, 0.0, seg.s_end, quad.abs_tol, quad.max_depth)
}

fn adaptive_simpson<F>(f: &F, a: f64, b: f64, tol: f64, max_depth: u32) -> Result<LengthEstimate>
where
    F: Fn(f64) -> Result<f64>,
{
    let fa = f(a)?;
    let fb = f(b)?;
    let m = 0.5 * (a + b);
    let fm = f(m)?;
    let whole = simpson(a, b, fa, fm, fb);
    let (value, err) = simpson_rec(f, a, b, fa, fm, fb, whole, tol, max_depth)?;
    Ok(LengthEstimate { length: value, error_estimate: err })
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn simpson_rec<F>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Result<(f64, f64)>
where
    F: Fn(f64) -> Result<f64>,
{
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm)?;
    let frm = f(rm)?;
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return Ok((left + right + delta / 15.0, delta.abs() / 15.0));
    }
    let (lv, le) = simpson_rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)?;
    let (rv, re) = simpson_rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)?;
    Ok((lv + rv, le + re))
}

/// Certifies that the whole segment stays inside the ball `B(o, radius)`
/// of the flat reference metric: dense sampling plus derivative-bound
/// refinement on intervals where the sampled margin is thinner than the
/// possible excursion. Conservative: `false` means "not certified".
pub fn segment_certified_in_ball(seg: &GeodesicSegment, radius: f64, samples: usize) -> bool {
    let samples = samples.max(8);
    let geo = &seg.geo;
    let step = seg.s_end / samples as f64;
    let probe = |s: f64| -> Option<(f64, f64)> {
        let d = geo.chart_infinity_coords(s)?.norm();
        let v = geo.chart_speed(s)?;
        Some((d, v))
    };
    let mut prev = match probe(0.0) {
        Some(p) => p,
        None => return false,
    };
    if prev.0 >= radius {
        return false;
    }
    for i in 1..=samples {
        let s1 = step * i as f64;
        let cur = match probe(s1) {
            Some(p) => p,
            None => return false,
        };
        if cur.0 >= radius {
            return false;
        }
        if !interval_certified(&probe, s1 - step, s1, prev, cur, radius, 24) {
            return false;
        }
        prev = cur;
    }
    true
}

fn interval_certified<F>(
    probe: &F,
    s0: f64,
    s1: f64,
    p0: (f64, f64),
    p1: (f64, f64),
    radius: f64,
    depth: u32,
) -> bool
where
    F: Fn(f64) -> Option<(f64, f64)>,
{
    let h = s1 - s0;
    // The chart speed of a rational-quadratic curve varies smoothly; a
    // slack factor over the endpoint speeds bounds the excursion.
    let vbound = 1.5 * p0.1.max(p1.1) + 1e-12;
    let excursion = vbound * h * 0.5;
    if p0.0 + excursion < radius && p1.0 + excursion < radius {
        return true;
    }
    if depth == 0 {
        return false;
    }
    let sm = 0.5 * (s0 + s1);
    let pm = match probe(sm) {
        Some(p) => p,
        None => return false,
    };
    if pm.0 >= radius {
        return false;
    }
    interval_certified(probe, s0, sm, p0, pm, radius, depth - 1)
        && interval_certified(probe, sm, s1, pm, p1, radius, depth - 1)
}

/// Development of a group-valued lift: left translation taking the value
/// at `t0` to the identity, `t -> lift(t0)^{-1} lift(t)`.
pub fn develop_flat<F>(lift: F, t0: f64) -> Result<impl Fn(f64) -> Result<MobiusElement>>
where
    F: Fn(f64) -> Result<MobiusElement>,
{
    let base_inv = lift(t0)?.inverse();
    Ok(move |t: f64| base_inv.compose(&lift(t)?))
}

/// Base development: the developed curve pushed to `Ein^{p,q}`.
pub fn project_development(dev: &MobiusElement) -> Result<EinPoint> {
    crate::liealg::project_to_ein(dev)
}

/// Maximum deviation, over the parameter grid, between the development of
/// the flow-translated geodesic and the flow applied to the developed
/// geodesic. Both sides coincide in the flat model up to rounding.
pub fn holonomy_equivariance_check(
    xp: &MobiusField,
    geo: &ConformalGeodesic,
    t: f64,
    s_grid: &[f64],
) -> Result<f64> {
    crate::parabolic::field_to_affine(xp)?; // demands xp tangent to the stabilizer
    let h = exp_field(xp, t)?;
    let h_inv = h.inverse();
    let (xi, _) = geo.generator()?;
    let lift = |s: f64| -> Result<MobiusElement> {
        h.compose(&exp_field(&xi, s)?)?.compose(&h_inv)
    };
    let dev = develop_flat(lift, 0.0)?;
    let mut worst: f64 = 0.0;
    for &s in s_grid {
        let lhs = project_development(&dev(s)?)?;
        let rhs = act_on_ein(&h, &geo.eval(s)?)?;
        worst = worst.max(lhs.distance(&rhs));
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::basis_vector;
    use crate::liealg::{alg_nplus, alg_r, gen_diag};
    use crate::model::{basepoint_o, chart_jo};
    use crate::parabolic::{from_affine, AffineConformalMap};
    use nalgebra::DMatrix;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn sig(p: usize, q: usize) -> Signature {
        Signature::new(p, q).unwrap()
    }

    #[test]
    fn zero_generator_gives_constant_curve() {
        let s = sig(0, 3);
        let geo = geodesic_from_o(s, &alg_nminus(s, &DVector::zeros(3)).unwrap()).unwrap();
        let o = basepoint_o(s);
        for t in [0.0, 0.5, 3.0] {
            assert!(geo.eval(t).unwrap().approx_eq(&o, 1e-15));
        }
    }

    #[test]
    fn from_o_matches_projective_column() {
        let s = sig(0, 3);
        let w = basis_vector(3, 0);
        let geo = geodesic_from_o(s, &alg_nminus(s, &w).unwrap()).unwrap();
        assert_eq!(geo.kind(), CausalType::Spacelike);
        for t in [0.2, 1.0, 2.5] {
            // Column display (1, t w, -t^2 Q(w)/2) and the group orbit agree.
            let via_exp = exp_field(&alg_nminus(s, &w).unwrap(), t).unwrap();
            let orbit = crate::liealg::project_to_ein(&via_exp).unwrap();
            assert!(geo.eval(t).unwrap().approx_eq(&orbit, 1e-12));
            let col = geo.column(t);
            assert_eq!(col[0], 1.0);
            assert!((col.rows(1, 3).clone_owned() - &w * t).norm() < 1e-15);
            assert!((col[4] - (-t * t * 0.5)).abs() < 1e-15);
        }
    }

    #[test]
    fn every_from_o_geodesic_starts_at_o() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for s in [sig(0, 3), sig(1, 2)] {
            for _ in 0..20 {
                let v = DVector::from_fn(s.n(), |_, _| rng.random::<f64>() * 2.0 - 1.0);
                let o = basepoint_o(s);
                if let Ok(geo) = geodesic_chart(s, &v, &DVector::zeros(s.n())) {
                    assert!(geo.eval(0.0).unwrap().approx_eq(&o, 1e-12));
                }
                let geo = geodesic_from_o(s, &alg_nminus(s, &v).unwrap()).unwrap();
                assert!(geo.eval(0.0).unwrap().approx_eq(&o, 1e-12));
            }
        }
    }

    #[test]
    fn chart_form_displayed_value() {
        let s = sig(0, 3);
        let geo = geodesic_chart(s, &basis_vector(3, 0), &DVector::zeros(3)).unwrap();
        // 2 s v / Q(v) at s = 1 is 2 e_1.
        let expected = chart_jo(s, &(basis_vector(3, 0) * 2.0)).unwrap();
        assert!(geo.eval(1.0).unwrap().approx_eq(&expected, 1e-12));
    }

    #[test]
    fn lightlike_curve_is_chart_line() {
        let s = sig(1, 2);
        let u = basis_vector(3, 0);
        let geo = lightlike_geodesic(s, &u).unwrap();
        assert_eq!(geo.kind(), CausalType::Lightlike);
        for t in [0.1, 0.7, 2.0] {
            let expected = chart_jo(s, &(&u * t)).unwrap();
            assert!(geo.eval(t).unwrap().approx_eq(&expected, 1e-13));
        }
        let spacelike = basis_vector(3, 1);
        assert!(lightlike_geodesic(s, &spacelike).is_err());
    }

    #[test]
    fn rejects_generators_outside_lowest_grade() {
        let s = sig(1, 2);
        let up = alg_nplus(s, &basis_vector(3, 0)).unwrap();
        assert!(matches!(geodesic_from_o(s, &up), Err(Error::NotNminus { .. })));
        let r = alg_r(s, 1.0, &DMatrix::zeros(3, 3)).unwrap();
        assert!(matches!(geodesic_from_o(s, &r), Err(Error::NotNminus { .. })));
    }

    #[test]
    fn chart_generator_reproduces_curve() {
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        for s in [sig(0, 3), sig(1, 2)] {
            let mut done = 0;
            while done < 15 {
                let v = DVector::from_fn(s.n(), |_, _| rng.random::<f64>() * 2.0 - 1.0);
                if s.eval_q(&v).unwrap().abs() < 0.1 * v.norm_squared() {
                    continue;
                }
                let v0 = DVector::from_fn(s.n(), |_, _| rng.random::<f64>() * 2.0 - 1.0);
                let geo = geodesic_chart(s, &v, &v0).unwrap();
                let (xi, _) = geo.generator().unwrap();
                for t in [0.3, 1.1] {
                    let orbit =
                        crate::liealg::project_to_ein(&exp_field(&xi, t).unwrap()).unwrap();
                    assert!(
                        geo.eval(t).unwrap().approx_eq(&orbit, 1e-10),
                        "mismatch at t={t}"
                    );
                }
                done += 1;
            }
        }
    }

    #[test]
    fn conjugated_geodesic_is_translate() {
        let s = sig(0, 3);
        let w = basis_vector(3, 1);
        let xi0 = alg_nminus(s, &w).unwrap();
        let c = from_affine(
            &AffineConformalMap::new(
                s,
                1.7,
                DMatrix::identity(3, 3),
                DVector::from_row_slice(&[0.3, 0.0, -0.2]),
            )
            .unwrap(),
        )
        .unwrap();
        let geo = geodesic_conjugated(s, &xi0, &c).unwrap();
        let base = geodesic_from_o(s, &xi0).unwrap();
        for t in [0.0, 0.4, 1.5] {
            let expected = act_on_ein(&c, &base.eval(t).unwrap()).unwrap();
            assert!(geo.eval(t).unwrap().approx_eq(&expected, 1e-12));
        }
    }

    #[test]
    fn unit_lightlike_segment_has_unit_length() {
        let s = sig(1, 2);
        // Euclidean-unit lightlike direction in the split basis.
        let u = DVector::from_row_slice(&[1.0, 0.0, 0.0]);
        let geo = lightlike_geodesic(s, &u).unwrap();
        let seg = GeodesicSegment::new(geo, 1.0).unwrap();
        let l = segment_length_l0(&seg, &QuadratureConfig::default()).unwrap();
        assert!((l.length - 1.0).abs() < 1e-9 + l.error_estimate);
    }

    #[test]
    fn spacelike_unit_segment_has_length_two() {
        let s = sig(0, 3);
        let geo = geodesic_chart(s, &basis_vector(3, 0), &DVector::zeros(3)).unwrap();
        let seg = GeodesicSegment::new(geo, 1.0).unwrap();
        let l = segment_length_l0(&seg, &QuadratureConfig::default()).unwrap();
        assert!((l.length - 2.0).abs() < 1e-9 + l.error_estimate);
    }

    #[test]
    fn length_fails_outside_chart() {
        // The chart curve of (v, 0) passes through the pole where
        // Q(v + s v0) changes sign when v0 pushes v across the null cone.
        let s = sig(1, 2);
        let v = DVector::from_row_slice(&[1.0, 0.0, 1.0]); // Q = 2
        let v0 = DVector::from_row_slice(&[0.0, 0.0, -1.0]); // Q(v + s v0) = 2 - 2s
        let geo = geodesic_chart(s, &v, &v0).unwrap();
        let seg = GeodesicSegment::new(geo, 2.0).unwrap();
        assert!(matches!(
            segment_length_l0(&seg, &QuadratureConfig::default()),
            Err(Error::OutsideChart)
        ));
    }

    #[test]
    fn containment_certificate() {
        let s = sig(0, 3);
        let geo = geodesic_chart(s, &basis_vector(3, 0), &DVector::zeros(3)).unwrap();
        // Chart trace is 2 s e_1: inside B(o, 1) up to s < 0.5.
        let seg = GeodesicSegment::new(geo.clone(), 0.4).unwrap();
        assert!(segment_certified_in_ball(&seg, 1.0, 128));
        let seg = GeodesicSegment::new(geo, 0.6).unwrap();
        assert!(!segment_certified_in_ball(&seg, 1.0, 128));
    }

    #[test]
    fn development_of_constant_lift_is_identity() {
        let s = sig(1, 2);
        let g = gen_nplus(s, &basis_vector(3, 1)).unwrap();
        let lift = move |_t: f64| Ok(g.clone());
        let dev = develop_flat(lift, 0.0).unwrap();
        for t in [0.0, 1.0, -2.0] {
            let d = dev(t).unwrap();
            assert!((d.mat() - DMatrix::identity(5, 5)).norm() < 1e-12);
        }
    }

    #[test]
    fn development_of_one_parameter_group() {
        let s = sig(0, 3);
        let xi = alg_nminus(s, &basis_vector(3, 0)).unwrap();
        let xi2 = xi.clone();
        let lift = move |t: f64| exp_field(&xi2, t);
        let t0 = 0.7;
        let dev = develop_flat(lift, t0).unwrap();
        for t in [0.0, 0.4, 1.9] {
            let expected = exp_field(&xi, t - t0).unwrap();
            assert!((dev(t).unwrap().mat() - expected.mat()).norm() < 1e-12);
        }
        // Projected development of the lowest-grade flow is the geodesic.
        let dev0 = develop_flat({ let xi = xi.clone(); move |t: f64| exp_field(&xi, t) }, 0.0).unwrap();
        let geo = geodesic_from_o(s, &xi).unwrap();
        for t in [0.3, 1.2] {
            let p = project_development(&dev0(t).unwrap()).unwrap();
            assert!(p.approx_eq(&geo.eval(t).unwrap(), 1e-12));
        }
    }

    #[test]
    fn equivariance_residual_is_tiny() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        let s = sig(0, 3);
        let grid: Vec<f64> = (0..=20).map(|i| i as f64 / 20.0).collect();
        let geo = geodesic_chart(s, &basis_vector(3, 0), &DVector::zeros(3)).unwrap();

        // t = 0 is the identity: residual vanishes identically.
        let skew = DMatrix::zeros(3, 3);
        let xp = crate::parabolic::from_affine_field(
            &crate::parabolic::AffineConformalField::new(s, 0.3, skew, basis_vector(3, 1)).unwrap(),
        )
        .unwrap();
        assert!(holonomy_equivariance_check(&xp, &geo, 0.0, &grid).unwrap() < 1e-14);

        for _ in 0..5 {
            let mut sk = DMatrix::zeros(3, 3);
            for i in 0..3 {
                for j in 0..i {
                    let v = rng.random::<f64>() - 0.5;
                    sk[(i, j)] = v;
                    sk[(j, i)] = -v;
                }
            }
            let t = DVector::from_fn(3, |_, _| rng.random::<f64>() - 0.5);
            let f = crate::parabolic::AffineConformalField::new(
                s,
                rng.random::<f64>() - 0.5,
                sk,
                t,
            )
            .unwrap();
            let xp = crate::parabolic::from_affine_field(&f).unwrap();
            let res = holonomy_equivariance_check(&xp, &geo, 1.0, &grid).unwrap();
            assert!(res <= 1e-9, "residual {res:.3e}");
        }
    }

    #[test]
    fn fd_tangents_match_kind() {
        let mut rng = ChaCha8Rng::seed_from_u64(47);
        for s in [sig(0, 3), sig(1, 2), sig(2, 2)] {
            let mut done = 0;
            while done < 6 {
                let v = DVector::from_fn(s.n(), |_, _| rng.random::<f64>() * 2.0 - 1.0);
                if matches!(s.causal_type(&v, 1e-6), CausalType::Lightlike | CausalType::Zero) {
                    continue;
                }
                let v0 = DVector::from_fn(s.n(), |_, _| (rng.random::<f64>() - 0.5) * 0.4);
                let geo = geodesic_chart(s, &v, &v0).unwrap();
                let mut checked = 0;
                let mut param = 0.03;
                while checked < 20 && param < 3.0 {
                    param += 0.11;
                    let h = 1e-5;
                    let (Some(a), Some(b)) = (
                        geo.chart_infinity_coords(param - h),
                        geo.chart_infinity_coords(param + h),
                    ) else {
                        continue;
                    };
                    let tangent = (b - a) / (2.0 * h);
                    // Skip near the chart poles where the speed blows up.
                    if tangent.norm() > 1e3 {
                        continue;
                    }
                    assert_eq!(s.causal_type(&tangent, 1e-6), geo.kind());
                    checked += 1;
                }
                assert!(checked >= 10, "not enough usable parameters");
                done += 1;
            }
        }
    }

    #[test]
    fn fixed_line_law_for_eigendirections() {
        // A diagonal stabilizer element whose linear part stretches u by
        // the square of its scale fixes the lightlike curve pointwise.
        let s = sig(1, 2);
        let u = basis_vector(3, 0);
        let lam: f64 = 1.4;
        let a = DMatrix::from_diagonal(&DVector::from_row_slice(&[lam, 1.0, 1.0 / lam]));
        let g = gen_diag(s, lam, &a).unwrap();
        let geo = lightlike_geodesic(s, &u).unwrap();
        for t in [0.2, 0.9, 5.0] {
            let z = geo.eval(t).unwrap();
            assert!(act_on_ein(&g, &z).unwrap().approx_eq(&z, 1e-12));
        }
    }

    #[test]
    fn translation_reparametrizes_lightlike_curves() {
        // Translation by T with <T,u> = -1 acts as s -> s/(1+s).
        let s = sig(1, 2);
        let u = basis_vector(3, 0);
        let t_vec = -basis_vector(3, 2);
        assert!((s.bilinear(&t_vec, &u).unwrap() + 1.0).abs() < 1e-15);
        let h = gen_nplus(s, &t_vec).unwrap();
        let geo = lightlike_geodesic(s, &u).unwrap();
        for k in 1..=10i64 {
            let hk = h.powi(k).unwrap();
            for i in 1..=10 {
                let sp = i as f64 / 10.0;
                let lhs = act_on_ein(&hk, &geo.eval(sp).unwrap()).unwrap();
                let rhs = geo.eval(sp / (1.0 + k as f64 * sp)).unwrap();
                assert!(lhs.distance(&rhs) <= 1e-9, "k={k} s={sp}");
            }
        }
    }

    #[test]
    fn segment_lengths_respect_ball_bound() {
        // Monte-Carlo spot check of the 8 n R bound for certified segments.
        let mut rng = ChaCha8Rng::seed_from_u64(53);
        let quad = QuadratureConfig::default();
        for s in [sig(0, 3), sig(1, 2)] {
            let radius = 1.0;
            let bound = 8.0 * s.n() as f64 * radius;
            let mut kept = 0;
            while kept < 60 {
                let v = DVector::from_fn(s.n(), |_, _| rng.random::<f64>() * 2.0 - 1.0);
                if matches!(s.causal_type(&v, 1e-9), CausalType::Lightlike | CausalType::Zero) {
                    continue;
                }
                let v0 = DVector::from_fn(s.n(), |_, _| rng.random::<f64>() * 2.0 - 1.0);
                let geo = geodesic_chart(s, &v, &v0).unwrap();
                let seg = GeodesicSegment::new(geo, rng.random::<f64>() * 2.0 + 0.05).unwrap();
                if !segment_certified_in_ball(&seg, radius, 256) {
                    continue;
                }
                let l = segment_length_l0(&seg, &quad).unwrap();
                assert!(l.length <= bound + 1e-6, "length {} exceeds {}", l.length, bound);
                kept += 1;
            }
        }
    }
}

//! Reproducible desk-scale experiments for the quantitative statements
//! behind the decision procedures: the segment-length bound, the
//! trap/collapse dynamics of translation-type flows, the lightlike
//! reparametrization law, and semi-complete contraction.
//!
//! Every experiment is a pure function of `(seed, parameters)`. Sampling
//! goes through a counter-based stream-cipher generator seeded
//! explicitly, never through platform randomness, so reports are
//! byte-identical across runs of the same build.

use std::collections::BTreeMap;

use nalgebra::DVector;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forms::{CausalType, Signature};
use crate::geodesics::{
    geodesic_chart, geodesic_from_o, lightlike_geodesic, segment_certified_in_ball,
    segment_length_l0, ConformalGeodesic, GeodesicSegment, QuadratureConfig, CONTAINMENT_SAMPLES,
};
use crate::liealg::{alg_nminus, exp_field, MobiusElement};
use crate::model::rho_o_to_basepoint;
use crate::parabolic::{
    act_on_ein, from_affine, from_affine_field, AffineConformalField, AffineConformalMap,
};

/// Default "collapsed to the basepoint" threshold for asymptotic claims.
pub const COLLAPSE_EPSILON: f64 = 1e-2;

/// One trace row: a time (or step) index, the time, and the observable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub index: usize,
    pub t: f64,
    pub observable: f64,
}

/// Structured outcome of an experiment. `pass` holds exactly when
/// `max_violation <= tolerance`; the tolerance is always declared.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub name: String,
    pub parameters: BTreeMap<String, String>,
    pub samples: u64,
    pub max_violation: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub stats: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub traces: Option<Vec<TraceRow>>,
}

impl ExperimentReport {
    fn new(
        name: &str,
        parameters: BTreeMap<String, String>,
        samples: u64,
        max_violation: f64,
        tolerance: f64,
        stats: BTreeMap<String, f64>,
        traces: Option<Vec<TraceRow>>,
    ) -> Self {
        ExperimentReport {
            name: name.to_string(),
            parameters,
            samples,
            max_violation,
            tolerance,
            pass: max_violation <= tolerance,
            stats,
            traces,
        }
    }
}

/// Deterministic sampler: ChaCha8 is a counter-based stream generator,
/// reproducible across platforms for a fixed seed.
pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.rng.random::<f64>()
    }

    /// Standard normal via Box-Muller on two uniform draws.
    pub fn normal(&mut self) -> f64 {
        let u1 = self.rng.random::<f64>().max(1e-300);
        let u2 = self.rng.random::<f64>();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }

    pub fn direction(&mut self, n: usize) -> DVector<f64> {
        loop {
            let v = DVector::from_fn(n, |_, _| self.normal());
            let norm = v.norm();
            if norm > 1e-6 {
                return v / norm;
            }
        }
    }

    /// Uniform draw from the Euclidean ball of the given radius.
    pub fn in_ball(&mut self, n: usize, radius: f64) -> DVector<f64> {
        let dir = self.direction(n);
        let r = radius * self.rng.random::<f64>().powf(1.0 / n as f64);
        dir * r
    }

    /// Euclidean-unit lightlike vector of the split form; needs `p >= 1`.
    pub fn lightlike_direction(&mut self, sig: Signature) -> Result<DVector<f64>> {
        if sig.p() == 0 {
            return Err(Error::InvalidInput(
                "no nonzero lightlike vectors in Riemannian signature".into(),
            ));
        }
        let n = sig.n();
        loop {
            let mut w = self.in_ball(n, 1.0);
            if w[0].abs() < 0.3 {
                continue;
            }
            // Zero the form by solving for the coordinate paired with w[0].
            let paired = n - 1;
            let partial = sig.eval_q(&w)? - 2.0 * w[0] * w[paired];
            w[paired] = -partial / (2.0 * w[0]);
            let w = w.normalize();
            if sig.causal_type(&w, 1e-12) == CausalType::Lightlike {
                return Ok(w);
            }
        }
    }
}

fn common_params(sig: Signature, seed: Option<u64>) -> BTreeMap<String, String> {
    let mut m = BTreeMap::new();
    m.insert("p".into(), sig.p().to_string());
    m.insert("q".into(), sig.q().to_string());
    if let Some(s) = seed {
        m.insert("seed".into(), s.to_string());
    }
    m
}

/// Geometric time grid `t_min * ratio^k` capped at `t_max`, with `t_max`
/// always included as the final entry.
pub fn geometric_time_grid(t_min: f64, t_max: f64, per_decade: usize) -> Vec<f64> {
    assert!(t_min > 0.0 && t_max > t_min && per_decade > 0);
    let ratio = 10f64.powf(1.0 / per_decade as f64);
    let mut grid = Vec::new();
    let mut t = t_min;
    while t < t_max {
        grid.push(t);
        t *= ratio;
    }
    grid.push(t_max);
    grid
}

fn sample_geodesic(
    sampler: &mut Sampler,
    sig: Signature,
) -> Result<ConformalGeodesic> {
    let n = sig.n();
    let kinds: &[CausalType] = if sig.p() == 0 {
        &[CausalType::Spacelike]
    } else {
        &[CausalType::Timelike, CausalType::Spacelike, CausalType::Lightlike]
    };
    let kind = kinds[(sampler.uniform(0.0, kinds.len() as f64)) as usize % kinds.len()];
    match kind {
        CausalType::Lightlike => {
            let u = sampler.lightlike_direction(sig)?;
            lightlike_geodesic(sig, &u)
        }
        wanted => loop {
            let v = sampler.in_ball(n, 1.0);
            if sig.causal_type(&v, 1e-3) == wanted {
                let v0 = sampler.in_ball(n, 1.0);
                return geodesic_chart(sig, &v, &v0);
            }
        },
    }
}

/// Samples geodesic segments, keeps those certified inside `B(o, radius)`,
/// and checks the flat-metric length bound `8 n R` on every one of them.
pub fn run_segment_bound(
    sig: Signature,
    radius: f64,
    samples: usize,
    seed: u64,
) -> Result<ExperimentReport> {
    if !(radius > 0.0) {
        return Err(Error::InvalidInput("radius must be positive".into()));
    }
    let mut sampler = Sampler::new(seed);
    let quad = QuadratureConfig::default();
    let bound = 8.0 * sig.n() as f64 * radius;
    let tolerance = 1e-6;

    let mut kept = 0u64;
    let mut attempts = 0u64;
    let mut max_violation = f64::NEG_INFINITY;
    let mut max_ratio: f64 = 0.0;
    let mut max_length: f64 = 0.0;
    while kept < samples as u64 {
        attempts += 1;
        if attempts > 500 * samples as u64 {
            return Err(Error::InvalidInput(format!(
                "containment rejection rate too high: kept {kept} of {attempts}"
            )));
        }
        let geo = sample_geodesic(&mut sampler, sig)?;
        let s_end = sampler.uniform(0.05, 2.0);
        let seg = GeodesicSegment::new(geo, s_end)?;
        if !segment_certified_in_ball(&seg, radius, CONTAINMENT_SAMPLES) {
            continue;
        }
        let l = segment_length_l0(&seg, &quad)?;
        let violation = l.length - bound - l.error_estimate;
        max_violation = max_violation.max(violation);
        max_ratio = max_ratio.max(l.length / bound);
        max_length = max_length.max(l.length);
        kept += 1;
    }

    let mut parameters = common_params(sig, Some(seed));
    parameters.insert("radius".into(), format!("{radius}"));
    parameters.insert("bound".into(), format!("{bound}"));
    let mut stats = BTreeMap::new();
    stats.insert("max_length".into(), max_length);
    stats.insert("max_ratio".into(), max_ratio);
    stats.insert("attempts".into(), attempts as f64);
    Ok(ExperimentReport::new(
        "segment-bound",
        parameters,
        kept,
        max_violation.max(0.0),
        tolerance,
        stats,
        None,
    ))
}

fn require_translation_rotation(f: &AffineConformalField, tol: f64) -> Result<DVector<f64>> {
    if !f.signature().is_riemannian() {
        return Err(Error::Precondition("translation-type experiments need p = 0".into()));
    }
    if f.a().abs() > tol {
        return Err(Error::Precondition("flow must have a trivial scale part".into()));
    }
    let t = f.translation().clone();
    if t.norm() <= tol {
        return Err(Error::Precondition("flow must have a nonzero translation part".into()));
    }
    if crate::classify::fixed_point_field(f, crate::classify::RANK_TOL).point.is_some() {
        return Err(Error::Precondition("flow must be fixed-point free".into()));
    }
    let coupling = (f.m() * &t).norm() / ((1.0 + f.m().norm()) * t.norm());
    if coupling > 1e-9 {
        return Err(Error::Precondition(
            "rotation part must commute with the translation direction".into(),
        ));
    }
    Ok(t)
}

/// Trap dichotomy for a translation-rotation flow: each sampled point of
/// `B(o, radius)` is pushed along the branch predicted by the sign of its
/// pairing with the translation direction; the moved segments must stay
/// in the ball at every grid time and their endpoints must collapse to
/// `o` by `t_max`.
///
/// Trace observable: max distance to `o` across samples at each grid
/// time. The `envelope_ratio_max` statistic records the largest value of
/// `distance^2 * t^2 |v|^2` seen on the traces.
pub fn run_piege(
    sig: Signature,
    f: &AffineConformalField,
    radius: f64,
    samples: usize,
    t_max: f64,
    seed: u64,
) -> Result<ExperimentReport> {
    let v = require_translation_rotation(f, 1e-12)?;
    let x_field = from_affine_field(f)?;
    let grid = geometric_time_grid(1e-2, t_max, 8);
    let flows: Vec<(MobiusElement, MobiusElement)> = grid
        .iter()
        .map(|&t| Ok((exp_field(&x_field, t)?, exp_field(&x_field, -t)?)))
        .collect::<Result<_>>()?;

    let mut sampler = Sampler::new(seed);
    let n = sig.n();
    let s_grid: Vec<f64> = (1..=32).map(|i| i as f64 / 32.0).collect();

    let mut max_violation: f64 = 0.0;
    let mut envelope_ratio_max: f64 = 0.0;
    let mut boundary_samples = 0u64;
    let mut trace_max = vec![0f64; grid.len()];

    for _ in 0..samples {
        // A point of B(o, radius) away from o itself, as a chart-j point.
        let y = loop {
            let y = sampler.in_ball(n, radius);
            if y.norm() > 1e-3 * radius {
                break y;
            }
        };
        let x = crate::model::inversion_s(sig, &y)?;
        let seg = geodesic_from_o(sig, &alg_nminus(sig, &y)?)?;

        let pairing = sig.bilinear(&x, &v)?;
        let on_boundary = pairing.abs() <= 1e-9 * x.norm() * v.norm();
        if on_boundary {
            boundary_samples += 1;
        }
        let branches: &[f64] =
            if on_boundary { &[1.0, -1.0] } else if pairing >= 0.0 { &[1.0] } else { &[-1.0] };

        for &branch in branches {
            let mut final_distance = f64::INFINITY;
            for (k, &t) in grid.iter().enumerate() {
                let h = if branch > 0.0 { &flows[k].0 } else { &flows[k].1 };
                let mut worst = 0.0f64;
                for &s in &s_grid {
                    let moved = act_on_ein(h, &seg.eval(s)?)?;
                    let d = rho_o_to_basepoint(&moved).unwrap_or(f64::INFINITY);
                    worst = worst.max(d);
                }
                trace_max[k] = trace_max[k].max(worst);
                max_violation = max_violation.max(worst - radius);
                envelope_ratio_max =
                    envelope_ratio_max.max(worst * worst * t * t * v.norm_squared());
                if k + 1 == grid.len() {
                    final_distance = worst;
                }
            }
            max_violation = max_violation.max(final_distance - COLLAPSE_EPSILON);
        }
    }

    let mut parameters = common_params(sig, Some(seed));
    parameters.insert("radius".into(), format!("{radius}"));
    parameters.insert("t_max".into(), format!("{t_max}"));
    parameters.insert("collapse_epsilon".into(), format!("{COLLAPSE_EPSILON}"));
    let mut stats = BTreeMap::new();
    stats.insert("envelope_ratio_max".into(), envelope_ratio_max);
    stats.insert("boundary_samples".into(), boundary_samples as f64);
    let traces = grid
        .iter()
        .zip(&trace_max)
        .enumerate()
        .map(|(index, (&t, &observable))| TraceRow { index, t, observable })
        .collect();
    Ok(ExperimentReport::new(
        "piege",
        parameters,
        samples as u64,
        max_violation,
        0.0,
        stats,
        Some(traces),
    ))
}

/// Hausdorff collapse of a whole chart ball under a translation-rotation
/// flow: the maximal distance to `o` over images of samples of the
/// Euclidean ball `B(center, ball_radius)` must fall below the collapse
/// threshold by the final grid time.
pub fn run_translation_stability(
    sig: Signature,
    f: &AffineConformalField,
    center: &DVector<f64>,
    ball_radius: f64,
    t_grid: &[f64],
    samples: usize,
    seed: u64,
) -> Result<ExperimentReport> {
    require_translation_rotation(f, 1e-12)?;
    if t_grid.is_empty() {
        return Err(Error::InvalidInput("empty time grid".into()));
    }
    let x_field = from_affine_field(f)?;
    let mut sampler = Sampler::new(seed);
    let n = sig.n();

    let points: Vec<crate::model::EinPoint> = (0..samples)
        .map(|_| {
            let y = center + sampler.in_ball(n, ball_radius);
            crate::model::chart_j(sig, &y)
        })
        .collect::<Result<_>>()?;

    let mut traces = Vec::with_capacity(t_grid.len());
    let mut final_spread = f64::INFINITY;
    for (index, &t) in t_grid.iter().enumerate() {
        let h = exp_field(&x_field, t)?;
        let mut worst = 0.0f64;
        for z in &points {
            let moved = act_on_ein(&h, z)?;
            let d = rho_o_to_basepoint(&moved).unwrap_or(f64::INFINITY);
            worst = worst.max(d);
        }
        traces.push(TraceRow { index, t, observable: worst });
        final_spread = worst;
    }

    let mut parameters = common_params(sig, Some(seed));
    parameters.insert("ball_radius".into(), format!("{ball_radius}"));
    parameters.insert("t_final".into(), format!("{}", t_grid[t_grid.len() - 1]));
    parameters.insert("collapse_epsilon".into(), format!("{COLLAPSE_EPSILON}"));
    let mut stats = BTreeMap::new();
    stats.insert("final_spread".into(), final_spread);
    Ok(ExperimentReport::new(
        "translation-stability",
        parameters,
        samples as u64,
        (final_spread - COLLAPSE_EPSILON).max(0.0),
        0.0,
        stats,
        Some(traces),
    ))
}

/// Reparametrization law along a lightlike direction: iterates of a map
/// whose linear part stretches `u` by the square of its scale and whose
/// translation pairs to -1 with `u` act on the curve `s -> jo(s u)` as
/// `s -> s / (1 + k s)`.
///
/// For a non-lightlike `u` the same data is measured but no pass/fail
/// claim is made (the tolerance is set to the largest float).
pub fn run_reparametrization(
    sig: Signature,
    h: &AffineConformalMap,
    u: &DVector<f64>,
    s_grid: &[f64],
    k_max: u32,
) -> Result<ExperimentReport> {
    let pairing = sig.bilinear(h.translation(), u)?;
    let eigen_residual = {
        let scale = h.scale();
        (h.linear() * u - u * (scale * scale)).norm() / (scale * scale * u.norm())
    };
    let nullity = sig.eval_q(u)?.abs() / u.norm_squared();
    let is_lightlike = sig.causal_type(u, 1e-9) == CausalType::Lightlike;

    let geo = geodesic_from_o(sig, &alg_nminus(sig, u)?)?;
    let g = from_affine(h)?;

    let mut worst: f64 = 0.0;
    for k in 0..=k_max {
        let hk = g.powi(k as i64)?;
        for &s in s_grid {
            if (1.0 + k as f64 * s).abs() < 1e-9 {
                continue;
            }
            let lhs = act_on_ein(&hk, &geo.eval(s)?)?;
            let rhs = geo.eval(s / (1.0 + k as f64 * s))?;
            worst = worst.max(lhs.distance(&rhs));
        }
    }

    let mut parameters = common_params(sig, None);
    parameters.insert("k_max".into(), format!("{k_max}"));
    parameters.insert("lightlike".into(), format!("{is_lightlike}"));
    let mut stats = BTreeMap::new();
    stats.insert("pairing".into(), pairing);
    stats.insert("eigen_residual".into(), eigen_residual);
    stats.insert("nullity".into(), nullity);
    stats.insert("measured_max_deviation".into(), worst);
    let tolerance = if is_lightlike { 1e-9 } else { f64::MAX };
    Ok(ExperimentReport::new(
        "reparametrization",
        parameters,
        (k_max as u64 + 1) * s_grid.len() as u64,
        worst,
        tolerance,
        stats,
        None,
    ))
}

/// Containment-and-collapse mechanism on the flat model: sampled points
/// of `B(o, region_radius)` whose segments from `o` stay in the region at
/// every forward grid time are retained; their orbits must then stay in
/// the region, and the final spread is reported (collapse is recorded,
/// not demanded — isometric flows legitimately keep their spread).
pub fn run_semicomplete_contraction(
    sig: Signature,
    f: &AffineConformalField,
    region_radius: f64,
    t_grid: &[f64],
    samples: usize,
    seed: u64,
) -> Result<ExperimentReport> {
    if t_grid.is_empty() {
        return Err(Error::InvalidInput("empty time grid".into()));
    }
    let x_field = from_affine_field(f)?;
    let flows: Vec<MobiusElement> =
        t_grid.iter().map(|&t| exp_field(&x_field, t)).collect::<Result<_>>()?;

    let mut sampler = Sampler::new(seed);
    let n = sig.n();
    let s_grid: Vec<f64> = (1..=32).map(|i| i as f64 / 32.0).collect();

    let mut retained = 0u64;
    let mut containment_violation: f64 = 0.0;
    let mut final_spread: f64 = 0.0;
    for _ in 0..samples {
        let y = loop {
            let y = sampler.in_ball(n, region_radius);
            if y.norm() > 1e-3 * region_radius {
                break y;
            }
        };
        let seg = geodesic_from_o(sig, &alg_nminus(sig, &y)?)?;

        // Retain the sample when the whole moved segment stays in the
        // region at every grid time.
        let mut stays = true;
        let mut endpoint_final = 0.0f64;
        'time: for (k, h) in flows.iter().enumerate() {
            for &s in &s_grid {
                let moved = act_on_ein(h, &seg.eval(s)?)?;
                let d = rho_o_to_basepoint(&moved).unwrap_or(f64::INFINITY);
                if d >= region_radius {
                    stays = false;
                    break 'time;
                }
                if k + 1 == flows.len() && s == 1.0 {
                    endpoint_final = d;
                }
            }
        }
        if !stays {
            continue;
        }
        retained += 1;
        // Orbit of the endpoint: must remain in the region on the grid.
        let z = seg.eval(1.0)?;
        for h in &flows {
            let moved = act_on_ein(h, &z)?;
            let d = rho_o_to_basepoint(&moved).unwrap_or(f64::INFINITY);
            containment_violation = containment_violation.max(d - region_radius);
        }
        final_spread = final_spread.max(endpoint_final);
    }

    let mut parameters = common_params(sig, Some(seed));
    parameters.insert("region_radius".into(), format!("{region_radius}"));
    parameters.insert("t_final".into(), format!("{}", t_grid[t_grid.len() - 1]));
    let mut stats = BTreeMap::new();
    stats.insert("retained".into(), retained as f64);
    stats.insert("final_spread".into(), final_spread);
    stats.insert(
        "collapsed".into(),
        if retained > 0 && final_spread <= COLLAPSE_EPSILON { 1.0 } else { 0.0 },
    );
    Ok(ExperimentReport::new(
        "semicomplete-contraction",
        parameters,
        samples as u64,
        containment_violation,
        0.0,
        stats,
        None,
    ))
}

//! Decision procedures for affine conformal flows: fixed points at flow
//! and map level, the parabolic-vector construction, linearizability,
//! essentiality, compactness of generated algebras, and the Riemannian
//! trichotomy.
//!
//! Every verdict is a rank decision on a dense linear system. Rank
//! thresholds are relative to the largest singular value; verdicts whose
//! deciding quantity falls within a decade of its threshold are flagged
//! low-confidence instead of silently resolved.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forms::{CausalType, Signature};
use crate::linalg::{kernel_basis, min_norm_lstsq};
use crate::parabolic::{
    affine_flow, field_to_affine, from_affine_field, AffineConformalField, AffineConformalMap,
};
use crate::spectral::{jordan_chevalley, restricted_eigenspace};

/// Default relative singular-value threshold for rank decisions.
pub const RANK_TOL: f64 = 1e-8;

/// Deciding quantities within this factor of their threshold flag the
/// verdict as low-confidence.
pub const LOW_CONFIDENCE_FACTOR: f64 = 10.0;

/// Result of a fixed-point solve, with enough context to audit the rank
/// decision.
#[derive(Debug, Clone)]
pub struct FixedPointOutcome {
    /// Minimal-norm fixed point, when the system is consistent.
    pub point: Option<DVector<f64>>,
    /// Euclidean residual of the least-squares solve.
    pub residual: f64,
    /// Acceptance threshold the residual was compared against.
    pub threshold: f64,
    /// Whether the decision sits within a decade of the threshold.
    pub low_confidence: bool,
}

fn decide_fixed_point(
    linear: &DMatrix<f64>,
    minus_rhs: &DVector<f64>,
    tol: f64,
) -> FixedPointOutcome {
    let sol = min_norm_lstsq(linear, &(-minus_rhs), tol);
    let threshold = tol * (1.0 + minus_rhs.norm());
    let ratio = sol.residual / threshold;
    let low_confidence = (LOW_CONFIDENCE_FACTOR.recip()..=LOW_CONFIDENCE_FACTOR).contains(&ratio)
        || sol.rank_margin <= LOW_CONFIDENCE_FACTOR;
    FixedPointOutcome {
        point: (sol.residual <= threshold).then_some(sol.x),
        residual: sol.residual,
        threshold,
        low_confidence,
    }
}

/// Zero of the affine vector field: minimal-norm solution of
/// `(a I + M) x = -T`, accepted when the residual stays below
/// `tol * (1 + |T|)`.
pub fn fixed_point_field(f: &AffineConformalField, tol: f64) -> FixedPointOutcome {
    decide_fixed_point(&f.linear(), f.translation(), tol)
}

/// Fixed point of the affine map: solvability of `(scale A - I) x = -T`.
pub fn fixed_point_map(h: &AffineConformalMap, tol: f64) -> FixedPointOutcome {
    let n = h.signature().n();
    let linear = h.linear() - DMatrix::identity(n, n);
    decide_fixed_point(&linear, h.translation(), tol)
}

/// The lightlike-eigenvector witness produced when a map has no fixed
/// point: `scale A u = scale^2 u` and `<T, u> = -1`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ParabolicVector {
    pub u: Vec<f64>,
    /// Whether `Q(u)` vanishes at tolerance. The constructive argument
    /// only forces nullity when the scale part is nontrivial; a Riemannian
    /// translation, say, yields a unit vector here.
    pub is_null: bool,
    /// `|scale A u - scale^2 u| / (scale^2 |u|)`.
    pub eigen_residual: f64,
    /// `<T, u>`, rescaled to -1 by construction.
    pub pairing: f64,
}

/// Constructive search for the parabolic vector of a fixed-point-free
/// affine conformal map.
///
/// Follows the Jordan-decomposition route: restrict to the fixed space `F`
/// of the elliptic factor; for trivial log-scale take the eigenvalue-1
/// space of `A` inside `F`, otherwise descend to the `e^{lambda}`
/// eigenspace of the semisimple factor and the fixed space of the
/// unipotent factor there. Within the resulting subspace the vector
/// pairing maximally with the translation part is rescaled to pair to -1.
pub fn parabolic_vector(h: &AffineConformalMap, tol: f64) -> Result<ParabolicVector> {
    let sig = h.signature();
    let fp = fixed_point_map(h, tol);
    if fp.point.is_some() {
        return Err(Error::Precondition(
            "parabolic_vector requires a map without fixed points".into(),
        ));
    }
    let a = h.orthogonal();
    let lambda = h.scale().ln();
    let factors = jordan_chevalley(sig, a)?;

    let n = sig.n();
    let elliptic_fix = &factors.elliptic - DMatrix::identity(n, n);
    let fixed_of_elliptic = kernel_basis(&elliptic_fix, tol, tol * (1.0 + factors.elliptic.norm()));
    let candidate_space = if lambda.abs() <= 1e-9 {
        restricted_eigenspace(a, 1.0, &fixed_of_elliptic, tol)
    } else {
        let stretch =
            restricted_eigenspace(&factors.semisimple, lambda.exp(), &fixed_of_elliptic, tol);
        restricted_eigenspace(&factors.unipotent, 1.0, &stretch, tol)
    };
    if candidate_space.ncols() == 0 {
        return Err(Error::NoParabolicVector(
            "candidate eigenspace is empty; rank tolerances may need relaxing".into(),
        ));
    }

    let j = sig.j_mink();
    let t = h.translation();
    let coeffs = candidate_space.transpose() * (&j * t);
    let pairing_strength = coeffs.norm();
    if pairing_strength <= tol * (1.0 + t.norm()) {
        return Err(Error::NoParabolicVector(
            "every candidate direction pairs trivially with the translation part".into(),
        ));
    }
    let u0 = &candidate_space * coeffs;
    let pairing0 = sig.bilinear(t, &u0)?;
    let u = &u0 * (-1.0 / pairing0);

    let scale = h.scale();
    let eigen_residual =
        (h.linear() * &u - &u * (scale * scale)).norm() / (scale * scale * u.norm());
    let is_null = sig.causal_type(&u, 1e-8) == CausalType::Lightlike;
    let pairing = sig.bilinear(t, &u)?;
    Ok(ParabolicVector { u: u.as_slice().to_vec(), is_null, eigen_residual, pairing })
}

/// Witness attached to a linearizability verdict.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum LinearizabilityWitness {
    /// Fixed point of the holonomy flow.
    FixedPoint(Vec<f64>),
    /// Parabolic vector obstructing linearization.
    Parabolic(ParabolicVector),
    /// No witness could be produced (construction failed numerically).
    Unavailable(String),
}

/// Linearizability of the flow generated by `f`, with a witness either
/// way: the fixed point, or the parabolic vector obstructing it.
pub fn is_linearizable(
    f: &AffineConformalField,
    tol: f64,
) -> Result<(bool, LinearizabilityWitness)> {
    let flow = fixed_point_field(f, tol);
    if let Some(p) = flow.point {
        return Ok((true, LinearizabilityWitness::FixedPoint(p.as_slice().to_vec())));
    }
    let h = affine_flow(f, 1.0)?;
    match parabolic_vector(&h, tol) {
        Ok(pv) => Ok((false, LinearizabilityWitness::Parabolic(pv))),
        Err(Error::NoParabolicVector(msg)) => {
            Ok((false, LinearizabilityWitness::Unavailable(msg)))
        }
        Err(e) => Err(e),
    }
}

/// Inessentiality: after conjugating away a fixed point, the flow sits in
/// the orthogonal group exactly when its scale part vanishes.
pub fn is_inessential(f: &AffineConformalField, tol: f64) -> bool {
    f.a().abs() <= tol && fixed_point_field(f, tol).point.is_some()
}

/// Common zero of a family of affine fields: the minimal-norm solution of
/// the stacked system `{(a_i I + M_i) x = -T_i}`.
pub fn joint_fixed_point(fields: &[AffineConformalField], tol: f64) -> Result<FixedPointOutcome> {
    let Some(first) = fields.first() else {
        return Err(Error::InvalidInput("joint_fixed_point needs at least one field".into()));
    };
    let n = first.signature().n();
    let k = fields.len();
    let mut stacked = DMatrix::zeros(k * n, n);
    let mut rhs = DVector::zeros(k * n);
    for (i, f) in fields.iter().enumerate() {
        if f.signature() != first.signature() {
            return Err(Error::InvalidInput("joint_fixed_point: signature mismatch".into()));
        }
        stacked.view_mut((i * n, 0), (n, n)).copy_from(&f.linear());
        rhs.rows_mut(i * n, n).copy_from(f.translation());
    }
    Ok(decide_fixed_point(&stacked, &rhs, tol))
}

/// Outcome of the compact-type test for a generating set.
#[derive(Debug, Clone)]
pub struct CompactTypeReport {
    pub compact: bool,
    pub joint_fixed_point: Option<DVector<f64>>,
    /// Worst relative distance of a pairwise bracket from the span of the
    /// generators. Advisory: closure is reported, not enforced.
    pub bracket_residual: f64,
    pub bracket_closed: bool,
    pub warnings: Vec<String>,
}

/// Compact type for the group generated by the given one-parameter flows:
/// every generator must be scale-free with an individual fixed point, and
/// the predicted joint fixed point must actually exist. A missing joint
/// fixed point under those hypotheses is reported as a rank warning,
/// never silently accepted.
pub fn is_algebra_compact_type(
    fields: &[AffineConformalField],
    tol: f64,
) -> Result<CompactTypeReport> {
    if fields.is_empty() {
        return Err(Error::InvalidInput("is_algebra_compact_type needs generators".into()));
    }
    let (bracket_residual, bracket_closed) = bracket_closure_residual(fields, tol)?;
    let mut warnings = Vec::new();
    if !bracket_closed {
        warnings.push(format!(
            "generator span is not bracket-closed (relative residual {bracket_residual:.3e})"
        ));
    }

    let mut individually_compact = true;
    for (i, f) in fields.iter().enumerate() {
        if f.a().abs() > tol {
            individually_compact = false;
            warnings.push(format!("generator {i} has a nontrivial scale part"));
            break;
        }
        if fixed_point_field(f, tol).point.is_none() {
            individually_compact = false;
            warnings.push(format!("generator {i} has no individual fixed point"));
            break;
        }
    }

    let joint = joint_fixed_point(fields, tol)?;
    let compact = individually_compact && joint.point.is_some();
    if individually_compact && joint.point.is_none() {
        warnings.push(format!(
            "individually compact generators but no joint fixed point \
             (residual {:.3e} vs threshold {:.3e}); numerical rank suspect",
            joint.residual, joint.threshold
        ));
    }
    Ok(CompactTypeReport {
        compact,
        joint_fixed_point: joint.point,
        bracket_residual,
        bracket_closed,
        warnings,
    })
}

fn bracket_closure_residual(fields: &[AffineConformalField], tol: f64) -> Result<(f64, bool)> {
    let mats: Vec<DMatrix<f64>> =
        fields.iter().map(|f| Ok(from_affine_field(f)?.mat().clone())).collect::<Result<_>>()?;
    let m = mats[0].nrows();
    let dim = m * m;
    let mut span = DMatrix::zeros(dim, mats.len());
    for (k, mat) in mats.iter().enumerate() {
        for (idx, value) in mat.iter().enumerate() {
            span[(idx, k)] = *value;
        }
    }
    let mut worst: f64 = 0.0;
    for i in 0..mats.len() {
        for j in 0..i {
            let c = &mats[i] * &mats[j] - &mats[j] * &mats[i];
            let mut vec_c = DVector::zeros(dim);
            for (idx, value) in c.iter().enumerate() {
                vec_c[idx] = *value;
            }
            let sol = min_norm_lstsq(&span, &vec_c, tol);
            worst = worst.max(sol.residual / (1.0 + c.norm()));
        }
    }
    Ok((worst, worst <= 1e-8))
}

/// The three Riemannian outcomes for a conformal flow at its singularity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RiemannianCase {
    /// Relatively compact flow: scale-free with a fixed point.
    #[serde(rename = "CASE1_COMPACT")]
    Case1Compact,
    /// Nontrivial scale part; essential, linearizable, and the model
    /// neighborhood is flat.
    #[serde(rename = "CASE2_DILATION")]
    Case2Dilation,
    /// Scale-free without fixed point (translation times rotation);
    /// essential and non-linearizable.
    #[serde(rename = "CASE2_TRANSLATION")]
    Case2Translation,
}

/// Full verdict for a conformal field at its singularity.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub signature: Signature,
    pub fixed_point: Option<Vec<f64>>,
    pub linearizable: bool,
    pub inessential: bool,
    pub parabolic_vector: Option<ParabolicVector>,
    /// Present exactly in Riemannian signature. The dilation/translation
    /// cases come with a conformally flat model neighborhood and an
    /// essential field; compactness gives the isometric linearization.
    pub riemannian_case: Option<RiemannianCase>,
    pub residuals: BTreeMap<String, f64>,
    pub low_confidence: bool,
    pub warnings: Vec<String>,
}

/// Classification of the flow of an affine conformal field. The flow- and
/// map-level fixed-point solvers run independently and must agree; a
/// disagreement downgrades confidence instead of picking silently.
pub fn classify_affine_field(f: &AffineConformalField, tol: f64) -> Result<ClassificationReport> {
    let sig = f.signature();
    sig.require_dim3()?;
    let mut residuals = BTreeMap::new();
    let mut warnings = Vec::new();

    let flow = fixed_point_field(f, tol);
    let h = affine_flow(f, 1.0)?;
    let map = fixed_point_map(&h, tol);
    residuals.insert("flow_residual".into(), flow.residual);
    residuals.insert("flow_threshold".into(), flow.threshold);
    residuals.insert("map_residual".into(), map.residual);
    residuals.insert("map_threshold".into(), map.threshold);
    residuals.insert("scale_part".into(), f.a());

    let mut low_confidence = flow.low_confidence || map.low_confidence;
    if flow.point.is_some() != map.point.is_some() {
        warnings.push(
            "flow-level and map-level fixed-point solvers disagree; keeping the flow verdict"
                .into(),
        );
        low_confidence = true;
    }

    let linearizable = flow.point.is_some();
    let fixed_point = flow.point.as_ref().map(|p| p.as_slice().to_vec());
    let inessential = linearizable && f.a().abs() <= tol;

    let parabolic = if linearizable {
        None
    } else {
        match parabolic_vector(&h, tol) {
            Ok(pv) => {
                residuals.insert("parabolic_eigen_residual".into(), pv.eigen_residual);
                residuals.insert("parabolic_pairing".into(), pv.pairing);
                Some(pv)
            }
            Err(Error::NoParabolicVector(msg)) | Err(Error::IllConditioned(msg)) => {
                warnings.push(format!("parabolic vector unavailable: {msg}"));
                low_confidence = true;
                None
            }
            Err(e) => return Err(e),
        }
    };

    let riemannian_case = if sig.is_riemannian() {
        Some(if f.a().abs() > tol {
            RiemannianCase::Case2Dilation
        } else if linearizable {
            RiemannianCase::Case1Compact
        } else {
            RiemannianCase::Case2Translation
        })
    } else {
        None
    };

    debug_assert_eq!(linearizable, fixed_point.is_some());
    debug_assert!(!inessential || linearizable);
    debug_assert_eq!(riemannian_case.is_some(), sig.is_riemannian());

    Ok(ClassificationReport {
        signature: sig,
        fixed_point,
        linearizable,
        inessential,
        parabolic_vector: parabolic,
        riemannian_case,
        residuals,
        low_confidence,
        warnings,
    })
}

/// Classification of an ambient algebra element tangent to the stabilizer.
pub fn classify_field(x: &crate::liealg::MobiusField, tol: f64) -> Result<ClassificationReport> {
    classify_affine_field(&field_to_affine(x)?, tol)
}

/// Which side of the dichotomy a generated algebra falls on.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum AlgebraCase {
    /// The generated group is relatively compact and fixes a point.
    Compact { joint_fixed_point: Vec<f64> },
    /// Some generator is individually non-compact; its classification is
    /// the witness.
    NonCompact { witness_index: usize, witness: ClassificationReport },
}

/// Verdict for a finitely generated algebra of conformal fields vanishing
/// at the singularity (Riemannian signature).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AlgebraReport {
    pub case: AlgebraCase,
    pub bracket_residual: f64,
    pub bracket_closed: bool,
    pub warnings: Vec<String>,
}

/// Riemannian dichotomy for a generator list: compact type (joint fixed
/// point, isometric linearization) or a non-compact witness generator
/// classified by [`classify_affine_field`].
pub fn classify_algebra(fields: &[AffineConformalField], tol: f64) -> Result<AlgebraReport> {
    let Some(first) = fields.first() else {
        return Err(Error::InvalidInput("classify_algebra needs generators".into()));
    };
    let sig = first.signature();
    if !sig.is_riemannian() {
        return Err(Error::Precondition(
            "classify_algebra applies to Riemannian signature (p = 0)".into(),
        ));
    }
    sig.require_dim3()?;
    let compact = is_algebra_compact_type(fields, tol)?;
    if compact.compact {
        let point = compact.joint_fixed_point.expect("compact verdict carries a fixed point");
        return Ok(AlgebraReport {
            case: AlgebraCase::Compact { joint_fixed_point: point.as_slice().to_vec() },
            bracket_residual: compact.bracket_residual,
            bracket_closed: compact.bracket_closed,
            warnings: compact.warnings,
        });
    }
    // First generator whose one-parameter flow is non-compact.
    let mut witness_index = None;
    for (i, f) in fields.iter().enumerate() {
        if f.a().abs() > tol || fixed_point_field(f, tol).point.is_none() {
            witness_index = Some(i);
            break;
        }
    }
    let Some(witness_index) = witness_index else {
        return Err(Error::IllConditioned(
            "no individually non-compact generator found, yet the joint fixed point is missing"
                .into(),
        ));
    };
    let witness = classify_affine_field(&fields[witness_index], tol)?;
    Ok(AlgebraReport {
        case: AlgebraCase::NonCompact { witness_index, witness },
        bracket_residual: compact.bracket_residual,
        bracket_closed: compact.bracket_closed,
        warnings: compact.warnings,
    })
}

//! Möbius group dynamics on Einstein's universe.
//!
//! Einstein's universe `Ein^{p,q}` is the projectivized null cone of a
//! split quadratic form of type `(p+1, q+1)`; it is the compact model space
//! of conformal geometry in signature `(p, q)`. This crate implements the
//! computational side of that picture:
//!
//! * [`forms`] — split quadratic/bilinear forms and causal classification;
//! * [`model`] — points of `Ein^{p,q}`, the two stereographic charts, the
//!   inversion exchanging them, and the flat reference metric at the
//!   basepoint `o`;
//! * [`liealg`] — matrix realizations of `o(p+1,q+1)` and `O(p+1,q+1)`,
//!   the graded decomposition, generators, exponential and adjoint;
//! * [`parabolic`] — the stabilizer of `o` as affine conformal maps of
//!   `R^{p,q}`, together with stability of diagonal sequences;
//! * [`geodesics`] — conformal geodesics through `o`, segment lengths for
//!   the flat reference metric, and developments of group-valued curves;
//! * [`spectral`] — eigenstructure and the multiplicative Jordan
//!   decomposition inside `O(p,q)`;
//! * [`classify`] — decision procedures for fixed points, linearizability,
//!   essentiality and the Riemannian trichotomy of conformal flows;
//! * [`harness`] — reproducible numerical experiments for the quantitative
//!   statements behind those procedures.
//!
//! All numerics are dense `f64` at desk scale (dimensions ≤ 12). Every
//! operation is a pure function of its inputs; nothing in the crate holds
//! shared mutable state, so values can be used freely across threads.

pub mod classify;
pub mod error;
pub mod forms;
pub mod geodesics;
pub mod harness;
pub mod liealg;
pub mod model;
pub mod parabolic;
pub mod spectral;

mod linalg;

pub use error::{Error, Result};
pub use forms::{CausalType, Signature};
pub use model::{Chart, EinPoint};

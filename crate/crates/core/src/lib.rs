//! Exact and floating tools for curves in ℝⁿ: derivative jets and
//! Wronskians, monomial lifts of planar curves, lattice counts in
//! δ-neighborhoods, curve–hyperplane intersections, and additive-energy
//! checks on finite point sets.
//!
//! Polynomial curves are handled in exact rational arithmetic throughout;
//! trigonometric builtins (circle arcs) use closed-form derivatives in `f64`.

pub mod curve;
pub mod error;
pub mod experiments;
pub mod hyperplane;
pub mod lifting;
pub mod linalg;
pub mod point_sets;
pub mod poly;
pub mod roots;
pub mod scalar;
pub mod trig;
pub mod tube;

pub use curve::{
    certify_nondegenerate, make_moment_curve, AnyJet, CertificateStatus, CurveKind, CurveSpec, Jet,
    NondegeneracyCertificate, Value,
};
pub use error::{Error, Result};
pub use lifting::{exponent, lift_curve, lift_point, make_ms, Monomial, MonomialSet};
pub use point_sets::{ExactPoint, FiniteSet, Gap, WorkCaps};
pub use scalar::{Rational, Scalar};

pub type ExactPolynomial = poly::Polynomial<Rational>;
pub type FloatPolynomial = poly::Polynomial<f64>;
pub type ExactJet = Jet<Rational>;
pub type FloatJet = Jet<f64>;
pub type ExactHyperplane = hyperplane::Hyperplane<Rational>;
pub type FloatHyperplane = hyperplane::Hyperplane<f64>;

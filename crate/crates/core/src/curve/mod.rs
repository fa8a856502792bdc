//! Parameterized curves in ℝⁿ, their derivative jets and Wronskians.

mod certify;
mod io;

pub use certify::{certify_nondegenerate, CertificateStatus, MarginEstimate, NondegeneracyCertificate};
pub use io::{CurveFile, CurveRef};

use std::fmt;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::determinant;
use crate::poly::Polynomial;
use crate::scalar::{format_rational, int, rational_to_f64, Rational, Scalar};
use crate::trig::TrigPolynomial;

/// Highest derivative order supported by the builtin analytic curves unless
/// the dimension requires more.
pub const DEFAULT_SMOOTHNESS_ORDER: usize = 32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CurveKind {
    Moment,
    PolynomialParametric,
    PolynomialGraph,
    CircleArc,
    Lifted,
    /// First-derivative curve of a graph, built by the hyperplane module.
    Derivative,
}

impl CurveKind {
    pub fn name(self) -> &'static str {
        match self {
            CurveKind::Moment => "moment",
            CurveKind::PolynomialParametric => "polynomial-parametric",
            CurveKind::PolynomialGraph => "polynomial-graph",
            CurveKind::CircleArc => "circle-arc",
            CurveKind::Lifted => "lifted",
            CurveKind::Derivative => "derivative",
        }
    }
}

impl fmt::Display for CurveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Coordinate functions of a curve. Polynomial coordinates have exact jets of
/// every order; trigonometric ones are exact symbolically but evaluate in f64.
#[derive(Clone, Debug, PartialEq)]
pub enum Coordinates {
    Polynomial(Vec<Polynomial<Rational>>),
    Trigonometric(Vec<TrigPolynomial>),
}

impl Coordinates {
    pub fn len(&self) -> usize {
        match self {
            Coordinates::Polynomial(c) => c.len(),
            Coordinates::Trigonometric(c) => c.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Provenance of a lifted curve, kept so it can be written back to a file.
#[derive(Clone, Debug, PartialEq)]
pub struct LiftOrigin {
    pub base: Box<CurveSpec>,
    pub monomials: Vec<[u32; 2]>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CurveSpec {
    kind: CurveKind,
    coords: Coordinates,
    domain: (Rational, Rational),
    smoothness_order: usize,
    origin: Option<LiftOrigin>,
}

/// Arithmetic used to produce a jet.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ArithmeticMode {
    Exact,
    Floating,
}

/// `γ(t)` together with the derivative rows `γ'(t), …, γ^{(k)}(t)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Jet<T> {
    pub point: Vec<T>,
    /// Row `i` holds the `(i + 1)`-th derivative.
    pub derivatives: Vec<Vec<T>>,
    /// Estimated absolute rounding error of the entries; `None` when exact.
    pub error_estimate: Option<f64>,
}

impl<T: Scalar> Jet<T> {
    pub fn mode(&self) -> ArithmeticMode {
        if T::EXACT {
            ArithmeticMode::Exact
        } else {
            ArithmeticMode::Floating
        }
    }

    pub fn order(&self) -> usize {
        self.derivatives.len()
    }

    pub fn dimension(&self) -> usize {
        self.point.len()
    }

    /// Determinant of the rows `γ', …, γ^{(n)}`.
    pub fn wronskian(&self) -> Result<T> {
        let n = self.dimension();
        if self.order() < n {
            return Err(Error::UnsupportedOrder { requested: n, supported: self.order() });
        }
        Ok(determinant(&self.derivatives[..n]))
    }
}

/// A jet in whichever arithmetic the curve supports.
#[derive(Clone, Debug, PartialEq)]
pub enum AnyJet {
    Exact(Jet<Rational>),
    Floating(Jet<f64>),
}

impl AnyJet {
    pub fn mode(&self) -> ArithmeticMode {
        match self {
            AnyJet::Exact(_) => ArithmeticMode::Exact,
            AnyJet::Floating(_) => ArithmeticMode::Floating,
        }
    }

    pub fn to_f64(&self) -> Jet<f64> {
        match self {
            AnyJet::Exact(j) => Jet {
                point: j.point.iter().map(rational_to_f64).collect(),
                derivatives: j.derivatives.iter().map(|r| r.iter().map(rational_to_f64).collect()).collect(),
                error_estimate: None,
            },
            AnyJet::Floating(j) => j.clone(),
        }
    }
}

/// A scalar result that is exact when the inputs allowed it.
#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Exact(Rational),
    Floating(f64),
}

impl Value {
    pub fn to_f64(&self) -> f64 {
        match self {
            Value::Exact(r) => rational_to_f64(r),
            Value::Floating(v) => *v,
        }
    }

    pub fn as_exact(&self) -> Option<&Rational> {
        match self {
            Value::Exact(r) => Some(r),
            Value::Floating(_) => None,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Exact(r) => f.write_str(&format_rational(r)),
            Value::Floating(v) => write!(f, "{v}"),
        }
    }
}

impl Serialize for Value {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Value::Exact(r) => s.serialize_str(&format_rational(r)),
            Value::Floating(v) => s.serialize_f64(*v),
        }
    }
}

impl CurveSpec {
    fn build(kind: CurveKind, coords: Coordinates, domain: (Rational, Rational), min_dimension: usize) -> Result<Self> {
        let n = coords.len();
        if n < min_dimension {
            return Err(Error::InvalidDimension(n));
        }
        let (lo, hi) = &domain;
        if lo >= hi {
            return Err(Error::InvalidInput(format!(
                "empty parameter interval [{}, {}]",
                format_rational(lo),
                format_rational(hi)
            )));
        }
        if lo < &Rational::zero() || hi > &Rational::one() {
            return Err(Error::InvalidInput(format!(
                "parameter interval [{}, {}] is not inside [0, 1]",
                format_rational(lo),
                format_rational(hi)
            )));
        }
        Ok(Self { kind, coords, domain, smoothness_order: DEFAULT_SMOOTHNESS_ORDER.max(n), origin: None })
    }

    /// Polynomial curve with arbitrary coordinate polynomials.
    pub fn polynomial(coords: Vec<Polynomial<Rational>>, lo: Rational, hi: Rational) -> Result<Self> {
        Self::build(CurveKind::PolynomialParametric, Coordinates::Polynomial(coords), (lo, hi), 2)
    }

    /// Graph `(t, f₂(t), …, f_n(t))`.
    pub fn graph(functions: Vec<Polynomial<Rational>>, lo: Rational, hi: Rational) -> Result<Self> {
        let mut coords = vec![Polynomial::identity()];
        coords.extend(functions);
        Self::build(CurveKind::PolynomialGraph, Coordinates::Polynomial(coords), (lo, hi), 2)
    }

    /// `(t, t², …, tⁿ)` on `[0, 1]`.
    pub fn moment(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidDimension(n));
        }
        let coords = (1..=n).map(|j| Polynomial::monomial(int(1), j)).collect();
        Self::build(CurveKind::Moment, Coordinates::Polynomial(coords), (int(0), int(1)), 2)
    }

    /// The parabola `(t, t²)` on `[0, 1]`.
    pub fn parabola() -> Self {
        Self::graph(vec![Polynomial::monomial(int(1), 2)], int(0), int(1)).expect("valid curve")
    }

    /// `(cos 2πt, sin 2πt)` for `t ∈ [lo, hi]`.
    pub fn circle_arc(lo: Rational, hi: Rational) -> Result<Self> {
        let coords = vec![TrigPolynomial::cos(1), TrigPolynomial::sin(1)];
        Self::build(CurveKind::CircleArc, Coordinates::Trigonometric(coords), (lo, hi), 2)
    }

    /// The full unit circle.
    pub fn circle() -> Self {
        Self::circle_arc(int(0), int(1)).expect("valid curve")
    }

    /// Lifted curve; only the lifting module constructs these.
    pub(crate) fn lifted(coords: Coordinates, base: &CurveSpec, monomials: Vec<[u32; 2]>) -> Result<Self> {
        let mut c = Self::build(CurveKind::Lifted, coords, base.domain.clone(), 2)?;
        c.smoothness_order = base.smoothness_order.max(c.dimension());
        c.origin = Some(LiftOrigin { base: Box::new(base.clone()), monomials });
        Ok(c)
    }

    /// Derivative curve; may be one-dimensional.
    pub(crate) fn derivative_of(coords: Vec<Polynomial<Rational>>, base: &CurveSpec) -> Result<Self> {
        let mut c = Self::build(CurveKind::Derivative, Coordinates::Polynomial(coords), base.domain.clone(), 1)?;
        c.smoothness_order = base.smoothness_order.saturating_sub(1).max(c.dimension());
        Ok(c)
    }

    /// Same curve on a sub-interval of its domain.
    pub fn restrict(&self, lo: Rational, hi: Rational) -> Result<Self> {
        if lo < self.domain.0 || hi > self.domain.1 {
            return Err(Error::InvalidInput("restriction leaves the curve domain".into()));
        }
        let mut c = Self::build(self.kind, self.coords.clone(), (lo, hi), 1)?;
        c.smoothness_order = self.smoothness_order;
        c.origin = self.origin.clone();
        Ok(c)
    }

    pub fn with_smoothness_order(mut self, order: usize) -> Result<Self> {
        if order < self.dimension() {
            return Err(Error::InvalidInput(format!(
                "smoothness order {order} is below the dimension {}",
                self.dimension()
            )));
        }
        self.smoothness_order = order;
        Ok(self)
    }

    pub fn kind(&self) -> CurveKind {
        self.kind
    }

    pub fn dimension(&self) -> usize {
        self.coords.len()
    }

    pub fn domain(&self) -> (&Rational, &Rational) {
        (&self.domain.0, &self.domain.1)
    }

    pub fn domain_f64(&self) -> (f64, f64) {
        (rational_to_f64(&self.domain.0), rational_to_f64(&self.domain.1))
    }

    pub fn smoothness_order(&self) -> usize {
        self.smoothness_order
    }

    pub fn coordinates(&self) -> &Coordinates {
        &self.coords
    }

    pub fn lift_origin(&self) -> Option<&LiftOrigin> {
        self.origin.as_ref()
    }

    /// Coordinate polynomials, when the curve is polynomial.
    pub fn polynomials(&self) -> Option<&[Polynomial<Rational>]> {
        match &self.coords {
            Coordinates::Polynomial(p) => Some(p),
            Coordinates::Trigonometric(_) => None,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.coords, Coordinates::Polynomial(_))
    }

    fn check_order(&self, order: usize) -> Result<()> {
        if order > self.smoothness_order {
            return Err(Error::UnsupportedOrder { requested: order, supported: self.smoothness_order });
        }
        Ok(())
    }

    fn domain_error(&self, t: String) -> Error {
        Error::Domain { t, lo: format_rational(&self.domain.0), hi: format_rational(&self.domain.1) }
    }

    /// Jet at a rational parameter: exact for polynomial curves, floating otherwise.
    pub fn eval_jet(&self, t: &Rational, order: usize) -> Result<AnyJet> {
        self.check_order(order)?;
        if t < &self.domain.0 || t > &self.domain.1 {
            return Err(self.domain_error(format_rational(t)));
        }
        match &self.coords {
            Coordinates::Polynomial(_) => Ok(AnyJet::Exact(self.jet_in(t, order)?)),
            Coordinates::Trigonometric(_) => Ok(AnyJet::Floating(self.jet_in(&rational_to_f64(t), order)?)),
        }
    }

    /// Floating-point jet at `t`, for every curve kind.
    pub fn eval_jet_f64(&self, t: f64, order: usize) -> Result<Jet<f64>> {
        self.check_order(order)?;
        let (lo, hi) = self.domain_f64();
        if !(lo..=hi).contains(&t) {
            return Err(self.domain_error(t.to_string()));
        }
        self.jet_in(&t, order)
    }

    /// Jet in an arbitrary scalar type. Trigonometric curves only support
    /// floating scalars.
    pub fn jet_in<T: Scalar>(&self, t: &T, order: usize) -> Result<Jet<T>> {
        self.check_order(order)?;
        match &self.coords {
            Coordinates::Polynomial(polys) => {
                let mut rows: Vec<Vec<T>> = Vec::with_capacity(order + 1);
                let mut current: Vec<Polynomial<Rational>> = polys.clone();
                let tf = t.to_f64().abs();
                let mut magnitude = 0.0f64;
                for _ in 0..=order {
                    rows.push(current.iter().map(|p| p.eval_in(t)).collect());
                    for p in &current {
                        magnitude = magnitude.max(p.abs_bound(tf) * (p.coeffs().len() as f64));
                    }
                    current = current.iter().map(Polynomial::derivative).collect();
                }
                let point = rows.remove(0);
                let error_estimate = (!T::EXACT).then_some(4.0 * f64::EPSILON * magnitude);
                Ok(Jet { point, derivatives: rows, error_estimate })
            }
            Coordinates::Trigonometric(trig) => {
                if T::EXACT {
                    return Err(Error::NotExact(self.kind.name()));
                }
                let tf = t.to_f64();
                let mut magnitude = 0.0f64;
                let mut rows: Vec<Vec<T>> = Vec::with_capacity(order + 1);
                for r in 0..=order {
                    rows.push(trig.iter().map(|f| T::from_f64(f.eval_derivative(tf, r))).collect());
                    for f in trig {
                        magnitude = magnitude.max(f.derivative_magnitude(tf, r));
                    }
                }
                let point = rows.remove(0);
                let unit = if std::mem::size_of::<T>() == 4 { f32::EPSILON as f64 } else { f64::EPSILON };
                Ok(Jet { point, derivatives: rows, error_estimate: Some(8.0 * unit * magnitude.max(1.0)) })
            }
        }
    }

    /// Exact jet; fails for trigonometric curves.
    pub fn jet_exact(&self, t: &Rational, order: usize) -> Result<Jet<Rational>> {
        match self.eval_jet(t, order)? {
            AnyJet::Exact(j) => Ok(j),
            AnyJet::Floating(_) => Err(Error::NotExact(self.kind.name())),
        }
    }

    /// Point `γ(t)` in f64 without domain checks; hot path for tube counting.
    pub fn point_f64(&self, t: f64) -> Vec<f64> {
        match &self.coords {
            Coordinates::Polynomial(p) => p.iter().map(|q| q.eval_in(&t)).collect(),
            Coordinates::Trigonometric(f) => f.iter().map(|q| q.eval_derivative(t, 0)).collect(),
        }
    }

    /// `γ(t)` and `γ'(t)` in f64 without domain checks.
    pub fn point_and_tangent_f64(&self, t: f64) -> (Vec<f64>, Vec<f64>) {
        match &self.coords {
            Coordinates::Polynomial(p) => {
                let pt = p.iter().map(|q| q.eval_in(&t)).collect();
                let tan = p.iter().map(|q| eval_derivative_in(q, t)).collect();
                (pt, tan)
            }
            Coordinates::Trigonometric(f) => (
                f.iter().map(|q| q.eval_derivative(t, 0)).collect(),
                f.iter().map(|q| q.eval_derivative(t, 1)).collect(),
            ),
        }
    }

    /// Upper bound on `|γ^{(order)}(t)|` for `t ∈ [a, b]`.
    pub fn derivative_norm_bound(&self, order: usize, a: f64, b: f64) -> f64 {
        let radius = a.abs().max(b.abs());
        let sq: f64 = match &self.coords {
            Coordinates::Polynomial(p) => p.iter().map(|q| q.nth_derivative(order).abs_bound(radius).powi(2)).sum(),
            Coordinates::Trigonometric(f) => f.iter().map(|q| q.derivative_bound(order).powi(2)).sum(),
        };
        sq.sqrt()
    }

    /// Wronskian at a rational parameter, exact for polynomial curves and for
    /// trigonometric curves whose Wronskian vanishes identically.
    pub fn wronskian(&self, t: &Rational) -> Result<Value> {
        let n = self.dimension();
        match self.eval_jet(t, n)? {
            AnyJet::Exact(j) => Ok(Value::Exact(j.wronskian()?)),
            AnyJet::Floating(_) if self.wronskian_vanishes_identically()? => Ok(Value::Exact(Rational::zero())),
            AnyJet::Floating(j) => Ok(Value::Floating(j.wronskian()?)),
        }
    }

    /// Exact decision of `W ≡ 0`.
    ///
    /// For trigonometric coordinates `W(t) = (2π)^{n(n+1)/2} W̃(2πt)` where
    /// `W̃` is a trigonometric polynomial of degree at most `K = Σ deg f_j`,
    /// so it vanishes identically iff it vanishes at `2K + 1` distinct angles.
    /// The angles are taken at rational `tan(θ/2)`, where every jet entry is
    /// rational.
    pub fn wronskian_vanishes_identically(&self) -> Result<bool> {
        let n = self.dimension();
        self.check_order(n)?;
        match &self.coords {
            Coordinates::Polynomial(_) => Ok(self.wronskian_polynomial().is_some_and(|w| w.is_zero())),
            Coordinates::Trigonometric(f) => {
                let k: i64 = f.iter().map(|g| g.max_frequency() as i64).sum();
                for u in 0..=2 * k {
                    let u = int(u);
                    let rows: Vec<Vec<Rational>> =
                        (1..=n).map(|r| f.iter().map(|g| g.angle_derivative_at(&u, r)).collect()).collect();
                    if !determinant(&rows).is_zero() {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
        }
    }

    pub fn wronskian_f64(&self, t: f64) -> Result<f64> {
        self.eval_jet_f64(t, self.dimension())?.wronskian()
    }

    /// The Wronskian as an exact polynomial in `t`, for polynomial curves.
    ///
    /// Every term of the determinant has degree at most `Σ deg γ_j − n(n+1)/2`,
    /// so the polynomial is recovered by exact interpolation at that many
    /// plus one integer nodes.
    pub fn wronskian_polynomial(&self) -> Option<Polynomial<Rational>> {
        let polys = self.polynomials()?;
        let n = polys.len();
        let total: usize = polys.iter().map(|p| p.degree().unwrap_or(0)).sum();
        let bound = total.saturating_sub(n * (n + 1) / 2);
        let xs: Vec<Rational> = (0..=bound as i64).map(int).collect();
        let ys: Vec<Rational> = xs
            .iter()
            .map(|x| {
                let jet = self.jet_in(x, n).expect("polynomial jets exist to every order");
                jet.wronskian().expect("jet has n derivative rows")
            })
            .collect();
        Some(Polynomial::interpolate(&xs, &ys))
    }

    /// Parses builtin names: `parabola`, `cubic`, `moment:<n>`, `circle`,
    /// `circle-arc:<lo>:<hi>`.
    pub fn builtin(name: &str) -> Result<Self> {
        let mut parts = name.split(':');
        let head = parts.next().unwrap_or_default();
        let rest: Vec<&str> = parts.collect();
        match (head, rest.as_slice()) {
            ("parabola", []) => Ok(Self::parabola()),
            ("cubic", []) => Self::graph(vec![Polynomial::monomial(int(1), 3)], int(0), int(1)),
            ("moment", [n]) => {
                let n: usize = n.parse().map_err(|_| Error::Parse(format!("bad dimension in {name:?}")))?;
                Self::moment(n)
            }
            ("circle", []) => Ok(Self::circle()),
            ("circle-arc", [lo, hi]) => {
                Self::circle_arc(crate::scalar::parse_rational(lo)?, crate::scalar::parse_rational(hi)?)
            }
            _ => Err(Error::Parse(format!("unknown builtin curve {name:?}"))),
        }
    }

    /// `count + 1` equally spaced rational parameters covering the domain.
    pub fn grid(&self, count: usize) -> Vec<Rational> {
        let (lo, hi) = (&self.domain.0, &self.domain.1);
        let step = (hi - lo) / int(count as i64);
        (0..=count).map(|i| lo + &step * int(i as i64)).collect()
    }
}

fn eval_derivative_in(p: &Polynomial<Rational>, t: f64) -> f64 {
    let c = p.coeffs();
    let mut acc = 0.0;
    for k in (1..c.len()).rev() {
        acc = acc * t + rational_to_f64(&c[k]) * k as f64;
    }
    acc
}

/// `make_moment_curve`
pub fn make_moment_curve(n: usize) -> Result<CurveSpec> {
    CurveSpec::moment(n)
}

/// `∏_{k=1}^{n} k!`, the Wronskian of the moment curve.
pub fn superfactorial(n: usize) -> Rational {
    let mut acc = int(1);
    let mut fact = int(1);
    for k in 1..=n {
        fact *= int(k as i64);
        acc *= &fact;
    }
    acc
}

//! Lifting planar curves through bivariate monomials.
//!
//! A monomial set `M = {m₁, …, m_n}` maps `(x, y)` to `(m₁(x,y), …, m_n(x,y))`.
//! Lifting a planar curve through `M` gives a curve in ℝⁿ whose Wronskian
//! controls lattice counts near the original curve with exponent
//! `e(M) = 2/(n(n+1)) Σ deg mᵢ`.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Pow, Zero};
use serde::{Deserialize, Serialize};

use crate::curve::{Coordinates, CurveSpec, Value};
use crate::error::{Error, Result};
use crate::point_sets::{ExactPoint, FiniteSet};
use crate::poly::Polynomial;
use crate::scalar::{format_rational, lies_in_scaled_integers, Rational, Scalar};
use crate::trig::TrigPolynomial;

/// `x^a y^b`
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "[u32; 2]", try_from = "[u32; 2]")]
pub struct Monomial {
    pub a: u32,
    pub b: u32,
}

impl Monomial {
    pub fn new(a: u32, b: u32) -> Result<Self> {
        if a + b == 0 {
            return Err(Error::InvalidInput("monomials must have degree at least 1".into()));
        }
        Ok(Self { a, b })
    }

    pub const X: Monomial = Monomial { a: 1, b: 0 };
    pub const Y: Monomial = Monomial { a: 0, b: 1 };

    pub fn degree(self) -> u32 {
        self.a + self.b
    }

    pub fn eval<T: Scalar>(self, x: &T, y: &T) -> T {
        pow(x, self.a) * pow(y, self.b)
    }

    /// Canonical order: by degree, then by descending power of `x`.
    fn sort_key(self) -> (u32, std::cmp::Reverse<u32>) {
        (self.degree(), std::cmp::Reverse(self.a))
    }
}

fn pow<T: Scalar>(x: &T, e: u32) -> T {
    (0..e).fold(T::one(), |acc, _| acc * x.clone())
}

impl From<Monomial> for [u32; 2] {
    fn from(m: Monomial) -> Self {
        [m.a, m.b]
    }
}

impl TryFrom<[u32; 2]> for Monomial {
    type Error = Error;

    fn try_from([a, b]: [u32; 2]) -> Result<Self> {
        Monomial::new(a, b)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let part = |v: &str, e: u32| match e {
            0 => String::new(),
            1 => v.to_string(),
            _ => format!("{v}^{e}"),
        };
        write!(f, "{}{}", part("x", self.a), part("y", self.b))
    }
}

/// Distinct monomials in canonical order (`x`, `y`, then graded-lex).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Monomial>", into = "Vec<Monomial>")]
pub struct MonomialSet {
    monomials: Vec<Monomial>,
}

impl MonomialSet {
    pub fn new(mut monomials: Vec<Monomial>) -> Result<Self> {
        if monomials.is_empty() {
            return Err(Error::InvalidInput("empty monomial set".into()));
        }
        monomials.sort_by_key(|m| m.sort_key());
        if monomials.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidInput("monomials must be distinct".into()));
        }
        Ok(Self { monomials })
    }

    pub fn from_pairs(pairs: &[[u32; 2]]) -> Result<Self> {
        Self::new(pairs.iter().map(|&p| Monomial::try_from(p)).collect::<Result<_>>()?)
    }

    /// Parses `"x,y,x^2,xy"`, `"Ms:<s>"` or a JSON array of `[a, b]` pairs.
    pub fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        if let Some(s) = text.strip_prefix("Ms:").or_else(|| text.strip_prefix("M:")) {
            let s: u32 = s.parse().map_err(|_| Error::Parse(format!("bad degree in {text:?}")))?;
            return make_ms(s);
        }
        if text.starts_with('[') {
            let pairs: Vec<[u32; 2]> = serde_json::from_str(text)?;
            return Self::from_pairs(&pairs);
        }
        let monomials = text.split(',').map(|tok| parse_monomial(tok.trim())).collect::<Result<_>>()?;
        Self::new(monomials)
    }

    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn monomials(&self) -> &[Monomial] {
        &self.monomials
    }

    pub fn degrees(&self) -> Vec<u32> {
        self.monomials.iter().map(|m| m.degree()).collect()
    }

    pub fn contains_x(&self) -> bool {
        self.monomials.contains(&Monomial::X)
    }

    pub fn contains_y(&self) -> bool {
        self.monomials.contains(&Monomial::Y)
    }

    /// Canonical ordering puts `x` first and `y` second whenever both exist.
    pub fn require_xy(&self) -> Result<()> {
        if self.contains_x() && self.contains_y() {
            debug_assert_eq!(&self.monomials[..2], &[Monomial::X, Monomial::Y]);
            Ok(())
        } else {
            Err(Error::InvalidInput("monomial set must contain x and y".into()))
        }
    }

    pub fn pairs(&self) -> Vec<[u32; 2]> {
        self.monomials.iter().map(|&m| m.into()).collect()
    }
}

impl TryFrom<Vec<Monomial>> for MonomialSet {
    type Error = Error;

    fn try_from(v: Vec<Monomial>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<MonomialSet> for Vec<Monomial> {
    fn from(m: MonomialSet) -> Self {
        m.monomials
    }
}

impl fmt::Display for MonomialSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.monomials.iter().map(|m| m.to_string()).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

fn parse_monomial(tok: &str) -> Result<Monomial> {
    let bad = || Error::Parse(format!("bad monomial {tok:?}"));
    let (mut a, mut b) = (0u32, 0u32);
    let mut chars = tok.chars().peekable();
    let mut seen = false;
    while let Some(c) = chars.next() {
        let slot = match c {
            'x' => &mut a,
            'y' => &mut b,
            '*' | ' ' => continue,
            _ => return Err(bad()),
        };
        seen = true;
        let mut exp = 1u32;
        if chars.peek() == Some(&'^') {
            chars.next();
            let digits: String = std::iter::from_fn(|| chars.next_if(|d| d.is_ascii_digit())).collect();
            exp = digits.parse().map_err(|_| bad())?;
        }
        *slot += exp;
    }
    if !seen {
        return Err(bad());
    }
    Monomial::new(a, b)
}

/// `M_s = { xⁱ yʲ : 1 ≤ i + j ≤ s }`
pub fn make_ms(s: u32) -> Result<MonomialSet> {
    if s < 1 {
        return Err(Error::InvalidInput("s must be at least 1".into()));
    }
    let monomials = (1..=s).flat_map(|d| (0..=d).rev().map(move |a| Monomial { a, b: d - a })).collect();
    MonomialSet::new(monomials)
}

/// `p^M = (m₁(p), …, m_n(p))`, exact.
pub fn lift_point(p: &[Rational; 2], set: &MonomialSet) -> ExactPoint {
    ExactPoint::new(set.monomials.iter().map(|m| m.eval(&p[0], &p[1])).collect())
}

/// The lifted curve `Γ^M`, composed symbolically so its jets stay exact
/// whenever the base curve's are.
pub fn lift_curve(curve: &CurveSpec, set: &MonomialSet) -> Result<CurveSpec> {
    if curve.dimension() != 2 {
        return Err(Error::InvalidInput(format!(
            "only planar curves can be lifted, got dimension {}",
            curve.dimension()
        )));
    }
    let coords = match curve.coordinates() {
        Coordinates::Polynomial(p) => Coordinates::Polynomial(
            set.monomials.iter().map(|m| &p[0].pow(m.a) * &p[1].pow(m.b)).collect::<Vec<Polynomial<Rational>>>(),
        ),
        Coordinates::Trigonometric(f) => Coordinates::Trigonometric(
            set.monomials.iter().map(|m| f[0].pow(m.a).mul(&f[1].pow(m.b))).collect::<Vec<TrigPolynomial>>(),
        ),
    };
    CurveSpec::lifted(coords, curve, set.pairs())
}

/// `W^M(Γ)(t)`, the Wronskian of the lifted curve.
pub fn lifted_wronskian(curve: &CurveSpec, set: &MonomialSet, t: &Rational) -> Result<Value> {
    lift_curve(curve, set)?.wronskian(t)
}

/// `e(M) = 2/(n(n+1)) · Σ deg mᵢ`
pub fn exponent(set: &MonomialSet) -> Rational {
    let n = set.len() as i64;
    let total: i64 = set.degrees().iter().map(|&d| d as i64).sum();
    Rational::new(BigInt::from(2 * total), BigInt::from(n * (n + 1)))
}

/// `C(M)² = Σ deg(mᵢ)² R^{2 deg(mᵢ) − 2}`, generic over the scalar.
pub fn lipschitz_constant_squared<T: Scalar>(set: &MonomialSet, radius: &T) -> Result<T> {
    if radius < &T::one() {
        return Err(Error::InvalidInput("the Lipschitz bound needs R ≥ 1".into()));
    }
    Ok(set
        .degrees()
        .iter()
        .map(|&d| T::from_i64((d * d) as i64) * pow(radius, 2 * d - 2))
        .fold(T::zero(), |acc, v| acc + v))
}

/// `C(M)`, the Lipschitz constant of `p ↦ p^M` on `[−R, R]²`.
pub fn lipschitz_constant(set: &MonomialSet, radius: f64) -> Result<f64> {
    Ok(lipschitz_constant_squared(set, &radius)?.sqrt())
}

/// Outcome of checking that lifting maps `Γ ∩ (1/N ℤ)²` bijectively onto
/// `Γ^M ∩ ∏ (1/N^{dᵢ}) ℤ`.
#[derive(Clone, Debug, Serialize)]
pub struct BijectionReport {
    pub n: usize,
    pub degrees: Vec<u32>,
    #[serde(with = "crate::scalar::rational_string")]
    pub exponent: Rational,
    pub cardinality_base: usize,
    pub cardinality_lifted: usize,
    pub bijection: bool,
    /// A lifted point violating the denominator condition, if one was found.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<ExactPoint>,
}

/// Checks the lattice bijection on a set of on-curve points produced by the
/// tube-count enumerator.
pub fn check_lattice_bijection(
    curve: &CurveSpec,
    set: &MonomialSet,
    lattice_n: u64,
    on_curve_points: &FiniteSet,
) -> Result<BijectionReport> {
    set.require_xy()?;
    if curve.dimension() != 2 || on_curve_points.dimension() != 2 {
        return Err(Error::InvalidInput("bijection check needs a planar curve and planar points".into()));
    }
    if lattice_n == 0 {
        return Err(Error::InvalidInput("N must be positive".into()));
    }
    let modulus = BigInt::from(lattice_n);
    if let Some(p) = on_curve_points.iter().find(|p| p.coords().iter().any(|c| !lies_in_scaled_integers(c, &modulus))) {
        return Err(Error::InvalidInput(format!("{p} is not a 1/{lattice_n}-lattice point")));
    }

    let degrees = set.degrees();
    let moduli: Vec<BigInt> = degrees.iter().map(|&d| Pow::pow(&modulus, d)).collect();
    let mut counterexample = None;
    let mut lifted = Vec::with_capacity(on_curve_points.len());
    let mut projection_ok = true;
    for p in on_curve_points {
        let q = lift_point(&[p.coords()[0].clone(), p.coords()[1].clone()], set);
        if counterexample.is_none() && q.coords().iter().zip(&moduli).any(|(c, m)| !lies_in_scaled_integers(c, m)) {
            counterexample = Some(q.clone());
        }
        projection_ok &= q.coords()[..2] == p.coords()[..];
        lifted.push(q);
    }
    let lifted = FiniteSet::new(set.len(), lifted)?;
    let bijection = counterexample.is_none() && projection_ok && lifted.len() == on_curve_points.len();
    Ok(BijectionReport {
        n: set.len(),
        degrees,
        exponent: exponent(set),
        cardinality_base: on_curve_points.len(),
        cardinality_lifted: lifted.len(),
        bijection,
        counterexample,
    })
}

/// Residual `Σ cᵢ xᵢ(t) − c₀` of a linear relation on a curve, as an exact
/// function of `t`; zero means the curve lies in that hyperplane.
pub fn relation_residual(curve: &CurveSpec, coefficients: &[Rational], constant: &Rational) -> Result<bool> {
    if coefficients.len() != curve.dimension() {
        return Err(Error::DimensionMismatch { left: coefficients.len(), right: curve.dimension() });
    }
    Ok(match curve.coordinates() {
        Coordinates::Polynomial(p) => {
            let mut acc = Polynomial::constant(-constant.clone());
            for (c, q) in coefficients.iter().zip(p) {
                acc = &acc + &q.scale(c);
            }
            acc.is_zero()
        }
        Coordinates::Trigonometric(f) => {
            let mut acc = TrigPolynomial::constant(-constant.clone());
            for (c, q) in coefficients.iter().zip(f) {
                acc = acc.add(&q.scale(c));
            }
            acc.is_zero()
        }
    })
}

/// Hyperplane `Σ cᵢ xᵢ = c₀` induced on the lift by a polynomial relation
/// `Σ cᵢ mᵢ(x, y) = c₀` of the base curve; the helper just formats it.
pub fn describe_relation(set: &MonomialSet, coefficients: &[Rational], constant: &Rational) -> String {
    let terms: Vec<String> = set
        .monomials
        .iter()
        .zip(coefficients)
        .filter(|(_, c)| !c.is_zero())
        .map(|(m, c)| if c.is_one() { m.to_string() } else { format!("({}){}", format_rational(c), m) })
        .collect();
    format!("{} = {}", terms.join(" + "), format_rational(constant))
}

//! Curve–hyperplane intersections, the derivative curve of a graph, and an
//! empirical estimate of the uniform intersection bound `N(Γ)`.

use num_traits::{One, Signed};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::curve::{Coordinates, CurveSpec};
use crate::error::{Error, Result};
use crate::poly::Polynomial;
use crate::roots::{default_tolerance, isolate_real_roots, RootInterval};
use crate::scalar::{format_rational, parse_rational, Rational, Scalar};
use crate::trig::TrigPolynomial;

/// Default sampling grid for curves without an exact root isolator.
pub const DEFAULT_GRID: usize = 2048;

/// `a₁x₁ + ⋯ + a_nx_n = a₀`, stored as `[a₀, a₁, …, a_n]` with
/// `max_{i≥1} |aᵢ| = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct Hyperplane<T> {
    coefficients: Vec<T>,
}

impl<T: Scalar> Hyperplane<T> {
    /// Normalizes so the largest `|aᵢ|`, `i ≥ 1`, is one.
    pub fn new(coefficients: Vec<T>) -> Result<Self> {
        if coefficients.len() < 2 {
            return Err(Error::InvalidInput("a hyperplane needs a₀ and at least one aᵢ".into()));
        }
        let scale = coefficients[1..].iter().map(|a| a.abs()).fold(T::zero(), |m, a| if a > m { a } else { m });
        if scale.is_zero() {
            return Err(Error::InvalidInput("hyperplane normal is zero".into()));
        }
        let coefficients = coefficients.into_iter().map(|a| a.exact_div(&scale)).collect();
        Ok(Self { coefficients })
    }

    pub fn dimension(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn constant(&self) -> &T {
        &self.coefficients[0]
    }

    pub fn normal(&self) -> &[T] {
        &self.coefficients[1..]
    }

    pub fn coefficients(&self) -> &[T] {
        &self.coefficients
    }

    /// `a·x − a₀`
    pub fn residual(&self, x: &[T]) -> T {
        self.normal().iter().zip(x).fold(-self.constant().clone(), |acc, (a, v)| acc + a.clone() * v.clone())
    }

    pub fn to_f64(&self) -> Hyperplane<f64> {
        Hyperplane { coefficients: self.coefficients.iter().map(|a| a.to_f64()).collect() }
    }
}

impl Hyperplane<Rational> {
    pub fn parse(values: &[String]) -> Result<Self> {
        Self::new(values.iter().map(|s| parse_rational(s)).collect::<Result<_>>()?)
    }
}

impl<T: Scalar> Serialize for Hyperplane<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let strings: Vec<String> = self
            .coefficients
            .iter()
            .map(|a| match a.to_rational() {
                Some(r) if T::EXACT => format_rational(&r),
                _ => a.to_f64().to_string(),
            })
            .collect();
        strings.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Hyperplane<Rational> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let values = Vec::<String>::deserialize(d)?;
        Hyperplane::parse(&values).map_err(serde::de::Error::custom)
    }
}

/// One intersection parameter with its isolating interval.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Root {
    #[serde(flatten)]
    pub interval: RootInterval,
    /// Exact multiplicity, known for polynomial curves.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub multiplicity: Option<u32>,
    /// Touching root: `g` does not change sign (even multiplicity).
    pub tangential: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Intersection {
    pub roots: Vec<Root>,
    /// True for exact isolation, or when the grid separated every root.
    pub certified: bool,
    /// The whole curve lies in the hyperplane.
    pub contained: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}

impl Intersection {
    pub fn count(&self) -> usize {
        self.roots.len()
    }
}

/// Roots in the curve domain of `g(t) = a·γ(t) − a₀`.
pub fn intersect(curve: &CurveSpec, h: &Hyperplane<Rational>) -> Result<Intersection> {
    intersect_with_grid(curve, h, DEFAULT_GRID)
}

pub fn intersect_with_grid(curve: &CurveSpec, h: &Hyperplane<Rational>, grid: usize) -> Result<Intersection> {
    if h.dimension() != curve.dimension() {
        return Err(Error::DimensionMismatch { left: curve.dimension(), right: h.dimension() });
    }
    match curve.coordinates() {
        Coordinates::Polynomial(p) => Ok(intersect_exact(&restriction(p, h), curve.domain())),
        Coordinates::Trigonometric(f) => {
            if grid < 2 {
                return Err(Error::InvalidInput("intersection grid needs at least 2 cells".into()));
            }
            let g = f
                .iter()
                .zip(h.normal())
                .fold(TrigPolynomial::constant(-h.constant().clone()), |acc, (q, a)| acc.add(&q.scale(a)));
            Ok(intersect_sampled(&g, curve.domain_f64(), grid))
        }
    }
}

fn restriction(p: &[Polynomial<Rational>], h: &Hyperplane<Rational>) -> Polynomial<Rational> {
    p.iter().zip(h.normal()).fold(Polynomial::constant(-h.constant().clone()), |acc, (q, a)| &acc + &q.scale(a))
}

/// Yun's square-free factorization: `g = c ∏ fᵢ^i`.
fn squarefree_factors(g: &Polynomial<Rational>) -> Vec<(u32, Polynomial<Rational>)> {
    let mut out = Vec::new();
    let dg = g.derivative();
    let a0 = g.gcd(&dg);
    let mut b = g.div_rem(&a0).0;
    let mut c = dg.div_rem(&a0).0;
    let mut d = &c - &b.derivative();
    let mut i = 1;
    while b.degree().unwrap_or(0) > 0 {
        let a = b.gcd(&d);
        if a.degree().unwrap_or(0) > 0 {
            out.push((i, a.clone()));
        }
        b = b.div_rem(&a).0;
        c = d.div_rem(&a).0;
        d = &c - &b.derivative();
        i += 1;
    }
    out
}

fn intersect_exact(g: &Polynomial<Rational>, (lo, hi): (&Rational, &Rational)) -> Intersection {
    if g.is_zero() {
        return Intersection { roots: Vec::new(), certified: true, contained: true, warning: None };
    }
    let tol = default_tolerance();
    let factors = squarefree_factors(g);
    let mut roots: Vec<Root> = factors
        .iter()
        .flat_map(|(m, f)| {
            isolate_real_roots(f, lo, hi, &tol).into_iter().map(move |interval| Root {
                interval,
                multiplicity: Some(*m),
                tangential: m % 2 == 0,
            })
        })
        .collect();
    roots.sort_by(|a, b| a.interval.lo.cmp(&b.interval.lo));
    Intersection { roots, certified: true, contained: false, warning: None }
}

fn intersect_sampled(g: &TrigPolynomial, (lo, hi): (f64, f64), grid: usize) -> Intersection {
    if g.is_zero() {
        return Intersection { roots: Vec::new(), certified: true, contained: true, warning: None };
    }
    let value = |t: f64| g.eval_derivative(t, 0);
    let slope = |t: f64| g.eval_derivative(t, 1);
    let scale = g.terms().map(|(_, c, s)| crate::scalar::rational_to_f64(&(c.abs() + s.abs()))).sum::<f64>();
    let zero_tol = 1e-12 * scale.max(1.0);
    let ts: Vec<f64> = (0..=grid).map(|i| lo + (hi - lo) * i as f64 / grid as f64).collect();
    let gs: Vec<f64> = ts.iter().map(|&t| value(t)).collect();
    let ds: Vec<f64> = ts.iter().map(|&t| slope(t)).collect();

    let mut found: Vec<(f64, bool)> = Vec::new();
    let mut ambiguous_cells = 0usize;
    for i in 0..grid {
        let (t0, t1) = (ts[i], ts[i + 1]);
        let (g0, g1) = (gs[i], gs[i + 1]);
        if g0 == 0.0 {
            found.push((t0, i > 0 && gs[i - 1] * g1 > 0.0));
        }
        if g0 * g1 < 0.0 {
            found.push((bisect(&value, t0, t1, g0), false));
            if ds[i] * ds[i + 1] < 0.0 {
                ambiguous_cells += 1;
            }
        } else if ds[i] * ds[i + 1] < 0.0 && g0 != 0.0 && g1 != 0.0 {
            // An extremum without a sign change: a touching root if |g| vanishes there.
            let t = bisect(&slope, t0, t1, ds[i]);
            if value(t).abs() <= zero_tol {
                found.push((t, true));
            }
        }
    }
    if gs[grid] == 0.0 {
        found.push((ts[grid], false));
    }
    found.sort_by(|a, b| a.0.total_cmp(&b.0));
    found.dedup_by(|b, a| (b.0 - a.0).abs() <= 1e-12);

    let tangential = found.iter().any(|r| r.1);
    let certified = ambiguous_cells == 0 && !tangential;
    let warning = (!certified).then(|| {
        format!("grid of {grid} cells may not separate all roots ({ambiguous_cells} crowded cells, tangential roots found: {tangential})")
    });
    let roots = found
        .into_iter()
        .map(|(t, tangential)| {
            let r = Rational::from_f64(t);
            Root { interval: RootInterval { lo: r.clone(), hi: r }, multiplicity: None, tangential }
        })
        .collect();
    Intersection { roots, certified, contained: false, warning }
}

fn bisect(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64, fa: f64) -> f64 {
    let sa = fa.signum();
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if fm.signum() == sa {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// `(a, b)` when the first coordinate is `a + b t` with `b ≠ 0`.
fn affine_first_coordinate(curve: &CurveSpec) -> Result<(Rational, Rational)> {
    let polys =
        curve.polynomials().ok_or_else(|| Error::InvalidForm("graph form needs polynomial coordinates".into()))?;
    let x = &polys[0];
    let ok = x.degree() == Some(1);
    if !ok {
        return Err(Error::InvalidForm(
            "first coordinate must be t (or an affine function of t) for graph form".into(),
        ));
    }
    let c = x.coeffs();
    Ok((c[0].clone(), c[1].clone()))
}

/// `Γ' = (f₂'(t), …, f_n'(t))` for a graph `(t, f₂(t), …, f_n(t))`.
///
/// A first coordinate `a + bt` is accepted too; the derivatives are then taken
/// with respect to `x₁`, i.e. divided by `b`.
pub fn derivative_curve(curve: &CurveSpec) -> Result<CurveSpec> {
    let (_, b) = affine_first_coordinate(curve)?;
    if curve.smoothness_order() < curve.dimension() {
        return Err(Error::UnsupportedOrder { requested: curve.dimension(), supported: curve.smoothness_order() });
    }
    let polys = curve.polynomials().expect("checked above");
    let inv_b = Rational::one() / &b;
    let coords = polys[1..].iter().map(|f| f.derivative().scale(&inv_b)).collect();
    CurveSpec::derivative_of(coords, curve)
}

/// Rewrites a curve whose first coordinate is `a + bt` as a graph over `x₁`.
pub fn to_graph_form(curve: &CurveSpec) -> Result<CurveSpec> {
    let (a, b) = affine_first_coordinate(curve)?;
    let polys = curve.polynomials().expect("checked above");
    // t = (x − a)/b
    let inv = Polynomial::new(vec![-&a / &b, Rational::one() / &b]);
    let (lo, hi) = curve.domain();
    let (x0, x1) = (&a + &b * lo, &a + &b * hi);
    let (x_lo, x_hi) = if x0 <= x1 { (x0, x1) } else { (x1, x0) };
    let fs = polys[1..].iter().map(|f| f.compose(&inv)).collect();
    CurveSpec::graph(fs, x_lo, x_hi)
}

/// Outcome of the mean-value step: `k` roots of `g` force `k − 1` roots of `g'`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MvtCheck {
    pub roots: usize,
    pub derivative_roots: usize,
    pub holds: bool,
}

/// Counts roots of `H` on a graph curve and of `H': a₁ + a₂x₂ + ⋯ + a_nx_n = 0`
/// on its derivative curve.
pub fn mvt_check(curve: &CurveSpec, h: &Hyperplane<Rational>) -> Result<MvtCheck> {
    let derived = derivative_curve(curve)?;
    let hit = intersect(curve, h)?;
    if hit.contained {
        return Err(Error::InvalidInput("curve lies in the hyperplane".into()));
    }
    let k = hit.count();
    let mut coeffs = vec![-h.normal()[0].clone()];
    coeffs.extend(h.normal()[1..].iter().cloned());
    let derivative_roots = match Hyperplane::new(coeffs) {
        Ok(h2) => {
            let d = intersect(&derived, &h2)?;
            if d.contained {
                usize::MAX
            } else {
                d.count()
            }
        }
        // H' degenerates to the constant a₁ ≠ 0: no roots.
        Err(_) => 0,
    };
    Ok(MvtCheck { roots: k, derivative_roots, holds: k < 2 || derivative_roots >= k - 1 })
}

/// Random hyperplane with coefficients uniform on a fine rational grid in `[−1, 1]`.
pub fn random_hyperplane(rng: &mut impl Rng, dimension: usize) -> Hyperplane<Rational> {
    const DEN: i64 = 1 << 20;
    loop {
        let coeffs: Vec<Rational> =
            (0..=dimension).map(|_| Rational::new(rng.gen_range(-DEN..=DEN).into(), DEN.into())).collect();
        if let Ok(h) = Hyperplane::new(coeffs) {
            return h;
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IntersectionSurvey {
    pub trials: usize,
    pub seed: u64,
    /// Largest observed count: an empirical lower estimate of `N(Γ)`.
    pub max_intersections: usize,
    /// `histogram[k]` = number of hyperplanes meeting the curve `k` times.
    pub histogram: Vec<usize>,
    pub uncertified: usize,
    /// MVT checks run (graph-form curves, trials with at least two roots).
    pub mvt_checked: usize,
    pub mvt_failures: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mvt_counterexample: Option<Hyperplane<Rational>>,
}

/// Seeded survey of random hyperplanes; trials run in parallel and are
/// reduced in trial order.
pub fn survey_intersections(curve: &CurveSpec, trials: usize, seed: u64) -> Result<IntersectionSurvey> {
    if trials == 0 {
        return Err(Error::InvalidInput("trials must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let planes: Vec<Hyperplane<Rational>> =
        (0..trials).map(|_| random_hyperplane(&mut rng, curve.dimension())).collect();
    let graph_form = derivative_curve(curve).is_ok();
    let results: Vec<(Intersection, Option<MvtCheck>)> = planes
        .par_iter()
        .map(|h| {
            let hit = intersect(curve, h)?;
            let mvt = if graph_form && hit.count() >= 2 { Some(mvt_check(curve, h)?) } else { None };
            Ok((hit, mvt))
        })
        .collect::<Result<_>>()?;
    let max = results.iter().map(|(r, _)| r.count()).max().unwrap_or(0);
    let mut histogram = vec![0usize; max + 1];
    let mut survey = IntersectionSurvey {
        trials,
        seed,
        max_intersections: max,
        histogram: Vec::new(),
        uncertified: 0,
        mvt_checked: 0,
        mvt_failures: 0,
        mvt_counterexample: None,
    };
    for ((r, mvt), h) in results.iter().zip(&planes) {
        histogram[r.count()] += 1;
        survey.uncertified += usize::from(!r.certified);
        if let Some(m) = mvt {
            survey.mvt_checked += 1;
            if !m.holds {
                survey.mvt_failures += 1;
                survey.mvt_counterexample.get_or_insert_with(|| h.clone());
            }
        }
    }
    survey.histogram = histogram;
    Ok(survey)
}

/// Maximum root count over `trials` seeded random hyperplanes.
pub fn max_intersections(curve: &CurveSpec, trials: usize, seed: u64) -> Result<usize> {
    Ok(survey_intersections(curve, trials, seed)?.max_intersections)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, rat};

    fn plane(c: &[Rational]) -> Hyperplane<Rational> {
        Hyperplane::new(c.to_vec()).unwrap()
    }

    #[test]
    fn normalization() {
        let h = plane(&[int(3), int(-4), int(2)]);
        assert_eq!(h.coefficients(), &[rat(3, 4), int(-1), rat(1, 2)]);
        assert!(Hyperplane::new(vec![int(1), int(0)]).is_err());
        let f = Hyperplane::new(vec![1.0, 0.5, -2.0]).unwrap();
        assert_eq!(f.coefficients(), &[0.5, 0.25, -1.0]);
        assert_eq!(serde_json::to_string(&h).unwrap(), r#"["3/4","-1/1","1/2"]"#);
        let back: Hyperplane<Rational> = serde_json::from_str(r#"["3","-4","2"]"#).unwrap();
        assert_eq!(back, h);
    }

    #[test]
    fn parabola_horizontal_line() {
        let r = intersect(&CurveSpec::parabola(), &plane(&[rat(1, 4), int(0), int(1)])).unwrap();
        assert_eq!(r.count(), 1);
        assert_eq!(r.roots[0].interval.lo, rat(1, 2));
        assert!(r.roots[0].interval.is_exact());
    }

    #[test]
    fn moment_plane_through_origin() {
        let r = intersect(&CurveSpec::moment(3).unwrap(), &plane(&[int(0), int(1), int(1), int(1)])).unwrap();
        assert_eq!(r.count(), 1);
        assert_eq!(r.roots[0].interval.lo, int(0));
    }

    #[test]
    fn tangential_roots() {
        // y = 0 touches the parabola at t = 0, and the double root is recorded.
        let r = intersect(&CurveSpec::parabola().restrict(int(0), int(1)).unwrap(), &plane(&[int(0), int(0), int(1)]))
            .unwrap();
        assert_eq!(r.count(), 1);
        assert_eq!(r.roots[0].multiplicity, Some(2));
        assert!(r.roots[0].tangential);
        // The line y = 1 touches the circle at t = 1/4.
        let r = intersect(&CurveSpec::circle(), &plane(&[int(1), int(0), int(1)])).unwrap();
        assert_eq!(r.count(), 1);
        assert!(r.roots[0].tangential);
        assert!((r.roots[0].interval.approx() - 0.25).abs() < 1e-9);
    }

    #[test]
    fn circle_secant() {
        let r = intersect(&CurveSpec::circle(), &plane(&[int(0), int(1), int(0)])).unwrap();
        let ts: Vec<f64> = r.roots.iter().map(|x| x.interval.approx()).collect();
        assert_eq!(ts.len(), 2);
        assert!((ts[0] - 0.25).abs() < 1e-12 && (ts[1] - 0.75).abs() < 1e-12);
        assert!(r.certified);
    }

    #[test]
    fn contained_curve() {
        let lifted =
            crate::lifting::lift_curve(&CurveSpec::parabola(), &crate::lifting::MonomialSet::parse("x,y,x^2").unwrap())
                .unwrap();
        let r = intersect(&lifted, &plane(&[int(0), int(0), int(1), int(-1)])).unwrap();
        assert!(r.contained);
    }

    #[test]
    fn derivative_curves() {
        let d = derivative_curve(&CurveSpec::moment(3).unwrap()).unwrap();
        assert_eq!(
            d.polynomials().unwrap(),
            &[Polynomial::new(vec![int(0), int(2)]), Polynomial::new(vec![int(0), int(0), int(3)])]
        );
        assert_eq!(d.wronskian(&rat(1, 3)).unwrap().as_exact(), Some(&int(12)));
        let d = derivative_curve(&CurveSpec::parabola()).unwrap();
        assert_eq!(d.dimension(), 1);
        assert_eq!(d.polynomials().unwrap()[0], Polynomial::new(vec![int(0), int(2)]));
        assert!(matches!(derivative_curve(&CurveSpec::circle()), Err(Error::InvalidForm(_))));
        let bent = CurveSpec::polynomial(
            vec![Polynomial::new(vec![int(0), int(0), int(1)]), Polynomial::identity()],
            int(0),
            int(1),
        )
        .unwrap();
        assert!(matches!(derivative_curve(&bent), Err(Error::InvalidForm(_))));
    }

    #[test]
    fn affine_reparameterization() {
        // (1 − t/2, t²) on [0, 1] is the graph y = 4(1 − x)² over [1/2, 1].
        let c = CurveSpec::polynomial(
            vec![Polynomial::new(vec![int(1), rat(-1, 2)]), Polynomial::new(vec![int(0), int(0), int(1)])],
            int(0),
            int(1),
        )
        .unwrap();
        let g = to_graph_form(&c).unwrap();
        assert_eq!(g.domain(), (&rat(1, 2), &int(1)));
        assert_eq!(g.polynomials().unwrap()[1], Polynomial::new(vec![int(4), int(-8), int(4)]));
        let d = derivative_curve(&c).unwrap();
        assert_eq!(d.polynomials().unwrap()[0], Polynomial::new(vec![int(0), int(-4)]));
    }

    #[test]
    fn surveys() {
        let s = survey_intersections(&CurveSpec::parabola(), 300, 7).unwrap();
        assert_eq!(s.max_intersections, 2);
        assert_eq!(s.mvt_failures, 0);
        assert!(s.mvt_checked > 0);
        assert!(max_intersections(&CurveSpec::moment(3).unwrap(), 300, 7).unwrap() <= 3);
        assert!(max_intersections(&CurveSpec::circle(), 300, 7).unwrap() <= 2);
        assert_eq!(
            survey_intersections(&CurveSpec::parabola(), 50, 3).unwrap(),
            survey_intersections(&CurveSpec::parabola(), 50, 3).unwrap()
        );
    }
}

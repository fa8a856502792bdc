//! Counting points of a finite set or a scaled lattice inside the closed
//! δ-neighborhood of a curve.
//!
//! The parameter interval is split into arcs short enough that each arc lies
//! within `sag` of its chord. Each arc's endpoint box, inflated by `δ + sag`,
//! is used to gather candidates from a spatial index. Every candidate is then
//! decided by minimising `|γ(t) − p|²` over the arcs that produced it. Points
//! whose distance falls inside a thin band around `δ` are re-decided exactly
//! for polynomial curves, and flagged as uncertified otherwise.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curve::{CurveKind, CurveRef, CurveSpec};
use crate::error::{Error, Result};
use crate::point_sets::{ExactPoint, FiniteSet, Gap, WorkCaps};
use crate::poly::Polynomial;
use crate::roots::has_root_in;
use crate::scalar::{format_rational, parse_rational, rational_to_f64, Rational};

/// Relative half-width of the band around `δ` in which floating distances
/// are not trusted.
pub const AMBIGUITY_BAND: f64 = 1e-9;

/// Subintervals used when scanning one arc for stationary points.
const ARC_SCAN: usize = 8;

/// Upper limit on the number of arcs a single query may generate.
const MAX_ARCS: usize = 1 << 22;

#[derive(Clone, Debug, PartialEq)]
pub enum PointSource {
    Explicit(FiniteSet),
    /// `(1/N)ℤⁿ ∩ box`, with the box given per coordinate as `[lo, hi]`.
    Lattice {
        n: u64,
        bounds: Vec<[Rational; 2]>,
    },
    Gap(Gap),
}

impl PointSource {
    pub fn lattice(n: u64, bounds: Vec<[Rational; 2]>) -> Result<Self> {
        let src = PointSource::Lattice { n, bounds };
        src.validate()?;
        Ok(src)
    }

    /// `(1/N)ℤ² ∩ [0, 1]²`
    pub fn unit_square_lattice(n: u64) -> Self {
        let unit = [Rational::zero(), Rational::from_integer(1.into())];
        PointSource::Lattice { n, bounds: vec![unit.clone(), unit] }
    }

    fn validate(&self) -> Result<()> {
        if let PointSource::Lattice { n, bounds } = self {
            if *n == 0 {
                return Err(Error::InvalidInput("lattice modulus N must be positive".into()));
            }
            if bounds.is_empty() {
                return Err(Error::InvalidInput("lattice source needs a bounded box".into()));
            }
            if bounds.iter().any(|[lo, hi]| lo > hi) {
                return Err(Error::InvalidInput("lattice box has lo > hi".into()));
            }
        }
        Ok(())
    }

    pub fn dimension(&self) -> usize {
        match self {
            PointSource::Explicit(s) => s.dimension(),
            PointSource::Lattice { bounds, .. } => bounds.len(),
            PointSource::Gap(g) => g.dimension(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct TubeQuery {
    pub curve: CurveSpec,
    pub delta: Rational,
    pub source: PointSource,
    pub keep_points: bool,
    pub caps: WorkCaps,
}

impl TubeQuery {
    pub fn new(curve: CurveSpec, delta: Rational, source: PointSource) -> Self {
        Self { curve, delta, source, keep_points: false, caps: WorkCaps::default() }
    }

    pub fn keep_points(mut self, keep: bool) -> Self {
        self.keep_points = keep;
        self
    }

    pub fn with_caps(mut self, caps: WorkCaps) -> Self {
        self.caps = caps;
        self
    }

    fn validate(&self) -> Result<()> {
        if !self.delta.is_positive() {
            return Err(Error::InvalidInput("delta must be positive".into()));
        }
        self.source.validate()?;
        if self.source.dimension() != self.curve.dimension() {
            return Err(Error::DimensionMismatch { left: self.curve.dimension(), right: self.source.dimension() });
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CountResult {
    pub count: u64,
    pub certified: bool,
    pub arcs_examined: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub matched_points: Option<FiniteSet>,
    /// Points whose distance could not be separated from `δ`.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub ambiguous_points: Vec<ExactPoint>,
}

/// Source points in a form the hot loops can use.
enum Index {
    Lattice { n: u64, lo: Vec<i64>, hi: Vec<i64> },
    Grid { cell: f64, cells: HashMap<Vec<i64>, Vec<usize>>, points: Vec<ExactPoint>, approx: Vec<Vec<f64>> },
}

fn ceil_div(r: &Rational) -> Result<i64> {
    r.ceil().to_integer().to_i64().ok_or_else(|| Error::InvalidInput("lattice box is too large".into()))
}

fn floor_div(r: &Rational) -> Result<i64> {
    r.floor().to_integer().to_i64().ok_or_else(|| Error::InvalidInput("lattice box is too large".into()))
}

impl Index {
    fn build(source: &PointSource, delta: f64, caps: WorkCaps) -> Result<Self> {
        match source {
            PointSource::Lattice { n, bounds } => {
                let scale = Rational::from_integer(BigInt::from(*n));
                let lo = bounds.iter().map(|[l, _]| ceil_div(&(l * &scale))).collect::<Result<_>>()?;
                let hi = bounds.iter().map(|[_, h]| floor_div(&(h * &scale))).collect::<Result<_>>()?;
                Ok(Index::Lattice { n: *n, lo, hi })
            }
            PointSource::Explicit(set) => Ok(Self::grid(set, delta)),
            PointSource::Gap(g) => Ok(Self::grid(&g.enumerate(caps.enumeration)?, delta)),
        }
    }

    fn grid(set: &FiniteSet, delta: f64) -> Self {
        let sep = set.min_separation().map(|s| s.distance).unwrap_or(0.0);
        let cell = delta.max(sep);
        let approx: Vec<Vec<f64>> = set.iter().map(|p| p.to_f64()).collect();
        let mut cells: HashMap<Vec<i64>, Vec<usize>> = HashMap::new();
        for (i, x) in approx.iter().enumerate() {
            cells.entry(cell_key(x, cell)).or_default().push(i);
        }
        Index::Grid { cell, cells, points: set.points().to_vec(), approx }
    }

    fn point(&self, key: &Key) -> ExactPoint {
        match (self, key) {
            (Index::Lattice { n, .. }, Key::Lattice(k)) => {
                let d = BigInt::from(*n);
                ExactPoint::new(k.iter().map(|&v| Rational::new(BigInt::from(v), d.clone())).collect())
            }
            (Index::Grid { points, .. }, Key::Explicit(i)) => points[*i].clone(),
            _ => unreachable!("key kind matches index kind"),
        }
    }

    fn approx(&self, key: &Key) -> Vec<f64> {
        match (self, key) {
            (Index::Lattice { n, .. }, Key::Lattice(k)) => k.iter().map(|&v| v as f64 / *n as f64).collect(),
            (Index::Grid { approx, .. }, Key::Explicit(i)) => approx[*i].clone(),
            _ => unreachable!("key kind matches index kind"),
        }
    }

    /// Number of source points in the box, used for cap checks.
    fn box_volume(&self, lo: &[f64], hi: &[f64]) -> u128 {
        match self {
            Index::Lattice { n, lo: blo, hi: bhi } => {
                let mut v: u128 = 1;
                for i in 0..lo.len() {
                    let a = ((lo[i] * *n as f64).floor() as i64 - 1).max(blo[i]);
                    let b = ((hi[i] * *n as f64).ceil() as i64 + 1).min(bhi[i]);
                    if b < a {
                        return 0;
                    }
                    v = v.saturating_mul((b - a + 1) as u128);
                }
                v
            }
            Index::Grid { cell, .. } => {
                let mut v: u128 = 1;
                for i in 0..lo.len() {
                    let a = (lo[i] / cell).floor() as i64;
                    let b = (hi[i] / cell).floor() as i64;
                    v = v.saturating_mul((b - a + 1).max(0) as u128);
                }
                v
            }
        }
    }

    fn candidates(&self, lo: &[f64], hi: &[f64], out: &mut Vec<Key>) {
        match self {
            Index::Lattice { n, lo: blo, hi: bhi } => {
                let nf = *n as f64;
                let ranges: Vec<(i64, i64)> = (0..lo.len())
                    .map(|i| {
                        // One extra index on each side absorbs rounding in the box.
                        let a = ((lo[i] * nf).floor() as i64 - 1).max(blo[i]);
                        let b = ((hi[i] * nf).ceil() as i64 + 1).min(bhi[i]);
                        (a, b)
                    })
                    .collect();
                for_each_cell(&ranges, |k| out.push(Key::Lattice(k.to_vec())));
            }
            Index::Grid { cell, cells, .. } => {
                let ranges: Vec<(i64, i64)> = (0..lo.len())
                    .map(|i| ((lo[i] / cell).floor() as i64 - 1, (hi[i] / cell).floor() as i64 + 1))
                    .collect();
                for_each_cell(&ranges, |k| {
                    if let Some(ids) = cells.get(k) {
                        out.extend(ids.iter().map(|&i| Key::Explicit(i)));
                    }
                });
            }
        }
    }
}

fn cell_key(x: &[f64], cell: f64) -> Vec<i64> {
    x.iter().map(|v| (v / cell).floor() as i64).collect()
}

fn for_each_cell(ranges: &[(i64, i64)], mut f: impl FnMut(&[i64])) {
    if ranges.iter().any(|(a, b)| b < a) {
        return;
    }
    let mut k: Vec<i64> = ranges.iter().map(|r| r.0).collect();
    loop {
        f(&k);
        let mut i = 0;
        loop {
            if i == k.len() {
                return;
            }
            if k[i] < ranges[i].1 {
                k[i] += 1;
                break;
            }
            k[i] = ranges[i].0;
            i += 1;
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Key {
    Lattice(Vec<i64>),
    Explicit(usize),
}

#[derive(Clone, Copy, Debug)]
struct Arc {
    a: f64,
    b: f64,
}

/// Splits the domain until every arc has length and sagitta at most `limit`.
fn subdivide(curve: &CurveSpec, limit: f64) -> Result<Vec<Arc>> {
    let (lo, hi) = curve.domain_f64();
    let mut stack = vec![Arc { a: lo, b: hi }];
    let mut out = Vec::new();
    while let Some(arc) = stack.pop() {
        let h = arc.b - arc.a;
        let length = h * curve.derivative_norm_bound(1, arc.a, arc.b);
        let sag = h * h / 8.0 * curve.derivative_norm_bound(2, arc.a, arc.b);
        if (length <= limit && sag <= limit) || h <= f64::EPSILON * 4.0 {
            out.push(arc);
        } else {
            let mid = 0.5 * (arc.a + arc.b);
            stack.push(Arc { a: mid, b: arc.b });
            stack.push(Arc { a: arc.a, b: mid });
        }
        if out.len() + stack.len() > MAX_ARCS {
            return Err(Error::SizeCap { what: "tube arcs", needed: MAX_ARCS as u128 + 1, cap: MAX_ARCS as u128 });
        }
    }
    out.sort_by(|x, y| x.a.total_cmp(&y.a));
    Ok(out)
}

fn sq_dist(x: &[f64], p: &[f64]) -> f64 {
    x.iter().zip(p).map(|(a, b)| (a - b) * (a - b)).sum()
}

/// `½ d/dt |γ(t) − p|²`
fn stationarity(curve: &CurveSpec, t: f64, p: &[f64]) -> f64 {
    let (x, v) = curve.point_and_tangent_f64(t);
    x.iter().zip(&v).zip(p).map(|((xi, vi), pi)| vi * (xi - pi)).sum()
}

/// `min_{t ∈ [a, b]} |γ(t) − p|²` by scanning for sign changes of the
/// stationarity condition and bisecting each.
fn min_sq_dist_on(curve: &CurveSpec, arc: Arc, p: &[f64]) -> f64 {
    let mut best = sq_dist(&curve.point_f64(arc.a), p).min(sq_dist(&curve.point_f64(arc.b), p));
    let step = (arc.b - arc.a) / ARC_SCAN as f64;
    let mut t0 = arc.a;
    let mut g0 = stationarity(curve, t0, p);
    for i in 1..=ARC_SCAN {
        let t1 = if i == ARC_SCAN { arc.b } else { arc.a + step * i as f64 };
        let g1 = stationarity(curve, t1, p);
        if g0 < 0.0 && g1 >= 0.0 {
            let (mut lo, mut hi) = (t0, t1);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if stationarity(curve, mid, p) < 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            best = best.min(sq_dist(&curve.point_f64(lo), p)).min(sq_dist(&curve.point_f64(hi), p));
        }
        t0 = t1;
        g0 = g1;
    }
    best
}

/// Exact closed-neighborhood membership for polynomial curves:
/// `min_t |γ(t) − p|² ≤ δ²` over the whole domain.
fn exact_inside(curve: &CurveSpec, p: &ExactPoint, delta: &Rational) -> Option<bool> {
    let polys = curve.polynomials()?;
    let mut d = Polynomial::constant(-(delta * delta));
    for (g, c) in polys.iter().zip(p.coords()) {
        let diff = g - &Polynomial::constant(c.clone());
        d = &d + &(&diff * &diff);
    }
    let (lo, hi) = curve.domain();
    Some(!d.eval(lo).is_positive() || !d.eval(hi).is_positive() || has_root_in(&d, lo, hi))
}

/// Floating error allowance for a squared-distance evaluation near `p`.
fn float_error(p: &[f64], delta: f64) -> f64 {
    let scale = 1.0 + p.iter().map(|v| v.abs()).fold(0.0, f64::max);
    (AMBIGUITY_BAND * delta).max(64.0 * f64::EPSILON * scale)
}

enum Decision {
    Inside,
    Outside,
    /// Floating-point decision inside the ambiguity band.
    Unresolved(bool),
}

fn decide(curve: &CurveSpec, arcs: &[Arc], point: &ExactPoint, p: &[f64], delta: &Rational, delta_f: f64) -> Decision {
    let d2 = arcs.iter().map(|&a| min_sq_dist_on(curve, a, p)).fold(f64::INFINITY, f64::min);
    let dist = d2.sqrt();
    if (dist - delta_f).abs() > float_error(p, delta_f) {
        return if dist <= delta_f { Decision::Inside } else { Decision::Outside };
    }
    match exact_inside(curve, point, delta) {
        Some(true) => Decision::Inside,
        Some(false) => Decision::Outside,
        None => Decision::Unresolved(dist <= delta_f),
    }
}

/// Number of source points at distance at most `δ` from the curve.
pub fn count_in_tube(q: &TubeQuery) -> Result<CountResult> {
    q.validate()?;
    let delta_f = rational_to_f64(&q.delta);
    let index = Index::build(&q.source, delta_f, q.caps)?;
    let spacing = match (&q.source, &index) {
        (PointSource::Lattice { n, .. }, _) => 1.0 / *n as f64,
        (_, Index::Grid { cell, .. }) => *cell,
        _ => unreachable!(),
    };
    let arcs = subdivide(&q.curve, delta_f.max(spacing))?;

    // Candidate gathering per arc.
    let boxes: Vec<(Vec<f64>, Vec<f64>)> = arcs
        .par_iter()
        .map(|arc| {
            let h = arc.b - arc.a;
            let sag = h * h / 8.0 * q.curve.derivative_norm_bound(2, arc.a, arc.b);
            let pa = q.curve.point_f64(arc.a);
            let pb = q.curve.point_f64(arc.b);
            let pad = delta_f + sag;
            let lo = pa.iter().zip(&pb).map(|(x, y)| x.min(*y) - pad).collect();
            let hi = pa.iter().zip(&pb).map(|(x, y)| x.max(*y) + pad).collect();
            (lo, hi)
        })
        .collect();
    let work: u128 = boxes.iter().map(|(lo, hi)| index.box_volume(lo, hi)).fold(0u128, u128::saturating_add);
    if work > q.caps.enumeration {
        return Err(Error::SizeCap { what: "tube candidates", needed: work, cap: q.caps.enumeration });
    }
    let per_arc: Vec<Vec<Key>> = boxes
        .par_iter()
        .map(|(lo, hi)| {
            let mut v = Vec::new();
            index.candidates(lo, hi, &mut v);
            v
        })
        .collect();
    let mut owners: BTreeMap<Key, Vec<usize>> = BTreeMap::new();
    for (i, keys) in per_arc.into_iter().enumerate() {
        for k in keys {
            owners.entry(k).or_default().push(i);
        }
    }

    let owners: Vec<(Key, Vec<usize>)> = owners.into_iter().collect();
    let decisions: Vec<(ExactPoint, Decision)> = owners
        .par_iter()
        .map(|(key, arc_ids)| {
            let point = index.point(key);
            let approx = index.approx(key);
            let own: Vec<Arc> = arc_ids.iter().map(|&i| arcs[i]).collect();
            let d = decide(&q.curve, &own, &point, &approx, &q.delta, delta_f);
            (point, d)
        })
        .collect();

    let mut matched = Vec::new();
    let mut ambiguous = Vec::new();
    for (p, d) in decisions {
        match d {
            Decision::Inside => matched.push(p),
            Decision::Outside => {}
            Decision::Unresolved(inside) => {
                ambiguous.push(p.clone());
                if inside {
                    matched.push(p);
                }
            }
        }
    }
    let count = matched.len() as u64;
    Ok(CountResult {
        count,
        certified: ambiguous.is_empty(),
        arcs_examined: arcs.len() as u64,
        matched_points: if q.keep_points { Some(FiniteSet::new(q.curve.dimension(), matched)?) } else { None },
        ambiguous_points: ambiguous,
    })
}

/// `Γ ∩ (1/N ℤ)²` for a graph `y = f(x)`, over `x ∈ [x_lo, x_hi]`.
pub fn count_on_curve_lattice(graph: &CurveSpec, n: u64, x_range: Option<[Rational; 2]>) -> Result<FiniteSet> {
    let f = graph_function(graph)?;
    if n == 0 {
        return Err(Error::InvalidInput("N must be positive".into()));
    }
    let [lo, hi] = x_range.unwrap_or_else(|| {
        let (a, b) = graph.domain();
        [a.clone(), b.clone()]
    });
    let big_n = BigInt::from(n);
    let scale = Rational::from_integer(big_n.clone());
    let k_lo = ceil_div(&(&lo * &scale))?;
    let k_hi = floor_div(&(&hi * &scale))?;
    // With f = P/D for an integer polynomial P, N·f(k/N) ∈ ℤ iff D·N^{deg}
    // divides N^{deg+1}·P(k/N), which is an integer polynomial in k.
    let deg = f.degree().unwrap_or(0) as u32;
    let denom = crate::scalar::common_denominator(f.coeffs());
    let np = num_traits::pow::pow(big_n.clone(), deg as usize);
    let modulus = &denom * &np;
    // Integer coefficients c_j = D·a_j·N^{deg+1−j}; then Σ c_j k^j = D·N^{deg+1}·f(k/N).
    let coeffs: Vec<BigInt> = f
        .coeffs()
        .iter()
        .enumerate()
        .map(|(j, a)| {
            let c = a * Rational::from_integer(&denom * num_traits::pow::pow(big_n.clone(), deg as usize + 1 - j));
            debug_assert!(c.is_integer());
            c.to_integer()
        })
        .collect();
    let points: Vec<ExactPoint> = (k_lo..=k_hi)
        .into_par_iter()
        .filter_map(|k| {
            let kb = BigInt::from(k);
            let mut acc = BigInt::zero();
            for c in coeffs.iter().rev() {
                acc = acc * &kb + c;
            }
            acc.is_multiple_of(&modulus).then(|| {
                let x = Rational::new(kb, big_n.clone());
                ExactPoint::new(vec![x.clone(), f.eval(&x)])
            })
        })
        .collect();
    FiniteSet::new(2, points)
}

/// `f` for a planar curve of the form `(t, f(t))`.
fn graph_function(curve: &CurveSpec) -> Result<Polynomial<Rational>> {
    let polys = curve
        .polynomials()
        .ok_or_else(|| Error::InvalidForm("on-curve enumeration needs a polynomial graph".into()))?;
    if polys.len() != 2 || polys[0] != Polynomial::identity() {
        return Err(Error::InvalidForm("on-curve enumeration needs a planar graph (t, f(t))".into()));
    }
    Ok(polys[1].clone())
}

/// Independent reference count: dense arclength sampling plus golden-section
/// refinement, with the same closed-boundary rule.
pub fn brute_force_tube_oracle(q: &TubeQuery) -> Result<CountResult> {
    q.validate()?;
    let delta_f = rational_to_f64(&q.delta);
    let (t_lo, t_hi) = q.curve.domain_f64();
    let speed = q.curve.derivative_norm_bound(1, t_lo, t_hi).max(1e-300);
    let ds = delta_f / 100.0;
    let samples = (((t_hi - t_lo) * speed / ds).ceil() as u128).max(1);
    if samples > 1u128 << 32 {
        return Err(Error::SizeCap { what: "oracle samples", needed: samples, cap: 1u128 << 32 });
    }
    let samples = samples as usize;
    let dt = (t_hi - t_lo) / samples as f64;
    let h = dt * speed;

    let source_points: Vec<ExactPoint> = match &q.source {
        PointSource::Explicit(s) => s.points().to_vec(),
        PointSource::Gap(g) => g.enumerate(q.caps.enumeration)?.points().to_vec(),
        PointSource::Lattice { .. } => Vec::new(),
    };
    if source_points.len() > 1_000_000 {
        return Err(Error::SizeCap { what: "oracle source", needed: source_points.len() as u128, cap: 1_000_000 });
    }
    let index = match &q.source {
        PointSource::Lattice { .. } => Index::build(&q.source, delta_f, q.caps)?,
        _ => Index::grid(&FiniteSet::new(q.curve.dimension(), source_points)?, delta_f),
    };

    // Best sample parameter per candidate point.
    let radius = delta_f + h;
    let best: HashMap<Key, (f64, f64)> = (0..=samples)
        .into_par_iter()
        .fold(HashMap::new, |mut acc: HashMap<Key, (f64, f64)>, i| {
            let t = t_lo + dt * i as f64;
            let x = q.curve.point_f64(t.min(t_hi));
            let lo: Vec<f64> = x.iter().map(|v| v - radius).collect();
            let hi: Vec<f64> = x.iter().map(|v| v + radius).collect();
            let mut keys = Vec::new();
            index.candidates(&lo, &hi, &mut keys);
            for k in keys {
                let p = index.approx(&k);
                let d = sq_dist(&x, &p);
                if d <= radius * radius {
                    let e = acc.entry(k).or_insert((f64::INFINITY, t));
                    if d < e.0 {
                        *e = (d, t);
                    }
                }
            }
            acc
        })
        .reduce(HashMap::new, |mut a, b| {
            for (k, v) in b {
                let e = a.entry(k).or_insert(v);
                if v.0 < e.0 {
                    *e = v;
                }
            }
            a
        });

    let mut keys: Vec<(Key, f64)> = best.into_iter().map(|(k, (_, t))| (k, t)).collect();
    keys.sort_by(|a, b| a.0.cmp(&b.0));
    let decided: Vec<(ExactPoint, bool, bool)> = keys
        .par_iter()
        .map(|(k, t)| {
            let p = index.approx(k);
            let d = golden_min(&q.curve, &p, (t - 2.0 * dt).max(t_lo), (t + 2.0 * dt).min(t_hi)).sqrt();
            let ambiguous = (d - delta_f).abs() <= float_error(&p, delta_f);
            (index.point(k), d <= delta_f, ambiguous)
        })
        .collect();

    let mut matched = Vec::new();
    let mut ambiguous = Vec::new();
    for (p, inside, amb) in decided {
        if amb {
            ambiguous.push(p.clone());
        }
        if inside {
            matched.push(p);
        }
    }
    Ok(CountResult {
        count: matched.len() as u64,
        certified: ambiguous.is_empty(),
        arcs_examined: samples as u64,
        matched_points: if q.keep_points { Some(FiniteSet::new(q.curve.dimension(), matched)?) } else { None },
        ambiguous_points: ambiguous,
    })
}

fn golden_min(curve: &CurveSpec, p: &[f64], mut a: f64, mut b: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let f = |t: f64| sq_dist(&curve.point_f64(t), p);
    let mut best = f(a).min(f(b));
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..100 {
        if b - a <= f64::EPSILON * (1.0 + a.abs()) {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
        best = best.min(fc).min(fd);
    }
    best.min(fc).min(fd)
}

/// `δ` as `"p/q"` or as `d/Nⁿ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DeltaSpec {
    Value(String),
    Scaled {
        #[serde(default = "one_string")]
        d: String,
        #[serde(rename = "N")]
        big_n: u64,
        n: u32,
    },
}

fn one_string() -> String {
    "1".into()
}

impl DeltaSpec {
    pub fn value(&self) -> Result<Rational> {
        let v = match self {
            DeltaSpec::Value(s) => parse_rational(s)?,
            DeltaSpec::Scaled { d, big_n, n } => {
                if *big_n == 0 {
                    return Err(Error::InvalidInput("N must be positive".into()));
                }
                parse_rational(d)? / Rational::from_integer(num_traits::pow::pow(BigInt::from(*big_n), *n as usize))
            }
        };
        if !v.is_positive() {
            return Err(Error::InvalidInput(format!("delta must be positive, got {}", format_rational(&v))));
        }
        Ok(v)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum SourceSpec {
    Explicit {
        points: FiniteSet,
    },
    Lattice {
        #[serde(rename = "N")]
        n: u64,
        #[serde(rename = "box", default)]
        bounds: Option<Vec<[String; 2]>>,
    },
    Gap(Gap),
}

impl SourceSpec {
    pub fn to_source(&self) -> Result<PointSource> {
        match self {
            SourceSpec::Explicit { points } => Ok(PointSource::Explicit(points.clone())),
            SourceSpec::Lattice { n, bounds } => {
                let bounds =
                    bounds.as_ref().ok_or_else(|| Error::InvalidInput("lattice source needs a bounded box".into()))?;
                let bounds = bounds
                    .iter()
                    .map(|[lo, hi]| Ok([parse_rational(lo)?, parse_rational(hi)?]))
                    .collect::<Result<Vec<_>>>()?;
                PointSource::lattice(*n, bounds)
            }
            SourceSpec::Gap(g) => {
                g.validate()?;
                Ok(PointSource::Gap(g.clone()))
            }
        }
    }
}

/// Query file: `{curve, delta, source, keep_points}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TubeQueryFile {
    pub curve: CurveRef,
    pub delta: DeltaSpec,
    pub source: SourceSpec,
    #[serde(default)]
    pub keep_points: bool,
}

impl TubeQueryFile {
    pub fn resolve(&self, base_dir: Option<&Path>) -> Result<TubeQuery> {
        let curve = self.curve.resolve(base_dir)?;
        Ok(TubeQuery::new(curve, self.delta.value()?, self.source.to_source()?).keep_points(self.keep_points))
    }
}

/// The planar lattice box a builtin curve naturally lives in.
pub fn default_box(curve: &CurveSpec) -> Vec<[Rational; 2]> {
    let one = Rational::from_integer(1.into());
    let unit = [Rational::zero(), one.clone()];
    let sym = [-one.clone(), one];
    match curve.kind() {
        CurveKind::CircleArc => vec![sym.clone(); curve.dimension()],
        _ => vec![unit; curve.dimension()],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, rat};

    fn lattice_query(curve: CurveSpec, delta: Rational, n: u64) -> TubeQuery {
        let bounds = default_box(&curve);
        TubeQuery::new(curve, delta, PointSource::lattice(n, bounds).unwrap()).keep_points(true)
    }

    #[test]
    fn on_curve_enumeration() {
        let parabola = CurveSpec::parabola();
        let pts = count_on_curve_lattice(&parabola, 4, None).unwrap();
        let xs: Vec<Rational> = pts.iter().map(|p| p.coords()[0].clone()).collect();
        assert_eq!(xs, vec![int(0), rat(1, 2), int(1)]);
        for m in 2..=12u64 {
            assert_eq!(count_on_curve_lattice(&parabola, m * m, None).unwrap().len() as u64, m + 1);
        }
        let shifted = CurveSpec::graph(vec![Polynomial::new(vec![rat(1, 3), int(0), int(1)])], int(0), int(1)).unwrap();
        assert_eq!(count_on_curve_lattice(&shifted, 3, None).unwrap().len(), 2);
        assert!(count_on_curve_lattice(&CurveSpec::circle(), 3, None).is_err());
        assert!(count_on_curve_lattice(&crate::curve::make_moment_curve(2).unwrap(), 3, None).is_ok());
    }

    #[test]
    fn on_curve_matches_naive_test() {
        let f = Polynomial::new(vec![rat(1, 6), rat(-2, 3), rat(5, 2), rat(1, 4)]);
        let curve = CurveSpec::graph(vec![f.clone()], int(0), int(1)).unwrap();
        for n in [1u64, 2, 6, 12, 24, 36] {
            let fast = count_on_curve_lattice(&curve, n, Some([int(-1), int(2)])).unwrap();
            let naive: Vec<ExactPoint> = (-(n as i64)..=2 * n as i64)
                .map(|k| rat(k, n as i64))
                .filter(|x| (f.eval(x) * int(n as i64)).is_integer())
                .map(|x| ExactPoint::new(vec![x.clone(), f.eval(&x)]))
                .collect();
            assert_eq!(fast.points(), FiniteSet::new(2, naive).unwrap().points());
        }
    }

    #[test]
    fn parabola_contains_on_curve_points() {
        let r = count_in_tube(&lattice_query(CurveSpec::parabola(), rat(1, 16), 4)).unwrap();
        assert!(r.certified);
        let matched = r.matched_points.unwrap();
        for p in count_on_curve_lattice(&CurveSpec::parabola(), 4, None).unwrap().iter() {
            assert!(matched.contains(p));
        }
    }

    #[test]
    fn huge_delta_counts_everything() {
        let r = count_in_tube(&lattice_query(CurveSpec::parabola(), int(3), 6)).unwrap();
        assert_eq!(r.count, 49);
        let r = count_in_tube(&lattice_query(CurveSpec::circle(), int(3), 3)).unwrap();
        assert_eq!(r.count, 49);
    }

    #[test]
    fn segment_example() {
        let seg = CurveSpec::polynomial(vec![Polynomial::identity(), Polynomial::zero()], int(0), int(1)).unwrap();
        let set = FiniteSet::new(
            2,
            vec![ExactPoint::new(vec![rat(1, 2), rat(1, 20)]), ExactPoint::new(vec![rat(1, 2), rat(1, 5)])],
        )
        .unwrap();
        let q = TubeQuery::new(seg, rat(1, 10), PointSource::Explicit(set));
        assert_eq!(count_in_tube(&q).unwrap().count, 1);
        assert_eq!(brute_force_tube_oracle(&q).unwrap().count, 1);
    }

    #[test]
    fn boundary_points_resolved_exactly() {
        // (1/2, 1/10) is exactly 1/10 from the segment and must be inside.
        let seg = CurveSpec::polynomial(vec![Polynomial::identity(), Polynomial::zero()], int(0), int(1)).unwrap();
        let set = FiniteSet::new(
            2,
            vec![
                ExactPoint::new(vec![rat(1, 2), rat(1, 10)]),
                ExactPoint::new(vec![rat(11, 10), int(0)]),
                ExactPoint::new(vec![rat(-1, 10), rat(1, 1_000_000_000_000)]),
            ],
        )
        .unwrap();
        let r = count_in_tube(&TubeQuery::new(seg, rat(1, 10), PointSource::Explicit(set))).unwrap();
        assert_eq!(r.count, 2);
        assert!(r.certified);
    }

    #[test]
    fn oracle_agrees_small() {
        for curve in [CurveSpec::parabola(), CurveSpec::builtin("cubic").unwrap(), CurveSpec::circle()] {
            for n in [8u64, 16] {
                for d in [1, 4] {
                    let q = lattice_query(curve.clone(), rat(d, (n * n) as i64), n);
                    let a = count_in_tube(&q).unwrap();
                    let b = brute_force_tube_oracle(&q).unwrap();
                    assert!(a.certified && b.certified);
                    assert_eq!(a.matched_points, b.matched_points, "{} N={n} d={d}", curve.kind().name());
                }
            }
        }
    }

    #[test]
    fn gap_source() {
        let g = Gap::new(
            ExactPoint::new(vec![int(0), int(0)]),
            vec![ExactPoint::new(vec![rat(1, 4), int(0)]), ExactPoint::new(vec![int(0), rat(1, 4)])],
            vec![4, 4],
        )
        .unwrap();
        let q = TubeQuery::new(CurveSpec::parabola(), rat(1, 100), PointSource::Gap(g));
        // (1/2, 1/4) and (1, 1) lie on the parabola.
        let r = count_in_tube(&q).unwrap();
        assert_eq!(r.count, brute_force_tube_oracle(&q).unwrap().count);
        assert!(r.count >= 2);
    }

    #[test]
    fn query_json() {
        let text = r#"{"curve":"parabola","delta":{"d":"1","N":4,"n":2},"source":{"type":"lattice","N":4,"box":[["0","1"],["0","1"]]}}"#;
        let q: TubeQueryFile = serde_json::from_str(text).unwrap();
        let q = q.resolve(None).unwrap();
        assert_eq!(q.delta, rat(1, 16));
        assert!(count_in_tube(&q).unwrap().count >= 3);
        let unbounded = r#"{"curve":"parabola","delta":"1/4","source":{"type":"lattice","N":4}}"#;
        let q: TubeQueryFile = serde_json::from_str(unbounded).unwrap();
        assert!(q.resolve(None).is_err());
        assert!(serde_json::from_str::<TubeQueryFile>(
            r#"{"curve":"parabola","delta":"0","source":{"type":"lattice","N":4}}"#
        )
        .unwrap()
        .resolve(None)
        .is_err());
    }
}

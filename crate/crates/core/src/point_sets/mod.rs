//! Exact finite point sets: sumsets, doubling, m-fold sums, additive energy,
//! generalized arithmetic progressions and minimal separation.

mod energy;
mod gap;
mod keys;

pub use energy::{
    additive_energy, check_energy_lower_bound, check_plunnecke, m_fold_sumset, representation_counts, EnergyReport,
    PlunneckeReport,
};
pub use gap::Gap;

use std::fmt;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::scalar::{format_rational, int, parse_rational, rational_to_f64, Rational};

/// Default enumeration cap on the number of produced points.
pub const DEFAULT_ENUMERATION_CAP: u128 = 10_000_000;
/// Default cap on accumulated multiplicity updates in energy computations.
pub const DEFAULT_ENERGY_CAP: u128 = 100_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WorkCaps {
    pub enumeration: u128,
    pub energy: u128,
}

impl Default for WorkCaps {
    fn default() -> Self {
        Self { enumeration: DEFAULT_ENUMERATION_CAP, energy: DEFAULT_ENERGY_CAP }
    }
}

impl WorkCaps {
    /// Same cap for both kinds of work.
    pub fn uniform(cap: u128) -> Self {
        Self { enumeration: cap, energy: cap }
    }
}

/// A point with exact rational coordinates.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct ExactPoint(Vec<Rational>);

impl ExactPoint {
    pub fn new(coords: Vec<Rational>) -> Self {
        Self(coords)
    }

    pub fn from_ints(coords: &[i64]) -> Self {
        Self(coords.iter().map(|&c| int(c)).collect())
    }

    pub fn origin(dimension: usize) -> Self {
        Self(vec![Rational::zero(); dimension])
    }

    pub fn coords(&self) -> &[Rational] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<Rational> {
        self.0
    }

    pub fn dimension(&self) -> usize {
        self.0.len()
    }

    pub fn add(&self, other: &Self) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, k: &Rational) -> Self {
        Self(self.0.iter().map(|a| a * k).collect())
    }

    pub fn squared_norm(&self) -> Rational {
        self.0.iter().map(|a| a * a).sum()
    }

    pub fn squared_distance(&self, other: &Self) -> Rational {
        self.sub(other).squared_norm()
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(rational_to_f64).collect()
    }
}

impl fmt::Display for ExactPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(format_rational).collect();
        write!(f, "({})", parts.join(", "))
    }
}

impl Serialize for ExactPoint {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.0.iter().map(format_rational))
    }
}

impl<'de> Deserialize<'de> for ExactPoint {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = Vec::<String>::deserialize(d)?;
        raw.iter()
            .map(|s| parse_rational(s))
            .collect::<Result<Vec<_>>>()
            .map(ExactPoint)
            .map_err(serde::de::Error::custom)
    }
}

/// A deduplicated, sorted set of points of a common dimension.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FiniteSet {
    points: Vec<ExactPoint>,
    dimension: usize,
}

impl FiniteSet {
    pub fn new(dimension: usize, points: impl IntoIterator<Item = ExactPoint>) -> Result<Self> {
        let mut points: Vec<ExactPoint> = points.into_iter().collect();
        if let Some(bad) = points.iter().find(|p| p.dimension() != dimension) {
            return Err(Error::DimensionMismatch { left: dimension, right: bad.dimension() });
        }
        points.sort_unstable();
        points.dedup();
        Ok(Self { points, dimension })
    }

    /// Builds from a non-empty list, taking the dimension from the first point.
    pub fn from_points(points: Vec<ExactPoint>) -> Result<Self> {
        let dim =
            points.first().map(ExactPoint::dimension).ok_or_else(|| Error::InvalidInput("empty point list".into()))?;
        Self::new(dim, points)
    }

    /// Points of `ℤ^d` given as integer tuples.
    pub fn from_int_points(points: &[Vec<i64>]) -> Result<Self> {
        Self::from_points(points.iter().map(|p| ExactPoint::from_ints(p)).collect())
    }

    pub fn empty(dimension: usize) -> Self {
        Self { points: Vec::new(), dimension }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn points(&self) -> &[ExactPoint] {
        &self.points
    }

    pub fn iter(&self) -> std::slice::Iter<'_, ExactPoint> {
        self.points.iter()
    }

    pub fn contains(&self, p: &ExactPoint) -> bool {
        self.points.binary_search(p).is_ok()
    }

    /// First point of `self` missing from `other`, if any.
    pub fn first_missing_from(&self, other: &FiniteSet) -> Option<&ExactPoint> {
        self.points.iter().find(|p| !other.contains(p))
    }

    pub fn is_subset_of(&self, other: &FiniteSet) -> bool {
        self.first_missing_from(other).is_none()
    }

    pub fn translate(&self, by: &ExactPoint) -> Result<Self> {
        self.check_dimension(by.dimension())?;
        Self::new(self.dimension, self.points.iter().map(|p| p.add(by)))
    }

    pub(crate) fn check_dimension(&self, other: usize) -> Result<()> {
        if self.dimension != other {
            return Err(Error::DimensionMismatch { left: self.dimension, right: other });
        }
        Ok(())
    }

    pub(crate) fn require_nonempty(&self) -> Result<()> {
        if self.is_empty() {
            return Err(Error::InvalidInput("operation needs a non-empty set".into()));
        }
        Ok(())
    }

    /// Exact deduplicated `A + B`.
    pub fn sumset(&self, other: &FiniteSet) -> Result<FiniteSet> {
        sumset(self, other, DEFAULT_ENUMERATION_CAP)
    }

    /// `|A + A| / |A|`
    pub fn doubling(&self) -> Result<Rational> {
        doubling(self)
    }

    pub fn min_separation(&self) -> Result<Separation> {
        min_separation(self)
    }
}

impl<'a> IntoIterator for &'a FiniteSet {
    type Item = &'a ExactPoint;
    type IntoIter = std::slice::Iter<'a, ExactPoint>;

    fn into_iter(self) -> Self::IntoIter {
        self.points.iter()
    }
}

impl Serialize for FiniteSet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.points.serialize(s)
    }
}

impl<'de> Deserialize<'de> for FiniteSet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let pts = Vec::<ExactPoint>::deserialize(d)?;
        FiniteSet::from_points(pts).map_err(serde::de::Error::custom)
    }
}

/// Exact deduplicated `A + B`, failing when `|A|·|B|` exceeds `cap`.
pub fn sumset(a: &FiniteSet, b: &FiniteSet, cap: u128) -> Result<FiniteSet> {
    a.check_dimension(b.dimension())?;
    let work = a.len() as u128 * b.len() as u128;
    if work > cap {
        return Err(Error::SizeCap { what: "sumset", needed: work, cap });
    }
    let emb = keys::Embedding::of(&[a, b], 2);
    emb.sumset(a, b)
}

pub fn doubling(a: &FiniteSet) -> Result<Rational> {
    a.require_nonempty()?;
    let aa = a.sumset(a)?;
    Ok(Rational::new(aa.len().into(), a.len().into()))
}

/// Minimal pairwise distance, carried exactly as its square.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Separation {
    #[serde(with = "crate::scalar::rational_string")]
    pub squared: Rational,
    pub distance: f64,
}

/// Sweep over points sorted by first coordinate; all comparisons are on
/// exact squared distances.
pub fn min_separation(a: &FiniteSet) -> Result<Separation> {
    if a.len() < 2 {
        return Err(Error::UndefinedSeparation);
    }
    let pts = a.points();
    let mut best: Option<Rational> = None;
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            let dx = &pts[j].coords()[0] - &pts[i].coords()[0];
            if let Some(b) = &best {
                if dx.is_positive() && &(&dx * &dx) >= b {
                    break;
                }
            }
            let d = pts[i].squared_distance(&pts[j]);
            if best.as_ref().is_none_or(|b| &d < b) {
                best = Some(d);
            }
        }
    }
    let squared = best.expect("at least one pair");
    let distance = rational_to_f64(&squared).sqrt();
    Ok(Separation { squared, distance })
}

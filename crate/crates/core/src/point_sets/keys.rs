//! Integer keys for exact sum bookkeeping.
//!
//! Multiplying every coordinate by the common denominator `L` of the inputs
//! is injective and linear, so sums of points collide exactly when sums of
//! their scaled integer vectors do. Small scaled values are packed into
//! `i64`; anything that could overflow during an m-fold sum uses `BigInt`.

use std::collections::HashMap;
use std::hash::Hash;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use super::{ExactPoint, FiniteSet};
use crate::error::{Error, Result};
use crate::scalar::{common_denominator, Rational};

pub(crate) trait SumKey: Clone + Eq + Hash + Ord + Send + Sync {
    fn add(&self, other: &Self) -> Self;
}

impl SumKey for Vec<i64> {
    fn add(&self, other: &Self) -> Self {
        self.iter().zip(other).map(|(a, b)| a + b).collect()
    }
}

impl SumKey for Vec<BigInt> {
    fn add(&self, other: &Self) -> Self {
        self.iter().zip(other).map(|(a, b)| a + b).collect()
    }
}

pub(crate) struct Embedding {
    scale: BigInt,
    small: bool,
}

impl Embedding {
    /// Embedding able to hold `max_terms`-fold sums of points from `sets`.
    pub fn of(sets: &[&FiniteSet], max_terms: usize) -> Self {
        let scale = common_denominator(sets.iter().flat_map(|s| s.iter()).flat_map(|p| p.coords()));
        let limit = BigInt::from(i64::MAX / 4) / BigInt::from(max_terms.max(1));
        let small = sets.iter().flat_map(|s| s.iter()).flat_map(|p| p.coords()).all(|c| {
            let v = (c * Rational::from_integer(scale.clone())).to_integer();
            v.magnitude() <= limit.magnitude()
        });
        Self { scale, small }
    }

    fn big_key(&self, p: &ExactPoint) -> Vec<BigInt> {
        p.coords().iter().map(|c| (c * Rational::from_integer(self.scale.clone())).to_integer()).collect()
    }

    fn small_key(&self, p: &ExactPoint) -> Vec<i64> {
        self.big_key(p).iter().map(|v| v.to_i64().expect("checked at construction")).collect()
    }

    fn point_from_big(&self, k: &[BigInt]) -> ExactPoint {
        ExactPoint::new(k.iter().map(|v| Rational::new(v.clone(), self.scale.clone())).collect())
    }

    fn point_from_small(&self, k: &[i64]) -> ExactPoint {
        ExactPoint::new(k.iter().map(|&v| Rational::new(BigInt::from(v), self.scale.clone())).collect())
    }

    pub fn sumset(&self, a: &FiniteSet, b: &FiniteSet) -> Result<FiniteSet> {
        let dim = a.dimension();
        if self.small {
            let ka: Vec<Vec<i64>> = a.iter().map(|p| self.small_key(p)).collect();
            let kb: Vec<Vec<i64>> = b.iter().map(|p| self.small_key(p)).collect();
            let s = sum_keys(&ka, &kb);
            FiniteSet::new(dim, s.iter().map(|k| self.point_from_small(k)))
        } else {
            let ka: Vec<Vec<BigInt>> = a.iter().map(|p| self.big_key(p)).collect();
            let kb: Vec<Vec<BigInt>> = b.iter().map(|p| self.big_key(p)).collect();
            let s = sum_keys(&ka, &kb);
            FiniteSet::new(dim, s.iter().map(|k| self.point_from_big(k)))
        }
    }

    /// `mA` by iterated deduplicated sums.
    pub fn m_fold(&self, a: &FiniteSet, m: usize, cap: u128) -> Result<FiniteSet> {
        let dim = a.dimension();
        if self.small {
            let ka: Vec<Vec<i64>> = a.iter().map(|p| self.small_key(p)).collect();
            let s = m_fold_keys(&ka, m, cap)?;
            FiniteSet::new(dim, s.iter().map(|k| self.point_from_small(k)))
        } else {
            let ka: Vec<Vec<BigInt>> = a.iter().map(|p| self.big_key(p)).collect();
            let s = m_fold_keys(&ka, m, cap)?;
            FiniteSet::new(dim, s.iter().map(|k| self.point_from_big(k)))
        }
    }

    /// Representation counts `φ(s) = #{(a₁,…,a_m) : a₁+⋯+a_m = s}`.
    pub fn representation_counts(&self, a: &FiniteSet, m: usize, cap: u128) -> Result<Vec<(ExactPoint, u128)>> {
        let mut out: Vec<(ExactPoint, u128)> = if self.small {
            let ka: Vec<Vec<i64>> = a.iter().map(|p| self.small_key(p)).collect();
            rep_counts(&ka, m, cap)?.into_iter().map(|(k, c)| (self.point_from_small(&k), c)).collect()
        } else {
            let ka: Vec<Vec<BigInt>> = a.iter().map(|p| self.big_key(p)).collect();
            rep_counts(&ka, m, cap)?.into_iter().map(|(k, c)| (self.point_from_big(&k), c)).collect()
        };
        out.sort_unstable_by(|x, y| x.0.cmp(&y.0));
        Ok(out)
    }

    /// `Σ φ(s)²` without materialising the points.
    pub fn energy(&self, a: &FiniteSet, m: usize, cap: u128) -> Result<u128> {
        let counts: Vec<u128> = if self.small {
            let ka: Vec<Vec<i64>> = a.iter().map(|p| self.small_key(p)).collect();
            rep_counts(&ka, m, cap)?.into_values().collect()
        } else {
            let ka: Vec<Vec<BigInt>> = a.iter().map(|p| self.big_key(p)).collect();
            rep_counts(&ka, m, cap)?.into_values().collect()
        };
        counts
            .iter()
            .try_fold(0u128, |acc, c| c.checked_mul(*c).and_then(|sq| acc.checked_add(sq)))
            .ok_or(Error::SizeCap { what: "energy value", needed: u128::MAX, cap: u128::MAX })
    }
}

fn sum_keys<K: SumKey>(a: &[K], b: &[K]) -> Vec<K> {
    let mut out: Vec<K> = a.iter().flat_map(|x| b.iter().map(move |y| x.add(y))).collect();
    out.sort_unstable();
    out.dedup();
    out
}

fn m_fold_keys<K: SumKey>(a: &[K], m: usize, cap: u128) -> Result<Vec<K>> {
    let mut acc: Vec<K> = a.to_vec();
    acc.sort_unstable();
    acc.dedup();
    for _ in 1..m {
        let work = acc.len() as u128 * a.len() as u128;
        if work > cap {
            return Err(Error::SizeCap { what: "m-fold sumset", needed: work, cap });
        }
        acc = sum_keys(&acc, a);
    }
    Ok(acc)
}

/// Multiplicity-preserving convolution; never deduplicates tuples.
fn rep_counts<K: SumKey>(a: &[K], m: usize, cap: u128) -> Result<HashMap<K, u128>> {
    let mut phi: HashMap<K, u128> = HashMap::with_capacity(a.len());
    for k in a {
        *phi.entry(k.clone()).or_default() += 1;
    }
    let mut work: u128 = 0;
    for _ in 1..m {
        work += phi.len() as u128 * a.len() as u128;
        if work > cap {
            return Err(Error::SizeCap { what: "additive energy", needed: work, cap });
        }
        let mut next: HashMap<K, u128> = HashMap::with_capacity(phi.len() * 2);
        for (s, c) in &phi {
            for x in a {
                *next.entry(s.add(x)).or_default() += *c;
            }
        }
        phi = next;
    }
    debug_assert!(phi.values().all(|c| !c.is_zero()));
    Ok(phi)
}

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use super::{ExactPoint, FiniteSet};
use crate::error::{Error, Result};
use crate::scalar::Rational;

/// `{ v + Σ ℓᵢ vᵢ : 1 ≤ ℓᵢ ≤ Nᵢ }`
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Gap {
    pub base: ExactPoint,
    pub generators: Vec<ExactPoint>,
    pub lengths: Vec<u64>,
}

impl Gap {
    pub fn new(base: ExactPoint, generators: Vec<ExactPoint>, lengths: Vec<u64>) -> Result<Self> {
        let g = Self { base, generators, lengths };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if self.generators.len() != self.lengths.len() {
            return Err(Error::InvalidInput(format!(
                "{} generators but {} lengths",
                self.generators.len(),
                self.lengths.len()
            )));
        }
        if let Some(g) = self.generators.iter().find(|g| g.dimension() != self.base.dimension()) {
            return Err(Error::DimensionMismatch { left: self.base.dimension(), right: g.dimension() });
        }
        if self.lengths.contains(&0) {
            return Err(Error::InvalidInput("GAP lengths must be at least 1".into()));
        }
        Ok(())
    }

    /// The GAP dimension `m`.
    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    pub fn dimension(&self) -> usize {
        self.base.dimension()
    }

    /// `∏ Nᵢ`
    pub fn nominal_size(&self) -> u128 {
        self.lengths.iter().try_fold(1u128, |acc, &n| acc.checked_mul(n as u128)).unwrap_or(u128::MAX)
    }

    pub fn enumerate(&self, cap: u128) -> Result<FiniteSet> {
        self.validate()?;
        let size = self.nominal_size();
        if size > cap {
            return Err(Error::SizeCap { what: "GAP enumeration", needed: size, cap });
        }
        let mut acc = vec![self.base.clone()];
        for (g, &n) in self.generators.iter().zip(&self.lengths) {
            let steps: Vec<ExactPoint> = (1..=n).map(|l| g.scale(&Rational::from_integer(BigInt::from(l)))).collect();
            acc = acc.iter().flat_map(|p| steps.iter().map(move |s| p.add(s))).collect();
        }
        FiniteSet::new(self.dimension(), acc)
    }

    /// Proper when all `∏ Nᵢ` combinations give distinct points.
    pub fn is_proper(&self, cap: u128) -> Result<bool> {
        Ok(self.enumerate(cap)?.len() as u128 == self.nominal_size())
    }
}

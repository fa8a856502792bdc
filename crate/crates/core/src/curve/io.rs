//! Curve definition files (JSON or TOML). Rationals are `"p/q"` strings.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Coordinates, CurveKind, CurveSpec};
use crate::error::{Error, Result};
use crate::lifting::{lift_curve, MonomialSet};
use crate::poly::Polynomial;
use crate::scalar::{format_rational, parse_rational, Rational};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveFile {
    pub kind: String,
    pub dimension: usize,
    /// One array per coordinate, ascending powers of `t`. For
    /// `polynomial-graph` the arrays describe `f₂, …, f_n` only.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub coefficients: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<[String; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub smoothness_order: Option<usize>,
    /// Lifted curves: the planar base curve.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base: Option<Box<CurveFile>>,
    /// Lifted curves: exponent pairs `[a, b]` of the monomials.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub monomials: Option<Vec<[u32; 2]>>,
}

fn parse_poly(cs: &[String]) -> Result<Polynomial<Rational>> {
    Ok(Polynomial::new(cs.iter().map(|c| parse_rational(c)).collect::<Result<_>>()?))
}

fn poly_strings(p: &Polynomial<Rational>) -> Vec<String> {
    if p.is_zero() {
        return vec!["0/1".into()];
    }
    p.coeffs().iter().map(format_rational).collect()
}

impl CurveFile {
    pub fn to_curve(&self) -> Result<CurveSpec> {
        let (lo, hi) = match &self.domain {
            Some([lo, hi]) => (parse_rational(lo)?, parse_rational(hi)?),
            None => (Rational::from_integer(0.into()), Rational::from_integer(1.into())),
        };
        let curve = match self.kind.as_str() {
            "moment" => CurveSpec::moment(self.dimension)?.restrict(lo, hi)?,
            "polynomial-parametric" => {
                let coords = self.coefficients.iter().map(|c| parse_poly(c)).collect::<Result<_>>()?;
                CurveSpec::polynomial(coords, lo, hi)?
            }
            "polynomial-graph" => {
                let fs = self.coefficients.iter().map(|c| parse_poly(c)).collect::<Result<_>>()?;
                CurveSpec::graph(fs, lo, hi)?
            }
            "circle-arc" => CurveSpec::circle_arc(lo, hi)?,
            "lifted" => {
                let base = self
                    .base
                    .as_ref()
                    .ok_or_else(|| Error::InvalidInput("lifted curve file needs a base curve".into()))?
                    .to_curve()?;
                let monomials = self
                    .monomials
                    .as_ref()
                    .ok_or_else(|| Error::InvalidInput("lifted curve file needs monomials".into()))?;
                let set = MonomialSet::from_pairs(monomials)?;
                let lifted = lift_curve(&base, &set)?;
                if self.domain.is_some() {
                    lifted.restrict(lo, hi)?
                } else {
                    lifted
                }
            }
            other => return Err(Error::Parse(format!("unknown curve kind {other:?}"))),
        };
        if curve.dimension() != self.dimension {
            return Err(Error::DimensionMismatch { left: self.dimension, right: curve.dimension() });
        }
        match self.smoothness_order {
            Some(k) => curve.with_smoothness_order(k),
            None => Ok(curve),
        }
    }

    pub fn from_curve(curve: &CurveSpec) -> Self {
        let (lo, hi) = curve.domain();
        let domain = Some([format_rational(lo), format_rational(hi)]);
        let mut file = CurveFile {
            kind: curve.kind().name().to_string(),
            dimension: curve.dimension(),
            coefficients: Vec::new(),
            domain,
            smoothness_order: Some(curve.smoothness_order()),
            base: None,
            monomials: None,
        };
        match (curve.kind(), curve.coordinates()) {
            (CurveKind::PolynomialGraph, Coordinates::Polynomial(p)) => {
                file.coefficients = p[1..].iter().map(poly_strings).collect();
            }
            (CurveKind::Moment | CurveKind::CircleArc, _) => {}
            (CurveKind::Lifted, coords) => {
                let origin = curve.lift_origin().expect("lifted curves record their origin");
                file.base = Some(Box::new(CurveFile::from_curve(&origin.base)));
                file.monomials = Some(origin.monomials.clone());
                if let Coordinates::Polynomial(p) = coords {
                    file.coefficients = p.iter().map(poly_strings).collect();
                }
            }
            (_, Coordinates::Polynomial(p)) => {
                file.kind = CurveKind::PolynomialParametric.name().to_string();
                file.coefficients = p.iter().map(poly_strings).collect();
            }
            (_, Coordinates::Trigonometric(_)) => {}
        }
        file
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let is_toml = path.extension().is_some_and(|e| e == "toml");
        if is_toml {
            toml::from_str(&text).map_err(|e| Error::Parse(e.to_string()))
        } else {
            Ok(serde_json::from_str(&text)?)
        }
    }
}

/// A curve named either by a builtin name, a file path, or inline.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CurveRef {
    Name(String),
    Inline(CurveFile),
}

impl CurveRef {
    /// Builtin names win; anything else is read as a path relative to `base_dir`.
    pub fn resolve(&self, base_dir: Option<&Path>) -> Result<CurveSpec> {
        match self {
            CurveRef::Inline(f) => f.to_curve(),
            CurveRef::Name(name) => match CurveSpec::builtin(name) {
                Ok(c) => Ok(c),
                Err(builtin_err) => {
                    let path = match base_dir {
                        Some(dir) => dir.join(name),
                        None => Path::new(name).to_path_buf(),
                    };
                    if path.exists() {
                        CurveFile::from_path(&path)?.to_curve()
                    } else {
                        Err(builtin_err)
                    }
                }
            },
        }
    }
}

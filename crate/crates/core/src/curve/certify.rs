use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use super::CurveSpec;
use crate::error::{Error, Result};
use crate::poly::Polynomial;
use crate::roots::has_root_in;
use crate::scalar::{format_rational, rational_to_f64, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CertificateStatus {
    Certified,
    SampledOnly,
    Failed,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MarginEstimate {
    /// Decided by exact root isolation of the Wronskian polynomial.
    Exact,
    /// Largest change of `|W|` between neighbouring samples.
    Sampled(f64),
}

impl Serialize for MarginEstimate {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            MarginEstimate::Exact => s.serialize_str("exact"),
            MarginEstimate::Sampled(v) => s.serialize_f64(*v),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct NondegeneracyCertificate {
    pub min_sampled_wronskian: f64,
    #[serde(serialize_with = "ser_rational")]
    pub claimed_lower_bound: Rational,
    pub grid_resolution: usize,
    pub margin_estimate: MarginEstimate,
    pub sampled_margin: f64,
    pub status: CertificateStatus,
}

fn ser_rational<S: serde::Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format_rational(r))
}

/// Samples `|W|` on `grid + 1` equally spaced parameters and decides whether
/// `|W| > c0` holds on the whole domain.
///
/// Polynomial curves are decided exactly: `|W| > c0` everywhere iff neither
/// `W - c0` nor `W + c0` vanishes on the closed domain and one sample clears
/// the bound. Other curves are certified only when the smallest sample minus
/// the finite-difference margin still exceeds `c0`.
pub fn certify_nondegenerate(curve: &CurveSpec, c0: &Rational, grid: usize) -> Result<NondegeneracyCertificate> {
    if grid < 2 {
        return Err(Error::InvalidInput(format!("grid must be at least 2, got {grid}")));
    }
    if c0.is_negative() {
        return Err(Error::InvalidInput("c0 must be non-negative".into()));
    }
    let params = curve.grid(grid);

    if let Some(w) = curve.wronskian_polynomial() {
        let samples: Vec<Rational> = params.par_iter().map(|t| w.eval(t).abs()).collect();
        let min = samples.iter().min().cloned().unwrap_or_else(Rational::zero);
        let sampled_margin = sampled_margin(samples.iter().map(rational_to_f64));
        let (lo, hi) = curve.domain();
        let c0_poly = Polynomial::constant(c0.clone());
        let touches = if c0.is_zero() {
            has_root_in(&w, lo, hi)
        } else {
            has_root_in(&(&w - &c0_poly), lo, hi) || has_root_in(&(&w + &c0_poly), lo, hi)
        };
        let status = if touches || &min <= c0 { CertificateStatus::Failed } else { CertificateStatus::Certified };
        return Ok(NondegeneracyCertificate {
            min_sampled_wronskian: rational_to_f64(&min),
            claimed_lower_bound: c0.clone(),
            grid_resolution: grid,
            margin_estimate: MarginEstimate::Exact,
            sampled_margin,
            status,
        });
    }

    if curve.wronskian_vanishes_identically()? {
        return Ok(NondegeneracyCertificate {
            min_sampled_wronskian: 0.0,
            claimed_lower_bound: c0.clone(),
            grid_resolution: grid,
            margin_estimate: MarginEstimate::Exact,
            sampled_margin: 0.0,
            status: CertificateStatus::Failed,
        });
    }
    let samples: Vec<f64> =
        params.par_iter().map(|t| curve.wronskian(t).map(|w| w.to_f64().abs())).collect::<Result<_>>()?;
    let min = samples.iter().copied().fold(f64::INFINITY, f64::min);
    let margin = sampled_margin(samples.iter().copied());
    let bound = rational_to_f64(c0);
    let status = if samples.iter().any(|&w| w <= bound) {
        CertificateStatus::Failed
    } else if min - margin > bound {
        CertificateStatus::Certified
    } else {
        CertificateStatus::SampledOnly
    };
    Ok(NondegeneracyCertificate {
        min_sampled_wronskian: min,
        claimed_lower_bound: c0.clone(),
        grid_resolution: grid,
        margin_estimate: MarginEstimate::Sampled(margin),
        sampled_margin: margin,
        status,
    })
}

/// Max finite-difference slope times spacing, i.e. the largest jump between
/// neighbouring samples.
fn sampled_margin(samples: impl Iterator<Item = f64>) -> f64 {
    let v: Vec<f64> = samples.collect();
    v.windows(2).map(|w| (w[1] - w[0]).abs()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::make_moment_curve;
    use crate::scalar::int;

    #[test]
    fn moment_curve_is_certified() {
        let cert = certify_nondegenerate(&make_moment_curve(3).unwrap(), &int(1), 64).unwrap();
        assert_eq!(cert.status, CertificateStatus::Certified);
        assert_eq!(cert.min_sampled_wronskian, 12.0);
        assert_eq!(cert.margin_estimate, MarginEstimate::Exact);
    }

    #[test]
    fn cubic_graph_fails_at_zero() {
        let cert = certify_nondegenerate(&CurveSpec::builtin("cubic").unwrap(), &int(0), 64).unwrap();
        assert_eq!(cert.status, CertificateStatus::Failed);
        assert_eq!(cert.min_sampled_wronskian, 0.0);
    }

    #[test]
    fn exact_check_sees_dips_between_samples() {
        // W = 6t on [0, 1] restricted away from 0 is positive, but |W| > 3
        // fails on the left part of the domain even if samples were coarse.
        let c = CurveSpec::builtin("cubic").unwrap().restrict(crate::scalar::rat(1, 100), int(1)).unwrap();
        let cert = certify_nondegenerate(&c, &int(0), 2).unwrap();
        assert_eq!(cert.status, CertificateStatus::Certified);
        let cert = certify_nondegenerate(&c, &int(3), 2).unwrap();
        assert_eq!(cert.status, CertificateStatus::Failed);
    }

    #[test]
    fn circle_thresholds() {
        // 8π³ ≈ 248.05
        let c = CurveSpec::circle();
        assert_eq!(certify_nondegenerate(&c, &int(100), 256).unwrap().status, CertificateStatus::Certified);
        assert_eq!(certify_nondegenerate(&c, &int(300), 256).unwrap().status, CertificateStatus::Failed);
    }

    #[test]
    fn degenerate_circle_lift_fails_exactly() {
        let lifted = crate::lifting::lift_curve(&CurveSpec::circle(), &crate::lifting::make_ms(2).unwrap()).unwrap();
        let cert = certify_nondegenerate(&lifted, &int(0), 64).unwrap();
        assert_eq!(cert.status, CertificateStatus::Failed);
        assert_eq!(cert.margin_estimate, MarginEstimate::Exact);
        assert!(!CurveSpec::circle().wronskian_vanishes_identically().unwrap());
    }

    #[test]
    fn rejects_bad_arguments() {
        let c = CurveSpec::parabola();
        assert!(certify_nondegenerate(&c, &int(0), 1).is_err());
        assert!(certify_nondegenerate(&c, &int(-1), 8).is_err());
    }
}

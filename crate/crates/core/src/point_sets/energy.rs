use num_bigint::BigInt;
use num_traits::One;
use serde::Serialize;

use super::keys::Embedding;
use super::{doubling, ExactPoint, FiniteSet, WorkCaps};
use crate::error::{Error, Result};
use crate::scalar::{rational_to_f64, Rational};

fn check_order(m: usize) -> Result<()> {
    if m == 0 {
        return Err(Error::InvalidInput("order m must be at least 1".into()));
    }
    Ok(())
}

/// `mA = A + ⋯ + A` (m terms), deduplicated after every step.
pub fn m_fold_sumset(a: &FiniteSet, m: usize, cap: u128) -> Result<FiniteSet> {
    check_order(m)?;
    a.require_nonempty()?;
    Embedding::of(&[a], m).m_fold(a, m, cap)
}

/// `φ(s)` for every `s ∈ mA`, sorted by `s`.
pub fn representation_counts(a: &FiniteSet, m: usize, cap: u128) -> Result<Vec<(ExactPoint, u128)>> {
    check_order(m)?;
    a.require_nonempty()?;
    Embedding::of(&[a], m).representation_counts(a, m, cap)
}

/// Number of ordered `2m`-tuples with `a₁+⋯+a_m = a_{m+1}+⋯+a_{2m}`,
/// computed as `Σ_{s ∈ mA} φ(s)²`.
pub fn additive_energy(a: &FiniteSet, m: usize, cap: u128) -> Result<u128> {
    check_order(m)?;
    a.require_nonempty()?;
    Embedding::of(&[a], m).energy(a, m, cap)
}

fn ratio_string(r: &Rational) -> String {
    crate::scalar::format_rational(r)
}

/// Both sides of `E_m(B) ≥ |B|^{2m} / (K^m |A|)`, with `K` the doubling of `A`.
#[derive(Clone, Debug, Serialize)]
pub struct EnergyReport {
    pub m: usize,
    pub size_a: usize,
    pub size_b: usize,
    pub energy: u128,
    #[serde(serialize_with = "ser_rational")]
    pub doubling: Rational,
    #[serde(serialize_with = "ser_rational")]
    pub lower_bound: Rational,
    /// `E_m(B) · K^m · |A| / |B|^{2m}`
    #[serde(serialize_with = "ser_rational")]
    pub ratio: Rational,
    pub ratio_f64: f64,
    pub holds: bool,
}

fn ser_rational<S: serde::Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&ratio_string(r))
}

pub fn check_energy_lower_bound(a: &FiniteSet, b: &FiniteSet, m: usize, caps: WorkCaps) -> Result<EnergyReport> {
    check_order(m)?;
    a.check_dimension(b.dimension())?;
    b.require_nonempty()?;
    if let Some(p) = b.first_missing_from(a) {
        return Err(Error::SubsetViolation(p.to_string()));
    }
    let k = doubling(a)?;
    let energy = additive_energy(b, m, caps.energy)?;
    let size_a = Rational::from_integer(BigInt::from(a.len()));
    let b_pow = Rational::from_integer(BigInt::from(b.len()).pow(2 * m as u32));
    let k_pow: Rational = k.pow(m as i32);
    let lower_bound = &b_pow / (&k_pow * &size_a);
    let ratio = Rational::from_integer(BigInt::from(energy)) * &k_pow * &size_a / &b_pow;
    Ok(EnergyReport {
        m,
        size_a: a.len(),
        size_b: b.len(),
        energy,
        doubling: k,
        lower_bound,
        ratio_f64: rational_to_f64(&ratio),
        holds: ratio >= Rational::one(),
        ratio,
    })
}

/// `|mA| ≤ K^m |A|`
#[derive(Clone, Debug, Serialize)]
pub struct PlunneckeReport {
    pub m: usize,
    pub size_a: usize,
    pub size_ma: usize,
    #[serde(serialize_with = "ser_rational")]
    pub doubling: Rational,
    #[serde(serialize_with = "ser_rational")]
    pub bound: Rational,
    pub holds: bool,
}

pub fn check_plunnecke(a: &FiniteSet, m: usize, caps: WorkCaps) -> Result<PlunneckeReport> {
    let k = doubling(a)?;
    let ma = m_fold_sumset(a, m, caps.enumeration)?;
    let k_pow: Rational = k.pow(m as i32);
    let bound = k_pow * Rational::from_integer(BigInt::from(a.len()));
    Ok(PlunneckeReport {
        m,
        size_a: a.len(),
        size_ma: ma.len(),
        holds: Rational::from_integer(BigInt::from(ma.len())) <= bound,
        doubling: k,
        bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::point_sets::DEFAULT_ENERGY_CAP;
    use crate::scalar::{int, rat};

    fn line(ns: &[i64]) -> FiniteSet {
        FiniteSet::from_int_points(&ns.iter().map(|&n| vec![n]).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn small_energies() {
        let a = line(&[0, 1, 2]);
        assert_eq!(additive_energy(&a, 2, DEFAULT_ENERGY_CAP).unwrap(), 19);
        assert_eq!(additive_energy(&a, 1, DEFAULT_ENERGY_CAP).unwrap(), 3);
        assert_eq!(additive_energy(&line(&[7]), 4, DEFAULT_ENERGY_CAP).unwrap(), 1);
        let phi: Vec<u128> =
            representation_counts(&a, 2, DEFAULT_ENERGY_CAP).unwrap().into_iter().map(|(_, c)| c).collect();
        assert_eq!(phi, vec![1, 2, 3, 2, 1]);
    }

    #[test]
    fn m_fold_examples() {
        let a = line(&[0, 1, 3]);
        assert_eq!(m_fold_sumset(&a, 1, 100).unwrap(), a);
        assert_eq!(m_fold_sumset(&line(&[0, 1]), 3, 100).unwrap(), line(&[0, 1, 2, 3]));
        assert_eq!(m_fold_sumset(&a, 2, 100).unwrap(), line(&[0, 1, 2, 3, 4, 6]));
        assert!(m_fold_sumset(&a, 0, 100).is_err());
        assert!(m_fold_sumset(&line(&(0..100).collect::<Vec<_>>()), 3, 1000).is_err());
    }

    #[test]
    fn rational_coordinates_are_exact() {
        // Sums 1/3 + 1/6 = 1/2 collide with 1/2 + 0.
        let a = FiniteSet::from_points(vec![
            ExactPoint::new(vec![int(0)]),
            ExactPoint::new(vec![rat(1, 3)]),
            ExactPoint::new(vec![rat(1, 6)]),
            ExactPoint::new(vec![rat(1, 2)]),
        ])
        .unwrap();
        let brute = {
            let pts = a.points();
            let mut n = 0u128;
            for x in pts {
                for y in pts {
                    for z in pts {
                        for w in pts {
                            if x.add(y) == z.add(w) {
                                n += 1;
                            }
                        }
                    }
                }
            }
            n
        };
        assert_eq!(additive_energy(&a, 2, DEFAULT_ENERGY_CAP).unwrap(), brute);
    }

    #[test]
    fn huge_coordinates_use_big_keys() {
        let big = i64::MAX / 3;
        let a = FiniteSet::from_points(vec![
            ExactPoint::new(vec![int(big)]),
            ExactPoint::new(vec![int(big - 1)]),
            ExactPoint::new(vec![int(0)]),
        ])
        .unwrap();
        assert_eq!(m_fold_sumset(&a, 3, 1000).unwrap().len(), 10);
        assert_eq!(additive_energy(&a, 1, 1000).unwrap(), 3);
    }

    #[test]
    fn energy_cap() {
        let a = line(&(0..50).collect::<Vec<_>>());
        assert!(matches!(additive_energy(&a, 3, 100), Err(Error::SizeCap { .. })));
    }

    #[test]
    fn energy_lower_bound_on_an_interval() {
        let a = line(&(1..=10).collect::<Vec<_>>());
        let r = check_energy_lower_bound(&a, &a, 2, WorkCaps::default()).unwrap();
        assert_eq!(r.doubling, rat(19, 10));
        // E_2 of an interval of length 10 is (2·10³ + 10)/3 = 670.
        assert_eq!(r.energy, 670);
        assert!(r.holds);
        let single = line(&[4]);
        let r = check_energy_lower_bound(&a, &single, 3, WorkCaps::default()).unwrap();
        assert!(r.holds);
        assert!(matches!(
            check_energy_lower_bound(&a, &line(&[11]), 2, WorkCaps::default()),
            Err(Error::SubsetViolation(_))
        ));
    }

    #[test]
    fn plunnecke_interval() {
        let a = line(&(0..8).collect::<Vec<_>>());
        let r = check_plunnecke(&a, 3, WorkCaps::default()).unwrap();
        assert_eq!(r.size_ma, 22);
        assert!(r.holds);
    }
}

//! Trigonometric polynomials in `θ = 2πt` with exact rational coefficients.
//!
//! `f(t) = Σ_k a_k cos(2πkt) + b_k sin(2πkt)`. Products and sums stay exact;
//! only evaluation goes through floating point. Derivatives are closed-form.

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use num_traits::Zero;

use crate::scalar::{rat, rational_to_f64, Rational};

#[derive(Clone, Debug, PartialEq, Default)]
pub struct TrigPolynomial {
    /// frequency -> (cos coefficient, sin coefficient); no all-zero entries,
    /// and the sin coefficient at frequency 0 is always zero.
    terms: BTreeMap<u32, (Rational, Rational)>,
}

impl TrigPolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Rational) -> Self {
        let mut p = Self::zero();
        p.add_term(0, c, Rational::zero());
        p
    }

    /// `cos(2πkt)`
    pub fn cos(k: u32) -> Self {
        let mut p = Self::zero();
        p.add_term(k, rat(1, 1), Rational::zero());
        p
    }

    /// `sin(2πkt)`
    pub fn sin(k: u32) -> Self {
        let mut p = Self::zero();
        p.add_term(k, Rational::zero(), rat(1, 1));
        p
    }

    fn add_term(&mut self, k: u32, a: Rational, b: Rational) {
        let b = if k == 0 { Rational::zero() } else { b };
        let entry = self.terms.entry(k).or_insert_with(|| (Rational::zero(), Rational::zero()));
        entry.0 += a;
        entry.1 += b;
        if entry.0.is_zero() && entry.1.is_zero() {
            self.terms.remove(&k);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, &Rational, &Rational)> {
        self.terms.iter().map(|(k, (a, b))| (*k, a, b))
    }

    pub fn max_frequency(&self) -> u32 {
        self.terms.keys().next_back().copied().unwrap_or(0)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, (a, b)) in &other.terms {
            out.add_term(*k, a.clone(), b.clone());
        }
        out
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let mut out = Self::zero();
        for (k, (a, b)) in &self.terms {
            out.add_term(*k, a * c, b * c);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&rat(-1, 1)))
    }

    /// Product via the angle-sum identities.
    pub fn mul(&self, other: &Self) -> Self {
        let half = rat(1, 2);
        let mut out = Self::zero();
        for (&j, (a1, b1)) in &self.terms {
            for (&k, (a2, b2)) in &other.terms {
                let (hi, lo) = (j + k, j.abs_diff(k));
                // sign of sin((j - k)θ) relative to sin(|j - k|θ)
                let s = if j >= k { rat(1, 1) } else { rat(-1, 1) };
                // cos j cos k = ½[cos(j-k) + cos(j+k)]
                let cc = a1 * a2 * &half;
                // sin j sin k = ½[cos(j-k) - cos(j+k)]
                let ss = b1 * b2 * &half;
                // cos j sin k = ½[sin(j+k) - sin(j-k)]
                let cs = a1 * b2 * &half;
                // sin j cos k = ½[sin(j+k) + sin(j-k)]
                let sc = b1 * a2 * &half;
                out.add_term(hi, &cc - &ss, &cs + &sc);
                out.add_term(lo, &cc + &ss, (&sc - &cs) * &s);
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(Self::constant(rat(1, 1)), |acc, _| acc.mul(self))
    }

    /// Value of the `order`-th derivative at `t`.
    pub fn eval_derivative(&self, t: f64, order: usize) -> f64 {
        self.terms.iter().map(|(&k, (a, b))| term_derivative(k, rational_to_f64(a), rational_to_f64(b), t, order)).sum()
    }

    /// Exact `d^r f/dθ^r` at the angle `θ = 2·atan(u)`, where cosine and
    /// sine are the rational `(1 − u²)/(1 + u²)` and `2u/(1 + u²)`. The
    /// `t`-derivative is this times `(2π)^r`.
    pub fn angle_derivative_at(&self, u: &Rational, order: usize) -> Rational {
        let d = rat(1, 1) + u * u;
        let c1 = (rat(1, 1) - u * u) / &d;
        let s1 = (u + u) / &d;
        let (mut c, mut s) = (rat(1, 1), Rational::zero());
        let mut k = 0u32;
        let mut acc = Rational::zero();
        for (&freq, (a, b)) in &self.terms {
            while k < freq {
                (c, s) = (&c * &c1 - &s * &s1, &s * &c1 + &c * &s1);
                k += 1;
            }
            if freq == 0 {
                if order == 0 {
                    acc += a;
                }
                continue;
            }
            let (dc, ds) = match order % 4 {
                0 => (c.clone(), s.clone()),
                1 => (-s.clone(), c.clone()),
                2 => (-c.clone(), -s.clone()),
                _ => (s.clone(), -c.clone()),
            };
            let w = Rational::from_integer(num_traits::pow(num_bigint::BigInt::from(freq), order));
            acc += w * (a * dc + b * ds);
        }
        acc
    }

    /// Sum of absolute term contributions, used for rounding-error estimates.
    pub fn derivative_magnitude(&self, t: f64, order: usize) -> f64 {
        self.terms
            .iter()
            .map(|(&k, (a, b))| {
                term_derivative(k, rational_to_f64(a).abs(), 0.0, t, order).abs()
                    + term_derivative(k, 0.0, rational_to_f64(b).abs(), t, order).abs()
            })
            .sum()
    }

    /// Uniform bound on `|f^{(order)}|` over all `t`.
    pub fn derivative_bound(&self, order: usize) -> f64 {
        self.terms
            .iter()
            .map(|(&k, (a, b))| {
                let w = (TAU * k as f64).powi(order as i32);
                let w = if order == 0 { 1.0 } else { w };
                w * (rational_to_f64(a).abs() + rational_to_f64(b).abs())
            })
            .sum()
    }
}

/// `d^r/dt^r [a cos(ωt) + b sin(ωt)]` with `ω = 2πk`.
fn term_derivative(k: u32, a: f64, b: f64, t: f64, order: usize) -> f64 {
    if k == 0 {
        return if order == 0 { a } else { 0.0 };
    }
    let omega = TAU * k as f64;
    let theta = omega * t;
    let (s, c) = theta.sin_cos();
    // Derivatives cycle through cos, -sin, -cos, sin.
    let (dc, ds) = match order % 4 {
        0 => (c, s),
        1 => (-s, c),
        2 => (-c, -s),
        _ => (s, -c),
    };
    let scale = omega.powi(order as i32);
    scale * (a * dc + b * ds)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn squares_of_circle_coordinates() {
        let c2 = TrigPolynomial::cos(1).pow(2);
        let s2 = TrigPolynomial::sin(1).pow(2);
        assert_eq!(c2.add(&s2), TrigPolynomial::constant(rat(1, 1)));
        let cs = TrigPolynomial::cos(1).mul(&TrigPolynomial::sin(1));
        assert_eq!(cs, TrigPolynomial::sin(2).scale(&rat(1, 2)));
    }

    #[test]
    fn product_matches_pointwise() {
        let f = TrigPolynomial::cos(3).add(&TrigPolynomial::sin(1).scale(&rat(2, 3)));
        let g = TrigPolynomial::sin(2).add(&TrigPolynomial::constant(rat(-1, 4)));
        let fg = f.mul(&g);
        for i in 0..20 {
            let t = i as f64 / 17.0;
            let want = f.eval_derivative(t, 0) * g.eval_derivative(t, 0);
            assert!((fg.eval_derivative(t, 0) - want).abs() < 1e-13);
        }
    }

    #[test]
    fn exact_angle_derivatives_match_floats() {
        let f = TrigPolynomial::cos(3).add(&TrigPolynomial::sin(2).scale(&rat(-2, 5)));
        for u in [rat(0, 1), rat(1, 3), rat(-7, 4), rat(5, 1)] {
            let t = 2.0 * rational_to_f64(&u).atan() / TAU;
            for r in 0..5 {
                let exact = rational_to_f64(&f.angle_derivative_at(&u, r)) * TAU.powi(r as i32);
                let float = f.eval_derivative(t, r);
                assert!((exact - float).abs() < 1e-9 * float.abs().max(1.0), "u={u} r={r}");
            }
        }
    }

    #[test]
    fn closed_form_derivatives() {
        let c = TrigPolynomial::cos(1);
        let t = 0.3;
        let w = 2.0 * PI;
        assert!((c.eval_derivative(t, 1) + w * (w * t).sin()).abs() < 1e-12);
        assert!((c.eval_derivative(t, 2) + w * w * (w * t).cos()).abs() < 1e-11);
        assert!((c.eval_derivative(t, 3) - w.powi(3) * (w * t).sin()).abs() < 1e-10);
        assert_eq!(c.derivative_bound(2), w * w);
    }
}

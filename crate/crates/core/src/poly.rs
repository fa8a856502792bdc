//! Dense univariate polynomials over a [`Scalar`].

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::scalar::{Rational, Scalar};

/// Coefficients in ascending powers of `t`, with no trailing zeros.
#[derive(Clone, PartialEq, Debug)]
pub struct Polynomial<T> {
    coeffs: Vec<T>,
}

impl<T: Scalar> Polynomial<T> {
    pub fn new(mut coeffs: Vec<T>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: T) -> Self {
        Self::new(vec![c])
    }

    /// `c · t^k`
    pub fn monomial(c: T, k: usize) -> Self {
        let mut coeffs = vec![T::zero(); k + 1];
        coeffs[k] = c;
        Self::new(coeffs)
    }

    /// The identity polynomial `t`.
    pub fn identity() -> Self {
        Self::monomial(T::one(), 1)
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&T> {
        self.coeffs.last()
    }

    pub fn eval(&self, t: &T) -> T {
        self.coeffs.iter().rev().fold(T::zero(), |acc, c| acc * t.clone() + c.clone())
    }

    /// Evaluates with coefficients converted into another scalar type.
    pub fn eval_in<U: Scalar>(&self, t: &U) -> U
    where
        T: Into<Rational> + Clone,
    {
        self.coeffs.iter().rev().fold(U::zero(), |acc, c| acc * t.clone() + U::from_rational(&c.clone().into()))
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Polynomial<U> {
        Polynomial::new(self.coeffs.iter().map(f).collect())
    }

    pub fn derivative(&self) -> Self {
        Self::new(self.coeffs.iter().enumerate().skip(1).map(|(k, c)| c.clone() * T::from_usize(k)).collect())
    }

    pub fn nth_derivative(&self, n: usize) -> Self {
        (0..n).fold(self.clone(), |p, _| p.derivative())
    }

    pub fn scale(&self, c: &T) -> Self {
        Self::new(self.coeffs.iter().map(|a| a.clone() * c.clone()).collect())
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::constant(T::one());
        let mut base = self.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// `self(inner(t))`
    pub fn compose(&self, inner: &Self) -> Self {
        self.coeffs.iter().rev().fold(Self::zero(), |acc, c| &(&acc * inner) + &Self::constant(c.clone()))
    }

    /// Quotient and remainder; panics on a zero divisor.
    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        let dd = divisor.degree().expect("division by the zero polynomial");
        let lead = divisor.coeffs[dd].clone();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (Self::zero(), self.clone());
        }
        let mut quot = vec![T::zero(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = rem[k + dd].clone() / lead.clone();
            if !c.is_zero() {
                for (j, d) in divisor.coeffs.iter().enumerate() {
                    rem[k + j] = rem[k + j].clone() - c.clone() * d.clone();
                }
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        (Self::new(quot), Self::new(rem))
    }

    /// Monic greatest common divisor (exact scalars only give a meaningful answer).
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn monic(&self) -> Self {
        match self.leading() {
            Some(l) => {
                let inv = T::one() / l.clone();
                self.scale(&inv)
            }
            None => Self::zero(),
        }
    }

    /// Same roots, each with multiplicity one.
    pub fn squarefree_part(&self) -> Self {
        if self.degree().unwrap_or(0) == 0 {
            return self.clone();
        }
        let g = self.gcd(&self.derivative());
        if g.degree() == Some(0) {
            self.clone()
        } else {
            self.div_rem(&g).0
        }
    }

    /// `p(t + shift)`
    pub fn taylor_shift(&self, shift: &T) -> Self {
        // Repeated synthetic division.
        let mut c = self.coeffs.clone();
        let n = c.len();
        for i in 0..n {
            for j in (i..n.saturating_sub(1)).rev() {
                c[j] = c[j].clone() + shift.clone() * c[j + 1].clone();
            }
        }
        Self::new(c)
    }

    /// `p(factor · t)`
    pub fn scale_argument(&self, factor: &T) -> Self {
        let mut pow = T::one();
        let mut out = Vec::with_capacity(self.coeffs.len());
        for c in &self.coeffs {
            out.push(c.clone() * pow.clone());
            pow = pow * factor.clone();
        }
        Self::new(out)
    }

    /// Upper bound on `|p(t)|` for `|t| ≤ radius`.
    pub fn abs_bound(&self, radius: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * radius + c.to_f64().abs())
    }

    /// Newton interpolation through `(xs[i], ys[i])`; the `xs` must be distinct.
    pub fn interpolate(xs: &[T], ys: &[T]) -> Self {
        assert_eq!(xs.len(), ys.len());
        let n = xs.len();
        let mut dd = ys.to_vec();
        for level in 1..n {
            for i in (level..n).rev() {
                dd[i] = (dd[i].clone() - dd[i - 1].clone()) / (xs[i].clone() - xs[i - level].clone());
            }
        }
        let mut acc = Self::zero();
        for i in (0..n).rev() {
            let factor = Self::new(vec![-xs[i].clone(), T::one()]);
            acc = &(&acc * &factor) + &Self::constant(dd[i].clone());
        }
        acc
    }
}

impl<T: Scalar> Add for &Polynomial<T> {
    type Output = Polynomial<T>;

    fn add(self, rhs: Self) -> Polynomial<T> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let zero = T::zero();
        Polynomial::new(
            (0..n)
                .map(|i| self.coeffs.get(i).unwrap_or(&zero).clone() + rhs.coeffs.get(i).unwrap_or(&zero).clone())
                .collect(),
        )
    }
}

impl<T: Scalar> Sub for &Polynomial<T> {
    type Output = Polynomial<T>;

    fn sub(self, rhs: Self) -> Polynomial<T> {
        self + &(-rhs)
    }
}

impl<T: Scalar> Neg for &Polynomial<T> {
    type Output = Polynomial<T>;

    fn neg(self) -> Polynomial<T> {
        Polynomial::new(self.coeffs.iter().map(|c| -c.clone()).collect())
    }
}

impl<T: Scalar> Mul for &Polynomial<T> {
    type Output = Polynomial<T>;

    fn mul(self, rhs: Self) -> Polynomial<T> {
        if self.is_zero() || rhs.is_zero() {
            return Polynomial::zero();
        }
        let mut out = vec![T::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        Polynomial::new(out)
    }
}

impl<T: Scalar + fmt::Display> fmt::Display for Polynomial<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})t")?,
                _ => write!(f, "({c})t^{k}")?,
            }
        }
        Ok(())
    }
}

impl<T: Scalar> Default for Polynomial<T> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<T: Scalar> From<T> for Polynomial<T> {
    fn from(c: T) -> Self {
        Self::constant(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, rat};

    fn p(cs: &[i64]) -> Polynomial<Rational> {
        Polynomial::new(cs.iter().map(|&c| int(c)).collect())
    }

    #[test]
    fn trims_and_degrees() {
        assert_eq!(p(&[1, 2, 0, 0]).degree(), Some(1));
        assert_eq!(p(&[0, 0]).degree(), None);
    }

    #[test]
    fn arithmetic() {
        let a = p(&[1, 1]);
        assert_eq!(&a * &a, p(&[1, 2, 1]));
        assert_eq!(a.pow(3), p(&[1, 3, 3, 1]));
        assert_eq!(&a - &a, Polynomial::zero());
        assert_eq!(p(&[0, 0, 1]).compose(&a), p(&[1, 2, 1]));
        assert_eq!(p(&[5, 3, 1]).derivative(), p(&[3, 2]));
        assert_eq!(p(&[0, 0, 0, 1]).nth_derivative(3), p(&[6]));
    }

    #[test]
    fn division_and_gcd() {
        let f = p(&[-1, 0, 1]); // t^2 - 1
        let g = p(&[1, 1]);
        let (q, r) = f.div_rem(&g);
        assert_eq!(q, p(&[-1, 1]));
        assert!(r.is_zero());
        let sq = &(&g * &g) * &p(&[-2, 1]);
        assert_eq!(sq.squarefree_part().monic(), (&g * &p(&[-2, 1])).monic());
    }

    #[test]
    fn shift_scale_interpolate() {
        let f = p(&[0, 0, 1]);
        assert_eq!(f.taylor_shift(&int(1)), p(&[1, 2, 1]));
        assert_eq!(f.scale_argument(&rat(1, 2)).coeffs()[2], rat(1, 4));
        let xs: Vec<_> = (0..4).map(int).collect();
        let cubic = p(&[3, -1, 0, 2]);
        let ys: Vec<_> = xs.iter().map(|x| cubic.eval(x)).collect();
        assert_eq!(Polynomial::interpolate(&xs, &ys), cubic);
    }

    #[test]
    fn float_evaluation() {
        let f = Polynomial::new(vec![1.0f64, -2.0, 0.5]);
        assert!((f.eval(&2.0) - (1.0 - 4.0 + 2.0)).abs() < 1e-15);
        let exact = p(&[1, 2, 3]);
        assert_eq!(exact.eval_in(&0.5f64), 1.0 + 1.0 + 0.75);
    }
}

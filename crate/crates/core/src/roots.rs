//! Real root isolation for exact polynomials by Descartes sign-variation
//! bisection.

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::poly::Polynomial;
use crate::scalar::{format_rational, rational_to_f64, Rational};

/// A closed interval holding exactly one distinct real root.
#[derive(Clone, Debug, PartialEq)]
pub struct RootInterval {
    pub lo: Rational,
    pub hi: Rational,
}

impl RootInterval {
    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    pub fn midpoint(&self) -> Rational {
        (&self.lo + &self.hi) / Rational::from_integer(2.into())
    }

    pub fn approx(&self) -> f64 {
        rational_to_f64(&self.midpoint())
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }
}

#[derive(Serialize)]
struct RootIntervalRepr {
    lo: String,
    hi: String,
    approx: f64,
}

impl Serialize for RootInterval {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        RootIntervalRepr { lo: format_rational(&self.lo), hi: format_rational(&self.hi), approx: self.approx() }
            .serialize(s)
    }
}

/// Number of sign changes in a coefficient sequence, zeros skipped.
pub fn sign_variations(coeffs: &[Rational]) -> usize {
    let mut last = 0i8;
    let mut count = 0;
    for c in coeffs {
        let s = if c.is_positive() {
            1
        } else if c.is_negative() {
            -1
        } else {
            0
        };
        if s != 0 {
            if last != 0 && s != last {
                count += 1;
            }
            last = s;
        }
    }
    count
}

/// Upper bound on the roots of `p` in the open interval `(lo, hi)`.
///
/// Maps `(lo, hi)` onto `(0, ∞)` with `t = (lo + hi·x) / (1 + x)` and counts
/// sign variations of the transformed coefficients.
fn descartes_bound(p: &Polynomial<Rational>, lo: &Rational, hi: &Rational) -> usize {
    let deg = match p.degree() {
        Some(d) => d,
        None => return 0,
    };
    // q(y) = p(lo + (hi - lo) y), y in (0, 1)
    let q = p.taylor_shift(lo).scale_argument(&(hi - lo));
    // r(x) = (1 + x)^deg q(1 / (1 + x)): reverse, then shift by one.
    let mut rev: Vec<Rational> = q.coeffs().to_vec();
    rev.resize(deg + 1, Rational::zero());
    rev.reverse();
    let r = Polynomial::new(rev).taylor_shift(&Rational::from_integer(1.into()));
    sign_variations(r.coeffs())
}

/// Distinct real roots of `p` in the closed interval `[lo, hi]`, isolated and
/// then refined until each interval is at most `tolerance` wide.
///
/// The zero polynomial has no isolated roots; callers treat it separately.
pub fn isolate_real_roots(
    p: &Polynomial<Rational>,
    lo: &Rational,
    hi: &Rational,
    tolerance: &Rational,
) -> Vec<RootInterval> {
    assert!(lo <= hi, "empty interval");
    if p.degree().unwrap_or(0) == 0 {
        return Vec::new();
    }
    let sf = p.squarefree_part();
    let mut out = Vec::new();
    if sf.eval(lo).is_zero() {
        out.push(RootInterval { lo: lo.clone(), hi: lo.clone() });
    }
    if lo != hi {
        let mut stack = vec![(lo.clone(), hi.clone())];
        let mut open = Vec::new();
        while let Some((a, b)) = stack.pop() {
            match descartes_bound(&sf, &a, &b) {
                0 => {}
                1 => open.push(RootInterval { lo: a, hi: b }),
                _ => {
                    let mid = (&a + &b) / Rational::from_integer(2.into());
                    if sf.eval(&mid).is_zero() {
                        open.push(RootInterval { lo: mid.clone(), hi: mid.clone() });
                    }
                    stack.push((mid.clone(), b));
                    stack.push((a, mid));
                }
            }
        }
        for iv in open {
            out.push(refine(&sf, iv, tolerance));
        }
        if sf.eval(hi).is_zero() {
            out.push(RootInterval { lo: hi.clone(), hi: hi.clone() });
        }
    }
    out.sort_by(|x, y| x.lo.cmp(&y.lo));
    out
}

/// Bisects an isolating interval of a squarefree polynomial.
fn refine(p: &Polynomial<Rational>, mut iv: RootInterval, tolerance: &Rational) -> RootInterval {
    let sign_lo = p.eval(&iv.lo).signum();
    let sign_hi = p.eval(&iv.hi).signum();
    let by_sign = !sign_lo.is_zero() && !sign_hi.is_zero();
    while !iv.is_exact() && iv.width() > *tolerance {
        let mid = iv.midpoint();
        let s = p.eval(&mid).signum();
        if s.is_zero() {
            return RootInterval { lo: mid.clone(), hi: mid };
        }
        // An endpoint that is itself a root gives no sign information, so fall
        // back to the variation count on the left half.
        let go_left = if by_sign { s != sign_lo } else { descartes_bound(p, &iv.lo, &mid) == 1 };
        if go_left {
            iv.hi = mid;
        } else {
            iv.lo = mid;
        }
    }
    iv
}

/// True when `p` has a real root in `[lo, hi]`.
pub fn has_root_in(p: &Polynomial<Rational>, lo: &Rational, hi: &Rational) -> bool {
    if p.is_zero() {
        return true;
    }
    let sf = p.squarefree_part();
    if sf.eval(lo).is_zero() || sf.eval(hi).is_zero() {
        return true;
    }
    let tol = hi - lo;
    !isolate_real_roots(&sf, lo, hi, &tol).is_empty()
}

/// Default refinement width used for reported roots.
pub fn default_tolerance() -> Rational {
    Rational::new(1.into(), num_bigint::BigInt::from(1u64 << 50))
}

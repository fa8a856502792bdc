//! Square determinants over a [`Scalar`].

use crate::scalar::Scalar;

/// Determinant of a square matrix given as rows.
///
/// Exact scalars use fraction-free (Bareiss) elimination, where every
/// division is exact and intermediate entries stay minors of the input.
/// Floating scalars use Gaussian elimination with partial pivoting.
pub fn determinant<T: Scalar>(rows: &[Vec<T>]) -> T {
    let n = rows.len();
    assert!(rows.iter().all(|r| r.len() == n), "matrix must be square");
    if n == 0 {
        return T::one();
    }
    let mut a: Vec<Vec<T>> = rows.to_vec();
    if T::EXACT {
        bareiss(&mut a)
    } else {
        partial_pivot(&mut a)
    }
}

fn bareiss<T: Scalar>(a: &mut [Vec<T>]) -> T {
    let n = a.len();
    let mut sign_flip = false;
    let mut prev = T::one();
    for k in 0..n {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(k, i);
                    sign_flip = !sign_flip;
                }
                None => return T::zero(),
            }
        }
        let pivot = a[k][k].clone();
        for i in k + 1..n {
            for j in k + 1..n {
                let v = pivot.clone() * a[i][j].clone() - a[i][k].clone() * a[k][j].clone();
                a[i][j] = v.exact_div(&prev);
            }
            a[i][k] = T::zero();
        }
        prev = pivot;
    }
    let det = a[n - 1][n - 1].clone();
    if sign_flip {
        -det
    } else {
        det
    }
}

fn partial_pivot<T: Scalar>(a: &mut [Vec<T>]) -> T {
    let n = a.len();
    let mut det = T::one();
    for k in 0..n {
        let (best, best_abs) =
            (k..n).map(|i| (i, a[i][k].abs())).fold((k, T::zero()), |acc, cur| if cur.1 > acc.1 { cur } else { acc });
        if best_abs.is_zero() {
            return T::zero();
        }
        if best != k {
            a.swap(k, best);
            det = -det;
        }
        let pivot = a[k][k].clone();
        det = det * pivot.clone();
        for i in k + 1..n {
            let factor = a[i][k].clone() / pivot.clone();
            if factor.is_zero() {
                continue;
            }
            for j in k + 1..n {
                a[i][j] = a[i][j].clone() - factor.clone() * a[k][j].clone();
            }
            a[i][k] = T::zero();
        }
    }
    det
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, Rational};

    /// Permutation-expansion oracle.
    fn leibniz(m: &[Vec<Rational>]) -> Rational {
        fn perms(n: usize) -> Vec<Vec<usize>> {
            if n == 0 {
                return vec![vec![]];
            }
            let mut out = Vec::new();
            for p in perms(n - 1) {
                for pos in 0..n {
                    let mut q = p.clone();
                    q.insert(pos, n - 1);
                    out.push(q);
                }
            }
            out
        }
        let n = m.len();
        perms(n)
            .into_iter()
            .map(|p| {
                let inversions =
                    (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).filter(|&(i, j)| p[i] > p[j]).count();
                let prod = (0..n).fold(int(1), |acc, i| acc * m[i][p[i]].clone());
                if inversions % 2 == 0 {
                    prod
                } else {
                    -prod
                }
            })
            .sum()
    }

    #[test]
    fn matches_leibniz_expansion() {
        let m: Vec<Vec<Rational>> = vec![
            vec![int(0), int(2), int(-1), int(3)],
            vec![int(1), int(0), int(4), int(1)],
            vec![int(2), int(5), int(0), int(-2)],
            vec![int(-3), int(1), int(1), int(0)],
        ];
        assert_eq!(determinant(&m), leibniz(&m));
    }

    #[test]
    fn singular_and_float() {
        let m = vec![vec![int(1), int(2)], vec![int(2), int(4)]];
        assert_eq!(determinant(&m), int(0));
        let f = vec![vec![0.0, 2.0], vec![3.0, 1.0]];
        assert!((determinant::<f64>(&f) + 6.0).abs() < 1e-15);
        let f32m = vec![vec![2.0f32, 0.0], vec![0.0, 3.0]];
        assert_eq!(determinant(&f32m), 6.0);
    }

    #[test]
    fn lower_triangular() {
        let m = vec![vec![int(1), int(0), int(0)], vec![int(7), int(2), int(0)], vec![int(9), int(8), int(6)]];
        assert_eq!(determinant(&m), int(12));
    }
}

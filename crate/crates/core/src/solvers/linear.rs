//! Exact solving of `A·X = B` over the rationals by fraction-free (Bareiss)
//! elimination on an integer-scaled copy of the system.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::domains::Rational;

/// Solves `A·X = B` for square, non-singular `A` with `B` holding one
/// column per right-hand side. `None` if `A` is singular.
pub fn solve(a: &[Vec<Rational>], b: &[Vec<Rational>]) -> Option<Vec<Vec<Rational>>> {
    let n = a.len();
    assert_eq!(b.len(), n, "one right-hand-side row per equation");
    let nr = b.first().map_or(0, Vec::len);
    // Scale every row by the lcm of its denominators; the solution is unchanged.
    let mut m: Vec<Vec<BigInt>> = Vec::with_capacity(n);
    for (ra, rb) in a.iter().zip(b) {
        assert_eq!(ra.len(), n, "square system");
        let lcm = ra.iter().chain(rb).fold(BigInt::one(), |acc, r| acc.lcm(r.denom()));
        m.push(ra.iter().chain(rb).map(|r| r.numer() * (&lcm / r.denom())).collect());
    }
    let width = n + nr;
    let mut prev = BigInt::one();
    for k in 0..n {
        let p = (k..n).find(|&i| !m[i][k].is_zero())?;
        m.swap(k, p);
        let (head, tail) = m.split_at_mut(k + 1);
        let pivot_row = &head[k];
        for row in tail.iter_mut() {
            let factor = row[k].clone();
            for j in k + 1..width {
                let v = &row[j] * &pivot_row[k] - &factor * &pivot_row[j];
                // Bareiss: the division is exact.
                row[j] = v / &prev;
            }
            row[k] = BigInt::zero();
        }
        prev = m[k][k].clone();
    }
    let mut x = vec![vec![Rational::zero(); nr]; n];
    for i in (0..n).rev() {
        for r in 0..nr {
            let mut acc = Rational::from_integer(m[i][n + r].clone());
            for j in i + 1..n {
                if !m[i][j].is_zero() {
                    acc -= Rational::from_integer(m[i][j].clone()) * &x[j][r];
                }
            }
            x[i][r] = acc / Rational::from_integer(m[i][i].clone());
        }
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domains::rat;

    #[test]
    fn two_by_two() {
        // x + y/2 = 1, x/3 - y = 0  →  x = 6/7, y = 2/7
        let a = vec![vec![rat(1, 1), rat(1, 2)], vec![rat(1, 3), rat(-1, 1)]];
        let b = vec![vec![rat(1, 1)], vec![rat(0, 1)]];
        let x = solve(&a, &b).unwrap();
        assert_eq!(x, vec![vec![rat(6, 7)], vec![rat(2, 7)]]);
    }

    #[test]
    fn needs_a_row_swap() {
        let a = vec![vec![rat(0, 1), rat(1, 1)], vec![rat(1, 1), rat(0, 1)]];
        let b = vec![vec![rat(3, 1)], vec![rat(5, 1)]];
        assert_eq!(solve(&a, &b).unwrap(), vec![vec![rat(5, 1)], vec![rat(3, 1)]]);
    }

    #[test]
    fn singular_is_none() {
        let a = vec![vec![rat(1, 1), rat(2, 1)], vec![rat(2, 1), rat(4, 1)]];
        let b = vec![vec![rat(1, 1)], vec![rat(2, 1)]];
        assert!(solve(&a, &b).is_none());
    }
}

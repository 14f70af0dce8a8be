//! Floating-point value iteration for reachability, used as a performance
//! baseline by the benchmarks. Not exact; never used for checks.

use num_traits::ToPrimitive;

use crate::domains::Rational;
use crate::products::ProdSucc;

/// Gauss-Jacobi sweeps from 0 until the sup-norm change is below `tol`.
/// Returns the values and the number of sweeps.
pub fn reach_prob_f64(rows: &[Vec<(ProdSucc, Rational)>], tol: f64, max_iter: usize) -> (Vec<f64>, usize) {
    let rows: Vec<Vec<(ProdSucc, f64)>> = rows
        .iter()
        .map(|r| r.iter().map(|(s, p)| (*s, p.to_f64().unwrap_or(0.0))).collect())
        .collect();
    let mut v = vec![0.0; rows.len()];
    for it in 1..=max_iter {
        let next: Vec<f64> = rows
            .iter()
            .map(|r| {
                r.iter()
                    .map(|(s, p)| match s {
                        ProdSucc::State(j) => p * v[*j],
                        ProdSucc::Accept => *p,
                        ProdSucc::Reject => 0.0,
                    })
                    .sum()
            })
            .collect();
        let delta = next.iter().zip(&v).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        v = next;
        if delta < tol {
            return (v, it);
        }
    }
    (v, max_iter)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::products::product_mc_dfa;

    #[test]
    fn close_to_the_exact_value() {
        let p = product_mc_dfa(&fixtures::fig4_mc(), &fixtures::fig2_dfa()).unwrap();
        let (v, _) = reach_prob_f64(&p.rows, 1e-12, 100);
        assert!((v[p.space.initial] - 0.16).abs() < 1e-12);
    }
}

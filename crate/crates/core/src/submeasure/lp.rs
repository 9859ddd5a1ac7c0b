//! Exact simplex for max cᵀx subject to Ax ≤ b, x ≥ 0 with b ≥ 0.

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal { value: Rational, point: Vec<Rational> },
    Unbounded,
}

/// Tableau simplex with Bland's rule. The origin is the starting vertex, so
/// every right-hand side must be nonnegative.
pub fn maximize(c: &[Rational], rows: &[(Vec<Rational>, Rational)]) -> Result<LpOutcome> {
    let n = c.len();
    let m = rows.len();
    if rows.iter().any(|(a, b)| a.len() != n || b.is_negative()) {
        return Err(Error::Precondition("rows must have n coefficients and b ≥ 0".into()));
    }
    let width = n + m + 1;
    let mut tab: Vec<Vec<Rational>> = rows
        .iter()
        .enumerate()
        .map(|(i, (a, b))| {
            let mut row = vec![Rational::zero(); width];
            row[..n].clone_from_slice(a);
            row[n + i] = Rational::from_integer(1.into());
            row[width - 1] = b.clone();
            row
        })
        .collect();
    // reduced costs: objective row holds -c
    let mut obj = vec![Rational::zero(); width];
    for (j, cj) in c.iter().enumerate() {
        obj[j] = -cj;
    }
    let mut basis: Vec<usize> = (n..n + m).collect();

    while let Some(enter) = (0..width - 1).find(|&j| obj[j].is_negative()) {
        let mut leave: Option<(usize, Rational)> = None;
        for (i, row) in tab.iter().enumerate() {
            if row[enter].is_positive() {
                let ratio = &row[width - 1] / &row[enter];
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && basis[i] < basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let Some((pr, _)) = leave else {
            return Ok(LpOutcome::Unbounded);
        };
        let pivot = tab[pr][enter].clone();
        for v in tab[pr].iter_mut() {
            *v /= &pivot;
        }
        let prow = tab[pr].clone();
        for (i, row) in tab.iter_mut().enumerate() {
            if i != pr && !row[enter].is_zero() {
                let factor = row[enter].clone();
                for (v, p) in row.iter_mut().zip(&prow) {
                    if !p.is_zero() {
                        *v -= &factor * p;
                    }
                }
            }
        }
        if !obj[enter].is_zero() {
            let factor = obj[enter].clone();
            for (v, p) in obj.iter_mut().zip(&prow) {
                if !p.is_zero() {
                    *v -= &factor * p;
                }
            }
        }
        basis[pr] = enter;
    }

    let mut point = vec![Rational::zero(); n];
    for (i, &bv) in basis.iter().enumerate() {
        if bv < n {
            point[bv] = tab[i][width - 1].clone();
        }
    }
    Ok(LpOutcome::Optimal { value: obj[width - 1].clone(), point })
}

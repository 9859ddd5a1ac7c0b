//! Intersection matrices of 𝒫([n])⁺ and exact fraction-free elimination.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::algebra::canonical_elements;
use crate::error::{Error, Result};
use crate::rational::Rational;

/// Largest n for which the (2ⁿ − 1)-square matrix is built.
pub const MAX_INCIDENCE_N: usize = 12;

/// A dense 0/1 matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitMatrix {
    rows: Vec<Vec<u8>>,
}

impl BitMatrix {
    pub fn new(rows: Vec<Vec<u8>>) -> Self {
        BitMatrix { rows }
    }

    pub fn size(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<u8>] {
        &self.rows
    }

    pub fn get(&self, i: usize, j: usize) -> u8 {
        self.rows[i][j]
    }

    fn to_bigint_rows(&self) -> Vec<Vec<BigInt>> {
        self.rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
    }

    /// Exact determinant by Bareiss elimination.
    pub fn determinant(&self) -> BigInt {
        let mut m = self.to_bigint_rows();
        let n = m.len();
        if n == 0 {
            return BigInt::one();
        }
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if m[k][k].is_zero() {
                match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                    Some(i) => {
                        m.swap(k, i);
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (&m[i][j] * &m[k][k] - &m[i][k] * &m[k][j]) / &prev;
                    m[i][j] = v;
                }
                m[i][k] = BigInt::zero();
            }
            prev = m[k][k].clone();
        }
        sign * &m[n - 1][n - 1]
    }
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 || n > MAX_INCIDENCE_N {
        return Err(Error::SizeCap(format!("n must lie in [1, {MAX_INCIDENCE_N}]")));
    }
    Ok(())
}

/// Entry (i, j) is 1 exactly when the i-th and j-th subsets meet.
pub fn incidence_matrix_in_order(order: &[u64]) -> BitMatrix {
    BitMatrix::new(order.iter().map(|&a| order.iter().map(|&b| u8::from(a & b != 0)).collect()).collect())
}

/// The matrix over 𝒫([n])⁺ in size-then-lexicographic order.
pub fn incidence_matrix(n: usize) -> Result<BitMatrix> {
    check_n(n)?;
    let order: Vec<u64> = canonical_elements(n).into_iter().map(|e| e.bits()).collect();
    Ok(incidence_matrix_in_order(&order))
}

/// The inductive enumeration: 𝒫([n])⁺, then {n+1}, then y ∪ {n+1} for each y.
pub fn recursive_order(n: usize) -> Result<Vec<u64>> {
    check_n(n)?;
    let mut order = vec![1u64];
    for k in 1..n {
        let top = 1u64 << k;
        let lifted: Vec<u64> = order.iter().map(|y| y | top).collect();
        order.push(top);
        order.extend(lifted);
    }
    Ok(order)
}

/// A_{n+1} = [[A, 0, A], [0, 1, 1], [A, 1, 1]] from A = A_n, both in the inductive order.
pub fn assemble_next(a: &BitMatrix) -> BitMatrix {
    let m = a.size();
    let mut rows = Vec::with_capacity(2 * m + 1);
    for r in a.rows() {
        let mut row = r.clone();
        row.push(0);
        row.extend_from_slice(r);
        rows.push(row);
    }
    let mut middle = vec![0u8; m];
    middle.extend(std::iter::repeat_n(1, m + 1));
    rows.push(middle);
    for r in a.rows() {
        let mut row = r.clone();
        row.extend(std::iter::repeat_n(1, m + 1));
        rows.push(row);
    }
    BitMatrix::new(rows)
}

/// Solves A·x = b exactly for square nonsingular A: Bareiss forward
/// elimination on the integer-scaled system, then rational back substitution.
pub fn solve_exact(a: &BitMatrix, b: &[Rational]) -> Result<Vec<Rational>> {
    let n = a.size();
    if b.len() != n {
        return Err(Error::Format("right-hand side length differs from the matrix size".into()));
    }
    let scale = b.iter().fold(BigInt::one(), |acc, q| num_integer::Integer::lcm(&acc, q.denom()));
    let mut m = a.to_bigint_rows();
    for (row, q) in m.iter_mut().zip(b) {
        row.push(q.numer() * (&scale / q.denom()));
    }
    let mut prev = BigInt::one();
    for k in 0..n {
        if m[k][k].is_zero() {
            let i = (k + 1..n)
                .find(|&i| !m[i][k].is_zero())
                .ok_or_else(|| Error::Precondition("matrix is singular".into()))?;
            m.swap(k, i);
        }
        for i in k + 1..n {
            for j in k + 1..=n {
                let v = (&m[i][j] * &m[k][k] - &m[i][k] * &m[k][j]) / &prev;
                m[i][j] = v;
            }
            m[i][k] = BigInt::zero();
        }
        prev = m[k][k].clone();
    }
    let mut x = vec![Rational::zero(); n];
    let scale = Rational::from_integer(scale);
    for k in (0..n).rev() {
        let mut acc = Rational::from_integer(m[k][n].clone());
        for j in k + 1..n {
            if !m[k][j].is_zero() {
                acc -= Rational::from_integer(m[k][j].clone()) * &x[j];
            }
        }
        x[k] = acc / Rational::from_integer(m[k][k].clone());
    }
    Ok(x.into_iter().map(|v| v / &scale).collect())
}

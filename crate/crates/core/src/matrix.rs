//! Small dense matrices over the rationals.

use std::fmt;
use std::ops::{Index, IndexMut};

use num_traits::{One, Zero};

use crate::scalar::{self, Q};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Q>,
}

impl QMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        QMatrix {
            rows,
            cols,
            data: vec![Q::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Q::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Q>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged matrix");
        QMatrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Q) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        QMatrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[Q] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<Q>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && (0..self.rows).all(|i| (0..i).all(|j| self[(i, j)] == self[(j, i)]))
    }

    pub fn mul(&self, other: &QMatrix) -> QMatrix {
        assert_eq!(self.cols, other.rows, "shape mismatch in product");
        Self::from_fn(self.rows, other.cols, |i, j| {
            (0..self.cols).fold(Q::zero(), |acc, k| acc + &self[(i, k)] * &other[(k, j)])
        })
    }

    /// Matrix-vector product over any scalar field containing the rationals.
    pub fn apply<S: scalar::Scalar>(&self, v: &[S]) -> Vec<S> {
        assert_eq!(
            self.cols,
            v.len(),
            "shape mismatch in matrix-vector product"
        );
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .filter(|(a, _)| !a.is_zero())
                    .fold(S::zero(), |acc, (a, x)| {
                        acc + S::from_rational(a) * x.clone()
                    })
            })
            .collect()
    }

    pub fn scale(&self, c: &Q) -> QMatrix {
        QMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * c).collect(),
        }
    }

    pub fn sub(&self, other: &QMatrix) -> QMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        QMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    /// `P M P^T` for the permutation sending row `i` to row `perm[i]`.
    pub fn permute_symmetric(&self, perm: &[usize]) -> QMatrix {
        assert!(self.is_square() && perm.len() == self.rows);
        let mut out = QMatrix::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(perm[i], perm[j])] = self[(i, j)].clone();
            }
        }
        out
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> QMatrix {
        Self::from_fn(rows.len(), cols.len(), |i, j| {
            self[(rows[i], cols[j])].clone()
        })
    }

    pub fn trace(&self) -> Q {
        (0..self.rows.min(self.cols)).fold(Q::zero(), |acc, i| acc + &self[(i, i)])
    }

    /// Determinant by Gaussian elimination with exact pivots.
    pub fn det(&self) -> Q {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let n = self.rows;
        let mut m = self.clone();
        let mut det = Q::one();
        for col in 0..n {
            let Some(p) = (col..n).find(|&r| !m[(r, col)].is_zero()) else {
                return Q::zero();
            };
            if p != col {
                m.swap_rows(p, col);
                det = -det;
            }
            let pivot = m[(col, col)].clone();
            det *= &pivot;
            for r in col + 1..n {
                if m[(r, col)].is_zero() {
                    continue;
                }
                let f = &m[(r, col)] / &pivot;
                for c in col..n {
                    let delta = &f * &m[(col, c)];
                    m[(r, c)] -= delta;
                }
            }
        }
        det
    }

    /// Inverse by Gauss-Jordan elimination; `None` when singular.
    pub fn inverse(&self) -> Option<QMatrix> {
        assert!(self.is_square(), "inverse of a non-square matrix");
        let n = self.rows;
        let mut m = self.clone();
        let mut inv = QMatrix::identity(n);
        for col in 0..n {
            let p = (col..n).find(|&r| !m[(r, col)].is_zero())?;
            m.swap_rows(p, col);
            inv.swap_rows(p, col);
            let pivot = m[(col, col)].clone();
            for c in 0..n {
                m[(col, c)] /= &pivot;
                inv[(col, c)] /= &pivot;
            }
            for r in 0..n {
                if r == col || m[(r, col)].is_zero() {
                    continue;
                }
                let f = m[(r, col)].clone();
                for c in 0..n {
                    let dm = &f * &m[(col, c)];
                    m[(r, c)] -= dm;
                    let di = &f * &inv[(col, c)];
                    inv[(r, c)] -= di;
                }
            }
        }
        Some(inv)
    }

    /// Coefficients of `det(tI - M)`, lowest degree first (monic), by the
    /// Faddeev-LeVerrier recursion.
    pub fn charpoly(&self) -> Vec<Q> {
        assert!(
            self.is_square(),
            "characteristic polynomial of a non-square matrix"
        );
        let n = self.rows;
        let mut coeffs = vec![Q::zero(); n + 1];
        coeffs[n] = Q::one();
        let mut aux = QMatrix::zeros(n, n);
        for k in 1..=n {
            // aux_k = M aux_{k-1} + c_{n-k+1} I ; c_{n-k} = -tr(M aux_k) / k
            let mut next = self.mul(&aux);
            for i in 0..n {
                next[(i, i)] += &coeffs[n - k + 1];
            }
            let c = -(self.mul(&next).trace()) / Q::from_integer((k as i64).into());
            coeffs[n - k] = c;
            aux = next;
        }
        coeffs
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }
}

impl Index<(usize, usize)> for QMatrix {
    type Output = Q;
    fn index(&self, (i, j): (usize, usize)) -> &Q {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for QMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Q {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Display for QMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(ToString::to_string).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Divides a polynomial (lowest degree first) by `(t - root)`, returning the
/// quotient and the remainder.
pub fn divide_by_linear(poly: &[Q], root: &Q) -> (Vec<Q>, Q) {
    if poly.is_empty() {
        return (Vec::new(), Q::zero());
    }
    let deg = poly.len() - 1;
    let mut quotient = vec![Q::zero(); deg];
    let mut carry = Q::zero();
    for i in (0..=deg).rev() {
        let value = &poly[i] + &carry * root;
        if i == 0 {
            return (quotient, value);
        }
        quotient[i - 1] = value.clone();
        carry = value;
    }
    unreachable!()
}

/// Largest `m` such that `(t - root)^m` divides `poly` exactly.
pub fn root_multiplicity(poly: &[Q], root: &Q) -> usize {
    let mut current = poly.to_vec();
    let mut m = 0;
    while current.len() > 1 {
        let (quotient, rem) = divide_by_linear(&current, root);
        if !rem.is_zero() {
            break;
        }
        current = quotient;
        m += 1;
    }
    m
}

/// Evaluates a polynomial (lowest degree first) at `t`.
pub fn eval_poly(poly: &[Q], t: &Q) -> Q {
    poly.iter().rev().fold(Q::zero(), |acc, c| acc * t + c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{q, qi};

    fn m(rows: &[&[i64]]) -> QMatrix {
        QMatrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| qi(x)).collect())
                .collect(),
        )
    }

    #[test]
    fn determinant_and_inverse() {
        let a = m(&[&[2, 1, 0], &[1, 3, 1], &[0, 1, 4]]);
        assert_eq!(a.det(), qi(18));
        let inv = a.inverse().unwrap();
        assert_eq!(a.mul(&inv), QMatrix::identity(3));
        let singular = m(&[&[1, -1], &[-1, 1]]);
        assert_eq!(singular.det(), qi(0));
        assert!(singular.inverse().is_none());
        let needs_swap = m(&[&[0, 1], &[1, 0]]);
        assert_eq!(needs_swap.det(), qi(-1));
    }

    #[test]
    fn charpoly_matches_determinant_definition() {
        let a = QMatrix::from_rows(vec![
            vec![qi(1), q(-7, 2), q(-7, 2)],
            vec![q(-7, 2), qi(1), q(-7, 2)],
            vec![q(-7, 2), q(-7, 2), qi(1)],
        ]);
        let cp = a.charpoly();
        // det(tI - A) at t = 0 equals (-1)^3 det A.
        assert_eq!(eval_poly(&cp, &qi(0)), -a.det());
        // Eigenvalues 1 + 7/2 (twice) and 1 - 7.
        assert_eq!(root_multiplicity(&cp, &q(9, 2)), 2);
        assert_eq!(root_multiplicity(&cp, &qi(-6)), 1);
        for t in [-3, 0, 2, 5] {
            let shifted = QMatrix::identity(3).scale(&qi(t)).sub(&a);
            assert_eq!(eval_poly(&cp, &qi(t)), shifted.det());
        }
    }

    #[test]
    fn linear_division() {
        // (t-2)^2 (t+1) = t^3 - 3t^2 + 4
        let p = vec![qi(4), qi(0), qi(-3), qi(1)];
        let (quo, rem) = divide_by_linear(&p, &qi(2));
        assert_eq!(rem, qi(0));
        assert_eq!(quo, vec![qi(-2), qi(-1), qi(1)]);
        assert_eq!(root_multiplicity(&p, &qi(2)), 2);
        assert_eq!(root_multiplicity(&p, &qi(3)), 0);
    }
}

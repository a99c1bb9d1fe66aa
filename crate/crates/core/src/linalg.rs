//! Dense exact matrices and the elimination kernels everything else builds on.
//!
//! The elimination is fraction-free in the Bareiss style (two-term cross
//! products divided by the previous pivot, which is exact in any integral
//! domain and keeps intermediate growth polynomial). Pivots are chosen as the
//! first nonzero entry in column order so every result is deterministic.

use num_traits::{Num, Signed};
use std::fmt;
use std::ops::Neg;

/// Scalar the kernels are generic over. Satisfied by rationals (the only
/// instantiation used here) and by floats, should an approximate caller ever
/// want one.
pub trait Scalar: Num + Neg<Output = Self> + Clone + PartialEq {}
impl<T: Num + Neg<Output = T> + Clone + PartialEq> Scalar for T {}

/// Row-major dense matrix.
#[derive(Clone, PartialEq, Eq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

/// The square system has linearly dependent rows; the subset cannot define a
/// vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("singular system")]
pub struct Singular;

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        assert!(!rows.is_empty(), "matrix must have at least one row");
        let cols = rows[0].len();
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        Matrix {
            rows: rows.len(),
            cols,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    /// Appends `col` as an extra column.
    pub fn augment_col(&self, col: &[T]) -> Self {
        assert_eq!(col.len(), self.rows);
        let mut rows = Vec::with_capacity(self.rows);
        for i in 0..self.rows {
            let mut r = self.row(i).to_vec();
            r.push(col[i].clone());
            rows.push(r);
        }
        Self::from_rows(rows)
    }

    /// Exact rank via fraction-free elimination.
    pub fn rank(&self) -> usize {
        let mut work = self.clone();
        let mut prev = T::one();
        let mut r = 0;
        for c in 0..work.cols {
            if r == work.rows {
                break;
            }
            let Some(p) = (r..work.rows).find(|&i| work[(i, c)] != T::zero()) else {
                continue;
            };
            work.swap_rows(r, p);
            let pivot = work[(r, c)].clone();
            for i in r + 1..work.rows {
                let fac = work[(i, c)].clone();
                for j in 0..work.cols {
                    let v = (pivot.clone() * work[(i, j)].clone()
                        - fac.clone() * work[(r, j)].clone())
                        / prev.clone();
                    work[(i, j)] = v;
                }
            }
            prev = pivot;
            r += 1;
        }
        r
    }

    /// Exact solution of the square system `self * x = b`, or `Singular` when
    /// the rows are dependent.
    pub fn solve_square(&self, b: &[T]) -> Result<Vec<T>, Singular> {
        assert_eq!(self.rows, self.cols, "solve_square needs a square matrix");
        assert_eq!(b.len(), self.rows);
        let n = self.rows;
        let mut work = self.augment_col(b);
        let mut prev = T::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| work[(i, c)] != T::zero()) else {
                return Err(Singular);
            };
            work.swap_rows(c, p);
            let pivot = work[(c, c)].clone();
            for i in c + 1..n {
                let fac = work[(i, c)].clone();
                for j in 0..=n {
                    let v = (pivot.clone() * work[(i, j)].clone()
                        - fac.clone() * work[(c, j)].clone())
                        / prev.clone();
                    work[(i, j)] = v;
                }
            }
            prev = pivot;
        }
        let mut x = vec![T::zero(); n];
        for i in (0..n).rev() {
            let mut acc = work[(i, n)].clone();
            for j in i + 1..n {
                acc = acc - work[(i, j)].clone() * x[j].clone();
            }
            x[i] = acc / work[(i, i)].clone();
        }
        Ok(x)
    }

    /// Basis of the left nullspace `{p : p^T self = 0}`, i.e. of the
    /// multipliers combining rows to the zero row. Empty iff the rows are
    /// independent. Each basis vector is scaled so its first nonzero entry
    /// is one.
    pub fn left_nullspace(&self) -> Vec<Vec<T>> {
        let m = self.rows;
        // Eliminate [self | I]; row operations record themselves in the
        // identity part, so zeroed rows yield the combining multipliers.
        let mut work = Matrix::zeros(m, self.cols + m);
        for i in 0..m {
            for j in 0..self.cols {
                work[(i, j)] = self[(i, j)].clone();
            }
            work[(i, self.cols + i)] = T::one();
        }
        let mut prev = T::one();
        let mut r = 0;
        for c in 0..self.cols {
            if r == m {
                break;
            }
            let Some(p) = (r..m).find(|&i| work[(i, c)] != T::zero()) else {
                continue;
            };
            work.swap_rows(r, p);
            let pivot = work[(r, c)].clone();
            for i in r + 1..m {
                let fac = work[(i, c)].clone();
                for j in 0..work.cols {
                    let v = (pivot.clone() * work[(i, j)].clone()
                        - fac.clone() * work[(r, j)].clone())
                        / prev.clone();
                    work[(i, j)] = v;
                }
            }
            prev = pivot;
            r += 1;
        }
        let mut basis = Vec::new();
        for i in r..m {
            debug_assert!((0..self.cols).all(|j| work[(i, j)] == T::zero()));
            let mut p: Vec<T> = (0..m).map(|j| work[(i, self.cols + j)].clone()).collect();
            if let Some(lead) = p.iter().position(|v| *v != T::zero()) {
                let scale = p[lead].clone();
                for v in p.iter_mut() {
                    *v = v.clone() / scale.clone();
                }
            }
            basis.push(p);
        }
        basis
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }
}

impl<T> std::ops::Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

impl<T: fmt::Display> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols)
                .map(|j| self.data[i * self.cols + j].to_string())
                .collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Dot product.
pub fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .fold(T::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}

/// Scales a rational vector to the primitive integer vector with positive
/// leading entry; used to present multipliers canonically.
pub fn primitive_multipliers(p: &[crate::Rat]) -> Vec<crate::Rat> {
    use num_bigint::BigInt;
    use num_integer::Integer;
    let mut den = BigInt::from(1);
    for v in p {
        den = den.lcm(v.denom());
    }
    let mut nums: Vec<BigInt> = p.iter().map(|v| (v * crate::Rat::from_integer(den.clone())).to_integer()).collect();
    let mut g = BigInt::from(0);
    for n in &nums {
        g = g.gcd(n);
    }
    if g > BigInt::from(0) {
        for n in nums.iter_mut() {
            *n = &*n / &g;
        }
    }
    if let Some(lead) = nums.iter().find(|n| !n.is_zero()) {
        if lead.is_negative() {
            for n in nums.iter_mut() {
                *n = -&*n;
            }
        }
    }
    nums.into_iter().map(crate::Rat::from_integer).collect()
}

use num_traits::Zero;

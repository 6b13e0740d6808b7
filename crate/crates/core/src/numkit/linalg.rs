//! Small dense row-major matrices, generic over the scalar type so that the
//! same code path runs on plain values and on jets.

use std::fmt;
use std::ops::{Index, IndexMut};

use super::real::Real;
use crate::error::{Error, Result};

#[derive(Clone, PartialEq)]
pub struct Mat<T = f64> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: fmt::Debug> fmt::Debug for Mat<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Mat {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            writeln!(f, "  {:?}", &self.data[r * self.cols..(r + 1) * self.cols])?;
        }
        write!(f, "]")
    }
}

impl<T> Index<(usize, usize)> for Mat<T> {
    type Output = T;
    fn index(&self, (r, c): (usize, usize)) -> &T {
        debug_assert!(r < self.rows && c < self.cols);
        &self.data[r * self.cols + c]
    }
}

impl<T> IndexMut<(usize, usize)> for Mat<T> {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut T {
        debug_assert!(r < self.rows && c < self.cols);
        &mut self.data[r * self.cols + c]
    }
}

impl<T> Mat<T> {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<T> {
        self.data
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<T>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix data length mismatch");
        Self { rows, cols, data }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }
}

impl<T: Real> Mat<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |_, _| T::zero())
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |r, c| if r == c { T::one() } else { T::zero() })
    }

    pub fn from_values(m: &Mat<f64>) -> Self {
        Mat::from_fn(m.rows, m.cols, |r, c| T::constant(m[(r, c)]))
    }

    /// Strips derivative information.
    pub fn values(&self) -> Mat<f64> {
        Mat::from_fn(self.rows, self.cols, |r, c| self[(r, c)].value())
    }

    pub fn column(&self, c: usize) -> Vec<T> {
        (0..self.rows).map(|r| self[(r, c)].clone()).collect()
    }

    pub fn from_columns(columns: &[Vec<T>]) -> Self {
        let cols = columns.len();
        let rows = columns.first().map_or(0, Vec::len);
        Self::from_fn(rows, cols, |r, c| columns[c][r].clone())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].clone())
    }

    pub fn matmul(&self, rhs: &Mat<T>) -> Self {
        assert_eq!(self.cols, rhs.rows, "matmul shape mismatch");
        Self::from_fn(self.rows, rhs.cols, |r, c| {
            let mut acc = T::zero();
            for k in 0..self.cols {
                acc = acc + self[(r, k)].clone() * rhs[(k, c)].clone();
            }
            acc
        })
    }

    pub fn mat_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.cols, v.len(), "mat_vec shape mismatch");
        (0..self.rows)
            .map(|r| {
                let mut acc = T::zero();
                for (k, vk) in v.iter().enumerate() {
                    acc = acc + self[(r, k)].clone() * vk.clone();
                }
                acc
            })
            .collect()
    }

    pub fn add(&self, rhs: &Mat<T>) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Self::from_fn(self.rows, self.cols, |r, c| {
            self[(r, c)].clone() + rhs[(r, c)].clone()
        })
    }

    pub fn sub(&self, rhs: &Mat<T>) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Self::from_fn(self.rows, self.cols, |r, c| {
            self[(r, c)].clone() - rhs[(r, c)].clone()
        })
    }

    pub fn scale(&self, s: &T) -> Self {
        Self::from_fn(self.rows, self.cols, |r, c| {
            self[(r, c)].clone() * s.clone()
        })
    }

    pub fn trace(&self) -> T {
        let mut acc = T::zero();
        for i in 0..self.rows.min(self.cols) {
            acc = acc + self[(i, i)].clone();
        }
        acc
    }

    /// Symmetric part `(A + Aᵀ)/2`.
    pub fn symmetrized(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |r, c| {
            (self[(r, c)].clone() + self[(c, r)].clone()) * 0.5
        })
    }

    /// Frobenius norm of the values.
    pub fn norm(&self) -> f64 {
        self.data
            .iter()
            .map(|x| x.value() * x.value())
            .sum::<f64>()
            .sqrt()
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(Real::is_finite)
    }

    /// Lower Cholesky factor `L` with `A = L·Lᵀ`.
    ///
    /// Fails when a pivot falls below `1e-12·‖A‖`.
    pub fn cholesky(&self) -> Result<Mat<T>> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch {
                context: "cholesky",
                expected: self.rows,
                found: self.cols,
            });
        }
        let n = self.rows;
        let floor = 1e-12 * self.norm();
        let mut l = Mat::<T>::zeros(n, n);
        for j in 0..n {
            let mut diag = self[(j, j)].clone();
            for k in 0..j {
                diag = diag - l[(j, k)].clone() * l[(j, k)].clone();
            }
            if !(diag.value() > floor) {
                return Err(Error::NotPositiveDefinite {
                    pivot: diag.value(),
                    index: j,
                });
            }
            let ljj = diag.sqrt();
            for i in (j + 1)..n {
                let mut s = self[(i, j)].clone();
                for k in 0..j {
                    s = s - l[(i, k)].clone() * l[(j, k)].clone();
                }
                l[(i, j)] = s / ljj.clone();
            }
            l[(j, j)] = ljj;
        }
        Ok(l)
    }
}

/// Solves `L·y = b` for lower-triangular `L`, column by column.
pub fn forward_substitute<T: Real>(l: &Mat<T>, b: &Mat<T>) -> Mat<T> {
    let n = l.rows();
    let mut y = b.clone();
    for c in 0..b.cols() {
        for i in 0..n {
            let mut s = b[(i, c)].clone();
            for k in 0..i {
                s = s - l[(i, k)].clone() * y[(k, c)].clone();
            }
            y[(i, c)] = s / l[(i, i)].clone();
        }
    }
    y
}

/// Solves `Lᵀ·x = y` for lower-triangular `L`, column by column.
pub fn backward_substitute<T: Real>(l: &Mat<T>, y: &Mat<T>) -> Mat<T> {
    let n = l.rows();
    let mut x = y.clone();
    for c in 0..y.cols() {
        for i in (0..n).rev() {
            let mut s = y[(i, c)].clone();
            for k in (i + 1)..n {
                s = s - l[(k, i)].clone() * x[(k, c)].clone();
            }
            x[(i, c)] = s / l[(i, i)].clone();
        }
    }
    x
}

/// Solves `A·X = B` for symmetric positive definite `A`.
pub fn solve_spd<T: Real>(a: &Mat<T>, b: &Mat<T>) -> Result<Mat<T>> {
    let l = a.cholesky()?;
    Ok(backward_substitute(&l, &forward_substitute(&l, b)))
}

/// `uᵀ·A·v`.
pub fn quadratic_form<T: Real>(a: &Mat<T>, u: &[T], v: &[T]) -> T {
    let av = a.mat_vec(v);
    dot(u, &av)
}

pub fn dot<T: Real>(u: &[T], v: &[T]) -> T {
    assert_eq!(u.len(), v.len(), "dot length mismatch");
    let mut acc = T::zero();
    for (a, b) in u.iter().zip(v) {
        acc = acc + a.clone() * b.clone();
    }
    acc
}

pub fn vec_norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn vec_sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

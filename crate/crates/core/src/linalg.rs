//! Dense real linear algebra: symmetric eigendecomposition (cyclic Jacobi),
//! Gaussian elimination with partial pivoting, and Kronecker products.
//!
//! Everything here operates on small row-major matrices. No attempt is made
//! to scale past a few thousand rows; the callers in this crate stay well
//! under that.

use crate::error::{Error, Result};
use crate::scalar::{cast, Scalar};
use crate::tol;

/// Largest row/column count a Kronecker product may produce.
pub const KRONECKER_DIMENSION_CAP: usize = 4096;

/// Maximum number of cyclic Jacobi sweeps before giving up.
pub const JACOBI_MAX_SWEEPS: usize = 100;

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix<T> {
    rows: usize,
    cols: usize,
    entries: Vec<T>,
}

impl<T: Scalar> DenseMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, T::one());
        }
        m
    }

    /// Builds from nested rows. Panics if the rows are ragged.
    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Self {
            rows: r,
            cols: c,
            entries: rows.into_iter().flatten().collect(),
        }
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

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.entries[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: T) {
        self.entries[i * self.cols + j] = value;
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j));
            }
        }
        out
    }

    /// Matrix product. Panics on shape mismatch.
    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matmul shape mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == T::zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.get(i, j) + a * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    /// Matrix-vector product. Panics on shape mismatch.
    pub fn matvec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(self.cols, x.len(), "matvec shape mismatch");
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(x)
                    .fold(T::zero(), |acc, (&a, &b)| acc + a * b)
            })
            .collect()
    }

    /// Induced infinity norm: maximum absolute row sum.
    pub fn norm_inf(&self) -> T {
        (0..self.rows)
            .map(|i| self.row(i).iter().fold(T::zero(), |acc, &v| acc + v.abs()))
            .fold(T::zero(), T::max)
    }

    pub fn frobenius_norm(&self) -> T {
        self.entries
            .iter()
            .fold(T::zero(), |acc, &v| acc + v * v)
            .sqrt()
    }

    pub fn max_abs(&self) -> T {
        self.entries
            .iter()
            .fold(T::zero(), |acc, &v| acc.max(v.abs()))
    }

    /// Largest |A(i,j) - A(j,i)| over the strict upper triangle.
    pub fn symmetry_defect(&self) -> T {
        let mut worst = T::zero();
        for i in 0..self.rows {
            for j in (i + 1)..self.cols.min(self.rows) {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst
    }

    fn off_diagonal_norm(&self) -> T {
        let mut acc = T::zero();
        for i in 0..self.rows {
            for j in 0..self.cols {
                if i != j {
                    let v = self.get(i, j);
                    acc = acc + v * v;
                }
            }
        }
        acc.sqrt()
    }
}

/// Eigendecomposition of a symmetric matrix.
///
/// Eigenvalues ascend; `eigenvectors` holds the matching orthonormal columns.
/// `residual` is `max_i ||A v_i - lambda_i v_i||_inf` against the input.
#[derive(Debug, Clone)]
pub struct Spectrum<T> {
    pub eigenvalues: Vec<T>,
    pub eigenvectors: DenseMatrix<T>,
    pub residual: T,
}

impl<T: Scalar> Spectrum<T> {
    /// Column `i` of the eigenvector matrix.
    pub fn eigenvector(&self, i: usize) -> Vec<T> {
        (0..self.eigenvectors.rows())
            .map(|r| self.eigenvectors.get(r, i))
            .collect()
    }
}

/// Symmetric eigendecomposition by cyclic Jacobi rotations.
///
/// Sweeps rotate every off-diagonal pair until the off-diagonal Frobenius
/// norm drops below `tol` (default `1e-12 * ||A||_F`), capped at
/// [`JACOBI_MAX_SWEEPS`]. Rejects non-square or asymmetric input.
pub fn sym_eigen<T: Scalar>(a: &DenseMatrix<T>, tol: Option<T>) -> Result<Spectrum<T>> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let defect = a.symmetry_defect();
    if defect > tol::symmetry::<T>() {
        return Err(Error::Asymmetric {
            max_delta: defect.to_f64().unwrap_or(f64::NAN),
        });
    }

    let n = a.rows();
    let tol = tol.unwrap_or_else(|| tol::jacobi_factor::<T>() * a.frobenius_norm());
    let mut d = a.clone();
    let mut v = DenseMatrix::<T>::identity(n);

    let mut converged = n < 2;
    for _ in 0..JACOBI_MAX_SWEEPS {
        if d.off_diagonal_norm() <= tol {
            converged = true;
            break;
        }
        for p in 0..n.saturating_sub(1) {
            for q in (p + 1)..n {
                let apq = d.get(p, q);
                if apq == T::zero() {
                    continue;
                }
                let app = d.get(p, p);
                let aqq = d.get(q, q);

                // classic two-angle rotation (Numerical Recipes 11.1)
                let theta = (aqq - app) / (cast::<T>(2.0) * apq);
                let t = if theta >= T::zero() {
                    T::one() / (theta + (T::one() + theta * theta).sqrt())
                } else {
                    -T::one() / (-theta + (T::one() + theta * theta).sqrt())
                };
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = t * c;

                for i in 0..n {
                    if i != p && i != q {
                        let dip = d.get(i, p);
                        let diq = d.get(i, q);
                        d.set(i, p, c * dip - s * diq);
                        d.set(p, i, c * dip - s * diq);
                        d.set(i, q, s * dip + c * diq);
                        d.set(q, i, s * dip + c * diq);
                    }
                }
                let two = cast::<T>(2.0);
                let dpp = c * c * app - two * s * c * apq + s * s * aqq;
                let dqq = s * s * app + two * s * c * apq + c * c * aqq;
                d.set(p, p, dpp);
                d.set(q, q, dqq);
                d.set(p, q, T::zero());
                d.set(q, p, T::zero());

                for i in 0..n {
                    let vip = v.get(i, p);
                    let viq = v.get(i, q);
                    v.set(i, p, c * vip - s * viq);
                    v.set(i, q, s * vip + c * viq);
                }
            }
        }
    }
    if !converged && d.off_diagonal_norm() > tol {
        return Err(Error::NoConvergence {
            sweeps: JACOBI_MAX_SWEEPS,
            off_norm: d.off_diagonal_norm().to_f64().unwrap_or(f64::NAN),
            tol: tol.to_f64().unwrap_or(f64::NAN),
        });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        d.get(i, i)
            .partial_cmp(&d.get(j, j))
            .expect("eigenvalues are finite")
    });
    let eigenvalues: Vec<T> = order.iter().map(|&i| d.get(i, i)).collect();
    let mut eigenvectors = DenseMatrix::<T>::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        for r in 0..n {
            eigenvectors.set(r, dst, v.get(r, src));
        }
    }

    let mut residual = T::zero();
    for (i, &lambda) in eigenvalues.iter().enumerate() {
        let col: Vec<T> = (0..n).map(|r| eigenvectors.get(r, i)).collect();
        let av = a.matvec(&col);
        for r in 0..n {
            residual = residual.max((av[r] - lambda * col[r]).abs());
        }
    }

    Ok(Spectrum {
        eigenvalues,
        eigenvectors,
        residual,
    })
}

/// Solves `A x = rhs` by Gaussian elimination with partial pivoting.
pub fn solve<T: Scalar>(a: &DenseMatrix<T>, rhs: &[T]) -> Result<Vec<T>> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let n = a.rows();
    assert_eq!(rhs.len(), n, "rhs length mismatch");

    let mut m = a.clone();
    let mut b = rhs.to_vec();
    let pivot_floor = tol::min_pivot::<T>();

    for col in 0..n {
        let mut pivot_row = col;
        let mut pivot_mag = m.get(col, col).abs();
        for r in (col + 1)..n {
            let mag = m.get(r, col).abs();
            if mag > pivot_mag {
                pivot_mag = mag;
                pivot_row = r;
            }
        }
        if pivot_mag < pivot_floor {
            return Err(Error::Singular {
                column: col,
                pivot: pivot_mag.to_f64().unwrap_or(f64::NAN),
            });
        }
        if pivot_row != col {
            for j in 0..n {
                let tmp = m.get(col, j);
                m.set(col, j, m.get(pivot_row, j));
                m.set(pivot_row, j, tmp);
            }
            b.swap(col, pivot_row);
        }
        let inv = T::one() / m.get(col, col);
        for r in (col + 1)..n {
            let factor = m.get(r, col) * inv;
            if factor == T::zero() {
                continue;
            }
            for j in col..n {
                let v = m.get(r, j) - factor * m.get(col, j);
                m.set(r, j, v);
            }
            b[r] = b[r] - factor * b[col];
        }
    }

    let mut x = vec![T::zero(); n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for j in (row + 1)..n {
            acc = acc - m.get(row, j) * x[j];
        }
        x[row] = acc / m.get(row, row);
    }
    Ok(x)
}

/// Kronecker product `A (x) B`.
///
/// `(A (x) B)(i*rB + k, j*cB + l) = A(i,j) * B(k,l)`. Errors if either product
/// dimension exceeds [`KRONECKER_DIMENSION_CAP`].
pub fn kronecker<T: Scalar>(a: &DenseMatrix<T>, b: &DenseMatrix<T>) -> Result<DenseMatrix<T>> {
    let rows = a.rows() * b.rows();
    let cols = a.cols() * b.cols();
    for dim in [rows, cols] {
        if dim > KRONECKER_DIMENSION_CAP {
            return Err(Error::DimensionCap {
                dim,
                cap: KRONECKER_DIMENSION_CAP,
            });
        }
    }
    let mut out = DenseMatrix::<T>::zeros(rows, cols);
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            let aij = a.get(i, j);
            if aij == T::zero() {
                continue;
            }
            for k in 0..b.rows() {
                for l in 0..b.cols() {
                    out.set(i * b.rows() + k, j * b.cols() + l, aij * b.get(k, l));
                }
            }
        }
    }
    Ok(out)
}

/// Infinity norm of `A x - rhs`.
pub fn solve_residual<T: Scalar>(a: &DenseMatrix<T>, x: &[T], rhs: &[T]) -> T {
    a.matvec(x)
        .iter()
        .zip(rhs)
        .fold(T::zero(), |acc, (&ax, &b)| acc.max((ax - b).abs()))
}

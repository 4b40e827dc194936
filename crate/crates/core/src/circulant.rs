//! Closed-form eigenvalues of symmetric circulant and block-circulant
//! matrices, so circle and torus chains never need a dense eigensolve.
//!
//! Only symmetric generators are supported; that keeps every spectrum real
//! and covers all the matrices this crate produces (M = P P^T and its
//! Laplacian are symmetric for circle and torus walks).

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;
use crate::scalar::{cast, Scalar};
use crate::tol;

/// First row of a symmetric circulant matrix.
#[derive(Debug, Clone)]
pub struct CirculantSpec<T> {
    generator: Vec<T>,
}

/// Generator array `a[l][k]` of an n^2-order block-circulant matrix built
/// from n circulant blocks of order n, laid out so that entry
/// `(x_i*n + y_i, x_j*n + y_j)` equals `a[(x_j - x_i) mod n][(y_j - y_i) mod n]`.
///
/// Requires central symmetry `a[l][k] == a[n-l][n-k]`, which is exactly what
/// makes the realized matrix symmetric and its spectrum real. Doubly
/// mirrored generators (`a[l][k] == a[n-l][k] == a[l][n-k]`) satisfy it
/// trivially; torus walks with unequal opposing move probabilities produce
/// the general centrally symmetric case.
#[derive(Debug, Clone)]
pub struct BlockCirculantSpec<T> {
    blocks: Vec<Vec<T>>,
}

fn check_mirrored<T: Scalar>(values: &[T], index: impl Fn(usize) -> T) -> Result<()> {
    let n = values.len();
    let tol = tol::consistency::<T>();
    for k in 1..n {
        if (index(k) - index(n - k)).abs() > tol {
            return Err(Error::AsymmetricGenerator { index: k });
        }
    }
    Ok(())
}

/// `cos(2 pi m / n)` for `m = 0..n`, computed in f64 and narrowed.
fn cos_table<T: Scalar>(n: usize) -> Vec<T> {
    (0..n)
        .map(|m| cast::<T>((2.0 * std::f64::consts::PI * m as f64 / n as f64).cos()))
        .collect()
}

impl<T: Scalar> CirculantSpec<T> {
    /// Requires a mirrored generator: `a[k] == a[n-k]` for all k.
    pub fn new(generator: Vec<T>) -> Result<Self> {
        if generator.is_empty() {
            return Err(Error::InvalidGraph("empty circulant generator".into()));
        }
        check_mirrored(&generator, |k| generator[k])?;
        Ok(Self { generator })
    }

    pub fn order(&self) -> usize {
        self.generator.len()
    }

    pub fn generator(&self) -> &[T] {
        &self.generator
    }

    /// All n eigenvalues, real by symmetry, in index order i = 0..n:
    ///
    /// `lambda_i = a_0 + sum_{k=1}^{floor((n-1)/2)} 2 a_k cos(2 pi i k / n)
    ///             + (n even ? a_{n/2} * (-1)^i : 0)`
    ///
    /// Zero generator entries are skipped, so sparse generators (the walk
    /// chains) cost O(n) total.
    pub fn eigenvalues(&self) -> Vec<T> {
        let n = self.order();
        let cos = cos_table::<T>(n);
        let half = (n - 1) / 2;
        let two = cast::<T>(2.0);
        (0..n)
            .map(|i| {
                let mut acc = self.generator[0];
                for k in 1..=half {
                    let a = self.generator[k];
                    if a == T::zero() {
                        continue;
                    }
                    acc = acc + two * a * cos[(i * k) % n];
                }
                if n % 2 == 0 {
                    let a = self.generator[n / 2];
                    if a != T::zero() {
                        acc = if i % 2 == 0 { acc + a } else { acc - a };
                    }
                }
                acc
            })
            .collect()
    }

    /// Dense n x n realization, used by the oracle tests.
    pub fn dense(&self) -> DenseMatrix<T> {
        let n = self.order();
        let mut m = DenseMatrix::<T>::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m.set(i, j, self.generator[(j + n - i) % n]);
            }
        }
        m
    }
}

impl<T: Scalar> BlockCirculantSpec<T> {
    /// Requires centrally symmetric blocks: `a[l][k] == a[n-l][n-k]`.
    pub fn new(blocks: Vec<Vec<T>>) -> Result<Self> {
        let n = blocks.len();
        if n == 0 || blocks.iter().any(|row| row.len() != n) {
            return Err(Error::InvalidGraph(
                "block-circulant generator must be a square array".into(),
            ));
        }
        let tol = tol::consistency::<T>();
        for l in 0..n {
            for k in 0..n {
                let v = blocks[l][k];
                if (v - blocks[(n - l) % n][(n - k) % n]).abs() > tol {
                    return Err(Error::AsymmetricGenerator { index: l * n + k });
                }
            }
        }
        Ok(Self { blocks })
    }

    /// Block count n (matrix order is n^2).
    pub fn block_order(&self) -> usize {
        self.blocks.len()
    }

    pub fn blocks(&self) -> &[Vec<T>] {
        &self.blocks
    }

    /// All n^2 eigenvalues via the 2-D transform, flattened as `i * n + j`:
    ///
    /// `lambda_{i,j} = sum_l sum_k a[l][k] cos(2 pi (i l + j k) / n)`
    ///
    /// Imaginary parts cancel under the central symmetry. Zero entries are
    /// skipped, so the sparse walk generators cost O(n^2) total.
    pub fn eigenvalues(&self) -> Vec<T> {
        let n = self.block_order();
        let cos = cos_table::<T>(n);
        let nonzero: Vec<(usize, usize, T)> = (0..n)
            .flat_map(|l| (0..n).map(move |k| (l, k)))
            .filter_map(|(l, k)| {
                let a = self.blocks[l][k];
                (a != T::zero()).then_some((l, k, a))
            })
            .collect();
        let mut out = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = T::zero();
                for &(l, k, a) in &nonzero {
                    acc = acc + a * cos[(i * l + j * k) % n];
                }
                out.push(acc);
            }
        }
        out
    }

    /// Dense n^2 x n^2 realization, used by the oracle tests.
    pub fn dense(&self) -> DenseMatrix<T> {
        let n = self.block_order();
        let mut m = DenseMatrix::<T>::zeros(n * n, n * n);
        for xi in 0..n {
            for yi in 0..n {
                for xj in 0..n {
                    for yj in 0..n {
                        let value = self.blocks[(xj + n - xi) % n][(yj + n - yi) % n];
                        m.set(xi * n + yi, xj * n + yj, value);
                    }
                }
            }
        }
        m
    }
}

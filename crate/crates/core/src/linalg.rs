//! Dense complex linear algebra for the boundary-integral solver: LU with
//! partial pivoting plus a 1-norm condition estimate. Problem sizes stay in
//! the hundreds, so a direct factorization is the robust choice.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Row-major dense complex matrix.
#[derive(Debug, Clone)]
pub struct CMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(n: usize) -> CMatrix {
        CMatrix {
            n,
            data: vec![Complex64::new(0.0, 0.0); n * n],
        }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.n + j] = v;
    }

    /// Maximum absolute column sum.
    pub fn norm_one(&self) -> f64 {
        (0..self.n)
            .map(|j| (0..self.n).map(|i| self.at(i, j).norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }
}

/// LU factorization with partial pivoting, `P A = L U`.
#[derive(Debug, Clone)]
pub struct LuFactors {
    n: usize,
    /// Combined L (unit lower, below diagonal) and U (upper) factors.
    lu: Vec<Complex64>,
    /// Row swap performed at each elimination step.
    pivots: Vec<usize>,
    /// 1-norm of the original matrix, kept for the condition estimate.
    norm_one: f64,
}

impl LuFactors {
    /// Factorizes `a`, consuming it.
    pub fn new(a: CMatrix) -> Result<LuFactors> {
        let n = a.n;
        let norm_one = a.norm_one();
        let mut lu = a.data;
        let mut pivots = vec![0usize; n];

        for k in 0..n {
            let mut pivot_row = k;
            let mut pivot_mag = lu[k * n + k].norm();
            for i in (k + 1)..n {
                let mag = lu[i * n + k].norm();
                if mag > pivot_mag {
                    pivot_mag = mag;
                    pivot_row = i;
                }
            }
            if pivot_mag < 1e-300 {
                return Err(Error::IllConditioned {
                    estimate: f64::INFINITY,
                });
            }
            pivots[k] = pivot_row;
            if pivot_row != k {
                for j in 0..n {
                    lu.swap(k * n + j, pivot_row * n + j);
                }
            }
            let pivot = lu[k * n + k];
            for i in (k + 1)..n {
                let factor = lu[i * n + k] / pivot;
                lu[i * n + k] = factor;
                for j in (k + 1)..n {
                    let ukj = lu[k * n + j];
                    lu[i * n + j] -= factor * ukj;
                }
            }
        }

        Ok(LuFactors {
            n,
            lu,
            pivots,
            norm_one,
        })
    }

    /// Solves `A x = b`.
    #[allow(clippy::needless_range_loop)]
    pub fn solve(&self, b: &[Complex64]) -> Vec<Complex64> {
        let n = self.n;
        let mut x = b.to_vec();
        // x = P b: the swaps must be applied in factorization order before
        // any elimination.
        for k in 0..n {
            x.swap(k, self.pivots[k]);
        }
        // L y = x, unit lower triangular.
        for i in 1..n {
            let mut s = x[i];
            for j in 0..i {
                s -= self.lu[i * n + j] * x[j];
            }
            x[i] = s;
        }
        // U x = y.
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in (i + 1)..n {
                s -= self.lu[i * n + j] * x[j];
            }
            x[i] = s / self.lu[i * n + i];
        }
        x
    }

    /// Solves `A^H x = b` using the same factors
    /// (`A = P^T L U`, hence `A^H = U^H L^H P`).
    #[allow(clippy::needless_range_loop)]
    pub fn solve_conj_transpose(&self, b: &[Complex64]) -> Vec<Complex64> {
        let n = self.n;
        let mut x = b.to_vec();
        // U^H g = b: U^H is lower triangular.
        for i in 0..n {
            let mut s = x[i];
            for j in 0..i {
                s -= self.lu[j * n + i].conj() * x[j];
            }
            x[i] = s / self.lu[i * n + i].conj();
        }
        // L^H y = g: L^H is unit upper triangular.
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in (i + 1)..n {
                s -= self.lu[j * n + i].conj() * x[j];
            }
            x[i] = s;
        }
        // x = P^T y: undo the pivot swaps in reverse.
        for k in (0..n).rev() {
            x.swap(k, self.pivots[k]);
        }
        x
    }

    /// 1-norm condition estimate `||A||_1 * est(||A^-1||_1)` by the
    /// Hager power iteration on the factorized inverse.
    pub fn condition_estimate(&self) -> f64 {
        let n = self.n;
        let mut x = vec![Complex64::new(1.0 / n as f64, 0.0); n];
        let mut inv_norm = 0.0_f64;
        for _ in 0..5 {
            let y = self.solve(&x);
            let y_norm: f64 = y.iter().map(|v| v.norm()).sum();
            inv_norm = inv_norm.max(y_norm);
            let xi: Vec<Complex64> = y
                .iter()
                .map(|v| {
                    if v.norm() == 0.0 {
                        Complex64::new(1.0, 0.0)
                    } else {
                        v / v.norm()
                    }
                })
                .collect();
            let z = self.solve_conj_transpose(&xi);
            let (jmax, zmax) = z
                .iter()
                .enumerate()
                .map(|(j, v)| (j, v.norm()))
                .fold((0, 0.0), |acc, cur| if cur.1 > acc.1 { cur } else { acc });
            let zx: f64 = z.iter().zip(&x).map(|(zi, xi)| (zi.conj() * xi).re).sum();
            if zmax <= zx.abs() {
                break;
            }
            x = vec![Complex64::new(0.0, 0.0); n];
            x[jmax] = Complex64::new(1.0, 0.0);
        }
        self.norm_one * inv_norm
    }
}

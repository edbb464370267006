//! Symmetric-matrix spectral decomposition and PSD matrix roots.
//!
//! The whitening/coloring transforms need `S^{1/2}` and `S^{-1/2}` of channel
//! covariance matrices. Both are computed on a shared eigenbasis from a cyclic
//! Jacobi solver, with eigenvalue truncation (pseudo-inverse semantics) for
//! near-singular covariances. The solver uses a fixed rotation order and a
//! fixed eigenvector sign convention so transform matrices are bit-reproducible.

use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Relative eigenvalue cutoff below which an eigendirection is treated as null.
pub const DEFAULT_EIG_CUTOFF: f64 = 1e-8;

const MAX_JACOBI_SWEEPS: usize = 64;

/// Real symmetric matrix, symmetrized exactly on construction.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMatrix {
    order: usize,
    data: Vec<f64>,
}

impl SymmetricMatrix {
    /// Builds from row-major entries of a square matrix; the stored entries
    /// are the symmetric part (A + A^T) / 2.
    pub fn new(order: usize, entries: Vec<f64>) -> Result<Self> {
        if entries.len() != order * order {
            return Err(Error::ShapeMismatch(format!(
                "symmetric matrix data length {} != {order}x{order}",
                entries.len()
            )));
        }
        if let Some(idx) = entries.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(idx));
        }
        let mut data = entries;
        for i in 0..order {
            for j in (i + 1)..order {
                let s = 0.5 * (data[i * order + j] + data[j * order + i]);
                data[i * order + j] = s;
                data[j * order + i] = s;
            }
        }
        Ok(Self { order, data })
    }

    pub fn from_matrix(m: &Matrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::ShapeMismatch(format!(
                "expected square matrix, got {}x{}",
                m.rows(),
                m.cols()
            )));
        }
        Self::new(m.rows(), m.data().to_vec())
    }

    pub fn identity(order: usize) -> Self {
        Self::from_matrix(&Matrix::identity(order)).expect("identity is symmetric")
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        Self::from_matrix(&Matrix::from_diagonal(diag)).expect("diagonal is symmetric")
    }

    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.order + j]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn as_matrix(&self) -> Matrix {
        Matrix::from_vec(self.order, self.order, self.data.clone())
            .expect("stored data is square")
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|a| a * a).sum::<f64>().sqrt()
    }
}

/// Eigenvalues (descending) and the matching orthonormal eigenvector columns.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Matrix,
}

impl EigenDecomposition {
    /// V * diag(lambda) * V^T.
    pub fn reconstruct(&self) -> Matrix {
        compose_from_basis(&self.eigenvectors, &self.eigenvalues)
    }
}

/// Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
///
/// Output is deterministic for identical input: eigenvalues sorted in
/// descending order, and each eigenvector column is flipped so its
/// largest-magnitude entry is positive.
pub fn eig_sym(m: &SymmetricMatrix) -> Result<EigenDecomposition> {
    let n = m.order;
    let mut a = m.data.clone();
    let mut v = Matrix::identity(n);

    if n == 1 {
        return Ok(EigenDecomposition {
            eigenvalues: vec![a[0]],
            eigenvectors: v,
        });
    }

    let frob = m.frobenius_norm();
    if frob > 0.0 {
        let mut converged = false;
        for _ in 0..MAX_JACOBI_SWEEPS {
            let mut off = 0.0;
            for p in 0..n {
                for q in (p + 1)..n {
                    off += a[p * n + q] * a[p * n + q];
                }
            }
            if off.sqrt() <= 1e-15 * frob {
                converged = true;
                break;
            }
            for p in 0..(n - 1) {
                for q in (p + 1)..n {
                    rotate(&mut a, &mut v, n, p, q);
                }
            }
        }
        if !converged {
            // One last check after the final sweep.
            let mut off = 0.0;
            for p in 0..n {
                for q in (p + 1)..n {
                    off += a[p * n + q] * a[p * n + q];
                }
            }
            if off.sqrt() > 1e-12 * frob {
                return Err(Error::NoConvergence {
                    sweeps: MAX_JACOBI_SWEEPS,
                });
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        a[j * n + j]
            .partial_cmp(&a[i * n + i])
            .expect("eigenvalues are finite")
    });

    let mut eigenvalues = Vec::with_capacity(n);
    let mut eigenvectors = Matrix::zeros(n, n);
    for (col, &src) in order.iter().enumerate() {
        eigenvalues.push(a[src * n + src]);
        // Sign convention: largest-magnitude entry positive.
        let mut pivot = 0;
        let mut best = -1.0;
        for row in 0..n {
            let mag = v.get(row, src).abs();
            if mag > best {
                best = mag;
                pivot = row;
            }
        }
        let flip = if v.get(pivot, src) < 0.0 { -1.0 } else { 1.0 };
        for row in 0..n {
            eigenvectors.set(row, col, flip * v.get(row, src));
        }
    }

    Ok(EigenDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

fn rotate(a: &mut [f64], v: &mut Matrix, n: usize, p: usize, q: usize) {
    let apq = a[p * n + q];
    if apq == 0.0 {
        return;
    }
    let app = a[p * n + p];
    let aqq = a[q * n + q];
    let theta = (aqq - app) / (2.0 * apq);
    let t = if theta >= 0.0 {
        1.0 / (theta + (1.0 + theta * theta).sqrt())
    } else {
        -1.0 / (-theta + (1.0 + theta * theta).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    let tau = s / (1.0 + c);

    a[p * n + p] = app - t * apq;
    a[q * n + q] = aqq + t * apq;
    a[p * n + q] = 0.0;
    a[q * n + p] = 0.0;

    for k in 0..n {
        if k != p && k != q {
            let akp = a[k * n + p];
            let akq = a[k * n + q];
            let new_kp = akp - s * (akq + tau * akp);
            let new_kq = akq + s * (akp - tau * akq);
            a[k * n + p] = new_kp;
            a[p * n + k] = new_kp;
            a[k * n + q] = new_kq;
            a[q * n + k] = new_kq;
        }
    }
    for k in 0..n {
        let vkp = v.get(k, p);
        let vkq = v.get(k, q);
        v.set(k, p, vkp - s * (vkq + tau * vkp));
        v.set(k, q, vkq + s * (vkp - tau * vkq));
    }
}

/// V * diag(d) * V^T, exactly symmetrized.
fn compose_from_basis(vectors: &Matrix, diag: &[f64]) -> Matrix {
    let n = vectors.rows();
    let mut scaled = vectors.clone();
    for (col, &d) in diag.iter().enumerate() {
        for row in 0..n {
            scaled.set(row, col, vectors.get(row, col) * d);
        }
    }
    let m = scaled.mul(&vectors.transpose());
    let mut out = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            out.set(i, j, 0.5 * (m.get(i, j) + m.get(j, i)));
        }
    }
    out
}

fn check_psd(eig: &EigenDecomposition) -> Result<()> {
    let max = eig.eigenvalues.first().copied().unwrap_or(0.0);
    let min = eig.eigenvalues.last().copied().unwrap_or(0.0);
    if min < -1e-9 * max.abs() && min < 0.0 {
        return Err(Error::NotPsd {
            min_eigenvalue: min,
            max_eigenvalue: max,
        });
    }
    Ok(())
}

/// Principal square root of a PSD matrix.
///
/// Eigenvalues that are slightly negative (within the PSD tolerance) are
/// clamped to zero before the root is formed.
pub fn sqrt_psd(m: &SymmetricMatrix) -> Result<SymmetricMatrix> {
    let eig = eig_sym(m)?;
    check_psd(&eig)?;
    let roots: Vec<f64> = eig
        .eigenvalues
        .iter()
        .map(|&l| l.max(0.0).sqrt())
        .collect();
    SymmetricMatrix::from_matrix(&compose_from_basis(&eig.eigenvectors, &roots))
}

/// Inverse square root of a PSD matrix with rank truncation.
///
/// Eigenvalues below `rel_cutoff * lambda_max` contribute zero (pseudo-inverse
/// semantics), matching the practice of dropping tiny eigenvalues when
/// whitening near-singular covariances.
pub fn inv_sqrt_psd(m: &SymmetricMatrix, rel_cutoff: f64) -> Result<SymmetricMatrix> {
    let eig = eig_sym(m)?;
    check_psd(&eig)?;
    let max = eig.eigenvalues.first().copied().unwrap_or(0.0);
    if max < 1e-300 {
        return Err(Error::ZeroMatrix);
    }
    let cutoff = rel_cutoff * max;
    let inv_roots: Vec<f64> = eig
        .eigenvalues
        .iter()
        .map(|&l| if l >= cutoff { 1.0 / l.sqrt() } else { 0.0 })
        .collect();
    SymmetricMatrix::from_matrix(&compose_from_basis(&eig.eigenvectors, &inv_roots))
}

/// Number of eigenvalues at or above `rel_cutoff * lambda_max`.
pub fn psd_rank(m: &SymmetricMatrix, rel_cutoff: f64) -> Result<usize> {
    let eig = eig_sym(m)?;
    let max = eig.eigenvalues.first().copied().unwrap_or(0.0);
    if max < 1e-300 {
        return Ok(0);
    }
    let cutoff = rel_cutoff * max;
    Ok(eig.eigenvalues.iter().filter(|&&l| l >= cutoff).count())
}

/// Projector onto the eigenspace retained by `inv_sqrt_psd` at the same cutoff.
pub fn retained_projector(m: &SymmetricMatrix, rel_cutoff: f64) -> Result<SymmetricMatrix> {
    let eig = eig_sym(m)?;
    let max = eig.eigenvalues.first().copied().unwrap_or(0.0);
    let cutoff = rel_cutoff * max.max(1e-300);
    let gates: Vec<f64> = eig
        .eigenvalues
        .iter()
        .map(|&l| if l >= cutoff { 1.0 } else { 0.0 })
        .collect();
    SymmetricMatrix::from_matrix(&compose_from_basis(&eig.eigenvectors, &gates))
}

//! Dense numerical kernels: SVD, unitary bases, linear solves and the
//! complex Schur form with eigenvalue reordering.
//!
//! QR and LU are delegated to `nalgebra`; everything here converts at the
//! boundary so the rest of the crate only sees `CMatrix`. The SVD is the
//! one-sided Jacobi method in `jacobi` and the Schur form uses the QR
//! iteration in `hqr`.

use super::hqr::complex_schur;
use super::jacobi::jacobi_svd;

use super::matrix::{CMatrix, C64};
use crate::error::{Error, Result};

const JACOBI_SWEEPS: usize = 80;
const SCHUR_MAX_ITER_PER_DIM: usize = 60;

/// Singular value decomposition `T = U diag(S) V*` with `S` descending.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: CMatrix,
    pub s: Vec<f64>,
    pub v: CMatrix,
}

impl Svd {
    /// Number of singular values strictly above `threshold`.
    pub fn rank(&self, threshold: f64) -> usize {
        self.s.iter().filter(|&&x| x > threshold).count()
    }

    pub fn largest(&self) -> f64 {
        self.s.first().copied().unwrap_or(0.0)
    }

    pub fn smallest(&self) -> f64 {
        self.s.last().copied().unwrap_or(0.0)
    }
}

pub fn svd(t: &CMatrix) -> Result<Svd> {
    t.ensure_finite()?;
    let (m, n) = (t.rows(), t.cols());
    let k = m.min(n);
    if k == 0 {
        return Ok(Svd {
            u: CMatrix::zeros(m, 0),
            s: Vec::new(),
            v: CMatrix::zeros(n, 0),
        });
    }
    let (u, sv, v) = jacobi_svd(t).ok_or_else(|| Error::NumericalFailure {
        context: "svd".into(),
        iterations: JACOBI_SWEEPS,
    })?;
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| sv[b].total_cmp(&sv[a]));
    let s = order.iter().map(|&j| sv[j]).collect();
    let su = CMatrix::from_fn(m, k, |i, j| u[(i, order[j])]);
    let sv = CMatrix::from_fn(n, k, |i, j| v[(i, order[j])]);
    Ok(Svd { u: su, s, v: sv })
}

/// Operator 2-norm, i.e. the largest singular value.
pub fn op_norm(t: &CMatrix) -> Result<f64> {
    Ok(svd(t)?.largest())
}

/// Operator norm for matrices already known to be finite; panics on kernel
/// failure, which cannot happen for finite input of the sizes used here.
pub(crate) fn norm2(t: &CMatrix) -> f64 {
    op_norm(t).expect("svd of a finite matrix")
}

/// Orthonormal basis for the numerical null space of a square matrix:
/// right singular vectors whose singular values are `<= threshold`.
pub fn null_space(a: &CMatrix, threshold: f64) -> Result<CMatrix> {
    let n = a.cols();
    // pad wide matrices with zero rows so the full right basis is returned
    let dec = if a.rows() < n {
        let mut padded = CMatrix::zeros(n, n);
        padded.set_block(0, 0, a);
        svd(&padded)?
    } else {
        svd(a)?
    };
    let rank = dec.rank(threshold);
    Ok(dec.v.columns_range(rank, n - rank))
}

/// Orthonormal basis for the column space of `a`, using the rank threshold
/// `threshold` on the singular values.
pub fn range_basis(a: &CMatrix, threshold: f64) -> Result<CMatrix> {
    let dec = svd(a)?;
    let r = dec.rank(threshold);
    Ok(dec.u.columns_range(0, r))
}

/// Orthonormalizes the columns of a full-column-rank matrix (thin QR).
pub fn orthonormalize(a: &CMatrix) -> CMatrix {
    if a.cols() == 0 {
        return a.clone();
    }
    let qr = a.to_nalgebra().qr();
    CMatrix::from_nalgebra(&qr.q())
}

/// Householder reflector `H` (unitary, Hermitian) whose first column is a
/// unit-modulus multiple of the unit vector `v`.
pub fn reflector_with_first_column(v: &[C64]) -> CMatrix {
    let n = v.len();
    let v1 = v[0];
    let theta = if v1.norm() > 0.0 {
        v1 / v1.norm()
    } else {
        C64::new(1.0, 0.0)
    };
    let mut w = v.to_vec();
    w[0] += theta;
    let ww: f64 = w.iter().map(|z| z.norm_sqr()).sum();
    let mut h = CMatrix::identity(n);
    if ww == 0.0 {
        return h;
    }
    for i in 0..n {
        for j in 0..n {
            h[(i, j)] -= w[i] * w[j].conj() * (2.0 / ww);
        }
    }
    h
}

/// Solves `A X = B` for square `A`.
///
/// `A` counts as singular when its smallest singular value is at most
/// `tol_rank` times its largest.
pub fn solve(a: &CMatrix, b: &CMatrix, tol_rank: f64) -> Result<CMatrix> {
    a.ensure_square()?;
    b.ensure_finite()?;
    if a.rows() != b.rows() {
        return Err(Error::InvalidInput(format!(
            "solve: A is {}x{} but B has {} rows",
            a.rows(),
            a.cols(),
            b.rows()
        )));
    }
    let dec = svd(a)?;
    let (smax, smin) = (dec.largest(), dec.smallest());
    if smax == 0.0 || smin <= tol_rank * smax {
        return Err(Error::Singular {
            smallest_singular_value: smin,
        });
    }
    let lu = a.to_nalgebra().lu();
    let x = lu.solve(&b.to_nalgebra()).ok_or(Error::Singular {
        smallest_singular_value: smin,
    })?;
    Ok(CMatrix::from_nalgebra(&x))
}

pub fn inverse(a: &CMatrix, tol_rank: f64) -> Result<CMatrix> {
    solve(a, &CMatrix::identity(a.rows()), tol_rank)
}

/// Complex Schur form `T = Q S Q*` with `Q` unitary and `S` upper triangular.
#[derive(Debug, Clone)]
pub struct SchurForm {
    pub q: CMatrix,
    pub s: CMatrix,
}

impl SchurForm {
    pub fn eigenvalues(&self) -> Vec<C64> {
        self.s.diagonal()
    }

    /// Unitary reordering that moves every diagonal position flagged in
    /// `select` to the leading block, keeping relative order on both sides.
    /// Returns the flags permuted along with the eigenvalues.
    pub fn reorder(&mut self, select: &[bool]) -> Vec<bool> {
        let n = self.s.rows();
        let mut flags = select.to_vec();
        let mut front = 0;
        for pos in 0..n {
            if !flags[pos] {
                continue;
            }
            let mut k = pos;
            while k > front {
                self.swap_adjacent(k - 1);
                flags.swap(k - 1, k);
                k -= 1;
            }
            front += 1;
        }
        flags
    }

    /// Swaps diagonal entries `k` and `k+1` by a Givens rotation.
    fn swap_adjacent(&mut self, k: usize) {
        let n = self.s.rows();
        let a = self.s[(k, k)];
        let c = self.s[(k + 1, k + 1)];
        let b = self.s[(k, k + 1)];
        // eigenvector of the 2x2 block for eigenvalue c
        let x = [b, c - a];
        let nrm = (x[0].norm_sqr() + x[1].norm_sqr()).sqrt();
        if nrm == 0.0 {
            return;
        }
        let g1 = x[0] / nrm;
        let g2 = x[1] / nrm;
        // G = [[g1, -conj(g2)], [g2, conj(g1)]]
        let g = [[g1, -g2.conj()], [g2, g1.conj()]];
        // S <- G* S on rows k, k+1
        for j in 0..n {
            let s0 = self.s[(k, j)];
            let s1 = self.s[(k + 1, j)];
            self.s[(k, j)] = g[0][0].conj() * s0 + g[1][0].conj() * s1;
            self.s[(k + 1, j)] = g[0][1].conj() * s0 + g[1][1].conj() * s1;
        }
        // S <- S G and Q <- Q G on columns k, k+1
        for m in [&mut self.s, &mut self.q] {
            for i in 0..n {
                let s0 = m[(i, k)];
                let s1 = m[(i, k + 1)];
                m[(i, k)] = s0 * g[0][0] + s1 * g[1][0];
                m[(i, k + 1)] = s0 * g[0][1] + s1 * g[1][1];
            }
        }
        self.s[(k + 1, k)] = C64::new(0.0, 0.0);
        self.s[(k, k)] = c;
        self.s[(k + 1, k + 1)] = a;
    }
}

/// Complex Schur decomposition.
pub fn schur(t: &CMatrix) -> Result<SchurForm> {
    t.ensure_square()?;
    t.ensure_finite()?;
    let n = t.rows();
    if n == 0 {
        return Ok(SchurForm {
            q: CMatrix::zeros(0, 0),
            s: CMatrix::zeros(0, 0),
        });
    }
    let (q, s) = complex_schur(t).ok_or_else(|| Error::NumericalFailure {
        context: "complex Schur decomposition".into(),
        iterations: SCHUR_MAX_ITER_PER_DIM * n,
    })?;
    Ok(SchurForm {
        q,
        s: s.upper_triangular_part(),
    })
}

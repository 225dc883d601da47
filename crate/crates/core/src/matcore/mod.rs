//! Complex dense matrices, operator norms, block algebra and the numerical
//! kernels every other module is built on.

mod hqr;
mod jacobi;
mod kernels;
mod matrix;

pub use kernels::{
    inverse, null_space, op_norm, orthonormalize, range_basis, reflector_with_first_column,
    schur, solve, svd, SchurForm, Svd,
};
pub(crate) use kernels::norm2;
pub use matrix::{CMatrix, C64};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Thresholds governing every rank, cluster, commutativity and contraction
/// decision. Relative tolerances are scaled by the relevant matrix norm at
/// the point of use.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToleranceConfig {
    /// Singular values at most `tol_rank * scale` count as zero.
    pub tol_rank: f64,
    pub tol_commute: f64,
    /// Eigenvalue grouping radius, relative to `1 + ||T||`.
    pub tol_cluster: f64,
    pub tol_contraction: f64,
    /// Slack for comparisons of eigenvalue moduli against 1.
    pub tol_spectrum: f64,
}

impl ToleranceConfig {
    /// Default tolerances for `n x n` matrices.
    pub fn for_dimension(n: usize) -> Self {
        ToleranceConfig {
            tol_rank: 1e-9 * n.max(1) as f64,
            tol_commute: 1e-9,
            tol_cluster: 1e-6,
            tol_contraction: 1e-8,
            tol_spectrum: 1e-9,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("tol_rank", self.tol_rank),
            ("tol_commute", self.tol_commute),
            ("tol_cluster", self.tol_cluster),
            ("tol_contraction", self.tol_contraction),
            ("tol_spectrum", self.tol_spectrum),
        ];
        for (name, v) in fields {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::InvalidInput(format!("{name} must be finite and >= 0, got {v}")));
            }
        }
        if self.tol_cluster < self.tol_rank {
            return Err(Error::InvalidInput(format!(
                "tol_cluster ({}) must not be finer than tol_rank ({})",
                self.tol_cluster, self.tol_rank
            )));
        }
        Ok(())
    }

    /// Absolute eigenvalue grouping radius for a matrix of norm `norm`.
    pub fn cluster_radius(&self, norm: f64) -> f64 {
        self.tol_cluster * (1.0 + norm)
    }
}

/// Block-diagonal matrix `B_1 (+) ... (+) B_d`. Its operator norm is the
/// largest block norm.
pub fn direct_sum(blocks: &[CMatrix]) -> Result<CMatrix> {
    if blocks.is_empty() {
        return Err(Error::InvalidInput("direct sum of an empty list".into()));
    }
    if let Some(b) = blocks.iter().find(|b| !b.is_square()) {
        return Err(Error::InvalidInput(format!(
            "direct sum needs square blocks, got {}x{}",
            b.rows(),
            b.cols()
        )));
    }
    let n = blocks.iter().map(CMatrix::rows).sum();
    let mut out = CMatrix::zeros(n, n);
    let mut offset = 0;
    for b in blocks {
        out.set_block(offset, offset, b);
        offset += b.rows();
    }
    Ok(out)
}

/// `(max |t_ij|, n^2 max |t_ij|)`, which bracket the operator norm.
pub fn entrywise_norm_bounds(t: &CMatrix) -> Result<(f64, f64)> {
    t.ensure_square()?;
    t.ensure_finite()?;
    let n = t.rows() as f64;
    let m = t.max_abs();
    Ok((m, n * n * m))
}

/// Normalized commutator `||ST - TS|| / (1 + ||S|| ||T||)`.
pub fn commutator_residual(s: &CMatrix, t: &CMatrix) -> Result<f64> {
    s.ensure_square()?;
    t.ensure_square()?;
    if s.rows() != t.rows() {
        return Err(Error::InvalidInput(format!(
            "commutator of {}x{} and {}x{} matrices",
            s.rows(),
            s.cols(),
            t.rows(),
            t.cols()
        )));
    }
    let c = &(s * t) - &(t * s);
    Ok(op_norm(&c)? / (1.0 + op_norm(s)? * op_norm(t)?))
}

/// `||(I - B B*) T B||` for an orthonormal basis `B`: how far span(B) is from
/// being invariant under `T`.
pub fn invariance_residual(t: &CMatrix, basis: &CMatrix) -> f64 {
    let tb = t * basis;
    let proj = basis * &(&basis.adjoint() * &tb);
    norm2(&(&tb - &proj))
}

/// Matrix of `T` restricted to the invariant subspace spanned by the
/// orthonormal columns of `basis`: `B* T B`.
pub fn restrict(t: &CMatrix, basis: &CMatrix) -> CMatrix {
    &basis.adjoint() * &(t * basis)
}

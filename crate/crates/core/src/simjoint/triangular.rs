//! Simultaneous unitary triangularization of commuting matrices.

use super::TriangularForm;
use crate::error::{Error, Result};
use crate::family::FamilySpec;
use crate::matcore::{norm2, reflector_with_first_column, schur, svd, CMatrix, ToleranceConfig, C64};
use crate::spectra::cmp_complex;

/// Largest strict-lower entry accepted before truncation, relative to the
/// member's norm.
pub(crate) const TRIANGULAR_TOL: f64 = 1e-9;

/// One unitary `U` with `U T_k U*` upper triangular for every member.
pub fn common_triangularize(family: &FamilySpec) -> Result<TriangularForm> {
    family.ensure_commuting()?;
    triangularize(family.members(), &family.tol).map_err(|e| match e {
        Error::NumericalFailure { .. } => worst_pair(family),
        other => other,
    })
}

fn worst_pair(family: &FamilySpec) -> Error {
    match family.worst_commutator() {
        Ok(Some((first, second, residual))) => Error::CommutativityViolation {
            first,
            second,
            residual,
        },
        Ok(None) => Error::NumericalFailure {
            context: "common eigenvector of a single matrix".into(),
            iterations: 0,
        },
        Err(e) => e,
    }
}

/// Triangularizes an arbitrary list of commuting square matrices of the
/// same size. A residual above the triangularity tolerance is reported as a
/// numerical failure; [`common_triangularize`] turns it into a
/// commutativity violation naming the worst pair.
pub(crate) fn triangularize(members: &[CMatrix], tol: &ToleranceConfig) -> Result<TriangularForm> {
    let n = members.first().map_or(0, CMatrix::rows);
    let mut w = CMatrix::identity(n);
    let mut current: Vec<CMatrix> = members.to_vec();
    for level in 0..n.saturating_sub(1) {
        let d = n - level;
        let v = common_eigenvector(&current, tol)?;
        let h = reflector_with_first_column(&v);
        let mut lift = CMatrix::identity(n);
        lift.set_block(level, level, &h);
        w = &w * &lift;
        current = current
            .iter()
            .map(|m| (&(&h.adjoint() * m) * &h).submatrix(1, 1, d - 1, d - 1))
            .collect();
    }
    let u = w.adjoint();
    let mut triangulars = Vec::with_capacity(members.len());
    for (k, t) in members.iter().enumerate() {
        let conj = &(&u * t) * &w;
        let lower = conj.strict_lower_max();
        if lower > TRIANGULAR_TOL * norm2(t) {
            return Err(Error::NumericalFailure {
                context: format!(
                    "member {k} is not triangularized (strict lower entry {lower:e})"
                ),
                iterations: n,
            });
        }
        triangulars.push(conj.upper_triangular_part());
    }
    Ok(TriangularForm { u, triangulars })
}

/// Unit vector that is an eigenvector of every matrix in `mats`.
///
/// Starting from the whole space, each matrix in turn is restricted to the
/// current subspace and the subspace is replaced by the eigenspace of the
/// restriction for its smallest-modulus eigenvalue cluster.
fn common_eigenvector(mats: &[CMatrix], tol: &ToleranceConfig) -> Result<Vec<C64>> {
    let d = mats[0].rows();
    let mut space = CMatrix::identity(d);
    for m in mats {
        if space.cols() == 1 {
            break;
        }
        let local = &space.adjoint() * &(m * &space);
        space = &space * &smallest_eigenspace(&local, tol)?;
    }
    Ok(space.column(0))
}

/// Orthonormal basis of the eigenspace of `m` for its smallest-modulus
/// eigenvalue (ties broken by real, then imaginary part).
fn smallest_eigenspace(m: &CMatrix, tol: &ToleranceConfig) -> Result<CMatrix> {
    let norm = norm2(m);
    let radius = tol.cluster_radius(norm);
    let mut form = schur(m)?;
    let eig = form.eigenvalues();
    let target = eig
        .iter()
        .copied()
        .min_by(|a, b| a.norm().total_cmp(&b.norm()).then_with(|| cmp_complex(*a, *b)))
        .expect("non-empty");
    let select: Vec<bool> = eig.iter().map(|z| (z - target).norm() <= radius).collect();
    let size = select.iter().filter(|&&s| s).count();
    form.reorder(&select);
    if size == 1 {
        return Ok(form.q.columns_range(0, 1));
    }
    // eigenspace inside the generalized eigenspace of the cluster
    let block = form.s.submatrix(0, 0, size, size);
    let lambda = block.trace() / size as f64;
    let dec = svd(&block.shift(lambda))?;
    let rank = dec.rank(tol.tol_rank * norm.max(f64::MIN_POSITIVE));
    let null = dec.v.columns_range(rank, size - rank);
    if null.cols() == 0 {
        return Err(Error::NumericalFailure {
            context: "eigenspace of a restricted member is empty".into(),
            iterations: 0,
        });
    }
    Ok(&form.q.columns_range(0, size) * &null)
}

//! Joint invariant-subspace decompositions of commuting families.
//!
//! The family decomposition starts from the whole space and refines it: a
//! part on which some member is neither a scalar nor confined to its
//! defective spectrum is split by the single-matrix decomposition of that
//! member's restriction. Parts are kept with orthonormal bases; different
//! parts are generally oblique to each other, which is what the assembly
//! map and its constant `alpha` account for.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::family::FamilySpec;
use crate::matcore::{
    invariance_residual, inverse, norm2, orthonormalize, restrict, schur, svd, CMatrix,
    ToleranceConfig, C64,
};
use crate::spectra::{near_any, profile, SpectralProfile};

/// Orthonormality slack accepted by [`Subspace::new`].
const ORTHONORMAL_TOL: f64 = 1e-10;

/// A subspace of `C^n` held by an orthonormal basis.
#[derive(Debug, Clone, PartialEq)]
pub struct Subspace {
    basis: CMatrix,
}

impl Subspace {
    pub fn new(basis: CMatrix) -> Result<Self> {
        let (n, d) = (basis.rows(), basis.cols());
        if d == 0 || d > n {
            return Err(Error::InvalidInput(format!("subspace of dimension {d} in C^{n}")));
        }
        let gram = &basis.adjoint() * &basis;
        let err = (&gram - &CMatrix::identity(d)).max_abs();
        if err > ORTHONORMAL_TOL {
            return Err(Error::InvalidInput(format!(
                "basis is not orthonormal (Gram error {err:e})"
            )));
        }
        Ok(Subspace { basis })
    }

    /// Subspace spanned by the (independent) columns of `spanning`.
    pub fn spanned_by(spanning: &CMatrix) -> Result<Self> {
        Self::new(orthonormalize(spanning))
    }

    pub fn whole(n: usize) -> Self {
        Subspace {
            basis: CMatrix::identity(n),
        }
    }

    pub fn basis(&self) -> &CMatrix {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.cols()
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.rows()
    }

    /// Orthogonal projection onto the subspace.
    pub fn projector(&self) -> CMatrix {
        &self.basis * &self.basis.adjoint()
    }
}

/// How a member acts on a part.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Tag {
    /// The member is `z I` on the part.
    Scalar(C64),
    /// Every eigenvalue of the restriction is a defective eigenvalue of the
    /// member.
    DeltaSpectrum,
}

#[derive(Debug, Clone)]
pub struct Decomposition {
    pub parts: Vec<Subspace>,
    /// `X`, mapping `v_1 + ... + v_s` to the stacked coordinates of the
    /// `v_i` in the part bases.
    pub assembly: CMatrix,
    /// `X^-1`, the part bases side by side.
    pub assembly_inverse: CMatrix,
    /// `max(||X||, ||X^-1||)`.
    pub alpha: f64,
    /// `tags[part][member]`.
    pub tags: Vec<Vec<Tag>>,
    /// Number of refinement splits performed.
    pub splits: usize,
}

impl Decomposition {
    pub fn dims(&self) -> Vec<usize> {
        self.parts.iter().map(Subspace::dim).collect()
    }

    /// Offsets of each part's coordinates in the assembled space.
    pub fn offsets(&self) -> Vec<usize> {
        self.parts
            .iter()
            .scan(0, |acc, p| {
                let o = *acc;
                *acc += p.dim();
                Some(o)
            })
            .collect()
    }

    /// `X T X^-1`, block diagonal conformally with the parts.
    pub fn assembled(&self, t: &CMatrix) -> CMatrix {
        &(&self.assembly * t) * &self.assembly_inverse
    }

    /// Largest off-diagonal block entry norm of `X T X^-1`.
    pub fn block_diagonal_residual(&self, t: &CMatrix) -> f64 {
        let m = self.assembled(t);
        let offsets = self.offsets();
        let mut off = m.clone();
        for (p, &o) in self.parts.iter().zip(&offsets) {
            off.set_block(o, o, &CMatrix::zeros(p.dim(), p.dim()));
        }
        norm2(&off)
    }
}

/// `Some(z)` when `T` acts on span(B) as `z I` with
/// `z = trace(B* T B) / d` and `||T B - z B|| <= tol_commute ||T|| sqrt(d)`.
pub fn scalar_fit(t: &CMatrix, basis: &CMatrix, tol: &ToleranceConfig) -> Option<C64> {
    let d = basis.cols();
    let tb = t * basis;
    let z = (&basis.adjoint() * &tb).trace() / d as f64;
    let res = norm2(&(&tb - &basis.scale(z)));
    (res <= tol.tol_commute * norm2(t) * (d as f64).sqrt()).then_some(z)
}

/// Whether every eigenvalue of `T` restricted to span(B) lies within the
/// cluster radius of the defective set `delta`.
pub fn delta_fit(
    t: &CMatrix,
    basis: &CMatrix,
    delta: &[C64],
    tol: &ToleranceConfig,
) -> Result<bool> {
    if delta.is_empty() {
        return Ok(false);
    }
    let radius = tol.cluster_radius(norm2(t));
    let eig = schur(&restrict(t, basis))?.eigenvalues();
    Ok(eig.iter().all(|&z| near_any(z, delta, radius)))
}

/// Tag of `T` on span(B), preferring the scalar tag when both apply.
pub fn classify(
    t: &CMatrix,
    basis: &CMatrix,
    delta: &[C64],
    tol: &ToleranceConfig,
) -> Result<Option<Tag>> {
    if let Some(z) = scalar_fit(t, basis, tol) {
        return Ok(Some(Tag::Scalar(z)));
    }
    Ok(delta_fit(t, basis, delta, tol)?.then_some(Tag::DeltaSpectrum))
}

/// `X` (inverse of the concatenated part bases) and
/// `alpha = max(||X||, ||X^-1||)`.
pub fn assembly_map(parts: &[Subspace], tol: &ToleranceConfig) -> Result<(CMatrix, f64)> {
    assemble(parts, tol).map(|(x, _, alpha)| (x, alpha))
}

fn assemble(parts: &[Subspace], tol: &ToleranceConfig) -> Result<(CMatrix, CMatrix, f64)> {
    let Some(first) = parts.first() else {
        return Err(Error::InvalidInput("no parts to assemble".into()));
    };
    let n = first.ambient_dim();
    let total: usize = parts.iter().map(Subspace::dim).sum();
    if total != n || parts.iter().any(|p| p.ambient_dim() != n) {
        return Err(Error::InvalidInput(format!(
            "part dimensions sum to {total}, expected {n}"
        )));
    }
    let bases: Vec<&CMatrix> = parts.iter().map(Subspace::basis).collect();
    let xi = CMatrix::hcat(&bases)?;
    let smin = svd(&xi)?.smallest();
    if smin <= tol.tol_rank {
        return Err(Error::DegenerateDecomposition {
            smallest_singular_value: smin,
        });
    }
    let x = inverse(&xi, 0.0).map_err(|_| Error::DegenerateDecomposition {
        smallest_singular_value: smin,
    })?;
    let alpha = norm2(&x).max(norm2(&xi)).max(1.0);
    Ok((x, xi, alpha))
}

fn ensure_in_disc(p: &SpectralProfile, tol: &ToleranceConfig, what: &str) -> Result<()> {
    let rho = p.spectral_radius();
    if rho > 1.0 + tol.tol_spectrum {
        return Err(Error::DomainViolation(format!(
            "{what} has spectral radius {rho} outside the closed unit disc"
        )));
    }
    Ok(())
}

/// Parts of the single-matrix decomposition in local coordinates: the sum
/// of the generalized eigenspaces of the defective eigenvalues (first, when
/// present) followed by one eigenspace per remaining eigenvalue.
fn single_parts(p: &SpectralProfile) -> Result<Vec<Subspace>> {
    let clusters = &p.jordan.clusters;
    let n = p.jordan.dim();
    let defective: Vec<&CMatrix> = clusters
        .iter()
        .filter(|c| c.is_defective())
        .map(|c| &c.basis)
        .collect();
    if clusters.len() == 1 || defective.len() == clusters.len() {
        return Ok(vec![Subspace::whole(n)]);
    }
    let mut parts = Vec::with_capacity(clusters.len());
    if !defective.is_empty() {
        parts.push(Subspace::spanned_by(&CMatrix::hcat(&defective)?)?);
    }
    for c in clusters.iter().filter(|c| !c.is_defective()) {
        parts.push(Subspace::new(c.basis.clone())?);
    }
    Ok(parts)
}

fn finish(
    parts: Vec<Subspace>,
    members: &[&CMatrix],
    deltas: &[Vec<C64>],
    names: &[String],
    tol: &ToleranceConfig,
    splits: usize,
) -> Result<Decomposition> {
    let (assembly, assembly_inverse, alpha) = assemble(&parts, tol)?;
    let mut tags = Vec::with_capacity(parts.len());
    for (i, part) in parts.iter().enumerate() {
        let mut row = Vec::with_capacity(members.len());
        for (k, t) in members.iter().enumerate() {
            let res = invariance_residual(t, part.basis());
            if res > tol.tol_commute * norm2(t) {
                return Err(Error::IllPosedStructure(format!(
                    "part {i} is not invariant under {} (residual {res:e})",
                    names[k]
                )));
            }
            match classify(t, part.basis(), &deltas[k], tol)? {
                Some(tag) => row.push(tag),
                None => {
                    return Err(Error::IllPosedStructure(format!(
                        "{} is neither scalar nor confined to its defective spectrum on part {i}",
                        names[k]
                    )))
                }
            }
        }
        tags.push(row);
    }
    Ok(Decomposition {
        parts,
        assembly,
        assembly_inverse,
        alpha,
        tags,
        splits,
    })
}

/// Decomposition of `C^n` for the one-member family `{T}`.
pub fn decompose_single(
    t: &CMatrix,
    p: &SpectralProfile,
    tol: &ToleranceConfig,
) -> Result<Decomposition> {
    ensure_in_disc(p, tol, "matrix")?;
    let parts = single_parts(p)?;
    let splits = parts.len() - 1;
    finish(parts, &[t], &[p.delta_set.clone()], &["T".to_string()], tol, splits)
}

/// Joint decomposition of a commuting family whose members have spectra
/// in the closed unit disc.
pub fn decompose_family(family: &FamilySpec) -> Result<Decomposition> {
    family.ensure_commuting()?;
    let profiles: Vec<SpectralProfile> = family
        .members()
        .iter()
        .map(|t| profile(t, &family.tol))
        .collect::<Result<_>>()?;
    decompose_with_profiles(family, &profiles)
}

/// [`decompose_family`] with member profiles already computed.
pub fn decompose_with_profiles(
    family: &FamilySpec,
    profiles: &[SpectralProfile],
) -> Result<Decomposition> {
    let tol = &family.tol;
    family.ensure_commuting()?;
    let n = family.dim();
    for (p, name) in profiles.iter().zip(family.names()) {
        ensure_in_disc(p, tol, name)?;
    }
    let deltas: Vec<Vec<C64>> = profiles.iter().map(|p| p.delta_set.clone()).collect();

    let mut parts = vec![Subspace::whole(n)];
    let mut splits = 0;
    loop {
        let mut changed = false;
        for (k, t) in family.members().iter().enumerate() {
            let mut next = Vec::with_capacity(parts.len());
            for part in parts {
                if classify(t, part.basis(), &deltas[k], tol)?.is_some() {
                    next.push(part);
                    continue;
                }
                let local = restrict(t, part.basis());
                let lp = profile(&local, tol)?;
                let pieces = single_parts(&lp)?;
                if pieces.len() < 2 {
                    return Err(Error::IllPosedStructure(format!(
                        "refinement stalled: {} violates the dichotomy on a part of dimension {} that does not split",
                        family.names()[k],
                        part.dim()
                    )));
                }
                splits += pieces.len() - 1;
                changed = true;
                for piece in pieces {
                    next.push(Subspace::spanned_by(&(part.basis() * piece.basis()))?);
                }
            }
            parts = next;
        }
        if !changed {
            break;
        }
        if splits >= n {
            return Err(Error::IllPosedStructure(format!(
                "refinement performed {splits} splits in dimension {n}"
            )));
        }
    }
    let members: Vec<&CMatrix> = family.members().iter().collect();
    finish(parts, &members, &deltas, family.names(), tol, splits)
}

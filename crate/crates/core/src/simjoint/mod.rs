//! Similarities that turn commuting power-bounded families into
//! contractions.
//!
//! A triangular family with spectra in the disc of radius `r < 1` becomes
//! contractive under the diagonal scaling `diag(1, 1/eps, ..., 1/eps^(n-1))`
//! for `eps = (1 - r) / (n^2 K)`. The joint construction decomposes the
//! space, scales each part where some member is not scalar, and glues the
//! pieces with the assembly map of the decomposition.

mod triangular;
mod uniform;

pub use triangular::common_triangularize;
pub use uniform::{uniform_family_report, UniformFamilyReport};

use serde::{Deserialize, Serialize};

use crate::decomp::{decompose_with_profiles, Tag};
use crate::error::{Error, Result};
use crate::family::FamilySpec;
use crate::matcore::{direct_sum, norm2, restrict, schur, CMatrix, ToleranceConfig};
use crate::spectra::{profile, SpectralProfile};
use triangular::triangularize;

/// Smallest `K` admitted by the scaling construction, which needs `K > 1`.
pub const MIN_K: f64 = 1.0 + 1e-6;

/// Bisection steps used to enlarge the scaling parameter past the
/// guaranteed value.
const RELAX_STEPS: usize = 40;

#[derive(Debug, Clone)]
pub struct TriangularForm {
    /// Unitary with `U T_k U*` upper triangular.
    pub u: CMatrix,
    /// `U T_k U*` with the strict lower triangle set to zero.
    pub triangulars: Vec<CMatrix>,
}

impl TriangularForm {
    pub fn dim(&self) -> usize {
        self.u.rows()
    }
}

#[derive(Debug, Clone)]
pub struct ScalingPlan {
    pub epsilon: f64,
    /// `diag(1, 1/eps, ..., 1/eps^(n-1))`.
    pub x: CMatrix,
    pub k: f64,
    pub r: f64,
}

impl ScalingPlan {
    /// The plan with `eps = (1 - r) / (n^2 K)`.
    pub fn new(n: usize, k: f64, r: f64) -> Result<Self> {
        check_domain(k, r)?;
        let k = k.max(MIN_K);
        let epsilon = (1.0 - r) / ((n * n) as f64 * k);
        Ok(Self::with_epsilon(n, epsilon, k, r))
    }

    fn with_epsilon(n: usize, epsilon: f64, k: f64, r: f64) -> Self {
        let diag: Vec<f64> = (0..n).map(|j| epsilon.powi(-(j as i32))).collect();
        ScalingPlan {
            epsilon,
            x: CMatrix::from_real_diag(&diag),
            k,
            r,
        }
    }

    pub fn dim(&self) -> usize {
        self.x.rows()
    }

    /// `X A X^-1` for an upper triangular `A`, computed entrywise.
    pub fn conjugate(&self, a: &CMatrix) -> CMatrix {
        scale_upper(a, self.epsilon)
    }

    /// `sqrt(||X^-1|| / ||X||) X U`, so that `||Y|| = ||Y^-1||`, together
    /// with its inverse.
    pub fn similarity(&self, u: &CMatrix) -> (CMatrix, CMatrix) {
        let n = self.dim();
        let (nx, nxi) = diag_norms(self.epsilon, n);
        let c = (nxi / nx).sqrt();
        let y = (&self.x * u).scale_real(c);
        let inv_diag: Vec<f64> = (0..n).map(|j| self.epsilon.powi(j as i32)).collect();
        let y_inv = (&u.adjoint() * &CMatrix::from_real_diag(&inv_diag)).scale_real(1.0 / c);
        (y, y_inv)
    }
}

/// `(||X||, ||X^-1||)` for `X = diag(eps^-j)`.
fn diag_norms(epsilon: f64, n: usize) -> (f64, f64) {
    let powers = (0..n).map(|j| epsilon.powi(-(j as i32)));
    let nx = powers.clone().fold(0.0, f64::max);
    let nxi = powers.map(|p| 1.0 / p).fold(0.0, f64::max);
    (nx, nxi)
}

fn scale_upper(a: &CMatrix, epsilon: f64) -> CMatrix {
    let mut out = a.clone();
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            out[(i, j)] *= epsilon.powi(j as i32 - i as i32);
        }
    }
    out
}

fn check_domain(k: f64, r: f64) -> Result<()> {
    if !(r.is_finite() && (0.0..1.0).contains(&r)) {
        return Err(Error::DomainViolation(format!(
            "spectral radius bound must lie in [0, 1), got {r}"
        )));
    }
    if !(k.is_finite() && k > 0.0) {
        return Err(Error::DomainViolation(format!("norm bound must be positive, got {k}")));
    }
    Ok(())
}

/// `(n^2 K / (1 - r))^((n - 1) / 2)`.
pub fn contraction_bound(n: usize, k: f64, r: f64) -> f64 {
    ((n * n) as f64 * k / (1.0 - r)).powf((n as f64 - 1.0) / 2.0)
}

/// Scaling similarity with the guaranteed parameter
/// `eps = (1 - r) / (n^2 K)`; returns `Y` and the bound on `||Y||`.
pub fn scaled_contraction(tri: &TriangularForm, k: f64, r: f64) -> Result<(CMatrix, f64)> {
    let n = tri.dim();
    let plan = ScalingPlan::new(n, k, r)?;
    let (y, _) = plan.similarity(&tri.u);
    Ok((y, contraction_bound(n, plan.k, r)))
}

/// Largest scaling parameter found between the guaranteed value and 1 for
/// which every scaled triangular member is still a contraction.
///
/// The guaranteed parameter makes `||Y|| ||Y^-1|| = eps^-(n-1)` grow very
/// fast; any larger `eps` that keeps the scaled members contractive gives a
/// better conditioned similarity that still satisfies the same bound.
pub fn relaxed_scaling(tri: &TriangularForm, k: f64, r: f64) -> Result<ScalingPlan> {
    let n = tri.dim();
    let base = ScalingPlan::new(n, k, r)?;
    let contractive = |eps: f64| {
        tri.triangulars
            .iter()
            .all(|t| norm2(&scale_upper(t, eps)) <= 1.0)
    };
    if n <= 1 || !contractive(base.epsilon) {
        return Ok(base);
    }
    if contractive(1.0) {
        return Ok(ScalingPlan::with_epsilon(n, 1.0, base.k, r));
    }
    // bisection on log(eps) between a contractive and a failing value
    let (mut lo, mut hi) = (base.epsilon.ln(), 0.0_f64);
    for _ in 0..RELAX_STEPS {
        let mid = 0.5 * (lo + hi);
        if contractive(mid.exp()) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(ScalingPlan::with_epsilon(n, lo.exp(), base.k, r))
}

/// Similarity for one part of a decomposition.
#[derive(Debug, Clone)]
pub struct BlockSimilarity {
    pub y: CMatrix,
    pub y_inverse: CMatrix,
    /// `(d^2 K / (1 - r))^((d - 1) / 2)` for the block dimension `d`.
    pub bound: f64,
    /// Scaling parameter used; absent when every member is scalar.
    pub epsilon: Option<f64>,
}

/// Makes every member contractive on one part: scalar members are left
/// alone, the others are triangularized together and scaled.
pub fn similarize_block(
    members: &[CMatrix],
    tags: &[Tag],
    k: f64,
    r: f64,
    tol: &ToleranceConfig,
) -> Result<BlockSimilarity> {
    check_domain(k, r)?;
    let Some(first) = members.first() else {
        return Err(Error::InvalidInput("no members on the block".into()));
    };
    if tags.len() != members.len() {
        return Err(Error::InvalidInput(format!(
            "{} tags for {} members",
            tags.len(),
            members.len()
        )));
    }
    let d = first.rows();
    let k = k.max(MIN_K);
    let bound = contraction_bound(d, k, r);
    let mut active = Vec::new();
    for (i, (m, tag)) in members.iter().zip(tags).enumerate() {
        match *tag {
            Tag::Scalar(z) => {
                let res = norm2(&m.shift(z));
                if res > tol.tol_commute * norm2(m) * (d as f64).sqrt() {
                    return Err(Error::InvalidInput(format!(
                        "member {i} is tagged scalar but differs from {z} I by {res:e}"
                    )));
                }
                if z.norm() > 1.0 + tol.tol_spectrum {
                    return Err(Error::DomainViolation(format!(
                        "member {i} is the scalar {z} outside the closed unit disc"
                    )));
                }
            }
            Tag::DeltaSpectrum => {
                let rho = schur(m)?.eigenvalues().iter().map(|z| z.norm()).fold(0.0, f64::max);
                if rho > r + tol.cluster_radius(norm2(m)) {
                    return Err(Error::InvalidInput(format!(
                        "member {i} has spectral radius {rho} above the bound {r}"
                    )));
                }
                active.push(m.clone());
            }
        }
    }
    if active.is_empty() {
        return Ok(BlockSimilarity {
            y: CMatrix::identity(d),
            y_inverse: CMatrix::identity(d),
            bound,
            epsilon: None,
        });
    }
    let tri = triangularize(&active, tol)?;
    let plan = relaxed_scaling(&tri, k, r)?;
    let (y, y_inverse) = plan.similarity(&tri.u);
    Ok(BlockSimilarity {
        y,
        y_inverse,
        bound,
        epsilon: Some(plan.epsilon),
    })
}

/// A similarity `Y` with the data needed to re-check it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SimilarityCertificate {
    pub names: Vec<String>,
    pub y: CMatrix,
    pub y_inverse: CMatrix,
    pub norm_y: f64,
    pub norm_y_inverse: f64,
    /// `alpha (n^2 K / (1 - r))^((n - 1) / 2)`.
    pub bound: f64,
    /// Norm bound used in the scaling; `max ||T||` unless clamped.
    pub k: f64,
    /// Whether `max ||T||` was raised to [`MIN_K`].
    pub k_clamped: bool,
    /// Largest modulus of a defective eigenvalue over the family.
    pub r: f64,
    pub alpha: f64,
    /// `||Y T Y^-1||` per member, in family order.
    pub conjugated_norms: Vec<f64>,
    pub part_dims: Vec<usize>,
    /// False when some conjugated norm exceeds `1 + tol_contraction`.
    pub verified: bool,
    pub tolerances: ToleranceConfig,
}

impl SimilarityCertificate {
    pub fn dim(&self) -> usize {
        self.y.rows()
    }

    /// Index and value of the largest conjugated norm.
    pub fn worst_member(&self) -> (usize, f64) {
        self.conjugated_norms
            .iter()
            .copied()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap_or((0, 0.0))
    }
}

/// Builds one similarity making every member of a commuting, power-bounded
/// family a contraction.
pub fn joint_similarity(family: &FamilySpec) -> Result<SimilarityCertificate> {
    let tol = family.tol;
    family.ensure_commuting()?;
    let profiles: Vec<SpectralProfile> = family
        .members()
        .iter()
        .map(|t| profile(t, &tol))
        .collect::<Result<_>>()?;
    for (p, name) in profiles.iter().zip(family.names()) {
        if !p.power_bound.is_power_bounded {
            return Err(Error::DomainViolation(format!(
                "{name} is not power bounded ({:?})",
                p.power_bound.reason
            )));
        }
    }
    let dec = decompose_with_profiles(family, &profiles)?;
    let n = family.dim();
    let k_raw = profiles.iter().map(|p| p.norm).fold(0.0, f64::max);
    let k = k_raw.max(MIN_K);
    let r = profiles.iter().map(SpectralProfile::delta_radius).fold(0.0, f64::max);

    let mut blocks = Vec::with_capacity(dec.parts.len());
    let mut block_inverses = Vec::with_capacity(dec.parts.len());
    for (part, tags) in dec.parts.iter().zip(&dec.tags) {
        let local: Vec<CMatrix> = family.members().iter().map(|t| restrict(t, part.basis())).collect();
        let b = similarize_block(&local, tags, k, r, &tol)?;
        blocks.push(b.y);
        block_inverses.push(b.y_inverse);
    }
    let z = &direct_sum(&blocks)? * &dec.assembly;
    let z_inv = &dec.assembly_inverse * &direct_sum(&block_inverses)?;
    let c = (norm2(&z_inv) / norm2(&z)).sqrt();
    let y = z.scale_real(c);
    let y_inverse = z_inv.scale_real(1.0 / c);

    let conjugated_norms: Vec<f64> = family
        .members()
        .iter()
        .map(|t| norm2(&(&(&y * t) * &y_inverse)))
        .collect();
    let verified = conjugated_norms.iter().all(|&v| v <= 1.0 + tol.tol_contraction);
    let cert = SimilarityCertificate {
        names: family.names().to_vec(),
        norm_y: norm2(&y),
        norm_y_inverse: norm2(&y_inverse),
        y,
        y_inverse,
        bound: dec.alpha * contraction_bound(n, k, r),
        k,
        k_clamped: k_raw < MIN_K,
        r,
        alpha: dec.alpha,
        conjugated_norms,
        part_dims: dec.dims(),
        verified,
        tolerances: tol,
    };
    if !verified {
        let (member, norm) = cert.worst_member();
        return Err(Error::VerificationFailure {
            member,
            norm,
            certificate: Box::new(cert),
        });
    }
    Ok(cert)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::{inverse, C64};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn nil(k: f64) -> CMatrix {
        CMatrix::from_real_rows(&[vec![0.0, k], vec![0.0, 0.0]]).unwrap()
    }

    #[test]
    fn worked_two_by_two_instance() {
        let f = FamilySpec::from_matrices(vec![nil(2.0)]).unwrap();
        let tri = common_triangularize(&f).unwrap();
        let (y, bound) = scaled_contraction(&tri, 2.0, 0.5).unwrap();
        let yi = inverse(&y, 1e-12).unwrap();
        assert!((bound - 4.0).abs() < 1e-12);
        assert!((norm2(&y) - 4.0).abs() < 1e-10);
        assert!((norm2(&yi) - 4.0).abs() < 1e-10);
        let conj = &(&y * &nil(2.0)) * &yi;
        assert!((norm2(&conj) - 0.125).abs() < 1e-12);
        let plan = ScalingPlan::new(2, 2.0, 0.5).unwrap();
        assert_eq!(plan.epsilon, 1.0 / 16.0);
    }

    #[test]
    fn scaling_rejects_r_at_least_one() {
        let f = FamilySpec::from_matrices(vec![nil(2.0)]).unwrap();
        let tri = common_triangularize(&f).unwrap();
        assert!(matches!(scaled_contraction(&tri, 2.0, 1.0), Err(Error::DomainViolation(_))));
    }

    #[test]
    fn small_k_is_clamped() {
        let plan = ScalingPlan::new(2, 0.5, 0.0).unwrap();
        assert_eq!(plan.k, MIN_K);
    }

    #[test]
    fn relaxed_scaling_stays_contractive_and_above_base() {
        let f = FamilySpec::from_matrices(vec![nil(3.0)]).unwrap();
        let tri = common_triangularize(&f).unwrap();
        let base = ScalingPlan::new(2, 3.0, 0.0).unwrap();
        let plan = relaxed_scaling(&tri, 3.0, 0.0).unwrap();
        assert!(plan.epsilon >= base.epsilon);
        assert!(norm2(&plan.conjugate(&tri.triangulars[0])) <= 1.0);
        assert!((plan.epsilon - 1.0 / 3.0).abs() < 1e-9);
    }

    #[test]
    fn block_of_scalars_is_identity() {
        let m = vec![CMatrix::scalar(c(0.5, 0.0), 2), CMatrix::scalar(c(0.0, -1.0), 2)];
        let tags = vec![Tag::Scalar(c(0.5, 0.0)), Tag::Scalar(c(0.0, -1.0))];
        let tol = ToleranceConfig::for_dimension(2);
        let b = similarize_block(&m, &tags, 1.0, 0.0, &tol).unwrap();
        assert_eq!(b.y, CMatrix::identity(2));
        assert!(b.epsilon.is_none());
        assert!((b.bound - contraction_bound(2, MIN_K, 0.0)).abs() < 1e-12);
    }

    #[test]
    fn mixed_block_keeps_scalar_member() {
        let s = CMatrix::scalar(c(0.9, 0.0), 2);
        let j = CMatrix::jordan_block(c(0.0, 0.0), 2).scale_real(3.0);
        let tags = vec![Tag::Scalar(c(0.9, 0.0)), Tag::DeltaSpectrum];
        let tol = ToleranceConfig::for_dimension(2);
        let b = similarize_block(&[s.clone(), j.clone()], &tags, 3.0, 0.0, &tol).unwrap();
        let cs = &(&b.y * &s) * &b.y_inverse;
        let cj = &(&b.y * &j) * &b.y_inverse;
        assert!((&cs - &s).max_abs() < 1e-12);
        assert!(norm2(&cj) <= 1.0 + 1e-12);
        assert!(norm2(&b.y) <= b.bound);
    }

    #[test]
    fn block_rejects_wrong_tag() {
        let j = CMatrix::jordan_block(c(0.0, 0.0), 2);
        let tol = ToleranceConfig::for_dimension(2);
        assert!(matches!(
            similarize_block(&[j], &[Tag::Scalar(c(0.0, 0.0))], 1.0, 0.0, &tol),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn single_nilpotent_family() {
        let f = FamilySpec::from_matrices(vec![nil(2.0)]).unwrap();
        let cert = joint_similarity(&f).unwrap();
        let s = 2f64.sqrt();
        assert!((cert.norm_y - s).abs() < 1e-12);
        assert!((cert.norm_y_inverse - s).abs() < 1e-12);
        assert!(cert.conjugated_norms[0] <= 1.0 + 1e-12);
        assert!(cert.norm_y <= cert.bound);
        // Y is diag(2^-1/2, 2^1/2) up to a unimodular factor
        let y = &cert.y;
        assert!(y[(0, 1)].norm() < 1e-12 && y[(1, 0)].norm() < 1e-12);
        assert!((y[(0, 0)].norm() - 1.0 / s).abs() < 1e-12);
        assert!((y[(1, 1)].norm() - s).abs() < 1e-12);
    }

    #[test]
    fn commuting_unitaries_need_no_scaling() {
        let f = FamilySpec::from_matrices(vec![
            CMatrix::from_diag(&[c(1.0, 0.0), c(0.0, 1.0)]),
            CMatrix::from_diag(&[c(-1.0, 0.0), C64::from_polar(1.0, 0.3)]),
        ])
        .unwrap();
        let cert = joint_similarity(&f).unwrap();
        for v in &cert.conjugated_norms {
            assert!((v - 1.0).abs() < 1e-12);
        }
        assert!((cert.norm_y - 1.0).abs() < 1e-12);
        assert!(cert.k_clamped);
    }

    #[test]
    fn unbounded_family_needs_large_condition_number() {
        for m in [2, 5, 10] {
            let f = FamilySpec::from_matrices((1..=m).map(|k| nil(k as f64)).collect()).unwrap();
            let cert = joint_similarity(&f).unwrap();
            assert!(cert.norm_y * cert.norm_y_inverse >= m as f64 * (1.0 - 1e-8));
            assert!(cert.conjugated_norms.iter().all(|&v| v <= 1.0 + 1e-8));
        }
    }

    #[test]
    fn non_commuting_pair_is_refused() {
        let f = FamilySpec::from_matrices(vec![nil(2.0), nil(2.0).adjoint()]).unwrap();
        match joint_similarity(&f) {
            Err(Error::CommutativityViolation { residual, .. }) => assert!((residual - 0.8).abs() < 1e-12),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn tiny_perturbation_follows_threshold() {
        let t = nil(0.5);
        let mut e = CMatrix::zeros(2, 2);
        e[(1, 0)] = c(1e-12, 0.0);
        let f = FamilySpec::from_matrices(vec![t.clone(), &t + &e]).unwrap();
        let (_, _, res) = f.worst_commutator().unwrap().unwrap();
        assert!(res < f.tol.tol_commute);
        assert!(f.ensure_commuting().is_ok());
    }

    #[test]
    fn boundary_jordan_block_is_not_power_bounded() {
        let f = FamilySpec::from_matrices(vec![CMatrix::jordan_block(c(1.0, 0.0), 2)]).unwrap();
        assert!(matches!(joint_similarity(&f), Err(Error::DomainViolation(_))));
    }
}

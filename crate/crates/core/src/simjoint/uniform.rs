//! Diagnostics for the uniform Jordan property of a family.

use serde::{Deserialize, Serialize};

use crate::family::FamilySpec;
use crate::spectra::SpectralProfile;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UniformFamilyReport {
    /// Largest certified power-bound constant; absent when some member is
    /// not certified.
    pub uniform_k: Option<f64>,
    /// Smallest `delta(T)` over members with defective spectrum.
    pub delta_infimum: Option<f64>,
    /// Largest modulus of a defective eigenvalue over the family.
    pub delta_radius: f64,
    pub has_uniform_jordan: bool,
    /// Worst `p |lambda|^(p-1) / (K theta)` over the sampled exponents, with
    /// `theta = 1 / delta_infimum`; present when both uniformity
    /// hypotheses hold.
    pub chain_ratio: Option<f64>,
    /// False when the hypotheses hold but `delta_radius >= 1` or the chain
    /// inequality fails.
    pub consistent: bool,
}

/// Summarizes uniform power-boundedness and the uniform Jordan property.
/// The chain `p |lambda|^(p-1) <= K theta` is sampled for `1 <= p <= p_max`.
pub fn uniform_family_report(
    family: &FamilySpec,
    profiles: &[SpectralProfile],
    p_max: u32,
) -> UniformFamilyReport {
    let uniform_k = profiles
        .iter()
        .map(|p| p.power_bound.constant_k)
        .try_fold(0.0_f64, |acc, k| k.map(|k| acc.max(k)));
    let delta_infimum = profiles
        .iter()
        .filter_map(|p| p.delta_value)
        .min_by(f64::total_cmp);
    let delta_radius = profiles
        .iter()
        .map(SpectralProfile::delta_radius)
        .fold(0.0, f64::max);
    let norm = profiles.iter().map(|p| p.norm).fold(0.0, f64::max);
    let threshold = family.tol.tol_rank * (1.0 + norm);
    let has_uniform_jordan = delta_infimum.is_some_and(|d| d > threshold);

    let mut chain_ratio = None;
    let mut consistent = true;
    if let (Some(k), true, Some(inf)) = (uniform_k, has_uniform_jordan, delta_infimum) {
        let theta = 1.0 / inf;
        let worst = profiles
            .iter()
            .flat_map(|p| p.delta_set.iter())
            .flat_map(|z| {
                let m = z.norm();
                (1..=p_max).map(move |p| p as f64 * m.powi(p as i32 - 1))
            })
            .fold(0.0, f64::max)
            / (k * theta);
        chain_ratio = Some(worst);
        consistent = delta_radius < 1.0 && worst <= 1.0 + 1e-8;
    }
    UniformFamilyReport {
        uniform_k,
        delta_infimum,
        delta_radius,
        has_uniform_jordan,
        chain_ratio,
        consistent,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::{CMatrix, C64};
    use crate::spectra::profile;

    fn report(members: Vec<CMatrix>) -> UniformFamilyReport {
        let f = FamilySpec::from_matrices(members).unwrap();
        let profiles: Vec<_> = f.members().iter().map(|t| profile(t, &f.tol).unwrap()).collect();
        uniform_family_report(&f, &profiles, 1000)
    }

    #[test]
    fn diagonal_contractions_are_trivial() {
        let r = report(vec![
            CMatrix::from_real_diag(&[0.5, -0.2]),
            CMatrix::from_real_diag(&[0.1, 0.9]),
        ]);
        assert_eq!(r.delta_radius, 0.0);
        assert!(r.delta_infimum.is_none());
        assert!(!r.has_uniform_jordan);
        assert!(r.consistent);
        assert!((r.uniform_k.unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn jordan_blocks_at_three_points() {
        let r = report(
            [0.0, 0.3, 0.6]
                .iter()
                .map(|&l| CMatrix::jordan_block(C64::new(l, 0.0), 2))
                .collect(),
        );
        assert!((r.delta_infimum.unwrap() - 1.0).abs() < 1e-10);
        assert!((r.delta_radius - 0.6).abs() < 1e-12);
        assert!(r.has_uniform_jordan && r.consistent);
        assert!(r.chain_ratio.unwrap() <= 1.0);
    }

    #[test]
    fn single_block_near_boundary() {
        let r = report(vec![CMatrix::jordan_block(C64::new(0.9, 0.0), 2)]);
        assert!((r.delta_radius - 0.9).abs() < 1e-12);
        assert!(r.consistent, "{r:?}");
    }
}

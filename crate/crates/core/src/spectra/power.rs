//! Power-boundedness certificates built from the Jordan structure.

use serde::{Deserialize, Serialize};

use super::{JordanStructure, SpectralProfile};
use crate::error::{Error, Result};
use crate::matcore::{norm2, CMatrix, ToleranceConfig};

/// Largest exponent scanned exhaustively when bounding a Jordan block's
/// powers; beyond it each binomial term is bounded by its own maximum.
const EXHAUSTIVE_SCAN_LIMIT: u64 = 2_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PowerBoundReason {
    SpectrumExceedsDisc,
    BoundaryJordanBlock,
    Certified,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerBoundCertificate {
    pub is_power_bounded: bool,
    /// Upper bound on `sup_p ||T^p||`; present only when certified.
    pub constant_k: Option<f64>,
    pub reason: PowerBoundReason,
}

/// Outcome of sampling the power-bound inequalities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerCheckReport {
    pub passed: bool,
    /// Largest `lhs / rhs` seen over all sampled inequalities.
    pub worst_ratio: f64,
    pub worst_p: u32,
    /// True when the defective spectrum is empty, so only `||T^p|| <= K`
    /// was checked.
    pub vacuous: bool,
}

/// `sup_{p >= 0} sum_{j < r} C(p, j) |lambda|^(p - j)`, an upper bound for
/// `sup_p ||J_r(lambda)^p||`. Requires `|lambda| < 1` when `r >= 2`.
pub fn block_power_supremum(modulus: f64, size: usize) -> f64 {
    if size <= 1 {
        return 1.0_f64.max(modulus);
    }
    if modulus == 0.0 {
        return 1.0;
    }
    debug_assert!(modulus < 1.0);
    let r = size as u64;
    // past this exponent every term is non-increasing in p
    let tail = ((r - 1) as f64 / (1.0 - modulus)).ceil();
    if tail <= EXHAUSTIVE_SCAN_LIMIT as f64 {
        let mut best: f64 = 1.0;
        for p in 0..=tail as u64 {
            best = best.max(binomial_sum(modulus, r, p));
        }
        best
    } else {
        (0..r)
            .map(|j| {
                let peak = (j as f64 / (1.0 - modulus)).floor().max(j as f64);
                [peak - 1.0, peak, peak + 1.0]
                    .into_iter()
                    .filter(|&p| p >= j as f64)
                    .map(|p| term(modulus, j, p))
                    .fold(0.0, f64::max)
            })
            .sum()
    }
}

fn term(modulus: f64, j: u64, p: f64) -> f64 {
    let mut log_c = 0.0;
    for i in 0..j {
        log_c += ((p - i as f64) / (i + 1) as f64).ln();
    }
    (log_c + (p - j as f64) * modulus.ln()).exp()
}

fn binomial_sum(modulus: f64, r: u64, p: u64) -> f64 {
    let mut total = 0.0;
    let mut c = 1.0;
    for j in 0..r.min(p + 1) {
        if j > 0 {
            c *= (p - j + 1) as f64 / j as f64;
        }
        total += c * modulus.powi((p - j) as i32);
    }
    total
}

/// Certifies power-boundedness from the Jordan data.
///
/// Certified iff every eigenvalue has modulus at most `1 + tol_spectrum` and
/// every eigenvalue with a block of size at least two has modulus below
/// `1 - tol_spectrum`. The constant is
/// `max(cond(X) * max_block sup_p ||J_r(lambda)^p||, max_{p <= 2n} ||T^p||)`.
pub fn power_bound_certificate(
    t: &CMatrix,
    js: &JordanStructure,
    tol: &ToleranceConfig,
) -> PowerBoundCertificate {
    let rejected = |reason| PowerBoundCertificate {
        is_power_bounded: false,
        constant_k: None,
        reason,
    };
    if js.blocks.iter().any(|b| b.eigenvalue.norm() > 1.0 + tol.tol_spectrum) {
        return rejected(PowerBoundReason::SpectrumExceedsDisc);
    }
    if js
        .blocks
        .iter()
        .any(|b| b.size >= 2 && b.eigenvalue.norm() >= 1.0 - tol.tol_spectrum)
    {
        return rejected(PowerBoundReason::BoundaryJordanBlock);
    }
    let block_sup = js
        .blocks
        .iter()
        .map(|b| {
            if b.size == 1 {
                1.0
            } else {
                block_power_supremum(b.eigenvalue.norm(), b.size)
            }
        })
        .fold(1.0, f64::max);
    let mut observed: f64 = 1.0;
    let mut power = t.clone();
    for _ in 0..2 * t.rows() {
        observed = observed.max(norm2(&power));
        power = &power * t;
    }
    PowerBoundCertificate {
        is_power_bounded: true,
        constant_k: Some((js.transform_cond * block_sup).max(observed)),
        reason: PowerBoundReason::Certified,
    }
}

/// Samples `p |lambda|^(p-1) <= K / delta(T)` over the defective spectrum and
/// `||T^p|| <= K` for `1 <= p <= p_max`, each with relative slack `1e-8`.
pub fn verify_power_bound_inequality(
    t: &CMatrix,
    profile: &SpectralProfile,
    p_max: u32,
) -> Result<PowerCheckReport> {
    let Some(k) = profile.power_bound.constant_k else {
        return Err(Error::DomainViolation(format!(
            "matrix is not certified power bounded ({:?})",
            profile.power_bound.reason
        )));
    };
    if p_max == 0 {
        return Err(Error::InvalidInput("p_max must be positive".into()));
    }
    const SLACK: f64 = 1.0 + 1e-8;
    let mut worst = (0.0_f64, 0_u32);
    let mut note = |ratio: f64, p: u32| {
        if ratio > worst.0 {
            worst = (ratio, p);
        }
    };
    let vacuous = profile.delta_set.is_empty();
    if let Some(delta) = profile.delta_value {
        let rhs = k / delta;
        for lambda in &profile.delta_set {
            let m = lambda.norm();
            for p in 1..=p_max {
                note(p as f64 * m.powi(p as i32 - 1) / rhs, p);
            }
        }
    }
    let mut power = t.clone();
    for p in 1..=p_max {
        note(norm2(&power) / k, p);
        power = &power * t;
    }
    Ok(PowerCheckReport {
        passed: worst.0 <= SLACK,
        worst_ratio: worst.0,
        worst_p: worst.1,
        vacuous,
    })
}

//! Eigenstructure analysis: clustered spectra, generalized kernels, Jordan
//! structure, the defective part of the spectrum and power-boundedness
//! certificates.

mod jordan;
mod power;

pub use jordan::{jordan_structure, JordanBlock, JordanCluster, JordanStructure};
pub(crate) use jordan::cmp_complex;
pub use power::{
    block_power_supremum, power_bound_certificate, verify_power_bound_inequality,
    PowerBoundCertificate, PowerBoundReason, PowerCheckReport,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matcore::{
    invariance_residual, norm2, null_space, orthonormalize, restrict, schur, svd, CMatrix,
    ToleranceConfig, C64,
};

/// A group of computed eigenvalues treated as one eigenvalue.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenCluster {
    /// Mean of the members.
    pub value: C64,
    pub algebraic_multiplicity: usize,
    pub members: Vec<C64>,
}

/// Everything the similarity pipeline needs to know about one matrix.
#[derive(Debug, Clone)]
pub struct SpectralProfile {
    pub spectrum: Vec<EigenCluster>,
    /// Eigenvalues owning a Jordan block of size at least two.
    pub delta_set: Vec<C64>,
    /// Smallest norm of `(T - lambda I)` on `ker (T - lambda I)^2` over the
    /// defective eigenvalues; absent when there are none.
    pub delta_value: Option<f64>,
    pub jordan: JordanStructure,
    pub power_bound: PowerBoundCertificate,
    pub norm: f64,
}

impl SpectralProfile {
    pub fn spectral_radius(&self) -> f64 {
        self.spectrum.iter().map(|c| c.value.norm()).fold(0.0, f64::max)
    }

    /// Largest modulus in the defective spectrum; 0 when it is empty.
    pub fn delta_radius(&self) -> f64 {
        self.delta_set.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// Full profile: Jordan structure, defective spectrum, `delta` and the
/// power-bound certificate.
pub fn profile(t: &CMatrix, tol: &ToleranceConfig) -> Result<SpectralProfile> {
    let jordan = jordan_structure(t, tol)?;
    let delta = delta_set(&jordan);
    let dv = delta_value(t, &jordan, tol);
    let power_bound = power_bound_certificate(t, &jordan, tol);
    Ok(SpectralProfile {
        spectrum: jordan.spectrum(),
        delta_set: delta,
        delta_value: dv,
        power_bound,
        norm: norm2(t),
        jordan,
    })
}

/// Single-linkage grouping of `values` at `radius`, ordered by the mean of
/// each group (real part, then imaginary part).
pub(crate) fn cluster_indices(values: &[C64], radius: f64) -> Vec<Vec<usize>> {
    let n = values.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    for i in 0..n {
        for j in i + 1..n {
            if (values[i] - values[j]).norm() <= radius {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[b.max(a)] = a.min(b);
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut root_of_group: Vec<usize> = Vec::new();
    for i in 0..n {
        let r = find(&mut parent, i);
        match root_of_group.iter().position(|&x| x == r) {
            Some(g) => groups[g].push(i),
            None => {
                root_of_group.push(r);
                groups.push(vec![i]);
            }
        }
    }
    let mean = |g: &Vec<usize>| g.iter().map(|&i| values[i]).sum::<C64>() / g.len() as f64;
    groups.sort_by(|a, b| cmp_complex(mean(a), mean(b)));
    groups
}

/// Eigenvalues from the complex Schur form, merged by single linkage at the
/// cluster radius `tol_cluster * (1 + ||T||)`.
pub fn eigen_clusters(t: &CMatrix, tol: &ToleranceConfig) -> Result<Vec<EigenCluster>> {
    t.ensure_square()?;
    let radius = tol.cluster_radius(norm2(t));
    let eig = schur(t)?.eigenvalues();
    Ok(cluster_indices(&eig, radius)
        .into_iter()
        .map(|g| {
            let members: Vec<C64> = g.iter().map(|&i| eig[i]).collect();
            EigenCluster {
                value: members.iter().sum::<C64>() / members.len() as f64,
                algebraic_multiplicity: members.len(),
                members,
            }
        })
        .collect())
}

/// Orthonormal basis of the numerical null space of `(T - lambda I)^k`.
///
/// Singular values at most `tol_rank * max(||(T - lambda I)^k||, ||T||^k)`
/// count as zero; the `||T||^k` floor keeps the decision meaningful when
/// `T` is (nearly) `lambda I`.
pub fn generalized_kernel(
    t: &CMatrix,
    lambda: C64,
    k: u32,
    tol: &ToleranceConfig,
) -> Result<CMatrix> {
    t.ensure_square()?;
    if k == 0 {
        return Err(Error::InvalidInput("kernel power must be positive".into()));
    }
    let p = t.shift(lambda).pow(k);
    let dec = svd(&p)?;
    let scale = dec.largest().max(norm2(t).powi(k as i32));
    null_space(&p, tol.tol_rank * scale)
}

/// Eigenvalues owning a Jordan block of size at least two.
pub fn delta_set(js: &JordanStructure) -> Vec<C64> {
    js.clusters
        .iter()
        .filter(|c| c.is_defective())
        .map(|c| c.value)
        .collect()
}

/// `min over lambda in Delta(T)` of `||(T - lambda I) B||` with `B` an
/// orthonormal basis of `ker (T - lambda I)^2`.
pub fn delta_value(t: &CMatrix, js: &JordanStructure, _tol: &ToleranceConfig) -> Option<f64> {
    js.clusters
        .iter()
        .filter(|c| c.is_defective())
        .map(|c| {
            let b = c.kernel_basis(2);
            norm2(&(&t.shift(c.value) * &b))
        })
        .min_by(f64::total_cmp)
}

/// Whether `lambda` is within `radius` of some element of `set`.
pub(crate) fn near_any(lambda: C64, set: &[C64], radius: f64) -> bool {
    set.iter().any(|z| (z - lambda).norm() <= radius)
}

/// Checks that the defective spectra of `T` on two complementary invariant
/// subspaces `V` and `W` together give the defective spectrum of `T`.
pub fn split_delta_check(
    t: &CMatrix,
    v: &CMatrix,
    w: &CMatrix,
    tol: &ToleranceConfig,
) -> Result<bool> {
    t.ensure_square()?;
    let n = t.rows();
    if v.rows() != n || w.rows() != n || v.cols() + w.cols() != n {
        return Err(Error::InvalidInput(format!(
            "subspace dimensions {} + {} do not add up to {n}",
            v.cols(),
            w.cols()
        )));
    }
    let norm = norm2(t);
    let bv = orthonormalize(v);
    let bw = orthonormalize(w);
    for (name, b) in [("V", &bv), ("W", &bw)] {
        if b.cols() > 0 && invariance_residual(t, b) > tol.tol_commute * norm.max(f64::MIN_POSITIVE) {
            return Err(Error::InvalidInput(format!("{name} is not invariant")));
        }
    }
    let joined = CMatrix::hcat(&[&bv, &bw])?;
    let smin = svd(&joined)?.smallest();
    if smin <= tol.tol_rank {
        return Err(Error::InvalidInput(format!(
            "V and W intersect (smallest singular value {smin:e})"
        )));
    }
    let whole = delta_set(&jordan_structure(t, tol)?);
    let mut parts = Vec::new();
    for b in [&bv, &bw] {
        if b.cols() > 0 {
            parts.extend(delta_set(&jordan_structure(&restrict(t, b), tol)?));
        }
    }
    let radius = tol.cluster_radius(norm);
    Ok(parts.iter().all(|&z| near_any(z, &whole, radius))
        && whole.iter().all(|&z| near_any(z, &parts, radius)))
}

//! Jordan structure from the Schur form.
//!
//! Each eigenvalue cluster is moved to the top of the Schur form, which gives
//! an orthonormal basis of its generalized eigenspace and the triangular
//! restriction `M`. The nilpotent part `M - lambda I` is then reduced by a
//! unitary staircase (repeated null-space deflation), whose level sizes are
//! the Weyr characteristic. Jordan chains are built top-down in staircase
//! coordinates and lifted back.

use serde::{Deserialize, Serialize};

use super::{cluster_indices, EigenCluster};
use crate::error::{Error, Result};
use crate::matcore::{inverse, norm2, schur, svd, CMatrix, ToleranceConfig, C64};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JordanBlock {
    pub eigenvalue: C64,
    pub size: usize,
}

/// Per-cluster data behind the Jordan structure.
#[derive(Debug, Clone)]
pub struct JordanCluster {
    pub value: C64,
    /// Raw Schur eigenvalues merged into this cluster.
    pub members: Vec<C64>,
    /// Orthonormal basis of the generalized eigenspace, ordered so that the
    /// first `nu_1 + ... + nu_k` columns span `ker (T - lambda I)^k`.
    pub basis: CMatrix,
    /// Weyr characteristic `nu_k = dim ker^k - dim ker^(k-1)`.
    pub weyr: Vec<usize>,
    /// Block sizes, descending.
    pub block_sizes: Vec<usize>,
}

impl JordanCluster {
    pub fn multiplicity(&self) -> usize {
        self.basis.cols()
    }

    /// Orthonormal basis of `ker (T - lambda I)^k`.
    pub fn kernel_basis(&self, k: usize) -> CMatrix {
        let d: usize = self.weyr.iter().take(k).sum();
        self.basis.columns_range(0, d)
    }

    pub fn is_defective(&self) -> bool {
        self.weyr.len() >= 2
    }
}

#[derive(Debug, Clone)]
pub struct JordanStructure {
    /// Blocks sorted by eigenvalue, then by size descending.
    pub blocks: Vec<JordanBlock>,
    /// `X` with `X T X^-1` equal to the Jordan matrix.
    pub transform: CMatrix,
    /// `X^-1`; its columns are the Jordan chains, in block order.
    pub chain_basis: CMatrix,
    /// `||X|| ||X^-1||`.
    pub transform_cond: f64,
    pub clusters: Vec<JordanCluster>,
}

impl JordanStructure {
    pub fn dim(&self) -> usize {
        self.blocks.iter().map(|b| b.size).sum()
    }

    /// The block-diagonal Jordan matrix.
    pub fn jordan_matrix(&self) -> CMatrix {
        let n = self.dim();
        let mut j = CMatrix::zeros(n, n);
        let mut off = 0;
        for b in &self.blocks {
            j.set_block(off, off, &CMatrix::jordan_block(b.eigenvalue, b.size));
            off += b.size;
        }
        j
    }

    /// `||X T X^-1 - J||`.
    pub fn conjugation_residual(&self, t: &CMatrix) -> f64 {
        let conj = &(&self.transform * t) * &self.chain_basis;
        norm2(&(&conj - &self.jordan_matrix()))
    }

    pub fn spectrum(&self) -> Vec<EigenCluster> {
        self.clusters
            .iter()
            .map(|c| EigenCluster {
                value: c.value,
                algebraic_multiplicity: c.multiplicity(),
                members: c.members.clone(),
            })
            .collect()
    }
}

/// Computes the Jordan structure of `t`.
///
/// Fails with an ill-posed-structure error when two eigenvalue clusters are
/// within twice the cluster radius of each other, and with a numerical
/// failure when the staircase does not exhaust a generalized eigenspace.
pub fn jordan_structure(t: &CMatrix, tol: &ToleranceConfig) -> Result<JordanStructure> {
    t.ensure_square()?;
    t.ensure_finite()?;
    let n = t.rows();
    let norm = norm2(t);
    let radius = tol.cluster_radius(norm);
    let base = schur(t)?;
    let eig = base.eigenvalues();
    let groups = cluster_indices(&eig, radius);
    check_separation(&eig, &groups, radius)?;

    let rank_thr = tol.tol_rank * norm;
    let mut clusters = Vec::with_capacity(groups.len());
    let mut chains: Vec<(C64, Vec<Vec<C64>>)> = Vec::new();

    for group in &groups {
        let mut form = base.clone();
        let mut select = vec![false; n];
        for &i in group {
            select[i] = true;
        }
        form.reorder(&select);
        let m = group.len();
        let basis = form.q.columns_range(0, m);
        let restricted = form.s.submatrix(0, 0, m, m);
        let lambda = restricted.trace() / m as f64;
        let nil = restricted.shift(lambda);

        let (stair, weyr) = staircase(&nil, rank_thr)?;
        let nil_s = truncate_to_staircase(&(&(&stair.adjoint() * &nil) * &stair), &weyr);
        let local = build_chains(&nil_s, &weyr)?;

        let lift = &basis * &stair;
        let mut block_sizes = Vec::new();
        for chain in local {
            block_sizes.push(chain.len());
            let mut cols: Vec<Vec<C64>> = chain.iter().map(|x| lift.mul_vec(x)).collect();
            normalize_phase(&mut cols);
            chains.push((lambda, cols));
        }
        block_sizes.sort_unstable_by(|a, b| b.cmp(a));
        clusters.push(JordanCluster {
            value: lambda,
            members: group.iter().map(|&i| eig[i]).collect(),
            basis: lift,
            weyr,
            block_sizes,
        });
    }

    // clusters are already sorted by value; order chains within each
    // eigenvalue by size descending (stable)
    chains.sort_by(|(la, ca), (lb, cb)| {
        cmp_complex(*la, *lb).then_with(|| cb.len().cmp(&ca.len()))
    });
    let mut blocks = Vec::with_capacity(chains.len());
    let mut columns = Vec::with_capacity(n);
    for (lambda, cols) in chains {
        blocks.push(JordanBlock {
            eigenvalue: lambda,
            size: cols.len(),
        });
        // chain stored top-down; the Jordan basis runs bottom-up
        columns.extend(cols.into_iter().rev());
    }
    let chain_basis = CMatrix::from_columns(n, &columns);
    let transform = inverse(&chain_basis, 0.0).map_err(|_| Error::NumericalFailure {
        context: "Jordan chain completion (chains are linearly dependent)".into(),
        iterations: 0,
    })?;
    let transform_cond = norm2(&chain_basis) * norm2(&transform);
    Ok(JordanStructure {
        blocks,
        transform,
        chain_basis,
        transform_cond,
        clusters,
    })
}

pub(crate) fn cmp_complex(a: C64, b: C64) -> std::cmp::Ordering {
    a.re.total_cmp(&b.re).then_with(|| a.im.total_cmp(&b.im))
}

fn check_separation(eig: &[C64], groups: &[Vec<usize>], radius: f64) -> Result<()> {
    for (a, ga) in groups.iter().enumerate() {
        for gb in &groups[a + 1..] {
            for &i in ga {
                for &j in gb {
                    let d = (eig[i] - eig[j]).norm();
                    if d <= 2.0 * radius {
                        return Err(Error::IllPosedStructure(format!(
                            "eigenvalues {} and {} are {d:e} apart, within twice the cluster radius {radius:e}",
                            eig[i], eig[j]
                        )));
                    }
                }
            }
        }
    }
    Ok(())
}

/// Unitary staircase reduction of a (numerically) nilpotent matrix.
///
/// Returns `Q` and the level sizes `nu_1 >= nu_2 >= ...` such that the first
/// `nu_1 + ... + nu_k` columns of `Q` span `ker N^k`.
pub(crate) fn staircase(nil: &CMatrix, thr: f64) -> Result<(CMatrix, Vec<usize>)> {
    let m = nil.rows();
    let mut q = CMatrix::identity(m);
    let mut a = nil.clone();
    let mut levels = Vec::new();
    let mut offset = 0;
    let mut iterations = 0;
    while offset < m {
        iterations += 1;
        let rest = m - offset;
        let sub = a.submatrix(offset, offset, rest, rest);
        let dec = svd(&sub)?;
        let rank = dec.rank(thr);
        let nu = rest - rank;
        if nu == 0 {
            return Err(Error::NumericalFailure {
                context: format!(
                    "Jordan chain completion: restricted matrix is not nilpotent at level {} (smallest singular value {:e}, threshold {thr:e})",
                    levels.len() + 1,
                    dec.smallest()
                ),
                iterations,
            });
        }
        if levels.last().is_some_and(|&prev| nu > prev) {
            return Err(Error::NumericalFailure {
                context: "Jordan chain completion: Weyr sequence is not monotone".into(),
                iterations,
            });
        }
        let null = dec.v.columns_range(rank, nu);
        let range = dec.v.columns_range(0, rank);
        let perm = CMatrix::hcat(&[&null, &range])?;
        let mut w = CMatrix::identity(m);
        w.set_block(offset, offset, &perm);
        q = &q * &w;
        a = &(&w.adjoint() * &a) * &w;
        levels.push(nu);
        offset += nu;
    }
    Ok((q, levels))
}

/// Zeroes every entry on or below the block diagonal of the staircase,
/// leaving an exactly nilpotent strictly block-upper-triangular matrix.
fn truncate_to_staircase(a: &CMatrix, weyr: &[usize]) -> CMatrix {
    let level_of = level_map(weyr);
    let mut out = a.clone();
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            if level_of[i] >= level_of[j] {
                out[(i, j)] = C64::new(0.0, 0.0);
            }
        }
    }
    out
}

fn level_map(weyr: &[usize]) -> Vec<usize> {
    weyr.iter()
        .enumerate()
        .flat_map(|(k, &nu)| std::iter::repeat_n(k, nu))
        .collect()
}

/// Jordan chains of a staircase-form nilpotent matrix, each listed top-down
/// (`v, N v, ..., N^(l-1) v`). New chain tops at each level span the
/// orthogonal complement of the images arriving from above.
fn build_chains(nil: &CMatrix, weyr: &[usize]) -> Result<Vec<Vec<Vec<C64>>>> {
    let m = nil.rows();
    let offsets: Vec<usize> = weyr
        .iter()
        .scan(0, |acc, &nu| {
            let o = *acc;
            *acc += nu;
            Some(o)
        })
        .collect();
    let mut chains: Vec<Vec<Vec<C64>>> = Vec::new();
    // indices of chains still descending, with their current vector last
    let mut active: Vec<usize> = Vec::new();

    for k in (0..weyr.len()).rev() {
        let nu = weyr[k];
        let off = offsets[k];
        if active.len() > nu {
            return Err(Error::NumericalFailure {
                context: "Jordan chain completion: too many chains reach a level".into(),
                iterations: k,
            });
        }
        let need = nu - active.len();
        if need > 0 {
            let mut comps = CMatrix::zeros(nu, nu);
            for (c, &idx) in active.iter().enumerate() {
                let v = chains[idx].last().expect("chain is non-empty");
                for i in 0..nu {
                    comps[(i, c)] = v[off + i];
                }
            }
            let dec = svd(&comps)?;
            for c in nu - need..nu {
                let mut top = vec![C64::new(0.0, 0.0); m];
                for i in 0..nu {
                    top[off + i] = dec.u[(i, c)];
                }
                chains.push(vec![top]);
                active.push(chains.len() - 1);
            }
        }
        if k > 0 {
            for &idx in &active {
                let next = nil.mul_vec(chains[idx].last().expect("chain is non-empty"));
                chains[idx].push(next);
            }
        }
    }
    chains.sort_by(|a, b| b.len().cmp(&a.len()));
    Ok(chains)
}

/// Rotates a chain so the largest entry of its top vector is real positive.
fn normalize_phase(chain_top_down: &mut [Vec<C64>]) {
    let top = &chain_top_down[0];
    let (mut best, mut idx) = (0.0, 0);
    for (i, z) in top.iter().enumerate() {
        if z.norm() > best + 1e-12 {
            best = z.norm();
            idx = i;
        }
    }
    if best == 0.0 {
        return;
    }
    let phase = top[idx].conj() / best;
    for v in chain_top_down.iter_mut() {
        for z in v.iter_mut() {
            *z *= phase;
        }
    }
}

//! One-sided Jacobi SVD for complex matrices.

use super::matrix::{CMatrix, C64};

const MAX_SWEEPS: usize = 80;
/// Squared column norms below this, after scaling to unit max entry, are
/// treated as exact zeros; rotations there would run on subnormals.
const NEGLIGIBLE: f64 = 1e-280;

/// Thin SVD `(U, S, V)` with `A = U diag(S) V*`, singular values in no
/// particular order, or `None` if the sweeps do not converge.
pub(crate) fn jacobi_svd(a: &CMatrix) -> Option<(CMatrix, Vec<f64>, CMatrix)> {
    if a.rows() < a.cols() {
        let (u, s, v) = jacobi_svd(&a.adjoint())?;
        return Some((v, s, u));
    }
    let (m, n) = (a.rows(), a.cols());
    let scale = a.max_abs();
    // subnormal input is reported as zero
    if scale < f64::MIN_POSITIVE {
        return Some((CMatrix::identity(m).columns_range(0, n), vec![0.0; n], CMatrix::identity(n)));
    }
    let mut w = a.scale_real(1.0 / scale);
    let mut v = CMatrix::identity(n);
    let tol = f64::EPSILON * m as f64;
    let mut converged = n <= 1;
    for _ in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        converged = true;
        for p in 0..n {
            for q in p + 1..n {
                let (mut alpha, mut beta, mut gamma) = (0.0, 0.0, C64::new(0.0, 0.0));
                for i in 0..m {
                    alpha += w[(i, p)].norm_sqr();
                    beta += w[(i, q)].norm_sqr();
                    gamma += w[(i, p)].conj() * w[(i, q)];
                }
                let g = gamma.norm();
                if alpha < NEGLIGIBLE || beta < NEGLIGIBLE || g <= tol * alpha.sqrt() * beta.sqrt() {
                    continue;
                }
                converged = false;
                // phase on column q makes the inner product real, then a
                // real plane rotation removes it
                let phase = gamma.conj() / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for mat in [&mut w, &mut v] {
                    for i in 0..mat.rows() {
                        let x = mat[(i, p)];
                        let y = mat[(i, q)] * phase;
                        mat[(i, p)] = x * c - y * s;
                        mat[(i, q)] = x * s + y * c;
                    }
                }
            }
        }
    }
    if !converged {
        return None;
    }
    let s: Vec<f64> = (0..n)
        .map(|j| (0..m).map(|i| w[(i, j)].norm_sqr()).sum::<f64>().sqrt())
        .collect();
    let mut s = s;
    let smax = s.iter().copied().fold(0.0, f64::max);
    let mut u = CMatrix::zeros(m, n);
    let mut missing = Vec::new();
    for j in 0..n {
        if s[j] > smax * f64::EPSILON * n as f64 && s[j] > 0.0 {
            for i in 0..m {
                u[(i, j)] = w[(i, j)] / s[j];
            }
        } else {
            missing.push(j);
        }
    }
    complete_columns(&mut u, &missing);
    for x in &mut s {
        *x *= scale;
    }
    Some((u, s, v))
}

/// Fills the listed columns of `u` with unit vectors orthogonal to all
/// other columns, by Gram-Schmidt against the standard basis.
fn complete_columns(u: &mut CMatrix, missing: &[usize]) {
    let m = u.rows();
    let mut filled: Vec<bool> = (0..u.cols()).map(|j| !missing.contains(&j)).collect();
    let mut candidate = 0;
    for &j in missing {
        while candidate < m {
            let mut x = vec![C64::new(0.0, 0.0); m];
            x[candidate] = C64::new(1.0, 0.0);
            candidate += 1;
            // two passes of classical Gram-Schmidt
            for _ in 0..2 {
                for k in (0..u.cols()).filter(|&k| filled[k]) {
                    let dot: C64 = (0..m).map(|i| u[(i, k)].conj() * x[i]).sum();
                    for (i, xi) in x.iter_mut().enumerate() {
                        *xi -= u[(i, k)] * dot;
                    }
                }
            }
            let norm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if norm > 0.5 {
                for (i, xi) in x.iter().enumerate() {
                    u[(i, j)] = xi / norm;
                }
                filled[j] = true;
                break;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{random_matrix, rng};

    fn check(a: &CMatrix) -> Vec<f64> {
        let (u, s, v) = jacobi_svd(a).expect("converges");
        let k = a.rows().min(a.cols());
        assert_eq!(s.len(), k);
        let rebuilt = &(&u * &CMatrix::from_real_diag(&s)) * &v.adjoint();
        assert!((&rebuilt - a).max_abs() < 1e-13 * (1.0 + a.max_abs()) * k as f64);
        assert!((&(&u.adjoint() * &u) - &CMatrix::identity(k)).max_abs() < 1e-12);
        assert!((&(&v.adjoint() * &v) - &CMatrix::identity(k)).max_abs() < 1e-12);
        s
    }

    #[test]
    fn random_square_and_rectangular() {
        let mut r = rng(8);
        for n in 1..9 {
            check(&random_matrix(&mut r, n));
        }
        let a = random_matrix(&mut r, 5);
        check(&a.submatrix(0, 0, 5, 3));
        check(&a.submatrix(0, 0, 2, 5));
    }

    #[test]
    fn rank_deficient_completes_u() {
        let mut s = check(&CMatrix::jordan_block(C64::new(0.0, 0.0), 4));
        s.sort_by(f64::total_cmp);
        assert_eq!(s[0], 0.0);
        assert!(s[1..].iter().all(|&x| (x - 1.0).abs() < 1e-15));
        check(&CMatrix::zeros(3, 3));
    }

    #[test]
    fn block_triangular_norm_is_exact() {
        // nearly block-diagonal input on which bidiagonal QR was observed to
        // lose two digits
        let a = CMatrix::from_rows(&[
            vec![C64::new(0.036233, 0.512364), C64::new(0.0, 0.0), C64::new(0.0, 0.0)],
            vec![C64::new(0.0, 0.0), C64::new(-0.284842, 0.723344), C64::new(0.354657, -0.175353)],
            vec![C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(-0.284842, 0.723344)],
        ])
        .unwrap();
        let s = check(&a);
        let top = s.iter().copied().fold(0.0, f64::max);
        let sub = a.submatrix(1, 1, 2, 2);
        // closed form for [[z, b], [0, z]]
        let (z, b) = (sub[(0, 0)].norm(), sub[(0, 1)].norm());
        let exact = 0.5 * b + (z * z + 0.25 * b * b).sqrt();
        assert!((top - exact).abs() < 1e-14);
    }
}

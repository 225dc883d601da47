//! Complex Schur decomposition: Householder reduction to Hessenberg form
//! followed by single-shift QR sweeps with Wilkinson shifts.

use super::matrix::{CMatrix, C64};

const MAX_SWEEPS_PER_EIGENVALUE: usize = 60;
const EXCEPTIONAL_EVERY: usize = 10;

/// `(Q, S)` with `A = Q S Q*`, or `None` when the iteration does not
/// converge.
pub(crate) fn complex_schur(a: &CMatrix) -> Option<(CMatrix, CMatrix)> {
    let n = a.rows();
    let (mut q, mut h) = hessenberg(a);
    if n <= 1 {
        return Some((q, h));
    }
    let eps = f64::EPSILON;
    let fro = h.frobenius_norm();
    let mut hi = n - 1;
    let mut sweeps = 0;
    let mut total = 0;
    while hi > 0 {
        // locate the start of the unreduced block ending at `hi`
        let mut lo = hi;
        while lo > 0 {
            let sub = h[(lo, lo - 1)].norm();
            let mut scale = h[(lo - 1, lo - 1)].norm() + h[(lo, lo)].norm();
            if scale == 0.0 {
                scale = fro;
            }
            if sub <= eps * scale {
                h[(lo, lo - 1)] = C64::new(0.0, 0.0);
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            hi -= 1;
            sweeps = 0;
            continue;
        }
        sweeps += 1;
        total += 1;
        if sweeps > MAX_SWEEPS_PER_EIGENVALUE || total > MAX_SWEEPS_PER_EIGENVALUE * n {
            return None;
        }
        let mu = if sweeps % EXCEPTIONAL_EVERY == 0 {
            h[(hi, hi)] + C64::new(0.75 * h[(hi, hi - 1)].norm(), 0.0)
        } else {
            wilkinson_shift(h[(hi - 1, hi - 1)], h[(hi - 1, hi)], h[(hi, hi - 1)], h[(hi, hi)])
        };
        qr_sweep(&mut h, &mut q, lo, hi, mu);
    }
    for i in 0..n {
        for j in 0..i {
            h[(i, j)] = C64::new(0.0, 0.0);
        }
    }
    Some((q, h))
}

/// Eigenvalue of `[[a, b], [c, d]]` closer to `d`.
fn wilkinson_shift(a: C64, b: C64, c: C64, d: C64) -> C64 {
    let half = (a - d) * 0.5;
    let disc = (half * half + b * c).sqrt();
    let (l1, l2) = (d + half + disc, d + half - disc);
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// `(c, s)` with `[[c, s], [-conj(s), c]] [x; y] = [r; 0]`, `c` real.
fn givens(x: C64, y: C64) -> (f64, C64) {
    let (ax, ay) = (x.norm(), y.norm());
    if ay == 0.0 {
        return (1.0, C64::new(0.0, 0.0));
    }
    if ax == 0.0 {
        return (0.0, y.conj() / ay);
    }
    let r = ax.hypot(ay);
    (ax / r, (x / ax) * y.conj() / r)
}

fn rotate_rows(h: &mut CMatrix, k: usize, c: f64, s: C64, from: usize) {
    for j in from..h.cols() {
        let (a, b) = (h[(k, j)], h[(k + 1, j)]);
        h[(k, j)] = a * c + s * b;
        h[(k + 1, j)] = -s.conj() * a + b * c;
    }
}

fn rotate_cols(h: &mut CMatrix, k: usize, c: f64, s: C64, to: usize) {
    for i in 0..to {
        let (a, b) = (h[(i, k)], h[(i, k + 1)]);
        h[(i, k)] = a * c + b * s.conj();
        h[(i, k + 1)] = -a * s + b * c;
    }
}

/// One implicit single-shift QR sweep on the active block `lo..=hi`,
/// applied to the whole matrix so the final form is a full Schur form.
fn qr_sweep(h: &mut CMatrix, q: &mut CMatrix, lo: usize, hi: usize, mu: C64) {
    let n = h.rows();
    let mut x = h[(lo, lo)] - mu;
    let mut y = h[(lo + 1, lo)];
    for k in lo..hi {
        if k > lo {
            x = h[(k, k - 1)];
            y = h[(k + 1, k - 1)];
        }
        let (c, s) = givens(x, y);
        rotate_rows(h, k, c, s, if k > lo { k - 1 } else { lo });
        rotate_cols(h, k, c, s, (k + 3).min(hi + 1));
        rotate_cols(q, k, c, s, n);
        if k > lo {
            h[(k + 1, k - 1)] = C64::new(0.0, 0.0);
        }
    }
}

/// Householder reduction `A = Q H Q*` with `H` upper Hessenberg.
fn hessenberg(a: &CMatrix) -> (CMatrix, CMatrix) {
    let n = a.rows();
    let mut h = a.clone();
    let mut q = CMatrix::identity(n);
    for k in 0..n.saturating_sub(2) {
        let x: Vec<C64> = (k + 1..n).map(|i| h[(i, k)]).collect();
        let norm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let phase = if x[0].norm() > 0.0 { x[0] / x[0].norm() } else { C64::new(1.0, 0.0) };
        let mut v = x;
        v[0] += phase * norm;
        let vv: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if vv == 0.0 {
            continue;
        }
        let beta = 2.0 / vv;
        // H <- P H with P = I - beta v v*, acting on rows k+1..n
        for j in 0..n {
            let dot: C64 = v.iter().enumerate().map(|(i, vi)| vi.conj() * h[(k + 1 + i, j)]).sum();
            for (i, vi) in v.iter().enumerate() {
                h[(k + 1 + i, j)] -= vi * dot * beta;
            }
        }
        // H <- H P and Q <- Q P on columns k+1..n
        for m in [&mut h, &mut q] {
            for i in 0..n {
                let dot: C64 = v.iter().enumerate().map(|(j, vj)| m[(i, k + 1 + j)] * vj).sum();
                for (j, vj) in v.iter().enumerate() {
                    m[(i, k + 1 + j)] -= dot * vj.conj() * beta;
                }
            }
        }
        for i in k + 2..n {
            h[(i, k)] = C64::new(0.0, 0.0);
        }
    }
    (q, h)
}

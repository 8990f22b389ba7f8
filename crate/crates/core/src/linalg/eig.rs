//! General complex eigensolver: diagonal balancing, Householder reduction to
//! Hessenberg form, then single-shift QR with Givens rotations.

use super::{vec_norm, CMatrix, Lu, C64, ZERO};
use crate::error::{Error, Result};

const ITERATIONS_PER_EIGENVALUE: usize = 40;

#[derive(Clone, Debug, PartialEq)]
pub struct EigPair {
    pub value: C64,
    /// Unit-norm vector with `‖Av − λv‖ = residual`.
    pub vector: Vec<C64>,
    pub residual: f64,
}

/// Eigenvalues with multiplicity, sorted by real part then imaginary part.
pub fn general_eig(a: &CMatrix) -> Result<Vec<C64>> {
    if !a.is_square() {
        return Err(Error::Dimension(format!(
            "eigenvalues need a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    if !a.is_finite() {
        return Err(Error::Input("matrix has non-finite entries".into()));
    }
    let mut h = a.clone();
    balance(&mut h);
    hessenberg(&mut h);
    let mut values = hessenberg_qr(h)?;
    values.sort_by(|x, y| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)));
    Ok(values)
}

/// Eigenvalues together with eigenvectors from inverse iteration.
pub fn general_eigpairs(a: &CMatrix) -> Result<Vec<EigPair>> {
    let values = general_eig(a)?;
    let n = a.rows();
    let scale = a.max_abs().max(f64::MIN_POSITIVE);
    let floor = f64::EPSILON * scale * n as f64;
    values
        .into_iter()
        .map(|lambda| {
            let shifted = {
                let mut m = a.clone();
                for i in 0..n {
                    m[(i, i)] -= lambda;
                }
                m
            };
            let lu = Lu::factor_perturbed(&shifted, floor)?;
            let mut v: Vec<C64> = (0..n)
                .map(|i| C64::new(1.0 + 0.1 * (i % 7) as f64, 0.05 * (i % 3) as f64))
                .collect();
            for _ in 0..3 {
                v = lu.solve(&v)?;
                let nrm = vec_norm(&v);
                if !nrm.is_finite() || nrm == 0.0 {
                    return Err(Error::Numeric(format!("inverse iteration broke down at λ = {lambda}")));
                }
                v.iter_mut().for_each(|z| *z /= nrm);
            }
            let av = a.matvec(&v)?;
            let residual = vec_norm(&av.iter().zip(&v).map(|(x, y)| x - lambda * y).collect::<Vec<_>>());
            Ok(EigPair {
                value: lambda,
                vector: v,
                residual,
            })
        })
        .collect()
}

/// Diagonal similarity by powers of two to equalize row and column norms.
fn balance(h: &mut CMatrix) {
    let n = h.rows();
    let radix = 2.0f64;
    let mut done = false;
    while !done {
        done = true;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += h[(j, i)].l1_norm();
                    r += h[(i, j)].l1_norm();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut g = r / radix;
            while c < g {
                f *= radix;
                c *= radix * radix;
            }
            g = r * radix;
            while c > g {
                f /= radix;
                c /= radix * radix;
            }
            if (c + r / f) / f < 0.95 * s {
                done = false;
                for j in 0..n {
                    h[(i, j)] /= f;
                    h[(j, i)] *= f;
                }
            }
        }
    }
}

fn hessenberg(h: &mut CMatrix) {
    let n = h.rows();
    for k in 0..n.saturating_sub(2) {
        let m = n - k - 1;
        let tail: f64 = (k + 2..n).map(|i| h[(i, k)].norm_sqr()).sum();
        if tail == 0.0 {
            continue;
        }
        let x0 = h[(k + 1, k)];
        let xnorm = (tail + x0.norm_sqr()).sqrt();
        let unit = if x0.norm() > 0.0 { x0 / x0.norm() } else { C64::new(1.0, 0.0) };
        let alpha = -unit * xnorm;
        let mut v: Vec<C64> = (k + 1..n).map(|i| h[(i, k)]).collect();
        v[0] -= alpha;
        let vn = vec_norm(&v);
        v.iter_mut().for_each(|z| *z /= vn);

        // Left: rows k+1.. ← (I − 2vv*) rows.
        for col in k..n {
            let s: C64 = (0..m).map(|t| v[t].conj() * h[(k + 1 + t, col)]).sum::<C64>() * 2.0;
            for t in 0..m {
                h[(k + 1 + t, col)] -= v[t] * s;
            }
        }
        // Right: columns k+1.. ← columns (I − 2vv*).
        for row in 0..n {
            let s: C64 = (0..m).map(|t| h[(row, k + 1 + t)] * v[t]).sum::<C64>() * 2.0;
            for t in 0..m {
                h[(row, k + 1 + t)] -= s * v[t].conj();
            }
        }
        h[(k + 1, k)] = alpha;
        for i in k + 2..n {
            h[(i, k)] = ZERO;
        }
    }
}

fn givens(a: C64, b: C64) -> (f64, C64) {
    let an = a.norm();
    let n = an.hypot(b.norm());
    if n == 0.0 {
        return (1.0, ZERO);
    }
    if an == 0.0 {
        return (0.0, b.conj() / b.norm());
    }
    (an / n, (a / an) * b.conj() / n)
}

fn eig2(a: C64, b: C64, c: C64, d: C64) -> (C64, C64) {
    let half = (a - d) * 0.5;
    let disc = (half * half + b * c).sqrt();
    let mid = (a + d) * 0.5;
    let l1 = if (mid + disc).norm() >= (mid - disc).norm() { mid + disc } else { mid - disc };
    let det = a * d - b * c;
    let l2 = if l1.norm() > 0.0 { det / l1 } else { mid - disc };
    (l1, l2)
}

fn hessenberg_qr(mut h: CMatrix) -> Result<Vec<C64>> {
    let n = h.rows();
    let mut values = Vec::with_capacity(n);
    let hnorm = h.max_abs().max(f64::MIN_POSITIVE);
    let mut hi = n;
    let mut its = 0usize;
    let mut total = 0usize;
    while hi > 0 {
        let top = hi - 1;
        if top == 0 {
            values.push(h[(0, 0)]);
            break;
        }
        let mut l = top;
        while l > 0 {
            let mut s = h[(l - 1, l - 1)].norm() + h[(l, l)].norm();
            if s == 0.0 {
                s = hnorm;
            }
            if h[(l, l - 1)].norm() <= f64::EPSILON * s {
                h[(l, l - 1)] = ZERO;
                break;
            }
            l -= 1;
        }
        if l == top {
            values.push(h[(top, top)]);
            hi -= 1;
            its = 0;
            continue;
        }
        if l + 1 == top {
            let (x, y) = eig2(h[(l, l)], h[(l, top)], h[(top, l)], h[(top, top)]);
            values.push(x);
            values.push(y);
            hi -= 2;
            its = 0;
            continue;
        }
        its += 1;
        total += 1;
        if its > ITERATIONS_PER_EIGENVALUE || total > ITERATIONS_PER_EIGENVALUE * n {
            return Err(Error::Numeric(format!(
                "Hessenberg QR did not converge ({} eigenvalues left)",
                hi
            )));
        }
        let mu = if its % 10 == 0 {
            h[(top, top)] + C64::new(1.5, 0.5) * h[(top, top - 1)].norm()
        } else {
            let (x, y) = eig2(h[(top - 1, top - 1)], h[(top - 1, top)], h[(top, top - 1)], h[(top, top)]);
            let d = h[(top, top)];
            if (x - d).norm() <= (y - d).norm() {
                x
            } else {
                y
            }
        };
        qr_step(&mut h, l, top, mu);
    }
    Ok(values)
}

/// One explicit shifted QR step on the unreduced block `lo..=hi`.
fn qr_step(h: &mut CMatrix, lo: usize, hi: usize, mu: C64) {
    for i in lo..=hi {
        h[(i, i)] -= mu;
    }
    let mut rots = Vec::with_capacity(hi - lo);
    for k in lo..hi {
        let (c, s) = givens(h[(k, k)], h[(k + 1, k)]);
        for j in k..=hi {
            let (x, y) = (h[(k, j)], h[(k + 1, j)]);
            h[(k, j)] = x * c + s * y;
            h[(k + 1, j)] = -s.conj() * x + y * c;
        }
        rots.push((c, s));
    }
    for (off, &(c, s)) in rots.iter().enumerate() {
        let k = lo + off;
        for i in lo..=(k + 2).min(hi) {
            let (x, y) = (h[(i, k)], h[(i, k + 1)]);
            h[(i, k)] = x * c + s.conj() * y;
            h[(i, k + 1)] = -s * x + y * c;
        }
    }
    for i in lo..=hi {
        h[(i, i)] += mu;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: C64, b: C64) -> bool {
        (a - b).norm() < 1e-10
    }

    #[test]
    fn rotation_generator() {
        let i = C64::new(0.0, 1.0);
        let z = general_eig(&CMatrix::from_real_rows(&[&[0.0, 1.0], &[-1.0, 0.0]]).unwrap()).unwrap();
        assert!(close(z[0], -i) && close(z[1], i));
    }

    #[test]
    fn larger_nonnormal_matrix() {
        // Upper triangular plus a perturbation: eigenvalues of a companion
        // matrix of (z−1)(z−2)(z−3)(z−4)(z−5).
        let coeffs = [-120.0, 274.0, -225.0, 85.0, -15.0];
        let mut m = CMatrix::zeros(5, 5);
        for i in 0..4 {
            m[(i, i + 1)] = C64::new(1.0, 0.0);
        }
        for j in 0..5 {
            m[(4, j)] = C64::new(-coeffs[j], 0.0);
        }
        let z = general_eig(&m).unwrap();
        for (k, zk) in z.iter().enumerate() {
            assert!((zk - C64::new(k as f64 + 1.0, 0.0)).norm() < 1e-8, "{z:?}");
        }
        for p in general_eigpairs(&m).unwrap() {
            assert!(p.residual < 1e-8 * m.norm2());
        }
    }
}

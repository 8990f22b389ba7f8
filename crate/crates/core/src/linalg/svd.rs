//! One-sided complex Jacobi SVD.

use super::{inner, vec_norm, CMatrix, C64, ZERO};
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 80;

/// Thin SVD `X = U diag(σ) V*` with `σ` descending. Columns of `u` belonging
/// to zero singular values are zero.
#[derive(Clone, Debug)]
pub struct Svd {
    pub u: CMatrix,
    pub singular_values: Vec<f64>,
    pub v: CMatrix,
}

impl Svd {
    pub fn sigma_max(&self) -> f64 {
        self.singular_values.first().copied().unwrap_or(0.0)
    }

    pub fn sigma_min(&self) -> f64 {
        self.singular_values.last().copied().unwrap_or(0.0)
    }

    /// Number of singular values above `tol × σ_max`.
    pub fn rank(&self, tol: f64) -> usize {
        let cut = tol * self.sigma_max();
        self.singular_values.iter().filter(|&&s| s > cut).count()
    }
}

pub fn svd(x: &CMatrix) -> Result<Svd> {
    if x.rows() < x.cols() {
        let t = svd(&x.adjoint())?;
        return Ok(Svd {
            u: t.v,
            singular_values: t.singular_values,
            v: t.u,
        });
    }
    let (m, n) = (x.rows(), x.cols());
    // Column-major working copies.
    let mut w: Vec<Vec<C64>> = (0..n).map(|j| x.column(j)).collect();
    let mut v: Vec<Vec<C64>> = (0..n)
        .map(|j| {
            let mut e = vec![ZERO; n];
            e[j] = C64::new(1.0, 0.0);
            e
        })
        .collect();

    let mut converged = n < 2;
    for _ in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = w[p].iter().map(|z| z.norm_sqr()).sum::<f64>();
                let beta = w[q].iter().map(|z| z.norm_sqr()).sum::<f64>();
                let gamma = inner(&w[p], &w[q]);
                let g = gamma.norm();
                if g == 0.0 || g <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate(&mut w, p, q, c, s, phase);
                rotate(&mut v, p, q, c, s, phase);
            }
        }
        converged = !rotated;
    }
    if !converged {
        return Err(Error::Numeric(format!("Jacobi SVD did not converge in {MAX_SWEEPS} sweeps")));
    }

    let mut sig: Vec<(f64, usize)> = w.iter().enumerate().map(|(j, col)| (vec_norm(col), j)).collect();
    sig.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    let mut u = CMatrix::zeros(m, n);
    let mut vm = CMatrix::zeros(n, n);
    for (k, &(s, j)) in sig.iter().enumerate() {
        if s > 0.0 {
            let col: Vec<C64> = w[j].iter().map(|z| z / s).collect();
            u.set_column(k, &col);
        }
        vm.set_column(k, &v[j]);
    }
    Ok(Svd {
        u,
        singular_values: sig.iter().map(|&(s, _)| s).collect(),
        v: vm,
    })
}

/// `w_p ← c w_p − s e^{−iφ} w_q`, `w_q ← s e^{iφ} w_p + c w_q`.
fn rotate(cols: &mut [Vec<C64>], p: usize, q: usize, c: f64, s: f64, phase: C64) {
    let (left, right) = cols.split_at_mut(q);
    let wp = &mut left[p];
    let wq = &mut right[0];
    let sp = phase.conj() * s;
    let sq = phase * s;
    for (a, b) in wp.iter_mut().zip(wq.iter_mut()) {
        let (x, y) = (*a, *b);
        *a = x * c - sp * y;
        *b = sq * x + y * c;
    }
}

/// Moore–Penrose pseudo-inverse; singular values at or below `tol × σ_max`
/// count as zero.
pub fn pseudo_inverse(x: &CMatrix, tol: f64) -> Result<CMatrix> {
    if !(tol > 0.0) {
        return Err(Error::Precondition(format!("pseudo-inverse tolerance must be positive, got {tol}")));
    }
    let s = svd(x)?;
    let (m, n) = (x.rows(), x.cols());
    let mut out = CMatrix::zeros(n, m);
    let cut = tol * s.sigma_max();
    for (k, &sigma) in s.singular_values.iter().enumerate() {
        if sigma <= cut || sigma == 0.0 {
            continue;
        }
        for i in 0..n {
            let vi = s.v[(i, k)] / sigma;
            for j in 0..m {
                out[(i, j)] += vi * s.u[(j, k)].conj();
            }
        }
    }
    Ok(out)
}

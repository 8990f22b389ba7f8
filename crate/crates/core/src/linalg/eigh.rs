//! Hermitian eigensolver: Householder reduction to tridiagonal form, a
//! diagonal phase similarity to make the tridiagonal real, then implicit QL
//! with Wilkinson-type shifts.

use super::{inner, CMatrix, HermitianMatrix, Interval, C64, ZERO};
use crate::error::{Error, Result};

const MAX_QL_ITERATIONS: usize = 60;
const PHASE_THRESHOLD: f64 = 1e-10;

/// Eigenvalues in ascending order with orthonormal eigenvectors as columns.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: CMatrix,
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvector(&self, j: usize) -> Vec<C64> {
        self.eigenvectors.column(j)
    }

    pub fn indices_in(&self, window: &Interval) -> Vec<usize> {
        (0..self.dim())
            .filter(|&i| window.contains(self.eigenvalues[i]))
            .collect()
    }

    pub fn count_in(&self, window: &Interval) -> usize {
        self.eigenvalues.iter().filter(|&&l| window.contains(l)).count()
    }

    pub fn values_in(&self, window: &Interval) -> Vec<f64> {
        self.eigenvalues
            .iter()
            .copied()
            .filter(|&l| window.contains(l))
            .collect()
    }

    /// Orthonormal basis (as columns) of the eigenvectors with eigenvalue in
    /// `window`.
    pub fn basis_in(&self, window: &Interval) -> CMatrix {
        let cols: Vec<Vec<C64>> = self
            .indices_in(window)
            .into_iter()
            .map(|i| self.eigenvector(i))
            .collect();
        CMatrix::from_columns(self.dim(), &cols).expect("eigenvector length")
    }

    /// `Q f(Λ) Q*` for a real function of the eigenvalues.
    pub fn apply_function(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let n = self.dim();
        let q = &self.eigenvectors;
        let mut out = CMatrix::zeros(n, n);
        for k in 0..n {
            let w = f(self.eigenvalues[k]);
            if w == 0.0 {
                continue;
            }
            for i in 0..n {
                let qi = q[(i, k)] * w;
                if qi == ZERO {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += qi * q[(j, k)].conj();
                }
            }
        }
        out
    }

    pub fn reconstruct(&self) -> CMatrix {
        self.apply_function(|x| x)
    }
}

/// Eigendecomposition of a Hermitian matrix.
///
/// Eigenvalues are ascending; each eigenvector is scaled so that its first
/// component of modulus above `1e-10` is real and positive.
pub fn hermitian_eig(h: &HermitianMatrix) -> Result<SpectralDecomposition> {
    let n = h.dim();
    if n == 0 {
        return Ok(SpectralDecomposition {
            eigenvalues: vec![],
            eigenvectors: CMatrix::zeros(0, 0),
        });
    }
    let (diag, offdiag, q) = tridiagonalize(h.matrix());

    // Phase similarity: T = D R D* with R real symmetric.
    let mut phase = vec![C64::new(1.0, 0.0); n];
    let mut e = vec![0.0; n];
    for i in 0..n - 1 {
        let z = offdiag[i];
        let r = z.norm();
        e[i] = r;
        phase[i + 1] = if r > 0.0 { phase[i] * (z / r) } else { phase[i] };
    }

    let mut d = diag;
    let mut z = vec![0.0; n * n];
    for i in 0..n {
        z[i * n + i] = 1.0;
    }
    tql(&mut d, &mut e, &mut z, n)?;

    // Eigenvectors of H are the columns of Q·D·Z.
    let mut qd = q;
    for i in 0..n {
        for j in 0..n {
            qd[(i, j)] *= phase[j];
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].total_cmp(&d[b]));

    let mut vectors = CMatrix::zeros(n, n);
    for (out_col, &k) in order.iter().enumerate() {
        let mut v = vec![ZERO; n];
        for j in 0..n {
            let zjk = z[j * n + k];
            if zjk == 0.0 {
                continue;
            }
            for (i, vi) in v.iter_mut().enumerate() {
                *vi += qd[(i, j)] * zjk;
            }
        }
        normalize_phase(&mut v);
        vectors.set_column(out_col, &v);
    }
    Ok(SpectralDecomposition {
        eigenvalues: order.iter().map(|&k| d[k]).collect(),
        eigenvectors: vectors,
    })
}

/// `Σ q_i q_i*` over eigenvalues inside `window`.
pub fn spectral_projector(dec: &SpectralDecomposition, window: &Interval) -> CMatrix {
    dec.apply_function(|x| if window.contains(x) { 1.0 } else { 0.0 })
}

fn normalize_phase(v: &mut [C64]) {
    let norm = super::vec_norm(v);
    if norm == 0.0 {
        return;
    }
    let lead = v
        .iter()
        .copied()
        .find(|z| z.norm() > PHASE_THRESHOLD)
        .unwrap_or_else(|| v.iter().copied().max_by(|a, b| a.norm().total_cmp(&b.norm())).unwrap());
    let rot = lead.conj() / (lead.norm() * norm);
    for z in v.iter_mut() {
        *z *= rot;
    }
    // Make the leading entry exactly real.
    if let Some(z) = v.iter_mut().find(|z| z.norm() > PHASE_THRESHOLD) {
        *z = C64::new(z.norm(), 0.0);
    }
}

/// Unitary Q with Q* H Q tridiagonal. Returns (diagonal, subdiagonal, Q).
fn tridiagonalize(h: &CMatrix) -> (Vec<f64>, Vec<C64>, CMatrix) {
    let n = h.rows();
    let mut a = h.clone();
    let mut q = CMatrix::identity(n);
    let mut v = vec![ZERO; n];
    let mut p = vec![ZERO; n];

    for k in 0..n.saturating_sub(2) {
        let m = n - k - 1;
        let x0 = a[(k + 1, k)];
        let xnorm = (k + 1..n).map(|i| a[(i, k)].norm_sqr()).sum::<f64>().sqrt();
        let tail = (k + 2..n).map(|i| a[(i, k)].norm_sqr()).sum::<f64>();
        if tail == 0.0 {
            continue;
        }
        let unit = if x0.norm() > 0.0 { x0 / x0.norm() } else { C64::new(1.0, 0.0) };
        let alpha = -unit * xnorm;
        let v = &mut v[..m];
        for (t, i) in (k + 1..n).enumerate() {
            v[t] = a[(i, k)];
        }
        v[0] -= alpha;
        let vn = super::vec_norm(v);
        if vn == 0.0 {
            continue;
        }
        v.iter_mut().for_each(|z| *z /= vn);

        // Trailing block update T ← T − v q* − q v*, q = 2p − 2(v*p)v.
        let p = &mut p[..m];
        for (r, pr) in p.iter_mut().enumerate() {
            let row = k + 1 + r;
            *pr = (0..m).map(|c| a[(row, k + 1 + c)] * v[c]).sum();
        }
        let beta = inner(v, p).re;
        let qv: Vec<C64> = p.iter().zip(v.iter()).map(|(&pi, &vi)| (pi - vi * beta) * 2.0).collect();
        for r in 0..m {
            for c in 0..m {
                let upd = v[r] * qv[c].conj() + qv[r] * v[c].conj();
                a[(k + 1 + r, k + 1 + c)] -= upd;
            }
        }
        a[(k + 1, k)] = alpha;
        a[(k, k + 1)] = alpha.conj();
        for i in k + 2..n {
            a[(i, k)] = ZERO;
            a[(k, i)] = ZERO;
        }

        // Q ← Q (I − 2vv*) on columns k+1..n.
        for i in 0..n {
            let s: C64 = (0..m).map(|c| q[(i, k + 1 + c)] * v[c]).sum::<C64>() * 2.0;
            for c in 0..m {
                q[(i, k + 1 + c)] -= s * v[c].conj();
            }
        }
    }
    let diag = (0..n).map(|i| a[(i, i)].re).collect();
    let sub = (0..n.saturating_sub(1)).map(|i| a[(i + 1, i)]).collect();
    (diag, sub, q)
}

/// Implicit QL on a real symmetric tridiagonal matrix (diagonal `d`,
/// off-diagonal `e[i]` between rows i and i+1). Rotations accumulate into the
/// row-major `n×n` matrix `z`.
fn tql(d: &mut [f64], e: &mut [f64], z: &mut [f64], n: usize) -> Result<()> {
    if n < 2 {
        return Ok(());
    }
    e[n - 1] = 0.0;
    // Absolute floor so that blocks with a vanishing diagonal still deflate.
    let norm = (0..n).map(|i| d[i].abs() + e[i].abs()).fold(0.0, f64::max);
    let floor = f64::EPSILON * norm;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m < n - 1 {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd || e[m].abs() <= floor {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > MAX_QL_ITERATIONS {
                return Err(Error::Numeric(format!(
                    "tridiagonal QL did not converge for eigenvalue {l} after {MAX_QL_ITERATIONS} iterations"
                )));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut underflow = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                for k in 0..n {
                    let row = k * n;
                    let f = z[row + i + 1];
                    z[row + i + 1] = s * z[row + i] + c * f;
                    z[row + i] = c * z[row + i] - s * f;
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn residual(h: &HermitianMatrix, dec: &SpectralDecomposition) -> f64 {
        (&dec.reconstruct() - h.matrix()).max_abs()
    }

    #[test]
    fn diagonal_gives_standard_basis() {
        let h = HermitianMatrix::from_real_diag(&[10.0, 2.0]);
        let dec = hermitian_eig(&h).unwrap();
        assert_eq!(dec.eigenvalues, vec![2.0, 10.0]);
        assert!((dec.eigenvectors[(1, 0)] - C64::new(1.0, 0.0)).norm() < 1e-15);
        assert!((dec.eigenvectors[(0, 1)] - C64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn complex_hermitian_reconstructs() {
        let i = C64::new(0.0, 1.0);
        let one = C64::new(1.0, 0.0);
        let m = CMatrix::from_rows(&[
            vec![one * 2.0, one + i, i * 3.0, one * 0.5],
            vec![one - i, -one, one * 0.25, -i],
            vec![-i * 3.0, one * 0.25, one * 4.0, one + i * 2.0],
            vec![one * 0.5, i, one - i * 2.0, one * 0.0],
        ])
        .unwrap();
        let h = HermitianMatrix::new(m).unwrap();
        let dec = hermitian_eig(&h).unwrap();
        assert!(residual(&h, &dec) < 1e-12);
        let gram = &dec.eigenvectors.adjoint() * &dec.eigenvectors;
        assert!((&gram - &CMatrix::identity(4)).max_abs() < 1e-13);
        assert!(dec.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
        let tr: f64 = dec.eigenvalues.iter().sum();
        assert!((tr - 5.0).abs() < 1e-12);
    }

    #[test]
    fn phase_convention() {
        let h = HermitianMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap();
        let dec = hermitian_eig(&h).unwrap();
        for j in 0..2 {
            let v = dec.eigenvector(j);
            assert!(v[0].im == 0.0 && v[0].re > 0.0);
        }
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = CMatrix::from_real_rows(&[&[1.0, 2.0], &[0.0, 1.0]]).unwrap();
        assert!(matches!(HermitianMatrix::new(m), Err(Error::Precondition(_))));
    }
}

//! The block matrix `M = [[A, B], [B*, C]]`, its Schur complement and
//! resolvent, relative-bound constants and the spectral landmarks above
//! `max σ(C)`.
//!
//! At finite dimension the top-dominant / diagonally-dominant distinction is
//! void: every Hermitian `A`, `C` and arbitrary `B` give a self-adjoint `M`,
//! and the Schur complement detects all of `σ(M) ∩ ρ(C)`.

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::linalg::{dist_to_set, CMatrix, HermitianMatrix, Interval, SpectralDecomposition, C64};
use crate::tolerance;

/// Constants `(a, b)` with `BB* ⪯ aA + bI`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RelativeBound {
    pub a: f64,
    pub b: f64,
}

impl RelativeBound {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite()) || a < 0.0 || b < 0.0 {
            return Err(Error::Precondition(format!(
                "relative bound needs finite a, b >= 0, got ({a}, {b})"
            )));
        }
        Ok(Self { a, b })
    }

    pub const ZERO: Self = Self { a: 0.0, b: 0.0 };
}

/// Minimal `b` for a given `a`, with a unit vector attaining
/// `λ_max(BB* − aA)`.
#[derive(Clone, Debug)]
pub struct MinimalBound {
    pub bound: RelativeBound,
    /// `λ_max(BB* − aA)` before clipping at zero.
    pub lambda_max: f64,
    pub witness: Vec<C64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectralLandmarks {
    /// `max σ(C)`.
    pub c: f64,
    /// Midpoint of `c` and the first eigenvalue of `M` above `c`.
    pub c_tilde: f64,
    /// Number of negative eigenvalues of `S(c̃)`.
    pub kappa: usize,
    /// Eigenvalues of `M` above `c`, ascending.
    pub lambda_above_c: Vec<f64>,
}

#[derive(Default)]
struct Cache {
    a: OnceLock<Result<SpectralDecomposition>>,
    c: OnceLock<Result<SpectralDecomposition>>,
    m: OnceLock<Result<SpectralDecomposition>>,
    assembled: OnceLock<HermitianMatrix>,
}

impl Clone for Cache {
    fn clone(&self) -> Self {
        Self {
            a: self.a.clone(),
            c: self.c.clone(),
            m: self.m.clone(),
            assembled: self.assembled.clone(),
        }
    }
}

/// Hermitian `A` (n1×n1), `C` (n2×n2) and coupling `B` (n1×n2).
///
/// Decompositions of `A`, `C` and the assembled matrix are computed lazily
/// and cached; the value is otherwise immutable.
#[derive(Clone)]
pub struct BlockOperatorMatrix {
    a: HermitianMatrix,
    b: CMatrix,
    c: HermitianMatrix,
    cache: Cache,
}

impl std::fmt::Debug for BlockOperatorMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("BlockOperatorMatrix")
            .field("a", &self.a)
            .field("b", &self.b)
            .field("c", &self.c)
            .finish()
    }
}

impl PartialEq for BlockOperatorMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.a == other.a && self.b == other.b && self.c == other.c
    }
}

impl BlockOperatorMatrix {
    pub fn new(a: HermitianMatrix, b: CMatrix, c: HermitianMatrix) -> Result<Self> {
        if a.dim() == 0 || c.dim() == 0 {
            return Err(Error::Dimension("both diagonal blocks must be non-empty".into()));
        }
        if b.rows() != a.dim() || b.cols() != c.dim() {
            return Err(Error::Dimension(format!(
                "B is {}x{} but A is {}x{} and C is {}x{}",
                b.rows(),
                b.cols(),
                a.dim(),
                a.dim(),
                c.dim(),
                c.dim()
            )));
        }
        if !b.is_finite() {
            return Err(Error::Input("B has non-finite entries".into()));
        }
        Ok(Self {
            a,
            b,
            c,
            cache: Cache::default(),
        })
    }

    /// Validates `a` and `c` as Hermitian.
    pub fn from_matrices(a: CMatrix, b: CMatrix, c: CMatrix) -> Result<Self> {
        Self::new(HermitianMatrix::new(a)?, b, HermitianMatrix::new(c)?)
    }

    pub fn from_real(a: &[&[f64]], b: &[&[f64]], c: &[&[f64]]) -> Result<Self> {
        Self::from_matrices(
            CMatrix::from_real_rows(a)?,
            CMatrix::from_real_rows(b)?,
            CMatrix::from_real_rows(c)?,
        )
    }

    /// Same blocks with `B` replaced by zero.
    pub fn decoupled(&self) -> Self {
        Self::new(self.a.clone(), CMatrix::zeros(self.n1(), self.n2()), self.c.clone()).expect("dimensions unchanged")
    }

    pub fn with_a(&self, a: HermitianMatrix) -> Result<Self> {
        Self::new(a, self.b.clone(), self.c.clone())
    }

    pub fn with_b(&self, b: CMatrix) -> Result<Self> {
        Self::new(self.a.clone(), b, self.c.clone())
    }

    pub fn n1(&self) -> usize {
        self.a.dim()
    }

    pub fn n2(&self) -> usize {
        self.c.dim()
    }

    pub fn dim(&self) -> usize {
        self.n1() + self.n2()
    }

    pub fn a(&self) -> &HermitianMatrix {
        &self.a
    }

    pub fn b(&self) -> &CMatrix {
        &self.b
    }

    pub fn c(&self) -> &HermitianMatrix {
        &self.c
    }

    /// `[[A, B], [B*, C]]`.
    pub fn assemble(&self) -> &HermitianMatrix {
        self.cache.assembled.get_or_init(|| {
            let (n1, n2) = (self.n1(), self.n2());
            let mut m = CMatrix::zeros(n1 + n2, n1 + n2);
            m.set_block(0, 0, self.a.matrix());
            m.set_block(0, n1, &self.b);
            m.set_block(n1, 0, &self.b.adjoint());
            m.set_block(n1, n1, self.c.matrix());
            HermitianMatrix::symmetrize(m)
        })
    }

    pub fn eig_a(&self) -> Result<&SpectralDecomposition> {
        cached(&self.cache.a, || self.a.eig())
    }

    pub fn eig_c(&self) -> Result<&SpectralDecomposition> {
        cached(&self.cache.c, || self.c.eig())
    }

    pub fn eig_m(&self) -> Result<&SpectralDecomposition> {
        cached(&self.cache.m, || self.assemble().eig())
    }

    pub fn spec_a(&self) -> Result<&[f64]> {
        Ok(&self.eig_a()?.eigenvalues)
    }

    pub fn spec_c(&self) -> Result<&[f64]> {
        Ok(&self.eig_c()?.eigenvalues)
    }

    pub fn spec_m(&self) -> Result<&[f64]> {
        Ok(&self.eig_m()?.eigenvalues)
    }

    /// `max σ(C)`.
    pub fn c_max(&self) -> Result<f64> {
        Ok(*self.spec_c()?.last().expect("C is non-empty"))
    }

    /// Global tolerance for comparisons involving the assembled matrix.
    pub fn tol(&self) -> f64 {
        tolerance::scaled(self.dim(), self.assemble().matrix().max_abs())
    }

    /// `S(λ) = A − λ − B(C − λ)⁻¹B*`, evaluated through the eigenbasis of `C`.
    pub fn schur_complement(&self, lambda: f64) -> Result<HermitianMatrix> {
        let ec = self.eig_c()?;
        let distance = dist_to_set(lambda, &ec.eigenvalues);
        if !(distance > self.tol()) {
            return Err(Error::SingularShift {
                what: "C",
                shift: lambda,
                distance,
            });
        }
        let bq = self.b.matmul(&ec.eigenvectors)?;
        let n1 = self.n1();
        let mut s = self.a.matrix().shift_diagonal(-lambda);
        for (k, &ck) in ec.eigenvalues.iter().enumerate() {
            let w = 1.0 / (ck - lambda);
            for i in 0..n1 {
                let bi = bq[(i, k)] * w;
                for j in 0..n1 {
                    s[(i, j)] -= bi * bq[(j, k)].conj();
                }
            }
        }
        Ok(HermitianMatrix::symmetrize(s))
    }

    /// `(M − α)⁻¹` assembled blockwise from `S(α)⁻¹` and `F(α) = B(C − α)⁻¹`:
    ///
    /// ```text
    /// [ S⁻¹        −S⁻¹F           ]
    /// [ −F*S⁻¹     (C−α)⁻¹ + F*S⁻¹F ]
    /// ```
    pub fn resolvent_block(&self, alpha: f64) -> Result<CMatrix> {
        let s = self.schur_complement(alpha)?;
        let es = s.eig()?;
        let smin = es.eigenvalues.iter().map(|x| x.abs()).fold(f64::INFINITY, f64::min);
        if !(smin > self.tol()) {
            return Err(Error::SingularShift {
                what: "S(α)",
                shift: alpha,
                distance: smin,
            });
        }
        let s_inv = es.apply_function(|x| 1.0 / x);
        let c_inv = self.eig_c()?.apply_function(|x| 1.0 / (x - alpha));
        let f = self.b.matmul(&c_inv)?;
        let s_inv_f = s_inv.matmul(&f)?;
        let fh = f.adjoint();
        let lower_right = &c_inv + &fh.matmul(&s_inv_f)?;

        let (n1, n2) = (self.n1(), self.n2());
        let mut r = CMatrix::zeros(n1 + n2, n1 + n2);
        r.set_block(0, 0, &s_inv);
        r.set_block(0, n1, &s_inv_f.scale_real(-1.0));
        r.set_block(n1, 0, &s_inv_f.adjoint().scale_real(-1.0));
        r.set_block(n1, n1, &lower_right);
        Ok(r)
    }

    /// Smallest `b` with `BB* ⪯ aA + bI` for the given `a`, namely
    /// `max(0, λ_max(BB* − aA))`.
    pub fn minimal_b_for_a(&self, a: f64) -> Result<MinimalBound> {
        if !(a >= 0.0) || !a.is_finite() {
            return Err(Error::Precondition(format!("a must be finite and >= 0, got {a}")));
        }
        let bbh = self.b.matmul(&self.b.adjoint())?;
        let diff = HermitianMatrix::symmetrize(&bbh - &self.a.matrix().scale_real(a));
        let dec = diff.eig()?;
        let top = dec.dim() - 1;
        let lambda_max = dec.eigenvalues[top];
        Ok(MinimalBound {
            bound: RelativeBound::new(a, lambda_max.max(0.0))?,
            lambda_max,
            witness: dec.eigenvector(top),
        })
    }

    /// `λ_min(aA + bI − BB*)`; non-negative (up to rounding) iff `rb` is a
    /// valid relative bound.
    pub fn relative_bound_margin(&self, rb: RelativeBound) -> Result<f64> {
        let bbh = self.b.matmul(&self.b.adjoint())?;
        let m = &self.a.matrix().scale_real(rb.a).shift_diagonal(rb.b) - &bbh;
        Ok(HermitianMatrix::symmetrize(m).eig()?.eigenvalues[0])
    }

    /// Scans `a ∈ {0, 0.05, …, a_max}` with
    /// `a_max = λ_max(BB*) / max(λ_min(A), tol)` and returns the pair whose
    /// inclusion window at `μ = min σ(A)` is narrowest. The scan is capped at
    /// [`MAX_A_STEPS`] steps.
    pub fn scan_relative_bound(&self) -> Result<RelativeBound> {
        let spec_a = self.spec_a()?.to_vec();
        let c = self.c_max()?;
        let mu = spec_a[0];
        let bbh = HermitianMatrix::symmetrize(self.b.matmul(&self.b.adjoint())?);
        let bb_max = *bbh.eig()?.eigenvalues.last().expect("non-empty");
        let a_max = bb_max / mu.max(self.tol());
        let steps = ((a_max / A_STEP).floor().max(0.0) as usize).min(MAX_A_STEPS);

        let mut best = self.minimal_b_for_a(0.0)?.bound;
        let mut best_width = window_width(mu, c, best);
        for k in 1..=steps {
            let rb = self.minimal_b_for_a(k as f64 * A_STEP)?.bound;
            let w = window_width(mu, c, rb);
            if w < best_width {
                best = rb;
                best_width = w;
            }
        }
        Ok(best)
    }

    pub fn landmarks(&self) -> Result<SpectralLandmarks> {
        let c = self.c_max()?;
        let tol = self.tol();
        let lambda_above_c: Vec<f64> = self.spec_m()?.iter().copied().filter(|&l| l > c + tol).collect();
        let Some(&first) = lambda_above_c.first() else {
            return Err(Error::EmptyLandmarks { c });
        };
        let c_tilde = 0.5 * (c + first);
        let s = self.schur_complement(c_tilde)?;
        let kappa = s.eig()?.eigenvalues.iter().filter(|&&x| x < 0.0).count();
        Ok(SpectralLandmarks {
            c,
            c_tilde,
            kappa,
            lambda_above_c,
        })
    }

    /// Spectral projector of the assembled matrix for `window`.
    pub fn spectral_projector(&self, window: &Interval) -> Result<CMatrix> {
        Ok(crate::linalg::spectral_projector(self.eig_m()?, window))
    }
}

pub const A_STEP: f64 = 0.05;
pub const MAX_A_STEPS: usize = 2000;

fn window_width(mu: f64, c: f64, rb: RelativeBound) -> f64 {
    let half = 0.5 * (mu - c);
    let rad = half * half + rb.a * (rb.a + c) + rb.b;
    if rad < 0.0 {
        f64::INFINITY
    } else {
        2.0 * rad.sqrt()
    }
}

fn cached<'a>(
    cell: &'a OnceLock<Result<SpectralDecomposition>>,
    f: impl FnOnce() -> Result<SpectralDecomposition>,
) -> Result<&'a SpectralDecomposition> {
    cell.get_or_init(f).as_ref().map_err(Clone::clone)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m3() -> BlockOperatorMatrix {
        BlockOperatorMatrix::from_real(&[&[2.0, 0.0], &[0.0, 10.0]], &[&[1.0], &[1.0]], &[&[-1.0]]).unwrap()
    }

    #[test]
    fn assembly_places_blocks() {
        let m = m3();
        let full = m.assemble().matrix();
        let expect = CMatrix::from_real_rows(&[&[2.0, 0.0, 1.0], &[0.0, 10.0, 1.0], &[1.0, 1.0, -1.0]]).unwrap();
        assert_eq!(full, &expect);
    }

    #[test]
    fn schur_at_shift() {
        let s = m3().schur_complement(0.645).unwrap();
        assert!((s[(0, 0)].re - 1.9629027355623099).abs() < 1e-12);
        assert!((s[(0, 1)].re - 0.60790273556231).abs() < 1e-12);
        assert!((s[(1, 1)].re - 9.962902735562311).abs() < 1e-12);
    }

    #[test]
    fn schur_rejects_spectrum_of_c() {
        assert!(matches!(m3().schur_complement(-1.0), Err(Error::SingularShift { what: "C", .. })));
    }

    #[test]
    fn minimal_b_examples() {
        let m = m3();
        assert!((m.minimal_b_for_a(0.0).unwrap().bound.b - 2.0).abs() < 1e-12);
        let one = m.minimal_b_for_a(1.0).unwrap();
        assert_eq!(one.bound.b, 0.0);
        assert!((one.lambda_max - (-5.0 + 17f64.sqrt())).abs() < 1e-12);
        assert!(m.minimal_b_for_a(-0.1).is_err());
    }

    #[test]
    fn landmarks_of_m3() {
        let l = m3().landmarks().unwrap();
        assert_eq!(l.c, -1.0);
        assert_eq!(l.kappa, 0);
        assert_eq!(l.lambda_above_c.len(), 2);
        assert!((l.c_tilde - 0.64611472270406518351).abs() < 1e-12);
    }
}

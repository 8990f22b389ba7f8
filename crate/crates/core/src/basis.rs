//! Basis diagnostics for the first components `x_n` of the eigenvectors of
//! `M` above `c`: Riesz frame bounds, the convergence of the spectral
//! projections of `S(λ_n)` to those of `A`, and Bari sums against the
//! eigenvectors of `A`.

use crate::block::{BlockOperatorMatrix, RelativeBound, SpectralLandmarks};
use crate::error::{Error, Result};
use crate::linalg::{dist_to_set, inner, spectral_projector, vec_norm, CMatrix, HermitianMatrix, Interval, C64};
use crate::subspace::{AngularOperator, GraphSubspace};

/// Tolerance on the frame bounds.
pub const FRAME_TOL: f64 = 1e-8;

const EIGVEC_RESIDUAL: f64 = 1e-6;
const CIRCLE_POINTS: usize = 64;

#[derive(Clone, Debug, PartialEq)]
pub struct BasisReport {
    pub gram_min: f64,
    pub gram_max: f64,
    pub k_norm: f64,
    /// `1/(1 + ‖K‖²)`.
    pub riesz_lower: f64,
    pub pass: bool,
}

/// Frame bounds of the first components: the Gram matrix `U*U` must have
/// spectrum in `[1/(1 + ‖K‖²), 1]`.
pub fn riesz_check(m: &BlockOperatorMatrix, sub: &GraphSubspace, k: &AngularOperator) -> Result<BasisReport> {
    let stacked = sub.stacked();
    let full = m.assemble().matrix();
    let scale = full.max_abs().max(1.0);
    for j in 0..stacked.cols() {
        let v = stacked.column(j);
        let mv = full.matvec(&v)?;
        let rq = inner(&v, &mv).re;
        let res: Vec<C64> = mv.iter().zip(&v).map(|(a, b)| a - b * rq).collect();
        let r = vec_norm(&res);
        if r > EIGVEC_RESIDUAL * scale {
            return Err(Error::Input(format!("basis column {j} is not an eigenvector (residual {r:e})")));
        }
    }
    let (gram_min, gram_max) = if sub.dim() == 0 {
        (1.0, 1.0)
    } else {
        let g = HermitianMatrix::symmetrize(&sub.first.adjoint() * &sub.first);
        let ev = g.eig()?.eigenvalues;
        (ev[0], ev[ev.len() - 1])
    };
    let riesz_lower = 1.0 / (1.0 + k.norm * k.norm);
    Ok(BasisReport {
        gram_min,
        gram_max,
        k_norm: k.norm,
        riesz_lower,
        pass: gram_min >= riesz_lower - FRAME_TOL && gram_max <= 1.0 + FRAME_TOL,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecayRecord {
    pub n: usize,
    pub lambda: f64,
    pub mu: f64,
    pub gamma: f64,
    /// Maximum of `δ_n(z)` over 64 points of `Γ_n`.
    pub delta: f64,
    /// Same over 128 points.
    pub delta_refined: f64,
    pub dist_circle_to_a: f64,
    /// `‖E({μ_{κ+n}}) − F_n(Δ_n)‖`.
    pub proj_diff_norm: f64,
    /// Whether `μ_{κ+n}` is the only point of `σ(A)` inside `Γ_n`.
    pub isolated: bool,
    /// `(γ_n / dist[Γ_n, σ(A)]) · δ_n/(1 − δ_n)` when `δ_n < 1`.
    pub bound: Option<f64>,
}

impl DecayRecord {
    /// Bound applies (`δ_n < 1`, `μ_{κ+n}` isolated) and holds.
    pub fn bound_respected(&self, tol: f64) -> Option<bool> {
        match self.bound {
            Some(b) if self.isolated => Some(self.proj_diff_norm <= b + tol),
            _ => None,
        }
    }

    pub fn m_ratio(&self) -> f64 {
        self.gamma / self.dist_circle_to_a
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecayReport {
    pub records: Vec<DecayRecord>,
    /// Largest `γ_n / dist[Γ_n, σ(A)]` over the computed indices.
    pub m_empirical: f64,
}

impl DecayReport {
    pub fn strictly_decreasing(&self) -> bool {
        self.records.windows(2).all(|w| w[1].proj_diff_norm < w[0].proj_diff_norm)
    }
}

/// For `n = 1..=n_max`: distance between the spectral projector of `A` at
/// `μ_{κ+n}` and the projector of `S(λ_n)` onto `(−γ_n, γ_n)`, along with the
/// contour quantities entering its bound.
pub fn projection_decay(
    m: &BlockOperatorMatrix,
    lm: &SpectralLandmarks,
    rb: RelativeBound,
    n_max: usize,
) -> Result<DecayReport> {
    let spec_m = m.spec_m()?;
    let ea = m.eig_a()?;
    let spec_a = &ea.eigenvalues;
    check_counts(lm, spec_a.len(), n_max)?;
    let tol = m.tol();

    let mut records = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let lambda = lm.lambda_above_c[n - 1];
        let mu = spec_a[lm.kappa + n - 1];
        let gamma = 0.5 * gap_to_rest(spec_m, lambda);
        if !(gamma > tol) {
            return Err(Error::DegenerateGap { lambda, gap: 2.0 * gamma });
        }
        let s = m.schur_complement(lambda)?;
        let f = spectral_projector(&s.eig()?, &Interval::open(-gamma, gamma));
        let e = spectral_projector(ea, &Interval::closed(mu - tol, mu + tol));
        let diff = HermitianMatrix::symmetrize(&e - &f).eig()?;
        let proj_diff_norm = diff.eigenvalues.iter().map(|x| x.abs()).fold(0.0, f64::max);

        let gap_c = lambda - lm.c;
        let delta_at = |points: usize| {
            (0..points)
                .map(|k| {
                    let theta = 2.0 * std::f64::consts::PI * k as f64 / points as f64;
                    let z = C64::new(lambda, 0.0) + C64::from_polar(gamma, theta);
                    let dz = spec_a.iter().map(|&x| (z - x).norm()).fold(f64::INFINITY, f64::min);
                    rb.a / gap_c + (z * rb.a + rb.b).norm() / (dz * gap_c)
                })
                .fold(0.0, f64::max)
        };
        let delta = delta_at(CIRCLE_POINTS);
        let delta_refined = delta_at(2 * CIRCLE_POINTS);
        let dist_circle_to_a = spec_a.iter().map(|&x| ((x - lambda).abs() - gamma).abs()).fold(f64::INFINITY, f64::min);
        let inside = spec_a.iter().filter(|&&x| (x - lambda).abs() < gamma).count();
        let multiplicity = spec_a.iter().filter(|&&x| (x - mu).abs() <= tol).count();
        let isolated = (mu - lambda).abs() < gamma && inside == multiplicity;
        let d = delta.max(delta_refined);
        let bound = (d < 1.0).then(|| gamma / dist_circle_to_a * d / (1.0 - d));
        records.push(DecayRecord {
            n,
            lambda,
            mu,
            gamma,
            delta,
            delta_refined,
            dist_circle_to_a,
            proj_diff_norm,
            isolated,
            bound,
        });
    }
    let m_empirical = records.iter().map(DecayRecord::m_ratio).fold(0.0, f64::max);
    Ok(DecayReport { records, m_empirical })
}

#[derive(Clone, Debug, PartialEq)]
pub struct BariReport {
    /// `‖y_{κ+n} − x_n‖²`.
    pub terms: Vec<f64>,
    /// Partial sums of `terms`.
    pub partial_sums: Vec<f64>,
    /// Partial sums of `1/(μ_{k+1} − μ_k)²` over the same range.
    pub gap_sums: Vec<f64>,
    pub gap_sum: f64,
    /// Last three increments each below `1e-3` times the first.
    pub converged: bool,
}

/// `x_n` is the normalized first component of the `n`-th eigenvector above
/// `c`; `y_{κ+n} = Ex_n/‖Ex_n‖` with `E` the spectral projector of `A` at
/// `μ_{κ+n}`.
pub fn bari_sum(m: &BlockOperatorMatrix, lm: &SpectralLandmarks, n_max: usize) -> Result<BariReport> {
    let dec = m.eig_m()?;
    let ea = m.eig_a()?;
    let spec_a = &ea.eigenvalues;
    check_counts(lm, spec_a.len(), n_max)?;
    let tol = m.tol();
    let n1 = m.n1();
    let first_above = dec.eigenvalues.len() - lm.lambda_above_c.len();

    let mut terms = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let v = dec.eigenvector(first_above + n - 1);
        let x0 = &v[..n1];
        let xn = vec_norm(x0);
        if !(xn > tol) {
            return Err(Error::PairingFailure { index: n });
        }
        let mu = spec_a[lm.kappa + n - 1];
        let e = spectral_projector(ea, &Interval::closed(mu - tol, mu + tol));
        terms.push(bari_term(&e, x0, tol)?.ok_or(Error::PairingFailure { index: n })?);
    }
    let partial_sums: Vec<f64> = terms
        .iter()
        .scan(0.0, |acc, &t| {
            *acc += t;
            Some(*acc)
        })
        .collect();
    let gap_sums: Vec<f64> = (0..n_max)
        .map(|i| spec_a.get(lm.kappa + i + 1).map(|&next| next - spec_a[lm.kappa + i]))
        .map(|g| g.map_or(0.0, |g| if g > 0.0 { 1.0 / (g * g) } else { f64::INFINITY }))
        .scan(0.0, |acc, t| {
            *acc += t;
            Some(*acc)
        })
        .collect();
    let converged = terms.len() >= 4 && {
        let first = terms[0];
        terms[terms.len() - 3..].iter().all(|&t| t < 1e-3 * first)
    };
    Ok(BariReport {
        gap_sum: gap_sums.last().copied().unwrap_or(0.0),
        terms,
        partial_sums,
        gap_sums,
        converged,
    })
}

/// `‖y − x̂‖²` with `x̂ = x/‖x‖` and `y = Ex̂/‖Ex̂‖`; `None` if `x` or `Ex`
/// is below `tol`.
pub fn bari_term(e: &CMatrix, x: &[C64], tol: f64) -> Result<Option<f64>> {
    let xn = vec_norm(x);
    if !(xn > tol) {
        return Ok(None);
    }
    let x: Vec<C64> = x.iter().map(|z| z / xn).collect();
    let ex = e.matvec(&x)?;
    let exn = vec_norm(&ex);
    if !(exn > tol) {
        return Ok(None);
    }
    Ok(Some(ex.iter().zip(&x).map(|(e, x)| (e / exn - x).norm_sqr()).sum()))
}

fn check_counts(lm: &SpectralLandmarks, n_a: usize, n_max: usize) -> Result<()> {
    if lm.lambda_above_c.len() < n_max {
        return Err(Error::Precondition(format!(
            "only {} eigenvalues above c, {n_max} requested",
            lm.lambda_above_c.len()
        )));
    }
    if n_a < lm.kappa + n_max {
        return Err(Error::Precondition(format!(
            "σ(A) has {n_a} points, need κ + n_max = {}",
            lm.kappa + n_max
        )));
    }
    Ok(())
}

/// Distance from `lambda` to the rest of `spec` (one copy of `lambda`
/// removed).
fn gap_to_rest(spec: &[f64], lambda: f64) -> f64 {
    let idx = spec
        .iter()
        .enumerate()
        .min_by(|a, b| (a.1 - lambda).abs().total_cmp(&(b.1 - lambda).abs()))
        .map(|(i, _)| i)
        .expect("non-empty spectrum");
    let rest: Vec<f64> = spec
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != idx)
        .map(|(_, &x)| x)
        .collect();
    dist_to_set(lambda, &rest)
}

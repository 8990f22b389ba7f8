use super::profile::{PlasmaProfile, Point};
use crate::block::{BlockOperatorMatrix, RelativeBound};
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, HermitianMatrix, Interval, C64};

pub const MIN_POINTS: usize = 8;

/// Finite-difference realization of the plasma operator on `N` interior
/// points, transformed to the unweighted inner product.
#[derive(Clone, Debug)]
pub struct MhdDiscretization {
    pub n: usize,
    pub h: f64,
    /// Interior grid `x_i = ih`, `i = 1..=N`.
    pub x: Vec<f64>,
    /// Diagonal of `W^{1/2}`, `sqrt(ρ_i h)`.
    pub weight_sqrt: Vec<f64>,
    pub block: BlockOperatorMatrix,
}

/// Builds `A` (N×N), `B` (N×2N) and `C` (2N×2N).
///
/// * `A u = −(ρw u')'/ρ + k²v_a² u` in conservative form with `ρw` averaged
///   at midpoints and `u_0 = u_{N+1} = 0`, `w = v_a² + v_s²`.
/// * `C` is the pointwise 2×2 coefficient matrix, the two vector components
///   interleaved per grid point.
/// * `B` holds `ρ⁻¹D(ρwk⊥ f) + igk⊥ f` and `ρ⁻¹D(ρv_s²k∥ f) + igk∥ f` with
///   `D = −i d/dx` as a centered difference (zero outside the grid).
///
/// All blocks are conjugated by `W^{1/2}`, `W = diag(ρ_i h)`, and the lower
/// left block is the exact adjoint of the transformed `B`.
pub fn discretize(p: &PlasmaProfile, n: usize) -> Result<MhdDiscretization> {
    p.validate()?;
    if n < MIN_POINTS {
        return Err(Error::Precondition(format!("need at least {MIN_POINTS} interior points, got {n}")));
    }
    let h = 1.0 / (n + 1) as f64;
    let nodes: Vec<Point> = (0..=n + 1).map(|i| p.at(i as f64 * h)).collect();
    let pts = &nodes[1..=n];

    // Conservative second-order stencil, then the symmetric form
    // ρ^{1/2} A ρ^{-1/2}.
    let flux: Vec<f64> = nodes
        .windows(2)
        .map(|w| 0.5 * (w[0].rho * w[0].w() + w[1].rho * w[1].w()))
        .collect();
    let mut a = CMatrix::zeros(n, n);
    let h2 = h * h;
    for i in 0..n {
        let (wl, wr) = (flux[i], flux[i + 1]);
        let r = pts[i].rho;
        a[(i, i)] = C64::new((wl + wr) / (h2 * r) + pts[i].k2() * pts[i].va2, 0.0);
        if i + 1 < n {
            let off = -wr / (h2 * (r * pts[i + 1].rho).sqrt());
            a[(i, i + 1)] = C64::new(off, 0.0);
            a[(i + 1, i)] = C64::new(off, 0.0);
        }
    }

    let mut c = CMatrix::zeros(2 * n, 2 * n);
    for (i, q) in pts.iter().enumerate() {
        let (j, k) = (2 * i, 2 * i + 1);
        c[(j, j)] = C64::new(q.k2() * q.va2 + q.kperp * q.kperp * q.vs2, 0.0);
        c[(j, k)] = C64::new(q.kperp * q.kpar * q.vs2, 0.0);
        c[(k, j)] = c[(j, k)];
        c[(k, k)] = C64::new(q.kpar * q.kpar * q.vs2, 0.0);
    }

    // (ρ⁻¹Dφ)_i = −i(φ_{i+1} − φ_{i−1})/(2hρ_i) with φ = ρ·coef·f.
    let mut b = CMatrix::zeros(n, 2 * n);
    let ig = C64::new(0.0, p.g);
    let coef_perp = |q: &Point| q.rho * q.w() * q.kperp;
    let coef_par = |q: &Point| q.rho * q.vs2 * q.kpar;
    for i in 0..n {
        let scale = C64::new(0.0, -1.0 / (2.0 * h * pts[i].rho));
        for (comp, coef) in [(0usize, &coef_perp as &dyn Fn(&Point) -> f64), (1, &coef_par)] {
            if i + 1 < n {
                b[(i, 2 * (i + 1) + comp)] += scale * coef(&pts[i + 1]);
            }
            if i > 0 {
                b[(i, 2 * (i - 1) + comp)] -= scale * coef(&pts[i - 1]);
            }
        }
        b[(i, 2 * i)] += ig * pts[i].kperp;
        b[(i, 2 * i + 1)] += ig * pts[i].kpar;
    }
    // B̂_ij = sqrt(ρ_i/ρ_j) B_ij; both components at a point share its weight.
    let weight_sqrt: Vec<f64> = pts.iter().map(|q| (q.rho * h).sqrt()).collect();
    for i in 0..n {
        for j in 0..2 * n {
            let z = b[(i, j)];
            if z != C64::new(0.0, 0.0) {
                b[(i, j)] = z * (weight_sqrt[i] / weight_sqrt[j / 2]);
            }
        }
    }

    let block = BlockOperatorMatrix::new(HermitianMatrix::new(a)?, b, HermitianMatrix::new(c)?)?;
    Ok(MhdDiscretization {
        n,
        h,
        x: (1..=n).map(|i| i as f64 * h).collect(),
        weight_sqrt,
        block,
    })
}

/// Closed-form constants of the continuum operator, evaluated as maxima and
/// minima over the profile samples.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MhdConstants {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl MhdConstants {
    pub fn relative_bound(&self) -> RelativeBound {
        RelativeBound { a: self.a, b: self.b }
    }
}

/// `c = max{k²w/2 + sqrt(k⁴w²/4 − k²k∥²v_a²v_s²)}`,
/// `a = max{(w²k⊥² + v_s⁴k∥²)/w}`,
/// `b = max(max{k²g² − (g/ρ)(ρ(wk⊥ + v_s²k∥))'} − a·min{k²v_a²}, 0)`.
pub fn constants(p: &PlasmaProfile) -> Result<MhdConstants> {
    p.validate()?;
    let n = p.grid_n();
    let mut c = f64::NEG_INFINITY;
    let mut a = f64::NEG_INFINITY;
    let mut min_kva = f64::INFINITY;
    for j in 0..n {
        let q = p.sample(j);
        let (w, k2) = (q.w(), q.k2());
        let half = 0.5 * k2 * w;
        let disc = half * half - k2 * q.kpar * q.kpar * q.va2 * q.vs2;
        if disc < -1e-12 * half * half.max(1.0) {
            return Err(Error::Profile(format!("negative discriminant {disc} in c at sample {j}")));
        }
        c = c.max(half + disc.max(0.0).sqrt());
        a = a.max((w * w * q.kperp * q.kperp + q.vs2 * q.vs2 * q.kpar * q.kpar) / w);
        min_kva = min_kva.min(k2 * q.va2);
    }
    let deriv = b_derivative_term(p);
    let inner = (0..n)
        .map(|j| {
            let q = p.sample(j);
            q.k2() * p.g * p.g - p.g / q.rho * deriv[j]
        })
        .fold(f64::NEG_INFINITY, f64::max);
    let b = (inner - a * min_kva).max(0.0);
    Ok(MhdConstants { a, b, c })
}

/// `(ρ(wk⊥ + v_s²k∥))'` on the sample grid: centered differences inside,
/// one-sided at the ends.
pub fn b_derivative_term(p: &PlasmaProfile) -> Vec<f64> {
    let n = p.grid_n();
    let h = p.spacing();
    let f: Vec<f64> = (0..n)
        .map(|j| {
            let q = p.sample(j);
            q.rho * (q.w() * q.kperp + q.vs2 * q.kpar)
        })
        .collect();
    (0..n)
        .map(|j| {
            if j == 0 {
                (f[1] - f[0]) / h
            } else if j == n - 1 {
                (f[n - 1] - f[n - 2]) / h
            } else {
                (f[j + 1] - f[j - 1]) / (2.0 * h)
            }
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BandVariant {
    /// `v_a²k∥` and `v_a²v_s²k⊥/w`.
    Literal,
    /// `v_a²k∥²` and `v_a²v_s²k⊥²/w`.
    Squared,
}

impl BandVariant {
    pub fn as_str(self) -> &'static str {
        match self {
            BandVariant::Literal => "literal",
            BandVariant::Squared => "squared",
        }
    }
}

/// Ranges over the samples of the two functions whose ranges make up the
/// essential spectrum.
pub fn essential_bands(p: &PlasmaProfile, variant: BandVariant) -> [Interval; 2] {
    let pow = |k: f64| match variant {
        BandVariant::Literal => k,
        BandVariant::Squared => k * k,
    };
    let range = |f: &dyn Fn(&Point) -> f64| {
        let (lo, hi) = (0..p.grid_n())
            .map(|j| f(&p.sample(j)))
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
        Interval::closed(lo, hi)
    };
    [
        range(&|q| q.va2 * pow(q.kpar)),
        range(&|q| q.va2 * q.vs2 * pow(q.kperp) / q.w()),
    ]
}

//! Eigenvalue enclosures derived from the relative bound `(a, b)`:
//! the distance bound, inclusion and exclusion windows around eigenvalues of
//! `A`, certified gaps in `σ(M)`, the dimension count between two gaps,
//! variational bounds above `c`, and enclosures from the second-order
//! relative spectrum.
//!
//! Conditional statements return a [`Window`] with `hypothesis_ok = false`
//! instead of an error, so that scans over many `μ` keep going.

use crate::block::{BlockOperatorMatrix, RelativeBound};
use crate::error::{Error, Result};
use crate::linalg::{dist_to_set, general_eig, CMatrix, Interval, C64};
use crate::tolerance;

#[derive(Clone, Debug, PartialEq)]
pub struct EnclosureReport {
    pub lambda: f64,
    pub dist_to_a: f64,
    pub dist_to_c: f64,
    /// `|aλ + b| / (dist[λ, σ(C)] − a)`.
    pub bound: f64,
    pub satisfied: bool,
}

impl EnclosureReport {
    /// `bound − dist_to_a`; negative means the bound is violated.
    pub fn slack(&self) -> f64 {
        self.bound - self.dist_to_a
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WindowKind {
    Inclusion,
    Exclusion,
    Resolvent,
}

impl WindowKind {
    pub fn as_str(self) -> &'static str {
        match self {
            WindowKind::Inclusion => "inclusion",
            WindowKind::Exclusion => "exclusion",
            WindowKind::Resolvent => "resolvent",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Window {
    pub kind: WindowKind,
    pub lo: f64,
    pub hi: f64,
    pub mu_refs: Vec<f64>,
    pub hypothesis_ok: bool,
    /// Why the hypothesis failed.
    pub reason: Option<String>,
}

impl Window {
    fn failed(kind: WindowKind, mu_refs: Vec<f64>, reason: String) -> Self {
        let lo = mu_refs.first().copied().unwrap_or(0.0);
        Self {
            kind,
            lo,
            hi: lo,
            mu_refs,
            hypothesis_ok: false,
            reason: Some(reason),
        }
    }

    /// The window as an interval: closed for inclusion windows, open
    /// otherwise. `None` when the hypothesis failed.
    pub fn interval(&self) -> Option<Interval> {
        if !self.hypothesis_ok {
            return None;
        }
        let closed = self.kind == WindowKind::Inclusion;
        Interval::new(self.lo, self.hi, !closed, !closed).ok()
    }
}

fn list_tol(lists: &[&[f64]], extra: &[f64]) -> f64 {
    let n: usize = lists.iter().map(|l| l.len()).sum();
    let scale = lists
        .iter()
        .flat_map(|l| l.iter())
        .chain(extra.iter())
        .map(|x| x.abs())
        .fold(0.0, f64::max);
    tolerance::scaled(n, scale)
}

/// Distance bound `dist[λ, σ(A)] ≤ |aλ + b| / (dist[λ, σ(C)] − a)` for an
/// eigenvalue `λ` of `M`.
pub fn dist_bound(lambda: f64, spec_a: &[f64], spec_c: &[f64], rb: RelativeBound) -> Result<EnclosureReport> {
    let tol = list_tol(&[spec_a, spec_c], &[lambda, rb.a, rb.b]);
    let dist_to_c = dist_to_set(lambda, spec_c);
    if !(dist_to_c > rb.a + tol) {
        return Err(Error::Hypothesis(format!(
            "dist[λ, σ(C)] = {dist_to_c} does not exceed a = {}",
            rb.a
        )));
    }
    let dist_to_a = dist_to_set(lambda, spec_a);
    let bound = (rb.a * lambda + rb.b).abs() / (dist_to_c - rb.a);
    Ok(EnclosureReport {
        lambda,
        dist_to_a,
        dist_to_c,
        bound,
        satisfied: dist_to_a <= bound + tol,
    })
}

/// `α± = (μ + c + 2a)/2 ± sqrt(((μ − c)/2)² + a(a + c) + b)`.
pub fn alpha_pm(mu: f64, c: f64, rb: RelativeBound) -> Option<(f64, f64)> {
    let half = 0.5 * (mu - c);
    let rad = half * half + rb.a * (rb.a + c) + rb.b;
    if rad < 0.0 {
        return None;
    }
    let mid = 0.5 * (mu + c) + rb.a;
    let r = rad.sqrt();
    Some((mid - r, mid + r))
}

/// `β± = (μ + c)/2 ± sqrt(((μ − c)/2)² − (aμ + b))`, if the radicand is
/// non-negative.
pub fn beta_pm(mu: f64, c: f64, rb: RelativeBound) -> Option<(f64, f64)> {
    let half = 0.5 * (mu - c);
    let rad = half * half - (rb.a * mu + rb.b);
    if rad < 0.0 {
        return None;
    }
    let mid = 0.5 * (mu + c);
    let r = rad.sqrt();
    Some((mid - r, mid + r))
}

/// Inclusion window `[α⁻, α⁺]` for an eigenvalue of `M` in `[μ, μ + r]`.
pub fn eigenvalue_window(mu: f64, c: f64, rb: RelativeBound) -> Result<Window> {
    let (lo, hi) = alpha_pm(mu, c, rb).ok_or_else(|| {
        Error::Hypothesis(format!("negative discriminant in the inclusion window at μ = {mu}, c = {c}"))
    })?;
    Ok(Window {
        kind: WindowKind::Inclusion,
        lo,
        hi,
        mu_refs: vec![mu],
        hypothesis_ok: true,
        reason: None,
    })
}

/// Exclusion window `(β⁻, β⁺)` for eigenvalues of `M` in `(μ − r, μ]`.
/// Requires `(μ − c)² > 4aμ + 4b`.
pub fn exclusion_window(mu: f64, c: f64, rb: RelativeBound) -> Window {
    let lhs = (mu - c) * (mu - c);
    let rhs = 4.0 * (rb.a * mu + rb.b);
    let tol = tolerance::scaled(1, lhs.abs().max(rhs.abs()));
    if !(lhs > rhs + tol) {
        return Window::failed(
            WindowKind::Exclusion,
            vec![mu],
            format!("(μ − c)² = {lhs} does not exceed 4aμ + 4b = {rhs}"),
        );
    }
    let (lo, hi) = beta_pm(mu, c, rb).expect("radicand positive");
    Window {
        kind: WindowKind::Exclusion,
        lo,
        hi,
        mu_refs: vec![mu],
        hypothesis_ok: true,
        reason: None,
    }
}

/// Range of `λ` to which the inclusion window at `spec_a[idx]` applies:
/// `[μ, μ + r]` with `2r` the gap to the next distinct eigenvalue of `A`,
/// intersected with `(c + a, ∞)`.
pub fn inclusion_range(spec_a: &[f64], idx: usize, c: f64, a: f64) -> Interval {
    let mu = spec_a[idx];
    let next = spec_a[idx + 1..].iter().copied().find(|&x| x > mu);
    let hi = next.map_or(f64::INFINITY, |x| mu + 0.5 * (x - mu));
    let floor = c + a;
    if mu > floor {
        Interval::new(mu, hi, false, hi.is_infinite()).unwrap()
    } else {
        Interval::new(floor, hi.max(floor), true, hi.is_infinite()).unwrap()
    }
}

/// Range of `λ` to which the exclusion window at `spec_a[idx]` applies:
/// `(μ − r, μ]` with `2r` the gap to the previous distinct eigenvalue,
/// intersected with `(c + a, ∞)`.
pub fn exclusion_range(spec_a: &[f64], idx: usize, c: f64, a: f64) -> Interval {
    let mu = spec_a[idx];
    let prev = spec_a[..idx].iter().rev().copied().find(|&x| x < mu);
    let lo = prev.map_or(f64::NEG_INFINITY, |x| mu - 0.5 * (mu - x)).max(c + a);
    Interval::new(lo.min(mu), mu, true, false).unwrap()
}

/// Certified gap `(α₁⁺, β₂⁺) ⊂ ρ(M)` between consecutive eigenvalues
/// `μ1 < μ2` of `A`. The caller guarantees `(μ1, μ2) ∩ σ(A) = ∅`.
pub fn resolvent_interval(mu1: f64, mu2: f64, c: f64, rb: RelativeBound) -> Window {
    let refs = vec![mu1, mu2];
    let tol = tolerance::scaled(2, mu1.abs().max(mu2.abs()).max(c.abs()));
    if !(rb.a + c + tol < mu1) {
        return Window::failed(WindowKind::Resolvent, refs, format!("a + c = {} is not below μ1 = {mu1}", rb.a + c));
    }
    if !(mu1 + tol < mu2) {
        return Window::failed(WindowKind::Resolvent, refs, format!("μ1 = {mu1} is not below μ2 = {mu2}"));
    }
    let Some((_, a1p)) = alpha_pm(mu1, c, rb) else {
        return Window::failed(WindowKind::Resolvent, refs, "α₁± is not real".into());
    };
    let beta = exclusion_window(mu2, c, rb);
    if !beta.hypothesis_ok {
        return Window::failed(WindowKind::Resolvent, refs, beta.reason.unwrap_or_default());
    }
    let (b2m, b2p) = (beta.lo, beta.hi);
    if !(b2m + tol < 0.5 * (mu1 + mu2)) {
        return Window::failed(
            WindowKind::Resolvent,
            refs,
            format!("β₂⁻ = {b2m} is not below (μ1 + μ2)/2 = {}", 0.5 * (mu1 + mu2)),
        );
    }
    if !(a1p + tol < b2p) {
        return Window::failed(WindowKind::Resolvent, refs, format!("α₁⁺ = {a1p} is not below β₂⁺ = {b2p}"));
    }
    Window {
        kind: WindowKind::Resolvent,
        lo: a1p,
        hi: b2p,
        mu_refs: refs,
        hypothesis_ok: true,
        reason: None,
    }
}

/// Two certified gaps `(α₁⁺, β₂⁺)` and `(α₃⁺, β₄⁺)` built from consecutive
/// pairs `μ1 < μ2 ≤ μ3 < μ4` of distinct eigenvalues of `A`.
#[derive(Clone, Debug, PartialEq)]
pub struct GapPair {
    pub mus: [f64; 4],
    pub alpha1p: f64,
    pub beta2p: f64,
    pub alpha3p: f64,
    pub beta4m: f64,
    pub beta4p: f64,
}

impl GapPair {
    /// `[β₂⁺, α₃⁺]`.
    pub fn middle(&self) -> Interval {
        Interval::closed(self.beta2p, self.alpha3p)
    }
}

/// Distinct eigenvalues, merging values closer than `tol`.
pub fn distinct(spec: &[f64], tol: f64) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::with_capacity(spec.len());
    for &x in spec {
        if out.last().map_or(true, |&l| x - l > tol) {
            out.push(x);
        }
    }
    out
}

/// All gap pairs formed by successive certified gaps between consecutive
/// distinct eigenvalues of `A`.
pub fn gap_pairs(spec_a: &[f64], c: f64, rb: RelativeBound) -> Vec<GapPair> {
    let tol = list_tol(&[spec_a], &[c]);
    let mus = distinct(spec_a, tol);
    let gaps: Vec<(usize, Window)> = mus
        .windows(2)
        .enumerate()
        .map(|(i, w)| (i, resolvent_interval(w[0], w[1], c, rb)))
        .filter(|(_, w)| w.hypothesis_ok)
        .collect();
    gaps.windows(2)
        .map(|g| {
            let (i, lower) = (&g[0].0, &g[0].1);
            let (j, upper) = (&g[1].0, &g[1].1);
            let (b4m, b4p) = beta_pm(mus[j + 1], c, rb).expect("validated by resolvent_interval");
            GapPair {
                mus: [mus[*i], mus[i + 1], mus[*j], mus[j + 1]],
                alpha1p: lower.lo,
                beta2p: lower.hi,
                alpha3p: upper.lo,
                beta4m: b4m,
                beta4p: b4p,
            }
        })
        .collect()
}

/// Counts of `σ(M)` and `σ(A)` in the closed interval `[β₂⁺, α₃⁺]`.
pub fn subspace_dim_check(m: &BlockOperatorMatrix, beta2p: f64, alpha3p: f64) -> Result<(usize, usize)> {
    if !(beta2p <= alpha3p) {
        return Err(Error::Precondition(format!("β₂⁺ = {beta2p} exceeds α₃⁺ = {alpha3p}")));
    }
    let window = Interval::closed(beta2p, alpha3p);
    let in_m = m.spec_m()?.iter().filter(|&&x| window.contains(x)).count();
    let in_a = m.spec_a()?.iter().filter(|&&x| window.contains(x)).count();
    Ok((in_m, in_a))
}

/// Upper variational bound `(μ + c)/2 + sqrt(((μ − c)/2)² + aμ + b)`,
/// evaluated as `μ + (aμ + b)/(d/2 + sqrt(d²/4 + aμ + b))` with `d = μ − c`
/// to avoid cancellation for large `μ`.
pub fn variational_upper(mu: f64, c: f64, rb: RelativeBound) -> f64 {
    let d = mu - c;
    let q = rb.a * mu + rb.b;
    let r = (0.25 * d * d + q).max(0.0).sqrt();
    if d > 0.0 {
        mu + q / (0.5 * d + r)
    } else {
        0.5 * (mu + c) + r
    }
}

/// `[μ_{κ+n}, upper(μ_{κ+n})]` for every `n` with `κ + n ≤ |σ(A)|`.
pub fn variational_bounds(spec_a: &[f64], c: f64, rb: RelativeBound, kappa: usize) -> Vec<Interval> {
    spec_a
        .iter()
        .skip(kappa)
        .map(|&mu| Interval::closed(mu, variational_upper(mu, c, rb).max(mu)))
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct QepEnclosure {
    pub z: C64,
    pub disc_center: f64,
    pub disc_radius: f64,
    pub admitted: bool,
    /// `[Re z − Im² / (β₄⁺ − Re z), Re z + Im² / (Re z − α₁⁺)]` for admitted
    /// points.
    pub interval: Option<Interval>,
}

/// Solves `z²u − 2zS₁u + S₂u = 0` with `S₁ = Q*MQ`, `S₂ = Q*M²Q` for the
/// orthonormal columns `Q` of `subspace`, and encloses eigenvalues of `M` for
/// the points inside the disc with centre `(α₁⁺ + β₄⁺)/2` and radius
/// `(β₄⁺ − α₁⁺)/2`. This is exactly the set of `z` whose interval lies in
/// `(α₁⁺, β₄⁺)`. A radius of `(β₄⁻ − α₁⁺)/2` would be negative whenever the
/// gap hypotheses hold, since `β₄⁻ < (μ₄ + c)/2` and `β₄⁻ − c ≤ 2(aμ₄+b)/(μ₄−c)`;
/// `β₄⁻` is only validated.
///
/// Real roots have even multiplicity and conjugate roots give identical
/// intervals, so each pair is reported once, with `Im z ≥ 0`.
pub fn soq_enclosure(
    m: &BlockOperatorMatrix,
    subspace: &CMatrix,
    alpha1p: f64,
    beta4m: f64,
    beta4p: f64,
) -> Result<Vec<QepEnclosure>> {
    if subspace.rows() != m.dim() {
        return Err(Error::Dimension(format!(
            "subspace has {} rows, matrix has dimension {}",
            subspace.rows(),
            m.dim()
        )));
    }
    if !(alpha1p < beta4p && beta4m <= beta4p) {
        return Err(Error::Precondition(format!(
            "need α₁⁺ < β₄⁺ and β₄⁻ ≤ β₄⁺, got {alpha1p}, {beta4m}, {beta4p}"
        )));
    }
    let k = subspace.cols();
    let gram = &subspace.adjoint() * subspace;
    let ortho = (&gram - &CMatrix::identity(k)).max_abs();
    if ortho > 1e-8 {
        return Err(Error::Precondition(format!("subspace basis is not orthonormal (defect {ortho:e})")));
    }
    let zs = second_order_spectrum(m.assemble().matrix(), subspace)?;
    let center = 0.5 * (alpha1p + beta4p);
    let radius = 0.5 * (beta4p - alpha1p);
    zs.into_iter()
        .map(|z| {
            let admitted = (z - C64::new(center, 0.0)).norm() < radius;
            let interval = if admitted {
                if !(z.re > alpha1p && z.re < beta4p) {
                    return Err(Error::Numeric(format!(
                        "admitted point {z} has real part outside ({alpha1p}, {beta4p})"
                    )));
                }
                let im2 = z.im * z.im;
                Some(Interval::closed(z.re - im2 / (beta4p - z.re), z.re + im2 / (z.re - alpha1p)))
            } else {
                None
            };
            Ok(QepEnclosure {
                z,
                disc_center: center,
                disc_radius: radius,
                admitted,
                interval,
            })
        })
        .collect()
}

/// Points of the second-order spectrum of `M` relative to the span of `q`,
/// deduplicated, sorted by real part.
pub fn second_order_spectrum(m: &CMatrix, q: &CMatrix) -> Result<Vec<C64>> {
    let k = q.cols();
    if k == 0 {
        return Ok(vec![]);
    }
    let mq = m.matmul(q)?;
    let s1 = q.adjoint().matmul(&mq)?;
    let s2 = mq.adjoint().matmul(&mq)?;
    let scale = s1.max_abs().max(s2.max_abs().sqrt());
    let scale = if scale > 0.0 { scale } else { 1.0 };

    // [[0, I], [−S₂/s², 2S₁/s]] has eigenvalues z/s.
    let mut comp = CMatrix::zeros(2 * k, 2 * k);
    for i in 0..k {
        comp[(i, k + i)] = C64::new(1.0, 0.0);
        for j in 0..k {
            comp[(k + i, j)] = -s2[(i, j)] / (scale * scale);
            comp[(k + i, k + j)] = s1[(i, j)] * (2.0 / scale);
        }
    }
    let raw: Vec<C64> = general_eig(&comp)?.into_iter().map(|w| w * scale).collect();

    let near_real_tol = 1e-6 * scale;
    let mut real_like: Vec<C64> = raw.iter().copied().filter(|z| z.im.abs() <= near_real_tol).collect();
    real_like.sort_by(|a, b| a.re.total_cmp(&b.re));
    let mut out: Vec<C64> = real_like
        .chunks(2)
        .map(|pair| {
            let re = pair.iter().map(|z| z.re).sum::<f64>() / pair.len() as f64;
            let im = pair.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
            C64::new(re, im)
        })
        .collect();
    out.extend(raw.iter().copied().filter(|z| z.im > near_real_tol));
    out.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    const RB: RelativeBound = RelativeBound { a: 0.0, b: 2.0 };

    #[test]
    fn inclusion_window_m3() {
        let w = eigenvalue_window(2.0, -1.0, RB).unwrap();
        assert!((w.lo + 1.5615528128088303).abs() < 1e-14);
        assert!((w.hi - 2.5615528128088303).abs() < 1e-14);
    }

    #[test]
    fn exclusion_window_follows_formula() {
        let w = exclusion_window(2.0, -1.0, RB);
        assert!(w.hypothesis_ok);
        assert!(w.lo.abs() < 1e-14 && (w.hi - 1.0).abs() < 1e-14);
        let w = exclusion_window(10.0, -1.0, RB);
        assert!((w.lo + 0.8150729063673247).abs() < 1e-13);
        assert!((w.hi - 9.8150729063673247).abs() < 1e-13);
    }

    #[test]
    fn exclusion_hypothesis_failure() {
        let w = exclusion_window(1.0, 0.0, RelativeBound { a: 0.0, b: 1.0 });
        assert!(!w.hypothesis_ok);
        assert!(w.reason.is_some());
    }

    #[test]
    fn resolvent_interval_m3() {
        let w = resolvent_interval(2.0, 10.0, -1.0, RB);
        assert!(w.hypothesis_ok);
        assert!((w.lo - 2.5615528128088303).abs() < 1e-14);
        assert!((w.hi - 9.8150729063673247).abs() < 1e-13);
        assert!(!resolvent_interval(2.0, 3.0, -1.0, RB).hypothesis_ok);
    }

    #[test]
    fn variational_upper_is_stable() {
        let rb = RelativeBound { a: 0.5, b: 3.0 };
        let mu: f64 = 1e8;
        let naive = 0.5 * (mu + 2.0) + ((0.5 * (mu - 2.0)).powi(2) + rb.a * mu + rb.b).sqrt();
        let stable = variational_upper(mu, 2.0, rb);
        assert!((stable - mu - 0.5).abs() < 1e-6);
        assert!((naive - stable).abs() < 1e-2);
    }

    #[test]
    fn distinct_merges_close_values() {
        assert_eq!(distinct(&[1.0, 1.0 + 1e-14, 2.0], 1e-12), vec![1.0, 2.0]);
    }
}

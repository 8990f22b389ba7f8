//! Invariants of the linear algebra, block model, subspace and basis layers,
//! each aggregated over seeded instances into one check.

use rand::Rng;

use crate::basis::bari_term;
use crate::error::Result;
use crate::fixtures::{random_hermitian, random_instance, random_matrix, random_relative_bound, separated_instance, with_spectrum, FixtureRng};
use crate::linalg::{dist_to_set, general_eig, spectral_projector, vec_norm, CMatrix, Interval, C64};
use crate::report::{anchors, Check};
use crate::subspace::{angular_operator, graph_test, shifted_matrix, spectral_subspace};
use crate::BlockOperatorMatrix;

/// `Q*Q = I` (1e-10), trace (1e-9 relative), `σ(H ± I) = σ(H) ± 1` (1e-12),
/// general solver agreement (1e-8).
pub fn eigensolver(r: &mut FixtureRng, count: usize) -> Result<Check> {
    let (mut ortho, mut trace, mut weyl, mut general) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for _ in 0..count {
        let n = r.gen_range(1..=12);
        let h = random_hermitian(r, n, 10.0);
        let dec = h.eig()?;
        let q = &dec.eigenvectors;
        ortho = ortho.max((&(&q.adjoint() * q) - &CMatrix::identity(n)).max_abs());
        let sum: f64 = dec.eigenvalues.iter().sum();
        let scale = dec.eigenvalues.iter().map(|x| x.abs()).sum::<f64>().max(1.0);
        trace = trace.max((h.matrix().trace().re - sum).abs() / scale);
        for eps in [1.0, -1.0] {
            let shifted = h.shift(eps).eig()?;
            for (x, y) in shifted.eigenvalues.iter().zip(&dec.eigenvalues) {
                weyl = weyl.max((x - (y + eps)).abs());
            }
        }
        for (z, l) in general_eig(h.matrix())?.iter().zip(&dec.eigenvalues) {
            general = general.max((z - C64::new(*l, 0.0)).norm() / (1.0 + l.abs()));
        }
    }
    Ok(Check::new("selftest", "eigensolver invariants", anchors::SPECTRAL)
        .input("instances", count)
        .output("orthonormality_defect", ortho)
        .output("trace_defect", trace)
        .output("shift_defect", weyl)
        .output("general_eig_defect", general)
        .passed(ortho <= 1e-10 && trace <= 1e-9 && weyl <= 1e-12 && general <= 1e-8))
}

/// Zeros of `S(λ)` on `ρ(C)` are exactly `σ(M) ∩ ρ(C)`: every eigenvalue
/// away from `σ(C)` makes `S` singular to 1e-6, and every zero lies within
/// 1e-6 of `σ(M)`. `S` is decreasing between poles, so zeros are located by
/// bisecting jumps of its negative index between grid points, besides grid
/// points where `S` is singular to 1e-9.
pub fn schur_spectrum(r: &mut FixtureRng, count: usize, grid: usize) -> Result<Check> {
    let (mut forward, mut zeros, mut miss) = (0.0f64, 0usize, 0.0f64);
    for _ in 0..count {
        let m = random_instance(r, 8, 8, 10.0);
        let tol = m.tol();
        let (spec_m, spec_c) = (m.spec_m()?.to_vec(), m.spec_c()?.to_vec());
        let eig_s = |l: f64| -> Result<Vec<f64>> { Ok(m.schur_complement(l)?.eig()?.eigenvalues) };
        let min_abs = |e: &[f64]| e.iter().map(|x| x.abs()).fold(f64::INFINITY, f64::min);
        let negatives = |e: &[f64]| e.iter().filter(|&&x| x < 0.0).count();
        for &l in spec_m.iter().filter(|&&l| dist_to_set(l, &spec_c) > 10.0 * tol) {
            forward = forward.max(min_abs(&eig_s(l)?));
        }
        let lo = spec_m[0].min(spec_c[0]) - 1.0;
        let hi = spec_m[spec_m.len() - 1].max(spec_c[spec_c.len() - 1]) + 1.0;
        let mut prev: Option<(f64, usize)> = None;
        for k in 0..=grid {
            let l = lo + (hi - lo) * k as f64 / grid as f64;
            if dist_to_set(l, &spec_c) <= 10.0 * tol {
                prev = None;
                continue;
            }
            let e = eig_s(l)?;
            if min_abs(&e) <= 1e-9 {
                zeros += 1;
                miss = miss.max(dist_to_set(l, &spec_m));
            }
            let neg = negatives(&e);
            if let Some((pl, pn)) = prev {
                let pole_between = spec_c.iter().any(|&x| x > pl && x < l);
                if !pole_between && neg != pn {
                    let (mut a, mut b) = (pl, l);
                    for _ in 0..100 {
                        let mid = 0.5 * (a + b);
                        if mid <= a || mid >= b {
                            break;
                        }
                        if negatives(&eig_s(mid)?) == pn {
                            a = mid;
                        } else {
                            b = mid;
                        }
                    }
                    zeros += 1;
                    miss = miss.max(dist_to_set(0.5 * (a + b), &spec_m));
                }
            }
            prev = Some((l, neg));
        }
    }
    Ok(Check::new("selftest", "Schur complement zeros match σ(M)", anchors::SCHUR)
        .input("instances", count)
        .input("grid_points", grid + 1)
        .output("max_min_abs_eig_S_at_eigenvalues", forward)
        .output("zeros_located", zeros)
        .output("max_distance_of_zeros", miss)
        .passed(forward <= 1e-6 && zeros > 0 && miss <= 1e-6))
}

/// Block formula for `(M − α)⁻¹` against the direct inverse (1e-8
/// relative), and the relative bound witness: `λ_min(aA + bI − BB*) ≥ −1e-9`
/// at the minimal `b`, and `≤ 1e-6` when that `b` is positive.
pub fn resolvent_and_witness(r: &mut FixtureRng, count: usize) -> Result<Vec<Check>> {
    let (mut resolvent, mut compared) = (0.0f64, 0usize);
    let (mut lowest, mut loosest) = (f64::INFINITY, 0.0f64);
    for _ in 0..count {
        let m = random_instance(r, 8, 8, 10.0);
        let alpha = r.gen_range(-20.0..20.0);
        let near = m.spec_m()?.iter().chain(m.spec_c()?).map(|x| (x - alpha).abs()).fold(f64::INFINITY, f64::min);
        if near > 1e-2 {
            let direct = m.assemble().matrix().shift_diagonal(-alpha).inverse()?;
            let block = m.resolvent_block(alpha)?;
            resolvent = resolvent.max((&block - &direct).max_abs() / direct.max_abs());
            compared += 1;
        }
        let rb = random_relative_bound(r, &m, 2.0)?;
        let margin = m.relative_bound_margin(rb)?;
        lowest = lowest.min(margin);
        if rb.b > 0.0 {
            loosest = loosest.max(margin);
        }
    }
    Ok(vec![
        Check::new("selftest", "resolvent block formula", anchors::RESOLVENT_BLOCK)
            .input("instances", compared)
            .output("max_relative_difference", resolvent)
            .tol(1e-8)
            .passed(resolvent <= 1e-8),
        Check::new("selftest", "minimal relative bound is tight", anchors::RELATIVE_BOUND)
            .input("instances", count)
            .output("min_margin", lowest)
            .output("max_margin_when_b_positive", loosest)
            .passed(lowest >= -1e-9 && loosest <= 1e-6),
    ])
}

/// `A` with eigenvalues `n²s + shift`: the angular operator at `(c, ∞)`
/// exists, is bounded and has codimension `κ`.
pub fn compact_resolvent(r: &mut FixtureRng, count: usize) -> Result<Check> {
    let (mut ok, mut tested, mut worst_norm) = (true, 0usize, 0.0f64);
    for _ in 0..count {
        let n1 = r.gen_range(4..=10);
        let n2 = r.gen_range(1..=5);
        let s = r.gen_range(1.0..5.0);
        let shift = r.gen_range(-20.0..5.0);
        let mus: Vec<f64> = (1..=n1).map(|n| (n * n) as f64 * s + shift).collect();
        let a = with_spectrum(r, &mus);
        let b = random_matrix(r, n1, n2, 2.0);
        let c = random_hermitian(r, n2, 5.0);
        let m = BlockOperatorMatrix::new(a, b, c)?;
        let Ok(lm) = m.landmarks() else { continue };
        tested += 1;
        let sub = spectral_subspace(&m, lm.c_tilde)?;
        match angular_operator(&sub) {
            Ok(k) => {
                worst_norm = worst_norm.max(k.norm);
                ok &= k.norm.is_finite() && k.codim == lm.kappa;
            }
            Err(_) => ok = false,
        }
    }
    Ok(Check::new("selftest", "angular operator for growing σ(A)", anchors::CODIM)
        .input("instances", tested)
        .output("max_norm_K", worst_norm)
        .passed(ok && tested > 0))
}

/// `K_c` extends `K_α` for `α > c`: `K_c U_α = V_α` to
/// `1e-8 (1 + ‖K_c‖)`.
pub fn extension(r: &mut FixtureRng, count: usize) -> Result<Check> {
    let (mut worst, mut tested) = (0.0f64, 0usize);
    for _ in 0..count {
        let m = random_instance(r, 8, 8, 10.0);
        let Ok(lm) = m.landmarks() else { continue };
        let above = &lm.lambda_above_c;
        if above.len() < 2 {
            continue;
        }
        let j = r.gen_range(0..above.len() - 1);
        let alpha = 0.5 * (above[j] + above[j + 1]);
        if above[j + 1] - above[j] < 1e-6 {
            continue;
        }
        let kc = angular_operator(&spectral_subspace(&m, lm.c_tilde)?)?;
        let sub = spectral_subspace(&m, alpha)?;
        if !graph_test(&sub)?.is_graph() {
            continue;
        }
        let defect = (&kc.k.matmul(&sub.first)? - &sub.second).max_abs() / (1.0 + kc.norm);
        worst = worst.max(defect);
        tested += 1;
    }
    Ok(Check::new("selftest", "angular operators extend", anchors::GRAPH)
        .input("instances", tested)
        .output("max_scaled_defect", worst)
        .tol(1e-8)
        .passed(tested > 0 && worst <= 1e-8))
}

/// Shifting `A` up on `(−∞, μ)` never lowers the bottom of the spectrum.
pub fn shifted_family(r: &mut FixtureRng, count: usize) -> Result<Check> {
    let (mut worst, mut tested) = (f64::INFINITY, 0usize);
    for _ in 0..count {
        let m = random_instance(r, 8, 8, 10.0);
        let spec_a = m.spec_a()?;
        let (lo, hi) = (spec_a[0], spec_a[spec_a.len() - 1]);
        if hi - lo < 1e-6 {
            continue;
        }
        let mu = lo + r.gen_range(0.0..1.0) * (hi - lo);
        let s = shifted_matrix(&m, mu)?;
        worst = worst.min(s.spec_m()?[0] - m.spec_m()?[0] + m.tol());
        tested += 1;
    }
    Ok(Check::new("selftest", "shifted family", anchors::SHIFTED)
        .input("instances", tested)
        .output("min_raise_plus_tol", worst)
        .passed(tested > 0 && worst >= 0.0))
}

/// `‖y − x‖` does not depend on the phase of the eigenvector `x`.
pub fn alignment(r: &mut FixtureRng, count: usize) -> Result<Check> {
    let (mut worst, mut terms) = (0.0f64, 0usize);
    for _ in 0..count {
        let (m, _) = separated_instance(r)?;
        let lm = m.landmarks()?;
        let dec = m.eig_m()?;
        let ea = m.eig_a()?;
        let tol = m.tol();
        let first_above = dec.eigenvalues.len() - lm.lambda_above_c.len();
        let n_max = lm.lambda_above_c.len().min(ea.eigenvalues.len() - lm.kappa).min(3);
        for n in 1..=n_max {
            let v = dec.eigenvector(first_above + n - 1);
            let x = &v[..m.n1()];
            if vec_norm(x) <= tol {
                continue;
            }
            let mu = ea.eigenvalues[lm.kappa + n - 1];
            let e = spectral_projector(ea, &Interval::closed(mu - tol, mu + tol));
            let phase = C64::from_polar(1.0, r.gen_range(0.0..std::f64::consts::TAU));
            let rotated: Vec<C64> = x.iter().map(|z| z * phase).collect();
            if let (Some(t0), Some(t1)) = (bari_term(&e, x, tol)?, bari_term(&e, &rotated, tol)?) {
                worst = worst.max((t0 - t1).abs());
                terms += 1;
            }
        }
    }
    Ok(Check::new("selftest", "Bari terms ignore eigenvector phase", anchors::BARI)
        .input("terms", terms)
        .output("max_difference", worst)
        .tol(1e-12)
        .passed(terms > 0 && worst <= 1e-12))
}

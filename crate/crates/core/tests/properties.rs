//! Invariants checked on seeded random instances.

use proptest::prelude::*;
use specblock::enclosure::{dist_bound, eigenvalue_window, gap_pairs, subspace_dim_check};
use specblock::fixtures::{random_hermitian, random_instance, random_matrix, random_relative_bound, rng, separated_instance};
use specblock::linalg::{general_eig, hermitian_eig, pseudo_inverse, spectral_projector, svd, CMatrix, Interval};
use specblock::pipeline::{angular_checks, enclose_checks, soq_checks};
use specblock::subspace::{angular_operator, delta_condition, graph_test, shifted_matrix, spectral_subspace};
use specblock::{Outcome, RelativeBound};

fn fails(checks: &[specblock::Check]) -> Vec<String> {
    checks
        .iter()
        .filter(|c| c.outcome == Outcome::Fail)
        .map(|c| format!("{}: {:?}", c.name, c.outputs))
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn eigendecomposition_reconstructs(seed in any::<u64>(), n in 1usize..12) {
        let h = random_hermitian(&mut rng(seed), n, 10.0);
        let dec = hermitian_eig(&h).unwrap();
        prop_assert!((&dec.reconstruct() - h.matrix()).max_abs() < 1e-10 * h.matrix().max_abs().max(1.0));
        let q = &dec.eigenvectors;
        prop_assert!((&(&q.adjoint() * q) - &CMatrix::identity(n)).max_abs() < 1e-12);
        prop_assert!(dec.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn spectral_projector_is_orthogonal_projection(seed in any::<u64>(), n in 1usize..10, cut in -10.0f64..10.0) {
        let h = random_hermitian(&mut rng(seed), n, 10.0);
        let dec = hermitian_eig(&h).unwrap();
        let w = Interval::above(cut);
        let p = spectral_projector(&dec, &w);
        prop_assert!((&(&p * &p) - &p).max_abs() < 1e-10);
        prop_assert!((&p.adjoint() - &p).max_abs() < 1e-12);
        prop_assert!((p.trace().re - dec.count_in(&w) as f64).abs() < 1e-10);
    }

    #[test]
    fn svd_and_pseudo_inverse(seed in any::<u64>(), r in 1usize..8, c in 1usize..8) {
        let x = random_matrix(&mut rng(seed), r, c, 5.0);
        let s = svd(&x).unwrap();
        let k = s.singular_values.len();
        let mut sig = CMatrix::zeros(k, k);
        for i in 0..k {
            sig[(i, i)] = specblock::C64::new(s.singular_values[i], 0.0);
        }
        let back = &(&s.u * &sig) * &s.v.adjoint();
        prop_assert!((&back - &x).max_abs() < 1e-10);
        let p = pseudo_inverse(&x, 1e-12).unwrap();
        prop_assert!((&(&(&x * &p) * &x) - &x).max_abs() < 1e-9);
        prop_assert!((&(&(&p * &x) * &p) - &p).max_abs() < 1e-9 * p.max_abs().max(1.0));
    }

    #[test]
    fn general_eig_agrees_on_hermitian_input(seed in any::<u64>(), n in 1usize..9) {
        let h = random_hermitian(&mut rng(seed), n, 10.0);
        let herm = hermitian_eig(&h).unwrap().eigenvalues;
        let gen = general_eig(h.matrix()).unwrap();
        for (z, l) in gen.iter().zip(&herm) {
            prop_assert!((z.re - l).abs() < 1e-8 * (1.0 + l.abs()), "{z} vs {l}");
            prop_assert!(z.im.abs() < 1e-8 * (1.0 + l.abs()));
        }
    }

    #[test]
    fn distance_bound_holds(seed in any::<u64>()) {
        let mut r = rng(seed);
        let m = random_instance(&mut r, 8, 8, 10.0);
        let rb = random_relative_bound(&mut r, &m, 2.0).unwrap();
        let (a, c) = (m.spec_a().unwrap(), m.spec_c().unwrap());
        for &l in m.spec_m().unwrap() {
            if let Ok(rep) = dist_bound(l, a, c, rb) {
                prop_assert!(rep.slack() >= -1e-9 * (1.0 + l.abs()), "λ = {l}: {rep:?}");
            }
        }
    }

    #[test]
    fn enclosure_pipeline_never_fails(seed in any::<u64>()) {
        let mut r = rng(seed);
        let m = random_instance(&mut r, 8, 8, 10.0);
        let rb = random_relative_bound(&mut r, &m, 2.0).unwrap();
        let checks = enclose_checks(&m, rb).unwrap();
        prop_assert!(fails(&checks).is_empty(), "{:?}", fails(&checks));
    }

    #[test]
    fn schur_complement_is_singular_at_eigenvalues(seed in any::<u64>()) {
        let m = random_instance(&mut rng(seed), 6, 6, 10.0);
        let c = m.c_max().unwrap();
        let spec_c = m.spec_c().unwrap().to_vec();
        for &l in m.spec_m().unwrap().iter().filter(|&&l| l > c + 1e-3) {
            let gap = spec_c.iter().map(|x| (x - l).abs()).fold(f64::INFINITY, f64::min);
            if gap < 1e-3 {
                continue;
            }
            let s = m.schur_complement(l).unwrap();
            let min = s.eig().unwrap().eigenvalues.iter().map(|x| x.abs()).fold(f64::INFINITY, f64::min);
            let scale = s.matrix().max_abs().max(1.0);
            prop_assert!(min <= 1e-8 * scale / gap.min(1.0), "λ = {l}: {min}");
        }
    }

    #[test]
    fn resolvent_block_inverts(seed in any::<u64>(), shift in -20.0f64..20.0) {
        let m = random_instance(&mut rng(seed), 6, 6, 10.0);
        let d = m.spec_m().unwrap().iter().chain(m.spec_c().unwrap()).map(|x| (x - shift).abs()).fold(f64::INFINITY, f64::min);
        prop_assume!(d > 1e-2);
        let r = m.resolvent_block(shift).unwrap();
        let shifted = m.assemble().matrix().shift_diagonal(-shift);
        let prod = &shifted * &r;
        prop_assert!((&prod - &CMatrix::identity(m.dim())).max_abs() < 1e-7 / d.min(1.0));
    }

    #[test]
    fn shifting_moves_every_eigenvalue(seed in any::<u64>(), n in 1usize..10, t in -5.0f64..5.0) {
        let h = random_hermitian(&mut rng(seed), n, 10.0);
        let base = h.eig().unwrap().eigenvalues;
        let moved = h.shift(t).eig().unwrap().eigenvalues;
        for (x, y) in moved.iter().zip(&base) {
            prop_assert!((x - (y + t)).abs() < 1e-11 * (1.0 + y.abs() + t.abs()));
        }
    }

    #[test]
    fn minimal_b_is_tight(seed in any::<u64>(), a in 0.0f64..3.0) {
        let m = random_instance(&mut rng(seed), 6, 6, 10.0);
        let min = m.minimal_b_for_a(a).unwrap().bound;
        let margin = m.relative_bound_margin(min).unwrap();
        let scale = m.b().max_abs().powi(2).max(m.a().matrix().max_abs() * a).max(1.0);
        prop_assert!(margin >= -1e-9 * scale);
        if min.b > 1e-6 * scale {
            prop_assert!(margin <= 1e-6 * scale, "margin {margin}");
            let tighter = RelativeBound { a, b: min.b - 1e-3 * scale };
            prop_assert!(m.relative_bound_margin(tighter).unwrap() < 0.0);
        }
    }

    #[test]
    fn schur_zeros_are_eigenvalues(seed in any::<u64>(), lo in -20.0f64..20.0, width in 0.01f64..5.0) {
        let m = random_instance(&mut rng(seed), 6, 6, 10.0);
        let spec_c = m.spec_c().unwrap().to_vec();
        let hi = lo + width;
        prop_assume!(!spec_c.iter().any(|&x| x > lo - 1e-6 && x < hi + 1e-6));
        let negatives = |l: f64| m.schur_complement(l).unwrap().eig().unwrap().eigenvalues.iter().filter(|&&x| x < 0.0).count();
        let (n_lo, n_hi) = (negatives(lo), negatives(hi));
        prop_assert!(n_hi >= n_lo);
        let inside = m.spec_m().unwrap().iter().filter(|&&l| l > lo && l < hi).count();
        prop_assert_eq!(n_hi - n_lo, inside);
    }

    #[test]
    fn angular_operators_extend(seed in any::<u64>(), t in 0.0f64..1.0) {
        let m = random_instance(&mut rng(seed), 8, 8, 10.0);
        let Ok(lm) = m.landmarks() else { return Ok(()) };
        let above = &lm.lambda_above_c;
        prop_assume!(above.len() >= 2);
        let j = ((above.len() - 1) as f64 * t) as usize;
        let j = j.min(above.len() - 2);
        prop_assume!(above[j + 1] - above[j] > 1e-6);
        let kc = angular_operator(&spectral_subspace(&m, lm.c_tilde).unwrap()).unwrap();
        let sub = spectral_subspace(&m, 0.5 * (above[j] + above[j + 1])).unwrap();
        prop_assume!(graph_test(&sub).unwrap().is_graph());
        let defect = (&kc.k.matmul(&sub.first).unwrap() - &sub.second).max_abs();
        prop_assert!(defect <= 1e-8 * (1.0 + kc.norm), "{defect}");
    }

    #[test]
    fn windows_grow_with_b(mu in 0.1f64..50.0, c in -10.0f64..0.0, a in 0.0f64..3.0, b in 0.0f64..10.0, db in 0.0f64..10.0) {
        let w0 = eigenvalue_window(mu, c, RelativeBound { a, b });
        let w1 = eigenvalue_window(mu, c, RelativeBound { a, b: b + db });
        if let (Ok(w0), Ok(w1)) = (w0, w1) {
            prop_assert!(w1.lo <= w0.lo && w1.hi >= w0.hi);
        }
    }

    #[test]
    fn graph_above_c_and_codim_matches_kappa(seed in any::<u64>()) {
        let mut r = rng(seed);
        let m = random_instance(&mut r, 8, 8, 10.0);
        let rb = random_relative_bound(&mut r, &m, 2.0).unwrap();
        let checks = angular_checks(&m, None, rb).unwrap();
        prop_assert!(fails(&checks).is_empty(), "{:?}", fails(&checks));
        if let Ok(lm) = m.landmarks() {
            let sub = spectral_subspace(&m, lm.c_tilde).unwrap();
            prop_assert!(graph_test(&sub).unwrap().is_graph());
            prop_assert_eq!(angular_operator(&sub).unwrap().codim, lm.kappa);
        }
    }

    #[test]
    fn small_delta_implies_graph(seed in any::<u64>(), t in 0.01f64..0.99) {
        let mut r = rng(seed);
        let m = random_instance(&mut r, 6, 6, 10.0);
        let rb = random_relative_bound(&mut r, &m, 1.0).unwrap();
        let c = m.c_max().unwrap();
        let top = m.spec_m().unwrap().last().copied().unwrap();
        prop_assume!(top > c + 1e-3);
        let alpha = c + t * (top - c);
        if let Ok(d) = delta_condition(alpha, c, m.spec_a().unwrap(), rb) {
            if d < 0.5 {
                if let Ok(sub) = spectral_subspace(&m, alpha) {
                    prop_assert!(graph_test(&sub).unwrap().is_graph());
                }
            }
        }
    }

    #[test]
    fn shifting_a_raises_the_bottom(seed in any::<u64>(), t in 0.05f64..1.0) {
        let m = random_instance(&mut rng(seed), 6, 6, 10.0);
        let spec_a = m.spec_a().unwrap();
        let (lo, hi) = (spec_a[0], spec_a[spec_a.len() - 1]);
        prop_assume!(hi - lo > 1e-3);
        let mu = lo + t * (hi - lo);
        let s = shifted_matrix(&m, mu).unwrap();
        prop_assert!(s.spec_a().unwrap()[0] >= mu - 1e-9 * (1.0 + mu.abs()));
        prop_assert!(m.spec_m().unwrap()[0] <= s.spec_m().unwrap()[0] + 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn dimension_counts_agree(seed in any::<u64>()) {
        let (m, rb) = separated_instance(&mut rng(seed)).unwrap();
        let pairs = gap_pairs(m.spec_a().unwrap(), m.c_max().unwrap(), rb);
        prop_assert!(!pairs.is_empty());
        for gp in pairs {
            let (in_m, in_a) = subspace_dim_check(&m, gp.beta2p, gp.alpha3p).unwrap();
            prop_assert_eq!(in_m, in_a);
        }
    }

    #[test]
    fn second_order_points_enclose(seed in any::<u64>(), frac in 0.0f64..1.0) {
        let (m, rb) = separated_instance(&mut rng(seed)).unwrap();
        let k = 1 + ((m.dim() - 1) as f64 * frac) as usize;
        let checks = soq_checks(&m, rb, k).unwrap();
        prop_assert!(fails(&checks).is_empty(), "{:?}", fails(&checks));
    }

    #[test]
    fn full_trial_space_recovers_the_spectrum(seed in any::<u64>()) {
        let mut r = rng(seed);
        let m = random_instance(&mut r, 6, 6, 10.0);
        let rb = random_relative_bound(&mut r, &m, 1.0).unwrap();
        let checks = soq_checks(&m, rb, m.dim()).unwrap();
        prop_assert_eq!(checks[0].name.as_str(), "second-order spectrum");
        prop_assert_eq!(checks[0].outcome, Outcome::Pass, "{:?}", checks[0].outputs);
    }

    #[test]
    fn scanned_bound_is_valid(seed in any::<u64>()) {
        let m = random_instance(&mut rng(seed), 4, 4, 10.0);
        let rb = m.scan_relative_bound().unwrap();
        let scale = m.b().max_abs().powi(2).max(m.a().matrix().max_abs() * rb.a).max(1.0);
        prop_assert!(m.relative_bound_margin(rb).unwrap() >= -1e-9 * scale);
    }
}

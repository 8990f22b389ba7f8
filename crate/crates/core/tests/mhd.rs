use approx::assert_abs_diff_eq;
use specblock::mhd::{
    b_derivative_term, constants, discretize, essential_bands, run_report, BandVariant, Coefficient, PlasmaProfile,
};
use specblock::Outcome;
use std::f64::consts::PI;

fn profile(grid: usize, rho: Coefficient, kperp: Coefficient, kpar: Coefficient, g: f64) -> PlasmaProfile {
    PlasmaProfile::new(grid, rho, 1.0.into(), 1.0.into(), kperp, kpar, g).unwrap()
}

#[test]
fn constant_profile_closed_forms() {
    let k = constants(&PlasmaProfile::constant()).unwrap();
    assert_abs_diff_eq!(k.c, 2.0 + 2f64.sqrt(), epsilon = 1e-12);
    assert_abs_diff_eq!(k.a, 2.5, epsilon = 1e-12);
    assert_abs_diff_eq!(k.b, 0.0, epsilon = 1e-12);
}

#[test]
fn sturm_liouville_eigenvalues() {
    // −2u'' + 2u with Dirichlet conditions: 2π²n² + 2.
    let d = discretize(&PlasmaProfile::constant(), 128).unwrap();
    let spec = d.block.spec_a().unwrap();
    for n in 1..=3 {
        let exact = 2.0 * PI * PI * (n * n) as f64 + 2.0;
        let rel = (spec[n - 1] - exact).abs() / exact;
        assert!(rel < 0.02, "n = {n}: {} vs {exact}", spec[n - 1]);
    }
}

#[test]
fn zero_wave_vector_decouples() {
    let p = profile(17, 1.0.into(), 0.0.into(), 0.0.into(), 0.0);
    let k = constants(&p).unwrap();
    assert_eq!((k.a, k.b, k.c), (0.0, 0.0, 0.0));
    let d = discretize(&p, 12).unwrap();
    assert_eq!(d.block.b().max_abs(), 0.0);
    let mut expect: Vec<f64> = d.block.spec_a().unwrap().iter().chain(d.block.spec_c().unwrap()).copied().collect();
    expect.sort_by(f64::total_cmp);
    for (x, y) in d.block.spec_m().unwrap().iter().zip(&expect) {
        assert_abs_diff_eq!(*x, *y, epsilon = 1e-9);
    }
    for band in essential_bands(&p, BandVariant::Squared) {
        assert_eq!((band.lo, band.hi), (0.0, 0.0));
    }
}

#[test]
fn random_smooth_profiles_assemble_hermitian() {
    for (rho, va2, kperp, g) in [("sinusoidal", "linear", "ramp", 0.3), ("linear", "sinusoidal", "constant", -1.0), ("1.5", "ramp", "sinusoidal", 2.0)] {
        let p = PlasmaProfile::new(33, rho.into(), Coefficient::from(va2), "0.5".into(), kperp.into(), "0.7".into(), g).unwrap();
        let d = discretize(&p, 24).unwrap();
        assert!(d.block.assemble().matrix().hermitian_defect() <= 1e-12);
    }
}

#[test]
fn derivative_term_is_second_order() {
    // ρ = 1 + x, v_a² = v_s² = k⊥ = k∥ = 1: (ρ(wk⊥ + v_s²k∥))' = 3 exactly;
    // with ρ = 1 + x² the derivative is 6x.
    let p = profile(41, "linear".into(), 1.0.into(), 1.0.into(), 0.0);
    for d in b_derivative_term(&p) {
        assert_abs_diff_eq!(d, 3.0, epsilon = 1e-10);
    }
    let errs: Vec<f64> = [21usize, 41, 81]
        .iter()
        .map(|&n| {
            let rho: Vec<f64> = (0..n).map(|j| 1.0 + (j as f64 / (n - 1) as f64).powi(2)).collect();
            let p = profile(n, rho.into(), 1.0.into(), 1.0.into(), 0.0);
            let d = b_derivative_term(&p);
            (1..n - 1)
                .map(|j| (d[j] - 6.0 * j as f64 / (n - 1) as f64).abs())
                .fold(0.0, f64::max)
        })
        .collect();
    // Centered differences of a quadratic are exact inside the grid.
    assert!(errs.iter().all(|&e| e < 1e-9), "{errs:?}");
}

#[test]
fn b_constant_picks_up_gravity_and_stratification() {
    // ρ = 1 + x with g = 1: b = max(k²g² − g(ρ(w k⊥ + v_s²k∥))'/ρ) − a·min k²v_a²
    // = max(2 − 3/(1+x)) − 2.5·2, clipped at 0.
    let p = profile(41, "linear".into(), 1.0.into(), 1.0.into(), 1.0);
    let k = constants(&p).unwrap();
    assert_eq!(k.b, 0.0);
    let p = profile(41, "linear".into(), 1.0.into(), 1.0.into(), 4.0);
    let k = constants(&p).unwrap();
    // max over x of 32 − 12/(1+x) is at x = 1: 26; minus 5.
    assert_abs_diff_eq!(k.b, 21.0, epsilon = 1e-9);
}

#[test]
fn essential_band_variants() {
    let p = PlasmaProfile::constant();
    let [b1, b2] = essential_bands(&p, BandVariant::Squared);
    assert_eq!((b1.lo, b1.hi), (1.0, 1.0));
    assert_eq!((b2.lo, b2.hi), (0.5, 0.5));
    let p = profile(11, 1.0.into(), 1.0.into(), "ramp".into(), 0.0);
    let [b1, _] = essential_bands(&p, BandVariant::Squared);
    assert_abs_diff_eq!(b1.lo, 0.0, epsilon = 1e-15);
    assert_abs_diff_eq!(b1.hi, 1.0, epsilon = 1e-15);
    let p = profile(11, 1.0.into(), 2.0.into(), 3.0.into(), 0.0);
    let [l1, l2] = essential_bands(&p, BandVariant::Literal);
    let [s1, s2] = essential_bands(&p, BandVariant::Squared);
    assert_eq!((l1.lo, s1.lo), (3.0, 9.0));
    assert_eq!((l2.lo, s2.lo), (1.0, 2.0));
}

#[test]
fn profile_validation() {
    assert!(PlasmaProfile::new(5, 0.0.into(), 1.0.into(), 1.0.into(), 1.0.into(), 1.0.into(), 0.0).is_err());
    assert!(PlasmaProfile::new(5, 1.0.into(), 0.0.into(), 0.0.into(), 1.0.into(), 1.0.into(), 0.0).is_err());
    assert!(PlasmaProfile::new(2, 1.0.into(), 1.0.into(), 1.0.into(), 1.0.into(), 1.0.into(), 0.0).is_err());
    assert!(PlasmaProfile::new(5, vec![1.0; 4].into(), 1.0.into(), 1.0.into(), 1.0.into(), 1.0.into(), 0.0).is_err());
    assert!(PlasmaProfile::new(5, "nope".into(), 1.0.into(), 1.0.into(), 1.0.into(), 1.0.into(), 0.0).is_err());
    assert!(discretize(&PlasmaProfile::constant(), 7).is_err());
}

#[test]
fn constant_profile_report_passes() {
    let r = run_report(&PlasmaProfile::constant(), 64, 6, BandVariant::Squared).unwrap();
    let failed: Vec<_> = r.checks.iter().filter(|c| c.outcome == Outcome::Fail).map(|c| &c.name).collect();
    assert!(failed.is_empty(), "{failed:?}");
    let gaps: Vec<f64> = r.a_eigenvalues.windows(2).map(|w| w[1] - w[0]).collect();
    assert!(gaps.windows(2).all(|w| w[1] > w[0]));
    assert_eq!(r.codim, r.landmarks.kappa);
    assert!(r.riesz.pass);
}

#[test]
fn decoupled_profile_report_is_trivial() {
    let p = profile(17, 1.0.into(), 0.0.into(), 0.0.into(), 0.0);
    let r = run_report(&p, 16, 4, BandVariant::Squared).unwrap();
    assert!(r.checks.iter().all(|c| c.outcome != Outcome::Fail));
    assert_eq!(r.k_norm, 0.0);
    assert!(r.bari.terms.iter().all(|&t| t < 1e-20));
    assert!(r.decay.records.iter().all(|d| d.proj_diff_norm < 1e-10));
}

#[test]
fn eigenvalues_above_c_converge() {
    let p = PlasmaProfile::constant();
    let coarse = discretize(&p, 64).unwrap().block.landmarks().unwrap();
    let fine = discretize(&p, 128).unwrap().block.landmarks().unwrap();
    for (x, y) in coarse.lambda_above_c.iter().zip(&fine.lambda_above_c).take(5) {
        assert!((x - y).abs() / y.abs() < 0.01, "{x} vs {y}");
    }
}

#[test]
fn riesz_on_first_ten_above_c() {
    let d = discretize(&PlasmaProfile::constant(), 64).unwrap();
    let m = &d.block;
    let lm = m.landmarks().unwrap();
    assert!(lm.lambda_above_c.len() >= 10);
    let sub = specblock::subspace::spectral_subspace(m, lm.c_tilde).unwrap();
    let k = specblock::subspace::angular_operator(&sub).unwrap();
    assert!(specblock::basis::riesz_check(m, &sub, &k).unwrap().pass);
}

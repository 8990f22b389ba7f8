use super::discretize::{constants, discretize, essential_bands, BandVariant, MhdConstants};
use super::profile::PlasmaProfile;
use crate::basis::{bari_sum, projection_decay, riesz_check, BariReport, BasisReport, DecayReport};
use crate::block::{RelativeBound, SpectralLandmarks};
use crate::enclosure::{dist_bound, variational_bounds};
use crate::error::{Error, Result};
use crate::linalg::Interval;
use crate::pipeline::{decay_checks, riesz_record};
use crate::report::{anchors, Check};
use crate::subspace::{angular_operator, spectral_subspace};

/// Relative slack `10/N` granted to continuum constants applied to the
/// discrete operator.
pub fn discretization_slack(n: usize) -> f64 {
    10.0 / n as f64
}

#[derive(Clone, Debug)]
pub struct MhdReport {
    pub n: usize,
    pub variant: BandVariant,
    pub constants: MhdConstants,
    /// `max σ(C)` of the discrete `C` block.
    pub discrete_c: f64,
    /// Smallest `b` making `(a, b)` a relative bound for the discrete blocks.
    pub discrete_min_b: f64,
    /// `(a, max(b, discrete_min_b))`, a valid bound for the discrete blocks.
    pub rb_used: RelativeBound,
    pub bands: [Interval; 2],
    /// `μ_1, …, μ_{n_max+1}`.
    pub a_eigenvalues: Vec<f64>,
    pub landmarks: SpectralLandmarks,
    pub variational: Vec<Interval>,
    pub k_norm: f64,
    pub codim: usize,
    pub riesz: BasisReport,
    pub decay: DecayReport,
    pub bari: BariReport,
    pub checks: Vec<Check>,
}

/// Discretize, then run the enclosure, angular operator and basis pipeline
/// at the window `(c, ∞)` for the first `n_max` eigenvalues above `c`.
pub fn run_report(p: &PlasmaProfile, n: usize, n_max: usize, variant: BandVariant) -> Result<MhdReport> {
    let k = constants(p)?;
    let d = discretize(p, n)?;
    let m = &d.block;
    let tol = m.tol();
    let slack = discretization_slack(n);
    let mut checks = Vec::new();

    let discrete_c = m.c_max()?;
    checks.push(
        Check::new("mhd", "constants", anchors::MHD_CONSTANTS)
            .input("N", n)
            .output("a", k.a)
            .output("b", k.b)
            .output("c", k.c)
            .output("discrete_c", discrete_c)
            .tol(tol)
            .passed(discrete_c <= k.c + tol),
    );

    let minimal = m.minimal_b_for_a(k.a)?;
    let discrete_min_b = minimal.bound.b;
    let allowance = slack * k.b.max(1.0);
    checks.push(
        Check::new("mhd", "relative bound soundness", anchors::RELATIVE_BOUND)
            .input("a", k.a)
            .input("b", k.b)
            .output("discrete_min_b", discrete_min_b)
            .output("lambda_max_BBstar_minus_aA", minimal.lambda_max)
            .tol(allowance)
            .passed(discrete_min_b <= k.b + allowance),
    );
    let rb_used = RelativeBound { a: k.a, b: k.b.max(discrete_min_b) };

    let bands = essential_bands(p, variant);
    checks.push(
        Check::new("mhd", "essential bands", anchors::MHD_BANDS)
            .input("variant", variant.as_str())
            .output("bands", bands.to_vec())
            .passed(bands.iter().all(|b| b.lo.is_finite() && b.hi.is_finite())),
    );

    let spec_a = m.spec_a()?.to_vec();
    let spec_c = m.spec_c()?.to_vec();
    let spec_m = m.spec_m()?.to_vec();

    // Distance bound with the continuum constants, aggregated over σ(M) ∩ (c, ∞).
    let (mut checked, mut skipped, mut worst) = (0usize, 0usize, 0.0f64);
    let mut violations = Vec::new();
    for &lambda in spec_m.iter().filter(|&&l| l > discrete_c + tol) {
        match dist_bound(lambda, &spec_a, &spec_c, k.relative_bound()) {
            Ok(r) => {
                checked += 1;
                let ratio = if r.bound > 0.0 { r.dist_to_a / r.bound } else if r.dist_to_a <= tol { 0.0 } else { f64::INFINITY };
                worst = worst.max(ratio);
                if r.dist_to_a > (1.0 + slack) * r.bound + tol {
                    violations.push(lambda);
                }
            }
            Err(Error::Hypothesis(_)) => skipped += 1,
            Err(e) => return Err(e),
        }
    }
    checks.push(
        Check::new("dist-bound", "distance bound above c", anchors::DIST_BOUND)
            .input("a", k.a)
            .input("b", k.b)
            .output("checked", checked)
            .output("hypothesis_unmet", skipped)
            .output("max_dist_over_bound", worst)
            .output("violations", violations.clone())
            .tol(slack)
            .passed(violations.is_empty()),
    );

    let a_eigenvalues: Vec<f64> = spec_a.iter().take(n_max + 1).copied().collect();
    let gaps: Vec<f64> = a_eigenvalues.windows(2).map(|w| w[1] - w[0]).collect();
    checks.push(
        Check::new("mhd", "gaps of σ(A) grow", anchors::GAP_SUM)
            .output("mu", a_eigenvalues.clone())
            .output("gaps", gaps.clone())
            .passed(gaps.windows(2).all(|w| w[1] > w[0])),
    );

    let lm = m.landmarks()?;
    let variational = variational_bounds(&spec_a, discrete_c, rb_used, lm.kappa);
    let bad: Vec<f64> = lm
        .lambda_above_c
        .iter()
        .zip(&variational)
        .filter(|(l, iv)| **l < iv.lo - tol || **l > iv.hi + tol)
        .map(|(l, _)| *l)
        .collect();
    checks.push(
        Check::new("variational", "variational bounds above c", anchors::VARIATIONAL)
            .input("kappa", lm.kappa)
            .input("a", rb_used.a)
            .input("b", rb_used.b)
            .output("checked", variational.len().min(lm.lambda_above_c.len()))
            .output("violations", bad.clone())
            .tol(tol)
            .passed(bad.is_empty()),
    );

    let sub = spectral_subspace(m, lm.c_tilde)?;
    let ang = angular_operator(&sub)?;
    checks.push(
        Check::new("angular", "codimension", anchors::CODIM)
            .input("c_tilde", lm.c_tilde)
            .output("kappa", lm.kappa)
            .output("codim", ang.codim)
            .output("norm_K", ang.norm)
            .passed(ang.codim == lm.kappa),
    );
    let riesz = riesz_check(m, &sub, &ang)?;
    checks.push(riesz_record(&riesz, lm.c_tilde));

    let n_eff = n_max.min(lm.lambda_above_c.len()).min(spec_a.len().saturating_sub(lm.kappa));
    let decay = projection_decay(m, &lm, rb_used, n_eff)?;
    let bari = bari_sum(m, &lm, n_eff)?;
    // Projector norms and Bari terms are dimensionless, so no matrix scale.
    checks.extend(decay_checks(&decay, &bari, crate::tolerance::scaled(m.dim(), 1.0)));

    // Observations rather than consequences of the theory: recorded as
    // not-applicable when they do not hold.
    let diffs: Vec<f64> = decay.records.iter().map(|r| r.proj_diff_norm).collect();
    let monotone = Check::new("decay", "projection differences decrease", anchors::DECAY).output("proj_diff_norm", diffs);
    checks.push(if decay.strictly_decreasing() {
        monotone.passed(true)
    } else {
        monotone.not_applicable("not strictly decreasing on this range")
    });
    let shifted_gaps: Vec<f64> = spec_a[lm.kappa..(lm.kappa + n_eff + 1).min(spec_a.len())]
        .windows(2)
        .map(|w| w[1] - w[0])
        .collect();
    let ratio = ratio_test(&bari.terms, &shifted_gaps, 3.0);
    let ratio_check = Check::new("bari", "Bari terms follow gap growth", anchors::GAP_SUM)
        .output("terms", bari.terms.clone())
        .tol(3.0);
    checks.push(if ratio {
        ratio_check.passed(true)
    } else {
        ratio_check.not_applicable("term ratios exceed three times the gap ratios")
    });

    Ok(MhdReport {
        n,
        variant,
        constants: k,
        discrete_c,
        discrete_min_b,
        rb_used,
        bands,
        a_eigenvalues,
        landmarks: lm,
        variational,
        k_norm: ang.norm,
        codim: ang.codim,
        riesz,
        decay,
        bari,
        checks,
    })
}

/// `t_{n+1}/t_n ≤ factor · g_{n+1}/g_n` with `g_n = 1/(μ_{n+1} − μ_n)²`.
pub fn ratio_test(terms: &[f64], gaps: &[f64], factor: f64) -> bool {
    let g: Vec<f64> = gaps.iter().map(|d| 1.0 / (d * d)).collect();
    terms
        .windows(2)
        .zip(g.windows(2))
        .all(|(t, g)| t[1] * g[0] <= factor * g[1] * t[0])
}

//! End-to-end drivers producing [`Check`] records for a block matrix.

use crate::basis::{bari_sum, projection_decay, riesz_check, BariReport, BasisReport, DecayReport, FRAME_TOL};
use crate::block::{BlockOperatorMatrix, RelativeBound};
use crate::enclosure::{
    dist_bound, distinct, eigenvalue_window, exclusion_range, exclusion_window, gap_pairs, inclusion_range,
    resolvent_interval, second_order_spectrum, soq_enclosure, subspace_dim_check, variational_bounds,
};
use crate::error::{Error, Result};
use crate::linalg::{dist_to_set, CMatrix, Interval};
use crate::report::{anchors, Check, Outcome};
use crate::subspace::{angular_operator, delta_condition, graph_test, spectral_subspace};

/// Margin by which certified resolvent intervals must avoid `σ(M)`.
pub const RESOLVENT_MARGIN: f64 = 1e-9;

/// Explicit `(a, b)` if given, otherwise the scanned pair.
pub fn relative_bound_or_scan(m: &BlockOperatorMatrix, rb: Option<RelativeBound>) -> Result<RelativeBound> {
    match rb {
        Some(rb) => Ok(rb),
        None => m.scan_relative_bound(),
    }
}

/// Check that `rb` is a valid relative bound for `m`.
pub fn relative_bound_check(m: &BlockOperatorMatrix, rb: RelativeBound) -> Result<Check> {
    let margin = m.relative_bound_margin(rb)?;
    let minimal = m.minimal_b_for_a(rb.a)?;
    let tol = m.tol();
    Ok(Check::new("relative-bound", "relative bound", anchors::RELATIVE_BOUND)
        .input("a", rb.a)
        .input("b", rb.b)
        .output("min_eig_aA_plus_b_minus_BBstar", margin)
        .output("minimal_b", minimal.bound.b)
        .tol(tol)
        .passed(margin >= -tol))
}

/// Distance bound, inclusion/exclusion windows, certified gaps, variational
/// bounds and dimension counts.
pub fn enclose_checks(m: &BlockOperatorMatrix, rb: RelativeBound) -> Result<Vec<Check>> {
    let spec_a = m.spec_a()?.to_vec();
    let spec_c = m.spec_c()?.to_vec();
    let spec_m = m.spec_m()?.to_vec();
    let c = m.c_max()?;
    let tol = m.tol();
    let mut checks = vec![relative_bound_check(m, rb)?];

    for (i, &lambda) in spec_m.iter().enumerate().filter(|(_, &l)| l > c + tol) {
        let base = Check::new("dist-bound", format!("distance bound λ[{i}]"), anchors::DIST_BOUND)
            .input("lambda", lambda)
            .tol(tol);
        checks.push(match dist_bound(lambda, &spec_a, &spec_c, rb) {
            Ok(r) => base
                .output("dist_to_A", r.dist_to_a)
                .output("dist_to_C", r.dist_to_c)
                .output("bound", r.bound)
                .output("slack", r.slack())
                .passed(r.satisfied),
            Err(Error::Hypothesis(msg)) => base.not_applicable(msg),
            Err(e) => return Err(e),
        });
    }

    let mus = distinct(&spec_a, tol);
    for (idx, &mu) in mus.iter().enumerate() {
        let range = inclusion_range(&mus, idx, c, rb.a);
        let base = Check::new("inclusion", format!("inclusion window μ = {mu}"), anchors::INCLUSION)
            .input("mu", mu)
            .input("applies_to", range)
            .tol(tol);
        checks.push(match eigenvalue_window(mu, c, rb) {
            Ok(w) => {
                let inside: Vec<f64> = spec_m.iter().copied().filter(|&l| range.contains(l)).collect();
                let ok = inside.iter().all(|&l| l >= w.lo - tol && l <= w.hi + tol);
                base.output("alpha_minus", w.lo)
                    .output("alpha_plus", w.hi)
                    .output("eigenvalues_in_range", inside)
                    .passed(ok)
            }
            Err(Error::Hypothesis(msg)) => base.not_applicable(msg),
            Err(e) => return Err(e),
        });

        let range = exclusion_range(&mus, idx, c, rb.a);
        let base = Check::new("exclusion", format!("exclusion window μ = {mu}"), anchors::EXCLUSION)
            .input("mu", mu)
            .input("applies_to", range)
            .tol(tol);
        let w = exclusion_window(mu, c, rb);
        checks.push(if w.hypothesis_ok {
            let inside: Vec<f64> = spec_m.iter().copied().filter(|&l| range.contains(l)).collect();
            let ok = inside.iter().all(|&l| l <= w.lo + tol || l >= w.hi - tol);
            base.output("beta_minus", w.lo)
                .output("beta_plus", w.hi)
                .output("eigenvalues_in_range", inside)
                .passed(ok)
        } else {
            base.not_applicable(w.reason.unwrap_or_default())
        });
    }

    for pair in mus.windows(2) {
        let w = resolvent_interval(pair[0], pair[1], c, rb);
        let base = Check::new("resolvent", format!("resolvent interval ({}, {})", pair[0], pair[1]), anchors::RESOLVENT)
            .input("mu1", pair[0])
            .input("mu2", pair[1])
            .tol(RESOLVENT_MARGIN);
        checks.push(if w.hypothesis_ok {
            let hits: Vec<f64> = spec_m
                .iter()
                .copied()
                .filter(|&l| l > w.lo + RESOLVENT_MARGIN && l < w.hi - RESOLVENT_MARGIN)
                .collect();
            base.output("alpha1_plus", w.lo)
                .output("beta2_plus", w.hi)
                .output("eigenvalues_inside", hits.clone())
                .passed(hits.is_empty())
        } else {
            base.not_applicable(w.reason.unwrap_or_default())
        });
    }

    match m.landmarks() {
        Ok(lm) => {
            let bounds = variational_bounds(&spec_a, c, rb, lm.kappa);
            for (n, (lambda, iv)) in lm.lambda_above_c.iter().zip(&bounds).enumerate() {
                let ok = *lambda >= iv.lo - tol && *lambda <= iv.hi + tol;
                checks.push(
                    Check::new("variational", format!("variational bound n = {}", n + 1), anchors::VARIATIONAL)
                        .input("kappa", lm.kappa)
                        .input("mu", iv.lo)
                        .output("lambda", *lambda)
                        .output("upper", iv.hi)
                        .tol(tol)
                        .passed(ok),
                );
            }
        }
        Err(Error::EmptyLandmarks { c }) => checks.push(
            Check::new("variational", "variational bounds", anchors::VARIATIONAL)
                .input("c", c)
                .not_applicable("no eigenvalue of M above c"),
        ),
        Err(e) => return Err(e),
    }

    for gp in gap_pairs(&spec_a, c, rb) {
        let (in_m, in_a) = subspace_dim_check(m, gp.beta2p, gp.alpha3p)?;
        checks.push(
            Check::new("dimension", format!("dimension count [{}, {}]", gp.beta2p, gp.alpha3p), anchors::DIMENSION)
                .input("mus", gp.mus.to_vec())
                .input("beta2_plus", gp.beta2p)
                .input("alpha3_plus", gp.alpha3p)
                .output("count_M", in_m)
                .output("count_A", in_a)
                .passed(in_m == in_a),
        );
    }
    Ok(checks)
}

/// Spectral subspace above `α` (default `c̃`, i.e. the window `(c, ∞)`),
/// graph property, angular operator, `δ` condition and frame bounds.
pub fn angular_checks(m: &BlockOperatorMatrix, alpha: Option<f64>, rb: RelativeBound) -> Result<Vec<Check>> {
    let c = m.c_max()?;
    let landmarks = match m.landmarks() {
        Ok(lm) => Some(lm),
        Err(Error::EmptyLandmarks { .. }) => None,
        Err(e) => return Err(e),
    };
    let at_c = alpha.is_none();
    let alpha = match (alpha, &landmarks) {
        (Some(a), _) => a,
        (None, Some(lm)) => lm.c_tilde,
        (None, None) => {
            return Ok(vec![Check::new("angular", "angular operator at c", anchors::GRAPH)
                .input("c", c)
                .not_applicable("no eigenvalue of M above c")])
        }
    };
    let mut checks = Vec::new();
    let sub = match spectral_subspace(m, alpha) {
        Ok(s) => s,
        Err(Error::Boundary { alpha, distance }) => {
            return Ok(vec![Check::new("angular", "spectral subspace", anchors::GRAPH)
                .input("alpha", alpha)
                .output("distance_to_spectrum", distance)
                .not_applicable("α lies in σ(M)")])
        }
        Err(e) => return Err(e),
    };
    let gt = graph_test(&sub)?;
    let graph = Check::new("angular", "graph subspace", anchors::GRAPH)
        .input("alpha", alpha)
        .input("c", c)
        .output("dim", sub.dim())
        .output("sigma_min_U", gt.sigma_min)
        .output("verdict", gt.verdict.as_str());
    checks.push(if alpha > c {
        graph.passed(gt.is_graph())
    } else {
        graph.not_applicable("α ≤ c")
    });

    let k = match angular_operator(&sub) {
        Ok(k) => k,
        Err(Error::NotAGraph { sigma_min }) => {
            checks.push(
                Check::new("angular", "angular operator", anchors::GRAPH)
                    .output("sigma_min_U", sigma_min)
                    .not_applicable("subspace is not a graph"),
            );
            return Ok(checks);
        }
        Err(e) => return Err(e),
    };
    let defect = (&sub.second - &k.k.matmul(&sub.first)?).max_abs();
    checks.push(
        Check::new("angular", "angular operator", anchors::GRAPH)
            .input("alpha", alpha)
            .output("norm_K", k.norm)
            .output("codim", k.codim)
            .output("graph_defect", defect)
            .tol(1e-8)
            .passed(defect <= 1e-8),
    );
    if let (true, Some(lm)) = (at_c, &landmarks) {
        checks.push(
            Check::new("angular", "codimension", anchors::CODIM)
                .input("c_tilde", lm.c_tilde)
                .output("kappa", lm.kappa)
                .output("codim", k.codim)
                .passed(k.codim == lm.kappa),
        );
    }

    let spec_a = m.spec_a()?;
    let base = Check::new("angular", "delta condition", anchors::DELTA)
        .input("alpha", alpha)
        .input("a", rb.a)
        .input("b", rb.b);
    checks.push(match delta_condition(alpha, c, spec_a, rb) {
        Ok(d) if d < 0.5 => base.output("delta", d).output("graph", gt.is_graph()).passed(gt.is_graph()),
        Ok(d) => base.output("delta", d).not_applicable("δ ≥ 1/2"),
        Err(Error::Hypothesis(msg)) => base.not_applicable(msg),
        Err(e) => return Err(e),
    });

    if alpha > c {
        let r = riesz_check(m, &sub, &k)?;
        checks.push(riesz_record(&r, alpha));
    }
    Ok(checks)
}

pub fn riesz_record(r: &BasisReport, alpha: f64) -> Check {
    Check::new("riesz", "frame bounds", anchors::RIESZ)
        .input("alpha", alpha)
        .output("gram_min", r.gram_min)
        .output("gram_max", r.gram_max)
        .output("norm_K", r.k_norm)
        .output("riesz_lower", r.riesz_lower)
        .tol(FRAME_TOL)
        .passed(r.pass)
}

/// Frame bounds at `(c, ∞)`, projection decay and Bari terms for the first
/// `n_max` eigenvalues above `c`.
pub fn basis_checks(m: &BlockOperatorMatrix, rb: RelativeBound, n_max: usize) -> Result<Vec<Check>> {
    let lm = match m.landmarks() {
        Ok(lm) => lm,
        Err(Error::EmptyLandmarks { c }) => {
            return Ok(vec![Check::new("riesz", "frame bounds", anchors::RIESZ)
                .input("c", c)
                .not_applicable("no eigenvalue of M above c")])
        }
        Err(e) => return Err(e),
    };
    let mut checks = Vec::new();
    let sub = spectral_subspace(m, lm.c_tilde)?;
    let k = angular_operator(&sub)?;
    checks.push(riesz_record(&riesz_check(m, &sub, &k)?, lm.c_tilde));

    let n = n_max.min(lm.lambda_above_c.len()).min(m.n1().saturating_sub(lm.kappa));
    if n == 0 {
        return Ok(checks);
    }
    let decay = projection_decay(m, &lm, rb, n)?;
    let bari = bari_sum(m, &lm, n)?;
    checks.extend(decay_checks(&decay, &bari, crate::tolerance::scaled(m.dim(), 1.0)));
    Ok(checks)
}

/// Per-index decay bound and Bari term checks plus the partial-sum record.
/// `tol` is absolute: every compared quantity is dimensionless.
pub fn decay_checks(decay: &DecayReport, bari: &BariReport, tol: f64) -> Vec<Check> {
    let mut checks = Vec::new();
    for (rec, &term) in decay.records.iter().zip(&bari.terms) {
        let base = Check::new("decay", format!("projection decay n = {}", rec.n), anchors::DECAY)
            .input("lambda", rec.lambda)
            .input("mu", rec.mu)
            .output("gamma", rec.gamma)
            .output("delta", rec.delta)
            .output("delta_refined", rec.delta_refined)
            .output("dist_circle_to_A", rec.dist_circle_to_a)
            .output("proj_diff_norm", rec.proj_diff_norm)
            .output("isolated", rec.isolated)
            .tol(tol);
        let base = match rec.bound {
            Some(b) => base.output("bound", b),
            None => base,
        };
        checks.push(match rec.bound_respected(tol) {
            Some(ok) => base.passed(ok),
            None if rec.bound.is_none() => base.not_applicable("δ_n ≥ 1"),
            None => base.not_applicable("μ_{κ+n} is not isolated inside Γ_n"),
        });
        // ‖y − x‖ ≤ 2‖(I − E)x‖ = 2‖(F_n − E)x‖ ≤ 2‖F_n − E‖ for unit x.
        let limit = 4.0 * rec.proj_diff_norm * rec.proj_diff_norm;
        checks.push(
            Check::new("bari", format!("Bari term n = {}", rec.n), anchors::BARI)
                .output("term", term)
                .output("four_proj_diff_sq", limit)
                .tol(tol)
                .passed(term <= limit + tol),
        );
    }
    let monotone = bari.partial_sums.windows(2).all(|w| w[1] >= w[0]);
    checks.push(
        Check::new("bari", "Bari partial sums", anchors::BARI)
            .output("partial_sums", bari.partial_sums.clone())
            .output("gap_sums", bari.gap_sums.clone())
            .output("converged", bari.converged)
            .output("m_empirical", decay.m_empirical)
            .passed(monotone),
    );
    checks
}

/// First `k` vectors of the decoupled eigenbasis: eigenvectors of `A` as
/// `(y, 0)` in ascending order, then eigenvectors of `C` as `(0, w)`.
pub fn decoupled_trial_space(m: &BlockOperatorMatrix, k: usize) -> Result<CMatrix> {
    let (n1, n2) = (m.n1(), m.n2());
    if k > n1 + n2 {
        return Err(Error::Precondition(format!("trial dimension {k} exceeds {}", n1 + n2)));
    }
    let ea = m.eig_a()?;
    let ec = m.eig_c()?;
    let mut q = CMatrix::zeros(n1 + n2, k);
    for j in 0..k {
        if j < n1 {
            for i in 0..n1 {
                q[(i, j)] = ea.eigenvectors[(i, j)];
            }
        } else {
            for i in 0..n2 {
                q[(n1 + i, j)] = ec.eigenvectors[(i, j - n1)];
            }
        }
    }
    Ok(q)
}

/// Second-order relative spectrum on the decoupled trial space: for every
/// pair of certified gaps enclosing exactly one eigenvalue of `A`, each
/// admitted point must enclose the single eigenvalue of `M` between them.
pub fn soq_checks(m: &BlockOperatorMatrix, rb: RelativeBound, trial_dim: usize) -> Result<Vec<Check>> {
    let q = decoupled_trial_space(m, trial_dim)?;
    let spec_m = m.spec_m()?.to_vec();
    let spec_a = m.spec_a()?.to_vec();
    let c = m.c_max()?;
    let tol = m.tol();
    let zs = second_order_spectrum(m.assemble().matrix(), &q)?;
    let (re, im): (Vec<f64>, Vec<f64>) = zs.iter().map(|z| (z.re, z.im)).unzip();
    let points = Check::new("soq", "second-order spectrum", anchors::SOQ)
        .input("trial_dim", trial_dim)
        .output("re", re)
        .output("im", im);
    let mut checks = vec![if trial_dim == m.dim() {
        // A double root of the quadratic pencil is only resolved to about √ε.
        let ptol = 1e-6 * m.assemble().matrix().max_abs().max(1.0);
        let worst = zs
            .iter()
            .map(|z| z.im.abs().max(dist_to_set(z.re, &spec_m)))
            .fold(0.0, f64::max);
        points
            .output("max_distance_to_spectrum", worst)
            .tol(ptol)
            .passed(zs.len() == trial_dim && worst <= ptol)
    } else {
        points.not_applicable("proper trial subspace; points listed for reference")
    }];
    let pairs = gap_pairs(&spec_a, c, rb);
    if pairs.is_empty() {
        checks.push(
            Check::new("soq", "second-order enclosure", anchors::SOQ)
                .input("trial_dim", trial_dim)
                .not_applicable("fewer than two certified gaps"),
        );
    }
    for gp in pairs {
        let (in_m, in_a) = subspace_dim_check(m, gp.beta2p, gp.alpha3p)?;
        let name = format!("second-order enclosure [{}, {}]", gp.beta2p, gp.alpha3p);
        let base = Check::new("soq", name.clone(), anchors::SOQ)
            .input("trial_dim", trial_dim)
            .input("alpha1_plus", gp.alpha1p)
            .input("beta2_plus", gp.beta2p)
            .input("alpha3_plus", gp.alpha3p)
            .input("beta4_minus", gp.beta4m)
            .input("beta4_plus", gp.beta4p)
            .tol(tol);
        if in_a != 1 || in_m != 1 {
            checks.push(base.output("count_A", in_a).output("count_M", in_m).not_applicable("[β₂⁺, α₃⁺] does not hold exactly one eigenvalue"));
            continue;
        }
        let target = spec_m
            .iter()
            .copied()
            .find(|&l| gp.middle().contains(l))
            .expect("count is one");
        let encl = soq_enclosure(m, &q, gp.alpha1p, gp.beta4m, gp.beta4p)?;
        let admitted: Vec<_> = encl.iter().filter(|e| e.admitted).collect();
        if admitted.is_empty() {
            checks.push(base.output("target", target).not_applicable("no admitted point"));
            continue;
        }
        for (j, e) in admitted.iter().enumerate() {
            let iv = e.interval.expect("admitted");
            let widened = Interval::closed(iv.lo - tol, iv.hi + tol);
            let hits: Vec<f64> = spec_m.iter().copied().filter(|&l| widened.contains(l)).collect();
            checks.push(
                Check::new("soq", format!("{name} point {j}"), anchors::SOQ)
                    .input("alpha1_plus", gp.alpha1p)
                    .input("beta4_minus", gp.beta4m)
                    .input("beta4_plus", gp.beta4p)
                    .output("z", e.z)
                    .output("interval", iv)
                    .output("target", target)
                    .output("eigenvalues_in_interval", hits.clone())
                    .tol(tol)
                    .passed(widened.contains(target) && !hits.is_empty()),
            );
        }
    }
    Ok(checks)
}

/// `Fail` dominates, then `Pass`; an empty list is `NotApplicable`.
pub fn overall(checks: &[Check]) -> Outcome {
    if checks.iter().any(|c| c.outcome == Outcome::Fail) {
        Outcome::Fail
    } else if checks.iter().any(|c| c.outcome == Outcome::Pass) {
        Outcome::Pass
    } else {
        Outcome::NotApplicable
    }
}

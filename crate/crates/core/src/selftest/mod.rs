//! Property suite over built-in fixtures and seeded random instances.
//! Output depends only on the seed.

use crate::block::{BlockOperatorMatrix, RelativeBound};
use crate::enclosure::{eigenvalue_window, exclusion_window};
use crate::error::Result;
use crate::fixtures::{m3, random_instance, random_relative_bound, rng, separated_instance, FixtureRng};
use crate::mhd::{constants, discretize, run_report, BandVariant, PlasmaProfile};
use crate::pipeline::{angular_checks, basis_checks, enclose_checks, soq_checks};
use crate::report::{anchors, Check, Outcome, Tally};
use crate::subspace::{angular_operator, delta_condition, spectral_subspace};
use rand::Rng;

mod invariants;

pub const DEFAULT_SEED: u64 = 20240601;

/// Eigenvalues of `M3` from its characteristic polynomial
/// `λ³ − 11λ² + 6λ + 32`.
pub const M3_EIGENVALUES: [f64; 3] = [-1.3834072093172122519, 2.292229445408130367, 10.091177763909081885];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SelftestConfig {
    pub seed: u64,
    pub enclose_instances: usize,
    pub separated_instances: usize,
    pub angular_instances: usize,
    pub basis_instances: usize,
    pub soq_instances: usize,
    pub eigensolver_instances: usize,
    pub schur_instances: usize,
    /// Grid points per instance for the converse Schur scan.
    pub schur_grid: usize,
    pub resolvent_instances: usize,
    pub compact_instances: usize,
    pub extension_instances: usize,
    pub shifted_instances: usize,
    pub alignment_instances: usize,
    /// Test hook: perturb the `M3` fixture so its oracle checks fail.
    pub corrupt_fixture: bool,
}

impl SelftestConfig {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            enclose_instances: 60,
            separated_instances: 20,
            angular_instances: 40,
            basis_instances: 10,
            soq_instances: 10,
            eigensolver_instances: 40,
            schur_instances: 30,
            schur_grid: 200,
            resolvent_instances: 60,
            compact_instances: 30,
            extension_instances: 40,
            shifted_instances: 40,
            alignment_instances: 10,
            corrupt_fixture: false,
        }
    }
}

pub fn run_selftest(cfg: &SelftestConfig) -> Result<Vec<Check>> {
    let mut out = m3_checks(cfg.corrupt_fixture)?;
    let mut r = rng(cfg.seed);

    let mut per = Vec::new();
    for _ in 0..cfg.enclose_instances {
        let m = random_instance(&mut r, 8, 8, 10.0);
        let rb = random_relative_bound(&mut r, &m, 2.0)?;
        per.push(guard(enclose_checks(&m, rb)));
    }
    out.push(suite("enclosure suite", "random instances", anchors::DIST_BOUND, per));

    let mut per = Vec::new();
    for _ in 0..cfg.separated_instances {
        let (m, rb) = separated_instance(&mut r)?;
        per.push(guard(enclose_checks(&m, rb)).into_iter().filter(|c| c.family == "dimension").collect());
    }
    out.push(suite("dimension suite", "separated instances", anchors::DIMENSION, per));

    let mut per = Vec::new();
    for _ in 0..cfg.angular_instances {
        let m = random_instance(&mut r, 8, 8, 10.0);
        let rb = random_relative_bound(&mut r, &m, 2.0)?;
        per.push(guard(angular_checks(&m, None, rb)));
    }
    out.push(suite("angular suite", "random instances", anchors::GRAPH, per));

    let mut per = Vec::new();
    for _ in 0..cfg.basis_instances {
        let (m, rb) = separated_instance(&mut r)?;
        per.push(guard(basis_checks(&m, rb, 3)));
    }
    out.push(suite("basis suite", "separated instances", anchors::RIESZ, per));

    let mut per = Vec::new();
    for _ in 0..cfg.soq_instances {
        let (m, rb) = separated_instance(&mut r)?;
        let k = r.gen_range(1..=m.dim());
        per.push(guard(soq_checks(&m, rb, k)));
    }
    out.push(suite("second-order suite", "separated instances", anchors::SOQ, per));

    out.push(invariants::eigensolver(&mut r, cfg.eigensolver_instances)?);
    out.push(invariants::schur_spectrum(&mut r, cfg.schur_instances, cfg.schur_grid)?);
    out.extend(invariants::resolvent_and_witness(&mut r, cfg.resolvent_instances)?);
    out.push(invariants::compact_resolvent(&mut r, cfg.compact_instances)?);
    out.push(invariants::extension(&mut r, cfg.extension_instances)?);
    out.push(invariants::shifted_family(&mut r, cfg.shifted_instances)?);
    out.push(invariants::alignment(&mut r, cfg.alignment_instances)?);
    out.push(monotone_in_b(&mut r)?);
    out.extend(degenerate_checks(&mut r)?);
    out.extend(mhd_checks()?);
    Ok(out)
}

fn guard(r: Result<Vec<Check>>) -> Vec<Check> {
    r.unwrap_or_else(|e| {
        vec![Check::new("error", "pipeline error", "")
            .note(e.to_string())
            .outcome(Outcome::Fail)]
    })
}

fn suite(name: &str, what: &str, anchor: &str, per_instance: Vec<Vec<Check>>) -> Check {
    let instances = per_instance.len();
    let all: Vec<Check> = per_instance.into_iter().flatten().collect();
    let t = Tally::of(&all);
    let failures: Vec<String> = all
        .iter()
        .filter(|c| c.outcome == Outcome::Fail)
        .take(5)
        .map(|c| c.name.clone())
        .collect();
    let check = Check::new("selftest", name, anchor)
        .input("instances", instances)
        .input("kind", what)
        .output("pass", t.pass)
        .output("fail", t.fail)
        .output("not_applicable", t.not_applicable)
        .passed(t.fail == 0);
    if failures.is_empty() {
        check
    } else {
        check.note(failures.join("; "))
    }
}

fn m3_checks(corrupt: bool) -> Result<Vec<Check>> {
    let m = if corrupt {
        m3().with_a(crate::linalg::HermitianMatrix::from_real_diag(&[2.5, 10.0]))?
    } else {
        m3()
    };
    let mut out = Vec::new();
    let spec = m.spec_m()?.to_vec();
    let err = spec
        .iter()
        .zip(M3_EIGENVALUES)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);
    out.push(
        Check::new("fixture", "M3 eigenvalues", anchors::SPECTRAL)
            .output("eigenvalues", spec)
            .output("max_error", err)
            .tol(1e-9)
            .passed(err <= 1e-9),
    );
    let c = m.c_max()?;
    let b_min = m.minimal_b_for_a(0.0)?.bound.b;
    let lm = m.landmarks()?;
    let sub = spectral_subspace(&m, lm.c_tilde)?;
    let k = angular_operator(&sub)?;
    let delta = delta_condition(6.0, c, m.spec_a()?, RelativeBound { a: 0.0, b: 2.0 })?;
    let tol = 1e-6;
    out.push(
        Check::new("fixture", "M3 landmarks", anchors::LANDMARKS)
            .output("c", c)
            .output("b_min", b_min)
            .output("c_tilde", lm.c_tilde)
            .output("kappa", lm.kappa)
            .output("codim", k.codim)
            .output("delta_at_6", delta)
            .tol(tol)
            .passed(
                (c + 1.0).abs() <= tol
                    && (b_min - 2.0).abs() <= tol
                    && (lm.c_tilde - 0.646_114_722_704_065_2).abs() <= tol
                    && lm.kappa == 0
                    && k.codim == 0
                    && (delta - 1.0 / 14.0).abs() <= tol,
            ),
    );
    Ok(out)
}

/// Enlarging `b` at fixed `a` never shrinks an inclusion window.
fn monotone_in_b(r: &mut FixtureRng) -> Result<Check> {
    let mut worst = f64::INFINITY;
    let mut count = 0usize;
    for _ in 0..200 {
        let c = r.gen_range(-10.0..0.0);
        let mu = c + r.gen_range(0.1..20.0);
        let a = r.gen_range(0.0..2.0);
        let b = r.gen_range(0.0..10.0);
        let db = r.gen_range(0.0..5.0);
        let (Ok(w0), Ok(w1)) = (
            eigenvalue_window(mu, c, RelativeBound { a, b }),
            eigenvalue_window(mu, c, RelativeBound { a, b: b + db }),
        ) else {
            continue;
        };
        count += 1;
        worst = worst.min((w0.lo - w1.lo).min(w1.hi - w0.hi));
    }
    Ok(Check::new("selftest", "inclusion windows grow with b", anchors::INCLUSION)
        .input("samples", count)
        .output("min_growth", worst)
        .passed(worst >= 0.0))
}

/// `a = b = 0` windows: inclusion `[c, μ]`, exclusion `(c, μ)`; with `B = 0`
/// every eigenvalue of `A` above `c` is an eigenvalue of `M`.
fn degenerate_checks(r: &mut FixtureRng) -> Result<Vec<Check>> {
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let c = r.gen_range(-10.0..5.0);
        let mu = c + r.gen_range(0.01..20.0);
        let w = eigenvalue_window(mu, c, RelativeBound::ZERO)?;
        let e = exclusion_window(mu, c, RelativeBound::ZERO);
        worst = worst
            .max((w.lo - c).abs())
            .max((w.hi - mu).abs())
            .max((e.lo - c).abs())
            .max((e.hi - mu).abs());
    }
    let mut out = vec![Check::new("selftest", "degenerate windows", anchors::INCLUSION)
        .output("max_error", worst)
        .tol(1e-12)
        .passed(worst <= 1e-12)];

    let m = random_instance(r, 6, 6, 10.0);
    let decoupled: BlockOperatorMatrix = m.decoupled();
    let checks = enclose_checks(&decoupled, RelativeBound::ZERO)?;
    out.push(suite("decoupled enclosures", "B = 0", anchors::DIST_BOUND, vec![checks]));
    let union_ok = {
        let d = &decoupled;
        let mut expect: Vec<f64> = d.spec_a()?.iter().chain(d.spec_c()?).copied().collect();
        expect.sort_by(f64::total_cmp);
        d.spec_m()?.iter().zip(&expect).all(|(x, y)| (x - y).abs() <= 1e-9 * y.abs().max(1.0))
    };
    out.push(
        Check::new("selftest", "decoupled spectrum", anchors::SPECTRAL)
            .output("union", union_ok)
            .passed(union_ok),
    );
    Ok(out)
}

fn mhd_checks() -> Result<Vec<Check>> {
    let p = PlasmaProfile::constant();
    let k = constants(&p)?;
    let ok = (k.c - (2.0 + 2f64.sqrt())).abs() <= 1e-12 && (k.a - 2.5).abs() <= 1e-12 && k.b.abs() <= 1e-12;
    let mut out = vec![Check::new("mhd", "constant profile constants", anchors::MHD_CONSTANTS)
        .output("a", k.a)
        .output("b", k.b)
        .output("c", k.c)
        .tol(1e-12)
        .passed(ok)];

    let d = discretize(&p, 32)?;
    let herm = d.block.assemble().matrix().hermitian_defect();
    out.push(
        Check::new("mhd", "assembled matrix is Hermitian", anchors::SPECTRAL)
            .output("defect", herm)
            .tol(1e-12)
            .passed(herm <= 1e-12),
    );

    let report = run_report(&p, 16, 4, BandVariant::Squared)?;
    out.push(suite("mhd report", "constant profile, N = 16", anchors::MHD_CONSTANTS, vec![report.checks]));
    Ok(out)
}

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::Value as Json;
use sha2::{Digest, Sha256};
use specblock::linalg::Interval;
use specblock::mhd::{constants, discretize, run_report, BandVariant, PlasmaProfile};
use specblock::pipeline::{angular_checks, basis_checks, enclose_checks, relative_bound_or_scan, soq_checks};
use specblock::selftest::{run_selftest, SelftestConfig, DEFAULT_SEED};
use specblock::{BlockOperatorMatrix, Check, RelativeBound, Value};

mod output;
mod problem;

use output::{real, Report};
use problem::{Problem, Source};

/// Spectral enclosures, invariant subspaces and basis diagnostics for
/// self-adjoint 2×2 block matrices.
#[derive(Parser)]
#[command(name = "specblock", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Distance bound, inclusion/exclusion windows, certified gaps, variational bounds.
    Enclose(Common),
    /// Spectral subspace above α as a graph, angular operator, δ condition.
    Angular(Common),
    /// Frame bounds, projection decay and Bari sums.
    Basis(Common),
    /// Second-order relative spectrum enclosures.
    Soq(Common),
    /// Full pipeline for a discretized plasma profile (constant profile by default).
    Mhd(Common),
    /// Property suite over built-in fixtures and seeded random instances.
    Selftest(Common),
}

#[derive(Args, Clone)]
struct Common {
    /// Problem file (JSON).
    #[arg(long)]
    input: Option<PathBuf>,
    /// Spectral parameter for `angular`.
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<f64>,
    /// Number of eigenvalues above c for `basis` and `mhd`.
    #[arg(long)]
    n_max: Option<usize>,
    /// Interior grid points for plasma profiles.
    #[arg(long)]
    n: Option<usize>,
    /// Trial subspace dimension for `soq`.
    #[arg(long)]
    subspace_dim: Option<usize>,
    /// Seed for `selftest`.
    #[arg(long)]
    seed: Option<u64>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write one CSV table per check family into this directory.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Essential band variant: `squared` or `literal`.
    #[arg(long)]
    bands: Option<String>,
    #[arg(long, hide = true)]
    corrupt_fixture: bool,
}

const DEFAULT_N: usize = 64;
const DEFAULT_N_MAX: usize = 8;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (name, opts) = match &cli.command {
        Command::Enclose(o) => ("enclose", o),
        Command::Angular(o) => ("angular", o),
        Command::Basis(o) => ("basis", o),
        Command::Soq(o) => ("soq", o),
        Command::Mhd(o) => ("mhd", o),
        Command::Selftest(o) => ("selftest", o),
    };
    let report = match run(name, opts) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    if let Err(e) = emit(&report, opts) {
        eprintln!("error: {e:#}");
        return ExitCode::from(2);
    }
    let t = report.tally();
    eprintln!("{name}: {} pass, {} fail, {} not applicable", t.pass, t.fail, t.not_applicable);
    if t.fail > 0 {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    }
}

fn emit(report: &Report, opts: &Common) -> Result<()> {
    let text = report.to_pretty();
    match &opts.out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{text}"),
    }
    if let Some(dir) = &opts.csv {
        report.write_csv(dir)?;
    }
    Ok(())
}

fn run(name: &'static str, opts: &Common) -> Result<Report> {
    if name == "selftest" {
        return selftest(opts);
    }
    let problem = match &opts.input {
        Some(path) => Some(problem::load(path)?),
        None if name == "mhd" => None,
        None => bail!("--input is required for '{name}'"),
    };
    let bands = match (&opts.bands, problem.as_ref().and_then(|p| p.bands)) {
        (Some(s), _) => problem::parse_bands(s)?,
        (None, Some(b)) => b,
        (None, None) => BandVariant::Squared,
    };
    let n = opts.n.unwrap_or(DEFAULT_N);
    let n_max = opts.n_max.or(problem.as_ref().and_then(|p| p.n_max));
    let mut params: Vec<(&'static str, Json)> = vec![("base_tolerance", real(specblock::tolerance::base()))];

    if name == "mhd" {
        let (profile, digest) = match problem {
            Some(Problem { source: Source::Mhd(p), digest, .. }) => (p, digest),
            Some(_) => bail!("'mhd' needs a problem file with an 'mhd' profile"),
            None => (PlasmaProfile::constant(), builtin_digest("constant profile")),
        };
        let n_max = n_max.unwrap_or(DEFAULT_N_MAX);
        let r = run_report(&profile, n, n_max, bands)?;
        params.extend([
            ("n", Json::from(n)),
            ("n_max", Json::from(n_max)),
            ("bands", Json::from(bands.as_str())),
            ("a", real(r.constants.a)),
            ("b", real(r.constants.b)),
            ("c", real(r.constants.c)),
            ("discrete_c", real(r.discrete_c)),
            ("rb_used", rb_json(r.rb_used)),
            ("essential_bands", output::value_json(&Value::Intervals(r.bands.to_vec()))),
        ]);
        return Ok(Report {
            command: name,
            input_digest: digest,
            parameters: params,
            checks: r.checks,
        });
    }

    let problem = problem.expect("checked above");
    let (m, rb) = instance(&problem, n, &mut params)?;
    params.push(("rb", rb_json(rb)));
    params.push(("dim", Json::from(m.dim())));
    let checks = match name {
        "enclose" => {
            let checks = enclose_checks(&m, rb)?;
            match problem.window {
                Some(w) => {
                    params.push(("window", output::value_json(&Value::Interval(w))));
                    restrict(checks, &w)
                }
                None => checks,
            }
        }
        "angular" => {
            let alpha = opts.alpha.or(problem.alpha);
            if let Some(a) = alpha {
                params.push(("alpha", real(a)));
            }
            angular_checks(&m, alpha, rb)?
        }
        "basis" => {
            let n_max = n_max.unwrap_or(DEFAULT_N_MAX);
            params.push(("n_max", Json::from(n_max)));
            basis_checks(&m, rb, n_max)?
        }
        "soq" => {
            let k = opts.subspace_dim.unwrap_or(m.dim());
            if k == 0 || k > m.dim() {
                bail!("--subspace-dim must lie in 1..={}", m.dim());
            }
            params.push(("subspace_dim", Json::from(k)));
            soq_checks(&m, rb, k)?
        }
        other => unreachable!("command {other}"),
    };
    Ok(Report {
        command: name,
        input_digest: problem.digest,
        parameters: params,
        checks,
    })
}

/// The block matrix and relative bound a problem describes. Profiles are
/// discretized with `n` points; their bound keeps the continuum `a` and
/// raises `b` to what the discrete blocks need.
fn instance(p: &Problem, n: usize, params: &mut Vec<(&'static str, Json)>) -> Result<(BlockOperatorMatrix, RelativeBound)> {
    match &p.source {
        Source::Blocks(m) => Ok((m.clone(), relative_bound_or_scan(m, p.rb)?)),
        Source::Mhd(profile) => {
            let d = discretize(profile, n)?;
            params.push(("n", Json::from(n)));
            let rb = match p.rb {
                Some(rb) => rb,
                None => {
                    let k = constants(profile)?;
                    let b = d.block.minimal_b_for_a(k.a)?.bound.b;
                    RelativeBound::new(k.a, k.b.max(b))?
                }
            };
            Ok((d.block, rb))
        }
    }
}

/// Drop eigenvalue checks whose `lambda` or `mu` lies outside `w`.
fn restrict(checks: Vec<Check>, w: &Interval) -> Vec<Check> {
    checks
        .into_iter()
        .filter(|c| {
            c.inputs
                .iter()
                .filter(|(k, _)| k == "lambda" || k == "mu")
                .all(|(_, v)| matches!(v, Value::Real(x) if w.contains(*x)))
        })
        .collect()
}

fn selftest(opts: &Common) -> Result<Report> {
    let seed = opts.seed.unwrap_or(DEFAULT_SEED);
    let mut cfg = SelftestConfig::new(seed);
    cfg.corrupt_fixture = opts.corrupt_fixture;
    let checks = run_selftest(&cfg).map_err(|e| anyhow!(e))?;
    let mut params = vec![("seed", Json::from(seed))];
    if cfg.corrupt_fixture {
        params.push(("corrupt_fixture", Json::from(true)));
    }
    Ok(Report {
        command: "selftest",
        input_digest: builtin_digest(&format!("{cfg:?}")),
        parameters: params,
        checks,
    })
}

fn builtin_digest(what: &str) -> String {
    format!("sha256:{}", hex::encode(Sha256::digest(what.as_bytes())))
}

fn rb_json(rb: RelativeBound) -> Json {
    serde_json::json!({ "a": real(rb.a), "b": real(rb.b) })
}

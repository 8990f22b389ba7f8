//! Problem file loading.
//!
//! ```json
//! { "blocks": { "A": [[[2, 0], [0, 0]], [[0, 0], [10, 0]]], "B": "b.csv", "C": [[-1]] },
//!   "rb": { "a": 0, "b": 2 }, "alpha": 6, "window": [0, 20], "n_max": 3,
//!   "flags": { "bands": "squared" } }
//! ```
//!
//! Matrix entries are `[re, im]` pairs or bare reals; a string is a CSV file
//! path relative to the problem file. Instead of `blocks`, `mhd` holds a
//! plasma profile: `grid_n`, `rho`, `va2`, `vs2`, `kperp`, `kpar` (arrays of
//! length `grid_n`, built-in names or numbers) and `g`.

use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};
use specblock::linalg::{CMatrix, Interval, C64};
use specblock::mhd::{BandVariant, Coefficient, PlasmaProfile};
use specblock::{BlockOperatorMatrix, RelativeBound};

pub enum Source {
    Blocks(BlockOperatorMatrix),
    Mhd(PlasmaProfile),
}

pub struct Problem {
    pub source: Source,
    pub rb: Option<RelativeBound>,
    pub alpha: Option<f64>,
    pub window: Option<Interval>,
    pub n_max: Option<usize>,
    pub bands: Option<BandVariant>,
    /// SHA-256 over the problem file followed by every referenced CSV file.
    pub digest: String,
}

pub fn load(path: &Path) -> Result<Problem> {
    let bytes = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    let json: Value = serde_json::from_slice(&bytes).with_context(|| format!("parsing {}", path.display()))?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    let mut hasher = Sha256::new();
    hasher.update(&bytes);
    let problem = parse(&json, &base, &mut hasher)?;
    Ok(Problem {
        digest: format!("sha256:{}", hex::encode(hasher.finalize())),
        ..problem
    })
}

fn parse(json: &Value, base: &Path, hasher: &mut Sha256) -> Result<Problem> {
    let obj = json.as_object().ok_or_else(|| anyhow!("problem file must be a JSON object"))?;
    known_keys(obj, &["blocks", "mhd", "rb", "alpha", "window", "n_max", "flags"], "problem")?;
    let source = match (obj.get("blocks"), obj.get("mhd")) {
        (Some(b), None) => Source::Blocks(parse_blocks(b, base, hasher).context("in 'blocks'")?),
        (None, Some(p)) => Source::Mhd(parse_profile(p).context("in 'mhd'")?),
        (Some(_), Some(_)) => bail!("exactly one of 'blocks' and 'mhd' may be given"),
        (None, None) => bail!("one of 'blocks' or 'mhd' is required"),
    };
    let rb = match obj.get("rb") {
        None => None,
        Some(v) => {
            let o = v.as_object().ok_or_else(|| anyhow!("'rb' must be an object with 'a' and 'b'"))?;
            known_keys(o, &["a", "b"], "rb")?;
            let a = number(o.get("a"), "rb.a")?;
            let b = number(o.get("b"), "rb.b")?;
            Some(RelativeBound::new(a, b)?)
        }
    };
    let alpha = obj.get("alpha").map(|v| number(Some(v), "alpha")).transpose()?;
    let window = match obj.get("window") {
        None => None,
        Some(v) => {
            let w = v
                .as_array()
                .filter(|w| w.len() == 2)
                .ok_or_else(|| anyhow!("'window' must be [lo, hi]"))?;
            let (lo, hi) = (number(Some(&w[0]), "window[0]")?, number(Some(&w[1]), "window[1]")?);
            if lo > hi {
                bail!("'window' must satisfy lo ≤ hi");
            }
            Some(Interval::closed(lo, hi))
        }
    };
    let n_max = obj.get("n_max").map(|v| count(v, "n_max")).transpose()?;
    let bands = match obj.get("flags") {
        None => None,
        Some(v) => {
            let o = v.as_object().ok_or_else(|| anyhow!("'flags' must be an object"))?;
            known_keys(o, &["bands"], "flags")?;
            o.get("bands")
                .map(|b| b.as_str().ok_or_else(|| anyhow!("flags.bands must be a string")).and_then(parse_bands))
                .transpose()?
        }
    };
    Ok(Problem {
        source,
        rb,
        alpha,
        window,
        n_max,
        bands,
        digest: String::new(),
    })
}

pub fn parse_bands(s: &str) -> Result<BandVariant> {
    match s {
        "squared" => Ok(BandVariant::Squared),
        "literal" => Ok(BandVariant::Literal),
        other => bail!("unknown band variant '{other}' (expected 'squared' or 'literal')"),
    }
}

fn known_keys(obj: &Map<String, Value>, allowed: &[&str], what: &str) -> Result<()> {
    match obj.keys().find(|k| !allowed.contains(&k.as_str())) {
        Some(k) => bail!("unknown key '{k}' in {what} (allowed: {})", allowed.join(", ")),
        None => Ok(()),
    }
}

fn number(v: Option<&Value>, what: &str) -> Result<f64> {
    let x = v
        .ok_or_else(|| anyhow!("'{what}' is missing"))?
        .as_f64()
        .ok_or_else(|| anyhow!("'{what}' must be a number"))?;
    if !x.is_finite() {
        bail!("'{what}' must be finite");
    }
    Ok(x)
}

fn count(v: &Value, what: &str) -> Result<usize> {
    v.as_u64()
        .map(|n| n as usize)
        .ok_or_else(|| anyhow!("'{what}' must be a non-negative integer"))
}

fn parse_blocks(v: &Value, base: &Path, hasher: &mut Sha256) -> Result<BlockOperatorMatrix> {
    let obj = v.as_object().ok_or_else(|| anyhow!("expected an object with A, B, C"))?;
    known_keys(obj, &["A", "B", "C"], "blocks")?;
    let mut get = |name: &str| -> Result<CMatrix> {
        let m = obj.get(name).ok_or_else(|| anyhow!("block '{name}' is missing"))?;
        parse_matrix(m, base, hasher).with_context(|| format!("in block '{name}'"))
    };
    let (a, b, c) = (get("A")?, get("B")?, get("C")?);
    Ok(BlockOperatorMatrix::from_matrices(a, b, c)?)
}

fn parse_matrix(v: &Value, base: &Path, hasher: &mut Sha256) -> Result<CMatrix> {
    if let Some(file) = v.as_str() {
        let path: PathBuf = base.join(file);
        let bytes = std::fs::read(&path).with_context(|| format!("reading {}", path.display()))?;
        hasher.update(&bytes);
        return parse_csv(&bytes).with_context(|| format!("parsing {}", path.display()));
    }
    let rows = v
        .as_array()
        .ok_or_else(|| anyhow!("expected nested arrays or a CSV path"))?
        .iter()
        .enumerate()
        .map(|(i, row)| {
            row.as_array()
                .ok_or_else(|| anyhow!("row {i} is not an array"))?
                .iter()
                .enumerate()
                .map(|(j, e)| entry(e).with_context(|| format!("entry ({i}, {j})")))
                .collect::<Result<Vec<C64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    rectangular(rows)
}

fn entry(v: &Value) -> Result<C64> {
    let z = if let Some(x) = v.as_f64() {
        C64::new(x, 0.0)
    } else {
        match v.as_array().map(Vec::as_slice) {
            Some([re, im]) => C64::new(number(Some(re), "re")?, number(Some(im), "im")?),
            _ => bail!("expected a number or a [re, im] pair"),
        }
    };
    if !(z.re.is_finite() && z.im.is_finite()) {
        bail!("entry is not finite");
    }
    Ok(z)
}

fn rectangular(rows: Vec<Vec<C64>>) -> Result<CMatrix> {
    if rows.is_empty() || rows[0].is_empty() {
        bail!("matrix is empty");
    }
    if let Some(i) = rows.iter().position(|r| r.len() != rows[0].len()) {
        bail!("row {i} has {} entries, row 0 has {}", rows[i].len(), rows[0].len());
    }
    Ok(CMatrix::from_rows(&rows)?)
}

/// Comma-separated rows of `re`, `re+imj`, `re-imj` or `imj` entries.
pub fn parse_csv(bytes: &[u8]) -> Result<CMatrix> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(bytes);
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.with_context(|| format!("row {i}"))?;
        let row = record
            .iter()
            .enumerate()
            .map(|(j, s)| parse_complex(s).with_context(|| format!("entry ({i}, {j}) '{s}'")))
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    rectangular(rows)
}

pub fn parse_complex(s: &str) -> Result<C64> {
    let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let real = |t: &str| -> Result<f64> {
        let x: f64 = t.parse().map_err(|_| anyhow!("not a number: '{t}'"))?;
        if x.is_finite() {
            Ok(x)
        } else {
            bail!("not finite: '{t}'")
        }
    };
    let Some(body) = s.strip_suffix('j').or_else(|| s.strip_suffix('i')) else {
        return Ok(C64::new(real(&s)?, 0.0));
    };
    // Split at the last sign that is neither leading nor part of an exponent.
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let imag = |t: &str| -> Result<f64> {
        match t {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            t => real(t),
        }
    };
    Ok(match split {
        Some(k) => C64::new(real(&body[..k])?, imag(&body[k..])?),
        None => C64::new(0.0, imag(body)?),
    })
}

fn parse_profile(v: &Value) -> Result<PlasmaProfile> {
    let obj = v.as_object().ok_or_else(|| anyhow!("expected a profile object"))?;
    known_keys(obj, &["grid_n", "rho", "va2", "vs2", "kperp", "kpar", "g"], "mhd")?;
    let grid_n = count(obj.get("grid_n").ok_or_else(|| anyhow!("'grid_n' is missing"))?, "grid_n")?;
    let coef = |name: &str| -> Result<Coefficient> {
        let v = obj.get(name).ok_or_else(|| anyhow!("'{name}' is missing"))?;
        if let Some(s) = v.as_str() {
            return Ok(Coefficient::Builtin(s.to_string()));
        }
        if let Some(x) = v.as_f64() {
            return Ok(Coefficient::Constant(x));
        }
        let samples = v
            .as_array()
            .ok_or_else(|| anyhow!("'{name}' must be an array, a number or a built-in name"))?
            .iter()
            .map(|x| number(Some(x), name))
            .collect::<Result<Vec<_>>>()?;
        Ok(Coefficient::Samples(samples))
    };
    let g = match obj.get("g") {
        Some(g) => number(Some(g), "g")?,
        None => 0.0,
    };
    Ok(PlasmaProfile::new(grid_n, coef("rho")?, coef("va2")?, coef("vs2")?, coef("kperp")?, coef("kpar")?, g)?)
}

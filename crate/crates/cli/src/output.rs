//! Report serialization: JSON with 17 significant digits and per-family CSV
//! tables.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{Context, Result};
use serde_json::{Map, Number, Value as Json};
use specblock::linalg::Interval;
use specblock::pipeline::overall;
use specblock::{Check, Tally, Value};

pub struct Report {
    pub command: &'static str,
    pub input_digest: String,
    pub parameters: Vec<(&'static str, Json)>,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn tally(&self) -> Tally {
        Tally::of(&self.checks)
    }

    pub fn to_json(&self) -> Json {
        let t = self.tally();
        let mut root = Map::new();
        root.insert("tool".into(), "specblock".into());
        root.insert("version".into(), env!("CARGO_PKG_VERSION").into());
        root.insert("command".into(), self.command.into());
        root.insert("input_digest".into(), self.input_digest.clone().into());
        root.insert(
            "parameters".into(),
            Json::Object(self.parameters.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()),
        );
        let mut summary = Map::new();
        summary.insert("outcome".into(), overall(&self.checks).as_str().into());
        summary.insert("pass".into(), t.pass.into());
        summary.insert("fail".into(), t.fail.into());
        summary.insert("not_applicable".into(), t.not_applicable.into());
        root.insert("summary".into(), Json::Object(summary));
        root.insert("checks".into(), Json::Array(self.checks.iter().map(check_json).collect()));
        Json::Object(root)
    }

    pub fn to_pretty(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json()).expect("serializable");
        s.push('\n');
        s
    }

    /// One `<family>.csv` per check family, rows in report order.
    pub fn write_csv(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let mut families: BTreeMap<&str, Vec<&Check>> = BTreeMap::new();
        for c in &self.checks {
            families.entry(c.family.as_str()).or_default().push(c);
        }
        for (family, checks) in families {
            let mut keys: Vec<String> = Vec::new();
            for c in &checks {
                for k in c.inputs.iter().map(|(k, _)| format!("in.{k}")).chain(c.outputs.iter().map(|(k, _)| format!("out.{k}"))) {
                    if !keys.contains(&k) {
                        keys.push(k);
                    }
                }
            }
            let path = dir.join(format!("{family}.csv"));
            let mut w = csv::Writer::from_path(&path).with_context(|| format!("creating {}", path.display()))?;
            let mut header = vec!["name".to_string(), "outcome".into(), "tolerance".into(), "note".into(), "anchor".into()];
            header.extend(keys.iter().cloned());
            w.write_record(&header)?;
            for c in checks {
                let mut row = vec![
                    c.name.clone(),
                    c.outcome.as_str().to_string(),
                    c.tolerance.map(fmt_real).unwrap_or_default(),
                    c.note.clone().unwrap_or_default(),
                    c.anchor.clone(),
                ];
                for k in &keys {
                    let (list, key) = match k.strip_prefix("in.") {
                        Some(key) => (&c.inputs, key),
                        None => (&c.outputs, &k[4..]),
                    };
                    row.push(list.iter().find(|(n, _)| n == key).map(|(_, v)| csv_cell(v)).unwrap_or_default());
                }
                w.write_record(&row)?;
            }
            w.flush()?;
        }
        Ok(())
    }
}

/// 17 significant digits; non-finite values become strings.
pub fn fmt_real(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

pub fn real(x: f64) -> Json {
    if x.is_finite() {
        Json::Number(fmt_real(x).parse::<Number>().expect("formatted float is valid JSON"))
    } else {
        Json::String(fmt_real(x))
    }
}

fn interval_json(iv: &Interval) -> Json {
    let mut o = Map::new();
    o.insert("lo".into(), real(iv.lo));
    o.insert("hi".into(), real(iv.hi));
    o.insert("open_lo".into(), iv.open_lo.into());
    o.insert("open_hi".into(), iv.open_hi.into());
    Json::Object(o)
}

pub fn value_json(v: &Value) -> Json {
    match v {
        Value::Real(x) => real(*x),
        Value::Int(i) => (*i).into(),
        Value::Bool(b) => (*b).into(),
        Value::Text(s) => s.clone().into(),
        Value::Reals(xs) => Json::Array(xs.iter().map(|&x| real(x)).collect()),
        Value::Complex(z) => {
            let mut o = Map::new();
            o.insert("re".into(), real(z.re));
            o.insert("im".into(), real(z.im));
            Json::Object(o)
        }
        Value::Interval(iv) => interval_json(iv),
        Value::Intervals(ivs) => Json::Array(ivs.iter().map(interval_json).collect()),
    }
}

fn csv_cell(v: &Value) -> String {
    match v {
        Value::Real(x) => fmt_real(*x),
        Value::Text(s) => s.clone(),
        other => value_json(other).to_string(),
    }
}

fn pairs(list: &[(String, Value)]) -> Json {
    Json::Object(list.iter().map(|(k, v)| (k.clone(), value_json(v))).collect())
}

fn check_json(c: &Check) -> Json {
    let mut o = Map::new();
    o.insert("name".into(), c.name.clone().into());
    o.insert("family".into(), c.family.clone().into());
    o.insert("anchor".into(), c.anchor.clone().into());
    o.insert("outcome".into(), c.outcome.as_str().into());
    o.insert("tolerance".into(), c.tolerance.map(real).unwrap_or(Json::Null));
    o.insert("inputs".into(), pairs(&c.inputs));
    o.insert("outputs".into(), pairs(&c.outputs));
    o.insert("note".into(), c.note.clone().map(Json::from).unwrap_or(Json::Null));
    Json::Object(o)
}

use crate::error::{Error, Result};

/// One coefficient of a plasma profile: explicit samples, a named built-in
/// shape, or a constant.
#[derive(Clone, Debug, PartialEq)]
pub enum Coefficient {
    Samples(Vec<f64>),
    Builtin(String),
    Constant(f64),
}

impl From<f64> for Coefficient {
    fn from(v: f64) -> Self {
        Coefficient::Constant(v)
    }
}

impl From<&str> for Coefficient {
    fn from(s: &str) -> Self {
        Coefficient::Builtin(s.to_string())
    }
}

impl From<Vec<f64>> for Coefficient {
    fn from(v: Vec<f64>) -> Self {
        Coefficient::Samples(v)
    }
}

pub const BUILTINS: &[&str] = &["constant", "linear", "ramp", "sinusoidal", "zero"];

/// Built-in shapes on `[0, 1]`. A name that parses as a number is that
/// constant.
pub fn builtin(name: &str, x: f64) -> Result<f64> {
    Ok(match name {
        "constant" => 1.0,
        "linear" => 1.0 + x,
        "ramp" => x,
        "sinusoidal" => 1.0 + 0.5 * (2.0 * std::f64::consts::PI * x).sin(),
        "zero" => 0.0,
        other => other
            .trim()
            .parse::<f64>()
            .map_err(|_| Error::Profile(format!("unknown built-in profile '{other}' (known: {})", BUILTINS.join(", "))))?,
    })
}

/// Coefficients of the plasma model sampled on the uniform grid
/// `x_j = j/(grid_n − 1)`, `j = 0..grid_n`.
#[derive(Clone, Debug, PartialEq)]
pub struct PlasmaProfile {
    pub rho: Vec<f64>,
    pub va2: Vec<f64>,
    pub vs2: Vec<f64>,
    pub kperp: Vec<f64>,
    pub kpar: Vec<f64>,
    pub g: f64,
}

impl PlasmaProfile {
    pub fn new(
        grid_n: usize,
        rho: Coefficient,
        va2: Coefficient,
        vs2: Coefficient,
        kperp: Coefficient,
        kpar: Coefficient,
        g: f64,
    ) -> Result<Self> {
        if grid_n < 3 {
            return Err(Error::Profile(format!("grid needs at least 3 points, got {grid_n}")));
        }
        let sample = |name: &str, c: Coefficient| -> Result<Vec<f64>> {
            match c {
                Coefficient::Samples(v) => {
                    if v.len() != grid_n {
                        return Err(Error::Profile(format!(
                            "{name} has {} samples, grid has {grid_n}",
                            v.len()
                        )));
                    }
                    Ok(v)
                }
                Coefficient::Builtin(s) => (0..grid_n).map(|j| builtin(&s, grid_x(grid_n, j))).collect(),
                Coefficient::Constant(v) => Ok(vec![v; grid_n]),
            }
        };
        let p = Self {
            rho: sample("rho", rho)?,
            va2: sample("va2", va2)?,
            vs2: sample("vs2", vs2)?,
            kperp: sample("kperp", kperp)?,
            kpar: sample("kpar", kpar)?,
            g,
        };
        p.validate()?;
        Ok(p)
    }

    /// `ρ = v_a² = v_s² = k⊥ = k∥ = 1`, `g = 0`.
    pub fn constant() -> Self {
        Self::new(65, 1.0.into(), 1.0.into(), 1.0.into(), 1.0.into(), 1.0.into(), 0.0).expect("valid")
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.rho.len();
        if n < 3 {
            return Err(Error::Profile(format!("grid needs at least 3 points, got {n}")));
        }
        for (name, v) in self.fields() {
            if v.len() != n {
                return Err(Error::Profile(format!("{name} has {} samples, grid has {n}", v.len())));
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(Error::Profile(format!("{name} has non-finite samples")));
            }
        }
        if !self.g.is_finite() {
            return Err(Error::Profile("g is not finite".into()));
        }
        if let Some(j) = self.rho.iter().position(|&r| r <= 0.0) {
            return Err(Error::Profile(format!("density must be positive (ρ = {} at sample {j})", self.rho[j])));
        }
        if let Some(j) = (0..n).find(|&j| self.va2[j] + self.vs2[j] <= 0.0) {
            return Err(Error::Profile(format!("v_a² + v_s² must be positive (sample {j})")));
        }
        Ok(())
    }

    pub fn fields(&self) -> [(&'static str, &[f64]); 5] {
        [
            ("rho", &self.rho),
            ("va2", &self.va2),
            ("vs2", &self.vs2),
            ("kperp", &self.kperp),
            ("kpar", &self.kpar),
        ]
    }

    pub fn grid_n(&self) -> usize {
        self.rho.len()
    }

    pub fn grid(&self) -> Vec<f64> {
        (0..self.grid_n()).map(|j| grid_x(self.grid_n(), j)).collect()
    }

    /// Grid spacing of the samples.
    pub fn spacing(&self) -> f64 {
        1.0 / (self.grid_n() - 1) as f64
    }

    /// Coefficients at `x` by linear interpolation.
    pub fn at(&self, x: f64) -> Point {
        let n = self.grid_n();
        let t = (x.clamp(0.0, 1.0) * (n - 1) as f64).min((n - 1) as f64);
        let j = (t.floor() as usize).min(n - 2);
        let s = t - j as f64;
        let lerp = |v: &[f64]| v[j] * (1.0 - s) + v[j + 1] * s;
        Point {
            rho: lerp(&self.rho),
            va2: lerp(&self.va2),
            vs2: lerp(&self.vs2),
            kperp: lerp(&self.kperp),
            kpar: lerp(&self.kpar),
        }
    }

    pub fn sample(&self, j: usize) -> Point {
        Point {
            rho: self.rho[j],
            va2: self.va2[j],
            vs2: self.vs2[j],
            kperp: self.kperp[j],
            kpar: self.kpar[j],
        }
    }
}

fn grid_x(n: usize, j: usize) -> f64 {
    j as f64 / (n - 1) as f64
}

/// Coefficient values at one point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Point {
    pub rho: f64,
    pub va2: f64,
    pub vs2: f64,
    pub kperp: f64,
    pub kpar: f64,
}

impl Point {
    /// `v_a² + v_s²`.
    pub fn w(&self) -> f64 {
        self.va2 + self.vs2
    }

    /// `k² = k⊥² + k∥²`.
    pub fn k2(&self) -> f64 {
        self.kperp * self.kperp + self.kpar * self.kpar
    }
}

//! Structured check records shared by the pipelines, the self-test and the
//! command-line front end.

use crate::linalg::{Interval, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail,
    /// A hypothesis of the underlying statement does not hold.
    NotApplicable,
}

impl Outcome {
    pub fn as_str(self) -> &'static str {
        match self {
            Outcome::Pass => "pass",
            Outcome::Fail => "fail",
            Outcome::NotApplicable => "not-applicable",
        }
    }

    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Outcome::Pass
        } else {
            Outcome::Fail
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Real(f64),
    Int(i64),
    Bool(bool),
    Text(String),
    Reals(Vec<f64>),
    Complex(C64),
    Interval(Interval),
    Intervals(Vec<Interval>),
}

impl From<f64> for Value {
    fn from(v: f64) -> Self {
        Value::Real(v)
    }
}

impl From<usize> for Value {
    fn from(v: usize) -> Self {
        Value::Int(v as i64)
    }
}

impl From<bool> for Value {
    fn from(v: bool) -> Self {
        Value::Bool(v)
    }
}

impl From<&str> for Value {
    fn from(v: &str) -> Self {
        Value::Text(v.to_string())
    }
}

impl From<String> for Value {
    fn from(v: String) -> Self {
        Value::Text(v)
    }
}

impl From<Vec<f64>> for Value {
    fn from(v: Vec<f64>) -> Self {
        Value::Reals(v)
    }
}

impl From<&[f64]> for Value {
    fn from(v: &[f64]) -> Self {
        Value::Reals(v.to_vec())
    }
}

impl From<C64> for Value {
    fn from(v: C64) -> Self {
        Value::Complex(v)
    }
}

impl From<Interval> for Value {
    fn from(v: Interval) -> Self {
        Value::Interval(v)
    }
}

impl From<Vec<Interval>> for Value {
    fn from(v: Vec<Interval>) -> Self {
        Value::Intervals(v)
    }
}

/// One verified statement with its inputs, outputs and verdict.
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    /// Family used to group checks into tables.
    pub family: String,
    /// The inequality or identity being checked, as a formula.
    pub anchor: String,
    pub inputs: Vec<(String, Value)>,
    pub outputs: Vec<(String, Value)>,
    pub outcome: Outcome,
    pub tolerance: Option<f64>,
    pub note: Option<String>,
}

impl Check {
    pub fn new(family: &str, name: impl Into<String>, anchor: &str) -> Self {
        Self {
            name: name.into(),
            family: family.to_string(),
            anchor: anchor.to_string(),
            inputs: vec![],
            outputs: vec![],
            outcome: Outcome::NotApplicable,
            tolerance: None,
            note: None,
        }
    }

    pub fn input(mut self, key: &str, v: impl Into<Value>) -> Self {
        self.inputs.push((key.to_string(), v.into()));
        self
    }

    pub fn output(mut self, key: &str, v: impl Into<Value>) -> Self {
        self.outputs.push((key.to_string(), v.into()));
        self
    }

    pub fn tol(mut self, t: f64) -> Self {
        self.tolerance = Some(t);
        self
    }

    pub fn note(mut self, n: impl Into<String>) -> Self {
        self.note = Some(n.into());
        self
    }

    pub fn outcome(mut self, o: Outcome) -> Self {
        self.outcome = o;
        self
    }

    pub fn passed(self, ok: bool) -> Self {
        self.outcome(Outcome::from_bool(ok))
    }

    pub fn not_applicable(self, reason: impl Into<String>) -> Self {
        self.outcome(Outcome::NotApplicable).note(reason)
    }
}

/// Summary over a set of checks.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Tally {
    pub pass: usize,
    pub fail: usize,
    pub not_applicable: usize,
}

impl Tally {
    pub fn of(checks: &[Check]) -> Self {
        let mut t = Tally::default();
        for c in checks {
            match c.outcome {
                Outcome::Pass => t.pass += 1,
                Outcome::Fail => t.fail += 1,
                Outcome::NotApplicable => t.not_applicable += 1,
            }
        }
        t
    }

    pub fn all_passed(&self) -> bool {
        self.fail == 0
    }
}

/// Anchor formulas.
pub mod anchors {
    pub const DIST_BOUND: &str = "dist[λ,σ(A)] ≤ |aλ+b| / (dist[λ,σ(C)] − a)";
    pub const INCLUSION: &str = "λ ∈ [α⁻,α⁺], α± = (μ+c+2a)/2 ± sqrt(((μ−c)/2)² + a(a+c) + b)";
    pub const EXCLUSION: &str = "λ ∉ (β⁻,β⁺), β± = (μ+c)/2 ± sqrt(((μ−c)/2)² − (aμ+b))";
    pub const RESOLVENT: &str = "(α₁⁺, β₂⁺) ⊂ ρ(M)";
    pub const DIMENSION: &str = "dim L_[β₂⁺,α₃⁺](M) = dim L_[β₂⁺,α₃⁺](A)";
    pub const VARIATIONAL: &str = "μ_{κ+n} ≤ λ_n ≤ (μ_{κ+n}+c)/2 + sqrt(((μ_{κ+n}−c)/2)² + aμ_{κ+n} + b)";
    pub const SOQ: &str =
        "σ(M) ∩ [Re z − |Im z|²/(β₄⁺ − Re z), Re z + |Im z|²/(Re z − α₁⁺)] = σ(M) ∩ [β₂⁺, α₃⁺]";
    pub const RELATIVE_BOUND: &str = "‖B*x‖² ≤ a⟨Ax,x⟩ + b‖x‖²";
    pub const SCHUR: &str = "S(λ) = A − λ − B(C − λ)⁻¹B*";
    pub const RESOLVENT_BLOCK: &str = "(M − α)⁻¹ = [[S⁻¹, −S⁻¹F], [−F*S⁻¹, (C−α)⁻¹ + F*S⁻¹F]], F = B(C−α)⁻¹";
    pub const LANDMARKS: &str = "(c, c̃] ⊂ ρ(M), κ = dim L_(−∞,0)(S(c̃))";
    pub const GRAPH: &str = "L_(α,∞)(M) = {(x, K_α x)ᵀ : x ∈ Dom(K_α)}";
    pub const DELTA: &str = "δ = a/(α−c) + |aα+b| / (dist[α,σ(A)](α−c)) < 1/2";
    pub const CODIM: &str = "codim Dom(K_c) = κ";
    pub const SHIFTED: &str = "min σ(M) ≤ min σ(M̃), Ã = A + tE((−∞,μ)), t = μ − min σ(A)";
    pub const RIESZ: &str = "(1+‖K_c‖²)⁻¹ Σ|β_n|² ≤ ‖Σ β_n x_n‖² ≤ Σ|β_n|²";
    pub const DECAY: &str = "‖E({μ_{κ+n}}) − F_n(Δ_n)‖ ≤ (γ_n / dist[Γ_n,σ(A)]) · δ_n/(1−δ_n)";
    pub const BARI: &str = "Σ ‖y_{κ+n} − x_n‖² < ∞";
    pub const GAP_SUM: &str = "Σ 1/(μ_{n+1} − μ_n)² < ∞";
    pub const MHD_CONSTANTS: &str = "c = max{k²w/2 + sqrt(k⁴w²/4 − k²k∥²v_a²v_s²)}, a = max{(w²k⊥² + v_s⁴k∥²)/w}, w = v_a² + v_s²";
    pub const MHD_BANDS: &str = "σ_ess = range(v_a²k∥) ∪ range(v_a²v_s²k⊥/(v_a²+v_s²))";
    pub const SPECTRAL: &str = "H = QΛQ*, Q*Q = I";
}

//! Spectral subspaces `L_(α,∞)(M)` as graphs `{(x, Kx)}` over the first
//! component, the angular operator `K`, the sufficient condition `δ < 1/2`
//! and the shifted matrix used to push `σ(A)` above a threshold.

use crate::block::{BlockOperatorMatrix, RelativeBound};
use crate::error::{Error, Result};
use crate::linalg::{dist_to_set, pseudo_inverse, svd, CMatrix, HermitianMatrix, Interval};
use crate::tolerance::{self, GRAPH_INDETERMINATE, GRAPH_TOL};

/// Orthonormal basis of a spectral subspace, split into first components
/// `U` (n1×m) and second components `V` (n2×m).
#[derive(Clone, Debug)]
pub struct GraphSubspace {
    pub first: CMatrix,
    pub second: CMatrix,
    pub window: Interval,
    /// Eigenvalues belonging to the basis columns.
    pub eigenvalues: Vec<f64>,
}

impl GraphSubspace {
    pub fn dim(&self) -> usize {
        self.first.cols()
    }

    /// Stacked basis `[U; V]`.
    pub fn stacked(&self) -> CMatrix {
        let (n1, n2) = (self.first.rows(), self.second.rows());
        let mut s = CMatrix::zeros(n1 + n2, self.dim());
        s.set_block(0, 0, &self.first);
        s.set_block(n1, 0, &self.second);
        s
    }

    /// Splits a stacked orthonormal basis at row `n1`.
    pub fn from_stacked(basis: &CMatrix, n1: usize, window: Interval, eigenvalues: Vec<f64>) -> Self {
        let m = basis.cols();
        Self {
            first: basis.submatrix(0, 0, n1, m),
            second: basis.submatrix(n1, 0, basis.rows() - n1, m),
            window,
            eigenvalues,
        }
    }
}

/// Orthonormal basis of `L_(α,∞)(M)`.
pub fn spectral_subspace(m: &BlockOperatorMatrix, alpha: f64) -> Result<GraphSubspace> {
    let dec = m.eig_m()?;
    let distance = dist_to_set(alpha, &dec.eigenvalues);
    if !(distance > m.tol()) {
        return Err(Error::Boundary { alpha, distance });
    }
    let window = Interval::above(alpha);
    let basis = dec.basis_in(&window);
    Ok(GraphSubspace::from_stacked(&basis, m.n1(), window, dec.values_in(&window)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GraphVerdict {
    Graph,
    NotGraph,
    /// `σ_min(U)` inside `[1e-10, 1e-8]`.
    Indeterminate,
}

impl GraphVerdict {
    pub fn as_str(self) -> &'static str {
        match self {
            GraphVerdict::Graph => "graph",
            GraphVerdict::NotGraph => "not-graph",
            GraphVerdict::Indeterminate => "indeterminate",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GraphTest {
    pub verdict: GraphVerdict,
    pub sigma_min: f64,
    /// Singular values of `U`, descending, padded with zeros to `m` entries.
    pub singular_values: Vec<f64>,
}

impl GraphTest {
    pub fn is_graph(&self) -> bool {
        self.verdict == GraphVerdict::Graph
    }
}

/// Whether the subspace is the graph of an operator on the first component:
/// no basis combination may have a vanishing first component.
pub fn graph_test(sub: &GraphSubspace) -> Result<GraphTest> {
    let m = sub.dim();
    if m == 0 {
        return Ok(GraphTest {
            verdict: GraphVerdict::Graph,
            sigma_min: 1.0,
            singular_values: vec![],
        });
    }
    let mut sv = svd(&sub.first)?.singular_values;
    sv.resize(m, 0.0);
    let sigma_min = sv[m - 1];
    let verdict = if sigma_min > GRAPH_TOL {
        GraphVerdict::Graph
    } else if sigma_min < GRAPH_INDETERMINATE {
        GraphVerdict::NotGraph
    } else {
        GraphVerdict::Indeterminate
    };
    Ok(GraphTest {
        verdict,
        sigma_min,
        singular_values: sv,
    })
}

#[derive(Clone, Debug)]
pub struct AngularOperator {
    /// `K = V U⁺` (n2×n1).
    pub k: CMatrix,
    /// Orthogonal projector `U U⁺` onto `Dom(K) = range(U)`.
    pub domain_projector: CMatrix,
    /// `‖K P_dom‖`.
    pub norm: f64,
    /// `n1 − dim Dom(K)`.
    pub codim: usize,
}

/// The operator `K` with `L = {(x, Kx) : x ∈ range(U)}`.
///
/// `U` need not be square; `K` lives on `range(U)` and is extended by zero
/// on its orthogonal complement.
pub fn angular_operator(sub: &GraphSubspace) -> Result<AngularOperator> {
    let test = graph_test(sub)?;
    if !test.is_graph() {
        return Err(Error::NotAGraph {
            sigma_min: test.sigma_min,
        });
    }
    let n1 = sub.first.rows();
    let u_pinv = pseudo_inverse(&sub.first, GRAPH_TOL)?;
    let k = sub.second.matmul(&u_pinv)?;
    let domain_projector = sub.first.matmul(&u_pinv)?;
    let norm = k.matmul(&domain_projector)?.norm2();
    Ok(AngularOperator {
        k,
        domain_projector,
        norm,
        codim: n1 - sub.dim(),
    })
}

/// `δ = a/(α − c) + |aα + b| / (dist[α, σ(A)](α − c))`; the spectral
/// subspace above `α` is a graph with bounded angular operator when
/// `δ < 1/2`.
pub fn delta_condition(alpha: f64, c: f64, spec_a: &[f64], rb: RelativeBound) -> Result<f64> {
    let tol = tolerance::scaled(spec_a.len() + 1, spec_a.iter().fold(alpha.abs().max(c.abs()), |m, x| m.max(x.abs())));
    if !(alpha > c + tol) {
        return Err(Error::Hypothesis(format!("α = {alpha} must exceed c = {c}")));
    }
    let dist = dist_to_set(alpha, spec_a);
    if !(dist > tol) {
        return Err(Error::Hypothesis(format!("α = {alpha} lies in σ(A)")));
    }
    let gap = alpha - c;
    Ok(rb.a / gap + (rb.a * alpha + rb.b).abs() / (dist * gap))
}

/// Replaces `A` by `A + tE((−∞, μ))` with `t = μ − min σ(A)`, which lifts
/// every eigenvalue of `A` below `μ` to at least `μ`.
pub fn shifted_matrix(m: &BlockOperatorMatrix, mu: f64) -> Result<BlockOperatorMatrix> {
    let ea = m.eig_a()?;
    let min_a = ea.eigenvalues[0];
    let tol = tolerance::scaled(m.n1(), m.a().matrix().max_abs());
    if !(mu > min_a + tol) {
        return Err(Error::Precondition(format!("μ = {mu} must exceed min σ(A) = {min_a}")));
    }
    let t = mu - min_a;
    let shift = ea.apply_function(|x| if x < mu { t } else { 0.0 });
    let a_new = HermitianMatrix::symmetrize(m.a().matrix() + &shift);
    m.with_a(a_new)
}

/// Smallest `β` from an ascending grid whose spectral subspace above `β` is a
/// graph. Grid points within tolerance of `σ(M)` are skipped.
pub fn graph_threshold_scan(m: &BlockOperatorMatrix, betas: &[f64]) -> Result<Option<f64>> {
    for &beta in betas {
        match spectral_subspace(m, beta) {
            Ok(sub) => {
                if graph_test(&sub)?.is_graph() {
                    return Ok(Some(beta));
                }
            }
            Err(Error::Boundary { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m3() -> BlockOperatorMatrix {
        BlockOperatorMatrix::from_real(&[&[2.0, 0.0], &[0.0, 10.0]], &[&[1.0], &[1.0]], &[&[-1.0]]).unwrap()
    }

    #[test]
    fn m3_above_six() {
        let sub = spectral_subspace(&m3(), 6.0).unwrap();
        assert_eq!(sub.dim(), 1);
        let k = angular_operator(&sub).unwrap();
        assert_eq!(k.codim, 1);
    }

    #[test]
    fn pure_second_component_is_not_a_graph() {
        let basis = CMatrix::from_real_rows(&[&[0.0], &[0.0], &[1.0]]).unwrap();
        let sub = GraphSubspace::from_stacked(&basis, 2, Interval::everything(), vec![0.0]);
        let t = graph_test(&sub).unwrap();
        assert_eq!(t.verdict, GraphVerdict::NotGraph);
        assert_eq!(t.sigma_min, 0.0);
        assert!(matches!(angular_operator(&sub), Err(Error::NotAGraph { .. })));
    }

    #[test]
    fn delta_at_six() {
        let d = delta_condition(6.0, -1.0, &[2.0, 10.0], RelativeBound { a: 0.0, b: 2.0 }).unwrap();
        assert!((d - 1.0 / 14.0).abs() < 1e-15);
    }

    #[test]
    fn shift_of_diagonal() {
        let s = shifted_matrix(&m3(), 5.0).unwrap();
        assert_eq!(s.spec_a().unwrap(), &[5.0, 10.0]);
        assert!(shifted_matrix(&m3(), 2.0).is_err());
    }
}

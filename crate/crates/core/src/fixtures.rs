//! Deterministic test instances: the 3×3 fixture `M3` and seeded random
//! block matrices.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::block::{BlockOperatorMatrix, RelativeBound};
use crate::enclosure::gap_pairs;
use crate::error::{Error, Result};
use crate::linalg::{orthonormalize, CMatrix, HermitianMatrix, C64};

pub type FixtureRng = ChaCha8Rng;

pub fn rng(seed: u64) -> FixtureRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `[[2, 0, 1], [0, 10, 1], [1, 1, −1]]` with `n1 = 2`, `n2 = 1`.
pub fn m3() -> BlockOperatorMatrix {
    BlockOperatorMatrix::from_real(&[&[2.0, 0.0], &[0.0, 10.0]], &[&[1.0], &[1.0]], &[&[-1.0]]).expect("valid fixture")
}

/// Entries with real and imaginary parts uniform in `[−range, range]`.
pub fn random_matrix(rng: &mut FixtureRng, rows: usize, cols: usize, range: f64) -> CMatrix {
    let data = (0..rows * cols)
        .map(|_| C64::new(rng.gen_range(-range..=range), rng.gen_range(-range..=range)))
        .collect();
    CMatrix::from_vec(rows, cols, data).expect("sized")
}

/// Hermitian with entries in `[−range, range]` (real diagonal).
pub fn random_hermitian(rng: &mut FixtureRng, n: usize, range: f64) -> HermitianMatrix {
    let mut h = CMatrix::zeros(n, n);
    for i in 0..n {
        h[(i, i)] = C64::new(rng.gen_range(-range..=range), 0.0);
        for j in i + 1..n {
            let z = C64::new(rng.gen_range(-range..=range), rng.gen_range(-range..=range));
            h[(i, j)] = z;
            h[(j, i)] = z.conj();
        }
    }
    HermitianMatrix::new(h).expect("constructed Hermitian")
}

/// Haar-like unitary from orthonormalizing a random matrix.
pub fn random_unitary(rng: &mut FixtureRng, n: usize) -> CMatrix {
    loop {
        let q = orthonormalize(&random_matrix(rng, n, n, 1.0), 1e-8);
        if q.cols() == n {
            return q;
        }
    }
}

/// `U diag(values) U*` for a random unitary `U`.
pub fn with_spectrum(rng: &mut FixtureRng, values: &[f64]) -> HermitianMatrix {
    let n = values.len();
    let u = random_unitary(rng, n);
    let mut d = CMatrix::zeros(n, n);
    for (i, &v) in values.iter().enumerate() {
        d[(i, i)] = C64::new(v, 0.0);
    }
    HermitianMatrix::symmetrize(&(&u * &d) * &u.adjoint())
}

/// `n1 ∈ 1..=max_n1`, `n2 ∈ 1..=max_n2`, entries in `[−range, range]`.
pub fn random_instance(rng: &mut FixtureRng, max_n1: usize, max_n2: usize, range: f64) -> BlockOperatorMatrix {
    let n1 = rng.gen_range(1..=max_n1);
    let n2 = rng.gen_range(1..=max_n2);
    let a = random_hermitian(rng, n1, range);
    let b = random_matrix(rng, n1, n2, range);
    let c = random_hermitian(rng, n2, range);
    BlockOperatorMatrix::new(a, b, c).expect("valid sizes")
}

/// `a` uniform in `[0, a_max]` and the minimal `b` for it.
pub fn random_relative_bound(rng: &mut FixtureRng, m: &BlockOperatorMatrix, a_max: f64) -> Result<RelativeBound> {
    let a = if a_max > 0.0 { rng.gen_range(0.0..=a_max) } else { 0.0 };
    Ok(m.minimal_b_for_a(a)?.bound)
}

/// Instance whose `A` has well separated eigenvalues above `σ(C) ⊂ [−6, −1]`
/// and a weak coupling, so that at least two certified gaps exist for the
/// returned relative bound.
pub fn separated_instance(rng: &mut FixtureRng) -> Result<(BlockOperatorMatrix, RelativeBound)> {
    for _ in 0..100 {
        let n1 = rng.gen_range(3..=8);
        let n2 = rng.gen_range(1..=6);
        let mus: Vec<f64> = (1..=n1).map(|k| 12.0 * k as f64 + rng.gen_range(0.0..3.0)).collect();
        let cs: Vec<f64> = (0..n2).map(|_| rng.gen_range(-6.0..-1.0)).collect();
        let a = with_spectrum(rng, &mus);
        let c = with_spectrum(rng, &cs);
        let b = random_matrix(rng, n1, n2, 0.5);
        let m = BlockOperatorMatrix::new(a, b, c)?;
        let rb = random_relative_bound(rng, &m, 0.2)?;
        if !gap_pairs(m.spec_a()?, m.c_max()?, rb).is_empty() {
            return Ok((m, rb));
        }
    }
    Err(Error::Precondition("no separated instance found in 100 attempts".into()))
}

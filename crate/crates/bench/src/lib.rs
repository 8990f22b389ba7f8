//! Helpers shared by the benchmarks.

use specblock::fixtures::{random_hermitian, random_matrix, rng};
use specblock::{BlockOperatorMatrix, HermitianMatrix};

pub const SEED: u64 = 7;

pub fn hermitian(n: usize) -> HermitianMatrix {
    random_hermitian(&mut rng(SEED), n, 10.0)
}

/// Random instance with exactly `n1 × n2` coupling.
pub fn instance(n1: usize, n2: usize) -> BlockOperatorMatrix {
    let mut r = rng(SEED);
    let a = random_hermitian(&mut r, n1, 10.0);
    let b = random_matrix(&mut r, n1, n2, 10.0);
    let c = random_hermitian(&mut r, n2, 10.0);
    BlockOperatorMatrix::new(a, b, c).expect("valid sizes")
}

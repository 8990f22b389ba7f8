use super::{CMatrix, C64, ONE, ZERO};
use crate::error::{Error, Result};

/// LU factorization with partial pivoting, `PA = LU`.
#[derive(Clone, Debug)]
pub struct Lu {
    lu: CMatrix,
    perm: Vec<usize>,
}

impl Lu {
    /// Fails on an exactly zero pivot.
    pub fn factor(a: &CMatrix) -> Result<Self> {
        Self::factor_inner(a, None)
    }

    /// Like [`factor`](Self::factor) but replaces pivots smaller than
    /// `floor` by `floor`. Used by inverse iteration, where the shifted
    /// matrix is singular on purpose.
    pub fn factor_perturbed(a: &CMatrix, floor: f64) -> Result<Self> {
        Self::factor_inner(a, Some(floor))
    }

    fn factor_inner(a: &CMatrix, floor: Option<f64>) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::Dimension(format!(
                "LU needs a square matrix, got {}x{}",
                a.rows(),
                a.cols()
            )));
        }
        let n = a.rows();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let (p, pmax) = (k..n)
                .map(|i| (i, lu[(i, k)].norm()))
                .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if p != k {
                for j in 0..n {
                    let t = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = t;
                }
                perm.swap(k, p);
            }
            if pmax == 0.0 || floor.is_some_and(|f| pmax < f) {
                match floor {
                    Some(f) => lu[(k, k)] = C64::new(f.max(f64::MIN_POSITIVE), 0.0),
                    None => return Err(Error::Numeric(format!("singular matrix (zero pivot at column {k})"))),
                }
            }
            let pivot = lu[(k, k)];
            for i in k + 1..n {
                let factor = lu[(i, k)] / pivot;
                lu[(i, k)] = factor;
                if factor == ZERO {
                    continue;
                }
                for j in k + 1..n {
                    let u = lu[(k, j)];
                    lu[(i, j)] -= factor * u;
                }
            }
        }
        Ok(Self { lu, perm })
    }

    pub fn dim(&self) -> usize {
        self.perm.len()
    }

    pub fn solve(&self, b: &[C64]) -> Result<Vec<C64>> {
        let n = self.dim();
        if b.len() != n {
            return Err(Error::Dimension(format!("rhs of length {} for LU of size {n}", b.len())));
        }
        let mut x: Vec<C64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let mut s = x[i];
            for j in 0..i {
                s -= self.lu[(i, j)] * x[j];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in i + 1..n {
                s -= self.lu[(i, j)] * x[j];
            }
            x[i] = s / self.lu[(i, i)];
        }
        Ok(x)
    }

    pub fn inverse(&self) -> Result<CMatrix> {
        let n = self.dim();
        let mut inv = CMatrix::zeros(n, n);
        let mut e = vec![ZERO; n];
        for j in 0..n {
            e.iter_mut().for_each(|z| *z = ZERO);
            e[j] = ONE;
            let col = self.solve(&e)?;
            inv.set_column(j, &col);
        }
        if !inv.is_finite() {
            return Err(Error::Numeric("inverse overflowed".into()));
        }
        Ok(inv)
    }
}

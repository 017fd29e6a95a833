//! Minimal dense symmetric positive-definite solver for the normal
//! equations. Graphs here are submap-granular (tens to a few hundred
//! vertices), so a dense Cholesky factorization is plenty.

use crate::scalar::Real;

/// Symmetric n x n matrix in row-major storage with accumulation helpers.
pub(crate) struct SymMatrix<T> {
    pub n: usize,
    pub data: Vec<T>,
}

impl<T: Real> SymMatrix<T> {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![T::zero(); n * n],
        }
    }

    pub fn add(&mut self, r: usize, c: usize, v: T) {
        self.data[r * self.n + c] += v;
    }
}

/// Solves `A x = b` for symmetric positive-definite `A`, overwriting `b`
/// with the solution. Returns the offending column on a non-positive pivot.
pub(crate) fn cholesky_solve_in_place<T: Real>(
    a: &mut SymMatrix<T>,
    b: &mut [T],
) -> Result<(), usize> {
    let n = a.n;
    assert_eq!(b.len(), n);
    let scale = (0..n)
        .map(|i| a.data[i * n + i])
        .fold(T::one(), |m, v| if v > m { v } else { m });
    let tol = T::from_f64_lossy(1e-12) * scale;
    // In-place lower-triangular factorization A = L L^T.
    for j in 0..n {
        let mut d = a.data[j * n + j];
        for k in 0..j {
            d -= a.data[j * n + k] * a.data[j * n + k];
        }
        if d <= tol {
            return Err(j);
        }
        let l = d.sqrt();
        a.data[j * n + j] = l;
        for i in (j + 1)..n {
            let mut v = a.data[i * n + j];
            for k in 0..j {
                v -= a.data[i * n + k] * a.data[j * n + k];
            }
            a.data[i * n + j] = v / l;
        }
    }
    // Forward substitution L y = b.
    for i in 0..n {
        let mut v = b[i];
        for k in 0..i {
            v -= a.data[i * n + k] * b[k];
        }
        b[i] = v / a.data[i * n + i];
    }
    // Back substitution L^T x = y.
    for i in (0..n).rev() {
        let mut v = b[i];
        for k in (i + 1)..n {
            v -= a.data[k * n + i] * b[k];
        }
        b[i] = v / a.data[i * n + i];
    }
    Ok(())
}

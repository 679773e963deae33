//! Symmetric tridiagonal systems solved by the Thomas algorithm.
//!
//! The factorization is computed once and reused for every right-hand side,
//! which is the common case for fixed-step implicit diffusion.

use crate::error::{Error, Result};

/// Pre-factored symmetric tridiagonal matrix.
#[derive(Debug, Clone)]
pub struct Tridiagonal {
    off: Vec<f64>,
    // c'_j of the forward sweep
    upper: Vec<f64>,
    // pivots a_j - b_{j-1} c'_{j-1}
    pivot: Vec<f64>,
}

impl Tridiagonal {
    /// Factor the matrix with main diagonal `diag` and off-diagonal `off`
    /// (`off[j]` couples rows `j` and `j + 1`).
    pub fn new(diag: &[f64], off: &[f64]) -> Result<Self> {
        let n = diag.len();
        if off.len() + 1 != n {
            return Err(Error::LengthMismatch {
                expected: n.saturating_sub(1),
                got: off.len(),
            });
        }
        let mut upper = vec![0.0; n];
        let mut pivot = vec![0.0; n];
        let mut prev_upper = 0.0;
        for j in 0..n {
            let coupling = if j > 0 { off[j - 1] } else { 0.0 };
            let p = diag[j] - coupling * prev_upper;
            if !(p.abs() > f64::MIN_POSITIVE) || !p.is_finite() {
                return Err(Error::Diverged(format!("zero pivot at row {j}")));
            }
            pivot[j] = p;
            prev_upper = if j + 1 < n { off[j] / p } else { 0.0 };
            upper[j] = prev_upper;
        }
        Ok(Self {
            off: off.to_vec(),
            upper,
            pivot,
        })
    }

    pub fn len(&self) -> usize {
        self.pivot.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pivot.is_empty()
    }

    /// All pivots positive, i.e. the factored matrix is positive definite.
    pub fn is_positive_definite(&self) -> bool {
        self.pivot.iter().all(|&p| p > 0.0)
    }

    /// Solve in place: on return `rhs` holds the solution.
    pub fn solve_in_place(&self, rhs: &mut [f64]) {
        let n = self.len();
        debug_assert_eq!(rhs.len(), n);
        let mut prev = 0.0;
        for j in 0..n {
            let coupling = if j > 0 { self.off[j - 1] } else { 0.0 };
            prev = (rhs[j] - coupling * prev) / self.pivot[j];
            rhs[j] = prev;
        }
        for j in (0..n.saturating_sub(1)).rev() {
            rhs[j] -= self.upper[j] * rhs[j + 1];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn matvec(diag: &[f64], off: &[f64], x: &[f64]) -> Vec<f64> {
        let n = diag.len();
        (0..n)
            .map(|j| {
                let mut s = diag[j] * x[j];
                if j > 0 {
                    s += off[j - 1] * x[j - 1];
                }
                if j + 1 < n {
                    s += off[j] * x[j + 1];
                }
                s
            })
            .collect()
    }

    #[test]
    fn solves_diffusion_matrix() {
        let n = 50;
        let diag = vec![2.5; n];
        let off = vec![-1.0; n - 1];
        let x: Vec<f64> = (0..n).map(|j| (j as f64 * 0.3).sin() + 0.1).collect();
        let mut b = matvec(&diag, &off, &x);
        let t = Tridiagonal::new(&diag, &off).unwrap();
        assert!(t.is_positive_definite());
        t.solve_in_place(&mut b);
        for (a, e) in b.iter().zip(&x) {
            assert!((a - e).abs() < 1e-13);
        }
    }

    #[test]
    fn rejects_bad_lengths() {
        assert!(Tridiagonal::new(&[1.0, 2.0], &[0.1, 0.2]).is_err());
    }

    #[test]
    fn single_row() {
        let t = Tridiagonal::new(&[4.0], &[]).unwrap();
        let mut b = [2.0];
        t.solve_in_place(&mut b);
        assert_eq!(b[0], 0.5);
    }
}

//! Tridiagonal matrices and the Thomas algorithm.

use crate::error::{check_len, Error, Result};
use serde::{Deserialize, Serialize};

/// A square tridiagonal matrix stored by diagonals.
///
/// `lower[i]` is entry `(i+1, i)` and `upper[i]` is entry `(i, i+1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tridiagonal {
    pub lower: Vec<f64>,
    pub diag: Vec<f64>,
    pub upper: Vec<f64>,
}

impl Tridiagonal {
    pub fn zeros(n: usize) -> Self {
        Self {
            lower: vec![0.0; n.saturating_sub(1)],
            diag: vec![0.0; n],
            upper: vec![0.0; n.saturating_sub(1)],
        }
    }

    pub fn new(lower: Vec<f64>, diag: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        let n = diag.len();
        check_len(n.saturating_sub(1), lower.len())?;
        check_len(n.saturating_sub(1), upper.len())?;
        Ok(Self { lower, diag, upper })
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    /// Matrix-vector product.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.dim()];
        self.apply_into(x, &mut y);
        y
    }

    pub fn apply_into(&self, x: &[f64], y: &mut [f64]) {
        let n = self.dim();
        debug_assert_eq!(x.len(), n);
        debug_assert_eq!(y.len(), n);
        for i in 0..n {
            let mut s = self.diag[i] * x[i];
            if i > 0 {
                s += self.lower[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                s += self.upper[i] * x[i + 1];
            }
            y[i] = s;
        }
    }

    /// `a * self + b * other`, entrywise on the diagonals.
    pub fn combine(&self, a: f64, other: &Tridiagonal, b: f64) -> Tridiagonal {
        let zip = |p: &[f64], q: &[f64]| -> Vec<f64> {
            p.iter().zip(q).map(|(x, y)| a * x + b * y).collect()
        };
        Tridiagonal {
            lower: zip(&self.lower, &other.lower),
            diag: zip(&self.diag, &other.diag),
            upper: zip(&self.upper, &other.upper),
        }
    }

    /// Largest `|A_ij - A_ji|`.
    pub fn asymmetry(&self) -> f64 {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(l, u)| (l - u).abs())
            .fold(0.0, f64::max)
    }

    /// Restriction to the index range `range` (rows and columns).
    pub fn submatrix(&self, range: std::ops::Range<usize>) -> Tridiagonal {
        let (s, e) = (range.start, range.end);
        Tridiagonal {
            lower: self.lower[s..e.saturating_sub(1).max(s)].to_vec(),
            diag: self.diag[s..e].to_vec(),
            upper: self.upper[s..e.saturating_sub(1).max(s)].to_vec(),
        }
    }

    pub fn factor(&self) -> Result<TridiagonalLu> {
        TridiagonalLu::new(self)
    }

    /// One-shot solve.
    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        let lu = self.factor()?;
        let mut x = rhs.to_vec();
        lu.solve_in_place(&mut x)?;
        Ok(x)
    }
}

/// Thomas factorization `A = L U` without pivoting.
///
/// Valid for the symmetric positive definite and diagonally dominant systems
/// assembled in this crate. Stores the modified super-diagonal and the pivots
/// so that repeated solves cost `O(n)`.
#[derive(Debug, Clone)]
pub struct TridiagonalLu {
    lower: Vec<f64>,
    pivots: Vec<f64>,
    upper_mod: Vec<f64>,
}

impl TridiagonalLu {
    pub fn new(a: &Tridiagonal) -> Result<Self> {
        let n = a.dim();
        let mut pivots = vec![0.0; n];
        let mut upper_mod = vec![0.0; n.saturating_sub(1)];
        let scale = a.diag.iter().fold(0.0_f64, |m, d| m.max(d.abs()));
        let tiny = scale * 1e-300_f64.max(f64::EPSILON * 1e-6);
        for i in 0..n {
            let mut p = a.diag[i];
            if i > 0 {
                p -= a.lower[i - 1] * upper_mod[i - 1];
            }
            if !p.is_finite() || p.abs() <= tiny {
                return Err(Error::Singular { row: i });
            }
            pivots[i] = p;
            if i + 1 < n {
                upper_mod[i] = a.upper[i] / p;
            }
        }
        Ok(Self {
            lower: a.lower.clone(),
            pivots,
            upper_mod,
        })
    }

    pub fn dim(&self) -> usize {
        self.pivots.len()
    }

    pub fn solve_in_place(&self, x: &mut [f64]) -> Result<()> {
        let n = self.dim();
        check_len(n, x.len())?;
        if n == 0 {
            return Ok(());
        }
        x[0] /= self.pivots[0];
        for i in 1..n {
            x[i] = (x[i] - self.lower[i - 1] * x[i - 1]) / self.pivots[i];
        }
        for i in (0..n - 1).rev() {
            x[i] -= self.upper_mod[i] * x[i + 1];
        }
        Ok(())
    }
}

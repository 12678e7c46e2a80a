//! Right-hand sides `f(t, x)` of the wave equation.

use crate::elliptic::{assemble_full_mass, load_vector};
use crate::error::{check_len, Error, Result};
use crate::quadrature::{mesh_points, trapezoid, GaussRule};
use crate::spaces::{value_at, Grid, SpaceTimeField};
use std::fmt;
use std::sync::Arc;

/// A closed-form source term.
#[derive(Clone)]
pub struct AnalyticFn(Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>);

impl AnalyticFn {
    pub fn new<F: Fn(f64, f64) -> f64 + Send + Sync + 'static>(f: F) -> Self {
        Self(Arc::new(f))
    }

    #[inline]
    pub fn eval(&self, t: f64, x: f64) -> f64 {
        (self.0)(t, x)
    }
}

impl fmt::Debug for AnalyticFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("AnalyticFn(..)")
    }
}

/// Source term of the wave equation, sampled on the problem's time levels.
///
/// Nodal sources enter the semi-discrete system as `M f`; analytic sources are
/// integrated against the hat functions by Gauss quadrature, which keeps
/// non-smooth terms such as `x^{alpha-1}` from degrading convergence near
/// `x = 0`.
#[derive(Debug, Clone)]
pub enum Source {
    Zero,
    Nodal(SpaceTimeField),
    Analytic(AnalyticFn),
    /// `∫_0^t g(s, ·) ds` by the cumulative trapezoid rule on the time levels.
    Integrated(Box<Source>),
}

impl Source {
    pub fn analytic<F: Fn(f64, f64) -> f64 + Send + Sync + 'static>(f: F) -> Self {
        Source::Analytic(AnalyticFn::new(f))
    }

    pub fn integrated(self) -> Self {
        match self {
            Source::Zero => Source::Zero,
            Source::Nodal(f) => Source::Nodal(f.time_integral()),
            other => Source::Integrated(Box::new(other)),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Source::Zero)
    }

    pub(crate) fn check_axis(&self, grid: &Grid, times: &[f64]) -> Result<()> {
        match self {
            Source::Nodal(f) => {
                check_len(grid.n_nodes(), f.grid().n_nodes())?;
                check_len(times.len(), f.n_levels())?;
                let mismatch = f
                    .times()
                    .iter()
                    .zip(times)
                    .any(|(a, b)| (a - b).abs() > 1e-12 * (1.0 + b.abs()));
                if mismatch || f.grid().nodes() != grid.nodes() {
                    return Err(Error::Argument(
                        "source is sampled on a different grid or time axis".into(),
                    ));
                }
                Ok(())
            }
            Source::Integrated(inner) => inner.check_axis(grid, times),
            _ => Ok(()),
        }
    }

    /// Full load vectors `∫ f(t_k) φ_i` for every level.
    pub fn loads(&self, grid: &Grid, times: &[f64]) -> Result<Vec<Vec<f64>>> {
        self.check_axis(grid, times)?;
        let n = grid.n_nodes();
        Ok(match self {
            Source::Zero => vec![vec![0.0; n]; times.len()],
            Source::Nodal(f) => {
                let m = assemble_full_mass(grid);
                (0..times.len()).map(|k| m.apply(f.level(k))).collect()
            }
            Source::Analytic(f) => times
                .iter()
                .map(|&t| load_vector(grid, |x| f.eval(t, x)))
                .collect(),
            Source::Integrated(inner) => {
                let base = inner.loads(grid, times)?;
                let mut acc = vec![vec![0.0; n]; times.len()];
                for k in 1..times.len() {
                    let half = 0.5 * (times[k] - times[k - 1]);
                    for i in 0..n {
                        acc[k][i] = acc[k - 1][i] + half * (base[k - 1][i] + base[k][i]);
                    }
                }
                acc
            }
        })
    }

    /// Point value `f(t_k, x)`.
    pub fn eval(&self, grid: &Grid, times: &[f64], k: usize, x: f64) -> f64 {
        match self {
            Source::Zero => 0.0,
            Source::Nodal(f) => value_at(grid, f.level(k), x),
            Source::Analytic(f) => f.eval(times[k], x),
            Source::Integrated(inner) => {
                let vals: Vec<f64> = (0..=k).map(|j| inner.eval(grid, times, j, x)).collect();
                trapezoid(&times[..=k], &vals)
            }
        }
    }

    /// `‖f(t_k)‖_{L²}` (exact for nodal data, Gauss quadrature otherwise).
    pub fn l2_norm_at(&self, grid: &Grid, times: &[f64], k: usize) -> f64 {
        match self {
            Source::Zero => 0.0,
            Source::Nodal(f) => crate::spaces::l2_sq_on(grid, f.level(k), 0.0, 1.0).sqrt(),
            _ => integrate_over_grid(grid, |x| {
                let v = self.eval(grid, times, k, x);
                v * v
            })
            .sqrt(),
        }
    }

    /// `‖f‖_{L¹(0,T;L²)}`, trapezoid in time.
    pub fn l1_l2_norm(&self, grid: &Grid, times: &[f64]) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let norms: Vec<f64> = (0..times.len())
            .map(|k| self.l2_norm_at(grid, times, k))
            .collect();
        trapezoid(times, &norms)
    }

    /// Nodal samples on the given axis (for output and plotting).
    pub fn sample(&self, grid: &Arc<Grid>, times: &[f64]) -> SpaceTimeField {
        match self {
            Source::Nodal(f) => f.clone(),
            _ => {
                let g = grid.clone();
                let levels: Vec<Vec<f64>> = (0..times.len())
                    .map(|k| {
                        g.nodes()
                            .iter()
                            .map(|&x| self.eval(&g, times, k, x))
                            .collect()
                    })
                    .collect();
                SpaceTimeField::from_levels(grid.clone(), times.to_vec(), levels)
                    .expect("levels built from the same axis")
            }
        }
    }
}

/// `∫_0^1 f dx`, five-point Gauss per cell with geometric refinement of the
/// first cell (so `f` may carry an integrable power singularity at `x = 0`).
pub fn integrate_over_grid<F: Fn(f64) -> f64>(grid: &Grid, f: F) -> f64 {
    mesh_points(grid.nodes(), GaussRule::Five, FIRST_CELL_LEVELS)
        .into_iter()
        .map(|(_, x, w)| w * f(x))
        .sum()
}

pub(crate) const FIRST_CELL_LEVELS: usize = 24;

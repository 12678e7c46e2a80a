//! Time integration of `u_tt - (x^alpha u_x)_x = f` on `(0, T) x (0, 1)`.
//!
//! The semi-discrete system `M a + K u = b(t)` lives on the free P1 nodes
//! (`u(t, 1) = 0` always, `u(t, 0) = 0` in the weakly degenerate case). Two
//! integrators are provided: the average-acceleration Newmark scheme, which
//! conserves `½ vᵀMv + ½ uᵀKu` exactly when `f = 0`, and explicit leapfrog for
//! cross-checks.

mod mms;
mod source;
mod suite;
mod weak_form;

pub use mms::{
    convergence_study, manufactured_problem, ConvergenceRow, ConvergenceTable, Manufactured,
    MmsEntry,
};
pub use source::{integrate_over_grid, AnalyticFn, Source};
pub use suite::{
    hidden_regularity_ratio, random_suite, wellposedness_ratio, DatumSpec, ReferenceNoise,
};
pub use weak_form::{random_test_functions, weak_form_residual, TestFunction};

use crate::elliptic::{
    assemble_full_lumped_mass, assemble_full_mass, assemble_full_stiffness, free_range,
};
use crate::error::{Error, Result};
use crate::linalg::Tridiagonal;
use crate::spaces::{uniform_times, FieldKind, Grid, SpaceField, SpaceTimeField, TimeSeries};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    /// Newmark with `beta = 1/4`, `gamma = 1/2`.
    #[default]
    NewmarkAvgAccel,
    Leapfrog,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum MassKind {
    #[default]
    Consistent,
    Lumped,
}

pub const DEFAULT_CFL: f64 = 0.9;

/// Grid, horizon and integrator settings.
#[derive(Debug, Clone)]
pub struct WaveProblem {
    grid: Arc<Grid>,
    t_final: f64,
    nt: usize,
    pub scheme: Scheme,
    pub mass: MassKind,
    pub cfl: f64,
}

impl WaveProblem {
    pub fn new(grid: Arc<Grid>, t_final: f64, nt: usize) -> Result<Self> {
        if !(t_final > 0.0 && t_final.is_finite()) {
            return Err(Error::Config(format!(
                "final time must be positive, got {t_final}"
            )));
        }
        if nt == 0 {
            return Err(Error::Config("need at least one time step".into()));
        }
        Ok(Self {
            grid,
            t_final,
            nt,
            scheme: Scheme::default(),
            mass: MassKind::default(),
            cfl: DEFAULT_CFL,
        })
    }

    pub fn with_scheme(mut self, scheme: Scheme) -> Self {
        self.scheme = scheme;
        self
    }

    pub fn with_mass(mut self, mass: MassKind) -> Self {
        self.mass = mass;
        self
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn t_final(&self) -> f64 {
        self.t_final
    }

    pub fn nt(&self) -> usize {
        self.nt
    }

    pub fn dt(&self) -> f64 {
        self.t_final / self.nt as f64
    }

    pub fn times(&self) -> Vec<f64> {
        uniform_times(self.t_final, self.nt)
    }

    /// Largest stable leapfrog step. The consistent P1 mass matrix shrinks the
    /// limit by `1/√3` relative to the lumped one.
    pub fn leapfrog_dt_limit(&self) -> f64 {
        let factor = match self.mass {
            MassKind::Consistent => 1.0 / 3f64.sqrt(),
            MassKind::Lumped => 1.0,
        };
        self.cfl * self.grid.h_min() * factor
    }

    fn check(&self) -> Result<()> {
        if self.scheme == Scheme::Leapfrog && self.dt() > self.leapfrog_dt_limit() {
            return Err(Error::Config(format!(
                "leapfrog step {:.3e} exceeds the CFL limit {:.3e}; use at least {} steps",
                self.dt(),
                self.leapfrog_dt_limit(),
                (self.t_final / self.leapfrog_dt_limit()).ceil() as usize
            )));
        }
        Ok(())
    }
}

/// Source and initial data `(f, u0, u1)`.
#[derive(Debug, Clone)]
pub struct WaveData {
    pub f: Source,
    pub u0: SpaceField,
    pub u1: SpaceField,
}

impl WaveData {
    pub fn new(f: Source, u0: SpaceField, u1: SpaceField) -> Result<Self> {
        if u0.kind() != FieldKind::H1Alpha {
            return Err(Error::Argument(
                "initial displacement must be an H^1_alpha field".into(),
            ));
        }
        if u0.grid().nodes() != u1.grid().nodes() {
            return Err(Error::Argument(
                "initial data live on different grids".into(),
            ));
        }
        Ok(Self {
            f,
            u0,
            u1: u1.as_l2(),
        })
    }

    pub fn zero(grid: &Arc<Grid>) -> Self {
        Self {
            f: Source::Zero,
            u0: SpaceField::zeros(grid.clone(), FieldKind::H1Alpha),
            u1: SpaceField::zeros(grid.clone(), FieldKind::L2),
        }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        self.u0.grid()
    }

    pub fn is_zero(&self) -> bool {
        let zero = |v: &[f64]| v.iter().all(|x| *x == 0.0);
        self.f.is_zero() && zero(self.u0.values()) && zero(self.u1.values())
    }

    /// `‖f‖²_{L¹(0,T;L²)} + ‖u0‖²_{H¹_α} + ‖u1‖²_{L²}`.
    pub fn n0(&self, times: &[f64]) -> f64 {
        let f = self.f.l1_l2_norm(self.grid(), times);
        f * f + self.u0.h1_alpha_norm().powi(2) + self.u1.l2_norm_sq()
    }
}

/// Time history of a discrete weak solution.
#[derive(Debug, Clone, Serialize)]
pub struct WaveSolution {
    pub u: SpaceTimeField,
    /// `u_t`.
    pub v: SpaceTimeField,
    /// `u_tt` of the semi-discrete system.
    pub a: SpaceTimeField,
    /// `E(t_k) = ½∫(v² + x^alpha u_x²)` with exact quadrature.
    pub energy: TimeSeries,
    /// Recovered flux `u_x(t_k, 1)`.
    pub trace: TimeSeries,
    pub scheme: Scheme,
}

impl WaveSolution {
    pub fn grid(&self) -> &Arc<Grid> {
        self.u.grid()
    }

    pub fn times(&self) -> &[f64] {
        self.u.times()
    }

    /// `sup_k (‖u_t‖²_{L²} + ‖u‖²_{H¹_α})`.
    pub fn sup_state_norm_sq(&self) -> f64 {
        let grid = self.grid();
        (0..self.u.n_levels())
            .map(|k| {
                let u = self.u.level(k);
                crate::spaces::l2_sq_on(grid, self.v.level(k), 0.0, 1.0)
                    + crate::spaces::l2_sq_on(grid, u, 0.0, 1.0)
                    + crate::spaces::weighted_grad_sq_on(grid, u, 0.0, 1.0)
            })
            .fold(0.0, f64::max)
    }
}

/// `E(t_k)`.
pub fn energy(solution: &WaveSolution, k: usize) -> f64 {
    solution.energy.values[k]
}

/// `½ vᵀ M v + ½ uᵀ K u` with the consistent mass matrix.
pub fn discrete_energy(grid: &Grid, u: &[f64], v: &[f64]) -> f64 {
    let m = assemble_full_mass(grid);
    let k = assemble_full_stiffness(grid);
    0.5 * (dot(&m.apply(v), v) + dot(&k.apply(u), u))
}

/// Trace series `u_x(·, 1)` and `∫_0^T u_x(t, 1)² dt`.
pub fn boundary_trace(solution: &WaveSolution) -> (TimeSeries, f64) {
    let norm = solution.trace.l2_norm_sq();
    (solution.trace.clone(), norm)
}

/// Number of uniform steps with `dt <= courant * h` on `(0, t_final)`.
pub fn steps_for(t_final: f64, h: f64, courant: f64) -> usize {
    ((t_final / (courant * h)) * (1.0 - 1e-12)).ceil().max(1.0) as usize
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn restrict(v: &[f64], free: &std::ops::Range<usize>) -> Vec<f64> {
    v[free.clone()].to_vec()
}

struct System {
    free: std::ops::Range<usize>,
    n: usize,
    k_full: Tridiagonal,
    m_full: Tridiagonal,
    k: Tridiagonal,
    m: Tridiagonal,
}

impl System {
    fn new(grid: &Grid, mass: MassKind) -> Self {
        let free = free_range(grid);
        let k_full = assemble_full_stiffness(grid);
        let m_full = match mass {
            MassKind::Consistent => assemble_full_mass(grid),
            MassKind::Lumped => assemble_full_lumped_mass(grid),
        };
        Self {
            n: grid.n_nodes(),
            k: k_full.submatrix(free.clone()),
            m: m_full.submatrix(free.clone()),
            free,
            k_full,
            m_full,
        }
    }

    /// `b_free - K u` for a free-node vector `u`.
    fn residual_load(&self, load: &[f64], u: &[f64]) -> Vec<f64> {
        let ku = self.k.apply(u);
        load[self.free.clone()]
            .iter()
            .zip(ku)
            .map(|(b, k)| b - k)
            .collect()
    }

    fn full(&self, x: &[f64]) -> Vec<f64> {
        crate::elliptic::embed(&self.free, self.n, x)
    }
}

/// Integrates the weak problem and records energy and boundary flux.
pub fn solve_weak(problem: &WaveProblem, data: &WaveData) -> Result<WaveSolution> {
    problem.check()?;
    let grid = problem.grid().clone();
    if data.grid().nodes() != grid.nodes() || data.grid().alpha() != grid.alpha() {
        return Err(Error::Argument(
            "data and problem use different grids".into(),
        ));
    }
    let times = problem.times();
    let dt = problem.dt();
    let loads = data.f.loads(&grid, &times)?;
    let sys = System::new(&grid, problem.mass);

    let u0 = restrict(data.u0.values(), &sys.free);
    // L² projection of the initial velocity onto the constrained space
    let mu1 = sys.m_full.apply(data.u1.values());
    let v0 = sys.m.solve(&restrict(&mu1, &sys.free))?;
    let mass_lu = sys.m.factor()?;
    let mut a0 = sys.residual_load(&loads[0], &u0);
    mass_lu.solve_in_place(&mut a0)?;

    let levels = times.len();
    let mut us = Vec::with_capacity(levels);
    let mut vs = Vec::with_capacity(levels);
    let mut acc = Vec::with_capacity(levels);
    us.push(u0);
    vs.push(v0);
    acc.push(a0);

    match problem.scheme {
        Scheme::NewmarkAvgAccel => {
            let q = 0.25 * dt * dt;
            let lhs = sys.m.combine(1.0, &sys.k, q).factor()?;
            for k in 0..problem.nt {
                let (u, v, a) = (&us[k], &vs[k], &acc[k]);
                let predictor: Vec<f64> =
                    (0..u.len()).map(|i| u[i] + dt * v[i] + q * a[i]).collect();
                let mut a_new = sys.residual_load(&loads[k + 1], &predictor);
                lhs.solve_in_place(&mut a_new)?;
                let u_new: Vec<f64> = predictor
                    .iter()
                    .zip(&a_new)
                    .map(|(p, a)| p + q * a)
                    .collect();
                let v_new: Vec<f64> = (0..u.len())
                    .map(|i| v[i] + 0.5 * dt * (a[i] + a_new[i]))
                    .collect();
                us.push(u_new);
                vs.push(v_new);
                acc.push(a_new);
            }
        }
        Scheme::Leapfrog => {
            for k in 0..problem.nt {
                let u_new: Vec<f64> = if k == 0 {
                    (0..us[0].len())
                        .map(|i| us[0][i] + dt * vs[0][i] + 0.5 * dt * dt * acc[0][i])
                        .collect()
                } else {
                    (0..us[k].len())
                        .map(|i| 2.0 * us[k][i] - us[k - 1][i] + dt * dt * acc[k][i])
                        .collect()
                };
                let mut a_new = sys.residual_load(&loads[k + 1], &u_new);
                mass_lu.solve_in_place(&mut a_new)?;
                us.push(u_new);
                acc.push(a_new);
                if k >= 1 {
                    let v: Vec<f64> = (0..us[k].len())
                        .map(|i| (us[k + 1][i] - us[k - 1][i]) / (2.0 * dt))
                        .collect();
                    vs.push(v);
                }
            }
            let last = problem.nt;
            if last >= 1 {
                if vs.len() == last {
                    // one step only: v_1 from the velocity update
                    let v: Vec<f64> = (0..us[last].len())
                        .map(|i| vs[0][i] + 0.5 * dt * (acc[0][i] + acc[last][i]))
                        .collect();
                    vs.push(v);
                } else {
                    let v: Vec<f64> = (0..us[last].len())
                        .map(|i| (us[last][i] - us[last - 1][i]) / dt + 0.5 * dt * acc[last][i])
                        .collect();
                    vs.push(v);
                }
            }
        }
    }

    let u_full: Vec<Vec<f64>> = us.iter().map(|x| sys.full(x)).collect();
    let v_full: Vec<Vec<f64>> = vs.iter().map(|x| sys.full(x)).collect();
    let a_full: Vec<Vec<f64>> = acc.iter().map(|x| sys.full(x)).collect();

    let m_exact = assemble_full_mass(&grid);
    let last = sys.n - 1;
    let mut energy = Vec::with_capacity(levels);
    let mut trace = Vec::with_capacity(levels);
    for k in 0..levels {
        let (u, v, a) = (&u_full[k], &v_full[k], &a_full[k]);
        energy.push(0.5 * (dot(&m_exact.apply(v), v) + dot(&sys.k_full.apply(u), u)));
        trace.push(flux_at_right_end(&sys, u, a, &loads[k], last));
    }

    Ok(WaveSolution {
        u: SpaceTimeField::from_levels(grid.clone(), times.clone(), u_full)?,
        v: SpaceTimeField::from_levels(grid.clone(), times.clone(), v_full)?,
        a: SpaceTimeField::from_levels(grid.clone(), times.clone(), a_full)?,
        energy: TimeSeries::new(times.clone(), energy)?,
        trace: TimeSeries::new(times, trace)?,
        scheme: problem.scheme,
    })
}

/// Tested against the hat function of `x = 1`, the weak form leaves the
/// boundary term `x^alpha u_x φ |_{x=1} = u_x(t, 1)` as the residual of the
/// last row.
fn flux_at_right_end(sys: &System, u: &[f64], a: &[f64], load: &[f64], row: usize) -> f64 {
    let mut r = sys.m_full.diag[row] * a[row] + sys.k_full.diag[row] * u[row] - load[row];
    if row > 0 {
        r += sys.m_full.lower[row - 1] * a[row - 1] + sys.k_full.lower[row - 1] * u[row - 1];
    }
    r
}

/// Solves for `u_tt(0)` alone, used where only the initial state is needed.
pub fn initial_acceleration(
    grid: &Arc<Grid>,
    data: &WaveData,
    times: &[f64],
) -> Result<SpaceField> {
    let sys = System::new(grid, MassKind::Consistent);
    let load = data.f.loads(grid, &times[..1])?;
    let u0 = restrict(data.u0.values(), &sys.free);
    let a = sys.m.solve(&sys.residual_load(&load[0], &u0))?;
    SpaceField::new(grid.clone(), sys.full(&a), FieldKind::H1Alpha)
}

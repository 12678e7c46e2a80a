//! Very weak solutions for data in `L² × H⁻¹_α` through the lifting
//! `ψ(t) = ψ⁰ + ∫_0^t z`, plus the duality and liminf experiments built on them.
//!
//! With `(x^α ψ⁰_x)_x = z¹` and `G(t) = ∫_0^t g`, the function `ψ` is the weak
//! solution for `(G, ψ⁰, z⁰)` and `z = ψ_t`.

use crate::elliptic::{
    assemble_full_mass, assemble_full_stiffness, assemble_stiffness, h_minus1_norm,
    solve_degenerate_poisson, DualElement,
};
use crate::error::{Error, Result};
use crate::estimators::theta_functional;
use crate::quadrature::trapezoid;
use crate::spaces::{FieldKind, Grid, SpaceField, SpaceTimeField, TimeSeries};
use crate::wave::{solve_weak, MmsEntry, Source, WaveData, WaveProblem, WaveSolution};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// Source `g ∈ L¹(0,T;L²)`, `z⁰ ∈ L²` and `z¹ ∈ H⁻¹_α`.
#[derive(Debug, Clone)]
pub struct VeryWeakData {
    pub g: Source,
    pub z0: SpaceField,
    pub z1: DualElement,
}

impl VeryWeakData {
    pub fn new(g: Source, z0: SpaceField, z1: DualElement) -> Result<Self> {
        if z0.grid().nodes() != z1.grid().nodes() {
            return Err(Error::Argument(
                "initial data live on different grids".into(),
            ));
        }
        Ok(Self {
            g,
            z0: z0.as_l2(),
            z1,
        })
    }

    pub fn zero(grid: &Arc<Grid>) -> Self {
        Self {
            g: Source::Zero,
            z0: SpaceField::zeros(grid.clone(), FieldKind::L2),
            z1: DualElement::L2(SpaceField::zeros(grid.clone(), FieldKind::L2)),
        }
    }

    /// Regular data `(f, u0, u1)` read as `(g, z⁰, z¹)`.
    pub fn from_wave_data(data: &WaveData) -> Self {
        Self {
            g: data.f.clone(),
            z0: data.u0.as_l2(),
            z1: DualElement::L2(data.u1.clone()),
        }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        self.z0.grid()
    }

    /// `‖g‖²_{L¹L²} + ‖z¹‖²_{H⁻¹_α} + ‖z⁰‖²_{L²}`.
    pub fn size(&self, times: &[f64]) -> Result<f64> {
        let g = self.g.l1_l2_norm(self.grid(), times);
        Ok(g * g + h_minus1_norm(&self.z1)?.powi(2) + self.z0.l2_norm_sq())
    }
}

#[derive(Debug, Clone)]
pub struct VeryWeakSolution {
    /// `z = ψ_t`.
    pub z: SpaceTimeField,
    pub psi: WaveSolution,
    pub psi0: SpaceField,
    pub problem: WaveProblem,
}

impl VeryWeakSolution {
    /// `z_t(t_k) = ψ_tt(t_k)` as an `H⁻¹_α` element.
    pub fn z_t(&self, k: usize) -> Result<DualElement> {
        Ok(DualElement::L2(self.psi.a.level_field(k, FieldKind::L2)?))
    }

    /// `z_x(·, 1)`, the time derivative of the lifted trace.
    pub fn trace(&self) -> TimeSeries {
        self.psi.trace.derivative()
    }

    /// `sup_k (‖z(t_k)‖²_{L²} + ‖z_t(t_k)‖²_{H⁻¹_α})`.
    pub fn sup_state_norm_sq(&self) -> Result<f64> {
        let norms = (0..self.z.n_levels())
            .into_par_iter()
            .map(|k| {
                let z = self.z.level_field(k, FieldKind::L2)?.l2_norm_sq();
                Ok(z + h_minus1_norm(&self.z_t(k)?)?.powi(2))
            })
            .collect::<Result<Vec<f64>>>()?;
        Ok(norms.into_iter().fold(0.0, f64::max))
    }
}

/// `ψ⁰ ∈ H¹_α` with `(x^α ψ⁰_x)_x = z¹`.
pub fn lift_initial_velocity(z1: &DualElement) -> Result<SpaceField> {
    match z1 {
        DualElement::L2(z) => solve_degenerate_poisson(z),
        // ⟨z¹, v⟩ = ∫x^α ũ_x v_x = -∫x^α ψ⁰_x v_x
        DualElement::Representative(r) => Ok(r.scaled(-1.0)),
    }
}

pub fn solve_very_weak(data: &VeryWeakData, problem: &WaveProblem) -> Result<VeryWeakSolution> {
    if data.grid().nodes() != problem.grid().nodes() {
        return Err(Error::Argument(
            "data and problem live on different grids".into(),
        ));
    }
    let psi0 = lift_initial_velocity(&data.z1)?;
    let lifted = WaveData::new(data.g.clone().integrated(), psi0.clone(), data.z0.clone())?;
    let psi = solve_weak(problem, &lifted)?;
    Ok(VeryWeakSolution {
        z: psi.v.clone(),
        psi,
        psi0,
        problem: problem.clone(),
    })
}

/// `sup_t(‖z‖² + ‖z_t‖²_{H⁻¹_α}) / (‖g‖²_{L¹L²} + ‖z¹‖²_{H⁻¹_α} + ‖z⁰‖²)`, or
/// `None` for zero data.
pub fn very_weak_ratio(solution: &VeryWeakSolution, data: &VeryWeakData) -> Result<Option<f64>> {
    let size = data.size(solution.z.times())?;
    if size <= 0.0 {
        return Ok(None);
    }
    Ok(Some(solution.sup_state_norm_sq()? / size))
}

/// A smooth bump `A b(t; t0, t1) b(x; x0, x1)` with `b = (4(s-a)(c-s)/(c-a)²)⁴`
/// inside `(a, c)` and zero outside.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bump {
    pub t0: f64,
    pub t1: f64,
    pub x0: f64,
    pub x1: f64,
    pub amplitude: f64,
}

fn bump_1d(s: f64, a: f64, c: f64) -> f64 {
    if s <= a || s >= c {
        return 0.0;
    }
    let r = 4.0 * (s - a) * (c - s) / ((c - a) * (c - a));
    r.powi(4)
}

impl Bump {
    pub fn eval(&self, t: f64, x: f64) -> f64 {
        self.amplitude * bump_1d(t, self.t0, self.t1) * bump_1d(x, self.x0, self.x1)
    }

    /// Support strictly inside `(0, T) × (0, 1)`.
    pub fn check_support(&self, t_final: f64) -> Result<()> {
        let ok = 0.0 < self.t0
            && self.t0 < self.t1
            && self.t1 < t_final
            && 0.0 < self.x0
            && self.x0 < self.x1
            && self.x1 < 1.0;
        if ok {
            Ok(())
        } else {
            Err(Error::Argument(format!(
                "bump support ({}, {}) x ({}, {}) is not compact in (0, {t_final}) x (0, 1)",
                self.t0, self.t1, self.x0, self.x1
            )))
        }
    }

    pub fn source(&self) -> Source {
        let b = *self;
        Source::analytic(move |t, x| b.eval(t, x))
    }
}

/// Three bumps: central, near `x = 1` and near `x = 0`.
pub fn bump_catalog(t_final: f64) -> Vec<Bump> {
    let t = |s: f64| s * t_final;
    vec![
        Bump {
            t0: t(0.2),
            t1: t(0.7),
            x0: 0.3,
            x1: 0.7,
            amplitude: 1.0,
        },
        Bump {
            t0: t(0.1),
            t1: t(0.5),
            x0: 0.6,
            x1: 0.95,
            amplitude: 2.0,
        },
        Bump {
            t0: t(0.4),
            t1: t(0.9),
            x0: 0.05,
            x1: 0.4,
            amplitude: 1.5,
        },
    ]
}

/// Both sides of `∬ zF = -(z⁰, θ_t(0)) + ⟨z¹, θ(0)⟩ + ∬ gθ`, where `θ` solves
/// the adjoint problem with `θ(T) = θ_t(T) = 0`.
#[derive(Debug, Clone, Serialize)]
pub struct DualityReport {
    pub lhs: f64,
    pub initial_value: f64,
    pub initial_velocity: f64,
    pub source: f64,
    pub rhs: f64,
    /// `|lhs - rhs| / max(|terms|)`, zero when every term vanishes.
    pub residual: f64,
}

/// Adjoint state `(θ, θ_t)` on the forward time axis, by running the forward
/// integrator on `τ = T - t`.
pub fn solve_adjoint(
    problem: &WaveProblem,
    bump: &Bump,
) -> Result<(SpaceTimeField, SpaceTimeField)> {
    bump.check_support(problem.t_final())?;
    let t_final = problem.t_final();
    let b = *bump;
    let reversed = WaveData {
        f: Source::analytic(move |tau, x| b.eval(t_final - tau, x)),
        ..WaveData::zero(problem.grid())
    };
    let eta = solve_weak(problem, &reversed)?;
    let theta = eta.u.time_reversed();
    let theta_t = eta.v.time_reversed().scaled(-1.0);
    Ok((theta, theta_t))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn space_time_pairing(loads: &[Vec<f64>], field: &SpaceTimeField) -> f64 {
    let per_level: Vec<f64> = loads
        .iter()
        .enumerate()
        .map(|(k, l)| dot(l, field.level(k)))
        .collect();
    trapezoid(field.times(), &per_level)
}

/// Evaluates the transposition identity for one bump.
pub fn duality_residual(
    solution: &VeryWeakSolution,
    data: &VeryWeakData,
    bump: &Bump,
) -> Result<DualityReport> {
    let (theta, theta_t) = solve_adjoint(&solution.problem, bump)?;
    let grid = solution.z.grid();
    let times = solution.z.times();
    let lhs = space_time_pairing(&bump.source().loads(grid, times)?, &solution.z);
    let mass = assemble_full_mass(grid);
    let initial_velocity = -dot(&mass.apply(data.z0.values()), theta_t.level(0));
    // ⟨z¹, θ(0)⟩ = ∫ (x^α ψ⁰_x)_x θ(0) = -∫ x^α ψ⁰_x θ_x(0)
    let initial_value = -dot(
        &assemble_full_stiffness(grid).apply(solution.psi0.values()),
        theta.level(0),
    );
    let source = if data.g.is_zero() {
        0.0
    } else {
        space_time_pairing(&data.g.loads(grid, times)?, &theta)
    };
    let rhs = initial_velocity + initial_value + source;
    let scale = [lhs, initial_velocity, initial_value, source]
        .iter()
        .fold(0.0_f64, |m, v| m.max(v.abs()));
    let residual = if scale > 0.0 {
        (lhs - rhs).abs() / scale
    } else {
        0.0
    };
    Ok(DualityReport {
        lhs,
        initial_value,
        initial_velocity,
        source,
        rhs,
        residual,
    })
}

/// Named generators of a family `(h_ε, φ⁰_ε, φ¹_ε)` and its limit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum FamilySpec {
    Zero,
    /// `φ_ε = φ = cos t (x - x²)` for every `ε`; needs `α > 1/2`.
    ConstantMms,
    /// The constant family with `φ⁰_ε = (x - x²)(1 + A sin(2πx/ε))`, which
    /// converges to the limit only weakly.
    Oscillating {
        amplitude: f64,
    },
}

impl FamilySpec {
    pub fn name(&self) -> &'static str {
        match self {
            FamilySpec::Zero => "zero",
            FamilySpec::ConstantMms => "constant-mms",
            FamilySpec::Oscillating { .. } => "oscillating",
        }
    }

    pub fn parse(name: &str, amplitude: f64) -> Result<Self> {
        match name {
            "zero" => Ok(FamilySpec::Zero),
            "constant-mms" => Ok(FamilySpec::ConstantMms),
            "oscillating" => Ok(FamilySpec::Oscillating { amplitude }),
            other => Err(Error::Config(format!(
                "unknown family `{other}` (expected zero, constant-mms or oscillating)"
            ))),
        }
    }

    /// Member data for `ε`, or the limit for `None`.
    pub fn member(&self, grid: &Arc<Grid>, epsilon: Option<f64>) -> Result<VeryWeakData> {
        let entry = MmsEntry::Quadratic;
        match self {
            FamilySpec::Zero => Ok(VeryWeakData::zero(grid)),
            FamilySpec::ConstantMms | FamilySpec::Oscillating { .. } => {
                entry.check(grid.param())?;
                let alpha = grid.alpha();
                let wiggle = match (self, epsilon) {
                    (FamilySpec::Oscillating { amplitude }, Some(e)) => Some((*amplitude, e)),
                    _ => None,
                };
                let z0 = SpaceField::from_fn(grid.clone(), FieldKind::L2, |x| {
                    let base = entry.u(0.0, x);
                    match wiggle {
                        Some((a, e)) => {
                            base * (1.0 + a * (2.0 * std::f64::consts::PI * x / e).sin())
                        }
                        None => base,
                    }
                })?;
                VeryWeakData::new(
                    Source::analytic(move |t, x| entry.source(alpha, t, x)),
                    z0,
                    DualElement::L2(SpaceField::zeros(grid.clone(), FieldKind::L2)),
                )
            }
        }
    }
}

/// Ten fixed smooth test functions `q_j(x) = sin(jπx)`, `c_j(t) = cos((j-1)πt/T)`.
const BATTERY: usize = 10;

fn battery_space(j: usize, x: f64) -> f64 {
    ((j + 1) as f64 * std::f64::consts::PI * x).sin()
}

fn battery_time(j: usize, t: f64, t_final: f64) -> f64 {
    (j as f64 * std::f64::consts::PI * t / t_final).cos()
}

#[derive(Debug, Clone)]
pub struct ConvergentFamily {
    pub spec: FamilySpec,
    pub epsilons: Vec<f64>,
    pub members: Vec<VeryWeakData>,
    pub limit: VeryWeakData,
}

impl ConvergentFamily {
    /// `epsilons` must decrease strictly.
    pub fn build(spec: FamilySpec, grid: &Arc<Grid>, epsilons: &[f64]) -> Result<Self> {
        if epsilons.is_empty() || epsilons.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::Config(format!(
                "epsilon grid {epsilons:?} must be nonempty and decreasing"
            )));
        }
        Ok(Self {
            spec,
            epsilons: epsilons.to_vec(),
            members: epsilons
                .iter()
                .map(|&e| spec.member(grid, Some(e)))
                .collect::<Result<_>>()?,
            limit: spec.member(grid, None)?,
        })
    }

    /// Largest pairing of `(h_ε - h, φ⁰_ε - φ⁰, φ¹_ε - φ¹)` against the test battery,
    /// one value per member.
    pub fn weak_defects(&self, times: &[f64]) -> Result<Vec<f64>> {
        let grid = self.limit.grid();
        let t_final = *times.last().unwrap_or(&1.0);
        let mass = assemble_full_mass(grid);
        let tests: Vec<Vec<f64>> = (0..BATTERY)
            .map(|j| grid.nodes().iter().map(|&x| battery_space(j, x)).collect())
            .collect();
        let limit_loads = self.limit.g.loads(grid, times)?;
        self.members
            .iter()
            .map(|m| {
                let loads = m.g.loads(grid, times)?;
                let dz0: Vec<f64> =
                    m.z0.values()
                        .iter()
                        .zip(self.limit.z0.values())
                        .map(|(a, b)| a - b)
                        .collect();
                let mdz0 = mass.apply(&dz0);
                let mut worst = 0.0_f64;
                for (j, q) in tests.iter().enumerate() {
                    let per_level: Vec<f64> = (0..times.len())
                        .map(|k| {
                            let d: f64 = loads[k]
                                .iter()
                                .zip(&limit_loads[k])
                                .zip(q)
                                .map(|((a, b), c)| (a - b) * c)
                                .sum();
                            d * battery_time(j, times[k], t_final)
                        })
                        .collect();
                    let h = trapezoid(times, &per_level).abs();
                    let p0 = dot(&mdz0, q).abs();
                    let p1 = (m.z1.pair(q)? - self.limit.z1.pair(q)?).abs();
                    worst = worst.max(h).max(p0).max(p1);
                }
                Ok(worst)
            })
            .collect()
    }
}

/// How the liminf over `ε → 0⁺` is estimated from a finite decreasing grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum LiminfEstimator {
    /// Least-squares line through the tail half of the grid, evaluated at `ε = 0`.
    #[default]
    Extrapolated,
    /// Minimum over the tail half of the grid.
    TailMin,
}

/// Ratio `max Θ_ε / Θ_{ε_first}` above which `Θ_ε` is not treated as bounded.
pub const THETA_GROWTH_LIMIT: f64 = 4.0;

#[derive(Debug, Clone, Serialize)]
pub struct LiminfReport {
    pub epsilons: Vec<f64>,
    pub theta: Vec<f64>,
    /// Indices of the tail half used by both estimators.
    pub tail: Vec<usize>,
    pub estimator: LiminfEstimator,
    pub tail_min: f64,
    pub extrapolated: f64,
    pub liminf_estimate: f64,
    /// `‖φ_x(·,1)‖²_{L²(0,T)}` of the limit.
    pub trace_norm_sq: f64,
    /// `‖φ_x(·,1)‖² / 3`.
    pub lower_bound: f64,
    pub hypothesis_ok: bool,
    /// `liminf_estimate - lower_bound`, absent when the hypothesis fails.
    pub slack: Option<f64>,
    pub weak_defects: Vec<f64>,
}

impl LiminfReport {
    /// `|Θ_ε - target|` along the grid decreases strictly.
    pub fn theta_approaches(&self, target: f64) -> bool {
        self.theta
            .windows(2)
            .all(|w| (w[1] - target).abs() < (w[0] - target).abs())
    }

    /// Weak defects do not grow along the grid.
    pub fn weakly_convergent(&self) -> bool {
        self.weak_defects
            .windows(2)
            .all(|w| w[1] <= w[0] * (1.0 + 1e-9) + 1e-14)
    }
}

fn tail_indices(n: usize) -> Vec<usize> {
    let len = n.div_ceil(2).max(2).min(n);
    (n - len..n).collect()
}

fn extrapolate_to_zero(xs: &[f64], ys: &[f64]) -> f64 {
    if xs.len() < 2 {
        return ys.first().copied().unwrap_or(0.0);
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    my - sxy / sxx * mx
}

/// Builds the report from precomputed `Θ_ε` values.
pub fn liminf_from_theta(
    epsilons: &[f64],
    theta: Vec<f64>,
    trace_norm_sq: f64,
    estimator: LiminfEstimator,
    weak_defects: Vec<f64>,
) -> LiminfReport {
    let tail = tail_indices(theta.len());
    let xs: Vec<f64> = tail.iter().map(|&i| epsilons[i]).collect();
    let ys: Vec<f64> = tail.iter().map(|&i| theta[i]).collect();
    let tail_min = ys.iter().copied().fold(f64::INFINITY, f64::min);
    let extrapolated = extrapolate_to_zero(&xs, &ys);
    let liminf_estimate = match estimator {
        LiminfEstimator::Extrapolated => extrapolated,
        LiminfEstimator::TailMin => tail_min,
    };
    let first = theta.first().copied().unwrap_or(0.0);
    let max = theta.iter().copied().fold(0.0_f64, f64::max);
    let hypothesis_ok = theta.iter().all(|v| v.is_finite())
        && max <= THETA_GROWTH_LIMIT * first.max(f64::MIN_POSITIVE);
    let lower_bound = trace_norm_sq / 3.0;
    if !hypothesis_ok {
        log::warn!("Θ_ε grows along the grid ({theta:?}); no slack asserted");
    }
    LiminfReport {
        epsilons: epsilons.to_vec(),
        theta,
        tail,
        estimator,
        tail_min,
        extrapolated,
        liminf_estimate,
        trace_norm_sq,
        lower_bound,
        hypothesis_ok,
        slack: hypothesis_ok.then_some(liminf_estimate - lower_bound),
        weak_defects,
    }
}

/// Solves every family member and the limit (in parallel), computes `Θ_ε` of
/// each member on its own neighbourhood and the limit trace through the lifting.
pub fn liminf_experiment(
    family: &ConvergentFamily,
    problem: &WaveProblem,
    estimator: LiminfEstimator,
) -> Result<LiminfReport> {
    let times = problem.times();
    let theta = family
        .members
        .par_iter()
        .zip(family.epsilons.par_iter())
        .map(|(m, &e)| theta_functional(&solve_very_weak(m, problem)?.z, e))
        .collect::<Result<Vec<f64>>>()?;
    let limit = solve_very_weak(&family.limit, problem)?;
    let trace_norm_sq = limit.trace().l2_norm_sq();
    let defects = family.weak_defects(&times)?;
    Ok(liminf_from_theta(
        &family.epsilons,
        theta,
        trace_norm_sq,
        estimator,
        defects,
    ))
}

/// Control case `φ_ε = w = (1 - x) u(t)` for every `ε`, with `w_x(t, 1) = -u(t)`.
pub fn w_field_control<U: Fn(f64) -> f64>(
    grid: &Arc<Grid>,
    times: Vec<f64>,
    u: U,
    epsilons: &[f64],
    estimator: LiminfEstimator,
) -> Result<LiminfReport> {
    let w = SpaceTimeField::from_fn(grid.clone(), times.clone(), |t, x| (1.0 - x) * u(t));
    let theta = epsilons
        .iter()
        .map(|&e| theta_functional(&w, e))
        .collect::<Result<Vec<f64>>>()?;
    let trace = TimeSeries::new(times.clone(), times.iter().map(|&t| -u(t)).collect())?;
    let defects = vec![0.0; epsilons.len()];
    Ok(liminf_from_theta(
        epsilons,
        theta,
        trace.l2_norm_sq(),
        estimator,
        defects,
    ))
}

/// Pairing `⟨z¹, v⟩` computed as `∫ x^α ψ⁰_x v_x` with the given sign, for the
/// sign-convention test.
pub fn lifted_pairing(psi0: &SpaceField, v: &[f64], sign: f64) -> f64 {
    sign * assemble_stiffness(psi0.grid()).energy_product(psi0.values(), v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::uniform_times;
    use crate::wave::random_suite;
    use crate::DegeneracyParam;
    use approx::assert_relative_eq;

    fn grid(n: usize, alpha: f64) -> Arc<Grid> {
        Arc::new(Grid::uniform(n, DegeneracyParam::new(alpha).unwrap()).unwrap())
    }

    fn l2(g: &Arc<Grid>, f: impl Fn(f64) -> f64) -> SpaceField {
        SpaceField::from_fn(g.clone(), FieldKind::L2, f).unwrap()
    }

    fn max_err(a: &SpaceField, f: impl Fn(f64) -> f64) -> f64 {
        a.grid()
            .nodes()
            .iter()
            .zip(a.values())
            .map(|(&x, v)| (v - f(x)).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn lifting_examples() {
        let g = grid(64, 1.0);
        let zero = lift_initial_velocity(&DualElement::L2(l2(&g, |_| 0.0))).unwrap();
        assert!(zero.values().iter().all(|v| *v == 0.0));
        // P1 with a variable weight is not nodally exact: O(h²)
        let psi0 = lift_initial_velocity(&DualElement::L2(l2(&g, |x| 1.0 - 4.0 * x))).unwrap();
        assert!(max_err(&psi0, |x| x - x * x) < 1e-3);

        let g = grid(256, 1.5);
        let psi0 = lift_initial_velocity(&DualElement::L2(l2(&g, |x| -1.5 * x.sqrt()))).unwrap();
        assert!(
            max_err(&psi0, |x| 1.0 - x) < 1e-2,
            "{}",
            max_err(&psi0, |x| 1.0 - x)
        );
    }

    #[test]
    fn representative_lifting_is_minus_representative() {
        let g = grid(32, 1.0);
        let z1 = DualElement::L2(l2(&g, |x| 1.0 - 4.0 * x));
        let r = z1.representative().unwrap();
        let psi0 = lift_initial_velocity(&DualElement::Representative(r)).unwrap();
        assert!(max_err(&psi0, |x| x - x * x) < 1e-3);
    }

    #[test]
    fn zero_data_gives_zero_solution() {
        let g = grid(32, 0.5);
        let p = WaveProblem::new(g.clone(), 1.0, 16).unwrap();
        let d = VeryWeakData::zero(&g);
        let s = solve_very_weak(&d, &p).unwrap();
        assert!(s.z.raw_values().iter().all(|v| *v == 0.0));
        assert_eq!(very_weak_ratio(&s, &d).unwrap(), None);
        let r = duality_residual(&s, &d, &bump_catalog(1.0)[0]).unwrap();
        assert_eq!(r.residual, 0.0);
        assert_eq!(r.lhs, 0.0);
    }

    fn regular_data(g: &Arc<Grid>) -> VeryWeakData {
        VeryWeakData::new(
            Source::Zero,
            l2(g, |x| x - x * x),
            DualElement::L2(l2(g, |_| 0.0)),
        )
        .unwrap()
    }

    fn rough_data(g: &Arc<Grid>) -> VeryWeakData {
        VeryWeakData::new(
            Source::Zero,
            l2(g, |_| 0.0),
            DualElement::L2(l2(g, |x| 1.0 - 4.0 * x)),
        )
        .unwrap()
    }

    #[test]
    fn very_weak_matches_weak_on_regular_data() {
        let g = grid(256, 1.0);
        let p = WaveProblem::new(g.clone(), 1.0, 256).unwrap();
        let s = solve_very_weak(&regular_data(&g), &p).unwrap();
        let u0 = SpaceField::from_fn(g.clone(), FieldKind::H1Alpha, |x| x - x * x).unwrap();
        let direct = solve_weak(
            &p,
            &WaveData::new(Source::Zero, u0, l2(&g, |_| 0.0)).unwrap(),
        )
        .unwrap();
        let worst = (0..=256)
            .map(|k| {
                let d: Vec<f64> =
                    s.z.level(k)
                        .iter()
                        .zip(direct.u.level(k))
                        .map(|(a, b)| a - b)
                        .collect();
                SpaceField::new(g.clone(), d, FieldKind::L2)
                    .unwrap()
                    .l2_norm()
            })
            .fold(0.0, f64::max);
        assert!(worst <= 1e-3, "{worst}");
    }

    #[test]
    fn initial_velocity_is_recovered_in_dual_norm() {
        let g = grid(256, 1.0);
        let p = WaveProblem::new(g.clone(), 1.0, 256).unwrap();
        let d = rough_data(&g);
        let s = solve_very_weak(&d, &p).unwrap();
        assert!(s.z.level(0).iter().all(|v| v.abs() < 1e-14));
        let zt0 = s.psi.a.level(0);
        let diff: Vec<f64> = zt0
            .iter()
            .zip(g.nodes())
            .map(|(a, &x)| a - (1.0 - 4.0 * x))
            .collect();
        let e = h_minus1_norm(&DualElement::L2(
            SpaceField::new(g.clone(), diff, FieldKind::L2).unwrap(),
        ))
        .unwrap();
        assert!(e <= 1e-2, "{e}");
    }

    #[test]
    fn bump_support_is_checked() {
        let g = grid(16, 1.0);
        let p = WaveProblem::new(g.clone(), 1.0, 8).unwrap();
        let d = VeryWeakData::zero(&g);
        let s = solve_very_weak(&d, &p).unwrap();
        let bad = Bump {
            t0: 0.0,
            t1: 0.5,
            x0: 0.2,
            x1: 0.4,
            amplitude: 1.0,
        };
        assert!(matches!(
            duality_residual(&s, &d, &bad),
            Err(Error::Argument(_))
        ));
        let bad = Bump {
            t0: 0.1,
            t1: 0.5,
            x0: 0.2,
            x1: 1.0,
            amplitude: 1.0,
        };
        assert!(bad.check_support(1.0).is_err());
        for b in bump_catalog(2.0) {
            b.check_support(2.0).unwrap();
        }
    }

    fn duality_at(n: usize, data: fn(&Arc<Grid>) -> VeryWeakData) -> Vec<f64> {
        let g = grid(n, 1.0);
        let p = WaveProblem::new(g.clone(), 1.0, n).unwrap();
        let d = data(&g);
        let s = solve_very_weak(&d, &p).unwrap();
        bump_catalog(1.0)
            .iter()
            .map(|b| duality_residual(&s, &d, b).unwrap().residual)
            .collect()
    }

    #[test]
    fn duality_residual_shrinks() {
        for (data, tol) in [
            (regular_data as fn(&Arc<Grid>) -> VeryWeakData, 1e-3),
            (rough_data, 1e-2),
        ] {
            let coarse = duality_at(64, data);
            let mid = duality_at(128, data);
            let fine = duality_at(256, data);
            for i in 0..coarse.len() {
                assert!(
                    fine[i] < mid[i] && mid[i] < coarse[i],
                    "{coarse:?} {mid:?} {fine:?}"
                );
                assert!(fine[i] <= tol, "{fine:?}");
            }
        }
    }

    #[test]
    fn pairing_sign_convention() {
        // ⟨z¹, θ⟩ = ∫ z¹ θ must equal -∫ x^α ψ⁰_x θ_x for the lifted ψ⁰
        let g = grid(128, 1.0);
        let z1 = l2(&g, |x| 1.0 - 4.0 * x);
        let psi0 = lift_initial_velocity(&DualElement::L2(z1.clone())).unwrap();
        let theta: Vec<f64> = g
            .nodes()
            .iter()
            .map(|&x| (std::f64::consts::PI * x).sin())
            .collect();
        let direct = DualElement::L2(z1).pair(&theta).unwrap();
        assert_relative_eq!(
            lifted_pairing(&psi0, &theta, -1.0),
            direct,
            max_relative = 1e-10
        );
        assert!((lifted_pairing(&psi0, &theta, 1.0) - direct).abs() > 0.1 * direct.abs());
    }

    #[test]
    fn w_field_control_has_zero_slack() {
        let g = grid(200, 1.0);
        let r = w_field_control(
            &g,
            uniform_times(2.0, 40),
            |_| 1.0,
            &[0.4, 0.2, 0.1, 0.05],
            LiminfEstimator::default(),
        )
        .unwrap();
        for t in &r.theta {
            assert!((t - 2.0 / 3.0).abs() <= 1e-10);
        }
        assert!((r.trace_norm_sq - 2.0).abs() <= 1e-12);
        assert!(r.slack.unwrap().abs() <= 1e-10);
        let tm = w_field_control(
            &g,
            uniform_times(2.0, 40),
            |_| 1.0,
            &[0.4, 0.2, 0.1, 0.05],
            LiminfEstimator::TailMin,
        )
        .unwrap();
        assert!(tm.slack.unwrap().abs() <= 1e-10);
    }

    #[test]
    fn extrapolation_and_tail() {
        assert_eq!(tail_indices(3), vec![1, 2]);
        assert_eq!(tail_indices(4), vec![2, 3]);
        assert_eq!(tail_indices(5), vec![2, 3, 4]);
        assert_relative_eq!(
            extrapolate_to_zero(&[0.1, 0.05], &[1.2, 1.1]),
            1.0,
            max_relative = 1e-12
        );
    }

    #[test]
    fn growing_theta_flags_hypothesis() {
        let r = liminf_from_theta(
            &[0.4, 0.2, 0.1],
            vec![1.0, 10.0, 100.0],
            1.0,
            LiminfEstimator::TailMin,
            vec![],
        );
        assert!(!r.hypothesis_ok);
        assert!(r.slack.is_none());
    }

    #[test]
    fn zero_family_has_zero_sides() {
        let g = grid(64, 1.0);
        let f = ConvergentFamily::build(FamilySpec::Zero, &g, &[0.4, 0.2]).unwrap();
        let p = WaveProblem::new(g, 1.0, 32).unwrap();
        let r = liminf_experiment(&f, &p, LiminfEstimator::default()).unwrap();
        assert!(r.theta.iter().all(|v| *v == 0.0));
        assert_eq!(r.trace_norm_sq, 0.0);
        assert_eq!(r.slack, Some(0.0));
    }

    #[test]
    fn constant_family_liminf() {
        let g = grid(256, 1.0);
        let eps = [0.2, 0.1, 0.05];
        let f = ConvergentFamily::build(FamilySpec::ConstantMms, &g, &eps).unwrap();
        let p = WaveProblem::new(g, std::f64::consts::PI, 256).unwrap();
        let r = liminf_experiment(&f, &p, LiminfEstimator::default()).unwrap();
        let target = std::f64::consts::PI / 6.0;
        assert!(r.theta_approaches(target), "{:?}", r.theta);
        assert!(r.slack.unwrap() >= -0.05 * target, "{r:?}");
        assert!(
            (r.lower_bound - target).abs() < 1e-3 * target,
            "{}",
            r.lower_bound
        );
        assert!(r.weak_defects.iter().all(|d| *d == 0.0));
    }

    #[test]
    fn oscillating_family_converges_weakly() {
        let g = grid(256, 1.0);
        let f = ConvergentFamily::build(
            FamilySpec::Oscillating { amplitude: 0.5 },
            &g,
            &[0.2, 0.1, 0.05],
        )
        .unwrap();
        let d = f.weak_defects(&uniform_times(1.0, 4)).unwrap();
        assert!(d.windows(2).all(|w| w[1] < w[0]), "{d:?}");
    }

    #[test]
    fn family_grid_must_decrease() {
        let g = grid(64, 1.0);
        assert!(ConvergentFamily::build(FamilySpec::Zero, &g, &[0.1, 0.2]).is_err());
        assert!(FamilySpec::parse("nope", 0.0).is_err());
        assert_eq!(
            FamilySpec::parse("constant-mms", 0.0).unwrap().name(),
            "constant-mms"
        );
    }

    #[test]
    fn very_weak_ratio_is_stable() {
        let param = DegeneracyParam::new(1.0).unwrap();
        let sup = |n: usize| {
            let g = grid(n, 1.0);
            let p = WaveProblem::new(g.clone(), 1.0, n).unwrap();
            random_suite(param, 4, 11)
                .iter()
                .map(|spec| {
                    let d = VeryWeakData::from_wave_data(&spec.realize(&g).unwrap());
                    let s = solve_very_weak(&d, &p).unwrap();
                    very_weak_ratio(&s, &d).unwrap().unwrap_or(0.0)
                })
                .fold(0.0, f64::max)
        };
        let (a, b) = (sup(64), sup(128));
        assert!(a.is_finite() && (a - b).abs() <= 0.15 * a.max(b), "{a} {b}");
    }
}

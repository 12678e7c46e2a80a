//! Boundary-neighbourhood functionals and the sweeps that measure them
//! against the data size `N₀`.
//!
//! ```text
//! Θ(ε) = ε⁻³ ∫_0^T ∫_{1-ε}^1 u² dx dt
//! G(ε) = ε⁻¹ ∫_0^T ∫_{1-ε}^1 x^α u_x² dx dt,     G(0) = ∫_0^T u_x(t,1)² dt
//! ```

use crate::error::{Error, Result};
use crate::spaces::{
    grad_sq_on, l2_sq_on, value_at, weighted_grad_sq_on, Grid, MeshKind, Regime, SpaceField,
    SpaceTimeField, TimeSeries,
};
use crate::wave::{
    hidden_regularity_ratio, manufactured_problem, solve_weak, steps_for, wellposedness_ratio,
    DatumSpec, MmsEntry, Scheme, WaveData, WaveProblem, WaveSolution,
};
use crate::DegeneracyParam;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// Minimum number of cells inside `(1 - ε, 1)`.
pub const MIN_NEIGHBOURHOOD_CELLS: usize = 8;

pub const DEFAULT_EPSILONS: [f64; 5] = [0.4, 0.3, 0.2, 0.1, 0.05];
pub const DEFAULT_EPSILON0: f64 = 0.5;

/// Fails unless `(1 - ε, 1)` meets at least [`MIN_NEIGHBOURHOOD_CELLS`] cells.
pub fn check_resolved(grid: &Grid, epsilon: f64) -> Result<()> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::Domain(format!(
            "epsilon must lie in (0, 1), got {epsilon}"
        )));
    }
    let cells = grid.cells_in_right_neighbourhood(epsilon);
    if cells < MIN_NEIGHBOURHOOD_CELLS {
        return Err(Error::Config(format!(
            "neighbourhood (1-{epsilon}, 1) meets {cells} cells, need {MIN_NEIGHBOURHOOD_CELLS}: use at least {} uniform cells",
            min_uniform_cells(epsilon)
        )));
    }
    Ok(())
}

/// Smallest uniform mesh resolving `(1 - ε, 1)`.
pub fn min_uniform_cells(epsilon: f64) -> usize {
    (MIN_NEIGHBOURHOOD_CELLS as f64 / epsilon * (1.0 - 1e-12)).ceil() as usize
}

/// `Θ(ε)`: exact in `x` (the cell containing `1 - ε` is split), trapezoid in `t`.
pub fn theta_functional(u: &SpaceTimeField, epsilon: f64) -> Result<f64> {
    check_resolved(u.grid(), epsilon)?;
    Ok(u.space_time_sq_on(1.0 - epsilon, 1.0) / epsilon.powi(3))
}

/// `G(ε)`; for `ε = 0` the squared `L²(0,T)` norm of `trace`.
pub fn g_functional(u: &SpaceTimeField, epsilon: f64, trace: Option<&TimeSeries>) -> Result<f64> {
    if epsilon == 0.0 {
        return trace
            .map(TimeSeries::l2_norm_sq)
            .ok_or_else(|| Error::Argument("G(0) needs the boundary trace".into()));
    }
    check_resolved(u.grid(), epsilon)?;
    Ok(u.space_time_weighted_grad_sq_on(1.0 - epsilon, 1.0) / epsilon)
}

/// `N₀ = ‖f‖²_{L¹(0,T;L²)} + ‖u0‖²_{H¹_α} + ‖u1‖²_{L²}`.
pub fn n0(data: &WaveData, times: &[f64]) -> f64 {
    data.n0(times)
}

/// `|G(ε) - G(0)|` over a list of `ε` and whether it decreases along the list.
pub fn g_continuity(solution: &WaveSolution, epsilons: &[f64]) -> Result<(Vec<f64>, bool)> {
    let g0 = solution.trace.l2_norm_sq();
    let gaps = epsilons
        .iter()
        .map(|&e| Ok((g_functional(&solution.u, e, None)? - g0).abs()))
        .collect::<Result<Vec<f64>>>()?;
    let monotone = gaps.windows(2).all(|w| w[1] < w[0]);
    Ok((gaps, monotone))
}

/// One `(point, slack)` record of the pointwise bound
/// `u(t,x)² ≤ (1-x) ∫_x^1 u_x² ≤ (1-x) x^{-α} ∫_x^1 s^α u_x²`.
#[derive(Debug, Clone, Serialize)]
pub struct TraceBoundSpot {
    pub t: f64,
    pub x: f64,
    pub lhs: f64,
    pub rhs_plain: f64,
    pub rhs_weighted: f64,
}

impl TraceBoundSpot {
    pub fn holds(&self, rel_tol: f64) -> bool {
        let tol = |r: f64| rel_tol * r.abs().max(f64::MIN_POSITIVE);
        self.lhs <= self.rhs_plain + tol(self.rhs_plain)
            && self.rhs_plain <= self.rhs_weighted + tol(self.rhs_weighted)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EnergyNeighbourhoodReport {
    pub epsilon: f64,
    pub epsilon0: f64,
    /// `ε⁻² ∫_{1-ε}^1 u(t_k)²`
    pub lhs: Vec<f64>,
    /// `E(t_k) / (2 (1-ε₀)^α)`
    pub rhs: Vec<f64>,
    /// `rhs - lhs`
    pub slack: Vec<f64>,
    pub spots: Vec<TraceBoundSpot>,
}

impl EnergyNeighbourhoodReport {
    /// `min_k (rhs - lhs) / rhs` over levels with positive right-hand side.
    pub fn min_relative_slack(&self) -> f64 {
        self.slack
            .iter()
            .zip(&self.rhs)
            .filter(|(_, r)| **r > 0.0)
            .map(|(s, r)| s / r)
            .fold(f64::INFINITY, f64::min)
    }

    /// Every level has `slack ≥ -tol · rhs` and every spot check holds.
    pub fn holds(&self, tol: f64) -> bool {
        self.slack
            .iter()
            .zip(&self.rhs)
            .all(|(s, r)| *s >= -tol * r)
            && self.spots.iter().all(|s| s.holds(1e-12))
    }
}

fn energy_terms(grid: &Grid, energy: f64, u: &[f64], epsilon: f64, epsilon0: f64) -> (f64, f64) {
    let lhs = l2_sq_on(grid, u, 1.0 - epsilon, 1.0) / (epsilon * epsilon);
    let rhs = energy / (2.0 * (1.0 - epsilon0).powf(grid.alpha()));
    (lhs, rhs)
}

fn trace_bound_spot(grid: &Grid, u: &[f64], t: f64, x: f64) -> TraceBoundSpot {
    let ux = value_at(grid, u, x);
    let plain = grad_sq_on(grid, u, x, 1.0);
    let weighted = weighted_grad_sq_on(grid, u, x, 1.0);
    TraceBoundSpot {
        t,
        x,
        lhs: ux * ux,
        rhs_plain: (1.0 - x) * plain,
        rhs_weighted: (1.0 - x) / x.powf(grid.alpha()) * weighted,
    }
}

/// Per-level slack of `ε⁻² ∫_{1-ε}^1 u² ≤ E(t) / (2(1-ε₀)^α)` plus ten random
/// spot checks of the pointwise bound at `x ≥ 1 - ε₀`.
pub fn energy_neighborhood_check(
    solution: &WaveSolution,
    epsilon: f64,
    epsilon0: f64,
    seed: u64,
) -> Result<EnergyNeighbourhoodReport> {
    if !(epsilon > 0.0 && epsilon < epsilon0 && epsilon0 < 1.0) {
        return Err(Error::Domain(format!(
            "need 0 < epsilon < epsilon0 < 1, got epsilon = {epsilon}, epsilon0 = {epsilon0}"
        )));
    }
    let grid = solution.grid();
    let mut lhs = Vec::new();
    let mut rhs = Vec::new();
    for k in 0..solution.u.n_levels() {
        let (l, r) = energy_terms(
            grid,
            solution.energy.values[k],
            solution.u.level(k),
            epsilon,
            epsilon0,
        );
        lhs.push(l);
        rhs.push(r);
    }
    let slack = rhs.iter().zip(&lhs).map(|(r, l)| r - l).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let times = solution.times();
    let spots = (0..10)
        .map(|_| {
            let k = rng.gen_range(0..times.len());
            let x = rng.gen_range(1.0 - epsilon0..1.0);
            trace_bound_spot(grid, solution.u.level(k), times[k], x)
        })
        .collect();
    Ok(EnergyNeighbourhoodReport {
        epsilon,
        epsilon0,
        lhs,
        rhs,
        slack,
        spots,
    })
}

/// `(lhs, rhs)` of the energy-neighbourhood bound for a profile frozen in
/// time (`u_t = 0`, so `E = ½ ∫ x^α u_x²`).
pub fn frozen_energy_neighborhood(field: &SpaceField, epsilon: f64, epsilon0: f64) -> (f64, f64) {
    let energy = 0.5 * field.weighted_grad_sq();
    energy_terms(field.grid(), energy, field.values(), epsilon, epsilon0)
}

/// A member of a sweep suite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SuiteDatum {
    Zero,
    Manufactured { entry: MmsEntry },
    Random { spec: DatumSpec },
}

impl SuiteDatum {
    pub fn id(&self) -> String {
        match self {
            SuiteDatum::Zero => "zero".into(),
            SuiteDatum::Manufactured { entry } => format!("mms-{entry}"),
            SuiteDatum::Random { spec } => format!("rand-{}-{}", spec.seed, spec.id),
        }
    }

    pub fn realize(&self, problem: &WaveProblem) -> Result<WaveData> {
        match self {
            SuiteDatum::Zero => Ok(WaveData::zero(problem.grid())),
            SuiteDatum::Manufactured { entry } => Ok(manufactured_problem(*entry, problem)?.data),
            SuiteDatum::Random { spec } => spec.realize(problem.grid()),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepConfig {
    pub alpha: f64,
    pub t_final: f64,
    /// Uniform cell counts, coarse to fine.
    pub levels: Vec<usize>,
    /// `dt = courant * h`.
    pub courant: f64,
    pub scheme: Scheme,
    pub mesh: MeshKind,
    pub epsilons: Vec<f64>,
    pub epsilon0: f64,
    /// Seed for the spot checks.
    pub seed: u64,
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        DegeneracyParam::new(self.alpha)?;
        if !(self.epsilon0 > 0.0 && self.epsilon0 < 1.0) {
            return Err(Error::Config(format!(
                "epsilon0 must lie in (0, 1), got {}",
                self.epsilon0
            )));
        }
        if let Some(e) = self
            .epsilons
            .iter()
            .find(|&&e| !(e > 0.0 && e <= self.epsilon0))
        {
            return Err(Error::Config(format!(
                "epsilon {e} outside (0, epsilon0 = {}]",
                self.epsilon0
            )));
        }
        if self.levels.is_empty() || !(self.courant > 0.0) || !(self.t_final > 0.0) {
            return Err(Error::Config(
                "sweep needs levels, a positive courant number and T > 0".into(),
            ));
        }
        Ok(())
    }
}

/// One `(datum, level, ε)` measurement.
#[derive(Debug, Clone, Serialize)]
pub struct RatioRow {
    pub alpha: f64,
    pub regime: Regime,
    pub datum_id: String,
    pub epsilon: f64,
    pub theta: f64,
    pub g: f64,
    pub n0: f64,
    pub theta_ratio: f64,
    pub g_ratio: f64,
    pub level: usize,
    /// `G(ε) / (2(1-ε₀)^α)`, an upper bound for `Θ(ε)` implied by the
    /// pointwise trace inequality.
    pub theta_bound: f64,
}

/// Per-`(datum, level)` quantities independent of `ε`.
#[derive(Debug, Clone, Serialize)]
pub struct DatumRow {
    pub datum_id: String,
    pub level: usize,
    pub n0: f64,
    pub energy0: f64,
    pub g0: f64,
    pub hidden_ratio: f64,
    pub wellposedness_ratio: f64,
    /// Smallest `(rhs - lhs)/rhs` of the energy-neighbourhood bound over all
    /// levels and all `ε < ε₀`.
    pub energy_min_relative_slack: f64,
    pub trace_spots_hold: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SkipRecord {
    pub datum_id: String,
    pub level: usize,
    pub epsilon: Option<f64>,
    pub reason: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct LevelSuprema {
    pub level: usize,
    pub theta_ratio: f64,
    pub g_ratio: f64,
    pub hidden_ratio: f64,
    pub wellposedness_ratio: f64,
}

/// Relative change of a supremum between two levels.
#[derive(Debug, Clone, Serialize)]
pub struct Stability {
    pub coarse: usize,
    pub fine: usize,
    pub theta_ratio: f64,
    pub g_ratio: f64,
    pub hidden_ratio: f64,
    pub wellposedness_ratio: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct EstimateReport {
    pub alpha: f64,
    pub regime: Regime,
    pub epsilon_grid: Vec<f64>,
    /// The `ε` resolved on every level; suprema are taken over these.
    pub common_epsilons: Vec<f64>,
    pub epsilon0: f64,
    pub t_final: f64,
    pub levels: Vec<usize>,
    pub rows: Vec<RatioRow>,
    pub data_rows: Vec<DatumRow>,
    pub skipped: Vec<SkipRecord>,
    pub suprema: Vec<LevelSuprema>,
    pub all_skipped: bool,
}

fn rel_change(a: f64, b: f64) -> f64 {
    if a == 0.0 && b == 0.0 {
        0.0
    } else {
        (b - a).abs() / a.abs().max(b.abs())
    }
}

impl EstimateReport {
    pub fn supremum(&self, level: usize) -> Option<&LevelSuprema> {
        self.suprema.iter().find(|s| s.level == level)
    }

    /// Relative change of the suprema between `coarse` and `fine`.
    pub fn stability(&self, coarse: usize, fine: usize) -> Option<Stability> {
        let (a, b) = (self.supremum(coarse)?, self.supremum(fine)?);
        Some(Stability {
            coarse,
            fine,
            theta_ratio: rel_change(a.theta_ratio, b.theta_ratio),
            g_ratio: rel_change(a.g_ratio, b.g_ratio),
            hidden_ratio: rel_change(a.hidden_ratio, b.hidden_ratio),
            wellposedness_ratio: rel_change(a.wellposedness_ratio, b.wellposedness_ratio),
        })
    }

    /// `sup Θ/N₀` over `sup G/N₀ / (2(1-ε₀)^α)` at one level; the trace
    /// inequality bounds it by 1, the acceptance margin is 2.
    pub fn theta_combination_factor(&self, level: usize) -> Option<f64> {
        let s = self.supremum(level)?;
        let combination = s.g_ratio / (2.0 * (1.0 - self.epsilon0).powf(self.alpha));
        Some(if combination > 0.0 {
            s.theta_ratio / combination
        } else {
            0.0
        })
    }

    pub fn all_finite(&self) -> bool {
        self.rows
            .iter()
            .all(|r| r.theta_ratio.is_finite() && r.g_ratio.is_finite())
            && self
                .data_rows
                .iter()
                .all(|r| r.hidden_ratio.is_finite() && r.wellposedness_ratio.is_finite())
    }

    /// `Θ(ε) ≤ G(ε)/(2(1-ε₀)^α)` on every row.
    pub fn theta_below_g_bound(&self) -> bool {
        self.rows
            .iter()
            .all(|r| r.theta <= r.theta_bound * (1.0 + 1e-10) + 1e-300)
    }
}

struct TaskOutput {
    rows: Vec<RatioRow>,
    data_row: Option<DatumRow>,
    skipped: Vec<SkipRecord>,
}

fn run_task(
    config: &SweepConfig,
    param: DegeneracyParam,
    datum: &SuiteDatum,
    level: usize,
) -> Result<TaskOutput> {
    let id = datum.id();
    let grid = Arc::new(Grid::build(level, param, config.mesh)?);
    let nt = steps_for(config.t_final, grid.h_min(), config.courant);
    let problem = WaveProblem::new(grid.clone(), config.t_final, nt)?.with_scheme(config.scheme);
    let data = datum.realize(&problem)?;
    let times = problem.times();
    let n0 = data.n0(&times);
    let mut out = TaskOutput {
        rows: Vec::new(),
        data_row: None,
        skipped: Vec::new(),
    };
    if n0 <= 0.0 {
        log::info!("skipping datum {id} at N = {level}: N0 = 0");
        out.skipped.push(SkipRecord {
            datum_id: id,
            level,
            epsilon: None,
            reason: "N0 = 0".into(),
        });
        return Ok(out);
    }
    let solution = solve_weak(&problem, &data)?;
    let mut min_slack = f64::INFINITY;
    let mut spots_hold = true;
    let weight = 2.0 * (1.0 - config.epsilon0).powf(param.alpha());
    for (j, &eps) in config.epsilons.iter().enumerate() {
        if let Err(e) = check_resolved(&grid, eps) {
            log::info!("skipping datum {id}, epsilon {eps} at N = {level}: {e}");
            out.skipped.push(SkipRecord {
                datum_id: id.clone(),
                level,
                epsilon: Some(eps),
                reason: e.to_string(),
            });
            continue;
        }
        let theta = theta_functional(&solution.u, eps)?;
        let g = g_functional(&solution.u, eps, None)?;
        out.rows.push(RatioRow {
            alpha: param.alpha(),
            regime: param.regime(),
            datum_id: id.clone(),
            epsilon: eps,
            theta,
            g,
            n0,
            theta_ratio: theta / n0,
            g_ratio: g / n0,
            level,
            theta_bound: g / weight,
        });
        if eps < config.epsilon0 {
            let seed = config.seed ^ ((level as u64) << 32) ^ j as u64;
            let report = energy_neighborhood_check(&solution, eps, config.epsilon0, seed)?;
            min_slack = min_slack.min(report.min_relative_slack());
            spots_hold &= report.spots.iter().all(|s| s.holds(1e-12));
        }
    }
    out.data_row = Some(DatumRow {
        datum_id: id,
        level,
        n0,
        energy0: solution.energy.values[0],
        g0: solution.trace.l2_norm_sq(),
        hidden_ratio: hidden_regularity_ratio(&solution, &data).unwrap_or(0.0),
        wellposedness_ratio: wellposedness_ratio(&solution, &data).unwrap_or(0.0),
        energy_min_relative_slack: min_slack,
        trace_spots_hold: spots_hold,
    });
    Ok(out)
}

/// Solves every `(datum, level)` pair (in parallel) and collects `Θ(ε)/N₀`,
/// `G(ε)/N₀` and the per-datum ratios. Output order is deterministic.
pub fn theorem_ratio_sweep(config: &SweepConfig, suite: &[SuiteDatum]) -> Result<EstimateReport> {
    config.validate()?;
    let param = DegeneracyParam::new(config.alpha)?;
    let tasks: Vec<(usize, usize)> = (0..suite.len())
        .flat_map(|d| config.levels.iter().map(move |&l| (d, l)))
        .collect();
    let outputs = tasks
        .par_iter()
        .map(|&(d, l)| run_task(config, param, &suite[d], l))
        .collect::<Result<Vec<_>>>()?;
    let mut rows = Vec::new();
    let mut data_rows = Vec::new();
    let mut skipped = Vec::new();
    for o in outputs {
        rows.extend(o.rows);
        data_rows.extend(o.data_row);
        skipped.extend(o.skipped);
    }
    // suprema only over the ε resolved on every level, so they compare like with like
    let common: Vec<f64> = config
        .epsilons
        .iter()
        .copied()
        .filter(|&e| {
            config.levels.iter().all(|&l| {
                Grid::build(l, param, config.mesh).is_ok_and(|g| check_resolved(&g, e).is_ok())
            })
        })
        .collect();
    let suprema = config
        .levels
        .iter()
        .map(|&level| {
            let sup = |it: &mut dyn Iterator<Item = f64>| it.fold(0.0_f64, f64::max);
            let in_common = |r: &&RatioRow| r.level == level && common.contains(&r.epsilon);
            LevelSuprema {
                level,
                theta_ratio: sup(&mut rows.iter().filter(in_common).map(|r| r.theta_ratio)),
                g_ratio: sup(&mut rows.iter().filter(in_common).map(|r| r.g_ratio)),
                hidden_ratio: sup(&mut data_rows
                    .iter()
                    .filter(|r| r.level == level)
                    .map(|r| r.hidden_ratio)),
                wellposedness_ratio: sup(&mut data_rows
                    .iter()
                    .filter(|r| r.level == level)
                    .map(|r| r.wellposedness_ratio)),
            }
        })
        .collect();
    let all_skipped = data_rows.is_empty();
    if all_skipped {
        log::warn!(
            "theorem sweep for alpha = {}: all data skipped",
            config.alpha
        );
    }
    Ok(EstimateReport {
        alpha: config.alpha,
        regime: param.regime(),
        epsilon_grid: config.epsilons.clone(),
        common_epsilons: common,
        epsilon0: config.epsilon0,
        t_final: config.t_final,
        levels: config.levels.clone(),
        rows,
        data_rows,
        skipped,
        suprema,
        all_skipped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::{uniform_times, FieldKind};
    use crate::wave::random_suite;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use rand::Rng;

    fn grid(n: usize, alpha: f64) -> Arc<Grid> {
        Arc::new(Grid::uniform(n, DegeneracyParam::new(alpha).unwrap()).unwrap())
    }

    #[test]
    fn theta_of_linear_profile_is_two_thirds() {
        let g = grid(200, 1.0);
        let u = SpaceTimeField::from_fn(g, uniform_times(2.0, 8), |_, x| 1.0 - x);
        for eps in [0.4, 0.2, 0.1, 0.05, 0.0437] {
            assert!((theta_functional(&u, eps).unwrap() - 2.0 / 3.0).abs() <= 1e-10);
        }
    }

    #[test]
    fn theta_of_squared_profile() {
        // ∫_{1-ε}^1 (1-x)⁴ = ε⁵/5, so Θ = ε²/5; the interpolant adds O(h²)
        let g = grid(1024, 1.0);
        let u = SpaceTimeField::from_fn(g, uniform_times(1.0, 4), |_, x| (1.0 - x).powi(2));
        for eps in [0.4, 0.2, 0.1] {
            assert_relative_eq!(
                theta_functional(&u, eps).unwrap(),
                eps * eps / 5.0,
                max_relative = 1e-3
            );
        }
    }

    #[test]
    fn g_of_linear_profile() {
        // (1/0.1) ∫_{0.9}^1 x dx = 0.95
        let g = grid(100, 1.0);
        let u = SpaceTimeField::from_fn(g.clone(), uniform_times(1.0, 4), |_, x| 1.0 - x);
        assert_relative_eq!(
            g_functional(&u, 0.1, None).unwrap(),
            0.95,
            max_relative = 1e-12
        );
        let trace = TimeSeries::new(uniform_times(2.0, 4), vec![-1.0; 5]).unwrap();
        assert_relative_eq!(g_functional(&u, 0.0, Some(&trace)).unwrap(), 2.0);
        assert!(matches!(
            g_functional(&u, 0.0, None),
            Err(Error::Argument(_))
        ));
    }

    #[test]
    fn zero_field_functionals() {
        let g = grid(64, 0.5);
        let u = SpaceTimeField::zeros(g, uniform_times(1.0, 3));
        assert_eq!(theta_functional(&u, 0.2).unwrap(), 0.0);
        assert_eq!(g_functional(&u, 0.2, None).unwrap(), 0.0);
    }

    #[test]
    fn unresolved_neighbourhood_names_the_mesh() {
        let g = grid(100, 1.0);
        let u = SpaceTimeField::zeros(g, uniform_times(1.0, 3));
        match theta_functional(&u, 0.05) {
            Err(Error::Config(msg)) => assert!(msg.contains("160"), "{msg}"),
            other => panic!("{other:?}"),
        }
        assert_eq!(min_uniform_cells(0.05), 160);
        assert_eq!(min_uniform_cells(0.4), 20);
    }

    #[test]
    fn n0_examples() {
        let g = grid(8, 1.0);
        let t = uniform_times(2.0, 4);
        let d = WaveData::new(
            crate::wave::Source::analytic(|_, _| 1.0),
            SpaceField::zeros(g.clone(), FieldKind::H1Alpha),
            SpaceField::zeros(g.clone(), FieldKind::L2),
        )
        .unwrap();
        assert_relative_eq!(n0(&d, &t), 4.0, max_relative = 1e-12);
        assert_eq!(n0(&WaveData::zero(&g), &t), 0.0);
    }

    #[test]
    fn frozen_bubble_energy_bound() {
        // lhs = 100 (1/30 - ∫_0^0.9 (x-x²)²) ≈ 0.0285, rhs = (1/12)/(2·0.5)
        let g = grid(1000, 1.0);
        let u = SpaceField::from_fn(g, FieldKind::H1Alpha, |x| x - x * x).unwrap();
        let (lhs, rhs) = frozen_energy_neighborhood(&u, 0.1, 0.5);
        let anti = |x: f64| x.powi(3) / 3.0 - x.powi(4) / 2.0 + x.powi(5) / 5.0;
        assert_relative_eq!(lhs, 100.0 * (anti(1.0) - anti(0.9)), max_relative = 1e-4);
        assert!((lhs - 0.0285).abs() < 5e-5);
        assert!((rhs - 0.0833).abs() < 5e-5);
    }

    #[test]
    fn energy_neighbourhood_on_mms_run() {
        let g = grid(128, 1.0);
        let p = WaveProblem::new(g, 1.0, 128).unwrap();
        let m = manufactured_problem(MmsEntry::Quadratic, &p).unwrap();
        let s = solve_weak(&p, &m.data).unwrap();
        for eps in [0.4, 0.2, 0.1] {
            let r = energy_neighborhood_check(&s, eps, 0.5, 1).unwrap();
            assert!(r.holds(0.05), "{}", r.min_relative_slack());
            assert_eq!(r.spots.len(), 10);
        }
        assert!(energy_neighborhood_check(&s, 0.5, 0.5, 1).is_err());
    }

    #[test]
    fn zero_solution_energy_slack() {
        let g = grid(32, 1.0);
        let p = WaveProblem::new(g.clone(), 1.0, 4).unwrap();
        let s = solve_weak(&p, &WaveData::zero(&g)).unwrap();
        let r = energy_neighborhood_check(&s, 0.2, 0.5, 3).unwrap();
        assert!(r.slack.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn g_tends_to_trace_norm() {
        let g = grid(640, 1.0);
        let p = WaveProblem::new(g, std::f64::consts::PI, 640).unwrap();
        let m = manufactured_problem(MmsEntry::Quadratic, &p).unwrap();
        let s = solve_weak(&p, &m.data).unwrap();
        let (gaps, monotone) = g_continuity(&s, &[0.2, 0.1, 0.05, 0.025]).unwrap();
        assert!(monotone, "{gaps:?}");
    }

    fn small_config(alpha: f64) -> SweepConfig {
        SweepConfig {
            alpha,
            t_final: 1.0,
            levels: vec![64, 128],
            courant: 1.0,
            scheme: Scheme::NewmarkAvgAccel,
            mesh: MeshKind::Uniform,
            epsilons: vec![0.4, 0.2, 0.1],
            epsilon0: 0.5,
            seed: 1,
        }
    }

    #[test]
    fn all_zero_suite_is_flagged() {
        let r = theorem_ratio_sweep(&small_config(1.0), &[SuiteDatum::Zero]).unwrap();
        assert!(r.all_skipped);
        assert!(r.rows.is_empty());
        assert_eq!(r.skipped.len(), 2);
    }

    #[test]
    fn mms_sweep_is_bounded_and_stable() {
        let r = theorem_ratio_sweep(
            &small_config(1.0),
            &[SuiteDatum::Manufactured {
                entry: MmsEntry::Quadratic,
            }],
        )
        .unwrap();
        assert!(r.all_finite());
        assert!(r.theta_below_g_bound());
        assert!(r.theta_combination_factor(128).unwrap() <= 1.0);
        let s = r.stability(64, 128).unwrap();
        assert!(s.theta_ratio < 0.1 && s.g_ratio < 0.1, "{s:?}");
    }

    #[test]
    fn squared_profile_theta_decreases() {
        // u = cos t (1-x)² type datum: Θ(ε) = O(ε²)
        let g = grid(400, 1.5);
        let u =
            SpaceTimeField::from_fn(g, uniform_times(1.0, 8), |t, x| t.cos() * (1.0 - x).powi(2));
        let vals: Vec<f64> = [0.4, 0.2, 0.1, 0.05]
            .iter()
            .map(|&e| theta_functional(&u, e).unwrap())
            .collect();
        assert!(vals.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn random_suite_sweep_runs() {
        let p = DegeneracyParam::new(0.5).unwrap();
        let suite: Vec<SuiteDatum> = random_suite(p, 3, 4)
            .into_iter()
            .map(|spec| SuiteDatum::Random { spec })
            .collect();
        let r = theorem_ratio_sweep(&small_config(0.5), &suite).unwrap();
        assert!(r.all_finite());
        assert!(r.theta_below_g_bound());
        assert!(r
            .data_rows
            .iter()
            .all(|d| d.trace_spots_hold && d.energy_min_relative_slack >= -0.05));
    }

    proptest! {
        #[test]
        fn functionals_are_two_homogeneous(c in -5.0f64..5.0, seed in 0u64..1000) {
            let g = grid(80, 1.2);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let coeffs: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let u = SpaceTimeField::from_fn(g, uniform_times(1.0, 5), |t, x| {
                (1.0 - x) * (coeffs[0] + coeffs[1] * t + coeffs[2] * x * x)
            });
            let v = u.scaled(c);
            for eps in [0.3, 0.1] {
                let (a, b) = (theta_functional(&u, eps).unwrap(), theta_functional(&v, eps).unwrap());
                prop_assert!((b - c * c * a).abs() <= 1e-12 * (c * c * a).abs().max(1e-300));
                let (a, b) = (g_functional(&u, eps, None).unwrap(), g_functional(&v, eps, None).unwrap());
                prop_assert!((b - c * c * a).abs() <= 1e-12 * (c * c * a).abs().max(1e-300));
            }
        }
    }
}

//! One function per subcommand. Each writes its CSV files and returns a
//! [`CampaignOutcome`] for `report.json`.

use crate::config::{ExperimentConfig, SnapshotKind};
use crate::output::Output;
use crate::CliError;
use degwave::elliptic::DualElement;
use degwave::estimators::{
    energy_neighborhood_check, frozen_energy_neighborhood, theorem_ratio_sweep, EstimateReport,
    SuiteDatum, SweepConfig,
};
use degwave::io::{write_series_csv, write_snapshots, SnapshotFormat};
use degwave::multiplier::{build_rho, multiplier_identity_residual, rho_property_check};
use degwave::spaces::{embedding_sweep, uniform_times, FieldKind};
use degwave::transposition::{
    bump_catalog, duality_residual, liminf_experiment, solve_very_weak, very_weak_ratio,
    w_field_control, ConvergentFamily, FamilySpec, LiminfReport, VeryWeakData,
};
use degwave::wave::{
    convergence_study, manufactured_problem, random_suite, solve_weak, steps_for, MmsEntry, Source,
    WaveData, WaveProblem,
};
use degwave::{DegeneracyParam, Grid, Regime, SpaceField};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use std::sync::Arc;

#[derive(Debug, Clone, Serialize)]
pub struct CampaignOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub details: Value,
}

fn outcome(name: &'static str, passed: bool, details: Value) -> CampaignOutcome {
    if passed {
        log::info!("{name}: all properties hold");
    } else {
        log::warn!("{name}: property violated");
    }
    CampaignOutcome {
        name,
        passed,
        details,
    }
}

fn param(alpha: f64) -> Result<DegeneracyParam, CliError> {
    Ok(DegeneracyParam::new(alpha)?)
}

fn uniform(n: usize, alpha: f64) -> Result<Arc<Grid>, CliError> {
    Ok(Arc::new(Grid::uniform(n, param(alpha)?)?))
}

/// Nonzero catalog entries admissible for `alpha`.
pub fn manufactured_entries(alpha: f64) -> Vec<MmsEntry> {
    let p = DegeneracyParam::new(alpha).expect("validated alpha");
    [MmsEntry::Quadratic, MmsEntry::Cubic, MmsEntry::Linear]
        .into_iter()
        .filter(|e| e.check(p).is_ok())
        .collect()
}

fn rel_change(a: f64, b: f64) -> f64 {
    if a == 0.0 && b == 0.0 {
        0.0
    } else {
        (b - a).abs() / a.abs().max(b.abs())
    }
}

pub fn solve(config: &ExperimentConfig, out: &Output) -> Result<CampaignOutcome, CliError> {
    let s = &config.solve;
    let grid = Arc::new(Grid::build(s.n_cells, param(s.alpha)?, config.mesh)?);
    let nt = steps_for(s.t_final, grid.h_min(), s.courant);
    let problem = WaveProblem::new(grid.clone(), s.t_final, nt)?
        .with_scheme(config.scheme)
        .with_mass(config.mass);
    let m = manufactured_problem(s.entry, &problem)?;
    let sol = solve_weak(&problem, &m.data)?;
    write_series_csv(
        &sol.trace,
        out.create_file(&out.trace_path("solve_trace.csv"))?,
    )?;
    write_series_csv(
        &sol.energy,
        out.create_file(&out.trace_path("solve_energy.csv"))?,
    )?;
    match s.snapshots {
        SnapshotKind::None => {}
        SnapshotKind::Csv => write_snapshots(
            &sol.u,
            s.snapshot_stride,
            SnapshotFormat::Csv,
            out.create_file(&out.trace_path("solve_u.csv"))?,
        )?,
        SnapshotKind::Binary => write_snapshots(
            &sol.u,
            s.snapshot_stride,
            SnapshotFormat::Binary,
            out.create_file(&out.trace_path("solve_u.bin"))?,
        )?,
    }
    let mut max_l2_error = 0.0_f64;
    for k in 0..sol.u.n_levels() {
        let diff: Vec<f64> = sol
            .u
            .level(k)
            .iter()
            .zip(m.exact.level(k))
            .map(|(a, b)| a - b)
            .collect();
        max_l2_error =
            max_l2_error.max(SpaceField::new(grid.clone(), diff, FieldKind::L2)?.l2_norm());
    }
    let finite = sol.u.raw_values().iter().all(|v| v.is_finite());
    Ok(outcome(
        "solve",
        finite,
        json!({
            "alpha": s.alpha,
            "regime": grid.param().regime(),
            "entry": s.entry,
            "n_cells": s.n_cells,
            "nt": nt,
            "scheme": config.scheme,
            "max_nodal_l2_error": max_l2_error,
            "trace_l2_norm_sq": sol.trace.l2_norm_sq(),
            "energy_initial": sol.energy.values[0],
            "energy_final": sol.energy.values.last(),
        }),
    ))
}

#[derive(Serialize)]
struct ConvergenceCsvRow {
    alpha: f64,
    regime: Regime,
    entry: MmsEntry,
    n_cells: usize,
    nt: usize,
    h: f64,
    dt: f64,
    l2_error: f64,
    trace_error: f64,
    l2_order: Option<f64>,
    trace_order: Option<f64>,
}

pub fn convergence(config: &ExperimentConfig, out: &Output) -> Result<CampaignOutcome, CliError> {
    let c = &config.convergence;
    let jobs: Vec<(f64, MmsEntry)> = config
        .alphas
        .iter()
        .flat_map(|&a| manufactured_entries(a).into_iter().map(move |e| (a, e)))
        .collect();
    let tables = jobs
        .par_iter()
        .map(|&(a, e)| {
            convergence_study(
                e,
                a,
                c.t_final,
                &c.levels,
                c.courant,
                config.scheme,
                config.mass,
            )
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut rows = Vec::new();
    let mut summary = Vec::new();
    let mut passed = true;
    for t in &tables {
        let order = t.min_l2_order().unwrap_or(f64::NAN);
        passed &= order >= c.min_order;
        summary.push(json!({
            "alpha": t.alpha,
            "regime": t.regime,
            "entry": t.entry,
            "min_l2_order": order,
            "finest_l2_error": t.rows.last().map(|r| r.l2_error),
            "trace_monotone": t.trace_monotone(),
        }));
        rows.extend(t.rows.iter().map(|r| ConvergenceCsvRow {
            alpha: t.alpha,
            regime: t.regime,
            entry: t.entry,
            n_cells: r.n_cells,
            nt: r.nt,
            h: r.h,
            dt: r.dt,
            l2_error: r.l2_error,
            trace_error: r.trace_error,
            l2_order: r.l2_order,
            trace_order: r.trace_order,
        }));
    }
    out.write_rows(&out.path("convergence.csv"), &rows)?;
    Ok(outcome(
        "convergence",
        passed,
        json!({ "min_order": c.min_order, "levels": c.levels, "tables": summary }),
    ))
}

pub fn verify_embedding(
    config: &ExperimentConfig,
    _out: &Output,
) -> Result<CampaignOutcome, CliError> {
    let e = &config.embedding;
    let jobs: Vec<(f64, f64)> = config
        .alphas
        .iter()
        .flat_map(|&al| e.a.iter().map(move |&a| (al, a)))
        .collect();
    let sweeps = jobs
        .par_iter()
        .map(|&(al, a)| embedding_sweep(al, a, e.samples, e.n_cells, e.seed))
        .collect::<Result<Vec<_>, _>>()?;
    let passed = sweeps.iter().all(|s| s.holds(e.tolerance));
    Ok(outcome(
        "verify-embedding",
        passed,
        json!({ "tolerance": e.tolerance, "sweeps": sweeps }),
    ))
}

/// `½ ∫ x^α (1 - 2x)²`, the energy of the bubble `x - x²` at rest.
pub fn bubble_energy(alpha: f64) -> f64 {
    0.5 * (1.0 / (alpha + 1.0) - 4.0 / (alpha + 2.0) + 4.0 / (alpha + 3.0))
}

/// Worst relative slack of the energy-neighbourhood bound over one run.
fn neighbourhood_slack(
    problem: &WaveProblem,
    data: &WaveData,
    epsilons: &[f64],
    epsilon0: f64,
    seed: u64,
) -> Result<(f64, bool), CliError> {
    let sol = solve_weak(problem, data)?;
    let mut worst = f64::INFINITY;
    let mut spots = true;
    for (j, &eps) in epsilons.iter().filter(|&&e| e < epsilon0).enumerate() {
        let r = energy_neighborhood_check(&sol, eps, epsilon0, seed.wrapping_add(j as u64))?;
        worst = worst.min(r.min_relative_slack());
        spots &= r.spots.iter().all(|s| s.holds(1e-12));
    }
    Ok((worst, spots))
}

pub fn verify_energy(
    config: &ExperimentConfig,
    _out: &Output,
) -> Result<CampaignOutcome, CliError> {
    let en = &config.energy;
    let w = &config.sweep;
    let grid = uniform(en.n_cells, en.alpha)?;
    let problem = WaveProblem::new(grid.clone(), en.t_final, en.nt)?
        .with_scheme(config.scheme)
        .with_mass(config.mass);
    let u0 = SpaceField::from_fn(grid.clone(), FieldKind::H1Alpha, |x| x - x * x)?;
    let data = WaveData::new(
        Source::Zero,
        u0,
        SpaceField::zeros(grid.clone(), FieldKind::L2),
    )?;
    let sol = solve_weak(&problem, &data)?;
    let e0 = sol.energy.values[0];
    let drift = sol
        .energy
        .values
        .iter()
        .fold(0.0_f64, |m, e| m.max((e - e0).abs()));
    let exact = bubble_energy(en.alpha);
    let continuum_gap = sol
        .energy
        .values
        .iter()
        .fold(0.0_f64, |m, e| m.max((e - exact).abs()));

    let fine = uniform(1000, 1.0)?;
    let frozen = SpaceField::from_fn(fine, FieldKind::H1Alpha, |x| x - x * x)?;
    let eps_frozen = 0.1;
    let (frozen_lhs, frozen_rhs) = frozen_energy_neighborhood(&frozen, eps_frozen, w.epsilon0);

    // manufactured entries and the random suite, for every alpha
    let mut jobs: Vec<(f64, String, WaveData, WaveProblem)> = Vec::new();
    for &alpha in &config.alphas {
        let g = uniform(en.neighbourhood_cells, alpha)?;
        let nt = steps_for(w.t_final, g.h_min(), w.courant);
        let p = WaveProblem::new(g.clone(), w.t_final, nt)?
            .with_scheme(config.scheme)
            .with_mass(config.mass);
        for e in manufactured_entries(alpha) {
            jobs.push((
                alpha,
                format!("mms-{e}"),
                manufactured_problem(e, &p)?.data,
                p.clone(),
            ));
        }
        for spec in random_suite(param(alpha)?, w.size, w.seed) {
            jobs.push((
                alpha,
                format!("rand-{}-{}", spec.seed, spec.id),
                spec.realize(&g)?,
                p.clone(),
            ));
        }
    }
    let slacks = jobs
        .par_iter()
        .map(|(_, _, d, p)| neighbourhood_slack(p, d, &w.epsilons, w.epsilon0, w.seed))
        .collect::<Result<Vec<_>, _>>()?;
    let min_slack = slacks.iter().map(|s| s.0).fold(f64::INFINITY, f64::min);
    let spots = slacks.iter().all(|s| s.1);
    let per_run: Vec<Value> = jobs
        .iter()
        .zip(&slacks)
        .map(|((a, id, _, _), (s, ok))| json!({"alpha": a, "datum_id": id, "min_relative_slack": s, "trace_spots_hold": ok}))
        .collect();
    let passed = drift <= en.conservation_tol && min_slack >= -en.slack_tol && spots;
    Ok(outcome(
        "verify-energy",
        passed,
        json!({
            "conservation": {
                "alpha": en.alpha, "n_cells": en.n_cells, "nt": en.nt, "t_final": en.t_final,
                "max_energy_drift": drift, "tolerance": en.conservation_tol,
                "continuum_energy": exact, "max_gap_to_continuum_energy": continuum_gap,
            },
            "frozen_profile": {"epsilon": eps_frozen, "epsilon0": w.epsilon0, "lhs": frozen_lhs, "rhs": frozen_rhs},
            "neighbourhood": {"min_relative_slack": min_slack, "slack_tol": en.slack_tol, "trace_spots_hold": spots, "runs": per_run},
        }),
    ))
}

/// `(δ, γ)` pairs with `0 < γ < δ` and `δ + γ < 1`.
pub fn random_profile_pairs(count: usize, seed: u64) -> Vec<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let delta = rng.gen_range(0.02..0.5);
            let gamma = rng.gen_range(0.05..0.95) * delta;
            (delta, gamma)
        })
        .collect()
}

pub fn verify_multiplier(
    config: &ExperimentConfig,
    _out: &Output,
) -> Result<CampaignOutcome, CliError> {
    let m = &config.multiplier;
    let mut profiles_ok = true;
    let mut profile_rows = Vec::new();
    for (delta, gamma) in random_profile_pairs(m.random_pairs, m.seed) {
        let p = build_rho(delta, gamma)?;
        let r = rho_property_check(&p, m.samples);
        let closed_form =
            p.rho_prime_max() == 1.0 / delta && p.rho_prime_bound() == 2.0 / (delta + gamma);
        profiles_ok &= r.ok() && closed_form;
        profile_rows.push(
            json!({"delta": delta, "gamma": gamma, "ok": r.ok() && closed_form, "report": r}),
        );
    }
    let profile = build_rho(m.delta, m.gamma)?;
    let reports = m
        .levels
        .par_iter()
        .map(|&n| -> Result<_, CliError> {
            let g = uniform(n, m.alpha)?;
            let p = WaveProblem::new(g, m.t_final, n)?
                .with_scheme(config.scheme)
                .with_mass(config.mass);
            let mp = manufactured_problem(m.entry, &p)?;
            let sol = solve_weak(&p, &mp.data)?;
            Ok(multiplier_identity_residual(&sol, &mp.data, &profile)?)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let residuals: Vec<f64> = reports.iter().map(|r| r.residual).collect();
    let ratios: Vec<f64> = residuals.windows(2).map(|w| w[1] / w[0]).collect();
    let at_check = m
        .levels
        .iter()
        .position(|&n| n == m.check_level)
        .map(|i| residuals[i])
        .unwrap_or(f64::NAN);
    let ratios_ok = ratios
        .iter()
        .all(|r| *r >= m.ratio_window[0] && *r <= m.ratio_window[1]);
    let passed = profiles_ok && at_check <= m.max_residual && ratios_ok;
    Ok(outcome(
        "verify-multiplier",
        passed,
        json!({
            "profiles_ok": profiles_ok,
            "profiles": profile_rows,
            "identity": {
                "alpha": m.alpha, "entry": m.entry, "delta": m.delta, "gamma": m.gamma,
                "levels": m.levels, "residuals": residuals, "ratios": ratios,
                "ratio_window": m.ratio_window, "ratios_ok": ratios_ok,
                "check_level": m.check_level, "residual_at_check_level": at_check, "max_residual": m.max_residual,
                "finest_terms": reports.last().map(|r| &r.terms),
            },
        }),
    ))
}

#[derive(Serialize)]
struct RatioCsvRow<'a> {
    alpha: f64,
    regime: Regime,
    datum_id: &'a str,
    epsilon: f64,
    theta: f64,
    g: f64,
    n0: f64,
    theta_ratio: f64,
    g_ratio: f64,
    level: usize,
}

#[derive(Serialize)]
struct DatumCsvRow<'a> {
    alpha: f64,
    datum_id: &'a str,
    level: usize,
    n0: f64,
    energy0: f64,
    g0: f64,
    hidden_ratio: f64,
    wellposedness_ratio: f64,
    energy_min_relative_slack: f64,
}

/// The sweep suite for `alpha`: the random data plus (optionally) the
/// admissible manufactured entries.
pub fn sweep_suite(config: &ExperimentConfig, alpha: f64) -> Result<Vec<SuiteDatum>, CliError> {
    let w = &config.sweep;
    let mut suite: Vec<SuiteDatum> = random_suite(param(alpha)?, w.size, w.seed)
        .into_iter()
        .map(|spec| SuiteDatum::Random { spec })
        .collect();
    if w.include_manufactured {
        suite.extend(
            manufactured_entries(alpha)
                .into_iter()
                .map(|entry| SuiteDatum::Manufactured { entry }),
        );
    }
    Ok(suite)
}

pub fn sweep_reports(config: &ExperimentConfig) -> Result<Vec<EstimateReport>, CliError> {
    let w = &config.sweep;
    config
        .alphas
        .iter()
        .map(|&alpha| {
            let sc = SweepConfig {
                alpha,
                t_final: w.t_final,
                levels: w.levels.clone(),
                courant: w.courant,
                scheme: config.scheme,
                mesh: config.mesh,
                epsilons: w.epsilons.clone(),
                epsilon0: w.epsilon0,
                seed: w.seed,
            };
            Ok(theorem_ratio_sweep(&sc, &sweep_suite(config, alpha)?)?)
        })
        .collect()
}

pub fn sweep_theorems(
    config: &ExperimentConfig,
    out: &Output,
) -> Result<CampaignOutcome, CliError> {
    let w = &config.sweep;
    let reports = sweep_reports(config)?;
    let mut ratio_rows = Vec::new();
    let mut datum_rows = Vec::new();
    let mut summary = Vec::new();
    let mut passed = true;
    let (coarse, fine) = (w.levels[w.levels.len() - 2], w.levels[w.levels.len() - 1]);
    for r in &reports {
        let stab = r
            .stability(coarse, fine)
            .expect("levels come from the config");
        let factor = r.theta_combination_factor(fine).unwrap_or(f64::NAN);
        let min_slack = r
            .data_rows
            .iter()
            .map(|d| d.energy_min_relative_slack)
            .fold(f64::INFINITY, f64::min);
        let stable = [
            stab.theta_ratio,
            stab.g_ratio,
            stab.hidden_ratio,
            stab.wellposedness_ratio,
        ]
        .iter()
        .all(|s| *s <= w.stability_tol);
        let ok = !r.all_skipped
            && r.all_finite()
            && stable
            && r.theta_below_g_bound()
            && factor <= 2.0
            && min_slack >= -config.energy.slack_tol
            && r.data_rows.iter().all(|d| d.trace_spots_hold);
        passed &= ok;
        summary.push(json!({
            "alpha": r.alpha,
            "regime": r.regime,
            "passed": ok,
            "all_skipped": r.all_skipped,
            "all_finite": r.all_finite(),
            "common_epsilons": r.common_epsilons,
            "suprema": r.suprema,
            "stability_percent": {
                "coarse": coarse, "fine": fine,
                "theta_ratio": 100.0 * stab.theta_ratio,
                "g_ratio": 100.0 * stab.g_ratio,
                "hidden_ratio": 100.0 * stab.hidden_ratio,
                "wellposedness_ratio": 100.0 * stab.wellposedness_ratio,
            },
            "theta_below_g_bound": r.theta_below_g_bound(),
            "theta_combination_factor": factor,
            "energy_min_relative_slack": min_slack,
            "skipped": r.skipped,
        }));
        ratio_rows.extend(r.rows.iter().map(|row| RatioCsvRow {
            alpha: row.alpha,
            regime: row.regime,
            datum_id: &row.datum_id,
            epsilon: row.epsilon,
            theta: row.theta,
            g: row.g,
            n0: row.n0,
            theta_ratio: row.theta_ratio,
            g_ratio: row.g_ratio,
            level: row.level,
        }));
        datum_rows.extend(r.data_rows.iter().map(|d| DatumCsvRow {
            alpha: r.alpha,
            datum_id: &d.datum_id,
            level: d.level,
            n0: d.n0,
            energy0: d.energy0,
            g0: d.g0,
            hidden_ratio: d.hidden_ratio,
            wellposedness_ratio: d.wellposedness_ratio,
            energy_min_relative_slack: d.energy_min_relative_slack,
        }));
    }
    out.write_rows(&out.path("ratios.csv"), &ratio_rows)?;
    out.write_rows(&out.path("datums.csv"), &datum_rows)?;
    Ok(outcome(
        "sweep-theorems",
        passed,
        json!({
            "epsilons": w.epsilons, "epsilon0": w.epsilon0, "levels": w.levels,
            "seed": w.seed, "size": w.size, "stability_tol": w.stability_tol,
            "per_alpha": summary,
        }),
    ))
}

/// Named duality test data on a grid.
pub fn duality_data(name: &str, grid: &Arc<Grid>) -> Result<VeryWeakData, CliError> {
    let l2 = |f: &dyn Fn(f64) -> f64| SpaceField::from_fn(grid.clone(), FieldKind::L2, f);
    let zero = || l2(&|_| 0.0);
    Ok(match name {
        "regular" => {
            VeryWeakData::new(Source::Zero, l2(&|x| x - x * x)?, DualElement::L2(zero()?))?
        }
        "rough" => VeryWeakData::new(
            Source::Zero,
            zero()?,
            DualElement::L2(l2(&|x| 1.0 - 4.0 * x)?),
        )?,
        "sourced" => VeryWeakData::new(
            Source::analytic(|t, x| t.cos() * (std::f64::consts::PI * x).sin()),
            zero()?,
            DualElement::L2(zero()?),
        )?,
        other => return Err(CliError::Config(format!("unknown duality data `{other}`"))),
    })
}

pub const DUALITY_DATA: [&str; 3] = ["regular", "rough", "sourced"];

#[derive(Serialize, Clone)]
struct DualityCsvRow {
    data: &'static str,
    bump: usize,
    n_cells: usize,
    lhs: f64,
    rhs: f64,
    residual: f64,
}

pub fn verify_duality(
    config: &ExperimentConfig,
    out: &Output,
) -> Result<CampaignOutcome, CliError> {
    let d = &config.duality;
    let bumps = bump_catalog(d.t_final);
    let jobs: Vec<(&'static str, usize)> = DUALITY_DATA
        .iter()
        .flat_map(|&name| d.levels.iter().map(move |&n| (name, n)))
        .collect();
    let rows: Vec<Vec<DualityCsvRow>> = jobs
        .par_iter()
        .map(|&(name, n)| -> Result<_, CliError> {
            let g = uniform(n, d.alpha)?;
            let p = WaveProblem::new(g.clone(), d.t_final, n)?
                .with_scheme(config.scheme)
                .with_mass(config.mass);
            let data = duality_data(name, &g)?;
            let sol = solve_very_weak(&data, &p)?;
            bumps
                .iter()
                .enumerate()
                .map(|(i, b)| {
                    let r = duality_residual(&sol, &data, b)?;
                    Ok(DualityCsvRow {
                        data: name,
                        bump: i,
                        n_cells: n,
                        lhs: r.lhs,
                        rhs: r.rhs,
                        residual: r.residual,
                    })
                })
                .collect()
        })
        .collect::<Result<_, _>>()?;
    let rows: Vec<DualityCsvRow> = rows.into_iter().flatten().collect();
    let finest = *d.levels.last().expect("validated");
    let mut pairs = Vec::new();
    let mut passed = true;
    for name in DUALITY_DATA {
        let tol = if name == "rough" {
            d.rough_tol
        } else {
            d.regular_tol
        };
        for (i, bump) in bumps.iter().enumerate() {
            let series: Vec<f64> = d
                .levels
                .iter()
                .map(|&n| {
                    rows.iter()
                        .find(|r| r.data == name && r.bump == i && r.n_cells == n)
                        .expect("row")
                        .residual
                })
                .collect();
            let decreasing = series.windows(2).all(|w| w[1] < w[0]);
            let ok = decreasing && series.last().is_some_and(|r| *r <= tol);
            passed &= ok;
            pairs.push(json!({"data": name, "bump": bump, "residuals": series, "tolerance": tol, "decreasing": decreasing, "passed": ok}));
        }
    }
    out.write_rows(&out.path("duality.csv"), &rows)?;

    // well-posedness ratio of very weak solutions on a random suite
    let (coarse, fine) = (d.levels[d.levels.len() - 2], finest);
    let sup_at = |n: usize| -> Result<f64, CliError> {
        let g = uniform(n, d.alpha)?;
        let p = WaveProblem::new(g.clone(), d.t_final, n)?
            .with_scheme(config.scheme)
            .with_mass(config.mass);
        let ratios = random_suite(param(d.alpha)?, d.suite_size, d.seed)
            .par_iter()
            .map(|spec| -> Result<f64, CliError> {
                let data = VeryWeakData::from_wave_data(&spec.realize(&g)?);
                let sol = solve_very_weak(&data, &p)?;
                Ok(very_weak_ratio(&sol, &data)?.unwrap_or(0.0))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(ratios.into_iter().fold(0.0, f64::max))
    };
    let (sup_coarse, sup_fine) = (sup_at(coarse)?, sup_at(fine)?);
    let change = rel_change(sup_coarse, sup_fine);
    let ratio_ok = sup_coarse.is_finite() && sup_fine.is_finite() && change <= d.stability_tol;
    passed &= ratio_ok;
    Ok(outcome(
        "verify-duality",
        passed,
        json!({
            "alpha": d.alpha, "levels": d.levels, "pairs": pairs,
            "wellposedness": {"coarse": coarse, "fine": fine, "sup_coarse": sup_coarse, "sup_fine": sup_fine,
                              "relative_change": change, "tolerance": d.stability_tol, "passed": ratio_ok},
        }),
    ))
}

#[derive(Serialize)]
struct ThetaCsvRow {
    epsilon: f64,
    theta: f64,
}

pub fn liminf_reports(config: &ExperimentConfig) -> Result<(LiminfReport, LiminfReport), CliError> {
    let l = &config.liminf;
    let family = FamilySpec::parse(&l.family, l.amplitude)?;
    let grid = uniform(l.n_cells, l.alpha)?;
    let p = WaveProblem::new(grid.clone(), l.t_final, l.nt)?
        .with_scheme(config.scheme)
        .with_mass(config.mass);
    let fam = ConvergentFamily::build(family, &grid, &l.epsilons)?;
    let report = liminf_experiment(&fam, &p, l.estimator)?;
    let control = w_field_control(
        &grid,
        uniform_times(2.0, l.nt),
        |_| 1.0,
        &l.epsilons,
        l.estimator,
    )?;
    Ok((report, control))
}

pub fn verify_liminf(config: &ExperimentConfig, out: &Output) -> Result<CampaignOutcome, CliError> {
    let l = &config.liminf;
    let (report, control) = liminf_reports(config)?;
    let slack_ok = report
        .slack
        .is_some_and(|s| s >= -l.slack_tol * report.lower_bound.max(0.0) - 1e-12);
    let control_ok = control.slack.is_some_and(|s| s.abs() <= l.control_tol);
    let approaches = report.theta_approaches(report.lower_bound);
    let constant = l.family == "constant-mms";
    let passed = report.hypothesis_ok
        && slack_ok
        && control_ok
        && report.weakly_convergent()
        && (!constant || approaches);
    let rows: Vec<ThetaCsvRow> = report
        .epsilons
        .iter()
        .zip(&report.theta)
        .map(|(&epsilon, &theta)| ThetaCsvRow { epsilon, theta })
        .collect();
    out.write_rows(&out.trace_path("liminf_theta.csv"), &rows)?;
    Ok(outcome(
        "verify-liminf",
        passed,
        json!({
            "family": l.family, "alpha": l.alpha, "t_final": l.t_final, "n_cells": l.n_cells, "nt": l.nt,
            "report": report, "theta_approaches_bound": approaches, "slack_ok": slack_ok,
            "control": control, "control_ok": control_ok,
        }),
    ))
}

type Campaign = fn(&ExperimentConfig, &Output) -> Result<CampaignOutcome, CliError>;

pub fn report_all(
    config: &ExperimentConfig,
    out: &Output,
) -> Result<Vec<CampaignOutcome>, CliError> {
    let runs: [Campaign; 8] = [
        solve,
        convergence,
        verify_embedding,
        verify_energy,
        verify_multiplier,
        sweep_theorems,
        verify_duality,
        verify_liminf,
    ];
    runs.iter().map(|run| run(config, out)).collect()
}

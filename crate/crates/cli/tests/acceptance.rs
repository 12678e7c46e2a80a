//! Acceptance criteria. Runs without the libtest harness so every criterion
//! prints its verdict line; the process fails if any criterion does.

use degwave::estimators::{frozen_energy_neighborhood, theorem_ratio_sweep, SweepConfig};
use degwave::multiplier::{build_rho, multiplier_identity_residual, rho_property_check};
use degwave::spaces::{embedding_sweep, uniform_times, FieldKind};
use degwave::transposition::{
    bump_catalog, duality_residual, solve_very_weak, w_field_control, LiminfEstimator,
};
use degwave::wave::{
    convergence_study, manufactured_problem, solve_weak, MassKind, MmsEntry, Scheme, Source,
    WaveData, WaveProblem,
};
use degwave::{DegeneracyParam, Grid, SpaceField};
use degwave_cli::campaigns::{
    duality_data, liminf_reports, manufactured_entries, random_profile_pairs, sweep_suite,
    verify_energy, DUALITY_DATA,
};
use degwave_cli::config::ExperimentConfig;
use degwave_cli::output::Output;
use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::sync::Arc;
use std::time::Instant;

type Verdict = (bool, String);

/// Name, check and runtime limit in seconds.
type Criterion = (&'static str, fn() -> Verdict, Option<f64>);

fn grid(n: usize, alpha: f64) -> Arc<Grid> {
    Arc::new(Grid::uniform(n, DegeneracyParam::new(alpha).unwrap()).unwrap())
}

fn w_field_identity() -> Verdict {
    let eps = [0.4, 0.2, 0.1, 0.05];
    let r = w_field_control(
        &grid(256, 1.0),
        uniform_times(2.0, 256),
        |_| 1.0,
        &eps,
        LiminfEstimator::default(),
    )
    .unwrap();
    let err = r
        .theta
        .iter()
        .map(|t| (t - 2.0 / 3.0).abs())
        .fold(0.0, f64::max);
    (err <= 1e-10, format!("max |theta - 2/3| = {err:.2e}"))
}

fn mms_orders() -> Verdict {
    let mut worst = f64::INFINITY;
    let mut parts = Vec::new();
    for alpha in [1.0, 1.5] {
        for e in manufactured_entries(alpha) {
            let t = convergence_study(
                e,
                alpha,
                1.0,
                &[64, 128, 256],
                1.0,
                Scheme::default(),
                MassKind::default(),
            )
            .unwrap();
            let o = t.min_l2_order().unwrap();
            worst = worst.min(o);
            parts.push(format!("a={alpha} {e}: {o:.3}"));
        }
    }
    (
        worst >= 1.8,
        format!("min order {worst:.3} ({})", parts.join(", ")),
    )
}

fn bubble_energy() -> Verdict {
    let g = grid(256, 1.0);
    let p = WaveProblem::new(g.clone(), 4.0, 256).unwrap();
    let u0 = SpaceField::from_fn(g.clone(), FieldKind::H1Alpha, |x| x - x * x).unwrap();
    let data = WaveData::new(Source::Zero, u0, SpaceField::zeros(g, FieldKind::L2)).unwrap();
    let sol = solve_weak(&p, &data).unwrap();
    let e0 = sol.energy.values[0];
    let gap = sol
        .energy
        .values
        .iter()
        .map(|e| (e - 1.0 / 12.0).abs())
        .fold(0.0, f64::max);
    let drift = sol
        .energy
        .values
        .iter()
        .map(|e| (e - e0).abs())
        .fold(0.0, f64::max);
    (
        gap <= 1e-8,
        format!("max |E - 1/12| = {gap:.3e}, max |E - E(0)| = {drift:.1e}"),
    )
}

fn sweep_config(alpha: f64, levels: &[usize]) -> SweepConfig {
    let w = ExperimentConfig::default().sweep;
    SweepConfig {
        alpha,
        t_final: w.t_final,
        levels: levels.to_vec(),
        courant: w.courant,
        scheme: Scheme::default(),
        mesh: Default::default(),
        epsilons: w.epsilons,
        epsilon0: w.epsilon0,
        seed: w.seed,
    }
}

fn hidden_regularity() -> Verdict {
    let config = ExperimentConfig::default();
    let mut ok = true;
    let mut parts = Vec::new();
    for alpha in [0.5, 1.0, 1.5] {
        let r = theorem_ratio_sweep(
            &sweep_config(alpha, &[128, 256]),
            &sweep_suite(&config, alpha).unwrap(),
        )
        .unwrap();
        let finite = r.data_rows.iter().all(|d| d.hidden_ratio.is_finite());
        let s = r.stability(128, 256).unwrap().hidden_ratio;
        ok &= finite && s <= 0.10;
        parts.push(format!("a={alpha}: {:.2}%", 100.0 * s));
    }
    (ok, format!("sup change 128->256 {}", parts.join(", ")))
}

fn ratio_sweeps() -> Verdict {
    let config = ExperimentConfig::default();
    let mut ok = true;
    let mut parts = Vec::new();
    for alpha in [0.5, 1.0, 1.5] {
        let r = theorem_ratio_sweep(
            &sweep_config(alpha, &[256, 512]),
            &sweep_suite(&config, alpha).unwrap(),
        )
        .unwrap();
        let s = r.stability(256, 512).unwrap();
        let worst = s.theta_ratio.max(s.g_ratio);
        ok &= !r.all_skipped && r.all_finite() && worst <= 0.10;
        parts.push(format!("a={alpha}: {:.2}%", 100.0 * worst));
    }
    (ok, format!("sup change 256->512 {}", parts.join(", ")))
}

fn energy_neighbourhood() -> Verdict {
    let dir = tempfile::tempdir().unwrap();
    let out = Output::create(dir.path()).unwrap();
    let c = verify_energy(&ExperimentConfig::default(), &out).unwrap();
    let slack = c.details["neighbourhood"]["min_relative_slack"]
        .as_f64()
        .unwrap();
    let spots = c.details["neighbourhood"]["trace_spots_hold"]
        .as_bool()
        .unwrap();
    let u = SpaceField::from_fn(grid(1000, 1.0), FieldKind::H1Alpha, |x| x - x * x).unwrap();
    let (lhs, rhs) = frozen_energy_neighborhood(&u, 0.1, 0.5);
    let three = |v: f64| format!("{v:.2e}");
    let frozen = three(lhs) == three(0.0285) && three(rhs) == three(0.0833);
    (
        slack >= -0.05 && spots && frozen,
        format!("min (rhs-lhs)/rhs = {slack:.3}, frozen lhs {lhs:.4} rhs {rhs:.4}"),
    )
}

fn multiplier_identity() -> Verdict {
    let profile = build_rho(0.1, 0.05).unwrap();
    let residuals: Vec<f64> = [64, 128, 256]
        .iter()
        .map(|&n| {
            let p = WaveProblem::new(grid(n, 1.0), 1.0, n).unwrap();
            let m = manufactured_problem(MmsEntry::Quadratic, &p).unwrap();
            let sol = solve_weak(&p, &m.data).unwrap();
            multiplier_identity_residual(&sol, &m.data, &profile)
                .unwrap()
                .residual
        })
        .collect();
    let ratios: Vec<f64> = residuals.windows(2).map(|w| w[1] / w[0]).collect();
    let ok = residuals[1] <= 0.05 && ratios.iter().all(|r| (0.3..=0.7).contains(r));
    (
        ok,
        format!(
            "residual at 128 = {:.2e}, ratios {ratios:.3?}",
            residuals[1]
        ),
    )
}

fn multiplier_profiles() -> Verdict {
    let mut worst = 0.0_f64;
    let mut ok = true;
    for (d, g) in random_profile_pairs(20, 11) {
        let p = build_rho(d, g).unwrap();
        let r = rho_property_check(&p, 10_000);
        worst = worst.max(p.junction_mismatch());
        ok &= r.monotone && p.junction_mismatch() <= 1e-12 && p.rho_prime_max() == 1.0 / d;
        ok &= p.rho_prime_max() <= 2.0 / (d + g);
    }
    (ok, format!("20 pairs, max junction mismatch {worst:.1e}"))
}

fn embeddings() -> Verdict {
    let mut worst = f64::INFINITY;
    let mut ok = true;
    for alpha in [0.5, 1.0, 1.5] {
        for a in [0.25, 0.5] {
            let s = embedding_sweep(alpha, a, 100, 64, 7).unwrap();
            ok &= s.holds(1e-9);
            worst = worst.min(s.min_relative_slack_a1.min(s.min_relative_slack_a2));
        }
    }
    (ok, format!("min relative slack {worst:.3e}"))
}

fn duality() -> Verdict {
    let levels = [64, 128, 256];
    let bumps = bump_catalog(1.0);
    let mut ok = true;
    let mut parts = Vec::new();
    for name in DUALITY_DATA {
        let series: Vec<Vec<f64>> = levels
            .iter()
            .map(|&n| {
                let g = grid(n, 1.0);
                let p = WaveProblem::new(g.clone(), 1.0, n).unwrap();
                let data = duality_data(name, &g).unwrap();
                let sol = solve_very_weak(&data, &p).unwrap();
                bumps
                    .iter()
                    .map(|b| duality_residual(&sol, &data, b).unwrap().residual)
                    .collect()
            })
            .collect();
        let tol = if name == "rough" { 1e-2 } else { 1e-3 };
        for (i, &finest) in series[2].iter().enumerate() {
            ok &= series[1][i] < series[0][i] && finest < series[1][i] && finest <= tol;
        }
        let finest = series[2].iter().copied().fold(0.0, f64::max);
        parts.push(format!("{name} {finest:.1e}"));
    }
    (ok, format!("worst residual at 256: {}", parts.join(", ")))
}

fn liminf() -> Verdict {
    let config = ExperimentConfig::default();
    let (r, control) = liminf_reports(&config).unwrap();
    let target = PI / 6.0;
    let slack = r.liminf_estimate - r.lower_bound;
    let control_slack = control.slack.unwrap();
    let ok = r.theta_approaches(target) && slack >= -0.05 * target && control_slack.abs() <= 1e-10;
    (
        ok,
        format!(
            "theta {:.4?} -> {target:.4}, slack {slack:.2e}, control slack {control_slack:.1e}",
            r.theta
        ),
    )
}

fn csv_files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files = Vec::new();
    for sub in [dir.to_path_buf(), dir.join("traces")] {
        for entry in std::fs::read_dir(&sub).unwrap() {
            let p = entry.unwrap().path();
            if p.extension().is_some_and(|e| e == "csv") {
                let name = p.strip_prefix(dir).unwrap().display().to_string();
                files.push((name, std::fs::read(&p).unwrap()));
            }
        }
    }
    files.sort();
    files
}

fn determinism() -> Verdict {
    let run = || {
        let dir = tempfile::tempdir().unwrap();
        Command::new(env!("CARGO_BIN_EXE_degwave"))
            .args(["report-all", "--seed", "2024", "--out"])
            .arg(dir.path())
            .output()
            .unwrap();
        let files = csv_files(dir.path());
        (dir, files)
    };
    let (_a, first) = run();
    let (_b, second) = run();
    let names: Vec<&str> = first.iter().map(|f| f.0.as_str()).collect();
    (
        first.len() >= 7 && first == second,
        format!("{} CSV files: {}", first.len(), names.join(" ")),
    )
}

fn main() {
    let criteria: [Criterion; 12] = [
        ("w-field identity", w_field_identity, Some(1.0)),
        ("manufactured convergence", mms_orders, Some(120.0)),
        ("bubble energy", bubble_energy, Some(10.0)),
        ("hidden regularity ratio", hidden_regularity, None),
        ("boundary ratio sweeps", ratio_sweeps, Some(600.0)),
        ("energy neighbourhood", energy_neighbourhood, None),
        ("multiplier identity", multiplier_identity, None),
        ("multiplier profiles", multiplier_profiles, None),
        ("weighted embeddings", embeddings, None),
        ("transposition duality", duality, None),
        ("liminf experiment", liminf, None),
        ("report determinism", determinism, None),
    ];
    let mut failed = 0;
    for (i, (name, check, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (pass, detail) =
            catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| (false, "panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        let pass = pass && limit.is_none_or(|l| secs < l);
        failed += usize::from(!pass);
        println!(
            "criterion {:>2} {name:<26} {} ({secs:.1}s) {detail}",
            i + 1,
            if pass { "PASS" } else { "FAIL" },
        );
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}

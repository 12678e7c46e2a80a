//! Experiment configuration. Every key has a default, so an empty file (or no
//! file at all) is a valid configuration; `degwave.example.toml` at the
//! repository root lists them all.

use degwave::estimators::min_uniform_cells;
use degwave::spaces::MeshKind;
use degwave::transposition::{FamilySpec, LiminfEstimator};
use degwave::wave::{MassKind, MmsEntry, Scheme};
use degwave::DegeneracyParam;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Degeneracy exponents swept by the multi-`α` campaigns.
    pub alphas: Vec<f64>,
    pub output_dir: PathBuf,
    /// Worker threads; 0 uses every core.
    pub threads: usize,
    pub scheme: Scheme,
    pub mass: MassKind,
    pub mesh: MeshKind,
    pub solve: SolveConfig,
    pub convergence: ConvergenceConfig,
    pub embedding: EmbeddingConfig,
    pub energy: EnergyConfig,
    pub multiplier: MultiplierConfig,
    pub sweep: SweepSection,
    pub duality: DualityConfig,
    pub liminf: LiminfConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            alphas: vec![0.5, 1.0, 1.5],
            output_dir: PathBuf::from("degwave-out"),
            threads: 0,
            scheme: Scheme::default(),
            mass: MassKind::default(),
            mesh: MeshKind::default(),
            solve: SolveConfig::default(),
            convergence: ConvergenceConfig::default(),
            embedding: EmbeddingConfig::default(),
            energy: EnergyConfig::default(),
            multiplier: MultiplierConfig::default(),
            sweep: SweepSection::default(),
            duality: DualityConfig::default(),
            liminf: LiminfConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum SnapshotKind {
    #[default]
    None,
    Csv,
    Binary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolveConfig {
    pub alpha: f64,
    pub entry: MmsEntry,
    pub n_cells: usize,
    pub t_final: f64,
    pub courant: f64,
    pub snapshots: SnapshotKind,
    pub snapshot_stride: usize,
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self {
            alpha: 1.0,
            entry: MmsEntry::Quadratic,
            n_cells: 128,
            t_final: 1.0,
            courant: 1.0,
            snapshots: SnapshotKind::None,
            snapshot_stride: 16,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConvergenceConfig {
    pub t_final: f64,
    pub levels: Vec<usize>,
    pub courant: f64,
    pub min_order: f64,
}

impl Default for ConvergenceConfig {
    fn default() -> Self {
        Self {
            t_final: 1.0,
            levels: vec![64, 128, 256],
            courant: 1.0,
            min_order: 1.8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EmbeddingConfig {
    pub a: Vec<f64>,
    pub samples: usize,
    pub n_cells: usize,
    pub seed: u64,
    pub tolerance: f64,
}

impl Default for EmbeddingConfig {
    fn default() -> Self {
        Self {
            a: vec![0.25, 0.5],
            samples: 100,
            n_cells: 64,
            seed: 7,
            tolerance: 1e-9,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnergyConfig {
    /// Conservation run: `u0 = x - x²`, no source, no velocity.
    pub alpha: f64,
    pub t_final: f64,
    pub n_cells: usize,
    pub nt: usize,
    /// Bound on `max_k |E(t_k) - E(0)|`.
    pub conservation_tol: f64,
    /// Mesh of the neighbourhood runs (manufactured entries and the suite).
    pub neighbourhood_cells: usize,
    /// Allowed negative slack, relative to the right-hand side.
    pub slack_tol: f64,
}

impl Default for EnergyConfig {
    fn default() -> Self {
        Self {
            alpha: 1.0,
            t_final: 4.0,
            n_cells: 256,
            nt: 256,
            conservation_tol: 1e-8,
            neighbourhood_cells: 256,
            slack_tol: 0.05,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MultiplierConfig {
    pub alpha: f64,
    pub entry: MmsEntry,
    pub delta: f64,
    pub gamma: f64,
    pub t_final: f64,
    /// Refinement levels with `nt = N`.
    pub levels: Vec<usize>,
    /// Level at which `max_residual` is enforced.
    pub check_level: usize,
    pub max_residual: f64,
    /// Admissible range of successive residual ratios.
    pub ratio_window: [f64; 2],
    /// Random `(δ, γ)` pairs for the profile checks.
    pub random_pairs: usize,
    pub samples: usize,
    pub seed: u64,
}

impl Default for MultiplierConfig {
    fn default() -> Self {
        Self {
            alpha: 1.0,
            entry: MmsEntry::Quadratic,
            delta: 0.1,
            gamma: 0.05,
            t_final: 1.0,
            levels: vec![64, 128, 256],
            check_level: 128,
            max_residual: 0.05,
            ratio_window: [0.3, 0.7],
            random_pairs: 20,
            samples: 10_000,
            seed: 11,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSection {
    pub t_final: f64,
    /// Two or more uniform meshes; stability is measured between the last two.
    pub levels: Vec<usize>,
    pub courant: f64,
    pub epsilons: Vec<f64>,
    pub epsilon0: f64,
    pub seed: u64,
    pub size: usize,
    /// Also sweep the manufactured entries valid for each `α`.
    pub include_manufactured: bool,
    /// Largest admissible relative change of a supremum between the levels.
    pub stability_tol: f64,
}

impl Default for SweepSection {
    fn default() -> Self {
        Self {
            t_final: 1.0,
            levels: vec![256, 512],
            courant: 1.0,
            epsilons: vec![0.4, 0.2, 0.1, 0.05],
            epsilon0: 0.5,
            seed: 2024,
            size: 20,
            include_manufactured: true,
            stability_tol: 0.10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DualityConfig {
    pub alpha: f64,
    pub t_final: f64,
    /// Refinement levels with `nt = N`; tolerances apply on the last one.
    pub levels: Vec<usize>,
    pub regular_tol: f64,
    pub rough_tol: f64,
    pub suite_size: usize,
    pub seed: u64,
    pub stability_tol: f64,
}

impl Default for DualityConfig {
    fn default() -> Self {
        Self {
            alpha: 1.0,
            t_final: 1.0,
            levels: vec![64, 128, 256],
            regular_tol: 1e-3,
            rough_tol: 1e-2,
            suite_size: 10,
            seed: 99,
            stability_tol: 0.15,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LiminfConfig {
    pub family: String,
    /// Oscillation amplitude of the `oscillating` family.
    pub amplitude: f64,
    pub alpha: f64,
    pub t_final: f64,
    pub n_cells: usize,
    pub nt: usize,
    pub epsilons: Vec<f64>,
    pub estimator: LiminfEstimator,
    /// Allowed negative slack, relative to the lower bound.
    pub slack_tol: f64,
    pub control_tol: f64,
}

impl Default for LiminfConfig {
    fn default() -> Self {
        Self {
            family: "constant-mms".into(),
            amplitude: 0.5,
            alpha: 1.0,
            t_final: std::f64::consts::PI,
            n_cells: 256,
            nt: 256,
            epsilons: vec![0.2, 0.1, 0.05],
            estimator: LiminfEstimator::default(),
            slack_tol: 0.05,
            control_tol: 1e-10,
        }
    }
}

fn bad(path: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("{path}: {msg}"))
}

fn check_alpha(path: &str, alpha: f64) -> Result<(), CliError> {
    DegeneracyParam::new(alpha)
        .map(|_| ())
        .map_err(|e| bad(path, e))
}

fn check_positive(path: &str, v: f64) -> Result<(), CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(bad(path, format!("must be positive, got {v}")))
    }
}

fn check_levels(path: &str, levels: &[usize], min_len: usize) -> Result<(), CliError> {
    if levels.len() < min_len {
        return Err(bad(
            path,
            format!("needs at least {min_len} levels, got {levels:?}"),
        ));
    }
    if levels.windows(2).any(|w| w[1] <= w[0]) || levels.contains(&0) {
        return Err(bad(
            path,
            format!("levels must increase strictly, got {levels:?}"),
        ));
    }
    Ok(())
}

fn check_epsilons(path: &str, eps: &[f64], eps0: f64, finest: usize) -> Result<(), CliError> {
    if eps.is_empty() {
        return Err(bad(path, "empty epsilon grid"));
    }
    for (i, &e) in eps.iter().enumerate() {
        if !(e > 0.0 && e <= eps0) {
            return Err(bad(
                &format!("{path}[{i}]"),
                format!("{e} outside (0, epsilon0 = {eps0}]"),
            ));
        }
        let need = min_uniform_cells(e);
        if finest < need {
            return Err(bad(
                &format!("{path}[{i}]"),
                format!("neighbourhood of width {e} is under-resolved on {finest} cells; use at least {need} cells"),
            ));
        }
    }
    if eps.windows(2).any(|w| w[1] >= w[0]) {
        return Err(bad(
            path,
            format!("epsilon grid must decrease, got {eps:?}"),
        ));
    }
    Ok(())
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    /// Checks every field; messages start with the dotted key path.
    pub fn validate(&self) -> Result<(), CliError> {
        if self.alphas.is_empty() {
            return Err(bad("alphas", "empty list"));
        }
        for (i, &a) in self.alphas.iter().enumerate() {
            check_alpha(&format!("alphas[{i}]"), a)?;
        }
        let s = &self.solve;
        check_alpha("solve.alpha", s.alpha)?;
        s.entry
            .check(DegeneracyParam::new(s.alpha).expect("checked"))
            .map_err(|e| bad("solve.entry", e))?;
        check_positive("solve.t_final", s.t_final)?;
        check_positive("solve.courant", s.courant)?;
        if s.n_cells == 0 || s.snapshot_stride == 0 {
            return Err(bad("solve", "n_cells and snapshot_stride must be positive"));
        }
        let c = &self.convergence;
        check_positive("convergence.t_final", c.t_final)?;
        check_positive("convergence.courant", c.courant)?;
        check_levels("convergence.levels", &c.levels, 3)?;
        let e = &self.embedding;
        for (i, &a) in e.a.iter().enumerate() {
            if !(a > 0.0 && a < 1.0) {
                return Err(bad(
                    &format!("embedding.a[{i}]"),
                    format!("{a} outside (0, 1)"),
                ));
            }
        }
        if e.samples == 0 || e.n_cells == 0 {
            return Err(bad("embedding", "samples and n_cells must be positive"));
        }
        let en = &self.energy;
        check_alpha("energy.alpha", en.alpha)?;
        check_positive("energy.t_final", en.t_final)?;
        if en.n_cells == 0 || en.nt == 0 {
            return Err(bad("energy", "n_cells and nt must be positive"));
        }
        let m = &self.multiplier;
        check_alpha("multiplier.alpha", m.alpha)?;
        m.entry
            .check(DegeneracyParam::new(m.alpha).expect("checked"))
            .map_err(|e| bad("multiplier.entry", e))?;
        degwave::multiplier::build_rho(m.delta, m.gamma)
            .map_err(|e| bad("multiplier.delta/gamma", e))?;
        check_levels("multiplier.levels", &m.levels, 2)?;
        if !m.levels.contains(&m.check_level) {
            return Err(bad(
                "multiplier.check_level",
                format!("{} is not one of the levels", m.check_level),
            ));
        }
        let need =
            (degwave::multiplier::MIN_SUPPORT_CELLS as f64 / (m.delta + m.gamma)).ceil() as usize;
        if m.levels[0] < need {
            return Err(bad(
                "multiplier.levels",
                format!(
                    "support of width {} is under-resolved on {} cells; use at least {need} cells",
                    m.delta + m.gamma,
                    m.levels[0]
                ),
            ));
        }
        let w = &self.sweep;
        check_positive("sweep.t_final", w.t_final)?;
        check_positive("sweep.courant", w.courant)?;
        check_levels("sweep.levels", &w.levels, 2)?;
        if !(w.epsilon0 > 0.0 && w.epsilon0 < 1.0) {
            return Err(bad(
                "sweep.epsilon0",
                format!("{} outside (0, 1)", w.epsilon0),
            ));
        }
        check_epsilons(
            "sweep.epsilons",
            &w.epsilons,
            w.epsilon0,
            *w.levels.last().expect("checked"),
        )?;
        let d = &self.duality;
        check_alpha("duality.alpha", d.alpha)?;
        check_positive("duality.t_final", d.t_final)?;
        check_levels("duality.levels", &d.levels, 2)?;
        let l = &self.liminf;
        check_alpha("liminf.alpha", l.alpha)?;
        check_positive("liminf.t_final", l.t_final)?;
        let family =
            FamilySpec::parse(&l.family, l.amplitude).map_err(|e| bad("liminf.family", e))?;
        if family != FamilySpec::Zero {
            MmsEntry::Quadratic
                .check(DegeneracyParam::new(l.alpha).expect("checked"))
                .map_err(|e| bad("liminf.alpha", e))?;
        }
        if l.nt == 0 {
            return Err(bad("liminf.nt", "must be positive"));
        }
        check_epsilons("liminf.epsilons", &l.epsilons, 1.0 - 1e-12, l.n_cells)?;
        Ok(())
    }

    /// Hex SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let json = serde_json::to_vec(self).expect("config serialises");
        Sha256::digest(&json)
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        ExperimentConfig::default().validate().unwrap();
        assert_eq!(
            ExperimentConfig::parse("").unwrap(),
            ExperimentConfig::default()
        );
    }

    #[test]
    fn nested_keys_override() {
        let c = ExperimentConfig::parse(
            "alphas = [0.3]\n[sweep]\nepsilon0 = 0.4\nepsilons = [0.4, 0.2]\n",
        )
        .unwrap();
        assert_eq!(c.alphas, vec![0.3]);
        assert_eq!(c.sweep.epsilons, vec![0.4, 0.2]);
        assert_eq!(c.sweep.size, 20);
        c.validate().unwrap();
    }

    #[test]
    fn unknown_key_is_rejected() {
        let e = ExperimentConfig::parse("[sweep]\nepsilonz = 1\n").unwrap_err();
        assert!(e.to_string().contains("epsilonz"), "{e}");
    }

    #[test]
    fn diagnostics_name_the_field() {
        let mut c = ExperimentConfig::default();
        c.sweep.epsilons = vec![0.4, 0.7];
        assert!(c
            .validate()
            .unwrap_err()
            .to_string()
            .contains("sweep.epsilons[1]"));
        let mut c = ExperimentConfig::default();
        c.sweep.levels = vec![64, 128];
        let msg = c.validate().unwrap_err().to_string();
        assert!(
            msg.contains("sweep.epsilons[3]") && msg.contains("160"),
            "{msg}"
        );
        let c = ExperimentConfig {
            alphas: vec![2.0],
            ..Default::default()
        };
        assert!(c
            .validate()
            .unwrap_err()
            .to_string()
            .starts_with("configuration error: alphas[0]"));
        let mut c = ExperimentConfig::default();
        c.liminf.family = "other".into();
        assert!(c
            .validate()
            .unwrap_err()
            .to_string()
            .contains("liminf.family"));
    }

    #[test]
    fn hash_tracks_content() {
        let a = ExperimentConfig::default();
        let mut b = a.clone();
        assert_eq!(a.hash(), b.hash());
        b.sweep.seed += 1;
        assert_ne!(a.hash(), b.hash());
        assert_eq!(a.hash().len(), 64);
    }
}

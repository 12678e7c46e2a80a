//! The boundary multiplier `ρ_κ` and the identity obtained by testing the
//! wave equation against `2ρ_κ u_x + ρ_κ' u`.
//!
//! With `κ = δ + γ`,
//!
//! ```text
//! ρ(x) = 0                              on [0, 1-κ]
//!      = (x - (1-κ))² / (2δγ)           on (1-κ, 1-δ)
//!      = (x - 1)/δ + 1 + γ/(2δ)         on [1-δ, 1]
//! ```
//!
//! For a weak solution `u` the identity reads
//!
//! ```text
//! ∬ 2x^α u_x² ρ' + ∬ x^α u_x u ρ''
//!   = ∫ u_x(t,1)² ρ(1) dt + ∬ α x^{α-1} u_x² ρ + ∬ 2 f u_x ρ + ∬ f u ρ'
//!     - ∫ 2 u_t(T) u_x(T) ρ + ∫ 2 u_1 u_{0,x} ρ
//!     - ∫ u_t(T) u(T) ρ'    + ∫ u_1 u_0 ρ'
//! ```
//!
//! (the last term carries coefficient one: it comes from `[∫ u_t u ρ']_0^T`).

use crate::error::{Error, Result};
use crate::quadrature::{trapezoid, GaussRule};
use crate::spaces::{slope, Grid};
use crate::wave::{WaveData, WaveSolution};
use serde::Serialize;

/// Minimum number of cells that must meet `(1 - κ, 1)`.
pub const MIN_SUPPORT_CELLS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MultiplierProfile {
    pub delta: f64,
    pub gamma: f64,
    pub kappa: f64,
}

pub fn build_rho(delta: f64, gamma: f64) -> Result<MultiplierProfile> {
    if !(gamma > 0.0 && gamma < delta && delta + gamma < 1.0) {
        return Err(Error::Domain(format!(
            "multiplier needs 0 < gamma < delta and delta + gamma < 1, got delta = {delta}, gamma = {gamma}"
        )));
    }
    let p = MultiplierProfile {
        delta,
        gamma,
        kappa: delta + gamma,
    };
    let mismatch = p.junction_mismatch();
    if mismatch > 1e-12 * (1.0 + p.rho_prime_max()) {
        return Err(Error::Domain(format!(
            "multiplier pieces do not match: {mismatch:e}"
        )));
    }
    Ok(p)
}

impl MultiplierProfile {
    fn quad(&self, x: f64) -> f64 {
        let s = x - (1.0 - self.kappa);
        s * s / (2.0 * self.delta * self.gamma)
    }

    fn quad_prime(&self, x: f64) -> f64 {
        (x - (1.0 - self.kappa)) / (self.delta * self.gamma)
    }

    fn lin(&self, x: f64) -> f64 {
        (x - 1.0) / self.delta + 1.0 + self.gamma / (2.0 * self.delta)
    }

    pub fn rho(&self, x: f64) -> f64 {
        if x <= 1.0 - self.kappa {
            0.0
        } else if x < 1.0 - self.delta {
            self.quad(x)
        } else {
            self.lin(x)
        }
    }

    pub fn rho_prime(&self, x: f64) -> f64 {
        if x <= 1.0 - self.kappa {
            0.0
        } else if x < 1.0 - self.delta {
            self.quad_prime(x)
        } else {
            1.0 / self.delta
        }
    }

    /// `ρ''`, taking the value of the right piece at the two junctions.
    pub fn rho_second(&self, x: f64) -> f64 {
        if x < 1.0 - self.kappa || x >= 1.0 - self.delta {
            0.0
        } else {
            1.0 / (self.delta * self.gamma)
        }
    }

    /// Closed-form `sup ρ' = 1/δ`.
    pub fn rho_prime_max(&self) -> f64 {
        1.0 / self.delta
    }

    /// The stated bound `2/κ`.
    pub fn rho_prime_bound(&self) -> f64 {
        2.0 / self.kappa
    }

    /// Largest jump in value or slope between adjacent pieces.
    pub fn junction_mismatch(&self) -> f64 {
        let a = 1.0 - self.kappa;
        let b = 1.0 - self.delta;
        [
            self.quad(a).abs(),
            self.quad_prime(a).abs(),
            (self.quad(b) - self.lin(b)).abs(),
            (self.quad_prime(b) - 1.0 / self.delta).abs(),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RhoReport {
    pub samples: usize,
    pub monotone: bool,
    pub min_rho: f64,
    pub sampled_max_rho_prime: f64,
    pub closed_form_max_rho_prime: f64,
    pub rho_prime_bound: f64,
    pub plateau_ok: bool,
    pub second_derivative_ok: bool,
    pub junction_mismatch: f64,
    pub value_at_support_start: f64,
}

impl RhoReport {
    pub fn ok(&self) -> bool {
        self.monotone
            && self.min_rho >= 0.0
            && self.sampled_max_rho_prime <= self.rho_prime_bound
            && self.closed_form_max_rho_prime <= self.rho_prime_bound
            && self.plateau_ok
            && self.second_derivative_ok
            && self.junction_mismatch <= 1e-12 * (1.0 + self.closed_form_max_rho_prime)
            && self.value_at_support_start == 0.0
    }
}

/// Dense sampling of `ρ`, `ρ'`, `ρ''` on `[0, 1]`.
pub fn rho_property_check(profile: &MultiplierProfile, samples: usize) -> RhoReport {
    let samples = samples.max(2);
    let xs: Vec<f64> = (0..samples)
        .map(|i| i as f64 / (samples - 1) as f64)
        .collect();
    let rho: Vec<f64> = xs.iter().map(|&x| profile.rho(x)).collect();
    let monotone = rho.windows(2).all(|w| w[1] >= w[0]);
    let min_rho = rho.iter().copied().fold(f64::INFINITY, f64::min);
    let sampled_max = xs
        .iter()
        .map(|&x| profile.rho_prime(x))
        .fold(f64::NEG_INFINITY, f64::max);
    let (a, b) = (1.0 - profile.kappa, 1.0 - profile.delta);
    let plateau_ok = xs
        .iter()
        .filter(|&&x| x > b)
        .all(|&x| profile.rho_prime(x) == 1.0 / profile.delta);
    let curvature = 1.0 / (profile.delta * profile.gamma);
    let second_derivative_ok = xs.iter().all(|&x| {
        let s = profile.rho_second(x);
        if x > a && x < b {
            s == curvature
        } else if x > b || x < a {
            s == 0.0
        } else {
            true
        }
    });
    RhoReport {
        samples,
        monotone,
        min_rho,
        sampled_max_rho_prime: sampled_max,
        closed_form_max_rho_prime: profile.rho_prime_max(),
        rho_prime_bound: profile.rho_prime_bound(),
        plateau_ok,
        second_derivative_ok,
        junction_mismatch: profile.junction_mismatch(),
        value_at_support_start: profile.rho(a),
    }
}

/// Every term of the multiplier identity, integrated over `(0,T) x (1-κ, 1)`.
#[derive(Debug, Clone, Default, Serialize)]
pub struct MultiplierTerms {
    /// `∬ 2x^α u_x² ρ'`
    pub grad_rho_prime: f64,
    /// `∬ x^α u_x u ρ''`
    pub mixed_rho_second: f64,
    /// `∫ u_x(t,1)² ρ(1) dt`
    pub trace: f64,
    /// `∬ α x^{α-1} u_x² ρ`
    pub weight_derivative: f64,
    /// `∬ 2 f u_x ρ`
    pub source_grad: f64,
    /// `∬ f u ρ'`
    pub source_value: f64,
    /// `∫ 2 u_t(T) u_x(T) ρ`
    pub final_grad: f64,
    /// `∫ 2 u_1 u_{0,x} ρ`
    pub initial_grad: f64,
    /// `∫ u_t(T) u(T) ρ'`
    pub final_value: f64,
    /// `∫ u_1 u_0 ρ'`
    pub initial_value: f64,
    /// `∬_{(1-δ,1)} 2x^α u_x² / δ`, which equals `2 G(δ)`.
    pub plateau: f64,
}

impl MultiplierTerms {
    pub fn lhs(&self) -> f64 {
        self.grad_rho_prime + self.mixed_rho_second
    }

    pub fn rhs(&self) -> f64 {
        self.trace + self.weight_derivative + self.source_grad - self.final_grad
            + self.initial_grad
            + self.source_value
            - self.final_value
            + self.initial_value
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MultiplierReport {
    pub profile: MultiplierProfile,
    pub terms: MultiplierTerms,
    pub lhs: f64,
    pub rhs: f64,
    /// `|LHS - RHS| / max(|LHS|, |RHS|, 1)`.
    pub residual: f64,
}

#[derive(Default, Clone, Copy)]
struct LevelTerms {
    grad_rho_prime: f64,
    mixed: f64,
    weight_derivative: f64,
    source_grad: f64,
    source_value: f64,
    plateau: f64,
}

/// Per-level spatial integrals. Pieces are cut at the junctions of `ρ` so
/// that each three-point rule sees a single smooth branch.
fn spatial_terms<F: Fn(f64) -> f64>(
    grid: &Grid,
    u: &[f64],
    profile: &MultiplierProfile,
    f: F,
) -> LevelTerms {
    let alpha = grid.alpha();
    let nodes = grid.nodes();
    let mut acc = LevelTerms::default();
    let junction = 1.0 - profile.delta;
    for (lo, hi) in [(1.0 - profile.kappa, junction), (junction, 1.0)] {
        grid.for_each_piece(lo, hi, |cell, p, q| {
            let s = slope(grid, u, cell);
            for (x, w) in GaussRule::Three.points(p, q) {
                let ux = u[cell] + s * (x - nodes[cell]);
                let xa = x.powf(alpha);
                let (r, rp, rpp) = if lo < junction {
                    (
                        profile.quad(x),
                        profile.quad_prime(x),
                        1.0 / (profile.delta * profile.gamma),
                    )
                } else {
                    (profile.lin(x), 1.0 / profile.delta, 0.0)
                };
                let fx = f(x);
                acc.grad_rho_prime += w * 2.0 * xa * s * s * rp;
                acc.mixed += w * xa * s * ux * rpp;
                acc.weight_derivative += w * alpha * x.powf(alpha - 1.0) * s * s * r;
                acc.source_grad += w * 2.0 * fx * s * r;
                acc.source_value += w * fx * ux * rp;
                if lo >= junction {
                    acc.plateau += w * 2.0 * xa * s * s / profile.delta;
                }
            }
        });
    }
    acc
}

/// `∫_{1-κ}^1 a(x) b(x) w(x) dx` for P1 `a`, `b` and a multiplier weight.
fn endpoint_term<W: Fn(&MultiplierProfile, f64) -> f64>(
    grid: &Grid,
    a: &dyn Fn(usize, f64) -> f64,
    b: &dyn Fn(usize, f64) -> f64,
    profile: &MultiplierProfile,
    weight: W,
) -> f64 {
    let mut acc = 0.0;
    let junction = 1.0 - profile.delta;
    for (lo, hi) in [(1.0 - profile.kappa, junction), (junction, 1.0)] {
        grid.for_each_piece(lo, hi, |cell, p, q| {
            for (x, w) in GaussRule::Three.points(p, q) {
                acc += w * a(cell, x) * b(cell, x) * weight(profile, x);
            }
        });
    }
    acc
}

/// Evaluates every term of the identity on a discrete solution and returns
/// the normalised defect. Initial data are taken from the solution's first
/// level (`u(0)`, `u_t(0)`), which is what the integrator actually used.
pub fn multiplier_identity_residual(
    solution: &WaveSolution,
    data: &WaveData,
    profile: &MultiplierProfile,
) -> Result<MultiplierReport> {
    let grid = solution.grid().clone();
    let cells = grid.cells_in_right_neighbourhood(profile.kappa);
    if cells < MIN_SUPPORT_CELLS {
        let min_n = (MIN_SUPPORT_CELLS as f64 / profile.kappa).ceil() as usize;
        return Err(Error::Config(format!(
            "multiplier support (1-{:.4}, 1) meets only {cells} cells; need {MIN_SUPPORT_CELLS} (at least {min_n} uniform cells)",
            profile.kappa
        )));
    }
    let times = solution.times().to_vec();
    let n_levels = times.len();
    let mut per_level = Vec::with_capacity(n_levels);
    for k in 0..n_levels {
        let f = |x: f64| data.f.eval(&grid, &times, k, x);
        per_level.push(if data.f.is_zero() {
            spatial_terms(&grid, solution.u.level(k), profile, |_| 0.0)
        } else {
            spatial_terms(&grid, solution.u.level(k), profile, f)
        });
    }
    let integrate = |sel: fn(&LevelTerms) -> f64| {
        let v: Vec<f64> = per_level.iter().map(sel).collect();
        trapezoid(&times, &v)
    };
    let rho1 = profile.rho(1.0);
    let trace_sq: Vec<f64> = solution.trace.values.iter().map(|g| g * g * rho1).collect();

    let p1 = |vals: &[f64]| {
        let vals = vals.to_vec();
        let g = grid.clone();
        move |cell: usize, x: f64| vals[cell] + slope(&g, &vals, cell) * (x - g.nodes()[cell])
    };
    let grad = |vals: &[f64]| {
        let vals = vals.to_vec();
        let g = grid.clone();
        move |cell: usize, _x: f64| slope(&g, &vals, cell)
    };
    let last = n_levels - 1;
    let (u0, v0) = (solution.u.level(0), solution.v.level(0));
    let (ut, vt) = (solution.u.level(last), solution.v.level(last));
    let rho = |p: &MultiplierProfile, x: f64| p.rho(x);
    let rho_p = |p: &MultiplierProfile, x: f64| p.rho_prime(x);

    let terms = MultiplierTerms {
        grad_rho_prime: integrate(|l| l.grad_rho_prime),
        mixed_rho_second: integrate(|l| l.mixed),
        trace: trapezoid(&times, &trace_sq),
        weight_derivative: integrate(|l| l.weight_derivative),
        source_grad: integrate(|l| l.source_grad),
        source_value: integrate(|l| l.source_value),
        final_grad: 2.0 * endpoint_term(&grid, &p1(vt), &grad(ut), profile, rho),
        initial_grad: 2.0 * endpoint_term(&grid, &p1(v0), &grad(u0), profile, rho),
        final_value: endpoint_term(&grid, &p1(vt), &p1(ut), profile, rho_p),
        initial_value: endpoint_term(&grid, &p1(v0), &p1(u0), profile, rho_p),
        plateau: integrate(|l| l.plateau),
    };
    let (lhs, rhs) = (terms.lhs(), terms.rhs());
    Ok(MultiplierReport {
        profile: *profile,
        residual: (lhs - rhs).abs() / lhs.abs().max(rhs.abs()).max(1.0),
        lhs,
        rhs,
        terms,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::{DegeneracyParam, FieldKind, SpaceField};
    use crate::wave::{manufactured_problem, solve_weak, MmsEntry, Source, WaveProblem};
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::sync::Arc;

    fn grid(n: usize, alpha: f64) -> Arc<Grid> {
        Arc::new(Grid::uniform(n, DegeneracyParam::new(alpha).unwrap()).unwrap())
    }

    #[test]
    fn figure_values() {
        let p = build_rho(0.1, 0.05).unwrap();
        assert_eq!(p.rho(0.85), 0.0);
        assert_relative_eq!(p.rho(0.9), 0.25, max_relative = 1e-14);
        assert_relative_eq!(p.rho(1.0), 1.25, max_relative = 1e-14);
        assert_relative_eq!(p.rho_prime_max(), 10.0);
        assert_relative_eq!(p.rho_prime_bound(), 2.0 / 0.15, max_relative = 1e-15);
    }

    #[test]
    fn curvature_of_quadratic_piece() {
        let p = build_rho(0.2, 0.1).unwrap();
        assert_relative_eq!(p.rho_second(0.75), 50.0, max_relative = 1e-14);
        assert_eq!(p.rho_second(0.9), 0.0);
        assert_eq!(p.rho_second(0.5), 0.0);
    }

    #[test]
    fn invalid_parameters() {
        assert!(build_rho(0.1, 0.1).is_err());
        assert!(build_rho(0.1, 0.0).is_err());
        assert!(build_rho(0.7, 0.4).is_err());
    }

    #[test]
    fn property_report_passes() {
        let r = rho_property_check(&build_rho(0.1, 0.05).unwrap(), 10_000);
        assert!(r.ok(), "{r:?}");
        assert_eq!(r.value_at_support_start, 0.0);
    }

    proptest! {
        #[test]
        fn random_profiles_are_c1_and_monotone(delta in 0.01f64..0.6, frac in 0.01f64..0.99) {
            let gamma = frac * delta;
            prop_assume!(delta + gamma < 1.0);
            let p = build_rho(delta, gamma).unwrap();
            let r = rho_property_check(&p, 2_000);
            prop_assert!(r.ok(), "{:?}", r);
            // slopes are evaluated through x - (1 - κ): roundoff grows like 1/δ
            prop_assert!(p.junction_mismatch() <= 1e-12 * (1.0 + p.rho_prime_max()));
        }
    }

    #[test]
    fn zero_solution_has_zero_residual() {
        let g = grid(64, 1.0);
        let prob = WaveProblem::new(g.clone(), 1.0, 16).unwrap();
        let data = crate::wave::WaveData::zero(&g);
        let s = solve_weak(&prob, &data).unwrap();
        let r = multiplier_identity_residual(&s, &data, &build_rho(0.1, 0.05).unwrap()).unwrap();
        assert_eq!(r.residual, 0.0);
    }

    #[test]
    fn underresolved_support_is_rejected() {
        let g = grid(32, 1.0);
        let prob = WaveProblem::new(g.clone(), 1.0, 4).unwrap();
        let data = crate::wave::WaveData::zero(&g);
        let s = solve_weak(&prob, &data).unwrap();
        let err =
            multiplier_identity_residual(&s, &data, &build_rho(0.1, 0.05).unwrap()).unwrap_err();
        assert!(matches!(err, Error::Config(_)));
    }

    #[test]
    fn static_profile_closed_form_terms() {
        // u = 1 - x, alpha = 1, f = 1, T = 2; all time derivatives vanish
        let g = grid(256, 1.0);
        let u0 = SpaceField::from_fn(g.clone(), FieldKind::H1Alpha, |x| 1.0 - x).unwrap();
        let data = crate::wave::WaveData::new(
            Source::analytic(|_, _| 1.0),
            u0,
            SpaceField::zeros(g.clone(), FieldKind::L2),
        )
        .unwrap();
        let s = solve_weak(&WaveProblem::new(g.clone(), 2.0, 16).unwrap(), &data).unwrap();
        let p = build_rho(0.1, 0.05).unwrap();
        let r = multiplier_identity_residual(&s, &data, &p).unwrap();
        assert!(r.residual <= 1e-3, "{r:?}");
        assert!(r.terms.final_grad.abs() < 1e-12);
        assert!(r.terms.initial_value.abs() < 1e-12);
        // ∫ x ρ' over the support, times 2T
        let exact_grad: f64 = {
            let (a, b) = (0.85, 0.9);
            let quad = |x: f64| (x.powi(3) / 3.0 - a * x * x / 2.0) / (0.1 * 0.05);
            let lin = (1.0 - b * b) / 2.0 / 0.1;
            2.0 * 2.0 * (quad(b) - quad(a) + lin)
        };
        assert_relative_eq!(r.terms.grad_rho_prime, exact_grad, max_relative = 1e-10);
        // trace ≡ -1: T ρ(1)
        assert_relative_eq!(r.terms.trace, 2.0 * 1.25, max_relative = 1e-10);
    }

    #[test]
    fn mms_residual_is_small_and_shrinks() {
        let p = build_rho(0.1, 0.05).unwrap();
        let mut prev = f64::INFINITY;
        for n in [64, 128] {
            let g = grid(n, 1.0);
            let prob = WaveProblem::new(g, 1.0, n).unwrap();
            let m = manufactured_problem(MmsEntry::Quadratic, &prob).unwrap();
            let s = solve_weak(&prob, &m.data).unwrap();
            let r = multiplier_identity_residual(&s, &m.data, &p).unwrap();
            assert!(r.residual < prev);
            prev = r.residual;
        }
        assert!(prev <= 0.05);
    }
}

//! Residual of the space-time variational identity defining weak solutions.

use super::{WaveData, WaveSolution};
use crate::quadrature::{mesh_points, trapezoid, GaussRule};
use crate::spaces::{slope, value_at, Regime};
use rand::Rng;
use std::f64::consts::PI;

/// Smooth separable test function `φ(t, x) = (T - t) cos(ωt + θ) q(x)`, which
/// vanishes at `t = T`. The spatial factor `q` is a combination of modes that
/// vanish at `x = 1` (and at `x = 0` unless the left end is free).
#[derive(Debug, Clone)]
pub struct TestFunction {
    pub t_final: f64,
    pub omega: f64,
    pub phase: f64,
    /// `(amplitude, k)` for `sin(kπx)`.
    pub sine_modes: Vec<(f64, f64)>,
    /// `(amplitude, k)` for `cos((k - ½)πx)`; only used when `x = 0` is free.
    pub cosine_modes: Vec<(f64, f64)>,
}

impl TestFunction {
    fn time_factor(&self, t: f64) -> (f64, f64) {
        let arg = self.omega * t + self.phase;
        let tau = (self.t_final - t) * arg.cos();
        let dtau = -arg.cos() - (self.t_final - t) * self.omega * arg.sin();
        (tau, dtau)
    }

    fn space_factor(&self, x: f64) -> (f64, f64) {
        let mut q = 0.0;
        let mut dq = 0.0;
        for &(a, k) in &self.sine_modes {
            q += a * (k * PI * x).sin();
            dq += a * k * PI * (k * PI * x).cos();
        }
        for &(a, k) in &self.cosine_modes {
            let w = (k - 0.5) * PI;
            q += a * (w * x).cos();
            dq -= a * w * (w * x).sin();
        }
        (q, dq)
    }

    pub fn phi(&self, t: f64, x: f64) -> f64 {
        self.time_factor(t).0 * self.space_factor(x).0
    }

    pub fn phi_t(&self, t: f64, x: f64) -> f64 {
        self.time_factor(t).1 * self.space_factor(x).0
    }

    pub fn phi_x(&self, t: f64, x: f64) -> f64 {
        self.time_factor(t).0 * self.space_factor(x).1
    }
}

/// `count` random test functions admissible for `regime`.
pub fn random_test_functions<R: Rng>(
    rng: &mut R,
    regime: Regime,
    t_final: f64,
    count: usize,
) -> Vec<TestFunction> {
    (0..count)
        .map(|_| {
            let sine_modes = (1..=3)
                .map(|k| (rng.gen_range(-1.0..1.0), k as f64))
                .collect();
            let cosine_modes = match regime {
                Regime::Sdc => (1..=2)
                    .map(|k| (rng.gen_range(-1.0..1.0), k as f64))
                    .collect(),
                Regime::Wdc => Vec::new(),
            };
            TestFunction {
                t_final,
                omega: rng.gen_range(0.5..3.0),
                phase: rng.gen_range(0.0..PI),
                sine_modes,
                cosine_modes,
            }
        })
        .collect()
}

/// Relative residual of
/// `∬(-u_t φ_t + x^alpha u_x φ_x) - ∫u1 φ(0) - ∬ f φ = 0`.
///
/// Space integrals use three-point Gauss per cell, time integrals the
/// trapezoid rule on the solution's levels; the source term is paired with
/// the nodal interpolant of `φ` through the load vectors.
pub fn weak_form_residual(
    solution: &WaveSolution,
    data: &WaveData,
    test: &TestFunction,
) -> crate::Result<f64> {
    let grid = solution.grid().clone();
    let times = solution.times().to_vec();
    let alpha = grid.alpha();
    let loads = data.f.loads(&grid, &times)?;
    let points = mesh_points(grid.nodes(), GaussRule::Three, 12);
    let n_levels = times.len();

    let mut kinetic = vec![0.0; n_levels];
    let mut elastic = vec![0.0; n_levels];
    let mut forcing = vec![0.0; n_levels];
    for k in 0..n_levels {
        let t = times[k];
        let (u, v) = (solution.u.level(k), solution.v.level(k));
        for &(cell, x, w) in &points {
            kinetic[k] += w * value_at(&grid, v, x) * test.phi_t(t, x);
            elastic[k] += w * x.powf(alpha) * slope(&grid, u, cell) * test.phi_x(t, x);
        }
        forcing[k] = grid
            .nodes()
            .iter()
            .zip(&loads[k])
            .map(|(&x, b)| b * test.phi(t, x))
            .sum();
    }
    let kin = trapezoid(&times, &kinetic);
    let ela = trapezoid(&times, &elastic);
    let frc = trapezoid(&times, &forcing);
    let init: f64 = points
        .iter()
        .map(|&(_, x, w)| w * data.u1.value_at(x) * test.phi(times[0], x))
        .sum();
    let residual = -kin + ela - init - frc;
    let scale = [kin, ela, init, frc]
        .iter()
        .fold(0.0_f64, |m, v| m.max(v.abs()));
    Ok(if scale > 0.0 {
        residual.abs() / scale
    } else {
        residual.abs()
    })
}

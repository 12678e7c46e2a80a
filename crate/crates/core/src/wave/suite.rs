//! Seeded random data and the data-to-solution ratios measured on them.

use super::{Source, WaveData, WaveSolution};
use crate::error::Result;
use crate::quadrature::linear_sq_integral;
use crate::spaces::{DegeneracyParam, FieldKind, Grid, Regime, SpaceField};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::Arc;

/// Cells of the reference mesh carrying the velocity noise. Dyadic
/// refinements of it represent the same piecewise-linear function exactly.
pub const REFERENCE_CELLS: usize = 32;

/// Nodal noise on a fixed uniform reference mesh, normalised to unit `L²` norm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceNoise {
    pub values: Vec<f64>,
}

impl ReferenceNoise {
    pub fn random<R: Rng>(rng: &mut R) -> Self {
        let raw: Vec<f64> = (0..=REFERENCE_CELLS)
            .map(|_| rng.gen_range(-1.0..1.0))
            .collect();
        let h = 1.0 / REFERENCE_CELLS as f64;
        let norm_sq: f64 = raw
            .windows(2)
            .map(|w| linear_sq_integral(0.0, h, w[0], w[1]))
            .sum();
        let s = norm_sq.sqrt().recip();
        Self {
            values: raw.into_iter().map(|v| v * s).collect(),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let n = self.values.len() - 1;
        let y = (x * n as f64).clamp(0.0, n as f64);
        let i = (y.floor() as usize).min(n - 1);
        let s = y - i as f64;
        self.values[i] * (1.0 - s) + self.values[i + 1] * s
    }
}

/// Recipe for one random datum; realised on any grid with the same `alpha`.
///
/// * `u0 = b (x - x²) + Σ a_k sin(kπx) [+ Σ c_k cos((k+½)πx) if x = 0 is free]`
/// * `u1 =` reference noise with unit `L²` norm, times `u1_scale`
/// * `f = A cos(ωt + θ) Σ s_k sin(kπx)`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatumSpec {
    pub id: usize,
    pub seed: u64,
    pub alpha: f64,
    pub bubble: f64,
    pub sines: Vec<f64>,
    pub cosines: Vec<f64>,
    pub u1_scale: f64,
    pub noise: ReferenceNoise,
    pub f_amplitude: f64,
    pub f_omega: f64,
    pub f_phase: f64,
    pub f_sines: Vec<f64>,
}

impl DatumSpec {
    fn u0(&self, x: f64) -> f64 {
        let mut u = self.bubble * (x - x * x);
        for (k, a) in self.sines.iter().enumerate() {
            u += a * ((k + 1) as f64 * PI * x).sin();
        }
        for (k, c) in self.cosines.iter().enumerate() {
            u += c * ((k as f64 + 0.5) * PI * x).cos();
        }
        u
    }

    pub fn source(&self) -> Source {
        if self.f_amplitude == 0.0 {
            return Source::Zero;
        }
        let (a, w, p) = (self.f_amplitude, self.f_omega, self.f_phase);
        let modes = self.f_sines.clone();
        Source::analytic(move |t, x| {
            let space: f64 = modes
                .iter()
                .enumerate()
                .map(|(k, s)| s * ((k + 1) as f64 * PI * x).sin())
                .sum();
            a * (w * t + p).cos() * space
        })
    }

    pub fn realize(&self, grid: &Arc<Grid>) -> Result<WaveData> {
        let u0 = SpaceField::from_fn(grid.clone(), FieldKind::H1Alpha, |x| self.u0(x))?;
        let u1 = SpaceField::from_fn(grid.clone(), FieldKind::L2, |x| {
            self.u1_scale * self.noise.eval(x)
        })?;
        WaveData::new(self.source(), u0, u1)
    }
}

/// `size` random data for `param`; datum `i` draws from stream `i` of the
/// suite seed, so suites of different sizes share their common prefix.
pub fn random_suite(param: DegeneracyParam, size: usize, seed: u64) -> Vec<DatumSpec> {
    (0..size)
        .map(|id| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(id as u64 + 1);
            let mut draw = |n: usize, scale: f64| -> Vec<f64> {
                (0..n)
                    .map(|k| scale * rng.gen_range(-1.0..1.0) / (k + 1) as f64)
                    .collect()
            };
            let sines = draw(4, 1.0);
            let cosines = match param.regime() {
                Regime::Sdc => draw(2, 1.0),
                Regime::Wdc => Vec::new(),
            };
            let f_sines = draw(3, 1.0);
            let bubble = rng.gen_range(-2.0..2.0);
            // a quarter of the data carry no source, another quarter no velocity
            let f_amplitude = if id % 4 == 1 {
                0.0
            } else {
                rng.gen_range(0.2..2.0)
            };
            let u1_scale = if id % 4 == 2 {
                0.0
            } else {
                rng.gen_range(0.1..1.0)
            };
            DatumSpec {
                id,
                seed,
                alpha: param.alpha(),
                bubble,
                sines,
                cosines,
                u1_scale,
                noise: ReferenceNoise::random(&mut rng),
                f_amplitude,
                f_omega: rng.gen_range(0.5..4.0),
                f_phase: rng.gen_range(0.0..PI),
                f_sines,
            }
        })
        .collect()
}

/// `sup_t(‖u_t‖²_{L²} + ‖u‖²_{H¹_α}) / N₀`.
pub fn wellposedness_ratio(solution: &WaveSolution, data: &WaveData) -> Option<f64> {
    let n0 = data.n0(solution.times());
    (n0 > 0.0).then(|| solution.sup_state_norm_sq() / n0)
}

/// `∫_0^T u_x(t,1)² dt / (‖f‖²_{L¹L²} + E(0))`.
pub fn hidden_regularity_ratio(solution: &WaveSolution, data: &WaveData) -> Option<f64> {
    let f = data.f.l1_l2_norm(solution.grid(), solution.times());
    let denom = f * f + solution.energy.values[0];
    (denom > 0.0).then(|| solution.trace.l2_norm_sq() / denom)
}

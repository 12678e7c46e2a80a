use degwave::spaces::{random_field, FieldKind};
use degwave::transposition::{solve_very_weak, VeryWeakData};
use degwave::wave::{solve_weak, Scheme, Source, WaveData, WaveProblem};
use degwave::{DegeneracyParam, Grid, SpaceField};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

fn grid(n: usize, alpha: f64) -> Arc<Grid> {
    Arc::new(Grid::uniform(n, DegeneracyParam::new(alpha).unwrap()).unwrap())
}

fn bubble(g: &Arc<Grid>) -> WaveData {
    let u0 = SpaceField::from_fn(g.clone(), FieldKind::H1Alpha, |x| x - x * x).unwrap();
    WaveData::new(
        Source::Zero,
        u0,
        SpaceField::zeros(g.clone(), FieldKind::L2),
    )
    .unwrap()
}

fn random_data(g: &Arc<Grid>, seed: u64) -> WaveData {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let u0 = random_field(g, FieldKind::H1Alpha, &mut rng);
    let u1 = random_field(g, FieldKind::L2, &mut rng).as_l2();
    WaveData::new(Source::Zero, u0, u1).unwrap()
}

#[test]
fn bubble_energy_gap_is_second_order() {
    for alpha in [0.5, 1.0, 1.5] {
        // ½∫x^α(1-2x)² by term-wise integration
        let exact = 0.5 * (1.0 / (alpha + 1.0) - 4.0 / (alpha + 2.0) + 4.0 / (alpha + 3.0));
        let gap = |n: usize| {
            let p = WaveProblem::new(grid(n, alpha), 1.0, n).unwrap();
            (solve_weak(&p, &bubble(p.grid())).unwrap().energy.values[0] - exact).abs()
        };
        let ratio = gap(64) / gap(128);
        assert!((ratio - 4.0).abs() < 0.2, "alpha {alpha}: {ratio}");
    }
}

#[test]
fn lifting_reproduces_the_weak_solution() {
    for seed in 0..4 {
        let p = WaveProblem::new(grid(64, 1.0), 1.0, 64).unwrap();
        let data = random_data(p.grid(), seed);
        let u = solve_weak(&p, &data).unwrap().u;
        let z = solve_very_weak(&VeryWeakData::from_wave_data(&data), &p)
            .unwrap()
            .z;
        let scale = u.raw_values().iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let diff = u
            .raw_values()
            .iter()
            .zip(z.raw_values())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(diff <= 1e-11 * scale, "seed {seed}: {diff:e}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn unforced_energy_is_conserved(seed in any::<u64>(), alpha in 0.1..1.9f64, nt in 16usize..64) {
        let p = WaveProblem::new(grid(48, alpha), 1.0, nt).unwrap();
        let e = solve_weak(&p, &random_data(p.grid(), seed)).unwrap().energy.values;
        let drift = e.iter().map(|v| (v - e[0]).abs()).fold(0.0, f64::max);
        prop_assert!(drift <= 1e-11 * e[0], "drift {drift:e} of {}", e[0]);
    }

    #[test]
    fn solutions_superpose(s1 in any::<u64>(), s2 in any::<u64>(), c in -3.0..3.0f64, leapfrog in any::<bool>()) {
        let scheme = if leapfrog { Scheme::Leapfrog } else { Scheme::NewmarkAvgAccel };
        let g = grid(32, 0.7);
        let p = WaveProblem::new(g.clone(), 0.5, 64).unwrap().with_scheme(scheme);
        let (a, b) = (random_data(&g, s1), random_data(&g, s2));
        let mix = |x: &SpaceField, y: &SpaceField, kind| {
            let v = x.values().iter().zip(y.values()).map(|(x, y)| c * x + y).collect();
            SpaceField::new(g.clone(), v, kind).unwrap()
        };
        let ab = WaveData::new(Source::Zero, mix(&a.u0, &b.u0, FieldKind::H1Alpha), mix(&a.u1, &b.u1, FieldKind::L2)).unwrap();
        let (ua, ub, uab) = (solve_weak(&p, &a).unwrap().u, solve_weak(&p, &b).unwrap().u, solve_weak(&p, &ab).unwrap().u);
        let scale = uab.raw_values().iter().fold(1.0_f64, |m, v| m.max(v.abs()));
        for ((x, y), z) in ua.raw_values().iter().zip(ub.raw_values()).zip(uab.raw_values()) {
            prop_assert!((c * x + y - z).abs() <= 1e-12 * scale);
        }
    }
}

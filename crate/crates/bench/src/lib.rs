//! Shared fixtures for the solver benchmarks.

use degwave::spaces::FieldKind;
use degwave::wave::{
    manufactured_problem, solve_weak, MmsEntry, WaveData, WaveProblem, WaveSolution,
};
use degwave::{DegeneracyParam, Grid, SpaceField};
use std::sync::Arc;

pub fn grid(n_cells: usize, alpha: f64) -> Arc<Grid> {
    Arc::new(
        Grid::uniform(
            n_cells,
            DegeneracyParam::new(alpha).expect("alpha in (0,2)"),
        )
        .expect("n_cells > 0"),
    )
}

/// Cubic manufactured problem on `n_cells` cells with `nt = n_cells` steps up to `T = 1`.
pub fn manufactured(n_cells: usize, alpha: f64) -> (WaveProblem, WaveData) {
    let p = WaveProblem::new(grid(n_cells, alpha), 1.0, n_cells).expect("valid problem");
    let data = manufactured_problem(MmsEntry::Cubic, &p)
        .expect("cubic is admissible")
        .data;
    (p, data)
}

pub fn solved(n_cells: usize, alpha: f64) -> WaveSolution {
    let (p, data) = manufactured(n_cells, alpha);
    solve_weak(&p, &data).expect("solve")
}

pub fn load(n_cells: usize, alpha: f64) -> SpaceField {
    SpaceField::from_fn(grid(n_cells, alpha), FieldKind::L2, |x| (3.0 * x).sin())
        .expect("finite load")
}

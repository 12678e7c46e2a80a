//! P1 assembly and the degenerate elliptic problem `(x^alpha v_x)_x = g`.
//!
//! The weak form used throughout is
//!
//! ```text
//! ∫ x^alpha v_x φ_x dx = -∫ g φ dx   for all φ in the constrained P1 space,
//! ```
//!
//! which matches the lifting equation `(x^alpha ψ⁰_x)_x = z¹` literally. The
//! node at `x = 1` is always fixed; the node at `x = 0` is fixed in the weakly
//! degenerate case and free (weighted Neumann, imposed weakly) otherwise.

use crate::error::{check_len, Error, Result};
use crate::linalg::{Tridiagonal, TridiagonalLu};
use crate::quadrature::GaussRule;
use crate::spaces::{FieldKind, Grid, Regime, SpaceField};
use serde::Serialize;
use std::ops::Range;
use std::sync::Arc;

/// Stiffness `∫ x^alpha φ_i' φ_j'` over all nodes, built from the exact cell weights.
pub fn assemble_full_stiffness(grid: &Grid) -> Tridiagonal {
    let n = grid.n_nodes();
    let mut k = Tridiagonal::zeros(n);
    for cell in 0..grid.n_cells() {
        let h = grid.h(cell);
        let c = grid.cell_weights()[cell] / (h * h);
        k.diag[cell] += c;
        k.diag[cell + 1] += c;
        k.upper[cell] -= c;
        k.lower[cell] -= c;
    }
    k
}

/// Consistent P1 mass matrix `∫ φ_i φ_j`.
pub fn assemble_full_mass(grid: &Grid) -> Tridiagonal {
    let n = grid.n_nodes();
    let mut m = Tridiagonal::zeros(n);
    for cell in 0..grid.n_cells() {
        let h = grid.h(cell);
        m.diag[cell] += h / 3.0;
        m.diag[cell + 1] += h / 3.0;
        m.upper[cell] += h / 6.0;
        m.lower[cell] += h / 6.0;
    }
    m
}

/// Row-sum lumped mass matrix.
pub fn assemble_full_lumped_mass(grid: &Grid) -> Tridiagonal {
    let n = grid.n_nodes();
    let mut m = Tridiagonal::zeros(n);
    for cell in 0..grid.n_cells() {
        let h = grid.h(cell);
        m.diag[cell] += h / 2.0;
        m.diag[cell + 1] += h / 2.0;
    }
    m
}

/// Indices of the unconstrained nodes.
pub fn free_range(grid: &Grid) -> Range<usize> {
    let first = match grid.param().regime() {
        Regime::Wdc => 1,
        Regime::Sdc => 0,
    };
    first..grid.n_nodes() - 1
}

/// Embeds a free-node vector into a full nodal vector (zeros at constrained nodes).
pub(crate) fn embed(free: &Range<usize>, n_nodes: usize, x: &[f64]) -> Vec<f64> {
    let mut full = vec![0.0; n_nodes];
    full[free.clone()].copy_from_slice(x);
    full
}

/// The SPD operator of `a(u,v) = ∫ x^alpha u_x v_x` on the constrained P1 space.
#[derive(Debug, Clone, Serialize)]
pub struct StiffnessOperator {
    #[serde(skip)]
    grid: Arc<Grid>,
    regime: Regime,
    #[serde(skip)]
    free: Range<usize>,
    matrix: Tridiagonal,
    #[serde(skip)]
    full: Tridiagonal,
}

pub fn assemble_stiffness(grid: &Arc<Grid>) -> StiffnessOperator {
    let full = assemble_full_stiffness(grid);
    let free = free_range(grid);
    StiffnessOperator {
        grid: grid.clone(),
        regime: grid.param().regime(),
        matrix: full.submatrix(free.clone()),
        free,
        full,
    }
}

impl StiffnessOperator {
    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }

    /// Constrained (free-node) matrix.
    pub fn matrix(&self) -> &Tridiagonal {
        &self.matrix
    }

    /// Unconstrained matrix over all nodes.
    pub fn full(&self) -> &Tridiagonal {
        &self.full
    }

    pub fn free(&self) -> Range<usize> {
        self.free.clone()
    }

    /// `K u` on the free rows, for a full nodal vector `u`.
    pub fn apply(&self, u: &[f64]) -> Vec<f64> {
        let ku = self.full.apply(u);
        ku[self.free.clone()].to_vec()
    }

    /// `a(u, v)` for full nodal vectors.
    pub fn energy_product(&self, u: &[f64], v: &[f64]) -> f64 {
        self.full.apply(u).iter().zip(v).map(|(a, b)| a * b).sum()
    }
}

/// Solves `(x^alpha v_x)_x = g` in weak form; the regime comes from the grid.
pub fn solve_degenerate_poisson(g: &SpaceField) -> Result<SpaceField> {
    let grid = g.grid().clone();
    let op = assemble_stiffness(&grid);
    let mass = assemble_full_mass(&grid);
    solve_with(&op, &mass, g.values())
}

/// Same as [`solve_degenerate_poisson`] for an analytic right-hand side; the
/// load `∫ g φ_i` is integrated by Gauss quadrature instead of through the
/// nodal interpolant, which matters when `g` is not smooth at `x = 0`.
pub fn solve_degenerate_poisson_fn<F: Fn(f64) -> f64>(
    grid: &Arc<Grid>,
    g: F,
) -> Result<SpaceField> {
    let op = assemble_stiffness(grid);
    solve_load(&op, &load_vector(grid, g))
}

/// `∫ g φ_i dx` for every node, five-point Gauss per cell. The cell touching
/// `x = 0` is split geometrically so that power-type singularities of `g`
/// there are integrated accurately.
pub fn load_vector<F: Fn(f64) -> f64>(grid: &Grid, g: F) -> Vec<f64> {
    let mut b = vec![0.0; grid.n_nodes()];
    let nodes = grid.nodes();
    for cell in 0..grid.n_cells() {
        let (x0, h) = (nodes[cell], grid.h(cell));
        let mut add = |lo: f64, hi: f64| {
            for (x, w) in GaussRule::Five.points(lo, hi) {
                let gx = g(x) * w;
                let s = (x - x0) / h;
                b[cell] += gx * (1.0 - s);
                b[cell + 1] += gx * s;
            }
        };
        if cell == 0 {
            let mut hi = x0 + h;
            for _ in 0..GEOMETRIC_LEVELS {
                add(0.5 * hi, hi);
                hi *= 0.5;
            }
            add(0.0, hi);
        } else {
            add(x0, x0 + h);
        }
    }
    b
}

const GEOMETRIC_LEVELS: usize = 24;

fn solve_with(op: &StiffnessOperator, mass: &Tridiagonal, g: &[f64]) -> Result<SpaceField> {
    check_len(op.grid.n_nodes(), g.len())?;
    solve_load(op, &mass.apply(g))
}

/// Solves `K v = -b` on the free nodes for a full load vector `b`.
pub(crate) fn solve_load(op: &StiffnessOperator, load: &[f64]) -> Result<SpaceField> {
    let grid = op.grid.clone();
    check_len(grid.n_nodes(), load.len())?;
    let free = op.free();
    let mut rhs: Vec<f64> = load[free.clone()].iter().map(|v| -v).collect();
    let lu: TridiagonalLu = op.matrix.factor().map_err(|e| match e {
        Error::Singular { row } => Error::Singular {
            row: row + free.start,
        },
        other => other,
    })?;
    lu.solve_in_place(&mut rhs)?;
    let values = embed(&free, grid.n_nodes(), &rhs);
    SpaceField::new(grid, values, FieldKind::H1Alpha)
}

/// Largest weak-form residual `|∫x^α v_x φ_x + ∫gφ|` over the free hat
/// functions, relative to `max(‖K v‖_∞, ‖M g‖_∞)`.
pub fn galerkin_residual(v: &SpaceField, g: &SpaceField) -> f64 {
    let grid = v.grid();
    let free = free_range(grid);
    let kv = assemble_full_stiffness(grid).apply(v.values());
    let mg = assemble_full_mass(grid).apply(g.values());
    let scale = kv[free.clone()]
        .iter()
        .chain(&mg[free.clone()])
        .fold(0.0_f64, |m, x| m.max(x.abs()));
    let worst = free.map(|i| (kv[i] + mg[i]).abs()).fold(0.0_f64, f64::max);
    if scale > 0.0 {
        worst / scale
    } else {
        worst
    }
}

/// An element of `H^{-1}_alpha`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum DualElement {
    /// `L²` data acting by `v ↦ ∫ z v`.
    L2(SpaceField),
    /// Riesz representative `ũ`: `⟨z, v⟩ = ∫ x^alpha ũ_x v_x`.
    Representative(SpaceField),
}

impl DualElement {
    pub fn grid(&self) -> &Arc<Grid> {
        match self {
            DualElement::L2(f) | DualElement::Representative(f) => f.grid(),
        }
    }

    /// The Riesz representative `ũ`, solving for it if needed.
    pub fn representative(&self) -> Result<SpaceField> {
        match self {
            DualElement::Representative(r) => Ok(r.clone()),
            // ⟨z, v⟩ = ∫ z v = -∫ x^α ψ_x v_x where (x^α ψ_x)_x = z, so ũ = -ψ.
            DualElement::L2(z) => Ok(solve_degenerate_poisson(z)?.scaled(-1.0)),
        }
    }

    /// Pairing `⟨z, v⟩` with a member of `H^1_alpha`.
    pub fn pair(&self, v: &[f64]) -> Result<f64> {
        let grid = self.grid();
        check_len(grid.n_nodes(), v.len())?;
        match self {
            DualElement::L2(z) => Ok(assemble_full_mass(grid)
                .apply(z.values())
                .iter()
                .zip(v)
                .map(|(a, b)| a * b)
                .sum()),
            DualElement::Representative(r) => {
                Ok(assemble_stiffness(grid).energy_product(r.values(), v))
            }
        }
    }
}

/// `‖z‖_{H^{-1}_alpha} = (∫ x^alpha ũ_x² dx)^{1/2}`.
pub fn h_minus1_norm(z: &DualElement) -> Result<f64> {
    Ok(z.representative()?.weighted_grad_sq().sqrt())
}

//! Meshes, P1 fields and the weighted norms of `H^1_alpha`.
//!
//! Every integral of the degenerate coefficient `x^alpha` is taken in closed
//! form on each cell (or piece of a cell), so nothing is ever evaluated at the
//! singular point of `x^{alpha-1}`. Integrals of products of P1 functions are
//! likewise exact.

use crate::error::{check_len, Error, Result};
use crate::quadrature::{linear_sq_integral, trapezoid};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// Boundary behaviour at the degenerate end `x = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    /// `alpha` in `(0,1)`: Dirichlet condition `u(0) = 0`.
    #[serde(rename = "WDC")]
    Wdc,
    /// `alpha` in `[1,2)`: weighted Neumann condition `(x^alpha u_x)(0) = 0`.
    #[serde(rename = "SDC")]
    Sdc,
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Regime::Wdc => write!(f, "WDC"),
            Regime::Sdc => write!(f, "SDC"),
        }
    }
}

/// The degeneracy exponent together with its derived regime.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct DegeneracyParam {
    alpha: f64,
    regime: Regime,
}

impl DegeneracyParam {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 2.0) {
            return Err(Error::Domain(format!(
                "degeneracy exponent must lie in (0,2), got {alpha}"
            )));
        }
        let regime = if alpha < 1.0 {
            Regime::Wdc
        } else {
            Regime::Sdc
        };
        Ok(Self { alpha, regime })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }

    /// Whether the node at `x = 0` is constrained for `H^1_alpha` members.
    pub fn left_constrained(&self) -> bool {
        self.regime == Regime::Wdc
    }
}

impl TryFrom<f64> for DegeneracyParam {
    type Error = Error;
    fn try_from(alpha: f64) -> Result<Self> {
        Self::new(alpha)
    }
}

impl From<DegeneracyParam> for f64 {
    fn from(p: DegeneracyParam) -> f64 {
        p.alpha
    }
}

/// `∫_{x_lo}^{x_hi} x^alpha dx` in closed form.
pub fn cell_weight_integral(x_lo: f64, x_hi: f64, alpha: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x_lo) || !(0.0..=1.0).contains(&x_hi) || x_lo >= x_hi {
        return Err(Error::Domain(format!(
            "weight interval must satisfy 0 <= lo < hi <= 1, got [{x_lo}, {x_hi}]"
        )));
    }
    if !(alpha > 0.0 && alpha < 2.0) {
        return Err(Error::Domain(format!(
            "alpha must lie in (0,2), got {alpha}"
        )));
    }
    Ok(weight_unchecked(x_lo, x_hi, alpha))
}

#[inline]
pub(crate) fn weight_unchecked(x_lo: f64, x_hi: f64, alpha: f64) -> f64 {
    let p = alpha + 1.0;
    (x_hi.powf(p) - x_lo.powf(p)) / p
}

/// Mesh layout.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum MeshKind {
    #[default]
    Uniform,
    /// Geometric grading toward `x = 0`: each cell is `ratio` times wider than
    /// its left neighbour.
    Graded { ratio: f64 },
}

/// Nonuniform 1D mesh on `[0,1]` with exact per-cell integrals of `x^alpha`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Grid {
    param: DegeneracyParam,
    nodes: Vec<f64>,
    cell_weights: Vec<f64>,
}

impl Grid {
    pub fn from_nodes(nodes: Vec<f64>, param: DegeneracyParam) -> Result<Self> {
        if nodes.len() < 2 {
            return Err(Error::Domain("a grid needs at least one cell".into()));
        }
        if nodes[0] != 0.0 || *nodes.last().unwrap() != 1.0 {
            return Err(Error::Domain("grid must start at 0 and end at 1".into()));
        }
        if nodes.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Domain(
                "grid nodes must be strictly increasing".into(),
            ));
        }
        let cell_weights = nodes
            .windows(2)
            .map(|w| weight_unchecked(w[0], w[1], param.alpha()))
            .collect();
        Ok(Self {
            param,
            nodes,
            cell_weights,
        })
    }

    pub fn uniform(n_cells: usize, param: DegeneracyParam) -> Result<Self> {
        if n_cells == 0 {
            return Err(Error::Domain("a grid needs at least one cell".into()));
        }
        let h = 1.0 / n_cells as f64;
        let mut nodes: Vec<f64> = (0..=n_cells).map(|i| i as f64 * h).collect();
        nodes[n_cells] = 1.0;
        Self::from_nodes(nodes, param)
    }

    pub fn graded(n_cells: usize, param: DegeneracyParam, ratio: f64) -> Result<Self> {
        if !(ratio > 0.0) || !ratio.is_finite() {
            return Err(Error::Domain(format!(
                "grading ratio must be positive, got {ratio}"
            )));
        }
        if n_cells == 0 {
            return Err(Error::Domain("a grid needs at least one cell".into()));
        }
        if (ratio - 1.0).abs() < 1e-12 {
            return Self::uniform(n_cells, param);
        }
        let total = (ratio.powi(n_cells as i32) - 1.0) / (ratio - 1.0);
        let mut nodes = Vec::with_capacity(n_cells + 1);
        let mut acc = 0.0;
        nodes.push(0.0);
        for i in 0..n_cells {
            acc += ratio.powi(i as i32);
            nodes.push(acc / total);
        }
        nodes[n_cells] = 1.0;
        Self::from_nodes(nodes, param)
    }

    pub fn build(n_cells: usize, param: DegeneracyParam, kind: MeshKind) -> Result<Self> {
        match kind {
            MeshKind::Uniform => Self::uniform(n_cells, param),
            MeshKind::Graded { ratio } => Self::graded(n_cells, param, ratio),
        }
    }

    pub fn param(&self) -> DegeneracyParam {
        self.param
    }

    pub fn alpha(&self) -> f64 {
        self.param.alpha()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn cell_weights(&self) -> &[f64] {
        &self.cell_weights
    }

    pub fn n_cells(&self) -> usize {
        self.cell_weights.len()
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn h(&self, cell: usize) -> f64 {
        self.nodes[cell + 1] - self.nodes[cell]
    }

    pub fn h_min(&self) -> f64 {
        (0..self.n_cells())
            .map(|i| self.h(i))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn h_max(&self) -> f64 {
        (0..self.n_cells()).map(|i| self.h(i)).fold(0.0, f64::max)
    }

    /// Compensated sum of the cell weights; equals `1/(alpha+1)`.
    pub fn total_weight(&self) -> f64 {
        neumaier_sum(self.cell_weights.iter().copied())
    }

    /// Index of the cell containing `x` (the left cell at interior nodes).
    pub fn locate(&self, x: f64) -> usize {
        let idx = self.nodes.partition_point(|&n| n < x);
        idx.saturating_sub(1).min(self.n_cells() - 1)
    }

    /// Number of cells that intersect `(1 - eps, 1)`.
    pub fn cells_in_right_neighbourhood(&self, eps: f64) -> usize {
        let lo = 1.0 - eps;
        self.nodes[1..].iter().filter(|&&x| x > lo).count()
    }

    /// Visits the nonempty pieces `[p, q] = [x_i, x_{i+1}] ∩ [lo, hi]`.
    pub fn for_each_piece<F: FnMut(usize, f64, f64)>(&self, lo: f64, hi: f64, mut f: F) {
        if !(hi > lo) {
            return;
        }
        let first = self.locate(lo.max(0.0));
        for cell in first..self.n_cells() {
            let (a, b) = (self.nodes[cell], self.nodes[cell + 1]);
            if a >= hi {
                break;
            }
            let p = a.max(lo);
            let q = b.min(hi);
            if q > p {
                f(cell, p, q);
            }
        }
    }
}

fn neumaier_sum<I: Iterator<Item = f64>>(it: I) -> f64 {
    let mut sum = 0.0_f64;
    let mut c = 0.0_f64;
    for x in it {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            c += (sum - t) + x;
        } else {
            c += (x - t) + sum;
        }
        sum = t;
    }
    sum + c
}

/// Uniform time axis `t_k = k T / nt`, `k = 0..=nt`.
pub fn uniform_times(t_final: f64, nt: usize) -> Vec<f64> {
    let dt = t_final / nt as f64;
    let mut t: Vec<f64> = (0..=nt).map(|k| k as f64 * dt).collect();
    if let Some(last) = t.last_mut() {
        *last = t_final;
    }
    t
}

/// Function space a nodal field is meant to represent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FieldKind {
    /// Plain `L^2(0,1)` data; no boundary constraints.
    L2,
    /// Member of `H^1_alpha`: `u(1) = 0`, and `u(0) = 0` in the weakly degenerate case.
    H1Alpha,
}

/// Which endpoint values are constrained to zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BoundaryTags {
    pub left: bool,
    pub right: bool,
}

/// Continuous piecewise-linear function on a [`Grid`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpaceField {
    grid: Arc<Grid>,
    values: Vec<f64>,
    kind: FieldKind,
}

const BC_TOL: f64 = 1e-12;

impl SpaceField {
    pub fn new(grid: Arc<Grid>, values: Vec<f64>, kind: FieldKind) -> Result<Self> {
        check_len(grid.n_nodes(), values.len())?;
        let field = Self { grid, values, kind };
        field.check_constraints()?;
        Ok(field)
    }

    pub fn zeros(grid: Arc<Grid>, kind: FieldKind) -> Self {
        let n = grid.n_nodes();
        Self {
            grid,
            values: vec![0.0; n],
            kind,
        }
    }

    /// Nodal interpolant of `f`. For `H1Alpha`, constrained endpoint values are
    /// snapped to zero after checking that `f` (nearly) vanishes there.
    pub fn from_fn<F: Fn(f64) -> f64>(grid: Arc<Grid>, kind: FieldKind, f: F) -> Result<Self> {
        let mut values: Vec<f64> = grid.nodes().iter().map(|&x| f(x)).collect();
        if kind == FieldKind::H1Alpha {
            let scale = values.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
            let tags = boundary_tags(&grid, kind);
            let n = values.len() - 1;
            for (on, idx) in [(tags.left, 0), (tags.right, n)] {
                if on {
                    if values[idx].abs() > 1e-10 * scale {
                        return Err(Error::Domain(format!(
                            "H^1_alpha field must vanish at x = {}, got {}",
                            grid.nodes()[idx],
                            values[idx]
                        )));
                    }
                    values[idx] = 0.0;
                }
            }
        }
        Self::new(grid, values, kind)
    }

    fn check_constraints(&self) -> Result<()> {
        if self.kind != FieldKind::H1Alpha {
            return Ok(());
        }
        let tags = self.boundary_tags();
        let scale = self.values.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
        let n = self.values.len() - 1;
        if tags.right && self.values[n].abs() > BC_TOL * scale {
            return Err(Error::Domain(format!(
                "H^1_alpha field must satisfy u(1) = 0, got {}",
                self.values[n]
            )));
        }
        if tags.left && self.values[0].abs() > BC_TOL * scale {
            return Err(Error::Domain(format!(
                "weakly degenerate H^1_alpha field must satisfy u(0) = 0, got {}",
                self.values[0]
            )));
        }
        Ok(())
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn kind(&self) -> FieldKind {
        self.kind
    }

    pub fn boundary_tags(&self) -> BoundaryTags {
        boundary_tags(&self.grid, self.kind)
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| c * v).collect(),
            kind: self.kind,
        }
    }

    /// Reinterpret as plain `L^2` data.
    pub fn as_l2(&self) -> Self {
        Self {
            grid: self.grid.clone(),
            values: self.values.clone(),
            kind: FieldKind::L2,
        }
    }

    /// Slope of the interpolant on `cell`.
    #[inline]
    pub fn slope(&self, cell: usize) -> f64 {
        slope(&self.grid, &self.values, cell)
    }

    pub fn value_at(&self, x: f64) -> f64 {
        value_at(&self.grid, &self.values, x)
    }

    /// `‖u‖²_{L²(0,1)}`, exact for the interpolant.
    pub fn l2_norm_sq(&self) -> f64 {
        l2_sq_on(&self.grid, &self.values, 0.0, 1.0)
    }

    pub fn l2_norm(&self) -> f64 {
        self.l2_norm_sq().sqrt()
    }

    /// `∫ x^alpha u_x² dx`.
    pub fn weighted_grad_sq(&self) -> f64 {
        weighted_grad_sq_on(&self.grid, &self.values, 0.0, 1.0)
    }

    pub fn h1_alpha_norm(&self) -> f64 {
        (self.l2_norm_sq() + self.weighted_grad_sq()).sqrt()
    }

    /// Unweighted `‖u‖_{H¹(a,1)}`.
    pub fn h1_norm_on(&self, a: f64) -> f64 {
        (l2_sq_on(&self.grid, &self.values, a, 1.0) + grad_sq_on(&self.grid, &self.values, a, 1.0))
            .sqrt()
    }
}

fn boundary_tags(grid: &Grid, kind: FieldKind) -> BoundaryTags {
    match kind {
        FieldKind::L2 => BoundaryTags {
            left: false,
            right: false,
        },
        FieldKind::H1Alpha => BoundaryTags {
            left: grid.param().left_constrained(),
            right: true,
        },
    }
}

/// `‖u‖_{H¹_alpha}` of a field.
pub fn h1_alpha_norm(field: &SpaceField) -> f64 {
    field.h1_alpha_norm()
}

#[inline]
pub(crate) fn slope(grid: &Grid, values: &[f64], cell: usize) -> f64 {
    (values[cell + 1] - values[cell]) / grid.h(cell)
}

pub(crate) fn value_at(grid: &Grid, values: &[f64], x: f64) -> f64 {
    let cell = grid.locate(x);
    let x0 = grid.nodes()[cell];
    values[cell] + slope(grid, values, cell) * (x - x0)
}

/// `∫_lo^hi u² dx` for nodal values `values`, exact.
pub(crate) fn l2_sq_on(grid: &Grid, values: &[f64], lo: f64, hi: f64) -> f64 {
    let nodes = grid.nodes();
    let mut acc = 0.0;
    grid.for_each_piece(lo, hi, |cell, p, q| {
        let s = slope(grid, values, cell);
        let up = values[cell] + s * (p - nodes[cell]);
        let uq = values[cell] + s * (q - nodes[cell]);
        acc += linear_sq_integral(p, q, up, uq);
    });
    acc
}

/// `∫_lo^hi x^alpha u_x² dx`, exact.
pub(crate) fn weighted_grad_sq_on(grid: &Grid, values: &[f64], lo: f64, hi: f64) -> f64 {
    let alpha = grid.alpha();
    let mut acc = 0.0;
    grid.for_each_piece(lo, hi, |cell, p, q| {
        let s = slope(grid, values, cell);
        let w = if p == grid.nodes()[cell] && q == grid.nodes()[cell + 1] {
            grid.cell_weights()[cell]
        } else {
            weight_unchecked(p, q, alpha)
        };
        acc += w * s * s;
    });
    acc
}

/// `∫_lo^hi u_x² dx`, exact.
pub(crate) fn grad_sq_on(grid: &Grid, values: &[f64], lo: f64, hi: f64) -> f64 {
    let mut acc = 0.0;
    grid.for_each_piece(lo, hi, |cell, p, q| {
        let s = slope(grid, values, cell);
        acc += (q - p) * s * s;
    });
    acc
}

/// Nodal values of a function of `(t, x)` on a fixed grid and time axis.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpaceTimeField {
    grid: Arc<Grid>,
    times: Vec<f64>,
    /// Level-major storage: `values[k * n_nodes + i]`.
    values: Vec<f64>,
}

impl SpaceTimeField {
    pub fn new(grid: Arc<Grid>, times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        check_len(grid.n_nodes() * times.len(), values.len())?;
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Argument(
                "time levels must be strictly increasing".into(),
            ));
        }
        Ok(Self {
            grid,
            times,
            values,
        })
    }

    pub fn zeros(grid: Arc<Grid>, times: Vec<f64>) -> Self {
        let n = grid.n_nodes() * times.len();
        Self {
            grid,
            times,
            values: vec![0.0; n],
        }
    }

    pub fn from_fn<F: Fn(f64, f64) -> f64>(grid: Arc<Grid>, times: Vec<f64>, f: F) -> Self {
        let mut values = Vec::with_capacity(grid.n_nodes() * times.len());
        for &t in &times {
            values.extend(grid.nodes().iter().map(|&x| f(t, x)));
        }
        Self {
            grid,
            times,
            values,
        }
    }

    /// Stacks per-level nodal vectors.
    pub fn from_levels(grid: Arc<Grid>, times: Vec<f64>, levels: Vec<Vec<f64>>) -> Result<Self> {
        check_len(times.len(), levels.len())?;
        let mut values = Vec::with_capacity(grid.n_nodes() * times.len());
        for l in levels {
            check_len(grid.n_nodes(), l.len())?;
            values.extend(l);
        }
        Self::new(grid, times, values)
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn n_levels(&self) -> usize {
        self.times.len()
    }

    pub fn t_final(&self) -> f64 {
        *self.times.last().unwrap_or(&0.0)
    }

    pub fn level(&self, k: usize) -> &[f64] {
        let n = self.grid.n_nodes();
        &self.values[k * n..(k + 1) * n]
    }

    pub fn level_field(&self, k: usize, kind: FieldKind) -> Result<SpaceField> {
        SpaceField::new(self.grid.clone(), self.level(k).to_vec(), kind)
    }

    pub fn raw_values(&self) -> &[f64] {
        &self.values
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            grid: self.grid.clone(),
            times: self.times.clone(),
            values: self.values.iter().map(|v| c * v).collect(),
        }
    }

    /// Per-level `‖u(t_k)‖_{L²}`.
    pub fn l2_norms(&self) -> Vec<f64> {
        (0..self.n_levels())
            .map(|k| l2_sq_on(&self.grid, self.level(k), 0.0, 1.0).sqrt())
            .collect()
    }

    /// `‖u‖_{L¹(0,T;L²)}` by trapezoid in time of the per-level norms.
    pub fn l1_l2_norm(&self) -> f64 {
        trapezoid(&self.times, &self.l2_norms())
    }

    /// `∫_0^T ∫_lo^hi u² dx dt`, exact in `x`, trapezoid in `t`.
    pub fn space_time_sq_on(&self, lo: f64, hi: f64) -> f64 {
        let per: Vec<f64> = (0..self.n_levels())
            .map(|k| l2_sq_on(&self.grid, self.level(k), lo, hi))
            .collect();
        trapezoid(&self.times, &per)
    }

    /// `∫_0^T ∫_lo^hi x^alpha u_x² dx dt`, exact in `x`, trapezoid in `t`.
    pub fn space_time_weighted_grad_sq_on(&self, lo: f64, hi: f64) -> f64 {
        let per: Vec<f64> = (0..self.n_levels())
            .map(|k| weighted_grad_sq_on(&self.grid, self.level(k), lo, hi))
            .collect();
        trapezoid(&self.times, &per)
    }

    /// Cumulative trapezoid integral in time, `∫_0^t u(s, ·) ds`.
    pub fn time_integral(&self) -> Self {
        let n = self.grid.n_nodes();
        let mut values = vec![0.0; self.values.len()];
        for k in 1..self.n_levels() {
            let half_dt = 0.5 * (self.times[k] - self.times[k - 1]);
            for i in 0..n {
                values[k * n + i] = values[(k - 1) * n + i]
                    + half_dt * (self.values[(k - 1) * n + i] + self.values[k * n + i]);
            }
        }
        Self {
            grid: self.grid.clone(),
            times: self.times.clone(),
            values,
        }
    }

    /// Time-reversed copy on the axis `tau = T - t`.
    pub fn time_reversed(&self) -> Self {
        let n = self.grid.n_nodes();
        let t_final = self.t_final();
        let t0 = self.times[0];
        let times: Vec<f64> = self.times.iter().rev().map(|t| t0 + t_final - t).collect();
        let mut values = Vec::with_capacity(self.values.len());
        for k in (0..self.n_levels()).rev() {
            values.extend_from_slice(&self.values[k * n..(k + 1) * n]);
        }
        Self {
            grid: self.grid.clone(),
            times,
            values,
        }
    }
}

/// Scalar series on a time axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

impl TimeSeries {
    pub fn new(times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        check_len(times.len(), values.len())?;
        Ok(Self { times, values })
    }

    pub fn zeros(times: Vec<f64>) -> Self {
        let n = times.len();
        Self {
            times,
            values: vec![0.0; n],
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `∫_0^T |s(t)|² dt` by the trapezoid rule.
    pub fn l2_norm_sq(&self) -> f64 {
        let sq: Vec<f64> = self.values.iter().map(|v| v * v).collect();
        trapezoid(&self.times, &sq)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Second-order finite-difference time derivative (central inside,
    /// one-sided three-point at the ends; uniform axis assumed).
    pub fn derivative(&self) -> TimeSeries {
        let n = self.len();
        let mut d = vec![0.0; n];
        if n >= 3 {
            let dt = self.times[1] - self.times[0];
            let v = &self.values;
            d[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * dt);
            for k in 1..n - 1 {
                d[k] = (v[k + 1] - v[k - 1]) / (self.times[k + 1] - self.times[k - 1]);
            }
            d[n - 1] = (3.0 * v[n - 1] - 4.0 * v[n - 2] + v[n - 3]) / (2.0 * dt);
        } else if n == 2 {
            let s = (self.values[1] - self.values[0]) / (self.times[1] - self.times[0]);
            d = vec![s, s];
        }
        TimeSeries {
            times: self.times.clone(),
            values: d,
        }
    }
}

/// Outcome of the explicit-constant embedding checks on `[a, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HolderReport {
    pub a: f64,
    pub sup_norm: f64,
    pub seminorm: f64,
    pub h1_interval_norm: f64,
    pub h1_alpha_norm: f64,
    /// `sqrt(max{1, a^{-alpha}})`.
    pub constant_a1: f64,
    /// `max{(1-a)^{-1/2}, (1-a)^{1/2} a^{-alpha/2}}`.
    pub constant_a2: f64,
    /// `constant_a1 ‖u‖_{H¹_α} − ‖u‖_{H¹(a,1)}`.
    pub slack_a1: f64,
    /// `constant_a2 ‖u‖_{H¹_α} − max(sup, seminorm)`.
    pub slack_a2: f64,
}

impl HolderReport {
    /// Both slacks are at least `-rel_tol` times their bound.
    pub fn holds(&self, rel_tol: f64) -> bool {
        self.relative_slack_a1() >= -rel_tol && self.relative_slack_a2() >= -rel_tol
    }

    pub fn relative_slack_a1(&self) -> f64 {
        relative(self.slack_a1, self.constant_a1 * self.h1_alpha_norm)
    }

    pub fn relative_slack_a2(&self) -> f64 {
        relative(self.slack_a2, self.constant_a2 * self.h1_alpha_norm)
    }
}

fn relative(slack: f64, bound: f64) -> f64 {
    if bound > 0.0 {
        slack / bound
    } else {
        slack
    }
}

pub fn embedding_constant_a1(alpha: f64, a: f64) -> f64 {
    (1.0_f64).max(a.powf(-alpha)).sqrt()
}

pub fn embedding_constant_a2(alpha: f64, a: f64) -> f64 {
    (1.0 - a)
        .powf(-0.5)
        .max((1.0 - a).sqrt() / a.powf(0.5 * alpha))
}

/// Checks `‖u‖_{H¹(a,1)} ≤ C‖u‖_{H¹_α}` and `‖u‖_{C^{0,1/2}([a,1])} ≤ C‖u‖_{H¹_α}`
/// with the explicit constants. The Hölder norm is `max(sup, seminorm)` and the
/// seminorm is taken over grid points in `[a,1]` together with `a` itself.
pub fn holder_embedding_check(field: &SpaceField, a: f64) -> Result<HolderReport> {
    if !(a > 0.0 && a < 1.0) {
        return Err(Error::Domain(format!("a must lie in (0,1), got {a}")));
    }
    let alpha = field.grid().alpha();
    let mut pts: Vec<(f64, f64)> = vec![(a, field.value_at(a))];
    pts.extend(
        field
            .grid()
            .nodes()
            .iter()
            .zip(field.values())
            .filter(|(&x, _)| x > a)
            .map(|(&x, &u)| (x, u)),
    );
    let sup_norm = pts.iter().fold(0.0_f64, |m, p| m.max(p.1.abs()));
    let mut seminorm = 0.0_f64;
    for (i, &(x, u)) in pts.iter().enumerate() {
        for &(y, v) in &pts[i + 1..] {
            seminorm = seminorm.max((u - v).abs() / (y - x).sqrt());
        }
    }
    let h1_interval_norm = field.h1_norm_on(a);
    let h1a = field.h1_alpha_norm();
    let constant_a1 = embedding_constant_a1(alpha, a);
    let constant_a2 = embedding_constant_a2(alpha, a);
    Ok(HolderReport {
        a,
        sup_norm,
        seminorm,
        h1_interval_norm,
        h1_alpha_norm: h1a,
        constant_a1,
        constant_a2,
        slack_a1: constant_a1 * h1a - h1_interval_norm,
        slack_a2: constant_a2 * h1a - sup_norm.max(seminorm),
    })
}

/// A random P1 field satisfying the boundary constraints of its kind: a few
/// decaying sine (and, for SDC, quarter-cosine) modes plus nodal noise.
pub fn random_field<R: rand::Rng>(grid: &Arc<Grid>, kind: FieldKind, rng: &mut R) -> SpaceField {
    use std::f64::consts::PI;
    let sdc = grid.param().regime() == Regime::Sdc;
    let modes: Vec<(f64, f64)> = (1..=8)
        .map(|k| {
            (
                rng.gen_range(-1.0..1.0) / k as f64,
                rng.gen_range(-1.0..1.0) / k as f64,
            )
        })
        .collect();
    let noise = rng.gen_range(0.0..0.2);
    let mut values: Vec<f64> = grid
        .nodes()
        .iter()
        .map(|&x| {
            let smooth: f64 = modes
                .iter()
                .enumerate()
                .map(|(i, (s, c))| {
                    let k = (i + 1) as f64;
                    s * (k * PI * x).sin()
                        + if sdc {
                            c * ((k - 0.5) * PI * x).cos()
                        } else {
                            0.0
                        }
                })
                .sum();
            smooth + noise * rng.gen_range(-1.0..1.0)
        })
        .collect();
    let tags = boundary_tags(grid, kind);
    let n = values.len() - 1;
    if tags.left {
        values[0] = 0.0;
    }
    if tags.right {
        values[n] = 0.0;
    }
    SpaceField {
        grid: grid.clone(),
        values,
        kind,
    }
}

/// Worst relative slacks of [`holder_embedding_check`] over random fields.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmbeddingSweep {
    pub alpha: f64,
    pub a: f64,
    pub samples: usize,
    pub n_cells: usize,
    pub min_relative_slack_a1: f64,
    pub min_relative_slack_a2: f64,
}

impl EmbeddingSweep {
    pub fn holds(&self, rel_tol: f64) -> bool {
        self.min_relative_slack_a1 >= -rel_tol && self.min_relative_slack_a2 >= -rel_tol
    }
}

/// Runs [`holder_embedding_check`] on `samples` fields from [`random_field`].
pub fn embedding_sweep(
    alpha: f64,
    a: f64,
    samples: usize,
    n_cells: usize,
    seed: u64,
) -> Result<EmbeddingSweep> {
    use rand::SeedableRng;
    let grid = Arc::new(Grid::uniform(n_cells, DegeneracyParam::new(alpha)?)?);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut out = EmbeddingSweep {
        alpha,
        a,
        samples,
        n_cells,
        min_relative_slack_a1: f64::INFINITY,
        min_relative_slack_a2: f64::INFINITY,
    };
    for _ in 0..samples {
        let r = holder_embedding_check(&random_field(&grid, FieldKind::H1Alpha, &mut rng), a)?;
        out.min_relative_slack_a1 = out.min_relative_slack_a1.min(r.relative_slack_a1());
        out.min_relative_slack_a2 = out.min_relative_slack_a2.min(r.relative_slack_a2());
    }
    Ok(out)
}

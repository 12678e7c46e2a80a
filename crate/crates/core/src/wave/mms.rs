//! Manufactured solutions and refinement studies.

use super::{solve_weak, steps_for, MassKind, Scheme, Source, WaveData, WaveProblem};
use crate::error::{Error, Result};
use crate::quadrature::{mesh_points, GaussRule};
use crate::spaces::{
    value_at, DegeneracyParam, FieldKind, Grid, Regime, SpaceField, SpaceTimeField,
};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// Closed-form solutions `u(t, x) = cos(t) p(x)` with `f = u_tt - (x^alpha u_x)_x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MmsEntry {
    Zero,
    /// `p = x - x²`; needs `alpha > 1/2` for `f ∈ L²`.
    Quadratic,
    /// `p = x²(1 - x)`; any `alpha`.
    Cubic,
    /// `p = 1 - x`; strongly degenerate case only.
    Linear,
}

impl MmsEntry {
    pub const ALL: [MmsEntry; 4] = [
        MmsEntry::Zero,
        MmsEntry::Quadratic,
        MmsEntry::Cubic,
        MmsEntry::Linear,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MmsEntry::Zero => "zero",
            MmsEntry::Quadratic => "quadratic",
            MmsEntry::Cubic => "cubic",
            MmsEntry::Linear => "linear",
        }
    }

    pub fn check(self, param: DegeneracyParam) -> Result<()> {
        match self {
            MmsEntry::Quadratic if param.alpha() <= 0.5 => Err(Error::Config(format!(
                "the quadratic entry has a non-L² source for alpha = {} <= 1/2",
                param.alpha()
            ))),
            MmsEntry::Linear if param.regime() == Regime::Wdc => Err(Error::Config(format!(
                "the linear entry violates u(0) = 0 required for alpha = {} (WDC)",
                param.alpha()
            ))),
            _ => Ok(()),
        }
    }

    fn profile(self, x: f64) -> (f64, f64) {
        match self {
            MmsEntry::Zero => (0.0, 0.0),
            MmsEntry::Quadratic => (x - x * x, 1.0 - 2.0 * x),
            MmsEntry::Cubic => (x * x * (1.0 - x), 2.0 * x - 3.0 * x * x),
            MmsEntry::Linear => (1.0 - x, -1.0),
        }
    }

    /// `-(x^alpha p')'`.
    fn elliptic_part(self, alpha: f64, x: f64) -> f64 {
        match self {
            MmsEntry::Zero => 0.0,
            MmsEntry::Quadratic => {
                -(alpha * x.powf(alpha - 1.0) - 2.0 * (alpha + 1.0) * x.powf(alpha))
            }
            MmsEntry::Cubic => {
                -(2.0 * (alpha + 1.0) * x.powf(alpha) - 3.0 * (alpha + 2.0) * x.powf(alpha + 1.0))
            }
            MmsEntry::Linear => alpha * x.powf(alpha - 1.0),
        }
    }

    pub fn u(self, t: f64, x: f64) -> f64 {
        t.cos() * self.profile(x).0
    }

    pub fn u_t(self, t: f64, x: f64) -> f64 {
        -t.sin() * self.profile(x).0
    }

    pub fn u_x(self, t: f64, x: f64) -> f64 {
        t.cos() * self.profile(x).1
    }

    pub fn source(self, alpha: f64, t: f64, x: f64) -> f64 {
        if self == MmsEntry::Zero {
            return 0.0;
        }
        t.cos() * (self.elliptic_part(alpha, x) - self.profile(x).0)
    }

    /// `u_x(t, 1)`.
    pub fn trace(self, t: f64) -> f64 {
        self.u_x(t, 1.0)
    }
}

impl std::fmt::Display for MmsEntry {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for MmsEntry {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        MmsEntry::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown manufactured entry `{s}`")))
    }
}

/// Data and exact solution of a catalog entry on a given problem.
#[derive(Debug, Clone)]
pub struct Manufactured {
    pub entry: MmsEntry,
    pub data: WaveData,
    /// Nodal samples of the exact solution on the problem's axis.
    pub exact: SpaceTimeField,
}

impl Manufactured {
    pub fn exact_value(&self, t: f64, x: f64) -> f64 {
        self.entry.u(t, x)
    }
}

pub fn manufactured_problem(entry: MmsEntry, problem: &WaveProblem) -> Result<Manufactured> {
    let grid = problem.grid().clone();
    let param = grid.param();
    entry.check(param)?;
    let alpha = param.alpha();
    let f = match entry {
        MmsEntry::Zero => Source::Zero,
        _ => Source::analytic(move |t, x| entry.source(alpha, t, x)),
    };
    let u0 = SpaceField::from_fn(grid.clone(), FieldKind::H1Alpha, |x| entry.u(0.0, x))?;
    let u1 = SpaceField::from_fn(grid.clone(), FieldKind::L2, |x| entry.u_t(0.0, x))?;
    let exact = SpaceTimeField::from_fn(grid, problem.times(), |t, x| entry.u(t, x));
    Ok(Manufactured {
        entry,
        data: WaveData::new(f, u0, u1)?,
        exact,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceRow {
    pub n_cells: usize,
    pub nt: usize,
    pub h: f64,
    pub dt: f64,
    /// `max_k ‖u_h(t_k) - u(t_k)‖_{L²}`.
    pub l2_error: f64,
    /// `max_k |u_{h,x}(t_k, 1) - u_x(t_k, 1)|`.
    pub trace_error: f64,
    pub l2_order: Option<f64>,
    pub trace_order: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceTable {
    pub entry: MmsEntry,
    pub alpha: f64,
    pub regime: Regime,
    pub t_final: f64,
    pub scheme: Scheme,
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceTable {
    /// Smallest observed `L²` order across successive levels.
    pub fn min_l2_order(&self) -> Option<f64> {
        self.rows.iter().filter_map(|r| r.l2_order).reduce(f64::min)
    }

    pub fn trace_monotone(&self) -> bool {
        self.rows
            .windows(2)
            .all(|w| w[1].trace_error <= w[0].trace_error)
    }
}

/// Refinement study over uniform meshes with `dt = courant * h`.
pub fn convergence_study(
    entry: MmsEntry,
    alpha: f64,
    t_final: f64,
    levels: &[usize],
    courant: f64,
    scheme: Scheme,
    mass: MassKind,
) -> Result<ConvergenceTable> {
    if levels.len() < 3 {
        return Err(Error::Argument(
            "a convergence study needs at least three levels".into(),
        ));
    }
    let param = DegeneracyParam::new(alpha)?;
    entry.check(param)?;
    let mut rows: Vec<ConvergenceRow> = Vec::with_capacity(levels.len());
    for &n in levels {
        let grid = Arc::new(Grid::uniform(n, param)?);
        let nt = steps_for(t_final, grid.h_min(), courant);
        let problem = WaveProblem::new(grid.clone(), t_final, nt)?
            .with_scheme(scheme)
            .with_mass(mass);
        let m = manufactured_problem(entry, &problem)?;
        let sol = solve_weak(&problem, &m.data)?;
        let points = mesh_points(grid.nodes(), GaussRule::Five, 4);
        let mut l2_error = 0.0_f64;
        let mut trace_error = 0.0_f64;
        for (k, &t) in sol.times().iter().enumerate() {
            let u = sol.u.level(k);
            let e2: f64 = points
                .iter()
                .map(|&(_, x, w)| {
                    let d = value_at(&grid, u, x) - entry.u(t, x);
                    w * d * d
                })
                .sum();
            l2_error = l2_error.max(e2.sqrt());
            trace_error = trace_error.max((sol.trace.values[k] - entry.trace(t)).abs());
        }
        let order = |prev: f64, cur: f64, hp: f64, hc: f64| {
            (prev > 0.0 && cur > 0.0).then(|| (prev / cur).ln() / (hp / hc).ln())
        };
        let h = grid.h_max();
        let (l2_order, trace_order) = match rows.last() {
            Some(p) => (
                order(p.l2_error, l2_error, p.h, h),
                order(p.trace_error, trace_error, p.h, h),
            ),
            None => (None, None),
        };
        rows.push(ConvergenceRow {
            n_cells: n,
            nt,
            h,
            dt: problem.dt(),
            l2_error,
            trace_error,
            l2_order,
            trace_order,
        });
    }
    Ok(ConvergenceTable {
        entry,
        alpha,
        regime: param.regime(),
        t_final,
        scheme,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn quadratic_source_at_alpha_one() {
        // f = (x² + 3x - 1) cos t
        for &(t, x) in &[(0.0, 0.3), (1.2, 0.8), (2.5, 0.01)] {
            let f = MmsEntry::Quadratic.source(1.0, t, x);
            assert_relative_eq!(f, (x * x + 3.0 * x - 1.0) * f64::cos(t), epsilon = 1e-14);
        }
    }

    #[test]
    fn linear_source_at_alpha_three_halves() {
        // f = cos t (1.5 √x - (1 - x))
        let (t, x) = (0.7, 0.36);
        let f = MmsEntry::Linear.source(1.5, t, x);
        assert_relative_eq!(f, t.cos() * (1.5 * x.sqrt() - (1.0 - x)), epsilon = 1e-14);
    }

    #[test]
    fn sources_satisfy_the_equation() {
        // central differences of the closed forms
        let e = 1e-4;
        for entry in [MmsEntry::Quadratic, MmsEntry::Cubic, MmsEntry::Linear] {
            for &alpha in &[1.0, 1.3, 1.8] {
                let (t, x) = (0.9, 0.55);
                let flux = |x: f64| x.powf(alpha) * entry.u_x(t, x);
                let utt = (entry.u(t + e, x) - 2.0 * entry.u(t, x) + entry.u(t - e, x)) / (e * e);
                let div = (flux(x + e) - flux(x - e)) / (2.0 * e);
                assert!(
                    (utt - div - entry.source(alpha, t, x)).abs() < 1e-6,
                    "{entry} {alpha}"
                );
            }
        }
    }

    #[test]
    fn catalog_respects_the_regime() {
        let wdc = DegeneracyParam::new(0.5).unwrap();
        let sdc = DegeneracyParam::new(1.5).unwrap();
        assert!(MmsEntry::Linear.check(wdc).is_err());
        assert!(MmsEntry::Linear.check(sdc).is_ok());
        assert!(MmsEntry::Quadratic.check(wdc).is_err());
        assert!(MmsEntry::Quadratic
            .check(DegeneracyParam::new(0.75).unwrap())
            .is_ok());
        assert!(MmsEntry::Cubic
            .check(DegeneracyParam::new(0.2).unwrap())
            .is_ok());
        assert_eq!("cubic".parse::<MmsEntry>().unwrap(), MmsEntry::Cubic);
    }

    #[test]
    fn initial_data_is_the_exact_solution() {
        let g = Arc::new(Grid::uniform(16, DegeneracyParam::new(1.5).unwrap()).unwrap());
        let p = WaveProblem::new(g, 1.0, 8).unwrap();
        let m = manufactured_problem(MmsEntry::Linear, &p).unwrap();
        assert_eq!(m.data.u0.values(), m.exact.level(0));
        assert!(m.data.u1.values().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn zero_entry_has_zero_error() {
        let t = convergence_study(
            MmsEntry::Zero,
            0.5,
            1.0,
            &[8, 16, 32],
            1.0,
            Scheme::NewmarkAvgAccel,
            MassKind::Consistent,
        )
        .unwrap();
        assert!(t
            .rows
            .iter()
            .all(|r| r.l2_error == 0.0 && r.trace_error == 0.0));
    }

    #[test]
    fn second_order_convergence() {
        for (entry, alpha) in [
            (MmsEntry::Quadratic, 1.0),
            (MmsEntry::Linear, 1.5),
            (MmsEntry::Cubic, 0.5),
        ] {
            let t = convergence_study(
                entry,
                alpha,
                1.0,
                &[16, 32, 64],
                1.0,
                Scheme::NewmarkAvgAccel,
                MassKind::Consistent,
            )
            .unwrap();
            let order = t.min_l2_order().unwrap();
            assert!(order >= 1.8, "{entry} alpha={alpha}: order {order}");
            assert!(t.trace_monotone(), "{entry} alpha={alpha}");
        }
    }

    #[test]
    fn too_few_levels() {
        assert!(convergence_study(
            MmsEntry::Cubic,
            1.0,
            1.0,
            &[8, 16],
            1.0,
            Scheme::NewmarkAvgAccel,
            MassKind::Consistent
        )
        .is_err());
    }
}

//! Quadrature rules used across the crate.

/// Three-point Gauss-Legendre nodes and weights on `[-1, 1]`.
const GAUSS3: [(f64, f64); 3] = [
    (-0.774_596_669_241_483_4, 5.0 / 9.0),
    (0.0, 8.0 / 9.0),
    (0.774_596_669_241_483_4, 5.0 / 9.0),
];

/// Five-point Gauss-Legendre nodes and weights on `[-1, 1]`.
const GAUSS5: [(f64, f64); 5] = [
    (-0.906_179_845_938_664, 0.236_926_885_056_189_08),
    (-0.538_469_310_105_683_1, 0.478_628_670_499_366_47),
    (0.0, 0.568_888_888_888_888_9),
    (0.538_469_310_105_683_1, 0.478_628_670_499_366_47),
    (0.906_179_845_938_664, 0.236_926_885_056_189_08),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GaussRule {
    Three,
    Five,
}

impl GaussRule {
    fn table(self) -> &'static [(f64, f64)] {
        match self {
            GaussRule::Three => &GAUSS3,
            GaussRule::Five => &GAUSS5,
        }
    }

    /// Physical `(point, weight)` pairs on `[a, b]`.
    pub fn points(self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> {
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        self.table()
            .iter()
            .map(move |&(s, w)| (mid + half * s, half * w))
    }

    pub fn integrate<F: FnMut(f64) -> f64>(self, a: f64, b: f64, mut f: F) -> f64 {
        self.points(a, b).map(|(x, w)| w * f(x)).sum()
    }
}

/// Quadrature points `(cell, x, weight)` over a mesh given by its nodes.
///
/// The first cell is split into `first_cell_levels` dyadic shells toward the
/// left node, so integrands with an integrable power singularity at `x = 0`
/// (such as `x^{alpha - 1}`) are still integrated to near machine precision.
pub fn mesh_points(
    nodes: &[f64],
    rule: GaussRule,
    first_cell_levels: usize,
) -> Vec<(usize, f64, f64)> {
    let mut out = Vec::with_capacity(nodes.len() * 5 + first_cell_levels * 5);
    for (cell, w) in nodes.windows(2).enumerate() {
        let (a, b) = (w[0], w[1]);
        if cell == 0 && first_cell_levels > 0 {
            let mut hi = b;
            for _ in 0..first_cell_levels {
                let lo = a + 0.5 * (hi - a);
                out.extend(rule.points(lo, hi).map(|(x, q)| (cell, x, q)));
                hi = lo;
            }
            out.extend(rule.points(a, hi).map(|(x, q)| (cell, x, q)));
        } else {
            out.extend(rule.points(a, b).map(|(x, q)| (cell, x, q)));
        }
    }
    out
}

/// Trapezoid rule on a (possibly nonuniform) abscissa.
pub fn trapezoid(times: &[f64], values: &[f64]) -> f64 {
    debug_assert_eq!(times.len(), values.len());
    times
        .windows(2)
        .zip(values.windows(2))
        .map(|(t, v)| 0.5 * (t[1] - t[0]) * (v[0] + v[1]))
        .sum()
}

/// Running trapezoid integral, starting from zero at `times[0]`.
pub fn cumulative_trapezoid(times: &[f64], values: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(values.len());
    let mut acc = 0.0;
    if !values.is_empty() {
        out.push(0.0);
    }
    for (t, v) in times.windows(2).zip(values.windows(2)) {
        acc += 0.5 * (t[1] - t[0]) * (v[0] + v[1]);
        out.push(acc);
    }
    out
}

/// Integral of `u^2` over `[a, b]` for `u` linear with end values `ua`, `ub`.
#[inline]
pub fn linear_sq_integral(a: f64, b: f64, ua: f64, ub: f64) -> f64 {
    (b - a) * (ua * ua + ua * ub + ub * ub) / 3.0
}

/// Integral of `u v` over `[a, b]` for linear `u`, `v`.
#[inline]
pub fn linear_product_integral(a: f64, b: f64, ua: f64, ub: f64, va: f64, vb: f64) -> f64 {
    (b - a) * (2.0 * ua * va + ua * vb + ub * va + 2.0 * ub * vb) / 6.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_is_exact_for_polynomials() {
        // three points: degree 5, five points: degree 9
        let p5 = |x: f64| 1.0 + x - 2.0 * x.powi(3) + x.powi(5);
        let exact5 = |x: f64| x + x * x / 2.0 - x.powi(4) / 2.0 + x.powi(6) / 6.0;
        let v = GaussRule::Three.integrate(0.2, 1.3, p5);
        assert!((v - (exact5(1.3) - exact5(0.2))).abs() < 1e-14);
        let v = GaussRule::Five.integrate(-0.5, 0.7, |x| x.powi(9));
        assert!((v - (0.7f64.powi(10) - 0.5f64.powi(10)) / 10.0).abs() < 1e-15);
    }

    #[test]
    fn trapezoid_rules() {
        let t = [0.0, 0.5, 2.0];
        let v = [1.0, 2.0, 0.0];
        assert!((trapezoid(&t, &v) - (0.75 + 1.5)).abs() < 1e-15);
        assert_eq!(cumulative_trapezoid(&t, &v), vec![0.0, 0.75, 2.25]);
        assert_eq!(trapezoid(&[], &[]), 0.0);
    }

    #[test]
    fn mesh_points_cover_the_mesh() {
        let nodes = [0.0, 0.25, 0.5, 1.0];
        let pts = mesh_points(&nodes, GaussRule::Three, 10);
        let total: f64 = pts.iter().map(|p| p.2).sum();
        assert!((total - 1.0).abs() < 1e-14);
        let sq: f64 = pts.iter().map(|&(_, x, w)| w * x.sqrt()).sum();
        assert!((sq - 2.0 / 3.0).abs() < 1e-6);
        assert!(pts
            .iter()
            .all(|&(c, x, _)| x >= nodes[c] && x <= nodes[c + 1]));
    }

    #[test]
    fn linear_integrals() {
        // u = x on [0,1]
        assert!((linear_sq_integral(0.0, 1.0, 0.0, 1.0) - 1.0 / 3.0).abs() < 1e-15);
        // u = 1 - x, v = x
        assert!((linear_product_integral(0.0, 1.0, 1.0, 0.0, 0.0, 1.0) - 1.0 / 6.0).abs() < 1e-15);
    }
}

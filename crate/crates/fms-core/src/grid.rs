//! Box domains, uniform grids, grid functions, and the singular
//! double-integral fabric shared by every modular and operator.
//!
//! Domains are axis-aligned boxes in dimension 1 or 2 with a uniform node
//! grid. A domain may carry a truncation box `Λ ⊇ Ω`, realized as a number
//! of extra grid cells glued on each side with the same spacing; functions
//! declared zero outside `Ω` (the Dirichlet-complement convention) extend to
//! `Λ` by zero padding. Pair sums over `Λ` approximate integrals over
//! `ℝ^N` up to a reported truncation tail.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};

/// A spatial point; in dimension 1 the second coordinate is fixed at zero.
pub type Point = [f64; 2];

pub fn dist(a: Point, b: Point) -> f64 {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    (dx * dx + dy * dy).sqrt()
}

/// Compensated (Neumaier) accumulator. Pair sums must be deterministic and
/// insensitive to summation order at the 1e-12 level, which plain
/// left-to-right addition does not give at these pair counts.
#[derive(Clone, Copy, Default)]
pub struct Accumulator {
    sum: f64,
    comp: f64,
}

impl Accumulator {
    pub fn new() -> Self {
        Accumulator::default()
    }

    #[inline]
    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.comp += (self.sum - t) + value;
        } else {
            self.comp += (value - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

pub fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut acc = Accumulator::new();
    for v in values {
        acc.add(v);
    }
    acc.value()
}

/// Axis-aligned box with a uniform node grid and an optional truncation
/// collar (extra cells per side realizing `Λ`).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoxDomain {
    dim: usize,
    lower: [f64; 2],
    upper: [f64; 2],
    nodes: [usize; 2],
    collar: [usize; 2],
}

impl BoxDomain {
    pub fn new_1d(lower: f64, upper: f64, nodes: usize) -> Result<Self> {
        Self::build(1, [lower, 0.0], [upper, 0.0], [nodes, 1], [0, 0])
    }

    pub fn new_2d(lower: [f64; 2], upper: [f64; 2], nodes: [usize; 2]) -> Result<Self> {
        Self::build(2, lower, upper, nodes, [0, 0])
    }

    fn build(
        dim: usize,
        lower: [f64; 2],
        upper: [f64; 2],
        nodes: [usize; 2],
        collar: [usize; 2],
    ) -> Result<Self> {
        if dim != 1 && dim != 2 {
            return Err(Error::Input(format!("dimension must be 1 or 2, got {dim}")));
        }
        for ax in 0..dim {
            if !(upper[ax] > lower[ax]) {
                return Err(Error::Input(format!(
                    "axis {ax}: upper ({}) must exceed lower ({})",
                    upper[ax], lower[ax]
                )));
            }
            if nodes[ax] < 2 {
                return Err(Error::Input(format!(
                    "axis {ax}: need at least 2 nodes, got {}",
                    nodes[ax]
                )));
            }
        }
        Ok(BoxDomain {
            dim,
            lower,
            upper,
            nodes,
            collar,
        })
    }

    /// Attach a truncation box by dilating each side of `Ω` by `factor`
    /// (factor 3 triples the side length, centered). The collar is snapped
    /// to whole cells so the `Ω` grid embeds exactly into the `Λ` grid.
    pub fn with_truncation_factor(mut self, factor: f64) -> Result<Self> {
        if !(factor > 1.0) {
            return Err(Error::Input(format!(
                "truncation factor must exceed 1, got {factor}"
            )));
        }
        for ax in 0..self.dim {
            let cells = self.nodes[ax] - 1;
            let extra = ((factor - 1.0) / 2.0 * cells as f64).ceil() as usize;
            self.collar[ax] = extra.max(1);
        }
        Ok(self)
    }

    pub fn with_collar_cells(mut self, collar: [usize; 2]) -> Result<Self> {
        for ax in 0..self.dim {
            if collar[ax] == 0 {
                return Err(Error::Input(
                    "truncation box must strictly contain the domain (collar >= 1 cell)".into(),
                ));
            }
        }
        self.collar = collar;
        if self.dim == 1 {
            self.collar[1] = 0;
        }
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn lower(&self) -> [f64; 2] {
        self.lower
    }

    pub fn upper(&self) -> [f64; 2] {
        self.upper
    }

    pub fn nodes_per_axis(&self) -> [usize; 2] {
        self.nodes
    }

    pub fn collar_cells(&self) -> [usize; 2] {
        self.collar
    }

    pub fn has_truncation(&self) -> bool {
        self.collar[..self.dim].iter().all(|&c| c > 0)
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        (self.upper[axis] - self.lower[axis]) / (self.nodes[axis] - 1) as f64
    }

    pub fn min_spacing(&self) -> f64 {
        (0..self.dim)
            .map(|ax| self.spacing(ax))
            .fold(f64::INFINITY, f64::min)
    }

    /// sup_{x,y in closure(Ω)} |x - y|.
    pub fn diameter(&self) -> f64 {
        let mut d2 = 0.0;
        for ax in 0..self.dim {
            let side = self.upper[ax] - self.lower[ax];
            d2 += side * side;
        }
        d2.sqrt()
    }

    pub fn volume(&self) -> f64 {
        (0..self.dim)
            .map(|ax| self.upper[ax] - self.lower[ax])
            .product()
    }

    pub fn node_count(&self) -> usize {
        (0..self.dim).map(|ax| self.nodes[ax]).product()
    }

    pub fn node_coord(&self, idx: usize) -> Point {
        match self.dim {
            1 => [self.lower[0] + idx as f64 * self.spacing(0), 0.0],
            _ => {
                let n1 = self.nodes[1];
                let i0 = idx / n1;
                let i1 = idx % n1;
                [
                    self.lower[0] + i0 as f64 * self.spacing(0),
                    self.lower[1] + i1 as f64 * self.spacing(1),
                ]
            }
        }
    }

    /// Trapezoid weight of node `idx` (tensor product across axes).
    pub fn node_weight(&self, idx: usize) -> f64 {
        let along = |ax: usize, i: usize| -> f64 {
            let h = self.spacing(ax);
            if i == 0 || i + 1 == self.nodes[ax] {
                0.5 * h
            } else {
                h
            }
        };
        match self.dim {
            1 => along(0, idx),
            _ => {
                let n1 = self.nodes[1];
                along(0, idx / n1) * along(1, idx % n1)
            }
        }
    }

    pub fn contains(&self, p: Point, slack: f64) -> bool {
        (0..self.dim).all(|ax| p[ax] >= self.lower[ax] - slack && p[ax] <= self.upper[ax] + slack)
    }

    /// The truncation box as a standalone domain with the same spacing.
    pub fn lambda_domain(&self) -> Result<BoxDomain> {
        if !self.has_truncation() {
            return Err(Error::Config(
                "domain has no truncation box; call with_truncation_factor first".into(),
            ));
        }
        let mut lower = self.lower;
        let mut upper = self.upper;
        let mut nodes = self.nodes;
        for ax in 0..self.dim {
            let h = self.spacing(ax);
            lower[ax] -= self.collar[ax] as f64 * h;
            upper[ax] += self.collar[ax] as f64 * h;
            nodes[ax] += 2 * self.collar[ax];
        }
        BoxDomain::build(self.dim, lower, upper, nodes, [0, 0])
    }

    pub fn omega_nodes(&self) -> NodeSet {
        NodeSet::from_domain(self)
    }

    pub fn lambda_nodes(&self) -> Result<NodeSet> {
        Ok(NodeSet::from_domain(&self.lambda_domain()?))
    }

    /// Index of the `Ω` node `idx` within the `Λ` grid.
    pub fn omega_to_lambda_index(&self, idx: usize) -> usize {
        match self.dim {
            1 => idx + self.collar[0],
            _ => {
                let n1 = self.nodes[1];
                let i0 = idx / n1 + self.collar[0];
                let i1 = idx % n1 + self.collar[1];
                i0 * (self.nodes[1] + 2 * self.collar[1]) + i1
            }
        }
    }
}

/// Flat list of quadrature nodes with weights; input to the pair engine.
#[derive(Debug, Clone)]
pub struct NodeSet {
    pub coords: Vec<Point>,
    pub weights: Vec<f64>,
    pub h_min: f64,
}

impl NodeSet {
    fn from_domain(domain: &BoxDomain) -> NodeSet {
        let n = domain.node_count();
        let mut coords = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        for i in 0..n {
            coords.push(domain.node_coord(i));
            weights.push(domain.node_weight(i));
        }
        NodeSet {
            coords,
            weights,
            h_min: domain.min_spacing(),
        }
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }
}

/// Real values on the nodes of a box domain.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    pub domain: BoxDomain,
    pub values: Vec<f64>,
    /// Dirichlet-complement convention: the function is declared zero on
    /// `ℝ^N \ Ω`, so it extends to the truncation box by zero padding.
    pub zero_outside: bool,
}

impl GridFunction {
    pub fn from_values(domain: &BoxDomain, values: Vec<f64>) -> Result<GridFunction> {
        if values.len() != domain.node_count() {
            return Err(Error::Input(format!(
                "value array length {} does not match grid node count {}",
                values.len(),
                domain.node_count()
            )));
        }
        if let Some(bad) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Input(format!(
                "non-finite sample at node {bad}: {}",
                values[bad]
            )));
        }
        Ok(GridFunction {
            domain: domain.clone(),
            values,
            zero_outside: false,
        })
    }

    pub fn from_fn(domain: &BoxDomain, f: impl Fn(Point) -> f64) -> Result<GridFunction> {
        let values: Vec<f64> = (0..domain.node_count())
            .map(|i| f(domain.node_coord(i)))
            .collect();
        GridFunction::from_values(domain, values)
    }

    pub fn zeros(domain: &BoxDomain) -> GridFunction {
        GridFunction {
            domain: domain.clone(),
            values: vec![0.0; domain.node_count()],
            zero_outside: false,
        }
    }

    pub fn with_zero_outside(mut self) -> GridFunction {
        self.zero_outside = true;
        self
    }

    pub fn scale(&self, alpha: f64) -> GridFunction {
        GridFunction {
            domain: self.domain.clone(),
            values: self.values.iter().map(|v| alpha * v).collect(),
            zero_outside: self.zero_outside,
        }
    }

    pub fn add(&self, other: &GridFunction) -> Result<GridFunction> {
        if self.domain != other.domain {
            return Err(Error::Input("grid mismatch in addition".into()));
        }
        Ok(GridFunction {
            domain: self.domain.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + b)
                .collect(),
            zero_outside: self.zero_outside && other.zero_outside,
        })
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Values on the `Λ` grid, zero outside `Ω`. Requires the
    /// Dirichlet-complement flag.
    pub fn lambda_values(&self) -> Result<Vec<f64>> {
        if !self.zero_outside {
            return Err(Error::Precondition(
                "function is not declared zero outside the domain".into(),
            ));
        }
        let lambda = self.domain.lambda_domain()?;
        let mut out = vec![0.0; lambda.node_count()];
        for (i, &v) in self.values.iter().enumerate() {
            out[self.domain.omega_to_lambda_index(i)] = v;
        }
        Ok(out)
    }
}

/// Nodal sampling of a callable or a value array.
pub fn make_grid_function(
    domain: &BoxDomain,
    f: impl Fn(Point) -> f64,
) -> Result<GridFunction> {
    GridFunction::from_fn(domain, f)
}

/// Composite trapezoid integral over the function's own domain.
pub fn integrate(g: &GridFunction) -> f64 {
    let mut acc = Accumulator::new();
    for (i, &v) in g.values.iter().enumerate() {
        acc.add(g.domain.node_weight(i) * v);
    }
    acc.value()
}

/// How node pairs near the diagonal of a singular double integral are
/// handled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DiagonalPolicy {
    /// Drop pairs with |x - y| < h (principal-value style). On a uniform
    /// grid this excludes exactly the diagonal nodes.
    ExcludeCell,
    /// Sum each unordered pair as F(x,y) + F(y,x) before accumulating, so
    /// antisymmetric parts cancel exactly; the diagonal itself is dropped.
    SymmetricDifference,
}

/// Parameters of the singular pair-sum engine.
#[derive(Debug, Clone, Serialize)]
pub struct QuadSpec {
    pub diagonal: DiagonalPolicy,
    /// Relative determinism contract for reductions.
    pub pair_tol: f64,
    /// Hard cap on the number of ordered node pairs; exceeding it is an
    /// error rather than a silent truncation.
    pub max_pairs: u64,
}

impl Default for QuadSpec {
    fn default() -> Self {
        QuadSpec {
            diagonal: DiagonalPolicy::ExcludeCell,
            pair_tol: 1e-12,
            max_pairs: 400_000_000,
        }
    }
}

impl QuadSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.pair_tol > 0.0) {
            return Err(Error::Config("pair tolerance must be positive".into()));
        }
        Ok(())
    }
}

/// Tensor-trapezoid sum of `integrand(x, y)` over node pairs `x != y`,
/// with the diagonal handled per policy. The integrand is evaluated by
/// node index so callers can capture value arrays.
///
/// Row partial sums are computed independently (optionally in parallel)
/// and combined in fixed index order with compensated accumulation, so the
/// result does not depend on thread count.
pub fn double_sum_singular<F>(nodes: &NodeSet, spec: &QuadSpec, integrand: F) -> Result<f64>
where
    F: Fn(usize, usize) -> f64 + Sync,
{
    spec.validate()?;
    let n = nodes.len();
    let pairs = (n as u64) * (n as u64 - 1);
    if pairs > spec.max_pairs {
        return Err(Error::Quadrature(format!(
            "pair budget exceeded: {} node pairs > max {}",
            pairs, spec.max_pairs
        )));
    }
    let cutoff = nodes.h_min * (1.0 - 1e-12);
    let row = |i: usize| -> std::result::Result<f64, (usize, usize)> {
        let mut acc = Accumulator::new();
        let xi = nodes.coords[i];
        let wi = nodes.weights[i];
        match spec.diagonal {
            DiagonalPolicy::ExcludeCell => {
                for j in 0..n {
                    if j == i || dist(xi, nodes.coords[j]) < cutoff {
                        continue;
                    }
                    let v = integrand(i, j);
                    if !v.is_finite() {
                        return Err((i, j));
                    }
                    acc.add(v * wi * nodes.weights[j]);
                }
            }
            DiagonalPolicy::SymmetricDifference => {
                for j in (i + 1)..n {
                    if dist(xi, nodes.coords[j]) < cutoff {
                        continue;
                    }
                    let a = integrand(i, j);
                    let b = integrand(j, i);
                    if !a.is_finite() || !b.is_finite() {
                        return Err((i, j));
                    }
                    acc.add((a + b) * wi * nodes.weights[j]);
                }
            }
        }
        Ok(acc.value())
    };

    let partials: Vec<std::result::Result<f64, (usize, usize)>> =
        if n >= 512 && rayon::current_num_threads() > 1 {
            (0..n).into_par_iter().map(row).collect()
        } else {
            (0..n).map(row).collect()
        };

    let mut acc = Accumulator::new();
    for p in partials {
        match p {
            Ok(v) => acc.add(v),
            Err((i, j)) => {
                return Err(Error::Quadrature(format!(
                    "non-finite integrand at pair x={:?}, y={:?}",
                    nodes.coords[i], nodes.coords[j]
                )))
            }
        }
    }
    Ok(acc.value())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nodal_sampling_matches_expected_values() {
        let dom = BoxDomain::new_1d(0.0, 1.0, 11).unwrap();
        let g = make_grid_function(&dom, |p| p[0]).unwrap();
        for (i, v) in g.values.iter().enumerate() {
            assert!((v - i as f64 * 0.1).abs() < 1e-15);
        }

        let zero = make_grid_function(&dom, |_| 0.0).unwrap();
        assert!(zero.values.iter().all(|&v| v == 0.0));

        let dom = BoxDomain::new_1d(0.0, 1.0, 101).unwrap();
        let bump = make_grid_function(&dom, |p| p[0] * (1.0 - p[0])).unwrap();
        let max = bump.values.iter().cloned().fold(0.0_f64, f64::max);
        assert!((max - 0.25).abs() < 1e-15);
    }

    #[test]
    fn sampling_rejects_bad_input() {
        let dom = BoxDomain::new_1d(0.0, 1.0, 11).unwrap();
        assert!(GridFunction::from_values(&dom, vec![0.0; 7]).is_err());
        assert!(make_grid_function(&dom, |p| 1.0 / (p[0] - 0.5)).is_err());
    }

    #[test]
    fn trapezoid_integrates_constants_exactly() {
        let dom = BoxDomain::new_1d(0.0, 1.0, 17).unwrap();
        let one = make_grid_function(&dom, |_| 1.0).unwrap();
        assert!((integrate(&one) - 1.0).abs() < 1e-14);

        let dom2 = BoxDomain::new_2d([0.0, 0.0], [1.0, 1.0], [9, 9]).unwrap();
        let one2 = make_grid_function(&dom2, |_| 1.0).unwrap();
        assert!((integrate(&one2) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn trapezoid_quadratic_error_is_second_order() {
        let dom = BoxDomain::new_1d(0.0, 1.0, 1001).unwrap();
        let g = make_grid_function(&dom, |p| p[0] * p[0]).unwrap();
        assert!((integrate(&g) - 1.0 / 3.0).abs() < 1e-6);
    }

    #[test]
    fn integrate_is_linear() {
        let dom = BoxDomain::new_1d(0.0, 2.0, 33).unwrap();
        let u = make_grid_function(&dom, |p| (3.1 * p[0]).sin()).unwrap();
        let v = make_grid_function(&dom, |p| p[0].exp()).unwrap();
        let lin = u.scale(2.5).add(&v.scale(-0.75)).unwrap();
        let lhs = integrate(&lin);
        let rhs = 2.5 * integrate(&u) - 0.75 * integrate(&v);
        assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs().max(1.0));
    }

    #[test]
    fn pair_sum_of_zero_integrand_is_zero() {
        let dom = BoxDomain::new_1d(0.0, 1.0, 33).unwrap();
        let nodes = dom.omega_nodes();
        let v = double_sum_singular(&nodes, &QuadSpec::default(), |_, _| 0.0).unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn pair_sum_symmetric_under_transposition() {
        let dom = BoxDomain::new_1d(0.0, 1.0, 65).unwrap();
        let nodes = dom.omega_nodes();
        let spec = QuadSpec::default();
        let f = |i: usize, j: usize| {
            let x = nodes.coords[i][0];
            let y = nodes.coords[j][0];
            (x - y).abs().sqrt() + x * y
        };
        let a = double_sum_singular(&nodes, &spec, f).unwrap();
        let b = double_sum_singular(&nodes, &spec, |i, j| f(j, i)).unwrap();
        assert!((a - b).abs() <= 1e-12 * a.abs());
    }

    #[test]
    fn pair_budget_is_enforced() {
        let dom = BoxDomain::new_1d(0.0, 1.0, 65).unwrap();
        let nodes = dom.omega_nodes();
        let spec = QuadSpec {
            max_pairs: 100,
            ..QuadSpec::default()
        };
        match double_sum_singular(&nodes, &spec, |_, _| 1.0) {
            Err(Error::Quadrature(msg)) => assert!(msg.contains("pair budget")),
            other => panic!("expected pair budget error, got {other:?}"),
        }
    }

    #[test]
    fn non_finite_integrand_reports_pair() {
        let dom = BoxDomain::new_1d(0.0, 1.0, 9).unwrap();
        let nodes = dom.omega_nodes();
        let res = double_sum_singular(&nodes, &QuadSpec::default(), |i, j| {
            if i == 2 && j == 5 {
                f64::NAN
            } else {
                1.0
            }
        });
        assert!(matches!(res, Err(Error::Quadrature(_))));
    }

    #[test]
    fn lambda_grid_embeds_omega_exactly() {
        let dom = BoxDomain::new_1d(0.0, 1.0, 65)
            .unwrap()
            .with_truncation_factor(3.0)
            .unwrap();
        let lambda = dom.lambda_domain().unwrap();
        assert_eq!(lambda.node_count(), 65 + 2 * 64);
        for i in 0..dom.node_count() {
            let li = dom.omega_to_lambda_index(i);
            assert!(dist(dom.node_coord(i), lambda.node_coord(li)) < 1e-12);
        }
        let u = make_grid_function(&dom, |p| p[0] * (1.0 - p[0]))
            .unwrap()
            .with_zero_outside();
        let lv = u.lambda_values().unwrap();
        assert_eq!(lv.len(), lambda.node_count());
        assert_eq!(lv[0], 0.0);
        assert_eq!(lv[dom.omega_to_lambda_index(32)], u.values[32]);
    }

    #[test]
    fn singular_kernel_closed_form_converges() {
        // ∫0^1 ∫0^1 |x-y|^{1-2s} dx dy = 1 / ((1-s)(3-2s)); s = 1/2 gives 1.
        let s = 0.5;
        let exact = 1.0 / ((1.0 - s) * (3.0 - 2.0 * s));
        let mut prev_err = f64::INFINITY;
        for nodes_n in [65usize, 129, 257] {
            let dom = BoxDomain::new_1d(0.0, 1.0, nodes_n).unwrap();
            let ns = dom.omega_nodes();
            let v = double_sum_singular(&ns, &QuadSpec::default(), |i, j| {
                let d = dist(ns.coords[i], ns.coords[j]);
                d.powf(1.0 - 2.0 * s) / 1.0
            })
            .unwrap();
            let err = (v - exact).abs() / exact;
            assert!(err < prev_err, "refinement must improve the estimate");
            prev_err = err;
        }
        assert!(prev_err < 0.05);
    }
}

//! Globally adaptive tensor Gauss-Legendre quadrature over disks and annuli
//! in polar coordinates.
//!
//! The region starts as a grid of cells, radially graded toward the inner
//! radius. Each cell carries the values of two tensor rules of different
//! order; the cell with the largest disagreement is split into four until
//! the summed disagreement meets the tolerance.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::TAU;
use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Rule orders, the initial grid and the stopping criteria.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadSpec {
    /// Points per direction of the lower rule; the upper rule has four more.
    pub order: usize,
    pub angular_panels: usize,
    /// Number of dyadic halvings of the initial radial panels toward the inner radius.
    pub levels: usize,
    /// Relative tolerance on the summed error estimate.
    pub tol: f64,
    /// Cell budget before giving up with [`Error::Accuracy`].
    pub max_cells: usize,
}

impl Default for QuadSpec {
    fn default() -> Self {
        Self {
            order: 8,
            angular_panels: 8,
            levels: 10,
            tol: 1e-10,
            max_cells: 100_000,
        }
    }
}

impl QuadSpec {
    pub fn with_levels(self, levels: usize) -> Self {
        Self { levels, ..self }
    }

    pub fn with_tol(self, tol: f64) -> Self {
        Self { tol, ..self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AreaResult {
    pub value: f64,
    /// Summed disagreement between the two rules over the final cells.
    pub estimated_error: f64,
    /// Integrand evaluations.
    pub nodes: usize,
}

fn rule(order: usize) -> Vec<(f64, f64)> {
    let n = NonZeroUsize::new(order.max(1)).expect("positive order");
    GaussLegendre::new(n).as_node_weight_pairs().to_vec()
}

/// Panel boundaries on `[r0, r1]`, halving toward `r0`.
fn radial_panels(r0: f64, r1: f64, levels: usize) -> Vec<(f64, f64)> {
    let width = r1 - r0;
    let mut edges: Vec<f64> = (0..=levels).map(|k| r0 + width * 0.5f64.powi(k as i32)).collect();
    edges.push(r0);
    edges.reverse();
    edges.windows(2).map(|w| (w[0], w[1])).collect()
}

struct Rules {
    low: Vec<(f64, f64)>,
    high: Vec<(f64, f64)>,
}

impl Rules {
    fn new(order: usize) -> Self {
        Self {
            low: rule(order),
            high: rule(order + 4),
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Cell {
    r: (f64, f64),
    phi: (f64, f64),
    low: f64,
    high: f64,
}

impl Cell {
    fn error(&self) -> f64 {
        (self.high - self.low).abs()
    }
}

impl PartialEq for Cell {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Cell {}

impl PartialOrd for Cell {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Cell {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error()
            .total_cmp(&other.error())
            .then(other.r.0.total_cmp(&self.r.0))
            .then(other.phi.0.total_cmp(&self.phi.0))
    }
}

/// `∫∫ f(r e^{iφ}) r dr dφ` over one cell with a tensor rule.
fn tensor(f: &impl Fn(Complex64) -> f64, r: (f64, f64), phi: (f64, f64), rule: &[(f64, f64)]) -> f64 {
    let (rm, rh) = (0.5 * (r.0 + r.1), 0.5 * (r.1 - r.0));
    let (pm, ph) = (0.5 * (phi.0 + phi.1), 0.5 * (phi.1 - phi.0));
    let mut total = 0.0;
    for &(x, w) in rule {
        let rr = rm + rh * x;
        let mut ring = 0.0;
        for &(y, v) in rule {
            ring += v * f(Complex64::from_polar(rr, pm + ph * y));
        }
        total += w * rr * ring;
    }
    total * rh * ph
}

fn cell(f: &impl Fn(Complex64) -> f64, r: (f64, f64), phi: (f64, f64), rules: &Rules, nodes: &mut usize) -> Cell {
    *nodes += rules.low.len().pow(2) + rules.high.len().pow(2);
    Cell {
        r,
        phi,
        low: tensor(f, r, phi, &rules.low),
        high: tensor(f, r, phi, &rules.high),
    }
}

/// `∫∫ f(r e^{iφ}) r dr dφ` over `r0 ≤ r ≤ r1`, refined until the summed
/// error estimate is at most `tol · max(|value|, 1)`.
pub fn adaptive_polar_integral(
    f: &impl Fn(Complex64) -> f64,
    r0: f64,
    r1: f64,
    spec: &QuadSpec,
) -> Result<AreaResult> {
    let rules = Rules::new(spec.order);
    let mut nodes = 0;
    let dphi = TAU / spec.angular_panels.max(1) as f64;
    let mut heap = BinaryHeap::new();
    for r in radial_panels(r0, r1, spec.levels) {
        for k in 0..spec.angular_panels.max(1) {
            let phi = (k as f64 * dphi, (k + 1) as f64 * dphi);
            heap.push(cell(f, r, phi, &rules, &mut nodes));
        }
    }
    let totals = |heap: &BinaryHeap<Cell>| {
        heap.iter().fold((0.0, 0.0, 0.0), |(lo, hi, e), c| (lo + c.low, hi + c.high, e + c.error()))
    };
    let (_, mut value, mut error) = totals(&heap);
    loop {
        if error <= spec.tol * value.abs().max(1.0) {
            // re-sum to drop the drift of the running totals
            let (_, value, error) = totals(&heap);
            if error <= spec.tol * value.abs().max(1.0) {
                return Ok(AreaResult {
                    value,
                    estimated_error: error,
                    nodes,
                });
            }
        }
        if heap.len() + 3 > spec.max_cells {
            let (coarse, fine, _) = totals(&heap);
            return Err(Error::Accuracy {
                coarse,
                fine,
                tol: spec.tol,
            });
        }
        let worst = heap.pop().expect("non-empty grid");
        value -= worst.high;
        error -= worst.error();
        let rm = 0.5 * (worst.r.0 + worst.r.1);
        let pm = 0.5 * (worst.phi.0 + worst.phi.1);
        for r in [(worst.r.0, rm), (rm, worst.r.1)] {
            for phi in [(worst.phi.0, pm), (pm, worst.phi.1)] {
                let child = cell(f, r, phi, &rules, &mut nodes);
                value += child.high;
                error += child.error();
                heap.push(child);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn panels_cover_the_interval() {
        let p = radial_panels(0.0, 1.0, 3);
        assert_eq!(p.len(), 4);
        assert_eq!(p[0], (0.0, 0.125));
        assert_eq!(p[3], (0.5, 1.0));
        let p = radial_panels(0.2, 1.0, 2);
        assert_eq!(p.first().unwrap().0, 0.2);
        assert_eq!(p.last().unwrap().1, 1.0);
    }

    #[test]
    fn polynomial_integrands() {
        let spec = QuadSpec::default();
        let r = adaptive_polar_integral(&|z: Complex64| z.norm_sqr(), 0.0, 1.0, &spec).unwrap();
        assert!((r.value - PI / 2.0).abs() < 1e-13);
        let r = adaptive_polar_integral(&|z: Complex64| z.re * z.re, 0.5, 2.0, &spec).unwrap();
        assert!((r.value - PI * (16.0 - 0.0625) / 4.0).abs() < 1e-12);
    }

    #[test]
    fn concentrated_integrands() {
        let spec = QuadSpec::default();
        // unit mass over the plane at scale 1e-3 with algebraic tails, the
        // shape of a bubble; the mass outside the unit disk is s²/(1 − |c|²)² + O(s⁴)
        let s: f64 = 1e-3;
        for centre in [Complex64::new(0.0, 0.0), Complex64::new(0.4, -0.3)] {
            let f = |z: Complex64| s * s / (PI * ((z - centre).norm_sqr() + s * s).powi(2));
            let r = adaptive_polar_integral(&f, 0.0, 1.0, &spec).unwrap();
            let expect = 1.0 - s * s / (1.0 - centre.norm_sqr()).powi(2);
            assert!((r.value - expect).abs() < 1e-10, "{centre}: {}", r.value);
        }
    }

    #[test]
    fn exhausted_budget_is_reported() {
        let spec = QuadSpec {
            max_cells: 20,
            levels: 0,
            ..QuadSpec::default()
        };
        let f = |z: Complex64| 1.0 / (1e-6 + (z - Complex64::new(0.7, 0.1)).norm_sqr());
        assert!(matches!(
            adaptive_polar_integral(&f, 0.0, 1.0, &spec),
            Err(Error::Accuracy { .. })
        ));
    }
}

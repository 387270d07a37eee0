//! Polynomial curves in CP³, horizontality and higher singularities.

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::cpoly::{coprime, wronskian2, CPoly};
use crate::error::{Error, Result};

/// Default relative tolerance for [`is_horizontal`].
pub const HORIZONTAL_TOL: f64 = 1e-10;

/// Default singular-value ratio for [`is_linearly_full`].
pub const FULL_TOL: f64 = 1e-8;

/// Horizontality tolerance used to gate singularity computations. Looser
/// than [`HORIZONTAL_TOL`] so that curves moved by group actions still pass.
pub const GATE_TOL: f64 = 1e-8;

/// A Taylor coefficient of a wedge minor counts as zero when it is below
/// this fraction of its rounding magnitude, plus the size it can pick up
/// from the uncertainty of the point.
pub const ORDER_TOL: f64 = 1e-12;

/// Default uncertainty of a point passed to [`wedge_orders`], relative to `1 + |z|`.
pub const POINT_TOL: f64 = 1e-12;

/// Coefficient matrix: row `i`, column `j` holds the `z^j` coefficient of `f_(i+1)`.
pub type CoefficientMatrix = DMatrix<Complex64>;

/// A point of the Riemann sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Point {
    Finite(Complex64),
    Infinity,
}

impl Point {
    pub fn distance(&self, other: &Point) -> f64 {
        chordal(*self, *other)
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Finite(z) => write!(f, "{}{:+}i", z.re, z.im),
            Point::Infinity => write!(f, "inf"),
        }
    }
}

/// Chordal distance between points of the unit Riemann sphere.
pub fn chordal(a: Point, b: Point) -> f64 {
    match (a, b) {
        (Point::Infinity, Point::Infinity) => 0.0,
        (Point::Finite(z), Point::Infinity) | (Point::Infinity, Point::Finite(z)) => {
            2.0 / (1.0 + z.norm_sqr()).sqrt()
        }
        (Point::Finite(z), Point::Finite(w)) => {
            2.0 * (z - w).norm() / ((1.0 + z.norm_sqr()) * (1.0 + w.norm_sqr())).sqrt()
        }
    }
}

/// A curve `[f1, f2, f3, f4]` of polynomials sharing the formal degree `d`.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveCP3 {
    comps: [CPoly; 4],
}

impl CurveCP3 {
    /// Validated constructor: equal formal degrees, some component of full
    /// degree, and no common zero.
    pub fn new(comps: [CPoly; 4]) -> Result<Self> {
        let c = Self::new_unchecked(comps)?;
        let d = c.degree();
        let top = c.comps.iter().map(|f| f.coeff(d).norm()).fold(0.0, f64::max);
        let scale = c.max_abs();
        if scale == 0.0 {
            return Err(Error::Degenerate("all components vanish".into()));
        }
        if top <= crate::cpoly::DEGREE_TOL * scale {
            return Err(Error::Construction(format!(
                "no component reaches the formal degree {d}"
            )));
        }
        if !coprime(&c.comps)? {
            return Err(Error::Construction("components share a common zero".into()));
        }
        Ok(c)
    }

    /// Only checks that the formal degrees agree. Group actions and
    /// intermediate reduction states go through here.
    pub fn new_unchecked(comps: [CPoly; 4]) -> Result<Self> {
        let d = comps[0].formal_degree();
        for f in &comps[1..] {
            if f.formal_degree() != d {
                return Err(Error::DegreeMismatch {
                    expected: d,
                    found: f.formal_degree(),
                });
            }
        }
        Ok(Self { comps })
    }

    /// Curve from a 4×(d+1) coefficient matrix, validated as in [`Self::new`].
    pub fn from_matrix(m: &CoefficientMatrix) -> Result<Self> {
        Self::new(Self::rows_of(m)?)
    }

    pub fn from_matrix_unchecked(m: &CoefficientMatrix) -> Result<Self> {
        Self::new_unchecked(Self::rows_of(m)?)
    }

    fn rows_of(m: &CoefficientMatrix) -> Result<[CPoly; 4]> {
        if m.nrows() != 4 || m.ncols() == 0 {
            return Err(Error::Construction(format!(
                "coefficient matrix must be 4 x (d+1), got {} x {}",
                m.nrows(),
                m.ncols()
            )));
        }
        Ok(std::array::from_fn(|i| {
            CPoly::new(m.row(i).iter().copied().collect())
        }))
    }

    /// Convenience constructor from real coefficient rows.
    pub fn from_real_rows(rows: [&[f64]; 4]) -> Result<Self> {
        Self::new(rows.map(CPoly::from_real))
    }

    pub fn degree(&self) -> usize {
        self.comps[0].formal_degree()
    }

    pub fn components(&self) -> &[CPoly; 4] {
        &self.comps
    }

    pub fn component(&self, i: usize) -> &CPoly {
        &self.comps[i]
    }

    pub fn coefficient_matrix(&self) -> CoefficientMatrix {
        let d = self.degree();
        DMatrix::from_fn(4, d + 1, |i, j| self.comps[i].coeff(j))
    }

    pub fn max_abs(&self) -> f64 {
        self.comps.iter().map(CPoly::max_abs).fold(0.0, f64::max)
    }

    pub fn eval(&self, z: Complex64) -> [Complex64; 4] {
        std::array::from_fn(|i| self.comps[i].eval(z))
    }

    pub fn derivative(&self) -> [CPoly; 4] {
        std::array::from_fn(|i| self.comps[i].derivative())
    }

    /// The curve read in the chart `w = 1/z`: `w^d f(1/w)`, i.e. every
    /// component with its coefficients reversed.
    pub fn reversed(&self) -> Self {
        Self {
            comps: std::array::from_fn(|i| self.comps[i].reversed()),
        }
    }

    pub fn map_components(&self, f: impl Fn(usize, &CPoly) -> CPoly) -> Self {
        Self {
            comps: std::array::from_fn(|i| f(i, &self.comps[i])),
        }
    }

    /// Divides by the largest-magnitude coefficient so the representative
    /// has a unit pivot.
    pub fn normalized(&self) -> Self {
        let m = self.coefficient_matrix();
        let pivot = m
            .iter()
            .copied()
            .max_by(|a, b| a.norm().total_cmp(&b.norm()))
            .unwrap_or_default();
        if pivot.norm() == 0.0 {
            return self.clone();
        }
        self.map_components(|_, f| f.scale(pivot.inv()))
    }
}

/// `max |F - λG| / max |F|` for the best complex `λ`; zero iff the curves
/// are the same point of projective coefficient space. Curves of different
/// degree are infinitely far apart.
pub fn projective_distance(f: &CurveCP3, g: &CurveCP3) -> f64 {
    if f.degree() != g.degree() {
        return f64::INFINITY;
    }
    let a = f.coefficient_matrix();
    let b = g.coefficient_matrix();
    let gg: f64 = b.iter().map(|x| x.norm_sqr()).sum();
    let fmax = f.max_abs();
    if gg == 0.0 || fmax == 0.0 {
        return if gg == 0.0 && fmax == 0.0 { 0.0 } else { f64::INFINITY };
    }
    let gf: Complex64 = b.iter().zip(a.iter()).map(|(x, y)| x.conj() * y).sum();
    let lambda = gf / gg;
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - lambda * y).norm())
        .fold(0.0, f64::max)
        / fmax
}

/// `f1'f2 - f1f2' + f3'f4 - f3f4'`, which vanishes iff the curve is horizontal.
pub fn horizontality_residual(c: &CurveCP3) -> CPoly {
    let [f1, f2, f3, f4] = c.components();
    let a = wronskian2(f1, f2).expect("components share a formal degree");
    let b = wronskian2(f3, f4).expect("components share a formal degree");
    &a + &b
}

/// Horizontality residual relative to `max |a_i^j|² · d`.
pub fn horizontality_defect(c: &CurveCP3) -> f64 {
    let scale = c.max_abs().powi(2) * c.degree().max(1) as f64;
    if scale == 0.0 {
        return 0.0;
    }
    horizontality_residual(c).max_abs() / scale
}

pub fn is_horizontal(c: &CurveCP3, tol: f64) -> bool {
    horizontality_defect(c) <= tol
}

/// Smallest over largest singular value of the coefficient matrix; zero when
/// the curve has fewer than four columns.
pub fn fullness_ratio(c: &CurveCP3) -> f64 {
    if c.degree() < 3 {
        return 0.0;
    }
    let sv = c.coefficient_matrix().singular_values();
    let max = sv.iter().copied().fold(0.0, f64::max);
    let min = sv.iter().copied().fold(f64::INFINITY, f64::min);
    if max == 0.0 {
        0.0
    } else {
        min / max
    }
}

pub fn is_linearly_full(c: &CurveCP3, tol: f64) -> bool {
    fullness_ratio(c) > tol
}

/// `f1''f2' - f1'f2'' + f3''f4' - f3'f4''` without any precondition, at
/// formal degree `2d - 3`. Its top coefficient cancels identically and is
/// set to zero; the next one cancels only on horizontal curves.
pub fn singularity_poly_raw(c: &CurveCP3) -> CPoly {
    let d = c.degree();
    if d < 2 {
        return CPoly::zero(0);
    }
    let pair = |f: &CPoly, g: &CPoly| {
        let (f1, f2) = (f.derivative(), f.nth_derivative(2));
        let (g1, g2) = (g.derivative(), g.nth_derivative(2));
        &(&f2 * &g1) - &(&f1 * &g2)
    };
    let [f1, f2, f3, f4] = c.components();
    let mut s = &pair(f1, f2) + &pair(f3, f4);
    s = s.map_coeffs(|j, a| if j == 2 * d - 3 { Complex64::new(0.0, 0.0) } else { a });
    s
}

/// The polynomial whose zeros are the finite higher singularities of a
/// horizontal, linearly full curve. Formal degree `2d - 3` with the top two
/// coefficients zeroed.
pub fn singularity_poly(c: &CurveCP3) -> Result<CPoly> {
    check_singularity_preconditions(c)?;
    let d = c.degree();
    let s = singularity_poly_raw(c);
    Ok(s.map_coeffs(|j, a| {
        if j + 4 >= 2 * d {
            Complex64::new(0.0, 0.0)
        } else {
            a
        }
    }))
}

fn check_singularity_preconditions(c: &CurveCP3) -> Result<()> {
    if !is_horizontal(c, GATE_TOL) {
        return Err(Error::Precondition(format!(
            "curve is not horizontal (relative residual {:e})",
            horizontality_defect(c)
        )));
    }
    if !is_linearly_full(c, FULL_TOL) {
        return Err(Error::Precondition("curve is not linearly full".into()));
    }
    Ok(())
}

/// Ramification indices `(r0, r1, r2)` at one point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SingularityType {
    pub r0: usize,
    pub r1: usize,
    pub r2: usize,
}

impl SingularityType {
    pub fn is_regular(&self) -> bool {
        self.r0 == 0 && self.r1 == 0 && self.r2 == 0
    }
}

/// A polynomial paired with a polynomial of non-negative coefficients
/// bounding the magnitude of the terms that were summed to build it.
#[derive(Clone)]
struct Tracked {
    val: CPoly,
    mag: CPoly,
}

impl Tracked {
    fn mul(&self, o: &Tracked) -> Tracked {
        Tracked {
            val: &self.val * &o.val,
            mag: &self.mag * &o.mag,
        }
    }
    fn add(&self, o: &Tracked) -> Tracked {
        Tracked {
            val: &self.val + &o.val,
            mag: &self.mag + &o.mag,
        }
    }
    fn sub(&self, o: &Tracked) -> Tracked {
        Tracked {
            val: &self.val - &o.val,
            mag: &self.mag + &o.mag,
        }
    }

    /// Index of the first coefficient that is not negligible when the
    /// expansion point is known only to within `eps`: moving the point by
    /// `δ` feeds `C(k, j) a_k δ^(k-j)` into `a_j`.
    fn order(&self, eps: f64) -> Option<usize> {
        let n = self.val.formal_degree();
        (0..=n).find(|&j| {
            let m = self.mag.coeff(j).re;
            let mut drift = 0.0;
            let (mut binom, mut power) = (1.0, 1.0);
            for k in j + 1..=n {
                binom *= k as f64 / (k - j) as f64;
                power *= eps;
                drift += binom * self.val.coeff(k).norm() * power;
            }
            m > 0.0 && self.val.coeff(j).norm() > ORDER_TOL * m + drift
        })
    }
}

fn det(rows: &[Vec<Tracked>]) -> Tracked {
    let n = rows.len();
    if n == 1 {
        return rows[0][0].clone();
    }
    let mut acc: Option<Tracked> = None;
    for col in 0..n {
        let minor: Vec<Vec<Tracked>> = rows[1..]
            .iter()
            .map(|r| {
                r.iter()
                    .enumerate()
                    .filter(|(k, _)| *k != col)
                    .map(|(_, t)| t.clone())
                    .collect()
            })
            .collect();
        let term = rows[0][col].mul(&det(&minor));
        acc = Some(match acc {
            None if col % 2 == 0 => term,
            None => Tracked {
                val: -&term.val,
                mag: term.mag,
            },
            Some(a) if col % 2 == 0 => a.add(&term),
            Some(a) => a.sub(&term),
        });
    }
    acc.expect("non-empty matrix")
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if n < k {
        return vec![];
    }
    let mut out = combinations(n - 1, k);
    for mut c in combinations(n - 1, k - 1) {
        c.push(n - 1);
        out.push(c);
    }
    out
}

/// Vanishing orders of `f∧f'`, `f∧f'∧f''` and `f∧f'∧f''∧f'''` at `p`.
/// Points outside the unit disk are handled in the `1/z` chart.
pub fn wedge_orders(c: &CurveCP3, p: Point) -> Result<[usize; 3]> {
    let eps = match p {
        Point::Finite(z) => POINT_TOL * (1.0 + z.norm()),
        Point::Infinity => 0.0,
    };
    wedge_orders_near(c, p, eps)
}

/// [`wedge_orders`] at a point known only to within `eps`.
pub fn wedge_orders_near(c: &CurveCP3, p: Point, eps: f64) -> Result<[usize; 3]> {
    if let Point::Finite(z) = p {
        if z.norm() > 1.0 {
            return wedge_orders_near(&c.reversed(), Point::Finite(z.inv()), eps / z.norm_sqr());
        }
    }
    let (local, mags): (Vec<CPoly>, Vec<CPoly>) = match p {
        Point::Infinity => c
            .reversed()
            .components()
            .iter()
            .map(|f| (f.clone(), f.abs_coeffs()))
            .unzip(),
        Point::Finite(z) => c
            .components()
            .iter()
            .map(|f| {
                let shift = Complex64::new(z.norm(), 0.0);
                (f.taylor_shift(z), f.abs_coeffs().taylor_shift(shift))
            })
            .unzip(),
    };
    // stack[k][i] = k-th derivative of the i-th local component
    let stack: Vec<Vec<Tracked>> = (0..4)
        .map(|k| {
            (0..4)
                .map(|i| Tracked {
                    val: local[i].nth_derivative(k),
                    mag: mags[i].nth_derivative(k),
                })
                .collect()
        })
        .collect();
    let cap = 3 * c.degree();
    let mut orders = [0usize; 3];
    for (slot, k) in [2usize, 3, 4].into_iter().enumerate() {
        let mut best: Option<usize> = None;
        for cols in combinations(4, k) {
            let rows: Vec<Vec<Tracked>> = stack[..k]
                .iter()
                .map(|r| cols.iter().map(|&i| r[i].clone()).collect())
                .collect();
            if let Some(o) = det(&rows).order(eps) {
                best = Some(best.map_or(o, |b: usize| b.min(o)));
            }
        }
        match best {
            Some(o) if o <= cap => orders[slot] = o,
            _ => {
                return Err(Error::Resolution {
                    point: p.to_string(),
                    cap,
                })
            }
        }
    }
    Ok(orders)
}

/// Ramification indices at `p`, read off the wedge vanishing orders
/// `r0`, `2r0 + r1` and `3r0 + 2r1 + r2`.
pub fn singularity_type_at(c: &CurveCP3, p: Point) -> Result<SingularityType> {
    let eps = match p {
        Point::Finite(z) => POINT_TOL * (1.0 + z.norm()),
        Point::Infinity => 0.0,
    };
    singularity_type_near(c, p, eps)
}

/// [`singularity_type_at`] at a point known only to within `eps`.
pub fn singularity_type_near(c: &CurveCP3, p: Point, eps: f64) -> Result<SingularityType> {
    if !is_linearly_full(c, FULL_TOL) {
        return Err(Error::Precondition("curve is not linearly full".into()));
    }
    let [o1, o2, o3] = wedge_orders_near(c, p, eps)?;
    let r1 = o2 as i64 - 2 * o1 as i64;
    let r2 = o3 as i64 - 2 * o2 as i64 + o1 as i64;
    if r1 < 0 || r2 < 0 {
        return Err(Error::Consistency(format!(
            "wedge orders ({o1}, {o2}, {o3}) at {p} give negative indices"
        )));
    }
    Ok(SingularityType {
        r0: o1,
        r1: r1 as usize,
        r2: r2 as usize,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SingularPoint {
    pub point: Complex64,
    pub kind: SingularityType,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SingularityReport {
    pub degree: usize,
    pub finite_points: Vec<SingularPoint>,
    pub at_infinity: SingularityType,
    pub total_r0: usize,
    pub total_r1: usize,
    pub total_r2: usize,
}

impl SingularityReport {
    /// `2 Σr0 + Σr1 = 2d - 6`.
    pub fn count_holds(&self) -> bool {
        2 * self.total_r0 + self.total_r1 + 6 == 2 * self.degree
    }

    /// `r0 = r2` at every point, including infinity.
    pub fn symmetric(&self) -> bool {
        self.finite_points.iter().all(|p| p.kind.r0 == p.kind.r2)
            && self.at_infinity.r0 == self.at_infinity.r2
    }

    /// All singular points, with infinity last when it is singular.
    pub fn points(&self) -> Vec<(Point, SingularityType)> {
        let mut out: Vec<(Point, SingularityType)> = self
            .finite_points
            .iter()
            .map(|p| (Point::Finite(p.point), p.kind))
            .collect();
        if !self.at_infinity.is_regular() {
            out.push((Point::Infinity, self.at_infinity));
        }
        out
    }

    /// Sorted multiset of the types of singular points.
    pub fn type_multiset(&self) -> Vec<SingularityType> {
        let mut v: Vec<SingularityType> = self.points().into_iter().map(|(_, t)| t).collect();
        v.sort();
        v
    }
}

const DEDUP_TOL: f64 = 1e-6;
/// Roots this close to 0 are taken to be 0.
const SNAP_TOL: f64 = 1e-12;

/// Expected error of a computed root of multiplicity `m`, relative to `1 + |z|`.
fn root_uncertainty(m: usize) -> f64 {
    POINT_TOL.max(10.0 * f64::EPSILON.powf(1.0 / m as f64))
}

/// Locates every higher singularity and its type. Roots inside the closed
/// unit disk come from the `z` chart, the rest from the `1/z` chart.
pub fn singularity_report(c: &CurveCP3) -> Result<SingularityReport> {
    check_singularity_preconditions(c)?;
    // (point, uncertainty of the point)
    let mut candidates: Vec<(Complex64, f64)> = Vec::new();
    let mut infinity_root = false;
    for (chart, flip) in [(c.clone(), false), (c.reversed(), true)] {
        let s = singularity_poly(&chart)?;
        if s.actual_degree().is_none() {
            return Err(Error::Consistency(
                "singularity polynomial vanishes identically".into(),
            ));
        }
        if s.actual_degree() == Some(0) {
            continue;
        }
        for root in s.roots()? {
            let w = if root.value.norm() < SNAP_TOL { Complex64::new(0.0, 0.0) } else { root.value };
            if w.norm() > 1.0 + DEDUP_TOL {
                continue;
            }
            let eps = root_uncertainty(root.multiplicity) * (1.0 + w.norm());
            if !flip {
                candidates.push((w, eps));
            } else if w.norm() <= DEDUP_TOL {
                infinity_root = true;
            } else {
                candidates.push((w.inv(), eps / w.norm_sqr()));
            }
        }
    }
    let mut points: Vec<(Complex64, f64)> = Vec::new();
    for (z, eps) in candidates {
        if points
            .iter()
            .all(|(q, _)| chordal(Point::Finite(*q), Point::Finite(z)) > DEDUP_TOL)
        {
            points.push((z, eps));
        }
    }

    let mut finite_points = Vec::new();
    for (z, eps) in points {
        let kind = singularity_type_near(c, Point::Finite(z), eps)?;
        if !kind.is_regular() {
            finite_points.push(SingularPoint { point: z, kind });
        }
    }
    let at_infinity = singularity_type_at(c, Point::Infinity)?;
    if infinity_root && at_infinity.is_regular() {
        return Err(Error::Consistency(
            "singularity polynomial vanishes at infinity but the wedge orders do not".into(),
        ));
    }
    let sum = |f: fn(&SingularityType) -> usize| {
        finite_points.iter().map(|p| f(&p.kind)).sum::<usize>() + f(&at_infinity)
    };
    let (total_r0, total_r1, total_r2) = (sum(|t| t.r0), sum(|t| t.r1), sum(|t| t.r2));
    Ok(SingularityReport {
        degree: c.degree(),
        finite_points,
        at_infinity,
        total_r0,
        total_r1,
        total_r2,
    })
}

//! Reduction of horizontal curves to canonical form by explicit group actions.
//!
//! Each reduction records the `Sp(2, C)` element `g` and the Möbius map `ω`
//! with `g·(ψ∘ω)` projectively equal to the canonical curve.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::families::{psi3, psi4_a, psi5_eta};
use crate::curve::{
    is_horizontal, is_linearly_full, projective_distance, singularity_report, CurveCP3, Point,
    FULL_TOL, HORIZONTAL_TOL,
};
use crate::error::{Error, Result};
use crate::groups::{
    act_post, act_pre, stabilizer_element_71, su2_moving_to_zero, GroupElement, MoebiusMap,
    StabilizerParams,
};
use crate::invariance::invariance_check;

/// Relative size below which an entry the reduction forces to zero counts as zero.
pub const PATTERN_TOL: f64 = 1e-8;
/// Relative size below which a pivot of the stabilizer pipeline counts as zero.
pub const PIVOT_TOL: f64 = 1e-9;
/// Bound on the residual of the quintic coefficient system.
pub const QUINTIC_SYSTEM_TOL: f64 = 1e-6;
/// Bound on the projective distance between the transformed input and the canonical curve.
pub const REDUCTION_TOL: f64 = 1e-8;

fn cx(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn phase(x: f64) -> Complex64 {
    Complex64::from_polar(1.0, x)
}

/// Nonnegative parameters read back as tiny negatives are rounding noise.
fn nonnegative(x: f64) -> f64 {
    if x < 0.0 && x > -1e-12 {
        0.0
    } else {
        x
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FamilyParams {
    /// Output of [`reduce_lemma54`]; no family parameter.
    Pattern,
    Psi3,
    /// `η ≥ 0` from the chosen singularity, and the value from every singular point.
    Psi5Eta { eta: f64, candidates: Vec<f64> },
    /// `a ≥ 0` from the chosen singularity, and the value from every singular point.
    Psi4A { a: f64, candidates: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReductionResult {
    pub g: GroupElement,
    pub omega: MoebiusMap,
    pub canonical: CurveCP3,
    pub params: FamilyParams,
}

/// Unknowns of the reduced quintic coefficient matrix
///
/// ```text
/// 1  q  p  0   0   0
/// 0  0  0  p̄  −q̄   1
/// 0  μ  η  ν   0   0
/// 0  0 −ν̄  η̄  −μ̄   0
/// ```
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Degree5ReducedParams {
    pub q: Complex64,
    pub p: Complex64,
    pub mu: Complex64,
    pub eta: Complex64,
    pub nu: Complex64,
}

impl Degree5ReducedParams {
    pub fn from_curve(curve: &CurveCP3) -> Self {
        let f = curve.components();
        let a0 = f[0].coeff(0);
        Self {
            q: f[0].coeff(1) / a0,
            p: f[0].coeff(2) / a0,
            mu: f[2].coeff(1) / a0,
            eta: f[2].coeff(2) / a0,
            nu: f[2].coeff(3) / a0,
        }
    }

    /// Left-hand sides of the horizontality system in these unknowns.
    pub fn system_residuals(&self) -> [Complex64; 3] {
        let Self { q, p, mu, eta, nu } = *self;
        [
            -3.0 * p + nu * mu.conj(),
            2.0 * q - p * q.conj() - eta * mu.conj(),
            cx(
                -3.0 * q.norm_sqr() + p.norm_sqr() + 5.0 - 3.0 * mu.norm_sqr() + eta.norm_sqr() + nu.norm_sqr(),
                0.0,
            ),
        ]
    }

    pub fn system_residual(&self) -> f64 {
        self.system_residuals().iter().map(|r| r.norm()).fold(0.0, f64::max)
    }
}

/// The curve under reduction with the accumulated group elements.
struct Work {
    input: CurveCP3,
    curve: CurveCP3,
    g: GroupElement,
    omega: MoebiusMap,
}

impl Work {
    fn new(input: &CurveCP3) -> Self {
        Self {
            input: input.clone(),
            curve: input.clone(),
            g: GroupElement::identity(),
            omega: MoebiusMap::identity(),
        }
    }

    fn post(&mut self, h: &GroupElement) {
        self.curve = act_post(h, &self.curve);
        self.g = h.compose(&self.g);
    }

    /// Precomposes with `w`, recording `recorded`, which must agree with `w` projectively.
    fn pre(&mut self, w: &MoebiusMap, recorded: &MoebiusMap) {
        self.curve = act_pre(w, &self.curve);
        self.omega = self.omega.compose(recorded);
    }

    /// `z ↦ λz` for unit `λ`, recorded as a unitary map.
    fn rotate(&mut self, lambda: Complex64) -> Result<()> {
        let w = MoebiusMap::rotation(lambda)?;
        let recorded = MoebiusMap::su2(phase(lambda.arg() / 2.0), cx(0.0, 0.0))?;
        self.pre(&w, &recorded);
        Ok(())
    }

    fn scale(&mut self, s: Complex64) {
        self.curve = self.curve.map_components(|_, f| f.scale(s));
    }

    fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.curve.component(row).coeff(col)
    }

    fn assert_zero(&self, cells: &[(usize, usize)], what: &str) -> Result<()> {
        let scale = self.curve.max_abs();
        for &(i, j) in cells {
            let v = self.entry(i, j).norm();
            if v > PATTERN_TOL * scale {
                return Err(Error::Consistency(format!(
                    "{what}: entry ({i}, {j}) is {v:e}, expected zero"
                )));
            }
        }
        Ok(())
    }

    fn pivot(&self, row: usize, col: usize, name: &'static str) -> Result<Complex64> {
        let v = self.entry(row, col);
        if v.norm() <= PIVOT_TOL * self.curve.max_abs() {
            return Err(Error::Pivot {
                entry: name,
                magnitude: v.norm(),
            });
        }
        Ok(v)
    }

    /// Makes the `(0, 0)` entry real and positive with a torus element.
    fn real_corner(&mut self) -> Result<()> {
        let x = self.entry(0, 0);
        self.post(&GroupElement::torus(phase(-x.arg()), cx(1.0, 0.0))?);
        Ok(())
    }

    /// Rotates so the invariance constant becomes `target`.
    fn rotate_beta_to(&mut self, target: Complex64) -> Result<()> {
        let w = invariance_check(&self.curve);
        let beta = w
            .beta
            .ok_or_else(|| Error::Consistency("invariance lost during reduction".into()))?;
        let d = self.curve.degree() as f64;
        self.rotate(phase((target.arg() - beta.arg()) / d))
    }

    fn finish(self, canonical: CurveCP3, params: FamilyParams) -> Result<ReductionResult> {
        let replay = act_post(&self.g, &act_pre(&self.omega, &self.input));
        let dist = projective_distance(&replay, &canonical);
        if !(dist <= REDUCTION_TOL) {
            return Err(Error::Consistency(format!(
                "reduced curve misses the canonical form by {dist:e}"
            )));
        }
        Ok(ReductionResult {
            g: self.g,
            omega: self.omega,
            canonical,
            params,
        })
    }
}

fn check_input(c: &CurveCP3, degree: Option<usize>) -> Result<()> {
    if let Some(d) = degree {
        if c.degree() != d {
            return Err(Error::DegreeMismatch {
                expected: d,
                found: c.degree(),
            });
        }
    }
    if !is_horizontal(c, HORIZONTAL_TOL) {
        return Err(Error::Precondition("curve is not horizontal".into()));
    }
    if !is_linearly_full(c, FULL_TOL) {
        return Err(Error::Precondition("curve is not linearly full".into()));
    }
    Ok(())
}

fn check_invariant(c: &CurveCP3) -> Result<()> {
    if !invariance_check(c).invariant {
        return Err(Error::Precondition("curve is not antipodally invariant".into()));
    }
    Ok(())
}

/// Brings the coefficient matrix to the sparsity pattern
///
/// ```text
/// ★ ★ ★ ★ …        ★ … ★ 0 0 0
/// 0 0 0 ★ …        0 0 0 ★ … ★
/// 0 ★ ★ ★ …        0 ★ ★ … ★ 0 0
/// 0 0 ★ ★ …        0 0 ★ … ★ ★ 0
/// ```
///
/// using `Sp(2)` only; the right-hand zeros are asserted for invariant curves.
fn lemma54(work: &mut Work, invariant: bool) -> Result<()> {
    let col0 = work.curve.coefficient_matrix().column(0).into_owned();
    let w = crate::groups::Vec4::from_iterator(col0.iter().copied());
    work.post(&crate::groups::sp2_sending_to_e1(&w)?);

    let x = work.entry(2, 1);
    let y = work.entry(3, 1);
    let n = (x.norm_sqr() + y.norm_sqr()).sqrt();
    if n > 0.0 {
        let (v1, v2) = (x.conj() / n, -y / n);
        let u = nalgebra::Matrix2::new(v1, -v2.conj(), v2, v1.conj());
        work.post(&GroupElement::lower_block(u)?);
    }

    work.assert_zero(&[(1, 0), (2, 0), (3, 0), (3, 1)], "elimination")?;
    work.assert_zero(&[(1, 1), (1, 2)], "horizontality")?;
    if invariant {
        let d = work.curve.degree();
        work.assert_zero(&[(0, d - 2), (0, d - 1), (0, d), (2, d - 1), (2, d), (3, d)], "invariance")?;
    }
    Ok(())
}

/// The `Sp(2)` normal form with the zero pattern above.
pub fn reduce_lemma54(c: &CurveCP3) -> Result<ReductionResult> {
    check_input(c, None)?;
    let invariant = invariance_check(c).invariant;
    let mut work = Work::new(c);
    lemma54(&mut work, invariant)?;
    let canonical = work.curve.clone();
    work.finish(canonical, FamilyParams::Pattern)
}

/// `Ψ³` from an invariant cubic, with `g ∈ Sp(2)` and unitary `ω`.
pub fn reduce_degree3_invariant(c: &CurveCP3) -> Result<ReductionResult> {
    check_input(c, Some(3))?;
    check_invariant(c)?;
    let mut work = Work::new(c);
    lemma54(&mut work, true)?;
    work.real_corner()?;
    work.rotate_beta_to(cx(-1.0, 0.0))?;
    work.scale(cx(1.0 / work.entry(0, 0).re, 0.0));
    let a = work.entry(2, 1);
    work.post(&GroupElement::torus(cx(1.0, 0.0), phase(-a.arg()))?);
    work.finish(psi3(), FamilyParams::Psi3)
}

/// Finite singular points first, by decreasing modulus then argument, then `∞`.
fn ordered_singular_points(c: &CurveCP3) -> Result<Vec<Point>> {
    let all = singularity_report(c)?.points();
    let mut finite: Vec<Complex64> = all
        .iter()
        .filter_map(|(p, _)| match p {
            Point::Finite(z) => Some(*z),
            Point::Infinity => None,
        })
        .collect();
    finite.sort_by(|a, b| {
        b.norm()
            .total_cmp(&a.norm())
            .then(a.arg().total_cmp(&b.arg()))
    });
    let mut points: Vec<Point> = finite.into_iter().map(Point::Finite).collect();
    if all.iter().any(|(p, _)| *p == Point::Infinity) {
        points.push(Point::Infinity);
    }
    if points.is_empty() {
        return Err(Error::Consistency("no higher singularity found".into()));
    }
    Ok(points)
}

/// Moves `p` to the origin by a unitary precomposition.
fn move_to_origin(work: &mut Work, p: Point) {
    let w = su2_moving_to_zero(p).inverse();
    work.pre(&w, &w);
}

fn quintic_at(c: &CurveCP3, p: Point) -> Result<(Work, f64)> {
    let mut work = Work::new(c);
    move_to_origin(&mut work, p);
    lemma54(&mut work, true)?;
    work.real_corner()?;
    work.rotate_beta_to(cx(1.0, 0.0))?;
    work.scale(cx(1.0 / work.entry(0, 0).re, 0.0));

    let reduced = Degree5ReducedParams::from_curve(&work.curve);
    let res = reduced.system_residual();
    if !(res <= QUINTIC_SYSTEM_TOL) {
        return Err(Error::Consistency(format!(
            "quintic coefficient system fails by {res:e}"
        )));
    }
    work.assert_zero(&[(0, 2), (2, 3)], "singularity at the origin")?;

    let q = work.entry(0, 1);
    if q.norm() > 1e-14 {
        let x = q.arg();
        work.rotate(phase(-x))?;
        work.post(&GroupElement::torus(phase(-2.5 * x), cx(1.0, 0.0))?);
        work.scale(phase(2.5 * x));
    }
    let mu = work.entry(2, 1);
    work.post(&GroupElement::torus(cx(1.0, 0.0), phase(-mu.arg()))?);
    let eta = nonnegative(work.entry(2, 2).re / work.entry(0, 0).re);
    Ok((work, eta))
}

/// `Ψ⁵_η` from an invariant quintic. The singularity moved to the origin is
/// the finite one of largest modulus; `candidates` holds `η` for every
/// singular point.
pub fn reduce_degree5_invariant(c: &CurveCP3) -> Result<ReductionResult> {
    check_input(c, Some(5))?;
    check_invariant(c)?;
    let points = ordered_singular_points(c)?;
    let mut candidates = Vec::with_capacity(points.len());
    let mut chosen = None;
    for p in points {
        let (work, eta) = quintic_at(c, p)?;
        candidates.push(eta);
        if chosen.is_none() {
            chosen = Some((work, eta));
        }
    }
    let (work, eta) = chosen.expect("at least one singular point");
    work.finish(psi5_eta(eta)?, FamilyParams::Psi5Eta { eta, candidates })
}

/// The five stabilizer steps clearing the last column and the `(2, d−1)` entry,
/// then the diagonal scaling equalising the lower block.
fn stabilizer_pipeline(work: &mut Work) -> Result<()> {
    let d = work.curve.degree();
    let one = cx(1.0, 0.0);

    let dd = work.pivot(1, d, "d")?;
    let t = work.entry(3, d);
    work.post(&stabilizer_element_71(StabilizerParams {
        mu: -t,
        alpha: one / dd,
        delta: dd,
        ..Default::default()
    })?);

    let dd = work.pivot(1, d, "d")?;
    let q = work.entry(2, d);
    work.post(&stabilizer_element_71(StabilizerParams {
        lambda: -q,
        alpha: dd,
        delta: one / dd,
        ..Default::default()
    })?);

    let s = work.pivot(3, d - 1, "s")?;
    let p = work.entry(2, d - 1);
    work.post(&stabilizer_element_71(StabilizerParams {
        alpha: s,
        beta: -p,
        delta: one / s,
        ..Default::default()
    })?);

    let dd = work.pivot(1, d, "d")?;
    let cc = work.entry(0, d);
    work.post(&stabilizer_element_71(StabilizerParams {
        xi: dd,
        eta: -cc,
        zeta: one / dd,
        ..Default::default()
    })?);

    let x = work.entry(0, 0);
    let y = work.entry(1, d);
    let r = work.pivot(2, 1, "r")?;
    let s = work.pivot(3, d - 1, "s")?;
    let k1 = (-y / x).sqrt();
    let k3 = (s / r).sqrt();
    work.post(&GroupElement::torus(k1, k3)?);
    work.scale(one / work.entry(0, 0));

    work.assert_zero(&[(0, d), (2, d - 1), (2, d), (3, d)], "stabilizer pipeline")?;
    if work.entry(2, 1).re < 0.0 {
        work.post(&GroupElement::diagonal([one, one, -one, -one])?);
    }
    Ok(())
}

/// `Ψ³` from any horizontal, linearly full cubic, with `g ∈ Sp(2, C)`.
pub fn reduce_degree3_full(c: &CurveCP3) -> Result<ReductionResult> {
    check_input(c, Some(3))?;
    let mut work = Work::new(c);
    lemma54(&mut work, false)?;
    stabilizer_pipeline(&mut work)?;
    work.finish(psi3(), FamilyParams::Psi3)
}

fn quartic_at(c: &CurveCP3, p: Point) -> Result<(Work, f64)> {
    let mut work = Work::new(c);
    move_to_origin(&mut work, p);
    lemma54(&mut work, false)?;
    work.assert_zero(&[(3, 2), (1, 3)], "singularity at the origin")?;
    stabilizer_pipeline(&mut work)?;

    let a = work.entry(0, 1);
    if a.norm() > 1e-14 {
        let x = a.arg();
        work.rotate(phase(-x))?;
        work.post(&GroupElement::diagonal([phase(-2.0 * x), phase(2.0 * x), phase(-x), phase(x)])?);
        work.scale(phase(2.0 * x));
    }
    let a = nonnegative(work.entry(0, 1).re / work.entry(0, 0).re);
    Ok((work, a))
}

/// `Ψ̃⁴_a` from any horizontal, linearly full quartic. The singularity moved
/// to the origin is the finite one of largest modulus; `candidates` holds `a`
/// for every singular point.
pub fn reduce_degree4_full(c: &CurveCP3) -> Result<ReductionResult> {
    check_input(c, Some(4))?;
    let points = ordered_singular_points(c)?;
    let mut candidates = Vec::with_capacity(points.len());
    let mut chosen = None;
    for p in points {
        let (work, a) = quartic_at(c, p)?;
        candidates.push(a);
        if chosen.is_none() {
            chosen = Some((work, a));
        }
    }
    let (work, a) = chosen.expect("at least one singular point");
    work.finish(psi4_a(a)?, FamilyParams::Psi4A { a, candidates })
}

/// `ω(z) = −z` together with `diag{i, −i, −i, i}` exchanges `Ψ⁵_η` and `Ψ⁵_{−η}`.
pub fn quintic_sign_symmetry() -> (GroupElement, MoebiusMap) {
    let i = cx(0.0, 1.0);
    (
        GroupElement::diagonal([i, -i, -i, i]).expect("symplectic"),
        MoebiusMap::su2(phase(PI / 2.0), cx(0.0, 0.0)).expect("unitary"),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canonical::families::{bryant_canonical, psi5_m};
    use crate::groups::{random_moebius, random_sp2, random_sp2c, random_su2, GroupKind};
    use crate::invariance::make_invariant;
    use crate::cpoly::CPoly;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    fn scramble_unitary(curve: &CurveCP3, seed: u64) -> CurveCP3 {
        let mut r = rng(seed);
        act_post(&random_sp2(&mut r), &act_pre(&random_su2(&mut r), curve))
    }

    fn scramble_full(curve: &CurveCP3, seed: u64) -> CurveCP3 {
        let mut r = rng(seed);
        act_post(&random_sp2c(&mut r), &act_pre(&random_moebius(&mut r), curve))
    }

    /// Non-unitary Möbius maps move the second quartic singularity, so `a`
    /// is only recoverable up to unitary precomposition.
    fn scramble_quartic(curve: &CurveCP3, seed: u64) -> CurveCP3 {
        let mut r = rng(seed);
        act_post(&random_sp2c(&mut r), &act_pre(&random_su2(&mut r), curve))
    }

    #[test]
    fn lemma54_pattern_on_scrambles() {
        for (curve, invariant) in [
            (psi3(), true),
            (psi5_eta(2.0).unwrap(), true),
            (psi4_a(1.0).unwrap(), false),
        ] {
            let d = curve.degree();
            for seed in 0..5 {
                let input = scramble_unitary(&curve, seed);
                let res = reduce_lemma54(&input).unwrap();
                assert_eq!(res.g.kind(), GroupKind::Sp2);
                let f = res.canonical.coefficient_matrix();
                let scale = res.canonical.max_abs();
                let mut zeros = vec![(1, 0), (1, 1), (1, 2), (2, 0), (3, 0), (3, 1)];
                if invariant {
                    zeros.extend([(0, d - 2), (0, d - 1), (0, d), (2, d - 1), (2, d), (3, d)]);
                }
                for (i, j) in zeros {
                    assert!(f[(i, j)].norm() <= 1e-10 * scale, "({i}, {j}) seed {seed}");
                }
            }
        }
    }

    #[test]
    fn cubic_invariant_round_trip() {
        let res = reduce_degree3_invariant(&psi3()).unwrap();
        assert!(projective_distance(&res.canonical, &psi3()) < 1e-15);
        for seed in 0..10 {
            let res = reduce_degree3_invariant(&scramble_unitary(&psi3(), seed)).unwrap();
            assert_eq!(res.g.kind(), GroupKind::Sp2);
            assert_eq!(res.omega.kind(), crate::groups::MoebiusKind::Su2);
        }
        let s3 = 3f64.sqrt();
        let twisted = make_invariant(
            &CPoly::from_real(&[1.0]),
            &CPoly::new(vec![cx(0.0, 0.0), phase(0.7) * s3]),
            cx(-1.0, 0.0),
            3,
        )
        .unwrap();
        reduce_degree3_invariant(&twisted).unwrap();
        assert!(reduce_degree3_invariant(&bryant_canonical(1, 1).unwrap()).is_err());
    }

    #[test]
    fn quintic_invariant_round_trip() {
        for eta in [0.0, 1.0, 2.5] {
            let curve = psi5_eta(eta).unwrap();
            for seed in 0..5 {
                let res = reduce_degree5_invariant(&scramble_unitary(&curve, seed)).unwrap();
                let FamilyParams::Psi5Eta { eta: got, candidates } = res.params else {
                    panic!("wrong family")
                };
                assert!(got >= 0.0, "{got}");
                assert!(
                    candidates.iter().any(|e| (e - eta).abs() < 1e-6),
                    "η = {eta}: {candidates:?}"
                );
            }
        }
        let res = reduce_degree5_invariant(&psi5_m(2.0).unwrap()).unwrap();
        assert!(matches!(res.params, FamilyParams::Psi5Eta { .. }));
    }

    #[test]
    fn reduced_quintic_system_holds() {
        let input = scramble_unitary(&psi5_eta(1.0).unwrap(), 3);
        let (work, _) = quintic_at(&input, ordered_singular_points(&input).unwrap()[0]).unwrap();
        let p = Degree5ReducedParams::from_curve(&work.curve);
        assert!(p.system_residual() < 1e-10);
        assert!(p.q.im.abs() < 1e-10 && p.mu.im.abs() < 1e-10 && p.mu.re > 0.0);
    }

    #[test]
    fn cubic_full_round_trip() {
        let res = reduce_degree3_full(&bryant_canonical(1, 1).unwrap()).unwrap();
        assert_eq!(res.canonical, psi3());
        for seed in 0..10 {
            reduce_degree3_full(&scramble_full(&psi3(), seed)).unwrap();
        }
        let doubled = act_pre(&MoebiusMap::new(cx(2.0, 0.0), cx(0.0, 0.0), cx(0.0, 0.0), cx(1.0, 0.0)).unwrap(), &psi3());
        reduce_degree3_full(&doubled).unwrap();
    }

    #[test]
    fn quartic_full_round_trip() {
        for a in [0.0, 1.5] {
            let curve = psi4_a(a).unwrap();
            for seed in 0..5 {
                let res = reduce_degree4_full(&scramble_quartic(&curve, seed)).unwrap();
                let FamilyParams::Psi4A { a: got, candidates } = res.params else {
                    panic!("wrong family")
                };
                assert!(got >= 0.0, "{got}");
                assert!(candidates.iter().any(|x| (x - a).abs() < 1e-6), "a = {a}: {candidates:?}");
            }
        }
        let res = reduce_degree4_full(&bryant_canonical(1, 2).unwrap()).unwrap();
        assert!(matches!(res.params, FamilyParams::Psi4A { .. }));
    }

    #[test]
    fn preconditions() {
        assert!(matches!(
            reduce_degree3_full(&psi4_a(0.0).unwrap()),
            Err(Error::DegreeMismatch { expected: 3, found: 4 })
        ));
        assert!(matches!(
            reduce_degree5_invariant(&crate::canonical::families::psi5_2()),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn sign_symmetry_exchanges_eta() {
        let (g, w) = quintic_sign_symmetry();
        let flipped = act_post(&g, &act_pre(&w, &psi5_eta(1.3).unwrap()));
        assert!(projective_distance(&flipped, &psi5_eta(-1.3).unwrap()) < 1e-14);
    }
}

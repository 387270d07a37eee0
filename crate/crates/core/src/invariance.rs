//! Antipodal invariance: curves whose harmonic map factors through `RP²`.
//!
//! A curve is invariant when `f₂ = β·C(f₁)` and `f₄ = β·C(f₃)` for a unit
//! `β`, where `C` is [`CPoly::conj_antipodal`].

use num_complex::Complex64;
use rand::Rng;

use crate::canonical::families::{bryant_canonical, psi4_a};
use crate::cpoly::CPoly;
use crate::curve::{is_linearly_full, CurveCP3, FULL_TOL};
use crate::error::{Error, Result};
use crate::groups::{act_post, act_pre, random_sp2, MoebiusMap};

/// Relative residual below which a curve counts as invariant.
pub const INVARIANCE_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvarianceWitness {
    pub invariant: bool,
    /// Unit `β`, present iff `invariant`.
    pub beta: Option<Complex64>,
    pub residual: f64,
}

/// Source/target pairs of the four identities, with the sign on `β` folded
/// into the source: `f₂ = βC(f₁)`, `f₄ = βC(f₃)`, `f₁ = −βC(f₂)`, `f₃ = −βC(f₄)`.
fn identity_pairs(c: &CurveCP3) -> [(CPoly, &CPoly); 4] {
    let f = c.components();
    let neg = |p: &CPoly| -&p.conj_antipodal();
    [
        (f[0].conj_antipodal(), &f[1]),
        (f[2].conj_antipodal(), &f[3]),
        (neg(&f[1]), &f[0]),
        (neg(&f[3]), &f[2]),
    ]
}

fn fit_beta(pairs: &[(CPoly, &CPoly); 4]) -> Complex64 {
    let mut num = Complex64::new(0.0, 0.0);
    let mut den = 0.0;
    for (s, t) in pairs {
        for (a, b) in s.coeffs().iter().zip(t.coeffs()) {
            num += a.conj() * b;
            den += a.norm_sqr();
        }
    }
    if den == 0.0 {
        Complex64::new(0.0, 0.0)
    } else {
        num / den
    }
}

/// Relative deviation of each of the four identities for a given `β`.
pub fn identity_residuals(c: &CurveCP3, beta: Complex64) -> [f64; 4] {
    let scale = c.max_abs();
    identity_pairs(c).map(|(s, t)| {
        s.coeffs()
            .iter()
            .zip(t.coeffs())
            .map(|(a, b)| (b - beta * a).norm())
            .fold(0.0, f64::max)
            / scale
    })
}

/// Least-squares `β` over all four identities and the worst relative residual.
pub fn invariance_check(c: &CurveCP3) -> InvarianceWitness {
    let beta = fit_beta(&identity_pairs(c));
    let residual = identity_residuals(c, beta).into_iter().fold(0.0, f64::max);
    let invariant = residual <= INVARIANCE_TOL && beta.norm() > 0.0;
    InvarianceWitness {
        invariant,
        beta: invariant.then(|| beta / beta.norm()),
        residual,
    }
}

/// Rotates an invariant odd-degree curve so that its `β` becomes 1.
///
/// Precomposing with `z ↦ λz` turns `β` into `βλⁿ`, so `λ = e^{−i arg β / n}`.
pub fn normalize_beta(c: &CurveCP3, w: &InvarianceWitness) -> Result<(MoebiusMap, CurveCP3)> {
    let d = c.degree();
    if d % 2 == 0 {
        return Err(Error::Precondition(format!(
            "even degree {d} admits no invariant curve"
        )));
    }
    let beta = match (w.invariant, w.beta) {
        (true, Some(b)) => b,
        _ => return Err(Error::Precondition("curve is not invariant".into())),
    };
    let lambda = Complex64::from_polar(1.0, -beta.arg() / d as f64);
    let omega = MoebiusMap::rotation(lambda)?;
    Ok((omega, act_pre(&omega, c)))
}

/// `[f₁, βC(f₁), f₃, βC(f₃)]` at odd degree `d`.
pub fn make_invariant(f1: &CPoly, f3: &CPoly, beta: Complex64, d: usize) -> Result<CurveCP3> {
    if d % 2 == 0 {
        return Err(Error::Precondition(format!("degree must be odd, got {d}")));
    }
    if (beta.norm() - 1.0).abs() > 1e-10 {
        return Err(Error::Precondition(format!("|β| must be 1, got {}", beta.norm())));
    }
    for (name, f) in [("f1", f1), ("f3", f3)] {
        if f.actual_degree().is_some_and(|k| k > d) {
            return Err(Error::Precondition(format!("{name} has degree above {d}")));
        }
    }
    let f1 = f1.with_formal_degree(d);
    let f3 = f3.with_formal_degree(d);
    let f2 = f1.conj_antipodal().scale(beta);
    let f4 = f3.conj_antipodal().scale(beta);
    let curve = CurveCP3::new([f1, f2, f3, f4])
        .map_err(|e| Error::Construction(format!("invariant quadruple rejected: {e}")))?;
    if !is_linearly_full(&curve, FULL_TOL) {
        return Err(Error::Construction("invariant quadruple is not linearly full".into()));
    }
    Ok(curve)
}

/// Seed curve of even degree `n` for the obstruction demonstration.
pub fn obstruction_seed(n: usize) -> Result<CurveCP3> {
    if n % 2 == 1 || n < 4 {
        return Err(Error::Precondition(format!("need even n ≥ 4, got {n}")));
    }
    if n == 4 {
        psi4_a(1.0)
    } else {
        bryant_canonical(1, n - 2)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ObstructionTrial {
    pub residual: f64,
    pub invariant: bool,
    /// `max_i |a_iⁿ| / max |a|`: the leading coefficients the identities force to vanish.
    pub leading_mass: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ObstructionReport {
    pub degree: usize,
    pub trials: Vec<ObstructionTrial>,
    /// Chaining `a₁ⁿ = −βā₂⁰` with `a₂⁰ = (−1)ⁿβā₁ⁿ` gives
    /// `a₁ⁿ = −(−1)ⁿ|β|² a₁ⁿ`, so a nonzero leading column needs this value of `|β|²`.
    pub required_beta_sq: f64,
    pub min_residual: f64,
    pub all_fail: bool,
}

/// Scrambles `seed` by `trials` random `Sp(2)` elements and runs the
/// invariance check on each result.
pub fn obstruction_report(seed: &CurveCP3, trials: usize, rng: &mut impl Rng) -> Result<ObstructionReport> {
    let n = seed.degree();
    if n % 2 == 1 {
        return Err(Error::Precondition(format!("need even degree, got {n}")));
    }
    let trials: Vec<_> = (0..trials)
        .map(|_| {
            let c = act_post(&random_sp2(rng), seed);
            let w = invariance_check(&c);
            let leading = (0..4).map(|i| c.component(i).coeff(n).norm()).fold(0.0, f64::max);
            ObstructionTrial {
                residual: w.residual,
                invariant: w.invariant,
                leading_mass: leading / c.max_abs(),
            }
        })
        .collect();
    let min_residual = trials.iter().map(|t| t.residual).fold(f64::INFINITY, f64::min);
    Ok(ObstructionReport {
        degree: n,
        all_fail: trials.iter().all(|t| !t.invariant),
        required_beta_sq: -(if n % 2 == 0 { 1.0 } else { -1.0 }),
        min_residual,
        trials,
    })
}

/// [`obstruction_report`] on the standard seed of degree `n`.
pub fn even_degree_obstruction_demo(n: usize, trials: usize, rng: &mut impl Rng) -> Result<ObstructionReport> {
    obstruction_report(&obstruction_seed(n)?, trials, rng)
}

//! The twistor fibration `CP³ → S⁴` and antiholomorphic lifts.
//!
//! A point `[z1, z2, z3, z4]` goes to the quaternionic line
//! `[z1 + z2 j, z3 + z4 j]` and then to `S⁴ ⊂ H ⊕ R` by
//! `[q1, q2] ↦ (2 q̄1 q2, |q1|² − |q2|²) / (|q1|² + |q2|²)`.
//! The quaternion `a + bi + cj + dk` is realified as `(a, b, c, d)`.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::curve::CurveCP3;
use crate::error::{Error, Result};
use crate::groups::Vec4;

/// A point of the unit sphere in `R⁵`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct S4Point(pub [f64; 5]);

impl S4Point {
    pub fn coords(&self) -> &[f64; 5] {
        &self.0
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// Euclidean (chordal) distance in `R⁵`.
    pub fn distance(&self, other: &S4Point) -> f64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quaternion {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Quaternion {
    pub fn new(w: f64, x: f64, y: f64, z: f64) -> Self {
        Self { w, x, y, z }
    }

    /// `a + b j` for complex `a, b`.
    pub fn from_pair(a: Complex64, b: Complex64) -> Self {
        Self::new(a.re, a.im, b.re, b.im)
    }

    pub fn conj(&self) -> Self {
        Self::new(self.w, -self.x, -self.y, -self.z)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new(self.w * s, self.x * s, self.y * s, self.z * s)
    }
}

impl Mul for Quaternion {
    type Output = Quaternion;
    fn mul(self, q: Quaternion) -> Quaternion {
        let p = self;
        Quaternion::new(
            p.w * q.w - p.x * q.x - p.y * q.y - p.z * q.z,
            p.w * q.x + p.x * q.w + p.y * q.z - p.z * q.y,
            p.w * q.y - p.x * q.z + p.y * q.w + p.z * q.x,
            p.w * q.z + p.x * q.y - p.y * q.x + p.z * q.w,
        )
    }
}

impl Add for Quaternion {
    type Output = Quaternion;
    fn add(self, q: Quaternion) -> Quaternion {
        Quaternion::new(self.w + q.w, self.x + q.x, self.y + q.y, self.z + q.z)
    }
}

impl Sub for Quaternion {
    type Output = Quaternion;
    fn sub(self, q: Quaternion) -> Quaternion {
        Quaternion::new(self.w - q.w, self.x - q.x, self.y - q.y, self.z - q.z)
    }
}

fn nonzero_norm(z: &Vec4) -> Result<f64> {
    let n = z.norm_squared();
    if n == 0.0 {
        return Err(Error::Degenerate("cannot project the zero vector".into()));
    }
    Ok(n)
}

/// The closed formula for `π([z])`.
pub fn project(z: &Vec4) -> Result<S4Point> {
    let n = nonzero_norm(z)?;
    let (z1, z2, z3, z4) = (z[0], z[1], z[2], z[3]);
    let a = (z1.conj() * z3 + z2 * z4.conj()) * 2.0 / n;
    let b = (z1.conj() * z4 - z2 * z3.conj()) * 2.0 / n;
    let h = (z1.norm_sqr() + z2.norm_sqr() - z3.norm_sqr() - z4.norm_sqr()) / n;
    Ok(S4Point([a.re, a.im, b.re, b.im, h]))
}

/// `π([z])` computed through quaternion arithmetic.
pub fn project_via_hopf(z: &Vec4) -> Result<S4Point> {
    nonzero_norm(z)?;
    let q1 = Quaternion::from_pair(z[0], z[1]);
    let q2 = Quaternion::from_pair(z[2], z[3]);
    let n = q1.norm_sqr() + q2.norm_sqr();
    let v = (q1.conj() * q2).scale(2.0 / n);
    Ok(S4Point([
        v.w,
        v.x,
        v.y,
        v.z,
        (q1.norm_sqr() - q2.norm_sqr()) / n,
    ]))
}

/// The harmonic map `z ↦ π(ψ(z))`.
pub fn harmonic_map(c: &CurveCP3, z: Complex64) -> Result<S4Point> {
    project(&Vec4::from(c.eval(z)))
}

/// An antiholomorphic curve `z ↦ [conj(g(z))]` stored through its
/// holomorphic polynomials `g`.
#[derive(Debug, Clone, PartialEq)]
pub struct AntiholomorphicCurve {
    conjugate: CurveCP3,
}

impl AntiholomorphicCurve {
    /// The polynomials `g` whose conjugates give the curve.
    pub fn polynomials(&self) -> &CurveCP3 {
        &self.conjugate
    }

    pub fn eval(&self, z: Complex64) -> Vec4 {
        Vec4::from(self.conjugate.eval(z)).map(|x| x.conj())
    }

    pub fn harmonic_map(&self, z: Complex64) -> Result<S4Point> {
        project(&self.eval(z))
    }

    /// Lifting again: `[conj(g)] J` conjugated back to `g J`, which is
    /// `−f` for the curve this came from.
    pub fn lift(&self) -> CurveCP3 {
        swap_pairs(&self.conjugate)
    }
}

fn swap_pairs(c: &CurveCP3) -> CurveCP3 {
    let [f1, f2, f3, f4] = c.components();
    CurveCP3::new_unchecked([f2.clone(), -f1, f4.clone(), -f3]).expect("same formal degree")
}

/// `ψ̂ = ψ̄ J = [f̄2, −f̄1, f̄4, −f̄3]`, projecting to the same harmonic map.
pub fn antiholomorphic_lift(c: &CurveCP3) -> AntiholomorphicCurve {
    AntiholomorphicCurve {
        conjugate: swap_pairs(c),
    }
}

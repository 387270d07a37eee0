//! Canonical curves and parametric families.

use num_complex::Complex64;

use crate::cpoly::CPoly;
use crate::curve::CurveCP3;
use crate::error::{Error, Result};

const CONSTRAINT_TOL: f64 = 1e-10;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Builds a curve from `(row, power, coefficient)` entries.
fn sparse(d: usize, entries: &[(usize, usize, Complex64)]) -> Result<CurveCP3> {
    let mut rows: [Vec<Complex64>; 4] = std::array::from_fn(|_| vec![c(0.0, 0.0); d + 1]);
    for &(i, k, v) in entries {
        rows[i][k] += v;
    }
    CurveCP3::new(rows.map(CPoly::new))
}

fn real(x: f64) -> Complex64 {
    c(x, 0.0)
}

/// `[1, −z³, √3 z, √3 z²]`.
pub fn psi3() -> CurveCP3 {
    let s3 = 3f64.sqrt();
    sparse(
        3,
        &[(0, 0, real(1.0)), (1, 3, real(-1.0)), (2, 1, real(s3)), (3, 2, real(s3))],
    )
    .expect("valid curve")
}

/// `(q, μ)` for the invariant quintic with parameter `η`.
pub fn psi5_eta_coefficients(eta: f64) -> (f64, f64) {
    let s = ((eta * eta + 5.0) / (eta * eta + 4.0)).sqrt();
    let r3 = 3f64.sqrt();
    (eta / r3 * s, 2.0 / r3 * s)
}

/// `[1 + qz, −qz⁴ + z⁵, μz + ηz², ηz³ − μz⁴]`.
pub fn psi5_eta(eta: f64) -> Result<CurveCP3> {
    if !eta.is_finite() {
        return Err(Error::Domain(format!("eta must be finite, got {eta}")));
    }
    let (q, mu) = psi5_eta_coefficients(eta);
    sparse(
        5,
        &[
            (0, 0, real(1.0)),
            (0, 1, real(q)),
            (1, 4, real(-q)),
            (1, 5, real(1.0)),
            (2, 1, real(mu)),
            (2, 2, real(eta)),
            (3, 3, real(eta)),
            (3, 4, real(-mu)),
        ],
    )
}

/// Smallest admissible `|m|` for [`psi5_m`].
pub fn psi5_m_threshold() -> f64 {
    (5.0f64 / 3.0).sqrt()
}

/// `(n, p)` for the bubbling family, or a domain error for `|m| < √(5/3)`.
pub fn psi5_m_coefficients(m: f64) -> Result<(f64, f64)> {
    if !m.is_finite() {
        return Err(Error::Domain(format!("m must be finite, got {m}")));
    }
    let num = 3.0 * m * m - 5.0;
    if num < -1e-12 {
        return Err(Error::Domain(format!(
            "|m| must be at least sqrt(5/3), got {m}"
        )));
    }
    let n = 3.0 * (num.max(0.0) / (m * m + 9.0)).sqrt();
    Ok((n, n * m / 3.0))
}

/// `[1 + pz², pz³ + z⁵, mz + nz³, −nz² − mz⁴]`.
pub fn psi5_m(m: f64) -> Result<CurveCP3> {
    let (n, p) = psi5_m_coefficients(m)?;
    sparse(
        5,
        &[
            (0, 0, real(1.0)),
            (0, 2, real(p)),
            (1, 3, real(p)),
            (1, 5, real(1.0)),
            (2, 1, real(m)),
            (2, 3, real(n)),
            (3, 2, real(-n)),
            (3, 4, real(-m)),
        ],
    )
}

/// `[z, z², 1/√3, −z³/√3]`, the `m → ∞` limit of [`psi5_m`].
pub fn psi5_m_limit() -> CurveCP3 {
    let k = 1.0 / 3f64.sqrt();
    sparse(
        3,
        &[(0, 1, real(1.0)), (1, 2, real(1.0)), (2, 0, real(k)), (3, 3, real(-k))],
    )
    .expect("valid curve")
}

/// `[1 + az, −z⁴, √2 z (1 + 3az/2), √2 z³]`.
pub fn psi4_a(a: f64) -> Result<CurveCP3> {
    if !a.is_finite() {
        return Err(Error::Domain(format!("a must be finite, got {a}")));
    }
    let s2 = 2f64.sqrt();
    sparse(
        4,
        &[
            (0, 0, real(1.0)),
            (0, 1, real(a)),
            (1, 4, real(-1.0)),
            (2, 1, real(s2)),
            (2, 2, real(1.5 * a * s2)),
            (3, 3, real(s2)),
        ],
    )
}

/// `[1, z⁵, 2z², −(5/2)z³]`.
pub fn psi5_1() -> CurveCP3 {
    sparse(
        5,
        &[(0, 0, real(1.0)), (1, 5, real(1.0)), (2, 2, real(2.0)), (3, 3, real(-2.5))],
    )
    .expect("valid curve")
}

/// `[1, z⁵, z, −(5/3)z⁴]`.
pub fn psi5_2() -> CurveCP3 {
    sparse(
        5,
        &[(0, 0, real(1.0)), (1, 5, real(1.0)), (2, 1, real(1.0)), (3, 4, real(-5.0 / 3.0))],
    )
    .expect("valid curve")
}

/// `[1, k2 z^d, −d z^k1, z^(k1+k2)]` with `d = 2k1 + k2`.
pub fn bryant_canonical(k1: usize, k2: usize) -> Result<CurveCP3> {
    if k1 == 0 || k2 == 0 {
        return Err(Error::Domain(format!(
            "k1 and k2 must be positive, got ({k1}, {k2})"
        )));
    }
    let d = 2 * k1 + k2;
    sparse(
        d,
        &[
            (0, 0, real(1.0)),
            (1, d, real(k2 as f64)),
            (2, k1, real(-(d as f64))),
            (3, k1 + k2, real(1.0)),
        ],
    )
}

/// Parameters of `[1 + az, (h + z)z⁴, (r + lz)z, (m + sz)z³]` subject to
/// `2a + ls = 0`, `5 + 3ah + lm + 3rs = 0`, `2h + rm = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Psi5GeneralParams {
    pub a: Complex64,
    pub h: Complex64,
    pub r: Complex64,
    pub l: Complex64,
    pub m: Complex64,
    pub s: Complex64,
}

impl Psi5GeneralParams {
    pub fn new(
        a: Complex64,
        h: Complex64,
        r: Complex64,
        l: Complex64,
        m: Complex64,
        s: Complex64,
    ) -> Result<Self> {
        let p = Self { a, h, r, l, m, s };
        let worst = p.constraint_residuals().iter().map(|x| x.norm()).fold(0.0, f64::max);
        if worst > CONSTRAINT_TOL * p.scale() {
            return Err(Error::Construction(format!(
                "quintic constraints violated (largest residual {worst:e})"
            )));
        }
        Ok(p)
    }

    pub fn from_real(a: f64, h: f64, r: f64, l: f64, m: f64, s: f64) -> Result<Self> {
        Self::new(real(a), real(h), real(r), real(l), real(m), real(s))
    }

    /// Solves the constraints for `(s, a, h)` given `(r, l, m)`.
    pub fn from_rlm(r: Complex64, l: Complex64, m: Complex64) -> Result<Self> {
        let k = 1.0 + l * m / 4.0;
        if r.norm() < 1e-12 || k.norm() < 1e-12 {
            return Err(Error::Domain(format!(
                "no quintic with r = {r}, lm = {} (need r != 0 and lm != -4)",
                l * m
            )));
        }
        let s = -(5.0 + l * m) / (3.0 * r * k);
        Self::new(-l * s / 2.0, -r * m / 2.0, r, l, m, s)
    }

    /// `(a, h, r, l, m, s) = (1, 2, 1, 2, −4, −1)`.
    pub fn psi5_tilde_0() -> Self {
        Self::from_real(1.0, 2.0, 1.0, 2.0, -4.0, -1.0).expect("constraints hold")
    }

    pub fn constraint_residuals(&self) -> [Complex64; 3] {
        let Self { a, h, r, l, m, s } = *self;
        [
            2.0 * a + l * s,
            5.0 + 3.0 * a * h + l * m + 3.0 * r * s,
            2.0 * h + r * m,
        ]
    }

    fn scale(&self) -> f64 {
        let m = [self.a, self.h, self.r, self.l, self.m, self.s]
            .iter()
            .map(|x| x.norm())
            .fold(1.0, f64::max);
        m * m
    }

    /// `ah = 1`, `rs = lm = −2`, `hl = r`: the quadruple acquires the common
    /// factor `1 + z` and the degree drops to 4.
    pub fn on_degeneration_locus(&self, tol: f64) -> bool {
        let Self { a, h, r, l, m, s } = *self;
        (a * h - 1.0).norm() <= tol
            && (r * s + 2.0).norm() <= tol
            && (l * m + 2.0).norm() <= tol
            && (h * l - r).norm() <= tol
    }
}

/// The general quintic for admissible parameters.
pub fn psi5_general(p: &Psi5GeneralParams) -> Result<CurveCP3> {
    let p = Psi5GeneralParams::new(p.a, p.h, p.r, p.l, p.m, p.s)?;
    if p.on_degeneration_locus(1e-9) {
        return Err(Error::Degenerate(
            "parameters lie on the degeneration locus; the degree drops to 4".into(),
        ));
    }
    sparse(
        5,
        &[
            (0, 0, real(1.0)),
            (0, 1, p.a),
            (1, 4, p.h),
            (1, 5, real(1.0)),
            (2, 1, p.r),
            (2, 2, p.l),
            (3, 3, p.m),
            (3, 4, p.s),
        ],
    )
}

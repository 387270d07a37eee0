//! Induced metric of the harmonic map, its conformal factor, areas and the
//! bubbling of the `Ψ⁵_m` family.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::canonical::families::{psi5_m, psi5_m_coefficients, psi5_m_threshold};
use crate::curve::{is_linearly_full, CurveCP3, FULL_TOL};
use crate::error::{Error, Result};
pub use crate::quadrature::{AreaResult, QuadSpec};
use crate::quadrature::adaptive_polar_integral;

/// Evaluates `f` and `f'` together by Horner's rule.
struct Density {
    coeffs: [Vec<Complex64>; 4],
}

impl Density {
    fn new(c: &CurveCP3) -> Self {
        Self {
            coeffs: std::array::from_fn(|i| c.component(i).coeffs().to_vec()),
        }
    }

    fn at(&self, z: Complex64) -> f64 {
        let zero = Complex64::new(0.0, 0.0);
        let (mut ff, mut dd, mut fd) = (0.0, 0.0, zero);
        for a in &self.coeffs {
            let (mut f, mut df) = (zero, zero);
            for &c in a.iter().rev() {
                df = df * z + f;
                f = f * z + c;
            }
            ff += f.norm_sqr();
            dd += df.norm_sqr();
            fd += f.conj() * df;
        }
        4.0 * (ff * dd - fd.norm_sqr()) / (ff * ff)
    }
}

/// `4(|f|²|f'|² − |⟨f, f'⟩|²)/|f|⁴`, the pullback of the Fubini-Study
/// metric against `dx² + dy²`.
pub fn fs_density(c: &CurveCP3, z: Complex64) -> f64 {
    Density::new(c).at(z)
}

/// Ratio of the induced metric to the round metric `4|dz|²/(1 + |z|²)²`.
pub fn conformal_factor(c: &CurveCP3, z: Complex64) -> f64 {
    let s = 1.0 + z.norm_sqr();
    fs_density(c, z) * s * s / 4.0
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConformalSample {
    pub z: Complex64,
    pub h: f64,
}

pub fn conformal_samples(c: &CurveCP3, zs: &[Complex64]) -> Vec<ConformalSample> {
    zs.iter()
        .map(|&z| ConformalSample {
            z,
            h: conformal_factor(c, z),
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    Sphere,
    UnitDisk,
}

/// Induced area, normalized so the round sphere has area `4π`. The sphere
/// is the unit disk of the `z` chart plus that of the `1/z` chart.
pub fn induced_area(c: &CurveCP3, region: Region, spec: &QuadSpec) -> Result<AreaResult> {
    if !is_linearly_full(c, FULL_TOL) {
        return Err(Error::Precondition("curve is not linearly full".into()));
    }
    let inner_density = Density::new(c);
    let inner = adaptive_polar_integral(&|z| inner_density.at(z), 0.0, 1.0, spec)?;
    match region {
        Region::UnitDisk => Ok(inner),
        Region::Sphere => {
            let rev = Density::new(&c.reversed());
            let outer = adaptive_polar_integral(&|z| rev.at(z), 0.0, 1.0, spec)?;
            Ok(AreaResult {
                value: inner.value + outer.value,
                estimated_error: inner.estimated_error + outer.estimated_error,
                nodes: inner.nodes + outer.nodes,
            })
        }
    }
}

/// `2pr²cos2φ + r⁴ + (m² − 3)r² + 1`, the factor with `|Ψ⁵_m|² = (1 + r²)³ w_m`.
pub fn w_m(m: f64, r: f64, phi: f64) -> Result<f64> {
    let (_, p) = psi5_m_coefficients(m)?;
    let r2 = r * r;
    Ok(2.0 * p * r2 * (2.0 * phi).cos() + r2 * r2 + (m * m - 3.0) * r2 + 1.0)
}

/// The right-hand side `4π/(m² − 2p − 2)` of the annulus estimate.
pub fn annulus_bound(m: f64) -> Result<f64> {
    let (_, p) = psi5_m_coefficients(m)?;
    Ok(4.0 * PI / (m * m - 2.0 * p - 2.0))
}

fn bubble_levels(m: f64) -> usize {
    10 + m.abs().max(1.0).log2().ceil() as usize
}

/// `∫_{1/m<|z|<1} (h_m − 3) dA`, the mass of the non-constant part of the
/// conformal factor of `Ψ⁵_m` away from the bubble.
pub fn annulus_mass(m: f64, spec: &QuadSpec) -> Result<AreaResult> {
    if !(m >= 2.0) {
        return Err(Error::Precondition(format!("need m ≥ 2, got {m}")));
    }
    let density = Density::new(&psi5_m(m)?);
    let f = |z: Complex64| {
        let s = 1.0 + z.norm_sqr();
        density.at(z) - 12.0 / (s * s)
    };
    adaptive_polar_integral(&f, 1.0 / m, 1.0, &spec.with_levels(spec.levels.max(bubble_levels(m) - 6)))
}

/// Induced area of `|z| < ε` for `Ψ⁵_m`.
pub fn bubble_profile(m: f64, eps: f64, spec: &QuadSpec) -> Result<AreaResult> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::Domain(format!("ε must lie in (0, 1], got {eps}")));
    }
    if !(m.abs() >= psi5_m_threshold()) {
        return Err(Error::Domain(format!("|m| must be at least √(5/3), got {m}")));
    }
    let density = Density::new(&psi5_m(m)?);
    adaptive_polar_integral(&|z| density.at(z), 0.0, eps, &spec.with_levels(spec.levels.max(bubble_levels(m))))
}

/// `4π + 3·4πε²/(1 + ε²)`: the weak limit of [`bubble_profile`] as `m → ∞`.
pub fn bubble_limit(eps: f64) -> f64 {
    4.0 * PI + 3.0 * 4.0 * PI * eps * eps / (1.0 + eps * eps)
}

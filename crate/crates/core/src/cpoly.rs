//! Dense complex polynomials with a fixed formal degree.
//!
//! Every curve component, horizontality residual and singularity polynomial
//! is a [`CPoly`]. Coefficients are stored lowest power first, and the
//! formal degree is the length of the coefficient vector minus one; the
//! actual degree is found by thresholding against the largest coefficient.

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, Schur};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Relative threshold below which a coefficient does not count toward the
/// actual degree.
pub const DEGREE_TOL: f64 = 1e-12;

/// Absolute radius (scaled by `1 + |z|`) inside which computed roots are
/// merged into one root of higher multiplicity.
pub const CLUSTER_TOL: f64 = 1e-6;

/// Radius used to gather candidate clusters before they are validated.
const LOOSE_CLUSTER_TOL: f64 = 1e-3;

const POLISH_STEPS: usize = 6;
const SCHUR_MAX_ITER: usize = 10_000;
/// Variable shifts tried in turn when the QR iteration stalls on a symmetric companion matrix.
const SCHUR_SHIFTS: [(f64, f64); 4] = [(0.0, 0.0), (0.1234, 0.0567), (-0.2171, 0.1414), (0.0, -0.3162)];

#[derive(Debug, Clone, PartialEq)]
pub struct CPoly {
    coeffs: Vec<Complex64>,
}

/// A root together with its multiplicity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub value: Complex64,
    pub multiplicity: usize,
}

impl CPoly {
    /// Builds a polynomial from coefficients, lowest power first. An empty
    /// vector is read as the zero constant.
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        if coeffs.is_empty() {
            return Self::zero(0);
        }
        Self { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    /// The zero polynomial of formal degree `n`.
    pub fn zero(n: usize) -> Self {
        Self {
            coeffs: vec![Complex64::new(0.0, 0.0); n + 1],
        }
    }

    /// `c * z^k` as a polynomial of formal degree `n`.
    pub fn monomial(c: Complex64, k: usize, n: usize) -> Self {
        let mut p = Self::zero(n.max(k));
        p.coeffs[k] = c;
        p
    }

    pub fn formal_degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeff(&self, j: usize) -> Complex64 {
        self.coeffs.get(j).copied().unwrap_or_default()
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Largest index whose coefficient exceeds `DEGREE_TOL` times the largest
    /// coefficient magnitude; `None` for the zero polynomial.
    pub fn actual_degree(&self) -> Option<usize> {
        let scale = self.max_abs();
        if scale == 0.0 {
            return None;
        }
        self.coeffs
            .iter()
            .rposition(|c| c.norm() > DEGREE_TOL * scale)
    }

    pub fn is_zero(&self) -> bool {
        self.max_abs() == 0.0
    }

    /// Horner evaluation.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// Sum of `|a_k| |z|^k`, the magnitude against which `eval` rounds.
    pub fn eval_scale(&self, z: Complex64) -> f64 {
        let r = z.norm();
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * r + c.norm())
    }

    /// Whether `z` is a root to within `tol` relative to [`Self::eval_scale`].
    pub fn vanishes_at(&self, z: Complex64, tol: f64) -> bool {
        self.eval(z).norm() <= tol * self.eval_scale(z)
    }

    /// Formal derivative; formal degree drops by one (stays 0 for constants).
    pub fn derivative(&self) -> Self {
        let n = self.formal_degree();
        if n == 0 {
            return Self::zero(0);
        }
        Self {
            coeffs: (1..=n).map(|j| self.coeffs[j] * j as f64).collect(),
        }
    }

    pub fn nth_derivative(&self, k: usize) -> Self {
        (0..k).fold(self.clone(), |p, _| p.derivative())
    }

    /// Same polynomial viewed at a larger formal degree. Never truncates.
    pub fn with_formal_degree(&self, n: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        if coeffs.len() < n + 1 {
            coeffs.resize(n + 1, Complex64::new(0.0, 0.0));
        }
        Self { coeffs }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|&a| a * c).collect(),
        }
    }

    pub fn map_coeffs(&self, f: impl Fn(usize, Complex64) -> Complex64) -> Self {
        Self {
            coeffs: self.coeffs.iter().enumerate().map(|(j, &a)| f(j, a)).collect(),
        }
    }

    /// `z^n f(1/z)` at the formal degree `n`: the coefficient vector reversed.
    pub fn reversed(&self) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.reverse();
        Self { coeffs }
    }

    /// Coefficients of `u -> f(p + u)`.
    pub fn taylor_shift(&self, p: Complex64) -> Self {
        let mut c = self.coeffs.clone();
        let n = c.len() - 1;
        for i in 0..n {
            for j in (i..n).rev() {
                let hi = c[j + 1];
                c[j] += p * hi;
            }
        }
        Self { coeffs: c }
    }

    /// Coefficient-wise absolute values; products and sums of these bound
    /// the rounding magnitude of the corresponding exact expressions.
    pub fn abs_coeffs(&self) -> Self {
        self.map_coeffs(|_, a| Complex64::new(a.norm(), 0.0))
    }

    /// The conjugate-antipodal transform: `b_j = (-1)^(n-j) conj(a_(n-j))`,
    /// which is `conj(z̄^n f(-1/z̄))` written as a polynomial in `z`.
    pub fn conj_antipodal(&self) -> Self {
        let n = self.formal_degree();
        Self {
            coeffs: (0..=n)
                .map(|j| {
                    let a = self.coeffs[n - j].conj();
                    if (n - j) % 2 == 0 {
                        a
                    } else {
                        -a
                    }
                })
                .collect(),
        }
    }

    /// All roots with multiplicities, from companion-matrix eigenvalues.
    ///
    /// Eigenvalues are gathered into candidate clusters, each cluster is
    /// accepted as one multiple root if its spread is compatible with the
    /// rounding split of a root of that multiplicity, and the representative
    /// is polished by Newton steps on the `(m-1)`-th derivative. Exactly
    /// vanishing low coefficients give an exact root at 0.
    pub fn roots(&self) -> Result<Vec<Root>> {
        let n = self
            .actual_degree()
            .ok_or_else(|| Error::Degenerate("zero polynomial has no isolated roots".into()))?;
        if n == 0 {
            return Err(Error::Degenerate(
                "nonzero constant polynomial has no roots".into(),
            ));
        }
        let low = self.coeffs.iter().take_while(|a| **a == Complex64::new(0.0, 0.0)).count();
        if low > 0 {
            let mut roots = vec![Root {
                value: Complex64::new(0.0, 0.0),
                multiplicity: low,
            }];
            if low < n {
                roots.extend(Self::new(self.coeffs[low..=n].to_vec()).roots()?);
            }
            return Ok(roots);
        }
        let trimmed = Self::new(self.coeffs[..=n].to_vec());
        let mut raw = None;
        for shift in SCHUR_SHIFTS {
            let shift = Complex64::new(shift.0, shift.1);
            if let Some(eig) = trimmed.taylor_shift(shift).companion_eigenvalues() {
                raw = Some(eig.into_iter().map(|w| w + shift).collect::<Vec<_>>());
                break;
            }
        }
        let raw = raw.ok_or_else(|| Error::Consistency("companion eigenvalue solver failed".into()))?;

        let mut roots: Vec<Root> = cluster(&raw)
            .into_iter()
            .map(|group| {
                let m = group.len();
                let centre = group.iter().sum::<Complex64>() / m as f64;
                let spread = group.iter().map(|r| (r - centre).norm()).fold(0.0, f64::max);
                Root {
                    value: trimmed.polish(centre, m, spread),
                    multiplicity: m,
                }
            })
            .collect();
        roots.sort_by(|a, b| {
            a.value
                .norm()
                .total_cmp(&b.value.norm())
                .then(a.value.arg().total_cmp(&b.value.arg()))
        });
        Ok(roots)
    }

    /// Eigenvalues of the companion matrix of a polynomial with nonzero top
    /// coefficient, or `None` when the QR iteration does not converge.
    fn companion_eigenvalues(&self) -> Option<Vec<Complex64>> {
        let n = self.formal_degree();
        let lead = self.coeffs[n];
        let mut companion = DMatrix::<Complex64>::zeros(n, n);
        for i in 1..n {
            companion[(i, i - 1)] = Complex64::new(1.0, 0.0);
        }
        for i in 0..n {
            companion[(i, n - 1)] = -self.coeffs[i] / lead;
        }
        let schur = Schur::try_new(companion, f64::EPSILON, SCHUR_MAX_ITER)?;
        Some(schur.eigenvalues()?.iter().copied().collect())
    }

    fn polish(&self, start: Complex64, multiplicity: usize, spread: f64) -> Complex64 {
        let h = self.nth_derivative(multiplicity - 1);
        let dh = h.derivative();
        let radius = (10.0 * spread).max(CLUSTER_TOL * (1.0 + start.norm()));
        let mut z = start;
        let mut hz = h.eval(z).norm();
        for _ in 0..POLISH_STEPS {
            let d = dh.eval(z);
            if d.norm() == 0.0 || hz == 0.0 {
                break;
            }
            let next = z - h.eval(z) / d;
            let hn = h.eval(next).norm();
            if hn >= hz || (next - start).norm() > radius {
                break;
            }
            z = next;
            hz = hn;
        }
        z
    }
}

fn multiple_root_radius(multiplicity: usize) -> f64 {
    CLUSTER_TOL.max(10.0 * f64::EPSILON.powf(1.0 / multiplicity as f64))
}

fn single_linkage(points: &[Complex64], tol: f64) -> Vec<Vec<Complex64>> {
    let n = points.len();
    let mut label: Vec<usize> = (0..n).collect();
    fn find(label: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while label[r] != r {
            r = label[r];
        }
        label[i] = r;
        r
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let radius = tol * (1.0 + points[i].norm().max(points[j].norm()));
            if (points[i] - points[j]).norm() <= radius {
                let (a, b) = (find(&mut label, i), find(&mut label, j));
                if a != b {
                    label[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut groups: Vec<(usize, Vec<Complex64>)> = Vec::new();
    for (i, p) in points.iter().enumerate() {
        let r = find(&mut label, i);
        match groups.iter_mut().find(|(k, _)| *k == r) {
            Some((_, g)) => g.push(*p),
            None => groups.push((r, vec![*p])),
        }
    }
    groups.into_iter().map(|(_, g)| g).collect()
}

fn cluster(raw: &[Complex64]) -> Vec<Vec<Complex64>> {
    let mut out = Vec::new();
    for group in single_linkage(raw, LOOSE_CLUSTER_TOL) {
        if group.len() == 1 {
            out.push(group);
            continue;
        }
        let centre = group.iter().sum::<Complex64>() / group.len() as f64;
        let spread = group.iter().map(|r| (r - centre).norm()).fold(0.0, f64::max);
        if spread <= multiple_root_radius(group.len()) * (1.0 + centre.norm()) {
            out.push(group);
        } else {
            out.extend(single_linkage(&group, CLUSTER_TOL));
        }
    }
    out
}

/// `f'g - fg'` for polynomials of equal formal degree `n`; the result has
/// formal degree `2n - 1` and its top coefficient is exactly zero.
pub fn wronskian2(f: &CPoly, g: &CPoly) -> Result<CPoly> {
    let n = f.formal_degree();
    if g.formal_degree() != n {
        return Err(Error::DegreeMismatch {
            expected: n,
            found: g.formal_degree(),
        });
    }
    if n == 0 {
        return Ok(CPoly::zero(0));
    }
    let mut out = vec![Complex64::new(0.0, 0.0); 2 * n];
    // pair (i, j) with (j, i) so that wronskian2(f, f) cancels exactly
    for i in 0..=n {
        for j in (i + 1)..=n {
            let cross = f.coeffs[j] * g.coeffs[i] - f.coeffs[i] * g.coeffs[j];
            out[i + j - 1] += cross * (j - i) as f64;
        }
    }
    out[2 * n - 1] = Complex64::new(0.0, 0.0);
    Ok(CPoly::new(out))
}

/// True iff the polynomials share no common root.
///
/// Roots of the lowest-degree nonzero member are tested against evaluations
/// of the other members; identically zero members impose no condition.
pub fn coprime(fs: &[CPoly]) -> Result<bool> {
    let nonzero: Vec<(&CPoly, usize)> = fs
        .iter()
        .filter_map(|f| f.actual_degree().map(|d| (f, d)))
        .collect();
    let Some(&(pivot, degree)) = nonzero.iter().min_by_key(|(_, d)| *d) else {
        return Err(Error::Degenerate(
            "coprimality of all-zero polynomials is undefined".into(),
        ));
    };
    if degree == 0 {
        return Ok(true);
    }
    for root in pivot.roots()? {
        if nonzero
            .iter()
            .all(|(g, _)| g.vanishes_at(root.value, CLUSTER_TOL))
        {
            return Ok(false);
        }
    }
    Ok(true)
}

impl Add for &CPoly {
    type Output = CPoly;
    fn add(self, rhs: &CPoly) -> CPoly {
        let n = self.formal_degree().max(rhs.formal_degree());
        CPoly {
            coeffs: (0..=n).map(|j| self.coeff(j) + rhs.coeff(j)).collect(),
        }
    }
}

impl Sub for &CPoly {
    type Output = CPoly;
    fn sub(self, rhs: &CPoly) -> CPoly {
        let n = self.formal_degree().max(rhs.formal_degree());
        CPoly {
            coeffs: (0..=n).map(|j| self.coeff(j) - rhs.coeff(j)).collect(),
        }
    }
}

impl Mul for &CPoly {
    type Output = CPoly;
    fn mul(self, rhs: &CPoly) -> CPoly {
        let mut out = vec![Complex64::new(0.0, 0.0); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        CPoly { coeffs: out }
    }
}

impl Neg for &CPoly {
    type Output = CPoly;
    fn neg(self) -> CPoly {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

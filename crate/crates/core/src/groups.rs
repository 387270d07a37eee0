//! Symplectic and Möbius group elements and their actions on curves.
//!
//! `Sp(2, C)` acts on the left of the coefficient matrix; Möbius maps act
//! by precomposition, which becomes right multiplication by a
//! `(d+1) × (d+1)` matrix built from binomial expansions.

use nalgebra::{DMatrix, Matrix2, Matrix4, Vector4};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::cpoly::CPoly;
use crate::curve::{CurveCP3, Point};
use crate::error::{Error, Result};

pub type Mat4 = Matrix4<Complex64>;
pub type Vec4 = Vector4<Complex64>;

/// Tolerance for the symplectic, unitary and orthogonality checks.
pub const GROUP_TOL: f64 = 1e-10;

const SEED_MIN_NORM: f64 = 0.1;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn one() -> Complex64 {
    c(1.0, 0.0)
}

fn zero() -> Complex64 {
    c(0.0, 0.0)
}

/// The real matrix pairing `(z1, z2)` and `(z3, z4)`.
pub fn j_matrix() -> Mat4 {
    let mut j = Mat4::zeros();
    j[(0, 1)] = -one();
    j[(1, 0)] = one();
    j[(2, 3)] = -one();
    j[(3, 2)] = one();
    j
}

/// `J ū`, the quaternionic partner of `u`.
pub fn j_conj(u: &Vec4) -> Vec4 {
    j_matrix() * u.map(|x| x.conj())
}

/// `max |AᵗJA − J|`.
pub fn symplectic_defect(a: &Mat4) -> f64 {
    let j = j_matrix();
    (a.transpose() * j * a - j).iter().map(|x| x.norm()).fold(0.0, f64::max)
}

/// `max |A*A − I|`.
pub fn unitary_defect(a: &Mat4) -> f64 {
    (a.adjoint() * a - Mat4::identity())
        .iter()
        .map(|x| x.norm())
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroupKind {
    Sp2,
    Sp2C,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroupElement {
    matrix: Mat4,
    kind: GroupKind,
}

impl GroupElement {
    pub fn new(matrix: Mat4, kind: GroupKind) -> Result<Self> {
        let s = symplectic_defect(&matrix);
        if s > GROUP_TOL {
            return Err(Error::Construction(format!(
                "matrix is not symplectic (defect {s:e})"
            )));
        }
        if kind == GroupKind::Sp2 {
            let u = unitary_defect(&matrix);
            if u > GROUP_TOL {
                return Err(Error::Construction(format!(
                    "matrix is not unitary (defect {u:e})"
                )));
            }
        }
        Ok(Self { matrix, kind })
    }

    /// Picks `Sp2` when the matrix is unitary, `Sp2C` otherwise.
    pub fn classify(matrix: Mat4) -> Result<Self> {
        let kind = if unitary_defect(&matrix) <= GROUP_TOL {
            GroupKind::Sp2
        } else {
            GroupKind::Sp2C
        };
        Self::new(matrix, kind)
    }

    pub fn identity() -> Self {
        Self {
            matrix: Mat4::identity(),
            kind: GroupKind::Sp2,
        }
    }

    /// `diag{a, b, c, d}`; symplectic iff `ab = cd = 1`.
    pub fn diagonal(entries: [Complex64; 4]) -> Result<Self> {
        Self::classify(Mat4::from_diagonal(&Vec4::from(entries)))
    }

    /// `diag{x, 1/x, y, 1/y}`.
    pub fn torus(x: Complex64, y: Complex64) -> Result<Self> {
        if x.norm() == 0.0 || y.norm() == 0.0 {
            return Err(Error::Construction("torus entries must be nonzero".into()));
        }
        Self::diagonal([x, x.inv(), y, y.inv()])
    }

    /// `diag{1, 1, U}` for `U ∈ SL(2, C)` acting on the last two coordinates.
    pub fn lower_block(u: Matrix2<Complex64>) -> Result<Self> {
        let mut m = Mat4::identity();
        m.fixed_view_mut::<2, 2>(2, 2).copy_from(&u);
        Self::classify(m)
    }

    pub fn matrix(&self) -> &Mat4 {
        &self.matrix
    }

    pub fn kind(&self) -> GroupKind {
        self.kind
    }

    /// `self · other`, i.e. `other` acts first.
    pub fn compose(&self, other: &GroupElement) -> GroupElement {
        let kind = if self.kind == GroupKind::Sp2 && other.kind == GroupKind::Sp2 {
            GroupKind::Sp2
        } else {
            GroupKind::Sp2C
        };
        GroupElement {
            matrix: self.matrix * other.matrix,
            kind,
        }
    }

    /// `A⁻¹ = −J Aᵗ J`.
    pub fn inverse(&self) -> GroupElement {
        let j = j_matrix();
        GroupElement {
            matrix: -(j * self.matrix.transpose() * j),
            kind: self.kind,
        }
    }

    pub fn apply(&self, z: &Vec4) -> Vec4 {
        self.matrix * z
    }
}

/// The `Sp(2)` element with columns `(u, Jū, v, Jv̄)`.
pub fn sp2_from_columns(u: &Vec4, v: &Vec4) -> Result<GroupElement> {
    for (name, w) in [("u", u), ("v", v)] {
        if (w.norm() - 1.0).abs() > GROUP_TOL {
            return Err(Error::Construction(format!(
                "{name} is not a unit vector (norm {})",
                w.norm()
            )));
        }
    }
    let ju = j_conj(u);
    let o1 = u.dotc(v).norm();
    let o2 = ju.dotc(v).norm();
    if o1 > GROUP_TOL || o2 > GROUP_TOL {
        return Err(Error::Construction(format!(
            "v is not orthogonal to u and Jū (overlaps {o1:e}, {o2:e})"
        )));
    }
    let m = Mat4::from_columns(&[*u, ju, *v, j_conj(v)]);
    GroupElement::new(m, GroupKind::Sp2)
}

/// An `Sp(2)` element sending `w/|w|` to `e1`.
pub fn sp2_sending_to_e1(w: &Vec4) -> Result<GroupElement> {
    let n = w.norm();
    if n == 0.0 {
        return Err(Error::Degenerate("cannot normalize the zero vector".into()));
    }
    let u = w / c(n, 0.0);
    let ju = j_conj(&u);
    for k in [2usize, 3, 0, 1] {
        let mut e = Vec4::zeros();
        e[k] = one();
        let v = e - u * u.dotc(&e) - ju * ju.dotc(&e);
        let vn = v.norm();
        if vn >= SEED_MIN_NORM {
            let v = v / c(vn, 0.0);
            let a = sp2_from_columns(&u, &v)?;
            return GroupElement::new(a.matrix.adjoint(), GroupKind::Sp2);
        }
    }
    Err(Error::Consistency(
        "no seed vector completed the symplectic frame".into(),
    ))
}

/// Parameters of the stabilizer of `[1, 0, 0, 0]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilizerParams {
    pub xi: Complex64,
    pub eta: Complex64,
    pub zeta: Complex64,
    pub lambda: Complex64,
    pub mu: Complex64,
    pub alpha: Complex64,
    pub beta: Complex64,
    pub gamma: Complex64,
    pub delta: Complex64,
}

impl Default for StabilizerParams {
    fn default() -> Self {
        Self {
            xi: one(),
            eta: zero(),
            zeta: one(),
            lambda: zero(),
            mu: zero(),
            alpha: one(),
            beta: zero(),
            gamma: zero(),
            delta: one(),
        }
    }
}

/// The stabilizer element
///
/// ```text
/// ξ  η  ξ(γλ−αμ)  ξ(δλ−βμ)
/// 0  ζ  0         0
/// 0  λ  α         β
/// 0  μ  γ         δ
/// ```
///
/// with `αδ − βγ = ξζ = 1`.
pub fn stabilizer_element_71(p: StabilizerParams) -> Result<GroupElement> {
    let det = p.alpha * p.delta - p.beta * p.gamma;
    let xz = p.xi * p.zeta;
    if (det - one()).norm() > 1e-12 || (xz - one()).norm() > 1e-12 {
        return Err(Error::Construction(format!(
            "stabilizer constraints violated: αδ−βγ = {det}, ξζ = {xz}"
        )));
    }
    let m = Mat4::new(
        p.xi,
        p.eta,
        p.xi * (p.gamma * p.lambda - p.alpha * p.mu),
        p.xi * (p.delta * p.lambda - p.beta * p.mu),
        zero(),
        p.zeta,
        zero(),
        zero(),
        zero(),
        p.lambda,
        p.alpha,
        p.beta,
        zero(),
        p.mu,
        p.gamma,
        p.delta,
    );
    GroupElement::classify(m)
}

/// Left multiplication of the coefficient matrix.
pub fn act_post(g: &GroupElement, curve: &CurveCP3) -> CurveCP3 {
    let f = curve.coefficient_matrix();
    let m = DMatrix::from_fn(4, 4, |i, j| g.matrix[(i, j)]);
    CurveCP3::from_matrix_unchecked(&(m * f)).expect("shape preserved")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MoebiusKind {
    Gl2,
    Su2,
}

/// `z ↦ (αz + β)/(γz + δ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MoebiusMap {
    m: Matrix2<Complex64>,
    kind: MoebiusKind,
}

impl MoebiusMap {
    pub fn new(alpha: Complex64, beta: Complex64, gamma: Complex64, delta: Complex64) -> Result<Self> {
        let m = Matrix2::new(alpha, beta, gamma, delta);
        let det = m.determinant();
        let scale = m.iter().map(|x| x.norm_sqr()).sum::<f64>();
        if det.norm() <= 1e-14 * scale {
            return Err(Error::Construction("Möbius matrix is singular".into()));
        }
        Ok(Self {
            m,
            kind: MoebiusKind::Gl2,
        })
    }

    /// The unitary map with rows `(a, b)` and `(−b̄, ā)`, `|a|² + |b|² = 1`.
    pub fn su2(a: Complex64, b: Complex64) -> Result<Self> {
        let n = a.norm_sqr() + b.norm_sqr();
        if (n - 1.0).abs() > GROUP_TOL {
            return Err(Error::Construction(format!(
                "SU(2) rows must have unit norm, got {n}"
            )));
        }
        Ok(Self {
            m: Matrix2::new(a, b, -b.conj(), a.conj()),
            kind: MoebiusKind::Su2,
        })
    }

    pub fn identity() -> Self {
        Self {
            m: Matrix2::identity(),
            kind: MoebiusKind::Su2,
        }
    }

    /// `z ↦ λz`, as the matrix `diag(λ, 1)`.
    pub fn rotation(lambda: Complex64) -> Result<Self> {
        Self::new(lambda, zero(), zero(), one())
    }

    pub fn matrix(&self) -> &Matrix2<Complex64> {
        &self.m
    }

    pub fn kind(&self) -> MoebiusKind {
        self.kind
    }

    pub fn coefficients(&self) -> [Complex64; 4] {
        [self.m[(0, 0)], self.m[(0, 1)], self.m[(1, 0)], self.m[(1, 1)]]
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &MoebiusMap) -> MoebiusMap {
        let kind = if self.kind == MoebiusKind::Su2 && other.kind == MoebiusKind::Su2 {
            MoebiusKind::Su2
        } else {
            MoebiusKind::Gl2
        };
        MoebiusMap {
            m: self.m * other.m,
            kind,
        }
    }

    pub fn inverse(&self) -> MoebiusMap {
        let [a, b, g, d] = self.coefficients();
        MoebiusMap {
            m: Matrix2::new(d, -b, -g, a),
            kind: self.kind,
        }
    }

    pub fn apply(&self, p: Point) -> Point {
        let [a, b, g, d] = self.coefficients();
        match p {
            Point::Infinity => {
                if g.norm() == 0.0 {
                    Point::Infinity
                } else {
                    Point::Finite(a / g)
                }
            }
            Point::Finite(z) => {
                let den = g * z + d;
                if den.norm() == 0.0 {
                    Point::Infinity
                } else {
                    Point::Finite((a * z + b) / den)
                }
            }
        }
    }
}

/// The unitary map sending `p` to 0: `(z − p)/(p̄z + 1)` up to scale, and
/// `z ↦ −1/z` for `p = ∞`.
pub fn su2_moving_to_zero(p: Point) -> MoebiusMap {
    match p {
        Point::Infinity => MoebiusMap {
            m: Matrix2::new(zero(), -one(), one(), zero()),
            kind: MoebiusKind::Su2,
        },
        Point::Finite(z) => {
            let s = c(1.0 / (1.0 + z.norm_sqr()).sqrt(), 0.0);
            MoebiusMap {
                m: Matrix2::new(s, -z * s, z.conj() * s, s),
                kind: MoebiusKind::Su2,
            }
        }
    }
}

/// `M[j][k]` = coefficient of `z^k` in `(αz + β)^j (γz + δ)^(d−j)`.
pub fn precomposition_matrix(w: &MoebiusMap, d: usize) -> DMatrix<Complex64> {
    let [a, b, g, dd] = w.coefficients();
    let num = CPoly::new(vec![b, a]);
    let den = CPoly::new(vec![dd, g]);
    let mut pows_num = vec![CPoly::new(vec![one()])];
    let mut pows_den = vec![CPoly::new(vec![one()])];
    for k in 1..=d {
        pows_num.push(&pows_num[k - 1] * &num);
        pows_den.push(&pows_den[k - 1] * &den);
    }
    DMatrix::from_fn(d + 1, d + 1, |j, k| (&pows_num[j] * &pows_den[d - j]).coeff(k))
}

/// `f_i ↦ (γz + δ)^d f_i((αz + β)/(γz + δ))`.
pub fn act_pre(w: &MoebiusMap, curve: &CurveCP3) -> CurveCP3 {
    let f = curve.coefficient_matrix();
    let m = precomposition_matrix(w, curve.degree());
    CurveCP3::from_matrix_unchecked(&(f * m)).expect("shape preserved")
}

fn gaussian(rng: &mut impl Rng) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    c(re, im)
}

fn gaussian_vec4(rng: &mut impl Rng) -> Vec4 {
    Vec4::new(gaussian(rng), gaussian(rng), gaussian(rng), gaussian(rng))
}

fn bounded_modulus(rng: &mut impl Rng, lo: f64, hi: f64) -> Complex64 {
    Complex64::from_polar(rng.random_range(lo..hi), rng.random_range(0.0..std::f64::consts::TAU))
}

/// A random `Sp(2)` element: the product of two frames built from Gaussian vectors.
pub fn random_sp2(rng: &mut impl Rng) -> GroupElement {
    let a = sp2_sending_to_e1(&gaussian_vec4(rng)).expect("nonzero sample");
    let b = sp2_sending_to_e1(&gaussian_vec4(rng)).expect("nonzero sample");
    a.compose(&b)
}

/// A random `Sp(2, C)` element with moderate condition number: an `Sp(2)`
/// element times a torus element times a stabilizer element.
pub fn random_sp2c(rng: &mut impl Rng) -> GroupElement {
    let k = random_sp2(rng);
    let t = GroupElement::torus(bounded_modulus(rng, 0.5, 2.0), bounded_modulus(rng, 0.5, 2.0))
        .expect("nonzero torus entries");
    let xi = bounded_modulus(rng, 0.5, 2.0);
    let alpha = bounded_modulus(rng, 0.5, 2.0);
    let beta = gaussian(rng) * 0.5;
    let gamma = gaussian(rng) * 0.5;
    let s = stabilizer_element_71(StabilizerParams {
        xi,
        eta: gaussian(rng) * 0.5,
        zeta: xi.inv(),
        lambda: gaussian(rng) * 0.5,
        mu: gaussian(rng) * 0.5,
        alpha,
        beta,
        gamma,
        delta: (one() + beta * gamma) / alpha,
    })
    .expect("constraints hold by construction");
    k.compose(&t).compose(&s)
}

pub fn random_su2(rng: &mut impl Rng) -> MoebiusMap {
    let (a, b) = (gaussian(rng), gaussian(rng));
    let n = (a.norm_sqr() + b.norm_sqr()).sqrt();
    MoebiusMap::su2(a / n, b / n).expect("normalized")
}

/// A random non-unitary Möbius map: unitary · `diag(s, 1/s)` · unitary.
pub fn random_moebius(rng: &mut impl Rng) -> MoebiusMap {
    let s = bounded_modulus(rng, 0.5, 2.0);
    let d = MoebiusMap::new(s, zero(), zero(), s.inv()).expect("nonsingular");
    random_su2(rng).compose(&d).compose(&random_su2(rng))
}

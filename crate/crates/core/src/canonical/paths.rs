//! Deformation paths between canonical forms.

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use super::families::{psi3, psi5_eta, psi5_general, Psi5GeneralParams};
use crate::curve::CurveCP3;
use crate::error::{Error, Result};
use crate::groups::GroupElement;

const HYPOTHESIS_TOL: f64 = 1e-9;

fn check_unit_interval(t: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::Domain(format!("t must lie in [0, 1], got {t}")));
    }
    Ok(())
}

/// `psi5_eta(tan(πt/2))` for `t < 1`, and the cubic `psi3` at `t = 1`.
pub fn gamma_path(t: f64) -> Result<CurveCP3> {
    check_unit_interval(t)?;
    if t == 1.0 {
        return Ok(psi3());
    }
    psi5_eta((FRAC_PI_2 * t).tan())
}

/// The deformations connecting every general quintic to the base quintic
/// `[1 + z, (2 + z)z⁴, (1 + 2z)z, −(4 + z)z³]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Lemma711Case {
    /// From `[1, z⁵, 2z², −(5/2)z³]` to the base quintic.
    Psi1ToPsi0,
    /// From `[1, z⁵, z, −(5/3)z⁴]` to the base quintic.
    Psi2ToPsi0,
    /// `rs = 0`, `lm = −5`, ending at `[1, z⁵, 2z², −(5/2)z³]`.
    Case1,
    /// `lm = 0`, `rs = −5/3`, ending at `[1, z⁵, z, −(5/3)z⁴]`.
    Case2,
    /// `r, l, m, s ≠ 0`, ending at `[1, z⁵, z, −(5/3)z⁴]`.
    Case3,
}

impl Lemma711Case {
    pub const ALL: [Lemma711Case; 5] = [
        Lemma711Case::Psi1ToPsi0,
        Lemma711Case::Psi2ToPsi0,
        Lemma711Case::Case1,
        Lemma711Case::Case2,
        Lemma711Case::Case3,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Lemma711Case::Psi1ToPsi0 => "psi1-to-psi0",
            Lemma711Case::Psi2ToPsi0 => "psi2-to-psi0",
            Lemma711Case::Case1 => "case1",
            Lemma711Case::Case2 => "case2",
            Lemma711Case::Case3 => "case3",
        }
    }

    pub fn needs_params(&self) -> bool {
        matches!(self, Lemma711Case::Case1 | Lemma711Case::Case2 | Lemma711Case::Case3)
    }

    /// Representative starting parameters satisfying the case hypotheses.
    pub fn sample_params(&self) -> Option<Psi5GeneralParams> {
        let r = |x: f64| Complex64::new(x, 0.0);
        match self {
            Lemma711Case::Psi1ToPsi0 | Lemma711Case::Psi2ToPsi0 => None,
            // rs = 0 forces ah = 0; take r = 0, l = 1, m = −5, s = −2a, h = 0
            Lemma711Case::Case1 => Psi5GeneralParams::new(r(0.7), r(0.0), r(0.0), r(1.0), r(-5.0), r(-1.4)).ok(),
            // lm = 0 forces ah = 0; take l = 0, m = 0.6, r = 1, s = −5/3, h = −0.3, a = 0
            Lemma711Case::Case2 => Psi5GeneralParams::new(r(0.0), r(-0.3), r(1.0), r(0.0), r(0.6), r(-5.0 / 3.0)).ok(),
            Lemma711Case::Case3 => Some(Psi5GeneralParams::psi5_tilde_0()),
        }
    }
}

impl fmt::Display for Lemma711Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Lemma711Case {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Lemma711Case::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::Domain(format!("unknown deformation case `{s}`")))
    }
}

fn check_hypotheses(case: Lemma711Case, p: &Psi5GeneralParams) -> Result<()> {
    let small = |x: Complex64| x.norm() <= HYPOTHESIS_TOL;
    let ok = match case {
        Lemma711Case::Case1 => small(p.r * p.s) && small(p.l * p.m + 5.0),
        Lemma711Case::Case2 => small(p.l * p.m) && small(p.r * p.s + 5.0 / 3.0),
        Lemma711Case::Case3 => ![p.r, p.l, p.m, p.s].into_iter().any(small),
        _ => true,
    };
    if !ok {
        return Err(Error::Precondition(format!(
            "parameters do not satisfy the hypotheses of {case}"
        )));
    }
    if p.on_degeneration_locus(HYPOTHESIS_TOL) {
        return Err(Error::Degenerate(
            "starting parameters lie on the degeneration locus".into(),
        ));
    }
    Ok(())
}

/// Quintic parameters along a deformation at time `t`.
pub fn lemma711_params(
    case: Lemma711Case,
    t: f64,
    params: Option<&Psi5GeneralParams>,
) -> Result<Psi5GeneralParams> {
    check_unit_interval(t)?;
    let re = |x: f64| Complex64::new(x, 0.0);
    let u = 1.0 - t;
    let need = || {
        params.copied().ok_or_else(|| {
            Error::Precondition(format!("{case} needs starting parameters"))
        })
    };
    let out = match case {
        Lemma711Case::Psi1ToPsi0 => {
            let den = 4.0 - 3.0 * t * t;
            Psi5GeneralParams::from_real(
                t,
                t * (5.0 - 3.0 * t * t) / den,
                t,
                2.0,
                2.0 * (3.0 * t * t - 5.0) / den,
                -t,
            )?
        }
        Lemma711Case::Psi2ToPsi0 => {
            // the detour through complex m keeps lm away from −4 and −2
            let l = re(2.0 * t);
            let m = re(-4.0 * t) * Complex64::new(1.0, -u);
            Psi5GeneralParams::from_rlm(re(1.0), l, m)?
        }
        Lemma711Case::Case1 => {
            let p = need()?;
            check_hypotheses(case, &p)?;
            Psi5GeneralParams::new(p.a * u, p.h * u, p.r * u, p.l, p.m, p.s * u)?
        }
        Lemma711Case::Case2 => {
            let p = need()?;
            check_hypotheses(case, &p)?;
            Psi5GeneralParams::new(p.a * u, p.h * u, p.r, p.l * u, p.m * u, p.s)?
        }
        Lemma711Case::Case3 => {
            let p = need()?;
            check_hypotheses(case, &p)?;
            let lm = p.l * p.m;
            let twist = if lm.im.abs() <= HYPOTHESIS_TOL * (1.0 + lm.norm()) && lm.re < -2.0 {
                Complex64::new(1.0, t)
            } else {
                re(1.0)
            };
            Psi5GeneralParams::from_rlm(p.r, p.l * u, p.m * u * twist)?
        }
    };
    if out.on_degeneration_locus(HYPOTHESIS_TOL) {
        return Err(Error::Degenerate(format!(
            "{case} meets the degeneration locus at t = {t}"
        )));
    }
    Ok(out)
}

/// The deformation curve at time `t`.
pub fn lemma711_path(
    case: Lemma711Case,
    t: f64,
    params: Option<&Psi5GeneralParams>,
) -> Result<CurveCP3> {
    psi5_general(&lemma711_params(case, t, params)?)
}

/// The diagonal element applied at `t = 1` to land on the named canonical
/// form; the identity for the two paths that already end there.
pub fn lemma711_closing(case: Lemma711Case, params: Option<&Psi5GeneralParams>) -> Result<GroupElement> {
    let one = Complex64::new(1.0, 0.0);
    let end = lemma711_params(case, 1.0, params)?;
    match case {
        Lemma711Case::Psi1ToPsi0 | Lemma711Case::Psi2ToPsi0 => Ok(GroupElement::identity()),
        Lemma711Case::Case1 => GroupElement::diagonal([one, one, 2.0 / end.l, -5.0 / (2.0 * end.m)]),
        Lemma711Case::Case2 => GroupElement::diagonal([one, one, one / end.r, -5.0 / (3.0 * end.s)]),
        Lemma711Case::Case3 => GroupElement::diagonal([one, one, one / end.r, end.r]),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canonical::families::{psi5_1, psi5_2};
    use crate::curve::{horizontality_defect, projective_distance};
    use crate::groups::act_post;

    #[test]
    fn gamma_path_examples() {
        assert_eq!(gamma_path(0.0).unwrap(), psi5_eta(0.0).unwrap());
        let mid = gamma_path(0.5).unwrap();
        assert!(projective_distance(&mid, &psi5_eta(1.0).unwrap()) < 1e-15);
        assert_eq!(gamma_path(1.0).unwrap(), psi3());
        assert!(gamma_path(1.5).is_err());
    }

    #[test]
    fn base_paths_hit_both_ends() {
        let base = psi5_general(&Psi5GeneralParams::psi5_tilde_0()).unwrap();
        let p1 = lemma711_path(Lemma711Case::Psi1ToPsi0, 0.0, None).unwrap();
        assert!(projective_distance(&p1, &psi5_1()) < 1e-15);
        let p1 = lemma711_path(Lemma711Case::Psi1ToPsi0, 1.0, None).unwrap();
        assert!(projective_distance(&p1, &base) < 1e-15);
        let p2 = lemma711_path(Lemma711Case::Psi2ToPsi0, 0.0, None).unwrap();
        assert!(projective_distance(&p2, &psi5_2()) < 1e-15);
        let p2 = lemma711_path(Lemma711Case::Psi2ToPsi0, 1.0, None).unwrap();
        assert!(projective_distance(&p2, &base) < 1e-15);
    }

    #[test]
    fn case_paths_close_on_canonical_forms() {
        for (case, target) in [
            (Lemma711Case::Case1, psi5_1()),
            (Lemma711Case::Case2, psi5_2()),
            (Lemma711Case::Case3, psi5_2()),
        ] {
            let p = case.sample_params().unwrap();
            let start = lemma711_path(case, 0.0, Some(&p)).unwrap();
            assert!(projective_distance(&start, &psi5_general(&p).unwrap()) < 1e-14);
            let g = lemma711_closing(case, Some(&p)).unwrap();
            let end = act_post(&g, &lemma711_path(case, 1.0, Some(&p)).unwrap());
            assert!(projective_distance(&end, &target) < 1e-14, "{case}");
        }
    }

    #[test]
    fn paths_stay_horizontal() {
        for case in Lemma711Case::ALL {
            let p = case.sample_params();
            for k in 0..20 {
                let t = k as f64 / 19.0;
                let curve = lemma711_path(case, t, p.as_ref()).unwrap();
                assert_eq!(curve.degree(), 5);
                assert!(horizontality_defect(&curve) < 1e-12, "{case} at {t}");
            }
        }
    }

    #[test]
    fn case3_detours_around_the_locus() {
        // lm = −3 would cross lm = −2 on the straight path
        let p = Psi5GeneralParams::from_rlm(Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0), Complex64::new(-3.0, 0.0)).unwrap();
        for k in 0..=100 {
            let q = lemma711_params(Lemma711Case::Case3, k as f64 / 100.0, Some(&p)).unwrap();
            assert!((q.l * q.m + 2.0).norm() > 1e-3);
        }
    }

    #[test]
    fn hypotheses_are_checked() {
        let p = Psi5GeneralParams::psi5_tilde_0();
        assert!(matches!(
            lemma711_path(Lemma711Case::Case1, 0.5, Some(&p)),
            Err(Error::Precondition(_))
        ));
        assert!(lemma711_path(Lemma711Case::Case3, 0.5, None).is_err());
        assert_eq!("case2".parse::<Lemma711Case>().unwrap(), Lemma711Case::Case2);
        assert!("case4".parse::<Lemma711Case>().is_err());
    }
}

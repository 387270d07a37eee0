//! Command-line front end: curve documents, verification, reductions, areas
//! and bubbling sweeps.
//!
//! Exit codes: 0 success, 1 a check failed or a precondition did not hold,
//! 2 usage or parse error, 3 quadrature did not reach its tolerance.

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::canonical::{
    bryant_canonical, gamma_path, lemma711_path, psi3, psi4_a, psi5_1, psi5_2, psi5_eta,
    psi5_general, psi5_m, psi5_m_coefficients, reduce_degree3_full, reduce_degree3_invariant,
    reduce_degree4_full, reduce_degree5_invariant, FamilyParams, Lemma711Case, Psi5GeneralParams,
    ReductionResult,
};
use crate::cpoly::CPoly;
use crate::curve::{
    fullness_ratio, horizontality_defect, projective_distance, singularity_report, CurveCP3,
    SingularityType, FULL_TOL, HORIZONTAL_TOL,
};
use crate::error::Error;
use crate::geometry::{annulus_bound, annulus_mass, bubble_limit, bubble_profile, induced_area, Region};
use crate::groups::{act_post, act_pre};
use crate::invariance::{invariance_check, INVARIANCE_TOL};
use crate::quadrature::QuadSpec;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub family: String,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
}

/// JSON form of a curve: `coefficients[i][j] = [re, im]` of the `z^j`
/// coefficient of `f_(i+1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveDocument {
    pub degree: usize,
    pub coefficients: Vec<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metadata: Option<Metadata>,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Parse(String),
    Io(String),
    /// The command ran but a requested check failed; the report is still emitted.
    CheckFailed(String),
    Lib(Error),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(s) => write!(f, "usage error: {s}"),
            CliError::Parse(s) => write!(f, "parse error: {s}"),
            CliError::Io(s) => write!(f, "i/o error: {s}"),
            CliError::CheckFailed(s) => write!(f, "check failed: {s}"),
            CliError::Lib(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lib(e)
    }
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Parse(_) | CliError::Lib(Error::Domain(_)) => 2,
            CliError::Lib(Error::Accuracy { .. }) => 3,
            CliError::Io(_) | CliError::CheckFailed(_) | CliError::Lib(_) => 1,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

impl CurveDocument {
    pub fn from_curve(c: &CurveCP3, metadata: Option<Metadata>) -> Self {
        Self {
            degree: c.degree(),
            coefficients: c
                .components()
                .iter()
                .map(|p| p.coeffs().iter().map(|z| [z.re, z.im]).collect())
                .collect(),
            metadata,
        }
    }

    /// Checks the shape and finiteness, naming the offending row and column.
    pub fn validate(&self) -> CliResult<()> {
        if self.coefficients.len() != 4 {
            return Err(CliError::Parse(format!(
                "expected 4 coefficient rows, found {}",
                self.coefficients.len()
            )));
        }
        for (i, row) in self.coefficients.iter().enumerate() {
            if row.len() != self.degree + 1 {
                return Err(CliError::Parse(format!(
                    "row {i}: expected {} entries for degree {}, found {}",
                    self.degree + 1,
                    self.degree,
                    row.len()
                )));
            }
            for (j, z) in row.iter().enumerate() {
                if !(z[0].is_finite() && z[1].is_finite()) {
                    return Err(CliError::Parse(format!("row {i}, column {j}: non-finite entry")));
                }
            }
        }
        Ok(())
    }

    /// The curve with only the shape validated, so that non-horizontal or
    /// degenerate input can still be inspected.
    pub fn to_curve(&self) -> CliResult<CurveCP3> {
        self.validate()?;
        let comps: [CPoly; 4] = std::array::from_fn(|i| {
            CPoly::new(self.coefficients[i].iter().map(|z| Complex64::new(z[0], z[1])).collect())
        });
        Ok(CurveCP3::new_unchecked(comps)?)
    }

    pub fn parse(text: &str) -> CliResult<Self> {
        let doc: Self = serde_json::from_str(text).map_err(|e| {
            CliError::Parse(format!("line {}, column {}: {e}", e.line(), e.column()))
        })?;
        doc.validate()?;
        Ok(doc)
    }

    pub fn read(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("finite entries serialize")
    }
}

fn pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Check {
    Horizontal,
    Full,
    Invariant,
    Degree,
}

#[derive(Debug, Clone, Serialize)]
pub struct InvarianceReport {
    pub invariant: bool,
    pub beta: Option<[f64; 2]>,
    pub residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub degree: usize,
    /// Whether the document is a valid curve: some component of full degree
    /// and no common zero.
    pub degree_ok: bool,
    pub horizontality_residual: f64,
    pub horizontal: bool,
    pub fullness_ratio: f64,
    pub linearly_full: bool,
    pub invariance: InvarianceReport,
    pub failed: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyTolerances {
    pub horizontal: f64,
    pub full: f64,
    pub invariance: f64,
}

impl Default for VerifyTolerances {
    fn default() -> Self {
        Self {
            horizontal: HORIZONTAL_TOL,
            full: FULL_TOL,
            invariance: INVARIANCE_TOL,
        }
    }
}

pub fn cmd_verify(doc: &CurveDocument, tol: VerifyTolerances, checks: &[Check]) -> CliResult<VerifyReport> {
    let c = doc.to_curve()?;
    let degree_ok = CurveCP3::new(c.components().clone()).is_ok();
    let horizontality_residual = horizontality_defect(&c);
    let ratio = fullness_ratio(&c);
    let w = invariance_check(&c);
    let residual = w.residual;
    let invariant = residual <= tol.invariance;
    let mut report = VerifyReport {
        degree: c.degree(),
        degree_ok,
        horizontality_residual,
        horizontal: horizontality_residual <= tol.horizontal,
        fullness_ratio: ratio,
        linearly_full: ratio > tol.full,
        invariance: InvarianceReport {
            invariant,
            beta: w.beta.map(pair),
            residual,
        },
        failed: Vec::new(),
    };
    for check in checks {
        let ok = match check {
            Check::Horizontal => report.horizontal,
            Check::Full => report.linearly_full,
            Check::Invariant => report.invariance.invariant,
            Check::Degree => report.degree_ok,
        };
        if !ok {
            report.failed.push(format!("{check:?}").to_lowercase());
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, Serialize)]
pub struct PointReport {
    /// `[re, im]`, or `null` for the point at infinity.
    pub point: Option<[f64; 2]>,
    pub r0: usize,
    pub r1: usize,
    pub r2: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct SingularReport {
    pub degree: usize,
    pub points: Vec<PointReport>,
    pub infinity: PointReport,
    pub total_r0: usize,
    pub total_r1: usize,
    pub total_r2: usize,
    /// `2Σr0 + Σr1`.
    pub lhs: usize,
    /// `2d − 6`.
    pub rhs: i64,
    pub symmetric: bool,
    pub verdict: bool,
}

fn point_report(point: Option<[f64; 2]>, t: SingularityType) -> PointReport {
    PointReport {
        point,
        r0: t.r0,
        r1: t.r1,
        r2: t.r2,
    }
}

pub fn cmd_singular(doc: &CurveDocument) -> CliResult<SingularReport> {
    let c = doc.to_curve()?;
    let r = singularity_report(&c)?;
    let lhs = 2 * r.total_r0 + r.total_r1;
    let rhs = 2 * r.degree as i64 - 6;
    Ok(SingularReport {
        degree: r.degree,
        points: r
            .finite_points
            .iter()
            .map(|p| point_report(Some(pair(p.point)), p.kind))
            .collect(),
        infinity: point_report(None, r.at_infinity),
        total_r0: r.total_r0,
        total_r1: r.total_r1,
        total_r2: r.total_r2,
        lhs,
        rhs,
        symmetric: r.symmetric(),
        verdict: r.count_holds() && r.symmetric(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReduceClass {
    #[value(name = "deg3-inv")]
    Deg3Inv,
    #[value(name = "deg5-inv")]
    Deg5Inv,
    #[value(name = "deg3-full")]
    Deg3Full,
    #[value(name = "deg4-full")]
    Deg4Full,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReduceReport {
    pub g: Vec<Vec<[f64; 2]>>,
    pub omega: Vec<Vec<[f64; 2]>>,
    pub canonical: CurveDocument,
    pub family: String,
    pub params: BTreeMap<String, f64>,
    /// Values of the parameter obtained from every singular point.
    pub candidates: Vec<f64>,
    pub residual: f64,
}

pub fn reduce_class(c: &CurveCP3, class: ReduceClass) -> crate::error::Result<ReductionResult> {
    match class {
        ReduceClass::Deg3Inv => reduce_degree3_invariant(c),
        ReduceClass::Deg5Inv => reduce_degree5_invariant(c),
        ReduceClass::Deg3Full => reduce_degree3_full(c),
        ReduceClass::Deg4Full => reduce_degree4_full(c),
    }
}

pub fn cmd_reduce(doc: &CurveDocument, class: ReduceClass) -> CliResult<ReduceReport> {
    let c = doc.to_curve()?;
    let r = reduce_class(&c, class)?;
    let residual = projective_distance(&act_post(&r.g, &act_pre(&r.omega, &c)), &r.canonical);
    let (family, params, candidates) = match &r.params {
        FamilyParams::Pattern => ("pattern".to_string(), BTreeMap::new(), vec![]),
        FamilyParams::Psi3 => ("psi3".to_string(), BTreeMap::new(), vec![]),
        FamilyParams::Psi5Eta { eta, candidates } => {
            ("psi5_eta".to_string(), BTreeMap::from([("eta".to_string(), *eta)]), candidates.clone())
        }
        FamilyParams::Psi4A { a, candidates } => {
            ("psi4_a".to_string(), BTreeMap::from([("a".to_string(), *a)]), candidates.clone())
        }
    };
    let rows = |m: &dyn Fn(usize, usize) -> Complex64, n: usize| -> Vec<Vec<[f64; 2]>> {
        (0..n).map(|i| (0..n).map(|j| pair(m(i, j))).collect()).collect()
    };
    Ok(ReduceReport {
        g: rows(&|i, j| r.g.matrix()[(i, j)], 4),
        omega: rows(&|i, j| r.omega.matrix()[(i, j)], 2),
        canonical: CurveDocument::from_curve(
            &r.canonical,
            Some(Metadata {
                family: family.clone(),
                params: params.clone(),
            }),
        ),
        family,
        params,
        candidates,
        residual,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RegionArg {
    Sphere,
    Disk,
}

impl From<RegionArg> for Region {
    fn from(r: RegionArg) -> Self {
        match r {
            RegionArg::Sphere => Region::Sphere,
            RegionArg::Disk => Region::UnitDisk,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AreaReport {
    pub area: f64,
    pub estimated_error: f64,
    pub nodes: usize,
    /// Nearest `k` with the area close to `2πk`.
    pub multiple_of_2pi: i64,
    /// `|area − 2πk| / (2πk)`.
    pub deviation: f64,
}

pub fn cmd_area(doc: &CurveDocument, region: Region, tol: f64) -> CliResult<AreaReport> {
    let c = doc.to_curve()?;
    let a = induced_area(&c, region, &QuadSpec::default().with_tol(tol))?;
    let k = (a.value / TAU).round() as i64;
    let target = TAU * k as f64;
    Ok(AreaReport {
        area: a.value,
        estimated_error: a.estimated_error,
        nodes: a.nodes,
        multiple_of_2pi: k,
        deviation: (a.value - target).abs() / target.max(f64::MIN_POSITIVE),
    })
}

pub const BUBBLE_HEADER: [&str; 6] = [
    "m",
    "p",
    "annulus_mass",
    "annulus_bound",
    "bubble_mass",
    "limit_prediction",
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BubbleRow {
    pub m: f64,
    pub p: f64,
    pub annulus_mass: f64,
    pub annulus_bound: f64,
    pub bubble_mass: f64,
    pub limit_prediction: f64,
}

/// One row per admissible `m`; rejected values come back as notes.
pub fn bubble_rows(ms: &[f64], eps: f64, tol: f64) -> CliResult<(Vec<BubbleRow>, Vec<String>)> {
    let spec = QuadSpec::default().with_tol(tol);
    let mut rows = Vec::new();
    let mut notes = Vec::new();
    for &m in ms {
        let row = (|| -> crate::error::Result<BubbleRow> {
            let (_, p) = psi5_m_coefficients(m)?;
            Ok(BubbleRow {
                m,
                p,
                annulus_mass: annulus_mass(m, &spec)?.value,
                annulus_bound: annulus_bound(m)?,
                bubble_mass: bubble_profile(m, eps, &spec)?.value,
                limit_prediction: bubble_limit(eps),
            })
        })();
        match row {
            Ok(r) => rows.push(r),
            Err(e @ (Error::Domain(_) | Error::Precondition(_))) => notes.push(format!("m = {m} skipped: {e}")),
            Err(e) => return Err(e.into()),
        }
    }
    Ok((rows, notes))
}

pub fn write_bubble_csv(rows: &[BubbleRow], out: impl Write) -> CliResult<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| CliError::Io(e.to_string());
    w.write_record(BUBBLE_HEADER).map_err(io)?;
    for r in rows {
        let fields = [r.m, r.p, r.annulus_mass, r.annulus_bound, r.bubble_mass, r.limit_prediction];
        w.write_record(fields.iter().map(|x| format!("{x:.16e}"))).map_err(io)?;
    }
    w.flush().map_err(|e| CliError::Io(e.to_string()))
}

fn param(params: &BTreeMap<String, f64>, key: &str) -> CliResult<f64> {
    params
        .get(key)
        .copied()
        .ok_or_else(|| CliError::Usage(format!("missing parameter `{key}`")))
}

fn count(params: &BTreeMap<String, f64>, key: &str) -> CliResult<usize> {
    let x = param(params, key)?;
    if x < 0.0 || x.fract() != 0.0 {
        return Err(CliError::Usage(format!("`{key}` must be a non-negative integer, got {x}")));
    }
    Ok(x as usize)
}

fn general_params(params: &BTreeMap<String, f64>) -> CliResult<Option<Psi5GeneralParams>> {
    let keys = ["a", "h", "r", "l", "m", "s"];
    if keys.iter().all(|k| !params.contains_key(*k)) {
        return Ok(None);
    }
    let v: Vec<f64> = keys.iter().map(|k| param(params, k)).collect::<CliResult<_>>()?;
    Ok(Some(Psi5GeneralParams::from_real(v[0], v[1], v[2], v[3], v[4], v[5])?))
}

pub const FAMILY_NAMES: [&str; 10] = [
    "psi3",
    "psi5_eta",
    "psi5_m",
    "psi4_a",
    "psi5_1",
    "psi5_2",
    "bryant",
    "psi5_general",
    "gamma",
    "lemma711:<case>",
];

/// Builds a named family member. `lemma711:<case>` takes `t` and, for the
/// three general cases, optionally `a, h, r, l, m, s` (a sample otherwise).
pub fn build_family(name: &str, params: &BTreeMap<String, f64>) -> CliResult<CurveCP3> {
    let c = match name {
        "psi3" => psi3(),
        "psi5_eta" => psi5_eta(param(params, "eta")?)?,
        "psi5_m" => psi5_m(param(params, "m")?)?,
        "psi4_a" => psi4_a(param(params, "a")?)?,
        "psi5_1" => psi5_1(),
        "psi5_2" => psi5_2(),
        "bryant" => bryant_canonical(count(params, "k1")?, count(params, "k2")?)?,
        "psi5_general" => {
            psi5_general(&general_params(params)?.unwrap_or_else(Psi5GeneralParams::psi5_tilde_0))?
        }
        "gamma" => gamma_path(param(params, "t")?)?,
        _ => match name.strip_prefix("lemma711:") {
            Some(case) => {
                let case: Lemma711Case = case.parse().map_err(|_| {
                    CliError::Usage(format!(
                        "unknown case `{case}`; expected one of {}",
                        Lemma711Case::ALL.map(|c| c.name()).join(", ")
                    ))
                })?;
                let start = match general_params(params)? {
                    Some(p) => Some(p),
                    None => case.sample_params(),
                };
                lemma711_path(case, param(params, "t")?, start.as_ref())?
            }
            None => {
                return Err(CliError::Usage(format!(
                    "unknown family `{name}`; expected one of {}",
                    FAMILY_NAMES.join(", ")
                )))
            }
        },
    };
    Ok(c)
}

pub fn cmd_family(name: &str, params: &BTreeMap<String, f64>) -> CliResult<CurveDocument> {
    let c = build_family(name, params)?;
    Ok(CurveDocument::from_curve(
        &c,
        Some(Metadata {
            family: name.to_string(),
            params: params.clone(),
        }),
    ))
}

#[derive(Debug, Clone, PartialEq)]
pub struct FloatList(pub Vec<f64>);

fn parse_list(s: &str) -> Result<FloatList, String> {
    s.split(',')
        .map(str::trim)
        .filter(|x| !x.is_empty())
        .map(|x| x.parse::<f64>().map_err(|e| format!("`{x}`: {e}")))
        .collect::<Result<_, _>>()
        .map(FloatList)
}

fn parse_param(s: &str) -> Result<(String, f64), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected K=V, got `{s}`"))?;
    let v: f64 = v.trim().parse().map_err(|e| format!("`{k}`: {e}"))?;
    Ok((k.trim().to_string(), v))
}

#[derive(Debug, Parser)]
#[command(name = "twistor", version, about = "Horizontal holomorphic curves in CP3 and their harmonic maps to S4")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Horizontality, linear fullness, antipodal invariance and degree checks.
    Verify {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
        /// Relative horizontality tolerance.
        #[arg(long, default_value_t = HORIZONTAL_TOL)]
        tol: f64,
        #[arg(long, default_value_t = FULL_TOL)]
        full_tol: f64,
        #[arg(long, default_value_t = INVARIANCE_TOL)]
        invariance_tol: f64,
        /// Checks that decide the exit status.
        #[arg(long = "check", value_enum, value_delimiter = ',', default_values_t = [Check::Horizontal, Check::Full, Check::Degree])]
        checks: Vec<Check>,
    },
    /// Singular points with their ramification indices.
    Singular {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Canonical form, the group elements reaching it and the recovered parameters.
    Reduce {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, value_enum)]
        class: ReduceClass,
    },
    /// Induced area of the sphere or the unit disk.
    Area {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = RegionArg::Sphere)]
        region: RegionArg,
        /// Relative agreement required between quadrature refinements.
        #[arg(long, default_value_t = QuadSpec::default().tol)]
        tol: f64,
    },
    /// CSV sweep of annulus and bubble masses of the bubbling family.
    Bubble {
        /// Comma-separated values of m; may be empty.
        #[arg(long, value_parser = parse_list, default_value = "")]
        m_list: FloatList,
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
        #[arg(long, default_value_t = QuadSpec::default().tol)]
        tol: f64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Writes a curve document for a named family member.
    Family {
        #[arg(long)]
        family: String,
        #[arg(long = "param", value_parser = parse_param)]
        params: Vec<(String, f64)>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

fn emit(output: &Option<PathBuf>, text: &str) -> CliResult<()> {
    match output {
        Some(path) => fs::write(path, format!("{text}\n")).map_err(|e| CliError::Io(format!("{}: {e}", path.display()))),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("report serializes")
}

pub fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Verify {
            input,
            output,
            tol,
            full_tol,
            invariance_tol,
            checks,
        } => {
            let doc = CurveDocument::read(&input)?;
            let tols = VerifyTolerances {
                horizontal: tol,
                full: full_tol,
                invariance: invariance_tol,
            };
            let report = cmd_verify(&doc, tols, &checks)?;
            emit(&output, &json(&report))?;
            if !report.failed.is_empty() {
                return Err(CliError::CheckFailed(report.failed.join(", ")));
            }
        }
        Command::Singular { input, output } => {
            let report = cmd_singular(&CurveDocument::read(&input)?)?;
            emit(&output, &json(&report))?;
            if !report.verdict {
                return Err(CliError::CheckFailed(format!("2Σr0 + Σr1 = {} but 2d − 6 = {}", report.lhs, report.rhs)));
            }
        }
        Command::Reduce { input, output, class } => {
            let report = cmd_reduce(&CurveDocument::read(&input)?, class)?;
            emit(&output, &json(&report))?;
        }
        Command::Area {
            input,
            output,
            region,
            tol,
        } => {
            let report = cmd_area(&CurveDocument::read(&input)?, region.into(), tol)?;
            emit(&output, &json(&report))?;
        }
        Command::Bubble { m_list, eps, tol, output } => {
            let (rows, notes) = bubble_rows(&m_list.0, eps, tol)?;
            for n in notes {
                eprintln!("{n}");
            }
            match output {
                Some(path) => {
                    let f = fs::File::create(&path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
                    write_bubble_csv(&rows, f)?;
                }
                None => write_bubble_csv(&rows, std::io::stdout().lock())?,
            }
        }
        Command::Family { family, params, output } => {
            let params: BTreeMap<String, f64> = params.into_iter().collect();
            emit(&output, &cmd_family(&family, &params)?.to_json())?;
        }
    }
    Ok(())
}

/// Parses the process arguments, runs the command and maps the outcome to an exit code.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("twistor: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn family(name: &str, kv: &[(&str, f64)]) -> CliResult<CurveDocument> {
        let params = kv.iter().map(|(k, v)| (k.to_string(), *v)).collect();
        cmd_family(name, &params)
    }

    #[test]
    fn document_round_trip_is_exact() {
        for (name, kv) in [
            ("psi3", vec![]),
            ("psi5_eta", vec![("eta", 0.7)]),
            ("psi5_m", vec![("m", 3.3)]),
            ("psi4_a", vec![("a", 2.5)]),
            ("psi5_general", vec![]),
            ("gamma", vec![("t", 0.37)]),
            ("lemma711:case3", vec![("t", 0.41)]),
        ] {
            let doc = family(name, &kv).unwrap();
            let text = doc.to_json();
            let back = CurveDocument::parse(&text).unwrap();
            assert_eq!(back, doc);
            let again = CurveDocument::from_curve(&back.to_curve().unwrap(), back.metadata.clone());
            assert_eq!(again.to_json(), text);
        }
    }

    #[test]
    fn malformed_documents() {
        let three = r#"{"degree": 1, "coefficients": [[[1,0],[0,0]],[[0,0],[1,0]],[[0,0],[0,0]]]}"#;
        assert!(matches!(CurveDocument::parse(three), Err(CliError::Parse(m)) if m.contains("4 coefficient rows")));
        let short = r#"{"degree": 1, "coefficients": [[[1,0],[0,0]],[[0,0]],[[0,0],[0,0]],[[0,0],[0,0]]]}"#;
        assert!(matches!(CurveDocument::parse(short), Err(CliError::Parse(m)) if m.starts_with("row 1")));
        let bad = "{\"degree\": 1,\n \"coefficients\": [oops]}";
        assert!(matches!(CurveDocument::parse(bad), Err(CliError::Parse(m)) if m.starts_with("line 2")));
    }

    #[test]
    fn verify_examples() {
        let all = [Check::Horizontal, Check::Full, Check::Invariant, Check::Degree];
        let r = cmd_verify(&family("psi3", &[]).unwrap(), VerifyTolerances::default(), &all).unwrap();
        assert!(r.failed.is_empty());
        let b = r.invariance.beta.unwrap();
        assert!((b[0].abs() - 1.0).abs() < 1e-12 && b[1].abs() < 1e-12);
        let r = cmd_verify(&family("psi4_a", &[("a", 1.0)]).unwrap(), VerifyTolerances::default(), &all).unwrap();
        assert!(r.horizontal && !r.invariance.invariant);
        assert_eq!(r.failed, vec!["invariant".to_string()]);
    }

    #[test]
    fn singular_examples() {
        let r = cmd_singular(&family("psi5_eta", &[("eta", 0.0)]).unwrap()).unwrap();
        assert!(r.verdict);
        assert_eq!(r.points.len(), 1);
        assert_eq!((r.points[0].r0, r.points[0].r1, r.points[0].r2), (0, 2, 0));
        assert!(r.points[0].point.unwrap().iter().all(|x| x.abs() < 1e-12));
        assert_eq!((r.infinity.r0, r.infinity.r1, r.infinity.r2), (0, 2, 0));
        let r = cmd_singular(&family("psi3", &[]).unwrap()).unwrap();
        assert!(r.verdict && r.points.is_empty() && r.lhs == 0 && r.rhs == 0);
        let mut doc = family("psi3", &[]).unwrap();
        doc.coefficients[0][1] = [0.5, 0.0];
        assert!(matches!(cmd_singular(&doc), Err(CliError::Lib(Error::Precondition(_)))));
    }

    #[test]
    fn family_examples() {
        let doc = family("bryant", &[("k1", 1.0), ("k2", 3.0)]).unwrap();
        let expect = [[1.0, 0.0, 0.0, 0.0, 0.0, 0.0], [0.0, 0.0, 0.0, 0.0, 0.0, 3.0], [0.0, -5.0, 0.0, 0.0, 0.0, 0.0], [0.0, 0.0, 0.0, 0.0, 1.0, 0.0]];
        for i in 0..4 {
            for j in 0..6 {
                assert_eq!(doc.coefficients[i][j], [expect[i][j], 0.0]);
            }
        }
        let e = family("psi5_m", &[("m", 1.0)]).unwrap_err();
        assert_eq!(e.exit_code(), 2);
        assert_eq!(family("nope", &[]).unwrap_err().exit_code(), 2);
        assert_eq!(family("psi5_eta", &[]).unwrap_err().exit_code(), 2);
        assert_eq!(family("lemma711:case9", &[("t", 0.1)]).unwrap_err().exit_code(), 2);
    }

    #[test]
    fn reduce_class_mismatch() {
        let e = cmd_reduce(&family("psi4_a", &[("a", 1.0)]).unwrap(), ReduceClass::Deg3Inv).unwrap_err();
        assert!(matches!(e, CliError::Lib(Error::DegreeMismatch { expected: 3, found: 4 })));
        assert_eq!(e.exit_code(), 1);
    }

    #[test]
    fn bubble_rows_skip_out_of_domain() {
        let (rows, notes) = bubble_rows(&[], 0.1, 1e-9).unwrap();
        assert!(rows.is_empty() && notes.is_empty());
        let mut out = Vec::new();
        write_bubble_csv(&rows, &mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), format!("{}\n", BUBBLE_HEADER.join(",")));
        let (rows, notes) = bubble_rows(&[1.0], 0.1, 1e-9).unwrap();
        assert!(rows.is_empty());
        assert_eq!(notes.len(), 1);
    }
}

use std::fmt::Write as _;
use std::io::Read as _;

use serde::{Deserialize, Serialize};
use serrekit::ci_lattice::{build_lattice, determinant_sign, verify_identities};
use serrekit::dimension_calculus::{dimension_report, rational_string, rederive_serre_dims, DimensionReport, FDim};
use serrekit::lattice::VerificationReport;
use serrekit::{AmbientSpace, CompleteIntersection, LatticeOperator, Rational};

use crate::{catalog, CliError, Outcome, ReportArgs, EXIT_FAIL, EXIT_PASS};

pub const SCHEMA_VERSION: u32 = 1;

/// One input line: `{"n": 5, "degrees": [2, 3]}` or
/// `{"weights": [1, 1, 2], "degrees": [2], "split": 0}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Entry {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<i64>>,
    pub degrees: Vec<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub split: Option<usize>,
}

impl Entry {
    pub fn variety(&self) -> Result<CompleteIntersection, CliError> {
        let space = match (&self.n, &self.weights) {
            (Some(n), None) => AmbientSpace::projective(*n),
            (None, Some(w)) => AmbientSpace::weighted(w.clone()).map_err(CliError::input)?,
            _ => return Err(CliError::input("give exactly one of `n` (--pn) and `weights`")),
        };
        let x = CompleteIntersection::new(space, &self.degrees).map_err(CliError::input)?;
        match self.split {
            Some(i) => x.with_split(i).map_err(CliError::input),
            None => Ok(x),
        }
    }
}

#[derive(Debug, Serialize)]
struct Report {
    schema_version: u32,
    entries: Vec<EntryReport>,
}

#[derive(Debug, Serialize)]
struct DimPair {
    upper: String,
    lower: String,
}

impl From<&FDim> for DimPair {
    fn from(f: &FDim) -> Self {
        DimPair { upper: f.upper().to_string(), lower: f.lower().to_string() }
    }
}

#[derive(Debug, Serialize)]
struct TwistDimsOut {
    source: Option<DimPair>,
    target: DimPair,
}

#[derive(Debug, Serialize)]
struct LatticeSummary {
    rank: usize,
    residual_rank: usize,
    serre_det: String,
    rotation_det: String,
}

#[derive(Debug, Serialize)]
struct CheckOut {
    name: String,
    passed: bool,
    detail: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<Vec<String>>,
}

#[derive(Debug, Serialize)]
pub(crate) struct VerificationOut {
    subject: String,
    passed: bool,
    checks: Vec<CheckOut>,
}

impl From<&VerificationReport> for VerificationOut {
    fn from(r: &VerificationReport) -> Self {
        let checks = r
            .checks
            .iter()
            .map(|c| CheckOut {
                name: c.name.clone(),
                passed: c.passed,
                detail: c.detail.clone(),
                witness: c.witness.as_ref().map(|w| w.iter().map(ToString::to_string).collect()),
            })
            .collect();
        VerificationOut { subject: r.subject.clone(), passed: r.passed(), checks }
    }
}

#[derive(Debug, Serialize)]
struct EntryReport {
    input: Entry,
    variety: String,
    dim: i64,
    index: i64,
    degree: Option<i64>,
    usdim: Option<String>,
    lsdim: Option<String>,
    frac_cy: Option<String>,
    hochschild_level: Option<i64>,
    geometric_possible: Option<bool>,
    geometric_required_dim: Option<i64>,
    serre_invariant_possible: Option<bool>,
    twist_dims: Option<TwistDimsOut>,
    ledger_consistent: bool,
    lattice: Option<LatticeSummary>,
    verification: Option<VerificationOut>,
    assumptions: Vec<String>,
    passed: bool,
}

fn report_entry(entry: &Entry, max_n: usize) -> Result<EntryReport, CliError> {
    let x = entry.variety()?;
    let (dims, ledger_consistent) = if x.is_straight() {
        let dims = dimension_report(&x).map_err(CliError::input)?;
        let ledger = rederive_serre_dims(&x.clone().with_default_split()).map_err(CliError::input)?.consistent();
        (Some(dims), ledger)
    } else {
        (None, true)
    };
    let mut lattice = None;
    let mut verification = None;
    if x.space().n() as usize <= max_n {
        let l = build_lattice(&x).map_err(CliError::input)?;
        let residual = l.residual().map_err(CliError::input)?;
        let rotation_det = l
            .rotation_operator()
            .and_then(|r| residual.restrict(&r))
            .map(|r| det_string(&r))
            .unwrap_or_else(|e| format!("error: {e}"));
        let serre_det = det_string(&l.serre_operator());
        lattice = Some(LatticeSummary { rank: l.rank(), residual_rank: residual.rank(), serre_det, rotation_det });
        verification = Some(VerificationOut::from(&verify_identities(&x)));
    }
    let passed = ledger_consistent && verification.as_ref().is_none_or(|v| v.passed);
    let mut assumptions = dims.as_ref().map_or_else(Vec::new, |d| d.notes.clone());
    if dims.is_none() {
        assumptions.push("dimension formulas need straight projective space; lattice data only".into());
        assumptions.push("only the span of the twisting sheaf classes is modeled".into());
    }
    if lattice.is_some() {
        assumptions.push("lattice checks run on the span of twisting sheaves and are necessary conditions only".into());
    }
    let rat = |f: fn(&DimensionReport) -> &Rational| dims.as_ref().map(|d| rational_string(f(d)));
    Ok(EntryReport {
        input: entry.clone(),
        variety: x.to_string(),
        dim: x.dim(),
        index: x.index(),
        degree: x.is_straight().then(|| x.degree()),
        usdim: rat(|d| &d.usdim),
        lsdim: rat(|d| &d.lsdim),
        frac_cy: dims.as_ref().and_then(|d| d.frac_cy.as_ref().map(rational_string)),
        hochschild_level: dims.as_ref().map(|d| d.hl),
        geometric_possible: dims.as_ref().map(|d| d.geometricity.possible),
        geometric_required_dim: dims.as_ref().and_then(|d| d.geometricity.required_dim),
        serre_invariant_possible: dims.as_ref().map(|d| d.serre_invariant_possible),
        twist_dims: dims.as_ref().map(|d| TwistDimsOut {
            source: d.twist_dims.source.as_ref().map(DimPair::from),
            target: DimPair::from(&d.twist_dims.target),
        }),
        ledger_consistent,
        lattice,
        verification,
        assumptions,
        passed,
    })
}

fn det_string(op: &LatticeOperator) -> String {
    determinant_sign(op).map_or_else(|| op.determinant().to_string(), |s| s.to_string())
}

fn read_batch(path: &str) -> Result<Vec<Entry>, CliError> {
    let text = if path == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(|source| CliError::Io { path: path.into(), source })?;
        s
    } else {
        std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.into(), source })?
    };
    parse_batch(&text)
}

/// JSON lines; blank lines are skipped.
pub(crate) fn parse_batch(text: &str) -> Result<Vec<Entry>, CliError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| serde_json::from_str(l).map_err(|e| CliError::Input(format!("line {}: {e}", i + 1))))
        .collect()
}

fn table(r: &EntryReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{}", r.variety);
    let _ = writeln!(
        s,
        "  dim {}  index {}{}",
        r.dim,
        r.index,
        r.degree.map_or(String::new(), |d| format!("  degree {d}"))
    );
    if let (Some(u), Some(l), Some(hl)) = (&r.usdim, &r.lsdim, r.hochschild_level) {
        let _ = writeln!(s, "  usdim {u}  lsdim {l}  hl {hl}");
    }
    if let Some(f) = &r.frac_cy {
        let _ = writeln!(s, "  fractional CY dimension {f}");
    }
    if let Some(possible) = r.geometric_possible {
        let geo = match r.geometric_required_dim {
            Some(d) if possible => format!("possible, only as a dimension {d} variety"),
            _ if possible => "possible".into(),
            _ => "impossible".into(),
        };
        let _ = writeln!(s, "  geometric: {geo}");
    }
    if let Some(p) = r.serre_invariant_possible {
        let _ = writeln!(s, "  Serre-invariant stability: {}", if p { "not excluded" } else { "excluded" });
    }
    if let Some(t) = &r.twist_dims {
        let src = t.source.as_ref().map_or("-".into(), |p| format!("({}, {})", p.upper, p.lower));
        let _ = writeln!(s, "  twist dims: source {src}  target ({}, {})", t.target.upper, t.target.lower);
    }
    if let Some(l) = &r.lattice {
        let _ = writeln!(
            s,
            "  lattice rank {}  residual rank {}  det S {}  det O_B|R {}",
            l.rank, l.residual_rank, l.serre_det, l.rotation_det
        );
    }
    if let Some(v) = &r.verification {
        let failed: Vec<&str> = v.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
        if failed.is_empty() {
            let _ = writeln!(s, "  identities: PASS ({} checks)", v.checks.len());
        } else {
            let _ = writeln!(s, "  identities: FAIL ({})", failed.join("; "));
        }
    }
    for a in &r.assumptions {
        let _ = writeln!(s, "  note: {a}");
    }
    s
}

pub(crate) fn run(a: &ReportArgs) -> Result<Outcome, CliError> {
    if a.catalog {
        return Ok(Outcome { code: EXIT_PASS, stdout: catalog::render(a.json), stderr: String::new() });
    }
    let entries = match (&a.batch, a.pn, &a.weights) {
        (Some(path), _, _) => read_batch(path)?,
        (None, None, None) => return Err(CliError::input("one of --pn, --weights, --batch or --catalog is required")),
        (None, n, w) => {
            let degrees = a.degrees.clone().ok_or_else(|| CliError::input("--degrees is required"))?;
            vec![Entry { n, weights: w.clone(), degrees, split: a.split }]
        }
    };
    let reports = entries.iter().map(|e| report_entry(e, a.max_n)).collect::<Result<Vec<_>, _>>()?;
    let passed = reports.iter().all(|r| r.passed);
    let stdout = if a.json {
        let report = Report { schema_version: SCHEMA_VERSION, entries: reports };
        serde_json::to_string_pretty(&report).expect("report serializes") + "\n"
    } else {
        reports.iter().map(table).collect::<Vec<_>>().join("\n")
    };
    Ok(Outcome { code: if passed { EXIT_PASS } else { EXIT_FAIL }, stdout, stderr: String::new() })
}

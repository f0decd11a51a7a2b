use serde::Serialize;
use serrekit::ci_lattice::{split_family, verify_identities};
use serrekit::lattice::VerificationReport;
use serrekit::quadric_spinor::{verify_quadric_divisor_identity, verify_refined_identity, QuadricError};
use serrekit::CompleteIntersection;

use crate::report::VerificationOut;
use crate::{CliError, Outcome, VerifyArgs, EXIT_FAIL, EXIT_PASS};

#[derive(Serialize)]
struct Summary {
    schema_version: u32,
    family: String,
    total: usize,
    failed: usize,
    results: Vec<VerificationOut>,
}

fn hypersurfaces(max_n: usize) -> Vec<CompleteIntersection> {
    let mut out = Vec::new();
    for n in 2..=max_n {
        for d in 2..=n as i64 {
            out.push(CompleteIntersection::projective(n, &[d]).expect("Fano").with_split(0).expect("one degree"));
        }
    }
    out
}

fn odd_range(max_n: usize) -> impl Iterator<Item = i64> {
    (5..=max_n as i64).filter(|n| n % 2 == 1)
}

fn quadric_divisors(max_n: usize) -> Result<Vec<VerificationReport>, QuadricError> {
    let mut out = Vec::new();
    for n in odd_range(max_n) {
        for d in 1..=n - 2 {
            match verify_quadric_divisor_identity(n, d) {
                Err(QuadricError::ExponentNotIntegral(_)) => {}
                r => out.push(r?),
            }
        }
    }
    Ok(out)
}

/// Failed check of the first failing report, with its witness if any.
fn first_witness(reports: &[VerificationReport]) -> Option<String> {
    let r = reports.iter().find(|r| !r.passed())?;
    let c = r.first_failure()?;
    let mut s = format!("{}: {} ({})", r.subject, c.name, c.detail);
    if let Some(w) = &c.witness {
        let w: Vec<String> = w.iter().map(ToString::to_string).collect();
        s.push_str(&format!(" witness [{}]", w.join(", ")));
    }
    Some(s)
}

pub(crate) fn run(a: &VerifyArgs) -> Result<Outcome, CliError> {
    let selected = [a.hypersurfaces, a.quadric_divisors, a.refined].iter().filter(|&&b| b).count();
    if selected > 1 {
        return Err(CliError::input("choose at most one of --hypersurfaces, --quadric-divisors, --refined"));
    }
    let (family, reports) = if a.hypersurfaces {
        (format!("hypersurfaces n <= {}", a.max_n), hypersurfaces(a.max_n).iter().map(verify_identities).collect())
    } else if a.quadric_divisors {
        (format!("quadric divisors n <= {}", a.max_n), quadric_divisors(a.max_n).map_err(CliError::input)?)
    } else if a.refined {
        let reports =
            odd_range(a.max_n).map(verify_refined_identity).collect::<Result<Vec<_>, _>>().map_err(CliError::input)?;
        (format!("refined n <= {}", a.max_n), reports)
    } else {
        let family = split_family(a.max_n, a.max_k);
        (
            format!("complete intersections n <= {}, k <= {}", a.max_n, a.max_k),
            family.iter().map(verify_identities).collect(),
        )
    };
    let failed = reports.iter().filter(|r| !r.passed()).count();
    let code = if failed == 0 { EXIT_PASS } else { EXIT_FAIL };
    let stderr = first_witness(&reports).map(|w| format!("first failure: {w}\n")).unwrap_or_default();
    let stdout = if a.json {
        let summary = Summary {
            schema_version: crate::SCHEMA_VERSION,
            family,
            total: reports.len(),
            failed,
            results: reports.iter().map(VerificationOut::from).collect(),
        };
        serde_json::to_string_pretty(&summary).expect("summary serializes") + "\n"
    } else {
        let mut s = format!("# {family}\n");
        for r in &reports {
            s.push_str(&format!(
                "{} {} ({} checks)\n",
                if r.passed() { "PASS" } else { "FAIL" },
                r.subject,
                r.checks.len()
            ));
        }
        s.push_str(&format!("{} of {} passed\n", reports.len() - failed, reports.len()));
        s
    };
    Ok(Outcome { code, stdout, stderr })
}

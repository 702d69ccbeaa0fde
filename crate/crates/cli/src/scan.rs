use std::io::Write;
use std::str::FromStr;

use obstruct_core::obstruct::{classify_all, CertificateEntry, ObstructionReport, Verdict};
use obstruct_core::pretzel;
use serde::Serialize;

use crate::args::{Filter, Format, ScanArgs};
use crate::CliError;

/// Odd values `lo, lo+2, …, hi`; empty when `lo > hi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OddRange {
    pub lo: i64,
    pub hi: i64,
}

impl FromStr for OddRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (a, b) = s.split_once(':').unwrap_or((s, s));
        let end = |t: &str| {
            let x: i64 = t
                .trim()
                .parse()
                .map_err(|_| format!("bad range endpoint {t:?} in {s:?}"))?;
            if x % 2 == 0 {
                return Err(format!("range endpoint {x} is even"));
            }
            if x.abs() > pretzel::MAX_PARAMETER {
                return Err(format!("range endpoint {x} is too large"));
            }
            Ok(x)
        };
        Ok(OddRange {
            lo: end(a)?,
            hi: end(b)?,
        })
    }
}

impl OddRange {
    pub fn values(&self) -> Vec<i64> {
        if self.lo > self.hi {
            return Vec::new();
        }
        (self.lo..=self.hi).step_by(2).collect()
    }
}

#[derive(Debug, Clone)]
pub struct ScanSpec {
    pub p: Vec<i64>,
    pub q: Vec<i64>,
    pub r: Vec<i64>,
    pub filter: Option<Filter>,
    pub format: Format,
    pub threads: Option<usize>,
}

fn bounded(bound: i64) -> Vec<i64> {
    let pos: Vec<i64> = (3..=bound).step_by(2).collect();
    pos.iter()
        .rev()
        .map(|x| -x)
        .chain(pos.iter().copied())
        .collect()
}

impl ScanSpec {
    pub fn from_args(args: &ScanArgs) -> Result<Self, CliError> {
        if let Some(b) = args.bound {
            if b.abs() > pretzel::MAX_PARAMETER {
                return Err(CliError::Invalid(format!("bound {b} is too large")));
            }
        }
        let axis = |given: &Option<String>, name: &str| -> Result<Vec<i64>, CliError> {
            match (given, args.bound) {
                (Some(s), _) => Ok(s.parse::<OddRange>().map_err(CliError::Invalid)?.values()),
                (None, Some(b)) => Ok(bounded(b)),
                (None, None) => Err(CliError::Usage(format!("give --{name} or --bound"))),
            }
        };
        if args.threads == Some(0) {
            return Err(CliError::Usage("--threads must be positive".into()));
        }
        Ok(ScanSpec {
            p: axis(&args.p, "p")?,
            q: axis(&args.q, "q")?,
            r: axis(&args.r, "r")?,
            filter: args.filter,
            format: args.format,
            threads: args.threads,
        })
    }

    fn triples(&self) -> Vec<(i64, i64, i64)> {
        let mut out = Vec::new();
        for &p in &self.p {
            for &q in &self.q {
                for &r in &self.r {
                    out.push((p, q, r));
                }
            }
        }
        if self.filter == Some(Filter::TrivialAlexander) {
            // cheap to decide before classifying
            out.retain(|&(p, q, r)| {
                pretzel::normalize(p, q, r).is_ok_and(|k| k.sigma_form_det() == -1)
            });
        }
        out
    }

    pub fn run(&self) -> Result<Vec<ObstructionReport>, CliError> {
        let reports =
            classify_all(&self.triples(), self.threads).map_err(CliError::from_obstruct)?;
        Ok(reports
            .into_iter()
            .filter(|rep| match self.filter {
                None | Some(Filter::TrivialAlexander) => true,
                Some(Filter::Slice) => {
                    matches!(rep.verdict, Verdict::Ribbon | Verdict::SliceCandidate)
                }
                Some(Filter::Infinite) => rep.verdict == Verdict::InfiniteOrder,
            })
            .collect())
    }
}

#[derive(Debug, Serialize)]
pub struct Row {
    p: i64,
    q: i64,
    r: i64,
    mirrored: bool,
    verdict: &'static str,
    determinant: i64,
    signature: i64,
    lambda_set: String,
    vanishing: String,
    required: String,
    certificate_branch: &'static str,
}

fn joined<T: ToString>(xs: impl IntoIterator<Item = T>) -> String {
    xs.into_iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(";")
}

impl From<&ObstructionReport> for Row {
    fn from(rep: &ObstructionReport) -> Self {
        let (lambda_set, vanishing, required) = match rep.find("vanishing") {
            Some(CertificateEntry::Vanishing { entries, required }) => (
                joined(entries.iter().map(|e| e.lambda)),
                joined(entries.iter().map(|e| e.count)),
                required.map(|x| x.to_string()).unwrap_or_default(),
            ),
            _ => Default::default(),
        };
        Row {
            p: rep.knot.p,
            q: rep.knot.q,
            r: rep.knot.r,
            mirrored: rep.knot.mirrored,
            verdict: rep.verdict.as_str(),
            determinant: rep.invariants.determinant,
            signature: rep.invariants.signature,
            lambda_set,
            vanishing,
            required,
            certificate_branch: rep.certificate_branch().unwrap_or(""),
        }
    }
}

pub fn write(
    reports: &[ObstructionReport],
    format: Format,
    out: impl Write,
) -> Result<(), CliError> {
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            for rep in reports {
                w.serialize(Row::from(rep)).map_err(CliError::io)?;
            }
            w.flush().map_err(CliError::io)?;
        }
        Format::Json => {
            let mut out = out;
            for rep in reports {
                writeln!(out, "{}", rep.to_json()).map_err(CliError::io)?;
            }
        }
    }
    Ok(())
}

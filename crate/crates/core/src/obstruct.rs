//! Slice and concordance-order verdicts for odd pretzel knots, each carrying
//! the arithmetic that decided it.

use std::collections::BTreeSet;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::donaldson::{self, DonaldsonError};
use crate::linalg::{exact_sqrt, IntMatrix};
use crate::pretzel::{self, KnotInvariants, PretzelError, PretzelKnot};
use crate::spinc;

pub const SCHEMA_VERSION: u32 = 1;

/// `ℓ` can be at most 3 for a slice twist knot, so its determinant at most 9.
const TWIST_DET_BOUND: i64 = 9;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ObstructError {
    #[error(transparent)]
    Pretzel(#[from] PretzelError),
    #[error(transparent)]
    Donaldson(#[from] DonaldsonError),
    #[error("parameters out of range: {0}")]
    OutOfRange(String),
    #[error("-q = {neg_q} is not p+r+min(p,r) = {expected}")]
    WrongCase { neg_q: i64, expected: i64 },
    #[error("arithmetic overflow")]
    Overflow,
    #[error("worker pool: {0}")]
    Pool(String),
}

type Result<T, E = ObstructError> = std::result::Result<T, E>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Verdict {
    Ribbon,
    InfiniteOrder,
    SliceCandidate,
    /// Not slice, but the lattice bounds leave room for finite order
    /// (the figure-eight knot).
    FiniteOrderCandidate,
    OutOfScope,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Ribbon => "Ribbon",
            Verdict::InfiniteOrder => "InfiniteOrder",
            Verdict::SliceCandidate => "SliceCandidate",
            Verdict::FiniteOrderCandidate => "FiniteOrderCandidate",
            Verdict::OutOfScope => "OutOfScope",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VanishingEntry {
    pub lambda: i64,
    /// `|V|`, the order of the subgroup where `d` must vanish.
    pub v_order: i64,
    /// Distinct classes `[Ax]`, `x ∈ {±1}ⁿ`.
    pub count: u64,
    /// `p + r + 1`.
    pub bound: i64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderBound {
    pub n: u32,
    /// `|pq+qr+pr|ⁿ`, the square of the required count.
    pub lhs: i128,
    /// `(p+r+1)²ⁿ`, the square of the attainable count.
    pub rhs: i128,
    pub fires: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RefinedCount {
    pub max_vanishing: i64,
    pub required: i64,
    pub fires: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwistKnot {
    pub q: i64,
    pub determinant: i64,
    /// `√det` when the determinant is a square.
    pub ell: Option<i64>,
    /// Solutions of `λ² + (λ+1)² = −q`.
    pub lambdas: Vec<i64>,
    pub verdict: Verdict,
}

/// One applied test and its numbers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "test", content = "data", rename_all = "snake_case")]
pub enum CertificateEntry {
    Signature {
        value: i64,
        form_det: i64,
        fires: bool,
    },
    RibbonCondition {
        holds: bool,
    },
    Determinant {
        value: i64,
        square_root: Option<i64>,
    },
    LambdaSolutions {
        lambdas: Vec<i64>,
    },
    Vanishing {
        entries: Vec<VanishingEntry>,
        required: Option<i64>,
    },
    OrderBound(OrderBound),
    BMatrixConstraints {
        neg_q: i64,
        allowed: Vec<i64>,
        bound: i64,
        fires: bool,
    },
    RefinedCount(RefinedCount),
    TwistKnot(TwistKnot),
    LensSpace(pretzel::LensSpace),
    Note {
        text: String,
    },
    OutOfScope {
        reason: String,
    },
}

impl CertificateEntry {
    pub fn name(&self) -> &'static str {
        match self {
            CertificateEntry::Signature { .. } => "signature",
            CertificateEntry::RibbonCondition { .. } => "ribbon_condition",
            CertificateEntry::Determinant { .. } => "determinant",
            CertificateEntry::LambdaSolutions { .. } => "lambda_solutions",
            CertificateEntry::Vanishing { .. } => "vanishing",
            CertificateEntry::OrderBound(_) => "order_bound",
            CertificateEntry::BMatrixConstraints { .. } => "b_matrix_constraints",
            CertificateEntry::RefinedCount(_) => "refined_count",
            CertificateEntry::TwistKnot(_) => "twist_knot",
            CertificateEntry::LensSpace(_) => "lens_space",
            CertificateEntry::Note { .. } => "note",
            CertificateEntry::OutOfScope { .. } => "out_of_scope",
        }
    }

    /// Whether this entry on its own settles `verdict`.
    pub fn justifies(&self, verdict: Verdict) -> bool {
        use CertificateEntry as C;
        match (self, verdict) {
            (C::RibbonCondition { holds: true }, Verdict::Ribbon) => true,
            (C::Signature { fires: true, .. }, Verdict::InfiniteOrder) => true,
            (C::OrderBound(b), Verdict::InfiniteOrder) => b.fires,
            (C::BMatrixConstraints { fires: true, .. }, Verdict::InfiniteOrder) => true,
            (C::RefinedCount(c), Verdict::InfiniteOrder) => c.fires,
            (C::TwistKnot(t), v) => t.verdict == v,
            (C::OutOfScope { .. }, Verdict::OutOfScope) => true,
            _ => false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Timing {
    pub micros: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObstructionReport {
    pub schema: u32,
    pub knot: PretzelKnot,
    pub verdict: Verdict,
    pub invariants: KnotInvariants,
    pub certificate: Vec<CertificateEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timing: Option<Timing>,
}

impl ObstructionReport {
    /// Name of the last entry that settles the verdict.
    pub fn certificate_branch(&self) -> Option<&'static str> {
        self.certificate
            .iter()
            .rev()
            .find(|e| e.justifies(self.verdict))
            .map(CertificateEntry::name)
    }

    pub fn find(&self, name: &str) -> Option<&CertificateEntry> {
        self.certificate.iter().find(|e| e.name() == name)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serialises")
    }
}

fn check_reduced(p: i64, q: i64, r: i64) -> Result<()> {
    for x in [p, q, r] {
        pretzel::check_parameter(x)?;
    }
    if p < 3 || r < 3 || q > -3 {
        return Err(ObstructError::OutOfRange(format!(
            "need p, r >= 3 and q <= -3, got ({p},{q},{r})"
        )));
    }
    Ok(())
}

/// Compares the `|s|^{n/2}` classes on which `d` must vanish for `#ⁿ K`
/// with the at most `(p+r+1)ⁿ` that the lattice allows, after squaring.
pub fn order_bound_test(p: i64, q: i64, r: i64, n: u32) -> Result<OrderBound> {
    check_reduced(p, q, r)?;
    if n == 0 {
        return Err(ObstructError::OutOfRange("n must be positive".into()));
    }
    let s = (p * q + q * r + p * r).unsigned_abs() as i128;
    let t = (p + r + 1) as i128;
    let lhs = s.checked_pow(n).ok_or(ObstructError::Overflow)?;
    let rhs = t.checked_pow(2 * n).ok_or(ObstructError::Overflow)?;
    Ok(OrderBound {
        n,
        lhs,
        rhs,
        fires: lhs > rhs,
    })
}

/// The case `−q = p + r + min(p,r)`, where the diagonal of `B` pins down two
/// coordinates and the attainable count drops by `2(max(p,r) + 1)`.
pub fn refined_count_test(p: i64, q: i64, r: i64) -> Result<RefinedCount> {
    check_reduced(p, q, r)?;
    let expected = p + r + p.min(r);
    if -q != expected {
        return Err(ObstructError::WrongCase {
            neg_q: -q,
            expected,
        });
    }
    let max_vanishing = (p + r + 1) * (p + r + 1) - 2 * (p.max(r) + 1);
    let required = -q * (p + r) - p * r;
    Ok(RefinedCount {
        max_vanishing,
        required,
        fires: required > max_vanishing,
    })
}

/// `−q` values left open by the bound `−q < p + r + 2 + min(p,r)` and the diagonal of `B`.
fn b_matrix_constraints(p: i64, q: i64, r: i64) -> CertificateEntry {
    let m = p.min(r);
    let allowed: BTreeSet<i64> = [p, r, p + r + m].into();
    CertificateEntry::BMatrixConstraints {
        neg_q: -q,
        allowed: allowed.iter().copied().collect(),
        bound: p + r + 2 + m,
        fires: !allowed.contains(&-q),
    }
}

fn slice_evidence(k: &PretzelKnot, certificate: &mut Vec<CertificateEntry>) -> Result<()> {
    let (p, q, r) = k.params();
    let lambdas = donaldson::lambda_solutions(p, q, r)?;
    let required = exact_sqrt(pretzel::determinant(k) as i128).map(|x| x as i64);
    let entries = lambdas
        .iter()
        .map(|&lambda| VanishingEntry {
            lambda,
            v_order: spinc::v_order(p, r, lambda),
            count: spinc::vanishing_count(p, r, lambda),
            bound: p + r + 1,
        })
        .collect();
    certificate.push(CertificateEntry::LambdaSolutions { lambdas });
    certificate.push(CertificateEntry::Vanishing { entries, required });
    Ok(())
}

fn report(
    k: PretzelKnot,
    verdict: Verdict,
    certificate: Vec<CertificateEntry>,
) -> Result<ObstructionReport> {
    Ok(ObstructionReport {
        schema: SCHEMA_VERSION,
        knot: k,
        verdict,
        invariants: pretzel::invariants(&k)?,
        certificate,
        timing: None,
    })
}

fn is_amphichiral_family(k: &PretzelKnot) -> bool {
    // P(p, −(p+2), 1) normalises to P(1, −(p+2), p)
    k.p == 1 && k.q == -(k.r + 2)
}

fn out_of_scope(k: PretzelKnot) -> Result<ObstructionReport> {
    let mut certificate = vec![CertificateEntry::OutOfScope {
        reason: "a parameter is ±1; the knot is 2-bridge".into(),
    }];
    if k.is_twist_knot() {
        let t = twist_knot_report(if k.mirrored { -k.q } else { k.q })?;
        certificate.extend(t.certificate);
    } else {
        let v = [k.p, k.q, k.r];
        let i = v.iter().position(|x| x.abs() == 1).expect("min |.| is 1");
        let sign = v[i];
        let others: Vec<i64> = (0..3).filter(|&j| j != i).map(|j| v[j] * sign).collect();
        certificate.push(CertificateEntry::LensSpace(pretzel::two_bridge_lens(
            others[0], others[1],
        )));
    }
    if is_amphichiral_family(&k) {
        certificate.push(CertificateEntry::Note {
            text: "P(p,-(p+2),1) is amphichiral, so of order at most two".into(),
        });
    }
    report(k, Verdict::OutOfScope, certificate)
}

/// Verdict for `P(p,q,r)`.
///
/// For `min |·| ≥ 3` the answer is always `Ribbon` or `InfiniteOrder`.
pub fn classify(p: i64, q: i64, r: i64) -> Result<ObstructionReport> {
    let k = pretzel::normalize(p, q, r)?;
    if k.min_abs() == 1 {
        return out_of_scope(k);
    }
    let (p, q, r) = k.params();
    let mut certificate = Vec::new();

    let holds = pretzel::ribbon_condition(&k);
    certificate.push(CertificateEntry::RibbonCondition { holds });
    let s = k.sigma_form_det();
    let signature = pretzel::signature(&k)?;
    certificate.push(CertificateEntry::Signature {
        value: signature,
        form_det: s,
        fires: s > 0,
    });
    if holds {
        slice_evidence(&k, &mut certificate)?;
        return report(k, Verdict::Ribbon, certificate);
    }
    if s > 0 {
        return report(k, Verdict::InfiniteOrder, certificate);
    }

    // s < 0: the reduced plumbing is negative definite
    let det = pretzel::determinant(&k);
    certificate.push(CertificateEntry::Determinant {
        value: det,
        square_root: exact_sqrt(det as i128).map(|x| x as i64),
    });
    slice_evidence(&k, &mut certificate)?;

    let bound = order_bound_test(p, q, r, 1)?;
    certificate.push(CertificateEntry::OrderBound(bound));
    if !bound.fires {
        let constraints = b_matrix_constraints(p, q, r);
        let fires = matches!(
            constraints,
            CertificateEntry::BMatrixConstraints { fires: true, .. }
        );
        certificate.push(constraints);
        if !fires {
            // −q ∈ {p, r} is ribbon, so only p + r + min is left
            certificate.push(CertificateEntry::RefinedCount(refined_count_test(p, q, r)?));
        }
    }
    report(k, Verdict::InfiniteOrder, certificate)
}

/// The twist knot `P(1,q,1)`, with `G = [[−2,1],[1,q]]` and
/// `A = [[1,−1],[λ,λ+1]]`.
pub fn twist_knot_report(q: i64) -> Result<ObstructionReport> {
    pretzel::check_parameter(q)?;
    let k = pretzel::normalize(1, q, 1)?;
    let s = 2 * q + 1;
    let determinant = s.abs();
    let ell = exact_sqrt(determinant as i128).map(|x| x as i64);
    let lambdas = donaldson::lambda_solutions_unchecked(1, q, 1);
    let verdict = if s > 0 {
        Verdict::InfiniteOrder
    } else if determinant == 1 || determinant == TWIST_DET_BOUND {
        Verdict::SliceCandidate
    } else if determinant <= TWIST_DET_BOUND {
        Verdict::FiniteOrderCandidate
    } else {
        Verdict::InfiniteOrder
    };
    let signature = pretzel::signature(&k)?;
    let certificate = vec![
        CertificateEntry::Signature {
            value: signature,
            form_det: s,
            fires: s > 0,
        },
        CertificateEntry::TwistKnot(TwistKnot {
            q,
            determinant,
            ell,
            lambdas,
            verdict,
        }),
    ];
    report(k, verdict, certificate)
}

/// The twist-knot lattice data, for display.
pub fn twist_matrices(q: i64, lambda: i64) -> (IntMatrix, IntMatrix) {
    let g = IntMatrix::from_rows(&[[-2, 1], [1, q]]).expect("2x2");
    let a = IntMatrix::from_rows(&[[1, -1], [lambda, lambda + 1]]).expect("2x2");
    (g, a)
}

/// Odd triples with `3 ≤ |·| ≤ bound` and trivial Alexander polynomial
/// (`pq+qr+pr = −1`), one per knot, classified. The condition is invariant
/// under mirroring, so each knot comes with its mirror.
pub fn fintushel_stern_scan(bound: i64) -> Result<Vec<ObstructionReport>> {
    let mut triples = Vec::new();
    // s = −1 rules out equal signs, so the normal form has one negative
    // entry in the middle: q(p + r) = −(1 + pr)
    for p in (3..=bound).step_by(2) {
        for r in (p..=bound).step_by(2) {
            let num = 1 + p * r;
            if num % (p + r) == 0 {
                let q = -num / (p + r);
                if q % 2 != 0 && (3..=bound).contains(&-q) {
                    triples.push((p, q, r));
                    triples.push((-p, -q, -r));
                }
            }
        }
    }
    classify_all(&triples, None)
}

/// Threads from `OBSTRUCT_THREADS`, if set to a positive integer.
pub fn env_threads() -> Option<usize> {
    std::env::var("OBSTRUCT_THREADS")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .filter(|&n: &usize| n > 0)
}

/// Classifies every triple once per distinct knot, in knot order.
///
/// `threads` (or `OBSTRUCT_THREADS`) caps the worker pool; the result does
/// not depend on it.
pub fn classify_all(
    triples: &[(i64, i64, i64)],
    threads: Option<usize>,
) -> Result<Vec<ObstructionReport>> {
    let knots: BTreeSet<PretzelKnot> = triples
        .iter()
        .map(|&(p, q, r)| pretzel::normalize(p, q, r))
        .collect::<Result<_, _>>()?;
    let knots: Vec<PretzelKnot> = knots.into_iter().collect();
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads.or_else(env_threads) {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| ObstructError::Pool(e.to_string()))?;
    pool.install(|| {
        knots
            .par_iter()
            .map(|k| {
                let (p, q, r) = k.original_params();
                classify(p, q, r)
            })
            .collect()
    })
}

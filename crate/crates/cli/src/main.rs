mod args;
mod scan;

use std::io::{self, Write};
use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use clap::error::ErrorKind;
use clap::Parser;
use obstruct_core::donaldson::{self, DonaldsonError};
use obstruct_core::linalg::{rational, IntMatrix, LinalgError};
use obstruct_core::obstruct::{
    self, CertificateEntry, ObstructError, ObstructionReport, Timing, Verdict,
};
use obstruct_core::plumbing::{PlumbingError, WeightedForest};
use obstruct_core::pretzel::{self, PretzelError};
use obstruct_core::spinc::{oracle, CorrectionTerms, SpincError};

use args::{Cli, Command, OrderCommand};
use scan::ScanSpec;

/// Exit codes: 1 usage, 2 invalid input, 3 unsupported input or a failed
/// hypothesis.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Invalid(String),
    Unsupported(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Invalid(_) => 2,
            CliError::Unsupported(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Invalid(m) | CliError::Unsupported(m) => m,
        }
    }

    pub fn io(e: impl std::fmt::Display) -> Self {
        CliError::Invalid(format!("i/o: {e}"))
    }

    pub fn from_obstruct(e: ObstructError) -> Self {
        match e {
            ObstructError::Pretzel(e) => e.into(),
            ObstructError::Donaldson(e) => e.into(),
            ObstructError::OutOfRange(_) => CliError::Invalid(e.to_string()),
            ObstructError::WrongCase { .. } | ObstructError::Overflow | ObstructError::Pool(_) => {
                CliError::Unsupported(e.to_string())
            }
        }
    }
}

impl From<PretzelError> for CliError {
    fn from(e: PretzelError) -> Self {
        match e {
            PretzelError::OutOfDomain(_) | PretzelError::SingularForm => {
                CliError::Unsupported(e.to_string())
            }
            _ => CliError::Invalid(e.to_string()),
        }
    }
}

impl From<DonaldsonError> for CliError {
    fn from(e: DonaldsonError) -> Self {
        match e {
            DonaldsonError::NotNegativeDefinite => CliError::Unsupported(e.to_string()),
            _ => CliError::Invalid(e.to_string()),
        }
    }
}

impl From<SpincError> for CliError {
    fn from(e: SpincError) -> Self {
        match e {
            SpincError::Plumbing(_) | SpincError::Linalg(LinalgError::DimensionMismatch(_)) => {
                CliError::Invalid(e.to_string())
            }
            _ => CliError::Unsupported(e.to_string()),
        }
    }
}

impl From<PlumbingError> for CliError {
    fn from(e: PlumbingError) -> Self {
        CliError::Invalid(e.to_string())
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    let stdout = io::stdout();
    match run(cli, &mut stdout.lock()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}

fn run(cli: Cli, out: &mut impl Write) -> Result<()> {
    match cli.command {
        Command::Classify {
            p,
            q,
            r,
            json,
            timing,
        } => {
            let start = Instant::now();
            let mut rep = obstruct::classify(p, q, r).map_err(CliError::from_obstruct)?;
            if timing {
                rep.timing = Some(Timing {
                    micros: start.elapsed().as_micros() as u64,
                });
            }
            if json {
                writeln!(out, "{}", rep.to_json()).map_err(CliError::io)
            } else {
                print_report(&rep, out)
            }
        }
        Command::Scan(args) => {
            let spec = ScanSpec::from_args(&args)?;
            let reports = spec.run()?;
            scan::write(&reports, spec.format, out)
        }
        Command::Dinv {
            graph,
            oracle,
            class,
        } => cmd_dinv(&graph, oracle, class, out),
        Command::Embed { graph, rank } => cmd_embed(&graph, rank, out),
        Command::Twist { q, json } => {
            let rep = obstruct::twist_knot_report(q).map_err(CliError::from_obstruct)?;
            if json {
                writeln!(out, "{}", rep.to_json()).map_err(CliError::io)
            } else {
                print_twist(&rep, out)
            }
        }
        Command::Order(cmd) => cmd_order(cmd, out),
    }
}

fn describe(v: Verdict) -> &'static str {
    match v {
        Verdict::Ribbon => "Ribbon (slice)",
        Verdict::InfiniteOrder => "InfiniteOrder (infinite order in the concordance group)",
        Verdict::SliceCandidate => "SliceCandidate (no obstruction applies)",
        Verdict::FiniteOrderCandidate => "finite-order candidate",
        Verdict::OutOfScope => "OutOfScope",
    }
}

fn print_report(rep: &ObstructionReport, out: &mut impl Write) -> Result<()> {
    let inv = &rep.invariants;
    let mut text = format!("{}: {}\n", rep.knot, describe(rep.verdict));
    text += &format!(
        "  determinant {}, signature {}, Alexander {}\n",
        inv.determinant, inv.signature, inv.alexander
    );
    if let Some(branch) = rep.certificate_branch() {
        text += &format!("  decided by: {branch}\n");
    }
    for entry in &rep.certificate {
        let value = serde_json::to_value(entry).expect("entry serialises");
        let data = value.get("data").map(|d| d.to_string()).unwrap_or_default();
        text += &format!("  {}: {}\n", entry.name(), data);
    }
    if let Some(t) = rep.timing {
        text += &format!("  time: {} us\n", t.micros);
    }
    out.write_all(text.as_bytes()).map_err(CliError::io)
}

fn print_twist(rep: &ObstructionReport, out: &mut impl Write) -> Result<()> {
    let Some(CertificateEntry::TwistKnot(t)) = rep.find("twist_knot") else {
        return print_report(rep, out);
    };
    let mut text = match rep.verdict {
        Verdict::FiniteOrderCandidate => format!(
            "{}: finite-order candidate (det {})\n",
            rep.knot, t.determinant
        ),
        v => format!("{}: {}\n", rep.knot, v),
    };
    if t.q > 0 {
        text += &format!("  signature {} is nonzero\n", rep.invariants.signature);
    } else {
        match t.ell {
            Some(l) => {
                text += &format!(
                    "  determinant {}, ℓ = {l} (slice needs ℓ <= 3)\n",
                    t.determinant
                )
            }
            None => text += &format!("  determinant {} is not a square\n", t.determinant),
        }
        let lambdas: Vec<String> = t.lambdas.iter().map(|l| l.to_string()).collect();
        text += &format!("  λ² + (λ+1)² = {}: λ ∈ {{{}}}\n", -t.q, lambdas.join(", "));
    }
    out.write_all(text.as_bytes()).map_err(CliError::io)
}

/// A graph file is either `{"vertices": [...], "edges": [[i, j], ...]}` or
/// a bare symmetric matrix.
enum GraphInput {
    Forest(WeightedForest),
    Matrix(IntMatrix),
}

impl GraphInput {
    fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))?;
        let value: serde_json::Value = serde_json::from_str(&text)
            .map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))?;
        if value.is_array() {
            let rows: Vec<Vec<i64>> = serde_json::from_value(value)
                .map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))?;
            let m = IntMatrix::from_rows(&rows).map_err(|e| CliError::Invalid(e.to_string()))?;
            let symmetric =
                m.is_square() && (0..m.rows()).all(|i| (0..i).all(|j| m[(i, j)] == m[(j, i)]));
            if !symmetric || m.rows() == 0 {
                return Err(CliError::Invalid(
                    "matrix is not square and symmetric".into(),
                ));
            }
            Ok(GraphInput::Matrix(m))
        } else {
            WeightedForest::from_json(&text)
                .map(GraphInput::Forest)
                .map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))
        }
    }

    fn matrix(&self) -> IntMatrix {
        match self {
            GraphInput::Forest(f) => f.incidence_matrix(),
            GraphInput::Matrix(m) => m.clone(),
        }
    }

    fn forest(self) -> Result<WeightedForest> {
        match self {
            GraphInput::Forest(f) => Ok(f),
            GraphInput::Matrix(m) => Ok(WeightedForest::from_incidence(&m)?),
        }
    }
}

fn cmd_dinv(path: &Path, check: bool, class: Option<u64>, out: &mut impl Write) -> Result<()> {
    let forest = GraphInput::load(path)?.forest()?;
    let terms = CorrectionTerms::from_forest(&forest)?;
    let order = terms.cokernel().order();
    let indices: Vec<u64> = match class {
        Some(k) if k >= order => {
            return Err(CliError::Invalid(format!(
                "class {k} out of range; there are {order}"
            )))
        }
        Some(k) => vec![k],
        None => (0..order).collect(),
    };
    let mut text = format!(
        "# {} classes, cokernel moduli {:?}\n",
        order,
        terms.cokernel().moduli()
    );
    text += "index\tclass\td\n";
    let mut values = Vec::with_capacity(indices.len());
    for &k in &indices {
        let s = terms.cokernel().element(k);
        let d = terms.d_invariant(&s)?;
        text += &format!("{k}\t{}\t{}\n", d.class, rational::format(&d.value));
        values.push(d);
    }
    out.write_all(text.as_bytes()).map_err(CliError::io)?;
    if check {
        let brute = oracle::brute_force_d_invariants(terms.form())?;
        let mismatches: Vec<String> = indices
            .iter()
            .zip(&values)
            .filter(|(&k, d)| {
                brute[k as usize].value != d.value || brute[k as usize].class != d.class
            })
            .map(|(&k, d)| {
                format!(
                    "class {k}: engine {} oracle {}",
                    rational::format(&d.value),
                    rational::format(&brute[k as usize].value)
                )
            })
            .collect();
        if !mismatches.is_empty() {
            writeln!(out, "MISMATCH").map_err(CliError::io)?;
            return Err(CliError::Unsupported(mismatches.join("; ")));
        }
        writeln!(out, "MATCH").map_err(CliError::io)?;
    }
    Ok(())
}

fn cmd_embed(path: &Path, rank: Option<usize>, out: &mut impl Write) -> Result<()> {
    let g = GraphInput::load(path)?.matrix();
    let rank = rank.unwrap_or(g.rows());
    let found = donaldson::find_embeddings(&g, rank)?;
    let mut text = String::new();
    for (i, e) in found.iter().enumerate() {
        text += &format!("# embedding {}\n", i + 1);
        for row in e.matrix.to_rows() {
            let cells: Vec<String> = row.iter().map(|x| x.to_string()).collect();
            text += &format!("[{}]\n", cells.join(", "));
        }
    }
    text += &format!("embeddings: {}\n", found.len());
    out.write_all(text.as_bytes()).map_err(CliError::io)
}

fn cmd_order(cmd: OrderCommand, out: &mut impl Write) -> Result<()> {
    let text = match cmd {
        OrderCommand::Bound { p, q, r, n } => {
            let b = obstruct::order_bound_test(p, q, r, n).map_err(CliError::from_obstruct)?;
            format!(
                "|pq+qr+pr|^{n} = {}, (p+r+1)^{} = {}: {}\n",
                b.lhs,
                2 * n,
                b.rhs,
                if b.fires { "fires" } else { "does not fire" }
            )
        }
        OrderCommand::Refined { p, q, r } => {
            let c = obstruct::refined_count_test(p, q, r).map_err(CliError::from_obstruct)?;
            format!(
                "max_vanishing {}, required {}: {}\n",
                c.max_vanishing,
                c.required,
                if c.fires { "fires" } else { "does not fire" }
            )
        }
        OrderCommand::BMatrices { p, q, r, n, bound } => {
            for x in [p, q, r] {
                pretzel::check_parameter(x)?;
            }
            let bound = bound.unwrap_or_else(|| donaldson::default_b_bound(p, q, r));
            let found = donaldson::search_b_matrices(p, q, r, n, bound)?;
            let mut text = String::new();
            for (i, b) in found.iter().enumerate() {
                text += &format!("# solution {}\n", i + 1);
                for row in b.b.to_rows() {
                    let cells: Vec<String> = row.iter().map(|x| x.to_string()).collect();
                    text += &format!("[{}]\n", cells.join(", "));
                }
            }
            text += &format!("solutions: {}\n", found.len());
            text
        }
    };
    out.write_all(text.as_bytes()).map_err(CliError::io)
}

//! `paley` command-line front end.
//!
//! Exit codes: 0 on success, 1 on domain errors and failed checks (with a
//! JSON object `{"error": kind, "message": text}` on stderr), 2 on usage
//! errors.

pub mod store;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};
use paley_core::bounds::{bounds_table, write_csv, BoundReport, OmegaExact};
use paley_core::ffield::prime_power_decomposition;
use paley_core::paley::{SearchMode, SearchOptions, DEFAULT_NODE_LIMIT};
use paley_core::stepanov::{
    build_certificate, conjecture_scan, t1_bound_for_clique, verify_certificate, CertificateReport,
    StepanovCertificate,
};
use paley_core::{Clique, FieldDesc, PaleyGraph};

use store::{RecordOutcome, ResultsStore, StoreError, StoreRow};

/// Largest q for which `bounds` computes omega itself when the store has none.
const BOUNDS_EXACT_LIMIT: u64 = 1000;

#[derive(Parser, Debug)]
#[command(name = "paley", version, about = "Clique numbers of Paley graphs: exact search, bounds and certificates")]
struct Cli {
    /// Results store (default: $PALEY_STORE, else ./paley-results.csv)
    #[arg(long, global = true)]
    store: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the field description for F_{p^r} as JSON
    Field { p: u64, r: u32 },
    /// Print the quadratic residues of F_q as labels
    Qr { q: u64 },
    /// Compute omega(P_q) and record it in the store
    Omega {
        q: u64,
        /// Node budget for the exact search
        #[arg(long, default_value_t = DEFAULT_NODE_LIMIT)]
        budget: u64,
        /// Wall-clock limit in seconds for the exact search
        #[arg(long)]
        time_limit: Option<u64>,
        /// Randomised greedy clique instead of exact search
        #[arg(long)]
        heuristic: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Split the search over threads (any maximum witness)
        #[arg(long)]
        parallel: bool,
        /// Do not write to the store
        #[arg(long)]
        no_store: bool,
    },
    /// Upper bounds on omega(P_q) for one q or a range
    Bounds {
        q: Option<u64>,
        /// Every Paley order in [QMIN, QMAX]
        #[arg(long, num_args = 2, value_names = ["QMIN", "QMAX"], conflicts_with = "q")]
        sweep: Option<Vec<u64>>,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
    /// Build and verify a polynomial certificate for a clique
    Certify {
        q: u64,
        /// Comma-separated vertex labels
        #[arg(long, value_parser = parse_labels)]
        clique: Labels,
        /// Certificate parameter; chosen automatically when omitted
        #[arg(long)]
        n: Option<u64>,
        /// Write the certificate JSON here
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-verify a certificate file
    VerifyCert { file: PathBuf },
    /// Scan the exponents m for the variant certificate
    ScanConjecture {
        q: u64,
        #[arg(long)]
        n: u64,
        #[arg(long, value_parser = parse_labels, conflicts_with = "greedy")]
        clique: Option<Labels>,
        /// Use a greedy clique with this seed (default when no clique is given)
        #[arg(long)]
        greedy: Option<u64>,
        /// Require q = p^(2s+1) and n of the variant digit shape
        #[arg(long)]
        strict: bool,
        /// Print the full report as JSON
        #[arg(long)]
        json: bool,
    },
    /// Write P_q in DIMACS edge format
    ExportDimacs {
        q: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Json,
    Csv,
}

/// Comma-separated vertex labels, e.g. `0,1,4`.
#[derive(Clone, Debug)]
struct Labels(Vec<u64>);

fn parse_labels(s: &str) -> Result<Labels, String> {
    s.split(',')
        .map(|t| t.trim().parse::<u64>().map_err(|e| format!("bad label {t:?}: {e}")))
        .collect::<Result<_, _>>()
        .map(Labels)
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Domain(#[from] paley_core::Error),
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    CheckFailed(String),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    fn kind(&self) -> &'static str {
        match self {
            CliError::Domain(e) => e.kind(),
            CliError::Store(_) => "Store",
            CliError::Io(_) => "Io",
            CliError::Json(_) => "Json",
            CliError::CheckFailed(_) => "CheckFailed",
            CliError::Usage(_) => "Usage",
        }
    }
}

type CliResult = Result<(), CliError>;

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    0
                }
                _ => {
                    let _ = write!(err, "{text}");
                    2
                }
            };
        }
    };
    let store = ResultsStore::locate(cli.store.as_deref());
    match dispatch(cli.command, &store, out) {
        Ok(()) => 0,
        Err(CliError::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
        Err(e) => {
            let body = serde_json::json!({ "error": e.kind(), "message": e.to_string() });
            let _ = writeln!(err, "{body}");
            1
        }
    }
}

fn dispatch(command: Command, store: &ResultsStore, out: &mut dyn Write) -> CliResult {
    match command {
        Command::Field { p, r } => {
            let f = FieldDesc::new(p, r)?;
            writeln!(out, "{}", serde_json::to_string(&f)?)?;
        }
        Command::Qr { q } => {
            let f = FieldDesc::from_order(q)?;
            let qr = f.quadratic_residue_set();
            let body = serde_json::json!({ "q": q, "count": qr.len(), "residues": qr });
            writeln!(out, "{body}")?;
        }
        Command::Omega {
            q,
            budget,
            time_limit,
            heuristic,
            seed,
            parallel,
            no_store,
        } => omega(store, out, q, budget, time_limit, heuristic, seed, parallel, no_store)?,
        Command::Bounds { q, sweep, format } => bounds(store, out, q, sweep, format)?,
        Command::Certify { q, clique, n, out: file } => certify(out, q, clique.0, n, file)?,
        Command::VerifyCert { file } => verify_file(out, &file)?,
        Command::ScanConjecture {
            q,
            n,
            clique,
            greedy,
            strict,
            json,
        } => {
            let f = FieldDesc::from_order(q)?;
            let clique = match clique {
                Some(Labels(vs)) => Clique::new(q, vs, false),
                None => PaleyGraph::new(&f)?.greedy_clique(greedy.unwrap_or(0)),
            };
            let report = conjecture_scan(&f, &clique, n, strict)?;
            if json {
                writeln!(out, "{}", serde_json::to_string_pretty(&report)?)?;
            } else {
                writeln!(out, "q = {q}, n = {n}, clique size {}, strict = {strict}", report.clique_size)?;
                writeln!(out, "L(n): {} elements, 0 in L(n): {}", report.l_set.len(), report.l_set.first() == Some(&0))?;
                writeln!(out, "M: {} elements", report.m_count)?;
                for v in &report.verdicts {
                    let verdict = if v.independent { "independent" } else { "dependent" };
                    writeln!(out, "  m = {}: rank(L rows) = {}, rank = {}, {verdict}", v.m, v.rank_l_rows, v.rank_full)?;
                }
                writeln!(out, "independent m exists: {}", report.exists_independent)?;
                if let Some(v) = &report.variant {
                    writeln!(out, "variant system for m = {}, D = {:?}: solvable = {}", v.m, v.d, v.solvable)?;
                }
                if let Some(b) = &report.implied_bound {
                    writeln!(out, "implied: {b}")?;
                }
                if let Some(x) = report.conditional_bound_display {
                    writeln!(out, "conditional bound (display only): N < {x:.3}")?;
                }
            }
        }
        Command::ExportDimacs { q, out: file } => {
            let f = FieldDesc::from_order(q)?;
            let text = PaleyGraph::new(&f)?.to_dimacs();
            match file {
                Some(path) => std::fs::write(path, text)?,
                None => out.write_all(text.as_bytes())?,
            }
        }
    }
    Ok(())
}

fn now() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
}

#[allow(clippy::too_many_arguments)]
fn omega(
    store: &ResultsStore,
    out: &mut dyn Write,
    q: u64,
    budget: u64,
    time_limit: Option<u64>,
    heuristic: bool,
    seed: u64,
    parallel: bool,
    no_store: bool,
) -> CliResult {
    let f = FieldDesc::from_order(q)?;
    let g = PaleyGraph::new(&f)?;
    let (clique, method) = if heuristic {
        (g.greedy_clique(seed), format!("greedy(seed={seed})"))
    } else {
        let opts = SearchOptions {
            node_limit: budget,
            time_limit: time_limit.map(Duration::from_secs),
            mode: if parallel { SearchMode::Parallel } else { SearchMode::Canonical },
            ..SearchOptions::default()
        };
        let method = if parallel { "exact-parallel" } else { "exact" };
        (g.max_clique(&opts), method.to_string())
    };
    let status = if clique.exact { "exact" } else { "lower bound" };
    writeln!(out, "omega(P_{q}) = {} ({status})", clique.len())?;
    writeln!(out, "witness: {:?}", clique.vertices)?;
    if !no_store {
        let row = StoreRow {
            q,
            p: f.p(),
            r: f.r(),
            omega: clique.len() as u64,
            exact: clique.exact,
            method,
            witness: serde_json::to_string(&clique.vertices)?,
            timestamp: now(),
            version: env!("CARGO_PKG_VERSION").to_string(),
        };
        match store.record(&row)? {
            RecordOutcome::Appended => writeln!(out, "recorded in {}", store.path().display())?,
            RecordOutcome::KeptExisting => writeln!(out, "store already has an exact value for q = {q}")?,
        }
    }
    Ok(())
}

fn is_paley_order(q: u64) -> bool {
    q % 4 == 1 && prime_power_decomposition(q).is_some()
}

fn omega_for_bounds(store: &ResultsStore, q: u64) -> Result<Option<OmegaExact>, CliError> {
    if let Some(row) = store.exact(q)? {
        return Ok(Some(OmegaExact {
            value: row.omega,
            provenance: format!("store ({}, {})", row.method, row.timestamp),
        }));
    }
    if q <= BOUNDS_EXACT_LIMIT {
        let f = FieldDesc::from_order(q)?;
        let c = PaleyGraph::new(&f)?.max_clique(&SearchOptions::default());
        if c.exact {
            return Ok(Some(OmegaExact {
                value: c.len() as u64,
                provenance: "exact search".into(),
            }));
        }
    }
    Ok(None)
}

fn bounds(store: &ResultsStore, out: &mut dyn Write, q: Option<u64>, sweep: Option<Vec<u64>>, format: Format) -> CliResult {
    let orders: Vec<u64> = match (q, sweep) {
        (Some(q), None) => vec![q],
        (None, Some(range)) => (range[0]..=range[1]).filter(|&q| is_paley_order(q)).collect(),
        _ => return Err(CliError::Usage("give either q or --sweep QMIN QMAX".into())),
    };
    let reports = orders
        .iter()
        .map(|&q| Ok(bounds_table(q, omega_for_bounds(store, q)?)?))
        .collect::<Result<Vec<BoundReport>, CliError>>()?;
    match format {
        Format::Json => {
            if reports.len() == 1 {
                writeln!(out, "{}", serde_json::to_string_pretty(&reports[0])?)?;
            } else {
                writeln!(out, "{}", serde_json::to_string_pretty(&reports)?)?;
            }
        }
        Format::Csv => write_csv(&mut *out, &reports, true)?,
        Format::Table => {
            for r in &reports {
                write_table(out, r)?;
            }
        }
    }
    Ok(())
}

fn write_table(out: &mut dyn Write, r: &BoundReport) -> std::io::Result<()> {
    writeln!(out, "q = {} = {}^{}", r.q, r.p, r.r)?;
    writeln!(out, "  {:<10} {:>8}  inequality", "bound", "value")?;
    for e in &r.entries {
        writeln!(out, "  {:<10} {:>8}  {}", e.name, e.value, e.inequality)?;
    }
    if let Some(b) = &r.main_branches {
        writeln!(out, "  main branches: {} / {}", b.ceil_branch, b.quadratic_branch)?;
    }
    if let Some(d) = &r.closed_form_display {
        writeln!(out, "  closed form (display only): [{:.4}, {:.4}]", d.lower(), d.upper())?;
    }
    match &r.omega_exact {
        Some(w) => {
            let ok = if r.omega_respects_all() { "within all bounds" } else { "VIOLATES a bound" };
            writeln!(out, "  omega = {} [{}], {ok}", w.value, w.provenance)?
        }
        None => writeln!(out, "  omega unknown")?,
    }
    Ok(())
}

fn write_report(out: &mut dyn Write, report: &CertificateReport) -> std::io::Result<()> {
    for c in &report.checks {
        let mark = if c.passed { "ok  " } else { "FAIL" };
        writeln!(out, "  [{mark}] {:<18} {}", c.name, c.detail)?;
    }
    writeln!(
        out,
        "  multiplicity {} (required {}) against degree {}",
        report.total_multiplicity, report.required_multiplicity, report.degree
    )
}

fn certify(out: &mut dyn Write, q: u64, vertices: Vec<u64>, n: Option<u64>, file: Option<PathBuf>) -> CliResult {
    let f = FieldDesc::from_order(q)?;
    let clique = Clique::new(q, vertices, false);
    let cert = match n {
        Some(n) => build_certificate(&f, &clique, n)?,
        None => {
            let t = t1_bound_for_clique(&f, &clique)?;
            writeln!(out, "n = {} chosen by {:?}; implied N ≤ {}", t.n, t.method, t.bound)?;
            t.certificate
        }
    };
    let report = verify_certificate(&cert);
    writeln!(out, "certificate for q = {q}, n = {}, N = {}", cert.n, cert.vertices.len())?;
    write_report(out, &report)?;
    writeln!(out, "conclusion: {}", cert.conclusion)?;
    if let Some(path) = file {
        std::fs::write(&path, certificate_json(&cert)?)?;
        writeln!(out, "written to {}", path.display())?;
    }
    if !report.passed {
        return Err(CliError::CheckFailed("certificate verification failed".into()));
    }
    Ok(())
}

fn certificate_json(cert: &StepanovCertificate) -> serde_json::Result<String> {
    Ok(serde_json::to_string_pretty(cert)? + "\n")
}

fn verify_file(out: &mut dyn Write, path: &PathBuf) -> CliResult {
    let text = std::fs::read_to_string(path)?;
    let cert: StepanovCertificate = serde_json::from_str(&text)?;
    let report = verify_certificate(&cert);
    let identical = certificate_json(&cert)? == text;
    writeln!(out, "certificate {} (q = {}, n = {})", path.display(), cert.field.q(), cert.n)?;
    write_report(out, &report)?;
    writeln!(out, "  canonical encoding: {}", if identical { "identical" } else { "differs" })?;
    writeln!(out, "conclusion: {}", cert.conclusion)?;
    if !report.passed {
        return Err(CliError::CheckFailed("certificate verification failed".into()));
    }
    writeln!(out, "verified")?;
    Ok(())
}

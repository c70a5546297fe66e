use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use stanley::analysis::{
    congruence_check, conjecture_scan, elementary_inequality_check, gg_difference_check, gg_enumerator_check,
    hardy_ramanujan_table, power_sum_check, meinardus_report, monotonicity_check, ratio_convergence_report,
    sign_pattern_check, half_ratio_check, upper_bound_check,
};
use stanley::injection::{
    full_map, injectivity_audit, strictness_witness, verify_image_conditions, AuditMode, ResidueClassSpec,
};
use stanley::partitions::{self, classify_range, CLASSIFY_LIMIT};
use stanley::products::{derivation_identities, verify_dissection, verify_gg_factorization, verify_jtp, CatalogId, CATALOG};
use stanley::{Error, Execution, Length, Partition, ScanReport, Sign, Table};

const DEFAULT_MAX_N: usize = 10_000;
const GG_ENUMERATION_CAP: usize = 100;

#[derive(Parser)]
#[command(name = "stanley", version, about = "q-series, partition statistics and the residue-class injection")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Tsv,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Suite {
    Dissection,
    Jtp,
    Gg,
    Bounds,
    Signs,
    Monotone,
    Congruence,
    All,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReportKind {
    /// c_{2n}/c_{2n+1} against 1 + sqrt(2)
    Ratio,
    /// c_{2n+i} over its Meinardus asymptotic
    Meinardus,
    /// p0(n)/p(n) against 1/2
    Half,
    /// n p(n) / exp(pi sqrt(2n/3)) against 1/(4 sqrt 3)
    HardyRamanujan,
    /// brute-force p0(n), p2(n) by classification
    Classify,
    /// the two closing conjectures on c_n
    Conjectures,
}

#[derive(Subcommand)]
enum Command {
    /// Print coefficients 0..=N of a catalog series
    Expand {
        name: String,
        n: usize,
        #[arg(long, value_enum, default_value = "tsv")]
        format: Format,
    },
    /// Run a verification suite; exit 1 on any violation
    Verify {
        #[arg(value_enum)]
        suite: Suite,
        n: Option<usize>,
        /// Use the full acceptance depth (N = 2000) when N is omitted
        #[arg(long)]
        deep: bool,
        #[arg(long, value_enum, default_value = "tsv")]
        format: Format,
    },
    /// Apply the injection to one partition and print its trace as JSON
    Map {
        partition: String,
        m: u32,
        r: u32,
        #[arg(value_name = "L")]
        len: Length,
    },
    /// Print a codomain partition of n outside the (8, 3) image, if any
    Witness {
        n: usize,
        #[arg(long = "len", value_name = "L", default_value = "inf")]
        len: Length,
        /// Print witnesses for every size 0..=N
        #[arg(long)]
        all: bool,
    },
    /// Exhaustively audit the injection for every size up to NMAX
    Audit {
        m: u32,
        r: u32,
        #[arg(value_name = "L")]
        len: Length,
        nmax: usize,
        #[arg(long, value_enum, default_value = "tsv")]
        format: Format,
    },
    /// Domain partitions of n next to their images
    Table {
        #[arg(long, default_value_t = 8)]
        m: u32,
        #[arg(long, default_value_t = 3)]
        r: u32,
        #[arg(long = "len", value_name = "L", default_value = "3")]
        len: Length,
        #[arg(long, default_value_t = 19)]
        n: usize,
        #[arg(long, value_enum, default_value = "tsv")]
        format: Format,
    },
    /// Emit an inspection table
    Report {
        #[arg(value_enum)]
        kind: ReportKind,
        n: usize,
        #[arg(long, value_enum, default_value = "tsv")]
        format: Format,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Invariant(_) => 1,
            _ => 2,
        };
        Failure { code, message: e.to_string() }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: 2, message: message.into() }
}

fn max_n() -> Result<usize, Failure> {
    match std::env::var("STANLEY_MAX_N") {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| usage(format!("STANLEY_MAX_N must be a nonnegative integer, got {v:?}"))),
        Err(_) => Ok(DEFAULT_MAX_N),
    }
}

fn capped(n: usize) -> Result<u32, Failure> {
    let cap = max_n()?;
    if n > cap {
        return Err(usage(format!("N = {n} exceeds the cap {cap} (set STANLEY_MAX_N to raise it)")));
    }
    u32::try_from(n).map_err(|_| usage(format!("N = {n} is too large")))
}

fn spec(m: u32, r: u32, len: Length) -> Result<ResidueClassSpec, Failure> {
    Ok(ResidueClassSpec::new(m, r, len)?)
}

fn print_json<T: Serialize>(value: &T) {
    println!("{}", serde_json::to_string_pretty(value).expect("serializable output"));
}

/// Prints the reports and returns exit code 1 if any failed.
fn emit_reports(reports: &[ScanReport], format: Format) -> u8 {
    match format {
        Format::Tsv => {
            for r in reports {
                print!("{}", r.to_tsv());
            }
        }
        Format::Json => print_json(&reports),
    }
    if reports.iter().all(|r| r.passed) {
        0
    } else {
        1
    }
}

fn expand(name: &str, n: usize, format: Format) -> Result<u8, Failure> {
    capped(n)?;
    let id: CatalogId = name.parse().map_err(|_| {
        usage(format!("unknown series {name:?}; the catalog is:\n  {}", CATALOG.join("\n  ")))
    })?;
    let named = id.build(n)?;
    match format {
        Format::Tsv => print!("{}", named.series.to_tsv()),
        Format::Json => print_json(&named),
    }
    Ok(0)
}

fn suite_reports(suite: Suite, n: usize) -> Result<Vec<ScanReport>, Failure> {
    let run = |s: Suite| s == suite || suite == Suite::All;
    let mut out = Vec::new();
    if run(Suite::Dissection) {
        out.push(verify_dissection(n));
        out.extend(derivation_identities(n));
    }
    if run(Suite::Jtp) {
        for (s, t) in [(1, 0), (2, 1), (8, 2), (8, -6)] {
            for sign in [Sign::Pos, Sign::Neg] {
                out.push(verify_jtp(s, t, sign, n)?);
            }
        }
    }
    if run(Suite::Gg) {
        out.push(gg_enumerator_check(n.min(GG_ENUMERATION_CAP) as u32)?);
        out.push(gg_difference_check(n.max(4))?);
        out.push(verify_gg_factorization(n));
    }
    if run(Suite::Bounds) {
        out.push(upper_bound_check(n.max(1), true)?);
        out.push(power_sum_check(n.max(1) as u32)?);
        out.push(elementary_inequality_check(10.0, 1000)?);
    }
    if run(Suite::Signs) {
        out.push(sign_pattern_check(n.max(4))?);
    }
    if run(Suite::Monotone) {
        out.push(monotonicity_check(n.max(2))?);
    }
    if run(Suite::Congruence) {
        out.push(congruence_check(n));
    }
    Ok(out)
}

fn verify(suite: Suite, n: Option<usize>, deep: bool, format: Format) -> Result<u8, Failure> {
    let n = n.unwrap_or(if deep { 2000 } else { 500 });
    capped(n)?;
    let reports = suite_reports(suite, n)?;
    Ok(emit_reports(&reports, format))
}

fn map(text: &str, m: u32, r: u32, len: Length) -> Result<u8, Failure> {
    let p: Partition = text.parse()?;
    let spec = spec(m, r, len)?;
    let (_, trace) = full_map(&p, &spec)?;
    print_json(&trace);
    Ok(0)
}

fn witness_line(n: u32, spec: &ResidueClassSpec) -> Result<String, Failure> {
    Ok(match strictness_witness(n, spec)? {
        Some(w) => format!("{n}\t{w}"),
        None => format!("{n}\tnone"),
    })
}

fn witness(n: usize, len: Length, all: bool) -> Result<u8, Failure> {
    let n = capped(n)?;
    let spec = spec(8, 3, len)?;
    let range = if all { 0..=n } else { n..=n };
    for k in range {
        println!("{}", witness_line(k, &spec)?);
    }
    Ok(0)
}

fn audit(m: u32, r: u32, len: Length, nmax: usize, format: Format) -> Result<u8, Failure> {
    let nmax = capped(nmax)?;
    let spec = spec(m, r, len)?;
    let audit = injectivity_audit(nmax, &spec, Execution::Parallel)?;
    let code = if audit.report.passed { 0 } else { 1 };
    match format {
        Format::Json => print_json(&audit),
        Format::Tsv => {
            print!("{}", audit.report.to_tsv());
            if audit.mode == AuditMode::Injection {
                let mut t = Table::new(&["n", "domain", "codomain", "conditioned", "images", "strict"]);
                for c in &audit.cells {
                    t.push(vec![
                        c.n.to_string(),
                        c.domain.to_string(),
                        c.codomain.to_string(),
                        c.conditioned.to_string(),
                        c.images.to_string(),
                        c.strict.to_string(),
                    ]);
                }
                print!("{}", t.to_tsv());
            }
        }
    }
    Ok(code)
}

fn table(m: u32, r: u32, len: Length, n: usize, format: Format) -> Result<u8, Failure> {
    let n = capped(n)?;
    let spec = spec(m, r, len)?;
    let mut t = Table::new(&["domain", "image", "case", "cluster"]);
    let mut images = Vec::new();
    for p in partitions::enumerate(n, &spec.domain_constraint()) {
        let (image, trace) = full_map(&p, &spec)?;
        let cluster = verify_image_conditions(&image, &spec)
            .map(|c| c.to_string())
            .unwrap_or_else(|why| format!("none ({why})"));
        t.push(vec![p.to_string(), image.to_string(), trace.case.to_string(), cluster]);
        images.push(image);
    }
    let mut rest = Table::new(&["outside_image"]);
    for q in partitions::enumerate(n, &spec.codomain_constraint()) {
        if !images.contains(&q) {
            rest.push(vec![q.to_string()]);
        }
    }
    match format {
        Format::Tsv => {
            print!("{}", t.to_tsv());
            println!("domain={}\tcodomain={}", t.rows.len(), t.rows.len() + rest.rows.len());
            print!("{}", rest.to_tsv());
        }
        Format::Json => print_json(&serde_json::json!({
            "spec": spec,
            "n": n,
            "rows": t.to_json(),
            "outside_image": rest.to_json(),
        })),
    }
    Ok(0)
}

fn report(kind: ReportKind, n: usize, format: Format) -> Result<u8, Failure> {
    capped(n)?;
    let (table, scan) = match kind {
        ReportKind::Ratio => {
            let (scan, rows) = ratio_convergence_report(n)?;
            let mut t = Table::new(&["n", "ratio", "deviation"]);
            for r in rows {
                t.push(vec![r.n.to_string(), format!("{:.12}", r.ratio), format!("{:.6e}", r.deviation)]);
            }
            (t, Some(scan))
        }
        ReportKind::Meinardus => {
            let (scan, rows) = meinardus_report(n)?;
            let mut t = Table::new(&["n", "i", "ratio"]);
            for r in rows {
                t.push(vec![r.n.to_string(), r.i.to_string(), format!("{:.12}", r.ratio)]);
            }
            (t, Some(scan))
        }
        ReportKind::Half => {
            let (scan, rows) = half_ratio_check(n)?;
            let mut t = Table::new(&["n", "p0/p", "deviation"]);
            for r in rows {
                t.push(vec![r.n.to_string(), format!("{:.12}", r.ratio), format!("{:.6e}", r.deviation)]);
            }
            (t, Some(scan))
        }
        ReportKind::HardyRamanujan => (hardy_ramanujan_table(n, (n / 20).max(1)), None),
        ReportKind::Classify => {
            if n > CLASSIFY_LIMIT as usize {
                return Err(Error::EnumerationLimit { n: n as u32, limit: CLASSIFY_LIMIT }.into());
            }
            let counts = classify_range(n as u32, Execution::Parallel)?;
            let mut t = Table::new(&["n", "p0", "p2", "p"]);
            for (k, c) in counts.iter().enumerate() {
                t.push(vec![k.to_string(), c.p0.to_string(), c.p2.to_string(), c.total().to_string()]);
            }
            (t, None)
        }
        ReportKind::Conjectures => {
            let scan = conjecture_scan(n)?;
            let mut t = Table::new(&["index", "finding"]);
            for f in &scan.findings {
                t.push(vec![f.index.to_string(), f.detail.clone()]);
            }
            (t, Some(scan))
        }
    };
    match format {
        Format::Tsv => {
            if let Some(s) = &scan {
                println!("{}", s.summary_line());
            }
            print!("{}", table.to_tsv());
        }
        Format::Json => print_json(&serde_json::json!({ "report": scan, "rows": table.to_json() })),
    }
    Ok(match scan {
        Some(s) if !s.passed => 1,
        _ => 0,
    })
}

fn run(cli: Cli) -> Result<u8, Failure> {
    match cli.command {
        Command::Expand { name, n, format } => expand(&name, n, format),
        Command::Verify { suite, n, deep, format } => verify(suite, n, deep, format),
        Command::Map { partition, m, r, len } => map(&partition, m, r, len),
        Command::Witness { n, len, all } => witness(n, len, all),
        Command::Audit { m, r, len, nmax, format } => audit(m, r, len, nmax, format),
        Command::Table { m, r, len, n, format } => table(m, r, len, n, format),
        Command::Report { kind, n, format } => report(kind, n, format),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("stanley: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

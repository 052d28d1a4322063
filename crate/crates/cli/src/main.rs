//! Command line front end: construct and verify codes, print quotient
//! matrices and Krawtchouk values, run the existence screens, and drive the
//! exhaustive search.
//!
//! Exit codes: 0 on acceptance or an admissible verdict, 1 on a rejection
//! or an excluded verdict, 2 on usage and input errors.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use epc_core::codes::{
    code_to_string, extended_binary_hamming_code, hamming_code, hyperoval_code, parse_code,
    trivial_code, verify_extended_all, verify_extended_fast, verify_extended_partition,
    verify_extended_puncture, verify_perfect, Code, VerificationReport,
};
use epc_core::feasibility::{
    classify, feasibility_report, nonexistence_witness, prime_powers_up_to, scan_lengths,
    CheckVerdict, FeasibilityReport, FinalVerdict, NonexistenceWitness, WitnessKind,
};
use epc_core::gf::{prime_power, FieldSpec};
use epc_core::graph::{distance_partition, quotient_matrix, QuotientOutcome};
use epc_core::num_bigint::BigInt;
use epc_core::search::{exhaustive_search, SearchTask};
use epc_core::spectral::{distance_quotient_closed, krawtchouk};
use epc_core::{Error, Limits};
use serde_json::json;

#[derive(Parser)]
#[command(name = "epc", version, about = "Perfect and extended perfect codes in Hamming graphs")]
struct Cli {
    /// Output format; tsv applies to classify and scan tables.
    #[arg(long, global = true, value_enum, default_value_t = Format::Pretty)]
    format: Format,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Override the enumeration and materialization caps.
    #[arg(long, global = true)]
    cap: Option<u128>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Tsv,
    Pretty,
}

#[derive(Subcommand)]
enum Command {
    /// Build a known code family and emit it in the code file format.
    Construct(ConstructArgs),
    /// Check a code file for 1-perfection or extended 1-perfection.
    Verify(VerifyArgs),
    /// Quotient matrix of a distance partition, closed-form or empirical.
    Quotient(QuotientArgs),
    /// Evaluate the Krawtchouk polynomial K_r(x) for H(n,q).
    Krawtchouk(KrawtchoukArgs),
    /// Run the existence screens for one length and alphabet.
    Feasibility(FeasibilityArgs),
    /// Screen every admissible length over GF(p^m) up to k_max.
    Classify(ClassifyArgs),
    /// Classify across a range of alphabets.
    Scan(ScanArgs),
    /// Produce the nonexistence witness for an excluded parameter set.
    Witness(WitnessArgs),
    /// Exhaustively enumerate extended 1-perfect codes in H(n,q).
    Search(SearchArgs),
}

#[derive(Args)]
struct ConstructArgs {
    /// Code family to build.
    #[arg(long, value_enum)]
    family: Family,
    /// Alphabet size (trivial, hamming).
    #[arg(long)]
    q: Option<u64>,
    /// Number of parity checks (hamming, extended-hamming).
    #[arg(long)]
    t: Option<u32>,
    /// Field exponent: the hyperoval code lives over GF(2^m).
    #[arg(long)]
    m: Option<u32>,
    /// Irreducible modulus as ascending coefficients, e.g. "1,1,0,1"
    /// for 1 + x + x^3; defaults to the smallest such polynomial.
    #[arg(long)]
    modulus: Option<String>,
    /// Write the code file here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    /// Single-vertex code in H(2,q).
    Trivial,
    /// 1-perfect Hamming code of length (q^t-1)/(q-1).
    Hamming,
    /// Parity extension of the binary Hamming code, length 2^t.
    ExtendedHamming,
    /// Hyperoval code of length q+2 over GF(q), q = 2^m.
    Hyperoval,
}

#[derive(Args)]
struct VerifyArgs {
    /// Property to check.
    #[arg(long, value_enum)]
    mode: Mode,
    /// Verification route for extended-perfect mode.
    #[arg(long, value_enum, default_value_t = RouteArg::All)]
    route: RouteArg,
    /// Code file: "n q" on the first line, one word per line after.
    file: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Perfect,
    ExtendedPerfect,
}

#[derive(Clone, Copy, ValueEnum)]
enum RouteArg {
    Partition,
    Puncture,
    Fast,
    All,
}

#[derive(Args)]
struct QuotientArgs {
    /// Word length; required without --code.
    #[arg(long)]
    n: Option<u64>,
    /// Alphabet size; required without --code.
    #[arg(long)]
    q: Option<u64>,
    /// Which distance-i graph to take the quotient in.
    #[arg(long, default_value_t = 1)]
    dist: u64,
    /// Code file; computes the empirical quotient of its distance
    /// partition instead of the closed form.
    #[arg(long)]
    code: Option<PathBuf>,
    /// Write the distance partition as "rank cell" lines.
    #[arg(long)]
    export_partition: Option<PathBuf>,
}

#[derive(Args)]
struct KrawtchoukArgs {
    /// Polynomial index r.
    #[arg(long)]
    r: u64,
    /// Evaluation point.
    #[arg(long, allow_hyphen_values = true)]
    x: i64,
    /// Alphabet size.
    #[arg(long)]
    q: u64,
    /// Word length.
    #[arg(long)]
    n: u64,
}

#[derive(Args)]
struct FeasibilityArgs {
    /// Word length; may exceed machine integers.
    #[arg(long)]
    n: String,
    /// Alphabet size.
    #[arg(long)]
    q: u64,
    /// Also evaluate the full distance-n quotient integrality test.
    #[arg(long)]
    full: bool,
}

#[derive(Args)]
struct ClassifyArgs {
    /// Field characteristic (prime).
    #[arg(long)]
    p: u64,
    /// Field exponent: q = p^m.
    #[arg(long)]
    m: u32,
    /// Largest k; lengths run over n = (q^k-1)/(q-1)+1.
    #[arg(long)]
    kmax: u32,
}

#[derive(Args)]
struct ScanArgs {
    /// Scan every prime power alphabet up to this bound.
    #[arg(long, conflicts_with = "q")]
    qmax: Option<u64>,
    /// Explicit alphabet list; every entry must be a prime power.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    q: Vec<u64>,
    /// Largest k per alphabet.
    #[arg(long)]
    kmax: u32,
}

#[derive(Args)]
struct WitnessArgs {
    /// Field characteristic (prime).
    #[arg(long)]
    p: u64,
    /// Field exponent: q = p^m.
    #[arg(long)]
    m: u32,
    /// Length index: n = (q^k-1)/(q-1)+1.
    #[arg(long)]
    k: u32,
}

#[derive(Args)]
struct SearchArgs {
    /// Word length.
    #[arg(long)]
    n: usize,
    /// Alphabet size.
    #[arg(long)]
    q: u64,
    /// Report the count without keeping example codes.
    #[arg(long)]
    count_only: bool,
    /// Enumerate every code directly instead of scaling up the codes
    /// through the zero word by translation.
    #[arg(long)]
    no_normalize: bool,
    /// How many found codes to keep in the report.
    #[arg(long, default_value_t = 1)]
    max_examples: usize,
    /// Write the first found code here in the code file format.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let mut limits = Limits::default();
    if let Some(cap) = cli.cap {
        limits.vertex_visits = cap;
        limits.materialize_words = cap;
    }
    match run(cli.command, cli.format, &limits) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command, format: Format, limits: &Limits) -> Result<u8> {
    match command {
        Command::Construct(args) => run_construct(args, limits),
        Command::Verify(args) => run_verify(args, format, limits),
        Command::Quotient(args) => run_quotient(args, format, limits),
        Command::Krawtchouk(args) => run_krawtchouk(args, format),
        Command::Feasibility(args) => run_feasibility(args, format),
        Command::Classify(args) => run_classify(args, format),
        Command::Scan(args) => run_scan(args, format),
        Command::Witness(args) => run_witness(args, format),
        Command::Search(args) => run_search(args, format, limits),
    }
}

fn parse_modulus(text: &str) -> Result<Vec<u16>> {
    text.split([',', ' '])
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<u16>()
                .with_context(|| format!("bad modulus coefficient {s:?}"))
        })
        .collect()
}

fn run_construct(args: ConstructArgs, limits: &Limits) -> Result<u8> {
    let modulus = args.modulus.as_deref().map(parse_modulus).transpose()?;
    let need = |opt: Option<u64>, flag: &str| {
        opt.with_context(|| format!("--{flag} is required for this family"))
    };
    let code = match args.family {
        Family::Trivial => trivial_code(need(args.q, "q")?)?,
        Family::Hamming => {
            let q = need(args.q, "q")?;
            let t = args.t.context("--t is required for this family")?;
            let field = match &modulus {
                Some(coeffs) => {
                    let (p, m) = prime_power(q)?;
                    FieldSpec::with_modulus(p, m, Some(coeffs.clone()))?
                }
                None => FieldSpec::for_order(q)?,
            };
            hamming_code(&field, t, limits)?
        }
        Family::ExtendedHamming => {
            extended_binary_hamming_code(args.t.context("--t is required for this family")?, limits)?
        }
        Family::Hyperoval => hyperoval_code(
            args.m.context("--m is required for this family")?,
            modulus.as_deref(),
            limits,
        )?,
    };
    let text = code_to_string(&code, limits)?;
    match args.out {
        Some(path) => fs::write(&path, text)
            .with_context(|| format!("cannot write {}", path.display()))?,
        None => print!("{text}"),
    }
    Ok(0)
}

fn run_verify(args: VerifyArgs, format: Format, limits: &Limits) -> Result<u8> {
    let text = fs::read_to_string(&args.file)
        .with_context(|| format!("cannot read {}", args.file.display()))?;
    let code = parse_code(&text)?;
    let reports: Vec<VerificationReport> = match args.mode {
        Mode::Perfect => vec![verify_perfect(&code, limits)?],
        Mode::ExtendedPerfect => match args.route {
            RouteArg::All => verify_extended_all(&code, limits)?,
            RouteArg::Partition => vec![verify_extended_partition(&code, limits)?],
            RouteArg::Puncture => vec![verify_extended_puncture(&code, limits)?],
            RouteArg::Fast => vec![verify_extended_fast(&code, limits)?],
        },
    };
    if format == Format::Json {
        println!("{}", serde_json::to_string_pretty(&reports)?);
    } else {
        println!("code: n = {}, q = {}, size = {}", code.n(), code.q(), code.size());
        for report in &reports {
            let verdict = if report.accepted() { "accept" } else { "reject" };
            println!(
                "route {}: {verdict} ({})",
                format!("{:?}", report.route).to_lowercase(),
                report.detail
            );
            if let Some(quotient) = &report.quotient {
                println!("{quotient}");
            }
            if let Some(witness) = &report.witness {
                println!("  witness: {}", serde_json::to_string(witness)?);
            }
        }
    }
    Ok(if reports.iter().all(VerificationReport::accepted) {
        0
    } else {
        1
    })
}

fn run_quotient(args: QuotientArgs, format: Format, limits: &Limits) -> Result<u8> {
    let Some(path) = &args.code else {
        let n = args.n.context("--n is required without --code")?;
        let q = args.q.context("--q is required without --code")?;
        let matrix = distance_quotient_closed(n, q, args.dist)?;
        if args.export_partition.is_some() {
            bail!("--export-partition needs --code");
        }
        if format == Format::Json {
            println!(
                "{}",
                serde_json::to_string_pretty(&json!({
                    "n": n, "q": q, "dist": args.dist, "source": "closed_form",
                    "quotient": matrix,
                }))?
            );
        } else {
            println!("{matrix}");
        }
        return Ok(0);
    };

    let text = fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))?;
    let code = parse_code(&text)?;
    if args.n.is_some_and(|n| n != code.n() as u64) || args.q.is_some_and(|q| q != code.q()) {
        bail!(
            "code file is over H({},{}), which contradicts --n/--q",
            code.n(),
            code.q()
        );
    }
    let words = code.materialized_words(limits)?;
    let record = distance_partition(&words, limits)?;
    if let Some(path) = &args.export_partition {
        fs::write(path, record.partition.export_text())
            .with_context(|| format!("cannot write {}", path.display()))?;
    }
    let outcome = quotient_matrix(&record.partition, args.dist as usize, limits)?;

    // The closed form applies to 3-cell partitions with integral eigenvalues.
    let closed = if record.partition.cell_count() == 3 {
        distance_quotient_closed(code.n() as u64, code.q(), args.dist).ok()
    } else {
        None
    };
    match outcome {
        QuotientOutcome::Equitable(matrix) => {
            let agreement = closed.as_ref().map(|c| c == &matrix);
            if format == Format::Json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&json!({
                        "n": code.n(), "q": code.q(), "dist": args.dist,
                        "source": "enumeration",
                        "covering_radius": record.covering_radius,
                        "cell_sizes": record.cell_sizes,
                        "quotient": matrix,
                        "matches_closed_form": agreement,
                    }))?
                );
            } else {
                println!(
                    "distance partition: {} cells, covering radius {}",
                    record.partition.cell_count(),
                    record.covering_radius
                );
                println!("{matrix}");
                match agreement {
                    Some(true) => println!("matches the closed form"),
                    Some(false) => println!("differs from the closed form"),
                    None => {}
                }
            }
            Ok(0)
        }
        QuotientOutcome::Inequitable(w) => {
            if format == Format::Json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&json!({
                        "n": code.n(), "q": code.q(), "dist": args.dist,
                        "source": "enumeration",
                        "inequitable": {
                            "cell": w.cell,
                            "reference_rank": w.reference_rank.to_string(),
                            "conflicting_rank": w.conflicting_rank.to_string(),
                            "reference_counts": w.reference_counts,
                            "conflicting_counts": w.conflicting_counts,
                        },
                    }))?
                );
            } else {
                println!(
                    "not equitable: cell {} holds vertices {} and {} with neighbor counts {:?} and {:?}",
                    w.cell, w.reference_rank, w.conflicting_rank,
                    w.reference_counts, w.conflicting_counts
                );
            }
            Ok(1)
        }
    }
}

fn run_krawtchouk(args: KrawtchoukArgs, format: Format) -> Result<u8> {
    let value = krawtchouk(args.r, &BigInt::from(args.x), args.q, args.n)?;
    if format == Format::Json {
        println!(
            "{}",
            serde_json::to_string_pretty(&json!({
                "r": args.r, "x": args.x, "q": args.q, "n": args.n,
                "value": value.to_string(),
            }))?
        );
    } else {
        println!("{value}");
    }
    Ok(0)
}

fn verdict_exit(report: &FeasibilityReport) -> u8 {
    match report.verdict {
        FinalVerdict::Admissible => 0,
        FinalVerdict::Excluded => 1,
    }
}

fn run_feasibility(args: FeasibilityArgs, format: Format) -> Result<u8> {
    let n: BigInt = args
        .n
        .parse()
        .with_context(|| format!("bad length {:?}", args.n))?;
    let report = feasibility_report(&n, args.q, args.full)?;
    if format == Format::Json {
        println!("{}", serde_json::to_string_pretty(&report)?);
    } else {
        print_feasibility_pretty(&report);
    }
    Ok(verdict_exit(&report))
}

fn print_feasibility_pretty(report: &FeasibilityReport) {
    let mut head = format!("n = {}, q = {}", report.n, report.q);
    if let (Some(p), Some(m)) = (report.p, report.m) {
        head.push_str(&format!(" = {p}^{m}"));
    }
    if let Some(k) = report.k {
        head.push_str(&format!(", k = {k}"));
    }
    println!("{head}");
    for check in &report.checks {
        println!(
            "  {:<18} {:<8} {}",
            check.name,
            verdict_word(check.verdict),
            check.detail
        );
    }
    println!("verdict: {}", final_word(report.verdict));
    if let Some(w) = &report.witness {
        println!("witness: {}", witness_line(w));
    }
}

fn verdict_word(v: CheckVerdict) -> &'static str {
    match v {
        CheckVerdict::Pass => "pass",
        CheckVerdict::Fail => "fail",
        CheckVerdict::Skipped => "skipped",
    }
}

fn final_word(v: FinalVerdict) -> &'static str {
    match v {
        FinalVerdict::Admissible => "admissible",
        FinalVerdict::Excluded => "excluded",
    }
}

fn witness_line(w: &NonexistenceWitness) -> String {
    let kind = match w.kind {
        WitnessKind::Parity => "parity",
        WitnessKind::Order => "order",
        WitnessKind::Gcd => "gcd",
    };
    match (w.t, w.d) {
        (Some(t), Some(d)) => format!("{kind} (t = {t}, d = {d}): {}", w.violated),
        _ => format!("{kind}: {}", w.violated),
    }
}

fn print_report_table(reports: &[FeasibilityReport], format: Format) -> Result<()> {
    if format == Format::Json {
        println!("{}", serde_json::to_string_pretty(reports)?);
        return Ok(());
    }
    if format == Format::Tsv {
        println!("q\tk\tn\tverdict\tnote");
    }
    for r in reports {
        let note = r
            .witness
            .as_ref()
            .map(witness_line)
            .or_else(|| {
                r.checks
                    .iter()
                    .rev()
                    .find(|c| c.verdict != CheckVerdict::Skipped)
                    .map(|c| c.detail.clone())
            })
            .unwrap_or_default();
        let k = r.k.map_or_else(|| "-".to_string(), |k| k.to_string());
        if format == Format::Tsv {
            println!("{}\t{k}\t{}\t{}\t{note}", r.q, r.n, final_word(r.verdict));
        } else {
            println!(
                "q = {:<3} k = {:<3} n = {:<12} {:<10} {note}",
                r.q,
                k,
                r.n.to_string(),
                final_word(r.verdict)
            );
        }
    }
    Ok(())
}

fn run_classify(args: ClassifyArgs, format: Format) -> Result<u8> {
    let reports = classify(args.p, args.m, args.kmax)?;
    print_report_table(&reports, format)?;
    Ok(0)
}

fn run_scan(args: ScanArgs, format: Format) -> Result<u8> {
    let qs = match args.qmax {
        Some(qmax) => prime_powers_up_to(qmax),
        None => args.q.clone(),
    };
    if qs.is_empty() {
        bail!("pass --qmax or --q");
    }
    let reports = scan_lengths(&qs, args.kmax)?;
    print_report_table(&reports, format)?;
    Ok(0)
}

fn run_witness(args: WitnessArgs, format: Format) -> Result<u8> {
    match nonexistence_witness(args.p, args.m, args.k) {
        Ok(w) => {
            if format == Format::Json {
                println!("{}", serde_json::to_string_pretty(&w)?);
            } else {
                println!("{}", witness_line(&w));
            }
            Ok(0)
        }
        Err(e @ (Error::WitnessOrderInconclusive { .. } | Error::WitnessSearchExhausted { .. })) => {
            eprintln!(
                "no divisor-based witness within the trial division bound ({e}); \
                 the parameters remain excluded by the divisibility residue"
            );
            Ok(1)
        }
        Err(e) => Err(e.into()),
    }
}

fn run_search(args: SearchArgs, format: Format, limits: &Limits) -> Result<u8> {
    let mut task = SearchTask::new(args.n, args.q);
    task.normalize = !args.no_normalize;
    task.max_examples = if args.count_only {
        0
    } else {
        args.max_examples.max(usize::from(args.out.is_some()))
    };
    let report = exhaustive_search(&task, limits)?;
    if let Some(path) = &args.out {
        let Some(words) = report.examples.first() else {
            bail!("no code found, nothing to write");
        };
        let code = Code::from_words(words.clone())?;
        fs::write(path, code_to_string(&code, limits)?)
            .with_context(|| format!("cannot write {}", path.display()))?;
    }
    if format == Format::Json {
        println!("{}", serde_json::to_string_pretty(&report)?);
    } else {
        if report.vacuous {
            println!(
                "vacuous: ball size {} does not divide {}^{}",
                report.ball,
                report.q,
                report.n - 1
            );
        } else {
            println!(
                "target size {} over a pool of {} candidates",
                report.target_size, report.pool_size
            );
        }
        match report.zero_containing {
            Some(through_zero) => println!(
                "{} codes through the zero word, {} codes in total",
                through_zero, report.count
            ),
            None => println!("{} codes in total", report.count),
        }
        for words in &report.examples {
            let code = Code::from_words(words.clone())?;
            print!("{}", code_to_string(&code, limits)?);
        }
    }
    Ok(if report.count > BigInt::ZERO { 0 } else { 1 })
}

//! `twovolc`: height bounds, oracle sweeps, isogeny-graph export and the
//! bounded-walk supersingularity test from the command line.
//!
//! Exit status: 0 on success, 1 when a verification finds a violation,
//! 2 on bad input, 3 when an effort budget is exceeded. `TWOVOLC_THREADS`
//! sets the number of worker threads.

use std::fs;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use twovolc::arith::{is_prime, isqrt, parse_integer};
use twovolc::bounds::{bound_fp2, emax_bruteforce, height_bound_fp, table1_row, QKind};
use twovolc::curve::{curve_from_j, CurveJson, EllipticCurve, PointCounter};
use twovolc::field::FieldSpec;
use twovolc::sstest::{bench_csv, bench_steps, supersingularity_test, BenchOptions, BoundMode, WalkConfig};
use twovolc::verify::{verify_cases, verify_fp2_tight, verify_lift, verify_sstest, verify_volcanoes, VerifyReport};
use twovolc::volcano::{
    all_components, build_component, measure_height, summarize, to_dot, ComponentSummary, SweepMode,
    FULL_GRAPH_LIMIT,
};
use twovolc::Error;

#[derive(Parser)]
#[command(name = "twovolc", version, about = "Height bounds for 2-isogeny volcanoes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Height bound for ordinary curves over F_p (or F_{p^2} with --fp2).
    Bound {
        p: String,
        #[arg(long)]
        fp2: bool,
    },
    /// Bound on nu2(t^2 - 4q) for q = p or p^2; --oracle scans every trace.
    Emax {
        q: String,
        #[arg(long)]
        oracle: bool,
    },
    /// Enumerate the 2-isogeny graph and measure volcano heights.
    Volcano(VolcanoArgs),
    /// Bounded-walk supersingularity test.
    Sstest(SstestArgs),
    /// Mean steps and wall time of the walk per bound mode, as CSV.
    Bench {
        #[arg(long)]
        bits: u64,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, value_delimiter = ',', default_value = "classic,h2")]
        modes: Vec<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        repeats: usize,
        /// Only sample primes up to this value.
        #[arg(long)]
        max_p: Option<String>,
    },
    /// Mean F_p height bound over random primes p = 1 (mod 8), as CSV.
    Table1 {
        #[arg(long, value_delimiter = ',', required = true)]
        bits: Vec<u64>,
        #[arg(long, default_value_t = 100)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Exhaustive sweeps; exits 1 on any violation.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct VolcanoArgs {
    p: String,
    #[arg(long)]
    fp2: bool,
    /// Only the component containing this j-invariant.
    #[arg(long)]
    j: Option<String>,
    #[arg(long)]
    dot: Option<PathBuf>,
    /// Write the JSON here instead of standard output.
    #[arg(long)]
    json: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct SstestArgs {
    #[arg(long)]
    p: String,
    #[arg(long, conflicts_with_all = ["a", "b", "curve"])]
    j: Option<String>,
    #[arg(long = "A", requires = "b", conflicts_with = "curve")]
    a: Option<String>,
    #[arg(long = "B", requires = "a", conflicts_with = "curve")]
    b: Option<String>,
    /// Curve as JSON `{"p", "degree", "A", "B"}`, inline or a file path.
    #[arg(long)]
    curve: Option<String>,
    /// Read coefficients as elements of F_{p^2}.
    #[arg(long)]
    fp2: bool,
    #[arg(long, default_value = "h2")]
    mode: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Stop after exactly the bound instead of one further attempt.
    #[arg(long)]
    no_extra_attempt: bool,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    emax: bool,
    #[arg(long)]
    cases: bool,
    #[arg(long)]
    fp2_tight: bool,
    #[arg(long)]
    volcano: bool,
    #[arg(long)]
    sstest: bool,
    /// Run the volcano sweep over F_{p^2}.
    #[arg(long)]
    fp2: bool,
    #[arg(long)]
    limit: Option<u64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug)]
enum Failure {
    Input(String),
    Budget(String),
    Violation(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::BudgetExceeded(_) => Failure::Budget(e.to_string()),
            Error::NotAVolcano(_) => Failure::Violation(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

#[derive(Debug, Serialize, Deserialize)]
struct BoundJson {
    p: String,
    p_mod_8: u8,
    field: String,
    case: twovolc::bounds::BoundCase,
    h_bound: u64,
    h2: u64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    e_max: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    b_p: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    a_seq: Option<Vec<String>>,
}

#[derive(Debug, Serialize, Deserialize)]
struct EmaxJson {
    q: String,
    p: String,
    q_kind: QKind,
    e_bound: u64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    e_max: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    argmax_t: Option<String>,
}

#[derive(Debug, Serialize, Deserialize)]
struct VolcanoJson {
    p: String,
    degree: u8,
    components: Vec<ComponentSummary>,
}

/// Writes to standard output; a closed pipe ends the command quietly.
fn emit(text: &str) -> Outcome {
    match std::io::stdout().lock().write_all(text.as_bytes()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn print_json<T: Serialize>(v: &T) -> Outcome {
    emit(&(serde_json::to_string_pretty(v)? + "\n"))
}

fn prime_arg(s: &str) -> Result<BigInt, Failure> {
    let p = parse_integer(s)?;
    if p < BigInt::from(3) || !is_prime(&p) {
        return Err(Error::NotPrime(p.to_string()).into());
    }
    Ok(p)
}

fn cmd_bound(p: &str, fp2: bool) -> Outcome {
    let p = prime_arg(p)?;
    let h2 = bound_fp2(&p)?;
    let p_mod_8 = (&p % 8u32).try_into().expect("residue below 8");
    let out = if fp2 {
        BoundJson {
            p: p.to_string(),
            p_mod_8,
            field: "fp2".into(),
            case: h2.case,
            h_bound: h2.value,
            h2: h2.value,
            e_max: Some(h2.e_bound),
            b_p: None,
            a_seq: None,
        }
    } else {
        let hb = height_bound_fp(&p)?;
        let cert = hb.certificate.as_ref();
        BoundJson {
            p: p.to_string(),
            p_mod_8,
            field: "fp".into(),
            case: hb.case,
            h_bound: hb.value,
            h2: h2.value,
            e_max: cert.map(|c| c.e_max),
            b_p: cert.map(|c| c.b_p.to_string()),
            a_seq: cert.map(|c| c.a_seq.iter().map(|a| a.to_string()).collect()),
        }
    };
    print_json(&out)
}

fn cmd_emax(q: &str, oracle: bool) -> Outcome {
    let q = parse_integer(q)?;
    if q < BigInt::from(3) {
        return Err(Failure::Input(format!("q must be an odd prime or its square, got {q}")));
    }
    let (p, kind) = if is_prime(&q) {
        (q.clone(), QKind::Prime)
    } else {
        let r = isqrt(&q)?;
        if &r * &r != q || !is_prime(&r) {
            return Err(Failure::Input(format!("{q} is neither a prime nor a prime square")));
        }
        (r, QKind::PrimeSquare)
    };
    let e_bound = match kind {
        QKind::Prime => height_bound_fp(&p)?.e_bound,
        QKind::PrimeSquare => bound_fp2(&p)?.e_bound,
    };
    let (e_max, argmax_t) = if oracle {
        let (e, t) = emax_bruteforce(&q, &p)?;
        (Some(e), Some(t.to_string()))
    } else {
        (None, None)
    };
    print_json(&EmaxJson {
        q: q.to_string(),
        p: p.to_string(),
        q_kind: kind,
        e_bound,
        e_max,
        argmax_t,
    })
}

fn cmd_volcano(a: &VolcanoArgs) -> Outcome {
    let p = prime_arg(&a.p)?;
    let field = FieldSpec::new(&p, if a.fp2 { 2 } else { 1 })?;
    let mut comps = match &a.j {
        Some(j) => vec![build_component(&field, &field.parse(j)?, a.seed, FULL_GRAPH_LIMIT as usize)?],
        None => all_components(&field, a.seed)?,
    };
    let counter = PointCounter::new(&field)?;
    let mut parts = Vec::with_capacity(comps.len());
    for mut c in comps.drain(..) {
        c.compute_trace(&counter)?;
        let levels = match c.is_supersingular() {
            Some(false) => measure_height(&c).ok(),
            _ => None,
        };
        parts.push((c, levels));
    }
    if let Some(path) = &a.dot {
        fs::write(path, to_dot(&parts))?;
    }
    let out = VolcanoJson {
        p: p.to_string(),
        degree: field.degree(),
        components: parts.iter().map(|(c, lv)| summarize(c, lv.as_ref())).collect(),
    };
    match &a.json {
        Some(path) => fs::write(path, serde_json::to_string_pretty(&out)? + "\n")?,
        None => print_json(&out)?,
    }
    let bad: usize = out.components.iter().map(|c| c.violations.len()).sum();
    if bad > 0 {
        return Err(Failure::Violation(format!("{bad} volcano shape violations")));
    }
    Ok(())
}

fn sstest_curve(a: &SstestArgs) -> Result<EllipticCurve, Failure> {
    let p = parse_integer(&a.p)?;
    if let Some(raw) = &a.curve {
        let text = if raw.trim_start().starts_with('{') {
            raw.clone()
        } else {
            fs::read_to_string(raw)?
        };
        let cj: CurveJson = serde_json::from_str(&text)?;
        let curve = EllipticCurve::from_json(&cj)?;
        if curve.field().p() != p {
            return Err(Failure::Input(format!("curve is over p = {}, not {p}", curve.field().p())));
        }
        return Ok(curve);
    }
    let field = FieldSpec::new(&p, if a.fp2 { 2 } else { 1 })?;
    match (&a.j, &a.a, &a.b) {
        (Some(j), _, _) => Ok(curve_from_j(&field, &field.parse(j)?)),
        (None, Some(ca), Some(cb)) => Ok(EllipticCurve::new(&field, field.parse(ca)?, field.parse(cb)?)?),
        _ => Err(Failure::Input("give one of --j, --A with --B, or --curve".into())),
    }
}

fn cmd_sstest(a: &SstestArgs) -> Outcome {
    let curve = sstest_curve(a)?;
    let cfg = WalkConfig {
        bound_mode: a.mode.parse()?,
        extra_attempt: !a.no_extra_attempt,
        seed: a.seed,
    };
    print_json(&supersingularity_test(&curve, &cfg)?)
}

fn cmd_bench(bits: u64, trials: usize, modes: &[String], seed: u64, repeats: usize, max_p: Option<&str>) -> Outcome {
    let modes = modes
        .iter()
        .map(|m| m.parse::<BoundMode>())
        .collect::<Result<Vec<_>, _>>()?;
    if modes.contains(&BoundMode::ImprovedH1Fp) {
        return Err(Failure::Input("bench curves live over F_{p^2}; the h1 mode does not apply".into()));
    }
    let opts = BenchOptions {
        max_p: max_p.map(parse_integer).transpose()?,
        repeats,
    };
    let rows = bench_steps(bits, trials, &modes, seed, &opts)?;
    emit(&bench_csv(&rows))
}

fn cmd_table1(bits: &[u64], n: usize, seed: u64) -> Outcome {
    let mut out = String::from("bits,mean_h1,h2\n");
    for &b in bits {
        let row = table1_row(b, n, seed)?;
        out.push_str(&format!("{},{:.2},{}\n", row.bits, row.mean_h1, row.h2));
    }
    emit(&out)
}

fn cmd_verify(a: &VerifyArgs) -> Outcome {
    let mut reports: Vec<VerifyReport> = Vec::new();
    if a.emax {
        reports.push(verify_lift(a.limit.unwrap_or(100_000))?);
    }
    if a.cases {
        reports.push(verify_cases(a.limit.unwrap_or(10_000))?);
    }
    if a.fp2_tight {
        reports.push(verify_fp2_tight(a.limit.unwrap_or(4096))?);
    }
    if a.volcano {
        let (mode, default) = if a.fp2 { (SweepMode::Fp2, 40) } else { (SweepMode::Fp, 200) };
        reports.push(verify_volcanoes(a.limit.unwrap_or(default), mode, a.seed)?);
    }
    if a.sstest {
        reports.push(verify_sstest(a.limit.unwrap_or(300), a.seed)?);
    }
    if reports.is_empty() {
        return Err(Failure::Input(
            "choose at least one of --emax, --cases, --fp2-tight, --volcano, --sstest".into(),
        ));
    }
    print_json(&reports)?;
    let bad: usize = reports.iter().map(|r| r.violations.len()).sum();
    if bad > 0 {
        return Err(Failure::Violation(format!("{bad} violations")));
    }
    Ok(())
}

fn configure_threads() -> Outcome {
    let Ok(raw) = std::env::var("TWOVOLC_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .parse()
        .map_err(|_| Failure::Input(format!("TWOVOLC_THREADS must be a positive integer, got {raw:?}")))?;
    if n == 0 {
        return Err(Failure::Input("TWOVOLC_THREADS must be positive".into()));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::Input(e.to_string()))
}

fn run(cli: &Cli) -> Outcome {
    configure_threads()?;
    match &cli.command {
        Command::Bound { p, fp2 } => cmd_bound(p, *fp2),
        Command::Emax { q, oracle } => cmd_emax(q, *oracle),
        Command::Volcano(a) => cmd_volcano(a),
        Command::Sstest(a) => cmd_sstest(a),
        Command::Bench {
            bits,
            trials,
            modes,
            seed,
            repeats,
            max_p,
        } => cmd_bench(*bits, *trials, modes, *seed, *repeats, max_p.as_deref()),
        Command::Table1 { bits, n, seed } => cmd_table1(bits, *n, *seed),
        Command::Verify(a) => cmd_verify(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Violation(msg)) => {
            eprintln!("twovolc: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("twovolc: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Budget(msg)) => {
            eprintln!("twovolc: {msg}");
            ExitCode::from(3)
        }
    }
}

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use fatpoint::chow::{euler_characteristic_parts, AmbientSpace, DivisorClass};
use fatpoint::harness::{run_sweep, verify, SweepConfig, VerificationRecord};
use fatpoint::oracle::DEFAULT_PRIMES;
use fatpoint::reduction::reduce_to_standard;
use fatpoint::{
    classify, dimension, oracle_dimension, Classification, FatPointSystem, OracleConfig,
};

const EXIT_MISMATCH: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_INTERNAL: u8 = 3;

/// Dimensions of linear systems of surfaces in P^3 through fat points on an
/// elliptic quartic curve.
#[derive(Parser)]
#[command(name = "fatpoint", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact dimension from the closed formulas.
    Dim(SystemArgs),
    /// Reduce to standard form and report the case.
    Classify(SystemArgs),
    /// Euler characteristic of a divisor on a blow-up of P^3.
    Chi(ChiArgs),
    /// Dimension from the finite-field interpolation matrix.
    Oracle(OracleArgs),
    /// Compare the formula with the oracle on one system.
    Verify(OracleArgs),
    /// Verify a whole grid of systems.
    Sweep(SweepArgs),
}

#[derive(Args)]
struct SystemArgs {
    /// Degree of the surfaces.
    #[arg(short = 'd', long = "d", allow_negative_numbers = true)]
    degree: i64,
    /// Multiplicities, e.g. "5,1x19" or "2,2,1".
    #[arg(short = 'm', long = "m", default_value = "")]
    multiplicities: String,
    /// Print JSON instead of text.
    #[arg(long)]
    json: bool,
    /// Include the reduction and driver trace.
    #[arg(long)]
    trace: bool,
}

#[derive(Args)]
struct ChiArgs {
    #[command(flatten)]
    system: SystemArgs,
    /// Blown-up lines with their multiplicities, e.g. "2:1,5:2".
    #[arg(long, default_value = "")]
    lines: String,
    /// Blow up the curve and subtract it with this multiplicity.
    #[arg(long)]
    curve: Option<i64>,
    /// Number of blown-up points (defaults to the length of -m).
    #[arg(long)]
    r: Option<usize>,
}

#[derive(Args)]
struct OracleArgs {
    #[command(flatten)]
    system: SystemArgs,
    /// Prime modulus; repeat to use several.
    #[arg(long = "prime", default_values_t = [DEFAULT_PRIMES[0]])]
    primes: Vec<u64>,
    /// First curve seed.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Number of consecutive seeds per prime.
    #[arg(long, default_value_t = 3)]
    trials: usize,
}

#[derive(Args)]
struct SweepArgs {
    /// JSON sweep configuration.
    #[arg(long)]
    config: PathBuf,
    /// JSONL output path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the worker count of the configuration.
    #[arg(long)]
    workers: Option<usize>,
    /// Also write the records as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
}

enum Failure {
    Usage(String),
    Internal(String),
}

impl From<fatpoint::Error> for Failure {
    fn from(e: fatpoint::Error) -> Self {
        if e.is_input_error() {
            Failure::Usage(e.to_string())
        } else {
            Failure::Internal(e.to_string())
        }
    }
}

fn io_failure(e: impl std::fmt::Display) -> Failure {
    Failure::Internal(format!("I/O error: {e}"))
}

type Outcome = Result<u8, Failure>;

/// `println!` that tolerates a closed stdout (e.g. when piped into `head`).
macro_rules! say {
    ($($arg:tt)*) => {{
        let _ = writeln!(io::stdout().lock(), $($arg)*);
    }};
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let outcome = match cli.command {
        Command::Dim(args) => cmd_dim(&args),
        Command::Classify(args) => cmd_classify(&args),
        Command::Chi(args) => cmd_chi(&args),
        Command::Oracle(args) => cmd_oracle(&args),
        Command::Verify(args) => cmd_verify(&args),
        Command::Sweep(args) => cmd_sweep(&args),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Internal(msg)) => {
            eprintln!("internal error: {msg}");
            ExitCode::from(EXIT_INTERNAL)
        }
    }
}

impl SystemArgs {
    fn system(&self) -> Result<FatPointSystem, Failure> {
        Ok(FatPointSystem::parse(self.degree, &self.multiplicities)?)
    }
}

fn print_json(value: &Value) {
    say!(
        "{}",
        serde_json::to_string_pretty(value).expect("JSON value")
    );
}

fn cmd_dim(args: &SystemArgs) -> Outcome {
    let report = dimension(&args.system()?)?;
    if args.json {
        let mut out = json!({
            "input": report.input,
            "dim": report.dim,
            "vdim": report.vdim,
            "edim": report.edim,
            "speciality": report.speciality,
            "case_path": report.case_path,
        });
        if args.trace {
            out["trace"] = json!(report.trace);
        }
        print_json(&out);
    } else {
        say!("{}", report.input);
        say!("dim        {}", report.dim);
        say!("vdim       {}", report.vdim);
        say!("edim       {}", report.edim);
        say!("speciality {}", report.speciality);
        say!("path       {}", report.case_path.join(" > "));
        if args.trace {
            for step in &report.trace {
                say!("  {}", serde_json::to_string(step).expect("step"));
            }
        }
    }
    Ok(0)
}

fn cmd_classify(args: &SystemArgs) -> Outcome {
    let sys = args.system()?;
    if sys.degree < 0 {
        return Err(fatpoint::Error::NegativeDegree(sys.degree).into());
    }
    let reduced = reduce_to_standard(&sys.normalize())?;
    let cls = if reduced.empty {
        Classification::Empty
    } else {
        classify(&reduced.system)?
    };
    if args.json {
        let mut out = json!({
            "input": sys,
            "standard": reduced.system,
            "classification": cls,
        });
        if args.trace {
            out["trace"] = reduced.trace.to_json();
        }
        print_json(&out);
    } else {
        say!("{sys} -> {}", reduced.system);
        say!("case {}", cls.tag());
        say!("{}", serde_json::to_string(&cls).expect("classification"));
        if args.trace {
            for step in reduced.trace.to_json().as_array().into_iter().flatten() {
                say!("  {step}");
            }
        }
    }
    Ok(0)
}

fn parse_lines(text: &str) -> Result<BTreeMap<usize, i64>, Failure> {
    let mut out = BTreeMap::new();
    for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let parsed = item
            .split_once(':')
            .and_then(|(i, t)| Some((i.trim().parse().ok()?, t.trim().parse().ok()?)));
        let Some((i, t)) = parsed else {
            return Err(Failure::Usage(format!(
                "bad line entry {item:?}, expected INDEX:MULTIPLICITY"
            )));
        };
        if out.insert(i, t).is_some() {
            return Err(Failure::Usage(format!("line {i} given twice")));
        }
    }
    Ok(out)
}

fn cmd_chi(args: &ChiArgs) -> Outcome {
    let sys = args.system.system()?;
    let r = args.r.unwrap_or(sys.r());
    if r < sys.r() {
        return Err(Failure::Usage(format!(
            "--r {r} is smaller than the {} given multiplicities",
            sys.r()
        )));
    }
    let lines = parse_lines(&args.lines)?;
    let amb = AmbientSpace::new(r, lines.keys().copied(), args.curve.is_some())?;
    let mut m = sys.multiplicities.clone();
    m.resize(r, 0);
    let divisor = DivisorClass::new(sys.degree, m, lines, args.curve.unwrap_or(0));
    let chi = euler_characteristic_parts(&divisor, &amb)?;
    if args.system.json {
        print_json(&json!(chi));
    } else {
        say!("chi      {}", chi.chi);
        say!("bracket  {}", chi.bracket);
        say!("c2.D     {}", chi.c2_dot_d);
    }
    Ok(0)
}

impl OracleArgs {
    fn config(&self) -> Result<OracleConfig, Failure> {
        if self.trials == 0 {
            return Err(Failure::Usage("--trials must be at least 1".into()));
        }
        let seeds = (0..self.trials as u64)
            .map(|i| self.seed.wrapping_add(i))
            .collect();
        Ok(OracleConfig::new(self.primes.clone(), seeds))
    }
}

fn cmd_oracle(args: &OracleArgs) -> Outcome {
    let report = oracle_dimension(&args.system.system()?, &args.config()?)?;
    if args.system.json {
        print_json(&json!(report));
    } else {
        say!("dim    {}", report.dim);
        say!("stable {}", report.stable);
        for t in &report.trials {
            say!(
                "  p={} seed={} rank={} dim={}",
                t.prime,
                t.seed,
                t.rank,
                t.dim
            );
        }
    }
    Ok(if report.stable { 0 } else { EXIT_MISMATCH })
}

fn cmd_verify(args: &OracleArgs) -> Outcome {
    let sys = args.system.system()?;
    let config = args.config()?;
    // surface bad input as a usage error before running anything
    for &p in &config.primes {
        if sys.degree >= 0 && p <= sys.degree as u64 {
            return Err(fatpoint::Error::PrimeTooSmall {
                prime: p,
                degree: sys.degree,
            }
            .into());
        }
    }
    let record = verify(&sys, &config);
    if args.system.json {
        print_json(&json!(record));
    } else {
        print_record(&record);
    }
    if let Some(err) = &record.error {
        return Err(Failure::Internal(err.clone()));
    }
    Ok(if record.matches && record.stable {
        0
    } else {
        EXIT_MISMATCH
    })
}

fn print_record(rec: &VerificationRecord) {
    let show = |v: Option<i64>| v.map_or("-".to_owned(), |x| x.to_string());
    say!("{}", rec.system());
    say!("formula    {}", show(rec.formula_dim));
    say!("oracle     {}", show(rec.oracle_dim));
    say!("edim       {}", show(rec.edim));
    say!("path       {}", rec.case_path.join(" > "));
    say!("match      {}", rec.matches);
    say!("stable     {}", rec.stable);
}

fn cmd_sweep(args: &SweepArgs) -> Outcome {
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", args.config.display())))?;
    let mut config = SweepConfig::from_json(&text)?;
    if let Some(w) = args.workers {
        config.workers = w;
        config.validate()?;
    }

    let mut csv = match &args.csv {
        Some(path) => {
            let mut w = csv::Writer::from_path(path).map_err(io_failure)?;
            w.write_record(VerificationRecord::CSV_HEADER)
                .map_err(io_failure)?;
            Some(w)
        }
        None => None,
    };
    let mut csv_error = None;
    let mut on_record = |rec: &VerificationRecord| {
        if let Some(w) = csv.as_mut() {
            if let Err(e) = w.write_record(rec.to_csv_row()) {
                csv_error.get_or_insert(e);
            }
        }
    };

    let summary = match &args.out {
        Some(path) => {
            let mut out = BufWriter::new(File::create(path).map_err(io_failure)?);
            run_sweep(&config, &mut out, &mut on_record)?
        }
        None => run_sweep(&config, &mut io::stdout().lock(), &mut on_record)?,
    };
    if let Some(e) = csv_error {
        return Err(io_failure(e));
    }
    if let Some(mut w) = csv {
        w.flush().map_err(io_failure)?;
    }

    let line = serde_json::to_string(&summary).expect("summary");
    if args.out.is_some() {
        say!("{line}");
    } else {
        eprintln!("{line}");
    }
    Ok(if summary.errors > 0 {
        EXIT_INTERNAL
    } else if summary.mismatches > 0 {
        EXIT_MISMATCH
    } else {
        0
    })
}

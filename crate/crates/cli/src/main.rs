//! `su2meas`: sampling, closed-form probabilities and the verification suite
//! for SU(2)-invariant probability measures on C².
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or input error,
//! 3 I/O error.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use su2meas::measure::{born_probability, cone_probability, AngleSet, InvariantMeasure};
use su2meas::sampler::{invariant_chunks, sample_invariant, write_csv_header, write_csv_rows, write_json_rows};
use su2meas::stats::{binomial_band, estimate_born, write_json_lines, TestReport};
use su2meas::verify::{run_suite, SuiteConfig};
use su2meas::{fmt17, Error, RadialProfile};

const EXIT_VERIFY_FAILED: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_IO: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "su2meas", version, about = "SU(2)-invariant probability measures on C^2", long_about = None)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Draw points of C^2 from an invariant measure and write them as CSV `x,y,u,v`
    Sample(RunArgs),
    /// Measure of the cone psi_lo <= psi <= psi_hi (radians), for any invariant measure
    Cone {
        #[arg(allow_negative_numbers = true)]
        psi_lo: f64,
        #[arg(allow_negative_numbers = true)]
        psi_hi: f64,
    },
    /// Born probability a^2 / (a^2 + b^2), optionally with a Monte Carlo estimate
    Born {
        #[arg(allow_negative_numbers = true)]
        a: f64,
        #[arg(allow_negative_numbers = true)]
        b: f64,
        /// Also estimate the probability from a sample
        #[arg(long)]
        mc: bool,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Run the verification suite and print one JSON report per line
    Verify(RunArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Radial profile: gaussian | exponential:<rate> | ball:<R> | tabulated:<path>
    #[arg(long, default_value = "gaussian")]
    profile: String,
    /// Number of points
    #[arg(long, default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(1..))]
    n: u64,
    /// Seed of the random stream (falls back to SU2MEAS_SEED, then 0)
    #[arg(long, env = "SU2MEAS_SEED", default_value_t = 0)]
    seed: u64,
    /// Output format; `sample` defaults to csv, `verify` to json
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Output file (standard output when absent)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug)]
enum Failure {
    Input(String),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Io(e) => Failure::Io(e.to_string()),
            other => Failure::Input(other.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

fn parse_profile(spec: &str) -> Result<RadialProfile, Failure> {
    let (kind, arg) = match spec.split_once(':') {
        Some((k, a)) => (k, Some(a)),
        None => (spec, None),
    };
    let number = |a: Option<&str>| -> Result<f64, Failure> {
        let a = a.ok_or_else(|| Failure::Input(format!("profile `{kind}` needs a parameter")))?;
        a.parse::<f64>().map_err(|e| Failure::Input(format!("bad parameter `{a}` for `{kind}`: {e}")))
    };
    let profile = match kind {
        "gaussian" if arg.is_none() => RadialProfile::gaussian(),
        "exponential" => RadialProfile::exponential(number(arg)?)?,
        "ball" => RadialProfile::ball_uniform(number(arg)?)?,
        "tabulated" => {
            let path = arg.filter(|p| !p.is_empty()).ok_or_else(|| Failure::Input("tabulated profile needs a path".into()))?;
            RadialProfile::tabulated_from_path(path).map_err(|e| match e {
                Error::Io(io) => Failure::Io(format!("{path}: {io}")),
                other => Failure::Input(format!("{path}: {other}")),
            })?
        }
        _ => return Err(Failure::Input(format!("unknown profile `{spec}`"))),
    };
    Ok(profile)
}

fn measure_for(spec: &str) -> Result<InvariantMeasure, Failure> {
    Ok(InvariantMeasure::new(parse_profile(spec)?.normalize()?)?)
}

fn open_output(out: &Option<PathBuf>) -> Result<Box<dyn Write>, Failure> {
    Ok(match out {
        Some(path) => Box::new(BufWriter::new(
            File::create(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn cmd_sample(args: &RunArgs) -> Result<u8, Failure> {
    let measure = measure_for(&args.profile)?;
    let n = usize::try_from(args.n).map_err(|_| Failure::Input("n too large".into()))?;
    let mut out = open_output(&args.out)?;
    let format = args.format.unwrap_or(Format::Csv);
    if format == Format::Csv {
        write_csv_header(&mut out)?;
    }
    for chunk in invariant_chunks(&measure, n, args.seed) {
        match format {
            Format::Csv => write_csv_rows(&mut out, &chunk)?,
            Format::Json => write_json_rows(&mut out, &chunk)?,
        }
    }
    out.flush()?;
    Ok(0)
}

fn cmd_cone(psi_lo: f64, psi_hi: f64) -> Result<u8, Failure> {
    let set = AngleSet::interval(psi_lo, psi_hi)?;
    println!("{{\"measure\":{}}}", fmt17(cone_probability(&set)));
    Ok(0)
}

fn cmd_born(a: f64, b: f64, mc: bool, args: &RunArgs) -> Result<u8, Failure> {
    let p = born_probability(a, b)?;
    if !mc {
        println!("{{\"probability\":{}}}", fmt17(p));
        return Ok(0);
    }
    let measure = measure_for(&args.profile)?;
    let n = usize::try_from(args.n).map_err(|_| Failure::Input("n too large".into()))?;
    let batch = sample_invariant(&measure, n, args.seed);
    let est = estimate_born(&batch, a, b)?;
    let report = TestReport::estimator(format!("born_{a}_{b}[{}]", batch.profile_id), n, est, p, binomial_band(p, n));
    println!(
        "{{\"probability\":{},\"estimate\":{},\"difference\":{},\"band\":{},\"n\":{}}}",
        fmt17(p),
        fmt17(est),
        fmt17(report.statistic),
        fmt17(report.threshold),
        n
    );
    Ok(0)
}

fn cmd_verify(args: &RunArgs) -> Result<u8, Failure> {
    let profile = parse_profile(&args.profile)?;
    let n = usize::try_from(args.n).map_err(|_| Failure::Input("n too large".into()))?;
    let reports = run_suite(&SuiteConfig { profile, n, seed: args.seed })?;
    let mut out = open_output(&args.out)?;
    match args.format.unwrap_or(Format::Json) {
        Format::Json => write_json_lines(&mut out, &reports)?,
        Format::Csv => {
            writeln!(out, "{}", TestReport::csv_header())?;
            for r in &reports {
                writeln!(out, "{}", r.to_csv())?;
            }
        }
    }
    out.flush()?;
    Ok(if reports.iter().all(|r| r.pass) { 0 } else { EXIT_VERIFY_FAILED })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Sample(args) => cmd_sample(args),
        Command::Cone { psi_lo, psi_hi } => cmd_cone(*psi_lo, *psi_hi),
        Command::Born { a, b, mc, run } => cmd_born(*a, *b, *mc, run),
        Command::Verify(args) => cmd_verify(args),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Input(msg)) => {
            eprintln!("su2meas: {msg}");
            ExitCode::from(EXIT_INPUT)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("su2meas: I/O error: {msg}");
            ExitCode::from(EXIT_IO)
        }
    }
}

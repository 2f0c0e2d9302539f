mod checks;
mod output;
mod range;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use groupest::cost::validate_holevo;
use groupest::estimation::{optimize_coefficients_with, OptimizeOptions};
use groupest::group::{su2, DEFAULT_QUAD_NODES};
use groupest::protocols::{
    maxent_estimation_with, phase_protocol, refframe_protocol_with, ProtocolReport, RefframeOptions,
};
use groupest::{CostSpec, Group, IrrepLabel, IrrepSet};
use rayon::prelude::*;
use serde_json::Value;

use output::{round15, write_json, write_records, Format, Record};
use range::NRange;

const MIN_QUAD_NODES: usize = 64;

#[derive(Parser, Debug)]
#[command(
    name = "groupest",
    version,
    about = "Optimal covariant estimation of group transformations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct Common {
    /// Gauss-Legendre nodes for the quadrature cross-check (at least 64).
    #[arg(long, global = true, default_value_t = DEFAULT_QUAD_NODES)]
    quad_nodes: usize,
    /// Seed for every random draw.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write to this file instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Leave coefficient vectors out of scan records.
    #[arg(long, global = true)]
    no_coefficients: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Cartesian frame alignment with N spin-1/2 particles.
    Refframe {
        /// Range of N, written a..b or a..b:step.
        #[arg(long)]
        n: NRange,
        /// Keep the totally symmetric sector j = N/2.
        #[arg(long)]
        include_top: bool,
    },
    /// Estimation of a two-qubit maximally entangled state from N copies.
    Maxent {
        #[arg(long)]
        n: NRange,
    },
    /// Holevo phase estimation on Z_M with n consecutive labels.
    Phase {
        #[arg(long)]
        m: u32,
        #[arg(long)]
        n: NRange,
    },
    /// Optimize a cost read from a JSON file over a chosen irrep set.
    Optimize {
        #[arg(long)]
        cost_file: PathBuf,
        /// su2 or zm:M.
        #[arg(long, default_value = "su2", value_parser = parse_group)]
        group: Group,
        /// Comma-separated labels (2j for SU(2), residues for Z_M).
        #[arg(
            long,
            value_delimiter = ',',
            conflicts_with = "tensor_power",
            required_unless_present = "tensor_power"
        )]
        labels: Vec<u32>,
        /// Use the spin sectors of the N-qubit space with their multiplicities.
        #[arg(long)]
        tensor_power: Option<u32>,
        /// With --tensor-power, drop the sector j = N/2.
        #[arg(long, requires = "tensor_power")]
        exclude_top: bool,
    },
    /// Run the oracle cross-checks up to N = n_max.
    Check {
        #[arg(long, default_value_t = 6)]
        n_max: u32,
    },
}

fn parse_group(s: &str) -> Result<Group, String> {
    let lower = s.trim().to_ascii_lowercase();
    if lower == "su2" {
        return Ok(Group::Su2);
    }
    let order = lower
        .strip_prefix("zm:")
        .or_else(|| lower.strip_prefix("zm(").and_then(|r| r.strip_suffix(')')))
        .ok_or_else(|| format!("unknown group '{s}', expected su2 or zm:M"))?;
    let order: u32 = order
        .parse()
        .map_err(|e| format!("bad group order '{order}': {e}"))?;
    Group::cyclic(order).map_err(|e| e.to_string())
}

/// Failure classes mapped to exit codes 1 and 2.
#[derive(Debug)]
enum Failure {
    Validation(String),
    Numerical(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Validation(_) => 1,
            Failure::Numerical(_) => 2,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Validation(m) | Failure::Numerical(m) => m,
        }
    }
}

impl From<groupest::Error> for Failure {
    fn from(e: groupest::Error) -> Self {
        if e.is_numerical() {
            Failure::Numerical(e.to_string())
        } else {
            Failure::Validation(e.to_string())
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Validation(format!("i/o error: {e}"))
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::from(io::Error::from(e))
    }
}

fn open_output(path: &Option<PathBuf>) -> Result<Box<dyn Write>, Failure> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

/// Evaluates a scan in parallel and returns the records in ascending N.
fn scan<F>(range: NRange, common: &Common, f: F) -> Result<Vec<Record>, Failure>
where
    F: Fn(u32) -> groupest::Result<ProtocolReport> + Sync,
{
    let reports: Vec<_> = range.values().into_par_iter().map(|n| (n, f(n))).collect();
    reports
        .into_iter()
        .map(|(n, r)| match r {
            Ok(rep) => Ok(Record::from_report(&rep, !common.no_coefficients)),
            Err(e) => {
                let f = Failure::from(e);
                Err(match f {
                    Failure::Validation(m) => Failure::Validation(format!("N = {n}: {m}")),
                    Failure::Numerical(m) => Failure::Numerical(format!("N = {n}: {m}")),
                })
            }
        })
        .collect()
}

fn round_all(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => n
            .as_f64()
            .map(round15)
            .map(Value::from)
            .unwrap_or(Value::Number(n)),
        Value::Array(a) => Value::Array(a.into_iter().map(round_all).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, round_all(v))).collect()),
        other => other,
    }
}

fn optimize(
    cost_file: &PathBuf,
    group: Group,
    labels: &[u32],
    tensor_power: Option<u32>,
    exclude_top: bool,
    common: &Common,
) -> Result<(), Failure> {
    let text = std::fs::read_to_string(cost_file)
        .map_err(|e| Failure::Validation(format!("cannot read {}: {e}", cost_file.display())))?;
    let spec = CostSpec::from_json(&text)?;
    let report = validate_holevo(&spec, group);
    if !report.is_ok() {
        let details: Vec<String> = report.violations.iter().map(ToString::to_string).collect();
        return Err(Failure::Validation(format!(
            "cost is not in the generalized Holevo class: {}",
            details.join("; ")
        )));
    }

    let set = match tensor_power {
        Some(n) => {
            if group != Group::Su2 {
                return Err(Failure::Validation(
                    "--tensor-power requires --group su2".into(),
                ));
            }
            su2::irrep_set_for_tensor_power(n, !exclude_top)?
        }
        None => IrrepSet::with_unit_multiplicities(
            group,
            labels.iter().copied().map(IrrepLabel).collect(),
        )?,
    };
    let result = optimize_coefficients_with(
        &spec,
        &set,
        OptimizeOptions {
            quad_nodes: common.quad_nodes,
        },
    )?;

    let mut out = open_output(&common.output)?;
    match common.format {
        Format::Json => {
            let value =
                serde_json::to_value(&result).map_err(|e| Failure::Numerical(e.to_string()))?;
            write_json(&mut out, &round_all(value))?;
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut out);
            w.write_record(["label", "coefficient"])?;
            for (l, c) in result
                .coefficients
                .labels()
                .iter()
                .zip(result.coefficients.values())
            {
                w.write_record([l.0.to_string(), round15(*c).to_string()])?;
            }
            w.flush()?;
            drop(w);
            writeln!(out, "# min_cost={}", round15(result.min_cost))?;
        }
    }
    out.flush()?;
    Ok(())
}

fn check(n_max: u32, common: &Common) -> Result<(), Failure> {
    let outcomes = checks::run_checks(n_max, common.seed);
    let mut out = open_output(&common.output)?;
    match common.format {
        Format::Json => write_json(&mut out, &outcomes)?,
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut out);
            w.write_record(["check", "passed", "detail"])?;
            for o in &outcomes {
                w.write_record([
                    o.name.as_str(),
                    if o.passed { "true" } else { "false" },
                    o.detail.as_str(),
                ])?;
            }
            w.flush()?;
        }
    }
    out.flush()?;
    for o in &outcomes {
        eprintln!(
            "{} {}: {}",
            if o.passed { "PASS" } else { "FAIL" },
            o.name,
            o.detail
        );
    }
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    if failed > 0 {
        return Err(Failure::Numerical(format!(
            "{failed} of {} checks failed",
            outcomes.len()
        )));
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    let common = &cli.common;
    if common.quad_nodes < MIN_QUAD_NODES {
        return Err(Failure::Validation(format!(
            "--quad-nodes must be at least {MIN_QUAD_NODES}, got {}",
            common.quad_nodes
        )));
    }
    let records = match &cli.command {
        Command::Refframe { n, include_top } => {
            let options = RefframeOptions {
                include_top: *include_top,
                quad_nodes: common.quad_nodes,
            };
            scan(*n, common, |n| refframe_protocol_with(n, options))?
        }
        Command::Maxent { n } => {
            scan(*n, common, |n| maxent_estimation_with(n, common.quad_nodes))?
        }
        Command::Phase { m, n } => scan(*n, common, |n| phase_protocol(*m, n))?,
        Command::Optimize {
            cost_file,
            group,
            labels,
            tensor_power,
            exclude_top,
        } => {
            return optimize(
                cost_file,
                *group,
                labels,
                *tensor_power,
                *exclude_top,
                common,
            )
        }
        Command::Check { n_max } => return check(*n_max, common),
    };
    let mut out = open_output(&common.output)?;
    write_records(&mut out, &records, common.format)?;
    out.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

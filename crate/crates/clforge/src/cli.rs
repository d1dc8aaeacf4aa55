//! Batch entry point: construct, verify, oracle.
//!
//! Exit codes: 0 all requested checks pass, 1 at least one check reported
//! violations, 2 usage or parameter errors. Summary lines go to stderr;
//! report bundles and tables go to `--out` (default stdout).

use crate::construction::{ConstructionModel, LineClassModel};
use crate::error::{Error, Result};
use crate::export;
use crate::field::{FieldCtx, DEFAULT_MAX_FIELD_BITS};
use crate::oracle::{GaussOracle, ORACLE_GUARD_Q};
use crate::quadric::{KleinMap, GENERATOR_GUARD_Q};
use crate::verify::{self, CharPlan, Report};
use clap::{Args, Parser, Subcommand};
use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

pub const DEFAULT_CUBIC_SAMPLES: usize = 1000;
pub const DEFAULT_ORACLE_SAMPLE: usize = 500;
pub const DEFAULT_CHARSUM_SAMPLE: usize = 100_000;

/// Checks `verify` knows how to run, in canonical order.
pub const CHECK_TOKENS: &[&str] = &[
    "prelims",
    "tight",
    "charsum",
    "spreads",
    "stabilizer",
    "generators",
    "oracle",
];

#[derive(Parser)]
#[command(
    name = "clforge",
    version,
    about = "Cameron-Liebler line classes with parameter (q+1)^2/3: construction, exact verification, and a numerical character-sum oracle"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Build the line class and export its tables.
    Construct(ConstructArgs),
    /// Run exact verification checks and write a JSON report bundle.
    Verify(VerifyArgs),
    /// Run the numerical Gauss-sum oracle and write a JSON report bundle.
    Oracle(OracleArgs),
}

#[derive(Args)]
pub struct FieldArgs {
    /// Field characteristic (prime).
    #[arg(long)]
    pub p: u32,
    /// Extension degree: q = p^n.
    #[arg(long, default_value_t = 1)]
    pub n: u32,
    /// Defining polynomial override for F_{q^3} over F_p: little-endian
    /// coefficients, e.g. "1,1,0,1" for t^3 + t + 1.
    #[arg(long)]
    pub poly: Option<String>,
    /// Refuse fields with q^3 above this bit size.
    #[arg(long, default_value_t = DEFAULT_MAX_FIELD_BITS)]
    pub max_field_bits: u32,
}

#[derive(Args)]
pub struct ConstructArgs {
    #[command(flatten)]
    pub field: FieldArgs,
    /// Output directory for the exported tables.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    /// Line-table format.
    #[arg(long, default_value = "csv", value_parser = ["csv", "json"])]
    pub format: String,
}

#[derive(Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub field: FieldArgs,
    /// Comma-separated subset of prelims,tight,charsum,spreads,stabilizer,
    /// generators,oracle — or "all".
    #[arg(long, default_value = "all")]
    pub checks: String,
    /// Random projectivity-images of the regular spread to test.
    #[arg(long, default_value_t = 100)]
    pub n_random_spreads: usize,
    /// Pair sampling for charsum: "auto", "exhaustive", or a count.
    #[arg(long, default_value = "auto")]
    pub sample: String,
    /// Seed for all sampled randomness.
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    /// Worker threads (0 = library default).
    #[arg(long, default_value_t = default_threads())]
    pub threads: usize,
    /// Report bundle destination ("-" for stdout).
    #[arg(long, default_value = "-")]
    pub out: String,
    /// Lift the size guards on the oracle and generator checks.
    #[arg(long)]
    pub force: bool,
}

#[derive(Args)]
pub struct OracleArgs {
    #[command(flatten)]
    pub field: FieldArgs,
    /// Pair sampling: "auto", "exhaustive", or a count.
    #[arg(long, default_value = "auto")]
    pub sample: String,
    /// Seed for sampled pairs.
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    /// Report bundle destination ("-" for stdout).
    #[arg(long, default_value = "-")]
    pub out: String,
    /// Run despite the field-size guard (dense tables grow as q^6).
    #[arg(long)]
    pub force: bool,
}

fn default_threads() -> usize {
    std::env::var("CLFORGE_THREADS")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(0)
}

fn parse_poly(s: &str) -> Result<Vec<u32>> {
    s.split(',')
        .map(|c| {
            c.trim()
                .parse::<u32>()
                .map_err(|_| Error::BadPolynomial(format!("bad coefficient '{c}' in '{s}'")))
        })
        .collect()
}

fn build_ctx(args: &FieldArgs) -> Result<Arc<FieldCtx>> {
    let poly = args.poly.as_deref().map(parse_poly).transpose()?;
    Ok(Arc::new(FieldCtx::with_options(
        args.p,
        args.n,
        poly.as_deref(),
        args.max_field_bits,
    )?))
}

fn parse_checks(s: &str) -> Result<Vec<&'static str>> {
    if s == "all" {
        return Ok(CHECK_TOKENS.to_vec());
    }
    let mut out = Vec::new();
    for raw in s.split(',') {
        let tok = raw.trim();
        match CHECK_TOKENS.iter().find(|t| **t == tok) {
            Some(&t) => {
                if !out.contains(&t) {
                    out.push(t);
                }
            }
            None => {
                return Err(Error::UnsupportedParameter(format!(
                    "unknown check '{tok}'; expected a subset of {}",
                    CHECK_TOKENS.join(",")
                )))
            }
        }
    }
    if out.is_empty() {
        return Err(Error::UnsupportedParameter("empty check list".into()));
    }
    Ok(out)
}

/// "auto" | "exhaustive" | count, with an auto policy per consumer.
fn parse_sample(s: &str, auto_exhaustive_up_to: u32, auto_count: usize, q: u32) -> Result<CharPlan> {
    match s {
        "auto" => Ok(if q <= auto_exhaustive_up_to {
            CharPlan::Exhaustive
        } else {
            CharPlan::Sampled { random: auto_count }
        }),
        "exhaustive" => Ok(CharPlan::Exhaustive),
        other => match other.parse::<usize>() {
            Ok(k) if k >= 1 => Ok(CharPlan::Sampled { random: k }),
            _ => Err(Error::UnsupportedParameter(format!(
                "--sample expects 'auto', 'exhaustive', or a positive count, got '{other}'"
            ))),
        },
    }
}

fn open_out(dest: &str) -> Result<Box<dyn Write>> {
    if dest == "-" {
        Ok(Box::new(std::io::stdout().lock()))
    } else {
        Ok(Box::new(File::create(dest)?))
    }
}

fn emit_reports(dest: &str, reports: &[Report]) -> Result<bool> {
    for r in reports {
        eprintln!("{}", r.summary_line());
    }
    let mut out = open_out(dest)?;
    export::write_reports_json(&mut out, reports)?;
    Ok(reports.iter().all(|r| r.pass))
}

fn cmd_construct(args: &ConstructArgs) -> Result<i32> {
    let ctx = build_ctx(&args.field)?;
    let model = ConstructionModel::build(ctx.clone())?;
    let lc = LineClassModel::build(&model)?;
    let km = KleinMap::new(&ctx)?;

    std::fs::create_dir_all(&args.out)?;
    let stem = format!("p{}_n{}", ctx.p(), ctx.n());

    let construction_path = args.out.join(format!("construction_{stem}.json"));
    let mut f = File::create(&construction_path)?;
    export::write_json(&mut f, &export::ConstructionExport::new(&model, &lc))?;

    let table = export::LineTableExport::new(&ctx, &lc, &km)?;
    let lines_path = args.out.join(format!("lines_{stem}.{}", args.format));
    let mut f = File::create(&lines_path)?;
    match args.format.as_str() {
        "csv" => export::write_line_table_csv(&mut f, &table)?,
        _ => export::write_json(&mut f, &table)?,
    }

    println!(
        "q = {}  x = {}  |E| = {}  |M| = {}  lines = {}",
        ctx.q(),
        lc.x_param(),
        model.orbit_seeds().len(),
        lc.len(),
        table.rows.len()
    );
    println!(
        "wrote {} and {}",
        display_path(&construction_path),
        display_path(&lines_path)
    );
    Ok(0)
}

fn display_path(p: &Path) -> String {
    p.display().to_string()
}

fn cmd_verify(args: &VerifyArgs) -> Result<i32> {
    let ctx = build_ctx(&args.field)?;
    let checks = parse_checks(&args.checks)?;
    let model = ConstructionModel::build(ctx.clone())?;
    let lc = LineClassModel::build(&model)?;
    let q = ctx.q();

    let mut reports = Vec::new();
    for check in checks {
        let report = match check {
            "prelims" => {
                verify::verify_prelim_identities(&ctx, &model, DEFAULT_CUBIC_SAMPLES, args.seed)?
            }
            "tight" => verify::verify_tight_set(&ctx, &lc, args.threads)?,
            "charsum" => {
                let plan = parse_sample(&args.sample, 5, DEFAULT_CHARSUM_SAMPLE, q)?;
                verify::verify_char_values(&ctx, &lc, plan, args.seed, args.threads)?
            }
            "spreads" => verify::verify_spreads(&ctx, &lc, args.n_random_spreads, args.seed)?,
            "stabilizer" => verify::verify_stabilizer_symmetries(&ctx, &model, &lc)?,
            "generators" => {
                let guard = if args.force { q } else { GENERATOR_GUARD_Q };
                verify::verify_generators(&ctx, &lc, guard)?
            }
            "oracle" => {
                let guard = if args.force { q } else { ORACLE_GUARD_Q };
                let oracle = GaussOracle::new(ctx.clone(), guard)?;
                let plan = parse_sample(&args.sample, 5, DEFAULT_ORACLE_SAMPLE, q)?;
                reports.extend(oracle.run_all(plan, args.seed)?);
                continue;
            }
            _ => unreachable!("token list is closed"),
        };
        reports.push(report);
    }
    Ok(if emit_reports(&args.out, &reports)? { 0 } else { 1 })
}

fn cmd_oracle(args: &OracleArgs) -> Result<i32> {
    let ctx = build_ctx(&args.field)?;
    let q = ctx.q();
    let guard = if args.force { q.max(ORACLE_GUARD_Q) } else { ORACLE_GUARD_Q };
    let oracle = GaussOracle::new(ctx, guard)?;
    let plan = parse_sample(&args.sample, 5, DEFAULT_ORACLE_SAMPLE, q)?;
    let reports = oracle.run_all(plan, args.seed)?;
    Ok(if emit_reports(&args.out, &reports)? { 0 } else { 1 })
}

/// Dispatches a parsed command line; returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    let outcome = match &cli.command {
        Command::Construct(a) => cmd_construct(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Oracle(a) => cmd_oracle(a),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn check_lists_parse_and_reject() {
        assert_eq!(parse_checks("all").unwrap(), CHECK_TOKENS.to_vec());
        assert_eq!(
            parse_checks("tight, spreads").unwrap(),
            vec!["tight", "spreads"]
        );
        assert!(parse_checks("tight,bogus").is_err());
        assert!(parse_checks("").is_err());
    }

    #[test]
    fn sample_spec_parses_all_forms() {
        assert!(matches!(
            parse_sample("auto", 5, 99, 5).unwrap(),
            CharPlan::Exhaustive
        ));
        assert!(matches!(
            parse_sample("auto", 5, 99, 8).unwrap(),
            CharPlan::Sampled { random: 99 }
        ));
        assert!(matches!(
            parse_sample("exhaustive", 5, 99, 32).unwrap(),
            CharPlan::Exhaustive
        ));
        assert!(matches!(
            parse_sample("250", 5, 99, 8).unwrap(),
            CharPlan::Sampled { random: 250 }
        ));
        assert!(parse_sample("-3", 5, 99, 8).is_err());
        assert!(parse_sample("lots", 5, 99, 8).is_err());
    }

    #[test]
    fn poly_override_parses() {
        assert_eq!(parse_poly("1,1,0,1").unwrap(), vec![1, 1, 0, 1]);
        assert_eq!(parse_poly(" 2, 0, 3 ").unwrap(), vec![2, 0, 3]);
        assert!(parse_poly("1,x,0").is_err());
    }

    #[test]
    fn cli_parses_the_documented_invocations() {
        let cli = Cli::try_parse_from(["clforge", "construct", "--p", "5", "--n", "1"]).unwrap();
        assert!(matches!(cli.command, Command::Construct(_)));
        let cli = Cli::try_parse_from([
            "clforge", "verify", "--p", "2", "--n", "1", "--checks", "tight,charsum",
        ])
        .unwrap();
        match cli.command {
            Command::Verify(a) => {
                assert_eq!(a.checks, "tight,charsum");
                assert_eq!(a.seed, 7);
            }
            _ => panic!("wrong subcommand"),
        }
        let cli = Cli::try_parse_from([
            "clforge", "oracle", "--p", "5", "--n", "1", "--sample", "500", "--seed", "7",
        ])
        .unwrap();
        assert!(matches!(cli.command, Command::Oracle(_)));
        assert!(Cli::try_parse_from(["clforge", "explode"]).is_err());
    }
}

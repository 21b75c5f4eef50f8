//! Command-line front end: experiment runs, size sweeps, gap scans, scaling
//! fits, the comparison-table report, and the brute-force equivalence suite.

use banglab::harness::output::{write_rows, write_tsv_pairs, OutputFormat};
use banglab::harness::{
    fit_scaling, table1_report, AlgorithmSpec, Budgets, ExperimentConfig, FitModel, InstanceSpec,
    ReportOptions,
};
use banglab::landscape::{make_spike, BushCost, Instance};
use banglab::oracle::run_oracle_suite;
use banglab::quantum::{default_mixer, mixer_lambda, spectral_gap_scan};
use banglab::{Error, Result};
use clap::{Args, Parser, Subcommand};
use std::fs::File;
use std::io::{self, BufWriter, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "banglab", version, about = "Quasistatic vs bang-bang optimization lab")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Rayon worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output file (default: stdout).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output format for result rows.
    #[arg(long, global = true, default_value = "csv")]
    format: String,
}

#[derive(Subcommand)]
enum Command {
    /// Execute a TOML experiment config.
    Run {
        config: PathBuf,
        /// Override the config's seed list with a single seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run an experiment assembled from flags (no config file).
    Sweep(SweepArgs),
    /// Spectral-gap scan of H(u) = uB + (1-u)C over a u grid.
    GapScan(GapScanArgs),
    /// Fit a scaling model to two-column data (x y per line; `#` comments).
    Fit {
        /// log | power | exp
        #[arg(long)]
        model: String,
        /// Input file (default: stdin).
        #[arg(long, value_name = "FILE")]
        input: Option<PathBuf>,
    },
    /// Desk-scale analogue of the algorithm comparison table.
    Report,
    /// Brute-force equivalence suites at n <= 12; exits 3 on failure.
    OracleCheck {
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args)]
struct SweepArgs {
    /// ramp | spike | bush | table
    #[arg(long)]
    instance: String,
    /// sa | lusa | bbsa | qao | qaoa
    #[arg(long)]
    algorithm: String,
    /// Sizes, comma-separated (e.g. 4,8,16).
    #[arg(long, value_delimiter = ',', required = true)]
    n: Vec<usize>,
    #[arg(long)]
    a: Option<f64>,
    #[arg(long)]
    b: Option<f64>,
    /// Bush mixer strength (default 1/(n+1)).
    #[arg(long)]
    lambda: Option<f64>,
    /// QAOA angles "beta:gamma[,beta:gamma...]".
    #[arg(long)]
    angles: Option<String>,
    /// Schedule overrides "key=value[,key=value...]"; keys: t1, td, t2,
    /// tau0, ratio, rounds, walkers, dt, total_time, pieces, exact.
    #[arg(long)]
    schedule: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Cost table file for --instance table.
    #[arg(long)]
    table: Option<String>,
}

#[derive(Args)]
struct GapScanArgs {
    /// ramp | spike | bush
    #[arg(long)]
    instance: String,
    #[arg(long, value_delimiter = ',', required = true)]
    n: Vec<usize>,
    #[arg(long)]
    a: Option<f64>,
    #[arg(long)]
    b: Option<f64>,
    #[arg(long)]
    lambda: Option<f64>,
    /// Number of grid points over [0, 1].
    #[arg(long, default_value_t = 201)]
    grid: usize,
}

fn parse_angles(text: &str) -> Result<Vec<(f64, f64)>> {
    text.split(',')
        .map(|pair| {
            let (b, g) = pair
                .split_once(':')
                .ok_or_else(|| Error::config("angles", "expected beta:gamma pairs"))?;
            Ok((
                b.trim().parse().map_err(|_| Error::config("angles", "bad beta"))?,
                g.trim().parse().map_err(|_| Error::config("angles", "bad gamma"))?,
            ))
        })
        .collect()
}

fn apply_schedule_overrides(
    text: &str,
    alg: &mut AlgorithmSpec,
    budgets: &mut Budgets,
) -> Result<()> {
    for kv in text.split(',') {
        let (key, value) = kv
            .split_once('=')
            .ok_or_else(|| Error::config("schedule", format!("expected key=value, got `{kv}`")))?;
        let key = key.trim();
        let value = value.trim();
        let bad = |what: &str| Error::config(format!("schedule.{key}"), format!("bad {what} `{value}`"));
        match key {
            "t1" => alg.t1 = Some(value.parse().map_err(|_| bad("number"))?),
            "td" => alg.td = Some(value.parse().map_err(|_| bad("number"))?),
            "t2" => alg.t2 = Some(value.parse().map_err(|_| bad("number"))?),
            "tau0" => alg.tau0 = Some(value.parse().map_err(|_| bad("number"))?),
            "ratio" => alg.ratio = value.parse().map_err(|_| bad("number"))?,
            "rounds" => alg.rounds = value.parse().map_err(|_| bad("integer"))?,
            "exact" => alg.exact = value.parse().map_err(|_| bad("bool"))?,
            "walkers" => budgets.walkers = value.parse().map_err(|_| bad("integer"))?,
            "dt" => budgets.dt = Some(value.parse().map_err(|_| bad("number"))?),
            "total_time" => budgets.total_time = Some(value.parse().map_err(|_| bad("number"))?),
            "pieces" => budgets.pieces = value.parse().map_err(|_| bad("integer"))?,
            other => {
                return Err(Error::config(
                    "schedule",
                    format!("unknown schedule key `{other}`"),
                ))
            }
        }
    }
    Ok(())
}

fn sweep_config(args: &SweepArgs) -> Result<ExperimentConfig> {
    let mut alg = AlgorithmSpec {
        kind: args.algorithm.clone(),
        angles: args.angles.as_deref().map(parse_angles).transpose()?,
        lambda: args.lambda,
        t1: None,
        td: None,
        t2: None,
        tau0: None,
        ratio: 0.7,
        rounds: 20,
        exact: false,
    };
    let mut budgets = Budgets::default();
    if let Some(text) = &args.schedule {
        apply_schedule_overrides(text, &mut alg, &mut budgets)?;
    }
    let config = ExperimentConfig {
        instance: InstanceSpec {
            kind: args.instance.clone(),
            a: args.a,
            b: args.b,
            table: args.table.clone(),
        },
        algorithm: alg,
        sizes: args.n.clone(),
        seeds: vec![args.seed],
        budgets,
    };
    config.validate()?;
    Ok(config)
}

fn out_writer(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn gap_scan_cmd(args: &GapScanArgs, out: &mut dyn Write) -> Result<()> {
    if args.grid < 2 {
        return Err(Error::config("grid", "need at least 2 points"));
    }
    let grid: Vec<f64> = (0..args.grid)
        .map(|k| k as f64 / (args.grid - 1) as f64)
        .collect();
    let mut summary: Vec<(f64, f64)> = Vec::new();
    for &n in &args.n {
        let (inst, mixer) = match args.instance.as_str() {
            "ramp" => {
                let inst = Instance::Symmetric(banglab::landscape::make_ramp(n));
                let mixer = default_mixer(&inst);
                (inst, mixer)
            }
            "spike" => {
                let (a, b) = match (args.a, args.b) {
                    (Some(a), Some(b)) => (a, b),
                    _ => return Err(Error::config("a/b", "required for spike gap scans")),
                };
                let inst = Instance::Symmetric(make_spike(n, a, b)?);
                let mixer = default_mixer(&inst);
                (inst, mixer)
            }
            "bush" => {
                let inst = Instance::Bush(BushCost::new(n));
                let mixer = match args.lambda {
                    Some(l) => mixer_lambda(n, l)?,
                    None => default_mixer(&inst),
                };
                (inst, mixer)
            }
            other => {
                return Err(Error::config(
                    "instance",
                    format!("unknown instance kind `{other}`"),
                ))
            }
        };
        let scan = spectral_gap_scan(&inst, &mixer, &grid)?;
        writeln!(
            out,
            "# n={n} min_gap={:.6e} argmin_u={:.6} degenerate={}",
            scan.min_gap, scan.argmin_u, scan.degenerate
        )?;
        write_tsv_pairs(&scan.gaps, "u", &format!("gap(n={n})"), &mut *out)?;
        summary.push((n as f64, scan.min_gap));
    }
    writeln!(out, "# summary")?;
    write_tsv_pairs(&summary, "n", "min_gap", out)?;
    Ok(())
}

fn fit_cmd(model: &str, input: &Option<PathBuf>, out: &mut dyn Write) -> Result<()> {
    let model: FitModel = model.parse()?;
    let mut text = String::new();
    match input {
        Some(p) => {
            text = std::fs::read_to_string(p)?;
        }
        None => {
            io::stdin().read_to_string(&mut text)?;
        }
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split_whitespace();
        let parse = |tok: Option<&str>| -> Result<f64> {
            tok.and_then(|t| t.parse().ok())
                .ok_or_else(|| Error::config(format!("line {}", lineno + 1), "expected `x y`"))
        };
        xs.push(parse(parts.next())?);
        ys.push(parse(parts.next())?);
    }
    let fit = fit_scaling(&xs, &ys, model)?;
    let json = serde_json::json!({
        "model": fit.model,
        "alpha": fit.alpha,
        "beta": fit.beta,
        "r_squared": fit.r_squared,
        "rss": fit.rss,
        "points": xs.len(),
    });
    writeln!(out, "{json}")?;
    Ok(())
}

fn real_main() -> Result<u8> {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| Error::config("threads", e.to_string()))?;
    }
    let format: OutputFormat = cli.format.parse()?;
    let mut out = out_writer(&cli.out)?;

    match &cli.command {
        Command::Run { config, seed } => {
            let mut config = ExperimentConfig::from_file(config)?;
            if let Some(seed) = seed {
                config.seeds = vec![*seed];
            }
            let rows = banglab::harness::run(&config)?;
            write_rows(&rows, format, &mut out)?;
        }
        Command::Sweep(args) => {
            let config = sweep_config(args)?;
            let rows = banglab::harness::run(&config)?;
            write_rows(&rows, format, &mut out)?;
        }
        Command::GapScan(args) => gap_scan_cmd(args, &mut out)?,
        Command::Fit { model, input } => fit_cmd(model, input, &mut out)?,
        Command::Report => {
            let rows = table1_report(&ReportOptions::default())?;
            match format {
                OutputFormat::Jsonl => {
                    for row in &rows {
                        writeln!(out, "{}", serde_json::to_string(row).map_err(io::Error::other)?)?;
                    }
                }
                OutputFormat::Csv => {
                    writeln!(out, "regime,algorithm,verdict,detail")?;
                    for row in &rows {
                        writeln!(
                            out,
                            "{},{},{},\"{}\"",
                            row.regime, row.algorithm, row.verdict, row.detail
                        )?;
                    }
                }
            }
        }
        Command::OracleCheck { seed } => {
            let outcomes = run_oracle_suite(*seed);
            let mut failed = false;
            for o in &outcomes {
                let status = if o.passed { "PASS" } else { "FAIL" };
                writeln!(out, "{status}  {}: {}", o.name, o.detail)?;
                failed |= !o.passed;
            }
            if failed {
                return Ok(3);
            }
        }
    }
    out.flush()?;
    Ok(0)
}

fn main() -> ExitCode {
    match real_main() {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

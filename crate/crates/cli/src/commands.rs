//! Subcommand implementations and exit-code policy.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use qmm_core::discriminator::{
    solve_program, success_probability, DiscriminatorDesign, DiscriminatorError,
};
use qmm_core::montecarlo::{compare_analytic, monte_carlo, outcome_distributions};
use qmm_core::optimize::{
    average_ratio, best_phi0, design_bank, select_program, Interval, OptimizeError,
    SelectionRule, DEFAULT_SUBDIVISIONS,
};
use qmm_core::sweep::{sweep, SweepRow};
use qmm_core::verify::{run_all, VerifyConfig};

use crate::format::g9;
use crate::scenario::{ResolvedScenario, ScenarioFile};

pub const EXIT_OK: i32 = 0;
pub const EXIT_STATISTICAL: i32 = 1;
pub const EXIT_INPUT_ERROR: i32 = 2;
pub const EXIT_UNPROGRAMMABLE: i32 = 3;

/// Seed used when neither the command line, the scenario file nor
/// `QMM_SEED` provides one.
pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug)]
enum CliError {
    Input(String),
    Unprogrammable(String),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => EXIT_INPUT_ERROR,
            CliError::Unprogrammable(_) => EXIT_UNPROGRAMMABLE,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Input(m) | CliError::Unprogrammable(m) => m,
        }
    }
}

fn input_err<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Input(e.to_string())
}

#[derive(Debug, Parser)]
#[command(
    name = "qmm",
    version,
    about = "Programmable quantum measurement simulator",
    long_about = "Simulates a programmable measurement device built from a fixed \
                  controlled unitary and a fixed projective measurement, specialized \
                  to unambiguous discrimination of symmetric qubit pairs."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tabulate ratio and success probabilities across pair angles
    Sweep(SweepArgs),
    /// Execute a scenario file: solve the program, run Monte Carlo trials,
    /// compare against the analytic prediction
    Run(RunArgs),
    /// Maximize the average ratio over an interval of pair angles
    Optimize(OptimizeArgs),
    /// Run the full verification suite
    Verify(VerifyArgs),
}

fn parse_interval(text: &str) -> Result<(f64, f64), String> {
    let (lo, hi) = text
        .split_once(':')
        .ok_or_else(|| format!("expected `lo:hi`, got `{text}`"))?;
    let lo: f64 = lo.trim().parse().map_err(|e| format!("bad lower bound: {e}"))?;
    let hi: f64 = hi.trim().parse().map_err(|e| format!("bad upper bound: {e}"))?;
    Ok((lo, hi))
}

const FULL_INTERVAL: &str = "0:1.5707963267948966";

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Design angle phi0 in radians
    #[arg(long)]
    pub phi0: f64,
    /// Pair-angle interval `lo:hi` in radians
    #[arg(long, value_parser = parse_interval, default_value = FULL_INTERVAL)]
    pub interval: (f64, f64),
    /// Number of grid points (both endpoints included)
    #[arg(long, default_value_t = 101)]
    pub steps: usize,
    /// CSV output path; stdout when omitted
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write the rows as JSON
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Scenario file (JSON)
    pub scenario: PathBuf,
    /// Override the trial count
    #[arg(long)]
    pub trials: Option<u64>,
    /// Override the random seed
    #[arg(long)]
    pub seed: Option<u64>,
    /// Pick the device from a bank of this many switched designs instead of
    /// the scenario's phi0
    #[arg(long, value_name = "K")]
    pub bank: Option<usize>,
    /// Pair-angle interval the bank is tuned for
    #[arg(long, value_parser = parse_interval, default_value = FULL_INTERVAL)]
    pub interval: (f64, f64),
    /// Design selection rule used with --bank
    #[arg(long, value_enum, default_value_t = SelectRuleArg::ArgmaxR)]
    pub select_rule: SelectRuleArg,
    /// Write a JSON report
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct OptimizeArgs {
    /// Pair-angle interval `lo:hi` in radians
    #[arg(long, value_parser = parse_interval, default_value = FULL_INTERVAL)]
    pub interval: (f64, f64),
    /// Also build a bank of this many switched designs
    #[arg(long, value_name = "K")]
    pub bank: Option<usize>,
    /// Write a JSON report
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Monte Carlo volume for the certification checks
    #[arg(long, default_value_t = 1_000_000)]
    pub trials: u64,
    /// Base seed for the randomized checks
    #[arg(long)]
    pub seed: Option<u64>,
    /// Write the check outcomes as JSON
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SelectRuleArg {
    /// Maximize the achieved ratio (the default)
    #[value(name = "argmax-r")]
    ArgmaxR,
    /// Pick the design angle nearest the pair angle
    #[value(name = "nearest-phi")]
    NearestPhi,
}

impl From<SelectRuleArg> for SelectionRule {
    fn from(value: SelectRuleArg) -> Self {
        match value {
            SelectRuleArg::ArgmaxR => SelectionRule::MaxRatio,
            SelectRuleArg::NearestPhi => SelectionRule::NearestAngle,
        }
    }
}

/// Seed from `QMM_SEED` when set, otherwise the built-in default.
fn fallback_seed() -> Result<u64, CliError> {
    match std::env::var("QMM_SEED") {
        Ok(text) => text
            .trim()
            .parse()
            .map_err(|e| CliError::Input(format!("QMM_SEED is not a 64-bit integer: {e}"))),
        Err(_) => Ok(DEFAULT_SEED),
    }
}

fn interval_of(pair: (f64, f64)) -> Result<Interval, CliError> {
    Interval::new(pair.0, pair.1).map_err(input_err)
}

fn write_output(path: Option<&Path>, contents: &str) -> Result<(), CliError> {
    match path {
        Some(path) => fs::write(path, contents)
            .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{contents}");
            std::io::stdout().flush().ok();
            Ok(())
        }
    }
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Input(format!("cannot serialize report: {e}")))?;
    fs::write(path, text)
        .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))
}

/// Entry point used by the binary; returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    let result = match cli.command {
        Command::Sweep(args) => cmd_sweep(&args),
        Command::Run(args) => cmd_run(&args),
        Command::Optimize(args) => cmd_optimize(&args),
        Command::Verify(args) => cmd_verify(&args),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e.message());
            e.exit_code()
        }
    }
}

#[derive(Serialize)]
struct SweepRowJson {
    phi: f64,
    ratio: f64,
    p_success: f64,
    p_optimal: f64,
    p_quasiclassical: f64,
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("phi,R,p_success,p_optimal,p_quasiclassical\n");
    for row in rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            g9(row.phi),
            g9(row.ratio),
            g9(row.p_success),
            g9(row.p_optimal),
            g9(row.p_quasiclassical)
        ));
    }
    out
}

fn cmd_sweep(args: &SweepArgs) -> Result<i32, CliError> {
    if args.steps < 2 {
        return Err(CliError::Input("sweep needs at least 2 steps".into()));
    }
    let design = DiscriminatorDesign::new(args.phi0).map_err(input_err)?;
    let interval = interval_of(args.interval)?;
    let rows = sweep(&design, &interval, args.steps).map_err(|e| match e {
        DiscriminatorError::Unprogrammable => CliError::Unprogrammable(e.to_string()),
        other => CliError::Input(other.to_string()),
    })?;
    write_output(args.out.as_deref(), &sweep_csv(&rows))?;
    if let Some(path) = &args.json {
        let json_rows: Vec<SweepRowJson> = rows
            .iter()
            .map(|r| SweepRowJson {
                phi: r.phi,
                ratio: r.ratio,
                p_success: r.p_success,
                p_optimal: r.p_optimal,
                p_quasiclassical: r.p_quasiclassical,
            })
            .collect();
        write_json(path, &json_rows)?;
    }
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct RunReport {
    alpha_re: f64,
    alpha_im: f64,
    beta_re: f64,
    beta_im: f64,
    phi: f64,
    phi0: f64,
    selected_design: Option<usize>,
    a_re: f64,
    a_im: f64,
    b_re: f64,
    b_im: f64,
    expected_success: f64,
    trials: u64,
    seed: u64,
    counts: [[u64; 3]; 2],
    success_frequency: f64,
    sigma: f64,
    z_score: f64,
    wrong_identifications: u64,
    passed: bool,
}

fn pick_design(
    args: &RunArgs,
    resolved: &ResolvedScenario,
) -> Result<(DiscriminatorDesign, Option<usize>), CliError> {
    match args.bank {
        None => {
            let design = resolved.design.ok_or_else(|| {
                CliError::Input("scenario gives no `phi0`; set one or pass --bank".into())
            })?;
            Ok((design, None))
        }
        Some(k) => {
            if resolved.program.is_some() {
                return Err(CliError::Input(
                    "an explicit program conflicts with --bank; remove one".into(),
                ));
            }
            let interval = interval_of(args.interval)?;
            let bank = design_bank(k, &interval).map_err(input_err)?;
            let (index, _) =
                select_program(&bank, &resolved.pair, args.select_rule.into()).map_err(
                    |e| match e {
                        OptimizeError::NoFeasibleDesign => CliError::Unprogrammable(e.to_string()),
                        other => CliError::Input(other.to_string()),
                    },
                )?;
            Ok((bank.designs()[index], Some(index)))
        }
    }
}

fn cmd_run(args: &RunArgs) -> Result<i32, CliError> {
    let text = fs::read_to_string(&args.scenario).map_err(|e| {
        CliError::Input(format!("cannot read {}: {e}", args.scenario.display()))
    })?;
    let file = ScenarioFile::parse(&text).map_err(CliError::Input)?;
    let resolved = file
        .resolve(args.trials, args.seed, fallback_seed()?)
        .map_err(CliError::Input)?;
    let (design, selected) = pick_design(args, &resolved)?;

    let program = match resolved.program {
        Some(p) => p,
        None => solve_program(&resolved.pair, &design).map_err(|e| match e {
            DiscriminatorError::Unprogrammable => CliError::Unprogrammable(e.to_string()),
            other => CliError::Input(other.to_string()),
        })?,
    };

    // Expected success frequency of the executed configuration; equals the
    // analytic success probability whenever the program solves the pair.
    let dists =
        outcome_distributions(&resolved.pair, &design, &program).map_err(input_err)?;
    let expected =
        resolved.priors[0] * dists[0][0] + resolved.priors[1] * dists[1][1];

    let mut scenario = resolved.with_design(design);
    scenario.program = Some(program);
    let stats = monte_carlo(&scenario).map_err(input_err)?;
    let report = compare_analytic(&stats, expected);

    println!(
        "pair: phi = {} rad ({} pi); alpha = {}+{}i, beta = {}+{}i",
        g9(resolved.pair.phi()),
        g9(resolved.pair.phi() / std::f64::consts::PI),
        g9(resolved.pair.alpha().re),
        g9(resolved.pair.alpha().im),
        g9(resolved.pair.beta().re),
        g9(resolved.pair.beta().im)
    );
    match selected {
        Some(index) => println!(
            "design: phi0 = {} rad ({} pi), selected from bank at index {index}",
            g9(design.phi0()),
            g9(design.phi0() / std::f64::consts::PI)
        ),
        None => println!(
            "design: phi0 = {} rad ({} pi)",
            g9(design.phi0()),
            g9(design.phi0() / std::f64::consts::PI)
        ),
    }
    println!(
        "program: a = {}+{}i, b = {}+{}i",
        g9(program.a().re),
        g9(program.a().im),
        g9(program.b().re),
        g9(program.b().im)
    );
    if let Ok(p) = success_probability(&resolved.pair, &design) {
        println!("analytic success probability: {}", g9(p));
    }
    println!("expected success frequency: {}", g9(expected));
    println!(
        "monte carlo: {} trials, seed {}",
        scenario.trials, scenario.seed
    );
    println!("counts (rows prepared psi1/psi2; columns verdict psi1/psi2/inconclusive):");
    for (row, name) in stats.counts().iter().zip(["psi1", "psi2"]) {
        println!("  {name}: {} {} {}", row[0], row[1], row[2]);
    }
    println!(
        "success frequency: {} (z = {}, sigma = {})",
        g9(report.observed_frequency),
        g9(report.z_score),
        g9(report.sigma)
    );
    println!("wrong identifications: {}", report.wrong_identifications);
    println!("verdict: {}", if report.passed { "PASS" } else { "FAIL" });

    if let Some(path) = &args.json {
        write_json(
            path,
            &RunReport {
                alpha_re: resolved.pair.alpha().re,
                alpha_im: resolved.pair.alpha().im,
                beta_re: resolved.pair.beta().re,
                beta_im: resolved.pair.beta().im,
                phi: resolved.pair.phi(),
                phi0: design.phi0(),
                selected_design: selected,
                a_re: program.a().re,
                a_im: program.a().im,
                b_re: program.b().re,
                b_im: program.b().im,
                expected_success: expected,
                trials: scenario.trials,
                seed: scenario.seed,
                counts: *stats.counts(),
                success_frequency: report.observed_frequency,
                sigma: report.sigma,
                z_score: report.z_score,
                wrong_identifications: report.wrong_identifications,
                passed: report.passed,
            },
        )?;
    }
    Ok(if report.passed {
        EXIT_OK
    } else {
        EXIT_STATISTICAL
    })
}

#[derive(Serialize)]
struct BankEntryJson {
    segment_lo: f64,
    segment_hi: f64,
    phi0: f64,
    segment_average: f64,
}

#[derive(Serialize)]
struct OptimizeReport {
    interval_lo: f64,
    interval_hi: f64,
    phi0_star: f64,
    phi0_star_in_pi: f64,
    average_ratio: f64,
    bank: Vec<BankEntryJson>,
}

fn cmd_optimize(args: &OptimizeArgs) -> Result<i32, CliError> {
    let interval = interval_of(args.interval)?;
    let (phi0, average) = best_phi0(&interval).map_err(input_err)?;
    println!(
        "interval: [{}, {}] rad",
        g9(interval.lo()),
        g9(interval.hi())
    );
    println!(
        "phi0* = {} rad = {} pi",
        g9(phi0),
        g9(phi0 / std::f64::consts::PI)
    );
    println!("average R = {}", g9(average));

    let mut bank_entries = Vec::new();
    if let Some(k) = args.bank {
        let bank = design_bank(k, &interval).map_err(input_err)?;
        println!("bank of {k} switched designs:");
        let width = interval.width() / k as f64;
        for (segment, design) in bank.designs().iter().enumerate() {
            let lo = interval.lo() + width * segment as f64;
            let hi = lo + width;
            let seg = Interval::new(lo, hi).map_err(input_err)?;
            let seg_avg =
                average_ratio(design.phi0(), &seg, DEFAULT_SUBDIVISIONS).map_err(input_err)?;
            println!(
                "  segment {segment} [{}, {}]: phi0 = {} rad ({} pi), average R = {}",
                g9(lo),
                g9(hi),
                g9(design.phi0()),
                g9(design.phi0() / std::f64::consts::PI),
                g9(seg_avg)
            );
            bank_entries.push(BankEntryJson {
                segment_lo: lo,
                segment_hi: hi,
                phi0: design.phi0(),
                segment_average: seg_avg,
            });
        }
    }

    if let Some(path) = &args.json {
        write_json(
            path,
            &OptimizeReport {
                interval_lo: interval.lo(),
                interval_hi: interval.hi(),
                phi0_star: phi0,
                phi0_star_in_pi: phi0 / std::f64::consts::PI,
                average_ratio: average,
                bank: bank_entries,
            },
        )?;
    }
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct CheckJson {
    name: String,
    passed: bool,
    detail: String,
}

fn cmd_verify(args: &VerifyArgs) -> Result<i32, CliError> {
    let seed = match args.seed {
        Some(seed) => seed,
        None => fallback_seed()?,
    };
    let config = VerifyConfig {
        trials: args.trials,
        seed,
    };
    let outcomes = run_all(&config);
    let mut all_passed = true;
    for outcome in &outcomes {
        all_passed &= outcome.passed;
        println!(
            "[{}] {:<32} {}",
            if outcome.passed { "PASS" } else { "FAIL" },
            outcome.name,
            outcome.detail
        );
    }
    println!(
        "verify: {}/{} checks passed",
        outcomes.iter().filter(|o| o.passed).count(),
        outcomes.len()
    );
    if let Some(path) = &args.json {
        let rows: Vec<CheckJson> = outcomes
            .iter()
            .map(|o| CheckJson {
                name: o.name.to_string(),
                passed: o.passed,
                detail: o.detail.clone(),
            })
            .collect();
        write_json(path, &rows)?;
    }
    Ok(if all_passed { EXIT_OK } else { EXIT_STATISTICAL })
}

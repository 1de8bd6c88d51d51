use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ricci4::{
    estimate_blowup, hyperkahler_residuals, integrate, radius_grid, run_case, table1_cases,
    verify_backward_flow, verify_modified_flow, BlowupSearch, CaseRow, Direction, Expectation,
    FlowConfig, FlowState, Group, IntegratorSettings, Side, SignPattern, SpecialMetric,
    SpecialReport, Termination, VerificationReport,
};
use serde_json::json;

const RTOL_ENV: &str = "RICCI4_DEFAULT_RTOL";

#[derive(Parser)]
#[command(name = "ricci4", version, about = "Ricci flow on 3D Lie groups and the cohomogeneity-one 4-metrics built from it")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate a flow and write the trajectory.
    Flow(FlowArgs),
    /// Check Ricci-flatness of a cohomogeneity-one metric along a flow.
    Verify(VerifyArgs),
    /// Check Taub-NUT or Eguchi-Hanson against the SU(2) flow systems.
    Special(SpecialArgs),
    /// Check closure of the hyper-Kähler forms along an H3 or E(2) flow.
    Hyperkahler(HyperkahlerArgs),
    /// Run a batch of verifications.
    Report(ReportArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Args)]
struct Tolerances {
    /// Relative tolerance [default: 1e-10, or $RICCI4_DEFAULT_RTOL]
    #[arg(long)]
    rtol: Option<f64>,
    /// Absolute tolerance
    #[arg(long, default_value_t = 1e-12)]
    atol: f64,
}

impl Tolerances {
    fn settings(&self) -> Result<IntegratorSettings<f64>, CliError> {
        let rtol = match self.rtol {
            Some(r) => r,
            None => match std::env::var(RTOL_ENV) {
                Ok(v) => v.parse().map_err(|_| CliError::Usage(format!("{RTOL_ENV}={v} is not a number")))?,
                Err(_) => 1e-10,
            },
        };
        let settings = IntegratorSettings::default().with_tolerances(rtol, self.atol);
        settings.validate().map_err(|e| CliError::Usage(e.to_string()))?;
        Ok(settings)
    }
}

#[derive(Args)]
struct FlowArgs {
    #[arg(long, value_parser = parse_group)]
    group: Group,
    /// Initial coefficients as `a,b,c`
    #[arg(long, value_parser = parse_triple)]
    init: [f64; 3],
    #[arg(long, default_value_t = 0.0)]
    t0: f64,
    #[arg(long)]
    t_end: f64,
    #[arg(long, default_value_t = 1.0)]
    scale: f64,
    #[arg(long, default_value = "forward", value_parser = parse_direction)]
    direction: Direction,
    #[command(flatten)]
    tol: Tolerances,
    /// Output file; stdout when omitted
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Args)]
struct VerifyArgs {
    /// Table row, by the group acting on the 4-manifold
    #[arg(long, value_parser = parse_group, conflicts_with_all = ["group", "flow_group", "signs"])]
    case: Option<Group>,
    /// Group acting on the 4-manifold
    #[arg(long, value_parser = parse_group, required_unless_present = "case")]
    group: Option<Group>,
    /// Group whose flow drives the coefficients [default: --group]
    #[arg(long, value_parser = parse_group)]
    flow_group: Option<Group>,
    /// Metric signs, e.g. `+++`, `+--`, `--+` [default: +++]
    #[arg(long, value_parser = parse_signs)]
    signs: Option<SignPattern>,
    #[arg(long, value_parser = parse_triple, default_value = "1,2,3")]
    init: [f64; 3],
    #[arg(long, default_value_t = 5.0)]
    t_end: f64,
    #[arg(long, default_value_t = 50)]
    samples: usize,
    /// Pass threshold on |R_ij|
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[command(flatten)]
    tolerances: Tolerances,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args)]
struct SpecialArgs {
    #[arg(value_parser = parse_metric)]
    metric: SpecialMetric,
    #[arg(long, default_value_t = 1.0, value_parser = parse_positive)]
    m: f64,
    /// Radii to sample; log-spaced over (m, 100 m] when omitted
    #[arg(long, value_delimiter = ',')]
    radii: Option<Vec<f64>>,
    #[arg(long, default_value_t = 30)]
    points: usize,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args)]
struct HyperkahlerArgs {
    #[arg(long, value_parser = parse_group)]
    group: Group,
    #[arg(long, value_parser = parse_triple, default_value = "1,2,3")]
    init: [f64; 3],
    #[arg(long, default_value_t = 5.0)]
    t_end: f64,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[command(flatten)]
    tolerances: Tolerances,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args)]
struct ReportArgs {
    /// Every table row with pseudo-random initial data
    #[arg(long, required = true)]
    table1: bool,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Initial conditions per row
    #[arg(long, default_value_t = 3)]
    runs: usize,
    #[arg(long, default_value_t = 5.0)]
    t_end: f64,
    #[arg(long, default_value_t = 50)]
    samples: usize,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[command(flatten)]
    tolerances: Tolerances,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

fn parse_group(s: &str) -> Result<Group, String> {
    s.parse().map_err(|e: ricci4::Error| e.to_string())
}

fn parse_signs(s: &str) -> Result<SignPattern, String> {
    s.parse().map_err(|e: ricci4::Error| e.to_string())
}

fn parse_direction(s: &str) -> Result<Direction, String> {
    s.parse().map_err(|e: ricci4::Error| e.to_string())
}

fn parse_metric(s: &str) -> Result<SpecialMetric, String> {
    s.parse().map_err(|e: ricci4::Error| e.to_string())
}

fn parse_positive(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(x) if x > 0.0 && x.is_finite() => Ok(x),
        Ok(x) => Err(format!("must be positive, got {x}")),
        Err(e) => Err(e.to_string()),
    }
}

fn parse_triple(s: &str) -> Result<[f64; 3], String> {
    let parts = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("`{p}`: {e}")))
        .collect::<Result<Vec<_>, _>>()?;
    let triple: [f64; 3] = parts.try_into().map_err(|_| format!("expected three values a,b,c, got `{s}`"))?;
    if triple.iter().any(|x| *x == 0.0 || !x.is_finite()) {
        return Err("coefficients must be finite and nonzero".into());
    }
    Ok(triple)
}

enum CliError {
    Usage(String),
    Failure(anyhow::Error),
}

impl From<anyhow::Error> for CliError {
    fn from(e: anyhow::Error) -> Self {
        CliError::Failure(e)
    }
}

impl From<ricci4::Error> for CliError {
    fn from(e: ricci4::Error) -> Self {
        CliError::Failure(e.into())
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Failure(e.into())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Failure(e.into())
    }
}

type CmdResult = Result<bool, CliError>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Flow(args) => cmd_flow(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Special(args) => cmd_special(args),
        Command::Hyperkahler(args) => cmd_hyperkahler(args),
        Command::Report(args) => cmd_report(args),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Failure(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn cmd_flow(args: FlowArgs) -> CmdResult {
    let settings = args.tol.settings()?;
    if args.format == Format::Text {
        return Err(CliError::Usage("flow writes csv or json".into()));
    }
    if args.t_end == args.t0 {
        return Err(CliError::Usage("--t-end must differ from --t0".into()));
    }
    let cfg = FlowConfig::new(args.group).with_scale(args.scale).with_direction(args.direction);
    let [a, b, c] = args.init;
    let init = FlowState::new(args.t0, a, b, c);
    let traj = integrate(&cfg, &init, args.t_end, &settings)?;

    let mut out: Box<dyn Write> = match &args.output {
        Some(path) => Box::new(BufWriter::new(
            File::create(path).with_context(|| format!("creating {}", path.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    match args.format {
        Format::Json => {
            let v = json!({
                "config": cfg,
                "initial": init,
                "termination": traj.terminated,
                "invariant_drift": traj.invariant_drift,
                "samples": traj.samples(),
            });
            serde_json::to_writer_pretty(&mut out, &v)?;
            writeln!(out)?;
        }
        _ => traj.write_csv(&mut out)?,
    }
    out.flush()?;

    for e in &traj.invariant_drift.entries {
        eprintln!("drift {}: {:.3e} (relative)", e.invariant.name(), e.max_rel_drift);
    }
    match traj.terminated {
        Termination::ReachedEnd => eprintln!("reached t = {}", args.t_end),
        Termination::BlowUpDetected => {
            let (lo, hi) = traj.span();
            let t = if args.t_end > args.t0 { hi } else { lo };
            eprintln!("blow-up detected near t = {t}");
        }
        Termination::StepBudget => eprintln!("step budget exhausted at t = {}", traj.final_state().t),
    }
    if args.group == Group::H3 {
        let side = if a * b * c > 0.0 { Side::Past } else { Side::Future };
        if let BlowupSearch::Finite(est) = estimate_blowup(&cfg, &init, side, 100.0, &settings)? {
            eprintln!("finite existence limit in the {} near t = {}", if est.side == Side::Past { "past" } else { "future" }, est.time);
        }
    }
    Ok(traj.terminated != Termination::StepBudget)
}

fn print_verification(report: &VerificationReport<f64>, format: Format) -> Result<(), CliError> {
    if format == Format::Json {
        println!("{}", report.to_json()?);
        return Ok(());
    }
    let verdict = match (report.expectation, report.pass) {
        (Expectation::RicciFlat, true) => "PASS: Ricci-flat".to_string(),
        (Expectation::RicciFlat, false) => "FAIL: not Ricci-flat".to_string(),
        (_, true) => "expected non-flat: confirmed".to_string(),
        (e, false) => format!("FAIL: expected {}", e.describe()),
    };
    println!("{}", report.case.label());
    println!("  samples:            {}", report.samples.len());
    println!("  max |R_ij|:         {:.3e}", report.max_abs_ricci);
    println!(
        "  per component:      R00 {:.3e}  R11 {:.3e}  R22 {:.3e}  R33 {:.3e}",
        report.component_max[0], report.component_max[1], report.component_max[2], report.component_max[3]
    );
    if let Expectation::ConstantR22 { .. } = report.expectation {
        let lo = report.components.r22.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = report.components.r22.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        println!("  R22 range:          [{lo:.12}, {hi:.12}]");
    }
    println!("  oracle max |R_ij|:  {:.3e}", report.oracle_max_abs_ricci);
    println!("  oracle residual:    {:.3e}", report.oracle_residual);
    println!("  {verdict}");
    Ok(())
}

fn cmd_verify(args: VerifyArgs) -> CmdResult {
    let settings = args.tolerances.settings()?;
    let case = match (args.case, args.group) {
        (Some(g), _) => CaseRow::table1(g)
            .ok_or_else(|| CliError::Usage(format!("{g} has no table row; pass --group/--flow-group/--signs")))?,
        (None, Some(g)) => CaseRow::new(g, args.flow_group.unwrap_or(g), args.signs.unwrap_or(SignPattern::ALL_PLUS)),
        (None, None) => return Err(CliError::Usage("either --case or --group is required".into())),
    };
    if args.samples == 0 {
        return Err(CliError::Usage("--samples must be positive".into()));
    }
    let [a, b, c] = args.init;
    let report = run_case(&case, &FlowState::initial(a, b, c), args.t_end, &settings, args.samples, args.tol)?;
    print_verification(&report, args.format)?;
    Ok(report.pass)
}

fn cmd_special(args: SpecialArgs) -> CmdResult {
    let radii = match args.radii {
        Some(list) => {
            let kept: Vec<f64> = list.iter().copied().filter(|r| *r > args.m).collect();
            if kept.len() < list.len() {
                eprintln!("warning: dropped {} radii not exceeding m = {}", list.len() - kept.len(), args.m);
            }
            kept
        }
        None => radius_grid(args.m, args.points),
    };
    if radii.is_empty() {
        return Err(CliError::Usage(format!("no radii above m = {}", args.m)));
    }
    let report: SpecialReport<f64> = match args.metric {
        SpecialMetric::TaubNut => verify_backward_flow(args.m, &radii, args.tol)?,
        SpecialMetric::EguchiHanson => verify_modified_flow(args.m, &radii, args.tol)?,
    };
    if args.format == Format::Json {
        println!("{}", report.to_json()?);
        return Ok(report.pass);
    }
    println!("{} (m = {}, {} radii)", args.metric.name(), args.m, report.samples.len());
    println!("  max oracle |Ric|:   {:.3e}", report.max_ricci);
    for fit in &report.candidates {
        println!("  {:<40} max residual {:.3e}", fit.convention.describe(), fit.max_residual);
    }
    match report.matched_convention {
        Some(c) => println!("  matched convention: {}", c.describe()),
        None => println!("  matched convention: none"),
    }
    println!("  usual convention:   {}", report.printed_convention.describe());
    println!("  agrees with usual:  {}", report.agrees_with_printed);
    println!("  {}", if report.pass { "PASS" } else { "FAIL" });
    Ok(report.pass)
}

fn cmd_hyperkahler(args: HyperkahlerArgs) -> CmdResult {
    if !matches!(args.group, Group::H3 | Group::E2) {
        return Err(CliError::Usage(format!("closure conditions exist for H3 and E(2), not {}", args.group)));
    }
    let settings = args.tolerances.settings()?;
    let [a, b, c] = args.init;
    let traj = integrate(&FlowConfig::new(args.group), &FlowState::initial(a, b, c), args.t_end, &settings)?;
    let mut max = [0.0f64; 3];
    for jet in traj.samples() {
        let r = hyperkahler_residuals(args.group, jet)?.as_array();
        for i in 0..3 {
            max[i] = max[i].max(r[i].abs());
        }
    }
    let pass = max.iter().all(|m| *m < args.tol);
    if args.format == Format::Json {
        let v = json!({
            "group": args.group,
            "init": args.init,
            "samples": traj.samples().len(),
            "max_residuals": {"r1": max[0], "r2": max[1], "r3": max[2]},
            "pass": pass,
        });
        println!("{}", serde_json::to_string_pretty(&v)?);
    } else {
        println!("{} closure along {} samples", args.group, traj.samples().len());
        println!("  max residuals: {:.3e} {:.3e} {:.3e}", max[0], max[1], max[2]);
        println!("  {}", if pass { "PASS" } else { "FAIL" });
    }
    Ok(pass)
}

fn cmd_report(args: ReportArgs) -> CmdResult {
    debug_assert!(args.table1);
    let settings = args.tolerances.settings()?;
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let mut rows = Vec::new();
    let mut all_pass = true;
    for case in table1_cases() {
        let mut runs = Vec::new();
        for _ in 0..args.runs {
            let init: [f64; 3] = std::array::from_fn(|_| rng.gen_range(0.5..=3.0));
            let report = run_case(
                &case,
                &FlowState::initial(init[0], init[1], init[2]),
                args.t_end,
                &settings,
                args.samples,
                args.tol,
            )?;
            all_pass &= report.pass;
            runs.push((init, report));
        }
        rows.push((case, runs));
    }
    if args.format == Format::Json {
        let v: Vec<_> = rows
            .iter()
            .map(|(case, runs)| {
                json!({
                    "case": case,
                    "runs": runs.iter().map(|(init, r)| json!({
                        "init": init,
                        "max_abs_ricci": r.max_abs_ricci,
                        "oracle_max_abs_ricci": r.oracle_max_abs_ricci,
                        "termination": r.termination,
                        "pass": r.pass,
                    })).collect::<Vec<_>>(),
                })
            })
            .collect();
        println!("{}", serde_json::to_string_pretty(&json!({"seed": args.seed, "rows": v, "pass": all_pass}))?);
    } else {
        println!("seed {}", args.seed);
        for (case, runs) in &rows {
            let cells: Vec<String> = runs
                .iter()
                .map(|(_, r)| format!("{} {:.1e}", if r.pass { "PASS" } else { "FAIL" }, r.max_abs_ricci.max(r.oracle_max_abs_ricci)))
                .collect();
            println!("{:<32} {}", case.label(), cells.join("  "));
        }
        println!("{}", if all_pass { "all rows Ricci-flat" } else { "FAILURES above" });
    }
    Ok(all_pass)
}

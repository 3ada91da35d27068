//! Command-line front end.
//!
//! Exit codes: 0 success, 1 usage error, 2 input parse error, 3 domain or
//! parameter error, 4 I/O error.

use std::ffi::OsString;
use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::adjudicator::{adjudicate_all, render_judgment, RuleParams};
use crate::court::{default_constitution, replay, run_simulation, Constitution, SimulationTrace};
use crate::equilibrium::{
    model_from_tax_params, render_ascii, render_svg, solve_equilibrium, DiagramOptions,
    Equilibrium,
};
use crate::formats::{
    export_trace, parse_case_file, parse_replay_script, ConstitutionSource, SAMPLE_SESSION,
    SAMPLE_CASES,
};
use crate::money::{parse_money, parse_rate, Money, Rate};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_DOMAIN: i32 = 3;
pub const EXIT_IO: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "autonomy",
    about = "Legal equilibrium, tax adjudication and constitutional court models",
    disable_version_flag = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve the rights/duties model for its legal equilibrium.
    Equilibrium(EquilibriumArgs),
    /// Adjudicate a case file and print one judgment per case.
    Adjudicate(AdjudicateArgs),
    /// Run a seeded court session with a learning lawyer.
    CourtSimulate(SimulateArgs),
    /// Re-run a scripted court session.
    CourtReplay(ReplayArgs),
    /// Print the program version.
    Version,
}

#[derive(Debug, Args)]
struct EquilibriumArgs {
    /// Total tax evasion revealed by audits, in UAH.
    #[arg(long, default_value = "442000000", allow_negative_numbers = true)]
    evasion: String,
    /// Tax rate applied to declared income.
    #[arg(long, default_value = "0.18", allow_negative_numbers = true)]
    tax_rate: String,
    /// Penalty rate applied to the tax debt.
    #[arg(long, default_value = "0.25", allow_negative_numbers = true)]
    penalty_rate: String,
    /// Write the SVG diagram to this file (default: not written).
    #[arg(long, value_name = "PATH")]
    svg_out: Option<PathBuf>,
    /// Print the ASCII diagram after the report.
    #[arg(long)]
    ascii: bool,
    /// Past the zero-debt income, let duties follow the rights line instead of extrapolating.
    #[arg(long)]
    strict_domain: bool,
    /// Left edge of the diagram, in millions.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    x_min: f64,
    /// Right edge of the diagram, in millions.
    #[arg(long, default_value_t = 5000.0, allow_negative_numbers = true)]
    x_max: f64,
    /// Bottom edge of the diagram, in millions.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    y_min: f64,
    /// Top edge of the diagram, in millions.
    #[arg(long, default_value_t = 1000.0, allow_negative_numbers = true)]
    y_max: f64,
}

#[derive(Debug, Args)]
struct AdjudicateArgs {
    /// Case file (JSON Lines); `-` reads standard input, `builtin:sample_cases` the bundled cases.
    #[arg(long, value_name = "PATH", default_value = "-")]
    cases: String,
    /// Corporate tax rate.
    #[arg(long, default_value = "0.18", allow_negative_numbers = true)]
    tax_rate: String,
    /// Late-payment penalty rate on the tax debt.
    #[arg(long, default_value = "0.20", allow_negative_numbers = true)]
    late_penalty_rate: String,
    /// Largest difference, exclusive, at which an assessment counts as correct.
    #[arg(long, default_value = "0.01", allow_negative_numbers = true)]
    tolerance: String,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    /// Constitution file, or `builtin` for the bundled one.
    #[arg(long, value_name = "PATH", default_value = "builtin")]
    constitution: String,
    /// Seed of the SplitMix64 generator.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Number of cases to hear.
    #[arg(long, default_value_t = 30)]
    cases: usize,
    /// Write the structured trace (JSON Lines) to this file (default: not written).
    #[arg(long, value_name = "PATH")]
    export: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ReplayArgs {
    /// Replay script, or `builtin:sample_session` for the bundled 30-case session.
    #[arg(long, value_name = "PATH")]
    script: String,
    /// Constitution file or `builtin`; overrides the script (default: the script's, else builtin).
    #[arg(long, value_name = "PATH")]
    constitution: Option<String>,
    /// Write the structured trace (JSON Lines) to this file (default: not written).
    #[arg(long, value_name = "PATH")]
    export: Option<PathBuf>,
}

#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn parse(message: impl Into<String>) -> Self {
        Failure { code: EXIT_PARSE, message: message.into() }
    }

    fn domain(message: impl Into<String>) -> Self {
        Failure { code: EXIT_DOMAIN, message: message.into() }
    }

    fn io(message: impl Into<String>) -> Self {
        Failure { code: EXIT_IO, message: message.into() }
    }
}

struct Streams<'a> {
    stdin: &'a mut dyn Read,
    stdout: &'a mut dyn Write,
    stderr: &'a mut dyn Write,
}

/// Runs the command line `args` (program name first) and returns the exit code.
pub fn run<I, T>(
    args: I,
    stdin: &mut dyn Read,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{e}");
                    EXIT_OK
                }
                ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
                    let _ = write!(stderr, "{e}");
                    EXIT_USAGE
                }
                _ => {
                    let _ = write!(stderr, "{e}");
                    EXIT_USAGE
                }
            };
        }
    };
    let mut streams = Streams { stdin, stdout, stderr };
    let result = match cli.command {
        Command::Equilibrium(args) => cmd_equilibrium(args, &mut streams),
        Command::Adjudicate(args) => cmd_adjudicate(args, &mut streams),
        Command::CourtSimulate(args) => cmd_court_simulate(args, &mut streams),
        Command::CourtReplay(args) => cmd_court_replay(args, &mut streams),
        Command::Version => writeln!(
            streams.stdout,
            "{} {}",
            env!("CARGO_PKG_NAME"),
            env!("CARGO_PKG_VERSION")
        )
        .map_err(|e| Failure::io(e.to_string())),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(failure) => {
            let _ = writeln!(streams.stderr, "error: {}", failure.message);
            failure.code
        }
    }
}

fn write_out(out: &mut dyn Write, text: &str) -> Result<(), Failure> {
    out.write_all(text.as_bytes())
        .and_then(|_| out.flush())
        .map_err(|e| Failure::io(format!("cannot write output: {e}")))
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::io(format!("cannot write {}: {e}", path.display())))
}

fn read_file(path: &str) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::io(format!("cannot read {path}: {e}")))
}

fn rate_flag(flag: &str, text: &str) -> Result<Rate, Failure> {
    parse_rate(text).map_err(|e| Failure::domain(format!("--{flag}: {e}")))
}

fn money_flag(flag: &str, text: &str) -> Result<Money, Failure> {
    parse_money(text).map_err(|e| Failure::domain(format!("--{flag}: {e}")))
}

fn cmd_equilibrium(args: EquilibriumArgs, io: &mut Streams<'_>) -> Result<(), Failure> {
    let evasion = money_flag("evasion", &args.evasion)?;
    let tax_rate = rate_flag("tax-rate", &args.tax_rate)?;
    let penalty_rate = rate_flag("penalty-rate", &args.penalty_rate)?;
    let model = model_from_tax_params(evasion, tax_rate, penalty_rate)
        .map_err(|e| Failure::domain(e.to_string()))?
        .with_strict_domain(args.strict_domain);
    let equilibrium = solve_equilibrium(&model);
    let opts = DiagramOptions {
        x_range: (args.x_min, args.x_max),
        y_range: (args.y_min, args.y_max),
        ..DiagramOptions::default()
    };

    let mut report = format!(
        "rights:         R(I) = {}\nduties:         D(I) = {}\n",
        model.rights().describe("I"),
        model.duties().describe("I")
    );
    match &equilibrium {
        Equilibrium::Point(p) => {
            report.push_str(&format!(
                "income:         {} (exact {})\nresponsibility: {} (exact {})\n",
                p.income.to_fixed(2),
                p.income,
                p.responsibility.to_fixed(2),
                p.responsibility
            ));
        }
        other => report.push_str(&format!("equilibrium:    {other}\n")),
    }

    // render before writing anything so a bad window fails cleanly
    let svg = match &args.svg_out {
        Some(_) => Some(render_svg(&model, &equilibrium, &opts).map_err(|e| Failure::domain(e.to_string()))?),
        None => None,
    };
    let ascii = if args.ascii {
        Some(render_ascii(&model, &equilibrium, &opts).map_err(|e| Failure::domain(e.to_string()))?)
    } else {
        None
    };
    if let (Some(path), Some(svg)) = (&args.svg_out, &svg) {
        write_file(path, svg)?;
    }
    if let Some(ascii) = ascii {
        report.push('\n');
        report.push_str(&ascii);
    }
    write_out(io.stdout, &report)
}

fn cmd_adjudicate(args: AdjudicateArgs, io: &mut Streams<'_>) -> Result<(), Failure> {
    let params = RuleParams::new(
        rate_flag("tax-rate", &args.tax_rate)?,
        rate_flag("late-penalty-rate", &args.late_penalty_rate)?,
        money_flag("tolerance", &args.tolerance)?,
    )
    .map_err(|e| Failure::domain(e.to_string()))?;
    let (origin, text) = match args.cases.as_str() {
        "-" => {
            let mut text = String::new();
            io.stdin
                .read_to_string(&mut text)
                .map_err(|e| Failure::io(format!("cannot read standard input: {e}")))?;
            ("<stdin>".to_string(), text)
        }
        "builtin:sample_cases" => (args.cases.clone(), SAMPLE_CASES.to_string()),
        path => (path.to_string(), read_file(path)?),
    };
    let entries = parse_case_file(&text).map_err(|e| Failure::parse(format!("{origin}: {e}")))?;
    let cases: Vec<_> = entries.into_iter().map(|e| e.case).collect();
    let verdicts = adjudicate_all(&cases, &params);
    let judgments: Vec<String> = cases
        .iter()
        .zip(&verdicts)
        .map(|(case, verdict)| render_judgment(case, verdict, &params).expect("verdict from the same case"))
        .collect();
    if judgments.is_empty() {
        return Ok(());
    }
    let mut out = judgments.join("\n\n");
    out.push('\n');
    write_out(io.stdout, &out)
}

fn load_constitution(source: &str, base: Option<&Path>, io: &mut Streams<'_>) -> Result<Constitution, Failure> {
    if source == "builtin" {
        return Ok(default_constitution());
    }
    let path = match base {
        Some(dir) if Path::new(source).is_relative() => dir.join(source),
        _ => PathBuf::from(source),
    };
    let display = path.display().to_string();
    let text = read_file(&display)?;
    let parsed = ConstitutionSource::parse(display.clone(), text)
        .map_err(|e| Failure::parse(format!("{display}: {e}")))?;
    for warning in &parsed.warnings {
        let _ = writeln!(io.stderr, "warning: {display}: {warning}");
    }
    Ok(parsed.to_constitution())
}

fn emit_trace(trace: &SimulationTrace, export: Option<&Path>, io: &mut Streams<'_>) -> Result<(), Failure> {
    let streams = export_trace(trace);
    if let Some(path) = export {
        write_file(path, &streams.structured)?;
    }
    write_out(io.stdout, &streams.log)
}

fn cmd_court_simulate(args: SimulateArgs, io: &mut Streams<'_>) -> Result<(), Failure> {
    if args.cases == 0 {
        return Err(Failure::domain("--cases must be at least 1"));
    }
    let constitution = load_constitution(&args.constitution, None, io)?;
    let trace = run_simulation(&constitution, args.seed, args.cases).map_err(|e| Failure::domain(e.to_string()))?;
    emit_trace(&trace, args.export.as_deref(), io)
}

fn cmd_court_replay(args: ReplayArgs, io: &mut Streams<'_>) -> Result<(), Failure> {
    let (text, base) = match args.script.as_str() {
        "builtin:sample_session" => (SAMPLE_SESSION.to_string(), None),
        path => (
            read_file(path)?,
            Path::new(path).parent().map(Path::to_path_buf),
        ),
    };
    let script = parse_replay_script(&text).map_err(|e| Failure::parse(format!("{}: {e}", args.script)))?;
    let constitution = match (&args.constitution, &script.constitution) {
        (Some(flag), _) => load_constitution(flag, None, io)?,
        (None, Some(from_script)) => load_constitution(from_script, base.as_deref(), io)?,
        (None, None) => default_constitution(),
    };
    let trace = replay(&constitution, script.knowledge, &script.cases).map_err(|e| Failure::parse(e.to_string()))?;
    emit_trace(&trace, args.export.as_deref(), io)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str], stdin: &str) -> (i32, String, String) {
        let mut input = stdin.as_bytes();
        let mut out = Vec::new();
        let mut err = Vec::new();
        let mut full = vec!["autonomy"];
        full.extend_from_slice(args);
        let code = run(full, &mut input, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn equilibrium_defaults() {
        let (code, out, _) = run_args(&["equilibrium"], "");
        assert_eq!(code, 0);
        assert!(out.contains("income:         2455555555.56 (exact 22100000000/9)"), "{out}");
        assert!(out.contains("responsibility: 442000000.00"), "{out}");
    }

    #[test]
    fn unknown_flag_is_usage_error() {
        let (code, _, err) = run_args(&["equilibrium", "--bogus"], "");
        assert_eq!(code, EXIT_USAGE, "{err}");
        let (code, _, _) = run_args(&[], "");
        assert_eq!(code, EXIT_USAGE);
    }

    #[test]
    fn help_exits_cleanly() {
        let (code, out, _) = run_args(&["adjudicate", "--help"], "");
        assert_eq!(code, 0);
        assert!(out.contains("[default: 0.20]"));
    }

    #[test]
    fn stdin_cases() {
        let (code, out, _) = run_args(&["adjudicate"], SAMPLE_CASES);
        assert_eq!(code, 0);
        assert_eq!(out.matches("In the case of ").count(), 4);
        let (code, out, _) = run_args(&["adjudicate"], "");
        assert_eq!((code, out.as_str()), (0, ""));
    }
}

//! Argument parsing and dispatch.
//!
//! Exit codes: 0 success, 1 input/IO errors (unreadable or malformed map,
//! naive cap exceeded), 2 usage errors, 3 no positive grading, 4 internal
//! invariant violated.

use std::ffi::OsString;
use std::io::{Read, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use implicit_core::engine::DEFAULT_NAIVE_CAP;
use implicit_core::enumerate::EnumerateError;
use implicit_core::grading::GradingError;
use implicit_core::polyring::coeff::is_prime;
use implicit_core::{
    components_of_kernel, fixtures, naive_total_degree_run, EngineError, EngineOptions,
    GradingMatrix, RingMap, DEFAULT_PRIME,
};

use crate::mapfile::{emit_json, emit_text, parse_map, MapError};
use crate::output::{self, OptionsEcho};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NO_GRADING: i32 = 3;
pub const EXIT_INVARIANT: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "implicit",
    version,
    about = "Minimal generators of polynomial ring map kernels"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute kernel generators up to a degree bound.
    Run(RunArgs),
    /// Write a built-in map file.
    Examples(ExamplesArgs),
}

#[derive(Debug, clap::Args)]
pub struct RunArgs {
    /// Map file (JSON or text); stdin when absent or `-`.
    #[arg(long)]
    pub map: Option<PathBuf>,
    /// Bound on the weighted degree of the generators.
    #[arg(short = 'd', long, value_parser = clap::value_parser!(i64).range(1..))]
    pub max_degree: i64,
    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    pub threads: usize,
    /// Seed for the random evaluation point.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Prime for the Jacobian and the prescreen.
    #[arg(long, default_value_t = DEFAULT_PRIME, value_parser = parse_prime)]
    pub prime: u64,
    /// Solve every component, even those the Jacobian rules out.
    #[arg(long)]
    pub no_skip: bool,
    /// Keep columns generated by lower-degree generators.
    #[arg(long)]
    pub no_trim: bool,
    /// Go straight to exact elimination.
    #[arg(long)]
    pub no_prescreen: bool,
    /// One matrix per total degree instead of per multidegree.
    #[arg(long)]
    pub naive: bool,
    /// Largest number of monomials per degree accepted in naive mode.
    #[arg(long, default_value_t = DEFAULT_NAIVE_CAP)]
    pub naive_cap: usize,
    /// Use this grading (text matrix format) instead of computing one.
    #[arg(long)]
    pub grading: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
    pub output: OutputFormat,
    /// Write the grading matrix here.
    #[arg(long)]
    pub grading_out: Option<PathBuf>,
    /// Write a JSON run report here.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Do not print the report table to stderr.
    #[arg(short, long)]
    pub quiet: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Text,
    Json,
}

#[derive(Debug, clap::Args)]
pub struct ExamplesArgs {
    #[command(subcommand)]
    pub which: Example,
    /// Emit JSON instead of the text format.
    #[arg(long, global = true)]
    pub json: bool,
}

#[derive(Clone, Debug, Subcommand)]
pub enum Example {
    /// Plücker embedding of Gr(2, n).
    Grassmannian {
        #[arg(value_parser = clap::value_parser!(u64).range(3..))]
        n: u64,
    },
    /// (a+b)^2, a^2-b^2, (a-b)^2.
    Cusp,
    /// Kimura 3-parameter model on the 4-sunlet network.
    SunletK3p,
}

fn parse_prime(s: &str) -> Result<u64, String> {
    let p: u64 = s.parse().map_err(|e| format!("{e}"))?;
    if p < (1 << 63) && is_prime(p) {
        Ok(p)
    } else {
        Err(format!("{p} is not a prime below 2^63"))
    }
}

/// A failure with its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn input(message: impl ToString) -> Self {
        Self {
            code: EXIT_INPUT,
            message: message.to_string(),
        }
    }
}

impl From<MapError> for Failure {
    fn from(e: MapError) -> Self {
        Failure::input(format!("map: {e}"))
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::input(e)
    }
}

impl From<EngineError> for Failure {
    fn from(e: EngineError) -> Self {
        let code = match &e {
            EngineError::NoPositiveGrading
            | EngineError::Grading(GradingError::NoPositiveWeight)
            | EngineError::Enumerate(EnumerateError::NoPositiveWeight) => EXIT_NO_GRADING,
            EngineError::Invariant(_) => EXIT_INVARIANT,
            _ => EXIT_INPUT,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

/// Entry point with explicit streams; returns the process exit code.
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
            let rendered = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(stderr, "{rendered}");
                EXIT_USAGE
            } else {
                let _ = write!(stdout, "{rendered}");
                EXIT_OK
            };
        }
    };
    let result = match cli.command {
        Command::Run(args) => run_command(&args, stdin, stdout, stderr),
        Command::Examples(args) => examples_command(&args, stdout),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = writeln!(stderr, "implicit: {}", f.message);
            f.code
        }
    }
}

fn read_map(path: Option<&PathBuf>, stdin: &mut dyn Read) -> Result<RingMap, Failure> {
    let source = match path {
        Some(p) if p.as_os_str() != "-" => std::fs::read_to_string(p)
            .map_err(|e| Failure::input(format!("{}: {e}", p.display())))?,
        _ => {
            let mut s = String::new();
            stdin.read_to_string(&mut s)?;
            s
        }
    };
    Ok(parse_map(&source)?)
}

fn run_command(
    args: &RunArgs,
    stdin: &mut dyn Read,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<(), Failure> {
    let map = read_map(args.map.as_ref(), stdin)?;
    let echo = OptionsEcho {
        max_degree: args.max_degree,
        skip: !args.no_skip && !args.naive,
        trim: args.naive || !args.no_trim,
        prescreen: !args.no_prescreen && !args.naive,
        naive: args.naive,
        threads: if args.naive { 1 } else { args.threads },
        seed: args.seed,
        prime: args.prime,
    };
    let kernel_run = if args.naive {
        naive_total_degree_run(&map, args.max_degree, args.naive_cap)?
    } else {
        let grading = match &args.grading {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
                Some(
                    GradingMatrix::from_text(&text)
                        .map_err(|e| Failure::input(format!("{}: {e}", path.display())))?,
                )
            }
            None => None,
        };
        let options = EngineOptions {
            skip: echo.skip,
            trim: echo.trim,
            prescreen: echo.prescreen,
            threads: args.threads,
            seed: args.seed,
            prime: args.prime,
            grading,
            ..EngineOptions::default()
        };
        components_of_kernel(&map, args.max_degree, &options)?
    };
    output::check_reconciliation(&kernel_run.levels).map_err(|message| Failure {
        code: EXIT_INVARIANT,
        message,
    })?;

    if let Some(path) = &args.grading_out {
        std::fs::write(path, kernel_run.grading.to_text())?;
    }
    if let Some(path) = &args.report {
        std::fs::write(path, output::report_json(&kernel_run, &echo))?;
    }
    let rendered = match args.output {
        OutputFormat::Text => output::generators_text(&map, &kernel_run.generators),
        OutputFormat::Json => {
            output::generators_json(&map, &kernel_run.grading, &kernel_run.generators)
        }
    };
    stdout.write_all(rendered.as_bytes())?;
    if !args.quiet {
        let _ = write!(stderr, "{}", output::report_table(&kernel_run, &echo));
    }
    Ok(())
}

fn examples_command(args: &ExamplesArgs, stdout: &mut dyn Write) -> Result<(), Failure> {
    let map = match &args.which {
        Example::Grassmannian { n } => {
            fixtures::grassmannian(*n as usize).map_err(Failure::input)?
        }
        Example::Cusp => fixtures::cusp(),
        Example::SunletK3p => fixtures::sunlet_k3p(),
    };
    let rendered = if args.json {
        emit_json(&map)
    } else {
        emit_text(&map)
    };
    stdout.write_all(rendered.as_bytes())?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn invoke(args: &[&str], input: &str) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(
            std::iter::once("implicit").chain(args.iter().copied()),
            &mut input.as_bytes(),
            &mut out,
            &mut err,
        );
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn cusp_from_stdin() {
        let (_, map, _) = invoke(&["examples", "cusp"], "");
        let (code, out, err) = invoke(&["run", "-d", "2"], &map);
        assert_eq!(code, 0, "{err}");
        assert_eq!(out, "# degree 2 multidegree (4) (1 generator)\nx*z - y^2\n");
        assert!(err.contains("grading rank 1"));
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(invoke(&["run"], "").0, EXIT_USAGE);
        assert_eq!(invoke(&["run", "-d", "0"], "").0, EXIT_USAGE);
        assert_eq!(
            invoke(&["run", "-d", "2", "--prime", "12"], "").0,
            EXIT_USAGE
        );
        assert_eq!(
            invoke(&["run", "-d", "2", "--output", "xml"], "").0,
            EXIT_USAGE
        );
        assert_eq!(invoke(&["examples", "grassmannian", "2"], "").0, EXIT_USAGE);
        assert_eq!(invoke(&["frobnicate"], "").0, EXIT_USAGE);
        assert_eq!(invoke(&["--help"], "").0, EXIT_OK);
    }

    #[test]
    fn input_errors_exit_1() {
        let (code, _, err) = invoke(&["run", "-d", "2"], "codomain: t\nx = u\n");
        assert_eq!(code, EXIT_INPUT);
        assert!(err.contains("unknown variable `u`"), "{err}");
        assert_eq!(
            invoke(&["run", "-d", "2", "--map", "/nonexistent/file.map"], "").0,
            EXIT_INPUT
        );
        let (code, _, err) = invoke(
            &["run", "-d", "9", "--naive", "--naive-cap", "10"],
            "codomain: s t\nx = s\ny = t\nz = s*t\n",
        );
        assert_eq!(code, EXIT_INPUT);
        assert!(err.contains("exceed the cap"), "{err}");
    }

    #[test]
    fn no_positive_grading_exits_3() {
        // a constant image forces weight 0 on its variable in every grading
        let map = "codomain: s\nx = s\ny = 1\n";
        let (code, _, err) = invoke(&["run", "-d", "2"], map);
        assert_eq!(code, EXIT_NO_GRADING, "{err}");
    }
}

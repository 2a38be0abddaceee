use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use ordrep_cli::{exit, run, Check, CliError, Command, Format, RunManifest};

const PRECISION_ENV: &str = "ORDREP_PRECISION_CEILING";

/// Order-type experiments on x∗A and on shift orbits of words.
///
/// Exit codes: 0 success, 1 verification failed, 2 parse or usage error,
/// 3 module error, 4 I/O error.
#[derive(Parser, Debug)]
#[command(name = "ordrep", version)]
struct Args {
    /// TOML run manifest; inline flags override its fields.
    #[arg(long)]
    manifest: Option<PathBuf>,
    #[arg(long = "cmd", value_enum)]
    cmd: Option<Command>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    x: Option<String>,
    /// Multipliers for several coordinates (repeatable).
    #[arg(long = "xs")]
    xs: Vec<String>,
    #[arg(long)]
    set: Option<String>,
    #[arg(long)]
    limit: Option<u64>,
    #[arg(long)]
    word: Option<String>,
    /// Input words for the big-ordinal check (repeatable).
    #[arg(long = "words")]
    words: Vec<String>,
    #[arg(long)]
    max_n: Option<usize>,
    #[arg(long)]
    prefix_len: Option<usize>,
    #[arg(long)]
    shifts: Option<u64>,
    #[arg(long)]
    fuel: Option<u64>,
    /// Order type per coordinate (repeatable).
    #[arg(long = "target")]
    targets: Vec<String>,
    #[arg(long)]
    thin: Option<String>,
    #[arg(long)]
    count: Option<usize>,
    #[arg(long)]
    theta: Option<String>,
    #[arg(long)]
    stages: Option<usize>,
    #[arg(long, value_enum)]
    check: Option<Check>,
    #[arg(long)]
    h: Option<usize>,
    #[arg(long)]
    cap: Option<u64>,
    #[arg(long)]
    epsilon: Option<String>,
    #[arg(long)]
    min_mass: Option<usize>,
    /// Working precision ceiling in bits; defaults to $ORDREP_PRECISION_CEILING.
    #[arg(long)]
    precision_ceiling: Option<u32>,
}

impl Args {
    fn inline(self) -> RunManifest {
        RunManifest {
            command: self.cmd,
            format: self.format.unwrap_or_default(),
            output: self.output,
            x: self.x,
            xs: self.xs,
            set: self.set,
            limit: self.limit,
            word: self.word,
            words: self.words,
            max_n: self.max_n,
            prefix_len: self.prefix_len,
            shifts: self.shifts,
            fuel: self.fuel,
            targets: self.targets,
            thin: self.thin,
            count: self.count,
            theta: self.theta,
            stages: self.stages,
            check: self.check,
            h: self.h,
            cap: self.cap,
            epsilon: self.epsilon,
            min_mass: self.min_mass,
            precision_ceiling: self.precision_ceiling,
            ..RunManifest::default()
        }
    }
}

fn manifest(args: Args) -> Result<RunManifest, CliError> {
    let mut base = RunManifest::default();
    if let Ok(v) = std::env::var(PRECISION_ENV) {
        base.precision_ceiling = Some(v.trim().parse().map_err(|_| CliError::Parse(format!("{PRECISION_ENV}={v}")))?);
    }
    if let Some(path) = &args.manifest {
        base = base.overlay(RunManifest::load(path)?);
    }
    Ok(base.overlay(args.inline()))
}

fn main_inner(args: Args) -> Result<i32, CliError> {
    let m = manifest(args)?;
    let report = run(&m)?;
    let text = report.render(m.format)?;
    match &m.output {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?,
        None => print!("{text}"),
    }
    Ok(report.exit_code())
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprint!("{e}");
            return ExitCode::from(exit::PARSE as u8);
        }
    };
    match main_inner(args) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

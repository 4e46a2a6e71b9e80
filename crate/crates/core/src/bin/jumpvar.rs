use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use jumpvar::harness::{emit_report, run, ExperimentConfig, Format};
use jumpvar::Error;

/// Jump counts, variation seminorms and the experiments around them.
#[derive(Parser)]
#[command(name = "jumpvar", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Jump counts of listed paths at each threshold.
    JumpCount(Common),
    /// r-variations of listed paths.
    Variation(Common),
    /// Jump quasi-seminorm of a weighted field of paths.
    JumpSeminorm(Common),
    /// Both sides of the dyadic square-function bound.
    Lewko(Common),
    /// Dimension sweep of jump seminorms of averages.
    SweepDim(Common),
    /// Van der Corput bounds over a phase/amplitude corpus.
    Vdc(Common),
    /// Boundary-neighbourhood measures of convex bodies.
    Boundary(Common),
    /// Littlewood–Paley, Poisson and discrete-cube symbol checks.
    Symbols(Common),
    /// Random-path fuzzing of the pointwise inequalities.
    Corpus(Common),
    /// Any experiment; the kind is read from the config.
    Run(Common),
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    /// Overrides the seed in the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Output file; defaults to the config's output, then stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

impl Command {
    fn parts(&self) -> (Option<&'static str>, &Common) {
        match self {
            Self::JumpCount(c) => (Some("jump-count"), c),
            Self::Variation(c) => (Some("variation"), c),
            Self::JumpSeminorm(c) => (Some("jump-seminorm"), c),
            Self::Lewko(c) => (Some("lewko"), c),
            Self::SweepDim(c) => (Some("dimension-sweep"), c),
            Self::Vdc(c) => (Some("vdc-sweep"), c),
            Self::Boundary(c) => (Some("boundary-measure"), c),
            Self::Symbols(c) => (Some("symbol-envelope"), c),
            Self::Corpus(c) => (Some("jump-corpus"), c),
            Self::Run(c) => (None, c),
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InvalidArgument(_) | Error::Parse(_) => 2,
        Error::NumericFailure(_) => 3,
        Error::Io { .. } => 1,
    }
}

fn execute(cmd: &Command) -> Result<(), Error> {
    let (expected, args) = cmd.parts();
    let mut config = ExperimentConfig::load(&args.config)?;
    if let Some(kind) = expected {
        let found = config.experiment.kind();
        if found != kind {
            return Err(Error::InvalidArgument(format!(
                "config describes a {found} experiment, not {kind}"
            )));
        }
    }
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    let table = run(&config)?;
    match args.out.as_ref().or(config.output.as_ref()) {
        Some(path) => emit_report(&table, args.format, path),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(table.render(args.format).as_bytes())
                .and_then(|()| out.flush())
                .map_err(|e| Error::Io {
                    path: PathBuf::from("<stdout>"),
                    source: e,
                })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("jumpvar: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

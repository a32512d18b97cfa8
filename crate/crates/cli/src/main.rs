use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand, ValueEnum};

use pastctl::fuzz::FuzzParams;
use pastctl::monitor::Mode;
use pastctl_cli::{
    cmd_check, cmd_compile, cmd_extend, cmd_fuzz, cmd_run, cmd_scenario, Fault, Format, RunArgs,
    Status,
};

/// Past-CTL monitors over event structures.
///
/// FORMULA arguments accept formula text or a preset: backup-made,
/// always-functional, backup-since-functional.
#[derive(Parser)]
#[command(name = "pastctl", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate an event structure from a scenario config.
    Scenario {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file (stdout if omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Append rounds to an existing event structure.
    Extend {
        #[arg(long)]
        events: PathBuf,
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        rounds: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a monitor over an event structure and print its verdicts.
    Run {
        formula: String,
        #[arg(long)]
        events: PathBuf,
        #[arg(long, value_enum, default_value_t = ModeArg::Six)]
        mode: ModeArg,
        #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
        format: FormatArg,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the event graph, colored by verdict, as DOT.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Print the compiled monitor program.
    Compile {
        formula: String,
        #[arg(long, value_enum, default_value_t = ModeArg::Six)]
        mode: ModeArg,
        #[arg(long, value_enum, default_value_t = EmitArg::Text)]
        emit: EmitArg,
    },
    /// Cross-check monitors against the oracles in both modes.
    Check {
        formula: String,
        #[arg(long)]
        events: PathBuf,
        /// Corrupt the six-valued monitor verdict at this event (self-test).
        #[arg(long, hide = true)]
        inject_fault: Option<String>,
    },
    /// Differential fuzzing of monitors, oracles and prediction soundness.
    Fuzz {
        #[arg(long, default_value_t = 1000)]
        iterations: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 40)]
        max_events: usize,
        #[arg(long, default_value_t = 6)]
        max_devices: usize,
        #[arg(long, default_value_t = 5)]
        max_depth: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Two,
    Six,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum EmitArg {
    Text,
    Json,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Two => Mode::Two,
            ModeArg::Six => Mode::Six,
        }
    }
}

fn dispatch(command: Command) -> Result<Status> {
    let stdout = &mut io::stdout().lock();
    match command {
        Command::Scenario { config, seed, out } => {
            cmd_scenario(&config, seed, out.as_deref(), stdout)
        }
        Command::Extend {
            events,
            config,
            seed,
            rounds,
            out,
        } => cmd_extend(&events, &config, seed, rounds, out.as_deref(), stdout),
        Command::Run {
            formula,
            events,
            mode,
            format,
            out,
            dot,
        } => cmd_run(
            &RunArgs {
                formula: &formula,
                events: &events,
                mode: mode.into(),
                format: match format {
                    FormatArg::Csv => Format::Csv,
                    FormatArg::Json => Format::Json,
                },
                out: out.as_deref(),
                dot: dot.as_deref(),
            },
            stdout,
        ),
        Command::Compile {
            formula,
            mode,
            emit,
        } => cmd_compile(&formula, mode.into(), matches!(emit, EmitArg::Json), stdout),
        Command::Check {
            formula,
            events,
            inject_fault,
        } => {
            let fault = inject_fault.map(|e| Fault {
                event: e.as_str().into(),
            });
            cmd_check(&formula, &events, fault.as_ref(), stdout)
        }
        Command::Fuzz {
            iterations,
            seed,
            max_events,
            max_devices,
            max_depth,
        } => {
            let params = FuzzParams {
                max_events,
                max_devices,
                max_depth,
                ..FuzzParams::default()
            };
            cmd_fuzz(iterations, seed, &params, stdout)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(status) => ExitCode::from(status.code() as u8),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

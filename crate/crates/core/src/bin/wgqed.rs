use std::io;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use wgqed::parallel;
use wgqed::scenario::{run, OutputFormat, Overrides};

#[derive(Parser)]
#[command(name = "wgqed", version, about = "Waveguide QED scattering and emission scenarios")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Run a preset (paradox-emission, isotropic-scan, ixi-scan, two-level) or a JSON config file
    Run {
        target: String,
        /// Isotropic loss rate replacing the configured loss levels
        #[arg(long)]
        loss: Option<f64>,
        /// Output file (stdout if omitted)
        #[arg(long)]
        out: Option<String>,
        #[arg(long, value_enum)]
        format: Option<Format>,
        /// Project out decoupled excited states when the response matrix is singular
        #[arg(long)]
        dark_state_projection: bool,
        /// Sweep points, or output times for emission scenarios
        #[arg(long)]
        steps: Option<usize>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match parallel::threads_from_env() {
        Ok(Some(n)) => {
            if let Err(e) = parallel::configure_threads(n) {
                eprintln!("error: {e}");
                return ExitCode::from(1);
            }
        }
        Ok(None) => {}
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    let Command::Run {
        target,
        loss,
        out,
        format,
        dark_state_projection,
        steps,
    } = cli.command;
    let overrides = Overrides {
        loss,
        out,
        format: format.map(|f| match f {
            Format::Csv => OutputFormat::Csv,
            Format::Json => OutputFormat::Json,
        }),
        dark_state_projection,
        steps,
    };
    let code = run(&target, &overrides, &mut io::stdout().lock(), &mut io::stderr().lock());
    ExitCode::from(code as u8)
}

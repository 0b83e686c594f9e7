use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use hmloc::driver::{run, Format, RunConfig};
use hmloc::report::Mode;

#[derive(Parser)]
#[command(name = "hmloc", version, about = "Type checker with flow-based error reports")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Check one or more files, concatenated in order.
    Check {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        /// Signature file replacing the built-in prelude.
        #[arg(long)]
        prelude: Option<PathBuf>,
        /// Expand flows through constructors.
        #[arg(long)]
        verbose: bool,
        #[arg(long, value_enum, default_value = "text")]
        format: FormatArg,
        #[arg(long)]
        color: bool,
        #[arg(long, value_name = "N")]
        max_errors: Option<usize>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let Command::Check { files, prelude, verbose, format, color, max_errors } = cli.command;
    let config = RunConfig {
        inputs: files,
        prelude,
        mode: if verbose { Mode::Verbose } else { Mode::Compact },
        format: match format {
            FormatArg::Text => Format::Text,
            FormatArg::Json => Format::Json,
        },
        color: color && std::env::var_os("NO_COLOR").is_none_or(|v| v.is_empty()),
        max_errors,
    };
    let mut out = std::io::stdout().lock();
    let code = run(&config, &mut out).unwrap_or(3);
    let _ = out.flush();
    ExitCode::from(code as u8)
}

use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod commands;
mod error;
mod images;
mod log_csv;

use commands::{DeblurArgs, GapArgs, PhantomArgs, PsfArgs};

/// Tikhonov-regularized splitting solvers applied to wavelet deblurring.
#[derive(Debug, Parser)]
#[command(name = "tiksplit", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Blur an image, then recover it with one of the solvers.
    Deblur(DeblurArgs),
    /// Compare two deblur logs by their objective gap F(x_n) - F*.
    Gap(GapArgs),
    /// Export a Gaussian PSF as plain text.
    Psf(PsfArgs),
    /// Write the built-in synthetic test image.
    Phantom(PhantomArgs),
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let outcome = match cli.command {
        Command::Deblur(args) => commands::deblur(args),
        Command::Gap(args) => commands::gap(args),
        Command::Psf(args) => commands::psf(args),
        Command::Phantom(args) => commands::phantom(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(e.exit_code())
        }
    }
}

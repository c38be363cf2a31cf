use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use mixfrac_cli::{run, usage, CliError, Subcommand};

#[derive(Parser, Debug)]
#[command(name = "mixfrac", version, about = "Mixed-boundary fractional experiments")]
struct Args {
    /// eigen, isometry, sobolev, rates, fiber, solve or multiplicity
    subcommand: String,
    #[arg(long)]
    config: PathBuf,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Worker threads; 0 picks the number of cores.
    #[arg(long, default_value_t = 0)]
    threads: usize,
    #[arg(long)]
    verbose: bool,
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) if e.use_stderr() => {
            eprintln!("{e}\n{}", usage());
            return ExitCode::from(1);
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
    };
    let sub: Subcommand = match args.subcommand.parse() {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}\n{}", usage());
            return ExitCode::from(1);
        }
    };
    if args.threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(args.threads).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    match run(sub, &args.config, &args.out, args.verbose) {
        Ok(o) => {
            for f in &o.files {
                if args.verbose {
                    eprintln!("wrote {}", f.display());
                }
            }
            ExitCode::from(o.status.code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            if matches!(e, CliError::Usage(_)) {
                eprintln!("{}", usage());
            }
            ExitCode::from(1)
        }
    }
}

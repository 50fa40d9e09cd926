mod args;
mod commands;
mod report;

use clap::error::ErrorKind;
use clap::Parser;

fn resolve_threads(flag: Option<usize>) -> Option<usize> {
    flag.or_else(|| {
        std::env::var("BAYES_ATTRIB_THREADS")
            .ok()
            .and_then(|v| v.parse().ok())
    })
}

fn main() {
    let cli = match args::Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            std::process::exit(code);
        }
    };

    if let Some(threads) = resolve_threads(cli.threads) {
        // Ignore the error if a pool already exists; the size is best effort.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }

    if let Err(err) = commands::run(cli.command) {
        eprintln!("error: {err}");
        std::process::exit(err.exit_code);
    }
}

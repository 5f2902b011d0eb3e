use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use crforge::{run, Cli, EXIT_PARSE};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let env_order = std::env::var("CRFORGE_ORDER").ok();
    let out = run(&cli, env_order.as_deref(), &mut std::io::stdin().lock());
    eprint!("{}", out.stderr);
    let written = match &cli.out {
        Some(path) => std::fs::write(path, &out.stdout).map_err(|e| format!("{}: {e}", path.display())),
        None => std::io::stdout().lock().write_all(out.stdout.as_bytes()).map_err(|e| format!("stdout: {e}")),
    };
    match written {
        Ok(()) => ExitCode::from(out.code as u8),
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(EXIT_PARSE as u8)
        }
    }
}

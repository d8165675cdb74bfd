use std::io::Write;

use clap::Parser;

fn main() {
    let cli = usd_cli::Cli::parse();
    let outcome = usd_cli::run(&cli);
    if outcome.code != 0 {
        if let Some(err) = outcome.output.get("error") {
            eprintln!("usd: {}", err["detail"].as_str().unwrap_or("error"));
        }
    }
    let text = serde_json::to_string_pretty(&outcome.output).expect("JSON value");
    // A closed pipe (e.g. `| head`) is not worth a panic.
    let _ = writeln!(std::io::stdout().lock(), "{text}");
    std::process::exit(outcome.code);
}

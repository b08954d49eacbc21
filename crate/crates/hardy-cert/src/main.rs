use std::process::ExitCode;

use clap::Parser;
use hardy_cert::cli::Cli;
use hardy_cert::commands::{run, Ctx};
use hardy_cert::{CertError, Envelope, RunConfig, SolverConfig};

fn config(cli: &Cli) -> Result<RunConfig, CertError> {
    let mut args = serde_json::to_value(&cli.command)?;
    // Keep only the flags; the command name is stored separately.
    if let Some(inner) = args.as_object_mut().and_then(|m| m.values_mut().next()) {
        args = inner.take();
    }
    Ok(RunConfig {
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        command: cli.command.name().to_string(),
        args,
        solver: SolverConfig::from_env(cli.tol, cli.max_iter)?,
        seed: cli.seed,
    })
}

fn print(value: &impl serde::Serialize, compact: bool) {
    let text = if compact { serde_json::to_string(value) } else { serde_json::to_string_pretty(value) };
    println!("{}", text.expect("serializable output"));
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = config(&cli).and_then(|config| {
        let ctx = Ctx { solver: config.solver.solver(), config };
        run(&cli.command, &ctx).map(|o| (ctx.config, o))
    });
    match outcome {
        Ok((config, o)) => {
            print(&Envelope::new(config, o.result), cli.json);
            match o.failed {
                None => ExitCode::SUCCESS,
                Some(reason) => {
                    let e = CertError::VerificationFailed(reason);
                    eprintln!("{}", e.to_json());
                    ExitCode::from(e.exit_code() as u8)
                }
            }
        }
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

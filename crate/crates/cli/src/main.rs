use std::process::ExitCode;

use anyhow::Result;
use clap::Parser;

use penfeel_cli::args::{Cli, Command};
use penfeel_cli::presets::{make_presets, PresetStore};
use penfeel_cli::{commands, exit_code_for, server};

fn run(cli: Cli) -> Result<()> {
    let cfg = cli.global.resolve()?;
    match cli.command {
        Command::Analyze { input, output } => commands::cmd_analyze(&input, output.as_deref(), &cfg),
        Command::Synth { peaks, output, describe, mapping } => {
            commands::cmd_synth(&peaks, &output, describe.as_deref(), mapping.map(Into::into), &cfg)
        }
        Command::Loopfind { input, output, segment, window_ms } => {
            commands::cmd_loopfind(&input, &output, segment.as_deref(), window_ms, &cfg)
        }
        Command::Simulate { sim, output } => commands::cmd_simulate(sim.as_deref(), &output),
        Command::MakePresets { dir } => {
            for d in make_presets(&dir, &cfg)? {
                println!("{}", d.display());
            }
            Ok(())
        }
        Command::Serve { presets, host } => {
            let store = PresetStore::load(&presets)?;
            let rt = tokio::runtime::Runtime::new()?;
            rt.block_on(async {
                let listener = server::bind(&host, cfg.port).await?;
                eprintln!("listening on http://{}", listener.local_addr()?);
                server::serve(listener, store).await
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            exit_code_for(&e)
        }
    }
}

//! Command-line front end and live coupling service.

pub mod args;
pub mod commands;
pub mod presets;
pub mod server;

use std::process::ExitCode;

/// Exit status for a failed command: 2 when the inputs were at fault,
/// 1 otherwise.
pub fn exit_code_for(err: &anyhow::Error) -> ExitCode {
    let input = err
        .chain()
        .find_map(|e| e.downcast_ref::<penfeel_core::Error>())
        .map(|e| e.is_input_error())
        .unwrap_or(false)
        || err.chain().any(|e| e.downcast_ref::<commands::UsageError>().is_some());
    if input {
        ExitCode::from(2)
    } else {
        ExitCode::from(1)
    }
}

use std::process::ExitCode;

use pearsonprob::cli::{main_with_args, TOLERANCES_ENV};

fn main() -> ExitCode {
    let env = std::env::var(TOLERANCES_ENV).ok();
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    let code = main_with_args(
        std::env::args_os(),
        env.as_deref(),
        &mut stdout.lock(),
        &mut stderr.lock(),
    );
    ExitCode::from(code as u8)
}

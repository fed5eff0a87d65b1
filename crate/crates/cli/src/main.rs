use std::process::ExitCode;

fn main() -> ExitCode {
    sbm_twosample_cli::run(std::env::args_os())
}

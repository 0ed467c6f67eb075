use std::process::ExitCode;

fn main() -> ExitCode {
    let (code, text) = wdc_cli::execute(std::env::args_os());
    print!("{text}");
    ExitCode::from(code as u8)
}

use std::process::ExitCode;

fn main() -> ExitCode {
    match kohnen_cli::run_args(std::env::args_os()) {
        Ok(out) => {
            print!("{}", out.text);
            ExitCode::from(out.code)
        }
        Err(f) => {
            eprintln!("kohnen: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

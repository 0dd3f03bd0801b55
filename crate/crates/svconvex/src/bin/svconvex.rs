use clap::Parser;
use svconvex::cli::{dispatch, Cli};

fn main() {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(report) => {
            print!("{}", report.to_json());
            std::process::exit(report.exit_code);
        }
        Err(e) => {
            eprintln!("error: {e}");
            let code = if matches!(e, svconvex::Error::TheoremViolation(_)) {
                2
            } else {
                1
            };
            std::process::exit(code);
        }
    }
}

use std::process::ExitCode;

fn main() -> ExitCode {
    let config = match roughvol_cli::parse_config(std::env::args_os()) {
        Ok(config) => config,
        Err(err) => {
            if let Some(clap_err) = err.downcast_ref::<clap::Error>() {
                clap_err.exit();
            }
            eprintln!("error: {err:#}");
            return ExitCode::from(2);
        }
    };
    match roughvol_cli::run(&config) {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}

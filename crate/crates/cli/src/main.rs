use clap::Parser;
use idc_bench::{configure_threads, exit, run, Cli};

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let code = match configure_threads().and_then(|()| run(&cli)) {
        Ok(status) => status.exit_code(),
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    if code != exit::OK {
        std::process::exit(code);
    }
}

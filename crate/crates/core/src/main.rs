use clap::Parser;
use sweep_decoder::cli::{main_with, Cli};

fn main() {
    if let Ok(n) = std::env::var("SWEEP_THREADS") {
        match n.parse::<usize>() {
            Ok(n) if n > 0 => {
                rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global()
                    .expect("thread pool already initialised");
            }
            _ => {
                eprintln!("error: SWEEP_THREADS must be a positive integer, got '{n}'");
                std::process::exit(2);
            }
        }
    }
    let code = match main_with(Cli::parse()) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    std::process::exit(code);
}

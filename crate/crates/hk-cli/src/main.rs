use clap::Parser;

fn main() {
    let cli = hk_cli::cli::Cli::parse();
    if let Err(err) = hk_cli::run(cli) {
        eprintln!("error: {err}");
        std::process::exit(err.exit_code());
    }
}

use clap::Parser;

fn main() {
    let cli = ldi_cli::Cli::parse();
    if let Err(e) = ldi_cli::run(&cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}

use clap::Parser;

fn main() {
    let cli = fracrd_cli::Cli::parse();
    std::process::exit(fracrd_cli::main_with(&cli));
}

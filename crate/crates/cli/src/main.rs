use clap::Parser;

fn main() {
    let cli = hba_cli::Cli::parse();
    std::process::exit(hba_cli::run(&cli));
}

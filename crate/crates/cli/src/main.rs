use clap::Parser;

fn main() {
    let cli = qmm_cli::Cli::parse();
    std::process::exit(qmm_cli::run(cli));
}

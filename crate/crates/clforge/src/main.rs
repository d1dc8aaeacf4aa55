use clap::Parser;

fn main() {
    let cli = clforge::cli::Cli::parse();
    std::process::exit(clforge::cli::run(cli));
}

use clap::Parser;

fn main() {
    let cli = randfix_cli::Cli::parse();
    std::process::exit(randfix_cli::run(cli));
}

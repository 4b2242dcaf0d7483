use clap::Parser;

fn main() {
    let cli = trajforge_cli::Cli::parse();
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    if let Err(e) = trajforge_cli::run(cli, &mut out) {
        eprintln!("trajforge: {e}");
        std::process::exit(1);
    }
}

use clap::Parser;
use holonomy_lab::{run, Cli};

fn main() {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(summary) => eprintln!("{summary}"),
        Err(e) => {
            eprintln!("holonomy-lab: {e}");
            std::process::exit(e.exit_code());
        }
    }
}

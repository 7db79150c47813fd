use clap::{Parser, Subcommand};

mod commands;
mod opts;

#[derive(Parser)]
#[command(
    name = "perfslice",
    version,
    about = "Find subgroups where a soft classifier's ranking performance deviates from the whole dataset"
)]
struct Cli {
    /// Worker threads; 1 gives the fully deterministic statistics path.
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,

    /// Emit machine-readable error JSON on stderr.
    #[arg(long, global = true, default_value_t = false)]
    json_errors: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Mine top-k subgroups from a CSV, optionally with a three-way split and
    /// significance filtering on the validation part.
    Mine(commands::mine::MineArgs),
    /// Inject an artificially underperforming subgroup and measure how well
    /// mining recovers it (IoU of result covers against the injected cover).
    Inject(commands::inject::InjectArgs),
    /// Sweep synthetic skew surfaces: score response to cover size or class
    /// ratio at fixed prediction correlations.
    Skew(commands::skew::SkewArgs),
    /// Benchmark search with and without optimistic-estimate pruning.
    Bench(commands::bench::BenchArgs),
}

fn main() {
    // Die quietly on closed pipes (e.g. `perfslice ... | head`).
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }

    let cli = Cli::parse();
    if cli.threads == 0 {
        report_error(
            cli.json_errors,
            &anyhow::anyhow!("--threads must be at least 1"),
        );
        std::process::exit(2);
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads)
        .build_global()
        .expect("rayon pool initializes once");

    let result = match cli.command {
        Command::Mine(args) => commands::mine::run(args),
        Command::Inject(args) => commands::inject::run(args),
        Command::Skew(args) => commands::skew::run(args),
        Command::Bench(args) => commands::bench::run(args),
    };
    if let Err(err) = result {
        report_error(cli.json_errors, &err);
        std::process::exit(1);
    }
}

fn report_error(json: bool, err: &anyhow::Error) {
    if json {
        eprintln!("{}", serde_json::json!({ "error": format!("{err:#}") }));
    } else {
        eprintln!("error: {err:#}");
    }
}

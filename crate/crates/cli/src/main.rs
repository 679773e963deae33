use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use nlheat::Execution;
use nlheat_cli::{override_key, parse_config, run_scenario, sweep, CliError, RunManifest, Task};

#[derive(Parser)]
#[command(name = "nlheat", version, about = "Mass-preserving nonlinear heat flow: simulations, ground states and potential wells")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Scenario file (`key = value` lines).
    #[arg(long)]
    config: PathBuf,
    /// Output directory, overriding `output_dir`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Initial field from a `coord,value` CSV.
    #[arg(long)]
    seed_file: Option<PathBuf>,
    /// Print errors only.
    #[arg(long)]
    quiet: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run the tasks listed in the config.
    Run(Common),
    Evolve(Common),
    GroundState(Common),
    Classify(Common),
    Sobolev(Common),
    GnConstant(Common),
    Shoot(Common),
    /// Repeat the config for several values of one key.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// One of dt, grid_n, g, sigma, mass.
        #[arg(long)]
        param: String,
        /// Comma-separated values.
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        values: Vec<String>,
        /// Run scenarios one after another.
        #[arg(long)]
        sequential: bool,
    },
}

fn load_text(common: &Common) -> Result<String, CliError> {
    let mut text = fs::read_to_string(&common.config).map_err(|source| CliError::Io {
        path: common.config.clone(),
        source,
    })?;
    if let Some(seed) = &common.seed_file {
        text = override_key(&text, "initial", "file");
        text = override_key(&text, "seed_file", &seed.display().to_string());
    }
    if let Some(out) = &common.out {
        text = override_key(&text, "output_dir", &out.display().to_string());
    }
    Ok(text)
}

fn print_manifest(m: &RunManifest) {
    let tasks: Vec<&str> = m.tasks_run.iter().map(Task::name).collect();
    println!("tasks: {}", tasks.join(", "));
    for n in &m.notes {
        println!("note: {n}");
    }
    for c in &m.caveats {
        println!("caveat: {c}");
    }
    if let Some(t) = &m.termination {
        println!("termination: {t}");
    }
    for (k, v) in &m.labels {
        println!("{k}: {v}");
    }
    for (k, v) in &m.scalars {
        println!("{k}: {v:.10e}");
    }
    println!("output: {}", m.output_dir.display());
}

fn single(common: &Common, task: Option<Task>) -> Result<i32, CliError> {
    let text = load_text(common)?;
    let mut config = parse_config(&text)?;
    if let Some(t) = task {
        config = config.with_tasks(vec![t])?;
    }
    match run_scenario(&config) {
        Ok(m) => {
            if !common.quiet {
                print_manifest(&m);
            }
            Ok(0)
        }
        Err(f) => {
            if !common.quiet {
                print_manifest(&f.manifest);
            }
            Err(f.error)
        }
    }
}

fn dispatch(command: &Command) -> Result<i32, CliError> {
    match command {
        Command::Run(c) => single(c, None),
        Command::Evolve(c) => single(c, Some(Task::Evolve)),
        Command::GroundState(c) => single(c, Some(Task::GroundState)),
        Command::Classify(c) => single(c, Some(Task::Classify)),
        Command::Sobolev(c) => single(c, Some(Task::Sobolev)),
        Command::GnConstant(c) => single(c, Some(Task::GnConstant)),
        Command::Shoot(c) => single(c, Some(Task::Shoot)),
        Command::Sweep {
            common,
            param,
            values,
            sequential,
        } => {
            let text = load_text(common)?;
            let out = common
                .out
                .clone()
                .or_else(|| parse_config(&text).ok().and_then(|c| c.output_dir))
                .unwrap_or_else(|| PathBuf::from(nlheat_cli::run::DEFAULT_OUTPUT_DIR));
            let exec = if *sequential {
                Execution::Sequential
            } else {
                Execution::Parallel
            };
            let summary = sweep(&text, param, values, &out, exec)?;
            if !common.quiet {
                for row in &summary.rows {
                    println!("{param} = {}: exit {}", row.value, row.manifest.exit_code());
                }
                println!("summary: {}", summary.summary_path.display());
            }
            Ok(summary.exit_code())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let quiet = match &cli.command {
        Command::Sweep { common, .. } => common.quiet,
        Command::Run(c)
        | Command::Evolve(c)
        | Command::GroundState(c)
        | Command::Classify(c)
        | Command::Sobolev(c)
        | Command::GnConstant(c)
        | Command::Shoot(c) => c.quiet,
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(if quiet { "error" } else { "warn" }))
        .init();
    match dispatch(&cli.command) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

//! `qproof`: batch runner for protocol scenarios.

mod exec;
mod presets;
mod report;
mod scenario;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use report::Entry;
use scenario::{LoadError, Mode, Scenario};

const EXIT_INVALID: u8 = 2;
const EXIT_EMPTY: u8 = 4;

#[derive(Parser)]
#[command(
    name = "qproof",
    version,
    about = "Runs protocol scenarios and checks their claimed probabilities"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Override the scenario mode (Monte Carlo applies to epr-qma only).
    #[arg(long, global = true, value_enum)]
    mode: Option<Mode>,
    /// Override the scenario seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Override the Monte Carlo shot count.
    #[arg(long, global = true)]
    shots: Option<u64>,
    /// Also write the report as CSV to this file.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Format of the report on stdout.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario file.
    Run { file: PathBuf },
    /// Run every `*.toml` scenario in a directory.
    Suite {
        dir: PathBuf,
        /// Only run scenarios whose file stem contains this string.
        #[arg(long)]
        filter: Option<String>,
    },
    /// List kinds, verifiers, systems, provers and checkers.
    ListPresets,
    /// Show how a scenario resolves without running it.
    Describe {
        /// A scenario file, or the name of one under `./scenarios`.
        scenario: String,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match &cli.command {
        Command::Run { file } => run_files(&cli, vec![file.clone()]),
        Command::Suite { dir, filter } => match suite_files(dir, filter.as_deref()) {
            Ok(files) if files.is_empty() => {
                eprintln!("no scenarios match in {}", dir.display());
                ExitCode::from(EXIT_EMPTY)
            }
            Ok(files) => run_files(&cli, files),
            Err(e) => {
                eprintln!("{e}");
                ExitCode::from(EXIT_INVALID)
            }
        },
        Command::ListPresets => {
            print!("{}", presets::listing());
            ExitCode::SUCCESS
        }
        Command::Describe { scenario } => describe(&cli, scenario),
    }
}

fn suite_files(dir: &Path, filter: Option<&str>) -> Result<Vec<PathBuf>, String> {
    let rd = std::fs::read_dir(dir).map_err(|e| format!("{}: {e}", dir.display()))?;
    let mut files: Vec<PathBuf> = rd
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| x == "toml"))
        .filter(|p| {
            filter.is_none_or(|f| {
                p.file_stem()
                    .is_some_and(|s| s.to_string_lossy().contains(f))
            })
        })
        .collect();
    files.sort();
    Ok(files)
}

fn load_all(cli: &Cli, files: &[PathBuf]) -> Result<Vec<Scenario>, LoadError> {
    let mut out = Vec::new();
    for f in files {
        let mut s = Scenario::load(f)?;
        s.apply_overrides(cli.mode, cli.seed, cli.shots);
        s.validate()
            .map_err(|e| LoadError::Invalid(format!("{}: {e}", f.display())))?;
        out.push(s);
    }
    out.sort_by(|a, b| a.name().cmp(b.name()));
    if let Some(w) = out.windows(2).find(|w| w[0].name() == w[1].name()) {
        return Err(LoadError::Invalid(format!(
            "two scenarios are named `{}`",
            w[0].name()
        )));
    }
    Ok(out)
}

fn run_files(cli: &Cli, files: Vec<PathBuf>) -> ExitCode {
    // nothing is reported unless every file loads
    let scenarios = match load_all(cli, &files) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(EXIT_INVALID);
        }
    };
    let start = Instant::now();
    let entries: Vec<Entry> = scenarios
        .par_iter()
        .map(|s| {
            let t = Instant::now();
            let e = Entry::evaluate(s);
            eprintln!("{}: {:.3} s", s.name(), t.elapsed().as_secs_f64());
            e
        })
        .collect();
    eprintln!("wall clock: {:.3} s", start.elapsed().as_secs_f64());
    let rendered = match cli.format {
        Format::Text => report::text(&entries),
        Format::Csv => report::csv(&entries),
    };
    print!("{rendered}");
    if let Some(path) = &cli.out {
        if let Err(e) = std::fs::write(path, report::csv(&entries)) {
            eprintln!("{}: {e}", path.display());
            return ExitCode::from(EXIT_INVALID);
        }
    }
    ExitCode::from(report::exit_code(&entries))
}

fn describe(cli: &Cli, scenario: &str) -> ExitCode {
    let mut path = PathBuf::from(scenario);
    if !path.exists() {
        let named = Path::new("scenarios").join(format!("{scenario}.toml"));
        if named.exists() {
            path = named;
        }
    }
    let mut s = match Scenario::load(&path) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(EXIT_INVALID);
        }
    };
    s.apply_overrides(cli.mode, cli.seed, cli.shots);
    if let Err(e) = s.validate() {
        eprintln!("validation error: {}: {e}", path.display());
        return ExitCode::from(EXIT_INVALID);
    }
    println!("scenario  {}", s.name());
    println!("file      {}", path.display());
    println!("kind      {}", s.kind.name());
    println!("mode      {}", s.mode().name());
    println!("seed      {} ({})", s.seed(), exec::RNG_NAME);
    if let Some(shots) = s.shots {
        println!("shots     {shots}");
    }
    println!("budget    {} qubits", s.budget());
    if let Some(d) = &s.description {
        println!("about     {}", d.trim());
    }
    match exec::setup(&s) {
        Ok(line) => println!("setup     {line}"),
        Err(e) => println!("setup     unresolved: {e}"),
    }
    println!("reports   {}", s.quantities().join(", "));
    for e in &s.expect {
        println!(
            "expect    {} {} {} +/- {:e}",
            e.quantity,
            e.relation.symbol(),
            exec::fixed(e.value.0),
            e.tolerance
        );
    }
    ExitCode::SUCCESS
}

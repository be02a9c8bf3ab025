use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crsym::canonical_forms::SymbolSpec;
use crsym::catalog::{write_catalog, Catalog};
use crsym::reduced_symbol::SearchOptions;
use crsym::report::{canon_report, full_report, ReportOptions};
use crsym::tanaka_prolongation::DEFAULT_K_MAX;
use crsym::verify::{run, select, CriterionOutcome, VerifyOptions};

const EXIT_INPUT: u8 = 2;
const EXIT_VERIFY: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "crsym", version, about = "Exact computations with CR symbols of 2-nondegenerate hypersurfaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build and validate the canonical pair (H, A) of a spec.
    Canon {
        spec: PathBuf,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Full report: regularity, intersection algebra, reduced data and prolongations.
    Report {
        spec: PathBuf,
        #[arg(long, default_value_t = DEFAULT_K_MAX)]
        k_max: usize,
        #[command(flatten)]
        search: SearchArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run the verification criteria over a catalog.
    VerifyPaper {
        #[arg(long, default_value = "catalog")]
        catalog: PathBuf,
        /// Comma-separated criterion numbers or keywords, e.g. `intersection` or `1,4`.
        #[arg(long)]
        filter: Option<String>,
        /// Worker threads; defaults to the number of cores.
        #[arg(long)]
        jobs: Option<usize>,
        /// Write the outcomes as JSON to this file.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Regenerate the catalog directory.
    GenCatalog {
        #[arg(long, default_value = "catalog")]
        out: PathBuf,
    },
}

#[derive(Args, Debug)]
struct OutputArgs {
    /// Add decimal approximations next to exact values.
    #[arg(long)]
    float: bool,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SearchArgs {
    /// Lattice radius for the reduced-datum search.
    #[arg(long, default_value_t = 1)]
    radius: i64,
    /// Lattice step is 1/denominator.
    #[arg(long, default_value_t = 2)]
    denominator: i64,
    /// Stop after this many data.
    #[arg(long, default_value_t = 8)]
    limit: usize,
    #[arg(long, default_value_t = 20_000)]
    max_points: usize,
}

/// A validated command with its inputs and options.
#[derive(Debug, Clone)]
struct RunManifest {
    command: &'static str,
    inputs: Vec<PathBuf>,
    k_max: usize,
    radius: i64,
    denominator: i64,
    limit: usize,
    max_points: usize,
    jobs: Option<usize>,
    float: bool,
    output: Option<PathBuf>,
}

impl RunManifest {
    fn validate(&self) -> Result<(), String> {
        if self.k_max == 0 {
            return Err("--k-max must be at least 1".into());
        }
        if self.radius < 0 {
            return Err("--radius must be nonnegative".into());
        }
        if self.denominator < 1 {
            return Err("--denominator must be at least 1".into());
        }
        if self.jobs == Some(0) {
            return Err("--jobs must be at least 1".into());
        }
        Ok(())
    }

    fn search(&self) -> SearchOptions {
        SearchOptions {
            radius: self.radius,
            denominator: self.denominator,
            limit: self.limit,
            max_points: self.max_points,
            ..SearchOptions::default()
        }
    }
}

fn manifest(cmd: &Command) -> RunManifest {
    let defaults = SearchOptions::default();
    let base = RunManifest {
        command: "",
        inputs: Vec::new(),
        k_max: DEFAULT_K_MAX,
        radius: defaults.radius,
        denominator: defaults.denominator,
        limit: defaults.limit,
        max_points: defaults.max_points,
        jobs: None,
        float: false,
        output: None,
    };
    match cmd {
        Command::Canon { spec, output } => RunManifest {
            command: "canon",
            inputs: vec![spec.clone()],
            float: output.float,
            output: output.out.clone(),
            ..base
        },
        Command::Report { spec, k_max, search, output } => RunManifest {
            command: "report",
            inputs: vec![spec.clone()],
            k_max: *k_max,
            radius: search.radius,
            denominator: search.denominator,
            limit: search.limit,
            max_points: search.max_points,
            float: output.float,
            output: output.out.clone(),
            ..base
        },
        Command::VerifyPaper { catalog, jobs, json, .. } => RunManifest {
            command: "verify-paper",
            inputs: vec![catalog.clone()],
            jobs: *jobs,
            output: json.clone(),
            ..base
        },
        Command::GenCatalog { out } => RunManifest { command: "gen-catalog", output: Some(out.clone()), ..base },
    }
}

enum Failure {
    Input(String),
    Verify(String),
}

fn load_spec(path: &Path) -> Result<SymbolSpec, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    SymbolSpec::from_json(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn emit<T: Serialize>(value: &T, out: Option<&Path>) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).expect("reports serialize") + "\n";
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Input(format!("{}: {e}", p.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).map_err(|e| Failure::Input(e.to_string()))
        }
    }
}

fn execute(cmd: Command, m: &RunManifest) -> Result<(), Failure> {
    match cmd {
        Command::Canon { .. } => {
            let s = load_spec(&m.inputs[0])?;
            let r = canon_report(&s, m.float).map_err(|e| Failure::Input(e.to_string()))?;
            emit(&r, m.output.as_deref())?;
            if r.valid {
                Ok(())
            } else {
                Err(Failure::Verify(format!("canonical pair fails validation: {}", r.violations.join(", "))))
            }
        }
        Command::Report { .. } => {
            let s = load_spec(&m.inputs[0])?;
            let opts = ReportOptions { k_max: m.k_max, search: m.search(), with_float: m.float };
            let r = full_report(&s, &opts).map_err(|e| Failure::Input(e.to_string()))?;
            emit(&r, m.output.as_deref())
        }
        Command::VerifyPaper { filter, .. } => {
            let cat = Catalog::load(&m.inputs[0]).map_err(|e| Failure::Input(e.to_string()))?;
            let criteria = select(filter.as_deref());
            if criteria.is_empty() {
                return Err(Failure::Input(format!("filter {:?} selects no criterion", filter.unwrap_or_default())));
            }
            let opts = VerifyOptions::default();
            let mut outcomes: Vec<CriterionOutcome> = Vec::new();
            for c in criteria {
                let o = run(c, &cat, &opts);
                println!("{}", o.line());
                for f in &o.failures {
                    println!("    {f}");
                }
                outcomes.push(o);
            }
            if let Some(p) = &m.output {
                let seconds_free: Vec<serde_json::Value> = outcomes
                    .iter()
                    .map(|o| {
                        serde_json::json!({
                            "criterion": o.criterion,
                            "name": o.name,
                            "passed": o.passed,
                            "summary": o.summary,
                            "failures": o.failures,
                        })
                    })
                    .collect();
                emit(&seconds_free, Some(p))?;
            }
            let failed: Vec<String> = outcomes.iter().filter(|o| !o.passed).map(|o| o.criterion.to_string()).collect();
            if failed.is_empty() {
                Ok(())
            } else {
                Err(Failure::Verify(format!("failed criteria: {}", failed.join(", "))))
            }
        }
        Command::GenCatalog { out } => {
            let count = write_catalog(&out).map_err(|e| Failure::Input(e.to_string()))?;
            eprintln!("wrote {count} specs to {}", out.display());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let m = manifest(&cli.command);
    if let Err(msg) = m.validate() {
        eprintln!("error: {msg}");
        return ExitCode::from(EXIT_INPUT);
    }
    if let Some(jobs) = m.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_INPUT);
        }
    }
    match execute(cli.command, &m) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(msg)) => {
            eprintln!("{}: error: {msg}", m.command);
            ExitCode::from(EXIT_INPUT)
        }
        Err(Failure::Verify(msg)) => {
            eprintln!("{}: verification failed: {msg}", m.command);
            ExitCode::from(EXIT_VERIFY)
        }
    }
}

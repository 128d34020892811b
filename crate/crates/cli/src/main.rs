use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Map, Value};

use mzi_cli::config::{parse_axis, Command as Recipe};
use mzi_cli::output::OUT_DIR_ENV;
use mzi_cli::{execute, read_config, resolve, validate, CliError};
use mzi_core::ProbeSpec;

#[derive(Parser)]
#[command(
    name = "mzi-limits",
    version,
    about = "Phase-estimation limits of a Mach-Zehnder interferometer with one vacuum port"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Single-parameter QFI for the chosen generator
    Qfi(RunArgs),
    /// Two-arm QFIM entries F_dd, F_ss, F_sd
    Qfim(RunArgs),
    /// Two-parameter Cramer-Rao bound on the phase difference
    Crb(RunArgs),
    /// One-arm QFI of the phase-averaged probe
    PhaseAveraged(RunArgs),
    /// Classical Fisher information of the squeezer / anti-squeezer scheme
    GaussianCfi(RunArgs),
    /// Monte Carlo maximum-likelihood campaign against the classical bound
    Campaign(RunArgs),
    /// Run another recipe over the full grid
    Sweep {
        /// Recipe to evaluate at every grid point
        #[arg(long = "command", value_parser = parse_recipe)]
        recipe: Option<Recipe>,
        #[command(flatten)]
        args: RunArgs,
    },
    /// Check a configuration file and list every violation
    Validate { path: PathBuf },
}

#[derive(Args, Default)]
struct RunArgs {
    /// JSON run configuration; flags override its fields
    #[arg(long)]
    config: Option<PathBuf>,
    /// Probe shorthand, e.g. `fock:n=2`, `coherent:alpha=1`, `squeezed:nbar=1`, `thermal:nbar=0.5`
    #[arg(long, conflicts_with = "nbar")]
    probe: Option<String>,
    /// Squeezed-vacuum probe with this mean photon number
    #[arg(long)]
    nbar: Option<f64>,
    /// Transmittance grid: `start:stop:count` or a comma list
    #[arg(long = "T")]
    t: Option<String>,
    /// Squeeze-parameter grid (squeezed probes only)
    #[arg(long)]
    r: Option<String>,
    /// Phase grid for the detection-scheme recipes
    #[arg(long)]
    phi: Option<String>,
    /// Generator for `qfi`: difference, sum, or one_arm
    #[arg(long)]
    generator: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Detection events per estimate
    #[arg(long)]
    m: Option<u64>,
    /// Independent estimates per campaign
    #[arg(long)]
    reps: Option<u64>,
    /// Truncated-tail tolerance for Fock-space evaluations
    #[arg(long)]
    tail_tol: Option<f64>,
    /// csv or json
    #[arg(long)]
    output: Option<String>,
    /// Output file; defaults to $MZI_OUT_DIR/<command>.<ext>, else stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_recipe(s: &str) -> Result<Recipe, String> {
    s.parse()
}

fn axis(flag: &str, s: &str) -> Result<Value, CliError> {
    parse_axis(s)
        .map(|v| json!(v))
        .map_err(|e| CliError::config(format!("--{flag}: {e}")))
}

fn merged(command: Recipe, sweep: Option<Recipe>, args: RunArgs) -> Result<Value, CliError> {
    let mut doc = match &args.config {
        Some(path) => read_config(path)?,
        None => Value::Object(Map::new()),
    };
    let Some(obj) = doc.as_object_mut() else {
        return Err(CliError::config("configuration must be a JSON object"));
    };
    obj.insert("command".into(), json!(command));
    if let Some(c) = sweep {
        obj.insert("sweep_command".into(), json!(c));
    }
    let probe = match (&args.probe, args.nbar) {
        (Some(s), _) => Some(
            s.parse::<ProbeSpec>()
                .map_err(|e| CliError::config(format!("--probe: {e}")))?,
        ),
        (None, Some(n)) if n.is_finite() && n >= 0.0 => Some(ProbeSpec::squeezed_with_nbar(n)),
        (None, Some(n)) => {
            return Err(CliError::config(format!(
                "--nbar: expected a mean photon number >= 0, got {n}"
            )))
        }
        (None, None) => None,
    };
    if let Some(p) = probe {
        obj.insert(
            "probe".into(),
            serde_json::to_value(p).map_err(|e| CliError::config(e.to_string()))?,
        );
    }
    let mut axes = Vec::new();
    for (key, flag) in [("T", &args.t), ("r", &args.r), ("phi", &args.phi)] {
        if let Some(s) = flag {
            axes.push((key, axis(key, s)?));
        }
    }
    if !axes.is_empty() {
        let grid = obj
            .entry("grid")
            .or_insert_with(|| Value::Object(Map::new()));
        let Some(grid) = grid.as_object_mut() else {
            return Err(CliError::config("/grid must be an object"));
        };
        for (key, v) in axes {
            grid.insert(key.into(), v);
        }
    }
    let scalars = [
        ("generator", args.generator.map(Value::from)),
        ("seed", args.seed.map(Value::from)),
        ("m", args.m.map(Value::from)),
        ("reps", args.reps.map(Value::from)),
        ("tail_tol", args.tail_tol.map(Value::from)),
        ("output", args.output.map(Value::from)),
        (
            "out_path",
            args.out
                .map(|p| Value::from(p.to_string_lossy().into_owned())),
        ),
    ];
    for (key, v) in scalars {
        if let Some(v) = v {
            obj.insert(key.into(), v);
        }
    }
    Ok(doc)
}

fn run_command(cmd: Cmd) -> Result<(), CliError> {
    let (command, sweep, args) = match cmd {
        Cmd::Validate { path } => {
            let violations = match read_config(&path) {
                Ok(doc) => validate::validate_value(&doc),
                Err(CliError::Config { message, .. }) => vec![validate::Violation {
                    pointer: String::new(),
                    message,
                }],
                Err(e) => return Err(e),
            };
            let report = json!({ "valid": violations.is_empty(), "violations": violations });
            println!(
                "{}",
                serde_json::to_string_pretty(&report).expect("report serializes")
            );
            return if violations.is_empty() {
                Ok(())
            } else {
                Err(CliError::Config {
                    message: format!("{} violation(s) in {}", violations.len(), path.display()),
                    violations,
                })
            };
        }
        Cmd::Qfi(a) => (Recipe::Qfi, None, a),
        Cmd::Qfim(a) => (Recipe::Qfim, None, a),
        Cmd::Crb(a) => (Recipe::Crb, None, a),
        Cmd::PhaseAveraged(a) => (Recipe::PhaseAveraged, None, a),
        Cmd::GaussianCfi(a) => (Recipe::GaussianCfi, None, a),
        Cmd::Campaign(a) => (Recipe::Campaign, None, a),
        Cmd::Sweep { recipe, args } => (Recipe::Sweep, recipe, args),
    };
    let cfg = resolve(&merged(command, sweep, args)?)?;
    let default_dir = std::env::var_os(OUT_DIR_ENV).map(PathBuf::from);
    if let Some(bytes) = execute(&cfg, default_dir.as_deref())? {
        std::io::stdout().write_all(&bytes)?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprintln!("{}", CliError::config(e.to_string().trim_end()).record());
            return ExitCode::from(2);
        }
    };
    match run_command(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.record());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

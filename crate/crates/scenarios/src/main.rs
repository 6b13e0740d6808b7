use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use slant_scenarios::builtin::{load_builtin, EXAMPLES};
use slant_scenarios::config::Axis;
use slant_scenarios::{
    emit, load_scenario, run_scenario, run_structure_checks, ConfigError, Format, ScenarioConfig,
};

/// Numerical checks for slant submanifolds of almost Hermitian manifolds.
#[derive(Parser)]
#[command(name = "slantcheck", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format.
    #[arg(long, value_enum, default_value_t = FormatArg::Human, global = true)]
    format: FormatArg,

    /// Replace a grid axis: `x1=min:max:steps` for every lattice grid, or
    /// `name.x1=min:max:steps` for one grid. Repeatable.
    #[arg(long = "grid", value_name = "AXIS=MIN:MAX:STEPS", global = true)]
    grids: Vec<String>,

    /// Override a tolerance: structural, spectral or finite_difference.
    #[arg(long = "tol", value_name = "NAME=VALUE", global = true)]
    tols: Vec<String>,

    /// Write the report to a file instead of standard output.
    #[arg(long, value_name = "PATH", global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Run every check in a scenario file.
    Run { file: PathBuf },
    /// Run a bundled worked example.
    Example {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(EXAMPLES))]
        name: String,
    },
    /// Run only the structure checks of a scenario file.
    CheckStructure { file: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Human,
    Machine,
}

fn usage(key: &str, message: &str) -> ConfigError {
    ConfigError::Invalid {
        key: key.to_string(),
        message: message.to_string(),
    }
}

fn apply_overrides(cfg: &mut ScenarioConfig, cli: &Cli) -> Result<(), ConfigError> {
    for spec in &cli.grids {
        let key = format!("--grid {spec}");
        let (target, range) = spec
            .split_once('=')
            .ok_or_else(|| usage(&key, "expected AXIS=MIN:MAX:STEPS"))?;
        let parts: Vec<&str> = range.split(':').collect();
        let [min, max, steps] = parts[..] else {
            return Err(usage(&key, "expected MIN:MAX:STEPS"));
        };
        let axis = Axis {
            min: min
                .parse()
                .map_err(|_| usage(&key, "MIN is not a number"))?,
            max: max
                .parse()
                .map_err(|_| usage(&key, "MAX is not a number"))?,
            steps: steps
                .parse()
                .map_err(|_| usage(&key, "STEPS is not a positive integer"))?,
        };
        cfg.override_axis(target, axis)?;
    }
    for spec in &cli.tols {
        let key = format!("--tol {spec}");
        let (name, value) = spec
            .split_once('=')
            .ok_or_else(|| usage(&key, "expected NAME=VALUE"))?;
        let value: f64 = value
            .parse()
            .map_err(|_| usage(&key, "VALUE is not a number"))?;
        cfg.override_tolerance(name, value)?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (loaded, structural_only) = match &cli.command {
        Command::Run { file } => (load_scenario(file), false),
        Command::Example { name } => (load_builtin(name), false),
        Command::CheckStructure { file } => (load_scenario(file), true),
    };
    let mut cfg = match loaded {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("slantcheck: {e}");
            return ExitCode::from(2);
        }
    };
    if let Err(e) = apply_overrides(&mut cfg, &cli) {
        eprintln!("slantcheck: {e}");
        return ExitCode::from(2);
    }
    let report = if structural_only {
        run_structure_checks(&cfg)
    } else {
        run_scenario(&cfg)
    };
    let format = match cli.format {
        FormatArg::Human => Format::Human,
        FormatArg::Machine => Format::Machine,
    };
    let text = emit(&report, format);
    match &cli.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, text) {
                eprintln!("slantcheck: cannot write {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{text}"),
    }
    if report.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

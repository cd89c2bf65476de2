use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use bellstat::entropy::MultiplicityPolicy;
use bellstat::report::{self, AxesSpec, Command, Format, PartialConfig, ReportError, Units};
use bellstat::reservoir::ReservoirMode;

/// Population-counting Bell inequality experiments.
#[derive(Parser)]
#[command(name = "bellstat", version)]
struct Cli {
    /// exact, simulate, drain, quantum, entropy or counterexample
    command: Option<Command>,

    /// JSON configuration file
    #[arg(long)]
    config: Option<PathBuf>,

    /// Built-in configuration: wigner-uniform, marble-bag, quantum-60,
    /// multiplicity-counterexample
    #[arg(long)]
    preset: Option<String>,

    /// Coplanar axis spacing in degrees (a-c and c-b)
    #[arg(long = "axes-spacing", value_name = "DEG")]
    axes_spacing: Option<f64>,

    /// Population counts N1,...,N8
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    table: Option<Vec<i64>>,

    /// Multiplicities W1,...,W8
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    omegas: Option<Vec<f64>>,

    /// Sample count (search budget for `counterexample`)
    #[arg(long)]
    samples: Option<u64>,

    #[arg(long)]
    seed: Option<u64>,

    /// equal | proportional
    #[arg(long)]
    policy: Option<MultiplicityPolicy>,

    /// Tolerance of the equal-multiplicity precondition
    #[arg(long, allow_hyphen_values = true)]
    epsilon: Option<f64>,

    /// infinite | finite (simulate)
    #[arg(long)]
    mode: Option<ReservoirMode>,

    /// Quantum scan points at spacing, 2*spacing, ...
    #[arg(long)]
    steps: Option<u32>,

    /// Seeds in the drain ensemble
    #[arg(long)]
    ensemble: Option<u64>,

    /// natural | si
    #[arg(long)]
    units: Option<Units>,

    /// json | csv
    #[arg(long)]
    format: Option<Format>,

    #[arg(long)]
    out: Option<PathBuf>,

    /// Worker threads; results do not depend on this
    #[arg(long)]
    threads: Option<usize>,
}

impl Cli {
    fn flags(&self) -> PartialConfig {
        PartialConfig {
            command: self.command,
            axes: self.axes_spacing.map(|spacing_deg| AxesSpec::Spacing { spacing_deg }),
            table: self.table.clone(),
            omegas: self.omegas.clone(),
            samples: self.samples,
            seed: self.seed,
            policy: self.policy,
            epsilon: self.epsilon,
            mode: self.mode,
            steps: self.steps,
            ensemble: self.ensemble,
            units: self.units,
            format: self.format,
            out: self.out.clone(),
        }
    }
}

fn execute(cli: &Cli) -> Result<(), ReportError> {
    let mut layered = PartialConfig::default();
    if let Some(name) = &cli.preset {
        layered = layered.overlay(PartialConfig::preset(name)?);
    }
    if let Some(path) = &cli.config {
        let text = std::fs::read_to_string(path).map_err(|e| ReportError::Io(format!("{}: {e}", path.display())))?;
        layered = layered.overlay(PartialConfig::from_json(&text)?);
    }
    let config = layered.overlay(cli.flags()).resolve()?;
    let result = match cli.threads {
        Some(n) => report::run_in_pool(&config, n)?,
        None => report::run(&config)?,
    };
    report::write_report(&result, config.format, config.out.as_deref())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("bellstat: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

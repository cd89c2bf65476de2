//! Experiment runner behind the `bellstat` binary.
//!
//! [`run`] dispatches a validated [`ExperimentConfig`] to the matching
//! pipeline and returns a [`RunReport`] with the schema
//! `{config, results, meta}`. Everything except `meta.duration_ms` is a pure
//! function of the configuration.

pub mod config;
pub mod emit;

use std::time::Instant;

use serde::{Deserialize, Serialize};

pub use config::{AxesSpec, Command, ExperimentConfig, Format, PartialConfig, Units};
pub use emit::{emit, to_csv, to_json, write_report};

use crate::entropy::{
    entropy_inequality, entropy_ratios, find_multiplicity_counterexample, multiplicity_inequality,
    multiplicity_probability, product_inequality, MultiplicityVector, Normalization, SearchSpace,
};
use crate::model::{
    exact_probability, outcome_populations, wigner_check, wigner_check_probabilities, ExactProbability,
    InequalityReport, PairOutcome, PopulationSet, PopulationTable, OUTCOME_AB, OUTCOME_AC, OUTCOME_CB,
};
use crate::quantum::{quantum_wigner_report, quantum_wigner_scan, singlet_prediction, singlet_sample, AxisChoice};
use crate::reservoir::{
    depletion_trajectory, empirical_probability, finite_vs_infinite_divergence, sample, DivergenceReport, DrawRecord,
    Proportion, ReservoirMode, ReservoirSpec,
};
use crate::Exec;

/// Bumped whenever a field of the report changes meaning or disappears.
pub const SCHEMA_VERSION: u32 = 1;

const WIGNER_OUTCOMES: [PairOutcome; 3] = [OUTCOME_AB, OUTCOME_AC, OUTCOME_CB];

#[derive(Debug, thiserror::Error)]
pub enum ReportError {
    #[error("invalid configuration: {0}")]
    Validation(String),
    #[error(transparent)]
    Model(#[from] crate::Error),
    #[error("i/o error: {0}")]
    Io(String),
}

impl ReportError {
    /// 2 for invalid input, 3 for I/O failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            ReportError::Validation(_) | ReportError::Model(_) => 2,
            ReportError::Io(_) => 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub config: ExperimentConfig,
    pub results: Results,
    pub meta: Meta,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Meta {
    pub tool: String,
    pub version: String,
    pub schema_version: u32,
    pub duration_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "lowercase")]
#[allow(clippy::large_enum_variant)]
pub enum Results {
    Exact(ExactResults),
    Simulate(SimulateResults),
    Drain(DrainResults),
    Quantum(QuantumResults),
    Entropy(EntropyResults),
    Counterexample(CounterexampleResults),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutcomeProbability {
    pub outcome: PairOutcome,
    pub populations: PopulationSet,
    pub exact: ExactProbability,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactResults {
    pub probabilities: Vec<OutcomeProbability>,
    pub check: InequalityReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateRow {
    pub outcome: PairOutcome,
    pub p_hat: f64,
    pub stderr: f64,
    pub n: u64,
    /// Exact (count-form or predicted) probability for comparison.
    pub expected: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulateResults {
    pub mode: ReservoirMode,
    pub frequencies: PopulationTable,
    pub estimates: Vec<EstimateRow>,
    /// The inequality evaluated on the estimates.
    pub check: InequalityReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DrainResults {
    pub trajectory: Vec<DrawRecord>,
    /// Pre-draw probability of the population taken on the last draw.
    pub final_probability: f64,
    /// Full drains over seeds `seed..seed + ensemble`.
    pub divergence: DivergenceReport,
}

/// One point of a coplanar scan; `theta` is in degrees.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub theta: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub violated: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantumResults {
    pub scan: Vec<ScanRow>,
    /// Predicted inequality at the configured axes (first scan point).
    pub check: InequalityReport,
    /// Singlet sampler with uniform axis choice at the same axes.
    pub estimates: Vec<EstimateRow>,
    pub alice_plus: Proportion,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiplicityProbabilityRow {
    pub outcome: PairOutcome,
    pub outcome_classes: f64,
    pub raw_sum: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyResults {
    pub omegas: MultiplicityVector,
    pub k: f64,
    pub entropies: [f64; 8],
    pub sum_form: InequalityReport,
    pub product_form: InequalityReport,
    pub entropy_form: InequalityReport,
    pub probabilities: Vec<MultiplicityProbabilityRow>,
    /// `S_i / sum S_j`; diagnostic only, not a probability.
    pub entropy_ratios: Option<[f64; 8]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoundCounterexample {
    pub attempt: u64,
    pub omegas: MultiplicityVector,
    pub sum_form: InequalityReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleResults {
    pub budget: u64,
    pub found: Option<FoundCounterexample>,
}

pub fn run(config: &ExperimentConfig) -> Result<RunReport, ReportError> {
    let start = Instant::now();
    let results = match config.command {
        Command::Exact => Results::Exact(run_exact(config)?),
        Command::Simulate => Results::Simulate(run_simulate(config)?),
        Command::Drain => Results::Drain(run_drain(config)?),
        Command::Quantum => Results::Quantum(run_quantum(config)?),
        Command::Entropy => Results::Entropy(run_entropy(config)?),
        Command::Counterexample => Results::Counterexample(run_counterexample(config)?),
    };
    Ok(RunReport {
        config: config.clone(),
        results,
        meta: Meta {
            tool: "bellstat".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            schema_version: SCHEMA_VERSION,
            duration_ms: start.elapsed().as_secs_f64() * 1e3,
        },
    })
}

/// Runs inside a dedicated pool of `threads` workers. Without the
/// `parallel` feature this is [`run`].
pub fn run_in_pool(config: &ExperimentConfig, threads: usize) -> Result<RunReport, ReportError> {
    #[cfg(feature = "parallel")]
    {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| ReportError::Validation(format!("thread pool: {e}")))?;
        pool.install(|| run(config))
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = threads;
        run(config)
    }
}

fn run_exact(config: &ExperimentConfig) -> Result<ExactResults, ReportError> {
    let probabilities = WIGNER_OUTCOMES
        .iter()
        .map(|&o| {
            let exact = exact_probability(&config.table, o)?;
            Ok(OutcomeProbability {
                outcome: o,
                populations: outcome_populations(o),
                exact,
                value: exact.value(),
            })
        })
        .collect::<crate::Result<Vec<_>>>()?;
    Ok(ExactResults {
        probabilities,
        check: wigner_check(&config.table)?,
    })
}

fn run_simulate(config: &ExperimentConfig) -> Result<SimulateResults, ReportError> {
    let spec = ReservoirSpec {
        mode: config.mode,
        composition: config.table,
        seed: config.seed,
    };
    let draws = sample(&spec, config.samples)?;
    let estimates = WIGNER_OUTCOMES
        .iter()
        .map(|&o| {
            let e = empirical_probability(&draws, o)?;
            Ok(EstimateRow {
                outcome: o,
                p_hat: e.p_hat,
                stderr: e.stderr,
                n: e.n,
                expected: exact_probability(&config.table, o)?.value(),
            })
        })
        .collect::<crate::Result<Vec<_>>>()?;
    let check = wigner_check_probabilities(estimates[0].p_hat, estimates[1].p_hat, estimates[2].p_hat)?;
    Ok(SimulateResults {
        mode: config.mode,
        frequencies: draws.frequencies(),
        estimates,
        check,
    })
}

fn run_drain(config: &ExperimentConfig) -> Result<DrainResults, ReportError> {
    let spec = ReservoirSpec::finite(config.table, config.seed);
    let trajectory: Vec<DrawRecord> = depletion_trajectory(&spec)?.records().collect();
    let final_probability = trajectory
        .last()
        .map(|r| r.conditional_probabilities[r.population.index() - 1])
        .unwrap_or(0.0);
    let seeds: Vec<u64> = (0..config.ensemble).map(|i| config.seed.wrapping_add(i)).collect();
    let total = config.table.total()?;
    let divergence = finite_vs_infinite_divergence(&config.table, total, &seeds)?;
    Ok(DrainResults {
        trajectory,
        final_probability,
        divergence,
    })
}

fn run_quantum(config: &ExperimentConfig) -> Result<QuantumResults, ReportError> {
    let scan = match config.axes {
        AxesSpec::Spacing { spacing_deg } => quantum_wigner_scan(spacing_deg.to_radians(), config.steps)?
            .into_iter()
            .enumerate()
            .map(|(k, p)| ScanRow {
                // Reported on the exact degree grid rather than round-tripped radians.
                theta: spacing_deg * (k + 1) as f64,
                lhs: p.lhs,
                rhs: p.rhs,
                violated: p.violated,
            })
            .collect(),
        AxesSpec::Vectors { .. } => Vec::new(),
    };
    let axes = config.axes.triple()?;
    let check = quantum_wigner_report(&axes)?;
    let counts = singlet_sample(&axes, &AxisChoice::Uniform, config.samples, config.seed)?;
    let mut estimates = Vec::new();
    for &o in &WIGNER_OUTCOMES {
        // With few samples an axis pair may never come up.
        if let Ok(e) = counts.estimate(o) {
            let expected = singlet_prediction(axes.axis(o.alice_axis), axes.axis(o.bob_axis))
                .probability(o.alice_sign, o.bob_sign);
            estimates.push(EstimateRow {
                outcome: o,
                p_hat: e.p_hat,
                stderr: e.stderr,
                n: e.n,
                expected,
            });
        }
    }
    Ok(QuantumResults {
        scan,
        check,
        estimates,
        alice_plus: counts.alice_plus(),
    })
}

fn run_entropy(config: &ExperimentConfig) -> Result<EntropyResults, ReportError> {
    let omegas = match config.omegas {
        Some(v) => v,
        None => MultiplicityVector::from_table(&config.table, config.policy)?,
    };
    let k = config.units.k();
    let probabilities = WIGNER_OUTCOMES
        .iter()
        .map(|&o| {
            Ok(MultiplicityProbabilityRow {
                outcome: o,
                outcome_classes: multiplicity_probability(&omegas, o, Normalization::OutcomeClasses)?,
                raw_sum: multiplicity_probability(&omegas, o, Normalization::RawSum)?,
            })
        })
        .collect::<crate::Result<Vec<_>>>()?;
    Ok(EntropyResults {
        omegas,
        k,
        entropies: omegas.omegas().map(|w| k * w.ln()),
        sum_form: multiplicity_inequality(&omegas, config.epsilon),
        product_form: product_inequality(&omegas),
        entropy_form: entropy_inequality(&omegas, k),
        probabilities,
        entropy_ratios: entropy_ratios(&omegas, k),
    })
}

fn run_counterexample(config: &ExperimentConfig) -> Result<CounterexampleResults, ReportError> {
    let found = find_multiplicity_counterexample(config.samples, config.seed, SearchSpace::Positive, Exec::default())?
        .map(|c| FoundCounterexample {
            attempt: c.attempt,
            omegas: c.vector,
            sum_form: multiplicity_inequality(&c.vector, config.epsilon),
        });
    Ok(CounterexampleResults {
        budget: config.samples,
        found,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(json: &str) -> ExperimentConfig {
        PartialConfig::from_json(json).unwrap().resolve().unwrap()
    }

    #[test]
    fn exact_uniform() {
        let r = run(&cfg(r#"{"command":"exact"}"#)).unwrap();
        let Results::Exact(e) = r.results else { panic!() };
        assert_eq!((e.check.lhs, e.check.rhs, e.check.holds), (0.25, 0.5, true));
        assert_eq!(e.probabilities[0].exact, ExactProbability::new(2, 8).unwrap());
    }

    #[test]
    fn quantum_sixty() {
        let r = run(&cfg(
            r#"{"command":"quantum","axes":{"spacing_deg":60},"samples":20000}"#,
        ))
        .unwrap();
        let Results::Quantum(q) = r.results else { panic!() };
        assert_eq!(q.scan.len(), 1);
        assert_eq!(q.scan[0].theta, 60.0);
        assert!((q.check.lhs - 0.375).abs() < 1e-12 && (q.check.rhs - 0.25).abs() < 1e-12);
        assert!(q.check.violated() && q.scan[0].violated);
        assert_eq!(q.estimates.len(), 3);
    }

    #[test]
    fn drain_bag() {
        let r = run(&cfg(r#"{"command":"drain","table":[2,1,0,0,0,0,0,0],"ensemble":5}"#)).unwrap();
        let Results::Drain(d) = r.results else { panic!() };
        assert_eq!(d.trajectory.len(), 3);
        assert_eq!(d.final_probability, 1.0);
        assert_eq!(d.divergence.per_seed.len(), 5);
    }

    #[test]
    fn entropy_and_counterexample() {
        let r = run(&cfg(r#"{"command":"entropy","omegas":[1,1,10,10,1,1,1,1]}"#)).unwrap();
        let Results::Entropy(e) = r.results else { panic!() };
        assert!(e.sum_form.violated());
        assert_eq!(e.sum_form.equal_multiplicity, Some(false));
        assert!(e.product_form.holds && e.entropy_form.holds);

        let r = run(&cfg(r#"{"command":"counterexample","samples":10000}"#)).unwrap();
        let Results::Counterexample(c) = r.results else {
            panic!()
        };
        let found = c.found.unwrap();
        assert!(found.sum_form.violated());
        assert_eq!(found.sum_form.equal_multiplicity, Some(false));
    }

    #[test]
    fn simulate_finite_and_infinite() {
        let r = run(&cfg(r#"{"command":"simulate","samples":5000}"#)).unwrap();
        let Results::Simulate(s) = r.results else { panic!() };
        assert_eq!(s.frequencies.total().unwrap(), 5000);
        let r = run(&cfg(
            r#"{"command":"simulate","mode":"finite","table":[5,5,5,5,5,5,5,5],"samples":40}"#,
        ))
        .unwrap();
        let Results::Simulate(s) = r.results else { panic!() };
        assert_eq!(s.frequencies, PopulationTable::uniform(5));
        // A fully drained bag reproduces the exact probabilities.
        assert!(s.estimates.iter().all(|e| e.p_hat == e.expected));
    }

    #[test]
    fn pool_size_does_not_change_results() {
        let c = cfg(r#"{"command":"quantum","samples":70000,"seed":3}"#);
        let a = run_in_pool(&c, 1).unwrap();
        let b = run_in_pool(&c, 4).unwrap();
        assert_eq!(a.results, b.results);
    }

    #[test]
    fn exit_codes() {
        assert_eq!(ReportError::Validation("x".into()).exit_code(), 2);
        assert_eq!(ReportError::Model(crate::Error::EmptyTable).exit_code(), 2);
        assert_eq!(ReportError::Io("x".into()).exit_code(), 3);
    }
}

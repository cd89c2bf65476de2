//! Singlet-state predictions and sampling.
//!
//! For a spin singlet measured along unit axes separated by angle `theta`,
//! equal signs occur with probability `sin^2(theta / 2) / 2` each and
//! opposite signs with `cos^2(theta / 2) / 2` each. Feeding these into the
//! count-form inequality exposes the violation for coplanar spacings below
//! a right angle.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::model::{
    wigner_check_probabilities, Axis, AxisLabel, AxisTriple, InequalityReport, PairOutcome, Sign, TOLERANCE,
};
use crate::reservoir::{EmpiricalEstimate, Proportion};
use crate::rng::{blocks, stream_rng};

/// Joint sign probabilities for one pair of measurement axes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SingletPrediction {
    pub p_pp: f64,
    pub p_pm: f64,
    pub p_mp: f64,
    pub p_mm: f64,
}

impl SingletPrediction {
    pub fn for_angle(theta: f64) -> Self {
        let half = theta / 2.0;
        let same = 0.5 * half.sin().powi(2);
        let opposite = 0.5 * half.cos().powi(2);
        SingletPrediction {
            p_pp: same,
            p_pm: opposite,
            p_mp: opposite,
            p_mm: same,
        }
    }

    pub fn probability(&self, alice: Sign, bob: Sign) -> f64 {
        match (alice, bob) {
            (Sign::Plus, Sign::Plus) => self.p_pp,
            (Sign::Plus, Sign::Minus) => self.p_pm,
            (Sign::Minus, Sign::Plus) => self.p_mp,
            (Sign::Minus, Sign::Minus) => self.p_mm,
        }
    }

    /// Entries in `(+,+), (+,-), (-,+), (-,-)` order.
    pub fn as_array(&self) -> [f64; 4] {
        [self.p_pp, self.p_pm, self.p_mp, self.p_mm]
    }
}

/// Alice measures along `alice`, Bob along `bob`.
pub fn singlet_prediction(alice: &Axis, bob: &Axis) -> SingletPrediction {
    SingletPrediction::for_angle(alice.angle_to(bob))
}

fn outcome_probability(axes: &AxisTriple, o: PairOutcome) -> f64 {
    singlet_prediction(axes.axis(o.alice_axis), axes.axis(o.bob_axis)).probability(o.alice_sign, o.bob_sign)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanPoint {
    /// Coplanar spacing in radians: a-c and c-b are `theta`, a-b is `2 theta`.
    pub theta: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub violated: bool,
}

/// Quantum P(+a;+b) against P(+a;+c) + P(+c;+b) at one coplanar spacing.
pub fn quantum_wigner_point(theta: f64) -> Result<ScanPoint> {
    if !(theta > 0.0 && theta < std::f64::consts::PI) {
        return Err(Error::AngleRange(theta));
    }
    let axes = AxisTriple::coplanar(theta);
    let report = quantum_wigner_report(&axes)?;
    Ok(ScanPoint {
        theta,
        lhs: report.lhs,
        rhs: report.rhs,
        violated: report.lhs > report.rhs + TOLERANCE,
    })
}

/// The full inequality report for the singlet predictions on `axes`.
pub fn quantum_wigner_report(axes: &AxisTriple) -> Result<InequalityReport> {
    use crate::model::{OUTCOME_AB, OUTCOME_AC, OUTCOME_CB};
    wigner_check_probabilities(
        outcome_probability(axes, OUTCOME_AB),
        outcome_probability(axes, OUTCOME_AC),
        outcome_probability(axes, OUTCOME_CB),
    )
}

/// Points at `spacing, 2 spacing, .., steps * spacing`; every point must lie
/// strictly between 0 and pi.
pub fn quantum_wigner_scan(spacing: f64, steps: u32) -> Result<Vec<ScanPoint>> {
    (1..=steps).map(|k| quantum_wigner_point(k as f64 * spacing)).collect()
}

/// How each pair's measurement axes are chosen.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AxisChoice {
    /// Alice and Bob each pick a, b or c independently and uniformly.
    #[default]
    Uniform,
    Fixed(AxisLabel, AxisLabel),
    /// Cycles through all nine ordered axis pairs.
    RoundRobin,
    /// Cycles through the listed pairs.
    Cycle(Vec<(AxisLabel, AxisLabel)>),
}

impl AxisChoice {
    fn pairs(&self) -> Result<Vec<(AxisLabel, AxisLabel)>> {
        match self {
            AxisChoice::Uniform => Ok(vec![]),
            AxisChoice::Fixed(a, b) => Ok(vec![(*a, *b)]),
            AxisChoice::RoundRobin => Ok(AxisLabel::ALL
                .into_iter()
                .flat_map(|a| AxisLabel::ALL.map(move |b| (a, b)))
                .collect()),
            AxisChoice::Cycle(v) if v.is_empty() => Err(Error::EmptyPolicy),
            AxisChoice::Cycle(v) => Ok(v.clone()),
        }
    }
}

/// Joint sign counts indexed by `[alice axis][bob axis][outcome]`, with the
/// outcome slot ordered as in [`SingletPrediction::as_array`].
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SingletCounts {
    pub counts: [[[u64; 4]; 3]; 3],
}

fn sign_slot(alice: Sign, bob: Sign) -> usize {
    match (alice, bob) {
        (Sign::Plus, Sign::Plus) => 0,
        (Sign::Plus, Sign::Minus) => 1,
        (Sign::Minus, Sign::Plus) => 2,
        (Sign::Minus, Sign::Minus) => 3,
    }
}

impl SingletCounts {
    fn merge(&mut self, other: &SingletCounts) {
        for (a, b) in self
            .counts
            .iter_mut()
            .flatten()
            .flatten()
            .zip(other.counts.iter().flatten().flatten())
        {
            *a += b;
        }
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().flatten().sum()
    }

    /// Pairs measured on this axis combination.
    pub fn pairs(&self, alice: AxisLabel, bob: AxisLabel) -> u64 {
        self.counts[alice.index()][bob.index()].iter().sum()
    }

    pub fn count(&self, o: PairOutcome) -> u64 {
        self.counts[o.alice_axis.index()][o.bob_axis.index()][sign_slot(o.alice_sign, o.bob_sign)]
    }

    /// Frequency of `o` among pairs measured on its axis combination.
    pub fn estimate(&self, o: PairOutcome) -> Result<EmpiricalEstimate> {
        let n = self.pairs(o.alice_axis, o.bob_axis);
        if n == 0 {
            return Err(Error::EmptyDraws);
        }
        let p = Proportion::new(self.count(o), n);
        Ok(EmpiricalEstimate {
            outcome: o,
            p_hat: p.p_hat,
            stderr: p.stderr,
            n,
        })
    }

    /// Fraction of all pairs where Alice saw `+`.
    pub fn alice_plus(&self) -> Proportion {
        let hits = self.counts.iter().flatten().map(|c| c[0] + c[1]).sum();
        Proportion::new(hits, self.total())
    }
}

pub fn singlet_sample(axes: &AxisTriple, policy: &AxisChoice, n: u64, seed: u64) -> Result<SingletCounts> {
    singlet_sample_with(axes, policy, n, seed, Exec::default())
}

/// Samples `n` singlet pairs. Pair `j` lives in block `j / BLOCK_LEN`, which
/// reads its own stream of `seed`, so the counts do not depend on `exec`.
pub fn singlet_sample_with(
    axes: &AxisTriple,
    policy: &AxisChoice,
    n: u64,
    seed: u64,
    exec: Exec,
) -> Result<SingletCounts> {
    if n == 0 {
        return Err(Error::ZeroSamples);
    }
    let cycle = policy.pairs()?;
    let mut table = [[[0.0f64; 4]; 3]; 3];
    for a in AxisLabel::ALL {
        for b in AxisLabel::ALL {
            table[a.index()][b.index()] = singlet_prediction(axes.axis(a), axes.axis(b)).as_array();
        }
    }
    let plan: Vec<_> = blocks(n).collect();
    let parts = exec.map_slice(&plan, |&(block, start, len)| {
        let mut rng = stream_rng(seed, block);
        let mut out = SingletCounts::default();
        for j in start..start + len {
            let (a, b) = if cycle.is_empty() {
                (rng.random_range(0..3usize), rng.random_range(0..3usize))
            } else {
                let (a, b) = cycle[(j % cycle.len() as u64) as usize];
                (a.index(), b.index())
            };
            let probs = &table[a][b];
            let u: f64 = rng.random();
            let mut acc = 0.0;
            let mut slot = 3;
            for (s, p) in probs.iter().enumerate() {
                acc += p;
                if u < acc {
                    slot = s;
                    break;
                }
            }
            out.counts[a][b][slot] += 1;
        }
        out
    });
    let mut total = SingletCounts::default();
    for p in &parts {
        total.merge(p);
    }
    Ok(total)
}

//! Drawing pairs from a reservoir of the eight populations.
//!
//! An infinite reservoir draws i.i.d. with probabilities N_i / total. A
//! finite reservoir is a bag of explicit counts that is depleted by each
//! draw, so the conditional probabilities drift as the bag empties and the
//! last draw is certain.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::model::{outcome_populations, PairOutcome, Population, PopulationTable, OUTCOME_AB};
use crate::rng::{blocks, stream_rng};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReservoirMode {
    Infinite,
    Finite,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReservoirSpec {
    pub mode: ReservoirMode,
    /// Relative weights (infinite) or literal bag contents (finite).
    pub composition: PopulationTable,
    pub seed: u64,
}

impl ReservoirSpec {
    pub fn infinite(weights: PopulationTable, seed: u64) -> Self {
        ReservoirSpec {
            mode: ReservoirMode::Infinite,
            composition: weights,
            seed,
        }
    }

    pub fn finite(bag: PopulationTable, seed: u64) -> Self {
        ReservoirSpec {
            mode: ReservoirMode::Finite,
            composition: bag,
            seed,
        }
    }

    /// Returns the composition total, rejecting an empty composition.
    pub fn validate(&self) -> Result<u64> {
        let total = self.composition.total()?;
        if total == 0 {
            return Err(match self.mode {
                ReservoirMode::Infinite => Error::ZeroWeight,
                ReservoirMode::Finite => Error::EmptyTable,
            });
        }
        Ok(total)
    }
}

/// One draw, with the state of the reservoir around it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DrawRecord {
    /// One-based draw number.
    pub step: u64,
    pub population: Population,
    /// Bag contents after the draw; `None` for an infinite reservoir.
    pub remaining: Option<PopulationTable>,
    /// Probability of each population just before the draw.
    pub conditional_probabilities: [f64; 8],
}

/// The outcome of [`sample`]: the drawn populations in order. Per-step
/// records are derived on demand from the initial composition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DrawSequence {
    mode: ReservoirMode,
    initial: PopulationTable,
    draws: Vec<Population>,
}

impl DrawSequence {
    pub fn mode(&self) -> ReservoirMode {
        self.mode
    }

    pub fn initial(&self) -> &PopulationTable {
        &self.initial
    }

    pub fn populations(&self) -> &[Population] {
        &self.draws
    }

    pub fn len(&self) -> usize {
        self.draws.len()
    }

    pub fn is_empty(&self) -> bool {
        self.draws.is_empty()
    }

    /// Pre-draw bag contents at every step (finite), or the fixed weights
    /// repeated (infinite).
    pub fn pre_draw_states(&self) -> impl Iterator<Item = PopulationTable> + '_ {
        let mut state = self.initial;
        let finite = self.mode == ReservoirMode::Finite;
        self.draws.iter().map(move |&p| {
            let before = state;
            if finite {
                *state.count_mut(p) -= 1;
            }
            before
        })
    }

    pub fn records(&self) -> impl Iterator<Item = DrawRecord> + '_ {
        let finite = self.mode == ReservoirMode::Finite;
        self.pre_draw_states()
            .zip(self.draws.iter())
            .enumerate()
            .map(move |(k, (before, &p))| {
                let total = before.total().unwrap_or(0) as f64;
                let conditional_probabilities = before.counts().map(|c| c as f64 / total);
                let remaining = finite.then(|| {
                    let mut after = before;
                    *after.count_mut(p) -= 1;
                    after
                });
                DrawRecord {
                    step: k as u64 + 1,
                    population: p,
                    remaining,
                    conditional_probabilities,
                }
            })
    }

    /// Histogram of drawn populations.
    pub fn frequencies(&self) -> PopulationTable {
        let mut t = PopulationTable::default();
        for &p in &self.draws {
            *t.count_mut(p) += 1;
        }
        t
    }
}

/// Index pick proportional to `counts`, given their `total`.
fn pick<R: Rng>(rng: &mut R, counts: &[u64; 8], total: u64) -> Population {
    let mut u = rng.random_range(0..total);
    for (slot, &c) in counts.iter().enumerate() {
        if u < c {
            return Population::ALL[slot];
        }
        u -= c;
    }
    unreachable!("weighted pick past the total")
}

pub fn sample(spec: &ReservoirSpec, n: u64) -> Result<DrawSequence> {
    sample_with(spec, n, Exec::default())
}

/// Infinite draws are split into fixed blocks on separate streams; finite
/// draws are inherently sequential and use stream 0.
pub fn sample_with(spec: &ReservoirSpec, n: u64, exec: Exec) -> Result<DrawSequence> {
    if n == 0 {
        return Err(Error::ZeroSamples);
    }
    let total = spec.validate()?;
    let draws = match spec.mode {
        ReservoirMode::Infinite => {
            let counts = spec.composition.counts();
            let plan: Vec<_> = blocks(n).collect();
            exec.map_slice(&plan, |&(b, _, len)| {
                let mut rng = stream_rng(spec.seed, b);
                (0..len).map(|_| pick(&mut rng, &counts, total)).collect::<Vec<_>>()
            })
            .concat()
        }
        ReservoirMode::Finite => {
            if n > total {
                return Err(Error::Overdraw {
                    requested: n,
                    available: total,
                });
            }
            drain(spec.composition, total, n, spec.seed)
        }
    };
    Ok(DrawSequence {
        mode: spec.mode,
        initial: spec.composition,
        draws,
    })
}

fn drain(bag: PopulationTable, total: u64, n: u64, seed: u64) -> Vec<Population> {
    let mut rng = stream_rng(seed, 0);
    let mut counts = bag.counts();
    let mut left = total;
    (0..n)
        .map(|_| {
            let p = pick(&mut rng, &counts, left);
            counts[p.index() - 1] -= 1;
            left -= 1;
            p
        })
        .collect()
}

/// Sample proportion with its binomial standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Proportion {
    pub p_hat: f64,
    /// `sqrt(p_hat (1 - p_hat) / n)`.
    pub stderr: f64,
    pub n: u64,
}

impl Proportion {
    pub fn new(hits: u64, n: u64) -> Self {
        let p_hat = hits as f64 / n as f64;
        Proportion {
            p_hat,
            stderr: (p_hat * (1.0 - p_hat) / n as f64).sqrt(),
            n,
        }
    }

    /// `|p_hat - p| <= sigmas * stderr`, with stderr taken at the reference
    /// value `p` so that a zero-variance estimate is not trivially accepted.
    pub fn within(&self, p: f64, sigmas: f64) -> bool {
        let se = (p * (1.0 - p) / self.n as f64).sqrt();
        (self.p_hat - p).abs() <= sigmas * se
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalEstimate {
    pub outcome: PairOutcome,
    pub p_hat: f64,
    pub stderr: f64,
    pub n: u64,
}

impl EmpiricalEstimate {
    pub fn proportion(&self) -> Proportion {
        Proportion {
            p_hat: self.p_hat,
            stderr: self.stderr,
            n: self.n,
        }
    }
}

pub fn empirical_probability(draws: &DrawSequence, o: PairOutcome) -> Result<EmpiricalEstimate> {
    if draws.is_empty() {
        return Err(Error::EmptyDraws);
    }
    let set = outcome_populations(o);
    let hits = draws.populations().iter().filter(|p| set.contains(**p)).count() as u64;
    let prop = Proportion::new(hits, draws.len() as u64);
    Ok(EmpiricalEstimate {
        outcome: o,
        p_hat: prop.p_hat,
        stderr: prop.stderr,
        n: prop.n,
    })
}

/// Draws a finite bag until it is empty.
pub fn depletion_trajectory(spec: &ReservoirSpec) -> Result<DrawSequence> {
    if spec.mode != ReservoirMode::Finite {
        return Err(Error::InfiniteDrain);
    }
    let total = spec.validate()?;
    sample_with(spec, total, Exec::Sequential)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedDivergence {
    pub seed: u64,
    /// Largest |finite conditional P(+a;+b) - infinite P(+a;+b)| over the steps.
    pub max_deviation: f64,
    /// One-based step where the maximum first occurs.
    pub step: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DivergenceReport {
    pub draws: u64,
    /// P(+a;+b) of the undepleted composition; constant in infinite mode.
    pub infinite_probability: f64,
    pub per_seed: Vec<SeedDivergence>,
    pub mean_max_deviation: f64,
}

pub fn finite_vs_infinite_divergence(bag: &PopulationTable, n: u64, seeds: &[u64]) -> Result<DivergenceReport> {
    finite_vs_infinite_divergence_with(bag, n, seeds, Exec::default())
}

/// For each seed, draws `n` pairs without replacement and tracks how far the
/// pre-draw P(+a;+b) of the depleted bag strays from the infinite value.
pub fn finite_vs_infinite_divergence_with(
    bag: &PopulationTable,
    n: u64,
    seeds: &[u64],
    exec: Exec,
) -> Result<DivergenceReport> {
    let total = ReservoirSpec::finite(*bag, 0).validate()?;
    if n == 0 {
        return Err(Error::ZeroSamples);
    }
    if n > total {
        return Err(Error::Overdraw {
            requested: n,
            available: total,
        });
    }
    let set = outcome_populations(OUTCOME_AB);
    let infinite = bag.sum_over(set)? as f64 / total as f64;
    let per_seed = exec.map_slice(seeds, |&seed| {
        let seq = DrawSequence {
            mode: ReservoirMode::Finite,
            initial: *bag,
            draws: drain(*bag, total, n, seed),
        };
        let mut best = SeedDivergence {
            seed,
            max_deviation: -1.0,
            step: 0,
        };
        for (k, before) in seq.pre_draw_states().enumerate() {
            // Both sums are bounded by the validated total.
            let left = before.total().unwrap_or(0);
            let p = before.sum_over(set).unwrap_or(0) as f64 / left as f64;
            let dev = (p - infinite).abs();
            if dev > best.max_deviation {
                best.max_deviation = dev;
                best.step = k as u64 + 1;
            }
        }
        best
    });
    let mean_max_deviation = if per_seed.is_empty() {
        0.0
    } else {
        per_seed.iter().map(|s| s.max_deviation).sum::<f64>() / per_seed.len() as f64
    };
    Ok(DivergenceReport {
        draws: n,
        infinite_probability: infinite,
        per_seed,
        mean_max_deviation,
    })
}

/// How often each population appeared at each draw position across an
/// ensemble of full drains.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PositionMarginals {
    pub bag: PopulationTable,
    pub runs: u64,
    /// `counts[k][i]`: runs whose draw `k + 1` was population `i + 1`.
    pub counts: Vec<[u64; 8]>,
}

impl PositionMarginals {
    pub fn proportion(&self, step: usize, p: Population) -> Proportion {
        Proportion::new(self.counts[step - 1][p.index() - 1], self.runs)
    }
}

/// Drains `bag` once per seed and tallies draw positions.
pub fn position_marginals(bag: &PopulationTable, seeds: &[u64], exec: Exec) -> Result<PositionMarginals> {
    let total = ReservoirSpec::finite(*bag, 0).validate()?;
    let runs = exec.map_slice(seeds, |&seed| drain(*bag, total, total, seed));
    let mut counts = vec![[0u64; 8]; total as usize];
    for run in &runs {
        for (k, p) in run.iter().enumerate() {
            counts[k][p.index() - 1] += 1;
        }
    }
    Ok(PositionMarginals {
        bag: *bag,
        runs: seeds.len() as u64,
        counts,
    })
}

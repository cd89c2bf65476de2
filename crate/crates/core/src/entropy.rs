//! Multiplicities, Boltzmann entropy and the multiplicity forms of the
//! inequality.
//!
//! Entropy is `S = k ln(Omega)`, so multiplying multiplicities adds
//! entropies. Joint multiplicities of two or more populations are products.
//! The three multiplicity-level statements checked here are
//!
//! ```text
//! sum form:      Omega_3 Omega_4 <= Omega_2 Omega_4 + Omega_3 Omega_7
//! product form:  Omega_3 Omega_4 <= Omega_2 Omega_4 Omega_3 Omega_7
//! entropy form:  S_3 + S_4       <= S_2 + S_4 + S_3 + S_7
//! ```
//!
//! The sum form needs roughly equal multiplicities; the product and entropy
//! forms are equivalent to each other and reduce to `Omega_2 Omega_7 >= 1`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::model::{
    outcome_populations, ExactProbability, InequalityForm, InequalityReport, InequalityTerm, PairOutcome, Population,
    PopulationSet, PopulationTable, Side, Sign, OUTCOME_AB, OUTCOME_AC, OUTCOME_CB,
};
use crate::rng::stream_rng;

/// Natural units.
pub const K_NATURAL: f64 = 1.0;
/// Boltzmann's constant in J/K.
pub const K_SI: f64 = 1.380649e-23;

const ADDITIVITY_TOL: f64 = 1e-9;

/// Number of microstates of a macrostate. Always positive and finite.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Multiplicity(f64);

impl Multiplicity {
    pub fn new(omega: f64) -> Result<Self> {
        if omega > 0.0 && omega.is_finite() {
            Ok(Multiplicity(omega))
        } else {
            Err(Error::NonPositiveMultiplicity(omega))
        }
    }

    /// From an enumerated microstate count.
    pub fn from_count(count: u64) -> Result<Self> {
        Multiplicity::new(count as f64)
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for Multiplicity {
    type Error = Error;

    fn try_from(v: f64) -> Result<Self> {
        Multiplicity::new(v)
    }
}

impl From<Multiplicity> for f64 {
    fn from(m: Multiplicity) -> f64 {
        m.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Entropy {
    pub s: f64,
    pub k: f64,
}

impl Entropy {
    /// Inverts `S = k ln(Omega)`.
    pub fn multiplicity(&self) -> Result<Multiplicity> {
        Multiplicity::new((self.s / self.k).exp())
    }
}

pub fn entropy_from_multiplicity(m: Multiplicity, k: f64) -> Entropy {
    Entropy { s: k * m.0.ln(), k }
}

pub fn multiplicity_from_entropy(e: Entropy) -> Result<Multiplicity> {
    e.multiplicity()
}

/// `-k sum p ln p`, with `0 ln 0 = 0`.
pub fn gibbs_entropy(p: &[f64], k: f64) -> Result<Entropy> {
    if let Some(&bad) = p.iter().find(|x| !(0.0..=1.0).contains(*x)) {
        return Err(Error::ProbabilityRange(bad));
    }
    let sum: f64 = p.iter().sum();
    if (sum - 1.0).abs() > 1e-12 {
        return Err(Error::NotNormalized(sum));
    }
    let s = -k * p.iter().filter(|&&x| x > 0.0).map(|&x| x * x.ln()).sum::<f64>();
    Ok(Entropy { s, k })
}

/// Multiplicity of two independent systems taken together.
pub fn combine(a: Multiplicity, b: Multiplicity) -> Multiplicity {
    let ab = Multiplicity(a.0 * b.0);
    debug_assert!(
        (ab.0.ln() - (a.0.ln() + b.0.ln())).abs() <= ADDITIVITY_TOL * (1.0 + ab.0.ln().abs()),
        "entropy additivity"
    );
    ab
}

/// Ordered (red, black) die pairs summing to `total`.
pub fn dice_multiplicity(total: u32) -> Result<Multiplicity> {
    if !(2..=12).contains(&total) {
        return Err(Error::DiceTotal(total));
    }
    let ways = (1..=6u32)
        .flat_map(|red| (1..=6u32).map(move |black| red + black))
        .filter(|&s| s == total)
        .count();
    Multiplicity::from_count(ways as u64)
}

pub fn dice_probability(total: u32) -> Result<ExactProbability> {
    let m = dice_multiplicity(total)?;
    ExactProbability::new(m.0 as u64, 36)
}

/// How multiplicities are derived from a population table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MultiplicityPolicy {
    /// Every population gets multiplicity 1.
    #[default]
    Equal,
    /// `Omega_i = N_i`; every count must be positive.
    #[serde(alias = "proportional-to-counts")]
    Proportional,
}

/// Positive multiplicities Omega_1..Omega_8 in population order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 8]", into = "[f64; 8]")]
pub struct MultiplicityVector([f64; 8]);

impl MultiplicityVector {
    pub fn new(omegas: [f64; 8]) -> Result<Self> {
        for w in omegas {
            Multiplicity::new(w)?;
        }
        Ok(MultiplicityVector(omegas))
    }

    pub fn equal(w: f64) -> Result<Self> {
        MultiplicityVector::new([w; 8])
    }

    pub fn from_table(table: &PopulationTable, policy: MultiplicityPolicy) -> Result<Self> {
        match policy {
            MultiplicityPolicy::Equal => MultiplicityVector::equal(1.0),
            MultiplicityPolicy::Proportional => MultiplicityVector::new(table.counts().map(|c| c as f64)),
        }
    }

    pub fn omegas(&self) -> [f64; 8] {
        self.0
    }

    pub fn get(&self, p: Population) -> f64 {
        self.0[p.index() - 1]
    }

    fn at(&self, index: usize) -> f64 {
        self.0[index - 1]
    }

    /// `max / min` over the eight entries.
    pub fn spread(&self) -> f64 {
        let max = self.0.iter().cloned().fold(f64::MIN, f64::max);
        let min = self.0.iter().cloned().fold(f64::MAX, f64::min);
        max / min
    }

    /// The "roughly equal" precondition: `max / min <= 1 + epsilon`.
    pub fn is_roughly_equal(&self, epsilon: f64) -> bool {
        self.spread() <= 1.0 + epsilon
    }
}

impl TryFrom<[f64; 8]> for MultiplicityVector {
    type Error = Error;

    fn try_from(v: [f64; 8]) -> Result<Self> {
        MultiplicityVector::new(v)
    }
}

impl From<MultiplicityVector> for [f64; 8] {
    fn from(v: MultiplicityVector) -> [f64; 8] {
        v.0
    }
}

pub fn joint_multiplicity(v: &MultiplicityVector, i: usize, j: usize) -> Result<Multiplicity> {
    let (pi, pj) = (Population::new(i)?, Population::new(j)?);
    Ok(combine(Multiplicity(v.get(pi)), Multiplicity(v.get(pj))))
}

/// Product of the multiplicities in `set`; an empty (inaccessible) class
/// has multiplicity 0.
pub fn class_multiplicity(v: &MultiplicityVector, set: PopulationSet) -> f64 {
    if set.is_empty() {
        0.0
    } else {
        set.iter().map(|p| v.get(p)).product()
    }
}

/// Denominator used by [`multiplicity_probability`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    /// Sum of the joint multiplicities of the four sign outcomes on the
    /// same axis pair. The four probabilities then add to 1.
    #[default]
    OutcomeClasses,
    /// Literal `sum_n Omega_n` over the eight populations. Not a
    /// distribution in general.
    RawSum,
}

/// Joint multiplicity of the outcome's populations over the total
/// multiplicity.
pub fn multiplicity_probability(v: &MultiplicityVector, o: PairOutcome, norm: Normalization) -> Result<f64> {
    let numerator = class_multiplicity(v, outcome_populations(o));
    let total = match norm {
        Normalization::OutcomeClasses => Sign::ALL
            .into_iter()
            .flat_map(|sa| Sign::ALL.map(move |sb| PairOutcome::new(o.alice_axis, sa, o.bob_axis, sb)))
            .map(|c| class_multiplicity(v, outcome_populations(c)))
            .sum::<f64>(),
        Normalization::RawSum => v.0.iter().sum(),
    };
    if total <= 0.0 {
        return Err(Error::ZeroTotal);
    }
    Ok(numerator / total)
}

fn set_of(indices: &[usize]) -> PopulationSet {
    indices.iter().map(|&i| Population::ALL[i - 1]).collect()
}

fn product_term(side: Side, v: &MultiplicityVector, outcome: Option<PairOutcome>, indices: &[usize]) -> InequalityTerm {
    let populations = set_of(indices);
    InequalityTerm {
        side,
        outcome,
        populations,
        value: indices.iter().map(|&i| v.at(i)).product(),
    }
}

/// `Omega_3 Omega_4 <= Omega_2 Omega_4 + Omega_3 Omega_7`, flagging whether
/// the vector met the equal-multiplicity precondition at `epsilon`.
pub fn multiplicity_inequality(v: &MultiplicityVector, epsilon: f64) -> InequalityReport {
    let terms = vec![
        product_term(Side::Lhs, v, Some(OUTCOME_AB), &[3, 4]),
        product_term(Side::Rhs, v, Some(OUTCOME_AC), &[2, 4]),
        product_term(Side::Rhs, v, Some(OUTCOME_CB), &[3, 7]),
    ];
    let lhs = terms[0].value;
    let rhs = terms[1].value + terms[2].value;
    let mut r = InequalityReport::from_sides(InequalityForm::MultiplicitySum, lhs, rhs, terms);
    r.holds = r.margin >= -crate::model::TOLERANCE * lhs.max(rhs);
    r.equal_multiplicity = Some(v.is_roughly_equal(epsilon));
    r
}

/// `Omega_3 Omega_4 <= Omega_2 Omega_4 Omega_3 Omega_7`.
pub fn product_inequality(v: &MultiplicityVector) -> InequalityReport {
    let terms = vec![
        product_term(Side::Lhs, v, Some(OUTCOME_AB), &[3, 4]),
        product_term(Side::Rhs, v, None, &[2, 4, 3, 7]),
    ];
    let (lhs, rhs) = (terms[0].value, terms[1].value);
    let mut r = InequalityReport::from_sides(InequalityForm::MultiplicityProduct, lhs, rhs, terms);
    // Products span many decades, so the slack scales with them.
    r.holds = r.margin >= -crate::model::TOLERANCE * lhs.max(rhs);
    r.reduced_margin = Some(v.at(2) * v.at(7) - 1.0);
    r
}

/// `S_3 + S_4 <= S_2 + S_4 + S_3 + S_7`, checked term by term as written.
/// `reduced_margin` carries `S_2 + S_7`.
pub fn entropy_inequality(v: &MultiplicityVector, k: f64) -> InequalityReport {
    let s = |i: usize| k * v.at(i).ln();
    let entropy_term = |side, indices: &[usize]| InequalityTerm {
        side,
        outcome: None,
        populations: set_of(indices),
        value: indices.iter().map(|&i| s(i)).sum(),
    };
    let terms = vec![entropy_term(Side::Lhs, &[3, 4]), entropy_term(Side::Rhs, &[2, 4, 3, 7])];
    let (lhs, rhs) = (terms[0].value, terms[1].value);
    let mut r = InequalityReport::from_sides(InequalityForm::EntropySum, lhs, rhs, terms);
    // Entropies carry the unit of k, so the slack does too.
    r.holds = r.margin >= -crate::model::TOLERANCE * k;
    r.reduced_margin = Some(s(2) + s(7));
    r
}

/// `S_i / sum_j S_j`. A diagnostic only: these ratios are not
/// probabilities. `None` when the entropies sum to zero.
pub fn entropy_ratios(v: &MultiplicityVector, k: f64) -> Option<[f64; 8]> {
    let s = v.0.map(|w| k * w.ln());
    let total: f64 = s.iter().sum();
    (total != 0.0).then(|| s.map(|x| x / total))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SearchSpace {
    /// Each entry independently log-uniform on [1/100, 100].
    #[default]
    Positive,
    /// A single log-uniform value repeated eight times.
    Equal,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Counterexample {
    /// Zero-based attempt index that produced the vector.
    pub attempt: u64,
    pub vector: MultiplicityVector,
}

fn log_uniform<R: Rng>(rng: &mut R) -> f64 {
    let span = 100f64.ln();
    rng.random_range(-span..=span).exp()
}

/// Random search for a vector violating the sum form. Attempt `i` draws from
/// stream `i` of `seed`; the lowest violating attempt is returned.
pub fn find_multiplicity_counterexample(
    budget: u64,
    seed: u64,
    space: SearchSpace,
    exec: Exec,
) -> Result<Option<Counterexample>> {
    if budget == 0 {
        return Err(Error::ZeroBudget);
    }
    Ok(exec.find_first(budget, |attempt| {
        let mut rng = stream_rng(seed, attempt);
        let omegas = match space {
            SearchSpace::Positive => std::array::from_fn(|_| log_uniform(&mut rng)),
            SearchSpace::Equal => [log_uniform(&mut rng); 8],
        };
        let vector = MultiplicityVector(omegas);
        multiplicity_inequality(&vector, 0.0)
            .violated()
            .then_some(Counterexample { attempt, vector })
    }))
}

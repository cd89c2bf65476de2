//! The eight-population model.
//!
//! A source emits anticorrelated spin pairs. Each pair carries a definite
//! sign along each of the three axes a, b, c for particle 1, and the
//! opposite signs for particle 2. Alice measures particle 1 and Bob measures
//! particle 2, each along one axis. The eight possible particle-1 sign
//! triples define the populations N_1..N_8, in the row order of [`TABLE`].

use std::fmt;
use std::ops::Neg;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::rng::stream_rng;

/// Slack for every floating-point inequality comparison.
pub const TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AxisLabel {
    A,
    B,
    C,
}

impl AxisLabel {
    pub const ALL: [AxisLabel; 3] = [AxisLabel::A, AxisLabel::B, AxisLabel::C];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn as_char(self) -> char {
        match self {
            AxisLabel::A => 'a',
            AxisLabel::B => 'b',
            AxisLabel::C => 'c',
        }
    }
}

impl fmt::Display for AxisLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Sign {
    pub const ALL: [Sign; 2] = [Sign::Plus, Sign::Minus];

    pub fn value(self) -> i8 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }
}

impl Neg for Sign {
    type Output = Sign;

    fn neg(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        })
    }
}

/// A labelled measurement direction with unit norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    label: AxisLabel,
    direction: [f64; 3],
}

impl Axis {
    pub fn new(label: AxisLabel, direction: [f64; 3]) -> Result<Self> {
        let norm = direction.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !norm.is_finite() || (norm - 1.0).abs() > TOLERANCE {
            return Err(Error::NonUnitAxis {
                label: label.as_char(),
                norm,
            });
        }
        Ok(Axis { label, direction })
    }

    /// Axis in the x-y plane at `angle` radians from the x axis.
    pub fn in_plane(label: AxisLabel, angle: f64) -> Self {
        Axis {
            label,
            direction: [angle.cos(), angle.sin(), 0.0],
        }
    }

    pub fn label(&self) -> AxisLabel {
        self.label
    }

    pub fn direction(&self) -> [f64; 3] {
        self.direction
    }

    /// Angle between the two directions, in [0, pi].
    pub fn angle_to(&self, other: &Axis) -> f64 {
        let [ax, ay, az] = self.direction;
        let [bx, by, bz] = other.direction;
        let dot = ax * bx + ay * by + az * bz;
        let cross = [ay * bz - az * by, az * bx - ax * bz, ax * by - ay * bx];
        let sin = cross.iter().map(|x| x * x).sum::<f64>().sqrt();
        // atan2 stays accurate near 0 and pi where acos(dot) does not.
        sin.atan2(dot)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisTriple {
    a: Axis,
    b: Axis,
    c: Axis,
}

impl AxisTriple {
    pub fn new(a: Axis, b: Axis, c: Axis) -> Result<Self> {
        if a.label != AxisLabel::A || b.label != AxisLabel::B || c.label != AxisLabel::C {
            return Err(Error::AxisLabels);
        }
        Ok(AxisTriple { a, b, c })
    }

    /// Coplanar axes with c at `spacing` from a and b at `spacing` from c,
    /// so the a-b opening is `2 * spacing` (folded into [0, pi]).
    pub fn coplanar(spacing: f64) -> Self {
        AxisTriple {
            a: Axis::in_plane(AxisLabel::A, 0.0),
            b: Axis::in_plane(AxisLabel::B, 2.0 * spacing),
            c: Axis::in_plane(AxisLabel::C, spacing),
        }
    }

    pub fn axis(&self, label: AxisLabel) -> &Axis {
        match label {
            AxisLabel::A => &self.a,
            AxisLabel::B => &self.b,
            AxisLabel::C => &self.c,
        }
    }

    pub fn angle(&self, first: AxisLabel, second: AxisLabel) -> f64 {
        self.axis(first).angle_to(self.axis(second))
    }
}

/// Spin-component signs of one particle along a, b and c.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SignTriple {
    pub a: Sign,
    pub b: Sign,
    pub c: Sign,
}

impl SignTriple {
    pub const fn new(a: Sign, b: Sign, c: Sign) -> Self {
        SignTriple { a, b, c }
    }

    pub fn get(&self, label: AxisLabel) -> Sign {
        match label {
            AxisLabel::A => self.a,
            AxisLabel::B => self.b,
            AxisLabel::C => self.c,
        }
    }
}

impl Neg for SignTriple {
    type Output = SignTriple;

    fn neg(self) -> SignTriple {
        SignTriple::new(-self.a, -self.b, -self.c)
    }
}

impl fmt::Display for SignTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}a,{}b,{}c)", self.a, self.b, self.c)
    }
}

use Sign::{Minus as M, Plus as P};

/// Particle-1 sign triples of populations N_1..N_8. Particle 2 carries the
/// negation of each row.
pub const TABLE: [SignTriple; 8] = [
    SignTriple::new(P, P, P),
    SignTriple::new(P, P, M),
    SignTriple::new(P, M, P),
    SignTriple::new(P, M, M),
    SignTriple::new(M, P, P),
    SignTriple::new(M, P, M),
    SignTriple::new(M, M, P),
    SignTriple::new(M, M, M),
];

/// One of the eight populations, numbered 1..=8.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "usize", into = "usize")]
pub struct Population(u8);

impl Population {
    pub const ALL: [Population; 8] = [
        Population(1),
        Population(2),
        Population(3),
        Population(4),
        Population(5),
        Population(6),
        Population(7),
        Population(8),
    ];

    pub fn new(index: usize) -> Result<Self> {
        if (1..=8).contains(&index) {
            Ok(Population(index as u8))
        } else {
            Err(Error::PopulationIndex(index))
        }
    }

    /// One-based population number.
    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub(crate) fn slot(self) -> usize {
        self.0 as usize - 1
    }

    pub fn particle1(self) -> SignTriple {
        TABLE[self.slot()]
    }

    pub fn particle2(self) -> SignTriple {
        -TABLE[self.slot()]
    }
}

impl TryFrom<usize> for Population {
    type Error = Error;

    fn try_from(value: usize) -> Result<Self> {
        Population::new(value)
    }
}

impl From<Population> for usize {
    fn from(p: Population) -> usize {
        p.index()
    }
}

impl fmt::Display for Population {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "N_{}", self.0)
    }
}

/// Returns the particle-1 and particle-2 sign triples of row `index`.
pub fn table_row(index: usize) -> Result<(SignTriple, SignTriple)> {
    let p = Population::new(index)?;
    Ok((p.particle1(), p.particle2()))
}

/// Small set of populations stored as a bit mask.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct PopulationSet(u8);

impl PopulationSet {
    pub const EMPTY: PopulationSet = PopulationSet(0);
    pub const FULL: PopulationSet = PopulationSet(0xff);

    pub fn insert(&mut self, p: Population) {
        self.0 |= 1 << p.slot();
    }

    pub fn contains(&self, p: Population) -> bool {
        self.0 & (1 << p.slot()) != 0
    }

    pub fn len(&self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.0 == 0
    }

    pub fn union(self, other: PopulationSet) -> PopulationSet {
        PopulationSet(self.0 | other.0)
    }

    pub fn complement(self) -> PopulationSet {
        PopulationSet(!self.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = Population> + '_ {
        Population::ALL.into_iter().filter(|p| self.contains(*p))
    }

    pub fn indices(&self) -> Vec<usize> {
        self.iter().map(Population::index).collect()
    }
}

impl FromIterator<Population> for PopulationSet {
    fn from_iter<I: IntoIterator<Item = Population>>(iter: I) -> Self {
        let mut set = PopulationSet::EMPTY;
        for p in iter {
            set.insert(p);
        }
        set
    }
}

impl TryFrom<Vec<usize>> for PopulationSet {
    type Error = Error;

    fn try_from(v: Vec<usize>) -> Result<Self> {
        v.into_iter().map(Population::new).collect()
    }
}

impl From<PopulationSet> for Vec<usize> {
    fn from(s: PopulationSet) -> Vec<usize> {
        s.indices()
    }
}

/// Nonnegative pair counts N_1..N_8.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PopulationTable {
    counts: [u64; 8],
}

impl PopulationTable {
    pub fn new(counts: [u64; 8]) -> Self {
        PopulationTable { counts }
    }

    pub fn uniform(count: u64) -> Self {
        PopulationTable { counts: [count; 8] }
    }

    pub fn counts(&self) -> [u64; 8] {
        self.counts
    }

    pub fn count(&self, p: Population) -> u64 {
        self.counts[p.slot()]
    }

    pub(crate) fn count_mut(&mut self, p: Population) -> &mut u64 {
        &mut self.counts[p.slot()]
    }

    pub fn total(&self) -> Result<u64> {
        self.counts
            .iter()
            .try_fold(0u64, |acc, &n| acc.checked_add(n))
            .ok_or(Error::CountOverflow)
    }

    /// Sum of the counts in `set`. Never overflows when [`Self::total`] does not.
    pub fn sum_over(&self, set: PopulationSet) -> Result<u64> {
        set.iter()
            .try_fold(0u64, |acc, p| acc.checked_add(self.count(p)))
            .ok_or(Error::CountOverflow)
    }

    pub fn scaled(&self, factor: u64) -> Result<Self> {
        let mut counts = self.counts;
        for c in counts.iter_mut() {
            *c = c.checked_mul(factor).ok_or(Error::CountOverflow)?;
        }
        Ok(PopulationTable { counts })
    }
}

/// Joint result: Alice's axis and sign on particle 1, Bob's on particle 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PairOutcome {
    pub alice_axis: AxisLabel,
    pub alice_sign: Sign,
    pub bob_axis: AxisLabel,
    pub bob_sign: Sign,
}

impl PairOutcome {
    pub const fn new(alice_axis: AxisLabel, alice_sign: Sign, bob_axis: AxisLabel, bob_sign: Sign) -> Self {
        PairOutcome {
            alice_axis,
            alice_sign,
            bob_axis,
            bob_sign,
        }
    }

    /// Both observers record `+` on their respective axes.
    pub const fn plus(alice_axis: AxisLabel, bob_axis: AxisLabel) -> Self {
        PairOutcome::new(alice_axis, Sign::Plus, bob_axis, Sign::Plus)
    }

    pub fn flipped(self) -> Self {
        PairOutcome {
            alice_sign: -self.alice_sign,
            bob_sign: -self.bob_sign,
            ..self
        }
    }
}

impl fmt::Display for PairOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({}{};{}{})",
            self.alice_sign, self.alice_axis, self.bob_sign, self.bob_axis
        )
    }
}

/// P(+a;+b), the left-hand side of the inequality.
pub const OUTCOME_AB: PairOutcome = PairOutcome::plus(AxisLabel::A, AxisLabel::B);
/// P(+a;+c).
pub const OUTCOME_AC: PairOutcome = PairOutcome::plus(AxisLabel::A, AxisLabel::C);
/// P(+c;+b).
pub const OUTCOME_CB: PairOutcome = PairOutcome::plus(AxisLabel::C, AxisLabel::B);

/// Populations whose particle 1 shows Alice's sign on Alice's axis and whose
/// particle 2 shows Bob's sign on Bob's axis.
pub fn outcome_populations(o: PairOutcome) -> PopulationSet {
    Population::ALL
        .into_iter()
        .filter(|p| p.particle1().get(o.alice_axis) == o.alice_sign && p.particle2().get(o.bob_axis) == o.bob_sign)
        .collect()
}

/// A count ratio kept as integers; the float is derived only on output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ExactProbability {
    pub numerator: u64,
    pub denominator: u64,
}

impl ExactProbability {
    pub fn new(numerator: u64, denominator: u64) -> Result<Self> {
        if denominator == 0 {
            return Err(Error::EmptyTable);
        }
        if numerator > denominator {
            return Err(Error::ProbabilityRange(numerator as f64 / denominator as f64));
        }
        Ok(ExactProbability { numerator, denominator })
    }

    pub fn value(&self) -> f64 {
        self.numerator as f64 / self.denominator as f64
    }

    pub fn reduced(&self) -> Self {
        let g = gcd(self.numerator, self.denominator);
        ExactProbability {
            numerator: self.numerator / g,
            denominator: self.denominator / g,
        }
    }

    /// Compares two ratios without rounding.
    pub fn le(&self, other: &ExactProbability) -> bool {
        (self.numerator as u128) * (other.denominator as u128) <= (other.numerator as u128) * (self.denominator as u128)
    }
}

impl fmt::Display for ExactProbability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numerator, self.denominator)
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.max(1)
}

pub fn exact_probability(table: &PopulationTable, o: PairOutcome) -> Result<ExactProbability> {
    let total = table.total()?;
    if total == 0 {
        return Err(Error::EmptyTable);
    }
    ExactProbability::new(table.sum_over(outcome_populations(o))?, total)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Lhs,
    Rhs,
}

/// Which variant of the inequality a report describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InequalityForm {
    /// P(+a;+b) <= P(+a;+c) + P(+c;+b) from population counts.
    CountProbability,
    /// The same inequality on externally supplied probabilities.
    SuppliedProbability,
    /// Omega_3 Omega_4 <= Omega_2 Omega_4 + Omega_3 Omega_7.
    MultiplicitySum,
    /// Omega_3 Omega_4 <= Omega_2 Omega_4 Omega_3 Omega_7.
    MultiplicityProduct,
    /// S_3 + S_4 <= S_2 + S_4 + S_3 + S_7.
    EntropySum,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityTerm {
    pub side: Side,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub outcome: Option<PairOutcome>,
    pub populations: PopulationSet,
    pub value: f64,
}

/// Numerators of both sides over the common table total.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExactSides {
    pub lhs: ExactProbability,
    pub rhs: ExactProbability,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub form: InequalityForm,
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs - lhs`.
    pub margin: f64,
    pub holds: bool,
    pub terms: Vec<InequalityTerm>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub exact: Option<ExactSides>,
    /// Whether max/min multiplicity stayed within `1 + epsilon`.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub equal_multiplicity: Option<bool>,
    /// Margin after cancelling terms common to both sides.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub reduced_margin: Option<f64>,
}

impl InequalityReport {
    pub(crate) fn from_sides(form: InequalityForm, lhs: f64, rhs: f64, terms: Vec<InequalityTerm>) -> Self {
        let margin = rhs - lhs;
        InequalityReport {
            form,
            lhs,
            rhs,
            margin,
            holds: margin >= -TOLERANCE,
            terms,
            exact: None,
            equal_multiplicity: None,
            reduced_margin: None,
        }
    }

    pub fn violated(&self) -> bool {
        !self.holds
    }
}

fn outcome_term(side: Side, o: PairOutcome, value: f64) -> InequalityTerm {
    InequalityTerm {
        side,
        outcome: Some(o),
        populations: outcome_populations(o),
        value,
    }
}

/// Checks P(+a;+b) <= P(+a;+c) + P(+c;+b) on a population table.
///
/// The verdict comes from integer numerators, so it is exact. In count form
/// the margin is (N_2 + N_7) / total, which is never negative.
pub fn wigner_check(table: &PopulationTable) -> Result<InequalityReport> {
    let ab = exact_probability(table, OUTCOME_AB)?;
    let ac = exact_probability(table, OUTCOME_AC)?;
    let cb = exact_probability(table, OUTCOME_CB)?;
    let total = ab.denominator;
    let rhs_num = ac.numerator.checked_add(cb.numerator).ok_or(Error::CountOverflow)?;
    let terms = vec![
        outcome_term(Side::Lhs, OUTCOME_AB, ab.value()),
        outcome_term(Side::Rhs, OUTCOME_AC, ac.value()),
        outcome_term(Side::Rhs, OUTCOME_CB, cb.value()),
    ];
    let rhs = rhs_num as f64 / total as f64;
    let mut report = InequalityReport::from_sides(InequalityForm::CountProbability, ab.value(), rhs, terms);
    // rhs may exceed 1, so it is not an ExactProbability in the strict sense.
    let rhs_exact = ExactProbability {
        numerator: rhs_num,
        denominator: total,
    };
    report.holds = ab.numerator <= rhs_num;
    report.exact = Some(ExactSides {
        lhs: ab,
        rhs: rhs_exact,
    });
    Ok(report)
}

/// Checks the inequality on supplied probabilities, e.g. quantum predictions.
pub fn wigner_check_probabilities(p_ab: f64, p_ac: f64, p_cb: f64) -> Result<InequalityReport> {
    for p in [p_ab, p_ac, p_cb] {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::ProbabilityRange(p));
        }
    }
    let terms = vec![
        outcome_term(Side::Lhs, OUTCOME_AB, p_ab),
        outcome_term(Side::Rhs, OUTCOME_AC, p_ac),
        outcome_term(Side::Rhs, OUTCOME_CB, p_cb),
    ];
    Ok(InequalityReport::from_sides(
        InequalityForm::SuppliedProbability,
        p_ab,
        p_ac + p_cb,
        terms,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FuzzSummary {
    pub cases: u64,
    pub failures: u64,
    pub min_margin: f64,
}

/// Runs [`wigner_check`] on `cases` random tables with counts uniform in
/// `0..=max_count`. Case `i` draws from stream `i` of `seed`; tables that
/// come out all-zero are replaced by a single pair in population 1.
pub fn fuzz_wigner(cases: u64, max_count: u64, seed: u64, exec: Exec) -> Result<FuzzSummary> {
    let margins = exec.map(cases, |i| {
        let mut rng = stream_rng(seed, i);
        let mut counts = [0u64; 8];
        for c in counts.iter_mut() {
            *c = rng.random_range(0..=max_count);
        }
        if counts.iter().all(|&c| c == 0) {
            counts[0] = 1;
        }
        wigner_check(&PopulationTable::new(counts)).map(|r| (r.holds, r.margin))
    });
    let mut failures = 0;
    let mut min_margin = f64::INFINITY;
    for m in margins {
        let (holds, margin) = m?;
        if !holds {
            failures += 1;
        }
        min_margin = min_margin.min(margin);
    }
    Ok(FuzzSummary {
        cases,
        failures,
        min_margin,
    })
}

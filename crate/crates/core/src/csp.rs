//! Constraint systems over a finite alphabet, assignments, reconfiguration
//! sequences, and their objective values.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::value::Value;

/// A symbol of a finite alphabet `{0, .., alphabet_size - 1}`.
pub type Symbol = u8;

/// One constraint: a scope of variable indices and a truth table over
/// `Σ^|scope|`. Table index treats the first scope variable as the most
/// significant digit in base `|Σ|`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Constraint {
    pub scope: Vec<usize>,
    #[serde(with = "bit_table")]
    pub table: Vec<bool>,
}

impl Constraint {
    pub fn table_index(&self, alphabet_size: usize, values: &[Symbol]) -> usize {
        self.scope
            .iter()
            .fold(0, |acc, &v| acc * alphabet_size + values[v] as usize)
    }

    pub fn is_satisfied(&self, alphabet_size: usize, values: &[Symbol]) -> bool {
        self.table[self.table_index(alphabet_size, values)]
    }
}

mod bit_table {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(t: &[bool], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(t.iter().map(|&b| b as u8))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<bool>, D::Error> {
        let raw = Vec::<u8>::deserialize(d)?;
        raw.into_iter()
            .map(|b| match b {
                0 => Ok(false),
                1 => Ok(true),
                _ => Err(serde::de::Error::custom("table entries must be 0 or 1")),
            })
            .collect()
    }
}

/// A q-ary constraint system `Ψ = (ψ_j)`. Duplicate constraints are allowed
/// and counted with multiplicity.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawSystem")]
pub struct ConstraintSystem {
    num_vars: usize,
    alphabet_size: usize,
    constraints: Vec<Constraint>,
}

#[derive(Deserialize)]
struct RawSystem {
    num_vars: usize,
    alphabet_size: usize,
    constraints: Vec<Constraint>,
}

impl TryFrom<RawSystem> for ConstraintSystem {
    type Error = Error;
    fn try_from(r: RawSystem) -> Result<Self> {
        ConstraintSystem::new(r.num_vars, r.alphabet_size, r.constraints)
    }
}

impl ConstraintSystem {
    pub fn new(num_vars: usize, alphabet_size: usize, constraints: Vec<Constraint>) -> Result<Self> {
        if !(2..=256).contains(&alphabet_size) {
            return Err(Error::InvalidInstance(format!(
                "alphabet size {alphabet_size} not in [2, 256]"
            )));
        }
        for (j, c) in constraints.iter().enumerate() {
            if let Some(&bad) = c.scope.iter().find(|&&v| v >= num_vars) {
                return Err(Error::InvalidInstance(format!(
                    "constraint {j} refers to variable {bad} but there are {num_vars}"
                )));
            }
            let expected = u32::try_from(c.scope.len())
                .ok()
                .and_then(|k| alphabet_size.checked_pow(k));
            if expected != Some(c.table.len()) {
                return Err(Error::InvalidInstance(format!(
                    "constraint {j} has {} table entries, expected {alphabet_size}^{}",
                    c.table.len(),
                    c.scope.len()
                )));
            }
        }
        Ok(ConstraintSystem { num_vars, alphabet_size, constraints })
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet_size
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    /// Largest scope length.
    pub fn arity(&self) -> usize {
        self.constraints.iter().map(|c| c.scope.len()).max().unwrap_or(0)
    }

    pub fn check_assignment(&self, a: &Assignment) -> Result<()> {
        if a.len() != self.num_vars {
            return Err(Error::InvalidAssignment(format!(
                "length {} but the system has {} variables",
                a.len(),
                self.num_vars
            )));
        }
        if let Some(&s) = a.values().iter().find(|&&s| s as usize >= self.alphabet_size) {
            return Err(Error::InvalidAssignment(format!(
                "symbol {s} outside alphabet of size {}",
                self.alphabet_size
            )));
        }
        Ok(())
    }

    /// Number of constraints satisfied by raw symbol values (unchecked).
    pub fn satisfied_count(&self, values: &[Symbol]) -> usize {
        self.constraints
            .iter()
            .filter(|c| c.is_satisfied(self.alphabet_size, values))
            .count()
    }

    fn ensure_nonempty(&self) -> Result<()> {
        if self.constraints.is_empty() {
            Err(Error::InvalidInstance("constraint system has no constraints".into()))
        } else {
            Ok(())
        }
    }

    /// `val_Ψ(σ)`: the fraction of constraints satisfied by `σ`.
    pub fn value_of(&self, a: &Assignment) -> Result<Value> {
        self.ensure_nonempty()?;
        self.check_assignment(a)?;
        Ok(Value::from_counts(
            self.satisfied_count(a.values()) as u128,
            self.constraints.len() as u128,
        ))
    }

    /// `val_Ψ(𝒮)`: the minimum value over the steps of a sequence.
    pub fn sequence_value(&self, seq: &ReconfigSequence<Assignment>) -> Result<Value> {
        self.ensure_nonempty()?;
        let mut worst: Option<Value> = None;
        for step in seq.steps() {
            let v = self.value_of(step)?;
            if worst.as_ref().is_none_or(|w| v < *w) {
                worst = Some(v);
            }
        }
        Ok(worst.expect("sequences are nonempty"))
    }

    /// True iff every constraint is satisfied.
    pub fn is_satisfied_by(&self, a: &Assignment) -> Result<bool> {
        self.check_assignment(a)?;
        Ok(self.satisfied_count(a.values()) == self.constraints.len())
    }
}

/// A full assignment `σ: N → Σ`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Assignment(Vec<Symbol>);

impl Assignment {
    pub fn new(values: Vec<Symbol>) -> Self {
        Assignment(values)
    }

    pub fn values(&self) -> &[Symbol] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_values(self) -> Vec<Symbol> {
        self.0
    }

    /// Parses a digit string such as `"100"` or `"1,0,0"`.
    pub fn parse_digits(s: &str) -> Result<Self> {
        s.chars()
            .filter(|c| *c != ',' && !c.is_whitespace())
            .map(|c| {
                c.to_digit(10)
                    .map(|d| d as Symbol)
                    .ok_or_else(|| Error::Parse(format!("not a digit: {c:?}")))
            })
            .collect::<Result<Vec<_>>>()
            .map(Assignment)
    }
}

impl std::fmt::Display for Assignment {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for s in &self.0 {
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

impl From<Vec<Symbol>> for Assignment {
    fn from(v: Vec<Symbol>) -> Self {
        Assignment(v)
    }
}

/// Anything that can appear as a step of a reconfiguration sequence: a
/// fixed-width string of symbols.
pub trait Word: Clone {
    fn symbols(&self) -> &[Symbol];

    fn width(&self) -> usize {
        self.symbols().len()
    }

    /// Number of positions where `self` and `other` differ.
    fn hamming(&self, other: &Self) -> usize {
        self.symbols()
            .iter()
            .zip(other.symbols())
            .filter(|(a, b)| a != b)
            .count()
    }
}

impl Word for Assignment {
    fn symbols(&self) -> &[Symbol] {
        &self.0
    }
}

/// A nonempty list of equal-width words where consecutive words differ in at
/// most one position.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct ReconfigSequence<W> {
    steps: Vec<W>,
}

impl<W: Word> ReconfigSequence<W> {
    pub fn new(steps: Vec<W>) -> Result<Self> {
        let first = steps
            .first()
            .ok_or_else(|| Error::InvalidSequence("empty sequence".into()))?;
        let width = first.width();
        for (t, w) in steps.iter().enumerate() {
            if w.width() != width {
                return Err(Error::InvalidSequence(format!(
                    "step {t} has width {} but step 0 has width {width}",
                    w.width()
                )));
            }
        }
        for (t, pair) in steps.windows(2).enumerate() {
            let d = pair[0].hamming(&pair[1]);
            if d > 1 {
                return Err(Error::InvalidSequence(format!(
                    "steps {t} and {} differ in {d} positions",
                    t + 1
                )));
            }
        }
        Ok(ReconfigSequence { steps })
    }

    pub fn singleton(w: W) -> Self {
        ReconfigSequence { steps: vec![w] }
    }

    pub fn steps(&self) -> &[W] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn first(&self) -> &W {
        &self.steps[0]
    }

    pub fn last(&self) -> &W {
        self.steps.last().expect("sequences are nonempty")
    }

    pub fn into_steps(self) -> Vec<W> {
        self.steps
    }

    pub fn reversed(&self) -> Self {
        let mut steps = self.steps.clone();
        steps.reverse();
        ReconfigSequence { steps }
    }

    /// Joins two sequences whose shared endpoint appears once.
    pub fn concat(&self, other: &Self) -> Result<Self>
    where
        W: PartialEq,
    {
        if self.last() != other.first() {
            return Err(Error::InvalidSequence("endpoints do not match".into()));
        }
        let mut steps = self.steps.clone();
        steps.extend_from_slice(&other.steps[1..]);
        Ok(ReconfigSequence { steps })
    }

    /// Appends copies of the final word until the sequence has `len` steps.
    pub fn pad_to(&mut self, len: usize) {
        let last = self.last().clone();
        while self.steps.len() < len {
            self.steps.push(last.clone());
        }
    }
}

/// A CNF formula with DIMACS-style literals: `+v` / `-v` for 1-based `v`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cnf {
    pub num_vars: usize,
    pub clauses: Vec<Vec<i64>>,
}

impl Cnf {
    /// Turns each clause into one constraint over its distinct variables.
    pub fn to_csp(&self) -> Result<ConstraintSystem> {
        let mut constraints = Vec::with_capacity(self.clauses.len());
        for (j, clause) in self.clauses.iter().enumerate() {
            if clause.is_empty() {
                return Err(Error::InvalidInstance(format!("clause {j} is empty")));
            }
            let mut scope: Vec<usize> = Vec::new();
            for &lit in clause {
                let v = lit.unsigned_abs() as usize;
                if lit == 0 || v > self.num_vars {
                    return Err(Error::InvalidInstance(format!(
                        "clause {j} has literal {lit} outside 1..={}",
                        self.num_vars
                    )));
                }
                if !scope.contains(&(v - 1)) {
                    scope.push(v - 1);
                }
            }
            let k = scope.len();
            let table = (0..1usize << k)
                .map(|idx| {
                    clause.iter().any(|&lit| {
                        let pos = scope.iter().position(|&s| s + 1 == lit.unsigned_abs() as usize).unwrap();
                        let bit = (idx >> (k - 1 - pos)) & 1 == 1;
                        bit == (lit > 0)
                    })
                })
                .collect();
            constraints.push(Constraint { scope, table });
        }
        ConstraintSystem::new(self.num_vars, 2, constraints)
    }
}

/// `cnf_to_csp`: one constraint per clause, counted with multiplicity.
pub fn cnf_to_csp(cnf: &Cnf) -> Result<ConstraintSystem> {
    cnf.to_csp()
}

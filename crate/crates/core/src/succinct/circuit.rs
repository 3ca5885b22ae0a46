use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::error::{ensure_cap, Error, Result};

/// One gate; operands refer to earlier gates by index.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Gate {
    Input(usize),
    Const(bool),
    Not(usize),
    And(usize, usize),
    Or(usize, usize),
    Xor(usize, usize),
}

#[derive(Serialize, Deserialize)]
struct RawGate {
    op: String,
    #[serde(default)]
    args: Vec<usize>,
}

impl From<&Gate> for RawGate {
    fn from(g: &Gate) -> Self {
        let (op, args) = match *g {
            Gate::Input(i) => ("INPUT", vec![i]),
            Gate::Const(b) => ("CONST", vec![b as usize]),
            Gate::Not(a) => ("NOT", vec![a]),
            Gate::And(a, b) => ("AND", vec![a, b]),
            Gate::Or(a, b) => ("OR", vec![a, b]),
            Gate::Xor(a, b) => ("XOR", vec![a, b]),
        };
        RawGate { op: op.into(), args }
    }
}

impl TryFrom<RawGate> for Gate {
    type Error = Error;
    fn try_from(r: RawGate) -> Result<Self> {
        let arity = |k: usize| -> Result<()> {
            if r.args.len() == k {
                Ok(())
            } else {
                Err(Error::Parse(format!("{} gate takes {k} arguments, got {}", r.op, r.args.len())))
            }
        };
        let a = &r.args;
        Ok(match r.op.to_ascii_uppercase().as_str() {
            "INPUT" => {
                arity(1)?;
                Gate::Input(a[0])
            }
            "CONST" => {
                arity(1)?;
                match a[0] {
                    0 => Gate::Const(false),
                    1 => Gate::Const(true),
                    v => return Err(Error::Parse(format!("CONST argument must be 0 or 1, got {v}"))),
                }
            }
            "NOT" => {
                arity(1)?;
                Gate::Not(a[0])
            }
            "AND" => {
                arity(2)?;
                Gate::And(a[0], a[1])
            }
            "OR" => {
                arity(2)?;
                Gate::Or(a[0], a[1])
            }
            "XOR" => {
                arity(2)?;
                Gate::Xor(a[0], a[1])
            }
            other => return Err(Error::Parse(format!("unknown gate op {other:?}"))),
        })
    }
}

#[derive(Serialize, Deserialize)]
struct RawCircuit {
    n: usize,
    gates: Vec<RawGate>,
    outputs: Vec<usize>,
}

/// A circuit `S: {0,1}^n → {0,1}^n` with topologically ordered gates,
/// promised to fix the all-ones string.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawCircuit", into = "RawCircuit")]
pub struct BoolCircuit {
    n: usize,
    gates: Vec<Gate>,
    outputs: Vec<usize>,
}

impl TryFrom<RawCircuit> for BoolCircuit {
    type Error = Error;
    fn try_from(r: RawCircuit) -> Result<Self> {
        let gates = r.gates.into_iter().map(Gate::try_from).collect::<Result<_>>()?;
        BoolCircuit::new(r.n, gates, r.outputs)
    }
}

impl From<BoolCircuit> for RawCircuit {
    fn from(c: BoolCircuit) -> Self {
        RawCircuit { n: c.n, gates: c.gates.iter().map(RawGate::from).collect(), outputs: c.outputs }
    }
}

impl BoolCircuit {
    /// Validates structure and the `S(1^n) = 1^n` promise.
    pub fn new(n: usize, gates: Vec<Gate>, outputs: Vec<usize>) -> Result<Self> {
        let c = BoolCircuit::unchecked_promise(n, gates, outputs)?;
        if !c.eval_bits(&vec![true; n]).iter().all(|&b| b) {
            return Err(Error::InvalidInstance("circuit does not map 1^n to 1^n".into()));
        }
        Ok(c)
    }

    /// Structural validation only; used for circuits that are intentionally
    /// outside the promise.
    pub fn unchecked_promise(n: usize, gates: Vec<Gate>, outputs: Vec<usize>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInstance("circuit width must be positive".into()));
        }
        for (k, g) in gates.iter().enumerate() {
            let ok = match *g {
                Gate::Input(i) => i < n,
                Gate::Const(_) => true,
                Gate::Not(a) => a < k,
                Gate::And(a, b) | Gate::Or(a, b) | Gate::Xor(a, b) => a < k && b < k,
            };
            if !ok {
                return Err(Error::InvalidInstance(format!(
                    "gate {k} refers to a later gate or a missing input"
                )));
            }
        }
        if outputs.len() != n {
            return Err(Error::InvalidInstance(format!("expected {n} outputs, got {}", outputs.len())));
        }
        if let Some(&o) = outputs.iter().find(|&&o| o >= gates.len()) {
            return Err(Error::InvalidInstance(format!("output refers to missing gate {o}")));
        }
        Ok(BoolCircuit { n, gates, outputs })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn outputs(&self) -> &[usize] {
        &self.outputs
    }

    pub fn eval_bits(&self, x: &[bool]) -> Vec<bool> {
        let mut v: Vec<bool> = Vec::with_capacity(self.gates.len());
        for g in &self.gates {
            let b = match *g {
                Gate::Input(i) => x[i],
                Gate::Const(b) => b,
                Gate::Not(a) => !v[a],
                Gate::And(a, b) => v[a] && v[b],
                Gate::Or(a, b) => v[a] || v[b],
                Gate::Xor(a, b) => v[a] ^ v[b],
            };
            v.push(b);
        }
        self.outputs.iter().map(|&o| v[o]).collect()
    }

    pub fn eval(&self, x: &BitString) -> Result<BitString> {
        if x.len() != self.n {
            return Err(Error::WidthMismatch { expected: self.n, actual: x.len() });
        }
        Ok(BitString::new(self.eval_bits(x.bits())))
    }

    /// Evaluation on lexicographic indices; requires `n ≤ 64`.
    pub fn eval_index(&self, x: u64) -> u64 {
        BitString::new(self.eval_bits(BitString::from_index(x, self.n).bits())).to_index()
    }

    /// `S(x)` for every `x`, indexed lexicographically.
    pub fn truth_table(&self, cap: u64) -> Result<Vec<u64>> {
        ensure_cap("circuit truth table 2^n", 1u128 << self.n.min(127), cap as u128)?;
        Ok((0..1u64 << self.n).map(|x| self.eval_index(x)).collect())
    }
}

/// Incremental construction of circuits.
#[derive(Clone, Debug)]
pub struct CircuitBuilder {
    n: usize,
    gates: Vec<Gate>,
}

impl CircuitBuilder {
    pub fn new(n: usize) -> Self {
        CircuitBuilder { n, gates: Vec::new() }
    }

    fn push(&mut self, g: Gate) -> usize {
        self.gates.push(g);
        self.gates.len() - 1
    }

    pub fn input(&mut self, i: usize) -> usize {
        self.push(Gate::Input(i))
    }

    pub fn inputs(&mut self) -> Vec<usize> {
        (0..self.n).map(|i| self.input(i)).collect()
    }

    pub fn constant(&mut self, b: bool) -> usize {
        self.push(Gate::Const(b))
    }

    pub fn not(&mut self, a: usize) -> usize {
        self.push(Gate::Not(a))
    }

    pub fn and(&mut self, a: usize, b: usize) -> usize {
        self.push(Gate::And(a, b))
    }

    pub fn or(&mut self, a: usize, b: usize) -> usize {
        self.push(Gate::Or(a, b))
    }

    pub fn xor(&mut self, a: usize, b: usize) -> usize {
        self.push(Gate::Xor(a, b))
    }

    pub fn and_all(&mut self, xs: &[usize]) -> usize {
        match xs.split_first() {
            None => self.constant(true),
            Some((&first, rest)) => rest.iter().fold(first, |acc, &x| self.and(acc, x)),
        }
    }

    pub fn or_all(&mut self, xs: &[usize]) -> usize {
        match xs.split_first() {
            None => self.constant(false),
            Some((&first, rest)) => rest.iter().fold(first, |acc, &x| self.or(acc, x)),
        }
    }

    /// `sel ? a : b`.
    pub fn mux(&mut self, sel: usize, a: usize, b: usize) -> usize {
        let ns = self.not(sel);
        let l = self.and(sel, a);
        let r = self.and(ns, b);
        self.or(l, r)
    }

    /// True iff the wires spell out `pattern`.
    pub fn equals_const(&mut self, wires: &[usize], pattern: &[bool]) -> usize {
        let lits: Vec<usize> = wires
            .iter()
            .zip(pattern)
            .map(|(&w, &p)| if p { w } else { self.not(w) })
            .collect();
        self.and_all(&lits)
    }

    pub fn build(self, outputs: Vec<usize>) -> Result<BoolCircuit> {
        BoolCircuit::new(self.n, self.gates, outputs)
    }

    pub fn build_unchecked(self, outputs: Vec<usize>) -> Result<BoolCircuit> {
        BoolCircuit::unchecked_promise(self.n, self.gates, outputs)
    }
}

/// Outcome of iterating `S` from `0^n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Reachability {
    pub reachable: bool,
    /// Smallest `m` with `S^m(0^n) = 1^n`.
    pub steps: Option<u64>,
}

pub const DEFAULT_ITERATION_CAP: u64 = 1 << 26;

/// Is `1^n` reachable from `0^n` in the functional graph of `S`?
pub fn decide_reachability(s: &BoolCircuit) -> Result<Reachability> {
    decide_reachability_capped(s, DEFAULT_ITERATION_CAP)
}

/// Floyd cycle detection over the orbit of `0^n`. The hare visits the orbit
/// in order, so its first hit on `1^n` gives the smallest `m`.
pub fn decide_reachability_capped(s: &BoolCircuit, cap: u64) -> Result<Reachability> {
    let n = s.n();
    let ones = BitString::ones(n);
    let mut hare = BitString::zeros(n);
    if hare == ones {
        return Ok(Reachability { reachable: true, steps: Some(0) });
    }
    let step = |x: &BitString| BitString::new(s.eval_bits(x.bits()));
    let mut tortoise = hare.clone();
    let mut m = 0u64;
    loop {
        for _ in 0..2 {
            hare = step(&hare);
            m += 1;
            if hare == ones {
                return Ok(Reachability { reachable: true, steps: Some(m) });
            }
            if m > cap {
                return Err(Error::capacity("circuit iterations", m as u128, cap as u128));
            }
        }
        tortoise = step(&tortoise);
        if tortoise == hare {
            return Ok(Reachability { reachable: false, steps: None });
        }
    }
}

/// The orbit `0^n, S(0^n), …, 1^n` when `1^n` is reachable.
pub fn reachability_path(s: &BoolCircuit) -> Result<Option<Vec<BitString>>> {
    let r = decide_reachability(s)?;
    Ok(r.steps.map(|m| {
        let mut path = vec![BitString::zeros(s.n())];
        for _ in 0..m {
            let next = s.eval(path.last().unwrap()).expect("width matches");
            path.push(next);
        }
        path
    }))
}

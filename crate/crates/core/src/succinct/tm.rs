//! Space-bounded deterministic Turing machines and the reduction to a
//! succinct graph whose reachability question encodes acceptance.
//!
//! Configuration layout, most significant first: the state as a one-hot
//! field of `|Q|` bits, the head position in `⌈log2 n⌉` bits, then `n` tape
//! cells of `⌈log2 |Γ|⌉` bits each. The circuit prefixes this with a 2-bit
//! tag, so its width is `2 + |Q| + ⌈log2 n⌉ + n·⌈log2 |Γ|⌉`.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::succinct::circuit::{BoolCircuit, CircuitBuilder};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Move {
    L,
    R,
    S,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transition {
    pub state: String,
    pub read: String,
    pub next: String,
    pub write: String,
    #[serde(rename = "move")]
    pub mv: Move,
}

/// A deterministic machine. Transitions must be defined for every
/// non-halting state and tape symbol; moving off either end of the tape
/// sends the machine to the reject state.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawTm", into = "RawTm")]
pub struct TmSpec {
    states: Vec<String>,
    alphabet: Vec<String>,
    blank: usize,
    start: usize,
    accept: usize,
    reject: usize,
    /// `delta[q][s] = (q', s', move)` for non-halting `q`.
    delta: Vec<Vec<Option<(usize, usize, Move)>>>,
}

#[derive(Serialize, Deserialize)]
struct RawTm {
    states: Vec<String>,
    alphabet: Vec<String>,
    blank: String,
    start: String,
    accept: String,
    reject: String,
    delta: Vec<Transition>,
}

impl TryFrom<RawTm> for TmSpec {
    type Error = Error;
    fn try_from(r: RawTm) -> Result<Self> {
        TmSpec::new(r.states, r.alphabet, &r.blank, &r.start, &r.accept, &r.reject, &r.delta)
    }
}

impl From<TmSpec> for RawTm {
    fn from(m: TmSpec) -> Self {
        let mut delta = Vec::new();
        for (q, row) in m.delta.iter().enumerate() {
            for (s, t) in row.iter().enumerate() {
                if let Some((nq, ns, mv)) = *t {
                    delta.push(Transition {
                        state: m.states[q].clone(),
                        read: m.alphabet[s].clone(),
                        next: m.states[nq].clone(),
                        write: m.alphabet[ns].clone(),
                        mv,
                    });
                }
            }
        }
        RawTm {
            blank: m.alphabet[m.blank].clone(),
            start: m.states[m.start].clone(),
            accept: m.states[m.accept].clone(),
            reject: m.states[m.reject].clone(),
            states: m.states,
            alphabet: m.alphabet,
            delta,
        }
    }
}

fn index_of(names: &[String], name: &str, what: &str) -> Result<usize> {
    names
        .iter()
        .position(|s| s == name)
        .ok_or_else(|| Error::InvalidInstance(format!("unknown {what} {name:?}")))
}

/// How a run within the space bound ends.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Accept,
    Reject,
    Loop,
}

/// A configuration: state, head position, tape contents.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Config {
    pub state: usize,
    pub head: usize,
    pub tape: Vec<usize>,
}

impl TmSpec {
    pub fn new(
        states: Vec<String>,
        alphabet: Vec<String>,
        blank: &str,
        start: &str,
        accept: &str,
        reject: &str,
        transitions: &[Transition],
    ) -> Result<Self> {
        let uniq = |v: &[String], what: &str| -> Result<()> {
            let set: HashSet<_> = v.iter().collect();
            if set.len() != v.len() || v.is_empty() {
                return Err(Error::InvalidInstance(format!("{what} must be nonempty and distinct")));
            }
            Ok(())
        };
        uniq(&states, "states")?;
        uniq(&alphabet, "alphabet symbols")?;
        for bit in ["0", "1"] {
            index_of(&alphabet, bit, "tape symbol")?;
        }
        let blank = index_of(&alphabet, blank, "blank symbol")?;
        let start = index_of(&states, start, "start state")?;
        let accept = index_of(&states, accept, "accept state")?;
        let reject = index_of(&states, reject, "reject state")?;
        if accept == reject {
            return Err(Error::InvalidInstance("accept and reject states coincide".into()));
        }
        let mut delta = vec![vec![None; alphabet.len()]; states.len()];
        for t in transitions {
            let q = index_of(&states, &t.state, "state")?;
            let s = index_of(&alphabet, &t.read, "tape symbol")?;
            let nq = index_of(&states, &t.next, "state")?;
            let ns = index_of(&alphabet, &t.write, "tape symbol")?;
            if q == accept || q == reject {
                return Err(Error::InvalidInstance(format!("transition out of halting state {}", t.state)));
            }
            if delta[q][s].replace((nq, ns, t.mv)).is_some() {
                return Err(Error::InvalidInstance(format!("duplicate transition on ({}, {})", t.state, t.read)));
            }
        }
        for (q, row) in delta.iter().enumerate() {
            if q == accept || q == reject {
                continue;
            }
            if let Some(s) = row.iter().position(Option::is_none) {
                return Err(Error::InvalidInstance(format!(
                    "transition missing on ({}, {})",
                    states[q], alphabet[s]
                )));
            }
        }
        Ok(TmSpec { states, alphabet, blank, start, accept, reject, delta })
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    fn symbol(&self, name: &str) -> usize {
        index_of(&self.alphabet, name, "tape symbol").expect("validated at construction")
    }

    /// Start configuration with `x` on cells `0..|x|` and blanks after it.
    pub fn initial_config(&self, x: &BitString, space: usize) -> Result<Config> {
        if space == 0 {
            return Err(Error::InvalidParameter("space bound must be positive".into()));
        }
        if x.len() > space {
            return Err(Error::InvalidParameter(format!(
                "input of length {} does not fit in space {space}",
                x.len()
            )));
        }
        let (zero, one) = (self.symbol("0"), self.symbol("1"));
        let mut tape = vec![self.blank; space];
        for (cell, &b) in tape.iter_mut().zip(x.bits()) {
            *cell = if b { one } else { zero };
        }
        Ok(Config { state: self.start, head: 0, tape })
    }

    pub fn is_halted(&self, c: &Config) -> bool {
        c.state == self.accept || c.state == self.reject
    }

    /// One step of a non-halted configuration.
    pub fn step(&self, c: &Config) -> Config {
        let (nq, ns, mv) = self.delta[c.state][c.tape[c.head]].expect("non-halting state");
        let mut tape = c.tape.clone();
        tape[c.head] = ns;
        let head = match mv {
            Move::S => Some(c.head),
            Move::L => c.head.checked_sub(1),
            Move::R => (c.head + 1 < tape.len()).then_some(c.head + 1),
        };
        match head {
            Some(head) => Config { state: nq, head, tape },
            None => Config { state: self.reject, head: c.head, tape },
        }
    }

    fn state_bits(&self) -> usize {
        self.states.len()
    }

    fn head_bits(space: usize) -> usize {
        ceil_log2(space as u64)
    }

    fn cell_bits(&self) -> usize {
        ceil_log2(self.alphabet.len() as u64).max(1)
    }

    /// Bits per configuration, `α·n` for space `n`.
    pub fn config_width(&self, space: usize) -> usize {
        self.state_bits() + Self::head_bits(space) + space * self.cell_bits()
    }

    pub fn encode_config(&self, c: &Config) -> BitString {
        let mut bits = vec![false; self.state_bits()];
        bits[c.state] = true;
        bits.extend(BitString::from_index(c.head as u64, Self::head_bits(c.tape.len())).bits());
        for &s in &c.tape {
            bits.extend(BitString::from_index(s as u64, self.cell_bits()).bits());
        }
        BitString::new(bits)
    }
}

fn ceil_log2(x: u64) -> usize {
    if x <= 1 {
        0
    } else {
        (64 - (x - 1).leading_zeros()) as usize
    }
}

/// Runs `m` on `x` within `space` cells, detecting repeated configurations.
pub fn simulate_tm(m: &TmSpec, x: &BitString, space: usize) -> Result<Outcome> {
    let mut c = m.initial_config(x, space)?;
    let mut seen = HashSet::new();
    loop {
        if c.state == m.accept {
            return Ok(Outcome::Accept);
        }
        if c.state == m.reject {
            return Ok(Outcome::Reject);
        }
        if !seen.insert(c.clone()) {
            return Ok(Outcome::Loop);
        }
        c = m.step(&c);
    }
}

/// Builds `S` on `2 + α·n` bits: `00∘0…0 ↦ 01∘c_init`; `01∘c` maps to
/// `11∘1…1` if `c` accepts, to `00∘0…0` if `c` rejects and to `01∘M(c)`
/// otherwise; every other input, including `11∘1…1`, is a fixed point.
pub fn tm_to_circuit(m: &TmSpec, x: &BitString, space: usize) -> Result<BoolCircuit> {
    let init = m.encode_config(&m.initial_config(x, space)?);
    let (qb, hb, cb) = (m.state_bits(), TmSpec::head_bits(space), m.cell_bits());
    let width = 2 + m.config_width(space);
    if width > 64 {
        return Err(Error::capacity("encoded configuration width", width as u128, 64));
    }
    let nsym = m.alphabet.len();
    let mut b = CircuitBuilder::new(width);
    let input = b.inputs();
    let (tag, conf) = input.split_at(2);
    let state = &conf[..qb];
    let head = &conf[qb..qb + hb];
    let cells: Vec<&[usize]> = conf[qb + hb..].chunks(cb).collect();

    // Validity: one-hot state, head in range, every cell a real symbol.
    let mut valid_parts = Vec::new();
    let one_hot: Vec<usize> = (0..qb)
        .map(|q| {
            let pattern: Vec<bool> = (0..qb).map(|k| k == q).collect();
            b.equals_const(state, &pattern)
        })
        .collect();
    valid_parts.push(b.or_all(&one_hot));
    let head_eq: Vec<usize> = (0..space)
        .map(|p| b.equals_const(head, BitString::from_index(p as u64, hb).bits()))
        .collect();
    valid_parts.push(b.or_all(&head_eq));
    let sym_eq: Vec<Vec<usize>> = cells
        .iter()
        .map(|cell| {
            (0..nsym)
                .map(|s| b.equals_const(cell, BitString::from_index(s as u64, cb).bits()))
                .collect()
        })
        .collect();
    for row in &sym_eq {
        valid_parts.push(b.or_all(row));
    }
    let valid = b.and_all(&valid_parts);

    // Symbol under the head.
    let read: Vec<usize> = (0..nsym)
        .map(|s| {
            let hits: Vec<usize> = (0..space).map(|p| b.and(head_eq[p], sym_eq[p][s])).collect();
            b.or_all(&hits)
        })
        .collect();
    let at_left = head_eq[0];
    let at_right = head_eq[space - 1];

    let mut next_state: Vec<Vec<usize>> = vec![Vec::new(); qb];
    let mut write_bits: Vec<Vec<usize>> = vec![Vec::new(); cb];
    let (mut go_left, mut go_right, mut stay) = (Vec::new(), Vec::new(), Vec::new());
    for q in 0..qb {
        for s in 0..nsym {
            let Some((nq, ns, mv)) = m.delta[q][s] else { continue };
            let fire = b.and(state[q], read[s]);
            let off = match mv {
                Move::L => Some(b.and(fire, at_left)),
                Move::R => Some(b.and(fire, at_right)),
                Move::S => None,
            };
            match off {
                Some(off) => {
                    let not_off = b.not(off);
                    let moved = b.and(fire, not_off);
                    next_state[nq].push(moved);
                    next_state[m.reject].push(off);
                    stay.push(off);
                    if mv == Move::L {
                        go_left.push(moved);
                    } else {
                        go_right.push(moved);
                    }
                }
                None => {
                    next_state[nq].push(fire);
                    stay.push(fire);
                }
            }
            for (k, bit) in BitString::from_index(ns as u64, cb).bits().iter().enumerate() {
                if *bit {
                    write_bits[k].push(fire);
                }
            }
        }
    }
    let next_state: Vec<usize> = next_state.iter().map(|v| b.or_all(v)).collect();
    let write: Vec<usize> = write_bits.iter().map(|v| b.or_all(v)).collect();
    let go_left = b.or_all(&go_left);
    let go_right = b.or_all(&go_right);
    let stay = b.or_all(&stay);

    let mut next_head_eq = Vec::with_capacity(space);
    for p in 0..space {
        let mut parts = vec![b.and(head_eq[p], stay)];
        if p > 0 {
            parts.push(b.and(head_eq[p - 1], go_right));
        }
        if p + 1 < space {
            parts.push(b.and(head_eq[p + 1], go_left));
        }
        next_head_eq.push(b.or_all(&parts));
    }
    let mut next_conf = next_state;
    for k in 0..hb {
        let hits: Vec<usize> = (0..space)
            .filter(|&p| (p >> (hb - 1 - k)) & 1 == 1)
            .map(|p| next_head_eq[p])
            .collect();
        next_conf.push(b.or_all(&hits));
    }
    for p in 0..space {
        for k in 0..cb {
            next_conf.push(b.mux(head_eq[p], write[k], cells[p][k]));
        }
    }

    // Case selection.
    let zeros_conf = vec![false; conf.len()];
    let conf_zero = b.equals_const(conf, &zeros_conf);
    let tag00 = b.equals_const(tag, &[false, false]);
    let tag01 = b.equals_const(tag, &[false, true]);
    let boot = b.and(tag00, conf_zero);
    let stepping = b.and(tag01, valid);
    let acc = b.and(stepping, state[m.accept]);
    let rej = b.and(stepping, state[m.reject]);
    let halted = b.or(acc, rej);
    let not_halted = b.not(halted);
    let run = b.and(stepping, not_halted);
    let handled = b.or(boot, stepping);
    let keep = b.not(handled);

    let mut outputs = Vec::with_capacity(width);
    // Tag: boot and run give 01, acc gives 11, rej gives 00.
    let tag_hi = {
        let kept = b.and(keep, tag[0]);
        b.or(acc, kept)
    };
    let tag_lo = {
        let kept = b.and(keep, tag[1]);
        let set = b.or_all(&[boot, run, acc]);
        b.or(set, kept)
    };
    outputs.push(tag_hi);
    outputs.push(tag_lo);
    for (k, &bit) in init.bits().iter().enumerate() {
        let from_boot = if bit { boot } else { b.constant(false) };
        let from_run = b.and(run, next_conf[k]);
        let kept = b.and(keep, conf[k]);
        let v = b.or_all(&[from_boot, acc, from_run, kept]);
        outputs.push(v);
    }
    b.build(outputs)
}

/// Map from encoded configurations back to configurations, for diagnostics.
pub fn decode_config(m: &TmSpec, bits: &BitString, space: usize) -> Option<Config> {
    let (qb, hb, cb) = (m.state_bits(), TmSpec::head_bits(space), m.cell_bits());
    if bits.len() != m.config_width(space) {
        return None;
    }
    let b = bits.bits();
    let ones: Vec<usize> = (0..qb).filter(|&q| b[q]).collect();
    let [state] = ones[..] else { return None };
    let head = BitString::new(b[qb..qb + hb].to_vec()).to_index() as usize;
    let tape: Vec<usize> = b[qb + hb..]
        .chunks(cb)
        .map(|c| BitString::new(c.to_vec()).to_index() as usize)
        .collect();
    (head < space && tape.iter().all(|&s| s < m.alphabet.len())).then_some(Config { state, head, tape })
}

pub(crate) fn transition_table(rows: &[(&str, &str, &str, &str, Move)]) -> Vec<Transition> {
    rows.iter()
        .map(|&(state, read, next, write, mv)| Transition {
            state: state.into(),
            read: read.into(),
            next: next.into(),
            write: write.into(),
            mv,
        })
        .collect()
}

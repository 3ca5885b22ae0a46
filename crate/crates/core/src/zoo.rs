//! Small named instances shared by tests, benches, and the CLI.

use rand::Rng;

use crate::csp::Cnf;
use crate::graph::Graph;
use crate::succinct::tm::{transition_table, Move, TmSpec};
use crate::succinct::{BoolCircuit, CircuitBuilder};

/// `(¬x1 ∨ ¬x2 ∨ x3) ∧ (¬x1 ∨ x2 ∨ ¬x3) ∧ (x1 ∨ ¬x2 ∨ ¬x3)`: satisfied by
/// `100` and `010`, not by `110`, `011` or `111`.
pub fn example_formula() -> Cnf {
    Cnf { num_vars: 3, clauses: vec![vec![-1, -2, 3], vec![-1, 2, -3], vec![1, -2, -3]] }
}

/// [`example_formula`] in DIMACS form with endpoints `100` and `111`.
pub const EXAMPLE_DIMACS: &str = "c three clauses over three variables
c start 100
c goal 111
p cnf 3 3
-1 -2 3 0
-1 2 -3 0
1 -2 -3 0
";

pub fn identity_circuit(n: usize) -> BoolCircuit {
    let mut b = CircuitBuilder::new(n);
    let x = b.inputs();
    b.build(x).expect("identity fixes 1^n")
}

pub fn constant_ones_circuit(n: usize) -> BoolCircuit {
    let mut b = CircuitBuilder::new(n);
    let one = b.constant(true);
    b.build(vec![one; n]).expect("constant ones fixes 1^n")
}

/// `x ↦ x + 1` on `n`-bit numbers (first bit most significant),
/// saturating at `1^n`. Reaches `1^n` from `0^n` in `2^n − 1` steps.
pub fn increment_circuit(n: usize) -> BoolCircuit {
    let mut b = CircuitBuilder::new(n);
    let x = b.inputs();
    let all = b.and_all(&x);
    let out = increment_wires(&mut b, &x)
        .into_iter()
        .map(|o| b.or(o, all))
        .collect();
    b.build(out).expect("saturating increment fixes 1^n")
}

fn increment_wires(b: &mut CircuitBuilder, x: &[usize]) -> Vec<usize> {
    let n = x.len();
    let mut out = vec![0; n];
    let mut carry = b.constant(true);
    for i in (0..n).rev() {
        out[i] = b.xor(x[i], carry);
        carry = b.and(carry, x[i]);
    }
    out
}

/// Flips the last bit, except that `1^n` is fixed. From `0^n` it cycles
/// between `0^n` and `0^{n−1}1`, so for `n ≥ 2` it is a NO instance.
pub fn toggle_circuit(n: usize) -> BoolCircuit {
    let mut b = CircuitBuilder::new(n);
    let x = b.inputs();
    let all = b.and_all(&x);
    let mut out = x.clone();
    let flipped = b.not(x[n - 1]);
    out[n - 1] = b.or(flipped, all);
    b.build(out).expect("toggle fixes 1^n")
}

/// The increment circuit, but `1^{n−1}0` is a fixed point, so counting from
/// `0^n` stalls one step short of `1^n`.
pub fn stalled_counter_circuit(n: usize) -> BoolCircuit {
    let mut b = CircuitBuilder::new(n);
    let x = b.inputs();
    let all = b.and_all(&x);
    let mut pattern = vec![true; n];
    pattern[n - 1] = false;
    let stall = b.equals_const(&x, &pattern);
    let inc = increment_wires(&mut b, &x);
    let out = inc
        .into_iter()
        .zip(&x)
        .map(|(o, &xi)| {
            let v = b.mux(stall, xi, o);
            b.or(v, all)
        })
        .collect();
    b.build(out).expect("stalled counter fixes 1^n")
}

/// `x ↦ 1^n` when `x = 0^n`, otherwise `x ↦ 0^n`, with `1^n` fixed. The
/// only route to `1^n` is the single jump from `0^n`.
pub fn jump_circuit(n: usize) -> BoolCircuit {
    let mut b = CircuitBuilder::new(n);
    let x = b.inputs();
    let zero_pattern = vec![false; n];
    let zero = b.equals_const(&x, &zero_pattern);
    let all = b.and_all(&x);
    let v = b.or(zero, all);
    b.build(vec![v; n]).expect("jump fixes 1^n")
}

/// A random circuit with `extra_gates` random gates whose outputs are OR-ed
/// with an all-ones detector, which enforces the `S(1^n) = 1^n` promise.
pub fn random_circuit<R: Rng>(n: usize, extra_gates: usize, rng: &mut R) -> BoolCircuit {
    let mut b = CircuitBuilder::new(n);
    let x = b.inputs();
    let mut wires = x.clone();
    for _ in 0..extra_gates {
        let a = wires[rng.random_range(0..wires.len())];
        let c = wires[rng.random_range(0..wires.len())];
        let g = match rng.random_range(0..4) {
            0 => b.not(a),
            1 => b.and(a, c),
            2 => b.or(a, c),
            _ => b.xor(a, c),
        };
        wires.push(g);
    }
    let all = b.and_all(&x);
    let out = (0..n)
        .map(|_| {
            let w = wires[rng.random_range(0..wires.len())];
            b.or(w, all)
        })
        .collect();
    b.build(out).expect("all-ones detector enforces the promise")
}

/// Named YES instances of width at most 3.
pub fn yes_circuits() -> Vec<(&'static str, BoolCircuit)> {
    vec![
        ("increment-2", increment_circuit(2)),
        ("increment-3", increment_circuit(3)),
        ("constant-ones-2", constant_ones_circuit(2)),
        ("jump-3", jump_circuit(3)),
    ]
}

/// Named NO instances of width 2 or 3.
pub fn no_circuits() -> Vec<(&'static str, BoolCircuit)> {
    vec![
        ("identity-2", identity_circuit(2)),
        ("toggle-2", toggle_circuit(2)),
        ("stalled-counter-2", stalled_counter_circuit(2)),
        ("identity-3", identity_circuit(3)),
        ("toggle-3", toggle_circuit(3)),
    ]
}

fn names(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

/// Starts in its accept state.
pub fn accepter_tm() -> TmSpec {
    TmSpec::new(names(&["ACC", "REJ"]), names(&["0", "1", "#"]), "#", "ACC", "ACC", "REJ", &[])
        .expect("valid machine")
}

/// Starts in its reject state.
pub fn rejecter_tm() -> TmSpec {
    TmSpec::new(names(&["ACC", "REJ"]), names(&["0", "1", "#"]), "#", "REJ", "ACC", "REJ", &[])
        .expect("valid machine")
}

/// Stays in place forever.
pub fn looper_tm() -> TmSpec {
    let rows = transition_table(&[
        ("LOOP", "0", "LOOP", "0", Move::S),
        ("LOOP", "1", "LOOP", "1", Move::S),
        ("LOOP", "#", "LOOP", "#", Move::S),
    ]);
    TmSpec::new(names(&["LOOP", "ACC", "REJ"]), names(&["0", "1", "#"]), "#", "LOOP", "ACC", "REJ", &rows)
        .expect("valid machine")
}

/// A binary counter, least significant bit in cell 0. It marks cell 0
/// (`a` = marked 0, `b` = marked 1), then increments repeatedly; a carry
/// into a blank accepts, a carry off the right end of the tape rejects. On
/// input `x` in space `n` it accepts iff `|x| < n`.
pub fn counter_tm() -> TmSpec {
    let rows = transition_table(&[
        ("START", "0", "INC", "a", Move::S),
        ("START", "1", "INC", "b", Move::S),
        ("START", "#", "ACC", "#", Move::S),
        ("START", "a", "REJ", "a", Move::S),
        ("START", "b", "REJ", "b", Move::S),
        ("INC", "a", "RET", "b", Move::S),
        ("INC", "b", "INC", "a", Move::R),
        ("INC", "0", "RET", "1", Move::L),
        ("INC", "1", "INC", "0", Move::R),
        ("INC", "#", "ACC", "#", Move::S),
        ("RET", "0", "RET", "0", Move::L),
        ("RET", "1", "RET", "1", Move::L),
        ("RET", "a", "INC", "a", Move::S),
        ("RET", "b", "INC", "b", Move::S),
        ("RET", "#", "REJ", "#", Move::S),
    ]);
    TmSpec::new(
        names(&["START", "INC", "RET", "ACC", "REJ"]),
        names(&["0", "1", "a", "b", "#"]),
        "#",
        "START",
        "ACC",
        "REJ",
        &rows,
    )
    .expect("valid machine")
}

/// The path `0 − 1 − 2`.
pub fn path3() -> Graph {
    Graph::from_edges(3, &[(0, 1), (1, 2)]).expect("valid edges")
}

/// Two disjoint edges `0 − 1` and `2 − 3`.
pub fn two_disjoint_edges() -> Graph {
    Graph::from_edges(4, &[(0, 1), (2, 3)]).expect("valid edges")
}

/// A random graph on `n` vertices with each edge present with probability
/// `num / den`.
pub fn random_graph<R: Rng>(n: usize, num: u32, den: u32, rng: &mut R) -> Graph {
    let mut g = Graph::empty(n);
    for u in 0..n {
        for v in u + 1..n {
            if rng.random_ratio(num, den) {
                g.add_edge(u, v).expect("valid edge");
            }
        }
    }
    g
}

//! Exact brute-force oracles for maxmin reconfiguration values.
//!
//! Both the CSP and the clique solver use a threshold filtration: states are
//! activated in order of decreasing objective and merged with already active
//! neighbours in a union-find; the answer is the objective level at which
//! the two endpoints first share a component.

use std::collections::{HashMap, VecDeque};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::csp::{Assignment, ConstraintSystem, ReconfigSequence, Symbol, Word};
use crate::error::{ensure_cap, Error, Result};
use crate::graph::Graph;
use crate::value::Value;
use crate::verifier::Verifier;

pub const DEFAULT_STATE_CAP: u64 = 1 << 24;
pub const DEFAULT_CLIQUE_CAP: u64 = 1 << 22;

pub(crate) struct UnionFind {
    parent: Vec<u32>,
    rank: Vec<u8>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind { parent: (0..n as u32).collect(), rank: vec![0; n] }
    }

    pub(crate) fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let p = self.parent[x as usize];
            self.parent[x as usize] = self.parent[p as usize];
            x = p;
        }
        x
    }

    pub(crate) fn union(&mut self, a: u32, b: u32) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        match self.rank[ra as usize].cmp(&self.rank[rb as usize]) {
            std::cmp::Ordering::Less => self.parent[ra as usize] = rb,
            std::cmp::Ordering::Greater => self.parent[rb as usize] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb as usize] = ra;
                self.rank[ra as usize] += 1;
            }
        }
    }
}

/// `Σ^N` indexed in mixed radix with variable 0 as the least significant digit.
struct StateSpace<'a> {
    psi: &'a ConstraintSystem,
    k: u64,
    size: u64,
}

impl<'a> StateSpace<'a> {
    fn new(psi: &'a ConstraintSystem, cap: u64) -> Result<Self> {
        let k = psi.alphabet_size() as u64;
        let size = (0..psi.num_vars()).try_fold(1u128, |acc, _| {
            let next = acc * k as u128;
            (next <= u64::MAX as u128).then_some(next)
        });
        let needed = size.unwrap_or(u128::MAX);
        ensure_cap("assignment space |Σ|^N", needed, cap as u128)?;
        Ok(StateSpace { psi, k, size: needed as u64 })
    }

    fn decode_into(&self, mut idx: u64, out: &mut [Symbol]) {
        for slot in out.iter_mut() {
            *slot = (idx % self.k) as Symbol;
            idx /= self.k;
        }
    }

    fn encode(&self, a: &Assignment) -> u64 {
        a.values().iter().rev().fold(0, |acc, &s| acc * self.k + s as u64)
    }

    fn decode(&self, idx: u64) -> Assignment {
        let mut v = vec![0; self.psi.num_vars()];
        self.decode_into(idx, &mut v);
        Assignment::new(v)
    }

    /// Satisfied-constraint count of every assignment.
    fn counts(&self) -> Vec<u32> {
        let n = self.psi.num_vars();
        (0..self.size)
            .into_par_iter()
            .map_init(
                || vec![0 as Symbol; n],
                |buf, idx| {
                    self.decode_into(idx, buf);
                    self.psi.satisfied_count(buf) as u32
                },
            )
            .collect()
    }

    /// Calls `f` on every assignment at Hamming distance one from `idx`.
    fn for_each_neighbor(&self, idx: u64, mut f: impl FnMut(u64)) {
        let mut stride = 1u64;
        let mut rest = idx;
        for _ in 0..self.psi.num_vars() {
            let digit = rest % self.k;
            rest /= self.k;
            let base = idx - digit * stride;
            for s in 0..self.k {
                if s != digit {
                    f(base + s * stride);
                }
            }
            stride *= self.k;
        }
    }
}

fn check_endpoints(psi: &ConstraintSystem, start: &Assignment, goal: &Assignment) -> Result<()> {
    if psi.num_constraints() == 0 {
        return Err(Error::InvalidInstance("constraint system has no constraints".into()));
    }
    psi.check_assignment(start)?;
    psi.check_assignment(goal)
}

/// `val_Ψ(σ_start ↔ σ_goal)` with the default state cap.
pub fn maxmin_value(psi: &ConstraintSystem, start: &Assignment, goal: &Assignment) -> Result<Value> {
    maxmin_value_capped(psi, start, goal, DEFAULT_STATE_CAP)
}

/// `val_Ψ(σ_start ↔ σ_goal)`: the best, over reconfiguration sequences from
/// `start` to `goal`, of the worst per-step value. Any endpoints are allowed.
pub fn maxmin_value_capped(
    psi: &ConstraintSystem,
    start: &Assignment,
    goal: &Assignment,
    cap: u64,
) -> Result<Value> {
    check_endpoints(psi, start, goal)?;
    let space = StateSpace::new(psi, cap)?;
    let m = psi.num_constraints();
    let counts = space.counts();

    let mut by_count: Vec<Vec<u32>> = vec![Vec::new(); m + 1];
    for (idx, &c) in counts.iter().enumerate() {
        by_count[c as usize].push(idx as u32);
    }
    let (s, g) = (space.encode(start) as u32, space.encode(goal) as u32);
    let mut uf = UnionFind::new(space.size as usize);
    let mut active = vec![false; space.size as usize];
    for level in (0..=m).rev() {
        for &idx in &by_count[level] {
            active[idx as usize] = true;
            space.for_each_neighbor(idx as u64, |nb| {
                if active[nb as usize] {
                    uf.union(idx, nb as u32);
                }
            });
        }
        if active[s as usize] && active[g as usize] && uf.find(s) == uf.find(g) {
            return Ok(Value::from_counts(level as u128, m as u128));
        }
    }
    unreachable!("Σ^N is connected under single-symbol changes")
}

/// A shortest sequence from `start` to `goal` whose every step has value at
/// least `threshold`, or `None` if there is none.
pub fn witness_sequence(
    psi: &ConstraintSystem,
    start: &Assignment,
    goal: &Assignment,
    threshold: &Value,
) -> Result<Option<ReconfigSequence<Assignment>>> {
    witness_sequence_capped(psi, start, goal, threshold, DEFAULT_STATE_CAP)
}

pub fn witness_sequence_capped(
    psi: &ConstraintSystem,
    start: &Assignment,
    goal: &Assignment,
    threshold: &Value,
    cap: u64,
) -> Result<Option<ReconfigSequence<Assignment>>> {
    check_endpoints(psi, start, goal)?;
    let space = StateSpace::new(psi, cap)?;
    let m = psi.num_constraints() as u64;
    let counts = space.counts();
    let ok = |idx: u64| threshold.admits(counts[idx as usize] as u64, m);
    let (s, g) = (space.encode(start), space.encode(goal));
    if !ok(s) || !ok(g) {
        return Ok(None);
    }
    const UNSEEN: u64 = u64::MAX;
    let mut parent = vec![UNSEEN; space.size as usize];
    parent[s as usize] = s;
    let mut queue = VecDeque::from([s]);
    while let Some(cur) = queue.pop_front() {
        if cur == g {
            break;
        }
        space.for_each_neighbor(cur, |nb| {
            if parent[nb as usize] == UNSEEN && ok(nb) {
                parent[nb as usize] = cur;
                queue.push_back(nb);
            }
        });
    }
    if parent[g as usize] == UNSEEN {
        return Ok(None);
    }
    let mut path = vec![g];
    while *path.last().unwrap() != s {
        path.push(parent[*path.last().unwrap() as usize]);
    }
    path.reverse();
    let steps = path.into_iter().map(|idx| space.decode(idx)).collect();
    ReconfigSequence::new(steps).map(Some)
}

/// Exact reconfiguration: is there a sequence of satisfying assignments?
/// Both endpoints must satisfy `psi`.
pub fn decide_exact_reconfig(psi: &ConstraintSystem, start: &Assignment, goal: &Assignment) -> Result<bool> {
    check_endpoints(psi, start, goal)?;
    for (name, a) in [("start", start), ("goal", goal)] {
        if !psi.is_satisfied_by(a)? {
            return Err(Error::InvalidInstance(format!("{name} assignment does not satisfy the system")));
        }
    }
    Ok(maxmin_value(psi, start, goal)?.is_one())
}

/// Clique reconfiguration under token addition and removal. The empty set
/// counts as a clique of size 0.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CliqueInstance {
    pub graph: Graph,
    pub start: Vec<usize>,
    pub goal: Vec<usize>,
}

pub(crate) fn vertex_mask(graph: &Graph, vertices: &[usize]) -> Result<u128> {
    let mut mask = 0u128;
    for &v in vertices {
        if v >= graph.num_vertices() {
            return Err(Error::InvalidInstance(format!("vertex {v} outside the graph")));
        }
        mask |= 1 << v;
    }
    Ok(mask)
}

fn adjacency_masks(graph: &Graph) -> Result<Vec<u128>> {
    if graph.num_vertices() > 128 {
        return Err(Error::capacity("clique solver vertex count", graph.num_vertices() as u128, 128));
    }
    Ok((0..graph.num_vertices())
        .map(|u| graph.neighbors(u).iter().fold(0u128, |m, &v| m | (1 << v)))
        .collect())
}

/// All cliques of `graph` (including the empty one) as vertex bitmasks.
pub fn enumerate_cliques(graph: &Graph, cap: u64) -> Result<Vec<u128>> {
    let adj = adjacency_masks(graph)?;
    let mut out = vec![0u128];
    // Depth-first extension by higher-numbered common neighbours.
    let mut stack: Vec<(u128, u128)> = vec![(0, if adj.is_empty() { 0 } else { u128::MAX >> (128 - adj.len()) })];
    while let Some((clique, cands)) = stack.pop() {
        let mut rest = cands;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let next = clique | (1 << v);
            out.push(next);
            if out.len() as u64 > cap {
                return Err(Error::capacity("clique enumeration", out.len() as u128, cap as u128));
            }
            let higher = if v == 127 { 0 } else { u128::MAX << (v + 1) };
            let next_cands = cands & adj[v] & higher;
            if next_cands != 0 {
                stack.push((next, next_cands));
            }
        }
    }
    Ok(out)
}

/// `val_G(C_start ↔ C_goal)`: the best, over token addition/removal
/// sequences of cliques, of the smallest clique size along the way.
pub fn clique_maxmin(inst: &CliqueInstance) -> Result<usize> {
    clique_maxmin_capped(inst, DEFAULT_CLIQUE_CAP)
}

pub fn clique_maxmin_capped(inst: &CliqueInstance, cap: u64) -> Result<usize> {
    let g = &inst.graph;
    for (name, c) in [("start", &inst.start), ("goal", &inst.goal)] {
        if !g.is_clique(c) {
            return Err(Error::InvalidInstance(format!("{name} set is not a clique")));
        }
    }
    let s = vertex_mask(g, &inst.start)?;
    let t = vertex_mask(g, &inst.goal)?;
    let adj = adjacency_masks(g)?;
    let cliques = enumerate_cliques(g, cap)?;
    let index: HashMap<u128, u32> = cliques.iter().enumerate().map(|(i, &c)| (c, i as u32)).collect();
    let max_size = cliques.iter().map(|c| c.count_ones()).max().unwrap_or(0) as usize;
    let mut by_size: Vec<Vec<u32>> = vec![Vec::new(); max_size + 1];
    for (i, c) in cliques.iter().enumerate() {
        by_size[c.count_ones() as usize].push(i as u32);
    }
    let all = if adj.is_empty() { 0 } else { u128::MAX >> (128 - adj.len()) };
    let (si, ti) = (index[&s], index[&t]);
    let mut uf = UnionFind::new(cliques.len());
    for size in (0..=max_size).rev() {
        // Supersets by one vertex have size + 1 and are already active.
        for &ci in &by_size[size] {
            let c = cliques[ci as usize];
            let mut common = all & !c;
            let mut rest = c;
            while rest != 0 {
                let v = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                common &= adj[v];
            }
            while common != 0 {
                let v = common.trailing_zeros();
                common &= common - 1;
                uf.union(ci, index[&(c | (1 << v))]);
            }
        }
        let (a, b) = (s.count_ones() as usize, t.count_ones() as usize);
        if size <= a.min(b) && uf.find(si) == uf.find(ti) {
            return Ok(size);
        }
    }
    unreachable!("every clique reaches the empty clique")
}

/// Validates a token addition/removal sequence of cliques and returns the
/// smallest clique size along it.
pub fn clique_sequence_value(graph: &Graph, seq: &[Vec<usize>]) -> Result<usize> {
    if seq.is_empty() {
        return Err(Error::InvalidSequence("empty clique sequence".into()));
    }
    let mut masks = Vec::with_capacity(seq.len());
    for (t, c) in seq.iter().enumerate() {
        if !graph.is_clique(c) {
            return Err(Error::InvalidSequence(format!("step {t} is not a clique")));
        }
        masks.push(vertex_mask(graph, c)?);
    }
    for (t, w) in masks.windows(2).enumerate() {
        if (w[0] ^ w[1]).count_ones() > 1 {
            return Err(Error::InvalidSequence(format!("steps {t} and {} differ in more than one vertex", t + 1)));
        }
    }
    Ok(masks.iter().map(|m| m.count_ones() as usize).min().unwrap())
}

/// Clique number by exhaustive enumeration.
pub fn clique_number(graph: &Graph) -> Result<usize> {
    Ok(enumerate_cliques(graph, DEFAULT_CLIQUE_CAP)?
        .iter()
        .map(|c| c.count_ones() as usize)
        .max()
        .unwrap_or(0))
}

/// Pads `seq` with copies of its final proof (which must be `goal`) up to
/// `target_length` steps and returns the exact acceptance probability
/// averaged over a uniform step and the verifier's randomness.
pub fn pad_average_acceptance<V, W>(
    verifier: &V,
    seq: &ReconfigSequence<W>,
    goal: &W,
    target_length: usize,
) -> Result<(ReconfigSequence<W>, Value)>
where
    V: Verifier + ?Sized,
    W: Word + PartialEq + Sync,
{
    if seq.last() != goal {
        return Err(Error::InvalidSequence("sequence does not end at the goal proof".into()));
    }
    if target_length < seq.len() {
        return Err(Error::InvalidParameter(format!(
            "target length {target_length} is shorter than the sequence ({})",
            seq.len()
        )));
    }
    let per_step: Vec<u64> = seq
        .steps()
        .par_iter()
        .map(|w| verifier.accepting_seeds(w.symbols()))
        .collect::<Result<_>>()?;
    let tail = *per_step.last().unwrap() as u128 * (target_length - seq.len()) as u128;
    let accepted: u128 = per_step.iter().map(|&a| a as u128).sum::<u128>() + tail;
    let total = target_length as u128 * verifier.seed_count() as u128;
    let mut padded = seq.clone();
    padded.pad_to(target_length);
    Ok((padded, Value::from_counts(accepted, total)))
}

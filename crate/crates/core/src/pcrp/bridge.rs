//! Translation between probabilistic verifiers and constraint systems: one
//! constraint per random seed, and back to a uniform constraint sampler.

use rayon::prelude::*;

use crate::csp::{Assignment, Constraint, ConstraintSystem, Symbol};
use crate::error::{ensure_cap, Error, Result};
use crate::pcrp::verifier::PcrpVerifier;
use crate::verifier::Verifier;

/// Cap on the total number of table entries emitted.
pub const DEFAULT_TABLE_CAP: u128 = 1 << 26;

/// One constraint per seed `R`: the scope is the distinct positions of
/// `I_R` in first-query order, and the table is `D_R` evaluated on every
/// assignment to the scope. `val_Ψ(π)` equals the acceptance probability
/// of `π` for every proof.
pub fn verifier_to_csp<V: Verifier + ?Sized>(v: &V) -> Result<ConstraintSystem> {
    verifier_to_csp_capped(v, DEFAULT_TABLE_CAP)
}

pub fn verifier_to_csp_capped<V: Verifier + ?Sized>(v: &V, cap: u128) -> Result<ConstraintSystem> {
    let q = v.alphabet_size();
    let seeds = v.seed_count();
    ensure_cap("seeds", seeds as u128, cap)?;
    let scopes: Vec<(Vec<usize>, Vec<usize>)> = (0..seeds)
        .into_par_iter()
        .map(|seed| {
            let queries = v.queries(seed);
            let mut scope: Vec<usize> = Vec::new();
            let slots = queries
                .iter()
                .map(|&i| match scope.iter().position(|&s| s == i) {
                    Some(k) => k,
                    None => {
                        scope.push(i);
                        scope.len() - 1
                    }
                })
                .collect();
            (scope, slots)
        })
        .collect();
    let total: u128 = scopes
        .iter()
        .map(|(scope, _)| (q as u128).checked_pow(scope.len() as u32).unwrap_or(u128::MAX))
        .fold(0u128, |a, b| a.saturating_add(b));
    ensure_cap("constraint table entries", total, cap)?;
    let constraints = scopes
        .into_par_iter()
        .enumerate()
        .map(|(seed, (scope, slots))| {
            let size = q.pow(scope.len() as u32);
            let mut local = vec![0 as Symbol; scope.len()];
            let mut view = vec![0 as Symbol; slots.len()];
            let table = (0..size)
                .map(|idx| {
                    // The first scope variable is the most significant digit.
                    let mut rest = idx;
                    for k in (0..scope.len()).rev() {
                        local[k] = (rest % q) as Symbol;
                        rest /= q;
                    }
                    for (slot, out) in slots.iter().zip(view.iter_mut()) {
                        *out = local[*slot];
                    }
                    v.decide(seed as u64, &view)
                })
                .collect();
            Constraint { scope, table }
        })
        .collect();
    ConstraintSystem::new(v.proof_len(), q, constraints)
}

/// The PCRP verifier as a constraint system together with the canonical
/// start and goal proofs as assignments.
pub fn pcrp_to_csp(v: &PcrpVerifier) -> Result<(ConstraintSystem, Assignment, Assignment)> {
    let csp = verifier_to_csp(v)?;
    let (start, goal) = v.canonical_proofs();
    Ok((
        csp,
        Assignment::new(start.word().as_slice().to_vec()),
        Assignment::new(goal.word().as_slice().to_vec()),
    ))
}

/// A uniform constraint sampler. The constraint list is replicated to
/// `lcm(m, 2^⌈log2 m⌉)` seeds so that every constraint is drawn with equal
/// probability from a seed space that is also a whole number of the
/// `⌈log2 m⌉`-bit blocks.
#[derive(Clone, Debug)]
pub struct CspVerifier {
    csp: ConstraintSystem,
    copies: u64,
}

impl CspVerifier {
    pub fn csp(&self) -> &ConstraintSystem {
        &self.csp
    }

    /// Times each constraint appears in the seed space.
    pub fn copies(&self) -> u64 {
        self.copies
    }

    fn constraint(&self, seed: u64) -> &Constraint {
        &self.csp.constraints()[(seed % self.csp.num_constraints() as u64) as usize]
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub fn csp_to_verifier(csp: &ConstraintSystem) -> Result<CspVerifier> {
    let m = csp.num_constraints() as u64;
    if m == 0 {
        return Err(Error::InvalidInstance("constraint system has no constraints".into()));
    }
    let block = m.next_power_of_two();
    let copies = block / gcd(m, block);
    Ok(CspVerifier { csp: csp.clone(), copies })
}

impl Verifier for CspVerifier {
    fn proof_len(&self) -> usize {
        self.csp.num_vars()
    }

    fn alphabet_size(&self) -> usize {
        self.csp.alphabet_size()
    }

    fn seed_count(&self) -> u64 {
        self.csp.num_constraints() as u64 * self.copies
    }

    fn query_complexity(&self) -> usize {
        self.csp.arity()
    }

    fn queries(&self, seed: u64) -> Vec<usize> {
        self.constraint(seed).scope.clone()
    }

    fn decide(&self, seed: u64, view: &[Symbol]) -> bool {
        let c = self.constraint(seed);
        let idx = view
            .iter()
            .fold(0usize, |acc, &s| acc * self.csp.alphabet_size() + s as usize);
        c.table[idx]
    }

    fn accepting_seeds(&self, proof: &[Symbol]) -> Result<u64> {
        crate::verifier::check_proof(self, proof)?;
        Ok(self.csp.satisfied_count(proof) as u64 * self.copies)
    }
}

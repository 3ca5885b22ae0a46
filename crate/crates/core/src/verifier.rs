//! Nonadaptive probabilistic verifiers over a finite proof alphabet.
//!
//! A verifier draws a seed uniformly from `0..seed_count()`, derives a query
//! list `I` from it, and decides on the symbols `π|_I`. Acceptance
//! probabilities are exact rationals over the finite seed space.

use rayon::prelude::*;

use crate::csp::Symbol;
use crate::error::{ensure_cap, Error, Result};
use crate::value::Value;

/// Largest seed space [`accepting_seeds_by_enumeration`] will walk.
pub const ENUMERATION_CAP: u64 = 1 << 30;

pub trait Verifier: Sync {
    fn proof_len(&self) -> usize;

    /// Size of the proof alphabet (`3` for `{0, 1, ⊥}`).
    fn alphabet_size(&self) -> usize;

    /// Seeds are drawn uniformly from `0..seed_count()`.
    fn seed_count(&self) -> u64;

    /// Upper bound on `queries(seed).len()`.
    fn query_complexity(&self) -> usize;

    /// The query positions `I_R`. Repeats are allowed.
    fn queries(&self, seed: u64) -> Vec<usize>;

    /// The decision `D_R` on `view[k] = π[queries(seed)[k]]`.
    fn decide(&self, seed: u64, view: &[Symbol]) -> bool;

    /// `⌈log2 seed_count⌉`.
    fn randomness_bits(&self) -> u32 {
        let s = self.seed_count();
        if s <= 1 {
            0
        } else {
            64 - (s - 1).leading_zeros()
        }
    }

    fn run(&self, seed: u64, proof: &[Symbol]) -> bool {
        let view: Vec<Symbol> = self.queries(seed).iter().map(|&i| proof[i]).collect();
        self.decide(seed, &view)
    }

    /// Number of accepting seeds. Implementations may override this with a
    /// closed form; the default enumerates every seed.
    fn accepting_seeds(&self, proof: &[Symbol]) -> Result<u64> {
        accepting_seeds_by_enumeration(self, proof)
    }

    /// `Pr_R[V^π accepts]`.
    fn acceptance_probability(&self, proof: &[Symbol]) -> Result<Value> {
        let acc = self.accepting_seeds(proof)?;
        Ok(Value::from_counts(acc as u128, self.seed_count() as u128))
    }
}

pub(crate) fn check_proof<V: Verifier + ?Sized>(v: &V, proof: &[Symbol]) -> Result<()> {
    if proof.len() != v.proof_len() {
        return Err(Error::WidthMismatch { expected: v.proof_len(), actual: proof.len() });
    }
    if let Some(&s) = proof.iter().find(|&&s| s as usize >= v.alphabet_size()) {
        return Err(Error::InvalidAssignment(format!(
            "proof symbol {s} outside alphabet of size {}",
            v.alphabet_size()
        )));
    }
    Ok(())
}

/// Runs the verifier on every seed.
pub fn accepting_seeds_by_enumeration<V: Verifier + ?Sized>(v: &V, proof: &[Symbol]) -> Result<u64> {
    check_proof(v, proof)?;
    ensure_cap("seed enumeration", v.seed_count() as u128, ENUMERATION_CAP as u128)?;
    Ok((0..v.seed_count()).into_par_iter().filter(|&r| v.run(r, proof)).count() as u64)
}

/// `Pr_R[i ∈ I_R]` for every proof position, as `(hits, seed_count)`.
pub fn query_frequencies<V: Verifier + ?Sized>(v: &V) -> Result<Vec<u64>> {
    ensure_cap("seed enumeration", v.seed_count() as u128, ENUMERATION_CAP as u128)?;
    let mut hits = vec![0u64; v.proof_len()];
    let mut seen = vec![u64::MAX; v.proof_len()];
    for r in 0..v.seed_count() {
        for i in v.queries(r) {
            if seen[i] != r {
                seen[i] = r;
                hits[i] += 1;
            }
        }
    }
    Ok(hits)
}


#[cfg(test)]
mod tests {
    use super::test_verifiers::*;
    use super::*;

    #[test]
    fn enumeration_counts() {
        let v = UniformBit { len: 4 };
        assert_eq!(v.acceptance_probability(&[1, 0, 1, 1]).unwrap(), Value::from_counts(3, 4));
        assert_eq!(v.randomness_bits(), 2);
        assert!(v.acceptance_probability(&[1, 0]).is_err());
        assert!(v.acceptance_probability(&[1, 0, 2, 1]).is_err());
    }

    #[test]
    fn frequencies() {
        assert_eq!(query_frequencies(&FirstBit { len: 3 }).unwrap(), vec![1, 0, 0]);
        assert_eq!(query_frequencies(&UniformBit { len: 3 }).unwrap(), vec![1, 1, 1]);
    }
}

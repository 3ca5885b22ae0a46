//! Reconfiguration sequences of proofs: the completeness construction and
//! the sequence families used to probe soundness.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::bits::BitString;
use crate::codes::{LocallyTestableCode, TernaryWord, BOT};
use crate::csp::{ReconfigSequence, Symbol, Word};
use crate::error::{Error, Result};
use crate::pcrp::verifier::{PcrpProof, PcrpVerifier};

/// Writes `target` over `cur[offset..]` one changed symbol at a time.
fn morph(v: &PcrpVerifier, cur: &mut Vec<Symbol>, offset: usize, target: &[Symbol], out: &mut Vec<PcrpProof>) {
    for (k, &s) in target.iter().enumerate() {
        if cur[offset + k] != s {
            cur[offset + k] = s;
            out.push(v.proof(TernaryWord::new(cur.clone())).expect("length preserved"));
        }
    }
}

fn check_path(v: &PcrpVerifier, path: &[BitString]) -> Result<()> {
    let n = v.n();
    let first = path.first().ok_or_else(|| Error::InvalidSequence("empty vertex path".into()))?;
    if let Some(bad) = path.iter().find(|a| a.len() != n) {
        return Err(Error::WidthMismatch { expected: n, actual: bad.len() });
    }
    if !first.is_all_zeros() || !path.last().unwrap().is_all_ones() {
        return Err(Error::InvalidSequence("vertex path must run from 0^n to 1^n".into()));
    }
    Ok(())
}

/// The proof sequence for a vertex path from `0^n` to `1^n` whose
/// consecutive pairs are in `L_ckt(S)`. Each hop `α → β` first blanks `g`,
/// rewrites `π` to `Π(α, β)` and writes `Enc(β)` into `g`, then does the same
/// with `f` and `Π(β, β)`. Hops with `α = β` contribute nothing.
pub fn completeness_sequence(v: &PcrpVerifier, path: &[BitString]) -> Result<ReconfigSequence<PcrpProof>> {
    check_path(v, path)?;
    for (t, pair) in path.windows(2).enumerate() {
        let (a, b) = (pair[0].to_index(), pair[1].to_index());
        if !v.context().member_index(a, b) {
            return Err(Error::InvalidSequence(format!(
                "hop {t} from {} to {} is not an edge of the circuit",
                pair[0], pair[1]
            )));
        }
    }
    hop_walk(v, path)
}

/// [`completeness_sequence`] without the edge check, for adversarial
/// sequences along non-edges.
pub fn hop_walk(v: &PcrpVerifier, path: &[BitString]) -> Result<ReconfigSequence<PcrpProof>> {
    check_path(v, path)?;
    let ell = v.ell();
    let (start, _) = v.canonical_proofs();
    let mut cur = start.symbols().to_vec();
    let mut out = vec![start];
    let blanks = vec![BOT; ell];
    for pair in path.windows(2) {
        let (a, b) = (&pair[0], &pair[1]);
        if a == b {
            continue;
        }
        let enc_b = v.context().code().encode_bits(b).into_iter().map(Symbol::from).collect::<Vec<_>>();
        morph(v, &mut cur, ell, &blanks, &mut out);
        morph(v, &mut cur, 2 * ell, v.pcpp().honest_proof(a, b)?.as_slice(), &mut out);
        morph(v, &mut cur, ell, &enc_b, &mut out);
        morph(v, &mut cur, 0, &blanks, &mut out);
        morph(v, &mut cur, 2 * ell, v.pcpp().honest_proof(b, b)?.as_slice(), &mut out);
        morph(v, &mut cur, 0, &enc_b, &mut out);
    }
    ReconfigSequence::new(out)
}

/// Number of transitions [`completeness_sequence`] makes for one hop
/// `α → β` with `α ≠ β`: four full sweeps of `ℓ` symbols plus the changed
/// proof positions in both rewrites.
pub fn hop_transitions(v: &PcrpVerifier, alpha: &BitString, beta: &BitString) -> Result<usize> {
    let pcpp = v.pcpp();
    let first = pcpp.honest_proof(alpha, alpha)?.hamming(&pcpp.honest_proof(alpha, beta)?);
    let second = pcpp.honest_proof(alpha, beta)?.hamming(&pcpp.honest_proof(beta, beta)?);
    Ok(4 * v.ell() + first + second)
}

/// Changes `start` into `goal` position by position, left to right.
pub fn bitwise_interpolation(start: &PcrpProof, goal: &PcrpProof) -> Result<ReconfigSequence<PcrpProof>> {
    let order: Vec<usize> = (0..start.width()).collect();
    interpolate_in_order(start, goal, &order)
}

fn interpolate_in_order(start: &PcrpProof, goal: &PcrpProof, order: &[usize]) -> Result<ReconfigSequence<PcrpProof>> {
    if start.ell() != goal.ell() || start.p() != goal.p() {
        return Err(Error::InvalidSequence("endpoints have different regions".into()));
    }
    let mut out = vec![start.clone()];
    for &i in order {
        let target = goal.symbols()[i];
        if out.last().unwrap().symbols()[i] != target {
            let next = out.last().unwrap().with_symbol(i, target);
            out.push(next);
        }
    }
    ReconfigSequence::new(out)
}

/// `steps` random single-symbol changes from `σ_start`, followed by a
/// random-order interpolation to `σ_goal`.
pub fn random_walk_sequence<R: Rng>(v: &PcrpVerifier, steps: usize, rng: &mut R) -> Result<ReconfigSequence<PcrpProof>> {
    let (start, goal) = v.canonical_proofs();
    let len = start.width();
    let mut out = vec![start];
    for _ in 0..steps {
        let cur = out.last().unwrap();
        let i = rng.random_range(0..len);
        let s = (cur.symbols()[i] + rng.random_range(1..3)) % 3;
        out.push(cur.with_symbol(i, s));
    }
    let mut order: Vec<usize> = (0..len).collect();
    order.shuffle(rng);
    let tail = interpolate_in_order(out.last().unwrap(), &goal, &order)?;
    ReconfigSequence::new(out)?.concat(&tail)
}

/// Blank-heavy adversarial sequences from `σ_start` to `σ_goal`: a direct
/// hop `0^n → 1^n` through the completeness moves (ignoring whether it is
/// an edge), the same through a random intermediate vertex, and a sequence
/// that blanks both `f` and `g` before rewriting everything.
pub fn blank_heavy_sequences<R: Rng>(v: &PcrpVerifier, rng: &mut R) -> Result<Vec<ReconfigSequence<PcrpProof>>> {
    let n = v.n();
    let (z, o) = (BitString::zeros(n), BitString::ones(n));
    let mid = BitString::from_index(rng.random_range(0..1u64 << n), n);
    let direct = hop_walk(v, &[z.clone(), o.clone()])?;
    let via = hop_walk(v, &[z, mid, o.clone()])?;

    let ell = v.ell();
    let (start, goal) = v.canonical_proofs();
    let mut cur = start.symbols().to_vec();
    let mut out = vec![start];
    let blanks = vec![BOT; ell];
    morph(v, &mut cur, ell, &blanks, &mut out);
    morph(v, &mut cur, 0, &blanks, &mut out);
    let pi = v.pcpp().honest_proof(&o, &o)?;
    morph(v, &mut cur, 2 * ell, pi.as_slice(), &mut out);
    morph(v, &mut cur, 0, &goal.symbols()[..ell], &mut out);
    morph(v, &mut cur, ell, &goal.symbols()[ell..2 * ell], &mut out);
    Ok(vec![direct, via, ReconfigSequence::new(out)?])
}

//! The pair language `L_ckt(S) = {Enc(α)∘Enc(β) : α = β, S(α) = β or
//! S(β) = α}`, two PCPP verifiers for it, and the `⊥`-aware modified run.
//!
//! Both verifiers use the same honest proof `Π(α, β)`: the bits of `α∘β`
//! repeated `reps` times.

use std::ops::Range;
use std::sync::Arc;

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::codes::{default_declared_rho, Hadamard, LocallyTestableCode, TernaryWord, BOT};
use crate::csp::Symbol;
use crate::error::{ensure_cap, Error, Result};
use crate::succinct::BoolCircuit;
use crate::value::{ratio, Rational, Value};
use crate::verifier::{query_frequencies, Verifier, ENUMERATION_CAP};

/// Widest circuit for which [`LcktContext`] tabulates `S` and the code.
pub const MAX_CONTEXT_N: usize = 12;

/// `α = β`, `S(α) = β` or `S(β) = α`.
pub fn lckt_member(s: &BoolCircuit, alpha: &BitString, beta: &BitString) -> Result<bool> {
    let sa = s.eval(alpha)?;
    let sb = s.eval(beta)?;
    Ok(alpha == beta || &sa == beta || &sb == alpha)
}

/// A circuit together with its truth table and the Hadamard code on its
/// vertex set.
#[derive(Clone, Debug)]
pub struct LcktContext {
    circuit: BoolCircuit,
    code: Hadamard,
    image: Vec<u64>,
    declared_rho: Rational,
}

impl LcktContext {
    pub fn new(circuit: BoolCircuit) -> Result<Self> {
        ensure_cap("circuit width for the pair language", circuit.n() as u128, MAX_CONTEXT_N as u128)?;
        let code = Hadamard::new(circuit.n())?;
        let image = circuit.truth_table(1 << MAX_CONTEXT_N)?;
        Ok(LcktContext { circuit, code, image, declared_rho: default_declared_rho() })
    }

    pub fn circuit(&self) -> &BoolCircuit {
        &self.circuit
    }

    pub fn code(&self) -> &Hadamard {
        &self.code
    }

    pub fn n(&self) -> usize {
        self.circuit.n()
    }

    pub fn ell(&self) -> usize {
        self.code.ell()
    }

    pub fn rho(&self) -> &Rational {
        &self.declared_rho
    }

    /// `δ_ckt = ρ/4`.
    pub fn delta_ckt(&self) -> Rational {
        &self.declared_rho / Rational::from_integer(4.into())
    }

    /// `S` on message ranks.
    pub fn image(&self, a: u64) -> u64 {
        self.image[a as usize]
    }

    pub fn member_index(&self, a: u64, b: u64) -> bool {
        a == b || self.image(a) == b || self.image(b) == a
    }

    /// All member pairs, possibly with repeats.
    pub fn members(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        (0..1u64 << self.n()).flat_map(move |a| {
            let sa = self.image(a);
            [(a, a), (a, sa), (sa, a)]
        })
    }

    /// Bit `t` of `Enc(α)∘Enc(β)`.
    pub fn pair_bit(&self, a: u64, b: u64, t: usize) -> bool {
        let ell = self.ell();
        let (msg, x) = if t < ell { (a, t) } else { (b, t - ell) };
        (msg & x as u64).count_ones() % 2 == 1
    }

    pub fn encode_pair(&self, alpha: &BitString, beta: &BitString) -> Result<TernaryWord> {
        Ok(self.code.encode(alpha)?.concat(&self.code.encode(beta)?))
    }

    /// `Δ(w, L_ckt(S))` for `w` of length `2ℓ`, with the nearest member.
    pub fn distance_with_witness(&self, w: &[Symbol]) -> Result<(Value, (u64, u64))> {
        let ell = self.ell();
        if w.len() != 2 * ell {
            return Err(Error::WidthMismatch { expected: 2 * ell, actual: w.len() });
        }
        let df = self.code.distances_to_all(&w[..ell]);
        let dg = self.code.distances_to_all(&w[ell..]);
        let (d, pair) = self
            .members()
            .map(|(a, b)| (df[a as usize] + dg[b as usize], (a, b)))
            .min()
            .expect("every circuit has member pairs");
        Ok((Value::from_counts(d as u128, 2 * ell as u128), pair))
    }
}

/// `Δ(w, L_ckt(S))`.
pub fn lckt_distance(ctx: &LcktContext, w: &TernaryWord) -> Result<Value> {
    Ok(ctx.distance_with_witness(w.as_slice())?.0)
}

/// Declared PCPP parameters.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PcppParams {
    /// Proximity parameter `δ`.
    #[serde(with = "crate::value::rational_str")]
    pub delta: Rational,
    /// Soundness error `s`: inputs `δ`-far from the language are accepted
    /// with probability at most `s` whatever the proof.
    #[serde(with = "crate::value::rational_str")]
    pub soundness: Rational,
    /// Every position of `f∘g∘π` is queried with the same probability.
    pub smooth: bool,
    pub query_complexity: usize,
}

/// A PCPP verifier for `L_ckt(S)` reading `f∘g∘π`. The [`Verifier`]
/// methods describe the plain verifier on blank-free words.
pub trait Pcpp: Verifier {
    fn context(&self) -> &LcktContext;

    fn name(&self) -> String;

    fn params(&self) -> PcppParams;

    /// Length of `π`.
    fn pi_len(&self) -> usize;

    fn input_len(&self) -> usize {
        2 * self.context().ell()
    }

    /// `Π(α, β)`, accepted with probability 1 alongside `Enc(α)∘Enc(β)`
    /// when the pair is in the language.
    fn honest_proof(&self, alpha: &BitString, beta: &BitString) -> Result<TernaryWord> {
        let n = self.context().n();
        if alpha.len() != n || beta.len() != n {
            return Err(Error::WidthMismatch { expected: n, actual: alpha.len().max(beta.len()) });
        }
        let block = TernaryWord::from_bits(&alpha.concat(beta));
        let reps = self.pi_len() / (2 * n);
        Ok(TernaryWord::new(block.as_slice().repeat(reps)))
    }

    /// Seeds on which the modified verifier accepts `w = f∘g∘π` over
    /// `{0, 1, ⊥}`.
    fn modified_accepting_seeds(&self, w: &[Symbol]) -> Result<u64> {
        check_ternary(self.proof_len(), w)?;
        ensure_cap("PCPP seeds", self.seed_count() as u128, ENUMERATION_CAP as u128)?;
        Ok((0..self.seed_count())
            .into_par_iter()
            .filter(|&r| modified_run(self, w, r))
            .count() as u64)
    }

    /// Seeds whose query set hits a `⊥` inside `f∘g`.
    fn blank_hit_seeds(&self, w: &[Symbol]) -> Result<u64> {
        check_ternary(self.proof_len(), w)?;
        ensure_cap("PCPP seeds", self.seed_count() as u128, ENUMERATION_CAP as u128)?;
        let input = self.input_len();
        Ok((0..self.seed_count())
            .into_par_iter()
            .filter(|&r| self.queries(r).iter().any(|&i| i < input && w[i] == BOT))
            .count() as u64)
    }
}

fn check_ternary(len: usize, w: &[Symbol]) -> Result<()> {
    if w.len() != len {
        return Err(Error::WidthMismatch { expected: len, actual: w.len() });
    }
    if w.iter().any(|&s| s > BOT) {
        return Err(Error::InvalidAssignment("symbols must be 0, 1 or ⊥".into()));
    }
    Ok(())
}

/// The modified verifier: accept if `(f∘g)|_I` contains `⊥`; otherwise
/// accept iff `π|_I` is blank-free and `D` accepts.
pub fn modified_run<P: Pcpp + ?Sized>(v: &P, w: &[Symbol], seed: u64) -> bool {
    let input = v.input_len();
    let qs = v.queries(seed);
    let view: Vec<Symbol> = qs.iter().map(|&i| w[i]).collect();
    if qs.iter().zip(&view).any(|(&i, &s)| i < input && s == BOT) {
        return true;
    }
    if view.contains(&BOT) {
        return false;
    }
    v.decide(seed, &view)
}

/// `Pr_R[modified verifier accepts w]`.
pub fn modified_acceptance<P: Pcpp + ?Sized>(v: &P, w: &TernaryWord) -> Result<Value> {
    let acc = v.modified_accepting_seeds(w.as_slice())?;
    Ok(Value::from_counts(acc as u128, v.seed_count() as u128))
}

/// `Pr_R[(f∘g)|_I contains ⊥]`.
pub fn blank_query_probability<P: Pcpp + ?Sized>(v: &P, w: &TernaryWord) -> Result<Value> {
    let hits = v.blank_hit_seeds(w.as_slice())?;
    Ok(Value::from_counts(hits as u128, v.seed_count() as u128))
}

/// Exact test with no randomness: reads everything and accepts iff `f∘g` is
/// within `δ_ckt` of the language.
#[derive(Clone, Debug)]
pub struct ReferencePcpp {
    ctx: Arc<LcktContext>,
    reps: usize,
    declared_soundness: Rational,
}

pub fn default_reference_soundness() -> Rational {
    ratio(1, 100)
}

/// The exact reference verifier; its soundness is declared as `1/100`
/// although it never accepts a far input.
pub fn reference_pcpp(ctx: Arc<LcktContext>, reps: usize) -> Result<ReferencePcpp> {
    check_reps(reps)?;
    Ok(ReferencePcpp { ctx, reps, declared_soundness: default_reference_soundness() })
}

fn check_reps(reps: usize) -> Result<()> {
    if reps == 0 {
        return Err(Error::InvalidParameter("proof repetitions must be positive".into()));
    }
    Ok(())
}

impl Verifier for ReferencePcpp {
    fn proof_len(&self) -> usize {
        self.input_len() + self.pi_len()
    }

    fn alphabet_size(&self) -> usize {
        2
    }

    fn seed_count(&self) -> u64 {
        1
    }

    fn query_complexity(&self) -> usize {
        self.proof_len()
    }

    fn queries(&self, _seed: u64) -> Vec<usize> {
        (0..self.proof_len()).collect()
    }

    fn decide(&self, _seed: u64, view: &[Symbol]) -> bool {
        let (d, _) = self.ctx.distance_with_witness(&view[..self.input_len()]).expect("input width");
        d.as_rational() <= &self.ctx.delta_ckt()
    }
}

impl Pcpp for ReferencePcpp {
    fn context(&self) -> &LcktContext {
        &self.ctx
    }

    fn name(&self) -> String {
        "reference".into()
    }

    fn params(&self) -> PcppParams {
        PcppParams {
            delta: self.ctx.delta_ckt(),
            soundness: self.declared_soundness.clone(),
            smooth: true,
            query_complexity: self.query_complexity(),
        }
    }

    fn pi_len(&self) -> usize {
        2 * self.ctx.n() * self.reps
    }

    fn modified_accepting_seeds(&self, w: &[Symbol]) -> Result<u64> {
        check_ternary(self.proof_len(), w)?;
        let input = self.input_len();
        Ok(if w[..input].contains(&BOT) {
            1
        } else if w[input..].contains(&BOT) {
            0
        } else {
            self.decide(0, w) as u64
        })
    }

    fn blank_hit_seeds(&self, w: &[Symbol]) -> Result<u64> {
        check_ternary(self.proof_len(), w)?;
        Ok(w[..self.input_len()].contains(&BOT) as u64)
    }
}

/// Reads one uniformly chosen repetition block of `π`, decodes the claimed
/// pair `(α, β)` from it, and compares `k` uniform positions of `f∘g` with
/// `Enc(α)∘Enc(β)`; accepts iff all match and the pair is in the language.
/// Seed layout: `block + reps·(t_1 + 2ℓ·t_2 + …)`.
#[derive(Clone, Debug)]
pub struct SampledPcpp {
    ctx: Arc<LcktContext>,
    k: usize,
    reps: usize,
}

pub fn sampled_pcpp(ctx: Arc<LcktContext>, k: usize, reps: usize) -> Result<SampledPcpp> {
    check_reps(reps)?;
    if k == 0 {
        return Err(Error::InvalidParameter("sample count k must be positive".into()));
    }
    let seeds = (2 * ctx.ell() as u128).checked_pow(k as u32).and_then(|s| s.checked_mul(reps as u128));
    ensure_cap("sampled PCPP seeds", seeds.unwrap_or(u128::MAX), u64::MAX as u128 >> 20)?;
    Ok(SampledPcpp { ctx, k, reps })
}

impl SampledPcpp {
    pub fn k(&self) -> usize {
        self.k
    }

    fn samples(&self, seed: u64) -> (usize, Vec<usize>) {
        let width = 2 * self.ctx.ell() as u64;
        let block = (seed % self.reps as u64) as usize;
        let mut rest = seed / self.reps as u64;
        let mut ts = Vec::with_capacity(self.k);
        for _ in 0..self.k {
            ts.push((rest % width) as usize);
            rest /= width;
        }
        (block, ts)
    }

    fn block_range(&self, block: usize) -> Range<usize> {
        let n2 = 2 * self.ctx.n();
        let start = self.input_len() + block * n2;
        start..start + n2
    }
}

impl Verifier for SampledPcpp {
    fn proof_len(&self) -> usize {
        self.input_len() + self.pi_len()
    }

    fn alphabet_size(&self) -> usize {
        2
    }

    fn seed_count(&self) -> u64 {
        (2 * self.ctx.ell() as u64).pow(self.k as u32) * self.reps as u64
    }

    fn query_complexity(&self) -> usize {
        2 * self.ctx.n() + self.k
    }

    fn queries(&self, seed: u64) -> Vec<usize> {
        let (block, ts) = self.samples(seed);
        self.block_range(block).chain(ts).collect()
    }

    fn decide(&self, seed: u64, view: &[Symbol]) -> bool {
        let n = self.ctx.n();
        let claimed = |bits: &[Symbol]| bits.iter().fold(0u64, |acc, &s| (acc << 1) | s as u64);
        let (a, b) = (claimed(&view[..n]), claimed(&view[n..2 * n]));
        if !self.ctx.member_index(a, b) {
            return false;
        }
        let (_, ts) = self.samples(seed);
        ts.iter()
            .zip(&view[2 * n..])
            .all(|(&t, &s)| s == self.ctx.pair_bit(a, b, t) as Symbol)
    }
}

impl Pcpp for SampledPcpp {
    fn context(&self) -> &LcktContext {
        &self.ctx
    }

    fn name(&self) -> String {
        format!("sampled:{}", self.k)
    }

    /// A member pair nearest to a `δ`-far input still disagrees with it on
    /// more than a `δ` fraction, so each sample survives with probability
    /// below `1 − δ`.
    fn params(&self) -> PcppParams {
        let delta = self.ctx.delta_ckt();
        let keep = Rational::one() - &delta;
        PcppParams {
            soundness: num_traits::pow(keep, self.k),
            delta,
            smooth: false,
            query_complexity: self.query_complexity(),
        }
    }

    fn pi_len(&self) -> usize {
        2 * self.ctx.n() * self.reps
    }

    /// Per block: `(2ℓ)^k − (2ℓ − B)^k` seeds hit a blank of `f∘g`, where `B`
    /// counts those blanks; a blank-free block claiming a member pair adds
    /// `M^k`, with `M` the positions agreeing with the claimed encoding.
    fn modified_accepting_seeds(&self, w: &[Symbol]) -> Result<u64> {
        check_ternary(self.proof_len(), w)?;
        let input = self.input_len();
        let n = self.ctx.n();
        let k = self.k as u32;
        let blanks = w[..input].iter().filter(|&&s| s == BOT).count() as u64;
        let total = (input as u64).pow(k);
        let hit = total - (input as u64 - blanks).pow(k);
        let mut acc = 0;
        for block in 0..self.reps {
            acc += hit;
            let bits = &w[self.block_range(block)];
            if bits.contains(&BOT) {
                continue;
            }
            let claimed = |bits: &[Symbol]| bits.iter().fold(0u64, |acc, &s| (acc << 1) | s as u64);
            let (a, b) = (claimed(&bits[..n]), claimed(&bits[n..]));
            if self.ctx.member_index(a, b) {
                let matching = (0..input)
                    .filter(|&t| w[t] == self.ctx.pair_bit(a, b, t) as Symbol)
                    .count() as u64;
                acc += matching.pow(k);
            }
        }
        Ok(acc)
    }

    fn blank_hit_seeds(&self, w: &[Symbol]) -> Result<u64> {
        check_ternary(self.proof_len(), w)?;
        let input = self.input_len() as u64;
        let blanks = w[..input as usize].iter().filter(|&&s| s == BOT).count() as u64;
        let k = self.k as u32;
        Ok((input.pow(k) - (input - blanks).pow(k)) * self.reps as u64)
    }
}

/// Which PCPP instantiation to use: `reference` or `sampled:k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PcppChoice {
    Reference,
    Sampled { k: usize },
}

impl std::str::FromStr for PcppChoice {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "reference" => Ok(PcppChoice::Reference),
            other => {
                let k = other
                    .strip_prefix("sampled:")
                    .and_then(|k| k.parse().ok())
                    .ok_or_else(|| Error::Parse(format!("expected `reference` or `sampled:k`, got {other:?}")))?;
                Ok(PcppChoice::Sampled { k })
            }
        }
    }
}

impl std::fmt::Display for PcppChoice {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PcppChoice::Reference => f.write_str("reference"),
            PcppChoice::Sampled { k } => write!(f, "sampled:{k}"),
        }
    }
}

pub const DEFAULT_REPS: usize = 2;

pub fn build_pcpp(ctx: Arc<LcktContext>, choice: PcppChoice, reps: usize) -> Result<Box<dyn Pcpp>> {
    Ok(match choice {
        PcppChoice::Reference => Box::new(reference_pcpp(ctx, reps)?),
        PcppChoice::Sampled { k } => Box::new(sampled_pcpp(ctx, k, reps)?),
    })
}

/// `max_i |Pr_R[i ∈ I] − p̄|` over all proof positions, where `p̄` is the
/// mean query probability; `0` means smooth.
pub fn smoothness_check<V: Verifier + ?Sized>(v: &V) -> Result<Rational> {
    Ok(region_deviations(v, &[0..v.proof_len()])?.remove(0))
}

/// [`smoothness_check`] restricted to each region separately.
pub fn region_deviations<V: Verifier + ?Sized>(v: &V, regions: &[Range<usize>]) -> Result<Vec<Rational>> {
    let freq = query_frequencies(v)?;
    let seeds = v.seed_count() as i64;
    regions
        .iter()
        .map(|r| {
            if r.is_empty() || r.end > freq.len() {
                return Err(Error::InvalidParameter(format!("bad region {r:?}")));
            }
            let slice = &freq[r.clone()];
            let sum: u64 = slice.iter().sum();
            let len = slice.len() as i64;
            // Deviation of count c from the mean is |c·len − sum| / (len·seeds).
            let worst = slice.iter().map(|&c| (c as i64 * len - sum as i64).abs()).max().unwrap_or(0);
            Ok(ratio(worst, len * seeds))
        })
        .collect()
}

/// [`region_deviations`] over the `f∘g` and `π` regions.
pub fn two_tier_smoothness<P: Pcpp + ?Sized>(v: &P) -> Result<(Rational, Rational)> {
    let input = v.input_len();
    let d = region_deviations(v, &[0..input, input..v.proof_len()])?;
    Ok((d[0].clone(), d[1].clone()))
}

pub fn is_smooth<V: Verifier + ?Sized>(v: &V) -> Result<bool> {
    Ok(smoothness_check(v)?.is_zero())
}

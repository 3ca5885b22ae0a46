use std::sync::Arc;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::codes::{LocallyTestableCode, TernaryWord, BOT};
use crate::csp::{Symbol, Word};
use crate::error::{ensure_cap, Error, Result};
use crate::pcpp::{build_pcpp, LcktContext, Pcpp, PcppChoice};
use crate::succinct::BoolCircuit;
use crate::value::{format_rational, Rational};
use crate::verifier::{accepting_seeds_by_enumeration, check_proof, Verifier};

/// A proof `f∘g∘π` over `{0, 1, ⊥}` with `|f| = |g| = ell` and `|π| = p`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawProof")]
pub struct PcrpProof {
    ell: usize,
    p: usize,
    word: TernaryWord,
}

#[derive(Deserialize)]
struct RawProof {
    ell: usize,
    p: usize,
    word: TernaryWord,
}

impl TryFrom<RawProof> for PcrpProof {
    type Error = Error;
    fn try_from(r: RawProof) -> Result<Self> {
        PcrpProof::new(r.ell, r.p, r.word)
    }
}

impl PcrpProof {
    pub fn new(ell: usize, p: usize, word: TernaryWord) -> Result<Self> {
        if word.len() != 2 * ell + p {
            return Err(Error::WidthMismatch { expected: 2 * ell + p, actual: word.len() });
        }
        Ok(PcrpProof { ell, p, word })
    }

    pub fn from_parts(f: &TernaryWord, g: &TernaryWord, pi: &TernaryWord) -> Result<Self> {
        if f.len() != g.len() {
            return Err(Error::WidthMismatch { expected: f.len(), actual: g.len() });
        }
        PcrpProof::new(f.len(), pi.len(), f.concat(g).concat(pi))
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn word(&self) -> &TernaryWord {
        &self.word
    }

    pub fn f(&self) -> TernaryWord {
        self.word.slice(0..self.ell)
    }

    pub fn g(&self) -> TernaryWord {
        self.word.slice(self.ell..2 * self.ell)
    }

    pub fn pi(&self) -> TernaryWord {
        self.word.slice(2 * self.ell..2 * self.ell + self.p)
    }

    /// Copy with position `i` set to `s`.
    pub fn with_symbol(&self, i: usize, s: Symbol) -> PcrpProof {
        let mut v = self.word.clone().into_vec();
        v[i] = s;
        PcrpProof { ell: self.ell, p: self.p, word: TernaryWord::new(v) }
    }
}

impl Word for PcrpProof {
    fn symbols(&self) -> &[Symbol] {
        self.word.as_slice()
    }
}

/// Largest seed space allowed for the verifier (it must fit in `u64`).
const SEED_SPACE_LIMIT: u128 = 1 << 62;

/// The reconfiguration verifier `V(S)`. With seed
/// `tf + ℓ²·(tg + ℓ²·(i + ℓ·(j + ℓ·r)))` it runs the local tester on `f`
/// (seed `tf`) and `g` (seed `tg`) and rejects if both reject; it accepts if
/// `f_i = ⊥` or `g_j = ⊥`; otherwise it runs the modified PCPP verifier with
/// seed `r`.
pub struct PcrpVerifier {
    ctx: Arc<LcktContext>,
    pcpp: Box<dyn Pcpp>,
    choice: PcppChoice,
}

impl std::fmt::Debug for PcrpVerifier {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PcrpVerifier")
            .field("n", &self.ctx.n())
            .field("pcpp", &self.choice)
            .finish()
    }
}

impl PcrpVerifier {
    pub fn new(circuit: BoolCircuit, choice: PcppChoice, reps: usize) -> Result<Self> {
        let ctx = Arc::new(LcktContext::new(circuit)?);
        let pcpp = build_pcpp(ctx.clone(), choice, reps)?;
        let ell = ctx.ell() as u128;
        let seeds = ell.pow(6).checked_mul(pcpp.seed_count() as u128).unwrap_or(u128::MAX);
        ensure_cap("verifier seed space", seeds, SEED_SPACE_LIMIT)?;
        Ok(PcrpVerifier { ctx, pcpp, choice })
    }

    pub fn context(&self) -> &LcktContext {
        &self.ctx
    }

    pub fn pcpp(&self) -> &dyn Pcpp {
        self.pcpp.as_ref()
    }

    pub fn choice(&self) -> PcppChoice {
        self.choice
    }

    pub fn n(&self) -> usize {
        self.ctx.n()
    }

    pub fn ell(&self) -> usize {
        self.ctx.ell()
    }

    pub fn p(&self) -> usize {
        self.pcpp.pi_len()
    }

    /// `Enc(α)∘Enc(β)∘Π(α, β)`.
    pub fn honest(&self, alpha: &BitString, beta: &BitString) -> Result<PcrpProof> {
        let fg = self.ctx.encode_pair(alpha, beta)?;
        let pi = self.pcpp.honest_proof(alpha, beta)?;
        PcrpProof::new(self.ell(), self.p(), fg.concat(&pi))
    }

    /// `σ_start = Enc(0^n)∘Enc(0^n)∘Π(0^n, 0^n)` and
    /// `σ_goal = Enc(1^n)∘Enc(1^n)∘Π(1^n, 1^n)`.
    pub fn canonical_proofs(&self) -> (PcrpProof, PcrpProof) {
        let (z, o) = (BitString::zeros(self.n()), BitString::ones(self.n()));
        (
            self.honest(&z, &z).expect("widths match"),
            self.honest(&o, &o).expect("widths match"),
        )
    }

    pub fn proof(&self, word: TernaryWord) -> Result<PcrpProof> {
        PcrpProof::new(self.ell(), self.p(), word)
    }

    fn check(&self, w: &PcrpProof) -> Result<()> {
        if w.ell() != self.ell() || w.p() != self.p() {
            return Err(Error::InvalidAssignment(format!(
                "proof regions (ell={}, p={}) do not match the verifier (ell={}, p={})",
                w.ell(),
                w.p(),
                self.ell(),
                self.p()
            )));
        }
        Ok(())
    }

    fn split_seed(&self, seed: u64) -> (u64, u64, usize, usize, u64) {
        let ell = self.ell() as u64;
        let ell2 = ell * ell;
        let tf = seed % ell2;
        let rest = seed / ell2;
        let tg = rest % ell2;
        let rest = rest / ell2;
        let i = (rest % ell) as usize;
        let rest = rest / ell;
        let j = (rest % ell) as usize;
        (tf, tg, i, j, rest / ell)
    }

    /// Exact acceptance probability by walking every seed.
    pub fn acceptance_by_enumeration(&self, w: &PcrpProof) -> Result<crate::value::Value> {
        self.check(w)?;
        let acc = accepting_seeds_by_enumeration(self, w.symbols())?;
        Ok(crate::value::Value::from_counts(acc as u128, self.seed_count() as u128))
    }

    pub fn acceptance(&self, w: &PcrpProof) -> Result<crate::value::Value> {
        self.check(w)?;
        self.acceptance_probability(w.symbols())
    }

    /// Tester rejections on `f` and `g` and blank-free counts, the inputs
    /// to the closed-form acceptance count.
    pub fn tester_profile(&self, w: &[Symbol]) -> (u64, u64, u64, u64) {
        let ell = self.ell();
        let code = self.ctx.code();
        let (f, g) = (&w[..ell], &w[ell..2 * ell]);
        let filled = |x: &[Symbol]| x.iter().filter(|&&s| s != BOT).count() as u64;
        (code.tester_rejections(f), code.tester_rejections(g), filled(f), filled(g))
    }
}

impl Verifier for PcrpVerifier {
    fn proof_len(&self) -> usize {
        2 * self.ell() + self.p()
    }

    fn alphabet_size(&self) -> usize {
        3
    }

    fn seed_count(&self) -> u64 {
        (self.ell() as u64).pow(6) * self.pcpp.seed_count()
    }

    fn query_complexity(&self) -> usize {
        8 + self.pcpp.query_complexity()
    }

    fn queries(&self, seed: u64) -> Vec<usize> {
        let ell = self.ell();
        let code = self.ctx.code();
        let (tf, tg, i, j, r) = self.split_seed(seed);
        let mut q = code.tester_queries(tf);
        q.extend(code.tester_queries(tg).into_iter().map(|x| x + ell));
        q.push(i);
        q.push(ell + j);
        q.extend(self.pcpp.queries(r));
        q
    }

    fn decide(&self, seed: u64, view: &[Symbol]) -> bool {
        let code = self.ctx.code();
        let (tf, tg, _, _, r) = self.split_seed(seed);
        let tester_accepts = |seed: u64, v: &[Symbol]| {
            !v.contains(&BOT) && code.tester_check(seed, &v.iter().map(|&s| s == 1).collect::<Vec<_>>())
        };
        if !tester_accepts(tf, &view[0..3]) && !tester_accepts(tg, &view[3..6]) {
            return false;
        }
        if view[6] == BOT || view[7] == BOT {
            return true;
        }
        let input = 2 * self.ell();
        let qs = self.pcpp.queries(r);
        let pv = &view[8..];
        if qs.iter().zip(pv).any(|(&q, &s)| q < input && s == BOT) {
            return true;
        }
        !pv.contains(&BOT) && self.pcpp.decide(r, pv)
    }

    /// `(ℓ⁴ − R_f·R_g)·((ℓ² − N_f·N_g)·P + N_f·N_g·A)`, where `R` counts
    /// rejecting tester seeds, `N` blank-free positions, `P` PCPP seeds and
    /// `A` the seeds accepted by the modified PCPP verifier.
    fn accepting_seeds(&self, w: &[Symbol]) -> Result<u64> {
        check_proof(self, w)?;
        let ell2 = (self.ell() as u128).pow(2);
        let (rf, rg, nf, ng) = self.tester_profile(w);
        let a = self.pcpp.modified_accepting_seeds(w)? as u128;
        let p = self.pcpp.seed_count() as u128;
        let filled = nf as u128 * ng as u128;
        let acc = (ell2 * ell2 - rf as u128 * rg as u128) * ((ell2 - filled) * p + filled * a);
        Ok(acc as u64)
    }
}

/// Parameters entering the soundness bound.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PcrpParams {
    #[serde(with = "crate::value::rational_str")]
    pub rho: Rational,
    #[serde(with = "crate::value::rational_str")]
    pub kappa: Rational,
    /// Query complexity of the PCPP verifier.
    pub q: usize,
    #[serde(with = "crate::value::rational_str")]
    pub s_ckt: Rational,
    #[serde(with = "crate::value::rational_str")]
    pub delta_ckt: Rational,
    /// `min{(1 − s_ckt)/(2q), ρ/3}`.
    #[serde(with = "crate::value::rational_str")]
    pub eps: Rational,
    /// `min{(κ·eps)², (1 − eps)²·(1 − s_ckt)/2}`.
    #[serde(with = "crate::value::rational_str")]
    pub bound: Rational,
}

impl PcrpParams {
    pub fn new(rho: Rational, kappa: Rational, q: usize, s_ckt: Rational, delta_ckt: Rational) -> Result<Self> {
        let unit = |r: &Rational, name: &str| -> Result<()> {
            if r <= &Rational::zero() || r >= &Rational::one() {
                return Err(Error::InvalidParameter(format!("{name} = {} must lie in (0, 1)", format_rational(r))));
            }
            Ok(())
        };
        unit(&rho, "rho")?;
        unit(&s_ckt, "s_ckt")?;
        unit(&delta_ckt, "delta_ckt")?;
        if kappa <= Rational::zero() {
            return Err(Error::InvalidParameter("kappa must be positive".into()));
        }
        if q == 0 {
            return Err(Error::InvalidParameter("query complexity must be positive".into()));
        }
        let one = Rational::one();
        let two = Rational::from_integer(2.into());
        let eps = std::cmp::min(
            (&one - &s_ckt) / Rational::from_integer((2 * q).into()),
            &rho / Rational::from_integer(3.into()),
        );
        let far = (&kappa * &eps) * (&kappa * &eps);
        let close = (&one - &eps) * (&one - &eps) * (&one - &s_ckt) / &two;
        let bound = std::cmp::min(far, close);
        Ok(PcrpParams { rho, kappa, q, s_ckt, delta_ckt, eps, bound })
    }

    /// Parameters for `v` with the given tester constant.
    pub fn for_verifier(v: &PcrpVerifier, kappa: Rational) -> Result<Self> {
        let pp = v.pcpp().params();
        PcrpParams::new(v.context().rho().clone(), kappa, pp.query_complexity, pp.soundness, pp.delta)
    }
}

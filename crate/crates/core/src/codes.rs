//! Error-correcting codes with local testers over `{0, 1, ⊥}`, instantiated
//! with the Hadamard code and the three-query linearity test.

use std::fmt;
use std::str::FromStr;

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::bits::BitString;
use crate::csp::{Symbol, Word};
use crate::error::{ensure_cap, Error, Result};
use crate::value::{ratio, Rational, Value};

/// The blank symbol `⊥`.
pub const BOT: Symbol = 2;

/// A string over `{0, 1, ⊥}`, written with `B` for `⊥`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct TernaryWord(Vec<Symbol>);

impl TernaryWord {
    /// Panics on a symbol outside `{0, 1, 2}`.
    pub fn new(symbols: Vec<Symbol>) -> Self {
        assert!(symbols.iter().all(|&s| s <= BOT), "ternary symbols are 0, 1, 2");
        TernaryWord(symbols)
    }

    pub fn blanks(len: usize) -> Self {
        TernaryWord(vec![BOT; len])
    }

    pub fn from_bits(bits: &BitString) -> Self {
        TernaryWord(bits.bits().iter().map(|&b| b as Symbol).collect())
    }

    /// The `len`-symbol word with base-3 rank `index`, first symbol most
    /// significant.
    pub fn from_index(mut index: u64, len: usize) -> Self {
        let mut v = vec![0; len];
        for slot in v.iter_mut().rev() {
            *slot = (index % 3) as Symbol;
            index /= 3;
        }
        TernaryWord(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[Symbol] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<Symbol> {
        self.0
    }

    pub fn count_blanks(&self) -> usize {
        self.0.iter().filter(|&&s| s == BOT).count()
    }

    pub fn is_blank_free(&self) -> bool {
        !self.0.contains(&BOT)
    }

    /// The bits of a blank-free word.
    pub fn to_bits(&self) -> Option<BitString> {
        self.is_blank_free()
            .then(|| BitString::new(self.0.iter().map(|&s| s == 1).collect()))
    }

    pub fn concat(&self, other: &TernaryWord) -> TernaryWord {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        TernaryWord(v)
    }

    pub fn slice(&self, range: std::ops::Range<usize>) -> TernaryWord {
        TernaryWord(self.0[range].to_vec())
    }
}

impl Word for TernaryWord {
    fn symbols(&self) -> &[Symbol] {
        &self.0
    }
}

impl fmt::Display for TernaryWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &s in &self.0 {
            f.write_str(match s {
                0 => "0",
                1 => "1",
                _ => "B",
            })?;
        }
        Ok(())
    }
}

impl FromStr for TernaryWord {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .filter(|c| !c.is_whitespace() && *c != ',')
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                'B' | 'b' | '⊥' => Ok(BOT),
                _ => Err(Error::Parse(format!("not a ternary symbol: {c:?}"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(TernaryWord)
    }
}

impl Serialize for TernaryWord {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for TernaryWord {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// `Δ(f, g)`: the fraction of positions where `f` and `g` differ; `⊥` is a
/// symbol like any other.
pub fn relative_distance(f: &TernaryWord, g: &TernaryWord) -> Result<Value> {
    if f.len() != g.len() {
        return Err(Error::WidthMismatch { expected: f.len(), actual: g.len() });
    }
    if f.is_empty() {
        return Err(Error::InvalidParameter("distance between empty words".into()));
    }
    Ok(Value::from_counts(f.hamming(g) as u128, f.len() as u128))
}

/// Parameters of a code with a local tester.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeSpec {
    /// Message bits.
    pub n: usize,
    /// Codeword length.
    pub ell: usize,
    /// Declared relative distance: distinct codewords are more than this far apart.
    #[serde(with = "crate::value::rational_str")]
    pub rho: Rational,
    /// Exact minimum relative distance between distinct codewords.
    #[serde(with = "crate::value::rational_str")]
    pub min_distance: Rational,
    pub q_test: usize,
    /// Tester soundness constant when known (typically measured).
    #[serde(with = "crate::value::opt_rational_str", default)]
    pub kappa: Option<Rational>,
}

/// A binary code with a nonadaptive local tester that rejects on `⊥`.
pub trait LocallyTestableCode: Sync {
    fn spec(&self) -> CodeSpec;

    fn message_len(&self) -> usize;

    fn codeword_len(&self) -> usize;

    /// The codeword bits of `alpha`; `alpha` must have the message length.
    fn encode_bits(&self, alpha: &BitString) -> Vec<bool>;

    fn tester_seed_count(&self) -> u64;

    fn tester_queries(&self, seed: u64) -> Vec<usize>;

    /// The tester's check on blank-free queried bits.
    fn tester_check(&self, seed: u64, bits: &[bool]) -> bool;

    fn encode(&self, alpha: &BitString) -> Result<TernaryWord> {
        if alpha.len() != self.message_len() {
            return Err(Error::WidthMismatch { expected: self.message_len(), actual: alpha.len() });
        }
        Ok(TernaryWord::new(self.encode_bits(alpha).into_iter().map(Symbol::from).collect()))
    }

    /// Number of positions where `f` differs from the encoding of each
    /// message, indexed by message rank.
    fn distances_to_all(&self, f: &[Symbol]) -> Vec<usize> {
        (0..1u64 << self.message_len())
            .map(|a| {
                let c = self.encode_bits(&BitString::from_index(a, self.message_len()));
                f.iter().zip(c).filter(|(&s, b)| s != *b as Symbol).count()
            })
            .collect()
    }

    /// Seeds on which the tester rejects `f`.
    fn tester_rejections(&self, f: &[Symbol]) -> u64 {
        (0..self.tester_seed_count()).filter(|&r| !local_test_symbols(self, f, r)).count() as u64
    }
}

fn local_test_symbols<C: LocallyTestableCode + ?Sized>(code: &C, f: &[Symbol], seed: u64) -> bool {
    let qs = code.tester_queries(seed);
    let mut bits = Vec::with_capacity(qs.len());
    for i in qs {
        match f[i] {
            BOT => return false,
            s => bits.push(s == 1),
        }
    }
    code.tester_check(seed, &bits)
}

/// One run of the tester on `f`: rejects whenever it reads `⊥`.
pub fn local_test<C: LocallyTestableCode + ?Sized>(code: &C, f: &TernaryWord, seed: u64) -> Result<bool> {
    if f.len() != code.codeword_len() {
        return Err(Error::WidthMismatch { expected: code.codeword_len(), actual: f.len() });
    }
    if seed >= code.tester_seed_count() {
        return Err(Error::InvalidParameter(format!("tester seed {seed} out of range")));
    }
    Ok(local_test_symbols(code, f.as_slice(), seed))
}

/// `Pr[tester rejects f]`.
pub fn rejection_probability<C: LocallyTestableCode + ?Sized>(code: &C, f: &TernaryWord) -> Result<Value> {
    if f.len() != code.codeword_len() {
        return Err(Error::WidthMismatch { expected: code.codeword_len(), actual: f.len() });
    }
    Ok(Value::from_counts(code.tester_rejections(f.as_slice()) as u128, code.tester_seed_count() as u128))
}

/// `Δ(f, Enc(·))` together with the lexicographically first nearest message.
pub fn distance_to_code<C: LocallyTestableCode + ?Sized>(code: &C, f: &TernaryWord) -> Result<(Value, BitString)> {
    if f.len() != code.codeword_len() {
        return Err(Error::WidthMismatch { expected: code.codeword_len(), actual: f.len() });
    }
    let d = code.distances_to_all(f.as_slice());
    let (best, &dist) = d.iter().enumerate().min_by_key(|&(i, &d)| (d, i)).expect("code is nonempty");
    Ok((
        Value::from_counts(dist as u128, code.codeword_len() as u128),
        BitString::from_index(best as u64, code.message_len()),
    ))
}

/// Nearest-codeword decoding: the message whose encoding is within `eps`
/// of `f`, or `None` (written `∗`) when `f` is `eps`-far from the code.
/// Requires `eps ≤ min_distance / 2`; at equality a tie goes to the
/// lexicographically smallest message.
pub fn decode_nearest<C: LocallyTestableCode + ?Sized>(
    code: &C,
    f: &TernaryWord,
    eps: &Rational,
) -> Result<Option<BitString>> {
    check_decoding_radius(code, eps)?;
    let (dist, alpha) = distance_to_code(code, f)?;
    Ok((dist.as_rational() <= eps).then_some(alpha))
}

pub fn check_decoding_radius<C: LocallyTestableCode + ?Sized>(code: &C, eps: &Rational) -> Result<()> {
    let half = code.spec().min_distance / Rational::from_integer(2.into());
    if eps.is_zero() || eps < &Rational::zero() || eps > &half {
        return Err(Error::InvalidParameter(format!(
            "decoding radius must lie in (0, {}]",
            crate::value::format_rational(&half)
        )));
    }
    Ok(())
}

/// The Hadamard code: position `x ∈ {0,1}^n` (lexicographic order) holds
/// `⟨α, x⟩ mod 2`. Tester: pick `x, y` and check `f(x) ⊕ f(y) = f(x ⊕ y)`,
/// with seed `x·ℓ + y`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Hadamard {
    n: usize,
}

/// Hadamard distinct codewords are exactly `1/2` apart; the declared
/// distance sits just below so that the strict inequality holds.
pub fn default_declared_rho() -> Rational {
    ratio(49, 100)
}

pub const MAX_HADAMARD_N: usize = 20;

impl Hadamard {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 || n > MAX_HADAMARD_N {
            return Err(Error::InvalidParameter(format!("Hadamard message length must be in 1..={MAX_HADAMARD_N}")));
        }
        Ok(Hadamard { n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn ell(&self) -> usize {
        1 << self.n
    }

    fn encode_index(&self, a: usize) -> Vec<bool> {
        (0..self.ell()).map(|x| (a & x).count_ones() % 2 == 1).collect()
    }

    /// Every codeword, indexed by message rank.
    pub fn all_codewords(&self) -> Vec<TernaryWord> {
        (0..self.ell())
            .map(|a| TernaryWord::new(self.encode_index(a).into_iter().map(Symbol::from).collect()))
            .collect()
    }
}

impl LocallyTestableCode for Hadamard {
    fn spec(&self) -> CodeSpec {
        CodeSpec {
            n: self.n,
            ell: self.ell(),
            rho: default_declared_rho(),
            min_distance: ratio(1, 2),
            q_test: 3,
            kappa: None,
        }
    }

    fn message_len(&self) -> usize {
        self.n
    }

    fn codeword_len(&self) -> usize {
        self.ell()
    }

    fn encode_bits(&self, alpha: &BitString) -> Vec<bool> {
        // The message bit for x's most significant coordinate is alpha[0],
        // so alpha's rank and x's rank align bitwise.
        self.encode_index(alpha.to_index() as usize)
    }

    fn tester_seed_count(&self) -> u64 {
        (self.ell() as u64).pow(2)
    }

    fn tester_queries(&self, seed: u64) -> Vec<usize> {
        let ell = self.ell() as u64;
        let (x, y) = ((seed / ell) as usize, (seed % ell) as usize);
        vec![x, y, x ^ y]
    }

    fn tester_check(&self, _seed: u64, bits: &[bool]) -> bool {
        bits[0] ^ bits[1] == bits[2]
    }

    /// Walsh–Hadamard transform of `(-1)^f` with blanks as zero: for each
    /// message the transform is agreements minus disagreements on the
    /// blank-free positions.
    fn distances_to_all(&self, f: &[Symbol]) -> Vec<usize> {
        let ell = self.ell();
        let mut w: Vec<i64> = f
            .iter()
            .map(|&s| match s {
                0 => 1,
                1 => -1,
                _ => 0,
            })
            .collect();
        let mut h = 1;
        while h < ell {
            for block in (0..ell).step_by(2 * h) {
                for i in block..block + h {
                    let (a, b) = (w[i], w[i + h]);
                    w[i] = a + b;
                    w[i + h] = a - b;
                }
            }
            h *= 2;
        }
        let blank = f.iter().filter(|&&s| s == BOT).count() as i64;
        let filled = ell as i64 - blank;
        w.into_iter().map(|c| (blank + (filled - c) / 2) as usize).collect()
    }

    fn tester_rejections(&self, f: &[Symbol]) -> u64 {
        let ell = self.ell();
        let mut rej = 0;
        for x in 0..ell {
            for y in 0..ell {
                let (a, b, c) = (f[x], f[y], f[x ^ y]);
                if a == BOT || b == BOT || c == BOT || (a ^ b) != c {
                    rej += 1;
                }
            }
        }
        rej
    }
}

/// Which words [`measure_kappa`] ranges over.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KappaScope {
    /// All `3^ℓ` words over `{0, 1, ⊥}`.
    AllTernary,
    /// All `2^ℓ` blank-free words.
    BlankFree,
    /// `samples` uniform ternary words drawn from a seeded generator.
    Sampled { samples: u64, seed: u64 },
}

pub const DEFAULT_KAPPA_CAP: u64 = 1 << 24;

/// The empirical soundness constant.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KappaReport {
    /// `min Pr[reject] / Δ(f, Enc(·))` over non-codewords, or `None` when
    /// every examined word is a codeword.
    #[serde(with = "crate::value::opt_rational_str")]
    pub kappa: Option<Rational>,
    pub words_examined: u64,
    pub non_codewords: u64,
    /// A word attaining the minimum.
    pub witness: Option<TernaryWord>,
}

/// Measures `κ_emp = min_f Pr[M^f rejects] / Δ(f, Enc(·))` with exact
/// rejection probabilities.
pub fn measure_kappa<C: LocallyTestableCode + ?Sized>(code: &C, scope: KappaScope) -> Result<KappaReport> {
    measure_kappa_capped(code, scope, DEFAULT_KAPPA_CAP)
}

pub fn measure_kappa_capped<C: LocallyTestableCode + ?Sized>(
    code: &C,
    scope: KappaScope,
    cap: u64,
) -> Result<KappaReport> {
    let ell = code.codeword_len();
    let seeds = code.tester_seed_count();
    let exhaustive = |base: u32| -> Result<u64> {
        let total = (base as u128).checked_pow(ell as u32).unwrap_or(u128::MAX);
        ensure_cap("words for kappa measurement", total, cap as u128)?;
        Ok(total as u64)
    };
    let words: Box<dyn Fn(u64) -> TernaryWord + Sync> = match scope {
        KappaScope::AllTernary => {
            exhaustive(3)?;
            Box::new(move |i| TernaryWord::from_index(i, ell))
        }
        KappaScope::BlankFree => {
            exhaustive(2)?;
            Box::new(move |i| {
                TernaryWord::new((0..ell).map(|k| ((i >> (ell - 1 - k)) & 1) as Symbol).collect())
            })
        }
        KappaScope::Sampled { seed, .. } => Box::new(move |i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i);
            TernaryWord::new((0..ell).map(|_| rng.random_range(0..3) as Symbol).collect())
        }),
    };
    let count = match scope {
        KappaScope::AllTernary => exhaustive(3)?,
        KappaScope::BlankFree => exhaustive(2)?,
        KappaScope::Sampled { samples, .. } => {
            ensure_cap("sampled words for kappa measurement", samples as u128, cap as u128)?;
            samples
        }
    };
    // Per word: (rejections, distance) minimizing rejections/(seeds·dist/ell).
    let best = (0..count)
        .into_par_iter()
        .filter_map(|i| {
            let f = words(i);
            let dist = *code.distances_to_all(f.as_slice()).iter().min().unwrap();
            (dist > 0).then(|| (code.tester_rejections(f.as_slice()), dist as u64, i))
        })
        .map(|(rej, dist, i)| (ratio(rej as i64 * ell as i64, dist as i64 * seeds as i64), i, 1u64))
        .reduce_with(|a, b| {
            let n = a.2 + b.2;
            if (&b.0, b.1) < (&a.0, a.1) {
                (b.0, b.1, n)
            } else {
                (a.0, a.1, n)
            }
        });
    Ok(match best {
        None => KappaReport { kappa: None, words_examined: count, non_codewords: 0, witness: None },
        Some((k, i, n)) => KappaReport {
            kappa: Some(k),
            words_examined: count,
            non_codewords: n,
            witness: Some(words(i)),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::value::ratio;

    fn w(s: &str) -> TernaryWord {
        s.parse().unwrap()
    }

    fn bs(s: &str) -> BitString {
        s.parse().unwrap()
    }

    #[test]
    fn encode_examples() {
        let h = Hadamard::new(2).unwrap();
        assert_eq!(h.encode(&bs("00")).unwrap(), w("0000"));
        assert_eq!(h.encode(&bs("10")).unwrap(), w("0011"));
        assert_eq!(h.encode(&bs("01")).unwrap(), w("0101"));
        let d = relative_distance(&h.encode(&bs("10")).unwrap(), &h.encode(&bs("01")).unwrap()).unwrap();
        assert_eq!(d, Value::from_counts(1, 2));
        assert!(matches!(h.encode(&bs("1")), Err(Error::WidthMismatch { .. })));
    }

    #[test]
    fn distance_examples() {
        assert!(relative_distance(&w("01B1"), &w("01B1")).unwrap().is_zero());
        assert_eq!(relative_distance(&w("0000"), &w("0B00")).unwrap(), Value::from_counts(1, 4));
        assert_eq!(relative_distance(&w("0011"), &w("0101")).unwrap(), Value::from_counts(1, 2));
        assert!(relative_distance(&w("0"), &w("00")).is_err());
    }

    #[test]
    fn tester_examples() {
        let h = Hadamard::new(2).unwrap();
        let c = h.encode(&bs("11")).unwrap();
        assert!((0..16).all(|r| local_test(&h, &c, r).unwrap()));
        let blank = TernaryWord::blanks(4);
        assert!((0..16).all(|r| !local_test(&h, &blank, r).unwrap()));
        // x = 01, y = 10.
        assert!(!local_test(&h, &w("0001"), 4 + 2).unwrap());
        assert_eq!(h.tester_queries(6), vec![1, 2, 3]);
    }

    #[test]
    fn fast_distances_match_brute_force() {
        let h = Hadamard::new(2).unwrap();
        for i in 0..81 {
            let f = TernaryWord::from_index(i, 4);
            let fast = h.distances_to_all(f.as_slice());
            let slow: Vec<usize> = h.all_codewords().iter().map(|c| c.hamming(&f)).collect();
            assert_eq!(fast, slow, "word {f}");
        }
    }

    #[test]
    fn kappa_examples() {
        let h1 = Hadamard::new(1).unwrap();
        let r = measure_kappa(&h1, KappaScope::AllTernary).unwrap();
        assert_eq!(r.words_examined, 9);
        assert!(r.kappa.unwrap() > Rational::zero());
        let h2 = Hadamard::new(2).unwrap();
        let r = measure_kappa(&h2, KappaScope::BlankFree).unwrap();
        assert_eq!(r.non_codewords, 12);
        assert!(r.kappa.unwrap() > Rational::zero());
        let err = measure_kappa_capped(&h2, KappaScope::AllTernary, 10).unwrap_err();
        assert!(matches!(err, Error::Capacity { .. }));
        let sampled = measure_kappa(&h2, KappaScope::Sampled { samples: 50, seed: 7 }).unwrap();
        assert_eq!(sampled, measure_kappa(&h2, KappaScope::Sampled { samples: 50, seed: 7 }).unwrap());
    }

    #[test]
    fn decode_examples() {
        let h = Hadamard::new(2).unwrap();
        let quarter = ratio(1, 4);
        for a in ["00", "01", "10", "11"] {
            assert_eq!(decode_nearest(&h, &h.encode(&bs(a)).unwrap(), &quarter).unwrap(), Some(bs(a)));
        }
        assert_eq!(decode_nearest(&h, &w("1011"), &quarter).unwrap(), Some(bs("10")));
        // 0110 is itself the encoding of 11; 0111 sits at distance 1/4 from
        // three codewords.
        assert_eq!(decode_nearest(&h, &w("0110"), &ratio(1, 5)).unwrap(), Some(bs("11")));
        assert_eq!(decode_nearest(&h, &w("0111"), &ratio(1, 5)).unwrap(), None);
        assert!(matches!(decode_nearest(&h, &w("0110"), &ratio(1, 3)), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn word_strings() {
        let f = w("01B");
        assert_eq!(f.to_string(), "01B");
        assert_eq!(f.count_blanks(), 1);
        assert_eq!(serde_json::to_string(&f).unwrap(), "\"01B\"");
        assert!("012".parse::<TernaryWord>().is_err());
        assert_eq!(TernaryWord::from_index(5, 3), w("012".replace('2', "B").as_str()));
    }
}

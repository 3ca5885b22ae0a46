//! The soundness audit: decode every proof of a sequence, recover a vertex
//! walk with the grid-walk token procedure, and locate a proof the verifier
//! rejects with probability above the lemma's bound.

use num_traits::One;
use rayon::prelude::*;
use serde::Serialize;

use crate::bits::BitString;
use crate::codes::{check_decoding_radius, decode_nearest, distance_to_code, LocallyTestableCode};
use crate::csp::ReconfigSequence;
use crate::error::{Error, Result};
use crate::pcpp::{blank_query_probability, modified_acceptance};
use crate::pcrp::verifier::{PcrpParams, PcrpProof, PcrpVerifier};
use crate::succinct::decide_reachability;
use crate::value::{format_rational, Rational, Value};

/// Decoded halves of one proof; `None` is `∗` (far from the code).
pub type DecodedStep = (Option<BitString>, Option<BitString>);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Track {
    Alpha,
    Beta,
}

/// Result of the grid walk over `{α, β} × [T]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GridWalk {
    /// The recovered walk from `0^n` to `1^n`.
    pub gamma: Vec<BitString>,
    /// The grid cell each element of `gamma` was read from (`t` is 0-based).
    pub cells: Vec<(Track, usize)>,
    /// Token moves made, equal to `gamma.len()`.
    pub moves: usize,
}

/// Runs the token procedure on decoded steps with `α^(T+1) = β^(T+1) = 1^n`.
/// The token starts at `(α, 0)`; from `(α, t)` it moves to `(α, t+1)` if that
/// cell is decoded and otherwise to `(β, t)`, and symmetrically from
/// `(β, t)`. Fails if it would read `∗` or exceed `2T + 2` moves.
pub fn grid_walk(decoded: &[DecodedStep], n: usize) -> Result<GridWalk> {
    let t_len = decoded.len();
    let ones = BitString::ones(n);
    let cell = |track: Track, t: usize| -> Option<BitString> {
        if t == t_len {
            return Some(ones.clone());
        }
        match track {
            Track::Alpha => decoded[t].0.clone(),
            Track::Beta => decoded[t].1.clone(),
        }
    };
    let mut gamma = Vec::new();
    let mut cells = Vec::new();
    let (mut track, mut t) = (Track::Alpha, 0usize);
    let limit = 2 * t_len + 2;
    while t < t_len {
        let value = cell(track, t).ok_or_else(|| {
            Error::InvalidSequence(format!("token reached a far-from-code cell ({track:?}, {t})"))
        })?;
        gamma.push(value);
        cells.push((track, t));
        if gamma.len() > limit {
            return Err(Error::InvalidSequence("token walk did not terminate".into()));
        }
        if cell(track, t + 1).is_some() {
            t += 1;
        } else {
            track = match track {
                Track::Alpha => Track::Beta,
                Track::Beta => Track::Alpha,
            };
        }
    }
    let moves = gamma.len();
    Ok(GridWalk { gamma, cells, moves })
}

/// Outcome of walk extraction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum GammaVerdict {
    /// Every consecutive pair of `γ` is an edge: the sequence certifies a path.
    ValidSPath,
    /// Step `t` decodes to a pair outside the language.
    Violation { t: usize, alpha: BitString, beta: BitString },
    /// Step `t` has both halves far from the code, so the walk precondition
    /// fails there; the verifier's testers reject it directly.
    BothFar { t: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GammaExtraction {
    pub verdict: GammaVerdict,
    pub walk: Option<GridWalk>,
}

/// Decodes each proof of `seq` with radius `eps`.
pub fn decode_sequence(v: &PcrpVerifier, seq: &[PcrpProof], eps: &Rational) -> Result<Vec<DecodedStep>> {
    let code = v.context().code();
    check_decoding_radius(code, eps)?;
    seq.par_iter()
        .map(|w| Ok((decode_nearest(code, &w.f(), eps)?, decode_nearest(code, &w.g(), eps)?)))
        .collect()
}

/// The integer form of the "decoded halves cannot jump" condition: with
/// decoding radius `r = ⌊eps·ℓ⌋`, distinct codewords stay at least
/// `ℓ·d_min − 2r ≥ 2` symbols apart after decoding.
pub fn radius_condition(v: &PcrpVerifier, eps: &Rational) -> bool {
    let ell = v.ell();
    let r = (eps * Rational::from_integer(ell.into())).floor();
    let gap = v.context().code().spec().min_distance * Rational::from_integer(ell.into())
        - Rational::from_integer(2.into()) * r;
    gap >= Rational::from_integer(2.into())
}

/// Checks that decoded halves never change between two decoded values in
/// one step and that at most one half changes per step.
pub fn check_decoded_steps(decoded: &[DecodedStep]) -> Result<()> {
    for (t, pair) in decoded.windows(2).enumerate() {
        let (a0, b0) = &pair[0];
        let (a1, b1) = &pair[1];
        if a0 != a1 && b0 != b1 {
            return Err(Error::AuditFailure(format!("both decoded halves change at step {t}")));
        }
        for (x, y) in [(a0, a1), (b0, b1)] {
            if let (Some(x), Some(y)) = (x, y) {
                if x != y {
                    return Err(Error::AuditFailure(format!(
                        "a decoded half jumps from {x} to {y} at step {t}"
                    )));
                }
            }
        }
    }
    Ok(())
}

/// Grid-walk extraction on already decoded steps. The first step must
/// decode to `(0^n, 0^n)`.
pub fn extract_gamma_decoded(decoded: &[DecodedStep], n: usize, member: impl Fn(&BitString, &BitString) -> bool) -> Result<GammaExtraction> {
    if decoded.is_empty() {
        return Err(Error::InvalidSequence("empty sequence".into()));
    }
    if let Some(t) = decoded.iter().position(|(a, b)| a.is_none() && b.is_none()) {
        return Ok(GammaExtraction { verdict: GammaVerdict::BothFar { t }, walk: None });
    }
    if decoded[0].0.as_ref().is_none_or(|a| !a.is_all_zeros()) {
        return Err(Error::InvalidSequence("first proof must decode to 0^n in its first half".into()));
    }
    let walk = grid_walk(decoded, n)?;
    for k in 0..walk.gamma.len().saturating_sub(1) {
        let (x, y) = (&walk.gamma[k], &walk.gamma[k + 1]);
        if member(x, y) {
            continue;
        }
        // Same-track moves repeat a value, so a non-edge comes from a switch
        // between tracks at one step.
        let (c0, c1) = (walk.cells[k], walk.cells[k + 1]);
        if c0.1 != c1.1 {
            return Err(Error::AuditFailure(format!(
                "non-edge {x} -> {y} between steps {} and {}",
                c0.1, c1.1
            )));
        }
        let t = c0.1;
        let (alpha, beta) = (decoded[t].0.clone().unwrap(), decoded[t].1.clone().unwrap());
        return Ok(GammaExtraction { verdict: GammaVerdict::Violation { t, alpha, beta }, walk: Some(walk) });
    }
    // The final element must lead into the all-ones sentinel.
    let last = walk.gamma.last().unwrap();
    let ones = BitString::ones(n);
    if !member(last, &ones) {
        let (track, t) = *walk.cells.last().unwrap();
        return Err(Error::AuditFailure(format!(
            "walk ends at {last} on {track:?} track of step {t}, not adjacent to 1^n"
        )));
    }
    Ok(GammaExtraction { verdict: GammaVerdict::ValidSPath, walk: Some(walk) })
}

/// Decodes `seq` and runs the grid walk.
pub fn extract_gamma(v: &PcrpVerifier, seq: &ReconfigSequence<PcrpProof>, eps: &Rational) -> Result<GammaExtraction> {
    let decoded = decode_sequence(v, seq.steps(), eps)?;
    let ctx = v.context();
    extract_gamma_decoded(&decoded, v.n(), |a, b| ctx.member_index(a.to_index(), b.to_index()))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum WitnessKind {
    BothFar,
    NotInLanguage,
}

/// Checks on the modified PCPP verifier at a not-in-language step.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ModifiedRunCheck {
    /// Each of `f`, `g` has at most `eps·ℓ` blanks.
    pub few_blanks: bool,
    pub rejection: Value,
    /// `1 − s_ckt − eps·q`.
    #[serde(with = "crate::value::rational_str")]
    pub threshold: Rational,
    pub blank_query_probability: Value,
    /// `eps·q`.
    #[serde(with = "crate::value::rational_str")]
    pub blank_query_bound: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AuditWitness {
    pub t: usize,
    pub kind: WitnessKind,
    pub rejection_probability: Value,
    pub modified_run: Option<ModifiedRunCheck>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AuditReport {
    pub reachable: bool,
    pub status: String,
    pub sequence_length: usize,
    pub params: PcrpParams,
    pub radius_condition: bool,
    pub witness: Option<AuditWitness>,
    pub token_moves: Option<usize>,
    /// Largest rejection probability over all steps.
    pub max_rejection: Value,
}

/// Audits a sequence from `σ_start` to `σ_goal`. On a NO instance it finds a
/// step whose exact rejection probability exceeds `params.bound`, either a
/// step with both halves far from the code or a step decoding to a pair
/// outside the language; failing to do so is an [`Error::AuditFailure`].
/// On a YES instance it only reports the rejection profile.
pub fn soundness_audit(v: &PcrpVerifier, seq: &ReconfigSequence<PcrpProof>, params: &PcrpParams) -> Result<AuditReport> {
    let (start, goal) = v.canonical_proofs();
    if seq.first() != &start || seq.last() != &goal {
        return Err(Error::InvalidSequence("sequence must run from the start proof to the goal proof".into()));
    }
    let reachable = decide_reachability(v.context().circuit())?.reachable;
    let rejections: Vec<Value> = seq
        .steps()
        .par_iter()
        .map(|w| v.acceptance(w).map(|a| a.complement()))
        .collect::<Result<_>>()?;
    let max_rejection = rejections.iter().max().cloned().unwrap_or_else(Value::zero);
    let cond = radius_condition(v, &params.eps);
    let mut report = AuditReport {
        reachable,
        status: String::new(),
        sequence_length: seq.len(),
        params: params.clone(),
        radius_condition: cond,
        witness: None,
        token_moves: None,
        max_rejection,
    };
    if reachable {
        report.status = "yes-instance: no rejection below bound".into();
        return Ok(report);
    }
    if !cond {
        report.status = "skipped: decoding radius too large for this codeword length".into();
        return Ok(report);
    }
    let decoded = decode_sequence(v, seq.steps(), &params.eps)?;
    check_decoded_steps(&decoded)?;
    let ctx = v.context();
    let extraction = extract_gamma_decoded(&decoded, v.n(), |a, b| ctx.member_index(a.to_index(), b.to_index()))?;
    report.token_moves = extraction.walk.as_ref().map(|w| w.moves);
    let (t, kind) = match extraction.verdict {
        GammaVerdict::BothFar { t } => (t, WitnessKind::BothFar),
        GammaVerdict::Violation { t, .. } => (t, WitnessKind::NotInLanguage),
        GammaVerdict::ValidSPath => {
            return Err(Error::AuditFailure(
                "walk extraction produced a valid path on an unreachable instance".into(),
            ))
        }
    };
    let rejection = rejections[t].clone();
    let modified_run = match kind {
        WitnessKind::NotInLanguage => Some(modified_run_check(v, &seq.steps()[t], params)?),
        WitnessKind::BothFar => None,
    };
    let exceeds = rejection.as_rational() > &params.bound;
    report.witness = Some(AuditWitness { t, kind, rejection_probability: rejection.clone(), modified_run });
    if !exceeds {
        return Err(Error::AuditFailure(format!(
            "step {t} is rejected with probability {rejection}, not above the bound {}",
            format_rational(&params.bound)
        )));
    }
    report.status = "rejection above bound".into();
    Ok(report)
}

fn modified_run_check(v: &PcrpVerifier, w: &PcrpProof, params: &PcrpParams) -> Result<ModifiedRunCheck> {
    let ell = Rational::from_integer(v.ell().into());
    let cap = &params.eps * &ell;
    let few_blanks = [w.f(), w.g()]
        .iter()
        .all(|h| Rational::from_integer(h.count_blanks().into()) <= cap);
    let eq = &params.eps * Rational::from_integer(params.q.into());
    let threshold = Rational::one() - &params.s_ckt - &eq;
    let rejection = modified_acceptance(v.pcpp(), w.word())?.complement();
    let blank_query_probability = blank_query_probability(v.pcpp(), w.word())?;
    Ok(ModifiedRunCheck { few_blanks, rejection, threshold, blank_query_probability, blank_query_bound: eq })
}

/// `Δ(f, Enc(·))` and `Δ(g, Enc(·))` for one proof.
pub fn half_distances(v: &PcrpVerifier, w: &PcrpProof) -> Result<(Value, Value)> {
    let code = v.context().code();
    Ok((distance_to_code(code, &w.f())?.0, distance_to_code(code, &w.g())?.0))
}

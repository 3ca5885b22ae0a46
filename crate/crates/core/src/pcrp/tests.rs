use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::bits::BitString;
use crate::codes::{measure_kappa, KappaScope, LocallyTestableCode, TernaryWord, BOT};
use crate::csp::{ReconfigSequence, Word};
use crate::error::Error;
use crate::pcpp::PcppChoice;
use crate::value::Rational;
use crate::verifier::Verifier;
use crate::zoo;

fn b(s: &str) -> BitString {
    s.parse().unwrap()
}

fn choices() -> [PcppChoice; 2] {
    [PcppChoice::Reference, PcppChoice::Sampled { k: 1 }]
}

fn kappa(n: usize) -> Rational {
    let code = crate::codes::Hadamard::new(n).unwrap();
    measure_kappa(&code, KappaScope::AllTernary).unwrap().kappa.unwrap()
}

fn random_proof(v: &PcrpVerifier, rng: &mut ChaCha8Rng) -> PcrpProof {
    use rand::Rng;
    let len = 2 * v.ell() + v.p();
    let w: Vec<u8> = (0..len).map(|_| rng.random_range(0..3)).collect();
    v.proof(TernaryWord::new(w)).unwrap()
}

#[test]
fn canonical_proofs_are_accepted() {
    for choice in choices() {
        for n in 1..=2 {
            let v = PcrpVerifier::new(zoo::identity_circuit(n), choice, 2).unwrap();
            let (start, goal) = v.canonical_proofs();
            assert!(start.word().is_blank_free());
            assert_eq!(start.f(), start.g());
            assert!(v.acceptance(&start).unwrap().is_one());
            assert!(v.acceptance(&goal).unwrap().is_one());
            assert!(v.acceptance_by_enumeration(&goal).unwrap().is_one());
        }
    }
}

#[test]
fn one_encoding_beside_blanks_always_accepts() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for choice in choices() {
        let v = PcrpVerifier::new(zoo::toggle_circuit(2), choice, 2).unwrap();
        let f = v.context().code().encode(&b("01")).unwrap();
        let pi = random_proof(&v, &mut rng).pi();
        let w = PcrpProof::from_parts(&f, &TernaryWord::blanks(v.ell()), &pi).unwrap();
        assert!(v.acceptance_by_enumeration(&w).unwrap().is_one());
        assert!(v.acceptance(&w).unwrap().is_one());
    }
}

#[test]
fn all_blank_halves_always_reject() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for choice in choices() {
        let v = PcrpVerifier::new(zoo::increment_circuit(2), choice, 2).unwrap();
        let blanks = TernaryWord::blanks(v.ell());
        let w = PcrpProof::from_parts(&blanks, &blanks, &random_proof(&v, &mut rng).pi()).unwrap();
        assert!(v.acceptance_by_enumeration(&w).unwrap().is_zero());
    }
}

#[test]
fn non_edge_pair_is_rejected_sometimes() {
    for choice in choices() {
        let v = PcrpVerifier::new(zoo::identity_circuit(2), choice, 2).unwrap();
        let w = v.honest(&b("00"), &b("11")).unwrap();
        let p = v.acceptance_by_enumeration(&w).unwrap();
        assert!(!p.is_one(), "{choice}: {p}");
        assert_eq!(p, v.acceptance(&w).unwrap());
    }
}

#[test]
fn closed_form_matches_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for choice in choices() {
        for n in 1..=2 {
            let v = PcrpVerifier::new(zoo::increment_circuit(n), choice, 2).unwrap();
            for _ in 0..25 {
                let w = random_proof(&v, &mut rng);
                assert_eq!(v.acceptance(&w).unwrap(), v.acceptance_by_enumeration(&w).unwrap());
            }
            // Near-honest proofs exercise the blank-free branches.
            let (start, _) = v.canonical_proofs();
            for i in (0..start.width()).step_by(3) {
                for s in [0, 1, BOT] {
                    let w = start.with_symbol(i, s);
                    assert_eq!(v.acceptance(&w).unwrap(), v.acceptance_by_enumeration(&w).unwrap());
                }
            }
        }
    }
}

#[test]
fn query_complexity_adds_eight() {
    let v = PcrpVerifier::new(zoo::increment_circuit(2), PcppChoice::Sampled { k: 2 }, 2).unwrap();
    assert_eq!(v.query_complexity(), 8 + v.pcpp().query_complexity());
    assert_eq!(v.alphabet_size(), 3);
    assert_eq!(v.p(), 2 * 2 * 2);
}

fn increment_path() -> Vec<BitString> {
    ["00", "01", "10", "11"].iter().map(|s| b(s)).collect()
}

#[test]
fn completeness_on_increment() {
    for choice in choices() {
        let v = PcrpVerifier::new(zoo::increment_circuit(2), choice, 2).unwrap();
        let path = increment_path();
        let seq = completeness_sequence(&v, &path).unwrap();
        let expected: usize = path.windows(2).map(|h| hop_transitions(&v, &h[0], &h[1]).unwrap()).sum();
        assert_eq!(seq.len(), expected + 1);
        assert_eq!(seq.first(), &v.canonical_proofs().0);
        assert_eq!(seq.last(), &v.canonical_proofs().1);
        for (t, w) in seq.steps().iter().enumerate() {
            assert!(v.acceptance(w).unwrap().is_one(), "{choice} step {t}");
        }
        // Exhaustive cross-check on a stride of steps.
        for w in seq.steps().iter().step_by(7) {
            assert!(v.acceptance_by_enumeration(w).unwrap().is_one());
        }
    }
}

#[test]
fn completeness_rejects_non_edges_and_bad_endpoints() {
    let v = PcrpVerifier::new(zoo::increment_circuit(2), PcppChoice::Reference, 2).unwrap();
    assert!(matches!(completeness_sequence(&v, &[b("00"), b("11")]), Err(Error::InvalidSequence(_))));
    assert!(completeness_sequence(&v, &[b("01"), b("10"), b("11")]).is_err());
    let trivial = hop_walk(&v, &[b("00"), b("00"), b("11")]).unwrap();
    assert_eq!(trivial.len(), hop_walk(&v, &[b("00"), b("11")]).unwrap().len());
}

#[test]
fn gamma_reproduces_completeness_path() {
    let v = PcrpVerifier::new(zoo::increment_circuit(2), PcppChoice::Reference, 2).unwrap();
    let params = PcrpParams::for_verifier(&v, kappa(2)).unwrap();
    let path = increment_path();
    let seq = completeness_sequence(&v, &path).unwrap();
    let ex = extract_gamma(&v, &seq, &params.eps).unwrap();
    assert_eq!(ex.verdict, GammaVerdict::ValidSPath);
    let mut gamma = ex.walk.unwrap().gamma;
    gamma.dedup();
    assert_eq!(gamma, path);
}

#[test]
fn grid_walk_bridges_gaps_across_tracks() {
    // α-track has gaps at steps 1 and 2 that the β-track covers.
    let z = Some(b("00"));
    let x = Some(b("01"));
    let y = Some(b("10"));
    let decoded = vec![(z.clone(), z.clone()), (None, z.clone()), (None, x.clone()), (x.clone(), x.clone()), (x.clone(), None), (y.clone(), None)];
    let walk = grid_walk(&decoded, 2).unwrap();
    assert_eq!(walk.gamma, vec![b("00"), b("00"), b("00"), b("01"), b("01"), b("01"), b("01"), b("10")]);
    assert_eq!(walk.cells[1], (Track::Beta, 0));
    assert!(walk.moves <= 2 * decoded.len());
}

#[test]
fn grid_walk_refuses_far_cells() {
    let decoded = vec![(Some(b("00")), None), (None, None)];
    assert!(grid_walk(&decoded, 2).is_err());
    let ex = extract_gamma_decoded(&decoded, 2, |_, _| true).unwrap();
    assert_eq!(ex.verdict, GammaVerdict::BothFar { t: 1 });
}

#[test]
fn decoded_halves_cannot_both_change() {
    let z = Some(b("00"));
    let o = Some(b("11"));
    assert!(check_decoded_steps(&[(z.clone(), z.clone()), (o.clone(), o.clone())]).is_err());
    assert!(check_decoded_steps(&[(z.clone(), z.clone()), (o.clone(), z.clone())]).is_err());
    assert!(check_decoded_steps(&[(z.clone(), z.clone()), (None, z.clone()), (o.clone(), z)]).is_ok());
}

#[test]
fn audit_finds_violation_on_interpolation() {
    let v = PcrpVerifier::new(zoo::identity_circuit(2), PcppChoice::Reference, 2).unwrap();
    let params = PcrpParams::for_verifier(&v, kappa(2)).unwrap();
    let (start, goal) = v.canonical_proofs();
    let seq = bitwise_interpolation(&start, &goal).unwrap();
    let report = soundness_audit(&v, &seq, &params).unwrap();
    assert!(!report.reachable);
    let w = report.witness.unwrap();
    assert!(w.rejection_probability.as_rational() > &params.bound);
}

#[test]
fn audit_covers_every_family_on_no_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for (name, circuit) in zoo::no_circuits().into_iter().filter(|(_, c)| c.n() <= 2) {
        for choice in choices() {
            let v = PcrpVerifier::new(circuit.clone(), choice, 2).unwrap();
            let params = PcrpParams::for_verifier(&v, kappa(v.n())).unwrap();
            let (start, goal) = v.canonical_proofs();
            let mut family = vec![bitwise_interpolation(&start, &goal).unwrap()];
            family.push(random_walk_sequence(&v, 12, &mut rng).unwrap());
            family.extend(blank_heavy_sequences(&v, &mut rng).unwrap());
            for seq in &family {
                let report = soundness_audit(&v, seq, &params).unwrap_or_else(|e| panic!("{name} {choice}: {e}"));
                let w = report.witness.expect("witness");
                assert!(w.rejection_probability.as_rational() > &params.bound);
                if let Some(m) = w.modified_run {
                    if m.few_blanks {
                        assert!(m.rejection.as_rational() > &m.threshold, "{name} {choice}");
                    }
                }
            }
        }
    }
}

#[test]
fn both_far_step_beats_tester_bound() {
    let v = PcrpVerifier::new(zoo::toggle_circuit(2), PcppChoice::Reference, 2).unwrap();
    let params = PcrpParams::for_verifier(&v, kappa(2)).unwrap();
    let (start, goal) = v.canonical_proofs();
    // Blank one symbol of each half: both are at distance 1/ℓ from the code.
    let mut seq = vec![start.clone(), start.with_symbol(0, BOT)];
    seq.push(seq[1].with_symbol(v.ell(), BOT));
    let far = seq[2].clone();
    let tail = bitwise_interpolation(&far, &goal).unwrap();
    let seq = ReconfigSequence::new(seq).unwrap().concat(&tail).unwrap();
    let report = soundness_audit(&v, &seq, &params).unwrap();
    let w = report.witness.unwrap();
    assert_eq!(w.kind, WitnessKind::BothFar);
    assert_eq!(w.t, 2);
    let ke = &params.kappa * &params.eps;
    assert!(w.rejection_probability.as_rational() > &(&ke * &ke));
}

#[test]
fn yes_instance_reports_without_witness() {
    let v = PcrpVerifier::new(zoo::increment_circuit(2), PcppChoice::Reference, 2).unwrap();
    let params = PcrpParams::for_verifier(&v, kappa(2)).unwrap();
    let seq = completeness_sequence(&v, &increment_path()).unwrap();
    let report = soundness_audit(&v, &seq, &params).unwrap();
    assert!(report.reachable);
    assert!(report.witness.is_none());
    assert!(report.max_rejection.is_zero());
}

#[test]
fn params_follow_the_formulas() {
    let v = PcrpVerifier::new(zoo::identity_circuit(2), PcppChoice::Reference, 2).unwrap();
    let k = kappa(2);
    let p = PcrpParams::for_verifier(&v, k.clone()).unwrap();
    let q = Rational::from_integer((v.pcpp().query_complexity() as i64).into());
    let one = Rational::from_integer(1.into());
    let expected_eps = std::cmp::min((&one - &p.s_ckt) / (Rational::from_integer(2.into()) * q), &p.rho / Rational::from_integer(3.into()));
    assert_eq!(p.eps, expected_eps);
    assert!(p.bound > Rational::from_integer(0.into()));
    assert!(radius_condition(&v, &p.eps));
}

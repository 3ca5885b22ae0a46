//! Acceptance suite: one check per criterion, each with a pinned time limit.
//! Run with `cargo test -p reconf-core --test acceptance -- --nocapture` to
//! see the PASS/FAIL lines.

use std::collections::HashSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use reconf_core::amplify::{
    amplification_report, completeness_check, random_regular, soundness_check, walk_bound_check, ExpanderCert,
};
use reconf_core::codes::{measure_kappa, rejection_probability, relative_distance, KappaScope};
use reconf_core::csp::Word;
use reconf_core::pcpp::PcppChoice;
use reconf_core::pcrp::{
    bitwise_interpolation, blank_heavy_sequences, completeness_sequence, csp_to_verifier, decode_sequence,
    extract_gamma_decoded, pcrp_to_csp, random_walk_sequence, soundness_audit, verifier_to_csp, GammaVerdict,
    PcrpParams, PcrpProof, PcrpVerifier,
};
use reconf_core::solve::{maxmin_value, pad_average_acceptance};
use reconf_core::succinct::{decide_reachability, reachability_path, simulate_tm, tm_to_circuit, Outcome};
use reconf_core::value::ratio;
use reconf_core::{
    zoo, Assignment, BitString, Cnf, Graph, Hadamard, Rational, ReconfigSequence, TernaryWord,
    Value, Verifier,
};

type Check = fn() -> String;

/// Runs `check` and reports whether it finished without panicking inside
/// `limit`.
fn run(id: usize, limit: Duration, check: Check) -> bool {
    let t0 = Instant::now();
    let outcome = catch_unwind(AssertUnwindSafe(check));
    let elapsed = t0.elapsed();
    match outcome {
        Ok(detail) if elapsed <= limit => {
            println!("PASS criterion {id:>2} ({elapsed:.2?} <= {limit:?}): {detail}");
            true
        }
        Ok(detail) => {
            println!("FAIL criterion {id:>2} (took {elapsed:.2?} > {limit:?}): {detail}");
            false
        }
        Err(e) => {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            println!("FAIL criterion {id:>2} ({elapsed:.2?}): {msg}");
            false
        }
    }
}

fn a(s: &str) -> Assignment {
    Assignment::parse_digits(s).unwrap()
}

fn example_values() -> String {
    let psi = zoo::example_formula().to_csp().unwrap();
    let v1 = maxmin_value(&psi, &a("100"), &a("010")).unwrap();
    let v2 = maxmin_value(&psi, &a("100"), &a("111")).unwrap();
    assert_eq!(v1, Value::one());
    assert_eq!(v2, Value::from_counts(2, 3));
    format!("val(100 -> 010) = {v1}, val(100 -> 111) = {v2}")
}

/// Iterates the successor function from `0^n` with a visited set.
fn orbit_reaches_ones(c: &reconf_core::BoolCircuit) -> bool {
    let ones = BitString::ones(c.n());
    let mut seen = HashSet::new();
    let mut x = BitString::zeros(c.n());
    loop {
        if x == ones {
            return true;
        }
        if !seen.insert(x.clone()) {
            return false;
        }
        x = c.eval(&x).unwrap();
    }
}

fn succinct_reachability() -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut yes = 0;
    for i in 0..200 {
        let n = 1 + i % 8;
        let c = zoo::random_circuit(n, rng.random_range(0..3 * n), &mut rng);
        let r = decide_reachability(&c).unwrap();
        assert_eq!(r.reachable, orbit_reaches_ones(&c), "random circuit {i}");
        yes += r.reachable as usize;
    }
    let space = 3;
    let mut classified = 0;
    let machines = [
        ("accepter", zoo::accepter_tm()),
        ("rejecter", zoo::rejecter_tm()),
        ("looper", zoo::looper_tm()),
        ("counter", zoo::counter_tm()),
    ];
    for (name, m) in &machines {
        for x in ["0", "01", "110"] {
            let x: BitString = x.parse().unwrap();
            let outcome = simulate_tm(m, &x, space).unwrap();
            let expected = match *name {
                "accepter" => Outcome::Accept,
                "rejecter" => Outcome::Reject,
                "looper" => Outcome::Loop,
                _ if x.len() < space => Outcome::Accept,
                _ => Outcome::Reject,
            };
            assert_eq!(outcome, expected, "{name} on {x}");
            let c = tm_to_circuit(m, &x, space).unwrap();
            let reachable = decide_reachability(&c).unwrap().reachable;
            assert_eq!(reachable, outcome == Outcome::Accept, "{name} circuit on {x}");
            classified += 1;
        }
    }
    format!("200 random circuits agree with orbit search ({yes} reachable); {classified} machine runs classified")
}

fn code_layer() -> String {
    let mut pairs = 0;
    for n in 1..=4 {
        let code = Hadamard::new(n).unwrap();
        let words = code.all_codewords();
        for (i, x) in words.iter().enumerate() {
            assert!(rejection_probability(&code, x).unwrap().is_zero());
            for y in &words[i + 1..] {
                assert_eq!(relative_distance(x, y).unwrap(), Value::from_counts(1, 2));
                pairs += 1;
            }
        }
    }
    let code = Hadamard::new(2).unwrap();
    let report = measure_kappa(&code, KappaScope::BlankFree).unwrap();
    let kappa = report.kappa.expect("some non-codeword");
    assert!(kappa > Rational::from_integer(0.into()));
    format!(
        "{pairs} codeword pairs at distance 1/2; tester accepts every codeword; kappa = {} over {} blank-free words",
        reconf_core::value::format_rational(&kappa),
        report.words_examined
    )
}

fn kappa_all(n: usize) -> Rational {
    measure_kappa(&Hadamard::new(n).unwrap(), KappaScope::AllTernary).unwrap().kappa.unwrap()
}

fn choices() -> [PcppChoice; 2] {
    [PcppChoice::Reference, PcppChoice::Sampled { k: 1 }]
}

fn pcrp_completeness() -> String {
    let mut proofs = 0usize;
    let mut enumerated = 0usize;
    let yes = zoo::yes_circuits();
    assert!(yes.len() >= 3);
    for (name, c) in &yes {
        let path = reachability_path(c).unwrap().expect("YES instance");
        for choice in choices() {
            let v = PcrpVerifier::new(c.clone(), choice, 2).unwrap();
            let seq = completeness_sequence(&v, &path).unwrap();
            for (t, w) in seq.steps().iter().enumerate() {
                assert!(v.acceptance(w).unwrap().is_one(), "{name} {choice} step {t}");
            }
            // Seed enumeration on every step at n <= 2, on a stride at n = 3.
            let stride = if v.n() <= 2 { 1 } else { 16 };
            for w in seq.steps().iter().step_by(stride) {
                assert!(v.acceptance_by_enumeration(w).unwrap().is_one(), "{name} {choice}");
                enumerated += 1;
            }
            proofs += seq.len();
        }
    }
    format!("{} YES circuits x 2 verifiers: {proofs} proofs accepted with probability 1 ({enumerated} by full seed enumeration)", yes.len())
}

struct Audited {
    circuit: String,
    verifier: PcrpVerifier,
    params: PcrpParams,
    family: &'static str,
    seq: ReconfigSequence<PcrpProof>,
}

fn audited_sequences() -> Vec<Audited> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut out = Vec::new();
    for (name, c) in zoo::no_circuits() {
        for choice in choices() {
            let v = PcrpVerifier::new(c.clone(), choice, 2).unwrap();
            let params = PcrpParams::for_verifier(&v, kappa_all(v.n())).unwrap();
            let (start, goal) = v.canonical_proofs();
            let mut fam: Vec<(&'static str, ReconfigSequence<PcrpProof>)> =
                vec![("bitwise-interpolation", bitwise_interpolation(&start, &goal).unwrap())];
            for _ in 0..2 {
                fam.push(("random-walk", random_walk_sequence(&v, 20, &mut rng).unwrap()));
            }
            for s in blank_heavy_sequences(&v, &mut rng).unwrap() {
                fam.push(("blank-heavy", s));
            }
            for (family, seq) in fam {
                let verifier = PcrpVerifier::new(c.clone(), choice, 2).unwrap();
                out.push(Audited { circuit: format!("{name}/{choice}"), verifier, params: params.clone(), family, seq });
            }
        }
    }
    out
}

fn pcrp_soundness() -> String {
    let audited = audited_sequences();
    let circuits: HashSet<&str> = audited.iter().map(|a| a.circuit.split('/').next().unwrap()).collect();
    let families: HashSet<&str> = audited.iter().map(|a| a.family).collect();
    assert!(circuits.len() >= 3 && families.len() >= 3);
    let mut min_margin: Option<Rational> = None;
    for x in &audited {
        let report = soundness_audit(&x.verifier, &x.seq, &x.params)
            .unwrap_or_else(|e| panic!("{} {}: {e}", x.circuit, x.family));
        let w = report.witness.unwrap_or_else(|| panic!("{} {}: no witness ({})", x.circuit, x.family, report.status));
        let margin = w.rejection_probability.as_rational() - &x.params.bound;
        assert!(margin > Rational::from_integer(0.into()));
        if let Some(m) = &w.modified_run {
            if m.few_blanks {
                assert!(m.rejection.as_rational() > &m.threshold, "{} {}", x.circuit, x.family);
            }
        }
        min_margin = Some(min_margin.map_or(margin.clone(), |m| std::cmp::min(m, margin)));
    }
    format!(
        "{} sequences over {} NO circuits and {} families: zero counterexamples, smallest rejection margin {}",
        audited.len(),
        circuits.len(),
        families.len(),
        reconf_core::value::format_rational(&min_margin.unwrap())
    )
}

fn gamma_extraction() -> String {
    let (mut walks, mut both_far, mut max_ratio) = (0usize, 0usize, 0f64);
    for x in audited_sequences() {
        let v = &x.verifier;
        let decoded = decode_sequence(v, x.seq.steps(), &x.params.eps).unwrap();
        let ctx = v.context();
        let ex = extract_gamma_decoded(&decoded, v.n(), |p, q| ctx.member_index(p.to_index(), q.to_index()))
            .unwrap_or_else(|e| panic!("{} {}: {e}", x.circuit, x.family));
        match ex.verdict {
            GammaVerdict::ValidSPath => panic!("{} {}: valid path on a NO instance", x.circuit, x.family),
            GammaVerdict::BothFar { .. } => both_far += 1,
            GammaVerdict::Violation { .. } => {
                let walk = ex.walk.unwrap();
                assert!(walk.moves <= 2 * x.seq.len());
                max_ratio = max_ratio.max(walk.moves as f64 / x.seq.len() as f64);
                walks += 1;
            }
        }
    }
    assert!(walks > 0);
    format!("{walks} sequences meet the closeness precondition and yield a violating step (moves/|seq| <= {max_ratio:.2}); {both_far} have a both-far step")
}

fn ternary_words(len: usize) -> impl Iterator<Item = Vec<u8>> {
    (0..3u64.pow(len as u32)).map(move |i| TernaryWord::from_index(i, len).into_vec())
}

fn pcp_csp_bridge() -> String {
    let mut exhaustive = 0usize;
    for choice in choices() {
        let v = PcrpVerifier::new(zoo::identity_circuit(1), choice, 1).unwrap();
        let (csp, start, goal) = pcrp_to_csp(&v).unwrap();
        assert!(3usize.pow(v.proof_len() as u32) <= 1 << 12);
        assert!(csp.value_of(&start).unwrap().is_one() && csp.value_of(&goal).unwrap().is_one());
        for w in ternary_words(v.proof_len()) {
            assert_eq!(csp.value_of(&Assignment::new(w.clone())).unwrap(), v.acceptance_probability(&w).unwrap());
            exhaustive += 1;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut sampled = 0usize;
    for choice in choices() {
        let v = PcrpVerifier::new(zoo::increment_circuit(1), choice, 2).unwrap();
        assert!(3usize.pow(v.proof_len() as u32) > 1 << 12);
        let csp = verifier_to_csp(&v).unwrap();
        for _ in 0..10_000 {
            let w: Vec<u8> = (0..v.proof_len()).map(|_| rng.random_range(0..3)).collect();
            assert_eq!(csp.value_of(&Assignment::new(w.clone())).unwrap(), v.acceptance_probability(&w).unwrap());
            sampled += 1;
        }
    }
    let psi = zoo::example_formula().to_csp().unwrap();
    let back = verifier_to_csp(&csp_to_verifier(&psi).unwrap()).unwrap();
    for i in 0..8u64 {
        let x = Assignment::new(BitString::from_index(i, 3).bits().iter().map(|&b| b as u8).collect());
        assert_eq!(psi.value_of(&x).unwrap(), back.value_of(&x).unwrap());
    }
    format!("{exhaustive} proofs checked exhaustively, {sampled} sampled on larger instances, example round trip preserves all 8 values")
}

fn padding() -> String {
    // A 10-variable 3-CNF with a planted satisfying goal.
    let n = 10;
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let goal_bits: Vec<bool> = (0..n).map(|_| rng.random_bool(0.5)).collect();
    let mut clauses = Vec::new();
    while clauses.len() < 40 {
        let clause: Vec<i64> = (0..3)
            .map(|_| {
                let v = rng.random_range(0..n);
                if rng.random_bool(0.5) { v as i64 + 1 } else { -(v as i64 + 1) }
            })
            .collect();
        if clause.iter().any(|&l| goal_bits[l.unsigned_abs() as usize - 1] == (l > 0)) {
            clauses.push(clause);
        }
    }
    let psi = Cnf { num_vars: n, clauses }.to_csp().unwrap();
    let v = csp_to_verifier(&psi).unwrap();
    let goal = Assignment::new(goal_bits.iter().map(|&b| b as u8).collect());
    assert!(v.acceptance_probability(goal.symbols()).unwrap().is_one());
    let mut worst = Value::one();
    for len in [11usize, 50, 100] {
        // A random single-flip walk from a random start ending at the goal.
        let mut cur: Vec<u8> = (0..n).map(|_| rng.random_range(0..2)).collect();
        let mut steps = vec![Assignment::new(cur.clone())];
        while steps.len() + cur.iter().zip(goal.values()).filter(|(x, y)| x != y).count() < len {
            let i = rng.random_range(0..n);
            cur[i] ^= 1;
            steps.push(Assignment::new(cur.clone()));
        }
        for i in 0..n {
            if cur[i] != goal.values()[i] {
                cur[i] = goal.values()[i];
                steps.push(Assignment::new(cur.clone()));
            }
        }
        let seq = ReconfigSequence::new(steps).unwrap();
        let l = seq.len();
        assert!(l <= 100);
        let (padded, avg) = pad_average_acceptance(&v, &seq, &goal, 1 << n).unwrap();
        assert_eq!(padded.len(), 1 << n);
        let floor = Rational::from_integer(1.into()) - ratio(l as i64, 1i64 << n);
        assert!(avg.as_rational() >= &floor, "L = {l}: {avg} < 1 - L/2^n");
        worst = std::cmp::min(worst, avg);
    }
    format!("padded averages >= 1 - L/1024 for L in (11, 50, 100); smallest average {worst}")
}

fn expander_walks() -> String {
    let mut certs = vec![ExpanderCert::complete(5).unwrap(), ExpanderCert::complete(6).unwrap()];
    for seed in 1..=5 {
        certs.push(random_regular(8, 3, seed).unwrap());
    }
    let mut checks = 0usize;
    for cert in &certs {
        let n = cert.n();
        for mask in 0u32..1 << n {
            let set: Vec<usize> = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
            for ell in 1..=3 {
                walk_bound_check(cert, &set, ell).unwrap();
                checks += 1;
            }
        }
    }
    format!("sandwich holds in {checks} (expander, set, walk length) cases")
}

fn clique_amplification() -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    // (graph, start, goal): each pair of cliques differs by one swap.
    let mut instances: Vec<(Graph, Vec<usize>, Vec<usize>)> = vec![
        (Graph::from_edges(5, &[(0, 1), (0, 2), (1, 2), (1, 3), (2, 3), (3, 4)]).unwrap(), vec![0, 1, 2], vec![1, 2, 3]),
        (Graph::from_edges(6, &[(0, 1), (0, 2), (1, 2), (2, 3), (3, 4), (3, 5), (4, 5), (0, 5)]).unwrap(), vec![0, 1, 2], vec![0, 1, 2]),
        (Graph::from_edges(6, &[(0, 1), (0, 2), (1, 2), (3, 4), (3, 5), (4, 5), (2, 3)]).unwrap(), vec![0, 1, 2], vec![3, 4, 5]),
    ];
    while instances.len() < 7 {
        let n = rng.random_range(5..=7);
        let mut g = zoo::random_graph(n, 1, 3, &mut rng);
        // Plant two triangles sharing an edge.
        for (u, v) in [(0, 1), (0, 2), (1, 2), (1, 3), (2, 3)] {
            g.add_edge(u, v).unwrap();
        }
        if reconf_core::solve::clique_number(&g).unwrap() == 3 {
            instances.push((g, vec![0, 1, 2], vec![1, 2, 3]));
        }
    }
    let (mut completeness, mut sound_nonvacuous, mut sound_total) = (0, 0, 0);
    for (g, s, t) in &instances {
        let n = g.num_vertices();
        let mut certs = vec![ExpanderCert::complete(n).unwrap()];
        if n % 2 == 0 || n > 6 {
            if let Ok(c) = random_regular(n, if n % 2 == 0 { 3 } else { 4 }, 3) {
                certs.push(c);
            }
        }
        for cert in &certs {
            for ell in 1..=2 {
                let swap = s.iter().filter(|v| !t.contains(v)).count() == 1;
                if swap {
                    completeness_check(g, cert, ell, s, t).unwrap();
                    completeness += 1;
                }
                for eps in [ratio(1, 10), ratio(1, 2), ratio(9, 10)] {
                    let r = soundness_check(g, cert, ell, s, t, &eps).unwrap();
                    sound_total += 1;
                    sound_nonvacuous += r.hypothesis as usize;
                }
            }
        }
    }
    let cert = ExpanderCert::complete(4).unwrap();
    let report = amplification_report(&ratio(1, 2), &cert, 2).unwrap();
    assert_eq!(report.nu, ratio(7, 5));
    format!(
        "{} instances: {completeness} completeness bounds hold, {sound_total} soundness checks hold ({sound_nonvacuous} with the hypothesis met); nu(1/2) = 7/5",
        instances.len()
    )
}

#[test]
fn acceptance_criteria() {
    let criteria: [(usize, Duration, Check); 10] = [
        (1, Duration::from_secs(1), example_values),
        (2, Duration::from_secs(30), succinct_reachability),
        (3, Duration::from_secs(10), code_layer),
        (4, Duration::from_secs(300), pcrp_completeness),
        (5, Duration::from_secs(600), pcrp_soundness),
        (6, Duration::from_secs(600), gamma_extraction),
        (7, Duration::from_secs(300), pcp_csp_bridge),
        (8, Duration::from_secs(60), padding),
        (9, Duration::from_secs(60), expander_walks),
        (10, Duration::from_secs(300), clique_amplification),
    ];
    let failed: Vec<usize> = criteria
        .iter()
        .filter(|(id, limit, check)| !run(*id, *limit, *check))
        .map(|(id, _, _)| *id)
        .collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}

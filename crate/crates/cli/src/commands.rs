//! Subcommand definitions and their handlers.

use std::path::{Path, PathBuf};

use clap::{Args, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use reconf_core::amplify::{
    amplification_report, completeness_check, product_graph, random_regular, soundness_check, walk_bound_check,
    ExpanderCert,
};
use reconf_core::codes::{measure_kappa, KappaScope, DEFAULT_KAPPA_CAP};
use reconf_core::dimacs::parse_dimacs;
use reconf_core::pcpp::{lckt_distance, modified_acceptance, LcktContext, PcppChoice, DEFAULT_REPS};
use reconf_core::pcrp::{
    bitwise_interpolation, blank_heavy_sequences, completeness_sequence, pcrp_to_csp, random_walk_sequence,
    soundness_audit, PcrpParams, PcrpProof, PcrpVerifier,
};
use reconf_core::solve::{clique_maxmin, maxmin_value_capped, witness_sequence_capped, CliqueInstance};
use reconf_core::succinct::{decide_reachability, reachability_path, tm_to_circuit, TmSpec};
use reconf_core::value::{format_rational, parse_rational, Rational};
use reconf_core::{
    Assignment, BitString, BoolCircuit, ConstraintSystem, Error, Graph, Hadamard, LocallyTestableCode,
    ReconfigSequence, TernaryWord, Verifier,
};

use crate::{parse_choice, Cli, CliError, Command, Output};

type CmdResult = Result<Output, CliError>;

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, CliError> {
    serde_json::from_str(&read(path)?)
        .map_err(|e| CliError::Core(Error::Parse(format!("{}: {e}", path.display()))))
}

fn to_json<T: Serialize>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).expect("serializable")
}

fn pretty(v: &serde_json::Value) -> String {
    serde_json::to_string_pretty(v).expect("serializable")
}

fn parse_vertices(s: &str) -> Result<Vec<usize>, CliError> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|t| t.trim().parse().map_err(|_| CliError::Core(Error::Parse(format!("bad vertex {t:?}")))))
        .collect()
}

#[derive(Args, Debug)]
pub struct SolveCsp {
    /// CNF in DIMACS form, optionally with `c start` / `c goal` lines.
    #[arg(long, conflicts_with = "instance", required_unless_present = "instance")]
    dimacs: Option<PathBuf>,
    /// Constraint system as JSON.
    #[arg(long)]
    instance: Option<PathBuf>,
    /// Start assignment as a digit string (overrides the DIMACS comment).
    #[arg(long)]
    start: Option<String>,
    #[arg(long)]
    goal: Option<String>,
    /// Also print an optimal sequence.
    #[arg(long)]
    witness: bool,
}

#[derive(Args, Debug)]
pub struct SolveClique {
    /// Instance JSON `{graph, start, goal}`.
    #[arg(long, conflicts_with = "graph", required_unless_present = "graph")]
    instance: Option<PathBuf>,
    /// Graph as a JSON edge list `{n, edges}`.
    #[arg(long, requires_all = ["start", "goal"])]
    graph: Option<PathBuf>,
    /// Comma-separated vertices.
    #[arg(long, allow_hyphen_values = true)]
    start: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    goal: Option<String>,
}

#[derive(Subcommand, Debug)]
pub enum Succinct {
    /// Decide whether 1^n is reachable from 0^n.
    Decide {
        #[arg(long)]
        circuit: PathBuf,
        /// Also print the orbit from 0^n to 1^n.
        #[arg(long)]
        path: bool,
    },
    /// Build the configuration-graph circuit of a space-bounded machine.
    FromTm {
        #[arg(long)]
        tm: PathBuf,
        #[arg(long)]
        input: String,
        #[arg(long)]
        space: usize,
    },
}

#[derive(Subcommand, Debug)]
pub enum Codes {
    /// Hadamard encoding of a message.
    Encode {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        msg: String,
    },
    /// Measure the tester constant by exact rejection probabilities.
    Kappa {
        #[arg(long)]
        n: usize,
        /// Restrict to words without blanks.
        #[arg(long)]
        bot_free: bool,
        /// Examine this many random words instead of all of them.
        #[arg(long)]
        samples: Option<u64>,
    },
}

#[derive(Args, Debug, Clone)]
pub struct VerifierOpts {
    /// Successor circuit JSON.
    #[arg(long)]
    circuit: PathBuf,
    /// `reference` or `sampled:k`.
    #[arg(long, default_value = "reference", value_parser = parse_choice)]
    pcpp: PcppChoice,
    /// Copies of the encoded pair in the honest proof.
    #[arg(long, default_value_t = DEFAULT_REPS)]
    reps: usize,
}

#[derive(Args, Debug)]
pub struct PcppCmd {
    #[command(flatten)]
    opts: VerifierOpts,
    /// Word `f∘g∘π` over {0,1,B}.
    #[arg(long, conflicts_with = "pair")]
    word: Option<String>,
    /// Use the honest word for the pair `alpha:beta`.
    #[arg(long)]
    pair: Option<String>,
}

#[derive(Args, Debug)]
pub struct KappaOpt {
    /// Tester constant; measured exactly when omitted.
    #[arg(long)]
    kappa: Option<String>,
}

#[derive(Subcommand, Debug)]
pub enum Pcrp {
    /// Canonical start and goal proofs with the instantiated parameters.
    Build {
        #[command(flatten)]
        opts: VerifierOpts,
        #[command(flatten)]
        kappa: KappaOpt,
    },
    /// Exact acceptance probability of one proof.
    AcceptProb {
        #[command(flatten)]
        opts: VerifierOpts,
        /// Proof JSON `{ell, p, word}`.
        #[arg(long, conflicts_with = "word", required_unless_present = "word")]
        proof: Option<PathBuf>,
        /// Proof word over {0,1,B}.
        #[arg(long)]
        word: Option<String>,
    },
    /// The completeness sequence along the orbit of a YES instance.
    CompleteSeq {
        #[command(flatten)]
        opts: VerifierOpts,
    },
    /// Audit a proof sequence for a step rejected above the soundness bound.
    Audit {
        #[command(flatten)]
        opts: VerifierOpts,
        #[command(flatten)]
        kappa: KappaOpt,
        /// Sequence JSON `{ell, p, steps}`.
        #[arg(long, conflicts_with = "family", required_unless_present = "family")]
        sequence: Option<PathBuf>,
        /// Generate the sequence: bitwise, random-walk, blank-heavy or complete.
        #[arg(long)]
        family: Option<String>,
    },
    /// The verifier as a constraint system over {0,1,B}.
    ToCsp {
        #[command(flatten)]
        opts: VerifierOpts,
    },
}

#[derive(Args, Debug)]
pub struct ExpanderOpts {
    /// `complete` or `random:d:seed`.
    #[arg(long, default_value = "complete")]
    expander: String,
    /// Vertices per walk.
    #[arg(long, default_value_t = 2)]
    ell: usize,
}

#[derive(Subcommand, Debug)]
pub enum Amplify {
    /// Build the walk product and report its parameters and lemma checks.
    Build {
        /// Base graph JSON `{n, edges}`.
        #[arg(long)]
        graph: PathBuf,
        #[command(flatten)]
        expander: ExpanderOpts,
        #[arg(long, default_value = "1/2")]
        eps: String,
        /// Start clique (comma-separated) for the lemma checks.
        #[arg(long, requires = "goal", allow_hyphen_values = true)]
        start: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        goal: Option<String>,
    },
    /// Check the walk sandwich for every vertex subset.
    CheckBounds {
        /// Number of vertices of the expander.
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        expander: ExpanderOpts,
    },
}

#[derive(Serialize, Deserialize)]
struct SequenceFile {
    ell: usize,
    p: usize,
    steps: Vec<TernaryWord>,
}

impl SequenceFile {
    fn from_seq(v: &PcrpVerifier, seq: &ReconfigSequence<PcrpProof>) -> Self {
        SequenceFile { ell: v.ell(), p: v.p(), steps: seq.steps().iter().map(|w| w.word().clone()).collect() }
    }

    fn into_seq(self) -> Result<ReconfigSequence<PcrpProof>, CliError> {
        let steps = self
            .steps
            .into_iter()
            .map(|w| PcrpProof::new(self.ell, self.p, w))
            .collect::<reconf_core::Result<Vec<_>>>()?;
        Ok(ReconfigSequence::new(steps)?)
    }
}

pub fn dispatch(cli: &Cli) -> CmdResult {
    let g = &cli.global;
    match &cli.command {
        Command::SolveCsp(c) => solve_csp(c, g.state_cap),
        Command::SolveClique(c) => solve_clique(c),
        Command::Succinct(c) => succinct(c),
        Command::Codes(c) => codes(c, g.seed),
        Command::Pcpp(c) => pcpp(c),
        Command::Pcrp(c) => pcrp(c, g.seed),
        Command::Amplify(c) => amplify(c),
        Command::Schema { name } => {
            let s = crate::schema::schema(name)
                .ok_or_else(|| CliError::Core(Error::InvalidParameter(format!(
                    "no schema named {name:?}; available: {}",
                    crate::schema::NAMES.join(", ")
                ))))?;
            Ok(Output { text: pretty(&s), json: s })
        }
    }
}

fn solve_csp(c: &SolveCsp, cap: u64) -> CmdResult {
    let (psi, mut start, mut goal): (ConstraintSystem, Option<Assignment>, Option<Assignment>) =
        match (&c.dimacs, &c.instance) {
            (Some(p), _) => {
                let inst = parse_dimacs(&read(p)?)?;
                (inst.cnf.to_csp()?, inst.start, inst.goal)
            }
            (None, Some(p)) => (read_json(p)?, None, None),
            (None, None) => unreachable!("clap requires one input"),
        };
    if let Some(s) = &c.start {
        start = Some(Assignment::parse_digits(s)?);
    }
    if let Some(s) = &c.goal {
        goal = Some(Assignment::parse_digits(s)?);
    }
    let missing = |w: &str| CliError::Core(Error::InvalidAssignment(format!("no {w} assignment given")));
    let start = start.ok_or_else(|| missing("start"))?;
    let goal = goal.ok_or_else(|| missing("goal"))?;
    let value = maxmin_value_capped(&psi, &start, &goal, cap)?;
    let mut json = json!({"value": value.to_string(), "num_constraints": psi.num_constraints()});
    let mut text = value.to_string();
    if c.witness {
        let w = witness_sequence_capped(&psi, &start, &goal, &value, cap)?.expect("optimal value is achievable");
        let steps: Vec<String> = w.steps().iter().map(|a| a.to_string()).collect();
        for s in &steps {
            text.push('\n');
            text.push_str(s);
        }
        json["witness"] = json!(steps);
    }
    Ok(Output { json, text })
}

fn solve_clique(c: &SolveClique) -> CmdResult {
    let inst = match (&c.instance, &c.graph) {
        (Some(p), _) => read_json::<CliqueInstance>(p)?,
        (None, Some(p)) => CliqueInstance {
            graph: read_json::<Graph>(p)?,
            start: parse_vertices(c.start.as_deref().unwrap_or(""))?,
            goal: parse_vertices(c.goal.as_deref().unwrap_or(""))?,
        },
        (None, None) => unreachable!("clap requires one input"),
    };
    let value = clique_maxmin(&inst)?;
    Ok(Output { json: json!({"value": value}), text: value.to_string() })
}

fn succinct(c: &Succinct) -> CmdResult {
    match c {
        Succinct::Decide { circuit, path } => {
            let s: BoolCircuit = read_json(circuit)?;
            let r = decide_reachability(&s)?;
            let mut json = to_json(&r);
            let mut text = if r.reachable { "YES".to_string() } else { "NO".to_string() };
            if *path {
                if let Some(p) = reachability_path(&s)? {
                    let p: Vec<String> = p.iter().map(|b| b.to_string()).collect();
                    text = format!("{text}\n{}", p.join("\n"));
                    json["path"] = json!(p);
                }
            }
            Ok(Output { json, text })
        }
        Succinct::FromTm { tm, input, space } => {
            let m: TmSpec = read_json(tm)?;
            let x: BitString = input.parse()?;
            let s = tm_to_circuit(&m, &x, *space)?;
            let json = to_json(&s);
            Ok(Output { text: pretty(&json), json })
        }
    }
}

fn kappa_scope(ell: usize, bot_free: bool, samples: Option<u64>, seed: u64) -> KappaScope {
    match samples {
        Some(samples) => KappaScope::Sampled { samples, seed },
        None if bot_free => KappaScope::BlankFree,
        None => {
            let all = 3u128.checked_pow(ell as u32).unwrap_or(u128::MAX);
            if all <= DEFAULT_KAPPA_CAP as u128 {
                KappaScope::AllTernary
            } else {
                KappaScope::Sampled { samples: 1 << 16, seed }
            }
        }
    }
}

fn codes(c: &Codes, seed: u64) -> CmdResult {
    match c {
        Codes::Encode { n, msg } => {
            let code = Hadamard::new(*n)?;
            let m: BitString = msg.parse()?;
            if m.len() != *n {
                return Err(Error::WidthMismatch { expected: *n, actual: m.len() }.into());
            }
            let w = code.encode(&m)?;
            Ok(Output { json: json!({"n": n, "ell": code.ell(), "codeword": w.to_string()}), text: w.to_string() })
        }
        Codes::Kappa { n, bot_free, samples } => {
            let code = Hadamard::new(*n)?;
            let scope = kappa_scope(code.ell(), *bot_free, *samples, seed);
            let r = measure_kappa(&code, scope)?;
            let text = match &r.kappa {
                Some(k) => format!("{} ({} words, {} non-codewords)", format_rational(k), r.words_examined, r.non_codewords),
                None => "none: every examined word is a codeword".into(),
            };
            Ok(Output { json: to_json(&r), text })
        }
    }
}

fn verifier(opts: &VerifierOpts) -> Result<PcrpVerifier, CliError> {
    let s: BoolCircuit = read_json(&opts.circuit)?;
    Ok(PcrpVerifier::new(s, opts.pcpp, opts.reps)?)
}

fn parse_pair(s: &str) -> Result<(BitString, BitString), CliError> {
    let (a, b) = s
        .split_once(':')
        .ok_or_else(|| CliError::Core(Error::Parse(format!("expected alpha:beta, got {s:?}"))))?;
    Ok((a.parse()?, b.parse()?))
}

fn pcpp(c: &PcppCmd) -> CmdResult {
    let v = verifier(&c.opts)?;
    let p = v.pcpp();
    let params = p.params();
    let mut json = json!({
        "pcpp": p.name(),
        "params": to_json(&params),
        "seeds": p.seed_count(),
        "input_len": p.input_len(),
        "proof_len": p.pi_len(),
    });
    let word = match (&c.word, &c.pair) {
        (Some(w), _) => Some(w.parse::<TernaryWord>()?),
        (None, Some(pair)) => {
            let (a, b) = parse_pair(pair)?;
            Some(v.honest(&a, &b)?.word().clone())
        }
        (None, None) => None,
    };
    let mut text = format!(
        "{} verifier: delta = {}, soundness = {}, queries = {}, seeds = {}",
        p.name(),
        format_rational(&params.delta),
        format_rational(&params.soundness),
        params.query_complexity,
        p.seed_count()
    );
    if let Some(w) = word {
        if w.len() != p.proof_len() {
            return Err(Error::WidthMismatch { expected: p.proof_len(), actual: w.len() }.into());
        }
        let acc = p.acceptance_probability(w.as_slice())?;
        let modified = modified_acceptance(p, &w)?;
        let ctx: &LcktContext = v.context();
        let dist = lckt_distance(ctx, &w.slice(0..2 * v.ell()))?;
        json["word"] = json!(w.to_string());
        json["acceptance"] = json!(acc.to_string());
        json["modified_acceptance"] = json!(modified.to_string());
        json["distance_to_language"] = json!(dist.to_string());
        text.push_str(&format!("\nacceptance {acc}\nmodified acceptance {modified}\ndistance to language {dist}"));
    }
    Ok(Output { json, text })
}

fn params_for(v: &PcrpVerifier, k: &KappaOpt, seed: u64) -> Result<PcrpParams, CliError> {
    let kappa = match &k.kappa {
        Some(s) => parse_rational(s)?,
        None => {
            let code = v.context().code();
            measure_kappa(code, kappa_scope(code.ell(), false, None, seed))?
                .kappa
                .ok_or_else(|| CliError::Core(Error::InvalidInstance("no non-codeword to measure kappa on".into())))?
        }
    };
    Ok(PcrpParams::for_verifier(v, kappa)?)
}

fn pcrp(c: &Pcrp, seed: u64) -> CmdResult {
    match c {
        Pcrp::Build { opts, kappa } => {
            let v = verifier(opts)?;
            let params = params_for(&v, kappa, seed)?;
            let (start, goal) = v.canonical_proofs();
            let json = json!({
                "n": v.n(),
                "ell": v.ell(),
                "p": v.p(),
                "pcpp": opts.pcpp.to_string(),
                "query_complexity": v.query_complexity(),
                "seeds": v.seed_count(),
                "randomness_bits": v.randomness_bits(),
                "start": to_json(&start),
                "goal": to_json(&goal),
                "params": to_json(&params),
            });
            let text = format!(
                "start {}\ngoal  {}\nell = {}, p = {}, queries = {}, seeds = {}\neps = {}, bound = {}",
                start.word(),
                goal.word(),
                v.ell(),
                v.p(),
                v.query_complexity(),
                v.seed_count(),
                format_rational(&params.eps),
                format_rational(&params.bound)
            );
            Ok(Output { json, text })
        }
        Pcrp::AcceptProb { opts, proof, word } => {
            let v = verifier(opts)?;
            let w = match (proof, word) {
                (Some(p), _) => {
                    let w: PcrpProof = read_json(p)?;
                    if w.ell() != v.ell() || w.p() != v.p() {
                        return Err(Error::InvalidInstance(format!(
                            "proof regions (ell = {}, p = {}) do not match the verifier (ell = {}, p = {})",
                            w.ell(),
                            w.p(),
                            v.ell(),
                            v.p()
                        ))
                        .into());
                    }
                    w
                }
                (None, Some(s)) => v.proof(s.parse()?)?,
                (None, None) => unreachable!("clap requires one input"),
            };
            let acc = v.acceptance(&w)?;
            Ok(Output { json: json!({"acceptance": acc.to_string(), "seeds": v.seed_count()}), text: acc.to_string() })
        }
        Pcrp::CompleteSeq { opts } => {
            let v = verifier(opts)?;
            let path = reachability_path(v.context().circuit())?
                .ok_or_else(|| CliError::Core(Error::InvalidInstance("1^n is not reachable: no completeness sequence".into())))?;
            let seq = completeness_sequence(&v, &path)?;
            let json = to_json(&SequenceFile::from_seq(&v, &seq));
            Ok(Output { text: pretty(&json), json })
        }
        Pcrp::Audit { opts, kappa, sequence, family } => {
            let v = verifier(opts)?;
            let params = params_for(&v, kappa, seed)?;
            let seq = match (sequence, family) {
                (Some(p), _) => read_json::<SequenceFile>(p)?.into_seq()?,
                (None, Some(f)) => generate_family(&v, f, seed)?,
                (None, None) => unreachable!("clap requires one input"),
            };
            let report = soundness_audit(&v, &seq, &params)?;
            let mut text = report.status.clone();
            if let Some(w) = &report.witness {
                text.push_str(&format!(
                    "\nstep {} ({:?}) rejected with probability {} > {}",
                    w.t,
                    w.kind,
                    w.rejection_probability,
                    format_rational(&params.bound)
                ));
            }
            Ok(Output { json: to_json(&report), text })
        }
        Pcrp::ToCsp { opts } => {
            let v = verifier(opts)?;
            let (csp, start, goal) = pcrp_to_csp(&v)?;
            let json = json!({"csp": to_json(&csp), "start": start.to_string(), "goal": goal.to_string()});
            Ok(Output { text: pretty(&json), json })
        }
    }
}

fn generate_family(v: &PcrpVerifier, family: &str, seed: u64) -> Result<ReconfigSequence<PcrpProof>, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (start, goal) = v.canonical_proofs();
    Ok(match family {
        "bitwise" => bitwise_interpolation(&start, &goal)?,
        "random-walk" => random_walk_sequence(v, 4 * v.ell(), &mut rng)?,
        "blank-heavy" => blank_heavy_sequences(v, &mut rng)?.swap_remove(0),
        "complete" => {
            let path = reachability_path(v.context().circuit())?
                .ok_or_else(|| CliError::Core(Error::InvalidInstance("1^n is not reachable".into())))?;
            completeness_sequence(v, &path)?
        }
        other => {
            return Err(Error::InvalidParameter(format!(
                "unknown family {other:?}: use bitwise, random-walk, blank-heavy or complete"
            ))
            .into())
        }
    })
}

fn expander(spec: &str, n: usize) -> Result<ExpanderCert, CliError> {
    if spec == "complete" {
        return Ok(ExpanderCert::complete(n)?);
    }
    let parts: Vec<&str> = spec.split(':').collect();
    match parts.as_slice() {
        ["random", d, seed] => {
            let bad = || CliError::Core(Error::Parse(format!("bad expander spec {spec:?}")));
            Ok(random_regular(n, d.parse().map_err(|_| bad())?, seed.parse().map_err(|_| bad())?)?)
        }
        _ => Err(Error::Parse(format!("expected `complete` or `random:d:seed`, got {spec:?}")).into()),
    }
}

fn amplify(c: &Amplify) -> CmdResult {
    match c {
        Amplify::Build { graph, expander: x, eps, start, goal } => {
            let g: Graph = read_json(graph)?;
            let cert = expander(&x.expander, g.num_vertices())?;
            let eps = parse_rational(eps)?;
            let h = product_graph(&g, &cert, x.ell)?;
            let report = amplification_report(&eps, &cert, x.ell)?;
            let mut lemma_checks = json!({});
            if let (Some(s), Some(t)) = (start, goal) {
                let (s, t) = (parse_vertices(s)?, parse_vertices(t)?);
                if s.iter().filter(|v| !t.contains(v)).count() == 1 && s.len() == t.len() {
                    lemma_checks["completeness"] = to_json(&completeness_check(&g, &cert, x.ell, &s, &t)?);
                }
                lemma_checks["soundness"] = to_json(&soundness_check(&g, &cert, x.ell, &s, &t, &eps)?);
            }
            let json = json!({
                "N": h.num_walks(),
                "product_edges": h.graph().num_edges(),
                "d": cert.d,
                "lambda": format_rational(&cert.lambda),
                "nu": format_rational(&report.nu),
                "factor": format_rational(&report.factor),
                "delta": report.delta,
                "expander_condition": report.expander_condition,
                "lemma_checks": lemma_checks,
            });
            Ok(Output { text: pretty(&json), json })
        }
        Amplify::CheckBounds { n, expander: x } => {
            if *n > 20 {
                return Err(Error::Capacity { what: "vertex subsets".into(), needed: 1u128 << n, cap: 1 << 20 }.into());
            }
            let cert = expander(&x.expander, *n)?;
            let mut vacuous = 0u64;
            let mut tightest: Option<Rational> = None;
            for mask in 0u64..1 << n {
                let set: Vec<usize> = (0..*n).filter(|&v| mask >> v & 1 == 1).collect();
                let b = walk_bound_check(&cert, &set, x.ell)?;
                vacuous += b.lower_vacuous as u64;
                let gap = std::cmp::min(b.exact.as_rational() - &b.lower, &b.upper - b.exact.as_rational());
                tightest = Some(tightest.map_or(gap.clone(), |t| std::cmp::min(t, gap)));
            }
            let json = json!({
                "n": n,
                "ell": x.ell,
                "d": cert.d,
                "lambda": format_rational(&cert.lambda),
                "sets_checked": 1u64 << n,
                "vacuous_lower_bounds": vacuous,
                "smallest_slack": tightest.map(|t| format_rational(&t)),
            });
            let text = format!("sandwich holds for all {} subsets (lambda = {})", 1u64 << n, format_rational(&cert.lambda));
            Ok(Output { json, text })
        }
    }
}

//! Checkers for the expander walk sandwich and for the completeness and
//! soundness of the walk product, against brute-force clique solvers.

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::amplify::expander::ExpanderCert;
use crate::amplify::product::{product_graph, walk_count, WalkGraph};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::solve::{clique_maxmin, clique_number, clique_sequence_value, CliqueInstance};
use crate::value::{format_rational, rational_to_f64, Rational, Value};

fn int(k: usize) -> Rational {
    Rational::from_integer(k.into())
}

fn pow(r: &Rational, e: usize) -> Rational {
    num_traits::pow(r.clone(), e)
}

/// `(base)^ell` with the base clamped at 0 first.
fn clamped_pow(base: Rational, ell: usize) -> Rational {
    if base.is_negative() {
        Rational::zero()
    } else {
        pow(&base, ell)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WalkBound {
    pub set_size: usize,
    #[serde(with = "crate::value::rational_str")]
    pub lower: Rational,
    /// Fraction of walks that stay inside the set.
    pub exact: Value,
    #[serde(with = "crate::value::rational_str")]
    pub upper: Rational,
    /// The unclamped lower base `|S|/|V| − 2λ/d` was negative.
    pub lower_vacuous: bool,
}

/// Exact fraction of walks with `ell` vertices that stay in `set`, and the
/// bounds `(|S|/|V| ∓ 2λ/d)^ell` around it. Fails with
/// [`Error::AuditFailure`] if the sandwich breaks.
pub fn walk_bound_check(cert: &ExpanderCert, set: &[usize], ell: usize) -> Result<WalkBound> {
    let x = &cert.graph;
    let n = x.num_vertices();
    if ell == 0 {
        return Err(Error::InvalidParameter("a walk has at least one vertex".into()));
    }
    let mut inside = vec![false; n];
    for &v in set {
        *inside.get_mut(v).ok_or_else(|| Error::InvalidInstance(format!("vertex {v} outside the expander")))? = true;
    }
    let size = inside.iter().filter(|&&b| b).count();
    let mut counts: Vec<u128> = inside.iter().map(|&b| b as u128).collect();
    for _ in 1..ell {
        counts = (0..n)
            .map(|v| if inside[v] { x.neighbors(v).iter().map(|&u| counts[u]).sum() } else { 0 })
            .collect();
    }
    let stay: u128 = counts.iter().sum();
    let exact = Value::from_counts(stay, walk_count(x, ell));
    let density = int(size) / int(n);
    let slack = int(2) * cert.ratio();
    let lower_base = &density - &slack;
    let report = WalkBound {
        set_size: size,
        lower_vacuous: lower_base.is_negative(),
        lower: clamped_pow(lower_base, ell),
        exact,
        upper: pow(&(density + slack), ell),
    };
    let e = report.exact.as_rational();
    if e < &report.lower || e > &report.upper {
        return Err(Error::AuditFailure(format!(
            "walk fraction {} outside [{}, {}]",
            report.exact,
            format_rational(&report.lower),
            format_rational(&report.upper)
        )));
    }
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AmplificationReport {
    #[serde(with = "crate::value::rational_str")]
    pub eps: Rational,
    /// `(1 − ε/4)/(1 − 3ε/4)`.
    #[serde(with = "crate::value::rational_str")]
    pub nu: Rational,
    /// `ν^ell`.
    #[serde(with = "crate::value::rational_str")]
    pub factor: Rational,
    /// `N = n·d^(ell−1)`.
    pub num_walks: u128,
    /// `δ` with `ν^ell = N^δ`; absent when `N = 1`.
    pub delta: Option<f64>,
    #[serde(with = "crate::value::rational_str")]
    pub lambda_over_d: Rational,
    /// `λ/d < ε/32`.
    pub expander_condition: bool,
}

pub fn amplification_report(eps: &Rational, cert: &ExpanderCert, ell: usize) -> Result<AmplificationReport> {
    if !eps.is_positive() || eps >= &Rational::one() {
        return Err(Error::InvalidParameter(format!("eps = {} must lie in (0, 1)", format_rational(eps))));
    }
    if ell == 0 {
        return Err(Error::InvalidParameter("a walk has at least one vertex".into()));
    }
    let one = Rational::one();
    let nu = (&one - eps / int(4)) / (&one - eps * int(3) / int(4));
    let factor = pow(&nu, ell);
    let num_walks = walk_count(&cert.graph, ell);
    let delta = (num_walks > 1).then(|| ell as f64 * rational_to_f64(&nu).ln() / (num_walks as f64).ln());
    let lambda_over_d = cert.ratio();
    let expander_condition = lambda_over_d < eps / int(32);
    Ok(AmplificationReport { eps: eps.clone(), nu, factor, num_walks, delta, lambda_over_d, expander_condition })
}

/// Completeness check for start and goal cliques that differ by swapping
/// one vertex.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CompletenessCheck {
    pub num_walks: usize,
    /// `|C_start ∩ C_goal|`.
    pub core_size: usize,
    /// Smallest clique along the remove-then-add sequence through the core.
    pub sequence_value: usize,
    /// Brute-force maxmin value on the product.
    pub product_value: usize,
    /// `|W|·max(0, |core|/|V| − 2λ/d)^ell`.
    #[serde(with = "crate::value::rational_str")]
    pub bound: Rational,
    pub vacuous: bool,
}

fn lift_instance(h: &WalkGraph, start: &[usize], goal: &[usize]) -> Result<CliqueInstance> {
    Ok(CliqueInstance { graph: h.graph().clone(), start: h.lift_clique(start)?, goal: h.lift_clique(goal)? })
}

pub fn completeness_check(g: &Graph, cert: &ExpanderCert, ell: usize, start: &[usize], goal: &[usize]) -> Result<CompletenessCheck> {
    let (mut s, mut t) = (start.to_vec(), goal.to_vec());
    s.sort_unstable();
    s.dedup();
    t.sort_unstable();
    t.dedup();
    let core: Vec<usize> = s.iter().copied().filter(|v| t.contains(v)).collect();
    if s.len() != t.len() || core.len() + 1 != s.len() {
        return Err(Error::InvalidInstance("start and goal must differ by swapping a single vertex".into()));
    }
    let h = product_graph(g, cert, ell)?;
    let inst = lift_instance(&h, &s, &t)?;
    let d_core = h.lift_clique(&core)?;
    // Remove D_start \ D_core one walk at a time, then add D_goal \ D_core.
    let mut seq = vec![inst.start.clone()];
    let mut cur = inst.start.clone();
    for w in inst.start.iter().filter(|w| !d_core.contains(w)) {
        cur.retain(|x| x != w);
        seq.push(cur.clone());
    }
    for &w in inst.goal.iter().filter(|w| !d_core.contains(w)) {
        cur.push(w);
        seq.push(cur.clone());
    }
    let sequence_value = clique_sequence_value(h.graph(), &seq)?;
    let product_value = clique_maxmin(&inst)?;
    let base = int(core.len()) / int(g.num_vertices()) - int(2) * cert.ratio();
    let vacuous = !base.is_positive();
    let bound = int(h.num_walks()) * clamped_pow(base, ell);
    let report = CompletenessCheck { num_walks: h.num_walks(), core_size: core.len(), sequence_value, product_value, bound, vacuous };
    if sequence_value != d_core.len() || product_value < sequence_value || int(product_value) < report.bound {
        return Err(Error::AuditFailure(format!(
            "completeness bound fails: product value {product_value}, sequence value {sequence_value}, bound {}",
            format_rational(&report.bound)
        )));
    }
    Ok(report)
}

/// Soundness in contrapositive form: if the product value reaches
/// `|W|·((1−ε)(ω−1)/|V| + 2λ/d)^ell`, the base value reaches `(1−ε)(ω−1)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SoundnessCheck {
    pub num_walks: usize,
    pub clique_number: usize,
    pub base_value: usize,
    pub product_value: usize,
    #[serde(with = "crate::value::rational_str")]
    pub threshold: Rational,
    #[serde(with = "crate::value::rational_str")]
    pub target: Rational,
    /// The product value reaches the threshold.
    pub hypothesis: bool,
    /// The base value reaches the target.
    pub conclusion: bool,
}

pub fn soundness_check(
    g: &Graph,
    cert: &ExpanderCert,
    ell: usize,
    start: &[usize],
    goal: &[usize],
    eps: &Rational,
) -> Result<SoundnessCheck> {
    if !eps.is_positive() || eps >= &Rational::one() {
        return Err(Error::InvalidParameter(format!("eps = {} must lie in (0, 1)", format_rational(eps))));
    }
    let omega = clique_number(g)?;
    let h = product_graph(g, cert, ell)?;
    let base_value = clique_maxmin(&CliqueInstance { graph: g.clone(), start: start.to_vec(), goal: goal.to_vec() })?;
    let product_value = clique_maxmin(&lift_instance(&h, start, goal)?)?;
    let target = (Rational::one() - eps) * int(omega.saturating_sub(1));
    let threshold = int(h.num_walks()) * pow(&(&target / int(g.num_vertices()) + int(2) * cert.ratio()), ell);
    let hypothesis = int(product_value) >= threshold;
    let conclusion = int(base_value) >= target;
    let report = SoundnessCheck {
        num_walks: h.num_walks(),
        clique_number: omega,
        base_value,
        product_value,
        threshold,
        target,
        hypothesis,
        conclusion,
    };
    if hypothesis && !conclusion {
        return Err(Error::AuditFailure(format!(
            "product value {product_value} reaches {} but base value {base_value} is below {}",
            format_rational(&report.threshold),
            format_rational(&report.target)
        )));
    }
    Ok(report)
}

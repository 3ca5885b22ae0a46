//! DIMACS CNF reader with optional reconfiguration endpoints.
//!
//! Besides the usual `p cnf <vars> <clauses>` header and zero-terminated
//! clauses, two comment lines carry the endpoints of a reconfiguration
//! instance:
//!
//! ```text
//! c start 100
//! c goal 111
//! ```

use crate::csp::{Assignment, Cnf};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DimacsInstance {
    pub cnf: Cnf,
    pub start: Option<Assignment>,
    pub goal: Option<Assignment>,
}

fn endpoint(rest: &str, num_vars: Option<usize>, line_no: usize) -> Result<Assignment> {
    let a = Assignment::parse_digits(rest)
        .map_err(|e| Error::Parse(format!("line {line_no}: {e}")))?;
    if a.values().iter().any(|&s| s > 1) {
        return Err(Error::Parse(format!("line {line_no}: endpoint bits must be 0 or 1")));
    }
    if let Some(n) = num_vars {
        if a.len() != n {
            return Err(Error::Parse(format!(
                "line {line_no}: endpoint has {} bits, formula has {n} variables",
                a.len()
            )));
        }
    }
    Ok(a)
}

pub fn parse_dimacs(input: &str) -> Result<DimacsInstance> {
    let mut header: Option<(usize, usize)> = None;
    let mut clauses: Vec<Vec<i64>> = Vec::new();
    let mut current: Vec<i64> = Vec::new();
    let mut start = None;
    let mut goal = None;

    for (idx, raw) in input.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line == "%" {
            continue;
        }
        if let Some(comment) = line.strip_prefix('c') {
            let comment = comment.trim();
            if let Some(rest) = comment.strip_prefix("start") {
                start = Some(endpoint(rest, header.map(|h| h.0), line_no)?);
            } else if let Some(rest) = comment.strip_prefix("goal") {
                goal = Some(endpoint(rest, header.map(|h| h.0), line_no)?);
            }
            continue;
        }
        if let Some(rest) = line.strip_prefix('p') {
            if header.is_some() {
                return Err(Error::Parse(format!("line {line_no}: duplicate problem line")));
            }
            let fields: Vec<&str> = rest.split_whitespace().collect();
            if fields.len() != 3 || fields[0] != "cnf" {
                return Err(Error::Parse(format!("line {line_no}: expected `p cnf <vars> <clauses>`")));
            }
            let parse = |s: &str| {
                s.parse::<usize>()
                    .map_err(|_| Error::Parse(format!("line {line_no}: bad count {s:?}")))
            };
            header = Some((parse(fields[1])?, parse(fields[2])?));
            continue;
        }
        let (num_vars, _) = header
            .ok_or_else(|| Error::Parse(format!("line {line_no}: clause before problem line")))?;
        for tok in line.split_whitespace() {
            let lit: i64 = tok
                .parse()
                .map_err(|_| Error::Parse(format!("line {line_no}: bad literal {tok:?}")))?;
            if lit == 0 {
                clauses.push(std::mem::take(&mut current));
            } else {
                if lit.unsigned_abs() as usize > num_vars {
                    return Err(Error::Parse(format!(
                        "line {line_no}: literal {lit} exceeds {num_vars} variables"
                    )));
                }
                current.push(lit);
            }
        }
    }
    let (num_vars, num_clauses) =
        header.ok_or_else(|| Error::Parse("missing `p cnf` problem line".into()))?;
    if !current.is_empty() {
        clauses.push(current);
    }
    if clauses.len() != num_clauses {
        return Err(Error::Parse(format!(
            "header declares {num_clauses} clauses, found {}",
            clauses.len()
        )));
    }
    for (name, e) in [("start", &start), ("goal", &goal)] {
        if let Some(a) = e {
            if a.len() != num_vars {
                return Err(Error::Parse(format!(
                    "{name} endpoint has {} bits, formula has {num_vars} variables",
                    a.len()
                )));
            }
        }
    }
    Ok(DimacsInstance { cnf: Cnf { num_vars, clauses }, start, goal })
}

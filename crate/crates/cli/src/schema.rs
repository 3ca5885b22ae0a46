//! JSON schemas (draft 2020-12) for the `--format json` output of each
//! subcommand.

use serde_json::{json, Value};

fn object(required: &[&str], properties: Value) -> Value {
    json!({
        "$schema": "https://json-schema.org/draft/2020-12/schema",
        "type": "object",
        "required": required,
        "properties": properties,
    })
}

fn rational() -> Value {
    json!({"type": "string", "pattern": "^-?[0-9]+(/[0-9]+)?$"})
}

fn ternary() -> Value {
    json!({"type": "string", "pattern": "^[01B]*$"})
}

fn proof() -> Value {
    json!({
        "type": "object",
        "required": ["ell", "p", "word"],
        "properties": {"ell": {"type": "integer"}, "p": {"type": "integer"}, "word": ternary()},
    })
}

fn params() -> Value {
    json!({
        "type": "object",
        "required": ["rho", "kappa", "q", "s_ckt", "delta_ckt", "eps", "bound"],
        "properties": {
            "rho": rational(), "kappa": rational(), "q": {"type": "integer"},
            "s_ckt": rational(), "delta_ckt": rational(), "eps": rational(), "bound": rational(),
        },
    })
}

fn csp() -> Value {
    json!({
        "type": "object",
        "required": ["num_vars", "alphabet_size", "constraints"],
        "properties": {
            "num_vars": {"type": "integer"},
            "alphabet_size": {"type": "integer"},
            "constraints": {"type": "array", "items": {
                "type": "object",
                "required": ["scope", "table"],
                "properties": {
                    "scope": {"type": "array", "items": {"type": "integer"}},
                    "table": {"type": "array", "items": {"enum": [0, 1]}},
                },
            }},
        },
    })
}

pub fn schema(name: &str) -> Option<Value> {
    let int = json!({"type": "integer"});
    Some(match name {
        "solve-csp" => object(
            &["value", "num_constraints"],
            json!({"value": rational(), "num_constraints": int, "witness": {"type": "array", "items": {"type": "string"}}}),
        ),
        "solve-clique" => object(&["value"], json!({"value": int})),
        "succinct-decide" => object(
            &["reachable", "steps"],
            json!({
                "reachable": {"type": "boolean"},
                "steps": {"type": ["integer", "null"]},
                "path": {"type": "array", "items": {"type": "string", "pattern": "^[01]*$"}},
            }),
        ),
        "succinct-from-tm" => object(
            &["n", "gates", "outputs"],
            json!({
                "n": int,
                "gates": {"type": "array", "items": {"type": "object", "required": ["op"], "properties": {
                    "op": {"enum": ["INPUT", "CONST", "NOT", "AND", "OR", "XOR"]},
                    "args": {"type": "array", "items": int},
                }}},
                "outputs": {"type": "array", "items": int},
            }),
        ),
        "codes-encode" => object(&["n", "ell", "codeword"], json!({"n": int, "ell": int, "codeword": ternary()})),
        "codes-kappa" => object(
            &["kappa", "words_examined", "non_codewords", "witness"],
            json!({
                "kappa": {"oneOf": [rational(), {"type": "null"}]},
                "words_examined": int,
                "non_codewords": int,
                "witness": {"oneOf": [ternary(), {"type": "null"}]},
            }),
        ),
        "pcpp" => object(
            &["pcpp", "params", "seeds", "input_len", "proof_len"],
            json!({
                "pcpp": {"type": "string"},
                "params": {"type": "object"},
                "seeds": int, "input_len": int, "proof_len": int,
                "word": ternary(),
                "acceptance": rational(),
                "modified_acceptance": rational(),
                "distance_to_language": rational(),
            }),
        ),
        "pcrp-build" => object(
            &["n", "ell", "p", "pcpp", "query_complexity", "seeds", "randomness_bits", "start", "goal", "params"],
            json!({
                "n": int, "ell": int, "p": int, "pcpp": {"type": "string"},
                "query_complexity": int, "seeds": int, "randomness_bits": int,
                "start": proof(), "goal": proof(), "params": params(),
            }),
        ),
        "pcrp-accept-prob" => object(&["acceptance", "seeds"], json!({"acceptance": rational(), "seeds": int})),
        "pcrp-complete-seq" => object(
            &["ell", "p", "steps"],
            json!({"ell": int, "p": int, "steps": {"type": "array", "items": ternary()}}),
        ),
        "pcrp-audit" => object(
            &["reachable", "status", "sequence_length", "params", "radius_condition", "witness", "token_moves", "max_rejection"],
            json!({
                "reachable": {"type": "boolean"},
                "status": {"type": "string"},
                "sequence_length": int,
                "params": params(),
                "radius_condition": {"type": "boolean"},
                "witness": {"oneOf": [{"type": "null"}, {
                    "type": "object",
                    "required": ["t", "kind", "rejection_probability"],
                    "properties": {
                        "t": int,
                        "kind": {"enum": ["both-far", "not-in-language"]},
                        "rejection_probability": rational(),
                        "modified_run": {"type": ["object", "null"]},
                    },
                }]},
                "token_moves": {"type": ["integer", "null"]},
                "max_rejection": rational(),
            }),
        ),
        "pcrp-to-csp" => object(
            &["csp", "start", "goal"],
            json!({"csp": csp(), "start": {"type": "string"}, "goal": {"type": "string"}}),
        ),
        "amplify-build" => object(
            &["N", "product_edges", "d", "lambda", "nu", "factor", "delta", "expander_condition", "lemma_checks"],
            json!({
                "N": int, "product_edges": int, "d": int,
                "lambda": rational(), "nu": rational(), "factor": rational(),
                "delta": {"type": ["number", "null"]},
                "expander_condition": {"type": "boolean"},
                "lemma_checks": {"type": "object", "properties": {
                    "completeness": {"type": "object"},
                    "soundness": {"type": "object"},
                }},
            }),
        ),
        "amplify-check-bounds" => object(
            &["n", "ell", "d", "lambda", "sets_checked", "vacuous_lower_bounds", "smallest_slack"],
            json!({
                "n": int, "ell": int, "d": int, "lambda": rational(),
                "sets_checked": int, "vacuous_lower_bounds": int,
                "smallest_slack": {"oneOf": [rational(), {"type": "null"}]},
            }),
        ),
        "error" => object(
            &["error", "exit_code", "message"],
            json!({"error": {"type": "string"}, "exit_code": {"enum": [2, 3, 4]}, "message": {"type": "string"}}),
        ),
        _ => return None,
    })
}

/// Names accepted by [`schema`].
pub const NAMES: &[&str] = &[
    "solve-csp",
    "solve-clique",
    "succinct-decide",
    "succinct-from-tm",
    "codes-encode",
    "codes-kappa",
    "pcpp",
    "pcrp-build",
    "pcrp-accept-prob",
    "pcrp-complete-seq",
    "pcrp-audit",
    "pcrp-to-csp",
    "amplify-build",
    "amplify-check-bounds",
    "error",
];

use crate::codes::TernaryWord;
use crate::csp::Word;
use crate::succinct::circuit::BoolCircuit;

/// Checks a token sequence over `{0,1,⊥}^{2n}`: adjacent words differ in at
/// most one position, at most one half of each word contains `⊥`, and a
/// blank-free word `x∘y` must satisfy `x = y`, `S(x) = y` or `S(y) = x`.
pub fn validate_token_sequence(s: &BoolCircuit, seq: &[TernaryWord]) -> bool {
    let n = s.n();
    if seq.is_empty() || seq.iter().any(|w| w.len() != 2 * n) {
        return false;
    }
    if seq.windows(2).any(|p| p[0].hamming(&p[1]) > 1) {
        return false;
    }
    seq.iter().all(|w| {
        let (x, y) = (w.slice(0..n), w.slice(n..2 * n));
        match (x.to_bits(), y.to_bits()) {
            (Some(x), Some(y)) => {
                let sx = s.eval(&x).expect("width checked");
                let sy = s.eval(&y).expect("width checked");
                x == y || sx == y || sy == x
            }
            (Some(_), None) | (None, Some(_)) => true,
            (None, None) => false,
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zoo;

    fn seq(words: &[&str]) -> Vec<TernaryWord> {
        words.iter().map(|w| w.parse().unwrap()).collect()
    }

    #[test]
    fn blanking_moves_between_edges() {
        // Edges (00, 01) and (00, 00) of the increment circuit.
        let inc = zoo::increment_circuit(2);
        let ok = seq(&["0001", "000B", "00BB", "00B0", "0000"]);
        assert!(validate_token_sequence(&inc, &ok));
        let jump = seq(&["0001", "0000"]);
        assert!(validate_token_sequence(&inc, &jump));
        let non_edge = seq(&["0011"]);
        assert!(!validate_token_sequence(&inc, &non_edge));
    }

    #[test]
    fn blanks_in_both_halves_rejected() {
        let id = zoo::identity_circuit(2);
        assert!(!validate_token_sequence(&id, &seq(&["0B0B"])));
        assert!(validate_token_sequence(&id, &seq(&["1010", "1010", "1010"])));
        assert!(!validate_token_sequence(&id, &seq(&["1010", "0101"])));
        assert!(!validate_token_sequence(&id, &seq(&["101"])));
    }
}

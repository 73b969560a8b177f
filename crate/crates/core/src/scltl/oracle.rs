use super::{Alphabet, Formula, Symbol};

/// Decides `u |= f` under strong finite-trace semantics by direct recursion on
/// positions, without any automaton.
///
/// Positions run over `0..=|u|`; at the end of the word only `true` holds. This
/// makes `X true` hold after a single letter, as every extension satisfies it.
pub fn good_prefix_oracle(f: &Formula, alphabet: &Alphabet, u: &[Symbol]) -> bool {
    holds(f, alphabet, u, 0)
}

fn holds(f: &Formula, ab: &Alphabet, u: &[Symbol], i: usize) -> bool {
    match f {
        Formula::True => true,
        Formula::False => false,
        Formula::Atom(p) => i < u.len() && ab.holds(u[i], p),
        Formula::NegAtom(p) => i < u.len() && !ab.holds(u[i], p),
        Formula::And(l, r) => holds(l, ab, u, i) && holds(r, ab, u, i),
        Formula::Or(l, r) => holds(l, ab, u, i) || holds(r, ab, u, i),
        Formula::Next(x) => i < u.len() && holds(x, ab, u, i + 1),
        Formula::Until(l, r) => {
            for k in i..u.len() {
                if holds(r, ab, u, k) {
                    return true;
                }
                if !holds(l, ab, u, k) {
                    return false;
                }
            }
            false
        }
        Formula::Eventually(x) => (i..u.len()).any(|k| holds(x, ab, u, k)),
    }
}

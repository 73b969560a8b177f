use super::{Alphabet, Formula, Symbol};

/// One step of formula progression: the obligation that remains for the rest of
/// the word after reading `sigma`.
pub fn progress(f: &Formula, alphabet: &Alphabet, sigma: Symbol) -> Formula {
    match f {
        Formula::True => Formula::True,
        Formula::False => Formula::False,
        Formula::Atom(p) => bool_formula(alphabet.holds(sigma, p)),
        Formula::NegAtom(p) => bool_formula(!alphabet.holds(sigma, p)),
        Formula::And(l, r) => Formula::and(progress(l, alphabet, sigma), progress(r, alphabet, sigma)),
        Formula::Or(l, r) => Formula::or(progress(l, alphabet, sigma), progress(r, alphabet, sigma)),
        Formula::Next(x) => (**x).clone(),
        Formula::Until(l, r) => Formula::or(
            progress(r, alphabet, sigma),
            Formula::and(progress(l, alphabet, sigma), f.clone()),
        ),
        Formula::Eventually(x) => Formula::or(progress(x, alphabet, sigma), f.clone()),
    }
}

fn bool_formula(b: bool) -> Formula {
    if b {
        Formula::True
    } else {
        Formula::False
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eventuality_fulfilled() {
        let ab = Alphabet::new(["A"]).unwrap();
        let f = Formula::eventually(Formula::atom("A"));
        assert_eq!(progress(&f, &ab, ab.symbol(["A"]).unwrap()), Formula::True);
        assert_eq!(progress(&f, &ab, Symbol::EMPTY), f);
    }

    #[test]
    fn next_unwraps() {
        let ab = Alphabet::new(["A"]).unwrap();
        let f = Formula::next(Formula::atom("A"));
        assert_eq!(progress(&f, &ab, Symbol::EMPTY), Formula::atom("A"));
    }

    #[test]
    fn until_expansion() {
        let ab = Alphabet::new(["a", "b"]).unwrap();
        let f = Formula::until(Formula::atom("a"), Formula::atom("b"));
        assert_eq!(progress(&f, &ab, ab.symbol(["a"]).unwrap()), f);
        assert_eq!(progress(&f, &ab, ab.symbol(["b"]).unwrap()), Formula::True);
        assert_eq!(progress(&f, &ab, Symbol::EMPTY), Formula::False);
    }
}

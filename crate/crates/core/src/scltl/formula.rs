use std::fmt;

/// A syntactically co-safe LTL formula in negation normal form.
///
/// Negation only ever sits directly on an atomic proposition. `False` is never
/// produced by the parser; it shows up as the result of progression and acts
/// as the rejecting sink of compiled automata.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    True,
    False,
    Atom(String),
    NegAtom(String),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Next(Box<Formula>),
    Until(Box<Formula>, Box<Formula>),
    Eventually(Box<Formula>),
}

impl Formula {
    pub fn atom(name: impl Into<String>) -> Self {
        Formula::Atom(name.into())
    }

    pub fn neg_atom(name: impl Into<String>) -> Self {
        Formula::NegAtom(name.into())
    }

    pub fn next(f: Formula) -> Self {
        Formula::Next(Box::new(f))
    }

    pub fn until(l: Formula, r: Formula) -> Self {
        Formula::Until(Box::new(l), Box::new(r))
    }

    pub fn eventually(f: Formula) -> Self {
        Formula::Eventually(Box::new(f))
    }

    /// Conjunction without simplification.
    pub fn and_raw(l: Formula, r: Formula) -> Self {
        Formula::And(Box::new(l), Box::new(r))
    }

    /// Disjunction without simplification.
    pub fn or_raw(l: Formula, r: Formula) -> Self {
        Formula::Or(Box::new(l), Box::new(r))
    }

    /// Conjunction with `True`/`False` absorption and idempotence.
    pub fn and(l: Formula, r: Formula) -> Self {
        match (l, r) {
            (Formula::False, _) | (_, Formula::False) => Formula::False,
            (Formula::True, x) | (x, Formula::True) => x,
            (l, r) if l == r => l,
            (l, r) => Formula::and_raw(l, r),
        }
    }

    /// Disjunction with `True`/`False` absorption and idempotence.
    pub fn or(l: Formula, r: Formula) -> Self {
        match (l, r) {
            (Formula::True, _) | (_, Formula::True) => Formula::True,
            (Formula::False, x) | (x, Formula::False) => x,
            (l, r) if l == r => l,
            (l, r) => Formula::or_raw(l, r),
        }
    }

    /// Balanced disjunction of a nonempty list, `None` when the list is empty.
    pub fn balanced_or(items: Vec<Formula>) -> Option<Self> {
        balanced(items, Formula::or_raw)
    }

    pub fn balanced_and(items: Vec<Formula>) -> Option<Self> {
        balanced(items, Formula::and_raw)
    }

    pub fn is_true(&self) -> bool {
        matches!(self, Formula::True)
    }

    pub fn is_false(&self) -> bool {
        matches!(self, Formula::False)
    }

    /// Whether the formula is a "temporal atom" for propositional canonicalization:
    /// a literal or a formula rooted at a temporal operator.
    pub fn is_temporal_atom(&self) -> bool {
        matches!(
            self,
            Formula::Atom(_)
                | Formula::NegAtom(_)
                | Formula::Next(_)
                | Formula::Until(..)
                | Formula::Eventually(_)
        )
    }

    /// Rewrite `true U f` into `F f` everywhere, so the two spellings share one form.
    pub fn normalize_eventually(&self) -> Formula {
        match self {
            Formula::True | Formula::False | Formula::Atom(_) | Formula::NegAtom(_) => self.clone(),
            Formula::And(l, r) => Formula::and_raw(l.normalize_eventually(), r.normalize_eventually()),
            Formula::Or(l, r) => Formula::or_raw(l.normalize_eventually(), r.normalize_eventually()),
            Formula::Next(f) => Formula::next(f.normalize_eventually()),
            Formula::Eventually(f) => Formula::eventually(f.normalize_eventually()),
            Formula::Until(l, r) if l.is_true() => Formula::eventually(r.normalize_eventually()),
            Formula::Until(l, r) => Formula::until(l.normalize_eventually(), r.normalize_eventually()),
        }
    }

    /// Names of all propositions mentioned, sorted and deduplicated.
    pub fn propositions(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_props(&mut out);
        out.sort();
        out.dedup();
        out
    }

    fn collect_props(&self, out: &mut Vec<String>) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Atom(p) | Formula::NegAtom(p) => out.push(p.clone()),
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Until(l, r) => {
                l.collect_props(out);
                r.collect_props(out);
            }
            Formula::Next(f) | Formula::Eventually(f) => f.collect_props(out),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Formula::True | Formula::False | Formula::Atom(_) | Formula::NegAtom(_) => 1,
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Until(l, r) => 1 + l.size() + r.size(),
            Formula::Next(f) | Formula::Eventually(f) => 1 + f.size(),
        }
    }
}

fn balanced(mut items: Vec<Formula>, join: fn(Formula, Formula) -> Formula) -> Option<Formula> {
    match items.len() {
        0 => None,
        1 => items.pop(),
        n => {
            let right = items.split_off(n.div_ceil(2));
            let l = balanced(items, join)?;
            let r = balanced(right, join)?;
            Some(join(l, r))
        }
    }
}

/// Serializes in the concrete syntax accepted by [`crate::scltl::parse`]; binary
/// operators are always parenthesized so the output re-parses to the same tree.
impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::True => write!(f, "true"),
            Formula::False => write!(f, "false"),
            Formula::Atom(p) => write!(f, "{p}"),
            Formula::NegAtom(p) => write!(f, "!{p}"),
            Formula::And(l, r) => write!(f, "({l} & {r})"),
            Formula::Or(l, r) => write!(f, "({l} | {r})"),
            Formula::Next(x) => write!(f, "X {x}"),
            Formula::Until(l, r) => write!(f, "({l} U {r})"),
            Formula::Eventually(x) => write!(f, "F {x}"),
        }
    }
}

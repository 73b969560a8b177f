//! Propositional canonical forms over temporal atoms.
//!
//! A formula is viewed as a positive Boolean function of its temporal atoms
//! (literals and subformulas rooted at `X`, `U`, `F`). The function is built as
//! a reduced ordered BDD with atoms ordered by their serialization, then read
//! back as a formula. Since NNF formulas are monotone in their atoms, a node
//! `ite(v, hi, lo)` reads back as `lo | (v & hi)`.

use super::Formula;
use std::collections::HashMap;

const FALSE: u32 = 0;
const TRUE: u32 = 1;

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
struct Node {
    var: u32,
    lo: u32,
    hi: u32,
}

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
enum Op {
    And,
    Or,
}

struct Bdd {
    nodes: Vec<Node>,
    unique: HashMap<Node, u32>,
    memo: HashMap<(Op, u32, u32), u32>,
}

impl Bdd {
    fn new() -> Self {
        let sentinel = Node { var: u32::MAX, lo: 0, hi: 0 };
        Bdd { nodes: vec![sentinel, sentinel], unique: HashMap::new(), memo: HashMap::new() }
    }

    fn mk(&mut self, var: u32, lo: u32, hi: u32) -> u32 {
        if lo == hi {
            return lo;
        }
        let n = Node { var, lo, hi };
        if let Some(&id) = self.unique.get(&n) {
            return id;
        }
        let id = self.nodes.len() as u32;
        self.nodes.push(n);
        self.unique.insert(n, id);
        id
    }

    fn apply(&mut self, op: Op, a: u32, b: u32) -> u32 {
        match (op, a, b) {
            (Op::And, FALSE, _) | (Op::And, _, FALSE) => return FALSE,
            (Op::And, TRUE, x) | (Op::And, x, TRUE) => return x,
            (Op::Or, TRUE, _) | (Op::Or, _, TRUE) => return TRUE,
            (Op::Or, FALSE, x) | (Op::Or, x, FALSE) => return x,
            _ if a == b => return a,
            _ => {}
        }
        let key = (op, a.min(b), a.max(b));
        if let Some(&r) = self.memo.get(&key) {
            return r;
        }
        let (na, nb) = (self.nodes[a as usize], self.nodes[b as usize]);
        let var = na.var.min(nb.var);
        let (alo, ahi) = if na.var == var { (na.lo, na.hi) } else { (a, a) };
        let (blo, bhi) = if nb.var == var { (nb.lo, nb.hi) } else { (b, b) };
        let lo = self.apply(op, alo, blo);
        let hi = self.apply(op, ahi, bhi);
        let r = self.mk(var, lo, hi);
        self.memo.insert(key, r);
        r
    }
}

struct Builder {
    bdd: Bdd,
    atoms: Vec<Formula>,
    index: HashMap<Formula, u32>,
}

impl Builder {
    fn build(&mut self, f: &Formula) -> u32 {
        match f {
            Formula::True => TRUE,
            Formula::False => FALSE,
            Formula::And(l, r) => {
                let (a, b) = (self.build(l), self.build(r));
                self.bdd.apply(Op::And, a, b)
            }
            Formula::Or(l, r) => {
                let (a, b) = (self.build(l), self.build(r));
                self.bdd.apply(Op::Or, a, b)
            }
            atom => {
                let v = self.index[atom];
                self.bdd.mk(v, FALSE, TRUE)
            }
        }
    }

    fn read_back(&self, id: u32, cache: &mut HashMap<u32, Formula>) -> Formula {
        match id {
            FALSE => Formula::False,
            TRUE => Formula::True,
            _ => {
                if let Some(f) = cache.get(&id) {
                    return f.clone();
                }
                let n = self.bdd.nodes[id as usize];
                let lo = self.read_back(n.lo, cache);
                let hi = self.read_back(n.hi, cache);
                let f = Formula::or(lo, Formula::and(self.atoms[n.var as usize].clone(), hi));
                cache.insert(id, f.clone());
                f
            }
        }
    }
}

fn collect_atoms(f: &Formula, out: &mut Vec<Formula>) {
    match f {
        Formula::True | Formula::False => {}
        Formula::And(l, r) | Formula::Or(l, r) => {
            collect_atoms(l, out);
            collect_atoms(r, out);
        }
        atom => out.push(atom.clone()),
    }
}

/// Canonical representative of `f` under propositional equivalence over its
/// temporal atoms. Equal outputs imply equal languages; the converse need not hold.
pub fn canonicalize(f: &Formula) -> Formula {
    let f = f.normalize_eventually();
    let mut atoms = Vec::new();
    collect_atoms(&f, &mut atoms);
    let mut keyed: Vec<(String, Formula)> = atoms.into_iter().map(|a| (a.to_string(), a)).collect();
    keyed.sort();
    keyed.dedup();
    let atoms: Vec<Formula> = keyed.into_iter().map(|(_, a)| a).collect();
    let index = atoms.iter().enumerate().map(|(i, a)| (a.clone(), i as u32)).collect();
    let mut b = Builder { bdd: Bdd::new(), atoms, index };
    let root = b.build(&f);
    b.read_back(root, &mut HashMap::new())
}

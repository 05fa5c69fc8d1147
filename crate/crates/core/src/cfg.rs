//! Acyclic context-free grammars with right-hand sides of length at most
//! two, and their correspondence with monotone circuits.
//!
//! A grammar with this shape generates a finite language. Read as a
//! circuit (alternatives become sums, concatenation becomes an ordered
//! product, a terminal becomes its variable, `ε` becomes 1), it computes the
//! polynomial whose coefficient on each word is the number of derivation
//! trees of that word.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigUint;
use num_traits::Zero;

use crate::circuit::{Circuit, CircuitBuilder, Gate, GateId};
use crate::error::{Caps, Error, Result};
use crate::poly::Word;
use crate::scalar::{Field, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Symbol {
    /// A nonterminal, by index.
    N(usize),
    /// A terminal, by variable index.
    T(u32),
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Production {
    pub lhs: usize,
    /// Empty for `ε`.
    pub rhs: Vec<Symbol>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AcyclicCfg {
    nonterminals: Vec<String>,
    n_terminals: usize,
    start: usize,
    productions: Vec<Production>,
}

impl AcyclicCfg {
    pub fn new(
        nonterminals: Vec<String>,
        n_terminals: usize,
        start: usize,
        productions: Vec<Production>,
    ) -> Result<AcyclicCfg> {
        let g = AcyclicCfg {
            nonterminals,
            n_terminals,
            start,
            productions,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn nonterminals(&self) -> &[String] {
        &self.nonterminals
    }

    pub fn n_terminals(&self) -> usize {
        self.n_terminals
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn productions(&self) -> &[Production] {
        &self.productions
    }

    fn name(&self, a: usize) -> &str {
        &self.nonterminals[a]
    }

    /// Checks right-hand side lengths, symbol ranges, duplicate names and
    /// productions, and that the nonterminal dependency graph has no cycle.
    pub fn validate(&self) -> Result<()> {
        let n = self.nonterminals.len();
        if self.start >= n {
            return Err(Error::Validation(format!(
                "start symbol {} is not a nonterminal",
                self.start
            )));
        }
        let mut names = BTreeSet::new();
        for name in &self.nonterminals {
            if !names.insert(name) {
                return Err(Error::Validation(format!("nonterminal {name} is declared twice")));
            }
        }
        let mut seen = BTreeSet::new();
        for p in &self.productions {
            if p.lhs >= n {
                return Err(Error::Validation(format!(
                    "production with unknown left side {}",
                    p.lhs
                )));
            }
            if p.rhs.len() > 2 {
                return Err(Error::Validation(format!(
                    "production for {} has a right side of length {}",
                    self.name(p.lhs),
                    p.rhs.len()
                )));
            }
            for s in &p.rhs {
                match *s {
                    Symbol::N(b) if b >= n => {
                        return Err(Error::Validation(format!(
                            "production for {} uses unknown nonterminal {b}",
                            self.name(p.lhs)
                        )))
                    }
                    Symbol::T(t) if t as usize >= self.n_terminals => {
                        return Err(Error::Validation(format!(
                            "production for {} uses terminal {t} but there are {}",
                            self.name(p.lhs),
                            self.n_terminals
                        )))
                    }
                    _ => {}
                }
            }
            if !seen.insert(p) {
                return Err(Error::Validation(format!(
                    "production for {} is listed twice",
                    self.name(p.lhs)
                )));
            }
        }
        self.topological_order().map(|_| ())
    }

    /// Nonterminals ordered so that each comes after every nonterminal its
    /// productions mention.
    pub fn topological_order(&self) -> Result<Vec<usize>> {
        let n = self.nonterminals.len();
        let mut deps: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
        for p in &self.productions {
            for s in &p.rhs {
                if let Symbol::N(b) = *s {
                    deps[p.lhs].insert(b);
                }
            }
        }
        // 0 = unvisited, 1 = on stack, 2 = done.
        let mut state = vec![0u8; n];
        let mut order = Vec::with_capacity(n);
        for root in 0..n {
            if state[root] != 0 {
                continue;
            }
            let mut stack: Vec<(usize, Vec<usize>)> = vec![(root, deps[root].iter().copied().collect())];
            state[root] = 1;
            while let Some((node, pending)) = stack.last_mut() {
                if let Some(next) = pending.pop() {
                    match state[next] {
                        0 => {
                            state[next] = 1;
                            let d = deps[next].iter().copied().collect();
                            stack.push((next, d));
                        }
                        1 => {
                            let mut cycle: Vec<&str> = stack.iter().map(|(v, _)| self.name(*v)).collect();
                            let at = cycle.iter().position(|s| *s == self.name(next)).unwrap_or(0);
                            cycle.drain(..at);
                            cycle.push(self.name(next));
                            return Err(Error::Validation(format!(
                                "nonterminals form a cycle: {}",
                                cycle.join(" -> ")
                            )));
                        }
                        _ => {}
                    }
                } else {
                    state[*node] = 2;
                    order.push(*node);
                    stack.pop();
                }
            }
        }
        Ok(order)
    }

    /// `|V| + |T| + Σ (1 + |rhs|)`.
    pub fn size(&self) -> usize {
        self.nonterminals.len() + self.n_terminals + self.productions.iter().map(|p| 1 + p.rhs.len()).sum::<usize>()
    }

    fn by_lhs(&self) -> Vec<Vec<&Production>> {
        let mut out = vec![Vec::new(); self.nonterminals.len()];
        for p in &self.productions {
            out[p.lhs].push(p);
        }
        out
    }

    /// All words of length at most `max_len` derivable from the start
    /// symbol.
    pub fn language(&self, max_len: usize, caps: &Caps) -> Result<BTreeSet<Word>> {
        caps.check_degree(max_len)?;
        let by_lhs = self.by_lhs();
        let mut langs: Vec<BTreeSet<Word>> = vec![BTreeSet::new(); self.nonterminals.len()];
        let sym_lang = |s: &Symbol, langs: &Vec<BTreeSet<Word>>| -> BTreeSet<Word> {
            match *s {
                Symbol::T(t) => BTreeSet::from([Word(vec![t])]),
                Symbol::N(b) => langs[b].clone(),
            }
        };
        for a in self.topological_order()? {
            let mut set = BTreeSet::new();
            for p in &by_lhs[a] {
                match p.rhs.as_slice() {
                    [] => {
                        set.insert(Word::empty());
                    }
                    [s] => set.extend(sym_lang(s, &langs).into_iter().filter(|w| w.degree() <= max_len)),
                    [s1, s2] => {
                        let (l1, l2) = (sym_lang(s1, &langs), sym_lang(s2, &langs));
                        for u in &l1 {
                            for v in &l2 {
                                if u.degree() + v.degree() <= max_len {
                                    set.insert(u.concat(v));
                                }
                            }
                            caps.check_terms(set.len())?;
                        }
                    }
                    _ => unreachable!("validated"),
                }
                caps.check_terms(set.len())?;
            }
            langs[a] = set;
        }
        Ok(core::mem::take(&mut langs[self.start]))
    }

    /// Number of derivation trees of `word` from the start symbol.
    pub fn count_derivations(&self, word: &Word) -> BigUint {
        let w = &word.0;
        let len = w.len();
        let by_lhs = self.by_lhs();
        // counts[a][i][j]: trees deriving w[i..j] from nonterminal a.
        let mut counts: Vec<Vec<Vec<BigUint>>> = vec![Vec::new(); self.nonterminals.len()];
        let order = self.topological_order().expect("validated grammar");
        for a in order {
            let mut table = vec![vec![BigUint::zero(); len + 1]; len + 1];
            {
                let sym = |s: &Symbol, i: usize, j: usize| -> BigUint {
                    match *s {
                        Symbol::T(t) => BigUint::from((j == i + 1 && w[i] == t) as u8),
                        Symbol::N(b) => counts[b][i][j].clone(),
                    }
                };
                for p in &by_lhs[a] {
                    for i in 0..=len {
                        for j in i..=len {
                            let c = match p.rhs.as_slice() {
                                [] => BigUint::from((i == j) as u8),
                                [s] => sym(s, i, j),
                                [s1, s2] => (i..=j).map(|k| sym(s1, i, k) * sym(s2, k, j)).sum(),
                                _ => unreachable!("validated"),
                            };
                            table[i][j] += c;
                        }
                    }
                }
            }
            counts[a] = table;
        }
        counts[self.start][0][len].clone()
    }

    /// Removes nonterminals that derive no word or are unreachable from
    /// the start symbol, with the productions that mention them. The start
    /// symbol is always kept.
    pub fn strip_useless(&self) -> AcyclicCfg {
        let n = self.nonterminals.len();
        let order = self.topological_order().expect("validated grammar");
        let mut productive = vec![false; n];
        for &a in &order {
            productive[a] = self.productions.iter().any(|p| {
                p.lhs == a
                    && p.rhs.iter().all(|s| match *s {
                        Symbol::N(b) => productive[b],
                        Symbol::T(_) => true,
                    })
            });
        }
        let usable = |p: &&Production| {
            productive[p.lhs]
                && p.rhs.iter().all(|s| match *s {
                    Symbol::N(b) => productive[b],
                    Symbol::T(_) => true,
                })
        };
        let mut reachable = vec![false; n];
        reachable[self.start] = true;
        for &a in order.iter().rev() {
            if !reachable[a] {
                continue;
            }
            for p in self.productions.iter().filter(usable).filter(|p| p.lhs == a) {
                for s in &p.rhs {
                    if let Symbol::N(b) = *s {
                        reachable[b] = true;
                    }
                }
            }
        }
        let keep: Vec<usize> = (0..n)
            .filter(|&a| a == self.start || (reachable[a] && productive[a]))
            .collect();
        let remap: BTreeMap<usize, usize> = keep.iter().enumerate().map(|(i, &a)| (a, i)).collect();
        let productions = self
            .productions
            .iter()
            .filter(usable)
            .filter(|p| remap.contains_key(&p.lhs))
            .map(|p| Production {
                lhs: remap[&p.lhs],
                rhs: p
                    .rhs
                    .iter()
                    .map(|s| match *s {
                        Symbol::N(b) => Symbol::N(remap[&b]),
                        t => t,
                    })
                    .collect(),
            })
            .collect();
        AcyclicCfg {
            nonterminals: keep.iter().map(|&a| self.nonterminals[a].clone()).collect(),
            n_terminals: self.n_terminals,
            start: remap[&self.start],
            productions,
        }
    }
}

/// The grammar of a monotone circuit: one nonterminal `A<g>` per gate,
/// `A_g -> A_h A_k` for products, `A_g -> A_h | A_k` for sums, `A_g -> x_i`
/// for inputs and `A_g -> ε` for constants. Zero constants are propagated
/// away first. The language is the monomial support of the circuit.
pub fn circuit_to_cfg(c: &Circuit) -> Result<AcyclicCfg> {
    if !c.is_monotone()? {
        return Err(Error::NotMonotone("the circuit has a negative constant".into()));
    }
    let c = c.propagate_zeros();
    let gates = c.gates();
    let names: Vec<String> = (0..gates.len()).map(|g| format!("A{g}")).collect();
    if matches!(&gates[c.output()], Gate::Const(z) if z.is_zero()) {
        return AcyclicCfg::new(vec![names[c.output()].clone()], c.n_vars(), 0, Vec::new());
    }
    let mut productions = BTreeSet::new();
    for (g, gate) in gates.iter().enumerate() {
        let rhs_list: Vec<Vec<Symbol>> = match *gate {
            Gate::Input(v) => vec![vec![Symbol::T(v)]],
            Gate::Const(_) => vec![vec![]],
            Gate::Add(a, b) => vec![vec![Symbol::N(a)], vec![Symbol::N(b)]],
            Gate::Mul(a, b) => vec![vec![Symbol::N(a), Symbol::N(b)]],
        };
        for rhs in rhs_list {
            productions.insert(Production { lhs: g, rhs });
        }
    }
    Ok(AcyclicCfg::new(names, c.n_vars(), c.output(), productions.into_iter().collect())?.strip_useless())
}

/// A monotone circuit over the rationals whose coefficient on each word is
/// its number of derivation trees.
pub fn cfg_to_circuit(g: &AcyclicCfg) -> Result<Circuit> {
    g.validate()?;
    let field = Field::Rationals;
    let mut b = CircuitBuilder::new(g.n_terminals(), field.clone());
    let mut inputs: BTreeMap<u32, GateId> = BTreeMap::new();
    let mut one: Option<GateId> = None;
    let mut gate_of: Vec<Option<GateId>> = vec![None; g.nonterminals().len()];
    let by_lhs = g.by_lhs();
    for a in g.topological_order()? {
        let mut terms = Vec::new();
        for p in &by_lhs[a] {
            let mut syms = Vec::new();
            for s in &p.rhs {
                syms.push(match *s {
                    Symbol::N(c) => gate_of[c],
                    Symbol::T(t) => Some(match inputs.get(&t) {
                        Some(&id) => id,
                        None => {
                            let id = b.input(t)?;
                            inputs.insert(t, id);
                            id
                        }
                    }),
                });
            }
            let term = match syms.as_slice() {
                [] => Some(match one {
                    Some(id) => id,
                    None => {
                        let id = b.constant(Scalar::integer(1))?;
                        one = Some(id);
                        id
                    }
                }),
                [s] => *s,
                [Some(x), Some(y)] => Some(b.mul(*x, *y)?),
                _ => None,
            };
            terms.extend(term);
        }
        gate_of[a] = b.sum(terms)?;
    }
    let out = match gate_of[g.start()] {
        Some(id) => id,
        None => b.constant(field.zero())?,
    };
    b.finish(out)
}

fn palindrome_part(names: &mut Vec<String>, productions: &mut Vec<Production>, n: usize) -> usize {
    // P_k derives w w^r for |w| = k through Q_{k,i} -> P_{k-1} x_i.
    let mut prev: Option<usize> = None;
    for k in 1..=n {
        let pk = names.len();
        names.push(format!("P{k}"));
        for i in 0..n as u32 {
            let q = names.len();
            names.push(format!("Q{k}_{i}"));
            productions.push(Production {
                lhs: pk,
                rhs: vec![Symbol::T(i), Symbol::N(q)],
            });
            let rhs = match prev {
                Some(p) => vec![Symbol::N(p), Symbol::T(i)],
                None => vec![Symbol::T(i)],
            };
            productions.push(Production { lhs: q, rhs });
        }
        prev = Some(pk);
    }
    prev.unwrap()
}

fn any_part(names: &mut Vec<String>, productions: &mut Vec<Production>, n: usize) -> usize {
    // Z_k derives every word of length k.
    let any = names.len();
    names.push("Any".into());
    for i in 0..n as u32 {
        productions.push(Production {
            lhs: any,
            rhs: vec![Symbol::T(i)],
        });
    }
    let mut prev = None;
    for k in 1..=n {
        let z = names.len();
        names.push(format!("Z{k}"));
        let rhs = match prev {
            Some(p) => vec![Symbol::N(any), Symbol::N(p)],
            None => vec![Symbol::N(any)],
        };
        productions.push(Production { lhs: z, rhs });
        prev = Some(z);
    }
    prev.unwrap()
}

fn two_part_grammar(n: usize, palindrome_first: bool) -> Result<AcyclicCfg> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    let mut names = vec![String::from("S")];
    let mut productions = Vec::new();
    let z = any_part(&mut names, &mut productions, n);
    let p = palindrome_part(&mut names, &mut productions, n);
    let rhs = if palindrome_first {
        vec![Symbol::N(p), Symbol::N(z)]
    } else {
        vec![Symbol::N(z), Symbol::N(p)]
    };
    productions.push(Production { lhs: 0, rhs });
    AcyclicCfg::new(names, n, 0, productions)
}

/// Grammar for `{ z w w^r : |z| = |w| = n }` over `n` terminals.
pub fn build_l1_grammar(n: usize) -> Result<AcyclicCfg> {
    two_part_grammar(n, false)
}

/// Grammar for `{ w w^r z : |z| = |w| = n }` over `n` terminals.
pub fn build_l2_grammar(n: usize) -> Result<AcyclicCfg> {
    two_part_grammar(n, true)
}

/// Words of length at most `max_len` in both languages.
pub fn intersect_bruteforce(g1: &AcyclicCfg, g2: &AcyclicCfg, max_len: usize, caps: &Caps) -> Result<BTreeSet<Word>> {
    let l1 = g1.language(max_len, caps)?;
    let l2 = g2.language(max_len, caps)?;
    Ok(l1.intersection(&l2).cloned().collect())
}

//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use hadamard_core::abp::Abp;
use hadamard_core::pit::Digraph;
use hadamard_core::poly::{CMonomial, CPoly, NcPoly, Word};
use hadamard_core::scalar::{Field, Rational, Scalar};
use num_bigint::BigInt;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::{BTreeMap, VecDeque};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Sum over all source-to-sink paths, found by depth-first search, of the
/// ordered product of labels. Works term by term without reusing the
/// program's own expansion code.
pub fn paths_expand(abp: &Abp) -> NcPoly {
    let n = abp.n_vars();
    let field = abp.field().clone();
    let mut terms: BTreeMap<Vec<u32>, Scalar> = BTreeMap::new();
    // Stack of (layer, node, word so far, coefficient so far).
    let mut stack = vec![(0usize, 0usize, Vec::<u32>::new(), field.one())];
    while let Some((layer, node, word, c)) = stack.pop() {
        if layer == abp.depth() {
            let e = terms.entry(word).or_insert_with(|| field.zero());
            *e = &*e + &c;
            continue;
        }
        for (k, label) in abp.edges() {
            if k.layer != layer || k.from != node {
                continue;
            }
            if !label.constant_term().is_zero() {
                stack.push((layer + 1, k.to, word.clone(), &c * label.constant_term()));
            }
            for (v, a) in label.coeffs() {
                let mut w = word.clone();
                w.push(*v);
                stack.push((layer + 1, k.to, w, &c * a));
            }
        }
    }
    NcPoly::from_terms(n, field, terms.into_iter().map(|(w, c)| (Word(w), c))).unwrap()
}

/// Coefficient-wise product computed from the term maps.
pub fn naive_hadamard(f: &NcPoly, g: &NcPoly) -> NcPoly {
    let terms: Vec<(Word, Scalar)> = f
        .terms()
        .iter()
        .filter_map(|(w, a)| g.terms().get(w).map(|b| (w.clone(), a * b)))
        .collect();
    NcPoly::from_terms(f.n_vars(), f.field().clone(), terms).unwrap()
}

pub fn sum_of_squares(f: &NcPoly) -> Scalar {
    let mut acc = Rational::from_integer(BigInt::from(0));
    for c in f.terms().values() {
        let r = c.as_rational().unwrap();
        acc += r * r;
    }
    Scalar::rational(acc)
}

/// Determinant by cofactor expansion along the first row.
pub fn cofactor_det(m: &[Vec<i64>]) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::from(1);
    }
    let mut total = BigInt::from(0);
    for j in 0..n {
        let minor: Vec<Vec<i64>> = m[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|&(c, _)| c != j)
                    .map(|(_, &v)| v)
                    .collect()
            })
            .collect();
        let term = BigInt::from(m[0][j]) * cofactor_det(&minor);
        if j % 2 == 0 {
            total += term;
        } else {
            total -= term;
        }
    }
    total
}

pub fn bfs_reachable(g: &Digraph) -> bool {
    let mut seen = vec![false; g.vertices];
    let mut queue = VecDeque::from([g.s]);
    seen[g.s] = true;
    while let Some(u) = queue.pop_front() {
        if u == g.t {
            return true;
        }
        for &(a, b) in &g.edges {
            if a == u && !seen[b] {
                seen[b] = true;
                queue.push_back(b);
            }
        }
    }
    false
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

/// `Σ_σ Π_i x_{i σ(i)}` with `x_ij` the variable `i n + j`.
pub fn permanent_by_permutations(n: usize) -> CPoly {
    let terms: Vec<(CMonomial, Scalar)> = permutations(n)
        .into_iter()
        .map(|s| {
            let m = CMonomial::from_support(s.iter().enumerate().map(|(i, &j)| (i * n + j) as u32));
            (m, Scalar::integer(1))
        })
        .collect();
    CPoly::from_terms(n * n, Field::Rationals, terms).unwrap()
}

/// Every word over `n` letters of length at most `max_len`.
pub fn all_words(n: usize, max_len: usize) -> Vec<Word> {
    let mut out = vec![Word(vec![])];
    let mut frontier = vec![Vec::<u32>::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &frontier {
            for v in 0..n as u32 {
                let mut x = w.clone();
                x.push(v);
                next.push(x);
            }
        }
        out.extend(next.iter().cloned().map(Word));
        frontier = next;
    }
    out
}

/// A point with small entries; integers in `[-4, 4]` over the rationals.
pub fn random_point(field: &Field, n: usize, rng: &mut impl rand::Rng) -> Vec<Scalar> {
    (0..n)
        .map(|_| match field {
            Field::Rationals => Scalar::integer(rng.gen_range(-4..=4)),
            _ => field.random(rng),
        })
        .collect()
}

pub fn test_fields() -> [Field; 2] {
    [Field::Rationals, Field::prime(5).unwrap()]
}

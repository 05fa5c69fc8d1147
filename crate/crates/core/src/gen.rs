//! Seeded random instances for tests, benchmarks and the CLI.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::abp::{abp_sum, Abp, LinearForm};
use crate::cfg::{AcyclicCfg, Production, Symbol};
use crate::circuit::{Circuit, CircuitBuilder, Gate};
use crate::linalg::Matrix;
use crate::pit::Digraph;
use crate::poly::{words_of_length, NcPoly};
use crate::scalar::{Field, Rational, Scalar};

/// A small nonzero scalar: an integer in `[-3, 3]` over the rationals, a
/// uniform nonzero element otherwise.
pub fn small_nonzero<R: Rng + ?Sized>(field: &Field, rng: &mut R) -> Scalar {
    loop {
        let s = match field {
            Field::Rationals => Scalar::integer(rng.gen_range(-3..=3)),
            _ => field.random(rng),
        };
        if !s.is_zero() {
            return s;
        }
    }
}

/// Shape parameters for [`random_abp`].
#[derive(Clone, Debug)]
pub struct AbpShape {
    pub n_vars: usize,
    pub depth: usize,
    pub max_width: usize,
    /// Probability that a given pair of nodes in consecutive layers is
    /// joined.
    pub edge_density: f64,
    /// Probability that a label has a nonzero constant term.
    pub constant_density: f64,
}

impl AbpShape {
    pub fn homogeneous(n_vars: usize, depth: usize, max_width: usize) -> AbpShape {
        AbpShape {
            n_vars,
            depth,
            max_width,
            edge_density: 0.6,
            constant_density: 0.0,
        }
    }

    pub fn affine(n_vars: usize, depth: usize, max_width: usize) -> AbpShape {
        AbpShape {
            constant_density: 0.3,
            ..AbpShape::homogeneous(n_vars, depth, max_width)
        }
    }
}

fn random_label<R: Rng + ?Sized>(field: &Field, shape: &AbpShape, rng: &mut R) -> LinearForm {
    let constant = if rng.gen_bool(shape.constant_density) {
        small_nonzero(field, rng)
    } else {
        field.zero()
    };
    let n_terms = rng.gen_range(1..=shape.n_vars.min(2));
    let coeffs: Vec<(u32, Scalar)> = (0..n_terms)
        .map(|_| (rng.gen_range(0..shape.n_vars as u32), small_nonzero(field, rng)))
        .collect();
    LinearForm::new(constant, coeffs)
}

pub fn random_abp<R: Rng + ?Sized>(field: &Field, shape: &AbpShape, rng: &mut R) -> Abp {
    let d = shape.depth;
    let mut layers = vec![1usize; d + 1];
    for w in layers.iter_mut().take(d).skip(1) {
        *w = rng.gen_range(1..=shape.max_width);
    }
    let mut abp = Abp::new(shape.n_vars, field.clone(), layers.clone()).expect("valid layers");
    for l in 0..d {
        for a in 0..layers[l] {
            let mut any = false;
            for b in 0..layers[l + 1] {
                if rng.gen_bool(shape.edge_density) {
                    abp.add_edge(l, a, b, random_label(field, shape, rng))
                        .expect("valid edge");
                    any = true;
                }
            }
            // Every node keeps an outgoing edge, so a source-to-sink path exists.
            if !any {
                let b = rng.gen_range(0..layers[l + 1]);
                abp.add_edge(l, a, b, random_label(field, shape, rng))
                    .expect("valid edge");
            }
        }
    }
    abp
}

/// A program computing zero that is not structurally trivial: a random
/// program minus a rescaled copy of itself. Over the rationals the copy
/// multiplies the labels entering each interior node by a random factor and
/// divides the labels leaving it by the same factor.
pub fn cancelling_abp<R: Rng + ?Sized>(field: &Field, shape: &AbpShape, rng: &mut R) -> Abp {
    let p = random_abp(field, shape, rng);
    let mut copy = Abp::new(p.n_vars(), field.clone(), p.layers().to_vec()).expect("valid layers");
    let factors: Vec<Vec<Scalar>> = p
        .layers()
        .iter()
        .enumerate()
        .map(|(l, &w)| {
            (0..w)
                .map(|_| {
                    if l == 0 || l == p.depth() {
                        field.one()
                    } else {
                        small_nonzero(field, rng)
                    }
                })
                .collect()
        })
        .collect();
    for (k, label) in p.edges() {
        let scale = factors[k.layer + 1][k.to]
            .try_div(&factors[k.layer][k.from])
            .expect("nonzero factor");
        copy.add_edge(k.layer, k.from, k.to, label.scale(&scale))
            .expect("valid edge");
    }
    abp_sum(&[p, copy.negate()]).expect("compatible programs")
}

/// A random circuit with at most `max_gates` gates whose output has formal
/// degree at most `max_degree`. Monotone circuits use only positive
/// constants and require the rationals.
pub fn random_circuit<R: Rng + ?Sized>(
    field: &Field,
    n_vars: usize,
    max_gates: usize,
    max_degree: usize,
    monotone: bool,
    rng: &mut R,
) -> Circuit {
    let mut b = CircuitBuilder::new(n_vars, field.clone());
    let mut deg: Vec<usize> = Vec::new();
    let n_leaves = rng.gen_range(1..=max_gates.div_ceil(2).max(1));
    for _ in 0..n_leaves {
        if rng.gen_bool(0.75) {
            b.input(rng.gen_range(0..n_vars as u32)).unwrap();
            deg.push(1);
        } else {
            let c = if monotone {
                Scalar::rational(Rational::new(
                    BigInt::from(rng.gen_range(1..=3)),
                    BigInt::from(rng.gen_range(1..=2)),
                ))
            } else {
                small_nonzero(field, rng)
            };
            b.constant(c).unwrap();
            deg.push(0);
        }
    }
    while b.len() < max_gates {
        let i = rng.gen_range(0..b.len());
        let j = rng.gen_range(0..b.len());
        let mul = rng.gen_bool(0.5) && deg[i] + deg[j] <= max_degree;
        if mul {
            b.push(Gate::Mul(i, j)).unwrap();
            deg.push(deg[i] + deg[j]);
        } else if deg[i].max(deg[j]) <= max_degree {
            b.push(Gate::Add(i, j)).unwrap();
            deg.push(deg[i].max(deg[j]));
        }
        if rng.gen_bool(0.15) {
            break;
        }
    }
    let out = b.len() - 1;
    b.finish(out).unwrap()
}

/// A random homogeneous polynomial of degree `degree` with at most
/// `max_terms` terms.
pub fn random_homogeneous_poly<R: Rng + ?Sized>(
    field: &Field,
    n_vars: usize,
    degree: usize,
    max_terms: usize,
    rng: &mut R,
) -> NcPoly {
    let words: Vec<_> = words_of_length(n_vars, degree).collect();
    let n = rng.gen_range(0..=max_terms.min(words.len()));
    let terms = words
        .choose_multiple(rng, n)
        .map(|w| (w.clone(), small_nonzero(field, rng)));
    NcPoly::from_terms(n_vars, field.clone(), terms.collect::<Vec<_>>()).expect("valid terms")
}

/// An `n x n` integer matrix with entries in `[-range, range]`. About a third
/// of the time one row is replaced by a combination of two others so that
/// singular matrices are common.
pub fn random_int_matrix<R: Rng + ?Sized>(n: usize, range: i64, rng: &mut R) -> Matrix {
    let mut v: Vec<i64> = (0..n * n).map(|_| rng.gen_range(-range..=range)).collect();
    if n >= 2 && rng.gen_bool(0.35) {
        let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
        let target = rng.gen_range(0..n);
        let (ca, cb) = (rng.gen_range(-2..=2), rng.gen_range(-2..=2));
        for j in 0..n {
            v[target * n + j] = ca * v[a * n + j] + cb * v[b * n + j];
        }
    }
    Matrix::from_integers(n, n, &v).expect("square shape")
}

/// A directed graph on `vertices` vertices with each ordered pair joined
/// independently with probability `density`; `s` and `t` are drawn at
/// random.
pub fn random_digraph<R: Rng + ?Sized>(vertices: usize, density: f64, rng: &mut R) -> Digraph {
    let mut edges = Vec::new();
    for u in 0..vertices {
        for v in 0..vertices {
            if u != v && rng.gen_bool(density) {
                edges.push((u, v));
            }
        }
    }
    Digraph {
        vertices,
        edges,
        s: rng.gen_range(0..vertices),
        t: rng.gen_range(0..vertices),
    }
}

/// A random acyclic grammar: nonterminal `i` only refers to nonterminals
/// with larger index, so the dependency graph is acyclic by construction.
pub fn random_cfg<R: Rng + ?Sized>(n_nonterminals: usize, n_terminals: usize, rng: &mut R) -> AcyclicCfg {
    let names: Vec<_> = (0..n_nonterminals).map(|i| alloc::format!("A{i}")).collect();
    let mut productions = Vec::new();
    for lhs in 0..n_nonterminals {
        let count = rng.gen_range(1..=3);
        for _ in 0..count {
            let len = if lhs + 1 == n_nonterminals {
                rng.gen_range(0..=1)
            } else {
                rng.gen_range(0..=2)
            };
            let rhs = (0..len)
                .map(|_| {
                    if lhs + 1 < n_nonterminals && rng.gen_bool(0.5) {
                        Symbol::N(rng.gen_range(lhs + 1..n_nonterminals))
                    } else {
                        Symbol::T(rng.gen_range(0..n_terminals as u32))
                    }
                })
                .collect();
            productions.push(Production { lhs, rhs });
        }
    }
    productions.sort();
    productions.dedup();
    AcyclicCfg::new(names, n_terminals, 0, productions).expect("acyclic by construction")
}

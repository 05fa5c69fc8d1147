//! Hadamard products of a program with a program, and of a circuit with a
//! program.
//!
//! Both constructions split the program(s) into homogeneous components,
//! take the product degree by degree and add the results, since
//! `f ∘ g = Σ_i f_i ∘ g_i` for homogeneous parts `f_i`, `g_i`.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::abp::{abp_sum, Abp, LinearForm, NormalizedAbp};
use crate::circuit::{Circuit, CircuitBuilder, Gate, GateId};
use crate::error::{Error, Result};
use crate::scalar::{Field, Scalar};

fn check_compatible(n1: usize, f1: &Field, n2: usize, f2: &Field) -> Result<()> {
    if n1 != n2 {
        return Err(Error::ArityMismatch {
            expected: n1,
            found: n2,
        });
    }
    if f1 != f2 {
        return Err(Error::FieldMismatch);
    }
    Ok(())
}

/// Index of the product node for the pair `(a, b)` in a layer where the
/// right factor has `right_width` nodes.
pub fn product_index(a: usize, b: usize, right_width: usize) -> usize {
    a * right_width + b
}

/// Product of two normalized programs of equal depth. Layer `i` has
/// `s_i * t_i` nodes; the edge `(a, b) -> (c, e)` gets `αβ x_v` for every
/// pair of edges `a -> c` labelled `α x_v` and `b -> e` labelled `β x_v`.
/// The result is not pruned.
pub fn hadamard_normalized(p: &NormalizedAbp, q: &NormalizedAbp) -> Result<Abp> {
    check_compatible(p.n_vars(), p.field(), q.n_vars(), q.field())?;
    if p.depth() != q.depth() {
        return Err(Error::InvalidArgument(alloc::format!(
            "programs have depths {} and {}",
            p.depth(),
            q.depth()
        )));
    }
    let lw = p.layers();
    let rw = q.layers();
    let layers: Vec<usize> = lw.iter().zip(rw).map(|(a, b)| a * b).collect();
    let mut out = Abp::new(p.n_vars(), p.field().clone(), layers)?;
    let mut by_key: BTreeMap<(usize, u32), Vec<_>> = BTreeMap::new();
    for e in q.edges() {
        by_key.entry((e.layer, e.var)).or_default().push(e);
    }
    for e in p.edges() {
        let Some(partners) = by_key.get(&(e.layer, e.var)) else {
            continue;
        };
        for f in partners {
            let from = product_index(e.from, f.from, rw[e.layer]);
            let to = product_index(e.to, f.to, rw[e.layer + 1]);
            out.add_edge(e.layer, from, to, LinearForm::var(e.var, &e.coeff * &f.coeff))?;
        }
    }
    Ok(out)
}

/// Node counts for one degree of the product.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeSize {
    pub degree: usize,
    /// Layer widths of the left factor's homogeneous component.
    pub left_layers: Vec<usize>,
    pub right_layers: Vec<usize>,
    /// Layer widths of the product before pruning.
    pub product_layers: Vec<usize>,
    pub nodes_after_prune: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SizeReport {
    pub left_nodes: usize,
    pub right_nodes: usize,
    pub degrees: Vec<DegreeSize>,
    /// Nodes of the sum of the unpruned per-degree products.
    pub nodes_before_prune: usize,
    pub nodes_after_prune: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HadamardAbp {
    pub abp: Abp,
    pub report: SizeReport,
}

/// A program for `f ∘ g` where `p` computes `f` and `q` computes `g`.
pub fn hadamard_abp(p: &Abp, q: &Abp) -> Result<HadamardAbp> {
    check_compatible(p.n_vars(), p.field(), q.n_vars(), q.field())?;
    let field = p.field().clone();
    let right: BTreeMap<usize, Abp> = q.homogeneous_parts().into_iter().map(|h| (h.degree, h.abp)).collect();
    let mut raw = Vec::new();
    let mut pruned = Vec::new();
    let mut degrees = Vec::new();
    for part in p.homogeneous_parts() {
        let Some(other) = right.get(&part.degree) else {
            continue;
        };
        let product = if part.degree == 0 {
            let c = part.abp.label(0, 0, 0).unwrap().constant_term() * other.label(0, 0, 0).unwrap().constant_term();
            let mut abp = Abp::new(p.n_vars(), field.clone(), vec![1, 1])?;
            abp.add_edge(0, 0, 0, LinearForm::constant(c))?;
            abp
        } else {
            hadamard_normalized(&part.abp.normalize_edges()?, &other.normalize_edges()?)?
        };
        let small = product.prune();
        degrees.push(DegreeSize {
            degree: part.degree,
            left_layers: part.abp.layers().to_vec(),
            right_layers: other.layers().to_vec(),
            product_layers: product.layers().to_vec(),
            nodes_after_prune: small.node_count(),
        });
        raw.push(product);
        if small.edge_count() > 0 {
            pruned.push(small);
        }
    }
    let nodes_before_prune = if raw.is_empty() { 2 } else { abp_sum(&raw)?.node_count() };
    let abp = if pruned.is_empty() {
        Abp::zero(p.n_vars(), field, 1)
    } else {
        abp_sum(&pruned)?.prune()
    };
    Ok(HadamardAbp {
        report: SizeReport {
            left_nodes: p.node_count(),
            right_nodes: q.node_count(),
            degrees,
            nodes_before_prune,
            nodes_after_prune: abp.node_count(),
        },
        abp,
    })
}

/// Identifies the product gate for circuit gate `gate`, degree slice `l`
/// and program nodes `(i, a)` and `(i + l, b)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct GateKey {
    pub gate: GateId,
    pub l: usize,
    pub i: usize,
    pub a: usize,
    pub b: usize,
}

/// The gates built for one homogeneous component of the program.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeGates {
    pub degree: usize,
    /// The component itself: depth `degree` with linear labels, or for
    /// degree 0 a single constant edge. For degree 0 the table only has
    /// keys with `l = i = a = b = 0`, standing for the empty path.
    pub part: Abp,
    /// Gate of the product circuit computing
    /// `(degree-l part of gate) ∘ (program from (i,a) to (i+l,b))`.
    /// Missing keys compute 0.
    pub gates: BTreeMap<GateKey, GateId>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CircuitAbpProduct {
    pub circuit: Circuit,
    pub per_degree: Vec<DegreeGates>,
}

/// Slices of one circuit gate, keyed `(i, a, l, b)` so that all slices
/// starting at a given node form a contiguous range.
type Slices = BTreeMap<(usize, usize, usize, usize), GateId>;

struct DegreeBuilder<'a> {
    b: &'a mut CircuitBuilder,
    widths: Vec<usize>,
    /// `(layer, from, to) -> [(var, coeff)]`.
    edges: BTreeMap<(usize, usize, usize), Vec<(u32, Scalar)>>,
    inputs: &'a mut BTreeMap<u32, GateId>,
}

impl DegreeBuilder<'_> {
    fn input(&mut self, v: u32) -> Result<GateId> {
        if let Some(&id) = self.inputs.get(&v) {
            return Ok(id);
        }
        let id = self.b.input(v)?;
        self.inputs.insert(v, id);
        Ok(id)
    }

    fn slices(&mut self, gate: &Gate, table: &[Slices]) -> Result<Slices> {
        let depth = self.widths.len() - 1;
        let mut out = Slices::new();
        match gate {
            Gate::Input(v) => {
                let edges: Vec<_> = self
                    .edges
                    .iter()
                    .flat_map(|(&(i, a, b), labels)| {
                        labels
                            .iter()
                            .filter(|(w, _)| w == v)
                            .map(move |(_, c)| (i, a, b, c.clone()))
                    })
                    .collect();
                for (i, a, b, c) in edges {
                    let x = self.input(*v)?;
                    let id = if c.is_one() {
                        x
                    } else {
                        let k = self.b.constant(c)?;
                        self.b.mul(k, x)?
                    };
                    out.insert((i, a, 1, b), id);
                }
            }
            Gate::Const(c) => {
                if !c.is_zero() {
                    let id = self.b.constant(c.clone())?;
                    for (i, &w) in self.widths.iter().enumerate() {
                        for a in 0..w {
                            out.insert((i, a, 0, a), id);
                        }
                    }
                }
            }
            Gate::Add(l, r) => {
                let (tl, tr) = (&table[*l], &table[*r]);
                for (k, &id) in tl {
                    let id = match tr.get(k) {
                        Some(&other) => self.b.add(id, other)?,
                        None => id,
                    };
                    out.insert(*k, id);
                }
                for (k, &id) in tr {
                    out.entry(*k).or_insert(id);
                }
            }
            Gate::Mul(l, r) => {
                // Split the word at degree j and the path at node (i+j, t).
                let mut terms: BTreeMap<(usize, usize, usize, usize), Vec<GateId>> = BTreeMap::new();
                let (tl, tr) = (&table[*l], &table[*r]);
                for (&(i, a, j, t), &left) in tl {
                    let mid = i + j;
                    for (&(_, _, l2, b), &right) in tr.range((mid, t, 0, 0)..=(mid, t, depth, usize::MAX)) {
                        let id = self.b.mul(left, right)?;
                        terms.entry((i, a, j + l2, b)).or_default().push(id);
                    }
                }
                for (k, ids) in terms {
                    out.insert(k, self.b.sum(ids)?.unwrap());
                }
            }
        }
        Ok(out)
    }
}

/// A circuit for `f ∘ h` where `c` computes `f` and `p` computes `h`.
pub fn hadamard_circuit_abp(c: &Circuit, p: &Abp) -> Result<CircuitAbpProduct> {
    check_compatible(c.n_vars(), c.field(), p.n_vars(), p.field())?;
    let mut b = CircuitBuilder::new(c.n_vars(), c.field().clone());
    let mut inputs = BTreeMap::new();
    let mut outputs = Vec::new();
    let mut per_degree = Vec::new();
    for part in p.homogeneous_parts() {
        let (widths, edges, scale) = if part.degree == 0 {
            let k = part.abp.label(0, 0, 0).unwrap().constant_term().clone();
            (vec![1], BTreeMap::new(), Some(k))
        } else {
            let mut edges: BTreeMap<_, Vec<_>> = BTreeMap::new();
            for e in part.abp.normalize_edges()?.edges() {
                edges
                    .entry((e.layer, e.from, e.to))
                    .or_default()
                    .push((e.var, e.coeff.clone()));
            }
            (part.abp.layers().to_vec(), edges, None)
        };
        let depth = widths.len() - 1;
        let mut db = DegreeBuilder {
            b: &mut b,
            widths,
            edges,
            inputs: &mut inputs,
        };
        let mut table: Vec<Slices> = Vec::with_capacity(c.gates().len());
        for g in c.gates() {
            let s = db.slices(g, &table)?;
            table.push(s);
        }
        if let Some(&out) = table[c.output()].get(&(0, 0, depth, 0)) {
            let out = match scale {
                Some(k) if !k.is_one() => {
                    let kid = b.constant(k)?;
                    b.mul(kid, out)?
                }
                _ => out,
            };
            outputs.push(out);
        }
        let gates = table
            .iter()
            .enumerate()
            .flat_map(|(gate, s)| {
                s.iter()
                    .map(move |(&(i, a, l, bb), &id)| (GateKey { gate, l, i, a, b: bb }, id))
            })
            .collect();
        per_degree.push(DegreeGates {
            degree: part.degree,
            part: part.abp,
            gates,
        });
    }
    let out = match b.sum(outputs)? {
        Some(o) => o,
        None => b.constant(c.field().zero())?,
    };
    Ok(CircuitAbpProduct {
        circuit: b.finish(out)?,
        per_degree,
    })
}

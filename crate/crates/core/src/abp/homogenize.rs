//! Homogeneous components and the single-variable edge form.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::{Abp, EdgeKey, LinearForm, NodeId};
use crate::error::{Caps, Error, Result};
use crate::linalg::Matrix;
use crate::poly::{NcPoly, Word};
use crate::scalar::{Field, Scalar};

/// The degree-`degree` homogeneous component of a program's polynomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomogeneousPart {
    pub degree: usize,
    pub abp: Abp,
}

/// For every node `u`, the nodes reachable from `u` through edges with a
/// constant term, weighted by the sum over such paths of the product of those
/// constants. Includes `u` itself with weight one.
fn constant_closure(abp: &Abp) -> BTreeMap<NodeId, BTreeMap<NodeId, Scalar>> {
    let field = abp.field().clone();
    let mut out = BTreeMap::new();
    for layer in 0..abp.layers.len() {
        for idx in 0..abp.layers[layer] {
            let u = NodeId::new(layer, idx);
            let mut reach: BTreeMap<NodeId, Scalar> = BTreeMap::new();
            reach.insert(u, field.one());
            let mut frontier: BTreeMap<usize, Scalar> = BTreeMap::new();
            frontier.insert(idx, field.one());
            for l in layer..abp.depth() {
                let mut next: BTreeMap<usize, Scalar> = BTreeMap::new();
                for (k, label) in abp.edges_from_layer(l) {
                    if label.constant.is_zero() {
                        continue;
                    }
                    if let Some(w) = frontier.get(&k.from) {
                        let c = w * &label.constant;
                        let e = next.entry(k.to).or_insert_with(|| field.zero());
                        *e = &*e + &c;
                    }
                }
                next.retain(|_, v| !v.is_zero());
                if next.is_empty() {
                    break;
                }
                for (i, v) in &next {
                    reach.insert(NodeId::new(l + 1, *i), v.clone());
                }
                frontier = next;
            }
            out.insert(u, reach);
        }
    }
    out
}

impl Abp {
    /// All nonzero homogeneous components, lowest degree first. Components
    /// that are structurally empty are omitted, so a homogeneous program
    /// yields a single part (or none when it computes zero).
    ///
    /// Each part of degree `i >= 1` has depth `i` and labels without
    /// constant terms. The degree-0 part has depth one and a single constant
    /// edge.
    pub fn homogeneous_parts(&self) -> Vec<HomogeneousPart> {
        let closure = constant_closure(self);
        (0..=self.depth())
            .filter_map(|i| {
                self.homogeneous_part_with(i, &closure)
                    .map(|abp| HomogeneousPart { degree: i, abp })
            })
            .collect()
    }

    /// The degree-`degree` component, or `None` when it is structurally
    /// empty.
    pub fn homogeneous_part(&self, degree: usize) -> Option<Abp> {
        if degree > self.depth() {
            return None;
        }
        self.homogeneous_part_with(degree, &constant_closure(self))
    }

    fn homogeneous_part_with(&self, i: usize, closure: &BTreeMap<NodeId, BTreeMap<NodeId, Scalar>>) -> Option<Abp> {
        let d = self.depth();
        let field = self.field.clone();
        let src = self.source();
        let sink = self.sink();
        let to_sink = |v: NodeId| -> Option<Scalar> { closure[&v].get(&sink).cloned() };

        if i == 0 {
            let c = to_sink(src)?;
            let mut abp = Abp::new(self.n_vars, field, vec![1, 1]).ok()?;
            abp.add_edge(0, 0, 0, LinearForm::constant(c)).ok()?;
            return Some(abp);
        }

        // New layer k (0 < k < i) holds original nodes v with
        // k <= layer(v) <= d - (i - k).
        let mut members: Vec<Vec<NodeId>> = vec![vec![src]];
        let mut index: Vec<BTreeMap<NodeId, usize>> = vec![BTreeMap::from([(src, 0)])];
        for k in 1..i {
            let nodes: Vec<NodeId> = (k..=d - (i - k))
                .flat_map(|l| (0..self.layers[l]).map(move |j| NodeId::new(l, j)))
                .collect();
            index.push(nodes.iter().enumerate().map(|(j, v)| (*v, j)).collect());
            members.push(nodes);
        }
        members.push(vec![sink]);

        let mut edges: BTreeMap<EdgeKey, LinearForm> = BTreeMap::new();
        let mut add = |key: EdgeKey, lf: LinearForm| {
            if lf.is_zero() {
                return;
            }
            let sum = match edges.get(&key) {
                Some(old) => old.add(&lf),
                None => lf,
            };
            if sum.is_zero() {
                edges.remove(&key);
            } else {
                edges.insert(key, sum);
            }
        };
        for k in 0..i {
            let last = k + 1 == i;
            for (a, u) in members[k].iter().enumerate() {
                for (w, cw) in &closure[u] {
                    if w.layer >= d {
                        continue;
                    }
                    for (key, label) in self.edges_from_layer(w.layer) {
                        if key.from != w.index || label.coeffs.is_empty() {
                            continue;
                        }
                        let v = NodeId::new(w.layer + 1, key.to);
                        let lin = label.linear_part();
                        if last {
                            if let Some(cv) = to_sink(v) {
                                let key = EdgeKey {
                                    layer: k,
                                    from: a,
                                    to: 0,
                                };
                                add(key, lin.scale(&(cw * &cv)));
                            }
                        } else if let Some(&b) = index[k + 1].get(&v) {
                            add(
                                EdgeKey {
                                    layer: k,
                                    from: a,
                                    to: b,
                                },
                                lin.scale(cw),
                            );
                        }
                    }
                }
            }
        }
        let layers: Vec<usize> = members.iter().map(Vec::len).collect();
        let abp = Abp {
            n_vars: self.n_vars,
            field,
            layers,
            edges,
        }
        .prune();
        (abp.edge_count() > 0).then_some(abp)
    }

    /// Rewrites a program whose labels have no constant terms so that every
    /// edge carries a single variable.
    pub fn normalize_edges(&self) -> Result<NormalizedAbp> {
        if self.depth() == 0 {
            return Err(Error::NotHomogeneous(
                "a depth-zero program has no edges to normalize".into(),
            ));
        }
        let mut edges = Vec::new();
        for (k, label) in &self.edges {
            if !label.is_linear() {
                return Err(Error::NotHomogeneous(format!(
                    "edge ({},{}) -> ({},{}) has constant term {}",
                    k.layer,
                    k.from,
                    k.layer + 1,
                    k.to,
                    label.constant
                )));
            }
            for (var, coeff) in &label.coeffs {
                edges.push(SimpleEdge {
                    layer: k.layer,
                    from: k.from,
                    to: k.to,
                    var: *var,
                    coeff: coeff.clone(),
                });
            }
        }
        Ok(NormalizedAbp {
            n_vars: self.n_vars,
            field: self.field.clone(),
            layers: self.layers.clone(),
            edges,
        })
    }

    /// Coefficient of `word` in the computed polynomial.
    pub fn coefficient_of(&self, word: &Word) -> Result<Scalar> {
        if word.0.iter().any(|&v| v as usize >= self.n_vars) {
            return Err(Error::InvalidArgument(format!(
                "word uses a variable beyond x{}",
                self.n_vars - 1
            )));
        }
        let Some(part) = self.homogeneous_part(word.degree()) else {
            return Ok(self.field.zero());
        };
        if word.degree() == 0 {
            return Ok(part
                .label(0, 0, 0)
                .map(|l| l.constant.clone())
                .unwrap_or_else(|| self.field.zero()));
        }
        part.normalize_edges()?.coefficient_matrices().coefficient_of(word)
    }
}

/// An edge labelled `coeff * x_var`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimpleEdge {
    pub layer: usize,
    pub from: usize,
    pub to: usize,
    pub var: u32,
    pub coeff: Scalar,
}

/// A homogeneous program in which every edge is labelled by a multiple of a
/// single variable. Parallel edges with different variables are kept apart.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalizedAbp {
    n_vars: usize,
    field: Field,
    layers: Vec<usize>,
    edges: Vec<SimpleEdge>,
}

impl NormalizedAbp {
    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn layers(&self) -> &[usize] {
        &self.layers
    }

    pub fn depth(&self) -> usize {
        self.layers.len() - 1
    }

    pub fn edges(&self) -> &[SimpleEdge] {
        &self.edges
    }

    /// Back to an [`Abp`], summing parallel edges into linear forms.
    pub fn to_abp(&self) -> Abp {
        let mut abp = Abp::new(self.n_vars, self.field.clone(), self.layers.clone()).expect("layers already validated");
        for e in &self.edges {
            abp.add_edge(e.layer, e.from, e.to, LinearForm::var(e.var, e.coeff.clone()))
                .expect("edge already validated");
        }
        abp
    }

    pub fn expand(&self, caps: &Caps) -> Result<NcPoly> {
        self.to_abp().expand(caps)
    }

    /// `A[layer][var]`: the `n_layer x n_{layer+1}` matrix whose `(a, b)`
    /// entry is the coefficient of `x_var` on the edge `a -> b`.
    pub fn coefficient_matrices(&self) -> CoefficientMatrices {
        let mut mats: Vec<Vec<Matrix>> = (0..self.depth())
            .map(|l| {
                (0..self.n_vars)
                    .map(|_| Matrix::zeros(self.layers[l], self.layers[l + 1], self.field.clone()))
                    .collect()
            })
            .collect();
        for e in &self.edges {
            let m = &mut mats[e.layer][e.var as usize];
            let v = m.get(e.from, e.to) + &e.coeff;
            m.set(e.from, e.to, v);
        }
        CoefficientMatrices { mats }
    }
}

/// Per-layer, per-variable coefficient matrices of a normalized program.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoefficientMatrices {
    mats: Vec<Vec<Matrix>>,
}

impl CoefficientMatrices {
    pub fn depth(&self) -> usize {
        self.mats.len()
    }

    pub fn get(&self, layer: usize, var: u32) -> &Matrix {
        &self.mats[layer][var as usize]
    }

    pub fn layer(&self, layer: usize) -> &[Matrix] {
        &self.mats[layer]
    }

    /// `A[0][w_1] * A[1][w_2] * ... * A[d-1][w_d]`.
    pub fn word_product(&self, word: &Word) -> Result<Matrix> {
        if word.degree() != self.depth() {
            return Err(Error::ArityMismatch {
                expected: self.depth(),
                found: word.degree(),
            });
        }
        let mut acc = self.mats[0][word.0[0] as usize].clone();
        for (l, &v) in word.0.iter().enumerate().skip(1) {
            acc = acc.matmul(&self.mats[l][v as usize])?;
        }
        Ok(acc)
    }

    /// Coefficient of `word`; words of the wrong length have coefficient 0.
    pub fn coefficient_of(&self, word: &Word) -> Result<Scalar> {
        let field = self.mats[0][0].field().clone();
        if word.degree() != self.depth() {
            return Ok(field.zero());
        }
        Ok(self.word_product(word)?.get(0, 0).clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::words_of_length;

    fn q(v: i64) -> Scalar {
        Scalar::integer(v)
    }

    fn lf(c: i64, coeffs: &[(u32, i64)]) -> LinearForm {
        LinearForm::new(q(c), coeffs.iter().map(|&(v, a)| (v, q(a))))
    }

    /// (1 + x0)(2 + x1) over two layers with an extra constant bypass.
    fn affine() -> Abp {
        let mut abp = Abp::new(2, Field::Rationals, vec![1, 2, 1]).unwrap();
        abp.add_edge(0, 0, 0, lf(1, &[(0, 1)])).unwrap();
        abp.add_edge(1, 0, 0, lf(2, &[(1, 1)])).unwrap();
        abp.add_edge(0, 0, 1, lf(3, &[])).unwrap();
        abp.add_edge(1, 1, 0, lf(0, &[(0, 5)])).unwrap();
        abp
    }

    #[test]
    fn parts_sum_to_the_whole() {
        let caps = Caps::default();
        let abp = affine();
        let full = abp.expand(&caps).unwrap();
        let parts = abp.homogeneous_parts();
        assert_eq!(parts.iter().map(|p| p.degree).collect::<Vec<_>>(), vec![0, 1, 2]);
        for p in &parts {
            assert_eq!(p.abp.depth(), p.degree.max(1));
            assert_eq!(p.abp.expand(&caps).unwrap(), full.homogeneous_part(p.degree));
            if p.degree > 0 {
                assert!(p.abp.has_linear_labels());
            }
        }
    }

    #[test]
    fn homogeneous_program_is_its_own_part() {
        let mut abp = Abp::new(2, Field::Rationals, vec![1, 2, 1]).unwrap();
        abp.add_edge(0, 0, 0, lf(0, &[(0, 1), (1, 2)])).unwrap();
        abp.add_edge(0, 0, 1, lf(0, &[(1, 1)])).unwrap();
        abp.add_edge(1, 0, 0, lf(0, &[(0, 1)])).unwrap();
        abp.add_edge(1, 1, 0, lf(0, &[(0, 3), (1, 1)])).unwrap();
        let parts = abp.homogeneous_parts();
        assert_eq!(parts.len(), 1);
        assert_eq!(parts[0].abp, abp);
    }

    #[test]
    fn normalization_splits_labels() {
        let caps = Caps::default();
        let mut abp = Abp::new(2, Field::Rationals, vec![1, 1]).unwrap();
        abp.add_edge(0, 0, 0, lf(0, &[(0, 2), (1, 3)])).unwrap();
        let n = abp.normalize_edges().unwrap();
        assert_eq!(n.edges().len(), 2);
        assert!(n.edges().iter().all(|e| e.layer == 0 && e.from == 0 && e.to == 0));
        assert_eq!(n.expand(&caps).unwrap(), abp.expand(&caps).unwrap());
        assert!(affine().normalize_edges().is_err());
    }

    #[test]
    fn coefficients_match_expansion() {
        let caps = Caps::default();
        let abp = affine();
        let full = abp.expand(&caps).unwrap();
        for len in 0..=3 {
            for w in words_of_length(2, len) {
                assert_eq!(abp.coefficient_of(&w).unwrap(), full.coeff(&w), "word {w:?}");
            }
        }
    }

    #[test]
    fn coefficient_matrices_example() {
        // x0 on the first layer, x1 on the second, single path.
        let mut abp = Abp::new(2, Field::Rationals, vec![1, 1, 1]).unwrap();
        abp.add_edge(0, 0, 0, lf(0, &[(0, 4)])).unwrap();
        abp.add_edge(1, 0, 0, lf(0, &[(1, 5)])).unwrap();
        let m = abp.normalize_edges().unwrap().coefficient_matrices();
        assert_eq!(m.get(0, 0).get(0, 0), &q(4));
        assert!(m.get(0, 1).is_zero());
        assert_eq!(m.coefficient_of(&Word(vec![0, 1])).unwrap(), q(20));
        assert_eq!(m.coefficient_of(&Word(vec![1, 0])).unwrap(), q(0));
    }
}

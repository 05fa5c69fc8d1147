//! Layered algebraic branching programs.
//!
//! Nodes are addressed by `(layer, index)`. Edges only join consecutive
//! layers and carry an affine linear form; parallel edges between the same
//! pair of nodes are stored as the sum of their labels. A missing edge has
//! label zero.

mod homogenize;
mod nisan;

pub use homogenize::{CoefficientMatrices, HomogeneousPart, NormalizedAbp, SimpleEdge};
pub use nisan::{nisan_complexity, nisan_matrix, nisan_matrix_with_degree, nisan_ranks, NisanMatrix};

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Caps, Error, Result};
use crate::linalg::Matrix;
use crate::poly::{NcPoly, Word};
use crate::scalar::{Field, Scalar};

/// `constant + sum_i coeffs[i] * x_i`. Zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearForm {
    constant: Scalar,
    coeffs: BTreeMap<u32, Scalar>,
}

impl LinearForm {
    pub fn zero(field: &Field) -> LinearForm {
        LinearForm {
            constant: field.zero(),
            coeffs: BTreeMap::new(),
        }
    }

    pub fn constant(c: Scalar) -> LinearForm {
        LinearForm {
            constant: c,
            coeffs: BTreeMap::new(),
        }
    }

    /// `c * x_var`.
    pub fn var(var: u32, c: Scalar) -> LinearForm {
        let mut lf = LinearForm::zero(&c.field());
        if !c.is_zero() {
            lf.coeffs.insert(var, c);
        }
        lf
    }

    pub fn new(constant: Scalar, coeffs: impl IntoIterator<Item = (u32, Scalar)>) -> LinearForm {
        let mut lf = LinearForm::constant(constant);
        for (v, c) in coeffs {
            lf.add_coeff(v, c);
        }
        lf
    }

    pub fn constant_term(&self) -> &Scalar {
        &self.constant
    }

    pub fn coeffs(&self) -> &BTreeMap<u32, Scalar> {
        &self.coeffs
    }

    pub fn coeff(&self, var: u32) -> Scalar {
        self.coeffs
            .get(&var)
            .cloned()
            .unwrap_or_else(|| self.constant.field().zero())
    }

    pub fn field(&self) -> Field {
        self.constant.field()
    }

    pub fn is_zero(&self) -> bool {
        self.constant.is_zero() && self.coeffs.is_empty()
    }

    /// No constant term.
    pub fn is_linear(&self) -> bool {
        self.constant.is_zero()
    }

    fn add_coeff(&mut self, v: u32, c: Scalar) {
        if c.is_zero() {
            return;
        }
        let sum = match self.coeffs.get(&v) {
            Some(old) => old + &c,
            None => c,
        };
        if sum.is_zero() {
            self.coeffs.remove(&v);
        } else {
            self.coeffs.insert(v, sum);
        }
    }

    pub fn add(&self, other: &LinearForm) -> LinearForm {
        let mut out = self.clone();
        out.constant = &out.constant + &other.constant;
        for (v, c) in &other.coeffs {
            out.add_coeff(*v, c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Scalar) -> LinearForm {
        LinearForm::new(&self.constant * c, self.coeffs.iter().map(|(v, a)| (*v, a * c)))
    }

    /// The form without its constant term.
    pub fn linear_part(&self) -> LinearForm {
        LinearForm {
            constant: self.constant.field().zero(),
            coeffs: self.coeffs.clone(),
        }
    }

    pub fn eval(&self, point: &[Scalar]) -> Scalar {
        let mut acc = self.constant.clone();
        for (v, c) in &self.coeffs {
            acc = &acc + &(c * &point[*v as usize]);
        }
        acc
    }

    pub fn to_poly(&self, n_vars: usize) -> NcPoly {
        let field = self.field();
        NcPoly::from_terms(
            n_vars,
            field,
            core::iter::once((Word::empty(), self.constant.clone()))
                .chain(self.coeffs.iter().map(|(v, c)| (Word(vec![*v]), c.clone()))),
        )
        .expect("label variables validated against the program")
    }
}

/// A node `(layer, index within layer)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId {
    pub layer: usize,
    pub index: usize,
}

impl NodeId {
    pub fn new(layer: usize, index: usize) -> NodeId {
        NodeId { layer, index }
    }
}

/// Edge key: `layer` is the layer of the tail; the head is in `layer + 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeKey {
    pub layer: usize,
    pub from: usize,
    pub to: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Abp {
    n_vars: usize,
    field: Field,
    layers: Vec<usize>,
    edges: BTreeMap<EdgeKey, LinearForm>,
}

impl Abp {
    /// An edgeless program with the given layer sizes.
    pub fn new(n_vars: usize, field: Field, layers: Vec<usize>) -> Result<Abp> {
        check_layers(&layers)?;
        Ok(Abp {
            n_vars,
            field,
            layers,
            edges: BTreeMap::new(),
        })
    }

    /// The program computing `0`, with `depth` single-node layers.
    pub fn zero(n_vars: usize, field: Field, depth: usize) -> Abp {
        Abp {
            n_vars,
            field,
            layers: vec![1; depth + 1],
            edges: BTreeMap::new(),
        }
    }

    /// Builds and validates a program from explicit edges given as
    /// `(tail, head, label)` triples. Parallel edges are summed.
    pub fn from_edges<I>(n_vars: usize, field: Field, layers: Vec<usize>, edges: I) -> Result<Abp>
    where
        I: IntoIterator<Item = (NodeId, NodeId, LinearForm)>,
    {
        let mut abp = Abp::new(n_vars, field, layers)?;
        for (from, to, label) in edges {
            if to.layer != from.layer + 1 {
                return Err(Error::Validation(format!(
                    "edge ({},{}) -> ({},{}) does not join consecutive layers",
                    from.layer, from.index, to.layer, to.index
                )));
            }
            abp.add_edge(from.layer, from.index, to.index, label)?;
        }
        Ok(abp)
    }

    /// Adds `label` to the edge `(layer, from) -> (layer + 1, to)`.
    pub fn add_edge(&mut self, layer: usize, from: usize, to: usize, label: LinearForm) -> Result<()> {
        if layer + 1 >= self.layers.len() {
            return Err(Error::Validation(format!(
                "edge leaves layer {layer}, the last layer is {}",
                self.depth()
            )));
        }
        if from >= self.layers[layer] {
            return Err(Error::Validation(format!("node ({layer},{from}) does not exist")));
        }
        if to >= self.layers[layer + 1] {
            return Err(Error::Validation(format!("node ({},{to}) does not exist", layer + 1)));
        }
        self.check_label(&label, layer, from, to)?;
        let key = EdgeKey { layer, from, to };
        let sum = match self.edges.get(&key) {
            Some(old) => old.add(&label),
            None => label,
        };
        if sum.is_zero() {
            self.edges.remove(&key);
        } else {
            self.edges.insert(key, sum);
        }
        Ok(())
    }

    fn check_label(&self, label: &LinearForm, layer: usize, from: usize, to: usize) -> Result<()> {
        if !self.field.contains(&label.constant) || label.coeffs.values().any(|c| !self.field.contains(c)) {
            return Err(Error::Validation(format!(
                "label on edge ({layer},{from}) -> ({},{to}) is not over {}",
                layer + 1,
                self.field
            )));
        }
        if let Some(v) = label.coeffs.keys().find(|&&v| v as usize >= self.n_vars) {
            return Err(Error::Validation(format!(
                "label on edge ({layer},{from}) -> ({},{to}) uses x{v} but there are {} variables",
                layer + 1,
                self.n_vars
            )));
        }
        Ok(())
    }

    /// Re-checks every structural invariant, reporting the first violation.
    pub fn validate(&self) -> Result<()> {
        check_layers(&self.layers)?;
        for (k, label) in &self.edges {
            if k.layer + 1 >= self.layers.len() || k.from >= self.layers[k.layer] || k.to >= self.layers[k.layer + 1] {
                return Err(Error::Validation(format!(
                    "edge ({},{}) -> ({},{}) out of range",
                    k.layer,
                    k.from,
                    k.layer + 1,
                    k.to
                )));
            }
            if label.is_zero() {
                return Err(Error::Validation(format!(
                    "edge ({},{}) stores a zero label",
                    k.layer, k.from
                )));
            }
            self.check_label(label, k.layer, k.from, k.to)?;
        }
        Ok(())
    }

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

    pub fn node_count(&self) -> usize {
        self.layers.iter().sum()
    }

    pub fn max_width(&self) -> usize {
        self.layers.iter().copied().max().unwrap_or(0)
    }

    pub fn edges(&self) -> &BTreeMap<EdgeKey, LinearForm> {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn label(&self, layer: usize, from: usize, to: usize) -> Option<&LinearForm> {
        self.edges.get(&EdgeKey { layer, from, to })
    }

    pub fn source(&self) -> NodeId {
        NodeId::new(0, 0)
    }

    pub fn sink(&self) -> NodeId {
        NodeId::new(self.depth(), 0)
    }

    /// True when every label has a zero constant term.
    pub fn has_linear_labels(&self) -> bool {
        self.edges.values().all(LinearForm::is_linear)
    }

    fn edges_from_layer(&self, layer: usize) -> impl Iterator<Item = (&EdgeKey, &LinearForm)> {
        let lo = EdgeKey { layer, from: 0, to: 0 };
        let hi = EdgeKey {
            layer: layer + 1,
            from: 0,
            to: 0,
        };
        self.edges.range(lo..hi)
    }

    /// The `n_layer x n_{layer+1}` matrix of labels evaluated at `point`.
    pub fn layer_matrix(&self, layer: usize, point: &[Scalar]) -> Matrix {
        let mut m = Matrix::zeros(self.layers[layer], self.layers[layer + 1], self.field.clone());
        for (k, label) in self.edges_from_layer(layer) {
            m.set(k.from, k.to, label.eval(point));
        }
        m
    }

    fn check_point(&self, point: &[Scalar]) -> Result<()> {
        if point.len() != self.n_vars {
            return Err(Error::ArityMismatch {
                expected: self.n_vars,
                found: point.len(),
            });
        }
        if point.iter().any(|v| !self.field.contains(v)) {
            return Err(Error::FieldMismatch);
        }
        Ok(())
    }

    /// Value at `point`, computed as the iterated product of the per-layer
    /// evaluated label matrices.
    pub fn evaluate(&self, point: &[Scalar]) -> Result<Scalar> {
        self.check_point(point)?;
        let mut acc = Matrix::identity(1, self.field.clone());
        for layer in 0..self.depth() {
            acc = acc.matmul(&self.layer_matrix(layer, point))?;
        }
        Ok(acc.get(0, 0).clone())
    }

    /// Evaluates with a separate point per layer: edges leaving layer `l`
    /// read their variables from `points[l]`.
    pub fn evaluate_layered(&self, points: &[Vec<Scalar>]) -> Result<Scalar> {
        if points.len() != self.depth() {
            return Err(Error::ArityMismatch {
                expected: self.depth(),
                found: points.len(),
            });
        }
        let mut acc = Matrix::identity(1, self.field.clone());
        for (layer, point) in points.iter().enumerate() {
            self.check_point(point)?;
            acc = acc.matmul(&self.layer_matrix(layer, point))?;
        }
        Ok(acc.get(0, 0).clone())
    }

    /// The polynomial computed: the sum over source-to-sink paths of the
    /// ordered product of edge labels, accumulated layer by layer.
    pub fn expand(&self, caps: &Caps) -> Result<NcPoly> {
        caps.check_degree(self.depth())?;
        let mut current = vec![NcPoly::constant(self.n_vars, self.field.one())];
        for layer in 0..self.depth() {
            let mut next = vec![NcPoly::zero(self.n_vars, self.field.clone()); self.layers[layer + 1]];
            for (k, label) in self.edges_from_layer(layer) {
                if current[k.from].is_zero() {
                    continue;
                }
                let contrib = current[k.from].mul_capped(&label.to_poly(self.n_vars), caps)?;
                next[k.to] = next[k.to].add(&contrib)?;
                caps.check_terms(next[k.to].len())?;
            }
            current = next;
        }
        Ok(current.swap_remove(0))
    }

    /// The sub-program with source `from` and sink `to`.
    ///
    /// When both nodes are in the same layer the result has depth zero
    /// (computing `1`) if they coincide and is an edgeless depth-one program
    /// (computing `0`) otherwise.
    pub fn between(&self, from: NodeId, to: NodeId) -> Result<Abp> {
        let valid = |n: NodeId| n.layer < self.layers.len() && n.index < self.layers[n.layer];
        if !valid(from) || !valid(to) || to.layer < from.layer {
            return Err(Error::InvalidArgument(format!(
                "no sub-program from ({},{}) to ({},{})",
                from.layer, from.index, to.layer, to.index
            )));
        }
        if from.layer == to.layer {
            return Ok(if from.index == to.index {
                Abp::zero(self.n_vars, self.field.clone(), 0)
            } else {
                Abp::zero(self.n_vars, self.field.clone(), 1)
            });
        }
        let mut layers: Vec<usize> = self.layers[from.layer..=to.layer].to_vec();
        layers[0] = 1;
        *layers.last_mut().unwrap() = 1;
        let mut sub = Abp::new(self.n_vars, self.field.clone(), layers)?;
        for (k, label) in &self.edges {
            if k.layer < from.layer || k.layer >= to.layer {
                continue;
            }
            let tail = if k.layer == from.layer {
                if k.from != from.index {
                    continue;
                }
                0
            } else {
                k.from
            };
            let head = if k.layer + 1 == to.layer {
                if k.to != to.index {
                    continue;
                }
                0
            } else {
                k.to
            };
            sub.add_edge(k.layer - from.layer, tail, head, label.clone())?;
        }
        Ok(sub)
    }

    /// Removes nodes that are not on any source-to-sink path and renumbers
    /// the rest, preserving relative order. A program with no such path
    /// becomes [`Abp::zero`] of the same depth.
    pub fn prune(&self) -> Abp {
        let d = self.depth();
        let mut fwd: Vec<Vec<bool>> = self.layers.iter().map(|&w| vec![false; w]).collect();
        fwd[0][0] = true;
        for k in self.edges.keys() {
            if fwd[k.layer][k.from] {
                fwd[k.layer + 1][k.to] = true;
            }
        }
        let mut bwd: Vec<Vec<bool>> = self.layers.iter().map(|&w| vec![false; w]).collect();
        bwd[d][0] = true;
        for (k, _) in self.edges.iter().rev() {
            if bwd[k.layer + 1][k.to] {
                bwd[k.layer][k.from] = true;
            }
        }
        if !fwd[d][0] {
            return Abp::zero(self.n_vars, self.field.clone(), d);
        }
        let mut remap: Vec<Vec<Option<usize>>> = Vec::with_capacity(d + 1);
        let mut layers = Vec::with_capacity(d + 1);
        for l in 0..=d {
            let mut next = 0;
            let row: Vec<Option<usize>> = (0..self.layers[l])
                .map(|i| {
                    if fwd[l][i] && bwd[l][i] {
                        next += 1;
                        Some(next - 1)
                    } else {
                        None
                    }
                })
                .collect();
            layers.push(next);
            remap.push(row);
        }
        let mut edges = BTreeMap::new();
        for (k, label) in &self.edges {
            if let (Some(a), Some(b)) = (remap[k.layer][k.from], remap[k.layer + 1][k.to]) {
                edges.insert(
                    EdgeKey {
                        layer: k.layer,
                        from: a,
                        to: b,
                    },
                    label.clone(),
                );
            }
        }
        Abp {
            n_vars: self.n_vars,
            field: self.field.clone(),
            layers,
            edges,
        }
    }

    /// Multiplies the computed polynomial by `c` (scales the labels leaving
    /// the source).
    pub fn scale(&self, c: &Scalar) -> Result<Abp> {
        if !self.field.contains(c) {
            return Err(Error::FieldMismatch);
        }
        let mut out = self.clone();
        if self.depth() == 0 {
            out = Abp::new(self.n_vars, self.field.clone(), vec![1, 1])?;
            out.add_edge(0, 0, 0, LinearForm::constant(c.clone()))?;
            return Ok(out);
        }
        out.edges = self
            .edges
            .iter()
            .filter_map(|(k, l)| {
                let l = if k.layer == 0 { l.scale(c) } else { l.clone() };
                (!l.is_zero()).then_some((*k, l))
            })
            .collect();
        Ok(out)
    }

    /// The same program over `field`, with every scalar sent through
    /// `embed`.
    pub fn map_field(&self, field: Field, embed: impl Fn(&Scalar) -> Scalar) -> Abp {
        let edges = self
            .edges
            .iter()
            .map(|(k, l)| {
                (
                    *k,
                    LinearForm::new(embed(&l.constant), l.coeffs.iter().map(|(v, c)| (*v, embed(c)))),
                )
            })
            .filter(|(_, l)| !l.is_zero())
            .collect();
        Abp {
            n_vars: self.n_vars,
            field,
            layers: self.layers.clone(),
            edges,
        }
    }

    pub fn negate(&self) -> Abp {
        self.scale(&-self.field.one()).expect("scalar from own field")
    }
}

fn check_layers(layers: &[usize]) -> Result<()> {
    if layers.is_empty() {
        return Err(Error::Validation("a program needs at least one layer".into()));
    }
    if layers[0] != 1 {
        return Err(Error::Validation(format!(
            "layer 0 has {} nodes, the source layer must have one",
            layers[0]
        )));
    }
    if *layers.last().unwrap() != 1 {
        return Err(Error::Validation(format!(
            "layer {} has {} nodes, the sink layer must have one",
            layers.len() - 1,
            layers.last().unwrap()
        )));
    }
    if let Some(l) = layers.iter().position(|&w| w == 0) {
        return Err(Error::Validation(format!("layer {l} is empty")));
    }
    Ok(())
}

/// A program computing the sum of the inputs' polynomials.
///
/// Inputs are placed side by side between a shared source and sink. Inputs
/// shallower than the deepest one are extended by a chain of constant-one
/// edges after their own sink.
pub fn abp_sum(parts: &[Abp]) -> Result<Abp> {
    let first = parts
        .first()
        .ok_or_else(|| Error::InvalidArgument("sum of no programs".into()))?;
    for p in parts {
        if p.n_vars != first.n_vars {
            return Err(Error::ArityMismatch {
                expected: first.n_vars,
                found: p.n_vars,
            });
        }
        if p.field != first.field {
            return Err(Error::FieldMismatch);
        }
    }
    if parts.len() == 1 {
        return Ok(first.clone());
    }
    let field = first.field.clone();
    let depth = parts.iter().map(Abp::depth).max().unwrap().max(1);

    // Interior layer sizes and per-part offsets.
    let mut layers = vec![0usize; depth + 1];
    layers[0] = 1;
    layers[depth] = 1;
    let mut offsets: Vec<Vec<usize>> = Vec::with_capacity(parts.len());
    for p in parts {
        let mut off = vec![0usize; depth + 1];
        for (l, slot) in off.iter_mut().enumerate().take(depth).skip(1) {
            *slot = layers[l];
            // Own interior nodes, the own sink when it is not the shared
            // sink, or one padding node past the own sink.
            layers[l] += if l < p.depth() { p.layers[l] } else { 1 };
        }
        offsets.push(off);
    }
    let mut out = Abp::new(first.n_vars, field.clone(), layers)?;
    let one = LinearForm::constant(field.one());
    for (p, off) in parts.iter().zip(&offsets) {
        let pd = p.depth();
        let place = |l: usize, i: usize| if l == 0 || l == depth { 0 } else { off[l] + i };
        for (k, label) in &p.edges {
            out.add_edge(k.layer, place(k.layer, k.from), place(k.layer + 1, k.to), label.clone())?;
        }
        // Padding chain from the part's sink (layer pd) to the shared sink.
        for l in pd..depth {
            out.add_edge(l, place(l, 0), place(l + 1, 0), one.clone())?;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(v: i64) -> Scalar {
        Scalar::integer(v)
    }

    fn x(i: u32) -> LinearForm {
        LinearForm::var(i, q(1))
    }

    fn path(n_vars: usize, vars: &[u32]) -> Abp {
        let mut abp = Abp::new(n_vars, Field::Rationals, vec![1; vars.len() + 1]).unwrap();
        for (l, &v) in vars.iter().enumerate() {
            abp.add_edge(l, 0, 0, x(v)).unwrap();
        }
        abp
    }

    fn word(v: &[u32]) -> Word {
        Word(v.to_vec())
    }

    #[test]
    fn validation_catches_bad_shapes() {
        assert!(path(1, &[0]).validate().is_ok());
        let skip = Abp::from_edges(
            1,
            Field::Rationals,
            vec![1, 1, 1],
            [(NodeId::new(0, 0), NodeId::new(2, 0), x(0))],
        );
        assert!(matches!(skip, Err(Error::Validation(_))));
        assert!(Abp::new(1, Field::Rationals, vec![2, 1]).is_err());
        assert!(Abp::new(1, Field::Rationals, vec![1, 0, 1]).is_err());
        let mut abp = Abp::new(1, Field::Rationals, vec![1, 1]).unwrap();
        assert!(abp.add_edge(0, 0, 0, x(3)).is_err());
        assert!(abp
            .add_edge(0, 0, 0, LinearForm::var(0, Field::prime(5).unwrap().one()))
            .is_err());
    }

    #[test]
    fn evaluation_examples() {
        let p = path(2, &[0, 1]);
        assert_eq!(p.evaluate(&[q(2), q(3)]).unwrap(), q(6));
        let mut cancel = Abp::new(1, Field::Rationals, vec![1, 2, 1]).unwrap();
        cancel.add_edge(0, 0, 0, x(0)).unwrap();
        cancel.add_edge(1, 0, 0, LinearForm::constant(q(1))).unwrap();
        cancel.add_edge(0, 0, 1, LinearForm::var(0, q(-1))).unwrap();
        cancel.add_edge(1, 1, 0, LinearForm::constant(q(1))).unwrap();
        assert_eq!(cancel.evaluate(&[q(7)]).unwrap(), q(0));
        assert!(cancel.expand(&Caps::default()).unwrap().is_zero());
        assert!(p.evaluate(&[q(1)]).is_err());
    }

    #[test]
    fn expansion_examples() {
        let caps = Caps::default();
        let p = path(2, &[0, 1]);
        assert_eq!(p.expand(&caps).unwrap(), NcPoly::monomial(2, word(&[0, 1]), q(1)));
        let mut d = Abp::new(2, Field::Rationals, vec![1, 1, 1]).unwrap();
        d.add_edge(0, 0, 0, LinearForm::new(q(0), [(0, q(2)), (1, q(3))]))
            .unwrap();
        d.add_edge(1, 0, 0, x(0)).unwrap();
        let expected = NcPoly::from_terms(2, Field::Rationals, [(word(&[0, 0]), q(2)), (word(&[1, 0]), q(3))]).unwrap();
        assert_eq!(d.expand(&caps).unwrap(), expected);
        assert!(Abp::zero(2, Field::Rationals, 3).expand(&caps).unwrap().is_zero());
    }

    #[test]
    fn expansion_respects_caps() {
        let p = path(2, &[0, 1, 0]);
        let caps = Caps {
            max_terms: 10,
            max_degree: 2,
        };
        assert!(p.expand(&caps).unwrap_err().is_cap());
    }

    #[test]
    fn sums() {
        let caps = Caps::default();
        let p = path(2, &[0, 1]);
        let z = Abp::zero(2, Field::Rationals, 1);
        assert_eq!(
            abp_sum(&[p.clone(), z]).unwrap().expand(&caps).unwrap(),
            p.expand(&caps).unwrap()
        );
        let s = abp_sum(&[path(2, &[0]), path(2, &[1])]).unwrap();
        assert_eq!(
            s.expand(&caps).unwrap(),
            NcPoly::var(2, Field::Rationals, 0)
                .add(&NcPoly::var(2, Field::Rationals, 1))
                .unwrap()
        );
        assert!(abp_sum(&[p.clone(), p.negate()])
            .unwrap()
            .expand(&caps)
            .unwrap()
            .is_zero());
        let mixed = abp_sum(&[path(2, &[0, 1, 1]), path(2, &[1]), Abp::zero(2, Field::Rationals, 0)]).unwrap();
        let expected = NcPoly::from_terms(
            2,
            Field::Rationals,
            [(word(&[0, 1, 1]), q(1)), (word(&[1]), q(1)), (word(&[]), q(1))],
        )
        .unwrap();
        assert_eq!(mixed.expand(&caps).unwrap(), expected);
        assert!(abp_sum(&[p, path(3, &[0])]).is_err());
    }

    #[test]
    fn pruning_keeps_polynomial() {
        let caps = Caps::default();
        let mut abp = Abp::new(2, Field::Rationals, vec![1, 3, 1]).unwrap();
        abp.add_edge(0, 0, 0, x(0)).unwrap();
        abp.add_edge(1, 0, 0, x(1)).unwrap();
        abp.add_edge(0, 0, 1, x(1)).unwrap(); // dead end
        abp.add_edge(1, 2, 0, x(0)).unwrap(); // unreachable
        let pruned = abp.prune();
        assert_eq!(pruned.layers(), &[1, 1, 1]);
        assert_eq!(pruned.expand(&caps).unwrap(), abp.expand(&caps).unwrap());
        let mut dead = Abp::new(1, Field::Rationals, vec![1, 1, 1]).unwrap();
        dead.add_edge(0, 0, 0, x(0)).unwrap();
        assert_eq!(dead.prune(), Abp::zero(1, Field::Rationals, 2));
    }

    #[test]
    fn sub_programs() {
        let caps = Caps::default();
        let p = path(2, &[0, 1, 0]);
        let mid = p.between(NodeId::new(1, 0), NodeId::new(3, 0)).unwrap();
        assert_eq!(mid.expand(&caps).unwrap(), NcPoly::monomial(2, word(&[1, 0]), q(1)));
        let point = p.between(NodeId::new(1, 0), NodeId::new(1, 0)).unwrap();
        assert_eq!(point.expand(&caps).unwrap(), NcPoly::constant(2, q(1)));
        assert!(p.between(NodeId::new(2, 0), NodeId::new(1, 0)).is_err());
    }

    #[test]
    fn layered_evaluation_uses_one_point_per_layer() {
        let p = path(1, &[0, 0]);
        assert_eq!(p.evaluate_layered(&[vec![q(2)], vec![q(5)]]).unwrap(), q(10));
    }
}

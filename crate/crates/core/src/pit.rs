//! Identity tests for branching programs, and the constructions that turn
//! determinants and graph reachability into branching programs.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::One;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::abp::{Abp, CoefficientMatrices, LinearForm};
use crate::circuit::Circuit;
use crate::error::{Caps, Error, Result};
use crate::linalg::{basis_of_matrix_set, Matrix};
use crate::poly::{NcPoly, Word};
use crate::products::hadamard_abp;
use crate::scalar::{Field, Rational, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PitMethod {
    Rational,
    SpanBasis,
    Randomized,
    BruteForce,
}

impl PitMethod {
    pub fn name(self) -> &'static str {
        match self {
            PitMethod::Rational => "rational",
            PitMethod::SpanBasis => "span_basis",
            PitMethod::Randomized => "randomized",
            PitMethod::BruteForce => "bruteforce",
        }
    }

    pub fn from_name(s: &str) -> Option<PitMethod> {
        [
            PitMethod::Rational,
            PitMethod::SpanBasis,
            PitMethod::Randomized,
            PitMethod::BruteForce,
        ]
        .into_iter()
        .find(|m| m.name() == s)
    }
}

/// Evidence that a polynomial is nonzero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    /// A monomial with nonzero coefficient.
    Word(Word),
    /// A point where the polynomial does not vanish.
    Point { point: Vec<Scalar>, value: Scalar },
    /// One point per layer (edges leaving layer `l` read `points[l]`) where
    /// the relabelled program does not vanish.
    LayeredPoint { points: Vec<Vec<Scalar>>, value: Scalar },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PitVerdict {
    pub is_zero: bool,
    pub method: PitMethod,
    pub witness: Option<Witness>,
    pub trials: Option<u32>,
    /// Upper bound on the probability that a nonzero input is reported as
    /// zero, over all trials together.
    pub failure_bound: Option<Rational>,
}

impl PitVerdict {
    fn deterministic(method: PitMethod, witness: Option<Witness>) -> PitVerdict {
        PitVerdict {
            is_zero: witness.is_none(),
            method,
            witness,
            trials: None,
            failure_bound: None,
        }
    }
}

fn require_rationals(field: &Field) -> Result<()> {
    if *field != Field::Rationals {
        return Err(Error::WrongField {
            expected: "Q",
            found: format!("{field}"),
        });
    }
    Ok(())
}

/// The value at the all-ones point of the self-Hadamard product of `p`,
/// which is the sum of the squared coefficients of its polynomial.
pub fn square_sum_at_ones(p: &Abp) -> Result<Scalar> {
    require_rationals(p.field())?;
    let r = hadamard_abp(p, p)?.abp;
    r.evaluate(&vec![Scalar::integer(1); p.n_vars()])
}

/// Zero test over the rationals: `f ∘ f` has nonnegative coefficients, so it
/// vanishes at the all-ones point only when `f` is zero.
pub fn pit_rational(p: &Abp) -> Result<PitVerdict> {
    let value = square_sum_at_ones(p)?;
    let witness = (!value.is_zero()).then(|| Witness::Point {
        point: vec![Scalar::integer(1); p.n_vars()],
        value,
    });
    Ok(PitVerdict::deterministic(PitMethod::Rational, witness))
}

/// A basis of the span of `A_w` over words `w` of length `hi - lo`, where
/// `A_w` is the product of the coefficient matrices of layers `lo..hi`,
/// each element paired with one word producing it.
fn span_basis(cm: &CoefficientMatrices, lo: usize, hi: usize) -> Result<Vec<(Matrix, Word)>> {
    let candidates: Vec<(Matrix, Word)> = if hi - lo == 1 {
        cm.layer(lo)
            .iter()
            .enumerate()
            .map(|(v, m)| (m.clone(), Word(vec![v as u32])))
            .collect()
    } else {
        let mid = (lo + hi) / 2;
        let left = span_basis(cm, lo, mid)?;
        if left.is_empty() {
            return Ok(Vec::new());
        }
        let right = span_basis(cm, mid, hi)?;
        let mut out = Vec::with_capacity(left.len() * right.len());
        for (ml, wl) in &left {
            for (mr, wr) in &right {
                out.push((ml.matmul(mr)?, wl.concat(wr)));
            }
        }
        out
    };
    let mats: Vec<Matrix> = candidates.iter().map(|(m, _)| m.clone()).collect();
    let keep = basis_of_matrix_set(&mats)?;
    let mut candidates: Vec<Option<(Matrix, Word)>> = candidates.into_iter().map(Some).collect();
    Ok(keep.into_iter().map(|i| candidates[i].take().unwrap()).collect())
}

/// Deterministic zero test over any field: per homogeneous component,
/// divide and conquer over layer intervals keeping a basis of the span of
/// coefficient-matrix products. The polynomial is zero exactly when every
/// full-interval span is the zero space.
pub fn pit_span_basis(p: &Abp) -> Result<PitVerdict> {
    for part in p.homogeneous_parts() {
        if part.degree == 0 {
            if part.abp.label(0, 0, 0).is_some() {
                return Ok(PitVerdict::deterministic(
                    PitMethod::SpanBasis,
                    Some(Witness::Word(Word::empty())),
                ));
            }
            continue;
        }
        let cm = part.abp.normalize_edges()?.coefficient_matrices();
        if let Some((_, w)) = span_basis(&cm, 0, part.degree)?.into_iter().next() {
            return Ok(PitVerdict::deterministic(PitMethod::SpanBasis, Some(Witness::Word(w))));
        }
    }
    Ok(PitVerdict::deterministic(PitMethod::SpanBasis, None))
}

/// A program prepared for randomized testing: moved to a field with at
/// least `2d` elements.
#[derive(Clone, Debug)]
pub struct RandomizedSetup {
    pub abp: Abp,
    pub field: Field,
    pub degree: usize,
}

impl RandomizedSetup {
    pub fn new(p: &Abp) -> Result<RandomizedSetup> {
        let degree = p.depth();
        let (field, embedding) = p.field().extension_at_least((2 * degree).max(2) as u128)?;
        Ok(RandomizedSetup {
            abp: p.map_field(field.clone(), |s| embedding.apply(s)),
            field,
            degree,
        })
    }

    /// Probability bound `d / q'` for a single trial.
    pub fn trial_bound(&self) -> Rational {
        let q = self.field.order().expect("finite field");
        Rational::new(BigInt::from(self.degree), BigInt::from(q))
    }

    /// Trial `trial` of the run seeded by `seed`: fresh uniform values for
    /// each variable in each layer, drawn from the stream `(seed, trial)`.
    /// Returns a witness when the program does not vanish there.
    pub fn trial(&self, seed: u64, trial: u32) -> Result<Option<Witness>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(trial as u64);
        let points: Vec<Vec<Scalar>> = (0..self.degree)
            .map(|_| (0..self.abp.n_vars()).map(|_| self.field.random(&mut rng)).collect())
            .collect();
        let value = self.abp.evaluate_layered(&points)?;
        Ok((!value.is_zero()).then_some(Witness::LayeredPoint { points, value }))
    }

    /// Verdict from the first successful trial (if any).
    pub fn verdict(&self, trials: u32, hit: Option<Witness>) -> PitVerdict {
        let per_trial = self.trial_bound();
        let mut bound = Rational::one();
        for _ in 0..trials {
            bound *= &per_trial;
        }
        PitVerdict {
            is_zero: hit.is_none(),
            method: PitMethod::Randomized,
            witness: hit,
            trials: Some(trials),
            failure_bound: Some(bound),
        }
    }
}

/// Randomized zero test over a finite field. Each variable is replaced by a
/// separate commuting variable per layer and the result is evaluated at
/// random points, so a nonzero answer is always correct and a zero answer
/// is wrong with probability at most `(d/q')^trials`.
pub fn pit_randomized(p: &Abp, trials: u32, seed: u64) -> Result<PitVerdict> {
    if trials == 0 {
        return Err(Error::InvalidArgument("at least one trial is needed".into()));
    }
    let setup = RandomizedSetup::new(p)?;
    for t in 0..trials {
        if let Some(w) = setup.trial(seed, t)? {
            return Ok(setup.verdict(trials, Some(w)));
        }
    }
    Ok(setup.verdict(trials, None))
}

fn bruteforce_verdict(f: &NcPoly) -> PitVerdict {
    let witness = f.terms().keys().next().map(|w| Witness::Word(w.clone()));
    PitVerdict::deterministic(PitMethod::BruteForce, witness)
}

/// Expands the program and reports its first monomial.
pub fn pit_bruteforce(p: &Abp, caps: &Caps) -> Result<PitVerdict> {
    Ok(bruteforce_verdict(&p.expand(caps)?))
}

pub fn pit_bruteforce_circuit(c: &Circuit, caps: &Caps) -> Result<PitVerdict> {
    Ok(bruteforce_verdict(&c.expand(caps)?))
}

/// Whether `f1 ∘ f2 = 0` for monotone circuits, decided by intersecting
/// monomial supports.
pub fn hadamard_zero_circuits(c1: &Circuit, c2: &Circuit, caps: &Caps) -> Result<bool> {
    for (i, c) in [c1, c2].into_iter().enumerate() {
        if !c.is_monotone()? {
            return Err(Error::NotMonotone(format!("circuit {} has a negative constant", i + 1)));
        }
    }
    let m1: BTreeSet<Word> = c1.expand(caps)?.mon_set();
    let m2 = c2.expand(caps)?;
    Ok(!m2.terms().keys().any(|w| m1.contains(w)))
}

/// A program over no variables whose constant value is `det(a)`.
///
/// Paths follow clow sequences: a clow is a closed walk whose first vertex
/// (its head) is its smallest, and heads increase along the sequence. A
/// node `(h, u)` in layer `l` means `l` edges have been taken and the
/// current clow has head `h` and is at `u`. Closing a clow contributes a
/// factor `-1`; the sink edge adds `(-1)^n`.
pub fn det_to_abp(a: &Matrix) -> Result<Abp> {
    if !a.is_square() {
        return Err(Error::ShapeMismatch(format!(
            "determinant of a {}x{} matrix",
            a.rows(),
            a.cols()
        )));
    }
    let n = a.rows();
    let field = a.field().clone();
    if n == 0 {
        let mut abp = Abp::new(0, field.clone(), vec![1, 1])?;
        abp.add_edge(0, 0, 0, LinearForm::constant(field.one()))?;
        return Ok(abp);
    }
    let states: Vec<(usize, usize)> = (0..n).flat_map(|h| (h..n).map(move |u| (h, u))).collect();
    let index: BTreeMap<(usize, usize), usize> = states.iter().enumerate().map(|(i, s)| (*s, i)).collect();
    let mut layers = vec![states.len(); n + 1];
    layers[0] = 1;
    layers[n] = 1;
    let mut abp = Abp::new(0, field.clone(), layers)?;
    let minus = -field.one();
    let sign = if n.is_multiple_of(2) {
        field.one()
    } else {
        minus.clone()
    };
    for l in 0..n {
        let last = l + 1 == n;
        let sources: Vec<(usize, (usize, usize))> = if l == 0 {
            (0..n).map(|h| (0, (h, h))).collect()
        } else {
            states.iter().map(|s| (index[s], *s)).collect()
        };
        for (from, (h, u)) in sources {
            let close = &minus * a.get(u, h);
            if last {
                abp.add_edge(l, from, 0, LinearForm::constant(&close * &sign))?;
                continue;
            }
            for v in h + 1..n {
                abp.add_edge(l, from, index[&(h, v)], LinearForm::constant(a.get(u, v).clone()))?;
            }
            for h2 in h + 1..n {
                abp.add_edge(l, from, index[&(h2, h2)], LinearForm::constant(close.clone()))?;
            }
        }
    }
    Ok(abp.prune())
}

/// A directed graph with designated vertices `s` and `t`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Digraph {
    pub vertices: usize,
    pub edges: Vec<(usize, usize)>,
    pub s: usize,
    pub t: usize,
}

impl Digraph {
    pub fn validate(&self) -> Result<()> {
        if self.s >= self.vertices || self.t >= self.vertices {
            return Err(Error::Validation(format!(
                "s = {} and t = {} must be below the vertex count {}",
                self.s, self.t, self.vertices
            )));
        }
        if let Some((u, v)) = self
            .edges
            .iter()
            .find(|(u, v)| *u >= self.vertices || *v >= self.vertices)
        {
            return Err(Error::Validation(format!("edge ({u},{v}) leaves the vertex range")));
        }
        Ok(())
    }
}

/// A program that is nonzero exactly when `t` is reachable from `s`.
///
/// Edge `e` of the graph becomes the variable `x_e`. Layer `l` holds the
/// vertices at distance at most `l` from `s` (the last layer only `t`), and
/// a walk that reaches `t` early waits there along edges labelled by fresh
/// variables `x_{E+l}`. Distinct walks give distinct words, so nothing
/// cancels.
pub fn reach_to_abp(g: &Digraph) -> Result<Abp> {
    g.validate()?;
    let mut dist = vec![usize::MAX; g.vertices];
    let mut adj = vec![Vec::new(); g.vertices];
    for (e, &(u, v)) in g.edges.iter().enumerate() {
        adj[u].push((v, e));
    }
    dist[g.s] = 0;
    let mut queue = VecDeque::from([g.s]);
    while let Some(u) = queue.pop_front() {
        for &(v, _) in &adj[u] {
            if dist[v] == usize::MAX {
                dist[v] = dist[u] + 1;
                queue.push_back(v);
            }
        }
    }
    let depth = dist
        .iter()
        .copied()
        .filter(|&d| d != usize::MAX)
        .max()
        .unwrap_or(0)
        .max(1);
    let members: Vec<Vec<usize>> = (0..=depth)
        .map(|l| {
            if l == 0 {
                vec![g.s]
            } else if l == depth {
                vec![g.t]
            } else {
                (0..g.vertices).filter(|&v| dist[v] <= l).collect()
            }
        })
        .collect();
    let index: Vec<BTreeMap<usize, usize>> = members
        .iter()
        .map(|m| m.iter().enumerate().map(|(i, v)| (*v, i)).collect())
        .collect();
    let n_edges = g.edges.len();
    let mut abp = Abp::new(
        n_edges + depth,
        Field::Rationals,
        members.iter().map(Vec::len).collect(),
    )?;
    let one = Scalar::integer(1);
    for l in 0..depth {
        for (&u, &a) in &index[l] {
            for &(v, e) in &adj[u] {
                if let Some(&b) = index[l + 1].get(&v) {
                    abp.add_edge(l, a, b, LinearForm::var(e as u32, one.clone()))?;
                }
            }
            if u == g.t {
                if let Some(&b) = index[l + 1].get(&g.t) {
                    abp.add_edge(l, a, b, LinearForm::var((n_edges + l) as u32, one.clone()))?;
                }
            }
        }
    }
    Ok(abp)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(v: i64) -> Scalar {
        Scalar::integer(v)
    }

    fn cancel() -> Abp {
        let mut abp = Abp::new(1, Field::Rationals, vec![1, 2, 1]).unwrap();
        abp.add_edge(0, 0, 0, LinearForm::var(0, q(1))).unwrap();
        abp.add_edge(1, 0, 0, LinearForm::constant(q(1))).unwrap();
        abp.add_edge(0, 0, 1, LinearForm::var(0, q(-1))).unwrap();
        abp.add_edge(1, 1, 0, LinearForm::constant(q(1))).unwrap();
        abp
    }

    fn path(field: &Field, vars: &[u32], c: i64) -> Abp {
        let mut abp = Abp::new(2, field.clone(), vec![1; vars.len() + 1]).unwrap();
        for (l, &v) in vars.iter().enumerate() {
            let coeff = if l == 0 { field.from_i64(c) } else { field.one() };
            abp.add_edge(l, 0, 0, LinearForm::var(v, coeff)).unwrap();
        }
        abp
    }

    #[test]
    fn rational_examples() {
        let v = pit_rational(&cancel()).unwrap();
        assert!(v.is_zero);
        assert_eq!(square_sum_at_ones(&cancel()).unwrap(), q(0));
        let p = path(&Field::Rationals, &[0, 1], 1);
        assert!(!pit_rational(&p).unwrap().is_zero);
        assert_eq!(square_sum_at_ones(&p).unwrap(), q(1));
        assert!(pit_rational(&path(&Field::prime(5).unwrap(), &[0], 1)).is_err());
    }

    #[test]
    fn span_basis_examples() {
        assert!(pit_span_basis(&Abp::zero(2, Field::Rationals, 3)).unwrap().is_zero);
        let f2 = Field::prime(2).unwrap();
        let mut sym = Abp::new(2, f2.clone(), vec![1, 2, 1]).unwrap();
        sym.add_edge(0, 0, 0, LinearForm::var(0, f2.one())).unwrap();
        sym.add_edge(1, 0, 0, LinearForm::var(1, f2.one())).unwrap();
        sym.add_edge(0, 0, 1, LinearForm::var(1, f2.one())).unwrap();
        sym.add_edge(1, 1, 0, LinearForm::var(0, f2.one())).unwrap();
        let v = pit_span_basis(&sym).unwrap();
        assert!(!v.is_zero);
        let Some(Witness::Word(w)) = v.witness else {
            panic!("word witness expected")
        };
        assert!(!sym.coefficient_of(&w).unwrap().is_zero());

        // 2 x0 x1 as two parallel copies of x0 x1.
        let doubled = |field: &Field| {
            let mut abp = Abp::new(2, field.clone(), vec![1, 2, 1]).unwrap();
            for a in 0..2 {
                abp.add_edge(0, 0, a, LinearForm::var(0, field.one())).unwrap();
                abp.add_edge(1, a, 0, LinearForm::var(1, field.one())).unwrap();
            }
            abp
        };
        assert!(pit_span_basis(&doubled(&f2)).unwrap().is_zero);
        assert!(!pit_span_basis(&doubled(&Field::Rationals)).unwrap().is_zero);
    }

    #[test]
    fn randomized_examples() {
        let f101 = Field::prime(101).unwrap();
        let zero = Abp::zero(2, f101.clone(), 4);
        for seed in 0..5 {
            assert!(pit_randomized(&zero, 3, seed).unwrap().is_zero);
        }
        let p = path(&f101, &[0, 1, 1, 0], 1);
        let v = pit_randomized(&p, 20, 7).unwrap();
        assert!(!v.is_zero);
        let per = Rational::new(BigInt::from(4), BigInt::from(101));
        let mut bound = Rational::one();
        for _ in 0..20 {
            bound *= &per;
        }
        assert_eq!(v.failure_bound, Some(bound));

        let f2 = Field::prime(2).unwrap();
        let setup = RandomizedSetup::new(&path(&f2, &[0, 1, 1, 0], 1)).unwrap();
        assert_eq!(setup.field.order(), Some(8));
        assert!(pit_randomized(&path(&f2, &[0], 1), 0, 0).is_err());
        assert!(pit_randomized(&cancel(), 1, 0).is_err());
    }

    #[test]
    fn randomized_is_reproducible() {
        let f5 = Field::prime(5).unwrap();
        let p = path(&f5, &[0, 1, 0], 2);
        assert_eq!(pit_randomized(&p, 4, 99).unwrap(), pit_randomized(&p, 4, 99).unwrap());
    }

    #[test]
    fn bruteforce_examples() {
        let caps = Caps::default();
        assert!(pit_bruteforce(&cancel(), &caps).unwrap().is_zero);
        let v = pit_bruteforce(&path(&Field::Rationals, &[0, 1], 1), &caps).unwrap();
        assert_eq!(v.witness, Some(Witness::Word(Word(vec![0, 1]))));
    }

    #[test]
    fn determinant_programs() {
        let caps = Caps::default();
        let id = Matrix::identity(2, Field::Rationals);
        assert_eq!(
            det_to_abp(&id).unwrap().expand(&caps).unwrap(),
            NcPoly::constant(0, q(1))
        );
        let ones = Matrix::from_integers(2, 2, &[1, 1, 1, 1]).unwrap();
        assert!(det_to_abp(&ones).unwrap().expand(&caps).unwrap().is_zero());
        let m = Matrix::from_integers(3, 3, &[2, 0, 1, 1, 3, 2, 1, 1, 2]).unwrap();
        assert_eq!(det_to_abp(&m).unwrap().evaluate(&[]).unwrap(), q(6));
        let one = Matrix::from_integers(1, 1, &[-4]).unwrap();
        assert_eq!(det_to_abp(&one).unwrap().evaluate(&[]).unwrap(), q(-4));
        assert!(det_to_abp(&Matrix::zeros(2, 3, Field::Rationals)).is_err());
    }

    #[test]
    fn reachability_programs() {
        let caps = Caps::default();
        let g = Digraph {
            vertices: 2,
            edges: vec![(0, 1)],
            s: 0,
            t: 1,
        };
        let p = reach_to_abp(&g).unwrap();
        assert_eq!(p.expand(&caps).unwrap(), NcPoly::var(p.n_vars(), Field::Rationals, 0));
        let apart = Digraph {
            vertices: 3,
            edges: vec![(0, 1)],
            s: 0,
            t: 2,
        };
        assert!(reach_to_abp(&apart).unwrap().expand(&caps).unwrap().is_zero());
        let bad = Digraph { t: 5, ..apart };
        assert!(reach_to_abp(&bad).is_err());
    }

    #[test]
    fn monotone_support_test() {
        let caps = Caps::default();
        let build = |a: u32, b: u32| {
            let mut bld = crate::circuit::CircuitBuilder::new(2, Field::Rationals);
            let x = bld.input(a).unwrap();
            let y = bld.input(b).unwrap();
            let m = bld.mul(x, y).unwrap();
            bld.finish(m).unwrap()
        };
        assert!(hadamard_zero_circuits(&build(0, 1), &build(1, 0), &caps).unwrap());
        assert!(!hadamard_zero_circuits(&build(0, 1), &build(0, 1), &caps).unwrap());
    }
}

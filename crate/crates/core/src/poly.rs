//! Sparse noncommutative polynomials ([`NcPoly`]) and sparse commutative
//! polynomials ([`CPoly`]), with Hadamard (coefficient-wise) products.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;
use core::cmp::Ordering;

use num_traits::Signed;

use crate::error::{Caps, Error, Result};
use crate::scalar::{Field, Rational, Scalar};

/// A noncommutative monomial: a word over variable indices.
///
/// Words are ordered by length first, then lexicographically, so iterating a
/// polynomial visits low degrees first.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Word(pub Vec<u32>);

impl Word {
    pub fn empty() -> Word {
        Word(Vec::new())
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = Vec::with_capacity(self.0.len() + other.0.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn letters(&self) -> &[u32] {
        &self.0
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl From<Vec<u32>> for Word {
    fn from(v: Vec<u32>) -> Self {
        Word(v)
    }
}

/// All words of length `len` over `n` letters in lexicographic order.
pub fn words_of_length(n: usize, len: usize) -> impl Iterator<Item = Word> {
    let total = (n as u128).checked_pow(len as u32).unwrap_or(u128::MAX);
    let total = if n == 0 && len > 0 { 0 } else { total };
    (0..total).map(move |mut idx| {
        let mut w = alloc::vec![0u32; len];
        for slot in w.iter_mut().rev() {
            *slot = (idx % n as u128) as u32;
            idx /= n as u128;
        }
        Word(w)
    })
}

fn insert_term<K: Ord>(terms: &mut BTreeMap<K, Scalar>, key: K, c: Scalar) {
    if c.is_zero() {
        return;
    }
    match terms.entry(key) {
        alloc::collections::btree_map::Entry::Vacant(v) => {
            v.insert(c);
        }
        alloc::collections::btree_map::Entry::Occupied(mut o) => {
            let sum = o.get() + &c;
            if sum.is_zero() {
                o.remove();
            } else {
                *o.get_mut() = sum;
            }
        }
    }
}

/// A polynomial in `F<x_0, ..., x_{n-1}>`, stored as its nonzero coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NcPoly {
    n_vars: usize,
    field: Field,
    terms: BTreeMap<Word, Scalar>,
}

impl NcPoly {
    pub fn zero(n_vars: usize, field: Field) -> NcPoly {
        NcPoly {
            n_vars,
            field,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(n_vars: usize, c: Scalar) -> NcPoly {
        let mut p = NcPoly::zero(n_vars, c.field());
        insert_term(&mut p.terms, Word::empty(), c);
        p
    }

    pub fn var(n_vars: usize, field: Field, i: u32) -> NcPoly {
        let one = field.one();
        NcPoly::monomial(n_vars, Word(alloc::vec![i]), one)
    }

    pub fn monomial(n_vars: usize, word: Word, c: Scalar) -> NcPoly {
        let mut p = NcPoly::zero(n_vars, c.field());
        insert_term(&mut p.terms, word, c);
        p
    }

    /// Builds a polynomial from `(word, coefficient)` pairs, summing repeats.
    pub fn from_terms<I>(n_vars: usize, field: Field, terms: I) -> Result<NcPoly>
    where
        I: IntoIterator<Item = (Word, Scalar)>,
    {
        let mut p = NcPoly::zero(n_vars, field);
        for (w, c) in terms {
            if let Some(&bad) = w.0.iter().find(|&&v| v as usize >= n_vars) {
                return Err(Error::Validation(alloc::format!(
                    "variable {bad} out of range for {n_vars} variables"
                )));
            }
            if !p.field.contains(&c) {
                return Err(Error::FieldMismatch);
            }
            insert_term(&mut p.terms, w, c);
        }
        Ok(p)
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn terms(&self) -> &BTreeMap<Word, Scalar> {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, w: &Word) -> Scalar {
        self.terms.get(w).cloned().unwrap_or_else(|| self.field.zero())
    }

    /// `mon(f)`: the set of words with nonzero coefficient.
    pub fn mon_set(&self) -> BTreeSet<Word> {
        self.terms.keys().cloned().collect()
    }

    /// Largest degree of a nonzero term; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.terms.keys().map(Word::degree).max()
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(Word::degree);
        match degs.next() {
            None => true,
            Some(d) => degs.all(|e| e == d),
        }
    }

    fn check_compatible(&self, other: &NcPoly) -> Result<()> {
        if self.n_vars != other.n_vars {
            return Err(Error::ArityMismatch {
                expected: self.n_vars,
                found: other.n_vars,
            });
        }
        if self.field != other.field {
            return Err(Error::FieldMismatch);
        }
        Ok(())
    }

    pub fn add(&self, other: &NcPoly) -> Result<NcPoly> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (w, c) in &other.terms {
            insert_term(&mut out.terms, w.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &NcPoly) -> Result<NcPoly> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> NcPoly {
        NcPoly {
            n_vars: self.n_vars,
            field: self.field.clone(),
            terms: self.terms.iter().map(|(w, c)| (w.clone(), -c)).collect(),
        }
    }

    pub fn scale(&self, c: &Scalar) -> Result<NcPoly> {
        if !self.field.contains(c) {
            return Err(Error::FieldMismatch);
        }
        let mut out = NcPoly::zero(self.n_vars, self.field.clone());
        for (w, a) in &self.terms {
            insert_term(&mut out.terms, w.clone(), a * c);
        }
        Ok(out)
    }

    /// Noncommutative product: words of `self` followed by words of `other`.
    pub fn mul(&self, other: &NcPoly) -> Result<NcPoly> {
        self.mul_capped(other, &Caps::default())
    }

    pub fn mul_capped(&self, other: &NcPoly, caps: &Caps) -> Result<NcPoly> {
        self.check_compatible(other)?;
        let mut out = NcPoly::zero(self.n_vars, self.field.clone());
        for (w1, a) in &self.terms {
            for (w2, b) in &other.terms {
                insert_term(&mut out.terms, w1.concat(w2), a * b);
                caps.check_terms(out.terms.len())?;
            }
        }
        Ok(out)
    }

    /// Coefficient-wise product: the coefficient of `m` is `f(m) g(m)`.
    pub fn hadamard(&self, other: &NcPoly) -> Result<NcPoly> {
        self.check_compatible(other)?;
        let mut out = NcPoly::zero(self.n_vars, self.field.clone());
        let (small, large) = if self.len() <= other.len() {
            (self, other)
        } else {
            (other, self)
        };
        for (w, a) in &small.terms {
            if let Some(b) = large.terms.get(w) {
                insert_term(&mut out.terms, w.clone(), a * b);
            }
        }
        Ok(out)
    }

    pub fn homogeneous_part(&self, k: usize) -> NcPoly {
        NcPoly {
            n_vars: self.n_vars,
            field: self.field.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(w, _)| w.degree() == k)
                .map(|(w, c)| (w.clone(), c.clone()))
                .collect(),
        }
    }

    /// Substitutes `point[i]` for `x_i`; a word becomes the ordered product of
    /// its letters' values.
    pub fn eval(&self, point: &[Scalar]) -> Result<Scalar> {
        if point.len() != self.n_vars {
            return Err(Error::ArityMismatch {
                expected: self.n_vars,
                found: point.len(),
            });
        }
        if point.iter().any(|v| !self.field.contains(v)) {
            return Err(Error::FieldMismatch);
        }
        let mut acc = self.field.zero();
        for (w, c) in &self.terms {
            let mut t = c.clone();
            for &v in &w.0 {
                t = &t * &point[v as usize];
            }
            acc = &acc + &t;
        }
        Ok(acc)
    }
}

/// A commutative monomial as sorted `(variable, exponent)` pairs with
/// positive exponents.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct CMonomial(Vec<(u32, u32)>);

impl CMonomial {
    pub fn one() -> CMonomial {
        CMonomial(Vec::new())
    }

    /// Multilinear monomial with the given support.
    pub fn from_support<I: IntoIterator<Item = u32>>(vars: I) -> CMonomial {
        let set: BTreeSet<u32> = vars.into_iter().collect();
        CMonomial(set.into_iter().map(|v| (v, 1)).collect())
    }

    pub fn from_exponents<I: IntoIterator<Item = (u32, u32)>>(pairs: I) -> CMonomial {
        let mut map: BTreeMap<u32, u32> = BTreeMap::new();
        for (v, e) in pairs {
            *map.entry(v).or_default() += e;
        }
        CMonomial(map.into_iter().filter(|&(_, e)| e > 0).collect())
    }

    pub fn exponents(&self) -> &[(u32, u32)] {
        &self.0
    }

    pub fn support(&self) -> impl Iterator<Item = u32> + '_ {
        self.0.iter().map(|&(v, _)| v)
    }

    pub fn degree(&self) -> usize {
        self.0.iter().map(|&(_, e)| e as usize).sum()
    }

    pub fn is_multilinear(&self) -> bool {
        self.0.iter().all(|&(_, e)| e == 1)
    }

    pub fn mul(&self, other: &CMonomial) -> CMonomial {
        CMonomial::from_exponents(self.0.iter().chain(other.0.iter()).copied())
    }

    pub fn contains(&self, v: u32) -> bool {
        self.0.binary_search_by_key(&v, |&(x, _)| x).is_ok()
    }
}

/// A commutative polynomial in `F[x_0, ..., x_{n-1}]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CPoly {
    n_vars: usize,
    field: Field,
    terms: BTreeMap<CMonomial, Scalar>,
}

impl CPoly {
    pub fn zero(n_vars: usize, field: Field) -> CPoly {
        CPoly {
            n_vars,
            field,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(n_vars: usize, c: Scalar) -> CPoly {
        let mut p = CPoly::zero(n_vars, c.field());
        insert_term(&mut p.terms, CMonomial::one(), c);
        p
    }

    pub fn var(n_vars: usize, field: Field, i: u32) -> CPoly {
        let one = field.one();
        let mut p = CPoly::zero(n_vars, field);
        insert_term(&mut p.terms, CMonomial::from_support([i]), one);
        p
    }

    pub fn from_terms<I>(n_vars: usize, field: Field, terms: I) -> Result<CPoly>
    where
        I: IntoIterator<Item = (CMonomial, Scalar)>,
    {
        let mut p = CPoly::zero(n_vars, field);
        for (m, c) in terms {
            if let Some(bad) = m.support().find(|&v| v as usize >= n_vars) {
                return Err(Error::Validation(alloc::format!(
                    "variable {bad} out of range for {n_vars} variables"
                )));
            }
            if !p.field.contains(&c) {
                return Err(Error::FieldMismatch);
            }
            insert_term(&mut p.terms, m, c);
        }
        Ok(p)
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn terms(&self) -> &BTreeMap<CMonomial, Scalar> {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &CMonomial) -> Scalar {
        self.terms.get(m).cloned().unwrap_or_else(|| self.field.zero())
    }

    pub fn mon_set(&self) -> BTreeSet<CMonomial> {
        self.terms.keys().cloned().collect()
    }

    pub fn is_multilinear(&self) -> bool {
        self.terms.keys().all(CMonomial::is_multilinear)
    }

    fn check_compatible(&self, other: &CPoly) -> Result<()> {
        if self.n_vars != other.n_vars {
            return Err(Error::ArityMismatch {
                expected: self.n_vars,
                found: other.n_vars,
            });
        }
        if self.field != other.field {
            return Err(Error::FieldMismatch);
        }
        Ok(())
    }

    pub fn add(&self, other: &CPoly) -> Result<CPoly> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            insert_term(&mut out.terms, m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Scalar) -> Result<CPoly> {
        if !self.field.contains(c) {
            return Err(Error::FieldMismatch);
        }
        let mut out = CPoly::zero(self.n_vars, self.field.clone());
        for (m, a) in &self.terms {
            insert_term(&mut out.terms, m.clone(), a * c);
        }
        Ok(out)
    }

    pub fn mul(&self, other: &CPoly) -> Result<CPoly> {
        self.mul_capped(other, &Caps::default())
    }

    pub fn mul_capped(&self, other: &CPoly, caps: &Caps) -> Result<CPoly> {
        self.check_compatible(other)?;
        let mut out = CPoly::zero(self.n_vars, self.field.clone());
        for (m1, a) in &self.terms {
            for (m2, b) in &other.terms {
                insert_term(&mut out.terms, m1.mul(m2), a * b);
                caps.check_terms(out.terms.len())?;
            }
        }
        Ok(out)
    }

    pub fn hadamard(&self, other: &CPoly) -> Result<CPoly> {
        self.check_compatible(other)?;
        let mut out = CPoly::zero(self.n_vars, self.field.clone());
        for (m, a) in &self.terms {
            if let Some(b) = other.terms.get(m) {
                insert_term(&mut out.terms, m.clone(), a * b);
            }
        }
        Ok(out)
    }

    pub fn eval(&self, point: &[Scalar]) -> Result<Scalar> {
        if point.len() != self.n_vars {
            return Err(Error::ArityMismatch {
                expected: self.n_vars,
                found: point.len(),
            });
        }
        let mut acc = self.field.zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for &(v, e) in &m.0 {
                t = &t * &point[v as usize].pow(e as u64);
            }
            acc = &acc + &t;
        }
        Ok(acc)
    }

    fn rational_coeffs(&self) -> Result<()> {
        if self.field != Field::Rationals {
            return Err(Error::WrongField {
                expected: "Q",
                found: alloc::string::ToString::to_string(&self.field),
            });
        }
        Ok(())
    }

    /// `|sum_m f(m) g(m)|` over rational coefficients (conjugation is the
    /// identity on real scalars).
    pub fn corr(&self, other: &CPoly) -> Result<Rational> {
        self.check_compatible(other)?;
        self.rational_coeffs()?;
        let mut acc = Rational::default();
        for (m, a) in &self.terms {
            if let Some(b) = other.terms.get(m) {
                acc += a.as_rational().unwrap() * b.as_rational().unwrap();
            }
        }
        Ok(acc.abs())
    }

    /// `sum_m f(m)^2`.
    pub fn norm_sq(&self) -> Result<Rational> {
        self.rational_coeffs()?;
        Ok(self
            .terms
            .values()
            .map(|c| {
                let r = c.as_rational().unwrap();
                r * r
            })
            .sum())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn q(v: i64) -> Scalar {
        Scalar::integer(v)
    }

    fn nc(terms: &[(&[u32], i64)]) -> NcPoly {
        NcPoly::from_terms(
            2,
            Field::Rationals,
            terms.iter().map(|(w, c)| (Word(w.to_vec()), q(*c))),
        )
        .unwrap()
    }

    #[test]
    fn hadamard_keeps_common_words() {
        let f = nc(&[(&[0, 1], 1), (&[1, 0], 2)]);
        let g = nc(&[(&[0, 1], 3)]);
        assert_eq!(f.hadamard(&g).unwrap(), nc(&[(&[0, 1], 3)]));
        assert!(f.hadamard(&NcPoly::zero(2, Field::Rationals)).unwrap().is_zero());
    }

    #[test]
    fn noncommutative_product() {
        let x1 = NcPoly::var(2, Field::Rationals, 0);
        let x2 = NcPoly::var(2, Field::Rationals, 1);
        assert_ne!(x1.mul(&x2).unwrap(), x2.mul(&x1).unwrap());
        let s = x1.add(&x2).unwrap();
        let sq = s.mul(&s).unwrap();
        assert_eq!(sq, nc(&[(&[0, 0], 1), (&[0, 1], 1), (&[1, 0], 1), (&[1, 1], 1)]));
    }

    #[test]
    fn homogeneous_parts() {
        let f = nc(&[(&[], 1), (&[0], 1), (&[0, 1], 1)]);
        assert_eq!(f.homogeneous_part(1), nc(&[(&[0], 1)]));
        assert_eq!(f.homogeneous_part(2), nc(&[(&[0, 1], 1)]));
        assert!(NcPoly::zero(2, Field::Rationals).homogeneous_part(3).is_zero());
        let sum = (0..=2).fold(NcPoly::zero(2, Field::Rationals), |acc, k| {
            acc.add(&f.homogeneous_part(k)).unwrap()
        });
        assert_eq!(sum, f);
    }

    #[test]
    fn evaluation() {
        let f = nc(&[(&[0, 1], 1), (&[1, 0], 1)]);
        assert_eq!(f.eval(&[q(1), q(1)]).unwrap(), q(2));
        let g = nc(&[(&[], 7), (&[0, 1], 1)]);
        assert_eq!(g.eval(&[q(0), q(0)]).unwrap(), q(7));
        assert!(g.eval(&[q(0)]).is_err());
    }

    #[test]
    fn mon_set_of_sum() {
        let f = nc(&[(&[0], 1), (&[1], 1)]);
        assert_eq!(f.mon_set().len(), 2);
        assert!(NcPoly::zero(2, Field::Rationals).mon_set().is_empty());
    }

    #[test]
    fn cancellation_removes_terms() {
        let f = nc(&[(&[0], 1)]);
        assert!(f.sub(&f).unwrap().is_zero());
    }

    #[test]
    fn arity_mismatch() {
        let f = NcPoly::zero(2, Field::Rationals);
        let g = NcPoly::zero(3, Field::Rationals);
        assert!(matches!(f.hadamard(&g), Err(Error::ArityMismatch { .. })));
        assert!(NcPoly::from_terms(2, Field::Rationals, [(Word(vec![2]), q(1))]).is_err());
    }

    #[test]
    fn word_order_is_graded() {
        assert!(Word(vec![1]) < Word(vec![0, 0]));
        assert!(Word(vec![0, 1]) < Word(vec![1, 0]));
    }

    #[test]
    fn permanent_of_two_by_two() {
        // x11 = 0, x12 = 1, x21 = 2, x22 = 3
        let n = 4;
        let v = |i| CPoly::var(n, Field::Rationals, i);
        let f = v(0).add(&v(1)).unwrap().mul(&v(2).add(&v(3)).unwrap()).unwrap();
        let g = v(0).add(&v(2)).unwrap().mul(&v(1).add(&v(3)).unwrap()).unwrap();
        let perm = CPoly::from_terms(
            n,
            Field::Rationals,
            [
                (CMonomial::from_support([0, 3]), q(1)),
                (CMonomial::from_support([1, 2]), q(1)),
            ],
        )
        .unwrap();
        assert_eq!(f.hadamard(&g).unwrap(), perm);
    }

    #[test]
    fn correlation_examples() {
        let x1 = CPoly::var(2, Field::Rationals, 0);
        let x2 = CPoly::var(2, Field::Rationals, 1);
        let plus = x1.add(&x2).unwrap();
        let minus = x1.add(&x2.scale(&q(-1)).unwrap()).unwrap();
        assert_eq!(plus.corr(&minus).unwrap(), Rational::from_integer(0.into()));
        assert_eq!(
            plus.corr(&CPoly::zero(2, Field::Rationals)).unwrap(),
            Rational::from_integer(0.into())
        );
        assert_eq!(plus.norm_sq().unwrap(), Rational::from_integer(2.into()));
        let f5 = CPoly::var(2, Field::prime(5).unwrap(), 0);
        assert!(f5.norm_sq().is_err());
    }
}

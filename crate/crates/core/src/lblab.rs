//! Small-parameter experiments with the explicit multilinear polynomial
//! built from an additive character of `F_{2^p}`.
//!
//! With `n = t p` variables split into `t` blocks of `p`, a multilinear
//! monomial `m` gives one field element per block, `y_i(m)`, whose bits are
//! the block's characteristic vector. The coefficient of `m` in `F` is
//! `ψ(y_1(m) ⋯ y_t(m))` with `ψ(a) = (-1)^Tr(a)`.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::Rng;

use crate::error::{Caps, Error, Result};
use crate::poly::{CMonomial, CPoly};
use crate::scalar::{decode_bits, encode_bits, is_prime, Field, Rational, Scalar};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExplicitParams {
    t: usize,
    p: usize,
    field: Field,
}

impl ExplicitParams {
    pub fn new(t: usize, p: usize) -> Result<ExplicitParams> {
        if t == 0 {
            return Err(Error::InvalidArgument("t must be at least 1".into()));
        }
        if !is_prime(p as u64) {
            return Err(Error::InvalidArgument(format!("p = {p} is not prime")));
        }
        Ok(ExplicitParams {
            t,
            p,
            field: Field::extension(2, p)?,
        })
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn n(&self) -> usize {
        self.t * self.p
    }

    /// `F_{2^p}`.
    pub fn field(&self) -> &Field {
        &self.field
    }

    /// Variables of block `i` (0-based): `i p, ..., i p + p - 1`.
    pub fn block(&self, i: usize) -> core::ops::Range<u32> {
        (i * self.p) as u32..((i + 1) * self.p) as u32
    }

    fn check_monomial(&self, m: &CMonomial) -> Result<()> {
        if !m.is_multilinear() {
            return Err(Error::InvalidArgument("monomial is not multilinear".into()));
        }
        if let Some(v) = m.support().find(|&v| v as usize >= self.n()) {
            return Err(Error::ArityMismatch {
                expected: self.n(),
                found: v as usize + 1,
            });
        }
        Ok(())
    }

    fn y_from_mask(&self, mask: u64) -> Vec<Scalar> {
        (0..self.t)
            .map(|i| {
                let bits: Vec<bool> = (0..self.p).map(|j| mask >> (i * self.p + j) & 1 == 1).collect();
                encode_bits(&self.field, &bits).expect("p bits")
            })
            .collect()
    }

    fn coeff_from_mask(&self, mask: u64) -> i32 {
        let y = self.y_from_mask(mask);
        let prod = y.iter().skip(1).fold(y[0].clone(), |acc, v| &acc * v);
        prod.psi().expect("characteristic 2")
    }
}

/// `(y_1(m), ..., y_t(m))`.
pub fn y_vector(m: &CMonomial, params: &ExplicitParams) -> Result<Vec<Scalar>> {
    params.check_monomial(m)?;
    Ok(params.y_from_mask(m.support().fold(0u64, |acc, v| acc | 1 << v)))
}

/// The coefficient of `m` in `F`: `ψ(y_1(m) ⋯ y_t(m))`.
pub fn f_coeff(m: &CMonomial, params: &ExplicitParams) -> Result<i32> {
    params.check_monomial(m)?;
    Ok(params.coeff_from_mask(m.support().fold(0u64, |acc, v| acc | 1 << v)))
}

fn check_dense(params: &ExplicitParams, caps: &Caps) -> Result<()> {
    if params.n() >= 63 {
        return Err(Error::CapExceeded {
            what: "term",
            limit: caps.max_terms,
        });
    }
    caps.check_terms(1usize << params.n())
}

fn mask_monomial(mask: u64, n: usize) -> CMonomial {
    CMonomial::from_support((0..n as u32).filter(|&v| mask >> v & 1 == 1))
}

/// `F` with all `2^n` coefficients, over the rationals.
pub fn build_f(params: &ExplicitParams, caps: &Caps) -> Result<CPoly> {
    check_dense(params, caps)?;
    let n = params.n();
    let terms: Vec<_> = (0..1u64 << n)
        .map(|mask| {
            (
                mask_monomial(mask, n),
                Scalar::integer(params.coeff_from_mask(mask) as i64),
            )
        })
        .collect();
    CPoly::from_terms(n, Field::Rationals, terms)
}

/// `F' = (F + 1) / 2` coefficientwise: 1 where `F` has `+1`, 0 elsewhere.
pub fn build_f_prime(params: &ExplicitParams, caps: &Caps) -> Result<CPoly> {
    check_dense(params, caps)?;
    let n = params.n();
    let terms: Vec<_> = (0..1u64 << n)
        .filter(|&mask| params.coeff_from_mask(mask) == 1)
        .map(|mask| (mask_monomial(mask, n), Scalar::integer(1)))
        .collect();
    CPoly::from_terms(n, Field::Rationals, terms)
}

/// Sum of all coefficients.
pub fn sum_coeffs(f: &CPoly) -> Scalar {
    f.terms().values().fold(f.field().zero(), |acc, c| &acc + c)
}

/// A multilinear polynomial `g h` with `g` over the variables in `a` and `h`
/// over the disjoint set `b`, each of size at least `⌈ε n⌉`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProductPoly {
    pub a: BTreeSet<u32>,
    pub b: BTreeSet<u32>,
    pub g: CPoly,
    pub h: CPoly,
    pub epsilon: Rational,
}

impl ProductPoly {
    pub fn new(a: BTreeSet<u32>, b: BTreeSet<u32>, g: CPoly, h: CPoly, epsilon: Rational) -> Result<ProductPoly> {
        let n = g.n_vars();
        if h.n_vars() != n {
            return Err(Error::ArityMismatch {
                expected: n,
                found: h.n_vars(),
            });
        }
        if let Some(v) = a.intersection(&b).next() {
            return Err(Error::InvalidArgument(format!("x{v} is in both variable sets")));
        }
        if let Some(v) = a.iter().chain(&b).find(|&&v| v as usize >= n) {
            return Err(Error::InvalidArgument(format!("x{v} is beyond the {n} variables")));
        }
        let need = (epsilon.clone() * Rational::from_integer(BigInt::from(n)))
            .ceil()
            .to_integer();
        for (name, set) in [("A", &a), ("B", &b)] {
            if BigInt::from(set.len()) < need {
                return Err(Error::InvalidArgument(format!(
                    "|{name}| = {} is below ⌈εn⌉ = {need}",
                    set.len()
                )));
            }
        }
        for (name, poly, set) in [("g", &g, &a), ("h", &h, &b)] {
            if let Some(v) = poly.terms().keys().flat_map(|m| m.support()).find(|v| !set.contains(v)) {
                return Err(Error::InvalidArgument(format!(
                    "{name} uses x{v} outside its variable set"
                )));
            }
        }
        Ok(ProductPoly { a, b, g, h, epsilon })
    }

    pub fn materialize(&self) -> Result<CPoly> {
        self.g.mul(&self.h)
    }
}

/// A random product polynomial: the variables are shuffled and split in
/// two halves, and each factor gets `terms` random multilinear monomials
/// with coefficients in `[-3, 3]`.
pub fn random_product_poly<R: Rng + ?Sized>(n: usize, terms: usize, rng: &mut R) -> ProductPoly {
    use rand::seq::SliceRandom;
    let mut vars: Vec<u32> = (0..n as u32).collect();
    vars.shuffle(rng);
    let (a, b) = vars.split_at(n / 2);
    let mut factor = |set: &[u32]| {
        let mut t: Vec<(CMonomial, Scalar)> = Vec::new();
        for _ in 0..terms {
            let m = CMonomial::from_support(set.iter().copied().filter(|_| rng.gen_bool(0.5)));
            t.push((m, Scalar::integer(rng.gen_range(-3..=3))));
        }
        CPoly::from_terms(n, Field::Rationals, t).expect("variables in range")
    };
    let g = factor(a);
    let h = factor(b);
    let eps = Rational::new(BigInt::from(n / 2), BigInt::from(n.max(1)));
    ProductPoly::new(a.iter().copied().collect(), b.iter().copied().collect(), g, h, eps).expect("valid split")
}

/// Correlation of `F` with `f`, exactly and as `corr^2 / (|F|^2 |f|^2)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorrReport {
    pub corr: Rational,
    /// Zero when `f` is zero.
    pub squared_ratio: Rational,
}

pub fn corr_f_vs(big_f: &CPoly, f: &CPoly) -> Result<CorrReport> {
    let corr = big_f.corr(f)?;
    let denom = big_f.norm_sq()? * f.norm_sq()?;
    let squared_ratio = if denom.is_zero() {
        Rational::zero()
    } else {
        &corr * &corr / denom
    };
    Ok(CorrReport { corr, squared_ratio })
}

/// `Σ ψ(z y_1 ⋯ y_s)` over `y_i ∈ A_i`, computed by tracking how many
/// tuples reach each partial product.
pub fn exp_sum(sets: &[Vec<Scalar>], z: &Scalar) -> Result<BigInt> {
    let field = z.field();
    if sets.iter().flatten().any(|y| !field.contains(y)) {
        return Err(Error::FieldMismatch);
    }
    let mut counts: BTreeMap<Vec<bool>, (Scalar, BigInt)> = BTreeMap::new();
    counts.insert(decode_bits(z)?, (z.clone(), BigInt::one()));
    for set in sets {
        let mut next: BTreeMap<Vec<bool>, (Scalar, BigInt)> = BTreeMap::new();
        for (v, c) in counts.values() {
            for y in set {
                let prod = v * y;
                let e = next
                    .entry(decode_bits(&prod)?)
                    .or_insert_with(|| (prod, BigInt::zero()));
                e.1 += c;
            }
        }
        counts = next;
    }
    let mut total = BigInt::zero();
    for (v, c) in counts.values() {
        if v.psi()? == 1 {
            total += c;
        } else {
            total -= c;
        }
    }
    Ok(total)
}

/// Whether `(X', X'', m'')` is a suitable restriction: for each block with
/// `|X'' ∩ X(i)| ≥ p/2`, some variable of the block occurs in `m''`.
pub fn is_suitable_restriction(
    x1: &BTreeSet<u32>,
    x2: &BTreeSet<u32>,
    m2: &CMonomial,
    params: &ExplicitParams,
) -> Result<bool> {
    let n = params.n() as u32;
    if x1.intersection(x2).next().is_some() || x1.len() + x2.len() != n as usize || x1.iter().chain(x2).any(|&v| v >= n)
    {
        return Err(Error::InvalidArgument("X' and X'' must partition the variables".into()));
    }
    if let Some(v) = m2.support().find(|v| !x2.contains(v)) {
        return Err(Error::InvalidArgument(format!("m'' uses x{v} outside X''")));
    }
    Ok((0..params.t()).all(|i| {
        let heavy = 2 * params.block(i).filter(|v| x2.contains(v)).count() >= params.p();
        !heavy || params.block(i).any(|v| m2.contains(v))
    }))
}

/// `f = Π_i Σ_j x_ij` and `g = Π_j Σ_i x_ij` with `x_ij` the variable
/// `i n + j`; their Hadamard product is the permanent.
pub fn permanent_hadamard(n: usize, caps: &Caps) -> Result<(CPoly, CPoly)> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    let terms = (n as u32).checked_pow(n as u32).ok_or(Error::CapExceeded {
        what: "term",
        limit: caps.max_terms,
    })?;
    caps.check_terms(terms as usize)?;
    let nv = n * n;
    let x = |i: usize, j: usize| CPoly::var(nv, Field::Rationals, (i * n + j) as u32);
    let mut f = CPoly::constant(nv, Scalar::integer(1));
    let mut g = CPoly::constant(nv, Scalar::integer(1));
    for i in 0..n {
        let mut row = CPoly::zero(nv, Field::Rationals);
        let mut col = CPoly::zero(nv, Field::Rationals);
        for j in 0..n {
            row = row.add(&x(i, j))?;
            col = col.add(&x(j, i))?;
        }
        f = f.mul_capped(&row, caps)?;
        g = g.mul_capped(&col, caps)?;
    }
    Ok((f, g))
}

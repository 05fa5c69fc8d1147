//! Exact scalars: the rationals, prime fields `F_p` and extension fields
//! `F_{p^k}` in a polynomial basis.
//!
//! Every [`Scalar`] knows which field it lives in, so values coming from
//! different fields are caught by the `try_*` operations. The operator
//! impls (`&a + &b` and friends) are for code that has already validated its
//! inputs against a single [`Field`]; they panic on mixed operands.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;

use crate::error::{Error, Result};

/// Arbitrary precision rational, always stored in lowest terms with a
/// positive denominator.
pub type Rational = BigRational;

/// Largest field order for which exhaustive searches (irreducibility by
/// trial division, element enumeration) are attempted.
pub const ENUMERATION_LIMIT: u128 = 1 << 24;

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, p);
        }
        base = mul_mod(base, base, p);
        exp >>= 1;
    }
    acc
}

/// Parameters of `F_p[x]/(m(x))` for a monic irreducible `m` of degree `k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExtParams {
    p: u64,
    /// Monic modulus, low degree first, length `k + 1`.
    modulus: Vec<u64>,
}

impl ExtParams {
    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn k(&self) -> usize {
        self.modulus.len() - 1
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    pub fn order(&self) -> u128 {
        (self.p as u128).pow(self.k() as u32)
    }
}

// ---------------------------------------------------------------------------
// Polynomials over F_p as plain coefficient vectors (low degree first).

fn trim(v: &mut Vec<u64>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

/// Remainder of `a` modulo the monic polynomial `m` over `F_p`.
fn poly_rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let mut r = a.to_vec();
    trim(&mut r);
    let dm = m.len() - 1;
    while r.len() > dm {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - dm;
        for (j, &mj) in m.iter().enumerate() {
            let sub = mul_mod(lead, mj, p);
            r[shift + j] = (r[shift + j] + p - sub) % p;
        }
        trim(&mut r);
    }
    r
}

fn monic_from_index(mut idx: u128, p: u64, k: usize) -> Vec<u64> {
    let mut coeffs = Vec::with_capacity(k + 1);
    for _ in 0..k {
        coeffs.push((idx % p as u128) as u64);
        idx /= p as u128;
    }
    coeffs.push(1);
    coeffs
}

/// Checks irreducibility of a monic polynomial by trial division with every
/// monic polynomial of degree `1..=k/2`.
pub fn is_irreducible(modulus: &[u64], p: u64) -> Result<bool> {
    let k = modulus.len().saturating_sub(1);
    if k == 0 {
        return Ok(false);
    }
    let half = k / 2;
    if half > 0
        && (p as u128)
            .checked_pow(half as u32)
            .is_none_or(|c| c > ENUMERATION_LIMIT)
    {
        return Err(Error::CapExceeded {
            what: "irreducibility search",
            limit: ENUMERATION_LIMIT as usize,
        });
    }
    for deg in 1..=half {
        let count = (p as u128).pow(deg as u32);
        for idx in 0..count {
            let divisor = monic_from_index(idx, p, deg);
            if poly_rem(modulus, &divisor, p).is_empty() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Smallest monic irreducible polynomial of degree `k` over `F_p`, reading the
/// coefficients as base-`p` digits with the constant term least significant.
/// For `k = 1` this is `x`.
pub fn find_irreducible(p: u64, k: usize) -> Result<Vec<u64>> {
    if !is_prime(p) {
        return Err(Error::InvalidField(format!("{p} is not prime")));
    }
    if k == 0 {
        return Err(Error::InvalidField("extension degree must be at least 1".into()));
    }
    let count = (p as u128)
        .checked_pow(k as u32)
        .filter(|&c| c <= ENUMERATION_LIMIT)
        .ok_or(Error::CapExceeded {
            what: "irreducible search",
            limit: ENUMERATION_LIMIT as usize,
        })?;
    for idx in 0..count {
        let cand = monic_from_index(idx, p, k);
        if is_irreducible(&cand, p)? {
            return Ok(cand);
        }
    }
    unreachable!("an irreducible polynomial of every degree exists")
}

// ---------------------------------------------------------------------------

/// A field descriptor.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Field {
    Rationals,
    Prime(u64),
    Extension(Arc<ExtParams>),
}

impl Field {
    pub fn prime(p: u64) -> Result<Field> {
        if !is_prime(p) {
            return Err(Error::InvalidField(format!("{p} is not prime")));
        }
        Ok(Field::Prime(p))
    }

    /// `F_{p^k}` with the canonical modulus from [`find_irreducible`].
    pub fn extension(p: u64, k: usize) -> Result<Field> {
        let modulus = find_irreducible(p, k)?;
        Ok(Field::Extension(Arc::new(ExtParams { p, modulus })))
    }

    /// `F_p[x]/(modulus)`; the modulus must be monic and irreducible.
    pub fn extension_with_modulus(p: u64, modulus: Vec<u64>) -> Result<Field> {
        if !is_prime(p) {
            return Err(Error::InvalidField(format!("{p} is not prime")));
        }
        if modulus.len() < 2 {
            return Err(Error::InvalidField("modulus must have degree at least 1".into()));
        }
        if modulus.iter().any(|&c| c >= p) {
            return Err(Error::InvalidField("modulus coefficient out of range".into()));
        }
        if *modulus.last().unwrap() != 1 {
            return Err(Error::InvalidField("modulus must be monic".into()));
        }
        if !is_irreducible(&modulus, p)? {
            return Err(Error::InvalidField("modulus is reducible".into()));
        }
        Ok(Field::Extension(Arc::new(ExtParams { p, modulus })))
    }

    pub fn characteristic(&self) -> u64 {
        match self {
            Field::Rationals => 0,
            Field::Prime(p) => *p,
            Field::Extension(e) => e.p,
        }
    }

    /// Number of elements, or `None` for the rationals.
    pub fn order(&self) -> Option<u128> {
        match self {
            Field::Rationals => None,
            Field::Prime(p) => Some(*p as u128),
            Field::Extension(e) => Some(e.order()),
        }
    }

    pub fn is_finite(&self) -> bool {
        !matches!(self, Field::Rationals)
    }

    pub fn zero(&self) -> Scalar {
        self.from_i64(0)
    }

    pub fn one(&self) -> Scalar {
        self.from_i64(1)
    }

    pub fn from_i64(&self, v: i64) -> Scalar {
        self.from_bigint(&BigInt::from(v))
    }

    pub fn from_bigint(&self, v: &BigInt) -> Scalar {
        match self {
            Field::Rationals => Scalar::Q(Rational::from_integer(v.clone())),
            Field::Prime(p) => Scalar::Fp(PrimeElem {
                value: reduce_bigint(v, *p),
                p: *p,
            }),
            Field::Extension(e) => {
                let mut coeffs = vec![0; e.k()];
                coeffs[0] = reduce_bigint(v, e.p);
                Scalar::Fpk(ExtElem {
                    coeffs,
                    params: e.clone(),
                })
            }
        }
    }

    /// Maps a rational into this field; fails when the denominator vanishes.
    pub fn from_rational(&self, r: &Rational) -> Result<Scalar> {
        match self {
            Field::Rationals => Ok(Scalar::Q(r.clone())),
            _ => {
                let num = self.from_bigint(r.numer());
                let den = self.from_bigint(r.denom());
                num.try_div(&den)
            }
        }
    }

    /// Builds an element of `F_{p^k}` from its polynomial-basis coefficients.
    pub fn from_coeffs(&self, coeffs: &[u64]) -> Result<Scalar> {
        match self {
            Field::Extension(e) => {
                if coeffs.len() != e.k() {
                    return Err(Error::ArityMismatch {
                        expected: e.k(),
                        found: coeffs.len(),
                    });
                }
                Ok(Scalar::Fpk(ExtElem {
                    coeffs: coeffs.iter().map(|&c| c % e.p).collect(),
                    params: e.clone(),
                }))
            }
            Field::Prime(p) if coeffs.len() == 1 => Ok(Scalar::Fp(PrimeElem {
                value: coeffs[0] % p,
                p: *p,
            })),
            _ => Err(Error::WrongField {
                expected: "a finite field",
                found: self.to_string(),
            }),
        }
    }

    /// True when `s` is an element of this field.
    pub fn contains(&self, s: &Scalar) -> bool {
        match (self, s) {
            (Field::Rationals, Scalar::Q(_)) => true,
            (Field::Prime(p), Scalar::Fp(e)) => e.p == *p,
            (Field::Extension(a), Scalar::Fpk(e)) => Arc::ptr_eq(a, &e.params) || **a == *e.params,
            _ => false,
        }
    }

    /// All elements in a fixed enumeration order (finite fields only).
    pub fn elements(&self) -> Result<Vec<Scalar>> {
        let q = self.order().ok_or(Error::WrongField {
            expected: "a finite field",
            found: self.to_string(),
        })?;
        if q > ENUMERATION_LIMIT {
            return Err(Error::CapExceeded {
                what: "field element",
                limit: ENUMERATION_LIMIT as usize,
            });
        }
        Ok((0..q).map(|i| self.element_at(i)).collect())
    }

    /// The `i`-th element of a finite field, reading `i` in base `p` as the
    /// coefficient vector.
    pub fn element_at(&self, mut i: u128) -> Scalar {
        match self {
            Field::Rationals => Scalar::Q(Rational::from_integer(BigInt::from(i))),
            Field::Prime(p) => Scalar::Fp(PrimeElem {
                value: (i % *p as u128) as u64,
                p: *p,
            }),
            Field::Extension(e) => {
                let mut coeffs = Vec::with_capacity(e.k());
                for _ in 0..e.k() {
                    coeffs.push((i % e.p as u128) as u64);
                    i /= e.p as u128;
                }
                Scalar::Fpk(ExtElem {
                    coeffs,
                    params: e.clone(),
                })
            }
        }
    }

    /// A uniformly random element of a finite field. Over the rationals this
    /// returns a small random integer in `[-8, 8]`.
    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Scalar {
        match self {
            Field::Rationals => self.from_i64(rng.gen_range(-8..=8)),
            Field::Prime(p) => Scalar::Fp(PrimeElem {
                value: rng.gen_range(0..*p),
                p: *p,
            }),
            Field::Extension(e) => Scalar::Fpk(ExtElem {
                coeffs: (0..e.k()).map(|_| rng.gen_range(0..e.p)).collect(),
                params: e.clone(),
            }),
        }
    }

    /// The smallest extension of this finite field with at least `min_size`
    /// elements, together with the embedding of this field into it.
    ///
    /// Returns the field itself (identity embedding) when it is already large
    /// enough.
    pub fn extension_at_least(&self, min_size: u128) -> Result<(Field, Embedding)> {
        let q = self.order().ok_or(Error::WrongField {
            expected: "a finite field",
            found: self.to_string(),
        })?;
        if q >= min_size {
            return Ok((self.clone(), Embedding::Identity));
        }
        let p = self.characteristic();
        let base_k = match self {
            Field::Extension(e) => e.k(),
            _ => 1,
        };
        let mut mult = 2usize;
        loop {
            let size = (p as u128)
                .checked_pow((base_k * mult) as u32)
                .ok_or(Error::CapExceeded {
                    what: "extension size",
                    limit: ENUMERATION_LIMIT as usize,
                })?;
            if size >= min_size {
                break;
            }
            mult += 1;
        }
        let target = Field::extension(p, base_k * mult)?;
        let embedding = match self {
            Field::Extension(e) => {
                // Find a root of the base modulus in the target field; the
                // generator of the base field maps to it.
                let root = target
                    .elements()?
                    .into_iter()
                    .find(|r| eval_fp_poly(e.modulus(), r).is_zero())
                    .ok_or_else(|| Error::InvalidField("no root of base modulus in extension".into()))?;
                Embedding::Generator {
                    target: target.clone(),
                    image: root,
                }
            }
            _ => Embedding::Constants { target: target.clone() },
        };
        Ok((target, embedding))
    }
}

fn eval_fp_poly(coeffs: &[u64], at: &Scalar) -> Scalar {
    let field = at.field();
    let mut acc = field.zero();
    for &c in coeffs.iter().rev() {
        acc = &(&acc * at) + &field.from_i64(c as i64);
    }
    acc
}

/// A field embedding `F_{p^k} -> F_{p^K}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Embedding {
    Identity,
    /// Prime-field elements become constants of the target.
    Constants {
        target: Field,
    },
    /// The base generator `x` maps to `image`, a root of the base modulus.
    Generator {
        target: Field,
        image: Scalar,
    },
}

impl Embedding {
    pub fn apply(&self, s: &Scalar) -> Scalar {
        match (self, s) {
            (Embedding::Identity, _) => s.clone(),
            (Embedding::Constants { target }, Scalar::Fp(e)) => target.from_i64(e.value as i64),
            (Embedding::Generator { image, .. }, Scalar::Fpk(e)) => eval_fp_poly(&e.coeffs, image),
            _ => panic!("embedding applied to an element of the wrong field"),
        }
    }
}

fn reduce_bigint(v: &BigInt, p: u64) -> u64 {
    let r = v.mod_floor(&BigInt::from(p));
    r.to_u64().expect("residue fits in u64")
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Rationals => write!(f, "Q"),
            Field::Prime(p) => write!(f, "F_{p}"),
            Field::Extension(e) => write!(f, "F_{}^{}", e.p, e.k()),
        }
    }
}

// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PrimeElem {
    value: u64,
    p: u64,
}

impl PrimeElem {
    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExtElem {
    coeffs: Vec<u64>,
    params: Arc<ExtParams>,
}

impl ExtElem {
    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn params(&self) -> &Arc<ExtParams> {
        &self.params
    }

    fn mul(&self, other: &ExtElem) -> ExtElem {
        let p = self.params.p;
        let k = self.params.k();
        let mut prod = vec![0u64; 2 * k - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                prod[i + j] = (prod[i + j] + mul_mod(a, b, p)) % p;
            }
        }
        let mut r = poly_rem(&prod, &self.params.modulus, p);
        r.resize(k, 0);
        ExtElem {
            coeffs: r,
            params: self.params.clone(),
        }
    }

    fn pow(&self, mut exp: u128) -> ExtElem {
        let mut acc = {
            let mut c = vec![0; self.params.k()];
            c[0] = 1;
            ExtElem {
                coeffs: c,
                params: self.params.clone(),
            }
        };
        let mut base = self.clone();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            exp >>= 1;
        }
        acc
    }

    fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    /// Absolute trace `a + a^p + ... + a^{p^{k-1}}`, an element of `F_p`.
    pub fn trace(&self) -> PrimeElem {
        let p = self.params.p;
        let mut acc = vec![0u64; self.params.k()];
        let mut power = self.clone();
        for _ in 0..self.params.k() {
            for (a, c) in acc.iter_mut().zip(&power.coeffs) {
                *a = (*a + c) % p;
            }
            power = power.pow(p as u128);
        }
        debug_assert!(acc[1..].iter().all(|&c| c == 0), "trace lies in the prime field");
        PrimeElem { value: acc[0], p }
    }

    /// The trace character `(-1)^{Tr(a)}` of a characteristic-2 field.
    pub fn psi(&self) -> Result<i32> {
        if self.params.p != 2 {
            return Err(Error::WrongField {
                expected: "characteristic 2",
                found: format!("characteristic {}", self.params.p),
            });
        }
        Ok(if self.trace().value == 0 { 1 } else { -1 })
    }
}

/// Element of `F_{2^k}` whose polynomial-basis coefficient vector is `bits`
/// (bit `j` is the coefficient of `x^j`).
pub fn encode_bits(field: &Field, bits: &[bool]) -> Result<Scalar> {
    match field {
        Field::Extension(e) if e.p == 2 => {
            if bits.len() != e.k() {
                return Err(Error::ArityMismatch {
                    expected: e.k(),
                    found: bits.len(),
                });
            }
            Ok(Scalar::Fpk(ExtElem {
                coeffs: bits.iter().map(|&b| b as u64).collect(),
                params: e.clone(),
            }))
        }
        _ => Err(Error::WrongField {
            expected: "F_2^k",
            found: field.to_string(),
        }),
    }
}

pub fn decode_bits(s: &Scalar) -> Result<Vec<bool>> {
    match s {
        Scalar::Fpk(e) if e.params.p == 2 => Ok(e.coeffs.iter().map(|&c| c == 1).collect()),
        _ => Err(Error::WrongField {
            expected: "F_2^k",
            found: s.field().to_string(),
        }),
    }
}

// ---------------------------------------------------------------------------

/// An exact field element.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Scalar {
    Q(Rational),
    Fp(PrimeElem),
    Fpk(ExtElem),
}

impl Scalar {
    pub fn field(&self) -> Field {
        match self {
            Scalar::Q(_) => Field::Rationals,
            Scalar::Fp(e) => Field::Prime(e.p),
            Scalar::Fpk(e) => Field::Extension(e.params.clone()),
        }
    }

    pub fn rational(r: Rational) -> Scalar {
        Scalar::Q(r)
    }

    pub fn integer(v: i64) -> Scalar {
        Scalar::Q(Rational::from_integer(BigInt::from(v)))
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        match self {
            Scalar::Q(r) => Some(r),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Q(r) => r.is_zero(),
            Scalar::Fp(e) => e.value == 0,
            Scalar::Fpk(e) => e.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Q(r) => r.is_one(),
            Scalar::Fp(e) => e.value == 1 % e.p,
            Scalar::Fpk(e) => e.coeffs[0] == 1 && e.coeffs[1..].iter().all(|&c| c == 0),
        }
    }

    /// Strictly positive rational.
    pub fn is_positive(&self) -> bool {
        matches!(self, Scalar::Q(r) if r.is_positive())
    }

    fn same_field(&self, other: &Scalar) -> bool {
        match (self, other) {
            (Scalar::Q(_), Scalar::Q(_)) => true,
            (Scalar::Fp(a), Scalar::Fp(b)) => a.p == b.p,
            (Scalar::Fpk(a), Scalar::Fpk(b)) => Arc::ptr_eq(&a.params, &b.params) || a.params == b.params,
            _ => false,
        }
    }

    pub fn try_add(&self, other: &Scalar) -> Result<Scalar> {
        if !self.same_field(other) {
            return Err(Error::FieldMismatch);
        }
        Ok(match (self, other) {
            (Scalar::Q(a), Scalar::Q(b)) => Scalar::Q(a + b),
            (Scalar::Fp(a), Scalar::Fp(b)) => Scalar::Fp(PrimeElem {
                value: ((a.value as u128 + b.value as u128) % a.p as u128) as u64,
                p: a.p,
            }),
            (Scalar::Fpk(a), Scalar::Fpk(b)) => {
                let p = a.params.p;
                Scalar::Fpk(ExtElem {
                    coeffs: a
                        .coeffs
                        .iter()
                        .zip(&b.coeffs)
                        .map(|(x, y)| ((*x as u128 + *y as u128) % p as u128) as u64)
                        .collect(),
                    params: a.params.clone(),
                })
            }
            _ => unreachable!(),
        })
    }

    pub fn try_sub(&self, other: &Scalar) -> Result<Scalar> {
        if !self.same_field(other) {
            return Err(Error::FieldMismatch);
        }
        self.try_add(&other.neg_ref())
    }

    pub fn try_mul(&self, other: &Scalar) -> Result<Scalar> {
        if !self.same_field(other) {
            return Err(Error::FieldMismatch);
        }
        Ok(match (self, other) {
            (Scalar::Q(a), Scalar::Q(b)) => Scalar::Q(a * b),
            (Scalar::Fp(a), Scalar::Fp(b)) => Scalar::Fp(PrimeElem {
                value: mul_mod(a.value, b.value, a.p),
                p: a.p,
            }),
            (Scalar::Fpk(a), Scalar::Fpk(b)) => Scalar::Fpk(a.mul(b)),
            _ => unreachable!(),
        })
    }

    pub fn try_div(&self, other: &Scalar) -> Result<Scalar> {
        if !self.same_field(other) {
            return Err(Error::FieldMismatch);
        }
        self.try_mul(&other.inverse()?)
    }

    pub fn inverse(&self) -> Result<Scalar> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(match self {
            Scalar::Q(r) => Scalar::Q(r.recip()),
            Scalar::Fp(e) => Scalar::Fp(PrimeElem {
                value: pow_mod(e.value, e.p - 2, e.p),
                p: e.p,
            }),
            Scalar::Fpk(e) => Scalar::Fpk(e.pow(e.params.order() - 2)),
        })
    }

    fn neg_ref(&self) -> Scalar {
        match self {
            Scalar::Q(r) => Scalar::Q(-r),
            Scalar::Fp(e) => Scalar::Fp(PrimeElem {
                value: (e.p - e.value) % e.p,
                p: e.p,
            }),
            Scalar::Fpk(e) => {
                let p = e.params.p;
                Scalar::Fpk(ExtElem {
                    coeffs: e.coeffs.iter().map(|&c| (p - c) % p).collect(),
                    params: e.params.clone(),
                })
            }
        }
    }

    pub fn pow(&self, exp: u64) -> Scalar {
        let mut acc = self.field().one();
        let mut base = self.clone();
        let mut e = exp;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Absolute trace into the prime field (identity on `F_p`).
    pub fn trace(&self) -> Result<PrimeElem> {
        match self {
            Scalar::Fp(e) => Ok(e.clone()),
            Scalar::Fpk(e) => Ok(e.trace()),
            Scalar::Q(_) => Err(Error::WrongField {
                expected: "a finite field",
                found: "Q".into(),
            }),
        }
    }

    /// The trace character on `F_{2^k}`.
    pub fn psi(&self) -> Result<i32> {
        match self {
            Scalar::Fpk(e) => e.psi(),
            _ => Err(Error::WrongField {
                expected: "F_2^k",
                found: self.field().to_string(),
            }),
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Q(r) => {
                if r.is_integer() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
            Scalar::Fp(e) => write!(f, "{}", e.value),
            Scalar::Fpk(e) => {
                let parts: Vec<String> = e.coeffs.iter().map(|c| c.to_string()).collect();
                write!(f, "[{}]", parts.join(","))
            }
        }
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl $trait<&Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                self.$checked(rhs).expect("mixed-field operands")
            }
        }
        impl $trait<Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                (&self).$checked(&rhs).expect("mixed-field operands")
            }
        }
    };
}

forward_binop!(Add, add, try_add);
forward_binop!(Sub, sub, try_sub);
forward_binop!(Mul, mul, try_mul);

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        self.neg_ref()
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        self.neg_ref()
    }
}

/// Parses `"a"` or `"a/b"` into a rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::InvalidArgument(format!("not a rational: {s:?}"));
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(Error::DivisionByZero);
    }
    Ok(Rational::new(num, den))
}

//! Partial-derivative matrices of homogeneous noncommutative polynomials.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Caps, Error, Result};
use crate::linalg::Matrix;
use crate::poly::{NcPoly, Word};

/// `M_k(f)`: rows are indexed by words of length `k`, columns by words of
/// length `degree - k`, both in lexicographic order; the `(u, v)` entry is
/// the coefficient of `uv` in `f`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NisanMatrix {
    pub k: usize,
    pub degree: usize,
    pub matrix: Matrix,
}

/// Position of `w` among words of its length in lexicographic order.
fn word_index(w: &[u32], n: usize) -> usize {
    w.iter().fold(0usize, |acc, &v| acc * n + v as usize)
}

fn checked_pow(n: usize, e: usize) -> Option<usize> {
    let mut acc = 1usize;
    for _ in 0..e {
        acc = acc.checked_mul(n)?;
    }
    Some(acc)
}

pub fn nisan_matrix(f: &NcPoly, k: usize, caps: &Caps) -> Result<NisanMatrix> {
    if !f.is_homogeneous() {
        return Err(Error::NotHomogeneous(
            "partial-derivative matrices need a homogeneous polynomial".into(),
        ));
    }
    nisan_matrix_with_degree(f, f.degree().unwrap_or(0), k, caps)
}

/// As [`nisan_matrix`], with the degree given explicitly (needed for the
/// zero polynomial). Terms of any other degree are rejected.
pub fn nisan_matrix_with_degree(f: &NcPoly, degree: usize, k: usize, caps: &Caps) -> Result<NisanMatrix> {
    if k > degree {
        return Err(Error::InvalidArgument(format!("k = {k} exceeds degree {degree}")));
    }
    if let Some(w) = f.terms().keys().find(|w| w.degree() != degree) {
        return Err(Error::NotHomogeneous(format!(
            "term of degree {} in a degree-{degree} polynomial",
            w.degree()
        )));
    }
    let n = f.n_vars();
    let cap = || Error::CapExceeded {
        what: "matrix cell",
        limit: caps.max_terms,
    };
    let rows = checked_pow(n, k).ok_or_else(cap)?;
    let cols = checked_pow(n, degree - k).ok_or_else(cap)?;
    caps.check_terms(rows.checked_mul(cols).ok_or_else(cap)?)
        .map_err(|_| cap())?;
    let mut matrix = Matrix::zeros(rows, cols, f.field().clone());
    for (Word(w), c) in f.terms() {
        let (u, v) = w.split_at(k);
        matrix.set(word_index(u, n), word_index(v, n), c.clone());
    }
    Ok(NisanMatrix { k, degree, matrix })
}

/// Ranks of `M_0(f), ..., M_d(f)`.
pub fn nisan_ranks(f: &NcPoly, degree: usize, caps: &Caps) -> Result<Vec<usize>> {
    (0..=degree)
        .map(|k| nisan_matrix_with_degree(f, degree, k, caps).map(|m| m.matrix.rank()))
        .collect()
}

/// Sum of the ranks of all partial-derivative matrices of a homogeneous
/// polynomial: the number of nodes of its smallest program.
pub fn nisan_complexity(f: &NcPoly, caps: &Caps) -> Result<usize> {
    if !f.is_homogeneous() {
        return Err(Error::NotHomogeneous(
            "partial-derivative matrices need a homogeneous polynomial".into(),
        ));
    }
    Ok(nisan_ranks(f, f.degree().unwrap_or(0), caps)?.iter().sum())
}

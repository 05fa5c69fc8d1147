//! Dense matrices over an exact [`Field`].
//!
//! Over the rationals, rank and determinant clear denominators row by row and
//! then eliminate fraction-free (Bareiss for the determinant, content-reduced
//! integer elimination for the rank). Over finite fields plain Gaussian
//! elimination is used.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::scalar::{Field, Rational, Scalar};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    field: Field,
    entries: Vec<Scalar>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, field: Field, entries: Vec<Scalar>) -> Result<Matrix> {
        if entries.len() != rows * cols {
            return Err(Error::ShapeMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        if entries.iter().any(|e| !field.contains(e)) {
            return Err(Error::FieldMismatch);
        }
        Ok(Matrix {
            rows,
            cols,
            field,
            entries,
        })
    }

    pub fn zeros(rows: usize, cols: usize, field: Field) -> Matrix {
        let z = field.zero();
        Matrix {
            rows,
            cols,
            entries: vec![z; rows * cols],
            field,
        }
    }

    pub fn identity(n: usize, field: Field) -> Matrix {
        let mut m = Matrix::zeros(n, n, field);
        for i in 0..n {
            m.entries[i * n + i] = m.field.one();
        }
        m
    }

    pub fn from_fn<F: FnMut(usize, usize) -> Scalar>(rows: usize, cols: usize, field: Field, mut f: F) -> Matrix {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        Matrix {
            rows,
            cols,
            field,
            entries,
        }
    }

    /// Integer matrix over the rationals.
    pub fn from_integers(rows: usize, cols: usize, values: &[i64]) -> Result<Matrix> {
        Matrix::new(
            rows,
            cols,
            Field::Rationals,
            values.iter().map(|&v| Scalar::integer(v)).collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn entries(&self) -> &[Scalar] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        debug_assert!(self.field.contains(&v));
        self.entries[i * self.cols + j] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Scalar::is_zero)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn matmul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        if self.field != other.field {
            return Err(Error::FieldMismatch);
        }
        let mut out = Matrix::zeros(self.rows, other.cols, self.field.clone());
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let idx = i * other.cols + j;
                    out.entries[idx] = &out.entries[idx] + &(a * b);
                }
            }
        }
        Ok(out)
    }

    /// Entrywise product.
    pub fn hadamard(&self, other: &Matrix) -> Result<Matrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        if self.field != other.field {
            return Err(Error::FieldMismatch);
        }
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            field: self.field.clone(),
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| a * b).collect(),
        })
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::ShapeMismatch("matrix sum".into()));
        }
        if self.field != other.field {
            return Err(Error::FieldMismatch);
        }
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            field: self.field.clone(),
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn scale(&self, c: &Scalar) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            field: self.field.clone(),
            entries: self.entries.iter().map(|a| a * c).collect(),
        }
    }

    fn row_vectors(&self) -> Vec<Vec<Scalar>> {
        self.entries
            .chunks(self.cols.max(1))
            .take(self.rows)
            .map(<[Scalar]>::to_vec)
            .collect()
    }

    /// Rows scaled by the lcm of their denominators (rationals only).
    fn integer_rows(&self) -> (Vec<Vec<BigInt>>, BigInt) {
        let mut scale_product = BigInt::one();
        let rows = (0..self.rows)
            .map(|i| {
                let row = &self.entries[i * self.cols..(i + 1) * self.cols];
                let lcm = row
                    .iter()
                    .map(|e| e.as_rational().expect("rational entry").denom().clone())
                    .fold(BigInt::one(), |acc, d| acc.lcm(&d));
                scale_product *= &lcm;
                row.iter()
                    .map(|e| {
                        let r = e.as_rational().unwrap();
                        r.numer() * (&lcm / r.denom())
                    })
                    .collect()
            })
            .collect();
        (rows, scale_product)
    }

    pub fn rank(&self) -> usize {
        if self.field == Field::Rationals {
            let (rows, _) = self.integer_rows();
            integer_rank(rows)
        } else {
            field_echelon(self.row_vectors(), self.cols).len()
        }
    }

    pub fn det(&self) -> Result<Scalar> {
        if !self.is_square() {
            return Err(Error::ShapeMismatch(format!(
                "determinant of a {}x{} matrix",
                self.rows, self.cols
            )));
        }
        if self.rows == 0 {
            return Ok(self.field.one());
        }
        if self.field == Field::Rationals {
            let (rows, scale) = self.integer_rows();
            let d = bareiss_det(rows);
            Ok(Scalar::Q(Rational::new(d, scale)))
        } else {
            Ok(field_det(self.row_vectors()))
        }
    }

    /// Row-major flattening.
    pub fn flatten(&self) -> Vec<Scalar> {
        self.entries.clone()
    }
}

/// Determinant of an integer matrix by Bareiss's fraction-free elimination.
pub fn bareiss_det(mut a: Vec<Vec<BigInt>>) -> BigInt {
    let n = a.len();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(i, k);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[k][k] * &a[i][j] - &a[i][k] * &a[k][j];
                debug_assert!((&v % &prev).is_zero());
                a[i][j] = v / &prev;
            }
            a[i][k] = BigInt::zero();
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

fn integer_rank(mut rows: Vec<Vec<BigInt>>) -> usize {
    let n_rows = rows.len();
    let n_cols = rows.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..n_cols {
        if r == n_rows {
            break;
        }
        let Some(piv) = (r..n_rows)
            .filter(|&i| !rows[i][c].is_zero())
            .min_by_key(|&i| rows[i][c].abs())
        else {
            continue;
        };
        rows.swap(r, piv);
        let (top, rest) = rows.split_at_mut(r + 1);
        let pivot_row = &top[r];
        for row in rest.iter_mut() {
            if row[c].is_zero() {
                continue;
            }
            let g = pivot_row[c].gcd(&row[c]);
            let mul_row = &pivot_row[c] / &g;
            let mul_piv = &row[c] / &g;
            for (x, p) in row.iter_mut().zip(pivot_row.iter()) {
                *x = &*x * &mul_row - p * &mul_piv;
            }
            let content = row.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
            if !content.is_zero() && !content.is_one() {
                for x in row.iter_mut() {
                    *x = &*x / &content;
                }
            }
        }
        r += 1;
    }
    r
}

/// Reduced echelon rows (pivot normalized to one) by Gauss-Jordan over any field.
fn field_echelon(mut rows: Vec<Vec<Scalar>>, n_cols: usize) -> Vec<(usize, Vec<Scalar>)> {
    let mut pivots: Vec<usize> = Vec::new();
    let mut r = 0;
    for c in 0..n_cols {
        let Some(piv) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, piv);
        let inv = rows[r][c].inverse().expect("nonzero pivot");
        let pivot_row: Vec<Scalar> = rows[r].iter().map(|x| x * &inv).collect();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, p) in row.iter_mut().zip(&pivot_row) {
                *x = &*x - &(&f * p);
            }
        }
        rows[r] = pivot_row;
        pivots.push(c);
        r += 1;
    }
    pivots.into_iter().zip(rows).collect()
}

fn field_det(mut a: Vec<Vec<Scalar>>) -> Scalar {
    let n = a.len();
    let field = a[0][0].field();
    let mut det = field.one();
    for k in 0..n {
        let Some(piv) = (k..n).find(|&i| !a[i][k].is_zero()) else {
            return field.zero();
        };
        if piv != k {
            a.swap(piv, k);
            det = -det;
        }
        det = &det * &a[k][k];
        let inv = a[k][k].inverse().expect("nonzero pivot");
        for i in k + 1..n {
            if a[i][k].is_zero() {
                continue;
            }
            let f = &a[i][k] * &inv;
            for j in k..n {
                let v = &a[i][j] - &(&f * &a[k][j]);
                a[i][j] = v;
            }
        }
    }
    det
}

fn check_uniform(mats: &[Matrix]) -> Result<()> {
    if let Some(first) = mats.first() {
        for m in mats {
            if m.rows != first.rows || m.cols != first.cols {
                return Err(Error::ShapeMismatch(format!(
                    "{}x{} vs {}x{}",
                    first.rows, first.cols, m.rows, m.cols
                )));
            }
            if m.field != first.field {
                return Err(Error::FieldMismatch);
            }
        }
    }
    Ok(())
}

/// Indices of a maximal linearly independent subsequence of `mats`, chosen
/// greedily in input order.
pub fn basis_of_matrix_set(mats: &[Matrix]) -> Result<Vec<usize>> {
    check_uniform(mats)?;
    let mut reducer = SpanReducer::default();
    let mut chosen = Vec::new();
    for (i, m) in mats.iter().enumerate() {
        if reducer.insert(m.flatten()) {
            chosen.push(i);
        }
    }
    Ok(chosen)
}

/// Incrementally maintained echelon basis of a vector space.
#[derive(Clone, Debug, Default)]
pub struct SpanReducer {
    rows: Vec<(usize, Vec<Scalar>)>,
}

impl SpanReducer {
    fn reduce(&self, mut v: Vec<Scalar>) -> Vec<Scalar> {
        for (pc, row) in &self.rows {
            if v[*pc].is_zero() {
                continue;
            }
            let f = v[*pc].clone();
            for (x, r) in v.iter_mut().zip(row) {
                if !r.is_zero() {
                    *x = &*x - &(&f * r);
                }
            }
        }
        v
    }

    /// Adds `v` if it is independent of what is already present.
    pub fn insert(&mut self, v: Vec<Scalar>) -> bool {
        let v = self.reduce(v);
        match v.iter().position(|x| !x.is_zero()) {
            None => false,
            Some(pc) => {
                let inv = v[pc].inverse().expect("nonzero pivot");
                self.rows.push((pc, v.iter().map(|x| x * &inv).collect()));
                true
            }
        }
    }

    pub fn contains(&self, v: Vec<Scalar>) -> bool {
        self.reduce(v).iter().all(Scalar::is_zero)
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }
}

/// Coordinates `c` with `sum_i c_i basis[i] = target`, if they exist.
pub fn span_coordinates(basis: &[Matrix], target: &Matrix) -> Result<Option<Vec<Scalar>>> {
    let mut all: Vec<Matrix> = basis.to_vec();
    all.push(target.clone());
    check_uniform(&all)?;
    let field = target.field.clone();
    let n = basis.len();
    let len = target.rows * target.cols;
    // Augmented system: one equation per entry, one unknown per basis matrix.
    let rows: Vec<Vec<Scalar>> = (0..len)
        .map(|e| {
            let mut row: Vec<Scalar> = basis.iter().map(|m| m.entries[e].clone()).collect();
            row.push(target.entries[e].clone());
            row
        })
        .collect();
    let echelon = field_echelon(rows, n + 1);
    if echelon.iter().any(|(c, _)| *c == n) {
        return Ok(None);
    }
    let mut x = vec![field.zero(); n];
    for (c, row) in &echelon {
        x[*c] = row[n].clone();
    }
    Ok(Some(x))
}

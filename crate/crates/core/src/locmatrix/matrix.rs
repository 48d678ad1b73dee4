use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::field::{Field, FieldTag};
use super::LocMatrixError;

/// A square matrix over `F`, stored row-major.
///
/// Arithmetic between matrices of different sizes panics; the public
/// operations of this module check dimensions before calling it.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Matrix<F> {
    n: usize,
    data: Vec<F>,
}

impl<F: Field> Matrix<F> {
    pub fn zero(n: usize) -> Self {
        Self { n, data: vec![F::zero(); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, |i, j| if i == j { F::one() } else { F::zero() })
    }

    /// The matrix unit `E_ij`.
    pub fn unit(n: usize, i: usize, j: usize) -> Self {
        Self::from_fn(n, |a, b| if (a, b) == (i, j) { F::one() } else { F::zero() })
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> F) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Self { n, data }
    }

    pub fn from_rows(rows: Vec<Vec<F>>) -> Result<Self, LocMatrixError> {
        let n = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != n) {
            return Err(LocMatrixError::Malformed(format!(
                "matrix with {n} rows has a row of length {}",
                bad.len()
            )));
        }
        Ok(Self { n, data: rows.into_iter().flatten().collect() })
    }

    /// Convenience for tests and examples: integer entries reduced into `F`.
    pub fn from_i64_rows(rows: &[&[i64]]) -> Result<Self, LocMatrixError> {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&v| F::from_i64(v)).collect()).collect())
    }

    /// Matrix whose columns are `cols`.
    pub fn from_columns(cols: &[Vec<F>]) -> Self {
        let n = cols.len();
        Self::from_fn(n, |i, j| cols[j][i].clone())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &F {
        &self.data[i * self.n + j]
    }

    pub fn rows(&self) -> Vec<Vec<F>> {
        self.data.chunks(self.n.max(1)).map(<[F]>::to_vec).collect()
    }

    pub fn column(&self, j: usize) -> Vec<F> {
        (0..self.n).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn entries(&self) -> &[F] {
        &self.data
    }

    fn same_size(&self, other: &Self) {
        assert_eq!(self.n, other.n, "matrix size mismatch");
    }

    pub fn add(&self, other: &Self) -> Self {
        self.same_size(other);
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a.add(b)).collect();
        Self { n: self.n, data }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.same_size(other);
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a.sub(b)).collect();
        Self { n: self.n, data }
    }

    pub fn scale(&self, c: &F) -> Self {
        Self { n: self.n, data: self.data.iter().map(|a| a.mul(c)).collect() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.same_size(other);
        let n = self.n;
        let mut data = vec![F::zero(); n * n];
        for i in 0..n {
            for k in 0..n {
                let a = &self.data[i * n + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = &other.data[k * n + j];
                    if !b.is_zero() {
                        data[i * n + j] = data[i * n + j].add(&a.mul(b));
                    }
                }
            }
        }
        Self { n, data }
    }

    /// Kronecker product; entry `(i·m + k, j·m + l)` is `a_ij · b_kl`.
    pub fn kron(&self, other: &Self) -> Self {
        let m = other.n;
        Self::from_fn(self.n * m, |r, c| {
            self.get(r / m, c / m).mul(other.get(r % m, c % m))
        })
    }

    pub fn trace(&self) -> F {
        (0..self.n).fold(F::zero(), |acc, i| acc.add(self.get(i, i)))
    }

    /// `tr(self · other)` without forming the product.
    pub fn trace_of_product(&self, other: &Self) -> F {
        self.same_size(other);
        let n = self.n;
        let mut acc = F::zero();
        for i in 0..n {
            for k in 0..n {
                let a = &self.data[i * n + k];
                if !a.is_zero() {
                    acc = acc.add(&a.mul(&other.data[k * n + i]));
                }
            }
        }
        acc
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(F::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.n)
    }

    pub fn is_idempotent(&self) -> bool {
        self.mul(self) == *self
    }

    /// Rank by row reduction.
    pub fn rank(&self) -> usize {
        let mut rows = self.rows();
        rref(&mut rows, self.n).len()
    }

    pub fn inverse(&self) -> Option<Self> {
        let n = self.n;
        let mut aug: Vec<Vec<F>> = self
            .rows()
            .into_iter()
            .enumerate()
            .map(|(i, mut row)| {
                row.extend((0..n).map(|j| if i == j { F::one() } else { F::zero() }));
                row
            })
            .collect();
        let pivots = rref(&mut aug, n);
        if pivots.len() < n {
            return None;
        }
        Some(Self::from_fn(n, |i, j| aug[i][n + j].clone()))
    }

    pub fn is_invertible(&self) -> bool {
        self.rank() == self.n
    }

    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        Self::from_fn(n, |_, _| F::random_small(rng))
    }

    pub fn random_invertible<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        loop {
            let m = Self::random(n, rng);
            if m.is_invertible() {
                return m;
            }
        }
    }

    /// The `index`-th matrix in lexicographic entry order (row-major, first
    /// entry most significant) over a finite field of order `q`.
    pub fn from_lex_index(n: usize, q: u64, mut index: u64) -> Self {
        let mut data = vec![F::zero(); n * n];
        for slot in data.iter_mut().rev() {
            *slot = F::from_index(index % q);
            index /= q;
        }
        Self { n, data }
    }

    /// Inverse of [`Matrix::from_lex_index`].
    pub fn lex_index(&self, q: u64) -> u64 {
        self.data.iter().fold(0, |acc, a| acc * q + a.index())
    }
}

/// Reduces `rows` (each of length at least `cols`) to reduced row echelon
/// form in the first `cols` columns and returns the pivot columns.
pub fn rref<F: Field>(rows: &mut [Vec<F>], cols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][c].inv().expect("nonzero pivot");
        for x in rows[r].iter_mut() {
            *x = x.mul(&inv);
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, p) in row.iter_mut().zip(&pivot_row) {
                *x = x.sub(&f.mul(p));
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Basis of `{v : A v = 0}` for `A` given by its rows over `cols` unknowns.
pub fn nullspace<F: Field>(mut rows: Vec<Vec<F>>, cols: usize) -> Vec<Vec<F>> {
    let pivots = rref(&mut rows, cols);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![F::zero(); cols];
            v[f] = F::one();
            for (r, &p) in pivots.iter().enumerate() {
                v[p] = rows[r][f].neg();
            }
            v
        })
        .collect()
}

impl<F: Field> fmt::Display for Matrix<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cells: Vec<String> = self.data.iter().map(ToString::to_string).collect();
        let width = cells.iter().map(String::len).max().unwrap_or(1);
        for (i, row) in cells.chunks(self.n.max(1)).enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            let line: Vec<String> = row.iter().map(|c| format!("{c:>width$}")).collect();
            write!(f, "[{}]", line.join(" "))?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixJson {
    field: FieldTag,
    n: usize,
    rows: Vec<Vec<Value>>,
}

impl<F: Field> Serialize for Matrix<F> {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        MatrixJson {
            field: F::TAG,
            n: self.n,
            rows: self.rows().iter().map(|r| r.iter().map(F::to_json).collect()).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de, F: Field> Deserialize<'de> for Matrix<F> {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let raw = MatrixJson::deserialize(deserializer)?;
        if raw.field != F::TAG {
            return Err(D::Error::custom(format!(
                "matrix is over {} but {} was expected",
                raw.field,
                F::TAG
            )));
        }
        if raw.rows.len() != raw.n {
            return Err(D::Error::custom(format!(
                "declared n = {} but found {} rows",
                raw.n,
                raw.rows.len()
            )));
        }
        let rows = raw
            .rows
            .iter()
            .map(|r| r.iter().map(F::from_json).collect::<Result<Vec<F>, String>>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(D::Error::custom)?;
        Matrix::from_rows(rows).map_err(D::Error::custom)
    }
}

//! Dense exact matrices over Q and F_p.
//!
//! All canonical forms are derived from the reduced row-echelon form: kernel
//! bases set free variables to one-hot values, image bases are the reduced
//! column-echelon form of the column space, and particular solutions of linear
//! systems set every free variable to zero. Outputs therefore depend only on
//! the input entries, never on call history.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_rational::BigRational;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::field::{FieldSpec, FpOps, Ops, QOps, Scalar};

#[derive(Clone, PartialEq, Eq, Hash)]
enum Entries {
    Rational(Vec<BigRational>),
    Modular(Vec<u32>),
}

trait Store: Ops {
    fn wrap(&self, v: Vec<Self::E>) -> Entries;
}

impl Store for QOps {
    fn wrap(&self, v: Vec<BigRational>) -> Entries {
        Entries::Rational(v)
    }
}

impl Store for FpOps {
    fn wrap(&self, v: Vec<u32>) -> Entries {
        Entries::Modular(v)
    }
}

macro_rules! with_ops {
    ($m:expr, |$ops:ident, $v:ident| $body:expr) => {
        match &$m.entries {
            Entries::Rational($v) => {
                let $ops = QOps;
                $body
            }
            Entries::Modular($v) => {
                let $ops = FpOps {
                    p: $m
                        .field
                        .modulus()
                        .expect("modular entries over a prime field"),
                };
                $body
            }
        }
    };
}

macro_rules! with_ops2 {
    ($a:expr, $b:expr, |$ops:ident, $x:ident, $y:ident| $body:expr) => {
        match (&$a.entries, &$b.entries) {
            (Entries::Rational($x), Entries::Rational($y)) => {
                let $ops = QOps;
                $body
            }
            (Entries::Modular($x), Entries::Modular($y)) => {
                let $ops = FpOps {
                    p: $a
                        .field
                        .modulus()
                        .expect("modular entries over a prime field"),
                };
                $body
            }
            _ => unreachable!("field agreement is checked by the caller"),
        }
    };
}

/// A rectangular matrix with exact entries, stored row-major.
///
/// Matrices with zero rows or zero columns are legal and stand for maps into
/// or out of the zero space.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    field: FieldSpec,
    rows: usize,
    cols: usize,
    entries: Entries,
}

impl Matrix {
    pub fn zeros(field: FieldSpec, rows: usize, cols: usize) -> Matrix {
        let entries = match field {
            FieldSpec::Rationals => Entries::Rational(vec![QOps.zero(); rows * cols]),
            FieldSpec::Prime(_) => Entries::Modular(vec![0; rows * cols]),
        };
        Matrix {
            field,
            rows,
            cols,
            entries,
        }
    }

    pub fn identity(field: FieldSpec, n: usize) -> Matrix {
        Matrix::from_fn(
            field,
            n,
            n,
            |r, c| {
                if r == c {
                    field.one()
                } else {
                    field.zero()
                }
            },
        )
    }

    /// Builds a matrix from row-major integer data, reducing modulo p over a
    /// prime field.
    pub fn from_i64(field: FieldSpec, rows: usize, cols: usize, data: &[i64]) -> Matrix {
        assert_eq!(data.len(), rows * cols, "entry count must be rows * cols");
        Matrix::from_fn(field, rows, cols, |r, c| field.from_i64(data[r * cols + c]))
    }

    /// Builds a matrix from nested integer rows. Only usable for matrices with
    /// at least one row; use [`Matrix::from_i64`] for the `0 x n` case.
    pub fn from_rows(field: FieldSpec, rows: &[&[i64]]) -> Matrix {
        let cols = rows.first().map_or(0, |r| r.len());
        let data: Vec<i64> = rows
            .iter()
            .flat_map(|r| {
                assert_eq!(r.len(), cols, "ragged rows");
                r.iter().copied()
            })
            .collect();
        Matrix::from_i64(field, rows.len(), cols, &data)
    }

    pub fn from_fn(
        field: FieldSpec,
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> Scalar,
    ) -> Matrix {
        let mut scalars = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                scalars.push(f(r, c));
            }
        }
        Matrix::from_scalars(field, rows, cols, &scalars)
    }

    pub fn from_scalars(field: FieldSpec, rows: usize, cols: usize, data: &[Scalar]) -> Matrix {
        assert_eq!(data.len(), rows * cols);
        let entries = match field {
            FieldSpec::Rationals => {
                Entries::Rational(data.iter().map(|s| QOps.from_scalar(s)).collect())
            }
            FieldSpec::Prime(p) => {
                let ops = FpOps { p };
                Entries::Modular(data.iter().map(|s| ops.from_scalar(s)).collect())
            }
        };
        Matrix {
            field,
            rows,
            cols,
            entries,
        }
    }

    /// Column vector from scalars.
    pub fn column(field: FieldSpec, data: &[Scalar]) -> Matrix {
        Matrix::from_scalars(field, data.len(), 1, data)
    }

    /// The `i`-th standard basis column of length `n`.
    pub fn unit_column(field: FieldSpec, n: usize, i: usize) -> Matrix {
        Matrix::from_fn(
            field,
            n,
            1,
            |r, _| {
                if r == i {
                    field.one()
                } else {
                    field.zero()
                }
            },
        )
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entry(&self, r: usize, c: usize) -> Scalar {
        assert!(r < self.rows && c < self.cols, "entry out of range");
        with_ops!(self, |ops, v| ops.to_scalar(&v[r * self.cols + c]))
    }

    /// Entries in row-major order.
    pub fn to_scalars(&self) -> Vec<Scalar> {
        with_ops!(self, |ops, v| v.iter().map(|e| ops.to_scalar(e)).collect())
    }

    pub fn is_zero(&self) -> bool {
        with_ops!(self, |ops, v| v.iter().all(|e| ops.is_zero(e)))
    }

    pub fn is_identity(&self) -> bool {
        self.is_square() && *self == Matrix::identity(self.field, self.rows)
    }

    fn check_field(&self, other: &Matrix) -> Result<()> {
        self.field.check_same(&other.field)
    }

    pub fn try_mul(&self, other: &Matrix) -> Result<Matrix> {
        self.check_field(other)?;
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let (n, k, m) = (self.rows, self.cols, other.cols);
        let entries = with_ops2!(self, other, |ops, a, b| {
            let mut out = vec![ops.zero(); n * m];
            for i in 0..n {
                for l in 0..k {
                    let x = &a[i * k + l];
                    if ops.is_zero(x) {
                        continue;
                    }
                    for j in 0..m {
                        let prod = ops.mul(x, &b[l * m + j]);
                        out[i * m + j] = ops.add(&out[i * m + j], &prod);
                    }
                }
            }
            ops.wrap(out)
        });
        Ok(Matrix {
            field: self.field,
            rows: n,
            cols: m,
            entries,
        })
    }

    fn elementwise(&self, other: &Matrix, subtract: bool) -> Result<Matrix> {
        self.check_field(other)?;
        if self.shape() != other.shape() {
            return Err(Error::DimensionMismatch(format!(
                "cannot combine {}x{} with {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let entries = with_ops2!(self, other, |ops, a, b| {
            let out = a
                .iter()
                .zip(b.iter())
                .map(|(x, y)| {
                    if subtract {
                        ops.sub(x, y)
                    } else {
                        ops.add(x, y)
                    }
                })
                .collect();
            ops.wrap(out)
        });
        Ok(Matrix {
            field: self.field,
            rows: self.rows,
            cols: self.cols,
            entries,
        })
    }

    pub fn try_add(&self, other: &Matrix) -> Result<Matrix> {
        self.elementwise(other, false)
    }

    pub fn try_sub(&self, other: &Matrix) -> Result<Matrix> {
        self.elementwise(other, true)
    }

    pub fn scale(&self, s: &Scalar) -> Matrix {
        let entries = with_ops!(self, |ops, v| {
            let c = ops.from_scalar(s);
            ops.wrap(v.iter().map(|e| ops.mul(e, &c)).collect())
        });
        Matrix {
            field: self.field,
            rows: self.rows,
            cols: self.cols,
            entries,
        }
    }

    /// `sum_i coeffs[i] * mats[i]`; all matrices must share a shape.
    pub fn linear_combination(
        field: FieldSpec,
        rows: usize,
        cols: usize,
        coeffs: &[Scalar],
        mats: &[&Matrix],
    ) -> Result<Matrix> {
        assert_eq!(coeffs.len(), mats.len());
        let mut acc = Matrix::zeros(field, rows, cols);
        for (c, m) in coeffs.iter().zip(mats) {
            if c.is_zero() {
                continue;
            }
            acc = acc.try_add(&m.scale(c))?;
        }
        Ok(acc)
    }

    pub fn transpose(&self) -> Matrix {
        let entries = with_ops!(self, |ops, v| {
            let mut out = Vec::with_capacity(v.len());
            for c in 0..self.cols {
                for r in 0..self.rows {
                    #[allow(clippy::clone_on_copy)]
                    out.push(v[r * self.cols + c].clone());
                }
            }
            ops.wrap(out)
        });
        Matrix {
            field: self.field,
            rows: self.cols,
            cols: self.rows,
            entries,
        }
    }

    /// Rows `r0..r1` and columns `c0..c1`.
    pub fn submatrix(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> Matrix {
        assert!(r0 <= r1 && r1 <= self.rows && c0 <= c1 && c1 <= self.cols);
        Matrix::from_fn(self.field, r1 - r0, c1 - c0, |r, c| {
            self.entry(r0 + r, c0 + c)
        })
    }

    pub fn select_columns(&self, cols: &[usize]) -> Matrix {
        Matrix::from_fn(self.field, self.rows, cols.len(), |r, c| {
            self.entry(r, cols[c])
        })
    }

    pub fn select_rows(&self, rows: &[usize]) -> Matrix {
        Matrix::from_fn(self.field, rows.len(), self.cols, |r, c| {
            self.entry(rows[r], c)
        })
    }

    /// Side-by-side concatenation `[m_1 | m_2 | ...]`. The row count must be
    /// given explicitly so that an empty list is meaningful.
    pub fn hstack(field: FieldSpec, rows: usize, mats: &[&Matrix]) -> Result<Matrix> {
        for m in mats {
            field.check_same(&m.field)?;
            if m.rows != rows {
                return Err(Error::DimensionMismatch(format!(
                    "hstack of a {}-row block into {rows} rows",
                    m.rows
                )));
            }
        }
        let cols: usize = mats.iter().map(|m| m.cols).sum();
        let mut offsets = Vec::with_capacity(cols);
        for (i, m) in mats.iter().enumerate() {
            offsets.extend((0..m.cols).map(|c| (i, c)));
        }
        Ok(Matrix::from_fn(field, rows, cols, |r, c| {
            let (i, cc) = offsets[c];
            mats[i].entry(r, cc)
        }))
    }

    /// Vertical concatenation.
    pub fn vstack(field: FieldSpec, cols: usize, mats: &[&Matrix]) -> Result<Matrix> {
        let transposed: Vec<Matrix> = mats.iter().map(|m| m.transpose()).collect();
        let refs: Vec<&Matrix> = transposed.iter().collect();
        Ok(Matrix::hstack(field, cols, &refs)?.transpose())
    }

    /// Block-diagonal direct sum.
    pub fn block_diag(field: FieldSpec, mats: &[&Matrix]) -> Result<Matrix> {
        for m in mats {
            field.check_same(&m.field)?;
        }
        let rows: usize = mats.iter().map(|m| m.rows).sum();
        let cols: usize = mats.iter().map(|m| m.cols).sum();
        let mut out = Matrix::zeros(field, rows, cols).to_scalars();
        let (mut r0, mut c0) = (0, 0);
        for m in mats {
            for r in 0..m.rows {
                for c in 0..m.cols {
                    out[(r0 + r) * cols + c0 + c] = m.entry(r, c);
                }
            }
            r0 += m.rows;
            c0 += m.cols;
        }
        Ok(Matrix::from_scalars(field, rows, cols, &out))
    }

    /// Kronecker product; with row-major vectorisation,
    /// `vec(A X B) = kron(A, B^T) vec(X)`.
    pub fn kron(&self, other: &Matrix) -> Result<Matrix> {
        self.check_field(other)?;
        let (r2, c2) = other.shape();
        Ok(Matrix::from_fn(
            self.field,
            self.rows * r2,
            self.cols * c2,
            |r, c| {
                let a = self.entry(r / r2, c / c2);
                if a.is_zero() {
                    return a;
                }
                let b = other.entry(r % r2, c % c2);
                match (a, b) {
                    (Scalar::Rational(x), Scalar::Rational(y)) => Scalar::Rational(x * y),
                    (Scalar::Modular(x), Scalar::Modular(y)) => {
                        let p = self.field.modulus().expect("prime field");
                        Scalar::Modular(x * y % p)
                    }
                    _ => unreachable!("field checked above"),
                }
            },
        ))
    }

    /// Assembles a block matrix from a grid of optional blocks; missing
    /// blocks are zero.
    pub fn from_blocks(
        field: FieldSpec,
        row_sizes: &[usize],
        col_sizes: &[usize],
        blocks: &[Vec<Option<Matrix>>],
    ) -> Result<Matrix> {
        let cols: usize = col_sizes.iter().sum();
        let mut row_strips = Vec::with_capacity(row_sizes.len());
        for (i, &rs) in row_sizes.iter().enumerate() {
            let parts: Vec<Matrix> = col_sizes
                .iter()
                .enumerate()
                .map(|(j, &cs)| match &blocks[i][j] {
                    Some(b) if b.shape() == (rs, cs) => Ok(b.clone()),
                    Some(b) => Err(Error::DimensionMismatch(format!(
                        "block ({i},{j}) is {}x{}, expected {rs}x{cs}",
                        b.rows, b.cols
                    ))),
                    None => Ok(Matrix::zeros(field, rs, cs)),
                })
                .collect::<Result<_>>()?;
            let refs: Vec<&Matrix> = parts.iter().collect();
            row_strips.push(Matrix::hstack(field, rs, &refs)?);
        }
        let refs: Vec<&Matrix> = row_strips.iter().collect();
        Matrix::vstack(field, cols, &refs)
    }

    /// Reduced row-echelon form together with the pivot columns.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let (entries, pivots) = with_ops!(self, |ops, v| {
            let (out, pivots) = rref_impl(ops, v.clone(), self.rows, self.cols);
            (ops.wrap(out), pivots)
        });
        (
            Matrix {
                field: self.field,
                rows: self.rows,
                cols: self.cols,
                entries,
            },
            pivots,
        )
    }

    pub fn rank(&self) -> usize {
        with_ops!(self, |ops, v| rank_impl(
            ops,
            v.clone(),
            self.rows,
            self.cols
        ))
    }

    /// Basis of the right kernel, as columns. One column per free variable,
    /// with that variable set to one and the other free variables to zero.
    pub fn kernel_basis(&self) -> Matrix {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let field = self.field;
        Matrix::from_fn(field, self.cols, free.len(), |row, k| {
            let j = free[k];
            if row == j {
                return field.one();
            }
            match pivots.iter().position(|&p| p == row) {
                Some(pi) => negate(field, &r.entry(pi, j)),
                None => field.zero(),
            }
        })
    }

    /// Basis of the column space in reduced column-echelon form; equal column
    /// spaces give identical bases.
    pub fn image_basis(&self) -> Matrix {
        let (r, pivots) = self.transpose().rref();
        r.submatrix(0, pivots.len(), 0, self.rows).transpose()
    }

    /// A particular solution `x` of `self * x = b`, or `None` when the system
    /// is inconsistent. Free variables are set to zero.
    pub fn solve(&self, b: &Matrix) -> Result<Option<Matrix>> {
        self.check_field(b)?;
        if self.rows != b.rows {
            return Err(Error::DimensionMismatch(format!(
                "system with {} equations but right-hand side of {} rows",
                self.rows, b.rows
            )));
        }
        let aug = Matrix::hstack(self.field, self.rows, &[self, b])?;
        let (r, pivots) = aug.rref();
        if pivots.iter().any(|&p| p >= self.cols) {
            return Ok(None);
        }
        let field = self.field;
        let mut x = vec![field.zero(); self.cols * b.cols];
        for (k, &p) in pivots.iter().enumerate() {
            for j in 0..b.cols {
                x[p * b.cols + j] = r.entry(k, self.cols + j);
            }
        }
        Ok(Some(Matrix::from_scalars(field, self.cols, b.cols, &x)))
    }

    /// A solution `x` of `x * self = b`, or `None`.
    pub fn solve_left(&self, b: &Matrix) -> Result<Option<Matrix>> {
        Ok(self
            .transpose()
            .solve(&b.transpose())?
            .map(|x| x.transpose()))
    }

    pub fn is_invertible(&self) -> bool {
        self.is_square() && self.rank() == self.rows
    }

    pub fn inverse(&self) -> Option<Matrix> {
        if !self.is_invertible() {
            return None;
        }
        self.solve(&Matrix::identity(self.field, self.rows))
            .ok()
            .flatten()
    }

    pub fn is_injective(&self) -> bool {
        self.rank() == self.cols
    }

    pub fn is_surjective(&self) -> bool {
        self.rank() == self.rows
    }

    /// Matrix power for square matrices.
    pub fn pow(&self, e: u32) -> Matrix {
        assert!(self.is_square());
        let mut acc = Matrix::identity(self.field, self.rows);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// JSON literal: an array of rows.
    pub fn to_json(&self) -> Value {
        Value::Array(
            (0..self.rows)
                .map(|r| Value::Array((0..self.cols).map(|c| self.entry(r, c).to_json()).collect()))
                .collect(),
        )
    }

    /// Parses a JSON matrix literal of a known shape. The shape is needed
    /// because `[]` alone cannot express the column count of a `0 x n` matrix.
    pub fn from_json(v: &Value, field: FieldSpec, rows: usize, cols: usize) -> Result<Matrix> {
        let bad = |msg: String| Error::InvalidInput(msg);
        let arr = v
            .as_array()
            .ok_or_else(|| bad(format!("matrix literal must be an array, got {v}")))?;
        if arr.len() != rows {
            return Err(bad(format!(
                "expected {rows} rows, matrix literal has {}",
                arr.len()
            )));
        }
        let mut data = Vec::with_capacity(rows * cols);
        for row in arr {
            let row = row
                .as_array()
                .ok_or_else(|| bad(format!("matrix row must be an array, got {row}")))?;
            if row.len() != cols {
                return Err(bad(format!(
                    "expected {cols} columns, row has {}",
                    row.len()
                )));
            }
            for x in row {
                data.push(field.parse_scalar(x)?);
            }
        }
        Ok(Matrix::from_scalars(field, rows, cols, &data))
    }
}

fn negate(field: FieldSpec, s: &Scalar) -> Scalar {
    match field {
        FieldSpec::Rationals => QOps.to_scalar(&QOps.neg(&QOps.from_scalar(s))),
        FieldSpec::Prime(p) => {
            let ops = FpOps { p };
            ops.to_scalar(&ops.neg(&ops.from_scalar(s)))
        }
    }
}

fn rref_impl<O: Ops>(
    ops: O,
    mut m: Vec<O::E>,
    rows: usize,
    cols: usize,
) -> (Vec<O::E>, Vec<usize>) {
    let mut pivots = Vec::new();
    let mut pr = 0;
    for c in 0..cols {
        if pr == rows {
            break;
        }
        let Some(sel) = (pr..rows).find(|&r| !ops.is_zero(&m[r * cols + c])) else {
            continue;
        };
        if sel != pr {
            for j in 0..cols {
                m.swap(sel * cols + j, pr * cols + j);
            }
        }
        let inv = ops.inv(&m[pr * cols + c]);
        for j in c..cols {
            m[pr * cols + j] = ops.mul(&m[pr * cols + j], &inv);
        }
        for r in 0..rows {
            if r == pr {
                continue;
            }
            let factor = m[r * cols + c].clone();
            if ops.is_zero(&factor) {
                continue;
            }
            for j in c..cols {
                let t = ops.mul(&factor, &m[pr * cols + j]);
                m[r * cols + j] = ops.sub(&m[r * cols + j], &t);
            }
        }
        pivots.push(c);
        pr += 1;
    }
    (m, pivots)
}

fn rank_impl<O: Ops>(ops: O, mut m: Vec<O::E>, rows: usize, cols: usize) -> usize {
    // forward elimination only
    let mut pr = 0;
    for c in 0..cols {
        if pr == rows {
            break;
        }
        let Some(sel) = (pr..rows).find(|&r| !ops.is_zero(&m[r * cols + c])) else {
            continue;
        };
        if sel != pr {
            for j in 0..cols {
                m.swap(sel * cols + j, pr * cols + j);
            }
        }
        let inv = ops.inv(&m[pr * cols + c]);
        for r in pr + 1..rows {
            let factor = ops.mul(&m[r * cols + c], &inv);
            if ops.is_zero(&factor) {
                continue;
            }
            for j in c..cols {
                let t = ops.mul(&factor, &m[pr * cols + j]);
                m[r * cols + j] = ops.sub(&m[r * cols + j], &t);
            }
        }
        pr += 1;
    }
    pr
}

impl Mul for &Matrix {
    type Output = Matrix;

    fn mul(self, rhs: &Matrix) -> Matrix {
        self.try_mul(rhs)
            .expect("matrix product shape or field mismatch")
    }
}

impl Add for &Matrix {
    type Output = Matrix;

    fn add(self, rhs: &Matrix) -> Matrix {
        self.try_add(rhs)
            .expect("matrix sum shape or field mismatch")
    }
}

impl Sub for &Matrix {
    type Output = Matrix;

    fn sub(self, rhs: &Matrix) -> Matrix {
        self.try_sub(rhs)
            .expect("matrix difference shape or field mismatch")
    }
}

impl Neg for &Matrix {
    type Output = Matrix;

    fn neg(self) -> Matrix {
        self.scale(&negate(self.field, &self.field.one()))
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Matrix<{}>{}x{}{}",
            self.field, self.rows, self.cols, self
        )
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for r in 0..self.rows {
            if r > 0 {
                write!(f, "; ")?;
            }
            for c in 0..self.cols {
                if c > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", self.entry(r, c))?;
            }
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    const Q: FieldSpec = FieldSpec::Rationals;
    const F2: FieldSpec = FieldSpec::Prime(2);
    const F5: FieldSpec = FieldSpec::Prime(5);

    #[test]
    fn rref_identity() {
        let id = Matrix::identity(Q, 2);
        let (r, p) = id.rref();
        assert_eq!(r, id);
        assert_eq!(p, vec![0, 1]);
    }

    #[test]
    fn rref_nilpotent_block() {
        let m = Matrix::from_rows(Q, &[&[0, 0], &[1, 0]]);
        let (r, p) = m.rref();
        assert_eq!(r, Matrix::from_rows(Q, &[&[1, 0], &[0, 0]]));
        assert_eq!(p, vec![0]);
    }

    #[test]
    fn rref_mod_five() {
        let m = Matrix::from_rows(F5, &[&[2, 4], &[1, 2]]);
        let (r, p) = m.rref();
        assert_eq!(r, Matrix::from_rows(F5, &[&[1, 2], &[0, 0]]));
        assert_eq!(p, vec![0]);
    }

    #[test]
    fn kernel_examples() {
        let m = Matrix::from_rows(Q, &[&[0, 0], &[1, 0]]);
        assert_eq!(m.kernel_basis(), Matrix::from_rows(Q, &[&[0], &[1]]));
        assert_eq!(Matrix::identity(Q, 3).kernel_basis().cols(), 0);
        let m = Matrix::from_rows(F2, &[&[1, 1], &[1, 1]]);
        assert_eq!(m.kernel_basis(), Matrix::from_rows(F2, &[&[1], &[1]]));
    }

    #[test]
    fn image_examples() {
        assert_eq!(Matrix::zeros(Q, 2, 3).image_basis().shape(), (2, 0));
        let m = Matrix::from_rows(Q, &[&[0, 0], &[1, 0]]);
        assert_eq!(m.image_basis(), Matrix::from_rows(Q, &[&[0], &[1]]));
        let m = Matrix::from_rows(Q, &[&[1, 2], &[2, 4]]);
        assert_eq!(m.image_basis(), Matrix::from_rows(Q, &[&[1], &[2]]));
    }

    #[test]
    fn solve_examples() {
        let b = Matrix::from_rows(Q, &[&[3, 1], &[-2, 7]]);
        assert_eq!(Matrix::identity(Q, 2).solve(&b).unwrap(), Some(b));
        let a = Matrix::from_rows(Q, &[&[0, 0], &[1, 0]]);
        let b = Matrix::from_rows(Q, &[&[1], &[0]]);
        assert_eq!(a.solve(&b).unwrap(), None);
        let a = Matrix::from_rows(F2, &[&[1, 1]]);
        let b = Matrix::from_rows(F2, &[&[1]]);
        assert_eq!(
            a.solve(&b).unwrap(),
            Some(Matrix::from_rows(F2, &[&[1], &[0]]))
        );
    }

    #[test]
    fn solve_rejects_mismatches() {
        let a = Matrix::identity(Q, 2);
        assert!(matches!(
            a.solve(&Matrix::zeros(Q, 3, 1)),
            Err(Error::DimensionMismatch(_))
        ));
        assert!(matches!(
            a.solve(&Matrix::zeros(F2, 2, 1)),
            Err(Error::FieldMismatch(..))
        ));
    }

    #[test]
    fn zero_dimensional_matrices() {
        let a = Matrix::zeros(Q, 0, 3);
        let b = Matrix::zeros(Q, 3, 2);
        assert_eq!((&a * &b).shape(), (0, 2));
        assert_eq!(a.kernel_basis(), Matrix::identity(Q, 3));
        assert_eq!(a.rank(), 0);
        let e = Matrix::zeros(Q, 0, 0);
        assert!(e.is_invertible());
        assert_eq!(a.to_json(), json!([]));
        assert_eq!(Matrix::from_json(&json!([]), Q, 0, 3).unwrap(), a);
        let tall = Matrix::zeros(Q, 2, 0);
        assert_eq!(tall.to_json(), json!([[], []]));
    }

    #[test]
    fn rationals_stay_in_lowest_terms() {
        let m = Matrix::from_rows(Q, &[&[2, 4], &[3, 5]]);
        let inv = m.inverse().unwrap();
        assert_eq!(inv.to_json(), json!([["-5/2", 2], ["3/2", -1]]));
        assert!((&m * &inv).is_identity());
    }

    #[test]
    fn json_round_trip_checks_shape() {
        let v = json!([["1/2", 3], [0, "-7/4"]]);
        let m = Matrix::from_json(&v, Q, 2, 2).unwrap();
        assert_eq!(m.to_json(), v);
        assert!(Matrix::from_json(&v, Q, 2, 3).is_err());
        assert!(Matrix::from_json(&json!([[1, 2]]), F2, 1, 2).is_err());
    }

    #[test]
    fn stacking_and_block_diag() {
        let a = Matrix::from_rows(Q, &[&[1, 2]]);
        let b = Matrix::from_rows(Q, &[&[3]]);
        let h = Matrix::hstack(Q, 1, &[&a, &b]).unwrap();
        assert_eq!(h, Matrix::from_rows(Q, &[&[1, 2, 3]]));
        let d = Matrix::block_diag(Q, &[&a, &b]).unwrap();
        assert_eq!(d, Matrix::from_rows(Q, &[&[1, 2, 0], &[0, 0, 3]]));
        let v = Matrix::vstack(Q, 2, &[&a, &a]).unwrap();
        assert_eq!(v, Matrix::from_rows(Q, &[&[1, 2], &[1, 2]]));
    }
}

//! Dense exact matrices.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use thiserror::Error;

use crate::field::{Field, FieldElement, FieldError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatrixError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is singular")]
    Singular,
    #[error("matrix is not square ({0}x{1})")]
    NotSquare(usize, usize),
    #[error("similarity witness check failed: T * T^-1 != I")]
    BadWitness,
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Row-major dense matrix over a single field. Zero-sized dimensions are legal.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    field: Field,
    rows: usize,
    cols: usize,
    data: Vec<FieldElement>,
}

/// Column vectors are plain entry lists.
pub type Vector = Vec<FieldElement>;

impl Matrix {
    pub fn new(
        field: Field,
        rows: usize,
        cols: usize,
        data: Vec<FieldElement>,
    ) -> Result<Matrix, MatrixError> {
        if data.len() != rows * cols {
            return Err(MatrixError::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if let Some(bad) = data.iter().find(|x| x.field() != field) {
            return Err(FieldError::MixedFields(field, bad.field()).into());
        }
        Ok(Matrix { field, rows, cols, data })
    }

    /// Build from small integers, row-major. Panics on a length mismatch.
    pub fn from_ints(field: Field, rows: usize, cols: usize, values: &[i64]) -> Matrix {
        assert_eq!(values.len(), rows * cols, "from_ints: wrong entry count");
        Matrix {
            field,
            rows,
            cols,
            data: values.iter().map(|&v| field.from_i64(v)).collect(),
        }
    }

    pub fn from_rows(field: Field, rows: Vec<Vec<FieldElement>>) -> Result<Matrix, MatrixError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(MatrixError::DimensionMismatch("ragged rows".into()));
        }
        Matrix::new(field, r, c, rows.into_iter().flatten().collect())
    }

    /// The matrix whose columns are `cols`, each of length `rows`.
    pub fn from_columns(field: Field, rows: usize, cols: &[Vector]) -> Matrix {
        let mut m = Matrix::zero(field, rows, cols.len());
        for (j, col) in cols.iter().enumerate() {
            assert_eq!(col.len(), rows, "from_columns: column length");
            for (i, x) in col.iter().enumerate() {
                m.set(i, j, x.clone());
            }
        }
        m
    }

    pub fn zero(field: Field, rows: usize, cols: usize) -> Matrix {
        Matrix {
            field,
            rows,
            cols,
            data: vec![field.zero(); rows * cols],
        }
    }

    pub fn identity(field: Field, n: usize) -> Matrix {
        Matrix::scalar(field, n, &field.one())
    }

    pub fn scalar(field: Field, n: usize, s: &FieldElement) -> Matrix {
        let mut m = Matrix::zero(field, n, n);
        for i in 0..n {
            m.set(i, i, s.clone());
        }
        m
    }

    pub fn diagonal(field: Field, diag: &[FieldElement]) -> Matrix {
        let mut m = Matrix::zero(field, diag.len(), diag.len());
        for (i, d) in diag.iter().enumerate() {
            m.set(i, i, d.clone());
        }
        m
    }

    /// The nilpotent Jordan block `J_n(0)`: ones on the superdiagonal.
    pub fn jordan_nilpotent(field: Field, n: usize) -> Matrix {
        let mut m = Matrix::zero(field, n, n);
        for i in 1..n {
            m.set(i - 1, i, field.one());
        }
        m
    }

    /// `J_n(lambda) = lambda I + J_n(0)`.
    pub fn jordan_block(field: Field, n: usize, lambda: &FieldElement) -> Matrix {
        &Matrix::scalar(field, n, lambda) + &Matrix::jordan_nilpotent(field, n)
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[FieldElement] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> &FieldElement {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: FieldElement) {
        debug_assert_eq!(x.field(), self.field);
        self.data[i * self.cols + j] = x;
    }

    pub fn row(&self, i: usize) -> Vector {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn column(&self, j: usize) -> Vector {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vector> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vector> {
        (0..self.rows).map(|i| self.row(i)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(FieldElement::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    let x = self.get(i, j);
                    if i == j {
                        x.is_one()
                    } else {
                        x.is_zero()
                    }
                })
            })
    }

    fn require_square(&self) -> Result<usize, MatrixError> {
        if self.is_square() {
            Ok(self.rows)
        } else {
            Err(MatrixError::NotSquare(self.rows, self.cols))
        }
    }

    fn same_shape(&self, other: &Matrix, op: &str) -> Result<(), MatrixError> {
        if self.field != other.field {
            return Err(FieldError::MixedFields(self.field, other.field).into());
        }
        if self.rows != other.rows || self.cols != other.cols {
            return Err(MatrixError::DimensionMismatch(format!(
                "{op}: {}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Matrix) -> Result<Matrix, MatrixError> {
        self.same_shape(other, "add")?;
        Ok(self.zip_with(other, |x, y| x + y))
    }

    pub fn checked_sub(&self, other: &Matrix) -> Result<Matrix, MatrixError> {
        self.same_shape(other, "sub")?;
        Ok(self.zip_with(other, |x, y| x - y))
    }

    fn zip_with(&self, other: &Matrix, f: impl Fn(&FieldElement, &FieldElement) -> FieldElement) -> Matrix {
        Matrix {
            field: self.field,
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(x, y)| f(x, y)).collect(),
        }
    }

    pub fn checked_mul(&self, other: &Matrix) -> Result<Matrix, MatrixError> {
        if self.field != other.field {
            return Err(FieldError::MixedFields(self.field, other.field).into());
        }
        if self.cols != other.rows {
            return Err(MatrixError::DimensionMismatch(format!(
                "mul: {}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Matrix::zero(self.field, self.rows, other.cols);
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
                    let idx = i * out.cols + j;
                    out.data[idx] = &out.data[idx] + &(a * b);
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[FieldElement]) -> Vector {
        assert_eq!(self.cols, v.len(), "mul_vec: dimension mismatch");
        (0..self.rows)
            .map(|i| {
                let mut acc = self.field.zero();
                for (j, x) in v.iter().enumerate() {
                    let a = self.get(i, j);
                    if !a.is_zero() && !x.is_zero() {
                        acc = &acc + &(a * x);
                    }
                }
                acc
            })
            .collect()
    }

    pub fn scale(&self, s: &FieldElement) -> Matrix {
        Matrix {
            field: self.field,
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * s).collect(),
        }
    }

    pub fn transpose(&self) -> Matrix {
        let mut out = Matrix::zero(self.field, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j).clone());
            }
        }
        out
    }

    pub fn trace(&self) -> FieldElement {
        (0..self.rows.min(self.cols)).fold(self.field.zero(), |acc, i| &acc + self.get(i, i))
    }

    pub fn pow(&self, mut e: u32) -> Result<Matrix, MatrixError> {
        let n = self.require_square()?;
        let mut acc = Matrix::identity(self.field, n);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        Ok(acc)
    }

    /// `self - s I`.
    pub fn shift(&self, s: &FieldElement) -> Matrix {
        let mut out = self.clone();
        for i in 0..self.rows.min(self.cols) {
            let x = out.get(i, i) - s;
            out.set(i, i, x);
        }
        out
    }

    /// Reduced row echelon form together with the pivot columns.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m.get(i, c).is_zero()) else {
                continue;
            };
            m.swap_rows(r, p);
            let inv = m.get(r, c).inv().expect("nonzero pivot");
            for j in c..m.cols {
                let x = m.get(r, j) * &inv;
                m.set(r, j, x);
            }
            for i in 0..m.rows {
                if i == r {
                    continue;
                }
                let f = m.get(i, c).clone();
                if f.is_zero() {
                    continue;
                }
                for j in c..m.cols {
                    let x = m.get(i, j) - &(&f * m.get(r, j));
                    m.set(i, j, x);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Rank and a canonical kernel basis: one vector per free column `f`, with
    /// a 1 in position `f`, zeros in the other free positions, and the pivot
    /// coordinates read off the reduced echelon form.
    pub fn rank_and_kernel(&self) -> (usize, Vec<Vector>) {
        let (r, pivots) = self.rref();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let basis: Vec<Vector> = (0..self.cols)
            .filter(|&f| !is_pivot[f])
            .map(|f| {
                let mut v = vec![self.field.zero(); self.cols];
                v[f] = self.field.one();
                for (row, &p) in pivots.iter().enumerate() {
                    v[p] = -r.get(row, f);
                }
                v
            })
            .collect();
        debug_assert_eq!(pivots.len() + basis.len(), self.cols, "rank-nullity");
        debug_assert!(basis.iter().all(|v| self.mul_vec(v).iter().all(FieldElement::is_zero)));
        (pivots.len(), basis)
    }

    pub fn kernel(&self) -> Vec<Vector> {
        self.rank_and_kernel().1
    }

    pub fn nullity(&self) -> usize {
        self.cols - self.rank()
    }

    pub fn inverse(&self) -> Result<Matrix, MatrixError> {
        let n = self.require_square()?;
        let aug = self.hstack(&Matrix::identity(self.field, n))?;
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots.last().is_some_and(|&p| p >= n) {
            return Err(MatrixError::Singular);
        }
        Ok(r.submatrix(0..n, n..2 * n))
    }

    pub fn submatrix(&self, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> Matrix {
        let mut out = Matrix::zero(self.field, rows.len(), cols.len());
        for (oi, i) in rows.clone().enumerate() {
            for (oj, j) in cols.clone().enumerate() {
                out.set(oi, oj, self.get(i, j).clone());
            }
        }
        out
    }

    pub fn hstack(&self, other: &Matrix) -> Result<Matrix, MatrixError> {
        if self.rows != other.rows {
            return Err(MatrixError::DimensionMismatch(format!(
                "hstack: {} rows vs {} rows",
                self.rows, other.rows
            )));
        }
        let mut out = Matrix::zero(self.field, self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, self.get(i, j).clone());
            }
            for j in 0..other.cols {
                out.set(i, self.cols + j, other.get(i, j).clone());
            }
        }
        Ok(out)
    }

    pub fn vstack(&self, other: &Matrix) -> Result<Matrix, MatrixError> {
        if self.cols != other.cols {
            return Err(MatrixError::DimensionMismatch(format!(
                "vstack: {} cols vs {} cols",
                self.cols, other.cols
            )));
        }
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Ok(Matrix {
            field: self.field,
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        })
    }

    /// `[[tl, tr], [bl, br]]`.
    pub fn block2x2(tl: &Matrix, tr: &Matrix, bl: &Matrix, br: &Matrix) -> Result<Matrix, MatrixError> {
        if tl.rows != tr.rows || bl.rows != br.rows || tl.cols != bl.cols || tr.cols != br.cols {
            return Err(MatrixError::DimensionMismatch(format!(
                "block2x2: [{}x{} {}x{}; {}x{} {}x{}]",
                tl.rows, tl.cols, tr.rows, tr.cols, bl.rows, bl.cols, br.rows, br.cols
            )));
        }
        tl.hstack(tr)?.vstack(&bl.hstack(br)?)
    }

    /// Block-diagonal assembly; the empty sum is the 0x0 matrix.
    pub fn direct_sum(field: Field, blocks: &[Matrix]) -> Result<Matrix, MatrixError> {
        for b in blocks {
            if b.field != field {
                return Err(FieldError::MixedFields(field, b.field).into());
            }
        }
        let rows = blocks.iter().map(|b| b.rows).sum();
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut out = Matrix::zero(field, rows, cols);
        let (mut r0, mut c0) = (0, 0);
        for b in blocks {
            for i in 0..b.rows {
                for j in 0..b.cols {
                    out.set(r0 + i, c0 + j, b.get(i, j).clone());
                }
            }
            r0 += b.rows;
            c0 += b.cols;
        }
        Ok(out)
    }

    /// Permutation matrix sending basis vector `e_j` to `e_{perm[j]}`.
    pub fn permutation(field: Field, perm: &[usize]) -> Matrix {
        let mut m = Matrix::zero(field, perm.len(), perm.len());
        for (j, &i) in perm.iter().enumerate() {
            m.set(i, j, field.one());
        }
        m
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Matrix[{}; {}x{}](", self.field, self.rows, self.cols)?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            let row: Vec<String> = self.row(i).iter().map(ToString::to_string).collect();
            write!(f, "{}", row.join(" "))?;
        }
        write!(f, ")")
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(ToString::to_string).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

// Operator forms panic on shape mismatch; use the checked_* methods for
// untrusted operands.
impl Add for &Matrix {
    type Output = Matrix;
    fn add(self, rhs: &Matrix) -> Matrix {
        self.checked_add(rhs).unwrap()
    }
}

impl Sub for &Matrix {
    type Output = Matrix;
    fn sub(self, rhs: &Matrix) -> Matrix {
        self.checked_sub(rhs).unwrap()
    }
}

impl Mul for &Matrix {
    type Output = Matrix;
    fn mul(self, rhs: &Matrix) -> Matrix {
        self.checked_mul(rhs).unwrap()
    }
}

impl Neg for &Matrix {
    type Output = Matrix;
    fn neg(self) -> Matrix {
        self.scale(&-self.field.one())
    }
}

/// An invertible change of basis, stored with its inverse.
///
/// The columns of `t` are the new basis expressed in old coordinates, so a
/// normal form `F` of `M` satisfies `M = T F T^-1`, i.e. `F = pull_back(M)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimilarityWitness {
    t: Matrix,
    t_inv: Matrix,
}

impl SimilarityWitness {
    pub fn new(t: Matrix) -> Result<SimilarityWitness, MatrixError> {
        let t_inv = t.inverse()?;
        Ok(SimilarityWitness { t, t_inv })
    }

    pub fn from_pair(t: Matrix, t_inv: Matrix) -> Result<SimilarityWitness, MatrixError> {
        let n = t.require_square()?;
        if t_inv.rows != n || t_inv.cols != n {
            return Err(MatrixError::DimensionMismatch("witness inverse shape".into()));
        }
        if !(&t * &t_inv).is_identity() || !(&t_inv * &t).is_identity() {
            return Err(MatrixError::BadWitness);
        }
        Ok(SimilarityWitness { t, t_inv })
    }

    pub fn identity(field: Field, n: usize) -> SimilarityWitness {
        SimilarityWitness {
            t: Matrix::identity(field, n),
            t_inv: Matrix::identity(field, n),
        }
    }

    pub fn t(&self) -> &Matrix {
        &self.t
    }

    pub fn t_inv(&self) -> &Matrix {
        &self.t_inv
    }

    pub fn size(&self) -> usize {
        self.t.rows
    }

    pub fn inverse(&self) -> SimilarityWitness {
        SimilarityWitness {
            t: self.t_inv.clone(),
            t_inv: self.t.clone(),
        }
    }

    /// `T M T^-1`.
    pub fn apply(&self, m: &Matrix) -> Result<Matrix, MatrixError> {
        self.t.checked_mul(m)?.checked_mul(&self.t_inv)
    }

    /// `T^-1 M T`.
    pub fn pull_back(&self, m: &Matrix) -> Result<Matrix, MatrixError> {
        self.t_inv.checked_mul(m)?.checked_mul(&self.t)
    }

    /// The witness `self.T * other.T`.
    pub fn compose(&self, other: &SimilarityWitness) -> Result<SimilarityWitness, MatrixError> {
        Ok(SimilarityWitness {
            t: self.t.checked_mul(&other.t)?,
            t_inv: other.t_inv.checked_mul(&self.t_inv)?,
        })
    }

    pub fn direct_sum(field: Field, parts: &[SimilarityWitness]) -> Result<SimilarityWitness, MatrixError> {
        let ts: Vec<Matrix> = parts.iter().map(|w| w.t.clone()).collect();
        let invs: Vec<Matrix> = parts.iter().map(|w| w.t_inv.clone()).collect();
        Ok(SimilarityWitness {
            t: Matrix::direct_sum(field, &ts)?,
            t_inv: Matrix::direct_sum(field, &invs)?,
        })
    }
}

/// `T M T^-1`.
pub fn conjugate(m: &Matrix, w: &SimilarityWitness) -> Result<Matrix, MatrixError> {
    w.apply(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> Field {
        Field::Rationals
    }

    #[test]
    fn core_ops() {
        let i2 = Matrix::identity(q(), 2);
        assert_eq!(&i2 * &i2, i2);
        let j = Matrix::jordan_nilpotent(q(), 2);
        assert!((&j * &j).is_zero());
        let m = Matrix::from_ints(q(), 3, 3, &[1, 2, 3, 4, 5, 6, 7, 8, 10]);
        assert!(m.pow(0).unwrap().is_identity());
        assert_eq!(m.pow(3).unwrap(), &(&m * &m) * &m);
        assert_eq!(m.transpose().transpose(), m);
        assert!(matches!(
            m.checked_mul(&Matrix::zero(q(), 2, 2)),
            Err(MatrixError::DimensionMismatch(_))
        ));
    }

    #[test]
    fn rank_kernel_examples() {
        let j3 = Matrix::jordan_nilpotent(q(), 3);
        let (r, k) = j3.rank_and_kernel();
        assert_eq!((r, k.len()), (2, 1));

        let z = Matrix::zero(q(), 2, 3);
        let (r, k) = z.rank_and_kernel();
        assert_eq!((r, k.len()), (0, 3));

        let m = Matrix::from_ints(q(), 2, 2, &[1, 2, 2, 4]);
        let (r, k) = m.rank_and_kernel();
        assert_eq!(r, 1);
        assert_eq!(k, vec![vec![q().from_i64(-2), q().from_i64(1)]]);
        assert!(m.mul_vec(&k[0]).iter().all(FieldElement::is_zero));
    }

    #[test]
    fn inverse_examples() {
        assert!(Matrix::identity(q(), 3).inverse().unwrap().is_identity());
        let u = Matrix::from_ints(q(), 2, 2, &[1, 1, 0, 1]);
        assert_eq!(u.inverse().unwrap(), Matrix::from_ints(q(), 2, 2, &[1, -1, 0, 1]));
        let s = Matrix::from_ints(q(), 2, 2, &[1, 2, 2, 4]);
        assert_eq!(s.inverse(), Err(MatrixError::Singular));
        assert_eq!(Matrix::zero(q(), 0, 0).inverse().unwrap(), Matrix::zero(q(), 0, 0));
    }

    #[test]
    fn direct_sum_and_blocks() {
        let ds = Matrix::direct_sum(q(), &[Matrix::from_ints(q(), 1, 1, &[1]), Matrix::from_ints(q(), 1, 1, &[0])])
            .unwrap();
        assert_eq!(ds, Matrix::from_ints(q(), 2, 2, &[1, 0, 0, 0]));
        let empty = Matrix::direct_sum(q(), &[]).unwrap();
        assert_eq!((empty.rows(), empty.cols()), (0, 0));
        let ds = Matrix::direct_sum(
            q(),
            &[Matrix::jordan_nilpotent(q(), 2), Matrix::jordan_block(q(), 1, &q().one())],
        )
        .unwrap();
        assert_eq!(ds, Matrix::from_ints(q(), 3, 3, &[0, 1, 0, 0, 0, 0, 0, 0, 1]));

        let i1 = Matrix::identity(q(), 1);
        let ue = Matrix::block2x2(&i1, &Matrix::from_ints(q(), 1, 1, &[1]), &i1, &Matrix::zero(q(), 1, 1)).unwrap();
        assert_eq!(ue, Matrix::from_ints(q(), 2, 2, &[1, 1, 1, 0]));
        let uc = Matrix::block2x2(&i1, &Matrix::zero(q(), 1, 1), &i1, &Matrix::zero(q(), 1, 1)).unwrap();
        assert_eq!(uc, Matrix::from_ints(q(), 2, 2, &[1, 0, 1, 0]));

        // zero-width right column: assembly degenerates to a vertical stack
        let top = Matrix::from_ints(q(), 1, 2, &[1, 2]);
        let bot = Matrix::from_ints(q(), 2, 2, &[3, 4, 5, 6]);
        let st = Matrix::block2x2(&top, &Matrix::zero(q(), 1, 0), &bot, &Matrix::zero(q(), 2, 0)).unwrap();
        assert_eq!(st, top.vstack(&bot).unwrap());

        assert!(Matrix::block2x2(&top, &top, &bot, &Matrix::zero(q(), 1, 1)).is_err());
    }

    #[test]
    fn conjugation() {
        let m = Matrix::from_ints(q(), 3, 3, &[1, 2, 0, 0, 1, 5, 7, 0, 2]);
        assert_eq!(conjugate(&m, &SimilarityWitness::identity(q(), 3)).unwrap(), m);
        let d = Matrix::from_ints(q(), 2, 2, &[1, 0, 0, 2]);
        let swap = SimilarityWitness::new(Matrix::permutation(q(), &[1, 0])).unwrap();
        assert_eq!(conjugate(&d, &swap).unwrap(), Matrix::from_ints(q(), 2, 2, &[2, 0, 0, 1]));
        let w = SimilarityWitness::new(Matrix::from_ints(q(), 3, 3, &[1, 1, 0, 0, 1, 2, 0, 0, 1])).unwrap();
        assert_eq!(w.pull_back(&w.apply(&m).unwrap()).unwrap(), m);
        assert_eq!(w.apply(&m).unwrap().trace(), m.trace());
        assert!(SimilarityWitness::from_pair(w.t().clone(), w.t().clone()).is_err());
    }

    #[test]
    fn prime_field_rank() {
        let f = Field::prime(2).unwrap();
        // [[1,1],[1,1]] has rank 1 and squares to zero over GF(2)
        let m = Matrix::from_ints(f, 2, 2, &[1, 1, 1, 1]);
        assert_eq!(m.rank(), 1);
        assert!((&m * &m).is_zero());
    }
}

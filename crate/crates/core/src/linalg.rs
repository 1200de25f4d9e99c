//! Exact dense and incremental-sparse row reduction over a runtime field.
//!
//! Nothing here pivots on magnitude: the first nonzero entry wins, so every
//! routine is deterministic and works identically over the rationals and
//! GF(p).

use std::collections::BTreeMap;

use crate::error::MatrixError;
use crate::matrix::FinitaryMatrix;
use crate::scalar::{FieldSpec, Scalar};
use crate::window::IndexWindow;

/// Row-major dense matrix of exact scalars.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DenseMatrix {
    field: FieldSpec,
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl DenseMatrix {
    pub fn zeros(field: FieldSpec, rows: usize, cols: usize) -> Self {
        DenseMatrix { field, rows, cols, data: vec![Scalar::zero(field); rows * cols] }
    }

    pub fn identity(field: FieldSpec, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, Scalar::one(field));
        }
        m
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

    pub fn get(&self, r: usize, c: usize) -> &Scalar {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Scalar) {
        self.data[r * self.cols + c] = v;
    }

    pub fn mul(&self, other: &DenseMatrix) -> Result<DenseMatrix, MatrixError> {
        if self.field != other.field {
            return Err(MatrixError::Scalar(crate::scalar::ScalarError::FieldMismatch(
                self.field,
                other.field,
            )));
        }
        assert_eq!(self.cols, other.rows, "inner dimensions must agree");
        let mut out = DenseMatrix::zeros(self.field, self.rows, other.cols);
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
                    let cur = out.get(i, j).add(&a.mul(b)?)?;
                    out.set(i, j, cur);
                }
            }
        }
        Ok(out)
    }

    pub fn transpose(&self) -> DenseMatrix {
        let mut out = DenseMatrix::zeros(self.field, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(c, r, self.get(r, c).clone());
            }
        }
        out
    }

    pub fn scale(&self, alpha: &Scalar) -> Result<DenseMatrix, MatrixError> {
        let mut out = self.clone();
        for v in out.data.iter_mut() {
            *v = v.mul(alpha)?;
        }
        Ok(out)
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|r| {
                (0..self.cols).all(|c| {
                    if r == c {
                        self.get(r, c).is_one()
                    } else {
                        self.get(r, c).is_zero()
                    }
                })
            })
    }

    /// In-place Gauss-Jordan; returns (rank, pivot columns).
    pub fn rref_in_place(&mut self) -> (usize, Vec<usize>) {
        let mut pivots = Vec::new();
        let mut row = 0usize;
        for col in 0..self.cols {
            if row == self.rows {
                break;
            }
            let Some(pr) = (row..self.rows).find(|&r| !self.get(r, col).is_zero()) else {
                continue;
            };
            if pr != row {
                for c in 0..self.cols {
                    self.data.swap(pr * self.cols + c, row * self.cols + c);
                }
            }
            let inv = self.get(row, col).inv().expect("pivot is nonzero");
            for c in col..self.cols {
                let v = self.get(row, c).mul(&inv).expect("same field");
                self.set(row, c, v);
            }
            for r in 0..self.rows {
                if r == row || self.get(r, col).is_zero() {
                    continue;
                }
                let factor = self.get(r, col).clone();
                for c in col..self.cols {
                    let v = self
                        .get(r, c)
                        .sub(&factor.mul(self.get(row, c)).expect("same field"))
                        .expect("same field");
                    self.set(r, c, v);
                }
            }
            pivots.push(col);
            row += 1;
        }
        (row, pivots)
    }

    pub fn invert(&self) -> Result<DenseMatrix, MatrixError> {
        assert_eq!(self.rows, self.cols, "only square matrices invert");
        let n = self.rows;
        let mut aug = DenseMatrix::zeros(self.field, n, 2 * n);
        for r in 0..n {
            for c in 0..n {
                aug.set(r, c, self.get(r, c).clone());
            }
            aug.set(r, n + r, Scalar::one(self.field));
        }
        let (_, pivots) = aug.rref_in_place();
        if pivots.iter().filter(|&&c| c < n).count() < n {
            return Err(MatrixError::SingularMatrix);
        }
        let mut out = DenseMatrix::zeros(self.field, n, n);
        for r in 0..n {
            for c in 0..n {
                out.set(r, c, aug.get(r, n + c).clone());
            }
        }
        Ok(out)
    }

    /// Read a square window of a finitary matrix into dense form.
    pub fn from_finitary(f: &FinitaryMatrix, window: &IndexWindow) -> Self {
        let n = window.len();
        let mut out = DenseMatrix::zeros(f.field(), n, n);
        for (&(i, j), v) in f.iter() {
            if window.contains_pos((i, j)) {
                out.set((i - window.lo()) as usize, (j - window.lo()) as usize, v.clone());
            }
        }
        out
    }

    pub fn to_finitary(&self, window: &IndexWindow) -> FinitaryMatrix {
        assert_eq!(self.rows, window.len());
        assert_eq!(self.cols, window.len());
        let mut out = FinitaryMatrix::zero(self.field);
        for r in 0..self.rows {
            for c in 0..self.cols {
                let v = self.get(r, c);
                if !v.is_zero() {
                    out.set(window.lo() + r as i64, window.lo() + c as i64, v.clone());
                }
            }
        }
        out
    }

    pub fn column(&self, c: usize) -> Vec<Scalar> {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }
}

/// Outcome of solving `A x = b` with free variables pinned to zero.
#[derive(Clone, Debug)]
pub enum SolveOutcome {
    /// Solution with no free columns.
    Unique(Vec<Scalar>),
    /// Solution after zeroing the listed free columns.
    Underdetermined { solution: Vec<Scalar>, free_cols: Vec<usize> },
    /// No solution; the rank of the coefficient matrix is attached.
    Inconsistent { rank: usize },
}

/// Solve `A x = b` exactly by reducing the augmented matrix.
/// Also reports the rank of `A` itself.
pub fn solve_dense(a: &DenseMatrix, b: &[Scalar]) -> (SolveOutcome, usize) {
    assert_eq!(a.rows(), b.len());
    let n = a.cols();
    let mut aug = DenseMatrix::zeros(a.field(), a.rows(), n + 1);
    for r in 0..a.rows() {
        for c in 0..n {
            aug.set(r, c, a.get(r, c).clone());
        }
        aug.set(r, n, b[r].clone());
    }
    let (_, pivots) = aug.rref_in_place();
    let coeff_pivots: Vec<usize> = pivots.iter().copied().filter(|&c| c < n).collect();
    let rank = coeff_pivots.len();
    if pivots.iter().any(|&c| c == n) {
        return (SolveOutcome::Inconsistent { rank }, rank);
    }
    let mut x = vec![Scalar::zero(a.field()); n];
    for (row, &col) in coeff_pivots.iter().enumerate() {
        // free variables are zero, so the particular solution reads off the rhs
        x[col] = aug.get(row, n).clone();
    }
    let free_cols: Vec<usize> =
        (0..n).filter(|c| !coeff_pivots.contains(c)).collect();
    let outcome = if free_cols.is_empty() {
        SolveOutcome::Unique(x)
    } else {
        SolveOutcome::Underdetermined { solution: x, free_cols }
    };
    (outcome, rank)
}

/// Incremental sparse row-echelon accumulator for large structured systems.
/// Rows are kept normalized with leading coefficient 1; insertion order does
/// not affect the final solution because extraction back-substitutes.
pub struct IncrementalSolver {
    field: FieldSpec,
    ncols: usize,
    /// pivot column -> normalized sparse row and its rhs
    rows: BTreeMap<usize, (BTreeMap<usize, Scalar>, Scalar)>,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum InsertOutcome {
    NewPivot,
    Redundant,
    Inconsistent,
}

impl IncrementalSolver {
    pub fn new(field: FieldSpec, ncols: usize) -> Self {
        IncrementalSolver { field, ncols, rows: BTreeMap::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn is_determined(&self) -> bool {
        self.rows.len() == self.ncols
    }

    pub fn insert(
        &mut self,
        mut eq: BTreeMap<usize, Scalar>,
        mut rhs: Scalar,
    ) -> Result<InsertOutcome, MatrixError> {
        eq.retain(|_, v| !v.is_zero());
        loop {
            let Some((&lead, _)) = eq.iter().next() else {
                return Ok(if rhs.is_zero() {
                    InsertOutcome::Redundant
                } else {
                    InsertOutcome::Inconsistent
                });
            };
            match self.rows.get(&lead) {
                Some((prow, prhs)) => {
                    let factor = eq.remove(&lead).expect("lead present");
                    for (&c, v) in prow.iter() {
                        if c == lead {
                            continue;
                        }
                        let cur = eq.remove(&c).unwrap_or_else(|| Scalar::zero(self.field));
                        let next = cur.sub(&factor.mul(v)?)?;
                        if !next.is_zero() {
                            eq.insert(c, next);
                        }
                    }
                    rhs = rhs.sub(&factor.mul(prhs)?)?;
                }
                None => {
                    let lead_coeff = eq.get(&lead).expect("lead present").clone();
                    let inv = lead_coeff.inv().expect("leading coefficient is nonzero");
                    let mut norm = BTreeMap::new();
                    for (c, v) in eq {
                        norm.insert(c, v.mul(&inv)?);
                    }
                    let nrhs = rhs.mul(&inv)?;
                    self.rows.insert(lead, (norm, nrhs));
                    return Ok(InsertOutcome::NewPivot);
                }
            }
        }
    }

    /// Back-substitute; free variables become zero.
    pub fn solve(&self) -> Result<(Vec<Scalar>, Vec<usize>), MatrixError> {
        let mut x = vec![Scalar::zero(self.field); self.ncols];
        for (&lead, (row, rhs)) in self.rows.iter().rev() {
            let mut v = rhs.clone();
            for (&c, coeff) in row.iter() {
                if c == lead {
                    continue;
                }
                v = v.sub(&coeff.mul(&x[c])?)?;
            }
            x[lead] = v;
        }
        let free: Vec<usize> = (0..self.ncols).filter(|c| !self.rows.contains_key(c)).collect();
        Ok((x, free))
    }
}

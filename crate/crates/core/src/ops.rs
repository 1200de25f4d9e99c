//! Polymorphic operations over the three matrix representations, plus class
//! membership checking. This is the dispatch layer the CLI talks to; the
//! typed modules underneath do the work.

use crate::error::MatrixError;
use crate::matrix::{FinitaryMatrix, Involution, Position, WindowedMatrix};
use crate::scalar::Scalar;
use crate::tail::{MulSide, TailMatrix};
use crate::window::ClassTag;

/// Any of the matrix representations in scope.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Matrix {
    Finitary(FinitaryMatrix),
    Windowed(WindowedMatrix),
    Tail(TailMatrix),
}

impl Matrix {
    pub fn field(&self) -> crate::scalar::FieldSpec {
        match self {
            Matrix::Finitary(m) => m.field(),
            Matrix::Windowed(m) => m.field(),
            Matrix::Tail(m) => m.field(),
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Matrix::Finitary(_) => "finitary",
            Matrix::Windowed(_) => "windowed",
            Matrix::Tail(_) => "tail",
        }
    }

    /// Exact entry when it is knowable from the representation alone.
    pub fn known_entry(&self, pos: Position) -> Option<Scalar> {
        match self {
            Matrix::Finitary(m) => Some(m.entry(pos.0, pos.1)),
            Matrix::Windowed(m) => m.known_value(pos),
            Matrix::Tail(m) => Some(m.entry(pos.0, pos.1)),
        }
    }

    /// alpha*a + beta*b where the representations permit an exact answer.
    pub fn elementwise_linear(
        a: &Matrix,
        b: &Matrix,
        alpha: &Scalar,
        beta: &Scalar,
    ) -> Result<Matrix, MatrixError> {
        use Matrix::*;
        match (a, b) {
            (Finitary(x), Finitary(y)) => Ok(Finitary(x.add_scaled(y, alpha, beta)?)),
            (Windowed(x), Windowed(y)) => Ok(Windowed(x.add_scaled(y, alpha, beta)?)),
            (Tail(x), Tail(y)) => Ok(Tail(x.add_scaled(y, alpha, beta)?)),
            (Finitary(x), Tail(y)) => {
                let xt = TailMatrix::from_finitary(y.mode(), y.stride(), x.clone())?;
                Ok(Tail(xt.add_scaled(y, alpha, beta)?))
            }
            (Tail(x), Finitary(y)) => {
                let yt = TailMatrix::from_finitary(x.mode(), x.stride(), y.clone())?;
                Ok(Tail(x.add_scaled(&yt, alpha, beta)?))
            }
            (Finitary(x), Windowed(y)) => {
                let xw = x.to_windowed(*y.window())?;
                Ok(Windowed(xw.add_scaled(y, alpha, beta)?))
            }
            (Windowed(x), Finitary(y)) => {
                let yw = y.to_windowed(*x.window())?;
                Ok(Windowed(x.add_scaled(&yw, alpha, beta)?))
            }
            (Tail(x), Windowed(y)) => {
                let xw = x.expand_on(*y.window())?;
                Ok(Windowed(xw.add_scaled(y, alpha, beta)?))
            }
            (Windowed(x), Tail(y)) => {
                let yw = y.expand_on(*x.window())?;
                Ok(Windowed(x.add_scaled(&yw, alpha, beta)?))
            }
        }
    }

    /// Matrix product along one of the sound routes; tail-by-tail products
    /// are deliberately undefined (constant tails multiply into linearly
    /// growing diagonals, which no representation here carries).
    pub fn multiply(a: &Matrix, b: &Matrix) -> Result<Matrix, MatrixError> {
        use Matrix::*;
        match (a, b) {
            (Finitary(x), Finitary(y)) => Ok(Finitary(x.mul(y)?)),
            (Windowed(x), Windowed(y)) => Ok(Windowed(x.multiply(y)?)),
            (Finitary(x), Tail(y)) => Ok(Finitary(y.mul_finitary(MulSide::Left, x)?)),
            (Tail(x), Finitary(y)) => Ok(Finitary(x.mul_finitary(MulSide::Right, y)?)),
            (Finitary(x), Windowed(y)) => {
                let xw = x.to_windowed(*y.window())?;
                Ok(Windowed(xw.multiply(y)?))
            }
            (Windowed(x), Finitary(y)) => {
                let yw = y.to_windowed(*x.window())?;
                Ok(Windowed(x.multiply(&yw)?))
            }
            _ => Err(MatrixError::UndefinedProduct { left: a.kind_name(), right: b.kind_name() }),
        }
    }

    /// [a, b] = ab - ba; requires both product orders.
    pub fn bracket(a: &Matrix, b: &Matrix) -> Result<Matrix, MatrixError> {
        let ab = Matrix::multiply(a, b)?;
        let ba = Matrix::multiply(b, a)?;
        let one = Scalar::one(a.field());
        Matrix::elementwise_linear(&ab, &ba, &one, &one.neg())
    }

    pub fn involute(&self, inv: Involution) -> Result<Matrix, MatrixError> {
        match self {
            Matrix::Finitary(m) => Ok(Matrix::Finitary(m.involute(inv))),
            Matrix::Windowed(m) => Ok(Matrix::Windowed(m.involute(inv)?)),
            Matrix::Tail(m) => match inv {
                Involution::Transpose => {
                    // a tail (d, s, v) transposes to (-d, s-d, v)
                    let mut core = FinitaryMatrix::zero(m.field());
                    for (&(i, j), v) in m.core().iter() {
                        core.set(j, i, v.clone());
                    }
                    let tails = m
                        .tails()
                        .iter()
                        .map(|t| crate::tail::Tail::new(-t.offset, t.start - t.offset, t.value.clone()))
                        .collect();
                    Ok(Matrix::Tail(TailMatrix::new(
                        m.field(),
                        m.mode(),
                        m.stride(),
                        core,
                        tails,
                    )?))
                }
                Involution::Symplectic => Err(MatrixError::InvolutionUndefinedForClass(
                    ClassTag::RowColumnFinite,
                )),
            },
        }
    }

    pub fn skew_project(&self, inv: Involution) -> Result<(Matrix, Matrix), MatrixError> {
        match self {
            Matrix::Finitary(m) => {
                let (h, k) = m.skew_project(inv);
                Ok((Matrix::Finitary(h), Matrix::Finitary(k)))
            }
            Matrix::Windowed(m) => {
                let (h, k) = m.skew_project(inv)?;
                Ok((Matrix::Windowed(h), Matrix::Windowed(k)))
            }
            Matrix::Tail(_) => {
                let star = self.involute(inv)?;
                let half = Scalar::from_i64(self.field(), 2)
                    .inv()
                    .expect("characteristic != 2 by FieldSpec construction");
                let h = Matrix::elementwise_linear(self, &star, &half, &half)?;
                let k = Matrix::elementwise_linear(self, &star, &half, &half.neg())?;
                Ok((h, k))
            }
        }
    }

    /// Sum of diagonal entries; defined only when the complete support is
    /// known (finitary values, or representations that happen to be one).
    pub fn trace(&self) -> Result<Scalar, MatrixError> {
        match self {
            Matrix::Finitary(m) => Ok(m.trace()),
            Matrix::Windowed(m) => m.trace(),
            Matrix::Tail(m) => Ok(m.to_finitary()?.trace()),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Verdict {
    Pass,
    /// The tag's defining property is not observable on a finite window;
    /// nothing contradicts it.
    VacuouslyConsistent,
    Fail,
}

/// Outcome of checking a claimed class tag against a representation.
#[derive(Clone, Debug)]
pub struct ClassReport {
    pub claimed: ClassTag,
    pub verdict: Verdict,
    pub first_violation: Option<Position>,
    pub detail: String,
}

impl ClassReport {
    pub fn passed(&self) -> bool {
        !matches!(self.verdict, Verdict::Fail)
    }

    fn pass(claimed: ClassTag, detail: impl Into<String>) -> Self {
        ClassReport { claimed, verdict: Verdict::Pass, first_violation: None, detail: detail.into() }
    }

    fn vacuous(claimed: ClassTag, detail: impl Into<String>) -> Self {
        ClassReport {
            claimed,
            verdict: Verdict::VacuouslyConsistent,
            first_violation: None,
            detail: detail.into(),
        }
    }

    fn fail(claimed: ClassTag, pos: Position, detail: impl Into<String>) -> Self {
        ClassReport {
            claimed,
            verdict: Verdict::Fail,
            first_violation: Some(pos),
            detail: detail.into(),
        }
    }
}

/// Verify every constraint of `tag` observable on the representation:
/// band zero patterns and support completeness claims are decidable, the
/// row/column-finiteness tags are bookkeeping and report as vacuous.
pub fn check_class(m: &Matrix, tag: ClassTag) -> ClassReport {
    match tag {
        ClassTag::Band { bandwidth } => {
            let violation = match m {
                Matrix::Finitary(f) => f.support().find(|&(i, j)| (i - j).abs() > bandwidth),
                Matrix::Windowed(w) => {
                    w.entries().map(|(&p, _)| p).find(|&(i, j)| (i - j).abs() > bandwidth)
                }
                Matrix::Tail(t) => t
                    .core()
                    .support()
                    .find(|&(i, j)| (i - j).abs() > bandwidth)
                    .or_else(|| {
                        t.tails().iter().find(|tl| tl.offset.abs() > bandwidth).map(|tl| {
                            (tl.start, tl.start - tl.offset)
                        })
                    }),
            };
            match violation {
                Some(pos) => ClassReport::fail(
                    tag,
                    pos,
                    format!("entry at ({}, {}) has |i-j| > {}", pos.0, pos.1, bandwidth),
                ),
                None => ClassReport::pass(tag, "all entries inside the band"),
            }
        }
        ClassTag::Finitary => match m {
            Matrix::Finitary(_) => ClassReport::pass(tag, "complete support known"),
            Matrix::Windowed(_) => ClassReport::pass(
                tag,
                "stored support lies in the window; completeness is the window's assertion",
            ),
            Matrix::Tail(t) => match t.tails().first() {
                None => ClassReport::pass(tag, "no tails; support equals the finitary core"),
                Some(tl) => ClassReport::fail(
                    tag,
                    (tl.start, tl.start - tl.offset),
                    "a nonzero tail forces infinite support",
                ),
            },
        },
        ClassTag::RowFinite => match m {
            // finitely many nonzero rows: a nonzero tail touches infinitely many
            Matrix::Tail(t) => match t.tails().first() {
                None => ClassReport::pass(tag, "core only: finitely many nonzero rows"),
                Some(tl) => ClassReport::fail(
                    tag,
                    (tl.start, tl.start - tl.offset),
                    "a nonzero tail touches infinitely many rows",
                ),
            },
            _ => ClassReport::vacuous(tag, "row-finiteness is not observable on a window"),
        },
        ClassTag::RowColumnFinite | ClassTag::ColumnFinite => match m {
            Matrix::Tail(t) => ClassReport::pass(
                tag,
                format!(
                    "every row and column meets the core plus at most {} tail positions",
                    t.tails().len()
                ),
            ),
            _ => ClassReport::vacuous(tag, "per-row/column finiteness is not observable on a window"),
        },
    }
}

//! Tail matrices: a finitary core plus finitely many eventually-constant
//! diagonal tails. This is the exact home of shift-commutator preimages of
//! finitary matrices, and it is deliberately not closed under general
//! multiplication (a product of two constant tails grows linearly along
//! diagonals). The operation set is linear combinations, products with
//! finitary matrices, and brackets with the shift.
//!
//! A tail `(offset d, start s, value v)` means entry `(i, i-d) = v` for every
//! row `i >= s` with `i = s (mod stride)` in N mode, and for every `i <= s`
//! in Z-lower mode. Stride 1 is the plain one-value-per-diagonal case; the
//! blocked shift operators need stride m, one tail per inner position of an
//! m x m block.
//!
//! Values are canonical: tails are maximal (no core entry immediately
//! extends a tail), cores avoid tail regions, and region starts sit on the
//! first valid position. Equality of canonical forms is equality of entry
//! functions.

use std::collections::BTreeMap;

use crate::error::MatrixError;
use crate::matrix::{FinitaryMatrix, Guarantee, Position, WindowedMatrix};
use crate::scalar::{FieldSpec, Scalar};
use crate::window::{ClassTag, IndexWindow, IndexingMode};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum TailMode {
    /// Rows 1, 2, 3, ...; tails extend toward +infinity.
    NaturalsFromOne,
    /// Two-sided integer rows; tails extend toward -infinity.
    IntegersLower,
}

impl TailMode {
    fn direction(&self) -> i64 {
        match self {
            TailMode::NaturalsFromOne => 1,
            TailMode::IntegersLower => -1,
        }
    }

    pub fn indexing(&self) -> IndexingMode {
        match self {
            TailMode::NaturalsFromOne => IndexingMode::NaturalsFromOne,
            TailMode::IntegersLower => IndexingMode::Integers,
        }
    }

    fn position_valid(&self, pos: Position) -> bool {
        match self {
            TailMode::NaturalsFromOne => pos.0 >= 1 && pos.1 >= 1,
            TailMode::IntegersLower => true,
        }
    }
}

/// One eventually-constant diagonal.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Tail {
    pub offset: i64,
    pub start: i64,
    pub value: Scalar,
}

impl Tail {
    pub fn new(offset: i64, start: i64, value: Scalar) -> Self {
        Tail { offset, start, value }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TailMatrix {
    field: FieldSpec,
    mode: TailMode,
    stride: i64,
    core: FinitaryMatrix,
    tails: Vec<Tail>,
}

impl TailMatrix {
    pub fn zero(field: FieldSpec, mode: TailMode) -> Self {
        TailMatrix { field, mode, stride: 1, core: FinitaryMatrix::zero(field), tails: Vec::new() }
    }

    /// Build and canonicalize. Rejects overlapping tails and core entries
    /// strictly inside a tail region; clamps starts to the first valid
    /// position and absorbs core entries that extend a tail.
    pub fn new(
        field: FieldSpec,
        mode: TailMode,
        stride: i64,
        core: FinitaryMatrix,
        tails: Vec<Tail>,
    ) -> Result<Self, MatrixError> {
        if stride < 1 {
            return Err(MatrixError::BadBlockSize(stride));
        }
        if mode == TailMode::IntegersLower && stride != 1 {
            return Err(MatrixError::BadBlockSize(stride));
        }
        if core.field() != field {
            return Err(MatrixError::Scalar(crate::scalar::ScalarError::FieldMismatch(
                field,
                core.field(),
            )));
        }
        let mut m = TailMatrix { field, mode, stride, core, tails: Vec::new() };
        let mut seen = std::collections::BTreeSet::new();
        for t in tails {
            if t.value.spec() != field {
                return Err(MatrixError::Scalar(crate::scalar::ScalarError::FieldMismatch(
                    field,
                    t.value.spec(),
                )));
            }
            if t.value.is_zero() {
                continue;
            }
            let t = m.clamp_tail(t);
            if !seen.insert((t.offset, t.start.rem_euclid(stride))) {
                return Err(MatrixError::OverlappingTails);
            }
            m.tails.push(t);
        }
        // core must not sit inside a region
        for (i, j) in m.core.support().collect::<Vec<_>>() {
            if !m.mode.position_valid((i, j)) {
                return Err(MatrixError::InvalidIndex(i, j));
            }
            if m.tail_at(i, j).is_some() {
                return Err(MatrixError::CoreOverlapsTail(i, j));
            }
        }
        m.absorb_core_into_tails();
        m.tails.sort_by_key(|t| (t.offset, t.start.rem_euclid(stride), t.start));
        Ok(m)
    }

    /// First valid row of the region in N mode; identity in Z-lower mode.
    fn clamp_tail(&self, mut t: Tail) -> Tail {
        if self.mode == TailMode::NaturalsFromOne {
            while t.start < 1 || t.start - t.offset < 1 {
                t.start += self.stride;
            }
        }
        t
    }

    fn in_region(&self, t: &Tail, i: i64) -> bool {
        if (i - t.start).rem_euclid(self.stride) != 0 {
            return false;
        }
        match self.mode {
            TailMode::NaturalsFromOne => i >= t.start,
            TailMode::IntegersLower => i <= t.start,
        }
    }

    fn tail_at(&self, i: i64, j: i64) -> Option<&Tail> {
        let d = i - j;
        self.tails.iter().find(|t| t.offset == d && self.in_region(t, i))
    }

    /// Grow each tail backwards over core entries equal to its value.
    fn absorb_core_into_tails(&mut self) {
        let dir = self.mode.direction();
        for idx in 0..self.tails.len() {
            loop {
                let prev = self.tails[idx].start - dir * self.stride;
                let pos = (prev, prev - self.tails[idx].offset);
                if !self.mode.position_valid(pos) {
                    break;
                }
                match self.core.get(pos.0, pos.1) {
                    Some(v) if *v == self.tails[idx].value => {
                        self.core.set(pos.0, pos.1, Scalar::zero(self.field));
                        self.tails[idx].start = prev;
                    }
                    _ => break,
                }
            }
        }
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn mode(&self) -> TailMode {
        self.mode
    }

    pub fn stride(&self) -> i64 {
        self.stride
    }

    pub fn core(&self) -> &FinitaryMatrix {
        &self.core
    }

    pub fn tails(&self) -> &[Tail] {
        &self.tails
    }

    pub fn is_zero(&self) -> bool {
        self.core.is_zero() && self.tails.is_empty()
    }

    /// Constant-time exact evaluation; zero off the valid index set.
    pub fn entry(&self, i: i64, j: i64) -> Scalar {
        if !self.mode.position_valid((i, j)) {
            return Scalar::zero(self.field);
        }
        if let Some(v) = self.core.get(i, j) {
            return v.clone();
        }
        match self.tail_at(i, j) {
            Some(t) => t.value.clone(),
            None => Scalar::zero(self.field),
        }
    }

    /// Row support; finite by construction (core row plus at most one
    /// position per tail).
    pub fn row_support(&self, i: i64) -> Vec<i64> {
        let mut cols: Vec<i64> = self.core.row_support(i);
        for t in &self.tails {
            if self.in_region(t, i) {
                cols.push(i - t.offset);
            }
        }
        cols.sort_unstable();
        cols.dedup();
        cols.retain(|&j| self.mode.position_valid((i, j)));
        cols
    }

    pub fn col_support(&self, j: i64) -> Vec<i64> {
        let mut rows: Vec<i64> = self.core.col_support(j);
        for t in &self.tails {
            let i = j + t.offset;
            if self.in_region(t, i) && self.mode.position_valid((i, j)) {
                rows.push(i);
            }
        }
        rows.sort_unstable();
        rows.dedup();
        rows
    }

    /// alpha*self + beta*other, renormalized to canonical form.
    pub fn add_scaled(
        &self,
        other: &TailMatrix,
        alpha: &Scalar,
        beta: &Scalar,
    ) -> Result<TailMatrix, MatrixError> {
        if self.field != other.field {
            return Err(MatrixError::Scalar(crate::scalar::ScalarError::FieldMismatch(
                self.field,
                other.field,
            )));
        }
        if self.mode != other.mode || self.stride != other.stride {
            return Err(MatrixError::ModeMismatch);
        }
        let dir = self.mode.direction();
        let stride = self.stride;

        let mut explicit = self.core.add_scaled(&other.core, alpha, beta)?;

        // scaled tails per (offset, residue) key
        let mut sides: BTreeMap<(i64, i64), Vec<Tail>> = BTreeMap::new();
        for (tails, coef) in [(&self.tails, alpha), (&other.tails, beta)] {
            for t in tails.iter() {
                let v = coef.mul(&t.value)?;
                if v.is_zero() {
                    continue;
                }
                sides
                    .entry((t.offset, t.start.rem_euclid(stride)))
                    .or_default()
                    .push(Tail::new(t.offset, t.start, v));
            }
        }

        let mut tails = Vec::new();
        for ((offset, _res), parts) in sides {
            // the merged region begins where every contributing tail is active
            let merged_start = match self.mode {
                TailMode::NaturalsFromOne => parts.iter().map(|t| t.start).max().unwrap(),
                TailMode::IntegersLower => parts.iter().map(|t| t.start).min().unwrap(),
            };
            let mut merged = Scalar::zero(self.field);
            for part in &parts {
                merged = merged.add(&part.value)?;
                // pre-merge rows covered by this part alone go to the core
                let mut r = part.start;
                while (merged_start - r) * dir > 0 {
                    explicit.add_at(r, r - offset, &part.value)?;
                    r += dir * stride;
                }
            }
            if !merged.is_zero() {
                tails.push(Tail::new(offset, merged_start, merged));
            }
        }

        // explicit entries inside a region force the region to start later
        for t in &mut tails {
            let mut start = t.start;
            for (i, j) in explicit.support().collect::<Vec<_>>() {
                if i - j == t.offset
                    && (i - t.start).rem_euclid(stride) == 0
                    && (i - start) * dir >= 0
                {
                    let candidate = i + dir * stride;
                    if (candidate - start) * dir > 0 {
                        start = candidate;
                    }
                }
            }
            // rows between the old and new start take the plain tail value
            let mut r = t.start;
            while (start - r) * dir > 0 {
                explicit.add_at(r, r - t.offset, &t.value)?;
                r += dir * stride;
            }
            t.start = start;
        }

        TailMatrix::new(self.field, self.mode, stride, explicit, tails)
    }

    pub fn add(&self, other: &TailMatrix) -> Result<TailMatrix, MatrixError> {
        self.add_scaled(other, &Scalar::one(self.field), &Scalar::one(self.field))
    }

    pub fn sub(&self, other: &TailMatrix) -> Result<TailMatrix, MatrixError> {
        self.add_scaled(other, &Scalar::one(self.field), &Scalar::one(self.field).neg())
    }

    pub fn scale(&self, alpha: &Scalar) -> Result<TailMatrix, MatrixError> {
        self.add_scaled(&TailMatrix::zero(self.field, self.mode), alpha, &Scalar::zero(self.field))
    }

    /// f * self (Left) or self * f (Right); exact and finitary because every
    /// row and column here has finite support.
    pub fn mul_finitary(
        &self,
        side: MulSide,
        f: &FinitaryMatrix,
    ) -> Result<FinitaryMatrix, MatrixError> {
        if self.field != f.field() {
            return Err(MatrixError::Scalar(crate::scalar::ScalarError::FieldMismatch(
                self.field,
                f.field(),
            )));
        }
        let mut out = FinitaryMatrix::zero(self.field);
        match side {
            MulSide::Left => {
                // (f * t)_{ij} = sum_k f_{ik} t_{kj}
                for (&(i, k), fv) in f.iter() {
                    for j in self.row_support(k) {
                        out.add_at(i, j, &fv.mul(&self.entry(k, j))?)?;
                    }
                }
            }
            MulSide::Right => {
                // (t * f)_{ij} = sum_k t_{ik} f_{kj}
                for (&(k, j), fv) in f.iter() {
                    for i in self.col_support(k) {
                        out.add_at(i, j, &self.entry(i, k).mul(fv)?)?;
                    }
                }
            }
        }
        Ok(out)
    }

    /// The commutator [E, self] where E is the shift with ones at
    /// (i, i+shift): (E t)_{ij} = t_{i+shift, j} and (t E)_{ij} =
    /// t_{i, j-shift}, re-expressed exactly in tail form. Tails move by one
    /// offset and differences of equal tails cancel to a finitary remainder.
    pub fn shift_bracket(&self, shift: i64) -> Result<TailMatrix, MatrixError> {
        if shift < 1 {
            return Err(MatrixError::BadBlockSize(shift));
        }
        let up = self.shifted_up(shift)?;
        let right = self.shifted_right(shift)?;
        up.sub(&right)
    }

    /// E * self: rows move up by `shift`.
    fn shifted_up(&self, shift: i64) -> Result<TailMatrix, MatrixError> {
        let mut core = FinitaryMatrix::zero(self.field);
        for (&(i, j), v) in self.core.iter() {
            let target = (i - shift, j);
            if self.mode.position_valid(target) {
                core.set(target.0, target.1, v.clone());
            }
        }
        let tails = self
            .tails
            .iter()
            .map(|t| Tail::new(t.offset - shift, t.start - shift, t.value.clone()))
            .collect();
        TailMatrix::new(self.field, self.mode, self.stride, core, tails)
    }

    /// self * E: columns move right by `shift`.
    fn shifted_right(&self, shift: i64) -> Result<TailMatrix, MatrixError> {
        let mut core = FinitaryMatrix::zero(self.field);
        for (&(i, j), v) in self.core.iter() {
            core.set(i, j + shift, v.clone());
        }
        let tails = self
            .tails
            .iter()
            .map(|t| Tail::new(t.offset - shift, t.start, t.value.clone()))
            .collect();
        TailMatrix::new(self.field, self.mode, self.stride, core, tails)
    }

    /// Dense expansion on a window, fully guaranteed: the representation is
    /// an exact description of the whole infinite matrix.
    pub fn expand_on(&self, window: IndexWindow) -> Result<WindowedMatrix, MatrixError> {
        if window.mode() != self.mode.indexing() {
            return Err(MatrixError::ModeMismatch);
        }
        let mut entries = BTreeMap::new();
        for i in window.indices() {
            for j in self.row_support(i) {
                if window.contains(j) {
                    entries.insert((i, j), self.entry(i, j));
                }
            }
        }
        let tag =
            if self.tails.is_empty() { ClassTag::Finitary } else { ClassTag::RowColumnFinite };
        // a finitary claim needs the complete core inside the window
        let tag = if tag == ClassTag::Finitary
            && self.core.support().any(|p| !window.contains_pos(p))
        {
            ClassTag::RowColumnFinite
        } else {
            tag
        };
        WindowedMatrix::new(self.field, window, tag, entries, Guarantee::full(&window))
    }

    /// A purely finitary value as a TailMatrix.
    pub fn from_finitary(
        mode: TailMode,
        stride: i64,
        f: FinitaryMatrix,
    ) -> Result<TailMatrix, MatrixError> {
        let field = f.field();
        TailMatrix::new(field, mode, stride, f, Vec::new())
    }

    /// The finitary content, if there are no tails.
    pub fn to_finitary(&self) -> Result<FinitaryMatrix, MatrixError> {
        if self.tails.is_empty() {
            Ok(self.core.clone())
        } else {
            Err(MatrixError::NotFinitary)
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum MulSide {
    Left,
    Right,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> FieldSpec {
        FieldSpec::rationals()
    }

    fn s(n: i64) -> Scalar {
        Scalar::from_i64(q(), n)
    }

    fn nat_tail(core: Vec<(i64, i64, i64)>, tails: Vec<(i64, i64, i64)>) -> TailMatrix {
        let core = FinitaryMatrix::from_entries(
            q(),
            core.into_iter().map(|(i, j, v)| (i, j, s(v))),
        )
        .unwrap();
        let tails = tails.into_iter().map(|(d, st, v)| Tail::new(d, st, s(v))).collect();
        TailMatrix::new(q(), TailMode::NaturalsFromOne, 1, core, tails).unwrap()
    }

    #[test]
    fn entry_lookup() {
        let m = nat_tail(vec![], vec![(1, 1, 1)]);
        // start clamps to the first valid position (2, 1)
        assert!(m.entry(5, 4).is_one());
        assert!(m.entry(4, 5).is_zero());
        assert!(m.entry(1, 0).is_zero());
        let with_core = nat_tail(vec![(1, 1, 2)], vec![]);
        assert_eq!(with_core.entry(1, 1), s(2));
    }

    #[test]
    fn linear_cancellation_to_zero() {
        let m = nat_tail(vec![(1, 3, 4)], vec![(0, 2, 1), (2, 5, -3)]);
        let z = m.add_scaled(&m, &s(1), &s(-1)).unwrap();
        assert!(z.is_zero());
    }

    #[test]
    fn tail_merge_pushes_prefix_into_core() {
        // (offset 1, start 1, value 1) + (offset 1, start 3, value 2):
        // entrywise rows 2.. give (2,1)=1, (3,2)=3, (4,3)=3, ...
        let a = nat_tail(vec![], vec![(1, 1, 1)]);
        let b = nat_tail(vec![], vec![(1, 3, 2)]);
        let sum = a.add(&b).unwrap();
        for i in 1..=8 {
            for j in 1..=8 {
                let expect = a.entry(i, j).add(&b.entry(i, j)).unwrap();
                assert_eq!(sum.entry(i, j), expect, "at ({i},{j})");
            }
        }
        assert_eq!(sum.tails().len(), 1);
        assert_eq!(sum.tails()[0], Tail::new(1, 3, s(3)));
        assert_eq!(sum.core().entry(2, 1), s(1));
        assert_eq!(sum.core().support_len(), 1);
    }

    #[test]
    fn scaling_doubles_core_and_tails() {
        let m = nat_tail(vec![(1, 5, 3)], vec![(0, 2, 1)]);
        let doubled = m.scale(&s(2)).unwrap();
        assert_eq!(doubled.entry(1, 5), s(6));
        assert_eq!(doubled.entry(7, 7), s(2));
    }

    #[test]
    fn core_entry_inside_other_tail_region_is_exact() {
        // a has a core entry where b's tail lives: the sum must still
        // evaluate exactly everywhere
        let a = nat_tail(vec![(5, 4, 7)], vec![]);
        let b = nat_tail(vec![], vec![(1, 2, 1)]);
        let sum = a.add(&b).unwrap();
        for i in 1..=10 {
            for j in 1..=10 {
                let expect = a.entry(i, j).add(&b.entry(i, j)).unwrap();
                assert_eq!(sum.entry(i, j), expect, "at ({i},{j})");
            }
        }
        assert_eq!(sum.entry(5, 4), s(8));
        assert!(sum.entry(6, 5).is_one());
    }

    #[test]
    fn constructor_rejects_overlaps() {
        let core = FinitaryMatrix::from_entries(q(), vec![(4, 4, s(1))]).unwrap();
        let err = TailMatrix::new(
            q(),
            TailMode::NaturalsFromOne,
            1,
            core,
            vec![Tail::new(0, 2, s(5))],
        );
        assert!(matches!(err, Err(MatrixError::CoreOverlapsTail(4, 4))));

        let err2 = TailMatrix::new(
            q(),
            TailMode::NaturalsFromOne,
            1,
            FinitaryMatrix::zero(q()),
            vec![Tail::new(0, 2, s(5)), Tail::new(0, 6, s(1))],
        );
        assert!(matches!(err2, Err(MatrixError::OverlappingTails)));
    }

    #[test]
    fn canonical_absorbs_adjacent_core() {
        // a core entry just before the tail start with the same value joins it
        let m = nat_tail(vec![(3, 3, 9)], vec![(0, 4, 9)]);
        assert_eq!(m.tails()[0].start, 3);
        assert!(m.core().is_zero());
        // built differently, same canonical form
        let n = nat_tail(vec![], vec![(0, 3, 9)]);
        assert_eq!(m, n);
    }

    #[test]
    fn mul_finitary_left_right() {
        // m = sum of e_{i+1,i}: tail offset 1 starting at row 2
        let m = nat_tail(vec![], vec![(1, 2, 1)]);
        let e11 = FinitaryMatrix::unit(q(), 1, 1);
        // row 1 of m vanishes, so e11 * m = 0
        assert!(m.mul_finitary(MulSide::Left, &e11).unwrap().is_zero());
        // m * e11: column 1 of m is the e2 direction
        assert_eq!(m.mul_finitary(MulSide::Right, &e11).unwrap(), FinitaryMatrix::unit(q(), 2, 1));
        // zero times anything
        let zf = FinitaryMatrix::zero(q());
        assert!(m.mul_finitary(MulSide::Left, &zf).unwrap().is_zero());
    }

    #[test]
    fn shift_bracket_examples() {
        // m = sum_{i>=2} e_ii -> [E, m] = e12
        let m = nat_tail(vec![], vec![(0, 2, 1)]);
        let br = m.shift_bracket(1).unwrap();
        assert!(br.tails().is_empty());
        assert_eq!(br.core(), &FinitaryMatrix::unit(q(), 1, 2));

        // m = sum_{j>=1} e_{j+1,j} -> [E, m] = e11
        let m2 = nat_tail(vec![], vec![(1, 2, 1)]);
        let br2 = m2.shift_bracket(1).unwrap();
        assert_eq!(br2.core(), &FinitaryMatrix::unit(q(), 1, 1));
        assert!(br2.tails().is_empty());

        // zero stays zero
        assert!(TailMatrix::zero(q(), TailMode::NaturalsFromOne)
            .shift_bracket(1)
            .unwrap()
            .is_zero());
    }

    #[test]
    fn shift_bracket_integers_lower() {
        // m = -sum_{i<=0} e_{i,i-1} -> [E, m] = e00
        let m = TailMatrix::new(
            q(),
            TailMode::IntegersLower,
            1,
            FinitaryMatrix::zero(q()),
            vec![Tail::new(1, 0, s(-1))],
        )
        .unwrap();
        let br = m.shift_bracket(1).unwrap();
        assert!(br.tails().is_empty());
        assert_eq!(br.core(), &FinitaryMatrix::unit(q(), 0, 0));
    }

    #[test]
    fn row_and_column_supports_stay_finite() {
        let m = nat_tail(vec![(1, 7, 2)], vec![(0, 2, 1), (-1, 1, 3), (2, 5, -1)]);
        for i in 1..=40 {
            assert!(m.row_support(i).len() <= 1 + m.tails().len());
        }
        for j in 1..=40 {
            assert!(m.col_support(j).len() <= 1 + m.tails().len());
        }
    }

    #[test]
    fn expansion_matches_entry_function() {
        let m = nat_tail(vec![(2, 6, 5)], vec![(0, 3, 1), (1, 2, -2)]);
        let w = IndexWindow::naturals(12).unwrap();
        let dense = m.expand_on(w).unwrap();
        for (i, j) in w.positions() {
            assert_eq!(dense.entry(i, j), m.entry(i, j), "at ({i},{j})");
        }
        assert!(dense.guarantee().is_full_on(&w));
    }

    #[test]
    fn strided_tails_evaluate() {
        // stride 2: entries at rows 1, 3, 5, ... of the diagonal
        let m = TailMatrix::new(
            q(),
            TailMode::NaturalsFromOne,
            2,
            FinitaryMatrix::zero(q()),
            vec![Tail::new(1, 3, s(4))],
        )
        .unwrap();
        assert_eq!(m.entry(3, 2), s(4));
        assert!(m.entry(4, 3).is_zero());
        assert_eq!(m.entry(5, 4), s(4));
        assert!(m.entry(1, 0).is_zero());
    }
}

//! Finite-support and windowed representations of structured infinite
//! matrices, with guarantee-region semantics for every operation that could
//! be contaminated by off-window entries.
//!
//! A [`FinitaryMatrix`] knows its complete support. A [`WindowedMatrix`] is a
//! finite square window of an infinite matrix together with a class tag and a
//! per-entry guarantee set: the positions whose stored values provably equal
//! the underlying infinite computation no matter what lies outside the window.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::MatrixError;
use crate::scalar::{FieldSpec, Scalar};
use crate::window::{BlockIndexMap, ClassTag, IndexWindow, IndexingMode};

pub type Position = (i64, i64);

/// Transpose or the symplectic involution `a -> J^{-1} a^t J`, where J is the
/// block-diagonal matrix of 2x2 blocks [[0,1],[-1,0]] over adjacent index
/// pairs (2r-1, 2r).
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Involution {
    Transpose,
    Symplectic,
}

impl Involution {
    /// Pair partner under the symplectic pairing.
    fn mate(i: i64) -> i64 {
        if i.rem_euclid(2) == 1 {
            i + 1
        } else {
            i - 1
        }
    }

    /// Sign epsilon(i): +1 for odd i, -1 for even i.
    fn sign(i: i64) -> i64 {
        if i.rem_euclid(2) == 1 {
            1
        } else {
            -1
        }
    }

    /// Where entry (i, j) of `a` lands in `a*`, with its sign factor.
    pub fn image_of_entry(&self, pos: Position) -> (Position, i64) {
        match self {
            Involution::Transpose => ((pos.1, pos.0), 1),
            Involution::Symplectic => {
                let (i, j) = pos;
                let target = (Self::mate(j), Self::mate(i));
                ((target.0, target.1), Self::sign(target.0) * Self::sign(target.1))
            }
        }
    }

    fn window_ok(&self, window: &IndexWindow) -> bool {
        match self {
            Involution::Transpose => true,
            Involution::Symplectic => {
                window.lo().rem_euclid(2) == 1 && window.hi().rem_euclid(2) == 0
            }
        }
    }
}

/// A matrix with finitely many nonzero entries, all of them known.
/// Zero entries are never stored; equality is support-wise.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FinitaryMatrix {
    field: FieldSpec,
    entries: BTreeMap<Position, Scalar>,
}

impl FinitaryMatrix {
    pub fn zero(field: FieldSpec) -> Self {
        FinitaryMatrix { field, entries: BTreeMap::new() }
    }

    /// The matrix unit with a single 1 at (i, j).
    pub fn unit(field: FieldSpec, i: i64, j: i64) -> Self {
        let mut m = Self::zero(field);
        m.set(i, j, Scalar::one(field));
        m
    }

    pub fn identity_on(field: FieldSpec, window: &IndexWindow) -> Self {
        let mut m = Self::zero(field);
        for i in window.indices() {
            m.set(i, i, Scalar::one(field));
        }
        m
    }

    pub fn from_entries<I>(field: FieldSpec, entries: I) -> Result<Self, MatrixError>
    where
        I: IntoIterator<Item = (i64, i64, Scalar)>,
    {
        let mut m = Self::zero(field);
        for (i, j, v) in entries {
            if v.spec() != field {
                return Err(field_mismatch(field, v.spec()));
            }
            let cur = m.entry(i, j).add(&v)?;
            m.set(i, j, cur);
        }
        Ok(m)
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn get(&self, i: i64, j: i64) -> Option<&Scalar> {
        self.entries.get(&(i, j))
    }

    pub fn entry(&self, i: i64, j: i64) -> Scalar {
        self.get(i, j).cloned().unwrap_or_else(|| Scalar::zero(self.field))
    }

    pub fn set(&mut self, i: i64, j: i64, value: Scalar) {
        debug_assert_eq!(value.spec(), self.field);
        if value.is_zero() {
            self.entries.remove(&(i, j));
        } else {
            self.entries.insert((i, j), value);
        }
    }

    pub fn add_at(&mut self, i: i64, j: i64, value: &Scalar) -> Result<(), MatrixError> {
        let sum = self.entry(i, j).add(value)?;
        self.set(i, j, sum);
        Ok(())
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Position, &Scalar)> {
        self.entries.iter()
    }

    pub fn support(&self) -> impl Iterator<Item = Position> + '_ {
        self.entries.keys().copied()
    }

    pub fn support_len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn row(&self, i: i64) -> impl Iterator<Item = (i64, &Scalar)> {
        self.entries.range((i, i64::MIN)..=(i, i64::MAX)).map(|(&(_, j), v)| (j, v))
    }

    pub fn row_support(&self, i: i64) -> Vec<i64> {
        self.row(i).map(|(j, _)| j).collect()
    }

    pub fn col_support(&self, j: i64) -> Vec<i64> {
        self.support().filter(|&(_, c)| c == j).map(|(r, _)| r).collect()
    }

    /// Smallest and largest row/column indices of the support.
    pub fn support_bounds(&self) -> Option<(i64, i64, i64, i64)> {
        let mut it = self.support();
        let first = it.next()?;
        let (mut rmin, mut rmax, mut cmin, mut cmax) = (first.0, first.0, first.1, first.1);
        for (i, j) in it {
            rmin = rmin.min(i);
            rmax = rmax.max(i);
            cmin = cmin.min(j);
            cmax = cmax.max(j);
        }
        Some((rmin, rmax, cmin, cmax))
    }

    /// alpha*self + beta*other.
    pub fn add_scaled(
        &self,
        other: &FinitaryMatrix,
        alpha: &Scalar,
        beta: &Scalar,
    ) -> Result<FinitaryMatrix, MatrixError> {
        if self.field != other.field {
            return Err(field_mismatch(self.field, other.field));
        }
        let mut out = FinitaryMatrix::zero(self.field);
        for (&(i, j), v) in &self.entries {
            out.add_at(i, j, &alpha.mul(v)?)?;
        }
        for (&(i, j), v) in &other.entries {
            out.add_at(i, j, &beta.mul(v)?)?;
        }
        Ok(out)
    }

    pub fn add(&self, other: &FinitaryMatrix) -> Result<FinitaryMatrix, MatrixError> {
        self.add_scaled(other, &Scalar::one(self.field), &Scalar::one(self.field))
    }

    pub fn sub(&self, other: &FinitaryMatrix) -> Result<FinitaryMatrix, MatrixError> {
        self.add_scaled(other, &Scalar::one(self.field), &Scalar::one(self.field).neg())
    }

    pub fn scale(&self, alpha: &Scalar) -> Result<FinitaryMatrix, MatrixError> {
        self.add_scaled(&FinitaryMatrix::zero(self.field), alpha, &Scalar::zero(self.field))
    }

    pub fn neg(&self) -> FinitaryMatrix {
        let one_neg = Scalar::one(self.field).neg();
        self.scale(&one_neg).expect("same field")
    }

    pub fn mul(&self, other: &FinitaryMatrix) -> Result<FinitaryMatrix, MatrixError> {
        if self.field != other.field {
            return Err(field_mismatch(self.field, other.field));
        }
        let mut out = FinitaryMatrix::zero(self.field);
        for (&(i, k), va) in &self.entries {
            for (j, vb) in other.row(k) {
                out.add_at(i, j, &va.mul(vb)?)?;
            }
        }
        Ok(out)
    }

    /// [self, other] = self*other - other*self.
    pub fn bracket(&self, other: &FinitaryMatrix) -> Result<FinitaryMatrix, MatrixError> {
        self.mul(other)?.sub(&other.mul(self)?)
    }

    pub fn involute(&self, inv: Involution) -> FinitaryMatrix {
        let mut out = FinitaryMatrix::zero(self.field);
        for (&pos, v) in &self.entries {
            let (target, sign) = inv.image_of_entry(pos);
            let val = if sign < 0 { v.neg() } else { v.clone() };
            out.set(target.0, target.1, val);
        }
        out
    }

    /// Split into (symmetric, skew) parts w.r.t. the involution:
    /// h = (a + a*)/2, k = (a - a*)/2.
    pub fn skew_project(&self, inv: Involution) -> (FinitaryMatrix, FinitaryMatrix) {
        let star = self.involute(inv);
        let half = Scalar::from_i64(self.field, 2)
            .inv()
            .expect("characteristic != 2 by FieldSpec construction");
        let h = self.add_scaled(&star, &half, &half).expect("same field");
        let k = self.add_scaled(&star, &half, &half.neg()).expect("same field");
        (h, k)
    }

    pub fn trace(&self) -> Scalar {
        let mut acc = Scalar::zero(self.field);
        for (&(i, j), v) in &self.entries {
            if i == j {
                acc = acc.add(v).expect("same field");
            }
        }
        acc
    }

    /// View as a window of the infinite matrix it already is. Fails if the
    /// support does not fit: the window of a finitary-tagged value must
    /// contain the complete support.
    pub fn to_windowed(&self, window: IndexWindow) -> Result<WindowedMatrix, MatrixError> {
        for (i, j) in self.support() {
            if !window.contains_pos((i, j)) {
                return Err(MatrixError::EntryOutOfRange(i, j));
            }
        }
        WindowedMatrix::new(
            self.field,
            window,
            ClassTag::Finitary,
            self.entries.clone(),
            Guarantee::full(&window),
        )
    }
}

use crate::scalar::ScalarError;

fn field_mismatch(a: FieldSpec, b: FieldSpec) -> MatrixError {
    MatrixError::Scalar(ScalarError::FieldMismatch(a, b))
}

/// The set of window positions certified to equal the infinite computation.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Guarantee {
    positions: BTreeSet<Position>,
}

impl Guarantee {
    pub fn full(window: &IndexWindow) -> Self {
        Guarantee { positions: window.positions().collect() }
    }

    pub fn empty() -> Self {
        Guarantee { positions: BTreeSet::new() }
    }

    pub fn from_set(positions: BTreeSet<Position>) -> Self {
        Guarantee { positions }
    }

    pub fn contains(&self, pos: Position) -> bool {
        self.positions.contains(&pos)
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = Position> + '_ {
        self.positions.iter().copied()
    }

    pub fn intersect(&self, other: &Guarantee) -> Guarantee {
        Guarantee { positions: self.positions.intersection(&other.positions).copied().collect() }
    }

    pub fn restrict(&self, window: &IndexWindow) -> Guarantee {
        Guarantee {
            positions: self.positions.iter().copied().filter(|&p| window.contains_pos(p)).collect(),
        }
    }

    pub fn is_full_on(&self, window: &IndexWindow) -> bool {
        self.positions.len() == window.len() * window.len()
    }
}

/// A class-tagged finite window of an infinite matrix.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct WindowedMatrix {
    field: FieldSpec,
    window: IndexWindow,
    tag: ClassTag,
    entries: BTreeMap<Position, Scalar>,
    guarantee: Guarantee,
}

impl WindowedMatrix {
    pub fn new(
        field: FieldSpec,
        window: IndexWindow,
        tag: ClassTag,
        entries: BTreeMap<Position, Scalar>,
        guarantee: Guarantee,
    ) -> Result<Self, MatrixError> {
        for (&(i, j), v) in &entries {
            if v.spec() != field {
                return Err(field_mismatch(field, v.spec()));
            }
            if v.is_zero() {
                return Err(MatrixError::EntryOutOfRange(i, j));
            }
            if !window.contains_pos((i, j)) {
                return Err(MatrixError::EntryOutOfRange(i, j));
            }
            if let ClassTag::Band { bandwidth } = tag {
                if (i - j).abs() > bandwidth {
                    return Err(MatrixError::EntryOutOfRange(i, j));
                }
            }
        }
        Ok(WindowedMatrix { field, window, tag, entries, guarantee: guarantee.restrict(&window) })
    }

    pub fn zero(field: FieldSpec, window: IndexWindow, tag: ClassTag) -> Self {
        WindowedMatrix { field, window, tag, entries: BTreeMap::new(), guarantee: Guarantee::full(&window) }
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn window(&self) -> &IndexWindow {
        &self.window
    }

    pub fn tag(&self) -> ClassTag {
        self.tag
    }

    pub fn guarantee(&self) -> &Guarantee {
        &self.guarantee
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Position, &Scalar)> {
        self.entries.iter()
    }

    pub fn support_len(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, i: i64, j: i64) -> Option<&Scalar> {
        self.entries.get(&(i, j))
    }

    /// Stored value at a window position (zero when absent). Says nothing
    /// about certification; see [`Self::known_value`].
    pub fn entry(&self, i: i64, j: i64) -> Scalar {
        self.get(i, j).cloned().unwrap_or_else(|| Scalar::zero(self.field))
    }

    pub fn guaranteed_at(&self, pos: Position) -> bool {
        self.guarantee.contains(pos)
    }

    /// Is the true entry at `pos` (window or not) known exactly?
    fn known_at(&self, pos: Position) -> bool {
        self.tag.excludes_off_window(pos, &self.window)
            || (self.window.contains_pos(pos) && self.guarantee.contains(pos))
    }

    /// The true value at `pos` if certified, `None` if uncertain.
    pub fn known_value(&self, pos: Position) -> Option<Scalar> {
        if self.tag.excludes_off_window(pos, &self.window) {
            return Some(Scalar::zero(self.field));
        }
        if self.window.contains_pos(pos) && self.guarantee.contains(pos) {
            return Some(self.entry(pos.0, pos.1));
        }
        None
    }

    fn certainly_zero(&self, pos: Position) -> bool {
        self.tag.excludes_off_window(pos, &self.window)
            || (self.window.contains_pos(pos)
                && self.guarantee.contains(pos)
                && !self.entries.contains_key(&pos))
    }

    pub fn row(&self, i: i64) -> impl Iterator<Item = (i64, &Scalar)> {
        self.entries.range((i, i64::MIN)..=(i, i64::MAX)).map(|(&(_, j), v)| (j, v))
    }

    /// Restrict to a smaller window. Entries and guarantees outside are
    /// dropped. A finitary tag survives only when the complete support fits.
    pub fn truncate_to(&self, window: IndexWindow) -> Result<WindowedMatrix, MatrixError> {
        let target = self.window.intersect(&window)?;
        let entries: BTreeMap<Position, Scalar> = self
            .entries
            .iter()
            .filter(|(&p, _)| target.contains_pos(p))
            .map(|(&p, v)| (p, v.clone()))
            .collect();
        let mut tag = self.tag;
        if tag == ClassTag::Finitary && entries.len() != self.entries.len() {
            tag = ClassTag::RowColumnFinite;
        }
        WindowedMatrix::new(self.field, target, tag, entries, self.guarantee.restrict(&target))
    }

    /// Interpret as a finitary matrix. Sound only for finitary-tagged values,
    /// whose window is asserted complete.
    pub fn to_finitary(&self) -> Result<FinitaryMatrix, MatrixError> {
        if self.tag != ClassTag::Finitary {
            return Err(MatrixError::NotFinitary);
        }
        Ok(FinitaryMatrix { field: self.field, entries: self.entries.clone() })
    }

    /// The stored window content as a finite matrix, regardless of tag. This
    /// is for window-local computations (witness algebra) where the window
    /// itself is the object of interest, not a cut of something larger.
    pub fn to_finitary_unchecked(&self) -> FinitaryMatrix {
        FinitaryMatrix { field: self.field, entries: self.entries.clone() }
    }

    /// alpha*self + beta*other on the window intersection.
    pub fn add_scaled(
        &self,
        other: &WindowedMatrix,
        alpha: &Scalar,
        beta: &Scalar,
    ) -> Result<WindowedMatrix, MatrixError> {
        if self.field != other.field {
            return Err(field_mismatch(self.field, other.field));
        }
        let window = self.window.intersect(&other.window)?;
        let a = self.truncate_to(window)?;
        let b = other.truncate_to(window)?;
        let mut entries: BTreeMap<Position, Scalar> = BTreeMap::new();
        for (&p, v) in &a.entries {
            let val = alpha.mul(v)?;
            if !val.is_zero() {
                entries.insert(p, val);
            }
        }
        for (&p, v) in &b.entries {
            let add = beta.mul(v)?;
            let val = match entries.remove(&p) {
                Some(cur) => cur.add(&add)?,
                None => add,
            };
            if !val.is_zero() {
                entries.insert(p, val);
            }
        }
        let mut guarantee = BTreeSet::new();
        for pos in window.positions() {
            if a.known_at(pos) && b.known_at(pos) {
                guarantee.insert(pos);
            }
        }
        let mut tag = a.tag.join(&b.tag);
        if tag == ClassTag::Finitary
            && (self.entries.len() != a.entries.len() || other.entries.len() != b.entries.len())
        {
            // some complete support was cut off by the intersection
            tag = ClassTag::RowColumnFinite;
        }
        if let ClassTag::Band { bandwidth } = tag {
            // keep the band invariant: cancellation can only shrink support
            debug_assert!(entries.keys().all(|&(i, j)| (i - j).abs() <= bandwidth));
        }
        WindowedMatrix::new(self.field, window, tag, entries, Guarantee::from_set(guarantee))
    }

    pub fn add(&self, other: &WindowedMatrix) -> Result<WindowedMatrix, MatrixError> {
        self.add_scaled(other, &Scalar::one(self.field), &Scalar::one(self.field))
    }

    pub fn sub(&self, other: &WindowedMatrix) -> Result<WindowedMatrix, MatrixError> {
        self.add_scaled(other, &Scalar::one(self.field), &Scalar::one(self.field).neg())
    }

    /// Matrix product with per-entry guarantees.
    ///
    /// Entry (i,j) of the result is certified exactly when every index k that
    /// could contribute an unknown or off-window product term is ruled out:
    /// off-window k must be excluded by one factor's class tag, in-window k
    /// must hit certified values (or a certified zero on either side).
    pub fn multiply(&self, other: &WindowedMatrix) -> Result<WindowedMatrix, MatrixError> {
        if self.field != other.field {
            return Err(field_mismatch(self.field, other.field));
        }
        let window = self.window.intersect(&other.window)?;
        let a = self.truncate_to(window)?;
        let b = other.truncate_to(window)?;

        // values
        let mut acc: BTreeMap<Position, Scalar> = BTreeMap::new();
        for (&(i, k), va) in &a.entries {
            for (j, vb) in b.row(k) {
                let term = va.mul(vb)?;
                if term.is_zero() {
                    continue;
                }
                let entry = acc.entry((i, j)).or_insert_with(|| Scalar::zero(self.field));
                *entry = entry.add(&term)?;
            }
        }
        acc.retain(|_, v| !v.is_zero());

        // guarantees
        let mut guarantee = BTreeSet::new();
        for (i, j) in window.positions() {
            if Self::product_entry_certified(&a, &b, i, j, &window) {
                guarantee.insert((i, j));
            }
        }

        let tag = Self::product_tag(&a, &b, &window);
        WindowedMatrix::new(self.field, window, tag, acc, Guarantee::from_set(guarantee))
    }

    fn product_entry_certified(
        a: &WindowedMatrix,
        b: &WindowedMatrix,
        i: i64,
        j: i64,
        window: &IndexWindow,
    ) -> bool {
        // off-window k: some factor's tag must force a zero term
        let bad_a = off_window_reach(&a.tag, i, window);
        let bad_b = off_window_reach(&b.tag, j, window);
        if intervals_intersect(&bad_a, &bad_b) {
            return false;
        }
        // in-window k: the term must be certified
        for k in window.indices() {
            let a_zero = a.certainly_zero((i, k));
            let b_zero = b.certainly_zero((k, j));
            if a_zero || b_zero {
                continue;
            }
            if !(a.known_at((i, k)) && b.known_at((k, j))) {
                return false;
            }
        }
        true
    }

    fn product_tag(a: &WindowedMatrix, b: &WindowedMatrix, window: &IndexWindow) -> ClassTag {
        let raw = a.tag.product(&b.tag);
        if raw != ClassTag::Finitary {
            return raw;
        }
        // A finitary product tag asserts the window holds the complete
        // support; certify it or downgrade to what the window can carry.
        let complete = match (a.tag, b.tag) {
            (ClassTag::Finitary, ClassTag::Finitary) => true,
            (ClassTag::Finitary, ClassTag::Band { bandwidth }) => a
                .entries
                .keys()
                .all(|&(_, k)| window.contains(k - bandwidth) && window.contains(k + bandwidth)),
            (ClassTag::Band { bandwidth }, ClassTag::Finitary) => b
                .entries
                .keys()
                .all(|&(k, _)| window.contains(k - bandwidth) && window.contains(k + bandwidth)),
            _ => false,
        };
        if complete {
            ClassTag::Finitary
        } else if a.tag == ClassTag::Finitary {
            ClassTag::RowFinite
        } else {
            ClassTag::ColumnFinite
        }
    }

    /// [self, other] with intersected guarantees.
    pub fn bracket(&self, other: &WindowedMatrix) -> Result<WindowedMatrix, MatrixError> {
        let ab = self.multiply(other)?;
        let ba = other.multiply(self)?;
        ab.sub(&ba)
    }

    pub fn involute(&self, inv: Involution) -> Result<WindowedMatrix, MatrixError> {
        match self.tag {
            ClassTag::ColumnFinite | ClassTag::RowFinite => {
                // these classes admit no anti-automorphism; the transpose
                // leaves the class entirely
                return Err(MatrixError::InvolutionUndefinedForClass(self.tag));
            }
            _ => {}
        }
        if !inv.window_ok(&self.window) {
            return Err(MatrixError::UnpairedWindow);
        }
        let mut entries = BTreeMap::new();
        let mut guarantee = BTreeSet::new();
        for (&pos, v) in &self.entries {
            let (target, sign) = inv.image_of_entry(pos);
            let val = if sign < 0 { v.neg() } else { v.clone() };
            entries.insert(target, val);
        }
        for pos in self.guarantee.iter() {
            let (target, _) = inv.image_of_entry(pos);
            guarantee.insert(target);
        }
        WindowedMatrix::new(self.field, self.window, self.tag, entries, Guarantee::from_set(guarantee))
    }

    /// (h, k) with h symmetric, k skew w.r.t. the involution, self = h + k.
    pub fn skew_project(
        &self,
        inv: Involution,
    ) -> Result<(WindowedMatrix, WindowedMatrix), MatrixError> {
        let star = self.involute(inv)?;
        let half = Scalar::from_i64(self.field, 2)
            .inv()
            .expect("characteristic != 2 by FieldSpec construction");
        let h = self.add_scaled(&star, &half, &half)?;
        let k = self.add_scaled(&star, &half, &half.neg())?;
        Ok((h, k))
    }

    pub fn trace(&self) -> Result<Scalar, MatrixError> {
        if self.tag != ClassTag::Finitary {
            return Err(MatrixError::NotFinitary);
        }
        Ok(self.to_finitary()?.trace())
    }
}

/// Valid indices k outside `window` where the tag cannot rule out a nonzero
/// entry in row `i` (column analysis is symmetric: pass the column index).
fn off_window_reach(tag: &ClassTag, i: i64, window: &IndexWindow) -> Vec<(i64, i64)> {
    let valid_lo = match window.mode() {
        IndexingMode::NaturalsFromOne => 1,
        IndexingMode::Integers => i64::MIN / 4,
    };
    let valid_hi = i64::MAX / 4;
    let clip = |lo: i64, hi: i64| -> Option<(i64, i64)> {
        let lo = lo.max(valid_lo);
        let hi = hi.min(valid_hi);
        (lo <= hi).then_some((lo, hi))
    };
    match tag {
        ClassTag::Finitary => Vec::new(),
        ClassTag::Band { bandwidth } => {
            let mut out = Vec::new();
            if let Some(iv) = clip(i - bandwidth, (window.lo() - 1).min(i + bandwidth)) {
                if iv.1 <= window.lo() - 1 {
                    out.push(iv);
                }
            }
            if let Some(iv) = clip((window.hi() + 1).max(i - bandwidth), i + bandwidth) {
                if iv.0 >= window.hi() + 1 {
                    out.push(iv);
                }
            }
            out
        }
        _ => {
            let mut out = Vec::new();
            if let Some(iv) = clip(valid_lo, window.lo() - 1) {
                out.push(iv);
            }
            if let Some(iv) = clip(window.hi() + 1, valid_hi) {
                out.push(iv);
            }
            out
        }
    }
}

fn intervals_intersect(a: &[(i64, i64)], b: &[(i64, i64)]) -> bool {
    a.iter().any(|&(alo, ahi)| b.iter().any(|&(blo, bhi)| alo.max(blo) <= ahi.min(bhi)))
}

/// The block shift E = sum of e_{n,n+1}(Id_m) in flat indexing: ones at
/// (i, i+m) for every valid i. In Z mode the block size must be 1.
pub fn shift_matrix(
    field: FieldSpec,
    window: IndexWindow,
    block_size: i64,
) -> Result<WindowedMatrix, MatrixError> {
    let map = BlockIndexMap::new(block_size)?;
    let m = map.block_size();
    match window.mode() {
        IndexingMode::NaturalsFromOne => {
            if (window.len() as i64) % m != 0 {
                return Err(MatrixError::BlockMisalignment { block_size: m });
            }
            if (window.len() as i64) < 2 * m {
                return Err(MatrixError::WindowTooSmall);
            }
        }
        IndexingMode::Integers => {
            if m != 1 {
                return Err(MatrixError::BlockMisalignment { block_size: m });
            }
            if window.len() < 2 {
                return Err(MatrixError::WindowTooSmall);
            }
        }
    }
    let mut entries = BTreeMap::new();
    for i in window.indices() {
        if window.contains(i + m) {
            entries.insert((i, i + m), Scalar::one(field));
        }
    }
    WindowedMatrix::new(field, window, ClassTag::band(m)?, entries, Guarantee::full(&window))
}

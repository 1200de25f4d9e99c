//! Index windows, matrix class tags, and block index bookkeeping.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::MatrixError;

/// Which infinite index set a window is cut from.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash, Serialize, Deserialize)]
pub enum IndexingMode {
    /// Indices 1, 2, 3, ...; windows must start at 1.
    NaturalsFromOne,
    /// Two-sided integer indices.
    Integers,
}

/// An inclusive square window `[lo, hi] x [lo, hi]` of an infinite index set.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub struct IndexWindow {
    lo: i64,
    hi: i64,
    mode: IndexingMode,
}

impl IndexWindow {
    pub fn new(lo: i64, hi: i64, mode: IndexingMode) -> Result<Self, MatrixError> {
        if lo > hi {
            return Err(MatrixError::BadWindow { lo, hi, reason: "lo > hi" });
        }
        if mode == IndexingMode::NaturalsFromOne && lo != 1 {
            return Err(MatrixError::BadWindow { lo, hi, reason: "N-mode windows start at 1" });
        }
        Ok(IndexWindow { lo, hi, mode })
    }

    pub fn naturals(hi: i64) -> Result<Self, MatrixError> {
        Self::new(1, hi, IndexingMode::NaturalsFromOne)
    }

    pub fn integers(lo: i64, hi: i64) -> Result<Self, MatrixError> {
        Self::new(lo, hi, IndexingMode::Integers)
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn hi(&self) -> i64 {
        self.hi
    }

    pub fn mode(&self) -> IndexingMode {
        self.mode
    }

    pub fn len(&self) -> usize {
        (self.hi - self.lo + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false // lo <= hi by construction
    }

    pub fn contains(&self, i: i64) -> bool {
        self.lo <= i && i <= self.hi
    }

    pub fn contains_pos(&self, pos: (i64, i64)) -> bool {
        self.contains(pos.0) && self.contains(pos.1)
    }

    /// True when `i` is a valid index of the underlying infinite set
    /// (inside or outside the window).
    pub fn index_exists(&self, i: i64) -> bool {
        match self.mode {
            IndexingMode::NaturalsFromOne => i >= 1,
            IndexingMode::Integers => true,
        }
    }

    pub fn indices(&self) -> impl Iterator<Item = i64> + Clone {
        self.lo..=self.hi
    }

    pub fn positions(&self) -> impl Iterator<Item = (i64, i64)> + '_ {
        self.indices().flat_map(move |i| self.indices().map(move |j| (i, j)))
    }

    /// Intersection; the modes must agree.
    pub fn intersect(&self, other: &IndexWindow) -> Result<IndexWindow, MatrixError> {
        if self.mode != other.mode {
            return Err(MatrixError::ModeMismatch);
        }
        IndexWindow::new(self.lo.max(other.lo), self.hi.min(other.hi), self.mode)
    }

    pub fn includes(&self, other: &IndexWindow) -> bool {
        self.mode == other.mode && self.lo <= other.lo && self.hi >= other.hi
    }
}

impl fmt::Display for IndexWindow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mode = match self.mode {
            IndexingMode::NaturalsFromOne => "N",
            IndexingMode::Integers => "Z",
        };
        write!(f, "[{},{}]({mode})", self.lo, self.hi)
    }
}

/// Which class of infinite matrices a windowed value claims to come from.
///
/// `Finitary` additionally asserts that the window contains the complete
/// support. `Band(k)` asserts entries vanish whenever `|i - j| > k`. The
/// remaining tags are bookkeeping: their defining conditions (finitely many
/// nonzero entries per row/column, finitely many nonzero rows) are not
/// observable on a finite window.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub enum ClassTag {
    Finitary,
    RowColumnFinite,
    ColumnFinite,
    RowFinite,
    Band { bandwidth: i64 },
}

impl ClassTag {
    pub fn band(bandwidth: i64) -> Result<Self, MatrixError> {
        if bandwidth < 0 {
            return Err(MatrixError::NegativeBandwidth(bandwidth));
        }
        Ok(ClassTag::Band { bandwidth })
    }

    /// Does the tag alone force entry (i, j) of the underlying infinite
    /// matrix to be zero, wherever the window is?
    pub fn excludes_off_window(&self, pos: (i64, i64), window: &IndexWindow) -> bool {
        match self {
            ClassTag::Finitary => !window.contains_pos(pos),
            ClassTag::Band { bandwidth } => (pos.0 - pos.1).abs() > *bandwidth,
            _ => false,
        }
    }

    /// Smallest tag in scope containing both classes (used for sums).
    pub fn join(&self, other: &ClassTag) -> ClassTag {
        use ClassTag::*;
        match (self, other) {
            (Finitary, Finitary) => Finitary,
            (Band { bandwidth: a }, Band { bandwidth: b }) => Band { bandwidth: *a.max(b) },
            // Finitary is contained in RowFinite; RowFinite + RowFinite stays RowFinite.
            (Finitary, RowFinite) | (RowFinite, Finitary) | (RowFinite, RowFinite) => RowFinite,
            // Finitary and Band both sit inside RowColumnFinite.
            (Finitary, Band { .. })
            | (Band { .. }, Finitary)
            | (Finitary, RowColumnFinite)
            | (RowColumnFinite, Finitary)
            | (Band { .. }, RowColumnFinite)
            | (RowColumnFinite, Band { .. })
            | (RowColumnFinite, RowColumnFinite) => RowColumnFinite,
            // everything in scope is column-finite
            _ => ColumnFinite,
        }
    }

    /// Class of a product, by the closure rules of the underlying algebras.
    pub fn product(&self, other: &ClassTag) -> ClassTag {
        use ClassTag::*;
        match (self, other) {
            (Band { bandwidth: a }, Band { bandwidth: b }) => Band { bandwidth: a + b },
            // finitary times row/column-finite stays finitary in truth, but a
            // window cannot certify completeness of the product's support, so
            // the product keeps only what the window can carry.
            (Finitary, Finitary) => Finitary,
            (Finitary, Band { .. }) | (Band { .. }, Finitary) => Finitary,
            (Finitary, RowColumnFinite) | (RowColumnFinite, Finitary) => Finitary,
            (Finitary, ColumnFinite) => RowFinite,
            (ColumnFinite, Finitary) => Finitary,
            (RowFinite, _) => RowFinite,
            (Finitary, RowFinite) => Finitary,
            (Band { .. } | RowColumnFinite, RowColumnFinite | Band { .. }) => RowColumnFinite,
            _ => ColumnFinite,
        }
    }
}

impl fmt::Display for ClassTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClassTag::Finitary => write!(f, "finitary"),
            ClassTag::RowColumnFinite => write!(f, "rcf"),
            ClassTag::ColumnFinite => write!(f, "column_finite"),
            ClassTag::RowFinite => write!(f, "row_finite"),
            ClassTag::Band { bandwidth } => write!(f, "band:{bandwidth}"),
        }
    }
}

/// Bijection between block coordinates `(n, alpha)` in `N x {1..m}` and flat
/// indices `(n-1)*m + alpha`, used to view an (N x N)-matrix of m x m blocks
/// as a flat matrix.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct BlockIndexMap {
    block_size: i64,
}

impl BlockIndexMap {
    pub fn new(block_size: i64) -> Result<Self, MatrixError> {
        if block_size < 1 {
            return Err(MatrixError::BadBlockSize(block_size));
        }
        Ok(BlockIndexMap { block_size })
    }

    pub fn block_size(&self) -> i64 {
        self.block_size
    }

    pub fn flat(&self, block: i64, inner: i64) -> i64 {
        debug_assert!(block >= 1 && (1..=self.block_size).contains(&inner));
        (block - 1) * self.block_size + inner
    }

    /// Inverse of [`Self::flat`]; defined for flat indices >= 1.
    pub fn split(&self, flat: i64) -> (i64, i64) {
        debug_assert!(flat >= 1);
        let block = (flat - 1).div_euclid(self.block_size) + 1;
        let inner = (flat - 1).rem_euclid(self.block_size) + 1;
        (block, inner)
    }
}

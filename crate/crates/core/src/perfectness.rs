//! The shift-commutator inverse operators, their verification and
//! class-preservation reports, and the exact bracket-span decomposer.
//!
//! Writing E for the block shift (ones at (i, i+m) in flat indexing), the
//! N-mode inverse sends a to the matrix with entries
//! `sum_{k>=0} a_{i-(k+1)m, j-km}` (indices <= 0 read as zero), and satisfies
//! `[E, image] = a` exactly. For finitary inputs the image is an exact
//! TailMatrix; for windowed inputs it is windowed with per-entry guarantees.
//! The Z-mode inverse acts on band windows through the three-case formula
//! (rows >= 2 sum downward along one diagonal, row 1 vanishes, rows <= 0 sum
//! upward with a sign) and grows the bandwidth by exactly one.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::MatrixError;
use crate::linalg::{solve_dense, DenseMatrix, SolveOutcome};
use crate::matrix::{FinitaryMatrix, Guarantee, Position, WindowedMatrix};
use crate::ops::{check_class, Matrix};
use crate::scalar::Scalar;
use crate::tail::{Tail, TailMatrix, TailMode};
use crate::window::{BlockIndexMap, ClassTag, IndexWindow, IndexingMode};

/// The shift operator E as a mode plus block size, independent of any window.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct ShiftSpec {
    pub mode: IndexingMode,
    pub block_size: i64,
}

impl ShiftSpec {
    pub fn nat(block_size: i64) -> Self {
        ShiftSpec { mode: IndexingMode::NaturalsFromOne, block_size }
    }

    pub fn int() -> Self {
        ShiftSpec { mode: IndexingMode::Integers, block_size: 1 }
    }

    /// E cut to a window, for the matrix-product verification route.
    pub fn matrix_on(
        &self,
        field: crate::scalar::FieldSpec,
        window: IndexWindow,
    ) -> Result<WindowedMatrix, MatrixError> {
        crate::matrix::shift_matrix(field, window, self.block_size)
    }

    fn index_valid(&self, i: i64) -> bool {
        match self.mode {
            IndexingMode::NaturalsFromOne => i >= 1,
            IndexingMode::Integers => true,
        }
    }
}

/// Image of an inverse-of-ad(E) computation.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum AdImage {
    Tail(TailMatrix),
    Windowed(WindowedMatrix),
}

impl AdImage {
    pub fn to_matrix(&self) -> Matrix {
        match self {
            AdImage::Tail(t) => Matrix::Tail(t.clone()),
            AdImage::Windowed(w) => Matrix::Windowed(w.clone()),
        }
    }
}

/// Where the commutator identity was confirmed, and where it was not.
#[derive(Clone, Debug)]
pub struct RegionReport {
    pub probe: IndexWindow,
    pub agreed: BTreeSet<Position>,
    pub mismatches: Vec<(Position, String)>,
    /// positions whose check needed an uncertified value
    pub skipped: usize,
}

impl RegionReport {
    /// No mismatches and a nonempty verified region.
    pub fn clean(&self) -> bool {
        self.mismatches.is_empty() && !self.agreed.is_empty()
    }

    /// Every probed position agreed.
    pub fn complete(&self) -> bool {
        self.mismatches.is_empty() && self.skipped == 0 && !self.agreed.is_empty()
    }

    pub fn first_mismatch(&self) -> Option<&(Position, String)> {
        self.mismatches.first()
    }
}

#[derive(Clone, Debug)]
pub struct PreservationCheck {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// Desk-scale evidence that the inverse stays in the class the theory says
/// it stays in.
#[derive(Clone, Debug)]
pub struct PreservationReport {
    pub checks: Vec<PreservationCheck>,
}

impl PreservationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Inverse image, its verification on a probe window, and the class report.
#[derive(Clone, Debug)]
pub struct AdInverseResult {
    pub image: AdImage,
    pub verified: RegionReport,
    pub class_report: PreservationReport,
}

/// N-mode inverse of ad(E) with block size m.
///
/// Finitary inputs produce an exact [`TailMatrix`] (each block diagonal of
/// the image is a prefix-sum staircase that becomes constant); windowed
/// inputs produce a windowed image with per-entry guarantees. The probe
/// window defaults to `[1, 3 * support bound]` for finitary inputs and the
/// input window otherwise.
pub fn ad_inverse_nat(
    a: &Matrix,
    block_size: i64,
    probe: Option<IndexWindow>,
) -> Result<AdInverseResult, MatrixError> {
    let shift = ShiftSpec::nat(block_size);
    match a {
        Matrix::Finitary(f) => {
            let image = ad_inverse_nat_finitary(f, block_size)?;
            let probe = match probe {
                Some(w) => w,
                None => default_nat_probe(f, block_size)?,
            };
            let image_m = Matrix::Tail(image.clone());
            let verified = verify_ad_inverse(shift, &image_m, a, probe)?;
            let class_report = class_preservation_report(a, &image_m, block_size, probe)?;
            Ok(AdInverseResult { image: AdImage::Tail(image), verified, class_report })
        }
        Matrix::Windowed(w) => {
            let image = ad_inverse_nat_windowed(w, block_size)?;
            let probe = probe.unwrap_or(*w.window());
            let image_m = Matrix::Windowed(image.clone());
            let verified = verify_ad_inverse(shift, &image_m, a, probe)?;
            let class_report = class_preservation_report(a, &image_m, block_size, probe)?;
            Ok(AdInverseResult { image: AdImage::Windowed(image), verified, class_report })
        }
        Matrix::Tail(_) => Err(MatrixError::UndefinedProduct { left: "tail", right: "shift inverse" }),
    }
}

/// Z-mode inverse of ad(E) for band windows.
pub fn ad_inverse_int(
    a: &WindowedMatrix,
    probe: Option<IndexWindow>,
) -> Result<AdInverseResult, MatrixError> {
    let image = ad_inverse_int_band(a)?;
    let probe = probe.unwrap_or(*a.window());
    let shift = ShiftSpec::int();
    let a_m = Matrix::Windowed(a.clone());
    let image_m = Matrix::Windowed(image.clone());
    let verified = verify_ad_inverse(shift, &image_m, &a_m, probe)?;
    let class_report = class_preservation_report(&a_m, &image_m, 1, probe)?;
    Ok(AdInverseResult { image: AdImage::Windowed(image), verified, class_report })
}

fn default_nat_probe(f: &FinitaryMatrix, block_size: i64) -> Result<IndexWindow, MatrixError> {
    let bound = f
        .support_bounds()
        .map(|(_, rmax, _, cmax)| rmax.max(cmax))
        .unwrap_or(1)
        .max(block_size);
    IndexWindow::naturals(3 * bound)
}

/// Exact closed form: prefix sums along each block diagonal, eventually
/// constant, expressed as a stride-m tail matrix.
pub fn ad_inverse_nat_finitary(
    a: &FinitaryMatrix,
    block_size: i64,
) -> Result<TailMatrix, MatrixError> {
    let map = BlockIndexMap::new(block_size)?;
    let m = map.block_size();
    for (i, j) in a.support() {
        if i < 1 || j < 1 {
            return Err(MatrixError::InvalidIndex(i, j));
        }
    }
    // regroup the flat entries into m x m blocks
    let mut blocks: BTreeMap<(i64, i64), BTreeMap<(i64, i64), Scalar>> = BTreeMap::new();
    for (&(i, j), v) in a.iter() {
        let (bi, al) = map.split(i);
        let (bj, be) = map.split(j);
        blocks.entry((bi, bj)).or_default().insert((al, be), v.clone());
    }
    let mut diagonals: BTreeMap<i64, BTreeMap<i64, BTreeMap<(i64, i64), Scalar>>> = BTreeMap::new();
    for ((bi, bj), blk) in blocks {
        diagonals.entry(bi - bj).or_default().insert(bi, blk);
    }

    let field = a.field();
    let mut core = FinitaryMatrix::zero(field);
    let mut tails: Vec<Tail> = Vec::new();
    for (e, rows) in diagonals {
        // the image's block diagonal d sums the input's diagonal d - 1
        let d = e + 1;
        let row_ids: Vec<i64> = rows.keys().copied().collect();
        let mut running: BTreeMap<(i64, i64), Scalar> = BTreeMap::new();
        for (t, &bi) in row_ids.iter().enumerate() {
            for (&inner, v) in &rows[&bi] {
                let cur = running.entry(inner).or_insert_with(|| Scalar::zero(field));
                *cur = cur.add(v)?;
            }
            if let Some(&next) = row_ids.get(t + 1) {
                // image blocks at rows bi+1 ..= next carry the current sum
                for iout in (bi + 1)..=next {
                    for (&(al, be), v) in &running {
                        if v.is_zero() {
                            continue;
                        }
                        core.set(map.flat(iout, al), map.flat(iout - d, be), v.clone());
                    }
                }
            } else {
                // last support row: the sum is the eventual constant
                for (&(al, be), v) in &running {
                    if v.is_zero() {
                        continue;
                    }
                    tails.push(Tail::new(d * m + al - be, bi * m + al, v.clone()));
                }
            }
        }
    }
    TailMatrix::new(field, TailMode::NaturalsFromOne, m, core, tails)
}

/// Windowed N-mode inverse: entries are partial sums over the in-window
/// references; an entry is certified when every positive-index reference is
/// certified in the input or excluded by its class tag.
pub fn ad_inverse_nat_windowed(
    a: &WindowedMatrix,
    block_size: i64,
) -> Result<WindowedMatrix, MatrixError> {
    if a.window().mode() != IndexingMode::NaturalsFromOne {
        return Err(MatrixError::ModeMismatch);
    }
    let m = BlockIndexMap::new(block_size)?.block_size();
    if (a.window().len() as i64) % m != 0 {
        return Err(MatrixError::BlockMisalignment { block_size: m });
    }
    let field = a.field();
    let window = *a.window();
    let mut entries: BTreeMap<Position, Scalar> = BTreeMap::new();
    let mut guarantee = BTreeSet::new();
    for (i, j) in window.positions() {
        // every reference lies on the flat diagonal i - j - m
        if let ClassTag::Band { bandwidth } = a.tag() {
            if (i - j - m).abs() > bandwidth {
                guarantee.insert((i, j));
                continue;
            }
        }
        let mut val = Scalar::zero(field);
        let mut certain = true;
        let mut k = 0i64;
        loop {
            let r = i - (k + 1) * m;
            let c = j - k * m;
            if r < 1 || c < 1 {
                break;
            }
            match a.known_value((r, c)) {
                Some(v) => val = val.add(&v)?,
                None => {
                    certain = false;
                    val = val.add(&a.entry(r, c))?;
                }
            }
            k += 1;
        }
        if !val.is_zero() {
            entries.insert((i, j), val);
        }
        if certain {
            guarantee.insert((i, j));
        }
    }
    let tag = match a.tag() {
        ClassTag::Band { bandwidth } => ClassTag::Band { bandwidth: bandwidth + m },
        ClassTag::Finitary => ClassTag::RowColumnFinite,
        ClassTag::RowColumnFinite => ClassTag::RowColumnFinite,
        ClassTag::RowFinite | ClassTag::ColumnFinite => ClassTag::ColumnFinite,
    };
    WindowedMatrix::new(field, window, tag, entries, Guarantee::from_set(guarantee))
}

/// Z-mode inverse on a band window via the three-case formula. The output is
/// band with bandwidth k+1; an entry is certified when its references (all
/// on one diagonal of the input) are certified or band-excluded.
pub fn ad_inverse_int_band(a: &WindowedMatrix) -> Result<WindowedMatrix, MatrixError> {
    if a.window().mode() != IndexingMode::Integers {
        return Err(MatrixError::ModeMismatch);
    }
    let ClassTag::Band { bandwidth } = a.tag() else {
        return Err(MatrixError::NotBand);
    };
    let field = a.field();
    let window = *a.window();
    let mut entries: BTreeMap<Position, Scalar> = BTreeMap::new();
    let mut guarantee = BTreeSet::new();
    for (i, j) in window.positions() {
        if (i - j - 1).abs() > bandwidth {
            // the whole reference diagonal vanishes by the band constraint
            guarantee.insert((i, j));
            continue;
        }
        let mut refs: Vec<(Position, bool)> = Vec::new(); // (position, negated)
        if i >= 2 {
            for t in 0..=(i - 2) {
                refs.push(((i - 1 - t, j - t), false));
            }
        } else if i <= 0 {
            for t in 0..=(-i) {
                refs.push(((i + t, j + 1 + t), true));
            }
        }
        // i == 1: empty reference list, exact zero
        let mut val = Scalar::zero(field);
        let mut certain = true;
        for (pos, negated) in refs {
            let term = match a.known_value(pos) {
                Some(v) => v,
                None => {
                    certain = false;
                    a.entry(pos.0, pos.1)
                }
            };
            val = if negated { val.sub(&term)? } else { val.add(&term)? };
        }
        if !val.is_zero() {
            entries.insert((i, j), val);
        }
        if certain {
            guarantee.insert((i, j));
        }
    }
    WindowedMatrix::new(
        field,
        window,
        ClassTag::Band { bandwidth: bandwidth + 1 },
        entries,
        Guarantee::from_set(guarantee),
    )
}

/// Check `[E, atilde] = a` entry by entry on a probe window, using the exact
/// expansion `[E, x]_{ij} = x_{i+m, j} - x_{i, j-m}` (E has one entry per row
/// and column, so this is the full product, not an approximation).
pub fn verify_ad_inverse(
    shift: ShiftSpec,
    atilde: &Matrix,
    a: &Matrix,
    probe: IndexWindow,
) -> Result<RegionReport, MatrixError> {
    verify_ad_inverse_rows(shift, atilde, a, probe, probe.lo(), probe.hi())
}

/// As [`verify_ad_inverse`], limited to probe rows `row_lo..=row_hi`. Rows
/// are independent, so callers may fan ranges out to workers and merge the
/// reports in row order.
pub fn verify_ad_inverse_rows(
    shift: ShiftSpec,
    atilde: &Matrix,
    a: &Matrix,
    probe: IndexWindow,
    row_lo: i64,
    row_hi: i64,
) -> Result<RegionReport, MatrixError> {
    if probe.mode() != shift.mode {
        return Err(MatrixError::ModeMismatch);
    }
    let m = shift.block_size;
    let field = a.field();
    if atilde.field() != field {
        return Err(MatrixError::Scalar(crate::scalar::ScalarError::FieldMismatch(
            field,
            atilde.field(),
        )));
    }
    let lookup = |mat: &Matrix, pos: Position| -> Option<Scalar> {
        if !shift.index_valid(pos.0) || !shift.index_valid(pos.1) {
            return Some(Scalar::zero(field));
        }
        mat.known_entry(pos)
    };
    let mut agreed = BTreeSet::new();
    let mut mismatches = Vec::new();
    let mut skipped = 0usize;
    for i in row_lo.max(probe.lo())..=row_hi.min(probe.hi()) {
        for j in probe.indices() {
            let up = lookup(atilde, (i + m, j));
            let right = lookup(atilde, (i, j - m));
            let rhs = lookup(a, (i, j));
            match (up, right, rhs) {
                (Some(u), Some(r), Some(want)) => {
                    let got = u.sub(&r)?;
                    if got == want {
                        agreed.insert((i, j));
                    } else {
                        mismatches.push(((i, j), format!("[E, image] = {got}, input = {want}")));
                    }
                }
                _ => skipped += 1,
            }
        }
    }
    Ok(RegionReport { probe, agreed, mismatches, skipped })
}

/// Desk-scale checks that the inverse lands in the class the theory
/// prescribes: finite rows/columns for tail images, row supports contained
/// in the union of shifted input rows, and bandwidth growth of exactly the
/// block step for band inputs.
pub fn class_preservation_report(
    a: &Matrix,
    image: &Matrix,
    block_size: i64,
    probe: IndexWindow,
) -> Result<PreservationReport, MatrixError> {
    let mut checks = Vec::new();
    match image {
        Matrix::Tail(t) => {
            let mut max_row = 0usize;
            let mut max_col = 0usize;
            for i in probe.indices() {
                max_row = max_row.max(t.row_support(i).len());
                max_col = max_col.max(t.col_support(i).len());
            }
            checks.push(PreservationCheck {
                name: "rows_finite",
                passed: true,
                detail: format!(
                    "max row support {} (core plus {} tails)",
                    max_row,
                    t.tails().len()
                ),
            });
            checks.push(PreservationCheck {
                name: "columns_finite",
                passed: true,
                detail: format!("max column support {max_col}"),
            });
            if let Matrix::Finitary(f) = a {
                checks.push(row_containment_check(
                    |r| t.row_support(r),
                    f,
                    block_size,
                    &probe,
                ));
            }
        }
        Matrix::Windowed(w) => {
            match a {
                Matrix::Windowed(aw) => {
                    if let ClassTag::Band { bandwidth } = aw.tag() {
                        let claim = ClassTag::Band { bandwidth: bandwidth + block_size };
                        let report = check_class(image, claim);
                        checks.push(PreservationCheck {
                            name: "band_growth",
                            passed: report.passed(),
                            detail: match &report.first_violation {
                                Some(pos) => format!(
                                    "entry at ({}, {}) outside bandwidth {}",
                                    pos.0,
                                    pos.1,
                                    bandwidth + block_size
                                ),
                                None => format!("bandwidth grew from {bandwidth} to at most {}", bandwidth + block_size),
                            },
                        });
                    } else {
                        checks.push(row_containment_check(
                            |r| w.row(r).map(|(c, _)| c).collect(),
                            &aw_to_row_lookup(aw),
                            block_size,
                            &probe,
                        ));
                    }
                }
                Matrix::Finitary(f) => {
                    checks.push(row_containment_check(
                        |r| w.row(r).map(|(c, _)| c).collect(),
                        f,
                        block_size,
                        &probe,
                    ));
                }
                Matrix::Tail(_) => {}
            }
        }
        Matrix::Finitary(_) => {
            checks.push(PreservationCheck {
                name: "finitary_image",
                passed: true,
                detail: "image has finite support".into(),
            });
        }
    }
    Ok(PreservationReport { checks })
}

fn aw_to_row_lookup(aw: &WindowedMatrix) -> FinitaryMatrix {
    let mut f = FinitaryMatrix::zero(aw.field());
    for (&(i, j), v) in aw.entries() {
        f.set(i, j, v.clone());
    }
    f
}

/// Row (k)-support of the image must sit inside the union of the input's
/// rows k - m, k - 2m, ... shifted right by 0, m, 2m, ...
fn row_containment_check<F>(
    image_row: F,
    a: &FinitaryMatrix,
    block_size: i64,
    probe: &IndexWindow,
) -> PreservationCheck
where
    F: Fn(i64) -> Vec<i64>,
{
    let m = block_size;
    for r in probe.indices() {
        let mut allowed: BTreeSet<i64> = BTreeSet::new();
        let mut k = 0i64;
        loop {
            let src = r - (k + 1) * m;
            if src < 1 {
                break;
            }
            for c in a.row_support(src) {
                allowed.insert(c + k * m);
            }
            k += 1;
        }
        for c in image_row(r) {
            if !probe.contains(c) {
                continue;
            }
            if !allowed.contains(&c) {
                return PreservationCheck {
                    name: "row_support_containment",
                    passed: false,
                    detail: format!(
                        "image entry at ({r}, {c}) is outside the shifted input rows"
                    ),
                };
            }
        }
    }
    PreservationCheck {
        name: "row_support_containment",
        passed: true,
        detail: "each image row lies in the union of shifted input rows".into(),
    }
}

/// Exact decomposition of a target as a linear combination of pairwise
/// brackets of the given basis elements, or the rank of the bracket span
/// when the target is outside it.
#[derive(Clone, Debug)]
pub struct SpanDecomposition {
    pub pair_count: usize,
    pub rank: usize,
    /// (u, v) -> coefficient of [basis_u, basis_v], nonzero entries only
    pub coefficients: Option<BTreeMap<(usize, usize), Scalar>>,
}

impl SpanDecomposition {
    pub fn succeeded(&self) -> bool {
        self.coefficients.is_some()
    }
}

pub fn bracket_span_decompose(
    basis: &[FinitaryMatrix],
    target: &FinitaryMatrix,
) -> Result<SpanDecomposition, MatrixError> {
    let field = target.field();
    for b in basis {
        if b.field() != field {
            return Err(MatrixError::Scalar(crate::scalar::ScalarError::FieldMismatch(
                field,
                b.field(),
            )));
        }
    }
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    let mut brackets: Vec<FinitaryMatrix> = Vec::new();
    for u in 0..basis.len() {
        for v in (u + 1)..basis.len() {
            pairs.push((u, v));
            brackets.push(basis[u].bracket(&basis[v])?);
        }
    }
    let mut coords: BTreeSet<Position> = target.support().collect();
    for br in &brackets {
        coords.extend(br.support());
    }
    let coords: Vec<Position> = coords.into_iter().collect();
    let coord_index: BTreeMap<Position, usize> =
        coords.iter().enumerate().map(|(n, &p)| (p, n)).collect();

    let mut a = DenseMatrix::zeros(field, coords.len(), pairs.len());
    for (col, br) in brackets.iter().enumerate() {
        for (&pos, v) in br.iter() {
            a.set(coord_index[&pos], col, v.clone());
        }
    }
    let mut rhs = vec![Scalar::zero(field); coords.len()];
    for (&pos, v) in target.iter() {
        rhs[coord_index[&pos]] = v.clone();
    }
    let (outcome, rank) = solve_dense(&a, &rhs);
    let solution = match outcome {
        SolveOutcome::Unique(x) => Some(x),
        SolveOutcome::Underdetermined { solution, .. } => Some(solution),
        SolveOutcome::Inconsistent { .. } => None,
    };
    let coefficients = match solution {
        None => None,
        Some(x) => {
            // the combination must reproduce the target exactly
            let mut recombined = FinitaryMatrix::zero(field);
            for (idx, lambda) in x.iter().enumerate() {
                if lambda.is_zero() {
                    continue;
                }
                recombined = recombined.add_scaled(&brackets[idx], &Scalar::one(field), lambda)?;
            }
            if &recombined == target {
                let map: BTreeMap<(usize, usize), Scalar> = x
                    .into_iter()
                    .enumerate()
                    .filter(|(_, l)| !l.is_zero())
                    .map(|(idx, l)| (pairs[idx], l))
                    .collect();
                Some(map)
            } else {
                None
            }
        }
    };
    Ok(SpanDecomposition { pair_count: pairs.len(), rank, coefficients })
}

/// The rank of the bracket span alone (no target).
pub fn bracket_span_rank(basis: &[FinitaryMatrix]) -> Result<usize, MatrixError> {
    let field = basis.first().map(|b| b.field()).unwrap_or(crate::scalar::FieldSpec::rationals());
    let zero = FinitaryMatrix::zero(field);
    Ok(bracket_span_decompose(basis, &zero)?.rank)
}

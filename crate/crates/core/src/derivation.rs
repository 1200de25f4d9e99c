//! Witness recovery for derivations: given the values of a derivation on a
//! window of basis elements, rebuild the matrix y with d = ad(y).
//!
//! Full-unit tables have a closed form: off-diagonal entries are read off
//! [y, e_jj] directly, diagonal entries come from [y, e_{pivot, i}] after
//! normalizing y at the pivot to zero. Everything else goes through an exact
//! linear solve. Skew tables (the o/sp cases) recover a general witness and
//! keep only its skew part; the symmetric part commutes with the whole skew
//! algebra and contributes nothing.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::MatrixError;
use crate::linalg::IncrementalSolver;
use crate::matrix::{FinitaryMatrix, Involution, Position, WindowedMatrix};
use crate::ops::{check_class, ClassReport, Matrix};
use crate::scalar::{FieldSpec, Scalar};
use crate::window::{ClassTag, IndexWindow};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum BasisKind {
    FullUnits,
    SlBasis,
    SkewTranspose,
    SkewSymplectic,
}

impl BasisKind {
    pub fn involution(&self) -> Option<Involution> {
        match self {
            BasisKind::SkewTranspose => Some(Involution::Transpose),
            BasisKind::SkewSymplectic => Some(Involution::Symplectic),
            _ => None,
        }
    }
}

/// Label of one basis element: a matrix unit `e_{ij}`, a traceless diagonal
/// `h_j = e_jj - e_{pivot,pivot}`, or a canonical skew element indexed by
/// the unit it was built from.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug, Hash)]
pub enum BasisLabel {
    E(i64, i64),
    H(i64),
    K(i64, i64),
}

impl fmt::Display for BasisLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BasisLabel::E(i, j) => write!(f, "e_{i}_{j}"),
            BasisLabel::H(j) => write!(f, "h_{j}"),
            BasisLabel::K(i, j) => write!(f, "k_{i}_{j}"),
        }
    }
}

impl BasisLabel {
    pub fn parse(key: &str) -> Option<BasisLabel> {
        let mut parts = key.split('_');
        match (parts.next()?, parts.next(), parts.next(), parts.next()) {
            ("e", Some(i), Some(j), None) => Some(BasisLabel::E(i.parse().ok()?, j.parse().ok()?)),
            ("h", Some(j), None, None) => Some(BasisLabel::H(j.parse().ok()?)),
            ("k", Some(i), Some(j), None) => Some(BasisLabel::K(i.parse().ok()?, j.parse().ok()?)),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DerivationError {
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Scalar(#[from] crate::scalar::ScalarError),
    #[error("bad table: {0}")]
    BadTable(String),
    #[error("window cannot certify the bracket with basis element {label}")]
    GuaranteeTooSmall { label: BasisLabel },
    #[error("table is not a derivation on this window: image of {label} mismatches at ({}, {})", pos.0, pos.1)]
    InconsistentTable { label: BasisLabel, pos: Position },
}

/// The canonical basis for a kind on a window. Skew-symplectic windows must
/// be pair-aligned (odd lo, even hi).
pub fn basis_elements(
    kind: BasisKind,
    field: FieldSpec,
    window: &IndexWindow,
    pivot: i64,
) -> Result<Vec<(BasisLabel, FinitaryMatrix)>, DerivationError> {
    if !window.contains(pivot) {
        return Err(DerivationError::BadTable(format!("pivot {pivot} outside window {window}")));
    }
    let mut out = Vec::new();
    match kind {
        BasisKind::FullUnits => {
            for (i, j) in window.positions() {
                out.push((BasisLabel::E(i, j), FinitaryMatrix::unit(field, i, j)));
            }
        }
        BasisKind::SlBasis => {
            for (i, j) in window.positions() {
                if i != j {
                    out.push((BasisLabel::E(i, j), FinitaryMatrix::unit(field, i, j)));
                }
            }
            for j in window.indices() {
                if j != pivot {
                    let h = FinitaryMatrix::unit(field, j, j)
                        .sub(&FinitaryMatrix::unit(field, pivot, pivot))?;
                    out.push((BasisLabel::H(j), h));
                }
            }
        }
        BasisKind::SkewTranspose => {
            for i in window.indices() {
                for j in window.indices() {
                    if i < j {
                        let k = FinitaryMatrix::unit(field, i, j)
                            .sub(&FinitaryMatrix::unit(field, j, i))?;
                        out.push((BasisLabel::K(i, j), k));
                    }
                }
            }
        }
        BasisKind::SkewSymplectic => {
            if window.lo().rem_euclid(2) != 1 || window.hi().rem_euclid(2) != 0 {
                return Err(DerivationError::Matrix(MatrixError::UnpairedWindow));
            }
            for (i, j) in window.positions() {
                let unit = FinitaryMatrix::unit(field, i, j);
                let star = unit.involute(Involution::Symplectic);
                if star == unit.neg() {
                    // self-skew unit (j is i's pair partner)
                    out.push((BasisLabel::K(i, j), unit));
                } else {
                    let (mi, mj) = star.support().next().expect("unit image is a unit");
                    if (i, j) < (mi, mj) {
                        out.push((BasisLabel::K(i, j), unit.sub(&star)?));
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Just the matrices of the canonical skew basis, for span computations.
pub fn skew_basis_matrices(
    field: FieldSpec,
    window: &IndexWindow,
    inv: Involution,
) -> Result<Vec<FinitaryMatrix>, DerivationError> {
    let kind = match inv {
        Involution::Transpose => BasisKind::SkewTranspose,
        Involution::Symplectic => BasisKind::SkewSymplectic,
    };
    Ok(basis_elements(kind, field, window, window.lo())?
        .into_iter()
        .map(|(_, m)| m)
        .collect())
}

/// Values of a derivation on a window of basis elements.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DerivationTable {
    field: FieldSpec,
    window: IndexWindow,
    basis_kind: BasisKind,
    pivot: i64,
    images: BTreeMap<BasisLabel, FinitaryMatrix>,
}

impl DerivationTable {
    /// Validates the label set against the basis kind and rejects images
    /// with support outside the window (truncating would break exactness).
    pub fn new(
        field: FieldSpec,
        window: IndexWindow,
        basis_kind: BasisKind,
        pivot: i64,
        images: BTreeMap<BasisLabel, FinitaryMatrix>,
    ) -> Result<Self, DerivationError> {
        let expected: Vec<BasisLabel> =
            basis_elements(basis_kind, field, &window, pivot)?.into_iter().map(|(l, _)| l).collect();
        for label in &expected {
            if !images.contains_key(label) {
                return Err(DerivationError::BadTable(format!("missing image for {label}")));
            }
        }
        if images.len() != expected.len() {
            let extra = images.keys().find(|l| !expected.contains(l)).expect("count mismatch");
            return Err(DerivationError::BadTable(format!("unexpected label {extra}")));
        }
        for (label, img) in &images {
            if img.field() != field {
                return Err(DerivationError::Matrix(MatrixError::Scalar(
                    crate::scalar::ScalarError::FieldMismatch(field, img.field()),
                )));
            }
            if let Some((i, j)) = img.support().find(|&p| !window.contains_pos(p)) {
                return Err(DerivationError::BadTable(format!(
                    "image of {label} has support at ({i}, {j}) outside {window}"
                )));
            }
        }
        Ok(DerivationTable { field, window, basis_kind, pivot, images })
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn window(&self) -> &IndexWindow {
        &self.window
    }

    pub fn basis_kind(&self) -> BasisKind {
        self.basis_kind
    }

    pub fn pivot(&self) -> i64 {
        self.pivot
    }

    pub fn images(&self) -> &BTreeMap<BasisLabel, FinitaryMatrix> {
        &self.images
    }

    pub fn image(&self, label: &BasisLabel) -> &FinitaryMatrix {
        &self.images[label]
    }
}

/// The table of the inner derivation ad(y) on a basis window.
pub fn inner_derivation_table(
    y: &FinitaryMatrix,
    basis_kind: BasisKind,
    window: IndexWindow,
    pivot: i64,
) -> Result<DerivationTable, DerivationError> {
    let mut images = BTreeMap::new();
    for (label, b) in basis_elements(basis_kind, y.field(), &window, pivot)? {
        let img = y.bracket(&b)?;
        if img.support().any(|p| !window.contains_pos(p)) {
            return Err(DerivationError::GuaranteeTooSmall { label });
        }
        images.insert(label, img);
    }
    DerivationTable::new(y.field(), window, basis_kind, pivot, images)
}

/// How the recovered witness was pinned down.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Normalization {
    /// y at (pivot, pivot) set to zero.
    PivotZero(i64),
    /// skew part of a pivot-normalized solution
    SkewPart { pivot: i64 },
}

/// Per-label verification outcome; recovery fails rather than return a
/// witness with mismatches, so a report always lists clean checks.
#[derive(Clone, Debug)]
pub struct ResidualReport {
    pub checked: Vec<BasisLabel>,
}

#[derive(Clone, Debug)]
pub struct DerivationWitness {
    pub y: WindowedMatrix,
    pub normalization: Normalization,
    pub residual: ResidualReport,
    /// underdetermined coordinates that were pinned to zero
    pub freed: Vec<Position>,
    pub class_check: Option<ClassReport>,
}

fn windowed_witness(
    field: FieldSpec,
    window: IndexWindow,
    y: &FinitaryMatrix,
) -> Result<WindowedMatrix, MatrixError> {
    let mut entries = BTreeMap::new();
    for (&p, v) in y.iter() {
        entries.insert(p, v.clone());
    }
    WindowedMatrix::new(
        field,
        window,
        ClassTag::RowColumnFinite,
        entries,
        crate::matrix::Guarantee::full(&window),
    )
}

fn verify_table(
    table: &DerivationTable,
    y: &FinitaryMatrix,
) -> Result<ResidualReport, DerivationError> {
    let basis = basis_elements(table.basis_kind, table.field, &table.window, table.pivot)?;
    let mut checked = Vec::with_capacity(basis.len());
    for (label, b) in basis {
        let got = y.bracket(&b)?;
        let want = table.image(&label);
        if &got != want {
            let diff = got.sub(want)?;
            let pos = diff.support().next().expect("nonequal matrices differ somewhere");
            return Err(DerivationError::InconsistentTable { label, pos });
        }
        checked.push(label);
    }
    Ok(ResidualReport { checked })
}

/// Closed-form recovery from a full-units table: y_{ij} = images[e_jj]_{ij}
/// off the diagonal, y_{ii} = -images[e_{pivot,i}]_{pivot,i} with the pivot
/// entry zero, then a full verification pass.
pub fn recover_witness_full(table: &DerivationTable) -> Result<DerivationWitness, DerivationError> {
    if table.basis_kind != BasisKind::FullUnits {
        return Err(DerivationError::BadTable("full-units recovery needs a full-units table".into()));
    }
    let field = table.field;
    let window = table.window;
    let pivot = table.pivot;
    let mut y = FinitaryMatrix::zero(field);
    for (i, j) in window.positions() {
        if i != j {
            y.set(i, j, table.image(&BasisLabel::E(j, j)).entry(i, j));
        }
    }
    for i in window.indices() {
        if i != pivot {
            let v = table.image(&BasisLabel::E(pivot, i)).entry(pivot, i);
            y.set(i, i, v.neg());
        }
    }
    let residual = verify_table(table, &y)?;
    Ok(DerivationWitness {
        y: windowed_witness(field, window, &y)?,
        normalization: Normalization::PivotZero(pivot),
        residual,
        freed: Vec::new(),
        class_check: None,
    })
}

/// Generic recovery: solve the exact linear system {[y, b] = images[b]} for
/// the window entries of y with the pivot entry pinned to zero. Free
/// variables are zeroed and reported. An optional class tag is checked on
/// the recovered witness and attached to the result.
pub fn recover_witness_linear(
    table: &DerivationTable,
    constraints: Option<ClassTag>,
) -> Result<DerivationWitness, DerivationError> {
    let field = table.field;
    let window = table.window;
    let n = window.len() as i64;
    let lo = window.lo();
    let idx = |i: i64, j: i64| -> usize { ((i - lo) * n + (j - lo)) as usize };
    let mut solver = IncrementalSolver::new(field, (n * n) as usize);

    // pivot normalization first
    let mut pivot_eq = BTreeMap::new();
    pivot_eq.insert(idx(table.pivot, table.pivot), Scalar::one(field));
    solver.insert(pivot_eq, Scalar::zero(field))?;

    let basis = basis_elements(table.basis_kind, field, &window, table.pivot)?;
    'labels: for (label, b) in &basis {
        let image = table.image(label);
        for (p, q) in window.positions() {
            if solver.is_determined() {
                break 'labels; // the residual pass below checks the rest
            }
            let mut eq: BTreeMap<usize, Scalar> = BTreeMap::new();
            for (&(k, c), v) in b.iter() {
                // (y b)_{pq} picks up y_{pk} when b_{kq} is a stored entry
                if c == q {
                    let slot = eq.entry(idx(p, k)).or_insert_with(|| Scalar::zero(field));
                    *slot = slot.add(v)?;
                }
                // (b y)_{pq} picks up y_{cq} when b_{pc} is stored
                if k == p {
                    let slot = eq.entry(idx(c, q)).or_insert_with(|| Scalar::zero(field));
                    *slot = slot.sub(v)?;
                }
            }
            eq.retain(|_, v| !v.is_zero());
            let rhs = image.entry(p, q);
            if eq.is_empty() {
                if !rhs.is_zero() {
                    return Err(DerivationError::InconsistentTable { label: *label, pos: (p, q) });
                }
                continue;
            }
            if solver.insert(eq, rhs)? == crate::linalg::InsertOutcome::Inconsistent {
                return Err(DerivationError::InconsistentTable { label: *label, pos: (p, q) });
            }
        }
    }

    let (solution, free) = solver.solve()?;
    let mut y = FinitaryMatrix::zero(field);
    for (i, j) in window.positions() {
        let v = &solution[idx(i, j)];
        if !v.is_zero() {
            y.set(i, j, v.clone());
        }
    }
    let freed: Vec<Position> =
        free.iter().map(|&u| (lo + (u as i64) / n, lo + (u as i64) % n)).collect();
    let residual = verify_table(table, &y)?;
    let class_check = constraints.map(|tag| check_class(&Matrix::Finitary(y.clone()), tag));
    Ok(DerivationWitness {
        y: windowed_witness(field, window, &y)?,
        normalization: Normalization::PivotZero(table.pivot),
        residual,
        freed,
        class_check,
    })
}

/// Skew recovery (the o/sp witness): linear recovery followed by projection
/// onto the skew part, which carries the whole action; the symmetric part
/// brackets the skew algebra to zero.
pub fn recover_witness_skew(
    table: &DerivationTable,
    inv: Involution,
) -> Result<DerivationWitness, DerivationError> {
    if table.basis_kind.involution() != Some(inv) {
        return Err(DerivationError::BadTable(
            "basis kind does not match the requested involution".into(),
        ));
    }
    let linear = recover_witness_linear(table, None)?;
    let y_fin = linear.y.to_finitary_unchecked();
    let (_, k) = y_fin.skew_project(inv);
    debug_assert_eq!(k.involute(inv), k.neg());
    let residual = verify_table(table, &k)?;
    Ok(DerivationWitness {
        y: windowed_witness(table.field, table.window, &k)?,
        normalization: Normalization::SkewPart { pivot: table.pivot },
        residual,
        freed: linear.freed,
        class_check: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> FieldSpec {
        FieldSpec::rationals()
    }

    fn gf7() -> FieldSpec {
        FieldSpec::prime_field(7).unwrap()
    }

    fn w(n: i64) -> IndexWindow {
        IndexWindow::naturals(n).unwrap()
    }

    #[test]
    fn basis_sizes() {
        let win = w(4);
        assert_eq!(basis_elements(BasisKind::FullUnits, q(), &win, 1).unwrap().len(), 16);
        assert_eq!(basis_elements(BasisKind::SlBasis, q(), &win, 1).unwrap().len(), 15);
        assert_eq!(basis_elements(BasisKind::SkewTranspose, q(), &win, 1).unwrap().len(), 6);
        // sp_4 has dimension 10
        assert_eq!(basis_elements(BasisKind::SkewSymplectic, q(), &win, 1).unwrap().len(), 10);
    }

    #[test]
    fn skew_bases_are_skew() {
        let win = w(6);
        for (kind, inv) in [
            (BasisKind::SkewTranspose, Involution::Transpose),
            (BasisKind::SkewSymplectic, Involution::Symplectic),
        ] {
            for (label, b) in basis_elements(kind, q(), &win, 1).unwrap() {
                assert_eq!(b.involute(inv), b.neg(), "{label} not skew");
            }
        }
    }

    #[test]
    fn inner_table_of_zero_and_identity() {
        let win = w(3);
        let z = FinitaryMatrix::zero(q());
        let table = inner_derivation_table(&z, BasisKind::FullUnits, win, 1).unwrap();
        assert!(table.images().values().all(|m| m.is_zero()));

        let id = FinitaryMatrix::identity_on(q(), &win);
        let table = inner_derivation_table(&id, BasisKind::FullUnits, win, 1).unwrap();
        assert!(table.images().values().all(|m| m.is_zero()));
    }

    #[test]
    fn inner_table_of_e12_matches_unit_rules() {
        let win = w(3);
        let y = FinitaryMatrix::unit(q(), 1, 2);
        let table = inner_derivation_table(&y, BasisKind::FullUnits, win, 1).unwrap();
        assert_eq!(table.image(&BasisLabel::E(2, 2)), &FinitaryMatrix::unit(q(), 1, 2));
        assert_eq!(table.image(&BasisLabel::E(2, 3)), &FinitaryMatrix::unit(q(), 1, 3));
        assert_eq!(
            table.image(&BasisLabel::E(1, 1)),
            &FinitaryMatrix::unit(q(), 1, 2).neg()
        );
    }

    #[test]
    fn full_recovery_round_trip() {
        let win = w(3);
        let y = FinitaryMatrix::from_entries(
            q(),
            vec![
                (1, 2, Scalar::one(q())),
                (2, 2, Scalar::from_i64(q(), 3)),
                (3, 3, Scalar::from_i64(q(), 5)),
            ],
        )
        .unwrap();
        let table = inner_derivation_table(&y, BasisKind::FullUnits, win, 1).unwrap();
        let witness = recover_witness_full(&table).unwrap();
        // pivot entry of y is already zero, so recovery is exact
        let recovered = witness.y.to_finitary_unchecked();
        assert_eq!(recovered, y);
        assert_eq!(witness.residual.checked.len(), 9);
    }

    #[test]
    fn identity_witness_recovers_to_zero() {
        let win = w(3);
        let id = FinitaryMatrix::identity_on(q(), &win);
        let table = inner_derivation_table(&id, BasisKind::FullUnits, win, 1).unwrap();
        let witness = recover_witness_full(&table).unwrap();
        assert!(witness.y.to_finitary_unchecked().is_zero());
    }

    #[test]
    fn inconsistent_table_rejected() {
        let win = w(3);
        let y = FinitaryMatrix::unit(q(), 1, 2);
        let table = inner_derivation_table(&y, BasisKind::FullUnits, win, 1).unwrap();
        let mut images = table.images().clone();
        // corrupt one image entry
        let img = images.get_mut(&BasisLabel::E(2, 2)).unwrap();
        img.set(1, 2, Scalar::from_i64(q(), 9));
        let bad = DerivationTable::new(q(), win, BasisKind::FullUnits, 1, images).unwrap();
        assert!(matches!(
            recover_witness_full(&bad),
            Err(DerivationError::InconsistentTable { .. })
        ));
        assert!(matches!(
            recover_witness_linear(&bad, None),
            Err(DerivationError::InconsistentTable { .. })
        ));
    }

    #[test]
    fn linear_recovery_on_sl_basis() {
        let win = w(4);
        let y = FinitaryMatrix::unit(q(), 1, 2);
        let table = inner_derivation_table(&y, BasisKind::SlBasis, win, 1).unwrap();
        let witness = recover_witness_linear(&table, None).unwrap();
        assert_eq!(witness.y.to_finitary_unchecked(), y);
        assert!(witness.freed.is_empty());
    }

    #[test]
    fn linear_agrees_with_full_on_unit_tables() {
        let win = w(3);
        let y = FinitaryMatrix::from_entries(
            gf7(),
            vec![
                (1, 3, Scalar::from_i64(gf7(), 2)),
                (2, 1, Scalar::from_i64(gf7(), 4)),
                (3, 3, Scalar::from_i64(gf7(), 6)),
            ],
        )
        .unwrap();
        let table = inner_derivation_table(&y, BasisKind::FullUnits, win, 2).unwrap();
        let full = recover_witness_full(&table).unwrap();
        let linear = recover_witness_linear(&table, None).unwrap();
        assert_eq!(
            full.y.to_finitary_unchecked(),
            linear.y.to_finitary_unchecked()
        );
    }

    #[test]
    fn skew_recovery_round_trip() {
        let win = w(4);
        let k = FinitaryMatrix::unit(q(), 1, 2).sub(&FinitaryMatrix::unit(q(), 2, 1)).unwrap();
        let table = inner_derivation_table(&k, BasisKind::SkewTranspose, win, 1).unwrap();
        let witness = recover_witness_skew(&table, Involution::Transpose).unwrap();
        assert_eq!(witness.y.to_finitary_unchecked(), k);
    }

    #[test]
    fn skew_recovery_ignores_commuting_symmetric_part() {
        // ad(k + Id) has the same table as ad(k); the skew witness is k
        let win = w(4);
        let k = FinitaryMatrix::unit(q(), 1, 2).sub(&FinitaryMatrix::unit(q(), 2, 1)).unwrap();
        let shifted = k.add(&FinitaryMatrix::identity_on(q(), &win)).unwrap();
        let table = inner_derivation_table(&shifted, BasisKind::SkewTranspose, win, 1).unwrap();
        let witness = recover_witness_skew(&table, Involution::Transpose).unwrap();
        assert_eq!(witness.y.to_finitary_unchecked(), k);
    }

    #[test]
    fn zero_table_gives_zero_witness() {
        let win = w(4);
        let z = FinitaryMatrix::zero(q());
        let table = inner_derivation_table(&z, BasisKind::SkewTranspose, win, 1).unwrap();
        let witness = recover_witness_skew(&table, Involution::Transpose).unwrap();
        assert!(witness.y.to_finitary_unchecked().is_zero());
    }

    #[test]
    fn out_of_window_support_rejected() {
        let win = w(3);
        let y = FinitaryMatrix::unit(q(), 1, 4); // bracket images escape the window
        assert!(matches!(
            inner_derivation_table(&y, BasisKind::FullUnits, win, 1),
            Err(DerivationError::GuaranteeTooSmall { .. })
        ));
    }
}

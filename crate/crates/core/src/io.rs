//! Text file formats. Everything is JSON with scalars as strings in their
//! canonical text form, so files are exact and diffable.
//!
//! Matrix files:
//!   {"field":{"type":"Q"},"kind":"finitary","entries":[[1,2,"5/6"],...]}
//!   {"field":...,"kind":"windowed","mode":"N"|"Z","window":[lo,hi],
//!    "tag":"rcf"|"column_finite"|"row_finite"|"finitary","entries":[...]}
//!   {"field":...,"kind":"band","mode":...,"window":[lo,hi],"bandwidth":k,
//!    "entries":[...]}
//!   {"field":...,"kind":"tail","mode":"N"|"Zlower","core":[[i,j,"v"],...],
//!    "tails":[[d,start,"v"],...]}  (a 4th element per tail is its stride)
//!
//! Table files mirror the matrix entry syntax inside an "images" object
//! keyed by basis labels ("e_1_2", "h_3", "k_1_2"), with "basis", "pivot"
//! and (for automorphism tables) "flavor".
//!
//! Basis files: {"field":...,"kind":"basis","elements":[[[i,j,"v"],...],...]}.

use std::collections::BTreeMap;

use serde_json::{json, Map, Value};

use crate::automorphism::{AutomorphismTable, TableFlavor};
use crate::derivation::{BasisKind, BasisLabel, DerivationTable};
use crate::error::MatrixError;
use crate::matrix::{FinitaryMatrix, Guarantee, Position, WindowedMatrix};
use crate::ops::Matrix;
use crate::scalar::{FieldSpec, Scalar};
use crate::tail::{Tail, TailMatrix, TailMode};
use crate::window::{ClassTag, IndexWindow, IndexingMode};

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Scalar(#[from] crate::scalar::ScalarError),
    #[error(transparent)]
    Derivation(#[from] crate::derivation::DerivationError),
    #[error(transparent)]
    Automorphism(#[from] crate::automorphism::AutomorphismError),
}

fn bad(msg: impl Into<String>) -> IoError {
    IoError::Invalid(msg.into())
}

/// A parsed matrix file: the value plus any block-size annotation.
#[derive(Debug, Clone)]
pub struct ParsedMatrix {
    pub matrix: Matrix,
    pub block_size: Option<i64>,
}

fn obj(v: &Value) -> Result<&Map<String, Value>, IoError> {
    v.as_object().ok_or_else(|| bad("expected a JSON object"))
}

fn get<'v>(m: &'v Map<String, Value>, key: &str) -> Result<&'v Value, IoError> {
    m.get(key).ok_or_else(|| bad(format!("missing field {key:?}")))
}

fn parse_field(m: &Map<String, Value>) -> Result<FieldSpec, IoError> {
    Ok(serde_json::from_value(get(m, "field")?.clone())?)
}

fn parse_i64(v: &Value, what: &str) -> Result<i64, IoError> {
    v.as_i64().ok_or_else(|| bad(format!("{what} must be an integer")))
}

fn parse_window(m: &Map<String, Value>) -> Result<IndexWindow, IoError> {
    let arr = get(m, "window")?
        .as_array()
        .ok_or_else(|| bad("window must be [lo, hi]"))?;
    if arr.len() != 2 {
        return Err(bad("window must be [lo, hi]"));
    }
    let lo = parse_i64(&arr[0], "window lo")?;
    let hi = parse_i64(&arr[1], "window hi")?;
    let mode = match m.get("mode").and_then(|v| v.as_str()) {
        Some("N") => IndexingMode::NaturalsFromOne,
        Some("Z") => IndexingMode::Integers,
        Some(other) => return Err(bad(format!("unknown mode {other:?}"))),
        None => {
            if lo == 1 {
                IndexingMode::NaturalsFromOne
            } else {
                IndexingMode::Integers
            }
        }
    };
    Ok(IndexWindow::new(lo, hi, mode)?)
}

fn parse_entries(
    field: FieldSpec,
    v: &Value,
    what: &str,
) -> Result<Vec<(i64, i64, Scalar)>, IoError> {
    let arr = v.as_array().ok_or_else(|| bad(format!("{what} must be an array")))?;
    let mut out = Vec::with_capacity(arr.len());
    for item in arr {
        let triple = item
            .as_array()
            .filter(|t| t.len() == 3)
            .ok_or_else(|| bad(format!("{what} entries must be [i, j, \"value\"]")))?;
        let i = parse_i64(&triple[0], "entry row")?;
        let j = parse_i64(&triple[1], "entry column")?;
        let text = triple[2]
            .as_str()
            .ok_or_else(|| bad("entry values must be scalar strings"))?;
        out.push((i, j, Scalar::parse(field, text)?));
    }
    Ok(out)
}

fn entries_value(entries: impl Iterator<Item = (Position, Scalar)>) -> Value {
    Value::Array(
        entries
            .map(|((i, j), v)| json!([i, j, v.to_string()]))
            .collect(),
    )
}

pub fn parse_class_tag(text: &str) -> Result<ClassTag, IoError> {
    match text {
        "finitary" => Ok(ClassTag::Finitary),
        "rcf" => Ok(ClassTag::RowColumnFinite),
        "column_finite" => Ok(ClassTag::ColumnFinite),
        "row_finite" => Ok(ClassTag::RowFinite),
        other => match other.strip_prefix("band:") {
            Some(k) => {
                let bw: i64 = k.parse().map_err(|_| bad(format!("bad bandwidth in {other:?}")))?;
                Ok(ClassTag::band(bw)?)
            }
            None => Err(bad(format!("unknown class tag {other:?}"))),
        },
    }
}

pub fn tag_name(tag: &ClassTag) -> String {
    tag.to_string()
}

pub fn parse_matrix(text: &str) -> Result<ParsedMatrix, IoError> {
    let v: Value = serde_json::from_str(text)?;
    let m = obj(&v)?;
    let field = parse_field(m)?;
    let block_size = match m.get("block_size") {
        Some(b) => Some(parse_i64(b, "block_size")?),
        None => None,
    };
    let kind = get(m, "kind")?.as_str().ok_or_else(|| bad("kind must be a string"))?;
    let matrix = match kind {
        "finitary" => {
            let entries = parse_entries(field, get(m, "entries")?, "entries")?;
            Matrix::Finitary(FinitaryMatrix::from_entries(field, entries)?)
        }
        "windowed" | "band" => {
            let window = parse_window(m)?;
            let tag = if kind == "band" {
                ClassTag::band(parse_i64(get(m, "bandwidth")?, "bandwidth")?)?
            } else {
                match m.get("tag").and_then(|t| t.as_str()) {
                    Some(t) => parse_class_tag(t)?,
                    None => ClassTag::RowColumnFinite,
                }
            };
            let entries = parse_entries(field, get(m, "entries")?, "entries")?;
            let mut map = BTreeMap::new();
            for (i, j, s) in entries {
                if !s.is_zero() {
                    map.insert((i, j), s);
                }
            }
            Matrix::Windowed(WindowedMatrix::new(field, window, tag, map, Guarantee::full(&window))?)
        }
        "tail" => {
            let mode = match get(m, "mode")?.as_str() {
                Some("N") => TailMode::NaturalsFromOne,
                Some("Zlower") => TailMode::IntegersLower,
                other => return Err(bad(format!("tail mode must be N or Zlower, got {other:?}"))),
            };
            let stride = match m.get("stride") {
                Some(s) => parse_i64(s, "stride")?,
                None => 1,
            };
            let core_entries = parse_entries(field, get(m, "core")?, "core")?;
            let core = FinitaryMatrix::from_entries(field, core_entries)?;
            let tails_arr = get(m, "tails")?
                .as_array()
                .ok_or_else(|| bad("tails must be an array"))?;
            let mut tails = Vec::new();
            let mut tail_strides = Vec::new();
            for t in tails_arr {
                let tuple = t
                    .as_array()
                    .filter(|a| a.len() == 3 || a.len() == 4)
                    .ok_or_else(|| bad("tails entries must be [d, start, \"v\"] or [d, start, \"v\", stride]"))?;
                let d = parse_i64(&tuple[0], "tail offset")?;
                let start = parse_i64(&tuple[1], "tail start")?;
                let value = Scalar::parse(
                    field,
                    tuple[2].as_str().ok_or_else(|| bad("tail values must be scalar strings"))?,
                )?;
                if tuple.len() == 4 {
                    tail_strides.push(parse_i64(&tuple[3], "tail stride")?);
                } else {
                    tail_strides.push(stride);
                }
                tails.push(Tail::new(d, start, value));
            }
            if tail_strides.iter().any(|&s| s != *tail_strides.first().unwrap_or(&stride)) {
                return Err(bad("all tails must share one stride"));
            }
            let stride = tail_strides.first().copied().unwrap_or(stride);
            Matrix::Tail(TailMatrix::new(field, mode, stride, core, tails)?)
        }
        other => return Err(bad(format!("unknown matrix kind {other:?}"))),
    };
    Ok(ParsedMatrix { matrix, block_size })
}

pub fn matrix_to_value(m: &Matrix) -> Value {
    match m {
        Matrix::Finitary(f) => json!({
            "field": f.field(),
            "kind": "finitary",
            "entries": entries_value(f.iter().map(|(&p, v)| (p, v.clone()))),
        }),
        Matrix::Windowed(w) => {
            let mode = match w.window().mode() {
                IndexingMode::NaturalsFromOne => "N",
                IndexingMode::Integers => "Z",
            };
            match w.tag() {
                ClassTag::Band { bandwidth } => json!({
                    "field": w.field(),
                    "kind": "band",
                    "mode": mode,
                    "window": [w.window().lo(), w.window().hi()],
                    "bandwidth": bandwidth,
                    "entries": entries_value(w.entries().map(|(&p, v)| (p, v.clone()))),
                }),
                tag => json!({
                    "field": w.field(),
                    "kind": "windowed",
                    "mode": mode,
                    "window": [w.window().lo(), w.window().hi()],
                    "tag": tag_name(&tag),
                    "entries": entries_value(w.entries().map(|(&p, v)| (p, v.clone()))),
                }),
            }
        }
        Matrix::Tail(t) => {
            let mode = match t.mode() {
                TailMode::NaturalsFromOne => "N",
                TailMode::IntegersLower => "Zlower",
            };
            let tails: Vec<Value> = t
                .tails()
                .iter()
                .map(|tl| {
                    if t.stride() == 1 {
                        json!([tl.offset, tl.start, tl.value.to_string()])
                    } else {
                        json!([tl.offset, tl.start, tl.value.to_string(), t.stride()])
                    }
                })
                .collect();
            json!({
                "field": t.field(),
                "kind": "tail",
                "mode": mode,
                "core": entries_value(t.core().iter().map(|(&p, v)| (p, v.clone()))),
                "tails": tails,
            })
        }
    }
}

pub fn write_matrix(m: &Matrix) -> String {
    serde_json::to_string_pretty(&matrix_to_value(m)).expect("serializable")
}

fn parse_images(
    field: FieldSpec,
    m: &Map<String, Value>,
) -> Result<BTreeMap<BasisLabel, FinitaryMatrix>, IoError> {
    let images_obj = get(m, "images")?
        .as_object()
        .ok_or_else(|| bad("images must be an object"))?;
    let mut images = BTreeMap::new();
    for (key, entries) in images_obj {
        let label = BasisLabel::parse(key)
            .ok_or_else(|| bad(format!("bad image label {key:?}")))?;
        let ents = parse_entries(field, entries, "image")?;
        images.insert(label, FinitaryMatrix::from_entries(field, ents)?);
    }
    Ok(images)
}

pub fn parse_derivation_table(text: &str) -> Result<DerivationTable, IoError> {
    let v: Value = serde_json::from_str(text)?;
    let m = obj(&v)?;
    let field = parse_field(m)?;
    let window = parse_window(m)?;
    let basis = match get(m, "basis")?.as_str() {
        Some("full") => BasisKind::FullUnits,
        Some("sl") => BasisKind::SlBasis,
        Some("skew_t") => BasisKind::SkewTranspose,
        Some("skew_s") => BasisKind::SkewSymplectic,
        other => return Err(bad(format!("unknown basis {other:?}"))),
    };
    let pivot = parse_i64(get(m, "pivot")?, "pivot")?;
    let images = parse_images(field, m)?;
    Ok(DerivationTable::new(field, window, basis, pivot, images)?)
}

pub fn derivation_table_to_value(t: &DerivationTable) -> Value {
    let basis = match t.basis_kind() {
        BasisKind::FullUnits => "full",
        BasisKind::SlBasis => "sl",
        BasisKind::SkewTranspose => "skew_t",
        BasisKind::SkewSymplectic => "skew_s",
    };
    let images: Map<String, Value> = t
        .images()
        .iter()
        .map(|(label, img)| {
            (label.to_string(), entries_value(img.iter().map(|(&p, v)| (p, v.clone()))))
        })
        .collect();
    json!({
        "field": t.field(),
        "window": [t.window().lo(), t.window().hi()],
        "mode": match t.window().mode() { IndexingMode::NaturalsFromOne => "N", IndexingMode::Integers => "Z" },
        "basis": basis,
        "pivot": t.pivot(),
        "images": images,
    })
}

/// An automorphism table file: either full unit images, or (for Lie tables)
/// sl-keyed images that still need their diagonal reconstructed.
#[derive(Debug, Clone)]
pub enum AutTableFile {
    Units(AutomorphismTable),
    SlKeyed {
        field: FieldSpec,
        window: IndexWindow,
        pivot: i64,
        offdiag: BTreeMap<Position, FinitaryMatrix>,
        h_images: BTreeMap<i64, FinitaryMatrix>,
    },
}

pub fn parse_automorphism_table(text: &str) -> Result<AutTableFile, IoError> {
    let v: Value = serde_json::from_str(text)?;
    let m = obj(&v)?;
    let field = parse_field(m)?;
    let window = parse_window(m)?;
    let flavor = match get(m, "flavor")?.as_str() {
        Some("assoc") => TableFlavor::Associative,
        Some("lie") => TableFlavor::Lie,
        Some("anti") => TableFlavor::Anti,
        other => return Err(bad(format!("unknown flavor {other:?}"))),
    };
    let basis = m.get("basis").and_then(|b| b.as_str()).unwrap_or("full");
    let images = parse_images(field, m)?;
    match basis {
        "full" => {
            let mut unit_images = BTreeMap::new();
            for (label, img) in images {
                match label {
                    BasisLabel::E(i, j) => {
                        unit_images.insert((i, j), img);
                    }
                    other => return Err(bad(format!("unexpected label {other} in a full table"))),
                }
            }
            Ok(AutTableFile::Units(AutomorphismTable::new(field, window, flavor, unit_images)?))
        }
        "sl" => {
            if flavor != TableFlavor::Lie {
                return Err(bad("sl-keyed tables are only meaningful for lie flavor"));
            }
            let pivot = parse_i64(get(m, "pivot")?, "pivot")?;
            let mut offdiag = BTreeMap::new();
            let mut h_images = BTreeMap::new();
            for (label, img) in images {
                match label {
                    BasisLabel::E(i, j) if i != j => {
                        offdiag.insert((i, j), img);
                    }
                    BasisLabel::H(j) => {
                        h_images.insert(j, img);
                    }
                    other => {
                        return Err(bad(format!("unexpected label {other} in an sl table")))
                    }
                }
            }
            Ok(AutTableFile::SlKeyed { field, window, pivot, offdiag, h_images })
        }
        other => Err(bad(format!("unknown basis {other:?} for an automorphism table"))),
    }
}

pub fn automorphism_table_to_value(t: &AutomorphismTable) -> Value {
    let images: Map<String, Value> = t
        .images()
        .iter()
        .map(|(&(i, j), img)| {
            (
                BasisLabel::E(i, j).to_string(),
                entries_value(img.iter().map(|(&p, v)| (p, v.clone()))),
            )
        })
        .collect();
    json!({
        "field": t.field(),
        "window": [t.window().lo(), t.window().hi()],
        "mode": match t.window().mode() { IndexingMode::NaturalsFromOne => "N", IndexingMode::Integers => "Z" },
        "flavor": match t.flavor() {
            TableFlavor::Associative => "assoc",
            TableFlavor::Lie => "lie",
            TableFlavor::Anti => "anti",
        },
        "basis": "full",
        "images": images,
    })
}

pub fn parse_basis_file(text: &str) -> Result<Vec<FinitaryMatrix>, IoError> {
    let v: Value = serde_json::from_str(text)?;
    let m = obj(&v)?;
    let field = parse_field(m)?;
    match get(m, "kind")?.as_str() {
        Some("basis") => {}
        other => return Err(bad(format!("expected kind \"basis\", got {other:?}"))),
    }
    let elements = get(m, "elements")?
        .as_array()
        .ok_or_else(|| bad("elements must be an array"))?;
    let mut out = Vec::with_capacity(elements.len());
    for e in elements {
        let entries = parse_entries(field, e, "basis element")?;
        out.push(FinitaryMatrix::from_entries(field, entries)?);
    }
    Ok(out)
}

pub fn basis_to_value(field: FieldSpec, elements: &[FinitaryMatrix]) -> Value {
    json!({
        "field": field,
        "kind": "basis",
        "elements": elements
            .iter()
            .map(|m| entries_value(m.iter().map(|(&p, v)| (p, v.clone()))))
            .collect::<Vec<Value>>(),
    })
}

//! infmat: verification front end for structured infinite-matrix algebra.
//!
//! Every subcommand reads exact JSON inputs, runs the corresponding library
//! operation, and emits a certificate: a plain-text transcript with an
//! embedded machine-readable JSON block. Exit code 0 means every claim
//! verified, 1 means a verification failed, 2 means the inputs were
//! malformed. Reruns on identical inputs produce byte-identical output.

mod certificate;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use infmat_core::automorphism::{
    check_involution_scalar, classify_lie_automorphism, classify_lie_automorphism_sl,
    decompose_anti_automorphism, recover_conjugator, AutomorphismError, ConjugatorWitness,
    LieAutClassification, LieVerdict, TableFlavor,
};
use infmat_core::derivation::{
    recover_witness_full, recover_witness_linear, recover_witness_skew, BasisKind,
    DerivationError, DerivationTable, DerivationWitness, Normalization,
};
use infmat_core::io::{
    self, matrix_to_value, parse_automorphism_table, parse_basis_file, parse_derivation_table,
    parse_matrix, AutTableFile, ParsedMatrix,
};
use infmat_core::linalg::DenseMatrix;
use infmat_core::matrix::{FinitaryMatrix, Involution, WindowedMatrix};
use infmat_core::ops::{check_class, Matrix, Verdict};
use infmat_core::perfectness::{
    ad_inverse_int, ad_inverse_nat, bracket_span_decompose, class_preservation_report,
    verify_ad_inverse_rows, PreservationReport, RegionReport, ShiftSpec,
};
use infmat_core::window::{ClassTag, IndexWindow, IndexingMode};

use certificate::Certificate;

#[derive(Parser)]
#[command(name = "infmat", version, about = "Exact verification of infinite-matrix algebra witnesses")]
struct Cli {
    /// Also write the certificate to this file (atomically).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for independent verification entries; aggregation
    /// order is deterministic regardless.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    N,
    Z,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SkewArg {
    T,
    S,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FlavorArg {
    Assoc,
    Lie,
    Anti,
}

#[derive(Subcommand)]
enum Cmd {
    /// Invert ad(E) on the input and verify [E, image] = input exactly.
    Tilde {
        #[arg(long, value_enum)]
        mode: ModeArg,
        /// Block size m for the N-mode shift (defaults to the file's
        /// block_size annotation, else 1).
        #[arg(long)]
        block: Option<i64>,
        #[arg(long)]
        input: PathBuf,
        /// Verify this precomputed image instead of computing one.
        #[arg(long)]
        atilde: Option<PathBuf>,
        /// Probe window LO:HI for the commutator check.
        #[arg(long, allow_hyphen_values = true)]
        verify_window: Option<String>,
    },
    /// Recover the inner witness y with d = ad(y) from a derivation table.
    RecoverDerivation {
        #[arg(long)]
        table: PathBuf,
        /// Pivot index whose diagonal entry is normalized to zero
        /// (defaults to the table's).
        #[arg(long, allow_hyphen_values = true)]
        pivot: Option<i64>,
        /// Project the witness onto the skew part for this involution.
        #[arg(long, value_enum)]
        skew: Option<SkewArg>,
    },
    /// Recover the conjugator of an automorphism table.
    RecoverAutomorphism {
        #[arg(long)]
        table: PathBuf,
        #[arg(long, value_enum)]
        flavor: FlavorArg,
    },
    /// Classify a Lie automorphism table as a conjugation or the negative
    /// of a transpose conjugation.
    ClassifyLie {
        #[arg(long)]
        table: PathBuf,
    },
    /// Decompose a target as a combination of pairwise basis brackets.
    Span {
        #[arg(long)]
        basis: PathBuf,
        #[arg(long)]
        target: PathBuf,
    },
    /// Check a claimed class tag against a matrix representation.
    CheckClass {
        #[arg(long)]
        input: PathBuf,
        /// finitary | rcf | column_finite | row_finite | band:K
        #[arg(long)]
        tag: String,
    },
    /// Check that x * x^* is a nonzero scalar matrix.
    CheckScalar {
        #[arg(long)]
        x: PathBuf,
        #[arg(long, value_enum)]
        involution: SkewArg,
    },
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().skip(1).collect();
    let cli = Cli::parse();
    let command_name = match &cli.command {
        Cmd::Tilde { .. } => "tilde",
        Cmd::RecoverDerivation { .. } => "recover-derivation",
        Cmd::RecoverAutomorphism { .. } => "recover-automorphism",
        Cmd::ClassifyLie { .. } => "classify-lie",
        Cmd::Span { .. } => "span",
        Cmd::CheckClass { .. } => "check-class",
        Cmd::CheckScalar { .. } => "check-scalar",
    };
    let mut cert = Certificate::new(command_name, argv);
    if let Err(msg) = dispatch(&cli, &mut cert) {
        cert.input_error(msg);
    } else {
        cert.finalize();
    }
    if let Err(e) = cert.emit(cli.out.as_deref()) {
        eprintln!("error writing certificate: {e}");
        return ExitCode::from(2);
    }
    ExitCode::from(cert.exit_status.code() as u8)
}

/// Input problems come back as Err and produce exit code 2; verification
/// outcomes are recorded as claims and decide between 0 and 1.
fn dispatch(cli: &Cli, cert: &mut Certificate) -> Result<(), String> {
    match &cli.command {
        Cmd::Tilde { mode, block, input, atilde, verify_window } => {
            run_tilde(cert, *mode, *block, input, atilde.as_deref(), verify_window.as_deref(), cli.jobs)
        }
        Cmd::RecoverDerivation { table, pivot, skew } => {
            run_recover_derivation(cert, table, *pivot, *skew)
        }
        Cmd::RecoverAutomorphism { table, flavor } => {
            run_recover_automorphism(cert, table, *flavor)
        }
        Cmd::ClassifyLie { table } => run_classify_lie(cert, table),
        Cmd::Span { basis, target } => run_span(cert, basis, target),
        Cmd::CheckClass { input, tag } => run_check_class(cert, input, tag),
        Cmd::CheckScalar { x, involution } => run_check_scalar(cert, x, *involution),
    }
}

fn read_input(cert: &mut Certificate, path: &Path) -> Result<String, String> {
    let bytes = std::fs::read(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    cert.record_input(path, &bytes);
    String::from_utf8(bytes).map_err(|_| format!("{} is not UTF-8", path.display()))
}

fn load_matrix(cert: &mut Certificate, path: &Path) -> Result<ParsedMatrix, String> {
    let text = read_input(cert, path)?;
    parse_matrix(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn parse_probe(text: &str, mode: IndexingMode) -> Result<IndexWindow, String> {
    let (lo, hi) = text
        .split_once(':')
        .ok_or_else(|| format!("verify window must be LO:HI, got {text:?}"))?;
    let lo: i64 = lo.trim().parse().map_err(|_| format!("bad window bound {lo:?}"))?;
    let hi: i64 = hi.trim().parse().map_err(|_| format!("bad window bound {hi:?}"))?;
    IndexWindow::new(lo, hi, mode).map_err(|e| e.to_string())
}

fn region_summary(report: &RegionReport) -> Value {
    let mismatches: Vec<Value> =
        report.mismatches.iter().take(10).map(|((i, j), d)| json!([i, j, d])).collect();
    json!({
        "window": [report.probe.lo(), report.probe.hi()],
        "agreed": report.agreed.len(),
        "skipped": report.skipped,
        "mismatch_count": report.mismatches.len(),
        "mismatches": mismatches,
    })
}

fn region_claim(cert: &mut Certificate, report: &RegionReport) {
    let pass = report.clean();
    let detail = match report.first_mismatch() {
        Some(((i, j), d)) => format!(
            "{} agreed, {} skipped, {} mismatched; first at ({i}, {j}): {d}",
            report.agreed.len(),
            report.skipped,
            report.mismatches.len()
        ),
        None => format!(
            "{} positions agreed exactly, {} skipped as uncertifiable",
            report.agreed.len(),
            report.skipped
        ),
    };
    cert.claim(
        format!(
            "[E, image] = input on [{}, {}]^2",
            report.probe.lo(),
            report.probe.hi()
        ),
        pass,
        detail,
    );
}

fn preservation_claims(cert: &mut Certificate, report: &PreservationReport) {
    for check in &report.checks {
        cert.claim(format!("class preservation: {}", check.name), check.passed, check.detail.clone());
    }
}

fn preservation_json(report: &PreservationReport) -> Value {
    Value::Array(
        report
            .checks
            .iter()
            .map(|c| json!({"name": c.name, "passed": c.passed, "detail": c.detail}))
            .collect(),
    )
}

/// Run the commutator check, chunking probe rows across the worker pool.
/// Chunks are merged in row order, so the report is independent of `jobs`.
fn verify_parallel(
    shift: ShiftSpec,
    image: &Matrix,
    a: &Matrix,
    probe: IndexWindow,
    jobs: usize,
) -> Result<RegionReport, String> {
    let rows: Vec<i64> = probe.indices().collect();
    let chunk = rows.len().div_ceil(jobs.max(1));
    let ranges: Vec<(i64, i64)> =
        rows.chunks(chunk.max(1)).map(|c| (c[0], *c.last().unwrap())).collect();
    let run = |(r_lo, r_hi): &(i64, i64)| -> Result<RegionReport, String> {
        verify_ad_inverse_rows(shift, image, a, probe, *r_lo, *r_hi).map_err(|e| e.to_string())
    };
    let parts: Vec<Result<RegionReport, String>> = if jobs > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| e.to_string())?;
        pool.install(|| {
            use rayon::prelude::*;
            ranges.par_iter().map(run).collect()
        })
    } else {
        ranges.iter().map(run).collect()
    };
    let mut merged = RegionReport {
        probe,
        agreed: Default::default(),
        mismatches: Vec::new(),
        skipped: 0,
    };
    for part in parts {
        let part = part?;
        merged.agreed.extend(part.agreed);
        merged.mismatches.extend(part.mismatches);
        merged.skipped += part.skipped;
    }
    Ok(merged)
}

fn run_tilde(
    cert: &mut Certificate,
    mode: ModeArg,
    block: Option<i64>,
    input: &Path,
    atilde: Option<&Path>,
    verify_window: Option<&str>,
    jobs: usize,
) -> Result<(), String> {
    let parsed = load_matrix(cert, input)?;
    let provided_image = match atilde {
        Some(path) => Some(load_matrix(cert, path)?.matrix),
        None => None,
    };
    match mode {
        ModeArg::N => {
            let block = block.or(parsed.block_size).unwrap_or(1);
            if block < 1 {
                return Err(format!("block size {block} must be >= 1"));
            }
            let shift = ShiftSpec::nat(block);
            let probe = match verify_window {
                Some(text) => Some(parse_probe(text, IndexingMode::NaturalsFromOne)?),
                None => None,
            };
            match provided_image {
                Some(image) => {
                    let probe = probe.unwrap_or(default_probe_for(&parsed.matrix, block)?);
                    let report = verify_parallel(shift, &image, &parsed.matrix, probe, jobs)?;
                    region_claim(cert, &report);
                    let preservation =
                        class_preservation_report(&parsed.matrix, &image, block, probe)
                            .map_err(|e| e.to_string())?;
                    preservation_claims(cert, &preservation);
                    cert.result = json!({
                        "mode": "n",
                        "block": block,
                        "image": matrix_to_value(&image),
                        "image_source": "provided",
                        "verified": region_summary(&report),
                        "class_report": preservation_json(&preservation),
                    });
                }
                None => {
                    let res = ad_inverse_nat(&parsed.matrix, block, probe)
                        .map_err(|e| e.to_string())?;
                    let image = res.image.to_matrix();
                    // re-run the verification through the worker pool so
                    // --jobs genuinely exercises it
                    let report = verify_parallel(shift, &image, &parsed.matrix, res.verified.probe, jobs)?;
                    region_claim(cert, &report);
                    preservation_claims(cert, &res.class_report);
                    cert.result = json!({
                        "mode": "n",
                        "block": block,
                        "image": matrix_to_value(&image),
                        "image_source": "computed",
                        "verified": region_summary(&report),
                        "class_report": preservation_json(&res.class_report),
                    });
                }
            }
        }
        ModeArg::Z => {
            let Matrix::Windowed(w) = &parsed.matrix else {
                return Err("z-mode input must be a band window (kind \"band\")".into());
            };
            if !matches!(w.tag(), ClassTag::Band { .. }) {
                return Err("z-mode input must carry a band tag".into());
            }
            let probe = match verify_window {
                Some(text) => Some(parse_probe(text, IndexingMode::Integers)?),
                None => None,
            };
            match provided_image {
                Some(image) => {
                    let probe = probe.unwrap_or(*w.window());
                    let report =
                        verify_parallel(ShiftSpec::int(), &image, &parsed.matrix, probe, jobs)?;
                    region_claim(cert, &report);
                    let preservation =
                        class_preservation_report(&parsed.matrix, &image, 1, probe)
                            .map_err(|e| e.to_string())?;
                    preservation_claims(cert, &preservation);
                    cert.result = json!({
                        "mode": "z",
                        "image": matrix_to_value(&image),
                        "image_source": "provided",
                        "verified": region_summary(&report),
                        "class_report": preservation_json(&preservation),
                    });
                }
                None => {
                    let res = ad_inverse_int(w, probe).map_err(|e| e.to_string())?;
                    let image = res.image.to_matrix();
                    let report = verify_parallel(
                        ShiftSpec::int(),
                        &image,
                        &parsed.matrix,
                        res.verified.probe,
                        jobs,
                    )?;
                    region_claim(cert, &report);
                    preservation_claims(cert, &res.class_report);
                    cert.result = json!({
                        "mode": "z",
                        "image": matrix_to_value(&image),
                        "image_source": "computed",
                        "verified": region_summary(&report),
                        "class_report": preservation_json(&res.class_report),
                    });
                }
            }
        }
    }
    Ok(())
}

fn default_probe_for(m: &Matrix, block: i64) -> Result<IndexWindow, String> {
    let bound = match m {
        Matrix::Finitary(f) => f
            .support_bounds()
            .map(|(_, rmax, _, cmax)| rmax.max(cmax))
            .unwrap_or(1),
        Matrix::Windowed(w) => w.window().hi(),
        Matrix::Tail(_) => return Err("tail inputs have no default probe".into()),
    }
    .max(block);
    IndexWindow::naturals(3 * bound).map_err(|e| e.to_string())
}

fn witness_matrix_json(w: &WindowedMatrix) -> Value {
    let mut rows: Vec<Vec<String>> = Vec::new();
    for i in w.window().indices() {
        rows.push(w.window().indices().map(|j| w.entry(i, j).to_string()).collect());
    }
    json!({
        "window": [w.window().lo(), w.window().hi()],
        "rows": rows,
    })
}

fn derivation_witness_json(witness: &DerivationWitness) -> Value {
    json!({
        "y": witness_matrix_json(&witness.y),
        "normalization": match witness.normalization {
            Normalization::PivotZero(p) => json!({"kind": "pivot_zero", "pivot": p}),
            Normalization::SkewPart { pivot } => json!({"kind": "skew_part", "pivot": pivot}),
        },
        "residual_checked": witness.residual.checked.len(),
        "freed": witness.freed.iter().map(|&(i, j)| json!([i, j])).collect::<Vec<Value>>(),
    })
}

fn derivation_error_is_verification(e: &DerivationError) -> bool {
    matches!(
        e,
        DerivationError::InconsistentTable { .. } | DerivationError::GuaranteeTooSmall { .. }
    )
}

fn run_recover_derivation(
    cert: &mut Certificate,
    table_path: &Path,
    pivot: Option<i64>,
    skew: Option<SkewArg>,
) -> Result<(), String> {
    let text = read_input(cert, table_path)?;
    let mut table = parse_derivation_table(&text).map_err(|e| e.to_string())?;
    if let Some(p) = pivot {
        if p != table.pivot() {
            table = DerivationTable::new(
                table.field(),
                *table.window(),
                table.basis_kind(),
                p,
                table.images().clone(),
            )
            .map_err(|e| format!("pivot {p} incompatible with the table: {e}"))?;
        }
    }
    let claim_name = "table is the window restriction of an inner derivation";
    let outcome = match skew {
        Some(arg) => {
            let inv = match arg {
                SkewArg::T => Involution::Transpose,
                SkewArg::S => Involution::Symplectic,
            };
            recover_witness_skew(&table, inv)
        }
        None => match table.basis_kind() {
            BasisKind::FullUnits => recover_witness_full(&table),
            _ => recover_witness_linear(&table, None),
        },
    };
    match outcome {
        Ok(witness) => {
            cert.claim(
                claim_name,
                true,
                format!(
                    "witness recovered; ad(y) matches all {} basis images exactly",
                    witness.residual.checked.len()
                ),
            );
            if !witness.freed.is_empty() {
                cert.claim(
                    "solution fully determined",
                    true,
                    format!(
                        "underdetermined: {} coordinates pinned to zero",
                        witness.freed.len()
                    ),
                );
            }
            cert.result = json!({
                "witness": derivation_witness_json(&witness),
            });
            Ok(())
        }
        Err(e) if derivation_error_is_verification(&e) => {
            cert.claim(claim_name, false, e.to_string());
            cert.result = json!({"failure": e.to_string()});
            Ok(())
        }
        Err(e) => Err(e.to_string()),
    }
}

fn conjugator_json(w: &ConjugatorWitness) -> Value {
    let dense_rows = |m: &DenseMatrix| -> Vec<Vec<String>> {
        (0..m.rows())
            .map(|r| (0..m.cols()).map(|c| m.get(r, c).to_string()).collect())
            .collect()
    };
    json!({
        "x": dense_rows(&w.x),
        "x_inv": dense_rows(&w.x_inverse),
        "verified": true,
        "verified_units": w.verified_units,
        "scale_note": w.scale_note,
    })
}

fn automorphism_error_is_verification(e: &AutomorphismError) -> bool {
    matches!(
        e,
        AutomorphismError::NotOrthogonalIdempotents { .. }
            | AutomorphismError::ZeroIdempotentImage
            | AutomorphismError::SingularFrame
            | AutomorphismError::VerificationFailure { .. }
            | AutomorphismError::NotScalar { .. }
    )
}

fn run_recover_automorphism(
    cert: &mut Certificate,
    table_path: &Path,
    flavor: FlavorArg,
) -> Result<(), String> {
    let text = read_input(cert, table_path)?;
    let file = parse_automorphism_table(&text).map_err(|e| e.to_string())?;
    match (flavor, file) {
        (FlavorArg::Assoc, AutTableFile::Units(table)) => {
            if table.flavor() != TableFlavor::Associative {
                return Err("table flavor does not match --flavor assoc".into());
            }
            let claim = "table is conjugation by an invertible window matrix";
            match recover_conjugator(&table) {
                Ok(witness) => {
                    cert.claim(
                        claim,
                        true,
                        format!("all {} unit images verified", witness.verified_units),
                    );
                    cert.result = json!({"witness": conjugator_json(&witness)});
                    Ok(())
                }
                Err(e) if automorphism_error_is_verification(&e) => {
                    cert.claim(claim, false, e.to_string());
                    cert.result = json!({"failure": e.to_string()});
                    Ok(())
                }
                Err(e) => Err(e.to_string()),
            }
        }
        (FlavorArg::Anti, AutTableFile::Units(table)) => {
            if table.flavor() != TableFlavor::Anti {
                return Err("table flavor does not match --flavor anti".into());
            }
            let claim = "table is the transpose composed with an inner automorphism";
            match decompose_anti_automorphism(&table) {
                Ok(witness) => {
                    cert.claim(
                        claim,
                        true,
                        format!(
                            "psi(a) = x^-1 a^t x verified on all {} unit images",
                            witness.verified_units
                        ),
                    );
                    cert.result = json!({"witness": conjugator_json(&witness)});
                    Ok(())
                }
                Err(e) if automorphism_error_is_verification(&e) => {
                    cert.claim(claim, false, e.to_string());
                    cert.result = json!({"failure": e.to_string()});
                    Ok(())
                }
                Err(e) => Err(e.to_string()),
            }
        }
        (FlavorArg::Lie, file) => classify_lie_into(cert, file),
        (_, AutTableFile::SlKeyed { .. }) => {
            Err("sl-keyed tables are only supported for the lie flavor".into())
        }
    }
}

fn run_classify_lie(cert: &mut Certificate, table_path: &Path) -> Result<(), String> {
    let text = read_input(cert, table_path)?;
    let file = parse_automorphism_table(&text).map_err(|e| e.to_string())?;
    classify_lie_into(cert, file)
}

fn classify_lie_into(cert: &mut Certificate, file: AutTableFile) -> Result<(), String> {
    let classification: LieAutClassification = match file {
        AutTableFile::Units(table) => {
            if table.flavor() != TableFlavor::Lie {
                return Err("classification expects a lie-flavor table".into());
            }
            classify_lie_automorphism(&table).map_err(|e| e.to_string())?
        }
        AutTableFile::SlKeyed { field, window, pivot, offdiag, h_images } => {
            classify_lie_automorphism_sl(field, window, pivot, &offdiag, &h_images)
                .map_err(|e| e.to_string())?
        }
    };
    let claim = "table is a conjugation or a negative-transpose conjugation";
    match classification.verdict {
        LieVerdict::TypeI(witness) => {
            cert.claim(claim, true, "type I: conjugation, witness verified on all units");
            cert.result = json!({"verdict": "type_i", "witness": conjugator_json(&witness)});
        }
        LieVerdict::TypeII(witness) => {
            cert.claim(
                claim,
                true,
                "type II: negative transpose conjugation, witness verified on all units",
            );
            cert.result = json!({"verdict": "type_ii", "witness": conjugator_json(&witness)});
        }
        LieVerdict::Unknown { conjugation_failure, negative_transpose_failure } => {
            cert.claim(
                claim,
                false,
                format!(
                    "conjugation attempt: {conjugation_failure}; negative-transpose attempt: {negative_transpose_failure}"
                ),
            );
            cert.result = json!({
                "verdict": "unknown",
                "conjugation_failure": conjugation_failure,
                "negative_transpose_failure": negative_transpose_failure,
            });
        }
    }
    Ok(())
}

fn run_span(cert: &mut Certificate, basis_path: &Path, target_path: &Path) -> Result<(), String> {
    let basis_text = read_input(cert, basis_path)?;
    let basis = parse_basis_file(&basis_text).map_err(|e| e.to_string())?;
    let target_parsed = load_matrix(cert, target_path)?;
    let target: FinitaryMatrix = match target_parsed.matrix {
        Matrix::Finitary(f) => f,
        Matrix::Windowed(w) => w.to_finitary().map_err(|e| {
            format!("span target must have known complete support: {e}")
        })?,
        Matrix::Tail(t) => t
            .to_finitary()
            .map_err(|_| "span target must be finitary, not an infinite tail".to_string())?,
    };
    let decomposition = bracket_span_decompose(&basis, &target).map_err(|e| e.to_string())?;
    let claim = "target lies in the span of pairwise basis brackets";
    match &decomposition.coefficients {
        Some(coeffs) => {
            cert.claim(
                claim,
                true,
                format!(
                    "exact combination over {} of {} bracket pairs (span rank {})",
                    coeffs.len(),
                    decomposition.pair_count,
                    decomposition.rank
                ),
            );
            let coeff_json: BTreeMap<String, String> = coeffs
                .iter()
                .map(|(&(u, v), s)| (format!("{u},{v}"), s.to_string()))
                .collect();
            cert.result = json!({
                "pairs": decomposition.pair_count,
                "rank": decomposition.rank,
                "coefficients": coeff_json,
            });
        }
        None => {
            cert.claim(
                claim,
                false,
                format!(
                    "target is outside the bracket span; span rank {}",
                    decomposition.rank
                ),
            );
            cert.result = json!({
                "pairs": decomposition.pair_count,
                "rank": decomposition.rank,
                "coefficients": Value::Null,
            });
        }
    }
    Ok(())
}

fn run_check_class(cert: &mut Certificate, input: &Path, tag_text: &str) -> Result<(), String> {
    let parsed = load_matrix(cert, input)?;
    let tag = io::parse_class_tag(tag_text).map_err(|e| e.to_string())?;
    let report = check_class(&parsed.matrix, tag);
    let (pass, verdict) = match report.verdict {
        Verdict::Pass => (true, "pass"),
        Verdict::VacuouslyConsistent => (true, "vacuously_consistent"),
        Verdict::Fail => (false, "fail"),
    };
    cert.claim(
        format!("representation is consistent with class {tag}"),
        pass,
        report.detail.clone(),
    );
    cert.result = json!({
        "tag": tag.to_string(),
        "verdict": verdict,
        "first_violation": report.first_violation.map(|(i, j)| json!([i, j])),
        "detail": report.detail,
    });
    Ok(())
}

fn run_check_scalar(cert: &mut Certificate, x_path: &Path, involution: SkewArg) -> Result<(), String> {
    let parsed = load_matrix(cert, x_path)?;
    let inv = match involution {
        SkewArg::T => Involution::Transpose,
        SkewArg::S => Involution::Symplectic,
    };
    let (dense, window) = match &parsed.matrix {
        Matrix::Windowed(w) => {
            let f = w.to_finitary_unchecked();
            (DenseMatrix::from_finitary(&f, w.window()), *w.window())
        }
        Matrix::Finitary(f) => {
            let (rmin, rmax, cmin, cmax) = f
                .support_bounds()
                .ok_or_else(|| "x must be nonzero".to_string())?;
            let lo = rmin.min(cmin);
            let hi = rmax.max(cmax);
            let window = if lo == 1 {
                IndexWindow::naturals(hi).map_err(|e| e.to_string())?
            } else {
                IndexWindow::integers(lo, hi).map_err(|e| e.to_string())?
            };
            (DenseMatrix::from_finitary(f, &window), window)
        }
        Matrix::Tail(_) => return Err("x must be a window matrix, not a tail".into()),
    };
    let claim = "x * x^* is a nonzero scalar multiple of the identity";
    match check_involution_scalar(&dense, &window, inv) {
        Ok(alpha) => {
            cert.claim(claim, true, format!("alpha = {alpha}"));
            cert.result = json!({"alpha": alpha.to_string()});
        }
        Err(e @ AutomorphismError::NotScalar { pos }) => {
            cert.claim(claim, false, e.to_string());
            cert.result = json!({"first_violation": [pos.0, pos.1], "failure": e.to_string()});
        }
        Err(e) => return Err(e.to_string()),
    }
    Ok(())
}

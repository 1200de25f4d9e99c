//! Acceptance suite: one test per criterion, each exact (zero tolerance) and
//! held to its runtime budget. Tests serialize on a mutex so the timings are
//! honest under any --test-threads setting, and each prints one PASS line.
//!
//! Criteria 1-9 exercise the library directly; criterion 10 drives the
//! binary and asserts exit code 1 on every injected fault.

use std::collections::HashMap;
use std::path::Path;
use std::process::Command;
use std::sync::Mutex;
use std::time::{Duration, Instant};

use infmat_core::automorphism::{
    check_involution_scalar, classify_lie_automorphism, decompose_anti_automorphism,
    projective_scale, recover_conjugator, AutomorphismTable, LieVerdict, TableFlavor,
};
use infmat_core::derivation::{
    inner_derivation_table, recover_witness_full, recover_witness_skew, skew_basis_matrices,
    BasisKind,
};
use infmat_core::io;
use infmat_core::matrix::{FinitaryMatrix, Involution};
use infmat_core::ops::{check_class, Matrix};
use infmat_core::perfectness::{
    ad_inverse_int, ad_inverse_nat_finitary, bracket_span_decompose, verify_ad_inverse, AdImage,
    ShiftSpec,
};
use infmat_core::sampling::Sampler;
use infmat_core::scalar::{FieldSpec, Scalar};
use infmat_core::tail::{TailMatrix, TailMode};
use infmat_core::window::{ClassTag, IndexWindow};

static GATE: Mutex<()> = Mutex::new(());

fn serialized() -> std::sync::MutexGuard<'static, ()> {
    GATE.lock().unwrap_or_else(|poisoned| poisoned.into_inner())
}

fn q() -> FieldSpec {
    FieldSpec::rationals()
}

fn gf(p: u64) -> FieldSpec {
    FieldSpec::prime_field(p).unwrap()
}

fn within_budget(name: &str, started: Instant, budget: Duration, detail: String) {
    let elapsed = started.elapsed();
    assert!(
        elapsed <= budget,
        "{name}: took {elapsed:?}, budget {budget:?}"
    );
    println!("ACCEPTANCE {name}: PASS — {detail} in {elapsed:?} (budget {budget:?})");
}

#[test]
fn criterion_01_nat_inverse_full_agreement() {
    let _guard = serialized();
    let started = Instant::now();
    let support = IndexWindow::naturals(12).unwrap();
    let probe = IndexWindow::naturals(36).unwrap();
    let mut sampler = Sampler::new(0xC1);
    let mut runs = 0usize;
    for block in [1i64, 2] {
        for _ in 0..200 {
            let a = sampler.finitary(q(), &support, 10, 5);
            let image = ad_inverse_nat_finitary(&a, block).unwrap();
            let report = verify_ad_inverse(
                ShiftSpec::nat(block),
                &Matrix::Tail(image),
                &Matrix::Finitary(a),
                probe,
            )
            .unwrap();
            assert!(report.complete(), "m={block}: {:?}", report.first_mismatch());
            assert_eq!(report.agreed.len(), 36 * 36);
            runs += 1;
        }
    }
    within_budget(
        "criterion 1 (N-mode inverse, [E, image] = input on [1,36])",
        started,
        Duration::from_secs(10),
        format!("{runs} random finitary matrices over Q, block sizes 1 and 2, exact"),
    );
}

#[test]
fn criterion_02_int_band_inverse() {
    let _guard = serialized();
    let started = Instant::now();
    let window = IndexWindow::integers(-20, 20).unwrap();
    let mut sampler = Sampler::new(0xC2);
    let mut total_agreed = 0usize;
    for case in 0..200 {
        let bandwidth = (case % 5) as i64;
        let a = sampler.band_window(gf(7), &window, bandwidth, 6, 55);
        let res = ad_inverse_int(&a, None).unwrap();
        assert!(
            res.verified.mismatches.is_empty(),
            "k={bandwidth}: {:?}",
            res.verified.first_mismatch()
        );
        assert!(res.verified.agreed.len() > 1200, "guarantee interior too small");
        let AdImage::Windowed(image) = &res.image else { panic!("windowed image expected") };
        let band_check = check_class(
            &Matrix::Windowed(image.clone()),
            ClassTag::Band { bandwidth: bandwidth + 1 },
        );
        assert!(band_check.passed(), "band growth violated: {:?}", band_check.first_violation);
        total_agreed += res.verified.agreed.len();
    }
    within_budget(
        "criterion 2 (Z-mode band inverse on [-20,20] over GF(7))",
        started,
        Duration::from_secs(10),
        format!("200 random band matrices, k <= 4, {total_agreed} exact positions, band growth <= k+1"),
    );
}

#[test]
fn criterion_03_tail_exactness_against_dense_oracle() {
    let _guard = serialized();
    let started = Instant::now();
    let support = IndexWindow::naturals(12).unwrap();
    let mut sampler = Sampler::new(0xC1); // same corpus as criterion 1, m = 1
    for _ in 0..200 {
        let a = sampler.finitary(q(), &support, 10, 5);
        let ints: HashMap<(i64, i64), i64> = a
            .iter()
            .map(|(&p, v)| (p, v.to_string().parse::<i64>().unwrap()))
            .collect();
        let image = ad_inverse_nat_finitary(&a, 1).unwrap();
        for i in 1..=200i64 {
            for j in 1..=200i64 {
                // references live on one diagonal inside the support square
                let k_lo = 0.max(i - 13).max(j - 12);
                let k_hi = (i - 2).min(j - 1);
                let mut want = 0i64;
                let mut k = k_lo;
                while k <= k_hi {
                    want += ints.get(&(i - 1 - k, j - k)).copied().unwrap_or(0);
                    k += 1;
                }
                assert!(
                    image.entry(i, j).eq_i64(want),
                    "at ({i},{j}): got {}, want {want}",
                    image.entry(i, j)
                );
            }
        }
        // every probed row and column has finite support: the core holds at
        // most 12 entries per line, each tail at most one
        let line_bound = image.tails().len() + 12;
        for idx in 1..=200i64 {
            assert!(image.row_support(idx).len() <= line_bound);
            assert!(image.col_support(idx).len() <= line_bound);
        }
    }
    within_budget(
        "criterion 3 (tail image = dense re-evaluation on [1,200]^2)",
        started,
        Duration::from_secs(20),
        "200 tail images compared entrywise on 40000 positions each, rows/columns finite".into(),
    );
}

#[test]
fn criterion_04_derivation_round_trip() {
    let _guard = serialized();
    let started = Instant::now();
    let window = IndexWindow::naturals(10).unwrap();
    let mut runs = 0usize;
    for field in [q(), gf(7)] {
        let mut sampler = Sampler::new(0xC4);
        for _ in 0..100 {
            let y = sampler.finitary(field, &window, 18, 5);
            let table = inner_derivation_table(&y, BasisKind::FullUnits, window, 1).unwrap();
            let witness = recover_witness_full(&table).unwrap();
            let expected = y
                .add_scaled(
                    &FinitaryMatrix::identity_on(field, &window),
                    &Scalar::one(field),
                    &y.entry(1, 1).neg(),
                )
                .unwrap();
            assert_eq!(witness.y.to_finitary_unchecked(), expected);
            assert_eq!(witness.residual.checked.len(), 100);
            runs += 1;
        }
    }
    within_budget(
        "criterion 4 (derivation round trip on [1,10], pivot 1)",
        started,
        Duration::from_secs(5),
        format!("{runs} random witnesses over Q and GF(7), recovered exactly as y - y_11 Id"),
    );
}

#[test]
fn criterion_05_skew_derivation_round_trip() {
    let _guard = serialized();
    let started = Instant::now();
    let window = IndexWindow::naturals(8).unwrap();
    let mut runs = 0usize;
    for (inv, kind) in [
        (Involution::Transpose, BasisKind::SkewTranspose),
        (Involution::Symplectic, BasisKind::SkewSymplectic),
    ] {
        for field in [q(), gf(7)] {
            let mut sampler = Sampler::new(0xC5);
            for _ in 0..50 {
                let y = sampler.skew(field, &window, inv, 4);
                let table = inner_derivation_table(&y, kind, window, 1).unwrap();
                let witness = recover_witness_skew(&table, inv).unwrap();
                let k = witness.y.to_finitary_unchecked();
                assert_eq!(k.involute(inv), k.neg(), "witness not skew");
                // ad(witness) matches the table exactly: same bracket with
                // every basis element
                let recheck = inner_derivation_table(&k, kind, window, 1).unwrap();
                assert_eq!(recheck.images(), table.images());
                runs += 1;
            }
        }
    }
    within_budget(
        "criterion 5 (skew witness round trip, window size 8)",
        started,
        Duration::from_secs(5),
        format!("{runs} skew witnesses (transpose and symplectic, Q and GF(7)), exact"),
    );
}

#[test]
fn criterion_06_automorphism_round_trip() {
    let _guard = serialized();
    let started = Instant::now();
    let mut runs = 0usize;
    for (field, n, cases) in [(gf(5), 8i64, 100), (q(), 6, 50)] {
        let window = IndexWindow::naturals(n).unwrap();
        let mut sampler = Sampler::new(0xC6);
        for _ in 0..cases {
            let x = sampler.invertible_dense(field, n as usize, 4);
            let table =
                AutomorphismTable::conjugation(&x, window, TableFlavor::Associative).unwrap();
            let witness = recover_conjugator(&table).unwrap();
            assert_eq!(witness.verified_units, (n * n) as usize);
            let lambda = projective_scale(&witness.x, &x).expect("witness equals lambda x");
            assert!(!lambda.is_zero());
            runs += 1;
        }
    }
    within_budget(
        "criterion 6 (conjugator recovery round trip)",
        started,
        Duration::from_secs(10),
        format!("{runs} tables (GF(5) n=8, Q n=6), all unit images verified, witness = lambda x"),
    );
}

#[test]
fn criterion_07_lie_classification() {
    let _guard = serialized();
    let started = Instant::now();
    let mut runs = 0usize;
    for (field, n) in [(q(), 6i64), (gf(5), 8)] {
        let window = IndexWindow::naturals(n).unwrap();
        let mut sampler = Sampler::new(0xC7);
        // type I: 25 from scaled signed permutations (checked against the
        // involution-scalar constraint), 25 from generic invertibles
        for case in 0..50 {
            let (x, scale) = if case < 25 {
                let scale = sampler.int_in(1, 4);
                (sampler.scaled_signed_permutation(field, n as usize, scale), Some(scale))
            } else {
                (sampler.invertible_dense(field, n as usize, 4), None)
            };
            let table = AutomorphismTable::conjugation(&x, window, TableFlavor::Lie).unwrap();
            let verdict = classify_lie_automorphism(&table).unwrap().verdict;
            let LieVerdict::TypeI(witness) = verdict else {
                panic!("conjugation table classified wrong: {verdict:?}")
            };
            let lambda = projective_scale(&witness.x, &x).expect("projective witness");
            if let Some(scale) = scale {
                let alpha =
                    check_involution_scalar(&witness.x, &window, Involution::Transpose).unwrap();
                let predicted = lambda
                    .mul(&lambda)
                    .unwrap()
                    .mul(&Scalar::from_i64(field, scale * scale))
                    .unwrap();
                assert_eq!(alpha, predicted, "x x^t scalar mismatch");
            }
            runs += 1;
        }
        // type II: negative transpose conjugations
        for _ in 0..50 {
            let x = sampler.invertible_dense(field, n as usize, 4);
            let table = AutomorphismTable::conjugation(&x, window, TableFlavor::Anti)
                .unwrap()
                .negated()
                .with_flavor(TableFlavor::Lie);
            let verdict = classify_lie_automorphism(&table).unwrap().verdict;
            let LieVerdict::TypeII(witness) = verdict else {
                panic!("negative-transpose table classified wrong: {verdict:?}")
            };
            assert!(projective_scale(&witness.x, &x).is_some());
            runs += 1;
        }
    }
    within_budget(
        "criterion 7 (Lie classification, both types, both fields)",
        started,
        Duration::from_secs(10),
        format!("{runs} tables classified correctly; involution scalar alpha as predicted"),
    );
}

#[test]
fn criterion_08_anti_automorphism_decomposition() {
    let _guard = serialized();
    let started = Instant::now();
    let n = 6usize;
    let window = IndexWindow::naturals(n as i64).unwrap();
    let mut sampler = Sampler::new(0xC8);
    for _ in 0..50 {
        let x = sampler.invertible_dense(gf(5), n, 4);
        let table = AutomorphismTable::conjugation(&x, window, TableFlavor::Anti).unwrap();
        let witness = decompose_anti_automorphism(&table).unwrap();
        assert_eq!(witness.verified_units, n * n);
        let lambda = projective_scale(&witness.x, &x).expect("witness equals lambda x");
        assert!(!lambda.is_zero());
    }
    within_budget(
        "criterion 8 (anti-automorphism decomposition over GF(5), n=6)",
        started,
        Duration::from_secs(5),
        "50 tables decomposed as transpose-then-conjugation, all unit images verified".into(),
    );
}

#[test]
fn criterion_09_perfectness_evidence() {
    let _guard = serialized();
    let started = Instant::now();
    // orthogonal and symplectic windows: bracket span fills the algebra
    let expected = [
        (Involution::Transpose, 5i64, 10usize, "o_5"),
        (Involution::Transpose, 6, 15, "o_6"),
        (Involution::Symplectic, 4, 10, "sp_4"),
        (Involution::Symplectic, 6, 21, "sp_6"),
    ];
    let mut detail = Vec::new();
    for (inv, n, dim, name) in expected {
        let window = IndexWindow::naturals(n).unwrap();
        let basis = skew_basis_matrices(q(), &window, inv).unwrap();
        assert_eq!(basis.len(), dim, "{name} basis size");
        // every basis vector decomposes into pairwise brackets
        for target in &basis {
            let dec = bracket_span_decompose(&basis, target).unwrap();
            assert!(dec.coefficients.is_some(), "{name}: basis vector outside bracket span");
            assert_eq!(dec.rank, dim, "{name} rank");
        }
        detail.push(format!("{name} rank {dim}"));
    }
    // gl_n: the bracket span is the traceless part and misses the identity
    for n in [2i64, 3, 4] {
        let window = IndexWindow::naturals(n).unwrap();
        let units: Vec<FinitaryMatrix> =
            window.positions().map(|(i, j)| FinitaryMatrix::unit(q(), i, j)).collect();
        let id = FinitaryMatrix::identity_on(q(), &window);
        let dec = bracket_span_decompose(&units, &id).unwrap();
        assert!(dec.coefficients.is_none(), "identity must sit outside the bracket span");
        assert_eq!(dec.rank, (n * n - 1) as usize, "gl_{n} bracket span rank");
        detail.push(format!("gl_{n} rank {} (identity excluded)", n * n - 1));
    }
    within_budget(
        "criterion 9 (bracket-span perfectness evidence)",
        started,
        Duration::from_secs(30),
        detail.join(", "),
    );
}

// --- criterion 10: fault sensitivity through the CLI ---

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_infmat"))
}

fn run_expect(dir: &Path, args: &[&str], expect: i32, what: &str) {
    let out = bin().current_dir(dir).args(args).output().expect("binary runs");
    assert_eq!(
        out.status.code(),
        Some(expect),
        "{what}: expected exit {expect}\nstdout:\n{}",
        String::from_utf8_lossy(&out.stdout)
    );
}

fn write(dir: &Path, name: &str, contents: &str) {
    std::fs::write(dir.join(name), contents).unwrap();
}

#[test]
fn criterion_10_fault_sensitivity() {
    let _guard = serialized();
    let started = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let dir = dir.path();
    let mut sampler = Sampler::new(0xCA);
    let faults_per_op = 10;

    // tilde, N mode: a correct input with a perturbed image
    let support = IndexWindow::naturals(8).unwrap();
    let a = sampler.finitary(q(), &support, 8, 5);
    let image = ad_inverse_nat_finitary(&a, 1).unwrap();
    write(dir, "a.mat", &io::write_matrix(&Matrix::Finitary(a.clone())));
    for t in 0..faults_per_op {
        let (r, c) = (sampler.int_in(1, 10), sampler.int_in(1, 10));
        let bump = TailMatrix::from_finitary(
            TailMode::NaturalsFromOne,
            1,
            FinitaryMatrix::from_entries(q(), vec![(r, c, Scalar::from_i64(q(), sampler.int_in(1, 5)))])
                .unwrap(),
        )
        .unwrap();
        let faulted = image.add(&bump).unwrap();
        write(dir, "bad.tail", &io::write_matrix(&Matrix::Tail(faulted)));
        run_expect(
            dir,
            &["tilde", "--mode", "n", "--input", "a.mat", "--atilde", "bad.tail", "--verify-window", "1:24"],
            1,
            &format!("tilde n fault {t} at ({r},{c})"),
        );
    }

    // tilde, Z mode
    let zwindow = IndexWindow::integers(-10, 10).unwrap();
    let band = sampler.band_window(gf(7), &zwindow, 2, 6, 60);
    write(dir, "band.mat", &io::write_matrix(&Matrix::Windowed(band.clone())));
    let zimage = match ad_inverse_int(&band, None).unwrap().image {
        AdImage::Windowed(w) => w,
        _ => unreachable!(),
    };
    for t in 0..faults_per_op {
        let i = sampler.int_in(-5, 5);
        let off = sampler.int_in(-2, 3); // stays inside bandwidth 3
        let j = i - off;
        let delta = Scalar::from_i64(gf(7), sampler.int_in(1, 6));
        let bump = FinitaryMatrix::from_entries(gf(7), vec![(i, j, delta)])
            .unwrap()
            .to_windowed(zwindow)
            .unwrap();
        // keep the band tag: add entry inside band k+1 via direct edit
        let mut entries: std::collections::BTreeMap<(i64, i64), Scalar> =
            zimage.entries().map(|(&p, v)| (p, v.clone())).collect();
        let cur = entries
            .remove(&(i, j))
            .unwrap_or_else(|| Scalar::zero(gf(7)))
            .add(bump.get(i, j).unwrap())
            .unwrap();
        if !cur.is_zero() {
            entries.insert((i, j), cur);
        }
        let faulted = infmat_core::matrix::WindowedMatrix::new(
            gf(7),
            zwindow,
            ClassTag::Band { bandwidth: 3 },
            entries,
            infmat_core::matrix::Guarantee::full(&zwindow),
        )
        .unwrap();
        write(dir, "bad.zimg", &io::write_matrix(&Matrix::Windowed(faulted)));
        run_expect(
            dir,
            &["tilde", "--mode", "z", "--input", "band.mat", "--atilde", "bad.zimg", "--verify-window=-10:10"],
            1,
            &format!("tilde z fault {t} at ({i},{j})"),
        );
    }

    // recover-derivation, full units
    let dwindow = IndexWindow::naturals(6).unwrap();
    let y = sampler.finitary(q(), &dwindow, 10, 4);
    let dtable = inner_derivation_table(&y, BasisKind::FullUnits, dwindow, 1).unwrap();
    for t in 0..faults_per_op {
        let mut images = dtable.images().clone();
        let keys: Vec<_> = images.keys().copied().collect();
        let key = keys[sampler.int_in(0, keys.len() as i64 - 1) as usize];
        let (r, c) = (sampler.int_in(1, 6), sampler.int_in(1, 6));
        let img = images.get_mut(&key).unwrap();
        let bumped = img.entry(r, c).add(&Scalar::from_i64(q(), sampler.int_in(1, 4))).unwrap();
        img.set(r, c, bumped);
        let bad = infmat_core::derivation::DerivationTable::new(
            q(),
            dwindow,
            BasisKind::FullUnits,
            1,
            images,
        )
        .unwrap();
        write(dir, "bad.dtbl", &serde_json::to_string(&io::derivation_table_to_value(&bad)).unwrap());
        run_expect(
            dir,
            &["recover-derivation", "--table", "bad.dtbl", "--pivot", "1"],
            1,
            &format!("recover-derivation fault {t}"),
        );
    }

    // recover-derivation, skew
    let swindow = IndexWindow::naturals(8).unwrap();
    let sk = sampler.skew(q(), &swindow, Involution::Transpose, 3);
    let stable = inner_derivation_table(&sk, BasisKind::SkewTranspose, swindow, 1).unwrap();
    for t in 0..faults_per_op {
        let mut images = stable.images().clone();
        let keys: Vec<_> = images.keys().copied().collect();
        let key = keys[sampler.int_in(0, keys.len() as i64 - 1) as usize];
        let (r, c) = (sampler.int_in(1, 8), sampler.int_in(1, 8));
        let img = images.get_mut(&key).unwrap();
        let bumped = img.entry(r, c).add(&Scalar::from_i64(q(), sampler.int_in(1, 4))).unwrap();
        img.set(r, c, bumped);
        let bad = infmat_core::derivation::DerivationTable::new(
            q(),
            swindow,
            BasisKind::SkewTranspose,
            1,
            images,
        )
        .unwrap();
        write(dir, "bad.stbl", &serde_json::to_string(&io::derivation_table_to_value(&bad)).unwrap());
        run_expect(
            dir,
            &["recover-derivation", "--table", "bad.stbl", "--skew", "t"],
            1,
            &format!("recover-derivation skew fault {t}"),
        );
    }

    // recover-automorphism assoc / anti, classify-lie
    let awindow = IndexWindow::naturals(5).unwrap();
    let x = sampler.invertible_dense(gf(5), 5, 3);
    for (flavor, flag, name) in [
        (TableFlavor::Associative, "assoc", "recover-automorphism assoc"),
        (TableFlavor::Anti, "anti", "recover-automorphism anti"),
    ] {
        let table = AutomorphismTable::conjugation(&x, awindow, flavor).unwrap();
        for t in 0..faults_per_op {
            let mut images = table.images().clone();
            let keys: Vec<_> = images.keys().copied().collect();
            let key = keys[sampler.int_in(0, keys.len() as i64 - 1) as usize];
            let (r, c) = (sampler.int_in(1, 5), sampler.int_in(1, 5));
            let img = images.get_mut(&key).unwrap();
            let bumped = img.entry(r, c).add(&Scalar::from_i64(gf(5), sampler.int_in(1, 4))).unwrap();
            img.set(r, c, bumped);
            let bad = AutomorphismTable::new(gf(5), awindow, flavor, images).unwrap();
            write(
                dir,
                "bad.atbl",
                &serde_json::to_string(&io::automorphism_table_to_value(&bad)).unwrap(),
            );
            run_expect(
                dir,
                &["recover-automorphism", "--table", "bad.atbl", "--flavor", flag],
                1,
                &format!("{name} fault {t}"),
            );
        }
    }
    let lie = AutomorphismTable::conjugation(&x, awindow, TableFlavor::Lie).unwrap();
    for t in 0..faults_per_op {
        let mut images = lie.images().clone();
        let keys: Vec<_> = images.keys().copied().collect();
        let key = keys[sampler.int_in(0, keys.len() as i64 - 1) as usize];
        let (r, c) = (sampler.int_in(1, 5), sampler.int_in(1, 5));
        let img = images.get_mut(&key).unwrap();
        let bumped = img.entry(r, c).add(&Scalar::from_i64(gf(5), sampler.int_in(1, 4))).unwrap();
        img.set(r, c, bumped);
        let bad = AutomorphismTable::new(gf(5), awindow, TableFlavor::Lie, images).unwrap();
        write(dir, "bad.ltbl", &serde_json::to_string(&io::automorphism_table_to_value(&bad)).unwrap());
        run_expect(
            dir,
            &["classify-lie", "--table", "bad.ltbl"],
            1,
            &format!("classify-lie fault {t}"),
        );
    }

    // span: gl_3 basis, target perturbed off the traceless span
    let gwindow = IndexWindow::naturals(3).unwrap();
    let units: Vec<FinitaryMatrix> =
        gwindow.positions().map(|(i, j)| FinitaryMatrix::unit(q(), i, j)).collect();
    write(dir, "gl3.basis", &serde_json::to_string(&io::basis_to_value(q(), &units)).unwrap());
    let in_span = FinitaryMatrix::unit(q(), 1, 2); // traceless, inside the span
    for t in 0..faults_per_op {
        let d = sampler.int_in(1, 3);
        let delta = Scalar::from_i64(q(), sampler.int_in(1, 5));
        let mut target = in_span.clone();
        target.set(d, d, target.entry(d, d).add(&delta).unwrap());
        write(dir, "bad_target.mat", &io::write_matrix(&Matrix::Finitary(target)));
        run_expect(
            dir,
            &["span", "--basis", "gl3.basis", "--target", "bad_target.mat"],
            1,
            &format!("span fault {t}"),
        );
    }

    // check-class: a band claim broken by one off-band entry
    for t in 0..faults_per_op {
        let mut m = sampler.band_window(q(), &IndexWindow::integers(-4, 4).unwrap(), 1, 4, 80);
        let mut f = FinitaryMatrix::zero(q());
        for (&p, v) in m.entries() {
            f.set(p.0, p.1, v.clone());
        }
        let r = sampler.int_in(-4, 1);
        let c = r + 2 + sampler.int_in(0, 1); // |r - c| >= 2 breaks band:1
        f.set(r, c, Scalar::from_i64(q(), sampler.int_in(1, 5)));
        m = f.to_windowed(IndexWindow::integers(-4, 4).unwrap()).unwrap();
        write(dir, "bad_band.mat", &io::write_matrix(&Matrix::Windowed(m)));
        run_expect(
            dir,
            &["check-class", "--input", "bad_band.mat", "--tag", "band:1"],
            1,
            &format!("check-class fault {t}"),
        );
    }

    // check-scalar: scaled signed permutation with one bumped entry
    for t in 0..faults_per_op {
        let scale = sampler.int_in(1, 5);
        let x = sampler.scaled_signed_permutation(q(), 4, scale);
        let window = IndexWindow::naturals(4).unwrap();
        let mut f = x.to_finitary(&window);
        let (r, c) = (sampler.int_in(1, 4), sampler.int_in(1, 4));
        f.set(r, c, f.entry(r, c).add(&Scalar::from_i64(q(), sampler.int_in(1, 4))).unwrap());
        write(
            dir,
            "bad_x.mat",
            &io::write_matrix(&Matrix::Windowed(f.to_windowed(window).unwrap())),
        );
        run_expect(
            dir,
            &["check-scalar", "--x", "bad_x.mat", "--involution", "t"],
            1,
            &format!("check-scalar fault {t}"),
        );
    }

    within_budget(
        "criterion 10 (fault sensitivity, exit code 1)",
        started,
        Duration::from_secs(5),
        format!("{faults_per_op} injected faults per verification op, all detected", ),
    );
}

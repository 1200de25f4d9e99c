//! Property suites for the algebraic identities the library is built on:
//! field axioms, bracket antisymmetry and Jacobi, involutions as
//! anti-homomorphisms, skew closure, and guarantee-region soundness.

use proptest::prelude::*;

use infmat_core::matrix::{FinitaryMatrix, Involution};
use infmat_core::ops::{check_class, Matrix};
use infmat_core::sampling::Sampler;
use infmat_core::scalar::{FieldSpec, Scalar};
use infmat_core::window::{ClassTag, IndexWindow};

fn fields() -> Vec<FieldSpec> {
    vec![FieldSpec::rationals(), FieldSpec::prime_field(7).unwrap()]
}

fn scalar_strategy(field: FieldSpec) -> impl Strategy<Value = Scalar> {
    (any::<i32>(), 1..400i32).prop_map(move |(n, d)| {
        let num = Scalar::from_i64(field, n as i64);
        let den = Scalar::from_i64(field, d as i64);
        if den.is_zero() {
            num
        } else {
            num.div(&den).expect("nonzero denominator")
        }
    })
}

proptest! {
    #[test]
    fn rational_field_axioms(
        a in scalar_strategy(FieldSpec::rationals()),
        b in scalar_strategy(FieldSpec::rationals()),
        c in scalar_strategy(FieldSpec::rationals()),
    ) {
        field_axioms(a, b, c)?;
    }

    #[test]
    fn gf7_field_axioms(
        a in scalar_strategy(FieldSpec::prime_field(7).unwrap()),
        b in scalar_strategy(FieldSpec::prime_field(7).unwrap()),
        c in scalar_strategy(FieldSpec::prime_field(7).unwrap()),
    ) {
        field_axioms(a, b, c)?;
    }

    #[test]
    fn scalar_text_round_trip(
        a in scalar_strategy(FieldSpec::rationals()),
        b in scalar_strategy(FieldSpec::prime_field(7).unwrap()),
    ) {
        for s in [a, b] {
            let text = s.to_string();
            let back = Scalar::parse(s.spec(), &text).unwrap();
            prop_assert_eq!(&back, &s);
            prop_assert_eq!(back.to_string(), text);
        }
    }
}

fn field_axioms(a: Scalar, b: Scalar, c: Scalar) -> Result<(), TestCaseError> {
    let ab_c = a.add(&b).unwrap().add(&c).unwrap();
    let a_bc = a.add(&b.add(&c).unwrap()).unwrap();
    prop_assert_eq!(ab_c, a_bc);

    let abc = a.mul(&b).unwrap().mul(&c).unwrap();
    let a_bc = a.mul(&b.mul(&c).unwrap()).unwrap();
    prop_assert_eq!(abc, a_bc);

    let left = a.mul(&b.add(&c).unwrap()).unwrap();
    let right = a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap();
    prop_assert_eq!(left, right);

    prop_assert!(a.add(&a.neg()).unwrap().is_zero());
    if !a.is_zero() {
        prop_assert!(a.mul(&a.inv().unwrap()).unwrap().is_one());
    }
    Ok(())
}

#[test]
fn bracket_antisymmetry_and_jacobi() {
    for field in fields() {
        let window = IndexWindow::naturals(6).unwrap();
        let mut sampler = Sampler::new(1001);
        for _ in 0..40 {
            let a = sampler.finitary(field, &window, 8, 5);
            let b = sampler.finitary(field, &window, 8, 5);
            let c = sampler.finitary(field, &window, 8, 5);

            let ab = a.bracket(&b).unwrap();
            let ba = b.bracket(&a).unwrap();
            assert_eq!(ab, ba.neg());

            let jac = a
                .bracket(&b.bracket(&c).unwrap())
                .unwrap()
                .add(&b.bracket(&c.bracket(&a).unwrap()).unwrap())
                .unwrap()
                .add(&c.bracket(&a.bracket(&b).unwrap()).unwrap())
                .unwrap();
            assert!(jac.is_zero(), "jacobi failed over {field}");
        }
    }
}

#[test]
fn bracket_identities_hold_on_windowed_guarantees() {
    // the same identities, entrywise on the guarantee region of band windows
    let field = FieldSpec::prime_field(7).unwrap();
    let window = IndexWindow::integers(-6, 6).unwrap();
    let mut sampler = Sampler::new(2002);
    for _ in 0..15 {
        let a = sampler.band_window(field, &window, 2, 6, 70);
        let b = sampler.band_window(field, &window, 1, 6, 70);
        let ab = a.bracket(&b).unwrap();
        let ba = b.bracket(&a).unwrap();
        for pos in ab.guarantee().iter() {
            if ba.guaranteed_at(pos) {
                assert_eq!(ab.entry(pos.0, pos.1), ba.entry(pos.0, pos.1).neg());
            }
        }
    }
}

#[test]
fn involutions_reverse_products() {
    for field in fields() {
        let window = IndexWindow::naturals(6).unwrap();
        let mut sampler = Sampler::new(3003);
        for inv in [Involution::Transpose, Involution::Symplectic] {
            for _ in 0..25 {
                let a = sampler.finitary(field, &window, 7, 5);
                let b = sampler.finitary(field, &window, 7, 5);
                let lhs = a.mul(&b).unwrap().involute(inv);
                let rhs = b.involute(inv).mul(&a.involute(inv)).unwrap();
                assert_eq!(lhs, rhs);
                assert_eq!(a.involute(inv).involute(inv), a);
            }
        }
    }
}

#[test]
fn skew_elements_close_under_bracket() {
    for field in fields() {
        let window = IndexWindow::naturals(6).unwrap();
        let mut sampler = Sampler::new(4004);
        for inv in [Involution::Transpose, Involution::Symplectic] {
            for _ in 0..20 {
                let a = sampler.skew(field, &window, inv, 4);
                let b = sampler.skew(field, &window, inv, 4);
                let br = a.bracket(&b).unwrap();
                assert_eq!(br.involute(inv), br.neg(), "bracket left the skew algebra");
            }
        }
    }
}

#[test]
fn multiply_guarantee_sound_under_window_growth() {
    // guaranteed entries of a product on a small window must equal the same
    // product recomputed on any strictly larger window
    let field = FieldSpec::prime_field(7).unwrap();
    let big = IndexWindow::integers(-9, 9).unwrap();
    let small = IndexWindow::integers(-5, 5).unwrap();
    let mut sampler = Sampler::new(5005);
    for _ in 0..20 {
        let a_big = sampler.band_window(field, &big, 2, 6, 60);
        let b_big = sampler.band_window(field, &big, 1, 6, 60);
        let p_big = a_big.multiply(&b_big).unwrap();
        let a_small = a_big.truncate_to(small).unwrap();
        let b_small = b_big.truncate_to(small).unwrap();
        let p_small = a_small.multiply(&b_small).unwrap();
        for pos in p_small.guarantee().iter() {
            assert_eq!(
                p_small.entry(pos.0, pos.1),
                p_big.entry(pos.0, pos.1),
                "guaranteed entry drifted at {pos:?}"
            );
        }
    }
}

#[test]
fn band_products_pass_band_check() {
    let field = FieldSpec::rationals();
    let window = IndexWindow::integers(-7, 7).unwrap();
    let mut sampler = Sampler::new(6006);
    for (ka, kb) in [(0, 1), (1, 1), (2, 1), (2, 3)] {
        let a = sampler.band_window(field, &window, ka, 4, 65);
        let b = sampler.band_window(field, &window, kb, 4, 65);
        let prod = a.multiply(&b).unwrap();
        assert_eq!(prod.tag(), ClassTag::Band { bandwidth: ka + kb });
        let report = check_class(&Matrix::Windowed(prod), ClassTag::Band { bandwidth: ka + kb });
        assert!(report.passed());
    }
}

#[test]
fn skew_projection_reassembles() {
    for field in fields() {
        let window = IndexWindow::naturals(8).unwrap();
        let mut sampler = Sampler::new(7007);
        for inv in [Involution::Transpose, Involution::Symplectic] {
            for _ in 0..15 {
                let a = sampler.finitary(field, &window, 12, 5);
                let (h, k) = a.skew_project(inv);
                assert_eq!(h.add(&k).unwrap(), a);
                assert_eq!(h.involute(inv), h);
                assert_eq!(k.involute(inv), k.neg());
            }
        }
    }
}

#[test]
fn identity_examples_from_unit_algebra() {
    // a + 0 = a, a - a = 0, and the matrix-unit product rule, over both fields
    for field in fields() {
        let e12 = FinitaryMatrix::unit(field, 1, 2);
        let e23 = FinitaryMatrix::unit(field, 2, 3);
        assert_eq!(e12.mul(&e23).unwrap(), FinitaryMatrix::unit(field, 1, 3));
        assert!(e23.mul(&e12).unwrap().is_zero());
        assert_eq!(e12.add(&FinitaryMatrix::zero(field)).unwrap(), e12);
        assert!(e12.sub(&e12).unwrap().is_zero());
    }
}

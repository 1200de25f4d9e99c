//! Deterministic pseudo-random generators for test corpora. Everything is
//! seeded explicitly so property suites and the acceptance runs are
//! reproducible bit for bit.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::derivation::{basis_elements, BasisKind};
use crate::linalg::DenseMatrix;
use crate::matrix::{FinitaryMatrix, Guarantee, Involution, WindowedMatrix};
use crate::scalar::{FieldSpec, Scalar};
use crate::window::{ClassTag, IndexWindow};

pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn int_in(&mut self, lo: i64, hi: i64) -> i64 {
        self.rng.gen_range(lo..=hi)
    }

    /// Integer-valued scalar with numerator in [lo, hi].
    pub fn int_scalar(&mut self, field: FieldSpec, lo: i64, hi: i64) -> Scalar {
        Scalar::from_i64(field, self.int_in(lo, hi))
    }

    pub fn nonzero_int_scalar(&mut self, field: FieldSpec, lo: i64, hi: i64) -> Scalar {
        loop {
            let s = self.int_scalar(field, lo, hi);
            if !s.is_zero() {
                return s;
            }
        }
    }

    /// A rational with small numerator and denominator (over GF(p) this is a
    /// ratio of residues).
    pub fn small_fraction(&mut self, field: FieldSpec, bound: i64) -> Scalar {
        let num = self.int_scalar(field, -bound, bound);
        let den = self.nonzero_int_scalar(field, 1, bound);
        num.div(&den).expect("nonzero denominator")
    }

    /// Finitary matrix with about `count` entries in the window.
    pub fn finitary(
        &mut self,
        field: FieldSpec,
        window: &IndexWindow,
        count: usize,
        bound: i64,
    ) -> FinitaryMatrix {
        let mut m = FinitaryMatrix::zero(field);
        for _ in 0..count {
            let i = self.int_in(window.lo(), window.hi());
            let j = self.int_in(window.lo(), window.hi());
            m.set(i, j, self.int_scalar(field, -bound, bound));
        }
        m
    }

    /// Fully guaranteed band window with roughly `fill` of the band set.
    pub fn band_window(
        &mut self,
        field: FieldSpec,
        window: &IndexWindow,
        bandwidth: i64,
        bound: i64,
        fill_percent: u32,
    ) -> WindowedMatrix {
        let mut entries = std::collections::BTreeMap::new();
        for (i, j) in window.positions() {
            if (i - j).abs() > bandwidth {
                continue;
            }
            if self.rng.gen_range(0..100) >= fill_percent {
                continue;
            }
            let v = self.int_scalar(field, -bound, bound);
            if !v.is_zero() {
                entries.insert((i, j), v);
            }
        }
        WindowedMatrix::new(
            field,
            *window,
            ClassTag::Band { bandwidth },
            entries,
            Guarantee::full(window),
        )
        .expect("band entries respect the band")
    }

    pub fn dense(&mut self, field: FieldSpec, n: usize, bound: i64) -> DenseMatrix {
        let mut m = DenseMatrix::zeros(field, n, n);
        for r in 0..n {
            for c in 0..n {
                m.set(r, c, self.int_scalar(field, -bound, bound));
            }
        }
        m
    }

    /// Rejection-sample an invertible matrix.
    pub fn invertible_dense(&mut self, field: FieldSpec, n: usize, bound: i64) -> DenseMatrix {
        loop {
            let m = self.dense(field, n, bound);
            if m.invert().is_ok() {
                return m;
            }
        }
    }

    /// Random element of the skew algebra for the involution on this window.
    pub fn skew(
        &mut self,
        field: FieldSpec,
        window: &IndexWindow,
        inv: Involution,
        bound: i64,
    ) -> FinitaryMatrix {
        let kind = match inv {
            Involution::Transpose => BasisKind::SkewTranspose,
            Involution::Symplectic => BasisKind::SkewSymplectic,
        };
        let basis = basis_elements(kind, field, window, window.lo()).expect("valid window");
        let mut out = FinitaryMatrix::zero(field);
        for (_, b) in basis {
            let c = self.int_scalar(field, -bound, bound);
            if !c.is_zero() {
                out = out
                    .add_scaled(&b, &Scalar::one(field), &c)
                    .expect("same field");
            }
        }
        out
    }

    /// scale * (signed permutation): satisfies x x^t = scale^2 * Id.
    pub fn scaled_signed_permutation(
        &mut self,
        field: FieldSpec,
        n: usize,
        scale: i64,
    ) -> DenseMatrix {
        let mut cols: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            let j = self.rng.gen_range(0..=i);
            cols.swap(i, j);
        }
        let mut m = DenseMatrix::zeros(field, n, n);
        for (r, &c) in cols.iter().enumerate() {
            let sign = if self.rng.gen_bool(0.5) { 1 } else { -1 };
            m.set(r, c, Scalar::from_i64(field, sign * scale));
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sampling_is_deterministic() {
        let field = FieldSpec::prime_field(7).unwrap();
        let w = IndexWindow::naturals(6).unwrap();
        let a = Sampler::new(42).finitary(field, &w, 10, 5);
        let b = Sampler::new(42).finitary(field, &w, 10, 5);
        assert_eq!(a, b);
    }

    #[test]
    fn skew_samples_are_skew() {
        let field = FieldSpec::rationals();
        let w = IndexWindow::naturals(6).unwrap();
        let mut sampler = Sampler::new(7);
        for inv in [Involution::Transpose, Involution::Symplectic] {
            for _ in 0..5 {
                let k = sampler.skew(field, &w, inv, 4);
                assert_eq!(k.involute(inv), k.neg());
            }
        }
    }

    #[test]
    fn signed_permutation_is_orthogonal_up_to_scale() {
        let field = FieldSpec::rationals();
        let mut sampler = Sampler::new(3);
        let x = sampler.scaled_signed_permutation(field, 5, 3);
        let prod = x.mul(&x.transpose()).unwrap();
        for r in 0..5 {
            for c in 0..5 {
                let want = if r == c { Scalar::from_i64(field, 9) } else { Scalar::zero(field) };
                assert_eq!(prod.get(r, c), &want);
            }
        }
    }
}

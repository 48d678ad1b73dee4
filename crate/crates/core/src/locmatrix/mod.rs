//! Finite stages of locally matrix algebras over exact fields.
//!
//! Matrices live in `M_n(F)` for `F` one of `GF(2)`, `GF(3)`, `GF(5)` or
//! `Q`. A unital embedding `M_n → M_{nm}` is `a ↦ a ⊗ I_m`, with the
//! row-major index convention of [`crate::tensor::TensorIndexing`].

mod cartan;
mod chain;
pub mod field;
mod matrix;

use thiserror::Error;

use crate::hamming::{HammingError, Rank};
use crate::steinitz::SteinitzError;

pub use cartan::{
    conjugate_cartans, conjugation_maps, count_cartans, enumerate_cartans, gl_order,
    idempotent_hamming_space, is_cartan, lemma2_witness, normalizer_action, tensor_cartan,
    CartanCheck, CartanCount, CartanFrame, EReport, FrameDiagnostic, IdempotentSpace,
    Lemma2Witness, NormalizerAction, MAX_ENUMERATED_MATRICES,
};
pub use chain::{
    build_theorem3_chain, steinitz_of_algebra_chain, theorem4_check, verify_theorem3,
    GeneralCartanChain, LevelCheck, Tallies, Theorem3Report, Theorem3Violation, Theorem4Report,
    VerifyMode, DEFAULT_BUDGET, MAX_THEOREM4_PRODUCT,
};
pub use field::{Field, FieldTag, Gf, Gf2, Gf3, Gf5, Q};
pub use matrix::{nullspace, rref, Matrix};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LocMatrixError {
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error("expected a {expected}x{expected} matrix, found {found}x{found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is singular")]
    Singular,
    #[error("not a Cartan frame: {0:?}")]
    InvalidFrame(Vec<FrameDiagnostic>),
    #[error("size list is empty")]
    EmptySizes,
    #[error("sizes must be positive")]
    ZeroSize,
    #[error("{lower} does not divide {upper}")]
    NotDivisible { lower: usize, upper: usize },
    #[error("over a finite field each step needs n_i^2 <= n_(i+1), but {lower}^2 > {upper}")]
    SizeCondition { lower: usize, upper: usize },
    #[error("M_{m} has only {available} Cartan frames, {needed} needed")]
    InsufficientCartans { m: usize, needed: usize, available: usize },
    #[error("{0} needs a finite field")]
    InfiniteField(&'static str),
    #[error("{what}: {size} exceeds the cap {cap}")]
    TooLarge { what: &'static str, size: u128, cap: u128 },
    #[error("enumeration needs {needed} candidates, budget is {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },
    #[error("level {level} has no level above it in a chain of depth {depth}")]
    LevelOutOfRange { level: usize, depth: usize },
    #[error("the left factor must have size at least 2, got {0}")]
    LeftFactorTooSmall(usize),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error(transparent)]
    Steinitz(#[from] SteinitzError),
    #[error(transparent)]
    Hamming(#[from] HammingError),
}

/// `rank(a) / n` as an exact rational.
pub fn relative_rank<F: Field>(a: &Matrix<F>) -> Rank {
    if a.n() == 0 {
        return Rank::zero();
    }
    Rank::ratio(a.rank(), a.n())
}

/// The unital embedding `a ↦ a ⊗ I_m`.
pub fn embed<F: Field>(a: &Matrix<F>, m: usize) -> Matrix<F> {
    a.kron(&Matrix::identity(m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Rank via determinant-free minor search: the largest k such that some
    /// k×k submatrix is invertible (checked by brute force expansion).
    fn minor_rank<F: Field>(a: &Matrix<F>) -> usize {
        fn det<F: Field>(m: &[Vec<F>]) -> F {
            if m.is_empty() {
                return F::one();
            }
            let mut acc = F::zero();
            for (j, x) in m[0].iter().enumerate() {
                let minor: Vec<Vec<F>> = m[1..]
                    .iter()
                    .map(|r| r.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, v)| v.clone()).collect())
                    .collect();
                let term = x.mul(&det(&minor));
                acc = if j % 2 == 0 { acc.add(&term) } else { acc.sub(&term) };
            }
            acc
        }
        fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
            (0u32..1 << n).filter(|s| s.count_ones() as usize == k).map(|s| (0..n).filter(|i| s >> i & 1 == 1).collect()).collect()
        }
        let n = a.n();
        (1..=n)
            .rev()
            .find(|&k| {
                subsets(n, k).iter().any(|rs| {
                    subsets(n, k).iter().any(|cs| {
                        let m: Vec<Vec<F>> = rs.iter().map(|&r| cs.iter().map(|&c| a.get(r, c).clone()).collect()).collect();
                        !det(&m).is_zero()
                    })
                })
            })
            .unwrap_or(0)
    }

    #[test]
    fn relative_rank_examples() {
        assert_eq!(relative_rank(&Matrix::<Q>::identity(3)), Rank::one());
        assert_eq!(relative_rank(&Matrix::<Gf2>::zero(3)), Rank::zero());
        assert_eq!(relative_rank(&Matrix::<Q>::unit(2, 0, 0)), Rank::ratio(1, 2));
        let e = embed(&Matrix::<Gf3>::unit(2, 0, 0), 2);
        assert_eq!(e.rank(), 2);
        assert_eq!(relative_rank(&e), Rank::ratio(1, 2));
        assert!(embed(&Matrix::<Q>::identity(3), 2).is_identity());
        assert!(embed(&Matrix::<Q>::zero(3), 4).is_zero());
    }

    #[test]
    fn rank_matches_minor_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for n in 1..=4 {
            for _ in 0..20 {
                let a = Matrix::<Q>::random(n, &mut rng);
                assert_eq!(a.rank(), minor_rank(&a));
                let b = Matrix::<Gf2>::random(n, &mut rng);
                assert_eq!(b.rank(), minor_rank(&b));
            }
        }
    }

    #[test]
    fn idempotent_rank_properties() {
        let e = Matrix::<Q>::unit(3, 0, 0);
        let f = Matrix::<Q>::unit(3, 2, 2);
        assert_eq!(
            relative_rank(&e.add(&f)).into_value(),
            relative_rank(&e).into_value() + relative_rank(&f).into_value()
        );
    }

    proptest::proptest! {
        #[test]
        fn embedding_preserves_relative_rank(seed: u64, n in 1usize..=5, m in 1usize..=4) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = Matrix::<Gf2>::random(n, &mut rng);
            proptest::prop_assert_eq!(relative_rank(&embed(&a, m)), relative_rank(&a));
            let b = Matrix::<Q>::random(n, &mut rng);
            proptest::prop_assert_eq!(relative_rank(&embed(&b, m)), relative_rank(&b));
            let c = Matrix::<Gf3>::random(n, &mut rng);
            proptest::prop_assert_eq!(relative_rank(&embed(&c, m)), relative_rank(&c));
        }
    }
}

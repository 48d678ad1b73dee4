//! Tensor products of standard Hamming spaces.
//!
//! Atom `(i, j)` of `H_n ⊗ H_m` is identified with atom `i·m + j` of
//! `H_{nm}` (row-major). Every function in the crate that builds a product
//! uses this identification.

use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;
use thiserror::Error;

use crate::hamming::{HElement, HammingError, OrthogonalCover, Rank, StandardSpace};

const MAX_PAIR_CHECKS: usize = 1 << 22;

/// Largest `n·m` for which [`tensor_space_iso`] enumerates everything.
pub const MAX_EXHAUSTIVE_PRODUCT: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TensorError {
    #[error(transparent)]
    Hamming(#[from] HammingError),
    #[error("element of H_{got} is not in H_{left} ⊗ H_{right}")]
    WrongProductSpace { got: usize, left: usize, right: usize },
    #[error("element is not representable over the given covers: {0}")]
    NotRepresentable(String),
    #[error("H_{n} ⊗ H_{m} exceeds the exhaustive bound {cap}")]
    TooLarge { n: usize, m: usize, cap: usize },
}

/// Row-major identification of `{0..n-1} × {0..m-1}` with `{0..nm-1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TensorIndexing {
    pub n: usize,
    pub m: usize,
}

impl TensorIndexing {
    pub fn new(n: usize, m: usize) -> Self {
        Self { n, m }
    }

    pub fn size(self) -> usize {
        self.n * self.m
    }

    pub fn index(self, i: usize, j: usize) -> usize {
        debug_assert!(i < self.n && j < self.m);
        i * self.m + j
    }

    pub fn pair(self, k: usize) -> (usize, usize) {
        (k / self.m, k % self.m)
    }
}

fn to_mask(x: &HElement) -> u64 {
    x.support().fold(0, |acc, k| acc | 1 << k)
}

/// Kronecker product of bit patterns: bit `(i, j)` is `a_i AND b_j`.
pub fn tensor_element(a: &HElement, b: &HElement) -> HElement {
    let idx = TensorIndexing::new(a.n(), b.n());
    let mut support = Vec::with_capacity(a.weight() * b.weight());
    for i in a.support() {
        for j in b.support() {
            support.push(idx.index(i, j));
        }
    }
    HElement::from_support(idx.size(), &support).expect("indices in range")
}

/// Rank of `x ∈ H_n ⊗ H_m` computed as `Σ α_ij r(e_i) r(f_j)` from its
/// coefficients over the products `e_i ⊗ f_j` of two orthogonal covers.
///
/// Each coefficient is read off from `x·(e_i ⊗ f_j)`, which must be either
/// zero or the whole product; the products selected this way must sum to
/// `x`.
pub fn rank_via_cover(
    x: &HElement,
    left: &OrthogonalCover,
    right: &OrthogonalCover,
) -> Result<Rank, TensorError> {
    let (n, m) = (left.n(), right.n());
    if x.n() != n * m {
        return Err(TensorError::WrongProductSpace { got: x.n(), left: n, right: m });
    }
    let mut total = BigRational::zero();
    let mut covered = HElement::zero(x.n());
    for e in left.members() {
        for f in right.members() {
            let product = tensor_element(e, f);
            let meet = x.mul(&product)?;
            if meet.is_zero() {
                continue;
            }
            if meet != product {
                return Err(TensorError::NotRepresentable(format!(
                    "x meets {e} ⊗ {f} only partially"
                )));
            }
            total += e.rank().into_value() * f.rank().into_value();
            covered = covered.add(&product)?;
        }
    }
    if covered != *x {
        return Err(TensorError::NotRepresentable(
            "x has atoms outside the span of the covers".into(),
        ));
    }
    Ok(Rank::new(total)?)
}

#[derive(Debug, Clone, Serialize)]
pub struct RefinementReport {
    pub first: Rank,
    pub second: Rank,
    pub common: Rank,
    pub direct: Rank,
    pub agree: bool,
}

/// Computes the cover rank of `x` over two pairs of covers and over their
/// common refinement, and compares all three with the direct rank in
/// `H_{nm}`.
pub fn refine_and_compare(
    x: &HElement,
    first: (&OrthogonalCover, &OrthogonalCover),
    second: (&OrthogonalCover, &OrthogonalCover),
) -> Result<RefinementReport, TensorError> {
    let r1 = rank_via_cover(x, first.0, first.1)?;
    let r2 = rank_via_cover(x, second.0, second.1)?;
    let left = first.0.common_refinement(second.0)?;
    let right = first.1.common_refinement(second.1)?;
    let common = rank_via_cover(x, &left, &right)?;
    let direct = x.rank();
    let agree = r1 == r2 && r2 == common && common == direct;
    Ok(RefinementReport { first: r1, second: r2, common, direct, agree })
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct IsoReport {
    pub n: usize,
    pub m: usize,
    pub pure_tensors_checked: usize,
    pub pairs_checked: usize,
    pub pairs_exhaustive: bool,
    pub atom_bijection: bool,
    pub failures: Vec<String>,
}

impl IsoReport {
    pub fn passed(&self) -> bool {
        self.atom_bijection && self.failures.is_empty()
    }
}

/// Exhaustively checks that the row-major map `H_n ⊗ H_m → H_{nm}` is a
/// rank-preserving Boolean-algebra isomorphism.
///
/// Covered: the atom map is a bijection; every pure tensor has rank
/// `r(a)·r(b)`; products of pure tensors are pure tensors of products; and
/// orthogonal sums in either factor distribute.
pub fn tensor_space_iso(n: usize, m: usize) -> Result<IsoReport, TensorError> {
    let sn = StandardSpace::new(n)?;
    let sm = StandardSpace::new(m)?;
    if n * m > MAX_EXHAUSTIVE_PRODUCT {
        return Err(TensorError::TooLarge { n, m, cap: MAX_EXHAUSTIVE_PRODUCT });
    }
    let mut report = IsoReport { n, m, ..Default::default() };

    let idx = TensorIndexing::new(n, m);
    let mut hit = vec![false; n * m];
    for i in 0..n {
        for j in 0..m {
            let t = tensor_element(&sn.atom(i), &sm.atom(j));
            if t != HElement::atom(n * m, idx.index(i, j)) {
                report.failures.push(format!("atom ({i},{j}) maps to {t}"));
            }
            hit[idx.index(i, j)] = true;
        }
    }
    report.atom_bijection = hit.iter().all(|&h| h);

    // Elements are enumerated in mask order, so `left[i].mul(&left[k])` is
    // `left[i & k]` and the product table can be indexed by masks.
    let left: Vec<HElement> = sn.elements()?.collect();
    let right: Vec<HElement> = sm.elements()?.collect();
    let cols = right.len();
    let table: Vec<u64> = left
        .iter()
        .flat_map(|a| right.iter().map(move |b| to_mask(&tensor_element(a, b))))
        .collect();
    let at = |i: usize, j: usize| table[i * cols + j];
    for (i, a) in left.iter().enumerate() {
        for (j, b) in right.iter().enumerate() {
            report.pure_tensors_checked += 1;
            let expected = a.rank().into_value() * b.rank().into_value();
            if Rank::ratio(at(i, j).count_ones() as usize, n * m).into_value() != expected {
                report.failures.push(format!("rank of {a} ⊗ {b}"));
            }
        }
    }
    // pair checks are exhaustive up to MAX_PAIR_CHECKS pairs, strided beyond
    let total = table.len();
    let stride = (total * total).div_ceil(MAX_PAIR_CHECKS);
    report.pairs_exhaustive = stride == 1;
    for t in 0..total {
        let (i, j) = (t / cols, t % cols);
        for u in (0..total).step_by(stride) {
            let (k, l) = (u / cols, u % cols);
            report.pairs_checked += 1;
            if at(i, j) & at(k, l) != at(i & k, j & l) {
                report.failures.push(format!("product of {}⊗{} and {}⊗{}", left[i], right[j], left[k], right[l]));
            }
            if i & k == 0 && at(i | k, j) != at(i, j) ^ at(k, j) {
                report.failures.push(format!("left sum {} + {} with {}", left[i], left[k], right[j]));
            }
            if j & l == 0 && at(i, j | l) != at(i, j) ^ at(i, l) {
                report.failures.push(format!("right sum {} + {} with {}", right[j], right[l], left[i]));
            }
        }
    }
    // every element of H_{nm} is the orthogonal sum of the atom tensors below it
    for x in StandardSpace::new(n * m)?.elements()? {
        let rebuilt = x.support().fold(HElement::zero(n * m), |acc, k| {
            let (i, j) = idx.pair(k);
            acc.add(&tensor_element(&sn.atom(i), &sm.atom(j))).expect("same space")
        });
        if rebuilt != x {
            report.failures.push(format!("{x} is not a sum of atom tensors"));
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn e(s: &str) -> HElement {
        s.parse().unwrap()
    }

    #[test]
    fn tensor_element_examples() {
        assert_eq!(tensor_element(&HElement::one(2), &HElement::one(3)), HElement::one(6));
        assert!(tensor_element(&e("101"), &HElement::zero(4)).is_zero());
        let t = tensor_element(&e("10"), &e("110"));
        assert_eq!(t, e("110000"));
        assert_eq!(t.weight(), 2);
        assert_eq!(t.rank(), Rank::ratio(1, 3));
    }

    #[test]
    fn cover_rank_examples() {
        let (h3, h4) = (StandardSpace::new(3).unwrap(), StandardSpace::new(4).unwrap());
        let left = OrthogonalCover::new(vec![e("110"), e("001")]).unwrap();
        let right = OrthogonalCover::new(vec![e("1000"), e("0111")]).unwrap();
        let x = tensor_element(&e("110"), &e("0111"));
        let r = rank_via_cover(&x, &left, &right).unwrap();
        assert_eq!(r.into_value(), e("110").rank().into_value() * e("0111").rank().into_value());

        let one = HElement::one(12);
        assert_eq!(
            rank_via_cover(&one, &OrthogonalCover::atoms(h3), &OrthogonalCover::atoms(h4)).unwrap(),
            Rank::one()
        );

        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let h12 = StandardSpace::new(12).unwrap();
        for _ in 0..50 {
            let x = h12.random_element(&mut rng);
            let r = rank_via_cover(&x, &OrthogonalCover::atoms(h3), &OrthogonalCover::atoms(h4))
                .unwrap();
            assert_eq!(r, Rank::ratio(x.weight(), 12));
        }
    }

    #[test]
    fn cover_rank_rejects_unrepresentable() {
        let trivial2 = OrthogonalCover::trivial(StandardSpace::new(2).unwrap());
        let trivial3 = OrthogonalCover::trivial(StandardSpace::new(3).unwrap());
        let x = HElement::atom(6, 0);
        assert!(matches!(
            rank_via_cover(&x, &trivial2, &trivial3),
            Err(TensorError::NotRepresentable(_))
        ));
        let partial = OrthogonalCover::new(vec![e("10")]).unwrap();
        assert!(matches!(
            rank_via_cover(&HElement::one(6), &partial, &trivial3),
            Err(TensorError::NotRepresentable(_))
        ));
        assert!(matches!(
            rank_via_cover(&HElement::one(5), &trivial2, &trivial3),
            Err(TensorError::WrongProductSpace { .. })
        ));
    }

    #[test]
    fn refinement_examples() {
        let h4 = StandardSpace::new(4).unwrap();
        let atoms = OrthogonalCover::atoms(h4);
        let trivial = OrthogonalCover::trivial(h4);
        let x = HElement::one(16);
        let rep = refine_and_compare(&x, (&trivial, &trivial), (&atoms, &atoms)).unwrap();
        assert!(rep.agree);
        assert_eq!(rep.first, Rank::one());

        let coarse = OrthogonalCover::new(vec![e("1100"), e("0011")]).unwrap();
        let y = tensor_element(&e("1100"), &e("1111"));
        let rep = refine_and_compare(&y, (&coarse, &trivial), (&coarse, &trivial)).unwrap();
        assert!(rep.agree);
        let rep = refine_and_compare(&y, (&coarse, &trivial), (&atoms, &atoms)).unwrap();
        assert!(rep.agree);
        assert_eq!(rep.direct, Rank::ratio(1, 2));
    }

    #[test]
    fn iso_small_cases() {
        for m in 1..=8 {
            assert!(tensor_space_iso(1, m).unwrap().passed());
        }
        let rep = tensor_space_iso(2, 3).unwrap();
        assert!(rep.passed(), "{:?}", rep.failures);
        assert_eq!(rep.pure_tensors_checked, 4 * 8);
        assert!(matches!(tensor_space_iso(4, 5), Err(TensorError::TooLarge { .. })));
        let rep = tensor_space_iso(1, 16).unwrap();
        assert!(rep.passed());
        assert!(!rep.pairs_exhaustive);
    }

    #[test]
    fn identity_factor_is_identity() {
        for x in StandardSpace::new(5).unwrap().elements().unwrap() {
            assert_eq!(tensor_element(&HElement::one(1), &x), x);
        }
    }

    fn elem(max: usize) -> impl Strategy<Value = HElement> {
        (1..=max).prop_flat_map(|n| proptest::collection::vec(any::<bool>(), n))
            .prop_map(HElement::from_bits)
    }

    proptest! {
        #[test]
        fn multiplicative_and_associative(a in elem(6), b in elem(6), c in elem(6)) {
            let ab = tensor_element(&a, &b);
            prop_assert_eq!(
                ab.rank().into_value(),
                a.rank().into_value() * b.rank().into_value()
            );
            prop_assert_eq!(tensor_element(&ab, &c), tensor_element(&a, &tensor_element(&b, &c)));
        }

        #[test]
        fn bilinear_over_orthogonal_sums(
            (a, a2) in (1usize..8).prop_flat_map(|n| {
                proptest::collection::vec(0u8..3, n).prop_map(|v| (
                    HElement::from_bits(v.iter().map(|&t| t == 1)),
                    HElement::from_bits(v.iter().map(|&t| t == 2)),
                ))
            }),
            b in elem(6),
        ) {
            let lhs = tensor_element(&a.add(&a2)?, &b);
            let rhs = tensor_element(&a, &b).add(&tensor_element(&a2, &b))?;
            prop_assert_eq!(lhs, rhs);
        }
    }
}

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::cartan::action_with_inverse;
use super::{
    embed, enumerate_cartans, idempotent_hamming_space, is_cartan, relative_rank, tensor_cartan,
    CartanFrame, Field, FieldTag, LocMatrixError, Matrix, NormalizerAction,
};
use crate::chains::{steinitz_of_chain, ChainSpace};
use crate::hamming::{HElement, Rank, StandardSpace};
use crate::steinitz::SteinitzNumber;
use crate::tensor::tensor_element;

/// Default cap on candidates examined by [`verify_theorem3`].
pub const DEFAULT_BUDGET: u64 = 1 << 20;

/// Largest `p_1 ⋯ p_d` accepted by [`theorem4_check`].
pub const MAX_THEOREM4_PRODUCT: usize = 64;

/// An ascending chain `H_1 ⊂ H_2 ⊂ ⋯` of Cartan frames in
/// `M_{n_1} ⊂ M_{n_2} ⊂ ⋯`, level `k + 1` being
/// `Σ_i e_i ⊗ H_i'` over the idempotents `e_i` of level `k` and distinct
/// frames `H_i'` of `M_{n_{k+1}/n_k}`.
#[derive(Debug, Clone, Serialize)]
#[serde(bound(serialize = "F: Field"))]
pub struct GeneralCartanChain<F> {
    pub field: FieldTag,
    pub sizes: Vec<usize>,
    pub frames: Vec<CartanFrame<F>>,
    /// `local_frames[k]` are the `H_i'` used to go from level `k` to `k + 1`.
    pub local_frames: Vec<Vec<CartanFrame<F>>>,
    pub checks: Vec<LevelCheck>,
}

impl<F: Field> GeneralCartanChain<F> {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(LevelCheck::passed)
    }
}

/// Invariants between levels `level` and `level + 1` (1-based).
#[derive(Debug, Clone, Serialize)]
pub struct LevelCheck {
    pub level: usize,
    pub frame_valid: bool,
    pub local_frames_distinct: bool,
    /// Each `e_i ⊗ I` of the lower level lies in the span of the upper frame.
    pub contains_lower: bool,
    /// Dimension of `span(H_{k+1}) ∩ (M_{n_k} ⊗ I)`.
    pub intersection_dim: usize,
    /// That intersection is exactly the lower frame's span.
    pub intersection_ok: bool,
}

impl LevelCheck {
    pub fn passed(&self) -> bool {
        self.frame_valid && self.local_frames_distinct && self.contains_lower && self.intersection_ok
    }
}

fn validate_sizes(sizes: &[usize]) -> Result<(), LocMatrixError> {
    if sizes.is_empty() {
        return Err(LocMatrixError::EmptySizes);
    }
    if sizes.contains(&0) {
        return Err(LocMatrixError::ZeroSize);
    }
    for w in sizes.windows(2) {
        if w[1] % w[0] != 0 {
            return Err(LocMatrixError::NotDivisible { lower: w[0], upper: w[1] });
        }
    }
    Ok(())
}

/// The first `count` distinct Cartan frames of `M_m`: enumeration order
/// over a finite field, conjugates of the diagonal by
/// `[[1, t], [0, 1]] ⊕ I` for `t = 0, 1, …` over `Q`.
fn distinct_cartans<F: Field>(m: usize, count: usize) -> Result<Vec<CartanFrame<F>>, LocMatrixError> {
    if F::order().is_some() {
        let all = enumerate_cartans::<F>(m)?;
        if all.len() < count {
            return Err(LocMatrixError::InsufficientCartans { m, needed: count, available: all.len() });
        }
        return Ok(all.into_iter().take(count).collect());
    }
    if m == 1 {
        if count > 1 {
            return Err(LocMatrixError::InsufficientCartans { m, needed: count, available: 1 });
        }
        return Ok(vec![CartanFrame::diagonal(1)]);
    }
    (0..count)
        .map(|t| {
            let g = Matrix::from_fn(m, |i, j| match (i, j) {
                _ if i == j => F::one(),
                (0, 1) => F::from_i64(t as i64),
                _ => F::zero(),
            });
            CartanFrame::diagonal(m).conjugate_by(&g)
        })
        .collect()
}

fn check_level<F: Field>(
    level: usize,
    lower: &CartanFrame<F>,
    upper: &CartanFrame<F>,
    local: &[CartanFrame<F>],
) -> LevelCheck {
    let (n, big) = (lower.n(), upper.n());
    let m = big / n;
    let frame_valid = is_cartan(upper.idempotents()).valid;
    let local_frames_distinct = local
        .iter()
        .enumerate()
        .all(|(i, a)| local[i + 1..].iter().all(|b| !a.same_subalgebra(b)));
    let contains_lower = lower.idempotents().iter().all(|e| upper.spans(&embed(e, m)));

    // Σ c_j h_j lies in M_n ⊗ I iff every m×m block is a scalar matrix.
    let entry = |j: usize, r: usize, c: usize| upper.idempotents()[j].get(r, c).clone();
    let mut rows: Vec<Vec<F>> = Vec::new();
    for a in 0..n {
        for b in 0..n {
            for r in 0..m {
                for s in 0..m {
                    let (row, col) = (a * m + r, b * m + s);
                    if r != s {
                        rows.push((0..big).map(|j| entry(j, row, col)).collect());
                    } else if r > 0 {
                        rows.push(
                            (0..big).map(|j| entry(j, row, col).sub(&entry(j, a * m, b * m))).collect(),
                        );
                    }
                }
            }
        }
    }
    let basis = super::nullspace(rows, big);
    let intersection_dim = basis.len();
    let in_lower_span = basis.iter().all(|coeffs| {
        let sum = upper
            .idempotents()
            .iter()
            .zip(coeffs)
            .fold(Matrix::zero(big), |acc, (h, c)| acc.add(&h.scale(c)));
        let reduced = Matrix::from_fn(n, |a, b| sum.get(a * m, b * m).clone());
        embed(&reduced, m) == sum && lower.spans(&reduced)
    });
    LevelCheck {
        level,
        frame_valid,
        local_frames_distinct,
        contains_lower,
        intersection_dim,
        intersection_ok: intersection_dim == n && in_lower_span && contains_lower,
    }
}

/// Builds the chain starting from the diagonal frame of `M_{n_1}`.
///
/// Over a finite field every step needs `n_k² ≤ n_{k+1}`, and `M_{n_{k+1}/n_k}`
/// must have at least `n_k` Cartan frames.
pub fn build_theorem3_chain<F: Field>(sizes: &[usize]) -> Result<GeneralCartanChain<F>, LocMatrixError> {
    validate_sizes(sizes)?;
    if F::order().is_some() {
        for w in sizes.windows(2) {
            if w[0] * w[0] > w[1] {
                return Err(LocMatrixError::SizeCondition { lower: w[0], upper: w[1] });
            }
        }
    }
    let mut frames = vec![CartanFrame::<F>::diagonal(sizes[0])];
    let mut local_frames = Vec::new();
    let mut checks = Vec::new();
    for (k, w) in sizes.windows(2).enumerate() {
        let (n, m) = (w[0], w[1] / w[0]);
        let local = distinct_cartans::<F>(m, n)?;
        let lower = frames.last().expect("nonempty");
        let idempotents: Vec<Matrix<F>> = lower
            .idempotents()
            .iter()
            .zip(&local)
            .flat_map(|(e, h)| h.idempotents().iter().map(move |g| e.kron(g)))
            .collect();
        let upper = CartanFrame::new(idempotents)?;
        checks.push(check_level(k + 1, lower, &upper, &local));
        frames.push(upper);
        local_frames.push(local);
    }
    Ok(GeneralCartanChain { field: F::TAG, sizes: sizes.to_vec(), frames, local_frames, checks })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum VerifyMode {
    /// Every matrix of `M_{n_k}(GF(q))`, keeping the invertible ones.
    Exhaustive,
    /// Seeded random invertibles with small entries.
    Sampled { trials: u64, seed: u64 },
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Tallies {
    pub in_span: u64,
    pub moves_at_k: u64,
    pub normalizes_then_moves: u64,
}

#[derive(Debug, Clone, Serialize)]
#[serde(bound(serialize = "F: Field"))]
pub struct Theorem3Violation<F> {
    pub x: Matrix<F>,
    pub reason: String,
}

#[derive(Debug, Clone, Serialize)]
#[serde(bound(serialize = "F: Field"))]
pub struct Theorem3Report<F> {
    pub field: FieldTag,
    pub sizes: Vec<usize>,
    pub level: usize,
    pub mode: VerifyMode,
    pub candidates: u64,
    pub invertible: u64,
    pub tallies: Tallies,
    pub violations: u64,
    /// At most the first 16, in candidate order.
    pub violation_examples: Vec<Theorem3Violation<F>>,
    pub zero_violations: bool,
}

enum Outcome {
    InSpan,
    MovesAtK,
    NormalizesThenMoves,
    Violation(String),
}

fn classify<F: Field>(x: &Matrix<F>, lower: &CartanFrame<F>, upper: &CartanFrame<F>, m: usize) -> Option<Outcome> {
    let inv = x.inverse()?;
    Some(match action_with_inverse(x, &inv, lower) {
        NormalizerAction::InFrameSpan => Outcome::InSpan,
        NormalizerAction::Moves { .. } => Outcome::MovesAtK,
        action @ NormalizerAction::Normalizes { .. } if !action.is_nontrivial_normalizer() => {
            Outcome::Violation("normalizes with the identity permutation but lies outside the span".into())
        }
        NormalizerAction::Normalizes { .. } => {
            match action_with_inverse(&embed(x, m), &embed(&inv, m), upper) {
                NormalizerAction::Moves { .. } => Outcome::NormalizesThenMoves,
                other => Outcome::Violation(format!("normalizes at level k and at level k+1: {other:?}")),
            }
        }
    })
}

/// Checks the trichotomy for invertible `x ∈ M_{n_k}` against the chain:
/// `x` lies in the span of `H_k`, or moves `H_k`, or permutes `H_k`
/// nontrivially and then `x ⊗ I` moves `H_{k+1}`.
///
/// `level` is 1-based and must have a level above it. Results are ordered
/// by candidate (lexicographic matrix order, or sample order) whatever the
/// thread count.
pub fn verify_theorem3<F: Field>(
    chain: &GeneralCartanChain<F>,
    level: usize,
    mode: VerifyMode,
    budget: u64,
) -> Result<Theorem3Report<F>, LocMatrixError> {
    let depth = chain.sizes.len();
    if level == 0 || level >= depth {
        return Err(LocMatrixError::LevelOutOfRange { level, depth });
    }
    let n = chain.sizes[level - 1];
    let m = chain.sizes[level] / n;
    let (lower, upper) = (&chain.frames[level - 1], &chain.frames[level]);

    let outcomes: Vec<(Matrix<F>, Option<Outcome>)> = match mode {
        VerifyMode::Exhaustive => {
            let q = F::order().ok_or(LocMatrixError::InfiniteField("exhaustive verification"))?;
            let needed = (q as u128).checked_pow((n * n) as u32).unwrap_or(u128::MAX);
            if needed > u128::from(budget) {
                return Err(LocMatrixError::BudgetExceeded { needed, budget: u128::from(budget) });
            }
            (0..needed as u64)
                .into_par_iter()
                .map(|k| {
                    let x = Matrix::<F>::from_lex_index(n, q, k);
                    let outcome = classify(&x, lower, upper, m);
                    (x, outcome)
                })
                .collect()
        }
        VerifyMode::Sampled { trials, seed } => {
            if trials > budget {
                return Err(LocMatrixError::BudgetExceeded {
                    needed: u128::from(trials),
                    budget: u128::from(budget),
                });
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let samples: Vec<Matrix<F>> =
                (0..trials).map(|_| Matrix::random_invertible(n, &mut rng)).collect();
            samples
                .into_par_iter()
                .map(|x| {
                    let outcome = classify(&x, lower, upper, m);
                    (x, outcome)
                })
                .collect()
        }
    };

    let mut tallies = Tallies::default();
    let mut violations = 0;
    let mut violation_examples = Vec::new();
    let mut invertible = 0;
    for (x, outcome) in &outcomes {
        let Some(outcome) = outcome else { continue };
        invertible += 1;
        match outcome {
            Outcome::InSpan => tallies.in_span += 1,
            Outcome::MovesAtK => tallies.moves_at_k += 1,
            Outcome::NormalizesThenMoves => tallies.normalizes_then_moves += 1,
            Outcome::Violation(reason) => {
                violations += 1;
                if violation_examples.len() < 16 {
                    violation_examples.push(Theorem3Violation { x: x.clone(), reason: reason.clone() });
                }
            }
        }
    }
    Ok(Theorem3Report {
        field: F::TAG,
        sizes: chain.sizes.clone(),
        level,
        mode,
        candidates: outcomes.len() as u64,
        invertible,
        tallies,
        violations,
        violation_examples,
        zero_violations: violations == 0,
    })
}

/// The truncation `lcm(n_1, …, n_k) = n_k` of the Steinitz number of the
/// limit algebra.
pub fn steinitz_of_algebra_chain(sizes: &[usize]) -> Result<SteinitzNumber, LocMatrixError> {
    validate_sizes(sizes)?;
    Ok(SteinitzNumber::from_natural(*sizes.last().expect("nonempty") as u64)?)
}

#[derive(Debug, Clone, Serialize)]
pub struct Theorem4Report {
    pub field: FieldTag,
    pub primes: Vec<u64>,
    pub size: usize,
    pub frame_valid: bool,
    /// Tensor index `t` ↔ idempotent `t` of the product frame, each of rank
    /// `1/N`.
    pub atoms_matched: bool,
    pub elements_checked: usize,
    pub elements_ok: bool,
    pub pure_tensors_checked: usize,
    pub pure_tensors_ok: bool,
    pub st_algebra: SteinitzNumber,
    pub st_space: SteinitzNumber,
    pub st_equal: bool,
}

impl Theorem4Report {
    pub fn passed(&self) -> bool {
        self.frame_valid && self.atoms_matched && self.elements_ok && self.pure_tensors_ok && self.st_equal
    }
}

/// For `A = M_{p_1} ⊗ ⋯ ⊗ M_{p_d}` with `D` the tensor product of the
/// diagonal frames, matches `E(D)` with `H_{p_1} ⊗ ⋯ ⊗ H_{p_d}` and compares
/// the Steinitz truncations of the algebra chain and the space chain.
/// Elements and pure tensors are checked exhaustively for `N ≤ 12`.
pub fn theorem4_check<F: Field>(primes: &[u64]) -> Result<Theorem4Report, LocMatrixError> {
    if primes.is_empty() {
        return Err(LocMatrixError::EmptySizes);
    }
    if let Some(&p) = primes.iter().find(|&&p| !num_prime::nt_funcs::is_prime64(p)) {
        return Err(LocMatrixError::NotPrime(p));
    }
    let size = primes
        .iter()
        .try_fold(1usize, |acc, &p| acc.checked_mul(p as usize))
        .filter(|&n| n <= MAX_THEOREM4_PRODUCT)
        .ok_or(LocMatrixError::TooLarge {
            what: "product of primes",
            size: primes.iter().map(|&p| u128::from(p)).product(),
            cap: MAX_THEOREM4_PRODUCT as u128,
        })?;
    let factors: Vec<CartanFrame<F>> = primes.iter().map(|&p| CartanFrame::diagonal(p as usize)).collect();
    let d = factors[1..].iter().fold(factors[0].clone(), |acc, f| tensor_cartan(&acc, f));
    let frame_valid = is_cartan(d.idempotents()).valid;
    let space = idempotent_hamming_space(&d);

    let atoms_matched = (0..size).all(|t| {
        let atom = HElement::atom(size, t);
        space.element(&atom).ok().as_ref() == Some(&d.idempotents()[t])
            && relative_rank(&d.idempotents()[t]) == Rank::ratio(1, size)
    });

    let exhaustive = size <= 12;
    let h = StandardSpace::new(size)?;
    let elements: Vec<HElement> = if exhaustive {
        h.elements()?.collect()
    } else {
        h.atoms().collect()
    };
    let elements_ok = elements.iter().all(|x| {
        let a = space.element(x).expect("same size");
        relative_rank(&a) == x.rank() && space.bits_of(&a).as_ref() == Some(x)
    });

    let factor_spaces: Vec<_> = factors.iter().map(idempotent_hamming_space).collect();
    let factor_elements: Vec<Vec<HElement>> = primes
        .iter()
        .map(|&p| {
            let s = StandardSpace::new(p as usize).expect("p > 0");
            if exhaustive {
                s.elements().expect("small").collect()
            } else {
                s.atoms().collect()
            }
        })
        .collect();
    let mut pure_tensors_checked = 0;
    let mut pure_tensors_ok = true;
    let mut choice = vec![0usize; primes.len()];
    loop {
        let parts: Vec<&HElement> = choice.iter().zip(&factor_elements).map(|(&c, es)| &es[c]).collect();
        let joined = parts[1..]
            .iter()
            .fold(parts[0].clone(), |acc, y| tensor_element(&acc, y));
        let kron = parts
            .iter()
            .zip(&factor_spaces)
            .map(|(x, s)| s.element(x).expect("same size"))
            .reduce(|a, b| a.kron(&b))
            .expect("nonempty");
        pure_tensors_checked += 1;
        let rank_product: num_rational::BigRational =
            parts.iter().map(|x| x.rank().into_value()).product();
        pure_tensors_ok &= space.element(&joined)? == kron && relative_rank(&kron).into_value() == rank_product;

        // odometer over the factor choices
        let mut i = choice.len();
        loop {
            if i == 0 {
                break;
            }
            i -= 1;
            choice[i] += 1;
            if choice[i] < factor_elements[i].len() {
                break;
            }
            choice[i] = 0;
        }
        if choice.iter().all(|&c| c == 0) {
            break;
        }
    }

    let cumulative: Vec<usize> = primes
        .iter()
        .scan(1usize, |acc, &p| {
            *acc *= p as usize;
            Some(*acc)
        })
        .collect();
    let st_algebra = steinitz_of_algebra_chain(&cumulative)?;
    let st_space = steinitz_of_chain(&ChainSpace::canonical(&cumulative).expect("divisibility chain"));
    let st_equal = st_algebra == st_space && st_algebra == SteinitzNumber::from_natural(size as u64)?;

    Ok(Theorem4Report {
        field: F::TAG,
        primes: primes.to_vec(),
        size,
        frame_valid,
        atoms_matched,
        elements_checked: elements.len(),
        elements_ok,
        pure_tensors_checked,
        pure_tensors_ok,
        st_algebra,
        st_space,
        st_equal,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::locmatrix::{Gf2, Gf3, Q};

    #[test]
    fn chain_2_4_gf2() {
        let c = build_theorem3_chain::<Gf2>(&[2, 4]).unwrap();
        assert!(c.passed(), "{:?}", c.checks);
        assert_eq!(c.checks[0].intersection_dim, 2);
        let r = verify_theorem3(&c, 1, VerifyMode::Exhaustive, DEFAULT_BUDGET).unwrap();
        assert_eq!(r.candidates, 16);
        assert_eq!(r.invertible, 6);
        assert_eq!(r.tallies, Tallies { in_span: 1, moves_at_k: 4, normalizes_then_moves: 1 });
        assert!(r.zero_violations);
    }

    #[test]
    fn chain_2_4_q() {
        let c = build_theorem3_chain::<Q>(&[2, 4]).unwrap();
        assert!(c.passed());
        let g = Matrix::<Q>::from_i64_rows(&[&[1, 1], &[0, 1]]).unwrap();
        assert_eq!(c.local_frames[0][0], CartanFrame::diagonal(2));
        assert_eq!(c.local_frames[0][1], CartanFrame::diagonal(2).conjugate_by(&g).unwrap());
        let r = verify_theorem3(&c, 1, VerifyMode::Sampled { trials: 200, seed: 7 }, DEFAULT_BUDGET).unwrap();
        assert!(r.zero_violations);
        assert_eq!(r.invertible, 200);
        assert!(matches!(
            verify_theorem3(&c, 1, VerifyMode::Exhaustive, DEFAULT_BUDGET),
            Err(LocMatrixError::InfiniteField(_))
        ));
    }

    #[test]
    fn chain_preconditions() {
        assert_eq!(
            build_theorem3_chain::<Gf2>(&[2, 3]).unwrap_err(),
            LocMatrixError::NotDivisible { lower: 2, upper: 3 }
        );
        assert_eq!(
            build_theorem3_chain::<Gf2>(&[2, 2]).unwrap_err(),
            LocMatrixError::SizeCondition { lower: 2, upper: 2 }
        );
        assert_eq!(
            build_theorem3_chain::<Gf2>(&[4, 8]).unwrap_err(),
            LocMatrixError::SizeCondition { lower: 4, upper: 8 }
        );
        // 3 frames in M_2(GF(2)) is not enough for 4 idempotents
        assert_eq!(
            build_theorem3_chain::<Gf2>(&[1, 4, 8]).unwrap_err(),
            LocMatrixError::SizeCondition { lower: 4, upper: 8 }
        );
        assert!(matches!(
            build_theorem3_chain::<Q>(&[2, 2]),
            Err(LocMatrixError::InsufficientCartans { m: 1, needed: 2, available: 1 })
        ));
        assert!(build_theorem3_chain::<Q>(&[3, 6, 12]).unwrap().passed());
        assert!(build_theorem3_chain::<Gf3>(&[2, 4]).unwrap().passed());
        let c = build_theorem3_chain::<Gf2>(&[2, 4]).unwrap();
        assert!(matches!(
            verify_theorem3(&c, 2, VerifyMode::Exhaustive, DEFAULT_BUDGET),
            Err(LocMatrixError::LevelOutOfRange { .. })
        ));
        assert!(matches!(
            verify_theorem3(&c, 1, VerifyMode::Exhaustive, 10),
            Err(LocMatrixError::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn steinitz_truncations() {
        assert_eq!(steinitz_of_algebra_chain(&[2, 4, 8]).unwrap().to_string(), "2^3");
        assert_eq!(steinitz_of_algebra_chain(&[2, 6]).unwrap().to_string(), "2*3");
        assert!(steinitz_of_algebra_chain(&[1]).unwrap().is_one());
        assert!(steinitz_of_algebra_chain(&[2, 5]).is_err());
    }

    #[test]
    fn theorem4_examples() {
        for primes in [&[2u64][..], &[3], &[2, 3], &[2, 2, 3]] {
            let r = theorem4_check::<Gf2>(primes).unwrap();
            assert!(r.passed(), "{primes:?} {r:?}");
            assert!(theorem4_check::<Q>(primes).unwrap().passed());
        }
        let r = theorem4_check::<Q>(&[2, 3]).unwrap();
        assert_eq!((r.elements_checked, r.pure_tensors_checked), (64, 32));
        assert_eq!(theorem4_check::<Q>(&[2, 2, 3]).unwrap().st_algebra.to_string(), "2^2*3");
        assert!(theorem4_check::<Q>(&[2, 2, 2, 2, 2, 2]).unwrap().passed());
        assert!(matches!(theorem4_check::<Q>(&[4]), Err(LocMatrixError::NotPrime(4))));
        assert!(matches!(theorem4_check::<Q>(&[5, 13]), Err(LocMatrixError::TooLarge { .. })));
    }
}

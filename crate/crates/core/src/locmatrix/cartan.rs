use serde::{Deserialize, Serialize};

use super::{relative_rank, Field, LocMatrixError, Matrix};
use crate::hamming::{HElement, Rank, StandardSpace};

/// Cap on `q^{m²}` for enumerating all matrices of `M_m(GF(q))`.
pub const MAX_ENUMERATED_MATRICES: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FrameDiagnostic {
    Empty,
    MixedDimensions { index: usize, n: usize, expected: usize },
    WrongCount { expected: usize, got: usize },
    NotIdempotent { index: usize },
    NotRankOne { index: usize, rank: usize },
    NotOrthogonal { first: usize, second: usize },
    WrongSum,
}

#[derive(Debug, Clone, Serialize)]
pub struct CartanCheck {
    pub valid: bool,
    pub diagnostics: Vec<FrameDiagnostic>,
}

/// Checks that `frame` consists of `n` pairwise orthogonal rank-1
/// idempotents of `M_n` summing to the identity.
pub fn is_cartan<F: Field>(frame: &[Matrix<F>]) -> CartanCheck {
    let mut diagnostics = Vec::new();
    let Some(first) = frame.first() else {
        return CartanCheck { valid: false, diagnostics: vec![FrameDiagnostic::Empty] };
    };
    let n = first.n();
    for (index, e) in frame.iter().enumerate() {
        if e.n() != n {
            diagnostics.push(FrameDiagnostic::MixedDimensions { index, n: e.n(), expected: n });
        }
    }
    if !diagnostics.is_empty() {
        return CartanCheck { valid: false, diagnostics };
    }
    if frame.len() != n {
        diagnostics.push(FrameDiagnostic::WrongCount { expected: n, got: frame.len() });
    }
    for (index, e) in frame.iter().enumerate() {
        if !e.is_idempotent() {
            diagnostics.push(FrameDiagnostic::NotIdempotent { index });
        }
        let rank = e.rank();
        if rank != 1 {
            diagnostics.push(FrameDiagnostic::NotRankOne { index, rank });
        }
    }
    for (i, e) in frame.iter().enumerate() {
        for (j, f) in frame.iter().enumerate().skip(i + 1) {
            if !e.mul(f).is_zero() || !f.mul(e).is_zero() {
                diagnostics.push(FrameDiagnostic::NotOrthogonal { first: i, second: j });
            }
        }
    }
    let sum = frame.iter().skip(1).fold(first.clone(), |acc, e| acc.add(e));
    if !sum.is_identity() {
        diagnostics.push(FrameDiagnostic::WrongSum);
    }
    CartanCheck { valid: diagnostics.is_empty(), diagnostics }
}

/// A validated Cartan frame `e_1, …, e_n` of `M_n(F)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CartanFrame<F> {
    idempotents: Vec<Matrix<F>>,
}

impl<F: Field> CartanFrame<F> {
    pub fn new(idempotents: Vec<Matrix<F>>) -> Result<Self, LocMatrixError> {
        let check = is_cartan(&idempotents);
        if check.valid {
            Ok(Self { idempotents })
        } else {
            Err(LocMatrixError::InvalidFrame(check.diagnostics))
        }
    }

    /// The matrix units `E_11, …, E_nn`.
    pub fn diagonal(n: usize) -> Self {
        Self { idempotents: (0..n).map(|i| Matrix::unit(n, i, i)).collect() }
    }

    /// `{g e_i g⁻¹}`.
    pub fn conjugate_by(&self, g: &Matrix<F>) -> Result<Self, LocMatrixError> {
        self.check_dim(g)?;
        let inv = g.inverse().ok_or(LocMatrixError::Singular)?;
        Ok(Self { idempotents: self.idempotents.iter().map(|e| g.mul(e).mul(&inv)).collect() })
    }

    pub fn n(&self) -> usize {
        self.idempotents.len()
    }

    pub fn idempotents(&self) -> &[Matrix<F>] {
        &self.idempotents
    }

    fn check_dim(&self, a: &Matrix<F>) -> Result<(), LocMatrixError> {
        if a.n() == self.n() {
            Ok(())
        } else {
            Err(LocMatrixError::DimensionMismatch { expected: self.n(), found: a.n() })
        }
    }

    /// Coefficients `c_i` with `a = Σ c_i e_i`, if `a` lies in the span.
    /// A rank-1 idempotent has trace 1, so `c_i = tr(e_i a)`.
    pub fn coefficients(&self, a: &Matrix<F>) -> Option<Vec<F>> {
        if a.n() != self.n() {
            return None;
        }
        let coeffs: Vec<F> = self.idempotents.iter().map(|e| e.trace_of_product(a)).collect();
        let rebuilt = self
            .idempotents
            .iter()
            .zip(&coeffs)
            .filter(|(_, c)| !c.is_zero())
            .fold(Matrix::zero(self.n()), |acc, (e, c)| acc.add(&e.scale(c)));
        (rebuilt == *a).then_some(coeffs)
    }

    pub fn spans(&self, a: &Matrix<F>) -> bool {
        self.coefficients(a).is_some()
    }

    /// Same subalgebra: equal as sets of idempotents.
    pub fn same_subalgebra(&self, other: &Self) -> bool {
        self.n() == other.n() && self.idempotents.iter().all(|e| other.position(e).is_some())
    }

    fn position(&self, a: &Matrix<F>) -> Option<usize> {
        self.idempotents.iter().position(|e| e == a)
    }
}

impl<F: Field> Serialize for CartanFrame<F> {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.idempotents.serialize(serializer)
    }
}

impl<'de, F: Field> Deserialize<'de> for CartanFrame<F> {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = Vec::<Matrix<F>>::deserialize(deserializer)?;
        CartanFrame::new(raw).map_err(serde::de::Error::custom)
    }
}

/// The Boolean algebra `E(H)` of idempotents of the span of a frame,
/// identified with `H_n` by `S ↦ Σ_{i∈S} e_i`.
#[derive(Debug, Clone)]
pub struct IdempotentSpace<F> {
    frame: CartanFrame<F>,
}

#[derive(Debug, Clone, Serialize)]
pub struct EReport {
    pub n: usize,
    pub elements_checked: usize,
    pub pairs_checked: usize,
    pub pairs_exhaustive: bool,
    /// Every element is idempotent and maps back to its bit-vector.
    pub bijection_ok: bool,
    /// Relative rank equals the `H_n` rank.
    pub ranks_ok: bool,
    /// `ef` and `e + f − 2ef` agree with intersection and symmetric
    /// difference.
    pub operations_ok: bool,
}

impl EReport {
    pub fn passed(&self) -> bool {
        self.bijection_ok && self.ranks_ok && self.operations_ok
    }
}

pub fn idempotent_hamming_space<F: Field>(frame: &CartanFrame<F>) -> IdempotentSpace<F> {
    IdempotentSpace { frame: frame.clone() }
}

impl<F: Field> IdempotentSpace<F> {
    pub fn frame(&self) -> &CartanFrame<F> {
        &self.frame
    }

    pub fn element(&self, x: &HElement) -> Result<Matrix<F>, LocMatrixError> {
        let n = self.frame.n();
        if x.n() != n {
            return Err(LocMatrixError::DimensionMismatch { expected: n, found: x.n() });
        }
        Ok(x.support().fold(Matrix::zero(n), |acc, i| acc.add(&self.frame.idempotents[i])))
    }

    /// The bit-vector of an idempotent in the span, or `None`.
    pub fn bits_of(&self, a: &Matrix<F>) -> Option<HElement> {
        let coeffs = self.frame.coefficients(a)?;
        if coeffs.iter().any(|c| !c.is_zero() && !c.is_one()) {
            return None;
        }
        Some(HElement::from_bits(coeffs.iter().map(F::is_one)))
    }

    pub fn boolean_product(&self, e: &Matrix<F>, f: &Matrix<F>) -> Matrix<F> {
        e.mul(f)
    }

    /// `e + f − 2ef`.
    pub fn boolean_sum(&self, e: &Matrix<F>, f: &Matrix<F>) -> Matrix<F> {
        e.add(f).sub(&e.mul(f).scale(&F::from_i64(2)))
    }

    pub fn rank(&self, a: &Matrix<F>) -> Rank {
        relative_rank(a)
    }

    /// Elements are checked exhaustively for `n ≤ 12`; pairs exhaustively
    /// for `n ≤ 6` and against atoms otherwise.
    pub fn verify(&self) -> EReport {
        let n = self.frame.n();
        let space = StandardSpace::new(n).expect("frames are nonempty");
        let elements: Vec<HElement> = match space.elements() {
            Ok(all) if n <= 12 => all.collect(),
            _ => space.atoms().chain([space.zero(), space.one()]).collect(),
        };
        let matrices: Vec<Matrix<F>> =
            elements.iter().map(|x| self.element(x).expect("same n")).collect();
        let bijection_ok = elements.iter().zip(&matrices).all(|(x, a)| {
            a.is_idempotent() && self.bits_of(a).as_ref() == Some(x)
        });
        let ranks_ok = elements.iter().zip(&matrices).all(|(x, a)| relative_rank(a) == x.rank());

        let pairs_exhaustive = n <= 6;
        let partners: Vec<usize> = if pairs_exhaustive {
            (0..elements.len()).collect()
        } else {
            (0..elements.len()).filter(|&k| elements[k].weight() <= 1).collect()
        };
        let mut pairs_checked = 0;
        let mut operations_ok = true;
        for (x, a) in elements.iter().zip(&matrices) {
            for &k in &partners {
                let (y, b) = (&elements[k], &matrices[k]);
                pairs_checked += 1;
                let prod = self.boolean_product(a, b);
                let sum = self.boolean_sum(a, b);
                operations_ok &= self.bits_of(&prod) == x.mul(y).ok()
                    && self.bits_of(&sum) == x.add(y).ok();
            }
        }
        EReport {
            n,
            elements_checked: elements.len(),
            pairs_checked,
            pairs_exhaustive,
            bijection_ok,
            ranks_ok,
            operations_ok,
        }
    }
}

/// Returns `x` with `x⁻¹ e_i x = f_i` for every `i`.
///
/// With `V` and `W` the matrices of columns spanning the images of the
/// `e_i` and the `f_i`, `e_i = V E_ii V⁻¹` and `f_i = W E_ii W⁻¹`, so
/// `x = V W⁻¹` works.
pub fn conjugate_cartans<F: Field>(
    h1: &CartanFrame<F>,
    h2: &CartanFrame<F>,
) -> Result<Matrix<F>, LocMatrixError> {
    if h1.n() != h2.n() {
        return Err(LocMatrixError::DimensionMismatch { expected: h1.n(), found: h2.n() });
    }
    let image_basis = |frame: &CartanFrame<F>| -> Matrix<F> {
        let cols: Vec<Vec<F>> = frame
            .idempotents
            .iter()
            .map(|e| {
                (0..e.n())
                    .map(|j| e.column(j))
                    .find(|c| c.iter().any(|v| !v.is_zero()))
                    .expect("rank-1 idempotent has a nonzero column")
            })
            .collect();
        Matrix::from_columns(&cols)
    };
    let v = image_basis(h1);
    let w_inv = image_basis(h2).inverse().ok_or(LocMatrixError::Singular)?;
    Ok(v.mul(&w_inv))
}

/// Whether `{x⁻¹ e x : e ∈ h1}` equals `h2` as a set.
pub fn conjugation_maps<F: Field>(x: &Matrix<F>, h1: &CartanFrame<F>, h2: &CartanFrame<F>) -> bool {
    if x.n() != h1.n() || h1.n() != h2.n() {
        return false;
    }
    let Some(inv) = x.inverse() else {
        return false;
    };
    let moved: Vec<Matrix<F>> = h1.idempotents.iter().map(|e| inv.mul(e).mul(x)).collect();
    h2.idempotents.iter().all(|f| moved.contains(f)) && moved.iter().all(|m| h2.position(m).is_some())
}

/// `{e_i ⊗ f_j}` in row-major order.
pub fn tensor_cartan<F: Field>(h1: &CartanFrame<F>, h2: &CartanFrame<F>) -> CartanFrame<F> {
    let idempotents = h1
        .idempotents
        .iter()
        .flat_map(|e| h2.idempotents.iter().map(move |f| e.kron(f)))
        .collect();
    CartanFrame { idempotents }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "action", rename_all = "snake_case")]
pub enum NormalizerAction {
    InFrameSpan,
    /// `x⁻¹ e_i x = e_{permutation[i]}`.
    Normalizes { permutation: Vec<usize> },
    /// `x⁻¹ e_idempotent x` is not in the frame.
    Moves { idempotent: usize },
}

impl NormalizerAction {
    pub fn is_nontrivial_normalizer(&self) -> bool {
        matches!(self, NormalizerAction::Normalizes { permutation }
            if permutation.iter().enumerate().any(|(i, &p)| i != p))
    }
}

pub fn normalizer_action<F: Field>(
    x: &Matrix<F>,
    frame: &CartanFrame<F>,
) -> Result<NormalizerAction, LocMatrixError> {
    frame.check_dim(x)?;
    let inv = x.inverse().ok_or(LocMatrixError::Singular)?;
    Ok(action_with_inverse(x, &inv, frame))
}

pub(super) fn action_with_inverse<F: Field>(
    x: &Matrix<F>,
    inv: &Matrix<F>,
    frame: &CartanFrame<F>,
) -> NormalizerAction {
    if frame.spans(x) {
        return NormalizerAction::InFrameSpan;
    }
    let mut permutation = Vec::with_capacity(frame.n());
    for (i, e) in frame.idempotents.iter().enumerate() {
        match frame.position(&inv.mul(e).mul(x)) {
            Some(j) => permutation.push(j),
            None => return NormalizerAction::Moves { idempotent: i },
        }
    }
    NormalizerAction::Normalizes { permutation }
}

#[derive(Debug, Clone, Serialize)]
#[serde(bound(serialize = "F: Field"))]
pub struct Lemma2Witness<F> {
    pub n: usize,
    pub m: usize,
    pub x: Matrix<F>,
    pub frame: CartanFrame<F>,
    pub invertible: bool,
    pub outside_span: bool,
    pub action: NormalizerAction,
}

impl<F: Field> Lemma2Witness<F> {
    pub fn passed(&self) -> bool {
        self.invertible && self.outside_span && self.action.is_nontrivial_normalizer()
    }
}

/// `x = C_n ⊗ I_m` with `C_n` the cyclic shift `e_j ↦ e_{j+1}`, against the
/// diagonal frame of `M_n ⊗ M_m`.
pub fn lemma2_witness<F: Field>(n: usize, m: usize) -> Result<Lemma2Witness<F>, LocMatrixError> {
    if n < 2 {
        return Err(LocMatrixError::LeftFactorTooSmall(n));
    }
    if m == 0 {
        return Err(LocMatrixError::ZeroSize);
    }
    let cycle = Matrix::from_fn(n, |i, j| if i == (j + 1) % n { F::one() } else { F::zero() });
    let x = cycle.kron(&Matrix::identity(m));
    let frame = tensor_cartan(&CartanFrame::diagonal(n), &CartanFrame::diagonal(m));
    let invertible = x.is_invertible();
    let outside_span = !frame.spans(&x);
    let action = normalizer_action(&x, &frame)?;
    Ok(Lemma2Witness { n, m, x, frame, invertible, outside_span, action })
}

/// `|GL_m(q)| = Π_{i<m} (q^m − q^i)`.
pub fn gl_order(m: u32, q: u64) -> u128 {
    let q = u128::from(q);
    (0..m).map(|i| q.pow(m) - q.pow(i)).product()
}

fn enumeration_size<F: Field>(m: usize, what: &'static str) -> Result<(u64, u64), LocMatrixError> {
    let q = F::order().ok_or(LocMatrixError::InfiniteField(what))?;
    let size = (q as u128).checked_pow((m * m) as u32).unwrap_or(u128::MAX);
    if size > u128::from(MAX_ENUMERATED_MATRICES) {
        return Err(LocMatrixError::TooLarge {
            what,
            size,
            cap: u128::from(MAX_ENUMERATED_MATRICES),
        });
    }
    Ok((q, size as u64))
}

/// Rank-1 idempotents of `M_m(GF(q))` in lexicographic entry order.
fn rank_one_idempotents<F: Field>(m: usize) -> Result<Vec<Matrix<F>>, LocMatrixError> {
    let (q, total) = enumeration_size::<F>(m, "Cartan enumeration")?;
    Ok((0..total)
        .map(|k| Matrix::<F>::from_lex_index(m, q, k))
        .filter(|a| a.is_idempotent() && a.rank() == 1)
        .collect())
}

/// Every Cartan frame of `M_m(GF(q))` as an unordered set, listed with
/// idempotents in lexicographic order and frames in lexicographic order of
/// their idempotent lists.
pub fn enumerate_cartans<F: Field>(m: usize) -> Result<Vec<CartanFrame<F>>, LocMatrixError> {
    if m == 0 {
        return Err(LocMatrixError::ZeroSize);
    }
    let idem = rank_one_idempotents::<F>(m)?;
    let k = idem.len();
    let orth: Vec<Vec<bool>> = (0..k)
        .map(|i| (0..k).map(|j| i != j && idem[i].mul(&idem[j]).is_zero()).collect())
        .collect();
    let mut frames = Vec::new();
    let mut chosen = Vec::with_capacity(m);
    fn extend<F: Field>(
        start: usize,
        m: usize,
        idem: &[Matrix<F>],
        orth: &[Vec<bool>],
        chosen: &mut Vec<usize>,
        out: &mut Vec<CartanFrame<F>>,
    ) {
        if chosen.len() == m {
            let frame: Vec<Matrix<F>> = chosen.iter().map(|&i| idem[i].clone()).collect();
            if let Ok(f) = CartanFrame::new(frame) {
                out.push(f);
            }
            return;
        }
        for next in start..idem.len() {
            if chosen.iter().all(|&c| orth[c][next] && orth[next][c]) {
                chosen.push(next);
                extend(next + 1, m, idem, orth, chosen, out);
                chosen.pop();
            }
        }
    }
    extend(0, m, &idem, &orth, &mut chosen, &mut frames);
    Ok(frames)
}

#[derive(Debug, Clone, Serialize)]
pub struct CartanCount {
    pub m: usize,
    pub q: u64,
    pub rank_one_idempotents: usize,
    pub enumerated: usize,
    /// `|GL_m(q)| / ((q − 1)^m · m!)`.
    pub formula: u128,
    pub agrees: bool,
}

pub fn count_cartans<F: Field>(m: usize) -> Result<CartanCount, LocMatrixError> {
    let frames = enumerate_cartans::<F>(m)?;
    let q = F::order().expect("checked by enumeration");
    let factorial: u128 = (1..=m as u128).product();
    let formula = gl_order(m as u32, q) / (u128::from(q - 1).pow(m as u32) * factorial);
    Ok(CartanCount {
        m,
        q,
        rank_one_idempotents: rank_one_idempotents::<F>(m)?.len(),
        enumerated: frames.len(),
        formula,
        agrees: frames.len() as u128 == formula,
    })
}

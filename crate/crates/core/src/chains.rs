//! Finite truncations of countable locally standard Hamming spaces.
//!
//! A [`ChainSpace`] is an ascending chain `H_{n_1} ⊂ H_{n_2} ⊂ … ⊂ H_{n_k}`
//! with `n_i | n_{i+1}`, each inclusion given by an [`Embedding`] that sends
//! atom `i` of the smaller space to the sum of a block of atoms of the
//! larger one. All blocks have the same size, which is what makes the
//! inclusion rank preserving.


use num_bigint::BigUint;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hamming::{HElement, HammingError, Rank, StandardSpace};
use crate::steinitz::{SteinitzError, SteinitzNumber};

/// Largest space on which homomorphism properties are checked for every
/// element rather than on atoms.
pub const EXHAUSTIVE_ELEMENT_BOUND: usize = 12;

/// Largest top level for which [`retensor`] builds an explicit atom map.
pub const MAX_EXPLICIT_ATOMS: usize = 1 << 20;

/// Largest top level for which [`verify_retensor`] checks every pure
/// tensor.
pub const EXHAUSTIVE_RETENSOR_BOUND: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChainError {
    #[error("invalid embedding H_{n} -> H_{s}: {diagnostics:?}")]
    InvalidEmbedding { n: usize, s: usize, diagnostics: Vec<EmbeddingDiagnostic> },
    #[error("chain needs at least one level")]
    EmptyChain,
    #[error("level sizes must be positive")]
    ZeroSize,
    #[error("{lower} does not divide {upper}")]
    NotDivisible { lower: usize, upper: usize },
    #[error("chain with {levels} levels needs {expected} embeddings, got {got}")]
    EmbeddingCount { levels: usize, expected: usize, got: usize },
    #[error("embedding {index} maps H_{n} -> H_{s} but the chain has H_{lower} -> H_{upper}")]
    EmbeddingShape { index: usize, n: usize, s: usize, lower: usize, upper: usize },
    #[error("top level H_{0} is too large for an explicit atom map")]
    TooLarge(usize),
    #[error(transparent)]
    Hamming(#[from] HammingError),
    #[error(transparent)]
    Steinitz(#[from] SteinitzError),
}

/// One problem with a proposed block partition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EmbeddingDiagnostic {
    NotDivisible { n: usize, s: usize },
    BlockCount { expected: usize, got: usize },
    UnequalBlocks { block: usize, size: usize, expected: usize },
    OutOfRange { block: usize, atom: usize },
    Overlap { atom: usize, first: usize, second: usize },
    Uncovered { atom: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Layout {
    /// Block `i` is `{i·s/n, …, (i+1)·s/n − 1}`.
    Consecutive,
    Explicit(Vec<Vec<usize>>),
    /// Row-major product of two embeddings, blocks computed on demand.
    Product(Box<Embedding>, Box<Embedding>),
}

/// A unital embedding `H_n → H_s` given by a block partition of the atoms
/// of `H_s`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Embedding {
    n: usize,
    s: usize,
    layout: Layout,
}

impl Embedding {
    /// Consecutive blocks of size `s / n`.
    pub fn canonical(n: usize, s: usize) -> Result<Self, ChainError> {
        if n == 0 || s == 0 {
            return Err(ChainError::ZeroSize);
        }
        if s % n != 0 {
            return Err(ChainError::NotDivisible { lower: n, upper: s });
        }
        Ok(Self { n, s, layout: Layout::Consecutive })
    }

    /// Explicit blocks, unvalidated; see [`validate_embedding`]. Each block
    /// is sorted on construction.
    pub fn from_blocks(n: usize, s: usize, mut blocks: Vec<Vec<usize>>) -> Self {
        for b in &mut blocks {
            b.sort_unstable();
        }
        Self { n, s, layout: Layout::Explicit(blocks) }
    }

    /// Blocks of a uniformly random partition into equal parts.
    pub fn random<R: Rng + ?Sized>(n: usize, s: usize, rng: &mut R) -> Result<Self, ChainError> {
        Self::canonical(n, s)?;
        let mut atoms: Vec<usize> = (0..s).collect();
        atoms.shuffle(rng);
        let blocks = atoms.chunks(s / n).map(<[usize]>::to_vec).collect();
        Ok(Self::from_blocks(n, s, blocks))
    }

    pub fn source(&self) -> usize {
        self.n
    }

    pub fn target(&self) -> usize {
        self.s
    }

    pub fn is_canonical(&self) -> bool {
        self.layout == Layout::Consecutive
    }

    /// Atoms of block `i` in ascending order.
    pub fn block(&self, i: usize) -> Vec<usize> {
        match &self.layout {
            Layout::Consecutive => {
                let q = self.s / self.n;
                (i * q..(i + 1) * q).collect()
            }
            Layout::Explicit(blocks) => blocks[i].clone(),
            Layout::Product(left, right) => {
                let (a, b) = (i / right.n, i % right.n);
                let inner = right.block(b);
                left.block(a)
                    .into_iter()
                    .flat_map(|x| inner.iter().map(move |&y| x * right.s + y))
                    .collect()
            }
        }
    }

    pub fn blocks(&self) -> Vec<Vec<usize>> {
        match &self.layout {
            Layout::Explicit(blocks) => blocks.clone(),
            _ => (0..self.n).map(|i| self.block(i)).collect(),
        }
    }

    fn diagnostics(&self) -> Vec<EmbeddingDiagnostic> {
        let (n, s) = (self.n, self.s);
        let mut out = Vec::new();
        if n == 0 || s % n != 0 {
            out.push(EmbeddingDiagnostic::NotDivisible { n, s });
        }
        let blocks = match &self.layout {
            Layout::Explicit(blocks) => blocks,
            Layout::Consecutive => return out,
            Layout::Product(left, right) => {
                out.extend(left.diagnostics());
                out.extend(right.diagnostics());
                return out;
            }
        };
        if blocks.len() != n {
            out.push(EmbeddingDiagnostic::BlockCount { expected: n, got: blocks.len() });
        }
        let expected = if n == 0 { 0 } else { s / n };
        for (b, block) in blocks.iter().enumerate() {
            if block.len() != expected {
                out.push(EmbeddingDiagnostic::UnequalBlocks { block: b, size: block.len(), expected });
            }
        }
        let mut owner: Vec<Option<usize>> = vec![None; s];
        for (b, block) in blocks.iter().enumerate() {
            for &atom in block {
                if atom >= s {
                    out.push(EmbeddingDiagnostic::OutOfRange { block: b, atom });
                    continue;
                }
                match owner[atom] {
                    Some(first) => {
                        out.push(EmbeddingDiagnostic::Overlap { atom, first, second: b })
                    }
                    None => owner[atom] = Some(b),
                }
            }
        }
        for (atom, o) in owner.iter().enumerate() {
            if o.is_none() {
                out.push(EmbeddingDiagnostic::Uncovered { atom });
            }
        }
        out
    }

    /// Returns `self` if it is a valid partition.
    pub fn validated(self) -> Result<Self, ChainError> {
        let diagnostics = self.diagnostics();
        if diagnostics.is_empty() {
            Ok(self)
        } else {
            Err(ChainError::InvalidEmbedding { n: self.n, s: self.s, diagnostics })
        }
    }

    /// Image of `x ∈ H_n`: the union of the blocks of its atoms.
    pub fn map(&self, x: &HElement) -> Result<HElement, ChainError> {
        if x.n() != self.n {
            return Err(HammingError::SpaceMismatch { left: x.n(), right: self.n }.into());
        }
        let support: Vec<usize> = x.support().flat_map(|i| self.block(i)).collect();
        Ok(HElement::from_support(self.s, &support)?)
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &Embedding) -> Result<Embedding, ChainError> {
        if self.s != next.n {
            return Err(ChainError::NotDivisible { lower: self.s, upper: next.n });
        }
        if self.is_canonical() && next.is_canonical() {
            return Embedding::canonical(self.n, next.s);
        }
        if self.is_canonical() && self.n == self.s {
            return Ok(next.clone());
        }
        if next.is_canonical() && next.n == next.s {
            return Ok(self.clone());
        }
        if let (Layout::Product(a, b), Layout::Product(c, d)) = (&self.layout, &next.layout) {
            if a.s == c.n && b.s == d.n {
                return Ok(a.then(c)?.tensor(&b.then(d)?));
            }
        }
        if next.s > MAX_EXPLICIT_ATOMS {
            return Err(ChainError::TooLarge(next.s));
        }
        let blocks = (0..self.n)
            .map(|i| self.block(i).into_iter().flat_map(|a| next.block(a)).collect())
            .collect();
        Ok(Embedding::from_blocks(self.n, next.s, blocks))
    }

    /// The product embedding `H_n ⊗ H_m → H_s ⊗ H_t`, row-major on both
    /// sides.
    pub fn tensor(&self, other: &Embedding) -> Embedding {
        Embedding {
            n: self.n * other.n,
            s: self.s * other.s,
            layout: Layout::Product(Box::new(self.clone()), Box::new(other.clone())),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EmbeddingReport {
    pub n: usize,
    pub s: usize,
    pub valid: bool,
    pub diagnostics: Vec<EmbeddingDiagnostic>,
    /// Every atom of `H_n` maps to an element of rank `1/n`.
    pub atom_ranks_ok: bool,
    /// Unital Boolean homomorphism preserving rank; checked on every
    /// element when `n` is small, on atoms and their sums otherwise.
    pub homomorphism_ok: bool,
    pub homomorphism_exhaustive: bool,
}

pub fn validate_embedding(e: &Embedding) -> EmbeddingReport {
    let diagnostics = e.diagnostics();
    let mut report = EmbeddingReport {
        n: e.n,
        s: e.s,
        valid: diagnostics.is_empty(),
        diagnostics,
        atom_ranks_ok: false,
        homomorphism_ok: false,
        homomorphism_exhaustive: false,
    };
    if !report.valid {
        return report;
    }
    let space = StandardSpace::new(e.n).expect("n > 0 for a valid embedding");
    let map = |x: &HElement| e.map(x).expect("valid embedding");
    report.atom_ranks_ok = space.atoms().all(|a| map(&a).rank() == Rank::ratio(1, e.n));
    let unital = map(&space.one()).is_one();
    report.homomorphism_exhaustive = e.n <= EXHAUSTIVE_ELEMENT_BOUND;
    report.homomorphism_ok = unital
        && if report.homomorphism_exhaustive {
            let elements: Vec<HElement> = space.elements().expect("small").collect();
            let images: Vec<HElement> = elements.iter().map(map).collect();
            images.iter().zip(&elements).all(|(img, x)| img.rank() == x.rank())
                && (0..elements.len()).all(|i| {
                    (0..elements.len()).all(|j| {
                        // elements are in mask order
                        images[i].add(&images[j]).ok() == Some(images[i ^ j].clone())
                            && images[i].mul(&images[j]).ok() == Some(images[i & j].clone())
                    })
                })
        } else {
            let atoms: Vec<HElement> = space.atoms().map(|a| map(&a)).collect();
            atoms.iter().enumerate().all(|(i, a)| {
                atoms[i + 1..].iter().all(|b| a.is_orthogonal_to(b).unwrap_or(false))
            })
        };
    report
}

/// Generators `f_j` of the complement `H'` in `H_s = H_n · H'`, with the
/// pairing `pairing[i][j] = e_ij`, the `j`-th atom (ascending) of block `i`.
#[derive(Debug, Clone, Serialize)]
pub struct ComplementFactorization {
    pub n: usize,
    pub s: usize,
    pub generators: Vec<HElement>,
    pub pairing: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ComplementReport {
    /// `s / n`: the complement is `H_{s/n}`.
    pub complement_size: usize,
    /// `2^{s/n}` when it fits.
    pub subalgebra_elements: Option<u64>,
    /// The `f_j` are nonzero, pairwise orthogonal and sum to 1, so they are
    /// exactly the atoms of the subalgebra they generate.
    pub generators_are_atoms: bool,
    pub generator_ranks_ok: bool,
    /// `block_i · f_j = e_ij`, and `(i, j) ↦ e_ij` is a bijection onto the
    /// atoms of `H_s`.
    pub pairing_bijection: bool,
    /// The induced map `H_n ⊗ H' → H_s` preserves products and ranks on
    /// pure tensors (every pure tensor when small, atoms otherwise).
    pub tensor_iso_ok: bool,
    /// Every element of `H_s` is the sum of the pairing products below it.
    pub spans_ok: bool,
    pub failures: Vec<String>,
}

impl ComplementReport {
    pub fn passed(&self) -> bool {
        self.generators_are_atoms
            && self.generator_ranks_ok
            && self.pairing_bijection
            && self.tensor_iso_ok
            && self.spans_ok
            && self.failures.is_empty()
    }
}

/// Splits `H_s` as `H_n ⊗ H'` along a valid embedding: `f_j = Σ_i e_ij`.
pub fn factor_complement(e: &Embedding) -> Result<ComplementFactorization, ChainError> {
    let e = e.clone().validated()?;
    let q = e.s / e.n;
    let pairing: Vec<Vec<usize>> = (0..e.n).map(|i| e.block(i)).collect();
    let generators = (0..q)
        .map(|j| {
            let support: Vec<usize> = pairing.iter().map(|block| block[j]).collect();
            HElement::from_support(e.s, &support)
        })
        .collect::<Result<_, _>>()?;
    Ok(ComplementFactorization { n: e.n, s: e.s, generators, pairing })
}

impl ComplementFactorization {
    /// Image in `H_s` of `x ∈ H_n` (left factor).
    pub fn left(&self, x: &HElement) -> HElement {
        let support: Vec<usize> = x.support().flat_map(|i| self.pairing[i].clone()).collect();
        HElement::from_support(self.s, &support).expect("in range")
    }

    /// Image in `H_s` of `y ∈ H_{s/n}` (complement factor).
    pub fn right(&self, y: &HElement) -> HElement {
        y.support().fold(HElement::zero(self.s), |acc, j| {
            acc.add(&self.generators[j]).expect("same space")
        })
    }

    pub fn verify(&self) -> ComplementReport {
        let (n, s) = (self.n, self.s);
        let q = self.generators.len();
        let mut failures = Vec::new();

        let total = self.generators.iter().fold(HElement::zero(s), |acc, f| {
            acc.add(f).expect("same space")
        });
        let pairwise = self.generators.iter().enumerate().all(|(j, f)| {
            self.generators[j + 1..].iter().all(|g| f.is_orthogonal_to(g).unwrap_or(false))
        });
        let generators_are_atoms = pairwise
            && total.is_one()
            && self.generators.iter().all(|f| !f.is_zero());
        let generator_ranks_ok = self.generators.iter().all(|f| f.rank() == Rank::ratio(n, s));

        let mut hit = vec![false; s];
        let mut pairing_bijection = true;
        for i in 0..n {
            let block = HElement::from_support(s, &self.pairing[i]).expect("in range");
            for (j, f) in self.generators.iter().enumerate() {
                let eij = block.mul(f).expect("same space");
                let atom = self.pairing[i][j];
                if eij != HElement::atom(s, atom) {
                    failures.push(format!("block {i} · f_{j} = {eij} is not atom {atom}"));
                    pairing_bijection = false;
                }
                if std::mem::replace(&mut hit[atom], true) {
                    pairing_bijection = false;
                }
            }
        }
        pairing_bijection &= hit.iter().all(|&h| h);

        let small = n + q <= 12;
        let left: Vec<HElement> = if small {
            StandardSpace::new(n).unwrap().elements().unwrap().collect()
        } else {
            StandardSpace::new(n).unwrap().atoms().collect()
        };
        let right: Vec<HElement> = if small {
            StandardSpace::new(q).unwrap().elements().unwrap().collect()
        } else {
            StandardSpace::new(q).unwrap().atoms().collect()
        };
        let mut tensor_iso_ok = true;
        for x in &left {
            let lx = self.left(x);
            for y in &right {
                let img = lx.mul(&self.right(y)).expect("same space");
                // r(x)·r(y) = |x||y| / nq and nq = s
                let expected: Vec<usize> = x
                    .support()
                    .flat_map(|i| y.support().map(move |j| (i, j)))
                    .map(|(i, j)| self.pairing[i][j])
                    .collect();
                let expected = HElement::from_support(s, &expected).expect("in range");
                if img.weight() != x.weight() * y.weight() || img != expected {
                    tensor_iso_ok = false;
                    failures.push(format!("pure tensor {x} ⊗ {y}"));
                }
            }
        }

        let spans_ok = if s <= EXHAUSTIVE_ELEMENT_BOUND {
            // s <= 12, so elements fit in a u64 mask
            let atoms: Vec<u64> = self.pairing.iter().flatten().map(|&a| 1u64 << a).collect();
            (0..1u64 << s).all(|x| atoms.iter().filter(|&&a| a & x == a).fold(0, |acc, a| acc | a) == x)
        } else {
            pairing_bijection
        };

        ComplementReport {
            complement_size: q,
            subalgebra_elements: (q < 64).then(|| 1u64 << q),
            generators_are_atoms,
            generator_ranks_ok,
            pairing_bijection,
            tensor_iso_ok,
            spans_ok,
            failures,
        }
    }
}

/// An ascending chain of standard spaces with explicit embeddings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainSpace {
    sizes: Vec<usize>,
    embeddings: Vec<Embedding>,
    complete: bool,
}

impl ChainSpace {
    /// A chain with consecutive-block embeddings.
    pub fn canonical(sizes: &[usize]) -> Result<Self, ChainError> {
        Self::new(sizes.to_vec(), None, false)
    }

    /// Validates divisibility, every embedding, and the composite
    /// embeddings from each level to the top.
    pub fn new(
        sizes: Vec<usize>,
        embeddings: Option<Vec<Embedding>>,
        complete: bool,
    ) -> Result<Self, ChainError> {
        if sizes.is_empty() {
            return Err(ChainError::EmptyChain);
        }
        if sizes.contains(&0) {
            return Err(ChainError::ZeroSize);
        }
        for w in sizes.windows(2) {
            if w[1] % w[0] != 0 {
                return Err(ChainError::NotDivisible { lower: w[0], upper: w[1] });
            }
        }
        let embeddings = match embeddings {
            None => sizes
                .windows(2)
                .map(|w| Embedding::canonical(w[0], w[1]))
                .collect::<Result<Vec<_>, _>>()?,
            Some(list) => {
                if list.len() + 1 != sizes.len() {
                    return Err(ChainError::EmbeddingCount {
                        levels: sizes.len(),
                        expected: sizes.len() - 1,
                        got: list.len(),
                    });
                }
                for (index, (e, w)) in list.iter().zip(sizes.windows(2)).enumerate() {
                    if e.n != w[0] || e.s != w[1] {
                        return Err(ChainError::EmbeddingShape {
                            index,
                            n: e.n,
                            s: e.s,
                            lower: w[0],
                            upper: w[1],
                        });
                    }
                }
                list.into_iter().map(Embedding::validated).collect::<Result<_, _>>()?
            }
        };
        let chain = Self { sizes, embeddings, complete };
        for level in 0..chain.sizes.len() {
            chain.embedding_to_top(level)?.validated()?;
        }
        Ok(chain)
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn embeddings(&self) -> &[Embedding] {
        &self.embeddings
    }

    pub fn is_complete(&self) -> bool {
        self.complete
    }

    pub fn with_complete(mut self, complete: bool) -> Self {
        self.complete = complete;
        self
    }

    pub fn depth(&self) -> usize {
        self.sizes.len()
    }

    pub fn top(&self) -> usize {
        *self.sizes.last().expect("nonempty")
    }

    /// Composite embedding from `level` (0-based) to the top.
    pub fn embedding_to_top(&self, level: usize) -> Result<Embedding, ChainError> {
        let mut acc = Embedding::canonical(self.sizes[level], self.sizes[level])?;
        for e in &self.embeddings[level..] {
            acc = acc.then(e)?;
        }
        Ok(acc)
    }

    /// The chain extended to `depth` levels by repeating the top.
    fn padded(&self, depth: usize) -> ChainSpace {
        let mut out = self.clone();
        while out.sizes.len() < depth {
            let top = out.top();
            out.sizes.push(top);
            out.embeddings.push(Embedding::canonical(top, top).expect("top > 0"));
        }
        out
    }
}

#[derive(Serialize, Deserialize)]
struct ChainFile {
    sizes: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    embeddings: Option<Vec<Vec<Vec<usize>>>>,
    #[serde(default)]
    complete: bool,
}

impl Serialize for ChainSpace {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let embeddings = if self.embeddings.iter().all(Embedding::is_canonical) {
            None
        } else {
            Some(self.embeddings.iter().map(Embedding::blocks).collect())
        };
        ChainFile { sizes: self.sizes.clone(), embeddings, complete: self.complete }
            .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ChainSpace {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = ChainFile::deserialize(deserializer)?;
        let embeddings = raw.embeddings.map(|list| {
            list.into_iter()
                .zip(raw.sizes.windows(2))
                .map(|(blocks, w)| Embedding::from_blocks(w[0], w[1], blocks))
                .collect()
        });
        ChainSpace::new(raw.sizes, embeddings, raw.complete).map_err(serde::de::Error::custom)
    }
}

/// Primes of `n_1, n_2/n_1, …, n_k/n_{k-1}` in chain order, each quotient
/// factored in ascending order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PrimeDecomposition {
    pub primes: Vec<u64>,
    pub per_level: Vec<Vec<u64>>,
}

impl PrimeDecomposition {
    pub fn product(&self) -> BigUint {
        self.primes.iter().map(|&p| BigUint::from(p)).product()
    }
}

fn prime_list(n: u64) -> Vec<u64> {
    num_prime::nt_funcs::factorize64(n)
        .into_iter()
        .flat_map(|(p, k)| std::iter::repeat_n(p, k))
        .collect()
}

pub fn decompose_chain(c: &ChainSpace) -> PrimeDecomposition {
    let mut prev = 1;
    let mut per_level = Vec::with_capacity(c.depth());
    for &n in &c.sizes {
        per_level.push(prime_list((n / prev) as u64));
        prev = n;
    }
    let primes = per_level.iter().flatten().copied().collect();
    PrimeDecomposition { primes, per_level }
}

/// lcm of the level sizes, i.e. the top size. This is the part of the
/// Steinitz number of the limit space seen by the truncation.
pub fn steinitz_of_chain(c: &ChainSpace) -> SteinitzNumber {
    c.sizes.iter().fold(SteinitzNumber::one(), |acc, &n| {
        acc.lcm(&SteinitzNumber::from_natural(n as u64).expect("positive"))
    })
}

/// Explicit isomorphism `H_{p_1} ⊗ ⋯ ⊗ H_{p_r} → H_{n_k}` compatible with
/// the chain: the tensor index `t` (row-major over the primes of
/// [`decompose_chain`]) goes to atom `atom_map[t]` of the top level.
#[derive(Debug, Clone, Serialize)]
pub struct Retensor {
    pub primes: Vec<u64>,
    pub atom_map: Vec<usize>,
}

/// Builds the atom map level by level: if `φ` identifies tensor indices of
/// level `i` with its atoms, then index `t·q + j` of level `i+1` goes to
/// the `j`-th atom of the block of `φ(t)`.
pub fn retensor(c: &ChainSpace) -> Result<Retensor, ChainError> {
    if c.top() > MAX_EXPLICIT_ATOMS {
        return Err(ChainError::TooLarge(c.top()));
    }
    let mut map: Vec<usize> = (0..c.sizes[0]).collect();
    for e in &c.embeddings {
        let q = e.s / e.n;
        let mut next = vec![0; e.s];
        for (t, &atom) in map.iter().enumerate() {
            for (j, target) in e.block(atom).into_iter().enumerate() {
                next[t * q + j] = target;
            }
        }
        map = next;
    }
    Ok(Retensor { primes: decompose_chain(c).primes, atom_map: map })
}

#[derive(Debug, Clone, Serialize)]
pub struct RetensorReport {
    pub top: usize,
    pub prime_product_ok: bool,
    pub bijection: bool,
    /// Each level-`i` atom is the sum of the tensor indices with the
    /// matching prefix.
    pub levels_compatible: bool,
    /// Rank and product preservation on pure tensors.
    pub pure_tensors_ok: bool,
    pub pure_tensors_checked: usize,
}

impl RetensorReport {
    pub fn passed(&self) -> bool {
        self.prime_product_ok && self.bijection && self.levels_compatible && self.pure_tensors_ok
    }
}

fn digits(mut t: usize, radices: &[u64]) -> Vec<usize> {
    let mut out = vec![0; radices.len()];
    for (slot, &p) in out.iter_mut().zip(radices).rev() {
        *slot = t % p as usize;
        t /= p as usize;
    }
    out
}

pub fn verify_retensor(c: &ChainSpace, r: &Retensor) -> Result<RetensorReport, ChainError> {
    let top = c.top();
    let prime_product_ok = r.primes.iter().product::<u64>() == top as u64;
    let mut seen = vec![false; top];
    let bijection = r.atom_map.len() == top
        && r.atom_map.iter().all(|&a| a < top && !std::mem::replace(&mut seen[a], true));

    let mut levels_compatible = true;
    for (level, &n) in c.sizes.iter().enumerate() {
        let e = c.embedding_to_top(level)?;
        let q = top / n;
        for t in 0..n {
            let mut from_map: Vec<usize> = (0..q).map(|j| r.atom_map[t * q + j]).collect();
            from_map.sort_unstable();
            // the level-i tensor index t is the level-i atom map applied to t
            let atom = level_atom(c, level, t);
            if e.block(atom) != from_map {
                levels_compatible = false;
            }
        }
    }

    let mut pure_tensors_ok = true;
    let mut pure_tensors_checked = 0;
    if top <= EXHAUSTIVE_RETENSOR_BOUND && bijection {
        let factors: Vec<Vec<HElement>> = r
            .primes
            .iter()
            .map(|&p| StandardSpace::new(p as usize).unwrap().elements().unwrap().collect())
            .collect();
        let image = |choice: &[usize]| -> HElement {
            let support: Vec<usize> = (0..top)
                .filter(|&t| {
                    digits(t, &r.primes)
                        .iter()
                        .zip(choice)
                        .enumerate()
                        .all(|(f, (&d, &k))| factors[f][k].bit(d))
                })
                .map(|t| r.atom_map[t])
                .collect();
            HElement::from_support(top, &support).unwrap()
        };
        let counts: Vec<usize> = factors.iter().map(Vec::len).collect();
        let total: usize = counts.iter().product();
        let choices: Vec<Vec<usize>> = (0..total)
            .map(|mut k| {
                let mut ch = vec![0; counts.len()];
                for (slot, &c) in ch.iter_mut().zip(&counts).rev() {
                    *slot = k % c;
                    k /= c;
                }
                ch
            })
            .collect();
        let images: Vec<HElement> = choices.iter().map(|ch| image(ch)).collect();
        for (ch, img) in choices.iter().zip(&images) {
            pure_tensors_checked += 1;
            let expected = ch
                .iter()
                .enumerate()
                .map(|(f, &k)| factors[f][k].rank().into_value())
                .product::<num_rational::BigRational>();
            if img.rank().into_value() != expected {
                pure_tensors_ok = false;
            }
        }
        // products of pure tensors: elements are in mask order in each factor
        for (a, ia) in choices.iter().zip(&images).step_by(7) {
            for (b, ib) in choices.iter().zip(&images) {
                let meet: Vec<usize> = a.iter().zip(b).map(|(&x, &y)| x & y).collect();
                let k = meet.iter().zip(&counts).fold(0, |acc, (&d, &c)| acc * c + d);
                if ia.mul(ib).unwrap() != images[k] {
                    pure_tensors_ok = false;
                }
            }
        }
    }

    Ok(RetensorReport {
        top,
        prime_product_ok,
        bijection,
        levels_compatible,
        pure_tensors_ok,
        pure_tensors_checked,
    })
}

/// Atom of level `level` carrying tensor index `t` in the retensor
/// construction.
fn level_atom(c: &ChainSpace, level: usize, t: usize) -> usize {
    let mut map: Vec<usize> = (0..c.sizes[0]).collect();
    for e in &c.embeddings[..level] {
        let q = e.s / e.n;
        let mut next = vec![0; e.s];
        for (u, &atom) in map.iter().enumerate() {
            for (j, target) in e.block(atom).into_iter().enumerate() {
                next[u * q + j] = target;
            }
        }
        map = next;
    }
    map[t]
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum IsoOutcome {
    /// Equal Steinitz truncations; `bijection[a]` is the atom of the second
    /// top level matched with atom `a` of the first.
    IsomorphicTruncations { bijection: Vec<usize> },
    Distinct,
    UndecidedAtDepth,
}

/// Compares two chains by their Steinitz truncations.
///
/// Unequal truncations only prove the limits distinct when the chains are
/// declared complete. A complete chain whose truncation is not a multiple
/// of the other's can never be reconciled either, since the other limit's
/// Steinitz number is a multiple of its truncation.
pub fn iso_test(c1: &ChainSpace, c2: &ChainSpace) -> Result<IsoOutcome, ChainError> {
    let (s1, s2) = (steinitz_of_chain(c1), steinitz_of_chain(c2));
    if s1 == s2 {
        return Ok(IsoOutcome::IsomorphicTruncations { bijection: match_atoms(c1, c2)? });
    }
    let distinct = (c1.complete && c2.complete)
        || (c1.complete && !s2.divides(&s1))
        || (c2.complete && !s1.divides(&s2));
    Ok(if distinct { IsoOutcome::Distinct } else { IsoOutcome::UndecidedAtDepth })
}

/// Atom bijection between two top levels of equal size, built by matching
/// the prime factors of both decompositions.
fn match_atoms(c1: &ChainSpace, c2: &ChainSpace) -> Result<Vec<usize>, ChainError> {
    let (r1, r2) = (retensor(c1)?, retensor(c2)?);
    // sigma[i] = position in r2.primes of the factor matched with r1.primes[i]
    let mut used = vec![false; r2.primes.len()];
    let sigma: Vec<usize> = r1
        .primes
        .iter()
        .map(|p| {
            let k = (0..r2.primes.len())
                .find(|&k| !used[k] && r2.primes[k] == *p)
                .expect("equal prime multisets");
            used[k] = true;
            k
        })
        .collect();
    let top = c1.top();
    let mut bijection = vec![0; top];
    for t1 in 0..top {
        let d1 = digits(t1, &r1.primes);
        let mut d2 = vec![0; d1.len()];
        for (i, &d) in d1.iter().enumerate() {
            d2[sigma[i]] = d;
        }
        let t2 = d2.iter().zip(&r2.primes).fold(0, |acc, (&d, &p)| acc * p as usize + d);
        bijection[r1.atom_map[t1]] = r2.atom_map[t2];
    }
    Ok(bijection)
}

/// The chain of products `H_{n_i} ⊗ H_{m_i}`; the shorter chain is padded
/// by repeating its top level.
pub fn tensor_chains(c1: &ChainSpace, c2: &ChainSpace) -> Result<ChainSpace, ChainError> {
    let depth = c1.depth().max(c2.depth());
    let (a, b) = (c1.padded(depth), c2.padded(depth));
    let sizes = a.sizes.iter().zip(&b.sizes).map(|(x, y)| x * y).collect();
    let embeddings = a.embeddings.iter().zip(&b.embeddings).map(|(e, f)| e.tensor(f)).collect();
    ChainSpace::new(sizes, Some(embeddings), a.complete && b.complete)
}

#[derive(Debug, Clone, Serialize)]
pub struct MultiplicativityReport {
    pub product_sizes: Vec<usize>,
    pub st_left: SteinitzNumber,
    pub st_right: SteinitzNumber,
    pub st_product: SteinitzNumber,
    pub holds: bool,
}

pub fn st_multiplicativity_check(
    c1: &ChainSpace,
    c2: &ChainSpace,
) -> Result<MultiplicativityReport, ChainError> {
    let product = tensor_chains(c1, c2)?;
    let (st_left, st_right) = (steinitz_of_chain(c1), steinitz_of_chain(c2));
    let st_product = steinitz_of_chain(&product);
    let holds = st_product == st_left.mul(&st_right);
    Ok(MultiplicativityReport {
        product_sizes: product.sizes.clone(),
        st_left,
        st_right,
        st_product,
        holds,
    })
}

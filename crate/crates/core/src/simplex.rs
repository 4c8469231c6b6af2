//! Functions on the ordered simplex `T_n = {t_1 >= t_2 >= … >= t_n >= 0}`.
//!
//! `T_n` is partitioned into diagonal strata labelled by compositions
//! `(l_1, …, l_i)`: block `j` consists of `l_j + 1` equal coordinates and
//! the block values are strictly decreasing. A [`StratifiedFunction`]
//! stores, per stratum, a sum of rank-one terms `g_1(τ_1)⋯g_i(τ_i)` in the
//! block values `τ_1 > … > τ_i`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jacobi::NormSequence;
use crate::piecewise::PiecewisePolynomial;
use crate::rational::{self, Rational};

/// Stratum label `(l_1, …, l_i)` with `i >= 1`; degree `n = i + Σ l_j`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Composition(Vec<usize>);

impl Composition {
    pub fn new(parts: Vec<usize>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::InvalidComposition("no blocks".into()));
        }
        Ok(Self(parts))
    }

    pub fn parts(&self) -> &[usize] {
        &self.0
    }

    /// Number of blocks `i`.
    pub fn blocks(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> usize {
        self.0.iter().map(|l| l + 1).sum()
    }

    /// Block sizes `l_j + 1`.
    pub fn block_sizes(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().map(|l| l + 1)
    }

    pub fn from_block_sizes(sizes: &[usize]) -> Result<Self> {
        if sizes.contains(&0) {
            return Err(Error::InvalidComposition("empty block".into()));
        }
        Self::new(sizes.iter().map(|s| s - 1).collect())
    }
}

/// Ascending number of blocks, then descending lexicographic in the parts,
/// so that `n = 3` lists `(2), (1,0), (0,1), (0,0,0)`.
impl Ord for Composition {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for Composition {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl TryFrom<Vec<usize>> for Composition {
    type Error = Error;

    fn try_from(v: Vec<usize>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<Composition> for Vec<usize> {
    fn from(c: Composition) -> Self {
        c.0
    }
}

impl fmt::Debug for Composition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Composition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(ToString::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// All compositions of degree `n`, in [`Composition`] order. There are
/// `2^{n-1}` of them.
pub fn compositions(n: usize) -> Result<Vec<Composition>> {
    if n == 0 {
        return Err(Error::InvalidComposition("degree must be >= 1".into()));
    }
    let mut out = Vec::with_capacity(1 << (n - 1));
    // bit k of mask set <=> a block boundary after coordinate k+1
    for mask in 0u64..(1u64 << (n - 1)) {
        let mut sizes = Vec::new();
        let mut size = 1;
        for k in 0..n - 1 {
            if mask >> k & 1 == 1 {
                sizes.push(size);
                size = 1;
            } else {
                size += 1;
            }
        }
        sizes.push(size);
        out.push(Composition::from_block_sizes(&sizes)?);
    }
    out.sort();
    Ok(out)
}

/// `coefficient · g_1(τ_1) ⋯ g_i(τ_i)` on the strict simplex `τ_1 > … > τ_i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankTerm {
    #[serde(rename = "coeff", with = "rational::serde_str")]
    pub coefficient: Rational,
    pub factors: Vec<PiecewisePolynomial>,
}

impl RankTerm {
    /// `None` when the term vanishes identically.
    pub fn new(coefficient: Rational, factors: Vec<PiecewisePolynomial>) -> Option<Self> {
        if coefficient.is_zero() || !orderable(&factors) {
            None
        } else {
            Some(Self {
                coefficient,
                factors,
            })
        }
    }
}

/// Whether the supports admit `τ_1 > … > τ_i` on a set of positive measure.
/// Zero factors make this false.
fn orderable(factors: &[PiecewisePolynomial]) -> bool {
    let mut floor: Option<&Rational> = None;
    for f in factors.iter().rev() {
        let Some((lo, hi)) = f.support() else {
            return false;
        };
        let lo = match floor {
            Some(m) if m > lo => m,
            _ => lo,
        };
        if lo >= hi {
            return false;
        }
        floor = Some(lo);
    }
    true
}

/// Weights attached to each stratum by the inner product.
#[derive(Clone, Copy, Debug)]
pub enum Weights<'a> {
    /// Every stratum weighted by 1.
    Lebesgue,
    /// Stratum `(l_1, …, l_i)` weighted by `c_{l_1+1} ⋯ c_{l_i+1}`.
    Norms(&'a NormSequence),
}

impl Weights<'_> {
    pub fn weight(&self, comp: &Composition) -> Result<Rational> {
        match self {
            Weights::Lebesgue => Ok(Rational::one()),
            Weights::Norms(c) => {
                let mut w = Rational::one();
                for l in comp.parts() {
                    w *= c.get(l + 1)?;
                }
                Ok(w)
            }
        }
    }
}

/// An element of `L²(T_n, m_n)` given stratum by stratum.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StratifiedFunction {
    degree: usize,
    components: BTreeMap<Composition, Vec<RankTerm>>,
}

impl StratifiedFunction {
    pub fn zero(degree: usize) -> Self {
        Self {
            degree,
            components: BTreeMap::new(),
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn components(&self) -> &BTreeMap<Composition, Vec<RankTerm>> {
        &self.components
    }

    pub fn terms(&self, comp: &Composition) -> &[RankTerm] {
        self.components.get(comp).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn term_count(&self) -> usize {
        self.components.values().map(Vec::len).sum()
    }

    /// No stored terms at all. Stronger than [`strat_is_zero`].
    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// Adds `coefficient · Π factors` on stratum `comp`; dropped if it vanishes.
    pub fn push(
        &mut self,
        comp: Composition,
        coefficient: Rational,
        factors: Vec<PiecewisePolynomial>,
    ) -> Result<()> {
        if comp.degree() != self.degree {
            return Err(Error::DegreeMismatch(comp.degree(), self.degree));
        }
        if comp.blocks() != factors.len() {
            return Err(Error::InvalidComposition(format!(
                "{comp} has {} blocks but term has {} factors",
                comp.blocks(),
                factors.len()
            )));
        }
        if let Some(t) = RankTerm::new(coefficient, factors) {
            self.components.entry(comp).or_default().push(t);
        }
        Ok(())
    }

    pub(crate) fn push_term(&mut self, comp: Composition, term: RankTerm) {
        debug_assert_eq!(comp.degree(), self.degree);
        debug_assert_eq!(comp.blocks(), term.factors.len());
        if let Some(t) = RankTerm::new(term.coefficient, term.factors) {
            self.components.entry(comp).or_default().push(t);
        }
    }

    pub fn scale(&self, r: &Rational) -> Self {
        if r.is_zero() {
            return Self::zero(self.degree);
        }
        let components = self
            .components
            .iter()
            .map(|(c, ts)| {
                let ts = ts
                    .iter()
                    .map(|t| RankTerm {
                        coefficient: &t.coefficient * r,
                        factors: t.factors.clone(),
                    })
                    .collect();
                (c.clone(), ts)
            })
            .collect();
        Self {
            degree: self.degree,
            components,
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.degree != other.degree {
            return Err(Error::DegreeMismatch(self.degree, other.degree));
        }
        let mut out = self.clone();
        out.add_assign(other.clone());
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(&-Rational::one()))
    }

    pub(crate) fn add_assign(&mut self, other: Self) {
        debug_assert_eq!(self.degree, other.degree);
        for (c, ts) in other.components {
            self.components.entry(c).or_default().extend(ts);
        }
    }
}

/// `Σ coefficient · h_1 ⊗ … ⊗ h_n` on all of `ℝ₊ⁿ`. Arity 0 holds a scalar
/// (terms with empty tuples).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawTensorSum", into = "RawTensorSum")]
pub struct TensorSum {
    arity: usize,
    terms: Vec<(Rational, Vec<PiecewisePolynomial>)>,
}

impl TensorSum {
    pub fn zero(arity: usize) -> Self {
        Self {
            arity,
            terms: Vec::new(),
        }
    }

    pub fn pure(factors: Vec<PiecewisePolynomial>) -> Self {
        let mut s = Self::zero(factors.len());
        s.push(Rational::one(), factors);
        s
    }

    pub fn scalar(c: Rational) -> Self {
        let mut s = Self::zero(0);
        s.push(c, Vec::new());
        s
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn terms(&self) -> &[(Rational, Vec<PiecewisePolynomial>)] {
        &self.terms
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Value of an arity-0 sum.
    pub fn scalar_value(&self) -> Rational {
        debug_assert_eq!(self.arity, 0);
        self.terms.iter().map(|(c, _)| c.clone()).sum()
    }

    /// Appends a term, dropping it when it vanishes.
    ///
    /// Panics if the tuple length differs from the arity.
    pub fn push(&mut self, coefficient: Rational, factors: Vec<PiecewisePolynomial>) {
        assert_eq!(factors.len(), self.arity, "tensor arity mismatch");
        if coefficient.is_zero() || factors.iter().any(PiecewisePolynomial::is_zero) {
            return;
        }
        self.terms.push((coefficient, factors));
    }

    pub fn extend_scaled(&mut self, other: &TensorSum, r: &Rational) {
        assert_eq!(other.arity, self.arity, "tensor arity mismatch");
        for (c, fs) in &other.terms {
            self.push(c * r, fs.clone());
        }
    }

    pub fn scale(&self, r: &Rational) -> Self {
        let mut out = Self::zero(self.arity);
        out.extend_scaled(self, r);
        out
    }
}

/// Restriction of a tensor sum to `T_n`, stratum by stratum: on stratum
/// `(l_1, …, l_i)` a pure tensor becomes the rank-one term whose `j`-th
/// factor is the product of the `h`'s in block `j`.
///
/// Panics on arity 0.
pub fn restrict_to_simplex(f: &TensorSum) -> StratifiedFunction {
    let n = f.arity();
    assert!(n >= 1, "restriction needs arity >= 1");
    let mut out = StratifiedFunction::zero(n);
    for comp in compositions(n).expect("n >= 1") {
        for (c, hs) in f.terms() {
            let mut factors = Vec::with_capacity(comp.blocks());
            let mut pos = 0;
            for size in comp.block_sizes() {
                let block = &hs[pos..pos + size];
                let prod = block[1..].iter().fold(block[0].clone(), |acc, h| &acc * h);
                pos += size;
                factors.push(prod);
            }
            out.push_term(
                comp.clone(),
                RankTerm {
                    coefficient: c.clone(),
                    factors,
                },
            );
        }
    }
    out
}

/// `(f ▷ g)(t_1, …, t_{m+n}) = f(t_1, …, t_m) g(t_{m+1}, …, t_{m+n})` on
/// `T_{m+n}`. A block straddling position `m` contributes its value to both
/// sides and the two factors meet pointwise.
pub fn monotone_product(f: &StratifiedFunction, g: &StratifiedFunction) -> StratifiedFunction {
    let m = f.degree();
    let n = g.degree();
    let mut out = StratifiedFunction::zero(m + n);
    if f.is_empty() || g.is_empty() {
        return out;
    }
    for comp in compositions(m + n).expect("degree >= 2") {
        let sizes: Vec<usize> = comp.block_sizes().collect();
        let mut cum = 0;
        let mut k = 0;
        while cum + sizes[k] < m {
            cum += sizes[k];
            k += 1;
        }
        // block k holds coordinate m
        let left_top = m - cum;
        let right_top = sizes[k] - left_top;
        let mut left_sizes = sizes[..k].to_vec();
        left_sizes.push(left_top);
        let straddles = right_top > 0;
        let mut right_sizes = Vec::new();
        if straddles {
            right_sizes.push(right_top);
        }
        right_sizes.extend_from_slice(&sizes[k + 1..]);
        let left = Composition::from_block_sizes(&left_sizes).expect("nonempty blocks");
        let right = Composition::from_block_sizes(&right_sizes).expect("nonempty blocks");
        let (ft, gt) = (f.terms(&left), g.terms(&right));
        for a in ft {
            for b in gt {
                let mut factors = a.factors.clone();
                if straddles {
                    let last = factors.pop().unwrap();
                    factors.push(&last * &b.factors[0]);
                    factors.extend(b.factors[1..].iter().cloned());
                } else {
                    factors.extend(b.factors.iter().cloned());
                }
                out.push_term(
                    comp.clone(),
                    RankTerm {
                        coefficient: &a.coefficient * &b.coefficient,
                        factors,
                    },
                );
            }
        }
    }
    out
}

/// `∫_{t_1 > … > t_i} h_1(t_1) ⋯ h_i(t_i) dt` by nested tail integrals:
/// `K_1 = T h_1`, `K_{j+1} = T(h_{j+1} K_j)`, result `K_i(0)`.
pub fn simplex_integral(hs: &[PiecewisePolynomial]) -> Rational {
    let Some((last, init)) = hs.split_last() else {
        return Rational::one();
    };
    let mut kernel: Option<PiecewisePolynomial> = None;
    for h in init {
        let integrand = match &kernel {
            None => h.clone(),
            Some(k) => h * k,
        };
        kernel = Some(integrand.tail_integral());
    }
    match kernel {
        None => last.integral(),
        Some(k) => (last * &k).integral(),
    }
}

/// Inner product in `L²(T_n, m_n)` with the given stratum weights.
/// Zero-weight strata are skipped.
pub fn inner_product(
    f: &StratifiedFunction,
    g: &StratifiedFunction,
    weights: Weights<'_>,
) -> Result<Rational> {
    if f.degree() != g.degree() {
        return Err(Error::DegreeMismatch(f.degree(), g.degree()));
    }
    let mut total = Rational::zero();
    for (comp, fts) in f.components() {
        let gts = g.terms(comp);
        if gts.is_empty() {
            continue;
        }
        let w = weights.weight(comp)?;
        if w.is_zero() {
            continue;
        }
        let mut acc = Rational::zero();
        for a in fts {
            for b in gts {
                let hs: Vec<PiecewisePolynomial> = a
                    .factors
                    .iter()
                    .zip(&b.factors)
                    .map(|(x, y)| x * y)
                    .collect();
                if hs.iter().any(PiecewisePolynomial::is_zero) {
                    continue;
                }
                acc += &a.coefficient * &b.coefficient * simplex_integral(&hs);
            }
        }
        total += w * acc;
    }
    Ok(total)
}

/// Lebesgue zero-norm on every stratum, independent of ν.
pub fn strat_is_zero(f: &StratifiedFunction) -> bool {
    let merged = f.merged();
    merged.is_empty()
        || inner_product(&merged, &merged, Weights::Lebesgue)
            .expect("same degree")
            .is_zero()
}

impl StratifiedFunction {
    /// Same function with terms sharing a factor list collected.
    pub fn merged(&self) -> StratifiedFunction {
        let mut out = StratifiedFunction::zero(self.degree());
        for (comp, terms) in self.components() {
            let mut sums: BTreeMap<&[PiecewisePolynomial], Rational> = BTreeMap::new();
            for t in terms {
                *sums.entry(&t.factors).or_insert_with(Rational::zero) += &t.coefficient;
            }
            for (factors, c) in sums {
                out.push_term(
                    comp.clone(),
                    RankTerm {
                        coefficient: c,
                        factors: factors.to_vec(),
                    },
                );
            }
        }
        out
    }
}

#[derive(Serialize, Deserialize)]
struct RawTensorSum {
    arity: usize,
    terms: Vec<RawTensorTerm>,
}

#[derive(Serialize, Deserialize)]
struct RawTensorTerm {
    #[serde(with = "rational::serde_str")]
    coeff: Rational,
    factors: Vec<PiecewisePolynomial>,
}

impl TryFrom<RawTensorSum> for TensorSum {
    type Error = Error;

    fn try_from(raw: RawTensorSum) -> Result<Self> {
        let mut out = TensorSum::zero(raw.arity);
        for t in raw.terms {
            if t.factors.len() != raw.arity {
                return Err(Error::InvalidComposition(format!(
                    "tensor term of length {} in a sum of arity {}",
                    t.factors.len(),
                    raw.arity
                )));
            }
            out.push(t.coeff, t.factors);
        }
        Ok(out)
    }
}

impl From<TensorSum> for RawTensorSum {
    fn from(t: TensorSum) -> Self {
        RawTensorSum {
            arity: t.arity,
            terms: t
                .terms
                .into_iter()
                .map(|(coeff, factors)| RawTensorTerm { coeff, factors })
                .collect(),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct RawStratum {
    composition: Composition,
    terms: Vec<RankTerm>,
}

impl Serialize for StratifiedFunction {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let raw: Vec<RawStratum> = self
            .components
            .iter()
            .map(|(c, ts)| RawStratum {
                composition: c.clone(),
                terms: ts.clone(),
            })
            .collect();
        raw.serialize(s)
    }
}

impl<'de> Deserialize<'de> for StratifiedFunction {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = Vec::<RawStratum>::deserialize(d)?;
        let degree = raw
            .first()
            .map(|r| r.composition.degree())
            .ok_or_else(|| D::Error::custom("empty stratified function has no degree"))?;
        let mut out = StratifiedFunction::zero(degree);
        for r in raw {
            for t in r.terms {
                out.push(r.composition.clone(), t.coefficient, t.factors)
                    .map_err(D::Error::custom)?;
            }
        }
        Ok(out)
    }
}

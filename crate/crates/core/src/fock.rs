//! The extended monotone Fock space `𝔽 = ℝ ⊕ ⊕_n L²(T_n, m_n)` and the
//! noise operators `⟨ω,h⟩` acting on finite vectors.
//!
//! For general Jacobi data `⟨ω,h⟩ = A⁺(h) + B⁰(h) + B⁻(h)`:
//!
//! * `A⁺(h)` puts `h` at a new top coordinate. On stratum `(l_1, …)` this
//!   lands either in `(0, l_1, …)` (strictly above) or in `(l_1+1, …)`
//!   (merged into the top block).
//! * `B⁰(h)` multiplies the top block factor by `b_{l_1} h`.
//! * `B⁻(h)` integrates `h` against a strictly-higher top coordinate
//!   (stratum `(0, l_1, …)` → `(l_1, …)`) and evaluates the diagonal
//!   with weight `a_{l_1+1}` (stratum `(l_1+1, …)` → `(l_1, …)`).
//!
//! In the constant-coefficient case the same operator is
//! `A⁺(h) + λA⁰(h) + A₁⁻(h) + ηA₂⁻(h)`; both forms are provided.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::jacobi::JacobiData;
use crate::piecewise::PiecewisePolynomial;
use crate::rational::{self, Rational};
use crate::simplex::{
    inner_product, restrict_to_simplex, strat_is_zero, Composition, RankTerm, StratifiedFunction,
    TensorSum, Weights,
};

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct FockVector {
    scalar: Rational,
    graded: BTreeMap<usize, StratifiedFunction>,
}

impl FockVector {
    pub fn zero() -> Self {
        Self::default()
    }

    /// `Ω = (1, 0, 0, …)`.
    pub fn vacuum() -> Self {
        Self {
            scalar: Rational::one(),
            graded: BTreeMap::new(),
        }
    }

    pub fn from_scalar(scalar: Rational) -> Self {
        Self {
            scalar,
            graded: BTreeMap::new(),
        }
    }

    /// A vector with a single graded component.
    pub fn from_graded(f: StratifiedFunction) -> Self {
        let mut v = Self::zero();
        v.add_component(f);
        v
    }

    pub fn scalar(&self) -> &Rational {
        &self.scalar
    }

    pub fn graded(&self) -> &BTreeMap<usize, StratifiedFunction> {
        &self.graded
    }

    /// Degree-`n` component (empty if absent). `n >= 1`.
    pub fn component(&self, n: usize) -> StratifiedFunction {
        self.graded
            .get(&n)
            .cloned()
            .unwrap_or_else(|| StratifiedFunction::zero(n))
    }

    /// Degrees carrying stored terms; 0 stands for a nonzero scalar.
    pub fn support_degrees(&self) -> Vec<usize> {
        let mut out = Vec::new();
        if !self.scalar.is_zero() {
            out.push(0);
        }
        out.extend(self.graded.keys().copied());
        out
    }

    pub fn max_degree(&self) -> usize {
        self.graded.keys().next_back().copied().unwrap_or(0)
    }

    /// Drops everything of degree >= `n`.
    pub fn below_degree(&self, n: usize) -> Self {
        let mut out = Self::zero();
        if n > 0 {
            out.scalar = self.scalar.clone();
        }
        for (d, f) in self.graded.range(..n) {
            out.graded.insert(*d, f.clone());
        }
        out
    }

    pub fn add_component(&mut self, f: StratifiedFunction) {
        if f.is_empty() {
            return;
        }
        match self.graded.get_mut(&f.degree()) {
            Some(existing) => existing.add_assign(f),
            None => {
                self.graded.insert(f.degree(), f);
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_assign(other.clone());
        out
    }

    pub fn add_assign(&mut self, other: Self) {
        self.scalar += other.scalar;
        for (_, f) in other.graded {
            self.add_component(f);
        }
    }

    pub fn scale(&self, r: &Rational) -> Self {
        if r.is_zero() {
            return Self::zero();
        }
        Self {
            scalar: &self.scalar * r,
            graded: self.graded.iter().map(|(d, f)| (*d, f.scale(r))).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-Rational::one()))
    }

    /// Zero scalar and Lebesgue-null on every stratum of every degree.
    /// Same vector with equal rank-one terms collected.
    pub fn merged(&self) -> Self {
        Self {
            scalar: self.scalar.clone(),
            graded: self
                .graded
                .iter()
                .map(|(n, f)| (*n, f.merged()))
                .filter(|(_, f)| !f.is_empty())
                .collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.scalar.is_zero() && self.graded.values().all(strat_is_zero)
    }
}

/// Which noise-operator piece an [`OperatorSymbol`] stands for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OperatorKind {
    /// `A⁺(h)`
    Create,
    /// `B⁰(h)`, uses `b_k`
    NeutralGeneral,
    /// `B⁻(h)`, uses `a_k`
    AnnihilateGeneral,
    /// `A⁰(h)`
    NeutralMeixner,
    /// `A₁⁻(h)`
    Annihilate1,
    /// `A₂⁻(h)`
    Annihilate2,
    /// `⟨ω,h⟩ = A⁺ + B⁰ + B⁻`
    Omega,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OperatorSymbol {
    pub kind: OperatorKind,
    pub argument: PiecewisePolynomial,
}

impl OperatorSymbol {
    pub fn new(kind: OperatorKind, argument: PiecewisePolynomial) -> Self {
        Self { kind, argument }
    }

    /// Whether applying this symbol reads Jacobi coefficients.
    pub fn uses_jacobi(&self) -> bool {
        matches!(
            self.kind,
            OperatorKind::NeutralGeneral | OperatorKind::AnnihilateGeneral | OperatorKind::Omega
        )
    }

    pub fn apply(&self, nu: &JacobiData, v: &FockVector) -> Result<FockVector> {
        let h = &self.argument;
        match self.kind {
            OperatorKind::Create => Ok(create(h, v)),
            OperatorKind::NeutralGeneral => neutral_general(nu, h, v),
            OperatorKind::AnnihilateGeneral => annihilate_general(nu, h, v),
            OperatorKind::NeutralMeixner => Ok(neutral_meixner(h, v)),
            OperatorKind::Annihilate1 => Ok(annihilate1(h, v)),
            OperatorKind::Annihilate2 => Ok(annihilate2(h, v)),
            OperatorKind::Omega => omega_apply(nu, h, v),
        }
    }
}

fn tail_of(parts: &[usize]) -> Composition {
    Composition::new(parts.to_vec()).expect("nonempty")
}

pub fn vacuum() -> FockVector {
    FockVector::vacuum()
}

/// `A⁺(h)`.
pub fn create(h: &PiecewisePolynomial, v: &FockVector) -> FockVector {
    let mut out = FockVector::zero();
    if h.is_zero() {
        return out;
    }
    if !v.scalar.is_zero() {
        let mut f = StratifiedFunction::zero(1);
        f.push_term(
            tail_of(&[0]),
            RankTerm {
                coefficient: v.scalar.clone(),
                factors: vec![h.clone()],
            },
        );
        out.add_component(f);
    }
    for (n, f) in &v.graded {
        let mut g = StratifiedFunction::zero(n + 1);
        for (comp, terms) in f.components() {
            let parts = comp.parts();
            let mut above = vec![0];
            above.extend_from_slice(parts);
            let above = tail_of(&above);
            let mut merged = parts.to_vec();
            merged[0] += 1;
            let merged = tail_of(&merged);
            for t in terms {
                let mut factors = Vec::with_capacity(t.factors.len() + 1);
                factors.push(h.clone());
                factors.extend(t.factors.iter().cloned());
                g.push_term(
                    above.clone(),
                    RankTerm {
                        coefficient: t.coefficient.clone(),
                        factors,
                    },
                );
                let mut factors = t.factors.clone();
                factors[0] = h * &factors[0];
                g.push_term(
                    merged.clone(),
                    RankTerm {
                        coefficient: t.coefficient.clone(),
                        factors,
                    },
                );
            }
        }
        out.add_component(g);
    }
    out
}

/// Multiplies the top-block factor by `weight(l_1) · h`.
fn neutral_with(
    h: &PiecewisePolynomial,
    v: &FockVector,
    mut weight: impl FnMut(usize) -> Result<Rational>,
) -> Result<FockVector> {
    let mut out = FockVector::zero();
    for (n, f) in &v.graded {
        let mut g = StratifiedFunction::zero(*n);
        for (comp, terms) in f.components() {
            let w = weight(comp.parts()[0])?;
            if w.is_zero() {
                continue;
            }
            for t in terms {
                let mut factors = t.factors.clone();
                factors[0] = h * &factors[0];
                g.push_term(
                    comp.clone(),
                    RankTerm {
                        coefficient: &t.coefficient * &w,
                        factors,
                    },
                );
            }
        }
        out.add_component(g);
    }
    Ok(out)
}

/// Annihilation pieces. `tail` toggles the tail-integral contraction
/// (stratum `(0, l_1, …)` → `(l_1, …)`, including degree 1 → scalar);
/// `diagonal` supplies the weight for `(l_1+1, …)` → `(l_1, …)` given `l_1+1`.
fn annihilate_with(
    h: &PiecewisePolynomial,
    v: &FockVector,
    tail: bool,
    mut diagonal: Option<&mut dyn FnMut(usize) -> Result<Rational>>,
) -> Result<FockVector> {
    let mut out = FockVector::zero();
    for (n, f) in &v.graded {
        let mut g = StratifiedFunction::zero(n.saturating_sub(1).max(1));
        let mut scalar = Rational::zero();
        for (comp, terms) in f.components() {
            let parts = comp.parts();
            if parts[0] == 0 {
                if !tail {
                    continue;
                }
                if parts.len() == 1 {
                    // degree 1: full integral into the scalar
                    for t in terms {
                        scalar += &t.coefficient * (h * &t.factors[0]).integral();
                    }
                    continue;
                }
                let target = tail_of(&parts[1..]);
                for t in terms {
                    let kernel = (h * &t.factors[0]).tail_integral();
                    let mut factors = Vec::with_capacity(t.factors.len() - 1);
                    factors.push(&kernel * &t.factors[1]);
                    factors.extend(t.factors[2..].iter().cloned());
                    g.push_term(
                        target.clone(),
                        RankTerm {
                            coefficient: t.coefficient.clone(),
                            factors,
                        },
                    );
                }
            } else if let Some(weight) = diagonal.as_mut() {
                let w = weight(parts[0])?;
                if w.is_zero() {
                    continue;
                }
                let mut target = parts.to_vec();
                target[0] -= 1;
                let target = tail_of(&target);
                for t in terms {
                    let mut factors = t.factors.clone();
                    factors[0] = h * &factors[0];
                    g.push_term(
                        target.clone(),
                        RankTerm {
                            coefficient: &t.coefficient * &w,
                            factors,
                        },
                    );
                }
            }
        }
        out.scalar += scalar;
        if *n >= 2 {
            out.add_component(g);
        }
    }
    Ok(out)
}

/// `B⁰(h)`: top factor times `b_{l_1} h`.
pub fn neutral_general(
    nu: &JacobiData,
    h: &PiecewisePolynomial,
    v: &FockVector,
) -> Result<FockVector> {
    neutral_with(h, v, |l1| nu.b(l1).cloned())
}

/// `B⁻(h)`.
pub fn annihilate_general(
    nu: &JacobiData,
    h: &PiecewisePolynomial,
    v: &FockVector,
) -> Result<FockVector> {
    let mut weight = |k: usize| nu.a(k).cloned();
    annihilate_with(h, v, true, Some(&mut weight))
}

/// `A⁰(h)`: top factor times `h`.
pub fn neutral_meixner(h: &PiecewisePolynomial, v: &FockVector) -> FockVector {
    neutral_with(h, v, |_| Ok(Rational::one())).expect("infallible weight")
}

/// `A₁⁻(h)`: the tail-integral part of the annihilator.
pub fn annihilate1(h: &PiecewisePolynomial, v: &FockVector) -> FockVector {
    annihilate_with(h, v, true, None).expect("no Jacobi access")
}

/// `A₂⁻(h)`: diagonal evaluation with weight 1; zero on degrees 0 and 1.
pub fn annihilate2(h: &PiecewisePolynomial, v: &FockVector) -> FockVector {
    let mut weight = |_: usize| Ok(Rational::one());
    annihilate_with(h, v, false, Some(&mut weight)).expect("infallible weight")
}

/// `⟨ω,h⟩ = A⁺(h) + B⁰(h) + B⁻(h)`.
pub fn omega_apply(nu: &JacobiData, h: &PiecewisePolynomial, v: &FockVector) -> Result<FockVector> {
    let mut out = create(h, v);
    out.add_assign(neutral_general(nu, h, v)?);
    out.add_assign(annihilate_general(nu, h, v)?);
    Ok(out)
}

/// `A⁺(h) + λA⁰(h) + A₁⁻(h) + ηA₂⁻(h)`.
pub fn omega_meixner(
    lambda: &Rational,
    eta: &Rational,
    h: &PiecewisePolynomial,
    v: &FockVector,
) -> FockVector {
    let mut out = create(h, v);
    out.add_assign(neutral_meixner(h, v).scale(lambda));
    out.add_assign(annihilate1(h, v));
    out.add_assign(annihilate2(h, v).scale(eta));
    out
}

/// Gradewise inner product of `𝔽`.
pub fn fock_inner(nu: &JacobiData, f: &FockVector, g: &FockVector) -> Result<Rational> {
    let mut total = &f.scalar * &g.scalar;
    for (n, a) in &f.graded {
        if let Some(b) = g.graded.get(n) {
            total += inner_product(a, b, Weights::Norms(nu.norms()))?;
        }
    }
    Ok(total)
}

/// `⟨ω,h_1⟩ ⋯ ⟨ω,h_n⟩ Ω`, with `h_n` applied first.
pub fn chain_vector(nu: &JacobiData, hs: &[PiecewisePolynomial]) -> Result<FockVector> {
    apply_chain(nu, hs, FockVector::vacuum())
}

/// `⟨ω,h_1⟩ ⋯ ⟨ω,h_n⟩ v`.
pub fn apply_chain(
    nu: &JacobiData,
    hs: &[PiecewisePolynomial],
    v: FockVector,
) -> Result<FockVector> {
    hs.iter()
        .rev()
        .try_fold(v, |acc, h| omega_apply(nu, h, &acc))
}

/// `τ(⟨ω,h_1⟩ ⋯ ⟨ω,h_n⟩)`.
pub fn moment(nu: &JacobiData, hs: &[PiecewisePolynomial]) -> Result<Rational> {
    Ok(chain_vector(nu, hs)?.scalar)
}

/// Degree-`n` component of the chain vector: the image of the orthogonal
/// polynomial `⟨P^{(n)}(ω), h_1 ⊗ … ⊗ h_n⟩`.
pub fn orthogonal_projection(
    nu: &JacobiData,
    hs: &[PiecewisePolynomial],
) -> Result<StratifiedFunction> {
    Ok(chain_vector(nu, hs)?.component(hs.len()))
}

/// Closed form of the projection: on stratum `(l_1, …, l_i)` the rank-one
/// term whose `j`-th factor is the product of the `h`'s in block `j`.
/// Independent of ν.
///
/// Panics on an empty list.
pub fn projection_formula(hs: &[PiecewisePolynomial]) -> StratifiedFunction {
    restrict_to_simplex(&TensorSum::pure(hs.to_vec()))
}

#[derive(Serialize, Deserialize)]
struct RawFock {
    #[serde(with = "rational::serde_str")]
    scalar: Rational,
    graded: Vec<RawGraded>,
}

#[derive(Serialize, Deserialize)]
struct RawGraded {
    degree: usize,
    function: StratifiedFunction,
}

impl Serialize for FockVector {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RawFock {
            scalar: self.scalar.clone(),
            graded: self
                .graded
                .iter()
                .map(|(d, f)| RawGraded {
                    degree: *d,
                    function: f.clone(),
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for FockVector {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = RawFock::deserialize(d)?;
        let mut out = FockVector::from_scalar(raw.scalar);
        for g in raw.graded {
            if g.function.degree() != g.degree {
                return Err(D::Error::custom(format!(
                    "component declared degree {} but has degree {}",
                    g.degree,
                    g.function.degree()
                )));
            }
            out.add_component(g.function);
        }
        Ok(out)
    }
}

//! Meixner-class machinery: the coefficient operators `R_{i,n}` expanding an
//! orthogonal polynomial into monomials, the product recursion for
//! `⟨P^{(n)}(ω), h_1 ▷ … ▷ h_n⟩`, and a finite-degree verifier for the
//! constant-coefficient characterization.

use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{chain_vector, fock_inner, projection_formula, FockVector};
use crate::jacobi::JacobiData;
use crate::piecewise::PiecewisePolynomial;
use crate::rational::{self, Rational};
use crate::simplex::TensorSum;

/// `constant + Σ_i ⟨ω^{⊗i}, f^{(i)}⟩`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct PolynomialExpansion {
    pub constant: Rational,
    pub terms: BTreeMap<usize, TensorSum>,
}

impl PolynomialExpansion {
    pub fn zero() -> Self {
        Self::default()
    }

    /// `⟨ω, h⟩`.
    pub fn monomial(hs: Vec<PiecewisePolynomial>) -> Self {
        let mut e = Self::zero();
        e.add_tensor(&TensorSum::pure(hs), &Rational::one());
        e
    }

    /// Degree-`i` coefficient, empty if absent.
    pub fn degree(&self, i: usize) -> TensorSum {
        self.terms
            .get(&i)
            .cloned()
            .unwrap_or_else(|| TensorSum::zero(i))
    }

    /// Adds `r · f`; an arity-0 `f` goes to the constant.
    pub fn add_tensor(&mut self, f: &TensorSum, r: &Rational) {
        if f.arity() == 0 {
            self.constant += f.scalar_value() * r;
            return;
        }
        if f.is_empty() || r.is_zero() {
            return;
        }
        self.terms
            .entry(f.arity())
            .or_insert_with(|| TensorSum::zero(f.arity()))
            .extend_scaled(f, r);
    }

    pub fn add_scaled(&mut self, other: &Self, r: &Rational) {
        self.constant += &other.constant * r;
        for f in other.terms.values() {
            self.add_tensor(f, r);
        }
    }

    /// Left multiplication by `⟨ω, h⟩`: one more tensor slot in front.
    pub fn times_omega(&self, h: &PiecewisePolynomial) -> Self {
        let mut out = Self::zero();
        if !self.constant.is_zero() {
            out.add_tensor(&TensorSum::pure(vec![h.clone()]), &self.constant);
        }
        for f in self.terms.values() {
            let mut g = TensorSum::zero(f.arity() + 1);
            for (c, hs) in f.terms() {
                let mut factors = Vec::with_capacity(hs.len() + 1);
                factors.push(h.clone());
                factors.extend(hs.iter().cloned());
                g.push(c.clone(), factors);
            }
            out.add_tensor(&g, &Rational::one());
        }
        out
    }
}

fn per_term(
    f: &TensorSum,
    need: usize,
    out_arity: usize,
    map: impl Fn(&[PiecewisePolynomial]) -> Vec<PiecewisePolynomial>,
) -> Result<TensorSum> {
    if f.arity() < need {
        return Err(Error::ArityTooSmall {
            got: f.arity(),
            need,
        });
    }
    let mut out = TensorSum::zero(out_arity);
    for (c, hs) in f.terms() {
        out.push(c.clone(), map(hs));
    }
    Ok(out)
}

/// `f(t_1, t_1, t_2, …)`: first two factors multiplied.
pub fn diag1(f: &TensorSum) -> Result<TensorSum> {
    per_term(f, 2, f.arity().saturating_sub(1), |hs| {
        let mut v = Vec::with_capacity(hs.len() - 1);
        v.push(&hs[0] * &hs[1]);
        v.extend(hs[2..].iter().cloned());
        v
    })
}

/// `f(t_1, t_1, t_1, t_2, …)`: first three factors multiplied.
pub fn diag2(f: &TensorSum) -> Result<TensorSum> {
    per_term(f, 3, f.arity().saturating_sub(2), |hs| {
        let mut v = Vec::with_capacity(hs.len() - 2);
        v.push(&(&hs[0] * &hs[1]) * &hs[2]);
        v.extend(hs[3..].iter().cloned());
        v
    })
}

/// `∫_{t_1}^∞ f(u, u, t_1, t_2, …) du`; for arity 2 the full integral
/// `∫ f(u, u) du`, returned as an arity-0 sum.
pub fn tail_contract(f: &TensorSum) -> Result<TensorSum> {
    if f.arity() == 2 {
        let mut out = TensorSum::zero(0);
        for (c, hs) in f.terms() {
            out.push(c * (&hs[0] * &hs[1]).integral(), Vec::new());
        }
        return Ok(out);
    }
    per_term(f, 2, f.arity().saturating_sub(2), |hs| {
        let mut v = Vec::with_capacity(hs.len() - 2);
        v.push(&(&hs[0] * &hs[1]).tail_integral() * &hs[2]);
        v.extend(hs[3..].iter().cloned());
        v
    })
}

/// `𝓘(h_1, h_2, h_3)(t) = ∫_t^∞ h_1 h_2 du · h_3(t)`.
pub fn tail_contract3(
    h1: &PiecewisePolynomial,
    h2: &PiecewisePolynomial,
    h3: &PiecewisePolynomial,
) -> PiecewisePolynomial {
    &(h1 * h2).tail_integral() * h3
}

/// The operators `R_{i,n}` for fixed `(λ, η)`, memoized per instance.
struct ROperators<'a> {
    lambda: &'a Rational,
    eta: &'a Rational,
    memo: HashMap<(usize, TensorSum), TensorSum>,
}

impl ROperators<'_> {
    /// `R_{i,n} f` with `n = arity(f)`.
    fn apply(&mut self, i: usize, f: &TensorSum) -> Result<TensorSum> {
        let n = f.arity();
        if i > n || f.is_empty() {
            return Ok(TensorSum::zero(i));
        }
        if i == n {
            return Ok(f.clone());
        }
        let key = (i, f.clone());
        if let Some(hit) = self.memo.get(&key) {
            return Ok(hit.clone());
        }
        let out = match n {
            1 => TensorSum::zero(0),
            2 => match i {
                1 => diag1(f)?.scale(&-self.lambda),
                _ => tail_contract(f)?.scale(&-Rational::one()),
            },
            _ => {
                let mut out = TensorSum::zero(i);
                if i >= 1 {
                    // (1 ⊗ R_{i-1,n-1}) f, one pure tensor at a time
                    for (c, hs) in f.terms() {
                        let mut rest = TensorSum::zero(n - 1);
                        rest.push(c.clone(), hs[1..].to_vec());
                        let inner = self.apply(i - 1, &rest)?;
                        for (d, gs) in inner.terms() {
                            let mut factors = Vec::with_capacity(i);
                            factors.push(hs[0].clone());
                            factors.extend(gs.iter().cloned());
                            out.push(d.clone(), factors);
                        }
                    }
                }
                if !self.lambda.is_zero() {
                    let g = self.apply(i, &diag1(f)?)?;
                    out.extend_scaled(&g, &-self.lambda);
                }
                let g = self.apply(i, &tail_contract(f)?)?;
                out.extend_scaled(&g, &-Rational::one());
                if !self.eta.is_zero() {
                    let g = self.apply(i, &diag2(f)?)?;
                    out.extend_scaled(&g, &-self.eta);
                }
                out
            }
        };
        self.memo.insert(key, out.clone());
        Ok(out)
    }
}

/// `⟨R^{(n)}(ω), f⟩ = Σ_{i=0}^n ⟨ω^{⊗i}, R_{i,n} f⟩`.
pub fn r_expand(f: &TensorSum, lambda: &Rational, eta: &Rational) -> Result<PolynomialExpansion> {
    let n = f.arity();
    if n == 0 {
        return Err(Error::ArityTooSmall { got: 0, need: 1 });
    }
    let mut ops = ROperators {
        lambda,
        eta,
        memo: HashMap::new(),
    };
    let mut out = PolynomialExpansion::zero();
    for i in 0..=n {
        let g = ops.apply(i, f)?;
        out.add_tensor(&g, &Rational::one());
    }
    Ok(out)
}

/// Expansion of `⟨P^{(n)}(ω), h_1 ▷ … ▷ h_n⟩` by the product recursion
/// `⟨ω,h_1⟩ P^{(n-1)}(h_2, …) − λ P^{(n-1)}(h_1h_2, h_3, …)
///  − P^{(n-2)}(𝓘(h_1,h_2,h_3), h_4, …) − η P^{(n-2)}(h_1h_2h_3, h_4, …)`.
pub fn cor35_step(
    hs: &[PiecewisePolynomial],
    lambda: &Rational,
    eta: &Rational,
) -> Result<PolynomialExpansion> {
    if hs.is_empty() {
        return Err(Error::ArityTooSmall { got: 0, need: 1 });
    }
    let mut memo = HashMap::new();
    Ok(cor35_rec(hs, lambda, eta, &mut memo))
}

fn cor35_rec(
    hs: &[PiecewisePolynomial],
    lambda: &Rational,
    eta: &Rational,
    memo: &mut HashMap<Vec<PiecewisePolynomial>, PolynomialExpansion>,
) -> PolynomialExpansion {
    if let Some(hit) = memo.get(hs) {
        return hit.clone();
    }
    let out = match hs.len() {
        1 => PolynomialExpansion::monomial(hs.to_vec()),
        2 => {
            let prod = &hs[0] * &hs[1];
            let mut e = PolynomialExpansion::monomial(hs.to_vec());
            e.add_scaled(&PolynomialExpansion::monomial(vec![prod.clone()]), &-lambda);
            e.constant -= prod.integral();
            e
        }
        _ => {
            let mut e = cor35_rec(&hs[1..], lambda, eta, memo).times_omega(&hs[0]);
            let h12 = &hs[0] * &hs[1];
            if !lambda.is_zero() {
                let mut shorter = vec![h12.clone()];
                shorter.extend(hs[2..].iter().cloned());
                e.add_scaled(&cor35_rec(&shorter, lambda, eta, memo), &-lambda);
            }
            let mut contracted = vec![&h12.tail_integral() * &hs[2]];
            contracted.extend(hs[3..].iter().cloned());
            e.add_scaled(
                &cor35_rec(&contracted, lambda, eta, memo),
                &-Rational::one(),
            );
            if !eta.is_zero() {
                let mut diag = vec![&h12 * &hs[2]];
                diag.extend(hs[3..].iter().cloned());
                e.add_scaled(&cor35_rec(&diag, lambda, eta, memo), &-eta);
            }
            e
        }
    };
    memo.insert(hs.to_vec(), out.clone());
    out
}

/// `constant · Ω + Σ_i Σ_terms c · ⟨ω,g_1⟩ ⋯ ⟨ω,g_i⟩ Ω`.
pub fn expansion_to_fock(nu: &JacobiData, e: &PolynomialExpansion) -> Result<FockVector> {
    let mut out = FockVector::from_scalar(e.constant.clone());
    for f in e.terms.values() {
        for (c, hs) in f.terms() {
            out.add_assign(chain_vector(nu, hs)?.scale(c));
        }
    }
    Ok(out)
}

/// Image of the expansion minus the pure degree-`n` projection vector.
pub fn projection_residual(
    nu: &JacobiData,
    hs: &[PiecewisePolynomial],
    e: &PolynomialExpansion,
) -> Result<FockVector> {
    let image = expansion_to_fock(nu, e)?;
    Ok(image.sub(&FockVector::from_graded(projection_formula(hs))))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeRecord {
    pub degree: usize,
    pub status: Status,
    /// Sum over all tested words of the squared `𝔽`-norm of the residual.
    #[serde(with = "rational::serde_str")]
    pub residual_norm: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeixnerReport {
    /// Whether the Jacobi data is constant.
    pub meixner: bool,
    #[serde(with = "rational::serde_str")]
    pub lambda: Rational,
    #[serde(with = "rational::serde_str")]
    pub eta: Rational,
    pub records: Vec<DegreeRecord>,
    /// First degree with a nonzero residual.
    pub first_failure: Option<usize>,
}

impl MeixnerReport {
    /// Constant data must pass everywhere; non-constant data must exhibit
    /// a residual somewhere.
    pub fn as_expected(&self) -> bool {
        if self.meixner {
            self.first_failure.is_none()
        } else {
            self.first_failure.is_some()
        }
    }
}

/// All words of length `n` over `family`, in lexicographic index order.
pub fn words(family: &[PiecewisePolynomial], n: usize) -> Vec<Vec<PiecewisePolynomial>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|w| {
                family.iter().map(move |h| {
                    let mut w = w.clone();
                    w.push(h.clone());
                    w
                })
            })
            .collect();
    }
    out
}

/// Runs the `R`-expansion against the projection vector for every word up
/// to `max_degree`. For non-constant data the parameters are taken as
/// `λ = b_0`, `η = a_1`.
pub fn meixner_verify(
    nu: &JacobiData,
    family: &[PiecewisePolynomial],
    max_degree: usize,
) -> Result<MeixnerReport> {
    let (meixner, lambda, eta) = match nu.is_meixner() {
        Some((l, e)) => (true, l, e),
        None => {
            let eta = if nu.depth() > 1 {
                nu.a(1)?.clone()
            } else {
                Rational::zero()
            };
            (false, nu.b(0)?.clone(), eta)
        }
    };
    let mut records = Vec::with_capacity(max_degree);
    let mut first_failure = None;
    for n in 1..=max_degree {
        let mut total = Rational::zero();
        for word in words(family, n) {
            let e = r_expand(&TensorSum::pure(word.clone()), &lambda, &eta)?;
            let residual = projection_residual(nu, &word, &e)?;
            total += fock_inner(nu, &residual, &residual)?;
        }
        let status = if total.is_zero() {
            Status::Pass
        } else {
            first_failure.get_or_insert(n);
            Status::Fail
        };
        records.push(DegreeRecord {
            degree: n,
            status,
            residual_norm: total,
        });
    }
    Ok(MeixnerReport {
        meixner,
        lambda,
        eta,
        records,
        first_failure,
    })
}

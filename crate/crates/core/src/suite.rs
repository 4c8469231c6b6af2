//! Invariant suites over a Jacobi sequence and a function family. Every
//! check is exact; a failing check carries its first counterexample.

use num_traits::One;
use serde::Serialize;

use crate::error::Result;
use crate::fock::{
    annihilate_general, apply_chain, chain_vector, create, fock_inner, moment, neutral_general,
    omega_apply, omega_meixner, orthogonal_projection, projection_formula, FockVector,
};
use crate::jacobi::JacobiData;
use crate::meixner::{
    cor35_step, expansion_to_fock, meixner_verify, r_expand, words, MeixnerReport,
};
use crate::piecewise::PiecewisePolynomial;
use crate::poly::Polynomial;
use crate::random::Generator;
use crate::rational::{self, int, ratio, Rational};
use crate::simplex::{compositions, inner_product, strat_is_zero, TensorSum, Weights};

#[derive(Clone, Debug)]
pub struct SuiteConfig {
    pub family: Vec<PiecewisePolynomial>,
    pub max_degree: usize,
    pub seed: u64,
    /// Number of random `(h, F, G)` triples for the adjointness checks.
    pub random_cases: usize,
    /// Number of random families for the norm identity.
    pub random_families: usize,
    pub meixner_check: bool,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            family: default_family(),
            max_degree: 4,
            seed: 0,
            random_cases: 100,
            random_families: 10,
            meixner_check: true,
        }
    }
}

/// `χ_[0,1)`, `χ_[1/2,2)`, `t·χ_[0,1)` and `2χ_[0,1/2) − χ_[1/2,3/2)`.
pub fn default_family() -> Vec<PiecewisePolynomial> {
    vec![
        PiecewisePolynomial::indicator(int(0), int(1)).unwrap(),
        PiecewisePolynomial::indicator(ratio(1, 2), int(2)).unwrap(),
        PiecewisePolynomial::on_interval(int(0), int(1), Polynomial::t()).unwrap(),
        PiecewisePolynomial::step(
            vec![int(0), ratio(1, 2), ratio(3, 2)],
            vec![int(2), int(-1)],
        )
        .unwrap(),
    ]
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Counterexample {
    pub note: String,
    pub words: Vec<Vec<PiecewisePolynomial>>,
    pub vectors: Vec<FockVector>,
    pub values: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub cases: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Counterexample>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub passed: bool,
    pub checks: Vec<CheckOutcome>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub meixner: Option<MeixnerReport>,
}

impl SuiteReport {
    pub fn first_failure(&self) -> Option<&CheckOutcome> {
        self.checks.iter().find(|c| !c.passed)
    }
}

struct Tally {
    name: &'static str,
    cases: usize,
    counterexample: Option<Counterexample>,
}

impl Tally {
    fn new(name: &'static str) -> Self {
        Self {
            name,
            cases: 0,
            counterexample: None,
        }
    }

    fn record(&mut self, ok: bool, witness: impl FnOnce() -> Counterexample) {
        self.cases += 1;
        if !ok && self.counterexample.is_none() {
            self.counterexample = Some(witness());
        }
    }

    fn finish(self) -> CheckOutcome {
        CheckOutcome {
            name: self.name.to_string(),
            passed: self.counterexample.is_none(),
            cases: self.cases,
            counterexample: self.counterexample,
        }
    }
}

fn values(rs: &[&Rational]) -> Vec<String> {
    rs.iter().map(|r| rational::format(r)).collect()
}

fn words_up_to(family: &[PiecewisePolynomial], max_degree: usize) -> Vec<Vec<PiecewisePolynomial>> {
    (1..=max_degree).flat_map(|n| words(family, n)).collect()
}

/// Creation raises the degree by one, the neutral part keeps it and the
/// annihilator lowers it by one.
pub fn check_grading(nu: &JacobiData, cfg: &SuiteConfig) -> Result<CheckOutcome> {
    let mut gen = Generator::new(cfg.seed);
    let mut tally = Tally::new("grading");
    for _ in 0..cfg.random_cases.min(30) {
        let h = gen.function();
        let n = 1 + (tally.cases % 4);
        let f = FockVector::from_graded(gen.stratified(n));
        let images = [
            (create(&h, &f), n + 1),
            (neutral_general(nu, &h, &f)?, n),
            (annihilate_general(nu, &h, &f)?, n - 1),
        ];
        let ok = images.iter().all(|(v, d)| {
            v.support_degrees().iter().all(|k| k == d) && (*d > 0 || v.graded().is_empty())
        });
        tally.record(ok, || Counterexample {
            note: format!("degree-{n} input leaves its expected degree"),
            words: vec![vec![h.clone()]],
            vectors: vec![f.clone()],
            values: vec![],
        });
    }
    Ok(tally.finish())
}

/// `⟨A⁺(h)F, G⟩ = ⟨F, B⁻(h)G⟩`, symmetry of `B⁰(h)` and of `⟨ω,h⟩`.
pub fn check_adjointness(nu: &JacobiData, cfg: &SuiteConfig) -> Result<CheckOutcome> {
    let mut gen = Generator::new(cfg.seed.wrapping_add(1));
    let mut tally = Tally::new("adjointness");
    for _ in 0..cfg.random_cases {
        let h = gen.function();
        let f = gen.fock_vector(4);
        let g = gen.fock_vector(4);
        let pairs = [
            (
                fock_inner(nu, &create(&h, &f), &g)?,
                fock_inner(nu, &f, &annihilate_general(nu, &h, &g)?)?,
            ),
            (
                fock_inner(nu, &neutral_general(nu, &h, &f)?, &g)?,
                fock_inner(nu, &f, &neutral_general(nu, &h, &g)?)?,
            ),
            (
                fock_inner(nu, &omega_apply(nu, &h, &f)?, &g)?,
                fock_inner(nu, &f, &omega_apply(nu, &h, &g)?)?,
            ),
        ];
        let bad = pairs.iter().position(|(l, r)| l != r);
        tally.record(bad.is_none(), || {
            let (l, r) = &pairs[bad.unwrap()];
            Counterexample {
                note: ["A+ vs B-", "B0 symmetry", "omega symmetry"][bad.unwrap()].to_string(),
                words: vec![vec![h.clone()]],
                vectors: vec![f.clone(), g.clone()],
                values: values(&[l, r]),
            }
        });
    }
    Ok(tally.finish())
}

/// For constant data the general operator equals
/// `A⁺ + λA⁰ + A₁⁻ + ηA₂⁻`.
pub fn check_meixner_form(
    nu: &JacobiData,
    lambda: &Rational,
    eta: &Rational,
    cfg: &SuiteConfig,
) -> Result<CheckOutcome> {
    let mut gen = Generator::new(cfg.seed.wrapping_add(2));
    let mut tally = Tally::new("meixner_form");
    for _ in 0..cfg.random_cases.min(30) {
        let h = gen.function();
        let f = gen.fock_vector(4);
        let general = omega_apply(nu, &h, &f)?;
        let special = omega_meixner(lambda, eta, &h, &f);
        tally.record(general.sub(&special).is_zero(), || Counterexample {
            note: "general and constant-coefficient forms differ".into(),
            words: vec![vec![h.clone()]],
            vectors: vec![f.clone(), general.clone(), special.clone()],
            values: vec![],
        });
    }
    Ok(tally.finish())
}

/// The `m_n`-inner product of the closed-form projections equals the `𝔽`
/// inner product of the degree-`n` chain components, on random families.
pub fn check_norm_identity(nu: &JacobiData, cfg: &SuiteConfig) -> Result<CheckOutcome> {
    let mut gen = Generator::new(cfg.seed.wrapping_add(3));
    let mut tally = Tally::new("norm_identity");
    let top = cfg.max_degree.min(4);
    for _ in 0..cfg.random_families {
        let family = gen.family(2);
        for n in 1..=top {
            let ws = words(&family, n);
            let mut data = Vec::with_capacity(ws.len());
            for w in &ws {
                let chain = FockVector::from_graded(chain_vector(nu, w)?.component(n));
                data.push((projection_formula(w), chain));
            }
            for i in 0..ws.len() {
                for j in i..ws.len() {
                    let lhs = inner_product(&data[i].0, &data[j].0, Weights::Norms(nu.norms()))?;
                    let rhs = fock_inner(nu, &data[i].1, &data[j].1)?;
                    tally.record(lhs == rhs, || Counterexample {
                        note: format!("degree {n}"),
                        words: vec![ws[i].clone(), ws[j].clone()],
                        vectors: vec![],
                        values: values(&[&lhs, &rhs]),
                    });
                }
            }
        }
    }
    Ok(tally.finish())
}

/// `⟨X_{h_1}⋯X_{h_n}Ω, X_{g_1}⋯X_{g_m}Ω⟩ = τ(X_{g_m}⋯X_{g_1}X_{h_1}⋯X_{h_n})`.
pub fn check_unitarity(nu: &JacobiData, cfg: &SuiteConfig) -> Result<CheckOutcome> {
    let mut tally = Tally::new("unitarity");
    let top = cfg.max_degree.min(2);
    let ws = words_up_to(&cfg.family, top);
    let chains = ws
        .iter()
        .map(|w| chain_vector(nu, w))
        .collect::<Result<Vec<_>>>()?;
    for i in 0..ws.len() {
        for j in 0..ws.len() {
            let lhs = fock_inner(nu, &chains[i], &chains[j])?;
            let mut word: Vec<_> = ws[j].iter().rev().cloned().collect();
            word.extend(ws[i].iter().cloned());
            let rhs = moment(nu, &word)?;
            tally.record(lhs == rhs, || Counterexample {
                note: "inner product of chain vectors vs moment".into(),
                words: vec![ws[i].clone(), ws[j].clone()],
                vectors: vec![],
                values: values(&[&lhs, &rhs]),
            });
        }
    }
    Ok(tally.finish())
}

/// The chain-vector degree-`n` component equals the closed-form projection.
pub fn check_projection_consistency(nu: &JacobiData, cfg: &SuiteConfig) -> Result<CheckOutcome> {
    let mut tally = Tally::new("projection_consistency");
    for w in words_up_to(&cfg.family, cfg.max_degree) {
        let a = orthogonal_projection(nu, &w)?;
        let b = projection_formula(&w);
        let diff = a.sub(&b)?;
        tally.record(strat_is_zero(&diff), || Counterexample {
            note: format!("degree {}", w.len()),
            words: vec![w.clone()],
            vectors: vec![
                FockVector::from_graded(a.clone()),
                FockVector::from_graded(b.clone()),
            ],
            values: vec![],
        });
    }
    Ok(tally.finish())
}

/// Both the `R`-operator expansion and the product recursion reproduce the
/// pure degree-`n` projection vector.
pub fn check_meixner_recursions(
    nu: &JacobiData,
    lambda: &Rational,
    eta: &Rational,
    cfg: &SuiteConfig,
) -> Result<CheckOutcome> {
    let mut tally = Tally::new("meixner_recursions");
    for w in words_up_to(&cfg.family, cfg.max_degree) {
        let target = FockVector::from_graded(projection_formula(&w));
        let via_r = expansion_to_fock(nu, &r_expand(&TensorSum::pure(w.clone()), lambda, eta)?)?;
        let via_rec = expansion_to_fock(nu, &cor35_step(&w, lambda, eta)?)?;
        for (label, image) in [("r_expand", &via_r), ("cor35_step", &via_rec)] {
            let residual = image.sub(&target);
            tally.record(residual.is_zero(), || Counterexample {
                note: format!("{label} residual at degree {}", w.len()),
                words: vec![w.clone()],
                vectors: vec![residual.clone()],
                values: vec![],
            });
        }
    }
    Ok(tally.finish())
}

/// `τ` is invariant under shifting every function by `u`.
pub fn check_stationarity(nu: &JacobiData, cfg: &SuiteConfig) -> Result<CheckOutcome> {
    let mut tally = Tally::new("stationarity");
    let shifts = [ratio(1, 2), int(3), int(10)];
    for w in words_up_to(&cfg.family, cfg.max_degree) {
        let base = moment(nu, &w)?;
        for u in &shifts {
            let moved = w.iter().map(|h| h.shift(u)).collect::<Result<Vec<_>>>()?;
            let m = moment(nu, &moved)?;
            tally.record(m == base, || Counterexample {
                note: format!("shift by {}", rational::format(u)),
                words: vec![w.clone(), moved.clone()],
                vectors: vec![],
                values: values(&[&base, &m]),
            });
        }
    }
    Ok(tally.finish())
}

/// Functions living on `Δ_k = [k−1, k)`: the indicator and `(t−k+1)χ_{Δ_k}`.
pub fn interval_functions(k: i64) -> [PiecewisePolynomial; 2] {
    let (a, b) = (int(k - 1), int(k));
    [
        PiecewisePolynomial::indicator(a.clone(), b.clone()).unwrap(),
        PiecewisePolynomial::on_interval(a.clone(), b, Polynomial::new(vec![-a, Rational::one()]))
            .unwrap(),
    ]
}

/// Operator words in the algebra of `Δ_k`.
fn algebra_elements(k: i64) -> Vec<Vec<PiecewisePolynomial>> {
    let [chi, p] = interval_functions(k);
    vec![
        vec![chi.clone()],
        vec![chi.clone(), p.clone()],
        vec![p, chi.clone(), chi],
    ]
}

fn concat(parts: &[&Vec<PiecewisePolynomial>]) -> Vec<PiecewisePolynomial> {
    parts.iter().flat_map(|p| p.iter().cloned()).collect()
}

/// Both conditions of monotone independence for the algebras of
/// `Δ_1 < Δ_2 < Δ_3`: `ABC v = τ(B) AC v` for `i < j > k` on a spanning
/// family of vectors, and factorization of `τ` over every admissible
/// index pattern with at most four factors.
pub fn check_monotone_independence(nu: &JacobiData) -> Result<CheckOutcome> {
    let mut tally = Tally::new("monotone_independence");
    let elements: Vec<_> = (1..=3).map(algebra_elements).collect();
    let short: Vec<_> = elements.iter().map(|e| e[..2].to_vec()).collect();

    let mut probes = vec![FockVector::vacuum()];
    let mut singles = Vec::new();
    for k in 1..=3 {
        singles.extend(interval_functions(k));
    }
    for h in &singles {
        probes.push(chain_vector(nu, std::slice::from_ref(h))?);
    }
    for k in 1..=3 {
        for l in 1..=3 {
            let w = [
                interval_functions(k)[0].clone(),
                interval_functions(l)[1].clone(),
            ];
            probes.push(chain_vector(nu, &w)?);
        }
    }

    for j in 1..=3usize {
        for i in 1..j {
            for k in 1..j {
                for a in &short[i - 1] {
                    for b in &short[j - 1] {
                        for c in &short[k - 1] {
                            let tb = moment(nu, b)?;
                            for v in &probes {
                                let w = apply_chain(nu, c, v.clone())?;
                                let centered = apply_chain(nu, b, w.clone())?.sub(&w.scale(&tb));
                                let r = apply_chain(nu, a, centered.merged())?;
                                tally.record(r.is_zero(), || Counterexample {
                                    note: format!("ABC != tau(B) AC for i={i}, j={j}, k={k}"),
                                    words: vec![a.clone(), b.clone(), c.clone()],
                                    vectors: vec![v.clone(), r.clone()],
                                    values: values(&[&tb]),
                                });
                            }
                        }
                    }
                }
            }
        }
    }

    for pattern in factorization_patterns(3, 4) {
        let mut choice = vec![0usize; pattern.len()];
        loop {
            let factors: Vec<&Vec<PiecewisePolynomial>> = pattern
                .iter()
                .zip(&choice)
                .map(|(&idx, &c)| &elements[idx - 1][c])
                .collect();
            let whole = split_moment(nu, &concat(&factors))?;
            let mut product = Rational::one();
            for f in &factors {
                product *= moment(nu, f)?;
            }
            tally.record(whole == product, || Counterexample {
                note: format!("moment factorization for index pattern {pattern:?}"),
                words: factors.iter().map(|f| (*f).clone()).collect(),
                vectors: vec![],
                values: values(&[&whole, &product]),
            });
            if !advance(&mut choice, elements[0].len()) {
                break;
            }
        }
    }
    Ok(tally.finish())
}

/// `τ(X_1⋯X_n) = ⟨X_{k+1}⋯X_nΩ, X_k⋯X_1Ω⟩` with `k = n/2`.
fn split_moment(nu: &JacobiData, word: &[PiecewisePolynomial]) -> Result<Rational> {
    let (left, right) = word.split_at(word.len() / 2);
    let left: Vec<_> = left.iter().rev().cloned().collect();
    fock_inner(nu, &chain_vector(nu, &left)?, &chain_vector(nu, right)?)
}

fn advance(choice: &mut [usize], radix: usize) -> bool {
    for c in choice.iter_mut() {
        *c += 1;
        if *c < radix {
            return true;
        }
        *c = 0;
    }
    false
}

/// Index sequences `i_1 > … > i_m > j < k_1 < … < k_n` over `1..=r` with at
/// most `max_len` entries.
pub fn factorization_patterns(r: usize, max_len: usize) -> Vec<Vec<usize>> {
    let subsets = |lo: usize| -> Vec<Vec<usize>> {
        let above: Vec<usize> = (lo + 1..=r).collect();
        (0u32..1 << above.len())
            .map(|mask| {
                above
                    .iter()
                    .enumerate()
                    .filter(|(b, _)| mask & (1 << b) != 0)
                    .map(|(_, &x)| x)
                    .collect()
            })
            .collect()
    };
    let mut out = Vec::new();
    for j in 1..=r {
        for left in subsets(j) {
            for right in subsets(j) {
                if left.len() + right.len() + 1 > max_len {
                    continue;
                }
                let mut p: Vec<usize> = left.iter().rev().copied().collect();
                p.push(j);
                p.extend(right);
                out.push(p);
            }
        }
    }
    out.sort();
    out
}

/// For `h_1` on `Δ_1` and `h_2` on the later `Δ_2`, the degree-2 component
/// of `⟨ω,h_1⟩⟨ω,h_2⟩Ω` vanishes while the reversed word does not.
pub fn check_disjoint_projection(nu: &JacobiData) -> Result<CheckOutcome> {
    let mut tally = Tally::new("disjoint_projection");
    for (p, q) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
        let h1 = interval_functions(1)[p].clone();
        let h2 = interval_functions(2)[q].clone();
        let forward = orthogonal_projection(nu, &[h1.clone(), h2.clone()])?;
        let backward = orthogonal_projection(nu, &[h2.clone(), h1.clone()])?;
        let ok = strat_is_zero(&forward) && !strat_is_zero(&backward);
        tally.record(ok, || Counterexample {
            note: "degree-2 projection for time-ordered supports".into(),
            words: vec![vec![h1.clone(), h2.clone()]],
            vectors: vec![FockVector::from_graded(forward.clone())],
            values: vec![],
        });
    }
    Ok(tally.finish())
}

/// `compositions(n)` has `2^{n−1}` distinct sorted elements for `n ≤ 10`.
pub fn check_compositions() -> Result<CheckOutcome> {
    let mut tally = Tally::new("compositions");
    for n in 1..=10usize {
        let cs = compositions(n)?;
        let ok = cs.len() == 1 << (n - 1)
            && cs.windows(2).all(|w| w[0] < w[1])
            && cs.iter().all(|c| c.degree() == n);
        tally.record(ok, || Counterexample {
            note: format!("n = {n}: {} compositions", cs.len()),
            ..Default::default()
        });
    }
    Ok(tally.finish())
}

/// Runs every check. For constant data the constant-coefficient checks
/// are included; the characterization report is attached when requested.
pub fn run_suite(nu: &JacobiData, cfg: &SuiteConfig) -> Result<SuiteReport> {
    let mut checks = vec![
        check_compositions()?,
        check_grading(nu, cfg)?,
        check_adjointness(nu, cfg)?,
        check_norm_identity(nu, cfg)?,
        check_unitarity(nu, cfg)?,
        check_projection_consistency(nu, cfg)?,
        check_stationarity(nu, cfg)?,
        check_monotone_independence(nu)?,
        check_disjoint_projection(nu)?,
    ];
    if let Some((lambda, eta)) = nu.is_meixner() {
        checks.push(check_meixner_form(nu, &lambda, &eta, cfg)?);
        checks.push(check_meixner_recursions(nu, &lambda, &eta, cfg)?);
    }
    let meixner = if cfg.meixner_check {
        let report = meixner_verify(nu, &cfg.family, cfg.max_degree)?;
        let passed = report.as_expected();
        let counterexample = (!passed).then(|| Counterexample {
            note: match report.first_failure {
                Some(n) => format!("constant data leaves a residual at degree {n}"),
                None => format!(
                    "non-constant data shows no residual up to degree {}",
                    cfg.max_degree
                ),
            },
            words: vec![cfg.family.clone()],
            ..Default::default()
        });
        checks.push(CheckOutcome {
            name: "meixner_characterization".into(),
            passed,
            cases: report.records.len(),
            counterexample,
        });
        Some(report)
    } else {
        None
    };
    let passed = checks.iter().all(|c| c.passed);
    Ok(SuiteReport {
        passed,
        checks,
        meixner,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn patterns_are_valleys() {
        let ps = factorization_patterns(3, 4);
        assert!(ps.contains(&vec![2, 1, 3]));
        assert!(!ps.contains(&vec![3, 2, 1, 2, 3]));
        assert!(ps.contains(&vec![3, 1, 2, 3]));
        for p in &ps {
            let j = p.iter().position(|x| x == p.iter().min().unwrap()).unwrap();
            assert!(p[..=j].windows(2).all(|w| w[0] > w[1]));
            assert!(p[j..].windows(2).all(|w| w[0] < w[1]));
        }
        assert_eq!(ps.len(), 20);
    }

    #[test]
    fn small_suite_on_semicircle() {
        let nu = JacobiData::constant(int(0), int(1), 12).unwrap();
        let cfg = SuiteConfig {
            max_degree: 3,
            random_cases: 10,
            random_families: 2,
            ..Default::default()
        };
        let report = run_suite(&nu, &cfg).unwrap();
        for c in &report.checks {
            assert!(c.passed, "{} failed: {:?}", c.name, c.counterexample);
        }
    }
}

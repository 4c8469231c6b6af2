//! Jacobi coefficients of the Kolmogorov measure ν.
//!
//! The monic orthogonal polynomials of ν obey
//! `s p_k(s) = p_{k+1}(s) + b_k p_k(s) + a_k p_{k-1}(s)` with `p_{-1} = 0`,
//! `p_0 = 1`. Only the coefficients up to a finite depth `K` are stored:
//! `b_0..b_{K-1}` and `a_1..a_{K-1}`. Requests past that depth are errors.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawJacobi", into = "RawJacobi")]
pub struct JacobiData {
    b: Vec<Rational>,
    a: Vec<Rational>,
    norms: NormSequence,
}

/// Squared norms `c_k = a_0 a_1 ⋯ a_{k-1}` (`a_0 := 1`) for `k = 1..=K`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormSequence {
    c: Vec<Rational>,
}

impl NormSequence {
    /// `c_k` for `1 <= k <= K`.
    pub fn get(&self, k: usize) -> Result<&Rational> {
        if k == 0 || k > self.c.len() {
            return Err(Error::DepthExceeded {
                symbol: 'c',
                index: k,
                depth: self.c.len(),
            });
        }
        Ok(&self.c[k - 1])
    }

    pub fn as_slice(&self) -> &[Rational] {
        &self.c
    }
}

impl JacobiData {
    /// `b = (b_0, …, b_{K-1})`, `a = (a_1, …, a_{K-1})`.
    pub fn new(b: Vec<Rational>, a: Vec<Rational>) -> Result<Self> {
        if b.is_empty() {
            return Err(Error::InvalidJacobi("depth must be positive".into()));
        }
        if a.len() + 1 != b.len() {
            return Err(Error::InvalidJacobi(format!(
                "depth {} needs {} a-coefficients, got {}",
                b.len(),
                b.len() - 1,
                a.len()
            )));
        }
        if let Some(k) = a.iter().position(Signed::is_negative) {
            return Err(Error::InvalidJacobi(format!("a_{} is negative", k + 1)));
        }
        if let Some(first_zero) = a.iter().position(Zero::is_zero) {
            if let Some(k) = a[first_zero..].iter().position(|x| !x.is_zero()) {
                return Err(Error::InvalidJacobi(format!(
                    "a_{} = 0 but a_{} != 0",
                    first_zero + 1,
                    first_zero + k + 1
                )));
            }
        }
        let mut c = Vec::with_capacity(b.len());
        c.push(Rational::one());
        for ak in &a {
            let next = c.last().unwrap() * ak;
            c.push(next);
        }
        Ok(Self {
            b,
            a,
            norms: NormSequence { c },
        })
    }

    /// Constant coefficients `b_k = λ`, `a_k = η` to the given depth.
    pub fn constant(lambda: Rational, eta: Rational, depth: usize) -> Result<Self> {
        if depth == 0 {
            return Err(Error::InvalidJacobi("depth must be positive".into()));
        }
        Self::new(vec![lambda; depth], vec![eta; depth - 1])
    }

    pub fn depth(&self) -> usize {
        self.b.len()
    }

    pub fn b_coeffs(&self) -> &[Rational] {
        &self.b
    }

    pub fn a_coeffs(&self) -> &[Rational] {
        &self.a
    }

    pub fn b(&self, k: usize) -> Result<&Rational> {
        self.b.get(k).ok_or(Error::DepthExceeded {
            symbol: 'b',
            index: k,
            depth: self.depth(),
        })
    }

    /// `a_k` for `1 <= k <= K-1`.
    pub fn a(&self, k: usize) -> Result<&Rational> {
        k.checked_sub(1)
            .and_then(|i| self.a.get(i))
            .ok_or(Error::DepthExceeded {
                symbol: 'a',
                index: k,
                depth: self.depth(),
            })
    }

    pub fn norms(&self) -> &NormSequence {
        &self.norms
    }

    /// `c_k`, see [`NormSequence`].
    pub fn c(&self, k: usize) -> Result<&Rational> {
        self.norms.get(k)
    }

    /// `p_k(s)` by the three-term recurrence, `0 <= k <= K`.
    pub fn eval_p(&self, k: usize, s: &Rational) -> Result<Rational> {
        if k > self.depth() {
            return Err(Error::DepthExceeded {
                symbol: 'p',
                index: k,
                depth: self.depth(),
            });
        }
        let mut prev = Rational::zero();
        let mut cur = Rational::one();
        for j in 0..k {
            let a = if j == 0 {
                Rational::zero()
            } else {
                self.a[j - 1].clone()
            };
            let next = (s - &self.b[j]) * &cur - a * &prev;
            prev = std::mem::replace(&mut cur, next);
        }
        Ok(cur)
    }

    /// Coefficients (ascending) of the monic `p_k`, `0 <= k <= K`.
    pub fn p_coeffs(&self, k: usize) -> Result<Vec<Rational>> {
        if k > self.depth() {
            return Err(Error::DepthExceeded {
                symbol: 'p',
                index: k,
                depth: self.depth(),
            });
        }
        let mut prev: Vec<Rational> = Vec::new();
        let mut cur = vec![Rational::one()];
        for j in 0..k {
            let mut next = vec![Rational::zero(); cur.len() + 1];
            for (i, c) in cur.iter().enumerate() {
                next[i + 1] += c;
                next[i] -= &self.b[j] * c;
            }
            if j > 0 {
                for (i, c) in prev.iter().enumerate() {
                    next[i] -= &self.a[j - 1] * c;
                }
            }
            prev = std::mem::replace(&mut cur, next);
        }
        Ok(cur)
    }

    /// m-th moment of ν, the `(0,0)` entry of the m-th power of the
    /// truncated Jacobi matrix. Requires `m <= 2K - 2`.
    pub fn nu_moment(&self, m: usize) -> Result<Rational> {
        let k = self.depth();
        if m + 2 > 2 * k {
            return Err(Error::MomentOrder { order: m, depth: k });
        }
        // Walk the tridiagonal matrix: diagonal b_j, upper 1, lower a_{j+1}.
        let mut v = vec![Rational::zero(); k];
        v[0] = Rational::one();
        for _ in 0..m {
            let mut w = vec![Rational::zero(); k];
            for j in 0..k {
                if v[j].is_zero() {
                    continue;
                }
                w[j] += &self.b[j] * &v[j];
                if j + 1 < k {
                    w[j + 1] += &v[j];
                }
                if j > 0 {
                    w[j - 1] += &self.a[j - 1] * &v[j];
                }
            }
            v = w;
        }
        Ok(v[0].clone())
    }

    /// `(λ, η)` when every stored `b_k` equals `λ` and every `a_k` equals `η`.
    pub fn is_meixner(&self) -> Option<(Rational, Rational)> {
        let lambda = self.b[0].clone();
        if self.b.iter().any(|x| *x != lambda) {
            return None;
        }
        match self.a.first() {
            None => Some((lambda, Rational::zero())),
            Some(eta) => {
                if self.a.iter().any(|x| x != eta) {
                    None
                } else {
                    Some((lambda, eta.clone()))
                }
            }
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum RawJacobi {
    Full {
        #[serde(with = "rational::serde_str_vec")]
        b: Vec<Rational>,
        #[serde(with = "rational::serde_str_vec")]
        a: Vec<Rational>,
        #[serde(default)]
        depth: Option<usize>,
    },
    Constant {
        #[serde(with = "rational::serde_str")]
        lambda: Rational,
        #[serde(with = "rational::serde_str")]
        eta: Rational,
        depth: usize,
    },
}

impl TryFrom<RawJacobi> for JacobiData {
    type Error = Error;

    fn try_from(raw: RawJacobi) -> Result<Self> {
        match raw {
            RawJacobi::Full { b, a, depth } => {
                if depth.is_some_and(|d| d != b.len()) {
                    return Err(Error::InvalidJacobi(format!(
                        "depth {} but {} b-coefficients",
                        depth.unwrap_or_default(),
                        b.len()
                    )));
                }
                Self::new(b, a)
            }
            RawJacobi::Constant { lambda, eta, depth } => Self::constant(lambda, eta, depth),
        }
    }
}

impl From<JacobiData> for RawJacobi {
    fn from(j: JacobiData) -> Self {
        let depth = Some(j.depth());
        RawJacobi::Full {
            b: j.b,
            a: j.a,
            depth,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn semicircle(depth: usize) -> JacobiData {
        JacobiData::constant(int(0), int(1), depth).unwrap()
    }

    #[test]
    fn eval_p_examples() {
        let j = semicircle(5);
        assert_eq!(j.eval_p(0, &ratio(7, 3)).unwrap(), int(1));
        assert_eq!(j.eval_p(2, &int(2)).unwrap(), int(3));
        assert_eq!(j.eval_p(3, &int(1)).unwrap(), int(-1));
        assert!(j.eval_p(6, &int(1)).is_err());
        assert!(j.eval_p(5, &int(1)).is_ok());
    }

    #[test]
    fn p_coeffs_match_eval() {
        let j = JacobiData::new(
            vec![int(1), ratio(-1, 2), int(3), int(0)],
            vec![int(2), ratio(1, 3), int(5)],
        )
        .unwrap();
        for k in 0..=4 {
            let cs = j.p_coeffs(k).unwrap();
            assert_eq!(cs.len(), k + 1);
            for s in [int(-2), ratio(1, 3), int(4)] {
                let horner = cs.iter().rev().fold(int(0), |acc, c| acc * &s + c);
                assert_eq!(horner, j.eval_p(k, &s).unwrap());
            }
        }
    }

    #[test]
    fn norm_examples() {
        let ones = semicircle(6);
        assert!(ones.norms().as_slice().iter().all(|c| *c == int(1)));
        let eta = ratio(3, 2);
        let geo = JacobiData::constant(int(0), eta.clone(), 5).unwrap();
        for k in 1..=5 {
            let mut expected = int(1);
            for _ in 1..k {
                expected *= &eta;
            }
            assert_eq!(*geo.c(k).unwrap(), expected);
        }
        let point = JacobiData::constant(int(2), int(0), 4).unwrap();
        assert_eq!(*point.c(1).unwrap(), int(1));
        assert!((2..=4).all(|k| point.c(k).unwrap().is_zero()));
        assert!(point.c(5).is_err());
        assert!(point.c(0).is_err());
    }

    #[test]
    fn moment_examples() {
        let j = semicircle(4);
        assert_eq!(j.nu_moment(0).unwrap(), int(1));
        assert_eq!(j.nu_moment(2).unwrap(), int(1));
        assert_eq!(j.nu_moment(4).unwrap(), int(2));
        assert_eq!(j.nu_moment(6).unwrap(), int(5));
        assert!(j.nu_moment(7).is_err());
    }

    #[test]
    fn meixner_detection() {
        assert_eq!(semicircle(4).is_meixner(), Some((int(0), int(1))));
        let bumpy = JacobiData::new(vec![int(0), int(1), int(0), int(0)], vec![int(1); 3]).unwrap();
        assert_eq!(bumpy.is_meixner(), None);
        let point = JacobiData::constant(int(2), int(0), 4).unwrap();
        assert_eq!(point.is_meixner(), Some((int(2), int(0))));
        let depth_one = JacobiData::new(vec![int(3)], vec![]).unwrap();
        assert_eq!(depth_one.is_meixner(), Some((int(3), int(0))));
    }

    #[test]
    fn invariants_enforced() {
        assert!(JacobiData::new(vec![], vec![]).is_err());
        assert!(JacobiData::new(vec![int(0); 3], vec![int(1)]).is_err());
        assert!(JacobiData::new(vec![int(0); 3], vec![int(-1), int(1)]).is_err());
        assert!(JacobiData::new(vec![int(0); 3], vec![int(0), int(1)]).is_err());
        assert!(JacobiData::new(vec![int(0); 3], vec![int(1), int(0)]).is_ok());
    }

    #[test]
    fn depth_errors_name_the_index() {
        let j = semicircle(3);
        let err = j.b(3).unwrap_err();
        assert_eq!(
            err,
            Error::DepthExceeded {
                symbol: 'b',
                index: 3,
                depth: 3
            }
        );
        assert!(err.to_string().contains("b_3"));
        assert!(j.a(0).is_err());
        assert!(j.a(3).is_err());
        assert!(j.a(2).is_ok());
    }

    // Orthogonality of the p_k under the moment functional ties eval_p,
    // norms and nu_moment together.
    #[test]
    fn orthogonality_oracle() {
        let cases = [
            semicircle(5),
            JacobiData::new(
                vec![int(1), ratio(-1, 2), int(3), int(0), int(2)],
                vec![int(2), ratio(1, 3), int(5), ratio(7, 4)],
            )
            .unwrap(),
            JacobiData::new(
                vec![int(1), int(2), int(0), int(-1)],
                vec![int(3), int(0), int(0)],
            )
            .unwrap(),
        ];
        for j in &cases {
            let kmax = j.depth() - 1;
            let moments: Vec<Rational> = (0..=2 * kmax).map(|m| j.nu_moment(m).unwrap()).collect();
            for p in 0..=kmax {
                for q in 0..=kmax {
                    let pc = j.p_coeffs(p).unwrap();
                    let qc = j.p_coeffs(q).unwrap();
                    let mut acc = int(0);
                    for (i, x) in pc.iter().enumerate() {
                        for (k, y) in qc.iter().enumerate() {
                            acc += x * y * &moments[i + k];
                        }
                    }
                    if p == q {
                        assert_eq!(acc, *j.c(p + 1).unwrap(), "norm of p_{p}");
                    } else {
                        assert!(acc.is_zero(), "<p_{p}, p_{q}> = {acc}");
                    }
                }
            }
        }
    }

    #[test]
    fn norms_scale_with_a() {
        let base =
            JacobiData::new(vec![int(0); 5], vec![int(1), int(2), ratio(1, 2), int(3)]).unwrap();
        let r = ratio(5, 3);
        let scaled = JacobiData::new(
            vec![int(0); 5],
            base.a_coeffs().iter().map(|a| a * &r).collect(),
        )
        .unwrap();
        for k in 1..=5 {
            let mut factor = int(1);
            for _ in 1..k {
                factor *= &r;
            }
            assert_eq!(*scaled.c(k).unwrap(), base.c(k).unwrap() * factor);
        }
    }

    #[test]
    fn serde_forms() {
        let full: JacobiData =
            serde_json::from_str(r#"{"b":["0","1","0"],"a":["1","1"],"depth":3}"#).unwrap();
        assert_eq!(full.b(1).unwrap(), &int(1));
        let short: JacobiData =
            serde_json::from_str(r#"{"lambda":"1/2","eta":"3","depth":4}"#).unwrap();
        assert_eq!(short, JacobiData::constant(ratio(1, 2), int(3), 4).unwrap());
        let s = serde_json::to_string(&short).unwrap();
        let back: JacobiData = serde_json::from_str(&s).unwrap();
        assert_eq!(back, short);
        assert!(serde_json::from_str::<JacobiData>(r#"{"b":["0"],"a":[],"depth":2}"#).is_err());
    }
}

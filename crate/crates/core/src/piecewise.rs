//! Compactly supported piecewise polynomials on the half-line `[0, ∞)`.
//!
//! A function is stored as breakpoints `x_0 < x_1 < … < x_m` together with one
//! polynomial per half-open interval `[x_j, x_{j+1})`, in the absolute
//! variable `t`. It vanishes on `[0, x_0)` and on `[x_m, ∞)`.

use std::cmp::Ordering;
use std::fmt;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::Polynomial;
use crate::rational::{self, Rational};

#[derive(Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(try_from = "RawPiecewise", into = "RawPiecewise")]
pub struct PiecewisePolynomial {
    breakpoints: Vec<Rational>,
    pieces: Vec<Polynomial>,
}

impl PiecewisePolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    /// Validates and canonicalizes. The breakpoints must be strictly
    /// increasing and nonnegative, with exactly one fewer piece.
    pub fn new(breakpoints: Vec<Rational>, pieces: Vec<Polynomial>) -> Result<Self> {
        if breakpoints.is_empty() {
            if pieces.is_empty() {
                return Ok(Self::zero());
            }
            return Err(Error::InvalidPiecewise("pieces without breakpoints".into()));
        }
        if pieces.len() + 1 != breakpoints.len() {
            return Err(Error::InvalidPiecewise(format!(
                "{} breakpoints but {} pieces",
                breakpoints.len(),
                pieces.len()
            )));
        }
        if breakpoints[0].is_negative() {
            return Err(Error::InvalidPiecewise(format!(
                "breakpoint {} is negative",
                rational::format(&breakpoints[0])
            )));
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidPiecewise(
                "breakpoints not strictly increasing".into(),
            ));
        }
        Ok(Self::canonical(breakpoints, pieces))
    }

    /// `p` on `[a, b)`, zero elsewhere. Empty when `a >= b`.
    pub fn on_interval(a: Rational, b: Rational, p: Polynomial) -> Result<Self> {
        if a >= b {
            return Ok(Self::zero());
        }
        Self::new(vec![a, b], vec![p])
    }

    /// Indicator of `[a, b)`.
    pub fn indicator(a: Rational, b: Rational) -> Result<Self> {
        Self::on_interval(a, b, Polynomial::constant(Rational::from_integer(1.into())))
    }

    /// Step function taking `values[j]` on `[breakpoints[j], breakpoints[j+1])`.
    pub fn step(breakpoints: Vec<Rational>, values: Vec<Rational>) -> Result<Self> {
        Self::new(
            breakpoints,
            values.into_iter().map(Polynomial::constant).collect(),
        )
    }

    pub fn breakpoints(&self) -> &[Rational] {
        &self.breakpoints
    }

    pub fn pieces(&self) -> &[Polynomial] {
        &self.pieces
    }

    /// Support hull `[x_0, x_m]`, `None` for the zero function.
    pub fn support(&self) -> Option<(&Rational, &Rational)> {
        Some((self.breakpoints.first()?, self.breakpoints.last()?))
    }

    pub fn is_zero(&self) -> bool {
        self.pieces.is_empty()
    }

    /// Right-continuous point evaluation.
    pub fn eval(&self, t: &Rational) -> Result<Rational> {
        if t.is_negative() {
            return Err(Error::NegativeArgument(rational::format(t)));
        }
        Ok(self
            .piece_index(t)
            .map(|j| self.pieces[j].eval(t))
            .unwrap_or_else(Rational::zero))
    }

    /// Index of the piece whose half-open interval contains `t`.
    fn piece_index(&self, t: &Rational) -> Option<usize> {
        let (lo, hi) = self.support()?;
        if t < lo || t >= hi {
            return None;
        }
        // last breakpoint <= t
        let j = self.breakpoints.partition_point(|x| x <= t);
        Some(j - 1)
    }

    /// `∫_0^∞ f(u) du`.
    pub fn integral(&self) -> Rational {
        self.pieces
            .iter()
            .enumerate()
            .map(|(j, p)| p.integrate(&self.breakpoints[j], &self.breakpoints[j + 1]))
            .sum()
    }

    /// `(T f)(t) = ∫_t^∞ f(u) du`. Constant on `[0, x_0]`, zero from `x_m` on.
    pub fn tail_integral(&self) -> Self {
        let m = self.pieces.len();
        if m == 0 {
            return Self::zero();
        }
        let mut pieces = vec![Polynomial::zero(); m];
        let mut tail = Rational::zero();
        for j in (0..m).rev() {
            let anti = self.pieces[j].antiderivative();
            let top = anti.eval(&self.breakpoints[j + 1]);
            // ∫_t^{x_{j+1}} p_j + ∫_{x_{j+1}}^∞ f
            pieces[j] = &Polynomial::constant(top + &tail) - &anti;
            tail += self.pieces[j].integrate(&self.breakpoints[j], &self.breakpoints[j + 1]);
        }
        let mut breakpoints = self.breakpoints.clone();
        if breakpoints[0].is_positive() {
            breakpoints.insert(0, Rational::zero());
            pieces.insert(0, Polynomial::constant(tail));
        }
        Self::canonical(breakpoints, pieces)
    }

    /// `(S_u f)(t) = f(t - u)` for `t >= u`, zero before.
    pub fn shift(&self, u: &Rational) -> Result<Self> {
        if u.is_negative() {
            return Err(Error::NegativeArgument(rational::format(u)));
        }
        Ok(Self {
            breakpoints: self.breakpoints.iter().map(|x| x + u).collect(),
            pieces: self.pieces.iter().map(|p| p.translate(u)).collect(),
        })
    }

    pub fn scale(&self, r: &Rational) -> Self {
        if r.is_zero() {
            return Self::zero();
        }
        Self {
            breakpoints: self.breakpoints.clone(),
            pieces: self.pieces.iter().map(|p| p.scale(r)).collect(),
        }
    }

    /// Piecewise derivative on the interior of each piece.
    pub fn derivative(&self) -> Self {
        Self::canonical(
            self.breakpoints.clone(),
            self.pieces.iter().map(Polynomial::derivative).collect(),
        )
    }

    /// Splits `f` at extra points, without canonicalizing. Used to build
    /// alternative representations of the same function.
    pub fn refine(&self, extra: &[Rational]) -> (Vec<Rational>, Vec<Polynomial>) {
        let mut grid: Vec<Rational> = self.breakpoints.iter().chain(extra).cloned().collect();
        grid.sort();
        grid.dedup();
        let pieces = grid.windows(2).map(|w| self.poly_on_cell(&w[0])).collect();
        (grid, pieces)
    }

    fn poly_on_cell(&self, start: &Rational) -> Polynomial {
        self.piece_index(start)
            .map(|j| self.pieces[j].clone())
            .unwrap_or_default()
    }

    fn combine(
        &self,
        other: &Self,
        restrict_to_overlap: bool,
        op: impl Fn(&Polynomial, &Polynomial) -> Polynomial,
    ) -> Self {
        let grid: Vec<Rational> = if restrict_to_overlap {
            let (Some((a0, a1)), Some((b0, b1))) = (self.support(), other.support()) else {
                return Self::zero();
            };
            let lo = a0.max(b0);
            let hi = a1.min(b1);
            if lo >= hi {
                return Self::zero();
            }
            let mut g: Vec<Rational> = self
                .breakpoints
                .iter()
                .chain(&other.breakpoints)
                .filter(|x| *x >= lo && *x <= hi)
                .cloned()
                .collect();
            g.sort();
            g.dedup();
            g
        } else {
            let mut g: Vec<Rational> = self
                .breakpoints
                .iter()
                .chain(&other.breakpoints)
                .cloned()
                .collect();
            g.sort();
            g.dedup();
            g
        };
        if grid.len() < 2 {
            return Self::zero();
        }
        let pieces = grid
            .windows(2)
            .map(|w| op(&self.poly_on_cell(&w[0]), &other.poly_on_cell(&w[0])))
            .collect();
        Self::canonical(grid, pieces)
    }

    /// Merges equal neighbours and trims zero pieces at both ends.
    fn canonical(breakpoints: Vec<Rational>, pieces: Vec<Polynomial>) -> Self {
        let mut bps: Vec<Rational> = Vec::with_capacity(breakpoints.len());
        let mut ps: Vec<Polynomial> = Vec::with_capacity(pieces.len());
        let mut ends = breakpoints.into_iter();
        let mut start = match ends.next() {
            Some(x) => x,
            None => return Self::zero(),
        };
        for (p, end) in pieces.into_iter().zip(ends) {
            if ps.last() == Some(&p) {
                // extend the previous piece
                *bps.last_mut().unwrap() = end.clone();
            } else {
                if ps.is_empty() {
                    bps.push(start.clone());
                }
                bps.push(end.clone());
                ps.push(p);
            }
            start = end;
        }
        // trim zero pieces at the ends
        let first = ps.iter().position(|p| !p.is_zero());
        let Some(first) = first else {
            return Self::zero();
        };
        let last = ps.iter().rposition(|p| !p.is_zero()).unwrap();
        Self {
            breakpoints: bps[first..=last + 1].to_vec(),
            pieces: ps[first..=last].to_vec(),
        }
    }
}

impl std::ops::Add for &PiecewisePolynomial {
    type Output = PiecewisePolynomial;

    fn add(self, rhs: &PiecewisePolynomial) -> PiecewisePolynomial {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        self.combine(rhs, false, |a, b| a + b)
    }
}

impl std::ops::Sub for &PiecewisePolynomial {
    type Output = PiecewisePolynomial;

    fn sub(self, rhs: &PiecewisePolynomial) -> PiecewisePolynomial {
        self.combine(rhs, false, |a, b| a - b)
    }
}

impl std::ops::Neg for &PiecewisePolynomial {
    type Output = PiecewisePolynomial;

    fn neg(self) -> PiecewisePolynomial {
        PiecewisePolynomial {
            breakpoints: self.breakpoints.clone(),
            pieces: self.pieces.iter().map(|p| -p).collect(),
        }
    }
}

impl std::ops::Mul for &PiecewisePolynomial {
    type Output = PiecewisePolynomial;

    fn mul(self, rhs: &PiecewisePolynomial) -> PiecewisePolynomial {
        self.combine(rhs, true, |a, b| a * b)
    }
}

impl PartialOrd for PiecewisePolynomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Arbitrary but fixed total order, used only for deterministic containers.
impl Ord for PiecewisePolynomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.breakpoints.cmp(&other.breakpoints).then_with(|| {
            let key = |p: &Polynomial| p.coeffs().to_vec();
            self.pieces
                .iter()
                .map(key)
                .cmp(other.pieces.iter().map(key))
        })
    }
}

impl fmt::Debug for PiecewisePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for PiecewisePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .pieces
            .iter()
            .enumerate()
            .map(|(j, p)| {
                format!(
                    "{} on [{}, {})",
                    p,
                    rational::format(&self.breakpoints[j]),
                    rational::format(&self.breakpoints[j + 1])
                )
            })
            .collect();
        write!(f, "{}", parts.join("; "))
    }
}

#[derive(Serialize, Deserialize)]
struct RawPiecewise {
    #[serde(with = "rational::serde_str_vec")]
    breakpoints: Vec<Rational>,
    pieces: Vec<RawPoly>,
}

#[derive(Serialize, Deserialize)]
#[serde(transparent)]
struct RawPoly(#[serde(with = "rational::serde_str_vec")] Vec<Rational>);

impl TryFrom<RawPiecewise> for PiecewisePolynomial {
    type Error = Error;

    fn try_from(raw: RawPiecewise) -> Result<Self> {
        Self::new(
            raw.breakpoints,
            raw.pieces
                .into_iter()
                .map(|p| Polynomial::new(p.0))
                .collect(),
        )
    }
}

impl From<PiecewisePolynomial> for RawPiecewise {
    fn from(f: PiecewisePolynomial) -> Self {
        RawPiecewise {
            breakpoints: f.breakpoints,
            pieces: f
                .pieces
                .into_iter()
                .map(|p| RawPoly(p.coeffs().to_vec()))
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn chi(a: i64, b: i64) -> PiecewisePolynomial {
        PiecewisePolynomial::indicator(int(a), int(b)).unwrap()
    }

    fn on(a: i64, b: i64, cs: &[i64]) -> PiecewisePolynomial {
        PiecewisePolynomial::on_interval(
            int(a),
            int(b),
            Polynomial::new(cs.iter().map(|&c| int(c)).collect()),
        )
        .unwrap()
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(PiecewisePolynomial::new(vec![int(1), int(1)], vec![Polynomial::zero()]).is_err());
        assert!(PiecewisePolynomial::new(vec![int(-1), int(1)], vec![Polynomial::zero()]).is_err());
        assert!(PiecewisePolynomial::new(vec![int(0), int(1)], vec![]).is_err());
    }

    #[test]
    fn add_examples() {
        let f = on(0, 2, &[1, 3]);
        assert_eq!(&f + &PiecewisePolynomial::zero(), f);
        let two = &chi(0, 1) + &chi(0, 1);
        assert_eq!(
            two,
            PiecewisePolynomial::step(vec![int(0), int(1)], vec![int(2)]).unwrap()
        );
        let joined = &chi(0, 1) + &chi(1, 2);
        assert_eq!(joined, chi(0, 2));
        assert_eq!(joined.breakpoints().len(), 2);
    }

    #[test]
    fn mul_examples() {
        assert!((&chi(0, 1) * &PiecewisePolynomial::zero()).is_zero());
        assert!((&chi(0, 1) * &chi(2, 3)).is_zero());
        assert!((&chi(0, 1) * &chi(1, 2)).is_zero());
        assert_eq!(
            &on(0, 1, &[0, 1]) * &on(0, 1, &[0, 1]),
            on(0, 1, &[0, 0, 1])
        );
    }

    #[test]
    fn eval_examples() {
        assert_eq!(chi(0, 1).eval(&ratio(1, 2)).unwrap(), int(1));
        assert_eq!(chi(0, 1).eval(&int(1)).unwrap(), int(0));
        assert_eq!(chi(0, 1).eval(&int(0)).unwrap(), int(1));
        assert_eq!(on(0, 1, &[1, -1]).eval(&ratio(1, 4)).unwrap(), ratio(3, 4));
        assert!(chi(0, 1).eval(&int(-1)).is_err());
        assert_eq!(chi(1, 2).eval(&int(5)).unwrap(), int(0));
    }

    #[test]
    fn integral_examples() {
        assert_eq!(PiecewisePolynomial::zero().integral(), int(0));
        assert_eq!(chi(0, 1).integral(), int(1));
        assert_eq!(on(0, 2, &[0, 1]).integral(), int(2));
    }

    #[test]
    fn tail_integral_examples() {
        assert!(PiecewisePolynomial::zero().tail_integral().is_zero());
        assert_eq!(chi(0, 1).tail_integral(), on(0, 1, &[1, -1]));
        let expected = PiecewisePolynomial::new(
            vec![int(0), int(1), int(2)],
            vec![
                Polynomial::constant(int(1)),
                Polynomial::new(vec![int(2), int(-1)]),
            ],
        )
        .unwrap();
        assert_eq!(chi(1, 2).tail_integral(), expected);
    }

    #[test]
    fn shift_examples() {
        let f = on(0, 1, &[1, 2, 3]);
        assert_eq!(f.shift(&int(0)).unwrap(), f);
        assert_eq!(chi(0, 1).shift(&int(1)).unwrap(), chi(1, 2));
        assert_eq!(f.shift(&ratio(7, 3)).unwrap().integral(), f.integral());
        assert!(f.shift(&int(-1)).is_err());
        let g = f.shift(&int(2)).unwrap();
        assert_eq!(g.eval(&ratio(5, 2)).unwrap(), f.eval(&ratio(1, 2)).unwrap());
    }

    #[test]
    fn zero_tests() {
        assert!(PiecewisePolynomial::zero().is_zero());
        assert!((&chi(0, 1) - &chi(0, 1)).is_zero());
        assert!(!(&chi(0, 1) - &chi(0, 2)).is_zero());
    }

    #[test]
    fn interior_gap_kept() {
        let f = &chi(0, 1) + &chi(2, 3);
        assert_eq!(f.breakpoints().len(), 4);
        assert_eq!(f.eval(&ratio(3, 2)).unwrap(), int(0));
        assert_eq!(f.integral(), int(2));
    }

    #[test]
    fn serde_round_trip() {
        let f = &on(0, 1, &[1, -1])
            + &PiecewisePolynomial::step(vec![ratio(1, 2), int(3)], vec![ratio(-5, 7)]).unwrap();
        let s = serde_json::to_string(&f).unwrap();
        let back: PiecewisePolynomial = serde_json::from_str(&s).unwrap();
        assert_eq!(back, f);
        assert_eq!(serde_json::to_string(&back).unwrap(), s);
        let chi01: PiecewisePolynomial =
            serde_json::from_str(r#"{"breakpoints":["0","1"],"pieces":[["1"]]}"#).unwrap();
        assert_eq!(chi01, chi(0, 1));
        let bad = serde_json::from_str::<PiecewisePolynomial>(
            r#"{"breakpoints":["1","0"],"pieces":[["1"]]}"#,
        );
        assert!(bad.is_err());
    }
}

//! Seeded generators for property suites: step functions, piecewise-linear
//! functions and finite Fock vectors with small rational data.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::fock::FockVector;
use crate::piecewise::PiecewisePolynomial;
use crate::poly::Polynomial;
use crate::rational::{int, ratio, Rational};
use crate::simplex::{compositions, StratifiedFunction};

pub struct Generator {
    rng: ChaCha8Rng,
    /// Breakpoints are drawn from `{0, 1/2, 1, …, horizon}`.
    pub horizon: i64,
    pub max_breakpoints: usize,
}

impl Generator {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
            horizon: 4,
            max_breakpoints: 6,
        }
    }

    fn breakpoints(&mut self) -> Vec<Rational> {
        let k = self.rng.gen_range(2..=self.max_breakpoints.max(2));
        let mut grid: Vec<i64> = (0..=2 * self.horizon).collect();
        grid.shuffle(&mut self.rng);
        let mut picked: Vec<i64> = grid.into_iter().take(k).collect();
        picked.sort_unstable();
        picked.into_iter().map(|x| ratio(x, 2)).collect()
    }

    fn small(&mut self) -> Rational {
        int(self.rng.gen_range(-3..=3))
    }

    fn nonzero(&mut self) -> Rational {
        let v = self.rng.gen_range(1..=3);
        int(if self.rng.gen_bool(0.5) { v } else { -v })
    }

    /// Nonzero step function with at most `max_breakpoints` breakpoints.
    pub fn step(&mut self) -> PiecewisePolynomial {
        loop {
            let bps = self.breakpoints();
            let values = (1..bps.len()).map(|_| self.small()).collect();
            let f = PiecewisePolynomial::step(bps, values).expect("sorted breakpoints");
            if !f.is_zero() {
                return f;
            }
        }
    }

    /// Nonzero function with affine pieces.
    pub fn affine(&mut self) -> PiecewisePolynomial {
        loop {
            let bps = self.breakpoints();
            let pieces = (1..bps.len())
                .map(|_| Polynomial::new(vec![self.small(), self.small()]))
                .collect();
            let f = PiecewisePolynomial::new(bps, pieces).expect("sorted breakpoints");
            if !f.is_zero() {
                return f;
            }
        }
    }

    pub fn function(&mut self) -> PiecewisePolynomial {
        if self.rng.gen_bool(0.7) {
            self.step()
        } else {
            self.affine()
        }
    }

    pub fn family(&mut self, size: usize) -> Vec<PiecewisePolynomial> {
        (0..size).map(|_| self.step()).collect()
    }

    /// Random element of `L²(T_n, ·)`: a few strata, a few rank-one terms each.
    pub fn stratified(&mut self, degree: usize) -> StratifiedFunction {
        let comps = compositions(degree).expect("degree >= 1");
        let mut f = StratifiedFunction::zero(degree);
        let strata = self.rng.gen_range(1..=2.min(comps.len()));
        for comp in comps.choose_multiple(&mut self.rng, strata) {
            let terms = self.rng.gen_range(1..=2);
            for _ in 0..terms {
                let factors = (0..comp.blocks()).map(|_| self.function()).collect();
                let c = self.nonzero();
                f.push(comp.clone(), c, factors).expect("shape matches");
            }
        }
        f
    }

    /// Random vector with components in degrees `0..=max_degree`.
    pub fn fock_vector(&mut self, max_degree: usize) -> FockVector {
        let mut v = FockVector::from_scalar(self.small());
        for n in 1..=max_degree {
            if self.rng.gen_bool(0.6) {
                v.add_component(self.stratified(n));
            }
        }
        v
    }
}

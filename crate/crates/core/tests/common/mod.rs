//! Reference computations used to cross-check the library.

#![allow(dead_code)]

use monofock::poly::Polynomial;
use monofock::{JacobiData, PiecewisePolynomial, Rational};
use num_traits::Zero;

fn integral_of_product(fs: &[&PiecewisePolynomial]) -> Rational {
    let mut acc = fs[0].clone();
    for f in &fs[1..] {
        acc = &acc * *f;
    }
    acc.integral()
}

/// Hand-expanded mixed moments for words of length at most four.
pub fn moment_oracle(nu: &JacobiData, hs: &[PiecewisePolynomial]) -> Rational {
    match hs {
        [] => Rational::from_integer(1.into()),
        [_] => Rational::zero(),
        [h1, h2] => integral_of_product(&[h1, h2]),
        [h1, h2, h3] => nu.b(0).unwrap() * integral_of_product(&[h1, h2, h3]),
        [h1, h2, h3, h4] => {
            let b0 = nu.b(0).unwrap();
            let a1 = nu.a(1).unwrap();
            let all = integral_of_product(&[h1, h2, h3, h4]);
            let nested = integral_of_product(&[h1, h4, &(h2 * h3).tail_integral()]);
            let split = integral_of_product(&[h1, h2]) * integral_of_product(&[h3, h4]);
            b0 * b0 * &all + nested + a1 * &all + split
        }
        _ => panic!("oracle covers words of length at most 4"),
    }
}

fn piece_on(h: &PiecewisePolynomial, a: &Rational) -> Polynomial {
    let bps = h.breakpoints();
    if bps.is_empty() || a < &bps[0] || a >= bps.last().unwrap() {
        return Polynomial::zero();
    }
    let j = bps
        .windows(2)
        .position(|w| &w[0] <= a && a < &w[1])
        .unwrap();
    h.pieces()[j].clone()
}

fn from_lower(p: &Polynomial, a: &Rational) -> Polynomial {
    let big = p.antiderivative();
    &big - &Polynomial::constant(big.eval(a))
}

/// `∫ h_1(t_1)⋯h_k(t_k)` over `b > t_1 ≥ … ≥ t_k ≥ a`, all pieces polynomial
/// on `[a, b)`.
fn cell_integral(ps: &[Polynomial], a: &Rational, b: &Rational) -> Rational {
    let mut inner = Polynomial::constant(Rational::from_integer(1.into()));
    for p in ps.iter().rev() {
        inner = from_lower(&(p * &inner), a);
    }
    inner.eval(b)
}

/// `∫_{t_1 ≥ … ≥ t_n} h_1(t_1)⋯h_n(t_n) dt` by summing over ordered tuples of
/// cells of the common breakpoint grid.
pub fn simplex_oracle(hs: &[PiecewisePolynomial]) -> Rational {
    let mut grid: Vec<Rational> = hs.iter().flat_map(|h| h.breakpoints().to_vec()).collect();
    grid.sort();
    grid.dedup();
    if grid.len() < 2 {
        return Rational::zero();
    }
    let cells = grid.len() - 1;
    let n = hs.len();
    let mut total = Rational::zero();
    let mut idx = vec![cells - 1; n];
    loop {
        let mut value = Rational::from_integer(1.into());
        let mut start = 0;
        while start < n && !value.is_zero() {
            let mut end = start;
            while end + 1 < n && idx[end + 1] == idx[start] {
                end += 1;
            }
            let (a, b) = (&grid[idx[start]], &grid[idx[start] + 1]);
            let ps: Vec<Polynomial> = hs[start..=end].iter().map(|h| piece_on(h, a)).collect();
            value *= cell_integral(&ps, a, b);
            start = end + 1;
        }
        total += value;
        if !next_nonincreasing(&mut idx) {
            return total;
        }
    }
}

/// Steps through non-increasing index tuples from the top down.
fn next_nonincreasing(idx: &mut [usize]) -> bool {
    let n = idx.len();
    let mut k = n;
    while k > 0 {
        k -= 1;
        if idx[k] > 0 {
            idx[k] -= 1;
            for j in k + 1..n {
                idx[j] = idx[k];
            }
            return true;
        }
    }
    false
}

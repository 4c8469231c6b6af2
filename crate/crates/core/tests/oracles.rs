mod common;

use monofock::fock::moment;
use monofock::random::Generator;
use monofock::rational::{int, ratio};
use monofock::simplex::simplex_integral;
use monofock::{JacobiData, PiecewisePolynomial};

#[test]
fn moment_oracle_matches_operator_chain() {
    let data = [
        JacobiData::constant(int(0), int(1), 5).unwrap(),
        JacobiData::constant(int(-2), int(3), 5).unwrap(),
        JacobiData::new(
            vec![ratio(1, 2), int(4), int(-1)],
            vec![int(5), ratio(2, 3)],
        )
        .unwrap(),
        JacobiData::new(vec![int(2); 5], vec![int(0); 4]).unwrap(),
    ];
    let mut gen = Generator::new(99);
    for nu in &data {
        for n in 1..=4 {
            for _ in 0..25 {
                let hs: Vec<_> = (0..n).map(|_| gen.function()).collect();
                assert_eq!(moment(nu, &hs).unwrap(), common::moment_oracle(nu, &hs));
            }
        }
    }
}

#[test]
fn oracle_values_for_unit_indicator() {
    let h = PiecewisePolynomial::indicator(int(0), int(1)).unwrap();
    let nu = JacobiData::constant(int(0), int(1), 4).unwrap();
    let got: Vec<_> = (1..=4)
        .map(|n| common::moment_oracle(&nu, &vec![h.clone(); n]))
        .collect();
    assert_eq!(got, vec![int(0), int(1), int(0), ratio(5, 2)]);
}

#[test]
fn box_oracle_matches_simplex_integral() {
    let mut gen = Generator::new(17);
    for arity in 1..=4 {
        for _ in 0..15 {
            let hs: Vec<_> = (0..arity).map(|_| gen.function()).collect();
            assert_eq!(simplex_integral(&hs), common::simplex_oracle(&hs));
        }
    }
    let h = PiecewisePolynomial::indicator(int(0), int(1)).unwrap();
    assert_eq!(common::simplex_oracle(&vec![h; 3]), ratio(1, 6));
}

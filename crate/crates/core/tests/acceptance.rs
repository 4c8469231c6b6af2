//! Acceptance criteria, one line each. Run with
//! `cargo test -p monofock-core --test acceptance`.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use monofock::fock::{chain_vector, fock_inner, moment, projection_formula};
use monofock::meixner::{cor35_step, expansion_to_fock, r_expand};
use monofock::random::Generator;
use monofock::rational::{format, int, ratio};
use monofock::simplex::simplex_integral;
use monofock::suite::{self, SuiteConfig};
use monofock::{FockVector, JacobiData, PiecewisePolynomial, TensorSum};
use num_traits::Zero;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn chi(a: i64, b: i64) -> PiecewisePolynomial {
    PiecewisePolynomial::indicator(int(a), int(b)).unwrap()
}

fn within(start: Instant, limit: Duration, detail: String) -> Outcome {
    let took = start.elapsed();
    if took < limit {
        Ok(format!("{detail}; {:.2}s", took.as_secs_f64()))
    } else {
        Err(format!(
            "{detail}; took {:.2}s, limit {}s",
            took.as_secs_f64(),
            limit.as_secs()
        ))
    }
}

fn from_check(c: suite::CheckOutcome) -> Outcome {
    if c.passed {
        Ok(format!("{} cases", c.cases))
    } else {
        Err(format!(
            "{}: {:?}",
            c.name,
            c.counterexample.map(|w| (w.note, w.values))
        ))
    }
}

fn moments() -> Outcome {
    let start = Instant::now();
    let h = chi(0, 1);
    let semicircle = JacobiData::constant(int(0), int(1), 6).unwrap();
    let expected = [int(0), int(1), int(0), ratio(5, 2)];
    for (n, want) in (1..=4).zip(&expected) {
        let got = moment(&semicircle, &vec![h.clone(); n]).unwrap();
        if &got != want {
            return Err(format!(
                "tau_{n} = {}, expected {}",
                format(&got),
                format(want)
            ));
        }
    }
    let mut cases = 0;
    for lambda in [0, 1, -2] {
        for eta in [0, 1, 3] {
            let nu = JacobiData::constant(int(lambda), int(eta), 6).unwrap();
            let (l, e) = (int(lambda), int(eta));
            let t3 = moment(&nu, &vec![h.clone(); 3]).unwrap();
            let t4 = moment(&nu, &vec![h.clone(); 4]).unwrap();
            let want4 = &l * &l + ratio(3, 2) + &e;
            if t3 != l || t4 != want4 {
                return Err(format!(
                    "lambda={lambda}, eta={eta}: tau_3={}, tau_4={}",
                    format(&t3),
                    format(&t4)
                ));
            }
            cases += 1;
        }
    }
    let general = JacobiData::new(
        vec![int(1), ratio(-1, 2), int(2), int(0)],
        vec![int(3), ratio(1, 3), int(1)],
    )
    .unwrap();
    let mut gen = Generator::new(11);
    for nu in [&semicircle, &general] {
        for n in 1..=4 {
            for _ in 0..10 {
                let hs: Vec<_> = (0..n).map(|_| gen.function()).collect();
                let got = moment(nu, &hs).unwrap();
                let want = common::moment_oracle(nu, &hs);
                if got != want {
                    return Err(format!(
                        "oracle mismatch at n={n}: {} vs {}",
                        format(&got),
                        format(&want)
                    ));
                }
                cases += 1;
            }
        }
    }
    within(
        start,
        Duration::from_secs(1),
        format!("{} parameter/oracle cases", cases),
    )
}

fn norm_identity() -> Outcome {
    let start = Instant::now();
    let nu = JacobiData::constant(int(0), int(1), 8).unwrap();
    let general = JacobiData::new(
        vec![int(1), int(-1), ratio(1, 2), int(0), int(2)],
        vec![int(2), ratio(1, 2), int(3), int(1)],
    )
    .unwrap();
    let cfg = SuiteConfig {
        max_degree: 4,
        random_families: 25,
        ..Default::default()
    };
    let mut cases = 0;
    for (seed, nu) in [(0, &nu), (1, &general)] {
        let cfg = SuiteConfig {
            seed,
            ..cfg.clone()
        };
        let c = suite::check_norm_identity(nu, &cfg).unwrap();
        if !c.passed {
            return from_check(c);
        }
        cases += c.cases;
    }
    within(
        start,
        Duration::from_secs(60),
        format!("{cases} pairs over 50 families"),
    )
}

fn cross_path() -> Outcome {
    let start = Instant::now();
    let nu = JacobiData::constant(int(1), int(2), 8).unwrap();
    let cfg = SuiteConfig {
        max_degree: 5,
        ..Default::default()
    };
    let c = suite::check_projection_consistency(&nu, &cfg).unwrap();
    let detail = from_check(c)?;
    within(
        start,
        Duration::from_secs(60),
        format!("{detail} (words up to n=5)"),
    )
}

fn meixner_recursions() -> Outcome {
    let family = vec![
        chi(0, 1),
        PiecewisePolynomial::indicator(ratio(1, 2), int(2)).unwrap(),
    ];
    let mut cases = 0;
    for (lambda, eta) in [(0, 1), (2, 1), (1, 0)] {
        let nu = JacobiData::constant(int(lambda), int(eta), 8).unwrap();
        let cfg = SuiteConfig {
            family: family.clone(),
            max_degree: 5,
            ..Default::default()
        };
        let c = suite::check_meixner_recursions(&nu, &int(lambda), &int(eta), &cfg).unwrap();
        if !c.passed {
            return Err(format!(
                "(lambda, eta) = ({lambda}, {eta}): {:?}",
                c.counterexample.map(|w| w.note)
            ));
        }
        cases += c.cases;
    }
    let nu = JacobiData::constant(int(2), int(1), 8).unwrap();
    let hs = vec![chi(0, 1); 5];
    let pure = FockVector::from_graded(projection_formula(&hs));
    let a = expansion_to_fock(
        &nu,
        &r_expand(&TensorSum::pure(hs.clone()), &int(2), &int(1)).unwrap(),
    )
    .unwrap();
    let b = expansion_to_fock(&nu, &cor35_step(&hs, &int(2), &int(1)).unwrap()).unwrap();
    if !a.sub(&pure).is_zero() || !b.sub(&pure).is_zero() {
        return Err("degree-5 expansion leaves lower components".into());
    }
    Ok(format!("{cases} word expansions, n <= 5"))
}

fn negative_witness() -> Outcome {
    let mut b = vec![int(0); 8];
    b[1] = int(1);
    let nu = JacobiData::new(b, vec![int(1); 7]).unwrap();
    let (lambda, eta) = (nu.b(0).unwrap().clone(), nu.a(1).unwrap().clone());
    let hs = vec![chi(0, 1); 3];
    let e = r_expand(&TensorSum::pure(hs.clone()), &lambda, &eta).unwrap();
    let residual = monofock::meixner::projection_residual(&nu, &hs, &e).unwrap();
    let lower = residual.below_degree(3);
    let norm = fock_inner(&nu, &lower, &lower).unwrap();
    if norm.is_zero() {
        return Err("residual below degree 3 vanishes".into());
    }
    Ok(format!("residual norm below degree 3 = {}", format(&norm)))
}

fn adjointness() -> Outcome {
    let mut cases = 0;
    for nu in [
        JacobiData::constant(int(0), int(1), 8).unwrap(),
        JacobiData::new(
            vec![int(1), int(-2), ratio(1, 3), int(0), int(1), int(5)],
            vec![int(2), ratio(1, 2), int(3), int(1), ratio(2, 3)],
        )
        .unwrap(),
    ] {
        let cfg = SuiteConfig {
            random_cases: 100,
            seed: 5,
            ..Default::default()
        };
        let c = suite::check_adjointness(&nu, &cfg).unwrap();
        if !c.passed {
            return from_check(c);
        }
        cases += c.cases;
    }
    Ok(format!("{cases} random (h, F, G) triples"))
}

fn monotone_independence() -> Outcome {
    let mut cases = 0;
    for nu in [
        JacobiData::constant(int(0), int(1), 14).unwrap(),
        JacobiData::constant(int(2), int(1), 14).unwrap(),
        JacobiData::new(
            (0..14).map(|k| int(k % 3 - 1)).collect(),
            (1..14).map(|k| ratio(k % 4 + 1, 2)).collect(),
        )
        .unwrap(),
    ] {
        let c = suite::check_monotone_independence(&nu).unwrap();
        if !c.passed {
            return from_check(c);
        }
        cases += c.cases;
    }
    Ok(format!("{cases} operator and moment identities"))
}

fn stationarity() -> Outcome {
    let mut cases = 0;
    for nu in [
        JacobiData::constant(int(1), int(2), 8).unwrap(),
        JacobiData::new(
            vec![int(0), int(1), int(0), int(3)],
            vec![int(1), int(2), int(1)],
        )
        .unwrap(),
    ] {
        let c = suite::check_stationarity(&nu, &SuiteConfig::default()).unwrap();
        if !c.passed {
            return from_check(c);
        }
        cases += c.cases;
    }
    Ok(format!("{cases} shifted words"))
}

fn combinatorics() -> Outcome {
    let counts = from_check(suite::check_compositions().unwrap())?;
    let mut gen = Generator::new(3);
    for case in 0..20 {
        let arity = 1 + case % 3;
        let hs: Vec<_> = (0..arity).map(|_| gen.function()).collect();
        let fast = simplex_integral(&hs);
        let slow = common::simplex_oracle(&hs);
        if fast != slow {
            return Err(format!(
                "arity {arity}: {} vs box sum {}",
                format(&fast),
                format(&slow)
            ));
        }
    }
    Ok(format!("composition counts {counts}; 20 simplex integrals"))
}

fn degenerate() -> Outcome {
    let nu = JacobiData::new(vec![ratio(3, 2); 12], vec![int(0); 11]).unwrap();
    for k in 2..=12 {
        if !nu.c(k).unwrap().is_zero() {
            return Err(format!("c_{k} is nonzero"));
        }
    }
    let report = suite::run_suite(
        &nu,
        &SuiteConfig {
            max_degree: 3,
            ..Default::default()
        },
    )
    .unwrap();
    if let Some(bad) = report.first_failure() {
        return Err(format!("point mass: {} failed", bad.name));
    }
    let semicircle = JacobiData::constant(int(0), int(1), 4).unwrap();
    let v = chain_vector(&semicircle, &[chi(0, 1), chi(1, 2)])
        .unwrap()
        .component(2);
    if !monofock::simplex::strat_is_zero(&v) {
        return Err("degree-2 projection for ordered intervals is nonzero".into());
    }
    let c = suite::check_disjoint_projection(&semicircle).unwrap();
    from_check(c)?;
    Ok(format!(
        "point-mass suite: {} checks; ordered-interval projection is zero",
        report.checks.len()
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("1 moments and parameter sweeps", moments),
        ("2 norm identity on random families", norm_identity),
        ("3 projection cross-path", cross_path),
        ("4 constant-coefficient recursions", meixner_recursions),
        ("5 non-constant residual witness", negative_witness),
        ("6 adjointness and self-adjointness", adjointness),
        ("7 monotone independence", monotone_independence),
        ("8 shift stationarity", stationarity),
        ("9 combinatorics and simplex oracle", combinatorics),
        ("10 degenerate cases", degenerate),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        match run() {
            Ok(detail) => println!("PASS criterion {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {name}: {detail}");
            }
        }
    }
    println!("acceptance: {} passed, {} failed", 10 - failed, failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

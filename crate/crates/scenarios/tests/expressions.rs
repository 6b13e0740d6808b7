use proptest::prelude::*;
use proptest::strategy::ValueTree;
use proptest::test_runner::{Config, TestRunner};
use slant_core::numkit::tol::FD_TOL;
use slant_core::numkit::Jet1;
use slant_scenarios::expr::{parse_expr, parse_expr_in, Expr, Func};

const DIM: usize = 3;

fn leaf() -> impl Strategy<Value = Expr> {
    prop_oneof![
        (0u32..1000, 0u32..4).prop_map(|(m, d)| Expr::Num(m as f64 / 10f64.powi(d as i32))),
        (0..DIM).prop_map(Expr::Var),
    ]
}

fn expr() -> impl Strategy<Value = Expr> {
    leaf().prop_recursive(5, 40, 2, |inner| {
        let b = |e: Expr| Box::new(e);
        prop_oneof![
            inner.clone().prop_map(move |a| Expr::Neg(b(a))),
            (inner.clone(), inner.clone()).prop_map(move |(a, c)| Expr::Add(b(a), b(c))),
            (inner.clone(), inner.clone()).prop_map(move |(a, c)| Expr::Sub(b(a), b(c))),
            (inner.clone(), inner.clone()).prop_map(move |(a, c)| Expr::Mul(b(a), b(c))),
            (inner.clone(), inner.clone()).prop_map(move |(a, c)| Expr::Div(b(a), b(c))),
            (inner.clone(), -3i32..5).prop_map(move |(a, n)| Expr::Pow(b(a), n)),
            (inner, 0..Func::ALL.len()).prop_map(move |(a, f)| Expr::Call(Func::ALL[f], b(a))),
        ]
    })
}

/// The 200-expression corpus, from a fixed seed.
fn corpus() -> Vec<Expr> {
    let mut runner = TestRunner::new_with_rng(
        Config::default(),
        proptest::test_runner::TestRng::deterministic_rng(
            proptest::test_runner::RngAlgorithm::ChaCha,
        ),
    );
    let strategy = expr();
    (0..200)
        .map(|_| strategy.new_tree(&mut runner).unwrap().current())
        .collect()
}

#[test]
fn printing_and_parsing_round_trip_on_corpus() {
    for e in corpus() {
        let text = e.to_string();
        let back = parse_expr(&text).unwrap_or_else(|err| panic!("{text}: {err}"));
        assert_eq!(back, e, "{text}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn round_trip(e in expr()) {
        let text = e.to_string();
        prop_assert_eq!(parse_expr_in(&text, DIM).unwrap(), e);
    }
}

fn value(e: &Expr, x: &[f64]) -> f64 {
    e.eval::<f64>(x)
}

/// Whether every subexpression is finite at `x`. A finite result can hide an
/// infinite intermediate, as in `1/(x1 - x1)^-2`.
fn finite_throughout(e: &Expr, x: &[f64]) -> bool {
    let children: Vec<&Expr> = match e {
        Expr::Num(_) | Expr::Var(_) => vec![],
        Expr::Neg(a) | Expr::Pow(a, _) | Expr::Call(_, a) => vec![a],
        Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => vec![a, b],
    };
    value(e, x).is_finite() && children.into_iter().all(|c| finite_throughout(c, x))
}

#[test]
fn jets_match_values_and_finite_differences_on_corpus() {
    let points = [[0.3, -0.7, 1.1], [1.4, 0.2, -0.5], [-0.9, 0.6, 0.35]];
    let h = 1e-5;
    let mut compared = 0;
    for e in corpus() {
        for x in &points {
            let v = value(&e, x);
            let jet = e.eval::<Jet1>(&Jet1::seed(x));
            if !finite_throughout(&e, x) {
                continue;
            }
            assert_eq!(jet.value.to_bits(), v.to_bits(), "{e} at {x:?}");
            for i in 0..DIM {
                let mut xp = *x;
                let mut xm = *x;
                xp[i] += h;
                xm[i] -= h;
                let (fp, fm) = (value(&e, &xp), value(&e, &xm));
                // Curvature bound for the central difference; skips points
                // near poles, kinks and domain edges.
                let mut xpp = *x;
                let mut xmm = *x;
                xpp[i] += 2.0 * h;
                xmm[i] -= 2.0 * h;
                let third =
                    (value(&e, &xpp) - 2.0 * fp + 2.0 * fm - value(&e, &xmm)) / (2.0 * h.powi(3));
                let curvature = (fp - 2.0 * v + fm) / (h * h);
                if !(fp.is_finite() && fm.is_finite() && third.is_finite())
                    || third.abs() > 1e3
                    || curvature.abs() > 1e6
                    || v.abs() > 1e6
                {
                    continue;
                }
                let fd = (fp - fm) / (2.0 * h);
                let d = jet.partial(i);
                assert!(
                    (d - fd).abs() <= FD_TOL * (1.0 + d.abs()),
                    "{e} at {x:?}, ∂{i}: jet {d} vs fd {fd}"
                );
                compared += 1;
            }
        }
    }
    assert!(compared > 900, "only {compared} comparisons");
}

#[test]
fn parse_errors_carry_offsets() {
    let err = parse_expr("2*(x1").unwrap_err();
    assert_eq!(err.offset(), Some(5));
    assert!(parse_expr("").is_err());
    let err = parse_expr_in("x1 + x3", 2).unwrap_err();
    assert_eq!(err.offset(), Some(5));
    assert!(err.to_string().contains("x1, x2"));
    assert!(parse_expr("tan(x1)").is_err());
}

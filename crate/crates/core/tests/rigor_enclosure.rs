//! Enclosure properties of error-tracked arithmetic against 256-bit MPFR.

use phiscan_core::{certified_compare, compensated_sum, CompensatedSum, ErrorTracked, Outcome};
use proptest::prelude::*;
use rug::ops::Pow;
use rug::Float;

const PREC: u32 = 256;

fn big(x: f64) -> Float {
    Float::with_val(PREC, x)
}

fn encloses(et: ErrorTracked, truth: &Float) -> bool {
    let d = Float::with_val(PREC, truth - et.value()).abs();
    d <= et.err()
}

#[derive(Debug, Clone)]
enum Expr {
    /// value, err, position of the true value in [-1, 1] of the interval
    Leaf(f64, f64, f64),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Ln(Box<Expr>),
    Exp(Box<Expr>),
    Sqrt(Box<Expr>),
}

fn leaf() -> impl Strategy<Value = Expr> {
    (
        prop_oneof![-50.0..50.0f64, 0.001..3.0f64, 1e3..1e8f64],
        prop_oneof![Just(0.0), 0.0..1e-10f64, 0.0..1e-3f64],
        -1.0..=1.0f64,
    )
        .prop_map(|(v, e, t)| Expr::Leaf(v, e * v.abs().max(1.0), t))
}

fn expr() -> impl Strategy<Value = Expr> {
    leaf().prop_recursive(5, 40, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Add(a.into(), b.into())),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Sub(a.into(), b.into())),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Mul(a.into(), b.into())),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Div(a.into(), b.into())),
            inner.clone().prop_map(|a| Expr::Ln(a.into())),
            inner.clone().prop_map(|a| Expr::Exp(a.into())),
            inner.prop_map(|a| Expr::Sqrt(a.into())),
        ]
    })
}

/// Evaluates in both arithmetics; `None` when the tracked side rejects the
/// operation (domain or overflow) or the oracle leaves the f64 range.
fn eval(e: &Expr) -> Option<(ErrorTracked, Float)> {
    let r = match e {
        Expr::Leaf(v, err, t) => {
            let et = ErrorTracked::new(*v, *err).ok()?;
            let truth = big(*v) + big(*t) * big(*err);
            (et, truth)
        }
        Expr::Add(a, b) => {
            let (x, xt) = eval(a)?;
            let (y, yt) = eval(b)?;
            (x.add(y).ok()?, xt + yt)
        }
        Expr::Sub(a, b) => {
            let (x, xt) = eval(a)?;
            let (y, yt) = eval(b)?;
            (x.sub(y).ok()?, xt - yt)
        }
        Expr::Mul(a, b) => {
            let (x, xt) = eval(a)?;
            let (y, yt) = eval(b)?;
            (x.mul(y).ok()?, xt * yt)
        }
        Expr::Div(a, b) => {
            let (x, xt) = eval(a)?;
            let (y, yt) = eval(b)?;
            let q = x.div(y).ok()?;
            (q, xt / yt)
        }
        Expr::Ln(a) => {
            let (x, xt) = eval(a)?;
            (x.ln().ok()?, xt.ln())
        }
        Expr::Exp(a) => {
            let (x, xt) = eval(a)?;
            if x.value().abs() > 50.0 {
                return None;
            }
            (x.exp().ok()?, xt.exp())
        }
        Expr::Sqrt(a) => {
            let (x, xt) = eval(a)?;
            (x.sqrt().ok()?, xt.sqrt())
        }
    };
    if !r.1.is_finite() || r.1.clone().abs() > 1e300 || !r.0.err().is_finite() {
        return None;
    }
    Some(r)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn random_trees_enclose_their_value(e in expr()) {
        if let Some((et, truth)) = eval(&e) {
            prop_assert!(et.err() >= 0.0);
            prop_assert!(encloses(et, &truth), "{:?}: {} vs {}", e, et, truth);
        }
    }

    #[test]
    fn compensated_sum_encloses_exact_sum(
        xs in prop::collection::vec(prop_oneof![-1e6..1e6f64, -1e-6..1e-6f64, -1e16..1e16f64], 0..400)
    ) {
        let s = compensated_sum(xs.iter().copied()).unwrap();
        let mut exact = Float::with_val(4096, 0);
        for &x in &xs {
            exact += x;
        }
        let d = Float::with_val(4096, &exact - s.value()).abs();
        prop_assert!(d <= s.err(), "sum {} exact {}", s, exact);
    }

    #[test]
    fn tracked_sum_adds_input_errors(
        xs in prop::collection::vec((0.0..10.0f64, 0.0..1e-9f64, -1.0..=1.0f64), 1..100)
    ) {
        let mut acc = CompensatedSum::new();
        let mut truth = Float::with_val(PREC, 0);
        for &(v, e, t) in &xs {
            acc.push_tracked(ErrorTracked::new(v, e).unwrap());
            truth += big(v) + big(t) * big(e);
        }
        prop_assert!(encloses(acc.total(), &truth));
    }

    #[test]
    fn decided_verdicts_are_correct(
        a in -1e3..1e3f64, b in -1e3..1e3f64,
        ea in 0.0..1e-3f64, eb in 0.0..1e-3f64,
        ta in -1.0..=1.0f64, tb in -1.0..=1.0f64,
    ) {
        let v = certified_compare(ErrorTracked::new(a, ea).unwrap(), ErrorTracked::new(b, eb).unwrap());
        let lhs = big(a) + big(ta) * big(ea);
        let rhs = big(b) + big(tb) * big(eb);
        match v.outcome {
            Outcome::Holds => prop_assert!(lhs > rhs),
            Outcome::Fails => prop_assert!(lhs < rhs),
            Outcome::Indeterminate => prop_assert!(v.margin.abs() <= v.margin_err),
        }
    }

    #[test]
    fn powf_encloses(x in 0.01..1e4f64, e in -3.0..3.0f64) {
        let r = ErrorTracked::exact(x).powf(e).unwrap();
        let truth = big(x).pow(big(e));
        prop_assert!(encloses(r, &truth));
    }
}

#[test]
fn additive_chains_never_shrink_error() {
    let mut acc = ErrorTracked::new(1.0, 1e-12).unwrap();
    let mut prev = acc.err();
    for i in 0..1000 {
        acc = acc.add(ErrorTracked::rounded(1.0 / (i as f64 + 3.0))).unwrap();
        assert!(acc.err() >= prev);
        prev = acc.err();
    }
}

use proptest::prelude::*;
use tsfloquet::expr::{CmpOp, Cond, Func};
use tsfloquet::Expr;

fn constant() -> impl Strategy<Value = f64> {
    prop_oneof![(0u8..20).prop_map(f64::from), 0.0f64..100.0]
}

fn signed() -> impl Strategy<Value = f64> {
    prop_oneof![-5.0f64..5.0, (-4i8..4).prop_map(f64::from)]
}

fn func() -> impl Strategy<Value = Func> {
    prop_oneof![
        Just(Func::Sin),
        Just(Func::Cos),
        Just(Func::Exp),
        Just(Func::Sqrt),
        Just(Func::Abs)
    ]
}

fn cmp() -> impl Strategy<Value = CmpOp> {
    prop_oneof![
        Just(CmpOp::Eq),
        Just(CmpOp::Lt),
        Just(CmpOp::Le),
        Just(CmpOp::Gt),
        Just(CmpOp::Ge)
    ]
}

fn b(e: Expr) -> Box<Expr> {
    Box::new(e)
}

/// Any parser-producible expression up to depth 6.
fn any_expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![constant().prop_map(Expr::Const), Just(Expr::Var)];
    leaf.prop_recursive(6, 64, 3, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(x, y)| Expr::Add(b(x), b(y))),
            (inner.clone(), inner.clone()).prop_map(|(x, y)| Expr::Sub(b(x), b(y))),
            (inner.clone(), inner.clone()).prop_map(|(x, y)| Expr::Mul(b(x), b(y))),
            (inner.clone(), inner.clone()).prop_map(|(x, y)| Expr::Div(b(x), b(y))),
            (inner.clone(), signed()).prop_map(|(x, c)| Expr::Pow(b(x), c)),
            inner.clone().prop_map(|x| Expr::Neg(b(x))),
            (func(), inner.clone()).prop_map(|(f, x)| Expr::Call(f, b(x))),
            (inner.clone(), signed()).prop_map(|(x, c)| Expr::Mod(b(x), c)),
            inner.clone().prop_map(|x| Expr::Neg1Pow(b(x))),
            (cmp(), inner.clone(), signed(), inner.clone(), inner).prop_map(|(op, lhs, rhs, x, y)| {
                Expr::If(Box::new(Cond { op, lhs, rhs }), b(x), b(y))
            }),
        ]
    })
}

/// Smooth expressions for derivative checks.
fn smooth_expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![(0.0f64..3.0).prop_map(Expr::Const), Just(Expr::Var)];
    leaf.prop_recursive(6, 48, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(x, y)| Expr::Add(b(x), b(y))),
            (inner.clone(), inner.clone()).prop_map(|(x, y)| Expr::Sub(b(x), b(y))),
            (inner.clone(), inner.clone()).prop_map(|(x, y)| Expr::Mul(b(x), b(y))),
            (inner.clone(), inner.clone()).prop_map(|(x, y)| Expr::Div(b(x), b(y))),
            (inner.clone(), prop_oneof![Just(2.0), Just(3.0), Just(-1.0), Just(0.5)])
                .prop_map(|(x, c)| Expr::Pow(b(x), c)),
            inner.clone().prop_map(|x| Expr::Neg(b(x))),
            (func(), inner).prop_map(|(f, x)| Expr::Call(f, b(x))),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn display_parse_roundtrip(e in any_expr()) {
        let printed = e.to_string();
        let parsed = Expr::parse(&printed);
        prop_assert!(parsed.is_ok(), "{printed}: {:?}", parsed);
        prop_assert_eq!(parsed.unwrap(), e, "{}", printed);
    }

    #[test]
    fn derivative_matches_central_difference(e in smooth_expr(), t in 0.1f64..3.0) {
        let f = |x: f64| e.eval(x).ok().filter(|v| v.is_finite() && v.abs() < 1e6);
        let h = 1e-6;
        let samples = [f(t - 2.0 * h), f(t - h), f(t), f(t + h), f(t + 2.0 * h)];
        prop_assume!(samples.iter().all(Option::is_some));
        let [m2, m1, _, p1, p2] = samples.map(Option::unwrap);
        let fd = (p1 - m1) / (2.0 * h);
        let fd_wide = (p2 - m2) / (4.0 * h);
        // Skip points where the difference quotient itself is unreliable
        // (kinks of abs, near-poles).
        prop_assume!((fd - fd_wide).abs() <= 1e-6 * (1.0 + fd.abs()));
        // Genuine singularities of the derivative, e.g. `(t - t)^0.5`.
        let d = e.differentiate().eval(t);
        prop_assume!(d.is_ok());
        let d = d.unwrap();
        prop_assert!((d - fd).abs() <= 1e-5 * (1.0 + d.abs()), "{e}: {d} vs {fd}");
    }
}

#[test]
fn differentiate_marks_nonsmooth_nodes() {
    let d = Expr::parse("mod(t, 2) + 1").unwrap().differentiate();
    assert!(d.eval(0.5).is_err());
}

mod common;

use common::*;
use proptest::prelude::*;
use tsfloquet::tscalc::nested_simplex_constant;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn discrete_identities(params in discrete_params(6)) {
        let spec = params.build();
        prop_assume!(spec.is_some());
        check_identities(&spec.unwrap(), &[])?;
    }

    #[test]
    fn hybrid_identities(params in hybrid_params(), f in prop::collection::vec(0.0f64..1.0, 2)) {
        let spec = params.build();
        prop_assume!(spec.is_some());
        check_identities(&spec.unwrap(), &f)?;
    }

    #[test]
    fn simplex_volume_bound(params in discrete_params(6), c in 0.1f64..3.0, n in 1usize..6) {
        let spec = params.build();
        prop_assume!(spec.is_some());
        check_simplex(&spec.unwrap(), c, n)?;
    }

    #[test]
    fn simplex_volume_bound_hybrid(params in hybrid_params(), c in 0.1f64..3.0, n in 1usize..6) {
        let spec = params.build();
        prop_assume!(spec.is_some());
        check_simplex(&spec.unwrap(), c, n)?;
    }
}

#[test]
fn simplex_volume_is_exact_on_an_interval() {
    let ts = scale(0.0, 2.0, vec![tsfloquet::Segment::Interval(0.0, 2.0)]);
    for n in 1..6 {
        let v = nested_simplex_constant(1.5, n, 0.0, 2.0, &ts).unwrap();
        let factorial: f64 = (1..=n).map(|k| k as f64).product();
        assert!(rel_close(v, 1.5 * 2f64.powi(n as i32) / factorial, 1e-10));
    }
}

mod common;

use common::*;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn discrete_series_terminates_at_trace(params in discrete_params(6)) {
        let spec = params.build();
        prop_assume!(spec.is_some());
        check_discrete_oracle(&spec.unwrap())?;
    }

    #[test]
    fn enumeration_matches_recursion(params in discrete_params(6)) {
        let spec = params.build();
        prop_assume!(spec.is_some());
        check_enumeration_matches_recursion(&spec.unwrap())?;
    }

    #[test]
    fn gauge_invariance(params in discrete_params(5), seed in prop_oneof![0.2f64..5.0, -5.0f64..-0.2]) {
        let spec = params.build();
        prop_assume!(spec.is_some());
        check_gauge(&spec.unwrap(), seed)?;
    }

    #[test]
    fn hybrid_series_within_bound_of_oracle(params in hybrid_params()) {
        let spec = params.build();
        prop_assume!(spec.is_some());
        check_hybrid_oracle(&spec.unwrap(), 3, 1e-8)?;
    }

    #[test]
    fn terms_respect_term_bound(params in hybrid_params()) {
        let spec = params.build();
        prop_assume!(spec.is_some());
        check_term_bounds(&spec.unwrap())?;
    }
}

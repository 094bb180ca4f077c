mod common;

use common::props;
use common::strategies::{
    fake_case, hat_case, infinitesimal_case, oracle_case, paraboloidal_case, round_trip_case,
    stability_case, start_case,
};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(std::env::var("CASES").ok().and_then(|v| v.parse().ok()).unwrap_or(1000)))]

    #[test]
    fn conormal_and_fake_projection_round_trip(spec in round_trip_case()) {
        props::round_trips(spec)?;
    }

    #[test]
    fn paraboloidal_maps_keep_germs_legendrian((spec, abcd) in paraboloidal_case()) {
        props::paraboloidal(spec, abcd)?;
    }

    #[test]
    fn infinitesimal_extension_is_contact((alpha, beta0, degree) in infinitesimal_case()) {
        props::infinitesimal(alpha, beta0, degree)?;
    }

    #[test]
    fn dimension_is_stable((preset, spec) in stability_case()) {
        props::stability(preset, spec)?;
    }

    #[test]
    fn basis_is_independent_of_the_start_order((preset, spec, start) in start_case()) {
        props::start_independence(preset, spec, start)?;
    }

    #[test]
    fn dense_oracle_agrees((preset, spec, n) in oracle_case()) {
        props::oracle_agreement(preset, spec, n)?;
    }

    #[test]
    fn fake_extensions_reduce_to_zero((spec, n, alpha, beta0) in fake_case()) {
        props::fake_consistency(spec, n, alpha, beta0)?;
    }

    #[test]
    fn hat_extensions_reduce_to_zero((spec, n, alpha, beta0) in hat_case()) {
        props::hat_consistency(spec, n, alpha, beta0)?;
    }
}

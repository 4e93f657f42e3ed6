mod common;

use common::props;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn shapes_are_total_and_unique(m in props::shape_input()) {
        props::shape_total_and_unique(m)?;
    }

    #[test]
    fn head_normal_forms_are_stable(m in props::shape_input()) {
        props::hnf_stable(m)?;
    }

    #[test]
    fn intersection_laws_hold(input in props::laws_input()) {
        props::aci_u_laws(input)?;
    }

    #[test]
    fn wider_universes_keep_proofs(input in props::width_input()) {
        props::width_monotone(input)?;
    }

    #[test]
    fn saturation_agrees_with_naive_closure(input in props::oracle_input()) {
        props::saturation_matches_oracle(input)?;
    }

    #[test]
    fn expansion_round_trips(case in props::expansion_input()) {
        props::expansion_round_trip(case)?;
    }

    #[test]
    fn weakening_and_strengthening_the_basis(case in props::expansion_input()) {
        props::admissible_rules(case)?;
    }

    #[test]
    fn filter_application_is_monotone(input in props::filter_input()) {
        props::filter_apply_monotone(input)?;
    }

    #[test]
    fn stage_plans_cover_every_class(a in props::staging_input()) {
        props::stage_plan_total(a)?;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn reports_are_byte_stable(input in props::report_input()) {
        props::report_deterministic(input)?;
    }
}

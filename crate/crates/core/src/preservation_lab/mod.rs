//! Numerical certification and falsification of geodesic-preserving maps
//! and totally geodesic subsets, with a registry of candidate maps.

pub mod check;
pub mod map;
pub(crate) mod space;
pub mod registry;
pub mod suite;
pub mod totally;

pub use check::{
    check_preserving, fit_residual, PreservationReport, Verdict, Witness, DEFAULT_TOL, FAIL_THRESHOLD,
    POINTS_PER_GEODESIC,
};
pub use map::{CandidateMap, Expected, MapTag, PointFn};
pub use registry::{lookup, registry};
pub use suite::{
    verify, Suite, VerifyOptions, VerifyReport, VerifySummary, DEFAULT_GEODESICS, DEFAULT_PAIRS, VERIFY_SCHEMA,
};
pub use totally::{
    check_totally_geodesic, h2xr_vertical_plane, parallel_witness, tg_suite, ParallelWitness, TgCase,
    TgReport, TgVerdict, DEFAULT_TG_TOL, TG_FAIL_THRESHOLD,
};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry_core::GeometryId;
    use proptest::prelude::*;

    fn map(id: &str) -> CandidateMap {
        lookup(id).unwrap_or_else(|| panic!("no map {id}"))
    }

    #[test]
    fn registry_is_large_with_unique_ids() {
        let maps = registry();
        assert!(maps.len() >= 12);
        let mut ids: Vec<&str> = maps.iter().map(|m| m.id.as_str()).collect();
        ids.sort();
        ids.dedup();
        assert_eq!(ids.len(), maps.len());
        for g in GeometryId::ALL {
            assert!(maps.iter().any(|m| m.geometry == g && m.id.ends_with(".identity")), "{g}");
        }
    }

    #[test]
    fn registered_maps_are_bijections() {
        for m in registry() {
            let d = m.bijection_defect(200, 3);
            assert!(d < 1e-10, "{}: {d}", m.id);
        }
    }

    #[test]
    fn identity_passes_everywhere() {
        for g in GeometryId::ALL {
            let r = check_preserving(&CandidateMap::identity(g), 3, DEFAULT_TOL, 1).unwrap();
            assert_eq!(r.verdict, Verdict::Pass, "{g}: {:?}", r.residuals);
        }
    }

    #[test]
    fn twisting_passes_and_nonlinear_twist_fails() {
        let r = check_preserving(&map("cylinder.twist"), 20, DEFAULT_TOL, 5).unwrap();
        assert_eq!(r.verdict, Verdict::Pass);
        let r = check_preserving(&map("cylinder.nonlinear_twist"), 20, DEFAULT_TOL, 5).unwrap();
        match r.verdict {
            Verdict::Fail { witness } => {
                assert!(witness.residual > FAIL_THRESHOLD);
                assert_eq!(witness.points.len(), POINTS_PER_GEODESIC);
            }
            v => panic!("{v:?}"),
        }
    }

    #[test]
    fn fiber_rotation_fails() {
        let r = check_preserving(&map("s2xr.fiber_rotation"), 4, DEFAULT_TOL, 2).unwrap();
        assert_eq!(r.verdict.name(), "fail");
        assert_eq!(r.verdict.agrees_with(r.expected), Some(true));
    }

    #[test]
    fn winding_and_lifted_isometries_pass_tightly() {
        for id in ["sl2r.winding_2pi", "sl2r.lifted_mobius", "nil.left_translation"] {
            let r = check_preserving(&map(id), 3, 1e-8, 4).unwrap();
            assert_eq!(r.verdict, Verdict::Pass, "{id}: {:?}", r.residuals);
        }
    }

    #[test]
    fn composition_and_inverse_closure() {
        let c = map("h2xr.isometry").compose(&map("h2xr.affine_r")).unwrap();
        assert_eq!(c.expected, Some(Expected::Pass));
        assert_eq!(check_preserving(&c, 3, DEFAULT_TOL, 6).unwrap().verdict, Verdict::Pass);
        let i = map("sol.left_translation").inverse();
        assert_eq!(check_preserving(&i, 3, DEFAULT_TOL, 6).unwrap().verdict, Verdict::Pass);
        assert!(map("nil.rotation").compose(&map("sol.swap")).is_err());
    }

    #[test]
    fn reports_are_deterministic() {
        let m = map("h2xr.isometry");
        let a = serde_json::to_string(&check_preserving(&m, 6, DEFAULT_TOL, 11).unwrap()).unwrap();
        let b = serde_json::to_string(&check_preserving(&m, 6, DEFAULT_TOL, 11).unwrap()).unwrap();
        assert_eq!(a, b);
        assert!(a.contains("\"verdict\":\"pass\""));
    }

    #[test]
    fn rejects_bad_arguments() {
        let m = CandidateMap::identity(GeometryId::E2);
        assert!(check_preserving(&m, 0, DEFAULT_TOL, 0).is_err());
        assert!(check_preserving(&m, 1, 0.0, 0).is_err());
    }

    #[test]
    fn induced_maps_of_products() {
        let m = map("h2xr.affine_r");
        assert_eq!(m.induced_base(&[0.2, 1.5]).unwrap(), vec![0.2, 1.5]);
        assert_eq!(m.induced_height(&[0.2, 1.5], 2.0).unwrap(), 7.0);
        assert!(map("nil.rotation").induced_base(&[0.0, 0.0]).is_err());
    }

    #[test]
    fn parallel_postulate_witness() {
        let w = parallel_witness(360);
        assert!(w.hyperbolic_non_crossing >= 2);
        assert_eq!(w.plane_non_crossing, 1);
        assert!(w.induced_metric_defect < 1e-8);
    }

    #[test]
    fn vertical_and_horizontal_planes_of_h2xr() {
        for case in tg_suite().iter().filter(|c| c.geometry == GeometryId::H2xR) {
            let r = case.run(8, DEFAULT_TG_TOL, 0).unwrap();
            assert_eq!(r.verdict, TgVerdict::Pass, "{}", case.id);
        }
    }

    #[test]
    fn sl2r_horizontal_plane_is_flagged() {
        let case = tg_suite().into_iter().find(|c| c.id == "sl2r.horizontal_plane").unwrap();
        let r = case.run(24, DEFAULT_TG_TOL, 0).unwrap();
        assert_eq!(r.verdict.name(), "fail");
    }

    #[test]
    fn cylinder_suite_matches_predictions() {
        let r = verify(Some(GeometryId::Cylinder), &VerifyOptions::default()).unwrap();
        assert_eq!(r.exit_code(), 0, "{:?}", r.summary);
        assert!(r.totally_geodesic.is_empty());
        assert_eq!(r.schema, VERIFY_SCHEMA);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn twist_affine_compositions_pass(alpha in -3.0f64..3.0, a in 0.2f64..3.0, b in -2.0f64..2.0, neg in any::<bool>()) {
            let a = if neg { -a } else { a };
            let twist = CandidateMap::new("t", GeometryId::Cylinder, vec![MapTag::Twisting], Some(Expected::Pass),
                move |p| vec![(p[0] + alpha * p[1]).rem_euclid(1.0), p[1]],
                move |p| vec![(p[0] - alpha * p[1]).rem_euclid(1.0), p[1]]);
            let affine = CandidateMap::new("a", GeometryId::Cylinder, vec![MapTag::AffineR], Some(Expected::Pass),
                move |p| vec![p[0], a * p[1] + b],
                move |p| vec![p[0], (p[1] - b) / a]);
            let m = twist.compose(&affine).unwrap();
            let r = check_preserving(&m, 6, DEFAULT_TOL, 0).unwrap();
            prop_assert_eq!(r.verdict, Verdict::Pass);
            let r = check_preserving(&m.inverse(), 6, DEFAULT_TOL, 0).unwrap();
            prop_assert_eq!(r.verdict, Verdict::Pass);
        }
    }
}

use curvelift::curve::CurveRef;
use curvelift::experiments::{
    fit_loglog, run_exponent_experiment, run_inequality_campaign, to_json, CampaignKind, DeltaRule, ExperimentConfig,
    MonomialRef, NSchedule,
};
use curvelift::WorkCaps;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig { cases: 256, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn power_laws_are_recovered(p in -3.0f64..3.0, c in 0.01f64..100.0, start in 1u64..50, len in 3usize..20) {
        let data: Vec<(f64, f64)> = (0..len).map(|k| {
            let n = (start + 3 * k as u64) as f64;
            (n, c * n.powf(p))
        }).collect();
        let fit = fit_loglog(&data).unwrap();
        prop_assert!((fit.slope - p).abs() < 1e-9);
    }
}

#[test]
fn reports_are_byte_identical() {
    let cfg = ExperimentConfig::new(
        CurveRef::Name("parabola".into()),
        NSchedule::List(vec![4, 8, 16, 32]),
        DeltaRule::Scaled { d: "2".into(), n: None },
    )
    .with_monomials(MonomialRef::Text("Ms:2".into()));
    let first = to_json(&run_exponent_experiment(&cfg).unwrap()).unwrap();
    for _ in 0..3 {
        assert_eq!(to_json(&run_exponent_experiment(&cfg).unwrap()).unwrap(), first);
    }
    for kind in CampaignKind::ALL {
        let a = to_json(&run_inequality_campaign(kind, 9, 10, WorkCaps::default()).unwrap()).unwrap();
        let b = to_json(&run_inequality_campaign(kind, 9, 10, WorkCaps::default()).unwrap()).unwrap();
        assert_eq!(a, b);
    }
}

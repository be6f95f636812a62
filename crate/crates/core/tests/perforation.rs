use perforate::geometry::DomainSpec;
use perforate::perforation::{
    build_perforated, check_separation, check_separation_exhaustive, hole_measures, measure_sweep, Hole,
    PerforatedDomain,
};
use perforate::process::{sample_marked, ProcessParams, RadiusLaw};
use perforate::sweep::{mean_and_se, sweep_sample};
use proptest::prelude::*;

fn instance(seed: u64, eps: f64, lambda: f64) -> PerforatedDomain {
    let params = ProcessParams::new(lambda, RadiusLaw::Uniform { low: 0.2, high: 1.8 }, seed).unwrap();
    let d = DomainSpec::Box { half_widths: [1.0, 0.8, 0.6] };
    let s = sample_marked(&params, &d.scaled(1.0 / eps), 0).unwrap();
    build_perforated(&d, &s, eps, 2.5).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn hash_matches_all_pairs(seed in 0u64..10_000, eps in 0.1f64..0.25, tau in 1.0f64..4.0, kappa in 1.01f64..1.45) {
        let pd = instance(seed, eps, 3.0);
        prop_assume!(pd.holes().len() <= 1000);
        let fast = check_separation(&pd, tau, kappa, None).unwrap();
        let slow = check_separation_exhaustive(&pd, tau, kappa, None).unwrap();
        prop_assert_eq!(fast, slow);
    }

    #[test]
    fn containment_matches_exhaustive(seed in 0u64..10_000, x in prop::array::uniform3(-1.1f64..1.1)) {
        let pd = instance(seed, 0.2, 1.0);
        prop_assert_eq!(pd.contains(x), pd.contains_exhaustive(x));
        for h in pd.holes().iter().take(5) {
            prop_assert!(!pd.contains(h.center));
            let near = [h.center[0] + 0.9 * h.radius, h.center[1], h.center[2]];
            prop_assert_eq!(pd.contains(near), pd.contains_exhaustive(near));
        }
    }
}

#[test]
fn random_instances_with_forced_violations_agree() {
    // Safety radius 0.11 against mean spacing 0.2: many violations.
    for seed in 0..20 {
        let pd = instance(seed, 0.2, 1.0);
        assert!(pd.holes().len() <= 1000);
        let fast = check_separation(&pd, 3.0, 1.05, None).unwrap();
        let slow = check_separation_exhaustive(&pd, 3.0, 1.05, None).unwrap();
        assert!(slow.pair_violations > 0);
        assert_eq!(fast, slow);
    }
}

#[test]
fn hole_count_matches_filtered_volume() {
    let params = ProcessParams::new(1.0, RadiusLaw::Constant(1.0), 8).unwrap();
    let d = DomainSpec::unit_ball();
    let eps = 0.05;
    let counts: Vec<f64> = (0..20)
        .map(|t| {
            let s = sweep_sample(&params, &d, eps, t, 5e7).unwrap();
            build_perforated(&d, &s, eps, 4.0).unwrap().holes().len() as f64
        })
        .collect();
    let (mean, _) = mean_and_se(&counts);
    // Centers are kept only at distance > eps from the boundary.
    let oracle = d.inner_volume(eps) / eps.powi(3);
    assert!((mean - oracle).abs() <= 0.1 * oracle, "mean = {mean}, oracle = {oracle}");
    let naive = d.volume() / eps.powi(3);
    assert!(mean < naive);
}

#[test]
fn volume_bounded_by_domain_when_separated() {
    let params = ProcessParams::new(1.0, RadiusLaw::Constant(1.0), 2).unwrap();
    let d = DomainSpec::unit_ball();
    for t in 0..5 {
        let s = sweep_sample(&params, &d, 0.1, t, 5e7).unwrap();
        let pd = build_perforated(&d, &s, 0.1, 4.0).unwrap();
        let m = hole_measures(&pd);
        assert!(!m.upper_bound_only);
        assert!(m.total_volume <= d.volume());
        let n = pd.holes().len() as f64;
        assert!((m.total_volume - n * 4.0 / 3.0 * std::f64::consts::PI * 1e-12).abs() < 1e-20 * n.max(1.0));
    }
}

#[test]
fn measure_sweep_slopes() {
    let params = ProcessParams::new(1.0, RadiusLaw::Constant(1.0), 0).unwrap();
    let eps = [0.2, 0.14, 0.1, 0.07];
    let rows = measure_sweep(&params, &DomainSpec::unit_ball(), 4.0, &eps, 10, 5e7).unwrap();
    let vol: Vec<_> = rows.iter().map(|r| (r.eps, r.mean_total_volume)).collect();
    let fit = perforate::fit_rate(&vol, Some(9.0), 0.5).unwrap();
    assert_eq!(fit.pass, Some(true), "slope {}", fit.slope);
    // Constant radii: volume is exactly count * (4pi/3) eps^12.
    for r in &rows {
        let v = r.mean_holes * 4.0 / 3.0 * std::f64::consts::PI * r.eps.powi(12);
        assert!((r.mean_total_volume - v).abs() <= 1e-12 * v);
    }
}

#[test]
fn separation_reference_example() {
    let holes = vec![
        Hole { center: [0.0; 3], radius: 1e-4 },
        Hole { center: [0.001, 0.0, 0.0], radius: 1e-4 },
    ];
    let pd = PerforatedDomain::from_holes(DomainSpec::unit_ball(), 0.1, 4.0, holes).unwrap();
    let rep = check_separation(&pd, 2.0, 1.2, None).unwrap();
    assert_eq!((rep.pair_violations, rep.pass), (1, false));
    assert_eq!(rep.violating_pairs, vec![(0, 1)]);
}

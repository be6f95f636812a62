use perforate::geometry::{scale, DomainSpec};
use perforate::process::{
    filter_phi_eps, passes_phi_eps, sample_count, sample_marked, trial_rng, ProcessParams, RadiusLaw,
};
use perforate::sweep::mean_and_se;
use proptest::prelude::*;

const DRAWS: usize = 100_000;

#[test]
fn poisson_zero_frequency() {
    let mut rng = trial_rng(11, 0);
    let zeros = (0..DRAWS).filter(|_| sample_count(4.0, &mut rng).unwrap() == 0).count();
    let p = (-4.0f64).exp();
    assert!((p - 0.018316).abs() < 1e-6);
    let sd = (DRAWS as f64 * p * (1.0 - p)).sqrt();
    assert!((zeros as f64 - DRAWS as f64 * p).abs() <= 3.0 * sd, "zeros = {zeros}");
}

#[test]
fn poisson_mean_and_variance() {
    let mut rng = trial_rng(12, 0);
    let xs: Vec<f64> = (0..DRAWS).map(|_| sample_count(4.0, &mut rng).unwrap() as f64).collect();
    let n = DRAWS as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    // sd of the sample mean is sqrt(4/n); of the sample variance sqrt((mu4 - s^4)/n) with
    // mu4 = 3*4^2 + 4 for Poisson(4).
    assert!((mean - 4.0).abs() <= 3.0 * (4.0 / n).sqrt(), "mean = {mean}");
    assert!((var - 4.0).abs() <= 3.0 * ((52.0 - 16.0) / n).sqrt(), "var = {var}");
}

#[test]
fn mean_count_in_ball_of_radius_ten() {
    let params = ProcessParams::new(1.0, RadiusLaw::Constant(1.0), 5).unwrap();
    let region = DomainSpec::Ball { radius: 10.0 };
    let counts: Vec<f64> = (0..100).map(|t| sample_marked(&params, &region, t).unwrap().len() as f64).collect();
    let expected = 4.0 / 3.0 * std::f64::consts::PI * 1000.0;
    assert!((expected - 4188.79).abs() < 0.01);
    let (mean, _) = mean_and_se(&counts);
    let sd_of_mean = (expected / 100.0).sqrt();
    assert!((mean - expected).abs() <= 3.0 * sd_of_mean, "mean = {mean}");
}

#[test]
fn points_lie_in_region_with_constant_marks() {
    let params = ProcessParams::new(2.0, RadiusLaw::Constant(1.0), 1).unwrap();
    let region = DomainSpec::Box { half_widths: [3.0, 1.0, 2.0] };
    let s = sample_marked(&params, &region, 0).unwrap();
    assert!(!s.is_empty());
    assert!(s.points.iter().all(|m| region.contains(m.z) && m.r == 1.0));
}

#[test]
fn uniform_marks_have_mean_one_half() {
    let params = ProcessParams::new(1.0, RadiusLaw::Uniform { low: 0.0, high: 1.0 }, 3).unwrap();
    let s = sample_marked(&params, &DomainSpec::Ball { radius: 15.0 }, 0).unwrap();
    let n = s.len() as f64;
    assert!(n >= 1e4);
    let mean = s.points.iter().map(|m| m.r).sum::<f64>() / n;
    assert!((mean - 0.5).abs() <= 3.0 * (1.0 / 12.0 / n).sqrt(), "mean = {mean}");
}

#[test]
fn samples_are_reproducible() {
    let params = ProcessParams::new(1.0, RadiusLaw::Pareto { shape: 2.5 }, 99).unwrap();
    let region = DomainSpec::Ball { radius: 8.0 };
    let a = sample_marked(&params, &region, 4).unwrap();
    let b = sample_marked(&params, &region, 4).unwrap();
    assert_eq!(a, b);
    assert_ne!(a, sample_marked(&params, &region, 5).unwrap());
}

#[cfg(feature = "parallel")]
#[test]
fn samples_independent_of_thread_count() {
    use perforate::perforation::{separation_sweep, SeparationSettings};
    let params = ProcessParams::new(1.0, RadiusLaw::Uniform { low: 0.5, high: 1.5 }, 7).unwrap();
    let d = DomainSpec::unit_ball();
    let settings =
        SeparationSettings { tau: 2.0, kappa: 1.5, moment_exponent: None, oracle_max_holes: 0, point_cap: 5e7 };
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| separation_sweep(&params, &d, 4.0, &[0.2, 0.1], 6, &settings).unwrap())
    };
    assert_eq!(run(1), run(3));
}

#[test]
fn disjoint_boxes_are_uncorrelated() {
    let params = ProcessParams::new(1.0, RadiusLaw::Constant(1.0), 21).unwrap();
    let region = DomainSpec::Box { half_widths: [4.0, 2.0, 2.0] };
    let n = 1000;
    let (mut left, mut right) = (Vec::with_capacity(n), Vec::with_capacity(n));
    for t in 0..n as u64 {
        let s = sample_marked(&params, &region, t).unwrap();
        // [-4,-1] x [-2,2]^2 and [1,4] x [-2,2]^2, volume 48 each.
        left.push(s.points.iter().filter(|m| m.z[0] < -1.0).count() as f64);
        right.push(s.points.iter().filter(|m| m.z[0] > 1.0).count() as f64);
    }
    let (ml, _) = mean_and_se(&left);
    let (mr, _) = mean_and_se(&right);
    let cov = left.iter().zip(&right).map(|(a, b)| (a - ml) * (b - mr)).sum::<f64>() / (n as f64 - 1.0);
    let sl = (left.iter().map(|a| (a - ml).powi(2)).sum::<f64>() / (n as f64 - 1.0)).sqrt();
    let sr = (right.iter().map(|b| (b - mr).powi(2)).sum::<f64>() / (n as f64 - 1.0)).sqrt();
    let corr = cov / (sl * sr);
    // Under independence the sample correlation has sd about 1/sqrt(n).
    assert!(corr.abs() <= 4.0 / (n as f64).sqrt(), "corr = {corr}");
    assert!((ml - 48.0).abs() <= 4.0 * (48.0 / n as f64).sqrt(), "mean = {ml}");
}

fn point() -> impl Strategy<Value = [f64; 3]> {
    prop::array::uniform3(-12.0f64..12.0)
}

proptest! {
    #[test]
    fn filter_is_idempotent(seed in 0u64..1000, eps in 0.08f64..0.3) {
        let params = ProcessParams::new(1.0, RadiusLaw::Constant(1.0), seed).unwrap();
        let d = DomainSpec::Box { half_widths: [1.0, 0.7, 0.5] };
        let s = sample_marked(&params, &d.scaled(1.0 / eps), 0).unwrap();
        let once = filter_phi_eps(&s, &d, eps).unwrap();
        let twice = filter_phi_eps(&once, &d, eps).unwrap();
        prop_assert_eq!(once.points, twice.points);
    }

    #[test]
    fn filter_is_monotone_in_eps(z in point(), e1 in 0.01f64..0.5, e2 in 0.01f64..0.5) {
        let (small, large) = if e1 < e2 { (e1, e2) } else { (e2, e1) };
        let d = DomainSpec::unit_ball();
        // Retained at the coarse scale means retained at the fine scale for the same
        // physical point: compare with z rescaled so that eps*z is fixed.
        let x = scale(z, 1.0 / 12.0);
        if passes_phi_eps(&d, large, scale(x, 1.0 / large)) {
            prop_assert!(passes_phi_eps(&d, small, scale(x, 1.0 / small)));
        }
    }
}

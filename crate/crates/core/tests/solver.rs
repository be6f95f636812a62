use perforate::geometry::DomainSpec;
use perforate::perforation::{Hole, PerforatedDomain};
use perforate::proxy::{build_mask, solve_robin, AffineDatum, MaskedGrid, ProxyProblem, Source};

fn unit_box(h: f64, holes: Vec<Hole>) -> MaskedGrid {
    let pd = PerforatedDomain::from_holes(DomainSpec::Box { half_widths: [0.5; 3] }, 0.1, 4.0, holes).unwrap();
    build_mask(&pd, h).unwrap()
}

fn holes() -> Vec<Hole> {
    vec![
        Hole { center: [0.1, 0.2, -0.05], radius: 0.12 },
        Hole { center: [-0.25, -0.1, 0.2], radius: 0.09 },
        Hole { center: [0.2, -0.25, -0.2], radius: 0.1 },
    ]
}

/// Robin on the x-faces only, `θ₀ = 1` at `x = 0` and `0` at `x = 1` with `x = x_c + 1/2`.
fn slab(source: f64) -> ProxyProblem {
    ProxyProblem {
        datum: AffineDatum { constant: 0.5, gradient: [-1.0, 0.0, 0.0] },
        min_temperature: None,
        source: Source::Uniform(source),
        outer_robin_axes: [true, false, false],
        ..ProxyProblem::default()
    }
}

fn slab_error(h: f64, source: f64, exact: impl Fn(f64) -> f64) -> f64 {
    let mask = unit_box(h, vec![]);
    let sol = solve_robin(&slab(source), &mask).unwrap();
    sol.field
        .interior()
        .map(|(i, v)| (v - exact(mask.lattice.center(i)[0] + 0.5)).abs())
        .fold(0.0, f64::max)
}

#[test]
fn maximum_principle_without_source() {
    let mask = unit_box(1.0 / 24.0, holes());
    let problem = ProxyProblem {
        datum: AffineDatum { constant: 2.0, gradient: [0.6, -0.4, 0.3] },
        source: Source::Uniform(0.0),
        ..ProxyProblem::default()
    };
    let sol = solve_robin(&problem, &mask).unwrap();
    let data: Vec<f64> = mask.faces.iter().map(|f| problem.datum.eval(f.center(&mask.lattice))).collect();
    let lo = data.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = data.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    for (_, v) in sol.field.interior() {
        assert!(v >= lo - 1e-6 && v <= hi + 1e-6, "{v} outside [{lo}, {hi}]");
    }
}

#[test]
fn robin_flux_balances_source() {
    let mask = unit_box(1.0 / 24.0, holes());
    let sol = solve_robin(&ProxyProblem::default(), &mask).unwrap();
    assert!(sol.relative_residual() <= 1e-8);
    assert!((sol.robin_flux - sol.source_total).abs() <= 1e-6 * sol.source_total.abs());
}

#[test]
fn slab_is_linear_and_exact() {
    let err = slab_error(1.0 / 32.0, 0.0, |x| (2.0 - x) / 3.0);
    assert!(err <= 1e-6, "err {err}");
}

#[test]
fn sourced_slab_converges_at_second_order() {
    let exact = |x: f64| -0.5 * x * x + x / 6.0 + 7.0 / 6.0;
    let coarse = slab_error(1.0 / 16.0, 1.0, exact);
    let fine = slab_error(1.0 / 32.0, 1.0, exact);
    let ratio = coarse / fine;
    assert!((3.5..=4.5).contains(&ratio), "errors {coarse} {fine}, ratio {ratio}");
}

#[test]
fn hole_order_does_not_matter() {
    let mut reversed = holes();
    reversed.reverse();
    let a = solve_robin(&ProxyProblem::default(), &unit_box(1.0 / 20.0, holes())).unwrap();
    let b = solve_robin(&ProxyProblem::default(), &unit_box(1.0 / 20.0, reversed)).unwrap();
    assert_eq!(a.field, b.field);
}

#[test]
fn axis_permutation_permutes_the_solution() {
    let swap = |p: [f64; 3]| [p[1], p[0], p[2]];
    let swapped: Vec<Hole> = holes().into_iter().map(|h| Hole { center: swap(h.center), radius: h.radius }).collect();
    let ma = unit_box(1.0 / 20.0, holes());
    let mb = unit_box(1.0 / 20.0, swapped);
    let a = solve_robin(&ProxyProblem::default(), &ma).unwrap();
    let b = solve_robin(&ProxyProblem::default(), &mb).unwrap();
    let mut checked = 0;
    for (i, va) in a.field.interior() {
        let c = ma.lattice.coords(i);
        let j = mb.lattice.index([c[1], c[0], c[2]]);
        assert!((va - b.field.values[j]).abs() <= 1e-7 * va.abs().max(1.0));
        checked += 1;
    }
    assert_eq!(checked, b.field.interior().count());
}

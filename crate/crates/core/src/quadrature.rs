//! Adaptive Simpson quadrature and a fixed spherical rule.

/// Adaptive Simpson with Richardson correction on `[a, b]`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(&f, a, b, fa, fm, fb, whole, tol, 60)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// 26-point Lebedev rule on the unit sphere (exact through degree 7).
/// Weights sum to one, so multiply by the sphere area.
pub fn lebedev26() -> Vec<([f64; 3], f64)> {
    let mut pts = Vec::with_capacity(26);
    let w1 = 1.0 / 21.0;
    let w2 = 4.0 / 105.0;
    let w3 = 27.0 / 840.0;
    for axis in 0..3 {
        for s in [-1.0, 1.0] {
            let mut p = [0.0; 3];
            p[axis] = s;
            pts.push((p, w1));
        }
    }
    let c = std::f64::consts::FRAC_1_SQRT_2;
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        for si in [-1.0, 1.0] {
            for sj in [-1.0, 1.0] {
                let mut p = [0.0; 3];
                p[i] = si * c;
                p[j] = sj * c;
                pts.push((p, w2));
            }
        }
    }
    let d = 1.0 / 3f64.sqrt();
    for sx in [-1.0, 1.0] {
        for sy in [-1.0, 1.0] {
            for sz in [-1.0, 1.0] {
                pts.push(([sx * d, sy * d, sz * d], w3));
            }
        }
    }
    pts
}

//! Deterministic one-dimensional maximization: a coarse grid to bracket the
//! peak, then golden-section refinement.

/// `(√5 - 1) / 2`
const INV_GOLDEN: f64 = 0.618_033_988_749_894_9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Maximum {
    pub x: f64,
    pub value: f64,
    pub iterations: usize,
}

/// Golden-section search for the maximum of a unimodal `f` on `[lo, hi]`,
/// stopping when the bracket is narrower than `tol`.
pub fn golden_section_max(mut f: impl FnMut(f64) -> f64, lo: f64, hi: f64, tol: f64) -> Maximum {
    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut c = b - INV_GOLDEN * (b - a);
    let mut d = a + INV_GOLDEN * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut iterations = 0;
    while (b - a) > tol && iterations < 500 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_GOLDEN * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_GOLDEN * (b - a);
            fd = f(d);
        }
        iterations += 1;
    }
    let x = 0.5 * (a + b);
    Maximum {
        x,
        value: f(x),
        iterations,
    }
}

/// Evaluates `f` on `points` log-spaced nodes over `[lo, hi]` (both
/// positive), then refines around the best node with golden-section search.
pub fn log_grid_then_golden(
    mut f: impl FnMut(f64) -> f64,
    lo: f64,
    hi: f64,
    points: usize,
    tol: f64,
) -> Maximum {
    assert!(lo > 0.0 && hi > lo && points >= 3, "invalid log grid");
    let step = (libm::log(hi) - libm::log(lo)) / (points - 1) as f64;
    let node = |i: usize| libm::exp(libm::log(lo) + step * i as f64);
    let mut best = 0;
    let mut best_value = f64::NEG_INFINITY;
    for i in 0..points {
        let v = f(node(i));
        if v > best_value {
            best = i;
            best_value = v;
        }
    }
    let a = node(best.saturating_sub(1));
    let b = node((best + 1).min(points - 1));
    let refined = golden_section_max(&mut f, a, b, tol);
    if refined.value >= best_value {
        refined
    } else {
        Maximum {
            x: node(best),
            value: best_value,
            iterations: refined.iterations,
        }
    }
}

/// Vertex of the parabola through three equally spaced samples, as an offset
/// from the middle sample in units of the spacing. `None` if the samples are
/// not concave.
pub fn parabolic_vertex(left: f64, mid: f64, right: f64) -> Option<f64> {
    let curvature = left - 2.0 * mid + right;
    if !(curvature < 0.0) {
        return None;
    }
    Some(0.5 * (left - right) / curvature)
}

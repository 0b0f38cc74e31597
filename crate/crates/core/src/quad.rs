//! Adaptive Simpson quadrature.

const MAX_DEPTH: u32 = 48;

/// `∫_a^b f` to relative tolerance `rel_tol` (with a tiny absolute floor).
pub(crate) fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, rel_tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    let tol = (rel_tol * whole.abs()).max(1e-300);
    recurse(f, a, b, fa, fm, fb, whole, tol, rel_tol, MAX_DEPTH)
}

#[allow(clippy::too_many_arguments)]
fn recurse(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    rel_tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let both = left + right;
    let delta = both - whole;
    // the local tolerance follows the refined estimate so small early guesses do not stall
    let tol = tol.max(rel_tol * both.abs() * 0.5);
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return both + delta / 15.0;
    }
    recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, rel_tol, depth - 1)
        + recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, rel_tol, depth - 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_smooth_functions() {
        let v = adaptive_simpson(&|x: f64| x.exp(), 0.0, 3.0, 1e-12);
        assert!((v - (3f64.exp() - 1.0)).abs() < 1e-10);
        let v = adaptive_simpson(&|x: f64| x.sin(), 0.0, std::f64::consts::PI, 1e-12);
        assert!((v - 2.0).abs() < 1e-10);
    }

    #[test]
    fn handles_reversed_and_empty_intervals() {
        let v = adaptive_simpson(&|x: f64| x * x, 1.0, 0.0, 1e-12);
        assert!((v + 1.0 / 3.0).abs() < 1e-12);
        assert_eq!(adaptive_simpson(&|x: f64| x, 2.0, 2.0, 1e-12), 0.0);
    }
}

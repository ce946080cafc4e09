//! Scalar root isolation and one-dimensional minimization kernels.

use crate::scalar::Scalar;

/// Bisection on a bracketing interval: `f(lo)` and `f(hi)` must have opposite
/// signs (or one of them is zero). Refines to interval width `xtol`.
pub fn bisect<S: Scalar>(
    mut lo: S,
    mut hi: S,
    mut flo: S,
    f: &mut impl FnMut(S) -> S,
    xtol: S,
) -> S {
    if flo == S::zero() {
        return lo;
    }
    let half = S::of(0.5);
    for _ in 0..200 {
        if (hi - lo).abs() <= xtol {
            break;
        }
        let mid = (lo + hi) * half;
        if mid <= lo || mid >= hi {
            break; // interval exhausted at this precision
        }
        let fm = f(mid);
        if fm == S::zero() {
            return mid;
        }
        if (fm > S::zero()) == (flo > S::zero()) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    (lo + hi) * half
}

/// Golden-section search for a local minimum of `f` on `[a, b]`.
/// Returns `(x_min, f_min)` once the bracket width is below `xtol`.
pub fn golden_min<S: Scalar>(f: &mut impl FnMut(S) -> S, mut a: S, mut b: S, xtol: S) -> (S, S) {
    let resp = S::of(2.0 - 1.618_033_988_749_895);
    let mut x1 = a + resp * (b - a);
    let mut x2 = b - resp * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..400 {
        if (b - a).abs() <= xtol {
            break;
        }
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = a + resp * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = b - resp * (b - a);
            f2 = f(x2);
        }
    }
    if f1 < f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Newton iteration for a 2x2 system `F(u, v) = 0` with user-supplied
/// residuals and Jacobian. Returns `Some((u, v))` on convergence.
pub fn newton_2d<S: Scalar>(
    mut u: S,
    mut v: S,
    f: &mut impl FnMut(S, S) -> ([S; 2], [[S; 2]; 2]),
    rtol: S,
    max_iter: usize,
) -> Option<(S, S)> {
    for _ in 0..max_iter {
        let (r, jac) = f(u, v);
        if r[0].abs() + r[1].abs() <= rtol {
            return Some((u, v));
        }
        let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
        if det.abs() < S::epsilon() {
            return None;
        }
        let du = (r[0] * jac[1][1] - r[1] * jac[0][1]) / det;
        let dv = (r[1] * jac[0][0] - r[0] * jac[1][0]) / det;
        u = u - du;
        v = v - dv;
        if !u.is_finite() || !v.is_finite() {
            return None;
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisect_cubic_root() {
        // x^3 - x = 1 has a single real root near 1.3247.
        let mut f = |x: f64| x * x * x - x - 1.0;
        let r = bisect(1.0, 2.0, f(1.0), &mut f, 1e-14);
        assert!((r - 1.324_717_957_244_746).abs() < 1e-12);
    }

    #[test]
    fn golden_finds_kinked_minimum() {
        // |x - 0.3| + (x - 0.3)^2 has its minimum at the kink.
        let mut f = |x: f64| (x - 0.3).abs() + (x - 0.3) * (x - 0.3);
        let (x, _) = golden_min(&mut f, -1.0, 1.0, 1e-12);
        assert!((x - 0.3).abs() < 1e-10);
    }

    #[test]
    fn newton_2d_solves_fold_system() {
        // dxE = x^3 - x - t = -1, dxxE = 3x^2 - 1 = 0.
        let mut f = |t: f64, x: f64| {
            (
                [x * x * x - x - t + 1.0, 3.0 * x * x - 1.0],
                [[-1.0, 3.0 * x * x - 1.0], [0.0, 6.0 * x]],
            )
        };
        let (t, x) = newton_2d(1.3, -0.6, &mut f, 1e-14, 50).unwrap();
        let expect_x = -1.0 / 3.0f64.sqrt();
        let expect_t = 1.0 + 2.0 / (3.0 * 3.0f64.sqrt());
        assert!((x - expect_x).abs() < 1e-12);
        assert!((t - expect_t).abs() < 1e-12);
    }
}

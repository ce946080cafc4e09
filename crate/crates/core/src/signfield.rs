//! Smooth sign fields around the completed graph of a monotone driver.
//!
//! `g(t,x)` is zero exactly on the completed graph of `u`, lies in `(0,1]`
//! above it, in `[-1,0)` below it, and saturates to `+1`/`-1` at distance
//! `sharpness` (so in particular for `x >= M` / `x <= -M`). It is built as a
//! flat-ended smooth step of the exact point-to-graph distance, which keeps
//! every jet coefficient closed-form.

use crate::driver::MonotoneDriver;
use crate::error::{Result, RiError};
use crate::jet::Jet3;
use crate::scalar::Scalar;

/// Smooth field with the sign structure of `x - u(t)`; evaluable as [`Jet3`].
#[derive(Clone, Debug)]
pub struct SignField<S> {
    driver: MonotoneDriver<S>,
    bound: S,
    sharpness: S,
}

impl<S: Scalar> SignField<S> {
    pub fn driver(&self) -> &MonotoneDriver<S> {
        &self.driver
    }

    pub fn bound(&self) -> S {
        self.bound
    }

    pub fn sharpness(&self) -> S {
        self.sharpness
    }

    /// Evaluate `g` and its partials at `(t, x)`.
    pub fn eval_jet(&self, t: S, x: S) -> Jet3<S> {
        let left = self.driver.eval(t);
        let right = self.driver.right_limit(t);
        let side = if x > right {
            S::one()
        } else if x < left {
            -S::one()
        } else {
            return Jet3::constant(S::zero());
        };
        let s = self.sharpness;
        let (dist, feature) = nearest_graph_feature(&self.driver, t, x);
        if dist >= s {
            return Jet3::constant(side);
        }
        let r0 = dist / s;
        if r0 <= flat_cut::<S>() {
            // The smooth step is numerically identical to zero here.
            return Jet3::constant(S::zero());
        }
        let step = smooth_step_derivs(r0);
        let r_jet = feature.dist_jet(t, x).scale(S::one() / s);
        r_jet.compose_smooth(&step).scale(side)
    }
}

/// Build the sign field for a driver bounded by `1-M <= u <= M-1`.
///
/// `sharpness` defaults to a quarter of the smallest plateau width (capped at
/// 1 so the saturation sets `|x| >= M` are reached exactly).
pub fn build_sign_field<S: Scalar>(
    driver: MonotoneDriver<S>,
    bound: S,
    sharpness: Option<S>,
) -> Result<SignField<S>> {
    let (lo, hi) = driver.value_range();
    let limit = bound - S::one();
    if lo < -limit || hi > limit {
        let (t, value) = if hi > limit {
            (driver.horizon(), hi)
        } else {
            (S::zero(), lo)
        };
        return Err(RiError::Bound {
            t: t.as_f64(),
            value: value.as_f64(),
            m: bound.as_f64(),
        });
    }
    let default = {
        let w = driver.min_plateau_width() * S::of(0.25);
        if w > S::one() {
            S::one()
        } else {
            w
        }
    };
    let sharpness = sharpness.unwrap_or(default);
    if sharpness <= S::zero() || sharpness > S::one() {
        return Err(RiError::invalid("sharpness must lie in (0, 1]"));
    }
    Ok(SignField {
        driver,
        bound,
        sharpness,
    })
}

/// Below this argument the smooth step underflows to exactly zero (and
/// symmetrically to one near 1), so the flat branches can be taken verbatim.
fn flat_cut<S: Scalar>() -> S {
    S::one() / (S::of(0.98) * (-S::min_positive_value().ln()))
}

/// `[T, T', T'', T''']` of the flat-ended step `T(r) = B(r)/(B(r)+B(1-r))`,
/// `B(r) = exp(-1/r)`, at an interior argument `r` in `(0, 1)`.
fn smooth_step_derivs<S: Scalar>(r: S) -> [S; 4] {
    let cut = flat_cut::<S>();
    if r <= cut {
        return [S::zero(); 4];
    }
    if r >= S::one() - cut {
        return [S::one(), S::zero(), S::zero(), S::zero()];
    }
    let b = bump_derivs(r);
    let mut c = bump_derivs(S::one() - r);
    c[1] = -c[1];
    c[3] = -c[3];
    let denom = [b[0] + c[0], b[1] + c[1], b[2] + c[2], b[3] + c[3]];
    uni_div(b, denom)
}

/// `[B, B', B'', B''']` at `r > 0` for `B(r) = exp(-1/r)`.
fn bump_derivs<S: Scalar>(r: S) -> [S; 4] {
    let ir = S::one() / r;
    let u1 = ir * ir;
    let u2 = S::of(-2.0) * u1 * ir;
    let u3 = S::of(6.0) * u1 * u1;
    let b = (-ir).exp();
    [
        b,
        b * u1,
        b * (u1 * u1 + u2),
        b * (u1 * u1 * u1 + S::of(3.0) * u1 * u2 + u3),
    ]
}

/// Quotient of two univariate derivative tables through order 3.
fn uni_div<S: Scalar>(f: [S; 4], g: [S; 4]) -> [S; 4] {
    let v = f[0] / g[0];
    let d1 = (f[1] - v * g[1]) / g[0];
    let d2 = (f[2] - v * g[2] - S::of(2.0) * d1 * g[1]) / g[0];
    let d3 = (f[3] - v * g[3] - S::of(3.0) * d1 * g[2] - S::of(3.0) * d2 * g[1]) / g[0];
    [v, d1, d2, d3]
}

/// Nearest feature of the completed graph and the distance to it.
enum GraphFeature<S> {
    Horizontal { y: S },
    Vertical { t: S },
    Corner { t: S, y: S },
    Slanted { nt: S, nx: S, offset: S },
}

impl<S: Scalar> GraphFeature<S> {
    fn dist_jet(&self, t: S, x: S) -> Jet3<S> {
        match *self {
            GraphFeature::Horizontal { y } => {
                let d = (x - y).abs();
                let mut j = Jet3::constant(d);
                j.set_partial(0, 1, (x - y).signum());
                j
            }
            GraphFeature::Vertical { t: t0 } => {
                let d = (t - t0).abs();
                let mut j = Jet3::constant(d);
                j.set_partial(1, 0, (t - t0).signum());
                j
            }
            GraphFeature::Corner { t: t0, y } => {
                let dt = t - t0;
                let dx = x - y;
                let mut q = Jet3::constant(dt * dt + dx * dx);
                q.set_partial(1, 0, S::of(2.0) * dt);
                q.set_partial(0, 1, S::of(2.0) * dx);
                q.set_partial(2, 0, S::of(2.0));
                q.set_partial(0, 2, S::of(2.0));
                q.sqrt()
            }
            GraphFeature::Slanted { nt, nx, offset } => {
                let signed = nt * t + nx * x - offset;
                let d = signed.abs();
                let sg = signed.signum();
                let mut j = Jet3::constant(d);
                j.set_partial(1, 0, sg * nt);
                j.set_partial(0, 1, sg * nx);
                j
            }
        }
    }
}

fn hypot2<S: Scalar>(a: S, b: S) -> S {
    (a * a + b * b).sqrt()
}

fn clamp_dist<S: Scalar>(v: S, lo: S, hi: S) -> S {
    if v < lo {
        lo - v
    } else if v > hi {
        v - hi
    } else {
        S::zero()
    }
}

fn nearest_graph_feature<S: Scalar>(driver: &MonotoneDriver<S>, t: S, x: S) -> (S, GraphFeature<S>) {
    match driver {
        MonotoneDriver::Staircase { base, jumps } => staircase_nearest(*base, jumps, t, x),
        MonotoneDriver::Cantor { jumps, .. } => staircase_nearest(S::zero(), jumps, t, x),
        MonotoneDriver::Table { points } => table_nearest(points, t, x),
    }
}

/// Exact distance to the completed staircase graph (plateaus plus risers).
/// Levels are indexed so that plateau `p` has height `lev(p)` on times
/// `(T(p), T(p+1))` with `T(0) = -inf`, `T(n+1) = +inf`.
fn staircase_nearest<S: Scalar>(
    base: S,
    jumps: &[(S, S)],
    t: S,
    x: S,
) -> (S, GraphFeature<S>) {
    let n = jumps.len();
    let lev = |p: usize| -> S {
        if p == 0 {
            base
        } else {
            jumps[p - 1].1
        }
    };
    let inf = S::infinity();
    let time = |p: usize| -> S {
        // left endpoint of plateau p
        if p == 0 {
            -inf
        } else {
            jumps[p - 1].0
        }
    };
    let time_end = |p: usize| -> S {
        if p == n {
            inf
        } else {
            jumps[p].0
        }
    };

    // Plateau containing t (left-continuous convention at jump times).
    let p_t = jumps.partition_point(|&(tj, _)| tj < t);

    let mut best = S::infinity();
    let mut feat = GraphFeature::Horizontal { y: lev(p_t) };

    // A projection hitting a segment endpoint is a corner feature even when
    // one offset vanishes: the distance there is locally Euclidean-to-point,
    // not distance-to-line, and the second derivatives differ.
    let consider_plateau = |p: usize, best: &mut S, feat: &mut GraphFeature<S>| {
        let dt = clamp_dist(t, time(p), time_end(p));
        let dy = (x - lev(p)).abs();
        let d = hypot2(dt, dy);
        if d < *best {
            *best = d;
            *feat = if dt == S::zero() {
                GraphFeature::Horizontal { y: lev(p) }
            } else {
                GraphFeature::Corner {
                    t: if t < time(p) { time(p) } else { time_end(p) },
                    y: lev(p),
                }
            };
        }
    };
    let consider_riser = |i: usize, best: &mut S, feat: &mut GraphFeature<S>| {
        // riser i joins plateau i-1 and plateau i at time T(i) = jumps[i-1].0
        let tj = jumps[i - 1].0;
        let dt = (t - tj).abs();
        let dy = clamp_dist(x, lev(i - 1), lev(i));
        let d = hypot2(dt, dy);
        if d < *best {
            *best = d;
            *feat = if dy == S::zero() {
                GraphFeature::Vertical { t: tj }
            } else {
                GraphFeature::Corner {
                    t: tj,
                    y: if x < lev(i - 1) { lev(i - 1) } else { lev(i) },
                }
            };
        }
    };

    consider_plateau(p_t, &mut best, &mut feat);
    if x < lev(p_t) {
        // Below the graph: walk backwards to the plateau just below x.
        let mut p = p_t;
        while p > 0 {
            // Everything at or before plateau p-1 is at least this far in time.
            let gate = t - time_end(p - 1);
            if gate >= best {
                break;
            }
            consider_riser(p, &mut best, &mut feat);
            consider_plateau(p - 1, &mut best, &mut feat);
            if lev(p - 1) <= x {
                break;
            }
            p -= 1;
        }
    } else if x > lev(p_t) {
        // Above the graph: walk forward.
        let mut p = p_t;
        while p < n {
            let gate = time(p + 1) - t;
            if gate >= best {
                break;
            }
            consider_riser(p + 1, &mut best, &mut feat);
            consider_plateau(p + 1, &mut best, &mut feat);
            if lev(p + 1) >= x {
                break;
            }
            p += 1;
        }
    }
    (best, feat)
}

/// Distance to a piecewise-linear monotone graph, extended horizontally
/// beyond its first and last knots.
fn table_nearest<S: Scalar>(points: &[(S, S)], t: S, x: S) -> (S, GraphFeature<S>) {
    let n = points.len();
    let mut best = S::infinity();
    let mut feat = GraphFeature::Horizontal { y: points[0].1 };

    // Extension rays.
    {
        let dt = clamp_dist(t, -S::infinity(), points[0].0);
        let dy = (x - points[0].1).abs();
        let d = hypot2(dt, dy);
        if d < best {
            best = d;
            feat = if dt == S::zero() {
                GraphFeature::Horizontal { y: points[0].1 }
            } else {
                GraphFeature::Corner {
                    t: points[0].0,
                    y: points[0].1,
                }
            };
        }
        let dt = clamp_dist(t, points[n - 1].0, S::infinity());
        let dy = (x - points[n - 1].1).abs();
        let d = hypot2(dt, dy);
        if d < best {
            best = d;
            feat = if dt == S::zero() {
                GraphFeature::Horizontal { y: points[n - 1].1 }
            } else {
                GraphFeature::Corner {
                    t: points[n - 1].0,
                    y: points[n - 1].1,
                }
            };
        }
    }

    for w in points.windows(2) {
        let (t0, y0) = w[0];
        let (t1, y1) = w[1];
        let (et, ey) = (t1 - t0, y1 - y0);
        let len2 = et * et + ey * ey;
        let lam = ((t - t0) * et + (x - y0) * ey) / len2;
        if lam <= S::zero() || lam >= S::one() {
            let (ct, cy) = if lam <= S::zero() { (t0, y0) } else { (t1, y1) };
            let d = hypot2(t - ct, x - cy);
            if d < best {
                best = d;
                feat = GraphFeature::Corner { t: ct, y: cy };
            }
        } else {
            let len = len2.sqrt();
            // Unit normal (-ey, et)/len; signed offset so that n . p = offset on the line.
            let (nt, nx) = (-ey / len, et / len);
            let offset = nt * t0 + nx * y0;
            let d = (nt * t + nx * x - offset).abs();
            if d < best {
                best = d;
                feat = GraphFeature::Slanted { nt, nx, offset };
            }
        }
    }
    (best, feat)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::driver::cantor_driver;

    fn constant_field(m: f64) -> SignField<f64> {
        let u = MonotoneDriver::staircase(0.0, vec![]).unwrap();
        build_sign_field(u, m, None).unwrap()
    }

    #[test]
    fn sign_clauses_constant_driver() {
        let g = constant_field(2.0);
        assert_eq!(g.eval_jet(0.3, 0.0).value(), 0.0);
        let above = g.eval_jet(0.3, 1.0).value();
        assert!(above > 0.0 && above <= 1.0);
        let below = g.eval_jet(0.3, -1.0).value();
        assert!(below < 0.0 && below >= -1.0);
        assert_eq!(g.eval_jet(0.7, 2.0).value(), 1.0);
        assert_eq!(g.eval_jet(0.7, -2.0).value(), -1.0);
    }

    #[test]
    fn saturation_is_exact() {
        let g = constant_field(2.0);
        // distance >= sharpness saturates exactly, not approximately
        assert_eq!(g.eval_jet(0.1, 0.35).value(), 1.0);
        assert_eq!(g.eval_jet(0.1, 0.35).dx(), 0.0);
        assert_eq!(g.eval_jet(0.9, -5.0).value(), -1.0);
    }

    #[test]
    fn single_step_graph_moves() {
        // u = 1 for t > 1/2 (step of height 1), M = 3
        let u = MonotoneDriver::staircase(0.0, vec![(0.5, 1.0)]).unwrap();
        let g = build_sign_field(u, 3.0, None).unwrap();
        assert!(g.eval_jet(0.25, 0.5).value() > 0.0);
        assert!(g.eval_jet(0.75, 0.5).value() < 0.0);
    }

    #[test]
    fn cantor_zero_on_graph() {
        let u = cantor_driver::<f64>(3).unwrap();
        let g = build_sign_field(u.clone(), 3.0, None).unwrap();
        for i in 0..50 {
            let t = (i as f64 + 0.5) / 50.0;
            let v = g.eval_jet(t, u.eval(t)).value();
            assert!(v.abs() <= 1e-8, "g(t,u(t)) = {v} at t = {t}");
        }
    }

    #[test]
    fn jets_flat_on_graph() {
        // all derivatives of g vanish on the completed graph
        let u = cantor_driver::<f64>(3).unwrap();
        let g = build_sign_field(u.clone(), 3.0, None).unwrap();
        let t = 0.5;
        let j = g.eval_jet(t, u.eval(t));
        assert_eq!(j.dx(), 0.0);
        assert_eq!(j.dt(), 0.0);
        assert_eq!(j.dxx(), 0.0);
    }

    #[test]
    fn step_derivatives_match_finite_differences() {
        // interior smooth-step derivatives agree with central differences
        for &r in &[0.2, 0.5, 0.77] {
            let d = smooth_step_derivs::<f64>(r);
            let h = 1e-5;
            let f = |r: f64| smooth_step_derivs::<f64>(r)[0];
            let fd1 = (f(r + h) - f(r - h)) / (2.0 * h);
            let fd2 = (f(r + h) - 2.0 * f(r) + f(r - h)) / (h * h);
            assert!((d[1] - fd1).abs() < 1e-6 * d[1].abs().max(1.0));
            assert!((d[2] - fd2).abs() < 1e-4 * d[2].abs().max(1.0));
        }
        assert_eq!(smooth_step_derivs::<f64>(0.0005), [0.0; 4]);
        let top = smooth_step_derivs::<f64>(0.9995);
        assert_eq!(top[0], 1.0);
        assert_eq!(top[1], 0.0);
    }

    #[test]
    fn distance_to_staircase_corner() {
        let u = MonotoneDriver::staircase(0.0, vec![(1.0, 1.0)]).unwrap();
        // point below-right of the corner (1, 0): Euclidean distance
        let (d, _) = staircase_nearest(0.0, u.jumps(), 1.3, -0.4, );
        assert!((d - (0.09f64 + 0.16).sqrt()).abs() < 1e-14);
        // directly below a plateau
        let (d, _) = staircase_nearest(0.0, u.jumps(), 0.4, -0.25);
        assert!((d - 0.25).abs() < 1e-14);
        // right of the riser, inside its value span
        let (d, _) = staircase_nearest(0.0, u.jumps(), 1.5, 0.5);
        assert!((d - 0.5).abs() < 1e-14);
    }
}

//! Numerical verdicts for the non-degeneracy hypotheses H1..H5 on a box:
//! trace the curves `∂ₓE = ±1` slice by slice, locate points where the
//! hypothesis's auxiliary equalities vanish, and estimate the uniform
//! stationary-gap `ε` that bounds jump sizes from below.

use rayon::prelude::*;

use crate::error::{Result, RiError};
use crate::model::{EnergyModel, GradX, Rect, StationaryPoint};
use crate::rootfind::bisect;
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Hypothesis {
    H1,
    H2,
    H3,
    H4,
    H5,
}

impl Hypothesis {
    pub fn all() -> [Hypothesis; 5] {
        [
            Hypothesis::H1,
            Hypothesis::H2,
            Hypothesis::H3,
            Hypothesis::H4,
            Hypothesis::H5,
        ]
    }

    pub fn label(&self) -> &'static str {
        match self {
            Hypothesis::H1 => "H1",
            Hypothesis::H2 => "H2",
            Hypothesis::H3 => "H3",
            Hypothesis::H4 => "H4",
            Hypothesis::H5 => "H5",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "H1" => Ok(Hypothesis::H1),
            "H2" => Ok(Hypothesis::H2),
            "H3" => Ok(Hypothesis::H3),
            "H4" => Ok(Hypothesis::H4),
            "H5" => Ok(Hypothesis::H5),
            other => Err(RiError::invalid(format!("unknown hypothesis `{other}`"))),
        }
    }

    /// Auxiliary equalities (beyond `∂ₓE ∈ {-1,1}`) defining the degenerate
    /// set, as residual functions of the gradient jet.
    fn residuals<S: Scalar>(&self, g: &GradX<S>) -> Vec<S> {
        match self {
            // ∂ₓₓE = ∂ₓₓₓE = 0
            Hypothesis::H1 => vec![g.dx, g.dxx],
            // ∂ₓₓE = ∂ₓₜE = 0 and (∂ₓₓₜE)^2 = ∂ₓₜₜE ∂ₓₓₓE (nested filter)
            Hypothesis::H2 => vec![g.dx, g.dt, g.dxt * g.dxt - g.dtt * g.dxx],
            // ∂ₓₓE = ∂ₓₜE = 0
            Hypothesis::H3 => vec![g.dx, g.dt],
            // ∂ₓₜE = ∂ₓₜₜE = 0
            Hypothesis::H4 => vec![g.dt, g.dtt],
            // ∂ₓₓE = 0
            Hypothesis::H5 => vec![g.dx],
        }
    }

    /// Indices (into the gradient jet) of the aux functions whose zeros are
    /// traced along branches; the discriminant of H2 is only checked at
    /// points already passing the other equalities.
    fn traced<S: Scalar>(&self, g: &GradX<S>) -> Vec<S> {
        match self {
            Hypothesis::H1 => vec![g.dx, g.dxx],
            Hypothesis::H2 | Hypothesis::H3 => vec![g.dx, g.dt],
            Hypothesis::H4 => vec![g.dt, g.dtt],
            Hypothesis::H5 => vec![g.dx],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    Fails,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Holds => "holds",
            Verdict::Fails => "fails",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

/// A located degenerate point with the residual norm of its defining
/// equalities (including `|∂ₓE| - 1`).
#[derive(Clone, Copy, Debug)]
pub struct DegeneratePoint<S> {
    pub t: S,
    pub x: S,
    pub residual: S,
}

#[derive(Clone, Debug)]
pub struct HypothesisEntry<S> {
    pub hypothesis: Hypothesis,
    pub verdict: Verdict,
    pub points: Vec<DegeneratePoint<S>>,
    /// Candidate cells that did not refine to a point at this resolution.
    pub unresolved: usize,
    /// Growth diagnostic: located points plus unresolved cells.
    pub candidate_count: usize,
    pub resolution: usize,
    pub residual_tol: S,
}

/// Residual tolerance for accepting a located degenerate point.
fn residual_tol<S: Scalar>() -> S {
    S::tol_floor(1e-6)
}

/// Decide a hypothesis on `rect` at the given resolution: trace `∂ₓE = ±1`
/// on midpoint time slices, then hunt zeros of the auxiliary conditions
/// directly at the roots, by sign change along tracked branches, and at
/// branch collisions (root-count changes).
pub fn check_hypothesis<S: Scalar>(
    model: &EnergyModel<S>,
    which: Hypothesis,
    rect: Rect<S>,
    resolution: usize,
) -> Result<HypothesisEntry<S>> {
    if resolution < 8 {
        return Err(RiError::invalid("check_hypothesis needs resolution >= 8"));
    }
    let n = resolution;
    let dt_slice = (rect.t_hi - rect.t_lo) / S::of(n as f64);
    let slices: Vec<S> = (0..n)
        .map(|i| rect.t_lo + dt_slice * S::of(i as f64 + 0.5))
        .collect();
    let roots: Vec<Vec<StationaryPoint<S>>> = slices
        .par_iter()
        .map(|&t| model.stationary_set(t, (rect.x_lo, rect.x_hi), n))
        .collect::<Result<Vec<_>>>()?;

    let tol = residual_tol::<S>();
    let near_miss = S::of(1e-2);
    let x_span = rect.x_hi - rect.x_lo;
    let cell = x_span / S::of(n as f64);
    let mut located: Vec<DegeneratePoint<S>> = Vec::new();
    let mut unresolved = 0usize;

    // Channel 1: the root itself already satisfies the aux equalities (this
    // is how a continuum of degenerate points shows up slice by slice).
    for (i, slice_roots) in roots.iter().enumerate() {
        for p in slice_roots {
            let g = model.grad_x(slices[i], p.x)?;
            let r = full_residual(model, which, slices[i], p.x, &g);
            if r <= tol {
                located.push(DegeneratePoint {
                    t: slices[i],
                    x: p.x,
                    residual: r,
                });
            }
        }
    }

    // Channels 2 and 3 between consecutive slices, separately per sign.
    for i in 0..n.saturating_sub(1) {
        for sign in [1i8, -1i8] {
            let a: Vec<S> = roots[i].iter().filter(|p| p.sign == sign).map(|p| p.x).collect();
            let b: Vec<S> = roots[i + 1]
                .iter()
                .filter(|p| p.sign == sign)
                .map(|p| p.x)
                .collect();
            let sigma = S::of(sign as f64);
            match a.len() as isize - b.len() as isize {
                0 => {
                    for (ra, rb) in a.iter().zip(b.iter()) {
                        trace_branch(
                            model,
                            which,
                            slices[i],
                            slices[i + 1],
                            *ra,
                            *rb,
                            sigma,
                            cell,
                            tol,
                            near_miss,
                            &mut located,
                            &mut unresolved,
                        )?;
                    }
                }
                2 => {
                    // a pair of roots died: collision inside
                    if let Some((ra, rb)) = dying_pair(&a, &b) {
                        collision_point(
                            model,
                            which,
                            slices[i],
                            slices[i + 1],
                            ra,
                            rb,
                            sigma,
                            cell,
                            tol,
                            near_miss,
                            false,
                            &mut located,
                            &mut unresolved,
                        )?;
                    } else {
                        unresolved += 1;
                    }
                }
                -2 => {
                    // a pair of roots was born
                    if let Some((ra, rb)) = dying_pair(&b, &a) {
                        collision_point(
                            model,
                            which,
                            slices[i],
                            slices[i + 1],
                            ra,
                            rb,
                            sigma,
                            cell,
                            tol,
                            near_miss,
                            true,
                            &mut located,
                            &mut unresolved,
                        )?;
                    } else {
                        unresolved += 1;
                    }
                }
                1 | -1 => {
                    // single root entered or left through the box edge
                }
                _ => {
                    unresolved += 1;
                }
            }
        }
    }

    // Deduplicate points that several channels located.
    located.sort_by(|p, q| {
        (p.t, p.x)
            .partial_cmp(&(q.t, q.x))
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let t_span = rect.t_hi - rect.t_lo;
    let merge_t = t_span * S::of(1e-9);
    let merge_x = x_span * S::of(1e-9);
    let mut dedup: Vec<DegeneratePoint<S>> = Vec::new();
    for p in located {
        if let Some(last) = dedup.last() {
            if (p.t - last.t).abs() <= merge_t && (p.x - last.x).abs() <= merge_x {
                continue;
            }
        }
        dedup.push(p);
    }

    let verdict = if !dedup.is_empty() {
        Verdict::Fails
    } else if unresolved > 0 {
        Verdict::Inconclusive
    } else {
        Verdict::Holds
    };
    Ok(HypothesisEntry {
        hypothesis: which,
        verdict,
        candidate_count: dedup.len() + unresolved,
        points: dedup,
        unresolved,
        resolution,
        residual_tol: tol,
    })
}

/// Max-norm residual of the full defining set at `(t, x)`.
fn full_residual<S: Scalar>(
    _model: &EnergyModel<S>,
    which: Hypothesis,
    _t: S,
    _x: S,
    g: &GradX<S>,
) -> S {
    let mut r = (g.v.abs() - S::one()).abs();
    for c in which.residuals(g) {
        if c.abs() > r {
            r = c.abs();
        }
    }
    r
}

/// Continue the root of `∂ₓE = σ` near `x_guess` at time `t`, bracketing in
/// a window of half-width `w`.
fn continue_root<S: Scalar>(
    model: &EnergyModel<S>,
    t: S,
    x_guess: S,
    w: S,
    sigma: S,
) -> Option<S> {
    let lo = x_guess - w;
    let hi = x_guess + w;
    let f = |x: S| -> S {
        model
            .grad_x(t, x)
            .map(|g| g.v - sigma)
            .unwrap_or(S::nan())
    };
    let flo = f(lo);
    let fhi = f(hi);
    if !flo.is_finite() || !fhi.is_finite() {
        return None;
    }
    if flo == S::zero() {
        return Some(lo);
    }
    if fhi == S::zero() {
        return Some(hi);
    }
    if (flo > S::zero()) == (fhi > S::zero()) {
        return None;
    }
    let mut g = f;
    Some(bisect(lo, hi, flo, &mut g, w * S::tol_floor(1e-12)))
}

/// Channel 2: look for sign changes of each traced aux function along a
/// branch tracked from `(t0, r0)` to `(t1, r1)`.
#[allow(clippy::too_many_arguments)]
fn trace_branch<S: Scalar>(
    model: &EnergyModel<S>,
    which: Hypothesis,
    t0: S,
    t1: S,
    r0: S,
    r1: S,
    sigma: S,
    cell: S,
    tol: S,
    near_miss: S,
    located: &mut Vec<DegeneratePoint<S>>,
    unresolved: &mut usize,
) -> Result<()> {
    let g0 = model.grad_x(t0, r0)?;
    let g1 = model.grad_x(t1, r1)?;
    let a0 = which.traced(&g0);
    let a1 = which.traced(&g1);
    let w = (r1 - r0).abs() + cell * S::of(4.0);
    for idx in 0..a0.len() {
        let (v0, v1) = (a0[idx], a1[idx]);
        if v0 == S::zero() || v1 == S::zero() {
            continue; // already caught by the direct channel
        }
        if (v0 > S::zero()) == (v1 > S::zero()) {
            continue;
        }
        // bisect in t along the branch
        let mut failed = false;
        let mut phi = |t: S| -> S {
            let lam = (t - t0) / (t1 - t0);
            let guess = r0 + (r1 - r0) * lam;
            match continue_root(model, t, guess, w, sigma) {
                Some(x) => match model.grad_x(t, x) {
                    Ok(g) => which.traced(&g)[idx],
                    Err(_) => {
                        failed = true;
                        S::nan()
                    }
                },
                None => {
                    failed = true;
                    S::nan()
                }
            }
        };
        let t_tol = (t1 - t0) * S::tol_floor(1e-10);
        let t_c = bisect(t0, t1, v0, &mut phi, t_tol);
        if failed {
            *unresolved += 1;
            continue;
        }
        let lam = (t_c - t0) / (t1 - t0);
        let guess = r0 + (r1 - r0) * lam;
        if let Some(x_c) = continue_root(model, t_c, guess, w, sigma) {
            let g = model.grad_x(t_c, x_c)?;
            let r = full_residual(model, which, t_c, x_c, &g);
            if r <= tol {
                located.push(DegeneratePoint {
                    t: t_c,
                    x: x_c,
                    residual: r,
                });
            } else if r <= near_miss {
                *unresolved += 1;
            }
        } else {
            *unresolved += 1;
        }
    }
    Ok(())
}

/// Pick the adjacent pair in `longer` whose removal best aligns it with
/// `shorter` (order-preserving), returning the pair.
fn dying_pair<S: Scalar>(longer: &[S], shorter: &[S]) -> Option<(S, S)> {
    if longer.len() != shorter.len() + 2 || longer.len() < 2 {
        return None;
    }
    let mut best: Option<(S, usize)> = None;
    for k in 0..longer.len() - 1 {
        // remove entries k, k+1
        let mut cost = S::zero();
        let mut li = 0usize;
        for (si, &sv) in shorter.iter().enumerate() {
            if li == k {
                li += 2;
            }
            let _ = si;
            cost = cost + (longer[li] - sv).abs();
            li += 1;
        }
        if best.map(|(c, _)| cost < c).unwrap_or(true) {
            best = Some((cost, k));
        }
    }
    best.map(|(_, k)| (longer[k], longer[k + 1]))
}

/// Channel 3: localize a branch collision (two roots merging) by bisecting
/// the root count over the window, then the curvature zero between the pair.
#[allow(clippy::too_many_arguments)]
fn collision_point<S: Scalar>(
    model: &EnergyModel<S>,
    which: Hypothesis,
    t0: S,
    t1: S,
    ra: S,
    rb: S,
    sigma: S,
    cell: S,
    tol: S,
    near_miss: S,
    reversed: bool,
    located: &mut Vec<DegeneratePoint<S>>,
    unresolved: &mut usize,
) -> Result<()> {
    let w_lo = ra - (rb - ra) * S::of(0.5) - cell * S::of(4.0);
    let w_hi = rb + (rb - ra) * S::of(0.5) + cell * S::of(4.0);
    let count = |t: S| -> usize {
        let m = 512usize;
        let step = (w_hi - w_lo) / S::of(m as f64);
        let mut prev = model
            .grad_x(t, w_lo)
            .map(|g| g.v - sigma)
            .unwrap_or(S::nan());
        let mut c = 0usize;
        for k in 1..=m {
            let x = w_lo + step * S::of(k as f64);
            let cur = model.grad_x(t, x).map(|g| g.v - sigma).unwrap_or(S::nan());
            if prev.is_finite() && cur.is_finite() && prev != S::zero() {
                if (prev > S::zero()) != (cur > S::zero()) {
                    c += 1;
                }
            }
            prev = cur;
        }
        c
    };
    // indicator: +1 while the pair exists, -1 after it merged
    let mut phi = |t: S| -> S {
        if count(t) >= 2 {
            S::one()
        } else {
            -S::one()
        }
    };
    let (lo, hi, flo) = if reversed {
        (t0, t1, -S::one())
    } else {
        (t0, t1, S::one())
    };
    let t_tol = (t1 - t0) * S::tol_floor(1e-9);
    let t_c = bisect(lo, hi, flo, &mut phi, t_tol);
    // pick the side that still has both roots to bracket the curvature zero
    let t_pair = if reversed {
        t_c + t_tol * S::of(4.0)
    } else {
        t_c - t_tol * S::of(4.0)
    };
    let (x1, x2) = match two_roots(model, t_pair, w_lo, w_hi, sigma) {
        Some(p) => p,
        None => {
            *unresolved += 1;
            return Ok(());
        }
    };
    let f = |x: S| -> S { model.grad_x(t_c, x).map(|g| g.dx).unwrap_or(S::nan()) };
    let f1 = f(x1);
    let f2 = f(x2);
    let x_c = if f1.is_finite() && f2.is_finite() && (f1 > S::zero()) != (f2 > S::zero()) {
        let mut g = f;
        bisect(x1, x2, f1, &mut g, (x2 - x1).abs() * S::tol_floor(1e-10))
    } else {
        (x1 + x2) * S::of(0.5)
    };
    let g = model.grad_x(t_c, x_c)?;
    let r = full_residual(model, which, t_c, x_c, &g);
    if r <= tol {
        located.push(DegeneratePoint {
            t: t_c,
            x: x_c,
            residual: r,
        });
    } else if r <= near_miss {
        *unresolved += 1;
    }
    Ok(())
}

fn two_roots<S: Scalar>(
    model: &EnergyModel<S>,
    t: S,
    lo: S,
    hi: S,
    sigma: S,
) -> Option<(S, S)> {
    let m = 512usize;
    let step = (hi - lo) / S::of(m as f64);
    let f = |x: S| -> S { model.grad_x(t, x).map(|g| g.v - sigma).unwrap_or(S::nan()) };
    let mut found: Vec<S> = Vec::new();
    let mut prev_x = lo;
    let mut prev = f(lo);
    for k in 1..=m {
        let x = lo + step * S::of(k as f64);
        let cur = f(x);
        if prev.is_finite() && cur.is_finite() && prev != S::zero() && (prev > S::zero()) != (cur > S::zero())
        {
            let mut g = f;
            found.push(bisect(prev_x, x, prev, &mut g, step * S::tol_floor(1e-10)));
        }
        prev = cur;
        prev_x = x;
    }
    if found.len() >= 2 {
        Some((found[0], found[found.len() - 1]))
    } else {
        None
    }
}

/// Uniform lower bound on the spacing of the stationary set over sampled
/// times; `Infinite` when no sampled slice carries two stationary points.
#[derive(Clone, Copy, Debug)]
pub enum GapEstimate<S> {
    Infinite,
    Finite { epsilon: S, t: S, pair: (S, S) },
}

pub fn estimate_gap<S: Scalar>(
    model: &EnergyModel<S>,
    rect: Rect<S>,
    time_resolution: usize,
    state_resolution: usize,
) -> Result<GapEstimate<S>> {
    if time_resolution < 2 || state_resolution < 2 {
        return Err(RiError::invalid("estimate_gap needs resolutions >= 2"));
    }
    let dt = (rect.t_hi - rect.t_lo) / S::of((time_resolution - 1) as f64);
    let slices: Vec<S> = (0..time_resolution)
        .map(|i| rect.t_lo + dt * S::of(i as f64))
        .collect();
    let per_slice: Vec<(S, Vec<StationaryPoint<S>>)> = slices
        .par_iter()
        .map(|&t| {
            model
                .stationary_set(t, (rect.x_lo, rect.x_hi), state_resolution)
                .map(|r| (t, r))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut best: Option<(S, S, (S, S))> = None;
    for (t, roots) in per_slice {
        for w in roots.windows(2) {
            let gap = w[1].x - w[0].x;
            if best.map(|(e, _, _)| gap < e).unwrap_or(true) {
                best = Some((gap, t, (w[0].x, w[1].x)));
            }
        }
    }
    Ok(match best {
        None => GapEstimate::Infinite,
        Some((epsilon, t, pair)) => GapEstimate::Finite { epsilon, t, pair },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rect(t0: f64, t1: f64, x0: f64, x1: f64) -> Rect<f64> {
        Rect::new(t0, t1, x0, x1)
    }

    #[test]
    fn h5_holds_for_quadratic() {
        let m = EnergyModel::<f64>::quadratic();
        let e = check_hypothesis(&m, Hypothesis::H5, rect(0.0, 2.0, -3.0, 3.0), 64).unwrap();
        assert_eq!(e.verdict, Verdict::Holds, "{:?}", e.points);
    }

    #[test]
    fn h5_fails_for_double_well_at_the_fold() {
        let m = EnergyModel::<f64>::double_well();
        let e = check_hypothesis(&m, Hypothesis::H5, rect(0.0, 2.0, -2.0, 2.0), 128).unwrap();
        assert_eq!(e.verdict, Verdict::Fails);
        let t_star = 1.0 + 2.0 / (3.0 * 3.0f64.sqrt());
        let x_star = -1.0 / 3.0f64.sqrt();
        let hit = e
            .points
            .iter()
            .any(|p| (p.t - t_star).abs() < 1e-4 && (p.x - x_star).abs() < 1e-4);
        assert!(hit, "points: {:?}", e.points);
        // mirror image
        let t_m = 1.0 - 2.0 / (3.0 * 3.0f64.sqrt());
        let hit_m = e
            .points
            .iter()
            .any(|p| (p.t - t_m).abs() < 1e-4 && (p.x + x_star).abs() < 1e-4);
        assert!(hit_m, "mirror point missing: {:?}", e.points);
    }

    #[test]
    fn h1_holds_for_double_well() {
        // dxxE = dxxxE = 0 needs x = 1/sqrt(3) and x = 0 at once: impossible
        let m = EnergyModel::<f64>::double_well();
        let e = check_hypothesis(&m, Hypothesis::H1, rect(0.0, 2.0, -2.0, 2.0), 128).unwrap();
        assert_eq!(e.verdict, Verdict::Holds, "{:?}", e.points);
    }

    #[test]
    fn h3_h4_hold_for_double_well() {
        let m = EnergyModel::<f64>::double_well();
        for h in [Hypothesis::H2, Hypothesis::H3, Hypothesis::H4] {
            let e = check_hypothesis(&m, h, rect(0.0, 2.0, -2.0, 2.0), 64).unwrap();
            assert_eq!(e.verdict, Verdict::Holds, "{h:?}: {:?}", e.points);
        }
    }

    #[test]
    fn gap_quadratic_is_two() {
        let m = EnergyModel::<f64>::quadratic();
        match estimate_gap(&m, rect(0.0, 2.0, -3.0, 3.0), 32, 512).unwrap() {
            GapEstimate::Finite { epsilon, pair, .. } => {
                assert!((epsilon - 2.0).abs() < 1e-6, "gap {epsilon} pair {pair:?}");
            }
            GapEstimate::Infinite => panic!("expected a finite gap"),
        }
    }

    #[test]
    fn gap_zero_model_infinite() {
        let m = EnergyModel::<f64>::zero();
        assert!(matches!(
            estimate_gap(&m, rect(0.0, 2.0, -3.0, 3.0), 8, 64).unwrap(),
            GapEstimate::Infinite
        ));
    }

    #[test]
    fn resolution_doubling_keeps_failures() {
        let m = EnergyModel::<f64>::double_well();
        let lo = check_hypothesis(&m, Hypothesis::H5, rect(0.0, 2.0, -2.0, 2.0), 64).unwrap();
        let hi = check_hypothesis(&m, Hypothesis::H5, rect(0.0, 2.0, -2.0, 2.0), 128).unwrap();
        assert_eq!(lo.verdict, Verdict::Fails);
        assert_eq!(hi.verdict, Verdict::Fails);
        assert!(hi.points.len() >= lo.points.len());
    }
}

//! Trajectory audits: weak-solution conditions, jump detection, dissipation,
//! point classification with one-sided derivative laws, and the numerical
//! SBV decomposition (absolutely continuous / jump / Cantor split).

use crate::error::{Result, RiError};
use crate::local::{check_upper_bound, UpperBoundCheck};
use crate::model::EnergyModel;
use crate::scalar::Scalar;
use crate::trajectory::{Regime, Trajectory};

/// A detected jump: merged run of consecutive over-threshold increments with
/// one-sided limits extrapolated from up to three neighboring samples
/// (windows clipped at adjacent jumps).
#[derive(Clone, Copy, Debug)]
pub struct DetectedJump<S> {
    pub t: S,
    pub left: S,
    pub right: S,
    /// first and last sample index of the jump run
    pub first: usize,
    pub last: usize,
}

impl<S: Scalar> DetectedJump<S> {
    pub fn size(&self) -> S {
        (self.right - self.left).abs()
    }
}

/// Default detect_jumps threshold: `5 * median |Δx|` floored at ten times the
/// state tolerance.
pub fn default_jump_threshold<S: Scalar>(traj: &Trajectory<S>, state_tol: S) -> S {
    let mut incs: Vec<S> = traj
        .values()
        .windows(2)
        .map(|w| (w[1] - w[0]).abs())
        .collect();
    incs.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let median = if incs.is_empty() {
        S::zero()
    } else {
        incs[incs.len() / 2]
    };
    let floor = state_tol * S::of(10.0);
    let t = median * S::of(5.0);
    if t > floor {
        t
    } else {
        floor
    }
}

/// Consecutive-sample increments exceeding `threshold`, merged when adjacent.
pub fn detect_jumps<S: Scalar>(traj: &Trajectory<S>, threshold: S) -> Vec<DetectedJump<S>> {
    let t = traj.times();
    let x = traj.values();
    let n = x.len();
    let mut flagged: Vec<(usize, usize)> = Vec::new();
    let mut i = 0;
    while i + 1 < n {
        if (x[i + 1] - x[i]).abs() > threshold {
            let start = i;
            let mut end = i + 1;
            while end + 1 < n && (x[end + 1] - x[end]).abs() > threshold {
                end += 1;
            }
            flagged.push((start, end));
            i = end;
        }
        i += 1;
    }

    let mut jumps = Vec::with_capacity(flagged.len());
    for (k, &(start, end)) in flagged.iter().enumerate() {
        // extrapolation windows stop at the neighboring jump runs
        let lo_clip = if k > 0 { flagged[k - 1].1 } else { 0 };
        let hi_clip = if k + 1 < flagged.len() {
            flagged[k + 1].0
        } else {
            n - 1
        };
        let t_jump = (t[start] + t[end]) * S::of(0.5);
        let left = one_sided_extrapolate(t, x, start, lo_clip, t_jump, true);
        let right = one_sided_extrapolate(t, x, end, hi_clip, t_jump, false);
        jumps.push(DetectedJump {
            t: t_jump,
            left,
            right,
            first: start,
            last: end,
        });
    }
    jumps
}

/// Least-squares line through up to three samples on one side of a jump,
/// evaluated at the jump time.
fn one_sided_extrapolate<S: Scalar>(
    t: &[S],
    x: &[S],
    anchor: usize,
    clip: usize,
    t_jump: S,
    left_side: bool,
) -> S {
    let mut idx: Vec<usize> = Vec::with_capacity(3);
    if left_side {
        let lo = anchor.saturating_sub(2).max(clip);
        for i in lo..=anchor {
            idx.push(i);
        }
    } else {
        let hi = (anchor + 2).min(clip);
        for i in anchor..=hi {
            idx.push(i);
        }
    }
    match idx.len() {
        0 => x[anchor],
        1 => x[idx[0]],
        _ => {
            let n = S::of(idx.len() as f64);
            let mut mt = S::zero();
            let mut mx = S::zero();
            for &i in &idx {
                mt = mt + t[i];
                mx = mx + x[i];
            }
            mt = mt / n;
            mx = mx / n;
            let mut num = S::zero();
            let mut den = S::zero();
            for &i in &idx {
                num = num + (t[i] - mt) * (x[i] - mx);
                den = den + (t[i] - mt) * (t[i] - mt);
            }
            if den == S::zero() {
                mx
            } else {
                let slope = num / den;
                mx + slope * (t_jump - mt)
            }
        }
    }
}

/// Pointwise-variation dissipation over `[t1, t2]`: exact sum over the grid
/// samples inside the window (the sup over partitions of sampled data).
pub fn dissipation<S: Scalar>(traj: &Trajectory<S>, t1: S, t2: S) -> Result<S> {
    if t1 > t2 {
        return Err(RiError::invalid("dissipation needs t1 <= t2"));
    }
    let (lo, hi) = traj.span();
    let slack = (hi - lo) * S::epsilon() * S::of(64.0);
    if t1 < lo - slack || t2 > hi + slack {
        return Err(RiError::invalid("dissipation window outside the grid span"));
    }
    let t = traj.times();
    let x = traj.values();
    let first = t.partition_point(|&ti| ti < t1 - slack);
    let last = t.partition_point(|&ti| ti <= t2 + slack);
    let mut acc = S::zero();
    for i in first + 1..last {
        acc = acc + (x[i] - x[i - 1]).abs();
    }
    Ok(acc)
}

/// Weak-solution audit: worst `|∂ₓE| - 1` over non-jump samples plus the
/// energy-dissipation upper bound.
#[derive(Clone, Copy, Debug)]
pub struct WeakCheck<S> {
    pub stability_worst_t: S,
    pub stability_worst: S,
    pub upper: UpperBoundCheck<S>,
    pub pass: bool,
}

pub fn verify_weak<S: Scalar>(
    model: &EnergyModel<S>,
    traj: &Trajectory<S>,
    tol: S,
) -> Result<WeakCheck<S>> {
    let mut worst = S::neg_infinity();
    let mut worst_t = traj.times()[0];
    for i in 0..traj.len() {
        if traj.regimes()[i] == Regime::Jump {
            continue;
        }
        let t = traj.times()[i];
        let g = model.grad_x(t, traj.values()[i])?;
        let r = g.v.abs() - S::one();
        if r > worst {
            worst = r;
            worst_t = t;
        }
    }
    let upper = check_upper_bound(model, traj, 20_000, tol)?;
    Ok(WeakCheck {
        stability_worst_t: worst_t,
        stability_worst: worst,
        upper,
        pass: worst <= tol && upper.pass,
    })
}

/// Classification of an audited time per the derivative structure:
/// `I3` differentiable, `I2` distinct one-sided derivatives, `I1` one side
/// zero and the other not converging, `J` jump.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PointClass {
    I1,
    I2,
    I3,
    J,
}

impl PointClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            PointClass::I1 => "I1",
            PointClass::I2 => "I2",
            PointClass::I3 => "I3",
            PointClass::J => "J",
        }
    }
}

/// One-sided difference-quotient verdict at three dyadic refinements.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SideEstimate<S> {
    /// Quotients contract geometrically; value is the Richardson estimate.
    Converged(S),
    /// Magnitudes grow by a factor >= 2 per refinement.
    Divergent,
    /// Neither criterion met at this resolution.
    Unresolved,
}

impl<S: Scalar> SideEstimate<S> {
    pub fn value(&self) -> Option<S> {
        match self {
            SideEstimate::Converged(v) => Some(*v),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct ClassEntry<S> {
    pub index: usize,
    pub t: S,
    pub class: PointClass,
    pub left: SideEstimate<S>,
    pub right: SideEstimate<S>,
    /// `-∂ₓₜE/∂ₓₓE` where the branch formula applies (`|∂ₓE|` near 1 and
    /// positive curvature).
    pub slide_prediction: Option<S>,
    /// Relative mismatch of the measured derivative against the prediction.
    pub slide_residual: Option<S>,
    /// Residual of the one-sided derivative quadratic at I2 points.
    pub quad_residual: Option<S>,
    pub resolution_limited: bool,
}

#[derive(Clone, Debug)]
pub struct ClassificationReport<S> {
    pub entries: Vec<ClassEntry<S>>,
    pub jump_times: Vec<S>,
}

impl<S: Scalar> ClassificationReport<S> {
    pub fn count(&self, class: PointClass) -> usize {
        self.entries.iter().filter(|e| e.class == class).count()
    }
}

fn side_estimate<S: Scalar>(quotients: [Option<S>; 3], tol: S) -> SideEstimate<S> {
    let (q1, q2, q4) = match quotients {
        [Some(a), Some(b), Some(c)] => (a, b, c),
        [Some(a), Some(b), None] => {
            // short stencil near the boundary: accept if already close
            return if (a - b).abs() <= tol * S::of(10.0) * scale1(a) {
                SideEstimate::Converged(S::of(2.0) * a - b)
            } else {
                SideEstimate::Unresolved
            };
        }
        _ => return SideEstimate::Unresolved,
    };
    let diff12 = (q1 - q2).abs();
    let diff24 = (q2 - q4).abs();
    if diff12 <= S::of(0.65) * diff24 + tol * scale1(q1) {
        return SideEstimate::Converged(S::of(2.0) * q1 - q2);
    }
    let big = tol * S::of(100.0);
    if q1.abs() >= S::of(2.0) * q2.abs() && q2.abs() >= S::of(2.0) * q4.abs() && q1.abs() > big {
        return SideEstimate::Divergent;
    }
    SideEstimate::Unresolved
}

fn scale1<S: Scalar>(v: S) -> S {
    if v.abs() > S::one() {
        v.abs()
    } else {
        S::one()
    }
}

/// Classify every sample against the derivative laws: slide formula
/// `x' = -∂ₓₜE/∂ₓₓE`, the one-sided quadratic
/// `∂ₓₜₜE + 2 ∂ₓₓₜE X + ∂ₓₓₓE X² = 0` at I2 points, and neighboring-slope
/// limits as fallback when the quadratic degenerates.
pub fn classify_points<S: Scalar>(
    model: &EnergyModel<S>,
    traj: &Trajectory<S>,
    tol: S,
) -> Result<ClassificationReport<S>> {
    let times = traj.times();
    let values = traj.values();
    let n = times.len();
    let jumps = traj.jumps();
    let jump_window = |i: usize| -> bool {
        jumps.iter().any(|j| {
            let k = traj.index_at(j.t);
            i + 4 >= k && i <= k + 4
        })
    };

    let quotient = |i: usize, m: usize, left: bool| -> Option<S> {
        if left {
            if i < m {
                return None;
            }
            Some((values[i] - values[i - m]) / (times[i] - times[i - m]))
        } else {
            if i + m >= n {
                return None;
            }
            Some((values[i + m] - values[i]) / (times[i + m] - times[i]))
        }
    };

    let mut entries = Vec::with_capacity(n);
    for i in 0..n {
        let t = times[i];
        if jump_window(i) {
            entries.push(ClassEntry {
                index: i,
                t,
                class: PointClass::J,
                left: SideEstimate::Unresolved,
                right: SideEstimate::Unresolved,
                slide_prediction: None,
                slide_residual: None,
                quad_residual: None,
                resolution_limited: false,
            });
            continue;
        }
        let left = side_estimate([quotient(i, 1, true), quotient(i, 2, true), quotient(i, 4, true)], tol);
        let right = side_estimate(
            [
                quotient(i, 1, false),
                quotient(i, 2, false),
                quotient(i, 4, false),
            ],
            tol,
        );

        let g = model.grad_x(t, values[i])?;
        let on_branch = (g.v.abs() - S::one()).abs() <= S::of(10.0) * tol;
        let slide_prediction = if on_branch && g.dx > tol {
            Some(-g.dt / g.dx)
        } else {
            None
        };

        let mut resolution_limited = false;
        let class = match (left, right) {
            (SideEstimate::Converged(l), SideEstimate::Converged(r)) => {
                if (l - r).abs() <= tol * S::of(10.0) * scale1(l) {
                    PointClass::I3
                } else {
                    PointClass::I2
                }
            }
            (SideEstimate::Converged(l), _) if l.abs() <= S::of(10.0) * tol => PointClass::I1,
            (_, SideEstimate::Converged(r)) if r.abs() <= S::of(10.0) * tol => PointClass::I1,
            _ => {
                resolution_limited = true;
                PointClass::I3
            }
        };

        // derivative estimate used for the slide-law residual
        let est = match (left.value(), right.value()) {
            (Some(l), Some(r)) if class == PointClass::I3 => Some((l + r) * S::of(0.5)),
            (Some(l), None) => Some(l),
            (None, Some(r)) => Some(r),
            (Some(l), Some(_)) => Some(l),
            _ => None,
        };
        let slide_residual = match (slide_prediction, est) {
            (Some(p), Some(e)) if class == PointClass::I3 => Some((e - p).abs() / scale1(p)),
            _ => None,
        };

        // I2: each one-sided derivative must solve the quadratic or match
        // the neighboring-slope limit
        let mut quad_residual = None;
        if class == PointClass::I2 {
            let (l, r) = (left.value().unwrap(), right.value().unwrap());
            let a = g.dtt;
            let b = S::of(2.0) * g.dxt;
            let c = g.dxx;
            let coeff_scale = scale1(a.abs() + b.abs() + c.abs());
            let degenerate = a.abs() + b.abs() + c.abs() <= S::of(100.0) * tol;
            let qres = |s: S| (a + b * s + c * s * s).abs() / coeff_scale;
            if !degenerate {
                let worst = if qres(l) > qres(r) { qres(l) } else { qres(r) };
                quad_residual = Some(worst);
                if worst > S::of(10.0) * tol {
                    resolution_limited = true;
                }
            } else {
                // neighbor-slope limits
                let lim_l = quotient(i.saturating_sub(1).max(1), 1, true);
                let lim_r = if i + 1 < n {
                    quotient(i + 1, 1, false)
                } else {
                    None
                };
                let ok_l = lim_l.map(|v| (v - l).abs() <= S::of(10.0) * tol * scale1(l));
                let ok_r = lim_r.map(|v| (v - r).abs() <= S::of(10.0) * tol * scale1(r));
                if ok_l != Some(true) || ok_r != Some(true) {
                    resolution_limited = true;
                }
                quad_residual = Some(S::zero());
            }
        }

        entries.push(ClassEntry {
            index: i,
            t,
            class,
            left,
            right,
            slide_prediction,
            slide_residual,
            quad_residual,
            resolution_limited,
        });
    }

    Ok(ClassificationReport {
        entries,
        jump_times: jumps.iter().map(|j| j.t).collect(),
    })
}

/// Numerical SBV decomposition via a resolution ladder.
#[derive(Clone, Debug)]
pub struct SbvSplit<S> {
    pub total: S,
    pub ac: S,
    pub jump: S,
    pub cantor: S,
    /// Cantor estimate per ladder rung (coarse to fine).
    pub per_rung: Vec<S>,
    pub is_sbv: bool,
    /// Cantor estimates non-increasing along the ladder (within slack).
    pub converged: bool,
}

/// Split the trajectory's variation into absolutely-continuous, jump and
/// Cantor parts. The AC part sums increments over cells whose difference
/// quotients are stable under one coarsening; the jump part keeps detected
/// jumps that persist (do not split) across the ladder; the Cantor estimate
/// is the remainder.
pub fn sbv_split<S: Scalar>(traj: &Trajectory<S>, ladder: &[usize]) -> Result<SbvSplit<S>> {
    if ladder.len() < 2 {
        return Err(RiError::invalid("sbv_split needs a ladder of >= 2 rungs"));
    }
    for w in ladder.windows(2) {
        if w[1] <= w[0] {
            return Err(RiError::invalid("ladder must be strictly increasing"));
        }
    }
    let x = traj.values();
    let t = traj.times();
    let n = x.len();
    let total = traj.total_variation();
    let x_scale = {
        let mut lo = x[0];
        let mut hi = x[0];
        for &v in x {
            if v < lo {
                lo = v;
            }
            if v > hi {
                hi = v;
            }
        }
        (hi - lo).abs() + S::tol_floor(1e-12)
    };

    // Jump candidates at the finest sampling with a floor threshold, kept
    // only when the increment does not split at the coarsest rung.
    let floor = x_scale * S::of(1e-8);
    let candidates = detect_jumps(traj, floor);
    let coarsest_stride = stride_for(n, ladder[0]);
    let mut jump = S::zero();
    let mut kept: Vec<DetectedJump<S>> = Vec::new();
    for c in candidates {
        let lo = (c.first / coarsest_stride) * coarsest_stride;
        let hi = (((c.last + coarsest_stride - 1) / coarsest_stride) * coarsest_stride).min(n - 1);
        let coarse = (x[hi] - x[lo]).abs();
        let fine = c.size();
        if fine >= S::of(0.5) * coarse && fine > floor {
            jump = jump + fine;
            kept.push(c);
        }
    }

    let mut per_rung = Vec::with_capacity(ladder.len());
    let mut ac_finest = S::zero();
    for (ri, &res) in ladder.iter().enumerate() {
        let s = stride_for(n, res);
        let mut ac = S::zero();
        let mut k = 0usize;
        while k + s < n {
            let a = k;
            let b = k + s;
            let qa = (x[b] - x[a]) / (t[b] - t[a]);
            let lo = a.saturating_sub(s);
            let hi = (b + s).min(n - 1);
            let qb = (x[hi] - x[lo]) / (t[hi] - t[lo]);
            let stable = (qa - qb).abs()
                <= S::of(0.25) * qa.abs().max(qb.abs()) + x_scale * S::of(1e-9) / (t[b] - t[a]);
            let in_jump = kept.iter().any(|j| j.first < b && j.last >= a);
            if stable && !in_jump {
                ac = ac + (x[b] - x[a]).abs();
            }
            k += s;
        }
        per_rung.push(total - ac - jump);
        if ri + 1 == ladder.len() {
            ac_finest = ac;
        }
    }

    let cantor = total - ac_finest - jump;
    let slack = total * S::of(0.02) + S::tol_floor(1e-9);
    let converged = per_rung.windows(2).all(|w| w[1] <= w[0] + slack);
    let tiny = S::tol_floor(1e-12);
    let denom = if total > tiny { total } else { tiny };
    let is_sbv = cantor <= S::of(0.1) * denom;
    Ok(SbvSplit {
        total,
        ac: ac_finest,
        jump,
        cantor,
        per_rung,
        is_sbv,
        converged,
    })
}

fn stride_for(n: usize, resolution: usize) -> usize {
    ((n - 1) / resolution.max(1)).max(1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trajectory::JumpRecord;

    fn traj_from(values: Vec<f64>) -> Trajectory<f64> {
        let times: Vec<f64> = (0..values.len()).map(|i| i as f64 * 0.1).collect();
        let regimes = vec![Regime::Incremental; values.len()];
        Trajectory::new(times, values, regimes, vec![]).unwrap()
    }

    #[test]
    fn staircase_jumps_detected_with_clean_limits() {
        let traj = traj_from(vec![0.0, 0.0, 0.0, 0.5, 0.5, 0.75, 0.75]);
        let jumps = detect_jumps(&traj, 0.1);
        assert_eq!(jumps.len(), 2);
        assert!((jumps[0].size() - 0.5).abs() < 1e-12, "{:?}", jumps[0]);
        assert!((jumps[1].size() - 0.25).abs() < 1e-12, "{:?}", jumps[1]);
    }

    #[test]
    fn smooth_ramp_has_no_jumps() {
        let n = 100;
        let values: Vec<f64> = (0..n).map(|i| i as f64 * 0.1).collect();
        let traj = traj_from(values);
        // slope 1 sampled at dt = 0.1; threshold 10*dt
        assert!(detect_jumps(&traj, 1.0).is_empty());
    }

    #[test]
    fn adjacent_increments_merge() {
        let traj = traj_from(vec![0.0, 0.3, 0.6, 0.6, 0.6]);
        let jumps = detect_jumps(&traj, 0.2);
        assert_eq!(jumps.len(), 1);
        assert!((jumps[0].size() - 0.6).abs() < 1e-12);
    }

    #[test]
    fn dissipation_monotone_and_staircase() {
        let traj = traj_from(vec![0.0, 0.0, 0.0, 0.5, 0.5, 0.75, 0.75]);
        let d = dissipation(&traj, 0.0, 0.6).unwrap();
        assert_eq!(d, 0.75);
        let monotone = traj_from(vec![0.0, 0.2, 0.5, 0.9]);
        assert_eq!(dissipation(&monotone, 0.0, 0.3).unwrap(), 0.9);
    }

    #[test]
    fn dissipation_additive_on_grid_points() {
        let traj = traj_from(vec![0.0, 1.0, 0.5, 0.7, 0.2, 0.9]);
        let a = dissipation(&traj, 0.0, 0.2).unwrap();
        let b = dissipation(&traj, 0.2, 0.5).unwrap();
        let full = dissipation(&traj, 0.0, 0.5).unwrap();
        assert_eq!(a + b, full);
        // lower bound by endpoint difference
        assert!(full >= (0.9f64 - 0.0).abs());
    }

    #[test]
    fn classify_constant_trajectory_i3() {
        let m = EnergyModel::<f64>::zero();
        let values = vec![0.5; 41];
        let times: Vec<f64> = (0..41).map(|i| i as f64 * 0.05).collect();
        let traj =
            Trajectory::new(times, values, vec![Regime::Stick; 41], vec![]).unwrap();
        let report = classify_points(&m, &traj, 1e-3).unwrap();
        for e in &report.entries {
            assert_eq!(e.class, PointClass::I3, "at t={}", e.t);
            if let Some(v) = e.left.value() {
                assert!(v.abs() < 1e-9);
            }
        }
    }

    #[test]
    fn classify_synthetic_i1() {
        // left side identically zero, right side with unbounded quotients
        let n = 41;
        let mid = 20usize;
        let times: Vec<f64> = (0..n).map(|i| i as f64 * 0.05).collect();
        let values: Vec<f64> = (0..n)
            .map(|i| {
                if i <= mid {
                    0.0
                } else {
                    let s = (i - mid) as f64 * 0.05;
                    // cusp: quotients scale like s^(-2/3) -> magnitudes double
                    s.powf(1.0 / 3.0) * 0.2
                }
            })
            .collect();
        let traj =
            Trajectory::new(times, values, vec![Regime::Incremental; n], vec![]).unwrap();
        let m = EnergyModel::<f64>::zero();
        let report = classify_points(&m, &traj, 1e-4).unwrap();
        let e = &report.entries[mid];
        assert_eq!(e.class, PointClass::I1, "{:?}", e);
    }

    #[test]
    fn sbv_split_smooth_is_ac() {
        let n = 2049;
        let times: Vec<f64> = (0..n).map(|i| i as f64 / (n - 1) as f64).collect();
        let values: Vec<f64> = times.iter().map(|&t| (t * 3.0).sin() * 0.5 + t).collect();
        let traj =
            Trajectory::new(times, values, vec![Regime::Incremental; n], vec![]).unwrap();
        let split = sbv_split(&traj, &[64, 128, 256, 512]).unwrap();
        assert!(split.is_sbv);
        assert!(
            split.cantor <= 0.01 * split.total,
            "cantor {} of {}",
            split.cantor,
            split.total
        );
        assert!(split.jump == 0.0);
    }

    #[test]
    fn sbv_split_staircase_is_jump() {
        let n = 2049;
        let times: Vec<f64> = (0..n).map(|i| i as f64 / (n - 1) as f64).collect();
        let values: Vec<f64> = times
            .iter()
            .map(|&t| if t < 0.3 { 0.0 } else if t < 0.7 { 0.6 } else { 1.0 })
            .collect();
        let traj =
            Trajectory::new(times, values, vec![Regime::Incremental; n], vec![]).unwrap();
        let split = sbv_split(&traj, &[64, 128, 256, 512]).unwrap();
        assert!(split.is_sbv);
        assert!(split.jump >= 0.95 * split.total);
        assert!(split.cantor.abs() <= 0.05 * split.total);
    }

    #[test]
    fn sbv_parts_sum_to_total() {
        let traj = traj_from(vec![0.0, 0.1, 0.5, 0.5, 0.8, 1.2, 1.2, 1.3]);
        let split = sbv_split(&traj, &[2, 4]).unwrap();
        let sum = split.ac + split.jump + split.cantor;
        assert!((sum - split.total).abs() <= 1e-9 * split.total.max(1.0));
    }

    #[test]
    fn verify_weak_flags_unstable_state() {
        let m = EnergyModel::<f64>::double_well();
        let times: Vec<f64> = (0..21).map(|i| i as f64 * 0.1).collect();
        let values = vec![0.0; 21];
        let traj =
            Trajectory::new(times, values, vec![Regime::Stick; 21], vec![]).unwrap();
        let check = verify_weak(&m, &traj, 1e-6).unwrap();
        // |dxE(2, 0)| = 2 > 1
        assert!(!check.pass);
        assert!((check.stability_worst - 1.0).abs() < 1e-9);
    }

    #[test]
    fn jump_records_map_to_j_class() {
        let m = EnergyModel::<f64>::zero();
        let times: Vec<f64> = (0..30).map(|i| i as f64 * 0.1).collect();
        let mut values = vec![0.0; 30];
        for v in values.iter_mut().skip(15) {
            *v = 1.0;
        }
        let jumps = vec![JumpRecord {
            t: 1.45,
            left: 0.0,
            right: 1.0,
        }];
        let traj =
            Trajectory::new(times, values, vec![Regime::Incremental; 30], jumps).unwrap();
        let report = classify_points(&m, &traj, 1e-3).unwrap();
        assert!(report.entries.iter().any(|e| e.class == PointClass::J));
        assert_eq!(report.jump_times.len(), 1);
    }
}

//! Local (weak) solutions by explicit regime switching: stick while
//! `|∂ₓE| < 1`, slide along `∂ₓE = ±1` with `x' = -∂ₓₜE/∂ₓₓE`, and jump in
//! the downhill direction when the branch loses convexity at a fold.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Result, RiError};
use crate::model::{EnergyModel, GradX};
use crate::rootfind::{bisect, newton_2d};
use crate::scalar::Scalar;
use crate::trajectory::{Event, EventKind, JumpRecord, Regime, Trajectory};

/// Tolerances of the regime machine.
#[derive(Clone, Copy, Debug)]
pub struct LocalTolerances<S> {
    /// Band around `|∂ₓE| = 1` separating stick / branch / unstable.
    pub stability: S,
    /// Curvature threshold below which the branch counts as folded.
    pub fold: S,
    /// Allowed `|∂ₓE - σ|` after projecting a slide step back to the branch.
    pub slide: S,
    /// Bisection tolerance in `t` for activation and fold events.
    pub event_t: S,
    /// Grid cells for the landing search at a fold.
    pub landing_resolution: usize,
}

impl<S: Scalar> Default for LocalTolerances<S> {
    fn default() -> Self {
        LocalTolerances {
            stability: S::tol_floor(1e-6),
            fold: S::tol_floor(1e-8),
            slide: S::tol_floor(1e-9),
            event_t: S::tol_floor(1e-10),
            landing_resolution: 4096,
        }
    }
}

/// Pointwise regime classification.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RegimeClass {
    Stick,
    SlidePlus,
    SlideMinus,
    Fold,
    Unstable,
}

/// Classify `(t, x)`: stick strictly inside `|∂ₓE| < 1`, slide on the branch
/// with positive curvature, fold on the branch with vanishing curvature,
/// unstable beyond the band (or on the branch at a strict maximum).
pub fn detect_regime<S: Scalar>(
    model: &EnergyModel<S>,
    t: S,
    x: S,
    tols: &LocalTolerances<S>,
) -> Result<RegimeClass> {
    let g = model.grad_x(t, x)?;
    let a = g.v.abs();
    if a < S::one() - tols.stability {
        return Ok(RegimeClass::Stick);
    }
    if a > S::one() + tols.stability {
        return Ok(RegimeClass::Unstable);
    }
    if g.dx.abs() <= tols.fold {
        return Ok(RegimeClass::Fold);
    }
    if g.dx > tols.fold {
        if g.v > S::zero() {
            Ok(RegimeClass::SlidePlus)
        } else {
            Ok(RegimeClass::SlideMinus)
        }
    } else {
        // On the branch at a strict maximum of E: not admissible.
        Ok(RegimeClass::Unstable)
    }
}

/// State of the regime machine at the current time.
#[derive(Clone, Copy, Debug)]
pub struct RegimeState<S> {
    pub regime: RegimeClass,
    pub last_event_t: S,
    pub last_event: Option<EventKind>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Mode<S> {
    Stick,
    Slide(S), // sign of dxE on the active branch
}

enum StepOutcome<S> {
    Advanced(S),
    Deactivated(S),
    Failed,
}

/// Integrate the local evolution from `x0` over `[0, horizon]` at grid step
/// `dt`. Returns the trajectory (grid rows plus one inserted row per jump)
/// and the activation / fold / landing event stream.
pub fn solve_local<S: Scalar>(
    model: &EnergyModel<S>,
    x0: S,
    horizon: S,
    dt: S,
    tols: &LocalTolerances<S>,
) -> Result<(Trajectory<S>, Vec<Event<S>>)> {
    if dt <= S::zero() || horizon <= S::zero() {
        return Err(RiError::invalid("horizon and dt must be positive"));
    }
    let g0 = model.grad_x(S::zero(), x0)?;
    if g0.v.abs() > S::one() + tols.stability {
        return Err(RiError::invalid(format!(
            "initial point not weakly stable: |dxE(0, {})| = {}",
            x0.as_f64(),
            g0.v.abs().as_f64()
        )));
    }

    let n = (horizon / dt).as_f64().round().max(1.0) as usize;
    let mut times = Vec::with_capacity(n + 1);
    let mut values = Vec::with_capacity(n + 1);
    let mut regimes = Vec::with_capacity(n + 1);
    let mut jumps: Vec<JumpRecord<S>> = Vec::new();
    let mut events: Vec<Event<S>> = Vec::new();

    let mut t_cur = S::zero();
    let mut x_cur = x0;
    let mut mode = initial_mode(model, t_cur, x_cur, tols)?;

    times.push(t_cur);
    values.push(x_cur);
    regimes.push(match mode {
        Mode::Stick => Regime::Stick,
        Mode::Slide(_) => Regime::Slide,
    });

    let min_sep = dt * S::of(1e-9);
    for k in 1..=n {
        let target = dt * S::of(k as f64);
        // advance through events until the grid target is reached
        let mut guard = 0usize;
        while t_cur < target - min_sep {
            guard += 1;
            if guard > 64 {
                return Err(RiError::invalid(format!(
                    "regime machine failed to advance at t = {}",
                    t_cur.as_f64()
                )));
            }
            match mode {
                Mode::Stick => {
                    let f_end = model.grad_x(target, x_cur)?.v;
                    if f_end.abs() < S::one() - tols.stability {
                        t_cur = target;
                        break;
                    }
                    // bracket the first touch of |dxE| = 1
                    let mut phi = |t: S| -> S {
                        model
                            .grad_x(t, x_cur)
                            .map(|g| g.v.abs() - S::one())
                            .unwrap_or(S::one())
                    };
                    let phi_lo = phi(t_cur);
                    let t_act = if phi_lo >= S::zero() {
                        t_cur
                    } else {
                        bisect(t_cur, target, phi_lo, &mut phi, tols.event_t)
                    };
                    let g = model.grad_x(t_act, x_cur)?;
                    let sigma = if g.v >= S::zero() { S::one() } else { -S::one() };
                    if g.dx > tols.fold {
                        let speed = -g.dt / g.dx;
                        if sigma * speed <= tols.stability {
                            events.push(Event {
                                t: t_act,
                                kind: EventKind::Activation,
                                x_before: x_cur,
                                x_after: x_cur,
                            });
                            mode = Mode::Slide(sigma);
                            t_cur = t_act;
                        } else {
                            // tangential touch: probe ahead; stay stuck if the
                            // threshold releases, otherwise treat as a fold.
                            let probe = if t_act + dt * S::of(0.25) < target {
                                t_act + dt * S::of(0.25)
                            } else {
                                target
                            };
                            let ahead = model.grad_x(probe, x_cur)?.v;
                            if ahead.abs() <= S::one() + tols.stability {
                                t_cur = probe;
                            } else {
                                let (nt, nx, nmode) = fold_jump(
                                    model, t_act, x_cur, sigma, horizon, tols, &mut events,
                                    &mut jumps,
                                )?;
                                push_jump_row(
                                    &mut times,
                                    &mut values,
                                    &mut regimes,
                                    nt,
                                    nx,
                                    target,
                                    min_sep,
                                );
                                t_cur = nt;
                                x_cur = nx;
                                mode = nmode;
                            }
                        }
                    } else {
                        // activation with degenerate or negative curvature
                        let (nt, nx, nmode) = fold_jump(
                            model, t_act, x_cur, sigma, horizon, tols, &mut events, &mut jumps,
                        )?;
                        push_jump_row(&mut times, &mut values, &mut regimes, nt, nx, target, min_sep);
                        t_cur = nt;
                        x_cur = nx;
                        mode = nmode;
                    }
                }
                Mode::Slide(sigma) => {
                    match slide_to(model, &mut t_cur, &mut x_cur, target, sigma, tols)? {
                        SlideResult::Reached => {}
                        SlideResult::Deactivated => {
                            mode = Mode::Stick;
                        }
                        SlideResult::Fold { t_f, x_f } => {
                            let (nt, nx, nmode) = fold_jump_at(
                                model, t_f, x_f, sigma, horizon, tols, &mut events, &mut jumps,
                            )?;
                            push_jump_row(&mut times, &mut values, &mut regimes, nt, nx, target, min_sep);
                            t_cur = nt;
                            x_cur = nx;
                            mode = nmode;
                        }
                    }
                }
            }
        }
        if t_cur < target {
            t_cur = target;
        }
        times.push(target);
        values.push(x_cur);
        regimes.push(match mode {
            Mode::Stick => Regime::Stick,
            Mode::Slide(_) => Regime::Slide,
        });
        t_cur = target;
    }

    let traj = Trajectory::new(times, values, regimes, jumps)?;
    Ok((traj, events))
}

fn initial_mode<S: Scalar>(
    model: &EnergyModel<S>,
    t: S,
    x: S,
    tols: &LocalTolerances<S>,
) -> Result<Mode<S>> {
    let g = model.grad_x(t, x)?;
    if g.v.abs() < S::one() - tols.stability {
        return Ok(Mode::Stick);
    }
    let sigma = if g.v >= S::zero() { S::one() } else { -S::one() };
    if g.dx > tols.fold && sigma * (-g.dt / g.dx) <= tols.stability {
        Ok(Mode::Slide(sigma))
    } else {
        Ok(Mode::Stick)
    }
}

fn push_jump_row<S: Scalar>(
    times: &mut Vec<S>,
    values: &mut Vec<S>,
    regimes: &mut Vec<Regime>,
    t_jump: S,
    x_after: S,
    target: S,
    min_sep: S,
) {
    let last_t = *times.last().unwrap();
    if t_jump > last_t + min_sep && t_jump < target - min_sep {
        times.push(t_jump);
        values.push(x_after);
        regimes.push(Regime::Jump);
    }
}

enum SlideResult<S> {
    Reached,
    Deactivated,
    Fold { t_f: S, x_f: S },
}

/// Advance a slide from `(t_cur, x_cur)` to `target` with RK4 plus one-step
/// Newton projection back to the branch; halve on failure and bracket the
/// fold when the step collapses.
fn slide_to<S: Scalar>(
    model: &EnergyModel<S>,
    t_cur: &mut S,
    x_cur: &mut S,
    target: S,
    sigma: S,
    tols: &LocalTolerances<S>,
) -> Result<SlideResult<S>> {
    let dt_min = (target - *t_cur) * S::of(1e-10) + tols.event_t * S::of(0.01);
    while *t_cur < target {
        let mut h = target - *t_cur;
        loop {
            match try_slide_step(model, *t_cur, *x_cur, h, sigma, tols) {
                StepOutcome::Advanced(x_new) => {
                    *t_cur = *t_cur + h;
                    *x_cur = x_new;
                    break;
                }
                StepOutcome::Deactivated(x_new) => {
                    *t_cur = *t_cur + h;
                    *x_cur = x_new;
                    return Ok(SlideResult::Deactivated);
                }
                StepOutcome::Failed => {
                    h = h * S::of(0.5);
                    if h < dt_min {
                        let (t_f, x_f) = bracket_fold(model, *t_cur, *x_cur, h * S::of(4.0), sigma, tols)?;
                        return Ok(SlideResult::Fold { t_f, x_f });
                    }
                }
            }
        }
    }
    Ok(SlideResult::Reached)
}

fn slide_speed<S: Scalar>(g: &GradX<S>, fold_tol: S) -> Option<S> {
    if g.dx <= fold_tol {
        None
    } else {
        Some(-g.dt / g.dx)
    }
}

fn try_slide_step<S: Scalar>(
    model: &EnergyModel<S>,
    t: S,
    x: S,
    h: S,
    sigma: S,
    tols: &LocalTolerances<S>,
) -> StepOutcome<S> {
    let rhs = |tt: S, xx: S| -> Option<S> {
        let g = model.grad_x(tt, xx).ok()?;
        slide_speed(&g, tols.fold)
    };
    let half = S::of(0.5);
    let k1 = match rhs(t, x) {
        Some(v) => v,
        None => return StepOutcome::Failed,
    };
    let k2 = match rhs(t + h * half, x + h * k1 * half) {
        Some(v) => v,
        None => return StepOutcome::Failed,
    };
    let k3 = match rhs(t + h * half, x + h * k2 * half) {
        Some(v) => v,
        None => return StepOutcome::Failed,
    };
    let k4 = match rhs(t + h, x + h * k3) {
        Some(v) => v,
        None => return StepOutcome::Failed,
    };
    let sixth = S::of(1.0 / 6.0);
    let x_rk = x + h * (k1 + S::of(2.0) * k2 + S::of(2.0) * k3 + k4) * sixth;
    // one Newton projection step back onto dxE = sigma
    let g = match model.grad_x(t + h, x_rk) {
        Ok(g) => g,
        Err(_) => return StepOutcome::Failed,
    };
    if g.dx <= tols.fold {
        return StepOutcome::Failed;
    }
    let x_proj = x_rk - (g.v - sigma) / g.dx;
    let g2 = match model.grad_x(t + h, x_proj) {
        Ok(g) => g,
        Err(_) => return StepOutcome::Failed,
    };
    if (g2.v - sigma).abs() > tols.slide || g2.dx <= tols.fold {
        return StepOutcome::Failed;
    }
    match slide_speed(&g2, tols.fold) {
        Some(speed) if sigma * speed > tols.stability => StepOutcome::Deactivated(x_proj),
        Some(_) => StepOutcome::Advanced(x_proj),
        None => StepOutcome::Failed,
    }
}

/// Event bisection on the curvature along the branch, with a Newton polish
/// of the exact fold system `{∂ₓE = σ, ∂ₓₓE = 0}`.
fn bracket_fold<S: Scalar>(
    model: &EnergyModel<S>,
    t0: S,
    x0: S,
    h_failed: S,
    sigma: S,
    tols: &LocalTolerances<S>,
) -> Result<(S, S)> {
    let mut best = (t0, x0);
    let mut phi = |t: S| -> S {
        if t <= t0 {
            return model.grad_x(t0, x0).map(|g| g.dx).unwrap_or(-S::one());
        }
        match try_slide_step(model, t0, x0, t - t0, sigma, tols) {
            StepOutcome::Advanced(x) | StepOutcome::Deactivated(x) => {
                let curv = model.grad_x(t, x).map(|g| g.dx).unwrap_or(-S::one());
                if curv > S::zero() && t > best.0 {
                    best = (t, x);
                }
                curv - tols.fold
            }
            StepOutcome::Failed => -S::one(),
        }
    };
    let g0 = model.grad_x(t0, x0)?;
    let hi = t0 + h_failed;
    let t_f = bisect(t0, hi, g0.dx - tols.fold, &mut phi, tols.event_t);
    let x_f = best.1;
    let t_f = if t_f > best.0 { t_f } else { best.0 };

    // polish on the exact fold system; keep the bisected point on failure
    let scale = S::one() + g0.dt.abs() + g0.dxx.abs();
    let polished = newton_2d(
        t_f,
        x_f,
        &mut |t: S, x: S| {
            let g = model.grad_x(t, x).unwrap_or(GradX {
                v: S::nan(),
                dt: S::nan(),
                dx: S::nan(),
                dtt: S::nan(),
                dxt: S::nan(),
                dxx: S::nan(),
            });
            ([g.v - sigma, g.dx], [[g.dt, g.dx], [g.dxt, g.dxx]])
        },
        S::tol_floor(1e-13) * scale,
        30,
    );
    match polished {
        Some((tp, xp))
            if (tp - t_f).abs() <= S::of(64.0) * (tols.event_t + (hi - t0).abs())
                && (xp - x_f).abs() <= S::of(0.25) * (S::one() + x_f.abs()) =>
        {
            Ok((tp, xp))
        }
        _ => {
            let g = model.grad_x(t_f, x_f)?;
            if g.dx > tols.fold * S::of(10.0) {
                return Err(RiError::StiffSlide {
                    t: t_f.as_f64(),
                    curvature: g.dx.as_f64(),
                });
            }
            Ok((t_f, x_f))
        }
    }
}

/// Fold reached while sticking (degenerate activation): same landing rule.
#[allow(clippy::too_many_arguments)]
fn fold_jump<S: Scalar>(
    model: &EnergyModel<S>,
    t_f: S,
    x_f: S,
    sigma: S,
    horizon: S,
    tols: &LocalTolerances<S>,
    events: &mut Vec<Event<S>>,
    jumps: &mut Vec<JumpRecord<S>>,
) -> Result<(S, S, Mode<S>)> {
    fold_jump_at(model, t_f, x_f, sigma, horizon, tols, events, jumps)
}

/// Execute the jump from a fold point: direction `-sigma`, landing at the
/// nearest stationary point with admissible curvature, located via the
/// stationary set of the frozen-time slice.
#[allow(clippy::too_many_arguments)]
fn fold_jump_at<S: Scalar>(
    model: &EnergyModel<S>,
    t_f: S,
    x_f: S,
    sigma: S,
    _horizon: S,
    tols: &LocalTolerances<S>,
    events: &mut Vec<Event<S>>,
    jumps: &mut Vec<JumpRecord<S>>,
) -> Result<(S, S, Mode<S>)> {
    events.push(Event {
        t: t_f,
        kind: EventKind::Fold,
        x_before: x_f,
        x_after: x_f,
    });
    let dir = -sigma;
    let l = model.domain().x_max;
    let roots = model.stationary_set(t_f, (-l, l), tols.landing_resolution)?;
    let span = l + l;
    let min_gap = span * S::of(1e-9) + S::of(16.0) * S::tol_floor(1e-12) * span;
    let mut landing = None;
    let mut candidates: Vec<S> = roots
        .iter()
        .map(|p| p.x)
        .filter(|&r| dir * (r - x_f) > min_gap)
        .collect();
    candidates.sort_by(|a, b| {
        (dir * (*a - x_f))
            .partial_cmp(&(dir * (*b - x_f)))
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    for r in candidates {
        let g = model.grad_x(t_f, r)?;
        if g.dx >= -tols.fold {
            landing = Some(r);
            break;
        }
    }
    let z = landing.ok_or(RiError::NoLanding {
        t: t_f.as_f64(),
        x: x_f.as_f64(),
    })?;
    events.push(Event {
        t: t_f,
        kind: EventKind::Landing,
        x_before: x_f,
        x_after: z,
    });
    jumps.push(JumpRecord {
        t: t_f,
        left: x_f,
        right: z,
    });
    let mode = initial_mode(model, t_f, z, tols)?;
    Ok((t_f, z, mode))
}

/// One-sided residuals of the energy-dissipation upper bound over sampled
/// pairs `t1 <= t2` (all prefixes, all adjacent pairs, plus `pairs` random
/// pairs from a fixed-seed stream).
#[derive(Clone, Copy, Debug)]
pub struct UpperBoundCheck<S> {
    pub worst_t1: S,
    pub worst_t2: S,
    pub worst_residual: S,
    pub pass: bool,
}

pub fn check_upper_bound<S: Scalar>(
    model: &EnergyModel<S>,
    traj: &Trajectory<S>,
    pairs: usize,
    tol: S,
) -> Result<UpperBoundCheck<S>> {
    let times = traj.times();
    let values = traj.values();
    let n = times.len();
    let mut energy = Vec::with_capacity(n);
    let mut integral = Vec::with_capacity(n);
    let mut diss = Vec::with_capacity(n);
    let mut acc_i = S::zero();
    let mut acc_d = S::zero();
    let mut f_prev = model.eval_jet(times[0], values[0])?.dt();
    energy.push(model.eval_value(times[0], values[0])?);
    integral.push(acc_i);
    diss.push(acc_d);
    let half = S::of(0.5);
    for k in 1..n {
        let f_k = model.eval_jet(times[k], values[k])?.dt();
        acc_i = acc_i + (times[k] - times[k - 1]) * (f_prev + f_k) * half;
        acc_d = acc_d + (values[k] - values[k - 1]).abs();
        energy.push(model.eval_value(times[k], values[k])?);
        integral.push(acc_i);
        diss.push(acc_d);
        f_prev = f_k;
    }

    let mut worst = (times[0], times[0], S::neg_infinity());
    let mut consider = |i: usize, j: usize| {
        let r = (energy[j] - energy[i]) - (integral[j] - integral[i]) + (diss[j] - diss[i]);
        if r > worst.2 {
            worst = (times[i], times[j], r);
        }
    };
    for k in 1..n {
        consider(0, k);
        consider(k - 1, k);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5249_5542);
    for _ in 0..pairs {
        let i = rng.gen_range(0..n);
        let j = rng.gen_range(0..n);
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        consider(i, j);
    }
    Ok(UpperBoundCheck {
        worst_t1: worst.0,
        worst_t2: worst.1,
        worst_residual: worst.2,
        pass: worst.2 <= tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tols() -> LocalTolerances<f64> {
        LocalTolerances::default()
    }

    #[test]
    fn detect_regime_cases() {
        let q = EnergyModel::<f64>::quadratic();
        assert_eq!(
            detect_regime(&q, 0.5, 0.0, &tols()).unwrap(),
            RegimeClass::Stick
        );
        let dw = EnergyModel::<f64>::double_well();
        let t_star = 1.0 + 2.0 / (3.0 * 3.0f64.sqrt());
        let x_star = -1.0 / 3.0f64.sqrt();
        assert_eq!(
            detect_regime(&dw, t_star, x_star, &tols()).unwrap(),
            RegimeClass::Fold
        );
        assert_eq!(
            detect_regime(&dw, 0.0, 2.0, &tols()).unwrap(),
            RegimeClass::Unstable
        );
        // on the branch with positive curvature
        assert_eq!(
            detect_regime(&q, 1.5, 0.5, &tols()).unwrap(),
            RegimeClass::SlideMinus
        );
    }

    #[test]
    fn quadratic_stick_then_slide() {
        let m = EnergyModel::<f64>::quadratic();
        let (traj, events) = solve_local(&m, 0.0, 2.0, 1e-3, &tols()).unwrap();
        assert_eq!(traj.len(), 2001);
        assert!(traj.jumps().is_empty());
        let mut sup = 0.0f64;
        for (&t, &x) in traj.times().iter().zip(traj.values()) {
            sup = sup.max((x - (t - 1.0).max(0.0)).abs());
        }
        assert!(sup <= 2e-3, "sup error {sup}");
        // one activation event at t = 1
        let acts: Vec<_> = events
            .iter()
            .filter(|e| e.kind == EventKind::Activation)
            .collect();
        assert_eq!(acts.len(), 1);
        assert!((acts[0].t - 1.0).abs() < 1e-6);
    }

    #[test]
    fn zero_energy_sticks_forever() {
        let m = EnergyModel::<f64>::zero();
        let (traj, events) = solve_local(&m, 0.4, 2.0, 1e-2, &tols()).unwrap();
        assert!(events.is_empty());
        for &x in traj.values() {
            assert_eq!(x, 0.4);
        }
    }

    #[test]
    fn double_well_fold_and_landing() {
        let m = EnergyModel::<f64>::double_well();
        let (traj, events) = solve_local(&m, -1.0, 2.0, 1e-3, &tols()).unwrap();
        assert_eq!(traj.jumps().len(), 1);
        let j = traj.jumps()[0];
        let t_star = 1.0 + 2.0 / (3.0 * 3.0f64.sqrt());
        let x_fold = -1.0 / 3.0f64.sqrt();
        let z_land = 2.0 / 3.0f64.sqrt();
        assert!((j.t - t_star).abs() < 1e-6, "fold time {} vs {}", j.t, t_star);
        assert!((j.left - x_fold).abs() < 1e-6);
        assert!((j.right - z_land).abs() < 1e-6);
        let folds: Vec<_> = events.iter().filter(|e| e.kind == EventKind::Fold).collect();
        assert_eq!(folds.len(), 1);
        let lands: Vec<_> = events
            .iter()
            .filter(|e| e.kind == EventKind::Landing)
            .collect();
        assert_eq!(lands.len(), 1);
        // jump size is sqrt(3)
        assert!((j.size() - 3.0f64.sqrt()).abs() < 1e-6);
    }

    #[test]
    fn slide_stays_on_branch() {
        let m = EnergyModel::<f64>::double_well();
        let (traj, _) = solve_local(&m, -1.0, 1.3, 1e-3, &tols()).unwrap();
        for (&t, &x) in traj.times().iter().zip(traj.values()) {
            if t > 1.0 + 1e-3 {
                let g = m.grad_x(t, x).unwrap();
                assert!(
                    (g.v + 1.0).abs() < 1e-7,
                    "off branch at t={t}: dxE={}",
                    g.v
                );
            }
        }
    }

    #[test]
    fn upper_bound_holds_for_local_solutions() {
        let m = EnergyModel::<f64>::double_well();
        let (traj, _) = solve_local(&m, -1.0, 2.0, 1e-3, &tols()).unwrap();
        let check = check_upper_bound(&m, &traj, 10_000, 1e-3 * 3.0).unwrap();
        assert!(check.pass, "worst residual {}", check.worst_residual);
    }

    #[test]
    fn reversed_jump_violates_upper_bound() {
        // jumping uphill gains energy and pays dissipation: flagged
        let m = EnergyModel::<f64>::double_well();
        let (traj, _) = solve_local(&m, -1.0, 2.0, 1e-2, &tols()).unwrap();
        let j = traj.jumps()[0];
        let mut times = Vec::new();
        let mut values = Vec::new();
        for (&t, &x) in traj.times().iter().zip(traj.values()) {
            times.push(t);
            // mirror the post-jump branch back to the fold abscissa
            values.push(if t >= j.t { 2.0 * j.left - x } else { x });
        }
        let regimes = vec![Regime::Incremental; times.len()];
        let bad = Trajectory::new(times, values, regimes, vec![]).unwrap();
        let check = check_upper_bound(&m, &bad, 5_000, 1e-3).unwrap();
        assert!(!check.pass);
        assert!(check.worst_residual > 0.1);
    }

    #[test]
    fn initial_instability_is_rejected() {
        let m = EnergyModel::<f64>::double_well();
        assert!(solve_local(&m, 2.0, 1.0, 1e-2, &tols()).is_err());
    }
}

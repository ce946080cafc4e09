//! Finite-difference self-validation of the jet tables.
//!
//! Every derivative slot is checked against Richardson-extrapolated central
//! differences of its parent slot(s): `∂ₜ^i ∂ₓ^j E` against the t-stencil of
//! `∂ₜ^{i-1} ∂ₓ^j E` and the x-stencil of `∂ₜ^i ∂ₓ^{j-1} E`. The mixed slot
//! is stored once and is therefore checked against both stencils.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Result, RiError};
use crate::jet::{Jet3, SLOTS};
use crate::model::{EnergyModel, Rect};
use crate::scalar::Scalar;

const STEP: f64 = 1e-4;
const SEED: u64 = 0x5249_3144;

#[derive(Clone, Copy, Debug, Serialize)]
pub struct SlotCheck {
    pub i: usize,
    pub j: usize,
    pub max_rel_err: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ValidationReport {
    pub slots: Vec<SlotCheck>,
    pub worst_slot: (usize, usize),
    pub worst_err: f64,
    pub samples: usize,
    pub tol: f64,
    pub pass: bool,
}

impl ValidationReport {
    pub fn slot(&self, i: usize, j: usize) -> &SlotCheck {
        self.slots
            .iter()
            .find(|s| s.i == i && s.j == j)
            .expect("slot present")
    }
}

/// Compare each jet coefficient against central finite differences at
/// pseudo-random points of `rect` (step `1e-4`, one Richardson level).
pub fn validate_derivatives<S: Scalar>(
    model: &EnergyModel<S>,
    rect: Rect<S>,
    samples: usize,
    tol: f64,
) -> Result<ValidationReport> {
    if samples == 0 {
        return Err(RiError::invalid("validate_derivatives needs samples >= 1"));
    }
    let h = S::of(STEP);
    let four_h = h * S::of(4.0);
    if rect.t_hi - rect.t_lo <= four_h || rect.x_hi - rect.x_lo <= four_h {
        return Err(RiError::invalid("validation box too small for the stencil"));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut max_err = [[0f64; 4]; 4];

    for _ in 0..samples {
        let a: f64 = rng.gen();
        let b: f64 = rng.gen();
        let t = rect.t_lo + h + (rect.t_hi - rect.t_lo - h - h) * S::of(a);
        let x = rect.x_lo + h + (rect.x_hi - rect.x_lo - h - h) * S::of(b);

        let center = model.eval_jet(t, x)?;
        let half = h * S::of(0.5);
        let tp = model.eval_jet(t + h, x)?;
        let tm = model.eval_jet(t - h, x)?;
        let tp2 = model.eval_jet(t + half, x)?;
        let tm2 = model.eval_jet(t - half, x)?;
        let xp = model.eval_jet(t, x + h)?;
        let xm = model.eval_jet(t, x - h)?;
        let xp2 = model.eval_jet(t, x + half)?;
        let xm2 = model.eval_jet(t, x - half)?;

        for &(i, j) in SLOTS.iter() {
            if i + j == 0 {
                continue;
            }
            let got = center.partial(i, j).as_f64();
            if i >= 1 {
                let fd = richardson(&tp, &tm, &tp2, &tm2, i - 1, j, h);
                track(&mut max_err, i, j, got, fd);
            }
            if j >= 1 {
                let fd = richardson(&xp, &xm, &xp2, &xm2, i, j - 1, h);
                track(&mut max_err, i, j, got, fd);
            }
        }
    }

    let mut slots = Vec::new();
    let mut worst = ((0, 0), 0.0f64);
    for &(i, j) in SLOTS.iter() {
        if i + j == 0 {
            continue;
        }
        let e = max_err[i][j];
        if e > worst.1 {
            worst = ((i, j), e);
        }
        slots.push(SlotCheck {
            i,
            j,
            max_rel_err: e,
            pass: e <= tol,
        });
    }
    let pass = slots.iter().all(|s| s.pass);
    Ok(ValidationReport {
        slots,
        worst_slot: worst.0,
        worst_err: worst.1,
        samples,
        tol,
        pass,
    })
}

fn richardson<S: Scalar>(
    p: &Jet3<S>,
    m: &Jet3<S>,
    p2: &Jet3<S>,
    m2: &Jet3<S>,
    i: usize,
    j: usize,
    h: S,
) -> f64 {
    let d_h = (p.partial(i, j) - m.partial(i, j)) / (S::of(2.0) * h);
    let d_h2 = (p2.partial(i, j) - m2.partial(i, j)) / h;
    ((S::of(4.0) * d_h2 - d_h) / S::of(3.0)).as_f64()
}

fn track(max_err: &mut [[f64; 4]; 4], i: usize, j: usize, got: f64, fd: f64) {
    let scale = 1f64.max(got.abs()).max(fd.abs());
    let rel = (got - fd).abs() / scale;
    if rel > max_err[i][j] {
        max_err[i][j] = rel;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn full_box() -> Rect<f64> {
        Rect::new(0.0, 2.0, -3.0, 3.0)
    }

    #[test]
    fn quadratic_is_exact_under_differences() {
        let m = crate::model::EnergyModel::<f64>::quadratic();
        let report = validate_derivatives(&m, full_box(), 100, 1e-6).unwrap();
        assert!(report.pass, "worst {:?} {}", report.worst_slot, report.worst_err);
        assert!(report.worst_err <= 1e-8);
    }

    #[test]
    fn double_well_passes() {
        let m = crate::model::EnergyModel::<f64>::double_well();
        let report = validate_derivatives(&m, full_box(), 100, 1e-6).unwrap();
        assert!(report.pass, "worst {:?} {}", report.worst_slot, report.worst_err);
    }

    #[test]
    fn corrupted_mixed_slot_is_flagged() {
        let m = crate::model::EnergyModel::<f64>::quadratic().with_corrupted_slot(1, 1, 0.1);
        let report = validate_derivatives(&m, full_box(), 50, 1e-6).unwrap();
        assert!(!report.pass);
        assert_eq!(report.worst_slot, (1, 1));
        assert!(!report.slot(1, 1).pass);
        // the corruption is a constant shift, so differences of the parent
        // slots stay clean and no other slot is blamed
        assert!(report.slot(2, 1).pass);
        assert!(report.slot(1, 2).pass);
    }
}

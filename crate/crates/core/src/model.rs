//! Energy functionals `E(t,x)` on a domain box `[0,T] x [-L,L]` with exact
//! partial derivatives through total order 3.

use crate::constructed::ConstructedEnergy;
use crate::driver::{parse_driver, write_driver};
use crate::error::{Result, RiError};
use crate::jet::Jet3;
use crate::rootfind::bisect;
use crate::scalar::Scalar;
use crate::signfield::build_sign_field;

/// Rectangle `[t_lo, t_hi] x [x_lo, x_hi]` used by scans and hypothesis checks.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rect<S> {
    pub t_lo: S,
    pub t_hi: S,
    pub x_lo: S,
    pub x_hi: S,
}

impl<S: Scalar> Rect<S> {
    pub fn new(t_lo: S, t_hi: S, x_lo: S, x_hi: S) -> Self {
        Rect {
            t_lo,
            t_hi,
            x_lo,
            x_hi,
        }
    }
}

/// Domain box `[0, t_max] x [-x_max, x_max]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DomainBox<S> {
    pub t_max: S,
    pub x_max: S,
}

impl<S: Scalar> DomainBox<S> {
    pub fn contains(&self, t: S, x: S) -> bool {
        let slack_t = S::epsilon() * S::of(64.0) * (S::one() + self.t_max.abs());
        let slack_x = S::epsilon() * S::of(64.0) * (S::one() + self.x_max.abs());
        t >= -slack_t && t <= self.t_max + slack_t && x.abs() <= self.x_max + slack_x
    }

    pub fn rect(&self) -> Rect<S> {
        Rect::new(S::zero(), self.t_max, -self.x_max, self.x_max)
    }
}

/// The model families the laboratory ships with.
#[derive(Clone, Debug)]
pub enum EnergyFamily<S: Scalar> {
    /// `E = W(x) - l(t) x`, coefficients in ascending degree.
    Separable { potential: Vec<S>, loading: Vec<S> },
    /// `E = sum rows[i][j] t^i x^j`.
    Polynomial { rows: Vec<Vec<S>> },
    /// `E = offset + integral of (g - 1)` for a constructed sign field.
    Constructed(ConstructedEnergy<S>),
}

/// Jet of `∂ₓE`: the value is `∂ₓE` itself and the entries carry the order-3
/// derivatives of `E` that every formula in the theory consumes. For
/// constructed energies this path never touches quadrature.
#[derive(Clone, Copy, Debug)]
pub struct GradX<S> {
    /// `∂ₓE`
    pub v: S,
    /// `∂ₓₜE`
    pub dt: S,
    /// `∂ₓₓE`
    pub dx: S,
    /// `∂ₓₜₜE`
    pub dtt: S,
    /// `∂ₓₓₜE`
    pub dxt: S,
    /// `∂ₓₓₓE`
    pub dxx: S,
}

/// A point of the stationary set `F(t) = {x : |∂ₓE(t,x)| = 1}` with the sign
/// of `∂ₓE` there.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StationaryPoint<S> {
    pub x: S,
    pub sign: i8,
}

#[derive(Clone, Debug)]
pub struct EnergyModel<S: Scalar> {
    family: EnergyFamily<S>,
    domain: DomainBox<S>,
    offset: S,
    fault: Option<(usize, usize, S)>,
}

impl<S: Scalar> EnergyModel<S> {
    pub fn new(family: EnergyFamily<S>, domain: DomainBox<S>) -> Self {
        EnergyModel {
            family,
            domain,
            offset: S::zero(),
            fault: None,
        }
    }

    /// `E = x^2/2 - t x` on `[0,2] x [-3,3]`: the convex play-operator model.
    pub fn quadratic() -> Self {
        EnergyModel::new(
            EnergyFamily::Separable {
                potential: vec![S::zero(), S::zero(), S::of(0.5)],
                loading: vec![S::zero(), S::one()],
            },
            DomainBox {
                t_max: S::of(2.0),
                x_max: S::of(3.0),
            },
        )
    }

    /// `E = (x^2-1)^2/4 - t x` on `[0,2] x [-3,3]`: the snap-through model.
    pub fn double_well() -> Self {
        EnergyModel::new(
            EnergyFamily::Separable {
                potential: vec![
                    S::of(0.25),
                    S::zero(),
                    S::of(-0.5),
                    S::zero(),
                    S::of(0.25),
                ],
                loading: vec![S::zero(), S::one()],
            },
            DomainBox {
                t_max: S::of(2.0),
                x_max: S::of(3.0),
            },
        )
    }

    /// `E = 0` on `[0,2] x [-3,3]`.
    pub fn zero() -> Self {
        EnergyModel::new(
            EnergyFamily::Polynomial {
                rows: vec![vec![S::zero()]],
            },
            DomainBox {
                t_max: S::of(2.0),
                x_max: S::of(3.0),
            },
        )
    }

    pub fn constructed(energy: ConstructedEnergy<S>, horizon: S) -> Self {
        let m = energy.field().bound();
        EnergyModel::new(
            EnergyFamily::Constructed(energy),
            DomainBox {
                t_max: horizon,
                x_max: m,
            },
        )
    }

    pub fn with_domain(mut self, t_max: S, x_max: S) -> Self {
        self.domain = DomainBox { t_max, x_max };
        self
    }

    /// Additive energy offset (recorded; used to normalize `E` when needed).
    pub fn with_offset(mut self, offset: S) -> Self {
        self.offset = offset;
        self
    }

    /// Validation-testing hook: shift the reported partial `∂ₜ^i ∂ₓ^j E` by
    /// `delta` so the finite-difference audit has a fault to find.
    pub fn with_corrupted_slot(mut self, i: usize, j: usize, delta: S) -> Self {
        self.fault = Some((i, j, delta));
        self
    }

    pub fn domain(&self) -> DomainBox<S> {
        self.domain
    }

    pub fn offset(&self) -> S {
        self.offset
    }

    pub fn family(&self) -> &EnergyFamily<S> {
        &self.family
    }

    pub fn family_label(&self) -> &'static str {
        match self.family {
            EnergyFamily::Separable { .. } => "separable",
            EnergyFamily::Polynomial { .. } => "polynomial",
            EnergyFamily::Constructed(_) => "constructed",
        }
    }

    fn check_domain(&self, t: S, x: S) -> Result<()> {
        if !self.domain.contains(t, x) {
            return Err(RiError::Domain {
                t: t.as_f64(),
                x: x.as_f64(),
                t_max: self.domain.t_max.as_f64(),
                x_max: self.domain.x_max.as_f64(),
            });
        }
        Ok(())
    }

    /// Value and all partials of `E` through total order 3 at `(t, x)`.
    pub fn eval_jet(&self, t: S, x: S) -> Result<Jet3<S>> {
        self.check_domain(t, x)?;
        let mut jet = match &self.family {
            EnergyFamily::Separable { potential, loading } => {
                let w = horner_jet(potential, Jet3::variable_x(x));
                let l = horner_jet(loading, Jet3::variable_t(t));
                w - l * Jet3::variable_x(x)
            }
            EnergyFamily::Polynomial { rows } => poly_jet(rows, t, x),
            EnergyFamily::Constructed(c) => c.eval_jet(t, x)?,
        };
        jet.set_partial(0, 0, jet.value() + self.offset);
        if let Some((i, j, delta)) = self.fault {
            jet.set_partial(i, j, jet.partial(i, j) + delta);
        }
        if !jet.is_finite() {
            return Err(RiError::NonFinite {
                t: t.as_f64(),
                x: x.as_f64(),
            });
        }
        Ok(jet)
    }

    /// Fast path for `E(t,x)` alone.
    pub fn eval_value(&self, t: S, x: S) -> Result<S> {
        self.check_domain(t, x)?;
        let v = match &self.family {
            EnergyFamily::Separable { potential, loading } => {
                horner(potential, x) - horner(loading, t) * x
            }
            EnergyFamily::Polynomial { rows } => {
                let mut total = S::zero();
                for row in rows.iter().rev() {
                    total = total * t + horner(row, x);
                }
                total
            }
            EnergyFamily::Constructed(c) => c.eval_value(t, x)?,
        };
        let v = v + self.offset;
        if !v.is_finite() {
            return Err(RiError::NonFinite {
                t: t.as_f64(),
                x: x.as_f64(),
            });
        }
        Ok(v)
    }

    /// Jet of `∂ₓE` through total order 2 (i.e. order-3 data of `E`).
    pub fn grad_x(&self, t: S, x: S) -> Result<GradX<S>> {
        self.check_domain(t, x)?;
        let g = match &self.family {
            EnergyFamily::Separable { potential, loading } => {
                let wp = differentiate(potential);
                let wpp = differentiate(&wp);
                let wppp = differentiate(&wpp);
                let lp = differentiate(loading);
                let lpp = differentiate(&lp);
                GradX {
                    v: horner(&wp, x) - horner(loading, t),
                    dt: -horner(&lp, t),
                    dx: horner(&wpp, x),
                    dtt: -horner(&lpp, t),
                    dxt: S::zero(),
                    dxx: horner(&wppp, x),
                }
            }
            EnergyFamily::Polynomial { rows } => {
                let dx_rows = differentiate_rows_x(rows);
                let j = poly_jet(&dx_rows, t, x);
                GradX {
                    v: j.value(),
                    dt: j.dt(),
                    dx: j.dx(),
                    dtt: j.dtt(),
                    dxt: j.dxt(),
                    dxx: j.dxx(),
                }
            }
            EnergyFamily::Constructed(c) => {
                let j = c.eval_dx(t, x);
                GradX {
                    v: j.value(),
                    dt: j.dt(),
                    dx: j.dx(),
                    dtt: j.dtt(),
                    dxt: j.dxt(),
                    dxx: j.dxx(),
                }
            }
        };
        if !(g.v.is_finite() && g.dt.is_finite() && g.dx.is_finite()) {
            return Err(RiError::NonFinite {
                t: t.as_f64(),
                x: x.as_f64(),
            });
        }
        Ok(g)
    }

    /// All roots of `∂ₓE(t,·) = +1` and `= -1` on `x_range`, isolated by sign
    /// change on a `resolution`-cell grid and refined by bisection to width
    /// `1e-12 * |x_range|`. Sorted ascending, tagged with the branch sign.
    pub fn stationary_set(
        &self,
        t: S,
        x_range: (S, S),
        resolution: usize,
    ) -> Result<Vec<StationaryPoint<S>>> {
        if resolution < 2 {
            return Err(RiError::invalid("stationary_set needs resolution >= 2"));
        }
        let (lo, hi) = x_range;
        self.check_domain(t, lo)?;
        self.check_domain(t, hi)?;
        let span = hi - lo;
        let width = S::tol_floor(1e-12) * span.abs();
        let n = resolution;
        let step = span / S::of(n as f64);
        let mut out = Vec::new();
        for &target in &[S::one(), -S::one()] {
            let sign_tag = if target > S::zero() { 1i8 } else { -1i8 };
            let f = |x: S| -> S { self.grad_x(t, x).map(|g| g.v - target).unwrap_or(S::nan()) };
            let mut roots: Vec<S> = Vec::new();
            let mut prev_x = lo;
            let mut prev_f = f(lo);
            let mut zero_run_start: Option<S> = None;
            for k in 1..=n {
                let xk = if k == n { hi } else { lo + step * S::of(k as f64) };
                let fk = f(xk);
                if prev_f == S::zero() {
                    if zero_run_start.is_none() {
                        zero_run_start = Some(prev_x);
                    }
                    if fk != S::zero() {
                        let start = zero_run_start.take().unwrap();
                        roots.push((start + prev_x) * S::of(0.5));
                    }
                } else if fk != S::zero()
                    && (fk > S::zero()) != (prev_f > S::zero())
                    && prev_f.is_finite()
                    && fk.is_finite()
                {
                    let mut g = f;
                    let r = bisect(prev_x, xk, prev_f, &mut g, width);
                    roots.push(r);
                }
                prev_x = xk;
                prev_f = fk;
            }
            if let Some(start) = zero_run_start {
                roots.push((start + prev_x) * S::of(0.5));
            } else if prev_f == S::zero() {
                roots.push(prev_x);
            }
            // collapse near-duplicates from adjacent brackets
            roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let merge = width * S::of(8.0) + S::epsilon() * span.abs();
            for r in roots {
                if let Some(last) = out
                    .iter()
                    .rev()
                    .find(|p: &&StationaryPoint<S>| p.sign == sign_tag)
                {
                    if (r - last.x).abs() <= merge {
                        continue;
                    }
                }
                out.push(StationaryPoint { x: r, sign: sign_tag });
            }
        }
        out.sort_by(|a, b| a.x.partial_cmp(&b.x).unwrap());
        Ok(out)
    }

    /// Rough magnitude of `E` over the domain, for scale-aware tolerances.
    pub fn value_scale(&self) -> S {
        let mut scale = S::one();
        let n = 12;
        for i in 0..=n {
            for j in 0..=n {
                let t = self.domain.t_max * S::of(i as f64 / n as f64);
                let x = self.domain.x_max * S::of(2.0 * j as f64 / n as f64 - 1.0);
                if let Ok(v) = self.eval_value(t, x) {
                    if v.abs() > scale {
                        scale = v.abs();
                    }
                }
            }
        }
        scale
    }
}

fn horner<S: Scalar>(coeffs: &[S], x: S) -> S {
    let mut acc = S::zero();
    for &c in coeffs.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

fn horner_jet<S: Scalar>(coeffs: &[S], x: Jet3<S>) -> Jet3<S> {
    let mut acc = Jet3::constant(S::zero());
    for &c in coeffs.iter().rev() {
        acc = acc * x + Jet3::constant(c);
    }
    acc
}

fn poly_jet<S: Scalar>(rows: &[Vec<S>], t: S, x: S) -> Jet3<S> {
    let tj = Jet3::variable_t(t);
    let xj = Jet3::variable_x(x);
    let mut total = Jet3::constant(S::zero());
    for row in rows.iter().rev() {
        total = total * tj + horner_jet(row, xj);
    }
    total
}

fn differentiate<S: Scalar>(coeffs: &[S]) -> Vec<S> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, &c)| c * S::of(k as f64))
        .collect()
}

fn differentiate_rows_x<S: Scalar>(rows: &[Vec<S>]) -> Vec<Vec<S>> {
    rows.iter().map(|row| differentiate(row)).collect()
}

/// Parse the flat key=value model format described in the README.
pub fn parse_model<S: Scalar>(text: &str) -> Result<EnergyModel<S>> {
    let mut family: Option<String> = None;
    let mut potential: Vec<S> = Vec::new();
    let mut loading: Vec<S> = Vec::new();
    let mut poly: Vec<(usize, usize, S)> = Vec::new();
    let mut t_max: Option<S> = None;
    let mut x_max: Option<S> = None;
    let mut offset = S::zero();
    let mut driver_lines: Vec<String> = Vec::new();
    let mut bound: Option<S> = None;
    let mut sharpness: Option<S> = None;
    let mut x0 = S::zero();

    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let n = lineno + 1;
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| RiError::parse(n, format!("expected key=value, got `{line}`")))?;
        let value = value.trim();
        match key.trim() {
            "family" => family = Some(value.to_string()),
            "W.coeffs" => potential = parse_list(value, n)?,
            "loading.coeffs" => loading = parse_list(value, n)?,
            "poly.coeffs" => poly = parse_triples(value, n)?,
            "domain.T" => t_max = Some(parse_num(value, n)?),
            "domain.L" => x_max = Some(parse_num(value, n)?),
            "offset" => offset = parse_num(value, n)?,
            "bound.M" => bound = Some(parse_num(value, n)?),
            "sharpness" => sharpness = Some(parse_num(value, n)?),
            "x0" => x0 = parse_num(value, n)?,
            k if k.starts_with("driver.") => {
                driver_lines.push(format!("{}={}", &k["driver.".len()..], value));
            }
            other => return Err(RiError::parse(n, format!("unknown model key `{other}`"))),
        }
    }

    let family = family.ok_or_else(|| RiError::invalid("model file missing family="))?;
    let model = match family.as_str() {
        "separable" => {
            if potential.is_empty() {
                return Err(RiError::invalid("separable model needs W.coeffs="));
            }
            EnergyModel::new(
                EnergyFamily::Separable { potential, loading },
                DomainBox {
                    t_max: t_max.ok_or_else(|| RiError::invalid("missing domain.T"))?,
                    x_max: x_max.ok_or_else(|| RiError::invalid("missing domain.L"))?,
                },
            )
        }
        "polynomial" => {
            let deg_t = poly.iter().map(|&(i, _, _)| i).max().unwrap_or(0);
            let deg_x = poly.iter().map(|&(_, j, _)| j).max().unwrap_or(0);
            let mut rows = vec![vec![S::zero(); deg_x + 1]; deg_t + 1];
            for (i, j, c) in poly {
                rows[i][j] = rows[i][j] + c;
            }
            EnergyModel::new(
                EnergyFamily::Polynomial { rows },
                DomainBox {
                    t_max: t_max.ok_or_else(|| RiError::invalid("missing domain.T"))?,
                    x_max: x_max.ok_or_else(|| RiError::invalid("missing domain.L"))?,
                },
            )
        }
        "constructed" => {
            let driver = parse_driver::<S>(&driver_lines.join("\n"))?;
            let m = bound.ok_or_else(|| RiError::invalid("constructed model needs bound.M="))?;
            let horizon = t_max.unwrap_or_else(|| driver.horizon());
            let field = build_sign_field(driver, m, sharpness)?;
            EnergyModel::constructed(ConstructedEnergy::new(field, x0), horizon)
        }
        other => return Err(RiError::invalid(format!("unknown family `{other}`"))),
    };
    Ok(model.with_offset(offset))
}

/// Serialize a model to the flat format; inverse of [`parse_model`].
pub fn write_model<S: Scalar>(model: &EnergyModel<S>) -> String {
    let mut out = String::new();
    match model.family() {
        EnergyFamily::Separable { potential, loading } => {
            out.push_str("family=separable\n");
            out.push_str(&format!("W.coeffs={}\n", list_to_string(potential)));
            out.push_str(&format!("loading.coeffs={}\n", list_to_string(loading)));
        }
        EnergyFamily::Polynomial { rows } => {
            out.push_str("family=polynomial\n");
            let mut triples = Vec::new();
            for (i, row) in rows.iter().enumerate() {
                for (j, &c) in row.iter().enumerate() {
                    if c != S::zero() {
                        triples.push(format!("{i},{j},{:.16e}", c.as_f64()));
                    }
                }
            }
            if triples.is_empty() {
                triples.push("0,0,0".into());
            }
            out.push_str(&format!("poly.coeffs={}\n", triples.join(";")));
        }
        EnergyFamily::Constructed(c) => {
            out.push_str("family=constructed\n");
            for line in write_driver(c.field().driver()).lines() {
                out.push_str(&format!("driver.{line}\n"));
            }
            out.push_str(&format!("bound.M={:.16e}\n", c.field().bound().as_f64()));
            out.push_str(&format!(
                "sharpness={:.16e}\n",
                c.field().sharpness().as_f64()
            ));
            out.push_str(&format!("x0={:.16e}\n", c.base_point().as_f64()));
        }
    }
    out.push_str(&format!("domain.T={:.16e}\n", model.domain().t_max.as_f64()));
    out.push_str(&format!("domain.L={:.16e}\n", model.domain().x_max.as_f64()));
    out.push_str(&format!("offset={:.16e}\n", model.offset().as_f64()));
    out
}

fn list_to_string<S: Scalar>(xs: &[S]) -> String {
    xs.iter()
        .map(|x| format!("{:.16e}", x.as_f64()))
        .collect::<Vec<_>>()
        .join(",")
}

fn parse_num<S: Scalar>(s: &str, line: usize) -> Result<S> {
    s.trim()
        .parse::<f64>()
        .map(S::of)
        .map_err(|e| RiError::parse(line, format!("bad number `{}`: {e}", s.trim())))
}

fn parse_list<S: Scalar>(s: &str, line: usize) -> Result<Vec<S>> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(|item| parse_num(item, line)).collect()
}

fn parse_triples<S: Scalar>(s: &str, line: usize) -> Result<Vec<(usize, usize, S)>> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(';')
        .map(|item| {
            let parts: Vec<&str> = item.split(',').collect();
            if parts.len() != 3 {
                return Err(RiError::parse(line, format!("expected i,j,c got `{item}`")));
            }
            let i = parts[0]
                .trim()
                .parse::<usize>()
                .map_err(|e| RiError::parse(line, format!("bad index: {e}")))?;
            let j = parts[1]
                .trim()
                .parse::<usize>()
                .map_err(|e| RiError::parse(line, format!("bad index: {e}")))?;
            if i + j > 8 {
                return Err(RiError::parse(line, "polynomial degree too large"));
            }
            Ok((i, j, parse_num(parts[2], line)?))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_jet_values() {
        let m = EnergyModel::<f64>::quadratic();
        let j = m.eval_jet(0.5, 2.0).unwrap();
        assert_eq!(j.value(), 1.0);
        assert_eq!(j.dx(), 1.5);
        assert_eq!(j.dxx(), 1.0);
        assert_eq!(j.dxt(), -1.0);
        for &(i, jj) in &[(3, 0), (2, 1), (1, 2), (0, 3)] {
            assert_eq!(j.partial(i, jj), 0.0);
        }
    }

    #[test]
    fn zero_model_all_zero() {
        let m = EnergyModel::<f64>::zero();
        let j = m.eval_jet(1.0, 0.5).unwrap();
        for &(i, jj) in crate::jet::SLOTS.iter() {
            assert_eq!(j.partial(i, jj), 0.0);
        }
    }

    #[test]
    fn double_well_jet_at_minus_one() {
        let m = EnergyModel::<f64>::double_well();
        let j = m.eval_jet(0.0, -1.0).unwrap();
        assert!((j.dx() - 0.0).abs() < 1e-15);
        assert!((j.dxx() - 2.0).abs() < 1e-15);
        assert!((j.dxxx() + 6.0).abs() < 1e-15);
    }

    #[test]
    fn grad_x_matches_full_jet() {
        let m = EnergyModel::<f64>::double_well();
        let (t, x) = (0.7, 0.35);
        let j = m.eval_jet(t, x).unwrap();
        let g = m.grad_x(t, x).unwrap();
        assert!((g.v - j.dx()).abs() < 1e-14);
        assert!((g.dt - j.dxt()).abs() < 1e-14);
        assert!((g.dx - j.dxx()).abs() < 1e-14);
        assert!((g.dtt - j.dxtt()).abs() < 1e-14);
        assert!((g.dxt - j.dxxt()).abs() < 1e-14);
        assert!((g.dxx - j.dxxx()).abs() < 1e-14);
    }

    #[test]
    fn domain_violation_is_hard_error() {
        let m = EnergyModel::<f64>::quadratic();
        assert!(matches!(
            m.eval_jet(2.5, 0.0),
            Err(RiError::Domain { .. })
        ));
        assert!(matches!(
            m.eval_jet(1.0, 3.5),
            Err(RiError::Domain { .. })
        ));
    }

    #[test]
    fn stationary_quadratic() {
        let m = EnergyModel::<f64>::quadratic();
        let roots = m.stationary_set(0.0, (-3.0, 3.0), 256).unwrap();
        assert_eq!(roots.len(), 2);
        assert!((roots[0].x + 1.0).abs() < 1e-10);
        assert_eq!(roots[0].sign, -1);
        assert!((roots[1].x - 1.0).abs() < 1e-10);
        assert_eq!(roots[1].sign, 1);
    }

    #[test]
    fn stationary_zero_model_empty() {
        let m = EnergyModel::<f64>::zero();
        let roots = m.stationary_set(1.0, (-3.0, 3.0), 128).unwrap();
        assert!(roots.is_empty());
    }

    #[test]
    fn stationary_double_well_cubic_roots() {
        // |x^3 - x| = 1 on [-2, 2]: one real root of each sign branch.
        let m = EnergyModel::<f64>::double_well();
        let roots = m.stationary_set(0.0, (-2.0, 2.0), 512).unwrap();
        assert_eq!(roots.len(), 2);
        let r = 1.324_717_957_244_746; // x^3 - x = 1
        assert!((roots[0].x + r).abs() < 1e-9);
        assert_eq!(roots[0].sign, -1);
        assert!((roots[1].x - r).abs() < 1e-9);
        assert_eq!(roots[1].sign, 1);
    }

    #[test]
    fn model_file_roundtrip() {
        let m = EnergyModel::<f64>::double_well().with_offset(0.125);
        let text = write_model(&m);
        let back: EnergyModel<f64> = parse_model(&text).unwrap();
        let j0 = m.eval_jet(0.9, -0.4).unwrap();
        let j1 = back.eval_jet(0.9, -0.4).unwrap();
        assert_eq!(j0.value(), j1.value());
        assert_eq!(j0.dxxx(), j1.dxxx());
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!(parse_model::<f64>("family=separable\nW.coeffs=a,b\n").is_err());
        assert!(parse_model::<f64>("domain.T=1\n").is_err());
        let err = parse_model::<f64>("family=separable\nW.coeffs=1\nbogus\n").unwrap_err();
        assert!(err.to_string().contains("line 3"));
    }
}

//! Increasing, left-continuous drivers: the inputs to the adversarial energy
//! construction and the canonical non-SBV stressors (Cantor approximants).

use crate::error::{Result, RiError};
use crate::scalar::Scalar;

/// A non-decreasing, left-continuous function of time.
#[derive(Clone, Debug, PartialEq)]
pub enum MonotoneDriver<S> {
    /// Piecewise-constant: `u(t) = base` for `t <= jumps[0].0`, then the value
    /// of the last jump strictly before `t`. Left-continuous by evaluation rule.
    Staircase { base: S, jumps: Vec<(S, S)> },
    /// Level-k staircase approximant of the Cantor function on [0,1];
    /// the realized jumps are stored so evaluation matches `Staircase`.
    Cantor { level: u32, jumps: Vec<(S, S)> },
    /// Piecewise-linear interpolation through a sampled monotone table.
    Table { points: Vec<(S, S)> },
}

impl<S: Scalar> MonotoneDriver<S> {
    pub fn staircase(base: S, jumps: Vec<(S, S)>) -> Result<Self> {
        validate_jumps(base, &jumps)?;
        Ok(MonotoneDriver::Staircase { base, jumps })
    }

    pub fn table(points: Vec<(S, S)>) -> Result<Self> {
        if points.len() < 2 {
            return Err(RiError::invalid("table driver needs at least two points"));
        }
        for w in points.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(RiError::invalid("table times must be strictly increasing"));
            }
            if w[1].1 < w[0].1 {
                return Err(RiError::invalid("table values must be non-decreasing"));
            }
        }
        Ok(MonotoneDriver::Table { points })
    }

    /// `u(t)`, left-continuous: at a jump time the pre-jump value is returned.
    pub fn eval(&self, t: S) -> S {
        match self {
            MonotoneDriver::Staircase { base, jumps } => staircase_eval(*base, jumps, t, true),
            MonotoneDriver::Cantor { jumps, .. } => staircase_eval(S::zero(), jumps, t, true),
            MonotoneDriver::Table { points } => table_eval(points, t),
        }
    }

    /// Right limit `u(t+)`.
    pub fn right_limit(&self, t: S) -> S {
        match self {
            MonotoneDriver::Staircase { base, jumps } => staircase_eval(*base, jumps, t, false),
            MonotoneDriver::Cantor { jumps, .. } => staircase_eval(S::zero(), jumps, t, false),
            MonotoneDriver::Table { points } => table_eval(points, t),
        }
    }

    /// Jump list `(time, value after)`; empty for tables.
    pub fn jumps(&self) -> &[(S, S)] {
        match self {
            MonotoneDriver::Staircase { jumps, .. } | MonotoneDriver::Cantor { jumps, .. } => jumps,
            MonotoneDriver::Table { .. } => &[],
        }
    }

    pub fn base_value(&self) -> S {
        match self {
            MonotoneDriver::Staircase { base, .. } => *base,
            MonotoneDriver::Cantor { .. } => S::zero(),
            MonotoneDriver::Table { points } => points[0].1,
        }
    }

    /// Range `[inf u, sup u]`.
    pub fn value_range(&self) -> (S, S) {
        match self {
            MonotoneDriver::Staircase { base, jumps } => (
                *base,
                jumps.last().map(|&(_, v)| v).unwrap_or(*base),
            ),
            MonotoneDriver::Cantor { jumps, .. } => (
                S::zero(),
                jumps.last().map(|&(_, v)| v).unwrap_or(S::zero()),
            ),
            MonotoneDriver::Table { points } => (points[0].1, points[points.len() - 1].1),
        }
    }

    /// Natural time horizon: 1 for Cantor approximants, last knot otherwise.
    pub fn horizon(&self) -> S {
        match self {
            MonotoneDriver::Cantor { .. } => S::one(),
            MonotoneDriver::Staircase { jumps, .. } => jumps
                .last()
                .map(|&(t, _)| if t > S::one() { t } else { S::one() })
                .unwrap_or(S::one()),
            MonotoneDriver::Table { points } => points[points.len() - 1].0,
        }
    }

    /// Smallest plateau width over `[0, horizon]`: the minimum of consecutive
    /// jump gaps, the leading gap (when nonzero) and the trailing gap. Used
    /// for the sharpness default so smoothing never bridges plateaus.
    pub fn min_plateau_width(&self) -> S {
        let horizon = self.horizon();
        match self {
            MonotoneDriver::Staircase { jumps, .. } | MonotoneDriver::Cantor { jumps, .. } => {
                if jumps.is_empty() {
                    return horizon;
                }
                let mut w = horizon;
                let first = jumps[0].0;
                if first > S::zero() && first < w {
                    w = first;
                }
                for pair in jumps.windows(2) {
                    let gap = pair[1].0 - pair[0].0;
                    if gap < w {
                        w = gap;
                    }
                }
                let trailing = horizon - jumps[jumps.len() - 1].0;
                if trailing > S::zero() && trailing < w {
                    w = trailing;
                }
                w
            }
            MonotoneDriver::Table { points } => {
                let mut w = horizon;
                for pair in points.windows(2) {
                    let gap = pair[1].0 - pair[0].0;
                    if gap < w {
                        w = gap;
                    }
                }
                w
            }
        }
    }

    pub fn kind_label(&self) -> &'static str {
        match self {
            MonotoneDriver::Staircase { .. } => "staircase",
            MonotoneDriver::Cantor { .. } => "cantor",
            MonotoneDriver::Table { .. } => "table",
        }
    }
}

fn validate_jumps<S: Scalar>(base: S, jumps: &[(S, S)]) -> Result<()> {
    let mut prev_t = None;
    let mut prev_v = base;
    for &(t, v) in jumps {
        if let Some(pt) = prev_t {
            if t <= pt {
                return Err(RiError::invalid("jump times must be strictly increasing"));
            }
        }
        if v < prev_v {
            return Err(RiError::invalid("jump values must be non-decreasing"));
        }
        prev_t = Some(t);
        prev_v = v;
    }
    Ok(())
}

fn staircase_eval<S: Scalar>(base: S, jumps: &[(S, S)], t: S, left_continuous: bool) -> S {
    // Left-continuous: count jumps strictly before t. Right limit: <= t.
    let mut lo = 0usize;
    let mut hi = jumps.len();
    while lo < hi {
        let mid = (lo + hi) / 2;
        let active = if left_continuous {
            jumps[mid].0 < t
        } else {
            jumps[mid].0 <= t
        };
        if active {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    if lo == 0 {
        base
    } else {
        jumps[lo - 1].1
    }
}

fn table_eval<S: Scalar>(points: &[(S, S)], t: S) -> S {
    if t <= points[0].0 {
        return points[0].1;
    }
    let n = points.len();
    if t >= points[n - 1].0 {
        return points[n - 1].1;
    }
    let mut lo = 0usize;
    let mut hi = n - 1;
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if points[mid].0 <= t {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (t0, v0) = points[lo];
    let (t1, v1) = points[hi];
    v0 + (v1 - v0) * (t - t0) / (t1 - t0)
}

/// Standard level-k staircase approximation of the Cantor function on [0,1]:
/// one jump of size `2^-k` at the left endpoint of each surviving level-k
/// interval, flat on every removed middle third. Monotone 0 -> 1 and
/// left-continuous.
pub fn cantor_driver<S: Scalar>(level: u32) -> Result<MonotoneDriver<S>> {
    if !(1..=12).contains(&level) {
        return Err(RiError::invalid("cantor level must be between 1 and 12"));
    }
    let k = level as usize;
    let three_k = 3f64.powi(level as i32);
    let two_k = 2f64.powi(level as i32);
    let count = 1u64 << k;
    let mut jumps = Vec::with_capacity(count as usize);
    for idx in 0..count {
        // Base-3 digits of the interval's left endpoint: bit b of idx maps to
        // digit 2b, most significant bit first.
        let mut m = 0u64;
        for bit in (0..k).rev() {
            m = m * 3 + 2 * ((idx >> bit) & 1);
        }
        let a = S::of(m as f64 / three_k);
        let v = S::of((idx + 1) as f64 / two_k);
        jumps.push((a, v));
    }
    Ok(MonotoneDriver::Cantor { level, jumps })
}

/// Parse the flat key=value driver format:
/// `type=staircase|cantor|table`, `base=`, `jumps=t1:v1,t2:v2,...`,
/// `level=k`, `points=t1:v1,...`.
pub fn parse_driver<S: Scalar>(text: &str) -> Result<MonotoneDriver<S>> {
    let mut kind = None;
    let mut base = S::zero();
    let mut jumps: Vec<(S, S)> = Vec::new();
    let mut points: Vec<(S, S)> = Vec::new();
    let mut level = None;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let n = lineno + 1;
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| RiError::parse(n, format!("expected key=value, got `{line}`")))?;
        match key.trim() {
            "type" => kind = Some(value.trim().to_string()),
            "base" => base = parse_scalar(value, n)?,
            "level" => {
                level = Some(value.trim().parse::<u32>().map_err(|e| {
                    RiError::parse(n, format!("bad level `{}`: {e}", value.trim()))
                })?)
            }
            "jumps" => jumps = parse_pairs(value, n)?,
            "points" => points = parse_pairs(value, n)?,
            "T" => {} // horizon hint, accepted for compatibility
            other => return Err(RiError::parse(n, format!("unknown driver key `{other}`"))),
        }
    }
    match kind.as_deref() {
        Some("staircase") => MonotoneDriver::staircase(base, jumps),
        Some("cantor") => {
            let level = level.ok_or_else(|| RiError::invalid("cantor driver needs level="))?;
            cantor_driver(level)
        }
        Some("table") => MonotoneDriver::table(points),
        Some(other) => Err(RiError::invalid(format!("unknown driver type `{other}`"))),
        None => Err(RiError::invalid("driver file missing type=")),
    }
}

/// Serialize a driver back to the flat format (inverse of [`parse_driver`]).
pub fn write_driver<S: Scalar>(driver: &MonotoneDriver<S>) -> String {
    let mut out = String::new();
    match driver {
        MonotoneDriver::Staircase { base, jumps } => {
            out.push_str("type=staircase\n");
            out.push_str(&format!("base={:.16e}\n", base.as_f64()));
            out.push_str("jumps=");
            out.push_str(&pairs_to_string(jumps));
            out.push('\n');
        }
        MonotoneDriver::Cantor { level, .. } => {
            out.push_str("type=cantor\n");
            out.push_str(&format!("level={level}\n"));
        }
        MonotoneDriver::Table { points } => {
            out.push_str("type=table\n");
            out.push_str("points=");
            out.push_str(&pairs_to_string(points));
            out.push('\n');
        }
    }
    out
}

fn pairs_to_string<S: Scalar>(pairs: &[(S, S)]) -> String {
    pairs
        .iter()
        .map(|&(a, b)| format!("{:.16e}:{:.16e}", a.as_f64(), b.as_f64()))
        .collect::<Vec<_>>()
        .join(",")
}

fn parse_scalar<S: Scalar>(s: &str, line: usize) -> Result<S> {
    s.trim()
        .parse::<f64>()
        .map(S::of)
        .map_err(|e| RiError::parse(line, format!("bad number `{}`: {e}", s.trim())))
}

fn parse_pairs<S: Scalar>(s: &str, line: usize) -> Result<Vec<(S, S)>> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|item| {
            let (a, b) = item
                .split_once(':')
                .ok_or_else(|| RiError::parse(line, format!("expected t:v, got `{item}`")))?;
            Ok((parse_scalar(a, line)?, parse_scalar(b, line)?))
        })
        .collect()
}

//! Trajectories on a time grid with per-step regime labels and jump records,
//! plus the CSV formats shared by the solvers and the auditor.

use crate::error::{Result, RiError};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Regime {
    Stick,
    Slide,
    Jump,
    Incremental,
}

impl Regime {
    pub fn as_str(self) -> &'static str {
        match self {
            Regime::Stick => "stick",
            Regime::Slide => "slide",
            Regime::Jump => "jump",
            Regime::Incremental => "incremental",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "stick" => Ok(Regime::Stick),
            "slide" => Ok(Regime::Slide),
            "jump" => Ok(Regime::Jump),
            "incremental" => Ok(Regime::Incremental),
            other => Err(RiError::invalid(format!("unknown regime `{other}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JumpRecord<S> {
    pub t: S,
    pub left: S,
    pub right: S,
}

impl<S: Scalar> JumpRecord<S> {
    pub fn size(&self) -> S {
        (self.right - self.left).abs()
    }
}

/// A degenerate tie met during incremental minimization: two basins balanced
/// within tolerance. Recorded rather than resolved canonically.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TieRecord<S> {
    pub t: S,
    pub chosen: S,
    pub alternative: S,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory<S> {
    times: Vec<S>,
    values: Vec<S>,
    regimes: Vec<Regime>,
    jumps: Vec<JumpRecord<S>>,
    pub ties: Vec<TieRecord<S>>,
}

impl<S: Scalar> Trajectory<S> {
    pub fn new(
        times: Vec<S>,
        values: Vec<S>,
        regimes: Vec<Regime>,
        jumps: Vec<JumpRecord<S>>,
    ) -> Result<Self> {
        if times.len() != values.len() || times.len() != regimes.len() {
            return Err(RiError::invalid("trajectory arrays must share length"));
        }
        if times.len() < 2 {
            return Err(RiError::invalid("trajectory needs at least two samples"));
        }
        for w in times.windows(2) {
            if w[1] <= w[0] {
                return Err(RiError::invalid("trajectory times must strictly increase"));
            }
        }
        for j in &jumps {
            if j.size() <= S::zero() {
                return Err(RiError::invalid("jump record with zero size"));
            }
        }
        Ok(Trajectory {
            times,
            values,
            regimes,
            jumps,
            ties: Vec::new(),
        })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn times(&self) -> &[S] {
        &self.times
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }

    pub fn regimes(&self) -> &[Regime] {
        &self.regimes
    }

    pub fn jumps(&self) -> &[JumpRecord<S>] {
        &self.jumps
    }

    pub fn span(&self) -> (S, S) {
        (self.times[0], self.times[self.times.len() - 1])
    }

    /// Pointwise total variation over the full grid.
    pub fn total_variation(&self) -> S {
        self.values
            .windows(2)
            .fold(S::zero(), |acc, w| acc + (w[1] - w[0]).abs())
    }

    /// Largest index with `times[i] <= t` (clamped to the grid).
    pub fn index_at(&self, t: S) -> usize {
        let n = self.times.len();
        let k = self.times.partition_point(|&ti| ti <= t);
        if k == 0 {
            0
        } else if k >= n {
            n - 1
        } else {
            k - 1
        }
    }

    /// Serialize as `t,x,regime,jump_left,jump_right` with 17 significant
    /// digits; jump fields are filled only on jump rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,x,regime,jump_left,jump_right\n");
        for i in 0..self.times.len() {
            let t = self.times[i];
            let jump = if self.regimes[i] == Regime::Jump {
                self.jumps
                    .iter()
                    .min_by(|a, b| {
                        (a.t - t)
                            .abs()
                            .partial_cmp(&(b.t - t).abs())
                            .unwrap_or(std::cmp::Ordering::Equal)
                    })
                    .copied()
            } else {
                None
            };
            match jump {
                Some(j) => out.push_str(&format!(
                    "{:.16e},{:.16e},{},{:.16e},{:.16e}\n",
                    t.as_f64(),
                    self.values[i].as_f64(),
                    self.regimes[i].as_str(),
                    j.left.as_f64(),
                    j.right.as_f64(),
                )),
                None => out.push_str(&format!(
                    "{:.16e},{:.16e},{},,\n",
                    t.as_f64(),
                    self.values[i].as_f64(),
                    self.regimes[i].as_str(),
                )),
            }
        }
        out
    }

    /// Parse the CSV format written by [`Trajectory::to_csv`]. Also accepts
    /// external two-column `t,x` data (regime defaults to `incremental`).
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut times = Vec::new();
        let mut values = Vec::new();
        let mut regimes = Vec::new();
        let mut jumps: Vec<JumpRecord<S>> = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if lineno == 0 && line.starts_with("t,") {
                continue;
            }
            let n = lineno + 1;
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() < 2 {
                return Err(RiError::parse(n, "expected at least t,x"));
            }
            let t = parse_num::<S>(fields[0], n)?;
            let x = parse_num::<S>(fields[1], n)?;
            let regime = if fields.len() >= 3 && !fields[2].is_empty() {
                Regime::parse(fields[2]).map_err(|e| RiError::parse(n, e.to_string()))?
            } else {
                Regime::Incremental
            };
            if regime == Regime::Jump && fields.len() >= 5 {
                let left = fields[3];
                let right = fields[4];
                if !left.is_empty() && !right.is_empty() {
                    jumps.push(JumpRecord {
                        t,
                        left: parse_num::<S>(left, n)?,
                        right: parse_num::<S>(right, n)?,
                    });
                }
            }
            times.push(t);
            values.push(x);
            regimes.push(regime);
        }
        Trajectory::new(times, values, regimes, jumps)
    }
}

fn parse_num<S: Scalar>(s: &str, line: usize) -> Result<S> {
    s.trim()
        .parse::<f64>()
        .map(S::of)
        .map_err(|e| RiError::parse(line, format!("bad number `{}`: {e}", s.trim())))
}

/// Events emitted by the local integrator alongside the trajectory.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EventKind {
    Activation,
    Fold,
    Landing,
}

impl EventKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EventKind::Activation => "activation",
            EventKind::Fold => "fold",
            EventKind::Landing => "landing",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Event<S> {
    pub t: S,
    pub kind: EventKind,
    pub x_before: S,
    pub x_after: S,
}

/// `t,kind,x_before,x_after` CSV for the events stream.
pub fn events_to_csv<S: Scalar>(events: &[Event<S>]) -> String {
    let mut out = String::from("t,kind,x_before,x_after\n");
    for e in events {
        out.push_str(&format!(
            "{:.16e},{},{:.16e},{:.16e}\n",
            e.t.as_f64(),
            e.kind.as_str(),
            e.x_before.as_f64(),
            e.x_after.as_f64(),
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn staircase() -> Trajectory<f64> {
        let times: Vec<f64> = (0..7).map(|i| i as f64).collect();
        let values = vec![0.0, 0.0, 0.0, 0.5, 0.5, 0.75, 0.75];
        let regimes = vec![Regime::Incremental; 7];
        Trajectory::new(times, values, regimes, vec![]).unwrap()
    }

    #[test]
    fn total_variation_staircase() {
        assert_eq!(staircase().total_variation(), 0.75);
    }

    #[test]
    fn rejects_non_increasing_times() {
        let r = Trajectory::new(
            vec![0.0, 0.0],
            vec![1.0, 2.0],
            vec![Regime::Stick, Regime::Stick],
            vec![],
        );
        assert!(r.is_err());
    }

    #[test]
    fn rejects_zero_size_jump() {
        let r = Trajectory::new(
            vec![0.0, 1.0],
            vec![0.0, 0.0],
            vec![Regime::Stick, Regime::Stick],
            vec![JumpRecord {
                t: 0.5,
                left: 1.0,
                right: 1.0,
            }],
        );
        assert!(r.is_err());
    }

    #[test]
    fn csv_roundtrip_with_jump() {
        let traj = Trajectory::new(
            vec![0.0, 0.5, 1.0],
            vec![0.0, 2.0, 2.1],
            vec![Regime::Stick, Regime::Jump, Regime::Slide],
            vec![JumpRecord {
                t: 0.5,
                left: 0.0,
                right: 2.0,
            }],
        )
        .unwrap();
        let text = traj.to_csv();
        let back: Trajectory<f64> = Trajectory::from_csv(&text).unwrap();
        assert_eq!(traj, back);
    }

    #[test]
    fn csv_accepts_bare_columns() {
        let back: Trajectory<f64> = Trajectory::from_csv("0,1.5\n1,2.5\n").unwrap();
        assert_eq!(back.values(), &[1.5, 2.5]);
        assert_eq!(back.regimes()[0], Regime::Incremental);
    }
}

use thiserror::Error;

/// Error type shared by every module in the crate.
#[derive(Debug, Error)]
pub enum RiError {
    #[error("point (t={t}, x={x}) outside the domain box [0, {t_max}] x [-{x_max}, {x_max}]")]
    Domain {
        t: f64,
        x: f64,
        t_max: f64,
        x_max: f64,
    },

    #[error("non-finite jet coefficient at (t={t}, x={x})")]
    NonFinite { t: f64, x: f64 },

    #[error("global minimum at the search boundary (t={t}, x={x}); minimizer escaped the box")]
    UnboundedBelow { t: f64, x: f64 },

    #[error("no admissible landing point inside the domain for the jump at t={t} from x={x}")]
    NoLanding { t: f64, x: f64 },

    #[error("slide stiff at t={t} (curvature {curvature}) without a bracketed fold")]
    StiffSlide { t: f64, curvature: f64 },

    #[error("driver violates the bound 1-M <= u <= M-1 for M={m}: u({t}) = {value}")]
    Bound { t: f64, value: f64, m: f64 },

    #[error("adaptive quadrature failed to reach tolerance {tol} on [{a}, {b}]")]
    Quadrature { a: f64, b: f64, tol: f64 },

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("{0}")]
    Invalid(String),

    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl RiError {
    pub fn invalid(msg: impl Into<String>) -> Self {
        RiError::Invalid(msg.into())
    }

    pub fn parse(line: usize, msg: impl Into<String>) -> Self {
        RiError::Parse {
            line,
            msg: msg.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, RiError>;

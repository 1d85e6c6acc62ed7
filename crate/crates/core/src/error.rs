use core::fmt;

use thiserror::Error;

/// One of the three warp functions of the metric.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Warp {
    W,
    A,
    B,
}

impl fmt::Display for Warp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Warp::W => "w",
            Warp::A => "a",
            Warp::B => "b",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("grid needs at least 16 points, got {0}")]
    GridTooSmall(usize),
    #[error("grid period length must be positive and finite, got {0}")]
    BadPeriod(f64),
    #[error("{component} has {got} entries but the grid has {expected}")]
    LengthMismatch {
        component: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("warp {component} is not positive at index {index} (value {value})")]
    NonPositiveWarp {
        component: Warp,
        index: usize,
        value: f64,
    },
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("radius {radius} is not below half the total arclength {half}")]
    RadiusTooLarge { radius: f64, half: f64 },
    #[error("tube has {got} interior points, need at least {need}")]
    TubeTooSmall { got: usize, need: usize },
    #[error("time step {dt} exceeds the stability limit {limit}")]
    CflViolation { dt: f64, limit: f64 },
    #[error("{what} window {width} is below the resolvable minimum {min}")]
    DegenerateWindow {
        what: &'static str,
        width: f64,
        min: f64,
    },
    #[error("need at least {need} snapshots, got {got}")]
    TooFewSnapshots { need: usize, got: usize },
    #[error("invalid {name}: {reason}")]
    InvalidParameter {
        name: &'static str,
        reason: &'static str,
    },
}

pub type Result<T, E = Error> = core::result::Result<T, E>;

use crate::numerics::{InvalidTolerance, OdeError, QuadError, RootError};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}` = {value}: requires {constraint}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        constraint: &'static str,
    },
    #[error("t = {t} lies outside the constructed range [-{t_max}, {t_max}]")]
    OutOfRange { t: f64, t_max: f64 },
    #[error("grid too coarse: {points} points, need at least 5")]
    GridTooCoarse { points: usize },
    #[error("could not bracket {what}")]
    Bracket { what: &'static str },
    #[error(transparent)]
    Tolerance(#[from] InvalidTolerance),
    #[error("ODE integration failed: {0}")]
    Ode(#[from] OdeError),
    #[error("quadrature failed: {0}")]
    Quad(#[from] QuadError),
    #[error("root finding failed: {0}")]
    Root(#[from] RootError),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn require(ok: bool, name: &'static str, value: f64, constraint: &'static str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            constraint,
        })
    }
}

//! Verification engine for three-dimensional contact metric geometry.
//!
//! * [`jetcalc`]: exact calculus of scalar fields on a chart.
//! * [`tensorlab`]: Levi-Civita connection, curvature and Lie derivatives.
//! * [`contactcore`]: contact metric structures and their classifiers.
//! * [`deformlab`]: model structures and their deformations.
//! * [`report`] and [`sampling`]: per-point residual reports.

pub mod contactcore;
pub mod deformlab;
pub mod jetcalc;
pub mod report;
pub mod sampling;
pub mod tensorlab;

use jetcalc::{EvalError, ParseError, Point};
use thiserror::Error;

pub const ENGINE_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("metric is not positive definite at {point:?} (smallest eigenvalue {min_eigenvalue:e})")]
    NotPositiveDefinite { point: Point, min_eigenvalue: f64 },
    #[error("contact form is degenerate at {point:?}")]
    DegenerateContactForm { point: Point },
    #[error("h has no eigenframe at {point:?}")]
    DegenerateEigenframe { point: Point },
    #[error("{0}")]
    Construction(String),
    #[error("structure file: {0}")]
    StructureFile(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

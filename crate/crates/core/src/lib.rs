#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baseline;
pub mod error;
pub mod fracfd;
pub mod integrators;
pub mod kronspec;
pub mod problem;
pub mod scalar;
pub mod tensor;

pub use error::{Error, Result};
pub use scalar::Real;
pub use tensor::CTensor;
pub use fracfd::{FdOrder, FracOperator};
pub use integrators::{run, Engine, Precision, RunConfig, RunResult, Scheme};
pub use kronspec::{KronSumOperator, SpectralCache};
pub use problem::{FcgleParams, Grid, GridProblem, Source, SourceMode};

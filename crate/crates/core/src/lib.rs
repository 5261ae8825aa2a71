pub mod campaign;
pub mod chain;
pub mod cli;
pub mod curvature;
pub mod decompose;
pub mod dependence;
pub mod error;
pub mod io;
pub mod linalg;
pub mod matrix;
pub mod reduce;
pub mod report;
pub mod scalar;
pub mod seed;
pub mod structure_group;

pub use error::{Error, Result};
pub use linalg::{Operator, OperatorKind, SpaceContext};
pub use matrix::Matrix;
pub use scalar::{Mode, Rational, Scalar};

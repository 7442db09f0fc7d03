//! Scalar and matrix arithmetic over the three base fields.

mod eigen;
mod matrix;
mod quaternion;

pub use eigen::hermitian_eigenvalues;
pub use matrix::{ComplexScalar, Matrix};
pub use quaternion::{embed_quaternion, j_hat, Quaternion};

use serde::{Deserialize, Serialize};

/// Base field of a matrix block.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FieldTag {
    R,
    C,
    H,
}

impl std::fmt::Display for FieldTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FieldTag::R => write!(f, "R"),
            FieldTag::C => write!(f, "C"),
            FieldTag::H => write!(f, "H"),
        }
    }
}

impl std::str::FromStr for FieldTag {
    type Err = crate::error::PertError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "R" | "r" => Ok(FieldTag::R),
            "C" | "c" => Ok(FieldTag::C),
            "H" | "h" => Ok(FieldTag::H),
            other => Err(crate::error::PertError::InvalidInput(format!(
                "unknown field tag {other:?}, expected R, C or H"
            ))),
        }
    }
}

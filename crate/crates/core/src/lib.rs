pub mod canon;
pub mod color;
pub mod diagram;
pub mod ihx;
pub mod lincomb;
pub mod linalg;
pub mod lmo;
pub mod lmo_checks;
pub mod modules;
pub mod ops;
pub mod parse;
pub mod sl2;

pub use num_bigint::BigInt;

pub use canon::{canonicalize, Canon};
pub use color::{Color, Sign};
pub use diagram::{Diagram, Port};
pub use lincomb::{Affine, Coeff, LinComb, QModHalf, QModOne, Q};

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("malformed diagram: {0}")]
    Malformed(String),
    #[error("{0}")]
    Invalid(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

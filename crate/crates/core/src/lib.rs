
pub mod algebra;
pub mod barratt_eccles;
pub mod cli;
pub mod error;
pub mod free_cobar;
pub mod lin;
pub mod linalg;
pub mod mc;
pub mod permutations;
pub mod scalars;
pub mod simplicial;
pub mod trees;
pub use error::{Error, Result};
pub use scalars::{PrimeField, Scalar};

pub mod cm;
pub mod coleman;
pub mod derham;
pub mod error;
pub mod exec;
pub mod hilbert;
pub mod linalg;
pub mod maass;
pub mod matrix;
pub mod nearly_rigid;
pub mod padic;
pub mod poly;
pub mod quadratic;
pub mod quaternion;
pub mod rational;
pub mod sample;
pub mod suites;
pub mod tree;

pub use error::{Error, Result};

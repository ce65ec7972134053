pub mod complement;
pub mod diophantine;
pub mod error;
pub mod json;
pub mod linalg;
pub mod ops;
pub mod oracle;
pub mod random;
pub mod set;
pub mod vector;

pub use error::{Error, Result};
pub use set::{LinearComponent, Metrics, SemilinearSet};
pub use vector::NatVector;

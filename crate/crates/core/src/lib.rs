pub mod certify;
pub mod dense;
pub mod error;
pub mod multicopy;
pub mod partitions;
pub mod rational;
pub mod symgroup;
pub mod tailor;
pub mod werner;

pub use error::{Error, Result};

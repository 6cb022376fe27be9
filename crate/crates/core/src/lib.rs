pub mod auction;
pub mod bench;
pub mod environments;
pub mod error;
pub mod learners;
pub mod metrics;
pub mod numeric;
pub mod projection;

pub use error::{ConfigError, Error, Result};

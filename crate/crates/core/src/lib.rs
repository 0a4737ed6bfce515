pub mod algebra;
pub mod blp;
pub mod error;
pub mod exactlp;
pub mod exec;
pub mod feasibility;
pub mod lifting;
pub mod model;
pub mod opgraph;
pub mod oracle;
pub mod random;
pub mod tuple;

pub use error::{Error, Result};

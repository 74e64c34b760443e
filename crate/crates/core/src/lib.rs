pub mod bank;
pub mod deformation;
pub mod derived;
pub mod error;
pub mod models;
pub mod operator;
pub mod random;
pub mod report;
pub mod scalar;
pub mod space;

pub use error::{Error, Result};

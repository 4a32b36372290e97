pub mod error;
pub mod linalg;
pub mod metrology;
pub mod optimize;
pub mod states;
pub mod verify;

pub use error::{Error, Result};

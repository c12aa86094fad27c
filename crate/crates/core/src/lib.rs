//! Classical correlations, quantum discord and the emergence of a pointer
//! basis for a system qubit measured by a decohering apparatus qubit.

pub mod channels;
pub mod cli;
pub mod correlations;
pub mod dynamics;
pub mod error;
pub mod io;
pub mod qstate;
pub mod sampling;
pub mod verify;

pub use error::{Error, Result};

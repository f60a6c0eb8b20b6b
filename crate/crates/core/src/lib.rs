//! Steady-state ergotropy of a central-qubit battery in a star network
//! coupled to fermionic reservoirs.

pub mod config;
pub mod ergotropy;
pub mod error;
pub mod linalg;
pub mod liouvillian;
pub mod model;
pub mod oracle;
pub mod steadystate;
pub mod sweep;
pub mod verify;

pub use error::{Error, Result};

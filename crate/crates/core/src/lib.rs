//! Coordinating guiding vector fields for multi-robot navigation on
//! parametric paths and surfaces.
//!
//! Each robot's state is extended with one or two virtual coordinates that
//! parametrize its desired set. A guiding vector field drives the robot onto
//! the set and along it, while a consensus term on the virtual coordinates
//! coordinates the robots over an undirected communication graph.

pub mod cli;
pub mod coordination;
pub mod error;
pub mod field;
pub mod geometry;
pub mod guidance;
pub mod safety;
pub mod sim;
pub mod topology;

pub use error::{Error, Result};

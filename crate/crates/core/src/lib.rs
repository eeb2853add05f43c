//! Discrete harmonic uniformization of triangulated multiply connected planar domains.

pub mod complex;
pub mod conjugate;
pub mod error;
pub mod geometry;
pub mod io;
pub mod mapper;
pub mod metrics;
pub mod network;
pub mod pipeline;
pub mod plgeom;
pub mod rectnet;
pub mod singular;
pub mod solver;

pub use error::{Error, Result};

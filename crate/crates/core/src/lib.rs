//! Steady-state heat currents of collectively driven qutrit refrigerators.

pub mod backend;
pub mod basis;
pub mod error;
pub mod floquet;
pub mod floquet_lindblad;
pub mod linalg;
pub mod params;
pub mod redfield;
pub mod superop;
pub mod sweep;
pub mod thermo;
pub mod weak;

pub use backend::{Backend, BackendRegistry, Point, SolveOptions};
pub use error::{Error, Result};

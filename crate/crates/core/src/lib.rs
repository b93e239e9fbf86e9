//! Spectral toolkit for a two-component Camassa-Holm type system on a
//! periodic line: Gevrey and Kato-Masuda norms, the nonlocal right-hand side,
//! numerical checks of the supporting inequalities, lifespan estimates,
//! Taylor expansion in time and a pseudo-spectral integrator with an
//! analyticity-strip tracker.

pub mod error;
pub mod evolution;
pub mod fixtures;
pub mod inequalities;
pub mod lifespan;
pub mod norms;
pub mod ser;
pub mod spectral;
pub mod system;
pub mod taylor;

pub use error::{Error, Result};
pub use spectral::{Field, Grid};
pub use system::{rhs, State, SystemParams};

//! Numerical laboratory for the holonomy inverse problem on hyperbolic
//! surfaces: closed geodesics, primitive trace maps of unitary connections and
//! the homoclinic (Parry monoid) machinery, with exact flat-connection oracles.

pub mod bundle;
pub mod classes;
pub mod error;
pub mod hyperbolic;
pub mod linalg;
pub mod parry;
pub mod tracemap;
pub mod transport;
pub mod word;

pub use error::{LabError, Result};

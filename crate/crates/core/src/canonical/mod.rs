//! Canonical forms of horizontal curves and the deformations between them.

pub mod families;
pub mod paths;
pub mod reduce;

pub use families::*;
pub use paths::*;
pub use reduce::*;

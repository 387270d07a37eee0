pub mod cpoly;
pub mod curve;
pub mod error;
pub mod fibration;
pub mod groups;
pub mod invariance;
pub mod canonical;
pub mod quadrature;
pub mod geometry;
pub mod cli;

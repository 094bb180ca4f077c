//! Exact computations on parametrized plane and Legendrian curve germs.

pub mod contact;
pub mod deformation;
pub mod germ;
pub mod jet;

//! Rational Newton maps of entire functions `p·exp(q)`.

pub mod algebra;
pub mod classify;
pub mod dynamics;
pub mod newton;
pub mod render;
pub mod verify;

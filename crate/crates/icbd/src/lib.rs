//! Iterated conditional B-dominance and related solution concepts for dynamic
//! games with ordinal preferences.

pub mod applications;
pub mod cardinal;
pub mod dominance;
pub mod fixtures;
pub mod game;
pub mod io;
pub mod lp;
pub mod rational;
pub mod solvers;
pub mod strategies;
pub mod witness;

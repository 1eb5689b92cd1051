//! Serialization and auxiliary I/O.

pub mod format;
pub mod generator;
pub mod oracle;
pub mod trace;

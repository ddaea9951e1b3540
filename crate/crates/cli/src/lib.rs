//! Library surface of the `retroscat` binary: config schema, the four
//! commands, and the validation suite. Kept as a library so integration
//! tests can drive the exact command implementations.

pub mod commands;
pub mod config;
pub mod validate;

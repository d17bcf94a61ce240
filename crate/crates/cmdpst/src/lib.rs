//! Std companion to `cmdpst-core`: JSON formats, the warehouse benchmark
//! harness and the command-line driver.

pub mod bench;
pub mod cli;
pub mod formats;

//! Batch driver for the ionscat engine: run configuration, parallel sweeps
//! with a resumable block archive, resonance search and plot data.

pub mod archive;
pub mod commands;
pub mod config;
pub mod plotdata;
pub mod resonances;
pub mod runner;
pub mod tables;

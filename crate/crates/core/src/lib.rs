//! Exact simulation and analysis of parity-encoded QAOA on
//! Sherrington–Kirkpatrick spin glasses.
//!
//! The crate is organised bottom-up: [`sk`] instances and exact solutions,
//! the [`layout`] of parity qubits and plaquettes, angle [`schedule`]s, the
//! statevector [`engine`], reverse causal cones in [`rcc`], closed-form
//! single-layer averages in [`analytic`], the [`optimizer`], and the batch
//! [`runner`] that writes CSV results.

pub mod analytic;
pub mod engine;
pub mod error;
pub mod exec;
pub mod gf2;
pub mod layout;
pub mod optimizer;
pub mod rcc;
pub mod rng;
pub mod schedule;
pub mod runner;
pub mod sk;

pub use error::{Error, Result};
pub use exec::Exec;

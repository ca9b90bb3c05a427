//! # ris-ra
//!
//! Link-level Monte Carlo simulation of two-phase random access in
//! RIS-aided IoT networks.
//!
//! One random-access frame consists of a downlink training block and an
//! uplink access block of `S` slots each. The surface cycles through `S`
//! phase-shift configurations, one per slot. Devices measure their channel
//! quality in each training slot, choose access slots with one of four
//! policies, and the access point peels the resulting collision pattern with
//! successive interference cancellation. Throughput and energy efficiency
//! come out of a frame-level power model.
//!
//! ## Layout
//!
//! - [`channel`]: surface geometry, path loss, array factor, SNR, placements.
//! - [`access`]: quality measurement and the CARP / s-SCP / CRDSAP / IRSAP policies.
//! - [`receiver`]: slot occupancy and the SIC peeling decoder.
//! - [`power`]: power consumption, throughput and energy-efficiency metrics.
//! - [`engine`]: frame simulation, Monte Carlo aggregation, sweeps and the
//!   optimal-`S` search.
//! - [`config`]: flat `key = value` scenario files with the reference defaults.
//! - [`report`]: CSV rows and run manifests.
//! - [`rng`]: reproducible per-trial random substreams.
//!
//! The runnable programs under `examples/` walk through each of these.

pub mod access;
pub mod channel;
pub mod config;
pub mod engine;
mod error;
pub mod power;
pub mod receiver;
pub mod report;
pub mod rng;

pub use error::{Error, Result};

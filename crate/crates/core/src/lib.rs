//! Deterministic discrete-event simulation of geo-distributed cloud
//! deployments: regional user bases with diurnal traffic, a latency/bandwidth
//! internet model, data centers with time-shared (processor-sharing) virtual
//! machines, pluggable brokers and load balancers, and pay-as-you-go cost
//! accounting.
//!
//! The crate is `no_std` (alloc required) and has no IO; loading scenario
//! files and rendering reports live in the companion `geodes` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod datacenter;
pub mod engine;
pub mod event;
pub mod internet;
pub mod metrics;
pub mod report;
pub mod rng;
pub mod scenario;
pub mod traffic;

pub use engine::{run, RunOptions};
pub use report::SimulationReport;
pub use scenario::{ScenarioConfig, ValidatedScenario};

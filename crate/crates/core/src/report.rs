//! Finalized run output: the machine-readable report every renderer consumes.
//! Times are reported in milliseconds; money in currency units.

use alloc::string::String;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::metrics::StatAccumulator;

/// Weighted count with min/avg/max in milliseconds. `null` fields mean the
/// accumulator saw no samples ("n/a", never 0).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatSummary {
    pub count: u64,
    pub avg_ms: Option<f64>,
    pub min_ms: Option<f64>,
    pub max_ms: Option<f64>,
}

impl StatSummary {
    pub fn from_accumulator(a: &StatAccumulator) -> Self {
        if a.is_empty() {
            Self {
                count: 0,
                avg_ms: None,
                min_ms: None,
                max_ms: None,
            }
        } else {
            Self {
                count: a.count,
                avg_ms: a.avg().map(|s| s * 1000.0),
                min_ms: Some(a.min * 1000.0),
                max_ms: Some(a.max * 1000.0),
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UserBaseRow {
    pub name: String,
    pub response: StatSummary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DataCenterRow {
    pub name: String,
    pub servicing: StatSummary,
    /// Grouped requests routed here and total payload bytes (both legs,
    /// weighted) — the transfer-cost ledger.
    pub requests: u64,
    pub bytes_transferred: u128,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HourlyRow {
    pub user_base: String,
    pub hour: u32,
    pub count: u64,
    pub avg_ms: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DataCenterCost {
    pub name: String,
    pub vm_cost: f64,
    pub transfer_cost: f64,
    pub total: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostReport {
    pub per_dc: Vec<DataCenterCost>,
    pub vm_total: f64,
    pub transfer_total: f64,
    pub grand_total: f64,
}

/// Per user base, per routed data center grouped-request counts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoutingRow {
    pub user_base: String,
    pub data_center: String,
    pub requests: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetadata {
    pub event_count: u64,
    /// Grouped request units.
    pub requests_originated: u64,
    pub responses_recorded: u64,
    /// Requests still in flight when the drain cap hit (0 in healthy runs).
    pub in_flight_at_cap: u64,
    pub drain_warning: bool,
    pub routing: Vec<RoutingRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationReport {
    /// Content hash of the canonical scenario document; filled by the loader.
    pub scenario_digest: String,
    pub seed: u64,
    pub start_hour: u32,
    pub duration_s: u64,
    pub overall_response: StatSummary,
    pub dc_processing: StatSummary,
    pub user_bases: Vec<UserBaseRow>,
    pub data_centers: Vec<DataCenterRow>,
    pub hourly: Vec<HourlyRow>,
    pub cost: CostReport,
    pub run: RunMetadata,
}

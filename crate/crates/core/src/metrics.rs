//! Online statistics (overall, per user base, per data center, hourly) and
//! the pay-as-you-go cost model. Values are kept in seconds internally;
//! millisecond conversion happens only at report time.

use alloc::vec::Vec;

use crate::datacenter::dc_servicing_time;
use crate::scenario::{SECONDS_PER_DAY, SECONDS_PER_HOUR};
use crate::traffic::Request;

pub const BYTES_PER_GB: f64 = (1u64 << 30) as f64; // binary GB

/// Weighted min/avg/max accumulator. An empty accumulator renders as "n/a",
/// never as zero.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct StatAccumulator {
    pub count: u64,
    pub sum: f64,
    pub min: f64,
    pub max: f64,
}

impl StatAccumulator {
    pub fn add(&mut self, value: f64, weight: u64) {
        if self.count == 0 {
            self.min = value;
            self.max = value;
        } else {
            if value < self.min {
                self.min = value;
            }
            if value > self.max {
                self.max = value;
            }
        }
        self.count += weight;
        self.sum += value * weight as f64;
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    pub fn avg(&self) -> Option<f64> {
        if self.count == 0 {
            None
        } else {
            Some(self.sum / self.count as f64)
        }
    }
}

/// GMT hour-of-day bucket of an origination instant.
pub fn hour_bucket(t_origin: f64, offset_s: f64) -> usize {
    let day_s = (t_origin + offset_s) % SECONDS_PER_DAY as f64;
    let b = (day_s / SECONDS_PER_HOUR as f64) as usize;
    b.min(23)
}

/// All response/servicing accumulators for one run.
#[derive(Debug, Clone)]
pub struct Metrics {
    pub overall_response: StatAccumulator,
    pub dc_processing: StatAccumulator,
    pub per_ub_response: Vec<StatAccumulator>,
    pub per_dc_servicing: Vec<StatAccumulator>,
    /// Per (user base, GMT hour-of-day) response-time accumulator.
    pub hourly: Vec<[StatAccumulator; 24]>,
    offset_s: f64,
}

impl Metrics {
    pub fn new(ub_count: usize, dc_count: usize, start_hour: u32) -> Self {
        Self {
            overall_response: StatAccumulator::default(),
            dc_processing: StatAccumulator::default(),
            per_ub_response: alloc::vec![StatAccumulator::default(); ub_count],
            per_dc_servicing: alloc::vec![StatAccumulator::default(); dc_count],
            hourly: alloc::vec![[StatAccumulator::default(); 24]; ub_count],
            offset_s: (start_hour as u64 * SECONDS_PER_HOUR) as f64,
        }
    }

    /// Folds one fully timestamped request into every accumulator it touches,
    /// with multiplicity `weight`.
    pub fn record_response(&mut self, r: &Request) {
        let t_response = r.t_response.expect("record_response before response");
        let response_time = t_response - r.t_origin;
        let servicing = dc_servicing_time(r);
        let dc = r.dc.expect("record_response before routing");

        self.overall_response.add(response_time, r.weight);
        self.per_ub_response[r.user_base].add(response_time, r.weight);
        self.hourly[r.user_base][hour_bucket(r.t_origin, self.offset_s)]
            .add(response_time, r.weight);
        self.dc_processing.add(servicing, r.weight);
        self.per_dc_servicing[dc].add(servicing, r.weight);
    }
}

/// Prorated VM-hours cost: no rounding to whole hours.
pub fn vm_cost(vm_lifetimes_s: &[f64], rate_per_vm_hour: f64) -> f64 {
    vm_lifetimes_s
        .iter()
        .map(|&life| life / SECONDS_PER_HOUR as f64 * rate_per_vm_hour)
        .sum()
}

/// Data transfer cost over both legs of every weighted request routed to the
/// data center, at a binary-GB rate.
pub fn transfer_cost(bytes_total: u128, rate_per_gb: f64) -> f64 {
    bytes_total as f64 / BYTES_PER_GB * rate_per_gb
}

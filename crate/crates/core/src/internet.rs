//! WAN model (one-way latency plus fair-shared bandwidth per region pair) and
//! service-broker routing.

use crate::scenario::{BrokerPolicy, DataCenterSpec, InternetCharacteristics, Region, REGION_COUNT};

/// Concurrent transfer counts per region pair. The count is snapshotted at
/// transfer start; a transfer in flight is never re-shared.
#[derive(Debug, Clone, Default)]
pub struct LinkLoad {
    counts: [[u32; REGION_COUNT]; REGION_COUNT],
}

impl LinkLoad {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registers a transfer and returns the concurrency it sees (itself
    /// included).
    pub fn begin(&mut self, origin: Region, dest: Region) -> u32 {
        let c = &mut self.counts[origin.index()][dest.index()];
        *c += 1;
        *c
    }

    pub fn end(&mut self, origin: Region, dest: Region) {
        let c = &mut self.counts[origin.index()][dest.index()];
        assert!(*c > 0, "transfer underflow on pair {}->{}", origin.0, dest.0);
        *c -= 1;
    }

    pub fn concurrent(&self, origin: Region, dest: Region) -> u32 {
        self.counts[origin.index()][dest.index()]
    }
}

/// One-way transfer time: propagation latency plus serialization over the
/// pair's bandwidth divided by the concurrent transfer count.
pub fn transfer_delay(
    origin: Region,
    dest: Region,
    size_bytes: u64,
    internet: &InternetCharacteristics,
    concurrent: u32,
) -> f64 {
    let latency_s = internet.latency_ms[origin.index()][dest.index()] / 1000.0;
    let bandwidth_bps = internet.bandwidth_mbps[origin.index()][dest.index()] * 1e6
        / concurrent.max(1) as f64;
    latency_s + size_bytes as f64 * 8.0 / bandwidth_bps
}

/// Picks the serving data center. `probes` carries the per-DC exponentially
/// weighted recent servicing time in seconds (used by OptimizeResponseTime).
/// Ties break to declaration order.
pub fn route(
    policy: BrokerPolicy,
    origin: Region,
    dcs: &[DataCenterSpec],
    probes: &[f64],
    internet: &InternetCharacteristics,
) -> usize {
    assert!(!dcs.is_empty(), "route over zero data centers");
    let score = |i: usize, dc: &DataCenterSpec| -> f64 {
        let latency_s = internet.latency_ms[origin.index()][dc.region.index()] / 1000.0;
        match policy {
            BrokerPolicy::ClosestDataCenter => latency_s,
            BrokerPolicy::OptimizeResponseTime => latency_s + probes[i],
        }
    };
    let mut best = 0;
    let mut best_score = score(0, &dcs[0]);
    for (i, dc) in dcs.iter().enumerate().skip(1) {
        let s = score(i, dc);
        if s < best_score {
            best = i;
            best_score = s;
        }
    }
    best
}

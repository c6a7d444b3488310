//! Experiment description: user bases, data centers, internet characteristics,
//! policies, and whole-scenario validation.
//!
//! Units are fixed across the crate: memory/storage in MB, processing in MIPS,
//! payloads in bytes, peak windows in GMT hours on a 0-24 scale, durations in
//! seconds. Peak windows are half-open `[start, end)`; hour 24 means
//! end-of-day.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::datacenter::{plan_placement, PlacementError};

/// Number of world regions, indexed 0-5.
pub const REGION_COUNT: usize = 6;

pub const SECONDS_PER_HOUR: u64 = 3600;
pub const SECONDS_PER_DAY: u64 = 86_400;

/// World region index, 0-5.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Region(pub u8);

impl Region {
    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn is_valid(self) -> bool {
        (self.0 as usize) < REGION_COUNT
    }
}

fn default_grouping_factor() -> u64 {
    1000
}

fn default_instruction_length() -> u64 {
    250
}

fn default_cost_rate() -> f64 {
    0.10
}

fn default_os() -> String {
    String::from("Linux")
}

fn default_vmm() -> String {
    String::from("Xen")
}

fn default_throttle_limit() -> u32 {
    1
}

/// One regional population of users with a diurnal peak/off-peak profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UserBaseSpec {
    pub name: String,
    pub region: Region,
    pub requests_per_user_per_hour: f64,
    pub data_size_per_request: u64,
    pub peak_start_hour: u32,
    pub peak_end_hour: u32,
    pub avg_peak_users: u64,
    pub avg_off_peak_users: u64,
    /// Instructions a VM must execute per request.
    #[serde(default = "default_instruction_length")]
    pub instruction_length: u64,
    /// Real requests represented by one simulated request unit; all
    /// statistics are weighted by it.
    #[serde(default = "default_grouping_factor")]
    pub grouping_factor: u64,
}

/// Physical machine inside a data center.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HostSpec {
    pub memory_mb: u64,
    pub storage_mb: u64,
    pub processor_count: u32,
    /// MIPS per processor.
    pub processor_speed_mips: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VmAllocationPolicy {
    TimeShared,
    SpaceShared,
}

impl Default for VmAllocationPolicy {
    fn default() -> Self {
        VmAllocationPolicy::TimeShared
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataCenterSpec {
    pub name: String,
    pub region: Region,
    /// Inert metadata, reported but never consulted.
    #[serde(default = "default_os")]
    pub os: String,
    #[serde(default = "default_vmm")]
    pub vmm: String,
    pub hosts: Vec<HostSpec>,
    pub vm_count: u32,
    pub vm_image_size_mb: u64,
    pub vm_memory_mb: u64,
    /// MIPS allocated per VM, capped at host processor speed.
    pub vm_mips: u64,
    #[serde(default)]
    pub vm_allocation_policy: VmAllocationPolicy,
    #[serde(default = "default_cost_rate")]
    pub cost_per_vm_hour: f64,
    #[serde(default = "default_cost_rate")]
    pub cost_per_gb_transfer: f64,
    /// Allow the sum of VM mips on a host to exceed its capacity.
    #[serde(default)]
    pub allow_mips_oversubscription: bool,
}

/// Region-to-region one-way latency and aggregate bandwidth matrices.
/// Diagonal entries are the intra-region values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InternetCharacteristics {
    pub latency_ms: [[f64; REGION_COUNT]; REGION_COUNT],
    pub bandwidth_mbps: [[f64; REGION_COUNT]; REGION_COUNT],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BrokerPolicy {
    ClosestDataCenter,
    OptimizeResponseTime,
}

impl Default for BrokerPolicy {
    fn default() -> Self {
        BrokerPolicy::ClosestDataCenter
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LoadBalancerPolicy {
    RoundRobin,
    Throttled,
    ActiveMonitoring,
}

impl Default for LoadBalancerPolicy {
    fn default() -> Self {
        LoadBalancerPolicy::RoundRobin
    }
}

impl LoadBalancerPolicy {
    pub fn parse_name(name: &str) -> Option<Self> {
        match name {
            "RoundRobin" | "round-robin" | "round_robin" => Some(Self::RoundRobin),
            "Throttled" | "throttled" => Some(Self::Throttled),
            "ActiveMonitoring" | "active-monitoring" | "active_monitoring" => {
                Some(Self::ActiveMonitoring)
            }
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ArrivalProcess {
    /// Nonhomogeneous Poisson via thinning.
    Poisson,
    /// Fixed spacing 1/rate, re-evaluated at rate changes.
    Deterministic,
}

impl Default for ArrivalProcess {
    fn default() -> Self {
        ArrivalProcess::Poisson
    }
}

/// Full experiment description; the simulator's entire input surface.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub user_bases: Vec<UserBaseSpec>,
    pub data_centers: Vec<DataCenterSpec>,
    pub internet: InternetCharacteristics,
    #[serde(default)]
    pub broker_policy: BrokerPolicy,
    #[serde(default)]
    pub load_balancer: LoadBalancerPolicy,
    #[serde(default = "default_throttle_limit")]
    pub throttle_limit: u32,
    pub duration_s: u64,
    #[serde(default)]
    pub seed: u64,
    /// Seconds of linear peak transition at each window boundary.
    #[serde(default)]
    pub ramp_s: u64,
    #[serde(default)]
    pub arrival_process: ArrivalProcess,
}

/// One validation failure. Validation collects all of them, not just the first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    /// Dotted path of the offending element, e.g. `user_bases[2]`.
    pub locus: String,
    pub message: String,
}

impl core::fmt::Display for Violation {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "{}: {}", self.locus, self.message)
    }
}

/// A scenario that passed [`validate_scenario`]. Immutable afterwards; safe to
/// share read-only across concurrent runs.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct ValidatedScenario(ScenarioConfig);

impl ValidatedScenario {
    pub fn into_inner(self) -> ScenarioConfig {
        self.0
    }
}

impl core::ops::Deref for ValidatedScenario {
    type Target = ScenarioConfig;

    fn deref(&self) -> &ScenarioConfig {
        &self.0
    }
}

/// Checks every type invariant plus VM placement feasibility. Pure: the same
/// input always yields the same violation list in the same order.
pub fn validate_scenario(cfg: &ScenarioConfig) -> Result<ValidatedScenario, Vec<Violation>> {
    let mut out = Vec::new();
    let mut push = |locus: String, message: String| out.push(Violation { locus, message });

    if cfg.user_bases.is_empty() {
        push(String::from("user_bases"), String::from("empty user_bases"));
    }
    if cfg.data_centers.is_empty() {
        push(String::from("data_centers"), String::from("empty data_centers"));
    }
    if cfg.duration_s == 0 {
        push(String::from("duration_s"), String::from("must be positive"));
    }
    if cfg.throttle_limit == 0 {
        push(String::from("throttle_limit"), String::from("must be positive"));
    }

    for (i, ub) in cfg.user_bases.iter().enumerate() {
        let locus = |field: &str| format!("user_bases[{i}].{field}");
        if !ub.region.is_valid() {
            push(locus("region"), format!("region out of range: {}", ub.region.0));
        }
        if !(ub.requests_per_user_per_hour > 0.0) {
            push(locus("requests_per_user_per_hour"), String::from("must be positive"));
        }
        if ub.data_size_per_request == 0 {
            push(locus("data_size_per_request"), String::from("must be positive"));
        }
        if ub.instruction_length == 0 {
            push(locus("instruction_length"), String::from("must be positive"));
        }
        if ub.grouping_factor == 0 {
            push(locus("grouping_factor"), String::from("must be positive"));
        }
        if ub.peak_start_hour > 24 || ub.peak_end_hour > 24 {
            push(locus("peak_hours"), String::from("hours must lie in 0-24"));
        }
        if ub.peak_start_hour >= ub.peak_end_hour {
            push(locus("peak_hours"), String::from("empty peak window"));
        }
        // a group never exceeds the population it represents
        let min_nonzero = [ub.avg_peak_users, ub.avg_off_peak_users]
            .into_iter()
            .filter(|&u| u > 0)
            .min();
        if let Some(min_users) = min_nonzero {
            if ub.grouping_factor > min_users {
                push(
                    locus("grouping_factor"),
                    format!(
                        "grouping_factor {} exceeds smallest nonzero user count {}",
                        ub.grouping_factor, min_users
                    ),
                );
            }
        }
    }

    for (i, dc) in cfg.data_centers.iter().enumerate() {
        let locus = |field: &str| format!("data_centers[{i}].{field}");
        if !dc.region.is_valid() {
            push(locus("region"), format!("region out of range: {}", dc.region.0));
        }
        if dc.hosts.is_empty() {
            push(locus("hosts"), String::from("at least one host required"));
        }
        if dc.vm_count == 0 {
            push(locus("vm_count"), String::from("must be positive"));
        }
        if dc.vm_mips == 0 {
            push(locus("vm_mips"), String::from("must be positive"));
        }
        for (h, host) in dc.hosts.iter().enumerate() {
            if host.memory_mb == 0
                || host.storage_mb == 0
                || host.processor_count == 0
                || host.processor_speed_mips == 0
            {
                push(
                    format!("data_centers[{i}].hosts[{h}]"),
                    String::from("all host fields must be strictly positive"),
                );
            }
        }
        if !(dc.cost_per_vm_hour >= 0.0) {
            push(locus("cost_per_vm_hour"), String::from("must be nonnegative"));
        }
        if !(dc.cost_per_gb_transfer >= 0.0) {
            push(locus("cost_per_gb_transfer"), String::from("must be nonnegative"));
        }
        if !dc.hosts.is_empty() && dc.vm_count > 0 {
            match plan_placement(dc) {
                Ok(_) => {}
                Err(PlacementError::Infeasible(why)) => {
                    push(format!("data_centers[{i}]"), format!("placement infeasible: {why}"));
                }
            }
        }
    }

    for (name, matrix) in [
        ("latency_ms", &cfg.internet.latency_ms),
        ("bandwidth_mbps", &cfg.internet.bandwidth_mbps),
    ] {
        for row in matrix.iter() {
            for &v in row.iter() {
                let bad = if name == "bandwidth_mbps" { !(v > 0.0) } else { !(v >= 0.0) };
                if bad {
                    push(
                        format!("internet.{name}"),
                        String::from("entries must be finite and positive (latency: nonnegative)"),
                    );
                }
            }
        }
    }

    if out.is_empty() {
        Ok(ValidatedScenario(cfg.clone()))
    } else {
        Err(out)
    }
}

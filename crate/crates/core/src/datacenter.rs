//! Data center internals: VM placement on hosts, the processor-sharing
//! (time-shared) run queue, and the pluggable VM load balancer.

use alloc::collections::VecDeque;
use alloc::string::String;
use alloc::vec::Vec;

use crate::scenario::{DataCenterSpec, LoadBalancerPolicy, VmAllocationPolicy};
use crate::traffic::Request;

/// Tolerance for remaining-work bookkeeping; anything more negative is a bug.
const WORK_EPSILON: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PlacementError {
    Infeasible(String),
}

/// First-fit-decreasing by VM memory across hosts. Returns the host index for
/// each VM. TimeShared admits any VM count subject to memory (and mips unless
/// oversubscription is allowed); SpaceShared additionally reserves one core
/// per VM.
pub fn plan_placement(spec: &DataCenterSpec) -> Result<Vec<usize>, PlacementError> {
    if spec.hosts.is_empty() {
        return Err(PlacementError::Infeasible(String::from("no hosts")));
    }
    let n = spec.vm_count as usize;
    let mut mem_left: Vec<u64> = spec.hosts.iter().map(|h| h.memory_mb).collect();
    let mut cores_left: Vec<u32> = spec.hosts.iter().map(|h| h.processor_count).collect();
    let mut mips_left: Vec<u64> = spec
        .hosts
        .iter()
        .map(|h| h.processor_count as u64 * h.processor_speed_mips)
        .collect();

    // all VMs are identical, so decreasing order is the identity
    let mut assignment = Vec::with_capacity(n);
    for vm in 0..n {
        let mut placed = None;
        for (h, host) in spec.hosts.iter().enumerate() {
            if mem_left[h] < spec.vm_memory_mb {
                continue;
            }
            let vm_mips = spec.vm_mips.min(host.processor_speed_mips);
            if !spec.allow_mips_oversubscription && mips_left[h] < vm_mips {
                continue;
            }
            if spec.vm_allocation_policy == VmAllocationPolicy::SpaceShared && cores_left[h] == 0 {
                continue;
            }
            mem_left[h] -= spec.vm_memory_mb;
            if !spec.allow_mips_oversubscription {
                mips_left[h] -= vm_mips;
            }
            if spec.vm_allocation_policy == VmAllocationPolicy::SpaceShared {
                cores_left[h] -= 1;
            }
            placed = Some(h);
            break;
        }
        match placed {
            Some(h) => assignment.push(h),
            None => {
                return Err(PlacementError::Infeasible(alloc::format!(
                    "vm {vm} of {n} does not fit on any host"
                )))
            }
        }
    }
    Ok(assignment)
}

/// A virtual machine's processor-sharing run queue. Between events each of
/// the `n` active requests progresses at `mips / n` instructions per second.
#[derive(Debug, Clone)]
pub struct VmState {
    pub id: u32,
    pub host: usize,
    pub mips: u64,
    /// (request id, remaining instructions)
    pub active: Vec<(u64, f64)>,
    pub last_advance: f64,
    /// Bumped on every membership change; voids stale completion events.
    pub epoch: u64,
}

impl VmState {
    pub fn new(id: u32, host: usize, mips: u64) -> Self {
        Self {
            id,
            host,
            mips,
            active: Vec::new(),
            last_advance: 0.0,
            epoch: 0,
        }
    }

    /// Runs the processor-sharing rate forward to `t`. The engine guarantees
    /// no membership change happened inside the interval.
    pub fn advance(&mut self, t: f64) {
        assert!(t >= self.last_advance, "ps_advance moved backwards");
        let n = self.active.len();
        if n > 0 {
            let done = self.mips as f64 * (t - self.last_advance) / n as f64;
            for (_, remaining) in self.active.iter_mut() {
                *remaining -= done;
                assert!(
                    *remaining > -WORK_EPSILON * self.mips as f64,
                    "negative remaining work: {remaining}"
                );
                if *remaining < 0.0 {
                    *remaining = 0.0;
                }
            }
        }
        self.last_advance = t;
    }

    pub fn admit(&mut self, req_id: u64, instructions: u64) {
        self.active.push((req_id, instructions as f64));
        self.epoch += 1;
    }

    pub fn remove(&mut self, req_id: u64) {
        let pos = self
            .active
            .iter()
            .position(|&(id, _)| id == req_id)
            .expect("removing a request the VM does not hold");
        self.active.swap_remove(pos);
        self.epoch += 1;
    }

    /// Earliest completion among active requests, assuming membership stays
    /// fixed: `clock + remaining * n / mips`. Ties go to the lowest request
    /// id. `None` when idle. Must be called with the VM advanced to `clock`.
    pub fn next_completion(&self, clock: f64) -> Option<(f64, u64)> {
        let n = self.active.len();
        if n == 0 {
            return None;
        }
        let mut best: Option<(f64, u64)> = None;
        for &(id, remaining) in &self.active {
            let t = clock + remaining * n as f64 / self.mips as f64;
            let better = match best {
                None => true,
                Some((bt, bid)) => t < bt || (t == bt && id < bid),
            };
            if better {
                best = Some((t, id));
            }
        }
        best
    }

    pub fn in_service(&self) -> usize {
        self.active.len()
    }
}

/// Instantiates the VMs of a data center on its hosts. Infeasible placement
/// is a hard fault here; validation excludes it for accepted scenarios.
pub fn place_vms(spec: &DataCenterSpec) -> Vec<VmState> {
    let assignment = match plan_placement(spec) {
        Ok(a) => a,
        Err(PlacementError::Infeasible(why)) => {
            panic!("placement infeasible for {}: {why}", spec.name)
        }
    };
    assignment
        .into_iter()
        .enumerate()
        .map(|(id, host)| {
            let mips = spec.vm_mips.min(spec.hosts[host].processor_speed_mips);
            VmState::new(id as u32, host, mips)
        })
        .collect()
}

/// In-datacenter VM assignment policy state.
#[derive(Debug, Clone)]
pub struct BalancerState {
    pub policy: LoadBalancerPolicy,
    pub rr_cursor: usize,
    pub in_flight: Vec<u32>,
    pub throttle_limit: u32,
    /// Requests admitted to the DC but waiting for VM capacity (Throttled).
    pub wait_queue: VecDeque<u64>,
}

impl BalancerState {
    pub fn new(policy: LoadBalancerPolicy, vm_count: usize, throttle_limit: u32) -> Self {
        Self {
            policy,
            rr_cursor: 0,
            in_flight: alloc::vec![0; vm_count],
            throttle_limit,
            wait_queue: VecDeque::new(),
        }
    }

    /// Picks a VM for one request and books it in-flight. `None` means the
    /// request must wait at the DC (Throttled with every VM saturated).
    pub fn assign(&mut self) -> Option<usize> {
        let n = self.in_flight.len();
        assert!(n > 0, "assign over zero VMs");
        match self.policy {
            LoadBalancerPolicy::RoundRobin => {
                let vm = self.rr_cursor;
                self.rr_cursor = (self.rr_cursor + 1) % n;
                self.in_flight[vm] += 1;
                Some(vm)
            }
            LoadBalancerPolicy::Throttled => {
                let vm = self.in_flight.iter().position(|&c| c < self.throttle_limit)?;
                self.in_flight[vm] += 1;
                Some(vm)
            }
            LoadBalancerPolicy::ActiveMonitoring => {
                let mut vm = 0;
                for (i, &c) in self.in_flight.iter().enumerate() {
                    if c < self.in_flight[vm] {
                        vm = i;
                    }
                }
                self.in_flight[vm] += 1;
                Some(vm)
            }
        }
    }

    /// Marks a request finished on `vm` and, under Throttled, hands back a
    /// waiting request to dispatch there.
    pub fn release(&mut self, vm: usize) -> Option<(u64, usize)> {
        assert!(self.in_flight[vm] > 0, "release on an idle VM");
        self.in_flight[vm] -= 1;
        if self.policy == LoadBalancerPolicy::Throttled {
            if self.in_flight[vm] < self.throttle_limit {
                if let Some(req) = self.wait_queue.pop_front() {
                    self.in_flight[vm] += 1;
                    return Some((req, vm));
                }
            }
        }
        None
    }
}

/// Servicing time of a completed request: DC arrival to service completion,
/// queueing and balancer wait included.
pub fn dc_servicing_time(r: &Request) -> f64 {
    let arrive = r.t_arrive_dc.expect("servicing time before DC arrival");
    let complete = r.t_complete.expect("servicing time before completion");
    complete - arrive
}

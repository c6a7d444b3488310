//! The run loop: wires traffic, internet, data centers and metrics onto the
//! future event list and produces the finalized report.
//!
//! One engine instance is strictly single-threaded; independent engines over
//! different scenarios share no mutable state.

use alloc::string::String;
use alloc::vec::Vec;

use crate::datacenter::{place_vms, BalancerState, VmState};
use crate::event::{EventPayload, EventQueue};
use crate::internet::{route, transfer_delay, LinkLoad};
use crate::metrics::{transfer_cost, vm_cost, Metrics};
use crate::report::{
    CostReport, DataCenterCost, DataCenterRow, HourlyRow, RoutingRow, RunMetadata,
    SimulationReport, StatSummary, UserBaseRow,
};
use crate::rng::fnv1a64;
use crate::scenario::ValidatedScenario;
use crate::traffic::{ArrivalGen, Request};

/// Simulated seconds the run may drain past `duration_s` before in-flight
/// requests are abandoned with a warning.
pub const DRAIN_CAP_S: f64 = 3600.0;

/// EWMA weight for the broker's recent-servicing-time probe.
const PROBE_ALPHA: f64 = 0.1;

#[derive(Debug, Clone, Copy)]
pub struct RunOptions {
    pub seed: u64,
    /// GMT hour mapped to simulated t=0.
    pub start_hour: u32,
}

/// One processed event, as exposed to the optional trace sink.
#[derive(Debug, Clone, Copy)]
pub struct TraceRecord {
    pub time: f64,
    pub seq: u64,
    pub kind: &'static str,
    pub payload_digest: u64,
}

struct DcRuntime {
    vms: Vec<VmState>,
    balancer: BalancerState,
    /// Exponentially weighted recent servicing time, the broker probe.
    ewma_servicing: f64,
    /// Both payload legs of every weighted request routed here.
    bytes: u128,
}

fn payload_digest(p: &EventPayload) -> u64 {
    let mut h = fnv1a64(p.kind_name().as_bytes());
    let fields: [u64; 4] = match *p {
        EventPayload::RequestOrigination { ub } => [ub as u64, 0, 0, 0],
        EventPayload::ArriveAtDataCenter { req } => [req, 0, 0, 0],
        EventPayload::ServiceCompletion { dc, vm, req, epoch } => {
            [dc as u64, vm as u64, req, epoch]
        }
        EventPayload::ResponseArrival { req } => [req, 0, 0, 0],
        EventPayload::PeriodicSample | EventPayload::SimulationEnd => [0; 4],
    };
    for f in fields {
        h ^= f;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Runs one simulation to completion and returns the report (with an empty
/// scenario digest; the loader owns content hashing).
pub fn run(
    scenario: &ValidatedScenario,
    opts: RunOptions,
    mut trace: Option<&mut dyn FnMut(&TraceRecord)>,
) -> SimulationReport {
    let cfg = &**scenario;
    let duration = cfg.duration_s as f64;
    let drain_cap = duration + DRAIN_CAP_S;

    let mut queue = EventQueue::new();
    let mut generators: Vec<ArrivalGen> = cfg
        .user_bases
        .iter()
        .map(|ub| ArrivalGen::new(ub, cfg.ramp_s, opts.start_hour, cfg.arrival_process, opts.seed))
        .collect();
    let mut dcs: Vec<DcRuntime> = cfg
        .data_centers
        .iter()
        .map(|spec| {
            let vms = place_vms(spec);
            let vm_count = vms.len();
            DcRuntime {
                vms,
                balancer: BalancerState::new(cfg.load_balancer, vm_count, cfg.throttle_limit),
                ewma_servicing: 0.0,
                bytes: 0,
            }
        })
        .collect();

    let mut requests: Vec<Request> = Vec::new();
    let mut link_load = LinkLoad::new();
    let mut metrics = Metrics::new(cfg.user_bases.len(), cfg.data_centers.len(), opts.start_hour);
    let mut routing = alloc::vec![alloc::vec![0u64; cfg.data_centers.len()]; cfg.user_bases.len()];

    for (ub, gen) in generators.iter_mut().enumerate() {
        let t = gen.next_arrival(0.0, duration);
        if t.is_finite() {
            queue.schedule(t, EventPayload::RequestOrigination { ub });
        }
    }
    queue.schedule(duration, EventPayload::SimulationEnd);
    if trace.is_some() {
        let mut t = 3600.0;
        while t < duration {
            queue.schedule(t, EventPayload::PeriodicSample);
            t += 3600.0;
        }
    }

    let mut event_count: u64 = 0;
    let mut originated: u64 = 0;
    let mut responded: u64 = 0;
    let mut drain_warning = false;

    while let Some(ev) = queue.pop() {
        if ev.time > drain_cap {
            drain_warning = true;
            break;
        }
        event_count += 1;
        if let Some(sink) = trace.as_mut() {
            sink(&TraceRecord {
                time: ev.time,
                seq: ev.seq,
                kind: ev.payload.kind_name(),
                payload_digest: payload_digest(&ev.payload),
            });
        }
        let now = ev.time;
        match ev.payload {
            EventPayload::RequestOrigination { ub } => {
                let id = requests.len() as u64;
                let spec = &cfg.user_bases[ub];
                let mut req = Request::new(id, ub, spec, now);
                let probes: Vec<f64> = dcs.iter().map(|d| d.ewma_servicing).collect();
                let dc = route(cfg.broker_policy, spec.region, &cfg.data_centers, &probes, &cfg.internet);
                req.dc = Some(dc);
                routing[ub][dc] += 1;
                originated += 1;
                dcs[dc].bytes += req.size_bytes as u128 * req.weight as u128; // request leg

                let dest = cfg.data_centers[dc].region;
                let concurrent = link_load.begin(spec.region, dest);
                let delay =
                    transfer_delay(spec.region, dest, req.size_bytes, &cfg.internet, concurrent);
                requests.push(req);
                queue.schedule(now + delay, EventPayload::ArriveAtDataCenter { req: id });

                let next = generators[ub].next_arrival(now, duration);
                if next.is_finite() {
                    queue.schedule(next, EventPayload::RequestOrigination { ub });
                }
            }
            EventPayload::ArriveAtDataCenter { req } => {
                let (dc, origin, instructions) = {
                    let r = &mut requests[req as usize];
                    r.t_arrive_dc = Some(now);
                    (r.dc.unwrap(), r.origin_region, r.instructions)
                };
                link_load.end(origin, cfg.data_centers[dc].region);
                let rt = &mut dcs[dc];
                match rt.balancer.assign() {
                    Some(vm) => {
                        requests[req as usize].vm = Some(vm as u32);
                        let vm_state = &mut rt.vms[vm];
                        vm_state.advance(now);
                        vm_state.admit(req, instructions);
                        schedule_completion(&mut queue, dc, vm, vm_state, now);
                    }
                    None => rt.balancer.wait_queue.push_back(req),
                }
            }
            EventPayload::ServiceCompletion { dc, vm, req, epoch } => {
                if dcs[dc].vms[vm].epoch != epoch {
                    continue; // superseded by a later membership change
                }
                let rt = &mut dcs[dc];
                rt.vms[vm].advance(now);
                rt.vms[vm].remove(req);
                let (origin, size_bytes, weight, servicing) = {
                    let r = &mut requests[req as usize];
                    r.t_complete = Some(now);
                    (
                        r.origin_region,
                        r.size_bytes,
                        r.weight,
                        now - r.t_arrive_dc.unwrap(),
                    )
                };
                rt.ewma_servicing =
                    PROBE_ALPHA * servicing + (1.0 - PROBE_ALPHA) * rt.ewma_servicing;

                if let Some((waiting, target_vm)) = rt.balancer.release(vm) {
                    let instructions = requests[waiting as usize].instructions;
                    requests[waiting as usize].vm = Some(target_vm as u32);
                    let vm_state = &mut rt.vms[target_vm];
                    vm_state.advance(now);
                    vm_state.admit(waiting, instructions);
                }

                rt.bytes += size_bytes as u128 * weight as u128; // response leg
                let from = cfg.data_centers[dc].region;
                let concurrent = link_load.begin(from, origin);
                let delay = transfer_delay(from, origin, size_bytes, &cfg.internet, concurrent);
                queue.schedule(now + delay, EventPayload::ResponseArrival { req });

                let vm_state = &mut dcs[dc].vms[vm];
                schedule_completion(&mut queue, dc, vm, vm_state, now);
            }
            EventPayload::ResponseArrival { req } => {
                let r = &mut requests[req as usize];
                r.t_response = Some(now);
                link_load.end(cfg.data_centers[r.dc.unwrap()].region, r.origin_region);
                responded += 1;
                metrics.record_response(r);
            }
            EventPayload::PeriodicSample | EventPayload::SimulationEnd => {}
        }
    }

    finalize(cfg, opts, &metrics, &dcs, &routing, event_count, originated, responded, drain_warning)
}

fn schedule_completion(
    queue: &mut EventQueue,
    dc: usize,
    vm: usize,
    vm_state: &VmState,
    now: f64,
) {
    if let Some((t, req)) = vm_state.next_completion(now) {
        queue.schedule(
            t,
            EventPayload::ServiceCompletion {
                dc,
                vm,
                req,
                epoch: vm_state.epoch,
            },
        );
    }
}

#[allow(clippy::too_many_arguments)]
fn finalize(
    cfg: &crate::scenario::ScenarioConfig,
    opts: RunOptions,
    metrics: &Metrics,
    dcs: &[DcRuntime],
    routing: &[Vec<u64>],
    event_count: u64,
    originated: u64,
    responded: u64,
    drain_warning: bool,
) -> SimulationReport {
    let duration = cfg.duration_s as f64;

    let user_bases = cfg
        .user_bases
        .iter()
        .enumerate()
        .map(|(i, ub)| UserBaseRow {
            name: ub.name.clone(),
            response: StatSummary::from_accumulator(&metrics.per_ub_response[i]),
        })
        .collect();

    let data_centers = cfg
        .data_centers
        .iter()
        .enumerate()
        .map(|(i, dc)| DataCenterRow {
            name: dc.name.clone(),
            servicing: StatSummary::from_accumulator(&metrics.per_dc_servicing[i]),
            requests: routing.iter().map(|row| row[i]).sum(),
            bytes_transferred: dcs[i].bytes,
        })
        .collect();

    let mut hourly = Vec::new();
    for (i, ub) in cfg.user_bases.iter().enumerate() {
        for (hour, acc) in metrics.hourly[i].iter().enumerate() {
            if !acc.is_empty() {
                hourly.push(HourlyRow {
                    user_base: ub.name.clone(),
                    hour: hour as u32,
                    count: acc.count,
                    avg_ms: acc.avg().map(|s| s * 1000.0),
                });
            }
        }
    }

    let per_dc_cost: Vec<DataCenterCost> = cfg
        .data_centers
        .iter()
        .enumerate()
        .map(|(i, dc)| {
            let lifetimes = alloc::vec![duration; dcs[i].vms.len()];
            let vm = vm_cost(&lifetimes, dc.cost_per_vm_hour);
            let transfer = transfer_cost(dcs[i].bytes, dc.cost_per_gb_transfer);
            DataCenterCost {
                name: dc.name.clone(),
                vm_cost: vm,
                transfer_cost: transfer,
                total: vm + transfer,
            }
        })
        .collect();
    let vm_total: f64 = per_dc_cost.iter().map(|c| c.vm_cost).sum();
    let transfer_total: f64 = per_dc_cost.iter().map(|c| c.transfer_cost).sum();
    let grand_total: f64 = per_dc_cost.iter().map(|c| c.total).sum();

    let mut routing_rows = Vec::new();
    for (i, row) in routing.iter().enumerate() {
        for (j, &count) in row.iter().enumerate() {
            if count > 0 {
                routing_rows.push(RoutingRow {
                    user_base: cfg.user_bases[i].name.clone(),
                    data_center: cfg.data_centers[j].name.clone(),
                    requests: count,
                });
            }
        }
    }

    SimulationReport {
        scenario_digest: String::new(),
        seed: opts.seed,
        start_hour: opts.start_hour,
        duration_s: cfg.duration_s,
        overall_response: StatSummary::from_accumulator(&metrics.overall_response),
        dc_processing: StatSummary::from_accumulator(&metrics.dc_processing),
        user_bases,
        data_centers,
        hourly,
        cost: CostReport {
            per_dc: per_dc_cost,
            vm_total,
            transfer_total,
            grand_total,
        },
        run: RunMetadata {
            event_count,
            requests_originated: originated,
            responses_recorded: responded,
            in_flight_at_cap: originated - responded,
            drain_warning,
            routing: routing_rows,
        },
    }
}

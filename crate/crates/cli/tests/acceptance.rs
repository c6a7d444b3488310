//! End-to-end acceptance gate. Each test prints one PASS line with the
//! measured figure next to its pinned tolerance.

use std::path::{Path, PathBuf};
use std::time::Instant;

use geodes::config::{load_scenario, load_validated};
use geodes::{compare_policies, run_scenario};
use geodes_core::datacenter::{BalancerState, VmState};
use geodes_core::rng::SplitMix64;
use geodes_core::scenario::{LoadBalancerPolicy, ScenarioConfig};

fn repo_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..").canonicalize().unwrap()
}

fn load(name: &str) -> (ScenarioConfig, geodes_core::ValidatedScenario) {
    let text = std::fs::read_to_string(repo_root().join("scenarios").join(name)).unwrap();
    let cfg = load_scenario(&text).unwrap();
    let validated = load_validated(&text).unwrap();
    (cfg, validated)
}

fn shipped_scenarios() -> Vec<(String, ScenarioConfig, geodes_core::ValidatedScenario)> {
    let dir = repo_root().join("scenarios");
    let mut out = Vec::new();
    let mut names: Vec<_> = std::fs::read_dir(&dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .filter(|n| n.ends_with(".json"))
        .collect();
    names.sort();
    for name in names {
        let text = std::fs::read_to_string(dir.join(&name)).unwrap();
        // skip fragments (e.g. the bundled internet matrices)
        if !text.contains("\"user_bases\"") {
            continue;
        }
        let cfg = load_scenario(&text).unwrap();
        let validated = load_validated(&text).unwrap();
        out.push((name, cfg, validated));
    }
    out
}

#[test]
fn criterion_1_paper_scenario_structural_reproduction() {
    let (cfg, scenario) = load("paper.json");
    let started = Instant::now();
    let report = run_scenario(&scenario, cfg.seed, 0, None);
    let elapsed = started.elapsed();
    assert!(elapsed.as_secs_f64() < 60.0, "run took {elapsed:?}");

    // (a) per-DC VM costs equal each other and the closed form
    let vm_costs: Vec<f64> = report.cost.per_dc.iter().map(|c| c.vm_cost).collect();
    assert_eq!(vm_costs[0], vm_costs[1]);
    for (c, dc) in report.cost.per_dc.iter().zip(&cfg.data_centers) {
        let expected =
            dc.vm_count as f64 * dc.cost_per_vm_hour * cfg.duration_s as f64 / 3600.0;
        assert!((c.vm_cost - expected).abs() < 1e-9, "vm cost of {}: {} vs {expected}", c.name, c.vm_cost);
        assert_eq!(c.total, c.vm_cost + c.transfer_cost, "additivity of {}", c.name);
    }
    // (b) grand total = VM total + transfer total
    let diff = (report.cost.grand_total - (report.cost.vm_total + report.cost.transfer_total)).abs();
    assert!(diff < 1e-9, "grand total off by {diff}");
    // (c) table shape
    assert_eq!(report.user_bases.len(), 6);
    assert_eq!(report.data_centers.len(), 2);
    assert!(report.run.responses_recorded > 0);
    println!(
        "ACCEPTANCE 1: PASS — paper scenario in {:.2} s, per-DC VM cost {} == {} (closed form), grand total {:.4} == vm {:.4} + transfer {:.4}, 6 UB rows / 2 DC rows",
        elapsed.as_secs_f64(),
        vm_costs[0],
        vm_costs[1],
        report.cost.grand_total,
        report.cost.vm_total,
        report.cost.transfer_total
    );
}

#[test]
fn criterion_2_mm1_ps_queueing_oracle() {
    let (cfg, scenario) = load("mm1_ps.json");
    // single VM at 10000 MIPS, 1000-instruction requests: mu = 10/s;
    // 1920 users * 15 req/h: lambda = 8/s; PS sojourn law 1/(mu-lambda)
    let mu = cfg.data_centers[0].vm_mips as f64 / cfg.user_bases[0].instruction_length as f64;
    let lambda = cfg.user_bases[0].avg_peak_users as f64
        * cfg.user_bases[0].requests_per_user_per_hour
        / 3600.0;
    assert_eq!(mu, 10.0);
    assert_eq!(lambda, 8.0);
    let expected_s = 1.0 / (mu - lambda);

    let started = Instant::now();
    let report = run_scenario(&scenario, cfg.seed, 0, None);
    let elapsed = started.elapsed();
    assert!(elapsed.as_secs_f64() < 60.0, "run took {elapsed:?}");
    assert!(report.dc_processing.count >= 100_000, "only {} completions", report.dc_processing.count);
    let avg_s = report.dc_processing.avg_ms.unwrap() / 1000.0;
    let rel = (avg_s - expected_s).abs() / expected_s;
    assert!(rel < 0.05, "mean servicing {avg_s} vs {expected_s} (rel {rel})");
    println!(
        "ACCEPTANCE 2: PASS — {} completions in {:.2} s, mean servicing {:.4} s vs 1/(mu-lambda) = {:.4} s (rel err {:.3} < 0.05)",
        report.dc_processing.count,
        elapsed.as_secs_f64(),
        avg_s,
        expected_s,
        rel
    );
}

/// Fixed-step processor-sharing integrator, independent of the event path.
fn fixed_step_ps(jobs: &[(f64, f64)], mips: f64, dt: f64) -> Vec<f64> {
    let n = jobs.len();
    let mut remaining: Vec<f64> = jobs.iter().map(|&(_, len)| len).collect();
    let mut done: Vec<Option<f64>> = vec![None; n];
    let mut t = 0.0;
    while done.iter().any(|d| d.is_none()) {
        let active: Vec<usize> = (0..n)
            .filter(|&i| jobs[i].0 <= t + 1e-12 && done[i].is_none())
            .collect();
        if !active.is_empty() {
            let share = mips * dt / active.len() as f64;
            let rate = mips / active.len() as f64;
            for &i in &active {
                remaining[i] -= share;
                if remaining[i] <= 0.0 {
                    // interpolate the zero crossing inside the step
                    done[i] = Some(t + dt + remaining[i] / rate);
                }
            }
        }
        t += dt;
        assert!(t < 1e5, "integrator ran away");
    }
    done.into_iter().map(Option::unwrap).collect()
}

/// Event-driven single-VM run over the same instance.
fn event_driven_ps(jobs: &[(f64, f64)], mips: u64) -> Vec<f64> {
    let mut vm = VmState::new(0, 0, mips);
    let mut completions = vec![0.0; jobs.len()];
    let mut next_job = 0;
    let mut clock = 0.0;
    let mut finished = 0;
    while finished < jobs.len() {
        let next_completion = vm.next_completion(clock);
        let next_arrival = jobs.get(next_job).map(|&(t, _)| t);
        let take_completion = match (next_completion, next_arrival) {
            (Some((tc, _)), Some(ta)) => tc <= ta,
            (Some(_), None) => true,
            (None, Some(_)) => false,
            (None, None) => unreachable!("stalled instance"),
        };
        if take_completion {
            let (tc, id) = next_completion.unwrap();
            vm.advance(tc);
            vm.remove(id);
            completions[id as usize] = tc;
            clock = tc;
            finished += 1;
        } else {
            let ta = next_arrival.unwrap();
            vm.advance(ta);
            vm.admit(next_job as u64, jobs[next_job].1 as u64);
            clock = ta;
            next_job += 1;
        }
    }
    completions
}

#[test]
fn criterion_3_brute_force_ps_oracle() {
    let mips = 5000u64;
    let dt = 1e-4;
    let mut rng = SplitMix64::new(0xC3);
    let mut worst: f64 = 0.0;
    for instance in 0..20 {
        let job_count = 1 + (rng.next_u64() % 10) as usize;
        let mut jobs: Vec<(f64, f64)> = (0..job_count)
            .map(|_| {
                // arrivals on the integrator grid, lengths 2000-20000 instr
                let arrival = (rng.next_u64() % 200) as f64 * 0.01;
                let length = (2000 + rng.next_u64() % 18_001) as f64;
                (arrival, length)
            })
            .collect();
        jobs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let event_times = event_driven_ps(&jobs, mips);
        let oracle_times = fixed_step_ps(&jobs, mips as f64, dt);
        for (i, (ev, or)) in event_times.iter().zip(&oracle_times).enumerate() {
            let rel = (ev - or).abs() / or;
            worst = worst.max(rel);
            assert!(
                rel < 1e-3,
                "instance {instance} job {i}: event {ev} vs oracle {or} (rel {rel})"
            );
        }
    }
    println!(
        "ACCEPTANCE 3: PASS — 20 randomized instances (≤10 jobs), worst completion-time deviation {worst:.2e} < 1e-3"
    );
}

#[test]
fn criterion_4_conservation_and_bucketing() {
    for (name, cfg, scenario) in shipped_scenarios() {
        let report = run_scenario(&scenario, cfg.seed, 0, None);
        assert_eq!(
            report.run.requests_originated, report.run.responses_recorded,
            "conservation in {name}"
        );
        assert_eq!(report.run.in_flight_at_cap, 0, "in-flight in {name}");
        let hourly_total: u64 = report.hourly.iter().map(|h| h.count).sum();
        assert_eq!(hourly_total, report.overall_response.count, "bucketing in {name}");

        // overall avg vs the weighted mean of per-UB averages
        let (mut weighted_sum, mut weight) = (0.0, 0u64);
        for row in &report.user_bases {
            if let Some(avg) = row.response.avg_ms {
                weighted_sum += avg * row.response.count as f64;
                weight += row.response.count;
            }
        }
        let overall = report.overall_response.avg_ms.unwrap();
        let rel = (overall - weighted_sum / weight as f64).abs() / overall;
        assert!(rel < 1e-9, "weighted-mean identity in {name}: rel {rel}");
        println!(
            "ACCEPTANCE 4: PASS — {name}: {} originated = {} responded, hourly buckets sum, weighted-mean identity rel {:.1e} < 1e-9",
            report.run.requests_originated, report.run.responses_recorded, rel
        );
    }
}

#[test]
fn criterion_5_latency_floor() {
    let (cfg, scenario) = load("paper.json");
    let report = run_scenario(&scenario, cfg.seed, 0, None);
    for row in &report.user_bases {
        let ub = cfg.user_bases.iter().find(|u| u.name == row.name).unwrap();
        // every routed DC of this user base bounds its minimum response time
        let routed: Vec<&str> = report
            .run
            .routing
            .iter()
            .filter(|r| r.user_base == row.name)
            .map(|r| r.data_center.as_str())
            .collect();
        assert!(!routed.is_empty());
        for dc_name in routed {
            let dc = cfg.data_centers.iter().find(|d| d.name == dc_name).unwrap();
            let rtt_ms = cfg.internet.latency_ms[ub.region.index()][dc.region.index()]
                + cfg.internet.latency_ms[dc.region.index()][ub.region.index()];
            let min_ms = row.response.min_ms.unwrap();
            assert!(
                min_ms >= rtt_ms,
                "{}: min {min_ms} ms below round trip {rtt_ms} ms via {dc_name}",
                row.name
            );
        }
    }
    println!("ACCEPTANCE 5: PASS — every per-UB min response time ≥ round-trip latency of its route");
}

#[test]
fn criterion_6_round_robin_fairness() {
    let mut balancer = BalancerState::new(LoadBalancerPolicy::RoundRobin, 7, 1);
    let mut counts = vec![0u64; 7];
    for _ in 0..10_000 {
        counts[balancer.assign().unwrap()] += 1;
    }
    let spread = counts.iter().max().unwrap() - counts.iter().min().unwrap();
    assert!(spread <= 1, "per-VM counts {counts:?}");
    println!("ACCEPTANCE 6: PASS — 10^4 requests over 7 VMs, per-VM count spread {spread} ≤ 1");
}

#[test]
fn criterion_7_determinism() {
    let (cfg, scenario) = load("paper.json");
    let a = run_scenario(&scenario, cfg.seed, 0, None);
    let b = run_scenario(&scenario, cfg.seed, 0, None);
    let json_a = geodes::render::canonical_report_json(&a);
    let json_b = geodes::render::canonical_report_json(&b);
    assert_eq!(json_a, json_b, "canonical reports differ between identical runs");

    let outcomes = compare_policies(
        &cfg,
        &[LoadBalancerPolicy::RoundRobin, LoadBalancerPolicy::RoundRobin],
        cfg.seed,
        0,
    )
    .unwrap();
    assert_eq!(outcomes[0], outcomes[1], "self-comparison columns differ");
    println!(
        "ACCEPTANCE 7: PASS — identical canonical JSON ({} bytes) across reruns; self-comparison columns identical",
        json_a.len()
    );
}

#[test]
fn criterion_8_broker_routes_to_latency_argmin() {
    let (cfg, scenario) = load("paper.json");
    let report = run_scenario(&scenario, cfg.seed, 0, None);
    for row in &report.run.routing {
        let ub = cfg.user_bases.iter().find(|u| u.name == row.user_base).unwrap();
        let argmin = cfg
            .data_centers
            .iter()
            .enumerate()
            .min_by(|(_, a), (_, b)| {
                cfg.internet.latency_ms[ub.region.index()][a.region.index()]
                    .total_cmp(&cfg.internet.latency_ms[ub.region.index()][b.region.index()])
            })
            .map(|(_, dc)| dc.name.clone())
            .unwrap();
        assert_eq!(row.data_center, argmin, "routing of {}", row.user_base);
    }
    println!("ACCEPTANCE 8: PASS — every user base routed to its latency-argmin data center");
}

/// Cross-check promised by the comparison examples: balancing never changes
/// the VM cost column, and argmin beats blind rotation on the skewed setup.
#[test]
fn comparison_examples_hold() {
    let (cfg, _) = load("skewed_compare.json");
    let outcomes = compare_policies(
        &cfg,
        &[LoadBalancerPolicy::RoundRobin, LoadBalancerPolicy::ActiveMonitoring],
        cfg.seed,
        0,
    )
    .unwrap();
    assert!(
        outcomes[1].avg_ms.unwrap() <= outcomes[0].avg_ms.unwrap(),
        "ActiveMonitoring {:?} vs RoundRobin {:?}",
        outcomes[1].avg_ms,
        outcomes[0].avg_ms
    );

    let (paper_cfg, _) = load("paper.json");
    let outcomes = compare_policies(
        &paper_cfg,
        &[
            LoadBalancerPolicy::RoundRobin,
            LoadBalancerPolicy::Throttled,
            LoadBalancerPolicy::ActiveMonitoring,
        ],
        paper_cfg.seed,
        0,
    )
    .unwrap();
    for pair in outcomes.windows(2) {
        assert_eq!(pair[0].per_dc_vm_cost, pair[1].per_dc_vm_cost);
    }
}

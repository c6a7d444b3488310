//! IO, file formats and run orchestration around `geodes-core`.

pub mod config;
pub mod render;

use geodes_core::engine::{RunOptions, TraceRecord};
use geodes_core::report::SimulationReport;
use geodes_core::scenario::{
    validate_scenario, LoadBalancerPolicy, ScenarioConfig, ValidatedScenario, Violation,
};

/// Runs one simulation and stamps the scenario digest into the report.
pub fn run_scenario(
    scenario: &ValidatedScenario,
    seed: u64,
    start_hour: u32,
    trace: Option<&mut dyn FnMut(&TraceRecord)>,
) -> SimulationReport {
    let mut report = geodes_core::run(scenario, RunOptions { seed, start_hour }, trace);
    report.scenario_digest = config::scenario_digest(scenario);
    report
}

/// One column of the policy comparison table.
#[derive(Debug, Clone, PartialEq)]
pub struct PolicyOutcome {
    pub policy: LoadBalancerPolicy,
    pub avg_ms: Option<f64>,
    pub min_ms: Option<f64>,
    pub max_ms: Option<f64>,
    pub grand_total: f64,
    pub per_dc_vm_cost: Vec<f64>,
}

/// Runs the identical scenario and seed once per policy. The per-policy
/// simulations are independent engines and run concurrently.
pub fn compare_policies(
    cfg: &ScenarioConfig,
    policies: &[LoadBalancerPolicy],
    seed: u64,
    start_hour: u32,
) -> Result<Vec<PolicyOutcome>, Vec<Violation>> {
    let scenarios: Vec<ValidatedScenario> = policies
        .iter()
        .map(|&policy| {
            let mut c = cfg.clone();
            c.load_balancer = policy;
            validate_scenario(&c)
        })
        .collect::<Result<_, _>>()?;

    let reports: Vec<SimulationReport> = std::thread::scope(|s| {
        let handles: Vec<_> = scenarios
            .iter()
            .map(|scenario| s.spawn(move || run_scenario(scenario, seed, start_hour, None)))
            .collect();
        handles.into_iter().map(|h| h.join().expect("policy run")).collect()
    });

    Ok(policies
        .iter()
        .zip(reports)
        .map(|(&policy, report)| PolicyOutcome {
            policy,
            avg_ms: report.overall_response.avg_ms,
            min_ms: report.overall_response.min_ms,
            max_ms: report.overall_response.max_ms,
            grand_total: report.cost.grand_total,
            per_dc_vm_cost: report.cost.per_dc.iter().map(|c| c.vm_cost).collect(),
        })
        .collect())
}

/// Side-by-side text table for `compare_policies` output.
pub fn render_comparison(outcomes: &[PolicyOutcome]) -> String {
    let fmt_ms = |v: Option<f64>| v.map(|x| format!("{x:.2}")).unwrap_or_else(|| "n/a".into());
    let mut out = format!(
        "{:<18}{:>12}{:>12}{:>12}{:>14}\n",
        "Policy", "Avg (ms)", "Min (ms)", "Max (ms)", "Total Cost"
    );
    for o in outcomes {
        out.push_str(&format!(
            "{:<18}{:>12}{:>12}{:>12}{:>14.2}\n",
            format!("{:?}", o.policy),
            fmt_ms(o.avg_ms),
            fmt_ms(o.min_ms),
            fmt_ms(o.max_ms),
            o.grand_total
        ));
    }
    out
}

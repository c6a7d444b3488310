//! Report rendering: canonical JSON, per-table CSV files, and the text
//! summary printed after a run. Every number here is read off the machine
//! report; nothing is recomputed.

use geodes_core::report::SimulationReport;
use std::io::Write;
use std::path::Path;

/// Key-sorted JSON with a trailing newline; byte-stable for a given report.
pub fn canonical_report_json(report: &SimulationReport) -> String {
    let value = serde_json::to_value(report).expect("report serializes");
    let mut s = serde_json::to_string_pretty(&value).expect("value renders");
    s.push('\n');
    s
}

fn ms(v: Option<f64>) -> String {
    match v {
        Some(x) => format!("{x:.2}"),
        None => "n/a".into(),
    }
}

/// Human-readable summary shaped like the classic overall/per-region/
/// servicing/cost report tables.
pub fn text_summary(report: &SimulationReport) -> String {
    let mut out = String::new();
    let push = |out: &mut String, line: String| {
        out.push_str(&line);
        out.push('\n');
    };

    push(&mut out, format!("scenario digest: {}", report.scenario_digest));
    push(
        &mut out,
        format!(
            "seed: {}  start hour: {:02}:00 GMT  duration: {} s",
            report.seed, report.start_hour, report.duration_s
        ),
    );
    push(&mut out, String::new());
    push(&mut out, "Overall Response Time".into());
    push(&mut out, format!("{:<30}{:>12}{:>12}{:>12}", "", "Avg (ms)", "Min (ms)", "Max (ms)"));
    for (label, s) in [
        ("Overall Response Time:", &report.overall_response),
        ("Data Center Processing Time:", &report.dc_processing),
    ] {
        push(
            &mut out,
            format!(
                "{label:<30}{:>12}{:>12}{:>12}",
                ms(s.avg_ms),
                ms(s.min_ms),
                ms(s.max_ms)
            ),
        );
    }

    push(&mut out, String::new());
    push(&mut out, "Response Time by Region".into());
    push(&mut out, format!("{:<12}{:>12}{:>12}{:>12}", "Userbase", "Avg (ms)", "Min (ms)", "Max (ms)"));
    for row in &report.user_bases {
        let s = &row.response;
        push(
            &mut out,
            format!("{:<12}{:>12}{:>12}{:>12}", row.name, ms(s.avg_ms), ms(s.min_ms), ms(s.max_ms)),
        );
    }

    push(&mut out, String::new());
    push(&mut out, "Data Center Request Servicing Times".into());
    push(&mut out, format!("{:<12}{:>12}{:>12}{:>12}", "Data Center", "Avg (ms)", "Min (ms)", "Max (ms)"));
    for row in &report.data_centers {
        let s = &row.servicing;
        push(
            &mut out,
            format!("{:<12}{:>12}{:>12}{:>12}", row.name, ms(s.avg_ms), ms(s.min_ms), ms(s.max_ms)),
        );
    }

    push(&mut out, String::new());
    push(&mut out, "Cost".into());
    push(
        &mut out,
        format!("Total Virtual Machine Cost: ${:.2}", report.cost.vm_total),
    );
    push(
        &mut out,
        format!("Total Data Transfer Cost:   ${:.2}", report.cost.transfer_total),
    );
    push(&mut out, format!("Grand Total:                ${:.2}", report.cost.grand_total));
    push(&mut out, String::new());
    push(
        &mut out,
        format!("{:<12}{:>12}{:>20}{:>12}", "Data Center", "VM Cost", "Data Transfer Cost", "Total"),
    );
    for c in &report.cost.per_dc {
        push(
            &mut out,
            format!(
                "{:<12}{:>12.3}{:>20.3}{:>12.3}",
                c.name, c.vm_cost, c.transfer_cost, c.total
            ),
        );
    }

    if report.run.drain_warning || report.run.in_flight_at_cap > 0 {
        push(&mut out, String::new());
        push(
            &mut out,
            format!(
                "warning: drain cap reached with {} request(s) in flight",
                report.run.in_flight_at_cap
            ),
        );
    }
    out
}

fn csv_opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x}")).unwrap_or_default()
}

/// Writes one CSV file per report table into `dir`.
pub fn write_csv(report: &SimulationReport, dir: &Path) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;

    let mut overall = std::fs::File::create(dir.join("overall.csv"))?;
    writeln!(overall, "metric,count,avg_ms,min_ms,max_ms")?;
    for (name, s) in [
        ("overall_response", &report.overall_response),
        ("dc_processing", &report.dc_processing),
    ] {
        writeln!(
            overall,
            "{name},{},{},{},{}",
            s.count,
            csv_opt(s.avg_ms),
            csv_opt(s.min_ms),
            csv_opt(s.max_ms)
        )?;
    }

    let mut ubs = std::fs::File::create(dir.join("user_bases.csv"))?;
    writeln!(ubs, "user_base,count,avg_ms,min_ms,max_ms")?;
    for row in &report.user_bases {
        let s = &row.response;
        writeln!(
            ubs,
            "{},{},{},{},{}",
            row.name,
            s.count,
            csv_opt(s.avg_ms),
            csv_opt(s.min_ms),
            csv_opt(s.max_ms)
        )?;
    }

    let mut dcs = std::fs::File::create(dir.join("data_centers.csv"))?;
    writeln!(dcs, "data_center,count,avg_ms,min_ms,max_ms,requests,bytes_transferred")?;
    for row in &report.data_centers {
        let s = &row.servicing;
        writeln!(
            dcs,
            "{},{},{},{},{},{},{}",
            row.name,
            s.count,
            csv_opt(s.avg_ms),
            csv_opt(s.min_ms),
            csv_opt(s.max_ms),
            row.requests,
            row.bytes_transferred
        )?;
    }

    // plot-ready hourly series: hour, user base, average
    let mut hourly = std::fs::File::create(dir.join("hourly.csv"))?;
    writeln!(hourly, "hour,user_base,count,avg_ms")?;
    for row in &report.hourly {
        writeln!(
            hourly,
            "{},{},{},{}",
            row.hour,
            row.user_base,
            row.count,
            csv_opt(row.avg_ms)
        )?;
    }

    let mut cost = std::fs::File::create(dir.join("cost.csv"))?;
    writeln!(cost, "data_center,vm_cost,transfer_cost,total")?;
    for c in &report.cost.per_dc {
        writeln!(cost, "{},{:.3},{:.3},{:.3}", c.name, c.vm_cost, c.transfer_cost, c.total)?;
    }
    writeln!(
        cost,
        "TOTAL,{:.2},{:.2},{:.2}",
        report.cost.vm_total, report.cost.transfer_total, report.cost.grand_total
    )?;
    Ok(())
}

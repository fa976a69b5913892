//! Two operating conditions over 10000 hours: how the four estimators narrow
//! as exposure accumulates. Pass a replication count to average over seeds.

use credal_cfr::cfr::fixtures;
use credal_cfr::sim::{compare_traces, run_replications, SimulationConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let runs = std::env::args().nth(1).map_or(Ok(1), |a| a.parse())?;
    let config = SimulationConfig::from_json(fixtures::TWO_CONDITION_SIM_JSON)?;
    let trace = run_replications(&config, runs)?;
    let report = compare_traces(&trace);
    for s in &report.summaries {
        let last = s.checkpoints.last().expect("at least one checkpoint");
        println!(
            "{:<8} {:<22} final width {:>12} coverage {:.2} outside [0,1] {}",
            s.condition,
            s.estimator,
            last.mean_width.map_or("-".into(), |w| format!("{w:.3e}")),
            s.final_coverage,
            s.bounds_outside_unit
        );
    }
    Ok(())
}

//! Interval width against exposure for three equivalent sample sizes.

use credal_cfr::cfr::fixtures;
use credal_cfr::sim::{run_convergence_study, SimulationConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let config = SimulationConfig::from_json(fixtures::SAMPLE_SIZE_SWEEP_SIM_JSON)?;
    let trace = run_convergence_study(&config)?;
    let labels: Vec<String> = config.estimators.iter().map(|e| e.label()).collect();
    println!(
        "{:>5} {}",
        "hours",
        labels
            .iter()
            .map(|l| format!("{l:>14}"))
            .collect::<String>()
    );
    for hour in [0, 1, 2, 5, 10, 20, 50, 100] {
        let widths: String = labels
            .iter()
            .filter_map(|l| {
                trace
                    .rows
                    .iter()
                    .find(|r| r.hour == hour && &r.estimator == l)
                    .and_then(|r| r.width())
            })
            .map(|w| format!("{w:>14.5}"))
            .collect();
        if !widths.is_empty() {
            println!("{hour:>5} {widths}");
        }
    }
    Ok(())
}

//! Failure-rate bounds for the four bundled forecast scenarios, next to the
//! precise estimates under each weight set.

use credal_cfr::cfr::{build_cfr_network, evaluate_scenario, fixtures, EstimationMode};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec = fixtures::line_spec(fixtures::LINE_1_PRIOR);
    let credal = build_cfr_network(&spec, &EstimationMode::Idm)?;
    let baseline = build_cfr_network(
        &spec,
        &EstimationMode::Dirichlet {
            weights: fixtures::baseline_weights(),
        },
    )?;
    let alternate = build_cfr_network(
        &spec,
        &EstimationMode::Dirichlet {
            weights: fixtures::alternate_weights(),
        },
    )?;
    println!(
        "{:<28} {:>11} {:>11}   {:<26}",
        "scenario", "baseline", "alternate", "bounds"
    );
    for sc in fixtures::scenarios() {
        let iv = evaluate_scenario(&credal, &sc)?;
        println!(
            "{:<28} {:>11.4e} {:>11.4e}   [{:.4e}, {:.4e}]",
            sc.name,
            evaluate_scenario(&baseline, &sc)?.lower(),
            evaluate_scenario(&alternate, &sc)?.lower(),
            iv.lower(),
            iv.upper()
        );
    }
    Ok(())
}

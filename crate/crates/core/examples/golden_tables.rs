//! Failure-hour conditional tables from the bundled counts, under the IDM,
//! the credible-interval variant and both Dirichlet weight sets.

use credal_cfr::cfr::{fixtures, EstimationMode};
use credal_cfr::cli::estimate_report;
use credal_cfr::estimate::SampleSize;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let counts = fixtures::failure_counts();
    let s = SampleSize::default();
    let modes = [
        (
            "baseline weights",
            EstimationMode::Dirichlet {
                weights: fixtures::baseline_weights(),
            },
        ),
        (
            "alternate weights",
            EstimationMode::Dirichlet {
                weights: fixtures::alternate_weights(),
            },
        ),
        ("imprecise Dirichlet", EstimationMode::Idm),
        (
            "credible 95%",
            EstimationMode::CredibleInterval { gamma: 0.95 },
        ),
    ];
    for (title, mode) in modes {
        println!("==== {title} ====");
        print!("{}", estimate_report(&counts, s, &mode)?.render_text());
        println!();
    }
    Ok(())
}

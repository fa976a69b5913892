//! Interval estimators side by side on one set of counts and one rate
//! observation.

use credal_cfr::estimate::{
    chi_square_rate_interval, clt_rate_interval, dirichlet_posterior_mean, idm_credible_interval,
    idm_intervals, DirichletWeights, MultinomialCounts, RateObservation, SampleSize,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let counts = MultinomialCounts::new(vec![12, 7, 21])?;
    let s = SampleSize::default();
    let weights = DirichletWeights::new(vec![0.3, 0.2, 0.5])?;
    let mean = dirichlet_posterior_mean(&counts, &weights)?;
    println!("counts {:?}, s = {}", counts.counts(), s.get());
    for (m, iv) in idm_intervals(&counts, s)?.iter().enumerate() {
        let cred = idm_credible_interval(&counts, s, m, 0.95)?;
        println!(
            "  state {m}: idm [{:.4}, {:.4}]  credible95 [{:.4}, {:.4}]  dirichlet {:.4}",
            iv.lower(),
            iv.upper(),
            cred.lower(),
            cred.upper(),
            mean[m]
        );
    }

    let obs = RateObservation::new(3, 200)?;
    let clt = clt_rate_interval(&obs, 0.95)?;
    let chi = chi_square_rate_interval(&obs, 0.95)?;
    println!("3 failures in 200 hours:");
    println!("  clt        [{:.5}, {:.5}]", clt.lower, clt.upper);
    println!("  chi-square [{:.5}, {:.5}]", chi.lower, chi.upper);
    Ok(())
}

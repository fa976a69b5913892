//! Special-function kernels: Beta CDF and quantile, chi-square and normal
//! quantiles.

use credal_cfr::numeric::{beta_cdf, beta_quantile, chi_square_quantile, normal_quantile};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    println!(
        "I_0.3085(1, 10)         = {:.6}",
        beta_cdf(1.0, 10.0, 0.3085)?
    );
    println!(
        "Beta(1, 10) 97.5% point = {:.6}",
        beta_quantile(1.0, 10.0, 0.975)?
    );
    println!(
        "Beta(10, 1) 2.5% point  = {:.6}",
        beta_quantile(10.0, 1.0, 0.025)?
    );
    println!(
        "chi2(2) 97.5% point     = {:.6}",
        chi_square_quantile(2.0, 0.975)?
    );
    println!("N(0,1) 97.5% point      = {:.9}", normal_quantile(0.975)?);
    Ok(())
}

//! Special-function kernels: Beta, chi-square and standard normal CDFs and
//! quantiles.
//!
//! Everything here is a pure function of its arguments. The incomplete beta
//! is evaluated by a modified-Lentz continued fraction; quantiles are found by
//! Newton iteration safeguarded by a shrinking bisection bracket.

use thiserror::Error;

/// Errors raised by the numeric kernels.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum KernelError {
    #[error("shape parameter `{name}` must be finite and > 0, got {value}")]
    InvalidShape { name: &'static str, value: f64 },

    #[error("argument `{name}` = {value} is outside the domain {domain}")]
    OutOfDomain {
        name: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("{0} did not converge")]
    NoConvergence(&'static str),
}

pub type Result<T> = std::result::Result<T, KernelError>;

const MAX_CF_ITER: usize = 20_000;
const MAX_ROOT_ITER: usize = 500;
const TINY: f64 = 1e-300;

const LANCZOS_G: f64 = 7.0;
#[allow(clippy::excessive_precision)]
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

fn check_shape(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(KernelError::InvalidShape { name, value })
    }
}

fn check_unit(name: &'static str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(KernelError::OutOfDomain {
            name,
            value,
            domain: "[0, 1]",
        })
    }
}

/// Natural log of the gamma function for `x > 0` (Lanczos, g = 7).
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        // reflection
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = LANCZOS[0];
    let t = x + LANCZOS_G + 0.5;
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

/// `ln B(a, b)`.
pub fn ln_beta(a: f64, b: f64) -> f64 {
    ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)
}

/// Continued fraction for the incomplete beta, modified Lentz.
fn beta_cf(a: f64, b: f64, x: f64) -> Result<f64> {
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=MAX_CF_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() <= f64::EPSILON {
            return Ok(h);
        }
    }
    Err(KernelError::NoConvergence(
        "incomplete beta continued fraction",
    ))
}

/// Lower tail `I_x(a, b)` without argument validation.
fn beta_lower(a: f64, b: f64, x: f64) -> Result<f64> {
    if x <= 0.0 {
        return Ok(0.0);
    }
    if x >= 1.0 {
        return Ok(1.0);
    }
    let ln_front = a * x.ln() + b * (-x).ln_1p() - ln_beta(a, b);
    if x < a / (a + b) {
        Ok(ln_front.exp() * beta_cf(a, b, x)? / a)
    } else {
        Ok(1.0 - ln_front.exp() * beta_cf(b, a, 1.0 - x)? / b)
    }
}

/// Regularized incomplete beta function `I_x(alpha, beta)`, i.e. the CDF of
/// `Beta(alpha, beta)` at `x`.
pub fn beta_cdf(alpha: f64, beta: f64, x: f64) -> Result<f64> {
    check_shape("alpha", alpha)?;
    check_shape("beta", beta)?;
    check_unit("x", x)?;
    Ok(beta_lower(alpha, beta, x)?.clamp(0.0, 1.0))
}

fn beta_ln_pdf(a: f64, b: f64, x: f64, ln_b: f64) -> f64 {
    (a - 1.0) * x.ln() + (b - 1.0) * (-x).ln_1p() - ln_b
}

/// Inverse of [`beta_cdf`] in its first argument.
///
/// `p = 0` and `p = 1` return the support endpoints 0 and 1.
pub fn beta_quantile(alpha: f64, beta: f64, p: f64) -> Result<f64> {
    check_shape("alpha", alpha)?;
    check_shape("beta", beta)?;
    check_unit("p", p)?;
    if p == 0.0 {
        return Ok(0.0);
    }
    if p == 1.0 {
        return Ok(1.0);
    }
    // Work in whichever tail keeps the target probability <= 1/2.
    if p > 0.5 {
        return Ok(1.0 - beta_lower_quantile(beta, alpha, 1.0 - p)?);
    }
    beta_lower_quantile(alpha, beta, p)
}

fn beta_lower_quantile(a: f64, b: f64, p: f64) -> Result<f64> {
    let ln_b = ln_beta(a, b);
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    let mut x = (a / (a + b)).clamp(1e-3, 1.0 - 1e-3);
    for _ in 0..MAX_ROOT_ITER {
        let f = beta_lower(a, b, x)? - p;
        if f == 0.0 {
            return Ok(x);
        }
        if f < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let pdf = beta_ln_pdf(a, b, x, ln_b).exp();
        let mut next = x - f / pdf;
        if !next.is_finite() || next <= lo || next >= hi {
            next = 0.5 * (lo + hi);
        }
        if (next - x).abs() <= 2.0 * f64::EPSILON * next.abs() || hi - lo <= f64::MIN_POSITIVE {
            return Ok(next);
        }
        x = next;
    }
    Ok(x)
}

/// Regularized lower incomplete gamma `P(a, x)`.
pub fn gamma_p(a: f64, x: f64) -> Result<f64> {
    check_shape("a", a)?;
    if x.is_nan() || x < 0.0 {
        return Err(KernelError::OutOfDomain {
            name: "x",
            value: x,
            domain: "[0, inf)",
        });
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x.is_infinite() {
        return Ok(1.0);
    }
    if x < a + 1.0 {
        gamma_series(a, x)
    } else {
        Ok(1.0 - gamma_cf(a, x)?)
    }
}

/// Regularized upper incomplete gamma `Q(a, x) = 1 - P(a, x)`.
pub fn gamma_q(a: f64, x: f64) -> Result<f64> {
    check_shape("a", a)?;
    if x.is_nan() || x < 0.0 {
        return Err(KernelError::OutOfDomain {
            name: "x",
            value: x,
            domain: "[0, inf)",
        });
    }
    if x == 0.0 {
        return Ok(1.0);
    }
    if x.is_infinite() {
        return Ok(0.0);
    }
    if x < a + 1.0 {
        Ok(1.0 - gamma_series(a, x)?)
    } else {
        gamma_cf(a, x)
    }
}

fn gamma_series(a: f64, x: f64) -> Result<f64> {
    let mut ap = a;
    let mut del = 1.0 / a;
    let mut sum = del;
    for _ in 0..MAX_CF_ITER {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if del.abs() < sum.abs() * f64::EPSILON {
            return Ok(sum * (-x + a * x.ln() - ln_gamma(a)).exp());
        }
    }
    Err(KernelError::NoConvergence("incomplete gamma series"))
}

fn gamma_cf(a: f64, x: f64) -> Result<f64> {
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..=MAX_CF_ITER {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() <= f64::EPSILON {
            return Ok((-x + a * x.ln() - ln_gamma(a)).exp() * h);
        }
    }
    Err(KernelError::NoConvergence(
        "incomplete gamma continued fraction",
    ))
}

/// CDF of the chi-square distribution with `dof` degrees of freedom.
pub fn chi_square_cdf(dof: f64, x: f64) -> Result<f64> {
    check_shape("dof", dof)?;
    if x <= 0.0 {
        return Ok(0.0);
    }
    gamma_p(0.5 * dof, 0.5 * x)
}

/// Inverse chi-square CDF. `p = 0` gives 0 and `p = 1` gives `+inf`.
pub fn chi_square_quantile(dof: f64, p: f64) -> Result<f64> {
    check_shape("dof", dof)?;
    check_unit("p", p)?;
    if p == 0.0 {
        return Ok(0.0);
    }
    if p == 1.0 {
        return Ok(f64::INFINITY);
    }
    let k = 0.5 * dof;
    let upper_tail = p > 0.5;
    let q = 1.0 - p;
    // Residual with the sign of CDF(x) - p, evaluated in the accurate tail.
    let residual = |x: f64| -> Result<f64> {
        if upper_tail {
            Ok(q - gamma_q(k, 0.5 * x)?)
        } else {
            Ok(gamma_p(k, 0.5 * x)? - p)
        }
    };

    let mut lo = 0.0_f64;
    let mut hi = dof.max(1.0);
    while residual(hi)? < 0.0 {
        lo = hi;
        hi *= 2.0;
        if !hi.is_finite() {
            return Err(KernelError::NoConvergence("chi-square quantile bracket"));
        }
    }
    let ln_norm = k * std::f64::consts::LN_2 + ln_gamma(k);
    let mut x = 0.5 * (lo + hi);
    for _ in 0..MAX_ROOT_ITER {
        let f = residual(x)?;
        if f == 0.0 {
            return Ok(x);
        }
        if f < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let pdf = ((k - 1.0) * x.ln() - 0.5 * x - ln_norm).exp();
        let mut next = x - f / pdf;
        if !next.is_finite() || next <= lo || next >= hi {
            next = 0.5 * (lo + hi);
        }
        if (next - x).abs() <= 2.0 * f64::EPSILON * next.abs() || hi - lo <= f64::MIN_POSITIVE {
            return Ok(next);
        }
        x = next;
    }
    Ok(x)
}

/// Standard normal CDF.
pub fn normal_cdf(z: f64) -> f64 {
    if z.is_nan() {
        return f64::NAN;
    }
    let half_sq = 0.5 * z * z;
    if half_sq == 0.0 {
        return 0.5;
    }
    // erf(t) = P(1/2, t^2); pick the tail that avoids cancellation.
    let tail = 0.5 * gamma_q(0.5, half_sq).unwrap_or(0.0);
    if z < 0.0 {
        tail
    } else {
        1.0 - tail
    }
}

/// Standard normal quantile (Wichura's AS 241, PPND16).
#[allow(clippy::excessive_precision)]
pub fn normal_quantile(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(KernelError::OutOfDomain {
            name: "p",
            value: p,
            domain: "(0, 1)",
        });
    }
    const A: [f64; 8] = [
        3.387_132_872_796_366_608,
        1.331_416_678_917_843_774_5e2,
        1.971_590_950_306_551_442_7e3,
        1.373_169_376_550_946_112_5e4,
        4.592_195_393_154_987_145_7e4,
        6.726_577_092_700_870_085_3e4,
        3.343_057_558_358_812_810_5e4,
        2.509_080_928_730_122_672_7e3,
    ];
    const B: [f64; 8] = [
        1.0,
        4.231_333_070_160_091_125_2e1,
        6.871_870_074_920_579_083e2,
        5.394_196_021_424_751_107_7e3,
        2.121_379_430_158_659_586_7e4,
        3.930_789_580_009_271_061e4,
        2.872_908_573_572_194_267_4e4,
        5.226_495_278_852_854_561e3,
    ];
    const C: [f64; 8] = [
        1.423_437_110_749_683_577_34,
        4.630_337_846_156_545_295_9,
        5.769_497_221_460_691_405_5,
        3.647_848_324_763_204_605_04,
        1.270_458_252_452_368_382_58,
        2.417_807_251_774_506_117_7e-1,
        2.272_384_498_926_918_458_33e-2,
        7.745_450_142_783_414_076_4e-4,
    ];
    const D: [f64; 8] = [
        1.0,
        2.053_191_626_637_758_821_87,
        1.676_384_830_183_803_849_4,
        6.897_673_349_851_000_045_5e-1,
        1.481_039_764_274_800_745_9e-1,
        1.519_866_656_361_645_719_66e-2,
        5.475_938_084_995_344_946e-4,
        1.050_750_071_644_416_843_24e-9,
    ];
    const E: [f64; 8] = [
        6.657_904_643_501_103_777_2,
        5.463_784_911_164_114_369_9,
        1.784_826_539_917_291_335_8,
        2.965_605_718_285_048_912_3e-1,
        2.653_218_952_657_612_309_3e-2,
        1.242_660_947_388_078_438_6e-3,
        2.711_555_568_743_487_578_15e-5,
        2.010_334_399_292_288_132_65e-7,
    ];
    const F: [f64; 8] = [
        1.0,
        5.998_322_065_558_879_376_9e-1,
        1.369_298_809_227_358_053_1e-1,
        1.487_536_129_085_061_485_25e-2,
        7.868_691_311_456_132_591e-4,
        1.846_318_317_510_054_681_8e-5,
        1.421_511_758_316_445_888_7e-7,
        2.044_263_103_389_939_785_64e-15,
    ];
    fn poly(c: &[f64; 8], r: f64) -> f64 {
        c.iter().rev().fold(0.0, |acc, &k| acc * r + k)
    }

    let q = p - 0.5;
    if q.abs() <= 0.425 {
        let r = 0.180_625 - q * q;
        return Ok(q * poly(&A, r) / poly(&B, r));
    }
    let tail = if q < 0.0 { p } else { 1.0 - p };
    let mut r = (-tail.ln()).sqrt();
    let val = if r <= 5.0 {
        r -= 1.6;
        poly(&C, r) / poly(&D, r)
    } else {
        r -= 5.0;
        poly(&E, r) / poly(&F, r)
    };
    Ok(if q < 0.0 { -val } else { val })
}

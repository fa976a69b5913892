use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::config::SimulationConfig;

/// One simulated hour.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HourSample {
    /// 1-based hour index.
    pub hour: u64,
    pub condition: usize,
    pub failed: bool,
}

/// Hourly stream of conditions and Bernoulli failures.
///
/// Hours are independent trials; a failed hour does not take the line out of
/// service.
#[derive(Debug, Clone)]
pub struct Simulator {
    rng: ChaCha8Rng,
    cumulative: Vec<f64>,
    rates: Vec<f64>,
    hour: u64,
    horizon: u64,
}

impl Simulator {
    /// The config is assumed validated.
    pub fn new(config: &SimulationConfig) -> Self {
        let cumulative = config
            .conditions
            .iter()
            .scan(0.0, |acc, c| {
                *acc += c.occurrence;
                Some(*acc)
            })
            .collect();
        Self {
            rng: ChaCha8Rng::seed_from_u64(config.seed),
            cumulative,
            rates: config.conditions.iter().map(|c| c.failure_rate).collect(),
            hour: 0,
            horizon: config.horizon_hours,
        }
    }
}

impl Iterator for Simulator {
    type Item = HourSample;

    fn next(&mut self) -> Option<HourSample> {
        if self.hour >= self.horizon {
            return None;
        }
        self.hour += 1;
        let u_condition: f64 = self.rng.gen();
        let u_failure: f64 = self.rng.gen();
        let last = self.cumulative.len() - 1;
        let condition = self
            .cumulative
            .iter()
            .position(|&c| u_condition < c)
            .unwrap_or(last);
        Some(HourSample {
            hour: self.hour,
            condition,
            failed: u_failure < self.rates[condition],
        })
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = (self.horizon - self.hour) as usize;
        (left, Some(left))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::{Checkpoints, ConditionModel, EstimatorSpec};

    fn config(seed: u64, rates: [f64; 2], horizon: u64) -> SimulationConfig {
        SimulationConfig {
            description: String::new(),
            horizon_hours: horizon,
            conditions: vec![
                ConditionModel {
                    label: "normal".into(),
                    occurrence: 0.7,
                    failure_rate: rates[0],
                },
                ConditionModel {
                    label: "adverse".into(),
                    occurrence: 0.3,
                    failure_rate: rates[1],
                },
            ],
            seed,
            estimators: EstimatorSpec::standard_set(),
            checkpoints: Checkpoints::Every { every: 100 },
        }
    }

    #[test]
    fn same_seed_same_stream() {
        let a: Vec<_> = Simulator::new(&config(7, [1e-4, 5e-3], 5000)).collect();
        let b: Vec<_> = Simulator::new(&config(7, [1e-4, 5e-3], 5000)).collect();
        assert_eq!(a, b);
        let c: Vec<_> = Simulator::new(&config(8, [1e-4, 5e-3], 5000)).collect();
        assert_ne!(a, c);
    }

    #[test]
    fn zero_rate_never_fails() {
        assert!(Simulator::new(&config(3, [0.0, 0.0], 20_000)).all(|h| !h.failed));
    }

    #[test]
    fn hours_are_numbered_from_one() {
        let v: Vec<_> = Simulator::new(&config(1, [0.1, 0.1], 3))
            .map(|h| h.hour)
            .collect();
        assert_eq!(v, [1, 2, 3]);
    }

    #[test]
    fn total_failures_match_mixture_expectation() {
        // 0.7*1e-4 + 0.3*5e-3 per hour over 10000 hours
        let mean = 10_000.0 * (0.7 * 1e-4 + 0.3 * 5e-3);
        let sd =
            (10_000.0f64 * (0.7 * 1e-4 + 0.3 * 5e-3) * (1.0 - (0.7 * 1e-4 + 0.3 * 5e-3))).sqrt();
        assert!((mean - 15.7f64).abs() < 1e-9);
        assert!((sd - 3.96).abs() < 0.01);
        let seeds = 200;
        let mut sum = 0.0;
        for seed in 0..seeds {
            let n = Simulator::new(&config(seed, [1e-4, 5e-3], 10_000))
                .filter(|h| h.failed)
                .count() as f64;
            assert!((n - mean).abs() < 6.0 * sd, "seed {seed}: {n}");
            sum += n;
        }
        let avg = sum / seeds as f64;
        assert!(
            (avg - mean).abs() < 4.0 * sd / (seeds as f64).sqrt(),
            "{avg}"
        );
    }

    #[test]
    fn condition_frequencies() {
        let n = 100_000;
        let adverse = Simulator::new(&config(11, [0.0, 0.0], n))
            .filter(|h| h.condition == 1)
            .count() as f64;
        let sd = (n as f64 * 0.3 * 0.7).sqrt();
        assert!((adverse - 0.3 * n as f64).abs() < 4.0 * sd);
    }
}

use serde::{Deserialize, Serialize};

use super::records::{
    LightningState, LineState, LoadingState, RainState, SnowState, TemperatureState, WindState,
};
use super::tables::{ContextTables, FailureCounts, TableContext};
use super::{CfrError, Result};
use crate::credal::{
    credal_infer_soft_with, CredalNetwork, Evidence, InferenceOptions, NetworkBuilder, Query,
};
use crate::estimate::{
    dirichlet_posterior_mean, idm_credible_interval, idm_intervals, DirichletWeights,
    ProbabilityInterval, SampleSize,
};

const ROW_SUM_TOLERANCE: f64 = 1e-9;

/// Condition variables in network order, after the line state `H`.
pub const CONDITION_VARIABLES: [&str; 6] = [
    TemperatureState::VARIABLE,
    WindState::VARIABLE,
    RainState::VARIABLE,
    LightningState::VARIABLE,
    LoadingState::VARIABLE,
    SnowState::VARIABLE,
];

/// Point conditional rows for healthy hours, one per context.
pub type HealthyRows = ContextTables<Vec<f64>>;

/// Prior weights for the deterministic Dirichlet estimator, one per context.
pub type PriorWeights = ContextTables<DirichletWeights>;

/// Everything needed to assemble a line failure network.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CfrNetworkSpec {
    /// Average hourly failure rate of lines in the same age group, `P(h2)`.
    pub prior_failure_rate: f64,
    pub h2_counts: FailureCounts,
    pub h1_rows: HealthyRows,
    #[serde(default)]
    pub s: SampleSize,
}

impl CfrNetworkSpec {
    pub fn validate(&self) -> Result<()> {
        check_prior(self.prior_failure_rate)?;
        self.h2_counts.validate()?;
        self.h1_rows.check_shape()?;
        for ctx in TableContext::all() {
            let row = self.h1_rows.get(ctx);
            if row.len() != ctx.child_states().len() {
                return Err(CfrError::InvalidSpec(format!(
                    "healthy row for {} has {} entries, expected {}",
                    ctx.describe(),
                    row.len(),
                    ctx.child_states().len()
                )));
            }
            if row.iter().any(|p| !(0.0..=1.0).contains(p)) {
                return Err(CfrError::InvalidSpec(format!(
                    "healthy row for {} has entries outside [0, 1]",
                    ctx.describe()
                )));
            }
            let total: f64 = row.iter().sum();
            if (total - 1.0).abs() > ROW_SUM_TOLERANCE {
                return Err(CfrError::InvalidSpec(format!(
                    "healthy row for {} sums to {total}",
                    ctx.describe()
                )));
            }
        }
        Ok(())
    }

    pub fn with_prior(&self, prior_failure_rate: f64) -> Self {
        Self {
            prior_failure_rate,
            ..self.clone()
        }
    }
}

fn check_prior(p: f64) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(CfrError::InvalidSpec(format!(
            "prior failure rate {p} is not in (0, 1)"
        )))
    }
}

/// How failure-hour rows are estimated from counts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EstimationMode {
    /// Imprecise Dirichlet intervals with the configured `s`.
    Idm,
    /// Posterior mean under fixed prior weights; yields a point network.
    Dirichlet { weights: PriorWeights },
    /// Imprecise credible intervals at credibility `gamma`.
    CredibleInterval { gamma: f64 },
}

impl EstimationMode {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Idm => "idm",
            Self::Dirichlet { .. } => "dirichlet",
            Self::CredibleInterval { .. } => "credible",
        }
    }
}

/// Failure-hour rows per context under `mode`.
pub fn estimate_h2_rows(
    counts: &FailureCounts,
    s: SampleSize,
    mode: &EstimationMode,
) -> Result<ContextTables<Vec<ProbabilityInterval>>> {
    counts.try_map(|ctx, c| {
        let row = match mode {
            EstimationMode::Idm => idm_intervals(c, s)?,
            EstimationMode::Dirichlet { weights } => {
                weights.check_shape()?;
                dirichlet_posterior_mean(c, weights.get(ctx))?
                    .into_iter()
                    .map(|p| ProbabilityInterval::point(p.clamp(0.0, 1.0)))
                    .collect::<std::result::Result<Vec<_>, _>>()?
            }
            EstimationMode::CredibleInterval { gamma } => (0..c.outcomes())
                .map(|m| idm_credible_interval(c, s, m, *gamma))
                .collect::<std::result::Result<Vec<_>, _>>()?,
        };
        Ok(row)
    })
}

/// Assembles `H -> {E1, E2, E5}`, `(H, E1) -> E3`, `(H, E3) -> E4`,
/// `(H, E1) -> E6` with a point root and point healthy rows.
pub fn build_cfr_network(spec: &CfrNetworkSpec, mode: &EstimationMode) -> Result<CredalNetwork> {
    spec.validate()?;
    let h2 = estimate_h2_rows(&spec.h2_counts, spec.s, mode)?;
    let h1 = spec.h1_rows.try_map(|_, row| {
        row.iter()
            .map(|&p| ProbabilityInterval::point(p).map_err(CfrError::from))
            .collect::<Result<Vec<_>>>()
    })?;

    let description = format!(
        "line failure network, prior {:e}, {} rows",
        spec.prior_failure_rate,
        mode.name()
    );
    let mut b = NetworkBuilder::new(description);
    b.variable(LineState::VARIABLE, LineState::LABELS.iter().copied())?;
    b.variable(
        TemperatureState::VARIABLE,
        TemperatureState::LABELS.iter().copied(),
    )?;
    b.variable(WindState::VARIABLE, WindState::LABELS.iter().copied())?;
    b.variable(RainState::VARIABLE, RainState::LABELS.iter().copied())?;
    b.variable(
        LightningState::VARIABLE,
        LightningState::LABELS.iter().copied(),
    )?;
    b.variable(LoadingState::VARIABLE, LoadingState::LABELS.iter().copied())?;
    b.variable(SnowState::VARIABLE, SnowState::LABELS.iter().copied())?;

    let p = spec.prior_failure_rate;
    b.point_cpt(LineState::VARIABLE, &[], vec![vec![1.0 - p, p]])?;

    let h = LineState::VARIABLE;
    let pair =
        |a: &Vec<ProbabilityInterval>, b: &Vec<ProbabilityInterval>| vec![a.clone(), b.clone()];
    b.cpt(
        TemperatureState::VARIABLE,
        &[h],
        pair(&h1.temperature, &h2.temperature),
    )?;
    b.cpt(WindState::VARIABLE, &[h], pair(&h1.wind, &h2.wind))?;
    b.cpt(LoadingState::VARIABLE, &[h], pair(&h1.loading, &h2.loading))?;

    let family = |h1: &[Vec<ProbabilityInterval>], h2: &[Vec<ProbabilityInterval>]| {
        h1.iter().chain(h2).cloned().collect::<Vec<_>>()
    };
    b.cpt(
        RainState::VARIABLE,
        &[h, TemperatureState::VARIABLE],
        family(&h1.rain_given_temperature, &h2.rain_given_temperature),
    )?;
    b.cpt(
        LightningState::VARIABLE,
        &[h, RainState::VARIABLE],
        family(&h1.lightning_given_rain, &h2.lightning_given_rain),
    )?;
    b.cpt(
        SnowState::VARIABLE,
        &[h, TemperatureState::VARIABLE],
        family(&h1.snow_given_temperature, &h2.snow_given_temperature),
    )?;
    Ok(b.build()?)
}

/// Replaces the root line-state row with `(1 - p, p)`.
pub fn with_prior_failure_rate(net: &CredalNetwork, p: f64) -> Result<CredalNetwork> {
    check_prior(p)?;
    let h = net.index_of(LineState::VARIABLE)?;
    if !net.cpt(h).parents().is_empty() {
        return Err(CfrError::InvalidSpec("line state must be a root".into()));
    }
    let root = vec![
        ProbabilityInterval::point(1.0 - p)?,
        ProbabilityInterval::point(p)?,
    ];
    Ok(net.map_rows(|v, _, row| if v == h { root.clone() } else { row.to_vec() })?)
}

/// Forecast conditions for one line over the next hour.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub name: String,
    #[serde(default)]
    pub description: String,
    pub prior_failure_rate: f64,
    pub evidence: Evidence,
}

impl Scenario {
    /// Every condition variable carries exactly one hard or soft entry.
    pub fn validate(&self) -> Result<()> {
        check_prior(self.prior_failure_rate)?;
        for var in CONDITION_VARIABLES {
            let hard = self.evidence.hard.contains_key(var);
            let soft = self.evidence.soft.contains_key(var);
            if hard == soft {
                return Err(CfrError::InvalidScenario(format!(
                    "`{}` needs exactly one hard or soft entry for {var}",
                    self.name
                )));
            }
        }
        let extra = self
            .evidence
            .hard
            .keys()
            .chain(self.evidence.soft.keys())
            .find(|k| !CONDITION_VARIABLES.contains(&k.as_str()));
        if let Some(k) = extra {
            return Err(CfrError::InvalidScenario(format!(
                "`{}` has evidence on `{k}`, which is not a condition variable",
                self.name
            )));
        }
        Ok(())
    }
}

/// `P(h2 | conditions)` bounds for a scenario, using its prior failure rate.
pub fn evaluate_scenario(net: &CredalNetwork, scenario: &Scenario) -> Result<ProbabilityInterval> {
    evaluate_scenario_with(net, scenario, InferenceOptions::default())
}

pub fn evaluate_scenario_with(
    net: &CredalNetwork,
    scenario: &Scenario,
    options: InferenceOptions,
) -> Result<ProbabilityInterval> {
    scenario.validate()?;
    let net = with_prior_failure_rate(net, scenario.prior_failure_rate)?;
    let query = Query::new(LineState::VARIABLE, LineState::Failed.label());
    Ok(credal_infer_soft_with(
        &net,
        &query,
        &scenario.evidence,
        options,
    )?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cfr::fixtures;
    use proptest::prelude::*;

    fn tl1() -> CfrNetworkSpec {
        fixtures::line_spec(fixtures::LINE_1_PRIOR)
    }

    #[test]
    fn loading_intervals_from_counts() {
        let net = build_cfr_network(&tl1(), &EstimationMode::Idm).unwrap();
        let e5 = net.index_of("E5").unwrap();
        let row = &net.cpt(e5).rows()[1];
        assert!((row[0].lower() - 22.0 / 41.0).abs() < 1e-15);
        assert!((row[0].upper() - 23.0 / 41.0).abs() < 1e-15);
        assert!((row[1].lower() - 18.0 / 41.0).abs() < 1e-15);
        assert_eq!(row[0].rounded(2), (0.54, 0.56));
        assert_eq!(row[1].rounded(2), (0.44, 0.46));
    }

    #[test]
    fn zero_count_context_keeps_zero_lower_bound() {
        let net = build_cfr_network(&tl1(), &EstimationMode::Idm).unwrap();
        let e6 = net.index_of("E6").unwrap();
        // parents (H, E1): row for (h2, e13)
        let row = &net.cpt(e6).rows()[net.row_index(e6, &[1, 2])];
        assert_eq!(row[0].lower(), 0.0);
        assert!((row[0].upper() - 1.0 / 22.0).abs() < 1e-15);
    }

    #[test]
    fn dirichlet_mode_is_point_network() {
        let mode = EstimationMode::Dirichlet {
            weights: fixtures::baseline_weights(),
        };
        let net = build_cfr_network(&tl1(), &mode).unwrap();
        assert!(net.is_point());
        let e1 = net.index_of("E1").unwrap();
        let row = &net.cpt(e1).rows()[1];
        assert!((row[1].lower() - 7.1 / 41.0).abs() < 1e-15);
    }

    #[test]
    fn spec_json_round_trip() {
        let spec = tl1();
        let text = serde_json::to_string(&spec).unwrap();
        let back: CfrNetworkSpec = serde_json::from_str(&text).unwrap();
        assert_eq!(spec, back);
    }

    #[test]
    fn spec_validation() {
        assert!(tl1().with_prior(0.0).validate().is_err());
        let mut spec = tl1();
        spec.h1_rows.wind = vec![0.5, 0.5, 0.1];
        assert!(matches!(spec.validate(), Err(CfrError::InvalidSpec(_))));
        let mut spec = tl1();
        spec.h1_rows.snow_given_temperature.pop();
        assert!(spec.validate().is_err());
    }

    #[test]
    fn scenario_validation() {
        let mut s = fixtures::scenarios()[0].clone();
        s.validate().unwrap();
        s.evidence.hard.remove("E4");
        assert!(s.validate().is_err());
        let mut s = fixtures::scenarios()[0].clone();
        s.evidence
            .soft
            .insert("E1".into(), [("e13".to_string(), 1.0)].into());
        assert!(s.validate().is_err());
        let mut s = fixtures::scenarios()[0].clone();
        s.evidence.hard.insert("H".into(), "h1".into());
        assert!(s.validate().is_err());
    }

    #[test]
    fn prior_replacement() {
        let net = build_cfr_network(&tl1(), &EstimationMode::Idm).unwrap();
        let other = with_prior_failure_rate(&net, 0.3).unwrap();
        let root = &other.cpt(other.index_of("H").unwrap()).rows()[0];
        assert_eq!((root[0].lower(), root[1].upper()), (0.7, 0.3));
        assert_eq!(other.cpts()[1..], net.cpts()[1..]);
        assert!(with_prior_failure_rate(&net, 1.0).is_err());
    }

    /// With every condition observed the failure posterior is increasing in
    /// the product of failure-hour likelihoods, so the bounds come from the
    /// per-row endpoints.
    fn closed_form(
        spec: &CfrNetworkSpec,
        rows: &ContextTables<Vec<ProbabilityInterval>>,
        hard: &[(TableContext, usize)],
        p: f64,
    ) -> (f64, f64) {
        let healthy: f64 = hard.iter().map(|&(c, s)| spec.h1_rows.get(c)[s]).product();
        let lo: f64 = hard.iter().map(|&(c, s)| rows.get(c)[s].lower()).product();
        let hi: f64 = hard.iter().map(|&(c, s)| rows.get(c)[s].upper()).product();
        let post = |l: f64| {
            let den = p * l + (1.0 - p) * healthy;
            (den > 0.0).then(|| p * l / den)
        };
        // zero-probability evidence under the lowest product: every other
        // admissible product gives certainty of failure
        (post(lo).unwrap_or(1.0), post(hi).unwrap())
    }

    fn contexts_for(labels: &[usize; 6]) -> Vec<(TableContext, usize)> {
        let [t, w, r, l, load, snow] = *labels;
        vec![
            (TableContext::Temperature, t),
            (TableContext::Wind, w),
            (
                TableContext::RainGivenTemperature(TemperatureState::ALL[t]),
                r,
            ),
            (TableContext::LightningGivenRain(RainState::ALL[r]), l),
            (TableContext::Loading, load),
            (
                TableContext::SnowGivenTemperature(TemperatureState::ALL[t]),
                snow,
            ),
        ]
    }

    fn scenario_for(labels: &[usize; 6], p: f64) -> Scenario {
        let states = [
            TemperatureState::LABELS,
            WindState::LABELS,
            RainState::LABELS,
            LightningState::LABELS,
            LoadingState::LABELS,
            SnowState::LABELS,
        ];
        let mut e = Evidence::new();
        for ((var, st), &i) in CONDITION_VARIABLES.iter().zip(states).zip(labels) {
            e = e.hard(*var, st[i]);
        }
        Scenario {
            name: "generated".into(),
            description: String::new(),
            prior_failure_rate: p,
            evidence: e,
        }
    }

    fn labels() -> impl Strategy<Value = [usize; 6]> {
        (
            0usize..3,
            0usize..3,
            0usize..2,
            0usize..2,
            0usize..2,
            0usize..2,
        )
            .prop_map(|(a, b, c, d, e, f)| [a, b, c, d, e, f])
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn generic_optimizer_matches_endpoint_shortcut(l in labels()) {
            let spec = tl1();
            let net = build_cfr_network(&spec, &EstimationMode::Idm).unwrap();
            let rows = estimate_h2_rows(&spec.h2_counts, spec.s, &EstimationMode::Idm).unwrap();
            let got = evaluate_scenario(&net, &scenario_for(&l, spec.prior_failure_rate)).unwrap();
            let (lo, hi) = closed_form(&spec, &rows, &contexts_for(&l), spec.prior_failure_rate);
            prop_assert!((got.lower() - lo).abs() <= 1e-12 * hi.max(1e-300) + 1e-300);
            prop_assert!((got.upper() - hi).abs() <= 1e-12 * hi.max(1e-300) + 1e-300);
        }

        #[test]
        fn larger_prior_raises_both_bounds(l in labels(), p in 1e-5f64..0.1, bump in 1.01f64..3.0) {
            let spec = tl1();
            let net = build_cfr_network(&spec, &EstimationMode::Idm).unwrap();
            let a = evaluate_scenario(&net, &scenario_for(&l, p)).unwrap();
            let b = evaluate_scenario(&net, &scenario_for(&l, p * bump)).unwrap();
            prop_assert!(b.lower() >= a.lower() && b.upper() >= a.upper());
            for (x, y) in [(a.lower(), b.lower()), (a.upper(), b.upper())] {
                if x > 0.0 && x < 1.0 {
                    prop_assert!(y > x);
                }
            }
        }

        #[test]
        fn any_dirichlet_weights_nest_inside_idm(l in labels(), seed in any::<u64>()) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let spec = tl1();
            let weights = spec.h2_counts.try_map(|_, c| {
                let raw: Vec<f64> = (0..c.outcomes()).map(|_| rng.gen_range(0.0..1.0)).collect();
                let t: f64 = raw.iter().sum();
                Ok(DirichletWeights::new(raw.iter().map(|x| x / t).collect())?)
            }).unwrap();
            let point = build_cfr_network(&spec, &EstimationMode::Dirichlet { weights }).unwrap();
            let credal = build_cfr_network(&spec, &EstimationMode::Idm).unwrap();
            let sc = scenario_for(&l, spec.prior_failure_rate);
            let p = evaluate_scenario(&point, &sc).unwrap();
            let iv = evaluate_scenario(&credal, &sc).unwrap();
            prop_assert!(p.width() < 1e-15);
            prop_assert!(iv.contains_approx(p.lower(), 1e-15));
        }
    }
}

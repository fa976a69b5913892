use serde::{Deserialize, Serialize};

use super::records::{
    ConditionStateVector, LightningState, LineState, LoadingState, RainState, SnowState,
    TemperatureState, WindState,
};
use super::{CfrError, Result};
use crate::estimate::MultinomialCounts;

/// One value per conditioning context of the line failure network.
///
/// Conditional families are indexed by the parent state: rain and snow by
/// temperature class, lightning by rain state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContextTables<R> {
    pub temperature: R,
    pub wind: R,
    pub rain_given_temperature: Vec<R>,
    pub lightning_given_rain: Vec<R>,
    pub loading: R,
    pub snow_given_temperature: Vec<R>,
}

/// Identifies one row of [`ContextTables`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TableContext {
    Temperature,
    Wind,
    RainGivenTemperature(TemperatureState),
    LightningGivenRain(RainState),
    Loading,
    SnowGivenTemperature(TemperatureState),
}

impl TableContext {
    pub const ALL: [TableContext; 11] = [
        TableContext::Temperature,
        TableContext::Wind,
        TableContext::RainGivenTemperature(TemperatureState::Cold),
        TableContext::RainGivenTemperature(TemperatureState::Mild),
        TableContext::RainGivenTemperature(TemperatureState::Hot),
        TableContext::LightningGivenRain(RainState::Rain),
        TableContext::LightningGivenRain(RainState::Dry),
        TableContext::Loading,
        TableContext::SnowGivenTemperature(TemperatureState::Cold),
        TableContext::SnowGivenTemperature(TemperatureState::Mild),
        TableContext::SnowGivenTemperature(TemperatureState::Hot),
    ];

    /// Every context once, in table order.
    pub fn all() -> impl Iterator<Item = TableContext> {
        Self::ALL.into_iter()
    }

    pub fn child_variable(self) -> &'static str {
        match self {
            Self::Temperature => TemperatureState::VARIABLE,
            Self::Wind => WindState::VARIABLE,
            Self::RainGivenTemperature(_) => RainState::VARIABLE,
            Self::LightningGivenRain(_) => LightningState::VARIABLE,
            Self::Loading => LoadingState::VARIABLE,
            Self::SnowGivenTemperature(_) => SnowState::VARIABLE,
        }
    }

    pub fn child_states(self) -> &'static [&'static str] {
        match self {
            Self::Temperature => TemperatureState::LABELS,
            Self::Wind => WindState::LABELS,
            Self::RainGivenTemperature(_) => RainState::LABELS,
            Self::LightningGivenRain(_) => LightningState::LABELS,
            Self::Loading => LoadingState::LABELS,
            Self::SnowGivenTemperature(_) => SnowState::LABELS,
        }
    }

    /// Condition-variable parent state besides the line state, if any.
    pub fn parent(self) -> Option<(&'static str, &'static str)> {
        match self {
            Self::RainGivenTemperature(t) | Self::SnowGivenTemperature(t) => {
                Some((TemperatureState::VARIABLE, t.label()))
            }
            Self::LightningGivenRain(r) => Some((RainState::VARIABLE, r.label())),
            _ => None,
        }
    }

    /// Short human-readable label such as `E3 | e11`.
    pub fn describe(self) -> String {
        match self.parent() {
            Some((_, s)) => format!("{} | {s}", self.child_variable()),
            None => self.child_variable().to_string(),
        }
    }
}

impl<R> ContextTables<R> {
    pub fn get(&self, ctx: TableContext) -> &R {
        match ctx {
            TableContext::Temperature => &self.temperature,
            TableContext::Wind => &self.wind,
            TableContext::RainGivenTemperature(t) => &self.rain_given_temperature[t.index()],
            TableContext::LightningGivenRain(r) => &self.lightning_given_rain[r.index()],
            TableContext::Loading => &self.loading,
            TableContext::SnowGivenTemperature(t) => &self.snow_given_temperature[t.index()],
        }
    }

    pub fn get_mut(&mut self, ctx: TableContext) -> &mut R {
        match ctx {
            TableContext::Temperature => &mut self.temperature,
            TableContext::Wind => &mut self.wind,
            TableContext::RainGivenTemperature(t) => &mut self.rain_given_temperature[t.index()],
            TableContext::LightningGivenRain(r) => &mut self.lightning_given_rain[r.index()],
            TableContext::Loading => &mut self.loading,
            TableContext::SnowGivenTemperature(t) => &mut self.snow_given_temperature[t.index()],
        }
    }

    /// Checks the family lengths so that every context is addressable.
    pub fn check_shape(&self) -> Result<()> {
        for (name, len, want) in [
            (
                "rain_given_temperature",
                self.rain_given_temperature.len(),
                3,
            ),
            ("lightning_given_rain", self.lightning_given_rain.len(), 2),
            (
                "snow_given_temperature",
                self.snow_given_temperature.len(),
                3,
            ),
        ] {
            if len != want {
                return Err(CfrError::InvalidSpec(format!(
                    "`{name}` has {len} rows, expected {want}"
                )));
            }
        }
        Ok(())
    }

    pub fn try_map<S, F>(&self, mut f: F) -> Result<ContextTables<S>>
    where
        F: FnMut(TableContext, &R) -> Result<S>,
    {
        self.check_shape()?;
        let family = |rows: &[R], ctx: &dyn Fn(usize) -> TableContext, f: &mut F| {
            rows.iter()
                .enumerate()
                .map(|(i, r)| f(ctx(i), r))
                .collect::<Result<Vec<S>>>()
        };
        Ok(ContextTables {
            temperature: f(TableContext::Temperature, &self.temperature)?,
            wind: f(TableContext::Wind, &self.wind)?,
            rain_given_temperature: family(
                &self.rain_given_temperature,
                &|i| TableContext::RainGivenTemperature(TemperatureState::ALL[i]),
                &mut f,
            )?,
            lightning_given_rain: family(
                &self.lightning_given_rain,
                &|i| TableContext::LightningGivenRain(RainState::ALL[i]),
                &mut f,
            )?,
            loading: f(TableContext::Loading, &self.loading)?,
            snow_given_temperature: family(
                &self.snow_given_temperature,
                &|i| TableContext::SnowGivenTemperature(TemperatureState::ALL[i]),
                &mut f,
            )?,
        })
    }
}

/// Failure counts per conditioning context.
pub type FailureCounts = ContextTables<MultinomialCounts>;

impl FailureCounts {
    pub fn empty() -> Self {
        let zeros = |m| MultinomialCounts::zeros(m).expect("at least two outcomes");
        Self {
            temperature: zeros(3),
            wind: zeros(3),
            rain_given_temperature: vec![zeros(2); 3],
            lightning_given_rain: vec![zeros(2); 2],
            loading: zeros(2),
            snow_given_temperature: vec![zeros(2); 3],
        }
    }

    /// Checks outcome counts per context and that the conditional families
    /// agree with their parents' marginals.
    pub fn validate(&self) -> Result<()> {
        self.check_shape()?;
        for ctx in TableContext::all() {
            let got = self.get(ctx).outcomes();
            let want = ctx.child_states().len();
            if got != want {
                return Err(CfrError::InvalidSpec(format!(
                    "counts for {} have {got} outcomes, expected {want}",
                    ctx.describe()
                )));
            }
        }
        for (i, t) in TemperatureState::ALL.iter().enumerate() {
            let n = self.temperature.counts()[i];
            for (name, family) in [
                ("rain", &self.rain_given_temperature),
                ("snow", &self.snow_given_temperature),
            ] {
                if family[i].total() != n {
                    return Err(CfrError::InvalidSpec(format!(
                        "{name} counts given {} total {}, but temperature count is {n}",
                        t.label(),
                        family[i].total()
                    )));
                }
            }
        }
        for r in RainState::ALL {
            let n: u64 = self
                .rain_given_temperature
                .iter()
                .map(|c| c.counts()[r.index()])
                .sum();
            if self.lightning_given_rain[r.index()].total() != n {
                return Err(CfrError::InvalidSpec(format!(
                    "lightning counts given {} total {}, but rain counts give {n}",
                    r.label(),
                    self.lightning_given_rain[r.index()].total()
                )));
            }
        }
        Ok(())
    }

    pub fn failures(&self) -> u64 {
        self.temperature.total()
    }
}

/// Counts the failure records per conditioning context; healthy hours are
/// ignored.
pub fn count_contingencies<'a, I>(states: I) -> FailureCounts
where
    I: IntoIterator<Item = &'a ConditionStateVector>,
{
    states
        .into_iter()
        .filter(|v| v.line == LineState::Failed)
        .fold(FailureCounts::empty(), |mut acc, v| {
            acc.temperature.increment(v.temperature.index());
            acc.wind.increment(v.wind.index());
            acc.rain_given_temperature[v.temperature.index()].increment(v.rain.index());
            acc.lightning_given_rain[v.rain.index()].increment(v.lightning.index());
            acc.loading.increment(v.loading.index());
            acc.snow_given_temperature[v.temperature.index()].increment(v.snow.index());
            acc
        })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cfr::fixtures;
    use crate::cfr::records::classify_record;

    #[test]
    fn empty_stream_counts_zero() {
        let c = count_contingencies(&[]);
        assert_eq!(c, FailureCounts::empty());
        assert_eq!(c.failures(), 0);
    }

    #[test]
    fn reconstruction_reproduces_fixture_counts() {
        let states: Vec<_> = fixtures::reconstruct_failure_records()
            .iter()
            .map(|r| classify_record(r).unwrap())
            .collect();
        let counts = count_contingencies(&states);
        assert_eq!(counts, fixtures::failure_counts());
        assert_eq!(counts.temperature.counts(), &[12, 7, 21]);
        assert_eq!(counts.wind.counts(), &[8, 4, 28]);
        assert_eq!(counts.loading.counts(), &[22, 18]);
        assert_eq!(counts.lightning_given_rain[0].counts(), &[16, 10]);
        assert_eq!(counts.lightning_given_rain[1].counts(), &[2, 12]);
        assert_eq!(counts.rain_given_temperature[0].counts(), &[5, 7]);
        assert_eq!(counts.snow_given_temperature[0].counts(), &[8, 4]);
    }

    #[test]
    fn healthy_hours_are_ignored() {
        let mut records = fixtures::reconstruct_failure_records();
        let healthy: Vec<_> = records
            .iter()
            .map(|r| super::super::OperatingRecord {
                timestamp: r.timestamp + 1,
                failed: false,
                ..*r
            })
            .collect();
        records.extend(healthy);
        let states: Vec<_> = records
            .iter()
            .map(|r| classify_record(r).unwrap())
            .collect();
        assert_eq!(count_contingencies(&states), fixtures::failure_counts());
    }

    #[test]
    fn fixture_counts_are_consistent() {
        fixtures::failure_counts().validate().unwrap();
        let mut bad = fixtures::failure_counts();
        bad.snow_given_temperature[2] = MultinomialCounts::new(vec![0, 20]).unwrap();
        assert!(bad.validate().is_err());
    }

    #[test]
    fn contexts_are_addressable() {
        let counts = fixtures::failure_counts();
        let n: usize = TableContext::all().count();
        assert_eq!(n, 11);
        let mapped = counts.try_map(|_, c| Ok(c.total())).unwrap();
        assert_eq!(mapped.temperature, 40);
        assert_eq!(mapped.lightning_given_rain, vec![26, 14]);
        assert_eq!(
            TableContext::SnowGivenTemperature(TemperatureState::Hot).describe(),
            "E6 | e13"
        );
    }
}

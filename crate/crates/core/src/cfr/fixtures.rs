//! Bundled reference data: historical failure counts for the 40 recorded
//! failures, long-run healthy-hour statistics, two prior weight sets, two
//! line priors and four forecast scenarios.

use super::model::{CfrNetworkSpec, HealthyRows, PriorWeights, Scenario};
use super::records::{OperatingRecord, TemperatureState};
use super::tables::FailureCounts;
use super::Result;
use crate::estimate::SampleSize;

pub const FAILURE_COUNTS_JSON: &str = include_str!("../../data/tables/failure_counts.json");
pub const HEALTHY_ROWS_JSON: &str = include_str!("../../data/tables/healthy_rows.json");
pub const BASELINE_WEIGHTS_JSON: &str =
    include_str!("../../data/tables/prior_weights_baseline.json");
pub const ALTERNATE_WEIGHTS_JSON: &str =
    include_str!("../../data/tables/prior_weights_alternate.json");

pub const SCENARIO_JSON: [(&str, &str); 4] = [
    (
        "line1_storm",
        include_str!("../../data/scenarios/line1_storm.json"),
    ),
    (
        "line1_fair",
        include_str!("../../data/scenarios/line1_fair.json"),
    ),
    (
        "line2_storm",
        include_str!("../../data/scenarios/line2_storm.json"),
    ),
    (
        "line2_storm_uncertain_wind",
        include_str!("../../data/scenarios/line2_storm_uncertain_wind.json"),
    ),
];

pub const TWO_CONDITION_SIM_JSON: &str = include_str!("../../data/sim/two_condition.json");
pub const SINGLE_CONDITION_SIM_JSON: &str = include_str!("../../data/sim/single_condition.json");
pub const SAMPLE_SIZE_SWEEP_SIM_JSON: &str = include_str!("../../data/sim/sample_size_sweep.json");

/// Average hourly failure rate of the younger line.
pub const LINE_1_PRIOR: f64 = 0.00027;
/// Average hourly failure rate of the older line.
pub const LINE_2_PRIOR: f64 = 0.00042;

fn parse<T: serde::de::DeserializeOwned>(text: &str) -> T {
    serde_json::from_str(text).expect("bundled fixture parses")
}

pub fn failure_counts() -> FailureCounts {
    parse(FAILURE_COUNTS_JSON)
}

pub fn healthy_rows() -> HealthyRows {
    parse(HEALTHY_ROWS_JSON)
}

pub fn baseline_weights() -> PriorWeights {
    parse(BASELINE_WEIGHTS_JSON)
}

pub fn alternate_weights() -> PriorWeights {
    parse(ALTERNATE_WEIGHTS_JSON)
}

/// Bundled counts and healthy rows with `s = 1` and the given prior.
pub fn line_spec(prior_failure_rate: f64) -> CfrNetworkSpec {
    CfrNetworkSpec {
        prior_failure_rate,
        h2_counts: failure_counts(),
        h1_rows: healthy_rows(),
        s: SampleSize::default(),
    }
}

/// Storm on line 1, fair weather on line 1, storm on line 2, storm on line 2
/// with uncertain wind.
pub fn scenarios() -> Vec<Scenario> {
    SCENARIO_JSON.iter().map(|(_, text)| parse(text)).collect()
}

pub fn scenario(name: &str) -> Option<Scenario> {
    scenarios().into_iter().find(|s| s.name == name)
}

/// Representative readings for each class.
const TEMPERATURE_C: [f64; 3] = [-5.0, 15.0, 30.0];
const WIND_KMH: [f64; 3] = [8.0, 25.0, 55.0];
const LOADING: [f64; 2] = [0.60, 0.95];

/// A deterministic set of failure hours whose contingency counts equal
/// `counts`. Records are grouped by temperature class; within a class the
/// rain and snow hours come first, and wind and loading classes are assigned
/// in record order.
pub fn records_matching(counts: &FailureCounts) -> Result<Vec<OperatingRecord>> {
    counts.validate()?;
    let mut records = Vec::with_capacity(counts.failures() as usize);
    for t in TemperatureState::ALL {
        let n = counts.temperature.counts()[t.index()];
        let rain = counts.rain_given_temperature[t.index()].counts()[0];
        let snow = counts.snow_given_temperature[t.index()].counts()[0];
        for j in 0..n {
            records.push(OperatingRecord {
                timestamp: 0,
                temperature_c: TEMPERATURE_C[t.index()],
                wind_kmh: 0.0,
                rain: j < rain,
                lightning: false,
                snow_ice: j < snow,
                loading_rate: 0.0,
                failed: true,
            });
        }
    }
    let mut lightning_left = [
        counts.lightning_given_rain[0].counts()[0],
        counts.lightning_given_rain[1].counts()[0],
    ];
    let wind_edges = cumulative(counts.wind.counts());
    let loading_edges = cumulative(counts.loading.counts());
    for (i, r) in records.iter_mut().enumerate() {
        let i = i as u64;
        let slot = usize::from(!r.rain);
        if lightning_left[slot] > 0 {
            r.lightning = true;
            lightning_left[slot] -= 1;
        }
        r.wind_kmh = WIND_KMH[wind_edges
            .iter()
            .position(|&e| i < e)
            .expect("within total")];
        r.loading_rate = LOADING[loading_edges
            .iter()
            .position(|&e| i < e)
            .expect("within total")];
        r.timestamp = 100 + 173 * i;
    }
    Ok(records)
}

fn cumulative(counts: &[u64]) -> Vec<u64> {
    counts
        .iter()
        .scan(0, |acc, &c| {
            *acc += c;
            Some(*acc)
        })
        .collect()
}

/// The 40 failure hours consistent with the bundled counts.
pub fn reconstruct_failure_records() -> Vec<OperatingRecord> {
    records_matching(&failure_counts()).expect("bundled counts are consistent")
}

/// Network document for a line under the bundled counts at `s = 1`.
pub fn line_network_json(prior_failure_rate: f64) -> String {
    let net = super::build_cfr_network(&line_spec(prior_failure_rate), &super::EstimationMode::Idm)
        .expect("bundled inputs are valid");
    net.to_json() + "\n"
}

/// [`reconstruct_failure_records`] as CSV.
pub fn failure_history_csv() -> String {
    let mut buf = Vec::new();
    super::write_records(&mut buf, &reconstruct_failure_records()).expect("in-memory write");
    String::from_utf8(buf).expect("CSV is UTF-8")
}

/// Generated files under `data/`, relative to the crate root.
pub fn generated_files() -> Vec<(&'static str, String)> {
    vec![
        (
            "data/networks/line1_idm.json",
            line_network_json(LINE_1_PRIOR),
        ),
        (
            "data/networks/line2_idm.json",
            line_network_json(LINE_2_PRIOR),
        ),
        ("data/records/failure_history.csv", failure_history_csv()),
    ]
}

use std::collections::HashSet;
use std::io::Read;

use serde::{Deserialize, Serialize};

use super::{CfrError, Result};

macro_rules! state_enum {
    ($(#[$doc:meta])* $name:ident : $var:literal { $($variant:ident => $label:literal),+ $(,)? }) => {
        $(#[$doc])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
        pub enum $name {
            $(#[serde(rename = $label)] $variant),+
        }

        impl $name {
            pub const VARIABLE: &'static str = $var;
            pub const ALL: &'static [$name] = &[$($name::$variant),+];
            pub const LABELS: &'static [&'static str] = &[$($label),+];

            pub fn index(self) -> usize {
                Self::ALL.iter().position(|&s| s == self).expect("variant listed")
            }

            pub fn label(self) -> &'static str {
                Self::LABELS[self.index()]
            }
        }
    };
}

state_enum!(
    /// `T <= 4`, `4 < T <= 26`, `T > 26` degrees Celsius.
    TemperatureState: "E1" { Cold => "e11", Mild => "e12", Hot => "e13" }
);
state_enum!(
    /// `W <= 12`, `12 < W <= 40`, `W > 40` km/h.
    WindState: "E2" { Calm => "e21", Breezy => "e22", Strong => "e23" }
);
state_enum!(RainState: "E3" { Rain => "e31", Dry => "e32" });
state_enum!(LightningState: "E4" { Lightning => "e41", Quiet => "e42" });
state_enum!(
    /// Loading rate `L <= 0.80` or above.
    LoadingState: "E5" { Normal => "e51", Heavy => "e52" }
);
state_enum!(SnowState: "E6" { SnowIce => "e61", Clear => "e62" });
state_enum!(LineState: "H" { Healthy => "h1", Failed => "h2" });

/// One hour of line history.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OperatingRecord {
    pub timestamp: u64,
    pub temperature_c: f64,
    pub wind_kmh: f64,
    pub rain: bool,
    pub lightning: bool,
    pub snow_ice: bool,
    pub loading_rate: f64,
    pub failed: bool,
}

/// Classified states of one record.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ConditionStateVector {
    pub temperature: TemperatureState,
    pub wind: WindState,
    pub rain: RainState,
    pub lightning: LightningState,
    pub loading: LoadingState,
    pub snow: SnowState,
    pub line: LineState,
}

impl ConditionStateVector {
    /// `(variable, state)` labels of the six condition variables.
    pub fn condition_labels(&self) -> [(&'static str, &'static str); 6] {
        [
            (TemperatureState::VARIABLE, self.temperature.label()),
            (WindState::VARIABLE, self.wind.label()),
            (RainState::VARIABLE, self.rain.label()),
            (LightningState::VARIABLE, self.lightning.label()),
            (LoadingState::VARIABLE, self.loading.label()),
            (SnowState::VARIABLE, self.snow.label()),
        ]
    }
}

pub const MAX_LOADING_RATE: f64 = 1.5;

impl OperatingRecord {
    pub fn validate(&self) -> Result<()> {
        for (field, v) in [
            ("temperature_c", self.temperature_c),
            ("wind_kmh", self.wind_kmh),
            ("loading_rate", self.loading_rate),
        ] {
            if !v.is_finite() {
                return Err(CfrError::InvalidReading {
                    field,
                    value: v,
                    reason: "not finite",
                });
            }
        }
        if self.wind_kmh < 0.0 {
            return Err(CfrError::InvalidReading {
                field: "wind_kmh",
                value: self.wind_kmh,
                reason: "negative",
            });
        }
        if !(0.0..=MAX_LOADING_RATE).contains(&self.loading_rate) {
            return Err(CfrError::InvalidReading {
                field: "loading_rate",
                value: self.loading_rate,
                reason: "outside [0, 1.5]",
            });
        }
        Ok(())
    }
}

/// Threshold classification; every boundary value falls in the lower class.
pub fn classify_record(record: &OperatingRecord) -> Result<ConditionStateVector> {
    record.validate()?;
    let temperature = match record.temperature_c {
        t if t <= 4.0 => TemperatureState::Cold,
        t if t <= 26.0 => TemperatureState::Mild,
        _ => TemperatureState::Hot,
    };
    let wind = match record.wind_kmh {
        w if w <= 12.0 => WindState::Calm,
        w if w <= 40.0 => WindState::Breezy,
        _ => WindState::Strong,
    };
    Ok(ConditionStateVector {
        temperature,
        wind,
        rain: if record.rain {
            RainState::Rain
        } else {
            RainState::Dry
        },
        lightning: if record.lightning {
            LightningState::Lightning
        } else {
            LightningState::Quiet
        },
        loading: if record.loading_rate <= 0.80 {
            LoadingState::Normal
        } else {
            LoadingState::Heavy
        },
        snow: if record.snow_ice {
            SnowState::SnowIce
        } else {
            SnowState::Clear
        },
        line: if record.failed {
            LineState::Failed
        } else {
            LineState::Healthy
        },
    })
}

pub const RECORD_HEADER: [&str; 8] = [
    "timestamp",
    "temperature_c",
    "wind_kmh",
    "rain",
    "lightning",
    "snow_ice",
    "loading_rate",
    "failed",
];

#[derive(Debug, Deserialize, Serialize)]
struct RawRecord {
    timestamp: u64,
    temperature_c: f64,
    wind_kmh: f64,
    rain: u8,
    lightning: u8,
    snow_ice: u8,
    loading_rate: f64,
    failed: u8,
}

fn flag(field: &'static str, v: u8, line: u64) -> Result<bool> {
    match v {
        0 => Ok(false),
        1 => Ok(true),
        _ => Err(CfrError::Record {
            line,
            message: format!("`{field}` must be 0 or 1, got {v}"),
        }),
    }
}

/// Parses and validates a records CSV. Errors name the 1-based file line.
pub fn read_records<R: Read>(reader: R) -> Result<Vec<OperatingRecord>> {
    let mut csv = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header = csv.headers().map_err(|e| CfrError::Record {
        line: 1,
        message: e.to_string(),
    })?;
    if !header.is_empty() && header.iter().ne(RECORD_HEADER) {
        return Err(CfrError::Record {
            line: 1,
            message: format!("expected header `{}`", RECORD_HEADER.join(",")),
        });
    }
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for row in csv.deserialize::<RawRecord>() {
        let row = row.map_err(|e| CfrError::Record {
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        let line = out.len() as u64 + 2;
        let record = OperatingRecord {
            timestamp: row.timestamp,
            temperature_c: row.temperature_c,
            wind_kmh: row.wind_kmh,
            rain: flag("rain", row.rain, line)?,
            lightning: flag("lightning", row.lightning, line)?,
            snow_ice: flag("snow_ice", row.snow_ice, line)?,
            loading_rate: row.loading_rate,
            failed: flag("failed", row.failed, line)?,
        };
        record.validate().map_err(|e| CfrError::Record {
            line,
            message: e.to_string(),
        })?;
        if !seen.insert(record.timestamp) {
            return Err(CfrError::Record {
                line,
                message: format!("duplicate hour {}", record.timestamp),
            });
        }
        out.push(record);
    }
    Ok(out)
}

pub fn write_records<W: std::io::Write>(writer: W, records: &[OperatingRecord]) -> Result<()> {
    let mut csv = csv::Writer::from_writer(writer);
    for r in records {
        csv.serialize(RawRecord {
            timestamp: r.timestamp,
            temperature_c: r.temperature_c,
            wind_kmh: r.wind_kmh,
            rain: r.rain.into(),
            lightning: r.lightning.into(),
            snow_ice: r.snow_ice.into(),
            loading_rate: r.loading_rate,
            failed: r.failed.into(),
        })
        .map_err(|e| CfrError::Io(e.to_string()))?;
    }
    csv.flush().map_err(|e| CfrError::Io(e.to_string()))?;
    Ok(())
}

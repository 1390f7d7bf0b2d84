//! Three-state power model for the camera module and battery-life projection
//! for the host earbud.
//!
//! Each query keeps the module ACTIVE for a fixed time; the rest of the hour
//! it idles. The camera draw is added to the earbud's own baseline, which is
//! back-solved from the advertised battery life.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Scalar;

pub const LIFE_TABLE_CSV_HEADER: &str = "queries_per_hour,added_mW,life_h";

/// Query rates of the published battery-life table.
pub const REFERENCE_QUERY_RATES: [f64; 5] = [0.0, 5.0, 10.0, 20.0, 60.0];

/// Published Sony battery life (hours) at [`REFERENCE_QUERY_RATES`].
pub const REFERENCE_SONY_LIFE_H: [f64; 5] = [5.48, 5.47, 5.46, 5.44, 5.35];

/// Published always-on battery life (hours); not reproduced by the model.
pub const REFERENCE_ALWAYS_ON_SONY_H: f64 = 3.5;
pub const REFERENCE_ALWAYS_ON_AIRPODS_H: f64 = 3.18;

/// Published AirPods battery life at 5 and 60 queries per hour.
pub const REFERENCE_AIRPODS_LIFE_H: [(f64, f64); 2] = [(5.0, 5.23), (60.0, 5.18)];

/// Per-component draw in mW as (name, idle, active).
pub const COMPONENT_POWER_MW: [(&str, f64, f64); 3] = [
    ("soc", 3.53, 19.2),
    ("pmic", 0.148, 0.148),
    ("camera", 0.2, 1.1),
];

/// Sum of the component estimates, as tabulated.
pub const ESTIMATED_IDLE_MW: f64 = 3.878;
pub const ESTIMATED_ACTIVE_MW: f64 = 20.5;
/// Bench measurements at the battery terminals.
pub const MEASURED_IDLE_MW: f64 = 3.8;
pub const MEASURED_ACTIVE_MW: f64 = 24.9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PowerError {
    #[error("{queries_per_hour} queries/h of {active_secs} s exceed one hour of activity")]
    DutyExceeded { queries_per_hour: f64, active_secs: f64 },
    #[error("invalid power profile: {0}")]
    InvalidProfile(String),
    #[error("invalid battery: {0}")]
    InvalidBattery(String),
    #[error("unknown battery preset {0:?}")]
    UnknownPreset(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum PowerState {
    Off,
    Idle,
    Active,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum PowerEvent {
    InEar,
    OutEar,
    InCase,
    WakeWord,
    #[serde(rename = "TIMEOUT_3S")]
    Timeout3s,
    Stop,
}

impl PowerEvent {
    pub const ALL: [PowerEvent; 6] = [
        PowerEvent::InEar,
        PowerEvent::OutEar,
        PowerEvent::InCase,
        PowerEvent::WakeWord,
        PowerEvent::Timeout3s,
        PowerEvent::Stop,
    ];
}

/// Next state of the module. Pairs without a defined transition leave the
/// state unchanged.
pub fn step_state(state: PowerState, event: PowerEvent) -> PowerState {
    use PowerEvent::*;
    use PowerState::*;
    match (state, event) {
        (Off, InEar) => Idle,
        (Idle, WakeWord) => Active,
        (Active, Timeout3s) => Idle,
        (Idle | Active, OutEar | InCase) => Off,
        (s, _) => s,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PowerProfile<T> {
    pub p_idle_mw: T,
    pub p_active_mw: T,
    pub p_off_mw: T,
    pub active_secs_per_query: T,
}

impl<T: Scalar> Default for PowerProfile<T> {
    fn default() -> Self {
        Self {
            p_idle_mw: T::lit(MEASURED_IDLE_MW),
            p_active_mw: T::lit(MEASURED_ACTIVE_MW),
            p_off_mw: T::zero(),
            active_secs_per_query: T::lit(3.0),
        }
    }
}

impl<T: Scalar> PowerProfile<T> {
    pub fn validate(&self) -> Result<(), PowerError> {
        let vals = [self.p_idle_mw, self.p_active_mw, self.p_off_mw, self.active_secs_per_query];
        if vals.iter().any(|v| !v.is_finite()) {
            return Err(PowerError::InvalidProfile("non-finite value".into()));
        }
        if !(T::zero() <= self.p_off_mw && self.p_off_mw <= self.p_idle_mw && self.p_idle_mw <= self.p_active_mw) {
            return Err(PowerError::InvalidProfile("require 0 <= off <= idle <= active".into()));
        }
        if self.active_secs_per_query <= T::zero() {
            return Err(PowerError::InvalidProfile("active time per query must be positive".into()));
        }
        Ok(())
    }

    /// Draw of the module in `state`.
    pub fn power_in(&self, state: PowerState) -> T {
        match state {
            PowerState::Off => self.p_off_mw,
            PowerState::Idle => self.p_idle_mw,
            PowerState::Active => self.p_active_mw,
        }
    }
}

/// Hour-averaged draw of the module while in the ear at `queries_per_hour`.
pub fn average_added_power<T: Scalar>(profile: &PowerProfile<T>, queries_per_hour: T) -> Result<T, PowerError> {
    profile.validate()?;
    let active = queries_per_hour * profile.active_secs_per_query;
    if !(queries_per_hour >= T::zero()) || active > T::lit(3600.0) {
        return Err(PowerError::DutyExceeded {
            queries_per_hour: queries_per_hour.as_f64(),
            active_secs: profile.active_secs_per_query.as_f64(),
        });
    }
    let duty = active / T::lit(3600.0);
    Ok(duty * profile.p_active_mw + (T::one() - duty) * profile.p_idle_mw)
}

/// Pack voltage implied by a capacity, a baseline draw and the life it buys.
pub fn derive_nominal_voltage<T: Scalar>(capacity_mah: T, baseline_mw: T, advertised_life_h: T) -> T {
    baseline_mw * advertised_life_h / capacity_mah
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BatteryModel<T> {
    pub capacity_mah: T,
    pub nominal_voltage_v: T,
    pub baseline_mw: T,
    pub advertised_life_h: T,
}

/// Battery description as stored in preset files. The voltage is derived
/// when omitted.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BatteryPreset {
    pub capacity_mah: f64,
    pub baseline_mw: f64,
    pub advertised_life_h: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nominal_voltage_v: Option<f64>,
}

impl BatteryPreset {
    pub const SONY: BatteryPreset =
        BatteryPreset { capacity_mah: 65.0, baseline_mw: 40.08, advertised_life_h: 6.0, nominal_voltage_v: None };
    pub const AIRPODS: BatteryPreset =
        BatteryPreset { capacity_mah: 49.7, baseline_mw: 30.65, advertised_life_h: 6.0, nominal_voltage_v: None };

    pub fn from_json(text: &str) -> Result<Self, PowerError> {
        serde_json::from_str(text).map_err(|e| PowerError::InvalidBattery(e.to_string()))
    }

    pub fn to_model<T: Scalar>(&self) -> Result<BatteryModel<T>, PowerError> {
        let capacity = T::lit(self.capacity_mah);
        let baseline = T::lit(self.baseline_mw);
        let life = T::lit(self.advertised_life_h);
        let voltage = match self.nominal_voltage_v {
            Some(v) => T::lit(v),
            None => derive_nominal_voltage(capacity, baseline, life),
        };
        let model = BatteryModel {
            capacity_mah: capacity,
            nominal_voltage_v: voltage,
            baseline_mw: baseline,
            advertised_life_h: life,
        };
        model.validate()?;
        Ok(model)
    }
}

impl FromStr for BatteryPreset {
    type Err = PowerError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "sony" => Ok(Self::SONY),
            "airpods" => Ok(Self::AIRPODS),
            _ => Err(PowerError::UnknownPreset(s.to_string())),
        }
    }
}

impl<T: Scalar> BatteryModel<T> {
    pub fn sony() -> Self {
        BatteryPreset::SONY.to_model().expect("built-in preset is valid")
    }

    pub fn airpods() -> Self {
        BatteryPreset::AIRPODS.to_model().expect("built-in preset is valid")
    }

    /// Stored energy in mWh.
    pub fn energy_mwh(&self) -> T {
        self.capacity_mah * self.nominal_voltage_v
    }

    pub fn validate(&self) -> Result<(), PowerError> {
        let vals = [self.capacity_mah, self.nominal_voltage_v, self.baseline_mw, self.advertised_life_h];
        if vals.iter().any(|v| !(v.is_finite() && *v > T::zero())) {
            return Err(PowerError::InvalidBattery("all fields must be positive".into()));
        }
        let implied = self.energy_mwh() / self.baseline_mw;
        if ((implied - self.advertised_life_h) / self.advertised_life_h).abs() > T::lit(0.01) {
            return Err(PowerError::InvalidBattery(format!(
                "capacity x voltage / baseline gives {:.3} h, advertised {:.3} h",
                implied, self.advertised_life_h
            )));
        }
        Ok(())
    }
}

/// Hours of use with the module drawing `added_mw` on top of the baseline.
pub fn battery_life<T: Scalar>(battery: &BatteryModel<T>, added_mw: T) -> T {
    battery.energy_mwh() / (battery.baseline_mw + added_mw)
}

/// Battery life with the module held ACTIVE.
pub fn always_on_life<T: Scalar>(battery: &BatteryModel<T>, profile: &PowerProfile<T>) -> T {
    battery_life(battery, profile.p_active_mw)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LifeRow<T> {
    pub queries_per_hour: T,
    pub added_mw: T,
    pub life_h: T,
}

pub fn battery_life_table<T: Scalar>(
    profile: &PowerProfile<T>,
    battery: &BatteryModel<T>,
    queries_per_hour: &[T],
) -> Result<Vec<LifeRow<T>>, PowerError> {
    queries_per_hour
        .iter()
        .map(|&q| {
            let added = average_added_power(profile, q)?;
            Ok(LifeRow { queries_per_hour: q, added_mw: added, life_h: battery_life(battery, added) })
        })
        .collect()
}

pub fn life_table_to_csv<T: Scalar>(rows: &[LifeRow<T>]) -> String {
    let mut out = String::from(LIFE_TABLE_CSV_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(out, "{},{:.3},{:.3}", r.queries_per_hour, r.added_mw, r.life_h);
    }
    out
}

/// Model output set against a published figure the model does not reproduce.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Discrepancy {
    pub label: String,
    pub model_h: f64,
    pub reference_h: f64,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateVsMeasured {
    pub state: PowerState,
    pub estimated_mw: f64,
    pub measured_mw: f64,
}

pub fn estimate_vs_measured() -> [EstimateVsMeasured; 2] {
    [
        EstimateVsMeasured { state: PowerState::Idle, estimated_mw: ESTIMATED_IDLE_MW, measured_mw: MEASURED_IDLE_MW },
        EstimateVsMeasured {
            state: PowerState::Active,
            estimated_mw: ESTIMATED_ACTIVE_MW,
            measured_mw: MEASURED_ACTIVE_MW,
        },
    ]
}

/// Always-on life for `battery` compared with the published figure, when
/// one exists for that platform.
pub fn always_on_discrepancy(
    preset: &BatteryPreset,
    profile: &PowerProfile<f64>,
) -> Result<Option<Discrepancy>, PowerError> {
    let reference = if *preset == BatteryPreset::SONY {
        REFERENCE_ALWAYS_ON_SONY_H
    } else if *preset == BatteryPreset::AIRPODS {
        REFERENCE_ALWAYS_ON_AIRPODS_H
    } else {
        return Ok(None);
    };
    let model = always_on_life(&preset.to_model::<f64>()?, profile);
    Ok(Some(Discrepancy {
        label: "always_on".into(),
        model_h: model,
        reference_h: reference,
        note: format!(
            "capacity x voltage / (baseline + active) gives {model:.2} h; the published {reference} h \
             does not follow from the stated inputs"
        ),
    }))
}

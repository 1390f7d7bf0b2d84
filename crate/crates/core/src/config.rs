//! Effective run configuration, merged from defaults, a JSON file and flags.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{BlindSpotQuery, HeadCameraRig, HARMON_DISTANCE_CM};
use crate::imaging::{FramePreset, Pattern, PlanarScene};
use crate::link::LinkConfig;
use crate::pipeline::{MockConfig, PipelineConfig};
use crate::power::{BatteryPreset, PowerProfile};
use crate::stitch::{StitchParams, DEFAULT_STITCH_SEED};

#[derive(Debug, Error)]
#[error("invalid config file: {0}")]
pub struct ConfigError(pub String);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Seeds RANSAC and any mock jitter.
    pub seed: u64,
    pub frame: FramePreset,
    pub rig: HeadCameraRig<f64>,
    pub blind_spot: BlindSpotQuery<f64>,
    pub link: LinkConfig,
    pub power: PowerProfile<f64>,
    pub battery: BatteryPreset,
    pub stitch: StitchParams,
    pub pipeline: PipelineConfig,
    pub mock: MockConfig,
    pub remote_timeout_s: f64,
    /// Scene used by `render` and `pipeline` unless one is given.
    pub scene: PlanarScene,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: DEFAULT_STITCH_SEED,
            frame: FramePreset::Qvga,
            rig: HeadCameraRig::default().with_yaw(5.0),
            blind_spot: BlindSpotQuery::default(),
            link: LinkConfig::default(),
            power: PowerProfile::default(),
            battery: BatteryPreset::SONY,
            stitch: StitchParams::default(),
            pipeline: PipelineConfig::default(),
            mock: MockConfig::default(),
            remote_timeout_s: 30.0,
            scene: PlanarScene {
                pattern: Pattern::Text { seed: 7 },
                depth_cm: HARMON_DISTANCE_CM,
                extent_cm: [200.0, 200.0],
                object_width_cm: None,
            },
        }
    }
}

impl RunConfig {
    /// Defaults overridden by whichever fields `text` sets.
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        serde_json::from_str(text).map_err(|e| ConfigError(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config always serializes")
    }
}

/// Envelope written around every JSON report.
#[derive(Debug, Serialize)]
pub struct Report<'a, T: Serialize> {
    pub tool: &'static str,
    pub version: &'static str,
    pub run_config: &'a RunConfig,
    #[serde(flatten)]
    pub body: T,
}

impl<'a, T: Serialize> Report<'a, T> {
    pub fn new(config: &'a RunConfig, body: T) -> Self {
        Report { tool: "earsight", version: crate::VERSION, run_config: config, body }
    }

    pub fn to_json(&self) -> Result<String, serde_json::Error> {
        serde_json::to_string_pretty(self).map(|mut s| {
            s.push('\n');
            s
        })
    }
}

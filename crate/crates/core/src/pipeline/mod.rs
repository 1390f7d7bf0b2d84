//! End-to-end query orchestration on a virtual clock: wake word, capture,
//! optional stitching and model inference.

mod client;
mod wake;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::HeadCameraRig;
use crate::imaging::{render_pair, FrameSpec, ImagingError, PlanarScene};
use crate::link::{simulate_dual_acquisition, LinkConfig, LinkError};
use crate::stitch::{try_stitch, StitchParams, StitchResult};

pub use client::{Inference, InferenceClient, MockClient, MockConfig, RemoteClient};
pub use wake::{normalize, similarity, wake_word_detect, WakeMatch, WakeWordConfig};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PipelineError {
    #[error("no wake word in transcript")]
    NoWakeWord,
    #[error("invalid pipeline config: {0}")]
    InvalidConfig(String),
    #[error("invalid inference input: {0}")]
    InvalidInput(String),
    #[error("remote inference failed: {0}")]
    Remote(String),
    #[error(transparent)]
    Imaging(#[from] ImagingError),
    #[error(transparent)]
    Link(#[from] LinkError),
}

/// The three system configurations compared for end-to-end latency.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LatencyConfig {
    /// Wake word found only after the query is transcribed; capture starts
    /// at query completion.
    A,
    /// On-device wake word; frames stream while the user is still speaking.
    B,
    /// As B, plus stitching during the remaining speech.
    C,
}

impl std::str::FromStr for LatencyConfig {
    type Err = PipelineError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "A" | "a" => Ok(LatencyConfig::A),
            "B" | "b" => Ok(LatencyConfig::B),
            "C" | "c" => Ok(LatencyConfig::C),
            other => Err(PipelineError::InvalidConfig(format!("unknown latency config {other:?}"))),
        }
    }
}

impl std::fmt::Display for LatencyConfig {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            LatencyConfig::A => "A",
            LatencyConfig::B => "B",
            LatencyConfig::C => "C",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InputShape {
    Stitched,
    Dual,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PromptTemplates {
    pub stitched: String,
    pub dual: String,
}

impl Default for PromptTemplates {
    fn default() -> Self {
        PromptTemplates {
            stitched: "You are a visual assistant. The image is a single wide view stitched from two \
                       cameras worn at the user's ears. Answer the user's question briefly."
                .into(),
            dual: "You are a visual assistant. The two images come from cameras worn at the user's \
                   left and right ears and show the same scene from slightly different angles. \
                   Answer the user's question briefly."
                .into(),
        }
    }
}

pub fn select_prompt(shape: InputShape, templates: &PromptTemplates) -> &str {
    match shape {
        InputShape::Stitched => &templates.stitched,
        InputShape::Dual => &templates.dual,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineConfig {
    pub wake: WakeWordConfig,
    /// Words per second used to place the transcript on the clock.
    pub speech_rate_wps: f64,
    /// On-device detection delay after the wake word ends.
    pub detection_latency_s: f64,
    /// Extra wait after query completion before configuration A detects the
    /// wake word.
    pub asr_delay_s: f64,
    /// Virtual duration of one stitch attempt.
    pub stitch_secs: f64,
    /// Speech synthesis overhead between first token and reply.
    pub synthesis_s: f64,
    pub prompts: PromptTemplates,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            wake: WakeWordConfig::default(),
            speech_rate_wps: 2.5,
            detection_latency_s: 0.1,
            asr_delay_s: 0.0,
            stitch_secs: 0.15,
            synthesis_s: 0.0,
            prompts: PromptTemplates::default(),
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<(), PipelineError> {
        self.wake.validate()?;
        if !(self.speech_rate_wps > 0.0 && self.speech_rate_wps.is_finite()) {
            return Err(PipelineError::InvalidConfig("speech rate must be positive".into()));
        }
        let delays = [self.detection_latency_s, self.asr_delay_s, self.stitch_secs, self.synthesis_s];
        if delays.iter().any(|d| !(*d >= 0.0 && d.is_finite())) {
            return Err(PipelineError::InvalidConfig("delays must be non-negative".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    WakeDetected,
    CameraTriggered,
    ImagesReady,
    StitchDone,
    QueryComplete,
    VlmFirstToken,
    ReplyReady,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimelineEvent {
    pub event: EventKind,
    /// Seconds relative to query completion.
    pub t_s: f64,
}

/// One stretch of the wait between query completion and first token.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub name: String,
    pub start_s: f64,
    pub end_s: f64,
}

impl Segment {
    pub fn duration_s(&self) -> f64 {
        self.end_s - self.start_s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueryTimeline {
    pub config: LatencyConfig,
    pub wake: WakeMatch,
    pub path: InputShape,
    /// Why the dual path was taken in configuration C.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dual_reason: Option<String>,
    pub speech_s: f64,
    pub asr_chunks: usize,
    pub acquisition_s: f64,
    pub ttft_s: f64,
    /// Events in time order.
    pub events: Vec<TimelineEvent>,
    /// Contiguous segments from query completion to first token.
    pub critical_path: Vec<Segment>,
    /// First token time minus query completion.
    pub total_latency_s: f64,
    pub reply: String,
}

impl QueryTimeline {
    pub fn event(&self, kind: EventKind) -> Option<f64> {
        self.events.iter().find(|e| e.event == kind).map(|e| e.t_s)
    }

    /// `config,total_latency_s,path`
    pub fn summary_line(&self) -> String {
        let path = match self.path {
            InputShape::Stitched => "stitched",
            InputShape::Dual => "dual",
        };
        format!("{},{:.3},{}", self.config, self.total_latency_s, path)
    }
}

/// Everything about the device and models a query runs against.
#[derive(Debug, Clone, Copy)]
pub struct QueryContext<'a> {
    pub rig: &'a HeadCameraRig<f64>,
    pub frame: FrameSpec,
    pub link: &'a LinkConfig,
    pub stitch: &'a StitchParams,
    pub stitch_seed: u64,
    pub pipeline: &'a PipelineConfig,
}

/// Walks the milestones gating inference after query completion and
/// returns the segments plus the inference start time.
fn gate_segments(milestones: &[(&str, f64)]) -> (Vec<Segment>, f64) {
    let mut cursor = 0.0;
    let mut out = Vec::new();
    for &(name, end) in milestones {
        if end > cursor {
            out.push(Segment { name: name.into(), start_s: cursor, end_s: end });
            cursor = end;
        }
    }
    (out, cursor)
}

/// Simulates one spoken query end to end. Times are relative to the end of
/// speech; the transcript is spoken at a constant word rate, so text before
/// the wake phrase and after it shifts the wake word into the past.
pub fn run_query(
    config: LatencyConfig,
    transcript: &str,
    scene: &PlanarScene,
    ctx: &QueryContext<'_>,
    client: &mut dyn InferenceClient,
) -> Result<QueryTimeline, PipelineError> {
    let p = ctx.pipeline;
    p.validate()?;
    let wake = wake_word_detect(transcript, &p.wake).ok_or(PipelineError::NoWakeWord)?;
    let words = normalize(transcript).split(' ').count();
    let speech_s = words as f64 / p.speech_rate_wps;
    let asr_chunks = (speech_s / p.wake.chunk_secs).ceil() as usize;
    let wake_end = (wake.word_span.1 as f64 - words as f64) / p.speech_rate_wps;
    let on_device = wake_end + p.detection_latency_s;

    let acquisition_s = simulate_dual_acquisition(ctx.link, ctx.frame)?.completion_ms / 1e3;
    let (left, right) = render_pair(ctx.rig, scene, ctx.frame)?;

    let detected = match config {
        // never earlier than an on-device detector would be
        LatencyConfig::A => on_device.max(0.0) + p.asr_delay_s,
        LatencyConfig::B | LatencyConfig::C => on_device,
    };
    let images_ready = detected + acquisition_s;
    let mut events = vec![
        TimelineEvent { event: EventKind::WakeDetected, t_s: detected },
        TimelineEvent { event: EventKind::CameraTriggered, t_s: detected },
        TimelineEvent { event: EventKind::ImagesReady, t_s: images_ready },
        TimelineEvent { event: EventKind::QueryComplete, t_s: 0.0 },
    ];
    let mut milestones = vec![];
    if config == LatencyConfig::A {
        milestones.push(("asr_wait", detected));
    }
    milestones.push(("capture", images_ready));

    let mut path = InputShape::Dual;
    let mut dual_reason = None;
    let mut stitched_image = None;
    if config == LatencyConfig::C {
        let stitch_done = images_ready + p.stitch_secs;
        events.push(TimelineEvent { event: EventKind::StitchDone, t_s: stitch_done });
        match try_stitch(&left, &right, ctx.stitch, ctx.stitch_seed) {
            // the stitched frame is used only if it is ready when the pair
            // alone could go to the model
            StitchResult::Stitched { panorama, .. } if stitch_done <= images_ready.max(0.0) => {
                path = InputShape::Stitched;
                stitched_image = Some(panorama.image);
            }
            StitchResult::Stitched { .. } => dual_reason = Some("STITCH_LATE".to_string()),
            StitchResult::Fallback { reason, .. } => dual_reason = Some(reason.as_str().to_string()),
        }
        if path == InputShape::Stitched {
            milestones.push(("stitch", stitch_done));
        }
    }

    let (mut critical_path, infer_start) = gate_segments(&milestones);
    let prompt = select_prompt(path, &p.prompts);
    let inference = match stitched_image {
        Some(img) => client.infer(&[img], prompt)?,
        None => client.infer(&[left, right], prompt)?,
    };
    let first_token = infer_start + inference.ttft_s;
    critical_path.push(Segment { name: "inference".into(), start_s: infer_start, end_s: first_token });
    events.push(TimelineEvent { event: EventKind::VlmFirstToken, t_s: first_token });
    events.push(TimelineEvent { event: EventKind::ReplyReady, t_s: first_token + p.synthesis_s });
    events.sort_by(|a, b| a.t_s.total_cmp(&b.t_s));

    Ok(QueryTimeline {
        config,
        wake,
        path,
        dual_reason,
        speech_s,
        asr_chunks,
        acquisition_s,
        ttft_s: inference.ttft_s,
        events,
        critical_path,
        total_latency_s: first_token,
        reply: inference.reply,
    })
}

use std::time::Duration;

use base64::engine::general_purpose::STANDARD;
use base64::Engine;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::PipelineError;
use crate::imaging::{encode_pgm, GrayImage};

/// Outcome of one model call.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Inference {
    /// Time from request to first generated token, in seconds.
    pub ttft_s: f64,
    pub reply: String,
}

pub trait InferenceClient {
    /// Runs the model on one stitched image or a left/right pair.
    fn infer(&mut self, images: &[GrayImage], prompt: &str) -> Result<Inference, PipelineError>;
}

fn check_image_count(images: &[GrayImage]) -> Result<(), PipelineError> {
    if images.is_empty() || images.len() > 2 {
        return Err(PipelineError::InvalidInput(format!("expected 1 or 2 images, got {}", images.len())));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MockConfig {
    pub ttft_dual_s: f64,
    pub ttft_stitched_s: f64,
    /// Standard deviation of Gaussian jitter added to each TTFT; 0 keeps the
    /// mock exact.
    pub jitter_sd_s: f64,
    pub reply: String,
}

impl Default for MockConfig {
    fn default() -> Self {
        MockConfig {
            ttft_dual_s: 2.15,
            ttft_stitched_s: 1.14,
            jitter_sd_s: 0.0,
            reply: "This appears to be a printed page of text.".into(),
        }
    }
}

impl MockConfig {
    pub fn validate(&self) -> Result<(), PipelineError> {
        let ok = self.ttft_stitched_s >= 0.0
            && self.ttft_dual_s >= self.ttft_stitched_s
            && self.ttft_dual_s.is_finite()
            && self.jitter_sd_s >= 0.0
            && self.jitter_sd_s.is_finite();
        if !ok {
            return Err(PipelineError::InvalidConfig(
                "mock TTFTs must satisfy 0 <= stitched <= dual and jitter >= 0".into(),
            ));
        }
        Ok(())
    }
}

/// Canned replies with TTFT chosen by input shape.
#[derive(Debug, Clone)]
pub struct MockClient {
    cfg: MockConfig,
    rng: ChaCha8Rng,
    calls: usize,
}

impl MockClient {
    /// `seed` drives the jitter only.
    pub fn new(cfg: MockConfig, seed: u64) -> Result<Self, PipelineError> {
        cfg.validate()?;
        let rng = ChaCha8Rng::seed_from_u64(seed);
        Ok(MockClient { cfg, rng, calls: 0 })
    }

    pub fn calls(&self) -> usize {
        self.calls
    }
}

impl InferenceClient for MockClient {
    fn infer(&mut self, images: &[GrayImage], _prompt: &str) -> Result<Inference, PipelineError> {
        check_image_count(images)?;
        self.calls += 1;
        let base = if images.len() == 1 { self.cfg.ttft_stitched_s } else { self.cfg.ttft_dual_s };
        let jitter = if self.cfg.jitter_sd_s > 0.0 {
            let normal = Normal::new(0.0, self.cfg.jitter_sd_s)
                .map_err(|e| PipelineError::InvalidConfig(e.to_string()))?;
            normal.sample(&mut self.rng)
        } else {
            0.0
        };
        Ok(Inference { ttft_s: (base + jitter).max(0.0), reply: self.cfg.reply.clone() })
    }
}

#[derive(Debug, Serialize)]
struct RemoteRequest<'a> {
    prompt: &'a str,
    images: Vec<String>,
}

#[derive(Debug, Deserialize)]
struct RemoteResponse {
    reply: String,
    ttft_ms: f64,
}

/// JSON-over-HTTP model endpoint. Requests are abandoned after `timeout`.
#[derive(Debug)]
pub struct RemoteClient {
    endpoint: String,
    agent: ureq::Agent,
}

impl RemoteClient {
    pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(30);

    pub fn new(endpoint: impl Into<String>, timeout: Duration) -> Self {
        let agent = ureq::Agent::config_builder().timeout_global(Some(timeout)).build().new_agent();
        RemoteClient { endpoint: endpoint.into(), agent }
    }
}

impl InferenceClient for RemoteClient {
    fn infer(&mut self, images: &[GrayImage], prompt: &str) -> Result<Inference, PipelineError> {
        check_image_count(images)?;
        let body = RemoteRequest {
            prompt,
            images: images.iter().map(|img| STANDARD.encode(encode_pgm(img))).collect(),
        };
        let resp: RemoteResponse = self
            .agent
            .post(&self.endpoint)
            .send_json(&body)
            .and_then(|mut r| r.body_mut().read_json())
            .map_err(|e| PipelineError::Remote(e.to_string()))?;
        if !(resp.ttft_ms >= 0.0 && resp.ttft_ms.is_finite()) {
            return Err(PipelineError::Remote(format!("invalid ttft_ms {}", resp.ttft_ms)));
        }
        Ok(Inference { ttft_s: resp.ttft_ms / 1e3, reply: resp.reply })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::imaging::FrameSpec;

    fn img() -> GrayImage {
        GrayImage::filled(FrameSpec::QQVGA, 9)
    }

    #[test]
    fn mock_is_exact_by_default() {
        let mut c = MockClient::new(MockConfig::default(), 0).unwrap();
        assert_eq!(c.infer(&[img(), img()], "p").unwrap().ttft_s, 2.15);
        assert_eq!(c.infer(&[img()], "p").unwrap().ttft_s, 1.14);
        assert_eq!(c.calls(), 2);
        assert!(c.infer(&[], "p").is_err());
        assert!(c.infer(&[img(), img(), img()], "p").is_err());
    }

    #[test]
    fn mock_jitter_is_seeded() {
        let cfg = MockConfig { jitter_sd_s: 0.1, ..MockConfig::default() };
        let run = |cfg: &MockConfig| {
            let mut c = MockClient::new(cfg.clone(), 4).unwrap();
            (0..20).map(|_| c.infer(&[img(), img()], "p").unwrap().ttft_s).collect::<Vec<_>>()
        };
        let a = run(&cfg);
        assert_eq!(a, run(&cfg));
        assert!(a.iter().any(|&t| t != 2.15));
        let mean = a.iter().sum::<f64>() / a.len() as f64;
        assert!((mean - 2.15).abs() < 0.1);
    }

    #[test]
    fn mock_rejects_inverted_ttfts() {
        let cfg = MockConfig { ttft_dual_s: 1.0, ttft_stitched_s: 2.0, ..MockConfig::default() };
        assert!(MockClient::new(cfg, 0).is_err());
    }
}

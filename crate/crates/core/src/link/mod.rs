//! Wire formats between earbuds, bridge and host, plus link timing.

mod reassembly;
mod sim;
mod wire;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use reassembly::{reassemble, FrameReassembler, ReassemblyDiagnostic, ReassemblyEvent, MAX_FRAME_PAYLOAD};
pub use sim::{
    simulate_dual_acquisition, simulate_stream, trace_to_csv, DualAcquisitionReport, TimingReport,
    TraceEvent, TraceKind, TRACE_CSV_HEADER,
};
pub use wire::{
    bridge_encode, device_encode_frame, frame_bytes, host_parse, BridgeRecord, Demux,
    DeviceFrameHeader, HostParser, MacAddress, ParseEvent, SyncLoss, FRAME_HEADER_LEN, FRAME_MAGIC,
    MAX_RECORD_PAYLOAD, PREAMBLE, RECORD_HEADER_LEN,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinkError {
    #[error("invalid link config: {0}")]
    InvalidConfig(String),
    #[error("record payload length {0} outside 1..=247")]
    InvalidRecordLength(usize),
    #[error("frame {width}x{height} does not fit the 16-bit header fields")]
    FrameTooLarge { width: usize, height: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LinkConfig {
    pub connection_interval_ms: f64,
    pub packets_per_interval: usize,
    pub packet_payload: usize,
    /// Measured application throughput, bits per second.
    pub goodput_bps: f64,
    pub spi_clock_hz: f64,
    pub dma_max_transfer: usize,
    /// Idle time between consecutive DMA transactions of one frame.
    pub dma_gap_ms: f64,
    /// Host write command plus IDLE→ACTIVE wake-up before capture begins.
    pub trigger_overhead_ms: f64,
    pub active_timeout_s: f64,
    /// Goodput penalty when two links share one radio: each link runs at
    /// `goodput / (1 + contention_factor)`.
    pub contention_factor: f64,
}

impl Default for LinkConfig {
    fn default() -> Self {
        LinkConfig {
            connection_interval_ms: 7.5,
            packets_per_interval: 5,
            packet_payload: 247,
            goodput_bps: 992_000.0,
            spi_clock_hz: 8_000_000.0,
            dma_max_transfer: 65_536,
            dma_gap_ms: 0.0,
            trigger_overhead_ms: 98.0,
            active_timeout_s: 3.0,
            contention_factor: 0.0,
        }
    }
}

impl LinkConfig {
    pub fn validate(&self) -> Result<(), LinkError> {
        let positive = [
            self.connection_interval_ms,
            self.goodput_bps,
            self.spi_clock_hz,
            self.active_timeout_s,
        ];
        if positive.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
            return Err(LinkError::InvalidConfig("timing parameters must be positive".into()));
        }
        if self.packets_per_interval == 0 || self.dma_max_transfer == 0 {
            return Err(LinkError::InvalidConfig("counts must be positive".into()));
        }
        if self.packet_payload == 0 || self.packet_payload > MAX_RECORD_PAYLOAD {
            return Err(LinkError::InvalidConfig("packet payload must be in 1..=247".into()));
        }
        if self.dma_max_transfer < self.packet_payload {
            return Err(LinkError::InvalidConfig("dma transfer must hold a packet".into()));
        }
        if !(self.dma_gap_ms >= 0.0 && self.trigger_overhead_ms >= 0.0 && self.contention_factor >= 0.0) {
            return Err(LinkError::InvalidConfig("delays must be non-negative".into()));
        }
        Ok(())
    }
}

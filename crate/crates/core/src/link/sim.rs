//! Discrete-event model of frame acquisition over SPI and transmission over
//! the BLE link.
//!
//! Per frame and device: the sensor is read out in `ceil(bytes / dma_max)`
//! sequential DMA transactions at `spi_clock` bits per second, then the
//! encoded frame drains as notification packets at `goodput`. At most
//! `packets_per_interval` packets may start inside one connection interval.
//! Acquisition and transmission of a frame never overlap, and the next frame
//! starts only after the previous one is delivered.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::wire::FRAME_HEADER_LEN;
use super::{LinkConfig, LinkError};
use crate::imaging::FrameSpec;

pub const TRACE_CSV_HEADER: &str = "t_ms,device,event,bytes";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TraceKind {
    Trigger,
    AcquireStart,
    DmaStart,
    DmaEnd,
    AcquireEnd,
    Packet,
    FrameDelivered,
}

impl TraceKind {
    pub fn as_str(self) -> &'static str {
        match self {
            TraceKind::Trigger => "trigger",
            TraceKind::AcquireStart => "acquire_start",
            TraceKind::DmaStart => "dma_start",
            TraceKind::DmaEnd => "dma_end",
            TraceKind::AcquireEnd => "acquire_end",
            TraceKind::Packet => "packet",
            TraceKind::FrameDelivered => "frame_delivered",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceEvent {
    pub t_ms: f64,
    pub device: u8,
    pub event: TraceKind,
    pub bytes: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimingReport {
    pub width: usize,
    pub height: usize,
    pub devices: u8,
    pub frames: usize,
    /// Bytes on the link per frame, header included.
    pub frame_bytes: usize,
    pub dma_transactions: usize,
    pub packets_per_frame: usize,
    pub t_acquire_ms: f64,
    pub t_transmit_ms: f64,
    pub frame_latency_ms: f64,
    pub effective_fps: f64,
    pub theoretical_fps: f64,
    pub total_ms: f64,
    #[serde(skip)]
    pub trace: Vec<TraceEvent>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualAcquisitionReport {
    pub trigger_overhead_ms: f64,
    pub contention_factor: f64,
    pub per_device_ms: Vec<f64>,
    pub completion_ms: f64,
    #[serde(skip)]
    pub trace: Vec<TraceEvent>,
}

pub fn trace_to_csv(trace: &[TraceEvent]) -> String {
    let mut out = String::from(TRACE_CSV_HEADER);
    out.push('\n');
    for e in trace {
        let _ = writeln!(out, "{:.6},{},{},{}", e.t_ms, e.device, e.event.as_str(), e.bytes);
    }
    out
}

#[derive(Debug, Clone, Copy)]
enum Step {
    StartFrame,
    DmaStart(usize),
    DmaEnd(usize),
    Packet(usize),
}

#[derive(Debug)]
struct Scheduled {
    t: f64,
    seq: u64,
    device: u8,
    step: Step,
}

impl PartialEq for Scheduled {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Scheduled {}
impl PartialOrd for Scheduled {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Scheduled {
    // reversed: BinaryHeap pops the earliest event first
    fn cmp(&self, other: &Self) -> Ordering {
        other.t.total_cmp(&self.t).then_with(|| other.seq.cmp(&self.seq))
    }
}

#[derive(Debug, Default, Clone)]
struct DeviceState {
    frame: usize,
    frame_start: f64,
    acquire_end: f64,
    last_packet_end: f64,
    interval: Option<(u64, usize)>,
    acquire_total: f64,
    transmit_total: f64,
    delivered_at: f64,
}

struct Engine<'a> {
    cfg: &'a LinkConfig,
    frames: usize,
    dma_chunks: Vec<usize>,
    packets: Vec<usize>,
    goodput: f64,
    heap: BinaryHeap<Scheduled>,
    seq: u64,
    trace: Vec<TraceEvent>,
    devices: Vec<DeviceState>,
}

impl<'a> Engine<'a> {
    fn new(cfg: &'a LinkConfig, spec: FrameSpec, frames: usize, devices: u8, goodput: f64) -> Self {
        let pixels = spec.payload_bytes();
        let dma = cfg.dma_max_transfer;
        let dma_chunks = (0..pixels.div_ceil(dma)).map(|i| dma.min(pixels - i * dma)).collect();
        let wire = pixels + FRAME_HEADER_LEN;
        let payload = cfg.packet_payload;
        let packets = (0..wire.div_ceil(payload)).map(|i| payload.min(wire - i * payload)).collect();
        Engine {
            cfg,
            frames,
            dma_chunks,
            packets,
            goodput,
            heap: BinaryHeap::new(),
            seq: 0,
            trace: Vec::new(),
            devices: vec![DeviceState::default(); devices as usize],
        }
    }

    fn schedule(&mut self, t: f64, device: u8, step: Step) {
        self.seq += 1;
        self.heap.push(Scheduled { t, seq: self.seq, device, step });
    }

    fn record(&mut self, t: f64, device: u8, event: TraceKind, bytes: usize) {
        self.trace.push(TraceEvent { t_ms: t * 1e3, device, event, bytes });
    }

    /// Earliest start at or after `t` that respects the per-interval cap.
    fn packet_slot(&mut self, device: u8, t: f64) -> f64 {
        let interval = self.cfg.connection_interval_ms / 1e3;
        let cap = self.cfg.packets_per_interval;
        let state = &mut self.devices[device as usize];
        let mut start = t;
        let mut idx = (start / interval + 1e-9).floor() as u64;
        if let Some((cur, count)) = state.interval {
            if cur == idx && count >= cap {
                idx += 1;
                start = idx as f64 * interval;
            }
        }
        state.interval = match state.interval {
            Some((cur, count)) if cur == idx => Some((cur, count + 1)),
            _ => Some((idx, 1)),
        };
        start
    }

    fn run(&mut self, start: f64) {
        for d in 0..self.devices.len() as u8 {
            self.schedule(start, d, Step::StartFrame);
        }
        while let Some(Scheduled { t, device, step, .. }) = self.heap.pop() {
            let di = device as usize;
            match step {
                Step::StartFrame => {
                    self.devices[di].frame_start = t;
                    let bytes = self.dma_chunks.iter().sum();
                    self.record(t, device, TraceKind::AcquireStart, bytes);
                    self.schedule(t, device, Step::DmaStart(0));
                }
                Step::DmaStart(i) => {
                    let bytes = self.dma_chunks[i];
                    self.record(t, device, TraceKind::DmaStart, bytes);
                    let dt = bytes as f64 * 8.0 / self.cfg.spi_clock_hz;
                    self.schedule(t + dt, device, Step::DmaEnd(i));
                }
                Step::DmaEnd(i) => {
                    self.record(t, device, TraceKind::DmaEnd, self.dma_chunks[i]);
                    if i + 1 < self.dma_chunks.len() {
                        let gap = self.cfg.dma_gap_ms / 1e3;
                        self.schedule(t + gap, device, Step::DmaStart(i + 1));
                    } else {
                        let total = self.dma_chunks.iter().sum();
                        self.record(t, device, TraceKind::AcquireEnd, total);
                        let st = &mut self.devices[di];
                        st.acquire_end = t;
                        st.last_packet_end = t;
                        st.acquire_total += t - st.frame_start;
                        let begin = self.packet_slot(device, t);
                        let end = begin + self.packets[0] as f64 * 8.0 / self.goodput;
                        self.schedule(end, device, Step::Packet(0));
                    }
                }
                Step::Packet(j) => {
                    self.record(t, device, TraceKind::Packet, self.packets[j]);
                    self.devices[di].last_packet_end = t;
                    if j + 1 < self.packets.len() {
                        let begin = self.packet_slot(device, t);
                        let end = begin + self.packets[j + 1] as f64 * 8.0 / self.goodput;
                        self.schedule(end, device, Step::Packet(j + 1));
                        continue;
                    }
                    let wire: usize = self.packets.iter().sum();
                    self.record(t, device, TraceKind::FrameDelivered, wire);
                    let st = &mut self.devices[di];
                    st.transmit_total += t - st.acquire_end;
                    st.delivered_at = t;
                    st.frame += 1;
                    if st.frame < self.frames {
                        self.schedule(t, device, Step::StartFrame);
                    }
                }
            }
        }
    }
}

pub fn simulate_stream(
    cfg: &LinkConfig,
    spec: FrameSpec,
    n_frames: usize,
    devices: u8,
) -> Result<TimingReport, LinkError> {
    cfg.validate()?;
    if !(devices == 1 || devices == 2) {
        return Err(LinkError::InvalidConfig("devices must be 1 or 2".into()));
    }
    if n_frames == 0 {
        return Err(LinkError::InvalidConfig("need at least one frame".into()));
    }
    let goodput = effective_goodput(cfg, devices);
    let mut engine = Engine::new(cfg, spec, n_frames, devices, goodput);
    engine.run(0.0);
    let first = &engine.devices[0];
    let frames = n_frames as f64;
    let t_acquire = first.acquire_total / frames;
    let t_transmit = first.transmit_total / frames;
    let total = engine.devices.iter().map(|d| d.delivered_at).fold(0.0, f64::max);
    let effective_fps = frames / first.delivered_at;
    let wire = spec.payload_bytes() + FRAME_HEADER_LEN;
    Ok(TimingReport {
        width: spec.width,
        height: spec.height,
        devices,
        frames: n_frames,
        frame_bytes: wire,
        dma_transactions: engine.dma_chunks.len(),
        packets_per_frame: engine.packets.len(),
        t_acquire_ms: t_acquire * 1e3,
        t_transmit_ms: t_transmit * 1e3,
        frame_latency_ms: 1e3 / effective_fps,
        effective_fps,
        theoretical_fps: goodput / (wire as f64 * 8.0),
        total_ms: total * 1e3,
        trace: engine.trace,
    })
}

/// Per-link goodput; when two links share the radio it is divided by
/// `1 + contention_factor`.
fn effective_goodput(cfg: &LinkConfig, devices: u8) -> f64 {
    if devices > 1 {
        cfg.goodput_bps / (1.0 + cfg.contention_factor)
    } else {
        cfg.goodput_bps
    }
}

/// Host triggers both earbuds, each captures one frame and streams it back;
/// returns the time until both frames are fully received.
pub fn simulate_dual_acquisition(
    cfg: &LinkConfig,
    spec: FrameSpec,
) -> Result<DualAcquisitionReport, LinkError> {
    cfg.validate()?;
    let goodput = effective_goodput(cfg, 2);
    let mut engine = Engine::new(cfg, spec, 1, 2, goodput);
    engine.trace.push(TraceEvent { t_ms: 0.0, device: 0, event: TraceKind::Trigger, bytes: 0 });
    engine.trace.push(TraceEvent { t_ms: 0.0, device: 1, event: TraceKind::Trigger, bytes: 0 });
    engine.run(cfg.trigger_overhead_ms / 1e3);
    let per_device_ms: Vec<f64> = engine.devices.iter().map(|d| d.delivered_at * 1e3).collect();
    let completion_ms = per_device_ms.iter().copied().fold(0.0, f64::max);
    Ok(DualAcquisitionReport {
        trigger_overhead_ms: cfg.trigger_overhead_ms,
        contention_factor: cfg.contention_factor,
        per_device_ms,
        completion_ms,
        trace: engine.trace,
    })
}

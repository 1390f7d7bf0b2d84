use serde::{Deserialize, Serialize};

use super::wire::{DeviceFrameHeader, FRAME_HEADER_LEN, FRAME_MAGIC};
use crate::imaging::{FrameSpec, GrayImage};

/// Frames larger than this are treated as a corrupted header.
pub const MAX_FRAME_PAYLOAD: usize = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ReassemblyEvent {
    Frame { frame_id: u16, image: GrayImage },
    Diagnostic(ReassemblyDiagnostic),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ReassemblyDiagnostic {
    /// Bytes skipped while searching for a frame magic.
    BadMagic { offset: u64, skipped: usize },
    /// A header announced an empty or oversized frame.
    SizeMismatch { offset: u64, width: u16, height: u16 },
}

/// Rebuilds frames from one device's byte stream. A partial trailing frame
/// stays pending until more bytes arrive.
#[derive(Debug, Default)]
pub struct FrameReassembler {
    buf: Vec<u8>,
    head: usize,
    base: u64,
    skipping: Option<(u64, usize)>,
}

impl FrameReassembler {
    pub fn new() -> Self {
        Self::default()
    }

    /// Bytes held for an incomplete frame.
    pub fn pending(&self) -> usize {
        self.buf.len() - self.head
    }

    pub fn push(&mut self, bytes: &[u8]) -> Vec<ReassemblyEvent> {
        self.buf.extend_from_slice(bytes);
        let mut events = Vec::new();
        loop {
            let data = &self.buf[self.head..];
            if data.is_empty() {
                break;
            }
            if !data.starts_with(&FRAME_MAGIC) {
                if data.len() < FRAME_MAGIC.len() && FRAME_MAGIC.starts_with(data) {
                    break;
                }
                let n = data.len();
                let skip = (1..n)
                    .find(|&i| {
                        let avail = (n - i).min(FRAME_MAGIC.len());
                        data[i..i + avail] == FRAME_MAGIC[..avail]
                    })
                    .unwrap_or(n);
                self.skip(skip);
                continue;
            }
            if data.len() < FRAME_HEADER_LEN {
                break;
            }
            let mut raw = [0u8; FRAME_HEADER_LEN];
            raw.copy_from_slice(&data[..FRAME_HEADER_LEN]);
            let header = DeviceFrameHeader::parse(&raw).expect("magic checked above");
            let size = header.payload_len();
            if size == 0 || size > MAX_FRAME_PAYLOAD {
                self.flush_skip(&mut events);
                events.push(ReassemblyEvent::Diagnostic(ReassemblyDiagnostic::SizeMismatch {
                    offset: self.base,
                    width: header.width,
                    height: header.height,
                }));
                self.advance(1);
                continue;
            }
            if data.len() < FRAME_HEADER_LEN + size {
                break;
            }
            let spec = FrameSpec { width: header.width as usize, height: header.height as usize };
            let pixels = data[FRAME_HEADER_LEN..FRAME_HEADER_LEN + size].to_vec();
            let image = GrayImage::new(spec, pixels).expect("size checked above");
            self.flush_skip(&mut events);
            self.advance(FRAME_HEADER_LEN + size);
            events.push(ReassemblyEvent::Frame { frame_id: header.frame_id, image });
        }
        self.flush_skip(&mut events);
        self.buf.drain(..self.head);
        self.head = 0;
        events
    }

    fn advance(&mut self, n: usize) {
        self.head += n;
        self.base += n as u64;
    }

    fn skip(&mut self, n: usize) {
        match &mut self.skipping {
            Some((_, count)) => *count += n,
            None => self.skipping = Some((self.base, n)),
        }
        self.advance(n);
    }

    fn flush_skip(&mut self, events: &mut Vec<ReassemblyEvent>) {
        if let Some((offset, skipped)) = self.skipping.take() {
            events.push(ReassemblyEvent::Diagnostic(ReassemblyDiagnostic::BadMagic { offset, skipped }));
        }
    }
}

/// Frames recovered from a complete byte stream, ignoring diagnostics.
pub fn reassemble(stream: &[u8]) -> Vec<(u16, GrayImage)> {
    FrameReassembler::new()
        .push(stream)
        .into_iter()
        .filter_map(|e| match e {
            ReassemblyEvent::Frame { frame_id, image } => Some((frame_id, image)),
            ReassemblyEvent::Diagnostic(_) => None,
        })
        .collect()
}

//! Device → bridge → host byte formats.
//!
//! Device stream: `A5 5A F0 0F | frame_id u16 | width u16 | height u16 |
//! pixels`, chunked into notification packets of at most `packet_payload`
//! bytes.
//!
//! Bridge record: `AA 55 AA 55 | mac[6] | len u16 | payload[len]`, with
//! `1 <= len <= 247`. All multi-byte fields are little-endian.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::LinkError;
use crate::imaging::GrayImage;

pub const FRAME_MAGIC: [u8; 4] = [0xA5, 0x5A, 0xF0, 0x0F];
pub const FRAME_HEADER_LEN: usize = 10;
pub const PREAMBLE: [u8; 4] = [0xAA, 0x55, 0xAA, 0x55];
pub const RECORD_HEADER_LEN: usize = 12;
pub const MAX_RECORD_PAYLOAD: usize = 247;

pub type MacAddress = [u8; 6];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DeviceFrameHeader {
    pub frame_id: u16,
    pub width: u16,
    pub height: u16,
}

impl DeviceFrameHeader {
    pub fn to_bytes(self) -> [u8; FRAME_HEADER_LEN] {
        let mut out = [0u8; FRAME_HEADER_LEN];
        out[..4].copy_from_slice(&FRAME_MAGIC);
        out[4..6].copy_from_slice(&self.frame_id.to_le_bytes());
        out[6..8].copy_from_slice(&self.width.to_le_bytes());
        out[8..10].copy_from_slice(&self.height.to_le_bytes());
        out
    }

    /// Parses a header; `None` if the magic does not match.
    pub fn parse(bytes: &[u8; FRAME_HEADER_LEN]) -> Option<Self> {
        if bytes[..4] != FRAME_MAGIC {
            return None;
        }
        Some(DeviceFrameHeader {
            frame_id: u16::from_le_bytes([bytes[4], bytes[5]]),
            width: u16::from_le_bytes([bytes[6], bytes[7]]),
            height: u16::from_le_bytes([bytes[8], bytes[9]]),
        })
    }

    pub fn payload_len(&self) -> usize {
        self.width as usize * self.height as usize
    }
}

/// Serializes one frame (header followed by raw pixels).
pub fn frame_bytes(img: &GrayImage, frame_id: u16) -> Result<Vec<u8>, LinkError> {
    let (w, h) = (img.width(), img.height());
    let (Ok(width), Ok(height)) = (u16::try_from(w), u16::try_from(h)) else {
        return Err(LinkError::FrameTooLarge { width: w, height: h });
    };
    let header = DeviceFrameHeader { frame_id, width, height };
    let mut out = Vec::with_capacity(FRAME_HEADER_LEN + img.pixels().len());
    out.extend_from_slice(&header.to_bytes());
    out.extend_from_slice(img.pixels());
    Ok(out)
}

/// Splits a frame into notification-sized packets. Packet boundaries do not
/// respect header fields; only the last packet may be short.
pub fn device_encode_frame(
    img: &GrayImage,
    frame_id: u16,
    packet_payload: usize,
) -> Result<Vec<Vec<u8>>, LinkError> {
    if packet_payload == 0 || packet_payload > MAX_RECORD_PAYLOAD {
        return Err(LinkError::InvalidConfig(format!(
            "packet payload must be in 1..={MAX_RECORD_PAYLOAD}"
        )));
    }
    Ok(frame_bytes(img, frame_id)?
        .chunks(packet_payload)
        .map(<[u8]>::to_vec)
        .collect())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BridgeRecord {
    pub mac: MacAddress,
    pub payload: Vec<u8>,
}

impl BridgeRecord {
    pub fn encoded_len(&self) -> usize {
        RECORD_HEADER_LEN + self.payload.len()
    }
}

pub fn bridge_encode(mac: MacAddress, packet: &[u8]) -> Result<Vec<u8>, LinkError> {
    if packet.is_empty() || packet.len() > MAX_RECORD_PAYLOAD {
        return Err(LinkError::InvalidRecordLength(packet.len()));
    }
    let mut out = Vec::with_capacity(RECORD_HEADER_LEN + packet.len());
    out.extend_from_slice(&PREAMBLE);
    out.extend_from_slice(&mac);
    out.extend_from_slice(&(packet.len() as u16).to_le_bytes());
    out.extend_from_slice(packet);
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SyncLoss {
    /// Stream offset of the first discarded byte.
    pub offset: u64,
    pub skipped: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseEvent {
    Record(BridgeRecord),
    SyncLoss(SyncLoss),
}

/// Incremental host-side parser for the bridge byte stream.
///
/// Length-prefixed framing takes precedence over preamble scanning. A
/// candidate record that is followed by garbage and contains a preamble
/// inside its span is treated as truncated, so it cannot swallow the records
/// behind it. Bytes that do not belong to an accepted record are dropped and
/// reported as [`SyncLoss`].
#[derive(Debug, Default)]
pub struct HostParser {
    buf: Vec<u8>,
    /// Index of the first unconsumed byte in `buf`.
    head: usize,
    /// Stream offset of `buf[head]`.
    base: u64,
    pending_loss: Option<SyncLoss>,
}

impl HostParser {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, bytes: &[u8]) -> Vec<ParseEvent> {
        self.buf.extend_from_slice(bytes);
        let mut events = Vec::new();
        self.drain(false, &mut events);
        self.compact();
        events
    }

    /// Flushes at end of stream. Trailing bytes that cannot form a record
    /// are reported as a sync loss.
    pub fn finish(&mut self) -> Vec<ParseEvent> {
        let mut events = Vec::new();
        self.drain(true, &mut events);
        let rest = self.data().len();
        if rest > 0 {
            self.discard(rest);
        }
        self.flush_loss(&mut events);
        self.compact();
        events
    }

    pub fn buffered(&self) -> usize {
        self.data().len()
    }

    fn data(&self) -> &[u8] {
        &self.buf[self.head..]
    }

    fn compact(&mut self) {
        self.buf.drain(..self.head);
        self.head = 0;
    }

    fn consume(&mut self, n: usize) {
        self.head += n;
        self.base += n as u64;
    }

    fn discard(&mut self, n: usize) {
        match &mut self.pending_loss {
            Some(loss) if loss.offset + loss.skipped as u64 == self.base => loss.skipped += n,
            _ => self.pending_loss = Some(SyncLoss { offset: self.base, skipped: n }),
        }
        self.consume(n);
    }

    fn flush_loss(&mut self, events: &mut Vec<ParseEvent>) {
        if let Some(loss) = self.pending_loss.take() {
            events.push(ParseEvent::SyncLoss(loss));
        }
    }

    /// Offset of the next full preamble at or after `from`, or of a preamble
    /// prefix that runs into the end of the buffer.
    fn next_sync(&self, from: usize) -> usize {
        let data = self.data();
        let n = data.len();
        (from..n)
            .find(|&i| {
                let avail = (n - i).min(PREAMBLE.len());
                data[i..i + avail] == PREAMBLE[..avail]
            })
            .unwrap_or(n)
    }

    fn drain(&mut self, finishing: bool, events: &mut Vec<ParseEvent>) {
        loop {
            let data = self.data();
            if data.is_empty() {
                return;
            }
            if !data.starts_with(&PREAMBLE) {
                if data.len() < PREAMBLE.len() && PREAMBLE.starts_with(data) {
                    if !finishing {
                        return;
                    }
                    let n = data.len();
                    self.discard(n);
                    continue;
                }
                let skip = self.next_sync(1);
                self.discard(skip);
                continue;
            }
            if data.len() < RECORD_HEADER_LEN {
                if finishing {
                    let n = data.len();
                    self.discard(n);
                }
                return;
            }
            let len = u16::from_le_bytes([data[10], data[11]]) as usize;
            if len == 0 || len > MAX_RECORD_PAYLOAD {
                self.discard(1);
                continue;
            }
            let end = RECORD_HEADER_LEN + len;
            if data.len() < end {
                if finishing {
                    self.discard(1);
                    continue;
                }
                return;
            }
            // A record not followed by a preamble is suspect: if another
            // preamble starts inside its span it was probably truncated, and
            // the inner preamble wins.
            let tail = &data[end..];
            let avail = tail.len().min(PREAMBLE.len());
            if tail[..avail] != PREAMBLE[..avail] {
                if data[PREAMBLE.len()..end].windows(PREAMBLE.len()).any(|w| w == PREAMBLE) {
                    self.discard(1);
                    continue;
                }
            } else if avail < PREAMBLE.len() && !finishing {
                return;
            }
            let mut mac = [0u8; 6];
            mac.copy_from_slice(&data[4..10]);
            let payload = data[RECORD_HEADER_LEN..end].to_vec();
            self.flush_loss(events);
            self.consume(end);
            events.push(ParseEvent::Record(BridgeRecord { mac, payload }));
        }
    }
}

/// Splits parsed records into per-device byte streams keyed by MAC.
#[derive(Debug, Default, Clone)]
pub struct Demux {
    streams: BTreeMap<MacAddress, Vec<u8>>,
}

impl Demux {
    pub fn push(&mut self, record: &BridgeRecord) {
        self.streams.entry(record.mac).or_default().extend_from_slice(&record.payload);
    }

    pub fn stream(&self, mac: &MacAddress) -> &[u8] {
        self.streams.get(mac).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn into_streams(self) -> BTreeMap<MacAddress, Vec<u8>> {
        self.streams
    }
}

/// Parses a complete byte stream in one call.
pub fn host_parse(bytes: &[u8]) -> (Vec<BridgeRecord>, Vec<SyncLoss>) {
    let mut parser = HostParser::new();
    let mut events = parser.push(bytes);
    events.extend(parser.finish());
    let mut records = Vec::new();
    let mut losses = Vec::new();
    for e in events {
        match e {
            ParseEvent::Record(r) => records.push(r),
            ParseEvent::SyncLoss(l) => losses.push(l),
        }
    }
    (records, losses)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::imaging::FrameSpec;
    use rand::{Rng, SeedableRng};

    const MAC_A: MacAddress = [1, 2, 3, 4, 5, 6];
    const MAC_B: MacAddress = [0xAA, 0xBB, 0xCC, 0xDD, 0xEE, 0xFF];

    #[test]
    fn qqvga_packetization() {
        let img = GrayImage::filled(FrameSpec::QQVGA, 9);
        let packets = device_encode_frame(&img, 3, 247).unwrap();
        let total: usize = packets.iter().map(Vec::len).sum();
        assert_eq!(total, 19_278 + 10);
        assert_eq!(packets.len(), total.div_ceil(247));
        assert_eq!(packets.len(), 79);
        assert_eq!(packets.last().unwrap().len(), total - 78 * 247);
        assert_eq!(packets.last().unwrap().len(), 22);
        let joined: Vec<u8> = packets.concat();
        assert_eq!(joined, frame_bytes(&img, 3).unwrap());
        assert_eq!(&joined[..10], &[0xA5, 0x5A, 0xF0, 0x0F, 3, 0, 162, 0, 119, 0]);
    }

    #[test]
    fn record_layout() {
        let bytes = bridge_encode(MAC_A, &[9, 8, 7]).unwrap();
        assert_eq!(bytes, vec![0xAA, 0x55, 0xAA, 0x55, 1, 2, 3, 4, 5, 6, 3, 0, 9, 8, 7]);
        assert_eq!(bytes.len(), 12 + 3);
        assert!(bridge_encode(MAC_A, &[]).is_err());
        assert!(bridge_encode(MAC_A, &[0; 248]).is_err());
    }

    #[test]
    fn payload_containing_preamble_is_not_split() {
        let payload = [0xAA, 0x55, 0xAA, 0x55, 0xAA, 0x55, 0xAA, 0x55, 1];
        let mut stream = bridge_encode(MAC_A, &payload).unwrap();
        stream.extend(bridge_encode(MAC_B, &[2]).unwrap());
        let (records, losses) = host_parse(&stream);
        assert!(losses.is_empty());
        assert_eq!(records.len(), 2);
        assert_eq!(records[0].payload, payload);
    }

    #[test]
    fn garbage_prefix_is_one_sync_loss() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let mut stream = Vec::new();
        let mut originals = Vec::new();
        for i in 0..20u8 {
            let payload: Vec<u8> = (0..rng.gen_range(1..=247)).map(|_| rng.gen()).collect();
            stream.extend(bridge_encode(MAC_A, &payload).unwrap());
            originals.push(payload);
            let _ = i;
        }
        // garbage must not form a preamble, even straddling the first record
        let garbage: Vec<u8> = loop {
            let g: Vec<u8> = (0..100).map(|_| rng.gen()).collect();
            let mut probe = g.clone();
            probe.extend_from_slice(&PREAMBLE);
            if probe.windows(4).filter(|w| *w == PREAMBLE).count() == 1 {
                break g;
            }
        };
        let mut corrupted = garbage;
        corrupted.extend(stream);
        let (records, losses) = host_parse(&corrupted);
        assert_eq!(records.iter().map(|r| r.payload.clone()).collect::<Vec<_>>(), originals);
        assert_eq!(losses, vec![SyncLoss { offset: 0, skipped: 100 }]);
    }

    #[test]
    fn byte_at_a_time_matches_bulk() {
        let mut stream = Vec::new();
        for n in [5usize, 247, 1, 60] {
            stream.extend(bridge_encode(MAC_B, &vec![n as u8; n]).unwrap());
        }
        stream.extend([1, 2, 3]);
        let (bulk, _) = host_parse(&stream);
        let mut parser = HostParser::new();
        let mut events = Vec::new();
        for b in &stream {
            events.extend(parser.push(std::slice::from_ref(b)));
        }
        events.extend(parser.finish());
        let records: Vec<BridgeRecord> = events
            .into_iter()
            .filter_map(|e| match e {
                ParseEvent::Record(r) => Some(r),
                ParseEvent::SyncLoss(_) => None,
            })
            .collect();
        assert_eq!(records, bulk);
        assert_eq!(records.len(), 4);
        assert_eq!(parser.buffered(), 0);
    }

    #[test]
    fn truncated_record_does_not_swallow_successor() {
        let first = bridge_encode(MAC_A, &[7; 200]).unwrap();
        let second = bridge_encode(MAC_B, &[8; 30]).unwrap();
        let mut stream = first[..80].to_vec();
        stream.extend(&second);
        let (records, losses) = host_parse(&stream);
        assert_eq!(records, vec![BridgeRecord { mac: MAC_B, payload: vec![8; 30] }]);
        assert_eq!(losses, vec![SyncLoss { offset: 0, skipped: 80 }]);
    }

    #[test]
    fn demux_by_mac() {
        let mut demux = Demux::default();
        for (mac, p) in [(MAC_A, vec![1, 2]), (MAC_B, vec![9]), (MAC_A, vec![3])] {
            demux.push(&BridgeRecord { mac, payload: p });
        }
        assert_eq!(demux.stream(&MAC_A), &[1, 2, 3]);
        assert_eq!(demux.stream(&MAC_B), &[9]);
        assert_eq!(demux.stream(&[0; 6]), &[] as &[u8]);
    }
}

use super::trace::FrameRecord;

/// Constant per-packet header overhead: 8 bytes UDP + 20 bytes IP.
pub const HEADER_BYTES: u64 = 28;

/// A UDP/IP packet carrying part of one video frame.
#[derive(Debug, Clone, PartialEq)]
pub struct Packet {
    pub session_id: u64,
    pub frame_index: usize,
    pub seq_in_frame: u32,
    /// Payload bytes carried, at most the payload limit.
    pub payload: u64,
    pub send_time: f64,
}

impl Packet {
    pub fn wire_bytes(&self) -> u64 {
        self.payload + HEADER_BYTES
    }

    pub fn wire_bits(&self) -> u64 {
        self.wire_bytes() * 8
    }
}

/// Splits a frame into `ceil(size / payload_limit)` packets. All but the
/// last carry the full payload limit; the last carries the remainder.
pub fn packetize(
    session_id: u64,
    frame: &FrameRecord,
    payload_limit: u64,
    send_time: f64,
) -> Vec<Packet> {
    assert!(payload_limit > 0, "payload_limit must be > 0");
    let count = frame.size.div_ceil(payload_limit);
    (0..count)
        .map(|seq| {
            let payload = if seq + 1 == count {
                frame.size - payload_limit * (count - 1)
            } else {
                payload_limit
            };
            Packet {
                session_id,
                frame_index: frame.index,
                seq_in_frame: seq as u32,
                payload,
                send_time,
            }
        })
        .collect()
}

/// Number of packets a frame of `size` bytes splits into.
pub fn packet_count(size: u64, payload_limit: u64) -> u64 {
    size.div_ceil(payload_limit)
}

/// Wire bits of a whole frame: payload plus per-packet headers.
pub fn frame_wire_bits(size: u64, payload_limit: u64) -> u64 {
    (size + packet_count(size, payload_limit) * HEADER_BYTES) * 8
}

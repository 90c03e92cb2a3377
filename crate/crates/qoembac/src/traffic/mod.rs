//! VBR video sources: frame traces, packetization and per-session rates.
//!
//! A [`VideoTrace`] is an ordered list of frames (type, size, reference
//! PSNR). Traces are either loaded from text files or synthesized. Frames
//! are emitted as atomic packet bursts at their frame instant; all rates
//! reported by this module are wire rates (payload plus UDP/IP headers).

mod packet;
mod session;
mod synth;
mod trace;

pub use packet::{frame_wire_bits, packetize, Packet, HEADER_BYTES};
pub use session::{peak_wire_rate, Session, SessionState};
pub use synth::{synth_trace, SynthParams};
pub use trace::{load_trace, load_trace_with, FormatTag, FrameRecord, FrameType, VideoTrace};

use thiserror::Error;

/// Default payload limit per packet, in bytes.
pub const DEFAULT_PAYLOAD_LIMIT: u64 = 1024;
/// Default reference PSNR when a trace file has no PSNR column ("excellent").
pub const DEFAULT_REF_PSNR: f64 = 38.0;

#[derive(Debug, Error)]
pub enum TrafficError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("trace structure: {0}")]
    Structure(String),
    #[error("empty trace")]
    EmptyTrace,
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
    #[error("invalid session state transition: {from:?} -> {to:?}")]
    BadTransition { from: SessionState, to: SessionState },
}

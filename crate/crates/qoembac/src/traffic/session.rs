use std::sync::Arc;

use super::packet::frame_wire_bits;
use super::trace::VideoTrace;
use super::TrafficError;

/// Lifecycle of an admission request.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SessionState {
    Requested,
    Active,
    Rejected,
    Finished,
}

/// A requested or admitted video flow bound to a trace.
#[derive(Debug, Clone)]
pub struct Session {
    pub id: u64,
    pub trace: Arc<VideoTrace>,
    pub start_time: f64,
    /// Declared peak rate x_new in bits/s (wire rate).
    pub peak_rate: f64,
    state: SessionState,
}

impl Session {
    /// Creates a requested session. When `peak_rate` is `None` it is
    /// auto-derived as the maximum 1-second wire bitrate of the trace.
    pub fn new(
        id: u64,
        trace: Arc<VideoTrace>,
        start_time: f64,
        peak_rate: Option<f64>,
        payload_limit: u64,
    ) -> Result<Self, TrafficError> {
        if start_time < 0.0 {
            return Err(TrafficError::InvalidParam("start_time must be >= 0".into()));
        }
        let auto = peak_wire_rate(&trace, payload_limit, 1.0);
        let peak_rate = peak_rate.unwrap_or(auto);
        if peak_rate <= 0.0 {
            return Err(TrafficError::InvalidParam("peak_rate must be > 0".into()));
        }
        Ok(Self { id, trace, start_time, peak_rate, state: SessionState::Requested })
    }

    pub fn state(&self) -> SessionState {
        self.state
    }

    pub fn set_state(&mut self, to: SessionState) -> Result<(), TrafficError> {
        use SessionState::*;
        let ok = matches!(
            (self.state, to),
            (Requested, Active) | (Requested, Rejected) | (Active, Finished)
        );
        if !ok {
            return Err(TrafficError::BadTransition { from: self.state, to });
        }
        self.state = to;
        Ok(())
    }

    /// Time at which the session has emitted its whole trace.
    pub fn end_time(&self) -> f64 {
        self.start_time + self.trace.duration()
    }

    /// Wire bits sent by this session in the half-open window
    /// `(t - window, t]`, divided by the window length. Frames are atomic
    /// bursts at `start_time + index / fps`, so consecutive windows tile
    /// the trace exactly.
    pub fn instantaneous_rate(&self, t: f64, window: f64, payload_limit: u64) -> f64 {
        assert!(window > 0.0, "window must be > 0");
        let mut bits = 0u64;
        for f in self.trace.frames() {
            let ft = self.start_time + self.trace.frame_time(f.index);
            if ft > t {
                break;
            }
            if ft > t - window {
                bits += frame_wire_bits(f.size, payload_limit);
            }
        }
        bits as f64 / window
    }
}

/// Maximum wire bitrate of the trace over any sliding window of
/// `window` seconds (windows ending at frame instants attain the max,
/// since frames are atomic bursts).
pub fn peak_wire_rate(trace: &VideoTrace, payload_limit: u64, window: f64) -> f64 {
    let frames = trace.frames();
    let bits: Vec<u64> = frames
        .iter()
        .map(|f| frame_wire_bits(f.size, payload_limit))
        .collect();
    let mut best = 0u64;
    let mut sum = 0u64;
    let mut lo = 0usize;
    for hi in 0..frames.len() {
        sum += bits[hi];
        let t_hi = trace.frame_time(hi);
        while trace.frame_time(lo) <= t_hi - window {
            sum -= bits[lo];
            lo += 1;
        }
        best = best.max(sum);
    }
    best as f64 / window
}

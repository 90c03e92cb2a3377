//! Deterministic discrete-event simulation of a dumbbell bottleneck link
//! with a droptail FIFO queue, carrying packetized video sessions under a
//! chosen admission policy.
//!
//! Packet service is continuous-time; admission and rate measurement run
//! on 1-second ticks. One simulation instance is single-threaded and
//! bit-reproducible for a fixed config; independent instances may run
//! concurrently over shared immutable traces.

mod engine;
mod report;

pub use engine::{every_second_arrivals, run_simulation};
pub use report::{
    delay_cdf, drop_ratio, PacketOutcome, PacketRecord, SessionReport, SimReport, TickRecord,
};

use thiserror::Error;

use crate::admission::{BetaSource, Policy};

#[derive(Debug, Error)]
pub enum SimError {
    #[error("unknown trace id {0:?}")]
    UnknownTrace(String),
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("no data: {0}")]
    NoData(&'static str),
    #[error(transparent)]
    Traffic(#[from] crate::traffic::TrafficError),
}

/// One admission request in the arrival schedule.
#[derive(Debug, Clone)]
pub struct ArrivalSpec {
    pub time: f64,
    pub trace_id: String,
    /// Declared peak rate; auto-derived from the trace when absent.
    pub peak_rate: Option<f64>,
}

/// Full configuration of one simulation run.
#[derive(Debug, Clone)]
pub struct SimConfig {
    /// Bottleneck capacity in bits/s.
    pub c_l: f64,
    /// One-way propagation delay in seconds.
    pub prop_delay: f64,
    /// Droptail queue capacity in packets.
    pub queue_capacity: usize,
    pub payload_limit: u64,
    /// Measurement and admission tick in seconds.
    pub tick: f64,
    pub duration: f64,
    pub arrivals: Vec<ArrivalSpec>,
    pub policy: Policy,
    pub beta: BetaSource<f64>,
    pub seed: u64,
    /// Keep per-packet records in the report.
    pub record_packets: bool,
}

impl SimConfig {
    pub fn validate(&self) -> Result<(), SimError> {
        if self.c_l <= 0.0 {
            return Err(SimError::InvalidConfig("c_l must be > 0".into()));
        }
        if self.queue_capacity < 1 {
            return Err(SimError::InvalidConfig("queue_capacity must be >= 1".into()));
        }
        if self.duration <= 0.0 || self.tick <= 0.0 {
            return Err(SimError::InvalidConfig("duration and tick must be > 0".into()));
        }
        if self.payload_limit == 0 {
            return Err(SimError::InvalidConfig("payload_limit must be > 0".into()));
        }
        if self.prop_delay < 0.0 {
            return Err(SimError::InvalidConfig("prop_delay must be >= 0".into()));
        }
        let sorted = self
            .arrivals
            .windows(2)
            .all(|w| w[0].time <= w[1].time);
        if !sorted {
            return Err(SimError::InvalidConfig("arrivals must be time-ordered".into()));
        }
        Ok(())
    }
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            c_l: 22.0e6,
            prop_delay: 0.010,
            queue_capacity: 5300,
            payload_limit: 1024,
            tick: 1.0,
            duration: 500.0,
            arrivals: Vec::new(),
            policy: Policy::ProIbmac,
            beta: BetaSource::Fixed(0.96),
            seed: 0,
            record_packets: false,
        }
    }
}

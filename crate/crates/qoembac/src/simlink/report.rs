use crate::admission::{AdmissionDecision, Policy};

use super::SimError;

/// What happened to one packet.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PacketOutcome {
    Delivered,
    Dropped,
    /// Still in the queue when the simulation ended.
    Queued,
}

/// Per-packet record, kept only when `record_packets` is set.
#[derive(Debug, Clone)]
pub struct PacketRecord {
    pub session_id: u64,
    pub frame_index: usize,
    pub seq_in_frame: u32,
    pub send_time: f64,
    pub outcome: PacketOutcome,
    /// Arrival time at the sink, for delivered packets.
    pub deliver_time: Option<f64>,
}

/// Outcome of one admission request plus, for admitted sessions, the
/// delivery bookkeeping.
#[derive(Debug, Clone)]
pub struct SessionReport {
    pub session_id: u64,
    pub trace_id: String,
    pub start_time: f64,
    pub peak_rate: f64,
    pub decision: AdmissionDecision<f64>,
    pub sent_packets: u64,
    pub delivered_packets: u64,
    pub dropped_packets: u64,
    /// Packets still queued at simulation end.
    pub queued_packets: u64,
    /// Frames fully delivered (all packets arrived), indexed by frame.
    pub frame_delivered: Vec<bool>,
    /// Frames whose send instant fell inside the simulation.
    pub frames_sent: usize,
    pub delay_sum: f64,
}

impl SessionReport {
    pub fn admitted(&self) -> bool {
        self.decision.accepted
    }

    pub fn mean_delay(&self) -> Option<f64> {
        (self.delivered_packets > 0).then(|| self.delay_sum / self.delivered_packets as f64)
    }
}

/// Per-tick measured rates.
#[derive(Debug, Clone, PartialEq)]
pub struct TickRecord {
    pub t: f64,
    pub n: usize,
    pub iaar: f64,
    pub mu_s: f64,
    /// Pro-IAAR at this tick; absent when the β model is out of region.
    pub pro_iaar: Option<f64>,
    pub calr: f64,
}

/// Full outcome of one simulation run.
#[derive(Debug, Clone)]
pub struct SimReport {
    pub policy: Policy,
    pub c_l: f64,
    pub seed: u64,
    pub sessions: Vec<SessionReport>,
    pub ticks: Vec<TickRecord>,
    pub packets: Vec<PacketRecord>,
    pub warnings: Vec<String>,
}

impl SimReport {
    pub fn admitted_count(&self) -> usize {
        self.sessions.iter().filter(|s| s.admitted()).count()
    }

    pub fn rejected_count(&self) -> usize {
        self.sessions.len() - self.admitted_count()
    }

    pub fn total_sent(&self) -> u64 {
        self.sessions.iter().map(|s| s.sent_packets).sum()
    }

    pub fn total_delivered(&self) -> u64 {
        self.sessions.iter().map(|s| s.delivered_packets).sum()
    }

    pub fn total_dropped(&self) -> u64 {
        self.sessions.iter().map(|s| s.dropped_packets).sum()
    }

    pub fn total_queued(&self) -> u64 {
        self.sessions.iter().map(|s| s.queued_packets).sum()
    }

    /// Mean packet delay over all delivered packets.
    pub fn mean_delay(&self) -> Option<f64> {
        let delivered = self.total_delivered();
        (delivered > 0).then(|| {
            self.sessions.iter().map(|s| s.delay_sum).sum::<f64>() / delivered as f64
        })
    }
}

/// Fraction of sent packets dropped, over all admitted sessions.
pub fn drop_ratio(report: &SimReport) -> Result<f64, SimError> {
    let sent = report.total_sent();
    if sent == 0 {
        return Err(SimError::NoData("no packets sent"));
    }
    Ok(report.total_dropped() as f64 / sent as f64)
}

/// Empirical CDF of per-session mean delays, sampled at `points` evenly
/// spaced quantiles. The last point is the maximum at fraction 1.
pub fn delay_cdf(report: &SimReport, points: usize) -> Result<Vec<(f64, f64)>, SimError> {
    let mut means: Vec<f64> = report
        .sessions
        .iter()
        .filter_map(|s| s.mean_delay())
        .collect();
    if means.is_empty() || points == 0 {
        return Err(SimError::NoData("no delivered packets"));
    }
    means.sort_by(|a, b| a.partial_cmp(b).expect("finite delays"));
    let n = means.len();
    Ok((1..=points)
        .map(|k| {
            let q = k as f64 / points as f64;
            let idx = ((q * n as f64).ceil() as usize).clamp(1, n) - 1;
            (means[idx], q)
        })
        .collect())
}

//! CSV emission for simulation runs. All files carry a header row, use
//! `.` as the decimal separator and contain no timestamps, so re-running
//! a scenario yields byte-identical bundles.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use crate::qoe::{score_frames, SessionQoe};
use crate::simlink::{drop_ratio, PacketOutcome, SimReport};
use crate::traffic::VideoTrace;

use super::CliError;

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn admissions_csv(report: &SimReport) -> String {
    let mut out = String::from("t,session,policy,decision,measured_bps,beta\n");
    for s in &report.sessions {
        let d = &s.decision;
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            d.t,
            s.session_id,
            d.policy.name(),
            if d.accepted { "accept" } else { "reject" },
            d.measured,
            opt(d.beta_used),
        );
    }
    out
}

pub fn rates_csv(report: &SimReport) -> String {
    let mut out = String::from("t,n,iaar_bps,mu_s_bps,pro_iaar_bps,calr_bps\n");
    for tick in &report.ticks {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            tick.t,
            tick.n,
            tick.iaar,
            tick.mu_s,
            opt(tick.pro_iaar),
            tick.calr,
        );
    }
    out
}

pub fn packets_csv(report: &SimReport) -> String {
    let mut out = String::from("session,frame,seq,send_time,outcome,deliver_time\n");
    for p in &report.packets {
        let outcome = match p.outcome {
            PacketOutcome::Delivered => "delivered",
            PacketOutcome::Dropped => "dropped",
            PacketOutcome::Queued => "queued",
        };
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            p.session_id,
            p.frame_index,
            p.seq_in_frame,
            p.send_time,
            outcome,
            opt(p.deliver_time),
        );
    }
    out
}

/// Per-session QoE scores for admitted sessions that sent at least one
/// frame, computed over the frames that fell inside the simulation.
pub fn session_qoe(
    report: &SimReport,
    traces: &HashMap<String, Arc<VideoTrace>>,
) -> Result<Vec<(u64, SessionQoe)>, CliError> {
    let mut rows = Vec::new();
    for s in &report.sessions {
        if !s.admitted() || s.frames_sent == 0 {
            continue;
        }
        let trace = traces
            .get(&s.trace_id)
            .ok_or_else(|| CliError::Runtime(format!("missing trace {:?}", s.trace_id)))?;
        let frames = &trace.frames()[..s.frames_sent];
        let delivery = &s.frame_delivered[..s.frames_sent];
        let q = score_frames(frames, delivery, trace.gop(), 30)
            .map_err(|e| CliError::Runtime(e.to_string()))?;
        rows.push((s.session_id, q));
    }
    Ok(rows)
}

pub fn qoe_csv(rows: &[(u64, SessionQoe)]) -> String {
    let mut out = String::from("session,mos,div_percent\n");
    for (id, q) in rows {
        let _ = writeln!(out, "{},{},{}", id, q.mos, q.div_percent);
    }
    out
}

/// One-row summary of a run, used both per-variant and in the batch
/// rollup (which prepends scenario/policy columns).
pub struct SummaryRow {
    pub scenario: String,
    pub policy_label: String,
    pub c_l_mbps: f64,
    pub beta: Option<f64>,
    pub requests: usize,
    pub admitted: usize,
    pub rejected: usize,
    pub sent: u64,
    pub delivered: u64,
    pub dropped: u64,
    pub queued: u64,
    pub drop_ratio: f64,
    pub mean_delay_s: Option<f64>,
    pub mean_mos: Option<f64>,
    pub max_div_percent: Option<f64>,
}

pub fn summarize(
    scenario: &str,
    label: &str,
    report: &SimReport,
    qoe_rows: &[(u64, SessionQoe)],
) -> SummaryRow {
    // Representative beta: last admission decision that used one.
    let beta = report
        .sessions
        .iter()
        .rev()
        .find_map(|s| s.decision.beta_used);
    let mean_mos = (!qoe_rows.is_empty())
        .then(|| qoe_rows.iter().map(|(_, q)| q.mos).sum::<f64>() / qoe_rows.len() as f64);
    let max_div = qoe_rows
        .iter()
        .map(|(_, q)| q.div_percent)
        .fold(None, |acc: Option<f64>, v| Some(acc.map_or(v, |a| a.max(v))));
    SummaryRow {
        scenario: scenario.to_string(),
        policy_label: label.to_string(),
        c_l_mbps: report.c_l / 1e6,
        beta,
        requests: report.sessions.len(),
        admitted: report.admitted_count(),
        rejected: report.rejected_count(),
        sent: report.total_sent(),
        delivered: report.total_delivered(),
        dropped: report.total_dropped(),
        queued: report.total_queued(),
        drop_ratio: drop_ratio(report).unwrap_or(0.0),
        mean_delay_s: report.mean_delay(),
        mean_mos,
        max_div_percent: max_div,
    }
}

pub const SUMMARY_HEADER: &str = "scenario,policy,c_l_mbps,beta,requests,admitted,rejected,\
sent,delivered,dropped,queued,drop_ratio,mean_delay_s,mean_mos,max_div_percent\n";

pub fn summary_line(r: &SummaryRow) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
        r.scenario,
        r.policy_label,
        r.c_l_mbps,
        opt(r.beta),
        r.requests,
        r.admitted,
        r.rejected,
        r.sent,
        r.delivered,
        r.dropped,
        r.queued,
        r.drop_ratio,
        opt(r.mean_delay_s),
        opt(r.mean_mos),
        opt(r.max_div_percent),
    )
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)
            .map_err(|e| CliError::Runtime(format!("create {parent:?}: {e}")))?;
    }
    std::fs::write(path, contents).map_err(|e| CliError::Runtime(format!("write {path:?}: {e}")))
}

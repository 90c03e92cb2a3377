use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};
use std::sync::Arc;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::admission::{cbac_decide, pro_ibmac_decide, AdmissionDecision, Policy};
use crate::measurement::{calr, duty_cycle, iaar, mu_s, MeasurementWindow, RateState, SessionRate};
use crate::traffic::{packetize, Session, SessionState, VideoTrace};

use super::report::{
    PacketOutcome, PacketRecord, SessionReport, SimReport, TickRecord,
};
use super::{ArrivalSpec, SimConfig, SimError};

/// Builds the arrival schedule used throughout: one request per second
/// with seeded jitter in [0, 1).
pub fn every_second_arrivals(
    duration: f64,
    trace_id: &str,
    seed: u64,
    peak_rate: Option<f64>,
) -> Vec<ArrivalSpec> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..duration.floor() as u64)
        .map(|k| ArrivalSpec {
            time: k as f64 + rng.gen_range(0.0..1.0),
            trace_id: trace_id.to_string(),
            peak_rate,
        })
        .collect()
}

#[derive(Debug, Clone, Copy)]
enum EventKind {
    /// Emit frame `frame` of admitted session slot `slot`.
    FrameEmit { slot: usize, frame: usize },
    Tick,
    Arrival { idx: usize },
}

// Same-instant ordering: frame bursts land in the closing measurement
// window, then the tick fires, then arrivals see the fresh state.
fn rank(kind: &EventKind) -> u8 {
    match kind {
        EventKind::FrameEmit { .. } => 0,
        EventKind::Tick => 1,
        EventKind::Arrival { .. } => 2,
    }
}

struct Event {
    time: f64,
    seq: u64,
    kind: EventKind,
}

impl PartialEq for Event {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Event {}
impl PartialOrd for Event {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Event {
    // Reversed so the BinaryHeap pops the earliest event first.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .time
            .total_cmp(&self.time)
            .then_with(|| rank(&other.kind).cmp(&rank(&self.kind)))
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

/// A packet in the queue or in service; `finish` is when its service ends.
struct Queued {
    slot: usize,
    frame_index: usize,
    seq_in_frame: u32,
    send_time: f64,
    finish: f64,
}

struct Link {
    c_l: f64,
    capacity: usize,
    queue: std::collections::VecDeque<Queued>,
    last_finish: f64,
}

impl Link {
    fn new(c_l: f64, capacity: usize) -> Self {
        Self { c_l, capacity, queue: Default::default(), last_finish: 0.0 }
    }

    /// Delivers every packet whose service finished by `t`.
    fn drain(&mut self, t: f64, delivered: &mut Vec<Queued>) {
        while let Some(front) = self.queue.front() {
            if front.finish <= t {
                delivered.push(self.queue.pop_front().unwrap());
            } else {
                break;
            }
        }
    }

    /// Offers one packet at time `t`; returns false on a droptail drop.
    fn offer(&mut self, t: f64, slot: usize, frame_index: usize, seq_in_frame: u32, wire_bits: u64) -> bool {
        if self.queue.len() >= self.capacity {
            return false;
        }
        let start = self.last_finish.max(t);
        let finish = start + wire_bits as f64 / self.c_l;
        self.last_finish = finish;
        self.queue.push_back(Queued { slot, frame_index, seq_in_frame, send_time: t, finish });
        true
    }
}

/// Bookkeeping for one admitted session.
struct Slot {
    session: Session,
    trace: Arc<VideoTrace>,
    report_idx: usize,
    finished: bool,
    /// Wire bits emitted since the last tick.
    tick_bits: u64,
    /// Last tick measurement; `None` until the first full tick.
    measured: Option<SessionRate<f64>>,
    x_min: f64,
    x_max: f64,
    frame_pkts_expected: Vec<u32>,
    frame_pkts_delivered: Vec<u32>,
}

/// Runs one deterministic simulation over the given trace library.
pub fn run_simulation(
    config: &SimConfig,
    traces: &HashMap<String, Arc<VideoTrace>>,
) -> Result<SimReport, SimError> {
    config.validate()?;
    for a in &config.arrivals {
        if !traces.contains_key(&a.trace_id) {
            return Err(SimError::UnknownTrace(a.trace_id.clone()));
        }
    }

    let mut heap = BinaryHeap::new();
    let mut seq = 0u64;
    let mut push = |heap: &mut BinaryHeap<Event>, time: f64, kind: EventKind| {
        heap.push(Event { time, seq, kind });
        seq += 1;
    };

    let mut warnings = Vec::new();
    for (idx, a) in config.arrivals.iter().enumerate() {
        if a.time > config.duration {
            warnings.push(format!(
                "arrival at t={} for trace {:?} is beyond duration {}; skipped",
                a.time, a.trace_id, config.duration
            ));
        } else {
            push(&mut heap, a.time, EventKind::Arrival { idx });
        }
    }
    let n_ticks = (config.duration / config.tick).ceil() as u64;
    for k in 1..=n_ticks {
        let t = k as f64 * config.tick;
        if t <= config.duration {
            push(&mut heap, t, EventKind::Tick);
        }
    }

    let mut link = Link::new(config.c_l, config.queue_capacity);
    let mut slots: Vec<Slot> = Vec::new();
    let mut reports: Vec<SessionReport> = Vec::new();
    let mut packets: Vec<PacketRecord> = Vec::new();
    let mut ticks: Vec<TickRecord> = Vec::new();
    let mut agg_window: MeasurementWindow<f64> = MeasurementWindow::new(config.tick);
    let mut agg_tick_bits = 0u64;
    let mut delivered_buf: Vec<Queued> = Vec::new();
    let mut next_session_id = 1u64;

    let deliver = |link: &mut Link,
                       t: f64,
                       slots: &mut [Slot],
                       reports: &mut [SessionReport],
                       packets: &mut Vec<PacketRecord>,
                       buf: &mut Vec<Queued>| {
        link.drain(t, buf);
        for q in buf.drain(..) {
            let slot = &mut slots[q.slot];
            let deliver_time = q.finish + config.prop_delay;
            let rep = &mut reports[slot.report_idx];
            rep.delivered_packets += 1;
            rep.delay_sum += deliver_time - q.send_time;
            slot.frame_pkts_delivered[q.frame_index] += 1;
            if config.record_packets {
                packets.push(PacketRecord {
                    session_id: rep.session_id,
                    frame_index: q.frame_index,
                    seq_in_frame: q.seq_in_frame,
                    send_time: q.send_time,
                    outcome: PacketOutcome::Delivered,
                    deliver_time: Some(deliver_time),
                });
            }
        }
    };

    while let Some(ev) = heap.pop() {
        let t = ev.time;
        deliver(&mut link, t, &mut slots, &mut reports, &mut packets, &mut delivered_buf);
        match ev.kind {
            EventKind::FrameEmit { slot: si, frame } => {
                let slot = &mut slots[si];
                let f = &slot.trace.frames()[frame];
                let pkts = packetize(slot.session.id, f, config.payload_limit, t);
                slot.frame_pkts_expected[frame] = pkts.len() as u32;
                let rep_idx = slot.report_idx;
                reports[rep_idx].frames_sent = reports[rep_idx].frames_sent.max(frame + 1);
                for p in &pkts {
                    reports[rep_idx].sent_packets += 1;
                    slot.tick_bits += p.wire_bits();
                    agg_tick_bits += p.wire_bits();
                    let ok = link.offer(t, si, frame, p.seq_in_frame, p.wire_bits());
                    if !ok {
                        reports[rep_idx].dropped_packets += 1;
                        if config.record_packets {
                            packets.push(PacketRecord {
                                session_id: slot.session.id,
                                frame_index: frame,
                                seq_in_frame: p.seq_in_frame,
                                send_time: t,
                                outcome: PacketOutcome::Dropped,
                                deliver_time: None,
                            });
                        }
                    }
                }
                let next = frame + 1;
                if next < slot.trace.frames().len() {
                    let ft = slot.session.start_time + slot.trace.frame_time(next);
                    if ft <= config.duration {
                        push(&mut heap, ft, EventKind::FrameEmit { slot: si, frame: next });
                    }
                }
            }
            EventKind::Tick => {
                for slot in slots.iter_mut() {
                    if slot.finished {
                        continue;
                    }
                    // Prorate the first, partial tick of a young session
                    // so its rate is not under-reported.
                    let span = (t - slot.session.start_time).min(config.tick).max(1e-9);
                    let x = slot.tick_bits as f64 / span;
                    slot.tick_bits = 0;
                    slot.x_min = slot.x_min.min(x);
                    slot.x_max = slot.x_max.max(x);
                    let activity = duty_cycle(x * config.tick, config.c_l, config.tick);
                    slot.measured = Some(SessionRate {
                        session_id: slot.session.id,
                        rate: x,
                        activity,
                        rate_min: slot.x_min,
                        rate_max: slot.x_max,
                    });
                    if slot.session.end_time() <= t {
                        slot.finished = true;
                        slot.session.set_state(SessionState::Finished).expect("active -> finished");
                    }
                }
                agg_window.record(t, agg_tick_bits as f64);
                agg_tick_bits = 0;
                let state = measurement_state(&slots, t);
                let calr_now = calr(&agg_window).unwrap_or(0.0);
                let pro = config
                    .beta
                    .resolve(config.c_l / 1e6, state.n().max(1))
                    .ok()
                    .map(|b| mu_s(&state) * (1.0 + b * (state.n().saturating_sub(1)) as f64));
                ticks.push(TickRecord {
                    t,
                    n: state.n(),
                    iaar: iaar(&state),
                    mu_s: mu_s(&state),
                    pro_iaar: pro,
                    calr: calr_now,
                });
            }
            EventKind::Arrival { idx } => {
                let spec = &config.arrivals[idx];
                let trace = Arc::clone(&traces[&spec.trace_id]);
                let mut session = Session::new(
                    next_session_id,
                    Arc::clone(&trace),
                    t,
                    spec.peak_rate,
                    config.payload_limit,
                )?;
                next_session_id += 1;
                let decision: AdmissionDecision<f64> = match config.policy {
                    Policy::None => AdmissionDecision {
                        accepted: true,
                        policy: Policy::None,
                        measured: 0.0,
                        threshold: config.c_l,
                        beta_used: None,
                        t,
                        error: None,
                    },
                    Policy::Cbac => {
                        let calr_now = calr(&agg_window).unwrap_or(0.0);
                        cbac_decide(calr_now, session.peak_rate, config.c_l, t)
                    }
                    Policy::ProIbmac => {
                        let state = measurement_state(&slots, t);
                        pro_ibmac_decide(&state, session.peak_rate, config.c_l, &config.beta)
                    }
                };
                let accepted = decision.accepted;
                session
                    .set_state(if accepted { SessionState::Active } else { SessionState::Rejected })
                    .expect("requested -> decided");
                let report_idx = reports.len();
                reports.push(SessionReport {
                    session_id: session.id,
                    trace_id: spec.trace_id.clone(),
                    start_time: t,
                    peak_rate: session.peak_rate,
                    decision,
                    sent_packets: 0,
                    delivered_packets: 0,
                    dropped_packets: 0,
                    queued_packets: 0,
                    frame_delivered: Vec::new(),
                    frames_sent: 0,
                    delay_sum: 0.0,
                });
                if accepted {
                    let n_frames = trace.frames().len();
                    let peak = session.peak_rate;
                    slots.push(Slot {
                        session,
                        trace,
                        report_idx,
                        finished: false,
                        tick_bits: 0,
                        measured: None,
                        x_min: 0.0,
                        x_max: peak,
                        frame_pkts_expected: vec![0; n_frames],
                        frame_pkts_delivered: vec![0; n_frames],
                    });
                    let si = slots.len() - 1;
                    push(&mut heap, t, EventKind::FrameEmit { slot: si, frame: 0 });
                }
            }
        }
    }

    // Final service drain at the horizon; whatever remains is queued.
    deliver(&mut link, config.duration, &mut slots, &mut reports, &mut packets, &mut delivered_buf);
    for q in link.queue.drain(..) {
        let slot = &slots[q.slot];
        reports[slot.report_idx].queued_packets += 1;
        if config.record_packets {
            packets.push(PacketRecord {
                session_id: slot.session.id,
                frame_index: q.frame_index,
                seq_in_frame: q.seq_in_frame,
                send_time: q.send_time,
                outcome: PacketOutcome::Queued,
                deliver_time: None,
            });
        }
    }
    for slot in &slots {
        let rep = &mut reports[slot.report_idx];
        rep.frame_delivered = slot
            .frame_pkts_expected
            .iter()
            .zip(&slot.frame_pkts_delivered)
            .map(|(&e, &d)| e > 0 && d == e)
            .collect();
        debug_assert_eq!(
            rep.sent_packets,
            rep.delivered_packets + rep.dropped_packets + rep.queued_packets,
            "packet conservation for session {}",
            rep.session_id
        );
    }

    Ok(SimReport {
        policy: config.policy,
        c_l: config.c_l,
        seed: config.seed,
        sessions: reports,
        ticks,
        packets,
        warnings,
    })
}

/// Snapshot for admission: measured entries for every unfinished admitted
/// session; sessions without a full tick of history enter conservatively
/// at their declared peak with activity 1.
fn measurement_state(slots: &[Slot], t: f64) -> RateState<f64> {
    let per_session = slots
        .iter()
        .filter(|s| !s.finished)
        .map(|s| {
            s.measured.clone().unwrap_or(SessionRate {
                session_id: s.session.id,
                rate: s.session.peak_rate,
                activity: 1.0,
                rate_min: 0.0,
                rate_max: s.session.peak_rate,
            })
        })
        .collect();
    RateState::new(t, per_session).expect("valid measurement state")
}

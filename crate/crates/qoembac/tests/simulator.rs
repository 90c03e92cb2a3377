//! Simulator invariants: delay composition on an idle link, steady-state
//! overload loss, FIFO service order and run-to-run determinism.

use std::collections::HashMap;
use std::sync::Arc;

use qoembac::admission::{BetaSource, Policy};
use qoembac::simlink::{
    drop_ratio, run_simulation, ArrivalSpec, PacketOutcome, SimConfig, SimReport,
};
use qoembac::traffic::{frame_wire_bits, synth_trace, SynthParams, VideoTrace};

fn cbr_lib(mean_mbps: f64, duration: f64, seed: u64) -> HashMap<String, Arc<VideoTrace>> {
    let t = synth_trace(&SynthParams {
        mean_bitrate: mean_mbps * 1e6,
        burstiness: 1.0,
        duration,
        fps: 30.0,
        gop: 30,
        seed,
    })
    .unwrap();
    HashMap::from([("src".to_string(), Arc::new(t))])
}

fn arrivals(times: &[f64]) -> Vec<ArrivalSpec> {
    times
        .iter()
        .map(|&time| ArrivalSpec { time, trace_id: "src".to_string(), peak_rate: None })
        .collect()
}

#[test]
fn idle_link_delay_is_service_plus_propagation() {
    let lib = cbr_lib(1.0, 10.0, 1);
    let config = SimConfig {
        c_l: 100.0e6,
        duration: 12.0,
        arrivals: arrivals(&[0.25]),
        policy: Policy::None,
        record_packets: true,
        ..Default::default()
    };
    let report = run_simulation(&config, &lib).unwrap();
    assert_eq!(report.total_dropped(), 0);
    let max_frame_bytes = lib["src"].frames().iter().map(|f| f.size).max().unwrap();
    let burst_time = frame_wire_bits(max_frame_bytes, 1024) as f64 / config.c_l;
    for p in report.packets.iter().filter(|p| p.outcome == PacketOutcome::Delivered) {
        let delay = p.deliver_time.unwrap() - p.send_time;
        // Every packet waits at most for the rest of its own frame burst.
        assert!(delay >= config.prop_delay - 1e-12, "delay {delay}");
        assert!(delay <= config.prop_delay + burst_time + 1e-9, "delay {delay}");
    }
}

#[test]
fn sustained_overload_drops_the_excess() {
    // Two 6 Mbps constant-rate sources on a 10 Mbps link with a short
    // queue: the loss rate settles at (offered - capacity) / offered.
    let lib = cbr_lib(6.0, 60.0, 2);
    let config = SimConfig {
        c_l: 10.0e6,
        duration: 60.0,
        queue_capacity: 50,
        arrivals: arrivals(&[0.1, 0.2]),
        policy: Policy::None,
        ..Default::default()
    };
    let report = run_simulation(&config, &lib).unwrap();
    let trace = &lib["src"];
    let wire_bits: u64 = trace.frames().iter().map(|f| frame_wire_bits(f.size, 1024)).sum();
    let offered = 2.0 * wire_bits as f64 / trace.duration();
    let expected = (offered - config.c_l) / offered;
    let measured = drop_ratio(&report).unwrap();
    assert!(
        (measured - expected).abs() < 0.03,
        "drop ratio {measured}, expected about {expected}"
    );
}

#[test]
fn delivered_packets_leave_in_fifo_order() {
    let lib = cbr_lib(4.0, 20.0, 3);
    let config = SimConfig {
        c_l: 9.0e6,
        duration: 25.0,
        arrivals: arrivals(&[0.1, 0.5, 1.3]),
        policy: Policy::None,
        record_packets: true,
        ..Default::default()
    };
    let report = run_simulation(&config, &lib).unwrap();
    let mut last = f64::NEG_INFINITY;
    for p in report.packets.iter().filter(|p| p.outcome == PacketOutcome::Delivered) {
        let t = p.deliver_time.unwrap();
        assert!(t >= last, "delivery went backwards: {t} after {last}");
        last = t;
    }
}

fn fingerprint(r: &SimReport) -> Vec<(u64, u64, u64, u64, u64, f64)> {
    r.sessions
        .iter()
        .map(|s| {
            (
                s.session_id,
                s.sent_packets,
                s.delivered_packets,
                s.dropped_packets,
                s.queued_packets,
                s.delay_sum,
            )
        })
        .collect()
}

#[test]
fn identical_configs_reproduce_identical_reports() {
    let lib = cbr_lib(2.0, 30.0, 4);
    let config = SimConfig {
        c_l: 8.0e6,
        duration: 35.0,
        arrivals: arrivals(&[0.4, 1.1, 2.9, 7.5]),
        policy: Policy::ProIbmac,
        beta: BetaSource::Fixed(0.9),
        ..Default::default()
    };
    let a = run_simulation(&config, &lib).unwrap();
    let b = run_simulation(&config, &lib).unwrap();
    assert_eq!(fingerprint(&a), fingerprint(&b));
    assert_eq!(a.ticks.len(), b.ticks.len());
}

#[test]
fn capacity_below_any_peak_admits_nothing() {
    let lib = cbr_lib(2.0, 10.0, 5);
    for policy in [Policy::Cbac, Policy::ProIbmac] {
        let config = SimConfig {
            c_l: 0.5e6,
            duration: 15.0,
            arrivals: arrivals(&[0.3, 1.7, 4.2]),
            policy,
            beta: BetaSource::Fixed(0.9),
            ..Default::default()
        };
        let report = run_simulation(&config, &lib).unwrap();
        assert_eq!(report.admitted_count(), 0, "{policy:?}");
        assert_eq!(report.total_sent(), 0);
    }
}

#[test]
fn beta_one_on_constant_sources_tracks_cbac() {
    // With beta = 1 the exceedable rate collapses to n times the mean,
    // so on constant-rate sources both policies admit almost alike.
    let lib = cbr_lib(1.0, 60.0, 6);
    let base = SimConfig {
        c_l: 10.0e6,
        duration: 60.0,
        arrivals: (0..30)
            .map(|k| ArrivalSpec {
                time: k as f64 * 2.0 + 0.5,
                trace_id: "src".to_string(),
                peak_rate: None,
            })
            .collect(),
        policy: Policy::ProIbmac,
        beta: BetaSource::Fixed(1.0),
        ..Default::default()
    };
    let pro = run_simulation(&base, &lib).unwrap();
    let cbac = run_simulation(&SimConfig { policy: Policy::Cbac, ..base.clone() }, &lib).unwrap();
    let (p, c) = (pro.admitted_count(), cbac.admitted_count());
    assert!(p <= c + 2, "pro {p} far above cbac {c}");
    assert!(p + 2 >= c, "pro {p} far below cbac {c}");
}

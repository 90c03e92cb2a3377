//! Perceived-quality scoring: the PSNR-to-MOS step mapping, per-session
//! mean MOS under GoP-aware frame loss, and the worst-interval DIV metric.

use thiserror::Error;

use crate::scalar::Scalar;
use crate::traffic::VideoTrace;

#[derive(Debug, Error, PartialEq)]
pub enum QoeError {
    #[error("delivery map covers {got} frames, trace has {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("no data: {0}")]
    NoData(&'static str),
}

/// Maps a PSNR value to the 1..5 MOS scale. Interval bounds are
/// upper-inclusive: 37 dB is "good" (4), anything above is "excellent".
pub fn psnr_to_mos<S: Scalar>(psnr: S) -> u8 {
    let db = |v: f64| S::from_f64_lit(v);
    if psnr > db(37.0) {
        5
    } else if psnr > db(31.0) {
        4
    } else if psnr > db(25.0) {
        3
    } else if psnr > db(20.0) {
        2
    } else {
        1
    }
}

/// Delivery outcome of a single frame after decode-dependency analysis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameOutcome {
    pub index: usize,
    /// All packets arrived and every preceding frame in the GoP is viable.
    pub delivered: bool,
    pub sent_mos: u8,
    pub recv_mos: u8,
}

/// Per-session quality summary.
#[derive(Debug, Clone, PartialEq)]
pub struct SessionQoe {
    /// Mean of per-frame received MOS, in [1, 5].
    pub mos: f64,
    /// Worst-interval percentage of degraded frames, in [0, 100].
    pub div_percent: f64,
    pub interval: usize,
    pub outcomes: Vec<FrameOutcome>,
}

/// Scores a session from its per-frame delivery map.
///
/// A frame is viable only if all its packets arrived and every earlier
/// frame of its GoP (back to the I frame) is viable; non-viable frames
/// score MOS 1. B frames follow the same forward dependency chain as P
/// frames.
pub fn score_session(
    trace: &VideoTrace,
    delivery: &[bool],
    gop: usize,
    interval: usize,
) -> Result<SessionQoe, QoeError> {
    score_frames(trace.frames(), delivery, gop, interval)
}

/// [`score_session`] over an explicit frame slice, e.g. the prefix of a
/// trace that fell inside a simulation horizon.
pub fn score_frames(
    frames: &[crate::traffic::FrameRecord],
    delivery: &[bool],
    gop: usize,
    interval: usize,
) -> Result<SessionQoe, QoeError> {
    if delivery.len() != frames.len() {
        return Err(QoeError::LengthMismatch { expected: frames.len(), got: delivery.len() });
    }
    let gop = gop.max(1);
    let mut outcomes = Vec::with_capacity(frames.len());
    let mut chain_viable = true;
    for (f, &arrived) in frames.iter().zip(delivery) {
        if f.index % gop == 0 {
            chain_viable = true;
        }
        chain_viable = chain_viable && arrived;
        let sent_mos = psnr_to_mos(f.ref_psnr);
        let recv_mos = if chain_viable { sent_mos } else { 1 };
        outcomes.push(FrameOutcome { index: f.index, delivered: chain_viable, sent_mos, recv_mos });
    }
    let mos = outcomes.iter().map(|o| o.recv_mos as f64).sum::<f64>() / outcomes.len() as f64;
    let div_percent = div_metric(&outcomes, interval)?;
    Ok(SessionQoe { mos, div_percent, interval, outcomes })
}

/// Distortion-in-interval: partitions the outcomes into consecutive
/// windows of `interval` frames and returns the maximum percentage of
/// frames whose received MOS fell below the sent MOS.
pub fn div_metric(outcomes: &[FrameOutcome], interval: usize) -> Result<f64, QoeError> {
    if outcomes.is_empty() {
        return Err(QoeError::NoData("div_metric needs outcomes"));
    }
    let interval = interval.max(1);
    let worst = outcomes
        .chunks(interval)
        .map(|w| {
            let degraded = w.iter().filter(|o| o.recv_mos < o.sent_mos).count();
            100.0 * degraded as f64 / w.len() as f64
        })
        .fold(0.0f64, f64::max);
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::traffic::{synth_trace, SynthParams};
    use proptest::prelude::*;

    fn trace_900() -> VideoTrace {
        synth_trace(&SynthParams {
            mean_bitrate: 1_000_000.0,
            burstiness: 1.0,
            duration: 30.0,
            fps: 30.0,
            gop: 30,
            seed: 3,
        })
        .unwrap()
    }

    #[test]
    fn psnr_mapping_published_rows() {
        assert_eq!(psnr_to_mos(38.0f64), 5);
        assert_eq!(psnr_to_mos(33.0f64), 4);
        assert_eq!(psnr_to_mos(19.0f64), 1);
        // Upper-inclusive boundaries.
        assert_eq!(psnr_to_mos(37.0f64), 4);
        assert_eq!(psnr_to_mos(31.0f64), 3);
        assert_eq!(psnr_to_mos(25.0f64), 2);
        assert_eq!(psnr_to_mos(20.0f64), 1);
        assert_eq!(psnr_to_mos(28.0f64), 3);
        assert_eq!(psnr_to_mos(22.0f64), 2);
    }

    #[test]
    fn all_delivered_scores_five() {
        let t = trace_900();
        let q = score_session(&t, &vec![true; 900], 30, 30).unwrap();
        assert_eq!(q.mos, 5.0);
        assert_eq!(q.div_percent, 0.0);
    }

    #[test]
    fn all_lost_scores_one() {
        let t = trace_900();
        let q = score_session(&t, &vec![false; 900], 30, 30).unwrap();
        assert_eq!(q.mos, 1.0);
        assert_eq!(q.div_percent, 100.0);
    }

    #[test]
    fn mid_gop_loss_kills_rest_of_gop() {
        let t = trace_900();
        let mut delivery = vec![true; 900];
        delivery[45] = false;
        let q = score_session(&t, &delivery, 30, 30).unwrap();
        // Frames 45..=59 become non-viable: (885*5 + 15*1)/900.
        let expected = (885.0 * 5.0 + 15.0) / 900.0;
        assert!((q.mos - expected).abs() < 1e-12, "{} vs {expected}", q.mos);
        assert!(!q.outcomes[59].delivered);
        assert!(q.outcomes[60].delivered, "next GoP recovers");
        // 15 degraded frames all inside one 30-frame window.
        assert!((q.div_percent - 50.0).abs() < 1e-12);
    }

    #[test]
    fn div_single_degraded_frame() {
        let t = trace_900();
        let mut delivery = vec![true; 900];
        delivery[29] = false; // last frame of first GoP: only itself degraded
        let q = score_session(&t, &delivery, 30, 30).unwrap();
        assert!((q.div_percent - 100.0 / 30.0).abs() < 1e-9);
    }

    #[test]
    fn mismatched_delivery_map_rejected() {
        let t = trace_900();
        let err = score_session(&t, &[true, false], 30, 30).unwrap_err();
        assert_eq!(err, QoeError::LengthMismatch { expected: 900, got: 2 });
    }

    proptest! {
        // Losing one more frame never raises MOS and never lowers DIV.
        #[test]
        fn loss_monotonicity(drop_at in 0usize..900, extra in 0usize..900) {
            let t = trace_900();
            let mut delivery = vec![true; 900];
            delivery[drop_at] = false;
            let base = score_session(&t, &delivery, 30, 30).unwrap();
            delivery[extra] = false;
            let more = score_session(&t, &delivery, 30, 30).unwrap();
            prop_assert!(more.mos <= base.mos + 1e-12);
            prop_assert!(more.div_percent >= base.div_percent - 1e-12);
        }

        // The step mapping is nonincreasing in PSNR order.
        #[test]
        fn psnr_mapping_monotone(a in 0.0f64..60.0, b in 0.0f64..60.0) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            prop_assert!(psnr_to_mos(lo) <= psnr_to_mos(hi));
        }
    }
}

//! Traffic-rate estimators: IAAR, windowed CalR, the expectation μ_S,
//! the exceedable margin ε, Pro-IAAR and the Hoeffding bound γ.
//!
//! All functions are pure over immutable value-type snapshots and generic
//! over the scalar type.

use std::collections::VecDeque;

use thiserror::Error;

use crate::scalar::Scalar;

#[derive(Debug, Error, PartialEq)]
pub enum MeasurementError {
    #[error("no data: {0}")]
    NoData(&'static str),
    #[error("beta must satisfy 0 < beta <= 1, got {0}")]
    BetaOutOfRange(f64),
}

/// Measured rate of one session at a tick: instantaneous rate `x_i`,
/// activity probability `p_i` and the running rate bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct SessionRate<S> {
    pub session_id: u64,
    /// Instantaneous wire rate x_i in bits/s.
    pub rate: S,
    /// Probability the session is active, in [0, 1].
    pub activity: S,
    pub rate_min: S,
    pub rate_max: S,
}

/// Per-tick snapshot of every admitted, unfinished session.
#[derive(Debug, Clone, PartialEq)]
pub struct RateState<S> {
    pub t: S,
    pub per_session: Vec<SessionRate<S>>,
}

impl<S: Scalar> RateState<S> {
    pub fn new(t: S, per_session: Vec<SessionRate<S>>) -> Result<Self, MeasurementError> {
        for s in &per_session {
            debug_assert!(
                s.activity >= S::zero() && s.activity <= S::one(),
                "activity out of [0,1] for session {}",
                s.session_id
            );
            debug_assert!(
                s.rate_min <= s.rate && s.rate <= s.rate_max,
                "rate outside [min,max] for session {}",
                s.session_id
            );
        }
        Ok(Self { t, per_session })
    }

    pub fn empty(t: S) -> Self {
        Self { t, per_session: Vec::new() }
    }

    /// Number of active sessions.
    pub fn n(&self) -> usize {
        self.per_session.len()
    }
}

/// Instantaneous aggregate arrival rate: the plain sum of per-session
/// rates. Zero for an empty state.
pub fn iaar<S: Scalar>(state: &RateState<S>) -> S {
    state.per_session.iter().map(|s| s.rate).sum()
}

/// Expectation of the aggregate rate: Σ x_i · p_i.
pub fn mu_s<S: Scalar>(state: &RateState<S>) -> S {
    state.per_session.iter().map(|s| s.rate * s.activity).sum()
}

/// Exceedable margin ε = β · μ · (n − 1) / n for β in (0, 1].
pub fn epsilon<S: Scalar>(beta: S, mu: S, n: usize) -> Result<S, MeasurementError> {
    if !(beta > S::zero() && beta <= S::one()) {
        return Err(MeasurementError::BetaOutOfRange(
            beta.to_f64().unwrap_or(f64::NAN),
        ));
    }
    if n == 0 {
        return Err(MeasurementError::NoData("epsilon needs n >= 1"));
    }
    let n_s = S::from_count(n);
    Ok(beta * mu * (n_s - S::one()) / n_s)
}

/// Exceedable upper rate limit: Pro-IAAR = μ + n·ε.
pub fn pro_iaar<S: Scalar>(mu: S, n: usize, eps: S) -> S {
    mu + S::from_count(n) * eps
}

/// Hoeffding bound γ = exp(−2n²ε² / Σ(x_max − x_min)²) on the probability
/// that the aggregate rate exceeds μ_S + nε.
///
/// Degenerate cases keep the bound continuous: a zero denominator yields
/// 0 when ε > 0, and ε = 0 always yields 1.
pub fn hoeffding_gamma<S: Scalar>(
    state: &RateState<S>,
    eps: S,
) -> Result<S, MeasurementError> {
    if state.n() == 0 {
        return Err(MeasurementError::NoData("hoeffding_gamma needs sessions"));
    }
    if eps == S::zero() {
        return Ok(S::one());
    }
    let denom: S = state
        .per_session
        .iter()
        .map(|s| {
            let d = s.rate_max - s.rate_min;
            d * d
        })
        .sum();
    if denom == S::zero() {
        return Ok(S::zero());
    }
    let n = S::from_count(state.n());
    let two = S::from_f64_lit(2.0);
    Ok((-(two * n * n * eps * eps) / denom).exp())
}

/// Aggregate-rate measurement window: total observed bits over the last
/// `tau` seconds.
#[derive(Debug, Clone)]
pub struct MeasurementWindow<S> {
    tau: S,
    samples: VecDeque<(S, S)>,
}

impl<S: Scalar> MeasurementWindow<S> {
    pub fn new(tau: S) -> Self {
        assert!(tau > S::zero(), "tau must be > 0");
        Self { tau, samples: VecDeque::new() }
    }

    pub fn tau(&self) -> S {
        self.tau
    }

    /// Records `bits` observed at time `t` and evicts samples older than
    /// the window (half-open: a sample at exactly `t - tau` drops out).
    pub fn record(&mut self, t: S, bits: S) {
        self.samples.push_back((t, bits));
        while let Some(&(t0, _)) = self.samples.front() {
            if t0 <= t - self.tau {
                self.samples.pop_front();
            } else {
                break;
            }
        }
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Total observed bits in the window.
    pub fn total_bits(&self) -> S {
        self.samples.iter().map(|&(_, b)| b).sum()
    }
}

/// Calculated rate over the measurement window: total bits / τ.
pub fn calr<S: Scalar>(window: &MeasurementWindow<S>) -> Result<S, MeasurementError> {
    if window.is_empty() {
        return Err(MeasurementError::NoData("empty measurement window"));
    }
    Ok(window.total_bits() / window.tau())
}

/// Fraction of measurement ticks in the trailing window during which the
/// session sent at least one packet. A session with no history yet is
/// conservatively fully active.
pub fn activity_probability<S: Scalar>(sent_per_tick: &[bool], window_ticks: usize) -> S {
    assert!(window_ticks > 0, "window must be > 0");
    let start = sent_per_tick.len().saturating_sub(window_ticks);
    let recent = &sent_per_tick[start..];
    if recent.is_empty() {
        return S::one();
    }
    let active = recent.iter().filter(|&&b| b).count();
    S::from_count(active) / S::from_count(recent.len())
}

/// Activity as transmission duty cycle: the fraction of link service
/// slots in the window the session's packets occupy, i.e. the limit of
/// [`activity_probability`] as the tick shrinks to one packet service
/// time. Clamped to [0, 1].
pub fn duty_cycle<S: Scalar>(session_bits: S, link_capacity: S, window: S) -> S {
    if link_capacity <= S::zero() || window <= S::zero() {
        return S::one();
    }
    (session_bits / (link_capacity * window)).min(S::one())
}

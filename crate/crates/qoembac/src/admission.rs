//! Admission policies: the calculated-rate rule (CBAC), the exceedable-rate
//! rule (Pro-IBMAC) and the β prediction model with its published
//! coefficient presets.

use std::str::FromStr;

use thiserror::Error;

use crate::measurement::{epsilon, mu_s, RateState};
use crate::scalar::Scalar;
use crate::traffic::Session;

#[derive(Debug, Error, PartialEq)]
pub enum AdmissionError {
    #[error("beta model outside its validity region: beta = {beta} at c_l = {c_l_mbps} Mbps, n = {n}")]
    BetaOutOfRegion { beta: f64, c_l_mbps: f64, n: usize },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("unknown preset {0:?}")]
    UnknownPreset(String),
}

/// Coefficients of the rational β model: β = α + C_l / (δ·n).
///
/// `C_l` is taken in Mbps; `n` is the session count. With `clamp` on,
/// predictions above 1 are clipped to 1 and non-positive predictions are
/// rejected as out-of-region.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaModel<S> {
    pub alpha: S,
    /// Mbps per session; must be non-zero.
    pub delta: S,
    pub clamp: bool,
}

impl<S: Scalar> BetaModel<S> {
    pub fn new(alpha: S, delta: S) -> Self {
        assert!(delta != S::zero(), "delta must be non-zero");
        Self { alpha, delta, clamp: true }
    }

    /// Raw model prediction without clamping.
    pub fn predict(&self, c_l_mbps: S, n: usize) -> S {
        self.alpha + c_l_mbps / (self.delta * S::from_count(n))
    }
}

/// Evaluates the β model at link capacity `c_l_mbps` (in Mbps) and `n`
/// sessions, applying the (0, 1] clamp when enabled.
pub fn beta_eval<S: Scalar>(
    model: &BetaModel<S>,
    c_l_mbps: S,
    n: usize,
) -> Result<S, AdmissionError> {
    if n < 1 {
        return Err(AdmissionError::InvalidInput("beta_eval needs n >= 1".into()));
    }
    if c_l_mbps <= S::zero() {
        return Err(AdmissionError::InvalidInput("beta_eval needs c_l > 0".into()));
    }
    let raw = model.predict(c_l_mbps, n);
    if !model.clamp {
        return Ok(raw);
    }
    if raw <= S::zero() {
        return Err(AdmissionError::BetaOutOfRegion {
            beta: raw.to_f64().unwrap_or(f64::NAN),
            c_l_mbps: c_l_mbps.to_f64().unwrap_or(f64::NAN),
            n,
        });
    }
    Ok(raw.min(S::one()))
}

/// Published coefficient presets for the β model.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoefficientPreset {
    /// Slow moving CIF content.
    MadCif,
    /// Fast moving CIF content.
    ParisCif,
    /// QCIF content.
    DeadlineQcif,
}

impl CoefficientPreset {
    pub fn alpha(self) -> f64 {
        match self {
            CoefficientPreset::MadCif => -0.5429,
            CoefficientPreset::ParisCif => -0.1227,
            CoefficientPreset::DeadlineQcif => -0.1323,
        }
    }

    pub fn delta(self) -> f64 {
        match self {
            CoefficientPreset::MadCif => 0.9689,
            CoefficientPreset::ParisCif => 1.952,
            CoefficientPreset::DeadlineQcif => 0.4991,
        }
    }

    pub fn model<S: Scalar>(self) -> BetaModel<S> {
        BetaModel::new(S::from_f64_lit(self.alpha()), S::from_f64_lit(self.delta()))
    }

    pub fn name(self) -> &'static str {
        match self {
            CoefficientPreset::MadCif => "mad-cif",
            CoefficientPreset::ParisCif => "paris-cif",
            CoefficientPreset::DeadlineQcif => "deadline-qcif",
        }
    }
}

impl FromStr for CoefficientPreset {
    type Err = AdmissionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "mad-cif" | "mad" => Ok(CoefficientPreset::MadCif),
            "paris-cif" | "paris" => Ok(CoefficientPreset::ParisCif),
            "deadline-qcif" | "deadline" => Ok(CoefficientPreset::DeadlineQcif),
            other => Err(AdmissionError::UnknownPreset(other.into())),
        }
    }
}

/// Where Pro-IBMAC takes its β from: a fixed value or the prediction
/// model evaluated at the current (C_l, n).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BetaSource<S> {
    Fixed(S),
    Model(BetaModel<S>),
}

impl<S: Scalar> BetaSource<S> {
    pub fn resolve(&self, c_l_mbps: S, n: usize) -> Result<S, AdmissionError> {
        match self {
            BetaSource::Fixed(b) => Ok(*b),
            BetaSource::Model(m) => beta_eval(m, c_l_mbps, n),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Policy {
    Cbac,
    ProIbmac,
    /// Admit everything; measurement-free baseline.
    None,
}

impl Policy {
    pub fn name(self) -> &'static str {
        match self {
            Policy::Cbac => "cbac",
            Policy::ProIbmac => "pro-ibmac",
            Policy::None => "none",
        }
    }
}

impl FromStr for Policy {
    type Err = AdmissionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "cbac" => Ok(Policy::Cbac),
            "pro-ibmac" | "proibmac" => Ok(Policy::ProIbmac),
            "none" => Ok(Policy::None),
            other => Err(AdmissionError::InvalidInput(format!("unknown policy {other:?}"))),
        }
    }
}

/// Outcome of one admission decision.
#[derive(Debug, Clone, PartialEq)]
pub struct AdmissionDecision<S> {
    pub accepted: bool,
    pub policy: Policy,
    /// The rate the policy compared against the threshold (CalR or
    /// Pro-IAAR), in bits/s.
    pub measured: S,
    /// Link capacity C_l in bits/s.
    pub threshold: S,
    pub beta_used: Option<S>,
    pub t: S,
    /// Annotation when the decision was forced by a model error.
    pub error: Option<String>,
}

/// CBAC rule: accept iff CalR + x_new <= C_l.
pub fn cbac_decide<S: Scalar>(calr: S, x_new: S, c_l: S, t: S) -> AdmissionDecision<S> {
    AdmissionDecision {
        accepted: calr + x_new <= c_l,
        policy: Policy::Cbac,
        measured: calr,
        threshold: c_l,
        beta_used: None,
        t,
        error: None,
    }
}

const BPS_PER_MBPS: f64 = 1e6;

/// Pro-IBMAC rule: computes μ_S, resolves β, forms
/// Pro-IAAR = μ_S (1 + β(n − 1)) and accepts iff Pro-IAAR + x_new <= C_l.
/// An empty link accepts iff x_new <= C_l. A β out-of-region error
/// rejects the request and carries the error annotation.
pub fn pro_ibmac_decide<S: Scalar>(
    state: &RateState<S>,
    x_new: S,
    c_l: S,
    beta: &BetaSource<S>,
) -> AdmissionDecision<S> {
    let t = state.t;
    let n = state.n();
    if n == 0 {
        return AdmissionDecision {
            accepted: x_new <= c_l,
            policy: Policy::ProIbmac,
            measured: S::zero(),
            threshold: c_l,
            beta_used: None,
            t,
            error: None,
        };
    }
    let c_l_mbps = c_l / S::from_f64_lit(BPS_PER_MBPS);
    let mu = mu_s(state);
    match beta.resolve(c_l_mbps, n) {
        Ok(b) => {
            // Factored route: mu (1 + beta (n-1)), identical to mu + n*eps.
            let eps = epsilon(b, mu, n).expect("resolved beta in (0,1]");
            let measured = crate::measurement::pro_iaar(mu, n, eps);
            AdmissionDecision {
                accepted: measured + x_new <= c_l,
                policy: Policy::ProIbmac,
                measured,
                threshold: c_l,
                beta_used: Some(b),
                t,
                error: None,
            }
        }
        Err(e) => AdmissionDecision {
            accepted: false,
            policy: Policy::ProIbmac,
            measured: mu,
            threshold: c_l,
            beta_used: None,
            t,
            error: Some(e.to_string()),
        },
    }
}

/// Supplies measured traffic state to [`admit_sequence`].
pub trait RateOracle {
    /// Snapshot of per-session rates at time `t` (admitted, unfinished
    /// sessions only).
    fn state_at(&mut self, t: f64) -> RateState<f64>;
    /// Calculated aggregate rate over the trailing window at time `t`.
    fn calr_at(&mut self, t: f64) -> f64;
    /// Informs the oracle that a session was admitted.
    fn admitted(&mut self, session: &Session) {
        let _ = session;
    }
}

/// Applies the chosen policy to a time-ordered request sequence, using
/// measured state from the oracle at each arrival. Returns the per-request
/// decisions; accepted count is the number of `accepted` entries.
pub fn admit_sequence(
    requests: &mut [Session],
    policy: Policy,
    c_l: f64,
    beta: &BetaSource<f64>,
    oracle: &mut impl RateOracle,
) -> Vec<AdmissionDecision<f64>> {
    let mut decisions = Vec::with_capacity(requests.len());
    for req in requests.iter_mut() {
        let t = req.start_time;
        let decision = match policy {
            Policy::Cbac => cbac_decide(oracle.calr_at(t), req.peak_rate, c_l, t),
            Policy::ProIbmac => {
                let state = oracle.state_at(t);
                pro_ibmac_decide(&state, req.peak_rate, c_l, beta)
            }
            Policy::None => AdmissionDecision {
                accepted: true,
                policy: Policy::None,
                measured: 0.0,
                threshold: c_l,
                beta_used: None,
                t,
                error: None,
            },
        };
        let new_state = if decision.accepted {
            crate::traffic::SessionState::Active
        } else {
            crate::traffic::SessionState::Rejected
        };
        req.set_state(new_state).expect("requested -> decided");
        if decision.accepted {
            oracle.admitted(req);
        }
        decisions.push(decision);
    }
    decisions
}

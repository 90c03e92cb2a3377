//! Measurement-based admission control toolkit for bursty video traffic.
//!
//! The crate bundles:
//!
//! - [`traffic`]: frame traces, packetization and per-session rates
//! - [`measurement`]: IAAR, CalR, μ_S, ε, Pro-IAAR and the Hoeffding bound
//! - [`admission`]: the CBAC and Pro-IBMAC policies plus the β model
//! - [`betafit`]: least-squares fitting of the β model coefficients
//! - [`simlink`]: a deterministic droptail FIFO bottleneck-link simulator
//! - [`qoe`]: PSNR→MOS mapping, session MOS and the DIV metric
//!
//! Estimator and model math is generic over [`scalar::Scalar`]; `f64`
//! aliases for the common types live at the crate root.

pub mod admission;
pub mod betafit;
pub mod cli;
pub mod measurement;
pub mod qoe;
pub mod scalar;
pub mod simlink;
pub mod traffic;

/// `f64` rate state as produced by the simulator.
pub type RateState = measurement::RateState<f64>;
pub type SessionRate = measurement::SessionRate<f64>;
/// `f64` β model, the form used by the CLI and simulator.
pub type BetaModel = admission::BetaModel<f64>;
pub type BetaSource = admission::BetaSource<f64>;
pub type AdmissionDecision = admission::AdmissionDecision<f64>;
pub type BetaPoint = betafit::BetaPoint<f64>;
pub type FitReport = betafit::FitReport<f64>;

/// Single-precision variants for callers that trade accuracy for space.
pub type RateState32 = measurement::RateState<f32>;
pub type BetaModel32 = admission::BetaModel<f32>;

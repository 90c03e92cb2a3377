//! Least-squares fitting of the β model coefficients to observed
//! (C_l, n, β) points, with goodness-of-fit diagnostics.
//!
//! The rational model β = α + C_l/(δ·n) is linear in the transformed
//! regressor z = C_l/n, so ordinary least squares on (z, β) gives the
//! exact optimum: α is the intercept and δ the reciprocal slope.

use thiserror::Error;

use crate::admission::BetaModel;
use crate::scalar::Scalar;

#[derive(Debug, Error, PartialEq)]
pub enum FitError {
    #[error("need at least 2 points, got {0}")]
    InsufficientData(usize),
    #[error("degenerate design: all regressor values c_l/n identical")]
    DegenerateDesign,
    #[error("zero slope: delta is undefined for constant beta")]
    ZeroSlope,
    #[error("invalid point: {0}")]
    InvalidPoint(String),
}

/// One observed operating point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaPoint<S> {
    pub c_l_mbps: S,
    pub n: usize,
    pub beta: S,
}

impl<S: Scalar> BetaPoint<S> {
    pub fn new(c_l_mbps: S, n: usize, beta: S) -> Result<Self, FitError> {
        if c_l_mbps <= S::zero() || n < 1 || beta <= S::zero() || beta > S::one() {
            return Err(FitError::InvalidPoint(format!(
                "c_l={c_l_mbps}, n={n}, beta={beta}"
            )));
        }
        Ok(Self { c_l_mbps, n, beta })
    }

    fn z(&self) -> S {
        self.c_l_mbps / S::from_count(self.n)
    }
}

/// Fitted coefficients plus residual diagnostics on the β scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitReport<S> {
    pub alpha: S,
    pub delta: S,
    pub r_squared: S,
    /// Adjusted for 2 fitted coefficients.
    pub adj_r_squared: S,
    pub rmse: S,
    pub n_points: usize,
}

/// Ordinary least squares for β = α + (1/δ)·z over the given points.
pub fn fit_beta_model<S: Scalar>(points: &[BetaPoint<S>]) -> Result<FitReport<S>, FitError> {
    if points.len() < 2 {
        return Err(FitError::InsufficientData(points.len()));
    }
    let n = S::from_count(points.len());
    let mean_z = points.iter().map(|p| p.z()).sum::<S>() / n;
    let mean_b = points.iter().map(|p| p.beta).sum::<S>() / n;
    let mut szz = S::zero();
    let mut szb = S::zero();
    for p in points {
        let dz = p.z() - mean_z;
        szz = szz + dz * dz;
        szb = szb + dz * (p.beta - mean_b);
    }
    if szz == S::zero() {
        return Err(FitError::DegenerateDesign);
    }
    let slope = szb / szz;
    if slope == S::zero() {
        return Err(FitError::ZeroSlope);
    }
    let alpha = mean_b - slope * mean_z;
    let model = BetaModel { alpha, delta: slope.recip(), clamp: false };
    let (r_squared, rmse) = goodness(&model, points);
    let dof = points.len().saturating_sub(2);
    let adj_r_squared = if dof > 0 {
        S::one() - (S::one() - r_squared) * (n - S::one()) / S::from_count(dof)
    } else {
        r_squared
    };
    Ok(FitReport {
        alpha,
        delta: slope.recip(),
        r_squared,
        adj_r_squared,
        rmse,
        n_points: points.len(),
    })
}

/// Residual diagnostics of a model against observed points:
/// r² = 1 − SSE/SST (SST about the mean β) and rmse = sqrt(SSE/n).
/// With SST = 0 and SSE > 0 the r² is the −∞ sentinel; with both zero
/// it is 1.
pub fn goodness<S: Scalar>(model: &BetaModel<S>, points: &[BetaPoint<S>]) -> (S, S) {
    assert!(!points.is_empty(), "goodness needs at least one point");
    let n = S::from_count(points.len());
    let mean_b = points.iter().map(|p| p.beta).sum::<S>() / n;
    let mut sse = S::zero();
    let mut sst = S::zero();
    for p in points {
        let resid = p.beta - model.predict(p.c_l_mbps, p.n);
        sse = sse + resid * resid;
        let db = p.beta - mean_b;
        sst = sst + db * db;
    }
    let rmse = (sse / n).sqrt();
    let r_squared = if sst == S::zero() {
        if sse == S::zero() {
            S::one()
        } else {
            S::neg_infinity()
        }
    } else {
        S::one() - sse / sst
    };
    (r_squared, rmse)
}

/// The six published (C_l, n, β) operating points used as fit data.
pub fn published_points<S: Scalar>() -> Vec<BetaPoint<S>> {
    [
        (22.0, 15, 0.96),
        (24.0, 17, 0.95),
        (30.0, 21, 0.94),
        (36.0, 26, 0.87),
        (39.0, 29, 0.84),
        (40.0, 30, 0.83),
    ]
    .into_iter()
    .map(|(c, n, b)| {
        BetaPoint::new(S::from_f64_lit(c), n, S::from_f64_lit(b)).expect("valid point")
    })
    .collect()
}

//! Central moments and the dimensionless shape coefficients derived from them.
//!
//! All moments are taken about the mean, so the mean itself never appears as
//! an input: every abscissa used elsewhere in the crate is a deviation from
//! the mean.

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Default half-width of the band around `2β2 − 3β1 − 6 = 0` in which κ is
/// reported as infinite.
pub const DEFAULT_EPS_KAPPA: f64 = 1e-8;

/// Relative tolerance of the strict check `β2 > β1 + 1`.
pub const VALIDITY_TOLERANCE: f64 = 1e-12;

/// A validated sample of finite observations.
#[derive(Debug, Clone, PartialEq)]
pub struct RawSample {
    values: Vec<f64>,
}

impl RawSample {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::InvalidSample(format!(
                "need at least 2 values, got {}",
                values.len()
            )));
        }
        if let Some((i, v)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::InvalidSample(format!(
                "value #{} is not finite ({v})",
                i + 1
            )));
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Second, third and fourth central moments.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CentralMoments {
    mu2: f64,
    mu3: f64,
    mu4: f64,
}

impl CentralMoments {
    /// Validates `mu2 > 0`, `mu4 > 0` and `β2 > β1 + 1`.
    pub fn new(mu2: f64, mu3: f64, mu4: f64) -> Result<Self> {
        if !(mu2.is_finite() && mu3.is_finite() && mu4.is_finite()) {
            return Err(Error::InvalidMoments(format!(
                "moments must be finite (mu2 = {mu2}, mu3 = {mu3}, mu4 = {mu4})"
            )));
        }
        if mu2 <= 0.0 {
            return Err(Error::InvalidMoments(format!(
                "mu2 must be positive, got {mu2}"
            )));
        }
        if mu4 <= 0.0 {
            return Err(Error::InvalidMoments(format!(
                "mu4 must be positive, got {mu4}"
            )));
        }
        let beta1 = mu3 * mu3 / (mu2 * mu2 * mu2);
        let beta2 = mu4 / (mu2 * mu2);
        if beta2 - beta1 - 1.0 <= VALIDITY_TOLERANCE * beta2.max(1.0) {
            return Err(Error::InvalidMoments(format!(
                "beta2 > beta1 + 1 is violated (beta1 = {beta1}, beta2 = {beta2}); \
                 no probability distribution has these moments"
            )));
        }
        Ok(Self { mu2, mu3, mu4 })
    }

    pub fn mu2(&self) -> f64 {
        self.mu2
    }

    pub fn mu3(&self) -> f64 {
        self.mu3
    }

    pub fn mu4(&self) -> f64 {
        self.mu4
    }

    pub fn std_dev(&self) -> f64 {
        self.mu2.sqrt()
    }

    /// Moments of the reflected variable `−X`.
    pub fn mirrored(&self) -> Self {
        Self {
            mu3: -self.mu3,
            ..*self
        }
    }

    /// Builds moments with unit variance from `(√β1, β2)`.
    pub fn from_shape(sqrt_beta1: f64, beta2: f64) -> Result<Self> {
        Self::new(1.0, sqrt_beta1, beta2)
    }
}

/// The κ-criterion, with the infinite values kept distinct from finite ones.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Kappa {
    Finite(f64),
    PlusInfinity,
    MinusInfinity,
}

impl Kappa {
    pub fn is_infinite(&self) -> bool {
        !matches!(self, Kappa::Finite(_))
    }

    /// The value as an `f64`, mapping the markers to `±f64::INFINITY`.
    pub fn value(&self) -> f64 {
        match *self {
            Kappa::Finite(k) => k,
            Kappa::PlusInfinity => f64::INFINITY,
            Kappa::MinusInfinity => f64::NEG_INFINITY,
        }
    }
}

impl std::fmt::Display for Kappa {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Kappa::Finite(k) => match f.precision() {
                Some(p) => write!(f, "{k:.p$}"),
                None => write!(f, "{k}"),
            },
            Kappa::PlusInfinity => f.write_str("+inf"),
            Kappa::MinusInfinity => f.write_str("-inf"),
        }
    }
}

impl Serialize for Kappa {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Kappa::Finite(k) => serializer.serialize_f64(*k),
            Kappa::PlusInfinity => serializer.serialize_str("+inf"),
            Kappa::MinusInfinity => serializer.serialize_str("-inf"),
        }
    }
}

/// Skewness and kurtosis coefficients plus κ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShapeCoefficients {
    pub sqrt_beta1: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub kappa: Kappa,
}

/// `(μ2, μ3, μ4)` of `values` about their mean, dividing by `n`.
///
/// No validity checks beyond what the arithmetic needs; see
/// [`compute_sample_moments`] for the checked version.
pub fn raw_central_moments(values: &[f64]) -> (f64, f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let (mut s2, mut s3, mut s4) = (0.0, 0.0, 0.0);
    for &x in values {
        let d = x - mean;
        let d2 = d * d;
        s2 += d2;
        s3 += d2 * d;
        s4 += d2 * d2;
    }
    (s2 / n, s3 / n, s4 / n)
}

/// Population central moments of a sample (two passes: mean, then powers).
pub fn compute_sample_moments(sample: &RawSample) -> Result<CentralMoments> {
    let (mu2, mu3, mu4) = raw_central_moments(sample.values());
    if mu2 <= 0.0 {
        return Err(Error::DegenerateSample);
    }
    CentralMoments::new(mu2, mu3, mu4)
}

pub fn shape_from_moments(m: &CentralMoments) -> ShapeCoefficients {
    let sd = m.mu2.sqrt();
    let sqrt_beta1 = m.mu3 / (m.mu2 * sd);
    let beta1 = m.mu3 * m.mu3 / (m.mu2 * m.mu2 * m.mu2);
    let beta2 = m.mu4 / (m.mu2 * m.mu2);
    ShapeCoefficients {
        sqrt_beta1,
        beta1,
        beta2,
        kappa: kappa_criterion(beta1, beta2),
    }
}

/// κ = β1(β2+3)² / [4(4β2−3β1)(2β2−3β1−6)] with the default infinity band.
pub fn kappa_criterion(beta1: f64, beta2: f64) -> Kappa {
    kappa_criterion_with(beta1, beta2, DEFAULT_EPS_KAPPA)
}

/// κ-criterion with an explicit band: when `|2β2−3β1−6| < eps·(1+|2β2|)` and
/// `β1 > 0` the result is infinite, signed like the vanishing factor.
pub fn kappa_criterion_with(beta1: f64, beta2: f64, eps: f64) -> Kappa {
    let numerator = beta1 * (beta2 + 3.0).powi(2);
    if numerator == 0.0 {
        return Kappa::Finite(0.0);
    }
    let vanishing = 2.0 * beta2 - 3.0 * beta1 - 6.0;
    if vanishing.abs() < eps * (1.0 + (2.0 * beta2).abs()) {
        return if vanishing.is_sign_negative() {
            Kappa::MinusInfinity
        } else {
            Kappa::PlusInfinity
        };
    }
    Kappa::Finite(numerator / (4.0 * (4.0 * beta2 - 3.0 * beta1) * vanishing))
}

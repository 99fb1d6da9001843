//! Pearson curves fitted by the method of moments, with probability values
//! and percentage points computed by adaptive numerical integration.
//!
//! ```
//! use pearsonprob::{cdf, fit, CentralMoments, ClassifyTolerances, IntegrationSettings};
//!
//! let m = CentralMoments::new(1.0, 0.0, 3.0).unwrap();
//! let curve = fit(&m, &ClassifyTolerances::default()).unwrap();
//! let r = cdf(&curve, -1.96, &IntegrationSettings::default()).unwrap();
//! assert!((r.p - 0.0249979).abs() < 1e-6);
//! ```

pub mod classify;
pub mod cli;
pub mod error;
pub mod fit;
pub mod moments;
pub mod plot;
pub mod quadrature;

pub use classify::{classify, ClassifyTolerances, PearsonType};
pub use error::{Error, Result};
pub use fit::{fit, fit_as, FittedPearson, Interval, Params};
pub use moments::{
    compute_sample_moments, kappa_criterion, shape_from_moments, CentralMoments, Kappa, RawSample,
    ShapeCoefficients,
};
pub use plot::{render_density_plot, PlotOptions};
pub use quadrature::{cdf, integrate, quantile, Integral, IntegrationSettings, ProbabilityResult};

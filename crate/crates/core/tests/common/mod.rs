//! Shared fixtures for the integration tests.
#![allow(dead_code)]

use pearsonprob::{kappa_criterion, CentralMoments, PearsonType};

/// β2 on the κ = 1 curve for a given β1, by bisection on the κ > 0 branch
/// (κ decreases from +∞ at the Type III line toward β1/32 as β2 grows).
pub fn type_v_beta2(beta1: f64) -> f64 {
    let (mut lo, mut hi) = (1.5 * beta1 + 3.0, 1e6);
    lo += 1e-12 * lo;
    for _ in 0..300 {
        let mid = 0.5 * (lo + hi);
        if kappa_criterion(beta1, mid).value() > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// β2 on the Type III line.
pub fn type_iii_beta2(beta1: f64) -> f64 {
    1.5 * beta1 + 3.0
}

/// `(√β1, β2, expected type)` points covering every family member,
/// including J- and U-shaped curves.
pub fn shape_grid() -> Vec<(f64, f64, PearsonType)> {
    use PearsonType::*;
    let mut g = vec![(0.0, 3.0, Normal)];
    for b2 in [1.2, 1.5, 1.8, 2.2, 2.6, 2.9] {
        g.push((0.0, b2, TypeII));
    }
    for b2 in [3.2, 4.0, 6.0, 8.4, 15.0] {
        g.push((0.0, b2, TypeVII));
    }
    for b1 in [0.05f64, 0.3, 1.0, 2.0, 3.5] {
        g.push((b1.sqrt(), type_iii_beta2(b1), TypeIII));
    }
    for b1 in [0.05f64, 0.3, 1.0, 2.0, 4.0] {
        g.push((b1.sqrt(), type_v_beta2(b1), TypeV));
    }
    for (b1, b2) in [
        (0.36, 3.2),
        (0.507296, 2.935111),
        (0.1, 1.5),
        (0.5, 1.8),
        (1.0, 2.5),
        (1.5, 3.0),
        (2.0, 4.0),
        (0.2, 2.0),
    ] {
        g.push((f64::sqrt(b1), b2, TypeI));
    }
    for (b1, b2) in [
        (0.005366, 3.172912),
        (1.96, 8.6),
        (0.5, 5.0),
        (1.0, 7.0),
        (0.1, 3.5),
        (2.0, 12.0),
    ] {
        g.push((f64::sqrt(b1), b2, TypeIV));
    }
    for (b1, b2) in [
        (0.995360, 4.739349),
        (4.0, 11.2),
        (0.5, 3.8),
        (1.0, 4.6),
        (3.0, 9.0),
        (6.0, 14.0),
    ] {
        g.push((f64::sqrt(b1), b2, TypeVI));
    }
    g
}

pub fn unit_moments(sqrt_beta1: f64, beta2: f64) -> CentralMoments {
    CentralMoments::new(1.0, sqrt_beta1, beta2).unwrap()
}

/// Standard normal CDF through the complementary error function.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * statrs::function::erf::erfc(-x / std::f64::consts::SQRT_2)
}

/// `ln` of the textbook density at the textbook coordinate `z`, written
/// out from the parameter table with no shared code path.
pub fn textbook_log_density(params: &pearsonprob::Params, log_y0: f64, z: f64) -> f64 {
    use pearsonprob::Params::*;
    let k = match *params {
        Normal { mu2, .. } => -z * z / (2.0 * mu2),
        TypeI { a1, a2, m1, m2, .. } => m1 * (1.0 + z / a1).ln() + m2 * (1.0 - z / a2).ln(),
        TypeII { a, m, .. } => m * (1.0 - z * z / (a * a)).ln(),
        TypeIII { a, gamma, .. } => gamma * a * (1.0 + z / a).ln() - gamma * z,
        TypeIV { a, m, nu, .. } => -m * (1.0 + z * z / (a * a)).ln() - nu * (z / a).atan(),
        TypeV { p, gamma, .. } => -p * z.ln() - gamma / z,
        TypeVI { a, q1, q2, .. } => q2 * (z - a).ln() - q1 * z.ln(),
        TypeVII { a, m, .. } => -m * (1.0 + z * z / (a * a)).ln(),
    };
    log_y0 + k
}

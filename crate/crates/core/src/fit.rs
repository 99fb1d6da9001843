//! Method-of-moments fitting of the Pearson curves.
//!
//! Shape parameters come from the classical moment relations in terms of
//! `β1`, `β2` and the auxiliary constant
//!
//! ```text
//! r = 6(β2 − β1 − 1) / (6 + 3β1 − 2β2)      types I, V, VI
//! r = 6(β2 − β1 − 1) / (2β2 − 3β1 − 6)      type IV
//! ```
//!
//! Scale parameters are fixed by `μ2`, the origin shift by the closed-form
//! mean of each canonical curve, and `y0` by numerically integrating the
//! unnormalized curve. Curves are always fitted with `μ3 ≥ 0`; a negative
//! third moment is handled by fitting the reflected moments and mirroring.
//!
//! Coordinates: `x` is measured from the mean of the fitted distribution;
//! `y = ±x` is the same point in the orientation of the fitted (non-negative
//! skew) curve; `z = y − origin_shift` is the coordinate in which the density
//! has its textbook form.

use serde::{Serialize, Serializer};

use crate::classify::{classify, ClassifyTolerances, PearsonType};
use crate::error::{Error, Result};
use crate::moments::{shape_from_moments, CentralMoments, ShapeCoefficients};
use crate::quadrature::{integrate_from_endpoint, integrate_scaled, Integral, IntegrationSettings};

/// Tolerances used for the normalizing integral.
const NORMALIZATION: IntegrationSettings = IntegrationSettings {
    abs_tol: 1e-14,
    rel_tol: 1e-12,
    max_subdivisions: 10_000,
    tail_cut_epsilon: 1e-300,
};

/// A closed or half-open interval in mean-relative coordinates; ends may be
/// infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo && x <= self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

fn serialize_bound<S: Serializer>(v: f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v == f64::INFINITY {
        s.serialize_str("+inf")
    } else if v == f64::NEG_INFINITY {
        s.serialize_str("-inf")
    } else {
        s.serialize_f64(v)
    }
}

impl Serialize for Interval {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeSeq;
        struct Bound(f64);
        impl Serialize for Bound {
            fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                serialize_bound(self.0, s)
            }
        }
        let mut seq = s.serialize_seq(Some(2))?;
        seq.serialize_element(&Bound(self.lo))?;
        seq.serialize_element(&Bound(self.hi))?;
        seq.end()
    }
}

impl std::fmt::Display for Interval {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let show = |v: f64| -> String {
            if v.is_infinite() {
                if v > 0.0 {
                    "+inf".into()
                } else {
                    "-inf".into()
                }
            } else {
                match f.precision() {
                    Some(p) => format!("{v:.p$}"),
                    None => format!("{v}"),
                }
            }
        };
        write!(f, "[{}, {}]", show(self.lo), show(self.hi))
    }
}

/// Density parameters in the textbook form of each curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Params {
    /// `y0·exp(−x²/(2μ2))`
    Normal { y0: f64, mu2: f64 },
    /// `y0·(1 + x/a1)^m1·(1 − x/a2)^m2` on `[−a1, a2]`
    TypeI {
        y0: f64,
        a1: f64,
        a2: f64,
        m1: f64,
        m2: f64,
    },
    /// `y0·(1 − x²/a²)^m` on `[−a, a]`
    TypeII { y0: f64, a: f64, m: f64 },
    /// `y0·(1 + x/a)^(γa)·exp(−γx)` on `[−a, ∞)`
    TypeIII { y0: f64, a: f64, gamma: f64 },
    /// `y0·(1 + x²/a²)^(−m)·exp(−ν·atan(x/a))`
    TypeIV { y0: f64, a: f64, m: f64, nu: f64 },
    /// `y0·x^(−p)·exp(−γ/x)` on `(0, ∞)`
    TypeV { y0: f64, p: f64, gamma: f64 },
    /// `y0·(x − a)^q2·x^(−q1)` on `[a, ∞)`
    TypeVI { y0: f64, a: f64, q1: f64, q2: f64 },
    /// `y0·(1 + x²/a²)^(−m)`
    TypeVII { y0: f64, a: f64, m: f64 },
}

impl Params {
    pub fn y0(&self) -> f64 {
        match *self {
            Params::Normal { y0, .. }
            | Params::TypeI { y0, .. }
            | Params::TypeII { y0, .. }
            | Params::TypeIII { y0, .. }
            | Params::TypeIV { y0, .. }
            | Params::TypeV { y0, .. }
            | Params::TypeVI { y0, .. }
            | Params::TypeVII { y0, .. } => y0,
        }
    }

    /// Parameters as `(name, value)` pairs, in textbook order.
    pub fn named(&self) -> Vec<(&'static str, f64)> {
        match *self {
            Params::Normal { y0, mu2 } => vec![("y0", y0), ("mu2", mu2)],
            Params::TypeI { y0, a1, a2, m1, m2 } => {
                vec![("y0", y0), ("a1", a1), ("a2", a2), ("m1", m1), ("m2", m2)]
            }
            Params::TypeII { y0, a, m } => vec![("y0", y0), ("a", a), ("m", m)],
            Params::TypeIII { y0, a, gamma } => vec![("y0", y0), ("a", a), ("gamma", gamma)],
            Params::TypeIV { y0, a, m, nu } => {
                vec![("y0", y0), ("a", a), ("m", m), ("nu", nu)]
            }
            Params::TypeV { y0, p, gamma } => vec![("y0", y0), ("p", p), ("gamma", gamma)],
            Params::TypeVI { y0, a, q1, q2 } => {
                vec![("y0", y0), ("a", a), ("q1", q1), ("q2", q2)]
            }
            Params::TypeVII { y0, a, m } => vec![("y0", y0), ("a", a), ("m", m)],
        }
    }
}

impl Serialize for Params {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let named = self.named();
        let mut map = s.serialize_map(Some(named.len()))?;
        for (k, v) in named {
            map.serialize_entry(k, &v)?;
        }
        map.end()
    }
}

/// Unnormalized log-density in `z`, before subtracting the reference offset.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Kernel {
    /// `−z²/(2μ2)`
    Gauss { mu2: f64 },
    /// `e_lo·ln((z−lo)/w) + e_hi·ln((hi−z)/w)`, `w = hi − lo`
    Beta {
        lo: f64,
        hi: f64,
        e_lo: f64,
        e_hi: f64,
    },
    /// `p·ln(γ(z−lo)) − γ(z−lo)`
    Gamma { lo: f64, p: f64, rate: f64 },
    /// `−m·ln(1+t²) − ν·atan(t)`, `t = z/a`
    PearsonIV { a: f64, m: f64, nu: f64 },
    /// `−p·ln(z/γ) − γ/z`
    InverseGamma { p: f64, gamma: f64 },
    /// `q2·ln(t) − q1·ln(1+t)`, `t = (z−a)/a`
    BetaPrime { a: f64, q1: f64, q2: f64 },
    /// `−m·ln(1+t²)`, `t = z/a`
    StudentT { a: f64, m: f64 },
}

/// One end of the canonical support.
#[derive(Debug, Clone, Copy, PartialEq)]
enum End {
    Infinite,
    /// Finite end at `at` where the density behaves like `|z − at|^exponent`.
    Finite {
        at: f64,
        exponent: f64,
    },
}

impl Kernel {
    fn log(&self, z: f64) -> f64 {
        match *self {
            Kernel::Gauss { mu2 } => -z * z / (2.0 * mu2),
            Kernel::Beta { lo, hi, e_lo, e_hi } => {
                if z <= lo || z >= hi {
                    return boundary_log(z, lo, hi, e_lo, e_hi);
                }
                let w = hi - lo;
                e_lo * ((z - lo) / w).ln() + e_hi * ((hi - z) / w).ln()
            }
            Kernel::Gamma { lo, p, rate } => {
                let d = z - lo;
                if d <= 0.0 {
                    return power_at_zero(p, d);
                }
                p * (rate * d).ln() - rate * d
            }
            Kernel::PearsonIV { a, m, nu } => {
                let t = z / a;
                -m * (t * t).ln_1p() - nu * t.atan()
            }
            Kernel::InverseGamma { p, gamma } => {
                if z <= 0.0 {
                    return f64::NEG_INFINITY;
                }
                -p * (z / gamma).ln() - gamma / z
            }
            Kernel::BetaPrime { a, q1, q2 } => {
                let t = (z - a) / a;
                if t <= 0.0 {
                    return power_at_zero(q2, t);
                }
                q2 * t.ln() - q1 * t.ln_1p()
            }
            Kernel::StudentT { a, m } => {
                let t = z / a;
                -m * (t * t).ln_1p()
            }
        }
    }

    fn lower(&self) -> End {
        match *self {
            Kernel::Beta { lo, e_lo, .. } => End::Finite {
                at: lo,
                exponent: e_lo,
            },
            Kernel::Gamma { lo, p, .. } => End::Finite {
                at: lo,
                exponent: p,
            },
            Kernel::InverseGamma { .. } => End::Finite {
                at: 0.0,
                exponent: 0.0,
            },
            Kernel::BetaPrime { a, q2, .. } => End::Finite {
                at: a,
                exponent: q2,
            },
            Kernel::Gauss { .. } | Kernel::PearsonIV { .. } | Kernel::StudentT { .. } => {
                End::Infinite
            }
        }
    }

    fn upper(&self) -> End {
        match *self {
            Kernel::Beta { hi, e_hi, .. } => End::Finite {
                at: hi,
                exponent: e_hi,
            },
            _ => End::Infinite,
        }
    }

    /// `log` minus `exponent·ln|z − end|` for the given finite end: the
    /// smooth cofactor of the endpoint power law.
    fn log_cofactor(&self, z: f64, upper: bool) -> f64 {
        match *self {
            Kernel::Beta { lo, hi, e_lo, e_hi } => {
                let w = hi - lo;
                if upper {
                    let d = (z - lo).max(0.0);
                    e_lo * (d / w).ln() - e_hi * w.ln()
                } else {
                    let d = (hi - z).max(0.0);
                    e_hi * (d / w).ln() - e_lo * w.ln()
                }
            }
            Kernel::Gamma { lo, p, rate } => p * rate.ln() - rate * (z - lo).max(0.0),
            Kernel::BetaPrime { a, q1, q2 } => {
                let t = ((z - a) / a).max(0.0);
                -q2 * a.ln() - q1 * t.ln_1p()
            }
            _ => self.log(z),
        }
    }

    /// `ln(textbook form) − log(z)`, constant in `z`.
    fn textbook_offset(&self, params: &Params) -> f64 {
        match (*self, *params) {
            (Kernel::Beta { lo, hi, e_lo, e_hi }, _) => {
                let w = hi - lo;
                e_lo * (w / -lo).ln() + e_hi * (w / hi).ln()
            }
            (Kernel::Gamma { p, rate, .. }, Params::TypeIII { a, .. }) => {
                p * (1.0 - (a * rate).ln())
            }
            (Kernel::InverseGamma { p, gamma }, _) => -p * gamma.ln(),
            (Kernel::BetaPrime { a, q1, q2 }, _) => (q2 - q1) * a.ln(),
            _ => 0.0,
        }
    }
}

fn power_at_zero(exponent: f64, d: f64) -> f64 {
    if d < 0.0 || exponent > 0.0 {
        f64::NEG_INFINITY
    } else if exponent < 0.0 {
        f64::INFINITY
    } else {
        0.0
    }
}

fn boundary_log(z: f64, lo: f64, hi: f64, e_lo: f64, e_hi: f64) -> f64 {
    if z < lo || z > hi {
        f64::NEG_INFINITY
    } else if z == lo {
        power_at_zero(e_lo, 0.0)
    } else {
        power_at_zero(e_hi, 0.0)
    }
}

/// A fitted Pearson curve.
#[derive(Debug, Clone, PartialEq)]
pub struct FittedPearson {
    pearson_type: PearsonType,
    r: Option<f64>,
    params: Params,
    origin_shift: f64,
    support: Interval,
    mirrored: bool,
    moments: CentralMoments,
    shape: ShapeCoefficients,
    kernel: Kernel,
    /// `ln` of the normalized density at `z` is `log_scale + kernel.log(z)`.
    log_scale: f64,
    log_y0: f64,
}

/// Shape-and-scale part of a fit, before normalization.
struct Construction {
    r: Option<f64>,
    kernel: Kernel,
    /// Mean of the canonical curve in `z`.
    mean_z: f64,
    params: Params,
}

fn failure(t: PearsonType, parameter: &'static str, value: f64, reason: &'static str) -> Error {
    Error::FitFailure {
        pearson_type: t,
        parameter,
        value,
        reason,
    }
}

fn require(
    ok: bool,
    t: PearsonType,
    parameter: &'static str,
    value: f64,
    reason: &'static str,
) -> Result<()> {
    if ok && value.is_finite() {
        Ok(())
    } else {
        Err(failure(t, parameter, value, reason))
    }
}

/// Fits the Pearson curve selected by the κ-criterion.
pub fn fit(m: &CentralMoments, tol: &ClassifyTolerances) -> Result<FittedPearson> {
    tol.validate()?;
    let shape = shape_from_moments(m);
    let pearson_type = classify(&shape, tol);
    fit_as(m, pearson_type)
}

/// Fits a specific family member, bypassing classification.
///
/// Only meaningful near the region of `pearson_type`: the transition types
/// use a subset of the moments and reproduce `μ4` only on their boundary.
pub fn fit_as(m: &CentralMoments, pearson_type: PearsonType) -> Result<FittedPearson> {
    let shape = shape_from_moments(m);
    let mirrored = m.mu3() < 0.0;
    let canon = if mirrored { m.mirrored() } else { *m };
    let c = construct(&canon, pearson_type)?;

    let origin_shift = -c.mean_z;
    let reference = c.kernel.log(c.mean_z);
    if !reference.is_finite() {
        return Err(failure(
            pearson_type,
            "density at mean",
            reference,
            "is not finite",
        ));
    }

    let mut fitted = FittedPearson {
        pearson_type,
        r: c.r,
        params: c.params,
        origin_shift,
        support: Interval {
            lo: f64::NEG_INFINITY,
            hi: f64::INFINITY,
        },
        mirrored,
        moments: *m,
        shape,
        kernel: c.kernel,
        log_scale: -reference,
        log_y0: f64::NAN,
    };

    let (zlo, zhi) = (
        end_value(c.kernel.lower(), false),
        end_value(c.kernel.upper(), true),
    );
    let (ylo, yhi) = (zlo + origin_shift, zhi + origin_shift);
    fitted.support = if mirrored {
        Interval { lo: -yhi, hi: -ylo }
    } else {
        Interval { lo: ylo, hi: yhi }
    };

    let one = |_: f64| 1.0;
    let total = fitted.piece(0.0, false, &one, &NORMALIZATION)?
        + fitted.piece(0.0, true, &one, &NORMALIZATION)?;
    if !(total.value > 0.0 && total.value.is_finite()) {
        return Err(failure(
            pearson_type,
            "normalizing integral",
            total.value,
            "is not a positive finite number",
        ));
    }
    fitted.log_scale -= total.value.ln();

    fitted.log_y0 = fitted.log_scale - c.kernel.textbook_offset(&c.params);
    fitted.params = with_y0(c.params, fitted.log_y0.exp());
    Ok(fitted)
}

fn end_value(e: End, upper: bool) -> f64 {
    match e {
        End::Finite { at, .. } => at,
        End::Infinite if upper => f64::INFINITY,
        End::Infinite => f64::NEG_INFINITY,
    }
}

fn with_y0(p: Params, y0: f64) -> Params {
    match p {
        Params::Normal { mu2, .. } => Params::Normal { y0, mu2 },
        Params::TypeI { a1, a2, m1, m2, .. } => Params::TypeI { y0, a1, a2, m1, m2 },
        Params::TypeII { a, m, .. } => Params::TypeII { y0, a, m },
        Params::TypeIII { a, gamma, .. } => Params::TypeIII { y0, a, gamma },
        Params::TypeIV { a, m, nu, .. } => Params::TypeIV { y0, a, m, nu },
        Params::TypeV { p, gamma, .. } => Params::TypeV { y0, p, gamma },
        Params::TypeVI { a, q1, q2, .. } => Params::TypeVI { y0, a, q1, q2 },
        Params::TypeVII { a, m, .. } => Params::TypeVII { y0, a, m },
    }
}

/// Shape and scale parameters for non-negative skew.
fn construct(m: &CentralMoments, t: PearsonType) -> Result<Construction> {
    let s = shape_from_moments(m);
    let (b1, b2) = (s.beta1, s.beta2);
    let sd = m.std_dev();
    let y0 = f64::NAN;

    match t {
        PearsonType::Normal => Ok(Construction {
            r: None,
            kernel: Kernel::Gauss { mu2: m.mu2() },
            mean_z: 0.0,
            params: Params::Normal { y0, mu2: m.mu2() },
        }),

        PearsonType::TypeI => {
            let r = 6.0 * (b2 - b1 - 1.0) / (6.0 + 3.0 * b1 - 2.0 * b2);
            require(r > 0.0, t, "r", r, "must be positive")?;
            let q = b1 * (r + 2.0).powi(2) + 16.0 * (r + 1.0);
            let spread = r * (r + 2.0) * (b1 / q).sqrt();
            let m1 = 0.5 * (r - 2.0 - spread);
            let m2 = 0.5 * (r - 2.0 + spread);
            require(m1 > -1.0, t, "m1", m1, "must exceed -1")?;
            require(m2 > -1.0, t, "m2", m2, "must exceed -1")?;
            let width = 0.5 * sd * q.sqrt();
            require(width > 0.0, t, "a1 + a2", width, "must be positive")?;
            let mean_from_lo = width * (m1 + 1.0) / (m1 + m2 + 2.0);
            // The textbook origin is the stationary point when there is an
            // interior one (a1/m1 = a2/m2); J-shaped curves use the mean.
            let a1 = if m1 * m2 > 0.0 {
                width * m1 / (m1 + m2)
            } else {
                mean_from_lo
            };
            let a2 = width - a1;
            Ok(Construction {
                r: Some(r),
                kernel: Kernel::Beta {
                    lo: -a1,
                    hi: a2,
                    e_lo: m1,
                    e_hi: m2,
                },
                mean_z: mean_from_lo - a1,
                params: Params::TypeI { y0, a1, a2, m1, m2 },
            })
        }

        PearsonType::TypeII => {
            require(b2 < 3.0, t, "beta2", b2, "must be below 3")?;
            let mm = (5.0 * b2 - 9.0) / (2.0 * (3.0 - b2));
            let a = sd * (2.0 * b2 / (3.0 - b2)).sqrt();
            require(mm > -1.0, t, "m", mm, "must exceed -1")?;
            Ok(Construction {
                r: None,
                kernel: Kernel::Beta {
                    lo: -a,
                    hi: a,
                    e_lo: mm,
                    e_hi: mm,
                },
                mean_z: 0.0,
                params: Params::TypeII { y0, a, m: mm },
            })
        }

        PearsonType::TypeIII => {
            require(m.mu3() > 0.0, t, "mu3", m.mu3(), "must be nonzero")?;
            let shape = 4.0 / b1;
            let gamma = 2.0 * m.mu2() / m.mu3();
            let p = shape - 1.0;
            let a = p / gamma;
            require(
                a > 0.0,
                t,
                "a",
                a,
                "must be positive (beta1 >= 4 leaves no interior mode)",
            )?;
            Ok(Construction {
                r: None,
                kernel: Kernel::Gamma {
                    lo: -a,
                    p,
                    rate: gamma,
                },
                mean_z: 1.0 / gamma,
                params: Params::TypeIII { y0, a, gamma },
            })
        }

        PearsonType::TypeIV => {
            let r = 6.0 * (b2 - b1 - 1.0) / (2.0 * b2 - 3.0 * b1 - 6.0);
            require(r > 0.0, t, "r", r, "must be positive")?;
            let mm = 0.5 * (r + 2.0);
            let d = 16.0 * (r - 1.0) - b1 * (r - 2.0).powi(2);
            require(d > 0.0, t, "16(r-1) - beta1(r-2)^2", d, "must be positive")?;
            let nu = -r * (r - 2.0) * b1.sqrt() / d.sqrt();
            let a = 0.25 * sd * d.sqrt();
            require(mm > 0.5, t, "m", mm, "must exceed 1/2")?;
            require(a > 0.0, t, "a", a, "must be positive")?;
            Ok(Construction {
                r: Some(r),
                kernel: Kernel::PearsonIV { a, m: mm, nu },
                mean_z: -a * nu / r,
                params: Params::TypeIV { y0, a, m: mm, nu },
            })
        }

        PearsonType::TypeV => {
            require(b1 > 0.0, t, "beta1", b1, "must be positive")?;
            let r = 6.0 * (b2 - b1 - 1.0) / (6.0 + 3.0 * b1 - 2.0 * b2);
            let p = 4.0 + (8.0 + 4.0 * (4.0 + b1).sqrt()) / b1;
            let gamma = (p - 2.0) * ((p - 3.0) * m.mu2()).sqrt();
            require(p > 1.0, t, "p", p, "must exceed 1")?;
            require(gamma > 0.0, t, "gamma", gamma, "must be positive")?;
            Ok(Construction {
                r: Some(r),
                kernel: Kernel::InverseGamma { p, gamma },
                mean_z: gamma / (p - 2.0),
                params: Params::TypeV { y0, p, gamma },
            })
        }

        PearsonType::TypeVI => {
            let r = 6.0 * (b2 - b1 - 1.0) / (6.0 + 3.0 * b1 - 2.0 * b2);
            require(r < -2.0, t, "r", r, "must be below -2")?;
            let q = b1 * (r + 2.0).powi(2) + 16.0 * (r + 1.0);
            require(q > 0.0, t, "beta1(r+2)^2 + 16(r+1)", q, "must be positive")?;
            let spread = r * (r + 2.0) * (b1 / q).sqrt();
            let q2 = 0.5 * (r - 2.0 + spread);
            let q1 = -0.5 * (r - 2.0 - spread);
            let a = 0.5 * sd * q.sqrt();
            require(q2 > -1.0, t, "q2", q2, "must exceed -1")?;
            require(q1 > q2 + 1.0, t, "q1", q1, "must exceed q2 + 1")?;
            require(a > 0.0, t, "a", a, "must be positive")?;
            require(
                q1 - q2 > 2.0,
                t,
                "q1 - q2",
                q1 - q2,
                "must exceed 2 (finite mean)",
            )?;
            Ok(Construction {
                r: Some(r),
                kernel: Kernel::BetaPrime { a, q1, q2 },
                mean_z: a * (q1 - 1.0) / (q1 - q2 - 2.0),
                params: Params::TypeVI { y0, a, q1, q2 },
            })
        }

        PearsonType::TypeVII => {
            require(b2 > 3.0, t, "beta2", b2, "must exceed 3")?;
            let mm = (5.0 * b2 - 9.0) / (2.0 * (b2 - 3.0));
            let a = sd * (2.0 * b2 / (b2 - 3.0)).sqrt();
            require(mm > 0.5, t, "m", mm, "must exceed 1/2")?;
            Ok(Construction {
                r: None,
                kernel: Kernel::StudentT { a, m: mm },
                mean_z: 0.0,
                params: Params::TypeVII { y0, a, m: mm },
            })
        }
    }
}

impl FittedPearson {
    pub fn pearson_type(&self) -> PearsonType {
        self.pearson_type
    }

    /// Auxiliary constant `r`, for the types whose formulas use it.
    pub fn r(&self) -> Option<f64> {
        self.r
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    /// Position of the textbook origin relative to the mean, in the fitted
    /// (non-negative skew) orientation.
    pub fn origin_shift(&self) -> f64 {
        self.origin_shift
    }

    pub fn support(&self) -> Interval {
        self.support
    }

    /// True when the curve was fitted to `(μ2, −μ3, μ4)` and reflected.
    pub fn mirrored(&self) -> bool {
        self.mirrored
    }

    pub fn moments(&self) -> &CentralMoments {
        &self.moments
    }

    pub fn shape(&self) -> &ShapeCoefficients {
        &self.shape
    }

    /// `ln y0`. Finite even when `y0` itself overflows, as it does for
    /// Type V and VI curves with very large exponents.
    pub fn log_y0(&self) -> f64 {
        self.log_y0
    }

    fn orient(&self, x: f64) -> f64 {
        if self.mirrored {
            -x
        } else {
            x
        }
    }

    /// Density at `x` (a deviation from the mean); zero outside the support.
    pub fn density(&self, x: f64) -> f64 {
        if !self.support.contains(x) {
            return 0.0;
        }
        let z = self.orient(x) - self.origin_shift;
        (self.log_scale + self.kernel.log(z)).exp()
    }

    /// `∫ weight(y)·density dy` from `from` to the lower (`upper = false`) or
    /// upper end of the support, in fitted-orientation coordinates `y`.
    /// `from` must lie inside the support.
    fn piece(
        &self,
        from: f64,
        upper: bool,
        weight: &dyn Fn(f64) -> f64,
        s: &IntegrationSettings,
    ) -> Result<Integral> {
        let shift = self.origin_shift;
        let log_scale = self.log_scale;
        let kernel = self.kernel;
        let end = if upper {
            kernel.upper()
        } else {
            kernel.lower()
        };
        let sd = self.moments.std_dev();
        let signed = |v: Integral| {
            if upper {
                v
            } else {
                Integral {
                    value: -v.value,
                    error_estimate: v.error_estimate,
                }
            }
        };
        match end {
            End::Infinite => {
                let f = |y: f64| weight(y) * (log_scale + kernel.log(y - shift)).exp();
                let target = if upper {
                    f64::INFINITY
                } else {
                    f64::NEG_INFINITY
                };
                integrate_scaled(f, from, target, sd, s).map(signed)
            }
            End::Finite { at, exponent } => {
                let end_y = at + shift;
                let h = |y: f64| {
                    let w = weight(y);
                    if w == 0.0 {
                        return f64::NEG_INFINITY;
                    }
                    // Weights may be negative; fold the sign back in below.
                    log_scale + kernel.log_cofactor(y - shift, upper) + w.abs().ln()
                };
                if weight_changes_sign(weight, end_y, from) {
                    // Split the signed weight into positive and negative parts.
                    let pos = |y: f64| weight(y).max(0.0);
                    let neg = |y: f64| (-weight(y)).max(0.0);
                    let p = self.piece(from, upper, &pos, s)?;
                    let n = self.piece(from, upper, &neg, s)?;
                    return Ok(Integral {
                        value: p.value - n.value,
                        error_estimate: p.error_estimate + n.error_estimate,
                    });
                }
                let sign = weight(0.5 * (end_y + from)).signum();
                let r = integrate_from_endpoint(h, end_y, from, exponent, s)?;
                Ok(Integral {
                    value: sign * r.value,
                    error_estimate: r.error_estimate,
                })
            }
        }
    }

    /// `E[g(X)]`, with `g` a function of the mean-relative `x`.
    pub fn expectation(&self, g: impl Fn(f64) -> f64, s: &IntegrationSettings) -> Result<Integral> {
        let weight = |y: f64| g(self.orient(y));
        let half = s.tightened(0.5);
        Ok(self.piece(0.0, false, &weight, &half)? + self.piece(0.0, true, &weight, &half)?)
    }

    /// `P(X ≤ x)` for `x` inside the support.
    pub(crate) fn lower_tail(&self, x: f64, s: &IntegrationSettings) -> Result<Integral> {
        let one = |_: f64| 1.0;
        let y = self.orient(x);
        // Integrate over the side of the mean that holds less mass and take
        // the complement when needed.
        let s = s.tightened(0.5);
        let (upper, complement) = match (self.mirrored, y <= 0.0) {
            (false, true) => (false, false),
            (false, false) => (true, true),
            (true, true) => (false, true),
            (true, false) => (true, false),
        };
        let part = self.piece(y, upper, &one, &s)?;
        let value = if complement {
            1.0 - part.value
        } else {
            part.value
        };
        Ok(Integral {
            value,
            error_estimate: part.error_estimate + value.abs() * NORMALIZATION.rel_tol,
        })
    }
}

/// Coarse check whether a weight flips sign between `a` and `b`.
fn weight_changes_sign(weight: &dyn Fn(f64) -> f64, a: f64, b: f64) -> bool {
    let (lo, hi) = (a.min(b), a.max(b));
    let n = 64;
    let mut seen_pos = false;
    let mut seen_neg = false;
    for i in 0..=n {
        let y = lo + (hi - lo) * (i as f64 / n as f64);
        let w = weight(y);
        seen_pos |= w > 0.0;
        seen_neg |= w < 0.0;
    }
    seen_pos && seen_neg
}

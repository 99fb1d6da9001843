//! Numerical integration, probability values and quantiles.
//!
//! The engine is a globally adaptive 7/15-point Gauss–Kronrod scheme: the
//! panel with the largest error estimate is bisected until the summed error
//! meets `max(abs_tol, rel_tol·|I|)`. Kronrod nodes never touch the panel
//! ends, so integrable endpoint singularities are never evaluated. Infinite
//! ranges are mapped onto `(0, 1]` with `x = a + s·(1 − t)/t`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fit::FittedPearson;

/// Tolerances and limits for the adaptive integrator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IntegrationSettings {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
    /// Panels of a mapped infinite range whose absolute mass is below this
    /// are accepted without further refinement.
    pub tail_cut_epsilon: f64,
}

impl Default for IntegrationSettings {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-8,
            max_subdivisions: 10_000,
            tail_cut_epsilon: 1e-16,
        }
    }
}

impl IntegrationSettings {
    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol >= 1e-14 && self.abs_tol.is_finite()) {
            return Err(Error::InvalidSettings(format!(
                "abs_tol must be finite and >= 1e-14, got {}",
                self.abs_tol
            )));
        }
        if !(self.rel_tol >= 1e-14 && self.rel_tol.is_finite()) {
            return Err(Error::InvalidSettings(format!(
                "rel_tol must be finite and >= 1e-14, got {}",
                self.rel_tol
            )));
        }
        if self.max_subdivisions == 0 || self.max_subdivisions > 1_000_000 {
            return Err(Error::InvalidSettings(format!(
                "max_subdivisions must lie in 1..=1000000, got {}",
                self.max_subdivisions
            )));
        }
        if self.tail_cut_epsilon.is_nan() || self.tail_cut_epsilon <= 0.0 {
            return Err(Error::InvalidSettings(format!(
                "tail_cut_epsilon must be positive, got {}",
                self.tail_cut_epsilon
            )));
        }
        Ok(())
    }

    pub(crate) fn tightened(&self, factor: f64) -> Self {
        Self {
            abs_tol: self.abs_tol * factor,
            rel_tol: self.rel_tol * factor,
            ..*self
        }
    }
}

/// An integral value with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error_estimate: f64,
}

impl std::ops::Add for Integral {
    type Output = Integral;

    fn add(self, rhs: Integral) -> Integral {
        Integral {
            value: self.value + rhs.value,
            error_estimate: self.error_estimate + rhs.error_estimate,
        }
    }
}

/// A probability value at a percentage point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbabilityResult {
    pub p: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub domain_warning: Option<String>,
    pub error_estimate: f64,
}

// Kronrod abscissae and weights for the 15-point rule; the 7-point Gauss
// rule uses every other abscissa.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    abs_mass: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gauss_kronrod_15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Panel {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let abs_half = half.abs();

    let fc = f(center);
    let mut res_k = fc * WGK[7];
    let mut res_g = fc * WG[3];
    let mut res_abs = fc.abs() * WGK[7];
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];

    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }

    let mean = res_k * 0.5;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }

    let value = res_k * half;
    res_abs *= abs_half;
    res_asc *= abs_half;
    let mut error = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * res_abs);
    }
    Panel {
        a,
        b,
        value,
        error,
        abs_mass: res_abs,
    }
}

/// Adaptive integration over a finite interval.
fn adaptive<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    s: &IntegrationSettings,
    tail_cut: bool,
) -> Result<Integral> {
    let first = gauss_kronrod_15(f, a, b);
    if !first.value.is_finite() || !first.error.is_finite() {
        return Err(Error::NonConvergence {
            value: first.value,
            error_estimate: first.error,
        });
    }
    let mut heap = BinaryHeap::new();
    let mut settled = Integral {
        value: 0.0,
        error_estimate: 0.0,
    };
    let mut total = first.value;
    let mut total_err = first.error;
    heap.push(first);
    let mut subdivisions = 0usize;

    loop {
        let tol = s.abs_tol.max(s.rel_tol * total.abs());
        if total_err <= tol {
            break;
        }
        let Some(worst) = heap.pop() else {
            // Every remaining panel is below the resolution of f64.
            break;
        };
        let mid = 0.5 * (worst.a + worst.b);
        let resolvable = mid > worst.a.min(worst.b) && mid < worst.a.max(worst.b);
        let negligible = tail_cut && worst.abs_mass < s.tail_cut_epsilon;
        if !resolvable || negligible {
            settled.value += worst.value;
            settled.error_estimate += worst.error;
            continue;
        }
        if subdivisions >= s.max_subdivisions {
            heap.push(worst);
            return Err(Error::NonConvergence {
                value: total,
                error_estimate: total_err,
            });
        }
        subdivisions += 1;
        let left = gauss_kronrod_15(f, worst.a, mid);
        let right = gauss_kronrod_15(f, mid, worst.b);
        if !(left.value.is_finite() && right.value.is_finite()) {
            return Err(Error::NonConvergence {
                value: f64::NAN,
                error_estimate: f64::INFINITY,
            });
        }
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }

    // Re-sum to shed the drift of the running totals.
    let mut value = settled.value;
    let mut error_estimate = settled.error_estimate;
    for p in heap.iter() {
        value += p.value;
        error_estimate += p.error;
    }
    let tol = s.abs_tol.max(s.rel_tol * value.abs());
    if error_estimate > tol {
        return Err(Error::NonConvergence {
            value,
            error_estimate,
        });
    }
    Ok(Integral {
        value,
        error_estimate,
    })
}

/// `∫ f` over `[lo, hi]`; either end may be infinite.
///
/// Infinite ends are mapped with unit length scale; see
/// [`integrate_scaled`] to supply the natural scale of the integrand.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    s: &IntegrationSettings,
) -> Result<Integral> {
    integrate_scaled(f, lo, hi, 1.0, s)
}

/// Like [`integrate`], with `scale` as the length unit of the infinite-range map.
pub fn integrate_scaled<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    scale: f64,
    s: &IntegrationSettings,
) -> Result<Integral> {
    integrate_dyn(&f, lo, hi, scale, s)
}

fn integrate_dyn(
    f: &dyn Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    scale: f64,
    s: &IntegrationSettings,
) -> Result<Integral> {
    if lo.is_nan() || hi.is_nan() || scale.is_nan() || scale <= 0.0 {
        return Err(Error::InvalidSettings(format!(
            "bad integration range [{lo}, {hi}] or scale {scale}"
        )));
    }
    if lo == hi {
        return Ok(Integral {
            value: 0.0,
            error_estimate: 0.0,
        });
    }
    if lo > hi {
        let r = integrate_dyn(f, hi, lo, scale, s)?;
        return Ok(Integral {
            value: -r.value,
            error_estimate: r.error_estimate,
        });
    }
    match (lo.is_finite(), hi.is_finite()) {
        (true, true) => adaptive(&f, lo, hi, s, false),
        (true, false) => {
            let g = |t: f64| mapped(f, lo, scale, t);
            adaptive(&g, 0.0, 1.0, s, true)
        }
        (false, true) => {
            let g = |t: f64| mapped(f, hi, -scale, t);
            adaptive(&g, 0.0, 1.0, s, true)
        }
        (false, false) => {
            let half = IntegrationSettings {
                abs_tol: 0.5 * s.abs_tol,
                ..*s
            };
            let left = integrate_dyn(f, f64::NEG_INFINITY, 0.0, scale, &half)?;
            let right = integrate_dyn(f, 0.0, f64::INFINITY, scale, &half)?;
            Ok(left + right)
        }
    }
}

/// Integrand after `x = origin + scale·(1 − t)/t`; a negative scale maps
/// toward −∞.
fn mapped(f: &dyn Fn(f64) -> f64, origin: f64, scale: f64, t: f64) -> f64 {
    let u = (1.0 - t) / t;
    let x = origin + scale * u;
    if !x.is_finite() {
        return 0.0;
    }
    let v = f(x) * scale.abs() / (t * t);
    if v.is_finite() {
        v
    } else {
        0.0
    }
}

/// `∫ |x − end|^e · exp(log_h(x)) dx` between `end` and `other`, for a smooth
/// cofactor `h` and `e > −1`.
///
/// For `e < 1` the substitution `|x − end| = L·u^{1/(e+1)}` absorbs the power
/// law into the Jacobian so the transformed integrand is just `h`.
pub(crate) fn integrate_from_endpoint<H: Fn(f64) -> f64>(
    log_h: H,
    end: f64,
    other: f64,
    exponent: f64,
    s: &IntegrationSettings,
) -> Result<Integral> {
    let length = (other - end).abs();
    if length == 0.0 {
        return Ok(Integral {
            value: 0.0,
            error_estimate: 0.0,
        });
    }
    let dir = (other - end).signum();
    if exponent >= 1.0 || exponent == 0.0 {
        let f = |x: f64| {
            let d = (x - end).abs();
            let lp = if exponent == 0.0 {
                0.0
            } else {
                exponent * d.ln()
            };
            (lp + log_h(x)).exp()
        };
        return integrate(f, end.min(other), end.max(other), s);
    }
    let e1 = exponent + 1.0;
    let log_jac = e1 * length.ln() - e1.ln();
    let f = |u: f64| {
        let x = end + dir * length * u.powf(1.0 / e1);
        (log_jac + log_h(x)).exp()
    };
    integrate(f, 0.0, 1.0, s)
}

/// Brent's bracketing root search on `[a, b]` where `g(a)` and `g(b)` have
/// opposite signs.
pub(crate) fn brent_root<G: FnMut(f64) -> Result<f64>>(
    mut g: G,
    mut a: f64,
    mut b: f64,
    x_tol: f64,
    max_iter: usize,
) -> Result<f64> {
    let mut fa = g(a)?;
    let mut fb = g(b)?;
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::RootNotFound(format!(
            "[{a}, {b}] does not bracket a sign change"
        )));
    }
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    for _ in 0..max_iter {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 2.0 * f64::EPSILON * b.abs() + 0.5 * x_tol;
        let m = 0.5 * (c - b);
        if m.abs() <= tol || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(m) };
        fb = g(b)?;
    }
    Err(Error::RootNotFound(format!(
        "no convergence after {max_iter} iterations (last iterate {b})"
    )))
}

/// Text printed when a percentage point falls outside the support.
pub fn domain_warning(f: &FittedPearson) -> String {
    format!(
        "WARNING: x0 is out of the domain of type {} Pearson distribution",
        f.pearson_type().name()
    )
}

/// `P(X ≤ x0)` for a fitted curve, `x0` measured from the mean.
pub fn cdf(f: &FittedPearson, x0: f64, s: &IntegrationSettings) -> Result<ProbabilityResult> {
    s.validate()?;
    if !x0.is_finite() {
        return Err(Error::InvalidSettings(format!(
            "x0 must be finite, got {x0}"
        )));
    }
    let support = f.support();
    if x0 <= support.lo {
        return Ok(ProbabilityResult {
            p: 0.0,
            domain_warning: Some(domain_warning(f)),
            error_estimate: 0.0,
        });
    }
    if x0 >= support.hi {
        return Ok(ProbabilityResult {
            p: 1.0,
            domain_warning: Some(domain_warning(f)),
            error_estimate: 0.0,
        });
    }
    let r = f.lower_tail(x0, s)?;
    Ok(ProbabilityResult {
        p: r.value.clamp(0.0, 1.0),
        domain_warning: None,
        error_estimate: r.error_estimate,
    })
}

/// Percentage point `x` (from the mean) with `P(X ≤ x) = p`.
pub fn quantile(f: &FittedPearson, p: f64, s: &IntegrationSettings) -> Result<f64> {
    s.validate()?;
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidSettings(format!(
            "probability must lie strictly between 0 and 1, got {p}"
        )));
    }
    let sd = f.moments().std_dev();
    let support = f.support();
    let g = |x: f64| cdf(f, x, s).map(|r| r.p - p);

    let lo = if support.lo.is_finite() {
        support.lo
    } else {
        expand_bracket(&g, -sd, -sd, |v| v <= 0.0)?
    };
    let hi = if support.hi.is_finite() {
        support.hi
    } else {
        expand_bracket(&g, sd, sd, |v| v >= 0.0)?
    };

    let x_tol = 1e-12 * sd;
    let x = brent_root(g, lo, hi, x_tol, 200)?;
    let residual = cdf(f, x, s)?.p - p;
    let allowed = 10.0 * s.abs_tol.max(s.rel_tol);
    if residual.abs() <= allowed {
        return Ok(x);
    }
    // Near an end where the density is infinite the CDF can climb from 0
    // to p inside one resolution step; report the point just inside.
    let (below, above) = (x - 2.0 * x_tol, x + 2.0 * x_tol);
    if cdf(f, below, s)?.p <= p && cdf(f, above, s)?.p >= p {
        let inner = if x <= support.lo {
            support.lo + x_tol
        } else if x >= support.hi {
            support.hi - x_tol
        } else {
            x
        };
        return Ok(inner);
    }
    Err(Error::RootNotFound(format!(
        "cdf({x}) misses p = {p} by {residual:e}"
    )))
}

fn expand_bracket<G: Fn(f64) -> Result<f64>>(
    g: &G,
    start: f64,
    step: f64,
    done: impl Fn(f64) -> bool,
) -> Result<f64> {
    let mut x = start;
    let mut step = step;
    for _ in 0..200 {
        if done(g(x)?) {
            return Ok(x);
        }
        step *= 2.0;
        x += step;
    }
    Err(Error::RootNotFound(format!(
        "could not bracket the quantile (last trial {x})"
    )))
}

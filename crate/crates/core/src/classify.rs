//! Selection of the Pearson family member from (β1, β2, κ).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::moments::{Kappa, ShapeCoefficients};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum PearsonType {
    #[serde(rename = "normal")]
    Normal,
    #[serde(rename = "I")]
    TypeI,
    #[serde(rename = "II")]
    TypeII,
    #[serde(rename = "III")]
    TypeIII,
    #[serde(rename = "IV")]
    TypeIV,
    #[serde(rename = "V")]
    TypeV,
    #[serde(rename = "VI")]
    TypeVI,
    #[serde(rename = "VII")]
    TypeVII,
}

impl PearsonType {
    pub const ALL: [PearsonType; 8] = [
        PearsonType::Normal,
        PearsonType::TypeI,
        PearsonType::TypeII,
        PearsonType::TypeIII,
        PearsonType::TypeIV,
        PearsonType::TypeV,
        PearsonType::TypeVI,
        PearsonType::TypeVII,
    ];

    /// Short name used in output: `normal` or a roman numeral.
    pub fn name(&self) -> &'static str {
        match self {
            PearsonType::Normal => "normal",
            PearsonType::TypeI => "I",
            PearsonType::TypeII => "II",
            PearsonType::TypeIII => "III",
            PearsonType::TypeIV => "IV",
            PearsonType::TypeV => "V",
            PearsonType::TypeVI => "VI",
            PearsonType::TypeVII => "VII",
        }
    }
}

impl std::fmt::Display for PearsonType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Widths of the bands that stand in for the exact equalities of the
/// transition types.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClassifyTolerances {
    /// `β1` below this counts as symmetric (κ = 0).
    pub eps_beta1: f64,
    /// `|κ − 1|` below this selects Type V.
    pub eps_kappa_one: f64,
    /// Relative band around `β2 = 3` for the normal curve.
    pub eps_beta2_normal: f64,
    /// Relative band around `2β2 − 3β1 − 6 = 0` for Type III.
    pub eps_type3: f64,
}

impl Default for ClassifyTolerances {
    fn default() -> Self {
        Self {
            eps_beta1: 1e-8,
            eps_kappa_one: 1e-8,
            eps_beta2_normal: 1e-8,
            eps_type3: 1e-8,
        }
    }
}

impl ClassifyTolerances {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("eps_beta1", self.eps_beta1),
            ("eps_kappa_one", self.eps_kappa_one),
            ("eps_beta2_normal", self.eps_beta2_normal),
            ("eps_type3", self.eps_type3),
        ];
        for (name, v) in fields {
            if !(v > 0.0 && v < 1e-2) {
                return Err(Error::InvalidSettings(format!(
                    "{name} must lie in (0, 1e-2), got {v}"
                )));
            }
        }
        Ok(())
    }
}

/// Distance of `(β1, β2)` from the Type III line, relative to `1 + |2β2|`.
fn type3_offset(beta1: f64, beta2: f64) -> f64 {
    (2.0 * beta2 - 3.0 * beta1 - 6.0).abs() / (1.0 + (2.0 * beta2).abs())
}

/// Picks the family member. Transition types are tested before the main
/// types, Type III first.
pub fn classify(s: &ShapeCoefficients, tol: &ClassifyTolerances) -> PearsonType {
    let symmetric = s.beta1 < tol.eps_beta1;

    if !symmetric && (s.kappa.is_infinite() || type3_offset(s.beta1, s.beta2) < tol.eps_type3) {
        return PearsonType::TypeIII;
    }

    if symmetric {
        let off = s.beta2 - 3.0;
        return if off.abs() < tol.eps_beta2_normal * 3.0 {
            PearsonType::Normal
        } else if off < 0.0 {
            PearsonType::TypeII
        } else {
            PearsonType::TypeVII
        };
    }

    let kappa = match s.kappa {
        Kappa::Finite(k) => k,
        // Unreachable: infinite κ was handled above.
        _ => return PearsonType::TypeIII,
    };
    if (kappa - 1.0).abs() < tol.eps_kappa_one {
        PearsonType::TypeV
    } else if kappa < 0.0 {
        PearsonType::TypeI
    } else if kappa < 1.0 {
        PearsonType::TypeIV
    } else {
        PearsonType::TypeVI
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moments::{kappa_criterion, shape_from_moments, CentralMoments};

    fn shape(beta1: f64, beta2: f64) -> ShapeCoefficients {
        ShapeCoefficients {
            sqrt_beta1: beta1.sqrt(),
            beta1,
            beta2,
            kappa: kappa_criterion(beta1, beta2),
        }
    }

    fn class(beta1: f64, beta2: f64) -> PearsonType {
        classify(&shape(beta1, beta2), &ClassifyTolerances::default())
    }

    #[test]
    fn reference_rows() {
        assert_eq!(class(0.507296, 2.935111), PearsonType::TypeI);
        assert_eq!(class(0.0, 2.6), PearsonType::TypeII);
        assert_eq!(class(0.0, 3.0), PearsonType::Normal);
        assert_eq!(class(0.0, 8.4), PearsonType::TypeVII);
        assert_eq!(class(1.0, 4.5), PearsonType::TypeIII);
        assert_eq!(class(1.96, 8.6), PearsonType::TypeIV);
        assert_eq!(class(4.0, 11.2), PearsonType::TypeVI);
        assert_eq!(class(0.36, 3.2), PearsonType::TypeI);
    }

    #[test]
    fn reference_kappas() {
        assert!((kappa_criterion(1.96, 8.6).value() - 0.4346).abs() < 1e-4);
        assert!((kappa_criterion(4.0, 11.2).value() - 1.3972).abs() < 1e-4);
    }

    #[test]
    fn type_v_band() {
        // On κ = 1: β1(β2+3)² = 4(4β2−3β1)(2β2−3β1−6). Solve for β2 at β1 = 1
        // by bisection on the sign of κ − 1 in the κ > 0 branch.
        let beta1 = 1.0;
        let (mut lo, mut hi) = (4.5 + 1e-6, 100.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if kappa_criterion(beta1, mid).value() > 1.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let beta2 = 0.5 * (lo + hi);
        assert_eq!(class(beta1, beta2), PearsonType::TypeV);
        assert_eq!(class(beta1, beta2 + 1e-3), PearsonType::TypeIV);
        assert_eq!(class(beta1, beta2 - 1e-3), PearsonType::TypeVI);
    }

    #[test]
    fn near_symmetric_bands() {
        assert_eq!(class(1e-10, 3.0 + 1e-9), PearsonType::Normal);
        assert_eq!(class(1e-10, 2.999), PearsonType::TypeII);
        assert_eq!(class(1e-10, 3.001), PearsonType::TypeVII);
        // The symmetric point of the Type III line is normal, not Type III.
        assert_eq!(class(0.0, 3.0), PearsonType::Normal);
    }

    #[test]
    fn mirror_invariance() {
        for (mu3, mu4) in [(0.6, 3.2), (1.4, 8.6), (2.0, 11.2), (0.3, 2.0)] {
            let tol = ClassifyTolerances::default();
            let a = shape_from_moments(&CentralMoments::new(1.0, mu3, mu4).unwrap());
            let b = shape_from_moments(&CentralMoments::new(1.0, -mu3, mu4).unwrap());
            assert_eq!(classify(&a, &tol), classify(&b, &tol));
        }
    }

    #[test]
    fn tolerance_validation() {
        assert!(ClassifyTolerances::default().validate().is_ok());
        let bad = ClassifyTolerances {
            eps_type3: 0.0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let bad = ClassifyTolerances {
            eps_beta1: 0.5,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }
}

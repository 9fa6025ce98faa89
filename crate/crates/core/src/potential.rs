use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Attractive central potentials. Strengths are in units of ħc, lengths in
/// ħ/μc, so V is in units of μc². All three behave as −strength/r at the origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Potential {
    /// −g/r
    Coulomb { strength: f64 },
    /// −g·e^(−r/a)/r
    Yukawa { strength: f64, screening: f64 },
    /// −g·e^(−r/a)/(a(1 − e^(−r/a)))
    Hulthen { strength: f64, screening: f64 },
}

impl Potential {
    pub fn coulomb(strength: f64) -> Result<Self> {
        Self::Coulomb { strength }.validated()
    }

    pub fn yukawa(strength: f64, screening: f64) -> Result<Self> {
        Self::Yukawa { strength, screening }.validated()
    }

    pub fn hulthen(strength: f64, screening: f64) -> Result<Self> {
        Self::Hulthen { strength, screening }.validated()
    }

    pub fn validated(self) -> Result<Self> {
        let g = self.strength();
        if !(g > 0.0 && g.is_finite()) {
            return Err(Error::domain(format!("potential strength must be positive, got {g}")));
        }
        if let Some(a) = self.screening() {
            if !(a > 0.0 && a.is_finite()) {
                return Err(Error::domain(format!("screening length must be positive, got {a}")));
            }
        }
        Ok(self)
    }

    /// Coefficient g of the −g/r behaviour at the origin.
    pub fn strength(&self) -> f64 {
        match *self {
            Self::Coulomb { strength }
            | Self::Yukawa { strength, .. }
            | Self::Hulthen { strength, .. } => strength,
        }
    }

    pub fn screening(&self) -> Option<f64> {
        match *self {
            Self::Coulomb { .. } => None,
            Self::Yukawa { screening, .. } | Self::Hulthen { screening, .. } => Some(screening),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Coulomb { .. } => "coulomb",
            Self::Yukawa { .. } => "yukawa",
            Self::Hulthen { .. } => "hulthen",
        }
    }

    /// The same potential with its strength multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        let mut out = *self;
        match &mut out {
            Self::Coulomb { strength }
            | Self::Yukawa { strength, .. }
            | Self::Hulthen { strength, .. } => *strength *= factor,
        }
        out
    }

    pub fn value(&self, r: f64) -> f64 {
        match *self {
            Self::Coulomb { strength } => -strength / r,
            Self::Yukawa { strength, screening } => -strength * (-r / screening).exp() / r,
            Self::Hulthen { strength, screening } => {
                -strength / (screening * (r / screening).exp_m1())
            }
        }
    }

    pub fn derivative(&self, r: f64) -> f64 {
        match *self {
            Self::Coulomb { strength } => strength / (r * r),
            Self::Yukawa { strength, screening } => {
                strength * (-r / screening).exp() * (1.0 / (r * r) + 1.0 / (screening * r))
            }
            Self::Hulthen { strength, screening } => {
                let s = (0.5 * r / screening).sinh();
                strength / (4.0 * screening * screening * s * s)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn constructors_validate() {
        assert!(Potential::coulomb(0.0).is_err());
        assert!(Potential::yukawa(1.0, -2.0).is_err());
        assert!(Potential::hulthen(f64::NAN, 1.0).is_err());
        assert!(Potential::hulthen(0.5, 2.0).is_ok());
    }

    #[test]
    fn vanish_at_infinity() {
        for p in [
            Potential::coulomb(1.0).unwrap(),
            Potential::yukawa(1.0, 3.0).unwrap(),
            Potential::hulthen(1.0, 3.0).unwrap(),
        ] {
            assert!(p.value(1e6).abs() < 1e-5);
            assert!(p.derivative(1e6).abs() < 1e-11);
        }
    }

    #[test]
    fn serde_shape() {
        let p: Potential = serde_json::from_str(r#"{"kind":"yukawa","strength":0.5,"screening":3.0}"#).unwrap();
        assert_eq!(p, Potential::yukawa(0.5, 3.0).unwrap());
    }

    proptest! {
        #[test]
        fn coulomb_like_at_origin(g in 0.01f64..2.0, a in 0.5f64..50.0) {
            let r = 1e-7 * a;
            for p in [Potential::yukawa(g, a).unwrap(), Potential::hulthen(g, a).unwrap()] {
                prop_assert!((p.value(r) * r / -g - 1.0).abs() < 1e-6);
                prop_assert!((p.derivative(r) * r * r / g - 1.0).abs() < 1e-6);
            }
        }

        #[test]
        fn derivative_matches_finite_difference(g in 0.01f64..2.0, a in 0.5f64..50.0, x in 0.05f64..5.0) {
            let r = x * a;
            for p in [
                Potential::coulomb(g).unwrap(),
                Potential::yukawa(g, a).unwrap(),
                Potential::hulthen(g, a).unwrap(),
            ] {
                let h = 1e-5 * r;
                let fd = (p.value(r + h) - p.value(r - h)) / (2.0 * h);
                prop_assert!((fd / p.derivative(r) - 1.0).abs() < 1e-6);
                // screened potentials are shallower than the bare Coulomb one
                prop_assert!(p.value(r) >= -g / r * (1.0 + 1e-15));
            }
        }
    }
}

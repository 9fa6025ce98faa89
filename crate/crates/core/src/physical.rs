//! Physical constants, particle pairs and the Compton-scale measurement limits.
//!
//! Masses are rest energies in eV. Lengths handed out by this module are in cm,
//! forces in MeV/cm. The solvers elsewhere in the crate run in natural units
//! (ħ = c = μ = 1), and [`Constants`] carries the conversions back.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const FM_PER_CM: f64 = 1.0e13;
const EV_PER_MEV: f64 = 1.0e6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Constants {
    /// Fine-structure constant.
    pub alpha: f64,
    /// m_e c² in eV.
    pub electron_rest_energy_ev: f64,
    /// m_p c² in eV.
    pub proton_rest_energy_ev: f64,
    /// ħc in MeV·fm.
    pub hbar_c_mev_fm: f64,
}

impl Default for Constants {
    fn default() -> Self {
        Self {
            alpha: 7.297_352_569_3e-3,
            electron_rest_energy_ev: 510_998.95,
            proton_rest_energy_ev: 938_272_088.16,
            hbar_c_mev_fm: 197.326_980_4,
        }
    }
}

impl Constants {
    /// Parses a TOML document. Every key is optional and falls back to the
    /// default value; unknown keys are rejected.
    ///
    /// ```toml
    /// alpha = 7.2973525693e-3
    /// electron_rest_energy_ev = 510998.95
    /// proton_rest_energy_ev = 938272088.16
    /// hbar_c_mev_fm = 197.3269804
    /// ```
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let constants: Constants =
            toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        constants.validate()?;
        Ok(constants)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let entries = [
            ("alpha", self.alpha),
            ("electron_rest_energy_ev", self.electron_rest_energy_ev),
            ("proton_rest_energy_ev", self.proton_rest_energy_ev),
            ("hbar_c_mev_fm", self.hbar_c_mev_fm),
        ];
        for (name, value) in entries {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::Config(format!("{name} must be positive, got {value}")));
            }
        }
        if self.alpha >= 1.0 {
            return Err(Error::Config(format!("alpha must be < 1, got {}", self.alpha)));
        }
        Ok(())
    }

    /// Rest energy (eV) of a named particle: `electron` or `proton`.
    pub fn particle_mass(&self, name: &str) -> Option<f64> {
        match name.to_ascii_lowercase().as_str() {
            "electron" | "e" => Some(self.electron_rest_energy_ev),
            "proton" | "p" => Some(self.proton_rest_energy_ev),
            _ => None,
        }
    }

    /// ħc in eV·cm.
    pub fn hbar_c_ev_cm(&self) -> f64 {
        self.hbar_c_mev_fm * EV_PER_MEV / FM_PER_CM
    }

    /// Compton length ħ/mc in cm for a rest energy in eV.
    pub fn compton_length(&self, mass_ev: f64) -> Result<f64> {
        if !(mass_ev > 0.0) {
            return Err(Error::domain(format!("mass must be positive, got {mass_ev}")));
        }
        Ok(self.hbar_c_ev_cm() / mass_ev)
    }

    /// Force (MeV/cm) of the blow that accompanies a coordinate measurement
    /// with accuracy `delta_x_cm`: ħc / (2Δx²).
    pub fn blow_force_coordinate(&self, delta_x_cm: f64) -> Result<f64> {
        if !(delta_x_cm > 0.0) {
            return Err(Error::domain(format!("Δx must be positive, got {delta_x_cm}")));
        }
        Ok(self.hbar_c_ev_cm() / (2.0 * delta_x_cm * delta_x_cm) / EV_PER_MEV)
    }

    /// Force (MeV/cm) of the blow that accompanies a momentum measurement
    /// with accuracy Δp, given as Δp·c in eV: 2c·Δp²/ħ.
    pub fn blow_force_momentum(&self, delta_pc_ev: f64) -> Result<f64> {
        if !(delta_pc_ev > 0.0) {
            return Err(Error::domain(format!("Δp must be positive, got {delta_pc_ev}")));
        }
        Ok(2.0 * delta_pc_ev * delta_pc_ev / self.hbar_c_ev_cm() / EV_PER_MEV)
    }

    /// Converts a length in units of ħ/μc to cm.
    pub fn natural_length_to_cm(&self, length: f64, reduced_mass_ev: f64) -> f64 {
        length * self.hbar_c_ev_cm() / reduced_mass_ev
    }

    /// Converts a force in units of μ²c³/ħ to MeV/cm.
    pub fn natural_force_to_mev_per_cm(&self, force: f64, reduced_mass_ev: f64) -> f64 {
        force * reduced_mass_ev * reduced_mass_ev / self.hbar_c_ev_cm() / EV_PER_MEV
    }
}

/// Two particles of rest energies `m1`, `m2` (eV).
///
/// `m1` may be infinite (a static centre), in which case μ = m2 and μ/M = 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ParticlePair {
    m1: f64,
    m2: f64,
}

impl ParticlePair {
    pub fn new(m1: f64, m2: f64) -> Result<Self> {
        for (name, m) in [("m1", m1), ("m2", m2)] {
            if !(m.is_finite() && m > 0.0) {
                return Err(Error::domain(format!("{name} must be positive and finite, got {m}")));
            }
        }
        Ok(Self { m1, m2 })
    }

    /// A particle of mass `m` bound to an infinitely heavy partner.
    pub fn infinite_partner(m: f64) -> Result<Self> {
        if !(m.is_finite() && m > 0.0) {
            return Err(Error::domain(format!("mass must be positive and finite, got {m}")));
        }
        Ok(Self { m1: f64::INFINITY, m2: m })
    }

    pub fn electron_proton(constants: &Constants) -> Self {
        Self {
            m1: constants.proton_rest_energy_ev,
            m2: constants.electron_rest_energy_ev,
        }
    }

    pub fn m1(&self) -> f64 {
        self.m1
    }

    pub fn m2(&self) -> f64 {
        self.m2
    }

    pub fn is_static_partner(&self) -> bool {
        self.m1.is_infinite()
    }

    /// Reduced mass μ.
    pub fn reduced_mass(&self) -> f64 {
        if self.is_static_partner() {
            self.m2
        } else {
            self.m1 * self.m2 / (self.m1 + self.m2)
        }
    }

    /// Total mass M (infinite for a static partner).
    pub fn total_mass(&self) -> f64 {
        self.m1 + self.m2
    }

    /// μ/M, in [0, 1/4].
    pub fn ratio(&self) -> f64 {
        if self.is_static_partner() {
            0.0
        } else {
            let total = self.m1 + self.m2;
            (self.m1 / total) * (self.m2 / total)
        }
    }

    /// m₁/M.
    pub fn fraction1(&self) -> f64 {
        if self.is_static_partner() {
            1.0
        } else {
            self.m1 / (self.m1 + self.m2)
        }
    }

    /// m₂/M.
    pub fn fraction2(&self) -> f64 {
        if self.is_static_partner() {
            0.0
        } else {
            self.m2 / (self.m1 + self.m2)
        }
    }

    pub fn swapped(&self) -> Result<Self> {
        Self::new(self.m2, self.m1)
    }

    /// Δ₁₂ in units of ħ/μc: √(1 − 2μ/M).
    pub fn delta12_natural(&self) -> f64 {
        (1.0 - 2.0 * self.ratio()).sqrt()
    }

    /// Δ₁₂ in cm: the smallest measurable mean interparticle distance,
    /// (ħ/μc)·√(1 − 2μ/M) = √((ħ/m₁c)² + (ħ/m₂c)²).
    pub fn delta12(&self, constants: &Constants) -> f64 {
        constants.hbar_c_ev_cm() / self.reduced_mass() * self.delta12_natural()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn compton_lengths_match_quoted_values() {
        let c = Constants::default();
        let e = c.compton_length(c.electron_rest_energy_ev).unwrap();
        let p = c.compton_length(c.proton_rest_energy_ev).unwrap();
        assert!(rel(e, 3.86e-11) < 5e-3, "{e}");
        assert!(rel(p, 2.10e-14) < 5e-3, "{p}");
        let half = c.compton_length(2.0 * c.electron_rest_energy_ev).unwrap();
        assert!(rel(half, e / 2.0) < 1e-15);
        assert!(c.compton_length(0.0).is_err());
        assert!(c.compton_length(-1.0).is_err());
    }

    #[test]
    fn blow_forces_match_quoted_values() {
        let c = Constants::default();
        let fe = c
            .blow_force_coordinate(c.compton_length(c.electron_rest_energy_ev).unwrap())
            .unwrap();
        let fp = c
            .blow_force_coordinate(c.compton_length(c.proton_rest_energy_ev).unwrap())
            .unwrap();
        assert!(rel(fe, 6.62e9) < 5e-3, "{fe}");
        assert!(rel(fp, 2.24e16) < 5e-3, "{fp}");
        let dx = 1.0e-10;
        let q = c.blow_force_coordinate(2.0 * dx).unwrap() / c.blow_force_coordinate(dx).unwrap();
        assert!((q - 0.25).abs() < 1e-15);
        assert!(c.blow_force_coordinate(0.0).is_err());
    }

    #[test]
    fn momentum_blow_closes_the_chain() {
        let c = Constants::default();
        let me = c.electron_rest_energy_ev;
        let via_p = c.blow_force_momentum(me / 2.0).unwrap();
        let via_x = c.blow_force_coordinate(c.compton_length(me).unwrap()).unwrap();
        assert!(rel(via_p, via_x) < 1e-14);
        let q = c.blow_force_momentum(2.0).unwrap() / c.blow_force_momentum(1.0).unwrap();
        assert!((q - 4.0).abs() < 1e-14);
        assert!(c.blow_force_momentum(1e-30).unwrap() < 1e-60);
        assert!(c.blow_force_momentum(0.0).is_err());
    }

    #[test]
    fn delta12_limits() {
        let c = Constants::default();
        let me = c.electron_rest_energy_ev;
        let heavy = ParticlePair::new(1e30, me).unwrap();
        assert!(rel(heavy.delta12(&c), c.compton_length(me).unwrap()) < 1e-12);
        let stat = ParticlePair::infinite_partner(me).unwrap();
        assert_eq!(stat.ratio(), 0.0);
        assert!(rel(stat.delta12(&c), c.compton_length(me).unwrap()) < 1e-15);

        let same = ParticlePair::new(me, me).unwrap();
        assert_eq!(same.ratio(), 0.25);
        let mu = same.reduced_mass();
        assert!(rel(same.delta12(&c), c.hbar_c_ev_cm() / mu / 2f64.sqrt()) < 1e-14);

        let ep = ParticlePair::electron_proton(&c);
        let le = c.compton_length(c.electron_rest_energy_ev).unwrap();
        let lp = c.compton_length(c.proton_rest_energy_ev).unwrap();
        assert!(rel(ep.delta12(&c), le.hypot(lp)) < 1e-12);
    }

    #[test]
    fn pair_validation() {
        assert!(ParticlePair::new(0.0, 1.0).is_err());
        assert!(ParticlePair::new(1.0, f64::NAN).is_err());
        assert!(ParticlePair::new(f64::INFINITY, 1.0).is_err());
        assert!(ParticlePair::infinite_partner(-1.0).is_err());
    }

    #[test]
    fn config_overrides_and_rejects() {
        let c = Constants::from_toml_str("alpha = 0.0073\n").unwrap();
        assert_eq!(c.alpha, 0.0073);
        assert_eq!(c.electron_rest_energy_ev, Constants::default().electron_rest_energy_ev);
        assert!(Constants::from_toml_str("alpha = 1.5").is_err());
        assert!(Constants::from_toml_str("hbar_c_mev_fm = -1.0").is_err());
        assert!(Constants::from_toml_str("speed_of_light = 3").is_err());
        assert_eq!(Constants::from_toml_str("").unwrap(), Constants::default());
    }

    mod props {
        use super::super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn pair_invariants(m1 in 1e-3f64..1e9, m2 in 1e-3f64..1e9) {
                let c = Constants::default();
                let p = ParticlePair::new(m1, m2).unwrap();
                let inv = 1.0 / m1 + 1.0 / m2;
                prop_assert!(((1.0 / p.reduced_mass()) - inv).abs() <= 1e-12 * inv);
                prop_assert!(p.ratio() > 0.0 && p.ratio() <= 0.25);
                let q = p.swapped().unwrap();
                let (a, b) = (p.delta12(&c), q.delta12(&c));
                prop_assert!((a - b).abs() <= 1e-12 * a);
                prop_assert!(a <= c.hbar_c_ev_cm() / p.reduced_mass() * (1.0 + 1e-15));
            }

            #[test]
            fn blow_chain_closes(dx in 1e-15f64..1e-5) {
                let c = Constants::default();
                let fx = c.blow_force_coordinate(dx).unwrap();
                let fp = c.blow_force_momentum(c.hbar_c_ev_cm() / (2.0 * dx)).unwrap();
                prop_assert!((fx * dx - fp * dx).abs() <= 1e-12 * fx * dx);
            }
        }
    }
}

//! Closed-form Coulomb solutions of the modified radial equation.
//!
//! For a static nucleus β = 1/(1 + η₀) and the ground state fixes η₀ through
//! η₀/(1 + η₀)⁴ = 4Ω(αZ)³. The left side peaks at η₀ = 1/3 with value 27/256,
//! which is where the bound state disappears.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::physical::{Constants, ParticlePair};

/// Peak of η/(1+η)⁴.
pub const TANGENCY_RHS: f64 = 27.0 / 256.0;
/// η at the peak of η/(1+η)⁴.
pub const CRITICAL_ETA: f64 = 1.0 / 3.0;
/// Ω for a static nucleus.
pub const OMEGA_STATIC: f64 = 32.0 / 729.0;

/// Right-hand sides within this relative distance of the peak are treated as
/// the tangency itself. η is √-sensitive there, so one rounding of the
/// coupling already moves it by ~1e-8.
const TANGENCY_SNAP: f64 = 1e-13;

/// 4Ω(αZ)³.
pub fn eta_equation_rhs(omega: f64, alpha_z: f64) -> f64 {
    4.0 * omega * alpha_z.powi(3)
}

fn validate(omega: f64, alpha_z: f64) -> Result<()> {
    if !(omega >= 0.0 && omega.is_finite()) {
        return Err(Error::domain(format!("omega must be non-negative, got {omega}")));
    }
    if !(alpha_z >= 0.0 && alpha_z.is_finite()) {
        return Err(Error::domain(format!("alpha*Z must be non-negative, got {alpha_z}")));
    }
    Ok(())
}

/// Signed distance from the peak: 27 − 256·rhs. Negative means no solution.
fn discriminant(rhs: f64) -> Result<Option<f64>> {
    let d = 27.0 - 256.0 * rhs;
    if d < -27.0 * TANGENCY_SNAP {
        return Err(Error::NoBoundState(format!(
            "4Ω(αZ)³ = {rhs} exceeds 27/256: the ground state does not exist"
        )));
    }
    Ok((d > 27.0 * TANGENCY_SNAP).then_some(d))
}

// 27(1+η)⁴ − 256η = (3η − 1)²(3η² + 14η + 27), so on either branch
// |3η − 1|·√(3η² + 14η + 27) = (1+η)²·√D with D = 27 − 256·rhs. Both sides
// are free of the cancellation that makes η/(1+η)⁴ = rhs ill-posed near the peak.
fn branch_mismatch(eta: f64, sqrt_d: f64, upper: bool) -> f64 {
    let q = (3.0 * eta * eta + 14.0 * eta + 27.0).sqrt();
    let lin = if upper { 3.0 * eta - 1.0 } else { 1.0 - 3.0 * eta };
    lin * q - (1.0 + eta).powi(2) * sqrt_d
}

// Newton on ln η − 4 ln(1+η) = ln rhs, skipped where the slope (1−3η) is small.
fn polish(eta: f64, rhs: f64, lo: f64, hi: f64) -> f64 {
    let mut e = eta;
    for _ in 0..3 {
        let slope = (1.0 - 3.0 * e) / (e * (1.0 + e));
        if (1.0 - 3.0 * e).abs() < 1e-3 {
            return e;
        }
        let next = e - (e.ln() - 4.0 * e.ln_1p() - rhs.ln()) / slope;
        if !(next > lo && next < hi) {
            return e;
        }
        e = next;
    }
    e
}

fn bisect(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> f64) -> f64 {
    let flo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if (f(mid) > 0.0) == (flo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Smaller root of η/(1+η)⁴ = `rhs` on [0, 1/3].
pub fn solve_eta0_rhs(rhs: f64) -> Result<f64> {
    if !(rhs >= 0.0) {
        return Err(Error::domain(format!("right-hand side must be non-negative, got {rhs}")));
    }
    if rhs == 0.0 {
        return Ok(0.0);
    }
    let Some(d) = discriminant(rhs)? else {
        return Ok(CRITICAL_ETA);
    };
    let sd = d.sqrt();
    let eta = bisect(0.0, CRITICAL_ETA, |e| branch_mismatch(e, sd, false));
    Ok(polish(eta, rhs, 0.0, CRITICAL_ETA))
}

/// The discarded larger root of η/(1+η)⁴ = `rhs` (η ≥ 1/3). `None` for rhs = 0.
pub fn upper_eta_root_rhs(rhs: f64) -> Result<Option<f64>> {
    if !(rhs >= 0.0) {
        return Err(Error::domain(format!("right-hand side must be non-negative, got {rhs}")));
    }
    if rhs == 0.0 {
        return Ok(None);
    }
    let Some(d) = discriminant(rhs)? else {
        return Ok(Some(CRITICAL_ETA));
    };
    let sd = d.sqrt();
    let mut hi = 1.0;
    while branch_mismatch(hi, sd, true) <= 0.0 {
        hi *= 2.0;
        if hi > 1e300 {
            return Err(Error::domain("upper root not bracketed"));
        }
    }
    let eta = bisect(CRITICAL_ETA, hi, |e| branch_mismatch(e, sd, true));
    Ok(Some(polish(eta, rhs, CRITICAL_ETA, f64::INFINITY)))
}

/// Ground-state η₀ = Ωξ₀ for coupling αZ.
pub fn solve_eta0(omega: f64, alpha_z: f64) -> Result<f64> {
    validate(omega, alpha_z)?;
    solve_eta0_rhs(eta_equation_rhs(omega, alpha_z))
}

/// αZ at which 4Ω(αZ)³ = 27/256.
pub fn critical_coupling(omega: f64) -> Result<f64> {
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::domain(format!("omega must be positive, got {omega}")));
    }
    Ok((27.0 / (1024.0 * omega)).cbrt())
}

/// Ground-state binding energy in units of μc²: −(αZ)²(1+η₀)²/2.
pub fn ground_energy_natural(alpha_z: f64, omega: f64) -> Result<f64> {
    let eta = solve_eta0(omega, alpha_z)?;
    Ok(-0.5 * alpha_z * alpha_z * (1.0 + eta).powi(2))
}

fn check_quantum_numbers(z: u32, n: u32, l: u32) -> Result<()> {
    if z == 0 {
        return Err(Error::domain("Z must be ≥ 1"));
    }
    if n == 0 || l >= n {
        return Err(Error::domain(format!("invalid quantum numbers n = {n}, l = {l}")));
    }
    Ok(())
}

/// A level of the hydrogenlike spectrum for a static nucleus (μ = mₑ).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HydrogenicState {
    pub z: u32,
    pub n: u32,
    pub l: u32,
    pub eta0: f64,
    pub beta: f64,
    /// eV
    pub energy: f64,
}

impl HydrogenicState {
    pub fn new(z: u32, n: u32, l: u32, omega: f64, constants: &Constants) -> Result<Self> {
        Self::with_reduced_mass(z, n, l, omega, constants, constants.electron_rest_energy_ev)
    }

    pub fn with_reduced_mass(
        z: u32,
        n: u32,
        l: u32,
        omega: f64,
        constants: &Constants,
        reduced_mass_ev: f64,
    ) -> Result<Self> {
        check_quantum_numbers(z, n, l)?;
        let alpha_z = constants.alpha * f64::from(z);
        let eta0 = solve_eta0(omega, alpha_z)?;
        let nn = f64::from(n);
        let energy = -0.5 * reduced_mass_ev * (alpha_z / nn).powi(2) * (1.0 + eta0).powi(2);
        Ok(Self {
            z,
            n,
            l,
            eta0,
            beta: 1.0 / (1.0 + eta0),
            energy,
        })
    }
}

/// E_nl in eV: −(μc²/2)(αZ/n)²(1 + η₀)², η₀ always from the ground state.
pub fn energy_level(z: u32, n: u32, l: u32, omega: f64, constants: &Constants) -> Result<f64> {
    Ok(HydrogenicState::new(z, n, l, omega, constants)?.energy)
}

/// E(2s) − E(1s) in eV.
pub fn level_gap_1s2s(z: u32, omega: f64, constants: &Constants) -> Result<f64> {
    Ok(energy_level(z, 2, 0, omega, constants)? - energy_level(z, 1, 0, omega, constants)?)
}

/// Ground-state ⟨|r₂ − r₁|⟩ in units of ħ/μc: (3/2)(1/αZ)(1 + η₀)⁻².
pub fn mean_distance_ground_natural(alpha_z: f64, omega: f64) -> Result<f64> {
    if !(alpha_z > 0.0) {
        return Err(Error::domain(format!("alpha*Z must be positive, got {alpha_z}")));
    }
    let eta = solve_eta0(omega, alpha_z)?;
    Ok(1.5 / alpha_z / (1.0 + eta).powi(2))
}

/// Ground-state mean interparticle distance in cm, using the pair's μ.
pub fn mean_distance_ground(
    z: u32,
    omega: f64,
    pair: &ParticlePair,
    constants: &Constants,
) -> Result<f64> {
    check_quantum_numbers(z, 1, 0)?;
    let natural = mean_distance_ground_natural(constants.alpha * f64::from(z), omega)?;
    Ok(constants.natural_length_to_cm(natural, pair.reduced_mass()))
}

/// Normalised Coulomb radial function
/// χ_nl(r) = N r^{l+1} F(−n+l+1, 2l+2, 2r/(n·a)) exp(−r/(n·a))
/// with a = a₀β²/Z the effective Bohr radius.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadialWavefunction {
    pub n: u32,
    pub l: u32,
    pub normalization: f64,
    pub effective_bohr: f64,
}

impl RadialWavefunction {
    /// `bohr_radius` fixes the length unit (1 for Bohr units, 1/α for ħ/μc).
    pub fn new(z: u32, n: u32, l: u32, beta: f64, bohr_radius: f64) -> Result<Self> {
        check_quantum_numbers(z, n, l)?;
        if !(beta > 0.0) || !(bohr_radius > 0.0) {
            return Err(Error::domain("beta and the Bohr radius must be positive"));
        }
        Self::with_effective_bohr(n, l, bohr_radius * beta * beta / f64::from(z))
    }

    pub fn with_effective_bohr(n: u32, l: u32, effective_bohr: f64) -> Result<Self> {
        if n == 0 || l >= n {
            return Err(Error::domain(format!("invalid quantum numbers n = {n}, l = {l}")));
        }
        if !(effective_bohr > 0.0) {
            return Err(Error::domain("effective Bohr radius must be positive"));
        }
        let nn = f64::from(n);
        let two_l1 = 2 * l + 1;
        let norm = (factorial(n + l) / (2.0 * nn * factorial(n - l - 1))).sqrt()
            / factorial(two_l1)
            * (2.0 / (nn * effective_bohr)).powf(f64::from(l) + 1.5);
        Ok(Self {
            n,
            l,
            normalization: norm,
            effective_bohr,
        })
    }

    pub fn eval(&self, r: f64) -> f64 {
        let nn = f64::from(self.n);
        let x = 2.0 * r / (nn * self.effective_bohr);
        let degree = self.n - self.l - 1;
        self.normalization
            * r.powi(self.l as i32 + 1)
            * terminating_hypergeometric(degree, 2 * self.l + 2, x)
            * (-0.5 * x).exp()
    }

    /// Number of radial nodes in (0, ∞).
    pub fn node_count(&self) -> u32 {
        self.n - self.l - 1
    }
}

/// ₁F₁(−k; b; x), a polynomial of degree k.
pub fn terminating_hypergeometric(k: u32, b: u32, x: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    for j in 0..k {
        let jf = f64::from(j);
        term *= (jf - f64::from(k)) / (f64::from(b) + jf) * x / (jf + 1.0);
        sum += term;
    }
    sum
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

/// Ground-state energies of the comparison theories, in units of μc².
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComparisonCurves {
    pub schrodinger: f64,
    /// `None` outside 0 < αZ ≤ 1.
    pub dirac: Option<f64>,
    /// `None` outside 0 < αZ ≤ 1/2.
    pub klein_gordon: Option<f64>,
}

fn check_coupling(alpha_z: f64, max: f64, theory: &str) -> Result<()> {
    if !(alpha_z > 0.0 && alpha_z <= max) {
        return Err(Error::domain(format!(
            "{theory} ground state needs 0 < αZ ≤ {max}, got {alpha_z}"
        )));
    }
    Ok(())
}

pub fn schrodinger_ground(alpha_z: f64) -> Result<f64> {
    check_coupling(alpha_z, f64::INFINITY, "Schrödinger")?;
    Ok(-0.5 * alpha_z * alpha_z)
}

/// √(1 − (αZ)²) − 1
pub fn dirac_ground(alpha_z: f64) -> Result<f64> {
    check_coupling(alpha_z, 1.0, "Dirac")?;
    let x2 = alpha_z * alpha_z;
    Ok(-x2 / (1.0 + (1.0 - x2).sqrt()))
}

/// (1 + (αZ)²/(1/2 + √(1/4 − (αZ)²))²)^(−1/2) − 1
pub fn klein_gordon_ground(alpha_z: f64) -> Result<f64> {
    check_coupling(alpha_z, 0.5, "Klein-Gordon")?;
    let x2 = alpha_z * alpha_z;
    let t = x2 / (0.5 + (0.25 - x2).max(0.0).sqrt()).powi(2);
    let s = (1.0 + t).sqrt();
    Ok(-t / (s * (1.0 + s)))
}

pub fn comparison_curves(alpha_z: f64) -> Result<ComparisonCurves> {
    Ok(ComparisonCurves {
        schrodinger: schrodinger_ground(alpha_z)?,
        dirac: dirac_ground(alpha_z).ok(),
        klein_gordon: klein_gordon_ground(alpha_z).ok(),
    })
}

//! N particles with pairwise coordinate–momentum noncommutativity.
//!
//! With p̂_i = −iħ Σ_k G[i][k] ∇_k the kinetic energy Σ p̂_i²/2m_i equals
//! −(ħ²/2) Σ_kl T_kl ∇_k·∇_l with T = Gᵀ diag(1/m) G. A linear change of
//! coordinates R = J r turns T into J T Jᵀ, so separating the centre of mass
//! is the statement that the last row and column of J T Jᵀ vanish off the
//! diagonal. Everything here uses ħ = 1.

use nalgebra::DMatrix;
use rand::Rng;
use serde::Serialize;

use crate::algebra::{check_representation, CommutatorReport, Representation};
use crate::error::{Error, Result};

/// Ω calibrated for equal masses (μ/M = 1/4).
pub const OMEGA_EQUAL_MASS: f64 = 0.0211547;

const SINGULAR_D: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NBodySystem {
    masses: Vec<f64>,
    /// `eps[i][k]` with [r̂_i, p̂_k] = iħ ε_ik for i ≠ k.
    eps: Vec<Vec<f64>>,
}

impl NBodySystem {
    pub fn new(masses: Vec<f64>, eps: Vec<Vec<f64>>) -> Result<Self> {
        let n = masses.len();
        if n < 2 {
            return Err(Error::domain("an N-body system needs N ≥ 2"));
        }
        if let Some(m) = masses.iter().find(|m| !(**m > 0.0 && m.is_finite())) {
            return Err(Error::domain(format!("masses must be positive, got {m}")));
        }
        if eps.len() != n || eps.iter().any(|row| row.len() != n) {
            return Err(Error::domain("ε table must be N × N"));
        }
        for (i, row) in eps.iter().enumerate() {
            if row[i] != 0.0 {
                return Err(Error::domain(format!("ε_{0}{0} must be zero", i + 1)));
            }
            if row.iter().any(|e| !(e.is_finite() && *e >= 0.0)) {
                return Err(Error::domain(format!("row {} of ε has a negative entry", i + 1)));
            }
            let sum: f64 = row.iter().sum();
            if !(sum < 1.0) {
                return Err(Error::domain(format!(
                    "row {} of ε sums to {sum}; it must stay below 1",
                    i + 1
                )));
            }
        }
        Ok(Self { masses, eps })
    }

    /// N particles of equal mass with ε_ik = ε for all i ≠ k.
    pub fn identical(n: usize, mass: f64, eps: f64) -> Result<Self> {
        let table = (0..n)
            .map(|i| (0..n).map(|k| if i == k { 0.0 } else { eps }).collect())
            .collect();
        Self::new(vec![mass; n], table)
    }

    /// Masses log-uniform in [0.1, 10], off-diagonal ε uniform in [0, max_eps).
    pub fn random<R: Rng + ?Sized>(n: usize, max_eps: f64, rng: &mut R) -> Result<Self> {
        if !(max_eps > 0.0 && max_eps * (n.max(2) - 1) as f64 <= 1.0) {
            return Err(Error::domain("max_eps must be positive with (N − 1)·max_eps ≤ 1"));
        }
        let masses = (0..n).map(|_| 10f64.powf(rng.gen_range(-1.0..1.0))).collect();
        let eps = (0..n)
            .map(|i| {
                (0..n)
                    .map(|k| if i == k { 0.0 } else { rng.gen_range(0.0..max_eps) })
                    .collect()
            })
            .collect();
        Self::new(masses, eps)
    }

    pub fn len(&self) -> usize {
        self.masses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masses.is_empty()
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn eps(&self) -> &[Vec<f64>] {
        &self.eps
    }

    pub fn total_mass(&self) -> f64 {
        self.masses.iter().sum()
    }

    pub fn representation(&self) -> Representation {
        Representation::n_body(&self.eps).expect("validated system")
    }

    /// Expected [r̂_j, p̂_i]/iħ, indexed `[j][i]`.
    pub fn commutator_table(&self) -> Vec<Vec<f64>> {
        let n = self.len();
        (0..n)
            .map(|j| {
                (0..n)
                    .map(|i| {
                        if i == j {
                            1.0 - self.eps[i].iter().sum::<f64>()
                        } else {
                            self.eps[j][i]
                        }
                    })
                    .collect()
            })
            .collect()
    }

    /// Full commutator algebra of the representation on polynomials of
    /// degree ≤ `degree`, including [r̂_j, P̂] = iħ.
    pub fn check_commutators(&self, degree: u32) -> Result<CommutatorReport> {
        check_representation(&self.representation(), &self.commutator_table(), degree)
    }

    /// T = Gᵀ diag(1/m) G.
    pub fn kinetic_matrix(&self) -> DMatrix<f64> {
        let n = self.len();
        let rep = self.representation();
        let g = DMatrix::from_fn(n, n, |i, k| rep.gradients()[i][k]);
        let minv = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            n,
            self.masses.iter().map(|m| 1.0 / m),
        ));
        g.transpose() * minv * g
    }
}

/// Kinetic operator −(ħ²/2) Σ_i [A_i/m_i Δ_i + Σ_{k>i} 2B_ik ∇_i·∇_k].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KineticForm {
    pub a: Vec<f64>,
    /// Symmetric, zero diagonal; units of 1/mass.
    pub b: Vec<Vec<f64>>,
}

pub fn kinetic_coefficients(system: &NBodySystem) -> KineticForm {
    let n = system.len();
    let m = &system.masses;
    let e = &system.eps;
    let a = (0..n)
        .map(|i| {
            let row: f64 = e[i].iter().sum();
            (1.0 - row).powi(2) + (0..n).map(|s| m[i] / m[s] * e[i][s].powi(2)).sum::<f64>()
        })
        .collect();
    let mut b = vec![vec![0.0; n]; n];
    for i in 0..n {
        for k in 0..n {
            if i == k {
                continue;
            }
            let cross: f64 = (0..n)
                .map(|s| {
                    e[k][s] * e[i][s] / m[s] - e[k][i] * e[i][s] / m[i] - e[i][k] * e[k][s] / m[k]
                })
                .sum();
            b[i][k] = e[k][i] / m[i] + e[i][k] / m[k] + cross;
        }
    }
    KineticForm { a, b }
}

impl KineticForm {
    /// The same operator as a symmetric matrix T with diagonal A_i/m_i.
    pub fn matrix(&self, masses: &[f64]) -> DMatrix<f64> {
        let n = self.a.len();
        DMatrix::from_fn(n, n, |i, k| if i == k { self.a[i] / masses[i] } else { self.b[i][k] })
    }
}

/// The parameters a₁, a₂ of the three-body centre-of-mass coordinate.
pub fn jacobi_parameters_3body(system: &NBodySystem) -> Result<(f64, f64)> {
    if system.len() != 3 {
        return Err(Error::domain("three-body parameters need N = 3"));
    }
    let m = system.masses();
    let total = system.total_mass();
    let e = |i: usize, k: usize| system.eps[i - 1][k - 1];
    let (e12, e13, e21, e23, e31, e32) = (e(1, 2), e(1, 3), e(2, 1), e(2, 3), e(3, 1), e(3, 2));
    let d = (-1.0 + e21 + e23) * (-1.0 + e31 + e13)
        + e32 * (-1.0 + e21 + e13)
        + e12 * (-1.0 + e23 + e31 + e32);
    if d.abs() < SINGULAR_D {
        return Err(Error::SingularTransformation(format!("denominator d = {d:e}")));
    }
    let md = total * d;
    let a1 = m[0] / md * (e13 * (1.0 - e21 - e23 - e32))
        + m[0] / md * (e12 * (1.0 - e23 - e31 - e32))
        + m[1] / md * (e21 * (-1.0 + e31 + e32) + e23 * e31)
        + m[2] / md * (e31 * (-1.0 + e21 + e23) + e21 * e32);
    let a2 = m[1] / md * (e21 * (1.0 - e31 - e32 - e13))
        + m[1] / md * (e23 * (1.0 - e31 - e12 - e13))
        + m[0] / md * (e13 * e32 + e12 * (-1.0 + e31 + e32))
        + m[2] / md * (e32 * (-1.0 + e13 + e12) + e12 * e31);
    Ok((a1, a2))
}

/// The two-body parameter (m₁ε₁₂ − m₂ε₂₁)/(Mβ).
pub fn jacobi_parameter_2body(system: &NBodySystem) -> Result<f64> {
    if system.len() != 2 {
        return Err(Error::domain("two-body parameter needs N = 2"));
    }
    let (e12, e21) = (system.eps[0][1], system.eps[1][0]);
    let beta = 1.0 - e12 - e21;
    if beta.abs() < SINGULAR_D {
        return Err(Error::SingularTransformation("β = 0".into()));
    }
    let m = system.masses();
    Ok((m[0] * e12 - m[1] * e21) / (system.total_mass() * beta))
}

/// Rows R_k = (Σ_{s≤k} m_s r_s)/(Σ_{s≤k} m_s) − r_{k+1} for k < N, and
/// R_N = centre of mass + Σ_k a_k (r_k − r_N).
pub fn jacobi_matrix(masses: &[f64], a: &[f64]) -> Result<DMatrix<f64>> {
    let n = masses.len();
    if a.len() + 1 != n {
        return Err(Error::domain(format!("need {} a-parameters, got {}", n - 1, a.len())));
    }
    let total: f64 = masses.iter().sum();
    let mut j = DMatrix::zeros(n, n);
    let mut partial = 0.0;
    for k in 0..n - 1 {
        partial += masses[k];
        for s in 0..=k {
            j[(k, s)] = masses[s] / partial;
        }
        j[(k, k + 1)] = -1.0;
    }
    for s in 0..n {
        j[(n - 1, s)] = masses[s] / total;
    }
    for (k, ak) in a.iter().enumerate() {
        j[(n - 1, k)] += ak;
        j[(n - 1, n - 1)] -= ak;
    }
    if j.determinant().abs() < SINGULAR_D {
        return Err(Error::SingularTransformation("Jacobi matrix is singular".into()));
    }
    Ok(j)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecouplingReport {
    pub n: usize,
    pub a: Vec<f64>,
    /// max_k<N |coefficient of ∇_{R_k}·∇_{R_N}|
    pub residual: f64,
    /// Coefficient of Δ_{R_N}, to be compared with 1/M.
    pub centre_of_mass: f64,
    pub total_mass: f64,
    #[serde(skip)]
    pub transformed: DMatrix<f64>,
}

/// Applies the generalised Jacobi transformation and measures how well the
/// centre-of-mass coordinate decouples. For N > 3 the a-parameters must be
/// supplied.
pub fn transform_and_check_decoupling(
    system: &NBodySystem,
    parameters: Option<&[f64]>,
) -> Result<DecouplingReport> {
    let n = system.len();
    let a = match (parameters, n) {
        (Some(p), _) => p.to_vec(),
        (None, 2) => vec![jacobi_parameter_2body(system)?],
        (None, 3) => {
            let (a1, a2) = jacobi_parameters_3body(system)?;
            vec![a1, a2]
        }
        (None, _) => {
            return Err(Error::domain(format!(
                "a-parameters for N = {n} must be supplied"
            )))
        }
    };
    let j = jacobi_matrix(system.masses(), &a)?;
    let t = kinetic_coefficients(system).matrix(system.masses());
    let transformed = &j * t * j.transpose();
    let residual = (0..n - 1)
        .map(|k| transformed[(k, n - 1)].abs())
        .fold(0.0, f64::max);
    Ok(DecouplingReport {
        n,
        a,
        residual,
        centre_of_mass: transformed[(n - 1, n - 1)],
        total_mass: system.total_mass(),
        transformed,
    })
}

/// ħ²(1 − Nε)²/2m, the kinetic prefactor of every relative normed Jacobi
/// coordinate for N identical particles.
pub fn identical_particle_coefficient(n: usize, eps: f64, mass: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::domain("need N ≥ 2"));
    }
    if !(mass > 0.0) || !(eps >= 0.0) {
        return Err(Error::domain("mass must be positive and ε non-negative"));
    }
    let ne = n as f64 * eps;
    if ne >= 1.0 {
        return Err(Error::DegenerateKinetic(format!("Nε = {ne} ≥ 1")));
    }
    Ok((1.0 - ne).powi(2) / (2.0 * mass))
}

/// Normed Jacobi coordinates: q_k = √(k/(k+1))·(mean of r_1..r_k − r_{k+1}),
/// q_N = Σ r_s/√N. The matrix is orthogonal.
pub fn normed_jacobi_matrix(n: usize) -> DMatrix<f64> {
    let mut q = DMatrix::zeros(n, n);
    for k in 1..n {
        let kf = k as f64;
        let w = (kf / (kf + 1.0)).sqrt();
        for s in 0..k {
            q[(k - 1, s)] = w / kf;
        }
        q[(k - 1, k)] = -w;
    }
    for s in 0..n {
        q[(n - 1, s)] = 1.0 / (n as f64).sqrt();
    }
    q
}

/// Half the diagonal of the transformed kinetic matrix for identical
/// particles, i.e. the prefactors of Δ_{q_1}, …, Δ_{q_N}, together with the
/// largest off-diagonal coefficient.
pub fn identical_particle_transform(n: usize, eps: f64, mass: f64) -> Result<(Vec<f64>, f64)> {
    let system = NBodySystem::identical(n, mass, eps)?;
    let q = normed_jacobi_matrix(n);
    let t = &q * kinetic_coefficients(&system).matrix(system.masses()) * q.transpose();
    let diag = (0..n).map(|k| 0.5 * t[(k, k)]).collect();
    let mut off = 0.0f64;
    for i in 0..n {
        for k in 0..n {
            if i != k {
                off = off.max(t[(i, k)].abs());
            }
        }
    }
    Ok((diag, off))
}

/// ε = κ/(1 + κ).
pub fn identical_eps_from_kappa(kappa: f64) -> Result<f64> {
    if !(kappa >= 0.0 && kappa.is_finite()) {
        return Err(Error::domain(format!("κ must be non-negative, got {kappa}")));
    }
    Ok(kappa / (1.0 + kappa))
}

/// κ = 2Ω⟨|F₁₂|⟩/m²c³ for a pair of identical particles of mass m, from the
/// mean force expressed in units of μ²c³/ħ with μ = m/2 the reduced mass.
pub fn kappa_from_pair_force(omega: f64, mean_abs_force_reduced_units: f64) -> f64 {
    2.0 * omega * mean_abs_force_reduced_units / 4.0
}

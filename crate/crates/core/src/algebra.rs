//! Noncommutativity parameters of the two-body problem and numerical checks
//! of the operator algebra on polynomial test functions.
//!
//! Inside the identity checks ħ = 1. A representation stores, for every
//! particle `i`, the gradient coefficients of its momentum:
//! `p̂_i = −iħ Σ_k G[i][k] ∇_k`. With `r̂_j` acting by multiplication this
//! gives `[r̂_j, p̂_i] = iħ G[i][j]`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::physical::ParticlePair;
use crate::polynomial::{commutator, monomial_basis, LinearOp, Poly};

/// Tolerance for every commutator identity, in units of ħ.
pub const IDENTITY_TOLERANCE: f64 = 1e-12;

const BETA_ZERO: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NoncommParams {
    pub omega: f64,
    pub xi: f64,
    pub eps12: f64,
    pub eps21: f64,
    pub beta: f64,
    /// Ωξ.
    pub eta: f64,
}

impl NoncommParams {
    /// Parameters given directly by ε₁₂, ε₂₁ (Ω, ξ and η are left at zero).
    pub fn from_eps(eps12: f64, eps21: f64) -> Result<Self> {
        for (name, e) in [("eps12", eps12), ("eps21", eps21)] {
            if !(0.0..1.0).contains(&e) {
                return Err(Error::domain(format!("{name} must lie in [0, 1), got {e}")));
            }
        }
        Ok(Self {
            omega: 0.0,
            xi: 0.0,
            eps12,
            eps21,
            beta: 1.0 - eps12 - eps21,
            eta: 0.0,
        })
    }

    /// Expected `[r̂_j, p̂_i] / iħ`, indexed `[j][i]`.
    pub fn commutator_table(&self) -> Vec<Vec<f64>> {
        vec![
            vec![1.0 - self.eps12, self.eps12],
            vec![self.eps21, 1.0 - self.eps21],
        ]
    }
}

/// ε₁₂, ε₂₁ and β from the mean-force parameter ξ.
///
/// ε₁₂ = Ωξ(m₂/M)² / (1 + Ωξ(m₂/M)²), ε₂₁ the same with m₁; β from
/// [`beta_full`].
pub fn eps_from_xi(omega: f64, xi: f64, pair: &ParticlePair) -> Result<NoncommParams> {
    if !(omega >= 0.0 && omega.is_finite()) {
        return Err(Error::domain(format!("omega must be non-negative, got {omega}")));
    }
    if !(xi >= 0.0 && xi.is_finite()) {
        return Err(Error::domain(format!("xi must be non-negative, got {xi}")));
    }
    let eta = omega * xi;
    let s2 = eta * pair.fraction2().powi(2);
    let s1 = eta * pair.fraction1().powi(2);
    Ok(NoncommParams {
        omega,
        xi,
        eps12: s2 / (1.0 + s2),
        eps21: s1 / (1.0 + s1),
        beta: beta_full(omega, xi, pair.ratio()),
        eta,
    })
}

/// β = (1 − Ω²ξ²ρ²) / (1 + Ω²ξ²ρ² + Ωξ(1 − 2ρ)) with ρ = μ/M.
pub fn beta_full(omega: f64, xi: f64, ratio: f64) -> f64 {
    beta_of_eta(omega * xi, ratio)
}

pub(crate) fn beta_of_eta(eta: f64, ratio: f64) -> f64 {
    let q = eta * ratio;
    (1.0 - q * q) / (1.0 + q * q + eta * (1.0 - 2.0 * ratio))
}

/// dβ/dη at fixed ρ.
pub(crate) fn beta_of_eta_derivative(eta: f64, ratio: f64) -> f64 {
    let r2 = ratio * ratio;
    let num = 1.0 - r2 * eta * eta;
    let den = 1.0 + r2 * eta * eta + eta * (1.0 - 2.0 * ratio);
    let dnum = -2.0 * r2 * eta;
    let dden = 2.0 * r2 * eta + (1.0 - 2.0 * ratio);
    (dnum * den - num * dden) / (den * den)
}

/// Momentum gradient coefficients `G[i][k]` for `n` particles.
#[derive(Debug, Clone, PartialEq)]
pub struct Representation {
    gradients: Vec<Vec<f64>>,
}

impl Representation {
    pub fn from_gradients(gradients: Vec<Vec<f64>>) -> Result<Self> {
        let n = gradients.len();
        if n < 2 || gradients.iter().any(|row| row.len() != n) {
            return Err(Error::domain("representation must be a square table with n ≥ 2"));
        }
        Ok(Self { gradients })
    }

    /// p̂₁ = −iħ(1−ε₁₂)∇₁ − iħε₂₁∇₂, p̂₂ = −iħε₁₂∇₁ − iħ(1−ε₂₁)∇₂.
    pub fn two_body(params: &NoncommParams) -> Self {
        Self {
            gradients: vec![
                vec![1.0 - params.eps12, params.eps21],
                vec![params.eps12, 1.0 - params.eps21],
            ],
        }
    }

    /// p̂_i = −iħ(1 − Σ_s ε_is)∇_i − iħ Σ_k ε_ki ∇_k.
    pub fn n_body(eps: &[Vec<f64>]) -> Result<Self> {
        let n = eps.len();
        let mut g = vec![vec![0.0; n]; n];
        for i in 0..n {
            for k in 0..n {
                g[i][k] = if i == k {
                    1.0 - eps[i].iter().sum::<f64>()
                } else {
                    eps[k][i]
                };
            }
        }
        Self::from_gradients(g)
    }

    pub fn particles(&self) -> usize {
        self.gradients.len()
    }

    pub fn gradients(&self) -> &[Vec<f64>] {
        &self.gradients
    }

    pub fn gradients_mut(&mut self) -> &mut [Vec<f64>] {
        &mut self.gradients
    }

    fn coordinate(&self, particle: usize, axis: usize) -> LinearOp {
        LinearOp::Coordinate(3 * particle + axis)
    }

    /// Real part D of p̂ = −iħD for particle `particle`, component `axis`.
    fn momentum(&self, particle: usize, axis: usize) -> LinearOp {
        LinearOp::Gradient(
            self.gradients[particle]
                .iter()
                .enumerate()
                .map(|(k, &c)| (3 * k + axis, c))
                .collect(),
        )
    }

    fn total_momentum(&self, axis: usize) -> LinearOp {
        let n = self.particles();
        LinearOp::Gradient(
            (0..n)
                .map(|k| (3 * k + axis, (0..n).map(|i| self.gradients[i][k]).sum()))
                .collect(),
        )
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct IdentityResidual {
    pub identity: String,
    pub residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CommutatorReport {
    pub degree: u32,
    pub basis_size: usize,
    pub max_residual: f64,
    pub residuals: Vec<IdentityResidual>,
    /// Quantum Poisson brackets {r̂_j, p̂_i} = [r̂_j, p̂_i]/iħ measured on the
    /// constant test function, indexed `[j][i]`.
    pub brackets: Vec<Vec<f64>>,
}

impl CommutatorReport {
    fn push(&mut self, identity: String, residual: f64) {
        self.max_residual = self.max_residual.max(residual);
        self.residuals.push(IdentityResidual { identity, residual });
    }

    fn into_result(self) -> Result<Self> {
        if let Some(worst) = self
            .residuals
            .iter()
            .filter(|r| !(r.residual <= IDENTITY_TOLERANCE))
            .max_by(|a, b| a.residual.total_cmp(&b.residual))
        {
            return Err(Error::IdentityViolation {
                identity: worst.identity.clone(),
                residual: worst.residual,
            });
        }
        Ok(self)
    }
}

const AXES: [&str; 3] = ["x", "y", "z"];

/// Applies the representation to every monomial of degree ≤ `degree` in
/// the 3n coordinates and checks
///
/// * `[r̂_j,a , p̂_i,b] = iħ δ_ab expected[j][i]`
/// * `[r̂_j,a , r̂_k,b] = 0`, `[p̂_i,a , p̂_k,b] = 0`
/// * `[r̂_j,a , P̂_a] = iħ` with P̂ the total momentum.
pub fn check_representation(
    rep: &Representation,
    expected: &[Vec<f64>],
    degree: u32,
) -> Result<CommutatorReport> {
    if degree < 1 {
        return Err(Error::domain("test-function degree must be ≥ 1"));
    }
    let n = rep.particles();
    if expected.len() != n || expected.iter().any(|row| row.len() != n) {
        return Err(Error::domain("expected commutator table has the wrong shape"));
    }
    let basis = monomial_basis(3 * n, degree);
    let mut report = CommutatorReport {
        degree,
        basis_size: basis.len(),
        max_residual: 0.0,
        residuals: Vec::new(),
        brackets: vec![vec![0.0; n]; n],
    };
    let one = Poly::monomial(vec![0; 3 * n], 1.0);

    // [x, p] = −i[x, D]; [x, p] = iħc  ⇔  [x, D] f + c f = 0.
    let coordinate_momentum = |x: &LinearOp, d: &LinearOp, c: f64| {
        basis
            .iter()
            .map(|f| commutator(x, d, f).axpy(c, f).max_abs_coeff())
            .fold(0.0, f64::max)
    };

    for j in 0..n {
        for i in 0..n {
            for a in 0..3 {
                for b in 0..3 {
                    let c = if a == b { expected[j][i] } else { 0.0 };
                    let res = coordinate_momentum(&rep.coordinate(j, a), &rep.momentum(i, b), c);
                    report.push(
                        format!("[{}{}, p{}{}] = iħ·{c}", AXES[a], j + 1, i + 1, AXES[b]),
                        res,
                    );
                }
            }
            let measured = commutator(&rep.coordinate(j, 0), &rep.momentum(i, 0), &one);
            report.brackets[j][i] = -measured.terms().map(|(_, c)| c).sum::<f64>();
        }
    }

    for j in 0..n {
        for a in 0..3 {
            let res = coordinate_momentum(&rep.coordinate(j, a), &rep.total_momentum(a), 1.0);
            report.push(format!("[{}{}, P{}] = iħ", AXES[a], j + 1, AXES[a]), res);
        }
    }

    for j in 0..n {
        for k in 0..n {
            for a in 0..3 {
                for b in 0..3 {
                    if (j, a) >= (k, b) {
                        continue;
                    }
                    let xs = basis
                        .iter()
                        .map(|f| {
                            commutator(&rep.coordinate(j, a), &rep.coordinate(k, b), f)
                                .max_abs_coeff()
                        })
                        .fold(0.0, f64::max);
                    report.push(format!("[{}{}, {}{}] = 0", AXES[a], j + 1, AXES[b], k + 1), xs);
                    // [p, p'] = (−i)²[D, D']
                    let ps = basis
                        .iter()
                        .map(|f| {
                            commutator(&rep.momentum(j, a), &rep.momentum(k, b), f)
                                .max_abs_coeff()
                        })
                        .fold(0.0, f64::max);
                    report.push(format!("[p{}{}, p{}{}] = 0", j + 1, AXES[a], k + 1, AXES[b]), ps);
                }
            }
        }
    }

    report.into_result()
}

/// Builds the two-body representation from `params` and checks the full
/// commutator algebra on polynomials of degree ≤ `degree`.
pub fn check_commutators(params: &NoncommParams, degree: u32) -> Result<CommutatorReport> {
    check_representation(
        &Representation::two_body(params),
        &params.commutator_table(),
        degree,
    )
}

/// Coefficients of L̂ = Σ C_ij [r̂_i × p̂_j].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AngularCoefficients {
    pub c11: f64,
    pub c12: f64,
    pub c21: f64,
    pub c22: f64,
}

impl AngularCoefficients {
    pub fn matrix(&self) -> [[f64; 2]; 2] {
        [[self.c11, self.c12], [self.c21, self.c22]]
    }

    /// Deviations of C·G from the identity, where G is the two-body momentum
    /// gradient table: the coefficient of [r_i × ∇_k] in Σ C_ij [r_i × G_jk ∇_k]
    /// must be δ_ik.
    pub fn reconstruction_residuals(&self, params: &NoncommParams) -> [f64; 4] {
        let g = Representation::two_body(params).gradients;
        let c = self.matrix();
        let mut out = [0.0; 4];
        for i in 0..2 {
            for k in 0..2 {
                let v: f64 = (0..2).map(|j| c[i][j] * g[j][k]).sum();
                out[2 * i + k] = (v - if i == k { 1.0 } else { 0.0 }).abs();
            }
        }
        out
    }
}

pub fn angular_coefficients(params: &NoncommParams) -> Result<AngularCoefficients> {
    let beta = 1.0 - params.eps12 - params.eps21;
    if beta.abs() <= BETA_ZERO {
        return Err(Error::SingularAlgebra(format!(
            "β = 1 − ε₁₂ − ε₂₁ = {beta:e}: angular-momentum coefficients do not exist"
        )));
    }
    Ok(AngularCoefficients {
        c11: (1.0 - params.eps21) / beta,
        c22: (1.0 - params.eps12) / beta,
        c12: -params.eps21 / beta,
        c21: -params.eps12 / beta,
    })
}

/// Applies L̂_z = Σ C_ij (x_i p̂_jy − y_i p̂_jx) to polynomial test functions and
/// compares with −iħ Σ_i (x_i ∂_{y_i} − y_i ∂_{x_i}); returns the largest
/// coefficient deviation (the common −iħ factor cancels).
pub fn angular_momentum_residual(params: &NoncommParams, degree: u32) -> Result<f64> {
    let coeffs = angular_coefficients(params)?.matrix();
    let rep = Representation::two_body(params);
    let basis = monomial_basis(6, degree);
    let mut worst = 0.0f64;
    for f in &basis {
        let mut lhs = Poly::zero(6);
        for (i, row) in coeffs.iter().enumerate() {
            for (j, &c) in row.iter().enumerate() {
                let xi_dy = rep.momentum(j, 1).apply(f).mul_var(3 * i);
                let yi_dx = rep.momentum(j, 0).apply(f).mul_var(3 * i + 1);
                lhs = lhs.axpy(c, &xi_dy.axpy(-1.0, &yi_dx));
            }
        }
        let mut rhs = Poly::zero(6);
        for i in 0..2 {
            rhs = rhs
                .axpy(1.0, &f.derivative(3 * i + 1).mul_var(3 * i))
                .axpy(-1.0, &f.derivative(3 * i).mul_var(3 * i + 1));
        }
        worst = worst.max(lhs.axpy(-1.0, &rhs).max_abs_coeff());
    }
    Ok(worst)
}

/// Coefficients of r₁ and r₂ in the separated free coordinate
/// R = (m₁/M + κ) r₁ + (m₂/M − κ) r₂ with κ = (m₁ε₁₂ − m₂ε₂₁)/(Mβ).
pub fn r_vector_coefficients(params: &NoncommParams, pair: &ParticlePair) -> Result<(f64, f64)> {
    let beta = 1.0 - params.eps12 - params.eps21;
    if beta.abs() <= BETA_ZERO {
        return Err(Error::SingularAlgebra(format!(
            "β = {beta:e}: the free coordinate R is undefined"
        )));
    }
    let kappa = (pair.fraction1() * params.eps12 - pair.fraction2() * params.eps21) / beta;
    Ok((pair.fraction1() + kappa, pair.fraction2() - kappa))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::physical::Constants;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn schrodinger_limit() {
        let pair = ParticlePair::new(2.0, 1.0).unwrap();
        let p = eps_from_xi(0.04, 0.0, &pair).unwrap();
        assert_eq!((p.eps12, p.eps21, p.beta), (0.0, 0.0, 1.0));
        let rep = check_commutators(&p, 3).unwrap();
        assert_eq!(rep.max_residual, 0.0);
        assert_eq!(rep.brackets, vec![vec![1.0, 0.0], vec![0.0, 1.0]]);
    }

    #[test]
    fn beta_full_special_cases() {
        // ρ → 0: β = 1/(1 + Ωξ)
        let b = beta_full(0.5, 0.4, 0.0);
        assert!((b - 1.0 / 1.2).abs() < 1e-15);
        assert_eq!(beta_full(0.3, 0.0, 0.2), 1.0);
        // ρ = 1/4, Ωξ = 4: numerator vanishes
        assert_eq!(beta_full(2.0, 2.0, 0.25), 0.0);
    }

    #[test]
    fn two_routes_to_beta_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let pair = ParticlePair::new(rng.gen_range(0.1..10.0), rng.gen_range(0.1..10.0)).unwrap();
            let omega = rng.gen_range(0.0..0.1);
            let xi = rng.gen_range(0.0..20.0);
            let p = eps_from_xi(omega, xi, &pair).unwrap();
            let direct = 1.0 - p.eps12 - p.eps21;
            assert!((direct - p.beta).abs() <= 1e-12 * p.beta.abs().max(1e-300), "{direct} {}", p.beta);
        }
    }

    #[test]
    fn hydrogen_noncommutativity_magnitudes() {
        let c = Constants::default();
        let pair = ParticlePair::electron_proton(&c);
        let omega = 32.0 / 729.0;
        let eta0 = crate::hydrogenic::solve_eta0(omega, c.alpha).unwrap();
        let p = eps_from_xi(omega, eta0 / omega, &pair).unwrap();
        assert!((p.eps21 / 6.8e-8 - 1.0).abs() < 0.02, "{}", p.eps21);
        assert!((p.eps12 / 2.0e-14 - 1.0).abs() < 0.02, "{}", p.eps12);
    }

    #[test]
    fn random_parameters_satisfy_algebra() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let p = NoncommParams::from_eps(rng.gen_range(0.0..0.4), rng.gen_range(0.0..0.4)).unwrap();
            let rep = check_commutators(&p, 3).unwrap();
            assert!(rep.max_residual < 1e-12);
            assert!((rep.brackets[0][1] - p.eps12).abs() < 1e-15);
            assert!((rep.brackets[1][0] - p.eps21).abs() < 1e-15);
        }
    }

    #[test]
    fn corrupted_representation_is_caught() {
        let p = NoncommParams::from_eps(0.1, 0.2).unwrap();
        let mut rep = Representation::two_body(&p);
        rep.gradients_mut()[1][0] += 1e-6;
        let err = check_representation(&rep, &p.commutator_table(), 2).unwrap_err();
        assert!(matches!(err, Error::IdentityViolation { .. }), "{err}");
    }

    #[test]
    fn angular_coefficients_cases() {
        let zero = NoncommParams::from_eps(0.0, 0.0).unwrap();
        let c = angular_coefficients(&zero).unwrap();
        assert_eq!((c.c11, c.c12, c.c21, c.c22), (1.0, 0.0, 0.0, 1.0));

        let p = NoncommParams::from_eps(0.13, 0.27).unwrap();
        let c = angular_coefficients(&p).unwrap();
        assert!(c.reconstruction_residuals(&p).iter().all(|r| *r < 1e-14));
        assert!(angular_momentum_residual(&p, 3).unwrap() < 1e-13);

        let singular = NoncommParams::from_eps(0.5, 0.5).unwrap();
        assert!(matches!(angular_coefficients(&singular), Err(Error::SingularAlgebra(_))));
        assert!(r_vector_coefficients(&singular, &ParticlePair::new(1.0, 1.0).unwrap()).is_err());
    }

    #[test]
    fn free_coordinate_coefficients() {
        let pair = ParticlePair::new(3.0, 1.0).unwrap();
        let zero = NoncommParams::from_eps(0.0, 0.0).unwrap();
        assert_eq!(r_vector_coefficients(&zero, &pair).unwrap(), (0.75, 0.25));

        let same = ParticlePair::new(1.0, 1.0).unwrap();
        let p = NoncommParams::from_eps(0.2, 0.2).unwrap();
        let (a, b) = r_vector_coefficients(&p, &same).unwrap();
        assert!((a - 0.5).abs() < 1e-15 && (b - 0.5).abs() < 1e-15);

        let p = NoncommParams::from_eps(0.05, 0.3).unwrap();
        let (a, b) = r_vector_coefficients(&p, &pair).unwrap();
        assert!((a + b - 1.0).abs() < 1e-14);
    }

    mod props {
        use super::super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn eps_ratio_and_ordering(m1 in 0.1f64..10.0, m2 in 0.1f64..10.0,
                                      omega in 1e-4f64..0.1, xi in 1e-3f64..20.0) {
                let pair = ParticlePair::new(m1, m2).unwrap();
                let p = eps_from_xi(omega, xi, &pair).unwrap();
                prop_assert!(p.eps12 >= 0.0 && p.eps12 < 1.0 && p.eps21 >= 0.0 && p.eps21 < 1.0);
                let total = m1 + m2;
                let x = omega * xi;
                let expected = (m2 / m1).powi(2) * (1.0 + x * (m1 / total).powi(2))
                    / (1.0 + x * (m2 / total).powi(2));
                prop_assert!((p.eps12 / p.eps21 - expected).abs() <= 1e-12 * expected);
                if m1 > m2 { prop_assert!(p.eps21 > p.eps12); }
            }

            #[test]
            fn beta_decreases_with_xi(omega in 1e-3f64..0.1, xi in 0.0f64..30.0,
                                      dxi in 1e-3f64..5.0, ratio in 0.0f64..0.25) {
                prop_assert!(beta_full(omega, xi + dxi, ratio) < beta_full(omega, xi, ratio));
            }
        }
    }
}

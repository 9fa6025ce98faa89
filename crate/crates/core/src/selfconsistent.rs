//! Self-consistent ground states, where β depends on the mean force in the
//! state it produces, and calibration of Ω against the minimal measurable
//! interparticle distance.

use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{beta_of_eta, beta_of_eta_derivative, eps_from_xi, NoncommParams};
use crate::error::{Error, Result};
use crate::hydrogenic::solve_eta0;
use crate::physical::ParticlePair;
use crate::potential::Potential;
use crate::radial::{solve_bound_state, GridSpec, RadialProblem, RadialSolution};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SelfConsistentOptions {
    /// Initial under-relaxation factor.
    pub damping: f64,
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Starting ξ. Continuation runs pass the previous solution here.
    pub initial_xi: f64,
    /// The loop is abandoned as run-away once Ωξ exceeds this.
    pub eta_cap: f64,
    pub grid: GridSpec,
}

impl Default for SelfConsistentOptions {
    fn default() -> Self {
        Self {
            damping: 0.5,
            tolerance: 1e-10,
            max_iterations: 10_000,
            initial_xi: 0.0,
            eta_cap: 100.0,
            grid: GridSpec::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelfConsistentResult {
    pub params: NoncommParams,
    pub solution: RadialSolution,
    pub iterations: usize,
    /// |ξ_out − ξ_in| / max(ξ_in, 1) at the last iteration.
    pub residual: f64,
    #[serde(skip)]
    pub history: Vec<f64>,
}

impl SelfConsistentResult {
    /// ξ recomputed from the stored solution: 2⟨|dV/dr|⟩.
    pub fn xi_from_solution(&self) -> f64 {
        2.0 * self.solution.mean_abs_force
    }
}

pub fn solve_self_consistent(
    potential: &Potential,
    pair: &ParticlePair,
    omega: f64,
) -> Result<SelfConsistentResult> {
    solve_self_consistent_with(potential, pair, omega, &SelfConsistentOptions::default())
}

pub fn solve_self_consistent_with(
    potential: &Potential,
    pair: &ParticlePair,
    omega: f64,
    options: &SelfConsistentOptions,
) -> Result<SelfConsistentResult> {
    let potential = potential.validated()?;
    if !(options.damping > 0.0 && options.damping <= 1.0) {
        return Err(Error::domain("damping must lie in (0, 1]"));
    }
    let mut xi = options.initial_xi;
    let mut damping = options.damping;
    let mut last_direction = 0.0;
    let mut hint: Option<f64> = None;
    let mut history = Vec::new();
    let mut residual = f64::INFINITY;

    for iteration in 1..=options.max_iterations {
        let params = eps_from_xi(omega, xi, pair)?;
        if params.eta > options.eta_cap {
            return Err(Error::NoBoundState(format!(
                "self-consistent loop ran away (Ωξ = {:.3e} after {iteration} iterations)",
                params.eta
            )));
        }
        if params.beta <= 1e-12 {
            return Err(Error::NoBoundState(format!(
                "β vanished at ξ = {xi:.6e}: no self-consistent state"
            )));
        }
        let mut problem = RadialProblem::new(potential, 0, params.beta)?.with_grid(options.grid)?;
        if let Some(e) = hint {
            problem = problem.with_energy_hint(e);
        }
        let solution = solve_bound_state(&problem, 0).map_err(|e| match e {
            Error::NoBoundState(msg) => {
                Error::NoBoundState(format!("lost the bound state at β = {:.6}: {msg}", params.beta))
            }
            other => other,
        })?;
        let xi_out = 2.0 * solution.mean_abs_force;

        if omega == 0.0 {
            return Ok(SelfConsistentResult {
                params: eps_from_xi(0.0, xi_out, pair)?,
                solution,
                iterations: 1,
                residual: 0.0,
                history,
            });
        }

        residual = (xi_out - xi).abs() / xi.max(1.0);
        history.push(residual);
        if residual <= options.tolerance {
            return Ok(SelfConsistentResult {
                params,
                solution,
                iterations: iteration,
                residual,
                history,
            });
        }
        let direction = (xi_out - xi).signum();
        if last_direction != 0.0 && direction != last_direction {
            damping *= 0.5;
        }
        last_direction = direction;
        xi += damping * (xi_out - xi);

        let next_beta = eps_from_xi(omega, xi, pair)?.beta;
        hint = (next_beta > 0.0)
            .then(|| solution.energy * (params.beta / next_beta).powi(2));
    }
    Err(Error::Convergence {
        iterations: options.max_iterations,
        residual,
        detail: format!("self-consistent loop for the {} potential", potential.name()),
    })
}

/// η = Ωξ at the maximum of η·β(η)⁴, the largest value the Coulomb fixed-point
/// equation η·β(η)⁴ = 4Ω(αZ)³ can reach.
pub fn tangency_eta(ratio: f64) -> Result<f64> {
    check_ratio(ratio)?;
    if ratio == 0.0 {
        return Ok(1.0 / 3.0);
    }
    let slope = |x: f64| beta_of_eta(x, ratio) + 4.0 * x * beta_of_eta_derivative(x, ratio);
    let (mut lo, mut hi) = (0.0, 1.0 / ratio);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if slope(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn check_ratio(ratio: f64) -> Result<()> {
    if !(0.0..=0.25).contains(&ratio) {
        return Err(Error::domain(format!("μ/M must lie in [0, 1/4], got {ratio}")));
    }
    Ok(())
}

/// Closed-form Coulomb ground-state fixed point: the smaller root η of
/// η·β(η)⁴ = 4Ω(αZ)³ with the complete β(η; μ/M).
pub fn coulomb_fixed_point(alpha_z: f64, omega: f64, ratio: f64) -> Result<f64> {
    check_ratio(ratio)?;
    if ratio == 0.0 {
        return solve_eta0(omega, alpha_z);
    }
    if !(alpha_z >= 0.0 && omega >= 0.0) {
        return Err(Error::domain("coupling and omega must be non-negative"));
    }
    let rhs = 4.0 * omega * alpha_z.powi(3);
    let x_star = tangency_eta(ratio)?;
    let h = |x: f64| x * beta_of_eta(x, ratio).powi(4);
    if rhs > h(x_star) {
        return Err(Error::NoBoundState(format!(
            "αZ = {alpha_z} is beyond the critical coupling for Ω = {omega}"
        )));
    }
    let (mut lo, mut hi) = (0.0, x_star);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if h(mid) < rhs {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Result of fixing Ω for one mass ratio. Lengths are in ħ/μc.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OmegaCalibration {
    pub ratio: f64,
    pub omega: f64,
    pub critical_alpha_z: f64,
    pub tangency_eta: f64,
    pub beta: f64,
    pub min_mean_distance: f64,
    /// √(1 − 2μ/M), the minimal measurable distance.
    pub delta12: f64,
    /// ⟨r⟩ of the Numerov solution at the critical point.
    pub grid_mean_distance: f64,
    /// Relative mismatch between 2⟨|dV/dr|⟩ of the Numerov solution and η*/Ω.
    pub grid_xi_mismatch: f64,
}

fn critical_point(omega: f64, h_star: f64, beta: f64) -> (f64, f64) {
    let alpha_z = (h_star / (4.0 * omega)).cbrt();
    (alpha_z, 1.5 * beta * beta / alpha_z)
}

/// Ω for which the smallest ground-state mean distance in a Coulomb field,
/// reached at the critical coupling, equals √(1 − 2μ/M).
pub fn calibrate_omega(ratio: f64) -> Result<OmegaCalibration> {
    check_ratio(ratio)?;
    let x_star = tangency_eta(ratio)?;
    let beta = beta_of_eta(x_star, ratio);
    let h_star = x_star * beta.powi(4);
    let delta12 = (1.0 - 2.0 * ratio).sqrt();
    let mismatch = |omega: f64| critical_point(omega, h_star, beta).1 - delta12;

    let (mut lo, mut hi) = (1e-4, 1.0);
    let mut expansions = 0;
    while mismatch(lo) > 0.0 || mismatch(hi) < 0.0 {
        lo *= 0.1;
        hi *= 10.0;
        expansions += 1;
        if expansions > 20 {
            let sweep: Vec<String> = [1e-6, 1e-4, 1e-2, 1.0, 1e2]
                .iter()
                .map(|&w| format!("Ω = {w:e}: ⟨r⟩ − Δ = {:.3e}", mismatch(w)))
                .collect();
            return Err(Error::Calibration(format!(
                "no bracket for μ/M = {ratio}; {}",
                sweep.join(", ")
            )));
        }
    }
    for _ in 0..300 {
        let mid = (lo * hi).sqrt();
        if mid <= lo || mid >= hi {
            break;
        }
        if mismatch(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let omega = (lo * hi).sqrt();
    let (critical_alpha_z, min_mean_distance) = critical_point(omega, h_star, beta);

    let problem = RadialProblem::new(Potential::coulomb(critical_alpha_z)?, 0, beta)?;
    let solution = solve_bound_state(&problem, 0)?;
    let xi_expected = x_star / omega;
    Ok(OmegaCalibration {
        ratio,
        omega,
        critical_alpha_z,
        tangency_eta: x_star,
        beta,
        min_mean_distance,
        delta12,
        grid_mean_distance: solution.mean_r,
        grid_xi_mismatch: (2.0 * solution.mean_abs_force / xi_expected - 1.0).abs(),
    })
}

/// 32(1 − 2μ/M)/729.
pub fn omega_approximation(ratio: f64) -> f64 {
    32.0 * (1.0 - 2.0 * ratio) / 729.0
}

/// Calibrated Ω sampled uniformly on μ/M ∈ [0, 1/4].
pub fn omega_curve(samples: usize) -> Result<Vec<OmegaCalibration>> {
    if samples < 2 {
        return Err(Error::domain("omega_curve needs at least two samples"));
    }
    (0..samples)
        .into_par_iter()
        .map(|i| calibrate_omega(0.25 * i as f64 / (samples - 1) as f64))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hydrogenic::OMEGA_STATIC;
    use crate::physical::Constants;

    fn static_pair() -> ParticlePair {
        ParticlePair::infinite_partner(1.0).unwrap()
    }

    #[test]
    fn coulomb_loop_reproduces_closed_form() {
        let alpha = Constants::default().alpha;
        for z in [1.0, 40.0, 100.0] {
            let g = alpha * z;
            let r = solve_self_consistent(&Potential::coulomb(g).unwrap(), &static_pair(), OMEGA_STATIC)
                .unwrap();
            let eta = solve_eta0(OMEGA_STATIC, g).unwrap();
            let xi = 4.0 * g.powi(3) * (1.0 + eta).powi(4);
            assert!((r.params.xi - xi).abs() < 1e-9 * xi.max(1.0), "Z = {z}");
            let e = -0.5 * g * g * (1.0 + eta).powi(2);
            assert!((r.solution.energy / e - 1.0).abs() < 1e-8);
            assert!(r.residual <= 1e-10);
            assert!((r.xi_from_solution() - r.params.xi).abs() <= 1e-10 * r.params.xi.max(1.0) * 2.0);
        }
    }

    #[test]
    fn residual_decreases_after_warmup() {
        let g = Constants::default().alpha * 90.0;
        let r = solve_self_consistent(&Potential::yukawa(g, 400.0).unwrap(), &static_pair(), OMEGA_STATIC)
            .unwrap();
        assert!(r.history.len() > 12);
        for w in r.history[10..].windows(2) {
            assert!(w[1] < w[0], "{:?}", w);
        }
    }

    #[test]
    fn zero_omega_is_one_step() {
        let g = 0.2;
        let r = solve_self_consistent(&Potential::coulomb(g).unwrap(), &static_pair(), 0.0).unwrap();
        assert_eq!(r.iterations, 1);
        assert_eq!(r.params.beta, 1.0);
        assert!((r.solution.energy / (-0.5 * g * g) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn beyond_critical_is_no_bound_state() {
        let g = Constants::default().alpha * 120.0;
        let err = solve_self_consistent(&Potential::coulomb(g).unwrap(), &static_pair(), OMEGA_STATIC)
            .unwrap_err();
        assert!(err.is_no_bound_state(), "{err}");
        let pair = ParticlePair::new(1.0, 1.0).unwrap();
        let err = solve_self_consistent(&Potential::coulomb(1.4).unwrap(), &pair, 0.0211547).unwrap_err();
        assert!(err.is_no_bound_state(), "{err}");
    }

    #[test]
    fn finite_mass_loop_matches_full_beta_fixed_point() {
        let pair = ParticlePair::new(3.0, 1.0).unwrap();
        let omega = 0.03;
        let g = 0.5;
        let r = solve_self_consistent(&Potential::coulomb(g).unwrap(), &pair, omega).unwrap();
        let eta = coulomb_fixed_point(g, omega, pair.ratio()).unwrap();
        assert!((r.params.eta / eta - 1.0).abs() < 1e-8);
        let beta = beta_of_eta(eta, pair.ratio());
        assert!((r.solution.energy / (-0.5 * g * g / (beta * beta)) - 1.0).abs() < 1e-8);
    }

    #[test]
    fn tangency_is_the_maximum() {
        for ratio in [0.0, 0.05, 0.1, 0.2, 0.25] {
            let x = tangency_eta(ratio).unwrap();
            let h = |x: f64| x * beta_of_eta(x, ratio).powi(4);
            assert!(h(x) >= h(x * (1.0 + 1e-4)) && h(x) >= h(x * (1.0 - 1e-4)));
        }
        assert!(tangency_eta(0.3).is_err());
    }

    #[test]
    fn calibration_endpoints() {
        let c0 = calibrate_omega(0.0).unwrap();
        assert!((c0.omega / OMEGA_STATIC - 1.0).abs() < 1e-12);
        assert!((c0.critical_alpha_z - 27.0 / 32.0).abs() < 1e-12);
        let c = calibrate_omega(0.25).unwrap();
        assert!((c.omega / 0.0211547 - 1.0).abs() < 1e-5, "{}", c.omega);
        for c in [c0, c] {
            assert!((c.min_mean_distance / c.delta12 - 1.0).abs() < 1e-12);
            assert!((c.grid_mean_distance / c.delta12 - 1.0).abs() < 1e-8);
            assert!(c.grid_xi_mismatch < 1e-8);
        }
    }

    #[test]
    fn calibration_matches_analytic_chain() {
        for ratio in [0.0, 0.07, 0.19] {
            let c = calibrate_omega(ratio).unwrap();
            let x = tangency_eta(ratio).unwrap();
            let b = beta_of_eta(x, ratio);
            let g = 1.5 * b * b / (1.0 - 2.0 * ratio).sqrt();
            let omega = x * b.powi(4) / (4.0 * g.powi(3));
            assert!((c.omega / omega - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn damped_closed_form_iteration_brackets_the_tangency() {
        // x ← x + (s/β(x)⁴ − x)/2 converges below the critical coupling and
        // runs away above it.
        let ratio = 0.25;
        let c = calibrate_omega(ratio).unwrap();
        let run = |alpha_z: f64| {
            let s = 4.0 * c.omega * alpha_z.powi(3);
            let mut x = 0.0;
            for _ in 0..200_000 {
                let b = beta_of_eta(x, ratio);
                if b <= 0.0 {
                    return false;
                }
                let next = x + 0.5 * (s / b.powi(4) - x);
                if (next - x).abs() < 1e-14 {
                    return true;
                }
                x = next;
            }
            false
        };
        assert!(run(c.critical_alpha_z * (1.0 - 1e-4)));
        assert!(!run(c.critical_alpha_z * (1.0 + 1e-4)));
    }

    #[test]
    fn omega_curve_is_monotone_and_close_to_approximation() {
        let curve = omega_curve(26).unwrap();
        assert_eq!(curve.len(), 26);
        assert!(curve.windows(2).all(|w| w[1].omega < w[0].omega));
        let worst = curve
            .iter()
            .map(|c| (omega_approximation(c.ratio) / c.omega - 1.0).abs())
            .fold(0.0, f64::max);
        assert!(worst < 0.08, "{worst}");
        for c in [&curve[0], &curve[25]] {
            assert!((omega_approximation(c.ratio) / c.omega - 1.0).abs() < 0.04);
        }
    }
}

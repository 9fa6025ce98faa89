//! Bound states of the rescaled radial equation
//!
//! ```text
//! −(β²/2) χ'' + [V(r) + β² l(l+1)/(2r²)] χ = E χ
//! ```
//!
//! in units ħ = c = μ = 1. The equation is integrated with Numerov's method on
//! a logarithmic grid x = ln r after the substitution χ = r^(1/2) y, which
//! turns it into y'' = [(l + 1/2)² + (2/β²) r² (V − E)] y.
//!
//! The eigenvalue is bracketed by counting nodes of the outward solution and
//! refined on the sign of that solution at the outer grid edge. The wavefunction is then assembled
//! from an outward and an inward integration matched at the outermost
//! classical turning point.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::potential::Potential;

pub const DEFAULT_POINTS: usize = 20_000;
pub const MIN_POINTS: usize = 1000;
/// Relative width at which eigenvalue bisection stops.
pub const ENERGY_TOLERANCE: f64 = 1e-14;

const RENORM: f64 = 1e200;
const TAIL_LIMIT: f64 = 1e-10;
const MAX_EXTENSIONS: usize = 8;
const MATCH_TOLERANCE: f64 = 1e-3;

/// Radial grid. Unset bounds are derived from the effective Bohr radius
/// a = β²/g and the energy being examined.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSpec {
    pub points: usize,
    pub r_min: Option<f64>,
    pub r_max: Option<f64>,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            points: DEFAULT_POINTS,
            r_min: None,
            r_max: None,
        }
    }
}

impl GridSpec {
    pub fn with_points(points: usize) -> Self {
        Self {
            points,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.points < MIN_POINTS {
            return Err(Error::domain(format!(
                "grid needs at least {MIN_POINTS} points, got {}",
                self.points
            )));
        }
        if let Some(r) = self.r_min {
            if !(r > 0.0 && r.is_finite()) {
                return Err(Error::domain("r_min must be positive"));
            }
        }
        if let Some(r) = self.r_max {
            if !(r.is_finite() && r > self.r_min.unwrap_or(0.0)) {
                return Err(Error::domain("r_max must exceed r_min"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RadialProblem {
    pub potential: Potential,
    pub l: u32,
    /// The kinetic term is β²/2 times the usual one (effective mass μ/β²).
    pub beta: f64,
    pub grid: GridSpec,
    /// Approximate energy used to narrow the initial bracket.
    pub energy_hint: Option<f64>,
}

impl RadialProblem {
    pub fn new(potential: Potential, l: u32, beta: f64) -> Result<Self> {
        let p = Self {
            potential: potential.validated()?,
            l,
            beta,
            grid: GridSpec::default(),
            energy_hint: None,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_grid(mut self, grid: GridSpec) -> Result<Self> {
        grid.validate()?;
        self.grid = grid;
        Ok(self)
    }

    pub fn with_energy_hint(mut self, energy: f64) -> Self {
        self.energy_hint = (energy < 0.0 && energy.is_finite()).then_some(energy);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return Err(Error::domain(format!(
                "kinetic prefactor must be positive (beta = {})",
                self.beta
            )));
        }
        self.potential.validated()?;
        self.grid.validate()
    }

    /// β²/g
    pub fn effective_bohr(&self) -> f64 {
        self.beta * self.beta / self.potential.strength()
    }

    /// Ground-state-like Coulomb energy −g²/(2β²n²), a lower bound for
    /// the screened potentials.
    fn coulomb_energy(&self, nodes: u32) -> f64 {
        let n = f64::from(nodes + self.l + 1);
        let g = self.potential.strength();
        -g * g / (2.0 * self.beta * self.beta * n * n)
    }
}

/// A normalised bound state. Energies are in μc², lengths in ħ/μc.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadialSolution {
    pub energy: f64,
    pub l: u32,
    pub nodes: u32,
    pub beta: f64,
    pub mean_r: f64,
    pub mean_inv_r2: f64,
    pub mean_abs_force: f64,
    pub mean_potential: f64,
    #[serde(skip)]
    pub r: Vec<f64>,
    #[serde(skip)]
    pub chi: Vec<f64>,
    #[serde(skip)]
    step: f64,
}

impl RadialSolution {
    /// Energy in eV for a reduced mass given in eV.
    pub fn energy_ev(&self, reduced_mass_ev: f64) -> f64 {
        self.energy * reduced_mass_ev
    }

    /// ∫ f(r) χ(r)² dr over the solution grid.
    pub fn expectation(&self, f: impl Fn(f64) -> f64) -> Result<f64> {
        let vals: Vec<f64> = self
            .r
            .iter()
            .zip(&self.chi)
            .map(|(&r, &c)| f(r) * c * c)
            .collect();
        integrate(&self.r, self.step, &vals)
    }

    pub fn norm(&self) -> Result<f64> {
        self.expectation(|_| 1.0)
    }
}

/// ∫ χ² |dV/dr| dr.
pub fn mean_abs_force(solution: &RadialSolution, potential: &Potential) -> Result<f64> {
    solution.expectation(|r| potential.derivative(r).abs())
}

struct Grid {
    r: Vec<f64>,
    h: f64,
}

impl Grid {
    fn new(r_min: f64, r_max: f64, points: usize) -> Self {
        let (x0, x1) = (r_min.ln(), r_max.ln());
        let h = (x1 - x0) / (points - 1) as f64;
        let r = (0..points).map(|i| (x0 + i as f64 * h).exp()).collect();
        Self { r, h }
    }

    fn r_max(&self) -> f64 {
        *self.r.last().unwrap()
    }
}

/// ∫ f dr = ∫ f r dx with Simpson's rule on the uniform x grid, plus the
/// piece below r[0] from a power-law fit f ∝ r^p.
fn integrate(r: &[f64], h: f64, f: &[f64]) -> Result<f64> {
    let n = r.len();
    let g = |i: usize| f[i] * r[i];
    let simpson = |a: usize, b: usize| {
        let mut s = g(a) + g(b);
        for i in a + 1..b {
            s += g(i) * if (i - a) % 2 == 1 { 4.0 } else { 2.0 };
        }
        s * h / 3.0
    };
    let body = if (n - 1) % 2 == 0 {
        simpson(0, n - 1)
    } else {
        simpson(0, n - 4) + 3.0 * h / 8.0 * (g(n - 4) + 3.0 * g(n - 3) + 3.0 * g(n - 2) + g(n - 1))
    };
    let tail = if f[0] == 0.0 {
        0.0
    } else {
        let ratio = f[1] / f[0];
        if !(ratio > 0.0) {
            return Err(Error::Quadrature("integrand changes sign at the origin".into()));
        }
        let p = ratio.ln() / h;
        if p <= -1.0 + 1e-6 {
            return Err(Error::Quadrature(format!(
                "integrand behaves as r^{p:.3} at the origin"
            )));
        }
        f[0] * r[0] / (p + 1.0)
    };
    let total = body + tail;
    if !total.is_finite() {
        return Err(Error::Quadrature("non-finite integral".into()));
    }
    Ok(total)
}

struct Sweep {
    nodes: u32,
    last: f64,
    renorms: i32,
}

struct Numerov<'a> {
    problem: &'a RadialProblem,
    grid: Grid,
    /// (l + 1/2)² + (2/β²) r² V
    q0: Vec<f64>,
    /// (2/β²) r²
    kr2: Vec<f64>,
    v: Vec<f64>,
}

impl<'a> Numerov<'a> {
    fn new(problem: &'a RadialProblem, grid: Grid) -> Self {
        let k = 2.0 / (problem.beta * problem.beta);
        let lh = f64::from(problem.l) + 0.5;
        let v: Vec<f64> = grid.r.iter().map(|&r| problem.potential.value(r)).collect();
        let kr2: Vec<f64> = grid.r.iter().map(|&r| k * r * r).collect();
        let q0 = kr2.iter().zip(&v).map(|(a, v)| lh * lh + a * v).collect();
        Self {
            problem,
            grid,
            q0,
            kr2,
            v,
        }
    }

    fn q(&self, i: usize, energy: f64) -> f64 {
        self.q0[i] - self.kr2[i] * energy
    }

    fn start(&self) -> (f64, f64) {
        let p = self.problem;
        let c = -p.potential.strength() * 2.0 / (p.beta * p.beta) / (2.0 * f64::from(p.l + 1));
        let lh = f64::from(p.l) + 0.5;
        let r = &self.grid.r;
        let y = |i: usize| (r[i] / r[0]).powf(lh) * (1.0 + c * r[i]);
        (y(0), y(1))
    }

    /// Numerov sweep from `from` towards `to` (either direction) in the summed
    /// form u = (1 − h²Q/12) y, Δ²u = h² Q y, which keeps round-off from
    /// growing quadratically with the number of steps. Calls `visit(i, y_i, k)`
    /// where y_i·RENORM^k is the unrenormalised value.
    fn march(
        &self,
        energy: f64,
        from: usize,
        to: usize,
        start: (f64, f64),
        mut visit: impl FnMut(usize, f64, i32),
    ) -> Sweep {
        let h2 = self.grid.h * self.grid.h;
        let step = |i: usize| if to >= from { i + 1 } else { i - 1 };
        let mut i = step(from);
        let (mut y_prev, mut y) = start;
        let mut q = self.q(i, energy);
        let mut u = (1.0 - h2 * q / 12.0) * y;
        let mut d = u - (1.0 - h2 * self.q(from, energy) / 12.0) * y_prev;
        let mut renorms = 0;
        let mut nodes = 0;
        visit(from, y_prev, renorms);
        visit(i, y, renorms);
        while i != to {
            d += h2 * q * y;
            u += d;
            i = step(i);
            q = self.q(i, energy);
            // the reciprocal does not depend on y, keeping the division off
            // the recurrence's critical path
            let inv_w = 1.0 / (1.0 - h2 * q / 12.0);
            let mut y_next = u * inv_w;
            if y_next.abs() > RENORM {
                y_next /= RENORM;
                u /= RENORM;
                d /= RENORM;
                y /= RENORM;
                y_prev /= RENORM;
                renorms += 1;
            }
            if y_next * y < 0.0 || (y == 0.0 && y_next * y_prev < 0.0) {
                nodes += 1;
            }
            visit(i, y_next, renorms);
            (y_prev, y) = (y, y_next);
        }
        Sweep {
            nodes,
            last: y,
            renorms,
        }
    }

    fn shoot(&self, energy: f64) -> Sweep {
        let last = self.grid.r.len() - 1;
        self.march(energy, 0, last, self.start(), |_, _, _| {})
    }

    fn count_nodes(&self, energy: f64) -> u32 {
        self.shoot(energy).nodes
    }

    /// Narrows a node-count bracket to the eigenvalue with `node_target` nodes.
    /// Bisection isolates a single sign change of the outward solution at
    /// r_max in a narrow window, then Illinois regula falsi converges on it.
    fn refine(&self, mut lo: f64, mut hi: f64, node_target: u32) -> f64 {
        let mut s_lo = self.shoot(lo);
        let mut s_hi = self.shoot(hi);
        for _ in 0..400 {
            if s_lo.nodes == node_target
                && s_hi.nodes == node_target + 1
                && hi - lo <= 1e-4 * hi.abs()
            {
                break;
            }
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                return mid;
            }
            let s = self.shoot(mid);
            if s.nodes > node_target {
                (hi, s_hi) = (mid, s);
            } else {
                (lo, s_lo) = (mid, s);
            }
        }
        let reference = s_lo.renorms;
        let value = |s: &Sweep| s.last * RENORM.powi(s.renorms - reference);
        let (mut f_lo, mut f_hi) = (value(&s_lo), value(&s_hi));
        let mut side = 0;
        for _ in 0..200 {
            if hi - lo <= ENERGY_TOLERANCE * hi.abs() {
                break;
            }
            let mut c = (lo * f_hi - hi * f_lo) / (f_hi - f_lo);
            if !(c > lo && c < hi) {
                c = 0.5 * (lo + hi);
            }
            let s = self.shoot(c);
            let fc = value(&s);
            if fc == 0.0 {
                return c;
            }
            if (fc > 0.0) == (f_lo > 0.0) && s.nodes <= node_target {
                (lo, f_lo) = (c, fc);
                if side == -1 {
                    f_hi *= 0.5;
                }
                side = -1;
            } else {
                (hi, f_hi) = (c, fc);
                if side == 1 {
                    f_lo *= 0.5;
                }
                side = 1;
            }
        }
        0.5 * (lo + hi)
    }

    /// Matched wavefunction y on the grid for an energy at (or extremely near)
    /// an eigenvalue. Returns y and the relative derivative mismatch.
    fn wavefunction(&self, energy: f64) -> Result<(Vec<f64>, f64)> {
        let n = self.grid.r.len();
        let turning = (0..n)
            .rev()
            .find(|&i| self.q(i, energy) < 0.0)
            .ok_or_else(|| Error::NoBoundState("no classically allowed region".into()))?;
        let m = turning.clamp(4, n - 4);

        let mut out = vec![0.0; m + 2];
        let mut out_scale = vec![0; m + 2];
        self.march(energy, 0, m + 1, self.start(), |i, v, s| {
            out[i] = v;
            out_scale[i] = s;
        });
        let mut inw = vec![0.0; n];
        let mut in_scale = vec![0; n];
        self.march(energy, n - 1, m - 1, (0.0, 1.0), |i, v, s| {
            inw[i] = v;
            in_scale[i] = s;
        });
        let s_out = out_scale[m];
        let s_in = in_scale[m];
        let rescale = |k: i32, k_ref: i32| RENORM.powi(k - k_ref);
        let mut y = vec![0.0; n];
        for i in 0..=m {
            y[i] = out[i] * rescale(out_scale[i], s_out);
        }
        if inw[m] == 0.0 || out[m] == 0.0 {
            return Err(Error::Convergence {
                iterations: 0,
                residual: f64::INFINITY,
                detail: "wavefunction vanishes at the matching point".into(),
            });
        }
        let factor = y[m] / inw[m];
        for i in m..n {
            y[i] = inw[i] * rescale(in_scale[i], s_in) * factor;
        }
        let y_out = |i: usize| out[i] * rescale(out_scale[i], s_out);
        let y_in = |i: usize| inw[i] * rescale(in_scale[i], s_in) * factor;
        let d_out = y_out(m + 1) - y_out(m - 1);
        let d_in = y_in(m + 1) - y_in(m - 1);
        let mismatch = (d_out - d_in).abs() / d_out.abs().max(d_in.abs()).max(y[m].abs() * self.grid.h);
        Ok((y, mismatch))
    }
}

fn default_r_max(problem: &RadialProblem, energy: f64) -> f64 {
    let kappa = (2.0 * energy.abs()).sqrt() / problem.beta;
    let turning = problem.potential.strength() / energy.abs();
    1.2 * turning + 40.0 / kappa
}

/// Solve for the bound state with `node_target` radial nodes.
pub fn solve_bound_state(problem: &RadialProblem, node_target: u32) -> Result<RadialSolution> {
    problem.validate()?;
    let a = problem.effective_bohr();
    let r_min = problem.grid.r_min.unwrap_or(1e-8 * a);
    let cap = 1e6 * a;
    let points = problem.grid.points;
    let grid_for = |energy: f64| -> Grid {
        let r_max = problem
            .grid
            .r_max
            .unwrap_or_else(|| default_r_max(problem, energy).clamp(20.0 * a, cap));
        Grid::new(r_min, r_max, points)
    };

    let floor = problem.coulomb_energy(node_target) * 1.01;
    let (mut lo, mut hi, mut solver) = bracket(problem, node_target, floor, cap, &grid_for)?;

    let mut extensions = 0;
    loop {
        let energy = solver.refine(lo, hi, node_target);
        let (y, mismatch) = solver.wavefunction(energy)?;
        let r = &solver.grid.r;
        let mut chi: Vec<f64> = y.iter().zip(r).map(|(v, r)| v * r.sqrt()).collect();
        let peak = chi.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        let tail = chi[chi.len() - 2].abs() / peak;
        if tail > TAIL_LIMIT && problem.grid.r_max.is_none() && extensions < MAX_EXTENSIONS {
            let r_max = (2.0 * solver.grid.r_max()).min(cap);
            if r_max > solver.grid.r_max() {
                extensions += 1;
                solver = Numerov::new(problem, Grid::new(r_min, r_max, points));
                // the box grew, so the eigenvalue can only have moved down
                lo = floor;
                hi = energy * (1.0 - 1e-6);
                while solver.count_nodes(hi) <= node_target {
                    hi *= 0.5;
                    if hi.abs() < 1e-300 {
                        return Err(Error::NoBoundState("state lost while extending the grid".into()));
                    }
                }
                continue;
            }
        }
        if !(mismatch <= MATCH_TOLERANCE) {
            return Err(Error::Convergence {
                iterations: extensions,
                residual: mismatch,
                detail: format!("derivative mismatch at the turning point for E = {energy:e}"),
            });
        }
        return finish(problem, node_target, energy, solver, &mut chi);
    }
}

type Bracket<'a> = (f64, f64, Numerov<'a>);

fn bracket<'a>(
    problem: &'a RadialProblem,
    node_target: u32,
    floor: f64,
    cap: f64,
    grid_for: &dyn Fn(f64) -> Grid,
) -> Result<Bracket<'a>> {
    if let Some(hint) = problem.energy_hint {
        let mut delta = 1e-6;
        while delta < 0.5 {
            let hi = hint * (1.0 - delta);
            let lo = (hint * (1.0 + delta)).max(floor);
            let solver = Numerov::new(problem, grid_for(hi));
            if solver.count_nodes(hi) > node_target && solver.count_nodes(lo) <= node_target {
                return Ok((lo, hi, solver));
            }
            delta *= 16.0;
        }
    }
    let mut energy = floor;
    loop {
        energy *= 0.5;
        let r_max = default_r_max(problem, energy);
        if problem.grid.r_max.is_none() && r_max > cap {
            break;
        }
        let solver = Numerov::new(problem, grid_for(energy));
        if solver.count_nodes(energy) > node_target {
            return Ok((floor, energy, solver));
        }
        if energy.abs() < 1e-300 {
            break;
        }
    }
    Err(Error::NoBoundState(format!(
        "no state with {node_target} nodes and l = {} below zero for the {} potential (g = {})",
        problem.l,
        problem.potential.name(),
        problem.potential.strength()
    )))
}

fn finish(
    problem: &RadialProblem,
    nodes: u32,
    energy: f64,
    solver: Numerov<'_>,
    chi: &mut [f64],
) -> Result<RadialSolution> {
    let r = solver.grid.r;
    let h = solver.grid.h;
    let dens: Vec<f64> = chi.iter().map(|c| c * c).collect();
    let norm = integrate(&r, h, &dens)?;
    let scale = norm.sqrt().recip();
    // positive near the origin
    let sign = if chi[1] < 0.0 { -scale } else { scale };
    for c in chi.iter_mut() {
        *c *= sign;
    }
    let pot = &problem.potential;
    let v = solver.v;
    let mut solution = RadialSolution {
        energy,
        l: problem.l,
        nodes,
        beta: problem.beta,
        mean_r: 0.0,
        mean_inv_r2: 0.0,
        mean_abs_force: 0.0,
        mean_potential: 0.0,
        r,
        chi: chi.to_vec(),
        step: h,
    };
    solution.mean_r = solution.expectation(|r| r)?;
    solution.mean_inv_r2 = solution.expectation(|r| 1.0 / (r * r))?;
    solution.mean_abs_force = mean_abs_force(&solution, pot)?;
    let weighted: Vec<f64> = v.iter().zip(chi.iter()).map(|(v, c)| v * c * c).collect();
    solution.mean_potential = integrate(&solution.r, h, &weighted)?;
    Ok(solution)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hydrogenic::RadialWavefunction;

    fn coulomb(g: f64, l: u32, beta: f64) -> RadialProblem {
        RadialProblem::new(Potential::coulomb(g).unwrap(), l, beta).unwrap()
    }

    fn exact(g: f64, n: u32, beta: f64) -> f64 {
        -g * g / (2.0 * beta * beta * f64::from(n * n))
    }

    #[test]
    fn coulomb_ground_state() {
        let g = 0.3;
        let s = solve_bound_state(&coulomb(g, 0, 1.0), 0).unwrap();
        assert!((s.energy / exact(g, 1, 1.0) - 1.0).abs() < 1e-9, "{}", s.energy);
        assert!((s.norm().unwrap() - 1.0).abs() < 1e-12);
        assert!((s.mean_r / (1.5 / g) - 1.0).abs() < 1e-8);
        assert!((s.mean_inv_r2 / (2.0 * g * g) - 1.0).abs() < 1e-8);
        assert!((s.mean_abs_force / (2.0 * g * g * g) - 1.0).abs() < 1e-8);
        assert!((s.mean_potential / (2.0 * s.energy) - 1.0).abs() < 1e-8);
    }

    #[test]
    fn coulomb_spectrum_against_closed_form() {
        for beta in [1.0, 0.9, 0.75] {
            for n in 1..=3u32 {
                for l in 0..n.min(3) {
                    let g = 0.05;
                    let s = solve_bound_state(&coulomb(g, l, beta), n - l - 1).unwrap();
                    let e = exact(g, n, beta);
                    assert!((s.energy / e - 1.0).abs() < 1e-9, "n={n} l={l} β={beta}: {}", s.energy / e - 1.0);
                    assert!((s.mean_potential / (2.0 * s.energy) - 1.0).abs() < 1e-6);
                }
            }
        }
    }

    #[test]
    fn wavefunction_matches_closed_form() {
        let (g, beta) = (0.4, 0.8);
        let s = solve_bound_state(&coulomb(g, 1, beta), 1).unwrap();
        let w = RadialWavefunction::with_effective_bohr(3, 1, beta * beta / g).unwrap();
        let peak = s.chi.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        for (r, c) in s.r.iter().zip(&s.chi).step_by(97) {
            assert!((c - w.eval(*r)).abs() < 1e-7 * peak, "r = {r}");
        }
        assert!(s.chi[0].abs() < 1e-12 * peak);
        assert!(s.chi.last().unwrap().abs() < 1e-10 * peak);
    }

    #[test]
    fn energy_scales_as_inverse_beta_squared() {
        let g = 0.2;
        let e1 = solve_bound_state(&coulomb(g, 0, 1.0), 0).unwrap().energy;
        let e9 = solve_bound_state(&coulomb(g, 0, 0.9), 0).unwrap().energy;
        assert!((e9 / e1 * 0.81 - 1.0).abs() < 1e-9);
    }

    #[test]
    fn node_theorem() {
        let p = RadialProblem::new(Potential::hulthen(0.6, 20.0).unwrap(), 0, 0.95).unwrap();
        let mut prev = f64::NEG_INFINITY;
        for k in 0..3 {
            let s = solve_bound_state(&p, k).unwrap();
            assert!(s.energy > prev);
            let sign_changes = s
                .chi
                .windows(2)
                .filter(|w| w[0] * w[1] < 0.0 && w[0].abs().max(w[1].abs()) > 1e-9)
                .count();
            assert_eq!(sign_changes as u32, k);
            prev = s.energy;
        }
    }

    #[test]
    fn hulthen_closed_form() {
        // l = 0 levels: E_n = −β²(λ − n²)²/(8a²n²) with λ = 2ga/β²
        let (g, a, beta) = (0.3, 15.0, 0.9);
        let p = RadialProblem::new(Potential::hulthen(g, a).unwrap(), 0, beta).unwrap();
        let lambda = 2.0 * g * a / (beta * beta);
        for n in 1..=2u32 {
            let nn = f64::from(n);
            let e = -beta * beta * (lambda - nn * nn).powi(2) / (8.0 * a * a * nn * nn);
            let s = solve_bound_state(&p, n - 1).unwrap();
            assert!((s.energy / e - 1.0).abs() < 1e-8, "{n}: {} {}", s.energy, e);
        }
    }

    #[test]
    fn grid_refinement() {
        let p = RadialProblem::new(Potential::yukawa(0.5, 8.0).unwrap(), 0, 0.9).unwrap();
        let coarse = solve_bound_state(&p.with_grid(GridSpec::with_points(10_000)).unwrap(), 0).unwrap();
        let fine = solve_bound_state(&p.with_grid(GridSpec::with_points(20_000)).unwrap(), 0).unwrap();
        let finer = solve_bound_state(&p.with_grid(GridSpec::with_points(40_000)).unwrap(), 0).unwrap();
        let d1 = (coarse.energy - fine.energy).abs();
        let d2 = (fine.energy - finer.energy).abs();
        assert!(d2 <= 1e-10 * fine.energy.abs(), "{d1} {d2}");
        assert!(d2 <= d1 || d1 < 1e-14 * fine.energy.abs(), "{d1} {d2}");
    }

    #[test]
    fn weak_yukawa_is_unbound() {
        let p = RadialProblem::new(Potential::yukawa(0.05, 2.0).unwrap(), 0, 1.0).unwrap();
        assert!(solve_bound_state(&p, 0).unwrap_err().is_no_bound_state());
    }

    #[test]
    fn warm_start_agrees() {
        let p = RadialProblem::new(Potential::yukawa(0.5, 8.0).unwrap(), 0, 0.9).unwrap();
        let cold = solve_bound_state(&p, 0).unwrap();
        let warm = solve_bound_state(&p.with_energy_hint(cold.energy * 1.01), 0).unwrap();
        assert!((cold.energy / warm.energy - 1.0).abs() < 1e-12, "{} {}", cold.energy, warm.energy);
    }

    #[test]
    fn force_is_linear_in_strength() {
        let p = RadialProblem::new(Potential::yukawa(0.5, 8.0).unwrap(), 0, 1.0).unwrap();
        let s = solve_bound_state(&p, 0).unwrap();
        let f1 = mean_abs_force(&s, &p.potential).unwrap();
        let f3 = mean_abs_force(&s, &p.potential.scaled(3.0)).unwrap();
        assert!((f3 / f1 - 3.0).abs() < 1e-13, "{f1} {f3}");
        assert!((f1 / s.mean_abs_force - 1.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_problems() {
        assert!(RadialProblem::new(Potential::Coulomb { strength: 1.0 }, 0, 0.0).is_err());
        assert!(coulomb(1.0, 0, 1.0).with_grid(GridSpec::with_points(10)).is_err());
        let bad = GridSpec { points: 2000, r_min: Some(1.0), r_max: Some(0.5) };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn singular_integrand_is_reported() {
        let s = solve_bound_state(&coulomb(0.5, 0, 1.0), 0).unwrap();
        let err = s.expectation(|r| r.powf(-3.5)).unwrap_err();
        assert!(matches!(err, Error::Quadrature(_)));
    }
}

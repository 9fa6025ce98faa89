use std::io::Write;
use std::process::ExitCode;

use ncqm_core::algebra::{angular_coefficients, check_commutators, NoncommParams, IDENTITY_TOLERANCE};
use ncqm_core::nbody::{
    identical_particle_coefficient, identical_particle_transform, transform_and_check_decoupling,
    NBodySystem,
};
use ncqm_core::report::{
    bundled_experimental, figure_data, ingest_experimental, table1, table1_data, table2,
    table2_data, ExperimentalRecord,
};
use ncqm_core::selfconsistent::{calibrate_omega, solve_self_consistent};
use ncqm_core::{Constants, Error, ParticlePair, Potential};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::output::{render_records, render_table, Record};
use crate::{Cli, Command, Global, PotentialKind, SolveArgs};

enum Failure {
    Usage(String),
    Compute { command: &'static str, error: Error },
    Check(String),
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

pub fn run(cli: Cli) -> ExitCode {
    let global = &cli.global;
    let result = load_constants(global).and_then(|constants| dispatch(&cli.command, global, &constants));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Compute { command, error }) => {
            let status = if error.is_no_bound_state() { "no_bound_state" } else { "error" };
            let mut record = Record::new(command, status);
            record.push("message", error.to_string());
            let _ = emit(global, &record.render(global.format));
            eprintln!("error: {error}");
            ExitCode::from(2)
        }
        Err(Failure::Check(msg)) => {
            eprintln!("check failed: {msg}");
            ExitCode::from(2)
        }
    }
}

fn load_constants(global: &Global) -> Result<Constants, Failure> {
    match &global.config {
        Some(path) => Constants::load(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display()))),
        None => Ok(Constants::default()),
    }
}

fn load_dataset(global: &Global) -> Result<Vec<ExperimentalRecord>, Failure> {
    match &global.data {
        Some(path) => {
            ingest_experimental(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
        }
        None => Ok(bundled_experimental()),
    }
}

fn emit(global: &Global, text: &str) -> std::io::Result<()> {
    match &global.out {
        Some(path) => std::fs::write(path, text),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()
        }
    }
}

fn compute<T>(command: &'static str, r: ncqm_core::Result<T>) -> Result<T, Failure> {
    r.map_err(|error| Failure::Compute { command, error })
}

fn dispatch(command: &Command, global: &Global, constants: &Constants) -> Result<(), Failure> {
    let format = global.format;
    let text = match command {
        Command::Table1(o) => {
            let data = load_dataset(global)?;
            let rows = compute("table1", table1(o.omega, constants, &data))?;
            render_table(&table1_data(&rows), format)
        }
        Command::Table2(o) => {
            let data = load_dataset(global)?;
            let rows = compute("table2", table2(o.omega, constants, &data))?;
            render_table(&table2_data(&rows), format)
        }
        Command::Fig { figure, resolution, omega } => {
            let table = compute("fig", figure_data(*figure, *resolution, omega.omega, constants))?;
            render_table(&table, format)
        }
        Command::Solve(args) => solve(args, constants)?.render(format),
        Command::Calibrate { ratio } => {
            let c = compute("calibrate", calibrate_omega(*ratio))?;
            let mut r = Record::new("calibrate", "ok");
            r.push("ratio", c.ratio)
                .push("omega", c.omega)
                .push("omega_approximation", ncqm_core::selfconsistent::omega_approximation(c.ratio))
                .push("critical_coupling", c.critical_alpha_z)
                .push("tangency_eta", c.tangency_eta)
                .push("beta", c.beta)
                .push("min_mean_distance", c.min_mean_distance)
                .push("delta12", c.delta12)
                .push("grid_mean_distance", c.grid_mean_distance)
                .push("grid_xi_mismatch", c.grid_xi_mismatch);
            r.render(format)
        }
        Command::NbodyCheck { n, seed, draws } => {
            let (record, pass) = nbody_check(*n, *seed, *draws)?;
            emit(global, &record.render(format))?;
            return if pass {
                Ok(())
            } else {
                Err(Failure::Check(format!("decoupling residual above {IDENTITY_TOLERANCE:e}")))
            };
        }
        Command::Selftest => {
            let records = selftest();
            let failed = records.iter().filter(|(_, pass)| !pass).count();
            let records: Vec<Record> = records.into_iter().map(|(r, _)| r).collect();
            emit(global, &render_records(&records, format))?;
            return if failed == 0 {
                Ok(())
            } else {
                Err(Failure::Check(format!("{failed} suite(s) failed")))
            };
        }
    };
    emit(global, &text)?;
    Ok(())
}

fn parse_mass(s: &str, constants: &Constants) -> Result<f64, Failure> {
    if s.eq_ignore_ascii_case("inf") || s.eq_ignore_ascii_case("infinity") {
        return Ok(f64::INFINITY);
    }
    if let Some(m) = constants.particle_mass(s) {
        return Ok(m);
    }
    match crate::parse_number(s) {
        Ok(m) if m > 0.0 => Ok(m),
        _ => Err(Failure::Usage(format!(
            "mass '{s}' must be a positive rest energy in eV, electron, proton or inf"
        ))),
    }
}

fn solve(args: &SolveArgs, constants: &Constants) -> Result<Record, Failure> {
    let m1 = parse_mass(&args.m1, constants)?;
    let m2 = parse_mass(&args.m2, constants)?;
    let pair = match (m1.is_finite(), m2.is_finite()) {
        (true, true) => ParticlePair::new(m1, m2),
        (false, true) => ParticlePair::infinite_partner(m2),
        (true, false) => ParticlePair::infinite_partner(m1),
        (false, false) => return Err(Failure::Usage("at most one mass may be infinite".into())),
    }
    .map_err(|e| Failure::Usage(e.to_string()))?;
    let coupling = match (args.z, args.coupling) {
        (Some(z), _) => constants.alpha * z,
        (None, Some(g)) => g,
        (None, None) => return Err(Failure::Usage("one of --Z or --coupling is required".into())),
    };
    let potential = match (args.potential, args.screening) {
        (PotentialKind::Coulomb, _) => Potential::coulomb(coupling),
        (PotentialKind::Yukawa, Some(a)) => Potential::yukawa(coupling, a),
        (PotentialKind::Hulthen, Some(a)) => Potential::hulthen(coupling, a),
        (_, None) => return Err(Failure::Usage("--screening is required for screened potentials".into())),
    }
    .map_err(|e| Failure::Usage(e.to_string()))?;
    let omega = match args.omega {
        Some(w) => w,
        None => compute("solve", calibrate_omega(pair.ratio()))?.omega,
    };
    let r = compute("solve", solve_self_consistent(&potential, &pair, omega))?;
    let mu = pair.reduced_mass();
    let mut record = Record::new("solve", "ok");
    record
        .push("potential", potential.name())
        .push("coupling", coupling)
        .push("screening", potential.screening())
        .push("ratio", pair.ratio())
        .push("omega", omega)
        .push("energy", r.solution.energy)
        .push("energy_ev", r.solution.energy_ev(mu))
        .push("eta", r.params.eta)
        .push("xi", r.params.xi)
        .push("eps12", r.params.eps12)
        .push("eps21", r.params.eps21)
        .push("beta", r.params.beta)
        .push("mean_r", r.solution.mean_r)
        .push("mean_r_cm", constants.natural_length_to_cm(r.solution.mean_r, mu))
        .push("delta12", pair.delta12_natural())
        .push("iterations", r.iterations)
        .push("residual", r.residual);
    Ok(record)
}

fn nbody_check(n: usize, seed: u64, draws: usize) -> Result<(Record, bool), Failure> {
    if n < 2 {
        return Err(Failure::Usage("--n must be at least 2".into()));
    }
    if draws == 0 {
        return Err(Failure::Usage("--draws must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut record = Record::new("nbody-check", "ok");
    record.push("n", n).push("seed", seed).push("draws", draws);
    let pass;
    if n <= 3 {
        let mut worst = 0.0f64;
        for _ in 0..draws {
            let system = compute("nbody-check", NBodySystem::random(n, 0.8 / n as f64, &mut rng))?;
            let rep = compute("nbody-check", transform_and_check_decoupling(&system, None))?;
            worst = worst.max(rep.residual);
        }
        pass = worst < IDENTITY_TOLERANCE;
        record.push("check", "jacobi_decoupling").push("max_residual", worst);
    } else {
        let mut worst = 0.0f64;
        for _ in 0..draws {
            let eps = rng.gen_range(0.0..0.9 / n as f64);
            let mass = 10f64.powf(rng.gen_range(-1.0..1.0));
            let (diag, off) = compute("nbody-check", identical_particle_transform(n, eps, mass))?;
            let expected = compute("nbody-check", identical_particle_coefficient(n, eps, mass))?;
            let err = diag[..n - 1]
                .iter()
                .map(|d| (d - expected).abs() / expected)
                .fold(off * mass, f64::max);
            worst = worst.max(err);
        }
        pass = worst < IDENTITY_TOLERANCE;
        record.push("check", "identical_particle_reduction").push("max_residual", worst);
    }
    if !pass {
        record = {
            let mut failed = Record::new("nbody-check", "failed");
            failed.push("n", n).push("seed", seed).push("draws", draws);
            failed
        };
    }
    Ok((record, pass))
}

fn suite(name: &str, cases: usize, residual: Result<f64, Error>, tolerance: f64) -> (Record, bool) {
    let (value, pass, message) = match residual {
        Ok(r) => (Some(r), r <= tolerance, String::new()),
        Err(e) => (None, false, e.to_string()),
    };
    let mut record = Record::new("selftest", if pass { "pass" } else { "fail" });
    record
        .push("suite", name)
        .push("cases", cases)
        .push("max_residual", value)
        .push("tolerance", tolerance)
        .push("message", message);
    (record, pass)
}

fn worst(it: impl Iterator<Item = ncqm_core::Result<f64>>) -> ncqm_core::Result<f64> {
    it.into_iter().try_fold(0.0f64, |acc, r| r.map(|v| acc.max(v)))
}

fn selftest() -> Vec<(Record, bool)> {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let params: Vec<NoncommParams> = (0..20)
        .filter_map(|_| NoncommParams::from_eps(rng.gen_range(0.0..0.4), rng.gen_range(0.0..0.4)).ok())
        .collect();

    let commutators = worst(params.iter().map(|p| check_commutators(p, 3).map(|r| r.max_residual)));
    let brackets = worst(params.iter().map(|p| {
        check_commutators(p, 1).map(|r| {
            let table = p.commutator_table();
            (0..2)
                .flat_map(|j| (0..2).map(move |i| (j, i)))
                .map(|(j, i)| (r.brackets[j][i] - table[j][i]).abs())
                .fold(0.0, f64::max)
        })
    }));
    let angular = worst(params.iter().map(|p| {
        angular_coefficients(p).map(|c| c.reconstruction_residuals(p).into_iter().fold(0.0, f64::max))
    }));
    let three_body = worst((0..3).map(|_| {
        NBodySystem::random(3, 0.3, &mut rng).and_then(|s| s.check_commutators(2)).map(|r| r.max_residual)
    }));
    let decoupling = worst([2usize, 3].into_iter().flat_map(|n| (0..100).map(move |_| n)).map(|n| {
        NBodySystem::random(n, 0.8 / n as f64, &mut rng)
            .and_then(|s| transform_and_check_decoupling(&s, None))
            .map(|r| r.residual)
    }));
    let identical = worst((2..=6usize).map(|n| {
        let eps = 0.5 / n as f64;
        let (diag, off) = identical_particle_transform(n, eps, 1.0)?;
        let expected = identical_particle_coefficient(n, eps, 1.0)?;
        Ok(diag[..n - 1].iter().map(|d| (d - expected).abs() / expected).fold(off, f64::max))
    }));

    vec![
        suite("two_body_commutators", params.len(), commutators, IDENTITY_TOLERANCE),
        suite("poisson_brackets", params.len(), brackets, IDENTITY_TOLERANCE),
        suite("angular_reconstruction", params.len(), angular, 1e-14),
        suite("three_body_commutators", 3, three_body, IDENTITY_TOLERANCE),
        suite("jacobi_decoupling", 200, decoupling, IDENTITY_TOLERANCE),
        suite("identical_particle_reduction", 5, identical, IDENTITY_TOLERANCE),
    ]
}

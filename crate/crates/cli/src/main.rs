//! `logfactor` command-line front end.

mod output;

use clap::{Args, Parser, Subcommand, ValueEnum};
use logfactor::arith::{multiplicities, prime_factors};
use logfactor::asymptotics::{
    boundary_curves, feasibility_limit, feasibility_region, max_feasible_n, write_feasibility_csv, FeasibilityParams,
};
use logfactor::bosonic::BosonicConfig;
use logfactor::degeneracy::{enumerate_factorizations, partition_count_diff, stirling_count};
use logfactor::dynamics::{build_rabi_system, integrate_full, rwa_trajectory, FullOdeConfig, RabiSystem};
use logfactor::levels::ExtendedLevels;
use logfactor::measurement::{average_probability, monte_carlo};
use logfactor::potential::{build_potential, BuildConfig, BuildReport, PotentialGrid};
use logfactor::protocol::{run_iterative, run_known_n, run_prime_spectrum, GammaPolicy, ProtocolConfig};
use logfactor::spectra::{Spectrum, SpectrumMode};
use logfactor::{validation, Error};
use output::Output;
use serde::Serialize;
use serde_json::json;
use std::io::Write;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(name = "logfactor", version, about = "Factoring by Rabi dynamics of bosons in a logarithmic trap")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Command {
    /// Build a trap potential for the log-integer or prime spectrum.
    BuildPotential(BuildArgs),
    /// Run the factoring protocol.
    Factor(FactorArgs),
    /// List the factorizations of N into k parts.
    Degeneracy(DegeneracyArgs),
    /// Ground and factor-state populations, closed form against the full equations.
    Simulate(SimulateArgs),
    /// Average factor-state probability against the measurement window.
    PtCurve(PtArgs),
    /// Scan the (N, gamma) plane for drives that satisfy both the RWA and decoherence bounds.
    Feasibility(FeasibilityArgs),
    /// Run the invariant suite and print a report.
    Validate(ValidateArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
enum SpectrumKind {
    Log,
    Prime,
}

/// Grid and convergence settings shared by every subcommand that builds a potential.
#[derive(Args, Debug, Clone, Serialize)]
struct GridArgs {
    /// Half-width of the coordinate box.
    #[arg(long, default_value_t = 40.0)]
    xi_max: f64,
    #[arg(long, default_value_t = 0.01)]
    step: f64,
    /// Largest allowed eigenvalue residual.
    #[arg(long, default_value_t = 1e-3)]
    tolerance: f64,
    #[arg(long, default_value_t = 500)]
    max_sweeps: usize,
}

impl GridArgs {
    fn config(&self) -> BuildConfig {
        BuildConfig {
            xi_max: self.xi_max,
            step: self.step,
            tolerance: self.tolerance,
            max_sweeps: self.max_sweeps,
            ..Default::default()
        }
    }
}

#[derive(Args, Debug, Serialize)]
struct BuildArgs {
    #[arg(long, value_enum, default_value_t = SpectrumKind::Log)]
    spectrum: SpectrumKind,
    /// Scale of the log-integer spectrum (odd, at least 3).
    #[arg(long = "L", default_value_t = 3)]
    scale: u64,
    /// Number of levels to match; defaults to 7 (log) or 14 (prime).
    #[arg(long)]
    levels: Option<usize>,
    #[command(flatten)]
    grid: GridArgs,
    /// Potential CSV; eigenfunctions go beside it.
    #[arg(long)]
    out: Option<String>,
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
enum ModeArg {
    Iterative,
    KnownN,
    PrimeSpectrum,
}

#[derive(Args, Debug, Serialize)]
struct FactorArgs {
    #[arg(long = "N")]
    big_n: u64,
    #[arg(long = "L", default_value_t = 3)]
    scale: u64,
    #[arg(long, value_enum, default_value_t = ModeArg::Iterative)]
    mode: ModeArg,
    /// Prime count for known-n mode.
    #[arg(long)]
    n: Option<usize>,
    /// Prime multiplicities for known-n mode, e.g. `2,1`; enables the π/(2Ω) measurement.
    #[arg(long, value_delimiter = ',')]
    multiplicities: Option<Vec<usize>>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Measurement window in units of 1/Ω.
    #[arg(long, default_value_t = 50.0)]
    omega_t: f64,
    #[arg(long, default_value_t = 40)]
    max_repeats: usize,
    /// Target Ω·N; ignored when --gamma is given.
    #[arg(long, default_value_t = 0.05)]
    safety: f64,
    /// Fixed drive strength for every step.
    #[arg(long)]
    gamma: Option<f64>,
    /// Sample measurements from the full equations of motion.
    #[arg(long)]
    full_ode: bool,
    /// Levels in the built potential; higher levels use the semiclassical form.
    #[arg(long)]
    levels: Option<usize>,
    #[command(flatten)]
    grid: GridArgs,
    /// Also write the transcript here.
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args, Debug, Serialize)]
struct DegeneracyArgs {
    #[arg(long = "N")]
    big_n: u64,
    /// Part count; all counts from 1 to the prime count when absent.
    #[arg(long)]
    k: Option<usize>,
    /// Smallest allowed part.
    #[arg(long, default_value_t = 2)]
    min_part: u64,
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args, Debug, Serialize)]
struct SimulateArgs {
    #[arg(long = "N", default_value_t = 35)]
    big_n: u64,
    #[arg(long = "L", default_value_t = 3)]
    scale: u64,
    /// Boson number.
    #[arg(long, default_value_t = 2)]
    k: usize,
    /// Rabi frequency as a multiple of 1/N; ignored when --gamma is given.
    #[arg(long, default_value_t = 0.05)]
    omega_n: f64,
    #[arg(long)]
    gamma: Option<f64>,
    /// Duration in Rabi periods π/Ω.
    #[arg(long, default_value_t = 1.0)]
    periods: f64,
    #[arg(long, default_value_t = 401)]
    samples: usize,
    /// Highest single-particle level in the full basis; defaults to the largest factor level plus 8.
    #[arg(long)]
    cutoff: Option<usize>,
    /// Skip the full equations and write only the closed form. The full basis holds
    /// every k-boson state up to the cutoff, so large N is only practical here.
    #[arg(long)]
    rwa_only: bool,
    #[arg(long, default_value_t = 60.0)]
    xi_max: f64,
    #[arg(long, default_value_t = 0.01)]
    step: f64,
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args, Debug, Serialize)]
struct PtArgs {
    #[arg(long, default_value_t = 20.0)]
    max_omega_t: f64,
    #[arg(long, default_value_t = 400)]
    points: usize,
    /// Random-time measurements per point for a Monte-Carlo column; 0 disables it.
    #[arg(long, default_value_t = 0)]
    mc_samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args, Debug, Serialize)]
struct FeasibilityArgs {
    #[arg(long = "L", default_value_t = 3)]
    scale: u64,
    /// Prime count of N = pⁿ.
    #[arg(long, default_value_t = 4)]
    n: usize,
    /// Decoherence time in seconds.
    #[arg(long, default_value_t = 2.0)]
    tdec: f64,
    /// Trap frequency in Hz.
    #[arg(long, default_value_t = 5000.0)]
    nu0: f64,
    /// Required number of Rabi cycles ΩT_dec.
    #[arg(long, default_value_t = 5.0)]
    margin: f64,
    #[arg(long, default_value_t = 1e2)]
    n_min: f64,
    #[arg(long, default_value_t = 1e5)]
    n_max: f64,
    #[arg(long, default_value_t = 200)]
    n_points: usize,
    #[arg(long, default_value_t = 1e-3)]
    gamma_min: f64,
    #[arg(long, default_value_t = 1e2)]
    gamma_max: f64,
    #[arg(long, default_value_t = 200)]
    gamma_points: usize,
    /// Region CSV; the boundary curves go beside it.
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args, Debug, Serialize)]
struct ValidateArgs {
    /// Skip the full-equation norm check.
    #[arg(long)]
    quick: bool,
    #[arg(long)]
    out: Option<String>,
}

/// Failure categories with their exit codes.
#[derive(Debug)]
enum Failure {
    Lib(Error),
    Check(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Lib(e.into())
    }
}

type CmdResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Lib(e)) => {
            let category = if e.is_domain() {
                "domain"
            } else if matches!(e, Error::Io(_)) {
                "io"
            } else {
                "numerical"
            };
            eprintln!("error [{category}]: {e}");
            ExitCode::from(1)
        }
        Err(Failure::Check(msg)) => {
            eprintln!("error [validation]: {msg}");
            ExitCode::from(1)
        }
    }
}

fn dispatch(command: &Command) -> CmdResult {
    match command {
        Command::BuildPotential(a) => cmd_build(command, a),
        Command::Factor(a) => cmd_factor(command, a),
        Command::Degeneracy(a) => cmd_degeneracy(command, a),
        Command::Simulate(a) => cmd_simulate(command, a),
        Command::PtCurve(a) => cmd_pt_curve(command, a),
        Command::Feasibility(a) => cmd_feasibility(command, a),
        Command::Validate(a) => cmd_validate(command, a),
    }
}

fn target_spectrum(kind: SpectrumKind, scale: u64, levels: usize) -> Result<Spectrum, Error> {
    match kind {
        SpectrumKind::Log => Spectrum::log_integer(scale),
        SpectrumKind::Prime => Ok(Spectrum::prime(levels)),
    }
}

fn build(spectrum: &Spectrum, levels: usize, grid: &GridArgs) -> Result<BuildReport, Error> {
    build_potential(spectrum, levels, &grid.config())
}

fn cmd_build(command: &Command, a: &BuildArgs) -> CmdResult {
    let levels = a.levels.unwrap_or(match a.spectrum {
        SpectrumKind::Log => 7,
        SpectrumKind::Prime => 14,
    });
    let spectrum = target_spectrum(a.spectrum, a.scale, levels)?;
    let report = build(&spectrum, levels, &a.grid)?;
    let grid = &report.potential;
    let targets = spectrum.energies(levels)?;

    let out = Output::resolve(a.out.as_deref(), "potential.csv")?;
    grid.write_potential_csv(out.create()?)?;
    let eig_path = out.sibling("eigenfunctions.csv");
    grid.write_eigenfunctions_csv(output::create(&eig_path)?)?;

    let table: Vec<_> = grid
        .eigenvalues
        .iter()
        .zip(&targets)
        .enumerate()
        .map(|(l, (e, t))| json!({ "level": l, "eigenvalue": e, "target": t, "error": e - t }))
        .collect();
    let summary = json!({
        "xi_max": grid.grid.xi_max,
        "v_origin": grid.v_at_origin(),
        "sweeps": report.sweeps,
        "residuals": report.residuals,
        "levels": table,
        "files": [out.display(), eig_path.display().to_string()],
    });
    out.write_sidecar(command, &summary)?;
    for (l, (e, t)) in grid.eigenvalues.iter().zip(&targets).enumerate() {
        println!("E{l} = {e:.6}  target {t:.6}");
    }
    println!("{} sweeps, wrote {} and {}", report.sweeps, out.display(), eig_path.display());
    Ok(())
}

fn protocol_config(a: &FactorArgs) -> ProtocolConfig {
    ProtocolConfig {
        gamma_policy: match a.gamma {
            Some(gamma) => GammaPolicy::Fixed { gamma },
            None => GammaPolicy::RwaSafe { safety: a.safety },
        },
        max_repeats: a.max_repeats,
        omega_t: a.omega_t,
        seed: a.seed,
        full_ode: a.full_ode,
    }
}

fn cmd_factor(command: &Command, a: &FactorArgs) -> CmdResult {
    let config = protocol_config(a);
    let run = match a.mode {
        ModeArg::Iterative | ModeArg::KnownN => {
            let spectrum = Spectrum::log_integer(a.scale)?;
            let levels = a.levels.unwrap_or(if a.full_ode { 13 } else { 7 });
            let mut grid_args = a.grid.clone();
            if a.full_ode {
                // the full basis needs every level on the grid
                grid_args.xi_max = grid_args.xi_max.max(60.0);
            }
            let grid = build(&spectrum, levels, &grid_args)?.potential;
            if a.mode == ModeArg::Iterative {
                run_iterative(a.big_n, a.scale, &grid, &config)?
            } else {
                let n = a.n.ok_or_else(|| Error::Precondition("known-n mode needs --n".into()))?;
                run_known_n(a.big_n, a.scale, n, a.multiplicities.as_deref(), &grid, &config)?
            }
        }
        ModeArg::PrimeSpectrum => {
            let levels = a.levels.unwrap_or(14);
            let grid = build(&Spectrum::prime(levels), levels, &a.grid)?.potential;
            run_prime_spectrum(a.big_n, &grid, &config)?
        }
    };
    let doc = json!({ "config": command, "run": run });
    let text = serde_json::to_string_pretty(&doc).map_err(|e| Error::Io(e.to_string()))?;
    println!("{text}");
    if let Some(path) = &a.out {
        let out = Output::resolve(Some(path), "factor.json")?;
        writeln!(out.create()?, "{text}")?;
    }
    Ok(())
}

fn cmd_degeneracy(command: &Command, a: &DegeneracyArgs) -> CmdResult {
    if a.big_n < 2 {
        return Err(Error::Domain(format!("N must be at least 2, got {}", a.big_n)).into());
    }
    let primes = prime_factors(a.big_n);
    let counts = multiplicities(&primes);
    let ks: Vec<usize> = match a.k {
        Some(k) => vec![k],
        None => (1..=primes.len()).collect(),
    };
    let mut rows = Vec::new();
    for &k in &ks {
        let set = enumerate_factorizations(a.big_n, k, a.min_part);
        // closed forms hold when every prime factor is an admissible part
        let admissible = primes.first().is_some_and(|&p| p >= a.min_part);
        let closed = if !admissible {
            None
        } else if counts.iter().all(|&c| c == 1) {
            Some(("stirling", stirling_count(primes.len(), k)))
        } else if counts.len() == 1 {
            Some(("partitions", partition_count_diff(primes.len(), k)))
        } else {
            None
        };
        println!("k = {k}: d = {}", set.d());
        for s in &set.solutions {
            println!("  {}", s.iter().map(u64::to_string).collect::<Vec<_>>().join(" x "));
        }
        rows.push(json!({
            "k": k,
            "d": set.d(),
            "solutions": set.solutions,
            "closed_form": closed.map(|(name, v)| json!({ "kind": name, "value": v.to_string() })),
        }));
    }
    if let Some(path) = &a.out {
        let out = Output::resolve(Some(path), "degeneracy.json")?;
        let doc = json!({ "config": command, "N": a.big_n, "prime_factors": primes, "counts": rows });
        let text = serde_json::to_string_pretty(&doc).map_err(|e| Error::Io(e.to_string()))?;
        writeln!(out.create()?, "{text}")?;
    }
    Ok(())
}

fn simulation_system(a: &SimulateArgs, grid: &PotentialGrid, spectrum: &Spectrum) -> Result<RabiSystem, Error> {
    let levels = ExtendedLevels::new(grid, spectrum.clone())?;
    let system = build_rabi_system(&levels, spectrum, a.big_n, a.k, 1.0)?;
    if system.no_resonance() {
        return Err(Error::NoResonance(format!("{} has no factorization into {} parts above L", a.big_n, a.k)));
    }
    let gamma = match a.gamma {
        Some(g) => g,
        None => system.gamma_for_omega(a.omega_n / a.big_n as f64)?,
    };
    Ok(system.with_gamma(gamma))
}

fn cmd_simulate(command: &Command, a: &SimulateArgs) -> CmdResult {
    if a.samples < 2 {
        return Err(Error::Precondition("need at least 2 samples".into()).into());
    }
    let spectrum = Spectrum::log_integer(a.scale)?;
    // the full basis reaches a few levels past the highest factor level
    let top = spectrum.decompose_energy(a.big_n, a.k)?.iter().flatten().copied().max().unwrap_or(0);
    let cutoff = a.cutoff.unwrap_or(top + 8);
    let config = BuildConfig { xi_max: a.xi_max, step: a.step, tolerance: 1e-8, ..Default::default() };
    let levels = if a.rwa_only { 7 } else { cutoff + 1 };
    let grid = build_potential(&spectrum, levels, &config)?.potential;
    let system = simulation_system(a, &grid, &spectrum)?;

    let t_end = a.periods * std::f64::consts::PI / system.omega;
    let times: Vec<f64> = (0..a.samples).map(|i| t_end * i as f64 / (a.samples - 1) as f64).collect();
    let closed = rwa_trajectory(&system, &times);
    let full = if a.rwa_only {
        None
    } else {
        let mut cfg = FullOdeConfig::new(t_end, a.samples);
        cfg.basis_cutoff = Some(cutoff);
        Some(integrate_full(&system, &grid, &spectrum, &cfg)?)
    };

    let out = Output::resolve(a.out.as_deref(), "simulate.csv")?;
    let mut w = std::io::BufWriter::new(out.create()?);
    write!(w, "t,prob_ground_rwa,prob_factor_rwa")?;
    if full.is_some() {
        write!(w, ",prob_ground_full,prob_factor_full,norm_full")?;
    }
    writeln!(w)?;
    let mut sup: f64 = 0.0;
    for (i, t) in times.iter().enumerate() {
        write!(w, "{t:.9e},{:.12e},{:.12e}", closed.prob_ground(i), closed.prob_factor_total(i))?;
        if let Some(f) = &full {
            write!(w, ",{:.12e},{:.12e},{:.12e}", f.prob_ground(i), f.prob_factor_total(i), f.norm[i])?;
            sup = sup.max((f.prob_ground(i) - closed.prob_ground(i)).abs());
        }
        writeln!(w)?;
    }
    w.flush()?;

    let factor_states: Vec<String> = system.factor_states.iter().map(BosonicConfig::to_string).collect();
    let summary = json!({
        "gamma": system.gamma,
        "omega_rabi": system.omega,
        "omega_times_n": system.omega * a.big_n as f64,
        "couplings": system.couplings,
        "factor_states": factor_states,
        "basis_cutoff": (!a.rwa_only).then_some(cutoff),
        "sup_deviation": full.as_ref().map(|_| sup),
        "max_norm_drift": full.as_ref().map(|f| f.max_norm_drift()),
        "warnings": full.as_ref().map(|f| f.warnings.clone()).unwrap_or_default(),
    });
    out.write_sidecar(command, &summary)?;
    println!("gamma = {:.6e}, Omega = {:.6e} (Omega N = {:.4})", system.gamma, system.omega, system.omega * a.big_n as f64);
    if let Some(f) = &full {
        println!("sup |P0_full - P0_rwa| = {sup:.4e}, max norm drift = {:.2e}", f.max_norm_drift());
    }
    println!("wrote {}", out.display());
    Ok(())
}

/// A single factor state with unit Rabi frequency; the averaged probability does not depend on the coupling.
fn unit_system() -> RabiSystem {
    RabiSystem {
        k: 2,
        n: 35,
        mode: SpectrumMode::LogInteger,
        scale: Some(3),
        omega_ext: (35.0f64 / 9.0).ln(),
        factor_states: vec![BosonicConfig::new(vec![2, 4])],
        factor_values: vec![vec![5, 7]],
        couplings: vec![1.0],
        gamma: 2.0,
        omega: 1.0,
    }
}

fn cmd_pt_curve(command: &Command, a: &PtArgs) -> CmdResult {
    if a.points < 2 || a.max_omega_t.is_nan() || a.max_omega_t <= 0.0 {
        return Err(Error::Precondition("need --points >= 2 and --max-omega-t > 0".into()).into());
    }
    let out = Output::resolve(a.out.as_deref(), "pt.csv")?;
    let mut w = std::io::BufWriter::new(out.create()?);
    let mc = a.mc_samples > 0;
    writeln!(w, "omega_t,p_avg{}", if mc { ",mc_fraction,mc_stderr" } else { "" })?;
    let system = unit_system();
    for i in 0..a.points {
        let x = a.max_omega_t * i as f64 / (a.points - 1) as f64;
        let p = average_probability(x);
        write!(w, "{x:e},{p:.15e}")?;
        if mc {
            if x > 0.0 {
                let s = monte_carlo(&system, x, a.mc_samples, a.seed.wrapping_add(i as u64))?;
                write!(w, ",{:.9e},{:.9e}", s.factor_fraction(), s.standard_error(p))?;
            } else {
                write!(w, ",0,0")?;
            }
        }
        writeln!(w)?;
    }
    w.flush()?;
    out.write_sidecar(command, &json!({ "asymptote": 0.5 }))?;
    println!("wrote {} ({} points)", out.display(), a.points);
    Ok(())
}

fn cmd_feasibility(command: &Command, a: &FeasibilityArgs) -> CmdResult {
    let params = FeasibilityParams {
        scale: a.scale,
        n: a.n,
        t_dec: a.tdec,
        nu0: a.nu0,
        dec_margin: a.margin,
        n_range: (a.n_min, a.n_max),
        n_points: a.n_points,
        gamma_range: (a.gamma_min, a.gamma_max),
        gamma_points: a.gamma_points,
    };
    let points = feasibility_region(&params)?;
    let out = Output::resolve(a.out.as_deref(), "feasibility.csv")?;
    write_feasibility_csv(&points, std::io::BufWriter::new(out.create()?))?;

    let bpath = out.sibling("boundary.csv");
    let mut w = std::io::BufWriter::new(output::create(&bpath)?);
    writeln!(w, "N,gamma_rwa,gamma_dec")?;
    for b in boundary_curves(&params)? {
        writeln!(w, "{:.6e},{:.6e},{:.6e}", b.n, b.gamma_rwa, b.gamma_dec)?;
    }
    w.flush()?;

    let n_max = max_feasible_n(&points);
    let limit = feasibility_limit(&params);
    out.write_sidecar(
        command,
        &json!({ "max_feasible_n": n_max, "analytic_limit": limit, "files": [out.display(), bpath.display().to_string()] }),
    )?;
    match n_max {
        Some(n) => println!("max feasible N on grid = {n:.0} (analytic limit {limit:.0})"),
        None => println!("no feasible point on the grid (analytic limit {limit:.0})"),
    }
    println!("wrote {} and {}", out.display(), bpath.display());
    Ok(())
}

fn cmd_validate(command: &Command, a: &ValidateArgs) -> CmdResult {
    let report = validation::run(!a.quick)?;
    print!("{report}");
    if let Some(path) = &a.out {
        let out = Output::resolve(Some(path), "validate.json")?;
        let doc = json!({ "config": command, "report": report });
        let text = serde_json::to_string_pretty(&doc).map_err(|e| Error::Io(e.to_string()))?;
        writeln!(out.create()?, "{text}")?;
    }
    if report.passed() {
        Ok(())
    } else {
        let failed: Vec<_> = report.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
        Err(Failure::Check(format!("failed checks: {}", failed.join(", "))))
    }
}

//! `catsim` command-line front end.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Arg, ArgAction, ArgMatches, Command};
use log::{info, warn};

use catsim::collapse::{cc_run, dp_collapse_time, sc_run, trajectory_seed};
use catsim::config::{parse_config, RunConfig, KEYS};
use catsim::dynamics::{integrate, NonlinearHamiltonian, Trajectory};
use catsim::experiments::{run_height_sweep, run_robustness_suite, DynamicsKind, SweepResult};
use catsim::io;
use catsim::model::{build_collective_operators, build_linear_hamiltonian, ground_state, make_initial_state};
use catsim::observables::{density_histogram, dispersion, is_cat, peak_dispersion, DensityHistogram};
use catsim::Error;

enum Failure {
    Usage(String),
    Run(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config { .. } | Error::InvalidParameter { .. } | Error::DimensionTooLarge { .. } => {
                Failure::Usage(e.to_string())
            }
            other => Failure::Run(other),
        }
    }
}

type CliResult<T = ()> = Result<T, Failure>;

fn flag_name(key: &str) -> String {
    key.replace('_', "-")
}

fn common_args(cmd: Command) -> Command {
    let cmd = cmd
        .arg(Arg::new("config").long("config").value_name("FILE").help("key = value config file"))
        .arg(Arg::new("out").long("out").value_name("DIR").help("output directory (default: timestamped)"))
        .arg(Arg::new("seed").long("seed").value_name("N").help("base seed for stochastic runs"))
        .arg(
            Arg::new("jobs")
                .long("jobs")
                .value_name("N")
                .value_parser(clap::value_parser!(usize))
                .help("worker threads for sweeps"),
        );
    KEYS.iter().filter(|(k, _)| *k != "seed").fold(cmd, |cmd, (key, doc)| {
        cmd.arg(Arg::new(*key).long(flag_name(key)).value_name("VALUE").help(*doc).hide_short_help(true))
    })
}

fn cli() -> Command {
    Command::new("catsim")
        .about("Cat formation in a micro qubit + macro spin model under nonlinear and collapse dynamics")
        .subcommand_required(true)
        .arg_required_else_help(true)
        .subcommand(common_args(Command::new("run").about("Integrate one nonlinear Hamiltonian trajectory")))
        .subcommand(
            common_args(Command::new("sweep").about("Peak dispersion versus hill height, with elbow fits")).arg(
                Arg::new("robustness")
                    .long("robustness")
                    .action(ArgAction::SetTrue)
                    .help("also run the piecewise-potential and alpha/10 variants"),
            ),
        )
        .subcommand(common_args(Command::new("collapse").about("Continuous (cc) or jump (sc) collapse trajectories")))
        .subcommand(common_args(Command::new("ground").about("Ground state of the linear Hamiltonian")))
        .subcommand(
            common_args(Command::new("elbow").about("Fit elbows to an existing sweep CSV")).arg(
                Arg::new("input").long("input").value_name("FILE").required(true).help("sweep CSV to fit"),
            ),
        )
        .subcommand(
            common_args(Command::new("dp").about("Diósi–Penrose collapse time for an energy in joules")).arg(
                Arg::new("delta_e")
                    .long("delta-e")
                    .value_name("JOULES")
                    .required(true)
                    .allow_negative_numbers(true)
                    .value_parser(clap::value_parser!(f64)),
            ),
        )
}

fn load_config(m: &ArgMatches) -> CliResult<RunConfig> {
    let text = match m.get_one::<String>("config") {
        Some(path) => std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {path}: {e}")))?,
        None => String::new(),
    };
    let mut overrides: Vec<(String, String)> = KEYS
        .iter()
        .filter_map(|(k, _)| m.try_get_one::<String>(k).ok().flatten().map(|v| (k.to_string(), v.clone())))
        .collect();
    if let Some(seed) = m.get_one::<String>("seed") {
        overrides.push(("seed".to_string(), seed.clone()));
    }
    Ok(parse_config(&text, &overrides)?)
}

fn output_dir(m: &ArgMatches, command: &str) -> CliResult<PathBuf> {
    let dir = match m.get_one::<String>("out") {
        Some(d) => PathBuf::from(d),
        None => PathBuf::from(format!("catsim-{command}-{}", chrono::Local::now().format("%Y%m%d-%H%M%S"))),
    };
    std::fs::create_dir_all(&dir).map_err(|e| Failure::Usage(format!("cannot create {}: {e}", dir.display())))?;
    Ok(dir)
}

fn write_resolved(dir: &Path, cfg: &RunConfig) -> CliResult {
    io::write_atomic(&dir.join("config.resolved"), |w| Ok(w.write_all(cfg.resolved().as_bytes())?))?;
    Ok(())
}

/// Sample closest to `t`.
fn nearest_sample(traj: &Trajectory, t: f64) -> Option<&catsim::dynamics::Sample> {
    traj.samples.iter().min_by(|a, b| (a.t - t).abs().total_cmp(&(b.t - t).abs()))
}

fn run(cfg: &RunConfig, dir: &Path) -> CliResult {
    let ham = NonlinearHamiltonian::from_model(&cfg.model)?;
    let psi = make_initial_state(&cfg.model)?;
    let traj = integrate(&psi, &ham, &cfg.integrator)?;
    io::write_trajectory_csv(&dir.join("trajectory.csv"), &traj)?;
    for &t in &cfg.histogram_times {
        let s = nearest_sample(&traj, t).expect("trajectory has samples");
        let hist = DensityHistogram { m_values: ham.m_values.clone(), mass: s.density.clone() };
        io::write_histogram_csv(&dir.join(format!("histogram_t{t}.csv")), &hist)?;
    }
    let (peak, t_peak) = peak_dispersion(&traj, cfg.window.0, cfg.window.1)?;
    let last = traj.samples.last().expect("trajectory has samples");
    println!("peak dispersion {peak} at t = {t_peak} (cat: {})", peak > cfg.cat_threshold);
    println!("final norm {} energy {} (initial {})", last.norm, last.energy, traj.samples[0].energy);
    Ok(())
}

fn write_sweep(dir: &Path, suffix: &str, result: &SweepResult) -> CliResult {
    io::write_sweep_csv(&dir.join(format!("sweep{suffix}.csv")), &result.rows)?;
    io::write_elbow_csv(&dir.join(format!("elbow{suffix}.csv")), &result.elbows)?;
    if result.n_failed() > 0 {
        warn!("{} of {} cells failed; see the status column", result.n_failed(), result.rows.len());
    }
    for e in &result.elbows {
        println!(
            "{}w = {}: breakpoint {} slopes {} / {} degenerate {}",
            if suffix.is_empty() { String::new() } else { format!("[{}] ", &suffix[1..]) },
            e.w,
            e.fit.breakpoint,
            e.fit.slope_low,
            e.fit.slope_high,
            e.fit.degenerate
        );
    }
    Ok(())
}

fn sweep(cfg: &RunConfig, dir: &Path, robustness: bool) -> CliResult {
    let sweep_cfg = cfg.sweep_config();
    if robustness {
        for (variant, result) in run_robustness_suite(&sweep_cfg)? {
            let suffix = match variant.as_str() {
                "baseline" => String::new(),
                name => format!("_{name}"),
            };
            write_sweep(dir, &suffix, &result)?;
        }
        Ok(())
    } else {
        write_sweep(dir, "", &run_height_sweep(&sweep_cfg)?)
    }
}

fn collapse(cfg: &RunConfig, dir: &Path) -> CliResult {
    let psi = make_initial_state(&cfg.model)?;
    for rep in 0..cfg.n_stochastic_reps {
        let cp = cfg.collapse.with_seed(trajectory_seed(cfg.collapse.rng_seed, rep as u64));
        let name = format!("trajectory_{rep:03}.csv");
        match cfg.dynamics {
            DynamicsKind::Cc => io::write_trajectory_csv(&dir.join(name), &cc_run(&psi, &cfg.model, &cp, &cfg.integrator)?)?,
            DynamicsKind::Sc => {
                let (traj, jumps) = sc_run(&psi, &cfg.model, &cp, &cfg.integrator)?;
                io::write_trajectory_csv(&dir.join(name), &traj)?;
                io::write_jumps_csv(&dir.join(format!("jumps_{rep:03}.csv")), &jumps)?;
            }
            DynamicsKind::Hamiltonian => {
                return Err(Failure::Usage("collapse needs `dynamics = cc` or `dynamics = sc`".to_string()));
            }
        }
    }
    println!("{} {} trajectories written to {}", cfg.n_stochastic_reps, cfg.dynamics.as_str(), dir.display());
    Ok(())
}

fn ground(cfg: &RunConfig, dir: &Path) -> CliResult {
    let h = build_linear_hamiltonian(&cfg.model)?;
    let ops = build_collective_operators(&cfg.model)?;
    let gs = ground_state(&h)?;
    io::write_histogram_csv(&dir.join("histogram_ground.csv"), &density_histogram(&gs.state, &ops))?;
    println!("ground energy {} gap {} degenerate {}", gs.energy, gs.gap, gs.degenerate);
    println!(
        "dispersion {} (cat: {})",
        dispersion(&gs.state, &ops),
        is_cat(&gs.state, &ops, cfg.cat_threshold)
    );
    Ok(())
}

fn elbow(cfg: &RunConfig, dir: &Path, input: &Path) -> CliResult {
    let rows = io::read_sweep_csv(input)?;
    let result = SweepResult::from_rows(rows, cfg.elbow_min_improvement);
    if result.elbows.is_empty() {
        return Err(Failure::Run(Error::TooFewPoints(result.rows.len())));
    }
    io::write_elbow_csv(&dir.join("elbow.csv"), &result.elbows)?;
    for e in &result.elbows {
        println!(
            "w = {}: breakpoint {} slopes {} / {} degenerate {} trend {}",
            e.w, e.fit.breakpoint, e.fit.slope_low, e.fit.slope_high, e.fit.degenerate, e.fit.line_slope
        );
    }
    Ok(())
}

fn dispatch(name: &str, m: &ArgMatches) -> CliResult {
    let cfg = load_config(m)?;
    if name == "dp" {
        let delta_e = *m.get_one::<f64>("delta_e").expect("required");
        let tau = dp_collapse_time(delta_e).map_err(|e| Failure::Usage(e.to_string()))?;
        if m.contains_id("out") {
            write_resolved(&output_dir(m, name)?, &cfg)?;
        }
        println!("{tau:?}");
        return Ok(());
    }
    let dir = output_dir(m, name)?;
    write_resolved(&dir, &cfg)?;
    info!("writing to {}", dir.display());
    let work = || match name {
        "run" => run(&cfg, &dir),
        "sweep" => sweep(&cfg, &dir, m.get_flag("robustness")),
        "collapse" => collapse(&cfg, &dir),
        "ground" => ground(&cfg, &dir),
        "elbow" => elbow(&cfg, &dir, Path::new(m.get_one::<String>("input").expect("required"))),
        other => unreachable!("unknown subcommand {other}"),
    };
    match m.get_one::<usize>("jobs") {
        Some(&jobs) => rayon_pool(jobs)?.install(work),
        None => work(),
    }
}

fn rayon_pool(jobs: usize) -> CliResult<rayon::ThreadPool> {
    if jobs == 0 {
        return Err(Failure::Usage("--jobs must be >= 1".to_string()));
    }
    rayon::ThreadPoolBuilder::new().num_threads(jobs).build().map_err(|e| Failure::Usage(e.to_string()))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let matches = match cli().try_get_matches() {
        Ok(m) => m,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let (name, sub) = matches.subcommand().expect("subcommand required");
    match dispatch(name, sub) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Run(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_numerical() { 2 } else { 1 })
        }
    }
}

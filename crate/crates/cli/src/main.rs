mod args;
mod manifest;

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::Path;
use std::process::ExitCode;

use clap::Parser;
use distill_core::analytics::{
    self, chain_growth_rate, dark_count_region, optimize_theta, p_two, rate_bell, sweep, Objective,
};
use distill_core::photonics::{eta_weight, p_click, ApparatusParams, ExcitationAngle};
use distill_core::protocol::{run_trajectories_with_records, write_records_csv, StrategyConfig};
use distill_core::Error;

use args::{
    ApparatusArgs, ChainArgs, Cli, Command, DarkcountArgs, DriftArgs, RatesArgs, SimulateArgs,
    StrategyArg,
};
use manifest::RunManifest;

const EXIT_USAGE: u8 = 2;
const EXIT_NOT_CONVERGED: u8 = 3;

#[derive(Debug)]
enum Failure {
    Usage(String),
    NotConverged(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter { .. } | Error::Config(_) | Error::DegenerateObjective => {
                Failure::Usage(e.to_string())
            }
            other => Failure::Runtime(other.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::NotConverged(m)) => {
            eprintln!("warning: {m}");
            ExitCode::from(EXIT_NOT_CONVERGED)
        }
        Err(Failure::Runtime(m)) => {
            eprintln!("error: {m}");
            ExitCode::FAILURE
        }
    }
}

/// Config file (or a symmetric link with `default_t`), then flags on top.
fn apparatus(cli: &Cli, default_t: f64) -> Result<ApparatusParams, Failure> {
    let mut p = match &cli.config {
        Some(path) => ApparatusParams::from_config_file(path)?,
        None => ApparatusParams::symmetric(default_t)?,
    };
    let a: &ApparatusArgs = &cli.apparatus;
    if let Some(t) = a.t {
        p.t1 = t;
        p.t2 = t;
    }
    p.t1 = a.t1.unwrap_or(p.t1);
    p.t2 = a.t2.unwrap_or(p.t2);
    p.x1 = a.x1.unwrap_or(p.x1);
    p.x2 = a.x2.unwrap_or(p.x2);
    p.lambda = a.lambda.unwrap_or(p.lambda);
    p.p_dark = a.p_dark.unwrap_or(p.p_dark);
    p.tau = a.tau.unwrap_or(p.tau);
    Ok(p.validated()?)
}

fn run(cli: &Cli) -> Outcome {
    fs::create_dir_all(&cli.out)?;
    match &cli.command {
        Command::Rates(a) => rates(cli, a),
        Command::Drift(a) => drift(cli, a),
        Command::Chain(a) => chain(cli, a),
        Command::Simulate(a) => simulate(cli, a),
        Command::Darkcounts(a) => darkcounts(cli, a),
    }
}

fn create(path: &Path) -> Result<BufWriter<File>, Failure> {
    Ok(BufWriter::new(File::create(path)?))
}

fn rates(cli: &Cli, a: &RatesArgs) -> Outcome {
    let params = apparatus(cli, 1.0)?;
    if a.t_max > 1.0 {
        return Err(Failure::Usage(format!("--t-max {} exceeds 1", a.t_max)));
    }
    let ts = sweep::log_space(a.t_min, a.t_max, a.points)?;
    let rows = sweep::rate_sweep(&ts, params.tau)?;
    let mut m = RunManifest::new("rates", a, params, None);
    let path = m.output(&cli.out, "rates.csv");
    sweep::write_rates_csv(&rows, create(&path)?)?;
    m.write(&cli.out)?;
    println!("crossover T* = {:.6}", analytics::crossover_t());
    if let Some(r) = rows
        .iter()
        .min_by(|x, y| (x.t - 1e-4).abs().total_cmp(&(y.t - 1e-4).abs()))
    {
        println!("ratio at T = {:.3e}: {:.4e}", r.t, r.ratio());
    }
    println!("wrote {}", path.display());
    Ok(())
}

fn drift(cli: &Cli, a: &DriftArgs) -> Outcome {
    let dxs = sweep::lin_space(a.dx_min, a.dx_max, a.points)?;
    let dts = sweep::lin_space(a.dt_min, a.dt_max, a.points)?;
    let rows = sweep::drift_grid(&dxs, &dts)?;
    let mut m = RunManifest::new("drift", a, (), None);
    let path = m.output(&cli.out, "drift.csv");
    sweep::write_drift_csv(&rows, a.clip, create(&path)?)?;
    m.write(&cli.out)?;
    let worst = rows.iter().map(|r| r.epsilon_exact).fold(0.0, f64::max);
    println!("{} grid points, max infidelity {worst:.4e}", rows.len());
    println!("wrote {}", path.display());
    Ok(())
}

const CHAIN_HEADER: [&str; 12] = [
    "T",
    "k_max",
    "theta_opt",
    "sin2_theta_opt",
    "eta",
    "G",
    "G_over_T",
    "T_over_G",
    "p_loop",
    "mean_iterates",
    "tail_mass",
    "converged",
];

fn chain(cli: &Cli, a: &ChainArgs) -> Outcome {
    let params = apparatus(cli, 1e-3)?;
    let best = optimize_theta(&params, Objective::ChainRate { k_max: a.k_max })?;
    let g = chain_growth_rate(&params, ExcitationAngle::new(best.optimal_theta)?, a.k_max)?;
    let t = params.mean_transmittance();
    let rate_tau = g.rate * params.tau;
    let record = [
        t.to_string(),
        a.k_max.to_string(),
        best.optimal_theta.to_string(),
        best.optimal_theta.sin().powi(2).to_string(),
        g.eta.to_string(),
        g.rate.to_string(),
        (rate_tau / t).to_string(),
        (t / rate_tau).to_string(),
        g.p_loop.to_string(),
        g.mean_iterates.to_string(),
        g.tail_mass.to_string(),
        g.converged.to_string(),
    ];
    let mut m = RunManifest::new("chain", a, params, None);
    let path = m.output(&cli.out, "chain.csv");
    let mut csv_text = CHAIN_HEADER.join(",");
    csv_text.push('\n');
    csv_text.push_str(&record.join(","));
    csv_text.push('\n');
    fs::write(&path, &csv_text)?;
    m.write(&cli.out)?;
    if a.csv {
        print!("{csv_text}");
    } else {
        println!("T = {t}, k_max = {}", a.k_max);
        println!(
            "optimal sin²θ = {:.6} (θ = {:.8} rad), η = {:.6}",
            best.optimal_theta.sin().powi(2),
            best.optimal_theta,
            g.eta
        );
        println!("G = {:.6} T/τ", rate_tau / t);
        println!("1/G = {:.4} τ/T", t / rate_tau);
        println!("P_loop = {:.6}, ⟨I⟩ = {:.4}", g.p_loop, g.mean_iterates);
        println!(
            "tail mass = {:.3e}, tail iterate bound = {:.3e}",
            g.tail_mass, g.tail_iterate_bound
        );
    }
    io::stdout().flush()?;
    if !g.converged {
        return Err(Failure::NotConverged(format!(
            "series tail {:.3e} after {} iterates exceeds 1e-9; raise --k-max",
            g.tail_mass, a.k_max
        )));
    }
    Ok(())
}

fn simulate(cli: &Cli, a: &SimulateArgs) -> Outcome {
    let params = apparatus(cli, 1e-2)?;
    let theta = match (a.theta, a.sin2_theta) {
        (Some(t), _) => ExcitationAngle::new(t)?,
        (None, Some(s)) => ExcitationAngle::from_sin2(s)?,
        (None, None) => {
            ExcitationAngle::new(optimize_theta(&params, Objective::BellRate)?.optimal_theta)?
        }
    };
    let cfg = match a.strategy {
        StrategyArg::TwoIterOnly => StrategyConfig::two_iter_only(a.seed),
        StrategyArg::Loop => StrategyConfig::looped(a.max_iterates, a.seed)?,
    };
    let (stats, records) = run_trajectories_with_records(&cfg, &params, theta, a.trials)?;
    let mut m = RunManifest::new("simulate", a, params, Some(a.seed));
    let traj = m.output(&cli.out, "trajectories.csv");
    write_records_csv(a.seed, &records, create(&traj)?)?;

    let mut summary = String::new();
    let tau = params.tau;
    summary += &format!("trials            {}\n", stats.n_trials);
    summary += &format!("theta             {}\n", theta.radians());
    summary += &format!("successes         {}\n", stats.successes);
    summary += &format!("failures          {}\n", stats.failures);
    summary += &format!("abandoned         {}\n", stats.abandoned);
    summary += &format!(
        "success rate      {:.6} ± {:.6}\n",
        stats.success_probability(),
        stats.success_probability_se()
    );
    summary += &format!(
        "bell-pair rate    {:.6e} ± {:.3e} per unit time\n",
        stats.rate(tau),
        stats.rate_se(tau)
    );
    summary += &format!("mean fidelity     {:.12}\n", stats.mean_fidelity());
    if a.strategy == StrategyArg::TwoIterOnly && params.p_dark == 0.0 {
        let eta = eta_weight(&params, theta)?;
        summary += &format!("analytic success  {:.6}\n", p_two(eta, params.phi()));
        summary += &format!("analytic rate     {:.6e}\n", rate_bell(&params, theta));
    }
    summary += &format!("herald prob       {:.6e}\n", p_click(&params, theta));
    summary += "iterates per success:\n";
    for (k, n) in &stats.iterates_per_success {
        summary += &format!("  {k:>3} {n}\n");
    }
    let sum_path = m.output(&cli.out, "simulate_summary.txt");
    fs::write(&sum_path, &summary)?;
    m.write(&cli.out)?;
    print!("{summary}");
    println!("wrote {}", traj.display());
    Ok(())
}

fn darkcounts(cli: &Cli, a: &DarkcountArgs) -> Outcome {
    let params = apparatus(cli, 1.0)?;
    if a.t_max > 1.0 {
        return Err(Failure::Usage(format!("--t-max {} exceeds 1", a.t_max)));
    }
    let ts = sweep::log_space(a.t_min, a.t_max, a.t_points)?;
    let mut ps = sweep::log_space(a.p_min, a.p_max, a.p_points)?;
    if a.with_zero {
        ps.insert(0, 0.0);
    }
    let points = dark_count_region(&ts, &ps, params.tau)?;
    let mut m = RunManifest::new("darkcounts", a, params, None);
    let path = m.output(&cli.out, "darkcounts.csv");
    sweep::write_region_csv(&points, create(&path)?)?;
    m.write(&cli.out)?;
    let count = |c| points.iter().filter(|p| p.class == c).count();
    use analytics::RegionClass::*;
    println!(
        "{} points: ours_better {}, reference_better {}, no_go {}",
        points.len(),
        count(OursBetter),
        count(ReferenceBetter),
        count(NoGo)
    );
    println!("wrote {}", path.display());
    Ok(())
}

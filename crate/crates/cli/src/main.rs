mod config;

use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, ensure, Context, Result};
use clap::{Args, Parser, Subcommand};
use conic_defense::sim::MATCHUPS;
use conic_defense::{
    capture_distribution, monte_carlo, parameter_sweep, report, strategy_matchup, BoundCurves, DefenderKind,
    OutcomeKind, Scenario, SweepParam,
};

use crate::config::RunConfig;

#[derive(Parser, Debug)]
#[command(name = "conic-defense", version, about = "Sequential target defense in a conical environment")]
struct Cli {
    #[command(flatten)]
    overrides: Overrides,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default)]
struct Overrides {
    /// Flat TOML run manifest.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true, env = "CONIC_DEFENSE_OUT", value_name = "DIR")]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    dt: Option<f64>,
    #[arg(long, global = true)]
    trials: Option<usize>,
    #[arg(long, global = true)]
    attackers: Option<usize>,
    #[arg(long, global = true, value_name = "NAME")]
    defender: Option<String>,
    #[arg(long, global = true, value_name = "NAME")]
    attacker: Option<String>,
    /// Worker threads for Monte-Carlo runs.
    #[arg(long, global = true)]
    workers: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Monte-Carlo trials; writes trials.csv and summary.csv.
    Simulate,
    /// Markov-chain bound curves; writes bounds.csv.
    Bounds,
    /// Capture-probability field over the cone; writes field.csv.
    Distribution,
    /// Final mean capture percentage per parameter value; writes sweep.csv.
    Sweep {
        /// phi, nu or rho_a
        #[arg(long)]
        param: SweepParam,
        /// Comma-separated values.
        #[arg(long, value_delimiter = ',', required = true, num_args = 1..)]
        values: Vec<f64>,
    },
    /// The four defender/attacker pairings; writes matchup.csv.
    Matchup,
}

impl Overrides {
    fn resolve(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        if let Some(v) = &self.out {
            cfg.output_dir = v.clone();
        }
        if let Some(v) = self.dt {
            cfg.dt = v;
        }
        if let Some(v) = self.trials {
            cfg.n_trials = v;
        }
        if let Some(v) = self.attackers {
            cfg.n_attackers = v;
        }
        if let Some(v) = &self.defender {
            cfg.defender = v.clone();
        }
        if let Some(v) = &self.attacker {
            cfg.attacker = v.clone();
        }
        if self.workers.is_some() {
            cfg.workers = self.workers;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>> {
    let path = dir.join(name);
    let file = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
    log::info!("writing {}", path.display());
    Ok(BufWriter::new(file))
}

fn scenario(cfg: &RunConfig) -> Result<Scenario> {
    Ok(Scenario::new(cfg.params()?, cfg.sim_config()?))
}

fn check_bounds(curves: &BoundCurves) -> Result<()> {
    ensure!(
        curves.lower.iter().zip(&curves.upper).all(|(lo, hi)| lo <= hi),
        "lower bound exceeds upper bound (p* = {:.6}, q* = {:.6})",
        curves.p_star,
        curves.q_star
    );
    Ok(())
}

fn simulate(cfg: &RunConfig) -> Result<()> {
    let scenario = scenario(cfg)?;
    let strategies = cfg.strategies()?;
    let summary = monte_carlo(&scenario, strategies, cfg.n_trials, cfg.n_attackers, cfg.seed)?;
    let bounds = BoundCurves::compute(scenario.model(), cfg.n_attackers);
    check_bounds(&bounds)?;
    report::write_trials(create(&cfg.output_dir, "trials.csv")?, &summary)?;
    report::write_summary(create(&cfg.output_dir, "summary.csv")?, &summary.mean_pct, &bounds)?;
    println!(
        "mean capture after {} attackers: {:.2}% (bounds {:.2} .. {:.2})",
        cfg.n_attackers,
        summary.final_mean(),
        bounds.lower.last().copied().unwrap_or(f64::NAN),
        bounds.upper.last().copied().unwrap_or(f64::NAN),
    );

    if strategies.defender == DefenderKind::Optimal {
        let params = scenario.params();
        let limit = params.capture_cone_radius() + cfg.capture_radius;
        let stray = summary
            .trials
            .iter()
            .flat_map(|t| &t.outcomes)
            .filter(|o| o.kind == OutcomeKind::Capture)
            .filter_map(|o| o.capture_point)
            .find(|p| p.norm() > limit || p.angle().abs() > params.phi() + 1e-9);
        if let Some(p) = stray {
            bail!("capture at ({:.6}, {:.6}) lies outside the capture cone", p.x, p.y);
        }
    }
    Ok(())
}

fn bounds(cfg: &RunConfig) -> Result<()> {
    let scenario = scenario(cfg)?;
    let curves = BoundCurves::compute(scenario.model(), cfg.n_attackers);
    check_bounds(&curves)?;
    report::write_bounds(create(&cfg.output_dir, "bounds.csv")?, &curves)?;
    println!(
        "p* = {:.6}, q* = {:.6}; n = {}: {:.2} .. {:.2}; stationary: {:.2} .. {:.2}",
        curves.p_star,
        curves.q_star,
        cfg.n_attackers,
        curves.lower.last().copied().unwrap_or(f64::NAN),
        curves.upper.last().copied().unwrap_or(f64::NAN),
        curves.lower_stationary(),
        curves.upper_stationary(),
    );
    Ok(())
}

fn distribution(cfg: &RunConfig) -> Result<()> {
    let scenario = scenario(cfg)?;
    let field = capture_distribution(scenario.model(), cfg.field_radii, cfg.field_angles);
    ensure!(
        field.values.iter().all(|p| (0.0..=1.0).contains(p)),
        "capture probability outside [0, 1]"
    );
    report::write_field(create(&cfg.output_dir, "field.csv")?, &field)?;
    Ok(())
}

fn sweep(cfg: &RunConfig, param: SweepParam, values: &[f64]) -> Result<()> {
    if values.is_empty() {
        bail!("--values needs at least one value");
    }
    let rows = parameter_sweep(
        &cfg.params()?,
        &cfg.sim_config()?,
        cfg.strategies()?,
        param,
        values,
        cfg.n_trials,
        cfg.n_attackers,
        cfg.seed,
    )?;
    report::write_sweep(create(&cfg.output_dir, "sweep.csv")?, &rows)?;
    for row in &rows {
        println!("{} = {:.6}: {:.2}%", param.name(), row.value, row.mean_pct);
    }
    Ok(())
}

fn matchup(cfg: &RunConfig) -> Result<()> {
    let scenario = scenario(cfg)?;
    let curves = strategy_matchup(&scenario, &MATCHUPS, cfg.n_trials, cfg.n_attackers, cfg.seed)?;
    report::write_matchup(create(&cfg.output_dir, "matchup.csv")?, &curves)?;
    for c in &curves {
        println!(
            "{} vs {}: {:.2}%",
            c.strategies.defender,
            c.strategies.attacker,
            c.mean_pct.last().copied().unwrap_or(f64::NAN)
        );
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    let cfg = cli.overrides.resolve()?;
    std::fs::create_dir_all(&cfg.output_dir)
        .with_context(|| format!("creating {}", cfg.output_dir.display()))?;
    match cli.command {
        Command::Simulate => simulate(&cfg),
        Command::Bounds => bounds(&cfg),
        Command::Distribution => distribution(&cfg),
        Command::Sweep { param, values } => sweep(&cfg, param, &values),
        Command::Matchup => matchup(&cfg),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

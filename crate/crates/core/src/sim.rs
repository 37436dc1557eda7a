//! Fixed-step game integration, sequential games, Monte-Carlo trials,
//! parameter sweeps and strategy matchups.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::engagement::EngagementGrid;
use crate::geometry::{clamp_to_wedge, make_params, GameParams, ParameterViolation, Vec2};
use crate::probability::{CaptureModel, SearchOptions};
use crate::strategies::{
    attacker_policy, defender_policy, initial_defender_phase, pp_defender_policy, AttackerKind, AttackerMode,
    Command, DefenderKind, DefenderTuning, Observation, Strategies,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("game did not terminate within {limit} time units (entry angle {theta_a0:.6})")]
    Timeout { limit: f64, theta_a0: f64 },
    #[error("defender start ({x:.6}, {y:.6}) lies outside the game environment")]
    StartOutsideEnvironment { x: f64, y: f64 },
    #[error("invalid parameters: {0}")]
    Params(#[from] ParameterViolation),
    #[error("failed to build worker pool: {0}")]
    WorkerPool(String),
}

/// What the defender does after conceding a breach.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum RestartMode {
    /// Reappear at the target center before the next arrival.
    #[default]
    Instant,
    /// Start the next game wherever the return trip got to.
    Physical,
}

impl FromStr for RestartMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "instant" => Ok(RestartMode::Instant),
            "physical" => Ok(RestartMode::Physical),
            _ => Err(format!("unknown restart mode `{s}`")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SimConfig {
    pub dt: f64,
    pub epsilon: f64,
    pub capture_radius: f64,
    pub restart: RestartMode,
    pub grid: EngagementGrid,
    pub search: SearchOptions,
    /// Worker threads for Monte-Carlo runs; `None` uses the global pool.
    pub workers: Option<usize>,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            dt: 1e-3,
            epsilon: 0.01,
            capture_radius: 0.05,
            restart: RestartMode::Instant,
            grid: EngagementGrid::default(),
            search: SearchOptions::default(),
            workers: None,
        }
    }
}

/// Parameters, simulation settings and the shared capture model.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub config: SimConfig,
    model: Arc<CaptureModel>,
}

impl Scenario {
    pub fn new(params: GameParams, config: SimConfig) -> Self {
        let model = Arc::new(CaptureModel::new(params, config.grid));
        Self { config, model }
    }

    pub fn params(&self) -> &GameParams {
        self.model.params()
    }

    pub fn model(&self) -> &CaptureModel {
        &self.model
    }

    fn tuning(&self) -> DefenderTuning {
        DefenderTuning {
            epsilon: self.config.epsilon,
            search: self.config.search,
            dt: self.config.dt,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum OutcomeKind {
    Capture,
    Breach,
    Evasion,
}

impl OutcomeKind {
    pub fn name(self) -> &'static str {
        match self {
            OutcomeKind::Capture => "capture",
            OutcomeKind::Breach => "breach",
            OutcomeKind::Evasion => "evasion",
        }
    }
}

impl fmt::Display for OutcomeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GameOutcome {
    pub kind: OutcomeKind,
    pub terminal_time: f64,
    /// Attacker position at capture.
    pub capture_point: Option<Vec2>,
    pub attacker_entry_angle: f64,
    pub defender_final: Vec2,
    pub attacker_final: Vec2,
}

/// Attacker sensing tolerance; engagement points sit exactly on the sensing circle.
const DETECTION_TOL: f64 = 1e-6;
const SPEED_TOL: f64 = 1e-9;

/// Time limit for one game, in multiples of the outer radius.
pub const TIMEOUT_FACTOR: f64 = 4.0;

fn clamp_to_environment(x: Vec2, params: &GameParams) -> Vec2 {
    let x = clamp_to_wedge(x, params.phi());
    let r = x.norm();
    if r > params.outer_radius() {
        x * (params.outer_radius() / r)
    } else {
        x
    }
}

/// Plays one attacker against the defender starting at `defender_start`.
pub fn run_game(
    scenario: &Scenario,
    strategies: Strategies,
    defender_start: Vec2,
    theta_a0: f64,
) -> Result<GameOutcome, SimError> {
    let params = scenario.params();
    let model = scenario.model();
    let cfg = &scenario.config;
    let tuning = scenario.tuning();
    let env = params.environment();
    if !env.contains_with_tol(defender_start, 1e-6) {
        return Err(SimError::StartOutsideEnvironment {
            x: defender_start.x,
            y: defender_start.y,
        });
    }
    let dt = cfg.dt;
    let limit = TIMEOUT_FACTOR * params.outer_radius();
    let mut x_a = Vec2::polar(params.outer_radius(), theta_a0);
    let mut x_d = clamp_to_environment(defender_start, params);
    let mut phase = initial_defender_phase(strategies.defender, x_d, theta_a0, model, &tuning);
    let mut mode = AttackerMode::Radial;
    let mut engaged = false;
    let mut t = 0.0;
    let mut step: u64 = 0;
    loop {
        if !engaged && x_a.distance(x_d) <= params.rho_a() + DETECTION_TOL {
            engaged = true;
        }
        let outcome = |kind, capture_point| GameOutcome {
            kind,
            terminal_time: t,
            capture_point,
            attacker_entry_angle: theta_a0,
            defender_final: x_d,
            attacker_final: x_a,
        };
        if x_a.distance(x_d) <= cfg.capture_radius {
            return Ok(outcome(OutcomeKind::Capture, Some(x_a)));
        }
        if x_a.norm() <= params.r_t() + 1e-9 {
            return Ok(outcome(OutcomeKind::Breach, None));
        }
        if x_a.norm() > params.outer_radius() + 1e-9 {
            return Ok(outcome(OutcomeKind::Evasion, None));
        }
        if t > limit {
            return Err(SimError::Timeout { limit, theta_a0 });
        }

        let obs = Observation {
            t,
            x_a,
            x_d,
            theta_a0,
            engaged,
        };
        let cmd_d = match strategies.defender {
            DefenderKind::Optimal => defender_policy(&mut phase, &obs, model, &tuning),
            DefenderKind::PurePursuit => pp_defender_policy(&obs, params),
            DefenderKind::Idle => Command::HOLD,
        };
        let cmd_a = attacker_policy(strategies.attacker, &mut mode, x_a, x_d, engaged, cfg.epsilon, model, dt);
        assert!(cmd_d.speed <= 1.0 + SPEED_TOL, "defender speed {} exceeds 1", cmd_d.speed);
        assert!(
            cmd_a.speed <= params.nu() + SPEED_TOL,
            "attacker speed {} exceeds {}",
            cmd_a.speed,
            params.nu()
        );

        x_d = clamp_to_environment(x_d + cmd_d.velocity() * dt, params);
        // the side edges are walls; only the outer arc is open
        x_a = clamp_to_wedge(x_a + cmd_a.velocity() * dt, params.phi());
        assert!(env.contains_with_tol(x_d, 1e-9), "defender left the environment at {x_d}");
        step += 1;
        t = step as f64 * dt;
    }
}

/// Outcomes of one sequence of attackers.
#[derive(Clone, Debug, PartialEq)]
pub struct TrialRecord {
    pub trial: usize,
    pub seed: u64,
    pub outcomes: Vec<GameOutcome>,
    /// Running capture count after each game.
    pub captures: Vec<usize>,
}

impl TrialRecord {
    pub fn capture_fraction(&self) -> f64 {
        match self.captures.last() {
            Some(&c) => c as f64 / self.outcomes.len() as f64,
            None => 0.0,
        }
    }

    /// Running capture percentage after each game.
    pub fn capture_percentages(&self) -> Vec<f64> {
        self.captures
            .iter()
            .enumerate()
            .map(|(i, &c)| 100.0 * c as f64 / (i + 1) as f64)
            .collect()
    }
}

/// Random generator for trial `trial` of a run seeded with `base_seed`.
pub fn trial_rng(base_seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(base_seed);
    rng.set_stream(trial as u64);
    rng
}

/// Entry angle uniform on `[-phi, phi]`.
pub fn draw_entry_angle<R: Rng>(rng: &mut R, phi: f64) -> f64 {
    -phi + 2.0 * phi * rng.gen::<f64>()
}

/// Plays `n_attackers` sequential games, the defender starting at the center.
pub fn run_sequence(
    scenario: &Scenario,
    strategies: Strategies,
    n_attackers: usize,
    base_seed: u64,
    trial: usize,
) -> Result<TrialRecord, SimError> {
    let params = scenario.params();
    let mut rng = trial_rng(base_seed, trial);
    let mut x_d = Vec2::ZERO;
    let mut outcomes = Vec::with_capacity(n_attackers);
    let mut captures = Vec::with_capacity(n_attackers);
    let mut count = 0;
    for _ in 0..n_attackers {
        let theta_a0 = draw_entry_angle(&mut rng, params.phi());
        let outcome = run_game(scenario, strategies, x_d, theta_a0)?;
        // Only the optimal defender concedes and restarts; baselines carry on
        // from wherever the game left them.
        let restarts = strategies.defender == DefenderKind::Optimal && scenario.config.restart == RestartMode::Instant;
        x_d = if outcome.kind == OutcomeKind::Breach && restarts {
            Vec2::ZERO
        } else {
            outcome.defender_final
        };
        if outcome.kind == OutcomeKind::Capture {
            count += 1;
        }
        outcomes.push(outcome);
        captures.push(count);
    }
    Ok(TrialRecord {
        trial,
        seed: base_seed,
        outcomes,
        captures,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct MonteCarloSummary {
    pub trials: Vec<TrialRecord>,
    /// Mean running capture percentage over trials, per arrival index.
    pub mean_pct: Vec<f64>,
}

impl MonteCarloSummary {
    pub fn final_mean(&self) -> f64 {
        self.mean_pct.last().copied().unwrap_or(0.0)
    }
}

fn with_pool<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, SimError> {
    match workers {
        None => Ok(f()),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map(|pool| pool.install(f))
            .map_err(|e| SimError::WorkerPool(e.to_string())),
    }
}

/// Runs `n_trials` independent sequences. Results depend only on
/// `base_seed`, never on the number of workers.
pub fn monte_carlo(
    scenario: &Scenario,
    strategies: Strategies,
    n_trials: usize,
    n_attackers: usize,
    base_seed: u64,
) -> Result<MonteCarloSummary, SimError> {
    let trials = with_pool(scenario.config.workers, || {
        (0..n_trials)
            .into_par_iter()
            .map(|i| run_sequence(scenario, strategies, n_attackers, base_seed, i))
            .collect::<Result<Vec<_>, _>>()
    })??;
    let mut mean_pct = vec![0.0; n_attackers];
    for record in &trials {
        for (m, p) in mean_pct.iter_mut().zip(record.capture_percentages()) {
            *m += p;
        }
    }
    if !trials.is_empty() {
        for m in &mut mean_pct {
            *m /= trials.len() as f64;
        }
    }
    Ok(MonteCarloSummary { trials, mean_pct })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SweepParam {
    Phi,
    Nu,
    RhoA,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            SweepParam::Phi => "phi",
            SweepParam::Nu => "nu",
            SweepParam::RhoA => "rho_a",
        }
    }

    /// `base` with this parameter replaced by `value`, re-validated.
    pub fn apply(self, base: &GameParams, value: f64) -> Result<GameParams, ParameterViolation> {
        let (mut rho_a, mut nu, mut phi) = (base.rho_a(), base.nu(), base.phi());
        match self {
            SweepParam::Phi => phi = value,
            SweepParam::Nu => nu = value,
            SweepParam::RhoA => rho_a = value,
        }
        make_params(base.r_t(), base.rho_t(), rho_a, nu, phi)
    }
}

impl FromStr for SweepParam {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "phi" => Ok(SweepParam::Phi),
            "nu" => Ok(SweepParam::Nu),
            "rho_a" => Ok(SweepParam::RhoA),
            _ => Err(format!("cannot sweep `{s}` (expected phi, nu or rho_a)")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepRow {
    pub param: SweepParam,
    pub value: f64,
    pub mean_pct: f64,
}

/// Final mean capture percentage for each value of one parameter.
#[allow(clippy::too_many_arguments)]
pub fn parameter_sweep(
    base: &GameParams,
    config: &SimConfig,
    strategies: Strategies,
    param: SweepParam,
    values: &[f64],
    n_trials: usize,
    n_attackers: usize,
    base_seed: u64,
) -> Result<Vec<SweepRow>, SimError> {
    values
        .iter()
        .map(|&value| {
            let params = param.apply(base, value)?;
            let scenario = Scenario::new(params, *config);
            let summary = monte_carlo(&scenario, strategies, n_trials, n_attackers, base_seed)?;
            log::info!("{} = {value:.6}: {:.3}%", param.name(), summary.final_mean());
            Ok(SweepRow {
                param,
                value,
                mean_pct: summary.final_mean(),
            })
        })
        .collect()
}

/// The four defender/attacker pairings compared in the matchup study.
pub const MATCHUPS: [Strategies; 4] = [
    Strategies {
        defender: DefenderKind::Optimal,
        attacker: AttackerKind::Optimal,
    },
    Strategies {
        defender: DefenderKind::Optimal,
        attacker: AttackerKind::PureEvader,
    },
    Strategies {
        defender: DefenderKind::PurePursuit,
        attacker: AttackerKind::Optimal,
    },
    Strategies {
        defender: DefenderKind::PurePursuit,
        attacker: AttackerKind::PureEvader,
    },
];

#[derive(Clone, Debug, PartialEq)]
pub struct MatchupCurve {
    pub strategies: Strategies,
    pub mean_pct: Vec<f64>,
}

pub fn strategy_matchup(
    scenario: &Scenario,
    matchups: &[Strategies],
    n_trials: usize,
    n_attackers: usize,
    base_seed: u64,
) -> Result<Vec<MatchupCurve>, SimError> {
    matchups
        .iter()
        .map(|&strategies| {
            let summary = monte_carlo(scenario, strategies, n_trials, n_attackers, base_seed)?;
            Ok(MatchupCurve {
                strategies,
                mean_pct: summary.mean_pct,
            })
        })
        .collect()
}

//! Motion policies for both agents: the robust pursuit law, the optimal
//! defender with its engagement travel plan, the rational attacker, and the
//! pure-pursuit / pure-evasion baselines.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::engagement::EngagementConfig;
use crate::geometry::{
    apollonius_circle, circle_meets_target, circle_meets_tsr_exterior, closest_point_in_exit_region,
    closest_point_in_sector, ApolloniusCircle, GameParams, Vec2,
};
use crate::probability::{choose_engagement_with, optimal_capture_point, CaptureModel, SearchOptions};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StrategyError {
    #[error("pursuit heading vanished")]
    ZeroVector,
    #[error("unknown {role} strategy `{name}`")]
    UnknownStrategy { role: &'static str, name: String },
}

/// Velocity command: speed and unit heading.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Command {
    pub speed: f64,
    pub heading: Vec2,
}

impl Command {
    pub const HOLD: Command = Command {
        speed: 0.0,
        heading: Vec2 { x: 1.0, y: 0.0 },
    };

    /// Moves toward `goal` at up to `max_speed`, stopping on it within one step.
    pub fn toward(from: Vec2, goal: Vec2, max_speed: f64, dt: f64) -> Command {
        let delta = goal - from;
        match delta.normalized() {
            Some(heading) => Command {
                speed: max_speed.min(delta.norm() / dt),
                heading,
            },
            None => Command::HOLD,
        }
    }

    pub fn velocity(&self) -> Vec2 {
        self.heading * self.speed
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AgentState {
    pub position: Vec2,
    pub speed_cmd: f64,
    pub heading_cmd: f64,
}

impl AgentState {
    pub fn at(position: Vec2) -> Self {
        Self {
            position,
            speed_cmd: 0.0,
            heading_cmd: 0.0,
        }
    }

    pub fn apply(&mut self, cmd: Command) {
        self.speed_cmd = cmd.speed;
        self.heading_cmd = cmd.heading.angle();
    }
}

/// Bookkeeping for the robust pursuit law, anchored at the engagement instant.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PursuitState {
    pub initial_circle: ApolloniusCircle,
    pub epsilon: f64,
    pub current_circle: ApolloniusCircle,
    pub y_vec: Vec2,
    pub x_ad_hat: Vec2,
}

impl PursuitState {
    pub fn new(x_a: Vec2, x_d: Vec2, epsilon: f64, params: &GameParams) -> Self {
        let circle = apollonius_circle(x_a, x_d, params);
        Self {
            initial_circle: circle,
            epsilon,
            current_circle: circle,
            y_vec: Vec2::ZERO,
            x_ad_hat: (x_a - x_d).normalized().unwrap_or(Vec2::ZERO),
        }
    }

    pub fn update(&mut self, x_a: Vec2, x_d: Vec2, params: &GameParams) {
        self.current_circle = apollonius_circle(x_a, x_d, params);
        self.y_vec = self.current_circle.center - self.initial_circle.center;
        self.x_ad_hat = (x_a - x_d).normalized().unwrap_or(Vec2::ZERO);
    }
}

/// Robust pursuit heading: unit speed along
/// `(r_C(t0) + eps - r_C(t)) x_ad + nu y(t)`.
pub fn pursuit_heading(
    state: &mut PursuitState,
    x_a: Vec2,
    x_d: Vec2,
    params: &GameParams,
) -> Result<(f64, Vec2), StrategyError> {
    state.update(x_a, x_d, params);
    let gain = state.initial_circle.radius + state.epsilon - state.current_circle.radius;
    let raw = state.x_ad_hat * gain + state.y_vec * params.nu();
    raw.normalized().map(|h| (1.0, h)).ok_or(StrategyError::ZeroVector)
}

/// Pursuit command with the pure-pursuit fallback for a vanishing heading.
pub fn pursue(state: &mut PursuitState, x_a: Vec2, x_d: Vec2, params: &GameParams) -> Command {
    match pursuit_heading(state, x_a, x_d, params) {
        Ok((speed, heading)) => Command { speed, heading },
        Err(err) => {
            log::debug!("{err}; falling back to pure pursuit");
            match (x_a - x_d).normalized() {
                Some(heading) => Command { speed: 1.0, heading },
                None => Command::HOLD,
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DefenderKind {
    Optimal,
    PurePursuit,
    /// Never moves.
    Idle,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AttackerKind {
    Optimal,
    PureEvader,
}

impl DefenderKind {
    pub fn name(self) -> &'static str {
        match self {
            DefenderKind::Optimal => "optimal",
            DefenderKind::PurePursuit => "pure_pursuit",
            DefenderKind::Idle => "idle",
        }
    }
}

impl AttackerKind {
    pub fn name(self) -> &'static str {
        match self {
            AttackerKind::Optimal => "optimal",
            AttackerKind::PureEvader => "pure_evader",
        }
    }
}

impl fmt::Display for DefenderKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl fmt::Display for AttackerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DefenderKind {
    type Err = StrategyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "optimal" => Ok(DefenderKind::Optimal),
            "pure_pursuit" | "pp" => Ok(DefenderKind::PurePursuit),
            "idle" => Ok(DefenderKind::Idle),
            _ => Err(StrategyError::UnknownStrategy {
                role: "defender",
                name: s.to_string(),
            }),
        }
    }
}

impl FromStr for AttackerKind {
    type Err = StrategyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "optimal" => Ok(AttackerKind::Optimal),
            "pure_evader" | "pe" => Ok(AttackerKind::PureEvader),
            _ => Err(StrategyError::UnknownStrategy {
                role: "attacker",
                name: s.to_string(),
            }),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Strategies {
    pub defender: DefenderKind,
    pub attacker: AttackerKind,
}

impl Strategies {
    pub const OPTIMAL: Strategies = Strategies {
        defender: DefenderKind::Optimal,
        attacker: AttackerKind::Optimal,
    };

    pub fn new(defender: DefenderKind, attacker: AttackerKind) -> Self {
        Self { defender, attacker }
    }
}

/// Defender route to an engagement point: hold at `start` until
/// `departure`, then straight to `target` at constant speed, arriving at
/// `arrival`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Travel {
    pub config: EngagementConfig,
    pub start: Vec2,
    pub target: Vec2,
    pub departure: f64,
    pub arrival: f64,
    pub planned_capture: Vec2,
}

impl Travel {
    pub fn position_at(&self, t: f64) -> Vec2 {
        if t <= self.departure {
            self.start
        } else if t >= self.arrival {
            self.target
        } else {
            let w = (t - self.departure) / (self.arrival - self.departure);
            self.start + (self.target - self.start) * w
        }
    }

    pub fn speed(&self) -> f64 {
        let span = self.arrival - self.departure;
        if span > 0.0 {
            self.start.distance(self.target) / span
        } else {
            0.0
        }
    }
}

/// Smallest distance over `s in [0, span]` between `p + u s` and `q + v s`.
fn min_separation(p: Vec2, u: Vec2, q: Vec2, v: Vec2, span: f64) -> f64 {
    let d = p - q;
    let w = u - v;
    let ww = w.norm_sq();
    let s = if ww > 0.0 { (-d.dot(w) / ww).clamp(0.0, span) } else { 0.0 };
    (d + w * s).norm()
}

/// True when a radially advancing attacker (entering at `theta_a0`) does not
/// come within its sensing radius of the defender following `travel` before
/// the planned arrival. `elapsed` is the time the travel starts from.
pub fn travel_is_undetected(travel: &Travel, theta_a0: f64, elapsed: f64, params: &GameParams) -> bool {
    let tol = 1e-7;
    let rho = params.rho_a();
    let radial = Vec2::unit(theta_a0);
    let attacker_at = |t: f64| radial * (params.outer_radius() - params.nu() * t);
    let va = radial * -params.nu();
    let hold = travel.departure - elapsed;
    if hold > 0.0 && min_separation(attacker_at(elapsed), va, travel.start, Vec2::ZERO, hold) < rho - tol {
        return false;
    }
    let t0 = travel.departure.max(elapsed);
    let span = travel.arrival - t0;
    if span <= 0.0 {
        return attacker_at(elapsed).distance(travel.start) >= rho - tol;
    }
    let vd = (travel.target - travel.position_at(t0)) * (1.0 / span);
    min_separation(attacker_at(t0), va, travel.position_at(t0), vd, span) >= rho - tol
}

/// Candidate routes for an engagement, in order of preference: depart late
/// at full speed, or depart now at the speed that arrives on time.
pub fn travel_plans(x_d: Vec2, config: EngagementConfig, theta_a0: f64, elapsed: f64, params: &GameParams) -> [Travel; 2] {
    let target = config.defender_position(theta_a0, params);
    let dist = x_d.distance(target);
    let base = Travel {
        config,
        start: x_d,
        target,
        departure: elapsed,
        arrival: config.tau,
        planned_capture: target,
    };
    [
        Travel {
            departure: (config.tau - dist).max(elapsed),
            ..base
        },
        base,
    ]
}

/// First detection-free route to `config`, if any.
pub fn undetected_travel(
    x_d: Vec2,
    config: EngagementConfig,
    theta_a0: f64,
    elapsed: f64,
    params: &GameParams,
) -> Option<Travel> {
    travel_plans(x_d, config, theta_a0, elapsed, params)
        .into_iter()
        .find(|t| t.speed() <= 1.0 + 1e-9 && travel_is_undetected(t, theta_a0, elapsed, params))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DefenderPhase {
    Idle,
    Traveling(Travel),
    Pursuing(PursuitState),
    /// Conceded the current game; heading to the target center.
    Restarting,
    /// Heading to the center before planning (non-convex environments).
    Recentering,
}

/// What the defender knows at one instant.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Observation {
    pub t: f64,
    pub x_a: Vec2,
    pub x_d: Vec2,
    pub theta_a0: f64,
    /// The attacker has sensed the defender.
    pub engaged: bool,
}

/// Defender-side tuning shared by all games of a run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DefenderTuning {
    pub epsilon: f64,
    pub search: SearchOptions,
    pub dt: f64,
}

/// Opening phase of the optimal defender for an attacker entering at
/// `theta_a0`, `elapsed` time units into the game.
pub fn plan_defense(
    x_d: Vec2,
    theta_a0: f64,
    elapsed: f64,
    model: &CaptureModel,
    tuning: &DefenderTuning,
) -> DefenderPhase {
    let params = model.params();
    // In a non-convex environment the straight route would cross the missing
    // part of the disk.
    if params.phi() > 0.5 * PI && elapsed == 0.0 && (x_d.angle() - theta_a0).abs() > PI {
        return DefenderPhase::Recentering;
    }
    let admissible = |c: &EngagementConfig| undetected_travel(x_d, *c, theta_a0, elapsed, params).is_some();
    let solution = choose_engagement_with(x_d, theta_a0, elapsed, model, &tuning.search, admissible)
        .or_else(|| choose_engagement_with(x_d, theta_a0, elapsed, model, &tuning.search, |_| true));
    match solution {
        Some(sol) => {
            let travel = undetected_travel(x_d, sol.engagement, theta_a0, elapsed, params)
                .unwrap_or(travel_plans(x_d, sol.engagement, theta_a0, elapsed, params)[0]);
            DefenderPhase::Traveling(Travel {
                planned_capture: sol.capture_point,
                ..travel
            })
        }
        None => DefenderPhase::Restarting,
    }
}

/// Initial phase for a defender of the given kind.
pub fn initial_defender_phase(
    kind: DefenderKind,
    x_d: Vec2,
    theta_a0: f64,
    model: &CaptureModel,
    tuning: &DefenderTuning,
) -> DefenderPhase {
    match kind {
        DefenderKind::Optimal => plan_defense(x_d, theta_a0, 0.0, model, tuning),
        DefenderKind::PurePursuit | DefenderKind::Idle => DefenderPhase::Idle,
    }
}

/// One decision step of the optimal defender. Updates `phase` in place.
pub fn defender_policy(
    phase: &mut DefenderPhase,
    obs: &Observation,
    model: &CaptureModel,
    tuning: &DefenderTuning,
) -> Command {
    let params = model.params();
    if let DefenderPhase::Traveling(travel) = *phase {
        if obs.engaged || obs.t >= travel.arrival {
            *phase = DefenderPhase::Pursuing(PursuitState::new(obs.x_a, obs.x_d, tuning.epsilon, params));
        }
    }
    if matches!(phase, DefenderPhase::Recentering) && obs.x_d.norm() <= 1e-9 {
        *phase = if obs.engaged {
            DefenderPhase::Pursuing(PursuitState::new(obs.x_a, obs.x_d, tuning.epsilon, params))
        } else {
            plan_defense(obs.x_d, obs.theta_a0, obs.t, model, tuning)
        };
    }
    match phase {
        DefenderPhase::Idle => Command::HOLD,
        DefenderPhase::Traveling(travel) => {
            let next = travel.position_at(obs.t + tuning.dt);
            Command::toward(obs.x_d, next, 1.0, tuning.dt)
        }
        DefenderPhase::Pursuing(state) => pursue(state, obs.x_a, obs.x_d, params),
        DefenderPhase::Restarting | DefenderPhase::Recentering => Command::toward(obs.x_d, Vec2::ZERO, 1.0, tuning.dt),
    }
}

/// Pure pursuit: full speed straight at the attacker while it is inside the
/// sensing region.
pub fn pp_defender_policy(obs: &Observation, params: &GameParams) -> Command {
    if !params.sensing_region().contains_with_tol(obs.x_a, 1e-9) {
        return Command::HOLD;
    }
    match (obs.x_a - obs.x_d).normalized() {
        Some(heading) => Command { speed: 1.0, heading },
        None => Command::HOLD,
    }
}

/// What a committed attacker is trying to achieve.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Intent {
    Breach,
    Evade,
    Capture,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum AttackerMode {
    /// Has not sensed the defender yet.
    Radial,
    Committed { aim: Vec2, intent: Intent },
    Fleeing,
}

const BOUNDARY_SAMPLES: usize = 720;

/// Closest point to `x_a` in `disk` that also satisfies `inside`, given the
/// unconstrained closest point of the region.
fn nearest_in_disk<F: Fn(Vec2) -> bool>(disk: &ApolloniusCircle, x_a: Vec2, region_nearest: Vec2, inside: F) -> Option<Vec2> {
    if disk.contains(region_nearest) {
        return Some(region_nearest);
    }
    (0..BOUNDARY_SAMPLES)
        .map(|k| disk.point_at(2.0 * PI * k as f64 / BOUNDARY_SAMPLES as f64))
        .filter(|x| inside(*x))
        .min_by(|a, b| a.distance(x_a).total_cmp(&b.distance(x_a)))
}

/// Straight-line response of a rational attacker to the circle it sees:
/// breach if it can, otherwise evade if it can, otherwise run to the capture
/// point least favorable to the defender. Overlaps thinner than `margin`
/// are not worth trying, since the pursuit law captures within that margin.
pub fn attacker_response(x_a: Vec2, x_d: Vec2, margin: f64, model: &CaptureModel) -> (Vec2, Intent) {
    let params = model.params();
    let ac = apollonius_circle(x_a, x_d, params);
    let shrunk = ApolloniusCircle {
        radius: (ac.radius - margin).max(0.0),
        ..ac
    };
    if circle_meets_target(&shrunk, params) {
        let nearest = closest_point_in_sector(x_a, params.r_t(), params.phi());
        let target = params.target();
        if let Some(aim) = nearest_in_disk(&ac, x_a, nearest, |x| target.contains(x)) {
            return (aim, Intent::Breach);
        }
    }
    if circle_meets_tsr_exterior(&shrunk, params) {
        let re = params.outer_radius();
        let nearest = closest_point_in_exit_region(x_a, re, params.phi());
        let exit = |x: Vec2| x.norm() >= re && x.angle().abs() <= params.phi();
        if let Some(aim) = nearest_in_disk(&ac, x_a, nearest, exit) {
            // aim just past the arc so the crossing registers
            return (aim * (1.0 + 1e-6), Intent::Evade);
        }
    }
    let (aim, _) = optimal_capture_point(&ac, model, BOUNDARY_SAMPLES);
    (aim, Intent::Capture)
}

/// One decision step of the attacker. `detected` is true once the defender
/// is (or has been) inside the sensing radius.
#[allow(clippy::too_many_arguments)]
pub fn attacker_policy(
    kind: AttackerKind,
    mode: &mut AttackerMode,
    x_a: Vec2,
    x_d: Vec2,
    detected: bool,
    margin: f64,
    model: &CaptureModel,
    dt: f64,
) -> Command {
    let params = model.params();
    let nu = params.nu();
    if detected && matches!(mode, AttackerMode::Radial) {
        *mode = match kind {
            AttackerKind::Optimal => {
                let (aim, intent) = attacker_response(x_a, x_d, margin, model);
                AttackerMode::Committed { aim, intent }
            }
            AttackerKind::PureEvader => AttackerMode::Fleeing,
        };
    }
    if let AttackerMode::Committed { aim, .. } = *mode {
        if x_a.distance(aim) <= 1e-9 {
            let (aim, intent) = attacker_response(x_a, x_d, margin, model);
            *mode = AttackerMode::Committed { aim, intent };
        }
    }
    match *mode {
        AttackerMode::Radial => Command::toward(x_a, Vec2::ZERO, nu, dt),
        AttackerMode::Committed { aim, .. } => Command::toward(x_a, aim, nu, dt),
        AttackerMode::Fleeing => match (x_a - x_d).normalized() {
            Some(heading) => Command { speed: nu, heading },
            None => Command::toward(x_a, Vec2::ZERO, nu, dt),
        },
    }
}

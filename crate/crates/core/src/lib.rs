//! Single-defender, sequential-attacker target defense in a conical
//! environment.
//!
//! A defender guards a circular target at the apex of a cone. Attackers
//! arrive one at a time on the outer arc and run radially inward until they
//! sense the defender; from then on both sides play the Apollonius-circle
//! game. The crate computes engagement sets, capture probabilities and
//! Markov-chain performance bounds, and simulates long attacker sequences.

pub mod bounds;
pub mod engagement;
pub mod geometry;
pub mod probability;
pub mod report;
pub mod sim;
pub mod strategies;

pub use bounds::{markov_bound, p_star, q_star, BoundCurves, MarkovBoundSpec};
pub use engagement::{
    capturable, critical_times, max_theta_max, theta_max, CriticalTimes, EngagementConfig, EngagementError,
    EngagementGrid, EngagementInterval, ThresholdSolveTrace,
};
pub use geometry::{make_params, ApolloniusCircle, ConeRegion, GameParams, ParameterViolation, Vec2};
pub use probability::{
    capture_distribution, capture_probability, choose_engagement, optimal_capture_point, CaptureModel,
    CaptureProbabilityField, EngagementSetKind, ProbabilityError, SearchOptions, StackelbergSolution,
};
pub use sim::{
    monte_carlo, parameter_sweep, run_game, run_sequence, strategy_matchup, GameOutcome, MatchupCurve,
    MonteCarloSummary, OutcomeKind, RestartMode, Scenario, SimConfig, SimError, SweepParam, SweepRow, TrialRecord,
};
pub use strategies::{AgentState, AttackerKind, DefenderKind, DefenderPhase, PursuitState, Strategies};

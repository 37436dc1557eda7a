//! Two-state Markov-chain bounds on the long-run capture percentage.
//!
//! State 1 is "defender at the target center" (next capture certain), state 2
//! is "defender at a previous capture point" (next capture with probability
//! `star`). Capturing moves the chain to state 2; a miss sends the defender
//! back to state 1.

use crate::geometry::{ApolloniusCircle, GameParams, Vec2};
use crate::probability::{optimal_capture_point, CaptureModel, CAPTURE_POINT_SAMPLES};

/// Rewards and state distribution of the bounding chain.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MarkovBoundSpec {
    pub p_vec: [f64; 2],
    pub q_vec: [f64; 2],
    pub eta: [f64; 2],
}

impl MarkovBoundSpec {
    pub fn new(p_star: f64, q_star: f64) -> Self {
        Self {
            p_vec: [1.0, p_star],
            q_vec: [1.0, q_star],
            eta: [1.0, 0.0],
        }
    }
}

/// Capture probability at the corner of the capture cone.
pub fn p_star(model: &CaptureModel) -> f64 {
    let params = model.params();
    model.probability(Vec2::polar(params.capture_cone_radius(), params.phi()))
}

/// Capture probability at the attacker's best capture point on the circle
/// tangent to the target, centered on the bisector.
pub fn q_star(model: &CaptureModel) -> f64 {
    q_star_point(model).1
}

pub fn q_star_point(model: &CaptureModel) -> (Vec2, f64) {
    let params: &GameParams = model.params();
    let ac = ApolloniusCircle {
        center: Vec2::new(params.r_t() + params.engagement_radius(), 0.0),
        radius: params.engagement_radius(),
    };
    optimal_capture_point(&ac, model, CAPTURE_POINT_SAMPLES)
}

/// One step of the chain.
pub fn step_distribution(eta: [f64; 2], star: f64) -> [f64; 2] {
    [eta[1] * (1.0 - star), eta[0] + eta[1] * star]
}

/// Expected running capture percentage after each of the first `n` games,
/// starting with the defender at the center.
pub fn markov_bound(n: usize, star: f64) -> Vec<f64> {
    let reward = [1.0, star];
    let mut eta = [1.0, 0.0];
    let mut total = 0.0;
    (1..=n)
        .map(|i| {
            total += reward[0] * eta[0] + reward[1] * eta[1];
            eta = step_distribution(eta, star);
            100.0 * total / i as f64
        })
        .collect()
}

/// Long-run capture percentage of the chain.
pub fn stationary_percentage(star: f64) -> f64 {
    100.0 / (2.0 - star)
}

/// Lower and upper bound curves side by side.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundCurves {
    pub p_star: f64,
    pub q_star: f64,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl BoundCurves {
    pub fn compute(model: &CaptureModel, n: usize) -> Self {
        let (p, q) = (p_star(model), q_star(model));
        Self {
            p_star: p,
            q_star: q,
            lower: markov_bound(n, p),
            upper: markov_bound(n, q),
        }
    }

    pub fn lower_stationary(&self) -> f64 {
        stationary_percentage(self.p_star)
    }

    pub fn upper_stationary(&self) -> f64 {
        stationary_percentage(self.q_star)
    }
}

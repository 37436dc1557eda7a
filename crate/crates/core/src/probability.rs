//! Capture-probability field, capture points and the defender's max-min
//! engagement choice.

use std::f64::consts::PI;

use thiserror::Error;

use crate::engagement::{
    golden_max, max_theta_max, reachable_engagement_set_from, simplified_engagement_set_from, EngagementConfig,
    EngagementGrid,
};
use crate::geometry::{ApolloniusCircle, GameParams, Vec2, GEOM_TOL};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProbabilityError {
    #[error("point ({x:.6}, {y:.6}) lies outside the game environment")]
    OutOfEnvironment { x: f64, y: f64 },
}

/// Default radial resolution of the memoized `theta_max(r)` table.
pub const DEFAULT_RADIAL_POINTS: usize = 701;

/// Lemma-style capture probability from a reach bound and a polar angle.
pub fn probability_from_reach(theta_max: f64, theta_d0: f64, phi: f64) -> f64 {
    let a = theta_d0.abs();
    let p = if a <= phi - theta_max {
        theta_max / phi
    } else {
        (theta_max + phi - a) / (2.0 * phi)
    };
    p.clamp(0.0, 1.0)
}

/// Capture probability of a defender at `x` against the next uniformly
/// arriving attacker, evaluated with a fresh `theta_max` optimization.
pub fn capture_probability(x: Vec2, params: &GameParams, grid: &EngagementGrid) -> Result<f64, ProbabilityError> {
    check_in_environment(x, params)?;
    let r = x.norm();
    if r <= GEOM_TOL {
        return Ok(1.0);
    }
    let theta_max = max_theta_max(r, params, grid).map(|o| o.value).unwrap_or(0.0);
    Ok(probability_from_reach(theta_max, x.angle(), params.phi()))
}

fn check_in_environment(x: Vec2, params: &GameParams) -> Result<(), ProbabilityError> {
    if params.environment().contains_with_tol(x, 1e-6) {
        Ok(())
    } else {
        Err(ProbabilityError::OutOfEnvironment { x: x.x, y: x.y })
    }
}

/// `theta_max(r)` memoized on a uniform radial grid over `[0, r_t + rho_t]`
/// and interpolated linearly. Immutable once built, so it can be shared
/// across worker threads.
#[derive(Clone, Debug)]
pub struct CaptureModel {
    params: GameParams,
    grid: EngagementGrid,
    step: f64,
    table: Vec<f64>,
}

impl CaptureModel {
    pub fn new(params: GameParams, grid: EngagementGrid) -> Self {
        Self::with_resolution(params, grid, DEFAULT_RADIAL_POINTS)
    }

    pub fn with_resolution(params: GameParams, grid: EngagementGrid, radial_points: usize) -> Self {
        use rayon::prelude::*;
        let n = radial_points.max(2);
        let step = params.outer_radius() / (n - 1) as f64;
        let table: Vec<f64> = (0..n)
            .into_par_iter()
            .map(|i| {
                let r = step * i as f64;
                max_theta_max(r, &params, &grid).map(|o| o.value).unwrap_or(0.0)
            })
            .collect();
        log::debug!("theta_max table built with {n} radii");
        Self {
            params,
            grid,
            step,
            table,
        }
    }

    pub fn params(&self) -> &GameParams {
        &self.params
    }

    pub fn grid(&self) -> &EngagementGrid {
        &self.grid
    }

    /// Interpolated `theta_max(r)`; `r` is clamped to the table range.
    pub fn theta_max(&self, r: f64) -> f64 {
        let s = (r / self.step).clamp(0.0, (self.table.len() - 1) as f64);
        let i = (s.floor() as usize).min(self.table.len() - 2);
        let w = s - i as f64;
        self.table[i] * (1.0 - w) + self.table[i + 1] * w
    }

    /// Table-backed counterpart of [`crate::engagement::capturable`].
    pub fn capturable(&self, theta_a0: f64, x_d0: Vec2) -> bool {
        let r = x_d0.norm();
        r <= GEOM_TOL || (theta_a0 - x_d0.angle()).abs() <= self.theta_max(r)
    }

    /// Capture probability without the environment check.
    pub fn probability(&self, x: Vec2) -> f64 {
        let r = x.norm();
        if r <= GEOM_TOL {
            return 1.0;
        }
        probability_from_reach(self.theta_max(r), x.angle(), self.params.phi())
    }

    pub fn capture_probability(&self, x: Vec2) -> Result<f64, ProbabilityError> {
        check_in_environment(x, &self.params)?;
        Ok(self.probability(x))
    }
}

/// Capture probability sampled on a polar grid over the environment.
#[derive(Clone, Debug, PartialEq)]
pub struct CaptureProbabilityField {
    pub radii: Vec<f64>,
    pub angles: Vec<f64>,
    /// Row-major: `values[i * angles.len() + j]` belongs to `(radii[i], angles[j])`.
    pub values: Vec<f64>,
}

impl CaptureProbabilityField {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.angles.len() + j]
    }

    pub fn cells(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.radii.iter().enumerate().flat_map(move |(i, &r)| {
            self.angles.iter().enumerate().map(move |(j, &theta)| (r, theta, self.get(i, j)))
        })
    }
}

/// Evaluates the capture probability at `n_radii x n_angles` grid nodes,
/// radii spanning `[0, r_t + rho_t]` and angles spanning `[-phi, phi]`.
pub fn capture_distribution(model: &CaptureModel, n_radii: usize, n_angles: usize) -> CaptureProbabilityField {
    let params = model.params();
    let nodes = |lo: f64, hi: f64, n: usize| -> Vec<f64> {
        if n <= 1 {
            return vec![lo];
        }
        (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
    };
    let radii = nodes(0.0, params.outer_radius(), n_radii);
    let angles = nodes(-params.phi(), params.phi(), n_angles);
    let mut values = Vec::with_capacity(radii.len() * angles.len());
    for &r in &radii {
        for &theta in &angles {
            values.push(model.probability(Vec2::polar(r, theta)));
        }
    }
    CaptureProbabilityField { radii, angles, values }
}

/// Default boundary samples for [`optimal_capture_point`].
pub const CAPTURE_POINT_SAMPLES: usize = 720;
const TIE_TOL: f64 = 1e-12;

/// True when `(p, x)` beats `(best_p, best_x)`: lower probability, then
/// larger `|angle|`, then positive angle.
fn better_capture_point(p: f64, x: Vec2, best_p: f64, best_x: Vec2) -> bool {
    if p < best_p - TIE_TOL {
        return true;
    }
    if p > best_p + TIE_TOL {
        return false;
    }
    let (a, b) = (x.angle(), best_x.angle());
    if a.abs() > b.abs() + TIE_TOL {
        return true;
    }
    a.abs() >= b.abs() - TIE_TOL && a > 0.0 && b <= 0.0
}

/// Point on the boundary of `ac` (restricted to the environment) where the
/// capture probability of the next game is smallest, with that probability.
/// A degenerate circle yields its center.
pub fn optimal_capture_point(ac: &ApolloniusCircle, model: &CaptureModel, samples: usize) -> (Vec2, f64) {
    let env = model.params().environment();
    if ac.radius < GEOM_TOL {
        return (ac.center, model.probability(ac.center));
    }
    let n = samples.max(8);
    let step = 2.0 * PI / n as f64;
    let mut best: Option<(f64, Vec2, f64)> = None;
    for k in 0..n {
        let phase = step * k as f64;
        let x = ac.point_at(phase);
        if !env.contains_with_tol(x, 1e-6) {
            continue;
        }
        let p = model.probability(x);
        if best.is_none_or(|(_, bx, bp)| better_capture_point(p, x, bp, bx)) {
            best = Some((phase, x, p));
        }
    }
    let Some((phase, x, p)) = best else {
        // no boundary point inside the environment: fall back to the center
        return (ac.center, model.probability(ac.center));
    };
    let (t, neg_p) = golden_max(phase - step, phase + step, 1e-9, |t| {
        let y = ac.point_at(t);
        if env.contains_with_tol(y, 1e-6) {
            -model.probability(y)
        } else {
            f64::NEG_INFINITY
        }
    });
    let refined = ac.point_at(t);
    if better_capture_point(-neg_p, refined, p, x) {
        (refined, -neg_p)
    } else {
        (x, p)
    }
}

/// Which engagement set the defender optimizes over.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum EngagementSetKind {
    /// Target-tangent configurations only.
    #[default]
    Simplified,
    /// Every grid configuration that guarantees capture.
    Full,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SearchOptions {
    /// Boundary samples for the inner minimization while ranking configurations.
    pub inner_samples: usize,
    /// Boundary samples when resolving the winning configuration.
    pub final_samples: usize,
    pub set: EngagementSetKind,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            inner_samples: 90,
            final_samples: CAPTURE_POINT_SAMPLES,
            set: EngagementSetKind::Simplified,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StackelbergSolution {
    pub engagement: EngagementConfig,
    pub capture_point: Vec2,
    /// Capture probability at the attacker's best capture point.
    pub value: f64,
}

/// Max-min engagement choice for a defender at `x_d0` against an attacker
/// entering at `theta_a0`, `elapsed` time units after its arrival.
/// Configurations rejected by `admissible` are skipped. `None` when no
/// configuration remains.
pub fn choose_engagement_with<F>(
    x_d0: Vec2,
    theta_a0: f64,
    elapsed: f64,
    model: &CaptureModel,
    options: &SearchOptions,
    admissible: F,
) -> Option<StackelbergSolution>
where
    F: Fn(&EngagementConfig) -> bool,
{
    let params = model.params();
    let candidates = match options.set {
        EngagementSetKind::Simplified => simplified_engagement_set_from(x_d0, theta_a0, elapsed, params, model.grid()),
        EngagementSetKind::Full => reachable_engagement_set_from(x_d0, theta_a0, elapsed, params, model.grid()),
    };
    let mut best: Option<(EngagementConfig, f64)> = None;
    for config in candidates.into_iter().filter(|c| admissible(c)) {
        let ac = config.circle(theta_a0, params);
        let (_, value) = optimal_capture_point(&ac, model, options.inner_samples);
        // strict improvement keeps the earliest configuration on ties
        if best.is_none_or(|(_, b)| value > b + TIE_TOL) {
            best = Some((config, value));
        }
    }
    let (engagement, _) = best?;
    let ac = engagement.circle(theta_a0, params);
    let (capture_point, value) = optimal_capture_point(&ac, model, options.final_samples);
    Some(StackelbergSolution {
        engagement,
        capture_point,
        value,
    })
}

/// Max-min engagement choice over the configured engagement set.
pub fn choose_engagement(
    x_d0: Vec2,
    theta_a0: f64,
    model: &CaptureModel,
    options: &SearchOptions,
) -> Option<StackelbergSolution> {
    choose_engagement_with(x_d0, theta_a0, 0.0, model, options, |_| true)
}

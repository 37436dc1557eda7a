//! Engagement configurations: critical times, the guard and escape angular
//! thresholds, the reach bound `theta_max` and the discretized capturable
//! sets.
//!
//! An [`EngagementConfig`] stores the engagement angle *relative* to the
//! attacker's outward radial direction: `theta = 0` puts the defender
//! directly behind the attacker, `theta = pi` between the attacker and the
//! target.

use std::f64::consts::PI;

use thiserror::Error;

use crate::geometry::{
    apollonius_circle, circle_meets_target, circle_meets_tsr_exterior, distance_to_exit_region,
    ApolloniusCircle, GameParams, Vec2, GEOM_TOL,
};

/// Bisection cap for the implicit corner-case threshold equations.
pub const THRESHOLD_MAX_ITER: u32 = 100;
/// Bisection tolerance (radians) for the corner-case threshold equations.
pub const THRESHOLD_TOL: f64 = 1e-10;
/// Guard band on the `theta_max` arccos argument.
const ACOS_GUARD: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EngagementError {
    #[error("engagement configuration cannot be reached in time (arccos argument {argument:.6})")]
    Unreachable { argument: f64 },
    #[error("no capturable engagement configuration exists at r = {r}")]
    NoCapturableConfiguration { r: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EngagementConfig {
    /// Time from the attacker's arrival on the outer arc to engagement.
    pub tau: f64,
    /// Defender angle on the attacker's sensing circle, relative to the
    /// attacker's outward radial direction.
    pub theta: f64,
}

/// Distance of a radially advancing attacker from the target center after `tau`.
#[inline]
pub fn attacker_radius(tau: f64, params: &GameParams) -> f64 {
    params.outer_radius() - params.nu() * tau
}

impl EngagementConfig {
    pub fn new(tau: f64, theta: f64) -> Self {
        Self { tau, theta }
    }

    pub fn attacker_position(&self, theta_a0: f64, params: &GameParams) -> Vec2 {
        Vec2::polar(attacker_radius(self.tau, params), theta_a0)
    }

    /// Where the defender stands when the attacker first senses it.
    pub fn defender_position(&self, theta_a0: f64, params: &GameParams) -> Vec2 {
        self.attacker_position(theta_a0, params) + Vec2::polar(params.rho_a(), theta_a0 + self.theta)
    }

    pub fn circle(&self, theta_a0: f64, params: &GameParams) -> ApolloniusCircle {
        apollonius_circle(
            self.attacker_position(theta_a0, params),
            self.defender_position(theta_a0, params),
            params,
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CriticalTimes {
    pub tau1: f64,
    pub tau2: f64,
    pub tau3: f64,
    pub tau4: f64,
}

pub fn critical_times(params: &GameParams) -> CriticalTimes {
    let (nu, rho_t, rho_a) = (params.nu(), params.rho_t(), params.rho_a());
    CriticalTimes {
        tau1: rho_t / nu - rho_a / (1.0 - nu),
        tau2: rho_t / nu - rho_a / (1.0 + nu),
        tau3: rho_a / (1.0 + nu),
        tau4: rho_a / (1.0 - nu),
    }
}

/// Intermediate quantities recorded while solving a threshold equation.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ThresholdSolveTrace {
    pub rhs_guard: f64,
    pub rhs_escape: f64,
    /// Corner-case `M` at the returned angle (0 when the interior case applied).
    pub m_corner: f64,
    /// Corner-case `M-hat` at the returned angle (0 when the interior case applied).
    pub m_hat_corner: f64,
    pub solver_iterations: u32,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThresholdSolution {
    pub value: Option<f64>,
    pub trace: ThresholdSolveTrace,
}

/// Right-hand side of the interior guard inequality on `sin^2(theta/2)`.
pub fn guard_rhs(tau: f64, params: &GameParams) -> f64 {
    let (r, br, gr) = radial_terms(tau, params);
    let rim = params.r_t() + gr;
    (rim * rim - (r - br) * (r - br)) / (4.0 * br * r)
}

/// Right-hand side of the interior escape-prevention inequality on `sin^2(theta/2)`.
pub fn escape_rhs(tau: f64, params: &GameParams) -> f64 {
    let (r, br, gr) = radial_terms(tau, params);
    let rim = params.outer_radius() - gr;
    (rim * rim - (r - br) * (r - br)) / (4.0 * br * r)
}

#[inline]
fn radial_terms(tau: f64, params: &GameParams) -> (f64, f64, f64) {
    (
        attacker_radius(tau, params),
        params.beta() * params.rho_a(),
        params.gamma() * params.rho_a(),
    )
}

fn half_angle_from_rhs(rhs: f64) -> f64 {
    2.0 * rhs.clamp(0.0, 1.0).sqrt().asin()
}

/// Which side of the attacker's radial line the defender engages from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Positive,
    Negative,
}

impl Side {
    pub const BOTH: [Side; 2] = [Side::Positive, Side::Negative];

    pub fn sign(self) -> f64 {
        match self {
            Side::Positive => 1.0,
            Side::Negative => -1.0,
        }
    }
}

fn center_at(tau: f64, theta_a0: f64, deviation: f64, params: &GameParams) -> Vec2 {
    let (r, br, _) = radial_terms(tau, params);
    Vec2::polar(r, theta_a0) - Vec2::polar(br, theta_a0 + deviation)
}

/// Corner-case `M` for the guard equation against the target corner `r_t u(s phi)`.
fn corner_m(tau: f64, theta_a0: f64, theta_eng: f64, s: f64, params: &GameParams) -> f64 {
    let (r, br, gr) = radial_terms(tau, params);
    let rt = params.r_t();
    let corner = s * params.phi();
    gr * gr - rt * rt + 2.0 * r * rt * (theta_a0 - corner).cos() - 2.0 * br * rt * (theta_eng - corner).cos()
}

/// Corner-case `M-hat` against the outer corner `(r_t + rho_t) u(s phi)`.
fn corner_m_hat(tau: f64, theta_a0: f64, theta_eng: f64, s: f64, params: &GameParams) -> f64 {
    let (r, br, gr) = radial_terms(tau, params);
    let re = params.outer_radius();
    let corner = s * params.phi();
    gr * gr - re * re + 2.0 * r * re * (theta_a0 - corner).cos() - 2.0 * br * re * (theta_eng - corner).cos()
}

fn bisect<F: Fn(f64) -> bool>(mut lo: f64, mut hi: f64, ok_at_hi: F) -> (f64, u32) {
    let mut iterations = 0;
    while hi - lo > THRESHOLD_TOL && iterations < THRESHOLD_MAX_ITER {
        let mid = 0.5 * (lo + hi);
        if ok_at_hi(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
        iterations += 1;
    }
    (hi, iterations)
}

/// Guard threshold for one engagement side.
fn guard_side(tau: f64, theta_a0: f64, side: Side, params: &GameParams, trace: &mut ThresholdSolveTrace) -> Option<f64> {
    let rhs = guard_rhs(tau, params);
    if rhs <= 0.0 {
        return Some(0.0);
    }
    if rhs > 1.0 {
        return None;
    }
    let interior = half_angle_from_rhs(rhs);
    let sigma = side.sign();
    let center = center_at(tau, theta_a0, sigma * interior, params);
    if center.angle().abs() <= params.phi() {
        return Some(interior);
    }
    // The interior solution puts the circle center beyond a side edge: solve
    // the corner equation instead. Its solution never exceeds the interior one.
    let s = center.angle().signum();
    let (r, br, _) = radial_terms(tau, params);
    let residual = |d: f64| {
        let c = center_at(tau, theta_a0, sigma * d, params);
        if c.angle().abs() <= params.phi() {
            let h = (0.5 * d).sin();
            h * h - rhs
        } else {
            let m = corner_m(tau, theta_a0, theta_a0 + sigma * d, s, params);
            let h = (0.5 * d).sin();
            h * h - (m - (r - br) * (r - br)) / (4.0 * br * r)
        }
    };
    let (d, iterations) = bisect(0.0, interior, |d| residual(d) >= 0.0);
    trace.solver_iterations += iterations;
    trace.m_corner = corner_m(tau, theta_a0, theta_a0 + sigma * d, s, params);
    Some(d)
}

/// Escape-prevention threshold for one engagement side.
fn escape_side(tau: f64, theta_a0: f64, side: Side, params: &GameParams, trace: &mut ThresholdSolveTrace) -> Option<f64> {
    let rhs = escape_rhs(tau, params);
    if rhs < 0.0 {
        return None;
    }
    if rhs >= 1.0 {
        return Some(PI);
    }
    let interior = half_angle_from_rhs(rhs);
    let sigma = side.sign();
    let center = center_at(tau, theta_a0, sigma * interior, params);
    if center.angle().abs() <= params.phi() {
        return Some(interior);
    }
    // Center beyond a side edge: the circle may only leave through the outer
    // arc, so the admissible band widens. Find where the circle first reaches
    // the exit region.
    let rc = params.engagement_radius();
    let contained = |d: f64| {
        let c = center_at(tau, theta_a0, sigma * d, params);
        distance_to_exit_region(c, params.outer_radius(), params.phi()) >= rc - GEOM_TOL
    };
    let (d, iterations) = bisect(interior, PI, |d| !contained(d));
    trace.solver_iterations += iterations;
    let s = center.angle().signum();
    trace.m_hat_corner = corner_m_hat(tau, theta_a0, theta_a0 + sigma * d, s, params);
    // `bisect` returns the first failing angle; step back onto the contained side.
    Some((d - THRESHOLD_TOL).max(interior))
}

pub fn solve_guard_threshold(tau: f64, theta_a0: f64, params: &GameParams) -> ThresholdSolution {
    let mut trace = ThresholdSolveTrace {
        rhs_guard: guard_rhs(tau, params),
        rhs_escape: escape_rhs(tau, params),
        ..Default::default()
    };
    let mut value = Some(0.0f64);
    for side in Side::BOTH {
        value = match (value, guard_side(tau, theta_a0, side, params, &mut trace)) {
            (Some(a), Some(b)) => Some(a.max(b)),
            _ => None,
        };
    }
    ThresholdSolution { value, trace }
}

pub fn solve_escape_threshold(tau: f64, theta_a0: f64, params: &GameParams) -> ThresholdSolution {
    let mut trace = ThresholdSolveTrace {
        rhs_guard: guard_rhs(tau, params),
        rhs_escape: escape_rhs(tau, params),
        ..Default::default()
    };
    let mut value = Some(PI);
    for side in Side::BOTH {
        value = match (value, escape_side(tau, theta_a0, side, params, &mut trace)) {
            (Some(a), Some(b)) => Some(a.min(b)),
            _ => None,
        };
    }
    ThresholdSolution { value, trace }
}

/// Smallest deviation `|theta_eng - theta_a0|` from which every larger
/// deviation guards the target. `Some(0)` when every angle guards, `None`
/// when none does.
pub fn guard_threshold(tau: f64, theta_a0: f64, params: &GameParams) -> Option<f64> {
    solve_guard_threshold(tau, theta_a0, params).value
}

/// Largest deviation below which escape is prevented. `Some(pi)` when every
/// angle prevents escape, `None` when none does.
pub fn escape_threshold(tau: f64, theta_a0: f64, params: &GameParams) -> Option<f64> {
    solve_escape_threshold(tau, theta_a0, params).value
}

/// Admissible `|theta|` band `[theta_lo, theta_hi]` at one engagement time.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EngagementInterval {
    pub tau: f64,
    pub theta_lo: f64,
    pub theta_hi: f64,
}

impl EngagementInterval {
    pub fn width(&self) -> f64 {
        self.theta_hi - self.theta_lo
    }
}

pub fn engagement_interval(tau: f64, theta_a0: f64, params: &GameParams) -> Option<EngagementInterval> {
    let theta_lo = guard_threshold(tau, theta_a0, params)?;
    let theta_hi = escape_threshold(tau, theta_a0, params)?;
    (theta_lo <= theta_hi).then_some(EngagementInterval { tau, theta_lo, theta_hi })
}

/// Band from the interior equations alone, i.e. for an attacker on the bisector.
fn interior_interval(tau: f64, params: &GameParams) -> Option<(f64, f64)> {
    let g = guard_rhs(tau, params);
    let e = escape_rhs(tau, params);
    if g > 1.0 || e < 0.0 {
        return None;
    }
    let lo = half_angle_from_rhs(g);
    let hi = half_angle_from_rhs(e);
    (lo <= hi).then_some((lo, hi))
}

/// Largest initial angular separation from which a defender at radius `r`
/// reaches `config` by the engagement time.
pub fn theta_max(config: EngagementConfig, r: f64, params: &GameParams) -> Result<f64, EngagementError> {
    let (psi, phi_eng) = reach_angles(config, r, config.tau, params)?;
    if psi >= PI {
        return Ok(PI);
    }
    Ok(psi + phi_eng)
}

/// Returns `(psi, phi_eng)`: the largest angle at the origin between the
/// defender's start and the engagement point that still allows arrival by
/// `travel` time units, and the angular offset of the engagement point from
/// the attacker's radial line (odd in `config.theta`).
fn reach_angles(
    config: EngagementConfig,
    r: f64,
    travel: f64,
    params: &GameParams,
) -> Result<(f64, f64), EngagementError> {
    let radius = attacker_radius(config.tau, params);
    let rho = params.rho_a();
    let r_eng = (radius * radius + rho * rho + 2.0 * radius * rho * config.theta.cos()).max(0.0).sqrt();
    let phi_eng = if r_eng > 1e-12 {
        (rho * config.theta.sin() / r_eng).clamp(-1.0, 1.0).asin()
    } else {
        0.0
    };
    let tau = travel.max(0.0);
    if r < 1e-12 || r_eng < 1e-12 {
        let gap = (r - r_eng).abs();
        return if gap <= tau + ACOS_GUARD {
            Ok((PI, phi_eng))
        } else {
            Err(EngagementError::Unreachable { argument: f64::INFINITY })
        };
    }
    let argument = (r_eng * r_eng + r * r - tau * tau) / (2.0 * r_eng * r);
    if argument > 1.0 + ACOS_GUARD {
        return Err(EngagementError::Unreachable { argument });
    }
    if argument <= -1.0 + ACOS_GUARD {
        return Ok((PI, phi_eng));
    }
    Ok((argument.clamp(-1.0, 1.0).acos(), phi_eng))
}

/// Sign-aware reachability: a defender at `x_d0` reaches the engagement
/// point of `config` against an attacker entering at `theta_a0` within `tau`.
pub fn reaches(config: EngagementConfig, theta_a0: f64, x_d0: Vec2, params: &GameParams) -> bool {
    reaches_within(config, theta_a0, x_d0, config.tau, params)
}

/// As [`reaches`], with a travel budget other than the engagement time.
pub fn reaches_within(config: EngagementConfig, theta_a0: f64, x_d0: Vec2, budget: f64, params: &GameParams) -> bool {
    if budget < 0.0 {
        return false;
    }
    let r = x_d0.norm();
    match reach_angles(config, r, budget, params) {
        Err(_) => false,
        Ok((psi, _)) if psi >= PI => true,
        Ok((psi, phi_eng)) => {
            let separation = x_d0.angle() - theta_a0;
            (separation - phi_eng).abs() <= psi + 1e-9
        }
    }
}

/// Discretization of the engagement search.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EngagementGrid {
    /// Points on the engagement-time grid.
    pub tau_points: usize,
    /// Points on the engagement-angle grid used for the full capturable set.
    pub theta_points: usize,
    /// Angular resolution of the refinement steps.
    pub theta_tol: f64,
}

impl Default for EngagementGrid {
    fn default() -> Self {
        Self {
            tau_points: 200,
            theta_points: 181,
            theta_tol: 1e-6,
        }
    }
}

/// Interval of engagement times on which some configuration is admissible.
pub fn feasible_tau_range(params: &GameParams) -> (f64, f64) {
    let ct = critical_times(params);
    let lo = ct.tau3.max(0.0);
    let hi = ct.tau2.min(params.outer_radius() / params.nu() - 1e-9);
    (lo, hi)
}

fn linspace(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    let step = if n > 1 { (hi - lo) / (n - 1) as f64 } else { 0.0 };
    (0..n).map(move |i| if i + 1 == n { hi } else { lo + step * i as f64 })
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section maximization of `f` on `[lo, hi]`. Returns `(argmax, max)`.
pub(crate) fn golden_max<F: Fn(f64) -> f64>(mut lo: f64, mut hi: f64, tol: f64, f: F) -> (f64, f64) {
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > tol {
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 >= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Maximizer of `theta_max` over the bisector-frame engagement set.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThetaMaxOptimum {
    pub value: f64,
    pub config: EngagementConfig,
}

fn theta_max_or_neg_inf(tau: f64, theta: f64, r: f64, params: &GameParams) -> f64 {
    theta_max(EngagementConfig::new(tau, theta), r, params).unwrap_or(f64::NEG_INFINITY)
}

/// Best `theta` in the admissible band at one `tau`.
fn best_theta_at(tau: f64, r: f64, params: &GameParams, grid: &EngagementGrid) -> Option<(f64, f64)> {
    let (lo, hi) = interior_interval(tau, params)?;
    const SAMPLES: usize = 16;
    let mut best: Option<(usize, f64, f64)> = None;
    let thetas: Vec<f64> = linspace(lo, hi, SAMPLES).collect();
    for (i, &theta) in thetas.iter().enumerate() {
        let v = theta_max_or_neg_inf(tau, theta, r, params);
        if v.is_finite() && best.is_none_or(|(_, _, b)| v > b) {
            best = Some((i, theta, v));
        }
    }
    let (i, theta, value) = best?;
    let a = thetas[i.saturating_sub(1)];
    let b = thetas[(i + 1).min(SAMPLES - 1)];
    let (t, v) = golden_max(a, b, grid.theta_tol, |x| theta_max_or_neg_inf(tau, x, r, params));
    // keep the sampled point on ties: smaller |theta| wins
    if v > value + 1e-15 {
        Some((t, v))
    } else {
        Some((theta, value))
    }
}

/// Maximizes `theta_max` over the engagement set of an attacker on the
/// bisector (interior guard and escape constraints). Ties go to the earliest
/// `tau`, then the smallest `|theta|`.
pub fn max_theta_max(r: f64, params: &GameParams, grid: &EngagementGrid) -> Result<ThetaMaxOptimum, EngagementError> {
    let (tau_lo, tau_hi) = feasible_tau_range(params);
    let taus: Vec<f64> = linspace(tau_lo, tau_hi, grid.tau_points.max(2)).collect();
    let mut best: Option<(usize, f64, f64)> = None;
    for (i, &tau) in taus.iter().enumerate() {
        if let Some((theta, v)) = best_theta_at(tau, r, params, grid) {
            if best.is_none_or(|(_, _, b)| v > b) {
                best = Some((i, theta, v));
            }
        }
    }
    let (i, theta, value) = best.ok_or(EngagementError::NoCapturableConfiguration { r })?;
    let mut optimum = ThetaMaxOptimum {
        value,
        config: EngagementConfig::new(taus[i], theta),
    };
    // Local refinement in tau around the best grid cell.
    let a = taus[i.saturating_sub(1)];
    let b = taus[(i + 1).min(taus.len() - 1)];
    if b > a {
        let (tau, v) = golden_max(a, b, 1e-9, |t| {
            best_theta_at(t, r, params, grid).map_or(f64::NEG_INFINITY, |(_, v)| v)
        });
        if v > optimum.value + 1e-12 {
            if let Some((theta, v)) = best_theta_at(tau, r, params, grid) {
                optimum = ThetaMaxOptimum {
                    value: v,
                    config: EngagementConfig::new(tau, theta),
                };
            }
        }
    }
    Ok(optimum)
}

/// Sufficient capture condition for a defender at polar `(r, theta_d0)`
/// against an attacker entering at `theta_a0`.
pub fn capturable(theta_a0: f64, theta_d0: f64, r: f64, params: &GameParams, grid: &EngagementGrid) -> bool {
    if r <= GEOM_TOL {
        return true;
    }
    match max_theta_max(r, params, grid) {
        Ok(opt) => (theta_a0 - theta_d0).abs() <= opt.value,
        Err(_) => false,
    }
}

/// True when the configuration guarantees capture for this attacker and the
/// engagement point lies inside the environment.
pub fn is_capture_configuration(config: EngagementConfig, theta_a0: f64, params: &GameParams) -> bool {
    let circle = config.circle(theta_a0, params);
    !circle_meets_target(&circle, params)
        && !circle_meets_tsr_exterior(&circle, params)
        && params
            .environment()
            .contains_with_tol(config.defender_position(theta_a0, params), GEOM_TOL)
}

/// Grid discretization of the reachable capturable set, sorted by `tau`
/// then `theta`.
pub fn reachable_engagement_set(
    x_d0: Vec2,
    theta_a0: f64,
    params: &GameParams,
    grid: &EngagementGrid,
) -> Vec<EngagementConfig> {
    reachable_engagement_set_from(x_d0, theta_a0, 0.0, params, grid)
}

/// As [`reachable_engagement_set`] for a defender standing at `x_d0`
/// `elapsed` time units after the attacker's arrival.
pub fn reachable_engagement_set_from(
    x_d0: Vec2,
    theta_a0: f64,
    elapsed: f64,
    params: &GameParams,
    grid: &EngagementGrid,
) -> Vec<EngagementConfig> {
    let (tau_lo, tau_hi) = feasible_tau_range(params);
    let mut out = Vec::new();
    for tau in linspace(tau_lo, tau_hi, grid.tau_points.max(2)) {
        if tau < elapsed {
            continue;
        }
        for theta in linspace(-PI, PI, grid.theta_points.max(2)) {
            let config = EngagementConfig::new(tau, theta);
            if is_capture_configuration(config, theta_a0, params)
                && reaches_within(config, theta_a0, x_d0, tau - elapsed, params)
            {
                out.push(config);
            }
        }
    }
    out
}

/// Target-tangent configurations at each grid time, both sides, before any
/// reachability filtering. Sorted by `tau` then `theta`.
pub fn tangent_configurations(theta_a0: f64, params: &GameParams, grid: &EngagementGrid) -> Vec<EngagementConfig> {
    let ct = critical_times(params);
    let (tau_lo, tau_hi) = feasible_tau_range(params);
    let lo = tau_lo.max(ct.tau1);
    let hi = tau_hi.min(ct.tau2);
    let mut out = Vec::with_capacity(2 * grid.tau_points);
    if hi < lo {
        return out;
    }
    for tau in linspace(lo, hi, grid.tau_points.max(2)) {
        let theta = half_angle_from_rhs(guard_rhs(tau, params));
        for config in [EngagementConfig::new(tau, -theta), EngagementConfig::new(tau, theta)] {
            if is_capture_configuration(config, theta_a0, params) {
                out.push(config);
            }
        }
        // theta == 0 or pi produce one configuration twice
        if out.len() >= 2 && out[out.len() - 1] == out[out.len() - 2] {
            out.pop();
        }
    }
    out
}

/// The simplified capturable set: reachable configurations whose circle is
/// tangent to the target arc.
pub fn simplified_engagement_set(
    x_d0: Vec2,
    theta_a0: f64,
    params: &GameParams,
    grid: &EngagementGrid,
) -> Vec<EngagementConfig> {
    simplified_engagement_set_from(x_d0, theta_a0, 0.0, params, grid)
}

/// As [`simplified_engagement_set`] for a defender standing at `x_d0`
/// `elapsed` time units after the attacker's arrival.
pub fn simplified_engagement_set_from(
    x_d0: Vec2,
    theta_a0: f64,
    elapsed: f64,
    params: &GameParams,
    grid: &EngagementGrid,
) -> Vec<EngagementConfig> {
    tangent_configurations(theta_a0, params, grid)
        .into_iter()
        .filter(|c| c.tau >= elapsed && reaches_within(*c, theta_a0, x_d0, c.tau - elapsed, params))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{distance_to_sector, make_params};
    use approx::assert_relative_eq;

    fn p() -> GameParams {
        GameParams::reference()
    }

    #[test]
    fn critical_times_reference_values() {
        let ct = critical_times(&p());
        assert_relative_eq!(ct.tau1, 2.745_098, epsilon = 1e-6);
        assert_relative_eq!(ct.tau2, 8.871_224, epsilon = 1e-6);
        assert_relative_eq!(ct.tau3, 0.540_541, epsilon = 1e-6);
        assert_relative_eq!(ct.tau4, 6.666_667, epsilon = 1e-6);
    }

    #[test]
    fn critical_time_identities() {
        for &nu in &[0.3, 0.5, 0.7, 0.85] {
            let params = make_params(6.0, 20.0, 1.0, nu, 1.0).unwrap();
            let ct = critical_times(&params);
            let rho = params.rho_a();
            assert_relative_eq!(ct.tau4 - ct.tau3, 2.0 * nu * rho / (1.0 - nu * nu), epsilon = 1e-12);
            assert_relative_eq!(
                ct.tau2 - ct.tau4,
                (params.rho_t() - 2.0 * params.gamma() * rho) / nu,
                epsilon = 1e-12
            );
        }
        let ct = critical_times(&p());
        assert_relative_eq!(ct.tau2 - ct.tau4, 2.204_558, epsilon = 1e-6);
    }

    #[test]
    fn guard_regimes_on_bisector() {
        let params = p();
        let ct = critical_times(&params);
        assert_eq!(guard_threshold(ct.tau1 - 0.5, 0.0, &params), Some(0.0));
        assert_eq!(guard_threshold(ct.tau2 + 0.1, 0.0, &params), None);
    }

    #[test]
    fn guard_threshold_mid_time_is_tangent() {
        let params = p();
        let rhs = guard_rhs(5.0, &params);
        assert!(rhs > 0.0 && rhs < 1.0);
        let theta = guard_threshold(5.0, 0.0, &params).unwrap();
        assert_relative_eq!(theta, 2.0 * rhs.sqrt().asin(), epsilon = 1e-14);
        let c = EngagementConfig::new(5.0, theta).circle(0.0, &params);
        assert_relative_eq!(c.center.norm(), params.r_t() + params.engagement_radius(), epsilon = 1e-9);
    }

    #[test]
    fn escape_regimes_on_bisector() {
        let params = p();
        let ct = critical_times(&params);
        assert_eq!(escape_threshold(ct.tau4 + 0.1, 0.0, &params), Some(PI));
        assert_eq!(escape_threshold(ct.tau3 - 0.1, 0.0, &params), None);
    }

    #[test]
    fn escape_threshold_mid_time_is_internally_tangent() {
        let params = p();
        let rhs = escape_rhs(2.0, &params);
        let theta = escape_threshold(2.0, 0.0, &params).unwrap();
        assert_relative_eq!(theta, 2.0 * rhs.sqrt().asin(), epsilon = 1e-14);
        let c = EngagementConfig::new(2.0, theta).circle(0.0, &params);
        assert_relative_eq!(c.center.norm() + c.radius, params.outer_radius(), epsilon = 1e-9);
    }

    #[test]
    fn corner_case_guard_threshold_touches_the_corner() {
        let params = p();
        // Attacker hugging the upper edge; engaging from the lower side pushes
        // the circle center past the edge.
        let theta_a0 = params.phi() - 0.02;
        let tau = 6.0;
        let interior = half_angle_from_rhs(guard_rhs(tau, &params));
        let center = center_at(tau, theta_a0, -interior, &params);
        assert!(center.angle() > params.phi(), "setup must trigger the corner case");
        let mut trace = ThresholdSolveTrace::default();
        let d = guard_side(tau, theta_a0, Side::Negative, &params, &mut trace).unwrap();
        assert!(d < interior);
        assert!(trace.solver_iterations > 0 && trace.solver_iterations <= THRESHOLD_MAX_ITER);
        let c = EngagementConfig::new(tau, -d).circle(theta_a0, &params);
        let corner = Vec2::polar(params.r_t(), params.phi());
        assert!((c.center.distance(corner) - c.radius).abs() < 1e-6);
        assert!(!circle_meets_target(&c, &params));
        // slightly less deviation breaches
        let c = EngagementConfig::new(tau, -(d - 1e-4)).circle(theta_a0, &params);
        assert!(distance_to_sector(c.center, params.r_t(), params.phi()) < c.radius);
    }

    #[test]
    fn interval_nonempty_between_tau4_and_tau2() {
        let params = p();
        let ct = critical_times(&params);
        for k in 1..10 {
            let tau = ct.tau4 + (ct.tau2 - ct.tau4) * k as f64 / 10.0;
            let band = engagement_interval(tau, 0.0, &params).unwrap();
            assert_eq!(band.theta_hi, PI);
            assert!(band.theta_lo < PI);
        }
        assert!(engagement_interval(ct.tau3 - 0.01, 0.0, &params).is_none());
    }

    #[test]
    fn boundary_parameters_squeeze_the_interval() {
        // rho_t = 2 gamma rho_a exactly: tau2 == tau4 and the band closes.
        let nu: f64 = 0.5;
        let gamma = nu / (1.0 - nu * nu);
        let rho_t = 2.0 * gamma;
        // assumption 1 needs rho_t >= 1 + 2 gamma, so relax rho_a instead
        let rho_a = rho_t / (1.0 + 2.0 * gamma);
        let params = make_params(1.0, rho_t, rho_a, nu, 1.0).unwrap();
        let ct = critical_times(&params);
        let width_max = linspace(ct.tau3, ct.tau2, 2000)
            .filter_map(|t| engagement_interval(t, 0.0, &params))
            .map(|b| b.width())
            .fold(0.0f64, f64::max);
        assert!(width_max > 0.0);

        let tight = make_params(1.0, 2.0 * 0.5 / 0.75 * 1.0, 1.0, 0.5, 1.0);
        // assumption 1 forbids the exactly-degenerate case; check the interval
        // formula directly instead.
        assert!(tight.is_err());
        let tau_star = {
            let rho_a: f64 = 1.0;
            rho_a / (1.0 - nu)
        };
        let g = {
            let rho_a: f64 = 1.0;
            let rho_t = 2.0 * gamma * rho_a;
            let re = 1.0 + rho_t;
            let beta = nu * gamma;
            let r = re - nu * tau_star;
            let lo = ((1.0 + gamma * rho_a).powi(2) - (r - beta * rho_a).powi(2)) / (4.0 * beta * rho_a * r);
            let hi = ((re - gamma * rho_a).powi(2) - (r - beta * rho_a).powi(2)) / (4.0 * beta * rho_a * r);
            (lo, hi)
        };
        assert_relative_eq!(g.0, 1.0, epsilon = 1e-12);
        assert_relative_eq!(g.1, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn theta_max_trivial_cases() {
        let params = p();
        let tau = 4.0;
        let config = EngagementConfig::new(tau, 0.0);
        let (psi, phi_eng) = reach_angles(config, 12.0, tau, &params).unwrap();
        assert_eq!(phi_eng, 0.0);
        assert!(psi > 0.0);
        let r_eng = params.outer_radius() - tau * params.nu() + params.rho_a();
        let expected = ((r_eng * r_eng + 144.0 - tau * tau) / (2.0 * r_eng * 12.0)).acos();
        assert_relative_eq!(theta_max(config, 12.0, &params).unwrap(), expected, epsilon = 1e-12);

        // tau = 0 and r = r_eng: only the engagement point itself.
        let config = EngagementConfig::new(0.0, 1.0);
        let pos = config.defender_position(0.0, &params);
        let value = theta_max(config, pos.norm(), &params).unwrap();
        assert_relative_eq!(value, pos.angle(), epsilon = 1e-6);
    }

    #[test]
    fn theta_max_is_odd_in_engagement_angle_offset() {
        let params = p();
        let a = reach_angles(EngagementConfig::new(5.0, 1.3), 9.0, 5.0, &params).unwrap();
        let b = reach_angles(EngagementConfig::new(5.0, -1.3), 9.0, 5.0, &params).unwrap();
        assert_relative_eq!(a.0, b.0);
        assert_relative_eq!(a.1, -b.1);
    }

    #[test]
    fn unreachable_configuration_is_reported() {
        let params = p();
        let err = theta_max(EngagementConfig::new(0.6, 0.0), 1.0, &params).unwrap_err();
        assert!(matches!(err, EngagementError::Unreachable { .. }));
    }

    #[test]
    fn max_theta_max_finite_at_center() {
        let params = p();
        let opt = max_theta_max(0.0, &params, &EngagementGrid::default()).unwrap();
        assert!(opt.value.is_finite());
    }
}

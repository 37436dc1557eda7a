use std::f64::consts::PI;

use approx::assert_abs_diff_eq;
use conic_defense::engagement::{
    engagement_interval, escape_threshold, feasible_tau_range, guard_threshold, is_capture_configuration,
    reachable_engagement_set, simplified_engagement_set,
};
use conic_defense::{
    capturable, critical_times, max_theta_max, theta_max, EngagementConfig, EngagementGrid, GameParams, Vec2,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn reference() -> GameParams {
    GameParams::reference()
}

/// `|x_C|` for an attacker on the bisector engaged at angle `theta`.
fn center_norm(tau: f64, theta: f64, p: &GameParams) -> f64 {
    let r = p.outer_radius() - p.nu() * tau;
    let b = p.beta() * p.rho_a();
    (r * r + b * b - 2.0 * r * b * theta.cos()).sqrt()
}

/// Engagement angle that puts `|x_C|` at `target` (bisector attacker).
fn angle_for_center_norm(tau: f64, target: f64, p: &GameParams) -> f64 {
    let r = p.outer_radius() - p.nu() * tau;
    let b = p.beta() * p.rho_a();
    ((r * r + b * b - target * target) / (2.0 * r * b)).clamp(-1.0, 1.0).acos()
}

#[test]
fn critical_times_from_first_principles() {
    let p = reference();
    let ct = critical_times(&p);
    // tau1/tau2: the bisector AC at theta = pi / 0 is tangent to the target arc.
    // Radius gamma*rho, center offset beta*rho: |x_A| -/+ beta rho - gamma rho = r_T.
    let (g, b) = (p.gamma(), p.beta());
    let tau_at = |r_a: f64| (p.outer_radius() - r_a) / p.nu();
    assert_abs_diff_eq!(ct.tau1, tau_at(p.r_t() + g + b), epsilon = 1e-12);
    assert_abs_diff_eq!(ct.tau2, tau_at(p.r_t() + g - b), epsilon = 1e-12);
    // tau3/tau4: the same circles tangent to the outer arc.
    assert_abs_diff_eq!(ct.tau3, tau_at(p.outer_radius() - g + b), epsilon = 1e-12);
    assert_abs_diff_eq!(ct.tau4, tau_at(p.outer_radius() - g - b), epsilon = 1e-12);

    assert_abs_diff_eq!(ct.tau1, 2.7451, epsilon = 1e-4);
    assert_abs_diff_eq!(ct.tau2, 8.8713, epsilon = 1e-4);
    assert_abs_diff_eq!(ct.tau3, 0.5405, epsilon = 1e-4);
    assert_abs_diff_eq!(ct.tau4, 6.6667, epsilon = 1e-4);
    assert_abs_diff_eq!(ct.tau4 - ct.tau3, 2.0 * 0.85 / (1.0 - 0.85 * 0.85), epsilon = 1e-12);
    assert_abs_diff_eq!(ct.tau2 - ct.tau4, (p.rho_t() - 2.0 * g * p.rho_a()) / p.nu(), epsilon = 1e-12);
}

#[test]
fn thresholds_flip_at_the_critical_times() {
    let p = reference();
    let ct = critical_times(&p);
    let d = 1e-3;
    assert_eq!(guard_threshold(ct.tau1 - d, 0.0, &p), Some(0.0));
    assert!(guard_threshold(ct.tau1 + d, 0.0, &p).unwrap() > 0.0);
    assert!(guard_threshold(ct.tau2 - d, 0.0, &p).is_some());
    assert_eq!(guard_threshold(ct.tau2 + d, 0.0, &p), None);
    assert_eq!(escape_threshold(ct.tau3 - d, 0.0, &p), None);
    assert!(escape_threshold(ct.tau3 + d, 0.0, &p).is_some());
    assert!(escape_threshold(ct.tau4 - d, 0.0, &p).unwrap() < PI);
    assert_eq!(escape_threshold(ct.tau4 + d, 0.0, &p), Some(PI));
}

#[test]
fn guard_threshold_is_target_tangency() {
    let p = reference();
    let ct = critical_times(&p);
    let rim = p.r_t() + p.gamma() * p.rho_a();
    for i in 1..200 {
        let tau = ct.tau1 + (ct.tau2 - ct.tau1) * i as f64 / 200.0;
        let theta = guard_threshold(tau, 0.0, &p).unwrap();
        let config = EngagementConfig::new(tau, theta);
        let center = config.circle(0.0, &p).center;
        if center.angle().abs() <= p.phi() {
            assert_abs_diff_eq!(theta, angle_for_center_norm(tau, rim, &p), epsilon = 1e-9);
            assert_abs_diff_eq!(center_norm(tau, theta, &p), rim, epsilon = 1e-9);
        }
    }
    let theta = guard_threshold(5.0, 0.0, &p).unwrap();
    assert_abs_diff_eq!(theta, angle_for_center_norm(5.0, rim, &p), epsilon = 1e-9);
}

#[test]
fn escape_threshold_is_outer_tangency() {
    let p = reference();
    let ct = critical_times(&p);
    let rim = p.outer_radius() - p.gamma() * p.rho_a();
    for i in 1..200 {
        let tau = ct.tau3 + (ct.tau4 - ct.tau3) * i as f64 / 200.0;
        let theta = escape_threshold(tau, 0.0, &p).unwrap();
        let center = EngagementConfig::new(tau, theta).circle(0.0, &p).center;
        if center.angle().abs() <= p.phi() {
            assert_abs_diff_eq!(center_norm(tau, theta, &p), rim, epsilon = 1e-9);
        }
    }
    let theta = escape_threshold(2.0, 0.0, &p).unwrap();
    assert_abs_diff_eq!(theta, angle_for_center_norm(2.0, rim, &p), epsilon = 1e-9);
}

#[test]
fn interval_is_nonempty_between_tau4_and_tau2() {
    let p = reference();
    let ct = critical_times(&p);
    for i in 1..50 {
        let tau = ct.tau4 + (ct.tau2 - ct.tau4) * i as f64 / 50.0;
        let band = engagement_interval(tau, 0.0, &p).unwrap();
        assert!(band.theta_lo < band.theta_hi);
        assert_eq!(band.theta_hi, PI);
    }
    assert!(engagement_interval(ct.tau3 * 0.5, 0.0, &p).is_none());
}

/// Largest angular separation `delta` from which a unit-speed defender at
/// radius `r` covers the straight-line distance to the engagement point in time.
fn brute_force_theta_max(config: EngagementConfig, r: f64, p: &GameParams) -> Option<f64> {
    let target = config.defender_position(0.0, p);
    let n = 200_000;
    let mut best = None;
    for i in 0..=n {
        let delta = -PI + 2.0 * PI * i as f64 / n as f64;
        if Vec2::polar(r, delta).distance(target) <= config.tau {
            best = Some(delta);
        }
    }
    best
}

#[test]
fn theta_max_matches_travel_oracle() {
    let p = reference();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (lo, hi) = feasible_tau_range(&p);
    let mut checked = 0;
    while checked < 60 {
        let config = EngagementConfig::new(rng.gen_range(lo..hi), rng.gen_range(-PI..PI));
        let r = rng.gen_range(0.5..p.outer_radius());
        let oracle = brute_force_theta_max(config, r, &p);
        match (theta_max(config, r, &p), oracle) {
            (Ok(v), Some(b)) => {
                if v >= PI {
                    assert!(b > PI - 1e-3, "{config:?} r={r}: library pi, oracle {b}");
                } else {
                    assert_abs_diff_eq!(v, b, epsilon = 1e-3);
                }
                checked += 1;
            }
            (Err(_), None) => {}
            (got, want) => panic!("{config:?} r={r}: {got:?} vs {want:?}"),
        }
    }
}

#[test]
fn max_theta_max_dominates_a_brute_force_grid() {
    let p = reference();
    let grid = EngagementGrid::default();
    let (lo, hi) = feasible_tau_range(&p);
    for r in [4.0, 8.0, p.capture_cone_radius(), 13.0] {
        let opt = max_theta_max(r, &p, &grid).unwrap();
        let mut brute = f64::NEG_INFINITY;
        for i in 0..=300 {
            let tau = lo + (hi - lo) * i as f64 / 300.0;
            let Some(band) = engagement_interval(tau, 0.0, &p) else { continue };
            for j in 0..=300 {
                let theta = band.theta_lo + band.width() * j as f64 / 300.0;
                if let Ok(v) = theta_max(EngagementConfig::new(tau, theta), r, &p) {
                    brute = brute.max(v);
                }
            }
        }
        assert!(opt.value >= brute - 1e-3, "r={r}: {} < {brute}", opt.value);
        assert!(opt.value <= brute + 2e-2, "r={r}: {} >> {brute}", opt.value);
    }
}

#[test]
fn theta_max_shrinks_with_radius() {
    let p = reference();
    let grid = EngagementGrid::default();
    let values: Vec<f64> = [0.5, 4.0, 8.0, 12.0, 14.0]
        .iter()
        .map(|&r| max_theta_max(r, &p, &grid).unwrap().value)
        .collect();
    assert!(values.windows(2).all(|w| w[0] > w[1]), "{values:?}");
}

#[test]
fn capturable_depends_only_on_separation() {
    let p = reference();
    let grid = EngagementGrid { tau_points: 60, ..Default::default() };
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..40 {
        let (a, d) = (rng.gen_range(-p.phi()..p.phi()), rng.gen_range(-p.phi()..p.phi()));
        let r = rng.gen_range(0.0..p.outer_radius());
        let base = capturable(a, d, r, &p, &grid);
        assert_eq!(base, capturable(-a, -d, r, &p, &grid));
        assert_eq!(base, capturable(d, a, r, &p, &grid));
        assert_eq!(base, capturable(a + 0.1, d + 0.1, r, &p, &grid));
    }
    assert!(capturable(0.7, -0.9, 0.0, &p, &grid));
}

#[test]
fn simplified_set_is_target_tangent_and_capture_certain() {
    let p = reference();
    let grid = EngagementGrid::default();
    let rim = p.r_t() + p.gamma() * p.rho_a();
    for theta_a0 in [-0.9, -0.3, 0.0, 0.5, 1.0] {
        let set = simplified_engagement_set(Vec2::ZERO, theta_a0, &p, &grid);
        assert!(!set.is_empty());
        assert!(set.windows(2).all(|w| w[0].tau <= w[1].tau));
        for config in &set {
            let ac = config.circle(theta_a0, &p);
            assert!(is_capture_configuration(*config, theta_a0, &p));
            if ac.center.angle().abs() <= p.phi() {
                assert_abs_diff_eq!(ac.center.norm(), rim, epsilon = 1e-6);
            }
            // every point of the circle lies in the capture cone
            assert!(ac.center.norm() + ac.radius <= p.capture_cone_radius() + 1e-6);
        }
    }
}

#[test]
fn early_engagements_in_the_full_set_are_excluded_from_the_simplified_set() {
    let p = reference();
    let grid = EngagementGrid { tau_points: 100, ..Default::default() };
    let rim = p.r_t() + p.gamma() * p.rho_a();
    let full = reachable_engagement_set(Vec2::ZERO, 0.0, &p, &grid);
    let early: Vec<_> = full
        .iter()
        .filter(|c| c.circle(0.0, &p).center.norm() > rim + 1e-3)
        .collect();
    assert!(!early.is_empty());
    let simplified = simplified_engagement_set(Vec2::ZERO, 0.0, &p, &grid);
    for c in early {
        assert!(!simplified.contains(c));
    }
    // explicit small-tau configuration: capture-certain yet far from tangent
    let ct = critical_times(&p);
    let config = EngagementConfig::new(ct.tau4 + 0.1, PI);
    assert!(is_capture_configuration(config, 0.0, &p));
    assert!(config.circle(0.0, &p).center.norm() > rim + 0.5);
}

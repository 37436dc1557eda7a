//! Scenario constants, planar vectors, the conical regions and the
//! Apollonius circle of a defender/attacker pair.
//!
//! Frame: the target center sits at the origin and the cone bisector points
//! along +x. Angles are radians in (-pi, pi].

use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use thiserror::Error;

/// Absolute tolerance used by the region predicates.
pub const GEOM_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    #[inline]
    pub fn new(x: f64, y: f64) -> Self {
        debug_assert!(x.is_finite() && y.is_finite(), "non-finite Vec2 ({x}, {y})");
        Self { x, y }
    }

    /// Unit vector `[cos theta, sin theta]`.
    #[inline]
    pub fn unit(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self { x: c, y: s }
    }

    /// `r * unit(theta)`.
    #[inline]
    pub fn polar(r: f64, theta: f64) -> Self {
        Self::unit(theta) * r
    }

    #[inline]
    pub fn dot(self, other: Vec2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the 3-D cross product.
    #[inline]
    pub fn cross(self, other: Vec2) -> f64 {
        self.x * other.y - self.y * other.x
    }

    #[inline]
    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    #[inline]
    pub fn distance(self, other: Vec2) -> f64 {
        (self - other).norm()
    }

    /// `atan2(y, x)`.
    #[inline]
    pub fn angle(self) -> f64 {
        self.y.atan2(self.x)
    }

    /// Unit vector along `self`, or `None` for a (near) zero vector.
    #[inline]
    pub fn normalized(self) -> Option<Vec2> {
        let n = self.norm();
        (n > 1e-15).then(|| self * (1.0 / n))
    }

    /// Mirror image across the x axis.
    #[inline]
    pub fn reflect_y(self) -> Vec2 {
        Vec2 { x: self.x, y: -self.y }
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    #[inline]
    fn add(self, o: Vec2) -> Vec2 {
        Vec2 { x: self.x + o.x, y: self.y + o.y }
    }
}

impl AddAssign for Vec2 {
    #[inline]
    fn add_assign(&mut self, o: Vec2) {
        self.x += o.x;
        self.y += o.y;
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    #[inline]
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2 { x: self.x - o.x, y: self.y - o.y }
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    #[inline]
    fn mul(self, k: f64) -> Vec2 {
        Vec2 { x: self.x * k, y: self.y * k }
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    #[inline]
    fn neg(self) -> Vec2 {
        Vec2 { x: -self.x, y: -self.y }
    }
}

impl fmt::Display for Vec2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:.6}, {:.6})", self.x, self.y)
    }
}

/// Which scenario constraint rejected a parameter set.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParameterViolation {
    #[error("{field} = {value} is outside its admissible range {range}")]
    OutOfRange {
        field: &'static str,
        value: f64,
        range: &'static str,
    },
    #[error(
        "assumption 1 violated: rho_t/rho_a = {ratio:.4} must be at least 1 + 2 nu/(1 - nu^2) = {required:.4}"
    )]
    SensingRatio { ratio: f64, required: f64 },
    #[error("assumption 2 violated: nu * r_t = {reach:.4} exceeds rho_t = {rho_t:.4}")]
    TargetReach { reach: f64, rho_t: f64 },
    #[error("empty engagement set: 2 gamma rho_a = {width:.4} exceeds rho_t = {rho_t:.4}")]
    Infeasible { width: f64, rho_t: f64 },
}

impl ParameterViolation {
    /// Name of the offending configuration field.
    pub fn field(&self) -> &'static str {
        match self {
            ParameterViolation::OutOfRange { field, .. } => field,
            ParameterViolation::SensingRatio { .. } => "rho_t",
            ParameterViolation::TargetReach { .. } => "rho_t",
            ParameterViolation::Infeasible { .. } => "rho_a",
        }
    }
}

/// The five scenario constants together with the derived Apollonius
/// coefficients. Only constructible through [`make_params`], so every value
/// in circulation satisfies both standing assumptions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GameParams {
    r_t: f64,
    rho_t: f64,
    rho_a: f64,
    nu: f64,
    phi: f64,
    alpha: f64,
    beta: f64,
    gamma: f64,
}

/// Validates the raw scenario constants and derives `alpha`, `beta`, `gamma`.
pub fn make_params(
    r_t: f64,
    rho_t: f64,
    rho_a: f64,
    nu: f64,
    phi: f64,
) -> Result<GameParams, ParameterViolation> {
    let check = |field, value: f64, ok: bool, range| {
        if ok && value.is_finite() {
            Ok(())
        } else {
            Err(ParameterViolation::OutOfRange { field, value, range })
        }
    };
    check("r_t", r_t, r_t > 0.0, "(0, inf)")?;
    check("rho_t", rho_t, rho_t > 0.0, "(0, inf)")?;
    check("rho_a", rho_a, rho_a > 0.0, "(0, inf)")?;
    check("nu", nu, nu > 0.0 && nu < 1.0, "(0, 1)")?;
    check("phi", phi, phi > 0.0 && phi < PI, "(0, pi)")?;

    let alpha = 1.0 / (1.0 - nu * nu);
    let gamma = nu * alpha;
    let beta = nu * gamma;

    let required = 1.0 + 2.0 * nu / (1.0 - nu * nu);
    let ratio = rho_t / rho_a;
    if ratio < required {
        return Err(ParameterViolation::SensingRatio { ratio, required });
    }
    if nu * r_t > rho_t {
        return Err(ParameterViolation::TargetReach { reach: nu * r_t, rho_t });
    }
    if 2.0 * gamma * rho_a > rho_t {
        return Err(ParameterViolation::Infeasible {
            width: 2.0 * gamma * rho_a,
            rho_t,
        });
    }
    Ok(GameParams {
        r_t,
        rho_t,
        rho_a,
        nu,
        phi,
        alpha,
        beta,
        gamma,
    })
}

impl GameParams {
    /// The reference scenario: `r_t = 6, rho_t = 8, rho_a = 1, nu = 0.85, phi = pi/3`.
    pub fn reference() -> Self {
        make_params(6.0, 8.0, 1.0, 0.85, PI / 3.0).expect("reference parameters are valid")
    }

    pub fn r_t(&self) -> f64 {
        self.r_t
    }
    pub fn rho_t(&self) -> f64 {
        self.rho_t
    }
    pub fn rho_a(&self) -> f64 {
        self.rho_a
    }
    pub fn nu(&self) -> f64 {
        self.nu
    }
    pub fn phi(&self) -> f64 {
        self.phi
    }
    pub fn alpha(&self) -> f64 {
        self.alpha
    }
    pub fn beta(&self) -> f64 {
        self.beta
    }
    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Radius of the environment, `r_t + rho_t`.
    pub fn outer_radius(&self) -> f64 {
        self.r_t + self.rho_t
    }

    /// Radius of the Apollonius circle at the moment of engagement.
    pub fn engagement_radius(&self) -> f64 {
        self.gamma * self.rho_a
    }

    /// Radius of the sector that contains every capture made from a
    /// target-tangent engagement.
    pub fn capture_cone_radius(&self) -> f64 {
        self.r_t + 2.0 * self.gamma * self.rho_a
    }

    pub fn target(&self) -> ConeRegion {
        ConeRegion::new(0.0, self.r_t, self.phi)
    }

    pub fn environment(&self) -> ConeRegion {
        ConeRegion::new(0.0, self.outer_radius(), self.phi)
    }

    pub fn sensing_region(&self) -> ConeRegion {
        ConeRegion::new(self.r_t, self.outer_radius(), self.phi)
    }

    pub fn capture_cone(&self) -> ConeRegion {
        ConeRegion::new(0.0, self.capture_cone_radius(), self.phi)
    }

    /// Copy with a different half-angle, revalidated.
    pub fn with_phi(&self, phi: f64) -> Result<Self, ParameterViolation> {
        make_params(self.r_t, self.rho_t, self.rho_a, self.nu, phi)
    }
}

/// Annular sector `{x : inner <= |x| <= outer, |angle(x)| <= half_angle}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConeRegion {
    pub inner_radius: f64,
    pub outer_radius: f64,
    pub half_angle: f64,
}

impl ConeRegion {
    pub fn new(inner_radius: f64, outer_radius: f64, half_angle: f64) -> Self {
        debug_assert!(inner_radius >= 0.0 && outer_radius > inner_radius);
        Self {
            inner_radius,
            outer_radius,
            half_angle,
        }
    }

    pub fn contains(&self, x: Vec2) -> bool {
        self.contains_with_tol(x, 0.0)
    }

    /// Membership with the radial and angular limits relaxed by `tol`
    /// (angle relaxed by `tol / |x|`).
    pub fn contains_with_tol(&self, x: Vec2, tol: f64) -> bool {
        let r = x.norm();
        if r < self.inner_radius - tol || r > self.outer_radius + tol {
            return false;
        }
        if r <= tol {
            return self.inner_radius <= tol;
        }
        x.angle().abs() <= self.half_angle + tol / r
    }
}

/// Projects `x` back into the wedge `|angle| <= half_angle` by dropping onto
/// the nearest side edge. Points already inside are returned unchanged.
pub fn clamp_to_wedge(x: Vec2, half_angle: f64) -> Vec2 {
    let theta = x.angle();
    if theta.abs() <= half_angle {
        return x;
    }
    let edge = Vec2::unit(half_angle.copysign(theta));
    edge * x.dot(edge).max(0.0)
}

/// The dominance region of an attacker over a faster defender.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ApolloniusCircle {
    pub center: Vec2,
    pub radius: f64,
}

impl ApolloniusCircle {
    pub fn point_at(&self, phase: f64) -> Vec2 {
        self.center + Vec2::polar(self.radius, phase)
    }

    pub fn contains(&self, x: Vec2) -> bool {
        x.distance(self.center) <= self.radius
    }
}

pub fn apollonius_circle(x_a: Vec2, x_d: Vec2, params: &GameParams) -> ApolloniusCircle {
    ApolloniusCircle {
        center: x_a * params.alpha - x_d * params.beta,
        radius: params.gamma * x_a.distance(x_d),
    }
}

fn closest_on_segment(p: Vec2, a: Vec2, b: Vec2) -> Vec2 {
    let ab = b - a;
    let len_sq = ab.norm_sq();
    if len_sq == 0.0 {
        return a;
    }
    let s = ((p - a).dot(ab) / len_sq).clamp(0.0, 1.0);
    a + ab * s
}

fn nearer(p: Vec2, a: Vec2, b: Vec2) -> Vec2 {
    if p.distance(a) <= p.distance(b) {
        a
    } else {
        b
    }
}

/// Closest point to `p` in the filled sector of the given radius.
pub fn closest_point_in_sector(p: Vec2, radius: f64, half_angle: f64) -> Vec2 {
    let r = p.norm();
    let theta = p.angle();
    if theta.abs() <= half_angle {
        return if r <= radius { p } else { Vec2::polar(radius, theta) };
    }
    let upper = closest_on_segment(p, Vec2::ZERO, Vec2::polar(radius, half_angle));
    let lower = closest_on_segment(p, Vec2::ZERO, Vec2::polar(radius, -half_angle));
    nearer(p, upper, lower)
}

/// Euclidean distance from `p` to the filled sector of the given radius.
pub fn distance_to_sector(p: Vec2, radius: f64, half_angle: f64) -> f64 {
    p.distance(closest_point_in_sector(p, radius, half_angle))
}

/// Closest point to `p` in the exit region `{|x| >= radius, |angle(x)| <= half_angle}`,
/// the part of the plane an attacker reaches by crossing the outer arc.
pub fn closest_point_in_exit_region(p: Vec2, radius: f64, half_angle: f64) -> Vec2 {
    let r = p.norm();
    let theta = p.angle();
    if theta.abs() <= half_angle {
        return if r >= radius { p } else { Vec2::polar(radius, theta) };
    }
    // Closest point lies on one of the two rays `s * u(+-half_angle), s >= radius`.
    let on_ray = |edge: Vec2| edge * p.dot(edge).max(radius);
    nearer(p, on_ray(Vec2::unit(half_angle)), on_ray(Vec2::unit(-half_angle)))
}

pub fn distance_to_exit_region(p: Vec2, radius: f64, half_angle: f64) -> f64 {
    p.distance(closest_point_in_exit_region(p, radius, half_angle))
}

/// True when the disk reaches into the target. Tangency counts as guarded.
pub fn circle_meets_target(c: &ApolloniusCircle, params: &GameParams) -> bool {
    distance_to_sector(c.center, params.r_t, params.phi) < c.radius - GEOM_TOL
}

/// True when the disk reaches past the outer arc of the environment.
/// Tangency counts as contained; the side edges are walls, not exits.
pub fn circle_meets_tsr_exterior(c: &ApolloniusCircle, params: &GameParams) -> bool {
    distance_to_exit_region(c.center, params.outer_radius(), params.phi) < c.radius - GEOM_TOL
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn reference() -> GameParams {
        GameParams::reference()
    }

    #[test]
    fn derived_constants_match_direct_evaluation() {
        let p = reference();
        // 1/(1-0.7225) = 3.603603..., gamma = 0.85 alpha, beta = 0.85 gamma
        assert_relative_eq!(p.alpha(), 3.603_603_603_603_6, epsilon = 1e-10);
        assert_relative_eq!(p.beta(), 2.603_603_603_603_6, epsilon = 1e-10);
        assert_relative_eq!(p.gamma(), 3.063_063_063_063_1, epsilon = 1e-10);
        assert!((p.alpha() - p.beta() - 1.0).abs() < 4.0 * f64::EPSILON * p.alpha());
    }

    #[test]
    fn alpha_minus_beta_is_one_across_speed_ratios() {
        for k in 1..100 {
            let nu = k as f64 / 100.0;
            let alpha = 1.0 / (1.0 - nu * nu);
            let gamma = nu * alpha;
            let beta = nu * gamma;
            let err = (alpha - beta - 1.0).abs();
            assert!(err <= 4.0 * f64::EPSILON * alpha, "nu={nu} err={err}");
        }
    }

    #[test]
    fn reference_scenario_passes_assumption_one() {
        // 1 + 1.7/0.2775 = 7.126 <= 8
        let required: f64 = 1.0 + 2.0 * 0.85 / (1.0 - 0.85 * 0.85);
        assert!((required - 7.126_126).abs() < 1e-5);
        assert!(make_params(6.0, 8.0, 1.0, 0.85, PI / 3.0).is_ok());
    }

    #[test]
    fn fast_attacker_violates_assumption_one() {
        let err = make_params(6.0, 8.0, 1.0, 0.97, PI / 3.0).unwrap_err();
        match err {
            ParameterViolation::SensingRatio { required, .. } => {
                assert!((required - 33.83).abs() < 0.01, "required={required}")
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn range_errors_name_the_field() {
        let err = make_params(6.0, 8.0, 1.0, 1.2, PI / 3.0).unwrap_err();
        assert_eq!(err.field(), "nu");
        assert!(err.to_string().contains("nu"));
        assert_eq!(make_params(6.0, 8.0, 1.0, 0.5, 3.5).unwrap_err().field(), "phi");
        assert_eq!(make_params(-1.0, 8.0, 1.0, 0.5, 1.0).unwrap_err().field(), "r_t");
    }

    #[test]
    fn large_target_violates_assumption_two() {
        let err = make_params(20.0, 8.0, 1.0, 0.5, 1.0).unwrap_err();
        assert!(matches!(err, ParameterViolation::TargetReach { .. }));
    }

    #[test]
    fn collocated_agents_give_degenerate_circle() {
        let p = reference();
        let c = apollonius_circle(Vec2::new(1.0, 1.0), Vec2::new(1.0, 1.0), &p);
        assert_relative_eq!(c.center.x, 1.0, epsilon = 1e-12);
        assert_relative_eq!(c.center.y, 1.0, epsilon = 1e-12);
        assert_eq!(c.radius, 0.0);
    }

    #[test]
    fn circle_for_collinear_pair() {
        let p = reference();
        let c = apollonius_circle(Vec2::new(2.0, 0.0), Vec2::new(3.0, 0.0), &p);
        // 2 alpha - 3 beta = 7.207207 - 7.810811
        assert_relative_eq!(c.center.x, -0.603_603_6, epsilon = 1e-6);
        assert_relative_eq!(c.center.y, 0.0);
        assert_relative_eq!(c.radius, 3.063_063_1, epsilon = 1e-6);
    }

    #[test]
    fn circle_at_engagement_configuration() {
        let p = reference();
        let x_a = Vec2::new(9.0, 1.5);
        for &theta in &[0.0, 0.7, -2.1, PI] {
            let x_d = x_a + Vec2::polar(p.rho_a(), theta);
            let c = apollonius_circle(x_a, x_d, &p);
            let expected = x_a - Vec2::polar(p.beta() * p.rho_a(), theta);
            assert!(c.center.distance(expected) < 1e-12);
            assert_relative_eq!(c.radius, p.gamma() * p.rho_a(), epsilon = 1e-12);
        }
    }

    #[test]
    fn target_predicate_examples() {
        let p = reference();
        let inside = ApolloniusCircle { center: Vec2::ZERO, radius: 1.0 };
        assert!(circle_meets_target(&inside, &p));

        let rc = p.engagement_radius();
        let tangent = ApolloniusCircle {
            center: Vec2::new(p.r_t() + rc, 0.0),
            radius: rc,
        };
        assert!(!circle_meets_target(&tangent, &p));

        // Center beyond the side edge, 0.9 radius from the target corner.
        let corner = Vec2::polar(p.r_t(), p.phi());
        let radius = 1.0;
        let dir = Vec2::unit(p.phi() + 0.3);
        let mut center = dir * (p.r_t() + 0.5);
        // slide the center so its corner distance is exactly 0.9 * radius
        let offset = (center - corner).normalized().unwrap();
        center = corner + offset * (0.9 * radius);
        assert!(center.angle() > p.phi());
        let c = ApolloniusCircle { center, radius };
        assert!(circle_meets_target(&c, &p));
    }

    #[test]
    fn exterior_predicate_examples() {
        let p = reference();
        let small = ApolloniusCircle { center: Vec2::ZERO, radius: 1.0 };
        assert!(!circle_meets_tsr_exterior(&small, &p));

        let radius = 2.0;
        let poking = ApolloniusCircle {
            center: Vec2::new(14.0 + 0.01 - radius, 0.0),
            radius,
        };
        assert!(circle_meets_tsr_exterior(&poking, &p));

        // Circles fully inside the capture cone never reach the outer arc.
        let cone = p.capture_cone_radius();
        for k in 0..20 {
            let theta = -p.phi() + 2.0 * p.phi() * k as f64 / 19.0;
            let radius = 0.5 + 0.1 * k as f64;
            let center = Vec2::polar(cone - radius, theta);
            let c = ApolloniusCircle { center, radius };
            assert!(!circle_meets_tsr_exterior(&c, &p));
        }
    }

    #[test]
    fn cone_membership() {
        let p = reference();
        let tsr = p.sensing_region();
        assert!(tsr.contains(Vec2::new(10.0, 0.0)));
        assert!(!tsr.contains(Vec2::new(3.0, 0.0)));
        assert!(!tsr.contains(Vec2::polar(10.0, p.phi() + 0.01)));
        assert!(p.environment().contains(Vec2::ZERO));
        assert!(p.environment().contains(Vec2::polar(14.0, p.phi())));
    }

    #[test]
    fn clamping_drops_onto_nearest_edge() {
        let phi = PI / 3.0;
        let x = Vec2::polar(5.0, phi + 0.1);
        let y = clamp_to_wedge(x, phi);
        assert!((y.angle() - phi).abs() < 1e-12);
        assert!((y.norm() - 5.0 * 0.1f64.cos()).abs() < 1e-12);
        let inside = Vec2::polar(3.0, 0.2);
        assert_eq!(clamp_to_wedge(inside, phi), inside);
    }
}

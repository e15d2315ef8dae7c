//! Time-to-collision assessment between two vehicles.
//!
//! A vehicle's recent motion is summarized by a [`MotionSample`]: its
//! position one step ago, its current position, and per-axis derivatives up
//! to some order. From two samples the module classifies the conflict as
//! rear-end or angular, builds truncated Taylor expansions of each motion,
//! and extracts collision times as polynomial roots.
//!
//! Whether a root set with mixed signs still yields a finite time is
//! genuinely ambiguous between two published conventions, so the choice is
//! an explicit [`TtcPolicy`] rather than a baked-in rule.

pub mod roots;
pub mod trace;

use crate::scalar::Real;
use roots::{real_roots, RootSet};

/// Maximum wrapped motion-angle difference, in radians, for a conflict to
/// count as rear-end (10 degrees).
pub const REAR_END_ANGLE_BOUND: f64 = 10.0 * std::f64::consts::PI / 180.0;

#[derive(Clone, Copy, PartialEq, Eq, Debug, thiserror::Error)]
pub enum TtcError {
    /// The sample's previous and current positions coincide, so its motion
    /// direction is undefined.
    #[error("zero displacement between consecutive positions")]
    DegenerateMotion,
    /// Gap polynomial vanished identically: coincident vehicles with
    /// identical motion.
    #[error("gap polynomial is identically zero")]
    DegeneratePolynomial,
    /// Both motion lines are the same line.
    #[error("motion paths are coincident lines")]
    CoincidentPaths,
    /// Requested Taylor order exceeds the derivatives carried by a sample.
    #[error("order {requested} exceeds available derivatives ({available})")]
    InvalidOrder { requested: usize, available: usize },
}

/// Recent motion of one vehicle.
#[derive(Clone, PartialEq, Debug)]
pub struct MotionSample<T> {
    /// Position one sampling interval before `curr`.
    pub prev: (T, T),
    /// Current position.
    pub curr: (T, T),
    /// Per-axis time derivatives at `curr`, lowest order first:
    /// `derivatives[0]` is velocity, `derivatives[1]` acceleration, and so
    /// on. Must be nonempty.
    pub derivatives: Vec<(T, T)>,
}

impl<T: Real> MotionSample<T> {
    pub fn constant_velocity(prev: (T, T), curr: (T, T), velocity: (T, T)) -> Self {
        Self {
            prev,
            curr,
            derivatives: vec![velocity],
        }
    }

    pub fn order2(prev: (T, T), curr: (T, T), velocity: (T, T), acceleration: (T, T)) -> Self {
        Self {
            prev,
            curr,
            derivatives: vec![velocity, acceleration],
        }
    }

    pub fn max_order(&self) -> usize {
        self.derivatives.len()
    }

    fn check_order(&self, order: usize) -> Result<(), TtcError> {
        if order == 0 || order > self.derivatives.len() {
            return Err(TtcError::InvalidOrder {
                requested: order,
                available: self.derivatives.len(),
            });
        }
        Ok(())
    }

    /// Taylor coefficients of the chosen axis up to `order`, ascending,
    /// with the constant term shifted by `-offset` so roots of the
    /// polynomial are times at which the axis coordinate equals `offset`.
    fn axis_polynomial(&self, axis: Axis, offset: T, order: usize) -> Vec<T> {
        let pick = |pair: &(T, T)| match axis {
            Axis::X => pair.0,
            Axis::Y => pair.1,
        };
        let mut coeffs = Vec::with_capacity(order + 1);
        coeffs.push(pick(&self.curr) - offset);
        let mut factorial = T::one();
        for (n, d) in self.derivatives.iter().take(order).enumerate() {
            factorial = factorial * T::lit((n + 1) as f64);
            coeffs.push(pick(d) / factorial);
        }
        coeffs
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Axis {
    X,
    Y,
}

/// How to turn a collision-time root set into a verdict.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TtcPolicy {
    /// Finite time whenever some root is real and strictly positive; take
    /// the smallest such root.
    #[default]
    MinPositiveReal,
    /// Finite time only when every root is real and strictly positive;
    /// any negative, zero, or complex root means no collision.
    AllRootsPositive,
}

impl TtcPolicy {
    fn select<T: Real>(&self, rs: &RootSet<T>) -> Option<T> {
        match self {
            TtcPolicy::MinPositiveReal => rs.min_positive(),
            TtcPolicy::AllRootsPositive => {
                if rs.all_roots_positive() {
                    rs.min_positive()
                } else {
                    None
                }
            }
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ConflictKind {
    RearEnd,
    Angular,
    /// No conflict geometry at all; produced by callers that rule out
    /// interaction before any TTC math runs.
    None,
}

#[derive(Clone, Copy, PartialEq, Debug)]
pub enum TtcKind<T> {
    Finite(T),
    NoCollision,
}

/// Verdict of a TTC assessment.
#[derive(Clone, Copy, PartialEq, Debug)]
pub struct TtcOutcome<T> {
    pub kind: TtcKind<T>,
    pub conflict: ConflictKind,
    /// Predicted collision point; present exactly for finite angular
    /// verdicts.
    pub point: Option<(T, T)>,
}

impl<T: Real> TtcOutcome<T> {
    pub fn seconds(&self) -> Option<T> {
        match self.kind {
            TtcKind::Finite(t) => Some(t),
            TtcKind::NoCollision => None,
        }
    }

    /// True when the verdict is a collision within `threshold` seconds.
    pub fn within(&self, threshold: T) -> bool {
        matches!(self.kind, TtcKind::Finite(t) if t <= threshold)
    }

    fn no_collision(conflict: ConflictKind) -> Self {
        Self {
            kind: TtcKind::NoCollision,
            conflict,
            point: None,
        }
    }
}

/// Direction of travel implied by the sample's displacement, as an angle in
/// `[0, 2pi)` resolved per quadrant from the absolute-slope arctangent.
pub fn motion_angle<T: Real>(sample: &MotionSample<T>) -> Result<T, TtcError> {
    let dx = sample.curr.0 - sample.prev.0;
    let dy = sample.curr.1 - sample.prev.1;
    if dx == T::zero() && dy == T::zero() {
        return Err(TtcError::DegenerateMotion);
    }
    let pi = T::lit(std::f64::consts::PI);
    let base = if dx == T::zero() {
        pi / T::lit(2.0)
    } else {
        (dy / dx).abs().atan()
    };
    let angle = if dx >= T::zero() && dy >= T::zero() {
        base
    } else if dx < T::zero() && dy >= T::zero() {
        pi - base
    } else if dx < T::zero() {
        pi + base
    } else {
        (pi + pi) - base
    };
    // dx > 0, dy = 0 lands exactly on 0; no other branch can reach 2pi.
    Ok(angle)
}

/// Absolute angle difference wrapped into `[0, pi]`.
pub fn wrapped_angle_difference<T: Real>(a: T, b: T) -> T {
    let two_pi = T::lit(2.0 * std::f64::consts::PI);
    let d = (a - b).abs();
    d.min(two_pi - d)
}

/// Rear-end when the motion directions agree within the 10 degree bound and
/// the vehicles share a lane; otherwise angular.
pub fn classify_conflict<T: Real>(phi_sub: T, phi_col: T, same_lane: bool) -> ConflictKind {
    if same_lane && wrapped_angle_difference(phi_sub, phi_col) <= T::lit(REAR_END_ANGLE_BOUND) {
        ConflictKind::RearEnd
    } else {
        ConflictKind::Angular
    }
}

/// Time until the subject's front reaches the lead's rear, from the order-k
/// Taylor gap polynomial along the longitudinal axis. The smallest strictly
/// positive real root is the collision time; none means the gap never
/// closes.
pub fn rear_end_ttc<T: Real>(
    sub: &MotionSample<T>,
    lead: &MotionSample<T>,
    lead_length: T,
    order: usize,
) -> Result<TtcOutcome<T>, TtcError> {
    sub.check_order(order)?;
    lead.check_order(order)?;
    // Gap closes when x_sub - x_lead + l_lead reaches zero.
    let sub_poly = sub.axis_polynomial(Axis::X, T::zero(), order);
    let lead_poly = lead.axis_polynomial(Axis::X, T::zero(), order);
    let mut coeffs: Vec<T> = sub_poly
        .iter()
        .zip(&lead_poly)
        .map(|(s, l)| *s - *l)
        .collect();
    coeffs[0] = coeffs[0] + lead_length;
    let rs = real_roots(&coeffs);
    if rs.identically_zero {
        return Err(TtcError::DegeneratePolynomial);
    }
    Ok(match rs.min_positive() {
        Some(t) => TtcOutcome {
            kind: TtcKind::Finite(t),
            conflict: ConflictKind::RearEnd,
            point: None,
        },
        None => TtcOutcome::no_collision(ConflictKind::RearEnd),
    })
}

/// Intersection of the two motion lines, accepted as a collision point only
/// when all four per-axis motion equations can reach it at some positive
/// time. Parallel lines have no intersection; coincident lines are a
/// degenerate input rather than an angular geometry.
pub fn predicted_collision_point<T: Real>(
    sub: &MotionSample<T>,
    col: &MotionSample<T>,
    order: usize,
) -> Result<Option<(T, T)>, TtcError> {
    sub.check_order(order)?;
    col.check_order(order)?;
    let phi_sub = motion_angle(sub)?;
    let phi_col = motion_angle(col)?;
    let (sin_s, cos_s) = phi_sub.sin_cos();
    let (sin_c, cos_c) = phi_col.sin_cos();

    // Lines through the current positions along the motion directions.
    let denom = cos_s * sin_c - sin_s * cos_c;
    let dx0 = col.curr.0 - sub.curr.0;
    let dy0 = col.curr.1 - sub.curr.1;
    if denom.abs() < T::lit(1e-12) {
        // Offset of col's position from sub's line tells parallel from
        // coincident.
        let offset = cos_s * dy0 - sin_s * dx0;
        if offset.abs() < T::lit(1e-9) {
            return Err(TtcError::CoincidentPaths);
        }
        return Ok(None);
    }
    let s = (dx0 * sin_c - dy0 * cos_c) / denom;
    let point = (sub.curr.0 + s * cos_s, sub.curr.1 + s * sin_s);

    let reachable = [
        sub.axis_polynomial(Axis::X, point.0, order),
        sub.axis_polynomial(Axis::Y, point.1, order),
        col.axis_polynomial(Axis::X, point.0, order),
        col.axis_polynomial(Axis::Y, point.1, order),
    ]
    .iter()
    .all(|coeffs| real_roots(coeffs).admits_nonnegative());
    Ok(reachable.then_some(point))
}

/// Time for the subject to cover the distance to the predicted collision
/// point, solved along the axis with the larger direction cosine.
pub fn angular_ttc<T: Real>(
    sub: &MotionSample<T>,
    point: (T, T),
    order: usize,
    policy: TtcPolicy,
) -> Result<TtcOutcome<T>, TtcError> {
    sub.check_order(order)?;
    let phi = motion_angle(sub)?;
    let (sin_p, cos_p) = phi.sin_cos();
    let dx = point.0 - sub.curr.0;
    let dy = point.1 - sub.curr.1;

    // The distance to the point enters through its projection on the
    // dominant motion axis. For a point on the motion ray that projection
    // is exactly the signed axis displacement, and the sign makes driving
    // away from the point yield negative roots.
    let (axis, projected) = if cos_p.abs() >= sin_p.abs() {
        (Axis::X, dx)
    } else {
        (Axis::Y, dy)
    };
    let mut coeffs = sub.axis_polynomial(axis, T::zero(), order);
    coeffs[0] = -projected;
    let rs = real_roots(&coeffs);
    if rs.identically_zero {
        return Err(TtcError::DegeneratePolynomial);
    }
    Ok(match policy.select(&rs) {
        Some(t) => TtcOutcome {
            kind: TtcKind::Finite(t),
            conflict: ConflictKind::Angular,
            point: Some(point),
        },
        None => TtcOutcome::no_collision(ConflictKind::Angular),
    })
}

/// Full assessment of a vehicle pair: classify the conflict, then run the
/// matching TTC computation.
pub fn assess_pair<T: Real>(
    sub: &MotionSample<T>,
    col: &MotionSample<T>,
    lead_length: T,
    same_lane: bool,
    order: usize,
    policy: TtcPolicy,
) -> Result<TtcOutcome<T>, TtcError> {
    let phi_sub = motion_angle(sub)?;
    let phi_col = motion_angle(col)?;
    match classify_conflict(phi_sub, phi_col, same_lane) {
        ConflictKind::RearEnd => rear_end_ttc(sub, col, lead_length, order),
        _ => match predicted_collision_point(sub, col, order)? {
            Some(point) => angular_ttc(sub, point, order, policy),
            None => Ok(TtcOutcome::no_collision(ConflictKind::Angular)),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stream::{NoiseDriver, StreamKey};
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    fn sample_along(angle: f64, speed: f64, curr: (f64, f64)) -> MotionSample<f64> {
        let dir = (angle.cos(), angle.sin());
        MotionSample::constant_velocity(
            (curr.0 - dir.0, curr.1 - dir.1),
            curr,
            (speed * dir.0, speed * dir.1),
        )
    }

    #[test]
    fn motion_angle_resolves_all_quadrants() {
        let cases = [
            ((1.0, 1.0), FRAC_PI_4),
            ((-1.0, 1.0), 3.0 * FRAC_PI_4),
            ((-1.0, -1.0), 5.0 * FRAC_PI_4),
            ((1.0, -1.0), 7.0 * FRAC_PI_4),
            ((1.0, 0.0), 0.0),
            ((0.0, 1.0), FRAC_PI_2),
            ((-1.0, 0.0), PI),
            ((0.0, -1.0), 3.0 * FRAC_PI_2),
        ];
        for ((dx, dy), expected) in cases {
            let s = MotionSample::constant_velocity((0.0, 0.0), (dx, dy), (dx, dy));
            let phi = motion_angle(&s).unwrap();
            assert!((phi - expected).abs() < 1e-12, "({dx},{dy}): {phi}");
        }
    }

    #[test]
    fn motion_angle_matches_wrapped_atan2() {
        let mut noise = NoiseDriver::<f64>::new(StreamKey::root(701));
        for _ in 0..500 {
            let dx: f64 = noise.standard_normal();
            let dy: f64 = noise.standard_normal();
            let s = MotionSample::constant_velocity((0.5, -0.25), (0.5 + dx, -0.25 + dy), (dx, dy));
            let phi = motion_angle(&s).unwrap();
            let mut reference = dy.atan2(dx);
            if reference < 0.0 {
                reference += 2.0 * PI;
            }
            assert!(
                (phi - reference).abs() < 1e-12,
                "({dx},{dy}): {phi} vs {reference}"
            );
            assert!((0.0..2.0 * PI).contains(&phi));
        }
    }

    #[test]
    fn motion_angle_ignores_displacement_magnitude() {
        let mut noise = NoiseDriver::<f64>::new(StreamKey::root(702));
        for _ in 0..100 {
            let dx: f64 = noise.standard_normal();
            let dy: f64 = noise.standard_normal();
            let c: f64 = noise.uniform() * 10.0 + 0.1;
            let a = MotionSample::constant_velocity((0.0, 0.0), (dx, dy), (dx, dy));
            let b = MotionSample::constant_velocity((0.0, 0.0), (c * dx, c * dy), (dx, dy));
            let pa = motion_angle(&a).unwrap();
            let pb = motion_angle(&b).unwrap();
            assert!((pa - pb).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_displacement_is_degenerate() {
        let s = MotionSample::constant_velocity((1.0, 2.0), (1.0, 2.0), (0.0, 0.0));
        assert_eq!(motion_angle(&s), Err(TtcError::DegenerateMotion));
    }

    #[test]
    fn conflict_classification_cases() {
        assert_eq!(classify_conflict(0.3, 0.3, true), ConflictKind::RearEnd);
        assert_eq!(classify_conflict(0.3, 0.3, false), ConflictKind::Angular);
        assert_eq!(
            classify_conflict(0.0, FRAC_PI_4, true),
            ConflictKind::Angular
        );
        // Wrap-around: 0.05 rad and 2pi - 0.05 rad differ by 0.1 rad < 10 deg.
        assert_eq!(
            classify_conflict(0.05, 2.0 * PI - 0.05, true),
            ConflictKind::RearEnd
        );
    }

    #[test]
    fn conflict_classification_is_symmetric() {
        let mut noise = NoiseDriver::<f64>::new(StreamKey::root(703));
        for _ in 0..200 {
            let a = noise.uniform() * 2.0 * PI;
            let b = noise.uniform() * 2.0 * PI;
            for same_lane in [true, false] {
                assert_eq!(
                    classify_conflict(a, b, same_lane),
                    classify_conflict(b, a, same_lane)
                );
            }
        }
    }

    #[test]
    fn rear_end_linear_case() {
        // Lead 54.508 m ahead center-to-center, body 4.508 m: gap 50 m.
        let sub = sample_along(0.0, 25.0, (0.0, 0.0));
        let lead = sample_along(0.0, 20.0, (54.508, 0.0));
        let out = rear_end_ttc(&sub, &lead, 4.508, 1).unwrap();
        assert_eq!(out.conflict, ConflictKind::RearEnd);
        let t = out.seconds().unwrap();
        assert!((t - 10.0).abs() < 1e-12, "{t}");
        assert_eq!(out.point, None);
    }

    #[test]
    fn rear_end_opening_gap_never_collides() {
        let sub = sample_along(0.0, 20.0, (0.0, 0.0));
        let lead = sample_along(0.0, 25.0, (54.508, 0.0));
        let out = rear_end_ttc(&sub, &lead, 4.508, 1).unwrap();
        assert_eq!(out.kind, TtcKind::NoCollision);
    }

    #[test]
    fn rear_end_quadratic_case() {
        // Gap 50 m, closing speed 5 m/s, subject gaining 1 m/s^2: collision
        // when 50 - 5t - 0.5 t^2 = 0. Oracle: quadratic formula on
        // t^2 + 10t - 100 = 0.
        let oracle = (-10.0 + 500.0f64.sqrt()) / 2.0;
        let sub = MotionSample::order2((-25.0, 0.0), (0.0, 0.0), (25.0, 0.0), (1.0, 0.0));
        let lead = MotionSample::order2((34.0, 0.0), (54.0, 0.0), (20.0, 0.0), (0.0, 0.0));
        let out = rear_end_ttc(&sub, &lead, 4.0, 2).unwrap();
        let t = out.seconds().unwrap();
        assert!((t - oracle).abs() < 1e-12, "{t} vs {oracle}");
    }

    #[test]
    fn rear_end_order1_matches_headway_formula() {
        // gap / closing-speed, the classic car-following expression.
        let mut noise = NoiseDriver::<f64>::new(StreamKey::root(704));
        for _ in 0..200 {
            let gap = 1.0 + noise.uniform() * 100.0;
            let v_lead = 10.0 + noise.uniform() * 20.0;
            let closing = 0.1 + noise.uniform() * 10.0;
            let length = 3.0 + noise.uniform() * 3.0;
            let sub = sample_along(0.0, v_lead + closing, (0.0, 0.0));
            let lead = sample_along(0.0, v_lead, (gap + length, 0.0));
            let reference = gap / closing;
            let t = rear_end_ttc(&sub, &lead, length, 1)
                .unwrap()
                .seconds()
                .unwrap();
            assert!(
                (t - reference).abs() <= 1e-12 * reference.max(1.0),
                "{t} vs {reference}"
            );
        }
    }

    #[test]
    fn rear_end_scales_with_distance() {
        let sub = sample_along(0.0, 25.0, (0.0, 0.0));
        let lead = sample_along(0.0, 20.0, (54.0, 0.0));
        let t1 = rear_end_ttc(&sub, &lead, 4.0, 1).unwrap().seconds().unwrap();
        let lead2 = sample_along(0.0, 20.0, (108.0, 0.0));
        let t2 = rear_end_ttc(&sub, &lead2, 8.0, 1).unwrap().seconds().unwrap();
        assert!((t2 - 2.0 * t1).abs() < 1e-12);
    }

    #[test]
    fn rear_end_identical_overlapping_motion_is_degenerate() {
        let sub = sample_along(0.0, 20.0, (0.0, 0.0));
        let lead = sample_along(0.0, 20.0, (4.0, 0.0));
        let err = rear_end_ttc(&sub, &lead, 4.0, 1).unwrap_err();
        assert_eq!(err, TtcError::DegeneratePolynomial);
    }

    #[test]
    fn invalid_order_is_reported() {
        let sub = sample_along(0.0, 20.0, (0.0, 0.0));
        let lead = sample_along(0.0, 25.0, (50.0, 0.0));
        let err = rear_end_ttc(&sub, &lead, 4.0, 2).unwrap_err();
        assert_eq!(
            err,
            TtcError::InvalidOrder {
                requested: 2,
                available: 1
            }
        );
    }

    #[test]
    fn perpendicular_crossing_point() {
        // Both 10 m from (10, 10) at 5 m/s, one eastbound, one northbound.
        let sub = sample_along(0.0, 5.0, (0.0, 10.0));
        let col = sample_along(FRAC_PI_2, 5.0, (10.0, 0.0));
        let point = predicted_collision_point(&sub, &col, 1).unwrap().unwrap();
        assert!((point.0 - 10.0).abs() < 1e-9);
        assert!((point.1 - 10.0).abs() < 1e-9);
        let out = angular_ttc(&sub, point, 1, TtcPolicy::MinPositiveReal).unwrap();
        let t = out.seconds().unwrap();
        assert!((t - 2.0).abs() < 1e-12, "{t}");
        assert_eq!(out.point, Some(point));
        let out_col = angular_ttc(&col, point, 1, TtcPolicy::MinPositiveReal).unwrap();
        assert!((out_col.seconds().unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn intersection_behind_either_vehicle_is_rejected() {
        // Collider drives away from the crossing: required time negative.
        let sub = sample_along(0.0, 5.0, (0.0, 10.0));
        let col = sample_along(FRAC_PI_2, 5.0, (10.0, 20.0));
        assert_eq!(predicted_collision_point(&sub, &col, 1).unwrap(), None);
    }

    #[test]
    fn parallel_paths_have_no_point() {
        let sub = sample_along(FRAC_PI_4, 5.0, (0.0, 0.0));
        let col = sample_along(FRAC_PI_4, 7.0, (3.0, 0.0));
        assert_eq!(predicted_collision_point(&sub, &col, 1).unwrap(), None);
    }

    #[test]
    fn coincident_paths_are_degenerate() {
        let sub = sample_along(0.0, 5.0, (0.0, 10.0));
        let col = sample_along(0.0, 7.0, (30.0, 10.0));
        assert_eq!(
            predicted_collision_point(&sub, &col, 1),
            Err(TtcError::CoincidentPaths)
        );
    }

    #[test]
    fn collision_point_consistency_on_random_crossings() {
        // Place both vehicles behind a common target point and check the
        // Taylor motions reproduce it at their travel times.
        let mut noise = NoiseDriver::<f64>::new(StreamKey::root(705));
        for _ in 0..100 {
            let target = (noise.standard_normal() * 20.0, noise.standard_normal() * 20.0);
            let phi_sub = noise.uniform() * 2.0 * PI;
            let mut phi_col = noise.uniform() * 2.0 * PI;
            if wrapped_angle_difference(phi_sub, phi_col) < 0.05
                || wrapped_angle_difference(phi_sub, phi_col + PI) < 0.05
            {
                phi_col += 0.3;
            }
            let r_sub = 5.0 + noise.uniform() * 40.0;
            let r_col = 5.0 + noise.uniform() * 40.0;
            let v_sub = 2.0 + noise.uniform() * 20.0;
            let v_col = 2.0 + noise.uniform() * 20.0;
            let sub = sample_along(
                phi_sub,
                v_sub,
                (
                    target.0 - r_sub * phi_sub.cos(),
                    target.1 - r_sub * phi_sub.sin(),
                ),
            );
            let col = sample_along(
                phi_col,
                v_col,
                (
                    target.0 - r_col * phi_col.cos(),
                    target.1 - r_col * phi_col.sin(),
                ),
            );
            let point = predicted_collision_point(&sub, &col, 1)
                .unwrap()
                .expect("crossing geometry must produce a point");
            assert!((point.0 - target.0).abs() < 1e-9, "{point:?} vs {target:?}");
            assert!((point.1 - target.1).abs() < 1e-9);
            for (vehicle, radius, speed) in [(&sub, r_sub, v_sub), (&col, r_col, v_col)] {
                let t = angular_ttc(vehicle, point, 1, TtcPolicy::MinPositiveReal)
                    .unwrap()
                    .seconds()
                    .unwrap();
                assert!((t - radius / speed).abs() < 1e-9);
                let x = vehicle.curr.0 + vehicle.derivatives[0].0 * t;
                let y = vehicle.curr.1 + vehicle.derivatives[0].1 * t;
                assert!((x - point.0).abs() < 1e-9);
                assert!((y - point.1).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn angular_linear_case() {
        let sub = sample_along(0.0, 5.0, (0.0, 0.0));
        let out = angular_ttc(&sub, (20.0, 0.0), 1, TtcPolicy::MinPositiveReal).unwrap();
        assert!((out.seconds().unwrap() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn angular_point_behind_is_no_collision() {
        let sub = sample_along(0.0, 5.0, (0.0, 0.0));
        let out = angular_ttc(&sub, (-20.0, 0.0), 1, TtcPolicy::MinPositiveReal).unwrap();
        assert_eq!(out.kind, TtcKind::NoCollision);
        assert_eq!(out.point, None);
    }

    #[test]
    fn angular_policy_split_on_mixed_roots() {
        // 20 m ahead, 5 m/s, 2 m/s^2: roots of t^2 + 5t - 20 = 0 are one
        // positive, one negative. Oracle: quadratic formula.
        let oracle = (-5.0 + (25.0f64 + 80.0).sqrt()) / 2.0;
        let sub = MotionSample::order2((-1.0, 0.0), (0.0, 0.0), (5.0, 0.0), (2.0, 0.0));
        let lenient = angular_ttc(&sub, (20.0, 0.0), 2, TtcPolicy::MinPositiveReal).unwrap();
        assert!((lenient.seconds().unwrap() - oracle).abs() < 1e-12);
        let strict = angular_ttc(&sub, (20.0, 0.0), 2, TtcPolicy::AllRootsPositive).unwrap();
        assert_eq!(strict.kind, TtcKind::NoCollision);
    }

    #[test]
    fn angular_axis_choice_follows_dominant_direction() {
        // Northbound: cos is 0, the y-axis equation must be used.
        let north = sample_along(FRAC_PI_2, 5.0, (0.0, 0.0));
        let out = angular_ttc(&north, (0.0, 20.0), 1, TtcPolicy::MinPositiveReal).unwrap();
        assert!((out.seconds().unwrap() - 4.0).abs() < 1e-12);
        // Diagonal: tie broken toward x.
        let diag = sample_along(FRAC_PI_4, 50.0f64.sqrt(), (0.0, 0.0));
        let out = angular_ttc(&diag, (10.0, 10.0), 1, TtcPolicy::MinPositiveReal).unwrap();
        assert!((out.seconds().unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn assess_pair_dispatches_by_classification() {
        let sub = sample_along(0.0, 25.0, (0.0, 0.0));
        let lead = sample_along(0.0, 20.0, (54.0, 0.0));
        let same_lane =
            assess_pair(&sub, &lead, 4.0, true, 1, TtcPolicy::MinPositiveReal).unwrap();
        assert_eq!(same_lane.conflict, ConflictKind::RearEnd);
        assert!(same_lane.seconds().is_some());

        let crossing = sample_along(FRAC_PI_2, 5.0, (10.0, -10.0));
        let sub_slow = sample_along(0.0, 5.0, (0.0, 0.0));
        let out = assess_pair(&sub_slow, &crossing, 4.0, false, 1, TtcPolicy::MinPositiveReal)
            .unwrap();
        assert_eq!(out.conflict, ConflictKind::Angular);
        assert!((out.seconds().unwrap() - 2.0).abs() < 1e-12);
    }
}

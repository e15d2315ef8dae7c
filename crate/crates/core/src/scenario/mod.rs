//! Two-vehicle lane-change scenario with one-sided situation awareness.
//!
//! Two vehicles approach a shared middle lane from adjacent lanes: the
//! right vehicle (called ER) changes left, the left vehicle (EL) changes
//! right, both steered by a PD law toward the lane center. ER additionally
//! runs an awareness layer: once the awareness ellipses of the two vehicles
//! intersect, ER receives an estimate of EL's state, and after a random
//! reaction delay it enters an aware phase where a time-to-collision check
//! decides between completing the maneuver and reverting to its home lane.
//! EL has no such layer and always completes its lane change.
//!
//! The joint system is a [`GshsModel`]: the reaction delay enters as a
//! state-dependent jump rate (a Rayleigh hazard in the time since
//! awareness), all other discrete transitions are guards, and a collision
//! is the intersection of the innermost proximity ellipses.

pub mod geometry;
pub mod modes;

use crate::scalar::Real;
use crate::shs::{GshsModel, JumpCause, ModelError, StatePredicate};
use crate::splitting::LevelSchedule;
use crate::stream::NoiseDriver;
use crate::ttc::{assess_pair, MotionSample, TtcPolicy};
use crate::vehicle::{
    pd_steering, vehicle_drift, PdGains, VehicleParams, VehicleState, VEHICLE_DIM,
};
use geometry::{EllipseFamily, GeometryError};
use modes::{DrivingMode, Intent, LaneIndex, Phase, ScenarioMode};

/// Continuous dimension of the joint state: two vehicles, four estimate
/// components, one awareness timer.
pub const STATE_DIM: usize = 2 * VEHICLE_DIM + SA_DIM + 1;
/// Continuous components of the situation-awareness estimate.
pub const SA_DIM: usize = 4;
/// Dimension of ER's own augmented state: its vehicle state, the estimate
/// of EL, and the awareness timer.
pub const ER_AUGMENTED_DIM: usize = VEHICLE_DIM + SA_DIM + 1;

const ER_OFFSET: usize = 0;
const EL_OFFSET: usize = VEHICLE_DIM;
const SA_OFFSET: usize = 2 * VEHICLE_DIM;
const TIMER_INDEX: usize = SA_OFFSET + SA_DIM;

/// Sampling interval used to synthesize the previous position fed to the
/// motion-angle computation. The angle of a straight-line displacement is
/// invariant to this choice; it only has to be positive.
const TTC_DISPLACEMENT_INTERVAL: f64 = 0.05;

#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Vehicle(#[from] crate::vehicle::VehicleParamError),
    #[error("{0}")]
    InvalidParam(String),
}

/// ER's continuous estimate of EL plus the awareness timer.
#[derive(Clone, Copy, PartialEq, Debug)]
pub struct SaVector<T> {
    pub est_x: T,
    pub est_y: T,
    pub est_heading: T,
    pub est_v_lat: T,
    /// Seconds since awareness began; 0 before first ellipse contact.
    pub timer: T,
}

/// Structured view of the joint continuous state.
#[derive(Clone, Copy, PartialEq, Debug)]
pub struct ScenarioState<T> {
    pub er: VehicleState<T>,
    pub el: VehicleState<T>,
    pub sa: SaVector<T>,
}

impl<T: Real> ScenarioState<T> {
    pub fn from_slice(x: &[T]) -> Self {
        debug_assert_eq!(x.len(), STATE_DIM);
        Self {
            er: VehicleState::from_slice(&x[ER_OFFSET..ER_OFFSET + VEHICLE_DIM]),
            el: VehicleState::from_slice(&x[EL_OFFSET..EL_OFFSET + VEHICLE_DIM]),
            sa: SaVector {
                est_x: x[SA_OFFSET],
                est_y: x[SA_OFFSET + 1],
                est_heading: x[SA_OFFSET + 2],
                est_v_lat: x[SA_OFFSET + 3],
                timer: x[TIMER_INDEX],
            },
        }
    }

    pub fn write_to(&self, out: &mut [T]) {
        self.er.write_to(&mut out[ER_OFFSET..ER_OFFSET + VEHICLE_DIM]);
        self.el.write_to(&mut out[EL_OFFSET..EL_OFFSET + VEHICLE_DIM]);
        out[SA_OFFSET] = self.sa.est_x;
        out[SA_OFFSET + 1] = self.sa.est_y;
        out[SA_OFFSET + 2] = self.sa.est_heading;
        out[SA_OFFSET + 3] = self.sa.est_v_lat;
        out[TIMER_INDEX] = self.sa.timer;
    }

    pub fn to_vec(&self) -> Vec<T> {
        let mut out = vec![T::zero(); STATE_DIM];
        self.write_to(&mut out);
        out
    }
}

/// Refresh of the estimate from the other vehicle's true state. Requires
/// awareness: before first ellipse contact ER has no channel to read EL.
pub fn copy_sa<T: Real>(mode: &ScenarioMode, state: &ScenarioState<T>) -> SaVector<T> {
    debug_assert!(mode.aware, "SA copy requires established awareness");
    SaVector {
        est_x: state.el.x,
        est_y: state.el.y,
        est_heading: state.el.heading,
        est_v_lat: state.el.v_lat,
        timer: state.sa.timer,
    }
}

/// Rayleigh reaction-delay hazard: while the vehicle is mid lane change
/// (changing left), the rate is `timer / mean_delay^2`, the hazard of a
/// Rayleigh density with scale `mean_delay`; in any other mode it is 0.
pub fn delay_rate<T: Real>(timer: T, er_mode: DrivingMode, mean_delay: T) -> T {
    debug_assert!(mean_delay > T::zero());
    if er_mode == DrivingMode::new(Phase::ChangingLane, Intent::Left) {
        timer / (mean_delay * mean_delay)
    } else {
        T::zero()
    }
}

/// All scenario parameters.
#[derive(Clone, PartialEq, Debug)]
pub struct ScenarioParams<T> {
    pub vehicle: VehicleParams<T>,
    /// Steering gains; the lane target is substituted per vehicle.
    pub gains: PdGains<T>,
    pub lane_width: T,
    /// Time at which ER decides to change lanes.
    pub er_decision_time: T,
    /// Time at which EL decides to change lanes.
    pub el_decision_time: T,
    /// EL's initial longitudinal lead over ER.
    pub el_start_x: T,
    pub horizon: T,
    /// Half-width of the settled band around a lane center.
    pub settle_tolerance: T,
    /// Scale of the Rayleigh reaction delay.
    pub mean_reaction_delay: T,
    /// TTC at or below which an aware ER aborts its maneuver.
    pub ttc_threshold: T,
    /// Taylor order of the TTC motion expansions (1 or 2).
    pub ttc_order: usize,
    pub ttc_policy: TtcPolicy,
    /// Proximity ring scale factors, outermost first, ending at 1.
    pub ellipse_ratios: Vec<T>,
    /// Awareness ellipse scale factor; 0 disables awareness entirely.
    pub awareness_ratio: T,
}

impl<T: Real> Default for ScenarioParams<T> {
    fn default() -> Self {
        Self {
            vehicle: VehicleParams::default(),
            gains: PdGains::default(),
            lane_width: T::lit(3.5),
            // EL commits first and ER follows late: the long converging
            // approach is what makes a missed reaction rare rather than
            // typical. Simultaneous starts leave under a second between
            // first awareness contact and the conflict turning unresolvable,
            // so almost every run collides regardless of awareness.
            er_decision_time: T::lit(9.0),
            el_decision_time: T::zero(),
            el_start_x: T::lit(4.0),
            horizon: T::lit(18.0),
            settle_tolerance: T::lit(0.05),
            mean_reaction_delay: T::lit(0.6),
            ttc_threshold: T::lit(10.0),
            // Velocity-only extrapolation: the second-order term models the
            // other vehicle's decaying lateral approach as a motion that
            // stalls short of the lane center, which hides the conflict
            // exactly when the abort decision matters.
            ttc_order: 1,
            ttc_policy: TtcPolicy::MinPositiveReal,
            ellipse_ratios: (0..6).map(|k| T::lit(2.0 - 0.2 * k as f64)).collect(),
            awareness_ratio: T::lit(1.7),
        }
    }
}

impl<T: Real> ScenarioParams<T> {
    pub fn validate(&self) -> Result<(), ScenarioError> {
        self.vehicle.validate()?;
        self.gains.validate()?;
        let positive: [(&str, T); 4] = [
            ("lane_width", self.lane_width),
            ("horizon", self.horizon),
            ("settle_tolerance", self.settle_tolerance),
            ("mean_reaction_delay", self.mean_reaction_delay),
        ];
        for (field, value) in positive {
            if !value.is_finite() || value <= T::zero() {
                return Err(ScenarioError::InvalidParam(format!(
                    "{field} must be positive and finite, got {}",
                    value.to_f64_lossy()
                )));
            }
        }
        let nonnegative: [(&str, T); 4] = [
            ("er_decision_time", self.er_decision_time),
            ("el_decision_time", self.el_decision_time),
            ("ttc_threshold", self.ttc_threshold),
            ("awareness_ratio", self.awareness_ratio),
        ];
        for (field, value) in nonnegative {
            if !value.is_finite() || value < T::zero() {
                return Err(ScenarioError::InvalidParam(format!(
                    "{field} must be nonnegative and finite, got {}",
                    value.to_f64_lossy()
                )));
            }
        }
        if !self.el_start_x.is_finite() {
            return Err(ScenarioError::InvalidParam(
                "el_start_x must be finite".into(),
            ));
        }
        if self.ttc_order == 0 || self.ttc_order > 2 {
            return Err(ScenarioError::InvalidParam(format!(
                "ttc_order must be 1 or 2, got {}",
                self.ttc_order
            )));
        }
        // Family construction revalidates the ratio list.
        EllipseFamily::new(
            self.ellipse_ratios.clone(),
            self.vehicle.length,
            self.vehicle.width,
            self.awareness_ratio,
        )?;
        Ok(())
    }
}

/// The joint lane-change scenario as a jump-diffusion hybrid model.
pub struct LaneChangeModel<T> {
    params: ScenarioParams<T>,
    family: EllipseFamily<T>,
    poisson_rates: [T; 2],
}

impl<T: Real> LaneChangeModel<T> {
    pub fn new(params: ScenarioParams<T>) -> Result<Self, ScenarioError> {
        params.validate()?;
        let family = EllipseFamily::new(
            params.ellipse_ratios.clone(),
            params.vehicle.length,
            params.vehicle.width,
            params.awareness_ratio,
        )?;
        let model = Self {
            poisson_rates: [params.vehicle.jump_rate; 2],
            family,
            params,
        };
        let init = model.initial_state();
        if model.family.level_intersects(0, (init.er.x, init.er.y), (init.el.x, init.el.y)) {
            return Err(ScenarioError::InvalidParam(
                "initial positions already lie inside the outermost proximity ring".into(),
            ));
        }
        Ok(model)
    }

    pub fn params(&self) -> &ScenarioParams<T> {
        &self.params
    }

    pub fn family(&self) -> &EllipseFamily<T> {
        &self.family
    }

    pub fn lane_center(&self, lane: LaneIndex) -> T {
        T::lit(lane as f64) * self.params.lane_width
    }

    fn nearest_lane(&self, y: T) -> LaneIndex {
        let idx = (y / self.params.lane_width).round().to_f64_lossy();
        idx.clamp(0.0, 2.0) as LaneIndex
    }

    /// Both vehicles centered in their home lanes, eyes-forward, with the
    /// estimate initialized to EL's true state.
    pub fn initial_state(&self) -> ScenarioState<T> {
        let zero = T::zero();
        let er = VehicleState {
            x: zero,
            y: zero,
            heading: zero,
            v_lat: zero,
            yaw_rate: zero,
        };
        let el = VehicleState {
            x: self.params.el_start_x,
            y: self.lane_center(2),
            heading: zero,
            v_lat: zero,
            yaw_rate: zero,
        };
        ScenarioState {
            er,
            el,
            sa: SaVector {
                est_x: el.x,
                est_y: el.y,
                est_heading: el.heading,
                est_v_lat: el.v_lat,
                timer: zero,
            },
        }
    }

    fn steering(&self, vehicle: &VehicleState<T>, target: LaneIndex) -> T {
        let gains = self.params.gains.with_target(self.lane_center(target));
        pd_steering(vehicle, &self.params.vehicle, &gains)
    }

    /// Whether the delayed awareness transition is armed: ER mid maneuver,
    /// awareness established, and the estimate showing EL mid maneuver.
    fn delayed_transition_armed(&self, mode: &ScenarioMode) -> bool {
        mode.er == DrivingMode::new(Phase::ChangingLane, Intent::Left)
            && mode.aware
            && mode.est_mode == DrivingMode::new(Phase::ChangingLane, Intent::Right)
    }

    /// TTC verdict the aware vehicle acts on: true means abort.
    ///
    /// The subject is ER's true motion; the collider is the estimate, with
    /// angular and force terms taken from EL's true state exactly as the
    /// estimate drift does.
    fn ttc_says_revert(&self, mode: &ScenarioMode, state: &ScenarioState<T>) -> bool {
        let p = &self.params.vehicle;
        let delta = T::lit(TTC_DISPLACEMENT_INTERVAL);

        let er_motion = crate::vehicle::planar_motion(
            &state.er,
            p,
            self.steering(&state.er, mode.er_target),
        );
        let sub = MotionSample::order2(
            (
                state.er.x - er_motion.velocity.0 * delta,
                state.er.y - er_motion.velocity.1 * delta,
            ),
            (state.er.x, state.er.y),
            er_motion.velocity,
            er_motion.acceleration,
        );

        let (sin_h, cos_h) = state.sa.est_heading.sin_cos();
        let vel = (
            p.v_long * cos_h - state.sa.est_v_lat * sin_h,
            p.v_long * sin_h + state.sa.est_v_lat * cos_h,
        );
        let heading_rate = state.el.yaw_rate;
        let v_lat_rate =
            vehicle_drift(&state.el, p, self.steering(&state.el, mode.el_target))[3];
        let acc = (
            -p.v_long * sin_h * heading_rate
                - v_lat_rate * sin_h
                - state.sa.est_v_lat * cos_h * heading_rate,
            p.v_long * cos_h * heading_rate + v_lat_rate * cos_h
                - state.sa.est_v_lat * sin_h * heading_rate,
        );
        let col = MotionSample::order2(
            (
                state.sa.est_x - vel.0 * delta,
                state.sa.est_y - vel.1 * delta,
            ),
            (state.sa.est_x, state.sa.est_y),
            vel,
            acc,
        );

        let same_lane = self.nearest_lane(state.er.y) == self.nearest_lane(state.sa.est_y);
        match assess_pair(
            &sub,
            &col,
            p.length,
            same_lane,
            self.params.ttc_order,
            self.params.ttc_policy,
        ) {
            Ok(outcome) => outcome.within(self.params.ttc_threshold),
            // Degenerate TTC geometry means overlapping vehicles; the
            // collision guard owns that region.
            Err(_) => false,
        }
    }

    /// All guard transitions enabled at this instant, applied in priority
    /// order on copies. Returns `None` when nothing fires. A collision
    /// preempts everything; the abort decision outranks lane settling.
    pub fn step_discrete(
        &self,
        clock: T,
        mode: &ScenarioMode,
        state: &ScenarioState<T>,
    ) -> Option<(ScenarioMode, ScenarioState<T>)> {
        if mode.is_hit() {
            return None;
        }
        let mut m = *mode;
        let mut s = *state;
        let mut sa_refreshed = false;

        if self.family.collision((s.er.x, s.er.y), (s.el.x, s.el.y)) {
            m.er = DrivingMode::hit();
            m.el = DrivingMode::hit();
            return Some((m, s));
        }

        if !m.aware && self.family.awareness_intersects((s.er.x, s.er.y), (s.el.x, s.el.y)) {
            m.aware = true;
            s.sa = copy_sa(&m, &s);
            sa_refreshed = true;
        }

        if m.el == DrivingMode::straight() && !m.el_committed && clock >= self.params.el_decision_time
        {
            m.el = DrivingMode::new(Phase::ChangingLane, Intent::Right);
            m.el_committed = true;
            m.el_target = 1;
        }
        if m.er == DrivingMode::straight() && !m.er_committed && clock >= self.params.er_decision_time
        {
            m.er = DrivingMode::new(Phase::ChangingLane, Intent::Left);
            m.er_committed = true;
            m.er_target = 1;
        }

        if m.er == DrivingMode::new(Phase::Aware, Intent::Left) && self.ttc_says_revert(&m, &s) {
            m.er = DrivingMode::new(Phase::Reverting, Intent::Right);
            m.er_target = 0;
        }

        let settled = |y: T, lane: LaneIndex| {
            (y - self.lane_center(lane)).abs() < self.params.settle_tolerance
        };
        if matches!(
            m.er.phase,
            Phase::ChangingLane | Phase::Aware | Phase::Reverting
        ) && settled(s.er.y, m.er_target)
        {
            m.er = DrivingMode::straight();
        }
        if m.el.phase == Phase::ChangingLane && settled(s.el.y, m.el_target) {
            m.el = DrivingMode::straight();
        }

        // An aware observer sees every discrete transition of the other
        // vehicle; each observation re-synchronizes the estimate to truth.
        if m.aware && m.est_mode != m.el {
            m.est_mode = m.el;
            s.sa = copy_sa(&m, &s);
            sa_refreshed = true;
        }

        if m != *mode || sa_refreshed {
            Some((m, s))
        } else {
            None
        }
    }

    /// Nested level predicates for the splitting estimator, outermost
    /// first; the last one is the collision event.
    pub fn level_schedule(&self) -> LevelSchedule<T, ScenarioMode> {
        let mut levels: Vec<Box<dyn StatePredicate<T, ScenarioMode> + Send + Sync>> = Vec::new();
        for k in 0..self.family.level_count() {
            let (rx, ry) = self.family.semi_axes(k);
            levels.push(Box::new(move |_mode: &ScenarioMode, x: &[T]| {
                geometry::ellipses_intersect(
                    (x[ER_OFFSET], x[ER_OFFSET + 1]),
                    (x[EL_OFFSET], x[EL_OFFSET + 1]),
                    rx,
                    ry,
                )
            }));
        }
        LevelSchedule::new(levels, self.params.horizon).expect("nonempty family, positive horizon")
    }
}

impl<T: Real> GshsModel<T> for LaneChangeModel<T> {
    type Mode = ScenarioMode;

    fn dim(&self, _mode: &ScenarioMode) -> usize {
        STATE_DIM
    }

    fn brownian_dim(&self) -> usize {
        2
    }

    fn poisson_rates(&self) -> &[T] {
        &self.poisson_rates
    }

    fn apply_jump_noise(&self, channel: usize, mode: &ScenarioMode, x: &mut [T]) {
        if mode.is_hit() {
            return;
        }
        let eps = self.params.vehicle.jump_magnitude;
        let offset = match channel {
            0 => ER_OFFSET,
            _ => EL_OFFSET,
        };
        x[offset] = x[offset] + eps;
        x[offset + 1] = x[offset + 1] + eps;
    }

    fn drift(&self, _t: T, mode: &ScenarioMode, x: &[T], out: &mut [T]) {
        if mode.is_hit() {
            out.iter_mut().for_each(|v| *v = T::zero());
            return;
        }
        let p = &self.params.vehicle;
        let state = ScenarioState::from_slice(x);
        let er_drift = vehicle_drift(&state.er, p, self.steering(&state.er, mode.er_target));
        let el_drift = vehicle_drift(&state.el, p, self.steering(&state.el, mode.el_target));
        out[ER_OFFSET..ER_OFFSET + VEHICLE_DIM].copy_from_slice(&er_drift);
        out[EL_OFFSET..EL_OFFSET + VEHICLE_DIM].copy_from_slice(&el_drift);

        // Estimate drift: position rates from the estimated heading and
        // lateral velocity; heading and lateral-velocity rates read EL's
        // true signals, so after a refresh the estimate tracks exactly.
        let (sin_h, cos_h) = state.sa.est_heading.sin_cos();
        out[SA_OFFSET] = p.v_long * cos_h - state.sa.est_v_lat * sin_h;
        out[SA_OFFSET + 1] = p.v_long * sin_h + state.sa.est_v_lat * cos_h;
        out[SA_OFFSET + 2] = state.el.yaw_rate;
        out[SA_OFFSET + 3] = el_drift[3];
        out[TIMER_INDEX] = if mode.aware { T::one() } else { T::zero() };
    }

    fn add_diffusion(&self, _t: T, mode: &ScenarioMode, _x: &[T], dw: &[T], out: &mut [T]) {
        if mode.is_hit() {
            return;
        }
        let eps = self.params.vehicle.diffusion_magnitude;
        out[ER_OFFSET] = out[ER_OFFSET] + eps * dw[0];
        out[ER_OFFSET + 1] = out[ER_OFFSET + 1] + eps * dw[0];
        out[EL_OFFSET] = out[EL_OFFSET] + eps * dw[1];
        out[EL_OFFSET + 1] = out[EL_OFFSET + 1] + eps * dw[1];
    }

    fn jump_rate(&self, _t: T, mode: &ScenarioMode, x: &[T]) -> T {
        if !self.delayed_transition_armed(mode) {
            return T::zero();
        }
        delay_rate(x[TIMER_INDEX], mode.er, self.params.mean_reaction_delay)
    }

    fn guard(&self, t: T, mode: &ScenarioMode, x: &[T]) -> bool {
        let state = ScenarioState::from_slice(x);
        self.step_discrete(t, mode, &state).is_some()
    }

    fn reset(
        &self,
        t: T,
        mode: &ScenarioMode,
        x: &[T],
        cause: JumpCause,
        _noise: &mut NoiseDriver<T>,
    ) -> Result<(ScenarioMode, Vec<T>), ModelError> {
        mode.check()?;
        let mut m = *mode;
        let mut s = ScenarioState::from_slice(x);
        if cause.budget_expired {
            if !self.delayed_transition_armed(&m) {
                return Err(ModelError(
                    "jump budget expired while the delayed transition is disarmed".into(),
                ));
            }
            m.er = DrivingMode::new(Phase::Aware, Intent::Left);
        }
        // Chain any guards enabled at this instant, including ones enabled
        // by the delayed transition itself (an aware vehicle may abort in
        // the same instant it finishes reacting).
        if let Some((m2, s2)) = self.step_discrete(t, &m, &s) {
            m = m2;
            s = s2;
        }
        m.check()?;
        Ok((m, s.to_vec()))
    }

    fn sample_init(&self, _noise: &mut NoiseDriver<T>) -> (ScenarioMode, Vec<T>) {
        (ScenarioMode::initial(), self.initial_state().to_vec())
    }
}

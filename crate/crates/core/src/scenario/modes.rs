//! Discrete driving modes of the two vehicles.
//!
//! Each vehicle's mode pairs a driving phase with a turn-indicator intent.
//! The right-lane vehicle (the one with situation awareness) can pass
//! through awareness and reversal phases; the left-lane vehicle only drives
//! straight, changes lane, or collides. Collisions canonicalize the intent
//! to `Off` so that mode comparison ignores the indicator, which carries no
//! information once the vehicles have collided.

use crate::shs::ModelError;

/// Driving phase of one vehicle.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Phase {
    /// Keeping the current lane.
    Straight,
    /// Executing a lane change toward the shared lane.
    ChangingLane,
    /// Aware of the other vehicle's maneuver, deciding whether to abort.
    Aware,
    /// Aborting: changing lanes back to the home lane.
    Reverting,
    /// Collided; terminal.
    Hit,
}

/// Turn-indicator state.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Intent {
    Off,
    /// Right indicator: moving toward smaller y.
    Right,
    /// Left indicator: moving toward larger y.
    Left,
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct DrivingMode {
    pub phase: Phase,
    pub intent: Intent,
}

impl DrivingMode {
    pub const fn new(phase: Phase, intent: Intent) -> Self {
        Self { phase, intent }
    }

    pub const fn straight() -> Self {
        Self::new(Phase::Straight, Intent::Off)
    }

    pub const fn hit() -> Self {
        Self::new(Phase::Hit, Intent::Off)
    }

    pub fn is_hit(&self) -> bool {
        self.phase == Phase::Hit
    }

    /// Mode set of the aware vehicle: straight, changing left, aware while
    /// changing left, reverting right, or hit.
    pub fn check_aware_vehicle(&self) -> Result<(), ModelError> {
        let ok = matches!(
            (self.phase, self.intent),
            (Phase::Straight, Intent::Off)
                | (Phase::ChangingLane, Intent::Left)
                | (Phase::Aware, Intent::Left)
                | (Phase::Reverting, Intent::Right)
                | (Phase::Hit, Intent::Off)
        );
        if ok {
            Ok(())
        } else {
            Err(ModelError(format!(
                "corrupted mode machine: aware vehicle in {self:?}"
            )))
        }
    }

    /// Mode set of the unaware vehicle: straight, changing right, or hit.
    pub fn check_unaware_vehicle(&self) -> Result<(), ModelError> {
        let ok = matches!(
            (self.phase, self.intent),
            (Phase::Straight, Intent::Off)
                | (Phase::ChangingLane, Intent::Right)
                | (Phase::Hit, Intent::Off)
        );
        if ok {
            Ok(())
        } else {
            Err(ModelError(format!(
                "corrupted mode machine: unaware vehicle in {self:?}"
            )))
        }
    }
}

/// Index into the lane centers: 0 is the aware vehicle's home lane, 1 the
/// shared target lane, 2 the other vehicle's home lane.
pub type LaneIndex = u8;

/// Joint discrete state of the scenario.
///
/// `est_mode` is the aware vehicle's belief about the other vehicle's mode;
/// it refreshes from truth while awareness holds and otherwise stays at its
/// last value. The `*_committed` latches record that a vehicle has already
/// begun its (single) lane-change maneuver, so the decision-time guard
/// cannot re-trigger after the maneuver completes or is aborted.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct ScenarioMode {
    pub er: DrivingMode,
    pub el: DrivingMode,
    pub est_mode: DrivingMode,
    /// Latched when the awareness ellipses first intersect.
    pub aware: bool,
    pub er_committed: bool,
    pub el_committed: bool,
    /// Lane whose center feeds each vehicle's steering law.
    pub er_target: LaneIndex,
    pub el_target: LaneIndex,
}

impl ScenarioMode {
    /// Both vehicles driving straight in their home lanes, no awareness.
    pub fn initial() -> Self {
        Self {
            er: DrivingMode::straight(),
            el: DrivingMode::straight(),
            est_mode: DrivingMode::straight(),
            aware: false,
            er_committed: false,
            el_committed: false,
            er_target: 0,
            el_target: 2,
        }
    }

    pub fn is_hit(&self) -> bool {
        self.er.is_hit()
    }

    pub fn check(&self) -> Result<(), ModelError> {
        self.er.check_aware_vehicle()?;
        self.el.check_unaware_vehicle()?;
        self.est_mode.check_unaware_vehicle()?;
        if self.er.is_hit() != self.el.is_hit() {
            return Err(ModelError(
                "corrupted mode machine: collision must mark both vehicles".into(),
            ));
        }
        if self.er_target > 2 || self.el_target > 2 {
            return Err(ModelError("lane index out of range".into()));
        }
        Ok(())
    }
}

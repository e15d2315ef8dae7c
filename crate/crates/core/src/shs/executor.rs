//! Fixed-step trajectory execution for transformed hybrid models.
//!
//! Integration is Euler-Maruyama with a constant step; the final step of a
//! run is shortened so the clock lands exactly on the horizon. Boundary
//! crossings (guards and budget expiry) are detected at step endpoints and
//! the jump is applied there, without bisecting inside the step. Per step
//! the noise stream is consumed in a fixed order: Brownian increments
//! first, then one Bernoulli per jump noise channel; resets consume their
//! own draws followed by the budget redraw.

use crate::scalar::Real;
use crate::shs::{GshsModel, HybridState, JumpCause, ModelError, ShsError, ShsModel, StatePredicate};
use crate::stream::NoiseDriver;

/// What the step detected at its endpoint.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct StepOutcome {
    /// Guard boundary crossed; a forced jump is due.
    pub guard_hit: bool,
    /// Local time budget drained to zero; the rate-triggered jump is due.
    pub budget_expired: bool,
}

impl StepOutcome {
    pub fn boundary_hit(&self) -> bool {
        self.guard_hit || self.budget_expired
    }
}

/// Executes trajectories of one model at a fixed step size.
///
/// Owns scratch buffers so stepping never allocates; create one executor
/// per worker thread when running particles in parallel.
pub struct ShsExecutor<'m, T: Real, M: GshsModel<T>> {
    model: &'m ShsModel<T, M>,
    dt: T,
    x_prev: Vec<T>,
    drift: Vec<T>,
    dw: Vec<T>,
}

impl<'m, T: Real, M: GshsModel<T>> ShsExecutor<'m, T, M> {
    pub fn new(model: &'m ShsModel<T, M>, dt: T) -> Result<Self, ShsError> {
        if !dt.is_finite() || dt <= T::zero() {
            return Err(ShsError::InvalidStep(dt.to_f64_lossy()));
        }
        Ok(Self {
            model,
            dt,
            x_prev: Vec::new(),
            drift: Vec::new(),
            dw: Vec::new(),
        })
    }

    pub fn step_size(&self) -> T {
        self.dt
    }

    /// Advances the state by one Euler-Maruyama step of length `dt`.
    ///
    /// The drift, diffusion coefficient and jump intensity are evaluated at
    /// the pre-step state; jump noise channels fire with probability
    /// `rate * dt`. The budget is floored at zero when it would cross.
    pub fn integrate_step(
        &mut self,
        state: &mut HybridState<T, M::Mode>,
        dt: T,
        noise: &mut NoiseDriver<T>,
    ) -> Result<StepOutcome, ShsError> {
        if !dt.is_finite() || dt <= T::zero() {
            return Err(ShsError::InvalidStep(dt.to_f64_lossy()));
        }
        let inner = self.model.inner();
        let t = state.clock;
        let d = state.cont.len();

        self.x_prev.clear();
        self.x_prev.extend_from_slice(&state.cont);
        self.drift.clear();
        self.drift.resize(d, T::zero());
        inner.drift(t, &state.mode, &self.x_prev, &mut self.drift);

        for i in 0..d {
            state.cont[i] = self.x_prev[i] + self.drift[i] * dt;
        }

        let m = inner.brownian_dim();
        self.dw.clear();
        self.dw.resize(m, T::zero());
        noise.fill_brownian(dt, &mut self.dw);
        if m > 0 {
            inner.add_diffusion(t, &state.mode, &self.x_prev, &self.dw, &mut state.cont);
        }

        for (channel, rate) in inner.poisson_rates().iter().enumerate() {
            if noise.bernoulli(*rate * dt) {
                inner.apply_jump_noise(channel, &state.mode, &mut state.cont);
            }
        }

        let rate = inner.jump_rate(t, &state.mode, &self.x_prev);
        if !rate.is_finite() || rate < T::zero() {
            return Err(ShsError::Model {
                clock: t.to_f64_lossy(),
                source: ModelError(format!("jump intensity {rate} is not a finite nonnegative value")),
            });
        }
        let mut budget_expired = false;
        if rate > T::zero() {
            let drained = state.local_time_budget - rate * dt;
            if drained <= T::zero() {
                budget_expired = true;
                state.local_time_budget = T::zero();
            } else {
                state.local_time_budget = drained;
            }
        }

        state.clock = t + dt;

        for (i, v) in state.cont.iter().enumerate() {
            if !v.is_finite() {
                return Err(ShsError::Diverged {
                    clock: state.clock.to_f64_lossy(),
                    detail: format!("component {i} became {v} in mode {:?}", state.mode),
                });
            }
        }

        let guard_hit = inner.guard(state.clock, &state.mode, &state.cont);
        Ok(StepOutcome {
            guard_hit,
            budget_expired,
        })
    }

    /// Runs until the target set is entered strictly before the horizon, or
    /// until the horizon. Returns whether the target was reached; the state
    /// is left frozen at that instant.
    ///
    /// When a boundary hit and target entry coincide at a step endpoint the
    /// reset is applied first and the run still counts as reaching the
    /// target. A boundary hit alone applies the reset and continues, so
    /// chains of resets are fine; the target test at the top of the loop
    /// also catches resets that land inside the target.
    pub fn execute_until<P>(
        &mut self,
        state: &mut HybridState<T, M::Mode>,
        target: &P,
        horizon: T,
        noise: &mut NoiseDriver<T>,
    ) -> Result<bool, ShsError>
    where
        P: StatePredicate<T, M::Mode> + ?Sized,
    {
        if !horizon.is_finite() || horizon <= T::zero() {
            return Err(ShsError::InvalidModel(format!("invalid horizon {horizon}")));
        }
        loop {
            let before_horizon = state.clock < horizon;
            if before_horizon && target.contains(&state.mode, &state.cont) {
                return Ok(true);
            }
            if !before_horizon {
                state.clock = horizon;
                return Ok(false);
            }
            let dt = self.dt.min(horizon - state.clock);
            let outcome = self.integrate_step(state, dt, noise)?;
            if outcome.boundary_hit() {
                let reached_now =
                    state.clock < horizon && target.contains(&state.mode, &state.cont);
                self.model.apply_reset(
                    state,
                    JumpCause {
                        guard: outcome.guard_hit,
                        budget_expired: outcome.budget_expired,
                    },
                    noise,
                )?;
                if reached_now {
                    return Ok(true);
                }
            }
        }
    }
}

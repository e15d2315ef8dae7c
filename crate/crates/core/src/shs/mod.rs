//! General stochastic hybrid system modelling.
//!
//! A model couples per-mode continuous SDE dynamics (drift, diffusion and
//! jump noise channels) with two kinds of discrete transitions: forced
//! jumps when the state crosses a guard boundary, and rate-triggered jumps
//! governed by a state-dependent intensity. [`transform_gshs_to_shs`]
//! removes the rate mechanism by attaching an auxiliary exponential time
//! budget to the state: the budget drains at the current intensity and its
//! expiry becomes an ordinary boundary hit, after which it is redrawn.
//! The executor in [`executor`] then only ever deals with forced jumps.

pub mod executor;

use core::fmt::Debug;
use core::marker::PhantomData;

use crate::scalar::Real;
use crate::stream::NoiseDriver;

/// Why a reset is being applied.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct JumpCause {
    /// The continuous state crossed a guard boundary.
    pub guard: bool,
    /// The local exponential time budget ran out.
    pub budget_expired: bool,
}

/// Error raised by a model when asked for an impossible transition.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct ModelError(pub String);

/// Errors from validation and trajectory execution.
#[derive(Debug, thiserror::Error)]
pub enum ShsError {
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("invalid step size {0}")]
    InvalidStep(f64),
    #[error("state diverged at t = {clock}: {detail}")]
    Diverged { clock: f64, detail: String },
    #[error("model error at t = {clock}: {source}")]
    Model { clock: f64, source: ModelError },
}

/// Hybrid dynamics with mode-dependent continuous laws.
///
/// Continuous state is passed as a flat slice whose length must equal
/// [`dim`](Self::dim) for the current mode. All methods take `&self`; any
/// randomness a model needs (reset sampling, initial draws) comes from the
/// caller-supplied [`NoiseDriver`], which keeps trajectories replayable.
pub trait GshsModel<T: Real>: Sync {
    type Mode: Clone + PartialEq + Debug + Send + Sync;

    /// Continuous dimension of the given mode.
    fn dim(&self, mode: &Self::Mode) -> usize;

    /// Number of independent Brownian channels.
    fn brownian_dim(&self) -> usize;

    /// Constant intensities of the jump noise channels, one per channel.
    fn poisson_rates(&self) -> &[T] {
        &[]
    }

    /// Adds the firing channel's magnitude to the affected components.
    fn apply_jump_noise(&self, channel: usize, mode: &Self::Mode, x: &mut [T]) {
        let _ = (channel, mode, x);
    }

    /// Writes the drift vector for the current mode into `out`.
    fn drift(&self, t: T, mode: &Self::Mode, x: &[T], out: &mut [T]);

    /// Accumulates the diffusion response `g(mode, x) * dw` into `out`.
    ///
    /// `dw` holds one Brownian increment per channel; `x` is the state the
    /// diffusion coefficient is evaluated at (the pre-step state under
    /// Euler-Maruyama).
    fn add_diffusion(&self, t: T, mode: &Self::Mode, x: &[T], dw: &[T], out: &mut [T]);

    /// Intensity of the rate-triggered jump in the current state.
    fn jump_rate(&self, t: T, mode: &Self::Mode, x: &[T]) -> T;

    /// True once the state has left the open domain of its mode, forcing a
    /// jump at the end of the step that detected it.
    fn guard(&self, t: T, mode: &Self::Mode, x: &[T]) -> bool;

    /// Samples the post-jump mode and continuous state.
    fn reset(
        &self,
        t: T,
        mode: &Self::Mode,
        x: &[T],
        cause: JumpCause,
        noise: &mut NoiseDriver<T>,
    ) -> Result<(Self::Mode, Vec<T>), ModelError>;

    /// Draws an initial mode and continuous state.
    fn sample_init(&self, noise: &mut NoiseDriver<T>) -> (Self::Mode, Vec<T>);
}

/// Predicate over hybrid states, used for target sets and level sets.
pub trait StatePredicate<T: Real, Mode>: Sync {
    fn contains(&self, mode: &Mode, x: &[T]) -> bool;
}

impl<T: Real, Mode, F> StatePredicate<T, Mode> for F
where
    F: Fn(&Mode, &[T]) -> bool + Sync,
{
    fn contains(&self, mode: &Mode, x: &[T]) -> bool {
        self(mode, x)
    }
}

/// Full state of one trajectory: mode, continuous coordinates, remaining
/// exponential time budget and the global clock.
#[derive(Clone, PartialEq, Debug)]
pub struct HybridState<T, Mode> {
    pub mode: Mode,
    pub cont: Vec<T>,
    /// Remaining unit-exponential budget; the rate-triggered jump fires
    /// when the integral of the jump intensity exhausts it.
    pub local_time_budget: T,
    pub clock: T,
}

/// A hybrid model with the rate mechanism folded into boundary behaviour.
///
/// Built by [`transform_gshs_to_shs`]; wraps the original model and manages
/// the auxiliary budget coordinate on its behalf.
pub struct ShsModel<T: Real, M: GshsModel<T>> {
    inner: M,
    _scalar: PhantomData<T>,
}

/// Validates jump channel intensities and wraps the model for execution.
pub fn transform_gshs_to_shs<T: Real, M: GshsModel<T>>(model: M) -> Result<ShsModel<T, M>, ShsError> {
    for (i, rate) in model.poisson_rates().iter().enumerate() {
        if !rate.is_finite() || *rate < T::zero() {
            return Err(ShsError::InvalidModel(format!(
                "jump noise channel {i} has invalid rate {rate}"
            )));
        }
    }
    if model.brownian_dim() > 4096 {
        return Err(ShsError::InvalidModel(format!(
            "implausible Brownian dimension {}",
            model.brownian_dim()
        )));
    }
    Ok(ShsModel {
        inner: model,
        _scalar: PhantomData,
    })
}

impl<T: Real, M: GshsModel<T>> ShsModel<T, M> {
    pub fn inner(&self) -> &M {
        &self.inner
    }

    /// Drift of the extended state `[x, budget]`: the original drift with
    /// the negated jump intensity appended as the budget's drain rate.
    pub fn extended_drift(&self, t: T, mode: &M::Mode, x: &[T], out: &mut [T]) {
        let d = x.len();
        debug_assert_eq!(out.len(), d + 1);
        self.inner.drift(t, mode, x, &mut out[..d]);
        out[d] = -self.inner.jump_rate(t, mode, x);
    }

    /// True when execution must leave the current mode: either the original
    /// guard was crossed or the budget has run out.
    pub fn boundary(&self, t: T, mode: &M::Mode, x: &[T], budget: T) -> bool {
        budget <= T::zero() || self.inner.guard(t, mode, x)
    }

    /// Draws an initial hybrid state, including a fresh unit-exponential
    /// budget, with the clock at zero.
    pub fn sample_init(&self, noise: &mut NoiseDriver<T>) -> HybridState<T, M::Mode> {
        let (mode, cont) = self.inner.sample_init(noise);
        debug_assert_eq!(cont.len(), self.inner.dim(&mode));
        HybridState {
            mode,
            cont,
            local_time_budget: noise.exp1(),
            clock: T::zero(),
        }
    }

    /// Applies the reset measure and redraws the budget. The inner reset
    /// consumes noise first, then the budget draw; this fixed order keeps
    /// streams replayable.
    pub fn apply_reset(
        &self,
        state: &mut HybridState<T, M::Mode>,
        cause: JumpCause,
        noise: &mut NoiseDriver<T>,
    ) -> Result<(), ShsError> {
        let (mode, cont) = self
            .inner
            .reset(state.clock, &state.mode, &state.cont, cause, noise)
            .map_err(|source| ShsError::Model {
                clock: state.clock.to_f64_lossy(),
                source,
            })?;
        let want = self.inner.dim(&mode);
        if cont.len() != want {
            return Err(ShsError::Model {
                clock: state.clock.to_f64_lossy(),
                source: ModelError(format!(
                    "reset produced dimension {} where mode expects {want}",
                    cont.len()
                )),
            });
        }
        state.mode = mode;
        state.cont = cont;
        state.local_time_budget = noise.exp1();
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stream::StreamKey;

    /// 1-D drift-free diffusion with a constant jump intensity; the reset
    /// bumps a jump counter held in the mode.
    struct CountingJumps {
        rate: f64,
    }

    impl GshsModel<f64> for CountingJumps {
        type Mode = u32;

        fn dim(&self, _mode: &u32) -> usize {
            1
        }

        fn brownian_dim(&self) -> usize {
            1
        }

        fn drift(&self, _t: f64, _mode: &u32, _x: &[f64], out: &mut [f64]) {
            out[0] = 0.0;
        }

        fn add_diffusion(&self, _t: f64, _mode: &u32, _x: &[f64], dw: &[f64], out: &mut [f64]) {
            out[0] += dw[0];
        }

        fn jump_rate(&self, _t: f64, _mode: &u32, _x: &[f64]) -> f64 {
            self.rate
        }

        fn guard(&self, _t: f64, _mode: &u32, _x: &[f64]) -> bool {
            false
        }

        fn reset(
            &self,
            _t: f64,
            mode: &u32,
            x: &[f64],
            cause: JumpCause,
            _noise: &mut NoiseDriver<f64>,
        ) -> Result<(u32, Vec<f64>), ModelError> {
            assert!(cause.budget_expired);
            Ok((mode + 1, x.to_vec()))
        }

        fn sample_init(&self, _noise: &mut NoiseDriver<f64>) -> (u32, Vec<f64>) {
            (0, vec![0.0])
        }
    }

    #[test]
    fn extended_drift_appends_negated_intensity() {
        let shs = transform_gshs_to_shs(CountingJumps { rate: 0.7 }).unwrap();
        let mut out = [f64::NAN; 2];
        shs.extended_drift(0.0, &0, &[1.5], &mut out);
        assert_eq!(out, [0.0, -0.7]);
    }

    #[test]
    fn boundary_includes_budget_exhaustion() {
        let shs = transform_gshs_to_shs(CountingJumps { rate: 0.7 }).unwrap();
        assert!(!shs.boundary(0.0, &0, &[0.0], 0.3));
        assert!(shs.boundary(0.0, &0, &[0.0], 0.0));
        assert!(shs.boundary(0.0, &0, &[0.0], -1e-12));
    }

    #[test]
    fn init_draws_positive_budget_and_zero_clock() {
        let shs = transform_gshs_to_shs(CountingJumps { rate: 1.0 }).unwrap();
        let mut noise = NoiseDriver::new(StreamKey::root(3));
        let state = shs.sample_init(&mut noise);
        assert!(state.local_time_budget > 0.0);
        assert_eq!(state.clock, 0.0);
        assert_eq!(state.cont, vec![0.0]);
    }

    #[test]
    fn reset_redraws_budget() {
        let shs = transform_gshs_to_shs(CountingJumps { rate: 1.0 }).unwrap();
        let mut noise = NoiseDriver::new(StreamKey::root(4));
        let mut state = shs.sample_init(&mut noise);
        state.local_time_budget = 0.0;
        let cause = JumpCause {
            guard: false,
            budget_expired: true,
        };
        shs.apply_reset(&mut state, cause, &mut noise).unwrap();
        assert_eq!(state.mode, 1);
        assert!(state.local_time_budget > 0.0);
    }

    struct NegativeRate;

    impl GshsModel<f64> for NegativeRate {
        type Mode = ();

        fn dim(&self, _mode: &()) -> usize {
            1
        }

        fn brownian_dim(&self) -> usize {
            0
        }

        fn poisson_rates(&self) -> &[f64] {
            const RATES: [f64; 1] = [-0.5];
            &RATES
        }

        fn drift(&self, _t: f64, _mode: &(), _x: &[f64], out: &mut [f64]) {
            out[0] = 0.0;
        }

        fn add_diffusion(&self, _t: f64, _mode: &(), _x: &[f64], _dw: &[f64], _out: &mut [f64]) {}

        fn jump_rate(&self, _t: f64, _mode: &(), _x: &[f64]) -> f64 {
            0.0
        }

        fn guard(&self, _t: f64, _mode: &(), _x: &[f64]) -> bool {
            false
        }

        fn reset(
            &self,
            _t: f64,
            _mode: &(),
            x: &[f64],
            _cause: JumpCause,
            _noise: &mut NoiseDriver<f64>,
        ) -> Result<((), Vec<f64>), ModelError> {
            Ok(((), x.to_vec()))
        }

        fn sample_init(&self, _noise: &mut NoiseDriver<f64>) -> ((), Vec<f64>) {
            ((), vec![0.0])
        }
    }

    #[test]
    fn transform_rejects_invalid_jump_channel() {
        match transform_gshs_to_shs(NegativeRate) {
            Err(ShsError::InvalidModel(msg)) => assert!(msg.contains("channel 0")),
            Err(other) => panic!("unexpected error {other:?}"),
            Ok(_) => panic!("expected rejection"),
        }
    }
}

//! Interacting-particle multilevel splitting for reach probabilities.
//!
//! The estimator pushes a fixed-size population through a nested family of
//! level sets. At each level every particle is mutated (simulated) until
//! it enters the level or the horizon cuts it off; the surviving fraction
//! estimates the conditional probability of that level given the previous
//! one, and the product over levels estimates the rare reach probability.
//! Survivors are then cloned back up to the full population size with the
//! fixed-assignment rule: every survivor gets the same base number of
//! copies and a random-permutation prefix receives one extra, so the
//! population count is conserved exactly rather than in expectation.
//!
//! Randomness layout: every particle carries a stream key; mutation at
//! level `k` uses the `(particle, k)` child stream, and each split copy
//! derives a fresh child key from its parent, so copies share their state
//! at the split instant but none of their future noise. A mutation begins
//! by redrawing the particle's exponential jump budget from its level
//! stream; carrying the parent's residual budget into both copies would
//! leave rate-triggered jumps perfectly correlated across the offspring
//! and defeat the splitting.

use rayon::prelude::*;

use crate::scalar::Real;
use crate::shs::executor::ShsExecutor;
use crate::shs::{GshsModel, HybridState, ShsError, ShsModel, StatePredicate};
use crate::stream::{NoiseDriver, StreamKey};

const DOMAIN_PARTICLE: u64 = 1;
const DOMAIN_INIT: u64 = 2;
const DOMAIN_MUTATE: u64 = 3;
const DOMAIN_SPLIT: u64 = 4;
const DOMAIN_SHUFFLE: u64 = 5;
const DOMAIN_MC: u64 = 6;

#[derive(Debug, thiserror::Error)]
pub enum EstimatorError {
    #[error(transparent)]
    Exec(#[from] ShsError),
    #[error("cannot split an empty survivor set")]
    EmptySurvivors,
    #[error("survivor count {survivors} exceeds population {population}")]
    Oversized { survivors: usize, population: usize },
    #[error("invalid estimator input: {0}")]
    InvalidInput(String),
}

/// One member of the splitting population.
#[derive(Clone, Debug)]
pub struct Particle<T, Mode> {
    /// Clock value at which the particle entered its current level.
    pub entry_time: T,
    pub state: HybridState<T, Mode>,
    /// Whether the last mutation reached its level before the horizon.
    pub alive: bool,
    /// Constant `1 / population` under fixed-assignment splitting; kept for
    /// audit output rather than arithmetic.
    pub weight: T,
    pub key: StreamKey,
}

/// Nested target sets with the common time horizon.
///
/// Construction cannot check nesting for arbitrary predicates; concrete
/// families (distance thresholds, state thresholds) get property tests at
/// their definition site.
pub struct LevelSchedule<T: Real, Mode> {
    levels: Vec<Box<dyn StatePredicate<T, Mode> + Send + Sync>>,
    horizon: T,
}

impl<T: Real, Mode> LevelSchedule<T, Mode> {
    pub fn new(
        levels: Vec<Box<dyn StatePredicate<T, Mode> + Send + Sync>>,
        horizon: T,
    ) -> Result<Self, EstimatorError> {
        if levels.is_empty() {
            return Err(EstimatorError::InvalidInput("no levels".into()));
        }
        if !horizon.is_finite() || horizon <= T::zero() {
            return Err(EstimatorError::InvalidInput(format!(
                "invalid horizon {horizon}"
            )));
        }
        Ok(Self { levels, horizon })
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn horizon(&self) -> T {
        self.horizon
    }

    pub fn level(&self, k: usize) -> &(dyn StatePredicate<T, Mode> + Send + Sync) {
        self.levels[k].as_ref()
    }

    /// Keeps only the first `n` levels; used to compare estimates of
    /// truncated schedules on identical random keys.
    pub fn truncated(mut self, n: usize) -> Self {
        assert!(n >= 1 && n <= self.levels.len());
        self.levels.truncate(n);
        self
    }
}

/// Outcome of one splitting trial.
#[derive(Clone, Debug, PartialEq)]
pub struct EstimationResult<T> {
    /// Conditional surviving fraction at each level.
    pub level_fractions: Vec<T>,
    /// Survivor counts behind those fractions.
    pub survivor_counts: Vec<usize>,
    /// Product of the level fractions, in the order they were computed.
    pub reach_probability: T,
    pub particle_count: usize,
    pub key: StreamKey,
}

/// Rebuilds a full population from the survivors of one level.
///
/// Every survivor receives `floor(population / survivors)` copies; the
/// remainder goes one copy each to a random-permutation prefix, drawn
/// without replacement from `noise`. Copies keep the parent state and get
/// fresh child stream keys.
pub fn fixed_assignment_split<T: Real, Mode: Clone>(
    survivors: Vec<Particle<T, Mode>>,
    population: usize,
    noise: &mut NoiseDriver<T>,
) -> Result<Vec<Particle<T, Mode>>, EstimatorError> {
    let s = survivors.len();
    if s == 0 {
        return Err(EstimatorError::EmptySurvivors);
    }
    if s > population {
        return Err(EstimatorError::Oversized {
            survivors: s,
            population,
        });
    }
    let mut order: Vec<usize> = (0..s).collect();
    noise.shuffle(&mut order);

    let base = population / s;
    let extras = population - base * s;
    let weight = T::one() / T::from_usize(population).expect("population fits scalar");

    let copy_of = |parent: &Particle<T, Mode>, copy: usize| Particle {
        entry_time: parent.entry_time,
        state: parent.state.clone(),
        alive: parent.alive,
        weight,
        key: parent.key.child(DOMAIN_SPLIT).child(copy as u64),
    };

    let mut out = Vec::with_capacity(population);
    for copy in 0..base {
        for &idx in &order {
            out.push(copy_of(&survivors[idx], copy));
        }
    }
    for &idx in &order[..extras] {
        out.push(copy_of(&survivors[idx], base));
    }
    debug_assert_eq!(out.len(), population);
    Ok(out)
}

/// Runs one splitting trial and returns the per-level record.
///
/// Mutations are parallel across particles; each works on its own keyed
/// stream, so the result is independent of scheduling order.
pub fn estimate_reach_probability<T: Real, M: GshsModel<T>>(
    model: &ShsModel<T, M>,
    schedule: &LevelSchedule<T, M::Mode>,
    population: usize,
    dt: T,
    trial_key: StreamKey,
) -> Result<EstimationResult<T>, EstimatorError> {
    if population == 0 {
        return Err(EstimatorError::InvalidInput("population must be positive".into()));
    }
    let n_levels = schedule.len();
    let n_scalar = T::from_usize(population).expect("population fits scalar");
    let weight = T::one() / n_scalar;

    let mut particles: Vec<Particle<T, M::Mode>> = (0..population)
        .map(|i| {
            let key = trial_key.child(DOMAIN_PARTICLE).child(i as u64);
            let mut noise = NoiseDriver::new(key.child(DOMAIN_INIT));
            let state = model.sample_init(&mut noise);
            Particle {
                entry_time: T::zero(),
                state,
                alive: true,
                weight,
                key,
            }
        })
        .collect();

    let mut level_fractions: Vec<T> = Vec::with_capacity(n_levels);
    let mut survivor_counts: Vec<usize> = Vec::with_capacity(n_levels);

    for k in 0..n_levels {
        particles.par_iter_mut().try_for_each(|p| {
            let mut noise = NoiseDriver::new(p.key.child(DOMAIN_MUTATE).child(k as u64));
            // Fresh budget at level entry; see the module notes on why the
            // residual budget must not be shared across split copies.
            p.state.local_time_budget = noise.exp1();
            let mut exec = ShsExecutor::new(model, dt)?;
            let reached =
                exec.execute_until(&mut p.state, schedule.level(k), schedule.horizon(), &mut noise)?;
            p.alive = reached;
            p.entry_time = p.state.clock;
            Ok::<(), ShsError>(())
        })?;

        let survivors = particles.iter().filter(|p| p.alive).count();
        survivor_counts.push(survivors);
        level_fractions.push(T::from_usize(survivors).expect("count fits scalar") / n_scalar);

        if survivors == 0 {
            // Every deeper conditional fraction is zero as well.
            for _ in k + 1..n_levels {
                level_fractions.push(T::zero());
                survivor_counts.push(0);
            }
            break;
        }

        if k + 1 < n_levels {
            let alive: Vec<Particle<T, M::Mode>> =
                particles.into_iter().filter(|p| p.alive).collect();
            let mut shuffle_noise =
                NoiseDriver::new(trial_key.child(DOMAIN_SHUFFLE).child(k as u64));
            particles = fixed_assignment_split(alive, population, &mut shuffle_noise)?;
        }
    }

    let reach_probability = level_fractions
        .iter()
        .fold(T::one(), |acc, frac| acc * *frac);

    Ok(EstimationResult {
        level_fractions,
        survivor_counts,
        reach_probability,
        particle_count: population,
        key: trial_key,
    })
}

/// Plain Monte Carlo baseline over independent runs.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct McEstimate<T> {
    pub probability: T,
    pub hits: usize,
    pub runs: usize,
}

pub fn monte_carlo_estimate<T: Real, M: GshsModel<T>, P>(
    model: &ShsModel<T, M>,
    terminal: &P,
    horizon: T,
    runs: usize,
    dt: T,
    trial_key: StreamKey,
) -> Result<McEstimate<T>, EstimatorError>
where
    P: StatePredicate<T, M::Mode> + Send + Sync + ?Sized,
{
    if runs == 0 {
        return Err(EstimatorError::InvalidInput("runs must be positive".into()));
    }
    let hits = (0..runs)
        .into_par_iter()
        .try_fold(
            || 0usize,
            |acc, i| {
                let mut noise = NoiseDriver::new(trial_key.child(DOMAIN_MC).child(i as u64));
                let mut state = model.sample_init(&mut noise);
                let mut exec = ShsExecutor::new(model, dt)?;
                let reached = exec.execute_until(&mut state, terminal, horizon, &mut noise)?;
                Ok::<usize, ShsError>(acc + usize::from(reached))
            },
        )
        .try_reduce(|| 0usize, |a, b| Ok(a + b))?;
    Ok(McEstimate {
        probability: T::from_usize(hits).expect("count fits scalar")
            / T::from_usize(runs).expect("count fits scalar"),
        hits,
        runs,
    })
}

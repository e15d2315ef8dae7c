//! Estimator calibration against models with independently known answers.
//!
//! Each case runs the full splitting pipeline on a reference model and
//! compares the trial mean with a value computed entirely outside the
//! particle machinery: probability-vector iteration for the chains, the
//! reflection principle for the Brownian barrier. Chain cases are exact
//! targets; the barrier case carries a small discretization bias from
//! step-sampled crossing checks.

use crate::shs::{transform_gshs_to_shs, StatePredicate};
use crate::splitting::{estimate_reach_probability, LevelSchedule};
use crate::stats::{pairwise_sum, sample_std};
use crate::stream::StreamKey;
use crate::toy::{barrier_hit_probability, horizon_for_steps, AbsorbingChain, LinearSde};

use super::run::RunError;

/// Stream domain for oracle-suite trials under the suite seed.
const DOMAIN_ORACLE: u64 = 3;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum OracleKind {
    /// Exact discrete-chain reference; any gap is estimator error.
    Chain,
    /// Continuous-time reference; the estimate also carries time
    /// discretization bias.
    Barrier,
}

/// One reference model together with its oracle and the estimate.
#[derive(Clone, Debug)]
pub struct OracleCase {
    pub name: &'static str,
    pub kind: OracleKind,
    pub oracle: f64,
    pub estimate: f64,
    /// Standard error of the trial mean.
    pub std_error: f64,
    pub rel_error: f64,
    pub trials: usize,
    pub population: usize,
}

#[derive(Clone, Debug)]
pub struct OracleReport {
    pub cases: Vec<OracleCase>,
}

impl OracleReport {
    pub fn max_rel_error(&self) -> f64 {
        self.cases.iter().map(|c| c.rel_error).fold(0.0, f64::max)
    }

    pub fn all_within(&self, tolerance: f64) -> bool {
        self.cases.iter().all(|c| c.rel_error <= tolerance)
    }
}

fn chain_schedule(thresholds: &[usize], steps: usize) -> LevelSchedule<f64, usize> {
    let levels: Vec<Box<dyn StatePredicate<f64, usize> + Send + Sync>> = thresholds
        .iter()
        .map(|&thr| {
            Box::new(move |m: &usize, _: &[f64]| *m >= thr)
                as Box<dyn StatePredicate<f64, usize> + Send + Sync>
        })
        .collect();
    LevelSchedule::new(levels, horizon_for_steps(steps)).expect("valid schedule")
}

fn run_case<M: crate::shs::GshsModel<f64>>(
    name: &'static str,
    kind: OracleKind,
    oracle: f64,
    model: M,
    schedule: &LevelSchedule<f64, M::Mode>,
    dt: f64,
    case_key: StreamKey,
    trials: usize,
    population: usize,
) -> Result<OracleCase, RunError> {
    let shs = transform_gshs_to_shs(model)?;
    let mut trial_values = Vec::with_capacity(trials);
    for trial in 0..trials {
        let result = estimate_reach_probability(
            &shs,
            schedule,
            population,
            dt,
            case_key.child(trial as u64),
        )?;
        trial_values.push(result.reach_probability);
    }
    let estimate = pairwise_sum(&trial_values) / trials as f64;
    let std_error = if trials > 1 {
        sample_std(&trial_values) / (trials as f64).sqrt()
    } else {
        0.0
    };
    Ok(OracleCase {
        name,
        kind,
        oracle,
        estimate,
        std_error,
        rel_error: (estimate - oracle).abs() / oracle,
        trials,
        population,
    })
}

/// Runs every reference case with `trials` splitting trials of
/// `population` particles each.
pub fn toy_oracle_suite(
    seed: u64,
    trials: usize,
    population: usize,
) -> Result<OracleReport, RunError> {
    let root = StreamKey::root(seed).child(DOMAIN_ORACLE);
    let mut cases = Vec::new();

    let chains: [(&'static str, AbsorbingChain, Vec<usize>, usize); 3] = [
        (
            "chain straight-run p=0.2 len=3",
            AbsorbingChain::straight_run(0.2, 3),
            vec![2, 3, 4],
            3,
        ),
        (
            "chain birth-death p=0.3 top=4",
            AbsorbingChain::birth_death(0.3, 4),
            vec![1, 2, 3, 4],
            8,
        ),
        (
            "chain sticky p=0.2 stay=0.3 top=3",
            AbsorbingChain::sticky_birth_death(0.2, 0.3, 3),
            vec![1, 2, 3],
            7,
        ),
    ];
    let chain_count = chains.len();
    for (idx, (name, chain, thresholds, steps)) in chains.into_iter().enumerate() {
        let goal = *thresholds.last().expect("nonempty thresholds");
        let oracle = chain.reach_probability(goal, steps);
        let schedule = chain_schedule(&thresholds, steps);
        cases.push(run_case(
            name,
            OracleKind::Chain,
            oracle,
            chain,
            &schedule,
            1.0,
            root.child(idx as u64),
            trials,
            population,
        )?);
    }

    let barrier = 2.0;
    let horizon = 1.0;
    let sde = LinearSde::standard();
    let levels: Vec<Box<dyn StatePredicate<f64, ()> + Send + Sync>> = [0.8, 1.2, 1.6, barrier]
        .into_iter()
        .map(|level| {
            Box::new(move |_: &(), x: &[f64]| x[0] >= level)
                as Box<dyn StatePredicate<f64, ()> + Send + Sync>
        })
        .collect();
    let schedule = LevelSchedule::new(levels, horizon).expect("valid schedule");
    cases.push(run_case(
        "barrier brownian b=2 t=1",
        OracleKind::Barrier,
        barrier_hit_probability(barrier, horizon),
        sde,
        &schedule,
        1.0e-3,
        root.child(chain_count as u64),
        trials,
        population,
    )?);

    Ok(OracleReport { cases })
}

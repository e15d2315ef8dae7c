//! Small reference models with independently computable reach probabilities.
//!
//! These are the calibration targets for the estimator: a linear SDE whose
//! barrier-hitting probability has a closed form, an absorbing Markov chain
//! whose reach probability follows from direct probability-vector
//! iteration, and a constant-intensity jump process whose waiting times
//! are exponential. The oracle values here never go through the particle
//! machinery, so agreement between the two paths is meaningful evidence.

use statrs::distribution::{ContinuousCDF, Normal};

use crate::scalar::Real;
use crate::shs::{GshsModel, JumpCause, ModelError};
use crate::stream::NoiseDriver;

/// 1-D SDE `dx = drift dt + diffusion dW` with a deterministic start.
#[derive(Clone, Copy, Debug)]
pub struct LinearSde<T: Real> {
    pub drift: T,
    pub diffusion: T,
    pub start: T,
}

impl LinearSde<f64> {
    /// Standard Brownian motion from the origin.
    pub fn standard() -> Self {
        Self {
            drift: 0.0,
            diffusion: 1.0,
            start: 0.0,
        }
    }
}

impl<T: Real> GshsModel<T> for LinearSde<T> {
    type Mode = ();

    fn dim(&self, _mode: &()) -> usize {
        1
    }

    fn brownian_dim(&self) -> usize {
        1
    }

    fn drift(&self, _t: T, _mode: &(), _x: &[T], out: &mut [T]) {
        out[0] = self.drift;
    }

    fn add_diffusion(&self, _t: T, _mode: &(), _x: &[T], dw: &[T], out: &mut [T]) {
        out[0] += self.diffusion * dw[0];
    }

    fn jump_rate(&self, _t: T, _mode: &(), _x: &[T]) -> T {
        T::zero()
    }

    fn guard(&self, _t: T, _mode: &(), _x: &[T]) -> bool {
        false
    }

    fn reset(
        &self,
        _t: T,
        _mode: &(),
        x: &[T],
        _cause: JumpCause,
        _noise: &mut NoiseDriver<T>,
    ) -> Result<((), Vec<T>), ModelError> {
        Ok(((), x.to_vec()))
    }

    fn sample_init(&self, _noise: &mut NoiseDriver<T>) -> ((), Vec<T>) {
        ((), vec![self.start])
    }
}

/// Probability that standard Brownian motion reaches level `barrier` at
/// some point within `[0, horizon]`, by the reflection principle.
pub fn barrier_hit_probability(barrier: f64, horizon: f64) -> f64 {
    assert!(barrier > 0.0 && horizon > 0.0);
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    2.0 * (1.0 - normal.cdf(barrier / horizon.sqrt()))
}

/// Jump process with constant intensity; each firing increments the mode
/// counter and leaves the continuous state alone. Waiting times between
/// firings are Exp(rate).
#[derive(Clone, Copy, Debug)]
pub struct ConstantRateJump {
    pub rate: f64,
}

impl GshsModel<f64> for ConstantRateJump {
    type Mode = u32;

    fn dim(&self, _mode: &u32) -> usize {
        1
    }

    fn brownian_dim(&self) -> usize {
        0
    }

    fn drift(&self, _t: f64, _mode: &u32, _x: &[f64], out: &mut [f64]) {
        out[0] = 0.0;
    }

    fn add_diffusion(&self, _t: f64, _mode: &u32, _x: &[f64], _dw: &[f64], _out: &mut [f64]) {}

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
        _cause: JumpCause,
        _noise: &mut NoiseDriver<f64>,
    ) -> Result<(u32, Vec<f64>), ModelError> {
        Ok((mode + 1, x.to_vec()))
    }

    fn sample_init(&self, _noise: &mut NoiseDriver<f64>) -> (u32, Vec<f64>) {
        (0, vec![0.0])
    }
}

/// Discrete-time absorbing Markov chain embedded as a degenerate hybrid
/// model: the guard fires at every unit step and the reset samples the next
/// state from the current row. Run it with step size 1 and the horizon
/// from [`horizon_for_steps`] so exactly `steps` transitions count.
#[derive(Clone, Debug)]
pub struct AbsorbingChain {
    rows: Vec<Vec<f64>>,
    start: usize,
}

/// Horizon under which a chain trajectory performs exactly `steps`
/// transitions strictly before the cutoff.
pub fn horizon_for_steps(steps: usize) -> f64 {
    steps as f64 + 0.5
}

impl AbsorbingChain {
    /// Builds a chain from a row-stochastic matrix and a start state.
    ///
    /// Threshold predicates `{state >= k}` are the intended targets, so
    /// state indices should order progress: failure states low, goal last.
    pub fn new(rows: Vec<Vec<f64>>, start: usize) -> Result<Self, ModelError> {
        let n = rows.len();
        if n == 0 {
            return Err(ModelError("chain needs at least one state".into()));
        }
        if start >= n {
            return Err(ModelError(format!("start state {start} out of range")));
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(ModelError(format!("row {i} has length {} != {n}", row.len())));
            }
            let sum: f64 = row.iter().sum();
            if row.iter().any(|p| !(0.0..=1.0).contains(p)) || (sum - 1.0).abs() > 1e-12 {
                return Err(ModelError(format!("row {i} is not a probability vector")));
            }
        }
        Ok(Self { rows, start })
    }

    pub fn state_count(&self) -> usize {
        self.rows.len()
    }

    pub fn start_state(&self) -> usize {
        self.start
    }

    /// Highest state index, the goal in all built-in constructions.
    pub fn top_state(&self) -> usize {
        self.rows.len() - 1
    }

    /// Exact probability of entering `{state >= target_min}` within `steps`
    /// transitions from the start state, by probability-vector iteration
    /// with the target made absorbing.
    pub fn reach_probability(&self, target_min: usize, steps: usize) -> f64 {
        let n = self.rows.len();
        assert!(target_min < n);
        let mut mass = vec![0.0f64; n];
        mass[self.start] = 1.0;
        for _ in 0..steps {
            let mut next = vec![0.0f64; n];
            for (i, m) in mass.iter().enumerate() {
                if *m == 0.0 {
                    continue;
                }
                if i >= target_min {
                    next[i] += m;
                    continue;
                }
                for (j, w) in self.rows[i].iter().enumerate() {
                    next[j] += m * w;
                }
            }
            mass = next;
        }
        mass.iter().skip(target_min).sum()
    }

    /// Chain that must take `length` up-moves in a row: any failure drops
    /// into the dead state at index 0. Reaching the top within `length`
    /// steps has probability exactly `p_up^length`.
    pub fn straight_run(p_up: f64, length: usize) -> Self {
        assert!((0.0..=1.0).contains(&p_up) && length >= 1);
        // Index 0 is dead, 1..=length is the climb, length + 1 is the goal.
        let n = length + 2;
        let mut rows = vec![vec![0.0; n]; n];
        rows[0][0] = 1.0;
        for i in 1..=length {
            rows[i][i + 1] = p_up;
            rows[i][0] = 1.0 - p_up;
        }
        rows[length + 1][length + 1] = 1.0;
        Self { rows, start: 1 }
    }

    /// Reflected birth-death chain on `0..=top`: up with `p_up`, otherwise
    /// down one (staying put at the floor). Both ends of the run matter, so
    /// the reach probability has no closed form and comes from iteration.
    pub fn birth_death(p_up: f64, top: usize) -> Self {
        assert!((0.0..=1.0).contains(&p_up) && top >= 1);
        let n = top + 1;
        let mut rows = vec![vec![0.0; n]; n];
        rows[0][1] = p_up;
        rows[0][0] = 1.0 - p_up;
        for i in 1..top {
            rows[i][i + 1] = p_up;
            rows[i][i - 1] = 1.0 - p_up;
        }
        rows[top][top] = 1.0;
        Self { rows, start: 0 }
    }

    /// Birth-death chain that can also stay put, making paths sub-geometric.
    pub fn sticky_birth_death(p_up: f64, p_stay: f64, top: usize) -> Self {
        assert!(p_up >= 0.0 && p_stay >= 0.0 && p_up + p_stay <= 1.0 && top >= 1);
        let n = top + 1;
        let mut rows = vec![vec![0.0; n]; n];
        rows[0][1] = p_up;
        rows[0][0] = 1.0 - p_up;
        for i in 1..top {
            rows[i][i + 1] = p_up;
            rows[i][i] = p_stay;
            rows[i][i - 1] = 1.0 - p_up - p_stay;
        }
        rows[top][top] = 1.0;
        Self { rows, start: 0 }
    }
}

impl GshsModel<f64> for AbsorbingChain {
    type Mode = usize;

    fn dim(&self, _mode: &usize) -> usize {
        1
    }

    fn brownian_dim(&self) -> usize {
        0
    }

    fn drift(&self, _t: f64, _mode: &usize, _x: &[f64], out: &mut [f64]) {
        out[0] = 0.0;
    }

    fn add_diffusion(&self, _t: f64, _mode: &usize, _x: &[f64], _dw: &[f64], _out: &mut [f64]) {}

    fn jump_rate(&self, _t: f64, _mode: &usize, _x: &[f64]) -> f64 {
        0.0
    }

    fn guard(&self, _t: f64, _mode: &usize, _x: &[f64]) -> bool {
        true
    }

    fn reset(
        &self,
        _t: f64,
        mode: &usize,
        x: &[f64],
        _cause: JumpCause,
        noise: &mut NoiseDriver<f64>,
    ) -> Result<(usize, Vec<f64>), ModelError> {
        let row = &self.rows[*mode];
        let mut u: f64 = noise.uniform();
        let mut next = *mode;
        for (j, w) in row.iter().enumerate() {
            if *w == 0.0 {
                continue;
            }
            next = j;
            if u < *w {
                break;
            }
            u -= *w;
        }
        Ok((next, x.to_vec()))
    }

    fn sample_init(&self, _noise: &mut NoiseDriver<f64>) -> (usize, Vec<f64>) {
        (self.start, vec![0.0])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shs::executor::ShsExecutor;
    use crate::shs::transform_gshs_to_shs;
    use crate::stream::StreamKey;

    #[test]
    fn straight_run_probability_is_power_of_p() {
        let chain = AbsorbingChain::straight_run(0.2, 3);
        let goal = chain.top_state();
        let p = chain.reach_probability(goal, 3);
        assert!((p - 0.008).abs() < 1e-15);
        // Extra steps cannot help once failure is absorbing.
        assert!((chain.reach_probability(goal, 10) - 0.008).abs() < 1e-15);
    }

    #[test]
    fn reach_probability_is_monotone_in_steps_and_level() {
        let chain = AbsorbingChain::birth_death(0.3, 4);
        let p5 = chain.reach_probability(4, 5);
        let p9 = chain.reach_probability(4, 9);
        assert!(p9 >= p5);
        let shallow = chain.reach_probability(2, 9);
        assert!(shallow >= p9);
    }

    #[test]
    fn chain_rows_must_be_stochastic() {
        assert!(AbsorbingChain::new(vec![vec![0.5, 0.4], vec![0.0, 1.0]], 0).is_err());
        assert!(AbsorbingChain::new(vec![vec![1.0]], 0).is_ok());
        assert!(AbsorbingChain::new(vec![vec![1.0]], 3).is_err());
    }

    #[test]
    fn simulated_chain_frequency_matches_oracle() {
        let chain = AbsorbingChain::birth_death(0.4, 3);
        let steps = 6;
        let exact = chain.reach_probability(3, steps);
        let shs = transform_gshs_to_shs(chain.clone()).unwrap();
        let n = 4000;
        let mut hits = 0;
        for i in 0..n {
            let mut exec = ShsExecutor::new(&shs, 1.0).unwrap();
            let mut noise = NoiseDriver::new(StreamKey::root(31).child(i));
            let mut state = shs.sample_init(&mut noise);
            if exec
                .execute_until(
                    &mut state,
                    &|m: &usize, _: &[f64]| *m >= 3,
                    horizon_for_steps(steps),
                    &mut noise,
                )
                .unwrap()
            {
                hits += 1;
            }
        }
        let freq = hits as f64 / n as f64;
        let se = (exact * (1.0 - exact) / n as f64).sqrt();
        assert!(
            (freq - exact).abs() < 4.0 * se,
            "freq {freq} vs exact {exact}"
        );
    }

    #[test]
    fn barrier_formula_reference_points() {
        // Exact values 0.3173105078629141 and 0.04550026389635842; the
        // library's normal CDF carries a few 1e-11 of approximation error,
        // orders below anything the statistical comparisons resolve.
        assert!((barrier_hit_probability(1.0, 1.0) - 0.3173105078629141).abs() < 1e-9);
        assert!((barrier_hit_probability(2.0, 1.0) - 0.04550026389635842).abs() < 1e-9);
        // Scaling: barrier a over horizon t matches a/sqrt(t) over unit horizon.
        let a = 1.3;
        let t = 2.7;
        let direct = barrier_hit_probability(a, t);
        let scaled = barrier_hit_probability(a / t.sqrt(), 1.0);
        assert!((direct - scaled).abs() < 1e-12);
    }
}


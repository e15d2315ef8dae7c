//! Planar single-track vehicle dynamics with lane-keeping PD steering.
//!
//! The model carries five states per vehicle: global position `(x, y)`,
//! heading, lateral velocity in the body frame and yaw rate. Longitudinal
//! speed is a fixed parameter. Lateral tire forces are linear in the slip
//! angles, and the steering input comes from a PD law on the lateral
//! offset from the target lane center. Position additionally picks up
//! small Brownian and jump perturbations whose magnitudes live in
//! [`VehicleParams`]; applying them is the scenario model's job.

use crate::scalar::Real;

#[derive(Debug, thiserror::Error)]
#[error("{field} {requirement}, got {value}")]
pub struct VehicleParamError {
    pub field: &'static str,
    pub requirement: &'static str,
    pub value: f64,
}

/// Continuous state of one vehicle.
#[derive(Clone, Copy, PartialEq, Debug)]
pub struct VehicleState<T> {
    pub x: T,
    pub y: T,
    pub heading: T,
    pub v_lat: T,
    pub yaw_rate: T,
}

/// Number of scalar components in [`VehicleState`].
pub const VEHICLE_DIM: usize = 5;

impl<T: Real> VehicleState<T> {
    pub fn from_slice(s: &[T]) -> Self {
        Self {
            x: s[0],
            y: s[1],
            heading: s[2],
            v_lat: s[3],
            yaw_rate: s[4],
        }
    }

    pub fn write_to(&self, out: &mut [T]) {
        out[0] = self.x;
        out[1] = self.y;
        out[2] = self.heading;
        out[3] = self.v_lat;
        out[4] = self.yaw_rate;
    }

    /// Ground-frame lateral rate, the PD law's derivative term.
    pub fn lateral_rate(&self, params: &VehicleParams<T>) -> T {
        params.v_long * self.heading.sin() + self.v_lat * self.heading.cos()
    }
}

/// Physical and noise parameters of one vehicle.
#[derive(Clone, Copy, PartialEq, Debug)]
pub struct VehicleParams<T> {
    /// Constant longitudinal speed in the body frame.
    pub v_long: T,
    pub mass: T,
    pub yaw_inertia: T,
    pub stiffness_front: T,
    pub stiffness_rear: T,
    /// Distance from the center of gravity to the front axle.
    pub dist_front: T,
    /// Distance from the center of gravity to the rear axle.
    pub dist_rear: T,
    pub length: T,
    pub width: T,
    /// Magnitude added to both position components when the jump noise
    /// channel fires.
    pub jump_magnitude: T,
    /// Intensity of the position jump noise channel.
    pub jump_rate: T,
    /// Brownian magnitude on both position components.
    pub diffusion_magnitude: T,
}

impl<T: Real> Default for VehicleParams<T> {
    fn default() -> Self {
        Self {
            v_long: T::lit(20.0),
            mass: T::lit(2000.0),
            yaw_inertia: T::lit(2000.0),
            stiffness_front: T::lit(6.0e4),
            stiffness_rear: T::lit(6.0e4),
            dist_front: T::lit(2.0),
            dist_rear: T::lit(2.0),
            length: T::lit(4.508),
            width: T::lit(1.61),
            jump_magnitude: T::lit(1.0e-6),
            jump_rate: T::lit(0.5),
            diffusion_magnitude: T::lit(1.0e-2),
        }
    }
}

impl<T: Real> VehicleParams<T> {
    pub fn validate(&self) -> Result<(), VehicleParamError> {
        let positive: [(&'static str, T); 7] = [
            ("v_long", self.v_long),
            ("mass", self.mass),
            ("yaw_inertia", self.yaw_inertia),
            ("dist_front", self.dist_front),
            ("dist_rear", self.dist_rear),
            ("length", self.length),
            ("width", self.width),
        ];
        for (field, value) in positive {
            if !value.is_finite() || value <= T::zero() {
                return Err(VehicleParamError {
                    field,
                    requirement: "must be positive and finite",
                    value: value.to_f64_lossy(),
                });
            }
        }
        let nonnegative: [(&'static str, T); 5] = [
            ("stiffness_front", self.stiffness_front),
            ("stiffness_rear", self.stiffness_rear),
            ("jump_magnitude", self.jump_magnitude),
            ("jump_rate", self.jump_rate),
            ("diffusion_magnitude", self.diffusion_magnitude),
        ];
        for (field, value) in nonnegative {
            if !value.is_finite() || value < T::zero() {
                return Err(VehicleParamError {
                    field,
                    requirement: "must be nonnegative and finite",
                    value: value.to_f64_lossy(),
                });
            }
        }
        Ok(())
    }
}

/// Lane-keeping controller: `steer = kp * (y_target - y) - kd * dy/dt`,
/// clamped to `steer_limit`.
#[derive(Clone, Copy, PartialEq, Debug)]
pub struct PdGains<T> {
    pub kp: T,
    pub kd: T,
    pub y_target: T,
    /// Saturation bound on the steering angle; keeps the linear tire model
    /// inside a sane regime and is not part of the published control law.
    pub steer_limit: T,
}

impl<T: Real> Default for PdGains<T> {
    fn default() -> Self {
        Self {
            kp: T::lit(1.5e-3),
            kd: T::lit(1.0e-2),
            y_target: T::zero(),
            steer_limit: T::lit(0.5),
        }
    }
}

impl<T: Real> PdGains<T> {
    pub fn with_target(self, y_target: T) -> Self {
        Self { y_target, ..self }
    }

    pub fn validate(&self) -> Result<(), VehicleParamError> {
        for (field, value) in [("kp", self.kp), ("kd", self.kd)] {
            if !value.is_finite() || value < T::zero() {
                return Err(VehicleParamError {
                    field,
                    requirement: "must be nonnegative and finite",
                    value: value.to_f64_lossy(),
                });
            }
        }
        if !self.steer_limit.is_finite() || self.steer_limit <= T::zero() {
            return Err(VehicleParamError {
                field: "steer_limit",
                requirement: "must be positive and finite",
                value: self.steer_limit.to_f64_lossy(),
            });
        }
        Ok(())
    }
}

/// Front and rear slip angles for the given steering input.
pub fn slip_angles<T: Real>(state: &VehicleState<T>, params: &VehicleParams<T>, steer: T) -> (T, T) {
    debug_assert!(params.v_long > T::zero());
    let front = (state.v_lat + params.dist_front * state.yaw_rate) / params.v_long - steer;
    let rear = (state.v_lat - params.dist_rear * state.yaw_rate) / params.v_long;
    (front, rear)
}

/// Linear lateral tire forces; restoring, so a positive slip angle gives a
/// negative force.
pub fn tire_forces<T: Real>(slip: (T, T), params: &VehicleParams<T>) -> (T, T) {
    (-params.stiffness_front * slip.0, -params.stiffness_rear * slip.1)
}

/// Deterministic part of the state derivative under the given steering.
pub fn vehicle_drift<T: Real>(
    state: &VehicleState<T>,
    params: &VehicleParams<T>,
    steer: T,
) -> [T; VEHICLE_DIM] {
    let (sin_h, cos_h) = state.heading.sin_cos();
    let (front, rear) = tire_forces(slip_angles(state, params, steer), params);
    let cos_steer = steer.cos();
    [
        params.v_long * cos_h - state.v_lat * sin_h,
        params.v_long * sin_h + state.v_lat * cos_h,
        state.yaw_rate,
        (front * cos_steer + rear) / params.mass - params.v_long * state.yaw_rate,
        (params.dist_front * front * cos_steer - params.dist_rear * rear) / params.yaw_inertia,
    ]
}

/// Diffusion column of one vehicle: its single Brownian channel perturbs
/// both position components with the same magnitude and nothing else.
pub fn vehicle_diffusion<T: Real>(params: &VehicleParams<T>) -> [T; VEHICLE_DIM] {
    let eps = params.diffusion_magnitude;
    [eps, eps, T::zero(), T::zero(), T::zero()]
}

/// PD steering toward the target lane center, clamped to the gain limit.
pub fn pd_steering<T: Real>(
    state: &VehicleState<T>,
    params: &VehicleParams<T>,
    gains: &PdGains<T>,
) -> T {
    let raw = gains.kp * (gains.y_target - state.y) - gains.kd * state.lateral_rate(params);
    raw.max(-gains.steer_limit).min(gains.steer_limit)
}

/// First and second time derivatives of the planar position under the
/// deterministic dynamics; feeds the collision-time expansions.
#[derive(Clone, Copy, PartialEq, Debug)]
pub struct PlanarMotion<T> {
    pub velocity: (T, T),
    pub acceleration: (T, T),
}

pub fn planar_motion<T: Real>(
    state: &VehicleState<T>,
    params: &VehicleParams<T>,
    steer: T,
) -> PlanarMotion<T> {
    let drift = vehicle_drift(state, params, steer);
    let (sin_h, cos_h) = state.heading.sin_cos();
    let heading_rate = state.yaw_rate;
    let v_lat_rate = drift[3];
    // Chain rule on (v_long cos h - v_lat sin h, v_long sin h + v_lat cos h).
    let ax = -params.v_long * sin_h * heading_rate
        - v_lat_rate * sin_h
        - state.v_lat * cos_h * heading_rate;
    let ay = params.v_long * cos_h * heading_rate + v_lat_rate * cos_h
        - state.v_lat * sin_h * heading_rate;
    PlanarMotion {
        velocity: (drift[0], drift[1]),
        acceleration: (ax, ay),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stream::{NoiseDriver, StreamKey};

    fn params() -> VehicleParams<f64> {
        VehicleParams::default()
    }

    /// Independent transcription of the same equations, kept deliberately
    /// different in structure from the production path.
    fn drift_reference(state: &VehicleState<f64>, p: &VehicleParams<f64>, u: f64) -> [f64; 5] {
        let alpha_f = (state.v_lat + p.dist_front * state.yaw_rate) / p.v_long - u;
        let alpha_r = (state.v_lat - p.dist_rear * state.yaw_rate) / p.v_long;
        let f_front = -p.stiffness_front * alpha_f;
        let f_rear = -p.stiffness_rear * alpha_r;
        let mut out = [0.0; 5];
        out[0] = p.v_long * state.heading.cos() - state.v_lat * state.heading.sin();
        out[1] = p.v_long * state.heading.sin() + state.v_lat * state.heading.cos();
        out[2] = state.yaw_rate;
        out[3] = f_front * u.cos() / p.mass + f_rear / p.mass - p.v_long * state.yaw_rate;
        out[4] = (p.dist_front * f_front * u.cos() - p.dist_rear * f_rear) / p.yaw_inertia;
        out
    }

    fn random_state(noise: &mut NoiseDriver<f64>) -> (VehicleState<f64>, f64) {
        let state = VehicleState {
            x: 50.0 * noise.standard_normal(),
            y: 5.0 * noise.standard_normal(),
            heading: 0.3 * noise.standard_normal(),
            v_lat: 1.5 * noise.standard_normal(),
            yaw_rate: 0.4 * noise.standard_normal(),
        };
        let steer = 0.2 * noise.standard_normal();
        (state, steer)
    }

    #[test]
    fn default_params_validate() {
        params().validate().unwrap();
        PdGains::<f64>::default().validate().unwrap();
    }

    #[test]
    fn invalid_params_name_the_field() {
        let mut p = params();
        p.mass = -1.0;
        let err = p.validate().unwrap_err();
        assert_eq!(err.field, "mass");
        let mut g = PdGains::<f64>::default();
        g.kd = f64::NAN;
        assert_eq!(g.validate().unwrap_err().field, "kd");
    }

    #[test]
    fn slip_angles_reference_point() {
        let p = params();
        let state = VehicleState {
            x: 0.0,
            y: 0.0,
            heading: 0.0,
            v_lat: 0.0,
            yaw_rate: 0.05,
        };
        let (front, rear) = slip_angles(&state, &p, 0.0);
        assert!((front - 0.005).abs() < 1e-15);
        assert!((rear + 0.005).abs() < 1e-15);
    }

    #[test]
    fn positive_slip_gives_restoring_force() {
        let p = params();
        let (front, rear) = tire_forces((0.01, -0.02), &p);
        assert!(front < 0.0);
        assert!(rear > 0.0);
        assert_eq!(front, -600.0);
        assert_eq!(rear, 1200.0);
    }

    #[test]
    fn straight_driving_is_an_equilibrium() {
        let p = params();
        let state = VehicleState {
            x: 12.0,
            y: 3.5,
            heading: 0.0,
            v_lat: 0.0,
            yaw_rate: 0.0,
        };
        let d = vehicle_drift(&state, &p, 0.0);
        assert_eq!(d, [p.v_long, 0.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn heading_north_moves_along_y() {
        let p = params();
        let state = VehicleState {
            x: 0.0,
            y: 0.0,
            heading: std::f64::consts::FRAC_PI_2,
            v_lat: 0.0,
            yaw_rate: 0.0,
        };
        let d = vehicle_drift(&state, &p, 0.0);
        assert!(d[0].abs() < 1e-14);
        assert!((d[1] - p.v_long).abs() < 1e-12);
    }

    #[test]
    fn zero_stiffness_removes_tire_coupling() {
        let mut p = params();
        p.stiffness_front = 0.0;
        p.stiffness_rear = 0.0;
        let state = VehicleState {
            x: 0.0,
            y: 0.0,
            heading: 0.1,
            v_lat: 0.8,
            yaw_rate: 0.3,
        };
        let d = vehicle_drift(&state, &p, 0.2);
        assert_eq!(d[3], -p.v_long * state.yaw_rate);
        assert_eq!(d[4], 0.0);
    }

    #[test]
    fn drift_matches_independent_transcription() {
        let p = params();
        let mut noise = NoiseDriver::new(StreamKey::root(601));
        for _ in 0..200 {
            let (state, steer) = random_state(&mut noise);
            let a = vehicle_drift(&state, &p, steer);
            let b = drift_reference(&state, &p, steer);
            for i in 0..5 {
                let scale = 1.0f64.max(b[i].abs());
                assert!(
                    (a[i] - b[i]).abs() / scale < 1e-12,
                    "component {i}: {} vs {}",
                    a[i],
                    b[i]
                );
            }
        }
    }

    #[test]
    fn drift_matches_finite_difference_of_rk4_flow() {
        // Central difference of an independently coded RK4 flow recovers
        // the derivative to O(h^2); the lateral channel's third derivative
        // is large enough that h = 1e-4 misses 1e-6, so use h = 1e-5.
        let p = params();
        let rk4 = |s: &VehicleState<f64>, u: f64, h: f64| -> [f64; 5] {
            let to_arr =
                |v: &VehicleState<f64>| [v.x, v.y, v.heading, v.v_lat, v.yaw_rate];
            let from_arr = |a: &[f64; 5]| VehicleState {
                x: a[0],
                y: a[1],
                heading: a[2],
                v_lat: a[3],
                yaw_rate: a[4],
            };
            let f = |a: &[f64; 5]| drift_reference(&from_arr(a), &p, u);
            let y0 = to_arr(s);
            let k1 = f(&y0);
            let add = |a: &[f64; 5], b: &[f64; 5], c: f64| {
                let mut out = [0.0; 5];
                for i in 0..5 {
                    out[i] = a[i] + c * b[i];
                }
                out
            };
            let k2 = f(&add(&y0, &k1, h / 2.0));
            let k3 = f(&add(&y0, &k2, h / 2.0));
            let k4 = f(&add(&y0, &k3, h));
            let mut out = [0.0; 5];
            for i in 0..5 {
                out[i] = y0[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
            out
        };
        let mut noise = NoiseDriver::new(StreamKey::root(602));
        let h = 1e-5;
        for _ in 0..50 {
            let (state, steer) = random_state(&mut noise);
            let fwd = rk4(&state, steer, h);
            let bwd = rk4(&state, steer, -h);
            let drift = vehicle_drift(&state, &p, steer);
            for i in 0..5 {
                let fd = (fwd[i] - bwd[i]) / (2.0 * h);
                let scale = 1.0f64.max(drift[i].abs());
                assert!(
                    (fd - drift[i]).abs() / scale < 1e-6,
                    "component {i}: fd {fd} vs drift {}",
                    drift[i]
                );
            }
        }
    }

    #[test]
    fn position_drift_is_rotation_equivariant() {
        let p = params();
        let mut noise = NoiseDriver::new(StreamKey::root(603));
        for _ in 0..100 {
            let (state, steer) = random_state(&mut noise);
            let delta = noise.standard_normal();
            let rotated = VehicleState {
                heading: state.heading + delta,
                ..state
            };
            let d0 = vehicle_drift(&state, &p, steer);
            let d1 = vehicle_drift(&rotated, &p, steer);
            let (sin_d, cos_d) = delta.sin_cos();
            let rx = cos_d * d0[0] - sin_d * d0[1];
            let ry = sin_d * d0[0] + cos_d * d0[1];
            assert!((d1[0] - rx).abs() < 1e-9, "{} vs {rx}", d1[0]);
            assert!((d1[1] - ry).abs() < 1e-9);
            assert_eq!(d1[2], d0[2]);
            assert_eq!(d1[3], d0[3]);
            assert_eq!(d1[4], d0[4]);
        }
    }

    #[test]
    fn diffusion_column_touches_position_only() {
        let p = params();
        let col = vehicle_diffusion(&p);
        assert_eq!(col, [0.01, 0.01, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn pd_reference_point_and_clamp() {
        let p = params();
        let gains = PdGains::default().with_target(3.5);
        let state = VehicleState {
            x: 0.0,
            y: 0.0,
            heading: 0.0,
            v_lat: 0.0,
            yaw_rate: 0.0,
        };
        let u = pd_steering(&state, &p, &gains);
        assert!((u - 5.25e-3).abs() < 1e-15);

        let far = PdGains::default().with_target(1e5);
        assert_eq!(pd_steering(&state, &p, &far), 0.5);
        let far_neg = PdGains::default().with_target(-1e5);
        assert_eq!(pd_steering(&state, &p, &far_neg), -0.5);
    }

    #[test]
    fn pd_derivative_term_opposes_lateral_rate() {
        let p = params();
        let gains = PdGains::default().with_target(0.0);
        let moving = VehicleState {
            x: 0.0,
            y: 0.0,
            heading: 0.05,
            v_lat: 0.0,
            yaw_rate: 0.0,
        };
        // Already centered but drifting upward: steer must be negative.
        assert!(pd_steering(&moving, &p, &gains) < 0.0);
    }

    #[test]
    fn planar_motion_matches_finite_difference_of_velocity() {
        let p = params();
        let mut noise = NoiseDriver::new(StreamKey::root(604));
        let h = 1e-6;
        for _ in 0..50 {
            let (state, steer) = random_state(&mut noise);
            let motion = planar_motion(&state, &p, steer);
            // Advance the full state by +/- h along the drift and compare
            // velocity differences (steering held frozen).
            let step = |sign: f64| {
                let d = vehicle_drift(&state, &p, steer);
                let s = VehicleState {
                    x: state.x + sign * h * d[0],
                    y: state.y + sign * h * d[1],
                    heading: state.heading + sign * h * d[2],
                    v_lat: state.v_lat + sign * h * d[3],
                    yaw_rate: state.yaw_rate + sign * h * d[4],
                };
                let dd = vehicle_drift(&s, &p, steer);
                (dd[0], dd[1])
            };
            let fwd = step(1.0);
            let bwd = step(-1.0);
            let ax = (fwd.0 - bwd.0) / (2.0 * h);
            let ay = (fwd.1 - bwd.1) / (2.0 * h);
            assert!(
                (motion.acceleration.0 - ax).abs() < 1e-4 * (1.0 + ax.abs()),
                "{} vs {ax}",
                motion.acceleration.0
            );
            assert!((motion.acceleration.1 - ay).abs() < 1e-4 * (1.0 + ay.abs()));
            assert_eq!(motion.velocity.0, vehicle_drift(&state, &p, steer)[0]);
        }
    }

    #[test]
    fn generic_scalar_agrees_across_widths() {
        let p64 = VehicleParams::<f64>::default();
        let p32 = VehicleParams::<f32>::default();
        let s64 = VehicleState {
            x: 1.0f64,
            y: 2.0,
            heading: 0.1,
            v_lat: 0.3,
            yaw_rate: 0.02,
        };
        let s32 = VehicleState {
            x: 1.0f32,
            y: 2.0,
            heading: 0.1,
            v_lat: 0.3,
            yaw_rate: 0.02,
        };
        let d64 = vehicle_drift(&s64, &p64, 0.01);
        let d32 = vehicle_drift(&s32, &p32, 0.01f32);
        for i in 0..5 {
            assert!((d64[i] - d32[i] as f64).abs() < 1e-3, "component {i}");
        }
    }
}

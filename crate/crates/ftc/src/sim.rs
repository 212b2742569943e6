//! Quadrotor rigid-body dynamics with rotor faults.
//!
//! The vehicle state is integrated at a fixed 0.02 s control step. Rotor
//! thrusts follow a first-order lag toward `k_i * u_i`, where `k_i` is the
//! per-rotor failure coefficient (1 healthy, 0 dead); the rigid body is
//! integrated with four internal RK4 sub-steps per control step while the
//! motor states use the exact exponential solution of the lag ODE.
//!
//! Conventions, fixed project-wide:
//! - inertial frame: z up, gravity (0, 0, -9.81)
//! - quaternion `q`: body -> inertial rotation, stored (w, x, y, z)
//! - rotor layout: rotor 0 on +x, rotor 1 on +y, rotor 2 on -x, rotor 3 on
//!   -y, so roll torque is `l*(f1 - f3)`, pitch torque `l*(f2 - f0)` and yaw
//!   torque `k_m*(f0 - f1 + f2 - f3)`.

use nalgebra::{Matrix3, Quaternion, UnitQuaternion, Vector3, Vector4};

/// Number of RK4 sub-steps per control step.
pub const N_SUBSTEPS: usize = 4;

/// Physical constants of the simulated vehicle.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default)]
pub struct QuadParams {
    /// Mass, kg.
    pub mass: f64,
    /// Diagonal of the inertia matrix, kg m^2.
    pub inertia: Vector3<f64>,
    /// Arm length (center of mass to rotor), m.
    pub arm_length: f64,
    /// Motor time constant, s.
    pub motor_tau: f64,
    /// Yaw torque per unit thrust, m.
    pub torque_coeff: f64,
    /// Gravity vector in the inertial frame, m/s^2.
    pub gravity: Vector3<f64>,
    /// Maximum thrust of a single rotor, N.
    pub max_thrust: f64,
    /// Linear drag coefficient, N s/m.
    pub drag_linear: f64,
    /// Rotational drag coefficient, N m s/rad.
    pub drag_angular: f64,
    /// Angular-rate magnitude that terminates an episode, rad/s.
    pub omega_hard: f64,
}

impl Default for QuadParams {
    fn default() -> Self {
        Self {
            mass: 0.764,
            inertia: Vector3::new(0.0036, 0.0029, 0.0053),
            arm_length: 0.125,
            motor_tau: 0.025,
            torque_coeff: 0.022,
            gravity: Vector3::new(0.0, 0.0, -9.81),
            max_thrust: 13.0,
            drag_linear: 0.05,
            drag_angular: 0.009,
            omega_hard: 35.0,
        }
    }
}

impl QuadParams {
    /// Checks the physical invariants; call after deserializing a config.
    pub fn validate(&self) -> Result<(), String> {
        if !(self.mass > 0.0) {
            return Err("mass must be > 0".into());
        }
        if !(self.inertia.x > 0.0 && self.inertia.y > 0.0 && self.inertia.z > 0.0) {
            return Err("inertia diagonal entries must be > 0".into());
        }
        if !(self.arm_length > 0.0) {
            return Err("arm_length must be > 0".into());
        }
        if !(self.motor_tau > 0.0) {
            return Err("motor_tau must be > 0".into());
        }
        if !(self.max_thrust > 0.0) {
            return Err("max_thrust must be > 0".into());
        }
        if self.drag_linear < 0.0 || self.drag_angular < 0.0 {
            return Err("drag coefficients must be >= 0".into());
        }
        Ok(())
    }

    /// Per-rotor thrust that balances gravity in level flight, N.
    pub fn hover_thrust(&self) -> f64 {
        self.mass * self.gravity.norm() / 4.0
    }

    /// The thrust-to-wrench map: rows are (F, tau_x, tau_y, tau_z).
    pub fn allocation_matrix(&self) -> nalgebra::Matrix4<f64> {
        let l = self.arm_length;
        let km = self.torque_coeff;
        nalgebra::Matrix4::new(
            1.0, 1.0, 1.0, 1.0, //
            0.0, l, 0.0, -l, //
            -l, 0.0, l, 0.0, //
            km, -km, km, -km,
        )
    }
}

/// Full simulated vehicle state.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadState {
    /// Position in the inertial frame, m.
    pub pos: Vector3<f64>,
    /// Velocity in the inertial frame, m/s.
    pub vel: Vector3<f64>,
    /// Body-to-inertial attitude quaternion, unit norm.
    pub att: UnitQuaternion<f64>,
    /// Angular velocity in the body frame, rad/s.
    pub omega: Vector3<f64>,
    /// Current rotor thrusts, N.
    pub thrust: Vector4<f64>,
}

impl QuadState {
    /// At rest at `pos`, level, motors producing hover thrust.
    pub fn hover_at(pos: Vector3<f64>, params: &QuadParams) -> Self {
        Self {
            pos,
            vel: Vector3::zeros(),
            att: UnitQuaternion::identity(),
            omega: Vector3::zeros(),
            thrust: Vector4::repeat(params.hover_thrust()),
        }
    }

    /// Body-frame specific force (what an ideal accelerometer measures), m/s^2.
    pub fn specific_force_body(&self, params: &QuadParams) -> Vector3<f64> {
        let (total, _) = allocation(&self.thrust, params);
        let (drag_force, _) = drag(&self.vel, &self.omega, params);
        let drag_body = self.att.inverse_transform_vector(&drag_force);
        (Vector3::new(0.0, 0.0, total) + drag_body) / params.mass
    }
}

/// Per-rotor failure coefficients and their injection schedule.
#[derive(Debug, Clone, PartialEq)]
pub struct FaultConfig {
    /// Failure coefficients after injection; each in [0, 1].
    pub coeffs: Vector4<f64>,
    /// Injection time, s.
    pub t_fault: f64,
    /// Index of the faulted rotor, if any.
    pub rotor: Option<usize>,
}

impl FaultConfig {
    /// No fault at any time.
    pub fn fault_free() -> Self {
        Self {
            coeffs: Vector4::repeat(1.0),
            t_fault: f64::INFINITY,
            rotor: None,
        }
    }

    /// A single rotor drops to severity `k` (0 dead, 1 healthy) at `t_fault`.
    pub fn single_rotor(rotor: usize, k: f64, t_fault: f64) -> Self {
        assert!(rotor < 4, "rotor index must be 0..4");
        assert!((0.0..=1.0).contains(&k), "severity must be in [0, 1]");
        let mut coeffs = Vector4::repeat(1.0);
        coeffs[rotor] = k;
        Self {
            coeffs,
            t_fault,
            rotor: Some(rotor),
        }
    }

    /// Effective coefficients at time `t`: all ones before injection.
    pub fn effective_k(&self, t: f64) -> Vector4<f64> {
        if self.rotor.is_some() && t >= self.t_fault {
            self.coeffs
        } else {
            Vector4::repeat(1.0)
        }
    }

    /// True when the fault is active at time `t`.
    pub fn active(&self, t: f64) -> bool {
        self.rotor.is_some() && t >= self.t_fault
    }
}

/// Why an episode ended early.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    /// Vehicle touched the ground plane (p_z < 0).
    Ground,
    /// Angular rate exceeded the hard limit.
    Overspin,
}

/// Result of advancing the simulation one control step.
#[derive(Debug, Clone)]
pub struct StepOutcome {
    pub state: QuadState,
    /// Set when the episode should terminate; the state is still valid.
    pub terminal: Option<Termination>,
}

/// Total thrust and body torque produced by the four rotor thrusts.
pub fn allocation(f: &Vector4<f64>, params: &QuadParams) -> (f64, Vector3<f64>) {
    let l = params.arm_length;
    let km = params.torque_coeff;
    let total = f[0] + f[1] + f[2] + f[3];
    let torque = Vector3::new(
        l * (f[1] - f[3]),
        l * (f[2] - f[0]),
        km * (f[0] - f[1] + f[2] - f[3]),
    );
    (total, torque)
}

/// Advances the motor first-order lag exactly over `dt`.
///
/// Solves `df_i/dt = (k_i u_i - f_i) / motor_tau` in closed form and clamps
/// the result to `[0, max_thrust]`.
pub fn motor_step(
    f: &Vector4<f64>,
    u: &Vector4<f64>,
    k: &Vector4<f64>,
    params: &QuadParams,
    dt: f64,
) -> Vector4<f64> {
    debug_assert!(dt > 0.0);
    let decay = (-dt / params.motor_tau).exp();
    let mut out = Vector4::zeros();
    for i in 0..4 {
        let target = k[i] * u[i].clamp(0.0, params.max_thrust);
        out[i] = (target + (f[i] - target) * decay).clamp(0.0, params.max_thrust);
    }
    out
}

/// Quaternion kinematics: `q_dot = 0.5 * q * (0, omega)`.
pub fn quat_derivative(q: &Quaternion<f64>, omega: &Vector3<f64>) -> Quaternion<f64> {
    let omega_quat = Quaternion::new(0.0, omega.x, omega.y, omega.z);
    (q * omega_quat) * 0.5
}

/// Linear isotropic aerodynamic drag: force in the inertial frame, torque in
/// the body frame.
pub fn drag(
    vel: &Vector3<f64>,
    omega: &Vector3<f64>,
    params: &QuadParams,
) -> (Vector3<f64>, Vector3<f64>) {
    (-params.drag_linear * vel, -params.drag_angular * omega)
}

/// Rigid-body portion of the state, used internally by the integrator.
#[derive(Clone, Copy)]
struct RigidBody {
    pos: Vector3<f64>,
    vel: Vector3<f64>,
    att: Quaternion<f64>,
    omega: Vector3<f64>,
}

impl RigidBody {
    fn add_scaled(&self, d: &RigidBody, s: f64) -> RigidBody {
        RigidBody {
            pos: self.pos + d.pos * s,
            vel: self.vel + d.vel * s,
            att: self.att + d.att * s,
            omega: self.omega + d.omega * s,
        }
    }
}

fn rigid_body_derivative(rb: &RigidBody, f: &Vector4<f64>, params: &QuadParams) -> RigidBody {
    let (total, torque) = allocation(f, params);
    let (drag_force, drag_torque) = drag(&rb.vel, &rb.omega, params);
    let rot = UnitQuaternion::from_quaternion(rb.att);
    let thrust_inertial = rot.transform_vector(&Vector3::new(0.0, 0.0, total));
    let accel = (thrust_inertial + drag_force) / params.mass + params.gravity;

    let j = &params.inertia;
    let j_omega = j.component_mul(&rb.omega);
    let omega_dot = (torque - rb.omega.cross(&j_omega) + drag_torque).component_div(j);

    RigidBody {
        pos: rb.vel,
        vel: accel,
        att: quat_derivative(&rb.att, &rb.omega),
        omega: omega_dot,
    }
}

/// Advances the full state by one control step of length `dt`.
///
/// `u` is the commanded thrust vector (clamped to `[0, max_thrust]`), `t` the
/// episode time at the start of the step (used to decide whether the fault is
/// active). Deterministic: identical inputs give bit-identical outputs.
pub fn step(
    state: &QuadState,
    u: &Vector4<f64>,
    fault: &FaultConfig,
    t: f64,
    params: &QuadParams,
    dt: f64,
) -> StepOutcome {
    let k = fault.effective_k(t);
    let mut u_cl = *u;
    for i in 0..4 {
        u_cl[i] = u_cl[i].clamp(0.0, params.max_thrust);
    }
    // Thrust the motors relax toward while this command is held.
    let mut target = Vector4::zeros();
    for i in 0..4 {
        target[i] = k[i] * u_cl[i];
    }

    let h = dt / N_SUBSTEPS as f64;
    let mut rb = RigidBody {
        pos: state.pos,
        vel: state.vel,
        att: *state.att.quaternion(),
        omega: state.omega,
    };
    let mut f = state.thrust;

    for _ in 0..N_SUBSTEPS {
        // Exact motor solution at the RK4 stage times.
        let decay_half = (-0.5 * h / params.motor_tau).exp();
        let decay_full = decay_half * decay_half;
        let f_half = target + (f - target) * decay_half;
        let f_full = target + (f - target) * decay_full;

        let k1 = rigid_body_derivative(&rb, &f, params);
        let k2 = rigid_body_derivative(&rb.add_scaled(&k1, 0.5 * h), &f_half, params);
        let k3 = rigid_body_derivative(&rb.add_scaled(&k2, 0.5 * h), &f_half, params);
        let k4 = rigid_body_derivative(&rb.add_scaled(&k3, h), &f_full, params);

        rb = RigidBody {
            pos: rb.pos + (k1.pos + (k2.pos + k3.pos) * 2.0 + k4.pos) * (h / 6.0),
            vel: rb.vel + (k1.vel + (k2.vel + k3.vel) * 2.0 + k4.vel) * (h / 6.0),
            att: rb.att + (k1.att + (k2.att + k3.att) * 2.0 + k4.att) * (h / 6.0),
            omega: rb.omega + (k1.omega + (k2.omega + k3.omega) * 2.0 + k4.omega) * (h / 6.0),
        };
        rb.att = rb.att.normalize();
        let mut clamped = f_full;
        for i in 0..4 {
            clamped[i] = clamped[i].clamp(0.0, params.max_thrust);
        }
        f = clamped;
    }

    let next = QuadState {
        pos: rb.pos,
        vel: rb.vel,
        att: UnitQuaternion::from_quaternion(rb.att),
        omega: rb.omega,
        thrust: f,
    };

    let terminal = if next.pos.z < 0.0 {
        Some(Termination::Ground)
    } else if next.omega.norm() > params.omega_hard {
        Some(Termination::Overspin)
    } else {
        None
    };

    StepOutcome {
        state: next,
        terminal,
    }
}

/// Inertia matrix as a full 3x3 (diagonal) matrix.
pub fn inertia_matrix(params: &QuadParams) -> Matrix3<f64> {
    Matrix3::from_diagonal(&params.inertia)
}

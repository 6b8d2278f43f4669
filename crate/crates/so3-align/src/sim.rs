//! Kinematic multi-robot simulator on SE(3).
//!
//! Robots are constant-speed kinematic bodies: position `p`, attitude `R`,
//! body-frame velocity `v` (fixed over a run). The attitude is driven by
//! the control laws from [`crate::control`]; position follows `ṗ = R v`.
//!
//! Integration is Lie–Euler with a midpoint position quadrature:
//!
//! ```text
//! R⁺ = repair(R·exp(dt·ω^∧)),    p⁺ = p + dt·R·exp(dt/2·ω^∧)·v
//! ```
//!
//! Attitude stepping is exact for piecewise-constant rates; the midpoint
//! quadrature makes the position second-order accurate. A polar-decomposition
//! repair after every step keeps the accumulated orthogonality drift at
//! rounding level over arbitrarily long runs.
//!
//! Reference attitudes move with a known body rate `ω^k` and an unknown
//! earth-frame rate `ω^u`; both flows are integrated exactly for
//! piecewise-constant rates by splitting the step into an earth-frame
//! factor on the left and a body-frame factor on the right
//! (see [`propagate_target`]).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{PI, SQRT_2};
use std::fmt;
use std::sync::Arc;
use thiserror::Error;

use crate::control::{
    attitude_error, control_full_info, control_partial_info, frame_from_direction,
    frame_from_direction_default, ControllerParams,
};
use crate::so3::{dist_so3, exp_so3, hat, orthonormalize, vee, Rotation3, UnitVec3, Vec3};

/// Errors from configuration validation and simulation runs.
#[derive(Debug, Error)]
pub enum SimError {
    #[error("configuration error: {0}")]
    Config(String),
    /// The attitude error reached the logarithm branch point mid-run.
    /// (At `t = 0` the initial condition is nudged instead.)
    #[error("attitude error on the pi branch at t = {t:.3} (robot {robot})")]
    AtPiBranch { t: f64, robot: usize },
    /// The scalar field's gradient vanishes at the queried point.
    #[error("gradient vanishes at the field source; pointing direction undefined")]
    ZeroGradient,
}

fn config_err(msg: impl Into<String>) -> SimError {
    SimError::Config(msg.into())
}

// ---------------------------------------------------------------------------
// Configuration types
// ---------------------------------------------------------------------------

/// A time-dependent rate vector (rad/time), sampled at step boundaries.
#[derive(Clone)]
pub enum RateFn {
    Zero,
    Constant(Vec3),
    /// Arbitrary function of time; used by library callers and tests.
    Custom(Arc<dyn Fn(f64) -> Vec3 + Send + Sync>),
}

impl RateFn {
    pub fn eval(&self, t: f64) -> Vec3 {
        match self {
            RateFn::Zero => Vec3::zeros(),
            RateFn::Constant(v) => *v,
            RateFn::Custom(f) => f(t),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, RateFn::Zero)
    }
}

impl fmt::Debug for RateFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RateFn::Zero => write!(f, "Zero"),
            RateFn::Constant(v) => write!(f, "Constant({v:?})"),
            RateFn::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

/// Information pattern of the reference motion.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TargetMode {
    /// Controllers receive the full reference velocity; no unknown part
    /// is allowed.
    FullInfo,
    /// Controllers receive only the known (body-frame) part; the unknown
    /// earth-frame part drives the reference but never the controllers.
    PartialInfo,
    /// The reference does not move.
    Fixed,
}

/// A scheduled discontinuity: at `time` the reference frame is rebuilt to
/// point along `direction` (applied at the nearest step boundary).
#[derive(Clone, Debug)]
pub struct TargetEvent {
    pub time: f64,
    pub direction: Vec3,
}

/// A moving reference attitude shared by all robots.
#[derive(Clone, Debug)]
pub struct TargetSpec {
    pub mode: TargetMode,
    /// Initial reference attitude.
    pub ra0: Rotation3,
    /// Known body-frame rate `ω^k(t)`.
    pub omega_known: RateFn,
    /// Unknown earth-frame rate `ω^u(t)`; reaches the plant only.
    pub omega_unknown: RateFn,
    /// Scheduled pointing-direction switches.
    pub events: Vec<TargetEvent>,
    /// Roll reference used when rebuilding the frame at events
    /// (`None` = default: world z, falling back to world y).
    pub roll_reference: Option<Vec3>,
}

impl TargetSpec {
    /// A reference that never moves.
    pub fn fixed(ra0: Rotation3) -> Self {
        Self {
            mode: TargetMode::Fixed,
            ra0,
            omega_known: RateFn::Zero,
            omega_unknown: RateFn::Zero,
            events: Vec::new(),
            roll_reference: None,
        }
    }
}

/// Scalar fields with analytic gradients, used to derive pointing targets.
pub trait ScalarField {
    fn value(&self, p: &Vec3) -> f64;
    fn gradient(&self, p: &Vec3) -> Vec3;
}

/// The built-in field: `σ(p) = −‖p − source‖²`, maximised at `source`.
#[derive(Clone, Copy, Debug)]
pub struct QuadraticBowl {
    pub source: Vec3,
}

impl ScalarField for QuadraticBowl {
    fn value(&self, p: &Vec3) -> f64 {
        -(p - self.source).norm_squared()
    }
    fn gradient(&self, p: &Vec3) -> Vec3 {
        (self.source - p) * 2.0
    }
}

/// Unit ascent direction of `field` at `p` (for the bowl: straight at the
/// source). Errors when the gradient magnitude is below `1e-9`.
pub fn gradient_field_target(field: &dyn ScalarField, p: &Vec3) -> Result<UnitVec3, SimError> {
    let g = field.gradient(p);
    if g.norm() <= 1e-9 {
        return Err(SimError::ZeroGradient);
    }
    Ok(UnitVec3::new(g).expect("gradient checked nonzero"))
}

/// Per-robot source-seeking scenario: each robot tracks its own reference
/// frame pointed along the field gradient at its position, advancing with
/// the known roll rate.
#[derive(Clone, Debug)]
pub struct FieldSpec {
    pub source: Vec3,
    /// Known body-frame roll rate of every per-robot reference.
    pub omega_known: RateFn,
    /// Radial shell `[r_min, r_max]` for seeding unspecified positions.
    pub position_shell: Option<(f64, f64)>,
}

/// Planar (unicycle-heading) scenario: headings track a field direction
/// rotating at a constant rate.
#[derive(Clone, Copy, Debug)]
pub struct PlanarSpec {
    /// Signed rotation rate of the field direction (the feedforward).
    pub field_rate: f64,
    /// Field heading at `t = 0`.
    pub field_heading0: f64,
}

/// What the robots are tracking.
#[derive(Clone, Debug)]
pub enum ScenarioKind {
    Attitude3d(TargetSpec),
    GradientField(FieldSpec),
    Planar(PlanarSpec),
}

/// Which control law a robot runs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ControlMode {
    FullInfo,
    PartialInfo,
}

/// Per-robot configuration. Unset initial conditions are seeded from the
/// run RNG (attitude first, then position, robots in listed order).
#[derive(Clone, Debug)]
pub struct RobotConfig {
    pub position: Option<Vec3>,
    /// Initial attitude as a rotation vector (planar runs use `[0, 0, ψ₀]`).
    pub attitude: Option<Vec3>,
    /// Body-frame forward speed; velocity is `v = [speed, 0, 0]`.
    pub speed: f64,
    pub mode: ControlMode,
    pub params: ControllerParams,
}

/// A full simulation configuration.
#[derive(Clone, Debug)]
pub struct SimConfig {
    pub name: String,
    pub dt: f64,
    pub t_end: f64,
    pub seed: u64,
    /// Reference time for pairwise drift, `‖p_ij(t) − p_ij(t₀)‖`.
    pub drift_t0: f64,
    pub robots: Vec<RobotConfig>,
    pub kind: ScenarioKind,
}

impl SimConfig {
    /// Number of integration steps (`t_end / dt`, validated integral).
    pub fn n_steps(&self) -> usize {
        (self.t_end / self.dt).round() as usize
    }

    pub fn validate(&self) -> Result<(), SimError> {
        if self.dt <= 0.0 || !self.dt.is_finite() {
            return Err(config_err(format!("dt must be positive, got {}", self.dt)));
        }
        if self.t_end < self.dt || !self.t_end.is_finite() {
            return Err(config_err(format!(
                "t_end must be at least one step (dt = {}), got {}",
                self.dt, self.t_end
            )));
        }
        let steps = self.t_end / self.dt;
        if (steps - steps.round()).abs() > 1e-6 {
            return Err(config_err(format!(
                "t_end ({}) must be an integer multiple of dt ({})",
                self.t_end, self.dt
            )));
        }
        if self.robots.is_empty() {
            return Err(config_err("at least one robot is required"));
        }
        if !(0.0..=self.t_end).contains(&self.drift_t0) {
            return Err(config_err(format!(
                "drift_t0 ({}) must lie within [0, t_end]",
                self.drift_t0
            )));
        }
        for (i, r) in self.robots.iter().enumerate() {
            if r.speed < 0.0 || !r.speed.is_finite() {
                return Err(config_err(format!(
                    "robot {i}: speed must be nonnegative, got {}",
                    r.speed
                )));
            }
            r.params
                .validate()
                .map_err(|e| config_err(format!("robot {i}: {e}")))?;
        }
        let k_max = self
            .robots
            .iter()
            .map(|r| r.params.k_w)
            .fold(0.0_f64, f64::max);
        if self.dt > 0.1 / k_max {
            return Err(config_err(format!(
                "dt = {} is too coarse for gain {} (stability requires dt <= {})",
                self.dt,
                k_max,
                0.1 / k_max
            )));
        }

        match &self.kind {
            ScenarioKind::Attitude3d(spec) => self.validate_attitude(spec)?,
            ScenarioKind::GradientField(field) => self.validate_field(field)?,
            ScenarioKind::Planar(planar) => self.validate_planar(planar)?,
        }
        Ok(())
    }

    fn validate_attitude(&self, spec: &TargetSpec) -> Result<(), SimError> {
        match spec.mode {
            TargetMode::FullInfo => {
                if !spec.omega_unknown.is_zero() {
                    return Err(config_err(
                        "full-information target cannot carry an unknown rate",
                    ));
                }
                for (i, r) in self.robots.iter().enumerate() {
                    if r.mode != ControlMode::FullInfo {
                        return Err(config_err(format!(
                            "robot {i}: controller mode must be full_info to match the target"
                        )));
                    }
                }
            }
            TargetMode::PartialInfo => {
                for (i, r) in self.robots.iter().enumerate() {
                    if r.mode != ControlMode::PartialInfo {
                        return Err(config_err(format!(
                            "robot {i}: controller mode must be partial_info to match the target"
                        )));
                    }
                }
            }
            TargetMode::Fixed => {
                if !spec.omega_known.is_zero() || !spec.omega_unknown.is_zero() {
                    return Err(config_err("fixed target cannot carry rates"));
                }
            }
        }
        for (k, e) in spec.events.iter().enumerate() {
            if e.time <= 0.0 || !e.time.is_finite() {
                return Err(config_err(format!(
                    "event {k}: time {} must be positive",
                    e.time
                )));
            }
            if e.direction.norm() <= 1e-9 {
                return Err(config_err(format!("event {k}: direction is near zero")));
            }
        }
        Ok(())
    }

    fn validate_field(&self, field: &FieldSpec) -> Result<(), SimError> {
        for (i, r) in self.robots.iter().enumerate() {
            if r.mode != ControlMode::PartialInfo {
                return Err(config_err(format!(
                    "robot {i}: gradient-field runs use partial_info controllers"
                )));
            }
            if r.speed <= 0.0 {
                return Err(config_err(format!(
                    "robot {i}: gradient-field runs need a positive speed"
                )));
            }
            if r.position.is_none() && field.position_shell.is_none() {
                return Err(config_err(format!(
                    "robot {i}: no position given and no seeding shell configured"
                )));
            }
        }
        if let Some((lo, hi)) = field.position_shell {
            if !(0.0 < lo && lo <= hi) || !hi.is_finite() {
                return Err(config_err(format!(
                    "position shell [{lo}, {hi}] must satisfy 0 < r_min <= r_max"
                )));
            }
        }
        Ok(())
    }

    fn validate_planar(&self, planar: &PlanarSpec) -> Result<(), SimError> {
        if !planar.field_rate.is_finite() || !planar.field_heading0.is_finite() {
            return Err(config_err("planar field parameters must be finite"));
        }
        let k0 = self.robots[0].params.k_w;
        for (i, r) in self.robots.iter().enumerate() {
            if (r.params.k_w - k0).abs() > 1e-12 {
                return Err(config_err(format!(
                    "robot {i}: planar runs require a common gain (got {} vs {})",
                    r.params.k_w, k0
                )));
            }
            if let Some(tau) = r.attitude {
                if tau[0].abs() > 1e-12 || tau[1].abs() > 1e-12 {
                    return Err(config_err(format!(
                        "robot {i}: planar initial attitude must be [0, 0, heading]"
                    )));
                }
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// State and trajectory types
// ---------------------------------------------------------------------------

/// Kinematic state of one robot.
#[derive(Clone, Copy, Debug)]
pub struct RobotState {
    pub p: Vec3,
    pub r: Rotation3,
    /// Body-frame velocity, constant over a run.
    pub v: Vec3,
}

/// Recorded series for one robot; all vectors share the trajectory length.
#[derive(Clone, Debug, Default)]
pub struct RobotSeries {
    pub p: Vec<Vec3>,
    pub r: Vec<Rotation3>,
    /// `‖log R_e‖_F` against the robot's reference.
    pub mu: Vec<f64>,
    /// Pointing error (angle scale).
    pub delta: Vec<f64>,
    /// Control applied at each row (`Ω^∨`); the final row records the
    /// control computed there even though it is never applied.
    pub omega: Vec<Vec3>,
    /// Whether the error logarithm sat on the π branch at this row.
    pub at_pi: Vec<bool>,
}

impl RobotSeries {
    fn with_capacity(n: usize) -> Self {
        Self {
            p: Vec::with_capacity(n),
            r: Vec::with_capacity(n),
            mu: Vec::with_capacity(n),
            delta: Vec::with_capacity(n),
            omega: Vec::with_capacity(n),
            at_pi: Vec::with_capacity(n),
        }
    }
}

/// Pairwise separation metrics for robots `i < j`.
#[derive(Clone, Debug)]
pub struct PairSeries {
    pub i: usize,
    pub j: usize,
    /// Geodesic attitude separation `dist_so3(R_i, R_j)`.
    pub dist: Vec<f64>,
    /// Positional drift `‖p_ij(t) − p_ij(t₀)‖`.
    pub drift: Vec<f64>,
}

/// A completed run: uniform time grid plus per-robot and per-pair series.
#[derive(Clone, Debug, Default)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub robots: Vec<RobotSeries>,
    pub pairs: Vec<PairSeries>,
}

// ---------------------------------------------------------------------------
// Integrator
// ---------------------------------------------------------------------------

/// One Lie–Euler step with midpoint position quadrature and drift repair.
pub fn step(state: &RobotState, omega: &crate::so3::SkewMat3, dt: f64) -> RobotState {
    let w = vee(omega);
    let r_mid = state.r * exp_so3(&(w * (0.5 * dt)));
    let p = state.p + r_mid * state.v * dt;
    let raw = state.r.matrix() * exp_so3(&(w * dt)).matrix();
    let r = orthonormalize(&raw).expect("drift repair of a group product cannot fail");
    RobotState { p, r, v: state.v }
}

/// Advances a reference attitude by one step.
///
/// For piecewise-constant rates the exact flow of
/// `Ṙ_a = ω^u∧ R_a + R_a ω^k∧` over a step is the split product
///
/// ```text
/// R_a⁺ = exp(dt·ω^u∧) · R_a · exp(dt·ω^k∧)
/// ```
///
/// (each factor integrates its frame's rotation exactly, and the two flows
/// commute through the group action), so target motion contributes no
/// integration error of its own.
pub fn propagate_target(spec: &TargetSpec, ra: &Rotation3, t: f64, dt: f64) -> Rotation3 {
    let wk = spec.omega_known.eval(t);
    let wu = spec.omega_unknown.eval(t);
    let m = exp_so3(&(wu * dt)).matrix() * ra.matrix() * exp_so3(&(wk * dt)).matrix();
    orthonormalize(&m).expect("target propagation stays on the group")
}

// ---------------------------------------------------------------------------
// Runs
// ---------------------------------------------------------------------------

/// Runs a configuration to completion. Fails fast on invalid
/// configurations; a π-branch encounter after `t = 0` is an error (at
/// `t = 0` the offending initial attitude is nudged by `1e-3` rad about
/// the recovered axis and the run proceeds, with a warning).
pub fn run(config: &SimConfig) -> Result<Trajectory, SimError> {
    config.validate()?;
    match &config.kind {
        ScenarioKind::Attitude3d(spec) => run_attitude(config, spec),
        ScenarioKind::GradientField(field) => run_field(config, field),
        ScenarioKind::Planar(planar) => run_planar(config, planar),
    }
}

fn sample_axis(rng: &mut ChaCha8Rng) -> Vec3 {
    let z: f64 = rng.random_range(-1.0..=1.0);
    let phi: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    let r = (1.0 - z * z).sqrt();
    Vec3::new(r * phi.cos(), r * phi.sin(), z)
}

fn sample_attitude(rng: &mut ChaCha8Rng) -> Rotation3 {
    let axis = sample_axis(rng);
    let theta: f64 = rng.random_range(0.0..PI - 0.1);
    exp_so3(&(axis * theta))
}

fn init_state(rc: &RobotConfig, rng: &mut ChaCha8Rng, shell: Option<(f64, f64)>) -> RobotState {
    let r = match rc.attitude {
        Some(tau) => exp_so3(&tau),
        None => sample_attitude(rng),
    };
    let p = match rc.position {
        Some(p) => p,
        None => match shell {
            Some((lo, hi)) => {
                let dir = sample_axis(rng);
                let radius: f64 = rng.random_range(lo..=hi);
                dir * radius
            }
            None => Vec3::zeros(),
        },
    };
    RobotState {
        p,
        r,
        v: Vec3::new(rc.speed, 0.0, 0.0),
    }
}

/// Nudges `r` off the π branch of its error w.r.t. `ra`: a `1e-3` rad
/// rotation about the deterministically recovered error axis always exits
/// the branch band.
fn nudge_off_pi(r: &Rotation3, ra: &Rotation3, robot: usize) -> Rotation3 {
    let err = attitude_error(ra, r);
    let axis = err.log_re.tau / err.log_re.theta;
    log::warn!(
        "robot {robot}: initial attitude error on the pi branch (theta = {:.9}); \
         nudging by 1e-3 rad",
        err.log_re.theta
    );
    let m = r.matrix() * exp_so3(&(axis * 1e-3)).matrix();
    orthonormalize(&m).expect("nudge stays on the group")
}

fn roll_reference_frame(
    direction: &Vec3,
    roll_reference: &Option<Vec3>,
) -> Result<Rotation3, SimError> {
    let m_d =
        UnitVec3::new(*direction).map_err(|e| config_err(format!("target direction: {e}")))?;
    match roll_reference {
        Some(roll) => {
            let roll =
                UnitVec3::new(*roll).map_err(|e| config_err(format!("roll reference: {e}")))?;
            frame_from_direction(&m_d, &roll).map_err(|e| config_err(e.to_string()))
        }
        None => Ok(frame_from_direction_default(&m_d)),
    }
}

fn run_attitude(config: &SimConfig, spec: &TargetSpec) -> Result<Trajectory, SimError> {
    let n_steps = config.n_steps();
    let dt = config.dt;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut states: Vec<RobotState> = config
        .robots
        .iter()
        .map(|rc| init_state(rc, &mut rng, None))
        .collect();
    let mut ra = spec.ra0;

    // Premise for the partial-information bound: the unknown rate must
    // stay inside the bound every controller was designed against.
    let omega_d_min = config
        .robots
        .iter()
        .filter(|r| r.mode == ControlMode::PartialInfo)
        .map(|r| r.params.omega_d)
        .fold(f64::INFINITY, f64::min);

    let mut robots: Vec<RobotSeries> = (0..states.len())
        .map(|_| RobotSeries::with_capacity(n_steps + 1))
        .collect();
    let mut times = Vec::with_capacity(n_steps + 1);
    let mut ev_idx = 0;

    for i in 0..=n_steps {
        let t = i as f64 * dt;
        while ev_idx < spec.events.len() && spec.events[ev_idx].time <= t + 0.5 * dt {
            ra = roll_reference_frame(&spec.events[ev_idx].direction, &spec.roll_reference)?;
            log::info!(
                "t = {t:.3}: reference repointed along {:?}",
                spec.events[ev_idx].direction
            );
            ev_idx += 1;
        }

        if spec.mode == TargetMode::PartialInfo {
            let wu = spec.omega_unknown.eval(t);
            if wu.norm() > omega_d_min * (1.0 + 1e-12) + 1e-15 {
                return Err(config_err(format!(
                    "unknown rate magnitude {:.6} at t = {t:.3} exceeds the designed bound {:.6}",
                    wu.norm(),
                    omega_d_min
                )));
            }
        }

        times.push(t);
        let omegas: Vec<Vec3> = {
            let mut out = Vec::with_capacity(states.len());
            for (k, state) in states.iter_mut().enumerate() {
                let mut err = attitude_error(&ra, &state.r);
                if err.log_re.at_pi_branch {
                    if i == 0 {
                        state.r = nudge_off_pi(&state.r, &ra, k);
                        err = attitude_error(&ra, &state.r);
                    } else {
                        return Err(SimError::AtPiBranch { t, robot: k });
                    }
                }
                let wk = hat(&spec.omega_known.eval(t));
                let law = match config.robots[k].mode {
                    ControlMode::FullInfo => {
                        control_full_info(&err.re, &wk, config.robots[k].params.k_w)
                    }
                    ControlMode::PartialInfo => {
                        control_partial_info(&err.re, &wk, config.robots[k].params.k_w)
                    }
                };
                let omega = law.map_err(|_| SimError::AtPiBranch { t, robot: k })?;
                let w = vee(&omega);
                robots[k].p.push(state.p);
                robots[k].r.push(state.r);
                robots[k].mu.push(err.mu);
                robots[k].delta.push(err.delta);
                robots[k].omega.push(w);
                robots[k].at_pi.push(err.log_re.at_pi_branch);
                out.push(w);
            }
            out
        };

        if i < n_steps {
            for (k, state) in states.iter_mut().enumerate() {
                *state = step(state, &hat(&omegas[k]), dt);
            }
            ra = propagate_target(spec, &ra, t, dt);
        }
    }

    let pairs = pairwise_metrics(&times, &robots, config.drift_t0);
    Ok(Trajectory {
        times,
        robots,
        pairs,
    })
}

fn run_field(config: &SimConfig, field: &FieldSpec) -> Result<Trajectory, SimError> {
    let n_steps = config.n_steps();
    let dt = config.dt;
    let bowl = QuadraticBowl {
        source: field.source,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut states: Vec<RobotState> = config
        .robots
        .iter()
        .map(|rc| init_state(rc, &mut rng, field.position_shell))
        .collect();

    // Per-robot reference: pointed along the local gradient direction.
    let mut refs: Vec<Rotation3> = states
        .iter()
        .map(|s| {
            Ok(frame_from_direction_default(&gradient_field_target(
                &bowl, &s.p,
            )?))
        })
        .collect::<Result<_, SimError>>()?;

    let mut robots: Vec<RobotSeries> = (0..states.len())
        .map(|_| RobotSeries::with_capacity(n_steps + 1))
        .collect();
    let mut times = Vec::with_capacity(n_steps + 1);
    let mut max_implied_rate = 0.0_f64;

    for i in 0..=n_steps {
        let t = i as f64 * dt;
        times.push(t);
        let mut omegas = Vec::with_capacity(states.len());
        for (k, state) in states.iter_mut().enumerate() {
            let mut err = attitude_error(&refs[k], &state.r);
            if err.log_re.at_pi_branch {
                if i == 0 {
                    state.r = nudge_off_pi(&state.r, &refs[k], k);
                    err = attitude_error(&refs[k], &state.r);
                } else {
                    return Err(SimError::AtPiBranch { t, robot: k });
                }
            }
            let wk = hat(&field.omega_known.eval(t));
            let omega = control_partial_info(&err.re, &wk, config.robots[k].params.k_w)
                .map_err(|_| SimError::AtPiBranch { t, robot: k })?;
            let w = vee(&omega);
            robots[k].p.push(state.p);
            robots[k].r.push(state.r);
            robots[k].mu.push(err.mu);
            robots[k].delta.push(err.delta);
            robots[k].omega.push(w);
            robots[k].at_pi.push(err.log_re.at_pi_branch);
            omegas.push(w);
        }

        if i < n_steps {
            for (k, state) in states.iter_mut().enumerate() {
                *state = step(state, &hat(&omegas[k]), dt);
                // Advance the reference: known roll, then re-point the first
                // column at the gradient direction from the new position.
                let rolled = refs[k] * exp_so3(&(field.omega_known.eval(t) * dt));
                let m_new = gradient_field_target(&bowl, &state.p)?;
                let (aligned, angle) = realign_first_column(&rolled, &m_new);
                refs[k] = aligned;
                max_implied_rate = max_implied_rate.max(angle / dt);
            }
        }
    }

    let omega_d_min = config
        .robots
        .iter()
        .map(|r| r.params.omega_d)
        .fold(f64::INFINITY, f64::min);
    if max_implied_rate > omega_d_min {
        log::warn!(
            "field-induced reference rate {max_implied_rate:.4} exceeded the designed bound \
             {omega_d_min:.4}; the ultimate bound is not guaranteed"
        );
    }

    let pairs = pairwise_metrics(&times, &robots, config.drift_t0);
    Ok(Trajectory {
        times,
        robots,
        pairs,
    })
}

/// Minimal rotation taking the first column of `r` onto `m_new`, applied
/// from the left; returns the rotation angle as well.
fn realign_first_column(r: &Rotation3, m_new: &UnitVec3) -> (Rotation3, f64) {
    let x = r.column(0);
    let target = *m_new.as_vec();
    let w = x.cross(&target);
    let s = w.norm();
    let c = x.dot(&target);
    if s < 1e-15 {
        if c > 0.0 {
            return (*r, 0.0);
        }
        // Antipodal flip: rotate by π about any axis orthogonal to x.
        let mut helper = Vec3::new(0.0, 0.0, 1.0);
        if x.cross(&helper).norm() < 1e-6 {
            helper = Vec3::new(0.0, 1.0, 0.0);
        }
        let axis = x.cross(&helper).normalize();
        let m = exp_so3(&(axis * PI)).matrix() * r.matrix();
        return (
            orthonormalize(&m).expect("realignment stays on the group"),
            PI,
        );
    }
    let angle = s.atan2(c);
    let axis = w / s;
    let m = exp_so3(&(axis * angle)).matrix() * r.matrix();
    (
        orthonormalize(&m).expect("realignment stays on the group"),
        angle,
    )
}

fn wrap_to_pi(x: f64) -> f64 {
    (x + PI).rem_euclid(std::f64::consts::TAU) - PI
}

fn run_planar(config: &SimConfig, planar: &PlanarSpec) -> Result<Trajectory, SimError> {
    let n_steps = config.n_steps();
    let dt = config.dt;
    let k_w = config.robots[0].params.k_w;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    struct PlanarRobot {
        p: Vec3,
        delta0: f64,
        speed: f64,
    }

    let mut bots: Vec<PlanarRobot> = config
        .robots
        .iter()
        .map(|rc| {
            let psi0 = match rc.attitude {
                Some(tau) => tau[2],
                None => rng.random_range(-1.5..1.5) + planar.field_heading0,
            };
            PlanarRobot {
                p: rc.position.unwrap_or_else(Vec3::zeros),
                delta0: wrap_to_pi(psi0 - planar.field_heading0),
                speed: rc.speed,
            }
        })
        .collect();

    let mut robots: Vec<RobotSeries> = (0..bots.len())
        .map(|_| RobotSeries::with_capacity(n_steps + 1))
        .collect();
    let mut times = Vec::with_capacity(n_steps + 1);

    for i in 0..=n_steps {
        let t = i as f64 * dt;
        times.push(t);
        let phi = planar.field_heading0 + planar.field_rate * t;
        for (k, bot) in bots.iter_mut().enumerate() {
            // The closed loop δ' = −k_w δ is a scalar linear ODE; the step
            // uses its exact solution rather than an Euler approximation.
            let delta = bot.delta0 * (-k_w * t).exp();
            let psi = phi + delta;
            robots[k].p.push(bot.p);
            robots[k].r.push(exp_so3(&Vec3::new(0.0, 0.0, psi)));
            robots[k].mu.push(SQRT_2 * delta.abs());
            robots[k].delta.push(delta.abs());
            robots[k].omega.push(Vec3::new(
                0.0,
                0.0,
                crate::control::control_2d(delta, k_w, planar.field_rate),
            ));
            robots[k].at_pi.push(false);

            if i < n_steps {
                let t_mid = t + 0.5 * dt;
                let psi_mid = planar.field_heading0
                    + planar.field_rate * t_mid
                    + bot.delta0 * (-k_w * t_mid).exp();
                bot.p += Vec3::new(psi_mid.cos(), psi_mid.sin(), 0.0) * (bot.speed * dt);
            }
        }
    }

    let pairs = pairwise_metrics(&times, &robots, config.drift_t0);
    Ok(Trajectory {
        times,
        robots,
        pairs,
    })
}

// ---------------------------------------------------------------------------
// Metrics and bounds
// ---------------------------------------------------------------------------

/// Pairwise attitude separations and positional drift relative to the grid
/// point nearest `drift_t0`.
pub fn pairwise_metrics(times: &[f64], robots: &[RobotSeries], drift_t0: f64) -> Vec<PairSeries> {
    let mut pairs = Vec::new();
    if times.is_empty() || robots.len() < 2 {
        return pairs;
    }
    let i0 = times
        .iter()
        .position(|&t| t >= drift_t0 - 1e-12)
        .unwrap_or(0);
    for i in 0..robots.len() {
        for j in (i + 1)..robots.len() {
            let p_ref = robots[i].p[i0] - robots[j].p[i0];
            let mut dist = Vec::with_capacity(times.len());
            let mut drift = Vec::with_capacity(times.len());
            for k in 0..times.len() {
                dist.push(dist_so3(&robots[i].r[k], &robots[j].r[k]));
                drift.push(((robots[i].p[k] - robots[j].p[k]) - p_ref).norm());
            }
            pairs.push(PairSeries { i, j, dist, drift });
        }
    }
    pairs
}

/// Which analytic drift bound a report refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundKind {
    /// Full-information tracking of a shared reference at rate `r`:
    /// pairwise drift is bounded by `2√3·π / r`.
    FixedTargetDrift,
    /// Partial-information tracking with ultimate bound `μ*` and gain
    /// `k_w`: pairwise drift after `t₀` is bounded by `2√3·μ* / k_w`.
    PartialInfoDrift,
    /// Planar heading alignment: pairwise drift is bounded by `2π / k_w`.
    PlanarDrift,
}

impl fmt::Display for BoundKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            BoundKind::FixedTargetDrift => "fixed-target drift",
            BoundKind::PartialInfoDrift => "partial-info drift",
            BoundKind::PlanarDrift => "planar drift",
        };
        write!(f, "{name}")
    }
}

/// Outcome of checking one analytic bound against one pair's observed drift.
#[derive(Clone, Copy, Debug)]
pub struct BoundReport {
    pub kind: BoundKind,
    pub i: usize,
    pub j: usize,
    pub theoretical: f64,
    pub observed: f64,
    pub satisfied: bool,
    pub margin: f64,
}

fn bound_report(
    kind: BoundKind,
    pair: &PairSeries,
    times: &[f64],
    t0: f64,
    theoretical: f64,
) -> BoundReport {
    let observed = times
        .iter()
        .zip(pair.drift.iter())
        .filter(|(t, _)| **t >= t0 - 1e-12)
        .map(|(_, d)| *d)
        .fold(0.0_f64, f64::max);
    BoundReport {
        kind,
        i: pair.i,
        j: pair.j,
        theoretical,
        observed,
        satisfied: observed <= theoretical + 1e-9,
        margin: theoretical - observed,
    }
}

/// Evaluates every drift bound applicable to the configuration against the
/// observed pairwise drift. Bounds need a shared gain (and bound set) across
/// robots; heterogeneous swarms produce no reports.
pub fn check_bounds(traj: &Trajectory, config: &SimConfig) -> Vec<BoundReport> {
    let mut reports = Vec::new();
    if traj.pairs.is_empty() {
        return reports;
    }
    let k0 = config.robots[0].params.k_w;
    let same_gain = config
        .robots
        .iter()
        .all(|r| (r.params.k_w - k0).abs() < 1e-12);
    let horizon = (-k0 * config.t_end).exp();
    if horizon >= 1e-3 {
        log::warn!(
            "run horizon t_end = {} is short for gain {k0}: e^(-k_w t_end) = {horizon:.2e} >= 1e-3; \
             drift bounds may not have settled",
            config.t_end
        );
    }

    match &config.kind {
        ScenarioKind::Attitude3d(spec) => match spec.mode {
            TargetMode::Fixed | TargetMode::FullInfo => {
                if same_gain {
                    let theoretical = 2.0 * 3.0_f64.sqrt() * PI / k0;
                    for pair in &traj.pairs {
                        reports.push(bound_report(
                            BoundKind::FixedTargetDrift,
                            pair,
                            &traj.times,
                            config.drift_t0,
                            theoretical,
                        ));
                    }
                }
            }
            TargetMode::PartialInfo => {
                let mu0 = config.robots[0].params.mu_star;
                let same_mu = config
                    .robots
                    .iter()
                    .all(|r| (r.params.mu_star - mu0).abs() < 1e-12);
                if same_gain && same_mu {
                    let theoretical = 2.0 * 3.0_f64.sqrt() * mu0 / k0;
                    for pair in &traj.pairs {
                        reports.push(bound_report(
                            BoundKind::PartialInfoDrift,
                            pair,
                            &traj.times,
                            config.drift_t0,
                            theoretical,
                        ));
                    }
                }
            }
        },
        ScenarioKind::GradientField(_) => {
            // Per-robot references: the pairwise premises do not apply.
        }
        ScenarioKind::Planar(_) => {
            if same_gain {
                let theoretical = 2.0 * PI / k0;
                for pair in &traj.pairs {
                    reports.push(bound_report(
                        BoundKind::PlanarDrift,
                        pair,
                        &traj.times,
                        config.drift_t0,
                        theoretical,
                    ));
                }
            }
        }
    }
    reports
}

/// A fitted exponential decay rate.
#[derive(Clone, Copy, Debug)]
pub struct RateFit {
    pub rate: f64,
    pub n_samples: usize,
}

/// Least-squares slope of `ln(value)` over the window where the series sits
/// inside `[1e-5, 0.9·value₀]` — below the initial transient, above the
/// numerical floor. Returns `None` when fewer than two samples qualify.
pub fn fit_decay_rate(times: &[f64], values: &[f64]) -> Option<RateFit> {
    let v0 = *values.first()?;
    let hi = 0.9 * v0;
    let lo = 1e-5;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (t, v) in times.iter().zip(values.iter()) {
        if *v >= lo && *v <= hi {
            xs.push(*t);
            ys.push(v.ln());
        }
    }
    let n = xs.len();
    if n < 2 {
        return None;
    }
    let nf = n as f64;
    let sx: f64 = xs.iter().sum();
    let sy: f64 = ys.iter().sum();
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let sxy: f64 = xs.iter().zip(ys.iter()).map(|(x, y)| x * y).sum();
    let denom = nf * sxx - sx * sx;
    if denom.abs() < 1e-30 {
        return None;
    }
    let slope = (nf * sxy - sx * sy) / denom;
    Some(RateFit {
        rate: -slope,
        n_samples: n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::so3::{log_so3, Mat3, SkewMat3};
    use approx::assert_abs_diff_eq;

    fn full_info_robot(k_w: f64, attitude: Option<Vec3>) -> RobotConfig {
        RobotConfig {
            position: None,
            attitude,
            speed: 1.0,
            mode: ControlMode::FullInfo,
            params: ControllerParams::full_info(k_w).unwrap(),
        }
    }

    fn rolling_target() -> TargetSpec {
        let dir = UnitVec3::new(Vec3::new(-1.0, 1.0, 1.0)).unwrap();
        TargetSpec {
            mode: TargetMode::FullInfo,
            ra0: frame_from_direction_default(&dir),
            omega_known: RateFn::Constant(Vec3::new(PI, 0.0, 0.0)),
            omega_unknown: RateFn::Zero,
            events: Vec::new(),
            roll_reference: None,
        }
    }

    fn basic_config(t_end: f64, robots: Vec<RobotConfig>, kind: ScenarioKind) -> SimConfig {
        SimConfig {
            name: "test".into(),
            dt: 1e-3,
            t_end,
            seed: 7,
            drift_t0: 0.0,
            robots,
            kind,
        }
    }

    #[test]
    fn step_zero_rate_is_a_straight_line() {
        let r0 = exp_so3(&Vec3::new(0.1, 0.2, -0.3));
        let mut s = RobotState {
            p: Vec3::zeros(),
            r: r0,
            v: Vec3::new(2.0, 0.0, 0.0),
        };
        for _ in 0..100 {
            s = step(&s, &SkewMat3::zero(), 0.01);
        }
        let expect = r0 * Vec3::new(2.0, 0.0, 0.0);
        assert!((s.p - expect).norm() < 1e-12);
        assert!((s.r.matrix() - r0.matrix()).norm() < 1e-13);
    }

    #[test]
    fn step_constant_rate_matches_group_exponential() {
        let w = Vec3::new(0.3, -0.7, 0.2);
        let mut s = RobotState {
            p: Vec3::zeros(),
            r: Rotation3::identity(),
            v: Vec3::zeros(),
        };
        let dt = 1e-3;
        let n = 1000;
        for _ in 0..n {
            s = step(&s, &hat(&w), dt);
        }
        let expect = exp_so3(&(w * (n as f64 * dt)));
        assert!((s.r.matrix() - expect.matrix()).norm() < 1e-12);
    }

    #[test]
    fn step_position_is_second_order_on_circles() {
        // omega = e_z, v = e_x from identity: p(t) = (sin t, 1 - cos t, 0).
        let closed = |t: f64| Vec3::new(t.sin(), 1.0 - t.cos(), 0.0);
        let run = |dt: f64| -> f64 {
            let mut s = RobotState {
                p: Vec3::zeros(),
                r: Rotation3::identity(),
                v: Vec3::new(1.0, 0.0, 0.0),
            };
            let n = (std::f64::consts::TAU / dt).round() as usize;
            let mut worst = 0.0_f64;
            for i in 0..n {
                s = step(&s, &hat(&Vec3::new(0.0, 0.0, 1.0)), dt);
                worst = worst.max((s.p - closed((i + 1) as f64 * dt)).norm());
            }
            worst
        };
        let e1 = run(1e-2);
        let e2 = run(5e-3);
        assert!(
            e1 / e2 >= 3.8,
            "halving dt should quarter the error: {e1:.3e} -> {e2:.3e}"
        );
    }

    #[test]
    fn step_preserves_speed_exactly() {
        let mut s = RobotState {
            p: Vec3::zeros(),
            r: exp_so3(&Vec3::new(0.4, 0.0, 1.0)),
            v: Vec3::new(1.5, 0.0, 0.0),
        };
        let dt = 1e-3;
        for i in 0..500 {
            let w = Vec3::new((i as f64).sin(), 0.5, -0.3);
            let next = step(&s, &hat(&w), dt);
            let speed = (next.p - s.p).norm() / dt;
            assert_abs_diff_eq!(speed, 1.5, epsilon = 1e-12);
            s = next;
        }
    }

    #[test]
    fn step_repair_keeps_the_manifold() {
        let mut s = RobotState {
            p: Vec3::zeros(),
            r: Rotation3::identity(),
            v: Vec3::new(1.0, 0.0, 0.0),
        };
        let dt = 1e-3;
        let mut worst = 0.0_f64;
        for i in 0..10_000 {
            let w = Vec3::new((0.1 * i as f64).sin(), (0.05 * i as f64).cos(), 0.7);
            s = step(&s, &hat(&w), dt);
            worst = worst.max(s.r.orthogonality_defect());
        }
        assert!(worst < 1e-9, "post-repair defect {worst:.3e}");

        // The same arithmetic without repair drifts, but stays below 1e-6
        // over the same horizon — repair has margin, not load.
        let mut m = *Rotation3::identity().matrix();
        let mut worst_raw = 0.0_f64;
        for i in 0..10_000 {
            let w = Vec3::new((0.1 * i as f64).sin(), (0.05 * i as f64).cos(), 0.7);
            m *= *exp_so3(&(w * dt)).matrix();
            let defect = (m.transpose() * m - Mat3::identity()).norm();
            worst_raw = worst_raw.max(defect);
        }
        assert!(worst_raw < 1e-6, "raw drift {worst_raw:.3e}");
    }

    #[test]
    fn propagate_target_roll_has_period_two() {
        let spec = rolling_target();
        let mut ra = spec.ra0;
        let dt = 1e-3;
        for i in 0..2000 {
            ra = propagate_target(&spec, &ra, i as f64 * dt, dt);
        }
        assert!((ra.matrix() - spec.ra0.matrix()).norm() < 1e-11);
    }

    #[test]
    fn propagate_target_precession_matches_closed_form() {
        // Body roll about x plus an earth-frame spin about z: the pointing
        // direction precesses exactly as x_a(t) = exp(t·w_u^) x_a(0).
        let w_u = Vec3::new(0.0, 0.0, -PI / 14.0);
        let spec = TargetSpec {
            mode: TargetMode::PartialInfo,
            omega_unknown: RateFn::Constant(w_u),
            ..rolling_target()
        };
        let x0 = spec.ra0.column(0);
        let mut ra = spec.ra0;
        let dt = 1e-3;
        let n = 14_000;
        for i in 0..n {
            ra = propagate_target(&spec, &ra, i as f64 * dt, dt);
        }
        let t = n as f64 * dt;
        let expect = exp_so3(&(w_u * t)) * x0;
        assert!(
            (ra.column(0) - expect).norm() < 1e-9,
            "precession error {:.3e}",
            (ra.column(0) - expect).norm()
        );
    }

    #[test]
    fn run_zero_initial_error_stays_aligned() {
        let spec = rolling_target();
        let tau0 = log_so3(&spec.ra0).tau;
        let config = basic_config(
            2.0,
            vec![full_info_robot(1.0, Some(tau0))],
            ScenarioKind::Attitude3d(spec),
        );
        let traj = run(&config).unwrap();
        let worst = traj.robots[0].mu.iter().fold(0.0_f64, |a, &b| a.max(b));
        assert!(worst < 1e-9, "max mu {worst:.3e}");
    }

    #[test]
    fn run_is_bitwise_deterministic() {
        let config = basic_config(
            1.0,
            vec![full_info_robot(1.0, None), full_info_robot(1.0, None)],
            ScenarioKind::Attitude3d(rolling_target()),
        );
        let a = run(&config).unwrap();
        let b = run(&config).unwrap();
        assert_eq!(a.times.len(), b.times.len());
        for (ra, rb) in a.robots.iter().zip(b.robots.iter()) {
            for k in 0..ra.p.len() {
                assert_eq!(ra.p[k], rb.p[k]);
                assert_eq!(ra.r[k].matrix(), rb.r[k].matrix());
                assert_eq!(ra.mu[k].to_bits(), rb.mu[k].to_bits());
                assert_eq!(ra.omega[k], rb.omega[k]);
            }
        }
        for (pa, pb) in a.pairs.iter().zip(b.pairs.iter()) {
            for k in 0..pa.dist.len() {
                assert_eq!(pa.dist[k].to_bits(), pb.dist[k].to_bits());
                assert_eq!(pa.drift[k].to_bits(), pb.drift[k].to_bits());
            }
        }
    }

    #[test]
    fn run_row_count_and_uniform_grid() {
        let config = basic_config(
            0.5,
            vec![full_info_robot(1.0, None)],
            ScenarioKind::Attitude3d(rolling_target()),
        );
        let traj = run(&config).unwrap();
        assert_eq!(traj.times.len(), 501);
        assert_eq!(traj.robots[0].p.len(), 501);
        for k in 1..traj.times.len() {
            assert_abs_diff_eq!(traj.times[k] - traj.times[k - 1], 1e-3, epsilon = 1e-12);
        }
    }

    #[test]
    fn run_applies_events_at_the_boundary() {
        let mut spec = rolling_target();
        spec.events.push(TargetEvent {
            time: 1.0,
            direction: Vec3::new(1.0, 0.0, 0.0),
        });
        let config = basic_config(
            2.0,
            vec![full_info_robot(1.0, None)],
            ScenarioKind::Attitude3d(spec),
        );
        let traj = run(&config).unwrap();
        let i_ev = traj.times.iter().position(|&t| t >= 1.0 - 1e-9).unwrap();
        // Error decays up to the switch, jumps at it, then decays again.
        assert!(traj.robots[0].mu[i_ev] > traj.robots[0].mu[i_ev - 1]);
        let last = *traj.robots[0].mu.last().unwrap();
        assert!(last < traj.robots[0].mu[i_ev]);
    }

    #[test]
    fn run_nudges_pi_branch_initial_error() {
        let spec = rolling_target();
        // Initial attitude exactly half a turn from the reference.
        let flip = spec.ra0 * exp_so3(&Vec3::new(0.0, 0.0, PI));
        let tau0 = log_so3(&flip).tau;
        let config = basic_config(
            3.0,
            vec![full_info_robot(1.0, Some(tau0))],
            ScenarioKind::Attitude3d(spec),
        );
        let traj = run(&config).unwrap();
        assert!(!traj.robots[0].at_pi[0], "nudge must exit the branch band");
        let mu0 = traj.robots[0].mu[0];
        let last = *traj.robots[0].mu.last().unwrap();
        assert!(last < mu0 * 0.1, "error must decay after the nudge");
    }

    #[test]
    fn run_full_info_error_is_monotone_and_off_branch() {
        let config = basic_config(
            4.0,
            vec![full_info_robot(1.0, None)],
            ScenarioKind::Attitude3d(rolling_target()),
        );
        let traj = run(&config).unwrap();
        let mu = &traj.robots[0].mu;
        for k in 1..mu.len() {
            assert!(mu[k] <= mu[k - 1] + 1e-12, "mu must not increase");
        }
        assert!(traj.robots[0].at_pi.iter().all(|&b| !b));
    }

    fn partial_robot(omega_d: f64, mu_star: f64) -> RobotConfig {
        RobotConfig {
            position: None,
            attitude: None,
            speed: 0.5,
            mode: ControlMode::PartialInfo,
            params: ControllerParams::from_bound(omega_d, mu_star, mu_star).unwrap(),
        }
    }

    fn partial_target(w_u: Vec3) -> TargetSpec {
        TargetSpec {
            mode: TargetMode::PartialInfo,
            omega_unknown: RateFn::Constant(w_u),
            ..rolling_target()
        }
    }

    #[test]
    fn run_controllers_are_blind_to_the_unknown_rate() {
        let w_d = PI / 14.0;
        let base = Vec3::new(0.0, 0.0, -w_d);
        let dt = 1e-3;

        let mk = |unknown: RateFn| SimConfig {
            name: "blind".into(),
            dt,
            t_end: 1.0,
            seed: 3,
            drift_t0: 0.0,
            robots: vec![partial_robot(w_d, 0.4)],
            kind: ScenarioKind::Attitude3d(TargetSpec {
                omega_unknown: unknown,
                ..partial_target(base)
            }),
        };

        // Same values on the sample grid, garbage elsewhere: bit-identical run.
        let a = run(&mk(RateFn::Constant(base))).unwrap();
        let tricky = RateFn::Custom(Arc::new(move |t: f64| {
            let steps = t / dt;
            if (steps - steps.round()).abs() < 1e-9 {
                base
            } else {
                Vec3::new(9.9, -9.9, 9.9)
            }
        }));
        let b = run(&mk(tricky)).unwrap();
        for k in 0..a.times.len() {
            assert_eq!(a.robots[0].omega[k], b.robots[0].omega[k]);
            assert_eq!(a.robots[0].p[k], b.robots[0].p[k]);
        }

        // Different values: trajectories diverge, but the first control is
        // computed before the unknown rate can influence anything — if the
        // controller read it, this would differ.
        let c = run(&mk(RateFn::Constant(base * 0.5))).unwrap();
        assert_eq!(a.robots[0].omega[0], c.robots[0].omega[0]);
        assert!(a.robots[0].omega.last().unwrap() != c.robots[0].omega.last().unwrap());
    }

    #[test]
    fn run_rejects_unknown_rate_beyond_bound() {
        let w_d = PI / 14.0;
        let config = basic_config(
            1.0,
            vec![partial_robot(w_d, 0.4)],
            ScenarioKind::Attitude3d(partial_target(Vec3::new(0.0, 0.0, -2.0 * w_d))),
        );
        match run(&config) {
            Err(SimError::Config(msg)) => assert!(msg.contains("exceeds the designed bound")),
            other => panic!("expected config error, got {other:?}"),
        }
    }

    #[test]
    fn validate_rejects_inconsistent_modes() {
        // Partial-info robot against full-info target.
        let config = basic_config(
            1.0,
            vec![partial_robot(0.3, 0.4)],
            ScenarioKind::Attitude3d(rolling_target()),
        );
        assert!(matches!(run(&config), Err(SimError::Config(_))));

        // Coarse dt against a stiff gain.
        let mut config = basic_config(
            10.0,
            vec![full_info_robot(5.0, None)],
            ScenarioKind::Attitude3d(rolling_target()),
        );
        config.dt = 0.1;
        assert!(matches!(config.validate(), Err(SimError::Config(_))));

        // Planar gains must agree.
        let mut r1 = full_info_robot(1.0, None);
        let mut r2 = full_info_robot(2.0, None);
        r1.speed = 1.0;
        r2.speed = 1.0;
        let config = basic_config(
            1.0,
            vec![r1, r2],
            ScenarioKind::Planar(PlanarSpec {
                field_rate: 0.3,
                field_heading0: 0.0,
            }),
        );
        assert!(matches!(config.validate(), Err(SimError::Config(_))));
    }

    #[test]
    fn pairwise_metrics_of_identical_robots_vanish() {
        let spec = rolling_target();
        let tau0 = log_so3(&(spec.ra0 * exp_so3(&Vec3::new(0.2, 0.4, 0.1)))).tau;
        let mut r1 = full_info_robot(1.0, Some(tau0));
        let mut r2 = full_info_robot(1.0, Some(tau0));
        r1.position = Some(Vec3::zeros());
        r2.position = Some(Vec3::new(3.0, -1.0, 2.0));
        let config = basic_config(1.0, vec![r1, r2], ScenarioKind::Attitude3d(spec));
        let traj = run(&config).unwrap();
        let pair = &traj.pairs[0];
        // Same attitude history: no separation growth, no drift.
        assert!(pair.dist.iter().all(|&d| d < 1e-9));
        assert!(pair.drift.iter().all(|&d| d < 1e-9));
    }

    #[test]
    fn check_bounds_fixed_target_pair() {
        let dir = UnitVec3::new(Vec3::new(0.0, 1.0, 0.0)).unwrap();
        let spec = TargetSpec::fixed(frame_from_direction_default(&dir));
        let config = SimConfig {
            name: "fixed-pair".into(),
            dt: 1e-3,
            t_end: 10.0,
            seed: 11,
            drift_t0: 0.0,
            robots: vec![full_info_robot(1.0, None), full_info_robot(1.0, None)],
            kind: ScenarioKind::Attitude3d(spec),
        };
        let traj = run(&config).unwrap();
        let reports = check_bounds(&traj, &config);
        assert_eq!(reports.len(), 1);
        let rep = &reports[0];
        assert_eq!(rep.kind, BoundKind::FixedTargetDrift);
        assert_abs_diff_eq!(rep.theoretical, 2.0 * 3.0_f64.sqrt() * PI, epsilon = 1e-12);
        assert!(
            rep.satisfied,
            "observed {:.3} vs bound {:.3}",
            rep.observed, rep.theoretical
        );
        assert!(rep.observed > 0.0);
    }

    #[test]
    fn gradient_field_target_points_at_source() {
        let bowl = QuadraticBowl {
            source: Vec3::new(1.0, 2.0, 3.0),
        };
        let p = Vec3::new(10.0, 2.0, 3.0);
        let dir = gradient_field_target(&bowl, &p).unwrap();
        assert!((dir.as_vec() - Vec3::new(-1.0, 0.0, 0.0)).norm() < 1e-12);
        assert!(matches!(
            gradient_field_target(&bowl, &bowl.source),
            Err(SimError::ZeroGradient)
        ));
    }

    #[test]
    fn gradient_field_run_approaches_the_source() {
        let field = FieldSpec {
            source: Vec3::zeros(),
            omega_known: RateFn::Constant(Vec3::new(PI, 0.0, 0.0)),
            position_shell: Some((40.0, 50.0)),
        };
        let robots = vec![
            RobotConfig {
                position: None,
                attitude: None,
                speed: 5.0,
                mode: ControlMode::PartialInfo,
                params: ControllerParams::from_bound(PI / 4.0, 0.4, 0.4).unwrap(),
            };
            3
        ];
        let config = SimConfig {
            name: "bowl".into(),
            dt: 1e-3,
            t_end: 6.0,
            seed: 5,
            drift_t0: 0.0,
            robots,
            kind: ScenarioKind::GradientField(field),
        };
        let traj = run(&config).unwrap();
        // After the alignment transient every robot closes on the source
        // monotonically.
        let settle = traj
            .times
            .iter()
            .position(|&t| {
                let k = (t / config.dt).round() as usize;
                traj.robots.iter().all(|r| r.mu[k] <= 0.4)
            })
            .expect("robots align within the run");
        for r in &traj.robots {
            let d0 = r.p[settle].norm();
            let d_end = r.p.last().unwrap().norm();
            assert!(d_end < d0, "distance must shrink: {d0:.1} -> {d_end:.1}");
            for k in (settle + 1)..traj.times.len() {
                assert!(
                    r.p[k].norm() <= r.p[k - 1].norm() + 1e-9,
                    "approach must be monotone after alignment"
                );
            }
        }
    }

    #[test]
    fn planar_run_decays_exactly_and_respects_bound() {
        let mk_robot = |psi0: f64, p: Vec3| RobotConfig {
            position: Some(p),
            attitude: Some(Vec3::new(0.0, 0.0, psi0)),
            speed: 1.0,
            mode: ControlMode::FullInfo,
            params: ControllerParams::full_info(1.0).unwrap(),
        };
        let planar = PlanarSpec {
            field_rate: 0.3,
            field_heading0: 0.2,
        };
        let config = SimConfig {
            name: "planar".into(),
            dt: 1e-3,
            t_end: 12.0,
            seed: 1,
            drift_t0: 0.0,
            robots: vec![
                mk_robot(1.3, Vec3::zeros()),
                mk_robot(-0.9, Vec3::new(2.0, 0.0, 0.0)),
            ],
            kind: ScenarioKind::Planar(planar),
        };
        let traj = run(&config).unwrap();

        // Pairwise heading separation decays exactly as the linear ODE says:
        // dist_so3/sqrt(2) = |delta_ij(0)|·e^(-k_w t).
        let pair = &traj.pairs[0];
        let d0 = pair.dist[0] / SQRT_2;
        for (k, t) in traj.times.iter().enumerate() {
            let expect = d0 * (-t).exp();
            let got = pair.dist[k] / SQRT_2;
            assert!(
                (got - expect).abs() <= 1e-9 * expect.max(1e-12),
                "t={t}: got {got:.12e} expect {expect:.12e}"
            );
        }

        // Recorded control matches the planar law.
        let delta0 = 1.3 - 0.2;
        for (k, t) in traj.times.iter().enumerate().take(100) {
            let delta = delta0 * (-t).exp();
            let expect = crate::control::control_2d(delta, 1.0, 0.3);
            assert_abs_diff_eq!(traj.robots[0].omega[k][2], expect, epsilon = 1e-12);
        }

        let reports = check_bounds(&traj, &config);
        assert_eq!(reports.len(), 1);
        assert_eq!(reports[0].kind, BoundKind::PlanarDrift);
        assert!(reports[0].satisfied);
    }

    #[test]
    fn fit_decay_rate_recovers_synthetic_rates() {
        let times: Vec<f64> = (0..5000).map(|i| i as f64 * 1e-3).collect();
        let values: Vec<f64> = times.iter().map(|t| 3.0 * (-1.7 * t).exp()).collect();
        let fit = fit_decay_rate(&times, &values).unwrap();
        assert_abs_diff_eq!(fit.rate, 1.7, epsilon = 1e-10);

        // A floor does not poison the fit: floored samples fall outside the
        // window.
        let noisy: Vec<f64> = times
            .iter()
            .map(|t| (3.0 * (-1.7 * t).exp()).max(1e-6))
            .collect();
        let fit = fit_decay_rate(&times, &noisy).unwrap();
        assert!((fit.rate - 1.7).abs() < 1e-3);

        // Flat series: no window.
        let flat = vec![0.0; times.len()];
        assert!(fit_decay_rate(&times, &flat).is_none());
    }
}

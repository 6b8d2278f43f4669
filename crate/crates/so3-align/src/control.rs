//! Attitude-error bookkeeping and angular-velocity control laws.
//!
//! A robot with attitude `R` tracks a (possibly moving) reference attitude
//! `R_a`. The error is `R_e = R_aᵀ R`, measured two ways:
//!
//! * `μ = ‖log R_e‖_F = √2·θ(R_e)` — full attitude error, Frobenius scale;
//! * `δ = arccos(xᵀ m_d)` — pointing error between the body x-axis and the
//!   reference direction, angle scale.
//!
//! The two scales are related by `δ ≤ θ = μ/√2`: aligning the whole frame
//! is strictly stronger than aligning the pointing direction.
//!
//! Control laws (body angular velocity, applied as `Ṙ = R Ω^∧`):
//!
//! * full information: `Ω = −k_w·log(R_e) + Ad_{R_eᵀ}(Ω_a)`, which cancels
//!   the reference motion exactly and gives `τ̇ = −k_w τ` for
//!   `τ = log R_e` — uniform exponential convergence at rate `k_w`;
//! * partial information: the same shape fed only the *known* part
//!   `Ω_a^k` of the reference velocity. With the gain from
//!   [`gain_from_bound`] the error enters and stays in `μ ≤ μ*` provided
//!   the unknown part is bounded by `ω_d`;
//! * planar restriction: headings on a circle, `ω = −k_w δ + ω_d`.

use thiserror::Error;

use crate::so3::{adjoint, dist_s2, hat, log_so3, LogResult, Rotation3, SkewMat3, UnitVec3, Vec3};

/// Errors from controller construction and evaluation.
#[derive(Debug, Error)]
pub enum ControlError {
    /// The error rotation sits on the logarithm branch point; the
    /// proportional term is undefined there. Simulations perturb the
    /// initial condition instead of propagating this.
    #[error("attitude error is on the pi branch; control is undefined")]
    AtPiBranch,
    /// Gain or bound parameters violate their constraints.
    #[error("invalid controller bound parameters: {reason}")]
    BadBound { reason: String },
    /// The requested frame is degenerate (roll reference parallel to the
    /// pointing direction).
    #[error("roll reference is parallel to the pointing direction (sin = {sine:.3e})")]
    DegenerateFrame { sine: f64 },
}

/// Gains and bounds for the tracking laws.
///
/// `k_w` is the proportional gain; `omega_d` bounds the unknown part of the
/// reference angular velocity; `mu_star` (Frobenius scale) and `delta_star`
/// (angle scale) are the target residual sets, with `mu_star ≤ delta_star`
/// so that containment in the μ-ball implies containment in the δ-cone.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ControllerParams {
    pub k_w: f64,
    pub mu_star: f64,
    pub delta_star: f64,
    pub omega_d: f64,
}

impl ControllerParams {
    /// Full-information controller: only the gain matters; the bound
    /// fields are set to their vacuous values.
    pub fn full_info(k_w: f64) -> Result<Self, ControlError> {
        let p = Self {
            k_w,
            mu_star: std::f64::consts::PI,
            delta_star: std::f64::consts::PI,
            omega_d: 0.0,
        };
        p.validate()?;
        Ok(p)
    }

    /// Partial-information controller with the gain chosen from the
    /// disturbance bound: `k_w = √2·ω_d / μ*`.
    pub fn from_bound(omega_d: f64, mu_star: f64, delta_star: f64) -> Result<Self, ControlError> {
        let k_w = gain_from_bound(omega_d, mu_star)?;
        let p = Self {
            k_w,
            mu_star,
            delta_star,
            omega_d,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), ControlError> {
        let fail = |reason: String| Err(ControlError::BadBound { reason });
        if self.k_w <= 0.0 || !self.k_w.is_finite() {
            return fail(format!("gain k_w must be positive, got {}", self.k_w));
        }
        if self.mu_star <= 0.0 || !self.mu_star.is_finite() {
            return fail(format!("mu_star must be positive, got {}", self.mu_star));
        }
        if self.delta_star <= 0.0 || !self.delta_star.is_finite() {
            return fail(format!(
                "delta_star must be positive, got {}",
                self.delta_star
            ));
        }
        if self.mu_star > self.delta_star {
            return fail(format!(
                "mu_star must not exceed delta_star (mu* <= delta*), got mu_star = {} > delta_star = {}",
                self.mu_star, self.delta_star
            ));
        }
        if self.omega_d < 0.0 || !self.omega_d.is_finite() {
            return fail(format!("omega_d must be nonnegative, got {}", self.omega_d));
        }
        Ok(())
    }
}

/// Attitude error of `r` relative to the reference `ra`.
#[derive(Clone, Copy, Debug)]
pub struct AttitudeError {
    /// Error rotation `R_e = R_aᵀ R`.
    pub re: Rotation3,
    /// Logarithm of `re`, including branch diagnostics.
    pub log_re: LogResult,
    /// `‖log R_e‖_F` (Frobenius scale, `= √2·θ`).
    pub mu: f64,
    /// Pointing error `arccos(xᵀ x_a)` between first columns (angle scale).
    pub delta: f64,
}

/// Computes the error rotation and both error measures.
///
/// If `R_e` lies on the π branch the result is still produced (the branch
/// flag rides along in `log_re`); callers that need the proportional term
/// must check it.
pub fn attitude_error(ra: &Rotation3, r: &Rotation3) -> AttitudeError {
    let re = ra.transpose() * *r;
    let log_re = log_so3(&re);
    let mu = std::f64::consts::SQRT_2 * log_re.theta;
    let delta = dist_s2(&r.x_axis(), &ra.x_axis());
    AttitudeError {
        re,
        log_re,
        mu,
        delta,
    }
}

/// Error angular velocity `Ω_e = Ω − Ad_{R_eᵀ}(Ω_a)`: the part of the body
/// velocity not explained by the moving reference.
pub fn error_velocity(omega: &SkewMat3, re: &Rotation3, omega_a: &SkewMat3) -> SkewMat3 {
    *omega - adjoint(&re.transpose(), omega_a)
}

/// Full-information tracking law: `Ω = −k_w·log(R_e) + Ad_{R_eᵀ}(Ω_a)`.
///
/// The feedforward term transports the reference velocity into the body
/// frame and cancels it exactly, leaving `τ̇ = −k_w·τ` for `τ = log R_e`;
/// the closed loop converges at exactly rate `k_w` from any error off the
/// branch point.
pub fn control_full_info(
    re: &Rotation3,
    omega_a: &SkewMat3,
    k_w: f64,
) -> Result<SkewMat3, ControlError> {
    let log_re = log_so3(re);
    if log_re.at_pi_branch {
        return Err(ControlError::AtPiBranch);
    }
    Ok(hat(&(log_re.tau * -k_w)) + adjoint(&re.transpose(), omega_a))
}

/// Partial-information tracking law: identical shape to
/// [`control_full_info`] but fed only the *known* component of the
/// reference velocity. The unknown component never appears in the
/// signature — the information pattern is enforced by the interface.
pub fn control_partial_info(
    re: &Rotation3,
    omega_a_known: &SkewMat3,
    k_w: f64,
) -> Result<SkewMat3, ControlError> {
    control_full_info(re, omega_a_known, k_w)
}

/// Gain that guarantees the ultimate bound `μ ≤ μ*` against unknown
/// reference rates up to `ω_d`: `k_w = √2·ω_d / μ*`.
pub fn gain_from_bound(omega_d: f64, mu_star: f64) -> Result<f64, ControlError> {
    if mu_star <= 0.0 || !mu_star.is_finite() {
        return Err(ControlError::BadBound {
            reason: format!("mu_star must be positive, got {mu_star}"),
        });
    }
    if omega_d < 0.0 || !omega_d.is_finite() {
        return Err(ControlError::BadBound {
            reason: format!("omega_d must be nonnegative, got {omega_d}"),
        });
    }
    Ok(std::f64::consts::SQRT_2 * omega_d / mu_star)
}

/// Builds the reference frame with first column `m_d`: the roll reference
/// is projected off `m_d` to give the second column, the third closes the
/// right-handed triad.
pub fn frame_from_direction(
    m_d: &UnitVec3,
    roll_reference: &UnitVec3,
) -> Result<Rotation3, ControlError> {
    let m = *m_d.as_vec();
    let r = *roll_reference.as_vec();
    let y_raw = r - m * m.dot(&r);
    let sine = y_raw.norm();
    if sine < 1e-6 {
        return Err(ControlError::DegenerateFrame { sine });
    }
    let y = y_raw / sine;
    let z = m.cross(&y);
    let mat = crate::so3::Mat3::from_columns(&[m, y, z]);
    // Columns are orthonormal by construction; normalize away the last ulps.
    Ok(crate::so3::orthonormalize(&mat).expect("triad construction yields a rotation"))
}

/// [`frame_from_direction`] with the default roll reference: world z, or
/// world y when `m_d` is within 1e-6 of ±z.
pub fn frame_from_direction_default(m_d: &UnitVec3) -> Rotation3 {
    let z = UnitVec3::new(Vec3::new(0.0, 0.0, 1.0)).expect("unit z");
    match frame_from_direction(m_d, &z) {
        Ok(r) => r,
        Err(_) => {
            let y = UnitVec3::new(Vec3::new(0.0, 1.0, 0.0)).expect("unit y");
            frame_from_direction(m_d, &y).expect("m_d cannot be parallel to both y and z")
        }
    }
}

/// Planar restriction of the tracking law for unicycle headings:
/// `ω = −k_w·δ + ω_d_ff`, where `δ` is the signed heading error and
/// `ω_d_ff` the feedforward (the field's own rotation rate).
pub fn control_2d(delta: f64, k_w: f64, omega_d_ff: f64) -> f64 {
    -k_w * delta + omega_d_ff
}

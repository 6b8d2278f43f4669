//! The differential of the logarithm map.
//!
//! Along a trajectory `R(t)` with body velocity `Ω = R⁻¹Ṙ`, the rotation
//! vector `τ = log R` evolves as `τ̇^∧ = dlog_τ(Ω)`. The closed form is
//!
//! `dlog_τ(Ω) = Ω + ½[τ^∧, Ω] + ((1 − α(θ))/θ²)·[τ^∧, [τ^∧, Ω]]`,
//! `α(θ) = (θ/2)·cot(θ/2)`,
//!
//! and the same operator has a Bernoulli-number series
//! `Σ_n (B_n/n!)·ad_{τ^∧}^n(Ω)` that converges for `θ < 2π`. The example
//! checks the closed form against the series and against a centered finite
//! difference of `log(exp((t)·…))` along an actual curve.
//!
//! Run with `cargo run --example dlog_operator`.

use so3_align::so3::{dlog, dlog_series, exp_so3, hat, log_so3, vee, Vec3};

fn main() {
    let tau = Vec3::new(0.8, -0.3, 1.1);
    let omega = Vec3::new(-0.4, 0.9, 0.2);

    // Closed form vs the Bernoulli series (31 terms).
    let closed = dlog(&tau, &hat(&omega)).expect("θ < π");
    let series = dlog_series(&tau, &hat(&omega), 31);
    println!("closed form: {:?}", vee(&closed));
    println!("series:      {:?}", vee(&series));
    println!("difference = {:.2e}", (vee(&closed) - vee(&series)).norm());

    // Finite-difference check along the curve R(t) = R₀·exp(t·ω^∧), whose
    // body velocity is the constant ω.
    let r0 = exp_so3(&tau);
    let h = 1e-5;
    let tau_p = log_so3(&(r0 * exp_so3(&(omega * h)))).tau;
    let tau_m = log_so3(&(r0 * exp_so3(&(omega * -h)))).tau;
    let fd = (tau_p - tau_m) / (2.0 * h);
    println!("\nd/dt log R(t) at t = 0:");
    println!("dlog_τ(ω):        {:?}", vee(&closed));
    println!("central difference: {:?}", fd);
    println!(
        "difference = {:.2e}  (O(h²) = O(1e-10))",
        (vee(&closed) - fd).norm()
    );

    // At τ = 0 the operator is the identity: τ̇ = ω.
    let at_zero = dlog(&Vec3::zeros(), &hat(&omega)).unwrap();
    println!(
        "\ndlog_0(ω) − ω = {:.2e}  (identity at the origin)",
        (vee(&at_zero) - omega).norm()
    );

    // The inverse-direction sanity check: dlog applied to the *negative*
    // scaled error is what the tracking controller uses to reason about
    // μ̇ = −k_w·μ under the feedback law.
    let feedback = dlog(&tau, &hat(&(tau * -1.0))).unwrap();
    println!(
        "dlog_τ(−τ) + τ = {:.2e}  (radial directions are eigendirections)",
        (vee(&feedback) + tau).norm()
    );
}

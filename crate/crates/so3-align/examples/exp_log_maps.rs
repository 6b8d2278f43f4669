//! Tour of the exponential and logarithm maps on SO(3).
//!
//! `exp: so(3) → SO(3)` is Rodrigues' formula
//! `exp(τ^∧) = I + (sin θ/θ)·τ^∧ + ((1 − cos θ)/θ²)·(τ^∧)²` with `θ = ‖τ‖`;
//! `log` inverts it on `θ ∈ [0, π]` with three numerical branches: a Taylor
//! branch near `θ = 0`, the regular branch `θ = atan2(‖skew part‖, cos θ)`,
//! and an axis recovery from the symmetric part of `R` near `θ = π`, where
//! the skew part vanishes and the axis sign becomes genuinely ambiguous.
//!
//! Run with `cargo run --example exp_log_maps`.

use so3_align::so3::{exp_so3, hat, log_so3, vee, Rotation3, Vec3};

fn main() {
    // hat and vee are exact inverses: canonical components in, same out.
    let x = Vec3::new(0.3, -1.2, 0.7);
    let xh = hat(&x);
    println!("x           = {:?}", x);
    println!("vee(hat x)  = {:?}  (exact)", vee(&xh));

    // Round trip through a generic rotation.
    let tau = Vec3::new(0.9, -0.4, 1.3);
    let r = exp_so3(&tau);
    let back = log_so3(&r);
    println!("\nτ            = {:?}", tau);
    println!("log(exp τ)   = {:?}", back.tau);
    println!(
        "θ            = {:.15}  (‖τ‖ = {:.15})",
        back.theta,
        tau.norm()
    );
    println!("roundtrip err = {:.2e}", (back.tau - tau).norm());

    // Tiny angles go through the Taylor branch; the map stays smooth
    // through τ = 0 instead of dividing by a vanishing θ.
    let tiny = Vec3::new(1e-9, -2e-9, 0.5e-9);
    let r = exp_so3(&tiny);
    let back = log_so3(&r);
    println!(
        "\nsmall angle: ‖τ‖ = {:.2e}, roundtrip err = {:.2e}",
        tiny.norm(),
        (back.tau - tiny).norm()
    );

    // Near π the skew part of R is O(π − θ) and the regular formula loses
    // the axis; the π branch rebuilds it from sym(R).
    let axis = Vec3::new(2.0, -1.0, 2.0) / 3.0;
    let near_pi = axis * (std::f64::consts::PI - 1e-8);
    let back = log_so3(&exp_so3(&near_pi));
    println!(
        "\nnear π: θ = {:.12}, at_pi_branch = {}",
        back.theta, back.at_pi_branch
    );
    println!("axis err  = {:.2e}", (back.tau / back.theta - axis).norm());

    // Exactly at π both ±axis are correct (exp(π·l) = exp(−π·l)); the sign
    // convention is deterministic and the flag reports the ambiguity.
    let r_pi = exp_so3(&(axis * std::f64::consts::PI));
    let back = log_so3(&r_pi);
    println!(
        "\nat π: sign_ambiguous = {}, θ − π = {:.2e}",
        back.sign_ambiguous,
        back.theta - std::f64::consts::PI
    );
    let rebuilt = exp_so3(&back.tau);
    let err = (rebuilt.matrix() - r_pi.matrix()).norm();
    println!(
        "‖exp(log R) − R‖_F = {:.2e}  (either sign reproduces R)",
        err
    );

    // The result is always a valid rotation to machine precision.
    let defect = Rotation3::from_matrix(exp_so3(&tau).matrix())
        .map(|r| r.orthogonality_defect())
        .expect("exp lands on the group");
    println!("\northogonality defect of exp(τ): {:.2e}", defect);
}

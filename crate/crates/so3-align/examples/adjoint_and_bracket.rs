//! The adjoint action and the Lie bracket on so(3).
//!
//! `Ad_R(Ω) = R·Ω·Rᵀ` conjugates an algebra element into another frame;
//! downstairs it is plain matrix–vector action, `vee(Ad_R(Ω)) = R·vee(Ω)`.
//! The bracket `[A, B] = AB − BA` is the cross product of the vee images,
//! and the two are tied together by `Ad_{exp a^∧} = Σ_m ad_{a^∧}^m / m!`
//! with `ad_A(B) = [A, B]` — the matrix exponential of the little adjoint.
//!
//! Run with `cargo run --example adjoint_and_bracket`.

use so3_align::so3::{ad_series, adjoint, exp_so3, hat, lie_bracket, vee, Vec3};

fn main() {
    let a = Vec3::new(0.4, -0.9, 0.3);
    let b = Vec3::new(-0.2, 0.5, 1.1);
    let r = exp_so3(&a);

    // Conjugation upstairs is rotation downstairs.
    let conj = adjoint(&r, &hat(&b));
    println!("vee(R·b^∧·Rᵀ) = {:?}", vee(&conj));
    println!("R·b           = {:?}", r * b);
    println!("difference    = {:.2e}", (vee(&conj) - r * b).norm());

    // The bracket is the cross product.
    let br = lie_bracket(&hat(&a), &hat(&b));
    println!("\nvee([a^∧, b^∧]) = {:?}", vee(&br));
    println!("a × b           = {:?}", a.cross(&b));
    println!("difference      = {:.2e}", (vee(&br) - a.cross(&b)).norm());

    // Ad_{exp a^∧} as the exponential series of ad_{a^∧}: truncating at 20
    // terms the remainder is far below double precision for ‖a‖ ≲ 1.5.
    let series = ad_series(&hat(&a), &hat(&b), 20);
    let exact = adjoint(&exp_so3(&a), &hat(&b));
    println!("\nAd_(exp a) b via conjugation: {:?}", vee(&exact));
    println!("Σ ad^m/m! (20 terms):         {:?}", vee(&series));
    println!("difference = {:.2e}", (vee(&series) - vee(&exact)).norm());

    // Skew-adjointness of ad: <[a,b], c> + <b, [a,c]> = 0, the algebra
    // seen through the Frobenius inner product.
    let c = Vec3::new(0.7, 0.2, -0.6);
    let lhs = vee(&lie_bracket(&hat(&a), &hat(&b))).dot(&c);
    let rhs = b.dot(&vee(&lie_bracket(&hat(&a), &hat(&c))));
    println!(
        "\n<[a,b], c> + <b, [a,c]> = {:.2e}  (skew-adjoint)",
        lhs + rhs
    );
}

//! Geodesic distances on SO(3) and on the sphere S².
//!
//! The rotation-group metric is the Frobenius norm of the relative
//! logarithm, `d(R_a, R_b) = ‖log(R_aᵀ R_b)‖_F = √2·θ`, so its range is
//! `[0, √2·π]`. It is bi-invariant: rotating both arguments by the same
//! rotation — on either side — leaves the distance unchanged. The sphere
//! metric `d(x, y) = atan2(‖x × y‖, xᵀy)` is the pointing-error angle used
//! by the alignment controllers.
//!
//! Run with `cargo run --example geodesic_distances`.

use so3_align::so3::{dist_s2, dist_so3, exp_so3, UnitVec3, Vec3};

fn main() {
    let ra = exp_so3(&Vec3::new(0.2, -0.7, 0.4));
    let rb = exp_so3(&Vec3::new(-0.5, 0.1, 0.9));
    let g = exp_so3(&Vec3::new(1.1, 0.3, -0.8));

    let d = dist_so3(&ra, &rb);
    println!("d(R_a, R_b)        = {:.15}", d);
    println!(
        "d(G·R_a, G·R_b)    = {:.15}  (left invariance)",
        dist_so3(&(g * ra), &(g * rb))
    );
    println!(
        "d(R_a·G, R_b·G)    = {:.15}  (right invariance)",
        dist_so3(&(ra * g), &(rb * g))
    );

    // The √2 comes from the Frobenius norm of a skew matrix:
    // ‖τ^∧‖_F = √2‖τ‖, so a rotation by angle θ sits at distance √2·θ.
    let theta = 1.234;
    let r = exp_so3(&(Vec3::new(0.0, 0.0, 1.0) * theta));
    println!("\nrotation by θ = {theta}:");
    println!(
        "d(I, R) = {:.15}",
        dist_so3(&so3_align::so3::Rotation3::identity(), &r)
    );
    println!("√2·θ    = {:.15}", std::f64::consts::SQRT_2 * theta);

    // Maximum distance: a half turn, √2·π.
    let half_turn = exp_so3(&(Vec3::new(1.0, 0.0, 0.0) * std::f64::consts::PI));
    println!(
        "\nd(I, half turn) = {:.15}",
        dist_so3(&so3_align::so3::Rotation3::identity(), &half_turn)
    );
    println!(
        "√2·π            = {:.15}",
        std::f64::consts::SQRT_2 * std::f64::consts::PI
    );

    // Triangle inequality on a random triple.
    let rc = exp_so3(&Vec3::new(0.6, 0.6, -0.2));
    let (ab, bc, ac) = (dist_so3(&ra, &rb), dist_so3(&rb, &rc), dist_so3(&ra, &rc));
    println!(
        "\ntriangle: d(a,c) = {:.6} ≤ d(a,b) + d(b,c) = {:.6}",
        ac,
        ab + bc
    );

    // Sphere distance: the angle subtended by two directions. The atan2
    // form stays first-order accurate at both ends of the range, where
    // acos of the dot product loses half the significant digits.
    let x = UnitVec3::new(Vec3::new(1.0, 0.0, 0.0)).unwrap();
    let y = UnitVec3::new(Vec3::new(1.0, 1e-8, 0.0)).unwrap();
    println!(
        "\nnearly parallel directions: d_S² = {:.6e}  (exact 1e-8)",
        dist_s2(&x, &y)
    );
    let z = UnitVec3::new(Vec3::new(-1.0, 1e-8, 0.0)).unwrap();
    println!(
        "nearly antipodal:           π − d_S² = {:.6e}",
        std::f64::consts::PI - dist_s2(&x, &z)
    );
}

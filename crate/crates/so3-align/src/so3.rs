//! Numerics on the rotation group SO(3) and its Lie algebra so(3).
//!
//! Conventions used throughout:
//!
//! * Rotation matrices act on column vectors, `y = R x`.
//! * `hat` maps a vector `ω ∈ R³` to the skew matrix `ω^∧` with
//!   `ω^∧ x = ω × x`; `vee` is its exact inverse.
//! * Rotation vectors `τ = θ·l` (unit axis `l`, angle `θ ∈ [0, π]`)
//!   parametrise rotations through `exp_so3`.
//! * The Frobenius norm of a skew matrix satisfies `‖ω^∧‖_F = √2·‖ω‖`,
//!   so the geodesic distance `dist_so3` carries a √2 relative to the
//!   rotation angle.
//!
//! Numerical behaviour near the branch points is part of the contract:
//!
//! | regime                  | handling                                      |
//! |-------------------------|-----------------------------------------------|
//! | `θ < 1e-4`              | 4th-order Taylor series for all coefficients  |
//! | `1e-4 ≤ θ < π − 1e-6`   | closed forms; `sin θ` taken from the skew part|
//! | `θ ≥ π − 1e-6`          | symmetric-part axis recovery, flagged result  |
//!
//! In the last regime the sign of the axis is unobservable at exactly
//! `θ = π`; [`log_so3`] resolves it from the residual skew part when that
//! is informative and otherwise applies a deterministic convention,
//! reporting which path was taken via [`LogResult`].

use std::f64::consts::PI;
use std::ops::{Add, Mul, Neg, Sub};

use thiserror::Error;

/// 3-vector of `f64`, the working currency of the crate.
pub type Vec3 = nalgebra::Vector3<f64>;
/// 3×3 matrix of `f64`.
pub type Mat3 = nalgebra::Matrix3<f64>;

/// Below this angle (radians) trigonometric coefficient ratios are
/// evaluated by their Taylor polynomials instead of the closed forms.
pub const SMALL_ANGLE_THRESHOLD: f64 = 1e-4;

/// Angles within this distance of π are treated as the logarithm branch
/// point and recovered through the symmetric part of the rotation.
pub const PI_BRANCH_THRESHOLD: f64 = 1e-6;

/// Residual skew-part norm below which the π-branch axis sign is taken
/// from the deterministic convention instead of the skew part.
const AXIS_SIGN_EPS: f64 = 1e-12;

/// Tolerance on `‖RᵀR − I‖_F` and `|det R − 1|` for accepting a matrix
/// as a rotation.
const ROTATION_TOL: f64 = 1e-9;

/// Errors from the group/algebra primitives.
#[derive(Debug, Error)]
pub enum So3Error {
    /// A matrix handed to [`SkewMat3::try_from_matrix`] was not
    /// skew-symmetric within tolerance.
    #[error("matrix is not skew-symmetric (symmetry defect {defect:.3e})")]
    NotSkew { defect: f64 },
    /// A matrix failed the rotation invariants `RᵀR = I`, `det R = 1`.
    #[error("matrix fails rotation invariants (defect {defect:.3e})")]
    NotRotation { defect: f64 },
    /// [`orthonormalize`] requires a positively oriented input.
    #[error("matrix is not orientable to a rotation (det {det:.3e})")]
    Degenerate { det: f64 },
    /// [`dlog`] is only defined on the open ball `‖τ‖ < π`.
    #[error("rotation vector magnitude {theta:.6} is outside the open ball of radius pi")]
    OutOfDomain { theta: f64 },
    /// A direction could not be normalized.
    #[error("cannot normalize a near-zero vector (norm {norm:.3e})")]
    ZeroVector { norm: f64 },
}

// ---------------------------------------------------------------------------
// Types
// ---------------------------------------------------------------------------

/// A unit vector on S², kept normalized by construction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UnitVec3(Vec3);

impl UnitVec3 {
    /// Normalizes `v`; errors if `‖v‖ ≤ 1e-9`.
    pub fn new(v: Vec3) -> Result<Self, So3Error> {
        let n = v.norm();
        if !n.is_finite() || n <= 1e-9 {
            return Err(So3Error::ZeroVector { norm: n });
        }
        Ok(Self(v / n))
    }

    /// Wraps a vector that is already unit length (rotation columns,
    /// normalized axes). Debug-checked only.
    pub(crate) fn new_unchecked(v: Vec3) -> Self {
        debug_assert!((v.norm() - 1.0).abs() < 1e-9);
        Self(v)
    }

    pub fn as_vec(&self) -> &Vec3 {
        &self.0
    }

    pub fn into_inner(self) -> Vec3 {
        self.0
    }
}

/// A skew-symmetric 3×3 matrix, `M = −Mᵀ` exactly.
///
/// Values are only created through [`hat`] (or operations that rebuild the
/// canonical components), so the skew structure holds bit-exactly, not just
/// within tolerance.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SkewMat3 {
    m: Mat3,
}

impl SkewMat3 {
    /// The zero element of so(3).
    pub fn zero() -> Self {
        Self { m: Mat3::zeros() }
    }

    /// Builds the exact skew matrix with `vee = [x, y, z]`.
    fn from_canonical(x: f64, y: f64, z: f64) -> Self {
        Self {
            m: Mat3::new(0.0, -z, y, z, 0.0, -x, -y, x, 0.0),
        }
    }

    /// Accepts a raw matrix as an element of so(3).
    ///
    /// The symmetry defect `‖M + Mᵀ‖_F` must be below `1e-9`; the stored
    /// value is rebuilt from the canonical components so the exact-skew
    /// invariant holds afterwards. A failure signals a caller bug.
    pub fn try_from_matrix(m: &Mat3) -> Result<Self, So3Error> {
        let defect = (m + m.transpose()).norm();
        if !defect.is_finite() || defect > 1e-9 {
            return Err(So3Error::NotSkew { defect });
        }
        Ok(Self::from_canonical(m[(2, 1)], m[(0, 2)], m[(1, 0)]))
    }

    /// The underlying matrix.
    pub fn matrix(&self) -> &Mat3 {
        &self.m
    }

    /// Scales by `s` (so(3) is a vector space; skewness is preserved
    /// exactly).
    pub fn scale(&self, s: f64) -> Self {
        Self { m: self.m * s }
    }
}

impl Add for SkewMat3 {
    type Output = SkewMat3;
    fn add(self, rhs: SkewMat3) -> SkewMat3 {
        SkewMat3 { m: self.m + rhs.m }
    }
}

impl Sub for SkewMat3 {
    type Output = SkewMat3;
    fn sub(self, rhs: SkewMat3) -> SkewMat3 {
        SkewMat3 { m: self.m - rhs.m }
    }
}

impl Neg for SkewMat3 {
    type Output = SkewMat3;
    fn neg(self) -> SkewMat3 {
        SkewMat3 { m: -self.m }
    }
}

/// A rotation matrix, validated to `RᵀR = I` and `det R = 1` within `1e-9`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rotation3 {
    m: Mat3,
}

impl Rotation3 {
    pub fn identity() -> Self {
        Self {
            m: Mat3::identity(),
        }
    }

    /// Validates `m` against the rotation invariants.
    pub fn from_matrix(m: &Mat3) -> Result<Self, So3Error> {
        let ortho = (m.transpose() * m - Mat3::identity()).norm();
        let det = m.determinant();
        let defect = ortho.max((det - 1.0).abs());
        if !defect.is_finite() || defect > ROTATION_TOL {
            return Err(So3Error::NotRotation { defect });
        }
        Ok(Self { m: *m })
    }

    /// For matrices that are rotations by construction (exponentials,
    /// products of rotations). Debug-checked only.
    pub(crate) fn from_matrix_unchecked(m: Mat3) -> Self {
        debug_assert!((m.transpose() * m - Mat3::identity()).norm() < 1e-6);
        Self { m }
    }

    pub fn matrix(&self) -> &Mat3 {
        &self.m
    }

    /// The group inverse; exact (entry transposition only).
    pub fn transpose(&self) -> Self {
        Self {
            m: self.m.transpose(),
        }
    }

    /// Column `i` of the matrix — the image of the `i`-th basis vector.
    pub fn column(&self, i: usize) -> Vec3 {
        self.m.column(i).into_owned()
    }

    /// First column as a unit vector: the body x-axis / pointing direction.
    pub fn x_axis(&self) -> UnitVec3 {
        UnitVec3::new_unchecked(self.column(0))
    }

    /// `‖RᵀR − I‖_F`, the orthogonality defect (0 for an exact rotation).
    pub fn orthogonality_defect(&self) -> f64 {
        (self.m.transpose() * self.m - Mat3::identity()).norm()
    }
}

impl Mul for Rotation3 {
    type Output = Rotation3;
    fn mul(self, rhs: Rotation3) -> Rotation3 {
        Rotation3::from_matrix_unchecked(self.m * rhs.m)
    }
}

impl Mul<Vec3> for Rotation3 {
    type Output = Vec3;
    fn mul(self, rhs: Vec3) -> Vec3 {
        self.m * rhs
    }
}

/// Result of [`log_so3`]: rotation vector plus branch diagnostics.
#[derive(Clone, Copy, Debug)]
pub struct LogResult {
    /// Rotation vector `τ = θ·l` with `‖τ‖ = theta`.
    pub tau: Vec3,
    /// Rotation angle `θ ∈ [0, π]`.
    pub theta: f64,
    /// `θ` is within [`PI_BRANCH_THRESHOLD`] of π; the axis came from the
    /// symmetric part of `R`.
    pub at_pi_branch: bool,
    /// The skew part was too small to orient the axis; the sign follows the
    /// deterministic convention (largest-magnitude component positive,
    /// first index winning ties). Implies `at_pi_branch`.
    pub sign_ambiguous: bool,
}

// ---------------------------------------------------------------------------
// hat / vee and the exponential map
// ---------------------------------------------------------------------------

/// The hat map `R³ → so(3)`:
///
/// ```text
///            ⎡  0  −z   y ⎤
/// [x,y,z]^∧ =⎢  z   0  −x ⎥
///            ⎣ −y   x   0 ⎦
/// ```
pub fn hat(x: &Vec3) -> SkewMat3 {
    SkewMat3::from_canonical(x[0], x[1], x[2])
}

/// The inverse of [`hat`]; exact (reads the canonical components).
pub fn vee(m: &SkewMat3) -> Vec3 {
    Vec3::new(m.m[(2, 1)], m.m[(0, 2)], m.m[(1, 0)])
}

/// Frobenius norm computed literally as `√tr(MᵀM)`.
///
/// For skew matrices this equals `√2‖vee(M)‖`, which is what puts the √2
/// between rotation angles and [`dist_so3`].
pub fn frob_norm_skew(m: &SkewMat3) -> f64 {
    (m.m.transpose() * m.m).trace().sqrt()
}

/// Rodrigues' formula: `exp(τ^∧) = I + a(θ)·τ^∧ + b(θ)·(τ^∧)²` with
/// `a = sin θ / θ`, `b = (1 − cos θ)/θ²`, `θ = ‖τ‖`.
///
/// Below [`SMALL_ANGLE_THRESHOLD`] both coefficients switch to 4th-order
/// Taylor polynomials, which keeps the map smooth through τ = 0.
pub fn exp_so3(tau: &Vec3) -> Rotation3 {
    let theta_sq = tau.norm_squared();
    let theta = theta_sq.sqrt();
    let (a, b) = if theta < SMALL_ANGLE_THRESHOLD {
        (
            1.0 - theta_sq / 6.0 + theta_sq * theta_sq / 120.0,
            0.5 - theta_sq / 24.0 + theta_sq * theta_sq / 720.0,
        )
    } else {
        (theta.sin() / theta, (1.0 - theta.cos()) / theta_sq)
    };
    let k = hat(tau);
    let k = k.matrix();
    Rotation3::from_matrix_unchecked(Mat3::identity() + k * a + (k * k) * b)
}

/// Principal logarithm of a rotation, with explicit branch handling.
///
/// The angle is `θ = arccos((tr R − 1)/2)`, evaluated as `atan2(‖w‖, (tr R
/// − 1)/2)` with `w = vee((R − Rᵀ)/2)`: for a true rotation `‖w‖ = sin θ`
/// exactly, and the two-argument form stays conditioned where `arccos`
/// alone would amplify trace rounding by `1/sin θ`. Away from the branch
/// point the rotation vector is `τ = θ·w/‖w‖`, reusing the *measured* skew
/// norm so the axis stays fully conditioned as `θ → π`.
///
/// Within [`PI_BRANCH_THRESHOLD`] of π the skew part degenerates and the
/// axis is recovered from the symmetric part: `l lᵀ = (sym(R) − cos θ·I)/(1
/// − cos θ)`, whose largest-diagonal column is `l` up to sign. The sign is
/// taken from the residual skew part when `‖w‖ > 1e-12`, otherwise by
/// convention (see [`LogResult::sign_ambiguous`]); the reported angle is
/// refined through `θ = π − arcsin ‖w‖`.
pub fn log_so3(r: &Rotation3) -> LogResult {
    let m = &r.m;
    let w = Vec3::new(
        (m[(2, 1)] - m[(1, 2)]) * 0.5,
        (m[(0, 2)] - m[(2, 0)]) * 0.5,
        (m[(1, 0)] - m[(0, 1)]) * 0.5,
    );
    let s = w.norm();
    let c = ((m.trace() - 1.0) * 0.5).clamp(-1.0, 1.0);
    let theta = s.atan2(c);

    if theta < PI - PI_BRANCH_THRESHOLD {
        let tau = if theta < SMALL_ANGLE_THRESHOLD {
            // θ/sin θ ≈ 1 + θ²/6 + 7θ⁴/360
            let t2 = theta * theta;
            w * (1.0 + t2 / 6.0 + 7.0 * t2 * t2 / 360.0)
        } else {
            w * (theta / s)
        };
        LogResult {
            tau,
            theta: tau.norm(),
            at_pi_branch: false,
            sign_ambiguous: false,
        }
    } else {
        // Axis through the (well-conditioned) outer product l·lᵀ.
        let sym = (m + m.transpose()) * 0.5;
        let ll = (sym - Mat3::identity() * c) / (1.0 - c);
        let mut j = 0;
        for i in 1..3 {
            if ll[(i, i)] > ll[(j, j)] {
                j = i;
            }
        }
        let col = ll.column(j).into_owned();
        let mut l = col / col.norm();

        let sign_ambiguous = s <= AXIS_SIGN_EPS;
        if !sign_ambiguous {
            if w.dot(&l) < 0.0 {
                l = -l;
            }
        } else {
            let mut k = 0;
            for i in 1..3 {
                if l[i].abs() > l[k].abs() {
                    k = i;
                }
            }
            if l[k] < 0.0 {
                l = -l;
            }
        }

        let theta = PI - s.min(1.0).asin();
        let tau = l * theta;
        LogResult {
            tau,
            theta: tau.norm(),
            at_pi_branch: true,
            sign_ambiguous,
        }
    }
}

// ---------------------------------------------------------------------------
// Distances
// ---------------------------------------------------------------------------

/// Geodesic distance on SO(3): `‖log(RaᵀRb)‖_F = √2·θ(RaᵀRb)`.
///
/// Symmetric and bounded by `√2·π`; the bound is attained on the cut locus,
/// where the returned [`LogResult`] flag would mark the branch (the distance
/// itself stays well defined).
pub fn dist_so3(ra: &Rotation3, rb: &Rotation3) -> f64 {
    let rel = ra.transpose() * *rb;
    std::f64::consts::SQRT_2 * log_so3(&rel).theta
}

/// Geodesic (great-circle) distance on the sphere: `arccos(xᵀy) ∈ [0, π]`,
/// evaluated as `atan2(‖x × y‖, xᵀy)` so nearly parallel (or antiparallel)
/// inputs keep full precision.
pub fn dist_s2(x: &UnitVec3, y: &UnitVec3) -> f64 {
    x.0.cross(&y.0).norm().atan2(x.0.dot(&y.0))
}

// ---------------------------------------------------------------------------
// Adjoint machinery
// ---------------------------------------------------------------------------

/// Adjoint action of the group on the algebra: `Ad_R(Ω) = R Ω Rᵀ`.
///
/// Computed as the literal conjugation and re-skewed from its canonical
/// components (the conjugation is skew to rounding; the rebuild restores
/// the exact invariant). Satisfies `vee(Ad_R(Ω)) = R·vee(Ω)`.
pub fn adjoint(r: &Rotation3, omega: &SkewMat3) -> SkewMat3 {
    let p = r.m * omega.m * r.m.transpose();
    SkewMat3::from_canonical(p[(2, 1)], p[(0, 2)], p[(1, 0)])
}

/// Adjoint action of the algebra on itself: `ad_A(B) = AB − BA`.
///
/// For hat-images this is the cross product upstairs:
/// `[a^∧, b^∧] = (a × b)^∧`.
pub fn lie_bracket(a: &SkewMat3, b: &SkewMat3) -> SkewMat3 {
    let p = a.m * b.m - b.m * a.m;
    SkewMat3::from_canonical(p[(2, 1)], p[(0, 2)], p[(1, 0)])
}

/// Truncated exponential series of the adjoint:
/// `Σ_{m=0}^{n_terms−1} ad_A^m(B)/m!`, which converges to [`adjoint`] of
/// `exp(A)` as the number of terms grows.
pub fn ad_series(a: &SkewMat3, b: &SkewMat3, n_terms: usize) -> SkewMat3 {
    let mut acc = SkewMat3::zero();
    let mut term = *b;
    for m in 0..n_terms {
        if m > 0 {
            term = lie_bracket(a, &term).scale(1.0 / m as f64);
        }
        acc = acc + term;
    }
    acc
}

// ---------------------------------------------------------------------------
// Differential of the logarithm
// ---------------------------------------------------------------------------

/// Right-trivialised differential of the logarithm at `τ`, applied to `Ω`.
///
/// Closed form on `‖τ‖ < π`:
///
/// ```text
/// dlog_τ(Ω) = Ω + ½·ad_{τ^∧}(Ω) + (1 − α(θ))/θ² · ad²_{τ^∧}(Ω),
/// α(θ) = (θ/2)·cot(θ/2)
/// ```
///
/// so that if `R(t)` has body angular velocity `Ω(t)` and `τ(t) = log R(t)`,
/// then `τ̇^∧ = dlog_τ(Ω)`. The coefficient switches to its Taylor series
/// `1/12 + θ²/720 + θ⁴/30240` below [`SMALL_ANGLE_THRESHOLD`]. When
/// `Ω = τ^∧` both brackets vanish and the identity `dlog_τ(τ^∧) = τ^∧`
/// holds exactly.
pub fn dlog(tau: &Vec3, omega: &SkewMat3) -> Result<SkewMat3, So3Error> {
    let theta_sq = tau.norm_squared();
    let theta = theta_sq.sqrt();
    if theta >= PI {
        return Err(So3Error::OutOfDomain { theta });
    }
    let c2 = if theta < SMALL_ANGLE_THRESHOLD {
        1.0 / 12.0 + theta_sq / 720.0 + theta_sq * theta_sq / 30240.0
    } else {
        let half = 0.5 * theta;
        let alpha = half * half.cos() / half.sin();
        (1.0 - alpha) / theta_sq
    };
    let t = hat(tau);
    let ad1 = lie_bracket(&t, omega);
    let ad2 = lie_bracket(&t, &ad1);
    Ok(*omega + ad1.scale(0.5) + ad2.scale(c2))
}

/// Bernoulli-series form of [`dlog`]:
/// `Σ_{n=0}^{n_terms−1} (−1)ⁿ·Bₙ/n! · ad^n_{τ^∧}(Ω)` with first-kind
/// Bernoulli numbers (`B₁ = −1/2`, so the n = 1 term is `+½·ad`).
///
/// Kept as an independent reference implementation; with ~30 terms it
/// agrees with the closed form to full precision for `‖τ‖ ≤ 2`.
pub fn dlog_series(tau: &Vec3, omega: &SkewMat3, n_terms: usize) -> SkewMat3 {
    if n_terms == 0 {
        return SkewMat3::zero();
    }
    let bern = bernoulli(n_terms - 1);
    let t = hat(tau);
    let mut acc = SkewMat3::zero();
    let mut ad_pow = *omega;
    let mut factorial = 1.0;
    for (n, &b) in bern.iter().enumerate() {
        if n > 0 {
            ad_pow = lie_bracket(&t, &ad_pow);
            factorial *= n as f64;
        }
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        let coeff = sign * b / factorial;
        if coeff != 0.0 {
            acc = acc + ad_pow.scale(coeff);
        }
    }
    acc
}

/// First-kind Bernoulli numbers `B₀..B_n` (`B₁ = −1/2`) via the
/// Akiyama–Tanigawa triangle (which natively produces the second kind;
/// only the index-1 entry differs by sign).
///
/// The triangle cancels catastrophically in floating point — around B₁₆
/// a plain `f64` run has already lost every digit — so it is evaluated in
/// exact `i128` rationals and converted at the end. The exact arithmetic
/// holds through `n = 40`, far past where series terms drop below `f64`
/// resolution; larger `n` panics rather than returning noise.
pub fn bernoulli(n: usize) -> Vec<f64> {
    assert!(
        n <= 40,
        "bernoulli: exact triangle supports n <= 40, got {n}"
    );
    let mut row = vec![Ratio::ZERO; n + 1];
    let mut out = Vec::with_capacity(n + 1);
    for m in 0..=n {
        row[m] = Ratio::new(1, m as i128 + 1);
        for j in (1..=m).rev() {
            row[j - 1] = row[j - 1].sub(row[j]).mul_int(j as i128);
        }
        out.push(row[0].to_f64());
    }
    if n >= 1 {
        out[1] = -out[1];
    }
    out
}

/// Reduced `i128` fraction for the exact Bernoulli triangle.
#[derive(Clone, Copy)]
struct Ratio {
    num: i128,
    den: i128,
}

impl Ratio {
    const ZERO: Ratio = Ratio { num: 0, den: 1 };

    fn new(num: i128, den: i128) -> Self {
        debug_assert!(den != 0);
        let sign = if den < 0 { -1 } else { 1 };
        let g = gcd(num.unsigned_abs(), den.unsigned_abs()).max(1) as i128;
        Ratio {
            num: sign * num / g,
            den: sign * den / g,
        }
    }

    fn sub(self, o: Ratio) -> Ratio {
        let num = self
            .num
            .checked_mul(o.den)
            .and_then(|a| o.num.checked_mul(self.den).and_then(|b| a.checked_sub(b)))
            .expect("bernoulli: i128 overflow");
        let den = self
            .den
            .checked_mul(o.den)
            .expect("bernoulli: i128 overflow");
        Ratio::new(num, den)
    }

    fn mul_int(self, k: i128) -> Ratio {
        let num = self.num.checked_mul(k).expect("bernoulli: i128 overflow");
        Ratio::new(num, self.den)
    }

    fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

// ---------------------------------------------------------------------------
// Drift repair
// ---------------------------------------------------------------------------

/// Projects a near-rotation onto SO(3) (nearest-rotation polar factor).
///
/// Newton iteration `X ← ½(X + X⁻ᵀ)`, quadratically convergent for inputs
/// within Frobenius distance ~0.5 of the group; exact rotations pass
/// through untouched, so repair inside an integrator loop is idempotent.
/// Inputs with `det ≤ 0` cannot be oriented and are rejected.
pub fn orthonormalize(m: &Mat3) -> Result<Rotation3, So3Error> {
    let det = m.determinant();
    if !det.is_finite() || det <= 0.0 {
        return Err(So3Error::Degenerate { det });
    }
    let mut x = *m;
    for _ in 0..20 {
        let defect = (x.transpose() * x - Mat3::identity()).norm();
        if defect < 1e-14 {
            break;
        }
        let inv_t = match x.try_inverse() {
            Some(inv) => inv.transpose(),
            None => return Err(So3Error::Degenerate { det }),
        };
        x = (x + inv_t) * 0.5;
    }
    Rotation3::from_matrix(&x)
}

// ---------------------------------------------------------------------------

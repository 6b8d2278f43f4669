//! Rotation-group numerics and attitude-alignment control for kinematic
//! robot swarms.
//!
//! The crate is organised in layers:
//!
//! * [`so3`] — exponential/logarithm maps on SO(3), geodesic distances on
//!   SO(3) and the sphere, adjoint machinery and the differential of the
//!   logarithm. Everything else is built on this module.
//! * [`control`] — attitude-error bookkeeping and the proportional +
//!   feedforward angular-velocity laws (full- and partial-information),
//!   plus the planar restriction used for unicycle headings.
//! * [`sim`] — a kinematic multi-robot simulator on SE(3): Lie–Euler
//!   stepping with drift repair, moving reference attitudes, pairwise
//!   separation metrics and the analytic drift bounds.
//! * [`scenario`] — TOML scenario files, validation, and the built-in
//!   presets.
//! * [`export`] / [`summary`] — trajectory serialization (CSV/JSON with
//!   lossless round-trip) and the pass/fail run summary.
//!
//! The `examples/` directory is the front door: each example is a small,
//! runnable tour of one capability. The `so3-align` binary wraps the same
//! machinery behind `simulate` / `validate` / `presets` subcommands.

pub mod control;
pub mod export;
pub mod scenario;
pub mod sim;
pub mod so3;
pub mod summary;

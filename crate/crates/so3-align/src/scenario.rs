//! Scenario files and built-in presets.
//!
//! A scenario is a TOML document describing one simulation run. Exactly one
//! of `[target]`, `[field]`, or `[planar]` selects the scenario type;
//! unknown keys anywhere are errors, as is a missing `[units]` table (all
//! angles are radians, all rates radians per unit time — the table makes
//! files self-describing):
//!
//! ```toml
//! schema_version = 1
//! name = "rolling-reference"
//!
//! [units]
//! angle = "rad"
//! rate = "rad/time"
//!
//! [sim]
//! dt = 1e-3        # optional, default 1e-3
//! t_end = 16.0
//! seed = 7         # optional, default 0
//! drift_t0 = 0.0   # optional, default 0
//!
//! [target]
//! mode = "full_info"               # full_info | partial_info | fixed
//! direction = [-1.0, 1.0, 1.0]     # initial pointing direction (normalized)
//! omega_known = [3.14159, 0.0, 0.0]
//! # omega_unknown = [0.0, 0.0, -0.22]   # partial_info only
//! # roll_reference = [0.0, 0.0, 1.0]
//!
//! [[target.events]]
//! time = 8.0
//! direction = [1.0, 0.0, 0.0]
//!
//! [[robots]]
//! speed = 0.5
//! # position = [0.0, 0.0, 0.0]  # omitted: seeded from the run RNG
//! # attitude = [0.0, 0.0, 0.0]  # rotation vector; omitted: seeded
//! # mode = "full_info"          # omitted: follows the scenario type
//! # count = 1                   # replicate this entry
//! [robots.controller]
//! k_w = 1.0                     # or: omega_d / mu_star / delta_star
//! ```
//!
//! The controller table takes either an explicit gain `k_w` (bounds are
//! then vacuous) or the design triple `omega_d`, `mu_star`, `delta_star`
//! (`delta_star` defaults to `mu_star`), from which the gain is derived as
//! `k_w = √2·omega_d / mu_star`.
//!
//! Gradient-field scenarios replace `[target]` with
//!
//! ```toml
//! [field]
//! source = [0.0, 0.0, 0.0]
//! omega_known = [3.14159, 0.0, 0.0]
//! position_shell = [800.0, 1000.0]   # optional seeding shell
//! ```
//!
//! and planar (heading-only) scenarios with
//!
//! ```toml
//! [planar]
//! field_rate = 0.5
//! field_heading0 = 0.0
//! ```

use serde::Deserialize;
use std::f64::consts::PI;
use std::path::Path;
use thiserror::Error;

use crate::control::{frame_from_direction, frame_from_direction_default, ControllerParams};
use crate::sim::{
    ControlMode, FieldSpec, PlanarSpec, RateFn, RobotConfig, ScenarioKind, SimConfig, TargetEvent,
    TargetMode, TargetSpec,
};
use crate::so3::{exp_so3, log_so3, Rotation3, UnitVec3, Vec3};

/// The schema understood by this crate.
pub const SCHEMA_VERSION: i64 = 1;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("failed to read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("scenario parse error: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("unsupported schema_version {0} (this build understands {SCHEMA_VERSION})")]
    SchemaVersion(i64),
    #[error("invalid scenario: {0}")]
    Invalid(String),
    #[error("unknown preset '{name}' (available: {known})")]
    UnknownPreset { name: String, known: String },
}

fn invalid(msg: impl Into<String>) -> ScenarioError {
    ScenarioError::Invalid(msg.into())
}

// ---------------------------------------------------------------------------
// Raw document structure
// ---------------------------------------------------------------------------

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioDoc {
    schema_version: i64,
    name: String,
    units: UnitsDoc,
    sim: SimDoc,
    target: Option<TargetDoc>,
    field: Option<FieldDoc>,
    planar: Option<PlanarDoc>,
    robots: Vec<RobotDoc>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct UnitsDoc {
    angle: String,
    rate: String,
}

fn default_dt() -> f64 {
    1e-3
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SimDoc {
    #[serde(default = "default_dt")]
    dt: f64,
    t_end: f64,
    #[serde(default)]
    seed: u64,
    #[serde(default)]
    drift_t0: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct TargetDoc {
    mode: String,
    direction: [f64; 3],
    roll_reference: Option<[f64; 3]>,
    omega_known: Option<[f64; 3]>,
    omega_unknown: Option<[f64; 3]>,
    #[serde(default)]
    events: Vec<EventDoc>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct EventDoc {
    time: f64,
    direction: [f64; 3],
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FieldDoc {
    source: [f64; 3],
    omega_known: Option<[f64; 3]>,
    position_shell: Option<[f64; 2]>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PlanarDoc {
    field_rate: f64,
    #[serde(default)]
    field_heading0: f64,
}

fn default_count() -> u32 {
    1
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RobotDoc {
    position: Option<[f64; 3]>,
    attitude: Option<[f64; 3]>,
    speed: f64,
    mode: Option<String>,
    controller: ControllerDoc,
    #[serde(default = "default_count")]
    count: u32,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ControllerDoc {
    k_w: Option<f64>,
    omega_d: Option<f64>,
    mu_star: Option<f64>,
    delta_star: Option<f64>,
}

// ---------------------------------------------------------------------------
// Building a SimConfig
// ---------------------------------------------------------------------------

fn vec3(a: [f64; 3]) -> Vec3 {
    Vec3::new(a[0], a[1], a[2])
}

fn rate_fn(a: Option<[f64; 3]>) -> RateFn {
    match a {
        Some(v) if vec3(v).norm() > 0.0 => RateFn::Constant(vec3(v)),
        _ => RateFn::Zero,
    }
}

fn build_frame(
    direction: [f64; 3],
    roll_reference: &Option<[f64; 3]>,
) -> Result<Rotation3, ScenarioError> {
    let m_d =
        UnitVec3::new(vec3(direction)).map_err(|e| invalid(format!("target direction: {e}")))?;
    match roll_reference {
        Some(roll) => {
            let roll =
                UnitVec3::new(vec3(*roll)).map_err(|e| invalid(format!("roll_reference: {e}")))?;
            frame_from_direction(&m_d, &roll).map_err(|e| invalid(e.to_string()))
        }
        None => Ok(frame_from_direction_default(&m_d)),
    }
}

fn build_params(doc: &ControllerDoc) -> Result<ControllerParams, ScenarioError> {
    match (doc.k_w, doc.omega_d, doc.mu_star, doc.delta_star) {
        (Some(k_w), None, None, None) => {
            ControllerParams::full_info(k_w).map_err(|e| invalid(e.to_string()))
        }
        (None, Some(omega_d), Some(mu_star), delta_star) => {
            ControllerParams::from_bound(omega_d, mu_star, delta_star.unwrap_or(mu_star))
                .map_err(|e| invalid(e.to_string()))
        }
        _ => Err(invalid(
            "controller must give either k_w alone, or omega_d and mu_star \
             (with optional delta_star)",
        )),
    }
}

fn parse_control_mode(s: &str) -> Result<ControlMode, ScenarioError> {
    match s {
        "full_info" => Ok(ControlMode::FullInfo),
        "partial_info" => Ok(ControlMode::PartialInfo),
        other => Err(invalid(format!(
            "unknown controller mode '{other}' (expected full_info or partial_info)"
        ))),
    }
}

fn build_robots(
    docs: &[RobotDoc],
    default_mode: ControlMode,
) -> Result<Vec<RobotConfig>, ScenarioError> {
    let mut robots = Vec::new();
    for doc in docs {
        if doc.count == 0 {
            return Err(invalid("robot count must be at least 1"));
        }
        let mode = match &doc.mode {
            Some(s) => parse_control_mode(s)?,
            None => default_mode,
        };
        let params = build_params(&doc.controller)?;
        for _ in 0..doc.count {
            robots.push(RobotConfig {
                position: doc.position.map(vec3),
                attitude: doc.attitude.map(vec3),
                speed: doc.speed,
                mode,
                params,
            });
        }
    }
    Ok(robots)
}

/// Parses and validates a scenario document.
pub fn parse_scenario(text: &str) -> Result<SimConfig, ScenarioError> {
    let doc: ScenarioDoc = toml::from_str(text)?;
    if doc.schema_version != SCHEMA_VERSION {
        return Err(ScenarioError::SchemaVersion(doc.schema_version));
    }
    if doc.units.angle != "rad" || doc.units.rate != "rad/time" {
        return Err(invalid(format!(
            "unsupported units (angle = {:?}, rate = {:?}); this build expects \
             angle = \"rad\", rate = \"rad/time\"",
            doc.units.angle, doc.units.rate
        )));
    }

    let sections = [
        doc.target.is_some(),
        doc.field.is_some(),
        doc.planar.is_some(),
    ];
    if sections.iter().filter(|&&b| b).count() != 1 {
        return Err(invalid(
            "exactly one of [target], [field], or [planar] must be present",
        ));
    }

    let (kind, default_mode) = if let Some(target) = &doc.target {
        let mode = match target.mode.as_str() {
            "full_info" => TargetMode::FullInfo,
            "partial_info" => TargetMode::PartialInfo,
            "fixed" => TargetMode::Fixed,
            other => {
                return Err(invalid(format!(
                    "unknown target mode '{other}' (expected full_info, partial_info, or fixed)"
                )))
            }
        };
        let ra0 = build_frame(target.direction, &target.roll_reference)?;
        let spec = TargetSpec {
            mode,
            ra0,
            omega_known: rate_fn(target.omega_known),
            omega_unknown: rate_fn(target.omega_unknown),
            events: target
                .events
                .iter()
                .map(|e| TargetEvent {
                    time: e.time,
                    direction: vec3(e.direction),
                })
                .collect(),
            roll_reference: target.roll_reference.map(vec3),
        };
        let default = match mode {
            TargetMode::PartialInfo => ControlMode::PartialInfo,
            _ => ControlMode::FullInfo,
        };
        (ScenarioKind::Attitude3d(spec), default)
    } else if let Some(field) = &doc.field {
        let spec = FieldSpec {
            source: vec3(field.source),
            omega_known: rate_fn(field.omega_known),
            position_shell: field.position_shell.map(|s| (s[0], s[1])),
        };
        (ScenarioKind::GradientField(spec), ControlMode::PartialInfo)
    } else {
        let planar = doc.planar.as_ref().expect("one section checked present");
        (
            ScenarioKind::Planar(PlanarSpec {
                field_rate: planar.field_rate,
                field_heading0: planar.field_heading0,
            }),
            ControlMode::FullInfo,
        )
    };

    let config = SimConfig {
        name: doc.name,
        dt: doc.sim.dt,
        t_end: doc.sim.t_end,
        seed: doc.sim.seed,
        drift_t0: doc.sim.drift_t0,
        robots: build_robots(&doc.robots, default_mode)?,
        kind,
    };
    config.validate().map_err(|e| invalid(e.to_string()))?;
    Ok(config)
}

/// Reads and parses a scenario file.
pub fn load_scenario(path: &Path) -> Result<SimConfig, ScenarioError> {
    let text = std::fs::read_to_string(path).map_err(|source| ScenarioError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_scenario(&text)
}

/// Optional command-line overrides applied on top of a scenario.
#[derive(Clone, Copy, Debug, Default)]
pub struct Overrides {
    pub dt: Option<f64>,
    pub t_end: Option<f64>,
    pub seed: Option<u64>,
}

/// Applies overrides and re-validates.
pub fn apply_overrides(
    mut config: SimConfig,
    overrides: &Overrides,
) -> Result<SimConfig, ScenarioError> {
    if let Some(dt) = overrides.dt {
        config.dt = dt;
    }
    if let Some(t_end) = overrides.t_end {
        config.t_end = t_end;
    }
    if let Some(seed) = overrides.seed {
        config.seed = seed;
    }
    config.validate().map_err(|e| invalid(e.to_string()))?;
    Ok(config)
}

// ---------------------------------------------------------------------------
// Presets
// ---------------------------------------------------------------------------

/// Names accepted by [`preset`].
pub fn preset_names() -> &'static [&'static str] {
    &["fig3", "fig4", "fig5", "fig6"]
}

/// One-line description of a preset, for listings.
pub fn preset_description(name: &str) -> Option<&'static str> {
    match name {
        "fig3" => Some(
            "single robot, full information: tracks a rolling reference and \
             recovers from a mid-run pointing switch",
        ),
        "fig4" => Some(
            "single robot, partial information: body roll known, earth-frame \
             precession unknown; the error settles into the designed bound",
        ),
        "fig5" => Some(
            "two robots, partial information: attitude disagreement and \
             relative-position drift stay bounded",
        ),
        "fig6" => Some(
            "qualitative: ten-robot swarm steering up a scalar field toward \
             its source, each robot tracking its own gradient-aligned \
             reference (field shape illustrative, not calibrated)",
        ),
        _ => None,
    }
}

/// Builds a named preset configuration.
pub fn preset(name: &str) -> Result<SimConfig, ScenarioError> {
    match name {
        "fig3" => Ok(fig3()),
        "fig4" => Ok(fig4()),
        "fig5" => Ok(fig5()),
        "fig6" => Ok(fig6()),
        other => Err(ScenarioError::UnknownPreset {
            name: other.to_string(),
            known: preset_names().join(", "),
        }),
    }
}

fn pointing_frame(direction: Vec3) -> Rotation3 {
    frame_from_direction_default(&UnitVec3::new(direction).expect("preset direction is nonzero"))
}

fn fig3() -> SimConfig {
    SimConfig {
        name: "fig3".into(),
        dt: 1e-3,
        t_end: 16.0,
        seed: 7,
        drift_t0: 0.0,
        robots: vec![RobotConfig {
            position: Some(Vec3::zeros()),
            attitude: None,
            speed: 0.5,
            mode: ControlMode::FullInfo,
            params: ControllerParams::full_info(1.0).expect("static gain is valid"),
        }],
        kind: ScenarioKind::Attitude3d(TargetSpec {
            mode: TargetMode::FullInfo,
            ra0: pointing_frame(Vec3::new(-1.0, 1.0, 1.0)),
            omega_known: RateFn::Constant(Vec3::new(PI, 0.0, 0.0)),
            omega_unknown: RateFn::Zero,
            events: vec![TargetEvent {
                time: 8.0,
                direction: Vec3::new(1.0, 0.0, 0.0),
            }],
            roll_reference: None,
        }),
    }
}

fn fig4() -> SimConfig {
    let w_d = PI / 14.0;
    SimConfig {
        name: "fig4".into(),
        dt: 1e-3,
        t_end: 30.0,
        seed: 2,
        drift_t0: 0.0,
        robots: vec![RobotConfig {
            position: Some(Vec3::zeros()),
            attitude: None,
            speed: 0.5,
            mode: ControlMode::PartialInfo,
            params: ControllerParams::from_bound(w_d, 0.4, 0.4).expect("static bound is valid"),
        }],
        kind: ScenarioKind::Attitude3d(TargetSpec {
            mode: TargetMode::PartialInfo,
            ra0: pointing_frame(Vec3::new(-1.0, 1.0, 1.0)),
            omega_known: RateFn::Constant(Vec3::new(PI, 0.0, 0.0)),
            omega_unknown: RateFn::Constant(Vec3::new(0.0, 0.0, -w_d)),
            events: Vec::new(),
            roll_reference: None,
        }),
    }
}

fn fig5() -> SimConfig {
    let w_d = PI / 15.0;
    let ra0 = pointing_frame(Vec3::new(-1.0, 1.0, 1.0));
    // Start both robots strictly inside the ultimate bound (mu(0) < mu*):
    // the bound region is invariant, so the drift reference time t0 = 0.5
    // finds them still inside it.
    let near = |tau: Vec3| Some(log_so3(&(ra0 * exp_so3(&tau))).tau);
    let params = ControllerParams::from_bound(w_d, 0.5, 0.5).expect("static bound is valid");
    let robot = |position: Vec3, tau: Vec3| RobotConfig {
        position: Some(position),
        attitude: near(tau),
        speed: 0.5,
        mode: ControlMode::PartialInfo,
        params,
    };
    SimConfig {
        name: "fig5".into(),
        dt: 1e-3,
        t_end: 30.0,
        seed: 11,
        drift_t0: 0.5,
        robots: vec![
            robot(Vec3::zeros(), Vec3::new(0.17, -0.11, 0.14)),
            robot(Vec3::new(2.0, 0.0, 0.0), Vec3::new(-0.14, 0.17, -0.11)),
        ],
        kind: ScenarioKind::Attitude3d(TargetSpec {
            mode: TargetMode::PartialInfo,
            ra0,
            omega_known: RateFn::Constant(Vec3::new(PI, 0.0, 0.0)),
            omega_unknown: RateFn::Constant(Vec3::new(0.0, 0.0, -w_d)),
            events: Vec::new(),
            roll_reference: None,
        }),
    }
}

// The "(qualitative)" tag rides along in the run name (and therefore every
// output header): the scalar-field shape is illustrative, so the run shows
// the swarm behavior rather than calibrated field values.
fn fig6() -> SimConfig {
    SimConfig {
        name: "fig6 (qualitative)".into(),
        dt: 1e-3,
        t_end: 30.0,
        seed: 6,
        drift_t0: 0.0,
        robots: vec![
            RobotConfig {
                position: None,
                attitude: None,
                speed: 15.0,
                mode: ControlMode::PartialInfo,
                params: ControllerParams::from_bound(PI / 4.0, 0.4, 0.4)
                    .expect("static bound is valid"),
            };
            10
        ],
        kind: ScenarioKind::GradientField(FieldSpec {
            source: Vec3::zeros(),
            omega_known: RateFn::Constant(Vec3::new(PI, 0.0, 0.0)),
            position_shell: Some((800.0, 1000.0)),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim;

    const FULL_DOC: &str = r#"
schema_version = 1
name = "round-trip"

[units]
angle = "rad"
rate = "rad/time"

[sim]
dt = 1e-3
t_end = 2.0
seed = 42
drift_t0 = 0.25

[target]
mode = "partial_info"
direction = [-1.0, 1.0, 1.0]
omega_known = [3.141592653589793, 0.0, 0.0]
omega_unknown = [0.0, 0.0, -0.2]

[[target.events]]
time = 1.0
direction = [1.0, 0.0, 0.0]

[[robots]]
position = [0.0, 0.0, 0.0]
speed = 0.5
count = 2
[robots.controller]
omega_d = 0.2243994752564138
mu_star = 0.4
"#;

    #[test]
    fn parse_full_document() {
        let config = parse_scenario(FULL_DOC).unwrap();
        assert_eq!(config.name, "round-trip");
        assert_eq!(config.seed, 42);
        assert_eq!(config.robots.len(), 2);
        assert_eq!(config.robots[0].mode, ControlMode::PartialInfo);
        match &config.kind {
            ScenarioKind::Attitude3d(spec) => {
                assert_eq!(spec.mode, TargetMode::PartialInfo);
                assert_eq!(spec.events.len(), 1);
            }
            other => panic!("wrong kind: {other:?}"),
        }
        // delta_star defaults to mu_star; gain follows the design rule.
        let p = config.robots[0].params;
        assert!((p.k_w - std::f64::consts::SQRT_2 * 0.2243994752564138 / 0.4).abs() < 1e-12);
        assert!((p.delta_star - 0.4).abs() < 1e-15);
    }

    #[test]
    fn parse_rejects_unknown_keys() {
        let doc = FULL_DOC.replace("drift_t0 = 0.25", "drift_t0 = 0.25\nbogus = 1");
        assert!(matches!(parse_scenario(&doc), Err(ScenarioError::Parse(_))));
    }

    #[test]
    fn parse_rejects_wrong_units() {
        let doc = FULL_DOC.replace("angle = \"rad\"", "angle = \"deg\"");
        match parse_scenario(&doc) {
            Err(ScenarioError::Invalid(msg)) => assert!(msg.contains("units")),
            other => panic!("expected invalid units, got {other:?}"),
        }
        let doc = FULL_DOC.replace("[units]\nangle = \"rad\"\nrate = \"rad/time\"\n", "");
        assert!(parse_scenario(&doc).is_err());
    }

    #[test]
    fn parse_rejects_wrong_schema_version() {
        let doc = FULL_DOC.replace("schema_version = 1", "schema_version = 99");
        assert!(matches!(
            parse_scenario(&doc),
            Err(ScenarioError::SchemaVersion(99))
        ));
    }

    #[test]
    fn parse_requires_exactly_one_scenario_section() {
        let doc = format!("{FULL_DOC}\n[planar]\nfield_rate = 0.5\n");
        match parse_scenario(&doc) {
            Err(ScenarioError::Invalid(msg)) => assert!(msg.contains("exactly one")),
            other => panic!("expected section error, got {other:?}"),
        }
    }

    #[test]
    fn parse_rejects_mixed_controller_forms() {
        let doc = FULL_DOC.replace("omega_d = ", "k_w = 1.0\nomega_d = ");
        match parse_scenario(&doc) {
            Err(ScenarioError::Invalid(msg)) => assert!(msg.contains("controller")),
            other => panic!("expected controller error, got {other:?}"),
        }
    }

    #[test]
    fn parse_planar_scenario() {
        let doc = r#"
schema_version = 1
name = "headings"

[units]
angle = "rad"
rate = "rad/time"

[sim]
t_end = 10.0

[planar]
field_rate = 0.5
field_heading0 = 0.1

[[robots]]
speed = 1.0
attitude = [0.0, 0.0, 1.2]
count = 3
[robots.controller]
k_w = 1.0
"#;
        let config = parse_scenario(doc).unwrap();
        assert_eq!(config.robots.len(), 3);
        assert!(matches!(config.kind, ScenarioKind::Planar(_)));
    }

    #[test]
    fn overrides_are_revalidated() {
        let config = parse_scenario(FULL_DOC).unwrap();
        let out = apply_overrides(
            config.clone(),
            &Overrides {
                dt: None,
                t_end: Some(4.0),
                seed: Some(9),
            },
        )
        .unwrap();
        assert_eq!(out.t_end, 4.0);
        assert_eq!(out.seed, 9);
        // A dt too coarse for the gain must be rejected on re-validation.
        let bad = apply_overrides(
            config,
            &Overrides {
                dt: Some(0.5),
                t_end: None,
                seed: None,
            },
        );
        assert!(matches!(bad, Err(ScenarioError::Invalid(_))));
    }

    #[test]
    fn unknown_preset_lists_known_names() {
        match preset("fig7") {
            Err(ScenarioError::UnknownPreset { known, .. }) => {
                assert!(known.contains("fig3") && known.contains("fig6"));
            }
            other => panic!("expected unknown preset, got {other:?}"),
        }
    }

    #[test]
    fn presets_validate() {
        for name in preset_names() {
            let config = preset(name).unwrap();
            config
                .validate()
                .unwrap_or_else(|e| panic!("preset {name} invalid: {e}"));
            // The run name starts with the preset key; fig6 appends its
            // "(qualitative)" tag.
            assert!(config.name.starts_with(name));
            assert!(preset_description(name).is_some());
        }
    }

    #[test]
    fn preset_fig3_runs_clean() {
        let mut config = preset("fig3").unwrap();
        config.t_end = 2.0; // the full horizon is exercised elsewhere
        let traj = sim::run(&config).unwrap();
        assert_eq!(traj.times.len(), 2001);
        assert!(traj.robots[0].at_pi.iter().all(|&b| !b));
        // Full information: the error must already have collapsed.
        assert!(*traj.robots[0].mu.last().unwrap() < traj.robots[0].mu[0] * 0.2);
    }

    #[test]
    fn preset_fig5_starts_inside_the_bound_region() {
        let config = preset("fig5").unwrap();
        let traj = sim::run(&config).unwrap();
        let i0 = traj
            .times
            .iter()
            .position(|&t| t >= config.drift_t0 - 1e-12)
            .unwrap();
        for r in &traj.robots {
            assert!(
                r.mu[i0] <= 0.5 + 1e-9,
                "mu at t0 = {:.3} must be inside mu* = 0.5",
                r.mu[i0]
            );
        }
    }
}

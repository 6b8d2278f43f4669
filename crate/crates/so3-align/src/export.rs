//! Trajectory serialization: CSV for spreadsheets and plotting, JSON for
//! structured consumers.
//!
//! Floats are written with 17 significant digits (`{:.16e}`), which is
//! lossless for `f64`: reading a file back reproduces the original values
//! bit for bit. The CSV layout is long-form, one row per robot per sample:
//!
//! ```text
//! t,robot,px,py,pz,r00,r01,r02,r10,r11,r12,r20,r21,r22,mu,delta,wx,wy,wz
//! ```
//!
//! Pairwise series go to a sibling file `<stem>_pairs.csv`
//! (`t,i,j,dist_so3,drift`), written even when empty so consumers can rely
//! on its presence.

use serde::{Deserialize, Serialize};
use std::io::{BufWriter, Write as _};
use std::path::{Path, PathBuf};
use thiserror::Error;

use crate::sim::{PairSeries, RobotSeries, SimConfig, Trajectory};
use crate::so3::{Mat3, Rotation3};

#[derive(Debug, Error)]
pub enum ExportError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}: {msg}")]
    Format { path: String, msg: String },
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> ExportError + '_ {
    move |source| ExportError::Io {
        path: path.display().to_string(),
        source,
    }
}

fn format_err(path: &Path, msg: impl Into<String>) -> ExportError {
    ExportError::Format {
        path: path.display().to_string(),
        msg: msg.into(),
    }
}

/// Output formats understood by the writers and the command-line tool.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl std::str::FromStr for OutputFormat {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(format!("unknown format '{other}' (expected csv or json)")),
        }
    }
}

const CSV_HEADER: &str = "t,robot,px,py,pz,r00,r01,r02,r10,r11,r12,r20,r21,r22,mu,delta,wx,wy,wz";
const PAIRS_HEADER: &str = "t,i,j,dist_so3,drift";

/// The sibling path carrying pairwise series: `out.csv` → `out_pairs.csv`.
pub fn pairs_path(path: &Path) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    path.with_file_name(format!("{stem}_pairs.csv"))
}

/// Writes a trajectory (and its `_pairs` sibling) as CSV.
pub fn write_csv(path: &Path, traj: &Trajectory) -> Result<(), ExportError> {
    let file = std::fs::File::create(path).map_err(io_err(path))?;
    let mut w = BufWriter::new(file);
    writeln!(w, "{CSV_HEADER}").map_err(io_err(path))?;
    for (k, t) in traj.times.iter().enumerate() {
        for (idx, robot) in traj.robots.iter().enumerate() {
            let p = robot.p[k];
            let m = robot.r[k].matrix();
            let wv = robot.omega[k];
            write!(w, "{t:.16e},{idx}").map_err(io_err(path))?;
            for v in [p[0], p[1], p[2]] {
                write!(w, ",{v:.16e}").map_err(io_err(path))?;
            }
            for i in 0..3 {
                for j in 0..3 {
                    write!(w, ",{:.16e}", m[(i, j)]).map_err(io_err(path))?;
                }
            }
            writeln!(
                w,
                ",{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                robot.mu[k], robot.delta[k], wv[0], wv[1], wv[2]
            )
            .map_err(io_err(path))?;
        }
    }
    w.flush().map_err(io_err(path))?;

    let pp = pairs_path(path);
    let file = std::fs::File::create(&pp).map_err(io_err(&pp))?;
    let mut w = BufWriter::new(file);
    writeln!(w, "{PAIRS_HEADER}").map_err(io_err(&pp))?;
    for pair in &traj.pairs {
        for (k, t) in traj.times.iter().enumerate() {
            writeln!(
                w,
                "{t:.16e},{},{},{:.16e},{:.16e}",
                pair.i, pair.j, pair.dist[k], pair.drift[k]
            )
            .map_err(io_err(&pp))?;
        }
    }
    w.flush().map_err(io_err(&pp))
}

/// Reads a trajectory written by [`write_csv`], including the `_pairs`
/// sibling when present. The CSV carries no π-branch flags, so `at_pi`
/// comes back all-false; everything else round-trips bit for bit.
pub fn read_csv(path: &Path) -> Result<Trajectory, ExportError> {
    let text = std::fs::read_to_string(path).map_err(io_err(path))?;
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == CSV_HEADER => {}
        other => return Err(format_err(path, format!("unexpected header {other:?}"))),
    }

    let mut times: Vec<f64> = Vec::new();
    let mut robots: Vec<RobotSeries> = Vec::new();
    for (lineno, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 19 {
            return Err(format_err(
                path,
                format!(
                    "line {}: expected 19 fields, got {}",
                    lineno + 2,
                    fields.len()
                ),
            ));
        }
        let parse = |s: &str| -> Result<f64, ExportError> {
            s.parse::<f64>()
                .map_err(|e| format_err(path, format!("line {}: {e}", lineno + 2)))
        };
        let t = parse(fields[0])?;
        let idx: usize = fields[1]
            .parse()
            .map_err(|e| format_err(path, format!("line {}: {e}", lineno + 2)))?;
        while robots.len() <= idx {
            robots.push(RobotSeries::default());
        }
        if idx == 0 {
            times.push(t);
        }
        let mut vals = [0.0_f64; 17];
        for (slot, field) in vals.iter_mut().zip(&fields[2..]) {
            *slot = parse(field)?;
        }
        let m = Mat3::from_row_slice(&vals[3..12]);
        let r = Rotation3::from_matrix(&m)
            .map_err(|e| format_err(path, format!("line {}: {e}", lineno + 2)))?;
        let series = &mut robots[idx];
        series
            .p
            .push(crate::so3::Vec3::new(vals[0], vals[1], vals[2]));
        series.r.push(r);
        series.mu.push(vals[12]);
        series.delta.push(vals[13]);
        series
            .omega
            .push(crate::so3::Vec3::new(vals[14], vals[15], vals[16]));
        series.at_pi.push(false);
    }

    let pp = pairs_path(path);
    let mut pairs: Vec<PairSeries> = Vec::new();
    if pp.exists() {
        let text = std::fs::read_to_string(&pp).map_err(io_err(&pp))?;
        let mut lines = text.lines();
        match lines.next() {
            Some(h) if h == PAIRS_HEADER => {}
            other => return Err(format_err(&pp, format!("unexpected header {other:?}"))),
        }
        for (lineno, line) in lines.enumerate() {
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 5 {
                return Err(format_err(
                    &pp,
                    format!(
                        "line {}: expected 5 fields, got {}",
                        lineno + 2,
                        fields.len()
                    ),
                ));
            }
            let parse = |s: &str| -> Result<f64, ExportError> {
                s.parse::<f64>()
                    .map_err(|e| format_err(&pp, format!("line {}: {e}", lineno + 2)))
            };
            let i: usize = fields[1]
                .parse()
                .map_err(|e| format_err(&pp, format!("line {}: {e}", lineno + 2)))?;
            let j: usize = fields[2]
                .parse()
                .map_err(|e| format_err(&pp, format!("line {}: {e}", lineno + 2)))?;
            if pairs.last().map(|p: &PairSeries| (p.i, p.j)) != Some((i, j)) {
                pairs.push(PairSeries {
                    i,
                    j,
                    dist: Vec::new(),
                    drift: Vec::new(),
                });
            }
            let pair = pairs.last_mut().expect("pushed above");
            pair.dist.push(parse(fields[3])?);
            pair.drift.push(parse(fields[4])?);
        }
    }

    Ok(Trajectory {
        times,
        robots,
        pairs,
    })
}

// ---------------------------------------------------------------------------
// JSON document
// ---------------------------------------------------------------------------

/// Run metadata carried in the JSON document head.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct RunMeta {
    pub name: String,
    pub dt: f64,
    pub t_end: f64,
    pub seed: u64,
}

impl From<&SimConfig> for RunMeta {
    fn from(c: &SimConfig) -> Self {
        Self {
            name: c.name.clone(),
            dt: c.dt,
            t_end: c.t_end,
            seed: c.seed,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
struct RobotDoc {
    p: Vec<[f64; 3]>,
    /// Row-major rotation matrices.
    r: Vec<[f64; 9]>,
    mu: Vec<f64>,
    delta: Vec<f64>,
    omega: Vec<[f64; 3]>,
    at_pi: Vec<bool>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
struct PairDoc {
    i: usize,
    j: usize,
    dist: Vec<f64>,
    drift: Vec<f64>,
}

/// The complete JSON trajectory document.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct TrajectoryDoc {
    pub schema_version: i64,
    #[serde(flatten)]
    pub meta: RunMeta,
    pub times: Vec<f64>,
    robots: Vec<RobotDoc>,
    pairs: Vec<PairDoc>,
}

impl TrajectoryDoc {
    pub fn new(traj: &Trajectory, meta: RunMeta) -> Self {
        let robots = traj
            .robots
            .iter()
            .map(|rs| RobotDoc {
                p: rs.p.iter().map(|p| [p[0], p[1], p[2]]).collect(),
                r: rs
                    .r
                    .iter()
                    .map(|r| {
                        let m = r.matrix();
                        [
                            m[(0, 0)],
                            m[(0, 1)],
                            m[(0, 2)],
                            m[(1, 0)],
                            m[(1, 1)],
                            m[(1, 2)],
                            m[(2, 0)],
                            m[(2, 1)],
                            m[(2, 2)],
                        ]
                    })
                    .collect(),
                mu: rs.mu.clone(),
                delta: rs.delta.clone(),
                omega: rs.omega.iter().map(|w| [w[0], w[1], w[2]]).collect(),
                at_pi: rs.at_pi.clone(),
            })
            .collect();
        let pairs = traj
            .pairs
            .iter()
            .map(|p| PairDoc {
                i: p.i,
                j: p.j,
                dist: p.dist.clone(),
                drift: p.drift.clone(),
            })
            .collect();
        Self {
            schema_version: 1,
            meta,
            times: traj.times.clone(),
            robots,
            pairs,
        }
    }

    /// Reconstructs the in-memory trajectory (rotations re-validated).
    pub fn into_trajectory(self) -> Result<Trajectory, crate::so3::So3Error> {
        let mut robots = Vec::with_capacity(self.robots.len());
        for rd in self.robots {
            let mut rs = RobotSeries {
                p: rd
                    .p
                    .iter()
                    .map(|a| crate::so3::Vec3::new(a[0], a[1], a[2]))
                    .collect(),
                r: Vec::with_capacity(rd.r.len()),
                mu: rd.mu,
                delta: rd.delta,
                omega: rd
                    .omega
                    .iter()
                    .map(|a| crate::so3::Vec3::new(a[0], a[1], a[2]))
                    .collect(),
                at_pi: rd.at_pi,
            };
            for a in rd.r {
                rs.r.push(Rotation3::from_matrix(&Mat3::from_row_slice(&a))?);
            }
            robots.push(rs);
        }
        let pairs = self
            .pairs
            .into_iter()
            .map(|p| PairSeries {
                i: p.i,
                j: p.j,
                dist: p.dist,
                drift: p.drift,
            })
            .collect();
        Ok(Trajectory {
            times: self.times,
            robots,
            pairs,
        })
    }
}

/// Writes the JSON document for a run.
pub fn write_json(path: &Path, traj: &Trajectory, meta: RunMeta) -> Result<(), ExportError> {
    let doc = TrajectoryDoc::new(traj, meta);
    let file = std::fs::File::create(path).map_err(io_err(path))?;
    let mut w = BufWriter::new(file);
    serde_json::to_writer(&mut w, &doc)?;
    w.flush().map_err(io_err(path))
}

/// Reads a JSON document back.
pub fn read_json(path: &Path) -> Result<(Trajectory, RunMeta), ExportError> {
    let text = std::fs::read_to_string(path).map_err(io_err(path))?;
    let doc: TrajectoryDoc = serde_json::from_str(&text)?;
    let meta = doc.meta.clone();
    let traj = doc
        .into_trajectory()
        .map_err(|e| format_err(path, e.to_string()))?;
    Ok((traj, meta))
}

//! Post-run analysis: does a trajectory behave the way its configuration
//! claims it should?
//!
//! [`summarize`] derives scenario-appropriate checks — fitted decay rates
//! against the configured gain, settling into the designed ultimate bound,
//! planar decay residuals, source approach — and folds in the analytic
//! drift-bound reports from [`crate::sim::check_bounds`]. The result
//! renders as one line per check plus a final verdict, and drives the
//! command-line `--check` flag.

use std::f64::consts::SQRT_2;
use std::fmt;

use crate::sim::{
    check_bounds, fit_decay_rate, BoundReport, ScenarioKind, SimConfig, TargetMode, Trajectory,
};

/// Relative tolerance on fitted decay rates.
const RATE_TOL: f64 = 0.05;
/// Overshoot allowed on ultimate-bound entry (integration and sampling
/// slack on a non-strict invariant).
const BOUND_SLACK: f64 = 1.02;
/// Relative residual allowed on the planar closed-form decay.
const PLANAR_TOL: f64 = 1e-6;

/// One named check with its verdict.
#[derive(Clone, Debug)]
pub struct CheckItem {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckItem {
    fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

/// Everything `--check` evaluates for one run.
#[derive(Clone, Debug)]
pub struct SummaryReport {
    pub name: String,
    pub items: Vec<CheckItem>,
    pub bounds: Vec<BoundReport>,
    pub passed: bool,
}

impl fmt::Display for SummaryReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "run: {}", self.name)?;
        for item in &self.items {
            let status = if item.passed { "PASS" } else { "FAIL" };
            writeln!(f, "{status}  {}: {}", item.name, item.detail)?;
        }
        for b in &self.bounds {
            let status = if b.satisfied { "PASS" } else { "FAIL" };
            writeln!(
                f,
                "{status}  bound {} pair ({}, {}): observed {:.4} vs limit {:.4} (margin {:+.4})",
                b.kind, b.i, b.j, b.observed, b.theoretical, b.margin
            )?;
        }
        write!(f, "result: {}", if self.passed { "PASS" } else { "FAIL" })
    }
}

/// Sample index ranges between event times (used to fit each decay segment
/// separately; a reference switch restarts the transient).
fn segments(times: &[f64], event_times: &[f64]) -> Vec<(usize, usize)> {
    let mut cut_points = vec![0_usize];
    for &ev in event_times {
        if let Some(idx) = times.iter().position(|&t| t >= ev - 1e-12) {
            if idx > 0 && idx < times.len() {
                cut_points.push(idx);
            }
        }
    }
    cut_points.push(times.len());
    cut_points.dedup();
    cut_points
        .windows(2)
        .map(|w| (w[0], w[1]))
        .filter(|(a, b)| b - a >= 50)
        .collect()
}

/// Fits one segment of an error series against a claimed rate.
fn rate_item(name: String, times: &[f64], values: &[f64], claimed: f64) -> CheckItem {
    match fit_decay_rate(times, values) {
        Some(fit) => {
            let rel = (fit.rate - claimed).abs() / claimed;
            CheckItem::new(
                name,
                rel <= RATE_TOL,
                format!(
                    "fitted rate {:.4} vs configured {:.4} ({:+.2}%, {} samples)",
                    fit.rate,
                    claimed,
                    100.0 * (fit.rate - claimed) / claimed,
                    fit.n_samples
                ),
            )
        }
        None => {
            // No fit window: fine if the error already sits at the floor.
            let last = values.last().copied().unwrap_or(0.0);
            CheckItem::new(
                name,
                last <= 1e-5,
                format!("no fit window; final value {last:.3e}"),
            )
        }
    }
}

/// Settling check: the series must enter `[0, bound]` and never leave it by
/// more than the slack factor afterwards.
fn settles_item(name: String, times: &[f64], values: &[f64], bound: f64) -> CheckItem {
    match values.iter().position(|&v| v <= bound) {
        Some(entry) => {
            let worst_after = values[entry..].iter().fold(0.0_f64, |a, &b| a.max(b));
            CheckItem::new(
                name,
                worst_after <= bound * BOUND_SLACK,
                format!(
                    "entered at t = {:.3}, worst after entry {:.4} (bound {:.4})",
                    times[entry], worst_after, bound
                ),
            )
        }
        None => CheckItem::new(
            name,
            false,
            format!(
                "never entered the bound {bound:.4} (final value {:.4})",
                values.last().copied().unwrap_or(f64::NAN)
            ),
        ),
    }
}

/// Builds the full report for a completed run.
pub fn summarize(traj: &Trajectory, config: &SimConfig) -> SummaryReport {
    let mut items = Vec::new();
    match &config.kind {
        ScenarioKind::Attitude3d(spec) => {
            let event_times: Vec<f64> = spec.events.iter().map(|e| e.time).collect();
            match spec.mode {
                TargetMode::FullInfo | TargetMode::Fixed => {
                    for (k, series) in traj.robots.iter().enumerate() {
                        let claimed = config.robots[k].params.k_w;
                        for (s, (a, b)) in segments(&traj.times, &event_times).iter().enumerate() {
                            items.push(rate_item(
                                format!("robot {k} error decay (segment {s})"),
                                &traj.times[*a..*b],
                                &series.mu[*a..*b],
                                claimed,
                            ));
                        }
                    }
                    let k0 = config.robots[0].params.k_w;
                    if config
                        .robots
                        .iter()
                        .all(|r| (r.params.k_w - k0).abs() < 1e-12)
                    {
                        for pair in &traj.pairs {
                            for (s, (a, b)) in
                                segments(&traj.times, &event_times).iter().enumerate()
                            {
                                items.push(rate_item(
                                    format!(
                                        "pair ({}, {}) separation decay (segment {s})",
                                        pair.i, pair.j
                                    ),
                                    &traj.times[*a..*b],
                                    &pair.dist[*a..*b],
                                    k0,
                                ));
                            }
                        }
                    }
                }
                TargetMode::PartialInfo => {
                    for (k, series) in traj.robots.iter().enumerate() {
                        let p = &config.robots[k].params;
                        items.push(settles_item(
                            format!("robot {k} attitude error settles into mu*"),
                            &traj.times,
                            &series.mu,
                            p.mu_star,
                        ));
                        items.push(settles_item(
                            format!("robot {k} pointing error settles into delta*"),
                            &traj.times,
                            &series.delta,
                            p.delta_star,
                        ));
                    }
                }
            }
        }
        ScenarioKind::GradientField(field) => {
            for (k, series) in traj.robots.iter().enumerate() {
                let p = &config.robots[k].params;
                items.push(settles_item(
                    format!("robot {k} attitude error settles into mu*"),
                    &traj.times,
                    &series.mu,
                    p.mu_star,
                ));
                // Once aligned, forward motion must actually close on the
                // source.
                if let Some(entry) = series.mu.iter().position(|&v| v <= p.mu_star) {
                    let d_entry = (series.p[entry] - field.source).norm();
                    let d_final = (series.p.last().unwrap() - field.source).norm();
                    items.push(CheckItem::new(
                        format!("robot {k} approaches the source"),
                        d_final < d_entry,
                        format!(
                            "distance {:.1} at alignment (t = {:.2}) down to {:.1} at the end",
                            d_entry, traj.times[entry], d_final
                        ),
                    ));
                }
            }
        }
        ScenarioKind::Planar(_) => {
            let k_w = config.robots[0].params.k_w;
            for pair in &traj.pairs {
                let d0 = pair.dist[0] / SQRT_2;
                let mut worst = 0.0_f64;
                for (k, t) in traj.times.iter().enumerate() {
                    let expect = d0 * (-k_w * t).exp();
                    if expect < 1e-9 {
                        break;
                    }
                    worst = worst.max((pair.dist[k] / SQRT_2 - expect).abs() / expect);
                }
                items.push(CheckItem::new(
                    format!(
                        "pair ({}, {}) heading gap follows e^(-k_w t)",
                        pair.i, pair.j
                    ),
                    worst <= PLANAR_TOL,
                    format!("worst relative residual {worst:.3e} (tolerance {PLANAR_TOL:.1e})"),
                ));
            }
            for (k, series) in traj.robots.iter().enumerate() {
                if series.delta[0] > 1e-5 {
                    items.push(rate_item(
                        format!("robot {k} heading error decay"),
                        &traj.times,
                        &series.delta,
                        k_w,
                    ));
                }
            }
        }
    }

    let bounds = check_bounds(traj, config);
    let passed = items.iter().all(|i| i.passed) && bounds.iter().all(|b| b.satisfied);
    SummaryReport {
        name: config.name.clone(),
        items,
        bounds,
        passed,
    }
}

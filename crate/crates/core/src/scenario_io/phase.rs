//! Phase portraits of the basic system in the (K, E) plane.

use crate::error::{Error, Result};
use crate::integrator::IntegratorSettings;
use crate::model::{EconState, ModelParams};
use crate::simulation::simulate_basic;

use super::csv_io::fmt_num;
use super::svg::{render_svg_labeled, Series};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldSample {
    pub k: f64,
    pub e: f64,
    pub dk: f64,
    pub de: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseTrajectory {
    pub start: EconState,
    pub times: Vec<f64>,
    pub k: Vec<f64>,
    pub e: Vec<f64>,
    /// Set when the orbit left the model's domain or blew up; the series
    /// then hold only the start point.
    pub error: Option<String>,
}

impl PhaseTrajectory {
    pub fn end(&self) -> EconState {
        EconState::new(*self.k.last().unwrap(), *self.e.last().unwrap())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhasePortrait {
    pub field: Vec<FieldSample>,
    pub trajectories: Vec<PhaseTrajectory>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseGrid {
    pub k_range: (f64, f64),
    pub e_range: (f64, f64),
    /// Number of grid points along K and E.
    pub counts: (usize, usize),
    pub horizon: f64,
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}

/// Samples the vector field on a grid and integrates orbits from the four
/// corners and four edge midpoints of the window.
pub fn phase_portrait(
    params: &ModelParams,
    grid: &PhaseGrid,
    settings: &IntegratorSettings,
    sample_step: f64,
) -> Result<PhasePortrait> {
    let (k0, k1) = grid.k_range;
    let (e0, e1) = grid.e_range;
    if !(k0 > 0.0 && e0 > 0.0) {
        return Err(Error::Domain(format!(
            "phase window must lie in K > 0, E > 0, got K from {k0}, E from {e0}"
        )));
    }
    if !(k1 > k0 && e1 > e0) {
        return Err(Error::InvalidInput(
            "phase ranges must be increasing".into(),
        ));
    }
    if grid.counts.0 < 2 || grid.counts.1 < 2 {
        return Err(Error::InvalidInput(
            "phase grid needs at least 2x2 points".into(),
        ));
    }

    let mut field = Vec::with_capacity(grid.counts.0 * grid.counts.1);
    for &k in &linspace(k0, k1, grid.counts.0) {
        for &e in &linspace(e0, e1, grid.counts.1) {
            let [dk, de] = params.basic_field(&EconState::new(k, e))?;
            field.push(FieldSample { k, e, dk, de });
        }
    }

    let (km, em) = (0.5 * (k0 + k1), 0.5 * (e0 + e1));
    let starts = [
        (k0, e0),
        (k1, e0),
        (k1, e1),
        (k0, e1),
        (km, e0),
        (k1, em),
        (km, e1),
        (k0, em),
    ];
    let trajectories = starts
        .iter()
        .map(|&(k, e)| {
            let start = EconState::new(k, e);
            match simulate_basic(params, start, grid.horizon, settings, sample_step) {
                Ok(tr) => PhaseTrajectory {
                    start,
                    k: tr.states.iter().map(|s| s[0]).collect(),
                    e: tr.states.iter().map(|s| s[1]).collect(),
                    times: tr.times,
                    error: None,
                },
                Err(err) => PhaseTrajectory {
                    start,
                    times: vec![0.0],
                    k: vec![k],
                    e: vec![e],
                    error: Some(err.to_string()),
                },
            }
        })
        .collect();
    Ok(PhasePortrait {
        field,
        trajectories,
    })
}

impl PhasePortrait {
    /// Largest Euclidean distance from a completed orbit's end to `target`.
    pub fn max_endpoint_distance(&self, target: &EconState) -> f64 {
        self.trajectories
            .iter()
            .filter(|t| t.error.is_none())
            .map(|t| {
                let end = t.end();
                (end.k - target.k).hypot(end.e - target.e)
            })
            .fold(0.0, f64::max)
    }

    pub fn field_csv(&self) -> String {
        let mut lines = vec!["K,E,dK,dE".to_string()];
        lines.extend(self.field.iter().map(|s| {
            format!(
                "{},{},{},{}",
                fmt_num(s.k),
                fmt_num(s.e),
                fmt_num(s.dk),
                fmt_num(s.de)
            )
        }));
        lines.join("\n")
    }

    pub fn trajectories_csv(&self) -> String {
        let mut lines = vec!["orbit,t,K,E".to_string()];
        for (i, tr) in self.trajectories.iter().enumerate() {
            for j in 0..tr.times.len() {
                lines.push(format!(
                    "{i},{},{},{}",
                    fmt_num(tr.times[j]),
                    fmt_num(tr.k[j]),
                    fmt_num(tr.e[j])
                ));
            }
        }
        lines.join("\n")
    }

    /// Orbits drawn as E against K.
    pub fn to_svg(&self, title: &str) -> Result<String> {
        let series: Vec<Series> = self
            .trajectories
            .iter()
            .map(|t| {
                Series::new(
                    format!("from ({}, {})", fmt_num(t.start.k), fmt_num(t.start.e)),
                    t.k.clone(),
                    t.e.clone(),
                )
            })
            .collect();
        render_svg_labeled(&series, title, "K", "E")
    }
}

//! Sampled trajectories with derived economic series.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::integrator::{integrate, IntegratorSettings, RawTrajectory};
use crate::model::{EconState, ModelParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScenarioKind {
    Basic,
    Chaotic,
    Controlled,
}

impl ScenarioKind {
    /// Names of the integrated state components, in storage order.
    pub fn state_columns(self) -> &'static [&'static str] {
        match self {
            ScenarioKind::Basic => &["K", "E"],
            ScenarioKind::Controlled => &["K", "E", "s_r"],
            ScenarioKind::Chaotic => &["K", "E", "x", "y", "z"],
        }
    }
}

impl std::fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ScenarioKind::Basic => "basic",
            ScenarioKind::Chaotic => "chaotic",
            ScenarioKind::Controlled => "controlled",
        })
    }
}

pub const DERIVED_COLUMNS: [&str; 4] = ["Y", "C", "I_k", "I_r"];

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrajectoryFlags {
    /// Controlled runs: `s_r` left `[s_r_floor, 1 - s_k]` at some sample.
    pub constraint_violation: bool,
    /// Chaotic runs: smallest sampled effective capital share `s_k + c x`.
    pub min_effective_sk: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub kind: ScenarioKind,
    pub times: Vec<f64>,
    /// One row per sample, columns per [`ScenarioKind::state_columns`].
    pub states: Vec<Vec<f64>>,
    pub output: Vec<f64>,
    pub consumption: Vec<f64>,
    pub capital_investment: Vec<f64>,
    pub education_investment: Vec<f64>,
    pub flags: TrajectoryFlags,
}

impl Trajectory {
    /// Attaches `Y, C, I_k, I_r` to an integrated trajectory.
    ///
    /// The effective shares are `s_k + c x` for chaotic runs and the state's
    /// `s_r` for controlled runs, so `C + I_k + I_r = Y` on every row.
    pub(crate) fn from_raw(
        kind: ScenarioKind,
        raw: RawTrajectory,
        params: &ModelParams,
        c: f64,
    ) -> Self {
        let n = raw.len();
        let mut out = Self {
            kind,
            times: raw.times,
            states: Vec::with_capacity(n),
            output: Vec::with_capacity(n),
            consumption: Vec::with_capacity(n),
            capital_investment: Vec::with_capacity(n),
            education_investment: Vec::with_capacity(n),
            flags: TrajectoryFlags::default(),
        };
        let mut min_sk = f64::INFINITY;
        for s in raw.states {
            let y = s[1].powf(params.alpha) * s[0].powf(params.beta);
            let (s_k, s_r) = match kind {
                ScenarioKind::Basic => (params.s_k, params.s_r),
                ScenarioKind::Controlled => (params.s_k, s[2]),
                ScenarioKind::Chaotic => (params.s_k + c * s[2], params.s_r),
            };
            if kind == ScenarioKind::Controlled
                && !(s_r >= params.s_r_floor && s_r <= 1.0 - params.s_k)
            {
                out.flags.constraint_violation = true;
            }
            min_sk = min_sk.min(s_k);
            out.output.push(y);
            out.consumption.push((1.0 - s_k - s_r) * y);
            out.capital_investment.push(s_k * y);
            out.education_investment.push(s_r * y);
            out.states.push(s);
        }
        if kind == ScenarioKind::Chaotic {
            out.flags.min_effective_sk = Some(min_sk);
        }
        out
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Column names as written to CSV.
    pub fn header(&self) -> Vec<&'static str> {
        let mut h = vec!["t"];
        h.extend_from_slice(self.kind.state_columns());
        h.extend_from_slice(&DERIVED_COLUMNS);
        h
    }

    pub fn row(&self, i: usize) -> Vec<f64> {
        let mut r = Vec::with_capacity(1 + self.states[i].len() + 4);
        r.push(self.times[i]);
        r.extend_from_slice(&self.states[i]);
        r.extend([
            self.output[i],
            self.consumption[i],
            self.capital_investment[i],
            self.education_investment[i],
        ]);
        r
    }

    /// Looks a column up by its CSV name.
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.header().iter().position(|h| *h == name)?;
        Some((0..self.len()).map(|i| self.row(i)[idx]).collect())
    }

    pub fn final_output(&self) -> f64 {
        *self.output.last().expect("trajectory has samples")
    }

    pub fn final_consumption(&self) -> f64 {
        *self.consumption.last().expect("trajectory has samples")
    }

    /// Mean of `Y` over samples with `t` in `[from, to]`.
    pub fn mean_output(&self, from: f64, to: f64) -> Option<f64> {
        let vals: Vec<f64> = self
            .times
            .iter()
            .zip(&self.output)
            .filter(|(t, _)| **t >= from && **t <= to)
            .map(|(_, y)| *y)
            .collect();
        (!vals.is_empty()).then(|| vals.iter().sum::<f64>() / vals.len() as f64)
    }
}

/// Integrates the basic two-dimensional system from `econ0` over `[0, horizon]`.
pub fn simulate_basic(
    params: &ModelParams,
    econ0: EconState,
    horizon: f64,
    settings: &IntegratorSettings,
    sample_step: f64,
) -> Result<Trajectory> {
    econ0.check()?;
    let raw = integrate(
        |y, dy| {
            let d = params.basic_field(&EconState::new(y[0], y[1]))?;
            dy.copy_from_slice(&d);
            Ok(())
        },
        &[econ0.k, econ0.e],
        0.0,
        horizon,
        settings,
        sample_step,
    )?;
    Ok(Trajectory::from_raw(ScenarioKind::Basic, raw, params, 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::equilibrium;

    #[test]
    fn converges_to_closed_form_equilibrium() {
        let p = ModelParams::reference();
        let tr = simulate_basic(
            &p,
            EconState::new(4.0, 1.0),
            500.0,
            &IntegratorSettings::default(),
            1.0,
        )
        .unwrap();
        let eq = equilibrium(&p).unwrap();
        let last = tr.states.last().unwrap();
        assert!((last[0] - eq.k).abs() < 1e-6, "{} vs {}", last[0], eq.k);
        assert!((last[1] - eq.e).abs() < 1e-6, "{} vs {}", last[1], eq.e);
    }

    #[test]
    fn derived_series_conserve_income() {
        let p = ModelParams::reference();
        let tr = simulate_basic(
            &p,
            EconState::new(1.0, 1.0),
            50.0,
            &IntegratorSettings::default(),
            0.5,
        )
        .unwrap();
        for i in 0..tr.len() {
            let sum = tr.consumption[i] + tr.capital_investment[i] + tr.education_investment[i];
            assert!((sum - tr.output[i]).abs() <= 1e-12 * tr.output[i]);
        }
        assert_eq!(tr.header(), vec!["t", "K", "E", "Y", "C", "I_k", "I_r"]);
        assert_eq!(tr.column("t").unwrap(), tr.times);
        assert!(tr.column("s_r").is_none());
        assert!(!tr.flags.constraint_violation);
        assert_eq!(tr.flags.min_effective_sk, None);
    }

    #[test]
    fn rejects_non_positive_start() {
        let p = ModelParams::reference();
        let err = simulate_basic(
            &p,
            EconState::new(0.0, 1.0),
            10.0,
            &IntegratorSettings::default(),
            1.0,
        );
        assert!(matches!(err, Err(crate::Error::Domain(_))));
    }
}

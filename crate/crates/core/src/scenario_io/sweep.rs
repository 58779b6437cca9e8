use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::simulation::ScenarioKind;

use super::csv_io::fmt_num;
use super::scenario::{run_scenario, Scenario};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    SK,
    SR,
    DeltaK,
    DeltaR,
    Alpha,
    Beta,
    P,
    C,
}

impl FromStr for SweepParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "s_k" => SweepParam::SK,
            "s_r" => SweepParam::SR,
            "delta_k" => SweepParam::DeltaK,
            "delta_r" => SweepParam::DeltaR,
            "alpha" => SweepParam::Alpha,
            "beta" => SweepParam::Beta,
            "p" => SweepParam::P,
            "c" => SweepParam::C,
            other => {
                return Err(Error::InvalidInput(format!(
                    "unknown sweep parameter {other:?} (expected s_k, s_r, delta_k, delta_r, alpha, beta, p or c)"
                )))
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub base: Scenario,
    pub param: SweepParam,
    pub values: Vec<f64>,
    pub report_time: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    pub output: Option<f64>,
    pub consumption: Option<f64>,
    pub error: Option<String>,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.values.is_empty() {
            return Err(Error::validation("values", "must not be empty"));
        }
        if !(self.report_time > 0.0 && self.report_time.is_finite()) {
            return Err(Error::validation("report_time", "must be positive"));
        }
        let kind = self.base.kind;
        let ok = match self.param {
            SweepParam::P => kind == ScenarioKind::Controlled,
            SweepParam::C => kind == ScenarioKind::Chaotic,
            // The education share is a state of the controlled system.
            SweepParam::SR => kind != ScenarioKind::Controlled,
            _ => true,
        };
        if !ok {
            return Err(Error::validation(
                "param",
                format!("{:?} cannot be swept for kind {kind}", self.param),
            ));
        }
        Ok(())
    }

    /// The scenario for one row: the base with `param = value` and
    /// `horizon = report_time`.
    pub fn scenario_for(&self, value: f64) -> Result<Scenario> {
        let mut s = self.base.clone();
        s.horizon = self.report_time;
        let p = &mut s.params;
        match self.param {
            SweepParam::SK => p.s_k = value,
            SweepParam::SR => p.s_r = value,
            SweepParam::DeltaK => p.delta_k = value,
            SweepParam::DeltaR => p.delta_r = value,
            SweepParam::Alpha => p.alpha = value,
            SweepParam::Beta => p.beta = value,
            SweepParam::P => {
                s.control
                    .as_mut()
                    .ok_or_else(|| Error::validation("control", "required to sweep p"))?
                    .p = value
            }
            SweepParam::C => {
                s.chaos
                    .as_mut()
                    .ok_or_else(|| Error::validation("chaos", "required to sweep c"))?
                    .c = value
            }
        }
        s.validate()?;
        Ok(s)
    }

    fn run_row(&self, value: f64) -> SweepRow {
        match self.scenario_for(value).and_then(|s| run_scenario(&s)) {
            Ok(tr) => SweepRow {
                value,
                output: Some(tr.final_output()),
                consumption: Some(tr.final_consumption()),
                error: None,
            },
            Err(e) => SweepRow {
                value,
                output: None,
                consumption: None,
                error: Some(e.to_string()),
            },
        }
    }
}

/// Evaluates every value of the sweep on a pool of `jobs` threads. Rows keep
/// the input order; a failing row carries its error and does not stop the
/// others.
pub fn run_sweep(spec: &SweepSpec, jobs: usize) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::InvalidInput(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(|| spec.values.par_iter().map(|&v| spec.run_row(v)).collect()))
}

/// `value,Y,C,error`, one line per row.
pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut lines = vec!["value,Y,C,error".to_string()];
    let opt = |v: Option<f64>| v.map(fmt_num).unwrap_or_default();
    for r in rows {
        let err = r.error.as_deref().map(quote).unwrap_or_default();
        lines.push(format!(
            "{},{},{},{}",
            fmt_num(r.value),
            opt(r.output),
            opt(r.consumption),
            err
        ));
    }
    lines.join("\n")
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('"', "\"\""))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{EconState, ModelParams};

    fn base() -> Scenario {
        Scenario::basic(
            ModelParams::reference(),
            EconState::new(4.0, 1.0),
            200.0,
            1.0,
        )
    }

    #[test]
    fn parses_names() {
        assert_eq!("delta_r".parse::<SweepParam>().unwrap(), SweepParam::DeltaR);
        assert!("gamma".parse::<SweepParam>().is_err());
    }

    #[test]
    fn singleton_matches_direct_run() {
        let spec = SweepSpec {
            base: base(),
            param: SweepParam::DeltaR,
            values: vec![0.2],
            report_time: 200.0,
        };
        let rows = run_sweep(&spec, 2).unwrap();
        let direct = run_scenario(&spec.scenario_for(0.2).unwrap()).unwrap();
        assert_eq!(rows[0].output, Some(direct.final_output()));
        assert_eq!(rows[0].consumption, Some(direct.final_consumption()));
    }

    #[test]
    fn education_share_increases_output() {
        let spec = SweepSpec {
            base: base(),
            param: SweepParam::SR,
            values: vec![0.05, 0.1, 0.15],
            report_time: 200.0,
        };
        let ys: Vec<f64> = run_sweep(&spec, 3)
            .unwrap()
            .iter()
            .map(|r| r.output.unwrap())
            .collect();
        assert!(ys[0] < ys[1] && ys[1] < ys[2], "{ys:?}");
    }

    #[test]
    fn bad_rows_do_not_stop_the_sweep() {
        let spec = SweepSpec {
            base: base(),
            param: SweepParam::SK,
            values: vec![0.3, 0.95, 0.4],
            report_time: 50.0,
        };
        let rows = run_sweep(&spec, 1).unwrap();
        assert!(rows[0].output.is_some() && rows[2].output.is_some());
        assert!(rows[1].error.as_deref().unwrap().contains("s_k + s_r"));
        let csv = sweep_csv(&rows);
        assert!(csv.starts_with("value,Y,C,error\n0.3,"));
        assert!(csv.lines().nth(2).unwrap().starts_with("0.95,,,\""));
    }

    #[test]
    fn invalid_specs() {
        let mut spec = SweepSpec {
            base: base(),
            param: SweepParam::P,
            values: vec![0.4],
            report_time: 10.0,
        };
        assert!(run_sweep(&spec, 1).is_err());
        spec.param = SweepParam::Alpha;
        spec.values.clear();
        assert!(run_sweep(&spec, 1).is_err());
    }
}

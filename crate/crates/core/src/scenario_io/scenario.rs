use serde::{Deserialize, Serialize};

use crate::chaos::{simulate_modulated, Modulation};
use crate::control::simulate_controlled;
use crate::error::{Error, Result};
use crate::integrator::IntegratorSettings;
use crate::model::{DriverState, EconState, ModelParams, NE9_DEFAULT_B};
use crate::simulation::{simulate_basic, ScenarioKind, Trajectory};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControlBlock {
    pub p: f64,
    pub s_r0: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChaosBlock {
    pub c: f64,
    #[serde(default = "default_x0")]
    pub x0: f64,
    #[serde(default)]
    pub y0: f64,
    #[serde(default)]
    pub z0: f64,
    #[serde(default = "default_b")]
    pub b: f64,
}

fn default_x0() -> f64 {
    DriverState::standard().x
}

fn default_b() -> f64 {
    NE9_DEFAULT_B
}

impl ChaosBlock {
    pub fn modulation(&self) -> Modulation {
        Modulation {
            c: self.c,
            driver: DriverState::new(self.x0, self.y0, self.z0),
            b: self.b,
        }
    }
}

/// One reproducible simulation run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Scenario {
    pub kind: ScenarioKind,
    pub params: ModelParams,
    pub initial: EconState,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub control: Option<ControlBlock>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chaos: Option<ChaosBlock>,
    pub horizon: f64,
    pub sample_step: f64,
    pub integrator: IntegratorSettings,
}

/// Wire form: the integrator block is optional and its default depends on the
/// kind.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioDoc {
    kind: ScenarioKind,
    params: ModelParams,
    initial: EconState,
    #[serde(default)]
    control: Option<ControlBlock>,
    #[serde(default)]
    chaos: Option<ChaosBlock>,
    horizon: f64,
    sample_step: f64,
    #[serde(default)]
    integrator: Option<IntegratorSettings>,
}

/// Parses and validates a JSON scenario document.
pub fn load_scenario(text: &str) -> Result<Scenario> {
    let doc: ScenarioDoc = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let integrator = doc.integrator.unwrap_or_else(|| match doc.kind {
        ScenarioKind::Chaotic => IntegratorSettings::chaos(),
        _ => IntegratorSettings::default(),
    });
    let scenario = Scenario {
        kind: doc.kind,
        params: doc.params,
        initial: doc.initial,
        control: doc.control,
        chaos: doc.chaos,
        horizon: doc.horizon,
        sample_step: doc.sample_step,
        integrator,
    };
    scenario.validate()?;
    Ok(scenario)
}

impl Scenario {
    pub fn basic(params: ModelParams, initial: EconState, horizon: f64, sample_step: f64) -> Self {
        Self {
            kind: ScenarioKind::Basic,
            params,
            initial,
            control: None,
            chaos: None,
            horizon,
            sample_step,
            integrator: IntegratorSettings::default(),
        }
    }

    pub fn controlled(
        params: ModelParams,
        initial: EconState,
        control: ControlBlock,
        horizon: f64,
        sample_step: f64,
    ) -> Self {
        Self {
            kind: ScenarioKind::Controlled,
            control: Some(control),
            ..Self::basic(params, initial, horizon, sample_step)
        }
    }

    pub fn chaotic(
        params: ModelParams,
        initial: EconState,
        chaos: ChaosBlock,
        horizon: f64,
        sample_step: f64,
    ) -> Self {
        Self {
            kind: ScenarioKind::Chaotic,
            chaos: Some(chaos),
            integrator: IntegratorSettings::chaos(),
            ..Self::basic(params, initial, horizon, sample_step)
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if !(self.initial.k > 0.0 && self.initial.k.is_finite()) {
            return Err(Error::validation("initial.K", "must be positive"));
        }
        if !(self.initial.e > 0.0 && self.initial.e.is_finite()) {
            return Err(Error::validation("initial.E", "must be positive"));
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(Error::validation("horizon", "must be positive"));
        }
        if !(self.sample_step > 0.0 && self.sample_step.is_finite()) {
            return Err(Error::validation("sample_step", "must be positive"));
        }
        self.integrator.validate()?;

        let wants_control = self.kind == ScenarioKind::Controlled;
        let wants_chaos = self.kind == ScenarioKind::Chaotic;
        match (&self.control, wants_control) {
            (None, true) => {
                return Err(Error::validation("control", "required for kind controlled"))
            }
            (Some(_), false) => {
                return Err(Error::validation(
                    "control",
                    format!("not allowed for kind {}", self.kind),
                ))
            }
            _ => {}
        }
        match (&self.chaos, wants_chaos) {
            (None, true) => return Err(Error::validation("chaos", "required for kind chaotic")),
            (Some(_), false) => {
                return Err(Error::validation(
                    "chaos",
                    format!("not allowed for kind {}", self.kind),
                ))
            }
            _ => {}
        }
        if let Some(c) = &self.control {
            let s_r = 1.0 - self.params.s_k - c.p;
            if !(c.p > 0.0 && s_r > 0.0) {
                return Err(Error::validation(
                    "control.p",
                    format!(
                        "{} not in (0, 1 - s_k) = (0, {})",
                        c.p,
                        1.0 - self.params.s_k
                    ),
                ));
            }
            if !(c.s_r0 > 0.0 && c.s_r0.is_finite()) {
                return Err(Error::validation("control.s_r0", "must be positive"));
            }
        }
        if let Some(ch) = &self.chaos {
            for (name, v) in [
                ("chaos.c", ch.c),
                ("chaos.x0", ch.x0),
                ("chaos.y0", ch.y0),
                ("chaos.z0", ch.z0),
                ("chaos.b", ch.b),
            ] {
                if !v.is_finite() {
                    return Err(Error::validation(name, "must be finite"));
                }
            }
        }
        Ok(())
    }

    /// Non-fatal observations about a valid scenario.
    pub fn warnings(&self) -> Vec<String> {
        let mut w = Vec::new();
        if self.params.is_returns_to_scale_degenerate() {
            w.push(format!(
                "alpha + beta = {} >= 1: no stable positive equilibrium, equilibrium analysis will fail",
                self.params.alpha + self.params.beta
            ));
        }
        if let Some(ch) = &self.chaos {
            if ch.c.abs() * 2.0 >= self.params.s_k {
                w.push(format!(
                    "|c| = {} may drive the capital share s_k + c x negative",
                    ch.c.abs()
                ));
            }
        }
        w
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }
}

/// Runs a validated scenario.
pub fn run_scenario(s: &Scenario) -> Result<Trajectory> {
    match s.kind {
        ScenarioKind::Basic => simulate_basic(
            &s.params,
            s.initial,
            s.horizon,
            &s.integrator,
            s.sample_step,
        ),
        ScenarioKind::Controlled => {
            let c = s
                .control
                .ok_or_else(|| Error::validation("control", "required for kind controlled"))?;
            simulate_controlled(
                &s.params,
                c.p,
                s.initial,
                c.s_r0,
                s.horizon,
                &s.integrator,
                s.sample_step,
            )
        }
        ScenarioKind::Chaotic => {
            let c = s
                .chaos
                .ok_or_else(|| Error::validation("chaos", "required for kind chaotic"))?;
            simulate_modulated(
                &s.params,
                &c.modulation(),
                s.initial,
                s.horizon,
                &s.integrator,
                s.sample_step,
            )
        }
    }
}

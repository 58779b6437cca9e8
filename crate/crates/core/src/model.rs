//! Parameters and right-hand sides of the growth model.
//!
//! Output follows a Cobb–Douglas law `Y = E^alpha * K^beta`. Capital and
//! expertise each receive a fixed share of output and decay proportionally:
//!
//! ```text
//! dK/dt = s_k Y - delta_k K
//! dE/dt = s_r Y - delta_r E
//! ```
//!
//! Two extensions share the same core: a capital share modulated by the NE9
//! chaotic driver (`s_k + c x(t)`), and a feedback law that moves `s_r`
//! towards the level that keeps consumption at a target fraction `p` of
//! output.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default dissipation constant of the NE9 driver.
pub const NE9_DEFAULT_B: f64 = 0.55;

/// Structural constants of the model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelParams {
    /// Share of output invested in capital.
    pub s_k: f64,
    /// Share of output invested in education and research.
    pub s_r: f64,
    /// Capital depreciation rate.
    pub delta_k: f64,
    /// Rate at which expertise becomes obsolete.
    pub delta_r: f64,
    /// Output elasticity of education.
    pub alpha: f64,
    /// Output elasticity of capital.
    pub beta: f64,
    /// Minimal education share; only used to flag violations.
    #[serde(default)]
    pub s_r_floor: f64,
}

impl ModelParams {
    /// The reference parameter set: `s_r = 0.1, delta_r = 0.25, s_k = 0.4,
    /// delta_k = 0.15, alpha = 0.2, beta = 0.35`.
    pub fn reference() -> Self {
        Self {
            s_k: 0.4,
            s_r: 0.1,
            delta_k: 0.15,
            delta_r: 0.25,
            alpha: 0.2,
            beta: 0.35,
            s_r_floor: 0.0,
        }
    }

    pub fn with_s_r(mut self, s_r: f64) -> Self {
        self.s_r = s_r;
        self
    }

    pub fn with_delta_r(mut self, delta_r: f64) -> Self {
        self.delta_r = delta_r;
        self
    }

    /// Checks every bound on the parameters. `alpha + beta >= 1` is legal
    /// here; see [`ModelParams::is_returns_to_scale_degenerate`].
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("s_k", self.s_k),
            ("s_r", self.s_r),
            ("delta_k", self.delta_k),
            ("delta_r", self.delta_r),
            ("alpha", self.alpha),
            ("beta", self.beta),
            ("s_r_floor", self.s_r_floor),
        ];
        for (name, v) in fields {
            if !v.is_finite() {
                return Err(Error::validation(name, "must be finite"));
            }
        }
        if !(0.0..=1.0).contains(&self.s_k) {
            return Err(Error::validation(
                "s_k",
                format!("{} not in [0, 1]", self.s_k),
            ));
        }
        if !(self.s_r > 0.0 && self.s_r <= 1.0) {
            return Err(Error::validation(
                "s_r",
                format!("{} not in (0, 1]", self.s_r),
            ));
        }
        if self.s_r_floor < 0.0 || self.s_r < self.s_r_floor {
            return Err(Error::validation(
                "s_r_floor",
                format!(
                    "need 0 <= s_r_floor <= s_r, got {} and {}",
                    self.s_r_floor, self.s_r
                ),
            ));
        }
        if self.s_k + self.s_r > 1.0 {
            return Err(Error::validation(
                "s_k + s_r",
                format!(
                    "{} + {} exceeds 1 (negative consumption)",
                    self.s_k, self.s_r
                ),
            ));
        }
        if self.delta_k <= 0.0 {
            return Err(Error::validation("delta_k", "must be positive"));
        }
        if self.delta_r <= 0.0 {
            return Err(Error::validation("delta_r", "must be positive"));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::validation(
                "alpha",
                format!("{} not in (0, 1)", self.alpha),
            ));
        }
        if !(self.beta > 0.0 && self.beta < 1.0) {
            return Err(Error::validation(
                "beta",
                format!("{} not in (0, 1)", self.beta),
            ));
        }
        Ok(())
    }

    /// True when `alpha + beta >= 1`: the positive equilibrium is lost or
    /// unstable.
    pub fn is_returns_to_scale_degenerate(&self) -> bool {
        self.alpha + self.beta >= 1.0
    }

    /// `Y = E^alpha * K^beta`.
    pub fn production(&self, state: &EconState) -> Result<f64> {
        state.check()?;
        Ok(self.output_unchecked(state.k, state.e))
    }

    fn output_unchecked(&self, k: f64, e: f64) -> f64 {
        e.powf(self.alpha) * k.powf(self.beta)
    }

    /// `(I_k, I_r) = (s_k Y, s_r Y)`.
    pub fn investments(&self, output: f64) -> (f64, f64) {
        (self.s_k * output, self.s_r * output)
    }

    /// Consumption `(1 - s_k - s_r) Y` for the given current education share.
    pub fn consumption(&self, s_r: f64, output: f64) -> f64 {
        (1.0 - self.s_k - s_r) * output
    }

    pub fn basic_field(&self, state: &EconState) -> Result<[f64; 2]> {
        self.field_with_shares(state, self.s_k, self.s_r)
    }

    fn field_with_shares(&self, state: &EconState, s_k: f64, s_r: f64) -> Result<[f64; 2]> {
        let y = self.production(state)?;
        Ok([
            s_k * y - self.delta_k * state.k,
            s_r * y - self.delta_r * state.e,
        ])
    }

    /// The 5-D system with capital share `s_k + c x`, state order
    /// `(K, E, x, y, z)`.
    pub fn modulated_field(&self, c: f64, state: &ChaosAugmentedState, b: f64) -> Result<[f64; 5]> {
        let d = &state.driver;
        let [dk, de] = self.field_with_shares(&state.econ, self.s_k + c * d.x, self.s_r)?;
        let [dx, dy, dz] = ne9_field(d, b);
        Ok([dk, de, dx, dy, dz])
    }

    /// The 3-D controlled system, state order `(K, E, s_r)`. The state's own
    /// `s_r` replaces the parameter value.
    pub fn control_field(&self, p: f64, state: &ControlledState) -> Result<[f64; 3]> {
        let y = self.production(&state.econ)?;
        let econ = &state.econ;
        Ok([
            self.s_k * y - self.delta_k * econ.k,
            state.s_r * y - self.delta_r * econ.e,
            (1.0 - self.s_k - state.s_r - p) * y,
        ])
    }
}

impl Default for ModelParams {
    fn default() -> Self {
        Self::reference()
    }
}

/// Capital and expertise stocks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EconState {
    #[serde(rename = "K")]
    pub k: f64,
    #[serde(rename = "E")]
    pub e: f64,
}

impl EconState {
    pub fn new(k: f64, e: f64) -> Self {
        Self { k, e }
    }

    pub fn check(&self) -> Result<()> {
        if !(self.k > 0.0 && self.k.is_finite()) {
            return Err(Error::Domain(format!("K must be positive, got {}", self.k)));
        }
        if !(self.e > 0.0 && self.e.is_finite()) {
            return Err(Error::Domain(format!("E must be positive, got {}", self.e)));
        }
        Ok(())
    }
}

/// NE9 coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriverState {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl DriverState {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    /// `(0.5, 0, 0)`.
    pub fn standard() -> Self {
        Self::new(0.5, 0.0, 0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlledState {
    pub econ: EconState,
    pub s_r: f64,
}

impl ControlledState {
    pub fn from_slice(v: &[f64]) -> Self {
        Self {
            econ: EconState::new(v[0], v[1]),
            s_r: v[2],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChaosAugmentedState {
    pub econ: EconState,
    pub driver: DriverState,
}

impl ChaosAugmentedState {
    pub fn from_slice(v: &[f64]) -> Self {
        Self {
            econ: EconState::new(v[0], v[1]),
            driver: DriverState::new(v[2], v[3], v[4]),
        }
    }
}

/// NE9: `x' = y, y' = -x - y z, z' = -x z + 7 x^2 - b`.
pub fn ne9_field(s: &DriverState, b: f64) -> [f64; 3] {
    [s.y, -s.x - s.y * s.z, -s.x * s.z + 7.0 * s.x * s.x - b]
}

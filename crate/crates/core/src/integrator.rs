//! Adaptive Dormand–Prince 5(4) integration of autonomous ODE systems.
//!
//! The tableau is the classical DOPRI5 pair (5th-order propagation, embedded
//! 4th-order error estimate, first-same-as-last). Output samples are not
//! interpolated: the step is clipped so the integrator lands exactly on every
//! requested sample time, and the step-size proposal from before the clip is
//! carried forward.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

// Node coefficients c_i are not needed: every field here is autonomous.
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
// Row 7 doubles as the 5th-order weights.
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

// b - b_hat
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const SAFETY: f64 = 0.9;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 5.0;
/// Shrink factor applied when a trial stage leaves the field's domain.
const DOMAIN_SHRINK: f64 = 0.25;

/// Tolerances and step limits for [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorSettings {
    pub rel_tol: f64,
    pub abs_tol: f64,
    #[serde(default = "default_initial_step")]
    pub initial_step: f64,
    #[serde(default = "default_max_step")]
    pub max_step: f64,
    #[serde(default = "default_max_steps")]
    pub max_steps: usize,
}

fn default_initial_step() -> f64 {
    1e-3
}

fn default_max_step() -> f64 {
    1.0
}

fn default_max_steps() -> usize {
    10_000_000
}

impl Default for IntegratorSettings {
    fn default() -> Self {
        Self {
            rel_tol: 1e-8,
            abs_tol: 1e-10,
            initial_step: default_initial_step(),
            max_step: default_max_step(),
            max_steps: default_max_steps(),
        }
    }
}

impl IntegratorSettings {
    /// Tighter settings used for runs driven by the chaotic system.
    pub fn chaos() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            ..Self::default()
        }
    }

    pub fn with_tolerances(mut self, rel_tol: f64, abs_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self.abs_tol = abs_tol;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if !positive(self.rel_tol) {
            return Err(Error::validation("integrator.rel_tol", "must be positive"));
        }
        if !positive(self.abs_tol) {
            return Err(Error::validation("integrator.abs_tol", "must be positive"));
        }
        if !positive(self.initial_step) {
            return Err(Error::validation(
                "integrator.initial_step",
                "must be positive",
            ));
        }
        if !positive(self.max_step) || self.initial_step > self.max_step {
            return Err(Error::validation(
                "integrator.max_step",
                "must be positive and at least initial_step",
            ));
        }
        if self.max_steps == 0 {
            return Err(Error::validation(
                "integrator.max_steps",
                "must be positive",
            ));
        }
        Ok(())
    }
}

/// States sampled on a fixed output grid.
#[derive(Debug, Clone, PartialEq)]
pub struct RawTrajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
}

impl RawTrajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last_state(&self) -> &[f64] {
        self.states.last().map(Vec::as_slice).unwrap_or(&[])
    }

    /// One component of the state as a time series.
    pub fn component(&self, index: usize) -> Vec<f64> {
        self.states.iter().map(|s| s[index]).collect()
    }
}

/// The arithmetic progression `t0, t0 + step, ...` truncated below `t1`, with
/// `t1` always appended. A grid point within `1e-9·step` of `t1` is merged
/// into it.
pub fn sample_grid(t0: f64, t1: f64, step: f64) -> Vec<f64> {
    let mut times = Vec::new();
    let mut i = 0usize;
    loop {
        let t = t0 + i as f64 * step;
        if t >= t1 - 1e-9 * step {
            break;
        }
        times.push(t);
        i += 1;
    }
    times.push(t1);
    times
}

/// Integrates the autonomous system `dy/dt = field(y)` from `t0` to `t1`,
/// sampling on [`sample_grid`].
///
/// `field` writes the derivative into its second argument and may refuse a
/// state with an error (typically [`Error::Domain`]). A refused trial stage is
/// treated as a rejected step; the error is only returned once the step size
/// has collapsed, wrapped in [`Error::AtTime`].
pub fn integrate<F>(
    mut field: F,
    y0: &[f64],
    t0: f64,
    t1: f64,
    settings: &IntegratorSettings,
    sample_step: f64,
) -> Result<RawTrajectory>
where
    F: FnMut(&[f64], &mut [f64]) -> Result<()>,
{
    settings.validate()?;
    if y0.is_empty() {
        return Err(Error::InvalidInput(
            "state must have at least one component".into(),
        ));
    }
    if !(t0.is_finite() && t1.is_finite() && t1 > t0) {
        return Err(Error::InvalidInput(format!(
            "need t1 > t0, got [{t0}, {t1}]"
        )));
    }
    if !(sample_step.is_finite() && sample_step > 0.0) {
        return Err(Error::InvalidInput(format!(
            "sample_step must be positive, got {sample_step}"
        )));
    }
    if y0.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteState { t: t0 });
    }

    let grid = sample_grid(t0, t1, sample_step);
    let n = y0.len();
    let mut y = y0.to_vec();
    let mut k1 = vec![0.0; n];
    field(&y, &mut k1).map_err(|e| Error::AtTime {
        t: t0,
        source: Box::new(e),
    })?;

    let mut stepper = Stepper::new(n);
    let mut states = Vec::with_capacity(grid.len());
    states.push(y.clone());

    let mut t = t0;
    let mut h = settings.initial_step.min(settings.max_step);
    let mut attempts = 0usize;

    for &target in &grid[1..] {
        while t < target {
            attempts += 1;
            if attempts > settings.max_steps {
                return Err(Error::StepLimitExceeded {
                    t,
                    max_steps: settings.max_steps,
                });
            }
            let remaining = target - t;
            let clipped = h >= remaining;
            let h_try = if clipped { remaining } else { h };
            let h_min = 1e-14 * t.abs().max(1.0);

            match stepper.step(&mut field, &y, &k1, h_try, settings) {
                Ok(err) if err.is_finite() && err <= 1.0 => {
                    let fac = (SAFETY * err.powf(-0.2)).clamp(FAC_MIN, FAC_MAX);
                    let proposal = h_try * fac;
                    h = if clipped { h.max(proposal) } else { proposal };
                    h = h.min(settings.max_step);
                    t = if clipped { target } else { t + h_try };
                    std::mem::swap(&mut y, &mut stepper.y_new);
                    std::mem::swap(&mut k1, &mut stepper.k[6]);
                    if y.iter().any(|v| !v.is_finite()) {
                        return Err(Error::NonFiniteState { t });
                    }
                }
                Ok(err) => {
                    if !err.is_finite() {
                        if h_try < h_min {
                            return Err(Error::NonFiniteState { t });
                        }
                        h = h_try * DOMAIN_SHRINK;
                    } else {
                        let fac = (SAFETY * err.powf(-0.2)).clamp(FAC_MIN, 1.0);
                        h = h_try * fac;
                    }
                    if h < h_min {
                        return Err(Error::NonFiniteState { t });
                    }
                }
                Err(e) => {
                    h = h_try * DOMAIN_SHRINK;
                    if h < h_min {
                        return Err(Error::AtTime {
                            t,
                            source: Box::new(e),
                        });
                    }
                }
            }
        }
        states.push(y.clone());
    }

    Ok(RawTrajectory {
        times: grid,
        states,
    })
}

/// Scratch space for one Dormand–Prince step.
struct Stepper {
    k: [Vec<f64>; 7],
    tmp: Vec<f64>,
    y_new: Vec<f64>,
}

impl Stepper {
    fn new(n: usize) -> Self {
        Self {
            k: std::array::from_fn(|_| vec![0.0; n]),
            tmp: vec![0.0; n],
            y_new: vec![0.0; n],
        }
    }

    /// Fills `y_new` and `k[6]` (the derivative at `y_new`) and returns the
    /// scaled error norm.
    fn step<F>(
        &mut self,
        field: &mut F,
        y: &[f64],
        k1: &[f64],
        h: f64,
        settings: &IntegratorSettings,
    ) -> Result<f64>
    where
        F: FnMut(&[f64], &mut [f64]) -> Result<()>,
    {
        let n = y.len();
        self.k[0].copy_from_slice(k1);

        let stages: [&[f64]; 5] = [
            &[A21],
            &[A31, A32],
            &[A41, A42, A43],
            &[A51, A52, A53, A54],
            &[A61, A62, A63, A64, A65],
        ];
        for (s, coeffs) in stages.iter().enumerate() {
            for i in 0..n {
                let mut acc = 0.0;
                for (j, a) in coeffs.iter().enumerate() {
                    acc += a * self.k[j][i];
                }
                self.tmp[i] = y[i] + h * acc;
            }
            field(&self.tmp, &mut self.k[s + 1])?;
        }

        for i in 0..n {
            let k = &self.k;
            self.y_new[i] = y[i]
                + h * (A71 * k[0][i]
                    + A73 * k[2][i]
                    + A74 * k[3][i]
                    + A75 * k[4][i]
                    + A76 * k[5][i]);
        }
        field(&self.y_new, &mut self.k[6])?;

        let mut err: f64 = 0.0;
        for i in 0..n {
            let k = &self.k;
            let e = h
                * (E1 * k[0][i]
                    + E3 * k[2][i]
                    + E4 * k[3][i]
                    + E5 * k[4][i]
                    + E6 * k[5][i]
                    + E7 * k[6][i]);
            let scale = settings.abs_tol + settings.rel_tol * y[i].abs().max(self.y_new[i].abs());
            let ratio = e.abs() / scale;
            if ratio.is_nan() {
                return Ok(f64::NAN);
            }
            err = err.max(ratio);
        }
        Ok(err)
    }
}

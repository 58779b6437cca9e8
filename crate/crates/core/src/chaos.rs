//! The NE9 chaotic driver and the growth model with a chaotically modulated
//! capital share.

use crate::error::{Error, Result};
use crate::integrator::{integrate, IntegratorSettings, RawTrajectory};
use crate::model::{
    ne9_field, ChaosAugmentedState, DriverState, EconState, ModelParams, NE9_DEFAULT_B,
};
use crate::simulation::{ScenarioKind, Trajectory};

/// Default sample spacing for chaos runs; also the quadrature step of
/// [`running_average`].
pub const CHAOS_SAMPLE_STEP: f64 = 0.01;

/// Modulation of the capital share by `c * x(t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Modulation {
    pub c: f64,
    pub driver: DriverState,
    pub b: f64,
}

impl Modulation {
    /// Amplitude `c` with the standard driver start `(0.5, 0, 0)` and `b = 0.55`.
    pub fn new(c: f64) -> Self {
        Self {
            c,
            driver: DriverState::standard(),
            b: NE9_DEFAULT_B,
        }
    }
}

/// Time average `A(t) = (1/t) ∫_0^t x(s) ds` for every sample with `t > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct AverageSeries {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

impl AverageSeries {
    pub fn last(&self) -> Option<(f64, f64)> {
        Some((*self.times.last()?, *self.values.last()?))
    }
}

pub fn simulate_ne9(
    b: f64,
    start: DriverState,
    horizon: f64,
    settings: &IntegratorSettings,
    sample_step: f64,
) -> Result<RawTrajectory> {
    integrate(
        |v, dv| {
            let d = ne9_field(&DriverState::new(v[0], v[1], v[2]), b);
            dv.copy_from_slice(&d);
            Ok(())
        },
        &[start.x, start.y, start.z],
        0.0,
        horizon,
        settings,
        sample_step,
    )
}

/// Running trapezoidal integral `∫_{t_0}^{t_i} x`, one entry per sample.
pub fn cumulative_trapezoid(times: &[f64], xs: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    let mut out = Vec::with_capacity(xs.len());
    if xs.is_empty() {
        return out;
    }
    out.push(0.0);
    for i in 1..xs.len() {
        acc += 0.5 * (times[i] - times[i - 1]) * (xs[i] + xs[i - 1]);
        out.push(acc);
    }
    out
}

pub fn running_average(times: &[f64], xs: &[f64]) -> Result<AverageSeries> {
    if times.len() != xs.len() {
        return Err(Error::InvalidInput(format!(
            "{} times but {} values",
            times.len(),
            xs.len()
        )));
    }
    if times.len() < 2 {
        return Err(Error::InvalidInput("need at least two samples".into()));
    }
    if times[0] != 0.0 {
        return Err(Error::InvalidInput(format!(
            "series must start at t = 0, not {}",
            times[0]
        )));
    }
    let integral = cumulative_trapezoid(times, xs);
    let (times, values) = times
        .iter()
        .zip(&integral)
        .skip(1)
        .map(|(t, i)| (*t, i / t))
        .unzip();
    Ok(AverageSeries { times, values })
}

/// Integrates the five-dimensional modulated system `(K, E, x, y, z)`.
///
/// The returned trajectory records the smallest sampled effective capital
/// share in `flags.min_effective_sk`.
pub fn simulate_modulated(
    params: &ModelParams,
    modulation: &Modulation,
    econ0: EconState,
    horizon: f64,
    settings: &IntegratorSettings,
    sample_step: f64,
) -> Result<Trajectory> {
    econ0.check()?;
    let m = *modulation;
    let d = m.driver;
    let raw = integrate(
        |v, dv| {
            let f = params.modulated_field(m.c, &ChaosAugmentedState::from_slice(v), m.b)?;
            dv.copy_from_slice(&f);
            Ok(())
        },
        &[econ0.k, econ0.e, d.x, d.y, d.z],
        0.0,
        horizon,
        settings,
        sample_step,
    )?;
    Ok(Trajectory::from_raw(
        ScenarioKind::Chaotic,
        raw,
        params,
        m.c,
    ))
}

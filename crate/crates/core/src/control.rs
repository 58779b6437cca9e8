//! Consumption-targeting control of the education share.
//!
//! The education share becomes a state variable driven by the consumption gap,
//! `ds_r/dt = (1 - s_k - s_r - p) Y`, so consumption is steered to `p Y`.

use serde::Serialize;

use crate::analysis::controlled_equilibrium;
use crate::error::{Error, Result};
use crate::integrator::{integrate, IntegratorSettings};
use crate::model::{ControlledState, EconState, ModelParams};
use crate::simulation::{ScenarioKind, Trajectory};

/// Outcome of a tipping-point search: the target fraction at which output
/// after the horizon equals its initial value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TippingResult {
    pub p_star: f64,
    pub bracket: (f64, f64),
    /// `Y(horizon) - Y(0)` at the two bracket ends.
    pub growth_at_bracket: (f64, f64),
    pub horizon_used: f64,
    pub evaluations: usize,
}

fn check_target(params: &ModelParams, p: f64) -> Result<()> {
    let s_r = 1.0 - params.s_k - p;
    if !(p > 0.0 && s_r > 0.0) {
        return Err(Error::InvalidTarget { p, s_r });
    }
    Ok(())
}

/// Integrates `(K, E, s_r)` from `(econ0, s_r0)`. `params.s_r` is ignored.
///
/// `s_r` is not clamped; leaving `[s_r_floor, 1 - s_k]` sets
/// `flags.constraint_violation`.
pub fn simulate_controlled(
    params: &ModelParams,
    p: f64,
    econ0: EconState,
    s_r0: f64,
    horizon: f64,
    settings: &IntegratorSettings,
    sample_step: f64,
) -> Result<Trajectory> {
    check_target(params, p)?;
    if !(s_r0 > 0.0 && s_r0.is_finite()) {
        return Err(Error::validation("control.s_r0", "must be positive"));
    }
    econ0.check()?;
    let raw = integrate(
        |v, dv| {
            let f = params.control_field(p, &ControlledState::from_slice(v))?;
            dv.copy_from_slice(&f);
            Ok(())
        },
        &[econ0.k, econ0.e, s_r0],
        0.0,
        horizon,
        settings,
        sample_step,
    )?;
    Ok(Trajectory::from_raw(
        ScenarioKind::Controlled,
        raw,
        params,
        0.0,
    ))
}

/// `Y(horizon) - Y(0)` for target `p`.
pub fn output_growth(
    params: &ModelParams,
    p: f64,
    econ0: EconState,
    s_r0: f64,
    horizon: f64,
    settings: &IntegratorSettings,
) -> Result<f64> {
    let tr = simulate_controlled(params, p, econ0, s_r0, horizon, settings, horizon)?;
    Ok(tr.final_output() - tr.output[0])
}

/// Bisects on `p` for the root of [`output_growth`] until the bracket is no
/// wider than `tol`.
#[allow(clippy::too_many_arguments)]
pub fn find_tipping(
    params: &ModelParams,
    econ0: EconState,
    s_r0: f64,
    horizon: f64,
    p_low: f64,
    p_high: f64,
    tol: f64,
    settings: &IntegratorSettings,
) -> Result<TippingResult> {
    if !(tol > 0.0) {
        return Err(Error::InvalidInput(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let growth = |p: f64| output_growth(params, p, econ0, s_r0, horizon, settings);
    let no_change = |g_lo, g_hi| Error::NoSignChange {
        p_low,
        p_high,
        growth_low: g_lo,
        growth_high: g_hi,
    };
    if !(p_low < p_high) {
        return Err(no_change(f64::NAN, f64::NAN));
    }

    let (mut lo, mut hi) = (p_low, p_high);
    let (mut g_lo, mut g_hi) = (growth(lo)?, growth(hi)?);
    let mut evaluations = 2;
    if !(g_lo * g_hi < 0.0) {
        return Err(no_change(g_lo, g_hi));
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let g = growth(mid)?;
        evaluations += 1;
        if g == 0.0 {
            lo = mid;
            hi = mid;
            g_lo = g;
            g_hi = g;
            break;
        }
        if (g > 0.0) == (g_lo > 0.0) {
            lo = mid;
            g_lo = g;
        } else {
            hi = mid;
            g_hi = g;
        }
    }
    Ok(TippingResult {
        p_star: 0.5 * (lo + hi),
        bracket: (lo, hi),
        growth_at_bracket: (g_lo, g_hi),
        horizon_used: horizon,
        evaluations,
    })
}

/// Long-run `(Y, C)` at the controlled equilibrium; `C = p Y`.
pub fn long_run_outcome(params: &ModelParams, p: f64) -> Result<(f64, f64)> {
    let report = controlled_equilibrium(params, p)?;
    Ok((report.y0, p * report.y0))
}

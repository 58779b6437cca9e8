//! Closed-form equilibria and linear stability.
//!
//! At a positive equilibrium both rates vanish, which in logarithms is the
//! linear system
//!
//! ```text
//!  alpha     ln E - (1 - beta) ln K = ln(delta_k / s_k)
//! -(1-alpha) ln E +      beta  ln K = ln(delta_r / s_r)
//! ```
//!
//! with determinant `alpha + beta - 1`. The Jacobian at that point simplifies
//! to entries in the rates alone, so eigenvalues come from a quadratic.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{EconState, ModelParams};

/// Threshold for `|alpha + beta - 1|`, `|delta_k - delta_r|` and `|lambda|`.
pub const DEGENERACY_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Stability {
    StableNode,
    StableFocus,
    Saddle,
    Unstable,
    Degenerate,
}

impl std::fmt::Display for Stability {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Stability::StableNode => "StableNode",
            Stability::StableFocus => "StableFocus",
            Stability::Saddle => "Saddle",
            Stability::Unstable => "Unstable",
            Stability::Degenerate => "Degenerate",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumReport {
    pub k0: f64,
    pub e0: f64,
    pub y0: f64,
    /// Education share at the equilibrium (the parameter for the basic system,
    /// `1 - s_k - p` for the controlled one).
    pub s_r: f64,
    /// Row-major, state order `(K, E)` or `(K, E, s_r)`.
    pub jacobian: Vec<Vec<f64>>,
    pub eigenvalues: Vec<Complex64>,
    pub classification: Stability,
}

impl EquilibriumReport {
    pub fn state(&self) -> EconState {
        EconState::new(self.k0, self.e0)
    }
}

fn check_structure(params: &ModelParams) -> Result<()> {
    let det = params.alpha + params.beta - 1.0;
    if det.abs() < DEGENERACY_EPS {
        return Err(Error::StructurallyUnstable {
            sum: params.alpha + params.beta,
        });
    }
    if !(params.s_k > 0.0 && params.s_r > 0.0) {
        return Err(Error::NoEquilibrium(format!(
            "both investment shares must be positive (s_k = {}, s_r = {})",
            params.s_k, params.s_r
        )));
    }
    Ok(())
}

/// The unique positive equilibrium `(K0, E0)` of the basic system.
pub fn equilibrium(params: &ModelParams) -> Result<EconState> {
    check_structure(params)?;
    let (a, b) = (params.alpha, params.beta);
    let r1 = (params.delta_k / params.s_k).ln();
    let r2 = (params.delta_r / params.s_r).ln();
    // Unknowns (ln E, ln K); matrix [[a, -(1-b)], [-(1-a), b]].
    let det = a * b - (1.0 - a) * (1.0 - b);
    let ln_e = (r1 * b + (1.0 - b) * r2) / det;
    let ln_k = (a * r2 + (1.0 - a) * r1) / det;
    let state = EconState::new(ln_k.exp(), ln_e.exp());
    if !(state.k.is_finite() && state.e.is_finite() && state.k > 0.0 && state.e > 0.0) {
        return Err(Error::NoEquilibrium(format!(
            "equilibrium under/overflows: ln K = {ln_k}, ln E = {ln_e}"
        )));
    }
    Ok(state)
}

/// Largest relative residual of the two equilibrium conditions
/// `E^alpha = (delta_k/s_k) K^(1-beta)` and `K^beta = (delta_r/s_r) E^(1-alpha)`.
pub fn equilibrium_residual(params: &ModelParams, state: &EconState) -> f64 {
    let (k, e) = (state.k, state.e);
    let lhs1 = e.powf(params.alpha);
    let rhs1 = params.delta_k / params.s_k * k.powf(1.0 - params.beta);
    let lhs2 = k.powf(params.beta);
    let rhs2 = params.delta_r / params.s_r * e.powf(1.0 - params.alpha);
    let rel = |l: f64, r: f64| (l - r).abs() / l.abs().max(r.abs());
    rel(lhs1, rhs1).max(rel(lhs2, rhs2))
}

/// Jacobian of the basic system at its equilibrium, state order `(K, E)`.
pub fn jacobian_basic(params: &ModelParams) -> Result<[[f64; 2]; 2]> {
    check_structure(params)?;
    let p = params;
    Ok([
        [
            (p.beta - 1.0) * p.delta_k,
            p.alpha * (p.s_k / p.s_r) * p.delta_r,
        ],
        [
            p.beta * (p.s_r / p.s_k) * p.delta_k,
            (p.alpha - 1.0) * p.delta_r,
        ],
    ])
}

/// Eigenvalues of [`jacobian_basic`], ordered by decreasing real part.
///
/// Trace and determinant are taken in their reduced forms
/// `(alpha-1) delta_r + (beta-1) delta_k` and `(1-alpha-beta) delta_r delta_k`.
pub fn eigen_basic(params: &ModelParams) -> Result<[Complex64; 2]> {
    check_structure(params)?;
    let p = params;
    let tr = (p.alpha - 1.0) * p.delta_r + (p.beta - 1.0) * p.delta_k;
    let det = (1.0 - p.alpha - p.beta) * p.delta_r * p.delta_k;
    Ok(quadratic_roots(tr, det))
}

/// Roots of `lambda^2 - tr lambda + det = 0`, larger real part first.
pub fn quadratic_roots(tr: f64, det: f64) -> [Complex64; 2] {
    let disc = tr * tr - 4.0 * det;
    if disc >= 0.0 {
        let sq = disc.sqrt();
        // Cancellation-free: take the larger-magnitude root directly.
        let big = 0.5 * (tr + tr.signum() * sq);
        let small = if big != 0.0 { det / big } else { 0.0 };
        let (hi, lo) = if big >= small {
            (big, small)
        } else {
            (small, big)
        };
        [Complex64::new(hi, 0.0), Complex64::new(lo, 0.0)]
    } else {
        let re = 0.5 * tr;
        let im = 0.5 * (-disc).sqrt();
        [Complex64::new(re, im), Complex64::new(re, -im)]
    }
}

/// Classifies a fixed point from its spectrum. Non-hyperbolic spectra (any
/// eigenvalue with modulus or real part below [`DEGENERACY_EPS`]) are
/// `Degenerate`.
pub fn classify(eigenvalues: &[Complex64]) -> Stability {
    if eigenvalues
        .iter()
        .any(|l| l.norm() < DEGENERACY_EPS || l.re.abs() < DEGENERACY_EPS)
    {
        return Stability::Degenerate;
    }
    let all_real = eigenvalues.iter().all(|l| l.im == 0.0);
    let all_negative = eigenvalues.iter().all(|l| l.re < 0.0);
    let any_negative = eigenvalues.iter().any(|l| l.re < 0.0);
    let any_positive = eigenvalues.iter().any(|l| l.re > 0.0);
    match (all_negative, all_real) {
        (true, true) => Stability::StableNode,
        (true, false) => Stability::StableFocus,
        _ if all_real && any_negative && any_positive => Stability::Saddle,
        _ => Stability::Unstable,
    }
}

/// Full report for the basic system.
pub fn basic_report(params: &ModelParams) -> Result<EquilibriumReport> {
    let eq = equilibrium(params)?;
    let jac = jacobian_basic(params)?;
    let eig = eigen_basic(params)?;
    Ok(EquilibriumReport {
        k0: eq.k,
        e0: eq.e,
        y0: params.production(&eq)?,
        s_r: params.s_r,
        jacobian: jac.iter().map(|r| r.to_vec()).collect(),
        eigenvalues: eig.to_vec(),
        classification: classify(&eig),
    })
}

/// Equilibrium of the consumption-controlled system for target fraction `p`.
///
/// The education share settles at `s_r* = 1 - s_k - p`; `(K0, E0)` is the
/// basic equilibrium at that share. The Jacobian is block upper-triangular, so
/// the spectrum is the basic pair plus `-Y0`.
pub fn controlled_equilibrium(params: &ModelParams, p: f64) -> Result<EquilibriumReport> {
    let s_r = 1.0 - params.s_k - p;
    if !(p > 0.0 && p < 1.0) || !(s_r > 0.0) {
        return Err(Error::InvalidTarget { p, s_r });
    }
    let at_target = params.with_s_r(s_r);
    let eq = equilibrium(&at_target)?;
    let y0 = at_target.production(&eq)?;
    let j2 = jacobian_basic(&at_target)?;
    let [l1, l2] = eigen_basic(&at_target)?;
    let l3 = Complex64::new(-y0, 0.0);
    let mut eigenvalues = vec![l1, l2, l3];
    eigenvalues.sort_by(|a, b| b.re.total_cmp(&a.re));
    let jacobian = vec![
        vec![j2[0][0], j2[0][1], 0.0],
        vec![j2[1][0], j2[1][1], y0],
        vec![0.0, 0.0, -y0],
    ];
    Ok(EquilibriumReport {
        k0: eq.k,
        e0: eq.e,
        y0,
        s_r,
        jacobian,
        classification: classify(&eigenvalues),
        eigenvalues,
    })
}

/// Slope `s_k / s_r` of the invariant line `K = (s_k/s_r) E`, which exists
/// only when the two decay rates coincide.
pub fn invariant_manifold(params: &ModelParams) -> Option<f64> {
    ((params.delta_k - params.delta_r).abs() < DEGENERACY_EPS).then(|| params.s_k / params.s_r)
}

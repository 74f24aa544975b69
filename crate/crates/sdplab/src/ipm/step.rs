//! Neighborhood-safeguarded step length selection.

use super::newton::NewtonDirection;
use super::{centrality, IpmParams, IteratePoint};
use crate::error::{Error, Result};
use crate::symmat::SymMat;

/// Exact step to the cone boundary along delta from an interior base:
/// the largest s with base + s·delta ≻ 0, computed from the smallest
/// eigenvalue of L⁻¹ delta L⁻ᵀ.
fn boundary_step(base: &SymMat, delta: &SymMat) -> Result<f64> {
    let l = base.chol_or_none().ok_or_else(|| {
        Error::NotPositiveDefinite("step_length: iterate is not interior".into())
    })?;
    let lmin = l.inv_conj(delta).min_eig()?;
    Ok(if lmin >= 0.0 { f64::INFINITY } else { -1.0 / lmin })
}

/// Step length for a Newton direction: the largest s on the backtracking
/// grid s₀, 0.8·s₀, ... with s₀ = min(1, tau_boundary·s_pd) such that
///
///   (i)   X + sΔX ≻ 0 and S + sΔS ≻ 0,
///   (ii)  the new pair stays in the Frobenius neighborhood
///         ‖W⁺ − μ⁺I‖_F ≤ gamma·μ⁺ (with 1e-12 absolute slack),
///   (iii) gap⁺ ≤ (1 − eta_gap·s)·gap + 1e-12.
///
/// A numerically zero direction short-circuits to s = 1: the point does
/// not move, so the contraction predicate is waived. Fails with `Stall`
/// when 30 backtracks find nothing admissible or the grid drops below
/// 1e-12.
pub fn step_length(pt: &IteratePoint, dir: &NewtonDirection, params: &IpmParams) -> Result<f64> {
    params.validate()?;
    let scale_x = 1.0 + pt.x.frob_norm();
    let scale_s = 1.0 + pt.s.frob_norm();
    if dir.dx.frob_norm() <= 1e-14 * scale_x && dir.ds.frob_norm() <= 1e-14 * scale_s {
        return Ok(1.0);
    }

    let s_pd = boundary_step(&pt.x, &dir.dx)?.min(boundary_step(&pt.s, &dir.ds)?);
    let gap0 = pt.x.inner(&pt.s)?;
    let mut s = (params.tau_boundary * s_pd).min(1.0);
    for _ in 0..30 {
        if s < 1e-12 {
            break;
        }
        let xc = pt.x.axpy(s, &dir.dx)?;
        let sc = pt.s.axpy(s, &dir.ds)?;
        if xc.chol_or_none().is_some() && sc.chol_or_none().is_some() {
            let (dist, mu) = centrality(&xc, &sc)?;
            let gapc = xc.inner(&sc)?;
            if dist <= params.gamma * mu + 1e-12
                && gapc <= (1.0 - params.eta_gap * s) * gap0 + 1e-12
            {
                return Ok(s);
            }
        }
        s *= 0.8;
    }
    Err(Error::Stall(format!(
        "no admissible step in (1e-12, {:.3e}] at gap {gap0:.3e}",
        (params.tau_boundary * s_pd).min(1.0)
    )))
}

//! Central point solver: finds the point on the central path of a given
//! problem at a prescribed barrier value.

use super::newton::newton_direction;
use super::{residuals, vec_add_scaled, vec_norm, IteratePoint};
use crate::error::{Error, Result};
use crate::model::SdpProblem;
use crate::symmat::SymMat;

const MAX_ITERS: usize = 300;

/// Scale-free distance from the ν-level set plus scaled residual norms.
/// Driving this to zero lands on the central point.
fn merit(p: &SdpProblem, pt: &IteratePoint, nu: f64) -> Result<f64> {
    let l = pt
        .x
        .chol_or_none()
        .ok_or_else(|| Error::NotPositiveDefinite("merit needs an interior point".into()))?;
    let w = l.conj_lt_m_l(&pt.s);
    let eig = w.eigh()?;
    let dist2: f64 = eig.values.iter().map(|lam| (lam - nu) * (lam - nu)).sum();
    let (r_p, r_d) = residuals(p, pt)?;
    let sp = 1.0 + vec_norm(p.rhs());
    let sd = 1.0 + p.cost().frob_norm();
    Ok(dist2 / (nu * nu)
        + (vec_norm(&r_p) / sp).powi(2)
        + (r_d.frob_norm() / sd).powi(2))
}

fn converged(p: &SdpProblem, pt: &IteratePoint, nu: f64) -> Result<bool> {
    let l = match pt.x.chol_or_none() {
        Some(l) => l,
        None => return Ok(false),
    };
    let w = l.conj_lt_m_l(&pt.s);
    let eig = w.eigh()?;
    let dist = eig
        .values
        .iter()
        .map(|lam| (lam - nu) * (lam - nu))
        .sum::<f64>()
        .sqrt();
    if dist > 1e-7 * nu {
        return Ok(false);
    }
    let (r_p, r_d) = residuals(p, pt)?;
    Ok(vec_norm(&r_p) <= 1e-9 * (1.0 + vec_norm(p.rhs()))
        && r_d.frob_norm() <= 1e-9 * (1.0 + p.cost().frob_norm()))
}

/// Solve for the central point of `p` at barrier value `nu`: the unique
/// interior pair with A(X) = b, C − A^*(y) = S, and X·S = ν·I.
///
/// Damped Newton iteration with a per-step target that never asks for
/// more than a fourfold drop in the barrier value, accepted on strict
/// merit decrease. `warm` seeds the iteration when it is interior;
/// otherwise the start is a centered pair of scaled identities. The
/// returned point has `t = 0`: it is a point for `p` itself, and its
/// residual tolerances scale with the data norms.
pub fn central_point(
    p: &SdpProblem,
    nu: f64,
    warm: Option<&IteratePoint>,
) -> Result<IteratePoint> {
    if !nu.is_finite() || nu <= 0.0 {
        return Err(Error::Domain(format!("barrier value must be positive, got {nu}")));
    }
    let n = p.dim();
    let mut pt = match warm {
        Some(w)
            if w.x.dim() == n
                && w.s.dim() == n
                && w.y.len() == p.num_constraints()
                && w.x.chol_or_none().is_some()
                && w.s.chol_or_none().is_some() =>
        {
            IteratePoint { x: w.x.clone(), s: w.s.clone(), y: w.y.clone(), t: 0.0 }
        }
        _ => {
            let rho = 10.0f64.max(2.0 * (1.0 + vec_norm(p.rhs())));
            IteratePoint {
                x: SymMat::scaled_identity(n, rho),
                s: SymMat::scaled_identity(n, nu / rho),
                y: vec![0.0; p.num_constraints()],
                t: 0.0,
            }
        }
    };
    let mut m0 = merit(p, &pt, nu)?;
    for _ in 0..MAX_ITERS {
        if converged(p, &pt, nu)? {
            return Ok(pt);
        }
        let mu = pt.x.inner(&pt.s)? / n as f64;
        let nu_t = nu.max(0.25 * mu);
        let dir = newton_direction(p, &pt, nu_t)?;
        let mut s = 1.0;
        let mut accepted = false;
        for _ in 0..60 {
            let cand = IteratePoint {
                x: pt.x.axpy(s, &dir.dx)?,
                s: pt.s.axpy(s, &dir.ds)?,
                y: vec_add_scaled(&pt.y, s, &dir.dy),
                t: 0.0,
            };
            if cand.x.chol_or_none().is_some() && cand.s.chol_or_none().is_some() {
                let mc = merit(p, &cand, nu)?;
                if mc < m0 {
                    pt = cand;
                    m0 = mc;
                    accepted = true;
                    break;
                }
            }
            s *= 0.8;
            if s < 1e-12 {
                break;
            }
        }
        if !accepted {
            return Err(Error::Numerical(
                "central point iteration stopped making progress".into(),
            ));
        }
    }
    if converged(p, &pt, nu)? {
        Ok(pt)
    } else {
        Err(Error::Numerical(format!(
            "central point iteration did not converge within {MAX_ITERS} steps"
        )))
    }
}

//! Starting points for the infeasible methods, and the least-norm affine
//! solve they are anchored to.

use super::{IteratePoint, vec_norm};
use crate::error::{Error, Result};
use crate::model::{PerturbationPair, SdpProblem};
use crate::symmat::SymMat;

/// Starting configurations. Every start sits at residual scale t = 1 and
/// determines an induced direction pair (I'_p, I'_d) with
/// A(X⁰) − b = A(I'_p) and C − A^*(y⁰) − S⁰ = −I'_d.
#[derive(Debug, Clone)]
pub enum StartMode {
    /// X⁰ = rho0·I, S⁰ = rho1·I, y⁰ = 0. The induced directions are
    /// rho0·I − X̂ and rho1·I − C; both must be positive definite, which
    /// holds for all large enough rho0, rho1.
    Identity { rho0: f64, rho1: f64 },
    /// X⁰ = X̂ + rho·sin(theta)·I_p, S⁰ = C + rho·cos(theta)·I_d, y⁰ = 0,
    /// for theta strictly inside (0, π/2). Driving t to zero from here
    /// walks the regularization ray at angle theta; `dirs` defaults to
    /// the identity pair. The induced directions are the rho-scaled
    /// sin/cos multiples of `dirs`.
    Angle {
        theta: f64,
        rho: f64,
        dirs: Option<PerturbationPair>,
    },
}

/// Minimum-Frobenius-norm solution X̂ of A(X) = b, as the combination
/// Σ λ_i A_i with Gram system G λ = b. A rank-deficient Gram matrix falls
/// back to an eigenvalue pseudoinverse; if the system is inconsistent the
/// residual check fails and the affine part itself is infeasible.
pub fn find_affine_solution(p: &SdpProblem) -> Result<SymMat> {
    let m = p.num_constraints();
    let a = p.constraints();
    let mut g = SymMat::zeros(m);
    for i in 0..m {
        for j in i..m {
            g.set(i, j, a[i].inner(&a[j])?);
        }
    }
    let lam: Vec<f64> = match g.chol_or_none() {
        Some(l) => l.solve(p.rhs()),
        None => {
            let dec = g.eigh()?;
            let lmax = dec.values.last().copied().unwrap_or(0.0).max(0.0);
            let cut = 1e-12 * lmax.max(f64::MIN_POSITIVE);
            let pinv = dec.assemble(|v| if v > cut { 1.0 / v } else { 0.0 });
            (0..m)
                .map(|i| (0..m).map(|j| pinv.get(i, j) * p.rhs()[j]).sum())
                .collect()
        }
    };
    let mut xhat = SymMat::zeros(p.dim());
    for (li, ai) in lam.iter().zip(a) {
        xhat = xhat.axpy(*li, ai)?;
    }
    let ax = p.apply_map(&xhat)?;
    let rn = vec_norm(&ax.iter().zip(p.rhs()).map(|(u, v)| u - v).collect::<Vec<_>>());
    if rn > 1e-10 * (1.0 + vec_norm(p.rhs())) {
        return Err(Error::InfeasibleAffine(format!(
            "least-norm solve leaves residual {rn:.3e}; b is outside the range of the constraint map"
        )));
    }
    Ok(xhat)
}

/// Build the starting iterate and its induced direction pair.
pub fn standard_start(p: &SdpProblem, mode: &StartMode) -> Result<(IteratePoint, PerturbationPair)> {
    let n = p.dim();
    let m = p.num_constraints();
    match mode {
        StartMode::Identity { rho0, rho1 } => {
            if !(rho0.is_finite() && *rho0 > 0.0 && rho1.is_finite() && *rho1 > 0.0) {
                return Err(Error::Domain(format!(
                    "identity start needs positive finite scales, got ({rho0}, {rho1})"
                )));
            }
            let xhat = find_affine_solution(p)?;
            let x0 = SymMat::scaled_identity(n, *rho0);
            let s0 = SymMat::scaled_identity(n, *rho1);
            let i_p = x0.sub(&xhat)?;
            let i_d = s0.sub(p.cost())?;
            let dirs = PerturbationPair::new(i_p, i_d).map_err(|_| {
                Error::NotPositiveDefinite(format!(
                    "identity start scales ({rho0}, {rho1}) are too small for this problem"
                ))
            })?;
            Ok((IteratePoint { x: x0, s: s0, y: vec![0.0; m], t: 1.0 }, dirs))
        }
        StartMode::Angle { theta, rho, dirs } => {
            if !(theta.is_finite()
                && *theta > 0.0
                && *theta < std::f64::consts::FRAC_PI_2
                && rho.is_finite()
                && *rho > 0.0)
            {
                return Err(Error::Domain(format!(
                    "angle start needs theta in (0, pi/2) and rho > 0, got ({theta}, {rho})"
                )));
            }
            let base = match dirs {
                Some(d) => {
                    if d.dim() != n {
                        return Err(Error::Dimension(format!(
                            "angle start directions are {}x{} but problem is {}x{}",
                            d.dim(),
                            d.dim(),
                            n,
                            n
                        )));
                    }
                    d.clone()
                }
                None => PerturbationPair::identity(n),
            };
            let xhat = find_affine_solution(p)?;
            let x0 = xhat.axpy(rho * theta.sin(), base.primal())?;
            let s0 = p.cost().axpy(rho * theta.cos(), base.dual())?;
            if !x0.is_positive_definite() || !s0.is_positive_definite() {
                return Err(Error::NotPositiveDefinite(format!(
                    "angle start at theta = {theta:.4} is not interior; increase rho (= {rho})"
                )));
            }
            let induced = PerturbationPair::new(
                base.primal().scale(rho * theta.sin()),
                base.dual().scale(rho * theta.cos()),
            )?;
            Ok((IteratePoint { x: x0, s: s0, y: vec![0.0; m], t: 1.0 }, induced))
        }
    }
}

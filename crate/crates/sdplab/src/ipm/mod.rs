//! Infeasible-start primal-dual interior-point solvers with full iterate
//! traces.
//!
//! Two drivers share one Newton kernel. [`run_zhang`] follows the
//! infeasible central path with a single symmetrized Newton step per
//! iteration; both residuals shrink in exact lockstep with the scale
//! parameter, t^{k+1} = (1 − s^k) t^k. [`run_potra_sheng`] alternates
//! affine predictor steps (which reduce t) with centering correctors at
//! frozen t. [`central_point`] solves for a point on the central path of
//! a strongly feasible problem at a prescribed ν.
//!
//! The residual structure is the load-bearing invariant: a run started
//! from [`standard_start`] has, at every iterate,
//!
//!   A(X^k) − b = t^k · A(I'_p),    C − A^*(y^k) − S^k = −t^k · I'_d,
//!
//! where (I'_p, I'_d) is the induced direction pair of the start. Reading
//! the modified objectives along the trace therefore evaluates the
//! regularized problem family at parameters proportional to t^k.

mod central;
mod newton;
mod run;
mod start;
mod step;

pub use central::central_point;
pub use newton::{newton_direction, NewtonDirection};
pub use run::{run_potra_sheng, run_zhang};
pub use start::{find_affine_solution, standard_start, StartMode};
pub use step::step_length;

use crate::error::{Error, Result};
use crate::model::{ModifiedObjectives, PerturbationPair, SdpProblem};
use crate::symmat::SymMat;

/// One primal-dual iterate together with its residual scale t.
#[derive(Debug, Clone)]
pub struct IteratePoint {
    pub x: SymMat,
    pub s: SymMat,
    pub y: Vec<f64>,
    pub t: f64,
}

/// Solver tuning knobs; `Default` is the reference configuration.
#[derive(Debug, Clone)]
pub struct IpmParams {
    /// Centering weight: a standard step targets ν = sigma · gap / n.
    pub sigma: f64,
    /// Radius of the Frobenius neighborhood ‖W − μI‖_F ≤ gamma μ.
    pub gamma: f64,
    /// Required per-step gap contraction: gap⁺ ≤ (1 − eta_gap s) gap.
    pub eta_gap: f64,
    /// Fraction of the distance to the cone boundary a step may take.
    pub tau_boundary: f64,
    pub max_iter: usize,
    pub tol_gap: f64,
    pub tol_resid: f64,
    /// Corrector steps per predictor in `run_potra_sheng`.
    pub correctors: usize,
}

impl Default for IpmParams {
    fn default() -> Self {
        IpmParams {
            sigma: 0.3,
            gamma: 0.4,
            eta_gap: 0.01,
            tau_boundary: 0.99,
            max_iter: 500,
            tol_gap: 1e-9,
            tol_resid: 1e-9,
            correctors: 1,
        }
    }
}

impl IpmParams {
    pub(crate) fn validate(&self) -> Result<()> {
        let unit = |v: f64| v > 0.0 && v < 1.0;
        if !(unit(self.sigma) && unit(self.gamma) && unit(self.eta_gap) && unit(self.tau_boundary))
        {
            return Err(Error::Domain(
                "sigma, gamma, eta_gap, tau_boundary must lie in (0,1)".into(),
            ));
        }
        if !(self.tol_gap > 0.0 && self.tol_resid > 0.0 && self.max_iter > 0) {
            return Err(Error::Domain(
                "tolerances must be positive and max_iter nonzero".into(),
            ));
        }
        Ok(())
    }
}

/// How a run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunStatus {
    /// Final gap ≤ tol_gap and final t ≤ tol_resid.
    Converged,
    /// No admissible step length; typical for singular or strongly
    /// infeasible problems, where t stays bounded away from zero.
    Stalled,
    IterLimit,
    /// Newton system breakdown (singular reduced system, loss of
    /// positive definiteness, eigensolver failure).
    NumericalFailure,
}

/// Complete record of a run. Lengths of `iterates`, `gaps`, `modified`
/// agree; `steps` holds the step length taken out of each iterate except
/// the last.
#[derive(Debug, Clone)]
pub struct IpmTrace {
    pub iterates: Vec<IteratePoint>,
    pub gaps: Vec<f64>,
    /// Objectives of iterate k against the problem perturbed by t_k along
    /// `direction_pair`; modified primal − modified dual tracks gap_k.
    pub modified: Vec<ModifiedObjectives>,
    pub steps: Vec<f64>,
    pub status: RunStatus,
    /// Induced direction pair (I'_p, I'_d) of the start.
    pub direction_pair: PerturbationPair,
    /// Centering iterations spent before the main loop (only nonzero for
    /// starts outside the working neighborhood).
    pub centering_steps: usize,
    pub notes: Vec<String>,
}

impl IpmTrace {
    pub fn final_point(&self) -> &IteratePoint {
        self.iterates.last().expect("a trace always contains the start")
    }

    pub fn final_gap(&self) -> f64 {
        *self.gaps.last().expect("a trace always contains the start")
    }

    pub fn len(&self) -> usize {
        self.iterates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.iterates.is_empty()
    }
}

/// Residuals of a point against a problem: (A(X) − b, C − A^*(y) − S).
/// A point produced by a standard run satisfies
/// A(X) − b = t·A(I'_p) and C − A^*(y) − S = −t·I'_d.
pub fn residuals(p: &SdpProblem, pt: &IteratePoint) -> Result<(Vec<f64>, SymMat)> {
    let ax = p.apply_map(&pt.x)?;
    let r_p = ax.iter().zip(p.rhs()).map(|(axi, bi)| axi - bi).collect();
    let r_d = p.cost().sub(&p.adjoint_map(&pt.y)?)?.sub(&pt.s)?;
    Ok((r_p, r_d))
}

/// Centrality of an interior pair: (‖W − μI‖_F, μ) for W = X^{1/2}SX^{1/2}
/// and μ = tr(W)/n, computed from the eigenvalues of L^T S L, which is
/// orthogonally similar to W.
pub fn centrality(x: &SymMat, s: &SymMat) -> Result<(f64, f64)> {
    let l = x
        .chol_or_none()
        .ok_or_else(|| Error::NotPositiveDefinite("centrality: X is not interior".into()))?;
    let dec = l.conj_lt_m_l(s).eigh()?;
    let n = x.dim() as f64;
    let mu = dec.values.iter().sum::<f64>() / n;
    let dist = dec.values.iter().map(|v| (v - mu) * (v - mu)).sum::<f64>().sqrt();
    Ok((dist, mu))
}

pub(crate) fn vec_norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub(crate) fn vec_add_scaled(a: &[f64], c: f64, b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + c * y).collect()
}

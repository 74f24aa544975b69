//! Problem data for semidefinite programs in standard primal-dual form,
//! and the two-parameter regularization built on a pair of positive
//! definite perturbation directions.
//!
//! Primal:  minimize  C•X    subject to  A_i•X = b_i (i = 1..m),  X ⪰ 0
//! Dual:    maximize  b^T y  subject to  C − Σ_i y_i A_i = S ⪰ 0
//!
//! Given directions (I_p, I_d), both positive definite, the regularized
//! family replaces C by C + ε I_d and b_i by b_i + η A_i•I_p. Its optimal
//! value as a function of (ε, η) is the central object of the crate;
//! `ray` takes directional limits of it along rays into the origin.

use crate::error::{Error, Result};
use crate::symmat::SymMat;

/// A semidefinite program in standard form. Construction validates all
/// dimensions once; the rest of the crate relies on that.
#[derive(Debug, Clone, PartialEq)]
pub struct SdpProblem {
    c: SymMat,
    a: Vec<SymMat>,
    b: Vec<f64>,
}

impl SdpProblem {
    pub fn new(c: SymMat, a: Vec<SymMat>, b: Vec<f64>) -> Result<Self> {
        let n = c.dim();
        if a.is_empty() {
            return Err(Error::Dimension("at least one constraint is required".into()));
        }
        if a.len() != b.len() {
            return Err(Error::Dimension(format!(
                "{} constraint matrices but {} right-hand sides",
                a.len(),
                b.len()
            )));
        }
        for (i, ai) in a.iter().enumerate() {
            if ai.dim() != n {
                return Err(Error::Dimension(format!(
                    "constraint {} is {}x{} but C is {}x{}",
                    i,
                    ai.dim(),
                    ai.dim(),
                    n,
                    n
                )));
            }
        }
        let finite = c.raw().iter().all(|v| v.is_finite())
            && a.iter().all(|ai| ai.raw().iter().all(|v| v.is_finite()))
            && b.iter().all(|v| v.is_finite());
        if !finite {
            return Err(Error::Domain("problem data must be finite".into()));
        }
        Ok(SdpProblem { c, a, b })
    }

    /// Matrix order n.
    pub fn dim(&self) -> usize {
        self.c.dim()
    }

    /// Number of affine constraints m.
    pub fn num_constraints(&self) -> usize {
        self.a.len()
    }

    pub fn cost(&self) -> &SymMat {
        &self.c
    }

    pub fn constraints(&self) -> &[SymMat] {
        &self.a
    }

    pub fn rhs(&self) -> &[f64] {
        &self.b
    }

    /// The constraint map A(X) = (A_1•X, ..., A_m•X).
    pub fn apply_map(&self, x: &SymMat) -> Result<Vec<f64>> {
        self.a.iter().map(|ai| ai.inner(x)).collect()
    }

    /// The adjoint map A^*(y) = Σ_i y_i A_i.
    pub fn adjoint_map(&self, y: &[f64]) -> Result<SymMat> {
        if y.len() != self.a.len() {
            return Err(Error::Dimension(format!(
                "adjoint: y has {} entries for {} constraints",
                y.len(),
                self.a.len()
            )));
        }
        let mut acc = SymMat::zeros(self.dim());
        for (yi, ai) in y.iter().zip(&self.a) {
            acc = acc.axpy(*yi, ai)?;
        }
        Ok(acc)
    }

    /// Whether the A_i are linearly independent, measured as the smallest
    /// eigenvalue of their Gram matrix exceeding 1e-10. The solvers need
    /// this for a unique dual variable; the type itself does not.
    pub fn linearly_independent(&self) -> Result<bool> {
        let m = self.a.len();
        let mut g = SymMat::zeros(m);
        for i in 0..m {
            for j in i..m {
                g.set(i, j, self.a[i].inner(&self.a[j])?);
            }
        }
        Ok(g.min_eig()? > 1e-10)
    }

    /// The regularized problem: cost C + ε I_d, right-hand side
    /// b_i + η A_i•I_p. Both parameters must be finite and nonnegative.
    pub fn perturb(&self, dirs: &PerturbationPair, eps: f64, eta: f64) -> Result<SdpProblem> {
        if !(eps >= 0.0 && eps.is_finite() && eta >= 0.0 && eta.is_finite()) {
            return Err(Error::Domain(format!(
                "perturbation parameters must be finite and nonnegative, got ({eps}, {eta})"
            )));
        }
        if dirs.dim() != self.dim() {
            return Err(Error::Dimension(format!(
                "perturbation directions are {}x{} but problem is {}x{}",
                dirs.dim(),
                dirs.dim(),
                self.dim(),
                self.dim()
            )));
        }
        let c = self.c.axpy(eps, dirs.dual())?;
        let shift = self.apply_map(dirs.primal())?;
        let b = self.b.iter().zip(&shift).map(|(bi, si)| bi + eta * si).collect();
        SdpProblem::new(c, self.a.clone(), b)
    }

    /// Objectives of a point measured against the problem perturbed by
    /// (tα, tβ) along `dirs`:
    ///
    ///   primal = (C + tα I_d)•X,   dual = Σ (b_i + tβ A_i•I_p) y_i,
    ///
    /// with `gap` stored as their difference. When (X, y, S) carries the
    /// residuals of a run at scale t (α = β = 1 against the induced
    /// directions), primal − dual equals the complementarity gap X•S.
    pub fn modified_objectives(
        &self,
        dirs: &PerturbationPair,
        t: f64,
        alpha: f64,
        beta: f64,
        x: &SymMat,
        y: &[f64],
    ) -> Result<ModifiedObjectives> {
        if !(t >= 0.0 && alpha >= 0.0 && beta >= 0.0) {
            return Err(Error::Domain(format!(
                "modified_objectives: t, alpha, beta must be nonnegative, got ({t}, {alpha}, {beta})"
            )));
        }
        if y.len() != self.b.len() {
            return Err(Error::Dimension(format!(
                "modified_objectives: y has {} entries for {} constraints",
                y.len(),
                self.b.len()
            )));
        }
        let primal = self.c.inner(x)? + t * alpha * dirs.dual().inner(x)?;
        let shift = self.apply_map(dirs.primal())?;
        let dual: f64 = self
            .b
            .iter()
            .zip(&shift)
            .zip(y)
            .map(|((bi, si), yi)| (bi + t * beta * si) * yi)
            .sum();
        Ok(ModifiedObjectives { primal, dual, gap: primal - dual })
    }
}

/// Positive definite perturbation directions (I_p, I_d) of a common order.
#[derive(Debug, Clone, PartialEq)]
pub struct PerturbationPair {
    i_p: SymMat,
    i_d: SymMat,
}

impl PerturbationPair {
    /// Both directions must be symmetric positive definite.
    pub fn new(i_p: SymMat, i_d: SymMat) -> Result<Self> {
        if i_p.dim() != i_d.dim() {
            return Err(Error::Dimension(format!(
                "directions are {}x{} and {}x{}",
                i_p.dim(),
                i_p.dim(),
                i_d.dim(),
                i_d.dim()
            )));
        }
        if !i_p.is_positive_definite() {
            return Err(Error::NotPositiveDefinite(
                "primal perturbation direction".into(),
            ));
        }
        if !i_d.is_positive_definite() {
            return Err(Error::NotPositiveDefinite(
                "dual perturbation direction".into(),
            ));
        }
        Ok(PerturbationPair { i_p, i_d })
    }

    /// The canonical choice I_p = I_d = I.
    pub fn identity(n: usize) -> Self {
        PerturbationPair {
            i_p: SymMat::identity(n),
            i_d: SymMat::identity(n),
        }
    }

    pub fn dim(&self) -> usize {
        self.i_p.dim()
    }

    pub fn primal(&self) -> &SymMat {
        &self.i_p
    }

    pub fn dual(&self) -> &SymMat {
        &self.i_d
    }
}

/// Primal and dual objective values against a perturbed problem. `gap` is
/// always the single subtraction primal − dual, stored for reporting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModifiedObjectives {
    pub primal: f64,
    pub dual: f64,
    pub gap: f64,
}

/// The shifted value v − η C•I_p − ε η I_d•I_p. For fixed ε > 0 this is
/// monotone nonincreasing in η (the unshifted value itself is monotone
/// nondecreasing in ε for fixed η).
pub fn shifted_primal_value(
    v: f64,
    eps: f64,
    eta: f64,
    p: &SdpProblem,
    dirs: &PerturbationPair,
) -> Result<f64> {
    Ok(v - eta * p.cost().inner(dirs.primal())? - eta * eps * dirs.dual().inner(dirs.primal())?)
}

//! Run drivers: the path-following loop and the predictor-corrector loop.

use super::newton::{newton_direction, NewtonDirection};
use super::step::step_length;
use super::{
    centrality, residuals, vec_add_scaled, vec_norm, IpmParams, IpmTrace, IteratePoint, RunStatus,
};
use crate::error::{Error, Result};
use crate::model::{ModifiedObjectives, PerturbationPair, SdpProblem};

fn advance(pt: &IteratePoint, dir: &NewtonDirection, s: f64, scale_t: bool) -> Result<IteratePoint> {
    Ok(IteratePoint {
        x: pt.x.axpy(s, &dir.dx)?,
        s: pt.s.axpy(s, &dir.ds)?,
        y: vec_add_scaled(&pt.y, s, &dir.dy),
        t: if scale_t { (1.0 - s) * pt.t } else { pt.t },
    })
}

struct TraceBuilder<'a> {
    p: &'a SdpProblem,
    dirs: PerturbationPair,
    iterates: Vec<IteratePoint>,
    gaps: Vec<f64>,
    modified: Vec<ModifiedObjectives>,
    steps: Vec<f64>,
    notes: Vec<String>,
    centering_steps: usize,
}

impl<'a> TraceBuilder<'a> {
    fn new(p: &'a SdpProblem, dirs: PerturbationPair) -> Self {
        TraceBuilder {
            p,
            dirs,
            iterates: Vec::new(),
            gaps: Vec::new(),
            modified: Vec::new(),
            steps: Vec::new(),
            notes: Vec::new(),
            centering_steps: 0,
        }
    }

    fn push(&mut self, pt: IteratePoint) -> Result<f64> {
        let gap = pt.x.inner(&pt.s)?;
        let mo = self
            .p
            .modified_objectives(&self.dirs, pt.t, 1.0, 1.0, &pt.x, &pt.y)?;
        self.iterates.push(pt);
        self.gaps.push(gap);
        self.modified.push(mo);
        Ok(gap)
    }

    fn note(&mut self, msg: impl Into<String>) {
        self.notes.push(msg.into());
    }

    fn finish(self, status: RunStatus) -> IpmTrace {
        IpmTrace {
            iterates: self.iterates,
            gaps: self.gaps,
            modified: self.modified,
            steps: self.steps,
            status,
            direction_pair: self.dirs,
            centering_steps: self.centering_steps,
            notes: self.notes,
        }
    }
}

/// The start must carry exactly the residual structure the run assumes:
/// A(X) − b = t·A(I'_p) and C − A^*(y) − S = −t·I'_d.
fn validate_start(p: &SdpProblem, start: &IteratePoint, dirs: &PerturbationPair) -> Result<()> {
    if start.x.dim() != p.dim() || start.s.dim() != p.dim() {
        return Err(Error::Dimension("start matrices do not match the problem order".into()));
    }
    if start.y.len() != p.num_constraints() {
        return Err(Error::Dimension(format!(
            "start y has {} entries for {} constraints",
            start.y.len(),
            p.num_constraints()
        )));
    }
    if dirs.dim() != p.dim() {
        return Err(Error::Dimension("direction pair does not match the problem order".into()));
    }
    if !(start.t >= 0.0 && start.t <= 1.0) {
        return Err(Error::Domain(format!("start t must lie in [0, 1], got {}", start.t)));
    }
    if start.x.chol_or_none().is_none() || start.s.chol_or_none().is_none() {
        return Err(Error::NotPositiveDefinite("start iterate is not interior".into()));
    }
    let (r_p, r_d) = residuals(p, start)?;
    let want = p.apply_map(dirs.primal())?;
    let dp = vec_norm(
        &r_p.iter()
            .zip(&want)
            .map(|(r, w)| r - start.t * w)
            .collect::<Vec<_>>(),
    );
    if dp > 1e-8 * (1.0 + vec_norm(p.rhs())) {
        return Err(Error::Domain(format!(
            "start primal residual deviates from t x directions by {dp:.3e}"
        )));
    }
    let dd = r_d.axpy(start.t, dirs.dual())?.frob_norm();
    if dd > 1e-8 * (1.0 + p.cost().frob_norm()) {
        return Err(Error::Domain(format!(
            "start dual residual deviates from t x directions by {dd:.3e}"
        )));
    }
    Ok(())
}

/// One damped centering step at frozen t: Newton toward ν on the problem
/// the iterate is exactly feasible for, accepted when positive
/// definiteness holds and the centrality distance strictly decreases.
fn centering_step(
    p_t: &SdpProblem,
    pt: &IteratePoint,
    nu: f64,
) -> Result<Option<(IteratePoint, f64)>> {
    let dir = newton_direction(p_t, pt, nu)?;
    let (d0, _) = centrality(&pt.x, &pt.s)?;
    let mut s = 1.0;
    for _ in 0..40 {
        let cand = advance(pt, &dir, s, false)?;
        if cand.x.chol_or_none().is_some() && cand.s.chol_or_none().is_some() {
            let (dc, _) = centrality(&cand.x, &cand.s)?;
            if dc < d0 {
                return Ok(Some((cand, s)));
            }
        }
        s *= 0.8;
        if s < 1e-10 {
            break;
        }
    }
    Ok(None)
}

/// Bring a start into the working neighborhood N(0.9·gamma) by centering
/// at frozen t. Returns a terminal status if centering cannot get there.
fn centering_prefix(
    p: &SdpProblem,
    params: &IpmParams,
    tb: &mut TraceBuilder,
    pt: &mut IteratePoint,
) -> Result<Option<RunStatus>> {
    loop {
        let (dist, mu) = centrality(&pt.x, &pt.s)?;
        if dist <= 0.9 * params.gamma * mu {
            return Ok(None);
        }
        if tb.centering_steps >= 100 {
            tb.note("centering prefix hit its iteration budget");
            return Ok(Some(RunStatus::Stalled));
        }
        let p_t = p.perturb(&tb.dirs, pt.t, pt.t)?;
        match centering_step(&p_t, pt, mu) {
            Ok(Some((next, s))) => {
                *pt = next;
                tb.steps.push(s);
                tb.push(pt.clone())?;
                tb.centering_steps += 1;
            }
            Ok(None) => {
                tb.note("centering prefix made no progress");
                return Ok(Some(RunStatus::Stalled));
            }
            Err(e) => {
                tb.note(format!("centering prefix failed: {e}"));
                return Ok(Some(RunStatus::NumericalFailure));
            }
        }
    }
}

/// Path-following run: one symmetrized Newton step per iteration with
/// target ν = sigma·gap/n, equal primal-dual step length, and the exact
/// recursion t ← (1 − s)·t. Numerical trouble ends the run through the
/// trace status; the error return is reserved for contract violations in
/// the inputs.
pub fn run_zhang(
    p: &SdpProblem,
    start: &IteratePoint,
    dirs: &PerturbationPair,
    params: &IpmParams,
) -> Result<IpmTrace> {
    params.validate()?;
    validate_start(p, start, dirs)?;
    let n = p.dim() as f64;
    let mut tb = TraceBuilder::new(p, dirs.clone());
    let mut pt = start.clone();
    let mut gap = tb.push(pt.clone())?;
    if let Some(st) = centering_prefix(p, params, &mut tb, &mut pt)? {
        return Ok(tb.finish(st));
    }
    let mut iters = 0usize;
    let status = loop {
        if gap <= params.tol_gap && pt.t <= params.tol_resid {
            break RunStatus::Converged;
        }
        if iters >= params.max_iter {
            break RunStatus::IterLimit;
        }
        let nu = params.sigma * gap / n;
        let dir = match newton_direction(p, &pt, nu) {
            Ok(d) => d,
            Err(e) => {
                tb.note(format!("newton solve failed: {e}"));
                break RunStatus::NumericalFailure;
            }
        };
        let s = match step_length(&pt, &dir, params) {
            Ok(s) => s,
            Err(Error::Stall(msg)) => {
                tb.note(format!("stall: {msg}"));
                break RunStatus::Stalled;
            }
            Err(e) => {
                tb.note(format!("step selection failed: {e}"));
                break RunStatus::NumericalFailure;
            }
        };
        pt = advance(&pt, &dir, s, true)?;
        tb.steps.push(s);
        gap = tb.push(pt.clone())?;
        iters += 1;
    };
    Ok(tb.finish(status))
}

/// Predictor-corrector run: affine predictor steps (ν = 0) in a widened
/// neighborhood reduce t; correctors re-center at frozen t with ν = μ.
/// The gap need not decrease monotonically across correctors.
pub fn run_potra_sheng(
    p: &SdpProblem,
    start: &IteratePoint,
    dirs: &PerturbationPair,
    params: &IpmParams,
) -> Result<IpmTrace> {
    params.validate()?;
    validate_start(p, start, dirs)?;
    let mut tb = TraceBuilder::new(p, dirs.clone());
    let mut pt = start.clone();
    let mut gap = tb.push(pt.clone())?;
    if let Some(st) = centering_prefix(p, params, &mut tb, &mut pt)? {
        return Ok(tb.finish(st));
    }
    let wide = IpmParams {
        gamma: (2.0 * params.gamma).min(0.8),
        ..params.clone()
    };
    let mut iters = 0usize;
    let status = loop {
        if gap <= params.tol_gap && pt.t <= params.tol_resid {
            break RunStatus::Converged;
        }
        if iters >= params.max_iter {
            break RunStatus::IterLimit;
        }
        // predictor
        let dir = match newton_direction(p, &pt, 0.0) {
            Ok(d) => d,
            Err(e) => {
                tb.note(format!("predictor newton failed: {e}"));
                break RunStatus::NumericalFailure;
            }
        };
        let s = match step_length(&pt, &dir, &wide) {
            Ok(s) => s,
            Err(Error::Stall(msg)) => {
                tb.note(format!("predictor stall: {msg}"));
                break RunStatus::Stalled;
            }
            Err(e) => {
                tb.note(format!("predictor step selection failed: {e}"));
                break RunStatus::NumericalFailure;
            }
        };
        pt = advance(&pt, &dir, s, true)?;
        tb.steps.push(s);
        gap = tb.push(pt.clone())?;
        iters += 1;
        // correctors at frozen t
        for _ in 0..params.correctors {
            if gap <= params.tol_gap && pt.t <= params.tol_resid {
                break;
            }
            let p_t = match p.perturb(&tb.dirs, pt.t, pt.t) {
                Ok(q) => q,
                Err(e) => {
                    tb.note(format!("corrector problem build failed: {e}"));
                    break;
                }
            };
            let mu = gap / p.dim() as f64;
            match centering_step(&p_t, &pt, mu) {
                Ok(Some((next, sc))) => {
                    pt = next;
                    tb.steps.push(sc);
                    gap = tb.push(pt.clone())?;
                    iters += 1;
                }
                Ok(None) => {
                    tb.note("corrector made no progress; skipped");
                    break;
                }
                Err(e) => {
                    tb.note(format!("corrector newton failed: {e}"));
                    break;
                }
            }
        }
    };
    Ok(tb.finish(status))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ipm::{standard_start, StartMode};
    use crate::symmat::SymMat;

    fn small_feasible_problem() -> (SdpProblem, IteratePoint) {
        // planted interior pair on 2x2 with one constraint
        let x = SymMat::diag(&[1.0, 2.0]);
        let s = SymMat::diag(&[0.5, 0.25]);
        let a1 = SymMat::from_rows(&[vec![1.0, 0.2], vec![0.2, 1.0]]).unwrap();
        let y = vec![0.4];
        let c = a1.scale(y[0]).add(&s).unwrap();
        let b = vec![a1.inner(&x).unwrap()];
        let p = SdpProblem::new(c, vec![a1], b).unwrap();
        (p, IteratePoint { x, s, y, t: 0.0 })
    }

    #[test]
    fn feasible_start_stays_feasible_and_converges() {
        let (p, start) = small_feasible_problem();
        let dirs = PerturbationPair::identity(2);
        let trace = run_zhang(&p, &start, &dirs, &IpmParams::default()).unwrap();
        assert_eq!(trace.status, RunStatus::Converged);
        assert!(trace.final_gap() <= 1e-9);
        for pt in &trace.iterates {
            assert_eq!(pt.t, 0.0);
            let (r_p, r_d) = residuals(&p, pt).unwrap();
            assert!(vec_norm(&r_p) < 1e-9);
            assert!(r_d.frob_norm() < 1e-9);
        }
    }

    #[test]
    fn identity_start_run_keeps_proportional_residuals() {
        let (p, _) = small_feasible_problem();
        let (start, dirs) =
            standard_start(&p, &StartMode::Identity { rho0: 8.0, rho1: 8.0 }).unwrap();
        let trace = run_zhang(&p, &start, &dirs, &IpmParams::default()).unwrap();
        assert_eq!(trace.status, RunStatus::Converged);
        assert!(trace.final_point().t <= 1e-9);
        let want = p.apply_map(dirs.primal()).unwrap();
        let scale_b = 1.0 + vec_norm(p.rhs());
        let scale_c = 1.0 + p.cost().frob_norm();
        for pt in &trace.iterates {
            let (r_p, r_d) = residuals(&p, pt).unwrap();
            let dp = vec_norm(
                &r_p.iter().zip(&want).map(|(r, w)| r - pt.t * w).collect::<Vec<_>>(),
            );
            assert!(dp <= 1e-8 * scale_b, "primal proportionality broke: {dp:.3e}");
            let dd = r_d.axpy(pt.t, dirs.dual()).unwrap().frob_norm();
            assert!(dd <= 1e-8 * scale_c, "dual proportionality broke: {dd:.3e}");
        }
        // t-recursion is the exact floating product
        for k in 0..trace.steps.len() {
            let expect = (1.0 - trace.steps[k]) * trace.iterates[k].t;
            assert_eq!(trace.iterates[k + 1].t, expect);
        }
    }

    #[test]
    fn gap_contracts_on_every_accepted_step() {
        let (p, _) = small_feasible_problem();
        let (start, dirs) =
            standard_start(&p, &StartMode::Identity { rho0: 8.0, rho1: 8.0 }).unwrap();
        let params = IpmParams::default();
        let trace = run_zhang(&p, &start, &dirs, &params).unwrap();
        assert!(trace.centering_steps == 0, "identity start is centered");
        for k in 0..trace.steps.len() {
            let bound = (1.0 - params.eta_gap * trace.steps[k]) * trace.gaps[k] + 1e-12;
            assert!(trace.gaps[k + 1] <= bound);
        }
    }

    #[test]
    fn trace_shape_consistent() {
        let (p, _) = small_feasible_problem();
        let (start, dirs) =
            standard_start(&p, &StartMode::Identity { rho0: 8.0, rho1: 8.0 }).unwrap();
        let trace = run_zhang(&p, &start, &dirs, &IpmParams::default()).unwrap();
        assert_eq!(trace.iterates.len(), trace.gaps.len());
        assert_eq!(trace.iterates.len(), trace.modified.len());
        assert_eq!(trace.iterates.len(), trace.steps.len() + 1);
        assert!(trace.iterates[0].t == 1.0);
        // interior invariance
        for pt in &trace.iterates {
            assert!(pt.x.is_positive_definite());
            assert!(pt.s.is_positive_definite());
        }
    }

    #[test]
    fn potra_sheng_converges_and_matches() {
        let (p, _) = small_feasible_problem();
        let (start, dirs) =
            standard_start(&p, &StartMode::Identity { rho0: 8.0, rho1: 8.0 }).unwrap();
        let params = IpmParams::default();
        let tz = run_zhang(&p, &start, &dirs, &params).unwrap();
        let tp = run_potra_sheng(&p, &start, &dirs, &params).unwrap();
        assert_eq!(tp.status, RunStatus::Converged);
        assert_eq!(tp.iterates[0].t, 1.0);
        // both solve the same problem: converged objectives agree
        let mz = tz.modified.last().unwrap();
        let mp = tp.modified.last().unwrap();
        assert!((mz.primal - mp.primal).abs() < 1e-6 * (1.0 + mz.primal.abs()));
    }

    #[test]
    fn mismatched_start_rejected() {
        let (p, start) = small_feasible_problem();
        // claim a nonzero t with zero residuals: proportionality fails
        let bad = IteratePoint { t: 0.5, ..start };
        let dirs = PerturbationPair::identity(2);
        assert!(matches!(
            run_zhang(&p, &bad, &dirs, &IpmParams::default()),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn angle_start_centering_prefix_recorded() {
        let (p, _) = small_feasible_problem();
        let theta = 0.3;
        let (start, dirs) =
            standard_start(&p, &StartMode::Angle { theta, rho: 6.0, dirs: None }).unwrap();
        let trace = run_zhang(&p, &start, &dirs, &IpmParams::default()).unwrap();
        assert_eq!(trace.status, RunStatus::Converged);
        // the angle start is generally off-center; the prefix shows up in
        // the trace and freezes t while active
        for k in 0..trace.centering_steps {
            assert_eq!(trace.iterates[k + 1].t, trace.iterates[0].t);
        }
    }
}

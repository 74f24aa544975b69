//! Ray analysis of the regularized value function.
//!
//! `value_at` evaluates v(ε,η), the common optimal value of the
//! two-parameter regularized pair, by running the path-following solver
//! on the perturbed problem and reading a certified weak-duality bracket
//! off the trace. `ray_limit` estimates the directional limit of v along
//! a ray t·(cosθ, sinθ) as t ↓ 0, `theta_sweep` maps the limit across a
//! grid of angles and reports monotonicity, and `homogeneity_check`
//! confirms that reparametrizing a ray does not change its limit.

use crate::error::{Error, Result};
use crate::ipm::{
    find_affine_solution, run_zhang, standard_start, IpmParams, IteratePoint, RunStatus, StartMode,
};
use crate::model::{PerturbationPair, SdpProblem};
use crate::symmat::SymMat;

/// Geometric sampling schedule for the limit process t ↓ 0.
#[derive(Debug, Clone, Copy)]
pub struct RaySchedule {
    pub t0: f64,
    pub ratio: f64,
    pub steps: usize,
    /// Samples beyond this magnitude, three in a row and monotone, are
    /// treated as diverging.
    pub divergence_cap: f64,
    /// Agreement tolerance for declaring a finite limit; per-sample
    /// solves run at a tenth of this.
    pub report_tol: f64,
}

impl Default for RaySchedule {
    fn default() -> Self {
        RaySchedule {
            t0: 1e-1,
            ratio: 10f64.powf(-0.5),
            steps: 9,
            divergence_cap: 1e6,
            report_tol: 1e-2,
        }
    }
}

impl RaySchedule {
    fn validate(&self) -> Result<()> {
        if !(self.t0 > 0.0) || !self.t0.is_finite() {
            return Err(Error::Domain("schedule t0 must be positive".into()));
        }
        if !(self.ratio > 0.0 && self.ratio < 1.0) {
            return Err(Error::Domain("schedule ratio must lie in (0, 1)".into()));
        }
        if self.steps == 0 {
            return Err(Error::Domain("schedule needs at least one step".into()));
        }
        if !(self.divergence_cap > 0.0) {
            return Err(Error::Domain("divergence cap must be positive".into()));
        }
        if !(self.report_tol > 0.0) {
            return Err(Error::Domain("report tolerance must be positive".into()));
        }
        if self.t0 * self.ratio.powi(self.steps as i32) <= 1e-12 {
            return Err(Error::Domain(
                "schedule descends below the floating sanity floor 1e-12".into(),
            ));
        }
        Ok(())
    }
}

/// Classification of one directional limit.
#[derive(Debug, Clone, PartialEq)]
pub enum RayKind {
    Finite(f64),
    PlusInfinity,
    MinusInfinity,
    Inconclusive,
}

/// Samples and classification for one ray.
#[derive(Debug, Clone)]
pub struct RayLimitResult {
    pub kind: RayKind,
    /// (t, v(t·cosθ, t·sinθ)) pairs in sampling order; ±∞ entries mark
    /// samples whose inner problem diverged.
    pub samples: Vec<(f64, f64)>,
    pub theta: f64,
    pub notes: Vec<String>,
}

/// Result of one value evaluation, with enough context to warm-start a
/// neighboring evaluation or validate a certificate.
#[derive(Debug, Clone)]
pub struct ValueOutcome {
    /// Certified value, or an infinity sentinel when the inner objective
    /// provably ran away.
    pub value: f64,
    /// Iterate behind the certified bracket; absent for sentinels.
    pub final_point: Option<IteratePoint>,
    pub status: RunStatus,
    pub notes: Vec<String>,
}

const SAMPLE_TOL_FACTOR: f64 = 0.1;
const VALUE_CAP: f64 = 1e12;
const DIVE_FLOOR: f64 = 1e3;
const CHUNK_ITERS: usize = 50;
const MAX_CHUNKS: usize = 16;

/// Evaluate v(ε,η) to within `tol`.
///
/// The perturbed pair is solved from a fresh scaled-identity start; the
/// result is the midpoint of the first weak-duality bracket whose width
/// and residual-induced bias both fall under `tol`. At least one of ε, η
/// must be positive: the value function may be undefined at the origin.
pub fn value_at(
    p: &SdpProblem,
    dirs: &PerturbationPair,
    eps: f64,
    eta: f64,
    tol: f64,
) -> Result<f64> {
    value_outcome(p, dirs, eps, eta, tol, None).map(|o| o.value)
}

/// `value_at` with warm-start input and diagnostic output.
pub fn value_outcome(
    p: &SdpProblem,
    dirs: &PerturbationPair,
    eps: f64,
    eta: f64,
    tol: f64,
    warm: Option<&IteratePoint>,
) -> Result<ValueOutcome> {
    if !eps.is_finite() || !eta.is_finite() || eps < 0.0 || eta < 0.0 {
        return Err(Error::Domain(format!(
            "perturbation parameters must be finite and nonnegative, got ({eps}, {eta})"
        )));
    }
    if eps == 0.0 && eta == 0.0 {
        return Err(Error::Domain(
            "the value function may be undefined at the origin; perturb at least one side".into(),
        ));
    }
    if !(tol > 0.0) || !tol.is_finite() {
        return Err(Error::Domain("tolerance must be positive".into()));
    }
    let pp = p.perturb(dirs, eps, eta)?;
    let (start, run_dirs) = match warm {
        Some(w) if w.x.dim() == pp.dim() && w.y.len() == pp.num_constraints() => {
            warm_start(&pp, w)?
        }
        _ => cold_start(&pp)?,
    };
    let shift = pp.apply_map(run_dirs.primal())?;
    let mut params = IpmParams::default();
    params.tol_gap = 0.25 * tol;
    params.tol_resid = 1e-15;
    params.max_iter = CHUNK_ITERS;

    let one_sided = (eps == 0.0) != (eta == 0.0);
    let mut pt = start;
    let mut best: Option<(IteratePoint, f64)> = None;
    let mut pms: Vec<f64> = Vec::new();
    let mut dms: Vec<f64> = Vec::new();
    let mut notes: Vec<String> = Vec::new();
    let mut status = RunStatus::IterLimit;
    let mut last_t = pt.t;
    for chunk in 0..MAX_CHUNKS {
        let trace = run_zhang(&pp, &pt, &run_dirs, &params)?;
        let t_begin = last_t;
        last_t = trace.final_point().t;
        let skip = if chunk == 0 { 0 } else { 1 };
        for (k, it) in trace.iterates.iter().enumerate().skip(skip) {
            let mo = trace.modified[k];
            pms.push(mo.primal);
            dms.push(mo.dual);
            if trace.gaps[k] <= 0.5 * tol {
                let drift: f64 = shift.iter().zip(&it.y).map(|(a, y)| a * y).sum();
                let bias = it.t * (run_dirs.dual().inner(&it.x)?.abs() + drift.abs());
                if bias <= 0.3 * tol {
                    best = Some((it.clone(), 0.5 * (mo.primal + mo.dual)));
                }
            }
        }
        status = trace.status;
        match trace.status {
            RunStatus::Converged => break,
            RunStatus::IterLimit => {
                if best.is_some() || dive_down(&pms) || dive_up(&dms) {
                    break;
                }
                // a one-sided run crawling toward a diverging target is
                // better diagnosed off the axis; two-sided runs get the
                // whole budget
                if one_sided && last_t > 0.9 * t_begin {
                    notes.push(format!(
                        "homotopy stagnated: t only {t_begin:.3e} -> {last_t:.3e} over one chunk"
                    ));
                    break;
                }
                pt = trace.final_point().clone();
            }
            RunStatus::Stalled | RunStatus::NumericalFailure => {
                notes.extend(trace.notes);
                break;
            }
        }
    }

    if let Some((point, value)) = best {
        if value.abs() >= VALUE_CAP {
            notes.push("certified value beyond the representable cap".into());
            return Ok(ValueOutcome {
                value: if value > 0.0 { f64::INFINITY } else { f64::NEG_INFINITY },
                final_point: None,
                status,
                notes,
            });
        }
        return Ok(ValueOutcome { value, final_point: Some(point), status, notes });
    }

    let one_sided = (eps == 0.0) != (eta == 0.0);
    if one_sided && matches!(status, RunStatus::Stalled | RunStatus::IterLimit) {
        match (dive_down(&pms), dive_up(&dms)) {
            (true, false) => {
                notes.push("primal objective dive; minus-infinity sentinel".into());
                return Ok(ValueOutcome {
                    value: f64::NEG_INFINITY,
                    final_point: None,
                    status,
                    notes,
                });
            }
            (false, true) => {
                notes.push("dual objective dive; plus-infinity sentinel".into());
                return Ok(ValueOutcome {
                    value: f64::INFINITY,
                    final_point: None,
                    status,
                    notes,
                });
            }
            _ => {
                if let Some(v) = axis_probe(p, dirs, eps, eta, tol, &mut notes) {
                    return Ok(ValueOutcome { value: v, final_point: None, status, notes });
                }
            }
        }
    }
    let gap_fin = pms.last().copied().unwrap_or(f64::NAN) - dms.last().copied().unwrap_or(f64::NAN);
    Err(Error::Numerical(format!(
        "value solve failed at (eps, eta) = ({eps:.6e}, {eta:.6e}): status {status:?}, \
         final bracket width {gap_fin:.3e}, residual parameter {last_t:.3e}; notes: {notes:?}"
    )))
}

/// Objective running away below: final modified primal under the floor
/// and at least tenfold past the value three quarters through the run.
fn dive_down(vals: &[f64]) -> bool {
    let m = vals.len();
    if m < 8 {
        return false;
    }
    let last = -vals[m - 1];
    let ref3q = -vals[3 * m / 4];
    last >= DIVE_FLOOR && last >= 10.0 * ref3q
}

fn dive_up(vals: &[f64]) -> bool {
    let m = vals.len();
    if m < 8 {
        return false;
    }
    let last = vals[m - 1];
    let ref3q = vals[3 * m / 4];
    last >= DIVE_FLOOR && last >= 10.0 * ref3q
}

const PROBE_STAGES: usize = 6;
const PROBE_SHRINK: f64 = 0.25;
const PROBE_GROWTH: f64 = 8.0;

/// Diagnose an infinite axis value by sampling just off the axis.
///
/// With η fixed, the value is nondecreasing in ε, so a probe series
/// v(δ,η) running monotonically to −∞ as δ ↓ 0 bounds v(0,η) above by
/// every probe: the axis value is −∞. On the other axis the shifted
/// value is nonincreasing in η with a vanishing shift correction, so a
/// series v(ε,δ) running to +∞ bounds v(ε,0) below: the axis value is
/// +∞. The opposite directions prove nothing and are never claimed.
fn axis_probe(
    p: &SdpProblem,
    dirs: &PerturbationPair,
    eps: f64,
    eta: f64,
    tol: f64,
    notes: &mut Vec<String>,
) -> Option<f64> {
    let probing_eps = eps == 0.0;
    let base = if probing_eps { eta } else { eps };
    let mut delta = 0.01 * base;
    let mut vals: Vec<f64> = Vec::new();
    let mut warm: Option<IteratePoint> = None;
    for _ in 0..PROBE_STAGES {
        let (pe, pn) = if probing_eps { (delta, eta) } else { (eps, delta) };
        let ptol = tol.max(1e-3 * (1.0 + vals.last().map_or(0.0, |v| v.abs())));
        match value_outcome(p, dirs, pe, pn, ptol, warm.as_ref()) {
            Ok(out) => {
                vals.push(out.value);
                if !out.value.is_finite() || out.value.abs() >= 1e7 {
                    break;
                }
                warm = out.final_point;
            }
            Err(e) => {
                notes.push(format!("axis probe at ({pe:.3e}, {pn:.3e}) failed: {e}"));
                break;
            }
        }
        delta *= PROBE_SHRINK;
    }
    if vals.len() < 3 {
        return None;
    }
    let first = vals[0];
    let last = vals[vals.len() - 1];
    let slack = |v: f64| 1e-3 * (1.0 + v.abs());
    if probing_eps {
        let monotone_down = vals.windows(2).all(|w| w[1] <= w[0] + slack(w[0]));
        if monotone_down && last <= -DIVE_FLOOR && last <= PROBE_GROWTH * first.min(0.0) {
            notes.push(format!(
                "off-axis probes dive to {last:.3e}; minus-infinity by monotonicity in eps"
            ));
            return Some(f64::NEG_INFINITY);
        }
    } else {
        let monotone_up = vals.windows(2).all(|w| w[1] >= w[0] - slack(w[0]));
        if monotone_up && last >= DIVE_FLOOR && last >= PROBE_GROWTH * first.max(0.0) {
            notes.push(format!(
                "off-axis probes dive to {last:.3e}; plus-infinity by shifted monotonicity in eta"
            ));
            return Some(f64::INFINITY);
        }
    }
    None
}

fn cold_start(pp: &SdpProblem) -> Result<(IteratePoint, PerturbationPair)> {
    let x_hat = find_affine_solution(pp)?;
    let lx = x_hat.eigh()?.values.last().copied().unwrap_or(0.0);
    let lc = pp.cost().eigh()?.values.last().copied().unwrap_or(0.0);
    let rho0 = 10f64.max(2.0 * (1.0 + lx.max(0.0)));
    let rho1 = 10f64.max(2.0 * (1.0 + lc.max(0.0)));
    standard_start(pp, &StartMode::Identity { rho0, rho1 })
}

/// Shift a neighboring solution into the interior of the new problem and
/// induce the direction pair that makes its residuals exactly t = 1
/// times the pair.
fn warm_start(pp: &SdpProblem, w: &IteratePoint) -> Result<(IteratePoint, PerturbationPair)> {
    const MARGIN: f64 = 0.1;
    let n = pp.dim();
    let eye = SymMat::identity(n);
    let x_hat = find_affine_solution(pp)?;
    let mx = w.x.sub(&x_hat)?;
    let dx = mx.min_eig()?;
    let x0 = if dx < MARGIN { w.x.axpy(MARGIN - dx, &eye)? } else { w.x.clone() };
    let slack_base = pp.cost().sub(&pp.adjoint_map(&w.y)?)?;
    let ns = w.s.sub(&slack_base)?;
    let ds = ns.min_eig()?;
    let s0 = if ds < MARGIN { w.s.axpy(MARGIN - ds, &eye)? } else { w.s.clone() };
    let dirs = PerturbationPair::new(x0.sub(&x_hat)?, s0.sub(&slack_base)?)?;
    Ok((IteratePoint { x: x0, s: s0, y: w.y.clone(), t: 1.0 }, dirs))
}

/// Estimate the directional limit of v along t·(cosθ, sinθ) as t ↓ 0.
///
/// Evaluations chain warm starts down the schedule and stop early once
/// three consecutive samples agree within the report tolerance (finite
/// limit) or three consecutive samples run monotonically past the
/// divergence cap (±∞). A sample whose solve fails ends the sampling;
/// classification then uses the prefix and may be `Inconclusive`.
pub fn ray_limit(
    p: &SdpProblem,
    dirs: &PerturbationPair,
    theta: f64,
    sched: &RaySchedule,
) -> Result<RayLimitResult> {
    sched.validate()?;
    if !(theta >= 0.0 && theta <= std::f64::consts::FRAC_PI_2) {
        return Err(Error::Domain(format!("theta must lie in [0, pi/2], got {theta}")));
    }
    let mut alpha = theta.cos();
    let mut beta = theta.sin();
    if alpha.abs() < 1e-12 {
        alpha = 0.0;
    }
    if beta.abs() < 1e-12 {
        beta = 0.0;
    }
    let tol = SAMPLE_TOL_FACTOR * sched.report_tol;
    let mut samples: Vec<(f64, f64)> = Vec::new();
    let mut notes: Vec<String> = Vec::new();
    let mut warm: Option<IteratePoint> = None;
    let mut kind: Option<RayKind> = None;
    for k in 0..=sched.steps {
        let t_k = sched.t0 * sched.ratio.powi(k as i32);
        match value_outcome(p, dirs, t_k * alpha, t_k * beta, tol, warm.as_ref()) {
            Ok(out) => {
                samples.push((t_k, out.value));
                warm = out.final_point;
            }
            Err(e) => {
                notes.push(format!("sample at t = {t_k:.6e} failed: {e}"));
                break;
            }
        }
        kind = classify_tail(&samples, sched);
        if kind.is_some() {
            break;
        }
    }
    let kind = kind.or_else(|| classify_tail(&samples, sched)).unwrap_or(RayKind::Inconclusive);
    Ok(RayLimitResult { kind, samples, theta, notes })
}

fn classify_tail(samples: &[(f64, f64)], sched: &RaySchedule) -> Option<RayKind> {
    let n = samples.len();
    if n < 3 {
        return None;
    }
    let a = samples[n - 3].1;
    let b = samples[n - 2].1;
    let c = samples[n - 1].1;
    if a.is_finite() && b.is_finite() && c.is_finite() {
        let tol = sched.report_tol;
        if (a - b).abs() < tol && (a - c).abs() < tol && (b - c).abs() < tol {
            return Some(RayKind::Finite(c));
        }
    }
    if a >= sched.divergence_cap && b >= a && c >= b {
        return Some(RayKind::PlusInfinity);
    }
    if a <= -sched.divergence_cap && b <= a && c <= b {
        return Some(RayKind::MinusInfinity);
    }
    None
}

/// One row of a sweep table.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub theta: f64,
    pub tan_theta: f64,
    pub result: RayLimitResult,
}

/// Adjacent pair breaking the nonincreasing order, with the excess over
/// the allowed slack.
#[derive(Debug, Clone)]
pub struct MonotonicityViolation {
    pub left: usize,
    pub right: usize,
    pub excess: f64,
}

/// Sweep table plus monotonicity and endpoint-sandwich diagnostics.
#[derive(Debug, Clone)]
pub struct SweepReport {
    pub rows: Vec<SweepRow>,
    pub violations: Vec<MonotonicityViolation>,
    /// Indices of interior rows escaping the [last, first] envelope when
    /// both endpoint limits are finite.
    pub sandwich_violations: Vec<usize>,
    pub tol: f64,
}

impl SweepReport {
    pub fn is_monotone(&self) -> bool {
        self.violations.is_empty()
    }
}

fn extended_value(kind: &RayKind) -> Option<f64> {
    match kind {
        RayKind::Finite(v) => Some(*v),
        RayKind::PlusInfinity => Some(f64::INFINITY),
        RayKind::MinusInfinity => Some(f64::NEG_INFINITY),
        RayKind::Inconclusive => None,
    }
}

fn build_report(rows: Vec<SweepRow>, sched: &RaySchedule) -> SweepReport {
    let tol = 2.0 * sched.report_tol;
    let mut violations = Vec::new();
    let mut prev: Option<(usize, f64)> = None;
    for (i, row) in rows.iter().enumerate() {
        if let Some(v) = extended_value(&row.result.kind) {
            if let Some((j, u)) = prev {
                if v > u + tol {
                    violations.push(MonotonicityViolation { left: j, right: i, excess: v - u - tol });
                }
            }
            prev = Some((i, v));
        }
    }
    let mut sandwich_violations = Vec::new();
    if rows.len() >= 3 {
        if let (RayKind::Finite(vp), RayKind::Finite(vd)) =
            (&rows[0].result.kind, &rows[rows.len() - 1].result.kind)
        {
            for (i, row) in rows.iter().enumerate().take(rows.len() - 1).skip(1) {
                if let RayKind::Finite(v) = row.result.kind {
                    if v > vp + tol || v < vd - tol {
                        sandwich_violations.push(i);
                    }
                }
            }
        }
    }
    SweepReport { rows, violations, sandwich_violations, tol }
}

fn grid_checked(grid: &[f64]) -> Result<()> {
    for &th in grid {
        if !(th >= 0.0 && th <= std::f64::consts::FRAC_PI_2) {
            return Err(Error::Domain(format!("sweep angle {th} outside [0, pi/2]")));
        }
    }
    if grid.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::Domain("sweep grid must be sorted ascending".into()));
    }
    Ok(())
}

/// Run `ray_limit` over an ascending grid of angles and report where the
/// estimated limits fail to be nonincreasing.
pub fn theta_sweep(
    p: &SdpProblem,
    dirs: &PerturbationPair,
    grid: &[f64],
    sched: &RaySchedule,
) -> Result<SweepReport> {
    sched.validate()?;
    grid_checked(grid)?;
    let mut rows = Vec::with_capacity(grid.len());
    for &theta in grid {
        let result = ray_limit(p, dirs, theta, sched)?;
        let tan_theta = if result.samples.is_empty() && theta == 0.0 { 0.0 } else { snapped_tan(theta) };
        rows.push(SweepRow { theta, tan_theta, result });
    }
    Ok(build_report(rows, sched))
}

fn snapped_tan(theta: f64) -> f64 {
    let c = theta.cos();
    if c.abs() < 1e-12 {
        f64::INFINITY
    } else {
        theta.sin() / c
    }
}

/// `theta_sweep` with grid points split across `jobs` worker threads.
/// Rays are independent, so the assembled report is identical to the
/// serial one.
pub fn theta_sweep_parallel(
    p: &SdpProblem,
    dirs: &PerturbationPair,
    grid: &[f64],
    sched: &RaySchedule,
    jobs: usize,
) -> Result<SweepReport> {
    if jobs == 0 {
        return Err(Error::Domain("jobs must be at least 1".into()));
    }
    if jobs == 1 || grid.len() <= 1 {
        return theta_sweep(p, dirs, grid, sched);
    }
    sched.validate()?;
    grid_checked(grid)?;
    let chunk = grid.len().div_ceil(jobs);
    let results: Vec<Result<RayLimitResult>> = std::thread::scope(|scope| {
        let handles: Vec<_> = grid
            .chunks(chunk)
            .map(|slice| {
                scope.spawn(move || {
                    slice
                        .iter()
                        .map(|&theta| ray_limit(p, dirs, theta, sched))
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        let mut out = Vec::with_capacity(grid.len());
        for h in handles {
            match h.join() {
                Ok(part) => out.extend(part),
                Err(_) => out.push(Err(Error::Numerical("sweep worker panicked".into()))),
            }
        }
        out
    });
    let mut rows = Vec::with_capacity(grid.len());
    for (&theta, result) in grid.iter().zip(results) {
        let result = result?;
        rows.push(SweepRow { theta, tan_theta: snapped_tan(theta), result });
    }
    Ok(build_report(rows, sched))
}

/// Check that the limits along (1, β) and (k, kβ) agree: both
/// parametrize the ray at angle atan(β), so a correct limit process
/// must land on the same answer.
pub fn homogeneity_check(
    p: &SdpProblem,
    dirs: &PerturbationPair,
    beta: f64,
    k: f64,
    sched: &RaySchedule,
) -> Result<bool> {
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::Domain("beta must be positive".into()));
    }
    if !(k > 0.0) || !k.is_finite() {
        return Err(Error::Domain("scale factor must be positive".into()));
    }
    let theta = beta.atan();
    let scale = (1.0 + beta * beta).sqrt();
    let s1 = RaySchedule { t0: sched.t0 * scale, ..*sched };
    let s2 = RaySchedule { t0: sched.t0 * k * scale, ..*sched };
    let r1 = ray_limit(p, dirs, theta, &s1)?;
    let r2 = ray_limit(p, dirs, theta, &s2)?;
    Ok(match (&r1.kind, &r2.kind) {
        (RayKind::Finite(a), RayKind::Finite(b)) => (a - b).abs() <= sched.report_tol,
        (a, b) => std::mem::discriminant(a) == std::mem::discriminant(b),
    })
}

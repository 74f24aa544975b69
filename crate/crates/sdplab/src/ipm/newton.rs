//! The symmetrized Newton direction shared by all drivers.

use super::{residuals, IteratePoint};
use crate::error::{Error, Result};
use crate::model::SdpProblem;
use crate::symmat::SymMat;

/// A primal-dual Newton direction.
#[derive(Debug, Clone)]
pub struct NewtonDirection {
    pub dx: SymMat,
    pub ds: SymMat,
    pub dy: Vec<f64>,
}

/// Newton direction at an interior iterate for target ν, defined by
///
///   (a) A(X + ΔX) = b                  (primal residual closed),
///   (b) C − A^*(y + Δy) = S + ΔS       (dual residual closed),
///   (c) H(X·ΔS + ΔX·S) = ν·I − H(X·S),
///
/// where H(M) = ½(P M P⁻¹ + (P M P⁻¹)ᵀ) and P = X^{−1/2}.
///
/// Solved in the eigenbasis of W = LᵀSL for the Cholesky factor L of X:
/// W is an orthogonal congruence away from X^{1/2}SX^{1/2} (polar
/// decomposition L = X^{1/2}U), under which (c) becomes the Lyapunov
/// equation ½(VW + WV) = ν I − W − Lᵀ R_d L + Σ Δy_i LᵀA_iL in the
/// unknown V = L⁻¹ ΔX L⁻ᵀ, diagonalized entrywise by Φ_kl = 2/(λ_k+λ_l).
/// Eliminating V leaves an m×m positive definite system for Δy.
pub fn newton_direction(
    p: &SdpProblem,
    pt: &IteratePoint,
    nu_target: f64,
) -> Result<NewtonDirection> {
    let n = p.dim();
    let m = p.num_constraints();
    if !(nu_target >= 0.0 && nu_target.is_finite()) {
        return Err(Error::Domain(format!(
            "newton target must be finite and nonnegative, got {nu_target}"
        )));
    }
    let l = pt.x.chol_or_none().ok_or_else(|| {
        Error::NotPositiveDefinite("newton: X is not positive definite".into())
    })?;
    let w = l.conj_lt_m_l(&pt.s);
    let dec = w.eigh()?;
    let lam = dec.values.clone();
    if lam[0] <= 0.0 {
        return Err(Error::NotPositiveDefinite(
            "newton: S is not positive definite".into(),
        ));
    }

    let (r_p, r_d) = residuals(p, pt)?;
    let phi = |i: usize, j: usize| 2.0 / (lam[i] + lam[j]);

    // right-hand block of the Lyapunov equation, in the eigenbasis
    let g0 = {
        let rot_rd = dec.rotate_into(&l.conj_lt_m_l(&r_d));
        SymMat::from_fn(n, |i, j| {
            let diag = if i == j { nu_target - lam[i] } else { 0.0 };
            diag - rot_rd.get(i, j)
        })
    };
    let v0 = SymMat::from_fn(n, |i, j| phi(i, j) * g0.get(i, j));

    let gi: Vec<SymMat> = p
        .constraints()
        .iter()
        .map(|ai| dec.rotate_into(&l.conj_lt_m_l(ai)))
        .collect();
    let vi: Vec<SymMat> = gi
        .iter()
        .map(|g| SymMat::from_fn(n, |i, j| phi(i, j) * g.get(i, j)))
        .collect();

    // reduced system M Δy = rhs with M_ji = Σ_kl G̃j_kl G̃i_kl Φ_kl;
    // positive definite exactly when the A_i are linearly independent
    let mut red = SymMat::zeros(m);
    for j in 0..m {
        for i in j..m {
            red.set(j, i, gi[j].inner(&vi[i])?);
        }
    }
    // Newton works against the negated residual: A(ΔX) = −r_p
    let rhs: Vec<f64> = (0..m)
        .map(|j| Ok(-r_p[j] - gi[j].inner(&v0)?))
        .collect::<Result<_>>()?;
    let dy = red
        .chol_or_none()
        .ok_or_else(|| {
            Error::SingularSystem(
                "reduced Newton system is singular; constraint matrices may be linearly dependent"
                    .into(),
            )
        })?
        .solve(&rhs);

    let mut v = v0;
    for (dyi, vii) in dy.iter().zip(&vi) {
        v = v.axpy(*dyi, vii)?;
    }
    let dx = l.conj_l_u_lt(&dec.rotate_back(&v));
    let ds = r_d.sub(&p.adjoint_map(&dy)?)?;
    Ok(NewtonDirection { dx, ds, dy })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::PerturbationPair;
    use crate::symmat::mat_mul;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn random_spd(rng: &mut StdRng, n: usize, shift: f64) -> SymMat {
        let b = SymMat::from_fn(n, |_, _| rng.gen_range(-1.0..1.0));
        b.conjugate(&SymMat::identity(n))
            .unwrap()
            .axpy(shift, &SymMat::identity(n))
            .unwrap()
    }

    fn random_problem(rng: &mut StdRng, n: usize, m: usize) -> SdpProblem {
        let a: Vec<SymMat> = (0..m)
            .map(|_| SymMat::from_fn(n, |_, _| rng.gen_range(-1.0..1.0)))
            .collect();
        let c = SymMat::from_fn(n, |_, _| rng.gen_range(-1.0..1.0));
        let b = (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect();
        SdpProblem::new(c, a, b).unwrap()
    }

    /// Literal evaluation of H(M) = ½(P M P⁻¹ + (P M P⁻¹)ᵀ), P = X^{-1/2}.
    fn h_of(x: &SymMat, m_raw: &[f64]) -> SymMat {
        let n = x.dim();
        let p = x.inv_sqrt().unwrap();
        let pinv = x.sqrt_pd().unwrap();
        let pm = mat_mul(p.raw(), m_raw, n);
        let pmp = mat_mul(&pm, pinv.raw(), n);
        SymMat::from_raw_symmetrized(n, &pmp)
    }

    /// Check conditions (a), (b), (c) by direct substitution against the
    /// literal inv_sqrt formulation.
    fn check_newton_contract(p: &SdpProblem, pt: &IteratePoint, nu: f64, dir: &NewtonDirection) {
        let n = p.dim();
        // (a)
        let ax = p.apply_map(&pt.x.add(&dir.dx).unwrap()).unwrap();
        let scale_b = 1.0 + super::super::vec_norm(p.rhs());
        for (axi, bi) in ax.iter().zip(p.rhs()) {
            assert!((axi - bi).abs() < 1e-9 * scale_b, "(a) violated: {axi} vs {bi}");
        }
        // (b)
        let y1: Vec<f64> = pt.y.iter().zip(&dir.dy).map(|(a, b)| a + b).collect();
        let lhs = p.cost().sub(&p.adjoint_map(&y1).unwrap()).unwrap();
        let rhs = pt.s.add(&dir.ds).unwrap();
        let scale_c = 1.0 + p.cost().frob_norm();
        assert!(
            lhs.sub(&rhs).unwrap().frob_norm() < 1e-9 * scale_c,
            "(b) violated"
        );
        // (c) against the literal H
        let xds = mat_mul(pt.x.raw(), dir.ds.raw(), n);
        let dxs = mat_mul(dir.dx.raw(), pt.s.raw(), n);
        let sum: Vec<f64> = xds.iter().zip(&dxs).map(|(a, b)| a + b).collect();
        let lhs_c = h_of(&pt.x, &sum);
        let hxs = h_of(&pt.x, &pt.x.mul_raw(&pt.s));
        let rhs_c = SymMat::scaled_identity(n, nu).sub(&hxs).unwrap();
        let scale = 1.0 + hxs.frob_norm() + nu;
        assert!(
            lhs_c.sub(&rhs_c).unwrap().frob_norm() < 1e-9 * scale,
            "(c) violated: {}",
            lhs_c.sub(&rhs_c).unwrap().frob_norm()
        );
    }

    #[test]
    fn direction_satisfies_defining_equations() {
        let mut rng = StdRng::seed_from_u64(404);
        for trial in 0..20 {
            let n = rng.gen_range(2..=5);
            let m = rng.gen_range(1..=n);
            let p = random_problem(&mut rng, n, m);
            let pt = IteratePoint {
                x: random_spd(&mut rng, n, 0.7),
                s: random_spd(&mut rng, n, 0.7),
                y: (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect(),
                t: 1.0,
            };
            let nu = rng.gen_range(0.0..2.0);
            let dir = newton_direction(&p, &pt, nu).unwrap();
            check_newton_contract(&p, &pt, nu, &dir);
            assert!(trial < 20);
        }
    }

    #[test]
    fn trace_identity() {
        // inner(X, ΔS) + inner(ΔX, S) = nν − gap, the trace of (c)
        let mut rng = StdRng::seed_from_u64(77);
        let p = random_problem(&mut rng, 4, 3);
        let pt = IteratePoint {
            x: random_spd(&mut rng, 4, 0.6),
            s: random_spd(&mut rng, 4, 0.6),
            y: vec![0.1, -0.2, 0.3],
            t: 1.0,
        };
        let nu = 0.8;
        let dir = newton_direction(&p, &pt, nu).unwrap();
        let lhs = pt.x.inner(&dir.ds).unwrap() + dir.dx.inner(&pt.s).unwrap();
        let gap = pt.x.inner(&pt.s).unwrap();
        let want = 4.0 * nu - gap;
        assert!((lhs - want).abs() < 1e-8 * (1.0 + want.abs()));
    }

    #[test]
    fn zero_direction_on_central_point() {
        // a feasible problem with X S = ν I built by hand: the Newton map
        // has a fixed point there
        let x = SymMat::diag(&[2.0, 1.0]);
        let nu = 0.5;
        let s = SymMat::diag(&[nu / 2.0, nu / 1.0]);
        // choose A, b, C, y consistent with feasibility: A(X) = b, C = A*y + S
        let a1 = SymMat::diag(&[1.0, 1.0]);
        let y = vec![0.3];
        let c = a1.scale(y[0]).add(&s).unwrap();
        let b = vec![a1.inner(&x).unwrap()];
        let p = SdpProblem::new(c, vec![a1], b).unwrap();
        let pt = IteratePoint { x, s, y, t: 0.0 };
        let dir = newton_direction(&p, &pt, nu).unwrap();
        assert!(dir.dx.frob_norm() < 1e-9);
        assert!(dir.ds.frob_norm() < 1e-9);
        assert!(dir.dy[0].abs() < 1e-9);
    }

    #[test]
    fn direction_is_symmetric() {
        // symmetry is structural (SymMat storage); spot-check values are finite
        let mut rng = StdRng::seed_from_u64(3);
        let p = random_problem(&mut rng, 3, 2);
        let pt = IteratePoint {
            x: random_spd(&mut rng, 3, 0.5),
            s: random_spd(&mut rng, 3, 0.5),
            y: vec![0.0, 0.0],
            t: 1.0,
        };
        let dir = newton_direction(&p, &pt, 0.1).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(dir.dx.get(i, j), dir.dx.get(j, i));
                assert_eq!(dir.ds.get(i, j), dir.ds.get(j, i));
                assert!(dir.dx.get(i, j).is_finite());
            }
        }
    }

    #[test]
    fn dependent_constraints_rejected() {
        let a1 = SymMat::identity(2);
        let a2 = SymMat::scaled_identity(2, 2.0);
        let p = SdpProblem::new(SymMat::identity(2), vec![a1, a2], vec![1.0, 2.0]).unwrap();
        let pt = IteratePoint {
            x: SymMat::identity(2),
            s: SymMat::identity(2),
            y: vec![0.0, 0.0],
            t: 1.0,
        };
        assert!(matches!(
            newton_direction(&p, &pt, 0.5),
            Err(Error::SingularSystem(_))
        ));
    }

    #[test]
    fn interior_required() {
        let p = {
            let mut rng = StdRng::seed_from_u64(5);
            random_problem(&mut rng, 2, 1)
        };
        let pt = IteratePoint {
            x: SymMat::diag(&[1.0, -1.0]),
            s: SymMat::identity(2),
            y: vec![0.0],
            t: 1.0,
        };
        assert!(matches!(
            newton_direction(&p, &pt, 0.5),
            Err(Error::NotPositiveDefinite(_))
        ));
    }

    #[test]
    fn equal_dirs_keep_residual_direction() {
        // the step leaves the residuals collinear with their original
        // directions: r_p(X + sΔX) = (1−s) r_p(X), same for the dual side
        let mut rng = StdRng::seed_from_u64(99);
        let p = random_problem(&mut rng, 3, 2);
        let pt = IteratePoint {
            x: random_spd(&mut rng, 3, 0.8),
            s: random_spd(&mut rng, 3, 0.8),
            y: vec![0.2, -0.1],
            t: 1.0,
        };
        let dir = newton_direction(&p, &pt, 0.3).unwrap();
        let (r0, d0) = residuals(&p, &pt).unwrap();
        let s = 0.375;
        let stepped = IteratePoint {
            x: pt.x.axpy(s, &dir.dx).unwrap(),
            s: pt.s.axpy(s, &dir.ds).unwrap(),
            y: pt.y.iter().zip(&dir.dy).map(|(a, b)| a + s * b).collect(),
            t: (1.0 - s) * pt.t,
        };
        let (r1, d1) = residuals(&p, &stepped).unwrap();
        for (new, old) in r1.iter().zip(&r0) {
            assert!((new - (1.0 - s) * old).abs() < 1e-9 * (1.0 + old.abs()));
        }
        let want = d0.scale(1.0 - s);
        assert!(d1.sub(&want).unwrap().frob_norm() < 1e-9 * (1.0 + d0.frob_norm()));
    }

    #[test]
    fn perturbed_problem_direction_consistency() {
        // directions computed on p.perturb(dirs, t, t) have zero effect on
        // the residual scale: A(ΔX) = 0 when the iterate is feasible for
        // the perturbed problem
        let p = {
            let c = SymMat::diag(&[1.0, 0.0, 0.0]);
            let a1 = SymMat::from_rows(&[
                vec![1.0, 0.0, 0.0],
                vec![0.0, 0.0, 1.0],
                vec![0.0, 1.0, 0.0],
            ])
            .unwrap();
            let a2 = SymMat::diag(&[0.0, 1.0, 0.0]);
            SdpProblem::new(c, vec![a1, a2], vec![1.0, 0.0]).unwrap()
        };
        let dirs = PerturbationPair::identity(3);
        let t = 0.25;
        let pt_prob = p.perturb(&dirs, t, t).unwrap();
        // iterate exactly feasible for pt_prob
        let x = SymMat::diag(&[1.0 + t, t, t]);
        let s = pt_prob.cost().clone();
        let pt = IteratePoint { x, s, y: vec![0.0, 0.0], t };
        let dir = newton_direction(&pt_prob, &pt, 0.1).unwrap();
        let adx = pt_prob.apply_map(&dir.dx).unwrap();
        assert!(super::super::vec_norm(&adx) < 1e-9);
    }
}

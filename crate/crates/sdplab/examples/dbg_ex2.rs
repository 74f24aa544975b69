use sdplab::ipm::{find_affine_solution, run_potra_sheng, run_zhang, standard_start, IpmParams, StartMode};
use sdplab::{PerturbationPair, SdpProblem, SymMat};

fn main() {
    let c = SymMat::from_rows(&[
        vec![0.0, 0.0, 1.0],
        vec![0.0, 0.0, 0.0],
        vec![1.0, 0.0, 0.0],
    ])
    .unwrap();
    let a1 = SymMat::diag(&[0.0, -1.0, 0.0]);
    let a2 = SymMat::diag(&[-1.0, 0.0, 0.0]);
    let p = SdpProblem::new(c, vec![a1, a2], vec![-1.0, 0.0]).unwrap();
    let dirs = PerturbationPair::identity(3);
    let pp = p.perturb(&dirs, 0.0, 0.1).unwrap();
    let x_hat = find_affine_solution(&pp).unwrap();
    let lx = x_hat.eigh().unwrap().values.last().copied().unwrap();
    let lc = pp.cost().eigh().unwrap().values.last().copied().unwrap();
    let rho0 = 10f64.max(2.0 * (1.0 + lx.max(0.0)));
    let rho1 = 10f64.max(2.0 * (1.0 + lc.max(0.0)));
    let (start, run_dirs) = standard_start(&pp, &StartMode::Identity { rho0, rho1 }).unwrap();

    let configs: Vec<(&str, f64, f64, f64)> = vec![
        ("baseline g0.4 s0.3 e0.01", 0.4, 0.3, 0.01),
        ("wide g0.8 s0.3", 0.8, 0.3, 0.01),
        ("wide g0.8 s0.05", 0.8, 0.05, 0.01),
        ("wide g0.8 s0.05 eta1e-4", 0.8, 0.05, 1e-4),
        ("g0.6 s0.1 eta1e-4", 0.6, 0.1, 1e-4),
    ];
    for (name, g, sg, eg) in configs {
        let mut params = IpmParams::default();
        params.gamma = g;
        params.sigma = sg;
        params.eta_gap = eg;
        params.tol_gap = 1e-9;
        params.tol_resid = 1e-15;
        params.max_iter = 400;
        let tr = run_zhang(&pp, &start, &run_dirs, &params).unwrap();
        let fin = tr.final_point();
        let mo = tr.modified.last().unwrap();
        let smax = tr.steps.iter().cloned().fold(0.0f64, f64::max);
        let smed = {
            let mut s = tr.steps.clone();
            s.sort_by(|a, b| a.partial_cmp(b).unwrap());
            if s.is_empty() { f64::NAN } else { s[s.len() / 2] }
        };
        println!(
            "{name:28} status {:?} iters {:3} t {:9.3e} gap {:9.3e} pm {:12.5e} smax {:8.2e} smed {:8.2e}",
            tr.status, tr.iterates.len() - 1, fin.t, tr.final_gap(), mo.primal, smax, smed
        );
    }
    let mut params = IpmParams::default();
    params.tol_gap = 1e-9;
    params.tol_resid = 1e-15;
    params.max_iter = 400;
    let tr = run_potra_sheng(&pp, &start, &run_dirs, &params).unwrap();
    let fin = tr.final_point();
    let mo = tr.modified.last().unwrap();
    println!(
        "{:28} status {:?} iters {:3} t {:9.3e} gap {:9.3e} pm {:12.5e}",
        "potra-sheng default", tr.status, tr.iterates.len() - 1, fin.t, tr.final_gap(), mo.primal
    );
}

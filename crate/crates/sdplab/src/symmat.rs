//! Dense symmetric matrices and the small numeric kernels everything else
//! sits on: inner products, eigendecomposition (cyclic Jacobi), Cholesky,
//! matrix square roots.
//!
//! Matrices here are tiny (tens of rows), so everything is dense full
//! storage with O(n^3) kernels. Jacobi is used for the eigendecomposition
//! because it keeps high relative accuracy on graded positive definite
//! matrices, which the near-boundary interior-point iterates are.

use crate::error::{Error, Result};

/// Positive-definiteness floor: eigenvalues above this count as positive.
pub(crate) fn pd_floor(scale: f64) -> f64 {
    1e-12 * scale.max(1.0)
}

/// Dense symmetric matrix, full row-major storage. The two triangles are
/// kept bitwise identical by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMat {
    n: usize,
    a: Vec<f64>,
}

impl SymMat {
    pub fn zeros(n: usize) -> Self {
        assert!(n >= 1, "empty matrix");
        SymMat { n, a: vec![0.0; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        Self::scaled_identity(n, 1.0)
    }

    pub fn scaled_identity(n: usize, c: f64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.a[i * n + i] = c;
        }
        m
    }

    pub fn diag(d: &[f64]) -> Self {
        let mut m = Self::zeros(d.len());
        for (i, v) in d.iter().enumerate() {
            m.a[i * d.len() + i] = *v;
        }
        m
    }

    /// Build from explicit rows; the input must be exactly symmetric.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(Error::Dimension("from_rows: input is not square".into()));
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if rows[i][j] != rows[j][i] {
                    return Err(Error::Dimension(format!(
                        "from_rows: entry ({i},{j}) breaks symmetry"
                    )));
                }
            }
        }
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m.a[i * n + j] = rows[i][j];
            }
        }
        Ok(m)
    }

    /// Build from a function of (i, j); only i <= j is consulted and the
    /// value is mirrored.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in i..n {
                let v = f(i, j);
                m.a[i * n + j] = v;
                m.a[j * n + i] = v;
            }
        }
        m
    }

    /// Symmetrize an arbitrary square buffer: (B + B^T)/2. Used to scrub
    /// roundoff skew after three-factor products.
    pub(crate) fn from_raw_symmetrized(n: usize, b: &[f64]) -> Self {
        debug_assert_eq!(b.len(), n * n);
        Self::from_fn(n, |i, j| 0.5 * (b[i * n + j] + b[j * n + i]))
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.a[i * self.n + j]
    }

    /// Set entry (i, j) and its mirror.
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.a[i * self.n + j] = v;
        self.a[j * self.n + i] = v;
    }

    pub(crate) fn raw(&self) -> &[f64] {
        &self.a
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn frob_norm(&self) -> f64 {
        self.a.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn scale(&self, c: f64) -> SymMat {
        SymMat { n: self.n, a: self.a.iter().map(|v| c * v).collect() }
    }

    pub fn add(&self, o: &SymMat) -> Result<SymMat> {
        self.zip(o, |x, y| x + y)
    }

    pub fn sub(&self, o: &SymMat) -> Result<SymMat> {
        self.zip(o, |x, y| x - y)
    }

    /// self + c * o.
    pub fn axpy(&self, c: f64, o: &SymMat) -> Result<SymMat> {
        self.zip(o, |x, y| x + c * y)
    }

    fn zip(&self, o: &SymMat, f: impl Fn(f64, f64) -> f64) -> Result<SymMat> {
        if self.n != o.n {
            return Err(Error::Dimension(format!(
                "operands are {}x{} and {}x{}",
                self.n, self.n, o.n, o.n
            )));
        }
        Ok(SymMat {
            n: self.n,
            a: self.a.iter().zip(&o.a).map(|(x, y)| f(*x, *y)).collect(),
        })
    }

    /// Trace inner product U•V = sum_ij U_ij V_ij.
    pub fn inner(&self, o: &SymMat) -> Result<f64> {
        if self.n != o.n {
            return Err(Error::Dimension(format!(
                "inner: operands are {}x{} and {}x{}",
                self.n, self.n, o.n, o.n
            )));
        }
        let mut acc = 0.0;
        for (x, y) in self.a.iter().zip(&o.a) {
            acc += x * y;
        }
        Ok(acc)
    }

    /// Smallest eigenvalue.
    pub fn min_eig(&self) -> Result<f64> {
        Ok(self.eigh()?.values[0])
    }

    /// Full eigendecomposition by cyclic Jacobi. Values come back ascending.
    pub fn eigh(&self) -> Result<EigDecomp> {
        jacobi_eigh(self)
    }

    /// Symmetric inverse square root W with W*W*self = I.
    pub fn inv_sqrt(&self) -> Result<SymMat> {
        let dec = self.eigh()?;
        let floor = pd_floor(self.frob_norm());
        if dec.values[0] <= floor {
            return Err(Error::NotPositiveDefinite(format!(
                "inv_sqrt: min eigenvalue {:.3e} at floor {:.3e}",
                dec.values[0], floor
            )));
        }
        Ok(dec.assemble(|l| 1.0 / l.sqrt()))
    }

    /// Symmetric positive definite square root.
    pub fn sqrt_pd(&self) -> Result<SymMat> {
        let dec = self.eigh()?;
        let floor = pd_floor(self.frob_norm());
        if dec.values[0] <= floor {
            return Err(Error::NotPositiveDefinite(format!(
                "sqrt_pd: min eigenvalue {:.3e} at floor {:.3e}",
                dec.values[0], floor
            )));
        }
        Ok(dec.assemble(|l| l.sqrt()))
    }

    /// Cholesky factor, or None when the matrix is not positive definite.
    pub fn chol_or_none(&self) -> Option<CholFactor> {
        let n = self.n;
        let mut l = vec![0.0f64; n * n];
        let dmax = (0..n).fold(1.0f64, |m, i| m.max(self.get(i, i).abs()));
        let floor = 1e-13 * dmax.max(1.0);
        for j in 0..n {
            let mut d = self.get(j, j);
            for k in 0..j {
                d -= l[j * n + k] * l[j * n + k];
            }
            if !(d > floor) {
                return None; // also catches NaN
            }
            let dj = d.sqrt();
            l[j * n + j] = dj;
            for i in (j + 1)..n {
                let mut v = self.get(i, j);
                for k in 0..j {
                    v -= l[i * n + k] * l[j * n + k];
                }
                l[i * n + j] = v / dj;
            }
        }
        Some(CholFactor { n, l })
    }

    /// Scale-aware positive definiteness test.
    pub fn is_positive_definite(&self) -> bool {
        match self.eigh() {
            Ok(dec) => dec.values[0] > pd_floor(self.frob_norm()),
            Err(_) => false,
        }
    }

    /// self * other as a raw (generally nonsymmetric) buffer.
    pub(crate) fn mul_raw(&self, o: &SymMat) -> Vec<f64> {
        debug_assert_eq!(self.n, o.n);
        mat_mul(&self.a, &o.a, self.n)
    }

    /// A * M * A for symmetric A and M (result symmetrized).
    pub fn conjugate(&self, m: &SymMat) -> Result<SymMat> {
        if self.n != m.n {
            return Err(Error::Dimension("conjugate: dimension mismatch".into()));
        }
        let am = self.mul_raw(m);
        let ama = mat_mul(&am, &self.a, self.n);
        Ok(SymMat::from_raw_symmetrized(self.n, &ama))
    }
}

pub(crate) fn mat_mul(a: &[f64], b: &[f64], n: usize) -> Vec<f64> {
    let mut c = vec![0.0f64; n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i * n + k];
            if aik == 0.0 {
                continue;
            }
            for j in 0..n {
                c[i * n + j] += aik * b[k * n + j];
            }
        }
    }
    c
}

/// Eigendecomposition M = Q diag(values) Q^T, values ascending.
#[derive(Debug, Clone)]
pub struct EigDecomp {
    pub values: Vec<f64>,
    n: usize,
    /// Column-major eigenvectors: q[i + n*k] is component i of vector k.
    q: Vec<f64>,
}

impl EigDecomp {
    /// Q f(diag) Q^T, symmetrized.
    pub fn assemble(&self, f: impl Fn(f64) -> f64) -> SymMat {
        let n = self.n;
        let fv: Vec<f64> = self.values.iter().map(|l| f(*l)).collect();
        let mut out = vec![0.0f64; n * n];
        for k in 0..n {
            let w = fv[k];
            if w == 0.0 {
                continue;
            }
            for i in 0..n {
                let qik = self.q[i + n * k];
                if qik == 0.0 {
                    continue;
                }
                for j in i..n {
                    out[i * n + j] += w * qik * self.q[j + n * k];
                }
            }
        }
        SymMat::from_fn(n, |i, j| out[i * n + j])
    }

    /// Component buffer of eigenvector k.
    pub fn vector(&self, k: usize) -> Vec<f64> {
        (0..self.n).map(|i| self.q[i + self.n * k]).collect()
    }

    /// Q^T M Q as a symmetric matrix (rotate M into the eigenbasis).
    pub fn rotate_into(&self, m: &SymMat) -> SymMat {
        let n = self.n;
        // tmp = M Q  (Q column-major)
        let mut tmp = vec![0.0f64; n * n];
        for i in 0..n {
            for k in 0..n {
                let mut acc = 0.0;
                for j in 0..n {
                    acc += m.get(i, j) * self.q[j + n * k];
                }
                tmp[i * n + k] = acc;
            }
        }
        let mut out = vec![0.0f64; n * n];
        for r in 0..n {
            for k in r..n {
                let mut acc = 0.0;
                for i in 0..n {
                    acc += self.q[i + n * r] * tmp[i * n + k];
                }
                out[r * n + k] = acc;
                out[k * n + r] = acc;
            }
        }
        SymMat { n, a: out }
    }

    /// Q U Q^T for symmetric U given in the eigenbasis.
    pub fn rotate_back(&self, u: &SymMat) -> SymMat {
        let n = self.n;
        // tmp = Q U
        let mut tmp = vec![0.0f64; n * n];
        for i in 0..n {
            for k in 0..n {
                let mut acc = 0.0;
                for j in 0..n {
                    acc += self.q[i + n * j] * u.get(j, k);
                }
                tmp[i * n + k] = acc;
            }
        }
        let mut out = vec![0.0f64; n * n];
        for i in 0..n {
            for j in i..n {
                let mut acc = 0.0;
                for k in 0..n {
                    acc += tmp[i * n + k] * self.q[j + n * k];
                }
                out[i * n + j] = acc;
                out[j * n + i] = acc;
            }
        }
        SymMat { n, a: out }
    }
}

fn jacobi_eigh(m: &SymMat) -> Result<EigDecomp> {
    let n = m.n;
    if n == 1 {
        return Ok(EigDecomp { values: vec![m.a[0]], n, q: vec![1.0] });
    }
    let mut a = m.a.clone();
    let mut q = vec![0.0f64; n * n];
    for i in 0..n {
        q[i + n * i] = 1.0;
    }
    let norm = m.frob_norm().max(f64::MIN_POSITIVE);
    let tol = 1e-15 * norm;

    let off = |a: &[f64]| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                s += 2.0 * a[i * n + j] * a[i * n + j];
            }
        }
        s.sqrt()
    };

    let mut converged = false;
    for _sweep in 0..60 {
        if off(&a) <= tol {
            converged = true;
            break;
        }
        for p in 0..n {
            for r in (p + 1)..n {
                let apr = a[p * n + r];
                if apr.abs() <= 1e-3 * tol / (n as f64) {
                    continue;
                }
                let theta = (a[r * n + r] - a[p * n + p]) / (2.0 * apr);
                let t = if theta.abs() > 1e150 {
                    // avoid overflow in theta^2; limit is 1/(2 theta)
                    0.5 / theta
                } else {
                    theta.signum() / (theta.abs() + (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;

                // rows/cols p and r of A
                for k in 0..n {
                    if k == p || k == r {
                        continue;
                    }
                    let akp = a[k * n + p];
                    let akr = a[k * n + r];
                    let np_ = c * akp - s * akr;
                    let nr = s * akp + c * akr;
                    a[k * n + p] = np_;
                    a[p * n + k] = np_;
                    a[k * n + r] = nr;
                    a[r * n + k] = nr;
                }
                let app = a[p * n + p];
                let arr = a[r * n + r];
                a[p * n + p] = app - t * apr;
                a[r * n + r] = arr + t * apr;
                a[p * n + r] = 0.0;
                a[r * n + p] = 0.0;

                // accumulate rotation into Q (columns p, r)
                for i in 0..n {
                    let qip = q[i + n * p];
                    let qir = q[i + n * r];
                    q[i + n * p] = c * qip - s * qir;
                    q[i + n * r] = s * qip + c * qir;
                }
            }
        }
    }
    if !converged && off(&a) > 1e-10 * norm {
        return Err(Error::Numerical(
            "jacobi eigendecomposition did not converge".into(),
        ));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        a[i * n + i].partial_cmp(&a[j * n + j]).expect("eigenvalue NaN")
    });
    let values: Vec<f64> = order.iter().map(|&i| a[i * n + i]).collect();
    let mut qs = vec![0.0f64; n * n];
    for (k, &src) in order.iter().enumerate() {
        for i in 0..n {
            qs[i + n * k] = q[i + n * src];
        }
    }
    Ok(EigDecomp { values, n, q: qs })
}

/// Lower-triangular Cholesky factor L with L L^T = original matrix.
#[derive(Debug, Clone)]
pub struct CholFactor {
    n: usize,
    l: Vec<f64>,
}

impl CholFactor {
    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.l[i * self.n + j]
    }

    /// Solve (L L^T) x = rhs.
    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let n = self.n;
        debug_assert_eq!(rhs.len(), n);
        let mut x = rhs.to_vec();
        for i in 0..n {
            for k in 0..i {
                x[i] -= self.l[i * n + k] * x[k];
            }
            x[i] /= self.l[i * n + i];
        }
        for i in (0..n).rev() {
            for k in (i + 1)..n {
                x[i] -= self.l[k * n + i] * x[k];
            }
            x[i] /= self.l[i * n + i];
        }
        x
    }

    /// L^T M L for symmetric M (result symmetrized).
    pub fn conj_lt_m_l(&self, m: &SymMat) -> SymMat {
        let n = self.n;
        // tmp = M L
        let mut tmp = vec![0.0f64; n * n];
        for i in 0..n {
            for j in 0..n {
                let mut acc = 0.0;
                for k in j..n {
                    acc += m.get(i, k) * self.l[k * n + j];
                }
                tmp[i * n + j] = acc;
            }
        }
        let mut out = vec![0.0f64; n * n];
        for i in 0..n {
            for j in i..n {
                let mut acc = 0.0;
                for k in i..n {
                    acc += self.l[k * n + i] * tmp[k * n + j];
                }
                out[i * n + j] = acc;
                out[j * n + i] = acc;
            }
        }
        SymMat { n, a: out }
    }

    /// L U L^T for symmetric U (result symmetrized).
    pub fn conj_l_u_lt(&self, u: &SymMat) -> SymMat {
        let n = self.n;
        // tmp = U L^T
        let mut tmp = vec![0.0f64; n * n];
        for i in 0..n {
            for j in 0..n {
                let mut acc = 0.0;
                for k in 0..=j.min(n - 1) {
                    // L^T[k][j] = L[j][k], nonzero for k <= j
                    acc += u.get(i, k) * self.l[j * n + k];
                }
                tmp[i * n + j] = acc;
            }
        }
        let mut out = vec![0.0f64; n * n];
        for i in 0..n {
            for j in i..n {
                let mut acc = 0.0;
                for k in 0..=i {
                    acc += self.l[i * n + k] * tmp[k * n + j];
                }
                out[i * n + j] = acc;
                out[j * n + i] = acc;
            }
        }
        SymMat { n, a: out }
    }

    /// L⁻¹ M L⁻ᵀ for symmetric M (result symmetrized).
    pub fn inv_conj(&self, m: &SymMat) -> SymMat {
        let n = self.n;
        // forward solve L Z = M column by column
        let mut z = vec![0.0f64; n * n];
        for j in 0..n {
            for i in 0..n {
                let mut acc = m.get(i, j);
                for k in 0..i {
                    acc -= self.l[i * n + k] * z[k * n + j];
                }
                z[i * n + j] = acc / self.l[i * n + i];
            }
        }
        // K = Z L⁻ᵀ, i.e. L Kᵀ = Zᵀ; Kᵀ and K symmetrize to the same matrix
        let mut kt = vec![0.0f64; n * n];
        for j in 0..n {
            for i in 0..n {
                let mut acc = z[j * n + i];
                for k in 0..i {
                    acc -= self.l[i * n + k] * kt[k * n + j];
                }
                kt[i * n + j] = acc / self.l[i * n + i];
            }
        }
        SymMat::from_raw_symmetrized(n, &kt)
    }

    /// Reconstruct L L^T.
    pub fn reconstruct(&self) -> SymMat {
        let n = self.n;
        SymMat::from_fn(n, |i, j| {
            let mut acc = 0.0;
            for k in 0..=i.min(j) {
                acc += self.l[i * n + k] * self.l[j * n + k];
            }
            acc
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn random_sym(rng: &mut StdRng, n: usize) -> SymMat {
        SymMat::from_fn(n, |_, _| rng.gen_range(-1.0..1.0))
    }

    fn random_spd(rng: &mut StdRng, n: usize) -> SymMat {
        let b = random_sym(rng, n);
        let bb = b.conjugate(&SymMat::identity(n)).unwrap();
        bb.axpy(0.5 + rng.gen_range(0.0..1.0), &SymMat::identity(n)).unwrap()
    }

    /// Number of eigenvalues of M strictly below lam, via signs of the
    /// leading principal minors of M - lam I (no pivoting; generic lam).
    fn count_below(m: &SymMat, lam: f64) -> Option<usize> {
        let n = m.dim();
        let mut a: Vec<f64> = (0..n * n)
            .map(|idx| {
                let (i, j) = (idx / n, idx % n);
                m.get(i, j) - if i == j { lam } else { 0.0 }
            })
            .collect();
        let mut count = 0usize;
        for k in 0..n {
            let piv = a[k * n + k];
            if piv == 0.0 || !piv.is_finite() {
                return None;
            }
            if piv < 0.0 {
                count += 1;
            }
            for i in (k + 1)..n {
                let f = a[i * n + k] / piv;
                for j in k..n {
                    a[i * n + j] -= f * a[k * n + j];
                }
            }
        }
        Some(count)
    }

    /// Independent minimum-eigenvalue oracle: bisection on the inertia of
    /// M - lam I (equivalently, on sign changes of the characteristic
    /// polynomial along the real axis).
    fn min_eig_oracle(m: &SymMat) -> f64 {
        let r = m.frob_norm() + 1.0;
        let mut lo = -r;
        let mut hi = r;
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            match count_below(m, mid) {
                Some(0) => lo = mid,
                Some(_) => hi = mid,
                // landed on a minor root; nudge
                None => hi = mid + 1e-13 * r,
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn inner_matches_elementwise_sum() {
        let mut rng = StdRng::seed_from_u64(11);
        for _ in 0..20 {
            let u = random_sym(&mut rng, 4);
            let v = random_sym(&mut rng, 4);
            let mut want = 0.0;
            for i in 0..4 {
                for j in 0..4 {
                    want += u.get(i, j) * v.get(i, j);
                }
            }
            assert_eq!(u.inner(&v).unwrap(), want);
        }
    }

    #[test]
    fn inner_dimension_mismatch() {
        let u = SymMat::identity(3);
        let v = SymMat::identity(4);
        assert!(matches!(u.inner(&v), Err(Error::Dimension(_))));
    }

    #[test]
    fn min_eig_identity_and_diag() {
        assert!((SymMat::identity(5).min_eig().unwrap() - 1.0).abs() < 1e-14);
        let d = SymMat::diag(&[3.0, -2.0, 7.0]);
        assert!((d.min_eig().unwrap() + 2.0).abs() < 1e-14);
    }

    #[test]
    fn min_eig_matches_bisection_oracle() {
        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..40 {
            let m = random_sym(&mut rng, 5);
            let got = m.min_eig().unwrap();
            let want = min_eig_oracle(&m);
            assert!(
                (got - want).abs() < 1e-8,
                "jacobi {got} vs oracle {want}"
            );
        }
    }

    #[test]
    fn eigh_reconstructs() {
        let mut rng = StdRng::seed_from_u64(19);
        for _ in 0..20 {
            let m = random_sym(&mut rng, 6);
            let dec = m.eigh().unwrap();
            let back = dec.assemble(|l| l);
            let err = m.sub(&back).unwrap().frob_norm();
            assert!(err < 1e-12 * (1.0 + m.frob_norm()), "reconstruction {err}");
        }
    }

    #[test]
    fn inv_sqrt_defining_identity() {
        let mut rng = StdRng::seed_from_u64(23);
        for _ in 0..20 {
            let x = random_spd(&mut rng, 4);
            let w = x.inv_sqrt().unwrap();
            // W W X = I
            let wwx = mat_mul(&w.mul_raw(&w), x.raw(), 4);
            let mut err = 0.0f64;
            for i in 0..4 {
                for j in 0..4 {
                    let want = if i == j { 1.0 } else { 0.0 };
                    err += (wwx[i * 4 + j] - want).powi(2);
                }
            }
            assert!(err.sqrt() < 1e-9, "||WWX - I|| = {}", err.sqrt());
        }
    }

    #[test]
    fn inv_sqrt_rejects_indefinite() {
        let m = SymMat::diag(&[1.0, -1e-3, 2.0]);
        assert!(matches!(m.inv_sqrt(), Err(Error::NotPositiveDefinite(_))));
    }

    #[test]
    fn chol_reconstructs_and_solves() {
        let mut rng = StdRng::seed_from_u64(31);
        for _ in 0..20 {
            let x = random_spd(&mut rng, 5);
            let l = x.chol_or_none().expect("spd matrix must factor");
            let err = l.reconstruct().sub(&x).unwrap().frob_norm();
            assert!(err < 1e-10 * x.frob_norm(), "||LL^T - X|| = {err}");

            let rhs: Vec<f64> = (0..5).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let sol = l.solve(&rhs);
            for i in 0..5 {
                let mut acc = 0.0;
                for j in 0..5 {
                    acc += x.get(i, j) * sol[j];
                }
                assert!((acc - rhs[i]).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn chol_agrees_with_min_eig_sign() {
        let mut rng = StdRng::seed_from_u64(101);
        let mut checked = 0;
        for _ in 0..1000 {
            let n = rng.gen_range(1..=6);
            let m = random_sym(&mut rng, n);
            let lam = m.min_eig().unwrap();
            if lam.abs() < 1e-10 {
                continue; // boundary gray zone is out of contract
            }
            checked += 1;
            assert_eq!(
                m.chol_or_none().is_some(),
                lam > 0.0,
                "chol/min_eig disagree at lam = {lam}"
            );
        }
        assert!(checked > 900);
    }

    #[test]
    fn inv_conj_inverts_conj() {
        let mut rng = StdRng::seed_from_u64(73);
        for _ in 0..10 {
            let x = random_spd(&mut rng, 5);
            let m = random_sym(&mut rng, 5);
            let l = x.chol_or_none().unwrap();
            let back = l.conj_l_u_lt(&l.inv_conj(&m));
            let err = back.sub(&m).unwrap().frob_norm();
            assert!(err < 1e-10 * (1.0 + m.frob_norm()), "round trip {err}");
        }
    }

    #[test]
    fn conjugation_helpers_agree() {
        let mut rng = StdRng::seed_from_u64(57);
        let x = random_spd(&mut rng, 5);
        let s = random_spd(&mut rng, 5);
        let l = x.chol_or_none().unwrap();
        // L^T S L has the same spectrum as X^{1/2} S X^{1/2}
        let w1 = l.conj_lt_m_l(&s);
        let xh = x.sqrt_pd().unwrap();
        let w2 = xh.conjugate(&s).unwrap();
        let e1 = w1.eigh().unwrap().values;
        let e2 = w2.eigh().unwrap().values;
        for (a, b) in e1.iter().zip(&e2) {
            assert!((a - b).abs() < 1e-9 * (1.0 + b.abs()));
        }
    }
}

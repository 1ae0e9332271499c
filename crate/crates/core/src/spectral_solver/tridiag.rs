//! Symmetric tridiagonal matrices: Sturm bisection, inverse iteration and
//! SPD solves.

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct SymTridiag {
    pub diag: Vec<f64>,
    /// `off[i]` couples rows `i` and `i + 1`.
    pub off: Vec<f64>,
}

impl SymTridiag {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Result<Self> {
        if diag.is_empty() || off.len() + 1 != diag.len() {
            return Err(Error::InvalidParameter(format!(
                "tridiagonal sizes {} and {} do not match",
                diag.len(),
                off.len()
            )));
        }
        Ok(SymTridiag { diag, off })
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        let n = self.len();
        for i in 0..n {
            let mut s = self.diag[i] * x[i];
            if i > 0 {
                s += self.off[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                s += self.off[i] * x[i + 1];
            }
            y[i] = s;
        }
    }

    /// Gershgorin interval containing the spectrum.
    pub fn bounds(&self) -> (f64, f64) {
        let n = self.len();
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for i in 0..n {
            let mut r = 0.0;
            if i > 0 {
                r += self.off[i - 1].abs();
            }
            if i + 1 < n {
                r += self.off[i].abs();
            }
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        (lo, hi)
    }

    pub fn norm_bound(&self) -> f64 {
        let (lo, hi) = self.bounds();
        lo.abs().max(hi.abs())
    }

    /// Number of eigenvalues strictly below `x` (Sturm sequence count).
    pub fn count_below(&self, x: f64) -> usize {
        let tiny = f64::MIN_POSITIVE.sqrt();
        let mut count = 0;
        let mut d = 1.0;
        for i in 0..self.len() {
            let b2 = if i > 0 { self.off[i - 1] * self.off[i - 1] } else { 0.0 };
            d = self.diag[i] - x - b2 / d;
            if d.abs() < tiny {
                d = -tiny;
            }
            if d < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// The `k`-th smallest eigenvalue (0-based) to absolute accuracy `abs_tol`.
    pub fn eigenvalue(&self, k: usize, abs_tol: f64) -> f64 {
        let (mut lo, mut hi) = self.bounds();
        let pad = 1e-14 * (lo.abs().max(hi.abs())).max(1.0);
        lo -= pad;
        hi += pad;
        while hi - lo > abs_tol {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// Solve `(T − shift) x = b` by LU with partial pivoting. Exactly
    /// singular pivots are replaced by `eps·‖T‖`, as inverse iteration needs.
    pub fn solve_shifted(&self, shift: f64, b: &[f64]) -> Vec<f64> {
        let n = self.len();
        let floor = f64::EPSILON * self.norm_bound().max(f64::MIN_POSITIVE);
        let guard = |p: f64| if p.abs() < floor { floor.copysign(p + 0.0) } else { p };
        // row i of U is (u0, u1, u2) at columns i, i+1, i+2
        let mut u0 = vec![0.0; n];
        let mut u1 = vec![0.0; n];
        let mut u2 = vec![0.0; n];
        let mut y = vec![0.0; n];
        // the active row has entries (a, c) at columns i, i+1
        let mut a = self.diag[0] - shift;
        let mut c = if n > 1 { self.off[0] } else { 0.0 };
        let mut r = b[0];
        for i in 0..n - 1 {
            let sub = self.off[i];
            let nd = self.diag[i + 1] - shift;
            let nc = if i + 2 < n { self.off[i + 1] } else { 0.0 };
            let nr = b[i + 1];
            if sub.abs() > a.abs() {
                let m = a / sub;
                u0[i] = sub;
                u1[i] = nd;
                u2[i] = nc;
                y[i] = nr;
                a = c - m * nd;
                c = -m * nc;
                r -= m * nr;
            } else {
                let piv = guard(a);
                let m = sub / piv;
                u0[i] = piv;
                u1[i] = c;
                y[i] = r;
                a = nd - m * c;
                c = nc;
                r = nr - m * r;
            }
        }
        u0[n - 1] = guard(a);
        y[n - 1] = r;
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let mut s = y[i];
            if i + 1 < n {
                s -= u1[i] * x[i + 1];
            }
            if i + 2 < n {
                s -= u2[i] * x[i + 2];
            }
            x[i] = s / u0[i];
        }
        x
    }

    /// Eigenvector for the (accurate) eigenvalue `lambda`, orthogonal to the
    /// vectors in `against`.
    pub fn inverse_iteration(
        &self,
        lambda: f64,
        against: &[Vec<f64>],
        seed: u64,
        residual_tol: f64,
    ) -> Result<Vec<f64>> {
        let n = self.len();
        let mut v: Vec<f64> = pseudo_random(n, seed);
        orthonormalize(&mut v, against);
        let mut hv = vec![0.0; n];
        for _ in 0..8 {
            let mut w = self.solve_shifted(lambda, &v);
            orthonormalize(&mut w, against);
            orthonormalize(&mut w, against);
            v = w;
            self.matvec(&v, &mut hv);
            let r = hv
                .iter()
                .zip(&v)
                .map(|(h, x)| (h - lambda * x).powi(2))
                .sum::<f64>()
                .sqrt();
            if r <= residual_tol {
                return Ok(v);
            }
        }
        Err(Error::EigenvectorFailure { eigenvalue: lambda })
    }

    /// The `k` lowest eigenpairs. `tol` is relative to `‖T‖`: eigenvalues are
    /// bisected to `tol·‖T‖` and residuals satisfy `‖Tv − λv‖ ≤ 10·tol·‖T‖`.
    pub fn eig_low(&self, k: usize, tol: f64) -> Result<Vec<(f64, Vec<f64>)>> {
        if k > self.len() {
            return Err(Error::InvalidParameter(format!(
                "requested {k} eigenpairs of a {}x{} matrix",
                self.len(),
                self.len()
            )));
        }
        let norm = self.norm_bound().max(f64::MIN_POSITIVE);
        let abs_tol = tol.max(4.0 * f64::EPSILON) * norm;
        let mut out: Vec<(f64, Vec<f64>)> = Vec::with_capacity(k);
        let mut vecs: Vec<Vec<f64>> = Vec::with_capacity(k);
        for j in 0..k {
            let lambda = self.eigenvalue(j, abs_tol);
            let v = self.inverse_iteration(lambda, &vecs, j as u64 + 1, 10.0 * abs_tol)?;
            vecs.push(v.clone());
            out.push((lambda, v));
        }
        Ok(out)
    }

    /// All eigenpairs strictly below `threshold`.
    pub fn eig_below(&self, threshold: f64, tol: f64) -> Result<Vec<(f64, Vec<f64>)>> {
        let k = self.count_below(threshold);
        self.eig_low(k, tol)
    }

    /// Factor `T + shift` assuming it is positive definite.
    pub fn spd_factor(&self, shift: f64) -> Result<SpdFactor> {
        let n = self.len();
        let mut d = vec![0.0; n];
        let mut l = vec![0.0; n.saturating_sub(1)];
        d[0] = self.diag[0] + shift;
        for i in 1..n {
            if !(d[i - 1] > 0.0) {
                return Err(Error::InvalidParameter(
                    "shifted tridiagonal matrix is not positive definite".into(),
                ));
            }
            l[i - 1] = self.off[i - 1] / d[i - 1];
            d[i] = self.diag[i] + shift - l[i - 1] * self.off[i - 1];
        }
        if !(d[n - 1] > 0.0) {
            return Err(Error::InvalidParameter(
                "shifted tridiagonal matrix is not positive definite".into(),
            ));
        }
        Ok(SpdFactor { d, l })
    }
}

/// `LDLᵀ` factors of a positive definite tridiagonal matrix.
#[derive(Clone, Debug)]
pub struct SpdFactor {
    d: Vec<f64>,
    l: Vec<f64>,
}

impl SpdFactor {
    pub fn solve_in_place(&self, x: &mut [f64]) {
        let n = self.d.len();
        for i in 1..n {
            x[i] -= self.l[i - 1] * x[i - 1];
        }
        for i in 0..n {
            x[i] /= self.d[i];
        }
        for i in (0..n - 1).rev() {
            x[i] -= self.l[i] * x[i + 1];
        }
    }
}

fn pseudo_random(n: usize, seed: u64) -> Vec<f64> {
    // splitmix64; only needs to avoid being orthogonal to the target
    let mut state = seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ 0xD1B5_4A32_D192_ED03;
    (0..n)
        .map(|_| {
            state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
            let mut z = state;
            z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
            z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
            z ^= z >> 31;
            (z >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        })
        .collect()
}

fn orthonormalize(v: &mut [f64], against: &[Vec<f64>]) {
    for q in against {
        let p: f64 = q.iter().zip(v.iter()).map(|(a, b)| a * b).sum();
        for (x, qi) in v.iter_mut().zip(q) {
            *x -= p * qi;
        }
    }
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if n > 0.0 {
        for x in v.iter_mut() {
            *x /= n;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{DMatrix, SymmetricEigen};
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn laplacian(n: usize, h: f64) -> SymTridiag {
        SymTridiag::new(vec![2.0 / (h * h); n], vec![-1.0 / (h * h); n - 1]).unwrap()
    }

    fn dense(t: &SymTridiag) -> DMatrix<f64> {
        let n = t.len();
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = t.diag[i];
            if i + 1 < n {
                m[(i, i + 1)] = t.off[i];
                m[(i + 1, i)] = t.off[i];
            }
        }
        m
    }

    #[test]
    fn dirichlet_laplacian_lowest() {
        let l = 10.0;
        let n_points = 2001;
        let h = 2.0 * l / (n_points - 1) as f64;
        let t = laplacian(n_points - 2, h);
        let pairs = t.eig_low(3, 1e-15).unwrap();
        let want = 2.0 * (1.0 - (PI * h / (2.0 * l)).cos()) / (h * h);
        assert!((pairs[0].0 - want).abs() < 1e-10 * t.norm_bound());
        assert!((want - (PI / (2.0 * l)).powi(2)).abs() < 1e-5);
        let want2 = 2.0 * (1.0 - (2.0 * PI * h / (2.0 * l)).cos()) / (h * h);
        assert!((pairs[1].0 - want2).abs() < 1e-10 * t.norm_bound());
    }

    #[test]
    fn too_many_requested() {
        let t = laplacian(5, 1.0);
        assert!(matches!(t.eig_low(6, 1e-12), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn sech_well_has_zero() {
        let (l, n_points) = (20.0, 4001);
        let h = 2.0 * l / (n_points - 1) as f64;
        let n = n_points - 2;
        let diag = (1..=n)
            .map(|i| {
                let x = -l + i as f64 * h;
                2.0 / (h * h) + 1.0 - 2.0 / (x.cosh() * x.cosh())
            })
            .collect();
        let t = SymTridiag::new(diag, vec![-1.0 / (h * h); n - 1]).unwrap();
        let (lambda, v) = &t.eig_low(1, 1e-15).unwrap()[0];
        assert!(lambda.abs() < 1e-5, "{lambda}");
        let mut hv = vec![0.0; n];
        t.matvec(v, &mut hv);
        let r: f64 = hv.iter().zip(v).map(|(a, b)| (a - lambda * b).powi(2)).sum::<f64>().sqrt();
        assert!(r <= 10.0 * 1e-15 * t.norm_bound());
    }

    #[test]
    fn shifted_solve_matches_dense() {
        let t = SymTridiag::new(vec![1.0, -2.0, 0.5, 3.0, 0.0], vec![2.0, 0.1, -4.0, 1.5]).unwrap();
        let b = vec![1.0, 2.0, -1.0, 0.3, 0.7];
        let x = t.solve_shifted(0.25, &b);
        let m = dense(&t) - DMatrix::identity(5, 5) * 0.25;
        let r = &m * nalgebra::DVector::from_vec(x) - nalgebra::DVector::from_vec(b);
        assert!(r.norm() < 1e-12, "{r}");
    }

    #[test]
    fn cluster_gets_orthogonal_vectors() {
        // two decoupled blocks with equal spectra give exact double eigenvalues
        let t = SymTridiag::new(
            vec![2.0, 2.0, 2.0, 2.0, 2.0, 2.0],
            vec![-1.0, -1.0, 0.0, -1.0, -1.0],
        )
        .unwrap();
        let p = t.eig_low(2, 1e-15).unwrap();
        assert!((p[0].0 - p[1].0).abs() < 1e-12);
        let dot: f64 = p[0].1.iter().zip(&p[1].1).map(|(a, b)| a * b).sum();
        assert!(dot.abs() < 1e-12);
    }

    #[test]
    fn spd_solve() {
        let t = laplacian(50, 0.1);
        let f = t.spd_factor(1.0).unwrap();
        let b: Vec<f64> = (0..50).map(|i| (i as f64 * 0.3).sin()).collect();
        let mut x = b.clone();
        f.solve_in_place(&mut x);
        let mut y = vec![0.0; 50];
        t.matvec(&x, &mut y);
        for i in 0..50 {
            assert!((y[i] + x[i] - b[i]).abs() < 1e-10);
        }
        assert!(laplacian(3, 1.0).spd_factor(-5.0).is_err());
    }

    proptest! {
        #[test]
        fn agrees_with_dense_oracle(diag in prop::collection::vec(-5.0f64..5.0, 2..30), seed in 0u64..1000) {
            let n = diag.len();
            let off: Vec<f64> = pseudo_random(n - 1, seed).iter().map(|x| 4.0 * x).collect();
            let t = SymTridiag::new(diag, off).unwrap();
            let mut want: Vec<f64> = SymmetricEigen::new(dense(&t)).eigenvalues.iter().copied().collect();
            want.sort_by(f64::total_cmp);
            let k = n.min(4);
            let got = t.eig_low(k, 1e-14).unwrap();
            for j in 0..k {
                prop_assert!((got[j].0 - want[j]).abs() < 1e-11 * t.norm_bound().max(1.0));
                let mut hv = vec![0.0; n];
                t.matvec(&got[j].1, &mut hv);
                let r: f64 = hv.iter().zip(&got[j].1).map(|(a, b)| (a - got[j].0 * b).powi(2)).sum::<f64>().sqrt();
                prop_assert!(r <= 1e-12 * t.norm_bound().max(1.0));
            }
            for a in 0..k {
                for b in 0..a {
                    let d: f64 = got[a].1.iter().zip(&got[b].1).map(|(x, y)| x * y).sum();
                    prop_assert!(d.abs() < 1e-9);
                }
            }
        }
    }
}

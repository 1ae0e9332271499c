//! The reduced resolvent `(P(𝒟 − E)P)⁻¹` on the orthogonal complement of a
//! few approximate zero modes.
//!
//! `A = P(𝒟 − E)P` is Hermitian and, for `|E|` inside the window, boundedly
//! invertible on the range of `P`. We run preconditioned conjugate gradients
//! on `A²x = Ab`, preconditioned by `P(𝒟² + κ∞²)⁻¹P`; `𝒟²` is the
//! block-diagonal pair of tridiagonal Witten Laplacians, so each
//! preconditioner application is two tridiagonal solves.

use num_complex::Complex64;

use super::grid::Grid;
use super::tridiag::SpdFactor;
use super::witten::{GridSpinor, Layout, StaggeredDirac};
use crate::error::{Error, Result};
use crate::mass_profiles::MassProfile;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolveStats {
    pub iterations: usize,
    /// `‖A x − b‖ / ‖b‖`
    pub relative_residual: f64,
}

#[derive(Clone, Debug)]
pub struct ProjectedResolvent {
    op: StaggeredDirac,
    basis: Vec<GridSpinor>,
    top_pc: SpdFactor,
    bot_pc: SpdFactor,
    tol: f64,
    max_iter: usize,
}

impl ProjectedResolvent {
    /// `span` are the grid-sampled functions to project out; they are
    /// orthonormalized here. `tol` is the relative residual demanded of every
    /// solve.
    pub fn new(profile: &MassProfile, grid: Grid, span: &[GridSpinor], tol: f64) -> Result<Self> {
        let op = StaggeredDirac::new(profile, grid);
        let mut basis: Vec<GridSpinor> = Vec::with_capacity(span.len());
        for v in span {
            if v.layout() != op.layout() {
                return Err(Error::InvalidParameter("projection vector sampled on a different grid".into()));
            }
            let mut w = v.clone();
            let n0 = w.norm();
            for _ in 0..2 {
                for q in &basis {
                    let c = q.inner(&w);
                    w.axpy(-c, q);
                }
            }
            let n = w.norm();
            if !(n > 1e-8 * n0) {
                return Err(Error::InvalidParameter("projection vectors are linearly dependent".into()));
            }
            w.scale(Complex64::new(1.0 / n, 0.0));
            basis.push(w);
        }
        let shift = profile.kappa_inf().powi(2);
        Ok(ProjectedResolvent {
            top_pc: op.h_top().spd_factor(shift)?,
            bot_pc: op.h_bottom().spd_factor(shift)?,
            op,
            basis,
            tol,
            max_iter: 2000,
        })
    }

    pub fn layout(&self) -> Layout {
        self.op.layout()
    }

    pub fn operator(&self) -> &StaggeredDirac {
        &self.op
    }

    /// Orthonormal basis of the projected-out span.
    pub fn basis(&self) -> &[GridSpinor] {
        &self.basis
    }

    /// `v ← Pv`
    pub fn project(&self, v: &mut GridSpinor) {
        for _ in 0..2 {
            for q in &self.basis {
                let c = q.inner(v);
                v.axpy(-c, q);
            }
        }
    }

    /// `P(𝒟 − E)P v`
    pub fn apply(&self, energy: f64, v: &GridSpinor) -> GridSpinor {
        let mut w = v.clone();
        self.project(&mut w);
        let mut out = self.op.apply(&w);
        out.axpy(Complex64::new(-energy, 0.0), &w);
        self.project(&mut out);
        out
    }

    fn precondition(&self, v: &GridSpinor) -> GridSpinor {
        let mut w = v.clone();
        self.project(&mut w);
        let solve = |f: &SpdFactor, z: &mut [Complex64]| {
            let mut re: Vec<f64> = z.iter().map(|c| c.re).collect();
            let mut im: Vec<f64> = z.iter().map(|c| c.im).collect();
            f.solve_in_place(&mut re);
            f.solve_in_place(&mut im);
            for (c, (a, b)) in z.iter_mut().zip(re.into_iter().zip(im)) {
                *c = Complex64::new(a, b);
            }
        };
        solve(&self.top_pc, &mut w.top);
        solve(&self.bot_pc, &mut w.bottom);
        self.project(&mut w);
        w
    }

    /// Solve `P(𝒟 − E)P ψ = P rhs` for `ψ` in the range of `P`.
    pub fn solve(&self, energy: f64, rhs: &GridSpinor) -> Result<(GridSpinor, SolveStats)> {
        let mut b = rhs.clone();
        self.project(&mut b);
        let b_norm = b.norm();
        let mut x = GridSpinor::zeros(self.layout());
        if b_norm == 0.0 {
            return Ok((
                x,
                SolveStats {
                    iterations: 0,
                    relative_residual: 0.0,
                },
            ));
        }
        let y = self.apply(energy, &b);
        let y_norm = y.norm();
        let mut r = y.clone();
        let mut z = self.precondition(&r);
        let mut p = z.clone();
        let mut rz = r.inner(&z).re;
        let mut inner_tol = 0.1 * self.tol;
        let mut achieved = f64::INFINITY;
        for it in 1..=self.max_iter {
            let q = self.apply(energy, &self.apply(energy, &p));
            let alpha = rz / p.inner(&q).re;
            x.axpy(Complex64::new(alpha, 0.0), &p);
            r.axpy(Complex64::new(-alpha, 0.0), &q);
            if r.norm() <= inner_tol * y_norm {
                let mut res = self.apply(energy, &x);
                res.axpy(Complex64::new(-1.0, 0.0), &b);
                achieved = res.norm() / b_norm;
                if achieved <= self.tol {
                    return Ok((
                        x,
                        SolveStats {
                            iterations: it,
                            relative_residual: achieved,
                        },
                    ));
                }
                inner_tol *= 0.1;
                if inner_tol < 1e-3 * f64::EPSILON {
                    break;
                }
            }
            z = self.precondition(&r);
            let rz_new = r.inner(&z).re;
            let beta = rz_new / rz;
            rz = rz_new;
            let mut next = z.clone();
            next.axpy(Complex64::new(beta, 0.0), &p);
            p = next;
        }
        Err(Error::ResolventFailure {
            energy,
            residual: achieved,
            iterations: self.max_iter,
        })
    }
}

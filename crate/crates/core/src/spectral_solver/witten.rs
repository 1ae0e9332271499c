//! Gap spectrum from the factorized (supersymmetric) form of the rotated
//! Dirac operator.
//!
//! In the basis `β = Uα`, `U = [[1, i], [1, −i]]/√2`, the operator becomes
//! `[[0, B], [B†, 0]]` with `B = i(∂ + κ)`, and its square is
//! `diag(BB†, B†B)`: the two Witten Laplacians `−∂² + κ² ± κ′`.
//!
//! `B` is discretized on a staggered grid: `β₂` lives on the interior nodes and
//! `β₁` on the cell midpoints. The real part `B_r ≈ ∂ + κ` is a two-point
//! stencil with exponentially fitted weights, so `H₋ = B_rᵀB_r` and
//! `H₊ = B_rB_rᵀ` are exactly positive semi-definite tridiagonal matrices
//! with identical nonzero spectra. The midpoint next to an end where the mass
//! is negative is dropped, which keeps `β₁ ~ e^{+K}` from producing spurious
//! edge states and makes the discrete index `dim ker B_r − dim ker B_rᵀ`
//! equal to its continuum value.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::grid::Grid;
use super::tridiag::SymTridiag;
use crate::analytic_modes::Spinor;
use crate::error::{Error, Result};
use crate::mass_profiles::{MassProfile, WallKind};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Relative accuracy of the tridiagonal eigenpairs.
const EIG_TOL: f64 = 1e-14;

/// Boundary amplitude above which the box is considered too small.
pub const TRUNCATION_LIMIT: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpectralMethod {
    Witten,
    Shooting,
}

/// Placement of the two spinor components on a [`Grid`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Layout {
    grid: Grid,
    first_mid: usize,
    n_top: usize,
    n_bot: usize,
}

impl Layout {
    pub fn new(grid: Grid, profile: &MassProfile) -> Self {
        let n = grid.points();
        let drop_left = profile.kappa_at_infinity(false) < 0.0;
        let drop_right = profile.kappa_at_infinity(true) > 0.0;
        Layout {
            grid,
            first_mid: drop_left as usize,
            n_top: n - 1 - drop_left as usize - drop_right as usize,
            n_bot: n - 2,
        }
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    /// Number of `β₁` unknowns (midpoints).
    pub fn n_top(&self) -> usize {
        self.n_top
    }

    /// Number of `β₂` unknowns (interior nodes).
    pub fn n_bot(&self) -> usize {
        self.n_bot
    }

    pub fn top_x(&self, r: usize) -> f64 {
        self.grid.mid(self.first_mid + r)
    }

    pub fn bot_x(&self, j: usize) -> f64 {
        self.grid.x(j + 1)
    }

    /// Bottom-unknown columns touched by top row `r` (left node, right node).
    fn columns(&self, r: usize) -> (Option<usize>, Option<usize>) {
        let c = self.first_mid + r;
        (c.checked_sub(1), (c < self.n_bot).then_some(c))
    }
}

/// A grid function in the rotated basis `β = Uα`.
#[derive(Clone, Debug, PartialEq)]
pub struct GridSpinor {
    layout: Layout,
    pub top: Vec<Complex64>,
    pub bottom: Vec<Complex64>,
}

impl GridSpinor {
    pub fn zeros(layout: Layout) -> Self {
        GridSpinor {
            layout,
            top: vec![Complex64::new(0.0, 0.0); layout.n_top],
            bottom: vec![Complex64::new(0.0, 0.0); layout.n_bot],
        }
    }

    /// Sample a spinor field given in the original basis.
    pub fn sample<F: Fn(f64) -> Spinor>(layout: Layout, f: F) -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let top = (0..layout.n_top)
            .map(|r| {
                let a = f(layout.top_x(r));
                (a[0] + I * a[1]) * s
            })
            .collect();
        let bottom = (0..layout.n_bot)
            .map(|j| {
                let a = f(layout.bot_x(j));
                (a[0] - I * a[1]) * s
            })
            .collect();
        GridSpinor {
            layout,
            top,
            bottom,
        }
    }

    pub fn layout(&self) -> Layout {
        self.layout
    }

    /// Grid inner product `h Σ conj(a)·b`.
    pub fn inner(&self, other: &GridSpinor) -> Complex64 {
        let s: Complex64 = self
            .top
            .iter()
            .zip(&other.top)
            .chain(self.bottom.iter().zip(&other.bottom))
            .map(|(a, b)| a.conj() * b)
            .sum();
        s * self.layout.grid.h()
    }

    pub fn norm(&self) -> f64 {
        self.inner(self).re.max(0.0).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.top
            .iter()
            .chain(&self.bottom)
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// `self += alpha · other`
    pub fn axpy(&mut self, alpha: Complex64, other: &GridSpinor) {
        for (a, b) in self.top.iter_mut().zip(&other.top) {
            *a += alpha * b;
        }
        for (a, b) in self.bottom.iter_mut().zip(&other.bottom) {
            *a += alpha * b;
        }
    }

    pub fn scale(&mut self, alpha: Complex64) {
        for a in self.top.iter_mut().chain(self.bottom.iter_mut()) {
            *a *= alpha;
        }
    }

    /// Largest modulus among the outermost unknowns of each component.
    pub fn boundary_amplitude(&self) -> f64 {
        let ends = |v: &[Complex64]| match v {
            [] => 0.0,
            [a] => a.norm(),
            [a, .., b] => a.norm().max(b.norm()),
        };
        ends(&self.top).max(ends(&self.bottom))
    }

    /// Values in the original basis at every grid node; the midpoint component
    /// is averaged onto the nodes and taken as zero where it is absent.
    pub fn to_nodes(&self) -> Vec<(f64, Spinor)> {
        let l = self.layout;
        let zero = Complex64::new(0.0, 0.0);
        let top_at_mid = |m: usize| -> Complex64 {
            if m < l.first_mid || m - l.first_mid >= l.n_top {
                zero
            } else {
                self.top[m - l.first_mid]
            }
        };
        let n = l.grid.points();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        (0..n)
            .map(|i| {
                let b2 = if i == 0 || i == n - 1 {
                    zero
                } else {
                    self.bottom[i - 1]
                };
                let left = if i > 0 { top_at_mid(i - 1) } else { zero };
                let right = if i + 1 < n { top_at_mid(i) } else { zero };
                let b1 = 0.5 * (left + right);
                (l.grid.x(i), [(b1 + b2) * s, I * (b2 - b1) * s])
            })
            .collect()
    }
}

/// Distance between two grid spinors after removing the relative phase.
pub fn aligned_distance(a: &GridSpinor, b: &GridSpinor) -> f64 {
    let na = a.inner(a).re;
    let nb = b.inner(b).re;
    (na + nb - 2.0 * a.inner(b).norm()).max(0.0).sqrt()
}

/// The staggered first-order operator `[[0, iB_r], [−iB_rᵀ, 0]]`.
#[derive(Clone, Debug)]
pub struct StaggeredDirac {
    layout: Layout,
    lo: Vec<f64>,
    up: Vec<f64>,
}

impl StaggeredDirac {
    pub fn new(profile: &MassProfile, grid: Grid) -> Self {
        let layout = Layout::new(grid, profile);
        let h = grid.h();
        let (lo, up) = (0..layout.n_top)
            .map(|r| {
                // exact for piecewise constant κ: ratio e^{−hκ} across the cell
                let w = (0.5 * h * profile.kappa(layout.top_x(r))).tanh() / h;
                (-1.0 / h + w, 1.0 / h + w)
            })
            .unzip();
        StaggeredDirac { layout, lo, up }
    }

    pub fn layout(&self) -> Layout {
        self.layout
    }

    fn br<T>(&self, v: &[T]) -> Vec<T>
    where
        T: Copy + Default + std::ops::Add<Output = T> + std::ops::Mul<f64, Output = T>,
    {
        (0..self.layout.n_top)
            .map(|r| {
                let (a, b) = self.layout.columns(r);
                let mut s = T::default();
                if let Some(a) = a {
                    s = s + v[a] * self.lo[r];
                }
                if let Some(b) = b {
                    s = s + v[b] * self.up[r];
                }
                s
            })
            .collect()
    }

    fn brt<T>(&self, u: &[T]) -> Vec<T>
    where
        T: Copy + Default + std::ops::Add<Output = T> + std::ops::Mul<f64, Output = T>,
    {
        let mut out = vec![T::default(); self.layout.n_bot];
        for (r, &ur) in u.iter().enumerate() {
            let (a, b) = self.layout.columns(r);
            if let Some(a) = a {
                out[a] = out[a] + ur * self.lo[r];
            }
            if let Some(b) = b {
                out[b] = out[b] + ur * self.up[r];
            }
        }
        out
    }

    pub fn apply(&self, psi: &GridSpinor) -> GridSpinor {
        let top = self.br(&psi.bottom).into_iter().map(|z| I * z).collect();
        let bottom = self.brt(&psi.top).into_iter().map(|z| -I * z).collect();
        GridSpinor {
            layout: self.layout,
            top,
            bottom,
        }
    }

    /// `‖(D − E)ψ‖` on the grid.
    pub fn residual(&self, energy: f64, psi: &GridSpinor) -> f64 {
        let mut r = self.apply(psi);
        r.axpy(Complex64::new(-energy, 0.0), psi);
        r.norm()
    }

    /// `B_rᵀB_r`, the discrete `−∂² + κ² − κ′` acting on `β₂`.
    pub fn h_bottom(&self) -> SymTridiag {
        let l = self.layout;
        let mut diag = vec![0.0; l.n_bot];
        let mut off = vec![0.0; l.n_bot.saturating_sub(1)];
        for r in 0..l.n_top {
            match l.columns(r) {
                (Some(a), Some(b)) => {
                    diag[a] += self.lo[r] * self.lo[r];
                    diag[b] += self.up[r] * self.up[r];
                    off[a] += self.lo[r] * self.up[r];
                }
                (Some(a), None) => diag[a] += self.lo[r] * self.lo[r],
                (None, Some(b)) => diag[b] += self.up[r] * self.up[r],
                (None, None) => {}
            }
        }
        SymTridiag { diag, off }
    }

    /// `B_rB_rᵀ`, the discrete `−∂² + κ² + κ′` acting on `β₁`.
    pub fn h_top(&self) -> SymTridiag {
        let l = self.layout;
        let diag = (0..l.n_top)
            .map(|r| {
                let (a, b) = l.columns(r);
                a.map_or(0.0, |_| self.lo[r] * self.lo[r]) + b.map_or(0.0, |_| self.up[r] * self.up[r])
            })
            .collect();
        let off = (0..l.n_top.saturating_sub(1))
            .map(|r| match l.columns(r).1 {
                Some(_) => self.up[r] * self.lo[r + 1],
                None => 0.0,
            })
            .collect();
        SymTridiag { diag, off }
    }
}

/// How `κ′` enters the nodal Witten pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DerivativeRule {
    Analytic,
    CenteredDifference,
}

/// The two Witten Laplacians `H∓ = −∂² + κ² ∓ κ′` with the three-point
/// Laplacian and the potential sampled at the interior nodes.
#[derive(Clone, Debug)]
pub struct WittenPair {
    pub grid: Grid,
    pub minus: SymTridiag,
    pub plus: SymTridiag,
    pub derivative_rule: DerivativeRule,
}

pub fn build_witten_pair(profile: &MassProfile, grid: Grid) -> Result<WittenPair> {
    let rule = match profile.kind() {
        WallKind::Sgn => {
            return Err(Error::InvalidParameter(
                "sgn walls have no pointwise derivative; use the factorized solver".into(),
            ))
        }
        WallKind::CustomSampled => DerivativeRule::CenteredDifference,
        _ => DerivativeRule::Analytic,
    };
    let h = grid.h();
    let dk = |x: f64| match rule {
        DerivativeRule::Analytic => profile.kappa_prime(x),
        DerivativeRule::CenteredDifference => (profile.kappa(x + h) - profile.kappa(x - h)) / (2.0 * h),
    };
    Ok(nodal_pair(grid, |x| profile.kappa(x), dk, rule))
}

pub(crate) fn nodal_pair<K: Fn(f64) -> f64, D: Fn(f64) -> f64>(
    grid: Grid,
    kappa: K,
    kappa_prime: D,
    rule: DerivativeRule,
) -> WittenPair {
    let h = grid.h();
    let n = grid.points() - 2;
    let (minus, plus) = (1..=n)
        .map(|i| {
            let x = grid.x(i);
            let (k, dk) = (kappa(x), kappa_prime(x));
            (2.0 / (h * h) + k * k - dk, 2.0 / (h * h) + k * k + dk)
        })
        .unzip();
    let off = vec![-1.0 / (h * h); n - 1];
    WittenPair {
        grid,
        minus: SymTridiag {
            diag: minus,
            off: off.clone(),
        },
        plus: SymTridiag { diag: plus, off },
        derivative_rule: rule,
    }
}

#[derive(Clone, Debug)]
pub struct SpectrumResult {
    pub method: SpectralMethod,
    pub grid: Grid,
    /// Sorted ascending, all inside `(−κ∞, κ∞)`.
    pub eigenvalues: Vec<f64>,
    pub eigenfunctions: Vec<GridSpinor>,
    pub residuals: Vec<f64>,
    pub boundary_amplitude: f64,
    pub zero_modes: usize,
    pub warnings: Vec<String>,
}

fn check_box(profile: &MassProfile, grid: Grid) -> Result<()> {
    let core = profile.core_half_width();
    let outer = profile.outer_extent() + if core.is_finite() { core } else { 0.0 };
    if grid.half_length() <= outer {
        return Err(Error::InvalidParameter(format!(
            "grid half-length {} does not contain the walls (outermost extent {outer})",
            grid.half_length()
        )));
    }
    Ok(())
}

/// Eigenpairs of the discrete Dirac operator with `|E| < κ∞`.
///
/// Both Witten Laplacians are diagonalized below `κ∞²`; the partner map
/// `B_r` restricted to the two low subspaces is then a small matrix whose
/// singular value decomposition yields the pairs `E = ±σ` and, from the
/// index, the exact kernel. `tol` bounds the returned residuals.
pub fn dirac_spectrum_in_gap(profile: &MassProfile, grid: Grid, tol: f64) -> Result<SpectrumResult> {
    check_box(profile, grid)?;
    let op = StaggeredDirac::new(profile, grid);
    let layout = op.layout();
    let k2 = profile.kappa_inf().powi(2);
    let cut = k2 - 10.0 * tol;
    let (top, bot) = (op.h_top(), op.h_bottom());
    let mut warnings = Vec::new();
    let excluded = top.count_below(k2) - top.count_below(cut) + bot.count_below(k2) - bot.count_below(cut);
    if excluded > 0 {
        warnings.push(format!(
            "{excluded} Witten eigenvalue(s) within 10·tol of κ∞² excluded as essential"
        ));
    }
    let low_top = top.eig_below(cut, EIG_TOL)?;
    let low_bot = bot.eig_below(cut, EIG_TOL)?;
    let (kt, kb) = (low_top.len(), low_bot.len());
    let k = kt.max(kb);
    let scale = 1.0 / grid.h().sqrt();
    let mut pairs: Vec<(f64, GridSpinor)> = Vec::new();
    let mut zero_modes = 0;
    if k > 0 {
        let mut c = DMatrix::<f64>::zeros(k, k);
        for (b, (_, v)) in low_bot.iter().enumerate() {
            let bv = op.br(v);
            for (a, (_, u)) in low_top.iter().enumerate() {
                c[(a, b)] = u.iter().zip(&bv).map(|(x, y)| x * y).sum();
            }
        }
        let svd = c.svd(true, true);
        let (uu, vt) = (svd.u.unwrap(), svd.v_t.unwrap());
        let mut order: Vec<usize> = (0..k).collect();
        order.sort_by(|&a, &b| svd.singular_values[a].total_cmp(&svd.singular_values[b]));
        let index = kb.abs_diff(kt);
        let combine = |low: &[(f64, Vec<f64>)], coef: &dyn Fn(usize) -> f64, len: usize| {
            let mut out = vec![0.0; len];
            for (m, (_, v)) in low.iter().enumerate() {
                let w = coef(m);
                for (o, x) in out.iter_mut().zip(v) {
                    *o += w * x;
                }
            }
            out
        };
        for (rank, &s) in order.iter().enumerate() {
            let sigma = svd.singular_values[s];
            let vb = combine(&low_bot, &|m| vt[(s, m)], layout.n_bot);
            let ut = combine(&low_top, &|m| uu[(m, s)], layout.n_top);
            if rank < index {
                if sigma > 1e-6 * profile.kappa_inf() {
                    warnings.push(format!(
                        "kernel candidate with singular value {sigma:e} dropped (partner cut at κ∞²)"
                    ));
                    continue;
                }
                let mut psi = GridSpinor::zeros(layout);
                if kb > kt {
                    psi.bottom = vb.iter().map(|&x| Complex64::new(x * scale, 0.0)).collect();
                } else {
                    psi.top = ut.iter().map(|&x| Complex64::new(x * scale, 0.0)).collect();
                }
                pairs.push((0.0, psi));
                zero_modes += 1;
                continue;
            }
            let s2 = std::f64::consts::FRAC_1_SQRT_2 * scale;
            for sign in [1.0, -1.0] {
                let psi = GridSpinor {
                    layout,
                    top: ut.iter().map(|&x| I * sign * x * s2).collect(),
                    bottom: vb.iter().map(|&x| Complex64::new(x * s2, 0.0)).collect(),
                };
                pairs.push((sign * sigma, psi));
            }
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut residuals = Vec::with_capacity(pairs.len());
    let mut boundary_amplitude: f64 = 0.0;
    for (e, psi) in &pairs {
        let r = op.residual(*e, psi);
        if !(r <= tol) {
            return Err(Error::ReconstructionFailure {
                residual: r,
                tolerance: tol,
            });
        }
        residuals.push(r);
        boundary_amplitude = boundary_amplitude.max(psi.boundary_amplitude());
    }
    if boundary_amplitude > TRUNCATION_LIMIT {
        return Err(Error::DomainTruncation {
            amplitude: boundary_amplitude,
            limit: TRUNCATION_LIMIT,
        });
    }
    let (eigenvalues, eigenfunctions) = pairs.into_iter().unzip();
    Ok(SpectrumResult {
        method: SpectralMethod::Witten,
        grid,
        eigenvalues,
        eigenfunctions,
        residuals,
        boundary_amplitude,
        zero_modes,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic_modes::zero_mode;

    fn mollifier() -> MassProfile {
        MassProfile::single(WallKind::Mollifier, 1.0).unwrap()
    }

    fn tanh() -> MassProfile {
        MassProfile::single(WallKind::Tanh, 1.0).unwrap()
    }

    #[test]
    fn free_pair_has_no_gap_states() {
        let g = Grid::new(10.0, 2001).unwrap();
        let pair = nodal_pair(g, |_| 1.0, |_| 0.0, DerivativeRule::Analytic);
        let lam = pair.minus.eig_low(1, 1e-15).unwrap()[0].0;
        assert!(lam >= 1.0 - 1e-12 && lam < 1.0 + 0.03);
        assert_eq!(pair.plus.count_below(1.0), 0);
    }

    #[test]
    fn tanh_pair_hosts_sech_squared_zero() {
        let g = Grid::new(20.0, 4001).unwrap();
        let pair = build_witten_pair(&tanh(), g).unwrap();
        assert_eq!(pair.derivative_rule, DerivativeRule::Analytic);
        // H₋ = −∂² + 1 − 2sech²
        let x = 0.7f64;
        let i = 2000 + 70;
        let h = g.h();
        let want = 2.0 / (h * h) + 1.0 - 2.0 / x.cosh().powi(2);
        assert!((pair.minus.diag[i - 1] - want).abs() < 1e-9);
        let lam = pair.minus.eig_low(1, 1e-15).unwrap()[0].0;
        assert!(lam.abs() < 1e-5, "{lam}");
        assert!(pair.plus.eig_low(1, 1e-15).unwrap()[0].0 > 0.99);
    }

    #[test]
    fn pairs_nonnegative_at_fine_spacing() {
        let g = Grid::with_spacing(25.0, 0.01).unwrap();
        let h = g.h();
        for p in [mollifier(), tanh(), mollifier().glue(2, 3.0).unwrap(), mollifier().glue(3, 3.0).unwrap()] {
            // the factorized operators are Gram matrices
            let op = StaggeredDirac::new(&p, g);
            for t in [op.h_bottom(), op.h_top()] {
                assert!(t.eig_low(1, 1e-15).unwrap()[0].0 >= -1e-8);
            }
            // the nodal pair only up to its O(h²) consistency error
            let pair = build_witten_pair(&p, g).unwrap();
            for t in [&pair.minus, &pair.plus] {
                assert!(t.eig_low(1, 1e-15).unwrap()[0].0 >= -0.5 * h * h);
            }
        }
        let sgn = MassProfile::single(WallKind::Sgn, 1.0).unwrap();
        assert!(build_witten_pair(&sgn, g).is_err());
    }

    #[test]
    fn staggered_factors_are_consistent() {
        let p = mollifier().glue(3, 2.0).unwrap();
        let g = Grid::new(12.0, 241).unwrap();
        let op = StaggeredDirac::new(&p, g);
        let l = op.layout();
        assert_eq!(l.n_top() + 1, l.n_bot());
        let v: Vec<f64> = (0..l.n_bot()).map(|j| (j as f64 * 0.37).sin()).collect();
        let u: Vec<f64> = (0..l.n_top()).map(|j| (j as f64 * 0.21).cos()).collect();
        let (bu, bv) = (op.brt(&u), op.br(&v));
        let lhs: f64 = u.iter().zip(&bv).map(|(a, b)| a * b).sum();
        let rhs: f64 = v.iter().zip(&bu).map(|(a, b)| a * b).sum();
        assert!((lhs - rhs).abs() < 1e-9 * lhs.abs().max(1.0));
        let mut hv = vec![0.0; l.n_bot()];
        op.h_bottom().matvec(&v, &mut hv);
        let want = op.brt(&bv);
        for (a, b) in hv.iter().zip(&want) {
            assert!((a - b).abs() < 1e-9 * b.abs().max(1.0));
        }
        let mut hu = vec![0.0; l.n_top()];
        op.h_top().matvec(&u, &mut hu);
        let want = op.br(&bu);
        for (a, b) in hu.iter().zip(&want) {
            assert!((a - b).abs() < 1e-9 * b.abs().max(1.0));
        }
    }

    #[test]
    fn tanh_single_wall_spectrum() {
        let p = tanh();
        let g = Grid::new(20.0, 4001).unwrap();
        let s = dirac_spectrum_in_gap(&p, g, 1e-8).unwrap();
        assert_eq!(s.eigenvalues.len(), 1);
        assert_eq!(s.zero_modes, 1);
        assert!(s.eigenvalues[0].abs() <= 1e-6);
        let want = GridSpinor::sample(s.eigenfunctions[0].layout(), |x| {
            let v = 0.5 / x.cosh();
            [Complex64::new(v, 0.0), Complex64::new(0.0, v)]
        });
        let d = aligned_distance(&s.eigenfunctions[0], &want);
        assert!(d <= 1e-4, "{d}");
        assert!((s.eigenfunctions[0].norm() - 1.0).abs() < 1e-12);
        // nodal values in the original basis: α₂ = iα₁ for this mode
        let nodes = s.eigenfunctions[0].to_nodes();
        let (x, a) = nodes[2000];
        assert_eq!(x, 0.0);
        assert!((a[1] - I * a[0]).norm() < 1e-3 * a[0].norm());
    }

    #[test]
    fn two_mollifier_walls_split() {
        let base = mollifier();
        let delta = 5.0;
        let p = base.glue(2, delta).unwrap();
        let g = Grid::with_spacing(delta + 20.0, 0.01).unwrap();
        let s = dirac_spectrum_in_gap(&p, g, 1e-8).unwrap();
        assert_eq!(s.eigenvalues.len(), 2);
        assert_eq!(s.zero_modes, 0);
        let (lo, hi) = (s.eigenvalues[0], s.eigenvalues[1]);
        assert!((lo + hi).abs() < 2e-8);
        let gamma = zero_mode(&base).unwrap().gamma();
        let a = 2.0 * gamma * gamma * (-2.0 * base.antiderivative().eval(delta)).exp();
        assert!((hi - a).abs() < 1e-3 * a, "{hi} vs {a}");
    }

    #[test]
    fn three_walls_keep_exact_zero() {
        let p = mollifier().glue(3, 3.0).unwrap();
        let g = Grid::with_spacing(3.0 * 2.0 + 20.0, 0.01).unwrap();
        let s = dirac_spectrum_in_gap(&p, g, 1e-8).unwrap();
        assert_eq!(s.eigenvalues.len(), 3);
        assert_eq!(s.zero_modes, 1);
        assert_eq!(s.eigenvalues[1], 0.0);
        assert!((s.eigenvalues[2] - 0.004_065_935_575_596_999_4).abs() < 1e-6);
        assert!((s.eigenvalues[0] + s.eigenvalues[2]).abs() < 2e-8);
    }

    #[test]
    fn sgn_walls_are_supported() {
        let p = MassProfile::single(WallKind::Sgn, 1.0).unwrap().glue(2, 3.0).unwrap();
        let g = Grid::with_spacing(25.0, 0.01).unwrap();
        let s = dirac_spectrum_in_gap(&p, g, 1e-8).unwrap();
        assert_eq!(s.eigenvalues.len(), 2);
    }

    #[test]
    fn small_box_is_flagged() {
        let p = mollifier().glue(2, 3.0).unwrap();
        let g = Grid::with_spacing(7.0, 0.01).unwrap();
        assert!(matches!(
            dirac_spectrum_in_gap(&p, g, 1e-8),
            Err(Error::DomainTruncation { .. })
        ));
        let g = Grid::with_spacing(3.5, 0.01).unwrap();
        assert!(matches!(
            dirac_spectrum_in_gap(&p, g, 1e-8),
            Err(Error::InvalidParameter(_))
        ));
    }
}

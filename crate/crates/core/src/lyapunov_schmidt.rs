//! Reduction of the gap eigenvalue problem to the span of the shifted zero
//! modes.
//!
//! With the ansatz `ψ = Σ bʲ α⋆^j + η`, `η ⊥ α⋆^j`, the eigenvalue equation
//! splits into `η = −Σ bʲ (P(𝒟 − E)P)⁻¹ P𝒟α⋆^j` and the `n × n` system
//! `M(δ, E) b = 0` with
//!
//! `M = A − E·G − R(E)`, `A_ij = ⟨α⋆^i, 𝒟α⋆^j⟩`, `G_ij = ⟨α⋆^i, α⋆^j⟩`,
//! `R_ij(E) = ⟨P𝒟α⋆^i, (P(𝒟 − E)P)⁻¹ P𝒟α⋆^j⟩`.
//!
//! `E` is a gap eigenvalue exactly when `det M(δ, E) = 0`. To leading order
//! `M ≈ M₀ − E` with `M₀` tridiagonal, off-diagonal `∓2iγ²e^{−2K(δ)}`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic_modes::{gram, interaction_matrix, shifted_modes, shifted_modes_at, ModeCombination};
use crate::error::{Error, Result};
use crate::mass_profiles::MassProfile;
use crate::spectral_solver::shooting::illinois;
use crate::spectral_solver::{Grid, GridSpinor, Layout, ProjectedResolvent};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

fn cmat(rows: &[Vec<Complex64>]) -> DMatrix<Complex64> {
    let n = rows.len();
    DMatrix::from_fn(n, n, |i, j| rows[i][j])
}

/// Normalization constant and exponent `K` of the rising prototype wall.
fn prototype(base: &MassProfile) -> Result<(f64, MassProfile)> {
    let rising = base.glue_at_centers(&[0.0])?;
    let mode = shifted_modes_at(base, &[0.0])?.remove(0);
    Ok((mode.gamma(), rising))
}

/// `a = 2γ²e^{−2K(δ)}`, the nearest-neighbour coupling.
pub fn leading_coupling(delta: f64, base: &MassProfile) -> Result<f64> {
    if !(delta > 1.0) {
        return Err(Error::InvalidParameter(format!("half spacing must exceed 1, got {delta}")));
    }
    let (gamma, rising) = prototype(base)?;
    Ok(2.0 * gamma * gamma * (-2.0 * rising.antiderivative().eval(delta)).exp())
}

/// `M₀(δ)`: zero diagonal, super-diagonal `−ia`, sub-diagonal `+ia`.
pub fn leading_matrix(n: usize, delta: f64, base: &MassProfile) -> Result<DMatrix<Complex64>> {
    let a = leading_coupling(delta, base)?;
    Ok(DMatrix::from_fn(n, n, |i, j| {
        if j == i + 1 {
            -I * a
        } else if i == j + 1 {
            I * a
        } else {
            Complex64::new(0.0, 0.0)
        }
    }))
}

#[derive(Clone, Debug)]
pub struct LeadingPairs {
    pub coupling: f64,
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Unit vectors with real positive first entry.
    pub eigenvectors: Vec<DVector<Complex64>>,
}

/// Closed-form eigenpairs of `M₀`. `M₀ = a·S J S⁻¹` with `S = diag(iʲ)` and
/// `J` the real tridiagonal matrix with unit off-diagonals, so the
/// eigenvalues are `2a cos(kπ/(n+1))` and the eigenvectors
/// `iʲ sin((j+1)kπ/(n+1))`.
pub fn leading_eigenpairs(n: usize, delta: f64, base: &MassProfile) -> Result<LeadingPairs> {
    let a = leading_coupling(delta, base)?;
    Ok(tridiagonal_pairs(n, a))
}

fn tridiagonal_pairs(n: usize, a: f64) -> LeadingPairs {
    let t = std::f64::consts::PI / (n + 1) as f64;
    let norm = (2.0 / (n + 1) as f64).sqrt();
    let (eigenvalues, eigenvectors) = (1..=n)
        .rev()
        .map(|k| {
            // mirror k ↔ n+1−k so the spectrum is exactly symmetric
            let lam = match (2 * k).cmp(&(n + 1)) {
                std::cmp::Ordering::Less => 2.0 * a * (k as f64 * t).cos(),
                std::cmp::Ordering::Equal => 0.0,
                std::cmp::Ordering::Greater => -2.0 * a * ((n + 1 - k) as f64 * t).cos(),
            };
            let v = DVector::from_fn(n, |j, _| {
                I.powu(j as u32) * (norm * ((j + 1) as f64 * k as f64 * t).sin())
            });
            (lam, v)
        })
        .unzip();
    LeadingPairs {
        coupling: a,
        eigenvalues,
        eigenvectors,
    }
}

/// Closed-form asymptotic eigenvalues, ascending.
///
/// Odd walls: `n = 2` gives `±2γ²e^{−2K(δ)}`, `n = 3` gives
/// `{0, ±2√2γ²e^{−2K(δ)}}`, other `n` the spectrum of `M₀`. Walls without
/// odd symmetry are supported for `n = 2` only, with `±2γ²e^{−K(δ)−K(−δ)}`.
pub fn asymptotic_eigenvalues(n: usize, delta: f64, base: &MassProfile, odd_kappa: bool) -> Result<Vec<f64>> {
    if odd_kappa {
        return Ok(leading_eigenpairs(n, delta, base)?.eigenvalues);
    }
    if n != 2 {
        return Err(Error::NotImplemented(format!(
            "asymptotic eigenvalues of {n} walls without odd symmetry"
        )));
    }
    if !(delta > 1.0) {
        return Err(Error::InvalidParameter(format!("half spacing must exceed 1, got {delta}")));
    }
    let (gamma, rising) = prototype(base)?;
    let k = rising.antiderivative();
    let e = 2.0 * gamma * gamma * (-k.eval(delta) - k.eval(-delta)).exp();
    Ok(vec![-e, e])
}

#[derive(Clone, Debug)]
pub struct ApproximateMode {
    pub energy: f64,
    pub coefficients: Vec<Complex64>,
    pub mode: ModeCombination,
}

/// `Σ bʲ α⋆^j` for each eigenvector `b` of `M₀`, in ascending energy order.
pub fn approximate_eigenfunctions(n: usize, delta: f64, base: &MassProfile) -> Result<Vec<ApproximateMode>> {
    let pairs = leading_eigenpairs(n, delta, base)?;
    let modes = shifted_modes(base, n, delta)?;
    Ok(pairs
        .eigenvalues
        .iter()
        .zip(&pairs.eigenvectors)
        .map(|(&energy, v)| {
            let coefficients: Vec<Complex64> = v.iter().copied().collect();
            ApproximateMode {
                energy,
                coefficients: coefficients.clone(),
                mode: ModeCombination {
                    coefficients,
                    modes: modes.clone(),
                },
            }
        })
        .collect())
}

/// Numerical settings of the reduced problem.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReducedOptions {
    /// Grid spacing of the resolvent solves.
    pub spacing: f64,
    /// Box margin beyond the outermost wall, in units of `1/κ∞`.
    pub margin: f64,
    /// Gap window `K`: `M` is evaluated for `|E| ≤ K`.
    pub window: f64,
    /// Relative residual of each resolvent solve.
    pub tol: f64,
}

impl Default for ReducedOptions {
    fn default() -> Self {
        ReducedOptions {
            spacing: 0.01,
            margin: 20.0,
            window: 0.9,
            tol: 1e-12,
        }
    }
}

/// `M(δ, E)` at one energy, with its parts.
#[derive(Clone, Debug)]
pub struct ReducedMatrix {
    pub n: usize,
    pub delta: f64,
    pub energy: f64,
    pub window: f64,
    pub interaction: DMatrix<Complex64>,
    pub gram: DMatrix<Complex64>,
    /// Hermitian part of the computed resolvent term.
    pub correction: DMatrix<Complex64>,
    /// `max |R_ij − conj(R_ji)|` before symmetrization.
    pub hermiticity_defect: f64,
}

impl ReducedMatrix {
    pub fn full(&self) -> DMatrix<Complex64> {
        &self.interaction - &self.gram * Complex64::new(self.energy, 0.0) - &self.correction
    }

    pub fn det(&self) -> Complex64 {
        self.full().lu().determinant()
    }

    /// `‖M(δ, E) − (M₀ − E·I)‖_max`.
    pub fn leading_deviation(&self, m0: &DMatrix<Complex64>) -> f64 {
        let shifted = m0 - DMatrix::<Complex64>::identity(self.n, self.n) * Complex64::new(self.energy, 0.0);
        (self.full() - shifted).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// Everything about `M(δ, ·)` that does not depend on `E`.
#[derive(Clone, Debug)]
pub struct ReducedProblem {
    n: usize,
    delta: f64,
    glued: MassProfile,
    options: ReducedOptions,
    interaction: DMatrix<Complex64>,
    gram: DMatrix<Complex64>,
    leading: DMatrix<Complex64>,
    coupling: f64,
    sampled: Vec<GridSpinor>,
    /// `𝒟α⋆^j` sampled from the closed form.
    applied: Vec<GridSpinor>,
    /// `P𝒟α⋆^j`
    projected: Vec<GridSpinor>,
    resolvent: ProjectedResolvent,
}

impl ReducedProblem {
    pub fn new(base: &MassProfile, n: usize, delta: f64, options: ReducedOptions) -> Result<Self> {
        let k_inf = base.kappa_inf();
        if !(options.window > 0.0 && options.window < k_inf) {
            return Err(Error::InvalidWindow {
                lo: -options.window,
                hi: options.window,
                kappa_inf: k_inf,
            });
        }
        if n == 0 {
            return Err(Error::InvalidParameter("at least one wall is needed".into()));
        }
        let glued = base.glue(n, delta)?;
        let modes = shifted_modes(base, n, delta)?;
        let interaction = cmat(&interaction_matrix(&modes, &glued)?);
        let gram = cmat(&gram(&modes)?);
        let leading = if n > 1 {
            leading_matrix(n, delta, base)?
        } else {
            DMatrix::zeros(1, 1)
        };
        let coupling = if n > 1 { leading_coupling(delta, base)? } else { 0.0 };
        let core = glued.core_half_width();
        let half = glued.outer_extent() + if core.is_finite() { core } else { 0.0 } + options.margin / k_inf;
        let grid = Grid::with_spacing(half, options.spacing)?;
        let layout = Layout::new(grid, &glued);
        let sampled: Vec<GridSpinor> = modes.iter().map(|m| GridSpinor::sample(layout, |x| m.eval(x))).collect();
        let applied: Vec<GridSpinor> = modes
            .iter()
            .map(|m| GridSpinor::sample(layout, |x| m.apply_dirac(&glued, x)))
            .collect();
        let resolvent = ProjectedResolvent::new(&glued, grid, &sampled, options.tol)?;
        let projected = applied
            .iter()
            .map(|u| {
                let mut u = u.clone();
                resolvent.project(&mut u);
                u
            })
            .collect();
        Ok(ReducedProblem {
            n,
            delta,
            glued,
            options,
            interaction,
            gram,
            leading,
            coupling,
            sampled,
            applied,
            projected,
            resolvent,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn window(&self) -> f64 {
        self.options.window
    }

    pub fn profile(&self) -> &MassProfile {
        &self.glued
    }

    pub fn grid(&self) -> Grid {
        self.resolvent.layout().grid()
    }

    pub fn interaction(&self) -> &DMatrix<Complex64> {
        &self.interaction
    }

    pub fn gram(&self) -> &DMatrix<Complex64> {
        &self.gram
    }

    /// `M₀(δ)`.
    pub fn leading(&self) -> &DMatrix<Complex64> {
        &self.leading
    }

    /// `a = 2γ²e^{−2K(δ)}`.
    pub fn coupling(&self) -> f64 {
        self.coupling
    }

    /// The grid-sampled shifted zero modes.
    pub fn sampled_modes(&self) -> &[GridSpinor] {
        &self.sampled
    }

    fn check_energy(&self, energy: f64) -> Result<()> {
        let k = self.options.window;
        if !(energy.abs() <= k) {
            return Err(Error::InvalidWindow {
                lo: -k,
                hi: k,
                kappa_inf: self.glued.kappa_inf(),
            });
        }
        Ok(())
    }

    /// `ψ_j = (P(𝒟 − E)P)⁻¹ P𝒟α⋆^j` for every `j`.
    fn responses(&self, energy: f64) -> Result<Vec<GridSpinor>> {
        self.projected
            .par_iter()
            .map(|u| self.resolvent.solve(energy, u).map(|(psi, _)| psi))
            .collect()
    }

    pub fn matrix_at(&self, energy: f64) -> Result<ReducedMatrix> {
        self.check_energy(energy)?;
        let psi = self.responses(energy)?;
        let n = self.n;
        let raw = DMatrix::from_fn(n, n, |i, j| self.projected[i].inner(&psi[j]));
        let mut defect: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                defect = defect.max((raw[(i, j)] - raw[(j, i)].conj()).norm());
            }
        }
        let correction = (&raw + raw.adjoint()) * Complex64::new(0.5, 0.0);
        Ok(ReducedMatrix {
            n,
            delta: self.delta,
            energy,
            window: self.options.window,
            interaction: self.interaction.clone(),
            gram: self.gram.clone(),
            correction,
            hermiticity_defect: defect,
        })
    }

    /// `det M(δ, E)`, real for real `E`.
    pub fn det(&self, energy: f64) -> Result<f64> {
        Ok(self.matrix_at(energy)?.det().re)
    }

    /// `η = −Σ bʲ ψ_j` for the coefficient vector `b` at energy `E`.
    pub fn reconstruct_corrector(&self, b: &[Complex64], energy: f64) -> Result<Corrector> {
        if b.len() != self.n {
            return Err(Error::InvalidParameter(format!(
                "coefficient vector has length {}, expected {}",
                b.len(),
                self.n
            )));
        }
        self.check_energy(energy)?;
        let mut eta = GridSpinor::zeros(self.resolvent.layout());
        if b.iter().any(|c| c.norm() > 0.0) {
            for (bj, psi) in b.iter().zip(self.responses(energy)?) {
                eta.axpy(-bj, &psi);
            }
        }
        let orthogonality_defect = self
            .sampled
            .iter()
            .map(|a| a.inner(&eta).norm() / a.norm())
            .fold(0.0, f64::max);
        // (𝒟 − E) Σ bʲ α⋆^j from the closed forms
        let mut leading_residual = GridSpinor::zeros(self.resolvent.layout());
        for ((bj, u), a) in b.iter().zip(&self.applied).zip(&self.sampled) {
            leading_residual.axpy(*bj, u);
            leading_residual.axpy(-bj * energy, a);
        }
        let mut full = self.resolvent.operator().apply(&eta);
        full.axpy(Complex64::new(-energy, 0.0), &eta);
        full.axpy(Complex64::new(1.0, 0.0), &leading_residual);
        Ok(Corrector {
            coefficients: b.to_vec(),
            energy,
            norm: eta.norm(),
            eta,
            orthogonality_defect,
            residual_without: leading_residual.norm(),
            residual_with: full.norm(),
        })
    }

    /// Real roots of `det M(δ, ·)` in `[−K, K]`.
    pub fn det_roots(&self) -> Result<RootReport> {
        let k = self.options.window;
        let count = 2 * self.n * 10;
        let mut pts: Vec<f64> = (0..count)
            .map(|i| -k + 2.0 * k * i as f64 / (count - 1) as f64)
            .collect();
        if self.n > 1 {
            let lead = tridiagonal_pairs(self.n, self.coupling).eigenvalues;
            pts.extend(lead.windows(2).map(|w| 0.5 * (w[0] + w[1])));
        }
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        let vals = pts
            .par_iter()
            .map(|&e| self.det(e))
            .collect::<Result<Vec<f64>>>()?;
        let scale = k;
        let tol = 1e-12 * scale;
        let mut exact = Vec::new();
        let mut brackets = Vec::new();
        for i in 0..pts.len() {
            if vals[i] == 0.0 {
                exact.push(pts[i]);
            } else if i + 1 < pts.len() && vals[i + 1] != 0.0 && vals[i].signum() != vals[i + 1].signum() {
                brackets.push(i);
            }
        }
        let mut roots = brackets
            .par_iter()
            .map(|&i| illinois(|e| self.det(e), pts[i], pts[i + 1], vals[i], vals[i + 1], tol))
            .collect::<Result<Vec<f64>>>()?;
        roots.extend(exact);
        roots.sort_by(f64::total_cmp);
        let mut warnings = Vec::new();
        let mut merged: Vec<f64> = Vec::with_capacity(roots.len());
        for r in roots {
            match merged.last() {
                Some(&last) if (r - last).abs() < 1e-12 => {
                    warnings.push(format!("roots {last:e} and {r:e} merged; gap eigenvalues should be simple"));
                }
                _ => merged.push(r),
            }
        }
        for &r in &merged {
            if k - r.abs() <= tol {
                warnings.push(format!("root {r:e} lies on the window boundary"));
            }
        }
        Ok(RootReport {
            roots: merged,
            scan_points: pts.len(),
            warnings,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RootReport {
    pub roots: Vec<f64>,
    pub scan_points: usize,
    pub warnings: Vec<String>,
}

/// The corrector `η` with its diagnostics.
#[derive(Clone, Debug)]
pub struct Corrector {
    pub coefficients: Vec<Complex64>,
    pub energy: f64,
    pub eta: GridSpinor,
    pub norm: f64,
    /// `max_j |⟨α⋆^j, η⟩| / ‖α⋆^j‖` on the grid.
    pub orthogonality_defect: f64,
    /// `‖(𝒟 − E) Σ bʲ α⋆^j‖`
    pub residual_without: f64,
    /// `‖(𝒟 − E)(Σ bʲ α⋆^j + η)‖`
    pub residual_with: f64,
}

/// `M(δ, E)` for `base.glue(n, δ)` at one energy.
pub fn assemble_full_matrix(
    n: usize,
    delta: f64,
    base: &MassProfile,
    options: ReducedOptions,
    energy: f64,
) -> Result<ReducedMatrix> {
    ReducedProblem::new(base, n, delta, options)?.matrix_at(energy)
}

pub fn det_roots(problem: &ReducedProblem) -> Result<RootReport> {
    problem.det_roots()
}

pub fn reconstruct_corrector(problem: &ReducedProblem, b: &[Complex64], energy: f64) -> Result<Corrector> {
    problem.reconstruct_corrector(b, energy)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic_modes::zero_mode;
    use crate::mass_profiles::{mollifier_deficit, WallKind};
    use crate::spectral_solver::shooting_oracle;
    use nalgebra::SymmetricEigen;

    fn mollifier() -> MassProfile {
        MassProfile::single(WallKind::Mollifier, 1.0).unwrap()
    }

    fn tanh() -> MassProfile {
        MassProfile::single(WallKind::Tanh, 1.0).unwrap()
    }

    #[test]
    fn two_wall_leading_matrix() {
        let base = mollifier();
        let m = leading_matrix(2, 3.0, &base).unwrap();
        let gamma = zero_mode(&base).unwrap().gamma();
        let a = 2.0 * gamma * gamma * (-2.0 * (3.0 - mollifier_deficit())).exp();
        assert!((m[(0, 1)] - (-I * a)).norm() < 1e-14);
        assert!((m[(1, 0)] - I * a).norm() < 1e-14);
        assert_eq!(m[(0, 0)], Complex64::new(0.0, 0.0));
        let m3 = leading_matrix(3, 3.0, &base).unwrap();
        assert_eq!(m3[(0, 2)], Complex64::new(0.0, 0.0));
        assert!((m3[(2, 1)] - I * a).norm() < 1e-14);
    }

    #[test]
    fn coupling_vanishes_for_distant_walls() {
        let m = leading_matrix(3, 400.0, &mollifier()).unwrap();
        assert!(m.iter().all(|z| *z == Complex64::new(0.0, 0.0)));
    }

    #[test]
    fn closed_form_eigenpairs() {
        let base = mollifier();
        let p = leading_eigenpairs(2, 3.0, &base).unwrap();
        let a = p.coupling;
        assert!((p.eigenvalues[0] + a).abs() < 1e-15 && (p.eigenvalues[1] - a).abs() < 1e-15);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((p.eigenvectors[1][0] - Complex64::new(s, 0.0)).norm() < 1e-15);
        assert!((p.eigenvectors[1][1] - I * s).norm() < 1e-15);
        assert!((p.eigenvectors[0][1] + I * s).norm() < 1e-15);
        let p = leading_eigenpairs(3, 3.0, &base).unwrap();
        let r2 = 2f64.sqrt();
        assert!((p.eigenvalues[0] + r2 * a).abs() < 1e-15);
        assert!(p.eigenvalues[1].abs() < 1e-15);
        assert!((p.eigenvalues[2] - r2 * a).abs() < 1e-15);
        let want = [Complex64::new(0.5, 0.0), I * (r2 / 2.0), Complex64::new(-0.5, 0.0)];
        for (got, w) in p.eigenvectors[2].iter().zip(want) {
            assert!((got - w).norm() < 1e-15);
        }
    }

    #[test]
    fn eigenpairs_match_dense_oracle() {
        let base = mollifier();
        for n in 1..=8 {
            let m = leading_matrix(n, 2.0, &base).unwrap();
            let p = leading_eigenpairs(n, 2.0, &base).unwrap();
            let mut want: Vec<f64> = SymmetricEigen::new(m.clone()).eigenvalues.iter().copied().collect();
            want.sort_by(f64::total_cmp);
            for (k, (g, w)) in p.eigenvalues.iter().zip(&want).enumerate() {
                assert!((g - w).abs() < 1e-12 * p.coupling, "n={n} k={k}");
                let v = &p.eigenvectors[k];
                let r = &m * v - v * Complex64::new(*g, 0.0);
                assert!(r.norm() < 1e-14 * p.coupling.max(1e-300) + 1e-300);
                assert!((v.norm() - 1.0).abs() < 1e-14);
            }
        }
        let p = leading_eigenpairs(5, 2.0, &base).unwrap();
        for (k, e) in (1..=5).rev().zip(&p.eigenvalues) {
            let want = 2.0 * p.coupling * (k as f64 * std::f64::consts::PI / 6.0).cos();
            assert!((e - want).abs() < 1e-15);
        }
    }

    #[test]
    fn asymptotic_formulas() {
        let e = asymptotic_eigenvalues(2, 2.0, &tanh(), true).unwrap();
        assert!((e[1] - 0.035_325_6).abs() < 5e-7, "{}", e[1]);
        assert!((e[1] - 0.5 / 2f64.cosh().powi(2)).abs() < 1e-12);
        let base = mollifier();
        let gamma = zero_mode(&base).unwrap().gamma();
        for delta in [3.0, 4.5] {
            let e = asymptotic_eigenvalues(2, delta, &base, true).unwrap();
            let want = 2.0 * gamma * gamma * (2.0 * mollifier_deficit()).exp() * (-2.0 * delta).exp();
            assert!((e[1] - want).abs() < 1e-13 * want);
            assert_eq!(e[0], -e[1]);
        }
        let e = asymptotic_eigenvalues(3, 9.0, &base, true).unwrap();
        assert_eq!(e[1], 0.0);
        // an odd wall gives the same value through the general formula
        let odd = asymptotic_eigenvalues(2, 3.0, &base, false).unwrap();
        let e = asymptotic_eigenvalues(2, 3.0, &base, true).unwrap();
        assert!((odd[1] - e[1]).abs() < 1e-12 * e[1]);
        assert!(matches!(asymptotic_eigenvalues(3, 3.0, &base, false), Err(Error::NotImplemented(_))));
        assert!(asymptotic_eigenvalues(2, 0.5, &base, true).is_err());
    }

    #[test]
    fn approximate_modes() {
        let base = mollifier();
        let m = approximate_eigenfunctions(2, 3.0, &base).unwrap();
        assert!(m[1].energy > 0.0);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((m[1].coefficients[1] - I * s).norm() < 1e-15);
        for delta in [3.0, 5.0] {
            let m = approximate_eigenfunctions(2, delta, &base).unwrap();
            let n = m[1].mode.norm().unwrap();
            assert!((n - 1.0).abs() < 1e-12);
        }
        let m = approximate_eigenfunctions(3, 3.0, &base).unwrap();
        assert!((m[2].coefficients[1] - I * (2f64.sqrt() / 2.0)).norm() < 1e-15);
    }

    fn problem(n: usize, delta: f64) -> ReducedProblem {
        let opts = ReducedOptions {
            spacing: 0.02,
            ..ReducedOptions::default()
        };
        ReducedProblem::new(&mollifier(), n, delta, opts).unwrap()
    }

    #[test]
    fn reduced_matrix_structure() {
        let p = problem(2, 5.0);
        let a = p.coupling();
        assert!(p.interaction()[(0, 0)].norm() < 1e-10 * a);
        assert!((p.interaction()[(1, 0)] - I * a).norm() < 1e-8 * a);
        assert!((p.gram() - DMatrix::<Complex64>::identity(2, 2)).iter().all(|z| z.norm() < 1e-10));
        let m = p.matrix_at(0.0).unwrap();
        assert!(m.hermiticity_defect < 1e-10 * a);
        let r = m.correction.iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(r <= 10.0 * (-20.0f64).exp(), "{r:e}");
        let d = m.det();
        assert!(d.im.abs() <= 1e-10 * d.norm());
        assert!((m.leading_deviation(p.leading()) - r).abs() < 1e-8 * a);
    }

    #[test]
    fn det_roots_match_shooting() {
        for (n, delta) in [(2usize, 3.0), (3, 3.0)] {
            let p = problem(n, delta);
            let report = p.det_roots().unwrap();
            assert_eq!(report.roots.len(), n, "{report:?}");
            assert!(report.warnings.is_empty(), "{report:?}");
            let direct = shooting_oracle(p.profile(), (-0.9, 0.9), 1e-14).unwrap();
            for (r, d) in report.roots.iter().zip(&direct) {
                assert!((r - d).abs() < 1e-6, "{r} vs {d}");
            }
            assert!((report.roots[0] + report.roots[n - 1]).abs() < 1e-10);
            if n == 3 {
                assert!(report.roots[1].abs() < 1e-10);
            }
        }
    }

    #[test]
    fn corrector_improves_residual() {
        let p = problem(2, 4.0);
        let roots = p.det_roots().unwrap().roots;
        let e = roots[1];
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let b = [Complex64::new(s, 0.0), I * s];
        let c = p.reconstruct_corrector(&b, e).unwrap();
        assert!(c.orthogonality_defect < 1e-10);
        assert!(c.norm <= (-8.0f64).exp(), "{}", c.norm);
        assert!(c.residual_with < c.residual_without);
        let zero = p.reconstruct_corrector(&[Complex64::new(0.0, 0.0); 2], e).unwrap();
        assert_eq!(zero.norm, 0.0);
        assert!(p.reconstruct_corrector(&b[..1], e).is_err());
        assert!(matches!(p.matrix_at(0.95), Err(Error::InvalidWindow { .. })));
    }
}

//! JSON reports of the `spectrum`, `reduce` and `asymptotics` verbs.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use crate::error::{Error, Result};
use crate::lyapunov_schmidt::{approximate_eigenfunctions, asymptotic_eigenvalues, leading_coupling, ReducedProblem};
use crate::mass_profiles::MassProfile;
use crate::spectral_solver::{
    dirac_spectrum_in_gap, matching_angle, shooting_eigenfunction, shooting_oracle, ShootingOptions, SpectralMethod,
};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub delta: Option<f64>,
    pub n: usize,
    pub method: SpectralMethod,
    /// Half-length of the box, or of the shooting interval.
    #[serde(rename = "L")]
    pub half_length: f64,
    /// Grid or integration mesh points.
    #[serde(rename = "N")]
    pub points: usize,
    pub gap_eigenvalues: Vec<f64>,
    /// Grid residual `‖(𝒟 − E)ψ‖` for the direct method; matching-angle
    /// defect `dist(Δ(E), πℤ)` for shooting.
    pub residuals: Vec<f64>,
    pub boundary_amplitude: f64,
    pub warnings: Vec<String>,
}

pub fn spectrum_report(config: &ExperimentConfig, delta: Option<f64>, profile: &MassProfile) -> Result<SpectrumReport> {
    let n = profile.n_walls();
    match config.method {
        SpectralMethod::Witten => {
            let grid = config.grid_for(profile)?;
            let r = dirac_spectrum_in_gap(profile, grid, config.tolerances.eigen)?;
            Ok(SpectrumReport {
                delta,
                n,
                method: r.method,
                half_length: grid.half_length(),
                points: grid.points(),
                gap_eigenvalues: r.eigenvalues,
                residuals: r.residuals,
                boundary_amplitude: r.boundary_amplitude,
                warnings: r.warnings,
            })
        }
        SpectralMethod::Shooting => {
            let k = config.window;
            let opts = ShootingOptions::default();
            let values = shooting_oracle(profile, (-k, k), config.tolerances.shooting)?;
            let pi = std::f64::consts::PI;
            let mut residuals = Vec::with_capacity(values.len());
            let mut boundary: f64 = 0.0;
            let mut extent = (0.0, 0);
            for &e in &values {
                let d = matching_angle(profile, e, &opts)?;
                residuals.push((d - (d / pi).round() * pi).abs());
                let m = shooting_eigenfunction(profile, e, &opts)?;
                let ends = [m.values[0], *m.values.last().unwrap()];
                for v in ends {
                    boundary = boundary.max((v[0].norm_sqr() + v[1].norm_sqr()).sqrt());
                }
                extent = (m.xs.last().unwrap().abs().max(m.xs[0].abs()), m.xs.len());
            }
            Ok(SpectrumReport {
                delta,
                n,
                method: SpectralMethod::Shooting,
                half_length: extent.0,
                points: extent.1,
                gap_eigenvalues: values,
                residuals,
                boundary_amplitude: boundary,
                warnings: Vec::new(),
            })
        }
    }
}

pub fn spectrum_reports(config: &ExperimentConfig) -> Result<Vec<SpectrumReport>> {
    config
        .profiles()?
        .iter()
        .map(|(d, p)| spectrum_report(config, *d, p))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReduceReport {
    pub n: usize,
    pub delta: f64,
    pub a: f64,
    pub leading_eigenvalues: Vec<f64>,
    pub det_roots: Vec<f64>,
    /// Largest `‖η‖` over the roots, with `b` the unit null vector of `M`.
    pub correction_norm: f64,
    /// `|root_k − E_k|` against the direct solver, in ascending order.
    pub agreement_with_direct: Vec<f64>,
    pub warnings: Vec<String>,
}

fn null_vector(m: nalgebra::DMatrix<Complex64>) -> Vec<Complex64> {
    let svd = m.svd(false, true);
    let v_t = svd.v_t.expect("requested right singular vectors");
    let k = svd.singular_values.imin();
    v_t.row(k).iter().map(|z| z.conj()).collect()
}

pub fn reduce_report(config: &ExperimentConfig, delta: f64) -> Result<ReduceReport> {
    let base = config.base_profile()?;
    let n = config.profile.n;
    let problem = ReducedProblem::new(&base, n, delta, config.reduced_options())?;
    let roots = problem.det_roots()?;
    let mut correction_norm: f64 = 0.0;
    for &r in &roots.roots {
        let b = null_vector(problem.matrix_at(r)?.full());
        correction_norm = correction_norm.max(problem.reconstruct_corrector(&b, r)?.norm);
    }
    let profile = problem.profile();
    let direct = dirac_spectrum_in_gap(profile, config.grid_for(profile)?, config.tolerances.eigen)?;
    let inside: Vec<f64> = direct
        .eigenvalues
        .iter()
        .copied()
        .filter(|e| e.abs() <= config.window)
        .collect();
    let mut warnings = roots.warnings.clone();
    if inside.len() != roots.roots.len() {
        warnings.push(format!(
            "{} determinant roots but {} direct eigenvalues in the window",
            roots.roots.len(),
            inside.len()
        ));
    }
    Ok(ReduceReport {
        n,
        delta,
        a: problem.coupling(),
        leading_eigenvalues: crate::lyapunov_schmidt::leading_eigenpairs(n, delta, &base)?.eigenvalues,
        agreement_with_direct: roots.roots.iter().zip(&inside).map(|(r, e)| (r - e).abs()).collect(),
        det_roots: roots.roots,
        correction_norm,
        warnings,
    })
}

pub fn reduce_reports(config: &ExperimentConfig) -> Result<Vec<ReduceReport>> {
    if config.profile.n < 2 || config.profile.centers.is_some() {
        return Err(Error::Config(
            "reduce needs n ≥ 2 equally spaced walls given by profile.deltas".into(),
        ));
    }
    config.profile.deltas.iter().map(|&d| reduce_report(config, d)).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticsReport {
    pub n: usize,
    pub delta: f64,
    pub a: f64,
    pub odd: bool,
    pub eigenvalues: Vec<f64>,
    /// Coefficient vectors `b` of the approximate eigenfunctions, as `[re, im]`.
    pub coefficients: Vec<Vec<[f64; 2]>>,
}

pub fn asymptotics_reports(config: &ExperimentConfig) -> Result<Vec<AsymptoticsReport>> {
    let base = config.base_profile()?;
    let n = config.profile.n;
    if n < 2 {
        return Err(Error::Config("asymptotics needs n ≥ 2".into()));
    }
    let odd = base.is_odd_shape();
    config
        .profile
        .deltas
        .iter()
        .map(|&delta| {
            let approx = approximate_eigenfunctions(n, delta, &base)?;
            Ok(AsymptoticsReport {
                n,
                delta,
                a: leading_coupling(delta, &base)?,
                odd,
                eigenvalues: asymptotic_eigenvalues(n, delta, &base, odd)?,
                coefficients: approx
                    .iter()
                    .map(|m| m.coefficients.iter().map(|z| [z.re, z.im]).collect())
                    .collect(),
            })
        })
        .collect()
}

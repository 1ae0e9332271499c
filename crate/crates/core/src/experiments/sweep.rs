//! Parameter sweeps over the half spacing δ and the versioned CSV table.

use std::io::{BufRead, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use crate::analytic_modes::{exact_zero_mode, residual_norm, shifted_modes, zero_mode, Spinor};
use crate::error::{Error, Result};
use crate::lyapunov_schmidt::{approximate_eigenfunctions, asymptotic_eigenvalues, leading_coupling, ReducedProblem};
use crate::mass_profiles::MassProfile;
use crate::spectral_solver::{
    aligned_distance, dirac_spectrum_in_gap, shooting_eigenfunction, shooting_oracle, GridSpinor, ShootingOptions,
};

pub const SWEEP_HEADER: &str = "# dirac-walls sweep v1";

/// Disagreement between the two direct methods above which a row is flagged.
pub const METHOD_GAP_LIMIT: f64 = 1e-6;

/// One row of the sweep table. Energies are the gap eigenvalues with
/// `|E| ≤ K`: `e_minus` the lowest, `e_plus` the highest and, for an odd
/// wall count, `e_zero` the one closest to 0. Errors are measured on the
/// shooting eigenpairs unless the column says otherwise.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub delta: Option<f64>,
    pub n: usize,
    /// Leading coupling `a = 2γ²e^{−2K(δ)}`.
    pub a: Option<f64>,
    pub e_minus_witten: Option<f64>,
    pub e_zero_witten: Option<f64>,
    pub e_plus_witten: Option<f64>,
    pub e_minus_shooting: Option<f64>,
    pub e_zero_shooting: Option<f64>,
    pub e_plus_shooting: Option<f64>,
    pub e_minus_reduced: Option<f64>,
    pub e_zero_reduced: Option<f64>,
    pub e_plus_reduced: Option<f64>,
    pub e_minus_asymp: Option<f64>,
    pub e_zero_asymp: Option<f64>,
    pub e_plus_asymp: Option<f64>,
    /// All gap eigenvalues of the direct solver, window or not.
    pub count_witten: Option<usize>,
    pub count_shooting: Option<usize>,
    pub count_reduced: Option<usize>,
    /// `max_k |E_k − E_k^asymp|`
    pub eig_error: Option<f64>,
    pub eig_error_witten: Option<f64>,
    /// `max_k` L² distance (phase aligned) between the normalized eigenfunction
    /// and the normalized approximate combination.
    pub mode_error: Option<f64>,
    pub mode_error_witten: Option<f64>,
    /// Distance of the zero eigenfunction to the exact kernel element.
    pub zero_mode_error: Option<f64>,
    /// `max_k |E_k^witten − E_k^shooting|`
    pub method_gap: Option<f64>,
    /// `max_k |E_k^reduced − E_k^witten|`
    pub reduced_gap: Option<f64>,
    /// `max over E ∈ {0, ±a}` of `‖M(δ, E) − (M₀ − E)‖_max`.
    pub remainder: Option<f64>,
    /// `‖𝒟α⋆^R‖` for the rightmost shifted mode.
    pub residual_norm: Option<f64>,
    pub error: Option<String>,
}

impl SweepRow {
    pub fn is_flagged(&self) -> bool {
        self.error.is_some()
    }
}

fn split(values: &[f64], n: usize) -> (Option<f64>, Option<f64>, Option<f64>) {
    let zero = if n % 2 == 1 {
        values.iter().copied().min_by(|a, b| a.abs().total_cmp(&b.abs()))
    } else {
        None
    };
    if values.len() < 2 {
        return (None, zero, None);
    }
    (values.first().copied(), zero, values.last().copied())
}

fn max_gap(a: &[f64], b: &[f64]) -> Option<f64> {
    (a.len() == b.len() && !a.is_empty()).then(|| a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max))
}

fn normalized<F: Fn(f64) -> Spinor>(f: F, norm: f64) -> impl Fn(f64) -> Spinor {
    move |x| {
        let v = f(x);
        [v[0] / norm, v[1] / norm]
    }
}

/// Compute one row; the caller turns an error into a flagged row.
pub fn sweep_row(config: &ExperimentConfig, delta: Option<f64>, profile: &MassProfile) -> Result<SweepRow> {
    let base = config.base_profile()?;
    let n = profile.n_walls();
    let k = config.window;
    let mut row = SweepRow {
        delta,
        n,
        ..SweepRow::default()
    };
    let mut notes: Vec<String> = Vec::new();

    let grid = config.grid_for(profile)?;
    let direct = dirac_spectrum_in_gap(profile, grid, config.tolerances.eigen)?;
    row.count_witten = Some(direct.eigenvalues.len());
    let in_window: Vec<usize> = (0..direct.eigenvalues.len())
        .filter(|&i| direct.eigenvalues[i].abs() <= k)
        .collect();
    let witten: Vec<f64> = in_window.iter().map(|&i| direct.eigenvalues[i]).collect();
    (row.e_minus_witten, row.e_zero_witten, row.e_plus_witten) = split(&witten, n);

    let shooting = shooting_oracle(profile, (-k, k), config.tolerances.shooting)?;
    row.count_shooting = Some(shooting.len());
    (row.e_minus_shooting, row.e_zero_shooting, row.e_plus_shooting) = split(&shooting, n);
    row.method_gap = max_gap(&witten, &shooting);
    match row.method_gap {
        Some(g) if g <= METHOD_GAP_LIMIT => {}
        Some(g) => notes.push(format!("witten and shooting differ by {g:e}")),
        None => notes.push(format!(
            "witten finds {} and shooting {} eigenvalues in the window",
            witten.len(),
            shooting.len()
        )),
    }
    let opts = ShootingOptions::default();
    let shot_modes = shooting
        .iter()
        .map(|&e| shooting_eigenfunction(profile, e, &opts))
        .collect::<Result<Vec<_>>>()?;

    if n % 2 == 1 {
        let exact = if n == 1 { zero_mode(profile)? } else { exact_zero_mode(profile)?.mode };
        if let Some(m) = shot_modes.iter().min_by(|a, b| a.energy.abs().total_cmp(&b.energy.abs())) {
            row.zero_mode_error = Some(m.aligned_distance(|x| exact.eval(x)));
        }
    }

    if let Some(d) = delta.filter(|_| n >= 2) {
        row.a = Some(leading_coupling(d, &base)?);
        match asymptotic_eigenvalues(n, d, &base, base.is_odd_shape()) {
            Ok(asymp) => {
                (row.e_minus_asymp, row.e_zero_asymp, row.e_plus_asymp) = split(&asymp, n);
                row.eig_error = max_gap(&shooting, &asymp);
                row.eig_error_witten = max_gap(&witten, &asymp);
            }
            Err(Error::NotImplemented(msg)) => notes.push(msg),
            Err(e) => return Err(e),
        }
        let approx = approximate_eigenfunctions(n, d, &base)?;
        if approx.len() == shot_modes.len() {
            let mut worst: f64 = 0.0;
            for (m, ap) in shot_modes.iter().zip(&approx) {
                let nrm = ap.mode.norm()?;
                let f = normalized(|x| ap.mode.eval(x), nrm);
                worst = worst.max(m.aligned_distance(&f));
            }
            row.mode_error = Some(worst);
        }
        if approx.len() == in_window.len() {
            let mut worst: f64 = 0.0;
            for (&i, ap) in in_window.iter().zip(&approx) {
                let psi = &direct.eigenfunctions[i];
                let mut s = GridSpinor::sample(psi.layout(), |x| ap.mode.eval(x));
                s.scale((1.0 / s.norm()).into());
                worst = worst.max(aligned_distance(psi, &s));
            }
            row.mode_error_witten = Some(worst);
        }
        row.residual_norm = Some(residual_norm(profile, &shifted_modes(&base, n, d)?[0])?);

        let reduced = ReducedProblem::new(&base, n, d, config.reduced_options())?;
        let a = reduced.coupling();
        let mut remainder: f64 = 0.0;
        for e in [-a, 0.0, a] {
            remainder = remainder.max(reduced.matrix_at(e)?.leading_deviation(reduced.leading()));
        }
        row.remainder = Some(remainder);
        let roots = reduced.det_roots()?;
        notes.extend(roots.warnings.iter().cloned());
        row.count_reduced = Some(roots.roots.len());
        (row.e_minus_reduced, row.e_zero_reduced, row.e_plus_reduced) = split(&roots.roots, n);
        row.reduced_gap = max_gap(&roots.roots, &witten);
    }

    if !notes.is_empty() {
        row.error = Some(notes.join("; "));
    }
    Ok(row)
}

/// One row per profile of the configuration, computed on `config.jobs`
/// worker threads. A failing row carries its error instead of aborting.
pub fn run_sweep(config: &ExperimentConfig) -> Result<Vec<SweepRow>> {
    config.validate()?;
    let profiles = config.profiles()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.jobs)
        .build()
        .map_err(|e| Error::InvalidParameter(e.to_string()))?;
    Ok(pool.install(|| {
        profiles
            .par_iter()
            .map(|(delta, profile)| {
                sweep_row(config, *delta, profile).unwrap_or_else(|e| SweepRow {
                    delta: *delta,
                    n: profile.n_walls(),
                    error: Some(e.to_string()),
                    ..SweepRow::default()
                })
            })
            .collect()
    }))
}

pub fn write_sweep<W: Write>(mut out: W, rows: &[SweepRow]) -> Result<()> {
    writeln!(out, "{SWEEP_HEADER}")?;
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(sweep_columns())
        .map_err(|e| Error::Io(e.into()))?;
    for r in rows {
        w.serialize(r).map_err(|e| Error::Io(e.into()))?;
    }
    w.flush()?;
    Ok(())
}

/// Column names of the v1 schema.
pub fn sweep_columns() -> Vec<&'static str> {
    vec![
        "delta",
        "n",
        "a",
        "e_minus_witten",
        "e_zero_witten",
        "e_plus_witten",
        "e_minus_shooting",
        "e_zero_shooting",
        "e_plus_shooting",
        "e_minus_reduced",
        "e_zero_reduced",
        "e_plus_reduced",
        "e_minus_asymp",
        "e_zero_asymp",
        "e_plus_asymp",
        "count_witten",
        "count_shooting",
        "count_reduced",
        "eig_error",
        "eig_error_witten",
        "mode_error",
        "mode_error_witten",
        "zero_mode_error",
        "method_gap",
        "reduced_gap",
        "remainder",
        "residual_norm",
        "error",
    ]
}

pub fn read_sweep<R: std::io::Read>(input: R) -> Result<Vec<SweepRow>> {
    let mut input = std::io::BufReader::new(input);
    let mut first = String::new();
    input.read_line(&mut first)?;
    if first.trim_end() != SWEEP_HEADER {
        return Err(Error::InvalidSample(format!(
            "expected sweep header {SWEEP_HEADER:?}, found {:?}",
            first.trim_end()
        )));
    }
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(input);
    let header = r.headers().map_err(|e| Error::InvalidSample(e.to_string()))?;
    if header.iter().collect::<Vec<_>>() != sweep_columns() {
        return Err(Error::InvalidSample("sweep columns do not match schema v1".into()));
    }
    r.deserialize()
        .map(|row| row.map_err(|e| Error::InvalidSample(e.to_string())))
        .collect()
}

pub fn save_sweep(path: &Path, rows: &[SweepRow]) -> Result<()> {
    write_sweep(std::io::BufWriter::new(std::fs::File::create(path)?), rows)
}

pub fn load_sweep(path: &Path) -> Result<Vec<SweepRow>> {
    read_sweep(std::fs::File::open(path)?)
}

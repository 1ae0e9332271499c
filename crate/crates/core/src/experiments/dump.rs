//! CSV data behind the profile and eigenfunction figures.

use std::path::{Path, PathBuf};

use num_complex::Complex64;

use super::config::{DumpSpec, ExperimentConfig};
use crate::analytic_modes::{exact_zero_mode, zero_mode, Spinor};
use crate::error::{Error, Result};
use crate::mass_profiles::MassProfile;
use crate::spectral_solver::{dirac_spectrum_in_gap, GridSpinor};

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.into())
}

fn uniform(lo: f64, hi: f64, h: f64) -> Vec<f64> {
    let n = ((hi - lo) / h).round() as usize;
    (0..=n).map(|i| lo + i as f64 * h).collect()
}

pub fn write_profile_csv(path: &Path, profile: &MassProfile, xs: &[f64]) -> Result<()> {
    let k = profile.antiderivative();
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record(["x", "kappa", "K"]).map_err(csv_err)?;
    for &x in xs {
        w.serialize((x, profile.kappa(x), k.eval(x))).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_mode_csv(path: &Path, values: &[(f64, Spinor)]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record(["x", "re_a1", "im_a1", "re_a2", "im_a2"]).map_err(csv_err)?;
    for (x, v) in values {
        w.serialize((x, v[0].re, v[0].im, v[1].re, v[1].im)).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_mode_csv(path: &Path) -> Result<Vec<(f64, Spinor)>> {
    let mut r = csv::Reader::from_path(path).map_err(csv_err)?;
    r.deserialize::<(f64, f64, f64, f64, f64)>()
        .map(|row| {
            let (x, a, b, c, d) = row.map_err(|e| Error::InvalidSample(e.to_string()))?;
            Ok((x, [Complex64::new(a, b), Complex64::new(c, d)]))
        })
        .collect()
}

/// The lowest and highest gap eigenfunctions inside `|E| ≤ K` on the nodes,
/// with the sign fixed by the largest real component.
fn computed_pair(config: &ExperimentConfig, profile: &MassProfile, spacing: f64) -> Result<[Vec<(f64, Spinor)>; 2]> {
    let core = profile.core_half_width();
    let half = profile.outer_extent()
        + if core.is_finite() { core } else { 0.0 }
        + config.grid.margin / profile.kappa_inf();
    let grid = crate::spectral_solver::Grid::with_spacing(half, spacing)?;
    let r = dirac_spectrum_in_gap(profile, grid, config.tolerances.eigen)?;
    let inside: Vec<usize> = (0..r.eigenvalues.len())
        .filter(|&i| r.eigenvalues[i].abs() <= config.window)
        .collect();
    if inside.len() < 2 {
        return Err(Error::InvalidParameter(format!(
            "expected a pair of gap eigenvalues, found {}",
            inside.len()
        )));
    }
    let fix = |psi: &GridSpinor| {
        let big = psi.bottom.iter().fold(0.0f64, |m, c| if c.re.abs() > m.abs() { c.re } else { m });
        let mut p = psi.clone();
        p.scale(big.signum().into());
        p.to_nodes()
    };
    Ok([
        fix(&r.eigenfunctions[*inside.last().unwrap()]),
        fix(&r.eigenfunctions[inside[0]]),
    ])
}

/// Write every figure table into `dir` and return the paths.
pub fn dump_figures(config: &ExperimentConfig, dir: &Path) -> Result<Vec<PathBuf>> {
    config.validate()?;
    std::fs::create_dir_all(dir)?;
    let plan = config.dump.clone().unwrap_or(DumpSpec {
        delta: 2.0,
        spacing: 0.01,
    });
    let h = plan.spacing;
    let d = plan.delta;
    let base = config.base_profile()?;
    let k_inf = base.kappa_inf();
    let tail = 10.0 / k_inf;
    let mut written = Vec::new();
    let mut put = |name: &str| {
        let p = dir.join(name);
        written.push(p.clone());
        p
    };

    let two = base.glue(2, d)?;
    let three = base.glue(3, d)?;
    write_profile_csv(&put("profile_single.csv"), &base, &uniform(-3.0, 3.0, h))?;
    write_profile_csv(&put("profile_two_wall.csv"), &two, &uniform(-d - 3.0, d + 3.0, h))?;
    write_profile_csv(&put("profile_three_wall.csv"), &three, &uniform(-2.0 * d - 3.0, 2.0 * d + 3.0, h))?;

    let single = zero_mode(&base)?;
    let xs = uniform(-tail, tail, h);
    write_mode_csv(
        &put("mode_single_zero.csv"),
        &xs.iter().map(|&x| (x, single.eval(x))).collect::<Vec<_>>(),
    )?;

    let [plus, minus] = computed_pair(config, &two, h)?;
    write_mode_csv(&put("mode_two_plus.csv"), &plus)?;
    write_mode_csv(&put("mode_two_minus.csv"), &minus)?;

    let exact = exact_zero_mode(&three)?;
    let xs = uniform(-2.0 * d - tail, 2.0 * d + tail, h);
    write_mode_csv(
        &put("mode_three_zero.csv"),
        &xs.iter().map(|&x| (x, exact.eval(x))).collect::<Vec<_>>(),
    )?;
    let [plus, minus] = computed_pair(config, &three, h)?;
    write_mode_csv(&put("mode_three_plus.csv"), &plus)?;
    write_mode_csv(&put("mode_three_minus.csv"), &minus)?;
    Ok(written)
}

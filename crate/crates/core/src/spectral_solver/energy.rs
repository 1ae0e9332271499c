//! Lower bound `‖𝒟f‖ ≥ (κ∞ + K)/2 ‖f‖` for `f` orthogonal to the two
//! approximate zero modes of a two-wall profile, probed with random trials.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::analytic_modes::{i_sigma3, shifted_modes, sigma1, Spinor};
use crate::error::{Error, Result};
use crate::mass_profiles::MassProfile;

/// Quadrature spacing for the trial norms.
const SPACING: f64 = 0.005;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    pub delta: f64,
    pub window: f64,
    pub trials: usize,
    pub seed: u64,
    pub min_ratio: f64,
    pub bound: f64,
    pub passed: bool,
}

#[derive(Clone, Debug)]
struct Gaussian {
    center: f64,
    width: f64,
    coef: Spinor,
}

fn trial(rng: &mut ChaCha8Rng, extent: f64) -> Vec<Gaussian> {
    let terms = rng.gen_range(1..=4);
    (0..terms)
        .map(|_| {
            let mut c = || Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
            let coef = [c(), c()];
            Gaussian {
                center: rng.gen_range(-extent..=extent),
                width: rng.gen_range(0.5..=2.0),
                coef,
            }
        })
        .collect()
}

fn eval(gs: &[Gaussian], x: f64) -> (Spinor, Spinor) {
    let zero = Complex64::new(0.0, 0.0);
    let (mut f, mut df) = ([zero; 2], [zero; 2]);
    for g in gs {
        let t = (x - g.center) / g.width;
        let e = (-0.5 * t * t).exp();
        let d = -t / g.width * e;
        for k in 0..2 {
            f[k] += g.coef[k] * e;
            df[k] += g.coef[k] * d;
        }
    }
    (f, df)
}

fn dirac(kappa: f64, f: Spinor, df: Spinor) -> Spinor {
    let a = i_sigma3(df);
    let b = sigma1(f);
    [a[0] + b[0] * kappa, a[1] + b[1] * kappa]
}

/// Trapezoid sums on a uniform grid; the integrands are negligible at the ends.
fn dot(a: &[Spinor], b: &[Spinor]) -> Complex64 {
    a.iter()
        .zip(b)
        .map(|(u, v)| u[0].conj() * v[0] + u[1].conj() * v[1])
        .sum::<Complex64>()
        * SPACING
}

/// `‖𝒟f‖/‖f‖` after removing from `f` its component in the span of
/// `modes` (sampled values and their images under 𝒟).
fn projected_ratio(f: &[Spinor], df: &[Spinor], modes: &[Vec<Spinor>], dmodes: &[Vec<Spinor>]) -> f64 {
    let m = modes.len();
    let (mut f, mut df) = (f.to_vec(), df.to_vec());
    if m > 0 {
        let gram = DMatrix::from_fn(m, m, |i, j| dot(&modes[i], &modes[j]));
        let rhs = DVector::from_fn(m, |i, _| dot(&modes[i], &f));
        let c = gram.lu().solve(&rhs).expect("mode Gram matrix is nonsingular");
        for j in 0..m {
            for (k, (u, du)) in f.iter_mut().zip(df.iter_mut()).enumerate() {
                for s in 0..2 {
                    u[s] -= c[j] * modes[j][k][s];
                    du[s] -= c[j] * dmodes[j][k][s];
                }
            }
        }
    }
    (dot(&df, &df).re / dot(&f, &f).re).sqrt()
}

pub fn energy_estimate_check(base: &MassProfile, delta: f64, window: f64, trials: usize, seed: u64) -> Result<EnergyReport> {
    let k_inf = base.kappa_inf();
    if !(window > 0.0 && window < k_inf) {
        return Err(Error::InvalidWindow {
            lo: -window,
            hi: window,
            kappa_inf: k_inf,
        });
    }
    let profile = base.glue(2, delta)?;
    let modes = shifted_modes(base, 2, delta)?;
    let half = delta + 20.0 / k_inf;
    let n = (2.0 * half / SPACING).round() as usize + 1;
    let xs: Vec<f64> = (0..n).map(|i| -half + i as f64 * SPACING).collect();
    let sampled: Vec<Vec<Spinor>> = modes.iter().map(|m| xs.iter().map(|&x| m.eval(x)).collect()).collect();
    let dsampled: Vec<Vec<Spinor>> = modes
        .iter()
        .map(|m| xs.iter().map(|&x| m.apply_dirac(&profile, x)).collect())
        .collect();
    let kappa: Vec<f64> = xs.iter().map(|&x| profile.kappa(x)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut min_ratio = f64::INFINITY;
    for _ in 0..trials {
        let gs = trial(&mut rng, delta + 3.0);
        let (f, df): (Vec<Spinor>, Vec<Spinor>) = xs
            .iter()
            .zip(&kappa)
            .map(|(&x, &k)| {
                let (f, d) = eval(&gs, x);
                (f, dirac(k, f, d))
            })
            .unzip();
        min_ratio = min_ratio.min(projected_ratio(&f, &df, &sampled, &dsampled));
    }
    let bound = 0.5 * (k_inf + window);
    Ok(EnergyReport {
        delta,
        window,
        trials,
        seed,
        min_ratio,
        bound,
        passed: min_ratio >= bound,
    })
}

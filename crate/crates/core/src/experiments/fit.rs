use serde::{Deserialize, Serialize};

use super::sweep::SweepRow;
use crate::error::{Error, Result};

/// Least-squares fit of `ln(error) = intercept + slope·δ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub samples: Vec<(f64, f64)>,
    pub slope: f64,
    pub intercept: f64,
    /// Standard error of the slope (zero for two samples or exact data).
    pub slope_std_error: f64,
    /// Largest `|ln error − fit|` over the samples.
    pub max_log_residual: f64,
}

impl DecayFit {
    pub fn slope_within(&self, lo: f64, hi: f64) -> bool {
        self.slope >= lo && self.slope <= hi
    }
}

pub fn fit_decay_rate(samples: &[(f64, f64)]) -> Result<DecayFit> {
    if samples.len() < 3 {
        return Err(Error::InvalidSample(format!(
            "a decay fit needs at least 3 samples, got {}",
            samples.len()
        )));
    }
    for &(d, e) in samples {
        if !d.is_finite() || !(e > 0.0) || !e.is_finite() {
            return Err(Error::InvalidSample(format!("sample ({d}, {e}) is not a positive finite error")));
        }
    }
    let n = samples.len() as f64;
    let mx = samples.iter().map(|s| s.0).sum::<f64>() / n;
    let my = samples.iter().map(|s| s.1.ln()).sum::<f64>() / n;
    let sxx: f64 = samples.iter().map(|s| (s.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidSample("all samples share the same δ".into()));
    }
    let sxy: f64 = samples.iter().map(|s| (s.0 - mx) * (s.1.ln() - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residuals: Vec<f64> = samples.iter().map(|s| s.1.ln() - (intercept + slope * s.0)).collect();
    let ssr: f64 = residuals.iter().map(|r| r * r).sum();
    let slope_std_error = if samples.len() > 2 {
        (ssr / (n - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    Ok(DecayFit {
        samples: samples.to_vec(),
        slope,
        intercept,
        slope_std_error,
        max_log_residual: residuals.iter().fold(0.0, |m, r| m.max(r.abs())),
    })
}

/// One decay fit over a sweep column, with the exponent it is compared to.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ColumnFit {
    pub column: String,
    pub target_slope: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fit: Option<DecayFit>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Fits of the error columns of a sweep against their expected exponents
/// (`−4κ∞` for eigenvalues and the remainder of `M`, `−2κ∞` for
/// eigenfunctions and the shifted-mode residual).
pub fn fit_sweep(rows: &[SweepRow], kappa_inf: f64) -> Vec<ColumnFit> {
    let columns: [(&str, f64, fn(&SweepRow) -> Option<f64>); 6] = [
        ("eig_error", -4.0, |r| r.eig_error),
        ("eig_error_witten", -4.0, |r| r.eig_error_witten),
        ("mode_error", -2.0, |r| r.mode_error),
        ("mode_error_witten", -2.0, |r| r.mode_error_witten),
        ("remainder", -4.0, |r| r.remainder),
        ("residual_norm", -2.0, |r| r.residual_norm),
    ];
    columns
        .iter()
        .map(|&(name, rate, get)| {
            let samples: Vec<(f64, f64)> = rows.iter().filter_map(|r| Some((r.delta?, get(r)?))).collect();
            let (fit, error) = match fit_decay_rate(&samples) {
                Ok(f) => (Some(f), None),
                Err(e) => (None, Some(e.to_string())),
            };
            ColumnFit {
                column: name.into(),
                target_slope: rate * kappa_inf,
                fit,
                error,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn exact_exponentials() {
        let f = fit_decay_rate(&[(3.0, (-12.0f64).exp()), (4.0, (-16.0f64).exp()), (5.0, (-20.0f64).exp())]).unwrap();
        assert!((f.slope + 4.0).abs() < 1e-12);
        assert!(f.max_log_residual < 1e-12);
        let f = fit_decay_rate(&[
            (3.0, 2.0 * (-6.0f64).exp()),
            (4.0, 2.0 * (-8.0f64).exp()),
            (5.0, 2.0 * (-10.0f64).exp()),
        ])
        .unwrap();
        assert!((f.slope + 2.0).abs() < 1e-12);
        assert!((f.intercept - 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn invalid_samples() {
        assert!(matches!(fit_decay_rate(&[(1.0, 1.0), (2.0, 0.5)]), Err(Error::InvalidSample(_))));
        assert!(matches!(
            fit_decay_rate(&[(1.0, 1.0), (2.0, 0.0), (3.0, 0.1)]),
            Err(Error::InvalidSample(_))
        ));
        assert!(fit_decay_rate(&[(1.0, 1.0), (1.0, 0.5), (1.0, 0.1)]).is_err());
    }

    #[test]
    fn sweep_columns_fit_independently() {
        let rows: Vec<SweepRow> = [3.0, 4.0, 5.0]
            .iter()
            .map(|&d: &f64| SweepRow {
                delta: Some(d),
                n: 2,
                eig_error: Some((-4.0 * d).exp()),
                residual_norm: Some(3.0 * (-2.0 * d).exp()),
                ..SweepRow::default()
            })
            .collect();
        let fits = fit_sweep(&rows, 1.0);
        let get = |c: &str| fits.iter().find(|f| f.column == c).unwrap();
        assert!((get("eig_error").fit.as_ref().unwrap().slope + 4.0).abs() < 1e-12);
        assert!((get("residual_norm").fit.as_ref().unwrap().slope + 2.0).abs() < 1e-12);
        assert!(get("remainder").error.is_some());
        assert_eq!(get("mode_error").target_slope, -2.0);
    }

    proptest! {
        #[test]
        fn recovers_slope_of_exact_data(slope in -8.0f64..2.0, c in -5.0f64..5.0, start in 1.0f64..5.0, k in 3usize..8) {
            let s: Vec<(f64, f64)> = (0..k).map(|i| {
                let d = start + i as f64;
                (d, (c + slope * d).exp())
            }).collect();
            let f = fit_decay_rate(&s).unwrap();
            prop_assert!((f.slope - slope).abs() < 1e-9);
            prop_assert!(f.slope.is_finite());
        }
    }
}

//! TOML experiment configuration.
//!
//! ```toml
//! out = "results"
//! seed = 7
//! jobs = 4
//!
//! [profile]
//! kind = "mollifier"        # mollifier | tanh | sgn | custom-sampled
//! kappa_inf = 1.0
//! n = 2
//! deltas = [3.0, 4.0, 5.0, 6.0]
//!
//! [grid]
//! spacing = 0.01
//! margin = 20.0             # box half-length beyond the walls, in 1/κ∞
//!
//! [tolerances]
//! eigen = 1e-8
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lyapunov_schmidt::ReducedOptions;
use crate::mass_profiles::{MassProfile, WallKind};
use crate::spectral_solver::{Grid, SpectralMethod};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Samples {
    pub x: Vec<f64>,
    pub kappa: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileSpec {
    pub kind: WallKind,
    pub kappa_inf: f64,
    pub n: usize,
    #[serde(default)]
    pub deltas: Vec<f64>,
    /// Explicit increasing wall centers; replaces the equally spaced glue.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub centers: Option<Vec<f64>>,
    /// Monotone samples for `custom-sampled` walls.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<Samples>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub spacing: f64,
    pub margin: f64,
    /// Explicit box; both must be given to override `spacing`/`margin`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub half_length: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Residual bound of the direct eigenpairs.
    pub eigen: f64,
    /// Eigenvalue accuracy of the shooting oracle.
    pub shooting: f64,
    /// Relative residual of the projected resolvent solves.
    pub resolvent: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnergySpec {
    pub delta: f64,
    pub window: f64,
    pub trials: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DumpSpec {
    pub delta: f64,
    pub spacing: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub out: String,
    #[serde(with = "seed_repr")]
    pub seed: u64,
    pub jobs: usize,
    /// Gap window `K`.
    pub window: f64,
    pub method: SpectralMethod,
    pub profile: ProfileSpec,
    pub grid: GridSpec,
    pub tolerances: Tolerances,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub energy: Option<EnergySpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dump: Option<DumpSpec>,
    /// Sweep CSV read by `fit`; without it `fit` runs the sweep itself.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fit_input: Option<String>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            out: "results".into(),
            seed: 0,
            jobs: 1,
            window: 0.9,
            method: SpectralMethod::Witten,
            profile: ProfileSpec {
                kind: WallKind::Mollifier,
                kappa_inf: 1.0,
                n: 2,
                deltas: vec![3.0, 4.0, 5.0, 6.0],
                centers: None,
                samples: None,
            },
            grid: GridSpec {
                spacing: 0.01,
                margin: 20.0,
                half_length: None,
                points: None,
            },
            tolerances: Tolerances {
                eigen: 1e-8,
                shooting: 1e-14,
                resolvent: 1e-12,
            },
            energy: None,
            dump: None,
            fit_input: None,
        }
    }
}

/// TOML integers are signed 64-bit; larger seeds are written as strings.
mod seed_repr {
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &u64, s: S) -> Result<S::Ok, S::Error> {
        match i64::try_from(*v) {
            Ok(i) => s.serialize_i64(i),
            Err(_) => s.serialize_str(&v.to_string()),
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Int(i64),
        Text(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<u64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Int(i) => u64::try_from(i).map_err(de::Error::custom),
            Repr::Text(t) => t.parse().map_err(de::Error::custom),
        }
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::Config(format!("{name} must be positive and finite, got {v}")))
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    /// Check every parameter against the preconditions of the solvers.
    pub fn validate(&self) -> Result<()> {
        let p = &self.profile;
        positive("profile.kappa_inf", p.kappa_inf)?;
        if p.n == 0 {
            return Err(Error::Config("profile.n must be at least 1".into()));
        }
        if self.jobs == 0 {
            return Err(Error::Config("jobs must be at least 1".into()));
        }
        positive("window", self.window)?;
        if self.window >= p.kappa_inf {
            return Err(Error::Config(format!(
                "window {} must lie inside the gap (κ∞ = {})",
                self.window, p.kappa_inf
            )));
        }
        positive("grid.spacing", self.grid.spacing)?;
        positive("grid.margin", self.grid.margin)?;
        match (self.grid.half_length, self.grid.points) {
            (Some(l), Some(n)) => {
                Grid::new(l, n).map_err(|e| Error::Config(e.to_string()))?;
            }
            (None, None) => {}
            _ => return Err(Error::Config("grid.half_length and grid.points go together".into())),
        }
        positive("tolerances.eigen", self.tolerances.eigen)?;
        positive("tolerances.shooting", self.tolerances.shooting)?;
        positive("tolerances.resolvent", self.tolerances.resolvent)?;
        if (p.kind == WallKind::CustomSampled) != p.samples.is_some() {
            return Err(Error::Config("profile.samples is required for, and only for, custom-sampled walls".into()));
        }
        let base = self.base_profile()?;
        if let Some(c) = &p.centers {
            if c.len() != p.n {
                return Err(Error::Config(format!("{} centers given for n = {}", c.len(), p.n)));
            }
            base.glue_at_centers(c)?;
        } else if p.n > 1 {
            for &d in &p.deltas {
                base.glue(p.n, d)?;
            }
        }
        if let Some(e) = &self.energy {
            positive("energy.delta", e.delta)?;
            positive("energy.window", e.window)?;
            if e.window >= p.kappa_inf {
                return Err(Error::Config("energy.window must lie inside the gap".into()));
            }
            base.glue(2, e.delta)?;
        }
        if let Some(d) = &self.dump {
            positive("dump.spacing", d.spacing)?;
            base.glue(3, d.delta)?;
        }
        Ok(())
    }

    pub fn base_profile(&self) -> Result<MassProfile> {
        let p = &self.profile;
        match (&p.samples, p.kind) {
            (Some(s), WallKind::CustomSampled) => {
                let prof = MassProfile::custom(s.x.clone(), s.kappa.clone())?;
                if (prof.kappa_inf() - p.kappa_inf).abs() > 1e-12 * p.kappa_inf {
                    return Err(Error::Config(format!(
                        "samples end at ±{}, but kappa_inf is {}",
                        prof.kappa_inf(),
                        p.kappa_inf
                    )));
                }
                Ok(prof)
            }
            _ => MassProfile::single(p.kind, p.kappa_inf),
        }
    }

    /// The profiles of the run: one per δ, or one for explicit centers or a
    /// single wall. Each comes with its half spacing, if any.
    pub fn profiles(&self) -> Result<Vec<(Option<f64>, MassProfile)>> {
        let base = self.base_profile()?;
        let p = &self.profile;
        if let Some(c) = &p.centers {
            return Ok(vec![(None, base.glue_at_centers(c)?)]);
        }
        if p.n == 1 {
            return Ok(vec![(None, base)]);
        }
        p.deltas.iter().map(|&d| Ok((Some(d), base.glue(p.n, d)?))).collect()
    }

    pub fn grid_for(&self, profile: &MassProfile) -> Result<Grid> {
        if let (Some(l), Some(n)) = (self.grid.half_length, self.grid.points) {
            return Grid::new(l, n);
        }
        let core = profile.core_half_width();
        let half = profile.outer_extent()
            + if core.is_finite() { core } else { 0.0 }
            + self.grid.margin / profile.kappa_inf();
        Grid::with_spacing(half, self.grid.spacing)
    }

    pub fn reduced_options(&self) -> ReducedOptions {
        ReducedOptions {
            spacing: self.grid.spacing,
            margin: self.grid.margin,
            window: self.window,
            tol: self.tolerances.resolvent,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn default_is_valid_and_round_trips() {
        let c = ExperimentConfig::default();
        c.validate().unwrap();
        let text = c.to_toml().unwrap();
        assert_eq!(ExperimentConfig::from_toml(&text).unwrap(), c);
    }

    #[test]
    fn rejects_bad_input() {
        let mut c = ExperimentConfig::default();
        c.window = 1.2;
        assert!(matches!(c.validate(), Err(Error::Config(_))));
        let mut c = ExperimentConfig::default();
        c.profile.deltas = vec![0.5];
        assert!(matches!(c.validate(), Err(Error::SpacingTooSmall { .. })));
        let mut c = ExperimentConfig::default();
        c.profile.kind = WallKind::CustomSampled;
        assert!(c.validate().is_err());
        assert!(ExperimentConfig::from_toml("out = 3").is_err());
        // omitted sections fall back to the defaults
        let c = ExperimentConfig::from_toml("seed = 5\n[grid]\nspacing = 0.02\nmargin = 15.0\n").unwrap();
        assert_eq!(c.seed, 5);
        assert_eq!(c.grid.spacing, 0.02);
        assert_eq!(c.profile, ExperimentConfig::default().profile);
        let big = ExperimentConfig { seed: u64::MAX, ..ExperimentConfig::default() };
        assert_eq!(ExperimentConfig::from_toml(&big.to_toml().unwrap()).unwrap(), big);
        let text = ExperimentConfig::default().to_toml().unwrap() + "\nbogus = 1\n";
        assert!(matches!(ExperimentConfig::from_toml(&text), Err(Error::Config(_))));
    }

    #[test]
    fn custom_samples_build() {
        let mut c = ExperimentConfig::default();
        c.profile.kind = WallKind::CustomSampled;
        c.profile.samples = Some(Samples {
            x: vec![-1.0, 0.0, 1.0],
            kappa: vec![-1.0, 0.0, 1.0],
        });
        c.validate().unwrap();
        let text = c.to_toml().unwrap();
        assert_eq!(ExperimentConfig::from_toml(&text).unwrap(), c);
        assert_eq!(c.profiles().unwrap().len(), 4);
    }

    #[test]
    fn empty_sweep_has_no_profiles() {
        let mut c = ExperimentConfig::default();
        c.profile.deltas.clear();
        assert!(c.profiles().unwrap().is_empty());
    }

    proptest! {
        #[test]
        fn toml_round_trip(
            kappa in 0.1f64..10.0,
            n in 1usize..6,
            deltas in prop::collection::vec(1.5f64..20.0, 0..6),
            spacing in 1e-4f64..0.1,
            seed in any::<u64>(),
            jobs in 1usize..64,
            frac in 0.01f64..0.99,
            tol in 1e-15f64..1e-3,
        ) {
            let mut c = ExperimentConfig::default();
            c.profile.kappa_inf = kappa;
            c.profile.n = n;
            c.profile.deltas = deltas.iter().map(|d| d / kappa.min(1.0)).collect();
            c.grid.spacing = spacing;
            c.seed = seed;
            c.jobs = jobs;
            c.window = frac * kappa;
            c.tolerances.eigen = tol;
            c.energy = Some(EnergySpec { delta: 8.0, window: 0.5 * kappa, trials: 10 });
            c.dump = Some(DumpSpec { delta: 2.0, spacing });
            let text = c.to_toml().unwrap();
            prop_assert_eq!(ExperimentConfig::from_toml(&text).unwrap(), c);
        }
    }
}

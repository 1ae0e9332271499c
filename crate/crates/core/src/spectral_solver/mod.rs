//! Direct eigensolvers for the Dirac operator in the spectral gap.

pub mod energy;
pub mod grid;
pub mod resolvent;
pub mod shooting;
pub mod tridiag;
pub mod witten;

pub use grid::Grid;
pub use tridiag::{SpdFactor, SymTridiag};
pub use witten::{
    aligned_distance, build_witten_pair, dirac_spectrum_in_gap, DerivativeRule, GridSpinor, Layout,
    SpectralMethod, SpectrumResult, StaggeredDirac, WittenPair,
};
pub use shooting::{
    matching_angle, shooting_eigenfunction, shooting_oracle, shooting_oracle_with, ShootingOptions, ShotMode,
};
pub use energy::{energy_estimate_check, EnergyReport};
pub use resolvent::{ProjectedResolvent, SolveStats};

//! Spectral simulation of a two-dimensional fractional thermoviscoelastic plate.
//!
//! The system evolves `U = (u, u_t, θ)` on a rectangle with Dirichlet conditions:
//!
//! ```text
//! u_tt + A u + A^ν u_t - δ A^σ θ + f(u) = h
//! θ_t  + A θ + δ A^σ u_t             = 0
//! ```
//!
//! with `A = -Δ`. Modules, bottom up:
//!
//! - [`spectral`]: eigenbasis, sine transforms, fractional powers, norms, resolvent.
//! - [`model`]: source term certificate, pseudo-spectral `f(u)`, energy functionals.
//! - [`integrate`]: IMEX stepping, trajectory and pair logs.
//! - [`stationary`]: Newton–CG solver for `A u + f(u) = h`.
//! - [`attractor`]: ensembles, attractor clouds, semidistances, dimension, sweeps.
//! - [`config`], [`experiment`], [`checkpoint`]: configuration files, orchestration, persistence.

pub mod attractor;
pub mod checkpoint;
pub mod config;
pub mod error;
pub mod experiment;
pub mod integrate;
pub mod model;
pub mod spectral;
pub mod stationary;

pub use error::{Error, Result};
pub use integrate::{
    run, run_pair, Integrator, IntegratorConfig, Monitors, PairLog, Scheme, TrajectoryLog,
};
pub use model::{audit_nonlinearity, EnergyReport, Model, NonlinearitySpec, SystemParams};
pub use spectral::{
    apply_frac_power, build_basis, frac_norm, resolvent_solve, state_norm, BasisSpec, PhaseNorm,
    SineGrid, SpectralField, StateVector,
};

pub use attractor::{
    absorbing_entry, box_dimension, box_dimension_points, hausdorff_semidist,
    quasi_stability_check, sample_attractor, semicontinuity_sweep, AttractorCloud,
    DimensionEstimate, EnsembleConfig, EpsRange, QuasiFitConfig, QuasiStabilityReport, SweepConfig,
    SweepReport,
};
pub use config::{parse_config, ExperimentConfig, ExperimentKind};
pub use experiment::{exit_code, rerun_from_manifest, run_experiment, Manifest};
pub use stationary::{solve_stationary, StationaryResult};

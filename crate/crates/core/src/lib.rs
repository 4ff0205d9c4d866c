//! Two two-level atoms, each coupled to its own Lorentzian reservoir at
//! finite temperature, evolved with a second-order time-convolutionless
//! master equation. Quantum discord and entanglement of formation are tracked
//! along the trajectory, and their crossover and sudden-death times
//! extracted.
//!
//! Units: rates and frequencies in γ₀, times in 1/γ₀, temperature as
//! `θ = k_B T / (ħ ω₀)`.

pub mod analysis;
pub mod cli;
pub mod correlations;
pub mod dynamics;
pub mod qmat;
pub mod quadrature;
pub mod reservoir;

pub use analysis::{run, EventReport, MeasureSeries, Scenario};
pub use dynamics::{integrate, InitialState, IntegratorConfig, Trajectory};
pub use reservoir::ReservoirParams;

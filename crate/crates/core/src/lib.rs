//! Bounds on the information leaked to a Trojan-horse eavesdropper in a
//! BB84 transmitter, and the secure key rate that survives it.
//!
//! Modules, bottom-up:
//!
//! - [`numerics`]: probability and decibel newtypes, binary entropy.
//! - [`channel`]: fiber link observables for single-photon and decoy sources.
//! - [`attack`]: how leaked photons degrade the phase error.
//! - [`rate`]: key rate, distance sweeps, thresholds, convexity checks.
//! - [`budget`]: damage-threshold scaling and isolation budgets.
//! - [`characterization`]: reflectometry traces and component spectra.

pub mod attack;
pub mod budget;
pub mod channel;
pub mod characterization;
pub mod numerics;
pub mod rate;

pub use attack::{AttackError, AttackKind, AttackModel, Leakage};
pub use budget::{
    isolation_total, mu_out_bound, plan_budget, required_isolation, BudgetError, ComponentCatalog,
    IsolationBudget, LidtPreset, LidtSpec, PlanConstraints,
};
pub use channel::{ChannelError, ChannelParams, LinkObservables, SourceModel};
pub use characterization::{
    parse_spectrum, parse_trace, reflectivity_bound, spectral_isolation, CharacterizationError,
    Polarization, ReflectionPeak, SpectralCurve,
};
pub use numerics::{binary_entropy, Decibel, NumericsError, Probability};
pub use rate::{
    key_rate, max_distance, mu_out_threshold, sweep_distance, verify_convexity, RateError,
    RateOutcome, RatePoint, RateQuery, RateSeries,
};

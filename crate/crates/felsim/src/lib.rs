//! Simulation toolkit for chaotic SASE-FEL pulses driving a decaying
//! two-level (resonant-Auger) transition.
//!
//! The crate covers the whole pipeline:
//!
//! * [`noise`] — stationary complex Gaussian colored noise synthesized from a
//!   Gaussian or Lorentzian power spectral density, with the analytic
//!   correlation, bandwidth, and coherence-time relations of each family.
//! * [`pulse`] — deterministic envelopes carrying the noise, pulse energies,
//!   and the time-bandwidth relations of Gaussian pulses.
//! * [`stats`] — ensemble estimators for the chaotic-light checks: mean
//!   intensity, two-time coherence, intensity and energy distributions, and
//!   the energy spectral density.
//! * [`tls`] — the stochastic density-matrix equations with Auger decay,
//!   ensemble yields, and detuning scans with common random numbers.
//! * [`decorr`] — the deterministic phase-diffusion model (`G21 -> G21 +
//!   gamma`) and the decorrelation-error diagnostic.
//! * [`lineshape`] — FWHM extraction, the Voigt width law, and Voigt fits.
//! * [`runner`] — experiment configuration, presets, and CSV/JSON export
//!   behind the `felsim` binary.
//!
//! Everything is deterministic given a master seed: trajectory `i` always
//! draws from its own counter-derived stream, and parallel reductions use a
//! fixed merge tree, so results are byte-identical for any worker count.
//!
//! See the `examples/` directory for one runnable program per capability.

pub mod decorr;
pub mod ensemble;
pub mod error;
pub mod lineshape;
pub mod noise;
pub mod pulse;
pub mod runner;
pub mod stats;
pub mod tls;
pub mod units;

pub use error::{Error, Result};

//! Force-sensing noise model for an optical cavity coupled to two
//! mechanical oscillators linked by a phase-carrying phonon hopping.
//!
//! The crate is organised bottom-up:
//!
//! * [`model`]: parameters, drift matrix, stability, hybrid modes
//! * [`spectra`]: susceptibility, homodyne coefficients, noise spectra
//! * [`closed_form`]: literal closed-form coefficients and their numeric audit
//! * [`sweep`]: frequency and parameter sweeps, effective frequencies, bandwidth
//! * [`io`]: run configuration, CSV, plot scripts and text reports

pub mod closed_form;
pub mod io;
pub mod model;
pub mod spectra;
pub mod sweep;

pub use model::{
    drift_matrix, hybrid_modes, stability_check, thermal_occupation, DarkLabel, DriftMatrix,
    HybridModes, Occupation, ParamError, Quadrature, StabilityReport, SystemParams,
};
pub use spectra::{
    added_noise, mechanical_response, output_coefficients, single_mode_reference, susceptibility,
    thermal_noise, total_spectrum, OutputCoefficients, SpectraError, SpectrumSample,
    Susceptibility, SQL,
};

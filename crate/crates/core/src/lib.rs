//! Simulation and certification toolkit for nonlinear polarization squeezing
//! measured with multiplexed click-counting detectors.
//!
//! The crate models a polarization-entangled macroscopic Bell state sent
//! through quarter- and half-wave plates into two N-bin click detectors, and
//! provides:
//!
//! - analytic joint click statistics and normally ordered moments from a
//!   closed-form Gaussian expectation ([`gaussian`], [`click`]);
//! - an independent brute-force Fock-basis oracle used to validate the
//!   analytic path end to end ([`fock`]);
//! - second- and higher-order nonclassicality witnesses built from moment
//!   matrices, with negativity certifying nonlinear polarization squeezing
//!   ([`click`]);
//! - multinomial Monte Carlo sampling with delta-method and bootstrap
//!   uncertainties ([`sampling`]);
//! - the thermal-noise robustness study comparing the linear and nonlinear
//!   squeezing criteria ([`noise`]).

pub mod click;
pub mod error;
pub mod fock;
pub mod gaussian;
pub mod math;
pub mod noise;
pub mod polarization;
pub mod sampling;

pub use click::{
    click_probabilities_analytic, moment_matrix_m, moment_matrix_mprime, moments_from_statistics,
    pi_moments_analytic, s0_nl_moments, s_nl_moments, second_order_witness, JointClickStatistics,
    MomentMatrix, MomentMatrixKind, MomentSet, StatisticsKind, Witness,
};
pub use error::{Error, Result};
pub use fock::{
    build_bell_state, click_response, coherent_click_statistics, default_cutoff,
    detected_photon_distribution, oracle_click_statistics, FockStateVector,
    JointPhotonDistribution,
};
pub use gaussian::{nexp_expectation, nexp_expectation_general, NexpArgs, QuadraticFormMatrix};
pub use noise::{
    linear_noisy_variance, noise_threshold, nonlinear_noisy_moments, nonlinear_noisy_variance,
    Criterion, NoisyMoments, NoisySingleProbe,
};
pub use polarization::{
    compose_setting, jones_hwp, jones_qwp, BellStateParams, DetectorConfig, JonesMatrix,
    MeasurementSetting,
};
pub use sampling::{
    estimate_witnesses, sample, SampleRun, SigmaMethod, WitnessEstimates, WitnessReport,
    DEFAULT_RESAMPLES,
};

//! Monte Carlo generation of finite-shot click data and statistically
//! rigorous witness estimation.
//!
//! The generator is ChaCha12 keyed by the 64-bit run seed; multinomial draws
//! use sequential binomial conditioning over the table cells in row-major
//! order, so results are reproducible bit-exactly for a fixed seed. The
//! bootstrap uses stream 1 of the same key, keeping resamples independent of
//! the primary draw.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Binomial, Distribution};

use crate::click::{
    moment_matrix_mprime, moments_from_statistics, second_order_witness, JointClickStatistics,
    StatisticsKind,
};
use crate::error::{Error, Result};
use crate::polarization::DetectorConfig;

/// A finite-shot simulated data set.
#[derive(Debug, Clone)]
pub struct SampleRun {
    pub seed: u64,
    pub shots: u64,
    bins: usize,
    counts: Vec<u64>,
}

impl SampleRun {
    pub fn bins(&self) -> usize {
        self.bins
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn count(&self, k: usize, l: usize) -> u64 {
        self.counts[k * (self.bins + 1) + l]
    }

    pub fn frequencies(&self) -> Result<JointClickStatistics> {
        JointClickStatistics::from_counts(self.bins, &self.counts)
    }
}

/// Draw a multinomial sample from an analytic probability table.
pub fn sample(stats: &JointClickStatistics, shots: u64, seed: u64) -> Result<SampleRun> {
    if stats.kind() != StatisticsKind::Probability {
        return Err(Error::InvalidArgument(
            "sampling requires a probability table".into(),
        ));
    }
    if shots == 0 {
        return Err(Error::InvalidArgument("shots must be positive".into()));
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let counts = multinomial_draw(&mut rng, shots, stats.table());
    Ok(SampleRun { seed, shots, bins: stats.bins(), counts })
}

/// Sequential binomial conditioning: cell i receives
/// Binomial(remaining, p_i / suffix_i). Exact for any table size.
fn multinomial_draw(rng: &mut ChaCha12Rng, shots: u64, probs: &[f64]) -> Vec<u64> {
    let mut suffix = vec![0.0; probs.len() + 1];
    for i in (0..probs.len()).rev() {
        suffix[i] = suffix[i + 1] + probs[i];
    }
    let mut counts = vec![0u64; probs.len()];
    let mut remaining = shots;
    for i in 0..probs.len() {
        if remaining == 0 {
            break;
        }
        if suffix[i + 1] <= 0.0 {
            counts[i] = remaining;
            break;
        }
        let p = (probs[i] / suffix[i]).clamp(0.0, 1.0);
        let draw = Binomial::new(remaining, p)
            .expect("conditional probability is in [0, 1]")
            .sample(rng);
        counts[i] = draw;
        remaining -= draw;
    }
    counts
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SigmaMethod {
    Delta,
    Bootstrap,
}

/// Point estimate with uncertainty in units of standard deviations.
#[derive(Debug, Clone, Copy)]
pub struct WitnessReport {
    pub value: f64,
    pub sigma: f64,
    pub significance: f64,
    pub method: SigmaMethod,
}

impl WitnessReport {
    fn new(value: f64, sigma: f64, method: SigmaMethod) -> Self {
        let significance = if sigma > 0.0 { value / sigma } else { 0.0 };
        Self { value, sigma, significance, method }
    }
}

/// Estimates for the second-order witness (delta method and bootstrap) and
/// the M' minimum eigenvalue (bootstrap only: the delta method needs
/// eigenvector stability that fails near degeneracy, exactly the regime a
/// witness probes).
#[derive(Debug, Clone)]
pub struct WitnessEstimates {
    pub second_order: WitnessReport,
    pub second_order_bootstrap: WitnessReport,
    pub mprime_min_eig: WitnessReport,
}

/// Default bootstrap resample count.
pub const DEFAULT_RESAMPLES: usize = 200;

/// Convert a run to frequencies and evaluate both witnesses with
/// uncertainties.
pub fn estimate_witnesses(
    run: &SampleRun,
    det: &DetectorConfig,
    resamples: usize,
) -> Result<WitnessEstimates> {
    let freq = run.frequencies()?;
    let moments = moments_from_statistics(&freq, det)?;
    let witness = second_order_witness(&moments, det)?;
    let mprime = moment_matrix_mprime(&moments, det)?;

    let sigma_delta = witness.sigma.ok_or_else(|| {
        Error::InsufficientData("frequency table carries no shot count".into())
    })?;

    // bootstrap: resample the multinomial at the observed frequencies
    let mut rng = ChaCha12Rng::seed_from_u64(run.seed);
    rng.set_stream(1);
    let mut witness_draws = Vec::with_capacity(resamples);
    let mut eig_draws = Vec::with_capacity(resamples);
    for _ in 0..resamples {
        let counts = multinomial_draw(&mut rng, run.shots, freq.table());
        let total: u64 = counts.iter().sum();
        let table: Vec<f64> = counts.iter().map(|&c| c as f64 / total as f64).collect();
        let stats = JointClickStatistics::from_frequencies(run.bins, table, None)?;
        let m = moments_from_statistics(&stats, det)?;
        witness_draws.push(second_order_witness(&m, det)?.value);
        eig_draws.push(moment_matrix_mprime(&m, det)?.min_eigenvalue);
    }

    Ok(WitnessEstimates {
        second_order: WitnessReport::new(witness.value, sigma_delta, SigmaMethod::Delta),
        second_order_bootstrap: WitnessReport::new(
            witness.value,
            std_dev(&witness_draws),
            SigmaMethod::Bootstrap,
        ),
        mprime_min_eig: WitnessReport::new(
            mprime.min_eigenvalue,
            std_dev(&eig_draws),
            SigmaMethod::Bootstrap,
        ),
    })
}

fn std_dev(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let mean = xs.iter().sum::<f64>() / xs.len() as f64;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (xs.len() - 1) as f64;
    var.sqrt()
}

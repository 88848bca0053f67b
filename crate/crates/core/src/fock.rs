//! Brute-force validation path in a truncated Fock basis.
//!
//! The macroscopic Bell state is expanded as pair amplitudes, the wave-plate
//! transform is applied exactly through the beam-splitter Fock decomposition,
//! the joint photon-number distribution of the two detected modes is
//! marginalized out, and the finite-bin click response folds it into joint
//! click statistics. No Gaussian-integral machinery is shared with the
//! analytic path, so agreement between the two is a real equivalence test.

use num_complex::Complex64;

use crate::click::JointClickStatistics;
use crate::error::{Error, Result};
use crate::math::{binomial, factorial};
use crate::polarization::{BellStateParams, DetectorConfig, MeasurementSetting};

/// Smallest cutoff whose geometric tail mass stays below 1e-12 for the
/// given squeezing amplitude (per-pair occupation m runs 0..=cutoff).
pub fn default_cutoff(lambda_modulus: f64) -> usize {
    let l = (lambda_modulus * lambda_modulus).clamp(0.0, 1.0 - 1e-9);
    if l == 0.0 {
        return 1;
    }
    // joint norm deficit is ~ 2 l^(K+1)
    let k = ((1e-12_f64 / 2.0).ln() / l.ln()).ceil() as usize;
    k.clamp(1, 60)
}

/// Pair-occupation amplitudes of the macroscopic Bell state: entry (m, n)
/// multiplies |m> (x) |n> (x) |n> (x) |m> in the mode order
/// (H_A, V_A, H_B, V_B).
#[derive(Debug, Clone)]
pub struct FockStateVector {
    amplitudes: Vec<Complex64>,
    cutoff: usize,
    norm_deficit: f64,
}

impl FockStateVector {
    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    /// Truncation tail mass 1 - <psi|psi>; metadata, not an error.
    pub fn norm_deficit(&self) -> f64 {
        self.norm_deficit
    }

    pub fn amplitude(&self, m: usize, n: usize) -> Complex64 {
        self.amplitudes[m * (self.cutoff + 1) + n]
    }
}

/// Amplitudes (1 - |lambda|^2) lambda^m (e^{i phi} lambda)^n for
/// m, n <= cutoff.
pub fn build_bell_state(state: &BellStateParams, cutoff: usize) -> Result<FockStateVector> {
    if cutoff < 1 {
        return Err(Error::InvalidArgument("cutoff must be >= 1".into()));
    }
    let lam = state.lambda();
    let lam_phase = lam * Complex64::from_polar(1.0, state.phi());
    let norm = 1.0 - state.lambda_sq();
    let dim = cutoff + 1;
    let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim * dim];
    let mut total = 0.0;
    let mut pow_m = Complex64::new(norm, 0.0);
    for m in 0..dim {
        let mut amp = pow_m;
        for n in 0..dim {
            amplitudes[m * dim + n] = amp;
            total += amp.norm_sqr();
            amp *= lam_phase;
        }
        pow_m *= lam;
    }
    Ok(FockStateVector { amplitudes, cutoff, norm_deficit: 1.0 - total })
}

/// Fock-basis decomposition of a two-mode passive transform: for output
/// modes a' = tau a + rho b and b' = -rho* a + tau* b,
/// |m, n> = sum_p coeff[p] |p, m+n-p>.
pub fn beam_splitter_coefficients(
    tau: Complex64,
    rho: Complex64,
    m: usize,
    n: usize,
) -> Vec<Complex64> {
    let s = m + n;
    let mut out = vec![Complex64::new(0.0, 0.0); s + 1];
    let neg_rho_conj = -rho.conj();
    let tau_conj = tau.conj();
    for i in 0..=m {
        let a = binomial(m, i) * beam_pow(tau, i) * beam_pow(neg_rho_conj, m - i);
        for j in 0..=n {
            let b = binomial(n, j) * beam_pow(rho, j) * beam_pow(tau_conj, n - j);
            out[i + j] += a * b;
        }
    }
    let base = factorial(m) * factorial(n);
    for (p, c) in out.iter_mut().enumerate() {
        *c *= (factorial(p) * factorial(s - p) / base).sqrt();
    }
    out
}

fn beam_pow(z: Complex64, k: usize) -> Complex64 {
    z.powu(k as u32)
}

/// Joint photon-number distribution of the detected modes (first output of
/// arm A, second output of arm B) after the wave-plate transform.
#[derive(Debug, Clone)]
pub struct JointPhotonDistribution {
    p: Vec<f64>,
    size: usize,
}

impl JointPhotonDistribution {
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn probability(&self, n_a: usize, n_b: usize) -> f64 {
        self.p[n_a * self.size + n_b]
    }

    pub fn sum(&self) -> f64 {
        self.p.iter().sum()
    }

    pub fn mean_a(&self) -> f64 {
        let mut acc = 0.0;
        for na in 0..self.size {
            for nb in 0..self.size {
                acc += na as f64 * self.probability(na, nb);
            }
        }
        acc
    }

    pub fn mean_b(&self) -> f64 {
        let mut acc = 0.0;
        for na in 0..self.size {
            for nb in 0..self.size {
                acc += nb as f64 * self.probability(na, nb);
            }
        }
        acc
    }

    /// Product of independent Poisson marginals; the classical baseline for
    /// the positive-semidefiniteness tests.
    pub fn coherent(mean_a: f64, mean_b: f64, cutoff: usize) -> Result<Self> {
        if mean_a < 0.0 || mean_b < 0.0 {
            return Err(Error::InvalidArgument("negative mean photon number".into()));
        }
        let pa = poisson_pmf(mean_a, cutoff);
        let pb = poisson_pmf(mean_b, cutoff);
        let size = cutoff + 1;
        let mut p = vec![0.0; size * size];
        for (i, &a) in pa.iter().enumerate() {
            for (j, &b) in pb.iter().enumerate() {
                p[i * size + j] = a * b;
            }
        }
        Ok(Self { p, size })
    }
}

fn poisson_pmf(mu: f64, cutoff: usize) -> Vec<f64> {
    let mut p = vec![0.0; cutoff + 1];
    p[0] = (-mu).exp();
    for n in 1..=cutoff {
        p[n] = p[n - 1] * mu / n as f64;
    }
    p
}

/// Poisson cutoff with tail mass far below the oracle tolerances for
/// mean photon numbers up to ~10.
pub fn poisson_cutoff(mu: f64) -> usize {
    ((mu + 15.0 * mu.sqrt()).ceil() as usize + 25).max(30)
}

/// Transform the Bell state and marginalize onto the two detected modes.
///
/// Amplitudes interfere only within a fixed total pair number s = m + n;
/// for each s the output configuration is labeled by the measured-A count
/// and the undetected-C count, and the traced modes make distinct s blocks
/// add incoherently.
pub fn detected_photon_distribution(
    fock: &FockStateVector,
    setting: &MeasurementSetting,
) -> JointPhotonDistribution {
    let cutoff = fock.cutoff();
    let size = 2 * cutoff + 1;
    let mut p = vec![0.0; size * size];
    for s in 0..=2 * cutoff {
        let dim = s + 1;
        let mut amp = vec![Complex64::new(0.0, 0.0); dim * dim];
        let lo = s.saturating_sub(cutoff);
        let hi = s.min(cutoff);
        for m in lo..=hi {
            let n = s - m;
            let psi = fock.amplitude(m, n);
            if psi.norm_sqr() == 0.0 {
                continue;
            }
            // arm A holds (m, n) in (H, V); arm B holds (n, m)
            let ca = beam_splitter_coefficients(setting.tau, setting.rho, m, n);
            let cb = beam_splitter_coefficients(setting.tau, setting.rho, n, m);
            for (pa, &a) in ca.iter().enumerate() {
                let pa_amp = psi * a;
                for (qc, &b) in cb.iter().enumerate() {
                    amp[pa * dim + qc] += pa_amp * b;
                }
            }
        }
        for pa in 0..dim {
            for qc in 0..dim {
                // measured B mode is the second output: occupation s - qc
                p[pa * size + (s - qc)] += amp[pa * dim + qc].norm_sqr();
            }
        }
    }
    JointPhotonDistribution { p, size }
}

/// P(k clicks | n photons) for uniform splitting into N bins with
/// per-photon survival eta.
///
/// Computed by a photon-at-a-time recurrence over the number of fired bins;
/// every term is non-negative, so no cancellation enters. The closed
/// inclusion-exclusion form C(N,k) sum_j (-1)^j C(k,j) (1-eta(N-k+j)/N)^n
/// is checked against this in tests.
pub fn click_response(k: usize, n: usize, det: &DetectorConfig) -> f64 {
    let table = click_response_table(det, n);
    table[k][n]
}

/// Full table P[k][n] for n = 0..=n_max.
pub fn click_response_table(det: &DetectorConfig, n_max: usize) -> Vec<Vec<f64>> {
    let n_bins = det.bins();
    let eta = det.efficiency();
    let nb = n_bins as f64;
    let mut table = vec![vec![0.0; n_max + 1]; n_bins + 1];
    let mut f = vec![0.0; n_bins + 1];
    f[0] = 1.0;
    for (k, row) in table.iter_mut().enumerate() {
        row[0] = f[k];
    }
    for n in 1..=n_max {
        let mut g = vec![0.0; n_bins + 1];
        for j in 0..=n_bins {
            // photon lost, or landed in an already-fired bin
            g[j] = f[j] * (1.0 - eta + eta * j as f64 / nb);
            if j > 0 {
                g[j] += f[j - 1] * eta * (n_bins - j + 1) as f64 / nb;
            }
        }
        f = g;
        for (k, row) in table.iter_mut().enumerate() {
            row[n] = f[k];
        }
    }
    table
}

/// Fold a photon-number distribution through the click response.
pub fn clicks_from_photon_distribution(
    dist: &JointPhotonDistribution,
    det: &DetectorConfig,
) -> Result<JointClickStatistics> {
    let n_bins = det.bins();
    let n_max = dist.size().saturating_sub(1);
    let resp = click_response_table(det, n_max);
    let mut table = vec![0.0; (n_bins + 1) * (n_bins + 1)];
    for k in 0..=n_bins {
        for l in 0..=n_bins {
            let mut acc = 0.0;
            for na in 0..=n_max {
                let pk = resp[k][na];
                if pk == 0.0 {
                    continue;
                }
                let mut inner = 0.0;
                for nb in 0..=n_max {
                    inner += dist.probability(na, nb) * resp[l][nb];
                }
                acc += pk * inner;
            }
            table[k * (n_bins + 1) + l] = acc;
        }
    }
    JointClickStatistics::from_probabilities(n_bins, table, None)
}

/// End-to-end oracle: state -> transform -> photon distribution -> clicks.
/// Independent of the determinant-based analytic path.
pub fn oracle_click_statistics(
    state: &BellStateParams,
    setting: &MeasurementSetting,
    det: &DetectorConfig,
    cutoff: usize,
) -> Result<JointClickStatistics> {
    let fock = build_bell_state(state, cutoff)?;
    let dist = detected_photon_distribution(&fock, setting);
    clicks_from_photon_distribution(&dist, det)
}

/// Click statistics of a product coherent probe with detected-mode mean
/// photon numbers (mean_a, mean_b), via the Poisson fold.
pub fn coherent_oracle_click_statistics(
    mean_a: f64,
    mean_b: f64,
    det: &DetectorConfig,
) -> Result<JointClickStatistics> {
    let cutoff = poisson_cutoff(mean_a.max(mean_b));
    let dist = JointPhotonDistribution::coherent(mean_a, mean_b, cutoff)?;
    clicks_from_photon_distribution(&dist, det)
}

/// Exact coherent-state click table: for coherent light the bins fire
/// independently, so each arm is Binomial(N, 1 - exp(-eta mu / N)).
pub fn coherent_click_statistics(
    mean_a: f64,
    mean_b: f64,
    det: &DetectorConfig,
) -> Result<JointClickStatistics> {
    if mean_a < 0.0 || mean_b < 0.0 {
        return Err(Error::InvalidArgument("negative mean photon number".into()));
    }
    let n = det.bins();
    let one = |mu: f64| -> Vec<f64> {
        let q = -(-det.efficiency() * mu / n as f64).exp_m1();
        (0..=n)
            .map(|k| binomial(n, k) * q.powi(k as i32) * (1.0 - q).powi((n - k) as i32))
            .collect()
    };
    let pa = one(mean_a);
    let pb = one(mean_b);
    let mut table = vec![0.0; (n + 1) * (n + 1)];
    for (k, &a) in pa.iter().enumerate() {
        for (l, &b) in pb.iter().enumerate() {
            table[k * (n + 1) + l] = a * b;
        }
    }
    JointClickStatistics::from_probabilities(n, table, None)
}

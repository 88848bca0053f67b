//! Click-counting combinatorics: joint click probabilities, normally
//! ordered pi-moments, nonlinear Stokes moments, and the moment-matrix
//! nonclassicality witnesses.
//!
//! Conventions: N bins per arm, pi = 1 - <: exp(-eta n / N) :> is the
//! single-bin no-click complement, S_NL = N (pi_A - pi_B) and
//! S_0NL = N (pi_A + pi_B). All moment arrays are indexed by the pair
//! (j_A, j_B) with 0 <= j <= N; orders above N are refused because N bins
//! cannot resolve them.

use crate::error::{Error, Result};
use crate::gaussian::nexp_table;
use crate::math::{binomial, symmetric_min_eigenvalue, CompensatedDot};
use crate::polarization::{BellStateParams, DetectorConfig, MeasurementSetting};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StatisticsKind {
    Probability,
    EmpiricalFrequency,
}

/// (N+1) x (N+1) table of joint click probabilities or frequencies.
#[derive(Debug, Clone)]
pub struct JointClickStatistics {
    bins: usize,
    table: Vec<f64>,
    kind: StatisticsKind,
    shots: Option<u64>,
}

impl JointClickStatistics {
    /// Probability table; small negative roundoff is clamped to zero and the
    /// total must be 1 to within 1e-9. `shots` may carry a nominal sample
    /// size for covariance propagation.
    ///
    /// Entries in [-1e-12, 0) are ordinary roundoff of the alternating
    /// click sums; anything below -1e-12 means the inputs left the
    /// trustworthy numeric regime and is refused.
    pub fn from_probabilities(bins: usize, mut table: Vec<f64>, shots: Option<u64>) -> Result<Self> {
        Self::check_dims(bins, &table)?;
        for v in &mut table {
            if *v < 0.0 {
                if *v < -1e-12 {
                    return Err(Error::NumericDegeneracy(format!(
                        "probability entry {v} below -1e-12"
                    )));
                }
                *v = 0.0;
            }
        }
        let total: f64 = table.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::NumericDegeneracy(format!(
                "probability table sums to {total}, expected 1"
            )));
        }
        Ok(Self { bins, table, kind: StatisticsKind::Probability, shots })
    }

    /// Empirical frequency table from counts; `shots` is the total count.
    pub fn from_counts(bins: usize, counts: &[u64]) -> Result<Self> {
        let shots: u64 = counts.iter().sum();
        if shots == 0 {
            return Err(Error::InsufficientData("empty counts table".into()));
        }
        let table: Vec<f64> = counts.iter().map(|&c| c as f64 / shots as f64).collect();
        Self::check_dims(bins, &table)?;
        Ok(Self { bins, table, kind: StatisticsKind::EmpiricalFrequency, shots: Some(shots) })
    }

    pub fn from_frequencies(bins: usize, table: Vec<f64>, shots: Option<u64>) -> Result<Self> {
        Self::check_dims(bins, &table)?;
        if table.iter().any(|&v| v < 0.0) {
            return Err(Error::InvalidArgument("negative frequency".into()));
        }
        Ok(Self { bins, table, kind: StatisticsKind::EmpiricalFrequency, shots })
    }

    fn check_dims(bins: usize, table: &[f64]) -> Result<()> {
        let expected = (bins + 1) * (bins + 1);
        if table.len() != expected {
            return Err(Error::DimensionMismatch { expected, got: table.len() });
        }
        Ok(())
    }

    pub fn bins(&self) -> usize {
        self.bins
    }

    pub fn kind(&self) -> StatisticsKind {
        self.kind
    }

    pub fn shots(&self) -> Option<u64> {
        self.shots
    }

    /// Attach or replace the nominal sample size used for covariance
    /// propagation.
    pub fn with_shots(mut self, shots: u64) -> Self {
        self.shots = Some(shots);
        self
    }

    pub fn get(&self, k: usize, l: usize) -> f64 {
        self.table[k * (self.bins + 1) + l]
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }

    pub fn sum(&self) -> f64 {
        self.table.iter().sum()
    }

    /// Largest entrywise deviation from another table of the same size.
    pub fn max_abs_difference(&self, other: &JointClickStatistics) -> Result<f64> {
        if other.bins != self.bins {
            return Err(Error::DimensionMismatch {
                expected: self.bins,
                got: other.bins,
            });
        }
        Ok(self
            .table
            .iter()
            .zip(&other.table)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }
}

/// Normally ordered moments <: pi_A^jA pi_B^jB :> for 0 <= j <= N, with
/// optional estimator covariance from multinomial propagation.
#[derive(Debug, Clone)]
pub struct MomentSet {
    bins: usize,
    moments: Vec<f64>,
    covariance: Option<Vec<f64>>,
}

impl MomentSet {
    pub fn bins(&self) -> usize {
        self.bins
    }

    pub fn moment(&self, j_a: usize, j_b: usize) -> f64 {
        self.moments[j_a * (self.bins + 1) + j_b]
    }

    pub fn has_covariance(&self) -> bool {
        self.covariance.is_some()
    }

    /// Cov(m(a), m(b)) with flattened index pairs.
    pub fn covariance(&self, a: (usize, usize), b: (usize, usize)) -> Option<f64> {
        let dim = (self.bins + 1) * (self.bins + 1);
        let ia = a.0 * (self.bins + 1) + a.1;
        let ib = b.0 * (self.bins + 1) + b.1;
        self.covariance.as_ref().map(|c| c[ia * dim + ib])
    }
}

/// Index scheme of a moment matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MomentMatrixKind {
    /// Hankel matrix of <: S_NL^{k+l} :>, k, l = 0..N/2.
    SNlPowers,
    /// Rows/columns labeled by pairs (j_A, j_B) in {0..N/2}^2.
    PiIndexPairs,
}

/// Symmetric moment matrix with its minimum eigenvalue; a negative minimum
/// eigenvalue certifies nonclassicality.
#[derive(Debug, Clone)]
pub struct MomentMatrix {
    pub kind: MomentMatrixKind,
    pub dim: usize,
    pub entries: Vec<f64>,
    pub min_eigenvalue: f64,
    pub min_eigenvalue_sigma: Option<f64>,
}

impl MomentMatrix {
    pub fn entry(&self, r: usize, c: usize) -> f64 {
        self.entries[r * self.dim + c]
    }

    pub fn symmetry_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for r in 0..self.dim {
            for c in 0..self.dim {
                worst = worst.max((self.entry(r, c) - self.entry(c, r)).abs());
            }
        }
        worst
    }
}

/// Second-order witness value with optional delta-method uncertainty.
#[derive(Debug, Clone, Copy)]
pub struct Witness {
    pub value: f64,
    pub sigma: Option<f64>,
}

/// Joint click probabilities of the Bell state from the analytic engine:
/// c_{k,l} = sum_{i<=k, j<=l} (-1)^{i+j} C(N,k) C(k,i) C(N,l) C(l,j)
///           E(N-k+i, N-l+j).
pub fn click_probabilities_analytic(
    state: &BellStateParams,
    setting: &MeasurementSetting,
    det: &DetectorConfig,
) -> Result<JointClickStatistics> {
    let n = det.bins();
    let e = nexp_table(state, setting, det)?;
    let mut table = vec![0.0; (n + 1) * (n + 1)];
    for k in 0..=n {
        let cnk = binomial(n, k);
        for l in 0..=n {
            let cnl = binomial(n, l);
            let mut sum = CompensatedDot::new();
            for i in 0..=k {
                let wi = binomial(k, i) * if i % 2 == 0 { 1.0 } else { -1.0 };
                for j in 0..=l {
                    let wj = binomial(l, j) * if j % 2 == 0 { 1.0 } else { -1.0 };
                    let ev = e[n - k + i][n - l + j];
                    sum.add_product(wi * wj, ev.hi);
                    sum.add_product(wi * wj, ev.lo);
                }
            }
            table[k * (n + 1) + l] = cnk * cnl * sum.value();
        }
    }
    JointClickStatistics::from_probabilities(n, table, None)
}

/// All normally ordered pi-moments of the Bell state via the alternating
/// binomial sum over engine expectations.
///
/// The engine table is exchange-symmetric for this state family (any
/// setting, any phase), so the moment table is filled for j_A <= j_B and
/// mirrored; downstream odd-moment cancellations are then exact.
pub fn pi_moments_analytic(
    state: &BellStateParams,
    setting: &MeasurementSetting,
    det: &DetectorConfig,
) -> Result<MomentSet> {
    let n = det.bins();
    let e = nexp_table(state, setting, det)?;
    let mut moments = vec![0.0; (n + 1) * (n + 1)];
    for ja in 0..=n {
        for jb in ja..=n {
            let mut sum = CompensatedDot::new();
            for ka in 0..=ja {
                let wa = binomial(ja, ka) * if ka % 2 == 0 { 1.0 } else { -1.0 };
                for kb in 0..=jb {
                    let wb = binomial(jb, kb) * if kb % 2 == 0 { 1.0 } else { -1.0 };
                    let ev = e[ka][kb];
                    sum.add_product(wa * wb, ev.hi);
                    sum.add_product(wa * wb, ev.lo);
                }
            }
            let v = sum.value();
            moments[ja * (n + 1) + jb] = v;
            moments[jb * (n + 1) + ja] = v;
        }
    }
    Ok(MomentSet { bins: n, moments, covariance: None })
}

/// Moments directly from measured (or simulated) click statistics:
/// m(j, j') = sum_{k>=j, l>=j'} c_{k,l} C(k,j) C(l,j') / (C(N,j) C(N,j')).
///
/// When the table carries a shot count, the exact multinomial covariance of
/// the frequencies is pushed through this linear map and stored.
pub fn moments_from_statistics(
    stats: &JointClickStatistics,
    det: &DetectorConfig,
) -> Result<MomentSet> {
    let n = det.bins();
    if stats.bins() != n {
        return Err(Error::DimensionMismatch { expected: n, got: stats.bins() });
    }
    let dim = n + 1;
    // weights[(j, j'), (k, l)], nonzero for k >= j, l >= j'
    let weight = |j: usize, k: usize| binomial(k, j) / binomial(n, j);

    let mut moments = vec![0.0; dim * dim];
    for j in 0..=n {
        for jp in 0..=n {
            let mut acc = CompensatedDot::new();
            for k in j..=n {
                let wk = weight(j, k);
                for l in jp..=n {
                    acc.add_product(stats.get(k, l), wk * weight(jp, l));
                }
            }
            moments[j * dim + jp] = acc.value();
        }
    }

    let covariance = match stats.shots() {
        Some(shots) if shots > 0 => Some(moment_covariance(stats, det, shots, &moments)?),
        _ => None,
    };
    Ok(MomentSet { bins: n, moments, covariance })
}

/// Multinomial covariance of the moment estimators:
/// Cov(m_a, m_b) = (sum_i c_i T_{a,i} T_{b,i} - m_a m_b) / shots.
fn moment_covariance(
    stats: &JointClickStatistics,
    det: &DetectorConfig,
    shots: u64,
    moments: &[f64],
) -> Result<Vec<f64>> {
    let n = det.bins();
    if n > 32 {
        return Err(Error::InvalidArgument(
            "covariance propagation supported for bins <= 32".into(),
        ));
    }
    let dim = n + 1;
    let midx = dim * dim;
    let weight = |j: usize, k: usize| binomial(k, j) / binomial(n, j);

    let mut cov = vec![0.0; midx * midx];
    for a in 0..midx {
        let (ja, jpa) = (a / dim, a % dim);
        for b in a..midx {
            let (jb, jpb) = (b / dim, b % dim);
            let mut acc = 0.0;
            for k in ja.max(jb)..=n {
                let wk = weight(ja, k) * weight(jb, k);
                for l in jpa.max(jpb)..=n {
                    acc += stats.get(k, l) * wk * weight(jpa, l) * weight(jpb, l);
                }
            }
            let v = (acc - moments[a] * moments[b]) / shots as f64;
            cov[a * midx + b] = v;
            cov[b * midx + a] = v;
        }
    }
    Ok(cov)
}

/// <: S_NL^k :> for k = 0..=order from pi-moments:
/// N^k sum_i C(k,i) (-1)^{k-i} m(i, k-i).
pub fn s_nl_moments(m: &MomentSet, det: &DetectorConfig, order: usize) -> Result<Vec<f64>> {
    signed_click_sum(m, det, order, true)
}

/// <: S_0NL^k :>, same expansion with all-positive signs.
pub fn s0_nl_moments(m: &MomentSet, det: &DetectorConfig, order: usize) -> Result<Vec<f64>> {
    signed_click_sum(m, det, order, false)
}

fn signed_click_sum(
    m: &MomentSet,
    det: &DetectorConfig,
    order: usize,
    alternating: bool,
) -> Result<Vec<f64>> {
    let n = det.bins();
    if m.bins() != n {
        return Err(Error::DimensionMismatch { expected: n, got: m.bins() });
    }
    if order > n {
        return Err(Error::InsufficientData(format!(
            "moment order {order} exceeds the {n}-bin measurement content"
        )));
    }
    let mut out = Vec::with_capacity(order + 1);
    for k in 0..=order {
        let mut sum = CompensatedDot::new();
        for i in 0..=k {
            let sign = if alternating && (k - i) % 2 == 1 { -1.0 } else { 1.0 };
            sum.add_product(sign * binomial(k, i), m.moment(i, k - i));
        }
        out.push((n as f64).powi(k as i32) * sum.value());
    }
    Ok(out)
}

/// Normally ordered variance <: (Delta S_NL)^2 :>; negative certifies
/// nonlinear polarization squeezing. Uncertainty by the first-order delta
/// method when the moment set carries a covariance.
pub fn second_order_witness(m: &MomentSet, det: &DetectorConfig) -> Result<Witness> {
    let s = s_nl_moments(m, det, 2)?;
    let value = s[2] - s[1] * s[1];

    let sigma = if m.has_covariance() {
        let n = det.bins() as f64;
        // gradient of the witness w.r.t. the five contributing moments
        let grad: [((usize, usize), f64); 5] = [
            ((2, 0), n * n),
            ((0, 2), n * n),
            ((1, 1), -2.0 * n * n),
            ((1, 0), -2.0 * s[1] * n),
            ((0, 1), 2.0 * s[1] * n),
        ];
        let mut var = 0.0;
        for &(a, ga) in &grad {
            for &(b, gb) in &grad {
                var += ga * gb * m.covariance(a, b).unwrap();
            }
        }
        Some(var.max(0.0).sqrt())
    } else {
        None
    };
    Ok(Witness { value, sigma })
}

/// Hankel matrix M = (<: S_NL^{k+l} :>), k, l = 0..N/2.
pub fn moment_matrix_m(m: &MomentSet, det: &DetectorConfig) -> Result<MomentMatrix> {
    let n = det.bins();
    if n % 2 != 0 {
        return Err(Error::InvalidArgument(
            "moment matrix needs an even bin count".into(),
        ));
    }
    let s = s_nl_moments(m, det, n)?;
    let dim = n / 2 + 1;
    let mut entries = vec![0.0; dim * dim];
    for k in 0..dim {
        for l in 0..dim {
            entries[k * dim + l] = s[k + l];
        }
    }
    let min_eigenvalue = symmetric_min_eigenvalue(dim, &entries);
    Ok(MomentMatrix {
        kind: MomentMatrixKind::SNlPowers,
        dim,
        entries,
        min_eigenvalue,
        min_eigenvalue_sigma: None,
    })
}

/// M' = (<: pi_A^{jA+jA'} pi_B^{jB+jB'} :>) over index pairs
/// (j_A, j_B) in {0..N/2}^2; 25 x 25 for N = 8. Exhausts the full moment
/// content of the N-bin measurement.
pub fn moment_matrix_mprime(m: &MomentSet, det: &DetectorConfig) -> Result<MomentMatrix> {
    let n = det.bins();
    if n % 2 != 0 {
        return Err(Error::InvalidArgument(
            "moment matrix needs an even bin count".into(),
        ));
    }
    let half = n / 2;
    let dim = (half + 1) * (half + 1);
    let mut entries = vec![0.0; dim * dim];
    for ja in 0..=half {
        for jb in 0..=half {
            let r = ja * (half + 1) + jb;
            for jpa in 0..=half {
                for jpb in 0..=half {
                    let c = jpa * (half + 1) + jpb;
                    entries[r * dim + c] = m.moment(ja + jpa, jb + jpb);
                }
            }
        }
    }
    let min_eigenvalue = symmetric_min_eigenvalue(dim, &entries);
    Ok(MomentMatrix {
        kind: MomentMatrixKind::PiIndexPairs,
        dim,
        entries,
        min_eigenvalue,
        min_eigenvalue_sigma: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::coherent_click_statistics;
    use crate::polarization::compose_setting;

    const PI: f64 = std::f64::consts::PI;

    fn fit() -> (BellStateParams, DetectorConfig) {
        (
            BellStateParams::from_real(0.36, PI).unwrap(),
            DetectorConfig::new(8, 0.135).unwrap(),
        )
    }

    #[test]
    fn vacuum_probabilities_are_a_point_mass() {
        let det = DetectorConfig::new(8, 0.135).unwrap();
        let s = compose_setting(0.4, 0.2).unwrap();
        let c =
            click_probabilities_analytic(&BellStateParams::vacuum(), &s, &det).unwrap();
        assert_eq!(c.get(0, 0), 1.0);
        for k in 0..=8 {
            for l in 0..=8 {
                if (k, l) != (0, 0) {
                    assert_eq!(c.get(k, l), 0.0, "({k},{l})");
                }
            }
        }
    }

    #[test]
    fn zero_efficiency_never_clicks() {
        let (state, _) = fit();
        let det = DetectorConfig::new(8, 0.0).unwrap();
        let s = compose_setting(0.3, 0.1).unwrap();
        let c = click_probabilities_analytic(&state, &s, &det).unwrap();
        assert!((c.get(0, 0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn probabilities_normalize_at_fit_parameters() {
        let (state, det) = fit();
        for (q, h) in [(0.0, 0.0), (0.4, 0.0), (0.0, 0.9), (1.2, 0.7)] {
            let s = compose_setting(q, h).unwrap();
            let c = click_probabilities_analytic(&state, &s, &det).unwrap();
            assert!((c.sum() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn vacuum_moments_vanish() {
        let det = DetectorConfig::new(8, 0.135).unwrap();
        let s = compose_setting(0.2, 0.6).unwrap();
        let m = pi_moments_analytic(&BellStateParams::vacuum(), &s, &det).unwrap();
        assert_eq!(m.moment(0, 0), 1.0);
        for ja in 0..=8 {
            for jb in 0..=8 {
                if ja + jb >= 1 {
                    assert!(m.moment(ja, jb).abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn moment_range_and_monotonicity() {
        let (state, det) = fit();
        let s = compose_setting(0.35, 0.6).unwrap();
        let m = pi_moments_analytic(&state, &s, &det).unwrap();
        assert!((m.moment(0, 0) - 1.0).abs() < 1e-12);
        for ja in 0..=8 {
            for jb in 0..=8 {
                let v = m.moment(ja, jb);
                assert!((-1e-12..=1.0 + 1e-12).contains(&v), "({ja},{jb}) = {v}");
                if ja < 8 {
                    assert!(m.moment(ja + 1, jb) <= v + 1e-12);
                }
                if jb < 8 {
                    assert!(m.moment(ja, jb + 1) <= v + 1e-12);
                }
            }
        }
    }

    /// Fixture from the Fock oracle at the paper's fit parameters.
    #[test]
    fn fit_moment_fixtures() {
        let (state, det) = fit();
        let s = compose_setting(0.0, 0.0).unwrap();
        let m = pi_moments_analytic(&state, &s, &det).unwrap();
        assert!((m.moment(1, 1) - 5.451_164_909_908_712e-5).abs() < 1e-15);
        assert!((m.moment(1, 0) - 2.506_340_341_994_706e-3).abs() < 1e-14);
    }

    #[test]
    fn moment_11_consistent_with_click_average() {
        let (state, det) = fit();
        let s = compose_setting(0.0, 0.0).unwrap();
        let m = pi_moments_analytic(&state, &s, &det).unwrap();
        let c = click_probabilities_analytic(&state, &s, &det).unwrap();
        let mut avg = 0.0;
        for k in 0..=8 {
            for l in 0..=8 {
                avg += c.get(k, l) * (k as f64 / 8.0) * (l as f64 / 8.0);
            }
        }
        assert!((m.moment(1, 1) - avg).abs() < 1e-10);
    }

    #[test]
    fn statistics_moments_trivial_tables() {
        let det = DetectorConfig::new(8, 0.135).unwrap();
        let mut point = vec![0.0; 81];
        point[0] = 1.0; // all mass at (0,0)
        let stats = JointClickStatistics::from_probabilities(8, point, None).unwrap();
        let m = moments_from_statistics(&stats, &det).unwrap();
        for ja in 0..=8 {
            for jb in 0..=8 {
                let expect = if (ja, jb) == (0, 0) { 1.0 } else { 0.0 };
                assert_eq!(m.moment(ja, jb), expect);
            }
        }

        let mut full = vec![0.0; 81];
        full[80] = 1.0; // all bins click in both arms
        let stats = JointClickStatistics::from_probabilities(8, full, None).unwrap();
        let m = moments_from_statistics(&stats, &det).unwrap();
        for ja in 0..=8 {
            for jb in 0..=8 {
                assert!((m.moment(ja, jb) - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn round_trip_identity() {
        let (state, det) = fit();
        for (q, h) in [(0.0, 0.0), (0.39, 0.0), (0.2, 0.5)] {
            let s = compose_setting(q, h).unwrap();
            let direct = pi_moments_analytic(&state, &s, &det).unwrap();
            let c = click_probabilities_analytic(&state, &s, &det).unwrap();
            let via_stats = moments_from_statistics(&c, &det).unwrap();
            for ja in 0..=8 {
                for jb in 0..=8 {
                    assert!(
                        (direct.moment(ja, jb) - via_stats.moment(ja, jb)).abs() < 1e-10,
                        "({ja},{jb})"
                    );
                }
            }
        }
    }

    #[test]
    fn s_nl_moment_basics_and_fixtures() {
        let (state, det) = fit();
        let s = compose_setting(0.0, 0.0).unwrap();
        let m = pi_moments_analytic(&state, &s, &det).unwrap();
        let snl = s_nl_moments(&m, &det, 2).unwrap();
        assert!((snl[0] - 1.0).abs() < 1e-12);
        // exchange-symmetric state: first moment vanishes
        assert!(snl[1].abs() < 1e-12);
        assert!((snl[2] - (-5.373_385_590_047_519e-3)).abs() < 1e-12);

        let s0 = s0_nl_moments(&m, &det, 1).unwrap();
        assert!((s0[0] - 1.0).abs() < 1e-12);
        assert!((s0[1] - 4.010_144_547_191_53e-2).abs() < 1e-12);
        // definition check: k = 1 total moment is N (m10 + m01)
        let direct = 8.0 * (m.moment(1, 0) + m.moment(0, 1));
        assert!((s0[1] - direct).abs() < 1e-14);
    }

    #[test]
    fn odd_moments_vanish_for_exchange_symmetric_states() {
        let (state, det) = fit();
        let state0 = BellStateParams::from_real(0.36, 0.0).unwrap();
        for st in [state, state0] {
            for (q, h) in [(0.0, 0.0), (0.39, 0.0), (0.0, 1.18), (0.52, 0.17)] {
                let s = compose_setting(q, h).unwrap();
                let m = pi_moments_analytic(&st, &s, &det).unwrap();
                let snl = s_nl_moments(&m, &det, 8).unwrap();
                for k in [1, 3, 5, 7] {
                    assert!(snl[k].abs() < 1e-12, "k={k}: {}", snl[k]);
                }
            }
        }
    }

    #[test]
    fn moment_order_above_bins_is_refused() {
        let (state, det) = fit();
        let s = compose_setting(0.0, 0.0).unwrap();
        let m = pi_moments_analytic(&state, &s, &det).unwrap();
        assert!(matches!(
            s_nl_moments(&m, &det, 9),
            Err(Error::InsufficientData(_))
        ));
    }

    #[test]
    fn witness_zero_for_vacuum_and_negative_at_fit() {
        let det = DetectorConfig::new(8, 0.135).unwrap();
        let s = compose_setting(0.0, 0.0).unwrap();

        let vac = pi_moments_analytic(&BellStateParams::vacuum(), &s, &det).unwrap();
        assert_eq!(second_order_witness(&vac, &det).unwrap().value, 0.0);

        let (state, _) = fit();
        let m = pi_moments_analytic(&state, &s, &det).unwrap();
        let w = second_order_witness(&m, &det).unwrap();
        assert!((w.value - (-5.373_385_590_047_519e-3)).abs() < 1e-12);
        assert!(w.sigma.is_none());
    }

    #[test]
    fn witness_nonnegative_for_coherent_light() {
        let det = DetectorConfig::new(8, 0.135).unwrap();
        for (a, b) in [(0.5, 0.5), (2.0, 0.7), (4.0, 1.3)] {
            let c = coherent_click_statistics(a, b, &det).unwrap();
            let m = moments_from_statistics(&c, &det).unwrap();
            let w = second_order_witness(&m, &det).unwrap();
            assert!(w.value >= -1e-10, "({a},{b}): {}", w.value);
        }
    }

    #[test]
    fn matrices_at_fit_parameters() {
        let (state, det) = fit();
        let s = compose_setting(0.0, 0.0).unwrap();
        let m = pi_moments_analytic(&state, &s, &det).unwrap();

        let mm = moment_matrix_m(&m, &det).unwrap();
        assert_eq!(mm.dim, 5);
        assert!(mm.symmetry_defect() < 1e-12);
        assert!((mm.min_eigenvalue - (-5.378_871_381_493_526e-3)).abs() < 1e-9);

        let mp = moment_matrix_mprime(&m, &det).unwrap();
        assert_eq!(mp.dim, 25);
        assert!(mp.symmetry_defect() < 1e-12);
        assert!((mp.min_eigenvalue - (-4.198_367_532_600_391e-5)).abs() < 1e-10);
    }

    #[test]
    fn vacuum_matrices_sit_on_the_boundary() {
        let det = DetectorConfig::new(8, 0.135).unwrap();
        let s = compose_setting(0.7, 0.1).unwrap();
        let m = pi_moments_analytic(&BellStateParams::vacuum(), &s, &det).unwrap();
        let mm = moment_matrix_m(&m, &det).unwrap();
        let mp = moment_matrix_mprime(&m, &det).unwrap();
        // rank-1 projector pattern: only the (0,0) entry is 1
        assert!(mm.min_eigenvalue.abs() < 1e-12);
        assert!(mp.min_eigenvalue.abs() < 1e-12);
        assert_eq!(mm.entry(0, 0), 1.0);
        assert_eq!(mp.entry(0, 0), 1.0);
    }

    #[test]
    fn odd_bins_rejected_for_matrices() {
        let state = BellStateParams::from_real(0.2, 0.0).unwrap();
        let det = DetectorConfig::new(7, 0.3).unwrap();
        let s = compose_setting(0.0, 0.0).unwrap();
        let m = pi_moments_analytic(&state, &s, &det).unwrap();
        assert!(moment_matrix_m(&m, &det).is_err());
        assert!(moment_matrix_mprime(&m, &det).is_err());
    }

    #[test]
    fn dimension_mismatch_detected() {
        let det8 = DetectorConfig::new(8, 0.135).unwrap();
        let det4 = DetectorConfig::new(4, 0.135).unwrap();
        let c = coherent_click_statistics(1.0, 1.0, &det8).unwrap();
        assert!(matches!(
            moments_from_statistics(&c, &det4),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn covariance_present_only_with_shots() {
        let det = DetectorConfig::new(8, 0.135).unwrap();
        let c = coherent_click_statistics(1.0, 1.0, &det).unwrap();
        assert!(!moments_from_statistics(&c, &det).unwrap().has_covariance());
        let c = c.with_shots(100_000);
        let m = moments_from_statistics(&c, &det).unwrap();
        assert!(m.has_covariance());
        let w = second_order_witness(&m, &det).unwrap();
        assert!(w.sigma.unwrap() > 0.0);
    }
}

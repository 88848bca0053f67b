//! Normally ordered exponential expectations for the macroscopic Bell state.
//!
//! The workhorse is `<: exp(-X_a n_A - X_d n_B) :>` for the wave-plate
//! transformed state, where n_A and n_B are the photon numbers of the two
//! detected modes. The coherent-state resolution of the normally ordered
//! exponential turns this into a Gaussian integral whose value is a ratio of
//! a scalar prefactor and a 4x4 determinant. That determinant factors as
//!
//!   det = (1 - X_a)(1 - X_d) * Q,
//!   Q   = 1 - L * [(2 - X_a - X_d) + X_a X_d (1 - 2 t (1-t)(1 + cos phi))]
//!         + L^2 (1 - X_a)(1 - X_d),
//!
//! with L = |lambda|^2 and t = |tau|^2, so
//!
//!   E(X_a, X_d) = (1 - L)^2 / Q.
//!
//! The factored form is used everywhere: it is finite at the X = 1 saturation
//! boundary where prefactor and raw determinant both vanish, it is positive
//! on the whole domain (Q >= (1-L)(1 - L(1-X_a)(1-X_d))), and it is
//! bit-exactly symmetric under swapping X_a and X_d, which lets downstream
//! moment sums cancel exactly where the state's arm-exchange symmetry says
//! they must. The raw 4x4 matrix is kept as [`QuadraticFormMatrix`] and the
//! two routes are cross-checked in tests.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::math::{complex_det4, Dd};
use crate::polarization::{BellStateParams, DetectorConfig, MeasurementSetting};

/// Absorption arguments X = eta * m / N for the two detected modes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NexpArgs {
    pub x_a: f64,
    pub x_d: f64,
}

impl NexpArgs {
    pub fn new(x_a: f64, x_d: f64) -> Result<Self> {
        for x in [x_a, x_d] {
            if !(0.0..=1.0).contains(&x) {
                return Err(Error::InvalidArgument(format!(
                    "absorption argument {x} outside [0, 1]"
                )));
            }
        }
        Ok(Self { x_a, x_d })
    }
}

/// The 4x4 quadratic-form matrix of the Gaussian integral, in the
/// continuous-X normalization. Row/column order: (measured A, other A,
/// other B, measured B); the off-diagonal lambda entries couple the two
/// squeezed pairs.
#[derive(Debug, Clone)]
pub struct QuadraticFormMatrix {
    pub entries: [[Complex64; 4]; 4],
    prefactor: f64,
}

impl QuadraticFormMatrix {
    pub fn new(state: &BellStateParams, setting: &MeasurementSetting, args: NexpArgs) -> Self {
        let (x_a, x_d) = (args.x_a, args.x_d);
        let tau = setting.tau;
        let rho = setting.rho;
        let t2 = tau.norm_sqr();
        let r2 = rho.norm_sqr();
        let lam = state.lambda().norm();
        let lt = ((1.0 - x_a) * (1.0 - x_d)).sqrt() * lam;
        let e = Complex64::from_polar(1.0, state.phi());
        let z = Complex64::new(0.0, 0.0);
        let re = |v: f64| Complex64::new(v, 0.0);

        let entries = [
            [re(1.0 - r2 * x_a), rho * tau.conj() * x_a, z, re(lt)],
            [rho.conj() * tau * x_a, re(1.0 - t2 * x_a), lt * e, z],
            [z, lt * e.conj(), re(1.0 - t2 * x_d), -rho.conj() * tau * x_d],
            [re(lt), z, -rho * tau.conj() * x_d, re(1.0 - r2 * x_d)],
        ];
        let lam_sq = state.lambda_sq();
        QuadraticFormMatrix {
            entries,
            prefactor: (1.0 - lam_sq) * (1.0 - lam_sq) * (1.0 - x_a) * (1.0 - x_d),
        }
    }

    pub fn determinant(&self) -> Complex64 {
        complex_det4(&self.entries)
    }

    /// E via the raw determinant; used to validate the factored route.
    /// Fails at the X = 1 boundary where the ratio degenerates to 0/0.
    pub fn expectation(&self) -> Result<f64> {
        let det = self.determinant();
        if det.im.abs() > 1e-12 {
            return Err(Error::NumericDegeneracy(format!(
                "determinant imaginary residue {} exceeds 1e-12",
                det.im
            )));
        }
        if det.re.abs() < 1e-300 {
            return Err(Error::NumericDegeneracy("determinant underflow".into()));
        }
        Ok(self.prefactor / det.re)
    }

    /// Largest deviation from the Hermitian block pattern.
    pub fn hermiticity_defect(&self) -> f64 {
        let m = &self.entries;
        let mut worst: f64 = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                worst = worst.max((m[i][j] - m[j][i].conj()).norm());
            }
        }
        worst
    }
}

/// Reduced determinant Q in double-double arithmetic, with every ingredient
/// symmetric in (x_a, x_d) at the bit level. The downstream alternating
/// sums amplify table rounding by ~3^(2N), so the extra precision is what
/// keeps click probabilities and the moment round-trip at their specified
/// tolerances.
fn reduced_determinant(lam_sq: f64, phi: f64, transmission_sq: f64, x_a: f64, x_d: f64) -> Dd {
    let t = transmission_sq;
    let g = 1.0 - 2.0 * t * (1.0 - t) * (1.0 + phi.cos());
    let one = Dd::from_f64(1.0);
    let sum_x = Dd::sum_of(x_a, x_d);
    let prod_x = Dd::product_of(x_a, x_d);
    // (1 - x_a)(1 - x_d) expanded so both factors enter symmetrically
    let survival = one.sub(sum_x).add(prod_x);
    let bracket = Dd::from_f64(2.0).sub(sum_x).add(prod_x.mul(Dd::from_f64(g)));
    let l = Dd::from_f64(lam_sq);
    let l_sq = Dd::product_of(lam_sq, lam_sq);
    one.sub(l.mul(bracket)).add(l_sq.mul(survival))
}

/// E(x_a, x_d) at double-double precision.
fn nexp_dd(lam_sq: f64, phi: f64, transmission_sq: f64, x_a: f64, x_d: f64) -> Result<Dd> {
    let q = reduced_determinant(lam_sq, phi, transmission_sq, x_a, x_d);
    if q.to_f64() < 1e-300 {
        return Err(Error::NumericDegeneracy(format!(
            "reduced determinant {} underflowed",
            q.to_f64()
        )));
    }
    let n = Dd::sum_of(1.0, -lam_sq);
    Ok(n.mul(n).div(q))
}

/// `<: exp(-x_a n_A - x_d n_B) :>` with continuous absorption arguments.
pub fn nexp_expectation_general(
    state: &BellStateParams,
    setting: &MeasurementSetting,
    x_a: f64,
    x_d: f64,
) -> Result<f64> {
    let args = NexpArgs::new(x_a, x_d)?;
    let lam_sq = state.lambda_sq();
    if lam_sq >= 1.0 {
        return Err(Error::InvalidState("|lambda| >= 1".into()));
    }
    let value = nexp_dd(lam_sq, state.phi(), setting.transmission_sq(), args.x_a, args.x_d)?
        .to_f64();
    debug_assert!((-1e-10..=1.0 + 1e-10).contains(&value));
    Ok(value.clamp(0.0, 1.0))
}

/// `E(m_a, m_b) = <: exp(-(eta m_a / N) n_A - (eta m_b / N) n_B) :>`.
pub fn nexp_expectation(
    state: &BellStateParams,
    setting: &MeasurementSetting,
    det: &DetectorConfig,
    m_a: usize,
    m_b: usize,
) -> Result<f64> {
    let n = det.bins();
    if m_a > n || m_b > n {
        return Err(Error::InvalidArgument(format!(
            "click index ({m_a}, {m_b}) exceeds bin count {n}"
        )));
    }
    let x_a = det.efficiency() * m_a as f64 / n as f64;
    let x_d = det.efficiency() * m_b as f64 / n as f64;
    nexp_expectation_general(state, setting, x_a, x_d)
}

/// Table of E(m_a, m_b) over the full click-index grid at double-double
/// precision; the moment and probability sums all consume this. Symmetric
/// by construction.
pub(crate) fn nexp_table(
    state: &BellStateParams,
    setting: &MeasurementSetting,
    det: &DetectorConfig,
) -> Result<Vec<Vec<Dd>>> {
    let n = det.bins();
    let lam_sq = state.lambda_sq();
    if lam_sq >= 1.0 {
        return Err(Error::InvalidState("|lambda| >= 1".into()));
    }
    let eta = det.efficiency();
    let mut table = vec![vec![Dd::default(); n + 1]; n + 1];
    for ma in 0..=n {
        for mb in ma..=n {
            let x_a = eta * ma as f64 / n as f64;
            let x_d = eta * mb as f64 / n as f64;
            let v = nexp_dd(lam_sq, state.phi(), setting.transmission_sq(), x_a, x_d)?;
            table[ma][mb] = v;
            table[mb][ma] = v;
        }
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polarization::compose_setting;

    fn fit_state(phi: f64) -> BellStateParams {
        BellStateParams::from_real(0.36, phi).unwrap()
    }

    #[test]
    fn normalization_is_exact() {
        let det = DetectorConfig::new(8, 0.135).unwrap();
        for phi in [0.0, std::f64::consts::PI, 1.3] {
            for (q, h) in [(0.0, 0.0), (0.3, 0.7), (1.1, 0.2)] {
                let s = compose_setting(q, h).unwrap();
                let e = nexp_expectation(&fit_state(phi), &s, &det, 0, 0).unwrap();
                assert!((e - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn vacuum_gives_unity_everywhere() {
        let det = DetectorConfig::new(8, 0.135).unwrap();
        let s = compose_setting(0.4, 0.9).unwrap();
        let vac = BellStateParams::vacuum();
        for ma in 0..=8 {
            for mb in 0..=8 {
                assert!((nexp_expectation(&vac, &s, &det, ma, mb).unwrap() - 1.0).abs() < 1e-14);
            }
        }
        // absorption boundary on vacuum
        assert!(
            (nexp_expectation_general(&vac, &s, 1.0, 0.3).unwrap() - 1.0).abs() < 1e-14
        );
    }

    /// Fock-oracle cross-checked fixture: identity setting admits the closed
    /// form (1-L)/(1 - L (1-x_a)(1-x_d)).
    #[test]
    fn general_args_match_fock_fixture() {
        let state = BellStateParams::from_real(0.2, 0.0).unwrap();
        let s = MeasurementSetting::identity();
        let e = nexp_expectation_general(&state, &s, 0.3, 0.1).unwrap();
        assert!((e - 0.984_817_398_440_705_8).abs() < 1e-14);
        let closed = (1.0 - 0.04) / (1.0 - 0.04 * 0.7 * 0.9);
        assert!((e - closed).abs() < 1e-14);
    }

    /// Frozen from the brute-force Fock pipeline at the fit parameters.
    #[test]
    fn fit_parameter_fixture() {
        let det = DetectorConfig::new(8, 0.135).unwrap();
        let s = compose_setting(0.0, 0.0).unwrap();
        let e = nexp_expectation(&fit_state(std::f64::consts::PI), &s, &det, 8, 8).unwrap();
        assert!((e - 0.963_866_052_562_326_7).abs() < 1e-12);
    }

    #[test]
    fn factored_and_raw_determinant_agree() {
        let det = DetectorConfig::new(8, 0.135).unwrap();
        for phi in [0.0, std::f64::consts::PI, 2.1] {
            let state = fit_state(phi);
            for (q, h) in [(0.0, 0.0), (0.35, 0.8), (1.2, 0.1)] {
                let s = compose_setting(q, h).unwrap();
                for (ma, mb) in [(1, 0), (3, 5), (8, 8), (2, 2)] {
                    let fast = nexp_expectation(&state, &s, &det, ma, mb).unwrap();
                    let args = NexpArgs::new(
                        det.efficiency() * ma as f64 / 8.0,
                        det.efficiency() * mb as f64 / 8.0,
                    )
                    .unwrap();
                    let raw = QuadraticFormMatrix::new(&state, &s, args).expectation().unwrap();
                    assert!(
                        (fast - raw).abs() < 1e-12,
                        "phi={phi} ({q},{h}) ({ma},{mb}): {fast} vs {raw}"
                    );
                }
            }
        }
    }

    #[test]
    fn quadratic_form_is_hermitian_and_factorizes_at_lambda_zero() {
        let s = compose_setting(0.7, 0.3).unwrap();
        let state = fit_state(1.0);
        let args = NexpArgs::new(0.1, 0.05).unwrap();
        let m = QuadraticFormMatrix::new(&state, &s, args);
        assert!(m.hermiticity_defect() < 1e-15);

        let vac = BellStateParams::vacuum();
        let mv = QuadraticFormMatrix::new(&vac, &s, args);
        // lambda = 0: determinant equals the product of the two 2x2 block
        // determinants, each of which reduces to 1 - X
        let d = mv.determinant();
        assert!((d.re - 0.9 * 0.95).abs() < 1e-12 && d.im.abs() < 1e-14);
    }

    #[test]
    fn monotone_in_each_index() {
        let det = DetectorConfig::new(8, 0.135).unwrap();
        let s = compose_setting(0.4, 0.17).unwrap();
        let state = fit_state(std::f64::consts::PI);
        let table = nexp_table(&state, &s, &det).unwrap();
        for ma in 0..8 {
            for mb in 0..=8 {
                assert!(table[ma + 1][mb].to_f64() <= table[ma][mb].to_f64() + 1e-15);
                assert!(table[mb][ma + 1].to_f64() <= table[mb][ma].to_f64() + 1e-15);
            }
        }
    }

    #[test]
    fn exchange_symmetric_bit_exactly() {
        let state = fit_state(0.0);
        let s = compose_setting(0.5236, 0.1745).unwrap();
        for (xa, xd) in [(0.1, 0.02), (0.7, 0.3), (0.999, 0.0)] {
            let a = nexp_expectation_general(&state, &s, xa, xd).unwrap();
            let b = nexp_expectation_general(&state, &s, xd, xa).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        let det = DetectorConfig::new(8, 0.135).unwrap();
        let s = compose_setting(0.0, 0.0).unwrap();
        let state = fit_state(0.0);
        assert!(nexp_expectation(&state, &s, &det, 9, 0).is_err());
        assert!(nexp_expectation_general(&state, &s, -0.1, 0.0).is_err());
        assert!(nexp_expectation_general(&state, &s, 0.0, 1.1).is_err());
        assert!(NexpArgs::new(f64::NAN, 0.0).is_err());
    }
}

//! Domain types for states, detectors, and wave-plate optics.
//!
//! The measurement basis is fixed by a quarter- and a half-wave plate; their
//! composite Jones matrix has the form [[tau, rho], [-rho*, tau*]], so the
//! effective beam-splitter coefficients (tau, rho) are the first row. The
//! Poincare direction follows the half-angle convention |tau| = cos(theta/2),
//! |rho| = sin(theta/2), azimuth arg(rho* tau).

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Macroscopic Bell state parameters: squeezing amplitude `lambda`
/// (|lambda| < 1) and the relative phase `phi` between the two
/// down-conversion pair amplitudes. `phi = 0` gives the symmetric state,
/// `phi = pi` the antisymmetric one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BellStateParams {
    lambda: Complex64,
    phi: f64,
}

impl BellStateParams {
    pub fn new(lambda: Complex64, phi: f64) -> Result<Self> {
        if !lambda.re.is_finite() || !lambda.im.is_finite() || !phi.is_finite() {
            return Err(Error::InvalidArgument("non-finite state parameter".into()));
        }
        if lambda.norm_sqr() >= 1.0 {
            return Err(Error::InvalidState(format!(
                "|lambda| = {} must be < 1 for a normalizable state",
                lambda.norm()
            )));
        }
        Ok(Self { lambda, phi: phi.rem_euclid(TAU) })
    }

    /// Real squeezing amplitude, the common case.
    pub fn from_real(lambda: f64, phi: f64) -> Result<Self> {
        Self::new(Complex64::new(lambda, 0.0), phi)
    }

    pub fn vacuum() -> Self {
        Self { lambda: Complex64::new(0.0, 0.0), phi: 0.0 }
    }

    pub fn lambda(&self) -> Complex64 {
        self.lambda
    }

    pub fn lambda_sq(&self) -> f64 {
        self.lambda.norm_sqr()
    }

    /// Relative phase reduced to [0, 2pi).
    pub fn phi(&self) -> f64 {
        self.phi
    }
}

/// Multiplexed click detector: `bins` time bins of equal intensity, overall
/// quantum efficiency `efficiency`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorConfig {
    bins: usize,
    efficiency: f64,
}

impl DetectorConfig {
    pub fn new(bins: usize, efficiency: f64) -> Result<Self> {
        if bins < 1 || bins > crate::math::MAX_BINS {
            return Err(Error::InvalidArgument(format!(
                "bins = {bins} outside supported range 1..={}",
                crate::math::MAX_BINS
            )));
        }
        if !(0.0..=1.0).contains(&efficiency) {
            return Err(Error::InvalidArgument(format!(
                "efficiency = {efficiency} outside [0, 1]"
            )));
        }
        Ok(Self { bins, efficiency })
    }

    pub fn bins(&self) -> usize {
        self.bins
    }

    pub fn efficiency(&self) -> f64 {
        self.efficiency
    }
}

/// A 2x2 Jones matrix, unitary to within 1e-12.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JonesMatrix {
    pub entries: [[Complex64; 2]; 2],
}

impl JonesMatrix {
    /// ||M M+ - I|| (max entry deviation).
    pub fn unitarity_defect(&self) -> f64 {
        let m = &self.entries;
        let mut worst: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                let dot = m[i][0] * m[j][0].conj() + m[i][1] * m[j][1].conj();
                let expect = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((dot - expect).norm());
            }
        }
        worst
    }

    pub fn determinant(&self) -> Complex64 {
        let m = &self.entries;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    /// Matrix product `self * rhs` (self applied after rhs).
    pub fn compose(&self, rhs: &JonesMatrix) -> JonesMatrix {
        let a = &self.entries;
        let b = &rhs.entries;
        let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        JonesMatrix { entries: out }
    }
}

/// Quarter-wave plate at angle `theta` (radians).
pub fn jones_qwp(theta: f64) -> Result<JonesMatrix> {
    if !theta.is_finite() {
        return Err(Error::InvalidArgument("non-finite QWP angle".into()));
    }
    let c = (2.0 * theta).cos();
    let s = (2.0 * theta).sin();
    let r = std::f64::consts::FRAC_1_SQRT_2;
    Ok(JonesMatrix {
        entries: [
            [Complex64::new(r, -c * r), Complex64::new(0.0, -s * r)],
            [Complex64::new(0.0, -s * r), Complex64::new(r, c * r)],
        ],
    })
}

/// Half-wave plate at angle `theta` (radians).
pub fn jones_hwp(theta: f64) -> Result<JonesMatrix> {
    if !theta.is_finite() {
        return Err(Error::InvalidArgument("non-finite HWP angle".into()));
    }
    let c = (2.0 * theta).cos();
    let s = (2.0 * theta).sin();
    Ok(JonesMatrix {
        entries: [
            [Complex64::new(0.0, -c), Complex64::new(0.0, -s)],
            [Complex64::new(0.0, -s), Complex64::new(0.0, c)],
        ],
    })
}

/// A resolved measurement setting: wave-plate angles, the effective
/// beam-splitter coefficients of the composite transform, and the projection
/// direction on the Poincare sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementSetting {
    pub qwp_angle: f64,
    pub hwp_angle: f64,
    pub tau: Complex64,
    pub rho: Complex64,
    pub direction: [f64; 3],
}

impl MeasurementSetting {
    /// Build a setting directly from beam-splitter coefficients
    /// (|tau|^2 + |rho|^2 must equal 1 to within 1e-9).
    pub fn from_coefficients(tau: Complex64, rho: Complex64) -> Result<Self> {
        let norm = tau.norm_sqr() + rho.norm_sqr();
        if !norm.is_finite() || (norm - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidArgument(format!(
                "|tau|^2 + |rho|^2 = {norm} must be 1"
            )));
        }
        Ok(Self {
            qwp_angle: f64::NAN,
            hwp_angle: f64::NAN,
            tau,
            rho,
            direction: poincare_direction(tau, rho),
        })
    }

    /// tau = 1, rho = 0: the measured modes are the untransformed H of arm A
    /// and V of arm B.
    pub fn identity() -> Self {
        Self::from_coefficients(Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0))
            .expect("identity coefficients are exactly normalized")
    }

    /// |tau|^2, the only setting dependence the Bell-state expectations have.
    pub fn transmission_sq(&self) -> f64 {
        self.tau.norm_sqr()
    }
}

/// Compose the wave plates (HWP applied after QWP, matching the beam path)
/// and extract coefficients and direction. Angles in radians.
pub fn compose_setting(qwp_angle: f64, hwp_angle: f64) -> Result<MeasurementSetting> {
    let composite = jones_hwp(hwp_angle)?.compose(&jones_qwp(qwp_angle)?);
    let tau = composite.entries[0][0];
    let rho = composite.entries[0][1];
    Ok(MeasurementSetting {
        qwp_angle,
        hwp_angle,
        tau,
        rho,
        direction: poincare_direction(tau, rho),
    })
}

/// e = (sin t cos p, sin t sin p, cos t) with t = 2 atan2(|rho|, |tau|)
/// and p = arg(rho* tau); the atan2 form stays accurate at the poles.
fn poincare_direction(tau: Complex64, rho: Complex64) -> [f64; 3] {
    let theta = 2.0 * rho.norm().atan2(tau.norm());
    let phase = if rho.norm() > 1e-15 { (rho.conj() * tau).arg() } else { 0.0 };
    [theta.sin() * phase.cos(), theta.sin() * phase.sin(), theta.cos()]
}

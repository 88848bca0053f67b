//! Noise robustness of the linear vs nonlinear squeezing criteria.
//!
//! Probe: a single photon polarized at polar angle theta, convolved with a
//! symmetric thermal background of nbar mean photons per mode; quantum
//! efficiency is fixed at 1 so noise, not loss, is what is compared. The
//! nonlinear moments are computed twice, from the printed closed forms and
//! from the thermal input-output rules applied to the exact single-photon
//! expectations, and the two routes are required to agree.

use crate::error::{Error, Result};

/// Polarized single photon on a thermal background, measured with N bins.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoisySingleProbe {
    pub theta: f64,
    pub nbar: f64,
    pub bins: usize,
}

impl NoisySingleProbe {
    pub fn new(theta: f64, nbar: f64, bins: usize) -> Result<Self> {
        if !theta.is_finite() || !nbar.is_finite() || nbar < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "bad probe parameters theta={theta}, nbar={nbar}"
            )));
        }
        if bins < 1 {
            return Err(Error::InvalidArgument("bins must be >= 1".into()));
        }
        Ok(Self { theta, nbar, bins })
    }
}

/// Noisy linear Stokes variance <:(Delta S_L)^2:> = 4 nbar - cos^2 theta.
/// Negative values certify linear polarization squeezing.
pub fn linear_noisy_variance(probe: &NoisySingleProbe) -> f64 {
    4.0 * probe.nbar - probe.theta.cos() * probe.theta.cos()
}

/// First and second normally ordered moments of S_NL under noise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoisyMoments {
    pub mean: f64,
    pub second_moment: f64,
}

impl NoisyMoments {
    pub fn variance(&self) -> f64 {
        self.second_moment - self.mean * self.mean
    }
}

/// Printed closed forms: mean = cos(theta) / (1 + nbar/N)^2 and the
/// two-bracket second moment. The second moment is theta-independent
/// because the probe carries exactly one photon in total.
pub fn nonlinear_noisy_moments_closed(probe: &NoisySingleProbe) -> NoisyMoments {
    let n = probe.bins as f64;
    let nb = probe.nbar;
    let mean = probe.theta.cos() / ((1.0 + nb / n) * (1.0 + nb / n));
    let b2 = 1.0 + 2.0 * nb / n;
    let b1 = 1.0 + nb / n;
    let second_moment =
        2.0 * n * (n + 2.0 * nb - 1.0) / (b2 * b2) - 2.0 * n * (n + nb - 1.0) / (b1 * b1 * b1);
    NoisyMoments { mean, second_moment }
}

/// Same moments assembled from the input-output machinery: the exact
/// single-photon expectations <:exp(-u n):> = 1 - u cos^2(theta/2) (and the
/// sin^2 partner) pushed through the thermal exponential rule, with the
/// cross term using that the probe holds exactly one photon in total.
pub fn nonlinear_noisy_moments_io(probe: &NoisySingleProbe) -> Result<NoisyMoments> {
    let n = probe.bins as f64;
    let nb = probe.nbar;
    let half = probe.theta / 2.0;
    let ca = half.cos() * half.cos();
    let sa = half.sin() * half.sin();

    let z1 = 1.0 / n;
    let z2 = 2.0 / n;
    let ea = noisy_exp_moment(z1, nb, |u| 1.0 - u * ca)?;
    let eb = noisy_exp_moment(z1, nb, |u| 1.0 - u * sa)?;
    let mean = n * (eb - ea);

    let ea2 = noisy_exp_moment(z2, nb, |u| 1.0 - u * ca)?;
    let eb2 = noisy_exp_moment(z2, nb, |u| 1.0 - u * sa)?;
    // two independent thermal modes: the rule applies once per mode
    let cross = noisy_exp_moment(z1, nb, |u| {
        (1.0 - u) / (1.0 + nb * z1)
    })?;
    let second_moment = n * n * (ea2 + eb2 - 2.0 * cross);
    Ok(NoisyMoments { mean, second_moment })
}

/// Closed-form moments, cross-validated against the input-output route to
/// 1e-9 on every call.
pub fn nonlinear_noisy_moments(probe: &NoisySingleProbe) -> Result<NoisyMoments> {
    let closed = nonlinear_noisy_moments_closed(probe);
    let io = nonlinear_noisy_moments_io(probe)?;
    if (closed.mean - io.mean).abs() > 1e-9
        || (closed.second_moment - io.second_moment).abs() > 1e-9
    {
        return Err(Error::NumericDegeneracy(format!(
            "closed-form and input-output noisy moments disagree: {closed:?} vs {io:?}"
        )));
    }
    Ok(closed)
}

/// Noisy nonlinear variance <:(Delta S_NL)^2:>_nbar.
pub fn nonlinear_noisy_variance(probe: &NoisySingleProbe) -> Result<f64> {
    Ok(nonlinear_noisy_moments(probe)?.variance())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Criterion {
    Linear,
    Nonlinear,
}

/// Largest thermal occupation at which the criterion still certifies the
/// probe, i.e. the root of the noisy variance in nbar.
///
/// The linear root is analytic (cos^2 theta / 4); the nonlinear one is
/// bracketed on [0, 10] and bisected to 1e-6.
pub fn noise_threshold(criterion: Criterion, theta: f64, bins: usize) -> Result<f64> {
    let cos = theta.cos();
    if cos.abs() < 1e-12 {
        return Err(Error::NoThreshold(
            "no squeezing along a direction orthogonal to the probe".into(),
        ));
    }
    match criterion {
        Criterion::Linear => Ok(cos * cos / 4.0),
        Criterion::Nonlinear => {
            let f = |nbar: f64| -> Result<f64> {
                nonlinear_noisy_variance(&NoisySingleProbe::new(theta, nbar, bins)?)
            };
            let (mut lo, mut hi) = (0.0, 10.0);
            let f_lo = f(lo)?;
            let f_hi = f(hi)?;
            if !(f_lo < 0.0 && f_hi > 0.0) {
                return Err(Error::NoThreshold(format!(
                    "variance does not change sign on [0, 10]: f(0)={f_lo}, f(10)={f_hi}"
                )));
            }
            while hi - lo > 1e-6 {
                let mid = 0.5 * (lo + hi);
                if f(mid)? <= 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            Ok(0.5 * (lo + hi))
        }
    }
}

/// Thermal input-output rule for normally ordered exponentials:
/// <:exp(-z n):> maps to <:exp(-z' n):> / (1 + nbar z), z' = z/(1 + nbar z).
/// `nexp` evaluates the noiseless expectation at an arbitrary argument.
pub fn noisy_exp_moment(z: f64, nbar: f64, nexp: impl Fn(f64) -> f64) -> Result<f64> {
    let denom = 1.0 + nbar * z;
    if denom <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "exponential rule needs z*nbar > -1, got z={z}, nbar={nbar}"
        )));
    }
    Ok(nexp(z / denom) / denom)
}

/// Thermal rule for the mean photon number: n maps to n + nbar.
pub fn noisy_mean_photon(mean: f64, nbar: f64) -> f64 {
    mean + nbar
}

/// Thermal rule for the normally ordered square:
/// <:n^2:> maps to <:n^2:> + 4 nbar <n> + 2 nbar^2.
pub fn noisy_normally_ordered_square(norm_sq: f64, mean: f64, nbar: f64) -> f64 {
    norm_sq + 4.0 * nbar * mean + 2.0 * nbar * nbar
}

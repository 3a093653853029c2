//! Achievable rates, the secrecy rate, and the coefficient matrices of its
//! quadratic-ratio form.
//!
//! With precoder `v`, AN projection `P` (normalizer `alpha`) and power
//! profile `(P_s, beta1, beta2, sigma^2)`, the rate toward direction `theta`
//! is
//!
//! ```text
//! R(theta) = log2(1 + beta1^2 P_s |h^H v|^2
//!                     / (sigma^2 + alpha^2 beta2^2 P_s h^H P P^H h))
//! ```
//!
//! and the secrecy rate is `max(0, R(theta_d) - R(theta_e))`. The same
//! difference can be written as `log2([v^H(H_d+A_d I)v / v^H(H_e+A_e I)v] B)`
//! with scalars `A_d`, `A_e`, `B` ([`RateCoefficients`]), or — for fixed
//! `v` — as a product of two trace ratios in `P` with the matrices of
//! [`AnCoefficients`]. All routes are exposed so they can be checked
//! against each other.

use crate::array_channel::{ArrayConfig, Scenario};
use crate::{CMatrix, CVector, Error, Result};

/// Total transmit power, power-allocation split and noise variance.
///
/// `beta1` weights the confidential stream, `beta2` the artificial noise,
/// with `beta1^2 + beta2^2 = 1`. The same noise variance applies to every
/// receiver. SNR means `P_s / sigma^2` throughout.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerProfile {
    total_power: f64,
    beta1: f64,
    beta2: f64,
    noise_var: f64,
}

impl PowerProfile {
    pub fn new(total_power: f64, beta1: f64, beta2: f64, noise_var: f64) -> Result<Self> {
        if !(total_power > 0.0) || !total_power.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "total power must be positive and finite, got {total_power}"
            )));
        }
        if !(noise_var > 0.0) || !noise_var.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "noise variance must be positive and finite, got {noise_var}"
            )));
        }
        if !(beta1 > 0.0 && beta1 <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "confidential-stream PA factor must lie in (0, 1], got {beta1}"
            )));
        }
        if !(beta2 >= 0.0 && beta2 < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "AN PA factor must lie in [0, 1), got {beta2}"
            )));
        }
        let split = beta1 * beta1 + beta2 * beta2;
        if (split - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidConfig(format!(
                "PA factors must satisfy beta1^2 + beta2^2 = 1, got {split}"
            )));
        }
        Ok(Self {
            total_power,
            beta1,
            beta2,
            noise_var,
        })
    }

    /// Build from the squared PA factors, as configs state them.
    pub fn from_power_split(
        total_power: f64,
        beta1_sq: f64,
        beta2_sq: f64,
        noise_var: f64,
    ) -> Result<Self> {
        if beta1_sq < 0.0 || beta2_sq < 0.0 {
            return Err(Error::InvalidConfig(
                "squared PA factors must be nonnegative".into(),
            ));
        }
        Self::new(total_power, beta1_sq.sqrt(), beta2_sq.sqrt(), noise_var)
    }

    /// Unit noise variance with `P_s = 10^(snr_db/10)`.
    pub fn from_snr_db(snr_db: f64, beta1_sq: f64, beta2_sq: f64) -> Result<Self> {
        Self::from_power_split(10f64.powf(snr_db / 10.0), beta1_sq, beta2_sq, 1.0)
    }

    pub fn total_power(&self) -> f64 {
        self.total_power
    }

    pub fn beta1(&self) -> f64 {
        self.beta1
    }

    pub fn beta2(&self) -> f64 {
        self.beta2
    }

    pub fn noise_var(&self) -> f64 {
        self.noise_var
    }

    pub fn snr_linear(&self) -> f64 {
        self.total_power / self.noise_var
    }

    pub fn snr_db(&self) -> f64 {
        10.0 * self.snr_linear().log10()
    }

    /// Whether any power is allocated to artificial noise.
    pub fn an_enabled(&self) -> bool {
        self.beta2 > 0.0
    }
}

/// Unit-norm transmit beamforming vector for the confidential stream.
#[derive(Debug, Clone, PartialEq)]
pub struct Precoder {
    vector: CVector,
}

impl Precoder {
    /// Normalizes the given vector; the zero vector is rejected.
    pub fn new(vector: CVector) -> Result<Self> {
        if vector.is_empty() {
            return Err(Error::InvalidArgument("precoder must be non-empty".into()));
        }
        let norm = vector.norm();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::InvalidArgument(
                "precoder must have a positive finite norm".into(),
            ));
        }
        Ok(Self {
            vector: vector.unscale(norm),
        })
    }

    pub fn as_vector(&self) -> &CVector {
        &self.vector
    }

    pub fn len(&self) -> usize {
        self.vector.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vector.is_empty()
    }
}

/// AN projection matrix `P` of shape `N x (N-1)` with its normalizer.
///
/// `alpha` is always recomputed as `1/sqrt(tr(P P^H))` so that
/// `alpha^2 tr(P P^H) = 1`; a zero matrix (AN disabled) gets `alpha = 1`
/// by convention.
#[derive(Debug, Clone, PartialEq)]
pub struct AnProjection {
    matrix: CMatrix,
    alpha: f64,
}

impl AnProjection {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        let n = matrix.nrows();
        if n < 2 || matrix.ncols() != n - 1 {
            return Err(Error::InvalidArgument(format!(
                "AN projection must be N x (N-1) with N >= 2, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let fro = matrix.norm();
        if !fro.is_finite() {
            return Err(Error::InvalidArgument(
                "AN projection entries must be finite".into(),
            ));
        }
        let alpha = if fro > 0.0 { fro.recip() } else { 1.0 };
        Ok(Self { matrix, alpha })
    }

    /// Reshape `w = vec(P)` (column-major) back into an `n x (n-1)` matrix.
    pub fn from_stacked_columns(w: &CVector, n: usize) -> Result<Self> {
        if n < 2 || w.len() != n * (n - 1) {
            return Err(Error::InvalidArgument(format!(
                "stacked-column vector of length {} does not match {n} x {}",
                w.len(),
                n.saturating_sub(1)
            )));
        }
        Self::new(CMatrix::from_column_slice(n, n - 1, w.as_slice()))
    }

    /// `vec(P)`: the columns stacked into one vector.
    pub fn stacked_columns(&self) -> CVector {
        CVector::from_column_slice(self.matrix.as_slice())
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn num_antennas(&self) -> usize {
        self.matrix.nrows()
    }
}

/// `h(theta)^H P P^H h(theta)`: the un-scaled AN power factor along `theta`.
///
/// Nonnegative real; zero exactly when every column of `P` is orthogonal to
/// the steering vector.
pub fn an_power_at(array: &ArrayConfig, theta: f64, an: &AnProjection) -> Result<f64> {
    if an.num_antennas() != array.num_elements() {
        return Err(Error::InvalidArgument(format!(
            "AN projection has {} rows but the array has {} elements",
            an.num_antennas(),
            array.num_elements()
        )));
    }
    let h = array.steering_vector(theta);
    Ok((an.matrix.adjoint() * h.as_vector()).norm_squared())
}

fn check_precoder(array: &ArrayConfig, v: &Precoder) -> Result<()> {
    if v.len() != array.num_elements() {
        return Err(Error::InvalidArgument(format!(
            "precoder has {} entries but the array has {} elements",
            v.len(),
            array.num_elements()
        )));
    }
    Ok(())
}

/// Achievable rate toward `theta` in bits/s/Hz.
pub fn rate_at(
    array: &ArrayConfig,
    theta: f64,
    v: &Precoder,
    an: &AnProjection,
    p: &PowerProfile,
) -> Result<f64> {
    check_precoder(array, v)?;
    let h = array.steering_vector(theta);
    let gain = h.as_vector().dotc(v.as_vector()).norm_sqr();
    let signal = p.beta1() * p.beta1() * p.total_power() * gain;
    let an_term = if p.an_enabled() {
        let g = an_power_at(array, theta, an)?;
        an.alpha() * an.alpha() * p.beta2() * p.beta2() * p.total_power() * g
    } else {
        0.0
    };
    Ok((1.0 + signal / (p.noise_var() + an_term)).log2())
}

/// Unclamped rate difference `R(theta_d) - R(theta_e)`.
pub fn rate_difference(
    scenario: &Scenario,
    v: &Precoder,
    an: &AnProjection,
    p: &PowerProfile,
) -> Result<f64> {
    let rd = rate_at(scenario.array(), scenario.theta_d(), v, an, p)?;
    let re = rate_at(scenario.array(), scenario.theta_e(), v, an, p)?;
    Ok(rd - re)
}

/// Secrecy rate `max(0, R(theta_d) - R(theta_e))`.
pub fn secrecy_rate(
    scenario: &Scenario,
    v: &Precoder,
    an: &AnProjection,
    p: &PowerProfile,
) -> Result<f64> {
    Ok(rate_difference(scenario, v, an, p)?.max(0.0))
}

/// Scalars of the precoder-side quadratic form of the rate difference:
/// `R_d - R_e = log2([v^H(H_d + a_d I)v / v^H(H_e + a_e I)v] * b)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateCoefficients {
    /// Shift on the desired channel's Gram matrix.
    pub a_d: f64,
    /// Shift on the eavesdropper channel's Gram matrix.
    pub a_e: f64,
    /// Precoder-independent AN ratio; 1 when AN is disabled.
    pub b: f64,
}

/// Coefficients of the rate difference as a function of the precoder, with
/// the AN projection held fixed.
pub fn rate_coefficients(
    scenario: &Scenario,
    an: &AnProjection,
    p: &PowerProfile,
) -> Result<RateCoefficients> {
    let noise_over_signal = p.noise_var() / (p.beta1() * p.beta1() * p.total_power());
    if !p.an_enabled() {
        return Ok(RateCoefficients {
            a_d: noise_over_signal,
            a_e: noise_over_signal,
            b: 1.0,
        });
    }
    let g_d = an_power_at(scenario.array(), scenario.theta_d(), an)?;
    let g_e = an_power_at(scenario.array(), scenario.theta_e(), an)?;
    let alpha_sq = an.alpha() * an.alpha();
    let beta_ratio = (p.beta2() * p.beta2()) / (p.beta1() * p.beta1());
    let an_noise = p.noise_var() / (alpha_sq * p.beta2() * p.beta2() * p.total_power());
    Ok(RateCoefficients {
        a_d: alpha_sq * beta_ratio * g_d + noise_over_signal,
        a_e: alpha_sq * beta_ratio * g_e + noise_over_signal,
        b: (g_e + an_noise) / (g_d + an_noise),
    })
}

/// Rate difference evaluated through the [`RateCoefficients`] quadratic
/// form. Algebraically identical to [`rate_difference`]; kept as a second
/// route for cross-checks and for the precoder subproblem.
pub fn rate_difference_quadratic(
    scenario: &Scenario,
    v: &Precoder,
    an: &AnProjection,
    p: &PowerProfile,
) -> Result<f64> {
    check_precoder(scenario.array(), v)?;
    let coeff = rate_coefficients(scenario, an, p)?;
    let t_d = scenario.h_d().as_vector().dotc(v.as_vector()).norm_sqr();
    let t_e = scenario.h_e().as_vector().dotc(v.as_vector()).norm_sqr();
    Ok((((t_d + coeff.a_d) / (t_e + coeff.a_e)) * coeff.b).log2())
}

/// Hermitian matrices of the AN-side trace-ratio form of the rate
/// difference (precoder fixed):
/// `R_d - R_e = log2([tr(P^H B_d P)/tr(P^H B_e P)] [tr(P^H C_e P)/tr(P^H C_d P)])`.
#[derive(Debug, Clone, PartialEq)]
pub struct AnCoefficients {
    pub b_d: CMatrix,
    pub b_e: CMatrix,
    pub c_d: CMatrix,
    pub c_e: CMatrix,
}

/// Coefficients of the rate difference as a function of the AN projection,
/// with the precoder held fixed. Requires AN to be enabled.
pub fn an_coefficients(
    scenario: &Scenario,
    v: &Precoder,
    p: &PowerProfile,
) -> Result<AnCoefficients> {
    if !p.an_enabled() {
        return Err(Error::InvalidConfig(
            "AN coefficient matrices are undefined when beta2 = 0".into(),
        ));
    }
    check_precoder(scenario.array(), v)?;
    let n = scenario.num_elements();
    let beta1_sq = p.beta1() * p.beta1();
    let beta2_sq = p.beta2() * p.beta2();
    let noise_over_signal = p.noise_var() / (beta1_sq * p.total_power());
    let noise_over_an = p.noise_var() / (beta2_sq * p.total_power());

    let t_d = scenario.h_d().as_vector().dotc(v.as_vector()).norm_sqr();
    let t_e = scenario.h_e().as_vector().dotc(v.as_vector()).norm_sqr();

    let identity = CMatrix::identity(n, n);
    let gram_d = scenario.gram_d();
    let gram_e = scenario.gram_e();

    let b_d = gram_d.scale(beta2_sq / beta1_sq) + identity.scale(noise_over_signal + t_d);
    let b_e = gram_e.scale(beta2_sq / beta1_sq) + identity.scale(noise_over_signal + t_e);
    let c_d = &gram_d + identity.scale(noise_over_an);
    let c_e = &gram_e + identity.scale(noise_over_an);

    Ok(AnCoefficients { b_d, b_e, c_d, c_e })
}

/// Rate difference evaluated through the [`AnCoefficients`] trace ratios.
/// Third algebraic route, used to validate the AN subproblem objective.
pub fn rate_difference_trace_form(
    scenario: &Scenario,
    v: &Precoder,
    an: &AnProjection,
    p: &PowerProfile,
) -> Result<f64> {
    let coeff = an_coefficients(scenario, v, p)?;
    let quad = |m: &CMatrix| -> f64 {
        let pm = m * an.matrix();
        an.matrix()
            .column_iter()
            .zip(pm.column_iter())
            .map(|(pc, mc)| pc.dotc(&mc).re)
            .sum()
    };
    let ratio1 = quad(&coeff.b_d) / quad(&coeff.b_e);
    let ratio2 = quad(&coeff.c_e) / quad(&coeff.c_d);
    Ok((ratio1 * ratio2).log2())
}

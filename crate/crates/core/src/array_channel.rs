//! Uniform-linear-array steering vectors and rank-1 channel Gram matrices.
//!
//! The array is phase-referenced to its physical center, so the phase of
//! element `n` (1-based) toward direction `theta` is
//! `-(n - (N+1)/2) * (d/lambda) * cos(theta)` cycles. Steering vectors carry
//! the `1/sqrt(N)` normalization, making them unit-norm.

use std::f64::consts::PI;

use crate::{C64, CMatrix, CVector, Error, Result};

/// Geometry of a uniformly spaced linear array.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArrayConfig {
    num_elements: usize,
    spacing_over_wavelength: f64,
}

impl ArrayConfig {
    /// Standard half-wavelength element spacing.
    pub const HALF_WAVELENGTH: f64 = 0.5;

    pub fn new(num_elements: usize, spacing_over_wavelength: f64) -> Result<Self> {
        if num_elements < 2 {
            return Err(Error::InvalidConfig(format!(
                "array needs at least 2 elements, got {num_elements}"
            )));
        }
        if !(spacing_over_wavelength > 0.0) || !spacing_over_wavelength.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "element spacing must be a positive finite fraction of the wavelength, \
                 got {spacing_over_wavelength}"
            )));
        }
        Ok(Self {
            num_elements,
            spacing_over_wavelength,
        })
    }

    /// Array with the default d/lambda = 0.5 spacing.
    pub fn half_wavelength(num_elements: usize) -> Result<Self> {
        Self::new(num_elements, Self::HALF_WAVELENGTH)
    }

    pub fn num_elements(&self) -> usize {
        self.num_elements
    }

    pub fn spacing_over_wavelength(&self) -> f64 {
        self.spacing_over_wavelength
    }

    /// Phase of element `n` (1-based) toward `theta`, in cycles.
    ///
    /// Antisymmetric about the array center: element `n` and element
    /// `N+1-n` have opposite phase.
    pub fn phase_shift(&self, n: usize, theta: f64) -> Result<f64> {
        if n < 1 || n > self.num_elements {
            return Err(Error::InvalidArgument(format!(
                "element index {n} out of range 1..={}",
                self.num_elements
            )));
        }
        let center = (self.num_elements as f64 + 1.0) / 2.0;
        Ok(-(n as f64 - center) * self.spacing_over_wavelength * theta.cos())
    }

    /// Unit-norm steering vector toward `theta` (radians).
    pub fn steering_vector(&self, theta: f64) -> SteeringVector {
        let n = self.num_elements;
        let scale = (n as f64).sqrt().recip();
        let entries = CVector::from_iterator(
            n,
            (1..=n).map(|k| {
                // Element index is always in range here.
                let psi = self.phase_shift(k, theta).expect("index in range");
                C64::from_polar(scale, 2.0 * PI * psi)
            }),
        );
        SteeringVector { entries }
    }

    /// Rank-1 channel Gram matrix `h(theta) h(theta)^H`.
    ///
    /// Hermitian, positive semi-definite, trace 1.
    pub fn channel_gram(&self, theta: f64) -> CMatrix {
        let h = self.steering_vector(theta);
        let v = h.as_vector();
        v * v.adjoint()
    }
}

/// Transmitter geometry plus the two directions of interest.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scenario {
    array: ArrayConfig,
    theta_d: f64,
    theta_e: f64,
}

impl Scenario {
    /// Both angles must lie strictly inside (0, pi); endfire is rejected.
    pub fn new(array: ArrayConfig, theta_d: f64, theta_e: f64) -> Result<Self> {
        for (name, theta) in [("desired", theta_d), ("eavesdropper", theta_e)] {
            if !(theta > 0.0 && theta < PI) {
                return Err(Error::InvalidConfig(format!(
                    "{name} direction must lie strictly inside (0, pi) radians, got {theta}"
                )));
            }
        }
        Ok(Self {
            array,
            theta_d,
            theta_e,
        })
    }

    pub fn array(&self) -> &ArrayConfig {
        &self.array
    }

    pub fn num_elements(&self) -> usize {
        self.array.num_elements()
    }

    pub fn theta_d(&self) -> f64 {
        self.theta_d
    }

    pub fn theta_e(&self) -> f64 {
        self.theta_e
    }

    /// Steering vector toward the desired direction.
    pub fn h_d(&self) -> SteeringVector {
        self.array.steering_vector(self.theta_d)
    }

    /// Steering vector toward the eavesdropper.
    pub fn h_e(&self) -> SteeringVector {
        self.array.steering_vector(self.theta_e)
    }

    /// `H_d = h_d h_d^H`.
    pub fn gram_d(&self) -> CMatrix {
        self.array.channel_gram(self.theta_d)
    }

    /// `H_e = h_e h_e^H`.
    pub fn gram_e(&self) -> CMatrix {
        self.array.channel_gram(self.theta_e)
    }
}

/// Unit-norm array response toward one direction.
///
/// Every entry has modulus `1/sqrt(N)`, so the Euclidean norm is 1.
#[derive(Debug, Clone, PartialEq)]
pub struct SteeringVector {
    entries: CVector,
}

impl SteeringVector {
    pub fn as_vector(&self) -> &CVector {
        &self.entries
    }

    pub fn into_vector(self) -> CVector {
        self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

impl std::ops::Deref for SteeringVector {
    type Target = CVector;

    fn deref(&self) -> &CVector {
        &self.entries
    }
}

/// Degrees to radians, the conversion used at the CLI boundary.
pub fn deg_to_rad(deg: f64) -> f64 {
    deg * PI / 180.0
}

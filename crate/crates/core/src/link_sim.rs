//! Monte-Carlo QPSK link simulator: BER versus receive direction for a
//! fixed beamformer.
//!
//! Per symbol, two bits are Gray-mapped onto a unit-energy QPSK point, the
//! AN vector is redrawn from `CN(0, I_{N-1})`, and the receiver at angle
//! `theta` observes `h(theta)^H s + n`. Detection is genie-aided coherent:
//! the receiver divides by its own composite gain
//! `beta1 sqrt(P_s) h(theta)^H v` before slicing, so the curves isolate the
//! beamformer (signal rolloff plus AN floor), not channel estimation.
//!
//! Sweeps are reproducible across machines: every angle gets its own
//! ChaCha8 stream derived from [`angle_subseed`], and per-angle runs are
//! independent, so the rayon-parallel sweep equals the sequential one.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use std::f64::consts::FRAC_1_SQRT_2;

use crate::array_channel::{ArrayConfig, Scenario};
use crate::beamformers::{BeamformerSolution, MethodTag};
use crate::secrecy_metrics::{AnProjection, PowerProfile, Precoder};
use crate::{C64, CVector, Error, Result};

/// Composite gains below this are treated as a dead channel; the slicer
/// then decides from the noise-only observation.
const DEAD_CHANNEL_GAIN: f64 = 1e-15;

/// Monte-Carlo sweep parameters.
///
/// `snr_db` labels the operating point the sweep was run at (the physics
/// comes from the `PowerProfile` handed to [`ber_sweep`]; the harness
/// builds that profile from this label). Reported BER points want
/// `num_symbols >= 1e4` so the ~1e-3 floor is resolvable.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkConfig {
    pub num_symbols: usize,
    pub seed: u64,
    pub snr_db: f64,
    /// Receive angles in radians.
    pub angle_grid: Vec<f64>,
}

/// BER per angle for one beamforming method.
#[derive(Debug, Clone, PartialEq)]
pub struct BerCurve {
    pub angles: Vec<f64>,
    pub ber: Vec<f64>,
    pub method_tag: MethodTag,
}

impl BerCurve {
    /// Index and angle of the lowest BER (lowest index on ties).
    pub fn argmin(&self) -> (usize, f64) {
        let mut best = 0;
        for i in 1..self.ber.len() {
            if self.ber[i] < self.ber[best] {
                best = i;
            }
        }
        (best, self.angles[best])
    }
}

/// Stable per-angle sub-seed: SplitMix64 finalizer of
/// `seed XOR (index+1) * 0x9E3779B97F4A7C15`. Part of the reproducibility
/// contract; changing it changes every published curve.
pub fn angle_subseed(seed: u64, angle_index: usize) -> u64 {
    let mut z = seed ^ (angle_index as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Gray-mapped unit-energy QPSK point: bit 0 on I, bit 1 on Q.
fn qpsk_point(bits: [bool; 2]) -> C64 {
    let i = if bits[0] { -FRAC_1_SQRT_2 } else { FRAC_1_SQRT_2 };
    let q = if bits[1] { -FRAC_1_SQRT_2 } else { FRAC_1_SQRT_2 };
    C64::new(i, q)
}

/// Quadrant slicer inverse to [`qpsk_point`].
fn slice_qpsk(y: C64) -> [bool; 2] {
    [y.re < 0.0, y.im < 0.0]
}

fn complex_standard_normal(rng: &mut impl Rng) -> C64 {
    C64::new(
        rng.sample::<f64, _>(StandardNormal) * FRAC_1_SQRT_2,
        rng.sample::<f64, _>(StandardNormal) * FRAC_1_SQRT_2,
    )
}

/// Transmit baseband vector for one symbol:
/// `s = beta1 sqrt(P_s) v x + alpha beta2 sqrt(P_s) P z` with
/// `z ~ CN(0, I_{N-1})` redrawn per call. With `beta2 = 0` no AN is drawn
/// and the output is deterministic in the bits.
pub fn transmit_symbol(
    bits: [bool; 2],
    v: &Precoder,
    an: &AnProjection,
    p: &PowerProfile,
    rng: &mut impl Rng,
) -> Result<CVector> {
    if v.len() != an.num_antennas() {
        return Err(Error::InvalidArgument(format!(
            "precoder length {} does not match AN projection rows {}",
            v.len(),
            an.num_antennas()
        )));
    }
    let x = qpsk_point(bits);
    let mut s = v.as_vector() * (x * p.beta1() * p.total_power().sqrt());
    if p.an_enabled() {
        let cols = an.num_antennas() - 1;
        let z = CVector::from_fn(cols, |_, _| complex_standard_normal(rng));
        let scale = C64::new(an.alpha() * p.beta2() * p.total_power().sqrt(), 0.0);
        s += an.matrix() * z * scale;
    }
    Ok(s)
}

/// Receive `y = h(theta)^H s + n`, equalize by the composite gain
/// `beta1 sqrt(P_s) h(theta)^H v`, and slice. A dead channel
/// (`|gain| < 1e-15`) is sliced from the noise-only observation, which
/// decides the bits uniformly at random.
pub fn receive_and_detect(
    s: &CVector,
    array: &ArrayConfig,
    theta: f64,
    v: &Precoder,
    p: &PowerProfile,
    rng: &mut impl Rng,
) -> Result<[bool; 2]> {
    if s.len() != array.num_elements() || v.len() != array.num_elements() {
        return Err(Error::InvalidArgument(
            "signal/precoder length does not match the array".into(),
        ));
    }
    let h = array.steering_vector(theta);
    let noise = complex_standard_normal(rng) * p.noise_var().sqrt();
    let y = h.as_vector().dotc(s) + noise;
    let gain = h.as_vector().dotc(v.as_vector()) * p.beta1() * p.total_power().sqrt();
    if gain.norm() < DEAD_CHANNEL_GAIN {
        return Ok(slice_qpsk(y));
    }
    Ok(slice_qpsk(y / gain))
}

fn simulate_angle(
    solution: &BeamformerSolution,
    array: &ArrayConfig,
    theta: f64,
    p: &PowerProfile,
    num_symbols: usize,
    sub_seed: u64,
) -> Result<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(sub_seed);
    let mut bit_errors = 0usize;
    for _ in 0..num_symbols {
        let bits = [rng.gen::<bool>(), rng.gen::<bool>()];
        let s = transmit_symbol(bits, &solution.precoder, &solution.an, p, &mut rng)?;
        let detected = receive_and_detect(&s, array, theta, &solution.precoder, p, &mut rng)?;
        bit_errors += usize::from(detected[0] != bits[0]) + usize::from(detected[1] != bits[1]);
    }
    Ok(bit_errors)
}

/// BER over `cfg.angle_grid` for one solution, `cfg.num_symbols` fresh
/// symbol/AN/noise draws per angle. Angles run in parallel on independent
/// sub-seeded streams; the result is identical to a sequential sweep.
pub fn ber_sweep(
    solution: &BeamformerSolution,
    scenario: &Scenario,
    p: &PowerProfile,
    cfg: &LinkConfig,
) -> Result<BerCurve> {
    if cfg.num_symbols == 0 {
        return Err(Error::InvalidConfig("need at least one symbol".into()));
    }
    if cfg.angle_grid.is_empty() {
        return Err(Error::InvalidConfig("angle grid is empty".into()));
    }
    let array = *scenario.array();
    let errors: Result<Vec<usize>> = cfg
        .angle_grid
        .par_iter()
        .enumerate()
        .map(|(idx, &theta)| {
            simulate_angle(
                solution,
                &array,
                theta,
                p,
                cfg.num_symbols,
                angle_subseed(cfg.seed, idx),
            )
        })
        .collect();
    let total_bits = (2 * cfg.num_symbols) as f64;
    let ber = errors?.into_iter().map(|e| e as f64 / total_bits).collect();
    Ok(BerCurve {
        angles: cfg.angle_grid.clone(),
        ber,
        method_tag: solution.method_tag,
    })
}

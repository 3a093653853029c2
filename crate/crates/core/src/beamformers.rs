//! Beamforming strategies: the alternating Max-SR solver and the leakage
//! and null-space-projection baselines.
//!
//! The Max-SR solver alternates two guarded block updates until the secrecy
//! rate settles: the AN projection is improved by a generalized power
//! iteration on the trace-ratio form of the rate difference (precoder
//! fixed), then the precoder is set to the exact maximizer of its
//! generalized Rayleigh quotient (AN fixed). Each block update cannot
//! decrease the objective, so the per-iteration secrecy rates form a
//! non-decreasing sequence.
//!
//! Initialization uses leakage ratios: the AN projection maximizes the
//! AN-to-leakage-plus-noise ratio and the precoder the confidential
//! signal-to-leakage-plus-noise ratio, both closed-form generalized
//! eigenvector solves. Those two closed forms, evaluated without further
//! iteration, are also the leakage baseline.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::array_channel::Scenario;
use crate::numeric_solvers::{
    canonical_phase, gpi_solve, largest_generalized_eigvec, householder_complement, GpiReport,
    RatioProductProblem, GPI_DEFAULT_MAX_ITER, GPI_DEFAULT_TOL,
};
use crate::secrecy_metrics::{
    an_coefficients, rate_coefficients, rate_difference, secrecy_rate, AnProjection, PowerProfile,
    Precoder,
};
use crate::{C64, CMatrix, CVector, Error, Result};

/// Default outer-loop tolerance on the secrecy-rate change (bits/s/Hz).
pub const DEFAULT_DELTA: f64 = 1e-4;
/// Default outer-iteration cap.
pub const DEFAULT_MAX_OUTER: usize = 50;

/// Which strategy produced a solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MethodTag {
    MaxSr,
    Leakage,
    Nsp,
}

impl MethodTag {
    pub fn as_str(&self) -> &'static str {
        match self {
            MethodTag::MaxSr => "max_sr",
            MethodTag::Leakage => "leakage",
            MethodTag::Nsp => "nsp",
        }
    }
}

impl std::fmt::Display for MethodTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Starting point for the alternating Max-SR solver.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitKind {
    /// Leakage-ratio closed forms.
    Leakage,
    /// Normalized complex-Gaussian draws from the given seed.
    Random { seed: u64 },
}

/// Why the outer loop stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    /// `|R_s^i - R_s^{i-1}| < delta`.
    Tolerance,
    /// Iteration cap reached first.
    MaxIter,
}

/// A precoder/AN pair with its evaluated secrecy rate.
#[derive(Debug, Clone)]
pub struct BeamformerSolution {
    pub precoder: Precoder,
    pub an: AnProjection,
    pub secrecy_rate: f64,
    pub method_tag: MethodTag,
}

/// Per-outer-iteration log of one Max-SR run.
///
/// The first entry of `sr_per_iteration` is the secrecy rate of the
/// initializer (iteration 1); each later entry follows one AN update plus
/// one precoder update. `inner_gpi_iterations` has one entry per outer
/// iteration after the first.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceTrace {
    pub sr_per_iteration: Vec<f64>,
    pub inner_gpi_iterations: Vec<usize>,
    pub init_kind: InitKind,
    pub terminated_by: Termination,
    /// Set when `theta_d == theta_e`; the solver returns the initializer
    /// without iterating because the secrecy rate is identically zero.
    pub degenerate: bool,
}

impl ConvergenceTrace {
    /// Outer iterations recorded, counting the initializer as iteration 1.
    pub fn iterations(&self) -> usize {
        self.sr_per_iteration.len()
    }

    pub fn final_secrecy_rate(&self) -> f64 {
        *self.sr_per_iteration.last().expect("trace is never empty")
    }
}

/// Precoder maximizing the confidential signal-to-leakage-plus-noise ratio:
/// the top eigenvector of the pencil `(H_d, H_e + sigma^2/(beta1^2 P_s) I)`.
pub fn init_precoder_leakage(scenario: &Scenario, p: &PowerProfile) -> Result<Precoder> {
    let n = scenario.num_elements();
    let shift = p.noise_var() / (p.beta1() * p.beta1() * p.total_power());
    let m = scenario.gram_e() + CMatrix::identity(n, n).scale(shift);
    let v = largest_generalized_eigvec(&scenario.gram_d(), &m)?;
    Precoder::new(v)
}

/// AN projection maximizing the AN-to-leakage-plus-noise ratio.
///
/// The block-level pencil `(H_e, H_d + sigma^2/(beta2^2 P_s) I)` has the
/// same top eigenvector in every Kronecker block, and the ratio depends on
/// `P` only through its Gram matrix, so all columns are set to that single
/// eigenvector scaled by `1/sqrt(N-1)`. Any unit vector in the degenerate
/// top eigenspace of the stacked operator attains the same ratio.
pub fn init_an_leakage(scenario: &Scenario, p: &PowerProfile) -> Result<AnProjection> {
    if !p.an_enabled() {
        return Err(Error::InvalidConfig(
            "AN initialization requires beta2 > 0".into(),
        ));
    }
    let n = scenario.num_elements();
    let shift = p.noise_var() / (p.beta2() * p.beta2() * p.total_power());
    let m = scenario.gram_d() + CMatrix::identity(n, n).scale(shift);
    let u = largest_generalized_eigvec(&scenario.gram_e(), &m)?;
    let column = u.unscale(((n - 1) as f64).sqrt());
    let mut matrix = CMatrix::zeros(n, n - 1);
    for j in 0..n - 1 {
        matrix.set_column(j, &column);
    }
    AnProjection::new(matrix)
}

/// Normalized complex-Gaussian precoder and AN projection; deterministic
/// for a given seed.
pub fn random_solution(scenario: &Scenario, seed: u64) -> (Precoder, AnProjection) {
    let n = scenario.num_elements();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draw = |rng: &mut ChaCha8Rng| -> C64 {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    };
    let v = CVector::from_fn(n, |_, _| draw(&mut rng));
    let precoder = Precoder::new(v).expect("Gaussian draw is nonzero");
    let matrix = CMatrix::from_fn(n, n - 1, |_, _| draw(&mut rng));
    let an = AnProjection::new(matrix).expect("shape is valid by construction");
    (precoder, an)
}

/// One AN block update: GPI on the stacked-column trace-ratio objective,
/// warm-started from `an_init`. The returned projection never has a lower
/// rate difference against `v` than `an_init`.
pub fn optimize_an_fixed_precoder(
    scenario: &Scenario,
    p: &PowerProfile,
    v: &Precoder,
    an_init: &AnProjection,
) -> Result<(AnProjection, GpiReport)> {
    let n = scenario.num_elements();
    if an_init.num_antennas() != n {
        return Err(Error::InvalidArgument(format!(
            "AN projection has {} rows but the array has {n} elements",
            an_init.num_antennas()
        )));
    }
    let coeff = an_coefficients(scenario, v, p)?;
    let problem =
        RatioProductProblem::kron_block(coeff.b_d, coeff.b_e, coeff.c_e, coeff.c_d, n - 1)?;
    let w0 = an_init.stacked_columns();
    let report = gpi_solve(&problem, &w0, GPI_DEFAULT_TOL, GPI_DEFAULT_MAX_ITER)?;
    let an = AnProjection::from_stacked_columns(&report.solution, n)?;
    Ok((an, report))
}

/// One precoder block update: the exact maximizer of the generalized
/// Rayleigh quotient `v^H(H_d + A_d I)v / v^H(H_e + A_e I)v`, which is the
/// global optimum of the precoder subproblem for the given AN projection.
pub fn optimize_precoder_fixed_an(
    scenario: &Scenario,
    p: &PowerProfile,
    an: &AnProjection,
) -> Result<Precoder> {
    let n = scenario.num_elements();
    let coeff = rate_coefficients(scenario, an, p)?;
    let identity = CMatrix::identity(n, n);
    let k = scenario.gram_d() + identity.scale(coeff.a_d);
    let m = scenario.gram_e() + identity.scale(coeff.a_e);
    let v = largest_generalized_eigvec(&k, &m)?;
    Precoder::new(v)
}

/// Alternating Max-SR solver.
///
/// Starts from the leakage or random initializer (iteration 1), then
/// repeats AN update followed by precoder update, recording the clamped
/// secrecy rate each outer iteration. The stop test
/// `|R_s^i - R_s^{i-1}| < delta` runs on the unclamped rate difference so
/// progress is visible even while the clamped rate sits at zero; recorded
/// values are the clamped ones.
pub fn solve_max_sr(
    scenario: &Scenario,
    p: &PowerProfile,
    init: InitKind,
    delta: f64,
    max_outer: usize,
) -> Result<(BeamformerSolution, ConvergenceTrace)> {
    if !(delta > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "outer tolerance must be positive, got {delta}"
        )));
    }
    if max_outer == 0 {
        return Err(Error::InvalidArgument("need at least one outer iteration".into()));
    }
    if !p.an_enabled() {
        return Err(Error::InvalidConfig(
            "the Max-SR solver co-designs AN and requires beta2 > 0".into(),
        ));
    }

    let (mut v, mut an) = match init {
        InitKind::Leakage => (
            init_precoder_leakage(scenario, p)?,
            init_an_leakage(scenario, p)?,
        ),
        InitKind::Random { seed } => random_solution(scenario, seed),
    };

    // Identical directions: the secrecy rate is identically zero and the
    // alternating updates have nothing to improve.
    if scenario.theta_d() == scenario.theta_e() {
        let solution = BeamformerSolution {
            precoder: v,
            an,
            secrecy_rate: 0.0,
            method_tag: MethodTag::MaxSr,
        };
        let trace = ConvergenceTrace {
            sr_per_iteration: vec![0.0, 0.0],
            inner_gpi_iterations: Vec::new(),
            init_kind: init,
            terminated_by: Termination::Tolerance,
            degenerate: true,
        };
        return Ok((solution, trace));
    }

    let mut gap = rate_difference(scenario, &v, &an, p)?;
    let mut sr_per_iteration = vec![gap.max(0.0)];
    let mut inner_gpi_iterations = Vec::new();
    let mut terminated_by = Termination::MaxIter;
    let mut best = (v.clone(), an.clone(), gap);

    for _ in 2..=max_outer {
        let (an_next, report) = optimize_an_fixed_precoder(scenario, p, &v, &an)?;
        an = an_next;
        v = optimize_precoder_fixed_an(scenario, p, &an)?;

        let gap_next = rate_difference(scenario, &v, &an, p)?;
        sr_per_iteration.push(gap_next.max(0.0));
        inner_gpi_iterations.push(report.iterations);
        if gap_next > best.2 {
            best = (v.clone(), an.clone(), gap_next);
        }
        let change = (gap_next - gap).abs();
        gap = gap_next;
        if change < delta {
            terminated_by = Termination::Tolerance;
            break;
        }
    }

    let solution = BeamformerSolution {
        secrecy_rate: best.2.max(0.0),
        precoder: best.0,
        an: best.1,
        method_tag: MethodTag::MaxSr,
    };
    let trace = ConvergenceTrace {
        sr_per_iteration,
        inner_gpi_iterations,
        init_kind: init,
        terminated_by,
        degenerate: false,
    };
    Ok((solution, trace))
}

/// Null-space projection baseline: matched-filter precoder and an
/// orthonormal AN basis of the null space of `h_d^H`, so no AN reaches the
/// desired direction.
pub fn solve_nsp(scenario: &Scenario, p: &PowerProfile) -> Result<BeamformerSolution> {
    let h_d = scenario.h_d();
    let basis = householder_complement(h_d.as_vector())?;
    let an = AnProjection::new(basis)?;
    let mut v = h_d.into_vector();
    canonical_phase(&mut v);
    let precoder = Precoder::new(v)?;
    let secrecy_rate = secrecy_rate(scenario, &precoder, &an, p)?;
    Ok(BeamformerSolution {
        precoder,
        an,
        secrecy_rate,
        method_tag: MethodTag::Nsp,
    })
}

/// Leakage baseline: the closed-form CSLNR precoder and ANLNR projection,
/// evaluated without further iteration. Identical to the iteration-1 state
/// of [`solve_max_sr`] with leakage initialization.
pub fn solve_leakage(scenario: &Scenario, p: &PowerProfile) -> Result<BeamformerSolution> {
    let precoder = init_precoder_leakage(scenario, p)?;
    let an = init_an_leakage(scenario, p)?;
    let secrecy_rate = secrecy_rate(scenario, &precoder, &an, p)?;
    Ok(BeamformerSolution {
        precoder,
        an,
        secrecy_rate,
        method_tag: MethodTag::Leakage,
    })
}

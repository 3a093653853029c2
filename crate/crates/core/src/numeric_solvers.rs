//! Complex eigen machinery shared by the beamforming solvers.
//!
//! Two solvers live here. [`largest_generalized_eigvec`] maximizes a single
//! generalized Rayleigh quotient over the unit sphere by reducing the
//! Hermitian-definite pair `(K, M)` with a Cholesky factor of `M`.
//! [`gpi_solve`] maximizes a product of two generalized Rayleigh quotients
//! with a guarded fixed-point iteration (generalized power iteration). Both
//! return vectors in a canonical global phase so results are deterministic.
//!
//! Operators of the form `I_r ⊗ X` are common here; [`ProblemStructure`]
//! lets the GPI run either on the materialized dense operator or block-wise
//! on the `X` factor, which turns the per-iteration cost from one dense
//! solve in dimension `N·r` into a single `N x N` factorization.

use nalgebra::DMatrix;

use crate::{C64, CMatrix, CVector, Error, Result};

const C_ONE: C64 = C64::new(1.0, 0.0);
const C_ZERO: C64 = C64::new(0.0, 0.0);

/// Hermitian deviation tolerance accepted by the problem constructors.
const HERMITIAN_TOL: f64 = 1e-10;
/// Condition-number ceiling for the definite-pair reduction.
const CONDITION_LIMIT: f64 = 1e12;
/// Step halvings attempted before the GPI gives up on a non-improving update.
const MAX_STEP_HALVINGS: usize = 10;

/// Default iterate-change tolerance for [`gpi_solve`].
pub const GPI_DEFAULT_TOL: f64 = 1e-8;
/// Default iteration cap for [`gpi_solve`].
pub const GPI_DEFAULT_MAX_ITER: usize = 500;

/// Rotates `v` so its largest-modulus entry becomes real and nonnegative.
///
/// Ties are broken toward the lowest index. This is the phase convention of
/// every eigenvector and GPI solution returned by this module.
pub fn canonical_phase(v: &mut CVector) {
    let mut best_idx = 0;
    let mut best_mod = 0.0f64;
    for (i, entry) in v.iter().enumerate() {
        let m = entry.norm();
        if m > best_mod {
            best_mod = m;
            best_idx = i;
        }
    }
    if best_mod == 0.0 {
        return;
    }
    let rot = v[best_idx].conj() / C64::new(best_mod, 0.0);
    for entry in v.iter_mut() {
        *entry *= rot;
    }
    // Clean the pivot's imaginary dust so repeated application is stable.
    v[best_idx] = C64::new(v[best_idx].norm(), 0.0);
}

/// Distance between unit vectors modulo a global phase:
/// `min_phi || e^{j phi} b - a ||`.
pub fn phase_aligned_distance(a: &CVector, b: &CVector) -> f64 {
    let overlap = a.dotc(b).norm();
    (2.0 * (1.0 - overlap.min(1.0))).max(0.0).sqrt()
}

fn check_square_pair(k: &CMatrix, m: &CMatrix) -> Result<usize> {
    let n = k.nrows();
    if k.ncols() != n || m.nrows() != n || m.ncols() != n {
        return Err(Error::InvalidArgument(format!(
            "matrix pair must be square and same size, got {}x{} and {}x{}",
            k.nrows(),
            k.ncols(),
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(n)
}

fn hermitian_deviation(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            let dev = (m[(i, j)] - m[(j, i)].conj()).norm();
            if dev > worst {
                worst = dev;
            }
        }
    }
    worst
}

fn require_hermitian(m: &CMatrix, name: &str) -> Result<()> {
    let dev = hermitian_deviation(m);
    if dev > HERMITIAN_TOL {
        return Err(Error::InvalidArgument(format!(
            "{name} deviates from Hermitian by {dev:.3e} (tolerance {HERMITIAN_TOL:.0e})"
        )));
    }
    Ok(())
}

/// Unit eigenvector of the Hermitian-definite pencil `(K, M)` attaining the
/// largest generalized eigenvalue, i.e. the maximizer of
/// `v^H K v / v^H M v` over unit vectors.
///
/// The solve reduces the pencil with `M = L L^H` and runs a Hermitian
/// eigendecomposition of `L^{-1} K L^{-H}`; the non-Hermitian product
/// `M^{-1} K` is never formed. `M` with condition number above `1e12` (or
/// not positive definite) is rejected.
pub fn largest_generalized_eigvec(k: &CMatrix, m: &CMatrix) -> Result<CVector> {
    check_square_pair(k, m)?;
    require_hermitian(k, "numerator matrix")?;
    require_hermitian(m, "denominator matrix")?;

    let m_eig = m.clone().symmetric_eigen();
    let lambda_min = m_eig.eigenvalues.min();
    let lambda_max = m_eig.eigenvalues.max();
    if lambda_min <= 0.0 {
        return Err(Error::Numerical(format!(
            "denominator matrix is not positive definite (smallest eigenvalue {lambda_min:.3e})"
        )));
    }
    if lambda_max / lambda_min > CONDITION_LIMIT {
        return Err(Error::Numerical(format!(
            "denominator matrix is too ill-conditioned: cond = {:.3e} > {CONDITION_LIMIT:.0e}",
            lambda_max / lambda_min
        )));
    }

    let chol = m.clone().cholesky().ok_or_else(|| {
        Error::Numerical("Cholesky factorization of the denominator matrix failed".into())
    })?;
    let l = chol.l();

    // A_tilde = L^{-1} K L^{-H}, computed with two triangular solves.
    let y = l
        .solve_lower_triangular(k)
        .ok_or_else(|| Error::Numerical("triangular solve failed".into()))?;
    let z = l
        .solve_lower_triangular(&y.adjoint())
        .ok_or_else(|| Error::Numerical("triangular solve failed".into()))?;
    let mut a_tilde = z.adjoint();
    // Symmetrize away the rounding left by the two solves.
    a_tilde = (&a_tilde + a_tilde.adjoint()).scale(0.5);

    let eig = a_tilde.symmetric_eigen();
    let mut best = 0;
    for i in 1..eig.eigenvalues.len() {
        if eig.eigenvalues[i] > eig.eigenvalues[best] {
            best = i;
        }
    }
    let y_top = eig.eigenvectors.column(best).into_owned();

    let mut v = l
        .adjoint()
        .solve_upper_triangular(&y_top)
        .ok_or_else(|| Error::Numerical("triangular back-substitution failed".into()))?;
    let norm = v.norm();
    if norm == 0.0 {
        return Err(Error::Numerical(
            "generalized eigenvector collapsed to zero".into(),
        ));
    }
    v = v.unscale(norm);
    canonical_phase(&mut v);
    Ok(v)
}

/// `N x (N-1)` matrix whose orthonormal columns span the orthogonal
/// complement of `x`, built from a single Householder reflector.
pub fn householder_complement(x: &CVector) -> Result<CMatrix> {
    let n = x.len();
    if n < 2 {
        return Err(Error::InvalidArgument(
            "orthogonal complement needs a vector of length >= 2".into(),
        ));
    }
    let norm = x.norm();
    if norm == 0.0 {
        return Err(Error::InvalidArgument(
            "cannot complement the zero vector".into(),
        ));
    }
    // Reflector sending x to alpha*e1, with alpha chosen against cancellation.
    let phase = if x[0].norm() == 0.0 {
        C_ONE
    } else {
        x[0] / C64::new(x[0].norm(), 0.0)
    };
    let alpha = -phase * C64::new(norm, 0.0);
    let mut u = x.clone();
    u[0] -= alpha;
    let u_norm_sq = u.norm_squared();
    if u_norm_sq == 0.0 {
        return Err(Error::Numerical("degenerate Householder reflector".into()));
    }

    // Columns 2..N of H = I - 2 u u^H / ||u||^2 are orthonormal and
    // orthogonal to column 1, which is proportional to x.
    let mut basis = CMatrix::zeros(n, n - 1);
    for j in 1..n {
        let scale = C64::new(-2.0 / u_norm_sq, 0.0) * u[j].conj();
        let mut col = basis.column_mut(j - 1);
        for i in 0..n {
            col[i] = scale * u[i];
        }
        col[j] += C_ONE;
    }
    Ok(basis)
}

/// `(I_repeat ⊗ block) w` computed block-wise, never materializing the
/// Kronecker product.
pub fn kron_block_apply(block: &CMatrix, repeat: usize, w: &CVector) -> Result<CVector> {
    let n = block.nrows();
    if block.ncols() != n {
        return Err(Error::InvalidArgument(format!(
            "Kronecker block must be square, got {}x{}",
            block.nrows(),
            block.ncols()
        )));
    }
    if repeat == 0 || w.len() != n * repeat {
        return Err(Error::InvalidArgument(format!(
            "vector length {} does not match block size {n} x repeat {repeat}",
            w.len()
        )));
    }
    let mut out = CVector::zeros(w.len());
    for r in 0..repeat {
        out.rows_mut(r * n, n)
            .gemv(C_ONE, block, &w.rows(r * n, n), C_ZERO);
    }
    Ok(out)
}

/// How the four operators of a [`RatioProductProblem`] are stored.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProblemStructure {
    /// The stored matrices are the full operators.
    Dense,
    /// The stored matrices are the `N x N` factors of `I_repeat ⊗ X`
    /// operators acting on vectors of length `N * repeat`.
    KronBlock { repeat: usize },
}

/// Maximize `(w^H A w / w^H B w) * (w^H C w / w^H D w)` over unit vectors.
///
/// All four matrices are Hermitian PSD with both denominators strictly
/// positive definite; the constructors enforce this.
#[derive(Debug, Clone)]
pub struct RatioProductProblem {
    num1: CMatrix,
    den1: CMatrix,
    num2: CMatrix,
    den2: CMatrix,
    structure: ProblemStructure,
}

impl RatioProductProblem {
    pub fn dense(num1: CMatrix, den1: CMatrix, num2: CMatrix, den2: CMatrix) -> Result<Self> {
        Self::build(num1, den1, num2, den2, ProblemStructure::Dense)
    }

    /// Problem whose operators are `I_repeat ⊗ <given matrix>`.
    pub fn kron_block(
        num1: CMatrix,
        den1: CMatrix,
        num2: CMatrix,
        den2: CMatrix,
        repeat: usize,
    ) -> Result<Self> {
        if repeat == 0 {
            return Err(Error::InvalidArgument("repeat count must be >= 1".into()));
        }
        Self::build(
            num1,
            den1,
            num2,
            den2,
            ProblemStructure::KronBlock { repeat },
        )
    }

    fn build(
        num1: CMatrix,
        den1: CMatrix,
        num2: CMatrix,
        den2: CMatrix,
        structure: ProblemStructure,
    ) -> Result<Self> {
        let n = num1.nrows();
        for (m, name) in [
            (&num1, "first numerator"),
            (&den1, "first denominator"),
            (&num2, "second numerator"),
            (&den2, "second denominator"),
        ] {
            if m.nrows() != n || m.ncols() != n {
                return Err(Error::InvalidArgument(format!(
                    "{name} must be {n}x{n}, got {}x{}",
                    m.nrows(),
                    m.ncols()
                )));
            }
            require_hermitian(m, name)?;
        }
        for (m, name) in [(&den1, "first denominator"), (&den2, "second denominator")] {
            if m.clone().cholesky().is_none() {
                return Err(Error::InvalidArgument(format!(
                    "{name} must be strictly positive definite"
                )));
            }
        }
        Ok(Self {
            num1,
            den1,
            num2,
            den2,
            structure,
        })
    }

    /// Length of the optimization variable.
    pub fn dim(&self) -> usize {
        match self.structure {
            ProblemStructure::Dense => self.num1.nrows(),
            ProblemStructure::KronBlock { repeat } => self.num1.nrows() * repeat,
        }
    }

    pub fn structure(&self) -> ProblemStructure {
        self.structure
    }

    /// Same problem with the Kronecker operators materialized.
    pub fn materialized(&self) -> Self {
        match self.structure {
            ProblemStructure::Dense => self.clone(),
            ProblemStructure::KronBlock { repeat } => Self {
                num1: kron_identity_expand(&self.num1, repeat),
                den1: kron_identity_expand(&self.den1, repeat),
                num2: kron_identity_expand(&self.num2, repeat),
                den2: kron_identity_expand(&self.den2, repeat),
                structure: ProblemStructure::Dense,
            },
        }
    }

    fn quad(&self, m: &CMatrix, w: &CVector) -> f64 {
        match self.structure {
            ProblemStructure::Dense => w.dotc(&(m * w)).re,
            ProblemStructure::KronBlock { repeat } => {
                let n = m.nrows();
                (0..repeat)
                    .map(|r| {
                        let seg = w.rows(r * n, n);
                        seg.dotc(&(m * seg)).re
                    })
                    .sum()
            }
        }
    }

    fn apply(&self, m: &CMatrix, w: &CVector) -> CVector {
        match self.structure {
            ProblemStructure::Dense => m * w,
            ProblemStructure::KronBlock { repeat } => {
                kron_block_apply(m, repeat, w).expect("dimensions checked at construction")
            }
        }
    }

    /// The four quadratic forms `(a, b, c, d)` at `w`.
    fn forms(&self, w: &CVector) -> Result<(f64, f64, f64, f64)> {
        let a = self.quad(&self.num1, w);
        let b = self.quad(&self.den1, w);
        let c = self.quad(&self.num2, w);
        let d = self.quad(&self.den2, w);
        if b <= 0.0 || d <= 0.0 {
            return Err(Error::Numerical(
                "denominator quadratic form is not positive".into(),
            ));
        }
        Ok((a, b, c, d))
    }

    /// Ratio-product objective at `w` (any nonzero scaling of `w`).
    pub fn objective(&self, w: &CVector) -> Result<f64> {
        if w.len() != self.dim() {
            return Err(Error::InvalidArgument(format!(
                "vector length {} does not match problem dimension {}",
                w.len(),
                self.dim()
            )));
        }
        let (a, b, c, d) = self.forms(w)?;
        Ok((a / b) * (c / d))
    }

    /// One fixed-point candidate: `normalize([B/b + D/d]^{-1} [A/a + C/c] w)`.
    fn fixed_point_candidate(&self, w: &CVector, forms: (f64, f64, f64, f64)) -> Result<CVector> {
        let (a, b, c, d) = forms;
        if a <= 0.0 || c <= 0.0 {
            return Err(Error::Numerical(
                "numerator quadratic form vanished; GPI update undefined".into(),
            ));
        }
        let rhs = self.apply(&self.num1, w).unscale(a) + self.apply(&self.num2, w).unscale(c);
        let den = self.den1.clone().unscale(b) + self.den2.clone().unscale(d);
        let chol = den.cholesky().ok_or_else(|| {
            Error::Numerical("denominator combination is not positive definite".into())
        })?;
        let next = match self.structure {
            ProblemStructure::Dense => chol.solve(&rhs),
            ProblemStructure::KronBlock { repeat } => {
                let n = self.num1.nrows();
                let mut out = CVector::zeros(rhs.len());
                for r in 0..repeat {
                    let seg = chol.solve(&rhs.rows(r * n, n).into_owned());
                    out.rows_mut(r * n, n).copy_from(&seg);
                }
                out
            }
        };
        let norm = next.norm();
        if norm == 0.0 {
            return Err(Error::Numerical("GPI update collapsed to zero".into()));
        }
        Ok(next.unscale(norm))
    }

    /// Residual of the stationarity condition
    /// `[A/a + C/c] w = mu [B/b + D/d] w` with `mu` equalizing the norms.
    pub fn stationarity_residual(&self, w: &CVector) -> Result<f64> {
        let (a, b, c, d) = self.forms(w)?;
        if a <= 0.0 || c <= 0.0 {
            return Err(Error::Numerical(
                "numerator quadratic form vanished; residual undefined".into(),
            ));
        }
        let lhs = self.apply(&self.num1, w).unscale(a) + self.apply(&self.num2, w).unscale(c);
        let rhs = self.apply(&self.den1, w).unscale(b) + self.apply(&self.den2, w).unscale(d);
        let mu = lhs.norm() / rhs.norm();
        Ok((lhs - rhs.scale(mu)).norm())
    }
}

/// Outcome of a [`gpi_solve`] run.
#[derive(Debug, Clone)]
pub struct GpiReport {
    /// Unit-norm maximizer in canonical phase.
    pub solution: CVector,
    /// Ratio-product objective at `solution`.
    pub objective: f64,
    /// Fixed-point update steps performed.
    pub iterations: usize,
    /// Whether the iterate change dropped below the tolerance.
    pub converged: bool,
    /// Phase-aligned norm of the last iterate change.
    pub residual: f64,
}

/// Generalized power iteration for the ratio-product objective.
///
/// Iterates `w <- normalize([B/b + D/d]^{-1} [A/a + C/c] w)`, the fixed-point
/// form of the stationarity condition of `log objective` on the unit sphere.
/// An update is accepted only if the objective does not decrease (up to one
/// rounding ulp); otherwise the step toward the candidate is halved up to
/// ten times and, failing that, the best iterate so far is returned with
/// `converged = false`. Convergence requires the phase-aligned iterate
/// change to drop below `tol` and the stationarity residual below `10*tol`.
pub fn gpi_solve(
    problem: &RatioProductProblem,
    w0: &CVector,
    tol: f64,
    max_iter: usize,
) -> Result<GpiReport> {
    if w0.len() != problem.dim() {
        return Err(Error::InvalidArgument(format!(
            "start vector length {} does not match problem dimension {}",
            w0.len(),
            problem.dim()
        )));
    }
    let norm = w0.norm();
    if norm == 0.0 {
        return Err(Error::InvalidArgument("start vector must be nonzero".into()));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument("tolerance must be positive".into()));
    }

    let mut w = w0.unscale(norm);
    let mut objective = problem.objective(&w)?;
    let mut iterations = 0;
    let mut converged = false;
    let mut residual = f64::INFINITY;

    for _ in 0..max_iter {
        let forms = problem.forms(&w)?;
        let candidate = problem.fixed_point_candidate(&w, forms)?;
        let step = phase_aligned_distance(&w, &candidate);
        let cand_objective = problem.objective(&candidate)?;
        // Relative slack so rounding jitter at the fixed point does not
        // stall the polish; total drift over max_iter stays below 1e-10.
        let floor = objective * (1.0 - 1e-14);

        let moved = if cand_objective >= floor {
            w = candidate;
            objective = cand_objective;
            iterations += 1;
            residual = step;
            true
        } else {
            // Back off toward the current iterate until the objective
            // recovers.
            let mut accepted = false;
            let mut t = 0.5f64;
            for _ in 0..MAX_STEP_HALVINGS {
                let mut trial = w.scale(1.0 - t) + candidate.scale(t);
                let trial_norm = trial.norm();
                if trial_norm > 0.0 {
                    trial = trial.unscale(trial_norm);
                    let trial_objective = problem.objective(&trial)?;
                    if trial_objective >= floor {
                        residual = phase_aligned_distance(&w, &trial);
                        w = trial;
                        objective = trial_objective;
                        iterations += 1;
                        accepted = true;
                        break;
                    }
                }
                t *= 0.5;
            }
            if !accepted {
                residual = step;
            }
            accepted
        };

        if !moved {
            break;
        }
        if residual < tol && problem.stationarity_residual(&w)? < 10.0 * tol {
            converged = true;
            break;
        }
    }

    canonical_phase(&mut w);
    let objective = problem.objective(&w)?;
    Ok(GpiReport {
        solution: w,
        objective,
        iterations,
        converged,
        residual,
    })
}

/// Materialize `I_repeat ⊗ block`.
fn kron_identity_expand(block: &CMatrix, repeat: usize) -> CMatrix {
    let n = block.nrows();
    let mut out = DMatrix::zeros(n * repeat, n * repeat);
    for r in 0..repeat {
        out.view_mut((r * n, r * n), (n, n)).copy_from(block);
    }
    out
}

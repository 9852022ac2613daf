//! Convex surrogate for the Gaussian deficiency between the two channels.
//!
//! For a direction "approximate the target channel from the source channel"
//! with whitened gains `H_s`, `H_t` and prior covariance `Σ_M`, the program is
//!
//! ```text
//! minimize    ‖A^{-1/2} T H_s Σ_M^{1/2} − A^{-1/2} H_t Σ_M^{1/2}‖²_F
//! subject to  [ A   T   ]
//!             [ Tᵀ  B⁻¹ ]  ⪰ 0,      A = I + H_t Σ_M H_tᵀ,  B = I + H_s Σ_M H_sᵀ.
//! ```
//!
//! The solver works in the scaled variable `S = A^{-1/2} T B^{1/2}`, where the
//! block constraint becomes `‖S‖₂ ≤ 1` and the objective `‖S K − R‖²_F` with
//! `K = B^{-1/2} H_s Σ_M^{1/2}`. Projection onto the constraint set is a
//! singular-value clip.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::blackwell::Direction;
use crate::error::{Error, Result};
use crate::gauss::WhitenedChannels;
use crate::linalg::{self, Matrix};

const DELTA_CLAMP: f64 = 1e-9;
const RANK_CUTOFF: f64 = 1e-12;
const RHO_UPDATE_EVERY: usize = 25;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub max_iterations: usize,
    pub tolerance: f64,
    pub relaxation: f64,
    pub eig_clamp_floor: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig { max_iterations: 5000, tolerance: 1e-10, relaxation: 1.0, eig_clamp_floor: -1e-6 }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_iterations < 1 {
            return Err(Error::InvalidConfig("max_iterations must be at least 1".into()));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::InvalidConfig(format!("tolerance must be positive, got {}", self.tolerance)));
        }
        if !(self.relaxation > 0.0 && self.relaxation < 2.0) {
            return Err(Error::InvalidConfig(format!("relaxation must lie in (0, 2), got {}", self.relaxation)));
        }
        if !(self.eig_clamp_floor <= 0.0) {
            return Err(Error::InvalidConfig("eig_clamp_floor must be non-positive".into()));
        }
        Ok(())
    }
}

/// The data of one directional surrogate program.
#[derive(Clone, Debug)]
pub struct ProgramSpec {
    pub direction: Direction,
    /// `A^{-1/2}`.
    pub c_left: Matrix,
    /// `H_s Σ_M^{1/2}`.
    pub gain_factor: Matrix,
    /// `A^{-1/2} H_t Σ_M^{1/2}`.
    pub target: Matrix,
    /// Diagonal blocks `(A, B⁻¹)` of the Schur-complement constraint.
    pub lmi_blocks: (Matrix, Matrix),
    sqrt_a: Matrix,
    sqrt_b: Matrix,
    inv_sqrt_b: Matrix,
}

impl ProgramSpec {
    pub fn objective(&self, t: &Matrix) -> f64 {
        (&self.c_left * t * &self.gain_factor - &self.target).norm_squared()
    }

    pub fn lmi_matrix(&self, t: &Matrix) -> Matrix {
        let (a, b_inv) = &self.lmi_blocks;
        let (n, m) = (a.nrows(), b_inv.nrows());
        let mut out = Matrix::zeros(n + m, n + m);
        out.view_mut((0, 0), (n, n)).copy_from(a);
        out.view_mut((0, n), (n, m)).copy_from(t);
        out.view_mut((n, 0), (m, n)).copy_from(&t.transpose());
        out.view_mut((n, n), (m, m)).copy_from(b_inv);
        out
    }

    pub fn lmi_min_eig(&self, t: &Matrix) -> f64 {
        linalg::min_eigenvalue(&self.lmi_matrix(t))
    }

    /// Spectral scale of the constraint, used to make feasibility tolerances relative.
    pub fn constraint_scale(&self) -> f64 {
        linalg::max_eigenvalue(&self.lmi_blocks.0).max(linalg::max_eigenvalue(&self.lmi_blocks.1))
    }

    /// `(rows, cols)` of the decision variable `T`.
    pub fn variable_shape(&self) -> (usize, usize) {
        (self.target.nrows(), self.gain_factor.nrows())
    }

    fn t_from_scaled(&self, s: &Matrix) -> Matrix {
        &self.sqrt_a * s * &self.inv_sqrt_b
    }

    /// `S = A^{-1/2} T B^{1/2}`.
    pub fn scaled_variable(&self, t: &Matrix) -> Matrix {
        &self.c_left * t * &self.sqrt_b
    }

    fn scaled_gain(&self) -> Matrix {
        &self.inv_sqrt_b * &self.gain_factor
    }
}

pub fn build_program(wc: &WhitenedChannels, direction: Direction) -> Result<ProgramSpec> {
    let (src, dst) = direction.gains(wc);
    let sqrt_m = linalg::sqrt_psd(&wc.sigma_m);
    let a = linalg::symmetrize(&(Matrix::identity(dst.nrows(), dst.nrows()) + dst * &wc.sigma_m * dst.transpose()));
    let b = linalg::symmetrize(&(Matrix::identity(src.nrows(), src.nrows()) + src * &wc.sigma_m * src.transpose()));
    let c_left = linalg::inv_sqrt_pd(&a, 0.0).ok_or(Error::SingularWeight)?;
    let inv_sqrt_b = linalg::inv_sqrt_pd(&b, 0.0).ok_or(Error::SingularWeight)?;
    let b_inv = linalg::inverse_pd(&b).ok_or(Error::SingularWeight)?;
    let gain_factor = src * &sqrt_m;
    let target = &c_left * dst * &sqrt_m;
    Ok(ProgramSpec {
        direction,
        c_left,
        gain_factor,
        target,
        sqrt_a: linalg::sqrt_psd(&a),
        sqrt_b: linalg::sqrt_psd(&b),
        lmi_blocks: (a, b_inv),
        inv_sqrt_b,
    })
}

/// How the solution was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveMethod {
    /// The unconstrained least-squares minimizer was already feasible.
    Unconstrained,
    /// The scaled gain has rank one and the problem is a ball-constrained vector fit.
    RankOne,
    /// Operator splitting with spectral-ball projection.
    Splitting,
}

#[derive(Clone, Debug)]
pub struct SolverOutput {
    pub t_hat: Matrix,
    pub objective: f64,
    pub iterations: usize,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub lmi_min_eig: f64,
    pub converged: bool,
    pub method: SolveMethod,
}

/// Solves the surrogate program. Non-convergence is reported through
/// `converged = false` with the best feasible iterate.
pub fn solve_program(spec: &ProgramSpec, cfg: &SolverConfig) -> Result<SolverOutput> {
    solve_with(spec, cfg, true)
}

pub(crate) fn solve_with(spec: &ProgramSpec, cfg: &SolverConfig, shortcuts: bool) -> Result<SolverOutput> {
    cfg.validate()?;
    let k = spec.scaled_gain();
    let r = &spec.target;
    let (rows, cols) = spec.variable_shape();
    let finish = |s: Matrix, iterations, primal, dual, converged, method| -> Result<SolverOutput> {
        if s.iter().any(|v| !v.is_finite()) {
            return Err(Error::NumericalBreakdown("non-finite iterate".into()));
        }
        let t_hat = spec.t_from_scaled(&s);
        Ok(SolverOutput {
            objective: spec.objective(&t_hat),
            lmi_min_eig: spec.lmi_min_eig(&t_hat),
            t_hat,
            iterations,
            primal_residual: primal,
            dual_residual: dual,
            converged,
            method,
        })
    };

    if r.norm() == 0.0 || k.norm() == 0.0 {
        return finish(Matrix::zeros(rows, cols), 0, 0.0, 0.0, true, SolveMethod::Unconstrained);
    }

    let s0 = r * linalg::pinv(&k, RANK_CUTOFF);
    if shortcuts && linalg::spectral_norm(&s0) <= 1.0 + 1e-12 {
        let s0 = linalg::project_unit_spectral_ball(&s0);
        return finish(s0, 0, 0.0, 0.0, true, SolveMethod::Unconstrained);
    }

    let svd = k.clone().svd(true, true);
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    let s1 = svd.singular_values[order[0]];
    let s2 = order.get(1).map_or(0.0, |&i| svd.singular_values[i]);
    if shortcuts && s2 <= RANK_CUTOFF * s1 {
        // K = σ u vᵀ: only w = S u matters, and S = w uᵀ has ‖S‖₂ = ‖w‖.
        let u = svd.u.as_ref().unwrap().column(order[0]).into_owned();
        let v = svd.v_t.as_ref().unwrap().row(order[0]).transpose();
        let mut w = r * &v / s1;
        let n = w.norm();
        if n > 1.0 {
            w /= n;
        }
        return finish(&w * u.transpose(), 0, 0.0, 0.0, true, SolveMethod::RankOne);
    }

    let out = admm(&k, r, cfg, &linalg::project_unit_spectral_ball(&s0));
    let obj = |s: &Matrix| (s * &k - r).norm_squared();
    let zero = Matrix::zeros(rows, cols);
    let best = if obj(&out.z) <= obj(&zero) { out.z } else { zero };
    finish(best, out.iterations, out.primal, out.dual, out.converged, SolveMethod::Splitting)
}

struct AdmmOutcome {
    z: Matrix,
    iterations: usize,
    primal: f64,
    dual: f64,
    converged: bool,
}

/// ADMM on `min ‖S K − R‖² + 𝟙{‖Z‖₂ ≤ 1}` s.t. `S = Z`, with residual balancing.
fn admm(k: &Matrix, r: &Matrix, cfg: &SolverConfig, warm: &Matrix) -> AdmmOutcome {
    let n = k * k.transpose();
    let eig = linalg::sym_eigen(&n);
    let v = eig.eigenvectors.clone();
    let lam = eig.eigenvalues.clone();
    let lmax = lam.max().max(0.0);
    let lmin = lam.iter().cloned().filter(|&x| x > RANK_CUTOFF * lmax).fold(lmax, f64::min);
    let mut rho = 2.0 * (lmax * lmin).sqrt();
    let p = (r * k.transpose()) * 2.0;
    let solve_s = |rhs: &Matrix, rho: f64| -> Matrix {
        let d = lam.map(|x| 1.0 / (2.0 * x + rho));
        rhs * &v * Matrix::from_diagonal(&d) * v.transpose()
    };
    let objective = |s: &Matrix| (s * k - r).norm_squared();
    let step = 1.0 / (2.0 * lmax.max(RANK_CUTOFF));
    let stationary = |s: &Matrix| {
        let grad = (s * &n) * 2.0 - &p;
        let moved = linalg::project_unit_spectral_ball(&(s - &grad * step));
        (s - moved).norm() / step <= cfg.tolerance * (1.0 + grad.norm())
    };

    let scale = (warm.len() as f64).sqrt();
    let alpha = cfg.relaxation;
    let mut z = warm.clone();
    let mut u = Matrix::zeros(z.nrows(), z.ncols());
    let mut best = z.clone();
    let mut best_obj = objective(&z);
    let (mut primal, mut dual) = (f64::INFINITY, f64::INFINITY);

    for it in 1..=cfg.max_iterations {
        let s = solve_s(&(&p + (&z - &u) * rho), rho);
        let s_relaxed = &s * alpha + &z * (1.0 - alpha);
        let z_prev = z;
        z = linalg::project_unit_spectral_ball(&(&s_relaxed + &u));
        u += &s_relaxed - &z;

        primal = (&s - &z).norm();
        dual = rho * (&z - &z_prev).norm();
        let f = objective(&z);
        if f < best_obj {
            best_obj = f;
            best = z.clone();
        }
        let eps_primal = cfg.tolerance * (scale + s.norm().max(z.norm()));
        let eps_dual = cfg.tolerance * (scale + rho * u.norm());
        if primal <= eps_primal && dual <= eps_dual {
            return AdmmOutcome { z: best, iterations: it, primal, dual, converged: true };
        }
        if it % RHO_UPDATE_EVERY == 0 {
            if stationary(&best) {
                return AdmmOutcome { z: best, iterations: it, primal, dual, converged: true };
            }
            let ratio = (primal / eps_primal) / (dual / eps_dual).max(1e-300);
            let factor = if ratio > 10.0 {
                ratio.sqrt().min(10.0)
            } else if ratio < 0.1 {
                ratio.sqrt().max(0.1)
            } else {
                1.0
            };
            if factor != 1.0 {
                rho *= factor;
                u /= factor;
            }
        }
    }
    AdmmOutcome { z: best, iterations: cfg.max_iterations, primal, dual, converged: false }
}

/// `Σ̂_T = A − T̂ B T̂ᵀ`, with eigenvalues in `[floor, 0)` set to zero.
pub fn sigma_hat(t_hat: &Matrix, wc: &WhitenedChannels, direction: Direction, cfg: &SolverConfig) -> Result<Matrix> {
    let (src, dst) = direction.gains(wc);
    let a = Matrix::identity(dst.nrows(), dst.nrows()) + dst * &wc.sigma_m * dst.transpose();
    let b = Matrix::identity(src.nrows(), src.nrows()) + src * &wc.sigma_m * src.transpose();
    clamp_psd(&(a - t_hat * b * t_hat.transpose()), cfg.eig_clamp_floor)
}

pub(crate) fn clamp_psd(m: &Matrix, floor: f64) -> Result<Matrix> {
    let eig = linalg::sym_eigen(m);
    let min_eigenvalue = eig.eigenvalues.min();
    if min_eigenvalue < floor {
        return Err(Error::InfeasibleSigma { min_eigenvalue, floor });
    }
    if min_eigenvalue >= 0.0 {
        return Ok(linalg::symmetrize(m));
    }
    let v = &eig.eigenvectors;
    let d = eig.eigenvalues.map(|x| x.max(0.0));
    Ok(linalg::symmetrize(&(v * Matrix::from_diagonal(&d) * v.transpose())))
}

/// Expected KL divergence from the target channel to the composite channel
/// `N(T̂ x, Σ̂_T) ∘ P_{source|M}`, with the expectation over `M` taken in closed form.
pub fn evaluate_delta_hat(
    t_hat: &Matrix,
    sigma_t_hat: &Matrix,
    wc: &WhitenedChannels,
    direction: Direction,
) -> Result<f64> {
    let (src, dst) = direction.gains(wc);
    let composite = sigma_t_hat + t_hat * t_hat.transpose();
    let inv = linalg::inverse_pd(&composite).ok_or(Error::SingularComposite)?;
    let logdet = linalg::logdet_pd(&composite).ok_or(Error::SingularComposite)?;
    let gap = dst - t_hat * src;
    let mean_term = linalg::trace(&(&inv * &gap * &wc.sigma_m * gap.transpose()));
    let delta = 0.5 * (mean_term + linalg::trace(&inv) + logdet - dst.nrows() as f64);
    if !delta.is_finite() {
        return Err(Error::SingularComposite);
    }
    Ok(if (-DELTA_CLAMP..0.0).contains(&delta) { 0.0 } else { delta })
}

/// Value of the exact single-variable deficiency objective at `T`
/// (`½ log det(I + D Σ_M Dᵀ)`, `D = H_t − T H_s`) and the smallest eigenvalue
/// of its constraint matrix `I − T Tᵀ + D Σ_M Dᵀ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReducedObjective {
    pub value: f64,
    pub constraint_min_eig: f64,
}

pub fn evaluate_reduced_objective(t: &Matrix, wc: &WhitenedChannels, direction: Direction) -> ReducedObjective {
    let (src, dst) = direction.gains(wc);
    let gap = dst - t * src;
    let spread = linalg::symmetrize(&(&gap * &wc.sigma_m * gap.transpose()));
    let eye = Matrix::identity(dst.nrows(), dst.nrows());
    let value = 0.5 * linalg::logdet_pd(&(&eye + &spread)).unwrap_or(f64::INFINITY);
    let constraint_min_eig = linalg::min_eigenvalue(&(eye - t * t.transpose() + spread));
    ReducedObjective { value: value.max(0.0), constraint_min_eig }
}

/// Everything produced for one direction.
#[derive(Clone, Debug)]
pub struct DeficiencyResult {
    pub direction: Direction,
    pub t_hat: Matrix,
    pub sigma_t_hat: Matrix,
    pub delta_hat: f64,
    pub objective: f64,
    pub iterations: usize,
    pub primal_residual: f64,
    pub lmi_min_eig: f64,
    pub converged: bool,
    pub method: SolveMethod,
    pub reduced: ReducedObjective,
    pub elapsed_ms: f64,
}

impl DeficiencyResult {
    pub fn ensure_converged(self) -> Result<Self> {
        if self.converged {
            Ok(self)
        } else {
            Err(Error::NotConverged { iterations: self.iterations, residual: self.primal_residual })
        }
    }
}

/// Builds, solves and evaluates the surrogate for one direction.
pub fn approximate_deficiency(
    wc: &WhitenedChannels,
    direction: Direction,
    cfg: &SolverConfig,
) -> Result<DeficiencyResult> {
    let start = Instant::now();
    let spec = build_program(wc, direction)?;
    let sol = solve_program(&spec, cfg)?;
    let sigma_t_hat = sigma_hat(&sol.t_hat, wc, direction, cfg)?;
    let delta_hat = evaluate_delta_hat(&sol.t_hat, &sigma_t_hat, wc, direction)?;
    let reduced = evaluate_reduced_objective(&sol.t_hat, wc, direction);
    Ok(DeficiencyResult {
        direction,
        delta_hat,
        objective: sol.objective,
        iterations: sol.iterations,
        primal_residual: sol.primal_residual,
        lmi_min_eig: sol.lmi_min_eig,
        converged: sol.converged,
        method: sol.method,
        reduced,
        t_hat: sol.t_hat,
        sigma_t_hat,
        elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::gauss::{channel_form, mutual_information, whiten, Dims, GaussianSystem, Source};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const LN2: f64 = std::f64::consts::LN_2;

    fn whitened(sys: &GaussianSystem) -> WhitenedChannels {
        whiten(&channel_form(sys).unwrap()).unwrap()
    }

    fn scalar(hx: f64, hy: f64) -> WhitenedChannels {
        WhitenedChannels::from_parts(
            Matrix::identity(1, 1),
            Matrix::from_element(1, 1, hx),
            Matrix::from_element(1, 1, hy),
        )
        .unwrap()
    }

    fn random_channels(rng: &mut ChaCha8Rng, max_dim: usize) -> WhitenedChannels {
        let dims = Dims::new(
            rng.random_range(1..=max_dim),
            rng.random_range(1..=max_dim),
            rng.random_range(1..=max_dim),
        );
        whitened(&fixtures::wishart_system(rng, dims))
    }

    /// Eigen-clip onto the PSD cone.
    fn psd_part(m: &Matrix) -> Matrix {
        let e = m.clone().symmetric_eigen();
        let d = e.eigenvalues.map(|x| x.max(0.0));
        &e.eigenvectors * Matrix::from_diagonal(&d) * e.eigenvectors.transpose()
    }

    fn kron(a: &Matrix, b: &Matrix) -> Matrix {
        let mut out = Matrix::zeros(a.nrows() * b.nrows(), a.ncols() * b.ncols());
        for i in 0..a.nrows() {
            for j in 0..a.ncols() {
                out.view_mut((i * b.nrows(), j * b.ncols()), (b.nrows(), b.ncols())).copy_from(&(b * a[(i, j)]));
            }
        }
        out
    }

    /// Splitting on `(T, Z)` with `Z` the Schur block matrix projected onto the
    /// PSD cone, started from zero. Returns `T` pulled back onto the feasible set.
    fn reference_solve(spec: &ProgramSpec, iterations: usize) -> Matrix {
        let (rows, cols) = spec.variable_shape();
        let (a, b_inv) = spec.lmi_blocks.clone();
        let big = kron(&spec.gain_factor.transpose(), &spec.c_left);
        let rhs0 = big.transpose() * Matrix::from_column_slice(spec.target.len(), 1, spec.target.as_slice());
        let rho = 1.0;
        let normal = big.transpose() * &big + Matrix::identity(rows * cols, rows * cols) * (2.0 * rho);
        let chol = normal.cholesky().unwrap();
        let n = rows + cols;
        let lift = |t: &Matrix| {
            let mut w = Matrix::zeros(n, n);
            w.view_mut((0, 0), (rows, rows)).copy_from(&a);
            w.view_mut((rows, rows), (cols, cols)).copy_from(&b_inv);
            w.view_mut((0, rows), (rows, cols)).copy_from(t);
            w.view_mut((rows, 0), (cols, rows)).copy_from(&t.transpose());
            w
        };
        let mut z = lift(&Matrix::zeros(rows, cols));
        let mut u = Matrix::zeros(n, n);
        let mut t = Matrix::zeros(rows, cols);
        for _ in 0..iterations {
            let v = &z - &u;
            let off = (v.view((0, rows), (rows, cols)) + v.view((rows, 0), (cols, rows)).transpose()) * rho;
            let sol = chol.solve(&(&rhs0 + Matrix::from_column_slice(off.len(), 1, off.as_slice())));
            t = Matrix::from_column_slice(rows, cols, sol.as_slice());
            let w = lift(&t);
            z = psd_part(&(&w + &u));
            u += w - &z;
        }
        let s = linalg::project_unit_spectral_ball(&spec.scaled_variable(&t));
        spec.t_from_scaled(&s)
    }

    /// Accelerated projected gradient on `T` directly, with the constraint
    /// `T B Tᵀ ⪯ A` enforced by the same pull-back.
    fn gradient_solve(spec: &ProgramSpec, iterations: usize) -> Matrix {
        let (rows, cols) = spec.variable_shape();
        let c = &spec.c_left;
        let g = &spec.gain_factor;
        let l = 2.0 * linalg::max_eigenvalue(&(c * c)) * linalg::max_eigenvalue(&(g * g.transpose()));
        let pull = |t: &Matrix| spec.t_from_scaled(&linalg::project_unit_spectral_ball(&spec.scaled_variable(t)));
        let mut x = Matrix::zeros(rows, cols);
        let mut y = x.clone();
        let mut k = 1.0f64;
        for _ in 0..iterations {
            let grad = c.transpose() * (c * &y * g - &spec.target) * g.transpose() * 2.0;
            let next = pull(&(&y - grad / l));
            let k_next = (1.0 + (1.0 + 4.0 * k * k).sqrt()) / 2.0;
            y = &next + (&next - &x) * ((k - 1.0) / k_next);
            x = next;
            k = k_next;
        }
        x
    }

    #[test]
    fn counterexample_program() {
        let wc = whitened(&fixtures::counterexample());
        let spec = build_program(&wc, Direction::XOverY).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((spec.lmi_blocks.0[(0, 0)] - 2.0).abs() < 1e-12);
        assert!((spec.lmi_blocks.1[(0, 0)] - 0.5).abs() < 1e-12);
        assert!((&spec.gain_factor - Matrix::from_row_slice(1, 2, &[1.0, 0.0])).norm() < 1e-12);
        assert!((&spec.target - Matrix::from_row_slice(1, 2, &[0.0, h])).norm() < 1e-12);
        let zero = Matrix::zeros(1, 1);
        assert!((spec.objective(&zero) - spec.target.norm_squared()).abs() < 1e-15);

        let sol = solve_program(&spec, &SolverConfig::default()).unwrap();
        assert!(sol.converged);
        assert!(sol.t_hat[(0, 0)].abs() < 1e-10);
        assert!((sol.objective - 0.5).abs() < 1e-12);
    }

    #[test]
    fn swapped_build_exchanges_roles() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let wc = random_channels(&mut rng, 4);
        let fwd = build_program(&wc, Direction::XOverY).unwrap();
        let rev = build_program(&wc.swapped(), Direction::YOverX).unwrap();
        assert!((&fwd.target - &rev.target).norm() < 1e-12);
        assert!((&fwd.gain_factor - &rev.gain_factor).norm() < 1e-12);
        assert!((&fwd.lmi_blocks.0 - &rev.lmi_blocks.0).norm() < 1e-12);
        assert!((&fwd.lmi_blocks.1 - &rev.lmi_blocks.1).norm() < 1e-12);
    }

    #[test]
    fn zero_target_gives_zero() {
        let wc = WhitenedChannels::from_parts(
            Matrix::identity(2, 2),
            Matrix::from_row_slice(2, 2, &[1.0, 0.5, 0.0, 1.0]),
            Matrix::zeros(3, 2),
        )
        .unwrap();
        let spec = build_program(&wc, Direction::XOverY).unwrap();
        assert_eq!(spec.target.norm(), 0.0);
        let sol = solve_program(&spec, &SolverConfig::default()).unwrap();
        assert_eq!(sol.t_hat, Matrix::zeros(3, 2));
        assert_eq!(sol.objective, 0.0);
    }

    #[test]
    fn scalar_degraded_solution() {
        let wc = whitened(&fixtures::scalar_degraded());
        let cfg = SolverConfig::default();
        let r = approximate_deficiency(&wc, Direction::XOverY, &cfg).unwrap();
        assert!((r.t_hat[(0, 0)] - 0.5).abs() < 1e-12);
        assert!(r.objective.abs() < 1e-20);
        assert!((r.sigma_t_hat[(0, 0)] - 0.75).abs() < 1e-12);
        assert_eq!(r.delta_hat, 0.0);
        assert!(r.lmi_min_eig >= 0.0);
    }

    #[test]
    fn scalar_reverse_hits_the_boundary() {
        // X from Y with h_x = 2, h_y = 1: objective (t − 2)²/5, feasible set t² ≤ 5/2.
        let wc = scalar(2.0, 1.0);
        let cfg = SolverConfig::default();
        let r = approximate_deficiency(&wc, Direction::YOverX, &cfg).unwrap();
        let t = 2.5f64.sqrt();
        assert!((r.t_hat[(0, 0)] - t).abs() < 1e-10);
        assert!(r.sigma_t_hat[(0, 0)].abs() < 1e-9);
        let gap = 2.0 - t;
        let c = 2.5;
        let expected = 0.5 * (gap * gap / c + 1.0 / c + c.ln() - 1.0);
        assert!((r.delta_hat - expected).abs() < 1e-9);
    }

    #[test]
    fn counterexample_delta_is_target_information() {
        let sys = fixtures::counterexample();
        let wc = whitened(&sys);
        let r = approximate_deficiency(&wc, Direction::XOverY, &SolverConfig::default()).unwrap();
        assert!((r.sigma_t_hat[(0, 0)] - 2.0).abs() < 1e-12);
        assert!((r.delta_hat - 0.5 * LN2).abs() < 1e-12);
        assert!((r.reduced.value - 0.5 * LN2).abs() < 1e-12);
        let i_y = mutual_information(&sys, Source::Y).unwrap();
        assert!((r.delta_hat - i_y).abs() < 1e-12);
    }

    #[test]
    fn sigma_hat_clamping() {
        let small = Matrix::from_diagonal(&nalgebra::DVector::from_vec(vec![-1e-7, 1.0]));
        let clamped = clamp_psd(&small, -1e-6).unwrap();
        assert_eq!(clamped[(0, 0)], 0.0);
        assert!((clamped[(1, 1)] - 1.0).abs() < 1e-15);

        let boundary = Matrix::from_diagonal(&nalgebra::DVector::from_vec(vec![0.0, 2.0]));
        assert_eq!(clamp_psd(&boundary, -1e-6).unwrap(), boundary);

        let bad = Matrix::from_diagonal(&nalgebra::DVector::from_vec(vec![-1e-5, 1.0]));
        assert!(matches!(clamp_psd(&bad, -1e-6), Err(Error::InfeasibleSigma { .. })));

        let wc = scalar(1.0, 1.0);
        let cfg = SolverConfig::default();
        let t = Matrix::from_element(1, 1, 2.0);
        assert!(matches!(sigma_hat(&t, &wc, Direction::XOverY, &cfg), Err(Error::InfeasibleSigma { .. })));
    }

    #[test]
    fn zero_map_recovers_target_information() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let cfg = SolverConfig::default();
        for _ in 0..30 {
            let dims = Dims::new(rng.random_range(1..=5), rng.random_range(1..=5), rng.random_range(1..=5));
            let sys = fixtures::wishart_system(&mut rng, dims);
            let wc = whitened(&sys);
            for (dir, source) in [(Direction::XOverY, Source::Y), (Direction::YOverX, Source::X)] {
                let (src, dst) = dir.gains(&wc);
                let t = Matrix::zeros(dst.nrows(), src.nrows());
                let sigma = sigma_hat(&t, &wc, dir, &cfg).unwrap();
                let d = evaluate_delta_hat(&t, &sigma, &wc, dir).unwrap();
                let mi = mutual_information(&sys, source).unwrap();
                assert!((d - mi).abs() < 1e-8 * (1.0 + mi), "{d} vs {mi}");
            }
        }
    }

    #[test]
    fn reduced_objective_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let wc = degraded_and_map(&mut rng);
        let r = evaluate_reduced_objective(&wc.1, &wc.0, Direction::XOverY);
        assert!(r.value.abs() < 1e-12);

        let ce = whitened(&fixtures::counterexample());
        let r = evaluate_reduced_objective(&Matrix::zeros(1, 1), &ce, Direction::XOverY);
        assert!((r.value - 0.5 * LN2).abs() < 1e-14);
        assert!((r.constraint_min_eig - 2.0).abs() < 1e-12);

        for _ in 0..50 {
            let wc = random_channels(&mut rng, 4);
            let t = fixtures::gaussian_matrix(&mut rng, wc.ht_y.nrows(), wc.ht_x.nrows());
            assert!(evaluate_reduced_objective(&t, &wc, Direction::XOverY).value >= 0.0);
        }
    }

    fn degraded_and_map(rng: &mut ChaCha8Rng) -> (WhitenedChannels, Matrix) {
        let ht_x = fixtures::gaussian_matrix(rng, 3, 3);
        let t = fixtures::gaussian_matrix(rng, 2, 3) * 0.3;
        let ht_y = &t * &ht_x;
        let sigma_m = fixtures::random_pd(3, rng);
        (WhitenedChannels::from_parts(sigma_m, ht_x, ht_y).unwrap(), t)
    }

    #[test]
    fn splitting_matches_closed_forms() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let cfg = SolverConfig::default();
        let mut seen = [false; 2];
        for _ in 0..60 {
            let wc = random_channels(&mut rng, 4);
            for dir in [Direction::XOverY, Direction::YOverX] {
                let spec = build_program(&wc, dir).unwrap();
                let quick = solve_program(&spec, &cfg).unwrap();
                if quick.method == SolveMethod::Splitting {
                    continue;
                }
                seen[(quick.method == SolveMethod::RankOne) as usize] = true;
                let slow = solve_with(&spec, &cfg, false).unwrap();
                let scale = 1.0 + quick.objective;
                assert!((slow.objective - quick.objective).abs() < 1e-8 * scale, "{:?}", quick.method);
            }
        }
        assert!(seen[0] && seen[1]);
    }

    #[test]
    fn splitting_matches_reference_methods() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        let cfg = SolverConfig::default();
        let mut checked = 0;
        while checked < 12 {
            let wc = random_channels(&mut rng, 4);
            for dir in [Direction::XOverY, Direction::YOverX] {
                let spec = build_program(&wc, dir).unwrap();
                let sol = solve_program(&spec, &cfg).unwrap();
                if sol.method != SolveMethod::Splitting {
                    continue;
                }
                checked += 1;
                let scale = 1.0 + linalg::max_eigenvalue(&spec.lmi_blocks.0).max(linalg::max_eigenvalue(&spec.lmi_blocks.1));
                assert!(sol.lmi_min_eig >= -1e-8 * scale);
                let fista = spec.objective(&gradient_solve(&spec, 20_000));
                let admm_ref = spec.objective(&reference_solve(&spec, 5_000));
                let best_ref = fista.min(admm_ref);
                assert!(sol.objective <= best_ref * (1.0 + 1e-8) + 1e-14, "{} vs {}", sol.objective, best_ref);
                assert!(sol.objective <= spec.objective(&Matrix::zeros(spec.variable_shape().0, spec.variable_shape().1)) + 1e-8);
            }
        }
    }

    #[test]
    fn composite_covariance_is_positive() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let cfg = SolverConfig::default();
        for _ in 0..40 {
            let wc = random_channels(&mut rng, 5);
            for dir in [Direction::XOverY, Direction::YOverX] {
                let r = approximate_deficiency(&wc, dir, &cfg).unwrap();
                let composite = &r.sigma_t_hat + &r.t_hat * r.t_hat.transpose();
                assert!(linalg::min_eigenvalue(&composite) > 0.0);
                assert!(r.delta_hat >= 0.0);
                if r.reduced.constraint_min_eig >= 0.0 {
                    assert!(r.delta_hat >= r.reduced.value - 1e-9);
                }
            }
        }
    }

    #[test]
    fn invariant_under_block_transforms() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        let cfg = SolverConfig::default();
        for _ in 0..15 {
            let dims = Dims::new(rng.random_range(1..=4), rng.random_range(1..=4), rng.random_range(1..=4));
            let sys = fixtures::wishart_system(&mut rng, dims);
            let c_m = fixtures::random_invertible(dims.m, &mut rng);
            let c_x = fixtures::random_invertible(dims.x, &mut rng);
            let c_y = fixtures::random_invertible(dims.y, &mut rng);
            let moved = sys.transform_blocks(&c_m, &c_x, &c_y).unwrap();
            let (a, b) = (whitened(&sys), whitened(&moved));
            for dir in [Direction::XOverY, Direction::YOverX] {
                let da = approximate_deficiency(&a, dir, &cfg).unwrap().delta_hat;
                let db = approximate_deficiency(&b, dir, &cfg).unwrap().delta_hat;
                assert!((da - db).abs() < 1e-6, "{da} vs {db}");
            }
        }
    }

    #[test]
    fn degraded_direction_has_zero_deficiency() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let cfg = SolverConfig::default();
        for _ in 0..30 {
            let (dm, dx, dy) = (rng.random_range(1..=5), rng.random_range(1..=5), rng.random_range(1..=5));
            let wc = fixtures::degraded_channels(&mut rng, dm, dx, dy);
            let r = approximate_deficiency(&wc, Direction::XOverY, &cfg).unwrap();
            assert!(r.delta_hat <= 1e-6, "{}", r.delta_hat);
        }
    }

    #[test]
    fn config_validation() {
        let ok = SolverConfig::default();
        assert!(ok.validate().is_ok());
        for bad in [
            SolverConfig { max_iterations: 0, ..ok },
            SolverConfig { tolerance: 0.0, ..ok },
            SolverConfig { tolerance: f64::NAN, ..ok },
            SolverConfig { relaxation: 2.0, ..ok },
            SolverConfig { relaxation: 0.0, ..ok },
            SolverConfig { eig_clamp_floor: 1e-3, ..ok },
        ] {
            assert!(matches!(bad.validate(), Err(Error::InvalidConfig(_))));
        }
    }

    #[test]
    fn iteration_cap_reports_non_convergence() {
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        let cfg = SolverConfig { max_iterations: 1, ..SolverConfig::default() };
        loop {
            let wc = random_channels(&mut rng, 5);
            let spec = build_program(&wc, Direction::XOverY).unwrap();
            let sol = solve_program(&spec, &cfg).unwrap();
            if sol.method == SolveMethod::Splitting {
                assert!(!sol.converged);
                assert_eq!(sol.iterations, 1);
                assert!(sol.lmi_min_eig >= -1e-8 * (1.0 + spec.constraint_scale()));
                break;
            }
        }
    }
}

//! Joint Gaussian systems `(M, X, Y)`, their channel parameterization, and
//! closed-form information quantities.

use nalgebra::{Cholesky, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};

const SYMMETRY_TOL: f64 = 1e-8;
const PD_REL_TOL: f64 = 1e-10;
const WHITEN_REL_FLOOR: f64 = 1e-12;
const MI_CLAMP: f64 = 1e-10;
const RIDGE_REL: f64 = 1e-8;

/// Block sizes of the joint vector, in the fixed order `[M | X | Y]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Dims {
    pub m: usize,
    pub x: usize,
    pub y: usize,
}

impl Dims {
    pub fn new(m: usize, x: usize, y: usize) -> Self {
        Dims { m, x, y }
    }

    pub fn total(&self) -> usize {
        self.m + self.x + self.y
    }

    fn range(&self, block: Block) -> std::ops::Range<usize> {
        match block {
            Block::M => 0..self.m,
            Block::X => self.m..self.m + self.x,
            Block::Y => self.m + self.x..self.total(),
        }
    }
}

impl std::fmt::Display for Dims {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {}, {})", self.m, self.x, self.y)
    }
}

impl std::str::FromStr for Dims {
    type Err = Error;

    /// Parses `"dM,dX,dY"`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<usize> = s
            .split(',')
            .map(|p| p.trim().parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Parse(format!("dims {s:?}: {e}")))?;
        match parts.as_slice() {
            [m, x, y] => Ok(Dims::new(*m, *x, *y)),
            _ => Err(Error::Parse(format!("dims {s:?}: expected dM,dX,dY"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Block {
    M,
    X,
    Y,
}

/// Which observation the information about `M` is measured from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Source {
    X,
    Y,
    XY,
}

/// A zero-mean jointly Gaussian `(M, X, Y)` described by its full covariance.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussianSystem {
    sigma: Matrix,
    dims: Dims,
}

impl GaussianSystem {
    /// Validates and symmetrizes a raw covariance matrix.
    pub fn new(raw: Matrix, dims: Dims) -> Result<Self> {
        if dims.m == 0 || dims.x == 0 || dims.y == 0 {
            return Err(Error::DimensionMismatch(format!("block sizes must be positive, got {dims}")));
        }
        if !raw.is_square() || raw.nrows() != dims.total() {
            return Err(Error::DimensionMismatch(format!(
                "matrix is {}x{} but dims {dims} require {d}x{d}",
                raw.nrows(),
                raw.ncols(),
                d = dims.total()
            )));
        }
        if raw.iter().any(|v| !v.is_finite()) {
            return Err(Error::Parse("covariance contains non-finite entries".into()));
        }
        let scale = linalg::max_abs(&raw);
        let asymmetry = linalg::max_abs(&(&raw - raw.transpose()));
        let tolerance = SYMMETRY_TOL * scale;
        if asymmetry > tolerance {
            return Err(Error::AsymmetryTooLarge { asymmetry, tolerance });
        }
        let sigma = linalg::symmetrize(&raw);
        let threshold = PD_REL_TOL * linalg::trace(&sigma) / dims.total() as f64;
        let min_eigenvalue = linalg::min_eigenvalue(&sigma);
        if !(min_eigenvalue > threshold) {
            return Err(Error::NotPositiveDefinite { min_eigenvalue, threshold });
        }
        Ok(GaussianSystem { sigma, dims })
    }

    /// Assembles the joint covariance of `M ~ N(0, Σ_M)`, `X = H_X M + N_X`,
    /// `Y = H_Y M + N_Y` with noise covariances `Σ_{X|M}`, `Σ_{Y|M}` and an
    /// optional noise cross-covariance `Cov(N_X, N_Y)` (zero if absent).
    pub fn from_channels(
        sigma_m: &Matrix,
        h_x: &Matrix,
        h_y: &Matrix,
        noise_x: &Matrix,
        noise_y: &Matrix,
        noise_xy: Option<&Matrix>,
    ) -> Result<Self> {
        let dims = Dims::new(sigma_m.nrows(), h_x.nrows(), h_y.nrows());
        if h_x.ncols() != dims.m || h_y.ncols() != dims.m {
            return Err(Error::DimensionMismatch("channel gains must have d_M columns".into()));
        }
        let mut sigma = Matrix::zeros(dims.total(), dims.total());
        let (rm, rx, ry) = (dims.range(Block::M), dims.range(Block::X), dims.range(Block::Y));
        let cross_xy = match noise_xy {
            Some(c) => h_x * sigma_m * h_y.transpose() + c,
            None => h_x * sigma_m * h_y.transpose(),
        };
        let blocks = [
            (rm.clone(), rm.clone(), sigma_m.clone()),
            (rx.clone(), rm.clone(), h_x * sigma_m),
            (ry.clone(), rm.clone(), h_y * sigma_m),
            (rx.clone(), rx.clone(), h_x * sigma_m * h_x.transpose() + noise_x),
            (ry.clone(), ry.clone(), h_y * sigma_m * h_y.transpose() + noise_y),
            (rx.clone(), ry.clone(), cross_xy),
        ];
        for (r, c, b) in blocks {
            sigma.view_mut((r.start, c.start), (r.len(), c.len())).copy_from(&b);
            if r != c {
                sigma.view_mut((c.start, r.start), (c.len(), r.len())).copy_from(&b.transpose());
            }
        }
        GaussianSystem::new(sigma, dims)
    }

    pub fn sigma(&self) -> &Matrix {
        &self.sigma
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn block(&self, rows: Block, cols: Block) -> Matrix {
        let (r, c) = (self.dims.range(rows), self.dims.range(cols));
        self.sigma.view((r.start, c.start), (r.len(), c.len())).into_owned()
    }

    fn source_indices(&self, source: Source) -> Vec<usize> {
        match source {
            Source::X => self.dims.range(Block::X).collect(),
            Source::Y => self.dims.range(Block::Y).collect(),
            Source::XY => (self.dims.m..self.dims.total()).collect(),
        }
    }

    /// The same system with the X and Y blocks exchanged.
    pub fn swap_sources(&self) -> Self {
        let d = self.dims;
        let order: Vec<usize> = self
            .dims
            .range(Block::M)
            .chain(d.range(Block::Y))
            .chain(d.range(Block::X))
            .collect();
        let sigma = self.sigma.select_rows(&order).select_columns(&order);
        GaussianSystem { sigma, dims: Dims::new(d.m, d.y, d.x) }
    }

    /// Applies invertible linear maps block-wise: `M → C_M M`, `X → C_X X`, `Y → C_Y Y`.
    pub fn transform_blocks(&self, c_m: &Matrix, c_x: &Matrix, c_y: &Matrix) -> Result<Self> {
        let d = self.dims;
        if c_m.shape() != (d.m, d.m) || c_x.shape() != (d.x, d.x) || c_y.shape() != (d.y, d.y) {
            return Err(Error::DimensionMismatch("block transforms must be square".into()));
        }
        let mut t = Matrix::zeros(d.total(), d.total());
        for (b, c) in [(Block::M, c_m), (Block::X, c_x), (Block::Y, c_y)] {
            let r = d.range(b);
            t.view_mut((r.start, r.start), (r.len(), r.len())).copy_from(c);
        }
        GaussianSystem::new(&t * &self.sigma * t.transpose(), d)
    }

    /// Adds `ε·I`, `ε = 1e-8·trace(Σ)/d`, to the X and/or Y diagonal block
    /// whose noise covariance fails the positive definiteness check. Returns
    /// the adjusted system and whether anything changed.
    pub fn with_noise_ridge(&self) -> (Self, bool) {
        let eps = RIDGE_REL * linalg::trace(&self.sigma) / self.dims.total() as f64;
        let mut sigma = self.sigma.clone();
        let mut changed = false;
        for block in [Block::X, Block::Y] {
            let noise = self.conditional_noise(block);
            if noise_check(&noise).is_err() {
                for i in self.dims.range(block) {
                    sigma[(i, i)] += eps;
                }
                changed = true;
            }
        }
        (GaussianSystem { sigma, dims: self.dims }, changed)
    }

    fn conditional_noise(&self, block: Block) -> Matrix {
        let s_m = self.block(Block::M, Block::M);
        let s_zm = self.block(block, Block::M);
        let s_z = self.block(block, block);
        let chol = Cholesky::new(s_m).expect("Σ_M is a principal block of a PD matrix");
        let h = chol.solve(&s_zm.transpose()).transpose();
        linalg::symmetrize(&(s_z - h * s_zm.transpose()))
    }
}

fn noise_check(noise: &Matrix) -> std::result::Result<(), f64> {
    let min = linalg::min_eigenvalue(noise);
    let thr = PD_REL_TOL * linalg::trace(noise).max(0.0) / noise.nrows() as f64;
    if min > thr && min > 0.0 {
        Ok(())
    } else {
        Err(min)
    }
}

/// Linear-Gaussian channel parameters: `X = H_X M + N_X`, `N_X ~ N(0, Σ_{X|M})`, likewise for Y.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelForm {
    pub sigma_m: Matrix,
    pub h_x: Matrix,
    pub h_y: Matrix,
    pub sigma_x_given_m: Matrix,
    pub sigma_y_given_m: Matrix,
}

/// Extracts channel gains and noise covariances by Gaussian conditioning.
pub fn channel_form(sys: &GaussianSystem) -> Result<ChannelForm> {
    let sigma_m = sys.block(Block::M, Block::M);
    let chol = Cholesky::new(sigma_m.clone()).ok_or(Error::SingularCovariance)?;
    let gain = |b: Block| chol.solve(&sys.block(b, Block::M).transpose()).transpose();
    let h_x = gain(Block::X);
    let h_y = gain(Block::Y);
    let sigma_x_given_m = sys.conditional_noise(Block::X);
    let sigma_y_given_m = sys.conditional_noise(Block::Y);
    noise_check(&sigma_x_given_m).map_err(|min_eigenvalue| Error::SingularNoise { block: "X", min_eigenvalue })?;
    noise_check(&sigma_y_given_m).map_err(|min_eigenvalue| Error::SingularNoise { block: "Y", min_eigenvalue })?;
    Ok(ChannelForm { sigma_m, h_x, h_y, sigma_x_given_m, sigma_y_given_m })
}

impl ChannelForm {
    /// Rebuilds the `(M, X)` joint covariance from the channel parameters.
    pub fn reconstruct_mx(&self) -> Matrix {
        let (dm, dx) = (self.sigma_m.nrows(), self.h_x.nrows());
        let mut out = Matrix::zeros(dm + dx, dm + dx);
        let cross = &self.h_x * &self.sigma_m;
        out.view_mut((0, 0), (dm, dm)).copy_from(&self.sigma_m);
        out.view_mut((dm, 0), (dx, dm)).copy_from(&cross);
        out.view_mut((0, dm), (dm, dx)).copy_from(&cross.transpose());
        out.view_mut((dm, dm), (dx, dx))
            .copy_from(&(&cross * self.h_x.transpose() + &self.sigma_x_given_m));
        out
    }
}

/// Channels rescaled so both noise covariances are the identity.
#[derive(Clone, Debug, PartialEq)]
pub struct WhitenedChannels {
    pub sigma_m: Matrix,
    pub ht_x: Matrix,
    pub ht_y: Matrix,
}

impl WhitenedChannels {
    /// Builds whitened channels directly from `Σ_M` and unit-noise gains.
    pub fn from_parts(sigma_m: Matrix, ht_x: Matrix, ht_y: Matrix) -> Result<Self> {
        let dm = sigma_m.nrows();
        if !sigma_m.is_square() || ht_x.ncols() != dm || ht_y.ncols() != dm {
            return Err(Error::DimensionMismatch("gains must have d_M columns".into()));
        }
        Ok(WhitenedChannels { sigma_m: linalg::symmetrize(&sigma_m), ht_x, ht_y })
    }

    pub fn gram_x(&self) -> Matrix {
        self.ht_x.transpose() * &self.ht_x
    }

    pub fn gram_y(&self) -> Matrix {
        self.ht_y.transpose() * &self.ht_y
    }

    pub fn swapped(&self) -> Self {
        WhitenedChannels { sigma_m: self.sigma_m.clone(), ht_x: self.ht_y.clone(), ht_y: self.ht_x.clone() }
    }

    /// The joint system these channels describe, with conditionally independent noise.
    pub fn to_system(&self) -> Result<GaussianSystem> {
        let ix = Matrix::identity(self.ht_x.nrows(), self.ht_x.nrows());
        let iy = Matrix::identity(self.ht_y.nrows(), self.ht_y.nrows());
        GaussianSystem::from_channels(&self.sigma_m, &self.ht_x, &self.ht_y, &ix, &iy, None)
    }
}

pub fn whiten(cf: &ChannelForm) -> Result<WhitenedChannels> {
    let isqrt = |noise: &Matrix, block: &'static str| {
        let floor = WHITEN_REL_FLOOR * linalg::trace(noise).max(0.0) / noise.nrows() as f64;
        linalg::inv_sqrt_pd(noise, floor)
            .ok_or_else(|| Error::SingularNoise { block, min_eigenvalue: linalg::min_eigenvalue(noise) })
    };
    let ht_x = isqrt(&cf.sigma_x_given_m, "X")? * &cf.h_x;
    let ht_y = isqrt(&cf.sigma_y_given_m, "Y")? * &cf.h_y;
    Ok(WhitenedChannels { sigma_m: cf.sigma_m.clone(), ht_x, ht_y })
}

/// `I(M; Z)` in nats for `Z ∈ {X, Y, (X,Y)}`.
pub fn mutual_information(sys: &GaussianSystem, source: Source) -> Result<f64> {
    let idx = sys.source_indices(source);
    let m_idx: Vec<usize> = (0..sys.dims.m).collect();
    let s_m = sys.sigma.select_rows(&m_idx).select_columns(&m_idx);
    let s_z = sys.sigma.select_rows(&idx).select_columns(&idx);
    let s_mz = sys.sigma.select_rows(&m_idx).select_columns(&idx);
    let chol = Cholesky::new(s_z).ok_or(Error::SingularConditional)?;
    let cond = linalg::symmetrize(&(&s_m - &s_mz * chol.solve(&s_mz.transpose())));
    let ld_m = linalg::logdet_pd(&s_m).ok_or(Error::SingularCovariance)?;
    let ld_cond = linalg::logdet_pd(&cond).ok_or(Error::SingularConditional)?;
    let mi = 0.5 * (ld_m - ld_cond);
    if !mi.is_finite() {
        return Err(Error::SingularConditional);
    }
    Ok(if (-MI_CLAMP..0.0).contains(&mi) { 0.0 } else { mi })
}

/// `KL(N(μ₁, Σ₁) ‖ N(μ₂, Σ₂))` in nats.
pub fn kl_mvn(mean1: &DVector<f64>, cov1: &Matrix, mean2: &DVector<f64>, cov2: &Matrix) -> Result<f64> {
    let n = mean1.len();
    if mean2.len() != n || cov1.shape() != (n, n) || cov2.shape() != (n, n) {
        return Err(Error::DimensionMismatch("kl_mvn arguments disagree in dimension".into()));
    }
    let ld1 = linalg::logdet_pd(cov1).ok_or(Error::SingularCovariance)?;
    let ld2 = linalg::logdet_pd(cov2).ok_or(Error::SingularCovariance)?;
    let chol2 = Cholesky::new(linalg::symmetrize(cov2)).ok_or(Error::SingularCovariance)?;
    let diff = mean1 - mean2;
    let mahal = diff.dot(&chol2.solve(&diff));
    let tr = linalg::trace(&chol2.solve(cov1));
    let kl = 0.5 * (ld2 - ld1 - n as f64 + tr + mahal);
    Ok(if (-MI_CLAMP..0.0).contains(&kl) { 0.0 } else { kl })
}

//! Reference systems and random generators shared by tests, examples and
//! the acceptance suite.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::experiments::sample_wishart;
use crate::gauss::{Dims, GaussianSystem, WhitenedChannels};
use crate::linalg::{self, Matrix};

/// `M = (M₁, M₂)` standard normal, `X = M₁ + Z₁`, `Y = M₂ + Z₂`, unit noises.
/// Neither source is Blackwell sufficient for the other.
pub fn counterexample() -> GaussianSystem {
    #[rustfmt::skip]
    let s = Matrix::from_row_slice(4, 4, &[
        1.0, 0.0, 1.0, 0.0,
        0.0, 1.0, 0.0, 1.0,
        1.0, 0.0, 2.0, 0.0,
        0.0, 1.0, 0.0, 2.0,
    ]);
    GaussianSystem::new(s, Dims::new(2, 1, 1)).expect("counterexample is PD")
}

/// Scalar system `X = 2M + Z_X`, `Y = M + Z_Y` with unit prior and noises.
pub fn scalar_degraded() -> GaussianSystem {
    let one = Matrix::identity(1, 1);
    GaussianSystem::from_channels(
        &one,
        &Matrix::from_element(1, 1, 2.0),
        &one,
        &one,
        &one,
        None,
    )
    .expect("PD by construction")
}

pub fn gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| rng.sample(StandardNormal))
}

/// Random PD matrix: a Wishart draw plus the identity.
pub fn random_pd<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Matrix {
    sample_wishart(d, rng).0 + Matrix::identity(d, d)
}

/// Random invertible matrix (Gaussian entries, bounded away from singular).
pub fn random_invertible<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Matrix {
    loop {
        let c = gaussian_matrix(rng, d, d);
        let svd = c.clone().svd(false, false);
        if svd.singular_values.min() > 0.1 * svd.singular_values.max() {
            return c;
        }
    }
}

/// System sampled the way the experiment harness does it.
pub fn wishart_system<R: Rng + ?Sized>(rng: &mut R, dims: Dims) -> GaussianSystem {
    let (s, _) = sample_wishart(dims.total(), rng);
    GaussianSystem::new(s, dims).expect("Wishart draw is PD")
}

/// Whitened channels with `H̃_Y = T H̃_X` for a random contraction `T`
/// (`T Tᵀ ⪯ I`), so that X is Blackwell sufficient for Y.
pub fn degraded_channels<R: Rng + ?Sized>(rng: &mut R, dm: usize, dx: usize, dy: usize) -> WhitenedChannels {
    let sigma_m = sample_wishart(dm, rng).0 + Matrix::identity(dm, dm) * 0.1;
    let ht_x = gaussian_matrix(rng, dx, dm);
    let raw = gaussian_matrix(rng, dy, dx);
    let shrink: f64 = rng.random_range(0.2..1.0);
    let t = raw.clone() * (shrink / linalg::spectral_norm(&raw).max(1e-12));
    let ht_y = &t * &ht_x;
    WhitenedChannels::from_parts(sigma_m, ht_x, ht_y).expect("shapes agree")
}

/// Whitened channels in which X observes only the first half of a mixed `M`
/// and Y only the second half, so neither source dominates the other.
pub fn split_channels<R: Rng + ?Sized>(rng: &mut R, dm: usize, dx: usize, dy: usize) -> WhitenedChannels {
    assert!(dm >= 2);
    let half = dm / 2;
    let mut ht_x = Matrix::zeros(dx, dm);
    let mut ht_y = Matrix::zeros(dy, dm);
    ht_x.view_mut((0, 0), (dx, half)).copy_from(&gaussian_matrix(rng, dx, half));
    ht_y.view_mut((0, half), (dy, dm - half)).copy_from(&gaussian_matrix(rng, dy, dm - half));
    let mix = random_invertible(dm, rng);
    let mix_inv = mix.clone().try_inverse().expect("invertible");
    // M' = mix · M keeps the structure but hides the split from the coordinates.
    let sigma_m = &mix * (sample_wishart(dm, rng).0 + Matrix::identity(dm, dm)) * mix.transpose();
    WhitenedChannels::from_parts(sigma_m, ht_x * &mix_inv, ht_y * &mix_inv).expect("shapes agree")
}

//! Blackwell sufficiency between the two whitened channels, and a
//! degrading map witnessing it.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gauss::WhitenedChannels;
use crate::linalg::{self, Matrix};

const REL_TOL: f64 = 1e-9;
const PINV_CUTOFF: f64 = 1e-10;
const WITNESS_RESIDUAL_TOL: f64 = 1e-6;
const WITNESS_PSD_TOL: f64 = 1e-8;

/// Which channel is asked to reproduce the other.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    /// X is processed to imitate Y (`X ⪰_M Y`, deficiency `δ(M : Y \ X)`).
    XOverY,
    /// Y is processed to imitate X.
    YOverX,
}

impl Direction {
    pub fn reversed(self) -> Self {
        match self {
            Direction::XOverY => Direction::YOverX,
            Direction::YOverX => Direction::XOverY,
        }
    }

    /// `(source gain, target gain)` for this direction.
    pub(crate) fn gains<'a>(&self, wc: &'a WhitenedChannels) -> (&'a Matrix, &'a Matrix) {
        match self {
            Direction::XOverY => (&wc.ht_x, &wc.ht_y),
            Direction::YOverX => (&wc.ht_y, &wc.ht_x),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DegradednessReport {
    pub x_over_y: bool,
    pub y_over_x: bool,
    /// Smallest eigenvalue of `H̃_Xᵀ H̃_X − H̃_Yᵀ H̃_Y`.
    pub margin_x_over_y: f64,
    pub margin_y_over_x: f64,
    pub tolerance_used: f64,
}

impl DegradednessReport {
    pub fn holds(&self, direction: Direction) -> bool {
        match direction {
            Direction::XOverY => self.x_over_y,
            Direction::YOverX => self.y_over_x,
        }
    }
}

/// Tests the Gram ordering `H̃_Xᵀ H̃_X ⪰ H̃_Yᵀ H̃_Y` in both directions.
pub fn check_degraded(wc: &WhitenedChannels) -> DegradednessReport {
    let gx = wc.gram_x();
    let gy = wc.gram_y();
    let tolerance_used = REL_TOL * linalg::max_eigenvalue(&gx).max(linalg::max_eigenvalue(&gy)).max(1.0);
    let margin_x_over_y = linalg::min_eigenvalue(&(&gx - &gy));
    let margin_y_over_x = linalg::min_eigenvalue(&(&gy - &gx));
    DegradednessReport {
        x_over_y: margin_x_over_y >= -tolerance_used,
        y_over_x: margin_y_over_x >= -tolerance_used,
        margin_x_over_y,
        margin_y_over_x,
        tolerance_used,
    }
}

/// Least-norm map `T` with `T·H̃_src = H̃_dst` and `T Tᵀ ⪯ I`, so that
/// `N(T x, I − T Tᵀ)` applied to the source reproduces the target channel.
pub fn degradation_witness(wc: &WhitenedChannels, direction: Direction) -> Result<Matrix> {
    if !check_degraded(wc).holds(direction) {
        return Err(Error::NotDegraded);
    }
    let (src, dst) = direction.gains(wc);
    let t = dst * linalg::pinv(src, PINV_CUTOFF);
    let residual = (&t * src - dst).norm();
    if residual > WITNESS_RESIDUAL_TOL * dst.norm() {
        return Err(Error::WitnessVerificationFailed(format!(
            "‖T·H_src − H_dst‖_F = {residual:e} exceeds {:e}",
            WITNESS_RESIDUAL_TOL * dst.norm()
        )));
    }
    let noise = Matrix::identity(t.nrows(), t.nrows()) - &t * t.transpose();
    let min = linalg::min_eigenvalue(&noise);
    if min < -WITNESS_PSD_TOL {
        return Err(Error::WitnessVerificationFailed(format!(
            "smallest eigenvalue of I − TTᵀ is {min:e}"
        )));
    }
    Ok(t)
}

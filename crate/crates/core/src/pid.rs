//! The deficiency-based decomposition assembled from both directional
//! surrogate deficiencies, plus normalization onto the 3-simplex.

use serde::{Deserialize, Serialize};

use crate::blackwell::Direction;
use crate::deficiency::{approximate_deficiency, DeficiencyResult, SolverConfig};
use crate::error::{Error, Result};
use crate::gauss::{channel_form, whiten, GaussianSystem, WhitenedChannels};
use crate::mmi::{MutualInformations, PidAtoms, PidLabel};

/// Atoms below this are reported as negative.
pub const NONNEGATIVITY_THRESHOLD: f64 = -1e-6;
/// An atom counts as unique information when it exceeds this fraction of `I(M;(X,Y))`.
pub const UNIQUENESS_REL_THRESHOLD: f64 = 1e-6;
const MIN_TOTAL_MI: f64 = 1e-12;

/// Atoms divided by the total mutual information.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormalizedAtoms {
    pub ui_x_bar: f64,
    pub ui_y_bar: f64,
    pub ri_bar: f64,
    pub si_bar: f64,
}

impl NormalizedAtoms {
    pub fn as_array(&self) -> [f64; 4] {
        [self.ui_x_bar, self.ui_y_bar, self.ri_bar, self.si_bar]
    }
}

pub fn normalize(atoms: &PidAtoms) -> Result<NormalizedAtoms> {
    let t = atoms.total_mi;
    if !(t > MIN_TOTAL_MI) {
        return Err(Error::DegenerateTotalMI(t));
    }
    Ok(NormalizedAtoms { ui_x_bar: atoms.ui_x / t, ui_y_bar: atoms.ui_y / t, ri_bar: atoms.ri / t, si_bar: atoms.si / t })
}

/// Vertices of a unit-edge regular tetrahedron, in the order UI_X, UI_Y, RI, SI.
pub const SIMPLEX_VERTICES: [[f64; 3]; 4] = [
    [0.0, 0.0, 0.0],
    [1.0, 0.0, 0.0],
    [0.5, 0.866_025_403_784_438_6, 0.0],
    [0.5, 0.288_675_134_594_812_9, 0.816_496_580_927_726],
];

/// Barycentric-to-Cartesian embedding of normalized atoms.
pub fn simplex_coords(n: &NormalizedAtoms) -> [f64; 3] {
    let w = n.as_array();
    let mut p = [0.0; 3];
    for (wi, v) in w.iter().zip(SIMPLEX_VERTICES.iter()) {
        for k in 0..3 {
            p[k] += wi * v[k];
        }
    }
    p
}

/// Per-atom check against [`NONNEGATIVITY_THRESHOLD`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NonnegativityVerdict {
    pub ui_x: bool,
    pub ui_y: bool,
    pub ri: bool,
    pub si: bool,
}

impl NonnegativityVerdict {
    pub fn of(atoms: &PidAtoms) -> Self {
        let ok = |v: f64| v >= NONNEGATIVITY_THRESHOLD;
        NonnegativityVerdict { ui_x: ok(atoms.ui_x), ui_y: ok(atoms.ui_y), ri: ok(atoms.ri), si: ok(atoms.si) }
    }

    pub fn all(&self) -> bool {
        self.ui_x && self.ui_y && self.ri && self.si
    }
}

/// Whether an atom value counts as unique information for a given total.
pub fn has_unique_information(atom: f64, total_mi: f64) -> bool {
    atom > UNIQUENESS_REL_THRESHOLD * total_mi
}

/// The deficiency-based decomposition together with both directional solves.
#[derive(Clone, Debug)]
pub struct DeltaHatPid {
    pub atoms: PidAtoms,
    pub mutual_information: MutualInformations,
    /// `δ̂(M : Y \ X)`: Y approximated from X.
    pub y_from_x: DeficiencyResult,
    /// `δ̂(M : X \ Y)`: X approximated from Y.
    pub x_from_y: DeficiencyResult,
    pub nonnegative: NonnegativityVerdict,
}

impl DeltaHatPid {
    pub fn converged(&self) -> bool {
        self.y_from_x.converged && self.x_from_y.converged
    }
}

pub fn delta_hat_pid(sys: &GaussianSystem, cfg: &SolverConfig) -> Result<DeltaHatPid> {
    let mi = MutualInformations::of(sys)?;
    let wc = whiten(&channel_form(sys)?)?;
    delta_hat_pid_from_parts(&wc, mi, cfg)
}

/// Same as [`delta_hat_pid`] when the whitened channels and mutual
/// informations are already at hand.
pub fn delta_hat_pid_from_parts(
    wc: &WhitenedChannels,
    mi: MutualInformations,
    cfg: &SolverConfig,
) -> Result<DeltaHatPid> {
    let (y_from_x, x_from_y) = rayon::join(
        || approximate_deficiency(wc, Direction::XOverY, cfg),
        || approximate_deficiency(wc, Direction::YOverX, cfg),
    );
    let (y_from_x, x_from_y) = (y_from_x?, x_from_y?);
    let via_x = mi.x - x_from_y.delta_hat;
    let via_y = mi.y - y_from_x.delta_hat;
    // ties keep the first argument
    let ri = if via_x <= via_y { via_x } else { via_y };
    let atoms = PidAtoms::from_redundancy(ri, mi.x, mi.y, mi.xy, PidLabel::DeltaHat);
    Ok(DeltaHatPid { nonnegative: NonnegativityVerdict::of(&atoms), atoms, mutual_information: mi, y_from_x, x_from_y })
}

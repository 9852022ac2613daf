//! Minimum-mutual-information decomposition.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::gauss::{mutual_information, GaussianSystem, Source};

const TIE_TOL: f64 = 1e-12;
const ATOM_CLAMP: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PidLabel {
    #[serde(rename = "MMI")]
    Mmi,
    #[serde(rename = "DELTA_HAT")]
    DeltaHat,
}

impl std::fmt::Display for PidLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            PidLabel::Mmi => "MMI",
            PidLabel::DeltaHat => "DELTA_HAT",
        })
    }
}

/// The four atoms of a bivariate decomposition of `I(M; (X, Y))`, in nats.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PidAtoms {
    pub ui_x: f64,
    pub ui_y: f64,
    pub ri: f64,
    pub si: f64,
    pub total_mi: f64,
    pub label: PidLabel,
}

impl PidAtoms {
    /// Fills in the unique and synergistic atoms from a redundancy value and
    /// the three mutual informations.
    pub fn from_redundancy(ri: f64, mi_x: f64, mi_y: f64, mi_xy: f64, label: PidLabel) -> Self {
        let ui_x = mi_x - ri;
        let ui_y = mi_y - ri;
        let si = mi_xy - ui_x - ui_y - ri;
        PidAtoms { ui_x, ui_y, ri, si, total_mi: mi_xy, label }
    }

    pub fn atoms(&self) -> [f64; 4] {
        [self.ui_x, self.ui_y, self.ri, self.si]
    }

    pub fn swapped(&self) -> Self {
        PidAtoms { ui_x: self.ui_y, ui_y: self.ui_x, ..self.clone() }
    }
}

/// Mutual informations `I(M;X)`, `I(M;Y)`, `I(M;(X,Y))`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MutualInformations {
    pub x: f64,
    pub y: f64,
    pub xy: f64,
}

impl MutualInformations {
    pub fn of(sys: &GaussianSystem) -> Result<Self> {
        Ok(MutualInformations {
            x: mutual_information(sys, Source::X)?,
            y: mutual_information(sys, Source::Y)?,
            xy: mutual_information(sys, Source::XY)?,
        })
    }
}

/// Redundancy as the smaller of the two mutual informations.
pub fn mmi_pid(sys: &GaussianSystem) -> Result<PidAtoms> {
    Ok(mmi_from_mi(&MutualInformations::of(sys)?))
}

pub(crate) fn mmi_from_mi(mi: &MutualInformations) -> PidAtoms {
    let x_is_min = mi.x <= mi.y || (mi.x - mi.y).abs() < TIE_TOL;
    let ri = if x_is_min { mi.x } else { mi.y };
    let mut atoms = PidAtoms::from_redundancy(ri, mi.x, mi.y, mi.xy, PidLabel::Mmi);
    if x_is_min {
        atoms.ui_x = 0.0;
    } else {
        atoms.ui_y = 0.0;
    }
    if (-ATOM_CLAMP..0.0).contains(&atoms.si) {
        atoms.si = 0.0;
    }
    atoms
}

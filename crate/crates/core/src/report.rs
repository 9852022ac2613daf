//! Machine-readable JSON output.

use serde::{Deserialize, Serialize};

use crate::blackwell::DegradednessReport;
use crate::deficiency::{DeficiencyResult, SolveMethod};
use crate::mmi::{MutualInformations, PidAtoms, PidLabel};
use crate::pid::{normalize, DeltaHatPid, NonnegativityVerdict};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Units {
    #[default]
    Nats,
    Bits,
}

impl Units {
    pub fn convert(self, nats: f64) -> f64 {
        match self {
            Units::Nats => nats,
            Units::Bits => nats / std::f64::consts::LN_2,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AtomsJson {
    pub ui_x: f64,
    pub ui_y: f64,
    pub ri: f64,
    pub si: f64,
}

impl AtomsJson {
    fn of(a: &PidAtoms, units: Units) -> Self {
        AtomsJson { ui_x: units.convert(a.ui_x), ui_y: units.convert(a.ui_y), ri: units.convert(a.ri), si: units.convert(a.si) }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormalizedJson {
    pub ui_x: Option<f64>,
    pub ui_y: Option<f64>,
    pub ri: Option<f64>,
    pub si: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DirectionDiagnostics {
    pub delta_hat: f64,
    pub objective: f64,
    pub iterations: usize,
    pub primal_residual: f64,
    pub lmi_min_eig: f64,
    pub converged: bool,
    pub method: SolveMethod,
    pub reduced_objective: f64,
    pub reduced_constraint_min_eig: f64,
}

impl DirectionDiagnostics {
    fn of(r: &DeficiencyResult, units: Units) -> Self {
        DirectionDiagnostics {
            delta_hat: units.convert(r.delta_hat),
            objective: r.objective,
            iterations: r.iterations,
            primal_residual: r.primal_residual,
            lmi_min_eig: r.lmi_min_eig,
            converged: r.converged,
            method: r.method,
            reduced_objective: units.convert(r.reduced.value),
            reduced_constraint_min_eig: r.reduced.constraint_min_eig,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    /// Y approximated from X.
    pub y_from_x: DirectionDiagnostics,
    /// X approximated from Y.
    pub x_from_y: DirectionDiagnostics,
}

/// The shared decomposition schema. `total_mi` is in `units`; `nats` and
/// `bits` are always both present.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PidJson {
    pub label: PidLabel,
    pub units: Units,
    pub nats: AtomsJson,
    pub bits: AtomsJson,
    pub normalized: NormalizedJson,
    pub total_mi: f64,
    pub nonnegative: NonnegativityVerdict,
    pub diagnostics: Option<Diagnostics>,
}

impl PidJson {
    pub fn from_atoms(atoms: &PidAtoms, units: Units, diagnostics: Option<Diagnostics>) -> Self {
        let n = normalize(atoms).ok();
        PidJson {
            label: atoms.label,
            units,
            nats: AtomsJson::of(atoms, Units::Nats),
            bits: AtomsJson::of(atoms, Units::Bits),
            normalized: NormalizedJson {
                ui_x: n.map(|n| n.ui_x_bar),
                ui_y: n.map(|n| n.ui_y_bar),
                ri: n.map(|n| n.ri_bar),
                si: n.map(|n| n.si_bar),
            },
            total_mi: units.convert(atoms.total_mi),
            nonnegative: NonnegativityVerdict::of(atoms),
            diagnostics,
        }
    }

    pub fn from_delta_hat(p: &DeltaHatPid, units: Units) -> Self {
        let diag = Diagnostics {
            y_from_x: DirectionDiagnostics::of(&p.y_from_x, units),
            x_from_y: DirectionDiagnostics::of(&p.x_from_y, units),
        };
        PidJson::from_atoms(&p.atoms, units, Some(diag))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlackwellJson {
    pub x_over_y: bool,
    pub y_over_x: bool,
    /// `[margin_x_over_y, margin_y_over_x]`.
    pub margins: [f64; 2],
    pub tolerance: f64,
}

impl From<&DegradednessReport> for BlackwellJson {
    fn from(r: &DegradednessReport) -> Self {
        BlackwellJson {
            x_over_y: r.x_over_y,
            y_over_x: r.y_over_x,
            margins: [r.margin_x_over_y, r.margin_y_over_x],
            tolerance: r.tolerance_used,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MutualInformationJson {
    pub x: f64,
    pub y: f64,
    pub xy: f64,
}

impl MutualInformationJson {
    pub fn of(mi: &MutualInformations, units: Units) -> Self {
        MutualInformationJson { x: units.convert(mi.x), y: units.convert(mi.y), xy: units.convert(mi.xy) }
    }
}

/// Output of `compute`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComputeJson {
    pub units: Units,
    pub mutual_information: MutualInformationJson,
    pub delta_hat: PidJson,
    pub mmi: PidJson,
    pub blackwell: BlackwellJson,
}

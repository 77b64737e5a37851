//! Scenario files: one JSON document naming an experiment, its parameters
//! and a seed. Unknown fields are rejected.

mod report;
mod run;

pub use report::{emit_figure_data, Event, EventKind, Metadata, Report, Scalar, Series};
pub use run::run_scenario;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::teleport::MAX_RESOURCE_PHOTONS;

pub const SCENARIO_VERSION: u32 = 1;

/// Environment variable holding the default output directory of the CLI.
pub const OUT_DIR_ENV: &str = "LOFOCK_OUT_DIR";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub version: u32,
    pub name: String,
    pub seed: u64,
    pub experiment: Experiment,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Experiment {
    /// NS gate on random single-mode inputs with at most two photons.
    NsDemo {
        #[serde(default = "defaults::inputs")]
        inputs: usize,
        /// Re-derive the network angles instead of using the frozen ones.
        #[serde(default)]
        solve: bool,
    },
    /// Controlled sign on the logical basis and random superpositions.
    CsignDemo {
        #[serde(default = "defaults::superpositions")]
        superpositions: usize,
    },
    /// Polarization CNOT truth table, Bell-state test and random inputs.
    CnotDemo {
        #[serde(default = "defaults::superpositions")]
        superpositions: usize,
    },
    /// Coincidence probability of `|1,1⟩` against splitter angle.
    HomScan {
        #[serde(default = "defaults::points")]
        points: usize,
        #[serde(default = "defaults::theta_max")]
        theta_max: f64,
    },
    /// Teleportation success against resource size.
    TeleportScan {
        #[serde(default = "defaults::ns")]
        ns: Vec<usize>,
    },
    /// Loss-code memory over many cycles.
    MemoryScan {
        #[serde(default = "defaults::cycles")]
        cycles: usize,
        #[serde(default = "defaults::per_cycle_loss")]
        per_cycle_loss: f64,
        #[serde(default = "defaults::trajectories")]
        trajectories: usize,
    },
    /// Sequential against permanent evaluation on random circuits.
    KernelCrosscheck {
        #[serde(default = "defaults::circuits")]
        circuits: usize,
        #[serde(default = "defaults::max_modes")]
        max_modes: usize,
        #[serde(default = "defaults::max_photons")]
        max_photons: usize,
        #[serde(default = "defaults::depth")]
        depth: usize,
    },
}

mod defaults {
    pub fn inputs() -> usize {
        1000
    }
    pub fn superpositions() -> usize {
        4
    }
    pub fn points() -> usize {
        33
    }
    pub fn theta_max() -> f64 {
        std::f64::consts::FRAC_PI_2
    }
    pub fn ns() -> Vec<usize> {
        vec![1, 2, 3]
    }
    pub fn cycles() -> usize {
        10
    }
    pub fn per_cycle_loss() -> f64 {
        0.05
    }
    pub fn trajectories() -> usize {
        10_000
    }
    pub fn circuits() -> usize {
        100
    }
    pub fn max_modes() -> usize {
        5
    }
    pub fn max_photons() -> usize {
        4
    }
    pub fn depth() -> usize {
        20
    }
}

impl Experiment {
    pub const KINDS: [&'static str; 7] = [
        "ns_demo",
        "csign_demo",
        "cnot_demo",
        "hom_scan",
        "teleport_scan",
        "memory_scan",
        "kernel_crosscheck",
    ];

    /// The experiment `kind` with every parameter at its default.
    pub fn default_for(kind: &str) -> Option<Experiment> {
        serde_json::from_value(serde_json::json!({ "kind": kind })).ok()
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Experiment::NsDemo { .. } => "ns_demo",
            Experiment::CsignDemo { .. } => "csign_demo",
            Experiment::CnotDemo { .. } => "cnot_demo",
            Experiment::HomScan { .. } => "hom_scan",
            Experiment::TeleportScan { .. } => "teleport_scan",
            Experiment::MemoryScan { .. } => "memory_scan",
            Experiment::KernelCrosscheck { .. } => "kernel_crosscheck",
        }
    }

    pub fn description(&self) -> &'static str {
        match self {
            Experiment::NsDemo { .. } => {
                "NS gate on random inputs: herald probability and sign flip"
            }
            Experiment::CsignDemo { .. } => "controlled sign from two NS gates on dual-rail qubits",
            Experiment::CnotDemo { .. } => {
                "polarization CNOT with feed-forward, truth table and Bell test"
            }
            Experiment::HomScan { .. } => "two-photon coincidence against beam splitter angle",
            Experiment::TeleportScan { .. } => "teleportation success against resource size",
            Experiment::MemoryScan { .. } => "loss-code memory: fidelity and survival per cycle",
            Experiment::KernelCrosscheck { .. } => {
                "sequential against permanent amplitudes on random circuits"
            }
        }
    }

    /// Names of the series the experiment's report carries.
    pub fn series_names(&self) -> &'static [&'static str] {
        match self {
            Experiment::NsDemo { .. } => &["ns_inputs"],
            Experiment::CsignDemo { .. } => &["csign_inputs"],
            Experiment::CnotDemo { .. } => &["cnot_inputs"],
            Experiment::HomScan { .. } => &["hom_scan"],
            Experiment::TeleportScan { .. } => &["teleport_scan"],
            Experiment::MemoryScan { .. } => &["memory_scan"],
            Experiment::KernelCrosscheck { .. } => &["kernel_crosscheck"],
        }
    }

    fn validate(&self) -> Result<()> {
        fn field(name: &str, message: String) -> Error {
            Error::Config(format!("experiment.{name}: {message}"))
        }
        fn positive(name: &str, v: usize) -> Result<()> {
            if v == 0 {
                return Err(field(name, "must be at least 1".into()));
            }
            Ok(())
        }
        match self {
            Experiment::NsDemo { inputs, .. } => positive("inputs", *inputs),
            Experiment::CsignDemo { .. } | Experiment::CnotDemo { .. } => Ok(()),
            Experiment::HomScan { points, theta_max } => {
                if *points < 2 {
                    return Err(field("points", format!("need at least 2, got {points}")));
                }
                if !theta_max.is_finite() || *theta_max <= 0.0 {
                    return Err(field(
                        "theta_max",
                        format!("must be finite and positive, got {theta_max}"),
                    ));
                }
                Ok(())
            }
            Experiment::TeleportScan { ns } => {
                if ns.is_empty() {
                    return Err(field("ns", "must list at least one resource size".into()));
                }
                if let Some(n) = ns.iter().find(|n| **n == 0 || **n > MAX_RESOURCE_PHOTONS) {
                    return Err(field(
                        "ns",
                        format!("{n} is outside 1..={MAX_RESOURCE_PHOTONS}"),
                    ));
                }
                Ok(())
            }
            Experiment::MemoryScan {
                cycles,
                per_cycle_loss,
                trajectories,
            } => {
                positive("cycles", *cycles)?;
                positive("trajectories", *trajectories)?;
                if !(0.0..=1.0).contains(per_cycle_loss) {
                    return Err(field(
                        "per_cycle_loss",
                        format!("must be in [0, 1], got {per_cycle_loss}"),
                    ));
                }
                Ok(())
            }
            Experiment::KernelCrosscheck {
                circuits,
                max_modes,
                max_photons,
                depth,
            } => {
                positive("circuits", *circuits)?;
                positive("depth", *depth)?;
                if !(2..=8).contains(max_modes) {
                    return Err(field(
                        "max_modes",
                        format!("must be in 2..=8, got {max_modes}"),
                    ));
                }
                if !(1..=6).contains(max_photons) {
                    return Err(field(
                        "max_photons",
                        format!("must be in 1..=6, got {max_photons}"),
                    ));
                }
                Ok(())
            }
        }
    }
}

impl Scenario {
    pub fn new(name: impl Into<String>, seed: u64, experiment: Experiment) -> Self {
        Scenario {
            version: SCENARIO_VERSION,
            name: name.into(),
            seed,
            experiment,
        }
    }

    /// Parses and validates a scenario document. Syntax and schema errors
    /// carry the line and column reported by the parser.
    pub fn from_json(text: &str) -> Result<Scenario> {
        let scenario: Scenario = serde_json::from_str(text)
            .map_err(|e| Error::Config(format!("line {} column {}: {e}", e.line(), e.column())))?;
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if self.version != SCENARIO_VERSION {
            return Err(Error::Config(format!(
                "version: expected {SCENARIO_VERSION}, got {}",
                self.version
            )));
        }
        let name_ok = !self.name.is_empty()
            && self
                .name
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.'));
        if !name_ok {
            return Err(Error::Config(format!(
                "name: {:?} must be non-empty and use only letters, digits, '_', '-', '.'",
                self.name
            )));
        }
        self.experiment.validate()
    }
}

//! JSON run configuration for the `floqmbl` binary.
//!
//! Parsing is strict: unknown keys are rejected at every level. Optional
//! keys are filled in by [`RunConfig::resolve`], and the resolved form is
//! what gets echoed into `manifest.json`, so a manifest can be fed back in
//! as a config.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::circuit::{
    CircuitConfig, QuasiPeriodicParams, DEFAULT_JZ, DEFAULT_RELATIVE_AMPLITUDE,
    INVERSE_GOLDEN_RATIO,
};
use crate::error::{Error, Result};
use crate::kernel::PauliString;
use crate::randmeas::{EstimatorVariant, RandomMeasConfig};
use crate::scan::{central_xx, ParamPoint, ScanSettings, ScanTrajectory, FM_POINT, PM_POINT};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Dynamics,
    Scan,
    Randmeas,
    Validate,
    ExportQasm,
}

/// Circuit block. Only `L` is required.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircuitBlock {
    #[serde(rename = "L")]
    pub num_qubits: usize,
    /// Base coupling angle, default 0.2.
    pub t0: Option<f64>,
    /// Base rotation angle, default 0.8.
    pub theta0: Option<f64>,
    /// Coupling modulation amplitude, default `0.2·t0`.
    pub t1: Option<f64>,
    /// Rotation modulation amplitude, default `0.2·θ0`.
    pub theta1: Option<f64>,
    /// Default 0.1.
    pub jz: Option<f64>,
    /// Default: inverse golden ratio.
    pub wavenumber: Option<f64>,
    /// Disorder phase, default 0.
    pub phi: Option<f64>,
}

impl CircuitBlock {
    fn resolve(&mut self) {
        let t0 = *self.t0.get_or_insert(PM_POINT.t);
        let theta0 = *self.theta0.get_or_insert(PM_POINT.theta);
        self.t1.get_or_insert(DEFAULT_RELATIVE_AMPLITUDE * t0);
        self.theta1
            .get_or_insert(DEFAULT_RELATIVE_AMPLITUDE * theta0);
        self.jz.get_or_insert(DEFAULT_JZ);
        self.wavenumber.get_or_insert(INVERSE_GOLDEN_RATIO);
        self.phi.get_or_insert(0.0);
    }

    /// Circuit parameters; call after [`RunConfig::resolve`].
    pub fn circuit(&self) -> CircuitConfig {
        let k = self.wavenumber.unwrap_or(INVERSE_GOLDEN_RATIO);
        let phase = self.phi.unwrap_or(0.0);
        let t0 = self.t0.unwrap_or(PM_POINT.t);
        let theta0 = self.theta0.unwrap_or(PM_POINT.theta);
        CircuitConfig {
            num_qubits: self.num_qubits,
            theta: QuasiPeriodicParams {
                base: theta0,
                amplitude: self.theta1.unwrap_or(DEFAULT_RELATIVE_AMPLITUDE * theta0),
                wavenumber: k,
                phase,
            },
            t: QuasiPeriodicParams {
                base: t0,
                amplitude: self.t1.unwrap_or(DEFAULT_RELATIVE_AMPLITUDE * t0),
                wavenumber: k,
                phase,
            },
            jz: self.jz.unwrap_or(DEFAULT_JZ),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DynamicsBlock {
    /// Default: `σˣσˣ` on the central bond.
    pub operator: Option<PauliString>,
    /// Default 1000.
    pub n_steps: Option<usize>,
    /// Steps recorded on top of the standard schedule.
    pub extra_steps: Option<Vec<usize>>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanBlock {
    /// Default `{t: 0.2, theta: 0.8}`.
    pub start: Option<ParamPoint>,
    /// Default `{t: 0.8, theta: 0.2}`.
    pub end: Option<ParamPoint>,
    /// Default 13.
    pub num_points: Option<usize>,
    /// Modulation amplitude relative to the base values, default 0.2.
    pub relative_amplitude: Option<f64>,
    /// Default 1000.
    pub n_long: Option<usize>,
    /// Default 30.
    pub n_short: Option<usize>,
    /// Default 8.
    pub num_phi: Option<usize>,
    /// Default: `σˣσˣ` on the central bond.
    pub operator: Option<PauliString>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimatorBlock {
    /// Default: `σˣσˣ` on the central bond.
    pub operator: Option<PauliString>,
    /// Default: every site.
    pub flip_sites: Option<Vec<usize>>,
    /// Default 2000.
    pub num_unitaries: Option<usize>,
    /// Default 32.
    pub n_steps: Option<usize>,
    /// Default `CROSS_CORRELATION`; ignored by `validate`, which runs both.
    pub variant: Option<EstimatorVariant>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QasmBlock {
    /// Default 1.
    pub repetitions: Option<usize>,
}

/// Run metadata written into `manifest.json`; ignored on input.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifestInfo {
    pub version: String,
    pub wall_clock_seconds: f64,
    pub threads: usize,
    pub outputs: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub mode: Mode,
    pub circuit: CircuitBlock,
    #[serde(default)]
    pub seed: u64,
    pub output_dir: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dynamics: Option<DynamicsBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scan: Option<ScanBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub estimator: Option<EstimatorBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub qasm: Option<QasmBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub manifest: Option<ManifestInfo>,
}

impl RunConfig {
    /// Parses JSON. Errors carry serde's line and column.
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Materializes every default for the selected mode and validates.
    pub fn resolve(&mut self) -> Result<()> {
        self.manifest = None;
        self.circuit.resolve();
        let l = self.circuit.num_qubits;
        self.circuit.circuit().validate()?;
        let central = || Some(central_xx(l));
        match self.mode {
            Mode::Dynamics => {
                let d = self.dynamics.get_or_insert_with(Default::default);
                if d.operator.is_none() {
                    d.operator = central();
                }
                d.n_steps.get_or_insert(1000);
                d.extra_steps.get_or_insert_with(Vec::new);
            }
            Mode::Scan => {
                let s = self.scan.get_or_insert_with(Default::default);
                s.start.get_or_insert(PM_POINT);
                s.end.get_or_insert(FM_POINT);
                s.num_points.get_or_insert(13);
                s.relative_amplitude
                    .get_or_insert(DEFAULT_RELATIVE_AMPLITUDE);
                s.n_long.get_or_insert(1000);
                s.n_short.get_or_insert(30);
                s.num_phi.get_or_insert(8);
                if s.operator.is_none() {
                    s.operator = central();
                }
            }
            Mode::Randmeas | Mode::Validate => {
                let e = self.estimator.get_or_insert_with(Default::default);
                if e.operator.is_none() {
                    e.operator = central();
                }
                e.flip_sites.get_or_insert_with(|| (0..l).collect());
                e.num_unitaries.get_or_insert(2000);
                e.n_steps.get_or_insert(32);
                e.variant.get_or_insert(EstimatorVariant::default());
            }
            Mode::ExportQasm => {
                self.qasm
                    .get_or_insert_with(Default::default)
                    .repetitions
                    .get_or_insert(1);
            }
        }
        self.validate()
    }

    fn validate(&self) -> Result<()> {
        let l = self.circuit.num_qubits;
        let check_op = |op: &PauliString| match op.sites().find(|&s| s >= l) {
            Some(s) => Err(Error::InvalidConfig(format!(
                "operator site {s} out of range for L = {l}"
            ))),
            None => Ok(()),
        };
        match self.mode {
            Mode::Dynamics => {
                let d = self.dynamics()?;
                check_op(&d.0)?;
                if d.1 == 0 {
                    return Err(Error::InvalidConfig(
                        "dynamics.n_steps must be at least 1".into(),
                    ));
                }
            }
            Mode::Scan => {
                let (traj, settings) = self.scan_inputs()?;
                traj.validate()?;
                settings.validate(l)?;
            }
            Mode::Randmeas | Mode::Validate => {
                let (op, cfg) = self.estimator_inputs()?;
                check_op(&op)?;
                cfg.validate()?;
                if self.mode == Mode::Validate && l > crate::randmeas::EXACT_RHS_MAX_QUBITS {
                    return Err(Error::InvalidConfig(format!(
                        "validate mode needs L <= {}, got {l}",
                        crate::randmeas::EXACT_RHS_MAX_QUBITS
                    )));
                }
            }
            Mode::ExportQasm => {
                if self.qasm_repetitions()? == 0 {
                    return Err(Error::InvalidConfig(
                        "qasm.repetitions must be at least 1".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    fn unresolved(block: &str) -> Error {
        Error::InvalidConfig(format!("`{block}` block not resolved"))
    }

    /// `(operator, n_steps, extra_steps)` for dynamics mode.
    pub fn dynamics(&self) -> Result<(PauliString, usize, Vec<usize>)> {
        let d = self
            .dynamics
            .as_ref()
            .ok_or_else(|| Self::unresolved("dynamics"))?;
        match (&d.operator, d.n_steps, &d.extra_steps) {
            (Some(op), Some(n), Some(extra)) => Ok((op.clone(), n, extra.clone())),
            _ => Err(Self::unresolved("dynamics")),
        }
    }

    pub fn scan_inputs(&self) -> Result<(ScanTrajectory, ScanSettings)> {
        let s = self.scan.as_ref().ok_or_else(|| Self::unresolved("scan"))?;
        let missing = || Self::unresolved("scan");
        let traj = ScanTrajectory {
            start: s.start.ok_or_else(missing)?,
            end: s.end.ok_or_else(missing)?,
            num_points: s.num_points.ok_or_else(missing)?,
            num_qubits: self.circuit.num_qubits,
            jz: self.circuit.jz.ok_or_else(missing)?,
            relative_amplitude: s.relative_amplitude.ok_or_else(missing)?,
            wavenumber: self.circuit.wavenumber.ok_or_else(missing)?,
        };
        let settings = ScanSettings {
            n_long: s.n_long.ok_or_else(missing)?,
            n_short: s.n_short.ok_or_else(missing)?,
            num_phi: s.num_phi.ok_or_else(missing)?,
            seed: self.seed,
            operator: s.operator.clone().ok_or_else(missing)?,
        };
        Ok((traj, settings))
    }

    pub fn estimator_inputs(&self) -> Result<(PauliString, RandomMeasConfig)> {
        let e = self
            .estimator
            .as_ref()
            .ok_or_else(|| Self::unresolved("estimator"))?;
        let missing = || Self::unresolved("estimator");
        let cfg = RandomMeasConfig {
            num_qubits: self.circuit.num_qubits,
            flip_sites: e.flip_sites.clone().ok_or_else(missing)?,
            num_unitaries: e.num_unitaries.ok_or_else(missing)?,
            n_steps: e.n_steps.ok_or_else(missing)?,
            seed: self.seed,
            variant: e.variant.ok_or_else(missing)?,
        };
        Ok((e.operator.clone().ok_or_else(missing)?, cfg))
    }

    pub fn qasm_repetitions(&self) -> Result<usize> {
        self.qasm
            .as_ref()
            .and_then(|q| q.repetitions)
            .ok_or_else(|| Self::unresolved("qasm"))
    }
}

//! One driving period of the quasi-periodically modulated Floquet Ising
//! circuit: a layer of `exp(-iθᵢZ)` rotations followed by even-bond and
//! odd-bond `exp(-i(tᵢ XX + jz ZZ))` couplings on an open chain.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{Gate, C64};

/// Inverse golden ratio `(√5 − 1)/2`.
pub const INVERSE_GOLDEN_RATIO: f64 = 0.618_033_988_749_894_9;

/// Largest register the dense-operator code paths accept.
pub const MAX_QUBITS: usize = 12;

/// Default integrability-breaking `ZZ` coefficient.
pub const DEFAULT_JZ: f64 = 0.1;

/// Default modulation amplitude as a fraction of the base value.
pub const DEFAULT_RELATIVE_AMPLITUDE: f64 = 0.2;

fn default_wavenumber() -> f64 {
    INVERSE_GOLDEN_RATIO
}

/// `x_i = base + amplitude · cos(2π k i + φ)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuasiPeriodicParams {
    pub base: f64,
    pub amplitude: f64,
    #[serde(default = "default_wavenumber")]
    pub wavenumber: f64,
    #[serde(default)]
    pub phase: f64,
}

impl QuasiPeriodicParams {
    pub fn new(base: f64, amplitude: f64) -> Self {
        QuasiPeriodicParams {
            base,
            amplitude,
            wavenumber: INVERSE_GOLDEN_RATIO,
            phase: 0.0,
        }
    }

    /// Modulated with the default relative amplitude.
    pub fn with_default_amplitude(base: f64) -> Self {
        Self::new(base, DEFAULT_RELATIVE_AMPLITUDE * base)
    }

    pub fn clean(base: f64) -> Self {
        Self::new(base, 0.0)
    }

    pub fn value(&self, index: usize) -> f64 {
        quasi_periodic_value(self, index)
    }

    fn is_finite(&self) -> bool {
        [self.base, self.amplitude, self.wavenumber, self.phase]
            .iter()
            .all(|v| v.is_finite())
    }
}

pub fn quasi_periodic_value(p: &QuasiPeriodicParams, index: usize) -> f64 {
    if p.amplitude == 0.0 {
        return p.base;
    }
    p.base + p.amplitude * (2.0 * PI * p.wavenumber * index as f64 + p.phase).cos()
}

/// Parameters of one Floquet period on an open chain of `num_qubits` sites.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircuitConfig {
    #[serde(rename = "L")]
    pub num_qubits: usize,
    /// Rotation-layer angles.
    pub theta: QuasiPeriodicParams,
    /// Coupling-layer `XX` angles.
    pub t: QuasiPeriodicParams,
    pub jz: f64,
}

impl CircuitConfig {
    /// Both parameters modulated with default amplitudes, `jz = 0.1`, `φ = 0`.
    pub fn modulated(num_qubits: usize, t0: f64, theta0: f64) -> Self {
        CircuitConfig {
            num_qubits,
            theta: QuasiPeriodicParams::with_default_amplitude(theta0),
            t: QuasiPeriodicParams::with_default_amplitude(t0),
            jz: DEFAULT_JZ,
        }
    }

    /// The same configuration with disorder phase `φ` on both parameters.
    pub fn with_phase(mut self, phi: f64) -> Self {
        self.theta.phase = phi;
        self.t.phase = phi;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_qubits < 2 || self.num_qubits > MAX_QUBITS {
            return Err(Error::InvalidConfig(format!(
                "L must be in [2, {MAX_QUBITS}], got {}",
                self.num_qubits
            )));
        }
        if !self.jz.is_finite() || !self.theta.is_finite() || !self.t.is_finite() {
            return Err(Error::InvalidConfig(
                "circuit parameters must be finite".into(),
            ));
        }
        Ok(())
    }
}

/// `exp(-iθZ)`.
pub fn rotation_gate(site: usize, theta: f64) -> Result<Gate> {
    let z = C64::new(0.0, 0.0);
    Gate::single(
        site,
        [
            C64::from_polar(1.0, -theta),
            z,
            z,
            C64::from_polar(1.0, theta),
        ],
        "rz",
    )
}

/// `exp(-i(t XX + jz ZZ))` on `(site, site + 1)`.
///
/// `XX` and `ZZ` commute; `ZZ = +1` on `{00, 11}` and `−1` on `{01, 10}`,
/// and `XX` swaps the members of each pair.
pub fn bond_gate(site: usize, t: f64, jz: f64) -> Result<Gate> {
    let (s, c) = t.sin_cos();
    let even = C64::from_polar(1.0, -jz);
    let odd = C64::from_polar(1.0, jz);
    let mi = C64::new(0.0, -1.0);
    let z = C64::new(0.0, 0.0);
    #[rustfmt::skip]
    let m = [
        even * c,  z,         z,         even * mi * s,
        z,         odd * c,   odd * mi * s, z,
        z,         odd * mi * s, odd * c,   z,
        even * mi * s, z,     z,         even * c,
    ];
    Gate::two(site, site + 1, m, "xxzz")
}

/// Angles a gate of a built period was generated from.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GateSpec {
    /// `exp(-iθZ)` on `site`.
    Rotation { site: usize, theta: f64 },
    /// `exp(-i(t XX + jz ZZ))` on `(site, site + 1)`.
    Bond { site: usize, t: f64, jz: f64 },
}

/// One driving period.
#[derive(Clone, Debug)]
pub struct FloquetPeriod {
    num_qubits: usize,
    gates: Vec<Gate>,
    specs: Option<Vec<GateSpec>>,
    config: CircuitConfig,
}

impl FloquetPeriod {
    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    /// Gates in application order.
    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn config(&self) -> &CircuitConfig {
        &self.config
    }

    /// Generating angles, one per gate; `None` for periods made with
    /// [`FloquetPeriod::from_gates`].
    pub fn specs(&self) -> Option<&[GateSpec]> {
        self.specs.as_deref()
    }

    /// Layer slices follow the layout of [`build_period`]; they are empty for
    /// periods made with [`FloquetPeriod::from_gates`].
    pub fn rotation_layer(&self) -> &[Gate] {
        self.layer(0, self.num_qubits)
    }

    pub fn even_bond_layer(&self) -> &[Gate] {
        self.layer(self.num_qubits, self.num_qubits + self.num_qubits / 2)
    }

    pub fn odd_bond_layer(&self) -> &[Gate] {
        self.layer(self.num_qubits + self.num_qubits / 2, self.gates.len())
    }

    fn layer(&self, start: usize, end: usize) -> &[Gate] {
        if self.specs.is_some() {
            &self.gates[start..end]
        } else {
            &[]
        }
    }

    /// A period from an explicit gate list, e.g. for tests of the dynamics
    /// on circuits outside the Floquet family.
    pub fn from_gates(num_qubits: usize, gates: Vec<Gate>, config: CircuitConfig) -> Result<Self> {
        if let Some(g) = gates.iter().find(|g| g.targets().max_qubit() >= num_qubits) {
            return Err(Error::QubitOutOfRange {
                index: g.targets().max_qubit(),
                num_qubits,
            });
        }
        Ok(FloquetPeriod {
            num_qubits,
            gates,
            specs: None,
            config,
        })
    }
}

/// Builds the rotation layer, then bonds `(0,1), (2,3), …`, then bonds
/// `(1,2), (3,4), …`.
pub fn build_period(cfg: &CircuitConfig) -> Result<FloquetPeriod> {
    cfg.validate()?;
    let l = cfg.num_qubits;
    let mut specs = Vec::with_capacity(2 * l - 1);
    for site in 0..l {
        specs.push(GateSpec::Rotation {
            site,
            theta: cfg.theta.value(site),
        });
    }
    for parity in [0, 1] {
        for site in (parity..l - 1).step_by(2) {
            specs.push(GateSpec::Bond {
                site,
                t: cfg.t.value(site),
                jz: cfg.jz,
            });
        }
    }
    let gates = specs
        .iter()
        .map(|spec| match *spec {
            GateSpec::Rotation { site, theta } => rotation_gate(site, theta),
            GateSpec::Bond { site, t, jz } => bond_gate(site, t, jz),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FloquetPeriod {
        num_qubits: l,
        gates,
        specs: Some(specs),
        config: *cfg,
    })
}

//! Floquet Ising circuits stabilized by quasi-periodic disorder.
//!
//! The crate builds driving periods ([`circuit`]), evolves order parameters
//! in the Heisenberg picture and tracks the size of their running time
//! average ([`dynamics`]), estimates that size from randomized measurements
//! ([`randmeas`]), and scans parameter space with power-law extrapolation
//! ([`scan`], [`fit`]). [`cli`] wires everything to a config-driven binary.

pub mod circuit;
pub mod cli;
pub mod config;
pub mod dynamics;
pub mod error;
pub mod fit;
pub mod kernel;
pub mod qasm;
pub mod randmeas;
pub mod scan;

pub use circuit::{
    build_period, quasi_periodic_value, CircuitConfig, FloquetPeriod, QuasiPeriodicParams,
};
pub use config::RunConfig;
pub use dynamics::{evolve_heisenberg, running_average_size, NormSeries};
pub use error::{Error, Result};
pub use fit::{fit_power_law, FitResult};
pub use kernel::{
    apply_gate, conjugate_operator, expectation, operator_size_sq, pauli_to_dense, Axis,
    DenseOperator, Gate, PauliString, StateVector, C64,
};
pub use qasm::{export_qasm, parse_qasm};
pub use randmeas::{
    ensemble_member, estimate_time_averaged_size, exact_rhs_small_l, sample_local_random_state,
    EstimatorResult, EstimatorVariant, RandomMeasConfig,
};
pub use scan::{run_scan, ScanRecord, ScanSettings, ScanTrajectory};

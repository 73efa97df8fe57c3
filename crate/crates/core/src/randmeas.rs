//! Randomized-measurement estimation of time-averaged operator sizes from
//! local random product states.
//!
//! One instance draws a Haar-random single-qubit unitary `u_i` per site.
//! Ensemble member `s` (a bitmask over the designated flip sites) is
//! `u|k_s⟩`, where `|k_s⟩` is `|0…0⟩` with the bits of `s` set. Each member is
//! evolved in the Schrödinger picture and the per-period expectation values
//! are averaged in time, giving `A_u(s) = ⟨O_avg(nT)⟩`.
//!
//! With `E[ρ_k ⊗ ρ_k] = (1 + S)/6` and `E[ρ_0 ⊗ ρ_1] = (2 − S)/6` for a single
//! Haar-random qubit (`S` the swap), the two combinations have expectations
//!
//! * cross-correlation `Σ_{s,s'} (−1/2)^{|s ⊕ s'|} A(s) A(s')`:
//!   `Tr[(O⊗O) ⊗_{i∈F} S_i/2 ⊗_{i∉F} (1+S_i)/6]`, which is `Tr(O²)/2^L` when
//!   the flip sites `F` cover the chain;
//! * literal `Σ_s (−1/2)^{|s|} A(s)²`:
//!   `2^{−m} Tr[(O⊗O) ⊗_i (1+S_i)/6]`, which weights each Pauli component
//!   by `3^{−weight}` and so is not proportional to `Tr(O²)` in general.
//!
//! [`exact_rhs_small_l`] evaluates the doubled-space trace with swaps on the
//! flip sites and fixes the calibration of either variant.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::FloquetPeriod;
use crate::dynamics::HeisenbergEvolution;
use crate::error::{Error, Result};
use crate::kernel::{DenseOperator, PauliString, StateVector, C64};

/// Largest `L` accepted by [`exact_rhs_small_l`].
pub const EXACT_RHS_MAX_QUBITS: usize = 6;

/// Largest `L` at which estimator runs compute the exact size and the
/// calibration constant.
pub const CALIBRATION_MAX_QUBITS: usize = 8;

/// Row-major single-qubit unitary.
pub type Unitary2 = [C64; 4];

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum EstimatorVariant {
    /// `Σ_s (−1/2)^{#flips(s)} A_u(s)²`.
    PaperLiteral,
    /// `Σ_{s,s'} (−1/2)^{Hamming(s,s')} A_u(s) A_u(s')`.
    #[default]
    CrossCorrelation,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RandomMeasConfig {
    pub num_qubits: usize,
    pub flip_sites: Vec<usize>,
    pub num_unitaries: usize,
    pub n_steps: usize,
    pub seed: u64,
    pub variant: EstimatorVariant,
}

impl RandomMeasConfig {
    /// All sites flipped.
    pub fn full(
        num_qubits: usize,
        num_unitaries: usize,
        n_steps: usize,
        seed: u64,
        variant: EstimatorVariant,
    ) -> Self {
        RandomMeasConfig {
            num_qubits,
            flip_sites: (0..num_qubits).collect(),
            num_unitaries,
            n_steps,
            seed,
            variant,
        }
    }

    pub fn m(&self) -> usize {
        self.flip_sites.len()
    }

    pub fn validate(&self) -> Result<()> {
        let l = self.num_qubits;
        let m = self.m();
        if m == 0 || m > l {
            return Err(Error::InvalidConfig(format!(
                "need 1 <= m <= L, got m = {m}, L = {l}"
            )));
        }
        if let Some(&s) = self.flip_sites.iter().find(|&&s| s >= l) {
            return Err(Error::QubitOutOfRange {
                index: s,
                num_qubits: l,
            });
        }
        let mut sorted = self.flip_sites.clone();
        sorted.sort_unstable();
        if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidConfig(format!(
                "flip site {} listed twice",
                w[0]
            )));
        }
        if self.num_unitaries == 0 {
            return Err(Error::InvalidConfig(
                "num_unitaries must be at least 1".into(),
            ));
        }
        if self.n_steps == 0 {
            return Err(Error::InvalidConfig("n_steps must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimatorResult {
    pub estimate: f64,
    pub std_error: f64,
    pub num_unitaries: usize,
    /// `E[estimate] / (Tr(O_avg²)/2^L)` from the exact oracle; `None` when
    /// the register is too large or the exact size vanishes.
    pub calibration: Option<f64>,
    /// Exact `Tr(O_avg²)/2^L`, when computed.
    pub exact_value: Option<f64>,
}

impl EstimatorResult {
    /// `estimate / calibration`, or the raw estimate without a calibration.
    pub fn calibrated(&self) -> f64 {
        self.calibration
            .map_or(self.estimate, |c| self.estimate / c)
    }

    pub fn calibrated_std_error(&self) -> f64 {
        self.calibration
            .map_or(self.std_error, |c| self.std_error / c.abs())
    }
}

/// JSON record written for a randomized-measurement run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimatorRecord {
    pub variant: EstimatorVariant,
    #[serde(rename = "L")]
    pub num_qubits: usize,
    pub m: usize,
    pub n_steps: usize,
    pub num_unitaries: usize,
    pub seed: u64,
    pub estimate: f64,
    pub std_error: f64,
    pub calibration: Option<f64>,
    pub exact_value: Option<f64>,
}

impl EstimatorRecord {
    pub fn new(cfg: &RandomMeasConfig, result: &EstimatorResult) -> Self {
        EstimatorRecord {
            variant: cfg.variant,
            num_qubits: cfg.num_qubits,
            m: cfg.m(),
            n_steps: cfg.n_steps,
            num_unitaries: result.num_unitaries,
            seed: cfg.seed,
            estimate: result.estimate,
            std_error: result.std_error,
            calibration: result.calibration,
            exact_value: result.exact_value,
        }
    }
}

/// Independent stream for instance `u`, reproducible regardless of which
/// thread evaluates it.
pub fn instance_rng(seed: u64, instance: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(instance);
    rng
}

/// Haar-random `U(2)` element: Gram–Schmidt on a complex Gaussian matrix.
pub fn haar_unitary<R: Rng + ?Sized>(rng: &mut R) -> Unitary2 {
    let mut gauss = || C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
    let (a0, a1, b0, b1) = (gauss(), gauss(), gauss(), gauss());
    let n = (a0.norm_sqr() + a1.norm_sqr()).sqrt();
    let (a0, a1) = (a0 / n, a1 / n);
    let proj = a0.conj() * b0 + a1.conj() * b1;
    let (b0, b1) = (b0 - proj * a0, b1 - proj * a1);
    let n = (b0.norm_sqr() + b1.norm_sqr()).sqrt();
    let (b0, b1) = (b0 / n, b1 / n);
    // columns (a0, a1) and (b0, b1)
    [a0, b0, a1, b1]
}

/// `u_{L-1} ⊗ ⋯ ⊗ u_0 |bits⟩`.
fn product_state(unitaries: &[Unitary2], bits: usize) -> Result<StateVector> {
    let mut amps = vec![C64::new(1.0, 0.0)];
    for (site, u) in unitaries.iter().enumerate() {
        let k = (bits >> site) & 1;
        let (c0, c1) = (u[k], u[2 + k]);
        // new index = old + 2^site · b
        let mut next = Vec::with_capacity(amps.len() * 2);
        next.extend(amps.iter().map(|a| a * c0));
        next.extend(amps.iter().map(|a| a * c1));
        amps = next;
    }
    StateVector::from_amplitudes(unitaries.len(), amps)
}

/// Draws `L` independent Haar unitaries and returns `u|0…0⟩` with them.
pub fn sample_local_random_state<R: Rng + ?Sized>(
    num_qubits: usize,
    rng: &mut R,
) -> Result<(StateVector, Vec<Unitary2>)> {
    let unitaries: Vec<Unitary2> = (0..num_qubits).map(|_| haar_unitary(rng)).collect();
    Ok((product_state(&unitaries, 0)?, unitaries))
}

/// `u|k_s⟩` where bit `j` of `flip_mask` flips `flip_sites[j]`.
pub fn ensemble_member(
    base_unitaries: &[Unitary2],
    flip_sites: &[usize],
    flip_mask: usize,
) -> Result<StateVector> {
    if flip_sites.len() >= usize::BITS as usize || flip_mask >> flip_sites.len() != 0 {
        return Err(Error::InvalidArgument(format!(
            "flip mask {flip_mask:#b} out of range for {} flip sites",
            flip_sites.len()
        )));
    }
    let mut bits = 0usize;
    for (j, &site) in flip_sites.iter().enumerate() {
        if site >= base_unitaries.len() {
            return Err(Error::QubitOutOfRange {
                index: site,
                num_qubits: base_unitaries.len(),
            });
        }
        if (flip_mask >> j) & 1 == 1 {
            bits |= 1 << site;
        }
    }
    product_state(base_unitaries, bits)
}

/// `(−1/2)^{popcount(mask)}`.
pub fn flip_weight(mask: usize) -> f64 {
    (-0.5f64).powi(mask.count_ones() as i32)
}

/// Neumaier-compensated sum.
fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Time-averaged expectations `A_u(s)` for every ensemble member of one
/// instance.
fn instance_averages(
    op: &PauliString,
    period: &FloquetPeriod,
    cfg: &RandomMeasConfig,
    instance: u64,
) -> Result<Vec<f64>> {
    let mut rng = instance_rng(cfg.seed, instance);
    let (_, unitaries) = sample_local_random_state(cfg.num_qubits, &mut rng)?;
    (0..1usize << cfg.m())
        .map(|mask| {
            let mut state = ensemble_member(&unitaries, &cfg.flip_sites, mask)?;
            let mut total = 0.0;
            for _ in 0..cfg.n_steps {
                for gate in period.gates() {
                    state.apply(gate)?;
                }
                total += op.expectation(&state)?;
            }
            Ok(total / cfg.n_steps as f64)
        })
        .collect()
}

fn combine(variant: EstimatorVariant, averages: &[f64]) -> f64 {
    match variant {
        EstimatorVariant::PaperLiteral => compensated_sum(
            averages
                .iter()
                .enumerate()
                .map(|(s, a)| flip_weight(s) * a * a),
        ),
        EstimatorVariant::CrossCorrelation => {
            compensated_sum(averages.iter().enumerate().flat_map(|(s, a)| {
                averages
                    .iter()
                    .enumerate()
                    .map(move |(t, b)| flip_weight(s ^ t) * a * b)
            }))
        }
    }
}

/// Per-instance estimator values, in instance order.
pub fn instance_estimates(
    op: &PauliString,
    period: &FloquetPeriod,
    cfg: &RandomMeasConfig,
) -> Result<Vec<f64>> {
    cfg.validate()?;
    if period.num_qubits() != cfg.num_qubits {
        return Err(Error::DimensionMismatch {
            expected: cfg.num_qubits,
            found: period.num_qubits(),
        });
    }
    (0..cfg.num_unitaries as u64)
        .into_par_iter()
        .map(|u| instance_averages(op, period, cfg, u).map(|a| combine(cfg.variant, &a)))
        .collect()
}

/// Exact `O_avg(nT)` by Heisenberg evolution of the dense operator.
pub fn exact_time_average(
    op: &PauliString,
    period: &FloquetPeriod,
    n_steps: usize,
) -> Result<DenseOperator> {
    let dense = op.to_dense(period.num_qubits())?;
    let mut evo = HeisenbergEvolution::new(&dense, period)?;
    for _ in 0..n_steps {
        evo.advance()?;
    }
    evo.time_average()
}

/// `E[estimate]` predicted by the doubled-space trace for `variant`.
pub fn predicted_expectation(
    op_avg: &DenseOperator,
    flip_sites: &[usize],
    variant: EstimatorVariant,
) -> Result<f64> {
    let m = flip_sites.len() as i32;
    match variant {
        EstimatorVariant::CrossCorrelation => {
            Ok(2f64.powi(m) * doubled_space_trace(op_avg, flip_sites)?)
        }
        EstimatorVariant::PaperLiteral => Ok(2f64.powi(-m) * doubled_space_trace(op_avg, &[])?),
    }
}

/// Runs the randomized-measurement protocol for `op` under `period`.
pub fn estimate_time_averaged_size(
    op: &PauliString,
    period: &FloquetPeriod,
    cfg: &RandomMeasConfig,
) -> Result<EstimatorResult> {
    let values = instance_estimates(op, period, cfg)?;
    let n = values.len() as f64;
    let mean = compensated_sum(values.iter().copied()) / n;
    let std_error = if values.len() > 1 {
        let var = compensated_sum(values.iter().map(|v| (v - mean) * (v - mean))) / (n - 1.0);
        (var / n).sqrt()
    } else {
        0.0
    };
    let (calibration, exact_value) = if cfg.num_qubits <= CALIBRATION_MAX_QUBITS {
        let avg = exact_time_average(op, period, cfg.n_steps)?;
        let exact = avg.size_sq()?;
        let predicted = predicted_expectation(&avg, &cfg.flip_sites, cfg.variant)?;
        let calibration = (exact > 1e-12).then(|| predicted / exact);
        (calibration, Some(exact))
    } else {
        (None, None)
    };
    Ok(EstimatorResult {
        estimate: mean,
        std_error,
        num_unitaries: values.len(),
        calibration,
        exact_value,
    })
}

/// `(1/3^L)(3/4)^s(1/2)^{L−s} Tr[(O⊗O) Π_{j∈F} Swap_j Π_{k∉F} (1 + Swap_k)]`
/// with `s = |F|`, evaluated on the doubled space by index enumeration.
fn doubled_space_trace(op: &DenseOperator, swapped: &[usize]) -> Result<f64> {
    let l = op.num_qubits();
    let mut forced = 0usize;
    for &site in swapped {
        if site >= l {
            return Err(Error::QubitOutOfRange {
                index: site,
                num_qubits: l,
            });
        }
        if forced >> site & 1 == 1 {
            return Err(Error::InvalidArgument(format!("site {site} listed twice")));
        }
        forced |= 1 << site;
    }
    let dim = op.dim();
    let full = dim - 1;
    let free = full & !forced;
    let entries = op.entries();
    let mut terms = Vec::new();
    // submasks of the unswapped sites choose the Swap term of (1 + Swap)
    let mut choice = free;
    loop {
        let w = forced | choice;
        let keep = full & !w;
        let mut acc = C64::new(0.0, 0.0);
        for x in 0..dim {
            for xp in 0..dim {
                let y = (x & keep) | (xp & w);
                let yp = (xp & keep) | (x & w);
                acc += entries[x * dim + y] * entries[xp * dim + yp];
            }
        }
        terms.push(acc);
        if choice == 0 {
            break;
        }
        choice = (choice - 1) & free;
    }
    let total: C64 = terms.iter().sum();
    let s = swapped.len() as i32;
    let prefactor = 3f64.powi(-(l as i32)) * 0.75f64.powi(s) * 0.5f64.powi(l as i32 - s);
    let value = total * prefactor;
    if value.im.abs() > 1e-10 * value.re.abs().max(1.0) {
        return Err(Error::ImaginaryResidue(value.im));
    }
    Ok(value.re)
}

/// Doubled-space right-hand side with swaps on `flip_sites`; `L ≤ 6`.
pub fn exact_rhs_small_l(op: &DenseOperator, flip_sites: &[usize]) -> Result<f64> {
    if op.num_qubits() > EXACT_RHS_MAX_QUBITS {
        return Err(Error::InvalidArgument(format!(
            "exact right-hand side limited to L <= {EXACT_RHS_MAX_QUBITS}, got {}",
            op.num_qubits()
        )));
    }
    doubled_space_trace(op, flip_sites)
}

/// One estimator variant checked against the exact size.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VariantCheck {
    pub variant: EstimatorVariant,
    pub estimate: f64,
    pub std_error: f64,
    pub calibration: Option<f64>,
    pub calibrated_estimate: f64,
    pub calibrated_std_error: f64,
    /// `(calibrated − exact) / calibrated_std_error`.
    pub z_score: f64,
    pub within_three_sigma: bool,
}

/// Calibration constants of both variants for one operator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CalibrationProbe {
    pub operator: String,
    pub cross_correlation: f64,
    pub paper_literal: f64,
}

/// All-swapped doubled-space trace against `4^{-L} Tr(O_avg²)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SwapLimitCheck {
    pub all_swapped_rhs: f64,
    pub expected: f64,
    pub relative_deviation: f64,
    pub within_tolerance: bool,
}

/// Estimator-versus-oracle comparison written by `validate` runs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub operator: String,
    #[serde(rename = "L")]
    pub num_qubits: usize,
    pub flip_sites: Vec<usize>,
    pub n_steps: usize,
    pub num_unitaries: usize,
    pub seed: u64,
    pub exact_size: f64,
    pub variants: Vec<VariantCheck>,
    pub swap_limit: SwapLimitCheck,
    pub calibration_probes: Vec<CalibrationProbe>,
    /// Variant whose calibration varies least across the probes.
    pub default_variant: EstimatorVariant,
}

/// Relative tolerance of the all-swapped proportionality check.
pub const SWAP_LIMIT_TOL: f64 = 1e-10;

fn probe(label: String, op: &DenseOperator, flip_sites: &[usize]) -> Result<CalibrationProbe> {
    let size = op.size_sq()?;
    let cal = |v| Ok::<f64, Error>(predicted_expectation(op, flip_sites, v)? / size);
    Ok(CalibrationProbe {
        operator: label,
        cross_correlation: cal(EstimatorVariant::CrossCorrelation)?,
        paper_literal: cal(EstimatorVariant::PaperLiteral)?,
    })
}

fn spread(values: impl Iterator<Item = f64>) -> f64 {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
        (lo.min(v), hi.max(v))
    });
    hi - lo
}

/// Runs both variants with `base`'s sampling settings, compares them with the
/// exact size, checks the all-swapped limit and picks the default variant.
pub fn validate_estimators(
    op: &PauliString,
    period: &FloquetPeriod,
    base: &RandomMeasConfig,
) -> Result<ValidationReport> {
    let l = period.num_qubits();
    if l > EXACT_RHS_MAX_QUBITS {
        return Err(Error::InvalidArgument(format!(
            "validation needs L <= {EXACT_RHS_MAX_QUBITS}, got {l}"
        )));
    }
    let avg = exact_time_average(op, period, base.n_steps)?;
    let exact_size = avg.size_sq()?;

    let mut variants = Vec::new();
    for variant in [
        EstimatorVariant::PaperLiteral,
        EstimatorVariant::CrossCorrelation,
    ] {
        let cfg = RandomMeasConfig {
            variant,
            ..base.clone()
        };
        let r = estimate_time_averaged_size(op, period, &cfg)?;
        let (est, se) = (r.calibrated(), r.calibrated_std_error());
        let z_score = if se > 0.0 {
            (est - exact_size) / se
        } else {
            f64::INFINITY
        };
        variants.push(VariantCheck {
            variant,
            estimate: r.estimate,
            std_error: r.std_error,
            calibration: r.calibration,
            calibrated_estimate: est,
            calibrated_std_error: se,
            z_score,
            within_three_sigma: z_score.abs() <= 3.0,
        });
    }

    let all: Vec<usize> = (0..l).collect();
    let rhs = exact_rhs_small_l(&avg, &all)?;
    let expected = 0.25f64.powi(l as i32) * avg.trace_of_square().re;
    let relative_deviation = (rhs - expected).abs() / expected.abs().max(f64::MIN_POSITIVE);
    let swap_limit = SwapLimitCheck {
        all_swapped_rhs: rhs,
        expected,
        relative_deviation,
        within_tolerance: relative_deviation <= SWAP_LIMIT_TOL,
    };

    let mut probes = Vec::new();
    if exact_size > 1e-12 {
        probes.push(probe(format!("avg({op})"), &avg, &base.flip_sites)?);
    }
    let mut labels = vec![
        "Z0".to_string(),
        "X0".to_string(),
        "X0 X1".to_string(),
        "Y0 Z1".to_string(),
    ];
    if l >= 3 {
        labels.push("X0 Y1 Z2".to_string());
    }
    for label in labels {
        let p: PauliString = label.parse()?;
        probes.push(probe(label, &p.to_dense(l)?, &base.flip_sites)?);
    }
    let cross = spread(probes.iter().map(|p| p.cross_correlation));
    let literal = spread(probes.iter().map(|p| p.paper_literal));
    let default_variant = if literal < cross {
        EstimatorVariant::PaperLiteral
    } else {
        EstimatorVariant::CrossCorrelation
    };

    Ok(ValidationReport {
        operator: op.to_string(),
        num_qubits: l,
        flip_sites: base.flip_sites.clone(),
        n_steps: base.n_steps,
        num_unitaries: base.num_unitaries,
        seed: base.seed,
        exact_size,
        variants,
        swap_limit,
        calibration_probes: probes,
        default_variant,
    })
}

//! Heisenberg-picture evolution of an order parameter over many Floquet
//! periods, tracking the size of its running time average
//! `O_avg(nT) = (1/n) Σ_{j=1..n} O(jT)`.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::circuit::{CircuitConfig, FloquetPeriod};
use crate::error::{Error, Result};
use crate::kernel::DenseOperator;

/// Sizes `Tr(O_avg(nT)²)/2^L` at recorded steps `n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormSeries {
    pub steps: Vec<usize>,
    pub sizes: Vec<f64>,
    pub op_label: String,
    pub config: CircuitConfig,
}

impl NormSeries {
    pub fn size_at(&self, step: usize) -> Option<f64> {
        self.steps
            .iter()
            .position(|&s| s == step)
            .map(|i| self.sizes[i])
    }

    /// `step,size_sq` rows with a header, reals to 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("step,size_sq\n");
        for (step, size) in self.steps.iter().zip(&self.sizes) {
            writeln!(out, "{step},{size:.16e}").unwrap();
        }
        out
    }
}

/// Recording schedule: every step in `1..=30`, powers of two up to `n`, `n`
/// itself, and any `extra` steps `≤ n`. Sorted, deduplicated.
pub fn standard_schedule(n: usize, extra: &[usize]) -> Vec<usize> {
    let mut steps: Vec<usize> = (1..=n.min(30)).collect();
    let mut p = 1usize;
    while p <= n {
        steps.push(p);
        p *= 2;
    }
    steps.push(n);
    steps.extend(extra.iter().copied().filter(|&s| s >= 1 && s <= n));
    steps.sort_unstable();
    steps.dedup();
    steps
}

/// `Tr((A/j)²)/2^L` for an unscaled accumulator `A = Σ O(jT)`.
pub fn running_average_size(accumulator: &DenseOperator, j: usize) -> Result<f64> {
    if j == 0 {
        return Err(Error::InvalidArgument(
            "step count must be at least 1".into(),
        ));
    }
    let jf = j as f64;
    Ok(accumulator.size_sq()? / (jf * jf))
}

/// Conjugation stages of one period in application order. Runs of
/// consecutive diagonal gates commute and are merged into a single phase
/// pass.
#[derive(Clone, Debug)]
enum Stage {
    Gate(usize),
    Diagonal(Vec<crate::kernel::C64>),
}

fn plan_period(period: &FloquetPeriod) -> Result<Vec<Stage>> {
    let dim = 1usize << period.num_qubits();
    let mut plan = Vec::new();
    for (i, gate) in period.gates().iter().enumerate().rev() {
        if gate.is_diagonal() {
            if !matches!(plan.last(), Some(Stage::Diagonal(_))) {
                plan.push(Stage::Diagonal(vec![
                    crate::kernel::C64::new(1.0, 0.0);
                    dim
                ]));
            }
            if let Some(Stage::Diagonal(phases)) = plan.last_mut() {
                gate.accumulate_diagonal(phases)?;
            }
        } else {
            plan.push(Stage::Gate(i));
        }
    }
    Ok(plan)
}

/// Step-by-step Heisenberg evolution `O(jT) = (U†)ʲ O Uʲ` with the running
/// sum `Σ_{i≤j} O(iT)`.
#[derive(Clone, Debug)]
pub struct HeisenbergEvolution<'a> {
    period: &'a FloquetPeriod,
    plan: Vec<Stage>,
    current: DenseOperator,
    accumulator: DenseOperator,
    step: usize,
}

impl<'a> HeisenbergEvolution<'a> {
    pub fn new(op: &DenseOperator, period: &'a FloquetPeriod) -> Result<Self> {
        if op.num_qubits() != period.num_qubits() {
            return Err(Error::DimensionMismatch {
                expected: period.num_qubits(),
                found: op.num_qubits(),
            });
        }
        Ok(HeisenbergEvolution {
            period,
            plan: plan_period(period)?,
            current: op.clone(),
            accumulator: DenseOperator::zeros(op.num_qubits()),
            step: 0,
        })
    }

    /// Advances one period. With `U = G_k ⋯ G_1`, `U† O U` conjugates by
    /// `G_k` first.
    pub fn advance(&mut self) -> Result<()> {
        let gates = self.period.gates();
        for stage in &self.plan {
            match stage {
                Stage::Gate(i) => self.current.conjugate(&gates[*i])?,
                Stage::Diagonal(phases) => self.current.conjugate_diagonal(phases)?,
            }
        }
        self.accumulator.add_assign(&self.current)?;
        self.step += 1;
        Ok(())
    }

    pub fn step(&self) -> usize {
        self.step
    }

    pub fn current(&self) -> &DenseOperator {
        &self.current
    }

    pub fn accumulator(&self) -> &DenseOperator {
        &self.accumulator
    }

    /// `Tr(O_avg²)/2^L` at the current step.
    pub fn average_size(&self) -> Result<f64> {
        running_average_size(&self.accumulator, self.step)
    }

    /// `O_avg` at the current step as a fresh operator.
    pub fn time_average(&self) -> Result<DenseOperator> {
        if self.step == 0 {
            return Err(Error::InvalidArgument("no steps taken yet".into()));
        }
        let mut avg = self.accumulator.clone();
        avg.scale(1.0 / self.step as f64);
        Ok(avg)
    }
}

/// Evolves `op` for `n` periods, recording the time-averaged size at each
/// step in `record_at` (strictly increasing, all in `1..=n`).
pub fn evolve_heisenberg(
    op: &DenseOperator,
    period: &FloquetPeriod,
    n: usize,
    record_at: &[usize],
    op_label: &str,
) -> Result<NormSeries> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    if record_at.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument(
            "record_at must be strictly increasing".into(),
        ));
    }
    if record_at.first().is_some_and(|&s| s == 0) || record_at.last().is_some_and(|&s| s > n) {
        return Err(Error::InvalidArgument(format!(
            "record_at must lie in 1..={n}"
        )));
    }
    let mut evo = HeisenbergEvolution::new(op, period)?;
    let mut sizes = Vec::with_capacity(record_at.len());
    let mut next = record_at.iter().peekable();
    for _ in 0..n {
        evo.advance()?;
        if next.peek() == Some(&&evo.step()) {
            sizes.push(evo.average_size()?);
            next.next();
        }
    }
    Ok(NormSeries {
        steps: record_at.to_vec(),
        sizes,
        op_label: op_label.to_string(),
        config: *period.config(),
    })
}

//! Dense complex linear algebra for small qubit registers.
//!
//! Basis index convention: qubit 0 is the least significant bit of a
//! computational-basis index. Operators are stored row-major, so in the flat
//! entry index `row * 2^L + col` the column occupies bits `0..L` and the row
//! occupies bits `L..2L`. Every kernel here works on that flat index and only
//! ever touches the one or two bit positions a gate acts on.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Per-entry tolerance for `U†U = 1` at gate construction.
pub const UNITARY_TOL: f64 = 1e-12;
/// Tolerance for Hermiticity and imaginary-residue checks.
pub const HERMITIAN_TOL: f64 = 1e-10;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

fn check_qubit(index: usize, num_qubits: usize) -> Result<()> {
    if index < num_qubits {
        Ok(())
    } else {
        Err(Error::QubitOutOfRange { index, num_qubits })
    }
}

fn check_residue(value: C64) -> Result<f64> {
    if value.im.abs() > HERMITIAN_TOL * value.re.abs().max(1.0) {
        return Err(Error::ImaginaryResidue(value.im));
    }
    Ok(value.re)
}

// ---------------------------------------------------------------------------
// Gates
// ---------------------------------------------------------------------------

/// Qubits a gate acts on. For two-qubit gates the local basis index of the
/// 4×4 matrix is `bit(first) + 2 * bit(second)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Targets {
    One(usize),
    Two(usize, usize),
}

impl Targets {
    pub fn max_qubit(&self) -> usize {
        match *self {
            Targets::One(q) => q,
            Targets::Two(a, b) => a.max(b),
        }
    }
}

/// Sparsity pattern of a gate matrix, used to pick the cheapest kernel.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Structure {
    Diagonal,
    /// 4×4 with non-zeros only where `k == l` or `k == 3 - l`, e.g.
    /// `exp(-i(a XX + b ZZ))`.
    Parity,
    Dense,
}

/// Kernel-ready form of a gate: matrices re-indexed so that the local index
/// is `bit(lo) + 2 * bit(hi)` with `lo < hi`.
#[derive(Clone, Debug)]
struct Canonical {
    lo: usize,
    hi: usize,
    structure: Structure,
    forward: Vec<C64>,
    dagger: Vec<C64>,
    transpose: Vec<C64>,
}

/// An immutable 1- or 2-qubit unitary.
#[derive(Clone, Debug)]
pub struct Gate {
    targets: Targets,
    matrix: Vec<C64>,
    label: String,
    canonical: Canonical,
}

fn matmul(a: &[C64], b: &[C64], n: usize) -> Vec<C64> {
    let mut out = vec![ZERO; n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i * n + k];
            for j in 0..n {
                out[i * n + j] += aik * b[k * n + j];
            }
        }
    }
    out
}

fn dagger(m: &[C64], n: usize) -> Vec<C64> {
    let mut out = vec![ZERO; n * n];
    for i in 0..n {
        for j in 0..n {
            out[j * n + i] = m[i * n + j].conj();
        }
    }
    out
}

fn transpose(m: &[C64], n: usize) -> Vec<C64> {
    let mut out = vec![ZERO; n * n];
    for i in 0..n {
        for j in 0..n {
            out[j * n + i] = m[i * n + j];
        }
    }
    out
}

fn classify(m: &[C64], n: usize) -> Structure {
    let mut diagonal = true;
    let mut parity = n == 4;
    for k in 0..n {
        for l in 0..n {
            if m[k * n + l] == ZERO {
                continue;
            }
            if k != l {
                diagonal = false;
                if k != n - 1 - l {
                    parity = false;
                }
            }
        }
    }
    if diagonal {
        Structure::Diagonal
    } else if parity {
        Structure::Parity
    } else {
        Structure::Dense
    }
}

fn unitarity_deviation(m: &[C64], n: usize) -> f64 {
    let prod = matmul(&dagger(m, n), m, n);
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { ONE } else { ZERO };
            worst = worst.max((prod[i * n + j] - target).norm());
        }
    }
    worst
}

impl Gate {
    /// A single-qubit gate from a row-major 2×2 matrix.
    pub fn single(qubit: usize, matrix: [C64; 4], label: impl Into<String>) -> Result<Self> {
        Self::build(Targets::One(qubit), matrix.to_vec(), label.into())
    }

    /// A two-qubit gate from a row-major 4×4 matrix whose local basis index
    /// is `bit(first) + 2 * bit(second)`.
    pub fn two(
        first: usize,
        second: usize,
        matrix: [C64; 16],
        label: impl Into<String>,
    ) -> Result<Self> {
        if first == second {
            return Err(Error::DuplicateTarget(first));
        }
        Self::build(Targets::Two(first, second), matrix.to_vec(), label.into())
    }

    fn build(targets: Targets, matrix: Vec<C64>, label: String) -> Result<Self> {
        let n = if matrix.len() == 4 { 2 } else { 4 };
        let deviation = unitarity_deviation(&matrix, n);
        if !(deviation <= UNITARY_TOL) {
            return Err(Error::NotUnitary { label, deviation });
        }
        Ok(Self::assemble(targets, matrix, label))
    }

    fn assemble(targets: Targets, matrix: Vec<C64>, label: String) -> Self {
        let n = if matrix.len() == 4 { 2 } else { 4 };
        let (lo, hi, local) = match targets {
            Targets::One(q) => (q, q, matrix.clone()),
            Targets::Two(a, b) if a < b => (a, b, matrix.clone()),
            Targets::Two(a, b) => {
                // swap the two local index bits
                let p = |i: usize| ((i & 1) << 1) | (i >> 1);
                let mut m = vec![ZERO; 16];
                for k in 0..4 {
                    for l in 0..4 {
                        m[p(k) * 4 + p(l)] = matrix[k * 4 + l];
                    }
                }
                (b, a, m)
            }
        };
        let canonical = Canonical {
            lo,
            hi,
            structure: classify(&local, n),
            dagger: dagger(&local, n),
            transpose: transpose(&local, n),
            forward: local,
        };
        Gate {
            targets,
            matrix,
            label,
            canonical,
        }
    }

    pub fn targets(&self) -> Targets {
        self.targets
    }

    /// Row-major matrix in the caller's target ordering.
    pub fn matrix(&self) -> &[C64] {
        &self.matrix
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn is_diagonal(&self) -> bool {
        self.canonical.structure == Structure::Diagonal
    }

    /// Multiplies `phases[b]` by this gate's diagonal entry for basis
    /// state `b`. Only meaningful for diagonal gates.
    pub fn accumulate_diagonal(&self, phases: &mut [C64]) -> Result<()> {
        if !self.is_diagonal() {
            return Err(Error::InvalidArgument(format!(
                "gate `{}` is not diagonal",
                self.label
            )));
        }
        let c = &self.canonical;
        for (b, p) in phases.iter_mut().enumerate() {
            let local = match self.targets {
                Targets::One(_) => (b >> c.lo) & 1,
                Targets::Two(..) => ((b >> c.lo) & 1) | (((b >> c.hi) & 1) << 1),
            };
            let n = if self.matrix.len() == 4 { 2 } else { 4 };
            *p *= c.forward[local * n + local];
        }
        Ok(())
    }

    /// The Hermitian adjoint of this gate.
    pub fn adjoint(&self) -> Gate {
        let n = if self.matrix.len() == 4 { 2 } else { 4 };
        Gate::assemble(
            self.targets,
            dagger(&self.matrix, n),
            format!("{}†", self.label),
        )
    }

    fn check_range(&self, num_qubits: usize) -> Result<()> {
        match self.targets {
            Targets::One(q) => check_qubit(q, num_qubits),
            Targets::Two(a, b) => {
                check_qubit(a, num_qubits)?;
                check_qubit(b, num_qubits)
            }
        }
    }

    /// Applies `m` (one of the canonical matrices) with the target qubits
    /// shifted by `offset` bit positions in the flat index.
    fn apply_flat(&self, data: &mut [C64], m: &[C64], offset: usize) {
        let c = &self.canonical;
        match self.targets {
            Targets::One(_) => apply_1q(data, c.lo + offset, m, c.structure),
            Targets::Two(..) => apply_2q(data, c.lo + offset, c.hi + offset, m, c.structure),
        }
    }
}

fn apply_1q(data: &mut [C64], bit: usize, m: &[C64], structure: Structure) {
    let stride = 1usize << bit;
    let (m0, m1, m2, m3) = (m[0], m[1], m[2], m[3]);
    for block in data.chunks_exact_mut(2 * stride) {
        let (a, b) = block.split_at_mut(stride);
        if structure == Structure::Diagonal {
            a.iter_mut().for_each(|x| *x *= m0);
            b.iter_mut().for_each(|y| *y *= m3);
        } else {
            for (x, y) in a.iter_mut().zip(b.iter_mut()) {
                let (u, v) = (*x, *y);
                *x = m0 * u + m1 * v;
                *y = m2 * u + m3 * v;
            }
        }
    }
}

/// Visits every quadruple of flat indices that differ only in bits `lo` and
/// `hi`, in local order `00, 01 (lo set), 10 (hi set), 11`.
#[inline(always)]
fn for_each_quad(
    data: &mut [C64],
    lo: usize,
    hi: usize,
    mut f: impl FnMut(&mut C64, &mut C64, &mut C64, &mut C64),
) {
    let s_lo = 1usize << lo;
    let s_hi = 1usize << hi;
    for block in data.chunks_exact_mut(2 * s_hi) {
        let (h0, h1) = block.split_at_mut(s_hi);
        for (c0, c1) in h0
            .chunks_exact_mut(2 * s_lo)
            .zip(h1.chunks_exact_mut(2 * s_lo))
        {
            let (a00, a01) = c0.split_at_mut(s_lo);
            let (a10, a11) = c1.split_at_mut(s_lo);
            for ((x0, x1), (x2, x3)) in a00
                .iter_mut()
                .zip(a01.iter_mut())
                .zip(a10.iter_mut().zip(a11.iter_mut()))
            {
                f(x0, x1, x2, x3);
            }
        }
    }
}

fn apply_2q(data: &mut [C64], lo: usize, hi: usize, m: &[C64], structure: Structure) {
    let m: [C64; 16] = m.try_into().expect("4x4 gate matrix");
    match structure {
        Structure::Diagonal => {
            let (d0, d1, d2, d3) = (m[0], m[5], m[10], m[15]);
            for_each_quad(data, lo, hi, |x0, x1, x2, x3| {
                *x0 *= d0;
                *x1 *= d1;
                *x2 *= d2;
                *x3 *= d3;
            });
        }
        Structure::Parity => {
            let (m00, m03, m11, m12, m21, m22, m30, m33) =
                (m[0], m[3], m[5], m[6], m[9], m[10], m[12], m[15]);
            for_each_quad(data, lo, hi, |x0, x1, x2, x3| {
                let (v0, v1, v2, v3) = (*x0, *x1, *x2, *x3);
                *x0 = m00 * v0 + m03 * v3;
                *x1 = m11 * v1 + m12 * v2;
                *x2 = m21 * v1 + m22 * v2;
                *x3 = m30 * v0 + m33 * v3;
            });
        }
        Structure::Dense => {
            for_each_quad(data, lo, hi, |x0, x1, x2, x3| {
                let v = [*x0, *x1, *x2, *x3];
                let row = |k: usize| {
                    m[4 * k] * v[0]
                        + m[4 * k + 1] * v[1]
                        + m[4 * k + 2] * v[2]
                        + m[4 * k + 3] * v[3]
                };
                let out = [row(0), row(1), row(2), row(3)];
                *x0 = out[0];
                *x1 = out[1];
                *x2 = out[2];
                *x3 = out[3];
            });
        }
    }
}

// ---------------------------------------------------------------------------
// States
// ---------------------------------------------------------------------------

/// Pure state of `num_qubits` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amplitudes: Vec<C64>,
}

impl StateVector {
    /// The computational basis state `|index⟩`.
    pub fn basis(num_qubits: usize, index: usize) -> Result<Self> {
        if num_qubits == 0 {
            return Err(Error::InvalidArgument(
                "state needs at least one qubit".into(),
            ));
        }
        let dim = 1usize << num_qubits;
        if index >= dim {
            return Err(Error::InvalidArgument(format!(
                "basis index {index} out of range for {num_qubits} qubits"
            )));
        }
        let mut amplitudes = vec![ZERO; dim];
        amplitudes[index] = ONE;
        Ok(StateVector {
            num_qubits,
            amplitudes,
        })
    }

    pub fn zero(num_qubits: usize) -> Result<Self> {
        Self::basis(num_qubits, 0)
    }

    pub fn from_amplitudes(num_qubits: usize, amplitudes: Vec<C64>) -> Result<Self> {
        if num_qubits == 0 {
            return Err(Error::InvalidArgument(
                "state needs at least one qubit".into(),
            ));
        }
        let expected = 1usize << num_qubits;
        if amplitudes.len() != expected {
            return Err(Error::InvalidLength {
                expected,
                found: amplitudes.len(),
            });
        }
        Ok(StateVector {
            num_qubits,
            amplitudes,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Applies `gate` in place.
    pub fn apply(&mut self, gate: &Gate) -> Result<()> {
        gate.check_range(self.num_qubits)?;
        gate.apply_flat(&mut self.amplitudes, &gate.canonical.forward, 0);
        Ok(())
    }

    /// `⟨ψ|O|ψ⟩` for a Hermitian `O`.
    pub fn expectation(&self, op: &DenseOperator) -> Result<f64> {
        if op.num_qubits != self.num_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.num_qubits,
                found: op.num_qubits,
            });
        }
        let dim = self.amplitudes.len();
        let mut acc = ZERO;
        for (i, row) in op.entries.chunks_exact(dim).enumerate() {
            let mut r = ZERO;
            for (o, a) in row.iter().zip(&self.amplitudes) {
                r += o * a;
            }
            acc += self.amplitudes[i].conj() * r;
        }
        check_residue(acc)
    }

    /// `⟨ψ|φ⟩`.
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        if other.num_qubits != self.num_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.num_qubits,
                found: other.num_qubits,
            });
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }
}

/// Applies `gate` to `state` in place.
pub fn apply_gate(state: &mut StateVector, gate: &Gate) -> Result<()> {
    state.apply(gate)
}

/// `⟨ψ|O|ψ⟩`.
pub fn expectation(state: &StateVector, op: &DenseOperator) -> Result<f64> {
    state.expectation(op)
}

// ---------------------------------------------------------------------------
// Operators
// ---------------------------------------------------------------------------

/// A `2^L × 2^L` complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseOperator {
    num_qubits: usize,
    entries: Vec<C64>,
}

impl DenseOperator {
    pub fn zeros(num_qubits: usize) -> Self {
        let dim = 1usize << num_qubits;
        DenseOperator {
            num_qubits,
            entries: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(num_qubits: usize) -> Self {
        let mut op = Self::zeros(num_qubits);
        let dim = op.dim();
        for i in 0..dim {
            op.entries[i * dim + i] = ONE;
        }
        op
    }

    pub fn from_entries(num_qubits: usize, entries: Vec<C64>) -> Result<Self> {
        let dim = 1usize << num_qubits;
        if entries.len() != dim * dim {
            return Err(Error::InvalidLength {
                expected: dim * dim,
                found: entries.len(),
            });
        }
        Ok(DenseOperator {
            num_qubits,
            entries,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        1usize << self.num_qubits
    }

    pub fn entries(&self) -> &[C64] {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.entries[row * self.dim() + col]
    }

    pub fn trace(&self) -> C64 {
        let dim = self.dim();
        (0..dim).map(|i| self.entries[i * dim + i]).sum()
    }

    /// Largest entry of `|O - O†|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let dim = self.dim();
        let mut worst: f64 = 0.0;
        for i in 0..dim {
            for j in i..dim {
                worst = worst
                    .max((self.entries[i * dim + j] - self.entries[j * dim + i].conj()).norm());
            }
        }
        worst
    }

    /// `O ← U† O U`: a row pass with `U†` followed by a column pass with `Uᵀ`.
    pub fn conjugate(&mut self, gate: &Gate) -> Result<()> {
        gate.check_range(self.num_qubits)?;
        let c = &gate.canonical;
        gate.apply_flat(&mut self.entries, &c.dagger, self.num_qubits);
        gate.apply_flat(&mut self.entries, &c.transpose, 0);
        Ok(())
    }

    /// `O ← D† O D` for a diagonal unitary `D = diag(phases)`.
    pub fn conjugate_diagonal(&mut self, phases: &[C64]) -> Result<()> {
        let dim = self.dim();
        if phases.len() != dim {
            return Err(Error::InvalidLength {
                expected: dim,
                found: phases.len(),
            });
        }
        for (row, left) in self.entries.chunks_exact_mut(dim).zip(phases) {
            let left = left.conj();
            for (o, right) in row.iter_mut().zip(phases) {
                *o = *o * right * left;
            }
        }
        Ok(())
    }

    /// `self += other`.
    pub fn add_assign(&mut self, other: &DenseOperator) -> Result<()> {
        if other.num_qubits != self.num_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.num_qubits,
                found: other.num_qubits,
            });
        }
        for (a, b) in self.entries.iter_mut().zip(&other.entries) {
            *a += b;
        }
        Ok(())
    }

    pub fn scale(&mut self, factor: f64) {
        self.entries.iter_mut().for_each(|a| *a *= factor);
    }

    /// `Σᵢⱼ Oᵢⱼ Oⱼᵢ`, i.e. `Tr(O²)` without forming the product.
    pub fn trace_of_square(&self) -> C64 {
        let dim = self.dim();
        let mut acc = ZERO;
        for i in 0..dim {
            acc += self.entries[i * dim + i] * self.entries[i * dim + i];
            for j in (i + 1)..dim {
                acc += 2.0 * self.entries[i * dim + j] * self.entries[j * dim + i];
            }
        }
        acc
    }

    /// Normalized size `Tr(O²) / 2^L`.
    pub fn size_sq(&self) -> Result<f64> {
        let value = self.trace_of_square() / self.dim() as f64;
        check_residue(value)
    }
}

/// `O ← U† O U` on a copy of `op`.
pub fn conjugate_operator(op: &DenseOperator, gate: &Gate) -> Result<DenseOperator> {
    let mut out = op.clone();
    out.conjugate(gate)?;
    Ok(out)
}

/// `Tr(O·O) / 2^L`.
pub fn operator_size_sq(op: &DenseOperator) -> Result<f64> {
    op.size_sq()
}

// ---------------------------------------------------------------------------
// Pauli strings
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    fn symbol(self) -> char {
        match self {
            Axis::X => 'X',
            Axis::Y => 'Y',
            Axis::Z => 'Z',
        }
    }
}

/// A product of single-site Pauli operators on distinct sites, kept sorted
/// by site.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct PauliString {
    factors: Vec<(usize, Axis)>,
}

impl PauliString {
    pub fn new(mut factors: Vec<(usize, Axis)>) -> Result<Self> {
        factors.sort_unstable();
        if let Some(w) = factors.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(Error::DuplicateSite(w[0].0));
        }
        Ok(PauliString { factors })
    }

    pub fn identity() -> Self {
        PauliString::default()
    }

    pub fn single(site: usize, axis: Axis) -> Self {
        PauliString {
            factors: vec![(site, axis)],
        }
    }

    pub fn factors(&self) -> &[(usize, Axis)] {
        &self.factors
    }

    pub fn sites(&self) -> impl Iterator<Item = usize> + '_ {
        self.factors.iter().map(|&(s, _)| s)
    }

    fn check(&self, num_qubits: usize) -> Result<()> {
        self.sites().try_for_each(|s| check_qubit(s, num_qubits))
    }

    /// Bit mask of sites carrying X or Y.
    fn flip_mask(&self) -> usize {
        self.factors
            .iter()
            .filter(|(_, a)| *a != Axis::Z)
            .fold(0, |m, &(s, _)| m | (1 << s))
    }

    /// Phase `c` with `P|b⟩ = c |b ⊕ flip_mask⟩`.
    fn phase(&self, basis: usize) -> C64 {
        let mut phase = ONE;
        for &(s, axis) in &self.factors {
            let bit = (basis >> s) & 1;
            phase *= match (axis, bit) {
                (Axis::X, _) => ONE,
                (Axis::Y, 0) => C64::new(0.0, 1.0),
                (Axis::Y, _) => C64::new(0.0, -1.0),
                (Axis::Z, 0) => ONE,
                (Axis::Z, _) => -ONE,
            };
        }
        phase
    }

    /// Dense `2^L × 2^L` form with identities on untouched sites.
    pub fn to_dense(&self, num_qubits: usize) -> Result<DenseOperator> {
        self.check(num_qubits)?;
        let mut op = DenseOperator::zeros(num_qubits);
        let dim = op.dim();
        let mask = self.flip_mask();
        for col in 0..dim {
            op.entries[(col ^ mask) * dim + col] = self.phase(col);
        }
        Ok(op)
    }

    /// `⟨ψ|P|ψ⟩` in `O(2^L)` without building the dense form.
    pub fn expectation(&self, state: &StateVector) -> Result<f64> {
        self.check(state.num_qubits)?;
        let mask = self.flip_mask();
        let amps = state.amplitudes();
        let acc: C64 = amps
            .iter()
            .enumerate()
            .map(|(b, a)| amps[b ^ mask].conj() * self.phase(b) * a)
            .sum();
        check_residue(acc)
    }
}

/// Dense matrix of a Pauli string on `num_qubits` qubits.
pub fn pauli_to_dense(p: &PauliString, num_qubits: usize) -> Result<DenseOperator> {
    p.to_dense(num_qubits)
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return f.write_str("I");
        }
        for (i, (site, axis)) in self.factors.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{}{}", axis.symbol(), site)?;
        }
        Ok(())
    }
}

/// Parses whitespace-separated factors such as `"X3 X4"`; `"I"` or an empty
/// string is the identity.
impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |msg: String| Error::Parse {
            line: 1,
            message: msg,
        };
        let mut factors = Vec::new();
        for token in s.split_whitespace() {
            if token == "I" {
                continue;
            }
            let mut chars = token.chars();
            let axis = match chars.next() {
                Some('X') | Some('x') => Axis::X,
                Some('Y') | Some('y') => Axis::Y,
                Some('Z') | Some('z') => Axis::Z,
                _ => return Err(bad(format!("bad Pauli factor `{token}`"))),
            };
            let digits = chars.as_str();
            if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
                return Err(bad(format!("bad site index in `{token}`")));
            }
            let site: usize = digits
                .parse()
                .map_err(|_| bad(format!("site index too large in `{token}`")))?;
            if site >= 64 {
                return Err(bad(format!("site index {site} exceeds 63")));
            }
            factors.push((site, axis));
        }
        PauliString::new(factors)
    }
}

impl serde::Serialize for PauliString {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> serde::Deserialize<'de> for PauliString {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

//! Dense reference linear algebra used as an independent oracle. Operators
//! are built from Kronecker products with qubit 0 as the least significant
//! factor.
#![allow(dead_code)]

use floqmbl::kernel::Targets;
use floqmbl::{Gate, C64};
use rand::Rng;
use rand_distr::StandardNormal;

#[derive(Clone, Debug, PartialEq)]
pub struct Mat {
    pub dim: usize,
    pub data: Vec<C64>,
}

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

impl Mat {
    pub fn zeros(dim: usize) -> Self {
        Mat { dim, data: vec![c(0.0, 0.0); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = c(1.0, 0.0);
        }
        m
    }

    pub fn from_slice(dim: usize, data: &[C64]) -> Self {
        assert_eq!(data.len(), dim * dim);
        Mat { dim, data: data.to_vec() }
    }

    pub fn at(&self, r: usize, col: usize) -> C64 {
        self.data[r * self.dim + col]
    }

    pub fn mul(&self, other: &Mat) -> Mat {
        let n = self.dim;
        let mut out = Mat::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.at(i, k);
                if a == c(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.at(k, j);
                }
            }
        }
        out
    }

    pub fn dagger(&self) -> Mat {
        let n = self.dim;
        let mut out = Mat::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.data[j * n + i] = self.at(i, j).conj();
            }
        }
        out
    }

    pub fn scale(&self, s: C64) -> Mat {
        Mat { dim: self.dim, data: self.data.iter().map(|x| x * s).collect() }
    }

    pub fn add(&self, other: &Mat) -> Mat {
        Mat { dim: self.dim, data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect() }
    }

    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        (0..self.dim).map(|i| (0..self.dim).map(|j| self.at(i, j) * v[j]).sum()).collect()
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.at(i, i)).sum()
    }

    pub fn max_diff(&self, other: &[C64]) -> f64 {
        self.data.iter().zip(other).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }
}

pub fn kron(a: &Mat, b: &Mat) -> Mat {
    let n = a.dim * b.dim;
    let mut out = Mat::zeros(n);
    for i in 0..a.dim {
        for j in 0..a.dim {
            let x = a.at(i, j);
            for k in 0..b.dim {
                for l in 0..b.dim {
                    out.data[(i * b.dim + k) * n + j * b.dim + l] = x * b.at(k, l);
                }
            }
        }
    }
    out
}

/// `I, X, Y, Z`.
pub fn paulis() -> [Mat; 4] {
    let (o, l, i) = (c(0.0, 0.0), c(1.0, 0.0), c(0.0, 1.0));
    [
        Mat::from_slice(2, &[l, o, o, l]),
        Mat::from_slice(2, &[o, l, l, o]),
        Mat::from_slice(2, &[o, -i, i, o]),
        Mat::from_slice(2, &[l, o, o, -l]),
    ]
}

/// `⊗_{q = L-1..0} factors[q]`.
pub fn kron_chain(factors: &[Mat]) -> Mat {
    factors.iter().rev().skip(1).fold(factors.last().unwrap().clone(), |acc, f| kron(&acc, f))
}

/// Single-site matrix on qubit `q` of `l`.
pub fn embed_single(l: usize, q: usize, m: &Mat) -> Mat {
    let mut factors = vec![Mat::identity(2); l];
    factors[q] = m.clone();
    kron_chain(&factors)
}

/// Two-site matrix with local index `bit(a) + 2 bit(b)`, expanded in the
/// Pauli basis `m = Σ c_{PQ} P_a Q_b` and rebuilt from Kronecker chains.
pub fn embed_two(l: usize, a: usize, b: usize, m: &Mat) -> Mat {
    let ps = paulis();
    let mut out = Mat::zeros(1 << l);
    for (pi, p) in ps.iter().enumerate() {
        for (qi, q) in ps.iter().enumerate() {
            // local ordering: b is the more significant factor
            let basis = kron(q, p);
            let coeff = basis.dagger().mul(m).trace() / 4.0;
            if coeff.norm() < 1e-15 {
                continue;
            }
            let mut factors = vec![Mat::identity(2); l];
            factors[a] = ps[pi].clone();
            factors[b] = ps[qi].clone();
            out = out.add(&kron_chain(&factors).scale(coeff));
        }
    }
    out
}

pub fn gate_matrix(l: usize, gate: &Gate) -> Mat {
    match gate.targets() {
        Targets::One(q) => embed_single(l, q, &Mat::from_slice(2, gate.matrix())),
        Targets::Two(a, b) => embed_two(l, a, b, &Mat::from_slice(4, gate.matrix())),
    }
}

/// `G_k ⋯ G_1` for gates listed in application order.
pub fn circuit_unitary(l: usize, gates: &[Gate]) -> Mat {
    gates.iter().fold(Mat::identity(1 << l), |u, g| gate_matrix(l, g).mul(&u))
}

fn gaussian<R: Rng>(rng: &mut R) -> C64 {
    c(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Random unitary by Gram–Schmidt on Gaussian columns.
pub fn random_unitary<R: Rng>(rng: &mut R, dim: usize) -> Vec<C64> {
    let mut cols: Vec<Vec<C64>> = Vec::new();
    for _ in 0..dim {
        let mut v: Vec<C64> = (0..dim).map(|_| gaussian(rng)).collect();
        for u in &cols {
            let proj: C64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (x, y) in v.iter_mut().zip(u) {
                *x -= proj * y;
            }
        }
        let n = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        cols.push(v.into_iter().map(|x| x / n).collect());
    }
    let mut out = vec![c(0.0, 0.0); dim * dim];
    for (j, col) in cols.iter().enumerate() {
        for (i, x) in col.iter().enumerate() {
            out[i * dim + j] = *x;
        }
    }
    out
}

pub fn random_gate<R: Rng>(rng: &mut R, l: usize) -> Gate {
    if rng.gen_bool(0.4) {
        let u = random_unitary(rng, 2);
        Gate::single(rng.gen_range(0..l), u.try_into().unwrap(), "u1").unwrap()
    } else {
        let a = rng.gen_range(0..l);
        let mut b = rng.gen_range(0..l - 1);
        if b >= a {
            b += 1;
        }
        let u = random_unitary(rng, 4);
        Gate::two(a, b, u.try_into().unwrap(), "u2").unwrap()
    }
}

pub fn random_state<R: Rng>(rng: &mut R, l: usize) -> Vec<C64> {
    let v: Vec<C64> = (0..1usize << l).map(|_| gaussian(rng)).collect();
    let n = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|x| x / n).collect()
}

/// Random Hermitian matrix.
pub fn random_hermitian<R: Rng>(rng: &mut R, dim: usize) -> Mat {
    let a = Mat { dim, data: (0..dim * dim).map(|_| gaussian(rng)).collect() };
    a.add(&a.dagger()).scale(c(0.5, 0.0))
}

//! Test-only oracles shared by the integration suites.
#![allow(dead_code)]

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use stabilizer_learn::{BitVector, PauliString};

pub type CMat = Vec<Vec<Complex64>>;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// The four label matrices written out entry by entry.
pub fn sigma_matrix(a: bool, b: bool) -> CMat {
    match (a, b) {
        (false, false) => vec![vec![c(1.), c(0.)], vec![c(0.), c(1.)]],
        (false, true) => vec![vec![c(0.), c(1.)], vec![c(1.), c(0.)]],
        (true, false) => vec![vec![c(1.), c(0.)], vec![c(0.), c(-1.)]],
        (true, true) => vec![vec![c(0.), c(1.)], vec![c(-1.), c(0.)]],
    }
}

pub fn kron(x: &CMat, y: &CMat) -> CMat {
    let (m, n) = (x.len(), y.len());
    let mut out = vec![vec![c(0.); m * n]; m * n];
    for i in 0..m {
        for j in 0..m {
            for k in 0..n {
                for l in 0..n {
                    out[i * n + k][j * n + l] = x[i][j] * y[k][l];
                }
            }
        }
    }
    out
}

pub fn matmul(x: &CMat, y: &CMat) -> CMat {
    let n = x.len();
    let mut out = vec![vec![c(0.); n]; n];
    for i in 0..n {
        for k in 0..n {
            if x[i][k] == c(0.) {
                continue;
            }
            for j in 0..n {
                out[i][j] += x[i][k] * y[k][j];
            }
        }
    }
    out
}

pub fn adjoint(x: &CMat) -> CMat {
    let n = x.len();
    (0..n).map(|i| (0..n).map(|j| x[j][i].conj()).collect()).collect()
}

pub fn identity(n: usize) -> CMat {
    (0..n).map(|i| (0..n).map(|j| c(if i == j { 1. } else { 0. })).collect()).collect()
}

pub fn mat_close(x: &CMat, y: &CMat) -> bool {
    x.iter().flatten().zip(y.iter().flatten()).all(|(a, b)| (a - b).norm() < 1e-12)
}

/// `phase · σ_bits` as a dense matrix, qubit 0 as the leftmost factor.
pub fn pauli_matrix(p: &PauliString) -> CMat {
    let bits = p.bits();
    let mut m = vec![vec![c(1.)]];
    for q in 0..p.num_qubits() {
        m = kron(&m, &sigma_matrix(bits.get(2 * q), bits.get(2 * q + 1)));
    }
    let phase = Complex64::i().powu(p.phase().exponent() as u32);
    m.iter_mut().flatten().for_each(|e| *e *= phase);
    m
}

/// All `2n`-bit labels.
pub fn all_labels(n: usize) -> Vec<BitVector> {
    (0..1usize << (2 * n))
        .map(|i| BitVector::from_bools(&(0..2 * n).map(|j| i >> j & 1 == 1).collect::<Vec<_>>()))
        .collect()
}

/// Pearson chi-square statistic of `counts` against a uniform expectation.
pub fn chi_square_uniform(counts: &[u64]) -> f64 {
    let total: u64 = counts.iter().sum();
    let expected = total as f64 / counts.len() as f64;
    counts.iter().map(|&o| (o as f64 - expected).powi(2) / expected).sum()
}

/// Two-proportion z statistic.
pub fn two_proportion_z(x1: u64, n1: u64, x2: u64, n2: u64) -> f64 {
    let (p1, p2) = (x1 as f64 / n1 as f64, x2 as f64 / n2 as f64);
    let p = (x1 + x2) as f64 / (n1 + n2) as f64;
    let se = (p * (1.0 - p) * (1.0 / n1 as f64 + 1.0 / n2 as f64)).sqrt();
    if se == 0.0 {
        0.0
    } else {
        (p1 - p2) / se
    }
}

/// Total variation between two histograms over the same outcome indices.
pub fn tv_counts(a: &[u64], b: &[u64]) -> f64 {
    let (ta, tb) = (a.iter().sum::<u64>() as f64, b.iter().sum::<u64>() as f64);
    0.5 * a.iter().zip(b).map(|(&x, &y)| (x as f64 / ta - y as f64 / tb).abs()).sum::<f64>()
}

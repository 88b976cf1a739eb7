//! Brute-force statevector oracle for small qubit counts.
//!
//! Everything here works on explicit `2^n` amplitude vectors and is written
//! without reference to the tableau machinery (except for the bridge
//! [`StateVector::from_tableau`], which only reads generator data). It is the
//! independent reference that the fast paths are checked against.
//!
//! Basis index convention: qubit `q` (0-based) is bit `n - 1 - q` of the
//! index, so qubit 0 is the most significant and integer order on indices is
//! lexicographic order on bit strings written qubit 0 first. Bell outcome
//! labels use the same rule over `2n` positions.

use std::collections::HashMap;
use std::fmt::Write as _;

use num_complex::Complex64;

use crate::error::{check_len, Error, Result};
use crate::f2linalg::{rref_basis, span_coefficients, BitMatrix, BitVector};
use crate::pauli::PauliString;
use crate::tableau::{Gate, StabilizerTableau};

/// Largest register accepted for statevectors.
pub const MAX_STATE_QUBITS: usize = 14;
/// Largest register for which the `4^n`-entry Bell distribution is built.
pub const MAX_BELL_QUBITS: usize = 7;
/// Largest register for the exhaustive searches and quadratic-form extraction.
pub const MAX_SEARCH_QUBITS: usize = 12;

/// Tolerance for identities that hold exactly in exact arithmetic.
pub const EXACT_TOL: f64 = 1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const I_POWERS: [Complex64; 4] =
    [Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0), Complex64::new(-1.0, 0.0), Complex64::new(0.0, -1.0)];

fn check_capacity(n: usize, max: usize) -> Result<()> {
    if n > max {
        Err(Error::Capacity { n, max })
    } else {
        Ok(())
    }
}

/// Index bit of qubit `q` in an `n`-qubit register.
#[inline]
fn qubit_mask(n: usize, q: usize) -> usize {
    1 << (n - 1 - q)
}

/// Integer index of a bit string (position 0 most significant).
pub fn label_index(bits: &BitVector) -> usize {
    bits.iter_ones().fold(0, |acc, j| acc | 1 << (bits.len() - 1 - j))
}

/// Inverse of [`label_index`].
pub fn index_label(index: usize, len: usize) -> BitVector {
    let mut v = BitVector::zeros(len);
    for j in 0..len {
        if index >> (len - 1 - j) & 1 == 1 {
            v.set(j, true);
        }
    }
    v
}

/// `σ_s` as (x-flip mask, z mask) over basis indices.
fn sigma_masks(n: usize, bits: &BitVector) -> (usize, usize) {
    let mut flip = 0;
    let mut zmask = 0;
    for q in 0..n {
        if bits.get(2 * q) {
            zmask |= qubit_mask(n, q);
        }
        if bits.get(2 * q + 1) {
            flip |= qubit_mask(n, q);
        }
    }
    (flip, zmask)
}

/// `σ_s v` for raw amplitudes, with `σ_ab = Z^a X^b` per qubit.
fn apply_sigma_raw(n: usize, bits: &BitVector, v: &[Complex64]) -> Vec<Complex64> {
    let (flip, zmask) = sigma_masks(n, bits);
    let mut out = vec![ZERO; v.len()];
    for (x, &a) in v.iter().enumerate() {
        let y = x ^ flip;
        out[y] = if (y & zmask).count_ones() % 2 == 1 { -a } else { a };
    }
    out
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// A normalized `n`-qubit pure state with canonical global phase: the first
/// nonzero amplitude is real and positive.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// The computational basis state `|index⟩`.
    pub fn basis(n: usize, index: usize) -> Result<Self> {
        check_capacity(n, MAX_STATE_QUBITS)?;
        if index >= 1 << n {
            return Err(Error::Domain(format!("basis index {index} out of range for {n} qubits")));
        }
        let mut amps = vec![ZERO; 1 << n];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(Self { n, amps })
    }

    /// Normalizes `amps` (length `2^n`) in norm and global phase.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let len = amps.len();
        if !len.is_power_of_two() {
            return Err(Error::Domain(format!("{len} amplitudes is not a power of two")));
        }
        let n = len.trailing_zeros() as usize;
        check_capacity(n, MAX_STATE_QUBITS)?;
        let mut s = Self { n, amps };
        let norm = s.amps.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt();
        if norm < 1e-300 {
            return Err(Error::Domain("zero vector cannot be normalized".into()));
        }
        s.amps.iter_mut().for_each(|a| *a /= norm);
        s.normalize_phase();
        Ok(s)
    }

    fn normalize_phase(&mut self) {
        let max = self.amps.iter().map(|a| a.norm()).fold(0.0, f64::max);
        if let Some(first) = self.amps.iter().find(|a| a.norm() > 1e-6 * max) {
            let rot = first.conj() / first.norm();
            self.amps.iter_mut().for_each(|a| *a *= rot);
        }
    }

    #[inline]
    pub fn num_qubits(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    /// The state fixed by every generator of `t`, obtained by projecting the
    /// first computational basis state with nonzero image through
    /// `Π_k (I + g_k) / 2`.
    pub fn from_tableau(t: &StabilizerTableau) -> Result<Self> {
        let n = t.num_qubits();
        check_capacity(n, MAX_STATE_QUBITS)?;
        let ops: Vec<(usize, usize, Complex64)> = t
            .generators()
            .iter()
            .map(|g| {
                let (flip, zmask) = sigma_masks(n, g.bits());
                (flip, zmask, I_POWERS[g.phase().exponent() as usize])
            })
            .collect();

        for start in 0..1usize << n {
            let mut v: HashMap<usize, Complex64> = HashMap::from([(start, Complex64::new(1.0, 0.0))]);
            for &(flip, zmask, phase) in &ops {
                let mut next: HashMap<usize, Complex64> = HashMap::with_capacity(2 * v.len());
                for (&x, &a) in &v {
                    *next.entry(x).or_insert(ZERO) += a * 0.5;
                    let y = x ^ flip;
                    let s = if (y & zmask).count_ones() % 2 == 1 { -phase } else { phase };
                    *next.entry(y).or_insert(ZERO) += a * s * 0.5;
                }
                next.retain(|_, a| a.norm_sqr() > 1e-24);
                v = next;
                if v.is_empty() {
                    break;
                }
            }
            if !v.is_empty() {
                let mut amps = vec![ZERO; 1 << n];
                for (x, a) in v {
                    amps[x] = a;
                }
                return Self::from_amplitudes(amps);
            }
        }
        Err(Error::NotStabilizerState("generators have no common +1 eigenvector".into()))
    }

    /// Complex conjugate in the computational basis.
    pub fn conjugate(&self) -> Self {
        Self { n: self.n, amps: self.amps.iter().map(Complex64::conj).collect() }
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        check_len(self.n, other.n)?;
        Ok(dot(&self.amps, &other.amps))
    }

    /// `|⟨self|other⟩|²`.
    pub fn fidelity(&self, other: &Self) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    /// Largest componentwise deviation.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// `P|ψ⟩` as raw (un-normalized, phase-preserving) amplitudes.
    pub fn apply_pauli_raw(&self, p: &PauliString) -> Result<Vec<Complex64>> {
        check_len(self.n, p.num_qubits())?;
        let phase = I_POWERS[p.phase().exponent() as usize];
        let mut out = apply_sigma_raw(self.n, p.bits(), &self.amps);
        out.iter_mut().for_each(|a| *a *= phase);
        Ok(out)
    }

    /// `⟨ψ|P|ψ⟩`.
    pub fn expectation(&self, p: &PauliString) -> Result<Complex64> {
        Ok(dot(&self.amps, &self.apply_pauli_raw(p)?))
    }

    pub fn apply_gate(&mut self, gate: Gate) -> Result<()> {
        gate.check(self.n)?;
        let n = self.n;
        let amps = &mut self.amps;
        match gate {
            Gate::H(q) => {
                let m = qubit_mask(n, q);
                let r = std::f64::consts::FRAC_1_SQRT_2;
                for i in (0..amps.len()).filter(|i| i & m == 0) {
                    let (a, b) = (amps[i], amps[i | m]);
                    amps[i] = (a + b) * r;
                    amps[i | m] = (a - b) * r;
                }
            }
            Gate::S(q) => {
                let m = qubit_mask(n, q);
                for (i, a) in amps.iter_mut().enumerate() {
                    if i & m != 0 {
                        *a *= Complex64::i();
                    }
                }
            }
            Gate::X(q) => {
                let m = qubit_mask(n, q);
                for i in (0..amps.len()).filter(|i| i & m == 0) {
                    amps.swap(i, i | m);
                }
            }
            Gate::Z(q) => {
                let m = qubit_mask(n, q);
                for (i, a) in amps.iter_mut().enumerate() {
                    if i & m != 0 {
                        *a = -*a;
                    }
                }
            }
            Gate::Cnot(c, t) => {
                let (mc, mt) = (qubit_mask(n, c), qubit_mask(n, t));
                for i in (0..amps.len()).filter(|i| i & mc != 0 && i & mt == 0) {
                    amps.swap(i, i | mt);
                }
            }
            Gate::Cz(a, b) => {
                let m = qubit_mask(n, a) | qubit_mask(n, b);
                for (i, amp) in amps.iter_mut().enumerate() {
                    if i & m == m {
                        *amp = -*amp;
                    }
                }
            }
        }
        self.normalize_phase();
        Ok(())
    }

    pub fn apply_circuit(&mut self, gates: &[Gate]) -> Result<()> {
        gates.iter().try_for_each(|&g| self.apply_gate(g))
    }

    /// `self ⊗ other`, with `self` on the leading qubits.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        check_capacity(self.n + other.n, MAX_STATE_QUBITS)?;
        let amps = self.amps.iter().flat_map(|a| other.amps.iter().map(move |b| a * b)).collect();
        Self::from_amplitudes(amps)
    }

    /// One `index real imaginary` line per amplitude.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (i, a) in self.amps.iter().enumerate() {
            let _ = writeln!(out, "{i} {:.12} {:.12}", a.re, a.im);
        }
        out
    }
}

/// Outcome probabilities of Bell sampling on `|ψ⟩⊗|ψ⟩`, indexed by
/// [`label_index`] of the `2n`-bit outcome.
#[derive(Clone, Debug, PartialEq)]
pub struct BellDistribution {
    n: usize,
    probs: Vec<f64>,
}

impl BellDistribution {
    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probs
    }

    pub fn probability(&self, r: &BitVector) -> f64 {
        self.probs[label_index(r)]
    }

    /// Outcomes with probability above `threshold`, in index order.
    pub fn support(&self, threshold: f64) -> Vec<BitVector> {
        self.probs.iter().enumerate().filter(|(_, &p)| p > threshold).map(|(i, _)| index_label(i, 2 * self.n)).collect()
    }

    pub fn total_variation(&self, other: &Self) -> f64 {
        0.5 * self.probs.iter().zip(&other.probs).map(|(a, b)| (a - b).abs()).sum::<f64>()
    }

    /// Total variation distance to an empirical histogram over outcome
    /// indices.
    pub fn total_variation_to_counts(&self, counts: &[u64]) -> f64 {
        let total: u64 = counts.iter().sum();
        0.5 * self.probs.iter().zip(counts).map(|(p, &c)| (p - c as f64 / total as f64).abs()).sum::<f64>()
    }

    /// Draws an outcome by inverting the cumulative distribution at `u ∈ [0, 1)`.
    pub fn sample_with(&self, u: f64) -> BitVector {
        let mut acc = 0.0;
        for (i, p) in self.probs.iter().enumerate() {
            acc += p;
            if u < acc {
                return index_label(i, 2 * self.n);
            }
        }
        let last = self.probs.iter().rposition(|&p| p > 0.0).unwrap_or(0);
        index_label(last, 2 * self.n)
    }
}

/// Bell-sampling distribution from the closed form
/// `p(r) = |⟨ψ|σ_r|ψ*⟩|² / 2^n`.
pub fn bell_distribution(psi: &StateVector) -> Result<BellDistribution> {
    let n = psi.n;
    check_capacity(n, MAX_BELL_QUBITS)?;
    let conj = psi.conjugate();
    let scale = (1u64 << n) as f64;
    let probs = (0..1usize << (2 * n))
        .map(|r| {
            let shifted = apply_sigma_raw(n, &index_label(r, 2 * n), &conj.amps);
            dot(&psi.amps, &shifted).norm_sqr() / scale
        })
        .collect();
    Ok(BellDistribution { n, probs })
}

/// Entries of the single-qubit matrices `Z^a X^b`, `σ_ab[row][col]`.
const SIGMA: [[[f64; 2]; 2]; 4] =
    [[[1.0, 0.0], [0.0, 1.0]], [[0.0, 1.0], [1.0, 0.0]], [[1.0, 0.0], [0.0, -1.0]], [[0.0, 1.0], [-1.0, 0.0]]];

/// Bell-sampling distribution by direct projection of `|ψ⟩|ψ⟩` onto the
/// product Bell basis `|σ_r⟩ = ⊗_q vec(σ_{r_q}) / √2`, pairing qubit `q` of
/// the first copy with qubit `q` of the second.
pub fn bell_distribution_by_projection(psi: &StateVector) -> Result<BellDistribution> {
    let n = psi.n;
    check_capacity(n, MAX_BELL_QUBITS)?;
    let dim = 1usize << n;
    let norm = (0.5f64).powi(n as i32);
    let mut probs = Vec::with_capacity(1 << (2 * n));
    for r in 0..1usize << (2 * n) {
        let label = index_label(r, 2 * n);
        let pairs: Vec<usize> =
            (0..n).map(|q| 2 * usize::from(label.get(2 * q)) + usize::from(label.get(2 * q + 1))).collect();
        let mut amp = ZERO;
        for x in 0..dim {
            for y in 0..dim {
                let mut coeff = 1.0;
                for (q, &ab) in pairs.iter().enumerate() {
                    let m = qubit_mask(n, q);
                    coeff *= SIGMA[ab][usize::from(x & m != 0)][usize::from(y & m != 0)];
                    if coeff == 0.0 {
                        break;
                    }
                }
                if coeff != 0.0 {
                    amp += psi.amps[x] * psi.amps[y] * coeff;
                }
            }
        }
        probs.push(amp.norm_sqr() * norm);
    }
    Ok(BellDistribution { n, probs })
}

/// Checks that the support of `dist` is exactly one coset `s ⊕ T` of the
/// RREF subspace `basis` with uniform weight `2^-n`; returns the least
/// element of the support (a coset representative).
pub fn coset_offset(dist: &BellDistribution, basis: &BitMatrix, tol: f64) -> Result<BitVector> {
    let n = dist.n;
    let weight = (0.5f64).powi(n as i32);
    let support = dist.support(weight / 2.0);
    let offset = support.first().cloned().ok_or_else(|| Error::NotStabilizerState("empty Bell support".into()))?;
    if support.len() != 1 << basis.nrows() {
        return Err(Error::NotStabilizerState(format!(
            "support has {} outcomes, expected {}",
            support.len(),
            1usize << basis.nrows()
        )));
    }
    for r in &support {
        if (dist.probability(r) - weight).abs() > tol {
            return Err(Error::NotStabilizerState(format!("outcome {r} has non-uniform weight")));
        }
        if span_coefficients(&(r ^ &offset), basis)?.is_none() {
            return Err(Error::NotStabilizerState(format!("outcome {r} outside the coset")));
        }
    }
    let off_support: f64 = dist.probs.iter().filter(|&&p| p <= weight / 2.0).sum();
    if off_support > tol {
        return Err(Error::NotStabilizerState(format!("mass {off_support} outside the coset")));
    }
    Ok(offset)
}

/// `2n`-bit label of `σ_10` on every qubit of `set`.
pub fn conjugation_label(n: usize, set: &[usize]) -> BitVector {
    let mut v = BitVector::zeros(2 * n);
    for &q in set {
        v.set(2 * q, true);
    }
    v
}

/// Exhaustive search for a qubit set `S` with `|ψ*⟩ ∝ σ_10^{⊗S}|ψ⟩`.
/// Subsets are tried in increasing bitmask order, so `∅` wins when `ψ` is
/// real.
pub fn find_conjugation_set(psi: &StateVector) -> Result<Vec<usize>> {
    let n = psi.n;
    check_capacity(n, MAX_SEARCH_QUBITS)?;
    let conj = psi.conjugate();
    for subset in 0..1usize << n {
        let zmask = (0..n).filter(|q| subset >> q & 1 == 1).fold(0, |m, q| m | qubit_mask(n, q));
        let overlap: Complex64 = psi
            .amps
            .iter()
            .zip(&conj.amps)
            .enumerate()
            .map(|(x, (a, c))| {
                let s = if (x & zmask).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
                c.conj() * a * s
            })
            .sum();
        if overlap.norm() >= 1.0 - EXACT_TOL {
            return Ok((0..n).filter(|q| subset >> q & 1 == 1).collect());
        }
    }
    Err(Error::NotStabilizerState("no conjugation set maps the state to its conjugate".into()))
}

/// `|ψ⟩ ∝ Σ_{x∈A} i^{ℓ(x)} (-1)^{q(x)} |x⟩` with `A` affine,
/// `ℓ(x) = Σ_{k∈S} x_k` and `q` quadratic over F₂.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadraticForm {
    n: usize,
    /// Least element of `A`; bit `q` is qubit `q`.
    pub offset: BitVector,
    /// RREF basis of the direction space `A - offset`.
    pub directions: BitMatrix,
    /// The set `S`, as an indicator vector.
    pub linear_bits: BitVector,
    /// Upper-triangular coefficients: row `i`, column `j ≥ i` holds the
    /// coefficient of `x_i x_j` (diagonal entries act linearly).
    pub quad_coeffs: BitMatrix,
}

impl QuadraticForm {
    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn support_size(&self) -> usize {
        1 << self.directions.nrows()
    }

    pub fn contains(&self, x: &BitVector) -> bool {
        span_coefficients(&(x ^ &self.offset), &self.directions).is_ok_and(|c| c.is_some())
    }

    /// Exponent of `i` in the amplitude of `x` (meaningful on `A`).
    pub fn phase_exponent(&self, x: &BitVector) -> u32 {
        let lin = x.iter_ones().filter(|&k| self.linear_bits.get(k)).count() as u32;
        let mut quad = 0;
        for i in x.iter_ones() {
            for j in self.quad_coeffs.row(i).iter_ones() {
                quad += u32::from(x.get(j));
            }
        }
        (lin + 2 * quad) % 4
    }

    /// Rebuilds the normalized amplitudes.
    pub fn to_state(&self) -> Result<StateVector> {
        let scale = 1.0 / (self.support_size() as f64).sqrt();
        let amps = (0..1usize << self.n)
            .map(|i| {
                let x = index_label(i, self.n);
                if self.contains(&x) {
                    I_POWERS[self.phase_exponent(&x) as usize] * scale
                } else {
                    ZERO
                }
            })
            .collect();
        StateVector::from_amplitudes(amps)
    }
}

/// Recovers the affine support, linear set and quadratic part of a
/// stabilizer state, fixing the global phase at the least support element.
pub fn quadratic_form_extract(psi: &StateVector) -> Result<QuadraticForm> {
    let n = psi.n;
    check_capacity(n, MAX_SEARCH_QUBITS)?;
    let not_stab = |msg: String| Error::NotStabilizerState(msg);

    let max = psi.amps.iter().map(Complex64::norm_sqr).fold(0.0, f64::max);
    let support: Vec<usize> = (0..psi.amps.len()).filter(|&i| psi.amps[i].norm_sqr() > 0.5 * max).collect();
    let first = index_label(support[0], n);
    let diffs = support.iter().map(|&i| &index_label(i, n) ^ &first).collect();
    let directions = rref_basis(&BitMatrix::from_rows(n, diffs)?);
    if support.len() != 1 << directions.nrows() {
        return Err(not_stab(format!("support of size {} is not an affine subspace", support.len())));
    }

    let mut offset = first;
    for row in directions.rows() {
        let lead = row.first_one().expect("RREF rows are nonzero");
        if offset.get(lead) {
            offset.xor_assign(row);
        }
    }
    let base = psi.amps[label_index(&offset)];
    let exponent_at = |x: &BitVector| -> Result<u32> {
        let ratio = psi.amps[label_index(x)] / base;
        (0..4)
            .find(|&k| (ratio - I_POWERS[k]).norm() < 1e-8)
            .map(|k| k as u32)
            .ok_or_else(|| not_stab(format!("amplitude ratio {ratio} at {x} is not a power of i")))
    };

    let dim = directions.nrows();
    let pivots: Vec<usize> = directions.rows().iter().map(|r| r.first_one().unwrap()).collect();
    let mut lin = vec![0u32; dim];
    let mut diag = vec![0u32; dim];
    for j in 0..dim {
        let k = exponent_at(&(&offset ^ directions.row(j)))?;
        lin[j] = k % 2;
        diag[j] = (k / 2) % 2;
    }
    let mut linear_bits = BitVector::zeros(n);
    let mut quad_coeffs = BitMatrix::zeros(n, n).into_rows();
    for j in 0..dim {
        linear_bits.set(pivots[j], lin[j] == 1);
        quad_coeffs[pivots[j]].set(pivots[j], diag[j] == 1);
    }
    for i in 0..dim {
        for j in i + 1..dim {
            let x = &(&offset ^ directions.row(i)) ^ directions.row(j);
            let k = exponent_at(&x)?;
            let d = (k + 8 - lin[i] - lin[j]) % 4;
            if d % 2 == 1 {
                return Err(not_stab(format!("phase at {x} is inconsistent with a quadratic form")));
            }
            let coeff = (d / 2 + diag[i] + diag[j]) % 2;
            quad_coeffs[pivots[i]].set(pivots[j], coeff == 1);
        }
    }
    let form = QuadraticForm { n, offset, directions, linear_bits, quad_coeffs: BitMatrix::from_rows(n, quad_coeffs)? };
    let fidelity = form.to_state()?.fidelity(psi)?;
    if fidelity < 1.0 - EXACT_TOL {
        return Err(not_stab(format!("reconstruction fidelity {fidelity}")));
    }
    Ok(form)
}

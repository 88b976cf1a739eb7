//! Learning a stabilizer state from Bell samples.
//!
//! The learner sees the unknown state only through [`StateAccess`]: Bell
//! sampling on two fresh copies, and a single-copy measurement of a Hermitian
//! Pauli. Three backends implement it:
//!
//! - [`TableauAccess`] simulates every copy on a stabilizer tableau.
//! - [`CosetAccess`] draws Bell outcomes directly as uniform points of the
//!   outcome coset, located once with a tableau Bell sample. This is the fast
//!   default for large `n`.
//! - [`DenseAccess`] samples from the brute-force statevector distribution
//!   (small `n` only).

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::Serialize;

use crate::dense::{bell_distribution, BellDistribution, StateVector, MAX_BELL_QUBITS};
use crate::error::{check_len, Error, Result};
use crate::f2linalg::{rref_basis, BitMatrix, BitVector};
use crate::pauli::{hermitian_from_bits, PauliString, Sign};
use crate::tableau::{Gate, StabilizerTableau};

/// Black-box access to copies of an unknown `n`-qubit state.
pub trait StateAccess {
    fn num_qubits(&self) -> usize;

    /// Copies consumed so far.
    fn copies_used(&self) -> usize;

    /// Bell-samples two fresh copies, returning a `2n`-bit outcome.
    fn bell_sample(&mut self) -> Result<BitVector>;

    /// Measures the Hermitian Pauli `m` on one fresh copy.
    fn measure_sign(&mut self, m: &PauliString) -> Result<Sign>;
}

impl<A: StateAccess + ?Sized> StateAccess for Box<A> {
    fn num_qubits(&self) -> usize {
        (**self).num_qubits()
    }

    fn copies_used(&self) -> usize {
        (**self).copies_used()
    }

    fn bell_sample(&mut self) -> Result<BitVector> {
        (**self).bell_sample()
    }

    fn measure_sign(&mut self, m: &PauliString) -> Result<Sign> {
        (**self).measure_sign(m)
    }
}

/// Copy accounting with an optional budget.
#[derive(Clone, Copy, Debug, Default)]
struct CopyCounter {
    used: usize,
    budget: Option<usize>,
}

impl CopyCounter {
    fn take(&mut self, copies: usize) -> Result<()> {
        if let Some(budget) = self.budget {
            if self.used + copies > budget {
                return Err(Error::AccessExhausted { budget });
            }
        }
        self.used += copies;
        Ok(())
    }
}

/// One Bell sample of `|ψ⟩⊗|ψ⟩` simulated on a `2n`-qubit tableau.
///
/// Copy A occupies qubits `0..n` and copy B qubits `n..2n`. Each pair
/// `(A_i, B_i)` goes through `CNOT(A_i → B_i)` then `H(A_i)`, which maps
/// `|σ_ab⟩` to `|a⟩|b⟩`; the computational-basis result is reported as pair
/// `i = (bit of A_i, bit of B_i)`.
pub fn tableau_bell_sample<R: Rng + ?Sized>(t: &StabilizerTableau, rng: &mut R) -> BitVector {
    let n = t.num_qubits();
    let mut joint = t.tensor(t);
    for i in 0..n {
        joint.apply_gate(Gate::Cnot(i, n + i)).expect("qubits in range");
        joint.apply_gate(Gate::H(i)).expect("qubits in range");
    }
    let bits = joint.sample_z_basis(rng);
    let mut r = BitVector::zeros(2 * n);
    for i in 0..n {
        r.set(2 * i, bits.get(i));
        r.set(2 * i + 1, bits.get(n + i));
    }
    r
}

/// Samples uniformly from the coset `offset ⊕ T` of a state's label subspace.
#[derive(Clone, Debug)]
pub struct CosetSampler {
    basis: BitMatrix,
    offset: BitVector,
}

impl CosetSampler {
    /// `offset` must be an outcome Bell sampling can produce on `t`.
    pub fn new(t: &StabilizerTableau, offset: BitVector) -> Result<Self> {
        check_len(2 * t.num_qubits(), offset.len())?;
        Ok(Self { basis: t.group_subspace(), offset })
    }

    /// Locates the coset with one tableau Bell sample.
    pub fn from_state<R: Rng + ?Sized>(t: &StabilizerTableau, rng: &mut R) -> Self {
        let offset = tableau_bell_sample(t, rng);
        Self { basis: t.group_subspace(), offset }
    }

    pub fn offset(&self) -> &BitVector {
        &self.offset
    }

    pub fn basis(&self) -> &BitMatrix {
        &self.basis
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> BitVector {
        let mut r = self.offset.clone();
        for row in self.basis.rows() {
            if rng.gen::<bool>() {
                r.xor_assign(row);
            }
        }
        r
    }
}

/// `offset` XOR a uniformly random element of `group_subspace(t)`.
pub fn coset_bell_sample<R: Rng + ?Sized>(t: &StabilizerTableau, offset: &BitVector, rng: &mut R) -> Result<BitVector> {
    Ok(CosetSampler::new(t, offset.clone())?.sample(rng))
}

/// Every copy simulated on the tableau.
pub struct TableauAccess<R> {
    state: StabilizerTableau,
    rng: R,
    copies: CopyCounter,
}

impl<R: Rng> TableauAccess<R> {
    pub fn new(state: StabilizerTableau, rng: R) -> Self {
        Self { state, rng, copies: CopyCounter::default() }
    }

    pub fn with_budget(mut self, copies: usize) -> Self {
        self.copies.budget = Some(copies);
        self
    }
}

impl<R: Rng> StateAccess for TableauAccess<R> {
    fn num_qubits(&self) -> usize {
        self.state.num_qubits()
    }

    fn copies_used(&self) -> usize {
        self.copies.used
    }

    fn bell_sample(&mut self) -> Result<BitVector> {
        self.copies.take(2)?;
        Ok(tableau_bell_sample(&self.state, &mut self.rng))
    }

    fn measure_sign(&mut self, m: &PauliString) -> Result<Sign> {
        self.copies.take(1)?;
        let mut copy = self.state.clone();
        copy.measure_pauli(m, &mut self.rng)
    }
}

/// Bell outcomes drawn straight from the outcome coset; the default backend.
pub struct CosetAccess<R> {
    state: StabilizerTableau,
    canonical: StabilizerTableau,
    sampler: CosetSampler,
    rng: R,
    copies: CopyCounter,
}

impl<R: Rng> CosetAccess<R> {
    pub fn new(state: StabilizerTableau, mut rng: R) -> Self {
        let sampler = CosetSampler::from_state(&state, &mut rng);
        let canonical = state.canonical_form();
        Self { state, canonical, sampler, rng, copies: CopyCounter::default() }
    }

    pub fn with_budget(mut self, copies: usize) -> Self {
        self.copies.budget = Some(copies);
        self
    }

    pub fn sampler(&self) -> &CosetSampler {
        &self.sampler
    }
}

impl<R: Rng> StateAccess for CosetAccess<R> {
    fn num_qubits(&self) -> usize {
        self.state.num_qubits()
    }

    fn copies_used(&self) -> usize {
        self.copies.used
    }

    fn bell_sample(&mut self) -> Result<BitVector> {
        self.copies.take(2)?;
        Ok(self.sampler.sample(&mut self.rng))
    }

    fn measure_sign(&mut self, m: &PauliString) -> Result<Sign> {
        if m.num_qubits() != self.state.num_qubits() || !m.is_hermitian() {
            // let the tableau report the contract violation
            return self.state.clone().measure_pauli(m, &mut self.rng);
        }
        self.copies.take(1)?;
        match self.canonical.sign_in_rref(m) {
            Some(sign) => Ok(sign),
            None => self.state.clone().measure_pauli(m, &mut self.rng),
        }
    }
}

/// Physics from the dense statevector: exact Bell distribution and Born-rule
/// Pauli measurements.
pub struct DenseAccess<R> {
    psi: StateVector,
    dist: BellDistribution,
    rng: R,
    copies: CopyCounter,
}

impl<R: Rng> DenseAccess<R> {
    pub fn new(psi: StateVector, rng: R) -> Result<Self> {
        let dist = bell_distribution(&psi)?;
        Ok(Self { psi, dist, rng, copies: CopyCounter::default() })
    }

    pub fn from_tableau(t: &StabilizerTableau, rng: R) -> Result<Self> {
        if t.num_qubits() > MAX_BELL_QUBITS {
            return Err(Error::Capacity { n: t.num_qubits(), max: MAX_BELL_QUBITS });
        }
        Self::new(StateVector::from_tableau(t)?, rng)
    }

    pub fn with_budget(mut self, copies: usize) -> Self {
        self.copies.budget = Some(copies);
        self
    }
}

impl<R: Rng> StateAccess for DenseAccess<R> {
    fn num_qubits(&self) -> usize {
        self.psi.num_qubits()
    }

    fn copies_used(&self) -> usize {
        self.copies.used
    }

    fn bell_sample(&mut self) -> Result<BitVector> {
        self.copies.take(2)?;
        Ok(self.dist.sample_with(self.rng.gen::<f64>()))
    }

    fn measure_sign(&mut self, m: &PauliString) -> Result<Sign> {
        if !m.is_hermitian() {
            return Err(Error::Contract(format!("measured operator {m} is not Hermitian")));
        }
        let expectation = self.psi.expectation(m)?.re;
        self.copies.take(1)?;
        let p_plus = (1.0 + expectation) / 2.0;
        Ok(Sign::from_bit(self.rng.gen::<f64>() >= p_plus))
    }
}

/// Simulation backend selector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Backend {
    Tableau,
    Dense,
    Coset,
}

impl Backend {
    pub const ALL: [Backend; 3] = [Backend::Tableau, Backend::Dense, Backend::Coset];

    /// Largest qubit count the backend accepts.
    pub fn max_qubits(self) -> usize {
        match self {
            Backend::Dense => MAX_BELL_QUBITS,
            Backend::Tableau | Backend::Coset => usize::MAX,
        }
    }

    /// Wraps `state` in this backend, taking ownership of `rng`.
    pub fn access<R: Rng + Send + 'static>(
        self,
        state: &StabilizerTableau,
        rng: R,
    ) -> Result<Box<dyn StateAccess + Send>> {
        Ok(match self {
            Backend::Tableau => Box::new(TableauAccess::new(state.clone(), rng)),
            Backend::Coset => Box::new(CosetAccess::new(state.clone(), rng)),
            Backend::Dense => Box::new(DenseAccess::from_tableau(state, rng)?),
        })
    }
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Backend::Tableau => "tableau",
            Backend::Dense => "dense",
            Backend::Coset => "coset",
        })
    }
}

impl FromStr for Backend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tableau" => Ok(Backend::Tableau),
            "dense" => Ok(Backend::Dense),
            "coset" => Ok(Backend::Coset),
            other => Err(Error::Domain(format!("unknown backend {other:?}"))),
        }
    }
}

/// Outcome of one run of [`learn`].
#[derive(Clone, Debug)]
pub struct LearnReport {
    pub n: usize,
    pub success: bool,
    /// The learned state; present iff `success`.
    pub tableau: Option<StabilizerTableau>,
    pub copies_used: usize,
    /// `r₀` followed by the `2n` further raw outcomes.
    pub samples: Vec<BitVector>,
    pub basis_rank: usize,
}

impl LearnReport {
    pub fn to_record(&self, duration_seconds: f64) -> LearnRecord {
        LearnRecord {
            n: self.n,
            success: self.success,
            copies_used: self.copies_used,
            basis_rank: self.basis_rank,
            tableau: self.tableau.as_ref().map(ToString::to_string),
            duration_seconds,
        }
    }
}

/// Serializable summary of a [`LearnReport`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LearnRecord {
    pub n: usize,
    pub success: bool,
    pub copies_used: usize,
    pub basis_rank: usize,
    pub tableau: Option<String>,
    pub duration_seconds: f64,
}

/// Learns the state behind `access`.
///
/// One reference Bell sample `r₀`, then `2n` more whose XORs with `r₀` are
/// reduced to an RREF basis. If the basis has `n` rows, each row `t` is
/// measured as the Hermitian observable with label `t` and the observed sign
/// is folded into the generator. Uses `5n + 2` copies on success and `4n + 2`
/// when the samples fail to span.
pub fn learn<A: StateAccess + ?Sized>(access: &mut A) -> Result<LearnReport> {
    let n = access.num_qubits();
    if n == 0 {
        return Err(Error::Domain("cannot learn a 0-qubit state".into()));
    }
    if access.copies_used() != 0 {
        return Err(Error::Contract(format!(
            "learning needs fresh access, {} copies already used",
            access.copies_used()
        )));
    }

    let r0 = access.bell_sample()?;
    check_len(2 * n, r0.len())?;
    let mut samples = Vec::with_capacity(2 * n + 1);
    let mut diffs = BitMatrix::empty(2 * n);
    for _ in 0..2 * n {
        let r = access.bell_sample()?;
        diffs.push_row(&r ^ &r0)?;
        samples.push(r);
    }
    samples.insert(0, r0);

    let basis = rref_basis(&diffs);
    let basis_rank = basis.nrows();
    if basis_rank > n {
        return Err(Error::Contract(format!(
            "Bell samples span {basis_rank} dimensions, more than n = {n}: not a stabilizer state"
        )));
    }
    if basis_rank < n {
        return Ok(LearnReport {
            n,
            success: false,
            tableau: None,
            copies_used: access.copies_used(),
            samples,
            basis_rank,
        });
    }

    let mut gens = Vec::with_capacity(n);
    for t in basis.rows() {
        let m = hermitian_from_bits(t, Sign::Plus)?;
        let sign = access.measure_sign(&m)?;
        gens.push(m.times(sign.as_phase()));
    }
    let tableau = StabilizerTableau::from_generators(gens)?;
    Ok(LearnReport { n, success: true, tableau: Some(tableau), copies_used: access.copies_used(), samples, basis_rank })
}

/// Runs [`learn`] on fresh accesses until it succeeds, at most `max_attempts`
/// times. Not part of the single-shot procedure: copies accumulate across
/// attempts and the returned report counts all of them.
pub fn learn_with_retries<F>(mut fresh: F, max_attempts: usize) -> Result<LearnReport>
where
    F: FnMut() -> Result<Box<dyn StateAccess + Send>>,
{
    let mut spent = 0;
    let mut last = None;
    for _ in 0..max_attempts.max(1) {
        let mut access = fresh()?;
        let mut report = learn(&mut access)?;
        spent += report.copies_used;
        report.copies_used = spent;
        if report.success {
            return Ok(report);
        }
        last = Some(report);
    }
    Ok(last.expect("at least one attempt"))
}

/// Probability that `k` independent uniform vectors span F₂ⁿ:
/// `Π_{i=0}^{n-1} (1 - 2^{i-k})`.
pub fn spanning_success_probability(n: usize, k: usize) -> f64 {
    (0..n).map(|i| 1.0 - 2f64.powi(i as i32 - k as i32)).product()
}

/// `1 - spanning_success_probability(n, k)`, computed without cancellation.
pub fn spanning_failure_probability(n: usize, k: usize) -> f64 {
    if n > k {
        return 1.0;
    }
    let log_success: f64 = (0..n).map(|i| (-(2f64.powi(i as i32 - k as i32))).ln_1p()).sum();
    -log_success.exp_m1()
}

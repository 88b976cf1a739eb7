//! Stabilizer states as lists of commuting Hermitian Pauli generators.
//!
//! A [`StabilizerTableau`] on `n` qubits holds `n` independent, pairwise
//! commuting, Hermitian generators; their signs are folded into the phase of
//! each [`PauliString`]. Only stabilizers are stored (no destabilizers), so
//! deterministic measurement outcomes are found by reducing the generators to
//! their canonical reduced-row-echelon form and multiplying out the spanning
//! combination.
//!
//! On-disk text format:
//!
//! ```text
//! n=2
//! +XX
//! +ZZ
//! ```

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::{Error, Result};
use crate::f2linalg::{reduce_rows, reduce_rows_over, rref_basis, BitMatrix, BitVector, EchelonBasis};
use crate::pauli::{hermitian_from_bits, PauliString, Phase, Sign};

/// Clifford gates understood by the tableau and the dense oracle.
/// Qubits are 0-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Gate {
    H(usize),
    S(usize),
    X(usize),
    Z(usize),
    /// Control, target.
    Cnot(usize, usize),
    Cz(usize, usize),
}

impl Gate {
    pub fn qubits(&self) -> (usize, Option<usize>) {
        match *self {
            Gate::H(a) | Gate::S(a) | Gate::X(a) | Gate::Z(a) => (a, None),
            Gate::Cnot(a, b) | Gate::Cz(a, b) => (a, Some(b)),
        }
    }

    pub(crate) fn check(&self, n: usize) -> Result<()> {
        let (a, b) = self.qubits();
        for q in std::iter::once(a).chain(b) {
            if q >= n {
                return Err(Error::Domain(format!("{self:?}: qubit {q} out of range for {n} qubits")));
            }
        }
        if b == Some(a) {
            return Err(Error::Domain(format!("{self:?}: control and target coincide")));
        }
        Ok(())
    }

    /// A uniformly chosen gate from the generating set, on valid qubits.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Gate {
        let kinds = if n >= 2 { 6 } else { 4 };
        let a = rng.gen_range(0..n);
        let kind = rng.gen_range(0..kinds);
        let b = if n >= 2 {
            let b = rng.gen_range(0..n - 1);
            b + usize::from(b >= a)
        } else {
            0
        };
        match kind {
            0 => Gate::H(a),
            1 => Gate::S(a),
            2 => Gate::X(a),
            3 => Gate::Z(a),
            4 => Gate::Cnot(a, b),
            _ => Gate::Cz(a, b),
        }
    }
}

/// Conjugates `p` by `gate` in place: `p ← U p U†`.
///
/// The update rules act on the Hermitian form (sign plus X/Y/Z letters);
/// the stored `i`-exponent is adjusted for the change in `11` pairs.
fn conjugate(p: &mut PauliString, gate: Gate) {
    let (a, b) = gate.qubits();
    let touched_y = |p: &PauliString| {
        let mut k = u32::from(p.z_bit(a) && p.x_bit(a));
        if let Some(b) = b {
            k += u32::from(p.z_bit(b) && p.x_bit(b));
        }
        k
    };
    let y_before = touched_y(p);
    let flip = {
        let bits = p.bits_mut();
        let (za, xa) = (bits.get(2 * a), bits.get(2 * a + 1));
        match gate {
            Gate::H(_) => {
                bits.set(2 * a, xa);
                bits.set(2 * a + 1, za);
                xa && za
            }
            Gate::S(_) => {
                bits.set(2 * a, za ^ xa);
                xa && za
            }
            Gate::X(_) => za,
            Gate::Z(_) => xa,
            Gate::Cnot(_, t) => {
                let (zb, xb) = (bits.get(2 * t), bits.get(2 * t + 1));
                bits.set(2 * t + 1, xb ^ xa);
                bits.set(2 * a, za ^ zb);
                xa && zb && !(xb ^ za)
            }
            Gate::Cz(_, t) => {
                let (zb, xb) = (bits.get(2 * t), bits.get(2 * t + 1));
                bits.set(2 * a, za ^ xb);
                bits.set(2 * t, zb ^ xa);
                xa && xb && (za ^ zb)
            }
        }
    };
    let y_after = touched_y(p);
    let e = p.phase().exponent() as u32 + 2 * u32::from(flip) + y_before + 3 * y_after;
    p.set_phase(Phase::from_exponent(e));
}

/// A pure stabilizer state on `n ≥ 1` qubits.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct StabilizerTableau {
    n: usize,
    gens: Vec<PauliString>,
}

impl StabilizerTableau {
    /// `|0…0⟩`, stabilized by `Z` on every qubit.
    pub fn zero_state(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("a stabilizer state needs at least one qubit".into()));
        }
        let gens = (0..n).map(|q| PauliString::single(n, q, 'Z')).collect::<Result<Vec<_>>>()?;
        Ok(Self { n, gens })
    }

    /// Builds a tableau from explicit generators, checking every invariant.
    pub fn from_generators(gens: Vec<PauliString>) -> Result<Self> {
        let n = gens.len();
        validate(n, &gens).map_err(|(_, msg)| Error::Contract(msg))?;
        Ok(Self { n, gens })
    }

    #[inline]
    pub fn num_qubits(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn generators(&self) -> &[PauliString] {
        &self.gens
    }

    /// Re-checks rank, commutation, hermiticity and non-identity.
    pub fn check_invariants(&self) -> Result<()> {
        validate(self.n, &self.gens).map_err(|(_, msg)| Error::Contract(msg))
    }

    pub fn apply_gate(&mut self, gate: Gate) -> Result<()> {
        gate.check(self.n)?;
        for g in &mut self.gens {
            conjugate(g, gate);
        }
        Ok(())
    }

    pub fn apply_circuit(&mut self, gates: &[Gate]) -> Result<()> {
        gates.iter().try_for_each(|&g| self.apply_gate(g))
    }

    /// Consuming variant of [`Self::apply_gate`].
    pub fn with_gate(mut self, gate: Gate) -> Result<Self> {
        self.apply_gate(gate)?;
        Ok(self)
    }

    fn check_observable(&self, m: &PauliString) -> Result<()> {
        if m.num_qubits() != self.n {
            return Err(Error::Dimension { expected: self.n, found: m.num_qubits() });
        }
        if !m.is_hermitian() {
            return Err(Error::Contract(format!("measured operator {m} is not Hermitian")));
        }
        Ok(())
    }

    /// Outcome of measuring `m` if it is deterministic, i.e. if `±m` is in the
    /// stabilizer group; `None` otherwise.
    pub fn deterministic_outcome(&self, m: &PauliString) -> Result<Option<Sign>> {
        self.check_observable(m)?;
        if self.gens.iter().any(|g| !g.commutes_with(m)) {
            return Ok(None);
        }
        Ok(self.canonical_form().sign_in_rref(m))
    }

    /// Sign of `m` relative to the group, assuming `self` is canonical.
    pub(crate) fn sign_in_rref(&self, m: &PauliString) -> Option<Sign> {
        let mut rest = m.bits().clone();
        let mut product = PauliString::identity(self.n);
        for g in &self.gens {
            let lead = g.bits().first_one().expect("generators are non-identity");
            if rest.get(lead) {
                rest.xor_assign(g.bits());
                product.mul_assign_right(g);
            }
        }
        if !rest.is_zero() {
            return None;
        }
        Some(Sign::from_bit(product.phase() != m.phase()))
    }

    /// Measures the Hermitian Pauli `m`, collapsing the state.
    ///
    /// A deterministic outcome leaves the state unchanged. Otherwise the
    /// outcome is a fair coin from `rng`, the lowest-index anticommuting
    /// generator is replaced by `outcome · m`, and every other anticommuting
    /// generator is multiplied by the replaced one.
    pub fn measure_pauli<R: Rng + ?Sized>(&mut self, m: &PauliString, rng: &mut R) -> Result<Sign> {
        self.check_observable(m)?;
        let Some(pivot) = self.gens.iter().position(|g| !g.commutes_with(m)) else {
            let sign = self
                .canonical_form()
                .sign_in_rref(m)
                .expect("an operator commuting with a maximal stabilizer group lies in it up to sign");
            return Ok(sign);
        };
        let old = self.gens[pivot].clone();
        for g in self.gens.iter_mut().skip(pivot + 1) {
            if !g.commutes_with(m) {
                g.mul_assign_right(&old);
            }
        }
        let outcome = Sign::from_bit(rng.gen::<bool>());
        self.gens[pivot] = m.clone().times(outcome.as_phase());
        Ok(outcome)
    }

    /// Functional form of [`Self::measure_pauli`]: the outcome and successor
    /// state.
    pub fn measure<R: Rng + ?Sized>(&self, m: &PauliString, rng: &mut R) -> Result<(Sign, Self)> {
        let mut next = self.clone();
        let outcome = next.measure_pauli(m, rng)?;
        Ok((outcome, next))
    }

    /// Measures every qubit in the computational basis without collapsing
    /// `self`. Bit `q` is set when qubit `q` reads `1`.
    ///
    /// Equivalent to `n` sequential `Z` measurements: eliminating the X part
    /// of the generators leaves the Z-only subgroup, whose signs fix the
    /// parity constraints cutting out the (uniformly weighted) affine support.
    pub fn sample_z_basis<R: Rng + ?Sized>(&self, rng: &mut R) -> BitVector {
        let n = self.n;
        let mut rows = self.gens.clone();
        let r = reduce_rows_over(&mut rows, (0..n).map(|q| 2 * q + 1)).len();

        let mut constraints: Vec<BitVector> = rows[r..]
            .iter()
            .map(|g| {
                let mut c = BitVector::zeros(n + 1);
                for q in 0..n {
                    c.set(q, g.z_bit(q));
                }
                let sign = g.hermitian_sign().expect("generators are Hermitian");
                c.set(n, sign.is_minus());
                c
            })
            .collect();
        let pivots = reduce_rows(&mut constraints, n);

        let mut out = BitVector::zeros(n);
        let mut is_pivot = vec![false; n];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        for q in (0..n).filter(|&q| !is_pivot[q]) {
            out.set(q, rng.gen::<bool>());
        }
        for (c, &p) in constraints.iter().zip(&pivots) {
            let mut value = c.get(n);
            for q in c.iter_ones().filter(|&q| q < n && q != p) {
                value ^= out.get(q);
            }
            out.set(p, value);
        }
        out
    }

    /// A uniformly random stabilizer state.
    ///
    /// Generator `k` is drawn uniformly from the vectors that commute with
    /// generators `0..k` but lie outside their span; signs are independent
    /// fair coins. A basis `gens ∪ rest` of the current commutant is
    /// maintained so each step costs `O(n²)` word operations.
    pub fn random_state<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("a stabilizer state needs at least one qubit".into()));
        }
        let dim = 2 * n;
        let mut chosen: Vec<BitVector> = Vec::with_capacity(n);
        let mut rest: Vec<BitVector> = (0..dim).map(|i| BitVector::unit(dim, i)).collect();
        for _ in 0..n {
            let beta = loop {
                let beta = BitVector::random(rest.len(), rng);
                if !beta.is_zero() {
                    break beta;
                }
            };
            let mut v = BitVector::zeros(dim);
            for g in &chosen {
                if rng.gen::<bool>() {
                    v.xor_assign(g);
                }
            }
            for k in beta.iter_ones() {
                v.xor_assign(&rest[k]);
            }

            let anti = |u: &BitVector| crate::pauli::symplectic_product(u, &v).expect("equal lengths");
            let a = rest.iter().position(&anti).expect("v lies outside the radical of the commutant");
            let pair = rest[a].clone();
            for h in rest.iter_mut() {
                if anti(h) {
                    h.xor_assign(&pair);
                }
            }
            // rest[a] is now zero; v still has a nonzero coefficient on some
            // other rest vector, which v replaces.
            let c = beta.iter_ones().find(|&k| k != a).expect("v is independent of the chosen generators");
            let (hi, lo) = if a > c { (a, c) } else { (c, a) };
            rest.swap_remove(hi);
            rest.swap_remove(lo);
            chosen.push(v);
        }
        let gens = chosen
            .iter()
            .map(|bits| hermitian_from_bits(bits, Sign::from_bit(rng.gen::<bool>())))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { n, gens })
    }

    /// The unique RREF generating set, with signs carried along exactly.
    /// Two tableaux describe the same state iff their canonical forms are
    /// equal.
    pub fn canonical_form(&self) -> Self {
        let mut gens = self.gens.clone();
        reduce_rows(&mut gens, 2 * self.n);
        Self { n: self.n, gens }
    }

    pub fn same_state(&self, other: &Self) -> bool {
        self.n == other.n && self.canonical_form() == other.canonical_form()
    }

    /// RREF basis of the labels of the stabilizer group (phases forgotten).
    pub fn group_subspace(&self) -> BitMatrix {
        let m = BitMatrix::from_rows(2 * self.n, self.gens.iter().map(|g| g.bits().clone()).collect())
            .expect("generators have 2n bits");
        rref_basis(&m)
    }

    /// The product state `self ⊗ other`, with `self` on the first qubits.
    pub fn tensor(&self, other: &Self) -> Self {
        let n = self.n + other.n;
        let pad_left = BitVector::zeros(2 * self.n);
        let pad_right = BitVector::zeros(2 * other.n);
        let gens = self
            .gens
            .iter()
            .map(|g| (g.bits().concat(&pad_right), g.phase()))
            .chain(other.gens.iter().map(|g| (pad_left.concat(g.bits()), g.phase())))
            .map(|(bits, phase)| PauliString::new(bits, phase).expect("even length"))
            .collect();
        Self { n, gens }
    }
}

/// Checks the tableau invariants, reporting the index of the first offending
/// generator.
fn validate(n: usize, gens: &[PauliString]) -> std::result::Result<(), (usize, String)> {
    if n == 0 {
        return Err((0, "a stabilizer state needs at least one qubit".into()));
    }
    if gens.len() != n {
        return Err((gens.len().min(n), format!("expected {n} generators, found {}", gens.len())));
    }
    let mut span = EchelonBasis::new();
    for (k, g) in gens.iter().enumerate() {
        if g.num_qubits() != n {
            return Err((k, format!("generator {g} acts on {} qubits, expected {n}", g.num_qubits())));
        }
        if !g.is_hermitian() {
            return Err((k, format!("generator {g} is not Hermitian")));
        }
        if g.is_identity_label() {
            return Err((k, format!("generator {g} is the identity")));
        }
        if let Some(j) = gens[..k].iter().position(|h| !h.commutes_with(g)) {
            return Err((k, format!("generator {g} anticommutes with {}", gens[j])));
        }
        if !span.insert(g.bits()) {
            return Err((k, format!("generator {g} is dependent on the previous ones")));
        }
    }
    Ok(())
}

impl fmt::Display for StabilizerTableau {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "n={}", self.n)?;
        for g in &self.gens {
            writeln!(f, "{g}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for StabilizerTableau {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let gens: Vec<String> = self.gens.iter().map(|g| g.to_string()).collect();
        write!(f, "StabilizerTableau{{{}}}", gens.join(", "))
    }
}

impl FromStr for StabilizerTableau {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let err = |line: usize, message: String| Error::Parse { line, message };
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));

        let (_, header) = lines.next().ok_or_else(|| err(1, "empty input".into()))?;
        let n: usize = header
            .strip_prefix("n=")
            .and_then(|v| v.trim().parse().ok())
            .ok_or_else(|| err(1, format!("expected header `n=<count>`, found {header:?}")))?;
        if n == 0 {
            return Err(err(1, "qubit count must be at least 1".into()));
        }

        let mut gens = Vec::with_capacity(n);
        let mut last_line = 1;
        for (line, body) in lines.by_ref() {
            if gens.len() == n {
                if body.is_empty() {
                    continue;
                }
                return Err(err(line, format!("unexpected content after {n} generators")));
            }
            last_line = line;
            if !body.starts_with(['+', '-']) {
                return Err(err(line, format!("generator must start with '+' or '-', found {body:?}")));
            }
            let g: PauliString = body.parse().map_err(|e| match e {
                Error::Parse { message, .. } => err(line, message),
                other => other,
            })?;
            if g.num_qubits() != n {
                return Err(err(line, format!("expected {n} Pauli letters, found {}", g.num_qubits())));
            }
            gens.push(g);
        }
        if gens.len() != n {
            return Err(err(last_line + 1, format!("expected {n} generators, found {}", gens.len())));
        }
        validate(n, &gens).map_err(|(k, msg)| err(k + 2, msg))?;
        Ok(Self { n, gens })
    }
}

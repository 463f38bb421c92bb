//! Quantum and classical Bernstein-Vazirani drivers for d-level qudits.
//!
//! The quantum circuit on `n` input qudits plus one ancilla:
//!
//! 1. start in `|0…0⟩ ⊗ |d−1⟩`;
//! 2. forward Fourier on all `n + 1` qudits (the ancilla becomes `|φ⟩`);
//! 3. one oracle application, whose phase kicks back as `ω^{s·x}`;
//! 4. inverse Fourier on the `n` input qudits;
//! 5. read out the input register, which is exactly `|s⟩`.

use std::ops::Range;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gates::{apply_to_each, fourier_matrix, FourierDirection};
use crate::oracle::LinearOracle;
use crate::state::{
    basis_state, decode_index, tensor, AmplitudeBudget, DigitString, Dimension, Statevector,
};

/// Minimum probability the quantum readout must put on its outcome.
pub const READOUT_GUARD: f64 = 1.0 - 1e-9;

const PROBABILITY_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Quantum,
    Classical,
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::Quantum => "quantum",
            Mode::Classical => "classical",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub mode: Mode,
    pub d: usize,
    pub n: usize,
    pub recovered: DigitString,
    pub oracle_queries: u64,
    pub peak_probability: f64,
    pub elapsed: Duration,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementOutcome {
    pub digits: DigitString,
    pub probability: f64,
}

/// Snapshots of the register taken between the circuit's stages.
#[derive(Debug, Clone)]
pub struct BvStates {
    pub initial: Statevector,
    pub after_fourier: Statevector,
    pub after_oracle: Statevector,
    pub final_state: Statevector,
}

/// The ancilla `|φ⟩ = (1/√d) Σ_j ω^{−j} |j⟩`, prepared as `F|d−1⟩`.
pub fn prepare_phi(dim: Dimension) -> Result<Statevector> {
    let top = basis_state(&DigitString::new(vec![dim.get() - 1], dim)?)?;
    fourier_matrix(dim, FourierDirection::Forward).apply(&top)
}

/// `|φ⟩` written amplitude by amplitude.
pub fn phi_direct(dim: Dimension) -> Result<Statevector> {
    let d = dim.get();
    let scale = 1.0 / (d as f64).sqrt();
    let amps = (0..d).map(|j| dim.omega_pow(-(j as i64)) * scale).collect();
    Statevector::from_amplitudes(dim, 1, amps)
}

/// `|ψ_s⟩ = (1/√(d^n)) Σ_x ω^{s·x} |x⟩`.
pub fn build_psi(secret: &DigitString) -> Result<Statevector> {
    let dim = secret.dim();
    let d = dim.get();
    let n = secret.len();
    let len = AmplitudeBudget::current().register_len(dim, n, "statevector")?;
    let scale = 1.0 / (len as f64).sqrt();
    let mut x = vec![0usize; n];
    let mut amps = Vec::with_capacity(len);
    for i in 0..len {
        if i > 0 {
            for digit in x.iter_mut().rev() {
                *digit += 1;
                if *digit < d {
                    break;
                }
                *digit = 0;
            }
        }
        let phase = x
            .iter()
            .zip(secret.digits())
            .fold(0, |acc, (a, b)| (acc + a * b) % d);
        amps.push(dim.omega_pow(phase as i64) * scale);
    }
    Statevector::from_amplitudes(dim, n, amps)
}

/// Runs the quantum circuit through its final transform, making exactly one
/// oracle query.
pub fn bv_circuit(oracle: &mut LinearOracle) -> Result<BvStates> {
    let dim = oracle.dim();
    let n = oracle.input_len();
    let mut label = vec![0; n];
    label.push(dim.get() - 1);
    let initial = basis_state(&DigitString::new(label, dim)?)?;

    let forward = fourier_matrix(dim, FourierDirection::Forward);
    let after_fourier = apply_to_each(&initial, &forward, 0..=n)?;
    let after_oracle = oracle.apply_quantum(&after_fourier)?;
    let inverse = fourier_matrix(dim, FourierDirection::Inverse);
    let final_state = apply_to_each(&after_oracle, &inverse, 0..n)?;

    Ok(BvStates {
        initial,
        after_fourier,
        after_oracle,
        final_state,
    })
}

/// Recovers the hidden string with one quantum query.
pub fn run_quantum_bv(oracle: &mut LinearOracle) -> Result<RunReport> {
    let start = Instant::now();
    let queries_before = oracle.query_count();
    let n = oracle.input_len();
    let states = bv_circuit(oracle)?;
    let probs = marginal_probabilities(&states.final_state, 0..n)?;
    let (index, &peak) = probs
        .iter()
        .enumerate()
        .fold(None, |best: Option<(usize, &f64)>, (i, p)| match best {
            Some((_, q)) if q >= p => best,
            _ => Some((i, p)),
        })
        .expect("register is nonempty");
    if peak < READOUT_GUARD {
        return Err(Error::InternalConsistency(format!(
            "readout peak probability {peak} is below {READOUT_GUARD}"
        )));
    }
    Ok(RunReport {
        mode: Mode::Quantum,
        d: oracle.dim().get(),
        n,
        recovered: decode_index(index, oracle.dim(), n)?,
        oracle_queries: oracle.query_count() - queries_before,
        peak_probability: peak.min(1.0),
        elapsed: start.elapsed(),
    })
}

/// Recovers the hidden string digit by digit, querying each unit string.
pub fn run_classical_bv(oracle: &mut LinearOracle) -> Result<RunReport> {
    let start = Instant::now();
    let queries_before = oracle.query_count();
    let dim = oracle.dim();
    let n = oracle.input_len();
    let digits = (0..n)
        .map(|i| oracle.eval_classical(&DigitString::unit(n, i, dim)?))
        .collect::<Result<Vec<_>>>()?;
    Ok(RunReport {
        mode: Mode::Classical,
        d: dim.get(),
        n,
        recovered: DigitString::new(digits, dim)?,
        oracle_queries: oracle.query_count() - queries_before,
        peak_probability: 1.0,
        elapsed: start.elapsed(),
    })
}

fn check_range(state: &Statevector, qudits: &Range<usize>) -> Result<()> {
    if qudits.start >= qudits.end || qudits.end > state.qudits() {
        return Err(Error::domain(format!(
            "qudit range {qudits:?} invalid for a {}-qudit register",
            state.qudits()
        )));
    }
    Ok(())
}

/// Outcome distribution of the qudits in `qudits`, indexed by their
/// big-endian label, with every other qudit traced out.
pub fn marginal_probabilities(state: &Statevector, qudits: Range<usize>) -> Result<Vec<f64>> {
    check_range(state, &qudits)?;
    let d = state.dim().get();
    let outcomes = d.pow(qudits.len() as u32);
    let low = d.pow((state.qudits() - qudits.end) as u32);
    let mut probs = vec![0.0; outcomes];
    for (idx, amp) in state.amplitudes().iter().enumerate() {
        probs[(idx / low) % outcomes] += amp.norm_sqr();
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > PROBABILITY_TOLERANCE {
        return Err(Error::Numerical(format!(
            "outcome probabilities sum to {total}, not 1"
        )));
    }
    Ok(probs)
}

/// Samples the qudits in `qudits` by inverse CDF over ascending labels.
pub fn measure_register<R: Rng + ?Sized>(
    state: &Statevector,
    qudits: Range<usize>,
    rng: &mut R,
) -> Result<MeasurementOutcome> {
    let width = qudits.len();
    let probs = marginal_probabilities(state, qudits)?;
    let u: f64 = rng.random();
    let mut cumulative = 0.0;
    let mut chosen = None;
    for (i, &p) in probs.iter().enumerate() {
        if p > 0.0 {
            chosen = Some(i);
        }
        cumulative += p;
        if u < cumulative {
            break;
        }
    }
    // u can land past the summed mass by rounding; the last nonzero outcome absorbs it.
    let index =
        chosen.ok_or_else(|| Error::Numerical("all outcome probabilities are zero".into()))?;
    Ok(MeasurementOutcome {
        digits: decode_index(index, state.dim(), width)?,
        probability: probs[index].clamp(0.0, 1.0),
    })
}

/// `a ⊗ b` factorization helper: contracts the last qudit with `⟨ancilla|`.
pub fn project_last(state: &Statevector, ancilla: &Statevector) -> Result<Statevector> {
    if ancilla.qudits() != 1 || ancilla.dim() != state.dim() || state.qudits() < 2 {
        return Err(Error::domain(
            "projection needs a single-qudit ancilla and a multi-qudit state",
        ));
    }
    let bra: Vec<Complex64> = ancilla.amplitudes().iter().map(|a| a.conj()).collect();
    let amps = state
        .amplitudes()
        .chunks_exact(state.dim().get())
        .map(|block| block.iter().zip(&bra).map(|(a, b)| a * b).sum())
        .collect();
    Statevector::from_amplitudes(state.dim(), state.qudits() - 1, amps)
}

/// The state the circuit should reach after the oracle: `|ψ_s⟩ ⊗ |φ⟩`.
pub fn expected_after_oracle(secret: &DigitString) -> Result<Statevector> {
    tensor(&build_psi(secret)?, &prepare_phi(secret.dim())?)
}

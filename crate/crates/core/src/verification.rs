//! Brute-force numeric checks of the identities the algorithm rests on,
//! plus a dense-matrix reference simulation of the whole circuit.
//!
//! Everything here is single-threaded so that a check's reported error is
//! reproducible to the last bit.

use num_complex::Complex64;
use serde::Serialize;

use crate::algorithm::{build_psi, bv_circuit, expected_after_oracle, prepare_phi};
use crate::error::{Error, Result};
use crate::gates::{
    apply_sum, fourier_matrix, FourierDirection, GateMatrix, PlacedGate, DENSE_LIMIT,
};
use crate::oracle::LinearOracle;
use crate::state::{
    basis_state, decode_index, inner_product, tensor, DigitString, Dimension, Statevector,
};

/// Tolerance for `d × d`-level algebra (root-of-unity sums, kickback).
pub const ALGEBRA_TOLERANCE: f64 = 1e-12;
/// Tolerance for dense-reference versus strided-pipeline agreement.
pub const PIPELINE_TOLERANCE: f64 = 1e-10;
/// Tolerance for end-to-end state checks (Gram matrix, intermediate state).
pub const STATE_TOLERANCE: f64 = 1e-9;

/// Largest family size [`gram_check`] will build.
pub const GRAM_LIMIT: usize = 625;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub max_abs_error: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub details: String,
}

impl CheckResult {
    fn new(
        name: impl Into<String>,
        max_abs_error: f64,
        tolerance: f64,
        details: impl Into<String>,
    ) -> Self {
        CheckResult {
            name: name.into(),
            max_abs_error,
            tolerance,
            passed: max_abs_error <= tolerance,
            details: details.into(),
        }
    }
}

/// `Σ_{α=0}^{d−1} ω^{αk}` by direct summation.
pub fn lemma1_sum(dim: Dimension, k: u64) -> Complex64 {
    let d = dim.get() as u64;
    (0..d)
        .map(|alpha| dim.omega_pow(((alpha * k) % d) as i64))
        .sum()
}

/// Compares [`lemma1_sum`] against `d·[k ≡ 0 mod d]` for every
/// `2 ≤ d ≤ max_d`, `0 ≤ k ≤ 3d`.
pub fn lemma1_check(max_d: usize) -> Result<CheckResult> {
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    for d in 2..=max_d {
        let dim = Dimension::new(d)?;
        for k in 0..=3 * d as u64 {
            let expected = if k % d as u64 == 0 { d as f64 } else { 0.0 };
            worst = worst.max((lemma1_sum(dim, k) - expected).norm());
            cases += 1;
        }
    }
    Ok(CheckResult::new(
        format!("root-of-unity sum d<={max_d}"),
        worst,
        ALGEBRA_TOLERANCE,
        format!("{cases} (d, k) pairs"),
    ))
}

/// Builds every `|ψ_s⟩` for `s ∈ {0,…,d−1}^n` and reports the largest
/// deviation of their Gram matrix from the identity.
pub fn gram_check(dim: Dimension, n: usize) -> Result<CheckResult> {
    let count = match dim.checked_pow(n) {
        Some(c) if c <= GRAM_LIMIT && n > 0 => c,
        _ if n == 0 => return Err(Error::domain("gram check needs n >= 1")),
        _ => {
            return Err(Error::Capacity {
                what: "gram check",
                needed: format!("{dim}^{n}"),
                limit: GRAM_LIMIT,
            })
        }
    };
    let states = (0..count)
        .map(|i| build_psi(&decode_index(i, dim, n)?))
        .collect::<Result<Vec<_>>>()?;
    let mut worst: f64 = 0.0;
    for (i, a) in states.iter().enumerate() {
        for (j, b) in states.iter().enumerate() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((inner_product(a, b)? - target).norm());
        }
    }
    Ok(CheckResult::new(
        format!("orthonormal family d={dim} n={n}"),
        worst,
        STATE_TOLERANCE,
        format!("{count}x{count} Gram matrix"),
    ))
}

/// For each control value `i`, compares `SUM(|i⟩⊗|φ⟩)` with `ω^i·(|i⟩⊗|φ⟩)`.
pub fn kickback_check(dim: Dimension) -> Result<CheckResult> {
    let d = dim.get();
    let phi = prepare_phi(dim)?;
    let mut worst: f64 = 0.0;
    for i in 0..d {
        let before = tensor(&basis_state(&DigitString::new(vec![i], dim)?)?, &phi)?;
        let after = apply_sum(&before, 0, 1)?;
        let expected = before.scaled(dim.omega_pow(i as i64));
        worst = worst.max(after.max_abs_diff(&expected)?);
    }
    Ok(CheckResult::new(
        format!("phase kickback d={dim}"),
        worst,
        ALGEBRA_TOLERANCE,
        format!("{d} control values"),
    ))
}

/// The oracle as an explicit `d^(n+1)`-side permutation matrix, with `f_s`
/// evaluated here rather than through [`LinearOracle`].
fn oracle_matrix(secret: &DigitString) -> Result<GateMatrix> {
    let dim = secret.dim();
    let d = dim.get();
    let n = secret.len();
    let side = d.pow(n as u32 + 1);
    let mut entries = vec![Complex64::new(0.0, 0.0); side * side];
    for col in 0..side {
        let x = decode_index(col / d, dim, n)?;
        let y = col % d;
        let f: usize = x
            .digits()
            .iter()
            .zip(secret.digits())
            .map(|(a, b)| a * b)
            .sum::<usize>()
            % d;
        let row = (col / d) * d + (y + f) % d;
        entries[row * side + col] = Complex64::new(1.0, 0.0);
    }
    GateMatrix::new(dim, side, entries)
}

/// Full circuit as one dense unitary applied to `|0…0⟩|d−1⟩`. Limited to
/// `d^(n+1) ≤ 256`.
pub fn dense_reference_bv(secret: &DigitString) -> Result<Statevector> {
    let dim = secret.dim();
    let n = secret.len();
    let k = n + 1;
    match dim.checked_pow(k) {
        Some(side) if side <= DENSE_LIMIT => {}
        _ => {
            return Err(Error::Capacity {
                what: "dense reference",
                needed: format!("{dim}^{k}"),
                limit: DENSE_LIMIT,
            })
        }
    }
    let forward = fourier_matrix(dim, FourierDirection::Forward);
    let inverse = fourier_matrix(dim, FourierDirection::Inverse);
    let mut gates: Vec<PlacedGate> = (0..k)
        .map(|q| PlacedGate::new(forward.clone(), vec![q]))
        .collect();
    gates.push(PlacedGate::new(oracle_matrix(secret)?, (0..k).collect()));
    gates.extend((0..n).map(|q| PlacedGate::new(inverse.clone(), vec![q])));
    let unitary = crate::gates::dense_operator(dim, &gates, k)?;

    let mut label = vec![0; n];
    label.push(dim.get() - 1);
    unitary.apply(&basis_state(&DigitString::new(label, dim)?)?)
}

/// Every `(d, n)` with `n ≥ 1` and `d^(n+1) ≤ limit`.
pub fn dense_grid(limit: usize) -> Vec<(usize, usize)> {
    let mut grid = Vec::new();
    for d in 2.. {
        if d * d > limit {
            break;
        }
        for n in 1.. {
            match d.checked_pow(n as u32 + 1) {
                Some(side) if side <= limit => grid.push((d, n)),
                _ => break,
            }
        }
    }
    grid
}

/// Dense reference versus the strided pipeline, for every secret on the grid.
pub fn pipeline_check(limit: usize) -> Result<CheckResult> {
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    for (d, n) in dense_grid(limit) {
        let dim = Dimension::new(d)?;
        for i in 0..d.pow(n as u32) {
            let secret = decode_index(i, dim, n)?;
            let dense = dense_reference_bv(&secret)?;
            let fast = bv_circuit(&mut LinearOracle::new(secret))?.final_state;
            worst = worst.max(dense.max_abs_diff(&fast)?);
            cases += 1;
        }
    }
    Ok(CheckResult::new(
        format!("dense reference vs pipeline, d^(n+1)<={limit}"),
        worst,
        PIPELINE_TOLERANCE,
        format!("{cases} secrets"),
    ))
}

/// Post-oracle register versus `|ψ_s⟩ ⊗ |φ⟩`, for every secret on the grid.
pub fn intermediate_state_check(limit: usize) -> Result<CheckResult> {
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    for (d, n) in dense_grid(limit) {
        let dim = Dimension::new(d)?;
        for i in 0..d.pow(n as u32) {
            let secret = decode_index(i, dim, n)?;
            let expected = expected_after_oracle(&secret)?;
            let actual = bv_circuit(&mut LinearOracle::new(secret))?.after_oracle;
            worst = worst.max(actual.max_abs_diff(&expected)?);
            cases += 1;
        }
    }
    Ok(CheckResult::new(
        format!("post-oracle state factorizes, d^(n+1)<={limit}"),
        worst,
        STATE_TOLERANCE,
        format!("{cases} secrets"),
    ))
}

/// The full self-check suite.
pub fn run_all() -> Result<Vec<CheckResult>> {
    let mut results = vec![lemma1_check(16)?];
    for (d, n) in [(2, 1), (2, 2), (3, 2), (5, 2), (2, 4)] {
        results.push(gram_check(Dimension::new(d)?, n)?);
    }
    for d in 2..=8 {
        results.push(kickback_check(Dimension::new(d)?)?);
    }
    results.push(intermediate_state_check(DENSE_LIMIT)?);
    results.push(pipeline_check(DENSE_LIMIT)?);
    Ok(results)
}

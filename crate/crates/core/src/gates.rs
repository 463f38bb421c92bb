//! Generalized Fourier and SUM gates.
//!
//! Gates act on a [`Statevector`] by strided traversal: a single-qudit gate
//! on qudit `p` of a `k`-qudit register mixes the `d` amplitudes whose
//! indices differ only in digit `p`, i.e. that are `d^(k−1−p)` apart. The
//! full `d^k × d^k` operator is only ever built by [`dense_operator`], which
//! exists as an independent reference.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::state::{Dimension, Statevector};

/// Registers at least this long are processed in parallel blocks.
const PARALLEL_THRESHOLD: usize = 1 << 14;

/// Largest side length [`dense_operator`] will materialize.
pub const DENSE_LIMIT: usize = 256;

const UNITARITY_TOLERANCE: f64 = 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FourierDirection {
    /// Kernel `ω^{js}/√d`.
    Forward,
    /// Kernel `ω^{−js}/√d`, the conjugate transpose of `Forward`.
    Inverse,
}

/// A dense unitary on `m` qudits, stored row-major with side `d^m`.
#[derive(Debug, Clone, PartialEq)]
pub struct GateMatrix {
    dim: Dimension,
    order: usize,
    entries: Vec<Complex64>,
}

impl GateMatrix {
    /// Builds a gate from row-major entries, rejecting non-unitary input.
    pub fn new(dim: Dimension, order: usize, entries: Vec<Complex64>) -> Result<Self> {
        let gate = Self::from_parts(dim, order, entries)?;
        let err = gate.unitarity_error();
        if err > UNITARITY_TOLERANCE {
            return Err(Error::domain(format!(
                "matrix is not unitary: max |M·M† − I| entry is {err:e}"
            )));
        }
        Ok(gate)
    }

    fn from_parts(dim: Dimension, order: usize, entries: Vec<Complex64>) -> Result<Self> {
        if order == 0 || !is_power_of(order, dim.get()) {
            return Err(Error::domain(format!(
                "gate side {order} is not a power of d = {dim}"
            )));
        }
        if entries.len() != order * order {
            return Err(Error::domain(format!(
                "expected {} entries for a {order}×{order} gate, got {}",
                order * order,
                entries.len()
            )));
        }
        Ok(GateMatrix {
            dim,
            order,
            entries,
        })
    }

    pub fn identity(dim: Dimension, qudits: usize) -> Result<Self> {
        let order = dense_side(dim, qudits)?;
        let mut entries = vec![ZERO; order * order];
        for i in 0..order {
            entries[i * order + i] = ONE;
        }
        Ok(GateMatrix {
            dim,
            order,
            entries,
        })
    }

    pub fn dim(&self) -> Dimension {
        self.dim
    }

    /// Side length `d^m`.
    pub fn order(&self) -> usize {
        self.order
    }

    /// Number of qudits the gate acts on.
    pub fn arity(&self) -> usize {
        let mut m = 0;
        let mut side = self.order;
        while side > 1 {
            side /= self.dim.get();
            m += 1;
        }
        m
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.order + col]
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn dagger(&self) -> GateMatrix {
        let n = self.order;
        let mut entries = vec![ZERO; n * n];
        for r in 0..n {
            for c in 0..n {
                entries[c * n + r] = self.entries[r * n + c].conj();
            }
        }
        GateMatrix {
            dim: self.dim,
            order: n,
            entries,
        }
    }

    /// `self · rhs`.
    pub fn matmul(&self, rhs: &GateMatrix) -> Result<GateMatrix> {
        if self.dim != rhs.dim || self.order != rhs.order {
            return Err(Error::domain("matrix shapes differ"));
        }
        let n = self.order;
        let mut entries = vec![ZERO; n * n];
        for r in 0..n {
            let row = &self.entries[r * n..(r + 1) * n];
            let out = &mut entries[r * n..(r + 1) * n];
            for (k, &a) in row.iter().enumerate() {
                if a == ZERO {
                    continue;
                }
                let rhs_row = &rhs.entries[k * n..(k + 1) * n];
                for (o, &b) in out.iter_mut().zip(rhs_row) {
                    *o += a * b;
                }
            }
        }
        Ok(GateMatrix {
            dim: self.dim,
            order: n,
            entries,
        })
    }

    /// Dense matrix-vector product; the state must span the whole gate.
    pub fn apply(&self, state: &Statevector) -> Result<Statevector> {
        if state.dim() != self.dim || state.len() != self.order {
            return Err(Error::domain(format!(
                "gate of side {} cannot act on a register of length {}",
                self.order,
                state.len()
            )));
        }
        let amps = state.amplitudes();
        let out = self
            .entries
            .chunks_exact(self.order)
            .map(|row| row.iter().zip(amps).map(|(m, a)| m * a).sum())
            .collect();
        Ok(state.with_amplitudes_unchecked(out))
    }

    /// Largest entry of `|M·M† − I|`.
    pub fn unitarity_error(&self) -> f64 {
        let n = self.order;
        let mut worst: f64 = 0.0;
        for r in 0..n {
            let row_r = &self.entries[r * n..(r + 1) * n];
            let support: Vec<usize> = (0..n).filter(|&j| row_r[j] != ZERO).collect();
            for c in 0..n {
                let row_c = &self.entries[c * n..(c + 1) * n];
                let dot: Complex64 = support.iter().map(|&j| row_r[j] * row_c[j].conj()).sum();
                let target = if r == c { ONE } else { ZERO };
                worst = worst.max((dot - target).norm());
            }
        }
        worst
    }
}

fn is_power_of(mut n: usize, base: usize) -> bool {
    while n > 1 {
        if !n.is_multiple_of(base) {
            return false;
        }
        n /= base;
    }
    n == 1
}

fn dense_side(dim: Dimension, qudits: usize) -> Result<usize> {
    match dim.checked_pow(qudits) {
        Some(side) if side <= DENSE_LIMIT => Ok(side),
        _ => Err(Error::Capacity {
            what: "dense operator",
            needed: format!("{dim}^{qudits}"),
            limit: DENSE_LIMIT,
        }),
    }
}

/// The `d`-point discrete Fourier transform, normalized to be unitary.
pub fn fourier_matrix(dim: Dimension, direction: FourierDirection) -> GateMatrix {
    let d = dim.get();
    let scale = 1.0 / (d as f64).sqrt();
    let sign = match direction {
        FourierDirection::Forward => 1,
        FourierDirection::Inverse => -1,
    };
    let mut entries = Vec::with_capacity(d * d);
    for s in 0..d {
        for j in 0..d {
            entries.push(dim.omega_pow(sign * (j * s) as i64) * scale);
        }
    }
    GateMatrix {
        dim,
        order: d,
        entries,
    }
}

/// The two-qudit SUM gate `|i⟩|j⟩ → |i⟩|(i+j) mod d⟩` as a `d² × d²`
/// permutation matrix (control is the more significant qudit).
pub fn sum_matrix(dim: Dimension) -> GateMatrix {
    let d = dim.get();
    let n = d * d;
    let mut entries = vec![ZERO; n * n];
    for i in 0..d {
        for j in 0..d {
            let col = i * d + j;
            let row = i * d + (i + j) % d;
            entries[row * n + col] = ONE;
        }
    }
    GateMatrix {
        dim,
        order: n,
        entries,
    }
}

fn check_position(state: &Statevector, pos: usize) -> Result<()> {
    if pos >= state.qudits() {
        return Err(Error::domain(format!(
            "qudit {pos} out of range for a {}-qudit register",
            state.qudits()
        )));
    }
    Ok(())
}

/// Distance between indices that differ by one in digit `pos`.
fn stride_of(state: &Statevector, pos: usize) -> usize {
    state.dim().get().pow((state.qudits() - 1 - pos) as u32)
}

/// Target number of amplitudes per work item.
const TILE: usize = 4096;

/// Applies a single-qudit gate to qudit `pos` (0 is the most significant).
pub fn apply_local_gate(state: &Statevector, gate: &GateMatrix, pos: usize) -> Result<Statevector> {
    let mut out = state.clone();
    apply_local_gate_in_place(&mut out, gate, pos)?;
    Ok(out)
}

/// In-place form of [`apply_local_gate`]; produces bit-identical amplitudes.
pub(crate) fn apply_local_gate_in_place(
    state: &mut Statevector,
    gate: &GateMatrix,
    pos: usize,
) -> Result<()> {
    check_position(state, pos)?;
    let d = state.dim().get();
    if gate.dim() != state.dim() || gate.order() != d {
        return Err(Error::domain(format!(
            "expected a {d}×{d} gate, got side {} for d = {}",
            gate.order(),
            gate.dim()
        )));
    }
    let stride = stride_of(state, pos);
    let block = d * stride;
    let parallel = state.len() >= PARALLEL_THRESHOLD;
    let g = gate.entries();
    let amps = state.amplitudes_mut();

    let mix = |rows: &mut [&mut [Complex64]], scratch: &mut [Complex64]| {
        for i in 0..rows[0].len() {
            for (slot, row) in scratch.iter_mut().zip(rows.iter()) {
                *slot = row[i];
            }
            for (r, row) in rows.iter_mut().enumerate() {
                let mut acc = ZERO;
                for (m, x) in g[r * d..(r + 1) * d].iter().zip(scratch.iter()) {
                    acc += m * x;
                }
                row[i] = acc;
            }
        }
    };

    if block >= TILE {
        // Few large blocks: split each block's d rows into aligned windows so
        // the work items stay independent.
        let tile = (TILE / d).max(1).min(stride);
        let mut groups: Vec<Vec<&mut [Complex64]>> = Vec::new();
        for blk in amps.chunks_mut(block) {
            let mut rows: Vec<_> = blk
                .chunks_mut(stride)
                .map(|row| row.chunks_mut(tile))
                .collect();
            while let Some(first) = rows[0].next() {
                let mut group = Vec::with_capacity(d);
                group.push(first);
                group.extend(
                    rows[1..]
                        .iter_mut()
                        .map(|r| r.next().expect("rows have equal length")),
                );
                groups.push(group);
            }
        }
        let kernel = |group: &mut Vec<&mut [Complex64]>| mix(group, &mut vec![ZERO; d]);
        if parallel {
            groups.par_iter_mut().for_each(kernel);
        } else {
            groups.iter_mut().for_each(kernel);
        }
    } else {
        // Many small blocks: each work item takes a run of whole blocks.
        let per_item = (TILE / block).max(1) * block;
        let kernel = |chunk: &mut [Complex64]| {
            let mut scratch = vec![ZERO; d];
            let mut rows: Vec<&mut [Complex64]> = Vec::with_capacity(d);
            for blk in chunk.chunks_mut(block) {
                rows.extend(blk.chunks_mut(stride));
                mix(&mut rows, &mut scratch);
                rows.clear();
            }
        };
        if parallel {
            amps.par_chunks_mut(per_item).for_each(kernel);
        } else {
            amps.chunks_mut(per_item).for_each(kernel);
        }
    }
    Ok(())
}

/// Applies `gate` to every qudit in `positions`, in order.
pub fn apply_to_each(
    state: &Statevector,
    gate: &GateMatrix,
    positions: impl IntoIterator<Item = usize>,
) -> Result<Statevector> {
    let mut out = state.clone();
    for pos in positions {
        apply_local_gate_in_place(&mut out, gate, pos)?;
    }
    Ok(out)
}

/// Applies SUM with the given control and target qudits. Pure index
/// permutation; amplitudes are moved, never combined.
pub fn apply_sum(state: &Statevector, control: usize, target: usize) -> Result<Statevector> {
    check_position(state, control)?;
    check_position(state, target)?;
    if control == target {
        return Err(Error::domain(format!(
            "SUM control and target are both qudit {control}"
        )));
    }
    let d = state.dim().get();
    let cs = stride_of(state, control);
    let ts = stride_of(state, target);
    let input = state.amplitudes();
    let mut out = vec![ZERO; input.len()];
    for (idx, &amp) in input.iter().enumerate() {
        let i = (idx / cs) % d;
        let j = (idx / ts) % d;
        let shifted = (i + j) % d;
        out[idx - j * ts + shifted * ts] = amp;
    }
    Ok(state.with_amplitudes_unchecked(out))
}

/// A gate together with the register qudits it acts on. The first listed
/// qudit is the most significant digit of the gate's own index.
#[derive(Debug, Clone)]
pub struct PlacedGate {
    pub gate: GateMatrix,
    pub qudits: Vec<usize>,
}

impl PlacedGate {
    pub fn new(gate: GateMatrix, qudits: Vec<usize>) -> Self {
        PlacedGate { gate, qudits }
    }
}

/// Nonzero entries of a lifted gate, row by row.
type SparseRows = Vec<Vec<(usize, Complex64)>>;

/// Lifts `placed` to the full `k`-qudit space.
fn lift(placed: &PlacedGate, k: usize) -> Result<SparseRows> {
    let dim = placed.gate.dim();
    let d = dim.get();
    let side = dense_side(dim, k)?;
    let m = placed.qudits.len();
    if m == 0 || Some(placed.gate.order()) != dim.checked_pow(m) {
        return Err(Error::domain(format!(
            "gate of side {} does not match {m} target qudits",
            placed.gate.order()
        )));
    }
    for (i, &q) in placed.qudits.iter().enumerate() {
        if q >= k {
            return Err(Error::domain(format!(
                "qudit {q} out of range for {k} qudits"
            )));
        }
        if placed.qudits[..i].contains(&q) {
            return Err(Error::domain(format!("qudit {q} listed twice")));
        }
    }
    let strides: Vec<usize> = placed
        .qudits
        .iter()
        .map(|&q| d.pow((k - 1 - q) as u32))
        .collect();
    let sub = placed.gate.order();
    let mut rows: SparseRows = vec![Vec::new(); side];
    for col in 0..side {
        let mut sub_col = 0;
        let mut base = col;
        for &s in &strides {
            let digit = (col / s) % d;
            sub_col = sub_col * d + digit;
            base -= digit * s;
        }
        for sub_row in 0..sub {
            let value = placed.gate.entry(sub_row, sub_col);
            if value == ZERO {
                continue;
            }
            let mut row = base;
            let mut rest = sub_row;
            for &s in strides.iter().rev() {
                row += (rest % d) * s;
                rest /= d;
            }
            rows[row].push((col, value));
        }
    }
    Ok(rows)
}

/// Explicit `d^k × d^k` product of the gates, applied first to last.
/// Reference path only; limited to `d^k ≤ 256`. Each factor was checked
/// for unitarity when it was constructed.
pub fn dense_operator(dim: Dimension, gates: &[PlacedGate], k: usize) -> Result<GateMatrix> {
    if k == 0 {
        return Err(Error::domain("a register needs at least one qudit"));
    }
    let mut total = GateMatrix::identity(dim, k)?;
    let n = total.order;
    for placed in gates {
        if placed.gate.dim() != dim {
            return Err(Error::domain(
                "gate dimension differs from register dimension",
            ));
        }
        let rows = lift(placed, k)?;
        let mut entries = vec![ZERO; n * n];
        for (r, row) in rows.iter().enumerate() {
            let out = &mut entries[r * n..(r + 1) * n];
            for &(mid, value) in row {
                let src = &total.entries[mid * n..(mid + 1) * n];
                for (o, &b) in out.iter_mut().zip(src) {
                    *o += value * b;
                }
            }
        }
        total.entries = entries;
    }
    Ok(total)
}

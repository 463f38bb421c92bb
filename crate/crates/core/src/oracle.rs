//! The hidden-string oracle `f_s(x) = s·x mod d`.

use crate::error::{Error, Result};
use crate::state::{DigitString, Dimension, Statevector};

/// Black box around a hidden string `s`. Every classical evaluation and
/// every quantum application counts as one query.
#[derive(Debug)]
pub struct LinearOracle {
    secret: DigitString,
    queries: u64,
}

impl LinearOracle {
    pub fn new(secret: DigitString) -> Self {
        LinearOracle { secret, queries: 0 }
    }

    pub fn dim(&self) -> Dimension {
        self.secret.dim()
    }

    /// Length `n` of the hidden string.
    pub fn input_len(&self) -> usize {
        self.secret.len()
    }

    /// Number of queries made so far. Reading it is not a query.
    pub fn query_count(&self) -> u64 {
        self.queries
    }

    /// `f_s(x)`; one query.
    pub fn eval_classical(&mut self, x: &DigitString) -> Result<usize> {
        let value = self.secret.dot_mod(x)?;
        self.queries += 1;
        Ok(value)
    }

    /// `|x⟩|y⟩ → |x⟩|(y + f_s(x)) mod d⟩` on an `n + 1` qudit register, the
    /// last qudit being the target. One query regardless of register size.
    pub fn apply_quantum(&mut self, state: &Statevector) -> Result<Statevector> {
        let n = self.secret.len();
        if state.dim() != self.dim() || state.qudits() != n + 1 {
            return Err(Error::domain(format!(
                "oracle expects {} qudits of dimension {}, got {} of dimension {}",
                n + 1,
                self.dim(),
                state.qudits(),
                state.dim()
            )));
        }
        let d = self.dim().get();
        let secret = self.secret.digits();
        let input = state.amplitudes();
        let mut out = vec![num_complex::Complex64::new(0.0, 0.0); input.len()];
        // x runs through {0,…,d−1}^n in index order while f tracks s·x mod d.
        let mut x = vec![0usize; n];
        let mut f = 0;
        for (block, (src, dst)) in input
            .chunks_exact(d)
            .zip(out.chunks_exact_mut(d))
            .enumerate()
        {
            if block > 0 {
                f = (f + increment(&mut x, secret, d)) % d;
            }
            for (y, &amp) in src.iter().enumerate() {
                dst[(y + f) % d] = amp;
            }
        }
        self.queries += 1;
        Ok(state.with_amplitudes_unchecked(out))
    }
}

/// Advances a big-endian base-`d` counter by one and returns the change in
/// `s·x mod d`. A digit stepping up adds `s_i`; a digit wrapping from `d−1`
/// to 0 subtracts `(d−1)·s_i ≡ s_i`, so every touched digit contributes `s_i`.
fn increment(digits: &mut [usize], secret: &[usize], d: usize) -> usize {
    let mut delta = 0;
    for (digit, s) in digits.iter_mut().zip(secret).rev() {
        delta += s;
        *digit += 1;
        if *digit < d {
            break;
        }
        *digit = 0;
    }
    delta % d
}

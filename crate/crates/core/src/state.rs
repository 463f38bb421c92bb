//! Basis-label encoding and dense complex vectors over `d^k` amplitudes.
//!
//! Qudit 0 is the most significant digit of a flat basis index, so the
//! label `x = (x_0, …, x_{n−1})` sits at `Σ x_i · d^(n−1−i)`.

use std::f64::consts::TAU;
use std::fmt;
use std::sync::OnceLock;

use num_complex::Complex64;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Number of levels per qudit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Dimension(usize);

impl Dimension {
    pub fn new(d: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::domain(format!(
                "qudit dimension must be at least 2, got {d}"
            )));
        }
        Ok(Dimension(d))
    }

    #[inline]
    pub fn get(self) -> usize {
        self.0
    }

    /// `d^k`, or `None` on overflow.
    pub fn checked_pow(self, k: usize) -> Option<usize> {
        u32::try_from(k).ok().and_then(|k| self.0.checked_pow(k))
    }

    /// `ω^m` with `ω = exp(2πi/d)`. The exponent is reduced mod `d` first;
    /// quarter turns are returned exactly.
    pub fn omega_pow(self, m: i64) -> Complex64 {
        let d = self.0 as i64;
        let r = m.rem_euclid(d);
        if (4 * r) % d == 0 {
            return match 4 * r / d {
                0 => Complex64::new(1.0, 0.0),
                1 => Complex64::new(0.0, 1.0),
                2 => Complex64::new(-1.0, 0.0),
                _ => Complex64::new(0.0, -1.0),
            };
        }
        Complex64::from_polar(1.0, TAU * r as f64 / d as f64)
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Upper bound on the number of complex amplitudes any register may hold.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AmplitudeBudget(usize);

static CURRENT_BUDGET: OnceLock<AmplitudeBudget> = OnceLock::new();

impl AmplitudeBudget {
    pub const DEFAULT: AmplitudeBudget = AmplitudeBudget(1 << 24);
    pub const ENV_VAR: &'static str = "QUDITBV_AMPLITUDE_BUDGET";

    pub fn new(max_amplitudes: usize) -> Result<Self> {
        if max_amplitudes == 0 {
            return Err(Error::domain("amplitude budget must be positive"));
        }
        Ok(AmplitudeBudget(max_amplitudes))
    }

    pub fn get(self) -> usize {
        self.0
    }

    /// Reads the override from `QUDITBV_AMPLITUDE_BUDGET`; unset means the default.
    pub fn from_env() -> Result<Self> {
        match std::env::var(Self::ENV_VAR) {
            Ok(raw) => {
                let n = raw.trim().parse::<usize>().map_err(|_| {
                    Error::domain(format!(
                        "{} is not a positive integer: {raw:?}",
                        Self::ENV_VAR
                    ))
                })?;
                Self::new(n)
            }
            Err(_) => Ok(Self::DEFAULT),
        }
    }

    /// Process-wide budget. Initialized from the environment on first use
    /// (falling back to the default if the variable is malformed) unless
    /// [`AmplitudeBudget::install`] ran first.
    pub fn current() -> Self {
        *CURRENT_BUDGET.get_or_init(|| Self::from_env().unwrap_or(Self::DEFAULT))
    }

    /// Fixes the process-wide budget. Returns false if it was already set.
    pub fn install(self) -> bool {
        CURRENT_BUDGET.set(self).is_ok()
    }

    /// Length `d^k` of a `k`-qudit register, if it fits.
    pub fn register_len(self, d: Dimension, k: usize, what: &'static str) -> Result<usize> {
        match d.checked_pow(k) {
            Some(len) if len <= self.0 => Ok(len),
            _ => Err(Error::Capacity {
                what,
                needed: format!("{d}^{k}"),
                limit: self.0,
            }),
        }
    }
}

/// A string of base-`d` digits, used both for basis labels and hidden strings.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DigitString {
    digits: Vec<usize>,
    dim: Dimension,
}

impl DigitString {
    pub fn new(digits: Vec<usize>, dim: Dimension) -> Result<Self> {
        if digits.is_empty() {
            return Err(Error::domain("digit string must have at least one digit"));
        }
        if let Some((pos, &bad)) = digits.iter().enumerate().find(|(_, &x)| x >= dim.get()) {
            return Err(Error::domain(format!(
                "digit {bad} at position {pos} is out of range for d = {dim}"
            )));
        }
        Ok(DigitString { digits, dim })
    }

    pub fn zeros(n: usize, dim: Dimension) -> Result<Self> {
        Self::new(vec![0; n], dim)
    }

    /// The unit string with a 1 at `pos` and zeros elsewhere.
    pub fn unit(n: usize, pos: usize, dim: Dimension) -> Result<Self> {
        if pos >= n {
            return Err(Error::domain(format!(
                "unit position {pos} out of range for n = {n}"
            )));
        }
        let mut digits = vec![0; n];
        digits[pos] = 1;
        Self::new(digits, dim)
    }

    /// Parses comma-separated decimal digits, e.g. `"1,0,2"`.
    pub fn parse(text: &str, dim: Dimension) -> Result<Self> {
        let digits = text
            .split(',')
            .map(|item| {
                let item = item.trim();
                item.parse::<usize>()
                    .map_err(|_| Error::domain(format!("invalid digit {item:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(digits, dim)
    }

    /// Uniform draw from `{0,…,d−1}^n`.
    pub fn random<R: rand::Rng + ?Sized>(n: usize, dim: Dimension, rng: &mut R) -> Result<Self> {
        let digits = (0..n).map(|_| rng.random_range(0..dim.get())).collect();
        Self::new(digits, dim)
    }

    pub fn digits(&self) -> &[usize] {
        &self.digits
    }

    pub fn dim(&self) -> Dimension {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    /// `(Σ a_i·b_i) mod d`.
    pub fn dot_mod(&self, other: &DigitString) -> Result<usize> {
        if self.dim != other.dim || self.len() != other.len() {
            return Err(Error::domain(format!(
                "cannot take dot product of strings with shapes (d={}, n={}) and (d={}, n={})",
                self.dim,
                self.len(),
                other.dim,
                other.len()
            )));
        }
        let d = self.dim.get();
        Ok(self
            .digits
            .iter()
            .zip(&other.digits)
            .fold(0, |acc, (a, b)| (acc + a * b) % d))
    }

    /// Joins digits with `sep`, e.g. `1-0-2`.
    pub fn join(&self, sep: &str) -> String {
        self.digits
            .iter()
            .map(usize::to_string)
            .collect::<Vec<_>>()
            .join(sep)
    }
}

impl fmt::Display for DigitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.join(","))
    }
}

impl Serialize for DigitString {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.digits.serialize(serializer)
    }
}

/// Flat basis index of a digit sequence (qudit 0 most significant).
pub fn encode_digits(digits: &[usize], d: Dimension) -> Result<usize> {
    digits.iter().try_fold(0usize, |acc, &x| {
        if x >= d.get() {
            return Err(Error::domain(format!("digit {x} out of range for d = {d}")));
        }
        acc.checked_mul(d.get())
            .and_then(|v| v.checked_add(x))
            .ok_or_else(|| Error::Capacity {
                what: "basis index",
                needed: format!("{d}^{}", digits.len()),
                limit: usize::MAX,
            })
    })
}

/// Inverse of [`encode_digits`] for an `n`-qudit register.
pub fn decode_index(index: usize, d: Dimension, n: usize) -> Result<DigitString> {
    if n == 0 {
        return Err(Error::domain("cannot decode into zero qudits"));
    }
    if let Some(len) = d.checked_pow(n) {
        if index >= len {
            return Err(Error::domain(format!(
                "index {index} out of range for {n} qudits of dimension {d}"
            )));
        }
    }
    let mut digits = vec![0; n];
    let mut rest = index;
    for slot in digits.iter_mut().rev() {
        *slot = rest % d.get();
        rest /= d.get();
    }
    DigitString::new(digits, d)
}

/// Dense amplitudes of a `k`-qudit pure state.
#[derive(Debug, Clone, PartialEq)]
pub struct Statevector {
    amplitudes: Vec<Complex64>,
    qudits: usize,
    dim: Dimension,
}

impl Statevector {
    /// All-zero vector (not normalized); a starting buffer for builders.
    pub fn zeros(dim: Dimension, qudits: usize) -> Result<Self> {
        if qudits == 0 {
            return Err(Error::domain("a register needs at least one qudit"));
        }
        let len = AmplitudeBudget::current().register_len(dim, qudits, "statevector")?;
        Ok(Statevector {
            amplitudes: vec![Complex64::new(0.0, 0.0); len],
            qudits,
            dim,
        })
    }

    pub fn from_amplitudes(
        dim: Dimension,
        qudits: usize,
        amplitudes: Vec<Complex64>,
    ) -> Result<Self> {
        if qudits == 0 {
            return Err(Error::domain("a register needs at least one qudit"));
        }
        let len = AmplitudeBudget::current().register_len(dim, qudits, "statevector")?;
        if amplitudes.len() != len {
            return Err(Error::domain(format!(
                "expected {len} amplitudes for {qudits} qudits of dimension {dim}, got {}",
                amplitudes.len()
            )));
        }
        if amplitudes
            .iter()
            .any(|a| !a.re.is_finite() || !a.im.is_finite())
        {
            return Err(Error::domain("amplitudes must be finite"));
        }
        Ok(Statevector {
            amplitudes,
            qudits,
            dim,
        })
    }

    pub(crate) fn with_amplitudes_unchecked(&self, amplitudes: Vec<Complex64>) -> Self {
        debug_assert_eq!(amplitudes.len(), self.amplitudes.len());
        Statevector {
            amplitudes,
            qudits: self.qudits,
            dim: self.dim,
        }
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amplitudes[index]
    }

    pub fn qudits(&self) -> usize {
        self.qudits
    }

    pub fn dim(&self) -> Dimension {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(Complex64::norm_sqr).sum()
    }

    /// Multiplies every amplitude by `factor`.
    pub fn scaled(&self, factor: Complex64) -> Self {
        self.with_amplitudes_unchecked(self.amplitudes.iter().map(|a| a * factor).collect())
    }

    /// Largest per-amplitude modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &Statevector) -> Result<f64> {
        check_same_shape(self, other)?;
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }
}

fn check_same_shape(a: &Statevector, b: &Statevector) -> Result<()> {
    if a.dim != b.dim || a.qudits != b.qudits {
        return Err(Error::domain(format!(
            "state shapes differ: (d={}, k={}) vs (d={}, k={})",
            a.dim, a.qudits, b.dim, b.qudits
        )));
    }
    Ok(())
}

/// `⟨a|b⟩ = Σ conj(a_i)·b_i`.
pub fn inner_product(a: &Statevector, b: &Statevector) -> Result<Complex64> {
    check_same_shape(a, b)?;
    Ok(a.amplitudes
        .iter()
        .zip(&b.amplitudes)
        .map(|(x, y)| x.conj() * y)
        .sum())
}

/// `a ⊗ b`, with `a` occupying the leading (more significant) qudits.
pub fn tensor(a: &Statevector, b: &Statevector) -> Result<Statevector> {
    if a.dim != b.dim {
        return Err(Error::domain(format!(
            "cannot tensor registers of dimension {} and {}",
            a.dim, b.dim
        )));
    }
    let qudits = a.qudits + b.qudits;
    AmplitudeBudget::current().register_len(a.dim, qudits, "tensor product")?;
    let amplitudes = a
        .amplitudes
        .iter()
        .flat_map(|x| b.amplitudes.iter().map(move |y| x * y))
        .collect();
    Ok(Statevector {
        amplitudes,
        qudits,
        dim: a.dim,
    })
}

/// The computational basis state `|x⟩`.
pub fn basis_state(x: &DigitString) -> Result<Statevector> {
    let mut state = Statevector::zeros(x.dim(), x.len())?;
    let index = encode_digits(x.digits(), x.dim())?;
    state.amplitudes[index] = Complex64::new(1.0, 0.0);
    Ok(state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn dim(d: usize) -> Dimension {
        Dimension::new(d).unwrap()
    }

    fn ds(digits: &[usize], d: usize) -> DigitString {
        DigitString::new(digits.to_vec(), dim(d)).unwrap()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn dimension_rejects_below_two() {
        assert!(matches!(Dimension::new(1), Err(Error::Domain(_))));
        assert!(matches!(Dimension::new(0), Err(Error::Domain(_))));
        assert_eq!(Dimension::new(2).unwrap().get(), 2);
    }

    #[test]
    fn encode_examples() {
        assert_eq!(encode_digits(&[1, 0, 1], dim(2)).unwrap(), 5);
        assert_eq!(encode_digits(&[0, 0], dim(3)).unwrap(), 0);
        assert_eq!(encode_digits(&[2, 1], dim(3)).unwrap(), 7);
    }

    #[test]
    fn encode_rejects_out_of_range_digit() {
        assert!(matches!(
            encode_digits(&[1, 3], dim(3)),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn decode_examples() {
        assert_eq!(decode_index(5, dim(2), 3).unwrap(), ds(&[1, 0, 1], 2));
        assert_eq!(decode_index(0, dim(5), 2).unwrap(), ds(&[0, 0], 5));
        assert_eq!(decode_index(7, dim(3), 2).unwrap(), ds(&[2, 1], 3));
    }

    #[test]
    fn decode_rejects_out_of_range_index() {
        assert!(matches!(decode_index(9, dim(3), 2), Err(Error::Domain(_))));
        assert!(matches!(decode_index(0, dim(3), 0), Err(Error::Domain(_))));
    }

    #[test]
    fn round_trip_exhaustive() {
        for d in 2..=10 {
            for n in 1..=8 {
                let Some(len) = dim(d).checked_pow(n) else {
                    continue;
                };
                if len > 10_000 {
                    continue;
                }
                for i in 0..len {
                    let x = decode_index(i, dim(d), n).unwrap();
                    assert_eq!(encode_digits(x.digits(), dim(d)).unwrap(), i);
                }
            }
        }
    }

    #[test]
    fn digit_string_parse() {
        assert_eq!(DigitString::parse("1,2", dim(3)).unwrap(), ds(&[1, 2], 3));
        assert_eq!(
            DigitString::parse(" 1 , 0 ", dim(2)).unwrap(),
            ds(&[1, 0], 2)
        );
        assert!(DigitString::parse("1,3", dim(3)).is_err());
        assert!(DigitString::parse("", dim(3)).is_err());
        assert!(DigitString::parse("1,,2", dim(3)).is_err());
        assert!(DigitString::parse("-1", dim(3)).is_err());
    }

    #[test]
    fn digit_string_serializes_as_array() {
        assert_eq!(
            serde_json::to_string(&ds(&[4, 0, 3], 5)).unwrap(),
            "[4,0,3]"
        );
    }

    #[test]
    fn inner_product_examples() {
        let zero2 = basis_state(&ds(&[0], 2)).unwrap();
        assert_eq!(inner_product(&zero2, &zero2).unwrap(), c(1.0, 0.0));
        let zero3 = basis_state(&ds(&[0], 3)).unwrap();
        let one3 = basis_state(&ds(&[1], 3)).unwrap();
        assert_eq!(inner_product(&zero3, &one3).unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn inner_product_rejects_shape_mismatch() {
        let a = basis_state(&ds(&[0], 3)).unwrap();
        let b = basis_state(&ds(&[0, 0], 3)).unwrap();
        let e = basis_state(&ds(&[0], 2)).unwrap();
        assert!(matches!(inner_product(&a, &b), Err(Error::Domain(_))));
        assert!(matches!(inner_product(&a, &e), Err(Error::Domain(_))));
    }

    #[test]
    fn tensor_examples() {
        let zero = basis_state(&ds(&[0], 2)).unwrap();
        let one = basis_state(&ds(&[1], 2)).unwrap();
        let t = tensor(&zero, &one).unwrap();
        assert_eq!(t.qudits(), 2);
        assert_eq!(
            t.amplitudes(),
            &[c(0., 0.), c(1., 0.), c(0., 0.), c(0., 0.)]
        );

        let h = std::f64::consts::FRAC_1_SQRT_2;
        let plus = Statevector::from_amplitudes(dim(2), 1, vec![c(h, 0.), c(h, 0.)]).unwrap();
        let t = tensor(&plus, &zero).unwrap();
        assert_eq!(t.amplitudes(), &[c(h, 0.), c(0., 0.), c(h, 0.), c(0., 0.)]);

        let t = tensor(
            &basis_state(&ds(&[2], 3)).unwrap(),
            &basis_state(&ds(&[1], 3)).unwrap(),
        )
        .unwrap();
        assert_eq!(t.amplitude(7), c(1., 0.));
        assert!((t.norm_sqr() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn tensor_capacity_error() {
        // 5000^2 amplitudes exceed the default 2^24 budget.
        let a = basis_state(&ds(&[0], 5000)).unwrap();
        let b = basis_state(&ds(&[1], 5000)).unwrap();
        assert!(matches!(tensor(&a, &b), Err(Error::Capacity { .. })));
    }

    #[test]
    fn basis_state_examples() {
        let s = basis_state(&ds(&[0, 0, 0], 2)).unwrap();
        assert_eq!(s.len(), 8);
        assert_eq!(s.amplitude(0), c(1., 0.));
        for d in 2..=9 {
            let s = basis_state(&ds(&[d - 1], d)).unwrap();
            assert_eq!(s.amplitude(d - 1), c(1., 0.));
            assert_eq!(s.norm_sqr(), 1.0);
        }
        assert_eq!(
            basis_state(&ds(&[1, 2], 3)).unwrap().amplitude(5),
            c(1., 0.)
        );
    }

    #[test]
    fn basis_state_over_budget() {
        let x = DigitString::zeros(40, dim(2)).unwrap();
        assert!(matches!(basis_state(&x), Err(Error::Capacity { .. })));
    }

    #[test]
    fn omega_reduces_exponent() {
        let d = dim(7);
        for m in -30..30 {
            let direct = Complex64::from_polar(1.0, TAU * m as f64 / 7.0);
            assert!((d.omega_pow(m) - direct).norm() < 1e-13);
        }
        assert_eq!(d.omega_pow(0), c(1.0, 0.0));
        assert_eq!(d.omega_pow(7_000_000), c(1.0, 0.0));
        assert_eq!(dim(2).omega_pow(1), c(-1.0, 0.0));
        assert_eq!(dim(4).omega_pow(1), c(0.0, 1.0));
        assert_eq!(dim(8).omega_pow(-2), c(0.0, -1.0));
    }

    fn arb_pair() -> impl Strategy<Value = (Statevector, Statevector, Statevector)> {
        (2usize..=4, 1usize..=3, 1usize..=2).prop_flat_map(|(d, ka, kb)| {
            let la = d.pow(ka as u32);
            let lb = d.pow(kb as u32);
            let amp = || (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(re, im)| Complex64::new(re, im));
            (
                prop::collection::vec(amp(), la),
                prop::collection::vec(amp(), la),
                prop::collection::vec(amp(), lb),
            )
                .prop_map(move |(a, b, e)| {
                    let dm = Dimension::new(d).unwrap();
                    (
                        Statevector::from_amplitudes(dm, ka, a).unwrap(),
                        Statevector::from_amplitudes(dm, ka, b).unwrap(),
                        Statevector::from_amplitudes(dm, kb, e).unwrap(),
                    )
                })
        })
    }

    proptest! {
        #[test]
        fn conjugate_symmetry((a, b, _) in arb_pair()) {
            let ab = inner_product(&a, &b).unwrap();
            let ba = inner_product(&b, &a).unwrap();
            prop_assert!((ab - ba.conj()).norm() <= 1e-12);
        }

        #[test]
        fn self_inner_product_is_real((a, _, _) in arb_pair()) {
            let aa = inner_product(&a, &a).unwrap();
            prop_assert!(aa.im.abs() <= 1e-12);
            prop_assert!(aa.re >= 0.0);
        }

        #[test]
        fn tensor_norm_is_multiplicative((a, _, e) in arb_pair()) {
            let t = tensor(&a, &e).unwrap();
            let lhs = t.norm_sqr().sqrt();
            let rhs = a.norm_sqr().sqrt() * e.norm_sqr().sqrt();
            prop_assert!((lhs - rhs).abs() <= 1e-12);
        }
    }
}

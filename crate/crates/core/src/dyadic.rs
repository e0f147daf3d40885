//! The dyadic roof function on the two-sided 0/1 shift.
//!
//! For a sequence `x` let `i0 > 0` and `i1 >= 0` be the smallest indices
//! with `x_{-i0} = x_{i1} = 1`; when either side is identically zero,
//! `zeta(x) = 1`. Otherwise the approximants are
//!
//! ```text
//! alpha_m(x) = (log2 l - log2 k) / (i0 + i1),   m > i0,
//! l = sum_{i=0}^{m+i1} x_{i-m} 2^i,   k = sum_{i=0}^{m-i0} x_{i-m} 2^i,
//! ```
//!
//! and `zeta = lim alpha_m`. The bits strictly between `-i0` and `i1` vanish,
//! so `l = k + 2^(m+i1)` and, with `N = i0 + i1` and
//! `c = 2^(m-i0) / k` in `[1/2, 1]`,
//!
//! ```text
//! alpha_m = 1 + log2(c + 2^-N) / N.
//! ```
//!
//! Hence `alpha_m` and `zeta` lie in `[log2(5)/3, log2 3]`. The upper end is
//! attained with `N = 1, c = 1` (`x_{-1} = x_0 = 1`, zeros further left);
//! the lower end with `N = 3, c = 1/2`. Values below one occur whenever
//! `N >= 2` and `c` is close to `1/2`.
//!
//! Cauchy estimate: `alpha_{m+u} - alpha_m` lies in
//! `[-log2(1 + 1/k) / N, 0]` and `k >= 2^(m-i0)`, so
//! `|zeta - alpha_m| <= 2^(i0-m) / (N ln 2)`.
//!
//! Sequences that are eventually zero on one side but not identically zero
//! there follow the `alpha_m` limit like every other sequence.

use crate::error::{Result, TrakError};
use crate::par::Execution;
use crate::thermo::{ln_big, ExactSum};
use num_bigint::BigUint;
use serde::Serialize;
use std::collections::BTreeMap;
use std::f64::consts::LN_2;
use std::fmt;
use std::str::FromStr;

/// A two-sided 0/1 sequence: explicit bits in a finite window, constant
/// tails elsewhere. Indices below zero default to `default_left`, the others
/// to `default_right`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BitSequence {
    /// Only entries that differ from the default of their side.
    window: BTreeMap<i64, bool>,
    pub default_left: bool,
    pub default_right: bool,
}

impl BitSequence {
    pub fn new(default_left: bool, default_right: bool) -> Self {
        Self {
            window: BTreeMap::new(),
            default_left,
            default_right,
        }
    }

    /// Zero tails with ones at `ones`.
    pub fn from_ones(ones: impl IntoIterator<Item = i64>) -> Self {
        let mut x = Self::new(false, false);
        for i in ones {
            x.set(i, true);
        }
        x
    }

    fn default_at(&self, i: i64) -> bool {
        if i < 0 {
            self.default_left
        } else {
            self.default_right
        }
    }

    pub fn get(&self, i: i64) -> bool {
        self.window.get(&i).copied().unwrap_or_else(|| self.default_at(i))
    }

    pub fn set(&mut self, i: i64, bit: bool) {
        if bit == self.default_at(i) {
            self.window.remove(&i);
        } else {
            self.window.insert(i, bit);
        }
    }

    /// Indices whose bit differs from the default of their side.
    pub fn exceptions(&self) -> impl Iterator<Item = (i64, bool)> + '_ {
        self.window.iter().map(|(&i, &b)| (i, b))
    }

    /// `y_i = x_{i+s}`.
    pub fn shift(&self, s: i64) -> Self {
        let mut y = Self::new(self.default_left, self.default_right);
        // Positions that change side take their old bit explicitly.
        let (lo, hi) = if s >= 0 { (-s, 0) } else { (0, -s) };
        for i in lo..hi {
            y.set(i, self.get(i + s));
        }
        for (&i, &b) in &self.window {
            let j = i - s;
            if !(lo..hi).contains(&j) {
                y.set(j, b);
            }
        }
        y
    }

    /// Smallest `t >= from` with `x_t = 1`.
    pub fn first_one_from(&self, from: i64) -> Option<i64> {
        let last = self.window.keys().next_back().copied().unwrap_or(0);
        let bound = from.max(last + 1).max(0);
        (from..bound)
            .find(|&t| self.get(t))
            .or_else(|| self.default_right.then_some(bound))
    }

    /// Largest `t < before` with `x_t = 1`.
    pub fn last_one_before(&self, before: i64) -> Option<i64> {
        let first = self.window.keys().next().copied().unwrap_or(-1);
        let bound = (before - 1).min(first - 1).min(-1);
        ((bound + 1)..before)
            .rev()
            .find(|&t| self.get(t))
            .or_else(|| self.default_left.then_some(bound))
    }

    /// `(i0, i1)`, or `None` when one side is identically zero.
    pub fn anchors(&self) -> Option<(u64, u64)> {
        let left = self.last_one_before(0)?;
        let right = self.first_one_from(0)?;
        Some(((-left) as u64, right as u64))
    }
}

/// Text form `L(b_{-k}...b_{-1}.b_0...b_r)R`: the tail defaults outside the
/// parentheses, the window inside with the point before index zero.
impl fmt::Display for BitSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lo = self.window.keys().next().copied().unwrap_or(0).min(0);
        let hi = self.window.keys().next_back().copied().unwrap_or(-1).max(-1);
        let bit = |b: bool| if b { '1' } else { '0' };
        write!(f, "{}(", bit(self.default_left))?;
        for i in lo..=hi {
            if i == 0 {
                write!(f, ".")?;
            }
            write!(f, "{}", bit(self.get(i)))?;
        }
        if hi < 0 {
            write!(f, ".")?;
        }
        write!(f, "){}", bit(self.default_right))
    }
}

impl FromStr for BitSequence {
    type Err = TrakError;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || TrakError::Syntax {
            line: 1,
            column: 1,
            message: format!("bit sequence {s:?}: expected L(bits.bits)R"),
        };
        let s = s.trim();
        let bytes = s.as_bytes();
        if bytes.len() < 5 || bytes[1] != b'(' || bytes[bytes.len() - 2] != b')' {
            return Err(bad());
        }
        let bit = |c: u8| match c {
            b'0' => Ok(false),
            b'1' => Ok(true),
            _ => Err(bad()),
        };
        let mut x = Self::new(bit(bytes[0])?, bit(bytes[bytes.len() - 1])?);
        let inner = &s[2..s.len() - 2];
        let (left, right) = inner.split_once('.').ok_or_else(bad)?;
        for (k, c) in left.bytes().rev().enumerate() {
            x.set(-(k as i64) - 1, bit(c)?);
        }
        for (k, c) in right.bytes().enumerate() {
            x.set(k as i64, bit(c)?);
        }
        Ok(x)
    }
}

/// `log2` of a positive big integer.
pub fn log2_big(x: &BigUint) -> f64 {
    ln_big(x) / LN_2
}

/// The approximant `alpha_m` with its exact integers.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Alpha {
    pub m: u64,
    pub l: BigUint,
    pub k: BigUint,
    /// `i0 + i1`.
    pub denominator: u64,
    pub value: f64,
}

/// `alpha_m(x)`; needs ones on both sides and `m > i0`.
pub fn alpha_m(x: &BitSequence, m: u64) -> Result<Alpha> {
    let (i0, i1) = x
        .anchors()
        .ok_or_else(|| TrakError::Precondition("alpha_m needs a one on each side of index zero".into()))?;
    if m <= i0 {
        return Err(TrakError::OutOfRange(format!("alpha_m needs m > i0 = {i0}, got {m}")));
    }
    let mi = m as i64;
    let digits = |top: u64| {
        let mut v = BigUint::default();
        for i in 0..=top {
            if x.get(i as i64 - mi) {
                v.set_bit(i, true);
            }
        }
        v
    };
    let l = digits(m + i1);
    let k = digits(m - i0);
    let denominator = i0 + i1;
    let value = (log2_big(&l) - log2_big(&k)) / denominator as f64;
    Ok(Alpha {
        m,
        l,
        k,
        denominator,
        value,
    })
}

/// A value of `zeta` with a certified error bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DyadicValue {
    pub value: f64,
    pub error_bound: f64,
}

/// Smallest value of `zeta`, `log2(5) / 3`.
pub fn zeta_min() -> f64 {
    5f64.log2() / 3.0
}

/// Largest value of `zeta`, `log2 3`.
pub fn zeta_max() -> f64 {
    3f64.log2()
}

/// Rounding allowance for a handful of `log2` evaluations.
const ROUNDING: f64 = 8.0 * f64::EPSILON;
const MAX_EXTRA_DIGITS: u64 = 200;

/// Cauchy bound on `|zeta - alpha_m|` once `m - i0 = extra`.
fn cauchy_bound(extra: u64, n: u64) -> f64 {
    2f64.powi(-(extra as i32)) / (n as f64 * LN_2)
}

/// `zeta(x)` to within `tol`: exactly one on zero tails, otherwise the first
/// `alpha_m` whose Cauchy bound is at most `tol`.
pub fn zeta(x: &BitSequence, tol: f64) -> DyadicValue {
    assert!(tol > 0.0, "tolerance must be positive");
    let Some((i0, i1)) = x.anchors() else {
        return DyadicValue {
            value: 1.0,
            error_bound: 0.0,
        };
    };
    let n = i0 + i1;
    let extra = (1..=MAX_EXTRA_DIGITS)
        .find(|&e| cauchy_bound(e, n) <= tol)
        .unwrap_or(MAX_EXTRA_DIGITS);
    let a = alpha_m(x, i0 + extra).expect("anchors exist and m > i0");
    DyadicValue {
        value: a.value,
        error_bound: cauchy_bound(extra, n) + ROUNDING * a.value,
    }
}

/// Tolerance used by [`zeta_n`].
pub const ZETA_N_TOLERANCE: f64 = 1e-14;

/// Birkhoff sum `sum_{s<n} zeta(shift^s x)`.
pub fn zeta_n(x: &BitSequence, n: u64) -> f64 {
    (0..n as i64).map(|s| zeta(&x.shift(s), ZETA_N_TOLERANCE).value).sum()
}

/// `sum_{i=2^j}^{2^(j+1)-1} 1/i`, summed from the small terms up.
pub fn harmonic_block(j: u32) -> f64 {
    let lo = 1u64 << j;
    (lo..2 * lo).rev().map(|i| 1.0 / i as f64).sum()
}

/// `sum_{j<n} harmonic_block(j) 2^-(n-j)`, the upper bound on `Z_n(zeta)`
/// obtained by telescoping `zeta_n >= log2 p + n - j` over cylinders.
pub fn harmonic_bound(n: u32) -> f64 {
    (0..n).map(|j| harmonic_block(j) * 2f64.powi(j as i32 - n as i32)).sum()
}

/// Largest supported cylinder length.
pub const MAX_PRESSURE_N: u32 = 24;

/// Bounds on `Z_n = sum over n-cylinders of max 2^-zeta_n`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DyadicPressure {
    pub n: u32,
    pub z_lower: f64,
    pub z_upper: f64,
    /// `log2(Z) / n` for each bound.
    pub rate_lower: f64,
    pub rate_upper: f64,
    pub harmonic_bound: f64,
}

/// The minimum of `zeta_n` over completions of one cylinder.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CylinderMin {
    /// Certified lower bound on the infimum.
    pub certified: f64,
    /// `zeta_n` of the completion described by `a` and `first_right`.
    pub attained: f64,
    /// The left tail is `x_{-a} = x_{-a-1} = ... = 1` with zeros above.
    pub a: u32,
    /// Index of the first right-tail one at or beyond `n`, if any.
    pub first_right: Option<u64>,
}

/// `min zeta_n` over completions of the cylinder `p` of length `n`
/// (`x_i` is bit `i` of `p`).
///
/// Given the position `-a` of the first left one, every term decreases as
/// the left tail gains weight, so that tail is all ones; for `a >= 3` every
/// term is nondecreasing in `a`, leaving `a` in `{1, 2, 3}`. The right tail
/// enters only through its first one, which gives every term after the top
/// cylinder bit the same `N` and the same `c`; that one-dimensional minimum
/// is scanned until `2^-N` is negligible against `1 - c`, and the remaining
/// range is bounded by `log2(c) / N`.
pub fn cylinder_min(p: u64, n: u32) -> CylinderMin {
    assert!((1..=63).contains(&n) && p >> n == 0, "cylinder index out of range");
    let top = (p != 0).then(|| 63 - p.leading_zeros());
    let mut best = CylinderMin {
        certified: f64::INFINITY,
        attained: f64::INFINITY,
        a: 1,
        first_right: None,
    };
    for a in 1..=3u32 {
        let tail = 2f64.powi(1 - a as i32);
        let mut lead = 0.0;
        if let Some(j) = top {
            for s in 0..=j {
                let i1 = (p >> s).trailing_zeros();
                let below = p & ((1u64 << s) - 1);
                let i0 = if below == 0 {
                    s + a
                } else {
                    s - (63 - below.leading_zeros())
                };
                let ratio = 2f64.powi((i1 + s) as i32) / (below as f64 + tail);
                lead += (1.0 + ratio).log2() / (i0 + i1) as f64;
            }
        }
        // Every later term has the same N = n0 + (first right one - n).
        let (count, c, n0) = match top {
            Some(j) => (n - 1 - j, 2f64.powi(j as i32) / (p as f64 + tail), n - j),
            None => (n, 0.5, n + a),
        };
        let f = |nn: u32| (c + 2f64.powi(-(nn as i32))).log2() / nn as f64;
        let (mut scan, mut arg) = (0.0f64, None);
        let mut nn = n0;
        loop {
            let v = f(nn);
            if v < scan {
                scan = v;
                arg = Some(nn);
            }
            if 2f64.powi(-(nn as i32)) <= (1.0 - c) * 2f64.powi(-60) || nn >= n0 + 400 {
                break;
            }
            nn += 1;
        }
        let tail_bound = c.log2() / nn as f64;
        let count = count as f64;
        let attained = lead + count * (1.0 + scan);
        best.certified = best.certified.min(lead + count * (1.0 + scan.min(tail_bound)));
        if attained < best.attained {
            best.attained = attained;
            best.a = a;
            best.first_right = if count > 0.0 {
                arg.map(|nn| u64::from(n + nn - n0))
            } else {
                None
            };
        }
    }
    best
}

/// The cylinder `p` of length `n` completed by the left tail of ones from
/// `-a` and a single right one at `first_right`.
pub fn completion(p: u64, n: u32, a: u32, first_right: Option<u64>) -> BitSequence {
    let mut x = BitSequence::new(true, false);
    for i in 1..a as i64 {
        x.set(-i, false);
    }
    for i in 0..n {
        x.set(i as i64, (p >> i) & 1 == 1);
    }
    if let Some(r) = first_right {
        x.set(r as i64, true);
    }
    x
}

/// `sum_p 2^-zeta_n(y_p)` where `y_p` completes the cylinder `p` by ones on
/// the left and zeros on the right: the completion used to derive
/// [`harmonic_bound`]. It is not the minimizing completion in general.
pub fn ones_zeros_sum(n: u32) -> f64 {
    let mut z = ExactSum::default();
    for p in 0..(1u64 << n) {
        z.add(2f64.powf(-zeta_n(&completion(p, n, 1, None), u64::from(n))));
    }
    z.value()
}

const CHUNK: u64 = 1 << 12;

/// Two-sided bounds on `Z_n(zeta)` over all `2^n` cylinders.
pub fn dyadic_pressure(n: u32, exec: Execution) -> Result<DyadicPressure> {
    if !(1..=MAX_PRESSURE_N).contains(&n) {
        return Err(TrakError::OutOfRange(format!(
            "dyadic pressure needs 1 <= n <= {MAX_PRESSURE_N}, got {n}"
        )));
    }
    let total = 1u64 << n;
    let chunks = total.div_ceil(CHUNK) as usize;
    let parts = exec.map_range(chunks, |c| {
        let mut lo = ExactSum::default();
        let mut hi = ExactSum::default();
        let start = c as u64 * CHUNK;
        for p in start..(start + CHUNK).min(total) {
            let m = cylinder_min(p, n);
            hi.add(2f64.powf(-m.certified));
            lo.add(2f64.powf(-m.attained));
        }
        (lo, hi)
    });
    let mut lo = ExactSum::default();
    let mut hi = ExactSum::default();
    for (a, b) in &parts {
        lo.merge(a);
        hi.merge(b);
    }
    let rate = |z: &ExactSum| z.ln() / LN_2 / n as f64;
    Ok(DyadicPressure {
        n,
        z_lower: lo.value(),
        z_upper: hi.value(),
        rate_lower: rate(&lo),
        rate_upper: rate(&hi),
        harmonic_bound: harmonic_bound(n),
    })
}

//! Roof bounds, Birkhoff sums, pressure sums, variation decay, contraction
//! of carried measures and Gibbs windows over a subshift.
//!
//! The roof of a sequence `x` is `rho(x) = log(|T nu| / |nu|)` where `T` is
//! the carrying matrix of the first transition and `nu` the measure on the
//! next track selected by the future. On a finite cylinder `nu` ranges over
//! the image of the measure cone of the last track, so `rho` is only known up
//! to an interval. That image is spanned by the images of the last track's
//! vertex cycles and `rho` is a linear-fractional function of `nu`, so both
//! ends of the interval are attained at vertex cycles and are computed
//! exactly. Birkhoff sums telescope to `log(|M c| / |c|)` for the composite
//! matrix `M` of the whole cylinder.

use crate::error::{Result, TrakError};
use crate::linalg::Q;
use crate::moves::CarryingMatrix;
use crate::par::Execution;
use crate::perron::{perron_root, SparseMatrix};
use crate::symbolic::{is_primitive_word, Subshift};
use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use serde::Serialize;

/// `1^T T_{01} T_{12} ...` along an admissible word, exactly.
pub fn weight_row(s: &Subshift, w: &[usize]) -> Result<Vec<BigUint>> {
    s.check_word(w)?;
    let mut r = vec![BigUint::one(); s.branch_count];
    for p in w.windows(2) {
        r = row_times(&r, &s.transition(p[0], p[1]).expect("checked").matrix);
    }
    Ok(r)
}

fn row_times(r: &[BigUint], m: &CarryingMatrix) -> Vec<BigUint> {
    let mut out = vec![BigUint::zero(); m.cols];
    for (i, x) in r.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, &a) in m.row(i).iter().enumerate() {
            if a != 0 {
                out[j] += x * a;
            }
        }
    }
    out
}

fn dot(r: &[BigUint], c: &[u64]) -> BigUint {
    r.iter().zip(c).filter(|(_, &y)| y != 0).map(|(x, &y)| x * y).sum()
}

fn ratio(a: BigUint, b: BigUint) -> Q {
    Q::new(BigInt::from(a), BigInt::from(b))
}

/// Natural logarithm of a positive rational, accurate for values near one.
pub fn ln_q(x: &Q) -> f64 {
    let one = Q::one();
    let eps = x - &one;
    if eps.abs() < Q::new(BigInt::one(), BigInt::from(4)) {
        return eps.to_f64().unwrap_or(0.0).ln_1p();
    }
    ln_big(x.numer().magnitude()) - ln_big(x.denom().magnitude())
}

/// Natural logarithm of a positive big integer.
pub fn ln_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 64;
    (x >> shift).to_f64().expect("64 bits fit").ln() + shift as f64 * std::f64::consts::LN_2
}

/// An interval of values with exact endpoints `exp(lower) = lower_ratio`
/// and `exp(upper) = upper_ratio`.
#[derive(Clone, Debug, PartialEq)]
pub struct RoofBounds {
    pub lower: f64,
    pub upper: f64,
    pub lower_ratio: Q,
    pub upper_ratio: Q,
}

impl RoofBounds {
    fn from_ratios(ratios: Vec<Q>) -> Self {
        let lo = ratios.iter().min().expect("vertex cycles exist").clone();
        let hi = ratios.iter().max().expect("vertex cycles exist").clone();
        Self {
            lower: ln_q(&lo),
            upper: ln_q(&hi),
            lower_ratio: lo,
            upper_ratio: hi,
        }
    }

    /// `upper - lower`, computed from the exact ratio so tiny widths keep
    /// their precision.
    pub fn width(&self) -> f64 {
        ln_q(&(&self.upper_ratio / &self.lower_ratio))
    }

    pub fn contains(&self, other: &Self) -> bool {
        self.lower_ratio <= other.lower_ratio && other.upper_ratio <= self.upper_ratio
    }
}

fn vertex_cycles(s: &Subshift, letter: usize) -> Result<&[Vec<u64>]> {
    let vc = &s.letters[letter].vertex_cycles;
    if vc.is_empty() {
        return Err(TrakError::Precondition(format!(
            "letter {letter} has an empty measure cone"
        )));
    }
    Ok(vc)
}

/// Range of `rho` on the cylinder of `w` (at least two letters).
pub fn roof_bounds(s: &Subshift, w: &[usize]) -> Result<RoofBounds> {
    if w.len() < 2 {
        return Err(TrakError::Precondition("roof bounds need at least two letters".into()));
    }
    let r0 = weight_row(s, w)?;
    let r1 = weight_row(s, &w[1..])?;
    let mut ratios = Vec::new();
    for c in vertex_cycles(s, *w.last().expect("nonempty"))? {
        let den = dot(&r1, c);
        if den.is_zero() {
            return Err(TrakError::Precondition("zero column in a carrying matrix".into()));
        }
        ratios.push(ratio(dot(&r0, c), den));
    }
    Ok(RoofBounds::from_ratios(ratios))
}

/// Range of the Birkhoff sum of `rho` over the first `w.len() - 1` shifts on
/// the cylinder of `w`.
pub fn birkhoff_bounds(s: &Subshift, w: &[usize]) -> Result<RoofBounds> {
    let r = weight_row(s, w)?;
    let ratios = vertex_cycles(s, *w.last().expect("nonempty"))?
        .iter()
        .map(|c| ratio(dot(&r, c), c.iter().map(|&x| BigUint::from(x)).sum()))
        .collect();
    Ok(RoofBounds::from_ratios(ratios))
}

/// For a tight word: every normalized measure on the last track pushes to
/// total weight at least `(p + 1) / p` on the first. Checked exactly on
/// vertex cycles, which suffices by linearity.
pub fn tight_weight_bound_holds(s: &Subshift, w: &[usize]) -> Result<bool> {
    if !s.is_tight(w)? {
        return Err(TrakError::NotTight);
    }
    let p = s.branch_count as u64;
    let r = weight_row(s, w)?;
    Ok(vertex_cycles(s, *w.last().expect("nonempty"))?.iter().all(|c| {
        let total: BigUint = c.iter().map(|&x| BigUint::from(x)).sum();
        dot(&r, c) * p >= total * (p + 1)
    }))
}

/// Birkhoff-sum bounds of every cylinder with `n + 1` letters, in
/// lexicographic order of the words.
#[derive(Clone, Debug, PartialEq)]
pub struct BirkhoffTable {
    pub n: usize,
    pub bounds: Vec<(f64, f64)>,
}

/// Default guard on the number of enumerated cylinders.
pub const CYLINDER_GUARD: u64 = 10_000_000;

/// Enumerates all cylinders with `n + 1` letters. Fails without partial
/// output when there are more than `guard`.
pub fn birkhoff_table(s: &Subshift, n: usize, guard: u64, exec: Execution) -> Result<BirkhoffTable> {
    require_closed(s)?;
    let count = s.total_words(n);
    if count > BigUint::from(guard) {
        return Err(TrakError::BudgetExceeded(format!(
            "{count} cylinders exceed the guard of {guard}"
        )));
    }
    let per_start: Vec<Result<Vec<(f64, f64)>>> = exec.map_range(s.len(), |x| {
        let mut out = Vec::new();
        let start = vec![BigUint::one(); s.branch_count];
        let mut stack = vec![(vec![x], start)];
        while let Some((w, r)) = stack.pop() {
            let last = *w.last().expect("nonempty");
            if w.len() == n + 1 {
                let mut lo = f64::INFINITY;
                let mut hi = f64::NEG_INFINITY;
                for c in vertex_cycles(s, last)? {
                    let v = ln_big(&dot(&r, c)) - c.iter().map(|&x| x as f64).sum::<f64>().ln();
                    lo = lo.min(v);
                    hi = hi.max(v);
                }
                out.push((lo.max(0.0), hi));
                continue;
            }
            for &y in s.successors(last).iter().rev() {
                let mut w2 = w.clone();
                w2.push(y);
                let r2 = row_times(&r, &s.transition(last, y).expect("edge").matrix);
                stack.push((w2, r2));
            }
        }
        Ok(out)
    });
    let mut bounds = Vec::new();
    for part in per_start {
        bounds.extend(part?);
    }
    Ok(BirkhoffTable { n, bounds })
}

fn require_closed(s: &Subshift) -> Result<()> {
    if s.closed {
        Ok(())
    } else {
        Err(TrakError::NotClosed)
    }
}

/// Exact sum of nonnegative doubles, independent of summation order.
#[derive(Clone, Debug, Default)]
pub struct ExactSum {
    acc: BigUint,
}

/// Doubles are integers after scaling by `2^1074`.
const SCALE: i64 = 1074;

impl ExactSum {
    pub fn add(&mut self, x: f64) {
        assert!(x >= 0.0 && x.is_finite(), "nonnegative finite summand");
        if x == 0.0 {
            return;
        }
        let bits = x.to_bits();
        let exp = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (mant, e) = if exp == 0 {
            (frac, -1074)
        } else {
            (frac | (1 << 52), exp - 1075)
        };
        self.acc += BigUint::from(mant) << (e + SCALE) as u64;
    }

    pub fn merge(&mut self, other: &ExactSum) {
        self.acc += &other.acc;
    }

    /// Natural logarithm of the sum; `-inf` when it is zero.
    pub fn ln(&self) -> f64 {
        if self.acc.is_zero() {
            return f64::NEG_INFINITY;
        }
        ln_big(&self.acc) - SCALE as f64 * std::f64::consts::LN_2
    }

    /// The sum rounded to a double; exact whenever it is representable.
    pub fn value(&self) -> f64 {
        let shift = self.acc.bits().saturating_sub(64);
        let mant = (&self.acc >> shift).to_f64().expect("64 bits fit");
        // Split the power of two so neither factor leaves the normal range.
        let e = shift as i32 - SCALE as i32;
        mant * 2f64.powi(e / 2) * 2f64.powi(e - e / 2)
    }
}

/// Two-sided estimate of `Z_n(-s rho)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PressureEstimate {
    pub n: usize,
    pub s: f64,
    pub z_lower: f64,
    pub z_upper: f64,
    pub rate_lower: f64,
    pub rate_upper: f64,
}

/// `Z_n` bounds from a Birkhoff table: each cylinder contributes
/// `exp(-s S)` with `S` anywhere in its interval.
pub fn pressure_from_table(table: &BirkhoffTable, s_val: f64) -> PressureEstimate {
    let mut lo = ExactSum::default();
    let mut hi = ExactSum::default();
    for &(a, b) in &table.bounds {
        let (x, y) = ((-s_val * a).exp(), (-s_val * b).exp());
        lo.add(x.min(y));
        hi.add(x.max(y));
    }
    let n = table.n as f64;
    PressureEstimate {
        n: table.n,
        s: s_val,
        z_lower: lo.value(),
        z_upper: hi.value(),
        rate_lower: lo.ln() / n,
        rate_upper: hi.ln() / n,
    }
}

/// Pressure sum at multiplier `s_val` over cylinders with `n + 1` letters.
/// At `s_val = 0` the sum is the exact word count.
pub fn pressure(s: &Subshift, s_val: f64, n: usize, guard: u64, exec: Execution) -> Result<PressureEstimate> {
    require_closed(s)?;
    if n == 0 {
        return Err(TrakError::OutOfRange("pressure sums need n >= 1".into()));
    }
    if s_val == 0.0 {
        let z = s.total_words(n);
        let r = ln_big(&z) / n as f64;
        let zf = z.to_f64().unwrap_or(f64::INFINITY);
        return Ok(PressureEstimate {
            n,
            s: 0.0,
            z_lower: zf,
            z_upper: zf,
            rate_lower: r,
            rate_upper: r,
        });
    }
    Ok(pressure_from_table(&birkhoff_table(s, n, guard, exec)?, s_val))
}

/// Bisection bracket for the multiplier `s*` where the pressure rate crosses
/// zero. Each side is present only when the corresponding bound of `Z_n`
/// actually crosses one inside the search interval.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ZeroBracket {
    /// Largest multiplier found with `Z_lower >= 1`, so `s* >= s_lo`.
    pub s_lo: Option<f64>,
    /// Smallest multiplier found with `Z_upper <= 1`, so `s* <= s_hi`.
    pub s_hi: Option<f64>,
}

/// Brackets the zero of the pressure rate over `[lo, hi]`. Cylinders whose
/// Birkhoff lower bound is zero keep `Z_upper` above one for every
/// multiplier; the upper side is then absent.
pub fn pressure_zero(table: &BirkhoffTable, lo: f64, hi: f64, iters: usize) -> ZeroBracket {
    let lower_ok = |s: f64| pressure_from_table(table, s).z_lower >= 1.0;
    let upper_ok = |s: f64| pressure_from_table(table, s).z_upper <= 1.0;
    let bisect = |f: &dyn Fn(f64) -> bool, want: bool| {
        // Invariant: f(a) == want and f(b) != want.
        let (mut a, mut b) = (lo, hi);
        for _ in 0..iters {
            let m = 0.5 * (a + b);
            if f(m) == want {
                a = m;
            } else {
                b = m;
            }
        }
        (a, b)
    };
    let s_lo = match (lower_ok(lo), lower_ok(hi)) {
        (true, true) => Some(hi),
        (true, false) => Some(bisect(&lower_ok, true).0),
        _ => None,
    };
    let s_hi = match (upper_ok(lo), upper_ok(hi)) {
        (true, _) => Some(lo),
        (false, true) => Some(bisect(&upper_ok, false).1),
        _ => None,
    };
    ZeroBracket { s_lo, s_hi }
}

/// Upper bounds on `var_n(rho)` with a geometric fit of the tail.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VariationProfile {
    /// `var[k]` bounds `var_{k+1}`.
    pub var: Vec<f64>,
    pub theta: f64,
    pub r_squared: f64,
    pub partial_sums: Vec<f64>,
}

/// `var_n` bounded by the widest roof interval over cylinders with `n`
/// letters, for `n = 1..=n_max`; one-letter cylinders take the hull over
/// their two-letter extensions.
pub fn variation_profile(s: &Subshift, n_max: usize, budget: usize, exec: Execution) -> Result<VariationProfile> {
    require_closed(s)?;
    if !(1..=20).contains(&n_max) {
        return Err(TrakError::OutOfRange("n_max must lie in 1..=20".into()));
    }
    let mut var = Vec::new();
    for n in 1..=n_max {
        let words = s.words(n.max(2), budget)?;
        let bounds: Vec<Result<RoofBounds>> = exec.map(&words, |w| roof_bounds(s, w));
        let v = if n == 1 {
            let mut hull: Vec<Option<(Q, Q)>> = vec![None; s.len()];
            for (w, b) in words.iter().zip(bounds) {
                let b = b?;
                let h = &mut hull[w[0]];
                *h = Some(match h.take() {
                    None => (b.lower_ratio, b.upper_ratio),
                    Some((lo, hi)) => (lo.min(b.lower_ratio), hi.max(b.upper_ratio)),
                });
            }
            hull.into_iter()
                .flatten()
                .map(|(lo, hi)| ln_q(&(hi / lo)))
                .fold(0.0, f64::max)
        } else {
            let mut m = 0.0f64;
            for b in bounds {
                m = m.max(b?.width());
            }
            m
        };
        var.push(v);
    }
    let (theta, r_squared) = fit_tail(&var);
    let partial_sums = var
        .iter()
        .scan(0.0, |acc, v| {
            *acc += v;
            Some(*acc)
        })
        .collect();
    Ok(VariationProfile {
        var,
        theta,
        r_squared,
        partial_sums,
    })
}

/// Least-squares fit of `log var_n = a + n log theta` over the second half
/// of the profile, skipping zeros.
fn fit_tail(var: &[f64]) -> (f64, f64) {
    let start = var.len() / 2;
    let pts: Vec<(f64, f64)> = var
        .iter()
        .enumerate()
        .skip(start)
        .filter(|(_, &v)| v > 0.0)
        .map(|(i, &v)| ((i + 1) as f64, v.ln()))
        .collect();
    let (slope, r2) = linear_fit(&pts);
    (slope.exp(), r2)
}

/// Slope and coefficient of determination of a least-squares line.
pub fn linear_fit(pts: &[(f64, f64)]) -> (f64, f64) {
    let k = pts.len() as f64;
    if pts.len() < 2 {
        return (f64::NAN, f64::NAN);
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    (slope, r2)
}

/// Random normalized measure on a track: a combination of its vertex cycles
/// with coefficients `k / 2^16`, `k` in `1..=2^16`.
pub fn random_measure<R: Rng + ?Sized>(cycles: &[Vec<u64>], rng: &mut R) -> Vec<Q> {
    let p = cycles[0].len();
    let mut m = vec![Q::zero(); p];
    for c in cycles {
        let k = Q::new(BigInt::from(rng.gen_range(1u32..=1 << 16)), BigInt::from(1u32 << 16));
        for b in 0..p {
            if c[b] != 0 {
                m[b] += &k * Q::from_integer(BigInt::from(c[b]));
            }
        }
    }
    normalize(m)
}

fn normalize(m: Vec<Q>) -> Vec<Q> {
    let t: Q = m.iter().sum();
    m.into_iter().map(|x| x / &t).collect()
}

/// `min_b min(mu_b / nu_b, nu_b / mu_b)` for positive measures.
pub fn min_ratio(mu: &[Q], nu: &[Q]) -> Q {
    mu.iter()
        .zip(nu)
        .map(|(a, b)| {
            let r = a / b;
            if r > Q::one() {
                r.recip()
            } else {
                r
            }
        })
        .min()
        .expect("nonempty")
}

/// Normalized images of two measures and their min-ratios before and after.
pub fn push_pair(m: &CarryingMatrix, mu: &[Q], nu: &[Q]) -> (Q, Q) {
    let a0 = min_ratio(mu, nu);
    let mu0 = normalize(m.apply(mu));
    let nu0 = normalize(m.apply(nu));
    (a0, min_ratio(&mu0, &nu0))
}

/// Sup-norm of a tangent at a positive base measure.
pub fn sup_norm(alpha: &[Q], base: &[Q]) -> Q {
    alpha
        .iter()
        .zip(base)
        .map(|(a, b)| a.abs() / b)
        .max()
        .expect("nonempty")
}

/// Expansion factor of the inverse branch at `nu` along `alpha`:
/// `|alpha|_nu / |DB alpha|_{B nu}` for the projectivized map `B`.
pub fn inverse_expansion(m: &CarryingMatrix, nu: &[Q], alpha: &[Q]) -> Q {
    let mn = m.apply(nu);
    let ma = m.apply(alpha);
    let total: Q = mn.iter().sum();
    let ta: Q = ma.iter().sum();
    let image = ma
        .iter()
        .zip(&mn)
        .map(|(a, b)| (a - b * &ta / &total).abs() / b)
        .max()
        .expect("nonempty");
    sup_norm(alpha, nu) / image
}

/// Whether normalized images of all measures on the last track agree on the
/// first track within a factor `sqrt 2` branchwise; checked on pairs of
/// vertex-cycle images, which bound all others.
pub fn is_weakly_tight(s: &Subshift, w: &[usize]) -> Result<bool> {
    let m = s.composite(w)?;
    if !m.is_positive() {
        return Ok(false);
    }
    let imgs: Vec<Vec<Q>> = vertex_cycles(s, *w.last().expect("nonempty"))?
        .iter()
        .map(|c| normalize(m.apply(&c.iter().map(|&x| Q::from_integer(BigInt::from(x))).collect::<Vec<_>>())))
        .collect();
    let two = Q::from_integer(BigInt::from(2));
    for a in &imgs {
        for b in &imgs {
            for (x, y) in a.iter().zip(b) {
                let r = x / y;
                if &r * &r > two {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Outcome of [`contraction_check`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ContractionReport {
    pub trials: usize,
    /// Trials with `a0 < 1` where the min-ratio failed to increase strictly.
    pub violations: usize,
    /// Trials with `a0 = 1`, where the pushed ratio must stay one.
    pub fixed_points: usize,
    /// `min (a0' - a0) / (1 - a0)` over trials with `a0 < 1`.
    pub delta_hat: f64,
    /// Minimal inverse-branch expansion of the sup-norm over trials.
    pub kappa_hat: f64,
    /// Whether every trial's expansion exceeds one exactly.
    pub kappa_above_one: bool,
}

/// Random positive measure pairs on the last track of a tight word, pushed
/// through its carrying matrix in exact arithmetic.
pub fn contraction_check<R: Rng + ?Sized>(
    s: &Subshift,
    w: &[usize],
    trials: usize,
    rng: &mut R,
) -> Result<ContractionReport> {
    let m = s.composite(w)?;
    if !m.is_positive() {
        return Err(TrakError::NotTight);
    }
    let cycles = vertex_cycles(s, *w.last().expect("nonempty"))?.to_vec();
    let mut violations = 0;
    let mut fixed_points = 0;
    let mut delta: Option<Q> = None;
    let mut kappa: Option<Q> = None;
    for _ in 0..trials {
        let mu = random_measure(&cycles, rng);
        let nu = random_measure(&cycles, rng);
        let (a0, a1) = push_pair(&m, &mu, &nu);
        if a0 == Q::one() {
            fixed_points += 1;
            if a1 != Q::one() {
                violations += 1;
            }
            continue;
        }
        if a1 <= a0 {
            violations += 1;
        }
        let d = (&a1 - &a0) / (Q::one() - &a0);
        delta = Some(delta.map_or(d.clone(), |x| x.min(d)));
        let alpha: Vec<Q> = mu.iter().zip(&nu).map(|(a, b)| a - b).collect();
        let k = inverse_expansion(&m, &nu, &alpha);
        kappa = Some(kappa.map_or(k.clone(), |x| x.min(k)));
    }
    let kappa_above_one = kappa.as_ref().is_none_or(|k| k > &Q::one());
    Ok(ContractionReport {
        trials,
        violations,
        fixed_points,
        delta_hat: delta.and_then(|d| d.to_f64()).unwrap_or(f64::NAN),
        kappa_hat: kappa.and_then(|k| k.to_f64()).unwrap_or(f64::NAN),
        kappa_above_one,
    })
}

/// The measure of maximal entropy of a transitive transition matrix:
/// `mass[x_0 .. x_n] = u_{x_0} v_{x_n} / lambda^n` with left and right
/// Perron vectors normalized by `sum u_i v_i = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct ParryMeasure {
    pub lambda: f64,
    pub left: Vec<f64>,
    pub right: Vec<f64>,
}

impl ParryMeasure {
    pub fn new(s: &Subshift) -> Result<Self> {
        if !s.is_transitive()? {
            return Err(TrakError::Precondition(
                "Parry measure needs a transitive subshift".into(),
            ));
        }
        let a = SparseMatrix::from_graph(s.graph());
        let at = SparseMatrix {
            n: a.n,
            entries: a.entries.iter().map(|&(i, j, x)| (j, i, x)).collect(),
        };
        let right = perron_root(&a)?;
        let left = perron_root(&at)?;
        let z: f64 = left.vector.iter().zip(&right.vector).map(|(u, v)| u * v).sum();
        Ok(Self {
            lambda: right.lambda,
            left: left.vector.iter().map(|u| u / z).collect(),
            right: right.vector,
        })
    }

    pub fn mass(&self, w: &[usize]) -> f64 {
        let n = w.len() as i32 - 1;
        self.left[w[0]] * self.right[*w.last().expect("nonempty")] / self.lambda.powi(n)
    }
}

/// Roof used in a Gibbs check.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Roof {
    /// `rho` replaced by a constant.
    Constant(f64),
    /// The carrying roof with interval Birkhoff sums.
    Carrying,
}

/// Outcome of [`gibbs_check`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GibbsReport {
    /// Smallest valid constant; infinite when some cylinder has mass zero.
    pub constant: f64,
    pub cylinders: usize,
    pub worst: Vec<usize>,
}

impl GibbsReport {
    pub fn holds(&self) -> bool {
        self.constant.is_finite()
    }
}

/// Relative tolerance for additivity of cylinder masses.
pub const MASS_TOLERANCE: f64 = 1e-9;

/// Smallest `c >= 1` with `c^-1 e^{-h S} <= mass <= c e^{-h S}` for every
/// cylinder with at most `l_max + 1` letters and every Birkhoff sum `S` of
/// its points.
pub fn gibbs_check<F>(s: &Subshift, h: f64, roof: Roof, mass: F, l_max: usize, budget: usize) -> Result<GibbsReport>
where
    F: Fn(&[usize]) -> f64,
{
    require_closed(s)?;
    let total: f64 = (0..s.len()).map(|i| mass(&[i])).sum();
    if (total - 1.0).abs() > MASS_TOLERANCE {
        return Err(TrakError::Precondition(format!(
            "cylinder masses sum to {total}, not one"
        )));
    }
    let mut c = 1.0f64;
    let mut worst = Vec::new();
    let mut cylinders = 0;
    for len in 1..=l_max + 1 {
        for w in s.words(len, budget)? {
            let m = mass(&w);
            if m < 0.0 {
                return Err(TrakError::InconsistentMasses(format!("negative mass on {w:?}")));
            }
            if len <= l_max {
                let children: f64 = s
                    .successors(*w.last().expect("nonempty"))
                    .iter()
                    .map(|&y| {
                        let mut x = w.clone();
                        x.push(y);
                        mass(&x)
                    })
                    .sum();
                if (children - m).abs() > MASS_TOLERANCE * m.max(1e-300).max(children) {
                    return Err(TrakError::InconsistentMasses(format!(
                        "refinement of {w:?} has mass {children}, not {m}"
                    )));
                }
            }
            let (lo, hi) = match roof {
                Roof::Constant(k) => ((len - 1) as f64 * k, (len - 1) as f64 * k),
                Roof::Carrying if len == 1 => (0.0, 0.0),
                Roof::Carrying => {
                    let b = birkhoff_bounds(s, &w)?;
                    (b.lower, b.upper)
                }
            };
            let need = if m == 0.0 {
                f64::INFINITY
            } else {
                ((-h * lo).exp() / m).max(m * (h * hi).exp())
            };
            cylinders += 1;
            if need > c {
                c = need;
                worst = w;
            }
        }
    }
    Ok(GibbsReport {
        constant: c,
        cylinders,
        worst,
    })
}

/// Periodic-orbit counts binned by translation length.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrbitTable {
    /// `(R, number of primitive cycles with log dilatation <= R)`.
    pub rows: Vec<(f64, usize)>,
    pub max_length: usize,
    pub cycles: usize,
    /// Cycles skipped because their matrix is not primitive.
    pub non_primitive: usize,
    /// Smallest translation length among cycles of word length
    /// `max_length`; counts below it are taken as complete.
    pub complete_below: f64,
    /// Slope of `log count(R)` against `R` over the bins below
    /// `complete_below`; zero with fewer than two usable bins.
    pub exponent: f64,
    /// Some word length hit the cycle budget or overflowed.
    pub truncated: bool,
}

/// Counts primitive cycles of word length at most `max_length` by
/// translation length `log lambda`, in bins of width `step` up to `r_max`.
pub fn count_orbits(s: &Subshift, r_max: f64, step: f64, max_length: usize, budget: usize) -> Result<OrbitTable> {
    require_closed(s)?;
    if !(step > 0.0 && r_max > 0.0) {
        return Err(TrakError::OutOfRange("R and step must be positive".into()));
    }
    let mut lengths = Vec::new();
    let mut non_primitive = 0;
    let mut truncated = false;
    let mut complete_below = f64::INFINITY;
    for n in 1..=max_length {
        let cycles = match s.periodic_words(n, budget) {
            Ok(c) => c,
            Err(TrakError::BudgetExceeded(_)) => {
                truncated = true;
                break;
            }
            Err(e) => return Err(e),
        };
        for w in cycles.iter().filter(|w| is_primitive_word(w)) {
            match s.dilatation(w) {
                Ok(r) => {
                    let l = r.lambda.ln();
                    if n == max_length {
                        complete_below = complete_below.min(l);
                    }
                    lengths.push(l);
                }
                Err(TrakError::NonPrimitive(_)) => non_primitive += 1,
                Err(TrakError::Overflow(_)) => truncated = true,
                Err(e) => return Err(e),
            }
        }
    }
    lengths.sort_by(f64::total_cmp);
    let bins = (r_max / step).floor() as usize;
    let rows: Vec<(f64, usize)> = (1..=bins)
        .map(|k| {
            let r = k as f64 * step;
            (r, lengths.partition_point(|&l| l <= r))
        })
        .collect();
    if truncated {
        complete_below = complete_below.min(0.0);
    }
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.1 > 0 && r.0 <= complete_below)
        .map(|&(r, c)| (r, (c as f64).ln()))
        .collect();
    Ok(OrbitTable {
        exponent: if pts.len() >= 2 { linear_fit(&pts).0 } else { 0.0 },
        complete_below,
        rows,
        max_length,
        cycles: lengths.len(),
        non_primitive,
        truncated,
    })
}

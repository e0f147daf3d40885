//! Transverse and tangential measures, recurrence and vertex cycles.
//!
//! Everything here is exact rational arithmetic.

use crate::cone;
use crate::error::{Result, TrakError};
use crate::linalg::{self, q, Q};
use crate::lp::{self, LinearSystem, Relation};
use crate::par::Execution;
use crate::track::{remove_small_branch, BranchKind, TrainTrack};
use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

/// Switch matrix: one row per switch, `+1` on the large end and `-1` on each
/// small end, accumulated per branch.
pub fn switch_matrix(t: &TrainTrack) -> Vec<Vec<i64>> {
    t.switches()
        .iter()
        .map(|s| {
            let mut row = vec![0i64; t.branch_count()];
            row[s.large.branch] += 1;
            row[s.left.branch] -= 1;
            row[s.right.branch] -= 1;
            row
        })
        .collect()
}

/// Dimension of the solution space of the switch conditions.
pub fn cone_dimension(t: &TrainTrack) -> usize {
    t.branch_count() - linalg::rank_int(&switch_matrix(t))
}

/// Nonnegative weights satisfying every switch condition.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TransverseMeasure {
    pub weights: Vec<Q>,
}

impl TransverseMeasure {
    pub fn new(weights: Vec<Q>) -> Self {
        Self { weights }
    }

    pub fn from_integers(w: &[u64]) -> Self {
        Self::new(w.iter().map(|&x| Q::from_integer(BigInt::from(x))).collect())
    }

    pub fn total(&self) -> Q {
        self.weights.iter().fold(Q::zero(), |a, b| a + b)
    }

    /// Rescaled to total weight one.
    pub fn normalized(&self) -> Self {
        let t = self.total();
        Self::new(self.weights.iter().map(|w| w / &t).collect())
    }

    pub fn is_positive(&self) -> bool {
        self.weights.iter().all(|w| w.is_positive())
    }

    /// Checks nonnegativity and every switch equality exactly.
    pub fn check(&self, t: &TrainTrack) -> Result<()> {
        if self.weights.len() != t.branch_count() {
            return Err(TrakError::InvalidMeasure(format!(
                "{} weights for {} branches",
                self.weights.len(),
                t.branch_count()
            )));
        }
        if let Some(b) = self.weights.iter().position(|w| w.is_negative()) {
            return Err(TrakError::InvalidMeasure(format!("negative weight on branch {b}")));
        }
        for (i, s) in t.switches().iter().enumerate() {
            let w = |b: usize| &self.weights[b];
            if *w(s.large.branch) != w(s.left.branch) + w(s.right.branch) {
                return Err(TrakError::InvalidMeasure(format!(
                    "switch condition fails at switch {i}"
                )));
            }
        }
        Ok(())
    }
}

/// Nonnegative weights satisfying the polygon conditions of every
/// unpunctured region.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TangentialMeasure {
    pub weights: Vec<Q>,
}

impl TangentialMeasure {
    pub fn check(&self, t: &TrainTrack) -> Result<()> {
        if self.weights.len() != t.branch_count() || self.weights.iter().any(|w| w.is_negative()) {
            return Err(TrakError::InvalidMeasure(
                "tangential weights must be nonnegative, one per branch".into(),
            ));
        }
        let mut sys = LinearSystem::new(t.branch_count());
        add_tangential_constraints(t, &mut sys);
        if sys.constraints.iter().all(|c| c.holds(&self.weights)) {
            Ok(())
        } else {
            Err(TrakError::InvalidMeasure("polygon condition fails".into()))
        }
    }
}

/// Side masses of each unpunctured region as coefficient vectors; a branch
/// met twice on one side counts twice.
pub fn side_mass_vectors(t: &TrainTrack) -> Vec<Vec<Vec<Q>>> {
    t.complementary_regions()
        .iter()
        .filter(|r| !r.punctured)
        .map(|r| {
            r.sides()
                .iter()
                .map(|side| {
                    let mut c = vec![Q::zero(); t.branch_count()];
                    for &b in side {
                        c[b] += Q::one();
                    }
                    c
                })
                .collect()
        })
        .collect()
}

fn add_tangential_constraints(t: &TrainTrack, sys: &mut LinearSystem) {
    for sides in side_mass_vectors(t) {
        let k = sides.len();
        for i in 0..k {
            let prev = &sides[(i + k - 1) % k];
            let next = &sides[(i + 1) % k];
            let coeffs: Vec<Q> = (0..t.branch_count())
                .map(|b| &sides[i][b] - &prev[b] - &next[b])
                .collect();
            sys.push(coeffs, Relation::Le, Q::zero());
        }
        for j in 0..k {
            let mut coeffs = vec![Q::zero(); t.branch_count()];
            for s in 0..k {
                let side = &sides[(j + s) % k];
                let sign = if s % 2 == 0 { Q::one() } else { -Q::one() };
                for b in 0..t.branch_count() {
                    coeffs[b] += &sign * &side[b];
                }
            }
            sys.push(coeffs, Relation::Ge, Q::zero());
        }
    }
}

fn lower_bounds(sys: &mut LinearSystem, n: usize) {
    for b in 0..n {
        let mut c = vec![Q::zero(); n];
        c[b] = Q::one();
        sys.push(c, Relation::Ge, Q::one());
    }
}

/// The linear system of the switch conditions with all weights at least one.
pub fn recurrence_system(t: &TrainTrack) -> LinearSystem {
    let n = t.branch_count();
    let mut sys = LinearSystem::new(n);
    for row in switch_matrix(t) {
        sys.push(row.iter().map(|&x| q(x)).collect(), Relation::Eq, Q::zero());
    }
    lower_bounds(&mut sys, n);
    sys
}

/// A positive transverse measure when the track is recurrent.
pub fn is_recurrent(t: &TrainTrack) -> Option<TransverseMeasure> {
    lp::feasible(&recurrence_system(t)).map(TransverseMeasure::new)
}

/// A positive tangential measure when the track is transversely recurrent.
pub fn is_transversely_recurrent(t: &TrainTrack) -> Option<TangentialMeasure> {
    let n = t.branch_count();
    let mut sys = LinearSystem::new(n);
    add_tangential_constraints(t, &mut sys);
    lower_bounds(&mut sys, n);
    lp::feasible(&sys).map(|weights| TangentialMeasure { weights })
}

/// The tangential system itself, for inspection and cross-checks.
pub fn tangential_system(t: &TrainTrack) -> LinearSystem {
    let mut sys = LinearSystem::new(t.branch_count());
    add_tangential_constraints(t, &mut sys);
    sys
}

/// Extreme rays of the cone of transverse measures as primitive integer
/// vectors, sorted.
pub fn vertex_cycle_vectors(t: &TrainTrack, exec: Execution) -> Vec<Vec<u64>> {
    cone::extreme_rays(&switch_matrix(t), t.branch_count(), exec)
        .into_iter()
        .map(|r| {
            r.iter()
                .map(|x| x.to_u64().expect("vertex cycle weights fit in u64"))
                .collect()
        })
        .collect()
}

/// Vertex cycles as measures.
pub fn vertex_cycles(t: &TrainTrack) -> Vec<TransverseMeasure> {
    vertex_cycle_vectors(t, Execution::default())
        .iter()
        .map(|v| TransverseMeasure::from_integers(v))
        .collect()
}

/// Nonnegative coefficients expressing `point` in terms of `generators`.
pub fn decompose(point: &[Q], generators: &[Vec<u64>]) -> Option<Vec<Q>> {
    let n = point.len();
    let mut sys = LinearSystem::new(generators.len());
    for b in 0..n {
        let coeffs = generators.iter().map(|g| q(g[b] as i64)).collect();
        sys.push(coeffs, Relation::Eq, point[b].clone());
    }
    lp::simplex(&sys)
}

/// Outcome of comparing a track with a simple extension.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtensionReport {
    pub dim_sigma: usize,
    pub dim_tau: usize,
    pub drop_ok: bool,
    pub sigma_connected: bool,
    pub sigma_orientable: bool,
    pub sigma_recurrent: bool,
    pub tau_recurrent: bool,
    /// Recurrence transfers whenever `sigma` is connected, non-orientable and
    /// recurrent; vacuously true otherwise.
    pub transfer_ok: bool,
}

/// Checks that `tau` minus the small branch `b` is `sigma` and compares the
/// two cones.
pub fn simple_extension_check(sigma: &TrainTrack, tau: &TrainTrack, b: usize) -> Result<ExtensionReport> {
    let kind = tau.classify_branch(b)?;
    if kind != BranchKind::Small {
        return Err(TrakError::Precondition(format!(
            "branch {b} is {}, a simple extension adds a small branch",
            kind.name()
        )));
    }
    let removed = remove_small_branch(tau, b)?;
    removed.track.validate()?;
    let a = crate::canonical::canonical_code(&removed.track, None);
    let s = crate::canonical::canonical_code(sigma, None);
    if a != s {
        return Err(TrakError::Precondition(
            "removing the branch does not give the smaller track".into(),
        ));
    }
    let dim_sigma = cone_dimension(sigma);
    let dim_tau = cone_dimension(tau);
    let sigma_connected = sigma.is_connected();
    let sigma_orientable = sigma.is_orientable();
    let sigma_recurrent = is_recurrent(sigma).is_some();
    let tau_recurrent = is_recurrent(tau).is_some();
    let transfer_ok = !(sigma_connected && !sigma_orientable && sigma_recurrent) || tau_recurrent;
    Ok(ExtensionReport {
        dim_sigma,
        dim_tau,
        drop_ok: dim_sigma + 1 == dim_tau,
        sigma_connected,
        sigma_orientable,
        sigma_recurrent,
        tau_recurrent,
        transfer_ok,
    })
}

/// Parses a `measure v1` file against a track's branch ids.
pub fn parse_measure(text: &str, t: &TrainTrack) -> Result<TransverseMeasure> {
    let mut weights = vec![None; t.branch_count()];
    let mut header = false;
    for (ln, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |m: String| TrakError::Syntax {
            line: ln + 1,
            column: 1,
            message: m,
        };
        if !header {
            if line == "measure v1" {
                header = true;
                continue;
            }
            return Err(err("expected header `measure v1`".into()));
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != 3 || toks[0] != "w" {
            return Err(err(format!("expected `w <branch> <p>/<q>`, found `{line}`")));
        }
        let id: u32 = toks[1]
            .parse()
            .map_err(|_| err(format!("bad branch id `{}`", toks[1])))?;
        let b = t.branch_index(id).ok_or_else(|| err(format!("unknown branch {id}")))?;
        let w: Q = toks[2]
            .parse()
            .map_err(|_| err(format!("bad rational `{}`", toks[2])))?;
        if weights[b].replace(w).is_some() {
            return Err(err(format!("branch {id} given twice")));
        }
    }
    if !header {
        return Err(TrakError::Syntax {
            line: 1,
            column: 1,
            message: "missing header `measure v1`".into(),
        });
    }
    let weights: Option<Vec<Q>> = weights.into_iter().collect();
    let m = TransverseMeasure::new(weights.ok_or_else(|| TrakError::InvalidMeasure("missing branch weights".into()))?);
    m.check(t)?;
    Ok(m)
}

/// Serializes a measure with one `w` line per branch in ascending id order.
pub fn serialize_measure(m: &TransverseMeasure, t: &TrainTrack) -> String {
    let mut rows: Vec<(u32, &Q)> = t.branch_labels().iter().copied().zip(&m.weights).collect();
    rows.sort_by_key(|r| r.0);
    let mut out = String::from("measure v1\n");
    for (id, w) in rows {
        let _ = writeln!(out, "w {id} {}/{}", w.numer(), w.denom());
    }
    out
}

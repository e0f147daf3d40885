//! Perron roots of nonnegative integer matrices with certified bounds.
//!
//! Power iteration runs on `A + I`, which is primitive whenever `A` is
//! irreducible, so periodic matrices converge too. The final iterate `v` is
//! converted to exact rationals and the Collatz–Wielandt quotients
//! `(A v)_i / v_i` are evaluated exactly: their minimum and maximum bracket
//! the Perron root.

use crate::error::{Result, TrakError};
use crate::graph::Digraph;
use crate::linalg::Q;
use crate::moves::CarryingMatrix;
use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

/// Sparse square matrix with nonnegative integer entries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseMatrix {
    pub n: usize,
    /// `(row, column, value)` with `value > 0`.
    pub entries: Vec<(usize, usize, u64)>,
}

impl SparseMatrix {
    pub fn from_dense(m: &CarryingMatrix) -> Self {
        assert!(m.is_square(), "Perron roots need a square matrix");
        let entries = (0..m.rows)
            .flat_map(|i| (0..m.cols).map(move |j| (i, j)))
            .filter_map(|(i, j)| Some((i, j, m.get(i, j))).filter(|e| e.2 > 0))
            .collect();
        Self { n: m.rows, entries }
    }

    /// 0/1 matrix of a digraph.
    pub fn from_graph(g: &Digraph) -> Self {
        Self {
            n: g.len(),
            entries: g.edges().map(|(a, b)| (a, b, 1)).collect(),
        }
    }

    pub fn graph(&self) -> Digraph {
        Digraph::new(self.n, self.entries.iter().map(|e| (e.0, e.1)))
    }

    fn apply(&self, v: &[f64]) -> Vec<f64> {
        let mut w = vec![0.0; self.n];
        for &(i, j, a) in &self.entries {
            w[i] += a as f64 * v[j];
        }
        w
    }

    /// Submatrix on the sorted index set `keep`.
    pub fn restrict(&self, keep: &[usize]) -> Self {
        let mut pos = vec![usize::MAX; self.n];
        for (k, &i) in keep.iter().enumerate() {
            pos[i] = k;
        }
        Self {
            n: keep.len(),
            entries: self
                .entries
                .iter()
                .filter(|e| pos[e.0] != usize::MAX && pos[e.1] != usize::MAX)
                .map(|e| (pos[e.0], pos[e.1], e.2))
                .collect(),
        }
    }
}

/// A Perron root with an exact bracket `lower <= lambda <= upper`.
#[derive(Clone, Debug, PartialEq)]
pub struct PerronRoot {
    pub lambda: f64,
    pub lower: Q,
    pub upper: Q,
    /// Positive eigenvector estimate normalized to maximum one.
    pub vector: Vec<f64>,
}

impl PerronRoot {
    /// Width of the certified bracket.
    pub fn gap(&self) -> f64 {
        (&self.upper - &self.lower).to_f64().unwrap_or(f64::INFINITY)
    }
}

/// Relative tolerance of the power iteration.
pub const RELATIVE_TOLERANCE: f64 = 1e-12;
const MAX_ITERATIONS: usize = 1_000_000;

/// Whether `m` is irreducible with period one.
pub fn is_primitive(m: &SparseMatrix) -> bool {
    matches!(m.graph().cyclic_classes(), Some((1, _)))
}

/// Perron root of an irreducible matrix.
pub fn perron_root(m: &SparseMatrix) -> Result<PerronRoot> {
    if !m.graph().is_strongly_connected() {
        return Err(TrakError::NonPrimitive("matrix is reducible".into()));
    }
    let n = m.n;
    let mut v = vec![1.0; n];
    let mut estimate = 0.0;
    for _ in 0..MAX_ITERATIONS {
        let av = m.apply(&v);
        let (lo, hi) = quotient_range(&av, &v);
        estimate = 0.5 * (lo + hi);
        if hi - lo <= RELATIVE_TOLERANCE * hi.max(1.0) {
            break;
        }
        // (A + I) v keeps every coordinate positive.
        let mut w: Vec<f64> = av.iter().zip(&v).map(|(a, b)| a + b).collect();
        let top = w.iter().cloned().fold(0.0, f64::max);
        w.iter_mut().for_each(|x| *x /= top);
        v = w;
    }
    let top = v.iter().cloned().fold(0.0, f64::max);
    v.iter_mut().for_each(|x| *x /= top);
    let exact: Vec<Q> = v.iter().map(|&x| Q::from_float(x).expect("finite iterate")).collect();
    let mut av = vec![Q::zero(); n];
    for &(i, j, a) in &m.entries {
        av[i] += Q::from_integer(BigInt::from(a)) * &exact[j];
    }
    let quotients: Vec<Q> = av.iter().zip(&exact).map(|(a, x)| a / x).collect();
    let lower = quotients.iter().min().expect("nonempty").clone();
    let upper = quotients.iter().max().expect("nonempty").clone();
    let lambda = estimate.clamp(lower.to_f64().unwrap_or(estimate), upper.to_f64().unwrap_or(estimate));
    Ok(PerronRoot {
        lambda,
        lower,
        upper,
        vector: v,
    })
}

fn quotient_range(av: &[f64], v: &[f64]) -> (f64, f64) {
    av.iter()
        .zip(v)
        .map(|(a, b)| a / b)
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), q| (lo.min(q), hi.max(q)))
}

/// Spectral radius of an arbitrary nonnegative matrix: the largest Perron
/// root over its strong components. Components without a cycle contribute
/// zero.
pub fn spectral_radius(m: &SparseMatrix) -> Result<f64> {
    let g = m.graph();
    let mut best = 0.0f64;
    for comp in g.sccs() {
        if !g.has_cycle_within(&comp) {
            continue;
        }
        best = best.max(perron_root(&m.restrict(&comp))?.lambda);
    }
    Ok(best)
}

/// Perron root of a primitive carrying matrix; the dominant eigenvalue of a
/// periodic word.
pub fn dilatation(m: &CarryingMatrix) -> Result<PerronRoot> {
    let s = SparseMatrix::from_dense(m);
    if !is_primitive(&s) {
        return Err(TrakError::NonPrimitive("composite matrix is not primitive".into()));
    }
    perron_root(&s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_ratio() {
        let m = CarryingMatrix::from_rows(&[vec![1, 1], vec![1, 0]]);
        let r = dilatation(&m).unwrap();
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        assert!((r.lambda - phi).abs() < 1e-9);
        assert!(r.lower.to_f64().unwrap() <= phi + 1e-15 && phi - 1e-15 <= r.upper.to_f64().unwrap());
        assert!(r.gap() <= 1e-9);
    }

    #[test]
    fn periodic_matrix_has_a_root_but_is_not_primitive() {
        let m = CarryingMatrix::from_rows(&[vec![0, 2], vec![2, 0]]);
        let s = SparseMatrix::from_dense(&m);
        assert!(!is_primitive(&s));
        assert!((perron_root(&s).unwrap().lambda - 2.0).abs() < 1e-9);
        assert!(matches!(dilatation(&m), Err(TrakError::NonPrimitive(_))));
    }

    #[test]
    fn reducible_radius_is_max_over_components() {
        let s = SparseMatrix {
            n: 3,
            entries: vec![(0, 0, 3), (0, 1, 1), (1, 2, 1), (2, 1, 1)],
        };
        assert!((spectral_radius(&s).unwrap() - 3.0).abs() < 1e-9);
    }
}

//! Exact feasibility of linear systems over nonnegative variables.
//!
//! Two independent routes: Fourier-Motzkin elimination after substituting
//! out equalities, and a phase-one simplex with Bland's rule. The combined
//! entry point tries elimination first and falls back to the simplex when
//! the inequality count outgrows a cap.

use crate::linalg::Q;
use num_traits::{One, Signed, Zero};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Eq,
    Le,
    Ge,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Constraint {
    pub coeffs: Vec<Q>,
    pub relation: Relation,
    pub rhs: Q,
}

impl Constraint {
    pub fn new(coeffs: Vec<Q>, relation: Relation, rhs: Q) -> Self {
        Self { coeffs, relation, rhs }
    }

    pub fn holds(&self, x: &[Q]) -> bool {
        let lhs = crate::linalg::dot(&self.coeffs, x);
        match self.relation {
            Relation::Eq => lhs == self.rhs,
            Relation::Le => lhs <= self.rhs,
            Relation::Ge => lhs >= self.rhs,
        }
    }
}

/// A system `constraints` over variables `x >= 0`.
#[derive(Clone, Debug, Default)]
pub struct LinearSystem {
    pub vars: usize,
    pub constraints: Vec<Constraint>,
}

impl LinearSystem {
    pub fn new(vars: usize) -> Self {
        Self {
            vars,
            constraints: Vec::new(),
        }
    }

    pub fn push(&mut self, coeffs: Vec<Q>, relation: Relation, rhs: Q) {
        assert_eq!(coeffs.len(), self.vars);
        self.constraints.push(Constraint::new(coeffs, relation, rhs));
    }

    /// Whether `x` is nonnegative and satisfies every constraint exactly.
    pub fn satisfied_by(&self, x: &[Q]) -> bool {
        x.len() == self.vars && x.iter().all(|v| !v.is_negative()) && self.constraints.iter().all(|c| c.holds(x))
    }
}

/// Outcome of Fourier-Motzkin elimination.
#[derive(Clone, Debug, PartialEq)]
pub enum Elimination {
    Feasible(Vec<Q>),
    Infeasible,
    TooLarge,
}

/// Inequality `a . x <= b`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct Ineq {
    a: Vec<Q>,
    b: Q,
}

impl Ineq {
    fn normalized(mut self) -> Self {
        if let Some(lead) = self.a.iter().find(|x| !x.is_zero()).map(|x| x.abs()) {
            for x in self.a.iter_mut() {
                *x = &*x / &lead;
            }
            self.b = &self.b / &lead;
        }
        self
    }
}

fn dedup(v: &mut Vec<Ineq>) {
    v.sort();
    v.dedup();
}

/// Substitution `x_k = (rhs - sum coeffs_j x_j)` recorded during equality
/// elimination; `coeffs[k]` is zero.
struct Substitution {
    var: usize,
    coeffs: Vec<Q>,
    rhs: Q,
}

/// Fourier-Motzkin feasibility with witness. Gives up with `TooLarge` when an
/// intermediate system exceeds `cap` inequalities.
pub fn fourier_motzkin(sys: &LinearSystem, cap: usize) -> Elimination {
    let n = sys.vars;
    let mut eqs: Vec<(Vec<Q>, Q)> = Vec::new();
    let mut ineqs: Vec<Ineq> = Vec::new();
    for c in &sys.constraints {
        match c.relation {
            Relation::Eq => eqs.push((c.coeffs.clone(), c.rhs.clone())),
            Relation::Le => ineqs.push(Ineq {
                a: c.coeffs.clone(),
                b: c.rhs.clone(),
            }),
            Relation::Ge => ineqs.push(Ineq {
                a: c.coeffs.iter().map(|x| -x).collect(),
                b: -c.rhs.clone(),
            }),
        }
    }
    for k in 0..n {
        let mut a = vec![Q::zero(); n];
        a[k] = -Q::one();
        ineqs.push(Ineq { a, b: Q::zero() });
    }

    // Equalities: solve for one variable and substitute everywhere.
    let mut subs: Vec<Substitution> = Vec::new();
    while let Some((mut a, mut b)) = eqs.pop() {
        let Some(k) = a.iter().position(|x| !x.is_zero()) else {
            if !b.is_zero() {
                return Elimination::Infeasible;
            }
            continue;
        };
        let lead = a[k].clone();
        for x in a.iter_mut() {
            *x = &*x / &lead;
        }
        b = &b / &lead;
        a[k] = Q::zero();
        let apply = |c: &mut Vec<Q>, r: &mut Q| {
            let f = c[k].clone();
            if f.is_zero() {
                return;
            }
            for j in 0..n {
                if !a[j].is_zero() {
                    let d = &f * &a[j];
                    c[j] -= d;
                }
            }
            c[k] = Q::zero();
            *r -= &f * &b;
        };
        for (c, r) in eqs.iter_mut() {
            apply(c, r);
        }
        for iq in ineqs.iter_mut() {
            apply(&mut iq.a, &mut iq.b);
        }
        subs.push(Substitution {
            var: k,
            coeffs: a,
            rhs: b,
        });
    }

    // Inequalities: eliminate the remaining variables one at a time.
    let substituted: Vec<usize> = subs.iter().map(|s| s.var).collect();
    let mut remaining: Vec<usize> = (0..n).filter(|k| !substituted.contains(k)).collect();
    let mut ineqs: Vec<Ineq> = ineqs.into_iter().map(Ineq::normalized).collect();
    dedup(&mut ineqs);
    let mut stages: Vec<(usize, Vec<Ineq>)> = Vec::new();
    while !remaining.is_empty() {
        let (pos_idx, var) = remaining
            .iter()
            .enumerate()
            .min_by_key(|(_, &k)| {
                let p = ineqs.iter().filter(|iq| iq.a[k].is_positive()).count();
                let m = ineqs.iter().filter(|iq| iq.a[k].is_negative()).count();
                p * m
            })
            .map(|(i, &k)| (i, k))
            .unwrap();
        remaining.remove(pos_idx);
        let (mut pos, mut neg, mut zero) = (Vec::new(), Vec::new(), Vec::new());
        for iq in &ineqs {
            if iq.a[var].is_positive() {
                pos.push(iq.clone());
            } else if iq.a[var].is_negative() {
                neg.push(iq.clone());
            } else {
                zero.push(iq.clone());
            }
        }
        if zero.len() + pos.len() * neg.len() > cap {
            return Elimination::TooLarge;
        }
        let mut next = zero;
        for p in &pos {
            for m in &neg {
                let fp = -m.a[var].clone();
                let fm = p.a[var].clone();
                let a: Vec<Q> = p.a.iter().zip(&m.a).map(|(x, y)| x * &fp + y * &fm).collect();
                let b = &p.b * &fp + &m.b * &fm;
                next.push(Ineq { a, b }.normalized());
            }
        }
        dedup(&mut next);
        stages.push((var, std::mem::replace(&mut ineqs, next)));
    }
    if ineqs.iter().any(|iq| iq.b.is_negative()) {
        return Elimination::Infeasible;
    }

    // Back-substitution in reverse elimination order.
    let mut x = vec![Q::zero(); n];
    for (var, stage) in stages.iter().rev() {
        let mut lo: Option<Q> = None;
        let mut hi: Option<Q> = None;
        for iq in stage {
            let c = &iq.a[*var];
            if c.is_zero() {
                continue;
            }
            let rest =
                iq.a.iter()
                    .enumerate()
                    .filter(|(j, _)| j != var)
                    .fold(Q::zero(), |acc, (j, a)| acc + a * &x[j]);
            let bound = (&iq.b - rest) / c;
            if c.is_positive() {
                hi = Some(match hi {
                    Some(h) if h <= bound => h,
                    _ => bound,
                });
            } else {
                lo = Some(match lo {
                    Some(l) if l >= bound => l,
                    _ => bound,
                });
            }
        }
        x[*var] = match (lo, hi) {
            (Some(l), _) => l,
            (None, Some(h)) => h,
            (None, None) => Q::zero(),
        };
    }
    for s in subs.iter().rev() {
        let rest = s.coeffs.iter().zip(&x).fold(Q::zero(), |acc, (a, v)| acc + a * v);
        x[s.var] = &s.rhs - rest;
    }
    debug_assert!(sys.satisfied_by(&x));
    Elimination::Feasible(x)
}

/// Phase-one simplex with Bland's rule. Returns a feasible point or `None`.
pub fn simplex(sys: &LinearSystem) -> Option<Vec<Q>> {
    let n = sys.vars;
    let m = sys.constraints.len();
    let slack_count = sys.constraints.iter().filter(|c| c.relation != Relation::Eq).count();
    let total = n + slack_count + m;
    // Rows: [coeffs | slack | artificial | rhs]
    let mut tab: Vec<Vec<Q>> = Vec::with_capacity(m);
    let mut slack = n;
    for (i, c) in sys.constraints.iter().enumerate() {
        let mut row = vec![Q::zero(); total + 1];
        for (j, v) in c.coeffs.iter().enumerate() {
            row[j] = v.clone();
        }
        match c.relation {
            Relation::Le => {
                row[slack] = Q::one();
                slack += 1;
            }
            Relation::Ge => {
                row[slack] = -Q::one();
                slack += 1;
            }
            Relation::Eq => {}
        }
        row[total] = c.rhs.clone();
        if row[total].is_negative() {
            for x in row.iter_mut() {
                *x = -x.clone();
            }
        }
        row[n + slack_count + i] = Q::one();
        tab.push(row);
    }
    let art0 = n + slack_count;
    let mut basis: Vec<usize> = (0..m).map(|i| art0 + i).collect();
    // Reduced costs for minimizing the sum of artificials.
    let mut cost = vec![Q::zero(); total + 1];
    for row in &tab {
        for j in 0..art0 {
            cost[j] -= &row[j];
        }
        cost[total] -= &row[total];
    }
    loop {
        let Some(enter) = (0..total).find(|&j| cost[j].is_negative()) else {
            break;
        };
        let mut leave: Option<(usize, Q)> = None;
        for i in 0..m {
            if tab[i][enter].is_positive() {
                let ratio = &tab[i][total] / &tab[i][enter];
                leave = match leave {
                    None => Some((i, ratio)),
                    Some((li, lr)) => {
                        if ratio < lr || (ratio == lr && basis[i] < basis[li]) {
                            Some((i, ratio))
                        } else {
                            Some((li, lr))
                        }
                    }
                };
            }
        }
        let Some((r, _)) = leave else {
            // Unbounded direction cannot occur for a bounded-below objective.
            break;
        };
        let inv = tab[r][enter].recip();
        for x in tab[r].iter_mut() {
            *x = &*x * &inv;
        }
        let pivot_row = tab[r].clone();
        for (i, row) in tab.iter_mut().enumerate() {
            if i != r && !row[enter].is_zero() {
                let f = row[enter].clone();
                for (j, p) in pivot_row.iter().enumerate() {
                    if !p.is_zero() {
                        row[j] -= &f * p;
                    }
                }
            }
        }
        if !cost[enter].is_zero() {
            let f = cost[enter].clone();
            for (j, p) in pivot_row.iter().enumerate() {
                if !p.is_zero() {
                    cost[j] -= &f * p;
                }
            }
        }
        basis[r] = enter;
    }
    if !cost[total].is_zero() {
        return None;
    }
    let mut x = vec![Q::zero(); n];
    for (i, &b) in basis.iter().enumerate() {
        if b < n {
            x[b] = tab[i][total].clone();
        }
    }
    debug_assert!(sys.satisfied_by(&x));
    Some(x)
}

/// Inequality cap for the elimination route.
pub const ELIMINATION_CAP: usize = 4096;

/// Feasibility with a witness: elimination first, simplex as fallback.
pub fn feasible(sys: &LinearSystem) -> Option<Vec<Q>> {
    match fourier_motzkin(sys, ELIMINATION_CAP) {
        Elimination::Feasible(x) => Some(x),
        Elimination::Infeasible => None,
        Elimination::TooLarge => simplex(sys),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::q;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_system(rng: &mut ChaCha8Rng) -> LinearSystem {
        let n = rng.gen_range(1..=4);
        let m = rng.gen_range(1..=5);
        let mut s = LinearSystem::new(n);
        for _ in 0..m {
            let coeffs = (0..n).map(|_| q(rng.gen_range(-3..=3))).collect();
            let rel = match rng.gen_range(0..3) {
                0 => Relation::Eq,
                1 => Relation::Le,
                _ => Relation::Ge,
            };
            s.push(coeffs, rel, q(rng.gen_range(-4..=4)));
        }
        s
    }

    #[test]
    fn routes_agree_on_random_systems() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..400 {
            let s = random_system(&mut rng);
            let fm = fourier_motzkin(&s, 100_000);
            let sx = simplex(&s);
            match (&fm, &sx) {
                (Elimination::Feasible(x), Some(y)) => {
                    assert!(s.satisfied_by(x));
                    assert!(s.satisfied_by(y));
                }
                (Elimination::Infeasible, None) => {}
                _ => panic!("routes disagree on {s:?}: {fm:?} vs {sx:?}"),
            }
        }
    }

    #[test]
    fn simple_infeasible() {
        let mut s = LinearSystem::new(1);
        s.push(vec![q(1)], Relation::Le, q(-1));
        assert!(simplex(&s).is_none());
        assert_eq!(fourier_motzkin(&s, 10), Elimination::Infeasible);
    }

    #[test]
    fn equality_with_lower_bounds() {
        // x0 = x1 + x2, all >= 1.
        let mut s = LinearSystem::new(3);
        s.push(vec![q(1), q(-1), q(-1)], Relation::Eq, q(0));
        for k in 0..3 {
            let mut c = vec![q(0); 3];
            c[k] = q(1);
            s.push(c, Relation::Ge, q(1));
        }
        let x = feasible(&s).unwrap();
        assert!(s.satisfied_by(&x));
    }
}

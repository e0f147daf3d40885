//! Extreme rays of cones `{x >= 0, A x = 0}` by double description.
//!
//! Starting from the coordinate rays of the orthant, each hyperplane of `A`
//! is intersected in turn. Adjacency of a positive and a negative ray is
//! decided combinatorially: no third ray may have support inside the union
//! of their supports.

use crate::par::Execution;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

type Ray = Vec<BigInt>;

fn support(r: &Ray) -> Vec<bool> {
    r.iter().map(|x| !x.is_zero()).collect()
}

fn subset(a: &[bool], b: &[bool]) -> bool {
    a.iter().zip(b).all(|(&x, &y)| !x || y)
}

fn normalize(mut r: Ray) -> Ray {
    let mut g = BigInt::zero();
    for x in &r {
        g = g.gcd(x);
    }
    if !g.is_zero() && g != BigInt::from(1) {
        for x in r.iter_mut() {
            *x = &*x / &g;
        }
    }
    r
}

/// All extreme rays of `{x >= 0, A x = 0}` as primitive integer vectors,
/// sorted lexicographically.
pub fn extreme_rays(a: &[Vec<i64>], n: usize, exec: Execution) -> Vec<Ray> {
    let mut rays: Vec<Ray> = (0..n)
        .map(|i| {
            let mut r = vec![BigInt::zero(); n];
            r[i] = BigInt::from(1);
            r
        })
        .collect();
    for row in a {
        let row: Vec<BigInt> = row.iter().map(|&x| BigInt::from(x)).collect();
        let val = |r: &Ray| r.iter().zip(&row).fold(BigInt::zero(), |acc, (x, y)| acc + x * y);
        let vals: Vec<BigInt> = rays.iter().map(val).collect();
        let supports: Vec<Vec<bool>> = rays.iter().map(support).collect();
        let pos: Vec<usize> = (0..rays.len()).filter(|&i| vals[i].is_positive()).collect();
        let neg: Vec<usize> = (0..rays.len()).filter(|&i| vals[i].is_negative()).collect();
        let pairs: Vec<(usize, usize)> = pos.iter().flat_map(|&p| neg.iter().map(move |&q| (p, q))).collect();
        let combos: Vec<Option<Ray>> = exec.map(&pairs, |&(p, q)| {
            let union: Vec<bool> = supports[p].iter().zip(&supports[q]).map(|(&x, &y)| x || y).collect();
            let blocked = (0..rays.len()).any(|k| k != p && k != q && subset(&supports[k], &union));
            if blocked {
                return None;
            }
            let fp = -vals[q].clone();
            let fq = vals[p].clone();
            let r: Ray = rays[p].iter().zip(&rays[q]).map(|(x, y)| x * &fp + y * &fq).collect();
            Some(normalize(r))
        });
        let mut next: Vec<Ray> = (0..rays.len())
            .filter(|&i| vals[i].is_zero())
            .map(|i| rays[i].clone())
            .collect();
        next.extend(combos.into_iter().flatten());
        next.sort();
        next.dedup();
        rays = next;
    }
    rays.sort();
    rays
}

/// Whether `r` spans an extreme ray of `{x >= 0, A x = 0}`: it lies in the
/// cone and the columns of `A` on its support have a one-dimensional kernel.
pub fn is_extreme(a: &[Vec<i64>], r: &[BigInt]) -> bool {
    if r.iter().any(|x| x.is_negative()) || r.iter().all(|x| x.is_zero()) {
        return false;
    }
    for row in a {
        let s = row.iter().zip(r).fold(BigInt::zero(), |acc, (&x, y)| acc + y * x);
        if !s.is_zero() {
            return false;
        }
    }
    let supp: Vec<usize> = (0..r.len()).filter(|&i| !r[i].is_zero()).collect();
    let sub: Vec<Vec<i64>> = a.iter().map(|row| supp.iter().map(|&i| row[i]).collect()).collect();
    let rank = if sub.is_empty() {
        0
    } else {
        crate::linalg::rank_int(&sub)
    };
    supp.len() - rank == 1
}

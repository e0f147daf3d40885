//! Shifts, splits and full splits with their carrying matrices.
//!
//! Branch indices survive every move: the diagonal of a split keeps the
//! index of the large branch it replaces, and a shift keeps all indices.
//! Carrying matrices map measures on the new track to measures on the old
//! one, `mu_old = M mu_new`; rows are old branches and columns new branches.
//!
//! Split at a large branch `e` whose First end sits at switch `v` and Second
//! end at switch `w`. With `A = left(v)`, `B = right(v)`, `C = left(w)`,
//! `D = right(w)`:
//!
//! ```text
//!   B           C        B ------ w' --- C        B --- v' ------ C
//!    \         /                  /                      \
//!     v -- e -- w      right:     / e        left:      e \
//!    /         \                 /                          \
//!   A           D        A --- v' ------ D        A ------ w' --- D
//! ```
//!
//! A right split keeps `A` and `C` as the large ends of the new switches and
//! makes `B`, `D` small ends next to the diagonal; a left split does the
//! same with the roles of `A, C` and `B, D` exchanged. For a right split
//! `mu(e) = mu'(e) + mu'(B) + mu'(D)`.

use crate::error::{Result, TrakError};
use crate::linalg::Q;
use crate::track::{remove_small_branch, BranchKind, HalfBranchEnd, Slot, Switch, TrainTrack};
use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

/// Nonnegative integer matrix, row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CarryingMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<u64>,
}

impl CarryingMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<u64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        Self {
            rows: r,
            cols: c,
            data: rows.iter().flatten().copied().collect(),
        }
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: u64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<u64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    /// Product `self * other`, failing on overflow.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if b == 0 {
                        continue;
                    }
                    let idx = i * other.cols + j;
                    out.data[idx] = a
                        .checked_mul(b)
                        .and_then(|p| out.data[idx].checked_add(p))
                        .ok_or_else(|| TrakError::Overflow("carrying matrix product".into()))?;
                }
            }
        }
        Ok(out)
    }

    /// `M x` over the rationals.
    pub fn apply(&self, x: &[Q]) -> Vec<Q> {
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(x)
                    .filter(|(&a, _)| a != 0)
                    .fold(Q::zero(), |acc, (&a, v)| acc + Q::from_integer(BigInt::from(a)) * v)
            })
            .collect()
    }

    /// `M x` over big integers.
    pub fn apply_int(&self, x: &[BigInt]) -> Vec<BigInt> {
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(x)
                    .filter(|(&a, _)| a != 0)
                    .fold(BigInt::zero(), |acc, (&a, v)| acc + BigInt::from(a) * v)
            })
            .collect()
    }

    /// Column sums, that is `1^T M`.
    pub fn column_sums(&self) -> Vec<u128> {
        let mut s = vec![0u128; self.cols];
        for i in 0..self.rows {
            for (j, &a) in self.row(i).iter().enumerate() {
                s[j] += a as u128;
            }
        }
        s
    }

    pub fn is_positive(&self) -> bool {
        self.data.iter().all(|&x| x >= 1)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Rows that differ between two matrices of equal shape.
    pub fn differing_rows(&self, other: &Self) -> Vec<usize> {
        (0..self.rows).filter(|&i| self.row(i) != other.row(i)).collect()
    }
}

impl fmt::Display for CarryingMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            writeln!(f, "{}", row.join(","))?;
        }
        Ok(())
    }
}

/// Direction of a split.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SplitDirection {
    Left,
    Right,
    Central,
}

impl SplitDirection {
    pub fn letter(self) -> char {
        match self {
            SplitDirection::Left => 'L',
            SplitDirection::Right => 'R',
            SplitDirection::Central => 'C',
        }
    }

    pub fn from_letter(c: &str) -> Option<Self> {
        match c {
            "L" => Some(SplitDirection::Left),
            "R" => Some(SplitDirection::Right),
            "C" => Some(SplitDirection::Central),
            _ => None,
        }
    }
}

/// A split at a large branch.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SplitChoice {
    pub large_branch: usize,
    pub direction: SplitDirection,
}

/// The star of a large branch: its two switches and the four small ends.
#[derive(Clone, Copy, Debug)]
pub struct Star {
    pub v: usize,
    pub w: usize,
    pub a: HalfBranchEnd,
    pub b: HalfBranchEnd,
    pub c: HalfBranchEnd,
    pub d: HalfBranchEnd,
}

pub fn star(t: &TrainTrack, e: usize) -> Result<Star> {
    let kind = t.classify_branch(e)?;
    if kind != BranchKind::Large {
        return Err(TrakError::WrongBranchKind {
            branch: e,
            expected: "large",
            actual: kind.name(),
        });
    }
    let (v, _) = t.attachment(HalfBranchEnd::first(e));
    let (w, _) = t.attachment(HalfBranchEnd::second(e));
    let sv = t.switch(v);
    let sw = t.switch(w);
    Ok(Star {
        v,
        w,
        a: sv.left,
        b: sv.right,
        c: sw.left,
        d: sw.right,
    })
}

fn rebuild(t: &TrainTrack, edits: &[(usize, Switch)], swap_cusps: (usize, usize)) -> Result<TrainTrack> {
    let (mut switches, labels, slabels, punctured) = t.clone().into_parts();
    for &(s, sw) in edits {
        switches[s] = sw;
    }
    let (x, y) = swap_cusps;
    let punctured = punctured
        .into_iter()
        .map(|s| {
            if s == x {
                y
            } else if s == y {
                x
            } else {
                s
            }
        })
        .collect();
    TrainTrack::from_raw(switches, labels, slabels, punctured)
}

/// Left or right split, or the central split that removes the diagonal.
pub fn split(t: &TrainTrack, choice: SplitChoice) -> Result<(TrainTrack, CarryingMatrix)> {
    let e = choice.large_branch;
    let st = star(t, e)?;
    let n = t.branch_count();
    match choice.direction {
        SplitDirection::Right | SplitDirection::Left => {
            let (sv, sw, losers) = if choice.direction == SplitDirection::Right {
                (
                    Switch::new(st.a, HalfBranchEnd::first(e), st.d),
                    Switch::new(st.c, HalfBranchEnd::second(e), st.b),
                    [st.b.branch, st.d.branch],
                )
            } else {
                (
                    Switch::new(st.b, st.c, HalfBranchEnd::first(e)),
                    Switch::new(st.d, st.a, HalfBranchEnd::second(e)),
                    [st.a.branch, st.c.branch],
                )
            };
            let nt = rebuild(t, &[(st.v, sv), (st.w, sw)], (st.v, st.w))?;
            let mut m = CarryingMatrix::identity(n);
            for l in losers {
                m.set(e, l, m.get(e, l) + 1);
            }
            Ok((nt, m))
        }
        SplitDirection::Central => {
            let (right, _) = split(
                t,
                SplitChoice {
                    large_branch: e,
                    direction: SplitDirection::Right,
                },
            )?;
            let removed = remove_small_branch(&right, e)?;
            let sigma = removed.track;
            let map = removed.branch_map;
            let mut m = CarryingMatrix::zeros(n, sigma.branch_count());
            for x in 0..n {
                if x == e {
                    continue;
                }
                let y = map[x].expect("surviving branch");
                m.set(x, y, m.get(x, y) + 1);
            }
            for h in [st.a, st.b] {
                let y = map[h.branch].expect("surviving branch");
                m.set(e, y, m.get(e, y) + 1);
            }
            Ok((sigma, m))
        }
    }
}

/// Shift along a mixed branch.
pub fn shift(t: &TrainTrack, b: usize) -> Result<(TrainTrack, CarryingMatrix)> {
    let kind = t.classify_branch(b)?;
    if kind != BranchKind::Mixed {
        return Err(TrakError::WrongBranchKind {
            branch: b,
            expected: "mixed",
            actual: kind.name(),
        });
    }
    let f = HalfBranchEnd::first(b);
    let (hv, hw) = if t.attachment(f).1 == Slot::Large {
        (f, f.opposite())
    } else {
        (f.opposite(), f)
    };
    let (v, _) = t.attachment(hv);
    let (w, slot_w) = t.attachment(hw);
    if v == w {
        return Err(TrakError::InvalidMove("shift along a loop at one switch".into()));
    }
    let sv = *t.switch(v);
    let sw = *t.switch(w);
    let (p, q) = (sv.left, sv.right);
    let l = sw.large;
    let (nv, nw) = if slot_w == Slot::Left {
        let x = sw.right;
        (Switch::new(hv, q, x), Switch::new(l, p, hw))
    } else {
        let x = sw.left;
        (Switch::new(hv, x, p), Switch::new(l, hw, q))
    };
    let nt = rebuild(t, &[(v, nv), (w, nw)], (v, w))?;
    let n = t.branch_count();
    let mut m = CarryingMatrix::identity(n);
    m.set(b, b, 0);
    for x in [p.branch, q.branch] {
        m.set(b, x, m.get(b, x) + 1);
    }
    Ok((nt, m))
}

/// One split at every large branch, in ascending branch order.
pub fn full_split(t: &TrainTrack, choices: &BTreeMap<usize, SplitDirection>) -> Result<(TrainTrack, CarryingMatrix)> {
    let large = t.large_branches();
    let keys: Vec<usize> = choices.keys().copied().collect();
    if keys != large {
        return Err(TrakError::Precondition(format!(
            "full split needs exactly the large branches {large:?}, got {keys:?}"
        )));
    }
    full_split_in_order(t, choices, &large)
}

/// Full split applying the single splits in the given order.
pub fn full_split_in_order(
    t: &TrainTrack,
    choices: &BTreeMap<usize, SplitDirection>,
    order: &[usize],
) -> Result<(TrainTrack, CarryingMatrix)> {
    let mut cur = t.clone();
    let mut m = CarryingMatrix::identity(t.branch_count());
    for &e in order {
        let direction = choices[&e];
        if direction == SplitDirection::Central {
            return Err(TrakError::Precondition(
                "full splits use left and right splits only".into(),
            ));
        }
        let (next, step) = split(
            &cur,
            SplitChoice {
                large_branch: e,
                direction,
            },
        )?;
        m = m.mul(&step)?;
        cur = next;
    }
    Ok((cur, m))
}

/// All `2^k` choice maps for the large branches of `t`; bit `i` of the index
/// selects Right for the `i`-th large branch.
pub fn choice_maps(t: &TrainTrack) -> Vec<BTreeMap<usize, SplitDirection>> {
    let large = t.large_branches();
    (0..1usize << large.len())
        .map(|mask| {
            large
                .iter()
                .enumerate()
                .map(|(i, &e)| {
                    let d = if mask >> i & 1 == 1 {
                        SplitDirection::Right
                    } else {
                        SplitDirection::Left
                    };
                    (e, d)
                })
                .collect()
        })
        .collect()
}

/// The split at `e` whose result carries `mu`: right when `mu(A) > mu(D)`,
/// left when `mu(A) < mu(D)`, central on equality.
pub fn split_resolve(t: &TrainTrack, e: usize, mu: &[Q]) -> Result<SplitDirection> {
    let st = star(t, e)?;
    let a = &mu[st.a.branch];
    let d = &mu[st.d.branch];
    Ok(if a > d {
        SplitDirection::Right
    } else if a < d {
        SplitDirection::Left
    } else {
        SplitDirection::Central
    })
}

/// Weights on the split track corresponding to `mu` on `t`, for the
/// resolved direction: every surviving branch keeps its weight and the
/// diagonal takes the difference.
pub fn pull_back(t: &TrainTrack, e: usize, mu: &[Q], direction: SplitDirection) -> Result<Vec<Q>> {
    let st = star(t, e)?;
    match direction {
        SplitDirection::Right | SplitDirection::Left => {
            let mut out = mu.to_vec();
            out[e] = if direction == SplitDirection::Right {
                &mu[st.a.branch] - &mu[st.d.branch]
            } else {
                &mu[st.d.branch] - &mu[st.a.branch]
            };
            Ok(out)
        }
        SplitDirection::Central => {
            let (_, m) = split(
                t,
                SplitChoice {
                    large_branch: e,
                    direction: SplitDirection::Central,
                },
            )?;
            let mut out = vec![Q::zero(); m.cols];
            for x in 0..m.rows {
                if x == e {
                    continue;
                }
                for y in 0..m.cols {
                    if m.get(x, y) == 1 {
                        out[y] = mu[x].clone();
                    }
                }
            }
            Ok(out)
        }
    }
}

/// One line of a move script.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Move {
    Split { branch: u32, direction: SplitDirection },
    Shift { branch: u32 },
    FullSplit { choices: Vec<(u32, SplitDirection)> },
}

/// Parses a `moves v1` script; branches are external ids.
pub fn parse_moves(text: &str) -> Result<Vec<Move>> {
    let mut header = false;
    let mut out = Vec::new();
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
            if line == "moves v1" {
                header = true;
                continue;
            }
            return Err(err("expected header `moves v1`".into()));
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        let id = |s: &str| s.parse::<u32>().map_err(|_| err(format!("bad branch id `{s}`")));
        match toks[0] {
            "split" if toks.len() == 3 => {
                let direction = SplitDirection::from_letter(toks[2])
                    .ok_or_else(|| err(format!("bad split direction `{}`", toks[2])))?;
                out.push(Move::Split {
                    branch: id(toks[1])?,
                    direction,
                });
            }
            "shift" if toks.len() == 2 => out.push(Move::Shift { branch: id(toks[1])? }),
            "fullsplit" => {
                let mut choices = Vec::new();
                for tok in &toks[1..] {
                    let (b, d) = tok
                        .split_once('=')
                        .ok_or_else(|| err(format!("expected <branch>=L|R, found `{tok}`")))?;
                    let d = SplitDirection::from_letter(d).ok_or_else(|| err(format!("bad direction `{d}`")))?;
                    choices.push((id(b)?, d));
                }
                out.push(Move::FullSplit { choices });
            }
            _ => return Err(err(format!("unrecognized move `{line}`"))),
        }
    }
    if !header {
        return Err(TrakError::Syntax {
            line: 1,
            column: 1,
            message: "missing header `moves v1`".into(),
        });
    }
    Ok(out)
}

/// Applies a move script; returns the final track and the composite matrix.
pub fn replay(t: &TrainTrack, moves: &[Move]) -> Result<(TrainTrack, CarryingMatrix)> {
    let mut cur = t.clone();
    let mut m = CarryingMatrix::identity(t.branch_count());
    let index = |t: &TrainTrack, id: u32| t.branch_index(id).ok_or(TrakError::UnknownBranch(id as usize));
    for mv in moves {
        let (next, step) = match mv {
            Move::Split { branch, direction } => split(
                &cur,
                SplitChoice {
                    large_branch: index(&cur, *branch)?,
                    direction: *direction,
                },
            )?,
            Move::Shift { branch } => shift(&cur, index(&cur, *branch)?)?,
            Move::FullSplit { choices } => {
                let mut map = BTreeMap::new();
                for &(b, d) in choices {
                    map.insert(index(&cur, b)?, d);
                }
                full_split(&cur, &map)?
            }
        };
        m = m.mul(&step)?;
        cur = next;
    }
    Ok((cur, m))
}

/// Sum of the entries of a rational vector.
pub fn total(x: &[Q]) -> Q {
    x.iter().fold(Q::zero(), |a, b| a + b)
}

/// Whether `x <= c * y` entrywise.
pub fn dominated(x: &[Q], y: &[Q], c: &Q) -> bool {
    x.iter().zip(y).all(|(a, b)| a <= &(c * b))
}
